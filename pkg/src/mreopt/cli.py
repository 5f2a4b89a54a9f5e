"""Command-line front end.

Exit codes: 0 success, 2 input/config error, 3 model semantic error
(unbounded LTV), 4 certification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fileio
from .certify import certify
from .errors import BracketOverflow, InvalidConfig, InvalidPolicy, ModeMismatch, TooManyPolicies, UnboundedLtv
from .evaluation import compare, evaluate_policy, metrics, simulate_online
from .model import validate_model
from .push import build_push_dag
from .solvers import solve_bf_one_round, solve_bf_unrolled, solve_greedy, solve_mreopt

EXIT_INPUT = 2
EXIT_SEMANTIC = 3
EXIT_CERTIFY = 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_valid_model(path):
    model = fileio.load_model(path)
    report = validate_model(model)
    if not report.ok:
        raise CliError(f"{path}: invalid model\n{report}")
    return model


def _parse_solver(name: str, k_days: int | None) -> tuple[str, int | None]:
    if name.startswith("bf-unrolled"):
        _, _, k = name.partition(":")
        if k:
            k_days = int(k)
        if not k_days or k_days < 1:
            raise CliError("bf-unrolled needs a positive K (bf-unrolled:K or --k-days)")
        return "bf-unrolled", k_days
    if name not in ("greedy", "bf", "mreopt"):
        raise CliError(f"unknown solver {name!r}")
    return name, None


def _run_solver(model, args) -> tuple[dict, dict]:
    """Run the requested solver; return (result fields, policy)."""
    solver, k = _parse_solver(args.solver, args.k_days)
    if solver == "greedy":
        return {}, solve_greedy(model, args.greedy_mode)
    if solver == "bf":
        value, policy = solve_bf_one_round(model)
        return {"value": value}, policy
    if solver == "bf-unrolled":
        value, policy = solve_bf_unrolled(model, k)
        return {"value": value, "k_days": k}, policy
    res = solve_mreopt(model, args.epsilon)
    fields = {"ltv": res.ltv, "policy_ltv": res.policy_ltv, "iterations": res.iterations}
    if getattr(args, "trace", False):
        fields["bracket_trace"] = [[s.left, s.right, s.g, s.branch] for s in res.bracket_trace]
    return fields, res.policy


def cmd_generate(args) -> int:
    config = fileio.load_scenario(args.scenario, args.seed)
    model = build_push_dag(config)
    report = validate_model(model)
    if not report.ok:
        raise CliError(f"generated model failed validation\n{report}", EXIT_SEMANTIC)
    _emit(fileio.dumps_model(model), args.out)
    return 0


def cmd_solve(args) -> int:
    model = _load_valid_model(args.model)
    fields, policy = _run_solver(model, args)
    labels = fileio.policy_to_labels(model, policy)
    if args.out:
        doc = {"solver": args.solver, **fields, "policy": labels}
        Path(args.out).write_text(json.dumps(doc, indent=1) + "\n")
    lines = [f"solver={args.solver}"]
    for key, val in fields.items():
        if key == "bracket_trace":
            continue
        lines.append(f"{key}={val:.6f}" if isinstance(val, float) else f"{key}={val}")
    lines.append("policy=" + json.dumps(labels))
    if "bracket_trace" in fields:
        lines.append("trace:")
        for i, (left, right, g, branch) in enumerate(fields["bracket_trace"]):
            lines.append(f"  {i:3d} left={left:.6f} right={right:.6f} g={g:.6f} -> {branch}")
    print("\n".join(lines))
    return 0


def _policy_for(model, args):
    if args.policy:
        doc = json.loads(Path(args.policy).read_text())
        return fileio.policy_from_labels(model, doc.get("policy", doc))
    return _run_solver(model, args)[1]


def cmd_eval(args) -> int:
    model = _load_valid_model(args.model)
    policy = _policy_for(model, args)
    stats = evaluate_policy(model, policy)
    rep = metrics(stats)
    lt = "inf (immortal)" if rep.immortal else f"{rep.lt:.6f}"
    print(f"p={stats.p:.6f}\nr={stats.r:.6f}\nl={stats.l:.6f}\nltv={rep.ltv:.6f}\nlt={lt}\nctr={rep.ctr:.6f}")
    return 0


def cmd_simulate(args) -> int:
    model = _load_valid_model(args.model)
    policy = _policy_for(model, args)
    rep = simulate_online(model, policy, args.episodes, args.seed, args.max_rounds, args.sim_mode)
    print(
        f"episodes={rep.n_episodes}\n"
        f"mean_ltv={rep.mean_ltv:.6f}\nstderr_ltv={rep.stderr_ltv:.6f}\n"
        f"mean_lt={rep.mean_lt:.6f}\nstderr_lt={rep.stderr_lt:.6f}\n"
        f"truncated_fraction={rep.truncated_fraction:.6f}"
    )
    return 0


def cmd_compare(args) -> int:
    models, ids, groups = [], [], {}
    if args.scenario:
        doc = json.loads(Path(args.scenario).read_text())
        if not fileio.is_sweep(doc):
            raise CliError("--scenario for compare must be a sweep spec with a 'lambda' list")
        multi_seed = len(doc.get("seeds", [0])) > 1
        for mid, config in fileio.sweep_from_dict(doc):
            models.append(build_push_dag(config))
            ids.append(mid)
            seed = mid.rsplit("_s", 1)[1]
            title = f"lambda = {config.lam}" + (f", seed {seed}" if multi_seed else "")
            groups[mid] = (title, f"M={config.m_max}")
    for path in args.model or []:
        models.append(_load_valid_model(path))
        ids.append(Path(path).stem)
        groups[ids[-1]] = (f"model {ids[-1]}", "")
    rows = compare(models, args.epsilon, ids, args.greedy_mode)
    text = fileio.rows_to_csv(rows) if args.format == "csv" else fileio.rows_to_text(rows, groups)
    if not rows:
        text = ""
    _emit(text, args.out)
    return 0


def cmd_certify(args) -> int:
    rep = certify(args.instances, args.seed, args.max_states, args.max_actions, args.epsilon)
    print(rep.summary())
    if rep.ok:
        return 0
    out = Path(args.out or "certify-failures")
    out.mkdir(parents=True, exist_ok=True)
    for f in rep.failures:
        path = out / f"instance_{f.index:05d}.json"
        fileio.save_model(f.model, path)
        print(f"FAIL instance {f.index}: {'; '.join(f.reasons)} -> {path}")
    return EXIT_CERTIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mreopt", description="Life-time value optimization over DAG MDPs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(p, required=True):
        p.add_argument("--solver", required=required, default=None if required else "mreopt",
                       help="greedy | bf | bf-unrolled:K | mreopt")
        p.add_argument("--epsilon", type=float, default=1e-6)
        p.add_argument("--k-days", type=int, default=None)
        p.add_argument("--greedy-mode", choices=("conditional", "discounted"), default="conditional")

    p = sub.add_parser("generate", help="materialize a push-scenario model file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the scenario's generation seed")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="optimize a model")
    p.add_argument("--model", required=True)
    solver_flags(p)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", help="exact LTV/LT/CTR of a policy")
    p.add_argument("--model", required=True)
    p.add_argument("--policy", help="policy JSON ({state label: action label}); default: run --solver")
    solver_flags(p, required=False)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="Monte Carlo episodes under a policy")
    p.add_argument("--model", required=True)
    p.add_argument("--policy")
    solver_flags(p, required=False)
    p.add_argument("--episodes", type=int, default=10000)
    p.add_argument("--max-rounds", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sim-mode", choices=("click", "expected"), default="expected")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="Greedy / BF / MREOpt table")
    p.add_argument("--model", action="append", help="model file (repeatable)")
    p.add_argument("--scenario", help="sweep spec {lambda: [...], m: [...], family, params, seeds}")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--greedy-mode", choices=("conditional", "discounted"), default="conditional")
    p.add_argument("--format", choices=("csv", "text"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("certify", help="random instances checked against exhaustive enumeration")
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--max-states", type=int, default=8)
    p.add_argument("--max-actions", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--out", help="directory for failing instances")
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "epsilon", 1.0) <= 0:
        print("error: --epsilon must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (UnboundedLtv, BracketOverflow) as exc:
        print(f"UnboundedLtv: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except (InvalidConfig, InvalidPolicy, TooManyPolicies, ModeMismatch, ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
