"""JSON model/scenario/policy documents and comparison table output."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .errors import InvalidConfig, InvalidPolicy
from .evaluation import METHODS, ComparisonRow
from .model import PROB_TOL, ActionSpec, DagModel, State, Transition
from .push import ProbModel, PushScenarioConfig, synth_prob_model
from .solvers import Policy


def model_to_dict(model: DagModel) -> dict:
    return {
        "states": [
            {
                "id": st.id,
                "label": st.label,
                "actions": [
                    {
                        "label": a.label,
                        "transitions": [
                            {"target": t.target, "p": t.probability, "r": t.reward} for t in a.transitions
                        ],
                    }
                    for a in st.actions
                ],
            }
            for st in model.states
        ],
        "init": model.init,
        "loss": model.loss,
        "survive": model.survive,
        "r_max": model.r_max,
    }


def model_from_dict(doc: dict) -> DagModel:
    """Parse a model document.

    Actions whose probabilities sum to 1 within tolerance are rescaled to
    sum to 1; larger discrepancies are kept and left to validation.
    """
    try:
        states = []
        for sd in doc["states"]:
            actions = []
            for ad in sd.get("actions", []):
                trans = [Transition(int(td["target"]), float(td["p"]), float(td.get("r", 0.0))) for td in ad["transitions"]]
                total = sum(t.probability for t in trans)
                if total != 1.0 and abs(total - 1.0) <= PROB_TOL:
                    trans = [Transition(t.target, t.probability / total, t.reward) for t in trans]
                actions.append(ActionSpec(str(ad["label"]), tuple(trans)))
            states.append(State(int(sd["id"]), str(sd.get("label", sd["id"])), tuple(actions)))
        r_max = doc.get("r_max")
        return DagModel(
            tuple(states),
            init=int(doc["init"]),
            loss=int(doc["loss"]),
            survive=int(doc["survive"]),
            r_max=None if r_max is None else float(r_max),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidConfig(f"malformed model document: {exc!r}") from exc


def dumps_model(model: DagModel) -> str:
    return json.dumps(model_to_dict(model), indent=1) + "\n"


def save_model(model: DagModel, path) -> None:
    Path(path).write_text(dumps_model(model))


def load_model(path) -> DagModel:
    return model_from_dict(_load_json(path))


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    except OSError as exc:
        raise InvalidConfig(f"cannot read {path}: {exc.strerror}") from exc


def prob_model_from_dict(doc: dict, lam: int, m_max: int, seed: int | None = None) -> ProbModel:
    if "tables" in doc:
        return ProbModel(doc["tables"]["click"], doc["tables"]["close"])
    if "family" not in doc:
        raise InvalidConfig("prob_model needs either 'family' or 'tables'")
    s = doc.get("seed", 0) if seed is None else seed
    return synth_prob_model(doc["family"], lam, m_max, seed=int(s), **doc.get("params", {}))


def scenario_from_dict(doc: dict, seed: int | None = None) -> PushScenarioConfig:
    try:
        lam, m_max = doc["lambda"], doc["m_max"]
        if not (isinstance(lam, int) and isinstance(m_max, int)):
            raise InvalidConfig("lambda and m_max must be integers")
        if not 1 <= m_max <= lam:
            raise InvalidConfig(f"need 1 <= M <= lambda, got m_max={m_max}, lambda={lam}")
        return PushScenarioConfig(lam, m_max, prob_model_from_dict(doc["prob_model"], lam, m_max, seed))
    except KeyError as exc:
        raise InvalidConfig(f"scenario is missing field {exc}") from exc


def load_scenario(path, seed: int | None = None) -> PushScenarioConfig:
    return scenario_from_dict(_load_json(path), seed)


def sweep_from_dict(doc: dict) -> list[tuple[str, PushScenarioConfig]]:
    """Expand ``{lambda: [...], m: [...], family, params, seeds}`` into configs.

    Model ids read ``L{lambda}_M{m}_s{seed}``; order is lambda, then M, then
    seed, each as listed.
    """
    family = doc.get("family", "fatigue")
    params = doc.get("params", {})
    seeds = doc.get("seeds", [0])
    out = []
    for lam in doc.get("lambda", []):
        for m in doc.get("m", []):
            for seed in seeds:
                if not 1 <= m <= lam:
                    raise InvalidConfig(f"need 1 <= M <= lambda, got M={m}, lambda={lam}")
                pm = synth_prob_model(family, lam, m, seed=seed, **params)
                out.append((f"L{lam}_M{m}_s{seed}", PushScenarioConfig(lam, m, pm)))
    return out


def is_sweep(doc: dict) -> bool:
    return isinstance(doc.get("lambda"), list)


def policy_to_labels(model: DagModel, policy: Policy) -> dict[str, str]:
    labels = [st.label for st in model.states]
    if len(set(labels)) != len(labels):
        raise InvalidPolicy("state labels are not unique; cannot key a policy by label")
    return {model.states[s].label: model.states[s].actions[a].label for s, a in sorted(policy.items())}


def policy_from_labels(model: DagModel, doc: dict[str, str]) -> Policy:
    by_label = {st.label: st for st in model.states}
    policy = {}
    for sl, al in doc.items():
        if sl not in by_label:
            raise InvalidPolicy(f"unknown state label {sl!r}")
        st = by_label[sl]
        names = [a.label for a in st.actions]
        if al not in names:
            raise InvalidPolicy(f"state {sl!r} has no action {al!r}")
        policy[st.id] = names.index(al)
    return policy


def rows_to_csv(rows: list[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model_id", "method", "ltv", "lt", "ctr"])
    for row in rows:
        w.writerow([row.model_id, row.method, f"{row.ltv:.6f}", f"{row.lt:.6f}", f"{row.ctr:.6f}"])
    return buf.getvalue()


def rows_to_text(rows: list[ComparisonRow], groups: dict[str, tuple[str, str]] | None = None) -> str:
    """Aligned text tables, one per group of models.

    ``groups`` maps model id to ``(table title, column-group title)``; sweep
    output uses ``("lambda = 100", "M=10")`` so each table has methods as rows
    and one LTV/LT/CTR block per M. Ungrouped models get one table each.
    """
    if not rows:
        return ""
    if groups is None:
        groups = {r.model_id: (f"model {r.model_id}", "") for r in rows}
    tables: dict[str, list[str]] = {}
    for r in rows:
        title, col = groups[r.model_id]
        cols = tables.setdefault(title, [])
        if r.model_id not in cols:
            cols.append(r.model_id)
    cell = {(r.model_id, r.method): r for r in rows}
    out = []
    for title, mids in tables.items():
        head1 = f"{'Method':<8}" + "".join(f"{groups[m][1]:^36}" for m in mids)
        head2 = f"{'':<8}" + "".join(f"{'LTV':>12}{'LT':>12}{'CTR':>12}" for _ in mids)
        lines = [title, head1.rstrip(), head2]
        for method in METHODS:
            line = f"{method:<8}"
            for m in mids:
                r = cell[(m, method)]
                line += f"{r.ltv:>12.6f}{r.lt:>12.6f}{r.ctr:>12.6f}"
            lines.append(line)
        out.append("\n".join(lines))
    return "\n\n".join(out) + "\n"
