"""Randomized certification of the bisection optimizer against enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import TooManyPolicies
from .evaluation import ORACLE_CAP, enumerate_oracle, evaluate_policy, metrics
from .instances import instance_stream
from .model import DagModel, validate_model
from .solvers import fixed_point_map, solve_bf_one_round, solve_greedy, solve_mreopt


@dataclass
class Failure:
    index: int
    model: DagModel
    reasons: list[str]


@dataclass
class CertifyReport:
    total: int = 0
    passed: int = 0
    failures: list[Failure] = field(default_factory=list)
    max_gap: float = 0.0

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def summary(self) -> str:
        return f"{self.passed}/{self.total} pass (max |mreopt - oracle| = {self.max_gap:.3e})"


def check_instance(model: DagModel, epsilon: float) -> tuple[list[str], float]:
    """Run every optimality, fixed-point and dominance check on one model."""
    tol = 10 * epsilon
    reasons = []
    report = validate_model(model)
    if not report.ok:
        return [f"invalid model: {report}"], 0.0
    res = solve_mreopt(model, epsilon)
    best, _, _ = enumerate_oracle(model)
    gap = abs(res.ltv - best)
    if gap > tol:
        reasons.append(f"mreopt ltv {res.ltv:.9f} != oracle {best:.9f}")
    evaluated = metrics(evaluate_policy(model, res.policy)).ltv
    if abs(evaluated - best) > tol:
        reasons.append(f"mreopt policy evaluates to {evaluated:.9f}, oracle {best:.9f}")
    fp = fixed_point_map(model, res.ltv)
    if abs(fp - res.ltv) > tol:
        reasons.append(f"|F(ltv) - ltv| = {abs(fp - res.ltv):.3e}")
    for name, pol in (("greedy", solve_greedy(model)), ("bf", solve_bf_one_round(model)[1])):
        v = metrics(evaluate_policy(model, pol)).ltv
        if v > evaluated + tol:
            reasons.append(f"{name} ltv {v:.9f} beats mreopt {evaluated:.9f}")
    return reasons, gap


def certify(
    count: int,
    seed: int,
    max_decision: int = 8,
    max_actions: int = 3,
    epsilon: float = 1e-6,
    min_loss: float = 0.01,
) -> CertifyReport:
    if max_actions**max_decision > ORACLE_CAP:
        raise TooManyPolicies(
            f"{max_actions}^{max_decision} policies per instance exceeds the cap of {ORACLE_CAP}"
        )
    rep = CertifyReport()
    for i, model in enumerate(instance_stream(seed, count, max_decision, max_actions, min_loss)):
        reasons, gap = check_instance(model, epsilon)
        rep.total += 1
        rep.max_gap = max(rep.max_gap, gap)
        if reasons:
            rep.failures.append(Failure(i, model, reasons))
        else:
            rep.passed += 1
    return rep
