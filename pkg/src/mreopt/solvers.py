"""Policy optimizers over a :class:`~mreopt.model.DagModel`.

``solve_mreopt`` is the long-run optimizer: it bisects on a guessed
life-time value ``g``. Each guess is scored by :func:`dp_pass`, which keeps
per-state ``(p, r)`` pairs (probability of surviving the round, expected
reward within the round) and picks actions by ``p * g + r``. Its fixed point
``F(g) = g`` is the optimal ``r / (1 - p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BracketOverflow, UnboundedModel
from .model import Boundedness, DagModel, check_boundedness

Policy = dict[int, int]
"""Decision state id -> index into that state's action list."""


@dataclass(frozen=True)
class ValuePair:
    p: float
    r: float

    def scalarize(self, g: float) -> float:
        return self.p * g + self.r


@dataclass(frozen=True)
class BracketStep:
    left: float
    right: float
    g: float
    branch: str


@dataclass(frozen=True)
class MreoptResult:
    ltv: float
    policy: Policy
    iterations: int
    bracket_trace: tuple[BracketStep, ...] = field(repr=False)
    expansions: int = 0
    policy_ltv: float = 0.0
    """Exact ``r / (1 - p)`` of ``policy``; at least ``ltv`` up to rounding."""


def _argmax(values: list[float]) -> int:
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


def solve_greedy(model: DagModel, mode: str = "conditional") -> Policy:
    """Click-maximizing baseline that ignores the risk of losing the customer.

    In ``conditional`` mode each action is scored by expected reward given
    that it does not hit loss, renormalizing over the non-loss outcomes;
    actions that always lose score 0. ``discounted`` mode scores the
    unconditional expected reward, which coincides with the one-round DP.
    """
    if mode not in ("conditional", "discounted"):
        raise ValueError(f"unknown greedy mode {mode!r}")
    v = [0.0] * model.n_states
    policy: Policy = {}
    loss = model.loss
    for s, acts in model.sweep:
        scores = []
        for trans in acts:
            if mode == "discounted":
                scores.append(sum(p * (r + v[t]) for t, p, r in trans))
                continue
            mass = sum(p for t, p, _ in trans if t != loss)
            if mass <= 0.0:
                scores.append(0.0)
            else:
                scores.append(sum(p * (r + v[t]) for t, p, r in trans if t != loss) / mass)
        a = _argmax(scores)
        policy[s] = a
        v[s] = scores[a]
    return policy


def _backward(model: DagModel, survive_value: float) -> tuple[list[float], Policy]:
    v = [0.0] * model.n_states
    v[model.survive] = survive_value
    policy: Policy = {}
    for s, acts in model.sweep:
        scores = [sum(p * (r + v[t]) for t, p, r in trans) for trans in acts]
        a = _argmax(scores)
        policy[s] = a
        v[s] = scores[a]
    return v, policy


def solve_bf_one_round(model: DagModel) -> tuple[float, Policy]:
    """Maximize expected reward of a single round (loss and survive worth 0)."""
    v, policy = _backward(model, 0.0)
    return v[model.init], policy


def solve_bf_unrolled(model: DagModel, k_days: int) -> tuple[float, Policy]:
    """Optimal expected reward over ``k_days`` chained rounds.

    Round ``i``'s survive state inherits the optimal value of the remaining
    rounds. Returns that value and the first round's policy.
    """
    if k_days < 1:
        raise ValueError("k_days must be >= 1")
    value, policy = 0.0, {}
    for _ in range(k_days):
        v, policy = _backward(model, value)
        value = v[model.init]
    return value, policy


def unrolled_values(model: DagModel, k_days: int) -> list[tuple[float, Policy]]:
    """``[(V_1, pi_1), ..., (V_K, pi_K)]`` from one sweep of the recursion."""
    out = []
    value = 0.0
    for _ in range(k_days):
        v, policy = _backward(model, value)
        value = v[model.init]
        out.append((value, policy))
    return out


def dp_pass(model: DagModel, g: float) -> tuple[ValuePair, Policy, dict[int, ValuePair]]:
    """One backward pass scoring actions by ``p * g + r``.

    Anchors are ``survive -> (1, 0)`` and ``loss -> (0, 0)``. Pairs are
    recomputed from scratch on every call.
    """
    n = model.n_states
    pp = [0.0] * n
    rr = [0.0] * n
    pp[model.survive] = 1.0
    policy: Policy = {}
    for s, acts in model.sweep:
        best_a = 0
        best_p = best_r = 0.0
        best_score = -math.inf
        for ai, trans in enumerate(acts):
            pa = ra = 0.0
            for t, p, r in trans:
                pa += p * pp[t]
                ra += p * (r + rr[t])
            if pa > 1.0:
                pa = 1.0  # float overshoot on loss-free actions
            score = pa * g + ra
            if score > best_score:
                best_score, best_a, best_p, best_r = score, ai, pa, ra
        policy[s] = best_a
        pp[s] = best_p
        rr[s] = best_r
    per_state = {s: ValuePair(pp[s], rr[s]) for s in range(n)}
    return per_state[model.init], policy, per_state


def fixed_point_map(model: DagModel, g: float) -> float:
    """``F(g)``: the init pair of :func:`dp_pass` scalarized at ``g``."""
    pair, _, _ = dp_pass(model, g)
    return pair.scalarize(g)


def _ratio(pair: ValuePair) -> float:
    if pair.p >= 1.0:
        return math.inf if pair.r > 0 else 0.0
    return pair.r / (1.0 - pair.p)


def solve_mreopt(model: DagModel, epsilon: float = 1e-6, *, branch: str = "corrected") -> MreoptResult:
    """Optimal life-time value by bisection on the guessed value ``g``.

    The upper end of the bracket is found by doubling from 1 until
    ``F(right) <= right``. Each step then evaluates ``F`` at the midpoint:
    ``F(g) > g`` means the fixed point lies above ``g`` so ``left`` moves up,
    otherwise ``right`` moves down.

    ``branch="printed"`` reproduces the textbook update rule, which moves
    ``left`` when the realized ratio ``r / (1 - p)`` is *at most* ``g``. It
    converges to the wrong end: on a two-action model where action B
    (p=0.95, r=0.38, ratio 7.6) beats A (p=0.5, r=0.5, ratio 1.0), the
    midpoint g=4 realizes ratio 7.6 > 4 and sets right=4, discarding the
    answer. It exists only so that regression tests can pin that behavior.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if branch not in ("corrected", "printed"):
        raise ValueError(f"unknown branch rule {branch!r}")
    if check_boundedness(model) is Boundedness.UNBOUNDED_LTV:
        raise UnboundedModel("UnboundedLtv: a zero-loss strategy earns positive reward every round")

    cap = 2.0**40 * model.reward_ceiling * model.n_states
    left, right = 0.0, 1.0
    expansions = 0
    while fixed_point_map(model, right) > right:
        right *= 2.0
        expansions += 1
        if right > cap:
            raise BracketOverflow(f"bracket exceeded {cap:g}; model is probably unbounded")

    trace = []
    while right - left > epsilon:
        g = (left + right) / 2.0
        pair, _, _ = dp_pass(model, g)
        if branch == "corrected":
            up = pair.scalarize(g) > g
        else:
            up = _ratio(pair) <= g
        if up:
            trace.append(BracketStep(left, right, g, "left"))
            left = g
        else:
            trace.append(BracketStep(left, right, g, "right"))
            right = g

    pair, policy, _ = dp_pass(model, left)
    policy_ltv = 0.0 if (pair.p >= 1.0 and pair.r == 0.0) else _ratio(pair)
    return MreoptResult(
        ltv=left,
        policy=policy,
        iterations=len(trace),
        bracket_trace=tuple(trace),
        expansions=expansions,
        policy_ltv=policy_ltv,
    )
