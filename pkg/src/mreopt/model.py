"""DAG-structured MDP with loss/survive absorbing states.

A round starts at ``init`` and ends when it reaches either ``loss`` (the
customer is gone) or ``survive`` (the round is over and, under the
memoryless restart, the next round begins again at ``init``).
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from functools import cached_property

from .errors import CycleDetected

PROB_TOL = 1e-9


@dataclass(frozen=True)
class Transition:
    target: int
    probability: float
    reward: float = 0.0


@dataclass(frozen=True)
class ActionSpec:
    label: str
    transitions: tuple[Transition, ...]


@dataclass(frozen=True)
class State:
    id: int
    label: str
    actions: tuple[ActionSpec, ...] = ()


@dataclass(frozen=True)
class DagModel:
    """Immutable MDP whose within-round transition graph is acyclic.

    ``r_max`` is the declared reward ceiling; when omitted, the largest
    reward present in the model (at least 1.0) is used.
    """

    states: tuple[State, ...]
    init: int
    loss: int
    survive: int
    r_max: float | None = None

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def terminals(self) -> tuple[int, int]:
        return (self.survive, self.loss)

    def is_terminal(self, s: int) -> bool:
        return s == self.survive or s == self.loss

    @property
    def decision_states(self) -> list[int]:
        return [st.id for st in self.states if not self.is_terminal(st.id)]

    @cached_property
    def reward_ceiling(self) -> float:
        if self.r_max is not None:
            return float(self.r_max)
        top = max(
            (tr.reward for st in self.states for a in st.actions for tr in a.transitions),
            default=0.0,
        )
        return max(1.0, top)

    @cached_property
    def order(self) -> list[int]:
        return topological_order(self)

    @cached_property
    def sweep(self) -> list[tuple[int, tuple[tuple[tuple[int, float, float], ...], ...]]]:
        """Decision states in backward-induction order with flattened actions.

        Each entry is ``(state, actions)`` where every action is a tuple of
        ``(target, probability, reward)`` triples. Solvers iterate this
        instead of the dataclasses to keep the inner loop cheap.
        """
        out = []
        for s in self.order[2:]:
            acts = tuple(
                tuple((t.target, t.probability, t.reward) for t in a.transitions)
                for a in self.states[s].actions
            )
            out.append((s, acts))
        return out

    def with_rewards_scaled(self, c: float) -> DagModel:
        states = tuple(
            State(
                st.id,
                st.label,
                tuple(
                    ActionSpec(
                        a.label,
                        tuple(Transition(t.target, t.probability, t.reward * c) for t in a.transitions),
                    )
                    for a in st.actions
                ),
            )
            for st in self.states
        )
        r_max = None if self.r_max is None else self.r_max * c
        return DagModel(states, self.init, self.loss, self.survive, r_max)


@dataclass(frozen=True)
class Violation:
    rule: str
    state: int | None
    action: int | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(
            f"{v.rule} at (state={v.state}, action={v.action}): {v.message}" for v in self.violations
        )


class Boundedness(enum.Enum):
    BOUNDED = "Bounded"
    UNBOUNDED_LTV = "UnboundedLtv"
    ZERO_VALUE_IMMORTAL = "ZeroValueImmortal"


def _successors(model: DagModel, s: int) -> set[int]:
    n = model.n_states
    return {
        t.target
        for a in model.states[s].actions
        for t in a.transitions
        if 0 <= t.target < n
    }


def _find_cycle_node(model: DagModel) -> int | None:
    """Return a node on a cycle among non-terminal states, or None."""
    n = model.n_states
    color = [0] * n
    for root in range(n):
        if color[root] or model.is_terminal(root):
            continue
        stack = [(root, iter(sorted(_successors(model, root))))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            for nxt in it:
                if model.is_terminal(nxt):
                    continue
                if color[nxt] == 1:
                    return nxt
                if color[nxt] == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(sorted(_successors(model, nxt)))))
                    break
            else:
                color[node] = 2
                stack.pop()
    return None


def validate_model(model: DagModel) -> ValidationReport:
    """Check every structural rule and collect the violations.

    Never raises on malformed input; a model that comes back ``ok`` meets the
    preconditions of every solver.
    """
    out: list[Violation] = []

    def bad(rule, state, action, msg):
        out.append(Violation(rule, state, action, msg))

    n = model.n_states
    for pos, st in enumerate(model.states):
        if st.id != pos:
            bad("dense-ids", pos, None, f"state at position {pos} carries id {st.id}")
    specials = {"init": model.init, "loss": model.loss, "survive": model.survive}
    for name, s in specials.items():
        if not 0 <= s < n:
            bad("special-state", None, None, f"{name}={s} is not a state id")
    if len(set(specials.values())) != 3:
        bad("special-state", None, None, "init, loss and survive must be distinct")
    if model.r_max is not None and model.r_max < 0:
        bad("r-max", None, None, f"r_max={model.r_max} is negative")
    if out:
        return ValidationReport(tuple(out))

    for st in model.states:
        if model.is_terminal(st.id):
            if st.actions:
                bad("terminal-actions", st.id, None, "loss/survive states must have no actions")
            continue
        if not st.actions:
            bad("no-actions", st.id, None, "non-terminal state has no actions")
        for ai, a in enumerate(st.actions):
            if not a.transitions:
                bad("empty-action", st.id, ai, "action has no transitions")
                continue
            total = 0.0
            for t in a.transitions:
                if not 0 <= t.target < n:
                    bad("invalid-target", st.id, ai, f"target {t.target} is not a state id")
                if not 0.0 <= t.probability <= 1.0:
                    bad("probability-range", st.id, ai, f"probability {t.probability} outside [0, 1]")
                elif t.probability == 0.0:
                    bad("zero-probability", st.id, ai, "zero-probability transitions must be omitted")
                if t.reward < 0:
                    bad("negative-reward", st.id, ai, f"reward {t.reward} < 0")
                elif model.r_max is not None and t.reward > model.r_max:
                    bad("reward-exceeds-rmax", st.id, ai, f"reward {t.reward} > r_max {model.r_max}")
                total += t.probability
            if abs(total - 1.0) > PROB_TOL:
                bad("probability-sum", st.id, ai, f"probabilities sum to {total!r}")

    if any(v.rule == "invalid-target" for v in out):
        return ValidationReport(tuple(out))

    cyc = _find_cycle_node(model)
    if cyc is not None:
        bad("acyclic", cyc, None, f"state {cyc} lies on a cycle")

    seen = {model.init}
    frontier = [model.init]
    while frontier:
        s = frontier.pop()
        if model.is_terminal(s):
            continue
        for nxt in _successors(model, s):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    for st in model.states:
        if not model.is_terminal(st.id) and st.id not in seen:
            bad("unreachable", st.id, None, "state is not reachable from init")

    preds: dict[int, set[int]] = {s: set() for s in range(n)}
    for s in range(n):
        if not model.is_terminal(s):
            for nxt in _successors(model, s):
                preds[nxt].add(s)
    exits = {model.loss, model.survive}
    frontier = list(exits)
    while frontier:
        s = frontier.pop()
        for p in preds[s]:
            if p not in exits:
                exits.add(p)
                frontier.append(p)
    for st in model.states:
        if not model.is_terminal(st.id) and st.id not in exits:
            bad("no-exit", st.id, None, "neither loss nor survive is reachable")

    return ValidationReport(tuple(out))


def topological_order(model: DagModel) -> list[int]:
    """Reverse topological order ``[survive, loss, ..., init]``.

    Every transition points from a later position to an earlier one. Among
    states that become available together the smallest id goes first.
    """
    decision = [s for s in range(model.n_states) if not model.is_terminal(s)]
    pending = {}
    preds: dict[int, list[int]] = {s: [] for s in decision}
    for s in decision:
        succ = [t for t in _successors(model, s) if not model.is_terminal(t)]
        pending[s] = len(succ)
        for t in succ:
            preds[t].append(s)

    heap = [s for s in decision if pending[s] == 0 and s != model.init]
    heapq.heapify(heap)
    order = [model.survive, model.loss]
    while heap:
        s = heapq.heappop(heap)
        order.append(s)
        for p in preds[s]:
            pending[p] -= 1
            if pending[p] == 0 and p != model.init:
                heapq.heappush(heap, p)
    if model.init in pending:
        if pending[model.init] != 0:
            raise CycleDetected("transition graph among decision states has a cycle")
        order.append(model.init)
    if len(order) != model.n_states:
        raise CycleDetected("transition graph among decision states has a cycle")
    return order


def check_boundedness(model: DagModel) -> Boundedness:
    """Classify whether some strategy can survive forever.

    A state is *safe* if one of its actions sends all probability mass to
    survive or to other safe states. If init is safe, the best one-round
    reward achievable using only safe actions decides between an infinite
    LTV and a harmless zero-payoff immortal strategy.
    """
    safe_value: dict[int, float] = {model.survive: 0.0}
    for s, acts in model.sweep:
        best = None
        for trans in acts:
            if all(t in safe_value for t, _, _ in trans):
                v = sum(p * (r + safe_value[t]) for t, p, r in trans)
                if best is None or v > best:
                    best = v
        if best is not None:
            safe_value[s] = best
    if model.init not in safe_value:
        return Boundedness.BOUNDED
    if safe_value[model.init] > 0.0:
        return Boundedness.UNBOUNDED_LTV
    return Boundedness.ZERO_VALUE_IMMORTAL
