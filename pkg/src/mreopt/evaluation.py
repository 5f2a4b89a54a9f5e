"""Exact and simulated evaluation of fixed policies.

Under the memoryless restart every round is an independent replay, so a
policy's long-run numbers follow from one round's survival probability
``p``, expected reward ``r`` and expected send count ``l``:
``LTV = r / (1 - p)``, ``LT = l / (1 - p)``, ``CTR = LTV / LT``.
"""

from __future__ import annotations

import bisect
import itertools
import math
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import InvalidPolicy, ModeMismatch, TooManyPolicies, UnboundedLtv
from .model import DagModel
from .solvers import Policy, solve_bf_one_round, solve_greedy, solve_mreopt

ORACLE_CAP = 10**6
SIM_STREAM = zlib.crc32(b"simulation")


@dataclass(frozen=True)
class RoundStats:
    p: float
    r: float
    l: float


@dataclass(frozen=True)
class MetricsReport:
    ltv: float
    lt: float
    ctr: float
    immortal: bool = False


@dataclass(frozen=True)
class SimReport:
    n_episodes: int
    mean_ltv: float
    mean_lt: float
    stderr_ltv: float
    stderr_lt: float
    truncated_fraction: float


def send_flags(model: DagModel) -> dict[tuple[int, int], bool]:
    """Which ``(state, action)`` pairs count as one delivered send.

    Models that label any action ``send`` use the labels; otherwise every
    action with a positive-reward outcome counts.
    """
    labelled = any(a.label == "send" for st in model.states for a in st.actions)
    flags = {}
    for st in model.states:
        for ai, a in enumerate(st.actions):
            if labelled:
                flags[(st.id, ai)] = a.label == "send"
            else:
                flags[(st.id, ai)] = any(t.reward > 0 for t in a.transitions)
    return flags


def check_policy(model: DagModel, policy: Policy) -> None:
    for s in model.decision_states:
        if s not in policy:
            raise InvalidPolicy(f"policy has no choice for state {s}")
        a = policy[s]
        if not isinstance(a, (int, np.integer)) or not 0 <= a < len(model.states[s].actions):
            raise InvalidPolicy(f"choice {a!r} at state {s} is out of range")


def evaluate_policy(model: DagModel, policy: Policy) -> RoundStats:
    """Round statistics at init for a fixed policy, by one backward pass.

    Loss probability is accumulated directly so a loss-free policy gets
    ``p == 1.0`` exactly.
    """
    check_policy(model, policy)
    sends = send_flags(model)
    n = model.n_states
    q = [0.0] * n
    r = [0.0] * n
    l = [0.0] * n
    q[model.loss] = 1.0
    for s, acts in model.sweep:
        a = policy[s]
        qs = rs = 0.0
        ls = 1.0 if sends[(s, a)] else 0.0
        for t, p, rew in acts[a]:
            qs += p * q[t]
            rs += p * (rew + r[t])
            ls += p * l[t]
        q[s], r[s], l[s] = min(qs, 1.0), rs, ls
    i = model.init
    return RoundStats(p=1.0 - q[i], r=r[i], l=l[i])


def metrics(stats: RoundStats) -> MetricsReport:
    if stats.p >= 1.0:
        if stats.r > 0:
            raise UnboundedLtv(f"survival probability 1 with round reward {stats.r}")
        return MetricsReport(ltv=0.0, lt=math.inf, ctr=0.0, immortal=True)
    stay = 1.0 - stats.p
    ltv = stats.r / stay
    lt = stats.l / stay
    ctr = stats.r / stats.l if stats.l > 0 else 0.0
    return MetricsReport(ltv=ltv, lt=lt, ctr=ctr)


def policy_count(model: DagModel) -> int:
    return math.prod(len(model.states[s].actions) for s in model.decision_states)


def enumerate_oracle(model: DagModel, cap: int = ORACLE_CAP) -> tuple[float, Policy, list[tuple[Policy, MetricsReport]]]:
    """Evaluate every deterministic stationary policy.

    The winner is the first maximizer in lexicographic order of the action
    index vector over ascending state ids.
    """
    states = sorted(model.decision_states)
    total = policy_count(model)
    if total > cap:
        raise TooManyPolicies(f"{total} policies exceeds the cap of {cap}")
    table = []
    best_ltv, best_policy = -math.inf, None
    for choice in itertools.product(*(range(len(model.states[s].actions)) for s in states)):
        policy = dict(zip(states, choice))
        rep = metrics(evaluate_policy(model, policy))
        table.append((policy, rep))
        if rep.ltv > best_ltv:
            best_ltv, best_policy = rep.ltv, policy
    return best_ltv, best_policy, table


def simulate_online(
    model: DagModel,
    policy: Policy,
    n_episodes: int,
    seed: int,
    max_rounds: int,
    mode: str = "expected",
    *,
    first_episode: int = 0,
) -> SimReport:
    """Monte Carlo estimate of long-run clicks and sends per customer.

    Episode ``i`` draws from its own stream keyed by ``(seed, i)``, so the
    report does not depend on the order episodes are run in; workers can
    each take a slice of episodes via ``first_episode``. In ``click``
    mode each rewarded edge yields a Bernoulli click with the edge reward as
    probability; ``expected`` mode adds the reward itself.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    if n_episodes < 1:
        raise ValueError("n_episodes must be >= 1")
    if mode not in ("click", "expected"):
        raise ValueError(f"unknown simulation mode {mode!r}")
    if mode == "click" and model.reward_ceiling > 1.0:
        raise ModeMismatch(f"click simulation needs rewards <= 1, r_max is {model.reward_ceiling}")
    check_policy(model, policy)
    sends = send_flags(model)

    # per decision state: (is_send, cumulative probs, targets, rewards)
    table = {}
    for s in model.decision_states:
        a = policy[s]
        trans = model.states[s].actions[a].transitions
        cum = list(itertools.accumulate(t.probability for t in trans))
        cum[-1] = math.inf  # absorb rounding so every draw lands somewhere
        table[s] = (sends[(s, a)], cum, [t.target for t in trans], [t.reward for t in trans])

    init, loss, survive = model.init, model.loss, model.survive
    click_mode = mode == "click"
    ltv = np.empty(n_episodes)
    lt = np.empty(n_episodes)
    truncated = 0
    block = 256
    for i in range(n_episodes):
        key = (SIM_STREAM, first_episode + i)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))
        u = rng.random(block).tolist()
        k = 0
        clicks = 0.0
        n_sends = 0
        rounds = 0
        s = init
        while True:
            if k + 2 > len(u):
                u = rng.random(block).tolist()
                k = 0
            is_send, cum, targets, rewards = table[s]
            if is_send:
                n_sends += 1
            j = bisect.bisect_right(cum, u[k])
            k += 1
            rho = rewards[j]
            if rho > 0.0:
                if click_mode:
                    if u[k] < rho:
                        clicks += 1.0
                    k += 1
                else:
                    clicks += rho
            s = targets[j]
            if s == loss:
                break
            if s == survive:
                rounds += 1
                if rounds == max_rounds:
                    truncated += 1
                    break
                s = init
        ltv[i] = clicks
        lt[i] = n_sends

    def stderr(x):
        return float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0

    return SimReport(
        n_episodes=n_episodes,
        mean_ltv=float(ltv.mean()),
        mean_lt=float(lt.mean()),
        stderr_ltv=stderr(ltv),
        stderr_lt=stderr(lt),
        truncated_fraction=truncated / n_episodes,
    )


@dataclass(frozen=True)
class ComparisonRow:
    model_id: str
    method: str
    ltv: float
    lt: float
    ctr: float


METHODS = ("Greedy", "BF", "MREOpt")


def compare(
    models: list[DagModel],
    epsilon: float = 1e-6,
    model_ids: list[str] | None = None,
    greedy_mode: str = "conditional",
) -> list[ComparisonRow]:
    """Greedy, one-round BF and MREOpt policies scored on the long-run metrics.

    Every row is the exact evaluation of that method's policy, so
    ``ltv == ctr * lt`` holds row by row.
    """
    if model_ids is None:
        model_ids = [str(i) for i in range(len(models))]
    rows = []
    for mid, model in zip(model_ids, models):
        policies = {
            "Greedy": solve_greedy(model, greedy_mode),
            "BF": solve_bf_one_round(model)[1],
            "MREOpt": solve_mreopt(model, epsilon).policy,
        }
        for method in METHODS:
            rep = metrics(evaluate_policy(model, policies[method]))
            rows.append(ComparisonRow(mid, method, rep.ltv, rep.lt, rep.ctr))
    return rows
