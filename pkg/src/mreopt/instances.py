"""Seeded random small models for certification against the oracle."""

from __future__ import annotations

import zlib

import numpy as np

from .model import ActionSpec, DagModel, State, Transition

INSTANCE_STREAM = zlib.crc32(b"instances")


def random_instance(
    rng: np.random.Generator,
    n_decision: int,
    max_actions: int = 3,
    min_loss: float = 0.01,
    max_loss: float = 0.5,
    zero_reward_frac: float = 0.2,
    loss_free_frac: float = 0.0,
) -> DagModel:
    """A random layered DAG with ``n_decision`` decision states.

    Decision states are ``0..n-1`` with ``0`` as init; transitions only go
    to higher ids, ``survive`` (id ``n``) or ``loss`` (id ``n+1``). Every
    action loses the customer with probability in ``[min_loss, max_loss]``,
    except a ``loss_free_frac`` share of actions that never reach loss
    directly.
    """
    n = n_decision
    survive, loss = n, n + 1
    targets: list[list[set[int]]] = []
    for s in range(n):
        k = int(rng.integers(1, max_actions + 1))
        acts = []
        for _ in range(k):
            later = list(range(s + 1, n)) + [survive]
            m = int(rng.integers(1, min(3, len(later)) + 1))
            acts.append(set(int(x) for x in rng.choice(later, size=m, replace=False)))
        targets.append(acts)
    # wire every state to some earlier one so all are reachable from init
    for j in range(1, n):
        if not any(j in a for i in range(j) for a in targets[i]):
            i = int(rng.integers(0, j))
            a = int(rng.integers(0, len(targets[i])))
            targets[i][a].add(j)

    states = []
    for s in range(n):
        actions = []
        for ai, dests in enumerate(targets[s]):
            dests = sorted(dests)
            p_loss = float(rng.uniform(min_loss, max_loss))
            if loss_free_frac and rng.random() < loss_free_frac:
                p_loss = 0.0
            w = rng.dirichlet(np.ones(len(dests)))
            probs = (1.0 - p_loss) * w
            trans = [Transition(loss, p_loss, _reward(rng, zero_reward_frac))] if p_loss > 0 else []
            for d, p in zip(dests, probs):
                if p > 0:
                    trans.append(Transition(d, float(p), _reward(rng, zero_reward_frac)))
            actions.append(ActionSpec(f"a{ai}", tuple(trans)))
        states.append(State(s, f"s{s}", tuple(actions)))
    states.append(State(survive, "survive"))
    states.append(State(loss, "loss"))
    return DagModel(tuple(states), init=0, loss=loss, survive=survive, r_max=1.0)


def _reward(rng, zero_frac):
    return 0.0 if rng.random() < zero_frac else float(rng.random())


def instance_stream(seed: int, count: int, max_decision: int = 8, max_actions: int = 3, min_loss: float = 0.01):
    """Yield ``count`` instances; instance ``i`` depends only on ``(seed, i)``."""
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(INSTANCE_STREAM, i)))
        n = int(rng.integers(1, max_decision + 1))
        yield random_instance(rng, n, max_actions=max_actions, min_loss=min_loss)
