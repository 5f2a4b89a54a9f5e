"""
Two-action toy models
=====================

A single decision state with two actions. ``A`` earns a click half the time
and loses the customer the other half; ``B`` earns less per round but
almost always keeps the customer. One round favours ``A``, a lifetime
favours ``B``.
"""

from mreopt import (
    ActionSpec,
    DagModel,
    State,
    Transition,
    evaluate_policy,
    metrics,
    solve_bf_one_round,
    solve_greedy,
    solve_mreopt,
)


def toy(b_survive, b_reward):
    a = ActionSpec("A", (Transition(1, 0.5, 1.0), Transition(2, 0.5)))
    b = ActionSpec("B", (Transition(1, b_survive, b_reward), Transition(2, round(1 - b_survive, 12))))
    states = (State(0, "init", (a, b)), State(1, "survive"), State(2, "loss"))
    return DagModel(states, init=0, loss=2, survive=1, r_max=1.0)


for name, model in [("T1", toy(0.9, 0.1)), ("T2", toy(0.95, 0.4))]:
    print(f"--- {name}")
    for label, pol in [("A", {0: 0}), ("B", {0: 1})]:
        stats = evaluate_policy(model, pol)
        rep = metrics(stats)
        print(f"policy {label}: p={stats.p:.2f} r={stats.r:.2f}  LTV={rep.ltv:.4f} LT={rep.lt:.2f} CTR={rep.ctr:.3f}")
    value, bf = solve_bf_one_round(model)
    res = solve_mreopt(model)
    print(f"greedy picks {'AB'[solve_greedy(model)[0]]}, one-round DP picks {'AB'[bf[0]]} (value {value:.2f})")
    print(f"bisection picks {'AB'[res.policy[0]]}: LTV {res.ltv:.6f} after {res.iterations} DP passes")
