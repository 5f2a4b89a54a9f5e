"""
Daily push schedule
===================

A day has ``lam`` candidate slots and at most ``m_max`` pushes. Every send
risks the customer switching notifications off, with fatigue making later
pushes both less clicked and more annoying. The optimal long-run policy
sends far less than the per-round optimum.
"""

import numpy as np

from mreopt import (
    PushScenarioConfig,
    build_push_dag,
    evaluate_policy,
    metrics,
    solve_bf_one_round,
    solve_greedy,
    solve_mreopt,
    synth_prob_model,
)

lam, m_max = 24, 6
pm = synth_prob_model("fatigue", lam, m_max, seed=0)
print("click at m=0 by slot:", np.round(pm.click[:, 0], 2))
print("close at t=8 by push count:", np.round(pm.close[8], 3))

model = build_push_dag(PushScenarioConfig(lam, m_max, pm))
print(f"\n{model.n_states} states")


def send_slots(policy):
    # follow the policy along the surviving path
    s, slots = model.init, []
    while s not in (model.survive, model.loss):
        st = model.states[s]
        act = st.actions[policy[s]]
        if act.label == "send":
            slots.append(st.label)
        s = act.transitions[-1].target
    return slots


for name, pol in [
    ("greedy", solve_greedy(model)),
    ("one-round", solve_bf_one_round(model)[1]),
    ("bisection", solve_mreopt(model).policy),
]:
    rep = metrics(evaluate_policy(model, pol))
    print(f"{name:>10}: LTV={rep.ltv:.3f} LT={rep.lt:.2f} CTR={rep.ctr:.3f}  sends at {send_slots(pol)}")
