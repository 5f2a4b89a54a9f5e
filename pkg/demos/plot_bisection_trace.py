"""
Watching the bisection
======================

Each guess ``g`` of the long-run value is scored by one backward DP pass,
giving ``F(g)``. When ``F(g) > g`` the guess was too pessimistic and the
bracket moves right. The fixed point of ``F`` is the optimal LTV.

The second half runs the same search with the comparison flipped, which
walks the bracket down to zero.
"""

import numpy as np

from mreopt import ActionSpec, DagModel, State, Transition, fixed_point_map, solve_mreopt

a = ActionSpec("A", (Transition(1, 0.5, 1.0), Transition(2, 0.5)))
b = ActionSpec("B", (Transition(1, 0.95, 0.4), Transition(2, 0.05)))
model = DagModel((State(0, "init", (a, b)), State(1, "survive"), State(2, "loss")), 0, 2, 1, r_max=1.0)

# F on a coarse grid; the kink near 0.27 is where B overtakes A
for g in np.linspace(0, 10, 11):
    f = fixed_point_map(model, g)
    print(f"g={g:5.1f}  F(g)={f:7.4f}  {'above' if f > g else 'below'}")

res = solve_mreopt(model, epsilon=1e-4)
print(f"\nbracket doubled {res.expansions} times")
for i, step in enumerate(res.bracket_trace):
    print(f"{i:2d}  [{step.left:9.5f}, {step.right:9.5f}]  g={step.g:9.5f}  -> {step.branch}")
print(f"ltv = {res.ltv:.5f}")

bad = solve_mreopt(model, epsilon=1e-4, branch="printed")
print(f"\nflipped comparison ends at {bad.ltv:.5f}")
