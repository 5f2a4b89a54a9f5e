"""
Simulated customers
===================

Replays whole customer lifetimes under a fixed policy and compares the
average with the closed form. Each episode has its own random stream, so
splitting the run into shards gives the same totals.
"""

from mreopt import build_push_dag, evaluate_policy, metrics, simulate_online, solve_mreopt
from mreopt.push import PushScenarioConfig, synth_prob_model

model = build_push_dag(PushScenarioConfig(8, 3, synth_prob_model("fatigue", 8, 3, q0=0.4, c0=0.1)))
policy = solve_mreopt(model).policy
exact = metrics(evaluate_policy(model, policy))
print(f"closed form: LTV={exact.ltv:.4f} LT={exact.lt:.4f}")

for mode in ("expected", "click"):
    rep = simulate_online(model, policy, 50_000, seed=11, max_rounds=10_000, mode=mode)
    z = (rep.mean_ltv - exact.ltv) / rep.stderr_ltv
    print(f"{mode:>8}: LTV={rep.mean_ltv:.4f} +- {rep.stderr_ltv:.4f} ({z:+.2f} se)  LT={rep.mean_lt:.4f}")

lo = simulate_online(model, policy, 20_000, seed=11, max_rounds=10_000)
hi = simulate_online(model, policy, 30_000, seed=11, max_rounds=10_000, first_episode=20_000)
full = simulate_online(model, policy, 50_000, seed=11, max_rounds=10_000)
print(f"sharded mean {(2 * lo.mean_ltv + 3 * hi.mean_ltv) / 5:.10f} vs one run {full.mean_ltv:.10f}")
