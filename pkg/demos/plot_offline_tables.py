"""
Offline comparison tables
=========================

Greedy, one-round DP and the bisection optimizer on fatigue-family push
models across slot pools and daily caps. Each method's policy is scored
exactly on lifetime clicks (LTV), lifetime sends (LT) and their ratio.
"""

from mreopt import build_push_dag, compare
from mreopt.fileio import rows_to_text, sweep_from_dict

sweep = {"lambda": [100, 200, 500], "m": [10, 50], "family": "fatigue"}
configs = sweep_from_dict(sweep)
rows = compare([build_push_dag(cfg) for _, cfg in configs], model_ids=[mid for mid, _ in configs])
groups = {mid: (f"lambda = {cfg.lam}", f"M={cfg.m_max}") for mid, cfg in configs}
print(rows_to_text(rows, groups))
