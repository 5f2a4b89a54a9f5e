import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mreopt.errors import InvalidPolicy, ModeMismatch, TooManyPolicies, UnboundedLtv
from mreopt.evaluation import (
    RoundStats,
    compare,
    enumerate_oracle,
    evaluate_policy,
    metrics,
    simulate_online,
)
from mreopt.instances import random_instance
from mreopt.model import ActionSpec, Boundedness, DagModel, State, Transition, check_boundedness
from mreopt.push import PushScenarioConfig, build_push_dag, synth_prob_model
from mreopt.solvers import solve_mreopt

from .conftest import INIT, push_model
from .oracles import all_policies, ltv_linear

A, B = 0, 1


def by_labels(model, **choices):
    """Policy from {cell label: action label}; unspecified cells take their last action."""
    pol = {}
    for s in model.decision_states:
        st_ = model.states[s]
        names = [a.label for a in st_.actions]
        pol[s] = names.index(choices.get(st_.label, names[-1]))
    return pol


def test_evaluate_t2(t2):
    s = evaluate_policy(t2, {INIT: B})
    assert (s.p, s.r, s.l) == pytest.approx((0.95, 0.38, 1.0), abs=1e-15)
    s = evaluate_policy(t2, {INIT: A})
    assert (s.p, s.r, s.l) == pytest.approx((0.5, 0.5, 1.0), abs=1e-15)


def test_evaluate_push_skip_everything(push21):
    s = evaluate_policy(push21, by_labels(push21))
    assert s == RoundStats(1.0, 0.0, 0.0)


def test_evaluate_push_send_once(push21):
    s = evaluate_policy(push21, by_labels(push21, **{"(0,0)": "send"}))
    assert (s.p, s.r, s.l) == pytest.approx((0.8, 0.4, 1.0), abs=1e-15)


def test_evaluate_rejects_bad_policy(t2):
    with pytest.raises(InvalidPolicy):
        evaluate_policy(t2, {INIT: 2})
    with pytest.raises(InvalidPolicy):
        evaluate_policy(t2, {})


def partial_sums(p, x, terms=10_000):
    return sum(x * p**k for k in range(terms))


@pytest.mark.parametrize(
    "stats,expected",
    [((0.95, 0.38, 1.0), (7.6, 20.0, 0.38)), ((0.5, 0.5, 1.0), (1.0, 2.0, 0.5))],
)
def test_metrics_closed_forms(stats, expected):
    rep = metrics(RoundStats(*stats))
    assert (rep.ltv, rep.lt, rep.ctr) == pytest.approx(expected, rel=1e-12)
    p, r, l = stats
    assert rep.ltv == pytest.approx(partial_sums(p, r), rel=1e-12)
    assert rep.lt == pytest.approx(partial_sums(p, l), rel=1e-12)
    assert not rep.immortal


def test_metrics_immortal():
    rep = metrics(RoundStats(1.0, 0.0, 0.0))
    assert rep.ltv == 0.0 and rep.ctr == 0.0
    assert math.isinf(rep.lt) and rep.immortal


def test_metrics_unbounded():
    with pytest.raises(UnboundedLtv):
        metrics(RoundStats(1.0, 0.2, 1.0))


@settings(max_examples=500, deadline=None)
@given(
    p=st.floats(0.0, 0.999999),
    l=st.floats(1e-6, 100.0),
    frac=st.floats(0.0, 1.0),
)
def test_metrics_identity(p, l, frac):
    rep = metrics(RoundStats(p, frac * l, l))
    assert math.isclose(rep.ctr * rep.lt, rep.ltv, rel_tol=1e-9, abs_tol=1e-9)


def test_oracle_t2(t2):
    best, pol, table = enumerate_oracle(t2)
    assert best == pytest.approx(7.6, abs=1e-12)
    assert pol == {INIT: B}
    assert len(table) == 2


def test_oracle_push(push21):
    best, pol, table = enumerate_oracle(push21)
    assert best == pytest.approx(2.0, abs=1e-12)
    distinct = sorted({round(rep.ltv, 12) for _, rep in table})
    assert distinct == [0.0, 2.0]
    # send@0 wins the lexicographic tie
    assert push21.states[push21.init].actions[pol[push21.init]].label == "send"


def test_oracle_single_action_model():
    states = (
        State(0, "init", (ActionSpec("go", (Transition(3, 0.9, 0.2), Transition(2, 0.1))),)),
        State(1, "survive"),
        State(2, "loss"),
        State(3, "mid", (ActionSpec("go", (Transition(1, 0.5, 0.1), Transition(2, 0.5))),)),
    )
    model = DagModel(states, 0, 2, 1)
    best, pol, table = enumerate_oracle(model)
    assert len(table) == 1
    assert table[0][1] == metrics(evaluate_policy(model, pol))


def test_oracle_cap(t2):
    with pytest.raises(TooManyPolicies):
        enumerate_oracle(t2, cap=1)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_oracle_matches_linear_solve(seed):
    rng = np.random.default_rng(seed)
    model = random_instance(rng, int(rng.integers(1, 6)))
    _, _, table = enumerate_oracle(model)
    for pol, rep in table:
        assert rep.ltv == pytest.approx(ltv_linear(model, pol), rel=1e-9, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_boundedness_agrees_with_enumeration(seed):
    rng = np.random.default_rng(seed)
    model = random_instance(rng, int(rng.integers(1, 7)), loss_free_frac=0.5, zero_reward_frac=0.6)
    immortal_paying = False
    for pol in all_policies(model):
        s = evaluate_policy(model, pol)
        if s.p == 1.0 and s.r > 0:
            immortal_paying = True
    assert (check_boundedness(model) is Boundedness.UNBOUNDED_LTV) == immortal_paying


def test_simulate_zero_reward_straight_to_loss():
    states = (
        State(0, "init", (ActionSpec("die", (Transition(2, 1.0),)),)),
        State(1, "survive"),
        State(2, "loss"),
    )
    rep = simulate_online(DagModel(states, 0, 2, 1), {0: 0}, 500, seed=3, max_rounds=10)
    assert rep.mean_ltv == 0.0 and rep.stderr_ltv == 0.0
    assert rep.truncated_fraction == 0.0


def test_simulate_is_deterministic(t2):
    a = simulate_online(t2, {INIT: B}, 2000, seed=9, max_rounds=1000)
    b = simulate_online(t2, {INIT: B}, 2000, seed=9, max_rounds=1000)
    assert a == b
    c = simulate_online(t2, {INIT: B}, 2000, seed=10, max_rounds=1000)
    assert c != a


def test_simulate_shards_reproduce_full_run(t2):
    full = simulate_online(t2, {INIT: B}, 600, seed=4, max_rounds=1000)
    lo = simulate_online(t2, {INIT: B}, 250, seed=4, max_rounds=1000)
    hi = simulate_online(t2, {INIT: B}, 350, seed=4, max_rounds=1000, first_episode=250)
    total = 250 * lo.mean_ltv + 350 * hi.mean_ltv
    assert total == pytest.approx(600 * full.mean_ltv, rel=1e-12)
    assert 250 * lo.mean_lt + 350 * hi.mean_lt == pytest.approx(600 * full.mean_lt, rel=1e-12)


def test_simulate_truncation_flag():
    model = push_model(2, 1, 0.0, 0.2)
    skip_all = {s: len(model.states[s].actions) - 1 for s in model.decision_states}
    rep = simulate_online(model, skip_all, 50, seed=1, max_rounds=5)
    assert rep.truncated_fraction == 1.0
    assert rep.mean_ltv == 0.0 and rep.mean_lt == 0.0


def test_simulate_click_mode_push():
    model = push_model(4, 2, 0.3, 0.1)
    pol = solve_mreopt(model).policy
    exact = metrics(evaluate_policy(model, pol))
    rep = simulate_online(model, pol, 20000, seed=2, max_rounds=10_000, mode="click")
    assert abs(rep.mean_ltv - exact.ltv) <= 4 * rep.stderr_ltv
    assert abs(rep.mean_lt - exact.lt) <= 4 * rep.stderr_lt


def test_simulate_click_mode_needs_unit_rewards():
    states = (
        State(0, "init", (ActionSpec("big", (Transition(1, 0.5, 3.0), Transition(2, 0.5))),)),
        State(1, "survive"),
        State(2, "loss"),
    )
    with pytest.raises(ModeMismatch):
        simulate_online(DagModel(states, 0, 2, 1, r_max=3.0), {0: 0}, 10, seed=0, max_rounds=5, mode="click")


def test_compare_t2(t2):
    rows = compare([t2], 1e-6, ["T2"])
    got = {r.method: (r.ltv, r.lt, r.ctr) for r in rows}
    assert got["Greedy"] == pytest.approx((1.0, 2.0, 0.5))
    assert got["BF"] == pytest.approx((1.0, 2.0, 0.5))
    assert got["MREOpt"] == pytest.approx((7.6, 20.0, 0.38))
    assert [r.method for r in rows] == ["Greedy", "BF", "MREOpt"]


def test_compare_empty():
    assert compare([]) == []


def test_compare_push_fatigue_table():
    cfg = PushScenarioConfig(100, 10, synth_prob_model("fatigue", 100, 10, seed=7))
    rows = compare([build_push_dag(cfg)])
    assert len(rows) == 3
    assert max(rows, key=lambda r: r.ltv).method == "MREOpt"
    for r in rows:
        assert r.ctr * r.lt == pytest.approx(r.ltv, rel=1e-9, abs=1e-9)
