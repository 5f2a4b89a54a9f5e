import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mreopt.errors import InvalidConfig, InvalidParameters, UnknownFamily
from mreopt.model import Boundedness, check_boundedness, validate_model
from mreopt.push import (
    ProbModel,
    PushScenarioConfig,
    build_push_dag,
    daypart,
    grid_index,
    push_state_count,
    synth_prob_model,
)


def labelled(model):
    return {st.label: st for st in model.states}


def test_small_grid_structure(push21):
    # 5 grid cells + 2 terminals
    assert push21.n_states == 7
    st = labelled(push21)
    send, skip = st["(0,0)"].actions
    assert (send.label, skip.label) == ("send", "skip")
    loss_edge, surv_edge = send.transitions
    assert loss_edge.target == push21.loss
    assert loss_edge.probability == pytest.approx(0.2)
    assert loss_edge.reward == 0.0
    assert surv_edge.target == st["(1,1)"].id
    assert surv_edge.probability == pytest.approx(0.8)
    assert surv_edge.reward == pytest.approx(0.5)
    assert skip.transitions[0].target == st["(1,0)"].id
    # a full cell can only skip
    assert [a.label for a in st["(1,1)"].actions] == ["skip"]
    for cell in ("(2,0)", "(2,1)"):
        (end,) = st[cell].actions
        assert end.label == "end-day"
        assert end.transitions[0].target == push21.survive


def test_certain_close_leaves_only_skip_path():
    cfg = PushScenarioConfig(1, 1, synth_prob_model("constant", 1, 1, q0=0.0, c0=1.0))
    model = build_push_dag(cfg)
    assert validate_model(model).ok
    st = labelled(model)
    send, skip = st["(0,0)"].actions
    assert [(t.target, t.probability) for t in send.transitions] == [(model.loss, 1.0)]
    assert skip.transitions[0].target == st["(1,0)"].id
    assert check_boundedness(model) is Boundedness.ZERO_VALUE_IMMORTAL


@pytest.mark.parametrize("lam,m", [(1, 1), (2, 1), (3, 3), (7, 2), (20, 5)])
def test_state_count_closed_form(lam, m):
    cfg = PushScenarioConfig(lam, m, synth_prob_model("constant", lam, m))
    model = build_push_dag(cfg)
    assert model.n_states == push_state_count(lam, m)
    assert model.n_states == sum(min(t, m) + 1 for t in range(lam + 1)) + 2


def paths_reach_survive_in_lam_plus_one(model, lam):
    # every path: survive after exactly lam+1 steps, or loss earlier
    frontier = [(model.init, 0)]
    while frontier:
        s, d = frontier.pop()
        if s == model.survive:
            assert d == lam + 1
            continue
        if s == model.loss:
            assert d <= lam
            continue
        for a in model.states[s].actions:
            for t in a.transitions:
                frontier.append((t.target, d + 1))


@settings(max_examples=40, deadline=None)
@given(
    lam=st.integers(1, 6),
    m=st.integers(1, 6),
    family=st.sampled_from(["constant", "fatigue", "random-table"]),
    seed=st.integers(0, 2**32),
)
def test_built_models_satisfy_invariants(lam, m, family, seed):
    m = min(m, lam)
    pm = synth_prob_model(family, lam, m, seed=seed)
    model = build_push_dag(PushScenarioConfig(lam, m, pm))
    assert validate_model(model).ok
    assert check_boundedness(model) in (Boundedness.BOUNDED, Boundedness.ZERO_VALUE_IMMORTAL)
    idx = grid_index(lam, m)
    for (t, mm), sid in idx.items():
        if t == lam or mm == m:
            continue
        send = model.states[sid].actions[0]
        assert send.label == "send"
        survive_edges = [tr for tr in send.transitions if tr.target != model.loss]
        expected = pm.click[t, mm] * (1 - pm.close[t, mm])
        realized = sum(tr.probability * tr.reward for tr in survive_edges)
        assert abs(realized - expected) <= 1e-12
    paths_reach_survive_in_lam_plus_one(model, lam)


def test_constant_family_tables():
    pm = synth_prob_model("constant", 2, 1, seed=0, q0=0.5, c0=0.2)
    assert np.all(pm.click == 0.5)
    assert np.all(pm.close == 0.2)
    assert pm.shape == (2, 1)


def test_random_table_is_deterministic():
    a = synth_prob_model("random-table", 10, 4, seed=42)
    b = synth_prob_model("random-table", 10, 4, seed=42)
    c = synth_prob_model("random-table", 10, 4, seed=43)
    assert np.array_equal(a.click, b.click) and np.array_equal(a.close, b.close)
    assert not np.array_equal(a.click, c.click)
    assert np.all(a.close >= 0.05) and np.all(a.click < 0.5)


def test_fatigue_ratios():
    pm = synth_prob_model("fatigue", 24, 3, q0=0.5, c0=0.1, beta=0.8, gamma=1.5)
    t = 7
    assert pm.click[t, 1] / pm.click[t, 0] == pytest.approx(0.8, rel=1e-15)
    assert pm.close[t, 1] / pm.close[t, 0] == pytest.approx(1.5, rel=1e-15)


def test_fatigue_close_clamps_at_one():
    pm = synth_prob_model("fatigue", 10, 10, c0=0.5, gamma=2.0)
    assert pm.close.max() == 1.0
    assert np.all(pm.close > 0)


def test_daypart_is_bimodal_with_unit_peak():
    prof = daypart(100)
    assert prof.max() == pytest.approx(1.0)
    assert np.argmax(prof[:50]) == 30
    assert 70 <= 50 + np.argmax(prof[50:]) <= 76
    assert prof[50] < prof[30] and prof[50] < prof[75]


@pytest.mark.parametrize(
    "family,params,exc",
    [
        ("nope", {}, UnknownFamily),
        ("random-table", {"c_lo": 0.0}, InvalidParameters),
        ("constant", {"c0": 0.0}, InvalidParameters),
        ("fatigue", {"beta": 1.2}, InvalidParameters),
        ("fatigue", {"gamma": 0.9}, InvalidParameters),
        ("constant", {"zeta": 1}, InvalidParameters),
    ],
)
def test_bad_families(family, params, exc):
    with pytest.raises(exc):
        synth_prob_model(family, 4, 2, **params)


def test_invalid_config():
    pm = synth_prob_model("constant", 2, 2)
    with pytest.raises(InvalidConfig):
        PushScenarioConfig(2, 3, pm)
    with pytest.raises(InvalidConfig):
        PushScenarioConfig(3, 2, pm)
    with pytest.raises(InvalidParameters):
        ProbModel(np.zeros((2, 2)), np.zeros((2, 2)))
