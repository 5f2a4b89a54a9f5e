import pytest

from mreopt.model import ActionSpec, DagModel, State, Transition
from mreopt.push import PushScenarioConfig, build_push_dag, synth_prob_model

INIT, SURV, LOSS = 0, 1, 2


def two_action_model(b_survive, b_reward):
    """init with A: survive 0.5 / reward 1.0, and B: survive b_survive / reward b_reward."""
    a = ActionSpec("A", (Transition(SURV, 0.5, 1.0), Transition(LOSS, 0.5, 0.0)))
    b = ActionSpec("B", (Transition(SURV, b_survive, b_reward), Transition(LOSS, round(1 - b_survive, 12), 0.0)))
    states = (State(INIT, "init", (a, b)), State(SURV, "survive"), State(LOSS, "loss"))
    return DagModel(states, init=INIT, loss=LOSS, survive=SURV, r_max=1.0)


def push_model(lam, m, q0, c0):
    return build_push_dag(PushScenarioConfig(lam, m, synth_prob_model("constant", lam, m, q0=q0, c0=c0)))


@pytest.fixture
def t1():
    return two_action_model(0.9, 0.1)


@pytest.fixture
def t2():
    return two_action_model(0.95, 0.4)


@pytest.fixture
def push21():
    return push_model(2, 1, 0.5, 0.2)
