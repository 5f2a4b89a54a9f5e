"""Push-notification send-time scenario.

Within one day there are ``lam`` candidate slots and at most ``m_max``
pushes. State ``(t, m)`` means ``t`` slots have passed and ``m`` pushes went
out. Click and close probabilities come from a :class:`ProbModel`; the
synthetic families here stand in for learned predictors.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, InvalidParameters, UnknownFamily
from .model import ActionSpec, DagModel, State, Transition

GEN_STREAM = zlib.crc32(b"generation")
FAMILIES = ("constant", "fatigue", "random-table")

# daypart profile: two bumps at 30% and 75% of the day, width 12%
_PEAKS = (0.30, 0.75)
_WIDTH = 0.12


@dataclass(frozen=True)
class ProbModel:
    """Dense ``lam x m_max`` click and close tables."""

    click: np.ndarray
    close: np.ndarray
    family: str = "tables"
    params: tuple = ()

    def __post_init__(self):
        click = np.asarray(self.click, dtype=float)
        close = np.asarray(self.close, dtype=float)
        if click.shape != close.shape or click.ndim != 2:
            raise InvalidParameters(f"click {click.shape} and close {close.shape} tables must share a 2-d shape")
        if np.any(click < 0) or np.any(click >= 1):
            raise InvalidParameters("click probabilities must lie in [0, 1)")
        if np.any(close <= 0) or np.any(close > 1):
            raise InvalidParameters("close probabilities must lie in (0, 1]")
        click.setflags(write=False)
        close.setflags(write=False)
        object.__setattr__(self, "click", click)
        object.__setattr__(self, "close", close)

    @property
    def shape(self) -> tuple[int, int]:
        return self.click.shape


@dataclass(frozen=True)
class PushScenarioConfig:
    lam: int
    m_max: int
    prob_model: ProbModel

    def __post_init__(self):
        if not (isinstance(self.lam, (int, np.integer)) and isinstance(self.m_max, (int, np.integer))):
            raise InvalidConfig("lambda and m_max must be integers")
        if not 1 <= self.m_max <= self.lam:
            raise InvalidConfig(f"need 1 <= M <= lambda, got M={self.m_max}, lambda={self.lam}")
        if self.prob_model.shape != (self.lam, self.m_max):
            raise InvalidConfig(
                f"probability tables have shape {self.prob_model.shape}, expected ({self.lam}, {self.m_max})"
            )


def daypart(lam: int) -> np.ndarray:
    x = np.arange(lam) / lam
    prof = sum(np.exp(-0.5 * ((x - c) / _WIDTH) ** 2) for c in _PEAKS)
    return prof / prof.max()


def synth_prob_model(family: str, lam: int, m_max: int, seed: int = 0, **params) -> ProbModel:
    """Build a deterministic synthetic click/close model.

    ``constant``: ``q0``, ``c0``. ``fatigue``: ``q0``, ``c0``, ``beta`` in
    (0, 1], ``gamma`` >= 1, so each extra push scales click by ``beta`` and
    close by ``gamma`` (capped at 1). ``random-table``: ``q_hi``, ``c_lo``,
    ``c_hi`` with independent uniform entries drawn from ``seed``.
    """
    if lam < 1 or m_max < 1:
        raise InvalidParameters("lambda and m_max must be positive")
    if family == "constant":
        q0, c0 = params.get("q0", 0.5), params.get("c0", 0.2)
        _check_open(q0, c0)
        click = np.full((lam, m_max), float(q0))
        close = np.full((lam, m_max), float(c0))
        used = (("q0", q0), ("c0", c0))
    elif family == "fatigue":
        q0 = params.get("q0", 0.5)
        c0 = params.get("c0", 0.15)
        beta = params.get("beta", 0.95)
        gamma = params.get("gamma", 1.05)
        _check_open(q0, c0)
        if not 0 < beta <= 1:
            raise InvalidParameters(f"beta={beta} must lie in (0, 1]")
        if gamma < 1:
            raise InvalidParameters(f"gamma={gamma} must be >= 1")
        m = np.arange(m_max)
        click = q0 * np.outer(daypart(lam), beta**m)
        close = np.minimum(1.0, np.broadcast_to(c0 * gamma**m, (lam, m_max)))
        used = (("q0", q0), ("c0", c0), ("beta", beta), ("gamma", gamma))
    elif family == "random-table":
        q_hi = params.get("q_hi", 0.5)
        c_lo = params.get("c_lo", 0.05)
        c_hi = params.get("c_hi", 0.5)
        if not 0 < q_hi <= 1:
            raise InvalidParameters(f"q_hi={q_hi} must lie in (0, 1]")
        if not 0 < c_lo <= c_hi <= 1:
            raise InvalidParameters(f"need 0 < c_lo <= c_hi <= 1, got c_lo={c_lo}, c_hi={c_hi}")
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(GEN_STREAM,)))
        click = rng.uniform(0.0, q_hi, size=(lam, m_max))
        close = rng.uniform(c_lo, c_hi, size=(lam, m_max))
        used = (("q_hi", q_hi), ("c_lo", c_lo), ("c_hi", c_hi))
    else:
        raise UnknownFamily(f"unknown family {family!r}; expected one of {FAMILIES}")
    unknown = set(params) - {k for k, _ in used}
    if unknown:
        raise InvalidParameters(f"unexpected parameters for {family}: {sorted(unknown)}")
    return ProbModel(click, close, family, used)


def _check_open(q0, c0):
    if not 0 <= q0 < 1:
        raise InvalidParameters(f"q0={q0} must lie in [0, 1)")
    if not 0 < c0 <= 1:
        raise InvalidParameters(f"c0={c0} must lie in (0, 1]")


def grid_index(lam: int, m_max: int) -> dict[tuple[int, int], int]:
    """State id of every ``(t, m)`` cell, row-major in ``t``."""
    idx = {}
    for t in range(lam + 1):
        for m in range(min(t, m_max) + 1):
            idx[(t, m)] = len(idx)
    return idx


def build_push_dag(config: PushScenarioConfig) -> DagModel:
    """Lay out the ``(t, m)`` grid as a :class:`DagModel`.

    ``send`` loses the customer with probability ``close(t, m)``; otherwise
    it moves to ``(t+1, m+1)`` earning ``click(t, m)``. A customer who closes
    the channel does not click, so the expected click per send is
    ``click * (1 - close)``. When ``close == 1`` the surviving branch has
    zero mass and is dropped, along with any cell only it could reach.
    ``skip`` moves to ``(t+1, m)`` deterministically. The last column ends
    the day into ``survive``.
    """
    lam, m_max = config.lam, config.m_max
    click, close = config.prob_model.click, config.prob_model.close
    # cells behind a certain-close send cannot be reached and are left out
    idx = {}
    for cell in grid_index(lam, m_max):
        t, m = cell
        if cell == (0, 0) or (t - 1, m) in idx or ((t - 1, m - 1) in idx and close[t - 1, m - 1] < 1.0):
            idx[cell] = len(idx)
    survive, loss = len(idx), len(idx) + 1

    states = []
    for (t, m), sid in idx.items():
        label = f"({t},{m})"
        if t == lam:
            states.append(State(sid, label, (ActionSpec("end-day", (Transition(survive, 1.0),)),)))
            continue
        actions = []
        if m < m_max:
            c, q = float(close[t, m]), float(click[t, m])
            trans = [Transition(loss, c)]
            if c < 1.0:
                trans.append(Transition(idx[(t + 1, m + 1)], 1.0 - c, q))
            actions.append(ActionSpec("send", tuple(trans)))
        actions.append(ActionSpec("skip", (Transition(idx[(t + 1, m)], 1.0),)))
        states.append(State(sid, label, tuple(actions)))
    states.append(State(survive, "survive"))
    states.append(State(loss, "loss"))
    return DagModel(tuple(states), init=idx[(0, 0)], loss=loss, survive=survive, r_max=1.0)


def push_state_count(lam: int, m_max: int) -> int:
    """State count of the full grid plus terminals (all close < 1)."""
    return sum(min(t, m_max) + 1 for t in range(lam + 1)) + 2
