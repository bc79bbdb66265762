"""Logging policies: the five mechanisms that generate controls in the data.

Every policy answers one question, :func:`control_probs`: the law of ``a_i``
given ``X_i = x`` and the history ``((X_0, a_0), ..., (X_{i-1}, a_{i-1}))``.
Table-driven policies additionally expose :func:`markov_table`, which the
compiled simulator and the exact path-law enumerator use to skip per-history
work.

Policy JSON looks like ``{"type": "stationary", "table": [[...], ...]}``; see
:func:`policy_from_dict` for all variants.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .model import DimensionMismatch, ModelError, ROW_SUM_TOL, check_stochastic

History = Sequence[tuple[int, int]]
ControlLaw = Callable[[int, int, History], np.ndarray]


class WindowTooLong(ValueError):
    pass


def _table(arr, name: str) -> np.ndarray:
    t = np.array(arr, dtype=np.float64)
    check_stochastic(t, name=name)
    t.setflags(write=False)
    return t


@dataclass(frozen=True, eq=False)
class StationaryRandomized:
    """``a_i ~ table[X_i]`` independently of time and history."""

    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "table", _table(self.table, "policy table"))

    @property
    def d(self) -> int:
        return self.table.shape[0]

    @property
    def k(self) -> int:
        return self.table.shape[1]


@dataclass(frozen=True, eq=False)
class DeterministicSchedule:
    """Controls fixed in advance: ``a_i = controls[i]``, or ``controls[i % p]``
    when ``periodic``. ``window`` is the revisit window the schedule claims."""

    controls: tuple
    k: int
    periodic: bool = True
    window: int | None = None

    def __post_init__(self):
        c = tuple(int(v) for v in self.controls)
        if not c:
            raise ModelError("empty schedule")
        if min(c) < 0 or max(c) >= self.k:
            raise ModelError(f"schedule entries must lie in [0, {self.k})")
        object.__setattr__(self, "controls", c)

    def control_at(self, i: int) -> int:
        if self.periodic:
            return self.controls[i % len(self.controls)]
        if i >= len(self.controls):
            raise IndexError(f"explicit schedule has no control for time {i}")
        return self.controls[i]

    def sequence(self, n: int) -> np.ndarray:
        return np.array([self.control_at(i) for i in range(n)], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class NonStationaryMarkov:
    """``a_i ~ tables[i][X_i]``; past the end of the list the last table repeats,
    or the list cycles when ``periodic``."""

    tables: np.ndarray
    periodic: bool = False

    def __post_init__(self):
        t = np.array(self.tables, dtype=np.float64)
        if t.ndim != 3:
            raise DimensionMismatch(f"tables must be (n, d, k), got {t.shape}")
        for i in range(t.shape[0]):
            check_stochastic(t[i], name=f"table {i}")
        t.setflags(write=False)
        object.__setattr__(self, "tables", t)

    @property
    def d(self) -> int:
        return self.tables.shape[1]

    @property
    def k(self) -> int:
        return self.tables.shape[2]

    def table_at(self, i: int) -> np.ndarray:
        n = self.tables.shape[0]
        return self.tables[i % n if self.periodic else min(i, n - 1)]


@dataclass(frozen=True, eq=False)
class Episodic:
    """Episodes of length ``horizon``. At every multiple of the horizon the pair
    ``(X_i, a_i)`` is redrawn from ``restart`` (a ``(d, k)`` joint law, uniform by
    default) regardless of the past. Inside an episode the control follows
    ``tables[i % horizon][X_i]``, or ``law(i % horizon, x, episode_history)``
    when a callable is supplied."""

    horizon: int
    tables: np.ndarray
    restart: np.ndarray | None = None
    law: ControlLaw | None = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ModelError("horizon must be >= 1")
        t = np.array(self.tables, dtype=np.float64)
        if t.ndim == 2:
            t = np.broadcast_to(t, (self.horizon,) + t.shape).copy()
        if t.shape[0] != self.horizon:
            raise DimensionMismatch(f"need {self.horizon} tables, got {t.shape[0]}")
        for i in range(t.shape[0]):
            check_stochastic(t[i], name=f"episode table {i}")
        t.setflags(write=False)
        object.__setattr__(self, "tables", t)
        d, k = t.shape[1:]
        r = np.full((d, k), 1.0 / (d * k)) if self.restart is None else np.array(self.restart, dtype=np.float64)
        if r.shape != (d, k) or np.any(r < 0) or abs(r.sum() - 1) > ROW_SUM_TOL:
            raise ModelError("restart must be a (d, k) probability table")
        r.setflags(write=False)
        object.__setattr__(self, "restart", r)

    @property
    def d(self) -> int:
        return self.tables.shape[1]

    @property
    def k(self) -> int:
        return self.tables.shape[2]

    def is_restart(self, i: int) -> bool:
        return i > 0 and i % self.horizon == 0


@dataclass(frozen=True, eq=False)
class Greedy:
    """``a_i = D_i`` (uniform) when ``omega_i = 1`` and ``alpha_i`` otherwise, with
    ``omega_i ~ Bernoulli(upsilon)`` i.i.d. The base rule ``alpha_i`` is a
    stationary ``(d, k)`` table or any callable ``(i, x, history) -> probs``."""

    upsilon: float
    base: np.ndarray | ControlLaw
    k: int = field(default=0)

    def __post_init__(self):
        if not 0.0 < self.upsilon <= 1.0:
            raise ModelError("upsilon must lie in (0, 1]")
        if not callable(self.base):
            b = _table(self.base, "greedy base table")
            object.__setattr__(self, "base", b)
            object.__setattr__(self, "k", b.shape[1])
        elif self.k < 1:
            raise ModelError("a callable base rule needs an explicit k")

    def base_probs(self, i: int, x: int, history: History) -> np.ndarray:
        if callable(self.base):
            return np.asarray(self.base(i, x, history), dtype=np.float64)
        return self.base[x]


LoggingPolicy = StationaryRandomized | DeterministicSchedule | NonStationaryMarkov | Episodic | Greedy


def num_controls(policy: LoggingPolicy) -> int:
    return policy.k


def is_restart(policy: LoggingPolicy, i: int) -> bool:
    return isinstance(policy, Episodic) and policy.is_restart(i)


def markov_table(policy: LoggingPolicy, i: int, d: int) -> np.ndarray | None:
    """The ``(d, k)`` control law at time ``i`` if it ignores the history."""
    if isinstance(policy, StationaryRandomized):
        return policy.table
    if isinstance(policy, DeterministicSchedule):
        t = np.zeros((d, policy.k))
        t[:, policy.control_at(i)] = 1.0
        return t
    if isinstance(policy, NonStationaryMarkov):
        return policy.table_at(i)
    if isinstance(policy, Episodic):
        if policy.law is not None:
            return None
        if i == 0 or policy.is_restart(i):
            r = policy.restart
            with np.errstate(invalid="ignore", divide="ignore"):
                cond = r / r.sum(axis=1, keepdims=True)
            return np.where(np.isfinite(cond), cond, 1.0 / policy.k)
        return policy.tables[i % policy.horizon]
    if isinstance(policy, Greedy):
        if callable(policy.base):
            return None
        return policy.upsilon / policy.k + (1.0 - policy.upsilon) * policy.base
    raise TypeError(f"unknown policy {type(policy).__name__}")


def control_probs(policy: LoggingPolicy, i: int, x: int, history: History) -> np.ndarray:
    """Law of ``a_i`` given ``X_i = x`` and the history of pairs before ``i``."""
    if isinstance(policy, Episodic) and policy.law is not None and not policy.is_restart(i) and i > 0:
        start = (i // policy.horizon) * policy.horizon
        return np.asarray(policy.law(i - start, x, tuple(history[start:i])), dtype=np.float64)
    if isinstance(policy, Greedy) and callable(policy.base):
        return policy.upsilon / policy.k + (1.0 - policy.upsilon) * policy.base_probs(i, x, history)
    table = markov_table(policy, i, x + 1)
    return np.asarray(table[x], dtype=np.float64)


def _draw(probs: np.ndarray, u: float) -> int:
    cum = np.cumsum(probs)
    j = int(np.searchsorted(cum, u, side="right"))
    return min(j, len(probs) - 1)


def next_control(policy: LoggingPolicy, i: int, x: int, history: History, rng: np.random.Generator):
    """Draw ``a_i``. For greedy policies returns ``(a_i, omega_i)``."""
    if len(history) != i:
        raise ValueError(f"history has length {len(history)}, expected {i}")
    if isinstance(policy, Greedy):
        omega = int(rng.random() < policy.upsilon)
        if omega:
            return int(rng.integers(policy.k)), 1
        return _draw(policy.base_probs(i, x, history), rng.random()), 0
    return _draw(control_probs(policy, i, x, history), rng.random())


def verify_revisit_window(schedule: Sequence[int], window: int, m: int | None = None, k: int | None = None) -> bool:
    """True iff every block ``a_j, ..., a_{j+window}`` of the schedule visits each
    control at least twice (``sum 1[a_i = l] > 1``)."""
    seq = np.asarray(schedule, dtype=np.int64)
    m = len(seq) if m is None else m
    if window > m or window >= len(seq):
        raise WindowTooLong(f"window {window} does not fit in a schedule of length {min(m, len(seq))}")
    seq = seq[:m]
    k = int(seq.max()) + 1 if k is None else k
    onehot = np.zeros((len(seq) + 1, k), dtype=np.int64)
    onehot[1:][np.arange(len(seq)), seq] = 1
    csum = np.cumsum(onehot, axis=0)
    counts = csum[window + 1:] - csum[: len(seq) - window]
    return bool(np.all(counts > 1))


# ---- serialization ----

def policy_to_dict(policy: LoggingPolicy) -> dict:
    if isinstance(policy, StationaryRandomized):
        return {"type": "stationary", "table": policy.table.tolist()}
    if isinstance(policy, DeterministicSchedule):
        key = "periodic" if policy.periodic else "sequence"
        out = {"type": "schedule", key: list(policy.controls), "k": policy.k}
        if policy.window is not None:
            out["window"] = policy.window
        return out
    if isinstance(policy, NonStationaryMarkov):
        return {"type": "markov", "tables": policy.tables.tolist(), "periodic": policy.periodic}
    if isinstance(policy, Episodic):
        if policy.law is not None:
            raise ValueError("episodic policies with a callable law cannot be serialized")
        return {"type": "episodic", "horizon": policy.horizon, "tables": policy.tables.tolist(),
                "restart": policy.restart.tolist()}
    if isinstance(policy, Greedy):
        if callable(policy.base):
            raise ValueError("greedy policies with a callable base cannot be serialized")
        return {"type": "greedy", "upsilon": policy.upsilon, "base": policy.base.tolist()}
    raise TypeError(type(policy).__name__)


def policy_from_dict(obj: dict) -> LoggingPolicy:
    kind = obj["type"].lower()
    if kind in ("stationary", "stationaryrandomized"):
        return StationaryRandomized(obj["table"])
    if kind in ("schedule", "deterministicschedule"):
        if "periodic" in obj:
            seq, periodic = obj["periodic"], True
        else:
            seq, periodic = obj["sequence"], False
        k = int(obj.get("k", max(seq) + 1))
        return DeterministicSchedule(tuple(seq), k, periodic, obj.get("window"))
    if kind in ("markov", "nonstationarymarkov"):
        return NonStationaryMarkov(obj["tables"], bool(obj.get("periodic", False)))
    if kind == "episodic":
        return Episodic(int(obj["horizon"]), obj["tables"], obj.get("restart"))
    if kind == "greedy":
        return Greedy(float(obj["upsilon"]), obj["base"])
    raise ValueError(f"unknown policy type {obj['type']!r}")


def policy_hash(policy: LoggingPolicy) -> str:
    try:
        blob = json.dumps(policy_to_dict(policy), sort_keys=True)
    except ValueError:
        blob = repr(policy)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
