"""Visit counts, the empirical transition estimator and its error."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import CmcModel, DimensionMismatch
from .simulate import Trajectory


@dataclass
class CountTable:
    """``visits[s, l]`` counts ``i = 1..m`` with ``(X_i, a_i) = (s, l)``;
    ``transitions[l, s, t]`` counts ``i = 1..m-1`` with ``X_{i+1} = t`` as well.

    Transitions that end at a restart index are not counted, and neither are
    the corresponding visits in ``with_successor``.
    """

    visits: np.ndarray
    transitions: np.ndarray
    with_successor: np.ndarray

    @property
    def d(self) -> int:
        return self.visits.shape[0]

    @property
    def k(self) -> int:
        return self.visits.shape[1]

    def merge(self, other: "CountTable") -> "CountTable":
        return CountTable(self.visits + other.visits, self.transitions + other.transitions,
                          self.with_successor + other.with_successor)


@dataclass
class EstimatedModel:
    matrices: np.ndarray
    undefined_rows: list = field(default_factory=list)

    @property
    def d(self) -> int:
        return self.matrices.shape[1]

    @property
    def k(self) -> int:
        return self.matrices.shape[0]

    def to_model(self) -> CmcModel:
        return CmcModel(self.d, self.k, self.matrices)

    def to_dict(self) -> dict:
        return {"d": self.d, "k": self.k, "matrices": self.matrices.tolist(),
                "undefined_rows": [list(p) for p in self.undefined_rows]}


def count(traj: Trajectory) -> CountTable:
    if traj.m < 1:
        raise ValueError("need a trajectory with at least two pairs")
    d, k = traj.d, traj.k
    x = traj.states.astype(np.int64)
    a = traj.controls.astype(np.int64)
    visits = np.bincount(x[1:] * k + a[1:], minlength=d * k).reshape(d, k)
    # transitions out of i = 1..m-1 into i + 1, skipping successors that were redrawn
    keep = ~traj.breaks()[2:]
    src_x, src_a, dst = x[1:-1][keep], a[1:-1][keep], x[2:][keep]
    trans = np.bincount((src_a * d + src_x) * d + dst, minlength=k * d * d).reshape(k, d, d)
    with_succ = trans.sum(axis=2).T.copy()
    return CountTable(visits, trans, with_succ)


def estimate(counts: CountTable) -> EstimatedModel:
    """``M_hat[l, s, t] = N_{s,t}^(l) / N_s^(l)`` with the denominator restricted
    to visits that have an observed successor. Rows without data are uniform
    and listed in ``undefined_rows``."""
    k, d = counts.transitions.shape[:2]
    denom = counts.transitions.sum(axis=2, keepdims=True).astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        mats = counts.transitions / denom
    empty = denom[..., 0] == 0
    mats[empty] = 1.0 / d
    undefined = [(int(s), int(l)) for l, s in zip(*np.nonzero(empty))]
    return EstimatedModel(mats, sorted(undefined))


def estimate_from(traj: Trajectory) -> EstimatedModel:
    return estimate(count(traj))


def estimation_error(est, truth: CmcModel) -> tuple[float, np.ndarray]:
    """``(sup_l ||M_hat^(l) - M^(l)||_inf, row_l1)`` where ``row_l1[s, l]`` is
    ``sum_t |M_hat^(l)[s, t] - M^(l)[s, t]|``."""
    mats = est.matrices if hasattr(est, "matrices") else np.asarray(est)
    if mats.shape != truth.matrices.shape:
        raise DimensionMismatch(f"estimate has shape {mats.shape}, truth {truth.matrices.shape}")
    row_l1 = np.abs(mats - truth.matrices).sum(axis=2).T
    return float(row_l1.max()), row_l1


def sup_error(traj: Trajectory, truth: CmcModel) -> float:
    return estimation_error(estimate(count(traj)), truth)[0]


def save_estimate(est: EstimatedModel, path, extra: dict | None = None) -> None:
    obj = est.to_dict()
    if extra:
        obj.update(extra)
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")
