"""Finite controlled Markov chains: the model container, validation and
stationary distributions.

All indices are 0-based. A model with ``d`` states and ``k`` controls holds a
``(k, d, d)`` float64 array whose ``l``-th slice is the row-stochastic matrix
used when control ``l`` is applied.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ROW_SUM_TOL = 1e-12
POWER_ITER_CAP = 10**6
POWER_ITER_TOL = 1e-12


class ModelError(ValueError):
    """Base class for invalid model input."""


class RowSumError(ModelError):
    pass


class NegativeEntryError(ModelError):
    pass


class DimensionMismatch(ModelError):
    pass


class NotErgodic(RuntimeError):
    """Power iteration did not converge within the iteration cap."""


@dataclass(frozen=True)
class CmcModel:
    d: int
    k: int
    matrices: np.ndarray

    def __post_init__(self):
        mats = np.array(self.matrices, dtype=np.float64)
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)

    def __getitem__(self, l: int) -> np.ndarray:
        return self.matrices[l]

    def to_dict(self) -> dict:
        return {"d": self.d, "k": self.k, "matrices": self.matrices.tolist()}

    @classmethod
    def from_dict(cls, obj: dict) -> "CmcModel":
        return validate_model(cls(int(obj["d"]), int(obj["k"]), np.asarray(obj["matrices"], dtype=np.float64)))

    @classmethod
    def from_matrices(cls, matrices) -> "CmcModel":
        mats = np.asarray(matrices, dtype=np.float64)
        if mats.ndim == 2:
            mats = mats[None]
        if mats.ndim != 3:
            raise DimensionMismatch(f"expected a (k, d, d) array, got shape {mats.shape}")
        return validate_model(cls(mats.shape[1], mats.shape[0], mats))


def check_distribution(weights, size: int | None = None, name: str = "distribution") -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or (size is not None and w.shape[0] != size):
        raise DimensionMismatch(f"{name} must be a vector of length {size}, got shape {w.shape}")
    if np.any(w < 0):
        raise NegativeEntryError(f"{name} has negative entries")
    if abs(w.sum() - 1.0) > ROW_SUM_TOL:
        raise RowSumError(f"{name} sums to {w.sum()!r}")
    return w


def check_stochastic(mat, name: str = "matrix") -> np.ndarray:
    m = np.asarray(mat, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-d, got shape {m.shape}")
    if np.any(m < 0):
        raise NegativeEntryError(f"{name} has negative entries")
    if np.any(m > 1):
        raise ModelError(f"{name} has entries above 1")
    err = np.abs(m.sum(axis=1) - 1.0)
    if np.any(err > ROW_SUM_TOL):
        row = int(np.argmax(err))
        raise RowSumError(f"{name} row {row} sums to {m[row].sum()!r}")
    return m


def validate_model(m: CmcModel) -> CmcModel:
    """Return ``m`` unchanged if every matrix is a ``d x d`` stochastic matrix."""
    mats = m.matrices
    if mats.ndim != 3 or mats.shape != (m.k, m.d, m.d):
        raise DimensionMismatch(f"matrices have shape {mats.shape}, expected {(m.k, m.d, m.d)}")
    if m.d < 1 or m.k < 1:
        raise DimensionMismatch("d and k must be at least 1")
    for l in range(m.k):
        check_stochastic(mats[l], name=f"M^({l})")
    return m


def stationary_distribution(M, tol: float = POWER_ITER_TOL, max_iter: int = POWER_ITER_CAP) -> np.ndarray:
    """Stationary law of an ergodic chain by power iteration from uniform.

    Raises NotErgodic when the L1 change never drops below ``tol``; periodic
    chains oscillate and end up here.
    """
    M = check_stochastic(M)
    n = M.shape[0]
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = pi @ M
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() <= tol:
            return nxt
        pi = nxt
    raise NotErgodic(f"power iteration did not converge in {max_iter} iterations")


def paired_chain(model: CmcModel, policy_table) -> np.ndarray:
    """Transition matrix of the pair process under a stationary policy.

    Pairs are flattened as ``s * k + l``. Entry ``((s, l), (t, l'))`` equals
    ``M^(l)[s, t] * P[t, l']``.
    """
    P = np.asarray(policy_table, dtype=np.float64)
    if P.shape != (model.d, model.k):
        raise DimensionMismatch(f"policy table must be {(model.d, model.k)}, got {P.shape}")
    check_stochastic(P, name="policy table")
    # out[s, l, t, l'] = M[l, s, t] * P[t, l']
    out = np.einsum("lst,tm->sltm", model.matrices, P)
    return out.reshape(model.d * model.k, model.d * model.k)


def pair_index(s: int, l: int, k: int) -> int:
    return s * k + l


def load_model(path) -> CmcModel:
    return CmcModel.from_dict(json.loads(Path(path).read_text()))


def save_model(model: CmcModel, path, extra: dict | None = None) -> None:
    obj = model.to_dict()
    if extra:
        obj.update(extra)
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")
