"""Lower-bound instance families and the touring-time experiment.

Two families are built here. The sigma family is a single chain on ``d + 1``
states whose last row carries paired ``+-16 sigma_i eps / d`` perturbations.
The block family has ``k`` controls, each matrix made of the blocks
``C, R_xi / J, L`` with the first third of the states acting as a rarely
visited hub.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import policies as pol
from .bounds import InvalidParameter, proportion_ci
from .model import CmcModel, validate_model
from .simulate import Trajectory, simulate_batch

NEVER = -1


# ---- sigma family ----

def _check_sigma(d: int, p_star: float, eps: float, sigma) -> np.ndarray:
    if d < 2 or d % 2:
        raise InvalidParameter(f"d must be an even integer >= 2, got {d}")
    if not 0 < p_star < 1 / (d + 1):
        raise InvalidParameter(f"p_star must lie in (0, 1/(d+1)), got {p_star}")
    if not 0 <= eps < 1 / 32:
        raise InvalidParameter(f"eps must lie in [0, 1/32), got {eps}")
    s = np.asarray(sigma, dtype=np.int64).ravel()
    if s.shape != (d // 2,) or not np.all(np.abs(s) == 1):
        raise InvalidParameter(f"sigma must be a vector in {{-1, +1}}^{d // 2}")
    return s


def sigma_last_row(d: int, p_star: float, eps: float, sigma) -> np.ndarray:
    s = _check_sigma(d, p_star, eps, sigma)
    signs = np.repeat(s, 2) * np.tile([1, -1], d // 2)
    return np.append((1 - p_star + 16 * signs * eps) / d, p_star)


def build_sigma_instance(d: int, p_star: float, eps: float, sigma) -> CmcModel:
    """``(d + 1)``-state chain with ``k = 1``; rows ``0..d-1`` are
    ``((1 - p_star)/d, ..., p_star)`` and row ``d`` is the perturbed one."""
    last = sigma_last_row(d, p_star, eps, sigma)
    body = np.append(np.full(d, (1 - p_star) / d), p_star)
    M = np.vstack([np.tile(body, (d, 1)), last])
    return validate_model(CmcModel.from_matrices(M))


def sigma_stationary_closed_form(d: int, p_star: float, eps: float, sigma) -> np.ndarray:
    last = sigma_last_row(d, p_star, eps, sigma)
    return np.append(((1 - p_star) ** 2 + last[:d] * d * p_star) / d, p_star)


# ---- block family ----

@dataclass(frozen=True)
class BlockInstance:
    model: CmcModel
    policy: pol.StationaryRandomized
    iota: float
    eps: float
    xi: np.ndarray

    @property
    def d(self) -> int:
        return self.model.d

    @property
    def k(self) -> int:
        return self.model.k

    def stationary_pairs(self) -> np.ndarray:
        """``(d, k)`` stationary law of ``(X_i, a_i)``."""
        pis = np.stack([block_stationary_closed_form(self.iota, self.eps, x) for x in self.xi], axis=1)
        return pis / self.k


def _check_block(d: int, iota: float, eps: float, xi) -> np.ndarray:
    if d < 3 or d % 3:
        raise InvalidParameter(f"d must be a positive multiple of 3, got {d}")
    if not 0 < iota < 31 / 64:
        raise InvalidParameter(f"iota must lie in (0, 31/64), got {iota}")
    if not 0 <= eps < 1 / 32:
        raise InvalidParameter(f"eps must lie in [0, 1/32), got {eps}")
    x = np.atleast_2d(np.asarray(xi, dtype=np.int64))
    if x.shape[1] != d // 3 or not np.isin(x, (0, 1)).all():
        raise InvalidParameter(f"each xi must be a 0/1 vector of length {d // 3}")
    return x


def block_matrix(d: int, iota: float, eps: float, xi) -> np.ndarray:
    """One block matrix ``[[C, R_xi], [J, L]]``.

    At ``d = 3`` the ``R`` block has no off-pair entries and the paired
    entries are ``(1 +- xi eps - iota) / 2`` so that rows still sum to one.
    """
    x = _check_block(d, iota, eps, xi)[0]
    h = d // 3
    M = np.zeros((d, d))
    M[:, :h] = 3 * iota / d
    M[h:, h:] = np.diag(np.full(d - h, 1 - iota))
    drop = iota if d == 3 else 2 * iota
    if d > 3:
        M[:h, h:] = 3 * iota / (2 * (d - 3))
    for r in range(h):
        M[r, h + 2 * r] = (1 + x[r] * eps - drop) / 2
        M[r, h + 2 * r + 1] = (1 - x[r] * eps - drop) / 2
    return M


def block_stationary_closed_form(iota: float, eps: float, xi) -> np.ndarray:
    x = np.asarray(xi, dtype=np.float64).ravel()
    d = 3 * x.size
    second = np.empty(2 * x.size)
    second[0::2] = 3 * (1 + x * eps - iota) / (2 * d)
    second[1::2] = 3 * (1 - x * eps - iota) / (2 * d)
    return np.concatenate([np.full(x.size, 3 * iota / d), second])


def build_block_instance(d: int, k: int, iota: float = 0.3, eps: float = 0.01, xi=None) -> BlockInstance:
    """Block family with ``k`` controls drawn uniformly at every step.

    ``xi`` has shape ``(k, d/3)``; the default sets every entry to one.
    """
    if k < 1:
        raise InvalidParameter("k must be positive")
    xi = np.ones((k, d // 3), dtype=np.int64) if xi is None else np.asarray(xi, dtype=np.int64)
    xi = _check_block(d, iota, eps, xi)
    if xi.shape[0] != k:
        raise InvalidParameter(f"xi needs one row per control, got {xi.shape[0]} for k={k}")
    mats = np.stack([block_matrix(d, iota, eps, row) for row in xi])
    model = validate_model(CmcModel.from_matrices(mats))
    policy = pol.StationaryRandomized(np.full((d, k), 1.0 / k))
    return BlockInstance(model, policy, iota, eps, xi)


def block_class_constants(d: int, k: int, iota: float) -> dict:
    """Constants attached to the block family: ``T = 2dk/(3 iota)``,
    ``zeta1 = zeta2 = iota``, ``rho_star = 3(1 - iota)/(2dk)``, ``C = 0`` and
    ``C_theta = 1 - iota`` as stated for this family (the geometric sum of the
    ``(1 - iota)^(j-i-1)`` decay would give ``1/iota``)."""
    C, C_theta = 0.0, 1 - iota
    return {"T": 2 * d * k / (3 * iota), "zeta1": iota, "zeta2": iota,
            "rho_star": 3 * (1 - iota) / (2 * d * k), "C": C, "C_theta": C_theta,
            "C_delta": C + C_theta + 1, "class": "block"}


def first_block_pairs(d: int, k: int) -> list[tuple[int, int]]:
    return [(s, l) for l in range(k) for s in range(d // 3)]


# ---- coding set ----

@dataclass(frozen=True)
class CodeSet:
    words: np.ndarray
    min_dist: int
    target: float

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def short(self) -> bool:
        return self.size < self.target


def hamming(u, v) -> int:
    return int(np.sum(np.asarray(u) != np.asarray(v)))


def gilbert_varshamov_set(n: int, min_dist: int | None = None, limit: int = 1 << 20) -> CodeSet:
    """Greedy lexicographic code in ``{-1, +1}^n`` with pairwise Hamming
    distance at least ``min_dist`` (default ``n/8``).

    ``target`` is ``2^(n/8)``; ``short`` flags a set that falls below it.
    """
    if n < 2:
        raise InvalidParameter("code length must be at least 2")
    if min_dist is None:
        min_dist = max(1, math.ceil(n / 8))
    buf = np.empty((64, n), dtype=np.int8)
    size = 0
    bits = np.arange(n - 1, -1, -1)
    for code in range(min(1 << n, limit)):
        # bit j of code set means -1 at position j (most significant first)
        w = np.where((code >> bits) & 1, -1, 1).astype(np.int8)
        if size and (buf[:size] != w).sum(axis=1).min() < min_dist:
            continue
        if size == len(buf):
            buf = np.vstack([buf, np.empty_like(buf)])
        buf[size] = w
        size += 1
    words = buf[:size].copy()
    return CodeSet(words, int(min_dist), 2.0 ** (n / 8))


# ---- touring time ----

@dataclass(frozen=True)
class TouringTime:
    value: int
    targets: tuple

    @property
    def reached(self) -> bool:
        return self.value != NEVER


def _touring_from_codes(codes: np.ndarray, target_codes: np.ndarray) -> np.ndarray:
    """Row-wise touring time on ``(n_rep, m + 1)`` pair codes; ``NEVER`` when a
    target is missing from the whole row."""
    n_rep, length = codes.shape
    first = np.full((n_rep, len(target_codes)), length, dtype=np.int64)
    for j, c in enumerate(target_codes):
        hit = codes == c
        first[:, j] = np.where(hit.any(axis=1), hit.argmax(axis=1), length)
    t = first.max(axis=1)
    return np.where(t >= length, NEVER, t)


def touring_time(traj: Trajectory, d: int | None = None, k: int | None = None) -> TouringTime:
    """Smallest ``n`` with every pair of ``{0..d/3-1} x {0..k-1}`` among
    ``(X_0, a_0), ..., (X_n, a_n)``; ``value == NEVER`` if that never happens."""
    d = traj.d if d is None else d
    k = traj.k if k is None else k
    targets = first_block_pairs(d, k)
    codes = traj.states.astype(np.int64) * k + traj.controls
    tc = np.array([s * k + l for s, l in targets], dtype=np.int64)
    return TouringTime(int(_touring_from_codes(codes[None, :], tc)[0]), tuple(targets))


def touring_times_mc(inst: BlockInstance, m: int, n_rep: int, seed: int = 0) -> np.ndarray:
    """Touring times of ``n_rep`` paths of length ``m + 1`` started from the
    stationary pair law; unreached rows hold ``NEVER``."""
    xs, as_ = simulate_batch(inst.model, inst.policy, inst.stationary_pairs(), m, n_rep, seed)
    tc = np.array([s * inst.k + l for s, l in first_block_pairs(inst.d, inst.k)], dtype=np.int64)
    return _touring_from_codes(xs * inst.k + as_, tc)


def expected_touring_oracle(d: int, k: int, iota: float) -> float:
    """``(dk / 3 iota) * H_{dk/3}``: mean number of indices up to and including
    the touring index, i.e. ``E[T] + 1``."""
    n = d * k // 3
    return d * k / (3 * iota) * sum(1.0 / u for u in range(1, n + 1))


def cover_time_threshold(d: int, k: int, iota: float) -> int:
    return int(math.floor(d * k / (6 * iota) * math.log(d * k / 3)))


def cover_time_experiment(inst: BlockInstance, n: int, replications: int = 10_000, seed: int = 0,
                          level: float = 0.99) -> dict:
    """Empirical ``P(T > n)`` with a Wilson interval."""
    if replications < 1:
        raise InvalidParameter("replications must be positive")
    if n < 0:
        raise InvalidParameter("n must be nonnegative")
    t = touring_times_mc(inst, max(n, 1), replications, seed)
    hits = int(np.sum((t == NEVER) | (t > n)))
    p, lo, hi = proportion_ci(hits, replications, level)
    return {"n": n, "p": p, "ci_low": lo, "ci_high": hi, "replications": replications,
            "bound": 1 / (1 + math.pi ** 2)}
