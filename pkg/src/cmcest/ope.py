"""Discounted policy evaluation with plug-in transition estimates, and the
greedy-exploration recovery pipeline."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundInputs, theorem1_threshold
from . import policies as pol
from .estimate import EstimatedModel, estimate_from
from .model import CmcModel, DimensionMismatch, ModelError, check_stochastic
from .simulate import Trajectory, make_rng, simulate

RESIDUAL_TOL = 1e-10
RENORM_TOL = 0.05


class SingularSystem(np.linalg.LinAlgError):
    pass


class MissingFlags(ValueError):
    pass


class InvalidUpsilon(ValueError):
    pass


class UndefinedRowsWarning(UserWarning):
    pass


@dataclass(frozen=True)
class OpeProblem:
    """``V = g + alpha M V`` on ``d`` states."""

    M: np.ndarray
    g: np.ndarray
    alpha: float

    def __post_init__(self):
        M = check_stochastic(self.M, "M")
        g = np.asarray(self.g, dtype=np.float64).ravel()
        if M.ndim != 2 or M.shape[0] != M.shape[1] or g.shape != (M.shape[0],):
            raise DimensionMismatch(f"M has shape {M.shape}, g has shape {g.shape}")
        if not 0.0 < self.alpha < 1.0:
            raise ModelError(f"alpha must lie strictly inside (0, 1), got {self.alpha}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "g", g)

    @property
    def d(self) -> int:
        return self.M.shape[0]


def bellman_residual(M: np.ndarray, g: np.ndarray, alpha: float, V: np.ndarray) -> float:
    return float(np.abs(V - alpha * M @ V - g).max()) if len(g) else 0.0


def _solve(M: np.ndarray, g: np.ndarray, alpha: float) -> np.ndarray:
    A = np.eye(len(g)) - alpha * M
    try:
        V = np.linalg.solve(A, g)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    # one step of iterative refinement if the direct solve is loose
    tol = RESIDUAL_TOL * max(1.0, float(np.abs(g).max(initial=0.0)))
    if bellman_residual(M, g, alpha, V) > tol:
        V = V + np.linalg.solve(A, g - A @ V)
    if not np.all(np.isfinite(V)) or bellman_residual(M, g, alpha, V) > tol:
        raise SingularSystem("Bellman residual above tolerance")
    return V


def solve_value(problem: OpeProblem) -> np.ndarray:
    """``(I - alpha M)^{-1} g`` by a dense solve with a residual check."""
    return _solve(problem.M, problem.g, problem.alpha)


def neumann_value(M, g, alpha: float, terms: int = 200) -> np.ndarray:
    """Truncated series ``sum_{t < terms} alpha^t M^t g``; an independent oracle."""
    M = np.asarray(M, dtype=np.float64)
    v = np.asarray(g, dtype=np.float64).copy()
    out = np.zeros_like(v)
    for _ in range(terms):
        out += v
        v = alpha * (M @ v)
    return out


@dataclass
class PlugInResult:
    V_hat: np.ndarray
    residual: float
    undefined_rows: list = field(default_factory=list)


def _matrix_of(est) -> tuple[np.ndarray, list]:
    if isinstance(est, EstimatedModel):
        if est.k != 1:
            raise DimensionMismatch("plug-in evaluation needs a single matrix; compose a policy first")
        return est.matrices[0], list(est.undefined_rows)
    M = np.asarray(est, dtype=np.float64)
    return (M[0] if M.ndim == 3 and M.shape[0] == 1 else M), []


def plug_in_value(est, g, alpha: float) -> PlugInResult:
    """Solve the Bellman equation with the estimate in place of ``M``.

    Rows the estimator could not fill are kept (uniform) and reported through
    ``undefined_rows`` and a warning.
    """
    M, undefined = _matrix_of(est)
    prob = OpeProblem(M, g, alpha)
    if undefined:
        warnings.warn(f"{len(undefined)} estimator rows had no data and were filled uniformly",
                      UndefinedRowsWarning, stacklevel=2)
    V = solve_value(prob)
    return PlugInResult(V, bellman_residual(prob.M, prob.g, alpha, V), undefined)


def matrix_inf_norm(A) -> float:
    """Maximum absolute row sum."""
    return float(np.abs(np.asarray(A)).sum(axis=-1).max())


def perturbation_bound(M, M_hat, g, alpha: float) -> float:
    """``alpha sqrt(d) ||M_hat - M||_inf ||g||_1 / (1 - alpha)^2``."""
    M, M_hat = np.asarray(M, dtype=np.float64), np.asarray(M_hat, dtype=np.float64)
    if M.shape != M_hat.shape:
        raise DimensionMismatch(f"{M.shape} vs {M_hat.shape}")
    g = np.asarray(g, dtype=np.float64)
    d = M.shape[0]
    return alpha * math.sqrt(d) * matrix_inf_norm(M_hat - M) * float(np.abs(g).sum()) / (1 - alpha) ** 2


def compose_policy(model: CmcModel, Pi, g_tilde, alpha: float) -> OpeProblem:
    """Fold a ``(d, k)`` policy matrix into one chain: row ``s`` of the result is
    ``sum_l Pi[s, l] M^(l)[s, :]`` and ``g(s) = sum_l Pi[s, l] g_tilde[s, l]``."""
    Pi = np.asarray(Pi, dtype=np.float64)
    g_tilde = np.asarray(g_tilde, dtype=np.float64)
    if Pi.shape != (model.d, model.k):
        raise DimensionMismatch(f"policy matrix must be ({model.d}, {model.k}), got {Pi.shape}")
    if g_tilde.shape != Pi.shape:
        raise DimensionMismatch(f"state-control cost must be {Pi.shape}, got {g_tilde.shape}")
    check_stochastic(Pi, "policy matrix")
    M = np.einsum("sl,lst->st", Pi, model.matrices)
    return OpeProblem(M, (Pi * g_tilde).sum(axis=1), alpha)


def T_alpha(g, d: int, alpha: float, T: float) -> float:
    """``||g||_1^2 d alpha^2 T / (1 - alpha)^4``."""
    return float(np.abs(np.asarray(g)).sum()) ** 2 * d * alpha ** 2 * T / (1 - alpha) ** 4


def value_eps(eps: float, g, d: int, alpha: float) -> float:
    """Accuracy the matrix estimate needs for value error ``eps``."""
    return eps * (1 - alpha) ** 2 / (float(np.abs(np.asarray(g)).sum()) * math.sqrt(d) * alpha)


def value_threshold(inputs: BoundInputs, g, alpha: float) -> float:
    """Sample size for value accuracy ``inputs.eps``, obtained from the matrix
    threshold at the rescaled accuracy."""
    return theorem1_threshold(inputs.with_(eps=value_eps(inputs.eps, g, inputs.d, alpha)))


# ---- greedy exploration ----

def augmented_index(x, omega, d: int):
    """State ``(x, omega)`` of the transformed chain as ``omega * d + x``."""
    return np.asarray(omega, dtype=np.int64) * d + np.asarray(x, dtype=np.int64)


def greedy_transform(traj: Trajectory, seed: int = 0) -> Trajectory:
    """Replace every non-exploratory step by an independent uniform pair and
    append the flag to the state.

    The result lives on ``2d`` states; exploratory steps keep ``(X_i, a_i)``.
    """
    if traj.omega is None:
        raise MissingFlags("trajectory carries no exploration flags")
    rng = make_rng(seed)
    n = traj.m + 1
    d2 = rng.integers(0, traj.d, n)
    d3 = rng.integers(0, traj.k, n)
    w = traj.omega.astype(bool)
    x = np.where(w, traj.states, d2)
    a = np.where(w, traj.controls, d3)
    return Trajectory(augmented_index(x, w, traj.d), a, 2 * traj.d, traj.k, seed=traj.seed,
                      restart_period=traj.restart_period, policy_hash=traj.policy_hash)


def build_transformed_model(model: CmcModel, upsilon: float) -> np.ndarray:
    """``(k, 2d, 2d)`` stack of ``[[(1-u) J, u M], [(1-u) J, u M]]``."""
    _check_upsilon(upsilon)
    d = model.d
    J = np.full((d, d), 1.0 / d)
    out = np.empty((model.k, 2 * d, 2 * d))
    for l in range(model.k):
        top = np.hstack([(1 - upsilon) * J, upsilon * model.matrices[l]])
        out[l] = np.vstack([top, top])
    return out


def _check_upsilon(upsilon: float) -> None:
    if not 0.0 < upsilon < 1.0:
        raise InvalidUpsilon(f"upsilon must lie in (0, 1), got {upsilon}")


@dataclass
class GreedyRecovery:
    upsilon: float
    transformed: np.ndarray
    recovered: np.ndarray
    row_sums: np.ndarray
    renormalized: bool
    flagged_rows: list = field(default_factory=list)


def recover_greedy_M(transformed, upsilon: float, renormalize: bool = True,
                     tol: float = RENORM_TOL) -> GreedyRecovery:
    """Read ``M^(l)`` off the bottom-right block of the transformed matrices.

    The raw estimate is ``block / upsilon``. With ``renormalize`` the rows are
    divided by their own sums instead, which removes the noise in the share of
    exploratory successors; rows whose raw sum is off by more than ``tol`` are
    listed in ``flagged_rows`` as ``(s, l)``.
    """
    _check_upsilon(upsilon)
    F = np.asarray(transformed.matrices if hasattr(transformed, "matrices") else transformed,
                   dtype=np.float64)
    if F.ndim == 2:
        F = F[None]
    if F.shape[1] != F.shape[2] or F.shape[1] % 2:
        raise DimensionMismatch(f"transformed matrices must be (k, 2d, 2d), got {F.shape}")
    d = F.shape[1] // 2
    block = F[:, d:, d:]
    raw = block / upsilon
    sums = raw.sum(axis=2)
    flagged = [(int(s), int(l)) for l, s in zip(*np.nonzero(np.abs(sums - 1) > tol))]
    if renormalize:
        with np.errstate(invalid="ignore", divide="ignore"):
            rec = np.where(sums[..., None] > 0, block / block.sum(axis=2, keepdims=True), 1.0 / d)
    else:
        rec = raw
    return GreedyRecovery(upsilon, F, rec, sums, renormalize, sorted(flagged))


def greedy_pipeline(model: CmcModel, base, upsilon: float, m: int, seed: int = 0, rep: int | None = None,
                    transform_seed: int | None = None) -> dict:
    """Simulate greedy controls, transform, estimate on ``2d`` states and read
    ``M`` back. Errors are max row-L1 distances to the truth."""
    _check_upsilon(upsilon)
    traj = simulate(model, pol.Greedy(upsilon, base, model.k), None, m, seed, rep=rep)
    if transform_seed is None:
        transform_seed = seed * 1_000_003 + (rep or 0)
    F = estimate_from(greedy_transform(traj, transform_seed)).matrices
    raw = recover_greedy_M(F, upsilon, renormalize=False)
    ren = recover_greedy_M(F, upsilon, renormalize=True)
    d = model.d
    return {"transformed": F, "raw": raw, "renormalized": ren,
            "raw_error": float(np.abs(raw.recovered - model.matrices).sum(axis=2).max()),
            "renormalized_error": float(np.abs(ren.recovered - model.matrices).sum(axis=2).max()),
            "top_left_dev": float(np.abs(F[:, :d, :d] - (1 - upsilon) / d).max()),
            "flagged_rows": len(raw.flagged_rows)}
