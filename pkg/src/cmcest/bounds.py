"""Closed-form sample-size bounds, per-class constants and their Monte Carlo
checks.

The universal constants ``c`` and ``C_pel`` are inputs (default 1). The Monte
Carlo helpers report the smallest ``c`` that makes the empirical failure rate
acceptable instead of asserting a value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from statistics import NormalDist

import numpy as np

from . import policies as pol
from .estimate import count, estimate, estimation_error
from .model import CmcModel, paired_chain, stationary_distribution
from .simulate import simulate


class InvalidParameter(ValueError):
    pass


class MTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class BoundInputs:
    d: int
    k: int
    T: float
    zeta1: float
    zeta2: float
    C_delta: float
    rho_star: float = 1.0
    C_pel: float = 1.0
    c: float = 1.0
    eps: float = 0.1
    delta: float = 0.05

    def __post_init__(self):
        if not 0 < self.zeta2 <= self.zeta1 < 1:
            raise InvalidParameter(f"need 0 < zeta2 <= zeta1 < 1, got {self.zeta2}, {self.zeta1}")
        if not self.T > self.d * self.k / 2:
            raise InvalidParameter(f"T = {self.T} must exceed dk/2 = {self.d * self.k / 2}")
        if self.eps <= 0:
            raise InvalidParameter("eps must be positive")
        if not 0 < self.delta < 1:
            raise InvalidParameter("delta must lie in (0, 1)")
        if not 0 < self.rho_star <= 1:
            raise InvalidParameter("rho_star must lie in (0, 1]")
        if self.C_pel <= 0 or self.c <= 0:
            raise InvalidParameter("C_pel and c must be positive")

    @property
    def zeta_max(self) -> float:
        return max(self.zeta1, 1.0 - self.zeta2)

    def with_(self, **kw) -> "BoundInputs":
        return replace(self, **kw)


def expected_visit_bracket(inputs: BoundInputs, m: float) -> tuple[float, float]:
    """``(m / 2T, m * max{zeta1, 1 - zeta2})``; requires ``m >= 2T``."""
    if m < 2 * inputs.T:
        raise MTooSmall(f"m = {m} is below 2T = {2 * inputs.T}")
    return m / (2 * inputs.T), m * inputs.zeta_max


def hoeffding_tail(inputs: BoundInputs, m: float, n_low: float, n_high: float) -> float:
    var = 2 * m * inputs.C_delta ** 2
    lo = (n_low - m / (2 * inputs.T)) ** 2
    hi = (n_high - m * inputs.zeta_max) ** 2
    return 2 * math.exp(-lo / var) + 2 * math.exp(-hi / var)


def bernstein_tail(inputs: BoundInputs, m: float, n_low: float, n_high: float, rho: float | None = None) -> float:
    """Bernstein-type bound; ``rho`` is the pair's peak marginal (default ``rho_star``)."""
    if m < 2:
        raise MTooSmall("m must be >= 2")
    rho = inputs.rho_star if rho is None else rho
    lg = math.log(m) ** 2
    base = 4 * m * inputs.C_delta * rho + 1
    dev_lo = n_low - m / (2 * inputs.T)
    dev_hi = n_high - m * inputs.zeta_max
    t1 = inputs.C_pel * dev_lo ** 2 / (base + (m / (2 * inputs.T) - n_low) * lg)
    t2 = inputs.C_pel * dev_hi ** 2 / (base + dev_hi * lg)
    return 2 * math.exp(-t1) + 2 * math.exp(-t2)


def theorem1_terms(inputs: BoundInputs) -> tuple[float, float]:
    d, k, T, e, dl = inputs.d, inputs.k, inputs.T, inputs.eps, inputs.delta
    first = T / e ** 2 * math.log(d * k * T / (e ** 2 * dl))
    second = inputs.C_delta ** 2 * max(T ** 2, (1 - inputs.zeta_max) ** -2) * math.log(d * k / dl)
    return first, second


def theorem1_threshold(inputs: BoundInputs) -> float:
    return inputs.c * max(theorem1_terms(inputs))


def theorem2_terms(inputs: BoundInputs) -> dict:
    d, k, T, dl = inputs.d, inputs.k, inputs.T, inputs.delta
    zm = inputs.zeta_max
    C_T = 64 * (inputs.C_delta * inputs.rho_star * T ** 2 + 2 * T) / inputs.C_pel
    C_z = 8 * (2 * inputs.C_delta * inputs.rho_star * (1 - zm) ** -2 + (1 - zm) ** -1) / inputs.C_pel
    L = math.log(6 * d * k / dl)
    C_Td, C_zd = C_T * L, C_z * L
    return {"C_T": C_T, "C_zeta": C_z, "C_T_delta": C_Td, "C_zeta_delta": C_zd,
            "first": 8 * d / (inputs.eps ** 2 * (1 + zm)),
            "second": 2 * C_Td * math.log(C_Td) ** 2,
            "third": 2 * C_zd * math.log(C_zd) ** 2}


def theorem2_threshold(inputs: BoundInputs) -> float:
    t = theorem2_terms(inputs)
    return inputs.c * max(t["first"], t["second"], t["third"])


# ---- per-class constants ----

def class_constants(kind: str, **p) -> dict:
    """Constants each policy class is shown to satisfy.

    ``stationary``: ``pi`` (pair stationary law), ``P_min``, ``k``, optional ``C_theta``
    ``inhomogeneous``: ``M_min``, ``M_max``, ``window``
    ``markov``: ``M_min``, ``M_max``, ``T_star``, ``d``
    ``episodic``: ``d``, ``k``, ``H``, ``M_min``, ``M_max``
    ``greedy``: ``upsilon``, ``pi_star``, ``k``
    """
    kind = kind.lower()
    if kind == "stationary":
        pi = np.asarray(p["pi"], dtype=np.float64)
        if np.any(pi <= 0):
            raise InvalidParameter("every pair needs positive stationary mass")
        P_min, k = float(p["P_min"]), int(p["k"])
        if P_min <= 0:
            raise InvalidParameter("P_min must be positive")
        out = {"T": float(1.0 / pi.min()), "zeta1": 1.0 - (k - 1) * P_min, "zeta2": P_min, "C": 0.0,
               "C_theta": float(p.get("C_theta", float("nan")))}
    elif kind == "inhomogeneous":
        M_min, M_max, W = float(p["M_min"]), float(p["M_max"]), int(p["window"])
        if not 0 < M_min < 1:
            raise InvalidParameter("inhomogeneous constants need 0 < M_min < 1")
        q = 1.0 - M_min
        out = {"T": q ** (1 - 1 / W) / (1 - q ** (1 / W)), "zeta1": M_max, "zeta2": M_min, "C": 0.0,
               "C_theta": math.e / (math.e - 1)}
    elif kind == "markov":
        M_min, M_max, T_star, d = float(p["M_min"]), float(p["M_max"]), float(p["T_star"]), int(p["d"])
        if M_min <= 0 or M_max >= 1:
            raise InvalidParameter("markov constants need 0 < M_min <= M_max < 1")
        if d * M_min >= 1:
            raise InvalidParameter("d * M_min must be below 1")
        M_opt = max(M_max, 1 - M_min)
        out = {"T": T_star * M_max / (M_opt * (1 - M_opt)), "zeta1": M_max, "zeta2": M_min, "C": 0.0,
               "C_theta": 1.0 / (1 - d * M_min)}
    elif kind == "episodic":
        d, k, H = int(p["d"]), int(p["k"]), int(p["H"])
        if H < 1:
            raise InvalidParameter("H must be >= 1")
        out = {"T": float(d * k * H - 1), "zeta1": float(p.get("M_max", float("nan"))),
               "zeta2": float(p.get("M_min", float("nan"))), "C": float(H ** 2), "C_theta": float(H)}
    elif kind == "greedy":
        u, pi_star, k = float(p["upsilon"]), float(p["pi_star"]), int(p["k"])
        if not 0 < u < 1 or pi_star <= 0:
            raise InvalidParameter("greedy constants need 0 < upsilon < 1 and pi_star > 0")
        out = {"T": 1.0 / pi_star, "zeta1": 1.0 / k, "zeta2": 1.0 / k, "C": 0.0, "C_theta": 1.0 / u}
    else:
        raise InvalidParameter(f"unknown class {kind!r}")
    out["C_delta"] = out["C"] + out["C_theta"] + 1.0
    out["class"] = kind
    return out


def theta_sum_stationary(model: CmcModel, table, tol: float = 1e-15, max_terms: int = 100000) -> float:
    """``sum_{g >= 1} sup TV(L(X_{i+g} | pair), L(X_{i+g} | pair'))`` for the
    time-homogeneous pair chain; geometric decay makes the series finite."""
    K = paired_chain(model, table)
    d, k = model.d, model.k
    R = np.eye(d * k)
    total = 0.0
    for _ in range(max_terms):
        R = R @ K
        states = R.reshape(d * k, d, k).sum(axis=2)
        tv = 0.5 * np.abs(states[:, None, :] - states[None, :, :]).sum(axis=2).max()
        total += tv
        if tv < tol:
            break
    return float(total)


def stationary_constants(model: CmcModel, table) -> dict:
    table = np.asarray(table, dtype=np.float64)
    pi = stationary_distribution(paired_chain(model, table))
    out = class_constants("stationary", pi=pi, P_min=table.min(), k=model.k,
                          C_theta=theta_sum_stationary(model, table))
    out["rho_star"] = float(pi.max())
    out["pi"] = pi.reshape(model.d, model.k)
    return out


def markov_T_star(tables) -> float:
    """Bound on expected control return times when every control has
    probability at least ``min(tables)`` at every step."""
    p = float(np.min(tables))
    if p <= 0:
        raise InvalidParameter("some control has zero probability")
    return 1.0 / p


def inputs_from(constants: dict, d: int, k: int, **kw) -> BoundInputs:
    return BoundInputs(d=d, k=k, T=constants["T"], zeta1=constants["zeta1"], zeta2=constants["zeta2"],
                       C_delta=constants["C_delta"], **kw)


# ---- Monte Carlo checks ----

def mean_ci(samples, level: float = 0.99) -> tuple[float, float, float]:
    x = np.asarray(samples, dtype=np.float64)
    z = NormalDist().inv_cdf(0.5 + level / 2)
    half = z * x.std(ddof=1) / math.sqrt(len(x))
    return float(x.mean()), float(x.mean() - half), float(x.mean() + half)


def proportion_ci(hits: int, n: int, level: float = 0.99) -> tuple[float, float, float]:
    """Wilson interval."""
    z = NormalDist().inv_cdf(0.5 + level / 2)
    p = hits / n
    den = 1 + z ** 2 / n
    centre = (p + z ** 2 / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z ** 2 / (4 * n ** 2)) / den
    return p, max(0.0, centre - half), min(1.0, centre + half)


def visit_counts_mc(model: CmcModel, policy: pol.LoggingPolicy, d0, m: int, n_rep: int, seed: int) -> np.ndarray:
    """``(n_rep, d, k)`` visit counts ``N_s^(l)`` over replications ``0..n_rep-1``."""
    out = np.empty((n_rep, model.d, model.k), dtype=np.int64)
    for r in range(n_rep):
        out[r] = count(simulate(model, policy, d0, m, seed, rep=r)).visits
    return out


def sup_errors_mc(model: CmcModel, policy: pol.LoggingPolicy, d0, m: int, n_rep: int, seed: int) -> np.ndarray:
    errs = np.empty(n_rep)
    for r in range(n_rep):
        errs[r] = estimation_error(estimate(count(simulate(model, policy, d0, m, seed, rep=r))), model)[0]
    return errs


def pac_tolerance(delta: float, n_rep: int) -> float:
    return delta + 2 * math.sqrt(delta / n_rep)


def pac_validation(model: CmcModel, policy: pol.LoggingPolicy, d0, inputs: BoundInputs, n_rep: int = 500,
                   seed: int = 0) -> dict:
    m = max(2, int(math.ceil(theorem1_threshold(inputs))))
    errs = sup_errors_mc(model, policy, d0, m, n_rep, seed)
    rate = float(np.mean(errs > inputs.eps))
    tol = pac_tolerance(inputs.delta, n_rep)
    return {"m_star": m, "c": inputs.c, "empirical_failure_rate": rate, "delta": inputs.delta,
            "tolerance": tol, "replications": n_rep, "pass": bool(rate <= tol)}


def calibrate_c(model: CmcModel, policy: pol.LoggingPolicy, d0, inputs: BoundInputs, n_rep: int = 500,
                seed: int = 0, grid=None) -> dict:
    """Smallest ``c`` on a geometric grid whose threshold passes; failure rates
    are nonincreasing in ``m`` up to noise, so the scan stops at the first pass
    from below."""
    grid = list(grid) if grid is not None else [2 ** (e / 2) for e in range(-12, 13)]
    tried = []
    for c in sorted(grid):
        res = pac_validation(model, policy, d0, inputs.with_(c=c), n_rep, seed)
        tried.append(res)
        if res["pass"]:
            return {"c": c, "result": res, "tried": tried}
    return {"c": float("nan"), "result": tried[-1], "tried": tried}
