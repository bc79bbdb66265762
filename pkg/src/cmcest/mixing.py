"""Exact mixing coefficients of the pair process on small instances.

Everything starts from the full path law, a tensor with one axis of size
``d * k`` per time index ``0..m``. Suprema over events of the future are total
variation distances between conditional path laws, so no subset enumeration is
needed. With ``exact=True`` the tensor holds Fractions and every coefficient
is exact.

Index conventions (all arrays use NaN where a coefficient is undefined):

* ``eta_bar[i, j]``, ``phi[i, j]``, ``theta_bar[i, j]`` for ``0 <= i < j <= m``;
* ``gamma[p, g, i]`` for a gap ``g >= 1`` and ``i + g <= p <= m``: the control
  law at ``p`` given the window ``H_{i+g}^{p-1}`` with and without the remote
  history ``H_0^i`` (the window is empty when ``p = i + g``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import policies as pol
from .model import CmcModel
from .simulate import _check_dims, resolve_d0

ENUM_CAP = 10**7
SLACK = 1e-10


class TooLarge(ValueError):
    """The path space exceeds the enumeration cap."""


def _frac(arr) -> np.ndarray:
    a = np.asarray(arr, dtype=np.float64)
    return np.array([Fraction(float(v)) for v in a.ravel()], dtype=object).reshape(a.shape)


def path_law(model: CmcModel, policy: pol.LoggingPolicy, d0=None, m: int = 3, cap: int = ENUM_CAP,
             exact: bool = False) -> np.ndarray:
    """Joint law of ``(Y_0, ..., Y_m)`` with ``Y_i = X_i * k + a_i``."""
    _check_dims(model, policy)
    d, k = model.d, model.k
    n = d * k
    if n ** (m + 1) > cap:
        raise TooLarge(f"(dk)^(m+1) = {n}^{m + 1} exceeds the cap {cap}")
    conv = _frac if exact else (lambda a: np.asarray(a, dtype=np.float64))
    mats = conv(model.matrices)
    kind, law = resolve_d0(model, policy, d0)
    if kind == "pair":
        P = conv(law).reshape(n)
    else:
        P = np.empty(n, dtype=object if exact else np.float64)
        lw = conv(law)
        for x in range(d):
            P[x * k:(x + 1) * k] = lw[x] * conv(pol.control_probs(policy, 0, x, ()))
    for i in range(1, m + 1):
        flat = P.reshape(-1, n)
        if pol.is_restart(policy, i):
            K = np.broadcast_to(conv(policy.restart).reshape(1, n), (n, n))
            P = (flat[:, :, None] * K[None]).reshape(P.shape + (n,))
            continue
        tab = pol.markov_table(policy, i, d)
        if tab is not None:
            t = conv(tab)
            # K[(s, l), (u, a)] = M[l, s, u] * tab[u, a]
            K = (mats.transpose(1, 0, 2)[:, :, :, None] * t[None, None]).reshape(n, n)
            P = (flat[:, :, None] * K[None]).reshape(P.shape + (n,))
            continue
        out = np.zeros((flat.shape[0], n, n), dtype=flat.dtype)
        for h in range(flat.shape[0]):
            hist = _decode(h, i, n, k)
            for p in range(n):
                mass = flat[h, p]
                if mass == 0:
                    continue
                s, l = divmod(p, k)
                for u in range(d):
                    if mats[l, s, u] == 0:
                        continue
                    probs = conv(pol.control_probs(policy, i, u, hist[:-1] + ((s, l),)))
                    out[h, p, u * k:(u + 1) * k] = mass * mats[l, s, u] * probs
        P = out.reshape(P.shape + (n,))
    return P


def _decode(h: int, length: int, n: int, k: int) -> tuple:
    # flat index over the first `length - 1` axes, followed by a placeholder slot
    digits = []
    for _ in range(length - 1):
        h, r = divmod(h, n)
        digits.append(r)
    digits.reverse()
    return tuple(divmod(p, k) for p in digits) + (None,)


def _keep(P: np.ndarray, axes) -> np.ndarray:
    axes = sorted(axes)
    drop = tuple(a for a in range(P.ndim) if a not in axes)
    return P.sum(axis=drop) if drop else P


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    pos = den > 0
    one = Fraction(1) if den.dtype == object else 1.0
    return num / np.where(pos, den, one)[..., None], pos


def _nan(m: int, ndim: int = 2, exact: bool = False) -> np.ndarray:
    shape = (m + 1,) * ndim
    if exact:
        return np.full(shape, None, dtype=object)
    return np.full(shape, np.nan)


def _max(vals, exact: bool):
    vals = list(vals)
    if not vals:
        return Fraction(0) if exact else 0.0
    return max(vals)


def _pairwise_sup(C: np.ndarray, pos: np.ndarray, exact: bool):
    """Largest TV between rows of C over positive-mass rows, grouped by the
    leading axis: C has shape (G, R, F) and pos (G, R)."""
    best = Fraction(0) if exact else 0.0
    R = C.shape[1]
    for r in range(R):
        if not np.any(pos[:, r]):
            continue
        tv = np.abs(C[:, r:r + 1, :] - C).sum(axis=-1) / 2
        ok = pos[:, r:r + 1] & pos
        if np.any(ok):
            best = max(best, tv[ok].max())
    return best


def _eta_bar_from_law(P: np.ndarray, m: int, exact: bool) -> np.ndarray:
    n = P.shape[0]
    out = _nan(m, exact=exact)
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            Q = _keep(P, list(range(i + 1)) + list(range(j, m + 1)))
            Q = Q.reshape(n ** i, n, -1)
            C, pos = _safe_div(Q, Q.sum(axis=-1))
            out[i, j] = _pairwise_sup(C, pos, exact)
    return out


def _conditional_future(P: np.ndarray, i: int, j: int, m: int):
    n = P.shape[0]
    Q = _keep(P, list(range(i + 1)) + list(range(j, m + 1))).reshape(n ** (i + 1), -1)
    C, pos = _safe_div(Q, Q.sum(axis=-1))
    return Q, C, pos


def _phi_from_law(P: np.ndarray, m: int, exact: bool) -> np.ndarray:
    out = _nan(m, exact=exact)
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            Q, C, pos = _conditional_future(P, i, j, m)
            marg = Q.sum(axis=0)
            tv = np.abs(C[pos] - marg[None]).sum(axis=-1) / 2
            out[i, j] = _max(tv, exact)
    return out


def _eta_bar_any_from_law(P: np.ndarray, m: int, exact: bool) -> np.ndarray:
    out = _nan(m, exact=exact)
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            _, C, pos = _conditional_future(P, i, j, m)
            rows = C[pos]
            if not exact:
                rows = np.unique(np.round(rows, 14), axis=0)
            out[i, j] = _pairwise_sup(rows[None], np.ones((1, rows.shape[0]), dtype=bool), exact)
    return out


def _theta_bar_from_law(P: np.ndarray, m: int, d: int, k: int, exact: bool) -> np.ndarray:
    out = _nan(m, exact=exact)
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            J = _keep(P, [i, j]).reshape(d * k, d, k).sum(axis=-1)
            C, pos = _safe_div(J, J.sum(axis=-1))
            out[i, j] = _pairwise_sup(C[None], pos[None], exact)
    return out


def _gamma_from_law(P: np.ndarray, m: int, d: int, k: int, exact: bool) -> np.ndarray:
    n = d * k
    out = _nan(m, ndim=3, exact=exact)
    for i in range(m + 1):
        for g in range(1, m + 1 - i):
            for p in range(i + g, m + 1):
                J = _keep(P, list(range(i + 1)) + list(range(i + g, p + 1)))
                J = J.reshape(n ** (i + 1), n ** (p - i - g), d, k)
                C1, pos = _safe_div(J, J.sum(axis=-1))
                J2 = J.sum(axis=0)
                C2, _ = _safe_div(J2, J2.sum(axis=-1))
                tv = np.abs(C1 - C2[None]).sum(axis=-1) / 2
                out[p, g, i] = _max(tv[pos], exact)
    return out


def compute_eta_bar(model, policy, d0=None, m: int = 3, cap: int = ENUM_CAP, exact: bool = False) -> np.ndarray:
    """Weak-mixing coefficients: both conditionings share ``H_0^{i-1}``."""
    return _eta_bar_from_law(path_law(model, policy, d0, m, cap, exact), m, exact)


def compute_eta_bar_any(model, policy, d0=None, m: int = 3, cap: int = ENUM_CAP, exact: bool = False) -> np.ndarray:
    """Variant where the two conditioning histories ``H_0^i`` are arbitrary."""
    return _eta_bar_any_from_law(path_law(model, policy, d0, m, cap, exact), m, exact)


def compute_phi(model, policy, d0=None, m: int = 3, cap: int = ENUM_CAP, exact: bool = False) -> np.ndarray:
    """Uniform-mixing coefficients relative to the path law started from ``d0``."""
    return _phi_from_law(path_law(model, policy, d0, m, cap, exact), m, exact)


def compute_gamma(model, policy, d0=None, m: int = 3, cap: int = ENUM_CAP, exact: bool = False) -> np.ndarray:
    return _gamma_from_law(path_law(model, policy, d0, m, cap, exact), m, model.d, model.k, exact)


def compute_theta_bar(model, policy, d0=None, m: int = 3, cap: int = ENUM_CAP, exact: bool = False) -> np.ndarray:
    return _theta_bar_from_law(path_law(model, policy, d0, m, cap, exact), m, model.d, model.k, exact)


def delta_norm(eta_bar: np.ndarray, m: int | None = None) -> float:
    """``max_{1 <= i <= m} (1 + sum_{j > i} eta_bar[i, j])``."""
    m = eta_bar.shape[0] - 1 if m is None else m
    best = 1
    for i in range(1, m + 1):
        best = max(best, 1 + sum(eta_bar[i, j] for j in range(i + 1, m + 1)))
    return best


def mixing_constants(gamma: np.ndarray, theta_bar: np.ndarray, m: int | None = None) -> tuple:
    """``(C, C_theta)``: ``C = 2 sup_i sum_g sum_{p >= i+g} gamma[p, g, i]`` and
    ``C_theta = sup_i sum_{j > i} theta_bar[i, j]``, both over ``i >= 1``."""
    m = theta_bar.shape[0] - 1 if m is None else m
    C = C_theta = 0
    for i in range(1, m + 1):
        s = sum(gamma[p, g, i] for g in range(1, m + 1 - i) for p in range(i + g, m + 1))
        C = max(C, 2 * s)
        C_theta = max(C_theta, sum(theta_bar[i, j] for j in range(i + 1, m + 1)))
    return C, C_theta


def eta_bound_rhs(gamma: np.ndarray, theta_bar: np.ndarray, i: int, j: int) -> float:
    """``2 sum_{p >= j} gamma[p, j - i, i] + theta_bar[i, j]``."""
    m = theta_bar.shape[0] - 1
    return 2 * sum(gamma[p, j - i, i] for p in range(j, m + 1)) + theta_bar[i, j]


@dataclass
class MixingReport:
    m: int
    eta_bar: np.ndarray
    phi: np.ndarray
    gamma: np.ndarray
    theta_bar: np.ndarray
    delta_norm: float
    eta_bar_any: np.ndarray | None = None
    d0: list = field(default_factory=list)

    def sandwich_violations(self, slack: float = SLACK, any_history: bool = False) -> list:
        """``(i, j, phi, eta)`` where ``phi <= eta <= 2 phi`` fails."""
        eta = self.eta_bar_any if any_history else self.eta_bar
        bad = []
        for i in range(self.m + 1):
            for j in range(i + 1, self.m + 1):
                f, e = self.phi[i, j], eta[i, j]
                if f < -slack or e < f - slack or e > 2 * f + slack:
                    bad.append((i, j, float(f), float(e)))
        return bad

    def to_dict(self) -> dict:
        def clean(a):
            return np.where(np.isnan(a.astype(float)), None, a.astype(float)).tolist()
        out = {"m": self.m, "d0": self.d0, "eta_bar": clean(self.eta_bar), "phi": clean(self.phi),
               "gamma": clean(self.gamma), "theta_bar": clean(self.theta_bar),
               "delta_norm": float(self.delta_norm)}
        if self.eta_bar_any is not None:
            out["eta_bar_any"] = clean(self.eta_bar_any)
        return out

    def rows(self) -> list[dict]:
        """Long format, one row per ``(i, j)``, for plotting decay curves."""
        out = []
        for i in range(self.m + 1):
            for j in range(i + 1, self.m + 1):
                row = {"i": i, "j": j, "eta_bar": float(self.eta_bar[i, j]), "phi": float(self.phi[i, j]),
                       "theta_bar": float(self.theta_bar[i, j])}
                if self.eta_bar_any is not None:
                    row["eta_bar_any"] = float(self.eta_bar_any[i, j])
                out.append(row)
        return out


def mixing_report(model, policy, d0=None, m: int = 3, cap: int = ENUM_CAP, exact: bool = False,
                  any_history: bool = True) -> MixingReport:
    P = path_law(model, policy, d0, m, cap, exact)
    eta = _eta_bar_from_law(P, m, exact)
    kind, law = resolve_d0(model, policy, d0)
    return MixingReport(
        m=m, eta_bar=eta, phi=_phi_from_law(P, m, exact),
        gamma=_gamma_from_law(P, m, model.d, model.k, exact),
        theta_bar=_theta_bar_from_law(P, m, model.d, model.k, exact),
        delta_norm=delta_norm(eta, m),
        eta_bar_any=_eta_bar_any_from_law(P, m, exact) if any_history else None,
        d0=np.asarray(law, dtype=float).tolist(),
    )


# ---- inequalities checked on the exact law ----

def pair_marginals(P: np.ndarray, i: int, j: int) -> np.ndarray:
    """Joint law of ``(Y_i, Y_j)`` as an ``(n, n)`` table."""
    J = _keep(P, [i, j])
    return J if i < j else J.T


def check_covariance_inequality(P: np.ndarray, f, g, i: int, j: int, phi: np.ndarray,
                                form: str = "stated", slack: float = SLACK) -> bool:
    """Check a covariance bound for ``f(Y_j)`` and ``g(Y_i)`` under the exact law.

    ``form="stated"``: ``|Cov| <= phi[i, j] * E|f - Ef| * ess sup |g|``.
    ``form="hall-heyde"``: ``|Cov| <= 2 phi[i, j] * E|g| * ess sup |f|``, the
    ``p = 1, q = infinity`` case with the integrable factor on the past side.
    """
    cov, lhs_terms = covariance_terms(P, f, g, i, j)
    if form == "stated":
        bound = phi[i, j] * lhs_terms["E|f-Ef|"] * lhs_terms["sup|g|"]
    elif form == "hall-heyde":
        bound = 2 * phi[i, j] * lhs_terms["E|g|"] * lhs_terms["sup|f|"]
    else:
        raise ValueError(f"unknown form {form!r}")
    return bool(abs(cov) <= bound + slack)


def covariance_terms(P: np.ndarray, f, g, i: int, j: int):
    J = np.asarray(pair_marginals(P, i, j), dtype=np.float64)
    f = np.asarray(f, dtype=np.float64).ravel()
    g = np.asarray(g, dtype=np.float64).ravel()
    pi_i, pi_j = J.sum(axis=1), J.sum(axis=0)
    ef, eg = pi_j @ f, pi_i @ g
    cov = float(g @ J @ f - ef * eg)
    terms = {"E|f-Ef|": float(pi_j @ np.abs(f - ef)), "sup|g|": float(np.abs(g[pi_i > 0]).max()),
             "E|g|": float(pi_i @ np.abs(g)), "sup|f|": float(np.abs(f[pi_j > 0]).max())}
    return cov, terms


def indicator_phi(P: np.ndarray, s: int, l: int, k: int, exact: bool = False) -> np.ndarray:
    """Uniform-mixing coefficients of ``I_i = 1[(X_i, a_i) = (s, l)]``."""
    target = s * k + l
    n = P.shape[0]
    m = P.ndim - 1
    red = P
    for ax in range(P.ndim):
        moved = np.moveaxis(red, ax, 0)
        hit = moved[target:target + 1]
        miss = np.concatenate([moved[:target], moved[target + 1:n]], axis=0).sum(axis=0, keepdims=True)
        red = np.moveaxis(np.concatenate([miss, hit], axis=0), 0, ax)
    return _phi_from_law(red, m, exact)


def tv(p, q):
    return np.abs(np.asarray(p) - np.asarray(q)).sum() / 2


def tv_chain_rule_sides(joint: np.ndarray, z1: int, z2: int) -> tuple[float, float]:
    """For a law ``joint[x, y, z]`` return both sides of
    ``TV(L(X,Y|z1), L(X,Y|z2)) <= TV(L(Y|z1), L(Y|z2)) + sup_y TV(L(X|y,z1), L(X|y,z2))``,
    the supremum running over ``y`` with positive mass under both conditionings."""
    J = np.asarray(joint, dtype=np.float64)
    a = J[:, :, z1] / J[:, :, z1].sum()
    b = J[:, :, z2] / J[:, :, z2].sum()
    lhs = tv(a, b)
    ya, yb = a.sum(axis=0), b.sum(axis=0)
    sup = 0.0
    for y in range(J.shape[1]):
        if ya[y] > 0 and yb[y] > 0:
            sup = max(sup, tv(a[:, y] / ya[y], b[:, y] / yb[y]))
    return float(lhs), float(tv(ya, yb) + sup)


def theta_geometric_bound(M_min: float, chi0_size: int, i: int, j: int) -> float:
    return (1.0 - chi0_size * M_min) ** (j - i - 1)


def enumerable(d: int, k: int, m: int, cap: int = ENUM_CAP) -> bool:
    return (d * k) ** (m + 1) <= cap


__all__ = [
    "ENUM_CAP", "TooLarge", "MixingReport", "path_law", "compute_eta_bar", "compute_eta_bar_any", "compute_phi",
    "compute_gamma", "compute_theta_bar", "delta_norm", "mixing_constants", "eta_bound_rhs", "mixing_report",
    "check_covariance_inequality", "covariance_terms", "indicator_phi", "tv_chain_rule_sides",
    "theta_geometric_bound", "enumerable", "pair_marginals",
]
