"""Trajectory generation, the array-based coupled sampler, exact path laws and
return-time statistics.

Randomness: every trajectory owns a ``numpy.random.Generator`` over Philox
seeded by ``SeedSequence(seed, spawn_key=(rep,))``. Uniforms are consumed in
rows of three (transition, control, exploration), one row per time index, so
the compiled and Python kernels give bit-identical output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import policies as pol
from ._backend import BACKEND, kernels
from .model import CmcModel, DimensionMismatch, check_distribution

RNG_ALGORITHM = "numpy.Philox4x64-10"
CHUNK = 1 << 16


def make_rng(seed: int, rep: int | None = None) -> np.random.Generator:
    """Generator for master ``seed``; ``rep`` selects an independent child stream."""
    ss = np.random.SeedSequence(seed) if rep is None else np.random.SeedSequence(seed, spawn_key=(rep,))
    return np.random.Generator(np.random.Philox(ss))


@dataclass
class Trajectory:
    """Sample path ``(X_0, a_0), ..., (X_m, a_m)``.

    ``restart_period`` is the episode length when the path came from an episodic
    policy: at its positive multiples the state was redrawn, not produced by
    the dynamics, so no transition ends there.
    """

    states: np.ndarray
    controls: np.ndarray
    d: int
    k: int
    seed: int | None = None
    omega: np.ndarray | None = None
    restart_period: int = 0
    policy_hash: str = ""

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=np.int32)
        self.controls = np.asarray(self.controls, dtype=np.int32)
        if self.states.shape != self.controls.shape or self.states.ndim != 1 or len(self.states) < 1:
            raise DimensionMismatch("states and controls must be equal-length 1-d arrays")
        if self.states.min() < 0 or self.states.max() >= self.d:
            raise ValueError("state index out of range")
        if self.controls.min() < 0 or self.controls.max() >= self.k:
            raise ValueError("control index out of range")
        if self.omega is not None:
            self.omega = np.asarray(self.omega, dtype=np.uint8)
            if self.omega.shape != self.states.shape:
                raise DimensionMismatch("omega must match the path length")

    @property
    def m(self) -> int:
        return len(self.states) - 1

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.states.tolist(), self.controls.tolist()))

    def breaks(self) -> np.ndarray:
        """Boolean mask of indices whose state did not come from the dynamics."""
        b = np.zeros(self.m + 1, dtype=bool)
        if self.restart_period > 0:
            b[self.restart_period::self.restart_period] = True
        return b


# ---- helpers shared by the samplers ----

def _cum(p: np.ndarray) -> np.ndarray:
    c = np.cumsum(np.asarray(p, dtype=np.float64), axis=-1)
    c[..., -1] = 1.0
    return np.ascontiguousarray(c)


def _pick(cum_row: np.ndarray, u: float) -> int:
    j = int(np.searchsorted(cum_row, u, side="right"))
    return min(j, len(cum_row) - 1)


def resolve_d0(model: CmcModel, policy: pol.LoggingPolicy, d0=None) -> tuple[str, np.ndarray]:
    """Return ``("state", vec)`` or ``("pair", table)``.

    ``None`` means uniform over states, except for episodic policies where the
    first pair comes from the restart law like every other episode start.
    """
    if d0 is None:
        if isinstance(policy, pol.Episodic):
            return "pair", policy.restart
        return "state", np.full(model.d, 1.0 / model.d)
    arr = np.asarray(d0, dtype=np.float64)
    if arr.ndim == 1:
        return "state", check_distribution(arr, model.d, "d0")
    if arr.shape != (model.d, model.k):
        raise DimensionMismatch(f"d0 must have length {model.d} or shape {(model.d, model.k)}")
    check_distribution(arr.ravel(), model.d * model.k, "d0")
    return "pair", arr


def _initial_pair(model, policy, d0, u_row) -> tuple[int, int, int]:
    kind, law = resolve_d0(model, policy, d0)
    u0, u1, u2 = u_row
    if kind == "pair":
        j = _pick(_cum(law.ravel()), u0)
        x, a = divmod(j, model.k)
        w = int(isinstance(policy, pol.Greedy) and u2 < policy.upsilon)
        return x, a, w
    x = _pick(_cum(law), u0)
    if isinstance(policy, pol.Greedy):
        if u2 < policy.upsilon:
            return x, min(int(u1 * model.k), model.k - 1), 1
        return x, _pick(_cum(policy.base_probs(0, x, ())), u1), 0
    return x, _pick(_cum(pol.control_probs(policy, 0, x, ())), u1), 0


def _kernel_spec(model: CmcModel, policy: pol.LoggingPolicy, m: int) -> dict | None:
    d, k = model.d, model.k
    spec = dict(cum_tab=np.ones((1, d, k)), tab_mod=0, sched=np.zeros(0, dtype=np.int64),
                sched_periodic=True, restart_h=0, cum_restart=np.ones(1), upsilon=-1.0)
    if isinstance(policy, pol.StationaryRandomized):
        spec["cum_tab"] = _cum(policy.table)[None]
    elif isinstance(policy, pol.DeterministicSchedule):
        if not policy.periodic and len(policy.controls) < m + 1:
            raise ValueError(f"explicit schedule of length {len(policy.controls)} cannot cover m={m}")
        spec["sched"] = np.asarray(policy.controls, dtype=np.int64)
        spec["sched_periodic"] = policy.periodic
    elif isinstance(policy, pol.NonStationaryMarkov):
        spec.update(cum_tab=_cum(policy.tables), tab_mod=policy.tables.shape[0] if policy.periodic else 0)
    elif isinstance(policy, pol.Episodic):
        if policy.law is not None:
            return None
        spec.update(cum_tab=_cum(policy.tables), tab_mod=policy.horizon, restart_h=policy.horizon,
                    cum_restart=_cum(policy.restart.ravel()))
    elif isinstance(policy, pol.Greedy):
        if callable(policy.base):
            return None
        spec.update(cum_tab=_cum(policy.base)[None], upsilon=float(policy.upsilon))
    else:
        raise TypeError(type(policy).__name__)
    spec["cum_tab"] = np.ascontiguousarray(spec["cum_tab"])
    return spec


def _check_dims(model: CmcModel, policy: pol.LoggingPolicy) -> None:
    if policy.k != model.k:
        raise DimensionMismatch(f"policy has {policy.k} controls, model has {model.k}")
    d = getattr(policy, "d", model.d)
    if d != model.d:
        raise DimensionMismatch(f"policy has {d} states, model has {model.d}")


# ---- direct sampler ----

def simulate(model: CmcModel, policy: pol.LoggingPolicy, d0=None, m: int = 1000, seed: int = 0,
             rep: int | None = None, backend: str | None = None) -> Trajectory:
    """Sample ``(X_0, a_0), ..., (X_m, a_m)``.

    ``d0`` is a law over states (the control at time 0 then comes from the
    policy) or a ``(d, k)`` law over pairs. ``backend`` may force ``"python"``
    (the kernel twin) or ``"history"`` (generic per-step loop through
    :func:`policies.control_probs`, used for callable policies).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    _check_dims(model, policy)
    rng = make_rng(seed, rep)
    spec = None if backend == "history" else _kernel_spec(model, policy, m)
    if spec is None:
        return _simulate_history(model, policy, d0, m, seed, rng)
    kern = kernels
    if backend == "python":
        from . import _pykernels as kern
    cum_m = _cum(model.matrices)
    xs = np.empty(m + 1, dtype=np.int32)
    as_ = np.empty(m + 1, dtype=np.int32)
    ws = np.zeros(m + 1, dtype=np.uint8)
    bs = np.zeros(m + 1, dtype=np.uint8)
    done = 0
    x = a = 0
    while done <= m:
        n = min(CHUNK, m + 1 - done)
        u = rng.random((n, 3))
        start = 0
        if done == 0:
            x, a, w = _initial_pair(model, policy, d0, u[0])
            xs[0], as_[0], ws[0] = x, a, w
            start = 1
        if n > start:
            sl = slice(done + start, done + n)
            x, a = kern.simulate_chunk(cum_m, spec["cum_tab"], spec["tab_mod"], spec["sched"],
                                       spec["sched_periodic"], spec["restart_h"], spec["cum_restart"],
                                       spec["upsilon"], done + start, x, a, np.ascontiguousarray(u[start:]),
                                       xs[sl], as_[sl], ws[sl], bs[sl])
        done += n
    greedy = isinstance(policy, pol.Greedy)
    restart = policy.horizon if isinstance(policy, pol.Episodic) else 0
    return Trajectory(xs, as_, model.d, model.k, seed, ws if greedy else None, restart, pol.policy_hash(policy))


def _simulate_history(model, policy, d0, m, seed, rng) -> Trajectory:
    d, k = model.d, model.k
    cum_m = _cum(model.matrices)
    greedy = isinstance(policy, pol.Greedy)
    restart = policy.horizon if isinstance(policy, pol.Episodic) else 0
    cum_r = _cum(policy.restart.ravel()) if restart else None
    hist: list[tuple[int, int]] = []
    ws = np.zeros(m + 1, dtype=np.uint8)
    done = 0
    while done <= m:
        n = min(CHUNK, m + 1 - done)
        u = rng.random((n, 3))
        for r in range(n):
            i = done + r
            if i == 0:
                x, a, w = _initial_pair(model, policy, d0, u[0])
                ws[0] = w
                hist.append((x, a))
                continue
            x, a = hist[-1]
            u0, u1, u2 = u[r]
            if restart and i % restart == 0:
                x, a = divmod(_pick(cum_r, u0), k)
            else:
                x = _pick(cum_m[a, x], u0)
                if greedy and u2 < policy.upsilon:
                    a = min(int(u1 * k), k - 1)
                    ws[i] = 1
                elif greedy:
                    a = _pick(_cum(policy.base_probs(i, x, hist)), u1)
                else:
                    a = _pick(_cum(pol.control_probs(policy, i, x, hist)), u1)
            hist.append((x, a))
        done += n
    arr = np.asarray(hist, dtype=np.int32)
    return Trajectory(arr[:, 0], arr[:, 1], d, k, seed, ws if greedy else None, restart, pol.policy_hash(policy))


# ---- array-based sampler ----

def simulate_via_array_scheme(model: CmcModel, policy: pol.LoggingPolicy, d0=None, m: int = 1000,
                              seed: int = 0, rep: int | None = None) -> Trajectory:
    """Coupled sampler: next states are read off pre-filled arrays.

    For every control ``l`` and state ``s`` an i.i.d. row ``X^(l)[s, 0], X^(l)[s, 1], ...``
    with law ``M^(l)[s]`` is drawn up front. The ``n``-th visit to ``(s, l)``
    moves the chain to ``X^(l)[s, n - 1]``. Controls are fresh draws from the
    policy's conditional law given the history.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    _check_dims(model, policy)
    d, k = model.d, model.k
    rng = make_rng(seed, rep)
    cum_m = _cum(model.matrices)
    u = rng.random((k, d, m + 1))
    arrays = np.minimum((u[..., None] >= cum_m[:, :, None, :]).sum(axis=-1), d - 1)
    visits = np.zeros((d, k), dtype=np.int64)
    greedy = isinstance(policy, pol.Greedy)
    restart = policy.horizon if isinstance(policy, pol.Episodic) else 0
    cum_r = _cum(policy.restart.ravel()) if restart else None
    ws = np.zeros(m + 1, dtype=np.uint8)
    x, a, w = _initial_pair(model, policy, d0, rng.random(3))
    ws[0] = w
    hist = [(x, a)]
    for i in range(1, m + 1):
        visits[x, a] += 1
        uc, uw = rng.random(2)
        if restart and i % restart == 0:
            x, a = divmod(_pick(cum_r, uc), k)
        else:
            x = int(arrays[a, x, visits[x, a] - 1])
            if greedy and uw < policy.upsilon:
                a = min(int(uc * k), k - 1)
                ws[i] = 1
            elif greedy:
                a = _pick(_cum(policy.base_probs(i, x, hist)), uc)
            else:
                a = _pick(_cum(pol.control_probs(policy, i, x, hist)), uc)
        hist.append((x, a))
    arr = np.asarray(hist, dtype=np.int32)
    return Trajectory(arr[:, 0], arr[:, 1], d, k, seed, ws if greedy else None, restart, pol.policy_hash(policy))


# ---- vectorized replications (table policies only) ----

def _tables_for_batch(model, policy, m):
    tabs = []
    for i in range(m + 1):
        t = pol.markov_table(policy, i, model.d)
        if t is None:
            raise ValueError("batch samplers need a policy whose law ignores the history")
        tabs.append(_cum(t))
    return tabs


def _draw_rows(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    # cum has shape (n, c); returns the smallest j with u < cum[:, j]
    return np.minimum((u[:, None] >= cum).sum(axis=1), cum.shape[1] - 1)


def _batch_init(model, policy, d0, n_rep, rng):
    kind, law = resolve_d0(model, policy, d0)
    if kind == "pair":
        j = _draw_rows(np.broadcast_to(_cum(law.ravel()), (n_rep, model.d * model.k)), rng.random(n_rep))
        return j // model.k, j % model.k
    x = _draw_rows(np.broadcast_to(_cum(law), (n_rep, model.d)), rng.random(n_rep))
    return x, None


def simulate_batch(model: CmcModel, policy: pol.LoggingPolicy, d0=None, m: int = 3, n_rep: int = 1000,
                   seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """``n_rep`` independent direct-sampler paths as ``(n_rep, m + 1)`` arrays.

    One generator drives the whole batch, so paths are not those of
    :func:`simulate` for any single seed; the law is the same.
    """
    _check_dims(model, policy)
    rng = make_rng(seed)
    tabs = _tables_for_batch(model, policy, m)
    cum_m = _cum(model.matrices)
    xs = np.empty((n_rep, m + 1), dtype=np.int64)
    as_ = np.empty_like(xs)
    x, a = _batch_init(model, policy, d0, n_rep, rng)
    if a is None:
        a = _draw_rows(tabs[0][x], rng.random(n_rep))
    xs[:, 0], as_[:, 0] = x, a
    for i in range(1, m + 1):
        if pol.is_restart(policy, i):
            j = _draw_rows(np.broadcast_to(_cum(policy.restart.ravel()), (n_rep, model.d * model.k)),
                           rng.random(n_rep))
            x, a = j // model.k, j % model.k
        else:
            x = _draw_rows(cum_m[a, x], rng.random(n_rep))
            a = _draw_rows(tabs[i][x], rng.random(n_rep))
        xs[:, i], as_[:, i] = x, a
    return xs, as_


def simulate_array_scheme_batch(model: CmcModel, policy: pol.LoggingPolicy, d0=None, m: int = 3,
                                n_rep: int = 1000, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized counterpart of :func:`simulate_via_array_scheme`."""
    _check_dims(model, policy)
    d, k = model.d, model.k
    rng = make_rng(seed)
    tabs = _tables_for_batch(model, policy, m)
    cum_m = _cum(model.matrices)
    # arrays[r, l, s, n]: the n-th draw from row s of M^(l) for replication r
    u = rng.random((n_rep, k, d, m))
    arrays = np.minimum((u[..., None] >= cum_m[None, :, :, None, :]).sum(axis=-1), d - 1)
    visits = np.zeros((n_rep, d, k), dtype=np.int64)
    rows = np.arange(n_rep)
    xs = np.empty((n_rep, m + 1), dtype=np.int64)
    as_ = np.empty_like(xs)
    x, a = _batch_init(model, policy, d0, n_rep, rng)
    if a is None:
        a = _draw_rows(tabs[0][x], rng.random(n_rep))
    xs[:, 0], as_[:, 0] = x, a
    for i in range(1, m + 1):
        visits[rows, x, a] += 1
        if pol.is_restart(policy, i):
            j = _draw_rows(np.broadcast_to(_cum(policy.restart.ravel()), (n_rep, d * k)), rng.random(n_rep))
            x, a = j // k, j % k
        else:
            x = arrays[rows, a, x, visits[rows, x, a] - 1]
            a = _draw_rows(tabs[i][x], rng.random(n_rep))
        xs[:, i], as_[:, i] = x, a
    return xs, as_


def empirical_path_law(xs: np.ndarray, as_: np.ndarray, d: int, k: int) -> np.ndarray:
    """Frequencies of each path, indexed by the base-``dk`` code of its pairs."""
    codes = np.zeros(xs.shape[0], dtype=np.int64)
    for i in range(xs.shape[1]):
        codes = codes * (d * k) + xs[:, i] * k + as_[:, i]
    return np.bincount(codes, minlength=(d * k) ** xs.shape[1]) / xs.shape[0]


# ---- exact path laws ----

def _as_exact(v, exact: bool):
    return Fraction(float(v)) if exact else float(v)


def _d0_weight(kind, law, policy, x, a, exact):
    if kind == "pair":
        return _as_exact(law[x, a], exact)
    return _as_exact(law[x], exact) * _as_exact(pol.control_probs(policy, 0, x, ())[a], exact)


def exact_path_law(model: CmcModel, policy: pol.LoggingPolicy, d0=None, m: int = 2,
                   exact: bool = True) -> dict[tuple, Fraction | float]:
    """Law of the direct sampler over all paths of length ``m + 1`` by
    multiplying transition and control probabilities. Zero-mass paths are
    omitted. With ``exact`` every float input is converted to a Fraction."""
    _check_dims(model, policy)
    kind, law = resolve_d0(model, policy, d0)
    d, k = model.d, model.k
    out = {}
    layer = {}
    for x in range(d):
        for a in range(k):
            p = _d0_weight(kind, law, policy, x, a, exact)
            if p > 0:
                layer[((x, a),)] = p
    for i in range(1, m + 1):
        nxt = {}
        for path, p in layer.items():
            s, l = path[-1]
            for t in range(d):
                if pol.is_restart(policy, i):
                    cand = [(a, _as_exact(policy.restart[t, a], exact)) for a in range(k)]
                else:
                    mt = _as_exact(model.matrices[l, s, t], exact)
                    if mt == 0:
                        continue
                    probs = pol.control_probs(policy, i, t, path)
                    cand = [(a, mt * _as_exact(probs[a], exact)) for a in range(k)]
                for a, q in cand:
                    if q > 0:
                        nxt[path + ((t, a),)] = nxt.get(path + ((t, a),), 0) + p * q
        layer = nxt
    out.update(layer)
    return out


def exact_array_scheme_law(model: CmcModel, policy: pol.LoggingPolicy, d0=None, m: int = 2,
                           exact: bool = True) -> dict[tuple, Fraction | float]:
    """Law of the array sampler by branching on array cells as they are revealed.

    Each branch carries the revealed cells ``(l, s, n) -> t`` and the visit
    counts; a cell already revealed would be reused, an unrevealed one splits
    the branch over its law. Cells never read integrate out.
    """
    _check_dims(model, policy)
    kind, law = resolve_d0(model, policy, d0)
    d, k = model.d, model.k
    branches = []
    for x in range(d):
        for a in range(k):
            p = _d0_weight(kind, law, policy, x, a, exact)
            if p > 0:
                branches.append((((x, a),), {}, {}, p))
    for i in range(1, m + 1):
        nxt = []
        for path, cells, visits, p in branches:
            s, l = path[-1]
            visits = dict(visits)
            visits[(s, l)] = visits.get((s, l), 0) + 1
            if pol.is_restart(policy, i):
                for t in range(d):
                    for a in range(k):
                        q = _as_exact(policy.restart[t, a], exact)
                        if q > 0:
                            nxt.append((path + ((t, a),), cells, visits, p * q))
                continue
            key = (l, s, visits[(s, l)] - 1)
            if key in cells:
                outcomes = [(cells[key], 1)]
            else:
                outcomes = [(t, _as_exact(model.matrices[l, s, t], exact)) for t in range(d)]
            for t, q in outcomes:
                if q == 0:
                    continue
                new_cells = dict(cells)
                new_cells[key] = t
                probs = pol.control_probs(policy, i, t, path)
                for a in range(k):
                    r = _as_exact(probs[a], exact)
                    if r > 0:
                        nxt.append((path + ((t, a),), new_cells, visits, p * q * r))
        branches = nxt
    out: dict = {}
    for path, _, _, p in branches:
        out[path] = out.get(path, 0) + p
    return out


def path_law_tv(p: dict, q: dict):
    """Total variation distance between two path laws given as dicts."""
    keys = set(p) | set(q)
    return sum(abs(p.get(key, 0) - q.get(key, 0)) for key in keys) / 2


# ---- return times ----

@dataclass
class ReturnTimeStats:
    """Per-pair return times. ``times[s][l]`` lists ``tau^(1), tau^(2), ...``
    where ``tau^(1)`` is the first index ``n >= 1`` at the pair and later
    entries are gaps between consecutive visits. A visit at index 0 is only
    recorded in ``visited_at_zero``."""

    times: list
    visited_at_zero: np.ndarray
    mean: np.ndarray
    max: np.ndarray
    T_hat: float
    gap_mean: np.ndarray = field(default=None)


def return_times(traj: Trajectory) -> ReturnTimeStats:
    d, k = traj.d, traj.k
    codes = traj.states.astype(np.int64) * k + traj.controls
    order = np.argsort(codes[1:], kind="stable") + 1
    bounds = np.searchsorted(codes[order], np.arange(d * k + 1))
    times = [[None] * k for _ in range(d)]
    mean = np.full((d, k), np.nan)
    mx = np.zeros((d, k), dtype=np.int64)
    gap_mean = np.full((d, k), np.nan)
    for p in range(d * k):
        s, l = divmod(p, k)
        idx = order[bounds[p]:bounds[p + 1]]
        tau = np.diff(idx, prepend=0)
        times[s][l] = tau
        if len(tau):
            mean[s, l] = tau.mean()
            mx[s, l] = tau.max()
        if len(tau) > 1:
            gap_mean[s, l] = tau[1:].mean()
    zero = np.zeros((d, k), dtype=bool)
    zero[traj.states[0], traj.controls[0]] = True
    T_hat = float(np.nanmax(mean)) if np.any(np.isfinite(mean)) else float("inf")
    return ReturnTimeStats(times, zero, mean, mx, T_hat, gap_mean)


# ---- files ----

def trajectory_header(traj: Trajectory) -> dict:
    return {"d": traj.d, "k": traj.k, "m": traj.m, "seed": traj.seed, "policy_hash": traj.policy_hash,
            "restart_period": traj.restart_period, "rng": RNG_ALGORITHM, "backend": BACKEND}


def save_trajectory(traj: Trajectory, path) -> None:
    """``.npz`` (columnar, uint32 indices) or ``.csv`` (``i,X_i,a_i[,omega_i]``)."""
    path = Path(path)
    header = trajectory_header(traj)
    if path.suffix == ".csv":
        cols = [np.arange(traj.m + 1), traj.states, traj.controls]
        names = "i,X_i,a_i"
        if traj.omega is not None:
            cols.append(traj.omega)
            names += ",omega_i"
        with path.open("w") as fh:
            fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
            fh.write(names + "\n")
            np.savetxt(fh, np.column_stack(cols), fmt="%d", delimiter=",")
        return
    arrays = {"states": traj.states.astype(np.uint32), "controls": traj.controls.astype(np.uint32),
              "header": np.array(json.dumps(header, sort_keys=True))}
    if traj.omega is not None:
        arrays["omega"] = traj.omega
    with path.open("wb") as fh:
        np.savez_compressed(fh, **arrays)


def load_trajectory(path) -> Trajectory:
    path = Path(path)
    if path.suffix == ".csv":
        with path.open() as fh:
            first = fh.readline()
            header = json.loads(first[2:]) if first.startswith("#") else {}
            names = (fh.readline() if header else first).strip().split(",")
            data = np.loadtxt(fh, delimiter=",", dtype=np.int64, ndmin=2)
        col = {n: data[:, j] for j, n in enumerate(names)}
        d = header.get("d", int(col["X_i"].max()) + 1)
        k = header.get("k", int(col["a_i"].max()) + 1)
        return Trajectory(col["X_i"], col["a_i"], d, k, header.get("seed"), col.get("omega_i"),
                          header.get("restart_period", 0), header.get("policy_hash", ""))
    with np.load(path) as z:
        header = json.loads(str(z["header"]))
        omega = z["omega"] if "omega" in z.files else None
        return Trajectory(z["states"], z["controls"], header["d"], header["k"], header.get("seed"), omega,
                          header.get("restart_period", 0), header.get("policy_hash", ""))
