"""Small named instances used by the experiment runner and the test-suite."""

from __future__ import annotations

import numpy as np

from . import policies as pol
from .bounds import class_constants, markov_T_star, stationary_constants
from .hardness import block_class_constants, build_block_instance
from .model import CmcModel, paired_chain, stationary_distribution

M_D3K2 = np.array([
    [[0.5, 0.3, 0.2], [0.2, 0.5, 0.3], [0.3, 0.2, 0.5]],
    [[0.2, 0.3, 0.5], [0.5, 0.2, 0.3], [0.3, 0.5, 0.2]],
])
M_D2K2 = np.array([
    [[0.7, 0.3], [0.4, 0.6]],
    [[0.2, 0.8], [0.5, 0.5]],
])
BASE_D3K2 = np.array([[0.8, 0.2], [0.3, 0.7], [0.5, 0.5]])

BLOCK_IOTA = 0.3
BLOCK_EPS = 0.01

CLASSES = ("stationary", "inhomogeneous", "markov", "episodic", "greedy")


def stationary_d3k2() -> tuple[CmcModel, pol.StationaryRandomized]:
    return CmcModel.from_matrices(M_D3K2), pol.StationaryRandomized(np.full((3, 2), 0.5))


def stationary_d2k2() -> tuple[CmcModel, pol.StationaryRandomized]:
    return CmcModel.from_matrices(M_D2K2), pol.StationaryRandomized(np.full((2, 2), 0.5))


def class_instance(kind: str) -> tuple[CmcModel, pol.LoggingPolicy]:
    """One ``d = 3, k = 2`` instance per logging-policy class."""
    model = CmcModel.from_matrices(M_D3K2)
    if kind == "stationary":
        return model, pol.StationaryRandomized(BASE_D3K2)
    if kind == "inhomogeneous":
        return model, pol.DeterministicSchedule((0, 1, 1, 0, 1, 0), 2, periodic=True, window=4)
    if kind == "markov":
        tables = [BASE_D3K2, BASE_D3K2[:, ::-1], np.full((3, 2), 0.5)]
        return model, pol.NonStationaryMarkov(tables, periodic=True)
    if kind == "episodic":
        tables = [BASE_D3K2 if h % 2 == 0 else BASE_D3K2[:, ::-1] for h in range(5)]
        return model, pol.Episodic(5, tables)
    if kind == "greedy":
        return model, pol.Greedy(0.3, BASE_D3K2)
    raise KeyError(f"unknown class {kind!r}")


def class_constants_for(kind: str) -> dict:
    """Constants of the class instance, from the per-class formulas."""
    model, policy = class_instance(kind)
    mats = model.matrices
    if kind == "stationary":
        out = stationary_constants(model, policy.table)
        out["pi"] = out["pi"].tolist()
        return out
    if kind == "inhomogeneous":
        return class_constants(kind, M_min=mats.min(), M_max=mats.max(), window=policy.window)
    if kind == "markov":
        return class_constants(kind, M_min=mats.min(), M_max=mats.max(), T_star=markov_T_star(policy.tables),
                               d=model.d)
    if kind == "episodic":
        return class_constants(kind, d=model.d, k=model.k, H=policy.horizon, M_min=mats.min(), M_max=mats.max())
    if kind == "greedy":
        table = policy.upsilon / model.k + (1 - policy.upsilon) * policy.base
        pi = stationary_distribution(paired_chain(model, table))
        return class_constants(kind, upsilon=policy.upsilon, pi_star=float(pi.min()), k=model.k)
    raise KeyError(kind)


def appendix_block(d: int = 3, k: int = 2, iota: float = BLOCK_IOTA, eps: float = BLOCK_EPS):
    """Block lower-bound instance with its constants."""
    inst = build_block_instance(d, k, iota, eps)
    return inst, block_class_constants(d, k, iota)


def model_preset(name: str) -> tuple[CmcModel, pol.LoggingPolicy, object]:
    """``(model, policy, d0)`` for a preset name.

    Names: ``stationary-d3k2``, ``stationary-d2k2``, ``block-d3k2``,
    ``block-d6k2`` and ``class-<kind>`` for each policy class.
    """
    if name == "stationary-d3k2":
        return (*stationary_d3k2(), None)
    if name == "stationary-d2k2":
        return (*stationary_d2k2(), None)
    if name.startswith("block-d"):
        d, k = name[len("block-d"):].split("k")
        inst = build_block_instance(int(d), int(k), BLOCK_IOTA, BLOCK_EPS)
        return inst.model, inst.policy, inst.stationary_pairs()
    if name.startswith("class-"):
        return (*class_instance(name[len("class-"):]), None)
    raise KeyError(f"unknown preset {name!r}")


PRESET_NAMES = ("stationary-d3k2", "stationary-d2k2", "block-d3k2", "block-d6k2",
                *(f"class-{c}" for c in CLASSES))


# ---- small instances for exact mixing computations ----

def counterexample_chain() -> tuple[CmcModel, pol.DeterministicSchedule]:
    """Four states in two halves; control 0 keeps the half, control 1 swaps it,
    and the controls alternate ``0, 1, 0, 1, ...``."""
    h = np.array([[0.5, 0.5, 0, 0], [0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5], [0, 0, 0.5, 0.5]])
    return CmcModel.from_matrices([h, h[[2, 3, 0, 1]]]), pol.DeterministicSchedule((0, 1), 2, periodic=True)


def iid_states(d: int = 2, k: int = 2) -> CmcModel:
    """Every control draws the next state uniformly."""
    return CmcModel.from_matrices(np.full((k, d, d), 1.0 / d))


def _sticky(stay: float, k: int):
    def law(i, x, history):
        p = np.full(k, (1 - stay) / (k - 1))
        p[history[-1][1] if history else 0] = stay
        return p
    return law


def iid_sticky_greedy(d: int = 2, k: int = 2, upsilon: float = 0.5, stay: float = 0.9):
    """I.i.d. uniform states with greedy controls whose base rule repeats the
    previous control with probability ``stay``."""
    return iid_states(d, k), pol.Greedy(upsilon, _sticky(stay, k), k)


def iid_independent(d: int = 2, k: int = 2):
    """I.i.d. uniform states with i.i.d. controls."""
    return iid_states(d, k), pol.StationaryRandomized(np.full((d, k), 1.0 / k))
