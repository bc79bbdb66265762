import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmcest.model import (CmcModel, DimensionMismatch, NegativeEntryError, NotErgodic, RowSumError, load_model,
                          paired_chain, save_model, stationary_distribution, validate_model)
from conftest import random_stochastic

THIRD = 1 / 3
M1 = [[0, 1, 0], [THIRD, THIRD, THIRD], [THIRD, THIRD, THIRD]]
M2 = [[THIRD, THIRD, THIRD], [0, 0, 1], [THIRD, THIRD, THIRD]]
M3 = [[THIRD, THIRD, THIRD], [THIRD, THIRD, THIRD], [1, 0, 0]]


def test_aperiodicity_example_matrices_are_valid():
    m = validate_model(CmcModel.from_matrices([M1, M2, M3]))
    assert (m.d, m.k) == (3, 3)


def test_identity_is_valid():
    for d in (1, 2, 5):
        validate_model(CmcModel.from_matrices(np.eye(d)))


def test_bad_row_sum():
    with pytest.raises(RowSumError):
        CmcModel.from_matrices([[0.5, 0.6], [0.5, 0.5]])


def test_row_sum_tolerance_edge():
    CmcModel.from_matrices([[0.5, 0.5 + 5e-13], [0.5, 0.5]])
    with pytest.raises(RowSumError):
        CmcModel.from_matrices([[0.5, 0.5 + 1e-11], [0.5, 0.5]])


def test_negative_entry():
    with pytest.raises(NegativeEntryError):
        CmcModel.from_matrices([[1.5, -0.5], [0.5, 0.5]])


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        CmcModel.from_matrices(np.full((2, 2, 3), 1 / 3))
    with pytest.raises(DimensionMismatch):
        validate_model(CmcModel(3, 1, np.full((1, 2, 2), 0.5)))


def test_stationary_of_block_example():
    # d = 3 block matrix with iota = 0.3, xi = (1), eps = 0.02
    M = np.array([[0.3, 0.36, 0.34], [0.3, 0.7, 0.0], [0.3, 0.0, 0.7]])
    np.testing.assert_allclose(stationary_distribution(M), [0.3, 0.36, 0.34], atol=1e-10)


def test_stationary_of_J_is_uniform():
    np.testing.assert_allclose(stationary_distribution(np.full((4, 4), 0.25)), 0.25, atol=1e-14)


def test_stationary_matches_eigensolver(rng):
    for _ in range(5):
        M = random_stochastic(rng, 5, 5)
        w, v = np.linalg.eig(M.T)
        ref = np.real(v[:, np.argmin(np.abs(w - 1))])
        ref /= ref.sum()
        np.testing.assert_allclose(stationary_distribution(M), ref, atol=1e-9)


def test_not_ergodic():
    with pytest.raises(NotErgodic):
        # period 2 with a non-uniform law, so iteration from uniform oscillates
        stationary_distribution(np.array([[0, 1, 0], [0.5, 0, 0.5], [0, 1, 0]]), max_iter=1000)


def test_paired_chain_trivial():
    m = CmcModel.from_matrices([[1.0]])
    np.testing.assert_array_equal(paired_chain(m, [[1.0]]), [[1.0]])


def test_paired_chain_k1_collapse():
    M = np.array([[0.3, 0.7], [0.6, 0.4]])
    np.testing.assert_allclose(paired_chain(CmcModel.from_matrices(M), np.ones((2, 1))), M)


def test_paired_chain_entries_by_hand(rng):
    mats = random_stochastic(rng, 2, 2, 2)
    P = random_stochastic(rng, 2, 2)
    K = paired_chain(CmcModel.from_matrices(mats), P)
    for s in range(2):
        for l in range(2):
            for t in range(2):
                for l2 in range(2):
                    assert K[s * 2 + l, t * 2 + l2] == pytest.approx(mats[l, s, t] * P[t, l2], abs=1e-15)
    np.testing.assert_allclose(K.sum(axis=1), 1, atol=1e-12)


@given(st.integers(1, 5), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_paired_chain_is_stochastic(d, k, seed):
    g = np.random.default_rng(seed)
    K = paired_chain(CmcModel.from_matrices(random_stochastic(g, k, d, d)), random_stochastic(g, d, k))
    np.testing.assert_allclose(K.sum(axis=1), 1, atol=1e-12)


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_stationary_is_fixed_point(d, seed):
    M = random_stochastic(np.random.default_rng(seed), d, d)
    pi = stationary_distribution(M)
    assert np.abs(pi @ M - pi).max() <= 1e-10
    assert abs(pi.sum() - 1) < 1e-12


def test_json_roundtrip(tmp_path):
    m = CmcModel.from_matrices([M1, M2])
    save_model(m, tmp_path / "m.json")
    assert json.loads((tmp_path / "m.json").read_text())["k"] == 2
    back = load_model(tmp_path / "m.json")
    np.testing.assert_array_equal(back.matrices, m.matrices)
