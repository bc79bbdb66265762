import importlib

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmcest import policies as pol
from cmcest.estimate import CountTable, count, estimate, estimation_error, sup_error
from cmcest.model import CmcModel, DimensionMismatch
from cmcest.presets import CLASSES, M_D3K2, class_instance

sim = importlib.import_module("cmcest.simulate")
Trajectory = sim.Trajectory


def reference_fold(states, controls, d, k, restart=0):
    visits = np.zeros((d, k), dtype=np.int64)
    trans = np.zeros((k, d, d), dtype=np.int64)
    m = len(states) - 1
    for i in range(1, m + 1):
        visits[states[i], controls[i]] += 1
        if i < m and not (restart and (i + 1) % restart == 0):
            trans[controls[i], states[i], states[i + 1]] += 1
    return visits, trans


def test_hand_counts():
    c = count(Trajectory([0, 1, 0, 1], [0, 0, 0, 0], 2, 1))
    assert c.visits[0, 0] == 1 and c.visits[1, 0] == 2
    assert c.transitions[0, 0, 1] == 1 and c.transitions[0, 1, 0] == 1
    assert c.transitions.sum() == 2


def test_constant_path():
    c = count(Trajectory([0] * 6, [0] * 6, 1, 1))
    assert c.visits[0, 0] == 5 and c.transitions[0, 0, 0] == 4


def test_count_needs_two_pairs():
    with pytest.raises(ValueError):
        count(Trajectory([0], [0], 2, 1))


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 200), st.integers(0, 4))
def test_counts_match_reference_fold(seed, n, restart):
    rng = np.random.default_rng(seed)
    d, k = 3, 2
    x, a = rng.integers(0, d, n), rng.integers(0, k, n)
    c = count(Trajectory(x, a, d, k, restart_period=restart if restart > 1 else 0))
    v, t = reference_fold(x, a, d, k, restart if restart > 1 else 0)
    assert np.array_equal(c.visits, v) and np.array_equal(c.transitions, t)
    # every visit has at most one observed successor
    gap = c.visits - c.transitions.sum(axis=2).T
    assert np.all(gap >= 0)
    if restart <= 1:
        assert gap.sum() == 1


def test_merge_is_addition():
    rng = np.random.default_rng(0)
    x, a = rng.integers(0, 3, 50), rng.integers(0, 2, 50)
    c = count(Trajectory(x, a, 3, 2))
    both = c.merge(c)
    assert np.array_equal(both.visits, 2 * c.visits) and np.array_equal(both.transitions, 2 * c.transitions)


def test_alternating_chain_recovered_exactly():
    model = CmcModel.from_matrices([[[0.0, 1.0], [1.0, 0.0]]])
    t = sim.simulate(model, pol.StationaryRandomized(np.ones((2, 1))), [1.0, 0.0], m=100, seed=0)
    est = estimate(count(t))
    assert np.array_equal(est.matrices[0], [[0.0, 1.0], [1.0, 0.0]])
    assert est.undefined_rows == []


def test_unvisited_rows_are_uniform_and_flagged():
    t = Trajectory([0, 0, 0, 0], [0, 0, 0, 0], 3, 2)
    est = estimate(count(t))
    assert est.matrices[0, 0].tolist() == [1.0, 0.0, 0.0]
    np.testing.assert_array_equal(est.matrices[1], np.full((3, 3), 1 / 3))
    assert est.undefined_rows == [(0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 300))
def test_defined_rows_are_distributions(seed, n):
    rng = np.random.default_rng(seed)
    t = Trajectory(rng.integers(0, 4, n), rng.integers(0, 3, n), 4, 3)
    est = estimate(count(t))
    assert np.all(est.matrices >= 0)
    np.testing.assert_allclose(est.matrices.sum(axis=2), 1.0, atol=1e-12)


def test_error_zero_at_truth():
    model = CmcModel.from_matrices(M_D3K2)
    err, rows = estimation_error(model.matrices, model)
    assert err == 0 and np.all(rows == 0)


def test_compensated_perturbation():
    model = CmcModel.from_matrices(M_D3K2)
    delta = 0.05
    mats = model.matrices.copy()
    mats[1, 2, 0] += delta
    mats[1, 2, 2] -= delta
    err, rows = estimation_error(mats, model)
    assert err == pytest.approx(2 * delta)
    assert rows[2, 1] == pytest.approx(2 * delta)


def test_error_dimension_mismatch():
    model = CmcModel.from_matrices(M_D3K2)
    with pytest.raises(DimensionMismatch):
        estimation_error(np.ones((1, 3, 3)) / 3, model)


@given(st.integers(0, 2 ** 32 - 1))
def test_error_matches_double_loop(seed):
    rng = np.random.default_rng(seed)
    k, d = 2, 3
    truth = CmcModel.from_matrices(M_D3K2)
    est = rng.random((k, d, d))
    best = 0.0
    for l in range(k):
        for s in range(d):
            total = 0.0
            for t in range(d):
                total += abs(est[l, s, t] - truth.matrices[l, s, t])
            best = max(best, total)
    assert estimation_error(est, truth)[0] == pytest.approx(best, abs=1e-14)


def test_ergodic_instance_error_at_one_million():
    model = CmcModel.from_matrices(M_D3K2)
    policy = pol.StationaryRandomized(np.full((3, 2), 0.5))
    errs = [sup_error(sim.simulate(model, policy, m=1_000_000, seed=0, rep=r), model) for r in range(20)]
    assert np.median(errs) < 0.01


@pytest.mark.parametrize("kind", CLASSES)
def test_median_error_nonincreasing_in_m(kind):
    model, policy = class_instance(kind)
    meds = []
    for m in (10 ** 3, 10 ** 4, 10 ** 5):
        meds.append(np.median([sup_error(sim.simulate(model, policy, m=m, seed=1, rep=r), model)
                               for r in range(20)]))
    assert meds[0] >= meds[1] >= meds[2]


def test_estimate_json_roundtrip(tmp_path):
    from cmcest.estimate import save_estimate
    from cmcest.model import load_model
    t = Trajectory([0, 1, 0, 1, 1], [0, 0, 1, 1, 0], 2, 2)
    est = estimate(count(t))
    path = tmp_path / "est.json"
    save_estimate(est, path)
    back = load_model(path)
    np.testing.assert_array_equal(back.matrices, est.matrices)
