import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmcest import policies as pol
import importlib

sim = importlib.import_module("cmcest.simulate")
from cmcest.estimate import count
from cmcest.model import CmcModel, stationary_distribution, paired_chain
from cmcest.presets import M_D3K2, class_instance, CLASSES
from cmcest.hardness import build_block_instance

FLIP = CmcModel.from_matrices([[[0.0, 1.0], [1.0, 0.0]]])
ONE = pol.StationaryRandomized(np.ones((2, 1)))

M1 = [[0, 1, 0], [1 / 3, 1 / 3, 1 / 3], [1 / 3, 1 / 3, 1 / 3]]
M2 = [[1 / 3, 1 / 3, 1 / 3], [0, 0, 1], [1 / 3, 1 / 3, 1 / 3]]
M3 = [[1 / 3, 1 / 3, 1 / 3], [1 / 3, 1 / 3, 1 / 3], [1, 0, 0]]


@pytest.mark.parametrize("backend", [None, "python", "history"])
def test_alternating_chain(backend):
    t = sim.simulate(FLIP, ONE, [1.0, 0.0], m=20, seed=3, backend=backend)
    assert t.states.tolist() == [i % 2 for i in range(21)]


def test_array_scheme_on_deterministic_chain():
    for seed in range(5):
        a = sim.simulate_via_array_scheme(FLIP, ONE, [1.0, 0.0], m=15, seed=seed)
        b = sim.simulate(FLIP, ONE, [1.0, 0.0], m=15, seed=seed)
        assert a.states.tolist() == b.states.tolist()


def test_cyclic_schedule_becomes_periodic():
    model = CmcModel.from_matrices([M1, M2, M3])
    policy = pol.DeterministicSchedule((0, 1, 2), 3)
    t = sim.simulate(model, policy, [1.0, 0, 0], m=30, seed=0)
    assert t.states.tolist() == [i % 3 for i in range(31)]
    for seed in range(20):
        t = sim.simulate(model, policy, None, m=300, seed=seed)
        # once X_i = i mod 3 the path never leaves the cycle
        on = np.nonzero(t.states == np.arange(301) % 3)[0]
        assert len(on)
        assert np.all(t.states[on[0]:] == np.arange(on[0], 301) % 3)


def test_transition_frequencies_within_3_sigma():
    model = CmcModel.from_matrices(M_D3K2)
    policy = pol.StationaryRandomized(np.full((3, 2), 0.5))
    t = sim.simulate(model, policy, m=1_000_000, seed=11)
    c = count(t)
    n = c.transitions.sum(axis=2, keepdims=True)
    freq = c.transitions / n
    sd = np.sqrt(model.matrices * (1 - model.matrices) / n)
    assert np.all(np.abs(freq - model.matrices) < 3 * sd + 1e-12)


def test_array_scheme_tv_d2_k1_m3():
    model = CmcModel.from_matrices([[[0.7, 0.3], [0.4, 0.6]]])
    policy = pol.StationaryRandomized(np.ones((2, 1)))
    n = 1_000_000
    xs, as_ = sim.simulate_batch(model, policy, None, 3, n, seed=1)
    ys, bs = sim.simulate_array_scheme_batch(model, policy, None, 3, n, seed=2)
    p = sim.empirical_path_law(xs, as_, 2, 1)
    q = sim.empirical_path_law(ys, bs, 2, 1)
    assert len(p) == 16
    assert 0.5 * np.abs(p - q).sum() < 0.01
    # both also sit close to the exact law
    exact = sim.exact_path_law(model, policy, None, 3, exact=False)
    e = np.zeros(16)
    for path, w in exact.items():
        code = 0
        for x, _ in path:
            code = code * 2 + x
        e[code] = w
    assert 0.5 * np.abs(p - e).sum() < 0.01


def test_exact_array_law_equals_direct_law_d2_k2():
    # dyadic entries so the Fraction law sums to one exactly
    model = CmcModel.from_matrices([[[0.75, 0.25], [0.5, 0.5]], [[0.125, 0.875], [0.5, 0.5]]])
    policy = pol.StationaryRandomized([[0.25, 0.75], [0.625, 0.375]])
    direct = sim.exact_path_law(model, policy, None, 2)
    arr = sim.exact_array_scheme_law(model, policy, None, 2)
    assert sim.path_law_tv(direct, arr) == 0
    assert sum(direct.values()) == 1
    # spot-check one path by hand: X0=0,a0=1 -> X1=1,a1=0 -> X2=0,a2=1
    from fractions import Fraction as F
    w = F(1, 2) * F(3, 4) * F(7, 8) * F(5, 8) * F(1, 2) * F(3, 4)
    assert direct[((0, 1), (1, 0), (0, 1))] == w


def _small_instances():
    m2 = [[[0.7, 0.3], [0.4, 0.6]], [[0.2, 0.8], [0.5, 0.5]]]
    model = CmcModel.from_matrices(m2)
    yield model, pol.StationaryRandomized([[0.3, 0.7], [0.9, 0.1]])
    yield model, pol.DeterministicSchedule((0, 1, 1), 2)
    yield model, pol.NonStationaryMarkov([[[1, 0], [0.5, 0.5]], [[0.2, 0.8], [0.7, 0.3]]])
    yield model, pol.Episodic(2, [[[0.5, 0.5], [1, 0]], [[0.1, 0.9], [0.4, 0.6]]], [[0.1, 0.2], [0.3, 0.4]])
    yield model, pol.Greedy(0.4, [[0.8, 0.2], [0.3, 0.7]])
    m3 = CmcModel.from_matrices(M_D3K2)
    yield m3, pol.Greedy(0.5, lambda i, x, h: [0.9, 0.1] if not h or h[-1][1] == 0 else [0.2, 0.8], 2)


@pytest.mark.parametrize("inst", list(_small_instances()), ids=lambda i: type(i[1]).__name__)
@pytest.mark.parametrize("m", [1, 2, 3])
def test_samplers_agree_in_law_exactly(inst, m):
    model, policy = inst
    if model.d * model.k > 6:
        pytest.skip("outside d*k <= 6")
    direct = sim.exact_path_law(model, policy, None, m)
    arr = sim.exact_array_scheme_law(model, policy, None, m)
    assert sim.path_law_tv(direct, arr) == 0


def test_return_times_simple_path():
    t = sim.Trajectory([0, 1, 0], [0, 0, 0], 2, 1)
    r = sim.return_times(t)
    # the visit at index 0 is kept apart; tau(1) is the hit at index 2
    assert r.visited_at_zero[0, 0]
    assert r.times[0][0].tolist() == [2]
    assert r.times[1][0].tolist() == [1]


def test_return_times_gap_after_first_hit():
    t = sim.Trajectory([1, 0, 1, 0, 1], [0, 0, 0, 0, 0], 2, 1)
    r = sim.return_times(t)
    assert r.times[0][0].tolist() == [1, 2]
    assert r.times[1][0].tolist() == [2, 2]


def test_alternating_return_times_are_two():
    t = sim.simulate(FLIP, ONE, [1.0, 0.0], m=101, seed=0)
    r = sim.return_times(t)
    for s in range(2):
        assert np.all(r.times[s][0][1:] == 2)
    assert r.max[0, 0] == 2


def test_unvisited_pair_has_empty_list():
    t = sim.Trajectory([0, 0, 0], [0, 0, 0], 2, 2)
    r = sim.return_times(t)
    assert len(r.times[1][1]) == 0 and np.isnan(r.mean[1, 1])


def test_kac_mean_return_time_block_instance():
    inst = build_block_instance(3, 2, 0.3, 0.01)
    pi = stationary_distribution(paired_chain(inst.model, inst.policy.table))
    t = sim.simulate(inst.model, inst.policy, inst.stationary_pairs(), m=1_000_000, seed=5)
    r = sim.return_times(t)
    np.testing.assert_allclose(r.gap_mean.ravel(), 1 / pi, rtol=0.05)


def test_return_counts_match_visits():
    model, policy = class_instance("stationary")
    t = sim.simulate(model, policy, m=5000, seed=1)
    r = sim.return_times(t)
    c = count(t)
    for s in range(3):
        for l in range(2):
            assert len(r.times[s][l]) == c.visits[s, l]
            assert np.all(r.times[s][l] >= 1)


@pytest.mark.parametrize("kind", CLASSES)
def test_seed_determinism_and_backend_equality(kind):
    model, policy = class_instance(kind)
    a = sim.simulate(model, policy, m=20_000, seed=9, rep=2)
    b = sim.simulate(model, policy, m=20_000, seed=9, rep=2)
    c = sim.simulate(model, policy, m=20_000, seed=9, rep=2, backend="python")
    assert np.array_equal(a.states, b.states) and np.array_equal(a.controls, b.controls)
    assert np.array_equal(a.states, c.states) and np.array_equal(a.controls, c.controls)
    d = sim.simulate(model, policy, m=20_000, seed=9, rep=3)
    assert not np.array_equal(a.states, d.states)


@pytest.mark.parametrize("kind", CLASSES)
def test_history_backend_matches_kernel(kind):
    model, policy = class_instance(kind)
    a = sim.simulate(model, policy, m=3000, seed=4)
    h = sim.simulate(model, policy, m=3000, seed=4, backend="history")
    assert np.array_equal(a.states, h.states) and np.array_equal(a.controls, h.controls)


def test_markov_property_chi_square():
    model = CmcModel.from_matrices([[[0.5, 0.3, 0.2], [0.2, 0.5, 0.3], [0.3, 0.2, 0.5]]])
    policy = pol.StationaryRandomized(np.ones((3, 1)))
    x = sim.simulate(model, policy, m=1_000_000, seed=21).states.astype(np.int64)
    triples = np.bincount(x[:-2] * 9 + x[1:-1] * 3 + x[2:], minlength=27).reshape(3, 3, 3)
    crit = 13.277  # chi-square 0.99 quantile with (3-1)(3-1) = 4 degrees of freedom
    for mid in range(3):
        tab = triples[:, mid, :].astype(float)
        exp = tab.sum(1, keepdims=True) * tab.sum(0, keepdims=True) / tab.sum()
        stat = ((tab - exp) ** 2 / exp).sum()
        assert stat < crit


@settings(max_examples=25)
@given(st.integers(1, 300), st.integers(0, 2 ** 31), st.sampled_from(CLASSES))
def test_visit_counts_sum_to_m(m, seed, kind):
    model, policy = class_instance(kind)
    t = sim.simulate(model, policy, m=m, seed=seed)
    assert len(t.states) == m + 1
    assert count(t).visits.sum() == m if m >= 1 else True


@pytest.mark.parametrize("suffix", [".csv", ".npz"])
def test_trajectory_file_roundtrip(tmp_path, suffix):
    model, policy = class_instance("greedy")
    t = sim.simulate(model, policy, m=500, seed=1)
    path = tmp_path / f"t{suffix}"
    sim.save_trajectory(t, path)
    back = sim.load_trajectory(path)
    assert np.array_equal(back.states, t.states) and np.array_equal(back.omega, t.omega)
    assert (back.d, back.k, back.seed, back.policy_hash) == (t.d, t.k, t.seed, t.policy_hash)


def test_episodic_restart_is_recorded():
    model, policy = class_instance("episodic")
    t = sim.simulate(model, policy, m=50, seed=0)
    assert t.restart_period == 5
    assert t.breaks()[5] and not t.breaks()[4]


def test_explicit_schedule_too_short():
    with pytest.raises(ValueError):
        sim.simulate(FLIP.__class__.from_matrices([[[0.5, 0.5], [0.5, 0.5]]] * 2),
                     pol.DeterministicSchedule((0, 1), 2, periodic=False), m=5)
