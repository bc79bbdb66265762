import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmcest import mixing as mx
from cmcest import policies as pol
from cmcest.model import CmcModel
from cmcest.presets import CLASSES, class_instance, counterexample_chain, iid_independent, iid_sticky_greedy
from cmcest.simulate import exact_path_law

DYADIC = CmcModel.from_matrices([[[0.75, 0.25], [0.375, 0.625]]])
ONE = pol.StationaryRandomized(np.ones((2, 1)))


def _future_law(law, cond, j):
    """Conditional law of paths[j:] given the prefix ``cond`` (a dict-keyed oracle)."""
    out, tot = {}, Fraction(0)
    for path, p in law.items():
        if path[:len(cond)] == cond:
            key = path[j:]
            out[key] = out.get(key, 0) + p
            tot += p
    return {key: v / tot for key, v in out.items()} if tot else None


def _tv(p, q):
    return sum(abs(p.get(key, 0) - q.get(key, 0)) for key in set(p) | set(q)) / 2


def oracle_eta_phi(law, m):
    """Brute force over prefix histories with rational arithmetic."""
    pairs = sorted({y for path in law for y in path})
    eta = {}
    phi = {}
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            marg = _future_law(law, (), j)
            best_e, best_p = Fraction(0), Fraction(0)
            for head in itertools.product(pairs, repeat=i):
                conds = [c for c in (_future_law(law, head + (y,), j) for y in pairs) if c is not None]
                for a, b in itertools.combinations(conds, 2):
                    best_e = max(best_e, _tv(a, b))
                for c in conds:
                    best_p = max(best_p, _tv(c, marg))
            eta[i, j], phi[i, j] = best_e, best_p
    return eta, phi


def test_eta_and_phi_match_rational_oracle_d2_k1_m4():
    m = 4
    law = exact_path_law(DYADIC, ONE, [0.5, 0.5], m)
    eta_o, phi_o = oracle_eta_phi(law, m)
    eta = mx.compute_eta_bar(DYADIC, ONE, [0.5, 0.5], m, exact=True)
    phi = mx.compute_phi(DYADIC, ONE, [0.5, 0.5], m, exact=True)
    for (i, j), v in eta_o.items():
        assert eta[i, j] == v
        assert phi[i, j] == phi_o[i, j]
    # float mode agrees with the exact values
    eta_f = mx.compute_eta_bar(DYADIC, ONE, [0.5, 0.5], m)
    for (i, j), v in eta_o.items():
        assert abs(eta_f[i, j] - float(v)) < 1e-12


def test_single_state_is_mixing_free():
    model = CmcModel.from_matrices([[[1.0]]])
    p = pol.StationaryRandomized(np.ones((1, 1)))
    r = mx.mixing_report(model, p, None, 4)
    for arr in (r.eta_bar, r.phi, r.theta_bar):
        assert np.nanmax(arr) == 0
    assert r.delta_norm == 1


@pytest.mark.parametrize("policy", [
    pol.StationaryRandomized([[0.3, 0.7], [0.6, 0.4]]),
    pol.DeterministicSchedule((0, 1, 1), 2),
])
def test_gamma_vanishes_for_history_free_controls(policy):
    model = CmcModel.from_matrices([[[0.7, 0.3], [0.4, 0.6]], [[0.2, 0.8], [0.5, 0.5]]])
    g = mx.compute_gamma(model, policy, None, 4)
    assert np.nanmax(g) < 1e-15


def _episode_law(i_local, x, episode):
    last = episode[-1][1] if episode else 0
    return [0.8, 0.2] if last == x else [0.3, 0.7]


def test_episodic_gamma_vanishes_beyond_horizon():
    H, m = 2, 6
    model = CmcModel.from_matrices([[[0.7, 0.3], [0.4, 0.6]], [[0.2, 0.8], [0.5, 0.5]]])
    policy = pol.Episodic(H, np.full((2, 2), 0.5), [[0.1, 0.2], [0.3, 0.4]], law=_episode_law)
    g = mx.compute_gamma(model, policy, None, m)
    nonzero = 0
    for i in range(m + 1):
        for gap in range(1, m + 1 - i):
            for p in range(i + gap, m + 1):
                if p > i + gap + H:
                    assert g[p, gap, i] < 1e-15
                elif g[p, gap, i] > 1e-6:
                    nonzero += 1
    assert nonzero > 0


def test_counterexample_chain_coefficients():
    model, policy = counterexample_chain()
    r = mx.mixing_report(model, policy, None, 3, exact=True)
    for i in range(4):
        for j in range(i + 1, 4):
            assert r.theta_bar[i, j] == 1
            assert r.phi[i, j] >= Fraction(1, 2)


def test_iid_states_theta_zero():
    model, policy = iid_independent()
    th = mx.compute_theta_bar(model, policy, None, 4, exact=True)
    assert all(th[i, j] == 0 for i in range(5) for j in range(i + 1, 5))
    model, policy = iid_sticky_greedy()
    th = mx.compute_theta_bar(model, policy, None, 4, exact=True)
    assert all(th[i, j] == 0 for i in range(5) for j in range(i + 1, 5))
    # the controls still carry memory
    assert mx.compute_eta_bar(model, policy, None, 4)[0, 1] > 0


def test_markov_theta_geometric_bound():
    base = np.array([[0.5, 0.3, 0.2], [0.2, 0.5, 0.3], [0.3, 0.2, 0.5]])
    model = CmcModel.from_matrices([base, base[:, [2, 0, 1]]])
    policy = pol.NonStationaryMarkov([[[0.5, 0.5]] * 3, [[0.9, 0.1], [0.2, 0.8], [0.5, 0.5]]], periodic=True)
    m = 6
    th = mx.compute_theta_bar(model, policy, None, m)
    M_min = model.matrices.min()
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            assert th[i, j] <= mx.theta_geometric_bound(M_min, 3, i, j) + mx.SLACK


def test_delta_norm_examples():
    assert mx.delta_norm(np.zeros((5, 5))) == 1
    rng = np.random.default_rng(3)
    eta = np.triu(rng.random((6, 6)), 1)
    direct = max(1 + eta[i, i + 1:].sum() for i in range(1, 6))
    assert mx.delta_norm(eta) == pytest.approx(direct)


@pytest.mark.parametrize("kind", CLASSES)
def test_delta_norm_below_constants(kind):
    model, policy = class_instance(kind)
    r = mx.mixing_report(model, policy, None, 4, any_history=False)
    C, C_theta = mx.mixing_constants(r.gamma, r.theta_bar)
    assert r.delta_norm <= C + C_theta + 1 + mx.SLACK


@pytest.mark.parametrize("kind", CLASSES)
def test_eta_below_gamma_theta_sum(kind):
    model, policy = class_instance(kind)
    m = 4
    r = mx.mixing_report(model, policy, None, m, any_history=False)
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            assert r.eta_bar[i, j] <= mx.eta_bound_rhs(r.gamma, r.theta_bar, i, j) + mx.SLACK


@pytest.mark.parametrize("kind", CLASSES)
def test_sandwich_on_class_instances(kind):
    model, policy = class_instance(kind)
    r = mx.mixing_report(model, policy, None, 4)
    assert r.sandwich_violations() == []
    assert r.sandwich_violations(any_history=True) == []


def test_covariance_stated_form_on_counterexample_chain():
    model, policy = counterexample_chain()
    m = 3
    P = mx.path_law(model, policy, None, m)
    phi = mx.compute_phi(model, policy, None, m)
    # f = g = indicator of the first half of the states, on pair codes
    ind = np.repeat([1.0, 1.0, 0.0, 0.0], 2)
    for form in ("stated", "hall-heyde"):
        assert all(mx.check_covariance_inequality(P, ind, ind, i, j, phi, form=form)
                   for i in range(m) for j in range(i + 1, m + 1))


def test_covariance_stated_form_can_fail():
    # start in state 1 w.p. 1/2; state 0 moves to either state evenly, state 1 is absorbing.
    # With f = g = 1[state 1]: Cov = 1/8, phi = 1/4, E|f - Ef| = 3/8, so the stated
    # bound is 3/32 < 1/8, while 2 phi E|g| sup|f| = 1/4 holds.
    model = CmcModel.from_matrices([[[0.5, 0.5], [0.0, 1.0]]])
    P = mx.path_law(model, ONE, [0.5, 0.5], 1, exact=True)
    phi = mx.compute_phi(model, ONE, [0.5, 0.5], 1, exact=True)
    assert phi[0, 1] == Fraction(1, 4)
    f = np.array([0.0, 1.0])
    cov, terms = mx.covariance_terms(P, f, f, 0, 1)
    assert cov == pytest.approx(1 / 8) and terms["E|f-Ef|"] == pytest.approx(3 / 8)
    assert not mx.check_covariance_inequality(P, f, f, 0, 1, phi)
    assert mx.check_covariance_inequality(P, f, f, 0, 1, phi, form="hall-heyde")


def test_covariance_independent_coordinates():
    model, policy = iid_independent()
    P = mx.path_law(model, policy, None, 3)
    phi = mx.compute_phi(model, policy, None, 3)
    f = np.array([1.0, -2.0, 0.5, 3.0])
    cov, _ = mx.covariance_terms(P, f, f, 0, 2)
    assert abs(cov) < 1e-15
    assert mx.check_covariance_inequality(P, f, f, 0, 2, phi)


@pytest.mark.parametrize("target", [(0, 0), (2, 1)])
def test_indicator_inequality_on_small_chain(target):
    model, policy = class_instance("stationary")
    m = 3
    P = mx.path_law(model, policy, None, m)
    phi = mx.compute_phi(model, policy, None, m)
    f = np.zeros(6)
    f[target[0] * 2 + target[1]] = 1.0
    for i in range(m):
        for j in range(i + 1, m + 1):
            assert mx.check_covariance_inequality(P, f, f, i, j, phi)


@settings(max_examples=60)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4), st.integers(1, 4), st.integers(2, 4))
def test_tv_chain_rule(seed, nx, ny, nz):
    rng = np.random.default_rng(seed)
    joint = rng.random((nx, ny, nz)) * (rng.random((nx, ny, nz)) > 0.3)
    for z1 in range(nz):
        for z2 in range(nz):
            if joint[:, :, z1].sum() == 0 or joint[:, :, z2].sum() == 0:
                continue
            lhs, rhs = mx.tv_chain_rule_sides(joint, z1, z2)
            assert lhs <= rhs + 1e-12


@pytest.mark.parametrize("kind", ["stationary", "greedy", "episodic"])
def test_indicator_process_mixes_no_worse(kind):
    model, policy = class_instance(kind)
    m = 4
    P = mx.path_law(model, policy, None, m)
    phi = mx._phi_from_law(P, m, False)
    for s in range(model.d):
        for l in range(model.k):
            ind = mx.indicator_phi(P, s, l, model.k)
            for i in range(m + 1):
                for j in range(i + 1, m + 1):
                    assert ind[i, j] <= phi[i, j] + mx.SLACK


def test_enumeration_cap():
    model, policy = class_instance("stationary")
    with pytest.raises(mx.TooLarge):
        mx.path_law(model, policy, None, 12)
    assert mx.enumerable(3, 2, 5, 10 ** 5) and not mx.enumerable(3, 2, 6, 10 ** 5)


def test_report_serialization():
    model, policy = class_instance("stationary")
    r = mx.mixing_report(model, policy, None, 3)
    obj = r.to_dict()
    assert obj["eta_bar"][0][0] is None and obj["m"] == 3
    rows = r.rows()
    assert len(rows) == 6 and set(rows[0]) == {"i", "j", "eta_bar", "phi", "theta_bar", "eta_bar_any"}
