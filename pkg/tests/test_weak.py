import math

import numpy as np
import pytest
from scipy.linalg import expm

from weaktension.errors import BasisMismatch, InvalidParameter, OrthogonalPostselection
from weaktension.hilbert import (
    DensityOperator,
    StateVector,
    pauli,
    qubit,
    transition_probability,
)
from weaktension.sampling import random_density, random_observable, random_state
from weaktension.weak import (
    action_profile,
    conditional,
    curvature_bound_check,
    direct_response,
    imaginary_response_check,
    max_overlap_probability,
    mixed_response_bound_check,
    optimal_unitary,
    predict_response,
    reconstruct_wavefunction,
    reconstruction_fidelity,
    spectral_weak_value,
    weak_conditional,
    weak_conditional_mixed,
    weak_value,
)

Z = pauli("z")


def random_triple(rng, dmin=2, dmax=8, min_overlap=1e-3):
    while True:
        d = int(rng.integers(dmin, dmax + 1))
        i, f, obs = random_state(rng, d), random_state(rng, d), random_observable(rng, d)
        if transition_probability(i, f) > min_overlap:
            return i, f, obs


def complex_cumulants(dist, obs):
    a = obs.eigenvalues
    mu = [np.dot(a**k, dist.values) for k in (1, 2, 3)]
    return mu[0], mu[1] - mu[0] ** 2, mu[2] - 3 * mu[1] * mu[0] + 2 * mu[0] ** 3


class TestWeakValue:
    def test_eigenstate(self):
        assert weak_value(qubit("0"), qubit("0"), Z) == 1

    def test_octant_is_minus_i(self, octant):
        i, f, obs = octant
        assert abs(weak_value(i, f, obs) - (-1j)) < 1e-15

    def test_plus_to_zero(self):
        assert abs(weak_value(qubit("+"), qubit("0"), Z) - 1) < 1e-15

    def test_orthogonal_postselection(self):
        with pytest.raises(OrthogonalPostselection):
            weak_value(qubit("+"), qubit("-"), Z)
        with pytest.raises(OrthogonalPostselection):
            weak_conditional(qubit("0"), qubit("1"), Z)


class TestWeakConditional:
    def test_equal_states_give_born_rule(self):
        dist = weak_conditional(qubit("+"), qubit("+"), Z)
        assert np.allclose(dist.values, [0.5, 0.5], atol=1e-15)
        assert np.all(dist.values.imag == 0)

    def test_octant_values(self, octant):
        dist = weak_conditional(*octant)
        assert abs(dist.values[0] - (1 - 1j) / 2) < 1e-15
        assert abs(dist.values[1] - (1 + 1j) / 2) < 1e-15
        assert dist.base_probability == pytest.approx(0.5, abs=1e-15)
        assert dist.source == "pure"

    def test_eigenstate_preparation(self, rng):
        basis = random_observable(rng, 4)
        i = basis.eigenbasis[2]
        dist = weak_conditional(i, random_state(rng, 4), basis)
        assert np.allclose(dist.values, [0, 0, 1, 0], atol=1e-12)

    def test_mixed_matches_pure(self, octant):
        i, f, obs = octant
        mixed = weak_conditional_mixed(DensityOperator.from_state(i), f, obs)
        assert np.allclose(mixed.values, weak_conditional(i, f, obs).values, atol=1e-15)
        assert mixed.source == "mixed"

    def test_maximally_mixed(self):
        dist = weak_conditional_mixed(DensityOperator.maximally_mixed(2), qubit("+"), Z)
        assert np.allclose(dist.values, [0.5, 0.5], atol=1e-15)

    def test_diagonal_density(self):
        rho = DensityOperator([[0.75, 0], [0, 0.25]])
        dist = weak_conditional_mixed(rho, qubit("+"), Z)
        assert np.allclose(dist.values, [0.75, 0.25], atol=1e-15)

    def test_mixed_orthogonal(self):
        with pytest.raises(OrthogonalPostselection):
            weak_conditional_mixed(DensityOperator.from_state(qubit("0")), qubit("1"), Z)


class TestActions:
    def test_octant(self, octant):
        prof = action_profile(weak_conditional(*octant))
        assert prof.actions[0] == pytest.approx(-math.pi / 4, abs=1e-15)
        assert prof.actions[1] == pytest.approx(math.pi / 4, abs=1e-15)
        assert prof.defined_mask.all()

    def test_real_positive(self):
        prof = action_profile(weak_conditional(qubit("+"), qubit("0"), Z))
        assert np.all(prof.actions == 0)

    def test_zero_entry_masked(self):
        dist = weak_conditional(qubit("0"), qubit("+"), Z)
        prof = action_profile(dist)
        assert list(prof.defined_mask) == [True, False]
        assert prof.actions[1] == 0


class TestOptimalUnitary:
    def test_octant(self, octant):
        i, f, obs = octant
        dist = weak_conditional(i, f, obs)
        u = optimal_unitary(dist, obs)
        expected = np.diag([np.exp(1j * math.pi / 4), np.exp(-1j * math.pi / 4)])
        assert np.max(np.abs(u - expected)) < 1e-15
        assert abs(np.vdot(f.amplitudes, u @ i.amplitudes)) ** 2 == pytest.approx(1, abs=1e-12)
        assert max_overlap_probability(dist) == pytest.approx(1, abs=1e-12)

    def test_real_dist_gives_identity(self):
        dist = weak_conditional(qubit("+"), qubit("0"), Z)
        assert np.allclose(optimal_unitary(dist, Z), np.eye(2), atol=1e-15)
        assert max_overlap_probability(dist) == pytest.approx(0.5, abs=1e-15)

    def test_i_equals_f_already_maximal(self, rng):
        s = random_state(rng, 5)
        dist = weak_conditional(s, s, random_observable(rng, 5))
        assert max_overlap_probability(dist) == pytest.approx(dist.base_probability, abs=1e-12)

    def test_basis_mismatch(self, octant):
        dist = weak_conditional(*octant)
        with pytest.raises(BasisMismatch):
            optimal_unitary(dist, pauli("x"))
        with pytest.raises(BasisMismatch):
            predict_response(dist, pauli("x"), 0.1)

    def test_random_triples(self, rng):
        for _ in range(200):
            i, f, obs = random_triple(rng)
            dist = weak_conditional(i, f, obs)
            u = optimal_unitary(dist, obs)
            assert np.max(np.abs(u.conj().T @ u - np.eye(obs.dim))) < 1e-10
            p_max = max_overlap_probability(dist)
            assert abs(abs(np.vdot(f.amplitudes, u @ i.amplitudes)) ** 2 - p_max) < 1e-10
            assert dist.base_probability - 1e-12 <= p_max <= 1 + 1e-10
            for _ in range(50):
                theta = rng.uniform(-math.pi, math.pi, size=obs.dim)
                alt = abs(np.dot(np.exp(1j * theta), dist.values)) ** 2 * dist.base_probability
                assert alt <= p_max + 1e-10


class TestResponse:
    @pytest.mark.parametrize("phi,expected", [(math.pi / 4, 0.0), (-math.pi / 4, 1.0), (0.3, (1 - math.sin(0.6)) / 2)])
    def test_octant_closed_form(self, octant, phi, expected):
        i, f, obs = octant
        dist = weak_conditional(i, f, obs)
        assert predict_response(dist, obs, phi) == pytest.approx(expected, abs=1e-15)
        assert direct_response(i, f, obs, phi) == pytest.approx(expected, abs=1e-15)

    def test_zero_phase_exact(self, rng):
        for _ in range(20):
            i, f, obs = random_triple(rng)
            dist = weak_conditional(i, f, obs)
            assert predict_response(dist, obs, 0.0) == dist.base_probability
            assert direct_response(i, f, obs, 0.0) == pytest.approx(transition_probability(i, f), abs=1e-14)

    def test_maximally_mixed_invariant(self, rng):
        rho = DensityOperator.maximally_mixed(2)
        phis = rng.uniform(-10, 10, size=20)
        assert np.allclose(direct_response(rho, random_state(rng, 2), Z, phis), 0.5, atol=1e-15)

    def test_direct_matches_expm_oracle(self, rng):
        for _ in range(50):
            i, f, obs = random_triple(rng)
            phi = rng.uniform(-2 * math.pi, 2 * math.pi)
            u = expm(-1j * phi * obs.matrix())
            expected = abs(np.vdot(f.amplitudes, u @ i.amplitudes)) ** 2
            assert direct_response(i, f, obs, phi) == pytest.approx(expected, abs=1e-12)

    def test_array_and_scalar_agree(self, octant):
        i, f, obs = octant
        dist = weak_conditional(i, f, obs)
        phis = np.linspace(-1, 1, 7)
        arr = predict_response(dist, obs, phis)
        assert [predict_response(dist, obs, p) for p in phis] == pytest.approx(list(arr), abs=1e-15)


class TestMixedBound:
    def test_pure_equality_on_grid(self, octant):
        i, f, obs = octant
        curve = mixed_response_bound_check(DensityOperator.from_state(i), f, obs, np.linspace(-math.pi, math.pi, 41))
        assert curve.satisfied.all()
        assert curve.max_deviation < 1e-10

    def test_maximally_mixed(self):
        phis = np.linspace(-math.pi, math.pi, 41)
        curve = mixed_response_bound_check(DensityOperator.maximally_mixed(2), qubit("+"), Z, phis)
        assert np.allclose(curve.predicted, 0.5 * np.cos(phis) ** 2, atol=1e-15)
        assert np.allclose(curve.direct, 0.5, atol=1e-15)
        assert curve.satisfied.all()
        assert curve.predicted[20] == pytest.approx(0.5, abs=1e-15)
        assert curve.direct[20] == pytest.approx(0.5, abs=1e-15)

    def test_random_mixed(self, rng):
        for _ in range(500):
            d = int(rng.integers(2, 9))
            rho, f, obs = random_density(rng, d), random_state(rng, d), random_observable(rng, d)
            curve = mixed_response_bound_check(rho, f, obs, rng.uniform(-2 * math.pi, 2 * math.pi, size=3))
            assert curve.satisfied.all()


class TestImaginaryResponse:
    def test_octant(self, octant):
        res = imaginary_response_check(*octant, h=1e-3)
        assert res.weak_imag == pytest.approx(-1, abs=1e-15)
        assert res.error < 1e-5

    def test_eigenstate(self):
        res = imaginary_response_check(qubit("0"), qubit("0"), Z)
        assert res.weak_imag == 0 and res.finite_diff == 0

    def test_real_dist(self):
        res = imaginary_response_check(qubit("+"), qubit("0"), Z)
        assert res.weak_imag == 0
        assert abs(res.finite_diff) < 1e-12

    def test_step_range(self, octant):
        with pytest.raises(InvalidParameter):
            imaginary_response_check(*octant, h=0.1)
        with pytest.raises(InvalidParameter):
            imaginary_response_check(*octant, h=1e-7)

    def test_truncation_is_third_cumulant(self, rng):
        # half log p is Re K(-i phi), K the cumulant generating function of A
        # under p(m|if), so the central difference is off by -(h^2/6) Im kappa_3
        h = 1e-3
        for _ in range(200):
            i, f, obs = random_triple(rng, min_overlap=0.05)
            res = imaginary_response_check(i, f, obs, h=h)
            _, _, k3 = complex_cumulants(weak_conditional(i, f, obs), obs)
            predicted = -(h**2 / 6) * k3.imag
            assert abs((res.finite_diff - res.weak_imag) - predicted) < 1e-3 * abs(predicted) + 1e-9

    def test_second_order_convergence(self, rng):
        ratios = []
        while len(ratios) < 20:
            i, f, obs = random_triple(rng, min_overlap=0.05)
            _, _, k3 = complex_cumulants(weak_conditional(i, f, obs), obs)
            if abs(k3.imag) < 1e-2:
                continue
            e1 = imaginary_response_check(i, f, obs, h=4e-3).error
            e2 = imaginary_response_check(i, f, obs, h=2e-3).error
            ratios.append(e1 / e2)
        assert all(3.5 <= r <= 4.5 for r in ratios), ratios

    def test_time_symmetry(self, rng):
        for _ in range(100):
            i, f, obs = random_triple(rng)
            forward = weak_conditional(i, f, obs).values
            backward = weak_conditional(f, i, obs).values
            assert np.max(np.abs(forward.real - backward.real)) < 1e-10
            assert np.max(np.abs(forward.imag + backward.imag)) < 1e-10


class TestCurvature:
    def test_octant_equality(self, octant):
        res = curvature_bound_check(*octant)
        assert abs(res.bound) < 1e-15
        assert abs(res.second_deriv) < 1e-6
        assert res.satisfied

    def test_eigenstate(self):
        res = curvature_bound_check(qubit("0"), qubit("0"), Z)
        assert res.bound == 0 and abs(res.second_deriv) < 1e-9

    def test_maximally_mixed_strict(self):
        res = curvature_bound_check(DensityOperator.maximally_mixed(2), qubit("+"), Z)
        assert res.bound == pytest.approx(-1, abs=1e-15)
        assert abs(res.second_deriv) < 1e-9
        assert res.satisfied

    def test_pure_equality_random(self, rng):
        for _ in range(100):
            i, f, obs = random_triple(rng, min_overlap=0.05)
            res = curvature_bound_check(i, f, obs)
            assert abs(res.second_deriv - res.bound) < 1e-5 * max(1, abs(res.bound))

    def test_mixed_random(self, rng):
        for _ in range(500):
            d = int(rng.integers(2, 9))
            rho, f, obs = random_density(rng, d), random_state(rng, d), random_observable(rng, d)
            assert curvature_bound_check(rho, f, obs).satisfied


class TestRandomizedInvariants:
    def test_normalization_pure_and_mixed(self, rng):
        for _ in range(200):
            i, f, obs = random_triple(rng)
            assert abs(weak_conditional(i, f, obs).total() - 1) < 1e-10
            rho = random_density(rng, obs.dim)
            assert abs(weak_conditional_mixed(rho, f, obs).total() - 1) < 1e-10

    def test_spectral_consistency(self, rng):
        for _ in range(200):
            i, f, obs = random_triple(rng)
            dist = weak_conditional(i, f, obs)
            assert abs(weak_value(i, f, obs) - spectral_weak_value(dist, obs)) < 1e-10 * max(1, abs(weak_value(i, f, obs)))

    def test_mixed_dispatch(self, rng):
        rho = random_density(rng, 3)
        f, obs = random_state(rng, 3), random_observable(rng, 3)
        assert conditional(rho, f, obs).source == "mixed"

    def test_degenerate_eigenvalues_sum_per_vector(self):
        obs = pauli("z").__class__([1, 1, -1], np.eye(3))
        i, f = StateVector([1, 1j, 1]), StateVector([1, 1, 1])
        dist = weak_conditional(i, f, obs)
        phis = np.linspace(-3, 3, 11)
        assert np.allclose(predict_response(dist, obs, phis), direct_response(i, f, obs, phis), atol=1e-12)


class TestReconstruction:
    def test_basis_state(self):
        amps = reconstruct_wavefunction(qubit("0"), Z)
        assert abs(amps[1]) < 1e-15 and abs(amps[0]) > 0

    def test_plus_i(self):
        amps = reconstruct_wavefunction(qubit("+i"), Z)
        assert amps[1] / amps[0] == pytest.approx(1j, abs=1e-15)
        assert reconstruction_fidelity(amps, qubit("+i"), Z) > 1 - 1e-12

    def test_orthogonal_to_uniform(self):
        with pytest.raises(OrthogonalPostselection):
            reconstruct_wavefunction(qubit("-"), Z)

    def test_random_qutrits(self, rng):
        for _ in range(20):
            basis = random_observable(rng, 3)
            i = random_state(rng, 3)
            amps = reconstruct_wavefunction(i, basis)
            assert reconstruction_fidelity(amps, i, basis) > 1 - 1e-10
