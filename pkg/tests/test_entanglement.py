"""Tests for reduced states, the entropy curve and the Schmidt diagnostics."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from akqubits.core import StateVector, ket, random_qubit_state, von_neumann_entropy
from akqubits.entanglement import (
    EntropyPoint,
    apparatus_reduced_density,
    entanglement_entropy,
    entropy_closed_form,
    maximally_entangled_state,
    reduced_determinant,
    reduced_system_density,
    schmidt_orthogonality_defect,
)
from akqubits.interaction import THETA_MINUS, THETA_PLUS, evolve

LN2 = math.log(2.0)


def closed_form_rho(psi, theta):
    """Oracle: the reduced system matrix entry by entry."""
    a, b = psi.amplitudes
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    rho00 = c2 * abs(a) ** 2 + (s2 / 3.0) * (1.0 + abs(b) ** 2)
    rho11 = c2 * abs(b) ** 2 + (s2 / 3.0) * (1.0 + abs(a) ** 2)
    rho01 = (c2 - s2 / 3.0) * a * b.conjugate()
    return np.array([[rho00, rho01], [rho01.conjugate(), rho11]])


class TestReducedDensity:
    def test_theta_zero_is_input_projector(self):
        rng = np.random.default_rng(61)
        psi = random_qubit_state(rng)
        rho = reduced_system_density(psi, 0.0)
        assert_allclose(rho.matrix, np.outer(psi.amplitudes, psi.amplitudes.conj()), atol=1e-14)

    def test_entries_match_closed_form(self):
        rng = np.random.default_rng(62)
        for theta in (0.3, math.pi / 4, THETA_PLUS, 2.0, THETA_MINUS):
            psi = random_qubit_state(rng)
            rho = reduced_system_density(psi, theta)
            assert_allclose(rho.matrix, closed_form_rho(psi, theta), atol=1e-12)

    def test_maximally_mixed_at_pi_over_3(self):
        rng = np.random.default_rng(63)
        rho = reduced_system_density(random_qubit_state(rng), THETA_PLUS)
        assert_allclose(rho.eigenvalues(), [0.5, 0.5], atol=1e-12)

    def test_ket0_pi_over_4_corner(self):
        rho = reduced_system_density(ket("0"), math.pi / 4)
        assert rho.matrix[0, 0].real == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_determinant_matches_closed_form(self):
        rng = np.random.default_rng(64)
        for theta in np.linspace(0.0, math.pi, 40):
            rho = reduced_system_density(random_qubit_state(rng), theta)
            det = np.linalg.det(rho.matrix).real
            assert abs(det - reduced_determinant(theta)) < 1e-12


class TestEntropy:
    def test_product_state_at_theta_zero(self):
        rng = np.random.default_rng(65)
        point = entanglement_entropy(random_qubit_state(rng), 0.0)
        assert point.entropy_nats == pytest.approx(0.0, abs=1e-12)
        assert point.lam == pytest.approx(0.0, abs=1e-12)

    def test_ln2_at_pi_over_3(self):
        rng = np.random.default_rng(66)
        point = entanglement_entropy(random_qubit_state(rng), THETA_PLUS)
        assert abs(point.entropy_nats - LN2) < 1e-12
        assert point.lam == pytest.approx(0.5, abs=1e-10)

    def test_pi_over_4_value(self):
        # lam (1 - lam) = 2/9 solves to lam = 1/3
        rng = np.random.default_rng(67)
        point = entanglement_entropy(random_qubit_state(rng), math.pi / 4)
        assert point.lam == pytest.approx(1.0 / 3.0, abs=1e-10)
        expected = math.log(3.0) - (2.0 / 3.0) * LN2
        assert abs(point.entropy_nats - expected) < 1e-10

    def test_state_independent(self):
        rng = np.random.default_rng(68)
        theta = 1.1
        values = [
            entanglement_entropy(random_qubit_state(rng), theta).entropy_nats
            for _ in range(20)
        ]
        assert max(values) - min(values) < 1e-10

    def test_system_and_apparatus_sides_agree(self):
        rng = np.random.default_rng(69)
        for theta in (0.4, THETA_PLUS, 2.3):
            psi = random_qubit_state(rng)
            s_sys = entanglement_entropy(psi, theta).entropy_nats
            s_app = von_neumann_entropy(apparatus_reduced_density(psi, theta))
            assert abs(s_sys - s_app) < 1e-10


class TestEntropyClosedForm:
    def test_endpoints(self):
        p0 = entropy_closed_form(0.0)
        assert (p0.lam, p0.entropy_nats) == (0.0, 0.0)
        p3 = entropy_closed_form(THETA_PLUS)
        # lam solves a quadratic whose root is sqrt-sensitive at the
        # maximum; the entropy is quadratically flat there and stays exact
        assert p3.lam == pytest.approx(0.5, abs=1e-7)
        assert abs(p3.entropy_nats - LN2) < 1e-12

    def test_pi_over_2(self):
        point = entropy_closed_form(math.pi / 2)
        assert point.lam == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_matches_simulation_on_grid(self):
        rng = np.random.default_rng(70)
        for theta in np.linspace(0.0, math.pi, 50):
            psi = random_qubit_state(rng)
            sim = entanglement_entropy(psi, theta)
            closed = entropy_closed_form(theta)
            assert abs(sim.entropy_nats - closed.entropy_nats) < 1e-10
            assert abs(sim.lam - closed.lam) < 1e-8

    def test_symmetries(self):
        for theta in (0.3, 0.9, 1.4):
            e = entropy_closed_form(theta).entropy_nats
            assert abs(e - entropy_closed_form(-theta).entropy_nats) < 1e-12
            assert abs(e - entropy_closed_form(math.pi - theta).entropy_nats) < 1e-12

    def test_never_exceeds_ln2(self):
        for theta in np.linspace(0.0, math.pi, 200):
            assert entropy_closed_form(theta).entropy_nats <= LN2 + 1e-12

    def test_point_invariant(self):
        point = entropy_closed_form(0.8)
        assert isinstance(point, EntropyPoint)
        d = reduced_determinant(0.8)
        assert abs(point.lam * (1.0 - point.lam) - d) < 1e-10


class TestSchmidtDefect:
    def test_matches_amplitude_oracle(self):
        rng = np.random.default_rng(71)
        for theta in (0.0, 0.5, math.pi / 4, THETA_PLUS, 2.4):
            psi = random_qubit_state(rng)
            a, b = psi.amplitudes
            oracle = (4.0 / 3.0) * abs(math.cos(theta) ** 2 - 0.25) * abs(a) * abs(b)
            defect = schmidt_orthogonality_defect(psi, theta)
            assert abs(defect.value - oracle) < 1e-12
            assert not defect.z_eigenstate_input

    def test_zero_exactly_at_maximal_angles(self):
        rng = np.random.default_rng(72)
        for theta in (THETA_PLUS, THETA_MINUS, 2 * math.pi / 3):
            defect = schmidt_orthogonality_defect(random_qubit_state(rng), theta)
            assert defect.value < 1e-12

    def test_nonzero_away_from_maximal_angles(self):
        psi = StateVector(np.array([1.0, 1.0]) / math.sqrt(2))
        assert schmidt_orthogonality_defect(psi, THETA_PLUS + 0.05).value > 1e-6

    def test_theta_zero_superposition(self):
        psi = StateVector(np.array([1.0, 1.0]) / math.sqrt(2))
        assert schmidt_orthogonality_defect(psi, 0.0).value == pytest.approx(0.5, abs=1e-12)

    def test_z_eigenstate_flag(self):
        defect = schmidt_orthogonality_defect(ket("0"), 0.7)
        assert defect.z_eigenstate_input
        assert defect.value < 1e-12


class TestMaximallyEntangledState:
    def test_equals_evolution_both_signs(self):
        rng = np.random.default_rng(73)
        for sign, theta in ((+1, THETA_PLUS), (-1, THETA_MINUS)):
            psi = random_qubit_state(rng)
            built = maximally_entangled_state(psi, sign)
            assert_allclose(built.amplitudes, evolve(psi, theta).amplitudes, atol=1e-12)

    def test_reduced_state_maximally_mixed(self):
        rng = np.random.default_rng(74)
        built = maximally_entangled_state(random_qubit_state(rng), +1)
        rho = reduced_system_density(random_qubit_state(rng), THETA_PLUS)
        assert_allclose(rho.eigenvalues(), [0.5, 0.5], atol=1e-12)
        assert_allclose(np.linalg.norm(built.amplitudes), 1.0, atol=1e-12)

    def test_rejects_bad_sign(self):
        with pytest.raises(ValueError):
            maximally_entangled_state(ket("0"), 2)
