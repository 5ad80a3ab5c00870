"""Tests for the teleportation branches, corrections, recycling and maps."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from akqubits.core import (
    PAULI,
    Qubit,
    StateVector,
    is_unitary,
    ket,
    outcome_probability,
    pauli_on,
    random_qubit_state,
)
from akqubits.interaction import THETA_MINUS, THETA_PLUS
from akqubits.teleport import (
    CORRECTIONS,
    Branch,
    KrausPair,
    UnreachableBranchError,
    branch_decomposition,
    branch_probabilities_closed_form,
    first_beam_corrections,
    first_beam_projections,
    first_beam_subbranch_probabilities,
    imperfection_measure,
    kraus_completeness_gap,
    kraus_maps,
    run_protocol_forced,
    run_protocol_once,
    run_protocol_recycling,
)


class SeqRNG:
    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


class TestCorrections:
    def test_explicit_matrices(self):
        sq2 = math.sqrt(2.0)
        assert_allclose(CORRECTIONS.u1, np.array([[1, -1j], [-1, -1j]]) / sq2)
        assert_allclose(CORRECTIONS.u2, np.array([[1, 1j], [1, -1j]]) / sq2)
        assert_allclose(CORRECTIONS.u1_prime, PAULI["z"] @ CORRECTIONS.u1)
        assert_allclose(CORRECTIONS.u2_prime, PAULI["z"] @ CORRECTIONS.u2)
        assert_allclose(CORRECTIONS.u3, PAULI["z"])
        assert_allclose(CORRECTIONS.u4, PAULI["x"])

    def test_all_unitary(self):
        for u in (
            CORRECTIONS.u1,
            CORRECTIONS.u2,
            CORRECTIONS.u1_prime,
            CORRECTIONS.u2_prime,
            CORRECTIONS.u3,
            CORRECTIONS.u4,
        ):
            assert is_unitary(u)

    def test_sign_selection(self):
        up, um = first_beam_corrections(+1)
        assert up is CORRECTIONS.u1 and um is CORRECTIONS.u2
        up, um = first_beam_corrections(-1)
        assert up is CORRECTIONS.u1_prime and um is CORRECTIONS.u2_prime
        with pytest.raises(ValueError):
            first_beam_corrections(0)


class TestBranch:
    def test_beam_mapping(self):
        assert Branch(+1, +1, +1).beam == 1
        assert Branch(+1, -1).beam == 2
        assert Branch(-1, +1).beam == 3

    def test_forbidden_combination(self):
        with pytest.raises(UnreachableBranchError):
            Branch(-1, -1)

    def test_z_reading_validation(self):
        with pytest.raises(ValueError):
            Branch(+1, +1)  # first beam without a z reading
        with pytest.raises(ValueError):
            Branch(+1, -1, +1)  # z reading outside the first beam

    def test_constructors_and_str(self):
        assert str(Branch.first(-1)) == "1"
        assert str(Branch.second()) == "2"
        assert str(Branch.third()) == "3"


class TestBranchDecomposition:
    def test_closed_form_probabilities(self):
        rng = np.random.default_rng(81)
        for theta in (0.4, math.pi / 4, THETA_PLUS, 2.1):
            expected = branch_probabilities_closed_form(theta)
            for _ in range(5):
                dec = branch_decomposition(random_qubit_state(rng), theta)
                assert_allclose((dec.p1, dec.p2, dec.p3), expected, atol=1e-12)
                assert abs(dec.p1 + dec.p2 + dec.p3 - 1.0) < 1e-12

    def test_maximal_angle_quarters(self):
        rng = np.random.default_rng(82)
        for theta in (THETA_PLUS, THETA_MINUS):
            dec = branch_decomposition(random_qubit_state(rng), theta)
            assert_allclose((dec.p1, dec.p2, dec.p3), (0.5, 0.25, 0.25), atol=1e-12)

    def test_pi_over_4(self):
        dec = branch_decomposition(ket("0"), math.pi / 4)
        assert_allclose((dec.p1, dec.p2, dec.p3), (2 / 3, 1 / 6, 1 / 6), atol=1e-12)

    def test_theta_zero_degenerate(self):
        dec = branch_decomposition(ket("0"), 0.0)
        assert_allclose((dec.p1, dec.p2, dec.p3), (1.0, 0.0, 0.0), atol=1e-14)
        assert dec.branch_states[0] is not None
        assert dec.branch_states[1] is None and dec.branch_states[2] is None

    def test_forbidden_probability_vanishes(self):
        rng = np.random.default_rng(83)
        for theta in np.linspace(0.0, math.pi, 30):
            dec = branch_decomposition(random_qubit_state(rng), theta)
            assert dec.forbidden_probability < 1e-14

    def test_carrier_meter_reads_plus_one_in_recycling_beams(self):
        rng = np.random.default_rng(84)
        y2 = pauli_on(Qubit.A2, "y", 4)
        for theta in (0.3, 1.0, THETA_PLUS, 2.5):
            dec = branch_decomposition(random_qubit_state(rng), theta)
            for state in dec.branch_states[1:]:
                p = outcome_probability(state, y2, +1)
                assert abs(p - 1.0) < 1e-12


class TestSubbranchProbabilities:
    def test_even_split_at_maximal_angles(self):
        rng = np.random.default_rng(85)
        for _ in range(20):
            p_plus, p_minus = first_beam_subbranch_probabilities(
                random_qubit_state(rng), THETA_PLUS
            )
            assert abs(p_plus - 0.5) < 1e-12 and abs(p_minus - 0.5) < 1e-12

    def test_theta_zero_reads_input(self):
        assert first_beam_subbranch_probabilities(ket("0"), 0.0)[0] == pytest.approx(1.0)
        plus = StateVector(np.array([1.0, 1.0]) / math.sqrt(2))
        p_plus, p_minus = first_beam_subbranch_probabilities(plus, 0.0)
        assert abs(p_plus - 0.5) < 1e-12


class TestForcedRuns:
    def test_first_beam_fidelity_both_signs(self):
        rng = np.random.default_rng(86)
        for sign in (+1, -1):
            for z_p in (+1, -1):
                for _ in range(25):
                    psi = random_qubit_state(rng)
                    res = run_protocol_forced(psi, sign, beam=1, z_p=z_p)
                    assert res.is_carrier and res.branch.beam == 1
                    f = abs(np.vdot(psi.amplitudes, res.state.amplitudes)) ** 2
                    assert f >= 1.0 - 1e-10

    def test_first_beam_exact_phases(self):
        # under this basis convention the corrected carrier is exactly
        # psi, except for an overall -1 when sign=-1 and the z reading is -1
        rng = np.random.default_rng(87)
        psi = random_qubit_state(rng)
        for sign, z_p, phase in (
            (+1, +1, 1.0),
            (+1, -1, 1.0),
            (-1, +1, 1.0),
            (-1, -1, -1.0),
        ):
            res = run_protocol_forced(psi, sign, beam=1, z_p=z_p)
            assert_allclose(res.state.amplitudes, phase * psi.amplitudes, atol=1e-12)

    def test_recycling_beams_exact_phases(self):
        rng = np.random.default_rng(88)
        psi = random_qubit_state(rng)
        for sign, phase in ((+1, -1j), (-1, 1j)):
            for beam in (2, 3):
                res = run_protocol_forced(psi, sign, beam=beam)
                assert not res.is_carrier and res.branch.beam == beam
                assert_allclose(res.state.amplitudes, phase * psi.amplitudes, atol=1e-12)

    def test_recycling_beams_work_at_any_angle(self):
        # those branch amplitudes are angle-independent up to scale
        rng = np.random.default_rng(89)
        for theta in (0.2, 1.0, 2.8):
            psi = random_qubit_state(rng)
            for beam in (2, 3):
                res = run_protocol_forced(psi, +1, beam=beam, theta=theta)
                f = abs(np.vdot(psi.amplitudes, res.state.amplitudes)) ** 2
                assert f >= 1.0 - 1e-10

    def test_forced_validation(self):
        with pytest.raises(ValueError):
            run_protocol_forced(ket("0"), +1, beam=1)  # missing z_p
        with pytest.raises(ValueError):
            run_protocol_forced(ket("0"), +1, beam=4)


class TestSampledRuns:
    def test_consumes_three_draws_and_matches_forced(self):
        rng = np.random.default_rng(90)
        psi = random_qubit_state(rng)
        seq = SeqRNG([0.0, 0.0, 0.0])  # forces +1, +1, +1
        res = run_protocol_once(psi, +1, seq)
        assert seq.values == []
        forced = run_protocol_forced(psi, +1, beam=1, z_p=+1)
        assert res.branch == forced.branch
        assert_allclose(res.state.amplitudes, forced.state.amplitudes, atol=1e-12)

    def test_beam_two_path(self):
        psi = random_qubit_state(np.random.default_rng(91))
        # P(y_a3 = -1 | y_a1 = +1) = (1/4) / (3/4) = 1/3 at the protocol angle
        res = run_protocol_once(psi, +1, SeqRNG([0.0, 0.99, 0.0]))
        assert res.branch.beam == 2 and not res.is_carrier

    def test_sampled_fidelity(self):
        rng = np.random.default_rng(92)
        for sign in (+1, -1):
            for _ in range(50):
                psi = random_qubit_state(rng)
                out = run_protocol_recycling(psi, sign, rng)
                assert not out.truncated
                assert out.fidelity_vs_input >= 1.0 - 1e-10
                assert out.path[-1].beam == 1
                assert all(b.beam in (2, 3) for b in out.path[:-1])
                assert out.rounds_used == len(out.path)

    def test_truncation(self):
        psi = random_qubit_state(np.random.default_rng(93))
        seq = SeqRNG([0.0, 0.99, 0.0] * 3)  # beam 2 every round
        out = run_protocol_recycling(psi, +1, seq, max_rounds=3)
        assert out.truncated
        assert out.carrier_state is None and out.fidelity_vs_input is None
        assert out.rounds_used == 3 and all(b.beam == 2 for b in out.path)

    def test_max_rounds_validation(self):
        with pytest.raises(ValueError):
            run_protocol_recycling(ket("0"), +1, SeqRNG([]), max_rounds=0)


class TestKrausMaps:
    def test_protocol_angle_reduces_to_corrections(self):
        pair = kraus_maps(THETA_PLUS)
        assert_allclose(pair.k1, CORRECTIONS.u1, atol=1e-12)
        assert_allclose(pair.k2, CORRECTIONS.u2, atol=1e-12)

    def test_projection_oracle(self):
        # twice the <0|/<1| projections of the evolved state must equal
        # k1^dag psi and k2^dag psi
        rng = np.random.default_rng(94)
        for theta in np.linspace(0.0, math.pi, 25):
            psi = random_qubit_state(rng)
            v0, v1 = first_beam_projections(psi, theta)
            pair = kraus_maps(theta)
            assert_allclose(v0, pair.k1.conj().T @ psi.amplitudes, atol=1e-12)
            assert_allclose(v1, pair.k2.conj().T @ psi.amplitudes, atol=1e-12)

    def test_completeness_gap_is_scalar(self):
        for theta in np.linspace(0.0, math.pi, 50):
            gap = kraus_completeness_gap(kraus_maps(theta))
            expected = imperfection_measure(theta) * np.eye(2)
            assert np.abs(gap - expected).max() < 1e-12

    def test_unitary_exactly_at_maximal_angles(self):
        for theta in (THETA_PLUS, 2 * math.pi / 3):
            pair = kraus_maps(theta)
            assert is_unitary(pair.k1) and is_unitary(pair.k2)
        pair = kraus_maps(0.9)
        assert not is_unitary(pair.k1)

    def test_imperfection_values(self):
        assert imperfection_measure(0.0) == pytest.approx(1.0)
        assert imperfection_measure(THETA_PLUS) == pytest.approx(0.0, abs=1e-15)
        assert imperfection_measure(math.pi / 2) == pytest.approx(-1.0 / 3.0)

    def test_types(self):
        pair = kraus_maps(0.5)
        assert isinstance(pair, KrausPair)
        with pytest.raises(ValueError):
            pair.k1[0, 0] = 1.0


class TestLinearity:
    def test_first_beam_map_is_linear(self):
        rng = np.random.default_rng(95)
        e0, e1 = StateVector([1, 0]), StateVector([0, 1])
        psi = random_qubit_state(rng)
        a, b = psi.amplitudes
        for theta in (0.7, THETA_PLUS):
            v0_psi, v1_psi = first_beam_projections(psi, theta)
            v0_0, v1_0 = first_beam_projections(e0, theta)
            v0_1, v1_1 = first_beam_projections(e1, theta)
            assert_allclose(v0_psi, a * v0_0 + b * v0_1, atol=1e-12)
            assert_allclose(v1_psi, a * v1_0 + b * v1_1, atol=1e-12)
