"""Teleportation through the measurement interaction, with recycling.

Measuring the two outer meters splits the evolved state into three beams.
The (+1, +1) reading leaves the carrier meter A2 holding the input state up
to one of two unitary corrections selected by a final system z reading.
The readings (+1, -1) and (-1, +1) leave the system itself in a sigma_z or
sigma_x rotation of the input, so a single Pauli correction restores it
exactly (at any angle) and the protocol can be rerun with fresh meters.
The (-1, -1) reading has amplitude zero identically.

At the angles |theta| = pi/3 every beam teleports perfectly; elsewhere the
first-beam maps become the non-unitary pair returned by kraus_maps, whose
deviation from completeness is the scalar imperfection_measure.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    PAULI,
    Y_MINUS,
    Y_PLUS,
    Qubit,
    StateVector,
    ZeroProbabilityError,
    fidelity,
    measure_observable,
    outcome_probability,
    pauli_on,
    project_outcome,
)
from .interaction import evolve, theta_for_sign


class UnreachableBranchError(RuntimeError):
    """A measurement landed on an outcome of exactly zero amplitude."""


# ---------- corrections ----------

_SQ2 = math.sqrt(2.0)
_U1 = np.array([[1.0, -1.0j], [-1.0, -1.0j]]) / _SQ2
_U2 = np.array([[1.0, 1.0j], [1.0, -1.0j]]) / _SQ2


@dataclass(frozen=True)
class CorrectionSet:
    """The six correction unitaries of the protocol.

    u1/u2 fix the first-beam carrier for the +pi/3 evolution (selected by
    the system z reading); u1_prime/u2_prime are their -pi/3 counterparts
    sigma_z u1 and sigma_z u2.  u3 and u4 undo the second- and third-beam
    system rotations.
    """

    u1: np.ndarray
    u2: np.ndarray
    u1_prime: np.ndarray
    u2_prime: np.ndarray
    u3: np.ndarray
    u4: np.ndarray


def _frozen(m):
    m = np.asarray(m, dtype=complex)
    m.setflags(write=False)
    return m


CORRECTIONS = CorrectionSet(
    u1=_frozen(_U1),
    u2=_frozen(_U2),
    u1_prime=_frozen(PAULI["z"] @ _U1),
    u2_prime=_frozen(PAULI["z"] @ _U2),
    u3=PAULI["z"],
    u4=PAULI["x"],
)


def first_beam_corrections(sign):
    """Carrier corrections (for z readings +1 and -1) at angle sign * pi/3."""
    theta_for_sign(sign)
    if sign == +1:
        return CORRECTIONS.u1, CORRECTIONS.u2
    return CORRECTIONS.u1_prime, CORRECTIONS.u2_prime


# ---------- branch bookkeeping ----------


@dataclass(frozen=True)
class Branch:
    """One (Y(A1), Y(A3)) outcome, with the z reading on the first beam.

    beam 1 <-> (+1, +1), beam 2 <-> (+1, -1), beam 3 <-> (-1, +1); the
    (-1, -1) combination cannot be constructed.
    """

    y_a1: int
    y_a3: int
    z_p: int = 0  # +-1 on the first beam, 0 elsewhere

    def __post_init__(self):
        if (self.y_a1, self.y_a3) == (-1, -1):
            raise UnreachableBranchError("the (-1, -1) reading has zero amplitude")
        if self.y_a1 not in (+1, -1) or self.y_a3 not in (+1, -1):
            raise ValueError("meter readings must be +1 or -1")
        if self.beam == 1:
            if self.z_p not in (+1, -1):
                raise ValueError("first beam requires a +-1 system z reading")
        elif self.z_p != 0:
            raise ValueError("only the first beam carries a z reading")

    @property
    def beam(self):
        if self.y_a3 == -1:
            return 2
        return 1 if self.y_a1 == +1 else 3

    @classmethod
    def first(cls, z_p):
        return cls(+1, +1, z_p)

    @classmethod
    def second(cls):
        return cls(+1, -1)

    @classmethod
    def third(cls):
        return cls(-1, +1)

    def __str__(self):
        return str(self.beam)


@dataclass(frozen=True)
class RoundResult:
    """Outcome of a single protocol round.

    On the first beam `state` is the corrected A2 carrier; otherwise it is
    the corrected system state ready for recycling.
    """

    branch: Branch
    state: StateVector
    is_carrier: bool


@dataclass(frozen=True)
class TeleportOutcome:
    """A full recycling run: the beams visited and the final carrier."""

    rounds_used: int
    path: tuple
    carrier_state: StateVector | None
    fidelity_vs_input: float | None
    truncated: bool
    seed: int | None = None


@dataclass(frozen=True)
class BranchDecomposition:
    """Exact Born data for the three beams of one evolved state."""

    p1: float
    p2: float
    p3: float
    forbidden_probability: float
    branch_states: tuple


@dataclass(frozen=True)
class KrausPair:
    """First-beam maps at a general angle; unitary exactly at |theta| = pi/3."""

    k1: np.ndarray
    k2: np.ndarray
    theta: float


# ---------- projections ----------


def _y_bra(outcome):
    return (Y_PLUS if outcome == +1 else Y_MINUS).conj()


def _extract_carrier(state, z_p):
    """A2 amplitudes once P, A1, A3 are fixed by first-beam readings."""
    t = state.reshaped()
    amps = np.einsum("ac,abc->b", np.outer(_y_bra(+1), _y_bra(+1)), t[0 if z_p == +1 else 1])
    return StateVector.from_unnormalized(amps)


def _extract_system(state, y_a1, y_a2, y_a3):
    """System amplitudes once all three meters are fixed by readings."""
    t = state.reshaped()
    amps = np.einsum(
        "a,b,c,pabc->p", _y_bra(y_a1), _y_bra(y_a2), _y_bra(y_a3), t
    )
    return StateVector.from_unnormalized(amps)


def branch_probabilities_closed_form(theta):
    """(p1, p2, p3) = (cos^2 + sin^2/3, sin^2/3, sin^2/3), input-independent."""
    s3 = math.sin(theta) ** 2 / 3.0
    return (math.cos(theta) ** 2 + s3, s3, s3)


def branch_decomposition(psi, theta):
    """Born probabilities and normalized post-states of the three beams.

    Branch states are None where the branch probability is numerically
    zero (e.g. beams 2 and 3 at theta = 0).
    """
    final = evolve(psi, theta)
    y1 = pauli_on(Qubit.A1, "y", 4)
    y3 = pauli_on(Qubit.A3, "y", 4)

    def split(state, obs, outcome):
        p = outcome_probability(state, obs, outcome, validate=False)
        try:
            _, post = project_outcome(state, obs, outcome, validate=False)
        except ZeroProbabilityError:
            post = None
        return p, post

    p_plus, post_plus = split(final, y1, +1)
    p_minus, post_minus = split(final, y1, -1)

    states = []
    probs = []
    for base_p, base_state, outcome in (
        (p_plus, post_plus, +1),   # beam 1: (+1, +1)
        (p_plus, post_plus, -1),   # beam 2: (+1, -1)
        (p_minus, post_minus, +1),  # beam 3: (-1, +1)
    ):
        if base_state is None:
            probs.append(0.0)
            states.append(None)
            continue
        p_cond, post = split(base_state, y3, outcome)
        probs.append(base_p * p_cond)
        states.append(post)

    forbidden = 0.0
    if post_minus is not None:
        forbidden = p_minus * outcome_probability(post_minus, y3, -1, validate=False)

    return BranchDecomposition(
        p1=probs[0],
        p2=probs[1],
        p3=probs[2],
        forbidden_probability=forbidden,
        branch_states=tuple(states),
    )


def first_beam_subbranch_probabilities(psi, theta):
    """Conditional probabilities of the two system z readings in beam 1.

    Both equal 1/2 for every input exactly when sin^2(theta) = 3/4.
    """
    final = evolve(psi, theta)
    _, post = project_outcome(final, pauli_on(Qubit.A1, "y", 4), +1, validate=False)
    _, post = project_outcome(post, pauli_on(Qubit.A3, "y", 4), +1, validate=False)
    p_plus = outcome_probability(post, pauli_on(Qubit.P, "z", 4), +1, validate=False)
    return p_plus, 1.0 - p_plus


# ---------- protocol rounds ----------


def _finish_first_beam(post, z_p, u_plus, u_minus, y_a1=+1, y_a3=+1):
    carrier = _extract_carrier(post, z_p)
    correction = u_plus if z_p == +1 else u_minus
    corrected = StateVector(correction @ carrier.amplitudes)
    return RoundResult(
        branch=Branch(y_a1, y_a3, z_p), state=corrected, is_carrier=True
    )


def _finish_recycling_beam(post, y_a1, y_a2, y_a3):
    recovered = _extract_system(post, y_a1, y_a2, y_a3)
    correction = CORRECTIONS.u3 if y_a3 == -1 else CORRECTIONS.u4
    corrected = StateVector(correction @ recovered.amplitudes)
    return RoundResult(
        branch=Branch(y_a1, y_a3), state=corrected, is_carrier=False
    )


def run_protocol_once(psi, sign, rng, theta=None):
    """One sampled round: interact, read the meters, correct.

    Consumes exactly three uniform draws.  theta defaults to the protocol
    angle sign * pi/3; other angles run the same procedure with the
    sign's corrections (the first beam is then imperfect).
    """
    protocol_theta = theta_for_sign(sign) if theta is None else theta
    final = evolve(psi, protocol_theta)
    y_a1, _, final = measure_observable(final, pauli_on(Qubit.A1, "y", 4), rng, validate=False)
    y_a3, _, final = measure_observable(final, pauli_on(Qubit.A3, "y", 4), rng, validate=False)

    if (y_a1, y_a3) == (-1, -1):
        raise UnreachableBranchError("sampled the zero-amplitude meter reading")

    if (y_a1, y_a3) == (+1, +1):
        z_p, _, final = measure_observable(final, pauli_on(Qubit.P, "z", 4), rng, validate=False)
        u_plus, u_minus = first_beam_corrections(sign)
        return _finish_first_beam(final, z_p, u_plus, u_minus)

    y_a2, _, final = measure_observable(final, pauli_on(Qubit.A2, "y", 4), rng, validate=False)
    if y_a2 != +1:
        raise UnreachableBranchError("carrier meter read -1 in a recycling beam")
    return _finish_recycling_beam(final, y_a1, y_a2, y_a3)


def run_protocol_forced(psi, sign, beam, z_p=0, theta=None):
    """Deterministic round: project onto a chosen beam instead of sampling.

    beam is 1, 2 or 3; the first beam requires z_p = +-1.  Raises
    ZeroProbabilityError if the requested branch cannot occur.
    """
    protocol_theta = theta_for_sign(sign) if theta is None else theta
    final = evolve(psi, protocol_theta)
    y1 = pauli_on(Qubit.A1, "y", 4)
    y2 = pauli_on(Qubit.A2, "y", 4)
    y3 = pauli_on(Qubit.A3, "y", 4)

    if beam == 1:
        if z_p not in (+1, -1):
            raise ValueError("first beam requires z_p = +1 or -1")
        _, post = project_outcome(final, y1, +1, validate=False)
        _, post = project_outcome(post, y3, +1, validate=False)
        _, post = project_outcome(post, pauli_on(Qubit.P, "z", 4), z_p, validate=False)
        u_plus, u_minus = first_beam_corrections(sign)
        return _finish_first_beam(post, z_p, u_plus, u_minus)

    if beam == 2:
        y_a1, y_a3 = +1, -1
    elif beam == 3:
        y_a1, y_a3 = -1, +1
    else:
        raise ValueError(f"beam must be 1, 2 or 3, got {beam!r}")
    _, post = project_outcome(final, y1, y_a1, validate=False)
    _, post = project_outcome(post, y3, y_a3, validate=False)
    _, post = project_outcome(post, y2, +1, validate=False)
    return _finish_recycling_beam(post, y_a1, +1, y_a3)


def run_protocol_recycling(psi, sign, rng, max_rounds=64, theta=None):
    """Repeat rounds with fresh meters until the first beam succeeds.

    The recycling beams restore the system state exactly (their branch
    amplitudes are angle-independent up to scale), so the carrier fidelity
    is reported against the original input.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    current = psi
    path = []
    for _ in range(max_rounds):
        result = run_protocol_once(current, sign, rng, theta=theta)
        path.append(result.branch)
        if result.is_carrier:
            return TeleportOutcome(
                rounds_used=len(path),
                path=tuple(path),
                carrier_state=result.state,
                fidelity_vs_input=fidelity(result.state, psi),
                truncated=False,
            )
        current = result.state
    return TeleportOutcome(
        rounds_used=max_rounds,
        path=tuple(path),
        carrier_state=None,
        fidelity_vs_input=None,
        truncated=True,
    )


# ---------- general-angle first-beam maps ----------


def kraus_maps(theta):
    """The two first-beam maps k1, k2 in the carrier basis.

    Defined so that twice the projection of the evolved state onto the
    system ket |0> (resp. |1>) with both outer meters reading +1 equals
    k1^dag psi (resp. k2^dag psi).  At theta = pi/3 they reduce to the
    corrections u1, u2.
    """
    c = math.cos(theta)
    s = math.sin(theta) / math.sqrt(3.0)
    k1 = _SQ2 * np.array([[c, -1j * c], [-s, -1j * s]])
    k2 = _SQ2 * np.array([[s, 1j * s], [c, -1j * c]])
    return KrausPair(k1=_frozen(k1), k2=_frozen(k2), theta=theta)


def first_beam_projections(psi, theta):
    """Twice the evolved state's amplitudes on <0| resp. <1| with outer
    meters at +1, as carrier 2-vectors; the oracle for kraus_maps."""
    t = evolve(psi, theta).reshaped()
    bra = _y_bra(+1)
    v0 = 2.0 * np.einsum("a,c,abc->b", bra, bra, t[0])
    v1 = 2.0 * np.einsum("a,c,abc->b", bra, bra, t[1])
    return v0, v1


def kraus_completeness_gap(pair):
    """(k1 k1^dag + k2 k2^dag)/2 - 1; a real multiple of the identity."""
    half = 0.5 * (pair.k1 @ pair.k1.conj().T + pair.k2 @ pair.k2.conj().T)
    return half - np.eye(2)


def imperfection_measure(theta):
    """1 - (4/3) sin^2(theta); zero exactly where teleportation is perfect."""
    return 1.0 - (4.0 / 3.0) * math.sin(theta) ** 2
