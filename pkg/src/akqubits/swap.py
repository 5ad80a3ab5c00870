"""Entanglement swapping: teleporting one half of an entangled pair.

A reference qubit R rides along untouched while the protocol teleports the
system qubit P it is entangled with.  By linearity the first beam moves the
entire joint state onto R (x) A2, entanglement included; the recycling
beams restore the original R-P state exactly, so failed rounds are rerun
as in the single-qubit protocol.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    ID2,
    Qubit,
    StateVector,
    fidelity,
    ket,
    measure_observable,
    pauli_on,
    project_outcome,
    tensor,
)
from .interaction import ak_unitary, theta_for_sign
from .teleport import (
    CORRECTIONS,
    Branch,
    UnreachableBranchError,
    first_beam_corrections,
)


class DegenerateInputError(ValueError):
    """The two product terms of a swap input (near-)cancel."""


@dataclass(frozen=True)
class SwapInput:
    """Components of the joint state |phi1>|psi1> + |phi2>|psi2>.

    Each field is a length-2 complex array; the components may be scaled
    arbitrarily (including to zero), only the assembled sum is normalized.
    """

    phi1: np.ndarray
    phi2: np.ndarray
    psi1: np.ndarray
    psi2: np.ndarray

    def __post_init__(self):
        for name in ("phi1", "phi2", "psi1", "psi2"):
            vec = np.asarray(getattr(self, name), dtype=complex)
            if vec.shape != (2,):
                raise ValueError(f"{name} must be a length-2 amplitude vector")
            vec = vec.copy()
            vec.setflags(write=False)
            object.__setattr__(self, name, vec)


@dataclass(frozen=True)
class SwapOutcome:
    """A recycling swap run; final_state lives on R (x) A2."""

    rounds_used: int
    path: tuple
    final_state: StateVector | None
    fidelity_vs_target: float | None
    truncated: bool


def _joint_amplitudes(swap_input):
    return (
        np.kron(swap_input.phi1, swap_input.psi1)
        + np.kron(swap_input.phi2, swap_input.psi2)
    )


def joint_input_state(swap_input):
    """Normalized R-P state |phi1>|psi1> + |phi2>|psi2>."""
    amps = _joint_amplitudes(swap_input)
    if np.linalg.norm(amps) <= 1e-9:
        raise DegenerateInputError("the two product terms cancel")
    return StateVector.from_unnormalized(amps)


def swap_target(swap_input):
    """The intended final R-A2 state: the same amplitudes moved onto A2."""
    return joint_input_state(swap_input)


def assemble_swap_state(swap_input):
    """Five-qubit start: the joint R-P state with all meters in |+>."""
    return tensor(joint_input_state(swap_input), ket("+++"))


def random_swap_input(rng):
    """Four independent Haar qubit components; redrawn on near-cancellation."""
    while True:
        z = rng.standard_normal(16)
        parts = (z[0:4], z[4:8], z[8:12], z[12:16])
        vecs = []
        for p in parts:
            v = p[:2] + 1j * p[2:]
            vecs.append(v / np.linalg.norm(v))
        candidate = SwapInput(phi1=vecs[0], phi2=vecs[1], psi1=vecs[2], psi2=vecs[3])
        if np.linalg.norm(_joint_amplitudes(candidate)) > 1e-6:
            return candidate


@lru_cache(maxsize=None)
def _swap_unitary(theta):
    """Interaction on P, A1, A2, A3 with identity on the reference qubit."""
    u = np.kron(ID2, ak_unitary(theta))
    u.setflags(write=False)
    return u


def _extract_r_carrier(state, z_p):
    """R (x) A2 amplitudes once P, A1, A3 are fixed by first-beam readings."""
    t = state.reshaped()
    zp = np.array([1.0, 0.0]) if z_p == +1 else np.array([0.0, 1.0])
    yp = ket("+").amplitudes.conj()
    amps = np.einsum("p,a,c,rpabc->rb", zp, yp, yp, t).reshape(4)
    return StateVector.from_unnormalized(amps)


def _extract_r_system(state, y_a1, y_a2, y_a3):
    """R (x) P amplitudes once all three meters are fixed by readings."""
    t = state.reshaped()
    bras = [ket("+" if o == +1 else "-").amplitudes.conj() for o in (y_a1, y_a2, y_a3)]
    amps = np.einsum("a,b,c,rpabc->rp", *bras, t).reshape(4)
    return StateVector.from_unnormalized(amps)


def _on_second_factor(u):
    return np.kron(ID2, u)


def _run_round(chi, sign, rng):
    """One protocol round on the current joint R-P state."""
    state = tensor(chi, ket("+++"))
    state = StateVector(_swap_unitary(theta_for_sign(sign)) @ state.amplitudes)
    y_a1, _, state = measure_observable(state, pauli_on(Qubit.A1, "y", 5), rng, validate=False)
    y_a3, _, state = measure_observable(state, pauli_on(Qubit.A3, "y", 5), rng, validate=False)

    if (y_a1, y_a3) == (-1, -1):
        raise UnreachableBranchError("sampled the zero-amplitude meter reading")

    if (y_a1, y_a3) == (+1, +1):
        z_p, _, state = measure_observable(state, pauli_on(Qubit.P, "z", 5), rng, validate=False)
        u_plus, u_minus = first_beam_corrections(sign)
        carrier = _extract_r_carrier(state, z_p)
        corrected = StateVector(
            _on_second_factor(u_plus if z_p == +1 else u_minus) @ carrier.amplitudes
        )
        return Branch(y_a1, y_a3, z_p), corrected, True

    y_a2, _, state = measure_observable(state, pauli_on(Qubit.A2, "y", 5), rng, validate=False)
    if y_a2 != +1:
        raise UnreachableBranchError("carrier meter read -1 in a recycling beam")
    recovered = _extract_r_system(state, y_a1, y_a2, y_a3)
    correction = CORRECTIONS.u3 if y_a3 == -1 else CORRECTIONS.u4
    corrected = StateVector(_on_second_factor(correction) @ recovered.amplitudes)
    return Branch(y_a1, y_a3), corrected, False


def run_swap(swap_input, sign, rng, max_rounds=64):
    """Recycling swap: rerun rounds until the joint state lands on R-A2."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    target = swap_target(swap_input)
    chi = joint_input_state(swap_input)
    path = []
    for _ in range(max_rounds):
        branch, state, success = _run_round(chi, sign, rng)
        path.append(branch)
        if success:
            return SwapOutcome(
                rounds_used=len(path),
                path=tuple(path),
                final_state=state,
                fidelity_vs_target=fidelity(state, target),
                truncated=False,
            )
        chi = state
    return SwapOutcome(
        rounds_used=max_rounds,
        path=tuple(path),
        final_state=None,
        fidelity_vs_target=None,
        truncated=True,
    )


def run_swap_forced(swap_input, sign, beam, z_p=0):
    """Deterministic single round: project onto a chosen beam.

    Returns (branch, state, is_final); on beam 1 the state is the R-A2
    result, otherwise the recovered R-P state.
    """
    chi = joint_input_state(swap_input)
    state = tensor(chi, ket("+++"))
    state = StateVector(_swap_unitary(theta_for_sign(sign)) @ state.amplitudes)
    y1 = pauli_on(Qubit.A1, "y", 5)
    y2 = pauli_on(Qubit.A2, "y", 5)
    y3 = pauli_on(Qubit.A3, "y", 5)

    if beam == 1:
        if z_p not in (+1, -1):
            raise ValueError("first beam requires z_p = +1 or -1")
        _, state = project_outcome(state, y1, +1, validate=False)
        _, state = project_outcome(state, y3, +1, validate=False)
        _, state = project_outcome(state, pauli_on(Qubit.P, "z", 5), z_p, validate=False)
        u_plus, u_minus = first_beam_corrections(sign)
        carrier = _extract_r_carrier(state, z_p)
        corrected = StateVector(
            _on_second_factor(u_plus if z_p == +1 else u_minus) @ carrier.amplitudes
        )
        return Branch(+1, +1, z_p), corrected, True

    if beam == 2:
        y_a1, y_a3 = +1, -1
    elif beam == 3:
        y_a1, y_a3 = -1, +1
    else:
        raise ValueError(f"beam must be 1, 2 or 3, got {beam!r}")
    _, state = project_outcome(state, y1, y_a1, validate=False)
    _, state = project_outcome(state, y3, y_a3, validate=False)
    _, state = project_outcome(state, y2, +1, validate=False)
    recovered = _extract_r_system(state, y_a1, +1, y_a3)
    correction = CORRECTIONS.u3 if y_a3 == -1 else CORRECTIONS.u4
    corrected = StateVector(_on_second_factor(correction) @ recovered.amplitudes)
    return Branch(y_a1, y_a3), corrected, False
