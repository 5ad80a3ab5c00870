"""Entanglement generated between the system and the apparatus block.

The reduced system state after the interaction has determinant
(2/9) sin^2(theta) (1 + 2 cos^2(theta)) regardless of the input, so the
entanglement entropy depends on theta alone.  It peaks at ln 2 exactly
where cos^2(theta) = 1/4, the same points at which the two apparatus
states in the Schmidt-like expansion become orthogonal.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Y_MINUS,
    Y_PLUS,
    Qubit,
    StateVector,
    binary_entropy,
    partial_trace,
    von_neumann_entropy,
)
from .interaction import evolve, theta_for_sign


@dataclass(frozen=True)
class EntropyPoint:
    """Entanglement entropy at one angle.

    lam is the smaller eigenvalue of the reduced system state, so
    lam <= 1/2 and entropy_nats = -lam ln lam - (1-lam) ln(1-lam).
    """

    theta: float
    lam: float
    entropy_nats: float


@dataclass(frozen=True)
class SchmidtDefect:
    """Overlap magnitude of the two apparatus expansion states.

    z_eigenstate_input marks inputs with a (near-)vanishing amplitude
    product |a b|, where the defect vanishes for trivial reasons.
    """

    value: float
    z_eigenstate_input: bool


def reduced_system_density(psi, theta):
    """Reduced system state: trace the three meters out of the evolved state."""
    return partial_trace(evolve(psi, theta), [Qubit.P])


def reduced_determinant(theta):
    """det of the reduced system state, (2/9) sin^2(theta) (1 + 2 cos^2(theta))."""
    return (2.0 / 9.0) * math.sin(theta) ** 2 * (1.0 + 2.0 * math.cos(theta) ** 2)


def entanglement_entropy(psi, theta):
    """Entropy of the system-apparatus split, computed from the reduced state."""
    rho = reduced_system_density(psi, theta)
    lam = float(rho.eigenvalues()[0])
    return EntropyPoint(theta=theta, lam=lam, entropy_nats=von_neumann_entropy(rho))


def entropy_closed_form(theta):
    """EntropyPoint from the determinant formula, bypassing any state.

    Solves lam (1 - lam) = det for the smaller root; det is clamped to
    [0, 1/4] against rounding at the maximum.
    """
    d = min(max(reduced_determinant(theta), 0.0), 0.25)
    lam = 0.5 * (1.0 - math.sqrt(1.0 - 4.0 * d))
    return EntropyPoint(theta=theta, lam=lam, entropy_nats=binary_entropy(lam))


def schmidt_orthogonality_defect(psi, theta):
    """|<app_0|app_1>| for the apparatus states paired with |0> and |1>.

    Zero exactly when cos^2(theta) = 1/4 for generic inputs; inputs with a
    vanishing amplitude product are flagged instead of trusted.
    """
    if psi.n_qubits != 1:
        raise ValueError("system state must be a single qubit")
    final = evolve(psi, theta).reshaped()
    app0 = final[0].reshape(8)
    app1 = final[1].reshape(8)
    a, b = psi.amplitudes
    return SchmidtDefect(
        value=float(abs(np.vdot(app0, app1))),
        z_eigenstate_input=bool(abs(a) * abs(b) < 1e-9),
    )


def maximally_entangled_state(psi, sign):
    """The evolved state at theta = sign * pi/3, assembled term by term.

    Written out in the grouped form (system ket times apparatus block) as
    an independent construction; tests confirm it equals evolve at the
    same angle.
    """
    theta_for_sign(sign)  # validates sign
    a, b = psi.amplitudes
    pm = 1.0 if sign == +1 else -1.0

    def block(c0, c1, c2, c3):
        return (
            c0 * np.kron(np.kron(Y_PLUS, Y_PLUS), Y_PLUS)
            + c1 * np.kron(np.kron(Y_MINUS, Y_PLUS), Y_PLUS)
            + c2 * np.kron(np.kron(Y_PLUS, Y_MINUS), Y_PLUS)
            + c3 * np.kron(np.kron(Y_PLUS, Y_PLUS), Y_MINUS)
        )

    app0 = block(a, pm * -1j * b, pm * -1j * (-1j * b), pm * -1j * a)
    app1 = block(b, pm * -1j * a, pm * -1j * (1j * a), pm * -1j * (-b))
    amps = 0.5 * np.concatenate([app0, app1])
    return StateVector(amps)


def apparatus_reduced_density(psi, theta):
    """Reduced state of the three-meter block (8 x 8); complements the system."""
    return partial_trace(evolve(psi, theta), [Qubit.A1, Qubit.A2, Qubit.A3])
