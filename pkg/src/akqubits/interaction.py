"""The joint-measurement interaction and its tracking properties.

A system qubit P is coupled to three meter qubits through
H = K (sigma^P_x sigma^{A1}_z + sigma^P_y sigma^{A2}_z + sigma^P_z sigma^{A3}_z).
Because the three terms pairwise anticommute, H^2 = 3 K^2 and the evolution
closes after one trigonometric step; the single parameter theta = sqrt(3) K T
controls everything.  After the interaction each meter's sigma_x reading
tracks one component of the system spin, at the cost of an extra,
state-independent noise term that is minimized at theta = pi/4.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .core import (
    LEVI_CIVITA,
    PAULI,
    Qubit,
    StateVector,
    ket,
    pauli_on,
    tensor,
    variance,
)

#: Interaction angles of the two maximally entangling evolutions.
THETA_PLUS = math.pi / 3
THETA_MINUS = -math.pi / 3

#: Tracking is undefined where sin(2 theta) vanishes.
SINGULAR_ATOL = 1e-9

_AXES = ("x", "y", "z")
_METERS = (Qubit.A1, Qubit.A2, Qubit.A3)


class SingularThetaError(ValueError):
    """Tracking observables diverge at multiples of pi/2."""


def theta_for_sign(sign):
    """Protocol angle sign * pi/3 for sign in {+1, -1}."""
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    return THETA_PLUS if sign == +1 else THETA_MINUS


@lru_cache(maxsize=None)
def _coupling_sum():
    """sum_i sigma^P_i sigma^{A_i}_z, the operator content of the Hamiltonian."""
    total = sum(
        pauli_on(Qubit.P, _AXES[i], 4) @ pauli_on(_METERS[i], "z", 4) for i in range(3)
    )
    total.setflags(write=False)
    return total


def ak_hamiltonian(k):
    """Coupling Hamiltonian k * sum_i sigma^P_i sigma^{A_i}_z (16 x 16)."""
    if not math.isfinite(k):
        raise ValueError("coupling must be finite")
    return k * _coupling_sum()


@lru_cache(maxsize=None)
def ak_unitary(theta):
    """Closed-form evolution cos(theta) 1 - (i/sqrt(3)) sin(theta) sum_i ...

    Exact because the Hamiltonian squares to a multiple of the identity.
    Cached per angle; the returned matrix is read-only.
    """
    u = math.cos(theta) * np.eye(16) - (1j / math.sqrt(3)) * math.sin(theta) * _coupling_sum()
    u.setflags(write=False)
    return u


def ak_unitary_expm(theta):
    """Same evolution via the matrix exponential exp(-i H T), T = theta/sqrt(3), K = 1.

    Kept as an independent cross-check of the closed form.
    """
    return expm(-1j * ak_hamiltonian(1.0) * (theta / math.sqrt(3)))


def initial_state(psi):
    """|psi> on P with every meter prepared in |+> (the sigma_y +1 state)."""
    if psi.n_qubits != 1:
        raise ValueError("system state must be a single qubit")
    return tensor(psi, ket("+++"))


def evolve(psi, theta):
    """Four-qubit state after the interaction acts on |psi, +, +, +>."""
    return StateVector(ak_unitary(theta) @ initial_state(psi).amplitudes)


@lru_cache(maxsize=None)
def heisenberg_meter_x(i, theta):
    """Meter reading sigma^{A_i}_x evolved to time T, built term by term.

    i is the meter index 1..3.  The expansion is
    cos^2(theta) X_i - (sin(2 theta)/sqrt(3)) sigma^P_i Y_i
    + (1/3) sin^2(theta) (X_i + 2 Y_i sum_{jk} eps_{ijk} sigma^P_j Z_k),
    which tests verify equals U^dag sigma^{A_i}_x U.
    """
    if i not in (1, 2, 3):
        raise ValueError(f"meter index must be 1, 2 or 3, got {i!r}")
    ax = i - 1
    x_i = pauli_on(_METERS[ax], "x", 4)
    y_i = pauli_on(_METERS[ax], "y", 4)
    cross = sum(
        LEVI_CIVITA[ax, j, k] * (pauli_on(Qubit.P, _AXES[j], 4) @ pauli_on(_METERS[k], "z", 4))
        for j in range(3)
        for k in range(3)
        if LEVI_CIVITA[ax, j, k] != 0.0
    )
    op = (
        math.cos(theta) ** 2 * x_i
        - (math.sin(2 * theta) / math.sqrt(3)) * (pauli_on(Qubit.P, _AXES[ax], 4) @ y_i)
        + (math.sin(theta) ** 2 / 3.0) * (x_i + 2.0 * y_i @ cross)
    )
    op.setflags(write=False)
    return op


def tracking_observable(i, theta):
    """Sigma_i = -sqrt(3)/sin(2 theta) * the evolved meter reading.

    Its expectation on |psi, +, +, +> reproduces <psi| sigma^P_i |psi>.
    """
    s2 = math.sin(2 * theta)
    if abs(s2) <= SINGULAR_ATOL:
        raise SingularThetaError(f"sin(2 theta) = {s2!r}; tracking undefined")
    op = (-math.sqrt(3) / s2) * heisenberg_meter_x(i, theta)
    op.setflags(write=False)
    return op


@dataclass(frozen=True)
class UncertaintyReport:
    """Per-axis system and tracking variances at one angle.

    differences[i] = tracking_variances[i] - system_variances[i]; the
    closed-form value 3/sin^2(2 theta) - 1 is the same for every axis and
    every input state.
    """

    theta: float
    system_variances: tuple
    tracking_variances: tuple
    differences: tuple
    system_sum: float
    tracking_sum: float


def uncertainty_report(psi, theta):
    """Variance bookkeeping for all three axes, sharing one prepared state.

    The tracking observables are Heisenberg-picture operators, so their
    moments are taken in the pre-interaction state |psi, +, +, +>.
    """
    if psi.n_qubits != 1:
        raise ValueError("system state must be a single qubit")
    start = initial_state(psi)
    sys_vars = tuple(variance(PAULI[ax], psi) for ax in _AXES)
    trk_vars = tuple(
        variance(tracking_observable(i, theta), start) for i in (1, 2, 3)
    )
    diffs = tuple(t - s for t, s in zip(trk_vars, sys_vars))
    return UncertaintyReport(
        theta=theta,
        system_variances=sys_vars,
        tracking_variances=trk_vars,
        differences=diffs,
        system_sum=sum(sys_vars),
        tracking_sum=sum(trk_vars),
    )
