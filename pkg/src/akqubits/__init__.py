"""Exact simulator of a four-qubit joint-measurement interaction.

A single system qubit couples simultaneously to three meter qubits, one
per spin axis.  Everything downstream of that interaction is closed
form, and this package reproduces all of it numerically: the rescaled
meters that track every system component at once (at the cost of a
quantifiable noise excess), the angle-dependent system-apparatus
entanglement peaking at ln 2, the three-beam measurement decomposition
behind exact teleportation with recycling, and entanglement swapping
onto the carrier meter.

The submodules layer from register primitives (`core`) through the
interaction itself (`interaction`), its entanglement structure
(`entanglement`), the protocols (`teleport`, `swap`), Monte-Carlo
backends (`backend`) and the closed-form checks (`verify`) to the
command-line front end (`cli`).
"""

from .backend import TrialBatch, available_backends, default_backend, run_teleport_trials
from .core import (
    DensityMatrix,
    LayoutError,
    Qubit,
    StateVector,
    ZeroProbabilityError,
    fidelity,
    ket,
    partial_trace,
    random_qubit_state,
    tensor,
    von_neumann_entropy,
)
from .entanglement import (
    entanglement_entropy,
    entropy_closed_form,
    maximally_entangled_state,
    schmidt_orthogonality_defect,
)
from .interaction import (
    SingularThetaError,
    THETA_MINUS,
    THETA_PLUS,
    ak_hamiltonian,
    ak_unitary,
    evolve,
    theta_for_sign,
    tracking_observable,
    uncertainty_report,
)
from .swap import SwapInput, SwapOutcome, random_swap_input, run_swap
from .teleport import (
    Branch,
    TeleportOutcome,
    branch_decomposition,
    imperfection_measure,
    kraus_maps,
    run_protocol_forced,
    run_protocol_recycling,
)
from .verify import CheckResult, format_report, run_all_checks

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "CheckResult",
    "DensityMatrix",
    "LayoutError",
    "Qubit",
    "SingularThetaError",
    "StateVector",
    "SwapInput",
    "SwapOutcome",
    "TeleportOutcome",
    "THETA_MINUS",
    "THETA_PLUS",
    "TrialBatch",
    "ZeroProbabilityError",
    "ak_hamiltonian",
    "ak_unitary",
    "available_backends",
    "branch_decomposition",
    "default_backend",
    "entanglement_entropy",
    "entropy_closed_form",
    "evolve",
    "fidelity",
    "format_report",
    "imperfection_measure",
    "ket",
    "kraus_maps",
    "maximally_entangled_state",
    "partial_trace",
    "random_qubit_state",
    "random_swap_input",
    "run_all_checks",
    "run_protocol_forced",
    "run_protocol_recycling",
    "run_swap",
    "run_teleport_trials",
    "schmidt_orthogonality_defect",
    "tensor",
    "theta_for_sign",
    "tracking_observable",
    "uncertainty_report",
    "von_neumann_entropy",
    "__version__",
]
