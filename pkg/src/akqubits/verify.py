"""Numerical verification of every closed-form claim the simulator rests on.

Each check recomputes one analytic statement from the simulated dynamics
and reports its worst observed error against a fixed tolerance: the
propagator closed form, the Heisenberg-picture meter expansion, meter
tracking, the joint-measurement noise relations, entanglement entropy,
Schmidt orthogonality, the beam probabilities, and exact teleportation
with its general-angle first-beam maps.  The CLI `verify` subcommand
prints one line per check and fails if any check does.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import (
    PAULI,
    Qubit,
    StateVector,
    expectation,
    fidelity,
    outcome_probability,
    pauli_on,
    random_qubit_batch,
)
from .entanglement import (
    entanglement_entropy,
    reduced_determinant,
    reduced_system_density,
    schmidt_orthogonality_defect,
)
from .interaction import (
    ak_unitary,
    ak_unitary_expm,
    heisenberg_meter_x,
    initial_state,
    tracking_observable,
    uncertainty_report,
)
from .teleport import (
    branch_decomposition,
    first_beam_projections,
    imperfection_measure,
    kraus_completeness_gap,
    kraus_maps,
    run_protocol_forced,
)

DEFAULT_SEED = 0

_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class CheckResult:
    """One verified claim: its worst observed error and the verdict."""

    name: str
    description: str
    max_error: float
    tolerance: float
    passed: bool
    detail: str = ""


def _result(name, description, max_error, tolerance, extra_ok=True, detail=""):
    max_error = float(max_error)
    return CheckResult(
        name=name,
        description=description,
        max_error=max_error,
        tolerance=tolerance,
        passed=bool(extra_ok) and max_error < tolerance,
        detail=detail,
    )


def _interior_grid(n, stop=math.pi):
    """n points strictly inside (0, stop)."""
    return np.linspace(0.0, stop, n + 2)[1:-1]


def _states(rng, n):
    return [StateVector(a) for a in random_qubit_batch(rng, n)]


def check_propagator_closed_form():
    """Closed-form propagator vs the matrix exponential on 50 angles."""
    errs = [
        np.abs(ak_unitary(t) - ak_unitary_expm(t)).max() for t in _interior_grid(50)
    ]
    return _result(
        "propagator-closed-form",
        "closed-form propagator matches the matrix exponential",
        max(errs),
        1e-10,
    )


def check_meter_heisenberg_picture():
    """Explicit meter-x expansion vs direct conjugation, all axes."""
    errs = []
    for t in _interior_grid(50):
        u = ak_unitary(t)
        for i, q in ((1, Qubit.A1), (2, Qubit.A2), (3, Qubit.A3)):
            direct = u.conj().T @ pauli_on(q, "x", 4) @ u
            errs.append(np.abs(heisenberg_meter_x(i, t) - direct).max())
    return _result(
        "meter-heisenberg-picture",
        "evolved meter-x operators match their explicit expansion",
        max(errs),
        1e-12,
    )


def check_tracking_expectation(rng):
    """Rescaled meter readings reproduce the system expectations."""
    errs = []
    for psi in _states(rng, 100):
        start = initial_state(psi)
        for t in (math.pi / 8, math.pi / 4, math.pi / 3):
            for i, ax in ((1, "x"), (2, "y"), (3, "z")):
                tracked = expectation(tracking_observable(i, t), start)
                errs.append(abs(tracked - expectation(PAULI[ax], psi)))
    return _result(
        "tracking-expectation",
        "tracking observables reproduce all three system expectations",
        max(errs),
        1e-10,
    )


def check_noise_relations(rng):
    """Noise sums and differences: values, lower bounds, pi/4 minimum.

    The grid k pi/48 (k = 1..23) contains pi/4 exactly and stays clear of
    the singular angles, so the minimum location can be checked literally.
    """
    grid = [k * math.pi / 48 for k in range(1, 24)]
    psis = _states(rng, 5)
    errs = []
    min_diff = math.inf
    min_sum = math.inf
    curve_diff = []
    curve_sum = []
    for t in grid:
        closed = 3.0 / math.sin(2 * t) ** 2 - 1.0
        for j, psi in enumerate(psis):
            rep = uncertainty_report(psi, t)
            errs.extend(abs(d - closed) for d in rep.differences)
            errs.append(abs(rep.system_sum - 2.0))
            errs.append(abs(rep.tracking_sum - (3.0 * closed + 2.0)))
            min_diff = min(min_diff, *rep.differences)
            min_sum = min(min_sum, rep.tracking_sum)
            if j == 0:
                curve_diff.append(rep.differences[0])
                curve_sum.append(rep.tracking_sum)
    at_quarter_pi = (
        grid[int(np.argmin(curve_diff))] == math.pi / 4
        and grid[int(np.argmin(curve_sum))] == math.pi / 4
    )
    bounded = min_diff >= 2.0 - 1e-10 and min_sum >= 8.0 - 1e-10
    return _result(
        "noise-relations",
        "meter noise equals 3/sin^2(2t) - 1 per axis, bounded by 2, minimal at pi/4",
        max(errs),
        1e-10,
        extra_ok=at_quarter_pi and bounded,
        detail=f"min difference {min_diff:.6f}, min sum {min_sum:.6f}",
    )


def check_reduced_determinant(rng):
    """Simulated reduced-state determinant vs its closed form."""
    psis = _states(rng, 3)
    errs = []
    for t in _interior_grid(100):
        want = reduced_determinant(t)
        for psi in psis:
            got = float(np.linalg.det(reduced_system_density(psi, t).matrix).real)
            errs.append(abs(got - want))
    return _result(
        "reduced-determinant",
        "det of the reduced system state matches (2/9)sin^2(1 + 2cos^2)",
        max(errs),
        1e-12,
    )


def check_entropy_maximum(rng):
    """Entropy reaches ln 2 at theta = pi/3 and never exceeds it."""
    psi = _states(rng, 1)[0]
    at_third = entanglement_entropy(psi, math.pi / 3).entropy_nats
    grid_max = max(
        entanglement_entropy(psi, t).entropy_nats for t in _interior_grid(100)
    )
    return _result(
        "entropy-maximum",
        "entanglement entropy peaks at ln 2 exactly at theta = pi/3",
        abs(at_third - math.log(2.0)),
        1e-12,
        extra_ok=grid_max <= math.log(2.0) + 1e-12,
        detail=f"grid max {grid_max:.15f} vs ln 2 = {math.log(2.0):.15f}",
    )


def check_entropy_input_independence(rng):
    """The entropy depends on the angle only, never on the input state."""
    vals = [
        entanglement_entropy(psi, 0.9).entropy_nats for psi in _states(rng, 100)
    ]
    return _result(
        "entropy-input-independence",
        "entanglement entropy is identical for 100 random inputs",
        max(vals) - min(vals),
        1e-10,
    )


def check_schmidt_orthogonality(rng):
    """Apparatus partner states are orthogonal exactly at cos^2 = 1/4."""
    psi = _states(rng, 1)[0]
    while schmidt_orthogonality_defect(psi, 1.0).z_eigenstate_input:
        psi = _states(rng, 1)[0]
    at_points = max(
        schmidt_orthogonality_defect(psi, t).value
        for t in (math.pi / 3, 2 * math.pi / 3)
    )
    off_values = [
        schmidt_orthogonality_defect(psi, t).value
        for t in _interior_grid(100)
        if abs(math.cos(t) ** 2 - 0.25) > 0.01
    ]
    return _result(
        "schmidt-orthogonality",
        "partner-state overlap vanishes at cos^2 = 1/4 and nowhere else",
        at_points,
        1e-12,
        extra_ok=min(off_values) > 1e-6,
        detail=f"smallest off-point defect {min(off_values):.3e}",
    )


def check_branch_probabilities(rng):
    """Beams split 1/2, 1/4, 1/4 at the protocol angles, for every input;
    the carrier meter reads +1 with certainty in the recycling beams."""
    errs = []
    y2 = pauli_on(Qubit.A2, "y", 4)
    for psi in _states(rng, 10):
        for t in (math.pi / 3, -math.pi / 3):
            d = branch_decomposition(psi, t)
            errs.extend(
                (abs(d.p1 - 0.5), abs(d.p2 - 0.25), abs(d.p3 - 0.25))
            )
    psi = _states(rng, 1)[0]
    for t in _interior_grid(25):
        d = branch_decomposition(psi, t)
        for state in d.branch_states[1:]:
            if state is not None:
                errs.append(
                    abs(outcome_probability(state, y2, +1, validate=False) - 1.0)
                )
    return _result(
        "branch-probabilities",
        "meter readings split the protocol into beams of weight 1/2, 1/4, 1/4",
        max(errs),
        1e-12,
    )


def check_forbidden_branch(rng):
    """The (-1, -1) double reading never occurs at any angle."""
    psis = _states(rng, 3)
    worst = max(
        branch_decomposition(psi, t).forbidden_probability
        for psi in psis
        for t in np.linspace(-math.pi, math.pi, 50)
    )
    return _result(
        "forbidden-branch",
        "the double -1 meter reading has zero probability everywhere",
        worst,
        1e-14,
    )


def check_forced_teleportation(rng):
    """Every forced branch returns the input exactly, both signs."""
    worst = 0.0
    for psi in _states(rng, 1000):
        for sign in (+1, -1):
            for beam, z_p in ((1, +1), (1, -1), (2, 0), (3, 0)):
                res = run_protocol_forced(psi, sign, beam, z_p=z_p)
                worst = max(worst, 1.0 - fidelity(res.state, psi))
    return _result(
        "forced-teleportation",
        "all forced beams and sub-branches return the input state",
        worst,
        1e-10,
    )


def check_first_beam_maps(rng):
    """General-angle first-beam maps: projection identity and completeness."""
    psis = _states(rng, 3)
    errs = []
    for t in _interior_grid(50):
        pair = kraus_maps(t)
        gap = kraus_completeness_gap(pair)
        errs.append(np.abs(gap - imperfection_measure(t) * np.eye(2)).max())
        for psi in psis:
            v0, v1 = first_beam_projections(psi, t)
            errs.append(np.abs(v0 - pair.k1.conj().T @ psi.amplitudes).max())
            errs.append(np.abs(v1 - pair.k2.conj().T @ psi.amplitudes).max())
    return _result(
        "first-beam-maps",
        "first-beam maps reproduce the projections; completeness gap is scalar",
        max(errs),
        1e-12,
    )


def check_imperfection_roots():
    """The imperfection measure vanishes only at the two protocol angles."""
    roots = (
        brentq(imperfection_measure, 0.5, 1.5, xtol=1e-13),
        brentq(imperfection_measure, 1.6, 2.6, xtol=1e-13),
    )
    err = max(
        abs(roots[0] - math.pi / 3), abs(roots[1] - 2 * math.pi / 3)
    )
    return _result(
        "imperfection-roots",
        "the imperfection measure crosses zero at pi/3 and 2pi/3 only",
        err,
        1e-9,
        detail=f"roots at {roots[0]:.12f}, {roots[1]:.12f}",
    )


def run_all_checks(seed=DEFAULT_SEED):
    """Every check, sharing one seeded generator for the random inputs."""
    rng = np.random.default_rng(seed)
    return [
        check_propagator_closed_form(),
        check_meter_heisenberg_picture(),
        check_tracking_expectation(rng),
        check_noise_relations(rng),
        check_reduced_determinant(rng),
        check_entropy_maximum(rng),
        check_entropy_input_independence(rng),
        check_schmidt_orthogonality(rng),
        check_branch_probabilities(rng),
        check_forbidden_branch(rng),
        check_forced_teleportation(rng),
        check_first_beam_maps(rng),
        check_imperfection_roots(),
    ]


def format_report(results):
    """Human-readable report, one line per check."""
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        line = (
            f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  "
            f"max error {r.max_error:9.3e}  (tolerance {r.tolerance:.0e})  "
            f"{r.description}"
        )
        if r.detail and not r.passed:
            line += f"\n{'':6}{r.detail}"
        lines.append(line)
    return "\n".join(lines)
