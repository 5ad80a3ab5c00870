"""Monte-Carlo driver for teleportation trials, with two interchangeable
implementations.

The compiled kernel and the NumPy reference consume the generator
identically (the input states first, as one batch, then three uniforms per
round), so a given seed yields the same trajectories, rounds and paths on
either; only the last bits of the fidelities may differ through float
summation order.  Selection: the AKQUBITS_BACKEND environment variable
("compiled" or "python") when set, otherwise the compiled kernel when the
extension built.
"""

import os
from dataclasses import dataclass

import numpy as np

from .core import StateVector, random_qubit_batch
from .interaction import ak_unitary, theta_for_sign
from .teleport import CORRECTIONS, first_beam_corrections, run_protocol_recycling

try:
    from . import _kernels
except ImportError:  # extension not built; the reference path still works
    _kernels = None

ENV_BACKEND = "AKQUBITS_BACKEND"


def available_backends():
    return ("compiled", "python") if _kernels is not None else ("python",)


def default_backend():
    """Environment override if set and valid, else the fastest available."""
    choice = os.environ.get(ENV_BACKEND)
    if choice is not None:
        if choice not in ("compiled", "python"):
            raise ValueError(f"{ENV_BACKEND} must be 'compiled' or 'python', got {choice!r}")
        if choice == "compiled" and _kernels is None:
            raise ValueError("compiled backend requested but the extension is not built")
        return choice
    return available_backends()[0]


@dataclass(frozen=True)
class TrialBatch:
    """Arrays of per-trial results from one seeded run.

    Trial t visited the beams path_codes[path_offsets[t]:path_offsets[t+1]]
    (values 1..3, one per round).  Truncated trials carry NaN fidelity and
    a zero z reading.
    """

    rounds: np.ndarray
    fidelities: np.ndarray
    z_readings: np.ndarray
    truncated: np.ndarray
    path_codes: np.ndarray
    path_offsets: np.ndarray
    trials: int
    sign: int
    theta: float
    seed: int
    max_rounds: int
    backend: str

    def path(self, t):
        lo, hi = self.path_offsets[t], self.path_offsets[t + 1]
        return tuple(int(c) for c in self.path_codes[lo:hi])

    def paths(self):
        return (self.path(t) for t in range(self.trials))


def _run_trials_python(psis, theta, sign, rng, max_rounds):
    n = psis.shape[0]
    rounds = np.zeros(n, dtype=np.int32)
    fids = np.full(n, np.nan)
    z_read = np.zeros(n, dtype=np.int8)
    trunc = np.zeros(n, dtype=bool)
    offsets = np.zeros(n + 1, dtype=np.int64)
    codes = bytearray()
    for t in range(n):
        out = run_protocol_recycling(
            StateVector(psis[t]), sign, rng, max_rounds=max_rounds, theta=theta
        )
        rounds[t] = out.rounds_used
        codes.extend(b.beam for b in out.path)
        offsets[t + 1] = len(codes)
        if out.truncated:
            trunc[t] = True
        else:
            fids[t] = out.fidelity_vs_input
            z_read[t] = out.path[-1].z_p
    path_codes = np.frombuffer(bytes(codes), dtype=np.int8)
    return rounds, fids, z_read, trunc, path_codes, offsets


def run_teleport_trials(trials, sign, seed, max_rounds=64, backend=None, theta=None):
    """Run `trials` independent recycling-protocol runs on random inputs.

    Input states are drawn Haar-uniformly from the seeded generator before
    any trial starts, so the set of inputs is backend-independent.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    name = default_backend() if backend is None else backend
    if name not in available_backends():
        raise ValueError(f"unknown or unavailable backend {name!r}")
    theta_val = theta_for_sign(sign) if theta is None else theta

    rng = np.random.default_rng(seed)
    psis = random_qubit_batch(rng, trials)

    if name == "compiled":
        u_plus, u_minus = first_beam_corrections(sign)
        raw = _kernels.run_trials(
            np.ascontiguousarray(psis),
            np.array(ak_unitary(theta_val)),
            np.array(u_plus),
            np.array(u_minus),
            np.array(CORRECTIONS.u4),  # (-1, +1): the sigma_x rotation
            np.array(CORRECTIONS.u3),  # (+1, -1): the sigma_z rotation
            rng.bit_generator,
            max_rounds,
        )
        rounds, fids, z_read, trunc, path_codes, offsets = raw
        if rounds.min() < 0:
            raise RuntimeError("kernel sampled a zero-amplitude branch")
        trunc = trunc.astype(bool)
    else:
        rounds, fids, z_read, trunc, path_codes, offsets = _run_trials_python(
            psis, theta_val, sign, rng, max_rounds
        )

    return TrialBatch(
        rounds=rounds,
        fidelities=fids,
        z_readings=z_read,
        truncated=trunc,
        path_codes=path_codes,
        path_offsets=offsets,
        trials=trials,
        sign=sign,
        theta=theta_val,
        seed=seed,
        max_rounds=max_rounds,
        backend=name,
    )
