# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled Monte-Carlo loop for the recycling teleportation protocol.

This mirrors the NumPy reference implementation round for round: the same
number of uniform draws in the same order (meter A1, meter A3, then either
the system z reading or the carrier meter A2), the same branch selection
rule (outcome +1 when the draw falls below its Born probability), and the
same correction algebra.  A seeded run therefore follows the same
trajectory on either backend.

The kernel is deliberately ignorant of protocol conventions: the evolved
unitary and all correction matrices are passed in, and branches are
identified by which meter flipped (the (-1,+1) reading accompanies a
sigma_x-rotated system, the (+1,-1) reading a sigma_z-rotated one).
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport sqrt
from numpy.random cimport bitgen_t

cnp.import_array()

KERNEL_VERSION = 1

ctypedef double complex cplx

cdef double SQRT1_2 = sqrt(0.5)
cdef cplx CI = 1j
cdef cplx YP0 = SQRT1_2        # |y+> amplitudes
cdef cplx YP1 = CI * SQRT1_2


cdef inline double _abs2(cplx z):
    return z.real * z.real + z.imag * z.imag


cdef int _measure_y(cplx* x, int w, double u):
    """Project a sigma_y reading on the qubit of index weight w; returns +-1."""
    cdef double p_plus = 0.0
    cdef double p, inv
    cdef int i, j, outcome
    cdef cplx c
    for i in range(16):
        if i & w:
            continue
        j = i | w
        c = SQRT1_2 * (x[i] - CI * x[j])
        p_plus += _abs2(c)
    outcome = 1 if u < p_plus else -1
    p = p_plus if outcome == 1 else 1.0 - p_plus
    inv = 1.0 / sqrt(p)
    for i in range(16):
        if i & w:
            continue
        j = i | w
        if outcome == 1:
            c = SQRT1_2 * (x[i] - CI * x[j]) * inv
            x[i] = SQRT1_2 * c
            x[j] = CI * SQRT1_2 * c
        else:
            c = SQRT1_2 * (x[i] + CI * x[j]) * inv
            x[i] = SQRT1_2 * c
            x[j] = -CI * SQRT1_2 * c
    return outcome


cdef int _measure_z_system(cplx* x, double u):
    """Project a sigma_z reading on the system qubit (index weight 8)."""
    cdef double p_plus = 0.0
    cdef double p, inv
    cdef int i, outcome
    for i in range(8):
        p_plus += _abs2(x[i])
    outcome = 1 if u < p_plus else -1
    p = p_plus if outcome == 1 else 1.0 - p_plus
    inv = 1.0 / sqrt(p)
    if outcome == 1:
        for i in range(8):
            x[i] = x[i] * inv
        for i in range(8, 16):
            x[i] = 0.0
    else:
        for i in range(8):
            x[i] = 0.0
        for i in range(8, 16):
            x[i] = x[i] * inv
    return outcome


cdef void _set_bra(cplx* b, int outcome):
    """Conjugated sigma_y eigenstate components for contraction."""
    b[0] = SQRT1_2
    b[1] = -CI * SQRT1_2 if outcome == 1 else CI * SQRT1_2


cdef void _extract_carrier(cplx* x, int z_outcome, cplx* out):
    """Carrier (A2) amplitudes after the first-beam readings."""
    cdef cplx b[2]
    cdef int base, a1, a2, a3
    cdef cplx acc
    cdef double norm
    _set_bra(b, 1)
    base = 0 if z_outcome == 1 else 8
    for a2 in range(2):
        acc = 0.0
        for a1 in range(2):
            for a3 in range(2):
                acc = acc + b[a1] * b[a3] * x[base + a1 * 4 + a2 * 2 + a3]
        out[a2] = acc
    norm = 1.0 / sqrt(_abs2(out[0]) + _abs2(out[1]))
    out[0] = out[0] * norm
    out[1] = out[1] * norm


cdef void _extract_system(cplx* x, int o1, int o2, int o3, cplx* out):
    """System amplitudes after a recycling-branch meter readout."""
    cdef cplx b1[2]
    cdef cplx b2[2]
    cdef cplx b3[2]
    cdef int p, a1, a2, a3
    cdef cplx acc
    cdef double norm
    _set_bra(b1, o1)
    _set_bra(b2, o2)
    _set_bra(b3, o3)
    for p in range(2):
        acc = 0.0
        for a1 in range(2):
            for a2 in range(2):
                for a3 in range(2):
                    acc = acc + b1[a1] * b2[a2] * b3[a3] * x[p * 8 + a1 * 4 + a2 * 2 + a3]
        out[p] = acc
    norm = 1.0 / sqrt(_abs2(out[0]) + _abs2(out[1]))
    out[0] = out[0] * norm
    out[1] = out[1] * norm


def run_trials(cplx[:, ::1] psis, cplx[:, ::1] u16,
               cplx[:, ::1] u_first_plus, cplx[:, ::1] u_first_minus,
               cplx[:, ::1] u_x_branch, cplx[:, ::1] u_z_branch,
               object bit_generator, int max_rounds):
    """Run one recycling-protocol trial per input state.

    psis            (n, 2) normalized input amplitudes, one per trial
    u16             (16, 16) interaction unitary at the protocol angle
    u_first_plus/-  carrier corrections for system readings +1 / -1
    u_x_branch      system correction for the (-1, +1) meter reading
    u_z_branch      system correction for the (+1, -1) meter reading
    bit_generator   numpy BitGenerator supplying the uniform draws
    max_rounds      recycling cutoff; exceeded trials are marked truncated

    Returns (rounds, fidelities, z_readings, truncated, path_codes,
    path_offsets); trial t visited beams path_codes[path_offsets[t]:
    path_offsets[t + 1]].  Truncated trials carry NaN fidelity and a zero
    z reading.
    """
    cdef bitgen_t* rng = <bitgen_t*> PyCapsule_GetPointer(
        bit_generator.capsule, "BitGenerator")
    cdef Py_ssize_t n = psis.shape[0]

    rounds_arr = np.zeros(n, dtype=np.int32)
    fid_arr = np.full(n, np.nan, dtype=np.float64)
    z_arr = np.zeros(n, dtype=np.int8)
    trunc_arr = np.zeros(n, dtype=np.uint8)
    offsets_arr = np.zeros(n + 1, dtype=np.int64)
    codes = bytearray()

    cdef cnp.int32_t[::1] rounds = rounds_arr
    cdef double[::1] fids = fid_arr
    cdef cnp.int8_t[::1] z_read = z_arr
    cdef cnp.uint8_t[::1] trunc = trunc_arr
    cdef cnp.int64_t[::1] offsets = offsets_arr

    cdef cplx psi[2]
    cdef cplx x[16]
    cdef cplx y[16]
    cdef cplx out[2]
    cdef cplx corrected[2]
    cdef cplx amp, overlap
    cdef cplx[:, ::1] corr
    cdef Py_ssize_t t
    cdef int r, i, k, p, a1, a2, a3, o1, o2, o3, oz, done
    cdef double u

    for t in range(n):
        psi[0] = psis[t, 0]
        psi[1] = psis[t, 1]
        done = 0
        r = 0
        while r < max_rounds and not done:
            r += 1
            # fresh apparatus: |psi> (x) |y+ y+ y+>, then the interaction
            for p in range(2):
                for a1 in range(2):
                    for a2 in range(2):
                        for a3 in range(2):
                            amp = psi[p]
                            amp = amp * (YP1 if a1 else YP0)
                            amp = amp * (YP1 if a2 else YP0)
                            amp = amp * (YP1 if a3 else YP0)
                            x[p * 8 + a1 * 4 + a2 * 2 + a3] = amp
            for i in range(16):
                amp = 0.0
                for k in range(16):
                    amp = amp + u16[i, k] * x[k]
                y[i] = amp

            u = rng.next_double(rng.state)
            o1 = _measure_y(y, 4, u)
            u = rng.next_double(rng.state)
            o3 = _measure_y(y, 1, u)

            if o1 == 1 and o3 == 1:
                codes.append(1)
                u = rng.next_double(rng.state)
                oz = _measure_z_system(y, u)
                _extract_carrier(y, oz, out)
                corr = u_first_plus if oz == 1 else u_first_minus
                for i in range(2):
                    corrected[i] = corr[i, 0] * out[0] + corr[i, 1] * out[1]
                overlap = (psis[t, 0].conjugate() * corrected[0]
                           + psis[t, 1].conjugate() * corrected[1])
                fids[t] = _abs2(overlap)
                z_read[t] = <cnp.int8_t> oz
                done = 1
            elif o1 == -1 and o3 == -1:
                # zero-probability reading; unreachable for draws in [0, 1)
                rounds[t] = -1
                done = -1
            else:
                codes.append(3 if o1 == -1 else 2)
                u = rng.next_double(rng.state)
                o2 = _measure_y(y, 2, u)
                _extract_system(y, o1, o2, o3, out)
                corr = u_x_branch if o1 == -1 else u_z_branch
                for i in range(2):
                    corrected[i] = corr[i, 0] * out[0] + corr[i, 1] * out[1]
                psi[0] = corrected[0]
                psi[1] = corrected[1]

        if done == -1:
            offsets[t + 1] = len(codes)
            continue
        rounds[t] = r
        if not done:
            trunc[t] = 1
        offsets[t + 1] = len(codes)

    return (rounds_arr, fid_arr, z_arr, trunc_arr,
            np.frombuffer(bytes(codes), dtype=np.int8), offsets_arr)
