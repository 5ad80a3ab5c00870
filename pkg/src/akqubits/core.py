"""Dense state-vector primitives for small qubit registers.

Everything downstream works on at most five qubits, so states are plain
complex128 arrays of length 2**n and operators are dense matrices.  The
conventions are fixed once here and relied on everywhere else:

* sigma_z |0> = +|0>, sigma_z |1> = -|1>.
* |+> and |-> denote the sigma_y eigenstates (|0> +- i|1>)/sqrt(2), so
  sigma_z |+> = |->.
* Tensor factors are ordered most-significant first.  The four-qubit
  register is P (x) A1 (x) A2 (x) A3, i.e. basis index p*8 + a1*4 + a2*2 + a3;
  the five-qubit register used for swapping prepends a reference qubit R.
"""

import math
from enum import Enum
from functools import lru_cache

import numpy as np

NORM_ATOL = 1e-9
HERM_ATOL = 1e-12


class LayoutError(ValueError):
    """A qubit label or position does not fit the register addressed."""


class ZeroProbabilityError(ValueError):
    """A projection was requested onto an outcome of probability zero."""


# ---------- register layout ----------


class Qubit(Enum):
    """Named qubits of the measurement model."""

    P = "P"    # system spin being measured
    A1 = "A1"  # meter for sigma_x
    A2 = "A2"  # meter for sigma_y
    A3 = "A3"  # meter for sigma_z
    R = "R"    # reference qubit entangled with P (swapping only)


#: Qubit order for each register size, most-significant factor first.
LAYOUTS = {
    1: (Qubit.P,),
    4: (Qubit.P, Qubit.A1, Qubit.A2, Qubit.A3),
    5: (Qubit.R, Qubit.P, Qubit.A1, Qubit.A2, Qubit.A3),
}


def qubit_position(qubit, n_qubits):
    """Position of `qubit` (a Qubit or an int index) in an n-qubit register."""
    if isinstance(qubit, Qubit):
        layout = LAYOUTS.get(n_qubits)
        if layout is None or qubit not in layout:
            raise LayoutError(f"{qubit} is not part of the {n_qubits}-qubit layout")
        return layout.index(qubit)
    pos = int(qubit)
    if not 0 <= pos < n_qubits:
        raise LayoutError(f"position {pos} out of range for {n_qubits} qubits")
    return pos


# ---------- elementary constants ----------

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
ID2 = np.eye(2, dtype=complex)

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
#: sigma_y eigenstates; Y_PLUS is the apparatus ready state.
Y_PLUS = np.array([1, 1j], dtype=complex) / np.sqrt(2)
Y_MINUS = np.array([1, -1j], dtype=complex) / np.sqrt(2)

#: LEVI_CIVITA[i, j, k] = epsilon_{ijk} with axes 0,1,2 = x,y,z.
LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_j, _i, _k] = -1.0
LEVI_CIVITA.setflags(write=False)

for _m in PAULI.values():
    _m.setflags(write=False)
ID2.setflags(write=False)
for _v in (KET_0, KET_1, Y_PLUS, Y_MINUS):
    _v.setflags(write=False)


# ---------- states ----------


class StateVector:
    """Normalized pure state of an n-qubit register.

    Wraps a read-only complex128 array of length 2**n.  The constructor
    validates the norm; use :meth:`from_unnormalized` to normalize raw
    amplitudes (e.g. after a projection).
    """

    __slots__ = ("amplitudes", "n_qubits")

    def __init__(self, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be one-dimensional")
        n = int(amps.size).bit_length() - 1
        if 2**n != amps.size or amps.size < 2:
            raise ValueError(f"length {amps.size} is not a power of two >= 2")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond {NORM_ATOL}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "n_qubits", n)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @classmethod
    def from_unnormalized(cls, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm <= NORM_ATOL:
            raise ZeroProbabilityError("cannot normalize a (near-)zero vector")
        return cls(amps / norm)

    @property
    def dim(self):
        return self.amplitudes.size

    def reshaped(self):
        """View of the amplitudes as an n-fold (2, ..., 2) tensor."""
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def overlap(self, other):
        """Inner product <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


def ket(labels):
    """Product state from a character per qubit: 0, 1, + or - (sigma_y basis).

    >>> ket("0+++").n_qubits
    4
    """
    table = {"0": KET_0, "1": KET_1, "+": Y_PLUS, "-": Y_MINUS}
    try:
        factors = [table[c] for c in labels]
    except KeyError as exc:
        raise ValueError(f"unknown ket label {exc.args[0]!r}") from None
    if not factors:
        raise ValueError("need at least one qubit label")
    amps = factors[0]
    for f in factors[1:]:
        amps = np.kron(amps, f)
    return StateVector(amps)


def tensor(*states):
    """Tensor product of StateVectors, most-significant factor first."""
    if not states:
        raise ValueError("need at least one factor")
    amps = states[0].amplitudes
    for s in states[1:]:
        amps = np.kron(amps, s.amplitudes)
    return StateVector(amps)


def fidelity(a, b):
    """|<a|b>|^2 for pure states of equal dimension."""
    if a.dim != b.dim:
        raise LayoutError("states live on different registers")
    return abs(a.overlap(b)) ** 2


def random_qubit_state(rng):
    """Haar-random single-qubit state.

    Draws four standard normals (re/im of both amplitudes) and normalizes;
    the induced distribution on the Bloch sphere is uniform.
    """
    z = rng.standard_normal(4)
    return StateVector.from_unnormalized(z[:2] + 1j * z[2:])


def random_qubit_batch(rng, n):
    """(n, 2) array of Haar-random qubit amplitudes.

    Consumes the generator exactly like n successive calls to
    :func:`random_qubit_state`, so seeded runs are reproducible whether
    states are drawn singly or in a batch.
    """
    z = rng.standard_normal((int(n), 4))
    amps = z[:, :2] + 1j * z[:, 2:]
    return amps / np.linalg.norm(amps, axis=1, keepdims=True)


# ---------- operators ----------


@lru_cache(maxsize=None)
def pauli_on(qubit, axis, n_qubits):
    """Pauli `axis` acting on one qubit of an n-qubit register.

    `qubit` may be a Qubit label (resolved through LAYOUTS) or an int
    position.  The result is cached and read-only.
    """
    if axis not in PAULI:
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    pos = qubit_position(qubit, n_qubits)
    op = embed_single(PAULI[axis], pos, n_qubits)
    op.setflags(write=False)
    return op


def embed_single(op2, position, n_qubits):
    """Embed a 2x2 operator at `position` in an n-qubit register."""
    if op2.shape != (2, 2):
        raise ValueError("expected a single-qubit operator")
    if not 0 <= position < n_qubits:
        raise LayoutError(f"position {position} out of range for {n_qubits} qubits")
    op = np.array([[1.0 + 0j]])
    for k in range(n_qubits):
        op = np.kron(op, op2 if k == position else ID2)
    return op


def is_hermitian(op, atol=HERM_ATOL):
    return bool(np.allclose(op, op.conj().T, atol=atol, rtol=0))


def is_unitary(op, atol=HERM_ATOL):
    eye = np.eye(op.shape[0])
    return bool(np.allclose(op.conj().T @ op, eye, atol=atol, rtol=0))


def expectation(observable, state):
    """<state| observable |state> as a real number.

    Raises ValueError if the observable is not Hermitian or the residual
    imaginary part exceeds 1e-10.
    """
    if not is_hermitian(observable, atol=1e-10):
        raise ValueError("observable must be Hermitian")
    val = np.vdot(state.amplitudes, observable @ state.amplitudes)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary residue {val.imag!r}")
    return float(val.real)


def variance(observable, state):
    """<O^2> - <O>^2; clamped at zero against rounding."""
    amps = state.amplitudes
    v = observable @ amps
    mean = np.vdot(amps, v)
    second = np.vdot(v, v)  # <O psi|O psi> = <O^2> for Hermitian O
    if abs(mean.imag) > 1e-10:
        raise ValueError("observable must be Hermitian")
    return max(float(second.real - mean.real**2), 0.0)


# ---------- projective measurement ----------


def _binary_outcome_data(state, observable):
    """Shared Born-rule arithmetic for a +-1-valued observable."""
    amps = state.amplitudes
    v = observable @ amps
    p_plus = 0.5 * (1.0 + float(np.vdot(amps, v).real))
    return v, min(max(p_plus, 0.0), 1.0)


def _validate_involution(observable, dim):
    if observable.shape != (dim, dim):
        raise LayoutError("observable dimension does not match the state")
    eye = np.eye(dim)
    if not np.allclose(observable.conj().T @ observable, eye, atol=1e-9, rtol=0) or not is_hermitian(
        observable, atol=1e-9
    ):
        raise ValueError("observable must be a Hermitian involution (eigenvalues +-1)")


def outcome_probability(state, observable, outcome, validate=True):
    """Born probability of `outcome` (+1 or -1) without projecting."""
    if outcome not in (+1, -1):
        raise ValueError("outcome must be +1 or -1")
    if validate:
        _validate_involution(observable, state.dim)
    _, p_plus = _binary_outcome_data(state, observable)
    return p_plus if outcome == +1 else 1.0 - p_plus


def project_outcome(state, observable, outcome, validate=True):
    """Deterministic projection onto the `outcome` (+1 or -1) eigenspace.

    Returns (probability, post_state).  Raises ZeroProbabilityError if the
    requested outcome has probability below 1e-12.
    """
    if outcome not in (+1, -1):
        raise ValueError("outcome must be +1 or -1")
    if validate:
        _validate_involution(observable, state.dim)
    v, p_plus = _binary_outcome_data(state, observable)
    p = p_plus if outcome == +1 else 1.0 - p_plus
    if p < 1e-12:
        raise ZeroProbabilityError(f"outcome {outcome:+d} has probability {p!r}")
    post = 0.5 * (state.amplitudes + outcome * v)
    return p, StateVector(post / math.sqrt(p))


def measure_observable(state, observable, rng, validate=True):
    """Projective measurement of a +-1-valued observable.

    Consumes exactly one uniform draw from `rng`; the outcome is +1 when
    the draw falls below P(+1).  Returns (outcome, probability, post_state).
    """
    if validate:
        _validate_involution(observable, state.dim)
    v, p_plus = _binary_outcome_data(state, observable)
    outcome = +1 if rng.random() < p_plus else -1
    p = p_plus if outcome == +1 else 1.0 - p_plus
    post = 0.5 * (state.amplitudes + outcome * v)
    return outcome, p, StateVector(post / math.sqrt(p))


# ---------- density matrices and entropy ----------


class DensityMatrix:
    """Validated density matrix (Hermitian, unit trace, positive)."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if not is_hermitian(m, atol=1e-10):
            raise ValueError("density matrix must be Hermitian")
        tr = float(m.trace().real)
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"trace {tr!r} deviates from 1")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @property
    def dim(self):
        return self.matrix.shape[0]

    def eigenvalues(self):
        """Real spectrum, ascending, clipped to [0, 1]."""
        return np.clip(np.linalg.eigvalsh(self.matrix), 0.0, 1.0)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def partial_trace(state, keep):
    """Reduced density matrix of a pure state over the `keep` qubits.

    `keep` is an iterable of Qubit labels or int positions; it must be a
    nonempty proper subset of the register, and the kept qubits retain
    their register order.
    """
    n = state.n_qubits
    positions = sorted({qubit_position(q, n) for q in keep})
    if not positions or len(positions) == n:
        raise LayoutError("keep must be a nonempty proper subset of the register")
    traced = [p for p in range(n) if p not in positions]
    psi = state.reshaped()
    # rho[keep, keep'] = sum_traced psi psi*
    rho = np.tensordot(psi, psi.conj(), axes=(traced, traced))
    d = 2 ** len(positions)
    return DensityMatrix(rho.reshape(d, d))


def von_neumann_entropy(rho):
    """Entropy -sum(lam ln lam) in nats; 0 ln 0 := 0."""
    eigs = rho.eigenvalues() if isinstance(rho, DensityMatrix) else np.clip(
        np.linalg.eigvalsh(np.asarray(rho, dtype=complex)), 0.0, 1.0
    )
    eigs = eigs[eigs > 1e-300]
    return float(-np.sum(eigs * np.log(eigs)))


def binary_entropy(lam):
    """Entropy of the spectrum {lam, 1 - lam} in nats."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda {lam!r} outside [0, 1]")
    total = 0.0
    for p in (lam, 1.0 - lam):
        if p > 1e-300:
            total -= p * math.log(p)
    return total
