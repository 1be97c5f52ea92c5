"""N-qubit density matrices: validation, named families, random ensembles.

Computational basis convention: polarization labels map as H -> |0> and
V -> |1>, so e.g. the two-excitation Dicke state is a sum of bitstrings
with exactly two 1s.
"""

from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-9  # accepts noisy experimentally reconstructed matrices


class StateError(ValueError):
    """Not a valid density matrix (shape, hermiticity, trace or positivity)."""


class QuantumState:
    """Immutable 2^N x 2^N density matrix.

    Pure states are the rank-1 special case; build them with
    :meth:`from_vector`.
    """

    def __init__(self, matrix: np.ndarray, *, validate: bool = True):
        mat = np.asarray(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise StateError(f"not a square matrix: shape {mat.shape}")
        n = int(np.log2(mat.shape[0]))
        if 2**n != mat.shape[0] or n < 1:
            raise StateError(f"dimension {mat.shape[0]} is not 2^N with N >= 1")
        if validate:
            if not np.allclose(mat, mat.conj().T, atol=HERMITICITY_TOL):
                raise StateError("matrix is not Hermitian")
            if abs(np.trace(mat).real - 1.0) > TRACE_TOL or abs(np.trace(mat).imag) > TRACE_TOL:
                raise StateError(f"trace is {np.trace(mat)}, expected 1")
            eigs = np.linalg.eigvalsh(mat)
            if eigs.min() < PSD_TOL:
                raise StateError(f"negative eigenvalue {eigs.min():.3e}")
        mat.flags.writeable = False
        self.matrix = mat
        self.n_qubits = n
        self.dim = mat.shape[0]

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "QuantumState":
        """Rank-1 state |psi><psi| from a (not necessarily normalized) ket."""
        v = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm < 1e-15:
            raise StateError("zero vector")
        v = v / norm
        return cls(np.outer(v, v.conj()), validate=False)

    def purity(self) -> float:
        """Tr(rho^2), between 2^-N (maximally mixed) and 1 (pure)."""
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __repr__(self) -> str:
        return f"QuantumState(n_qubits={self.n_qubits})"


# ---------------------------------------------------------------------------
# reduced and transformed states
# ---------------------------------------------------------------------------

def _as_tensor(mat: np.ndarray, n: int) -> np.ndarray:
    return mat.reshape((2,) * (2 * n))


def partial_trace(state: QuantumState, keep: list[int]) -> np.ndarray:
    """Reduced density matrix on the listed parties (order preserved)."""
    n = state.n_qubits
    keep = list(keep)
    if any(p < 0 or p >= n for p in keep) or len(set(keep)) != len(keep):
        raise StateError(f"bad party list {keep} for {n} qubits")
    t = _as_tensor(state.matrix, n)
    traced = [p for p in range(n) if p not in keep]
    for offset, p in enumerate(sorted(traced)):
        axis = p - offset
        t = np.trace(t, axis1=axis, axis2=axis + t.ndim // 2)
    d = 2 ** len(keep)
    # axes of the kept parties stay in original relative order
    return t.reshape(d, d)


def partial_transpose(state: QuantumState, parties: list[int]) -> np.ndarray:
    """Transpose the listed parties' indices, leaving the rest untouched."""
    n = state.n_qubits
    t = _as_tensor(state.matrix, n)
    perm = list(range(2 * n))
    for p in parties:
        perm[p], perm[p + n] = perm[p + n], perm[p]
    return t.transpose(perm).reshape(state.dim, state.dim)


def negativity(state: QuantumState, bipartition: list[int]) -> float:
    """(||rho^{T_A}||_1 - 1) / 2 for the given subset of parties.

    Zero for every PPT state; positive values certify entanglement across
    the cut (and for two qubits the converse holds too).
    """
    parties = sorted(set(bipartition))
    if not parties or len(parties) >= state.n_qubits:
        raise StateError(f"bipartition {bipartition} must be a nontrivial subset")
    eigs = np.linalg.eigvalsh(partial_transpose(state, parties))
    return float(max(0.0, (np.sum(np.abs(eigs)) - 1.0) / 2.0))


def apply_local_unitaries(state: QuantumState, unitaries: list[np.ndarray]) -> QuantumState:
    """Conjugate by U_1 x ... x U_N (one 2x2 unitary per qubit)."""
    if len(unitaries) != state.n_qubits:
        raise StateError("need one unitary per qubit")
    u = unitaries[0]
    for v in unitaries[1:]:
        u = np.kron(u, v)
    return QuantumState(u @ state.matrix @ u.conj().T, validate=False)


# ---------------------------------------------------------------------------
# named families
# ---------------------------------------------------------------------------

def _ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def bell(kind: str = "psi-") -> QuantumState:
    amplitudes = {
        "phi+": _ket("00") + _ket("11"),
        "phi-": _ket("00") - _ket("11"),
        "psi+": _ket("01") + _ket("10"),
        "psi-": _ket("01") - _ket("10"),
    }
    if kind not in amplitudes:
        raise StateError(f"unknown Bell state {kind!r}")
    return QuantumState.from_vector(amplitudes[kind])


def werner(p: float) -> QuantumState:
    """Singlet mixed with white noise: p |psi-><psi-| + (1-p) 1/4."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"werner parameter {p} outside [0, 1]")
    rho = p * bell("psi-").matrix + (1.0 - p) * np.eye(4) / 4.0
    return QuantumState(rho, validate=False)


def colored_noise(p: float) -> QuantumState:
    """Singlet mixed with anticorrelated colored noise |01><01|."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"colored-noise parameter {p} outside [0, 1]")
    noise = np.outer(_ket("01"), _ket("01").conj())
    rho = p * bell("psi-").matrix + (1.0 - p) * noise
    return QuantumState(rho, validate=False)


def ghz(n_qubits: int) -> QuantumState:
    if n_qubits < 2:
        raise StateError("GHZ needs at least 2 qubits")
    return QuantumState.from_vector(_ket("0" * n_qubits) + _ket("1" * n_qubits))


def w_state(n_qubits: int) -> QuantumState:
    """Equal superposition of all single-excitation bitstrings."""
    if n_qubits < 2:
        raise StateError("W needs at least 2 qubits")
    v = np.zeros(2**n_qubits, dtype=complex)
    for k in range(n_qubits):
        v[1 << k] = 1.0
    return QuantumState.from_vector(v)


def w_bar_state(n_qubits: int) -> QuantumState:
    """W with 0s and 1s exchanged (single-hole bitstrings)."""
    if n_qubits < 2:
        raise StateError("W-bar needs at least 2 qubits")
    v = np.zeros(2**n_qubits, dtype=complex)
    full = 2**n_qubits - 1
    for k in range(n_qubits):
        v[full ^ (1 << k)] = 1.0
    return QuantumState.from_vector(v)


def g_state(alpha: float) -> QuantumState:
    """Three-qubit family interpolating between W-bar (alpha=0) and W (alpha=pi/2).

    Matches the heralded three-photon state obtained by projecting the first
    qubit of the two-excitation four-qubit Dicke state onto
    cos(alpha)|0> + sin(alpha)|1>; at alpha=pi/2 the single-party z
    expectations are all +1/3.
    """
    v = np.cos(alpha) * 3 ** -0.5 * sum(
        _ket(b) for b in ("110", "101", "011")
    ) + np.sin(alpha) * 3 ** -0.5 * sum(_ket(b) for b in ("001", "010", "100"))
    return QuantumState.from_vector(v)


def dicke_4_2() -> QuantumState:
    """Four-qubit Dicke state with two excitations."""
    v = sum(_ket(b) for b in ("0011", "0101", "1001", "0110", "1010", "1100"))
    return QuantumState.from_vector(v)


def product_state(bitstring: str) -> QuantumState:
    if not bitstring or any(c not in "01" for c in bitstring):
        raise StateError(f"not a bitstring: {bitstring!r}")
    return QuantumState.from_vector(_ket(bitstring))


def make_state(spec: str) -> QuantumState:
    """Build a named state from a ``family[:arg]`` string.

    Accepted forms: ``bell``, ``bell:phi+``, ``werner:0.8``,
    ``colored_noise:0.3``, ``ghz:3``, ``w:3``, ``g:0.785``, ``dicke``,
    ``product:0110``.
    """
    name, _, arg = str(spec).strip().partition(":")
    name = name.lower()
    try:
        if name == "bell":
            return bell(arg or "psi-")
        if name == "werner":
            return werner(float(arg))
        if name in ("colored_noise", "colored"):
            return colored_noise(float(arg))
        if name == "ghz":
            return ghz(int(arg or 3))
        if name == "w":
            return w_state(int(arg or 3))
        if name == "g":
            return g_state(float(arg))
        if name == "dicke":
            return dicke_4_2()
        if name == "product":
            return product_state(arg)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, StateError):
            raise
        raise StateError(f"bad argument in state spec {spec!r}: {exc}") from exc
    raise StateError(f"unknown state family {name!r}")


# ---------------------------------------------------------------------------
# random ensembles
# ---------------------------------------------------------------------------

def random_pure(n_qubits: int, rng: np.random.Generator) -> QuantumState:
    """Haar-uniform pure state (normalized complex Gaussian vector)."""
    d = 2**n_qubits
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return QuantumState.from_vector(v)


def random_mixed(
    n_qubits: int, rng: np.random.Generator, ancilla_dim: int | None = None
) -> QuantumState:
    """Induced-measure mixed state: trace an ancilla out of a Haar pure state.

    Equivalent to rho = G G^dag / Tr with a d x ancilla_dim complex Gaussian
    G.  Defaults to ancilla_dim = 2^N (Hilbert-Schmidt measure).
    """
    d = 2**n_qubits
    k = ancilla_dim if ancilla_dim is not None else d
    if k < 1:
        raise StateError("ancilla_dim must be >= 1")
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return QuantumState(rho / np.trace(rho).real, validate=False)


def random_product_mixture(
    n_qubits: int, rng: np.random.Generator, n_terms: int = 6
) -> QuantumState:
    """Separable-by-construction mixture of random pure product states."""
    d = 2**n_qubits
    weights = rng.dirichlet(np.ones(n_terms))
    rho = np.zeros((d, d), dtype=complex)
    for wgt in weights:
        psi = np.ones(1, dtype=complex)
        for _ in range(n_qubits):
            a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            psi = np.kron(psi, a / np.linalg.norm(a))
        rho += wgt * np.outer(psi, psi.conj())
    return QuantumState(rho, validate=False)


def random_local_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary (QR of a Ginibre matrix, phase-fixed)."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
