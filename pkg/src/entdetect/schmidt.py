"""Two-qubit entanglement detection through locally determined Schmidt bases.

Each party reads its Schmidt basis off its own Bloch vector, redefines the
measurement axes accordingly, and the threshold test then needs at most
three correlation measurements.  Maximally entangled states have vanishing
Bloch vectors; a local filter on one side makes the partner's Bloch vector
emerge, after which the same recipe applies to the unfiltered state.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .pauli import SIGMA
from .states import QuantumState, StateError
from .tensor import bloch_vector

EXACT_BLOCH_THRESHOLD = 1e-7
SAMPLED_BLOCH_THRESHOLD = 0.05
DEGENERATE_Z_TOL = 1e-9


class VanishingBlochError(ValueError):
    """Bloch vector too short to define a basis; filtering is required."""


class FilterAnnihilatedError(ValueError):
    """The filter left (numerically) no state behind."""


@dataclass(frozen=True)
class SchmidtAngles:
    """Basis angles: |a> = cos(xi)|0> + e^{i phi} sin(xi)|1>."""

    xi: float
    phi: float

    def basis(self) -> tuple[np.ndarray, np.ndarray]:
        a = np.array([math.cos(self.xi), math.sin(self.xi) * np.exp(1j * self.phi)])
        a_perp = np.array(
            [math.sin(self.xi), -math.cos(self.xi) * np.exp(1j * self.phi)]
        )
        return a, a_perp


@dataclass(frozen=True)
class PrimedFrame:
    """Rotated single-qubit observables; z' points along the Bloch vector."""

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    degenerate: bool = False

    def as_tuple(self):
        return (self.sx, self.sy, self.sz)


def angles_from_bloch(b: np.ndarray, threshold: float = EXACT_BLOCH_THRESHOLD) -> SchmidtAngles:
    """Read the basis angles off a non-vanishing Bloch vector.

    cos(xi) = sqrt((1 + a_z)/2) and phi = atan2(a_y, a_x) for the
    normalized direction a; at a_z = +/-1 the standard basis already is the
    Schmidt basis and (xi, phi) degenerate to (0 or pi/2, 0).
    """
    b = np.asarray(b, dtype=float)
    norm = float(np.linalg.norm(b))
    if norm <= threshold:
        raise VanishingBlochError(f"|b| = {norm:.3e} <= {threshold}")
    alpha = b / norm
    az = float(np.clip(alpha[2], -1.0, 1.0))
    if 1.0 - abs(az) < DEGENERATE_Z_TOL:
        return SchmidtAngles(xi=0.0 if az > 0 else math.pi / 2, phi=0.0)
    xi = math.acos(math.sqrt((1.0 + az) / 2.0))
    phi = math.atan2(alpha[1], alpha[0]) % (2.0 * math.pi)
    return SchmidtAngles(xi=xi, phi=phi)


def primed_frame(b: np.ndarray, threshold: float = EXACT_BLOCH_THRESHOLD) -> PrimedFrame:
    """Rotated observables built from the Bloch direction alpha.

    z' = alpha . sigma, and x', y' complete a frame that is pairwise
    anticommuting with unit squares.  For alpha_z = +/-1 the formulas are
    0/0 and the unprimed frame is returned.
    """
    b = np.asarray(b, dtype=float)
    norm = float(np.linalg.norm(b))
    if norm <= threshold:
        raise VanishingBlochError(f"|b| = {norm:.3e} <= {threshold}")
    ax, ay, az = b / norm
    if 1.0 - abs(az) < DEGENERATE_Z_TOL:
        return PrimedFrame(SIGMA["X"], SIGMA["Y"], SIGMA["Z"], degenerate=True)
    s = math.sqrt(1.0 - az * az)
    sz = ax * SIGMA["X"] + ay * SIGMA["Y"] + az * SIGMA["Z"]
    sx = (-ax * az * SIGMA["X"] - ay * az * SIGMA["Y"] + s * s * SIGMA["Z"]) / s
    sy = (ay * SIGMA["X"] - ax * SIGMA["Y"]) / s
    return PrimedFrame(sx, sy, sz)


def filter_operator(epsilon: float, basis: np.ndarray | None = None) -> np.ndarray:
    """F = eps |0'><0'| + |1'><1'| in the given orthonormal basis (columns)."""
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"filter strength {epsilon} outside [0, 1)")
    if basis is None:
        basis = np.eye(2, dtype=complex)
    b = np.asarray(basis, dtype=complex)
    if b.shape != (2, 2) or not np.allclose(b.conj().T @ b, np.eye(2), atol=1e-10):
        raise ValueError("basis must be a 2x2 matrix with orthonormal columns")
    return epsilon * np.outer(b[:, 0], b[:, 0].conj()) + np.outer(b[:, 1], b[:, 1].conj())


def apply_filter(
    state: QuantumState,
    party: int,
    epsilon: float,
    basis: np.ndarray | None = None,
) -> tuple[QuantumState, float]:
    """Post-selected state after F on one party, plus the success probability."""
    if not 0 <= party < state.n_qubits:
        raise StateError(f"party {party} out of range")
    f = filter_operator(epsilon, basis)
    ops = [np.eye(2, dtype=complex)] * state.n_qubits
    ops[party] = f
    big = ops[0]
    for op in ops[1:]:
        big = np.kron(big, op)
    unnormalized = big @ state.matrix @ big.conj().T
    success = float(np.trace(unnormalized).real)
    if success < 1e-12:
        raise FilterAnnihilatedError("filter annihilated the state")
    return QuantumState(unnormalized / success, validate=False), success


@dataclass
class SchmidtTranscript:
    """Ordered record of everything the protocol did, plus the verdict."""

    steps: list[dict] = field(default_factory=list)
    correlations: list[tuple[str, float]] = field(default_factory=list)
    criterion: float = 0.0
    entangled: bool = False

    def add(self, step: str, **payload) -> None:
        self.steps.append({"step": step, **payload})

    def n_correlations(self) -> int:
        return len(self.correlations)

    def to_json_lines(self) -> str:
        return "\n".join(json.dumps(s) for s in self.steps)

    @classmethod
    def from_json_lines(cls, text: str) -> "SchmidtTranscript":
        t = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            t.steps.append(rec)
            if rec["step"] == "correlation":
                t.correlations.append((rec["setting"], rec["value"]))
            if rec["step"] == "verdict":
                t.criterion = rec["sum"]
                t.entangled = rec["entangled"]
        return t


def _expectation(
    state: QuantumState,
    op_a: np.ndarray,
    op_b: np.ndarray,
    shots: int | None,
    rng: np.random.Generator | None,
) -> float:
    value = float(np.trace(state.matrix @ np.kron(op_a, op_b)).real)
    value = float(np.clip(value, -1.0, 1.0))
    if shots is None:
        return value
    ups = rng.binomial(shots, (1.0 + value) / 2.0)
    return float(2.0 * ups / shots - 1.0)


def _measure_bloch(
    state: QuantumState, party: int, shots: int | None, rng
) -> np.ndarray:
    if shots is None:
        return bloch_vector(state, party)
    out = []
    for axis in "XYZ":
        ops = [SIGMA["I"], SIGMA["I"]]
        ops[party] = SIGMA[axis]
        out.append(_expectation(state, ops[0], ops[1], shots, rng))
    return np.array(out)


def schmidt_protocol(
    state: QuantumState,
    epsilon: float = 0.5,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> SchmidtTranscript:
    """Run the full detection sequence on a two-qubit state.

    Measure both Bloch vectors; if one vanishes, filter on the other side
    (standard basis when both vanish) and read the bases off the filtered
    state; then measure T_{z'z'}, T_{y'y'} and, only if the squared sum is
    still at most 1, T_{x'y'}.  The verdict applies to the original state:
    the filter is removed before the correlation measurements.
    """
    if state.n_qubits != 2:
        raise StateError("the Schmidt protocol is defined for two qubits")
    if shots is not None and rng is None:
        rng = np.random.default_rng()
    threshold = EXACT_BLOCH_THRESHOLD if shots is None else SAMPLED_BLOCH_THRESHOLD
    transcript = SchmidtTranscript()

    blochs = [_measure_bloch(state, party, shots, rng) for party in (0, 1)]
    for party, b in enumerate(blochs):
        transcript.add("bloch", party=party, vector=[float(x) for x in b])
    vanishing = [float(np.linalg.norm(b)) <= threshold for b in blochs]

    if any(vanishing):
        if all(vanishing):
            filter_party, basis = 0, None  # free choice: Alice, standard basis
        else:
            # filter on the non-vanishing side, in its own Schmidt basis
            filter_party = vanishing.index(False)
            angles = angles_from_bloch(blochs[filter_party], threshold)
            basis = np.column_stack(angles.basis())
        filtered, success = apply_filter(state, filter_party, epsilon, basis)
        transcript.add(
            "filter", party=filter_party, epsilon=epsilon, success_prob=success
        )
        blochs = [_measure_bloch(filtered, party, shots, rng) for party in (0, 1)]
        for party, b in enumerate(blochs):
            transcript.add("bloch", party=party, vector=[float(x) for x in b])

    frames = []
    for party, b in enumerate(blochs):
        frame = primed_frame(b, threshold)  # may raise VanishingBloch: mixed state
        frames.append(frame)
        alpha = b / np.linalg.norm(b)
        transcript.add(
            "frame",
            party=party,
            alpha=[float(x) for x in alpha],
            degenerate=frame.degenerate,
        )

    fa, fb = frames

    def measure(label: str, op_a: np.ndarray, op_b: np.ndarray) -> None:
        value = _expectation(state, op_a, op_b, shots, rng)
        transcript.correlations.append((label, value))
        transcript.add("correlation", setting=label, value=value)

    measure("z'z'", fa.sz, fb.sz)
    measure("y'y'", fa.sy, fb.sy)
    total = sum(v**2 for _, v in transcript.correlations)
    if total <= 1.0:
        measure("x'y'", fa.sx, fb.sy)
        total = sum(v**2 for _, v in transcript.correlations)

    transcript.criterion = total
    transcript.entangled = total > 1.0
    transcript.add("verdict", sum=total, entangled=transcript.entangled)
    return transcript
