"""Correlation tensors of N-qubit states and the squared-sum threshold test.

Every density matrix is fixed by the 4^N expectation values
T_w = Tr[rho (sigma_{w_1} x ... x sigma_{w_N})], and a state is certified
entangled as soon as the squares of measured identity-free entries exceed 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .pauli import (
    PauliStringError,
    all_settings,
    full_weight_settings,
    is_full_weight,
    setting_matrix,
    validate_setting,
)
from .states import QuantumState, StateError, partial_trace

ENTRY_TOL = 1e-9


class CriterionError(ValueError):
    """Invalid input to the threshold test (duplicate or mixed-length settings)."""


def correlation(state: QuantumState, setting: str) -> float:
    """Expectation value of the local-Pauli product named by ``setting``."""
    word = validate_setting(setting, state.n_qubits)
    value = np.trace(state.matrix @ setting_matrix(word)).real
    return float(np.clip(value, -1.0, 1.0))


def bloch_vector(state: QuantumState, party: int) -> np.ndarray:
    """Single-party (x, y, z) Pauli expectations, norm <= 1."""
    if not 0 <= party < state.n_qubits:
        raise StateError(f"party {party} out of range for {state.n_qubits} qubits")
    reduced = partial_trace(state, [party])
    return np.array(
        [
            reduced[0, 1].real * 2,
            -reduced[0, 1].imag * 2,
            (reduced[0, 0] - reduced[1, 1]).real,
        ]
    )


def sample_correlation(
    state: QuantumState, setting: str, shots: int, rng: np.random.Generator
) -> float:
    """Finite-statistics estimate: mean of ``shots`` simulated +/-1 outcomes.

    Outcomes are +1 with probability (1 + T)/2, so the standard error is
    about sqrt((1 - T^2)/shots).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    t = correlation(state, setting)
    ups = rng.binomial(shots, (1.0 + t) / 2.0)
    return float(2.0 * ups / shots - 1.0)


@dataclass(frozen=True)
class CorrelationTensor:
    """All 4^N correlation entries of a state, keyed by Pauli word."""

    n_qubits: int
    entries: dict[str, float]

    def __post_init__(self):
        ident = "I" * self.n_qubits
        if abs(self.entries.get(ident, 0.0) - 1.0) > ENTRY_TOL:
            raise ValueError("identity entry must be 1")
        for word, value in self.entries.items():
            validate_setting(word, self.n_qubits)
            if abs(value) > 1.0 + ENTRY_TOL:
                raise ValueError(f"entry {word} = {value} outside [-1, 1]")

    def full_weight(self) -> dict[str, float]:
        return {w: v for w, v in self.entries.items() if is_full_weight(w)}

    def __getitem__(self, word: str) -> float:
        return self.entries[validate_setting(word, self.n_qubits)]

    def to_json(self) -> str:
        return json.dumps({"n": self.n_qubits, "entries": self.entries})

    @classmethod
    def from_json(cls, text: str) -> "CorrelationTensor":
        data = json.loads(text)
        return cls(int(data["n"]), {str(k): float(v) for k, v in data["entries"].items()})


def full_tensor(state: QuantumState) -> CorrelationTensor:
    """Compute every correlation entry (practical up to N ~ 10 by memory)."""
    entries = {w: correlation(state, w) for w in all_settings(state.n_qubits)}
    return CorrelationTensor(state.n_qubits, entries)


def full_weight_block(state: QuantumState) -> np.ndarray:
    """The identity-free entries as a (3,)*N array indexed by (x, y, z)."""
    n = state.n_qubits
    block = np.empty((3,) * n)
    for idx, word in enumerate(full_weight_settings(n)):
        block.flat[idx] = correlation(state, word)
    return block


def reconstruct(tensor: CorrelationTensor) -> QuantumState:
    """Rebuild the density matrix as 2^-N sum_w T_w (sigma_w1 x ... x sigma_wN)."""
    n = tensor.n_qubits
    d = 2**n
    if len(tensor.entries) != 4**n:
        raise ValueError("reconstruction needs all 4^N entries")
    rho = np.zeros((d, d), dtype=complex)
    for word, value in tensor.entries.items():
        rho += value * setting_matrix(word)
    return QuantumState(rho / d)


def criterion_sum(measurements) -> tuple[float, bool]:
    """Threshold test over distinct full-weight settings.

    ``measurements`` is an iterable of (setting, value) pairs or a mapping.
    Returns (sum of squares, sum > 1).  The comparison is strict: equality
    does not certify entanglement.  Duplicate settings raise, since double
    counting would fake a detection.
    """
    pairs = measurements.items() if hasattr(measurements, "items") else measurements
    total = 0.0
    seen: set[str] = set()
    length = None
    for setting, value in pairs:
        word = validate_setting(setting)
        if length is None:
            length = len(word)
        elif len(word) != length:
            raise CriterionError(f"mixed setting lengths ({word!r})")
        if not is_full_weight(word):
            raise CriterionError(f"setting {word!r} has identity slots")
        if word in seen:
            raise CriterionError(f"setting {word!r} measured twice")
        seen.add(word)
        if abs(value) > 1.0 + ENTRY_TOL:
            raise CriterionError(f"correlation {value} outside [-1, 1]")
        total += float(value) ** 2
    return total, total > 1.0


def state_to_json(state: QuantumState) -> str:
    """Row-major [re, im] pairs; inverse of :func:`state_from_json`."""
    pairs = [[z.real, z.imag] for z in state.matrix.reshape(-1)]
    return json.dumps({"n": state.n_qubits, "matrix": pairs})


def state_from_json(text: str) -> QuantumState:
    data = json.loads(text)
    d = 2 ** int(data["n"])
    flat = np.array([complex(re, im) for re, im in data["matrix"]])
    if flat.size != d * d:
        raise StateError("matrix size does not match qubit count")
    return QuantumState(flat.reshape(d, d))


__all__ = [
    "CorrelationTensor",
    "CriterionError",
    "PauliStringError",
    "bloch_vector",
    "correlation",
    "criterion_sum",
    "full_tensor",
    "full_weight_block",
    "reconstruct",
    "sample_correlation",
    "state_from_json",
    "state_to_json",
]
