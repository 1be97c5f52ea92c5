"""Pauli words and their tensor-product algebra.

A measurement setting on N qubits is written as an uppercase word over the
alphabet ``I, X, Y, Z`` ("IZX" = identity on qubit 0, sigma_z on qubit 1,
sigma_x on qubit 2).  Settings without any ``I`` are called full weight;
only those enter the squared-correlation threshold test.
"""

from __future__ import annotations

import functools
import itertools
from typing import Iterator

import numpy as np

AXES = "IXYZ"

SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class PauliStringError(ValueError):
    """Malformed or incompatible Pauli word."""


def validate_setting(setting: str, n_qubits: int | None = None) -> str:
    """Return the word uppercased, or raise ``PauliStringError``."""
    word = str(setting).upper()
    if not word or any(c not in AXES for c in word):
        raise PauliStringError(f"not a Pauli word: {setting!r}")
    if n_qubits is not None and len(word) != n_qubits:
        raise PauliStringError(
            f"setting {word!r} has length {len(word)}, expected {n_qubits}"
        )
    return word


def is_full_weight(setting: str) -> bool:
    return "I" not in setting


def full_weight_settings(n_qubits: int) -> Iterator[str]:
    """All 3^N identity-free words, in lexicographic (X < Y < Z) order."""
    for axes in itertools.product("XYZ", repeat=n_qubits):
        yield "".join(axes)


def all_settings(n_qubits: int) -> Iterator[str]:
    """All 4^N words including identity slots."""
    for axes in itertools.product(AXES, repeat=n_qubits):
        yield "".join(axes)


@functools.lru_cache(maxsize=4096)
def setting_matrix(setting: str) -> np.ndarray:
    """Dense 2^N x 2^N matrix of the tensor product of local Paulis."""
    word = validate_setting(setting)
    op = SIGMA[word[0]]
    for c in word[1:]:
        op = np.kron(op, SIGMA[c])
    op.flags.writeable = False
    return op


def commutes(p: str, q: str) -> bool:
    """Whether two equal-length Pauli words commute.

    Tensor products of Paulis either commute or anticommute; they commute
    exactly when the number of positions where both letters are non-identity
    and different is even.
    """
    p = validate_setting(p)
    q = validate_setting(q, len(p))
    clashes = sum(1 for a, b in zip(p, q) if a != "I" and b != "I" and a != b)
    return clashes % 2 == 0


def anticommutes(p: str, q: str) -> bool:
    return not commutes(p, q)


def weight_distance(p: str, q: str) -> int:
    """Number of positions where the two words carry different letters."""
    if len(p) != len(q):
        raise PauliStringError("length mismatch")
    return sum(1 for a, b in zip(p, q) if a != b)


def relabel_word(word: str, mapping: dict[str, str]) -> str:
    """Apply an axis permutation (e.g. ``{"X": "Z", "Z": "Y", "Y": "X"}``)."""
    perm = {k.upper(): v.upper() for k, v in mapping.items()}
    if sorted(perm) != ["X", "Y", "Z"] or sorted(perm.values()) != ["X", "Y", "Z"]:
        raise PauliStringError(f"not a permutation of X, Y, Z: {mapping!r}")
    perm["I"] = "I"
    return "".join(perm[c] for c in validate_setting(word))
