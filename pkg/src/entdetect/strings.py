"""Commuting-string combinatorics behind the multiqubit decision tree.

One tree branch assumes the first measurement X...X came out big.  The
branch is built from all full-weight words commuting with the seed, grouped
into maximum-size mutually commuting strings, arranged and sorted into a
deterministic order, and finally wired with solid (within-string) and
dashed (string-switch) edges.

Ordering conventions, chosen to be reproducible run to run:

* within a string, words are grouped by distance from the seed and sorted
  with X before Z before Y (Y-light words first); each group is rotated so
  consecutive measurements differ in exactly two local settings whenever
  the group allows it;
* the string built purely from the seed axis and Z (plus the YY...Y
  completion on even qubit counts) comes first, the remainder sort by
  their second word, then lexicographically.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass

from .pauli import (
    PauliStringError,
    commutes,
    full_weight_settings,
    relabel_word,
    validate_setting,
    weight_distance,
)

_XZY_RANK = {"X": 0, "Z": 1, "Y": 2}
_XYZ_RANK = {"X": 0, "Y": 1, "Z": 2}


def _elem_key(word: str) -> tuple:
    return (
        _XZY_RANK[word[0]],
        word.count("Y"),
        tuple(_XZY_RANK[c] for c in word),
    )


def odd(n: int) -> int:
    return n % 2


def even(n: int) -> int:
    return 1 - n % 2


def commutant_size(n_qubits: int) -> int:
    """Closed form (3^N - 1)/2 - Odd(N) for the seed's commutant."""
    return (3**n_qubits - 1) // 2 - odd(n_qubits)


def string_length(n_qubits: int) -> int:
    """Maximum size 2^(N-1) + Even(N) of a mutually commuting string.

    Verified by exhaustive search up to eight qubits; beyond that it is a
    conjecture and the search routines treat shorter results as an error.
    """
    return 2 ** (n_qubits - 1) + even(n_qubits)


def commutant_of_seed(n_qubits: int) -> list[str]:
    """All full-weight words commuting with X^N (even count of non-X letters)."""
    if n_qubits < 2:
        raise PauliStringError("need at least 2 qubits")
    out = [
        w
        for w in full_weight_settings(n_qubits)
        if w != "X" * n_qubits and sum(1 for c in w if c != "X") % 2 == 0
    ]
    return sorted(out, key=_elem_key)


def trunk_set(n_qubits: int) -> frozenset[str]:
    """The distinguished maximal string on the axes {X, Z} (plus Y^N if even N)."""
    words = {
        "".join(w)
        for w in itertools.product("XZ", repeat=n_qubits)
        if w.count("Z") % 2 == 0
    }
    if n_qubits % 2 == 0:
        words.add("Y" * n_qubits)
    return frozenset(words)


def _enumerate_maximum_cliques(n_qubits: int) -> list[frozenset[str]]:
    """All maximum-size commuting sets containing the seed, as frozensets."""
    words = commutant_of_seed(n_qubits)
    m = len(words)
    target = string_length(n_qubits) - 1  # clique size inside the commutant
    adj = [0] * m
    for i in range(m):
        for j in range(i + 1, m):
            if commutes(words[i], words[j]):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    found: list[frozenset[str]] = []
    seed = "X" * n_qubits

    def extend(chosen: list[int], candidates: int, low: int) -> None:
        if len(chosen) == target:
            found.append(frozenset([seed] + [words[i] for i in chosen]))
            return
        cand = candidates & ~((1 << low) - 1)
        while cand:
            i = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            rest = candidates & adj[i]
            if len(chosen) + 1 + bin(rest & ~((1 << (i + 1)) - 1)).count("1") >= target:
                extend(chosen + [i], rest, i + 1)

    extend([], (1 << m) - 1, 0)
    return found


def find_string_by_search(n_qubits: int) -> list[str]:
    """Depth-first search for one maximum commuting string (no closed forms).

    Raises if the conjectured length cannot be reached, instead of silently
    returning a shorter string.
    """
    words = commutant_of_seed(n_qubits)
    m = len(words)
    target = string_length(n_qubits) - 1
    adj = [0] * m
    for i in range(m):
        for j in range(i + 1, m):
            if commutes(words[i], words[j]):
                adj[i] |= 1 << j
                adj[j] |= 1 << i

    def extend(chosen: list[int], candidates: int, low: int) -> list[int] | None:
        if len(chosen) == target:
            return chosen
        cand = candidates & ~((1 << low) - 1)
        while cand:
            i = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            if len(chosen) + 1 + bin(candidates & adj[i]).count("1") < target:
                continue
            hit = extend(chosen + [i], candidates & adj[i], i + 1)
            if hit is not None:
                return hit
        return None

    hit = extend([], (1 << m) - 1, 0)
    if hit is None:
        raise PauliStringError(
            f"no commuting string of length {target + 1} found for N={n_qubits}"
        )
    return arrange_string(frozenset(["X" * n_qubits] + [words[i] for i in hit]), "X" * n_qubits)


def arrange_string(members: frozenset[str], seed: str) -> list[str]:
    """Order one commuting set for measurement.

    Groups by distance from the seed, sorts Y-light first, and rotates each
    group so consecutive words differ at exactly two positions when some
    member of the group allows it.
    """
    rest = sorted(members - {seed}, key=lambda w: (weight_distance(seed, w), _elem_key(w)))
    ordered = [seed]
    for _, grp in itertools.groupby(rest, key=lambda w: weight_distance(seed, w)):
        group = deque(grp)
        while group:
            for _ in range(len(group)):
                if weight_distance(ordered[-1], group[0]) == 2:
                    break
                group.rotate(-1)
            ordered.append(group.popleft())
    return ordered


def _string_sort_key(string: list[str]) -> tuple:
    head = _elem_key(string[1])
    tail = tuple(tuple(_XYZ_RANK[c] for c in w) for w in string[2:])
    return (head, tail)


def maximal_commuting_strings(n_qubits: int) -> list[list[str]]:
    """All maximum-size commuting strings through X^N, arranged and sorted.

    Exhaustive for N <= 5.  Six qubits and beyond have far too many strings
    to enumerate; ask for the trunk via :func:`find_string_by_search`.
    """
    if n_qubits > 5:
        raise PauliStringError(
            "full string enumeration is limited to N <= 5; "
            "use find_string_by_search for a single string"
        )
    seed = "X" * n_qubits
    strings = [arrange_string(s, seed) for s in _enumerate_maximum_cliques(n_qubits)]
    trunk = arrange_string(trunk_set(n_qubits), seed)
    rest = sorted((s for s in strings if s != trunk), key=_string_sort_key)
    return [trunk] + rest


@dataclass(frozen=True)
class TreeBranch:
    """One branch of the decision tree: nodes plus solid/dashed arrows."""

    n_qubits: int
    seed: str
    strings: tuple[tuple[str, ...], ...]
    nodes: tuple[str, ...]
    solid: tuple[tuple[int, int], ...]
    dashed: tuple[tuple[int, int], ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n_qubits,
                "seed": self.seed,
                "nodes": list(self.nodes),
                "solid": [list(e) for e in self.solid],
                "dashed": [list(e) for e in self.dashed],
            }
        )

    def solid_chain(self) -> list[str]:
        """The primary measurement order (first string)."""
        return list(self.strings[0])


def _edges_from_strings(strings: list[list[str]]) -> tuple[list[str], list, list]:
    """Wire the sorted strings into a tree.

    Consecutive strings share the drawn nodes of their common prefix; at the
    first diverging position d a dashed arrow leaves the previous string and
    the new string continues with solid arrows.  Words reappearing in later
    tails therefore map to separate nodes, which keeps every root-to-leaf
    solid path inside a single commuting string.
    """
    nodes: list[str] = []

    def new_node(word: str) -> int:
        nodes.append(word)
        return len(nodes) - 1

    solid: list[tuple[int, int]] = []
    dashed: list[tuple[int, int]] = []
    prev_path = [new_node(w) for w in strings[0]]
    solid += list(zip(prev_path, prev_path[1:]))
    for prev, cur in zip(strings, strings[1:]):
        d = next(k for k in range(len(cur)) if cur[k] != prev[k])
        path = prev_path[:d] + [new_node(w) for w in cur[d:]]
        dashed.append((prev_path[d], path[d]))
        solid += list(zip(path[d:], path[d + 1 :]))
        prev_path = path
    return nodes, solid, dashed


def build_branch(n_qubits: int, seed: str | None = None) -> TreeBranch:
    """Branch whose first measurement is ``seed`` (a uniform-axis word).

    Non-X seeds are produced by relabeling the X branch through the axis
    swap X <-> seed axis.  Beyond five qubits only the trunk string is
    wired (the complete string set is too large to enumerate); sessions
    then sweep the remaining commutant after the trunk.
    """
    seed = validate_setting(seed or "X" * n_qubits, n_qubits)
    if len(set(seed)) != 1 or seed[0] == "I":
        raise PauliStringError(f"branch seeds must be axis^N words, got {seed!r}")
    if n_qubits > 5:
        strings = [arrange_string(trunk_set(n_qubits), "X" * n_qubits)]
    else:
        strings = maximal_commuting_strings(n_qubits)
    nodes, solid, dashed = _edges_from_strings(strings)
    branch = TreeBranch(
        n_qubits,
        "X" * n_qubits,
        tuple(tuple(s) for s in strings),
        tuple(nodes),
        tuple(solid),
        tuple(dashed),
    )
    axis = seed[0]
    if axis == "X":
        return branch
    mapping = {"X": axis, axis: "X", ({"X", "Y", "Z"} - {"X", axis}).pop(): None}
    mapping = {k: (v if v else k) for k, v in mapping.items()}
    return relabel(branch, mapping)


def relabel(branch: TreeBranch, mapping: dict[str, str]) -> TreeBranch:
    """Rename local axes everywhere; the arrow structure is untouched."""
    return TreeBranch(
        branch.n_qubits,
        relabel_word(branch.seed, mapping),
        tuple(tuple(relabel_word(w, mapping) for w in s) for s in branch.strings),
        tuple(relabel_word(w, mapping) for w in branch.nodes),
        branch.solid,
        branch.dashed,
    )
