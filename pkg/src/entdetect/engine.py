"""Adaptive measurement sessions driven by the threshold criterion.

A session owns an ordered log of (setting, value) pairs and stops as soon
as the running sum of squares exceeds 1.  The next setting comes from

* two qubits: the diagonal chain zz, yy, xx, then the remaining mixed
  settings ordered by the priority score (smaller score first);
* more qubits: a walk along one branch of commuting strings, following the
  current string while values stay big and hopping to the next string that
  diverges at the current position when they drop below the threshold.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .pauli import full_weight_settings, is_full_weight, validate_setting
from .states import QuantumState
from .strings import TreeBranch, build_branch
from .tensor import correlation, sample_correlation

VALUE_TOL = 1e-9

DEFAULT_THRESHOLDS = {2: 0.4}
DEFAULT_THRESHOLD_MULTI = 0.5

TWO_QUBIT_DIAGONAL = ("ZZ", "YY", "XX")
TWO_QUBIT_MIXED = ("XY", "XZ", "YX", "YZ", "ZX", "ZY")

# structural export of the two-qubit tree: solid arrows walk the diagonal,
# each dashed pair hangs off the diagonal node sharing its axis
TWO_QUBIT_TREE = {
    "nodes": TWO_QUBIT_DIAGONAL + TWO_QUBIT_MIXED,
    "solid": (("ZZ", "YY"), ("YY", "XX")),
    "dashed": (
        ("ZZ", "XZ"),
        ("ZZ", "ZX"),
        ("YY", "YZ"),
        ("YY", "ZY"),
        ("XX", "XY"),
        ("XX", "YX"),
    ),
}


class SessionError(ValueError):
    """Out-of-order, duplicate or out-of-range recording."""


class Status(str, enum.Enum):
    RUNNING = "running"
    ENTANGLED = "entangled"
    EXHAUSTED = "exhausted"


def default_threshold(n_qubits: int) -> float:
    return DEFAULT_THRESHOLDS.get(n_qubits, DEFAULT_THRESHOLD_MULTI)


def two_qubit_tree() -> dict:
    """Static structure of the two-qubit tree (diagram/export form)."""
    return {
        "nodes": list(TWO_QUBIT_TREE["nodes"]),
        "solid": [list(e) for e in TWO_QUBIT_TREE["solid"]],
        "dashed": [list(e) for e in TWO_QUBIT_TREE["dashed"]],
    }


def priorities(measured: dict[str, float], remaining) -> list[str]:
    """Remaining two-qubit settings ordered by the priority score.

    P_ij sums the squares of already measured values sharing a row or a
    column with the candidate; small scores promise big correlations, so
    they go first.  Ties break lexicographically.
    """
    scores = {}
    for setting in remaining:
        word = validate_setting(setting, 2)
        i, j = word
        p = 0.0
        for k in "XYZ":
            if k != i and (k + j) in measured:
                p += measured[k + j] ** 2
            if k != j and (i + k) in measured:
                p += measured[i + k] ** 2
        scores[word] = p
    return sorted(scores, key=lambda w: (scores[w], w))


@dataclass
class DecisionPolicy:
    """Fixed choices for one session: qubit count, threshold, tree, order."""

    n_qubits: int
    threshold: float | None = None
    branch: TreeBranch | None = None
    fixed_order: tuple[str, ...] | None = None  # overrides the tree entirely

    def __post_init__(self):
        if self.n_qubits < 2:
            raise ValueError("sessions need at least 2 qubits")
        if self.threshold is None:
            self.threshold = default_threshold(self.n_qubits)
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold {self.threshold} outside (0, 1)")
        if self.branch is None and self.fixed_order is None and self.n_qubits > 2:
            self.branch = build_branch(self.n_qubits)
        if self.fixed_order is not None:
            self.fixed_order = tuple(
                validate_setting(w, self.n_qubits) for w in self.fixed_order
            )


@dataclass
class Session:
    """Append-only record of an adaptive run; single-owner mutable."""

    policy: DecisionPolicy
    log: list[tuple[str, float]] = field(default_factory=list)
    running_sum: float = 0.0
    status: Status = Status.RUNNING

    @property
    def n_qubits(self) -> int:
        return self.policy.n_qubits

    def measured(self) -> dict[str, float]:
        return dict(self.log)

    def next_setting(self) -> str | None:
        if self.status is not Status.RUNNING:
            raise SessionError(f"session is terminal ({self.status.value})")
        return self._compute_next()

    def recommendation(self) -> str | None:
        """Next setting, or None once the pool is exhausted.

        Unlike :meth:`next_setting` this keeps answering after the verdict,
        for runs that continue measuring anyway.
        """
        if self.status is Status.EXHAUSTED:
            return None
        return self._compute_next()

    def _compute_next(self) -> str | None:
        if self.policy.fixed_order is not None:
            done = {w for w, _ in self.log}
            for word in self.policy.fixed_order:
                if word not in done:
                    return word
            return None
        if self.n_qubits == 2:
            return self._next_two_qubit()
        return self._next_branch()

    def _next_two_qubit(self) -> str | None:
        measured = self.measured()
        for word in TWO_QUBIT_DIAGONAL:
            if word not in measured:
                return word
        remaining = [w for w in TWO_QUBIT_MIXED if w not in measured]
        if not remaining:
            return None
        return priorities(measured, remaining)[0]

    def _next_branch(self) -> str | None:
        branch = self.policy.branch
        threshold = self.policy.threshold
        measured = self.measured()
        strings = branch.strings
        j, p = 0, 0
        for setting, value in self.log:
            if j is None or strings[j][p] != setting:
                break  # log left the branch; fall through to the sweeps below
            if abs(value) >= threshold:
                j, p = self._advance_solid(j, p, measured_upto(self.log, setting))
            else:
                j, p = self._hop_dashed(j, p, measured_upto(self.log, setting))
            if j is None:
                break
        if j is not None and strings[j][p] not in measured:
            return strings[j][p]
        # sweep any branch nodes the walk skipped, then the rest of the pool
        for s in strings:
            for word in s:
                if word not in measured:
                    return word
        for word in full_weight_settings(self.n_qubits):
            if word not in measured:
                return word
        return None

    def _advance_solid(self, j: int, p: int, done: set[str]):
        strings = self.policy.branch.strings
        for q in range(p + 1, len(strings[j])):
            if strings[j][q] not in done:
                return j, q
        return None, None

    def _hop_dashed(self, j: int, p: int, done: set[str]):
        strings = self.policy.branch.strings
        prefix = strings[j][:p]
        for j2 in range(j + 1, len(strings)):
            cand = strings[j2]
            if cand[:p] == prefix and cand[p] != strings[j][p] and cand[p] not in done:
                return j2, p
        return self._advance_solid(j, p, done)

    def record(self, setting: str, value: float) -> "Session":
        """Append one measurement; the verdict is sticky once reached.

        Recording may continue past the detection point (experiments keep
        measuring to beat their error bars), but never past pool exhaustion
        and never out of the adaptive order.
        """
        word = validate_setting(setting, self.n_qubits)
        if not is_full_weight(word):
            raise SessionError(f"setting {word!r} is not full weight")
        if self.status is Status.EXHAUSTED:
            raise SessionError("session is terminal (exhausted)")
        expected = self._compute_next()
        if word != expected:
            raise SessionError(f"expected setting {expected!r}, got {word!r}")
        if abs(value) > 1.0 + VALUE_TOL:
            raise SessionError(f"correlation value {value} outside [-1, 1]")
        self.log.append((word, float(value)))
        self.running_sum += float(value) ** 2
        if self.running_sum > 1.0:
            self.status = Status.ENTANGLED
        elif self._pool_exhausted():
            self.status = Status.EXHAUSTED
        return self

    def _pool_exhausted(self) -> bool:
        if self.policy.fixed_order is not None:
            return len(self.log) == len(self.policy.fixed_order)
        return len(self.log) == 3**self.n_qubits

    def whatif(self, setting: str, value: float) -> tuple[float, Status]:
        """Hypothetical (sum, status) if ``value`` were recorded; no mutation."""
        word = validate_setting(setting, self.n_qubits)
        if not is_full_weight(word):
            raise SessionError(f"setting {word!r} is not full weight")
        if word in self.measured():
            raise SessionError(f"setting {word!r} already measured")
        if abs(value) > 1.0 + VALUE_TOL:
            raise SessionError(f"correlation value {value} outside [-1, 1]")
        total = self.running_sum + float(value) ** 2
        return total, Status.ENTANGLED if total > 1.0 else self.status

    def to_json_lines(self) -> str:
        lines = []
        total = 0.0
        for word, value in self.log:
            total += value**2
            lines.append(
                json.dumps(
                    {
                        "setting": word,
                        "value": value,
                        "sum": total,
                        "status": (
                            Status.ENTANGLED.value if total > 1.0 else Status.RUNNING.value
                        ),
                    }
                )
            )
        return "\n".join(lines)


def measured_upto(log: list[tuple[str, float]], setting: str) -> set[str]:
    """Settings measured up to and including ``setting`` in the log."""
    out = set()
    for word, _ in log:
        out.add(word)
        if word == setting:
            break
    return out


def run_auto(
    state: QuantumState,
    policy: DecisionPolicy | None = None,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
    max_steps: int | None = None,
) -> Session:
    """Closed loop: query the next setting, measure it on ``state``, record.

    ``shots=None`` uses exact expectation values; otherwise each setting is
    estimated from that many simulated two-outcome events.
    """
    policy = policy or DecisionPolicy(state.n_qubits)
    if policy.n_qubits != state.n_qubits:
        raise SessionError("policy and state disagree on qubit count")
    if shots is not None and rng is None:
        rng = np.random.default_rng()
    session = Session(policy)
    steps = 0
    while session.status is Status.RUNNING:
        setting = session.next_setting()
        if setting is None or (max_steps is not None and steps >= max_steps):
            break
        if shots is None:
            value = correlation(state, setting)
        else:
            value = sample_correlation(state, setting, shots, rng)
        session.record(setting, value)
        steps += 1
    return session


def random_order_session(
    state: QuantumState,
    rng: np.random.Generator,
    n_qubits: int | None = None,
    pool: list[str] | None = None,
    pin_first: str | None = None,
    shots: int | None = None,
    max_steps: int | None = None,
) -> Session:
    """Baseline run over a uniformly shuffled measurement order.

    The pool is the same one the adaptive session may eventually exhaust:
    all identity-free settings.  For more than two qubits ``pin_first``
    defaults to the seed word X..X, mirroring the adaptive run's fixed
    first measurement so the comparison is fair; the advantage of the tree
    is that after a big value it prunes the settings anticommuting with it,
    while the shuffled order keeps sampling them.
    """
    n = n_qubits or state.n_qubits
    if pool is None:
        pool = list(full_weight_settings(n))
        if n > 2 and pin_first is None:
            pin_first = "X" * n
    order = [w for w in pool if w != pin_first]
    order = list(rng.permutation(order))
    if pin_first is not None:
        order.insert(0, pin_first)
    policy = DecisionPolicy(n, fixed_order=tuple(order))
    return run_auto(state, policy, shots=shots, rng=rng, max_steps=max_steps)


def detection_step(session: Session) -> int | None:
    """1-based step at which the sum first exceeded 1, or None."""
    total = 0.0
    for k, (_, value) in enumerate(session.log, start=1):
        total += value**2
        if total > 1.0:
            return k
    return None


__all__ = [
    "DecisionPolicy",
    "Session",
    "SessionError",
    "Status",
    "default_threshold",
    "detection_step",
    "priorities",
    "random_order_session",
    "run_auto",
    "two_qubit_tree",
]
