"""Tabular SARSA(lambda) over (state signature, operator) keys.

Preferences live in a lazily grown table keyed by the quantized state
signature plus the operator's name and its focal/auxiliary task names, the
in-memory analogue of per-situation preference rules. Eligibility traces are
replacing (bumped to 1 on visit), decay by gamma*lambda per step, and are
cleared between episodes.

Rewards are hours of tardiness removed (negative when a step makes things
worse), plus a +1 terminal bonus when a step lands at or below the
pre-disruption tardiness, so goal states beat tardiness-equal non-goals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from random import Random

from .errors import (
    CorruptQStoreError,
    EmptyProposalSet,
    InvalidConfig,
    QStoreVersionError,
)
from .operators import RepairOperator
from .schedule import ScheduleState
from .stategraph import StateSignature, signature

GOAL_TOLERANCE = 1e-9
GOAL_BONUS = 1.0

# Traces below this are dropped; their remaining contribution to any update
# is orders of magnitude under every tolerance in use.
TRACE_FLOOR = 1e-16

QSTORE_VERSION = "v1"


def goal_reached(state: ScheduleState) -> bool:
    """True when total tardiness is back at or below the pre-disruption level."""
    return state.total_tardiness <= state.init_tardiness + GOAL_TOLERANCE


def reward(before: ScheduleState, after: ScheduleState) -> float:
    """Tardiness reduced by the step, plus the terminal goal bonus."""
    value = before.total_tardiness - after.total_tardiness
    if goal_reached(after):
        value += GOAL_BONUS
    return value


@dataclass(frozen=True)
class Hyperparams:
    alpha: float = 0.1
    gamma: float = 0.9
    lam: float = 0.1
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        for name in ("alpha", "gamma", "lam", "epsilon"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidConfig(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class QKey:
    sig: StateSignature
    op_name: str
    op_focal: str
    op_aux: str


def qkey(state: ScheduleState, op: RepairOperator) -> QKey:
    return QKey(
        sig=signature(state),
        op_name=op.kind.value,
        op_focal=state.tasks[op.focal].name,
        op_aux=state.tasks[op.aux].name,
    )


class QStore:
    """Preference table plus eligibility traces and hyperparameters.

    Entries appear on first visit (bump) initialized to 0. Single writer
    during training; reads are safe to share.
    """

    def __init__(self, hyper: Hyperparams | None = None):
        self.hyper = hyper or Hyperparams()
        self.entries: dict[QKey, float] = {}
        self.traces: dict[QKey, float] = {}

    def q(self, key: QKey | None) -> float:
        if key is None:
            return 0.0
        return self.entries.get(key, 0.0)

    def bump_trace(self, key: QKey) -> None:
        """Replacing traces: the visited key's trace becomes exactly 1."""
        self.entries.setdefault(key, 0.0)
        self.traces[key] = 1.0

    def sarsa_update(self, key: QKey, reward_value: float, next_key: QKey | None) -> None:
        """One TD step: every traced key moves by alpha * delta * trace.

        ``next_key`` is None at episode end, bootstrapping 0. The current
        key's trace must have been bumped for this visit.
        """
        h = self.hyper
        delta = reward_value + h.gamma * self.q(next_key) - self.q(key)
        step = h.alpha * delta
        for k, e in self.traces.items():
            self.entries[k] = self.entries.get(k, 0.0) + step * e
        decay = h.gamma * h.lam
        decayed = {k: e * decay for k, e in self.traces.items() if e * decay > TRACE_FLOOR}
        self.traces = decayed

    def clear_traces(self) -> None:
        self.traces.clear()


def select(
    store: QStore,
    state: ScheduleState,
    proposals: list[RepairOperator],
    rng: Random,
    epsilon: float | None = None,
) -> RepairOperator:
    """Epsilon-greedy pick over the proposal list.

    Greedy ties resolve to the earliest proposal in the list's deterministic
    order; unseen keys read as 0. ``epsilon`` overrides the store's value
    (evaluation passes 0).
    """
    if not proposals:
        raise EmptyProposalSet("no proposals to select from")
    eps = store.hyper.epsilon if epsilon is None else epsilon
    if rng.random() < eps:
        return proposals[rng.randrange(len(proposals))]
    sig = signature(state)
    best = proposals[0]
    best_q = store.q(
        QKey(sig, best.kind.value, state.tasks[best.focal].name, state.tasks[best.aux].name)
    )
    for op in proposals[1:]:
        q = store.q(
            QKey(sig, op.kind.value, state.tasks[op.focal].name, state.tasks[op.aux].name)
        )
        if q > best_q:
            best, best_q = op, q
    return best


def _sig_to_fields(sig: StateSignature) -> list[str]:
    return [
        f"{sig.total_wip:.2f}",
        str(sig.task_number),
        f"{sig.max_tardiness:.2f}",
        f"{sig.avg_tardiness:.2f}",
        f"{sig.total_tardiness:.2f}",
        f"{sig.init_tardiness:.2f}",
        sig.focal_task,
    ]


def save_qstore(store: QStore, path: str | Path) -> int:
    """Write the store as versioned line-oriented text; returns entry count.

    Records are sorted for byte-stable output. Traces are transient and not
    persisted. Preference values use the shortest round-trip decimal.
    """
    h = store.hyper
    lines = [
        f"{QSTORE_VERSION} alpha={h.alpha!r} gamma={h.gamma!r} "
        f"lambda={h.lam!r} epsilon={h.epsilon!r}"
    ]
    records = []
    for key, value in store.entries.items():
        fields = _sig_to_fields(key.sig) + [key.op_name, key.op_focal, key.op_aux, repr(value)]
        records.append("\t".join(fields))
    records.sort()
    lines.extend(records)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(records)


_HEADER_RE = re.compile(
    r"^(v\d+) alpha=(\S+) gamma=(\S+) lambda=(\S+) epsilon=(\S+)$"
)


def load_qstore(path: str | Path) -> QStore:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise CorruptQStoreError(f"{path}: empty file")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise CorruptQStoreError(f"{path}: bad header {lines[0]!r}")
    if m.group(1) != QSTORE_VERSION:
        raise QStoreVersionError(f"{path}: version {m.group(1)}, expected {QSTORE_VERSION}")
    try:
        hyper = Hyperparams(
            alpha=float(m.group(2)),
            gamma=float(m.group(3)),
            lam=float(m.group(4)),
            epsilon=float(m.group(5)),
        )
    except (ValueError, InvalidConfig) as exc:
        raise CorruptQStoreError(f"{path}: bad hyperparameters: {exc}") from exc

    store = QStore(hyper)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 11:
            raise CorruptQStoreError(f"{path}:{lineno}: expected 11 fields, got {len(fields)}")
        try:
            sig = StateSignature(
                total_wip=float(fields[0]),
                task_number=int(fields[1]),
                max_tardiness=float(fields[2]),
                avg_tardiness=float(fields[3]),
                total_tardiness=float(fields[4]),
                init_tardiness=float(fields[5]),
                focal_task=fields[6],
            )
            key = QKey(sig, fields[7], fields[8], fields[9])
            store.entries[key] = float(fields[10])
        except ValueError as exc:
            raise CorruptQStoreError(f"{path}:{lineno}: {exc}") from exc
    return store


def top_preferences(store: QStore, per_signature: int = 5) -> list[tuple[QKey, float]]:
    """Best-valued entries grouped per signature, for inspection output."""
    by_sig: dict[StateSignature, list[tuple[QKey, float]]] = {}
    for key, value in store.entries.items():
        by_sig.setdefault(key.sig, []).append((key, value))
    out: list[tuple[QKey, float]] = []
    for sig in sorted(by_sig, key=lambda s: _sig_to_fields(s)):
        ranked = sorted(by_sig[sig], key=lambda kv: (-kv[1], kv[0].op_name, kv[0].op_aux))
        out.extend(ranked[:per_signature])
    return out
