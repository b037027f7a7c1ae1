"""Schedule domain model: resources, task chains, timing and tardiness.

A schedule is a set of unary-capacity resources (extruders), each holding an
ordered chain of tasks. Products are plain string codes. All timing is
derived: a task's duration follows from its quantity and the assigned
resource's rate for its product, starts follow from chain order, and the
aggregate figures (total/max/avg tardiness, work in process) follow from the
task fields. ``elaborate`` recomputes every derived field and is idempotent.

States are values: every operation returns a new state and leaves its input
untouched, so states can be archived for episode rollback and compared after
the fact. ``Resource.task_chain`` is the authoritative ordering; the per-task
``prev``/``next`` links are rewritten from it during elaboration.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import BrokenChain, PositionOutOfRange, UnprocessableProduct

# Absolute tolerance for aggregate float comparisons.
AGG_TOL = 1e-9


@dataclass
class Task:
    """An order operation: what to make, how much, and by when.

    ``duration``, ``start``, ``finish``, ``prev`` and ``next`` are derived;
    they are only meaningful after :func:`elaborate`.
    """

    id: str
    name: str
    product: str
    quantity: float
    due_date: float
    duration: float = 0.0
    start: float = 0.0
    finish: float = 0.0
    prev: str | None = None
    next: str | None = None
    executing: bool = False


@dataclass
class Resource:
    """A semi-continuous machine processing one task at a time.

    ``rates`` maps product code to kg/h; a missing key means the resource
    cannot process that product. ``release_time`` is the earliest start for
    movable (non-executing) work.
    """

    id: str
    kind: str = "extruder"
    rates: dict[str, float] = field(default_factory=dict)
    task_chain: list[str] = field(default_factory=list)
    tardiness: float = 0.0
    release_time: float = 0.0


@dataclass
class ScheduleState:
    resources: list[Resource] = field(default_factory=list)
    tasks: dict[str, Task] = field(default_factory=dict)
    focal_task: str | None = None
    init_tardiness: float = 0.0
    total_tardiness: float = 0.0
    max_tardiness: float = 0.0
    avg_tardiness: float = 0.0
    total_wip: float = 0.0
    task_number: int = 0
    pending_general_calculations: int = 1

    def clone(self) -> "ScheduleState":
        """Deep copy; cheap enough to call once per repair step."""
        return ScheduleState(
            resources=[
                replace(r, rates=dict(r.rates), task_chain=list(r.task_chain))
                for r in self.resources
            ],
            tasks={tid: replace(t) for tid, t in self.tasks.items()},
            focal_task=self.focal_task,
            init_tardiness=self.init_tardiness,
            total_tardiness=self.total_tardiness,
            max_tardiness=self.max_tardiness,
            avg_tardiness=self.avg_tardiness,
            total_wip=self.total_wip,
            task_number=self.task_number,
            pending_general_calculations=self.pending_general_calculations,
        )

    def resource_by_id(self, resource_id: str) -> Resource:
        for r in self.resources:
            if r.id == resource_id:
                return r
        raise KeyError(resource_id)

    def resource_of(self, task_id: str) -> Resource:
        """Resource whose chain holds ``task_id``."""
        for r in self.resources:
            if task_id in r.task_chain:
                return r
        raise KeyError(task_id)

    def resource_index(self, resource_id: str) -> int:
        for i, r in enumerate(self.resources):
            if r.id == resource_id:
                return i
        raise KeyError(resource_id)


@dataclass(frozen=True)
class Violation:
    """One broken invariant: which rule, on what, and why."""

    code: str
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}({self.subject}): {self.detail}"


def task_tardiness(task: Task) -> float:
    """Lateness of an elaborated task: max(0, finish - due_date)."""
    return max(0.0, task.finish - task.due_date)


def _check_assignment(state: ScheduleState) -> dict[str, str]:
    """Map task id -> resource id; raise BrokenChain on structural defects."""
    assigned: dict[str, str] = {}
    for r in state.resources:
        for tid in r.task_chain:
            if tid not in state.tasks:
                raise BrokenChain(f"chain of {r.id} references unknown task {tid}")
            if tid in assigned:
                raise BrokenChain(
                    f"task {tid} appears in chains of {assigned[tid]} and {r.id}"
                )
            assigned[tid] = r.id
    for tid in state.tasks:
        if tid not in assigned:
            raise BrokenChain(f"task {tid} is not in any resource chain")
    return assigned


def elaborate(state: ScheduleState) -> ScheduleState:
    """Recompute every derived field and return the elaborated state.

    Chain timing: the head task starts at max(release_time, 0) unless it is
    executing, in which case its recorded start is kept (a frozen task
    anchors its chain); each later task starts when its predecessor
    finishes. Durations are quantity / rate on the current resource.
    """
    s = state.clone()
    _check_assignment(s)

    for r in s.resources:
        r_tard = 0.0
        prev_task: Task | None = None
        for tid in r.task_chain:
            t = s.tasks[tid]
            rate = r.rates.get(t.product)
            if rate is None:
                raise UnprocessableProduct(
                    f"resource {r.id} has no rate for product {t.product} (task {tid})"
                )
            t.duration = t.quantity / rate
            if prev_task is None:
                if not t.executing:
                    t.start = max(r.release_time, 0.0)
                t.prev = None
            else:
                t.start = prev_task.finish
                t.prev = prev_task.id
                prev_task.next = tid
            t.finish = t.start + t.duration
            t.next = None
            r_tard += task_tardiness(t)
            prev_task = t
        r.tardiness = r_tard

    total = 0.0
    max_t = 0.0
    wip = 0.0
    for t in s.tasks.values():
        lateness = task_tardiness(t)
        total += lateness
        if lateness > max_t:
            max_t = lateness
        wip += t.duration
    s.total_tardiness = total
    s.max_tardiness = max_t
    s.task_number = len(s.tasks)
    s.avg_tardiness = total / s.task_number if s.task_number else 0.0
    s.total_wip = wip
    s.pending_general_calculations = 0
    return s


def insert_order(
    state: ScheduleState, order: Task, resource: str, position: int
) -> ScheduleState:
    """Insert an arriving order into a chain and mark it as the focal task.

    ``init_tardiness`` must have been snapshotted by the caller before this;
    the insertion does not touch it. Returns the re-elaborated state.
    """
    target = state.resource_by_id(resource)
    if order.product not in target.rates:
        raise UnprocessableProduct(
            f"resource {resource} has no rate for product {order.product}"
        )
    if not 0 <= position <= len(target.task_chain):
        raise PositionOutOfRange(
            f"position {position} not in [0, {len(target.task_chain)}] on {resource}"
        )
    if order.id in state.tasks:
        raise ValueError(f"task id {order.id} already present")

    s = state.clone()
    s.tasks[order.id] = replace(order)
    s.resource_by_id(resource).task_chain.insert(position, order.id)
    s.focal_task = order.id
    s.pending_general_calculations = 1
    return elaborate(s)


def validate(state: ScheduleState) -> list[Violation]:
    """Check every state/task/resource invariant; return violations as data.

    Never raises: a broken state yields violations describing what is wrong.
    An empty list means the state is well-formed and its derived fields are
    fresh.
    """
    out: list[Violation] = []

    assigned: dict[str, str] = {}
    structural_ok = True
    for r in state.resources:
        for tid in r.task_chain:
            if tid not in state.tasks:
                out.append(Violation("UnknownTask", tid, f"chain of {r.id} references it"))
                structural_ok = False
            elif tid in assigned:
                out.append(
                    Violation(
                        "DuplicateAssignment",
                        tid,
                        f"in chains of {assigned[tid]} and {r.id}",
                    )
                )
                structural_ok = False
            else:
                assigned[tid] = r.id
    for tid in state.tasks:
        if tid not in assigned:
            out.append(Violation("UnassignedTask", tid, "not in any resource chain"))
            structural_ok = False

    if state.focal_task is not None and state.focal_task not in state.tasks:
        out.append(Violation("UnknownFocal", state.focal_task, "focal id has no task"))

    for r in state.resources:
        if r.release_time < 0:
            out.append(Violation("NegativeRelease", r.id, f"release_time {r.release_time}"))
        for p, rate in r.rates.items():
            if rate <= 0:
                out.append(Violation("NonPositiveRate", r.id, f"rate for {p} is {rate}"))
    for t in state.tasks.values():
        if t.quantity <= 0:
            out.append(Violation("NonPositiveQuantity", t.id, f"quantity {t.quantity}"))
        if t.due_date < 0:
            out.append(Violation("NegativeDueDate", t.id, f"due {t.due_date}"))

    if not structural_ok:
        return out

    # Timing and link checks per chain. Chain continuity is exact: elaborate
    # assigns start(k+1) = finish(k) rather than recomputing it.
    for r in state.resources:
        r_tard = 0.0
        prev_task: Task | None = None
        for i, tid in enumerate(r.task_chain):
            t = state.tasks[tid]
            rate = r.rates.get(t.product)
            if rate is None:
                out.append(
                    Violation("UnprocessableProduct", tid, f"no rate on {r.id} for {t.product}")
                )
                prev_task = t
                continue
            if abs(t.duration - t.quantity / rate) > AGG_TOL:
                out.append(
                    Violation(
                        "StaleDuration", tid, f"duration {t.duration} != {t.quantity / rate}"
                    )
                )
            if t.executing and i > 0:
                out.append(Violation("ExecutingNotHead", tid, f"position {i} on {r.id}"))
            if prev_task is None:
                if not t.executing and t.start != max(r.release_time, 0.0):
                    out.append(
                        Violation(
                            "BadChainHead",
                            tid,
                            f"start {t.start} != release {max(r.release_time, 0.0)}",
                        )
                    )
                if t.prev is not None:
                    out.append(Violation("LinkMismatch", tid, f"prev {t.prev} at chain head"))
            else:
                if t.start != prev_task.finish:
                    out.append(
                        Violation("ChainGap", tid, f"start {t.start} != finish({prev_task.id})")
                    )
                if t.prev != prev_task.id:
                    out.append(Violation("LinkMismatch", tid, f"prev {t.prev} != {prev_task.id}"))
                if prev_task.next != tid:
                    out.append(
                        Violation("LinkMismatch", prev_task.id, f"next {prev_task.next} != {tid}")
                    )
            if abs(t.finish - (t.start + t.duration)) > AGG_TOL:
                out.append(
                    Violation("TimingDrift", tid, f"finish {t.finish} != start + duration")
                )
            r_tard += task_tardiness(t)
            prev_task = t
        if prev_task is not None and prev_task.next is not None:
            out.append(Violation("LinkMismatch", prev_task.id, "next set at chain tail"))
        if abs(r.tardiness - r_tard) > AGG_TOL:
            out.append(
                Violation("StaleResourceTardiness", r.id, f"{r.tardiness} != {r_tard}")
            )

    total = sum(task_tardiness(t) for t in state.tasks.values())
    max_t = max((task_tardiness(t) for t in state.tasks.values()), default=0.0)
    wip = sum(t.duration for t in state.tasks.values())
    n = len(state.tasks)
    avg = total / n if n else 0.0
    for attr, stored, fresh in [
        ("totTard", state.total_tardiness, total),
        ("maxTard", state.max_tardiness, max_t),
        ("avgTard", state.avg_tardiness, avg),
        ("totalWIP", state.total_wip, wip),
    ]:
        if abs(stored - fresh) > AGG_TOL:
            out.append(Violation("StaleAggregate", attr, f"{stored} != {fresh}"))
    if state.task_number != n:
        out.append(Violation("StaleAggregate", "taskNumber", f"{state.task_number} != {n}"))
    return out
