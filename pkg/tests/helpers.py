"""Shared test fixtures: independent oracles and random state builders.

The oracles here re-derive schedule figures from first principles (plain
forward sweeps over chains) and stay independent of the package's
elaboration path; property tests compare the two.
"""

from __future__ import annotations

from random import Random

from reskit.schedule import Resource, ScheduleState, Task

PRODUCTS = ["A", "B", "C", "D"]


def naive_timing(state: ScheduleState) -> dict[str, dict[str, float]]:
    """Forward-sweep oracle: recompute per-task timing from raw fields only."""
    out: dict[str, dict[str, float]] = {}
    for r in state.resources:
        clock: float | None = None
        for tid in r.task_chain:
            t = state.tasks[tid]
            duration = t.quantity / r.rates[t.product]
            if clock is None:
                start = t.start if t.executing else max(r.release_time, 0.0)
            else:
                start = clock
            finish = start + duration
            clock = finish
            out[tid] = {
                "duration": duration,
                "start": start,
                "finish": finish,
                "tardiness": max(0.0, finish - t.due_date),
            }
    return out


def naive_aggregates(state: ScheduleState) -> dict[str, float]:
    timing = naive_timing(state)
    lateness = [v["tardiness"] for v in timing.values()]
    total = sum(lateness)
    n = len(timing)
    return {
        "total_tardiness": total,
        "max_tardiness": max(lateness, default=0.0),
        "avg_tardiness": total / n if n else 0.0,
        "total_wip": sum(v["duration"] for v in timing.values()),
        "task_number": n,
    }


def random_state(rng: Random, max_resources: int = 3, max_tasks: int = 8) -> ScheduleState:
    """Small random instance; every task lands on a capable resource."""
    resources = []
    for i in range(rng.randint(1, max_resources)):
        rates = {p: round(rng.uniform(5.0, 20.0), 1) for p in PRODUCTS if rng.random() < 0.8}
        if not rates:
            rates = {"A": round(rng.uniform(5.0, 20.0), 1)}
        release = rng.choice([0.0, round(rng.uniform(0.0, 3.0), 1)])
        resources.append(Resource(id=f"r{i + 1}", rates=rates, release_time=release))
    tasks: dict[str, Task] = {}
    for j in range(rng.randint(0, max_tasks)):
        r = rng.choice(resources)
        product = rng.choice(sorted(r.rates))
        t = Task(
            id=f"t{j + 1}",
            name=f"Task{j + 1}",
            product=product,
            quantity=round(rng.uniform(1.0, 60.0), 1),
            due_date=round(rng.uniform(0.0, 30.0), 2),
        )
        tasks[t.id] = t
        r.task_chain.append(t.id)
    return ScheduleState(resources=resources, tasks=tasks)


def two_task_state() -> ScheduleState:
    """1 resource at 10 kg/h, T1(A, 20 kg, due 1 h) -> T2(A, 30 kg, due 10 h)."""
    r = Resource(id="r1", rates={"A": 10.0}, task_chain=["t1", "t2"])
    tasks = {
        "t1": Task(id="t1", name="Task1", product="A", quantity=20.0, due_date=1.0),
        "t2": Task(id="t2", name="Task2", product="A", quantity=30.0, due_date=10.0),
    }
    return ScheduleState(resources=[r], tasks=tasks)
