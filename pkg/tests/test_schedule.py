from random import Random

import pytest

from reskit.errors import BrokenChain, PositionOutOfRange, UnprocessableProduct
from reskit.schedule import (
    Resource,
    ScheduleState,
    Task,
    elaborate,
    insert_order,
    task_tardiness,
    validate,
)

from helpers import naive_aggregates, naive_timing, random_state, two_task_state

TOL = 1e-9


def test_two_task_chain_timing():
    s = elaborate(two_task_state())
    t1, t2 = s.tasks["t1"], s.tasks["t2"]
    oracle = naive_timing(two_task_state())
    assert (t1.duration, t2.duration) == (2.0, 3.0)
    assert (t1.start, t2.start) == (0.0, 2.0)
    assert (t1.finish, t2.finish) == (2.0, 5.0)
    assert task_tardiness(t1) == 1.0
    assert task_tardiness(t2) == 0.0
    assert s.total_tardiness == 1.0
    for tid in ("t1", "t2"):
        assert s.tasks[tid].start == pytest.approx(oracle[tid]["start"], abs=TOL)
        assert s.tasks[tid].finish == pytest.approx(oracle[tid]["finish"], abs=TOL)


def test_two_task_links_and_resource_tardiness():
    s = elaborate(two_task_state())
    assert s.tasks["t1"].prev is None
    assert s.tasks["t1"].next == "t2"
    assert s.tasks["t2"].prev == "t1"
    assert s.tasks["t2"].next is None
    assert s.resources[0].tardiness == 1.0


def test_empty_schedule_zeroes():
    s = elaborate(ScheduleState(resources=[Resource(id="r1", rates={"A": 1.0})]))
    assert s.total_tardiness == 0.0
    assert s.max_tardiness == 0.0
    assert s.avg_tardiness == 0.0
    assert s.total_wip == 0.0
    assert s.task_number == 0
    assert s.pending_general_calculations == 0


def test_avg_tardiness_identity():
    # 16 unit tasks at rate 1: finishes 1..16; dues chosen so the last eight
    # are 5 h late each -> total 40, avg 40/16 = 2.5.
    tasks = {}
    chain = []
    for k in range(1, 17):
        due = float(k) if k <= 8 else float(k) - 5.0
        tasks[f"t{k}"] = Task(id=f"t{k}", name=f"Task{k}", product="A", quantity=1.0, due_date=due)
        chain.append(f"t{k}")
    s = elaborate(
        ScheduleState(resources=[Resource(id="r1", rates={"A": 1.0}, task_chain=chain)], tasks=tasks)
    )
    assert s.total_tardiness == pytest.approx(40.0, abs=TOL)
    assert s.task_number == 16
    assert s.avg_tardiness == pytest.approx(2.5, abs=TOL)
    assert abs(s.avg_tardiness * s.task_number - s.total_tardiness) < TOL


def test_task_tardiness_formula():
    t = Task(id="t", name="t", product="A", quantity=1.0, due_date=4.0, finish=5.0)
    assert task_tardiness(t) == 1.0
    t.due_date, t.finish = 10.0, 3.0
    assert task_tardiness(t) == 0.0
    t.due_date = t.finish = 7.0
    assert task_tardiness(t) == 0.0


def test_elaborate_idempotent():
    rng = Random(11)
    for _ in range(50):
        s1 = elaborate(random_state(rng))
        s2 = elaborate(s1)
        assert s1 == s2


def test_elaborate_unprocessable_product():
    r = Resource(id="r1", rates={"B": 5.0}, task_chain=["t1"])
    t = Task(id="t1", name="Task1", product="A", quantity=10.0, due_date=1.0)
    with pytest.raises(UnprocessableProduct):
        elaborate(ScheduleState(resources=[r], tasks={"t1": t}))


def test_elaborate_broken_chain_variants():
    t = Task(id="t1", name="Task1", product="A", quantity=10.0, due_date=1.0)
    # duplicate assignment
    dup = ScheduleState(
        resources=[
            Resource(id="r1", rates={"A": 5.0}, task_chain=["t1"]),
            Resource(id="r2", rates={"A": 5.0}, task_chain=["t1"]),
        ],
        tasks={"t1": t},
    )
    with pytest.raises(BrokenChain):
        elaborate(dup)
    # chain references a task that does not exist
    ghost = ScheduleState(
        resources=[Resource(id="r1", rates={"A": 5.0}, task_chain=["t1", "tX"])],
        tasks={"t1": t},
    )
    with pytest.raises(BrokenChain):
        elaborate(ghost)
    # task in no chain
    orphan = ScheduleState(resources=[Resource(id="r1", rates={"A": 5.0})], tasks={"t1": t})
    with pytest.raises(BrokenChain):
        elaborate(orphan)


def order(id="t9", product="A", quantity=10.0, due=50.0):
    return Task(id=id, name="Order9", product=product, quantity=quantity, due_date=due)


def test_insert_order_into_empty_resource():
    base = elaborate(
        ScheduleState(resources=[Resource(id="r1", rates={"A": 10.0}, release_time=1.5)])
    )
    base.init_tardiness = base.total_tardiness
    s = insert_order(base, order(), "r1", 0)
    assert s.resources[0].task_chain == ["t9"]
    assert s.focal_task == "t9"
    assert s.tasks["t9"].start == 1.5
    assert s.init_tardiness == 0.0


def test_insert_order_at_end_keeps_upstream_timing():
    base = elaborate(two_task_state())
    base.init_tardiness = base.total_tardiness
    before = naive_timing(base)
    s = insert_order(base, order(), "r1", 2)
    assert s.resources[0].task_chain == ["t1", "t2", "t9"]
    assert s.tasks["t9"].prev == "t2"
    assert s.tasks["t9"].next is None
    for tid in ("t1", "t2"):
        assert s.tasks[tid].start == pytest.approx(before[tid]["start"], abs=TOL)
        assert s.tasks[tid].finish == pytest.approx(before[tid]["finish"], abs=TOL)
    assert s.init_tardiness == 1.0  # snapshot untouched by the insertion


def test_insert_order_snapshot_then_rise():
    # the pre-insertion total stays recorded while the post-insertion total grows
    base = elaborate(two_task_state())
    base.init_tardiness = base.total_tardiness
    s = insert_order(base, order(due=0.0), "r1", 2)
    assert s.init_tardiness == 1.0
    assert s.total_tardiness > s.init_tardiness


def test_insert_order_errors():
    base = elaborate(two_task_state())
    with pytest.raises(UnprocessableProduct):
        insert_order(base, order(product="Z"), "r1", 0)
    with pytest.raises(PositionOutOfRange):
        insert_order(base, order(), "r1", 3)
    with pytest.raises(KeyError):
        insert_order(base, order(), "rX", 0)
    with pytest.raises(ValueError):
        insert_order(base, order(id="t1"), "r1", 0)


def test_validate_clean_state():
    assert validate(elaborate(two_task_state())) == []


def test_validate_duplicate_assignment():
    s = elaborate(two_task_state())
    s.resources.append(Resource(id="r2", rates={"A": 10.0}, task_chain=["t1"]))
    codes = {v.code for v in validate(s)}
    assert "DuplicateAssignment" in codes


def test_validate_stale_aggregate():
    s = elaborate(two_task_state())
    s.avg_tardiness += 0.25
    hits = [v for v in validate(s) if v.code == "StaleAggregate"]
    assert [v.subject for v in hits] == ["avgTard"]


def test_validate_unassigned_task():
    s = elaborate(two_task_state())
    s.tasks["t9"] = order()
    assert any(v.code == "UnassignedTask" and v.subject == "t9" for v in validate(s))


def test_aggregates_match_bruteforce_oracle():
    rng = Random(7)
    for _ in range(300):
        raw = random_state(rng)
        s = elaborate(raw)
        expect = naive_aggregates(raw)
        assert s.total_tardiness == pytest.approx(expect["total_tardiness"], abs=TOL)
        assert s.max_tardiness == pytest.approx(expect["max_tardiness"], abs=TOL)
        assert s.avg_tardiness == pytest.approx(expect["avg_tardiness"], abs=TOL)
        assert s.total_wip == pytest.approx(expect["total_wip"], abs=TOL)
        assert s.task_number == expect["task_number"]
        assert validate(s) == []


def test_three_way_tardiness_agreement():
    rng = Random(13)
    for _ in range(200):
        s = elaborate(random_state(rng))
        by_resource = sum(r.tardiness for r in s.resources)
        by_task = sum(task_tardiness(t) for t in s.tasks.values())
        assert abs(s.total_tardiness - by_resource) < TOL
        assert abs(s.total_tardiness - by_task) < TOL


def test_chain_timing_exact():
    rng = Random(17)
    for _ in range(200):
        s = elaborate(random_state(rng))
        for r in s.resources:
            for a, b in zip(r.task_chain, r.task_chain[1:]):
                assert s.tasks[b].start == s.tasks[a].finish


def test_quantity_monotonicity():
    rng = Random(19)
    for _ in range(200):
        raw = random_state(rng)
        if not raw.tasks:
            continue
        s = elaborate(raw)
        victim = rng.choice(sorted(raw.tasks))
        bumped = raw.clone()
        bumped.tasks[victim].quantity *= 1.0 + rng.uniform(0.01, 1.0)
        s2 = elaborate(bumped)
        assert s2.total_tardiness >= s.total_tardiness - TOL


def test_executing_head_keeps_start():
    raw = two_task_state()
    raw.tasks["t1"].executing = True
    raw.tasks["t1"].start = 0.75
    s = elaborate(raw)
    assert s.tasks["t1"].start == 0.75
    assert s.tasks["t2"].start == s.tasks["t1"].finish
    assert elaborate(s) == s
