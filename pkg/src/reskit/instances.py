"""Instance generation, the JSON instance format, and disruption injection.

Generated instances mimic a small batch plant: a few extruders with
per-product rates (not every extruder handles every product), an
earliest-due-date round-robin base schedule, and one arriving order as the
disruption. Everything is driven by a single seeded generator so equal seeds
give byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from random import Random

from .errors import InfeasibleSpec, InstanceFormatError, UnprocessableProduct
from .schedule import Resource, ScheduleState, Task, elaborate, insert_order

_CAPABILITY_REDRAWS = 32


@dataclass
class InstanceSpec:
    resource_count: int = 3
    products: tuple[str, ...] = ("A", "B", "C", "D")
    task_count: int = 15
    rate_range: tuple[float, float] = (6.0, 24.0)
    quantity_range: tuple[float, float] = (20.0, 60.0)
    slack_range: tuple[float, float] = (1.0, 2.5)
    # Order ready times scatter over this fraction of the expected makespan;
    # dues are ready + slack * ideal duration. 0 puts every ready at time 0.
    ready_spread: float = 0.95
    capability_density: float = 0.75
    seed: int = 0

    def ready_cap(self) -> float:
        mid_qty = (self.quantity_range[0] + self.quantity_range[1]) / 2
        mid_rate = (self.rate_range[0] + self.rate_range[1]) / 2
        makespan = self.task_count * mid_qty / (mid_rate * self.resource_count)
        return self.ready_spread * makespan


@dataclass
class Instance:
    """A base schedule plus its disruption: one arriving order."""

    state: ScheduleState
    order: Task
    arrival_h: float = 0.0


def _draw_capabilities(spec: InstanceSpec, rng: Random) -> list[set[str]]:
    for _ in range(_CAPABILITY_REDRAWS):
        caps = [
            {p for p in spec.products if rng.random() < spec.capability_density}
            for _ in range(spec.resource_count)
        ]
        if all(any(p in c for c in caps) for p in spec.products):
            return caps
    raise InfeasibleSpec(
        f"capability density {spec.capability_density} leaves some product unprocessable"
    )


def _draw_order(
    spec: InstanceSpec, rng: Random, best_rate: dict[str, float], index: int, offset: float = 0.0
) -> Task:
    product = rng.choice(spec.products)
    quantity = round(rng.uniform(*spec.quantity_range), 1)
    slack = rng.uniform(*spec.slack_range)
    ready = offset + rng.uniform(0.0, spec.ready_cap())
    due = round(ready + slack * quantity / best_rate[product], 2)
    return Task(id=f"t{index}", name=f"Task{index}", product=product, quantity=quantity, due_date=due)


def generate_instance(spec: InstanceSpec) -> Instance:
    """Deterministic instance from the spec; the base schedule validates clean.

    Tasks are assigned round-robin in earliest-due-date order, skipping
    resources that cannot process a task's product.
    """
    if spec.resource_count <= 0 or spec.task_count < 0:
        raise InfeasibleSpec("need at least one resource and a non-negative task count")
    if len(set(spec.products)) != len(spec.products) or not spec.products:
        raise InfeasibleSpec("product codes must be unique and non-empty")
    rng = Random(spec.seed)

    caps = _draw_capabilities(spec, rng)
    resources = []
    for i, cap in enumerate(caps):
        rates = {p: round(rng.uniform(*spec.rate_range), 1) for p in sorted(cap)}
        resources.append(Resource(id=f"r{i + 1}", kind="extruder", rates=rates))
    best_rate = {
        p: max(r.rates[p] for r in resources if p in r.rates) for p in spec.products
    }

    tasks = [_draw_order(spec, rng, best_rate, i + 1) for i in range(spec.task_count)]
    tasks.sort(key=lambda t: (t.due_date, t.id))
    cursor = 0
    n = len(resources)
    for t in tasks:
        for off in range(n):
            r = resources[(cursor + off) % n]
            if t.product in r.rates:
                r.task_chain.append(t.id)
                cursor = (cursor + off + 1) % n
                break

    order = _draw_order(spec, rng, best_rate, spec.task_count + 1)
    state = elaborate(ScheduleState(resources=resources, tasks={t.id: t for t in tasks}))
    return Instance(state=state, order=order, arrival_h=0.0)


def inject_disruption(
    instance: Instance, resource: str | None = None, position: int | None = None
) -> ScheduleState:
    """Snapshot pre-disruption tardiness, freeze running work, insert the order.

    Chain heads already started at the arrival time are flagged executing.
    Unless told where, the order lands at the end of the capable resource
    whose chain finishes earliest (ties to the earlier resource).
    """
    base = elaborate(instance.state)
    for r in base.resources:
        if r.task_chain and base.tasks[r.task_chain[0]].start < instance.arrival_h:
            base.tasks[r.task_chain[0]].executing = True
    base.init_tardiness = base.total_tardiness

    if resource is None:
        capable = [r for r in base.resources if instance.order.product in r.rates]
        if not capable:
            raise UnprocessableProduct(f"no resource can process {instance.order.product}")

        def chain_end(r: Resource) -> float:
            return base.tasks[r.task_chain[-1]].finish if r.task_chain else r.release_time

        target = min(capable, key=lambda r: (chain_end(r), base.resource_index(r.id)))
        resource = target.id
    if position is None:
        position = len(base.resource_by_id(resource).task_chain)
    return insert_order(base, instance.order, resource, position)


def sample_disruption(instance: Instance, rng: Random) -> Instance:
    """Fresh arriving order drawn from ranges observed in the instance."""
    products = sorted({p for r in instance.state.resources for p in r.rates})
    quantities = [t.quantity for t in instance.state.tasks.values()]
    qlo, qhi = (min(quantities), max(quantities)) if quantities else (20.0, 60.0)
    product = products[rng.randrange(len(products))]
    quantity = round(rng.uniform(qlo, qhi), 1)
    best = max(r.rates[product] for r in instance.state.resources if product in r.rates)
    # Ready offset scattered over the observed due-date span (the file carries
    # no generator spec, so ranges are inferred from the instance itself).
    ready = rng.uniform(0.0, max((t.due_date for t in instance.state.tasks.values()), default=0.0))
    due = round(instance.arrival_h + ready + rng.uniform(1.0, 2.5) * quantity / best, 2)
    index = len(instance.state.tasks) + 1
    while f"t{index}" in instance.state.tasks:
        index += 1
    order = Task(
        id=f"t{index}", name=f"Task{index}", product=product, quantity=quantity, due_date=due
    )
    return Instance(state=instance.state, order=order, arrival_h=instance.arrival_h)


# --- instance file format ---------------------------------------------------

_RESOURCE_FIELDS = {"id", "kind", "rates", "release_time"}
_TASK_FIELDS = {"id", "name", "product", "quantity_kg", "due_h", "resource", "chain_position"}
_ORDER_FIELDS = {"id", "name", "product", "quantity_kg", "due_h"}


def _require(obj: dict, allowed: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise InstanceFormatError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise InstanceFormatError(f"{where}: unknown fields {sorted(unknown)}")
    missing = allowed - set(obj)
    if missing:
        raise InstanceFormatError(f"{where}: missing fields {sorted(missing)}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceFormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def instance_to_dict(instance: Instance) -> dict:
    placement: dict[str, tuple[str, int]] = {}
    for r in instance.state.resources:
        for pos, tid in enumerate(r.task_chain):
            placement[tid] = (r.id, pos)
    return {
        "resources": [
            {
                "id": r.id,
                "kind": r.kind,
                "rates": {p: r.rates[p] for p in sorted(r.rates)},
                "release_time": r.release_time,
            }
            for r in instance.state.resources
        ],
        "tasks": [
            {
                "id": t.id,
                "name": t.name,
                "product": t.product,
                "quantity_kg": t.quantity,
                "due_h": t.due_date,
                "resource": placement[t.id][0],
                "chain_position": placement[t.id][1],
            }
            for t in sorted(instance.state.tasks.values(), key=lambda t: t.id)
        ],
        "disruption": {
            "order": {
                "id": instance.order.id,
                "name": instance.order.name,
                "product": instance.order.product,
                "quantity_kg": instance.order.quantity,
                "due_h": instance.order.due_date,
            },
            "arrival_h": instance.arrival_h,
        },
    }


def instance_from_dict(data: dict) -> Instance:
    _require(data, {"resources", "tasks", "disruption"}, "top level")
    if not isinstance(data["resources"], list) or not isinstance(data["tasks"], list):
        raise InstanceFormatError("resources and tasks must be arrays")

    resources: list[Resource] = []
    for i, rd in enumerate(data["resources"]):
        where = f"resources[{i}]"
        _require(rd, _RESOURCE_FIELDS, where)
        if not isinstance(rd["rates"], dict):
            raise InstanceFormatError(f"{where}: rates must be an object")
        rates = {p: _number(v, f"{where}.rates.{p}") for p, v in rd["rates"].items()}
        resources.append(
            Resource(
                id=str(rd["id"]),
                kind=str(rd["kind"]),
                rates=rates,
                release_time=_number(rd["release_time"], f"{where}.release_time"),
            )
        )
    ids = [r.id for r in resources]
    if len(set(ids)) != len(ids):
        raise InstanceFormatError("duplicate resource ids")

    by_resource: dict[str, list[tuple[int, str]]] = {r.id: [] for r in resources}
    tasks: dict[str, Task] = {}
    for i, td in enumerate(data["tasks"]):
        where = f"tasks[{i}]"
        _require(td, _TASK_FIELDS, where)
        t = Task(
            id=str(td["id"]),
            name=str(td["name"]),
            product=str(td["product"]),
            quantity=_number(td["quantity_kg"], f"{where}.quantity_kg"),
            due_date=_number(td["due_h"], f"{where}.due_h"),
        )
        if t.id in tasks:
            raise InstanceFormatError(f"{where}: duplicate task id {t.id}")
        rid = str(td["resource"])
        if rid not in by_resource:
            raise InstanceFormatError(f"{where}: unknown resource {rid}")
        pos = td["chain_position"]
        if not isinstance(pos, int) or isinstance(pos, bool) or pos < 0:
            raise InstanceFormatError(f"{where}: chain_position must be a non-negative integer")
        tasks[t.id] = t
        by_resource[rid].append((pos, t.id))

    for r in resources:
        entries = sorted(by_resource[r.id])
        positions = [pos for pos, _ in entries]
        if positions != list(range(len(positions))):
            raise InstanceFormatError(
                f"resource {r.id}: chain_position values must be 0..{len(positions) - 1}"
            )
        r.task_chain = [tid for _, tid in entries]

    _require(data["disruption"], {"order", "arrival_h"}, "disruption")
    od = data["disruption"]["order"]
    _require(od, _ORDER_FIELDS, "disruption.order")
    order = Task(
        id=str(od["id"]),
        name=str(od["name"]),
        product=str(od["product"]),
        quantity=_number(od["quantity_kg"], "disruption.order.quantity_kg"),
        due_date=_number(od["due_h"], "disruption.order.due_h"),
    )
    arrival = _number(data["disruption"]["arrival_h"], "disruption.arrival_h")

    state = ScheduleState(resources=resources, tasks=tasks)
    return Instance(state=state, order=order, arrival_h=arrival)


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(instance), encoding="utf-8")


def load_instance(path: str | Path) -> Instance:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: not valid JSON: {exc}") from exc
    return instance_from_dict(data)
