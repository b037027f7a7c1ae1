"""The repair loop: elaborate, check goal, propose, select, apply, learn.

An episode starts from a disrupted state (focal task set, pre-disruption
tardiness snapshotted) and runs repair steps until the goal is reached, the
step limit hits, or nothing is proposable. With learning on, each step bumps
the visited key's trace and applies one SARSA update; traces are cleared
when the episode ends. With learning off the run is pure greedy (epsilon 0)
and the store is left untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Callable, Union

from .errors import InvalidConfig
from .operators import RepairOperator, apply, propose
from .rl import Hyperparams, QStore, goal_reached, qkey, reward, select
from .schedule import ScheduleState, elaborate


class Outcome(str, Enum):
    GOAL_REACHED = "goal-reached"
    STEP_LIMIT = "step-limit"
    NO_PROPOSALS = "no-proposals"


GOAL_KINDS = ("tardiness-recovery",)


@dataclass
class EpisodeConfig:
    max_steps: int = 50
    goal: str = "tardiness-recovery"
    seed: int = 0
    hyper: Hyperparams | None = None

    def check(self) -> None:
        if self.max_steps <= 0:
            raise InvalidConfig(f"max_steps must be positive, got {self.max_steps}")
        if self.goal not in GOAL_KINDS:
            raise InvalidConfig(f"unknown goal kind {self.goal!r}")


@dataclass
class StepRecord:
    index: int  # 1-based step number
    operator: RepairOperator
    source_resource: str
    tardiness_before: float
    tardiness_after: float
    reward: float
    proposal_count: int


@dataclass
class EpisodeResult:
    outcome: Outcome
    steps: list[StepRecord] = field(default_factory=list)
    final_state: ScheduleState | None = None


def run_episode(
    state: ScheduleState,
    store: QStore,
    cfg: EpisodeConfig,
    learning: bool = True,
    rng: Random | None = None,
) -> EpisodeResult:
    """Run one repair episode from ``state``; mutates ``store`` iff learning."""
    cfg.check()
    if rng is None:
        rng = Random(cfg.seed)
    if learning and cfg.hyper is not None:
        store.hyper = cfg.hyper
    eps_override = None if learning else 0.0

    state = elaborate(state)
    steps: list[StepRecord] = []
    if goal_reached(state):
        return EpisodeResult(Outcome.GOAL_REACHED, steps, state)
    proposals = propose(state)
    if not proposals:
        return EpisodeResult(Outcome.NO_PROPOSALS, steps, state)
    op = select(store, state, proposals, rng, epsilon=eps_override)
    key = qkey(state, op)

    for step_index in range(1, cfg.max_steps + 1):
        if learning:
            store.bump_trace(key)
        source = state.resource_of(op.focal).id
        nxt = apply(state, op)
        r = reward(state, nxt)
        steps.append(
            StepRecord(
                index=step_index,
                operator=op,
                source_resource=source,
                tardiness_before=state.total_tardiness,
                tardiness_after=nxt.total_tardiness,
                reward=r,
                proposal_count=len(proposals),
            )
        )
        if goal_reached(nxt):
            if learning:
                store.sarsa_update(key, r, None)
                store.clear_traces()
            return EpisodeResult(Outcome.GOAL_REACHED, steps, nxt)
        if step_index == cfg.max_steps:
            if learning:
                store.sarsa_update(key, r, None)
                store.clear_traces()
            return EpisodeResult(Outcome.STEP_LIMIT, steps, nxt)
        next_proposals = propose(nxt)
        if not next_proposals:
            if learning:
                store.sarsa_update(key, r, None)
                store.clear_traces()
            return EpisodeResult(Outcome.NO_PROPOSALS, steps, nxt)
        next_op = select(store, nxt, next_proposals, rng, epsilon=eps_override)
        next_key = qkey(nxt, next_op)
        if learning:
            store.sarsa_update(key, r, next_key)
        state, op, key, proposals = nxt, next_op, next_key, next_proposals

    raise AssertionError("unreachable: loop exits via outcome returns")


DisruptedSource = Union[ScheduleState, Callable[[int], ScheduleState]]


def train(
    disrupted: DisruptedSource,
    store: QStore,
    episodes: int,
    cfg: EpisodeConfig,
) -> list[EpisodeResult]:
    """Run learning episodes from fresh copies of the disrupted instance.

    ``disrupted`` is either the disrupted state itself (copied per episode)
    or a callable episode_index -> state. Fully deterministic under
    ``cfg.seed``: one generator drives all episodes in order.
    """
    if episodes <= 0:
        raise InvalidConfig(f"episodes must be positive, got {episodes}")
    cfg.check()
    rng = Random(cfg.seed)
    results: list[EpisodeResult] = []
    for i in range(episodes):
        start = disrupted(i) if callable(disrupted) else disrupted.clone()
        results.append(run_episode(start, store, cfg, learning=True, rng=rng))
    return results


def format_trace(result: EpisodeResult) -> str:
    """Line-oriented operator trace, one ``step k: ...`` line per step."""
    if result.final_state is None:
        return ""
    tasks = result.final_state.tasks
    lines = []
    for s in result.steps:
        lines.append(
            f"step {s.index}: {s.operator.kind.value}"
            f"({tasks[s.operator.focal].name}, {tasks[s.operator.aux].name})"
            f" resource {s.source_resource}->{s.operator.target_resource}"
            f" totTard {s.tardiness_before:g}->{s.tardiness_after:g}"
        )
    return "\n".join(lines)


def trace_dict(result: EpisodeResult) -> dict:
    """Structured episode trace for JSON output and the renderer."""
    final = result.final_state
    tasks = final.tasks if final is not None else {}
    return {
        "outcome": result.outcome.value,
        "init_tardiness": final.init_tardiness if final is not None else None,
        "final_tardiness": final.total_tardiness if final is not None else None,
        "steps": [
            {
                "step": s.index,
                "kind": s.operator.kind.value,
                "focal": tasks[s.operator.focal].name,
                "aux": tasks[s.operator.aux].name,
                "source_resource": s.source_resource,
                "target_resource": s.operator.target_resource,
                "tardiness_before": s.tardiness_before,
                "tardiness_after": s.tardiness_after,
                "reward": s.reward,
                "proposal_count": s.proposal_count,
            }
            for s in result.steps
        ],
    }
