"""Command-line surface: generate, train, repair, evaluate, render, validate,
inspect-q.

Exit codes: 0 success, 1 validation failure, 2 file/format errors. Status
messages go to stderr; command output (traces, charts, tables) to stdout.
Artifacts written by seeded commands are byte-reproducible: reports embed no
paths, timestamps or wall-clock figures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from random import Random

from .episode import EpisodeConfig, EpisodeResult, Outcome, format_trace, run_episode, trace_dict, train
from .errors import (
    CorruptQStoreError,
    InfeasibleSpec,
    InstanceFormatError,
    QStoreVersionError,
    ReskitError,
)
from .gantt import render_svg, render_text
from .instances import (
    Instance,
    InstanceSpec,
    generate_instance,
    inject_disruption,
    load_instance,
    sample_disruption,
    save_instance,
)
from .rl import Hyperparams, QStore, load_qstore, save_qstore, top_preferences
from .schedule import elaborate, validate


@dataclass
class CampaignReport:
    """Training campaign summary; wall-clock stays out of the JSON artifact
    so equal seeds yield byte-identical report files."""

    seed: int
    episodes: int
    hyper: Hyperparams
    max_steps: int
    init_tardiness: float
    post_insertion_tardiness: float
    episode_outcomes: list[dict] = field(default_factory=list)
    success_rate: float = 0.0
    greedy_evaluation: dict = field(default_factory=dict)
    q_entries: int = 0
    wall_clock_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "episodes": self.episodes,
            "hyper": {
                "alpha": self.hyper.alpha,
                "gamma": self.hyper.gamma,
                "lambda": self.hyper.lam,
                "epsilon": self.hyper.epsilon,
            },
            "max_steps": self.max_steps,
            "init_tardiness": self.init_tardiness,
            "post_insertion_tardiness": self.post_insertion_tardiness,
            "episode_outcomes": self.episode_outcomes,
            "success_rate": self.success_rate,
            "greedy_evaluation": self.greedy_evaluation,
            "q_entries": self.q_entries,
        }


def _episode_summary(index: int, result: EpisodeResult) -> dict:
    return {
        "episode": index,
        "outcome": result.outcome.value,
        "steps": len(result.steps),
        "final_tardiness": result.final_state.total_tardiness,
    }


def _write_json(path: str, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("RESKIT_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InstanceFormatError(f"RESKIT_SEED must be an integer, got {env!r}")
    return 0


def cmd_generate(args) -> int:
    seed = _resolve_seed(args)
    spec = InstanceSpec(
        resource_count=args.resources,
        products=tuple(args.products.split(",")),
        task_count=args.tasks,
        rate_range=(args.rate_min, args.rate_max),
        quantity_range=(args.qty_min, args.qty_max),
        slack_range=(args.slack_min, args.slack_max),
        capability_density=args.density,
        seed=seed,
    )
    instance = generate_instance(spec)
    instance.arrival_h = args.arrival
    save_instance(instance, args.out)
    print(
        f"wrote {args.out}: {len(instance.state.resources)} resources, "
        f"{len(instance.state.tasks)} tasks, disruption {instance.order.name} "
        f"({instance.order.product}, {instance.order.quantity:g} kg)",
        file=sys.stderr,
    )
    return 0


def cmd_train(args) -> int:
    seed = _resolve_seed(args)
    instance = load_instance(args.instance)
    disrupted = inject_disruption(instance)
    hyper = Hyperparams(alpha=args.alpha, gamma=args.gamma, lam=args.lam, epsilon=args.epsilon)
    store = QStore(hyper)
    cfg = EpisodeConfig(max_steps=args.max_steps, seed=seed)

    t0 = time.perf_counter()
    results = train(disrupted, store, args.episodes, cfg)
    wall = time.perf_counter() - t0

    greedy = run_episode(disrupted.clone(), store, cfg, learning=False)
    goal_count = sum(1 for r in results if r.outcome is Outcome.GOAL_REACHED)
    report = CampaignReport(
        seed=seed,
        episodes=args.episodes,
        hyper=hyper,
        max_steps=args.max_steps,
        init_tardiness=disrupted.init_tardiness,
        post_insertion_tardiness=disrupted.total_tardiness,
        episode_outcomes=[_episode_summary(i + 1, r) for i, r in enumerate(results)],
        success_rate=goal_count / len(results),
        greedy_evaluation={
            "outcome": greedy.outcome.value,
            "steps": len(greedy.steps),
            "final_tardiness": greedy.final_state.total_tardiness,
        },
        q_entries=len(store.entries),
        wall_clock_s=wall,
    )
    save_qstore(store, args.qstore)
    if args.report:
        _write_json(args.report, report.to_dict())
    print(
        f"trained {args.episodes} episodes in {wall:.2f}s: success rate "
        f"{report.success_rate:.2f}, {report.q_entries} q-entries, greedy final "
        f"{greedy.final_state.total_tardiness:g} h (init {disrupted.init_tardiness:g} h)",
        file=sys.stderr,
    )
    return 0


def cmd_repair(args) -> int:
    seed = _resolve_seed(args)
    instance = load_instance(args.instance)
    store = load_qstore(args.qstore) if args.qstore else QStore()
    disrupted = inject_disruption(instance)
    cfg = EpisodeConfig(max_steps=args.max_steps, seed=seed)
    result = run_episode(disrupted.clone(), store, cfg, learning=False)

    trace = format_trace(result)
    if trace:
        print(trace)
    print(
        f"outcome {result.outcome.value}: totTard {disrupted.total_tardiness:g} -> "
        f"{result.final_state.total_tardiness:g} h (init {disrupted.init_tardiness:g} h, "
        f"{len(result.steps)} steps)"
    )
    if args.trace:
        _write_json(args.trace, trace_dict(result))
    if args.svg_before:
        caption = (
            f"after insertion: totTard {disrupted.total_tardiness:g} h "
            f"(init {disrupted.init_tardiness:g} h)"
        )
        Path(args.svg_before).write_text(render_svg(disrupted, caption), encoding="utf-8")
    if args.svg_after:
        caption = f"after repair: totTard {result.final_state.total_tardiness:g} h"
        Path(args.svg_after).write_text(render_svg(result.final_state, caption), encoding="utf-8")
    return 0


def cmd_evaluate(args) -> int:
    seed = _resolve_seed(args)
    instance = load_instance(args.instance)
    store = load_qstore(args.qstore) if args.qstore else QStore()
    cfg = EpisodeConfig(max_steps=args.max_steps, seed=seed)
    rng = Random(seed)

    runs = []
    for i in range(args.runs):
        fresh = sample_disruption(instance, rng)
        disrupted = inject_disruption(fresh)
        result = run_episode(disrupted, store, cfg, learning=False)
        runs.append(
            {
                "run": i + 1,
                "order": fresh.order.name,
                "product": fresh.order.product,
                "outcome": result.outcome.value,
                "steps": len(result.steps),
                "init_tardiness": disrupted.init_tardiness,
                "post_insertion_tardiness": disrupted.total_tardiness,
                "final_tardiness": result.final_state.total_tardiness,
            }
        )
    success = sum(1 for r in runs if r["outcome"] == Outcome.GOAL_REACHED.value)
    rate = success / len(runs) if runs else 0.0
    if args.report:
        _write_json(args.report, {"runs": runs, "success_rate": rate})
    print(f"success rate {rate:.3f} ({success}/{len(runs)} greedy runs reached the goal)")
    return 0


def cmd_render(args) -> int:
    instance = load_instance(args.instance)
    state = inject_disruption(instance) if args.disrupted else elaborate(instance.state)
    if args.svg:
        Path(args.svg).write_text(render_svg(state), encoding="utf-8")
        print(f"wrote {args.svg}", file=sys.stderr)
    if args.text or not args.svg:
        print(render_text(state, quantum=args.quantum))
    return 0


def cmd_validate(args) -> int:
    failures = 0
    if args.instance:
        instance = load_instance(args.instance)
        try:
            violations = validate(elaborate(instance.state))
        except ReskitError as exc:
            print(f"{args.instance}: {exc}", file=sys.stderr)
            return 1
        for v in violations:
            print(f"{args.instance}: {v}", file=sys.stderr)
            failures += 1
        if instance.order.product not in {
            p for r in instance.state.resources for p in r.rates
        }:
            print(
                f"{args.instance}: no resource can process the arriving order",
                file=sys.stderr,
            )
            failures += 1
    if args.qstore:
        store = load_qstore(args.qstore)
        print(f"{args.qstore}: {len(store.entries)} entries", file=sys.stderr)
    if failures:
        return 1
    print("ok", file=sys.stderr)
    return 0


def cmd_inspect_q(args) -> int:
    store = load_qstore(args.qstore)
    print(
        f"# {len(store.entries)} entries, alpha={store.hyper.alpha:g} "
        f"gamma={store.hyper.gamma:g} lambda={store.hyper.lam:g} "
        f"epsilon={store.hyper.epsilon:g}"
    )
    for key, value in top_preferences(store, per_signature=args.top):
        sig = key.sig
        print(
            f"totTard={sig.total_tardiness:.2f} init={sig.init_tardiness:.2f} "
            f"wip={sig.total_wip:.2f} n={sig.task_number} focal={sig.focal_task}  "
            f"{key.op_name}(aux={key.op_aux}) = {value:.6g}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reskit",
        description="Schedule-repair engine: absorb order arrivals via learned local repairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=None, help="default: $RESKIT_SEED or 0")

    p = sub.add_parser("generate", help="write a random instance file")
    p.add_argument("--out", required=True)
    p.add_argument("--resources", type=int, default=3)
    p.add_argument("--tasks", type=int, default=15)
    p.add_argument("--products", default="A,B,C,D")
    p.add_argument("--rate-min", type=float, default=6.0)
    p.add_argument("--rate-max", type=float, default=24.0)
    p.add_argument("--qty-min", type=float, default=20.0)
    p.add_argument("--qty-max", type=float, default=60.0)
    p.add_argument("--slack-min", type=float, default=1.0)
    p.add_argument("--slack-max", type=float, default=2.5)
    p.add_argument("--density", type=float, default=0.75)
    p.add_argument("--arrival", type=float, default=0.0)
    add_seed(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train a preference store on an instance's disruption")
    p.add_argument("--instance", required=True)
    p.add_argument("--qstore", required=True, help="output preference store path")
    p.add_argument("--report", default=None, help="optional campaign report JSON")
    p.add_argument("--episodes", type=int, default=20)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.9)
    p.add_argument("--lambda", dest="lam", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--max-steps", type=int, default=50)
    add_seed(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("repair", help="run one greedy repair episode, print the trace")
    p.add_argument("--instance", required=True)
    p.add_argument("--qstore", default=None)
    p.add_argument("--trace", default=None, help="optional JSON trace path")
    p.add_argument("--svg-before", default=None)
    p.add_argument("--svg-after", default=None)
    p.add_argument("--max-steps", type=int, default=50)
    add_seed(p)
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("evaluate", help="greedy runs over fresh disruptions, report success rate")
    p.add_argument("--instance", required=True)
    p.add_argument("--qstore", default=None)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--report", default=None)
    p.add_argument("--max-steps", type=int, default=50)
    add_seed(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("render", help="draw an instance as a Gantt chart")
    p.add_argument("--instance", required=True)
    p.add_argument("--svg", default=None)
    p.add_argument("--text", action="store_true")
    p.add_argument("--quantum", type=float, default=0.5, help="hours per character")
    p.add_argument("--disrupted", action="store_true", help="render after order insertion")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("validate", help="check instance and store files")
    p.add_argument("--instance", default=None)
    p.add_argument("--qstore", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("inspect-q", help="dump top preferences per state signature")
    p.add_argument("--qstore", required=True)
    p.add_argument("--top", type=int, default=5)
    p.set_defaults(func=cmd_inspect_q)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceFormatError, CorruptQStoreError, QStoreVersionError, InfeasibleSpec) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ReskitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
