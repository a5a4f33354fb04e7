"""Command-line entry points: plan, exec, eval, bench, ablate, validate."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from mrplan import dsl, metrics
from mrplan.bench import (
    Planner,
    load_dataset,
    make_backend,
    run_ablation,
    run_benchmark,
    task_seed,
    validate_dataset,
)
from mrplan.coalition import InfeasiblePlan, allocate, form_policy, random_allocate, with_demands
from mrplan.executor import ExecutionTrace, InvalidPlanError, execute
from mrplan.llm.client import BackendConfig
from mrplan.llm.pipeline import StageError, Transcript, run_pipeline
from mrplan.llm.prompts import PromptConfig
from mrplan.metrics import DatasetError, GroundTruth
from mrplan.model import RobotSpec
from mrplan.world import load_floorplan

log = logging.getLogger("mrplan")


def _prompt_config(args) -> PromptConfig:
    return PromptConfig(include_line_comments=not args.no_comments,
                        include_block_summaries=not args.no_summary,
                        skip_coalition=args.no_coalition)


def _backend(args) -> BackendConfig:
    if args.backend_config:
        return BackendConfig.from_toml(args.backend_config)
    return BackendConfig()


def _planner(args) -> Planner:
    return Planner(args.planner, seed=args.seed, prompt=_prompt_config(args), backend=_backend(args))


def _read_robots(path: str) -> tuple[RobotSpec, ...]:
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict):
        doc = doc["robots"]
    return tuple(RobotSpec.from_dict(r) for r in doc)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _task_context(args):
    """(task or None, world, robots) from --task or --floorplan/--robots."""
    if args.task:
        task = load_dataset(args.dataset).get(args.task)
        return task, task.world(), task.robots
    if not (args.floorplan and args.robots):
        raise SystemExit("error: give --task, or both --floorplan and --robots")
    return None, load_floorplan(args.floorplan), _read_robots(args.robots)


def cmd_plan(args) -> int:
    task, world, robots = _task_context(args)
    instruction = args.instruction or (task.instruction if task else None)
    if args.planner == "llm":
        if not instruction:
            raise SystemExit("error: the llm planner needs an instruction")
        backend_cfg = _backend(args)
        if task is None and backend_cfg.kind == "oracle-mock":
            raise SystemExit("error: the oracle-mock backend needs --task (it answers from ground truth)")
        backend = make_backend(backend_cfg, task)
        transcript = Transcript(args.transcript)
        try:
            res = run_pipeline(instruction, world, robots, _prompt_config(args), backend, transcript)
        except StageError as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        if res.refusal:
            print(f"infeasible ({res.refusal.stage}): {res.refusal.reason}", file=sys.stderr)
            return 3
        _emit(dsl.serialize(res.plan), args.out)
        return 0
    if task is None or task.gt_decomposition is None:
        raise SystemExit(f"error: the {args.planner} planner needs --task with a ground-truth decomposition")
    decomp = with_demands(task.gt_decomposition, world)
    if args.planner == "oracle":
        try:
            plan = allocate(decomp, form_policy(decomp, robots))
        except InfeasiblePlan as e:
            print(f"infeasible: {e}", file=sys.stderr)
            return 3
    else:
        plan = random_allocate(decomp, robots, task_seed(args.seed, task.id))
    _emit(dsl.serialize(plan), args.out)
    return 0


def cmd_exec(args) -> int:
    _, world, robots = _task_context(args)
    try:
        plan = dsl.parse(Path(args.plan).read_text())
        trace = execute(plan, world, robots, strict=args.strict)
    except dsl.DslSyntaxError as e:
        print(f"{args.plan}:{e}", file=sys.stderr)
        return 2
    except InvalidPlanError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    _emit(trace.to_jsonl(), args.out)
    return 0


def cmd_eval(args) -> int:
    trace = ExecutionTrace.from_jsonl(Path(args.trace).read_text())
    if args.task:
        gt = load_dataset(args.dataset).get(args.task).ground_truth
    elif args.ground_truth:
        doc = json.loads(Path(args.ground_truth).read_text())
        gt = GroundTruth.from_dict(doc.get("ground_truth", doc))
    else:
        raise SystemExit("error: give --task or --ground-truth")
    try:
        record = metrics.evaluate(trace, gt)
    except (metrics.MetricError, DatasetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    _emit(json.dumps(record.to_dict(), indent=2, sort_keys=True) + "\n", args.out)
    return 0


def cmd_bench(args) -> int:
    manifest = load_dataset(args.dataset)
    result = run_benchmark(manifest, _planner(args), args.out, args.jobs, args.task_id)
    print(result.report.to_markdown())
    for r in result.results:
        if r.error:
            print(f"{r.task_id}: {r.error}", file=sys.stderr)
    if result.run_dir:
        print(f"\nartifacts: {result.run_dir}")
    return 0


def cmd_ablate(args) -> int:
    manifest = load_dataset(args.dataset)
    backend = _backend(args) if args.backend_config else BackendConfig(kind="oracle-mock")
    report = run_ablation(manifest, backend, _prompt_config(args), args.out, args.jobs, args.task_id)
    print(report.to_markdown("Method"))
    return 0


def cmd_validate(args) -> int:
    manifest = load_dataset(args.dataset)
    issues = validate_dataset(manifest)
    for w in manifest.warnings:
        print(f"warning: {w}")
    for i in issues:
        print(f"{i.severity}: {i.location}: {i.message} [{i.code}]")
    errors = sum(1 for i in issues if i.severity == "error")
    counts = ", ".join(f"{k} {v}" for k, v in manifest.counts.items())
    print(f"{len(manifest.tasks)} tasks ({counts}); {errors} error(s)")
    return 1 if errors else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mrplan", description="Multi-robot task planning toolkit.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def dataset(p):
        p.add_argument("--dataset", type=Path, default=None, help="benchmark root (default: shipped)")

    def context(p):
        dataset(p)
        p.add_argument("--task", help="take world, robots and ground truth from this benchmark task")
        p.add_argument("--floorplan", help="floor-plan JSON")
        p.add_argument("--robots", help="robot list JSON")

    def prompt_flags(p):
        p.add_argument("--backend-config", help="TOML file with backend settings")
        p.add_argument("--no-comments", action="store_true", help="drop per-line comments from examples")
        p.add_argument("--no-summary", action="store_true", help="drop block summaries from examples")
        p.add_argument("--no-coalition", action="store_true", help="skip the coalition-formation stage")

    def planner_flags(p):
        p.add_argument("--planner", choices=("oracle", "random", "llm"), default="oracle")
        p.add_argument("--seed", type=int, default=0)
        prompt_flags(p)

    p = sub.add_parser("plan", help="instruction -> plan text")
    context(p)
    planner_flags(p)
    p.add_argument("--instruction", help="override the task's instruction")
    p.add_argument("--transcript", help="write the LLM transcript (JSONL) here")
    p.add_argument("--out", help="write the plan here instead of stdout")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("exec", help="plan + floor plan -> trace")
    p.add_argument("plan")
    context(p)
    p.add_argument("--strict", action="store_true", help="reject plans with skill or capacity errors")
    p.add_argument("--out", help="write the trace here instead of stdout")
    p.set_defaults(func=cmd_exec)

    p = sub.add_parser("eval", help="trace + ground truth -> metrics")
    p.add_argument("trace")
    dataset(p)
    p.add_argument("--task")
    p.add_argument("--ground-truth", help="JSON with a ground_truth object (a task file works)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run a planner over the benchmark")
    dataset(p)
    planner_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="runs", help="base directory for run artifacts")
    p.add_argument("--task-id", action="append", help="restrict to these task ids (repeatable)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("ablate", help="prompt ablation sweep (five variants)")
    dataset(p)
    prompt_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="runs")
    p.add_argument("--task-id", action="append")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("validate", help="check dataset self-consistency")
    dataset(p)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DatasetError, KeyError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
