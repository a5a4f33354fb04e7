"""Benchmark dataset, validation and runners.

Dataset layout::

    <root>/manifest.json            {"name": ..., "tasks": ["tasks/el01.json", ...]}
    <root>/floorplans/<name>.json   floor-plan documents
    <root>/tasks/<id>.json          one task each, floor plan referenced relative to <root>
"""

from __future__ import annotations

import json
import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from mrplan import dsl, metrics
from mrplan.coalition import Kind, allocate, form_policy, random_allocate, with_demands
from mrplan.dsl import ValidationIssue
from mrplan.executor import InvalidPlanError, execute
from mrplan.llm.client import BackendConfig, ChatClient, ScriptedBackend, load_script
from mrplan.llm.pipeline import OracleBackend, StageError, Transcript, run_pipeline
from mrplan.llm.prompts import PromptConfig, ablation_configs, policy_json
from mrplan.metrics import CATEGORIES, DatasetError, GroundTruth, MetricsRecord, Refusal, Report
from mrplan.model import Decomposition, RobotSpec, covers
from mrplan.world import FloorPlanError, WorldState, load_floorplan

log = logging.getLogger(__name__)

CATEGORY_COUNTS = {"elemental": 6, "simple": 8, "compound": 14, "complex": 8}


def default_dataset() -> Path:
    return Path(str(resources.files("mrplan") / "data" / "benchmark"))


@dataclass(frozen=True)
class BenchTask:
    id: str
    category: str
    instruction: str
    floorplan: Path
    robots: tuple[RobotSpec, ...]
    ground_truth: GroundTruth
    gt_decomposition: Decomposition | None = None

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise DatasetError(f"task {self.id}: unknown category {self.category!r}")

    def world(self) -> WorldState:
        return _load_world(self.floorplan)

    def to_dict(self, root: Path | None = None) -> dict[str, Any]:
        fp = self.floorplan.relative_to(root) if root else self.floorplan
        return {
            "id": self.id,
            "category": self.category,
            "instruction": self.instruction,
            "floorplan": fp.as_posix(),
            "robots": [r.to_dict() for r in self.robots],
            "ground_truth": self.ground_truth.to_dict(),
            "gt_decomposition": self.gt_decomposition.to_dict() if self.gt_decomposition else None,
        }


_WORLD_CACHE: dict[Path, dict[str, Any]] = {}


def _load_world(path: Path) -> WorldState:
    path = Path(path).resolve()
    if path not in _WORLD_CACHE:
        _WORLD_CACHE[path] = json.loads(path.read_text())
    return load_floorplan(_WORLD_CACHE[path])


@dataclass
class BenchmarkManifest:
    tasks: list[BenchTask]
    root: Path | None = None
    name: str = ""
    warnings: list[str] = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        out = {c: 0 for c in CATEGORIES}
        for t in self.tasks:
            out[t.category] += 1
        return out

    def get(self, task_id: str) -> BenchTask:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise KeyError(task_id)

    def select(self, task_ids: Iterable[str] | None) -> list[BenchTask]:
        if not task_ids:
            return list(self.tasks)
        wanted = set(task_ids)
        missing = wanted - {t.id for t in self.tasks}
        if missing:
            raise KeyError(f"unknown task id(s): {sorted(missing)}")
        return [t for t in self.tasks if t.id in wanted]


def _field(doc: dict, key: str, where: str):
    if key not in doc:
        raise DatasetError(f"{where}: missing field `{key}`")
    return doc[key]


def load_task(path: str | Path, root: str | Path | None = None) -> BenchTask:
    path = Path(path)
    root = Path(root) if root else path.parent.parent
    where = str(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DatasetError(f"{where}: invalid JSON: {e}") from None
    try:
        fp = root / _field(doc, "floorplan", where)
        if not fp.exists():
            raise DatasetError(f"{where}.floorplan: dangling reference {fp}")
        robots = tuple(RobotSpec.from_dict(r) for r in _field(doc, "robots", where))
        gt = GroundTruth.from_dict(_field(doc, "ground_truth", where))
        decomp = doc.get("gt_decomposition")
        task = BenchTask(
            id=str(_field(doc, "id", where)),
            category=_field(doc, "category", where),
            instruction=_field(doc, "instruction", where),
            floorplan=fp,
            robots=robots,
            ground_truth=gt,
            gt_decomposition=Decomposition.from_dict(decomp) if decomp else None,
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, DatasetError):
            raise
        raise DatasetError(f"{where}: schema violation: {e}") from None
    try:
        world = task.world()
    except FloorPlanError as e:
        raise DatasetError(f"{fp}: {e}") from None
    for i, goal in enumerate(gt.goal_conditions):
        if not world.has_entity(goal.object_id):
            raise DatasetError(
                f"{where}.ground_truth.goal_conditions[{i}]: dangling reference to object {goal.object_id!r}"
            )
    return task


def load_dataset(root: str | Path | None = None) -> BenchmarkManifest:
    root = Path(root) if root else default_dataset()
    if not root.is_dir():
        raise DatasetError(f"{root}: not a directory")
    manifest_path = root / "manifest.json"
    if manifest_path.exists():
        doc = json.loads(manifest_path.read_text())
        paths = [root / p for p in _field(doc, "tasks", str(manifest_path))]
        name = doc.get("name", root.name)
    else:
        paths = sorted((root / "tasks").glob("*.json")) if (root / "tasks").is_dir() else []
        name = root.name
    manifest = BenchmarkManifest([load_task(p, root) for p in paths], root, name)
    if not manifest.tasks:
        msg = f"{root}: dataset contains no tasks"
        log.warning(msg)
        manifest.warnings.append(msg)
    ids = [t.id for t in manifest.tasks]
    if len(set(ids)) != len(ids):
        raise DatasetError(f"{root}: duplicate task ids")
    return manifest


# -- validation -----------------------------------------------------------------------

def _issue(task: BenchTask, message: str, code: str, severity: str = "error") -> ValidationIssue:
    return ValidationIssue(severity, task.id, message, code)


def validate_task(task: BenchTask) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []
    world = task.world()
    n = len(task.robots)
    if not 1 <= n <= 4:
        issues.append(_issue(task, f"{n} robots; tasks use 1 to 4", "robot-count"))
    gt = task.ground_truth
    decomp = task.gt_decomposition
    already = [g for g in gt.goal_conditions if metrics.goal_holds(world, g)]
    if already:
        issues.append(_issue(task, f"goal(s) already hold initially: {', '.join(map(str, already))}",
                             "trivial-goal", "warning"))
    if decomp is None:
        if task.category == "elemental" and n != 1:
            issues.append(_issue(task, "elemental tasks have exactly one robot", "category"))
        return issues
    if gt.subtask_count != len(decomp):
        issues.append(_issue(task, f"subtask_count {gt.subtask_count} but decomposition has "
                                   f"{len(decomp)} sub-tasks", "count"))
    decomp = with_demands(decomp, world)
    for st in decomp.subtasks:
        for a in st.actions:
            for arg in a.args:
                if not world.has_entity(arg):
                    issues.append(_issue(task, f"sub-task {st.id} references unknown entity {arg!r}",
                                         "dangling-reference"))
    policy = form_policy(decomp, task.robots)
    issues.extend(_category_issues(task, decomp, policy))
    if policy.infeasible:
        issues.append(_issue(task, "oracle finds no feasible team for "
                                   + ", ".join(d.subtask_id for d in policy.infeasible), "infeasible"))
        return issues
    if any(i.code == "dangling-reference" for i in issues):
        return issues
    trace = execute(allocate(decomp, policy), world, task.robots)
    record = metrics.evaluate(trace, gt)
    if record.gcr != 1:
        unmet = [str(g) for g in gt.goal_conditions if not metrics.goal_holds(trace.final_world, g)]
        issues.append(_issue(task, f"oracle execution leaves goals unmet: {', '.join(unmet)}",
                             "self-consistency"))
    if record.exe != 1:
        bad = "; ".join(f"{s.action}: {s.outcome.reason}" for s in trace.failures)
        issues.append(_issue(task, f"oracle plan has failing actions: {bad}", "self-consistency"))
    if record.ru != 1:
        issues.append(_issue(task, f"oracle plan uses {record.phases_observed} phases, ground truth "
                                   f"{gt.gt_phase_count}", "self-consistency"))
    return issues


def _category_issues(task: BenchTask, decomp: Decomposition, policy) -> list[ValidationIssue]:
    out = []
    robots = task.robots
    skillsets = {r.skill_names for r in robots}
    single = [d.kind == Kind.SINGLE_ROBOT for d in policy.decisions]
    if task.category == "elemental":
        if len(robots) != 1:
            out.append(_issue(task, "elemental tasks have exactly one robot", "category"))
    elif task.category == "simple":
        if len(skillsets) != 1:
            out.append(_issue(task, "simple tasks need robots with identical skill sets", "category"))
        phases = decomp.phases()
        sequential = all(len(p) == 1 for p in phases)
        parallel = len(phases) == 1
        if not (sequential or parallel):
            out.append(_issue(task, "simple tasks are purely sequential or purely parallel", "category"))
    elif task.category == "compound":
        if len(skillsets) < 2:
            out.append(_issue(task, "compound tasks need heterogeneous robots", "category"))
        if not all(single):
            out.append(_issue(task, "every compound sub-task must be coverable by one robot", "category"))
    elif task.category == "complex":
        if all(any(covers(r.skill_names, st.required_skills) and
                   (st.demand is None or (r.capacity(st.demand.skill) or 0.0) >= st.demand.amount)
                   for r in robots)
               for st in decomp.subtasks):
            out.append(_issue(task, "complex tasks need a sub-task no single robot can perform", "category"))
    return out


def validate_dataset(manifest: BenchmarkManifest) -> list[ValidationIssue]:
    issues = []
    for task in manifest.tasks:
        issues.extend(validate_task(task))
    return issues


# -- running -------------------------------------------------------------------------------

@dataclass(frozen=True)
class Planner:
    kind: str  # oracle | random | llm
    seed: int = 0
    prompt: PromptConfig = field(default_factory=PromptConfig)
    backend: BackendConfig = field(default_factory=BackendConfig)

    def __post_init__(self):
        if self.kind not in ("oracle", "random", "llm"):
            raise ValueError(f"unknown planner {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "random":
            return f"random{self.seed}"
        if self.kind == "llm":
            return f"llm-{self.prompt.label}"
        return "oracle"


@dataclass
class TaskResult:
    task_id: str
    category: str
    outcome: MetricsRecord | Refusal | None
    plan_text: str | None = None
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"task_id": self.task_id, "category": self.category}
        if isinstance(self.outcome, MetricsRecord):
            d["metrics"] = self.outcome.to_dict()
        elif isinstance(self.outcome, Refusal):
            d["refusal"] = self.outcome.to_dict()
        if self.error:
            d["error"] = self.error
        return d


def task_seed(seed: int, task_id: str) -> int:
    return seed * 1_000_003 + zlib.crc32(task_id.encode())


def make_backend(config: BackendConfig, task: BenchTask | None):
    if config.kind == "http":
        return ChatClient(config)
    if config.kind == "scripted":
        if not config.script:
            raise ValueError("scripted backend needs `script`")
        return ScriptedBackend(load_script(config.script, task.id if task else None))
    if task is None or task.gt_decomposition is None:
        raise ValueError("oracle-mock backend needs a task with a ground-truth decomposition")
    return OracleBackend(task.gt_decomposition, task.robots, task.world())


def run_task(task: BenchTask, planner: Planner, out_dir: str | Path | None = None,
             backend_factory: Callable[[BackendConfig, BenchTask], Any] = make_backend) -> TaskResult:
    """Plan, execute and score one task; write artifacts into ``out_dir`` when given."""
    out = Path(out_dir) if out_dir else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    world = task.world()
    policy = None
    result = TaskResult(task.id, task.category, None)

    if planner.kind in ("oracle", "random"):
        if task.gt_decomposition is None:
            raise ValueError(f"{planner.kind} planner needs the ground-truth decomposition of {task.id}")
        decomp = with_demands(task.gt_decomposition, world)
        if planner.kind == "oracle":
            policy = form_policy(decomp, task.robots)
            if out:
                (out / "policy.json").write_text(policy_json(policy) + "\n")
            if policy.infeasible:
                result.outcome = Refusal("; ".join(f"{d.subtask_id}: {d.rationale}" for d in policy.infeasible),
                                         "coalition")
                _write_json(out, "metrics.json", result.to_dict())
                return result
            plan = allocate(decomp, policy)
        else:
            plan = random_allocate(decomp, task.robots, task_seed(planner.seed, task.id))
    else:
        transcript = Transcript(out / "transcript.jsonl" if out else None)
        backend = backend_factory(planner.backend, task)
        try:
            res = run_pipeline(task.instruction, world, task.robots, planner.prompt, backend, transcript)
        except StageError as e:
            result.error = str(e)
            _write_json(out, "metrics.json", result.to_dict())
            return result
        if res.policy is not None and out:
            (out / "policy.json").write_text(policy_json(res.policy) + "\n")
        if res.refusal is not None:
            result.outcome = res.refusal
            _write_json(out, "metrics.json", result.to_dict())
            return result
        plan = res.plan

    result.plan_text = dsl.serialize(plan)
    if out:
        (out / "plan.dsl").write_text(result.plan_text)
    try:
        trace = execute(plan, world, task.robots)
    except InvalidPlanError as e:
        result.error = str(e)
        _write_json(out, "metrics.json", result.to_dict())
        return result
    if out:
        trace.write(out / "trace.jsonl")
    try:
        result.outcome = metrics.evaluate(trace, task.ground_truth)
    except metrics.MetricError as e:
        result.error = str(e)
    _write_json(out, "metrics.json", result.to_dict())
    return result


def _write_json(out: Path | None, name: str, doc: Any) -> None:
    if out:
        (out / name).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


@dataclass
class BenchmarkResult:
    planner: Planner
    results: list[TaskResult]
    report: Report
    run_dir: Path | None = None


def fresh_run_dir(base: str | Path, label: str) -> Path:
    stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
    path = Path(base) / f"{stamp}-{label}"
    n = 1
    while path.exists():
        n += 1
        path = Path(base) / f"{stamp}-{label}-{n}"
    path.mkdir(parents=True)
    return path


def _scored(results: Sequence[TaskResult]) -> list[tuple[str, MetricsRecord | Refusal]]:
    """Records for aggregation. A planner error scores as a failed run (all zeros)."""
    out = []
    for r in results:
        if r.outcome is None:
            out.append((r.category, MetricsRecord(0, 0, Fraction(0), Fraction(0),
                                                  Fraction(0))))
        else:
            out.append((r.category, r.outcome))
    return out


def run_benchmark(manifest: BenchmarkManifest, planner: Planner, out: str | Path | None = None,
                  jobs: int = 1, task_ids: Iterable[str] | None = None,
                  backend_factory: Callable[[BackendConfig, BenchTask], Any] = make_backend) -> BenchmarkResult:
    tasks = manifest.select(task_ids)
    run_dir = fresh_run_dir(out, planner.label) if out else None

    def one(task: BenchTask) -> TaskResult:
        try:
            return run_task(task, planner, run_dir / task.id if run_dir else None, backend_factory)
        except Exception as e:  # keep the sweep going; the failure is reported per task
            log.exception("task %s failed", task.id)
            return TaskResult(task.id, task.category, None, error=f"{type(e).__name__}: {e}")

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, tasks))
    else:
        results = [one(t) for t in tasks]
    report = metrics.aggregate(_scored(results))
    if run_dir:
        (run_dir / "report.md").write_text(report.to_markdown())
        (run_dir / "report.csv").write_text(report.to_csv())
        _write_json(run_dir, "records.json", [r.to_dict() for r in results])
    return BenchmarkResult(planner, results, report, run_dir)


ABLATION_ORDER = ("full", "no-comments", "no-summary", "no-both", "no-coalition")


def run_ablation(manifest: BenchmarkManifest, backend: BackendConfig, base: PromptConfig | None = None,
                 out: str | Path | None = None, jobs: int = 1, task_ids: Iterable[str] | None = None,
                 backend_factory: Callable[[BackendConfig, BenchTask], Any] = make_backend) -> Report:
    """Run the LLM planner under each prompt variant; one overall row per variant."""
    run_dir = fresh_run_dir(out, "ablate") if out else None
    rows = []
    for config in ablation_configs(base):
        planner = Planner("llm", prompt=config, backend=backend)
        res = run_benchmark(manifest, planner, run_dir, jobs, task_ids, backend_factory)
        scored = [rec for _, rec in _scored(res.results) if isinstance(rec, MetricsRecord)]
        refusals = sum(1 for r in res.results if isinstance(r.outcome, Refusal))
        if scored:
            rows.append(metrics.mean_row(config.label, scored, refusals))
    report = Report(rows)
    if run_dir:
        (run_dir / "ablation.md").write_text(report.to_markdown("Method"))
        (run_dir / "ablation.csv").write_text(report.to_csv("method"))
    return report
