"""Executability, goal-condition recall, robot utilization, completion and success.

Ratios are kept as `fractions.Fraction` so the all-or-nothing rules (TCR, SR)
compare exactly; rendering rounds to two decimals only at the very end.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from mrplan.model import GoalCondition

CATEGORIES = ("elemental", "simple", "compound", "complex")
METRIC_NAMES = ("SR", "TCR", "GCR", "RU", "Exe")


class MetricError(ValueError):
    pass


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class GroundTruth:
    goal_conditions: tuple[GoalCondition, ...]
    gt_phase_count: int
    subtask_count: int

    def __post_init__(self):
        object.__setattr__(self, "goal_conditions", tuple(self.goal_conditions))
        if not self.goal_conditions:
            raise DatasetError("ground truth needs at least one goal condition")
        if self.gt_phase_count < 1 or self.subtask_count < 1:
            raise DatasetError("phase and sub-task counts must be positive")
        if self.gt_phase_count > self.subtask_count:
            raise DatasetError(
                f"gt_phase_count {self.gt_phase_count} exceeds subtask_count {self.subtask_count}"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "goal_conditions": [g.to_dict() for g in self.goal_conditions],
            "gt_phase_count": self.gt_phase_count,
            "subtask_count": self.subtask_count,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GroundTruth":
        return cls(tuple(GoalCondition.from_dict(g) for g in d["goal_conditions"]),
                   int(d["gt_phase_count"]), int(d["subtask_count"]))


@dataclass(frozen=True)
class MetricsRecord:
    sr: int
    tcr: int
    gcr: Fraction
    ru: Fraction
    exe: Fraction
    actions_total: int = 0
    actions_succeeded: int = 0
    phases_observed: int = 0
    goals_met: int = 0
    goals_total: int = 0

    def __post_init__(self):
        for name in ("gcr", "ru", "exe"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise MetricError(f"{name}={v} outside [0, 1]")
        if (self.tcr == 1) != (self.gcr == 1):
            raise MetricError("tcr must be 1 exactly when gcr is 1")
        if (self.sr == 1) != (self.gcr == 1 and self.ru == 1):
            raise MetricError("sr must be 1 exactly when gcr and ru are both 1")

    def values(self) -> dict[str, Fraction]:
        return {"SR": Fraction(self.sr), "TCR": Fraction(self.tcr), "GCR": self.gcr,
                "RU": self.ru, "Exe": self.exe}

    def to_dict(self) -> dict[str, Any]:
        return {
            "sr": self.sr, "tcr": self.tcr,
            "gcr": float(self.gcr), "ru": float(self.ru), "exe": float(self.exe),
            "exact": {"gcr": str(self.gcr), "ru": str(self.ru), "exe": str(self.exe)},
            "actions_total": self.actions_total, "actions_succeeded": self.actions_succeeded,
            "phases_observed": self.phases_observed,
            "goals_met": self.goals_met, "goals_total": self.goals_total,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MetricsRecord":
        exact = d.get("exact", {})
        return cls(
            int(d["sr"]), int(d["tcr"]),
            Fraction(exact.get("gcr", d["gcr"])), Fraction(exact.get("ru", d["ru"])),
            Fraction(exact.get("exe", d["exe"])),
            d.get("actions_total", 0), d.get("actions_succeeded", 0), d.get("phases_observed", 0),
            d.get("goals_met", 0), d.get("goals_total", 0),
        )


@dataclass(frozen=True)
class Refusal:
    reason: str
    stage: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"refusal": True, "reason": self.reason, "stage": self.stage}


def exe(trace) -> Fraction:
    if trace.total_actions == 0:
        raise MetricError("executability is undefined for a plan without actions")
    return Fraction(trace.succeeded, trace.total_actions)


def goal_holds(world, goal: GoalCondition) -> bool:
    if not world.has_entity(goal.object_id):
        raise DatasetError(f"goal references unknown object {goal.object_id!r}")
    return world.attribute(goal.object_id, goal.attribute) == goal.expected


def gcr(final_world, goals: Iterable[GoalCondition]) -> Fraction:
    goals = list(goals)
    if not goals:
        raise MetricError("goal-condition recall needs at least one goal")
    met = sum(1 for g in goals if goal_holds(final_world, g))
    return Fraction(met, len(goals))


def ru(observed_phases: int, gt: GroundTruth) -> Fraction:
    t, g, k = observed_phases, gt.gt_phase_count, gt.subtask_count
    if t < 1:
        raise MetricError("at least one phase must be observed")
    if k < g:
        raise DatasetError("subtask_count below gt_phase_count")
    if t <= g:
        return Fraction(1)
    if t >= k:
        return Fraction(0)
    return Fraction(k - t, k - g)


def tcr(gcr_value: Fraction | float) -> int:
    if not 0 <= gcr_value <= 1:
        raise MetricError(f"gcr {gcr_value} outside [0, 1]")
    return int(gcr_value == 1)


def sr(gcr_value: Fraction | float, ru_value: Fraction | float) -> int:
    return int(gcr_value == 1 and ru_value == 1)


def evaluate(trace, gt: GroundTruth) -> MetricsRecord:
    g = gcr(trace.final_world, gt.goal_conditions)
    u = ru(len(trace.phase_sequence), gt)
    met = sum(1 for c in gt.goal_conditions if goal_holds(trace.final_world, c))
    return MetricsRecord(
        sr=sr(g, u), tcr=tcr(g), gcr=g, ru=u, exe=exe(trace),
        actions_total=trace.total_actions, actions_succeeded=trace.succeeded,
        phases_observed=len(trace.phase_sequence),
        goals_met=met, goals_total=len(gt.goal_conditions),
    )


# -- aggregation ----------------------------------------------------------------------

@dataclass
class ReportRow:
    label: str
    means: dict[str, Fraction]
    runs: int
    refusals: int = 0


@dataclass
class Report:
    rows: list[ReportRow]
    notices: list[str] = field(default_factory=list)
    refusals: dict[str, int] = field(default_factory=dict)

    def row(self, label: str) -> ReportRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)

    def to_markdown(self, title: str = "Category") -> str:
        head = f"| {title} | " + " | ".join(METRIC_NAMES) + " | runs | refusals |"
        sep = "|" + "---|" * (len(METRIC_NAMES) + 3)
        lines = [head, sep]
        for r in self.rows:
            cells = " | ".join(fmt(r.means[m]) for m in METRIC_NAMES)
            lines.append(f"| {r.label} | {cells} | {r.runs} | {r.refusals} |")
        for n in self.notices:
            lines.append(f"\n_{n}_")
        return "\n".join(lines) + "\n"

    def to_csv(self, title: str = "category") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([title, *METRIC_NAMES, "runs", "refusals"])
        for r in self.rows:
            w.writerow([r.label, *(fmt(r.means[m]) for m in METRIC_NAMES), r.runs, r.refusals])
        return buf.getvalue()


def fmt(x: Fraction) -> str:
    return f"{float(x):.2f}"


def mean_row(label: str, records: Sequence[MetricsRecord], refusals: int = 0) -> ReportRow:
    n = len(records)
    means = {m: sum((rec.values()[m] for rec in records), Fraction(0)) / n for m in METRIC_NAMES}
    return ReportRow(label, means, n, refusals)


def aggregate(records: Iterable[tuple[str, MetricsRecord | Refusal]]) -> Report:
    """Per-category means, rows in the fixed order elemental, simple, compound, complex."""
    scored: dict[str, list[MetricsRecord]] = {c: [] for c in CATEGORIES}
    refused: dict[str, int] = {c: 0 for c in CATEGORIES}
    for category, rec in records:
        if category not in scored:
            raise DatasetError(f"unknown category {category!r}")
        if isinstance(rec, Refusal):
            refused[category] += 1
        else:
            scored[category].append(rec)
    report = Report(rows=[], refusals={c: n for c, n in refused.items() if n})
    for c in CATEGORIES:
        if scored[c]:
            report.rows.append(mean_row(c, scored[c], refused[c]))
        else:
            extra = f" ({refused[c]} refused)" if refused[c] else ""
            report.notices.append(f"no scored runs for category {c}; row omitted{extra}")
    return report
