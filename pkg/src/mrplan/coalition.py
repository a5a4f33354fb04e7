"""Coalition formation and task allocation.

`solve_subtask` picks, for one sub-task, the smallest team of robots whose
pooled skills cover the sub-task and whose pooled capacity meets its demand.
Ties go to the lexicographically smallest tuple of robot ids. With at most a
handful of robots per task an exhaustive search by team size is cheap and
exact; `brute_force_solve` enumerates every subset and serves as its test
oracle.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Any, Collection, Mapping, Sequence

from mrplan.dsl import Assign, Node, Par, PlanAst, Seq
from mrplan.model import (
    Decomposition,
    Demand,
    RobotSpec,
    SkillName,
    SubTask,
    Team,
    capacity_feasible,
    covers,
    pooled_capacity,
    robot_token,
    sorted_skills,
    team_skills,
)

BRUTE_FORCE_LIMIT = 10


class Kind(str, Enum):
    SINGLE_ROBOT = "single_robot"
    TEAM_UNION = "team_union"
    TEAM_CAPACITY = "team_capacity"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class CoalitionDecision:
    subtask_id: str
    kind: Kind
    team: Team | None = None
    rationale: str = ""

    def __post_init__(self):
        if (self.kind == Kind.INFEASIBLE) != (self.team is None):
            raise ValueError("infeasible decisions carry no team; all others need one")
        if self.kind == Kind.SINGLE_ROBOT and len(self.team) != 1:
            raise ValueError("single_robot decision with a multi-robot team")

    @property
    def feasible(self) -> bool:
        return self.kind != Kind.INFEASIBLE

    def same_assignment(self, other: "CoalitionDecision") -> bool:
        return (self.subtask_id, self.kind, self.team) == (other.subtask_id, other.kind, other.team)

    def to_dict(self) -> dict[str, Any]:
        return {
            "subtask_id": self.subtask_id,
            "kind": self.kind.value,
            "team": list(self.team.members) if self.team else None,
            "rationale": self.rationale,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "CoalitionDecision":
        try:
            kind = Kind(d["kind"])
            team = d.get("team")
            return cls(str(d["subtask_id"]), kind, Team(tuple(int(r) for r in team)) if team else None,
                       str(d.get("rationale", "")))
        except (KeyError, TypeError, ValueError) as e:
            raise PolicySchemaError(f"bad decision {dict(d)!r}: {e}") from None


class PolicySchemaError(ValueError):
    pass


@dataclass(frozen=True)
class CoalitionPolicy:
    decisions: tuple[CoalitionDecision, ...]

    def __post_init__(self):
        object.__setattr__(self, "decisions", tuple(self.decisions))

    def for_subtask(self, subtask_id: str) -> CoalitionDecision:
        for d in self.decisions:
            if d.subtask_id == subtask_id:
                return d
        raise KeyError(subtask_id)

    @property
    def infeasible(self) -> list[CoalitionDecision]:
        return [d for d in self.decisions if not d.feasible]

    def to_dict(self) -> dict[str, Any]:
        return {"decisions": [d.to_dict() for d in self.decisions]}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "CoalitionPolicy":
        if not isinstance(d, Mapping) or not isinstance(d.get("decisions"), list):
            raise PolicySchemaError("policy must be an object with a `decisions` list")
        return cls(tuple(CoalitionDecision.from_dict(x) for x in d["decisions"]))


class InfeasiblePlan(ValueError):
    def __init__(self, decisions: Sequence[CoalitionDecision]):
        self.decisions = list(decisions)
        ids = ", ".join(d.subtask_id for d in self.decisions)
        super().__init__(f"no feasible allocation for sub-task(s): {ids}")


def _feasible(team: Sequence[RobotSpec], subtask: SubTask) -> bool:
    if not covers(team_skills(team), subtask.required_skills):
        return False
    d = subtask.demand
    return d is None or capacity_feasible(team, d.skill, d.amount)


def _skills_text(skills) -> str:
    return ", ".join(s.value for s in sorted_skills(skills))


def _team_text(team: Sequence[RobotSpec]) -> str:
    return " + ".join(robot_token(r.id) for r in team)


def _rationale(kind: Kind, subtask: SubTask, team: Sequence[RobotSpec], robots: Sequence[RobotSpec]) -> str:
    need = subtask.required_skills
    d = subtask.demand
    if kind == Kind.SINGLE_ROBOT:
        text = f"{_team_text(team)} has every required skill ({_skills_text(need)})"
        if d is not None:
            text += f" and its {d.skill} capacity {pooled_capacity(team, d.skill)} covers {d.amount}"
        return text + "."
    if kind == Kind.INFEASIBLE:
        missing = set(need) - team_skills(robots)
        if missing:
            return f"no robot has {_skills_text(missing)}; no team can perform this sub-task."
        return (f"all robots together offer {pooled_capacity(robots, d.skill)} {d.skill} capacity, "
                f"below the required {d.amount}; no team can perform this sub-task.")
    if kind == Kind.TEAM_UNION:
        gaps = "; ".join(f"{robot_token(r.id)} lacks {_skills_text(set(need) - r.skill_names)}"
                         for r in robots if not covers(r.skill_names, need))
        return (f"no single robot covers {_skills_text(need)} ({gaps}); "
                f"team {_team_text(team)} covers them together.")
    caps = " + ".join(str(r.capacity(d.skill) or 0.0) for r in team)
    return (f"robots with the skills cannot reach {d.amount} {d.skill} capacity alone; "
            f"team {_team_text(team)} pools {caps} = {pooled_capacity(team, d.skill)} >= {d.amount}.")


def _classify(subtask: SubTask, team: Sequence[RobotSpec], robots: Sequence[RobotSpec]) -> Kind:
    if len(team) == 1:
        return Kind.SINGLE_ROBOT
    if any(covers(r.skill_names, subtask.required_skills) for r in robots):
        return Kind.TEAM_CAPACITY
    return Kind.TEAM_UNION


def _decision(subtask: SubTask, team: Sequence[RobotSpec] | None, robots: Sequence[RobotSpec]) -> CoalitionDecision:
    if team is None:
        return CoalitionDecision(subtask.id, Kind.INFEASIBLE, None, _rationale(Kind.INFEASIBLE, subtask, (), robots))
    kind = _classify(subtask, team, robots)
    return CoalitionDecision(subtask.id, kind, Team(tuple(r.id for r in team)),
                             _rationale(kind, subtask, team, robots))


def solve_subtask(subtask: SubTask, robots: Sequence[RobotSpec],
                  avoid: Collection[int] = frozenset()) -> CoalitionDecision:
    """Smallest feasible team for ``subtask``.

    Among equally small teams, prefer the one sharing the fewest robots with
    ``avoid`` (robots already busy in the same phase), then the
    lexicographically smallest id tuple.
    """
    ordered = sorted(robots, key=lambda r: r.id)
    if not ordered or not _feasible(ordered, subtask):
        return _decision(subtask, None, ordered)
    busy = set(avoid)
    for size in range(1, len(ordered) + 1):
        best = None
        for team in combinations(ordered, size):
            if _feasible(team, subtask):
                overlap = sum(1 for r in team if r.id in busy)
                if best is None or overlap < best[0]:
                    best = (overlap, team)
                if overlap == 0:
                    break
        if best is not None:
            return _decision(subtask, best[1], ordered)
    raise AssertionError("full robot set was feasible but no team found")


def brute_force_solve(subtask: SubTask, robots: Sequence[RobotSpec],
                      avoid: Collection[int] = frozenset()) -> CoalitionDecision:
    """Reference solver: score all 2^N - 1 non-empty teams, keep the best."""
    n = len(robots)
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force is limited to {BRUTE_FORCE_LIMIT} robots, got {n}")
    best = None
    for mask in range(1, 1 << n):
        team = [robots[i] for i in range(n) if mask >> i & 1]
        need_ok = set(subtask.required_skills) <= {s for r in team for s in r.skill_names}
        if not need_ok:
            continue
        if subtask.demand is not None:
            total = sum(r.capacity(subtask.demand.skill) or 0.0 for r in team)
            if total < subtask.demand.amount:
                continue
        ids = tuple(sorted(r.id for r in team))
        key = (len(team), len(set(ids) & set(avoid)), ids)
        if best is None or key < best:
            best = key
    ordered = sorted(robots, key=lambda r: r.id)
    if best is None:
        return _decision(subtask, None, ordered)
    by_id = {r.id: r for r in robots}
    team = [by_id[i] for i in best[2]]
    if len(team) == 1:
        kind = Kind.SINGLE_ROBOT
    elif [r for r in robots if set(subtask.required_skills) <= set(r.skill_names)]:
        kind = Kind.TEAM_CAPACITY
    else:
        kind = Kind.TEAM_UNION
    return CoalitionDecision(subtask.id, kind, Team(best[2]), _rationale(kind, subtask, team, ordered))


def form_policy(decomposition: Decomposition, robots: Sequence[RobotSpec]) -> CoalitionPolicy:
    """One decision per sub-task, in decomposition order.

    Sub-tasks of one temporal phase are solved in id order; robots claimed by
    earlier ones in that phase are passed as ``avoid`` so that equally small
    teams spread over idle robots and the phase can run in parallel.
    """
    decisions: dict[str, CoalitionDecision] = {}
    for phase in decomposition.phases():
        busy: set[int] = set()
        for st in sorted(phase, key=lambda s: natural_key(s.id)):
            d = solve_subtask(st, robots, avoid=busy)
            decisions[st.id] = d
            if d.team is not None:
                busy.update(d.team)
    return CoalitionPolicy(tuple(decisions[st.id] for st in decomposition.subtasks))


def natural_key(text: str) -> tuple:
    return tuple(int(p) if p.isdigit() else p for p in re.split(r"(\d+)", text))


def build_plan(decomposition: Decomposition, teams: Mapping[str, Team]) -> PlanAst:
    """Lay sub-tasks out phase by phase.

    Inside one temporal phase, sub-tasks (in id order) are packed into layers:
    each goes into the first layer after the last one that uses any of its
    robots. A layer of several sub-tasks becomes a ``par`` block, a layer of one
    a bare ``assign``. Layers and phases are concatenated into one ``seq``.
    """
    blocks: list[Node] = []
    for phase in decomposition.phases():
        layers: list[list[SubTask]] = []
        busy_until: dict[int, int] = {}
        for st in sorted(phase, key=lambda s: natural_key(s.id)):
            team = teams[st.id]
            slot = max((busy_until.get(r, -1) for r in team), default=-1) + 1
            if slot == len(layers):
                layers.append([])
            layers[slot].append(st)
            for r in team:
                busy_until[r] = slot
        for layer in layers:
            assigns = [Assign(teams[st.id], st.actions) for st in layer]
            blocks.append(assigns[0] if len(assigns) == 1 else Par(tuple(assigns)))
    return PlanAst(Seq(tuple(blocks)))


def allocate(decomposition: Decomposition, policy: CoalitionPolicy) -> PlanAst:
    bad = policy.infeasible
    if bad:
        raise InfeasiblePlan(bad)
    ids = [d.subtask_id for d in policy.decisions]
    if ids != [st.id for st in decomposition.subtasks]:
        raise ValueError(f"policy covers sub-tasks {ids}, decomposition has "
                         f"{[st.id for st in decomposition.subtasks]}")
    return build_plan(decomposition, {d.subtask_id: d.team for d in policy.decisions})


def random_allocate(decomposition: Decomposition, robots: Sequence[RobotSpec], seed: int) -> PlanAst:
    """Baseline: every sub-task goes to one uniformly drawn robot, skills ignored."""
    if not robots:
        raise ValueError("random allocation needs at least one robot")
    rng = random.Random(seed)
    ids = sorted(r.id for r in robots)
    teams = {st.id: Team((rng.choice(ids),)) for st in decomposition.subtasks}
    return build_plan(decomposition, teams)


def infer_demand(subtask: SubTask, world) -> Demand | None:
    """Capacity demand implied by the world: heaviest object picked up, or largest region patrolled."""
    for action in subtask.actions:
        if action.skill == SkillName.PickupObject:
            masses = [world.mass_of(a.args[0]) or 0.0 for a in subtask.actions
                      if a.skill == SkillName.PickupObject and world.has_entity(a.args[0])]
            amount = max(masses, default=0.0)
            return Demand(SkillName.PickupObject, amount) if amount > 0 else None
        if action.skill == SkillName.Patrol:
            areas = [world.area_of(a.args[0]) or 0.0 for a in subtask.actions
                     if a.skill == SkillName.Patrol and world.has_entity(a.args[0])]
            amount = max(areas, default=0.0)
            return Demand(SkillName.Patrol, amount) if amount > 0 else None
    return None


def with_demands(decomposition: Decomposition, world) -> Decomposition:
    """Fill in missing sub-task demands from object masses and region areas."""
    out = []
    for st in decomposition.subtasks:
        if st.demand is None:
            demand = infer_demand(st, world)
            if demand is not None:
                st = SubTask(st.id, st.actions, st.description, demand, st.temporal_order)
        out.append(st)
    return Decomposition(tuple(out))
