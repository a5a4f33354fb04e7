"""Problem vocabulary: skills, robots, sub-tasks, teams and goal conditions.

All types are frozen dataclasses with ``to_dict``/``from_dict`` helpers that
match the on-disk dataset schema. The free functions at the bottom
(`skills_required`, `covers`, `capacity_feasible`) are the predicates every
other module builds on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Sequence


class SkillName(str, Enum):
    GoToObject = "GoToObject"
    GoToLocation = "GoToLocation"
    PickupObject = "PickupObject"
    PutObject = "PutObject"
    SwitchOn = "SwitchOn"
    SwitchOff = "SwitchOff"
    OpenObject = "OpenObject"
    CloseObject = "CloseObject"
    SliceObject = "SliceObject"
    CleanObject = "CleanObject"
    BreakObject = "BreakObject"
    ThrowObject = "ThrowObject"
    Patrol = "Patrol"

    @classmethod
    def parse(cls, name: str) -> "SkillName":
        try:
            return cls(name)
        except ValueError:
            raise UnknownSkillError(name) from None

    def __str__(self) -> str:
        return self.value


class UnknownSkillError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown skill `{name}`")
        self.name = name


# Skills whose SkillSpec may carry a numeric capacity, with the unit used in prompts.
CAPACITY_UNITS: dict[SkillName, str] = {
    SkillName.PickupObject: "kg",
    SkillName.Patrol: "m^2",
}

ARITY: dict[SkillName, int] = {s: 1 for s in SkillName}
ARITY[SkillName.PutObject] = 2

_SKILL_ORDER = {s: i for i, s in enumerate(SkillName)}


def skill_sort_key(skill: SkillName) -> int:
    return _SKILL_ORDER[skill]


def sorted_skills(skills: Iterable[SkillName]) -> list[SkillName]:
    return sorted(skills, key=skill_sort_key)


ROBOT_TOKEN = re.compile(r"^robot([1-9][0-9]*)$")


def robot_token(robot_id: int) -> str:
    return f"robot{robot_id}"


def parse_robot_token(text: str) -> int | None:
    m = ROBOT_TOKEN.match(text)
    return int(m.group(1)) if m else None


@dataclass(frozen=True)
class SkillSpec:
    name: SkillName
    capacity: float | None = None

    def __post_init__(self):
        if not isinstance(self.name, SkillName):
            object.__setattr__(self, "name", SkillName.parse(self.name))
        if self.capacity is not None:
            if self.name not in CAPACITY_UNITS:
                raise ValueError(f"skill {self.name} cannot carry a capacity")
            if self.capacity < 0:
                raise ValueError(f"capacity of {self.name} must be >= 0, got {self.capacity}")
            object.__setattr__(self, "capacity", float(self.capacity))

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"name": self.name.value}
        if self.capacity is not None:
            d["capacity"] = self.capacity
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SkillSpec":
        return cls(SkillName.parse(d["name"]), d.get("capacity"))


@dataclass(frozen=True)
class RobotSpec:
    id: int
    skills: tuple[SkillSpec, ...]

    def __post_init__(self):
        if not isinstance(self.id, int) or self.id < 1:
            raise ValueError(f"robot id must be a positive integer, got {self.id!r}")
        specs = tuple(sorted(self.skills, key=lambda s: skill_sort_key(s.name)))
        names = [s.name for s in specs]
        if len(set(names)) != len(names):
            raise ValueError(f"robot{self.id} declares a skill twice")
        object.__setattr__(self, "skills", specs)

    @classmethod
    def of(cls, robot_id: int, *skills: SkillName | str, **capacities: float) -> "RobotSpec":
        """Shorthand: ``RobotSpec.of(1, "GoToObject", "PickupObject", PickupObject=5.0)``."""
        specs = []
        for s in skills:
            name = s if isinstance(s, SkillName) else SkillName.parse(s)
            specs.append(SkillSpec(name, capacities.get(name.value)))
        return cls(robot_id, tuple(specs))

    @property
    def skill_names(self) -> frozenset[SkillName]:
        return frozenset(s.name for s in self.skills)

    def capacity(self, skill: SkillName) -> float | None:
        for s in self.skills:
            if s.name == skill:
                return s.capacity
        return None

    @property
    def token(self) -> str:
        return robot_token(self.id)

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "skills": [s.to_dict() for s in self.skills]}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RobotSpec":
        return cls(int(d["id"]), tuple(SkillSpec.from_dict(s) for s in d["skills"]))


@dataclass(frozen=True)
class ActionCall:
    skill: SkillName
    args: tuple[str, ...] = ()

    def __post_init__(self):
        if not isinstance(self.skill, SkillName):
            object.__setattr__(self, "skill", SkillName.parse(self.skill))
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != ARITY[self.skill]:
            raise ValueError(
                f"{self.skill} takes {ARITY[self.skill]} argument(s), got {len(self.args)}"
            )

    def __str__(self) -> str:
        return f"{self.skill.value}({', '.join(self.args)})"

    def to_dict(self) -> dict[str, Any]:
        return {"skill": self.skill.value, "args": list(self.args)}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ActionCall":
        return cls(SkillName.parse(d["skill"]), tuple(d.get("args", ())))


def act(skill: str, *args: str) -> ActionCall:
    return ActionCall(SkillName.parse(skill), args)


@dataclass(frozen=True)
class Demand:
    skill: SkillName
    amount: float

    def __post_init__(self):
        if not isinstance(self.skill, SkillName):
            object.__setattr__(self, "skill", SkillName.parse(self.skill))
        if self.amount < 0:
            raise ValueError("demand amount must be >= 0")
        object.__setattr__(self, "amount", float(self.amount))

    def to_dict(self) -> dict[str, Any]:
        return {"skill": self.skill.value, "amount": self.amount}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Demand":
        return cls(SkillName.parse(d["skill"]), d["amount"])


@dataclass(frozen=True)
class SubTask:
    """One decomposed unit of work.

    ``required_skills`` is derived from ``actions``; passing a value that
    disagrees with the action list raises.
    """

    id: str
    actions: tuple[ActionCall, ...]
    description: str = ""
    demand: Demand | None = None
    temporal_order: int = 0
    required_skills: frozenset[SkillName] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        if not self.actions:
            raise ValueError(f"sub-task {self.id!r} has no actions")
        derived = skills_required(self.actions)
        if self.required_skills is None:
            object.__setattr__(self, "required_skills", derived)
        else:
            given = frozenset(SkillName.parse(s) if isinstance(s, str) else s
                              for s in self.required_skills)
            if given != derived:
                raise ValueError(
                    f"sub-task {self.id!r}: required_skills {sorted(given)} "
                    f"disagree with actions {sorted(derived)}"
                )
            object.__setattr__(self, "required_skills", given)
        if self.temporal_order < 0:
            raise ValueError("temporal_order must be >= 0")
        if self.demand is not None and self.demand.skill not in self.required_skills:
            raise ValueError(f"sub-task {self.id!r}: demand skill {self.demand.skill} not required")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "description": self.description,
            "actions": [a.to_dict() for a in self.actions],
            "required_skills": [s.value for s in sorted_skills(self.required_skills)],
            "demand": self.demand.to_dict() if self.demand else None,
            "temporal_order": self.temporal_order,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SubTask":
        req = d.get("required_skills")
        return cls(
            id=str(d["id"]),
            actions=tuple(ActionCall.from_dict(a) for a in d["actions"]),
            description=d.get("description", ""),
            demand=Demand.from_dict(d["demand"]) if d.get("demand") else None,
            temporal_order=int(d.get("temporal_order", 0)),
            required_skills=frozenset(SkillName.parse(s) for s in req) if req is not None else None,
        )


@dataclass(frozen=True)
class Decomposition:
    subtasks: tuple[SubTask, ...]

    def __post_init__(self):
        object.__setattr__(self, "subtasks", tuple(self.subtasks))
        ids = [s.id for s in self.subtasks]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate sub-task ids in decomposition")
        orders = sorted({s.temporal_order for s in self.subtasks})
        if orders != list(range(len(orders))):
            raise ValueError(f"temporal orders must be contiguous from 0, got {orders}")

    def __len__(self) -> int:
        return len(self.subtasks)

    def __iter__(self):
        return iter(self.subtasks)

    def phases(self) -> list[list[SubTask]]:
        """Sub-tasks grouped by temporal order, ascending."""
        n = 1 + max((s.temporal_order for s in self.subtasks), default=-1)
        out: list[list[SubTask]] = [[] for _ in range(n)]
        for s in self.subtasks:
            out[s.temporal_order].append(s)
        return out

    def get(self, subtask_id: str) -> SubTask:
        for s in self.subtasks:
            if s.id == subtask_id:
                return s
        raise KeyError(subtask_id)

    def to_dict(self) -> dict[str, Any]:
        return {"subtasks": [s.to_dict() for s in self.subtasks]}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Decomposition":
        return cls(tuple(SubTask.from_dict(s) for s in d["subtasks"]))


@dataclass(frozen=True)
class Team:
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("a team needs at least one robot")
        if len(set(members)) != len(members):
            raise ValueError(f"duplicate robot in team {members}")
        object.__setattr__(self, "members", members)

    @property
    def lead(self) -> int:
        return min(self.members)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __str__(self) -> str:
        return ", ".join(robot_token(r) for r in self.members)


GOAL_ATTRIBUTES = frozenset({
    "is_on", "is_open", "is_sliced", "is_heated", "is_cooked",
    "is_washed", "is_broken", "parent_receptacle", "patrolled",
})


@dataclass(frozen=True)
class GoalCondition:
    object_id: str
    attribute: str
    expected: bool | str | None

    def __post_init__(self):
        if self.attribute not in GOAL_ATTRIBUTES:
            raise ValueError(f"unknown goal attribute {self.attribute!r}")

    def __str__(self) -> str:
        return f"{self.object_id}.{self.attribute} == {self.expected!r}"

    def to_dict(self) -> dict[str, Any]:
        return {"object_id": self.object_id, "attribute": self.attribute, "expected": self.expected}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GoalCondition":
        return cls(d["object_id"], d["attribute"], d["expected"])


def skills_required(actions: Sequence[ActionCall]) -> frozenset[SkillName]:
    return frozenset(a.skill for a in actions)


def covers(team_skills: Iterable[SkillName], required: Iterable[SkillName]) -> bool:
    return set(required) <= set(team_skills)


def team_skills(team: Iterable[RobotSpec]) -> frozenset[SkillName]:
    out: set[SkillName] = set()
    for r in team:
        out |= r.skill_names
    return frozenset(out)


def pooled_capacity(team: Iterable[RobotSpec], skill: SkillName) -> float:
    total = 0.0
    for r in team:
        cap = r.capacity(skill)
        if cap is not None:
            total += cap
    return total


def capacity_feasible(team: Iterable[RobotSpec], skill: SkillName, amount: float) -> bool:
    if amount < 0:
        raise ValueError("amount must be >= 0")
    return pooled_capacity(team, skill) >= amount
