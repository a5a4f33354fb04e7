"""Deterministic interpreter for plans against a symbolic world.

Every action costs one tick. Branches of a ``par`` block advance in lockstep,
one action per branch per tick, in source order. A failed precondition is
recorded and leaves the world untouched; execution carries on with the next
action so executability can be measured over the whole plan.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import zip_longest
from pathlib import Path
from typing import Any, Iterable, Sequence

from mrplan import dsl
from mrplan.dsl import Assign, Node, Par, PlanAst, Seq
from mrplan.model import (
    ActionCall,
    RobotSpec,
    SkillName,
    Team,
    capacity_feasible,
    pooled_capacity,
    robot_token,
    team_skills,
)
from mrplan.world import WorldState, load_floorplan


@dataclass(frozen=True)
class Outcome:
    success: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.success


OK = Outcome(True)


def _fail(reason: str) -> Outcome:
    return Outcome(False, reason)


class InvalidPlanError(ValueError):
    def __init__(self, issues: Sequence[dsl.ValidationIssue]):
        self.issues = list(issues)
        super().__init__("plan rejected: " + "; ".join(str(i) for i in self.issues))


def apply_action(world: WorldState, team: RobotSpec | Sequence[RobotSpec], action: ActionCall) -> Outcome:
    """Apply one action for a robot or team, mutating ``world`` only on success."""
    members = [team] if isinstance(team, RobotSpec) else sorted(team, key=lambda r: r.id)
    if not members:
        return _fail("empty team")
    if action.skill not in team_skills(members):
        return _fail(f"skill not possessed: {action.skill}")
    for arg in action.args:
        if not world.has_entity(arg):
            return _fail(f"unknown entity {arg!r}")
    # robots enter the world on their first action; undo that if the action fails
    fresh = [r.id for r in members if r.id not in world.robot_state]
    world.place_robots(fresh)
    outcome = _HANDLERS[action.skill](world, members, *action.args)
    if not outcome.success:
        for rid in fresh:
            del world.robot_state[rid]
    return outcome


def _states(world, members):
    return [world.robot_state[r.id] for r in members]


def _someone_at(world, members, x) -> bool:
    return any(st.location == x for st in _states(world, members))


def _object(world, x):
    return world.objects.get(x)


def _goto(world, members, x):
    for st in _states(world, members):
        st.location = x
    return OK


def _pickup(world, members, x):
    obj = _object(world, x)
    if obj is None:
        return _fail(f"{x} is not an object")
    if not all(st.location == x for st in _states(world, members)):
        return _fail(f"not every team member is at {x}")
    if world.holder_of(x) is not None:
        return _fail(f"{x} is already held")
    if any(st.holding is not None for st in _states(world, members)):
        return _fail("a team member is already holding something")
    mass = obj.mass or 0.0
    if not capacity_feasible(members, SkillName.PickupObject, mass):
        return _fail(
            f"capacity: {x} weighs {mass} kg, team lifts "
            f"{pooled_capacity(members, SkillName.PickupObject)} kg"
        )
    lead = members[0]
    world.robot_state[lead.id].holding = x
    obj.parent_receptacle = robot_token(lead.id)
    return OK


def _holding_member(world, members, x):
    for r in members:
        if world.robot_state[r.id].holding == x:
            return r
    return None


def _apply_receptacle_effects(world: WorldState, object_ids: Iterable[str], receptacle_id: str) -> None:
    chain = [receptacle_id, *world.ancestors(receptacle_id)]
    for effect in world.receptacle_effects:
        if any(world.objects[c].type == effect.type and world.objects[c].attributes["is_on"] for c in chain):
            for oid in object_ids:
                world.objects[oid].attributes[effect.attribute] = True


def _put(world, members, x, r):
    holder = _holding_member(world, members, x)
    if holder is None:
        return _fail(f"{x} is not held by the team")
    if world.robot_state[holder.id].location != r:
        return _fail(f"{robot_token(holder.id)} is not at {r}")
    target = _object(world, r)
    if target is None or not target.is_receptacle:
        return _fail(f"{r} is not a receptacle")
    world.objects[x].parent_receptacle = r
    world.robot_state[holder.id].holding = None
    _apply_receptacle_effects(world, [x, *world.contents(x)], r)
    return OK


def _switch(on: bool):
    def handler(world, members, x):
        obj = _object(world, x)
        if obj is None or not obj.togglable:
            return _fail(f"{x} cannot be switched")
        if not _someone_at(world, members, x):
            return _fail(f"no team member is at {x}")
        obj.attributes["is_on"] = on
        if on:
            _apply_receptacle_effects(world, world.contents(x), x)
        return OK
    return handler


def _openclose(opened: bool):
    def handler(world, members, x):
        obj = _object(world, x)
        if obj is None or not obj.openable:
            return _fail(f"{x} cannot be opened or closed")
        if not _someone_at(world, members, x):
            return _fail(f"no team member is at {x}")
        obj.attributes["is_open"] = opened
        return OK
    return handler


def _slice(world, members, x):
    obj = _object(world, x)
    if obj is None or not obj.sliceable:
        return _fail(f"{x} is not sliceable")
    if not _someone_at(world, members, x):
        return _fail(f"no team member is at {x}")
    if obj.attributes["is_sliced"]:
        return _fail(f"{x} is already sliced")
    obj.attributes["is_sliced"] = True
    return OK


def _clean(world, members, x):
    obj = _object(world, x)
    if obj is None:
        return _fail(f"{x} is not an object")
    if not _someone_at(world, members, x):
        return _fail(f"no team member is at {x}")
    obj.attributes["is_washed"] = True
    return OK


def _break(world, members, x):
    obj = _object(world, x)
    if obj is None or not obj.breakable:
        return _fail(f"{x} is not breakable")
    if not _someone_at(world, members, x):
        return _fail(f"no team member is at {x}")
    obj.attributes["is_broken"] = True
    return OK


def _throw(world, members, x):
    holder = _holding_member(world, members, x)
    if holder is None:
        return _fail(f"{x} is not held by the team")
    st = world.robot_state[holder.id]
    here = world.objects.get(st.location)
    world.objects[x].parent_receptacle = here.id if here is not None and here.is_receptacle else None
    st.holding = None
    return OK


def _patrol(world, members, region_id):
    region = world.regions.get(region_id)
    if region is None:
        return _fail(f"{region_id} is not a region")
    if not all(st.location == region_id for st in _states(world, members)):
        return _fail(f"not every team member is at {region_id}")
    total = region.assigned_visibility + pooled_capacity(members, SkillName.Patrol)
    if total < region.area:
        return _fail(f"insufficient visibility: {total} m^2 of {region.area} m^2 covered")
    region.assigned_visibility = total
    region.patrolled = True
    return OK


_HANDLERS = {
    SkillName.GoToObject: _goto,
    SkillName.GoToLocation: _goto,
    SkillName.PickupObject: _pickup,
    SkillName.PutObject: _put,
    SkillName.SwitchOn: _switch(True),
    SkillName.SwitchOff: _switch(False),
    SkillName.OpenObject: _openclose(True),
    SkillName.CloseObject: _openclose(False),
    SkillName.SliceObject: _slice,
    SkillName.CleanObject: _clean,
    SkillName.BreakObject: _break,
    SkillName.ThrowObject: _throw,
    SkillName.Patrol: _patrol,
}


# -- plan execution -----------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    tick: int
    phase: int
    team: tuple[int, ...]
    action: ActionCall
    outcome: Outcome
    digest_before: str | None = None
    digest_after: str | None = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "tick": self.tick,
            "phase": self.phase,
            "team": list(self.team),
            "action": self.action.to_dict(),
            "outcome": "success" if self.outcome.success else "precondition-failure",
        }
        if not self.outcome.success:
            d["reason"] = self.outcome.reason
        if self.digest_before is not None:
            d["digest_before"] = self.digest_before
            d["digest_after"] = self.digest_after
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Step":
        ok = d["outcome"] == "success"
        return cls(d["tick"], d["phase"], tuple(d["team"]), ActionCall.from_dict(d["action"]),
                   Outcome(ok, d.get("reason", "")), d.get("digest_before"), d.get("digest_after"))


@dataclass
class ExecutionTrace:
    steps: list[Step]
    phase_sequence: list[frozenset[int]]
    final_world: WorldState
    total_actions: int

    @property
    def succeeded(self) -> int:
        return sum(1 for s in self.steps if s.outcome.success)

    @property
    def failures(self) -> list[Step]:
        return [s for s in self.steps if not s.outcome.success]

    def summary(self) -> dict[str, Any]:
        return {
            "summary": True,
            "total_actions": self.total_actions,
            "attempted": len(self.steps),
            "succeeded": self.succeeded,
            "phase_sequence": [sorted(p) for p in self.phase_sequence],
            "final_world": self.final_world.to_dict(),
        }

    def to_jsonl(self) -> str:
        lines = [json.dumps(s.to_dict(), sort_keys=True) for s in self.steps]
        lines.append(json.dumps(self.summary(), sort_keys=True))
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl())

    @classmethod
    def from_jsonl(cls, text: str) -> "ExecutionTrace":
        steps, summary = [], None
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec.get("summary"):
                summary = rec
            else:
                steps.append(Step.from_dict(rec))
        if summary is None:
            raise ValueError("trace has no summary record")
        return cls(
            steps=steps,
            phase_sequence=[frozenset(p) for p in summary["phase_sequence"]],
            final_world=load_floorplan(summary["final_world"]),
            total_actions=summary["total_actions"],
        )

    @classmethod
    def read(cls, path: str | Path) -> "ExecutionTrace":
        return cls.from_jsonl(Path(path).read_text())


Tick = list[tuple[Team, ActionCall]]


def _ticks(node: Node) -> list[Tick]:
    if isinstance(node, Assign):
        return [[(node.team, a)] for a in node.actions]
    if isinstance(node, Seq):
        out: list[Tick] = []
        for child in node.children:
            out.extend(_ticks(child))
        return out
    branches = [_ticks(child) for child in node.children]
    return [[move for tick in column if tick for move in tick]
            for column in zip_longest(*branches, fillvalue=None)]


def _phase_units(node: Node) -> list[Node]:
    if isinstance(node, Assign):
        return [node]
    if isinstance(node, Par):
        return [node] if dsl.node_robots(node) else []
    units: list[Node] = []
    for child in node.children:
        units.extend(_phase_units(child))
    return units


def execute(plan: PlanAst, world: WorldState, robots: Sequence[RobotSpec], *,
            strict: bool = False, record_digests: bool = False) -> ExecutionTrace:
    """Run ``plan`` on a private copy of ``world``.

    Plans with structural errors (unknown robots or entities, a robot in two
    concurrent branches) are rejected. Skill and capacity errors are rejected
    only when ``strict``; otherwise those actions fail at runtime and show up
    in the trace.
    """
    issues = dsl.errors(dsl.validate(plan, robots, world))
    blocking = issues if strict else [i for i in issues if i.code in dsl.STRUCTURAL_CODES]
    if blocking:
        raise InvalidPlanError(blocking)

    by_id = {r.id: r for r in robots}
    state = world.copy()
    state.place_robots(sorted(by_id))
    steps: list[Step] = []
    phase_sequence: list[frozenset[int]] = []
    tick = 0
    for phase_index, unit in enumerate(_phase_units(plan.root)):
        phase_sequence.append(dsl.node_robots(unit))
        for moves in _ticks(unit):
            for team, action in moves:
                before = state.digest() if record_digests else None
                outcome = apply_action(state, [by_id[r] for r in team], action)
                after = state.digest() if record_digests else None
                steps.append(Step(tick, phase_index, team.members, action, outcome, before, after))
            tick += 1
    return ExecutionTrace(steps, phase_sequence, state, plan.action_count())
