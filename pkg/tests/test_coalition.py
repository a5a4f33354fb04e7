import random
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from gen import coalition_instances, random_coalition_instance
from mrplan import dsl
from mrplan.coalition import (
    CoalitionDecision,
    CoalitionPolicy,
    InfeasiblePlan,
    Kind,
    PolicySchemaError,
    allocate,
    brute_force_solve,
    build_plan,
    form_policy,
    random_allocate,
    solve_subtask,
    with_demands,
)
from mrplan.dsl import Assign, Par, Seq
from mrplan.model import Decomposition, Demand, RobotSpec, SkillName, SubTask, Team, act, covers, team_skills
from mrplan.world import load_floorplan


def sub(sid, *actions, demand=None, phase=0):
    return SubTask(sid, tuple(actions), demand=demand, temporal_order=phase)


LAMP = sub("s1", act("GoToObject", "Lamp"), act("SwitchOff", "Lamp"))
SLICE = sub("s2", act("GoToObject", "Knife"), act("PickupObject", "Knife"),
            act("GoToObject", "Apple"), act("SliceObject", "Apple"))
COUCH = sub("s3", act("GoToObject", "Couch"), act("PickupObject", "Couch"),
            demand=Demand(SkillName.PickupObject, 40.0))


def test_single_robot():
    robots = [RobotSpec.of(1, "GoToObject"), RobotSpec.of(2, "GoToObject", "SwitchOff"),
              RobotSpec.of(3, "GoToObject", "SwitchOff")]
    d = solve_subtask(LAMP, robots)
    assert d.kind == Kind.SINGLE_ROBOT and d.team == Team((2,))
    assert "robot2" in d.rationale


def test_team_union_when_skills_are_split():
    robots = [RobotSpec.of(1, "GoToObject", "PickupObject", PickupObject=5.0),
              RobotSpec.of(2, "GoToObject", "SliceObject")]
    d = solve_subtask(SLICE, robots)
    assert d.kind == Kind.TEAM_UNION and d.team == Team((1, 2))
    assert "robot1 lacks SliceObject" in d.rationale


def test_team_capacity_for_heavy_object():
    robots = [RobotSpec.of(i, "GoToObject", "PickupObject", PickupObject=c)
              for i, c in ((1, 15.0), (2, 30.0), (3, 25.0))]
    d = solve_subtask(COUCH, robots)
    assert d.kind == Kind.TEAM_CAPACITY and d.team == Team((1, 2))
    assert "40.0" in d.rationale


def test_infeasible_missing_skill_and_capacity():
    d = solve_subtask(LAMP, [RobotSpec.of(1, "GoToObject")])
    assert d.kind == Kind.INFEASIBLE and d.team is None and "SwitchOff" in d.rationale
    weak = [RobotSpec.of(i, "GoToObject", "PickupObject", PickupObject=5.0) for i in (1, 2)]
    d = solve_subtask(COUCH, weak)
    assert d.kind == Kind.INFEASIBLE and "10.0" in d.rationale
    assert solve_subtask(LAMP, []).kind == Kind.INFEASIBLE


def test_avoid_breaks_ties_before_ids():
    robots = [RobotSpec.of(i, "GoToObject", "SwitchOff") for i in (1, 2, 3)]
    assert solve_subtask(LAMP, robots, avoid={1}).team == Team((2,))
    assert solve_subtask(LAMP, robots, avoid={1, 2, 3}).team == Team((1,))
    # avoid never trades away minimality
    only = [RobotSpec.of(1, "GoToObject", "SwitchOff"), RobotSpec.of(2, "GoToObject"), RobotSpec.of(3, "SwitchOff")]
    assert solve_subtask(LAMP, only, avoid={1}).team == Team((1,))


def test_decision_invariants():
    with pytest.raises(ValueError):
        CoalitionDecision("s", Kind.INFEASIBLE, Team((1,)))
    with pytest.raises(ValueError):
        CoalitionDecision("s", Kind.SINGLE_ROBOT, Team((1, 2)))
    with pytest.raises(PolicySchemaError):
        CoalitionPolicy.from_dict({"decisions": [{"subtask_id": "s", "kind": "sideways", "team": [1]}]})
    with pytest.raises(PolicySchemaError):
        CoalitionPolicy.from_dict({"policy": []})


def test_policy_dict_roundtrip():
    robots = [RobotSpec.of(1, "GoToObject", "SwitchOff")]
    policy = form_policy(Decomposition((LAMP, sub("s2", act("SliceObject", "Apple")))), robots)
    again = CoalitionPolicy.from_dict(policy.to_dict())
    assert again == policy
    assert [d.kind for d in again.decisions] == [Kind.SINGLE_ROBOT, Kind.INFEASIBLE]


# -- oracle equivalence ---------------------------------------------------------------

@given(coalition_instances(), st.frozensets(st.integers(1, 4), max_size=3))
def test_matches_brute_force(instance, avoid):
    subtask, robots = instance
    assert solve_subtask(subtask, robots, avoid).same_assignment(brute_force_solve(subtask, robots, avoid))


@given(coalition_instances())
def test_minimal_and_sound(instance):
    subtask, robots = instance
    d = solve_subtask(subtask, robots)
    if d.team is None:
        return
    team = [r for r in robots if r.id in d.team]
    assert covers(team_skills(team), subtask.required_skills)
    if subtask.demand:
        assert sum(r.capacity(subtask.demand.skill) or 0.0 for r in team) >= subtask.demand.amount
    for smaller in combinations(robots, len(team) - 1):
        ok = covers(team_skills(smaller), subtask.required_skills) and (
            subtask.demand is None
            or sum(r.capacity(subtask.demand.skill) or 0.0 for r in smaller) >= subtask.demand.amount)
        assert not (smaller and ok)


def test_seeded_instances_are_reproducible():
    a = [random_coalition_instance(random.Random(5)) for _ in range(3)]
    b = [random_coalition_instance(random.Random(5)) for _ in range(3)]
    assert a == b


# -- allocation -----------------------------------------------------------------------

FOUR_LAMPS = Decomposition(tuple(
    sub(f"s{i}", act("GoToObject", f"L{i}"), act("SwitchOff", f"L{i}")) for i in range(1, 5)
))


def test_allocate_spreads_a_phase_over_idle_robots():
    robots = [RobotSpec.of(i, "GoToObject", "SwitchOff") for i in (1, 2)]
    policy = form_policy(FOUR_LAMPS, robots)
    # once every robot is busy, ties fall back to id order
    assert [d.team.members for d in policy.decisions] == [(1,), (2,), (1,), (1,)]
    plan = allocate(FOUR_LAMPS, policy)
    assert isinstance(plan.root, Seq) and isinstance(plan.root.children[0], Par)
    assert dsl.phases(plan) == [{1, 2}, {1}, {1}]


def test_allocate_orders_phases():
    d = Decomposition((sub("a", act("GoToObject", "X")), sub("b", act("GoToObject", "Y"), phase=1)))
    plan = allocate(d, form_policy(d, [RobotSpec.of(1, "GoToObject")]))
    assert plan.root == Seq((Assign(Team((1,)), (act("GoToObject", "X"),)),
                             Assign(Team((1,)), (act("GoToObject", "Y"),))))


def test_allocate_refuses_infeasible_policy():
    with pytest.raises(InfeasiblePlan, match="s1"):
        allocate(Decomposition((LAMP,)), form_policy(Decomposition((LAMP,)), [RobotSpec.of(1)]))


def test_build_plan_natural_id_order():
    d = Decomposition(tuple(sub(f"s{i}", act("GoToObject", f"L{i}")) for i in (10, 2, 1)))
    plan = build_plan(d, {"s1": Team((1,)), "s2": Team((2,)), "s10": Team((3,))})
    assert [a.team.members for a in plan.root.children[0].children] == [(1,), (2,), (3,)]


def test_random_allocate_is_seeded():
    robots = [RobotSpec.of(i) for i in (1, 2, 3)]
    assert random_allocate(FOUR_LAMPS, robots, 7) == random_allocate(FOUR_LAMPS, robots, 7)
    plans = {dsl.serialize(random_allocate(FOUR_LAMPS, robots, s)) for s in range(20)}
    assert len(plans) > 1
    with pytest.raises(ValueError):
        random_allocate(FOUR_LAMPS, [], 0)


def test_demands_inferred_from_world():
    world = load_floorplan({"objects": [{"id": "Couch", "type": "Sofa", "mass": 40.0}],
                            "regions": [{"id": "RegionA", "area": 12.0}]})
    d = Decomposition((sub("c", *COUCH.actions), sub("p", act("Patrol", "RegionA")), LAMP))
    filled = with_demands(d, world)
    assert filled.subtasks[0].demand == Demand(SkillName.PickupObject, 40.0)
    assert filled.subtasks[1].demand == Demand(SkillName.Patrol, 12.0)
    assert filled.subtasks[2].demand is None


def test_patrol_two_regions():
    robots = [RobotSpec.of(i, "GoToObject", "Patrol", Patrol=v) for i, v in ((1, 5.0), (2, 5.0), (3, 4.0), (4, 8.0))]
    world = load_floorplan({"objects": [], "regions": [{"id": "RegionA", "area": 12.0},
                                                       {"id": "RegionB", "area": 8.0}]})
    d = with_demands(Decomposition((sub("a", act("GoToObject", "RegionA"), act("Patrol", "RegionA")),
                                    sub("b", act("GoToObject", "RegionB"), act("Patrol", "RegionB")))), world)
    policy = form_policy(d, robots)
    a, b = policy.decisions
    assert a.kind == Kind.TEAM_CAPACITY and a.team == Team((1, 4))
    assert b.kind == Kind.SINGLE_ROBOT and b.team == Team((4,))
