import random

import pytest
from hypothesis import given, strategies as st

from conftest import KITCHEN
from gen import random_action
from mrplan import dsl
from mrplan.dsl import Assign, Par, PlanAst, Seq
from mrplan.executor import ExecutionTrace, InvalidPlanError, apply_action, execute
from mrplan.model import RobotSpec, SkillName, Team, act, robot_token
from mrplan.world import load_floorplan

ALL = [s.value for s in SkillName]


def everything(rid, **caps):
    return RobotSpec.of(rid, *ALL, **caps)


# -- single-action semantics ----------------------------------------------------------

def test_switch_off_desk_lamp(lamps_tv_world):
    r = RobotSpec.of(1, "GoToObject", "SwitchOff")
    assert apply_action(lamps_tv_world, r, act("GoToObject", "DeskLamp"))
    assert apply_action(lamps_tv_world, r, act("SwitchOff", "DeskLamp"))
    assert lamps_tv_world.objects["DeskLamp"].attributes["is_on"] is False
    assert lamps_tv_world.robot_state[1].location == "DeskLamp"


def test_switch_needs_presence(lamps_tv_world):
    out = apply_action(lamps_tv_world, RobotSpec.of(1, "SwitchOff"), act("SwitchOff", "DeskLamp"))
    assert not out and "no team member" in out.reason
    assert lamps_tv_world.objects["DeskLamp"].attributes["is_on"]


def test_couch_exceeds_single_robot_capacity(kitchen):
    r = everything(1, PickupObject=5.0)
    apply_action(kitchen, r, act("GoToObject", "Couch"))
    before = kitchen.digest()
    out = apply_action(kitchen, r, act("PickupObject", "Couch"))
    assert not out and out.reason.startswith("capacity")
    assert kitchen.digest() == before


def test_team_lift_pools_capacity(kitchen):
    team = [everything(i, PickupObject=c) for i, c in ((1, 25.0), (2, 20.0))]
    assert apply_action(kitchen, team, act("GoToObject", "Couch"))
    assert apply_action(kitchen, team, act("PickupObject", "Couch"))
    assert kitchen.holder_of("Couch") == 1
    assert kitchen.objects["Couch"].parent_receptacle == robot_token(1)


def test_patrol_pools_visibility(kitchen):
    team = [everything(i, Patrol=v) for i, v in ((1, 5.0), (2, 5.0), (3, 4.0))]
    apply_action(kitchen, team, act("GoToObject", "RegionA"))
    assert apply_action(kitchen, team, act("Patrol", "RegionA"))
    region = kitchen.regions["RegionA"]
    assert region.patrolled and region.assigned_visibility == 14.0


def test_patrol_failure_leaves_visibility(kitchen):
    team = [everything(1, Patrol=5.0), everything(2, Patrol=5.0)]
    apply_action(kitchen, team, act("GoToObject", "RegionA"))
    out = apply_action(kitchen, team, act("Patrol", "RegionA"))
    assert not out and "visibility" in out.reason
    assert kitchen.regions["RegionA"].assigned_visibility == 0.0
    assert not kitchen.regions["RegionA"].patrolled


def test_missing_skill_fails_without_effects(kitchen):
    before = kitchen.digest()
    out = apply_action(kitchen, RobotSpec.of(1, "GoToObject"), act("SliceObject", "Apple"))
    assert not out and "skill not possessed" in out.reason
    assert kitchen.digest() == before
    assert 1 not in kitchen.robot_state


def test_put_in_switched_on_microwave_heats_contents(kitchen):
    r = everything(1, PickupObject=5.0)
    for a in [act("GoToObject", "Pan"), act("PickupObject", "Pan"), act("GoToObject", "Microwave"),
              act("SwitchOn", "Microwave"), act("PutObject", "Pan", "Microwave")]:
        assert apply_action(kitchen, r, a), a
    assert kitchen.objects["Pan"].attributes["is_heated"]
    assert kitchen.objects["Pan"].parent_receptacle == "Microwave"


def test_effect_reaches_through_nested_receptacles(kitchen):
    kitchen.objects["Egg"].parent_receptacle = "Pan"
    kitchen.objects["Pan"].parent_receptacle = "StoveBurner"
    r = everything(1)
    apply_action(kitchen, r, act("GoToObject", "StoveBurner"))
    assert apply_action(kitchen, r, act("SwitchOn", "StoveBurner"))
    assert kitchen.objects["Egg"].attributes["is_cooked"]
    assert kitchen.objects["Pan"].attributes["is_cooked"]


def test_slice_twice_fails(kitchen):
    r = everything(1)
    apply_action(kitchen, r, act("GoToObject", "Apple"))
    assert apply_action(kitchen, r, act("SliceObject", "Apple"))
    assert not apply_action(kitchen, r, act("SliceObject", "Apple"))


# -- plan execution -------------------------------------------------------------------

LAMPS_TV_PLAN = """
plan {
  seq {
    par {
      assign robot1 {
        GoToObject(DeskLamp);
        SwitchOff(DeskLamp);
      }
      assign robot2 {
        GoToObject(FloorLamp);
        SwitchOff(FloorLamp);
      }
    }
    assign robot3 {
      GoToObject(Television);
      SwitchOn(Television);
    }
  }
}
"""

LAMPS_TV_ROBOTS = [RobotSpec.of(1, "GoToObject", "SwitchOff"),
               RobotSpec.of(2, "GoToObject", "SwitchOff", "SwitchOn"),
               RobotSpec.of(3, "GoToObject", "SwitchOn")]


def test_lamps_off_tv_on(lamps_tv_world):
    trace = execute(dsl.parse(LAMPS_TV_PLAN), lamps_tv_world, LAMPS_TV_ROBOTS)
    objs = trace.final_world.objects
    assert not objs["DeskLamp"].attributes["is_on"]
    assert not objs["FloorLamp"].attributes["is_on"]
    assert objs["Television"].attributes["is_on"]
    assert trace.phase_sequence == [{1, 2}, {3}]
    assert trace.succeeded == trace.total_actions == 6
    assert [s.tick for s in trace.steps] == [0, 0, 1, 1, 2, 3]
    # the input world is never mutated
    assert lamps_tv_world.objects["DeskLamp"].attributes["is_on"]


def test_empty_assign():
    plan = PlanAst(Assign(Team((1,)), ()))
    trace = execute(plan, dsl_world(), [RobotSpec.of(1)])
    assert trace.steps == [] and trace.phase_sequence == [{1}]


def dsl_world():
    return load_floorplan({"objects": [{"id": "Lamp", "type": "Lamp", "togglable": True}]})


def test_par_branches_share_tick_zero():
    plan = PlanAst(Par((Assign(Team((1,)), (act("GoToObject", "Lamp"),)),
                        Assign(Team((2,)), (act("GoToObject", "Lamp"),)))))
    trace = execute(plan, dsl_world(), [RobotSpec.of(1, "GoToObject"), RobotSpec.of(2, "GoToObject")])
    assert [s.tick for s in trace.steps] == [0, 0]
    assert [s.team for s in trace.steps] == [(1,), (2,)]


def test_structural_errors_rejected():
    plan = PlanAst(Par((Assign(Team((1,)), (act("GoToObject", "Lamp"),)),
                        Assign(Team((1,)), (act("GoToObject", "Lamp"),)))))
    with pytest.raises(InvalidPlanError, match="concurrent"):
        execute(plan, dsl_world(), [RobotSpec.of(1, "GoToObject")])
    with pytest.raises(InvalidPlanError, match="robot9"):
        execute(PlanAst(Assign(Team((9,)), ())), dsl_world(), [RobotSpec.of(1)])


def test_skill_errors_fail_at_runtime_unless_strict():
    plan = PlanAst(Seq((Assign(Team((1,)), (act("GoToObject", "Lamp"), act("SwitchOn", "Lamp"))),)))
    robots = [RobotSpec.of(1, "GoToObject")]
    trace = execute(plan, dsl_world(), robots)
    assert [s.outcome.success for s in trace.steps] == [True, False]
    with pytest.raises(InvalidPlanError, match="skill"):
        execute(plan, dsl_world(), robots, strict=True)


def test_trace_jsonl_roundtrip(lamps_tv_world):
    trace = execute(dsl.parse(LAMPS_TV_PLAN), lamps_tv_world, LAMPS_TV_ROBOTS, record_digests=True)
    again = ExecutionTrace.from_jsonl(trace.to_jsonl())
    assert again.steps == trace.steps
    assert again.phase_sequence == trace.phase_sequence
    assert again.final_world.digest() == trace.final_world.digest()
    with pytest.raises(ValueError, match="summary"):
        ExecutionTrace.from_jsonl(trace.to_jsonl().splitlines()[0])


# -- properties -----------------------------------------------------------------------

KITCHEN_IDS = ("CounterTop", "Fridge", "Microwave", "StoveBurner", "Pan", "Apple", "Egg",
               "Couch", "Crate", "Lamp", "RegionA", "RegionB")


def random_kitchen_plan(rng: random.Random, n_robots: int) -> PlanAst:
    blocks = []
    for _ in range(rng.randint(1, 4)):
        members = rng.sample(range(1, n_robots + 1), rng.randint(1, n_robots))
        actions = []
        for _ in range(rng.randint(1, 6)):
            a = random_action(rng)
            actions.append(type(a)(a.skill, tuple(rng.choice(KITCHEN_IDS) for _ in a.args)))
        blocks.append(Assign(Team(tuple(members)), tuple(actions)))
    return PlanAst(Seq(tuple(blocks)))


def kitchen_robots(rng: random.Random, n: int):
    return [everything(i + 1, PickupObject=float(rng.randint(0, 30)), Patrol=float(rng.randint(0, 12)))
            for i in range(n)]


@given(st.integers(0, 2**32 - 1))
def test_execution_is_deterministic(kitchen_seed):
    rng = random.Random(kitchen_seed)
    robots = kitchen_robots(rng, 3)
    plan = random_kitchen_plan(rng, 3)
    t1 = execute(plan, load_floorplan(KITCHEN), robots, record_digests=True)
    t2 = execute(plan, load_floorplan(KITCHEN), robots, record_digests=True)
    assert t1.to_jsonl() == t2.to_jsonl()


@given(st.integers(0, 2**32 - 1))
def test_frame_irreversibility_and_conservation(kitchen_seed):
    rng = random.Random(kitchen_seed)
    robots = kitchen_robots(rng, 3)
    plan = random_kitchen_plan(rng, 3)
    world = load_floorplan(KITCHEN)
    trace = execute(plan, world, robots, record_digests=True)
    for s in trace.steps:
        if not s.outcome.success:
            assert s.digest_before == s.digest_after, s
    final = trace.final_world
    assert set(final.objects) == set(world.objects)
    for oid, obj in final.objects.items():
        for attr in ("is_sliced", "is_broken"):
            if world.objects[oid].attributes[attr]:
                assert obj.attributes[attr]
        holder = final.holder_of(oid)
        if holder is not None:
            assert obj.parent_receptacle == robot_token(holder)
    held = [st.holding for st in final.robot_state.values() if st.holding]
    assert len(held) == len(set(held))
