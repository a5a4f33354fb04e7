import pytest
from hypothesis import given, strategies as st

from gen import action_calls
from mrplan.model import (
    ActionCall,
    Decomposition,
    Demand,
    GoalCondition,
    RobotSpec,
    SkillName,
    SkillSpec,
    SubTask,
    Team,
    UnknownSkillError,
    act,
    capacity_feasible,
    covers,
    parse_robot_token,
    skills_required,
)

S = SkillName


def test_skill_parse_rejects_unknown():
    assert SkillName.parse("Patrol") is S.Patrol
    with pytest.raises(UnknownSkillError, match="Fly"):
        SkillName.parse("Fly")


def test_skills_required_examples():
    assert skills_required([act("GoToObject", "Lamp"), act("SwitchOff", "Lamp")]) == {S.GoToObject, S.SwitchOff}
    actions = [act("GoToObject", "Knife"), act("PickupObject", "Knife"),
               act("GoToObject", "Apple"), act("SliceObject", "Apple")]
    assert skills_required(actions) == {S.GoToObject, S.PickupObject, S.SliceObject}
    assert skills_required([act("Patrol", "RegionA")]) == {S.Patrol}


def test_covers_examples():
    assert covers({S.GoToObject, S.SwitchOn, S.SwitchOff}, {S.GoToObject, S.SwitchOn})
    assert not covers({S.GoToObject}, {S.GoToObject, S.SliceObject})
    assert covers(set(), set())


def _pickers(*caps):
    return [RobotSpec.of(i + 1, "PickupObject", PickupObject=c) for i, c in enumerate(caps)]


def test_capacity_feasible_examples():
    assert capacity_feasible(_pickers(5.0), S.PickupObject, 2.0)
    assert capacity_feasible(_pickers(3.0, 3.0), S.PickupObject, 5.0)
    assert not capacity_feasible(_pickers(3.0), S.PickupObject, 5.0)


def test_capacity_ignores_members_without_skill_or_capacity():
    team = [RobotSpec.of(1, "PickupObject", PickupObject=3.0),
            RobotSpec.of(2, "GoToObject"),
            RobotSpec.of(3, "PickupObject")]
    assert capacity_feasible(team, S.PickupObject, 3.0)
    assert not capacity_feasible(team, S.PickupObject, 3.5)


def test_skillspec_capacity_rules():
    with pytest.raises(ValueError):
        SkillSpec(S.SwitchOn, 1.0)
    with pytest.raises(ValueError):
        SkillSpec(S.PickupObject, -1.0)
    assert SkillSpec(S.Patrol, 4).capacity == 4.0


def test_robot_rejects_duplicate_skill_and_bad_id():
    with pytest.raises(ValueError):
        RobotSpec(1, (SkillSpec(S.GoToObject), SkillSpec(S.GoToObject)))
    with pytest.raises(ValueError):
        RobotSpec(0, ())


def test_action_arity_checked():
    with pytest.raises(ValueError):
        ActionCall(S.PutObject, ("Apple",))
    assert str(act("PutObject", "Apple", "Fridge")) == "PutObject(Apple, Fridge)"


def test_subtask_derives_and_checks_required_skills():
    st_ = SubTask("s1", (act("GoToObject", "Lamp"), act("SwitchOff", "Lamp")))
    assert st_.required_skills == {S.GoToObject, S.SwitchOff}
    with pytest.raises(ValueError):
        SubTask("s1", (act("GoToObject", "Lamp"),), required_skills=frozenset({S.Patrol}))
    with pytest.raises(ValueError):
        SubTask("s1", ())
    with pytest.raises(ValueError, match="demand"):
        SubTask("s1", (act("GoToObject", "Box"),), demand=Demand(S.PickupObject, 3.0))


def test_decomposition_invariants():
    a = SubTask("a", (act("GoToObject", "X"),), temporal_order=0)
    b = SubTask("b", (act("GoToObject", "Y"),), temporal_order=1)
    assert [len(p) for p in Decomposition((a, b)).phases()] == [1, 1]
    with pytest.raises(ValueError, match="contiguous"):
        Decomposition((SubTask("c", (act("GoToObject", "X"),), temporal_order=2),))
    with pytest.raises(ValueError, match="duplicate"):
        Decomposition((a, a))


def test_team_and_robot_tokens():
    assert Team((3, 1)).lead == 1
    assert str(Team((1, 2))) == "robot1, robot2"
    with pytest.raises(ValueError):
        Team(())
    with pytest.raises(ValueError):
        Team((1, 1))
    assert parse_robot_token("robot12") == 12
    assert parse_robot_token("robot0") is None


def test_goal_attribute_closed_set():
    with pytest.raises(ValueError):
        GoalCondition("Apple", "is_tasty", True)


@given(st.lists(action_calls(), min_size=1, max_size=8))
def test_subtask_required_skills_match_actions(actions):
    assert SubTask("s", tuple(actions)).required_skills == {a.skill for a in actions}


skill_sets = st.frozensets(st.sampled_from(list(S)))


@given(skill_sets, skill_sets, skill_sets)
def test_covers_monotone(a, extra, required):
    if covers(a, required):
        assert covers(a | extra, required)


caps = st.lists(st.one_of(st.none(), st.floats(0, 20)), min_size=1, max_size=4)


@given(caps, st.one_of(st.none(), st.floats(0, 20)), st.floats(0, 40))
def test_capacity_feasible_monotone_in_team_extension(team_caps, extra_cap, amount):
    team = [RobotSpec.of(i + 1, "PickupObject", PickupObject=c) if c is not None else RobotSpec.of(i + 1, "GoToObject")
            for i, c in enumerate(team_caps)]
    extra = RobotSpec.of(99, "PickupObject", PickupObject=extra_cap) if extra_cap is not None else RobotSpec.of(99)
    if capacity_feasible(team, S.PickupObject, amount):
        assert capacity_feasible(team + [extra], S.PickupObject, amount)


@given(st.lists(action_calls(), min_size=1, max_size=5), st.integers(0, 3), st.text(max_size=20))
def test_subtask_dict_roundtrip(actions, order, description):
    st_ = SubTask("s1", tuple(actions), description, temporal_order=order)
    assert SubTask.from_dict(st_.to_dict()) == st_


def test_robot_and_decomposition_roundtrip():
    r = RobotSpec.of(2, "GoToObject", "PickupObject", "Patrol", PickupObject=5.0, Patrol=7.5)
    assert RobotSpec.from_dict(r.to_dict()) == r
    d = Decomposition((
        SubTask("s1", (act("GoToObject", "Box"), act("PickupObject", "Box")),
                demand=Demand(S.PickupObject, 8.0)),
        SubTask("s2", (act("Patrol", "RegionA"),), temporal_order=1),
    ))
    assert Decomposition.from_dict(d.to_dict()) == d
    g = GoalCondition("Apple", "parent_receptacle", "Fridge")
    assert GoalCondition.from_dict(g.to_dict()) == g
