from dataclasses import replace

import pytest

from mrplan import dsl
from mrplan.coalition import form_policy
from mrplan.executor import execute
from mrplan.llm import examples as ex
from mrplan.llm.prompts import (
    STAGE_HEADERS,
    PromptConfig,
    ablation_configs,
    build_allocation_prompt,
    build_coalition_prompt,
    build_decomposition_prompt,
    robots_block,
)
from mrplan.model import RobotSpec, SkillName

WORLD = ex.studio_world()
ROBOTS = ex.LAPTOP_LIGHT_COFFEE.robots
DECOMP = ex.LAPTOP_LIGHT_COFFEE.decomposition()


def all_prompts(config: PromptConfig) -> list[str]:
    out = [build_decomposition_prompt(WORLD, list(SkillName), config, "Turn off the lights.")]
    if not config.skip_coalition:
        out.append(build_coalition_prompt(DECOMP, ROBOTS, WORLD, config))
    out.append(build_allocation_prompt(DECOMP, form_policy(DECOMP, ROBOTS), ROBOTS, config))
    return out


def is_line_comment(line: str) -> bool:
    s = line.lstrip()
    return s.startswith("#") and not s.startswith("##")


def is_summary(line: str) -> bool:
    return line.lstrip().startswith("##")


def test_example_counts():
    assert len(ex.DECOMPOSITION_EXAMPLES) == 5
    assert len(ex.COALITION_EXAMPLES) == 3
    assert len(ex.ALLOCATION_EXAMPLES) == 4
    prompt = build_decomposition_prompt(WORLD, list(SkillName), PromptConfig(), "x")
    assert prompt.count("\nExample ") == 5


def test_stage_headers_open_each_prompt():
    for prompt, stage in zip(all_prompts(PromptConfig()), ("decomposition", "coalition", "allocation")):
        assert prompt.splitlines()[0] == STAGE_HEADERS[stage]
        assert "INFEASIBLE: <reason>" in prompt


@pytest.mark.parametrize("drop, keep", [
    ({"include_line_comments": False}, is_line_comment),
    ({"include_block_summaries": False}, is_summary),
])
def test_ablation_removes_exactly_its_lines(drop, keep):
    for full, ablated in zip(all_prompts(PromptConfig()), all_prompts(PromptConfig(**drop))):
        expected = [line for line in full.splitlines() if not keep(line)]
        assert ablated.splitlines() == expected
        assert any(keep(line) for line in full.splitlines())


def test_no_both_has_no_comment_lines():
    cfg = PromptConfig(include_line_comments=False, include_block_summaries=False)
    for prompt in all_prompts(cfg):
        assert not any(line.lstrip().startswith("#") for line in prompt.splitlines())


def test_skip_coalition_drops_policy():
    cfg = PromptConfig(skip_coalition=True)
    prompt = build_allocation_prompt(DECOMP, None, ROBOTS, cfg)
    assert "policy" not in prompt.lower()
    assert "single_robot" not in prompt
    with pytest.raises(ValueError, match="policy"):
        build_allocation_prompt(DECOMP, None, ROBOTS, PromptConfig())


def test_coalition_prompt_names_all_cases():
    prompt = build_coalition_prompt(DECOMP, ROBOTS, WORLD, PromptConfig())
    for case in ("single_robot", "team_union", "team_capacity", "infeasible"):
        assert case in prompt
    assert prompt.count('"decisions"') == 3 + 1  # three examples plus the reply format


def test_robot_skill_labels():
    text = robots_block([RobotSpec.of(2, "GoToObject", "Patrol", Patrol=6.0),
                         RobotSpec.of(1, "GoToObject", "PickupObject", PickupObject=5.0)])
    assert text.splitlines() == ["- robot1: GoToObject, PickupObject (max 5.0 kg)",
                                 "- robot2: GoToObject, Patrol (max 6.0 m^2)"]


def test_prompts_are_deterministic():
    assert all_prompts(PromptConfig()) == all_prompts(PromptConfig())


def test_ablation_configs_order():
    assert [c.label for c in ablation_configs()] == ["full", "no-comments", "no-summary", "no-both", "no-coalition"]


def test_examples_strip_to_canonical_dsl():
    for task in ex.ALL_EXAMPLES:
        assert dsl.strip_comments(task.decomposition_text()) == dsl.serialize_decomposition(task.decomposition())
        assert dsl.strip_comments(task.plan_text()) == dsl.serialize(task.plan())


def test_examples_execute_cleanly():
    for task in ex.ALL_EXAMPLES:
        trace = execute(task.plan(), WORLD, task.robots, strict=True)
        assert trace.succeeded == trace.total_actions, task.name


def test_config_needs_examples():
    with pytest.raises(ValueError):
        PromptConfig(decomposition_examples=())
    with pytest.raises(ValueError):
        PromptConfig(coalition_examples=())
    replace(PromptConfig(skip_coalition=True), coalition_examples=())
