"""Few-shot prompt construction for decomposition, coalition formation and allocation.

Prompts are plain text and deterministic for fixed inputs. Lines starting
with ``#`` occur only inside example DSL blocks, so the comment ablations
remove exactly those lines and nothing else.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Sequence

from mrplan import dsl
from mrplan.coalition import CoalitionPolicy
from mrplan.llm import examples as ex
from mrplan.model import ARITY, CAPACITY_UNITS, Decomposition, RobotSpec, SkillName, sorted_skills
from mrplan.world import AFFORDANCES, WorldState

STAGE_HEADERS = {
    "decomposition": "Stage 1 of 3: task decomposition.",
    "coalition": "Stage 2 of 3: coalition formation.",
    "allocation": "Stage 3 of 3: task allocation.",
}

REFUSAL_HINT = ("If the task cannot be done with the available robots and skills, "
                "reply with the single line `INFEASIBLE: <reason>` instead.")


@dataclass(frozen=True)
class PromptConfig:
    decomposition_examples: tuple[ex.ExampleTask, ...] = ex.DECOMPOSITION_EXAMPLES
    coalition_examples: tuple[ex.ExampleTask, ...] = ex.COALITION_EXAMPLES
    allocation_examples: tuple[ex.ExampleTask, ...] = ex.ALLOCATION_EXAMPLES
    include_line_comments: bool = True
    include_block_summaries: bool = True
    skip_coalition: bool = False

    def __post_init__(self):
        if not self.decomposition_examples or not self.allocation_examples:
            raise ValueError("decomposition and allocation need at least one example each")
        if not self.skip_coalition and not self.coalition_examples:
            raise ValueError("coalition stage needs at least one example")

    def annotate(self, text: str) -> str:
        return dsl.strip_comments(text, line_comments=not self.include_line_comments,
                                  summaries=not self.include_block_summaries)

    @property
    def label(self) -> str:
        if self.skip_coalition:
            return "no-coalition"
        if not self.include_line_comments and not self.include_block_summaries:
            return "no-both"
        if not self.include_line_comments:
            return "no-comments"
        if not self.include_block_summaries:
            return "no-summary"
        return "full"


def ablation_configs(base: PromptConfig | None = None) -> list[PromptConfig]:
    """The five prompt variants of the ablation sweep, in report order."""
    base = base or PromptConfig()
    return [
        replace(base),
        replace(base, include_line_comments=False),
        replace(base, include_block_summaries=False),
        replace(base, include_line_comments=False, include_block_summaries=False),
        replace(base, skip_coalition=True),
    ]


def _fence(text: str, lang: str = "dsl") -> str:
    return f"```{lang}\n{text.rstrip()}\n```"


def skill_signature(skill: SkillName) -> str:
    params = ["object", "receptacle"][:ARITY[skill]]
    if skill in (SkillName.GoToLocation, SkillName.Patrol):
        params = ["region"]
    return f"{skill.value}({', '.join(params)})"


def skills_block(skills: Sequence[SkillName]) -> str:
    return "\n".join(f"- {skill_signature(s)}" for s in sorted_skills(set(skills)))


def environment_block(world: WorldState) -> str:
    lines = []
    for oid in sorted(world.objects):
        obj = world.objects[oid]
        facts = []
        if obj.mass is not None:
            facts.append(f"{obj.mass} kg")
        if obj.parent_receptacle:
            facts.append(f"in {obj.parent_receptacle}")
        facts.extend(k for k in ("is_receptacle", *AFFORDANCES) if getattr(obj, k))
        facts.extend(k for k, v in obj.attributes.items() if v)
        lines.append(f"- {oid} ({obj.type}{'; ' + ', '.join(facts) if facts else ''})")
    for rid in sorted(world.regions):
        lines.append(f"- {rid} (region; {world.regions[rid].area} m^2)")
    return "\n".join(lines) if lines else "- (no objects)"


def skill_label(spec) -> str:
    if spec.capacity is not None:
        return f"{spec.name.value} (max {spec.capacity} {CAPACITY_UNITS[spec.name]})"
    return spec.name.value


def robots_block(robots: Sequence[RobotSpec]) -> str:
    return "\n".join(f"- {r.token}: " + ", ".join(skill_label(s) for s in r.skills)
                     for r in sorted(robots, key=lambda r: r.id))


def policy_json(policy: CoalitionPolicy) -> str:
    return json.dumps(policy.to_dict(), indent=2)


def build_decomposition_prompt(world: WorldState, skills: Sequence[SkillName],
                               config: PromptConfig, instruction: str) -> str:
    if not instruction.strip():
        raise ValueError("instruction must not be empty")
    parts = [
        STAGE_HEADERS["decomposition"],
        "Break a household instruction into sub-tasks for a team of robots. Each sub-task is a "
        "short list of skill calls. Sub-tasks that can run at the same time share a phase number; "
        "later phases start only after earlier ones finish.",
        "== Robot skills ==",
        skills_block(skills),
        "== Environment objects ==",
        environment_block(world),
        "== Examples ==",
    ]
    for i, task in enumerate(config.decomposition_examples, 1):
        parts.append(f"Example {i}\nInstruction: {task.instruction}\n"
                     + _fence(config.annotate(task.decomposition_text())))
    parts += [
        "== Task ==",
        f"Instruction: {instruction.strip()}",
        "Reply with one ```dsl block holding a `decomposition { ... }` that uses only the skills "
        "and objects listed above. " + REFUSAL_HINT,
    ]
    return "\n\n".join(parts) + "\n"


def build_coalition_prompt(decomposition: Decomposition, robots: Sequence[RobotSpec],
                           world: WorldState, config: PromptConfig) -> str:
    parts = [
        STAGE_HEADERS["coalition"],
        "For every sub-task decide which robot or team of robots performs it. A single robot is "
        "enough when it has every skill the sub-task uses and enough capacity (case single_robot). "
        "If no robot has all the skills, robots whose skills together cover the sub-task form a team "
        "(case team_union). If a robot has the skills but its capacity is too small for the object "
        "mass or region area, further robots join to pool capacity (case team_capacity). If even all "
        "robots together cannot do it, the sub-task is infeasible (case infeasible). Use as few robots "
        "as possible.",
        "== Robots ==",
        robots_block(robots),
        "== Environment objects ==",
        environment_block(world),
        "== Examples ==",
    ]
    for i, task in enumerate(config.coalition_examples, 1):
        parts.append(
            f"Example {i}\nInstruction: {task.instruction}\nRobots:\n{robots_block(task.robots)}\n"
            "Decomposition:\n" + _fence(config.annotate(task.decomposition_text()))
            + "\nCoalition policy:\n" + _fence(policy_json(task.policy()), "json")
        )
    parts += [
        "== Task ==",
        "Decomposition:\n" + _fence(dsl.serialize_decomposition(decomposition)),
        'Reply with one ```json block of the form {"decisions": [{"subtask_id": ..., "kind": '
        '"single_robot" | "team_union" | "team_capacity" | "infeasible", "team": [robot numbers] '
        'or null, "rationale": ...}]}, one entry per sub-task in order. ' + REFUSAL_HINT,
    ]
    return "\n\n".join(parts) + "\n"


def build_allocation_prompt(decomposition: Decomposition, policy: CoalitionPolicy | None,
                            robots: Sequence[RobotSpec], config: PromptConfig) -> str:
    with_policy = not config.skip_coalition
    if with_policy and policy is None:
        raise ValueError("a coalition policy is required unless skip_coalition is set")
    intro = ("Turn the sub-tasks into one executable plan. `assign robotN, robotM { ... }` gives a "
             "sub-task's skill calls to a robot or team, `par { ... }` runs blocks at the same time "
             "and `seq { ... }` runs them one after another. Keep the phase order; run sub-tasks of "
             "one phase in parallel when their robots differ.")
    if with_policy:
        intro += " Assign each sub-task to exactly the team chosen in its coalition decision."
    else:
        intro += " Choose for each sub-task a robot or team whose skills cover it."
    parts = [STAGE_HEADERS["allocation"], intro, "== Examples =="]
    for i, task in enumerate(config.allocation_examples, 1):
        block = (f"Example {i}\nInstruction: {task.instruction}\nRobots:\n{robots_block(task.robots)}\n"
                 "Decomposition:\n" + _fence(config.annotate(task.decomposition_text())))
        if with_policy:
            block += "\nCoalition policy:\n" + _fence(policy_json(task.policy()), "json")
        block += "\nPlan:\n" + _fence(config.annotate(task.plan_text()))
        parts.append(block)
    parts += [
        "== Task ==",
        "Robots:\n" + robots_block(robots),
        "Decomposition:\n" + _fence(dsl.serialize_decomposition(decomposition)),
    ]
    if with_policy:
        parts.append("Coalition policy:\n" + _fence(policy_json(policy), "json"))
    parts.append("Reply with one ```dsl block holding a `plan { ... }`. " + REFUSAL_HINT)
    return "\n\n".join(parts) + "\n"
