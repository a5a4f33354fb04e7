"""Three-stage prompting pipeline: decompose, form coalitions, allocate."""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from mrplan import dsl
from mrplan.coalition import (
    CoalitionPolicy,
    PolicySchemaError,
    allocate,
    form_policy,
    with_demands,
)
from mrplan.dsl import PlanAst
from mrplan.llm.client import Backend, BackendError
from mrplan.llm.prompts import (
    STAGE_HEADERS,
    PromptConfig,
    build_allocation_prompt,
    build_coalition_prompt,
    build_decomposition_prompt,
    policy_json,
)
from mrplan.metrics import Refusal
from mrplan.model import Decomposition, RobotSpec, team_skills
from mrplan.world import WorldState

STAGES = ("decomposition", "coalition", "allocation")

_REFUSAL_RE = re.compile(r"^\s*INFEASIBLE:\s*(.*?)\s*$", re.MULTILINE)
_FENCE_RE = re.compile(r"```[A-Za-z0-9_-]*[ \t]*\n(.*?)```", re.DOTALL)


class StageParseError(ValueError):
    def __init__(self, stage: str, raw: str, detail: str = ""):
        self.stage = stage
        self.raw = raw
        msg = f"{stage}: no parseable block in reply"
        super().__init__(msg + (f" ({detail})" if detail else ""))


class StageError(RuntimeError):
    """A failure inside one pipeline stage; ``stage`` names it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage} failed: {cause}")
        self.stage = stage
        self.cause = cause


def _balanced_spans(text: str, start_pattern: str) -> list[str]:
    spans = []
    for m in re.finditer(start_pattern, text):
        depth = 0
        for j in range(text.index("{", m.start()), len(text)):
            if text[j] == "{":
                depth += 1
            elif text[j] == "}":
                depth -= 1
                if depth == 0:
                    spans.append(text[m.start():j + 1])
                    break
    return spans


def parse_stage_output(stage: str, text: str) -> Decomposition | CoalitionPolicy | PlanAst | Refusal:
    """Pull the first well-formed block for ``stage`` out of a model reply.

    A line ``INFEASIBLE: <reason>`` anywhere in the reply is a refusal.
    """
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}")
    m = _REFUSAL_RE.search(text)
    if m:
        return Refusal(m.group(1) or "no reason given", stage)
    fenced = _FENCE_RE.findall(text)
    problems: list[str] = []
    if stage == "coalition":
        for candidate in [*fenced, *_balanced_spans(text, r"\{")]:
            try:
                return CoalitionPolicy.from_dict(json.loads(candidate))
            except (json.JSONDecodeError, PolicySchemaError) as e:
                problems.append(str(e))
        raise StageParseError(stage, text, problems[0] if problems else "")
    keyword = "decomposition" if stage == "decomposition" else "plan"
    parser = dsl.parse_decomposition if stage == "decomposition" else dsl.parse
    for candidate in [*fenced, *_balanced_spans(text, rf"\b{keyword}\s*\{{")]:
        try:
            return parser(candidate.strip())
        except dsl.DslSyntaxError as e:
            problems.append(str(e))
    raise StageParseError(stage, text, problems[0] if problems else "")


class Transcript:
    """Per-stage request/response log, optionally mirrored line by line to a JSONL file."""

    def __init__(self, path: str | Path | None = None):
        self.records: list[dict[str, Any]] = []
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        if self.path:
            self.path.write_text("")

    def record(self, stage: str, prompt: str, response: str) -> None:
        rec = {"stage": stage, "prompt": prompt, "response": response}
        with self._lock:
            self.records.append(rec)
            if self.path:
                with self.path.open("a") as fh:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")


@dataclass
class PipelineResult:
    decomposition: Decomposition | None = None
    policy: CoalitionPolicy | None = None
    plan: PlanAst | None = None
    refusal: Refusal | None = None
    transcript: list[dict[str, Any]] = field(default_factory=list)

    @property
    def calls(self) -> int:
        return len(self.transcript)


def _ask(stage: str, prompt: str, backend: Backend, transcript: Transcript):
    try:
        reply = backend.complete(prompt)
    except BackendError as e:
        raise StageError(stage, e) from e
    transcript.record(stage, prompt, reply)
    try:
        return parse_stage_output(stage, reply)
    except StageParseError as e:
        raise StageError(stage, e) from e


def run_pipeline(instruction: str, world: WorldState, robots: Sequence[RobotSpec],
                 config: PromptConfig, backend: Backend,
                 transcript: Transcript | None = None) -> PipelineResult:
    transcript = transcript or Transcript()
    result = PipelineResult(transcript=transcript.records)

    skills = sorted(team_skills(robots)) if robots else []
    out = _ask("decomposition", build_decomposition_prompt(world, skills, config, instruction),
               backend, transcript)
    if isinstance(out, Refusal):
        result.refusal = out
        return result
    try:
        result.decomposition = with_demands(out, world)
    except ValueError as e:
        raise StageError("decomposition", e) from e

    if not config.skip_coalition:
        out = _ask("coalition", build_coalition_prompt(result.decomposition, robots, world, config),
                   backend, transcript)
        if isinstance(out, Refusal):
            result.refusal = out
            return result
        ids = [d.subtask_id for d in out.decisions]
        if ids != [st.id for st in result.decomposition.subtasks]:
            raise StageError("coalition", ValueError(f"policy covers {ids}, expected "
                                                     f"{[st.id for st in result.decomposition.subtasks]}"))
        result.policy = out
        if out.infeasible:
            result.refusal = Refusal("; ".join(f"{d.subtask_id}: {d.rationale}" for d in out.infeasible),
                                     "coalition")
            return result

    out = _ask("allocation", build_allocation_prompt(result.decomposition, result.policy, robots, config),
               backend, transcript)
    if isinstance(out, Refusal):
        result.refusal = out
        return result
    result.plan = out
    return result


class OracleBackend:
    """Offline stand-in for the model that answers each stage with the solver's output.

    It replies from a known decomposition (the dataset's ground truth), so the
    full prompt/parse/execute path can run with no network and no credentials.
    """

    def __init__(self, decomposition: Decomposition, robots: Sequence[RobotSpec], world: WorldState):
        self.decomposition = with_demands(decomposition, world)
        self.robots = list(robots)
        self.prompts: list[str] = []

    def complete(self, prompt: str) -> str:
        self.prompts.append(prompt)
        first = prompt.splitlines()[0] if prompt else ""
        policy = form_policy(self.decomposition, self.robots)
        if first == STAGE_HEADERS["decomposition"]:
            return ("Here is the decomposition.\n```dsl\n"
                    + dsl.serialize_decomposition(self.decomposition) + "```\n")
        if policy.infeasible:
            return "INFEASIBLE: " + "; ".join(d.rationale for d in policy.infeasible)
        if first == STAGE_HEADERS["coalition"]:
            return "Coalition policy:\n```json\n" + policy_json(policy) + "\n```\n"
        if first == STAGE_HEADERS["allocation"]:
            return "```dsl\n" + dsl.serialize(allocate(self.decomposition, policy)) + "```\n"
        raise BackendError("prompt does not start with a known stage header")
