"""The plan language: a closed, straight-line DSL of seq/par/assign blocks.

Grammar::

    plan    := "plan" "{" stmt* "}"
    stmt    := seq | par | assign
    seq     := "seq" "{" stmt* "}"
    par     := "par" "{" stmt* "}"
    assign  := "assign" team "{" (action ";")* "}"
    team    := ROBOT ("," ROBOT)*
    action  := IDENT "(" (IDENT ("," IDENT)*)? ")"

Decompositions (Stage 1 output, before any robot is chosen) share the lexer::

    decomposition := "decomposition" "{" subtask* "}"
    subtask := "subtask" IDENT "phase" INT ["demand" IDENT NUMBER] [STRING]
               "{" (action ";")* "}"

``#`` starts a comment running to end of line. By convention ``##`` lines are
block summaries and single ``#`` lines are per-line comments; the parser
discards both.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Protocol, Sequence, Union

from mrplan.model import (
    ARITY,
    ActionCall,
    Decomposition,
    Demand,
    RobotSpec,
    SkillName,
    SubTask,
    Team,
    UnknownSkillError,
    parse_robot_token,
    robot_token,
    team_skills,
)


@dataclass(frozen=True)
class Assign:
    team: Team
    actions: tuple[ActionCall, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))


@dataclass(frozen=True)
class Seq:
    children: tuple["Node", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Par:
    children: tuple["Node", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


Node = Union[Seq, Par, Assign]


@dataclass(frozen=True)
class PlanAst:
    root: Node

    def assigns(self) -> list[Assign]:
        return list(iter_assigns(self.root))

    def action_count(self) -> int:
        return sum(len(a.actions) for a in self.assigns())

    def robots(self) -> frozenset[int]:
        return node_robots(self.root)


def iter_assigns(node: Node) -> Iterator[Assign]:
    if isinstance(node, Assign):
        yield node
    else:
        for child in node.children:
            yield from iter_assigns(child)


def node_robots(node: Node) -> frozenset[int]:
    out: set[int] = set()
    for a in iter_assigns(node):
        out.update(a.team.members)
    return frozenset(out)


# -- lexing -----------------------------------------------------------------

class DslSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{line}:{column}: {message}{detail}")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, NUMBER, STRING, a punctuation char, or EOF
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<NUMBER>[0-9]+(?:\.[0-9]+)?(?:[eE][-+]?[0-9]+)?)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<STRING>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>[{}();,])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "punct":
            tokens.append(Token(chunk, chunk, line, pos - line_start + 1))
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", lambda m: {"n": "\n"}.get(m.group(1), m.group(1)), s[1:-1])


def _escape(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


# -- parsing ------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, message: str, expected: Iterable[str] = ()) -> DslSyntaxError:
        return DslSyntaxError(message, self.tok.line, self.tok.column, expected)

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text is not None else kind
            got = repr(tok.text) if tok.kind != "EOF" else "end of input"
            raise self.fail(f"expected {want}, got {got}", [text or kind])
        self.i += 1
        return tok

    def at_keyword(self, word: str) -> bool:
        return self.tok.kind == "IDENT" and self.tok.text == word

    def plan(self) -> PlanAst:
        self.expect("IDENT", "plan")
        self.expect("{")
        stmts = self.stmts()
        self.expect("}")
        self.expect("EOF")
        root = stmts[0] if len(stmts) == 1 else Seq(tuple(stmts))
        return PlanAst(root)

    def stmts(self) -> list[Node]:
        out: list[Node] = []
        while self.tok.kind != "}":
            out.append(self.stmt())
        return out

    def stmt(self) -> Node:
        if self.at_keyword("seq"):
            self.i += 1
            self.expect("{")
            children = self.stmts()
            self.expect("}")
            return Seq(tuple(children))
        if self.at_keyword("par"):
            self.i += 1
            self.expect("{")
            children = self.stmts()
            self.expect("}")
            return Par(tuple(children))
        if self.at_keyword("assign"):
            self.i += 1
            team = self.team()
            return Assign(team, tuple(self.action_block()))
        raise self.fail(
            f"expected a statement, got {self.tok.text or 'end of input'!r}",
            ["seq", "par", "assign", "}"],
        )

    def team(self) -> Team:
        members = [self.robot()]
        while self.tok.kind == ",":
            self.i += 1
            members.append(self.robot())
        if len(set(members)) != len(members):
            raise self.fail("malformed team list: duplicate robot")
        return Team(tuple(members))

    def robot(self) -> int:
        tok = self.tok
        rid = parse_robot_token(tok.text) if tok.kind == "IDENT" else None
        if rid is None:
            raise self.fail(f"malformed team list: expected robotN, got {tok.text!r}", ["ROBOT"])
        self.i += 1
        return rid

    def action_block(self) -> list[ActionCall]:
        self.expect("{")
        actions = []
        while self.tok.kind != "}":
            actions.append(self.action())
            self.expect(";")
        self.expect("}")
        return actions

    def action(self) -> ActionCall:
        name = self.expect("IDENT")
        try:
            skill = SkillName.parse(name.text)
        except UnknownSkillError as e:
            raise DslSyntaxError(str(e), name.line, name.column, ["skill name"]) from None
        self.expect("(")
        args: list[str] = []
        if self.tok.kind != ")":
            args.append(self.expect("IDENT").text)
            while self.tok.kind == ",":
                self.i += 1
                args.append(self.expect("IDENT").text)
        self.expect(")")
        if len(args) != ARITY[skill]:
            raise DslSyntaxError(
                f"{skill} takes {ARITY[skill]} argument(s), got {len(args)}",
                name.line, name.column,
            )
        return ActionCall(skill, tuple(args))

    def decomposition(self) -> Decomposition:
        self.expect("IDENT", "decomposition")
        self.expect("{")
        subtasks = []
        while self.tok.kind != "}":
            subtasks.append(self.subtask())
        self.expect("}")
        end = self.expect("EOF")
        try:
            return Decomposition(tuple(subtasks))
        except ValueError as e:
            raise DslSyntaxError(str(e), end.line, end.column) from None

    def subtask(self) -> SubTask:
        start = self.expect("IDENT", "subtask")
        sid = self.expect("IDENT").text
        self.expect("IDENT", "phase")
        phase_tok = self.expect("NUMBER")
        if not phase_tok.text.isdigit():
            raise DslSyntaxError("phase must be an integer", phase_tok.line, phase_tok.column)
        demand = None
        if self.at_keyword("demand"):
            self.i += 1
            skill_tok = self.expect("IDENT")
            amount = float(self.expect("NUMBER").text)
            try:
                demand = Demand(SkillName.parse(skill_tok.text), amount)
            except UnknownSkillError as e:
                raise DslSyntaxError(str(e), skill_tok.line, skill_tok.column) from None
        description = ""
        if self.tok.kind == "STRING":
            description = _unescape(self.tok.text)
            self.i += 1
        actions = self.action_block()
        try:
            return SubTask(sid, tuple(actions), description, demand, int(phase_tok.text))
        except ValueError as e:
            raise DslSyntaxError(str(e), start.line, start.column) from None


def parse(text: str) -> PlanAst:
    return _Parser(text).plan()


def parse_decomposition(text: str) -> Decomposition:
    return _Parser(text).decomposition()


# -- serialization --------------------------------------------------------------

def _fmt_amount(x: float) -> str:
    return repr(float(x))


def _emit(node: Node, depth: int, out: list[str]) -> None:
    pad = "  " * depth
    if isinstance(node, Assign):
        out.append(f"{pad}assign {', '.join(robot_token(r) for r in node.team)} {{")
        for a in node.actions:
            out.append(f"{pad}  {a};")
        out.append(f"{pad}}}")
        return
    out.append(f"{pad}{'seq' if isinstance(node, Seq) else 'par'} {{")
    for child in node.children:
        _emit(child, depth + 1, out)
    out.append(f"{pad}}}")


def serialize(ast: PlanAst) -> str:
    out = ["plan {"]
    _emit(ast.root, 1, out)
    out.append("}")
    return "\n".join(out) + "\n"


def serialize_decomposition(decomposition: Decomposition) -> str:
    out = ["decomposition {"]
    for st in decomposition.subtasks:
        head = f"  subtask {st.id} phase {st.temporal_order}"
        if st.demand is not None:
            head += f" demand {st.demand.skill} {_fmt_amount(st.demand.amount)}"
        if st.description:
            head += f" {_escape(st.description)}"
        out.append(head + " {")
        for a in st.actions:
            out.append(f"    {a};")
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"


def strip_comments(text: str, line_comments: bool = True, summaries: bool = True) -> str:
    """Drop whole comment lines: ``#`` lines if ``line_comments``, ``##`` lines if ``summaries``."""
    kept = []
    # split on "\n" only; str.splitlines would also break inside comments at \x85, \u2028 etc.
    for line in re.findall(r"[^\n]*\n|[^\n]+", text):
        s = line.lstrip()
        if s.startswith("##"):
            if summaries:
                continue
        elif s.startswith("#"):
            if line_comments:
                continue
        kept.append(line)
    return "".join(kept)


# -- static validation ------------------------------------------------------------

@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    location: str
    message: str
    code: str = ""

    def __str__(self) -> str:
        return f"{self.severity} at {self.location}: {self.message}"


# Issues that make a plan uninterpretable. Skill and capacity issues are
# also errors but the executor can still run such plans and record failures.
STRUCTURAL_CODES = frozenset({"unknown-robot", "concurrent-assignment", "unknown-entity"})


class EntityLookup(Protocol):
    def has_entity(self, entity_id: str) -> bool: ...

    def mass_of(self, entity_id: str) -> float | None: ...

    def area_of(self, entity_id: str) -> float | None: ...


def validate(ast: PlanAst, robots: Sequence[RobotSpec], world: EntityLookup | None = None) -> list[ValidationIssue]:
    by_id = {r.id: r for r in robots}
    issues: list[ValidationIssue] = []

    def visit(node: Node, path: str) -> None:
        if isinstance(node, Assign):
            _check_assign(node, path, by_id, world, issues)
            return
        kind = "seq" if isinstance(node, Seq) else "par"
        if not node.children:
            issues.append(ValidationIssue("warning", path, f"empty {kind} block", "empty-block"))
        if isinstance(node, Par):
            owner: dict[int, int] = {}
            for i, child in enumerate(node.children):
                for rid in sorted(node_robots(child)):
                    if rid in owner and owner[rid] != i:
                        issues.append(ValidationIssue(
                            "error", f"{path}/{i}",
                            f"concurrent double-assignment: {robot_token(rid)} appears in "
                            f"branches {owner[rid]} and {i} of one par block",
                            "concurrent-assignment",
                        ))
                    owner.setdefault(rid, i)
        for i, child in enumerate(node.children):
            visit(child, f"{path}/{i}")

    visit(ast.root, "plan")
    return issues


def _check_assign(node: Assign, path: str, by_id: dict[int, RobotSpec],
                  world: EntityLookup | None, issues: list[ValidationIssue]) -> None:
    unknown = [r for r in node.team if r not in by_id]
    for r in unknown:
        issues.append(ValidationIssue("error", path, f"unknown robot {robot_token(r)}", "unknown-robot"))
    team = [by_id[r] for r in node.team if r in by_id]
    skills = team_skills(team)
    for j, action in enumerate(node.actions):
        where = f"{path}/{j}"
        if team and action.skill not in skills:
            issues.append(ValidationIssue(
                "error", where,
                f"skill not possessed: {action.skill} is not a skill of team [{node.team}]",
                "skill-not-possessed",
            ))
        if world is None:
            continue
        for arg in action.args:
            if not world.has_entity(arg):
                issues.append(ValidationIssue("error", where, f"unknown entity {arg!r} in {action}", "unknown-entity"))
        if not team or action.skill not in skills:
            continue
        target = action.args[0]
        if action.skill == SkillName.PickupObject and world.has_entity(target):
            need = world.mass_of(target) or 0.0
            have = sum(r.capacity(SkillName.PickupObject) or 0.0 for r in team)
            if have < need:
                issues.append(ValidationIssue(
                    "error", where, f"capacity insufficient: {target} weighs {need} kg, team lifts {have} kg",
                    "capacity",
                ))
        elif action.skill == SkillName.Patrol and world.has_entity(target):
            need = world.area_of(target) or 0.0
            have = sum(r.capacity(SkillName.Patrol) or 0.0 for r in team)
            if have < need:
                issues.append(ValidationIssue(
                    "error", where, f"capacity insufficient: {target} spans {need} m^2, team sees {have} m^2",
                    "capacity",
                ))


def errors(issues: Iterable[ValidationIssue]) -> list[ValidationIssue]:
    return [i for i in issues if i.severity == "error"]


# -- phases -------------------------------------------------------------------------

def phases(ast: PlanAst) -> list[frozenset[int]]:
    """Flatten a plan into its ordered execution phases (robot sets)."""
    out: list[frozenset[int]] = []

    def walk(node: Node) -> None:
        if isinstance(node, Assign):
            out.append(frozenset(node.team.members))
        elif isinstance(node, Par):
            robots = node_robots(node)
            if robots:
                out.append(robots)
        else:
            for child in node.children:
                walk(child)

    walk(ast.root)
    return out
