"""Worked examples shown to the model in each prompt.

All examples live in a small studio apartment that no benchmark task uses.
Each sub-task carries a block summary (rendered as ``##`` lines) and one
comment per action (rendered as ``#`` lines); the prompt builder drops either
kind on request.
"""

from __future__ import annotations

from dataclasses import dataclass

from mrplan import dsl
from mrplan.coalition import CoalitionPolicy, allocate, form_policy, with_demands
from mrplan.dsl import Assign, Node, PlanAst, Seq
from mrplan.model import ActionCall, Decomposition, RobotSpec, SubTask, act
from mrplan.world import WorldState, load_floorplan

STUDIO_FLOORPLAN = {
    "name": "example_studio",
    "objects": [
        {"id": "CounterTop", "type": "CounterTop", "is_receptacle": True},
        {"id": "Sink", "type": "Sink", "is_receptacle": True, "togglable": True},
        {"id": "Plate", "type": "Plate", "mass": 0.5, "parent": "CounterTop", "is_receptacle": True},
        {"id": "Bread", "type": "Bread", "mass": 0.4, "parent": "CounterTop", "sliceable": True},
        {"id": "Toaster", "type": "Toaster", "is_receptacle": True, "togglable": True},
        {"id": "Mug", "type": "Mug", "mass": 0.3, "parent": "CounterTop"},
        {"id": "CoffeeMachine", "type": "CoffeeMachine", "is_receptacle": True, "togglable": True},
        {"id": "Laptop", "type": "Laptop", "mass": 2.0, "openable": True, "togglable": True,
         "attributes": {"is_open": True, "is_on": True}},
        {"id": "CeilingLight", "type": "CeilingLight", "togglable": True, "attributes": {"is_on": True}},
        {"id": "Television", "type": "Television", "togglable": True, "attributes": {"is_on": True}},
        {"id": "Vase", "type": "Vase", "mass": 1.0, "breakable": True},
        {"id": "GarbageCan", "type": "GarbageCan", "is_receptacle": True},
        {"id": "Bookshelf", "type": "Shelf", "is_receptacle": True},
        {"id": "Box", "type": "Box", "mass": 12.0, "is_receptacle": True},
    ],
    "regions": [],
    "receptacle_effects": [
        {"type": "Toaster", "attribute": "is_heated"},
        {"type": "Sink", "attribute": "is_washed"},
    ],
}


def studio_world() -> WorldState:
    return load_floorplan(STUDIO_FLOORPLAN)


@dataclass(frozen=True)
class Step:
    action: ActionCall
    comment: str


@dataclass(frozen=True)
class ExampleSubTask:
    id: str
    phase: int
    description: str
    summary: str
    steps: tuple[Step, ...]

    def subtask(self) -> SubTask:
        return SubTask(self.id, tuple(s.action for s in self.steps), self.description,
                       temporal_order=self.phase)


@dataclass(frozen=True)
class ExampleTask:
    name: str
    instruction: str
    robots: tuple[RobotSpec, ...]
    subtasks: tuple[ExampleSubTask, ...]

    def decomposition(self) -> Decomposition:
        return with_demands(Decomposition(tuple(s.subtask() for s in self.subtasks)), studio_world())

    def policy(self) -> CoalitionPolicy:
        return form_policy(self.decomposition(), self.robots)

    def plan(self) -> PlanAst:
        return allocate(self.decomposition(), self.policy())

    def _notes(self, subtask_id: str) -> ExampleSubTask:
        return next(s for s in self.subtasks if s.id == subtask_id)

    def decomposition_text(self) -> str:
        """Decomposition DSL with ``##`` summaries and ``#`` action comments."""
        decomp = self.decomposition()
        plain = dsl.serialize_decomposition(decomp).splitlines()
        out = [plain[0]]
        body = iter(plain[1:-1])
        for st in decomp.subtasks:
            notes = self._notes(st.id)
            out.append(f"  ## {notes.summary}")
            out.append(next(body))
            for step in notes.steps:
                out.append(f"    # {step.comment}")
                out.append(next(body))
            out.append(next(body))
        out.append(plain[-1])
        return "\n".join(out) + "\n"

    def plan_text(self) -> str:
        """Allocated plan DSL, annotated like `decomposition_text`."""
        decomp = self.decomposition()
        remaining = list(decomp.subtasks)
        out = ["plan {"]

        def emit(node: Node, depth: int) -> None:
            pad = "  " * depth
            if isinstance(node, Assign):
                st = next(s for s in remaining if s.actions == node.actions)
                remaining.remove(st)
                notes = self._notes(st.id)
                out.append(f"{pad}## {notes.summary}")
                out.append(f"{pad}assign {node.team} {{")
                for step in notes.steps:
                    out.append(f"{pad}  # {step.comment}")
                    out.append(f"{pad}  {step.action};")
                out.append(f"{pad}}}")
                return
            out.append(f"{pad}{'seq' if isinstance(node, Seq) else 'par'} {{")
            for child in node.children:
                emit(child, depth + 1)
            out.append(f"{pad}}}")

        emit(self.plan().root, 1)
        out.append("}")
        return "\n".join(out) + "\n"


def _st(id, phase, description, summary, *steps):
    return ExampleSubTask(id, phase, description, summary,
                          tuple(Step(act(skill, *args), comment) for skill, args, comment in steps))


_SWITCHER = ("GoToObject", "SwitchOn", "SwitchOff")
_ALL_ROUND = ("GoToObject", "PickupObject", "PutObject", "SwitchOn", "SwitchOff",
              "OpenObject", "CloseObject", "SliceObject", "CleanObject", "BreakObject", "ThrowObject")


LIGHTS_AND_TV = ExampleTask(
    "lights_and_tv",
    "Turn off the ceiling light and the television.",
    (RobotSpec.of(1, *_SWITCHER), RobotSpec.of(2, *_SWITCHER)),
    (
        _st("s1", 0, "turn off the ceiling light",
            "Sub-task s1: switch off the ceiling light. Independent of s2, so both share phase 0 and run in parallel.",
            ("GoToObject", ("CeilingLight",), "go to the ceiling light"),
            ("SwitchOff", ("CeilingLight",), "switch the light off")),
        _st("s2", 0, "turn off the television",
            "Sub-task s2: switch off the television. Needs only GoToObject and SwitchOff.",
            ("GoToObject", ("Television",), "go to the television"),
            ("SwitchOff", ("Television",), "switch the television off")),
    ),
)

MAKE_TOAST = ExampleTask(
    "make_toast",
    "Make toast.",
    (RobotSpec.of(1, *_ALL_ROUND, PickupObject=5.0),),
    (
        _st("s1", 0, "slice the bread",
            "Sub-task s1: slice the bread first; toasting needs a slice, so s2 must wait for it.",
            ("GoToObject", ("Bread",), "go to the bread"),
            ("SliceObject", ("Bread",), "slice it")),
        _st("s2", 1, "toast the bread",
            "Sub-task s2: carry the sliced bread to the toaster and switch it on (phase 1, after s1).",
            ("GoToObject", ("Bread",), "go back to the bread"),
            ("PickupObject", ("Bread",), "pick up the bread (0.4 kg)"),
            ("GoToObject", ("Toaster",), "carry it to the toaster"),
            ("PutObject", ("Bread", "Toaster"), "put the bread in the toaster"),
            ("SwitchOn", ("Toaster",), "switch the toaster on to heat the bread")),
    ),
)

WASH_AND_DISCARD = ExampleTask(
    "wash_and_discard",
    "Wash the plate in the sink and throw the vase in the garbage.",
    (
        RobotSpec.of(1, "GoToObject", "PickupObject", "PutObject", PickupObject=3.0),
        RobotSpec.of(2, "GoToObject", "SwitchOn", "SwitchOff", "CleanObject"),
        RobotSpec.of(3, "GoToObject", "PickupObject", "PutObject", "ThrowObject", PickupObject=3.0),
    ),
    (
        _st("s1", 0, "wash the plate",
            "Sub-task s1: put the plate in the sink and run the water. Needs PickupObject, PutObject and SwitchOn.",
            ("GoToObject", ("Plate",), "go to the plate"),
            ("PickupObject", ("Plate",), "pick up the plate (0.5 kg)"),
            ("GoToObject", ("Sink",), "carry it to the sink"),
            ("PutObject", ("Plate", "Sink"), "put the plate in the sink"),
            ("SwitchOn", ("Sink",), "turn the water on so the plate gets washed")),
        _st("s2", 0, "throw away the vase",
            "Sub-task s2: carry the vase to the garbage can. Independent of s1, so it runs in parallel.",
            ("GoToObject", ("Vase",), "go to the vase"),
            ("PickupObject", ("Vase",), "pick up the vase (1.0 kg)"),
            ("GoToObject", ("GarbageCan",), "carry it to the garbage can"),
            ("PutObject", ("Vase", "GarbageCan"), "drop it in the garbage can")),
    ),
)

MOVE_BOX = ExampleTask(
    "move_box",
    "Move the box next to the bookshelf.",
    (
        RobotSpec.of(1, "GoToObject", "PickupObject", "PutObject", PickupObject=8.0),
        RobotSpec.of(2, "GoToObject", "PickupObject", "PutObject", PickupObject=8.0),
        RobotSpec.of(3, *_SWITCHER),
    ),
    (
        _st("s1", 0, "carry the box to the bookshelf",
            "Sub-task s1: the box weighs 12.0 kg, more than any single robot can lift, so robots pool their capacity.",
            ("GoToObject", ("Box",), "all team members go to the box"),
            ("PickupObject", ("Box",), "lift the box together"),
            ("GoToObject", ("Bookshelf",), "carry it to the bookshelf"),
            ("PutObject", ("Box", "Bookshelf"), "set it down on the shelf")),
    ),
)

LAPTOP_LIGHT_COFFEE = ExampleTask(
    "laptop_light_coffee",
    "Close the laptop and turn off the light, then make a coffee.",
    (
        RobotSpec.of(1, "GoToObject", "OpenObject", "CloseObject", "SwitchOn", "SwitchOff"),
        RobotSpec.of(2, "GoToObject", "SwitchOn", "SwitchOff", "PickupObject", "PutObject", PickupObject=2.0),
    ),
    (
        _st("s1", 0, "close the laptop",
            "Sub-task s1: close the laptop. Runs in parallel with s2.",
            ("GoToObject", ("Laptop",), "go to the laptop"),
            ("CloseObject", ("Laptop",), "close its lid")),
        _st("s2", 0, "turn off the ceiling light",
            "Sub-task s2: switch off the ceiling light, in parallel with s1.",
            ("GoToObject", ("CeilingLight",), "go to the light"),
            ("SwitchOff", ("CeilingLight",), "switch it off")),
        _st("s3", 1, "make a coffee",
            "Sub-task s3: once the room is settled (phase 1), place the mug and start the coffee machine.",
            ("GoToObject", ("Mug",), "go to the mug"),
            ("PickupObject", ("Mug",), "pick up the mug (0.3 kg)"),
            ("GoToObject", ("CoffeeMachine",), "carry it to the coffee machine"),
            ("PutObject", ("Mug", "CoffeeMachine"), "place the mug in the machine"),
            ("SwitchOn", ("CoffeeMachine",), "start brewing")),
    ),
)

ALL_EXAMPLES = (LIGHTS_AND_TV, MAKE_TOAST, WASH_AND_DISCARD, MOVE_BOX, LAPTOP_LIGHT_COFFEE)

# One example per coalition case: single robots, a skill-union team, a capacity team.
DECOMPOSITION_EXAMPLES = ALL_EXAMPLES
COALITION_EXAMPLES = (LAPTOP_LIGHT_COFFEE, WASH_AND_DISCARD, MOVE_BOX)
# Parallel, sequential, hybrid and teamed plans.
ALLOCATION_EXAMPLES = (LIGHTS_AND_TV, MAKE_TOAST, LAPTOP_LIGHT_COFFEE, WASH_AND_DISCARD)
