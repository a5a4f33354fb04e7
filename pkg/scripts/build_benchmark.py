"""Generate the shipped benchmark under src/mrplan/data/benchmark.

Floor plans and tasks are authored here as data. Ground-truth decompositions
are written in the decomposition DSL; capacity demands are filled in from the
floor plan before the task files are written. Run from the repo root:

    python3 scripts/build_benchmark.py [--out DIR]
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

from mrplan import dsl
from mrplan.bench import load_dataset, validate_dataset
from mrplan.coalition import with_demands
from mrplan.metrics import GroundTruth
from mrplan.model import GoalCondition, RobotSpec
from mrplan.world import load_floorplan

ROOT = Path(__file__).resolve().parents[1]
DEFAULT_OUT = ROOT / "src" / "mrplan" / "data" / "benchmark"


def obj(id, type=None, mass=None, parent=None, rec=False, attrs=None, **flags):
    d = {"id": id, "type": type or id}
    if mass is not None:
        d["mass"] = mass
    if parent:
        d["parent"] = parent
    if rec:
        d["is_receptacle"] = True
    if attrs:
        d["attributes"] = attrs
    d.update(flags)
    return d


FLOORPLANS = {
    "kitchen_a": {
        "objects": [
            obj("CounterTop", rec=True),
            obj("DiningTable", rec=True),
            obj("Fridge", rec=True, openable=True),
            obj("Microwave", rec=True, openable=True, togglable=True),
            obj("StoveBurner", rec=True, togglable=True),
            obj("Sink", rec=True, togglable=True),
            obj("CoffeeMachine", rec=True, togglable=True),
            obj("Toaster", rec=True, togglable=True),
            obj("GarbageCan", rec=True),
            obj("Cabinet", rec=True, openable=True),
            obj("Apple", mass=0.2, parent="CounterTop", sliceable=True),
            obj("Tomato", mass=0.2, parent="CounterTop", sliceable=True),
            obj("Bread", mass=0.4, parent="CounterTop", sliceable=True),
            obj("Potato", mass=0.3, parent="CounterTop"),
            obj("Lettuce", mass=0.5, parent="Fridge", sliceable=True),
            obj("Egg", mass=0.1, parent="Fridge", breakable=True),
            obj("Pan", mass=1.5, parent="CounterTop", rec=True),
            obj("Plate", mass=0.5, parent="DiningTable", rec=True),
            obj("Bowl", mass=0.4, parent="CounterTop", rec=True),
            obj("Mug", mass=0.3, parent="DiningTable"),
            obj("Knife", mass=0.2, parent="CounterTop"),
            obj("Watermelon", mass=9.0, sliceable=True),
        ],
        "receptacle_effects": [
            {"type": "Microwave", "attribute": "is_heated"},
            {"type": "Toaster", "attribute": "is_heated"},
            {"type": "StoveBurner", "attribute": "is_cooked"},
            {"type": "Sink", "attribute": "is_washed"},
        ],
    },
    "living_a": {
        "objects": [
            obj("Sofa", mass=40.0, rec=True),
            obj("ArmChair", mass=15.0, rec=True),
            obj("CoffeeTable", mass=12.0, rec=True),
            obj("Shelf", rec=True),
            obj("Desk", rec=True),
            obj("TVStand", rec=True),
            obj("GarbageCan", rec=True),
            obj("Box", mass=9.0, rec=True),
            obj("Television", mass=8.0, parent="TVStand", togglable=True),
            obj("FloorLamp", mass=3.0, togglable=True, attrs={"is_on": True}),
            obj("DeskLamp", mass=1.0, parent="Desk", togglable=True, attrs={"is_on": True}),
            obj("CeilingLight", togglable=True, attrs={"is_on": True}),
            obj("Laptop", mass=2.0, parent="Desk", openable=True, togglable=True,
                attrs={"is_open": True, "is_on": True}),
            obj("Book", mass=0.5, parent="CoffeeTable", openable=True),
            obj("RemoteControl", mass=0.2, parent="Sofa"),
            obj("Newspaper", mass=0.3, parent="Sofa"),
            obj("Pillow", mass=0.4, parent="Sofa"),
            obj("Vase", mass=1.0, parent="Shelf", breakable=True),
            obj("Statue", mass=3.0, parent="Shelf", breakable=True),
            obj("Blinds", openable=True, attrs={"is_open": True}),
            obj("HousePlant", mass=4.0),
        ],
        "receptacle_effects": [],
    },
    "bedroom_a": {
        "objects": [
            obj("Bed", rec=True),
            obj("Dresser", rec=True),
            obj("Drawer", parent="Dresser", rec=True, openable=True),
            obj("Desk", rec=True),
            obj("Bookshelf", rec=True),
            obj("LaundryHamper", rec=True),
            obj("GarbageCan", rec=True),
            obj("DeskLamp", mass=1.0, parent="Desk", togglable=True),
            obj("CeilingLight", togglable=True),
            obj("AlarmClock", mass=0.5, parent="Dresser", togglable=True, attrs={"is_on": True}),
            obj("CellPhone", mass=0.2, parent="Bed", togglable=True, attrs={"is_on": True}),
            obj("Laptop", mass=2.0, parent="Desk", openable=True, togglable=True),
            obj("Book", mass=0.5, parent="Bed", openable=True),
            obj("Pillow", mass=0.4, parent="Bed"),
            obj("Cloth", mass=0.1, parent="Desk"),
            obj("Blinds", openable=True),
            obj("Mirror"),
            obj("Dumbbell", mass=10.0),
        ],
        "receptacle_effects": [],
    },
    "bathroom_a": {
        "objects": [
            obj("Toilet", rec=True, openable=True),
            obj("Sink", rec=True, togglable=True),
            obj("Bathtub", rec=True, togglable=True),
            obj("TowelHolder", rec=True),
            obj("Cabinet", rec=True, openable=True),
            obj("GarbageCan", rec=True),
            obj("SoapBar", mass=0.2, parent="Cabinet"),
            obj("Towel", mass=0.4, parent="TowelHolder"),
            obj("HandTowel", mass=0.2, parent="TowelHolder"),
            obj("ToiletPaper", mass=0.2, parent="Toilet"),
            obj("SprayBottle", mass=0.5, parent="Toilet"),
            obj("Cloth", mass=0.1, parent="Bathtub"),
            obj("Mirror"),
            obj("ShowerCurtain", openable=True),
            obj("CeilingLight", togglable=True, attrs={"is_on": True}),
        ],
        "receptacle_effects": [
            {"type": "Sink", "attribute": "is_washed"},
            {"type": "Bathtub", "attribute": "is_washed"},
        ],
    },
    "patrol_a": {
        "objects": [],
        "regions": [{"id": "RegionA", "area": 12.0}, {"id": "RegionB", "area": 8.0}],
    },
    "patrol_b": {
        "objects": [],
        "regions": [
            {"id": "Lobby", "area": 20.0},
            {"id": "Corridor", "area": 10.0},
            {"id": "Garage", "area": 16.0},
            {"id": "Office", "area": 6.0},
        ],
    },
}

# Robot archetypes: skill lists, with PickupObject/Patrol capacity passed per robot.
_MANIP = ("GoToObject", "PickupObject", "PutObject")
KINDS = {
    "all": _MANIP + ("SwitchOn", "SwitchOff", "OpenObject", "CloseObject", "SliceObject",
                     "CleanObject", "BreakObject", "ThrowObject"),
    "switch": ("GoToObject", "SwitchOn", "SwitchOff"),
    "grasp": _MANIP + ("OpenObject", "CloseObject"),
    "cut": _MANIP + ("SliceObject",),
    "clean": ("GoToObject", "CleanObject", "SwitchOn", "SwitchOff"),
    "smash": _MANIP + ("BreakObject", "ThrowObject"),
    "helper": _MANIP + ("SwitchOn", "SwitchOff", "OpenObject", "CloseObject"),
    "home": ("GoToObject", "SwitchOn", "SwitchOff", "OpenObject", "CloseObject"),
    "patrol": ("GoToLocation", "Patrol"),
}


def robots(*specs) -> list[RobotSpec]:
    """specs: kind or (kind, capacity); ids are assigned 1..n in order."""
    out = []
    for i, spec in enumerate(specs, 1):
        kind, cap = spec if isinstance(spec, tuple) else (spec, None)
        skills = KINDS[kind]
        caps = {}
        if "PickupObject" in skills:
            caps["PickupObject"] = 5.0 if cap is None else cap
        if "Patrol" in skills:
            caps["Patrol"] = cap
        out.append(RobotSpec.of(i, *skills, **caps))
    return out


def g(object_id, attribute, expected=True):
    return GoalCondition(object_id, attribute, expected)


# (id, category, floorplan, instruction, robots, gt_phase_count, goals, decomposition)
TASKS = [
    # -- elemental ---------------------------------------------------------------
    ("el01", "elemental", "living_a", "Turn off the desk lamp.", robots("all"), 1,
     [g("DeskLamp", "is_on", False)], """
     subtask s1 phase 0 "turn off the desk lamp" { GoToObject(DeskLamp); SwitchOff(DeskLamp); }
     """),
    ("el02", "elemental", "kitchen_a", "Slice the apple.", robots("all"), 1,
     [g("Apple", "is_sliced")], """
     subtask s1 phase 0 "slice the apple" { GoToObject(Apple); SliceObject(Apple); }
     """),
    ("el03", "elemental", "living_a", "Put the remote control on the coffee table.", robots("all"), 1,
     [g("RemoteControl", "parent_receptacle", "CoffeeTable")], """
     subtask s1 phase 0 "move the remote to the coffee table" {
       GoToObject(RemoteControl); PickupObject(RemoteControl);
       GoToObject(CoffeeTable); PutObject(RemoteControl, CoffeeTable);
     }
     """),
    ("el04", "elemental", "kitchen_a", "Wash the mug.", robots("all"), 1,
     [g("Mug", "is_washed")], """
     subtask s1 phase 0 "clean the mug" { GoToObject(Mug); CleanObject(Mug); }
     """),
    ("el05", "elemental", "living_a", "Shut down the laptop and close it.", robots("all"), 1,
     [g("Laptop", "is_on", False), g("Laptop", "is_open", False)], """
     subtask s1 phase 0 "switch off and close the laptop" {
       GoToObject(Laptop); SwitchOff(Laptop); CloseObject(Laptop);
     }
     """),
    ("el06", "elemental", "patrol_b", "Patrol the corridor.", robots(("patrol", 12.0)), 1,
     [g("Corridor", "patrolled")], """
     subtask s1 phase 0 "patrol the corridor" { GoToLocation(Corridor); Patrol(Corridor); }
     """),
    # -- simple ---------------------------------------------------------------------
    ("sm01", "simple", "living_a", "Turn off the desk lamp and the floor lamp.",
     robots("switch", "switch"), 1,
     [g("DeskLamp", "is_on", False), g("FloorLamp", "is_on", False)], """
     subtask s1 phase 0 "turn off the desk lamp" { GoToObject(DeskLamp); SwitchOff(DeskLamp); }
     subtask s2 phase 0 "turn off the floor lamp" { GoToObject(FloorLamp); SwitchOff(FloorLamp); }
     """),
    ("sm02", "simple", "kitchen_a", "Slice the apple, the tomato and the bread.",
     robots("cut", "cut", "cut"), 1,
     [g("Apple", "is_sliced"), g("Tomato", "is_sliced"), g("Bread", "is_sliced")], """
     subtask s1 phase 0 "slice the apple" { GoToObject(Apple); SliceObject(Apple); }
     subtask s2 phase 0 "slice the tomato" { GoToObject(Tomato); SliceObject(Tomato); }
     subtask s3 phase 0 "slice the bread" { GoToObject(Bread); SliceObject(Bread); }
     """),
    ("sm03", "simple", "kitchen_a", "Heat the potato in the microwave.",
     robots("helper", "helper"), 2,
     [g("Potato", "is_heated"), g("Potato", "parent_receptacle", "Microwave")], """
     subtask s1 phase 0 "put the potato in the microwave" {
       GoToObject(Potato); PickupObject(Potato); GoToObject(Microwave);
       OpenObject(Microwave); PutObject(Potato, Microwave);
     }
     subtask s2 phase 1 "close the microwave and start it" {
       GoToObject(Microwave); CloseObject(Microwave); SwitchOn(Microwave);
     }
     """),
    ("sm04", "simple", "bedroom_a", "This bedroom is too dimly lit.",
     robots("home", "home", "home"), 1,
     [g("Blinds", "is_open"), g("DeskLamp", "is_on"), g("CeilingLight", "is_on")], """
     subtask s1 phase 0 "open the blinds" { GoToObject(Blinds); OpenObject(Blinds); }
     subtask s2 phase 0 "turn on the desk lamp" { GoToObject(DeskLamp); SwitchOn(DeskLamp); }
     subtask s3 phase 0 "turn on the ceiling light" { GoToObject(CeilingLight); SwitchOn(CeilingLight); }
     """),
    ("sm05", "simple", "bathroom_a", "Put the soap bar in the sink and rinse it.",
     robots("helper", "helper"), 2,
     [g("SoapBar", "parent_receptacle", "Sink"), g("SoapBar", "is_washed")], """
     subtask s1 phase 0 "take the soap from the cabinet to the sink" {
       GoToObject(Cabinet); OpenObject(Cabinet); GoToObject(SoapBar); PickupObject(SoapBar);
       GoToObject(Sink); PutObject(SoapBar, Sink);
     }
     subtask s2 phase 1 "run the water" { GoToObject(Sink); SwitchOn(Sink); }
     """),
    ("sm06", "simple", "living_a", "Turn off all the lights in the living room.",
     robots("switch", "switch", "switch"), 1,
     [g("CeilingLight", "is_on", False), g("FloorLamp", "is_on", False), g("DeskLamp", "is_on", False)], """
     subtask s1 phase 0 "turn off the ceiling light" { GoToObject(CeilingLight); SwitchOff(CeilingLight); }
     subtask s2 phase 0 "turn off the floor lamp" { GoToObject(FloorLamp); SwitchOff(FloorLamp); }
     subtask s3 phase 0 "turn off the desk lamp" { GoToObject(DeskLamp); SwitchOff(DeskLamp); }
     """),
    ("sm07", "simple", "patrol_b", "Patrol the lobby and the garage.",
     robots(("patrol", 20.0), ("patrol", 20.0)), 1,
     [g("Lobby", "patrolled"), g("Garage", "patrolled")], """
     subtask s1 phase 0 "patrol the lobby" { GoToLocation(Lobby); Patrol(Lobby); }
     subtask s2 phase 0 "patrol the garage" { GoToLocation(Garage); Patrol(Garage); }
     """),
    ("sm08", "simple", "kitchen_a", "Cook an egg in the pan.",
     robots("helper", "helper"), 3,
     [g("Egg", "is_cooked"), g("Egg", "parent_receptacle", "Pan"), g("Pan", "parent_receptacle", "StoveBurner")], """
     subtask s1 phase 0 "put the pan on the stove" {
       GoToObject(Pan); PickupObject(Pan); GoToObject(StoveBurner); PutObject(Pan, StoveBurner);
     }
     subtask s2 phase 1 "take an egg from the fridge into the pan" {
       GoToObject(Fridge); OpenObject(Fridge); GoToObject(Egg); PickupObject(Egg);
       GoToObject(Pan); PutObject(Egg, Pan); GoToObject(Fridge); CloseObject(Fridge);
     }
     subtask s3 phase 2 "turn on the stove" { GoToObject(StoveBurner); SwitchOn(StoveBurner); }
     """),
    # -- compound -----------------------------------------------------------------
    ("cp01", "compound", "living_a", "Turn off the floor lamp and put the book on the shelf.",
     robots("switch", "grasp"), 1,
     [g("FloorLamp", "is_on", False), g("Book", "parent_receptacle", "Shelf")], """
     subtask s1 phase 0 "turn off the floor lamp" { GoToObject(FloorLamp); SwitchOff(FloorLamp); }
     subtask s2 phase 0 "shelve the book" {
       GoToObject(Book); PickupObject(Book); GoToObject(Shelf); PutObject(Book, Shelf);
     }
     """),
    ("cp02", "compound", "kitchen_a", "Make toast.",
     robots("cut", "helper"), 2,
     [g("Bread", "is_sliced"), g("Bread", "is_heated")], """
     subtask s1 phase 0 "slice the bread" { GoToObject(Bread); SliceObject(Bread); }
     subtask s2 phase 1 "toast the bread" {
       GoToObject(Bread); PickupObject(Bread); GoToObject(Toaster);
       PutObject(Bread, Toaster); SwitchOn(Toaster);
     }
     """),
    ("cp03", "compound", "living_a", "Smash the vase and throw the newspaper in the garbage can.",
     robots("smash", "grasp"), 1,
     [g("Vase", "is_broken"), g("Newspaper", "parent_receptacle", "GarbageCan")], """
     subtask s1 phase 0 "break the vase" { GoToObject(Vase); BreakObject(Vase); }
     subtask s2 phase 0 "throw away the newspaper" {
       GoToObject(Newspaper); PickupObject(Newspaper); GoToObject(GarbageCan);
       PutObject(Newspaper, GarbageCan);
     }
     """),
    ("cp04", "compound", "bedroom_a",
     "Turn on the desk lamp, open the laptop and put the cell phone in the drawer.",
     robots("switch", "grasp", "grasp"), 1,
     [g("DeskLamp", "is_on"), g("Laptop", "is_open"), g("CellPhone", "parent_receptacle", "Drawer")], """
     subtask s1 phase 0 "turn on the desk lamp" { GoToObject(DeskLamp); SwitchOn(DeskLamp); }
     subtask s2 phase 0 "open the laptop" { GoToObject(Laptop); OpenObject(Laptop); }
     subtask s3 phase 0 "put the phone in the drawer" {
       GoToObject(Drawer); OpenObject(Drawer); GoToObject(CellPhone); PickupObject(CellPhone);
       GoToObject(Drawer); PutObject(CellPhone, Drawer); CloseObject(Drawer);
     }
     """),
    ("cp05", "compound", "kitchen_a", "Slice the lettuce and the tomato, then put the tomato in the bowl.",
     robots("all", "cut", "grasp"), 2,
     [g("Lettuce", "is_sliced"), g("Tomato", "is_sliced"), g("Tomato", "parent_receptacle", "Bowl")], """
     subtask s1 phase 0 "slice the lettuce in the fridge" {
       GoToObject(Fridge); OpenObject(Fridge); GoToObject(Lettuce); SliceObject(Lettuce);
     }
     subtask s2 phase 0 "slice the tomato" { GoToObject(Tomato); SliceObject(Tomato); }
     subtask s3 phase 1 "put the tomato in the bowl" {
       GoToObject(Tomato); PickupObject(Tomato); GoToObject(Bowl); PutObject(Tomato, Bowl);
     }
     """),
    ("cp06", "compound", "bathroom_a", "Clean the mirror and put the towel in the bathtub.",
     robots("clean", "grasp"), 1,
     [g("Mirror", "is_washed"), g("Towel", "parent_receptacle", "Bathtub")], """
     subtask s1 phase 0 "clean the mirror" { GoToObject(Mirror); CleanObject(Mirror); }
     subtask s2 phase 0 "put the towel in the bathtub" {
       GoToObject(Towel); PickupObject(Towel); GoToObject(Bathtub); PutObject(Towel, Bathtub);
     }
     """),
    ("cp07", "compound", "kitchen_a", "Put the apple in the fridge and turn on the coffee machine.",
     robots("grasp", "switch"), 1,
     [g("Apple", "parent_receptacle", "Fridge"), g("CoffeeMachine", "is_on")], """
     subtask s1 phase 0 "store the apple in the fridge" {
       GoToObject(Apple); PickupObject(Apple); GoToObject(Fridge); OpenObject(Fridge);
       PutObject(Apple, Fridge); CloseObject(Fridge);
     }
     subtask s2 phase 0 "start the coffee machine" { GoToObject(CoffeeMachine); SwitchOn(CoffeeMachine); }
     """),
    ("cp08", "compound", "living_a", "Turn off the ceiling light and close the blinds, then watch TV.",
     robots("switch", "grasp"), 2,
     [g("CeilingLight", "is_on", False), g("Blinds", "is_open", False), g("Television", "is_on")], """
     subtask s1 phase 0 "turn off the ceiling light" { GoToObject(CeilingLight); SwitchOff(CeilingLight); }
     subtask s2 phase 0 "close the blinds" { GoToObject(Blinds); CloseObject(Blinds); }
     subtask s3 phase 1 "turn on the television" { GoToObject(Television); SwitchOn(Television); }
     """),
    ("cp09", "compound", "bedroom_a",
     "Put the book on the bookshelf, switch off the alarm clock and turn on the ceiling light.",
     robots("switch", "grasp", "switch"), 1,
     [g("Book", "parent_receptacle", "Bookshelf"), g("AlarmClock", "is_on", False), g("CeilingLight", "is_on")], """
     subtask s1 phase 0 "shelve the book" {
       GoToObject(Book); PickupObject(Book); GoToObject(Bookshelf); PutObject(Book, Bookshelf);
     }
     subtask s2 phase 0 "switch off the alarm clock" { GoToObject(AlarmClock); SwitchOff(AlarmClock); }
     subtask s3 phase 0 "turn on the ceiling light" { GoToObject(CeilingLight); SwitchOn(CeilingLight); }
     """),
    ("cp10", "compound", "kitchen_a", "Make a coffee.",
     robots("grasp", "switch"), 2,
     [g("Mug", "parent_receptacle", "CoffeeMachine"), g("CoffeeMachine", "is_on")], """
     subtask s1 phase 0 "place the mug in the coffee machine" {
       GoToObject(Mug); PickupObject(Mug); GoToObject(CoffeeMachine); PutObject(Mug, CoffeeMachine);
     }
     subtask s2 phase 1 "start brewing" { GoToObject(CoffeeMachine); SwitchOn(CoffeeMachine); }
     """),
    ("cp11", "compound", "bathroom_a", "Put the spray bottle in the cabinet and wash the cloth in the bathtub.",
     robots("grasp", "clean"), 1,
     [g("SprayBottle", "parent_receptacle", "Cabinet"), g("Cloth", "is_washed")], """
     subtask s1 phase 0 "put the spray bottle away" {
       GoToObject(SprayBottle); PickupObject(SprayBottle); GoToObject(Cabinet);
       OpenObject(Cabinet); PutObject(SprayBottle, Cabinet); CloseObject(Cabinet);
     }
     subtask s2 phase 0 "run the bathtub to wash the cloth" { GoToObject(Bathtub); SwitchOn(Bathtub); }
     """),
    ("cp12", "compound", "living_a",
     "Break the statue and turn off the desk lamp, then put the pillow on the armchair.",
     robots("smash", "switch", "grasp"), 2,
     [g("Statue", "is_broken"), g("DeskLamp", "is_on", False), g("Pillow", "parent_receptacle", "ArmChair")], """
     subtask s1 phase 0 "break the statue" { GoToObject(Statue); BreakObject(Statue); }
     subtask s2 phase 0 "turn off the desk lamp" { GoToObject(DeskLamp); SwitchOff(DeskLamp); }
     subtask s3 phase 1 "move the pillow to the armchair" {
       GoToObject(Pillow); PickupObject(Pillow); GoToObject(ArmChair); PutObject(Pillow, ArmChair);
     }
     """),
    ("cp13", "compound", "kitchen_a",
     "Get the kitchen ready: slice the apple, turn on the toaster, wash the plate and open the fridge.",
     robots("cut", "switch", "clean", "grasp"), 1,
     [g("Apple", "is_sliced"), g("Toaster", "is_on"), g("Plate", "is_washed"), g("Fridge", "is_open")], """
     subtask s1 phase 0 "slice the apple" { GoToObject(Apple); SliceObject(Apple); }
     subtask s2 phase 0 "turn on the toaster" { GoToObject(Toaster); SwitchOn(Toaster); }
     subtask s3 phase 0 "wash the plate" { GoToObject(Plate); CleanObject(Plate); }
     subtask s4 phase 0 "open the fridge" { GoToObject(Fridge); OpenObject(Fridge); }
     """),
    ("cp14", "compound", "bedroom_a", "Put the cloth in the laundry hamper and clean the mirror.",
     robots("clean", "grasp"), 1,
     [g("Cloth", "parent_receptacle", "LaundryHamper"), g("Mirror", "is_washed")], """
     subtask s1 phase 0 "put the cloth in the hamper" {
       GoToObject(Cloth); PickupObject(Cloth); GoToObject(LaundryHamper); PutObject(Cloth, LaundryHamper);
     }
     subtask s2 phase 0 "clean the mirror" { GoToObject(Mirror); CleanObject(Mirror); }
     """),
    # -- complex --------------------------------------------------------------------
    ("cx01", "complex", "living_a", "Put the box on the coffee table and turn off the floor lamp.",
     robots("grasp", "grasp", "switch"), 1,
     [g("Box", "parent_receptacle", "CoffeeTable"), g("FloorLamp", "is_on", False)], """
     subtask s1 phase 0 "carry the heavy box to the coffee table" {
       GoToObject(Box); PickupObject(Box); GoToObject(CoffeeTable); PutObject(Box, CoffeeTable);
     }
     subtask s2 phase 0 "turn off the floor lamp" { GoToObject(FloorLamp); SwitchOff(FloorLamp); }
     """),
    ("cx02", "complex", "patrol_a", "Patrol region A and region B.",
     robots(("patrol", 5.0), ("patrol", 8.0), ("patrol", 8.0), ("patrol", 4.0)), 1,
     [g("RegionA", "patrolled"), g("RegionB", "patrolled")], """
     subtask s1 phase 0 "patrol region A" { GoToLocation(RegionA); Patrol(RegionA); }
     subtask s2 phase 0 "patrol region B" { GoToLocation(RegionB); Patrol(RegionB); }
     """),
    ("cx03", "complex", "kitchen_a", "Wash the plate in the sink and slice the watermelon.",
     robots(("grasp", 3.0), "switch", "cut"), 1,
     [g("Plate", "is_washed"), g("Plate", "parent_receptacle", "Sink"), g("Watermelon", "is_sliced")], """
     subtask s1 phase 0 "wash the plate in the sink" {
       GoToObject(Plate); PickupObject(Plate); GoToObject(Sink); PutObject(Plate, Sink); SwitchOn(Sink);
     }
     subtask s2 phase 0 "slice the watermelon" { GoToObject(Watermelon); SliceObject(Watermelon); }
     """),
    ("cx04", "complex", "living_a", "Put the statue in the box and turn off the ceiling light.",
     robots(("grasp", 2.0), ("grasp", 2.0), "switch"), 1,
     [g("Statue", "parent_receptacle", "Box"), g("CeilingLight", "is_on", False)], """
     subtask s1 phase 0 "put the statue in the box" {
       GoToObject(Statue); PickupObject(Statue); GoToObject(Box); PutObject(Statue, Box);
     }
     subtask s2 phase 0 "turn off the ceiling light" { GoToObject(CeilingLight); SwitchOff(CeilingLight); }
     """),
    ("cx05", "complex", "bedroom_a", "Put the dumbbell on the bookshelf, then turn on the desk lamp.",
     robots(("helper", 4.0), ("helper", 4.0), ("helper", 4.0)), 2,
     [g("Dumbbell", "parent_receptacle", "Bookshelf"), g("DeskLamp", "is_on")], """
     subtask s1 phase 0 "lift the dumbbell onto the bookshelf" {
       GoToObject(Dumbbell); PickupObject(Dumbbell); GoToObject(Bookshelf); PutObject(Dumbbell, Bookshelf);
     }
     subtask s2 phase 1 "turn on the desk lamp" { GoToObject(DeskLamp); SwitchOn(DeskLamp); }
     """),
    ("cx06", "complex", "bathroom_a", "Wash the hand towel in the sink and open the shower curtain.",
     robots(("grasp", 3.0), "clean", ("grasp", 3.0)), 1,
     [g("HandTowel", "is_washed"), g("ShowerCurtain", "is_open")], """
     subtask s1 phase 0 "wash the hand towel in the sink" {
       GoToObject(HandTowel); PickupObject(HandTowel); GoToObject(Sink);
       PutObject(HandTowel, Sink); SwitchOn(Sink);
     }
     subtask s2 phase 0 "open the shower curtain" { GoToObject(ShowerCurtain); OpenObject(ShowerCurtain); }
     """),
    ("cx07", "complex", "kitchen_a", "Put the watermelon in the fridge and slice the bread, then toast it.",
     robots("helper", "helper", ("cut", 3.0)), 2,
     [g("Watermelon", "parent_receptacle", "Fridge"), g("Bread", "is_sliced"), g("Bread", "is_heated")], """
     subtask s1 phase 0 "carry the watermelon into the fridge" {
       GoToObject(Fridge); OpenObject(Fridge); GoToObject(Watermelon); PickupObject(Watermelon);
       GoToObject(Fridge); PutObject(Watermelon, Fridge); CloseObject(Fridge);
     }
     subtask s2 phase 0 "slice the bread" { GoToObject(Bread); SliceObject(Bread); }
     subtask s3 phase 1 "toast the bread" {
       GoToObject(Bread); PickupObject(Bread); GoToObject(Toaster); PutObject(Bread, Toaster); SwitchOn(Toaster);
     }
     """),
    ("cx08", "complex", "patrol_b", "Patrol the whole building.",
     robots(("patrol", 10.0), ("patrol", 10.0), ("patrol", 16.0), ("patrol", 6.0)), 2,
     [g("Lobby", "patrolled"), g("Corridor", "patrolled"), g("Garage", "patrolled"), g("Office", "patrolled")], """
     subtask s1 phase 0 "patrol the lobby" { GoToLocation(Lobby); Patrol(Lobby); }
     subtask s2 phase 0 "patrol the corridor" { GoToLocation(Corridor); Patrol(Corridor); }
     subtask s3 phase 1 "patrol the garage" { GoToLocation(Garage); Patrol(Garage); }
     subtask s4 phase 1 "patrol the office" { GoToLocation(Office); Patrol(Office); }
     """),
]


def build(out: Path) -> None:
    if out.exists():
        shutil.rmtree(out)
    (out / "floorplans").mkdir(parents=True)
    (out / "tasks").mkdir()
    worlds = {}
    for name, doc in FLOORPLANS.items():
        doc = {"name": name, "regions": [], "receptacle_effects": [], **doc}
        worlds[name] = load_floorplan(doc)
        (out / "floorplans" / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")
    paths = []
    for tid, category, fp, instruction, robot_list, phases, goals, text in TASKS:
        decomp = with_demands(dsl.parse_decomposition("decomposition {" + text + "}"), worlds[fp])
        doc = {
            "id": tid,
            "category": category,
            "instruction": instruction,
            "floorplan": f"floorplans/{fp}.json",
            "robots": [r.to_dict() for r in robot_list],
            "ground_truth": GroundTruth(tuple(goals), phases, len(decomp)).to_dict(),
            "gt_decomposition": decomp.to_dict(),
        }
        path = f"tasks/{tid}.json"
        (out / path).write_text(json.dumps(doc, indent=2) + "\n")
        paths.append(path)
    manifest = {"name": "mrplan-household-36", "tasks": paths}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args(argv)
    build(args.out)
    manifest = load_dataset(args.out)
    issues = validate_dataset(manifest)
    for issue in issues:
        print(f"{issue.severity}: {issue.location}: {issue.message} [{issue.code}]")
    print(f"wrote {len(manifest.tasks)} tasks to {args.out}; counts {manifest.counts}")
    return 1 if any(i.severity == "error" for i in issues) else 0


if __name__ == "__main__":
    sys.exit(main())
