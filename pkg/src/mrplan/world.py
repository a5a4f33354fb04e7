"""Symbolic household world: objects, receptacles, patrol regions, robot poses."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from mrplan.model import parse_robot_token, robot_token

ATTRIBUTES = ("is_on", "is_open", "is_sliced", "is_broken", "is_heated", "is_cooked", "is_washed")
AFFORDANCES = ("togglable", "openable", "sliceable", "breakable")
START = "start"


class FloorPlanError(ValueError):
    pass


@dataclass
class ObjectState:
    id: str
    type: str
    mass: float | None = None
    attributes: dict[str, bool] = field(default_factory=lambda: dict.fromkeys(ATTRIBUTES, False))
    parent_receptacle: str | None = None
    is_receptacle: bool = False
    togglable: bool = False
    openable: bool = False
    sliceable: bool = False
    breakable: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "type": self.type,
            "mass": self.mass,
            "attributes": {k: self.attributes[k] for k in ATTRIBUTES},
            "parent": self.parent_receptacle,
            "is_receptacle": self.is_receptacle,
            **{k: getattr(self, k) for k in AFFORDANCES},
        }


@dataclass
class Region:
    id: str
    area: float
    patrolled: bool = False
    assigned_visibility: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "area": self.area, "patrolled": self.patrolled,
                "assigned_visibility": self.assigned_visibility}


@dataclass
class RobotState:
    location: str = START
    holding: str | None = None


@dataclass(frozen=True)
class ReceptacleEffect:
    """Objects inside a switched-on receptacle of ``type`` gain ``attribute``."""

    type: str
    attribute: str

    def __post_init__(self):
        if self.attribute not in ATTRIBUTES:
            raise FloorPlanError(f"receptacle effect sets unknown attribute {self.attribute!r}")


@dataclass
class WorldState:
    objects: dict[str, ObjectState] = field(default_factory=dict)
    regions: dict[str, Region] = field(default_factory=dict)
    robot_state: dict[int, RobotState] = field(default_factory=dict)
    receptacle_effects: tuple[ReceptacleEffect, ...] = ()
    name: str = ""

    # -- lookups used by the validator
    def has_entity(self, entity_id: str) -> bool:
        return entity_id in self.objects or entity_id in self.regions

    def mass_of(self, entity_id: str) -> float | None:
        obj = self.objects.get(entity_id)
        return obj.mass if obj else None

    def area_of(self, entity_id: str) -> float | None:
        region = self.regions.get(entity_id)
        return region.area if region else None

    def place_robots(self, robot_ids) -> None:
        for rid in robot_ids:
            self.robot_state.setdefault(rid, RobotState())

    def holder_of(self, object_id: str) -> int | None:
        for rid, st in self.robot_state.items():
            if st.holding == object_id:
                return rid
        return None

    def contents(self, receptacle_id: str) -> list[str]:
        """All objects transitively inside ``receptacle_id``, in id order."""
        out: list[str] = []
        frontier = [receptacle_id]
        while frontier:
            parent = frontier.pop()
            children = sorted(o.id for o in self.objects.values() if o.parent_receptacle == parent)
            out.extend(children)
            frontier.extend(children)
        return sorted(out)

    def ancestors(self, object_id: str) -> list[str]:
        out = []
        cur = self.objects[object_id].parent_receptacle
        while cur is not None and cur in self.objects:
            out.append(cur)
            cur = self.objects[cur].parent_receptacle
        return out

    def attribute(self, entity_id: str, attribute: str):
        if entity_id in self.regions:
            region = self.regions[entity_id]
            if attribute == "patrolled":
                return region.patrolled
            raise KeyError(f"region {entity_id} has no attribute {attribute!r}")
        obj = self.objects[entity_id]
        if attribute == "parent_receptacle":
            return obj.parent_receptacle
        if attribute in obj.attributes:
            return obj.attributes[attribute]
        raise KeyError(f"object {entity_id} has no attribute {attribute!r}")

    def copy(self) -> "WorldState":
        return copy.deepcopy(self)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "objects": [self.objects[k].to_dict() for k in sorted(self.objects)],
            "regions": [self.regions[k].to_dict() for k in sorted(self.regions)],
            "robots": [
                {"id": rid, "location": st.location, "holding": st.holding}
                for rid, st in sorted(self.robot_state.items())
            ],
            "receptacle_effects": [{"type": e.type, "attribute": e.attribute} for e in self.receptacle_effects],
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "WorldState":
        return load_floorplan(doc)


def load_floorplan(source: dict[str, Any] | str | Path) -> WorldState:
    """Build a world from a floor-plan document (a dict, or a path to JSON).

    Robots listed under ``robots`` keep their saved pose; any robot added later
    via `WorldState.place_robots` starts at ``"start"`` holding nothing.
    """
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            doc = json.load(fh)
    else:
        doc = source
    if not isinstance(doc, dict) or "objects" not in doc:
        raise FloorPlanError("floor plan must be an object with an `objects` list")

    world = WorldState(name=doc.get("name", ""))
    for i, raw in enumerate(doc["objects"]):
        where = f"objects[{i}]"
        if not isinstance(raw, dict) or "id" not in raw or "type" not in raw:
            raise FloorPlanError(f"{where}: needs `id` and `type`")
        oid = raw["id"]
        if oid in world.objects:
            raise FloorPlanError(f"{where}: duplicate id {oid!r}")
        attrs = dict.fromkeys(ATTRIBUTES, False)
        for k, v in raw.get("attributes", {}).items():
            if k not in attrs:
                raise FloorPlanError(f"{where}.attributes: unknown attribute {k!r}")
            if not isinstance(v, bool):
                raise FloorPlanError(f"{where}.attributes.{k}: expected boolean")
            attrs[k] = v
        mass = raw.get("mass")
        if mass is not None and (not isinstance(mass, (int, float)) or mass < 0):
            raise FloorPlanError(f"{where}.mass: expected non-negative number")
        world.objects[oid] = ObjectState(
            id=oid,
            type=raw["type"],
            mass=float(mass) if mass is not None else None,
            attributes=attrs,
            parent_receptacle=raw.get("parent"),
            is_receptacle=bool(raw.get("is_receptacle", False)),
            **{k: bool(raw.get(k, False)) for k in AFFORDANCES},
        )
    for i, raw in enumerate(doc.get("regions", [])):
        rid = raw.get("id")
        if rid is None or "area" not in raw:
            raise FloorPlanError(f"regions[{i}]: needs `id` and `area`")
        if rid in world.regions or rid in world.objects:
            raise FloorPlanError(f"regions[{i}]: duplicate id {rid!r}")
        if raw["area"] < 0:
            raise FloorPlanError(f"regions[{i}].area: must be >= 0")
        world.regions[rid] = Region(rid, float(raw["area"]), bool(raw.get("patrolled", False)),
                                    float(raw.get("assigned_visibility", 0.0)))
    world.receptacle_effects = tuple(
        ReceptacleEffect(e["type"], e["attribute"]) for e in doc.get("receptacle_effects", [])
    )
    for raw in doc.get("robots", []):
        world.robot_state[int(raw["id"])] = RobotState(raw.get("location", START), raw.get("holding"))

    _check_containment(world)
    return world


def _check_containment(world: WorldState) -> None:
    for obj in world.objects.values():
        parent = obj.parent_receptacle
        if parent is None:
            continue
        rid = parse_robot_token(parent)
        if rid is not None:
            st = world.robot_state.get(rid)
            if st is None or st.holding != obj.id:
                raise FloorPlanError(f"{obj.id}: parent {parent} does not hold it")
            continue
        if parent not in world.objects:
            raise FloorPlanError(f"{obj.id}: parent {parent!r} does not exist")
    for obj in world.objects.values():
        seen = {obj.id}
        cur = obj.parent_receptacle
        while cur is not None and cur in world.objects:
            if cur in seen:
                raise FloorPlanError(f"containment cycle through {obj.id!r}")
            seen.add(cur)
            cur = world.objects[cur].parent_receptacle
    for rid, st in world.robot_state.items():
        if st.holding is not None:
            held = world.objects.get(st.holding)
            if held is None or held.parent_receptacle != robot_token(rid):
                raise FloorPlanError(f"robot{rid} holds {st.holding!r} but the object disagrees")
