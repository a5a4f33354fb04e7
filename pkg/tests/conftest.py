import os
import socket

import pytest
from hypothesis import HealthCheck, settings

from mrplan.bench import load_dataset
from mrplan.world import load_floorplan

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_collection_modifyitems(config, items):
    if os.environ.get("MRPLAN_LIVE"):
        return
    skip = pytest.mark.skip(reason="set MRPLAN_LIVE=1 to run live backend tests")
    for item in items:
        if "live" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(autouse=True)
def no_network(request, monkeypatch):
    """Outside live tests, any attempt to open a socket fails the test."""
    if "live" in request.keywords:
        return

    def guard(*args, **kwargs):
        raise RuntimeError("network access attempted during an offline test")

    monkeypatch.setattr(socket.socket, "connect", guard)
    monkeypatch.setattr(socket, "create_connection", guard)


@pytest.fixture(scope="session")
def manifest():
    return load_dataset()


LAMPS_TV_FLOORPLAN = {
    "name": "lamps_tv_living",
    "objects": [
        {"id": "Desk", "type": "Desk", "is_receptacle": True},
        {"id": "DeskLamp", "type": "DeskLamp", "parent": "Desk", "togglable": True, "attributes": {"is_on": True}},
        {"id": "FloorLamp", "type": "FloorLamp", "togglable": True, "attributes": {"is_on": True}},
        {"id": "Television", "type": "Television", "togglable": True},
    ],
}


@pytest.fixture
def lamps_tv_world():
    return load_floorplan(LAMPS_TV_FLOORPLAN)


KITCHEN = {
    "name": "test_kitchen",
    "objects": [
        {"id": "CounterTop", "type": "CounterTop", "is_receptacle": True},
        {"id": "Fridge", "type": "Fridge", "is_receptacle": True, "openable": True},
        {"id": "Microwave", "type": "Microwave", "is_receptacle": True, "togglable": True, "openable": True},
        {"id": "StoveBurner", "type": "StoveBurner", "is_receptacle": True, "togglable": True},
        {"id": "Pan", "type": "Pan", "mass": 1.5, "parent": "CounterTop", "is_receptacle": True},
        {"id": "Apple", "type": "Apple", "mass": 0.2, "parent": "Fridge", "sliceable": True},
        {"id": "Egg", "type": "Egg", "mass": 0.1, "parent": "CounterTop", "breakable": True},
        {"id": "Couch", "type": "Sofa", "mass": 40.0, "is_receptacle": True},
        {"id": "Crate", "type": "Box", "mass": 8.0, "is_receptacle": True},
        {"id": "Lamp", "type": "DeskLamp", "togglable": True, "attributes": {"is_on": True}},
    ],
    "regions": [{"id": "RegionA", "area": 12.0}, {"id": "RegionB", "area": 8.0}],
    "receptacle_effects": [
        {"type": "Microwave", "attribute": "is_heated"},
        {"type": "StoveBurner", "attribute": "is_cooked"},
    ],
}


@pytest.fixture
def kitchen():
    return load_floorplan(KITCHEN)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
