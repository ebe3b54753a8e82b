"""Shared fixtures: scenario paths, a cached perfect-pilot run, builders."""

import copy
import json
import os

import pytest

from bridgesim.scenario import load_scenario, scenario_from_dict
from bridgesim.session import SessionConfig, SessionMode, load_pilot, run

HERE = os.path.dirname(__file__)
ROOT = os.path.dirname(HERE)
SCENARIO_PATH = os.path.join(ROOT, "scenarios", "twin_bridges.json")
PILOT_PATH = os.path.join(ROOT, "scenarios", "perfect_pilot.json")
FIXTURES = os.path.join(HERE, "fixtures")


def load_fixture(name):
    with open(os.path.join(FIXTURES, name), "r", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def twin_bridges():
    return load_scenario(SCENARIO_PATH)


@pytest.fixture(scope="session")
def twin_bridges_doc():
    with open(SCENARIO_PATH, "r", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def perfect_run(tmp_path_factory):
    """One full perfect-pilot session, shared across the suite."""
    scenario = load_scenario(SCENARIO_PATH)
    pilot = load_pilot(scenario, PILOT_PATH)
    log_path = str(tmp_path_factory.mktemp("perfect") / "session.jsonl")
    config = SessionConfig(
        scenario=scenario,
        mode=SessionMode.SCRIPTED,
        seed=scenario.seed,
        participant_id="fixture",
        log_path=log_path,
    )
    outcome = run(config, pilot)
    return outcome, log_path


def tiny_scenario_doc(**overrides):
    """Minimal valid scenario; tests tweak a deep copy of it."""
    doc = {
        "version": 1,
        "name": "tiny",
        "seed": 3,
        "ground_station": [-10.0, 0.0, 0.01],
        "elements": [
            {
                "id": "ground",
                "kind": "terrain",
                "crashable": True,
                "shape": {"type": "box", "min": [-20.0, -20.0, -1.0], "max": [20.0, 20.0, 0.0]},
            },
            {
                "id": "slab",
                "kind": "slab",
                "crashable": True,
                "shape": {"type": "box", "min": [5.0, -2.0, 4.0], "max": [15.0, 2.0, 5.0]},
            },
        ],
        "tasks": [
            {
                "id": 1,
                "name": "slab face",
                "points": [[5.0, 3.5, 4.5], [15.0, 3.5, 4.5]],
                "corridor_m": 2.0,
                "recommended_distance_m": [1.0, 2.5],
                "speed_limit": "10 mph",
            }
        ],
        "defects": [
            {"id": "d1", "position": [10.0, 2.0, 4.5], "host": "slab", "defect_kind": "crack"}
        ],
        "wind": {"level": "none", "direction": [1.0, 0.0, 0.0]},
        "traffic": {
            "vehicles": {"count": 0, "lanes": [], "speed_range": [8.0, 14.0]},
            "humans": {"count": 0, "lanes": [], "speed_range": [1.0, 1.5]},
        },
        "job": {},
        "drone": {},
    }
    doc = copy.deepcopy(doc)
    doc.update(overrides)
    return doc


@pytest.fixture()
def tiny_scenario():
    return scenario_from_dict(tiny_scenario_doc())
