"""Scenario parsing, validation invariants, and serialization round-trip."""

import math

import pytest

from bridgesim.scenario import (
    MPS_PER_MPH,
    ScenarioError,
    ScoringWeights,
    load_scenario,
    parse_speed,
    place_defects,
    scenario_from_dict,
    scenario_to_dict,
)

from conftest import SCENARIO_PATH, tiny_scenario_doc


def test_parse_speed_units():
    assert parse_speed("10 mph") == pytest.approx(10 * 0.44704)
    assert parse_speed("4.5 m/s") == 4.5
    assert parse_speed(3.2) == 3.2
    assert MPS_PER_MPH == 0.44704


def test_parse_speed_rejects_garbage():
    with pytest.raises(ScenarioError):
        parse_speed("10 knots")
    with pytest.raises(ScenarioError):
        parse_speed("fast")
    with pytest.raises(ScenarioError):
        parse_speed(True)


def test_twin_bridges_weights_derived_from_shape():
    spec = load_scenario(SCENARIO_PATH)
    w = spec.job.weights
    # Four tasks, all limited to a third of the top speed.
    assert w.on_path_gain == pytest.approx(25.0)
    assert w.speeding_loss == pytest.approx(-25.0 / 3.0)
    assert w.efficiency_base == 100.0
    assert w.efficiency_slope == pytest.approx(-100.0 / 600.0)


def test_weight_derivation_and_overrides():
    w = ScoringWeights.derive(
        task_count=5,
        speed_ratio_sum=10.0,
        target_time_s=600.0,
        max_flight_time_s=1200.0,
    )
    assert w.on_path_gain == pytest.approx(20.0)
    assert w.speeding_loss == pytest.approx(-10.0)
    assert w.efficiency_slope == pytest.approx(-100.0 / 600.0)
    w2 = ScoringWeights.derive(
        task_count=5,
        speed_ratio_sum=10.0,
        target_time_s=600.0,
        max_flight_time_s=1200.0,
        beta=2.0,
    )
    assert w2.beta == 2.0


def test_round_trip_serialization():
    spec = load_scenario(SCENARIO_PATH)
    doc = scenario_to_dict(spec)
    again = scenario_from_dict(doc)
    assert again == spec


def test_round_trip_tiny():
    spec = scenario_from_dict(tiny_scenario_doc())
    assert scenario_from_dict(scenario_to_dict(spec)) == spec


@pytest.mark.parametrize(
    "mutate, invariant",
    [
        (lambda d: d.update(tasks=[]), "tasks.nonempty"),
        (
            lambda d: d["tasks"].append(dict(d["tasks"][0])),
            "tasks.ids_unique",
        ),
        (
            lambda d: d["tasks"][0].update(points=[[0.0, 0.0, 0.0]]),
            "task.min_points",
        ),
        (
            lambda d: d["tasks"][0].update(corridor_m=0.0),
            "task.corridor_positive",
        ),
        (
            lambda d: d["tasks"][0].update(recommended_distance_m=[3.0, 1.0]),
            "task.recommended_distance_order",
        ),
        (
            lambda d: d["tasks"][0].update(speed_limit=-2.0),
            "task.speed_limit_positive",
        ),
        (lambda d: d.update(elements=[]), "elements.nonempty"),
        (
            lambda d: d["elements"].append(dict(d["elements"][0])),
            "element.ids_unique",
        ),
        (
            lambda d: d["defects"][0].update(host="nope"),
            "defect.host_exists",
        ),
        (
            lambda d: d["defects"][0].update(position=[10.0, 3.0, 4.5]),
            "defect.on_surface",
        ),
        (
            lambda d: d.update(ground_station=[10.0, 0.0, 4.5]),
            "ground_station.outside_elements",
        ),
        (
            lambda d: d["wind"].update(level="light", direction=[0.0, 0.0, 0.0]),
            "wind.direction_unit",
        ),
        (
            lambda d: d["job"].update(target_time_s=2000.0),
            "job.time_order",
        ),
    ],
)
def test_validation_invariants_are_named(mutate, invariant):
    doc = tiny_scenario_doc()
    mutate(doc)
    with pytest.raises(ScenarioError) as err:
        scenario_from_dict(doc)
    assert str(err.value).startswith(invariant)


def test_placed_defects_sit_on_host_surfaces():
    doc = tiny_scenario_doc()
    doc["defects"] = {"count": 6, "hosts": ["slab"]}
    spec = scenario_from_dict(doc)
    assert spec.defect_count == 6
    for d in spec.defects:
        assert d.host_element == "slab"
    # Same seed, same placement.
    again = scenario_from_dict(doc)
    assert again.defects == spec.defects


def test_place_defects_function_deterministic(tiny_scenario):
    first = place_defects(tiny_scenario, seed=42, count=3)
    second = place_defects(tiny_scenario, seed=42, count=3)
    assert first == second
    third = place_defects(tiny_scenario, seed=43, count=3)
    assert third != first


def test_rotation_rate_units():
    doc = tiny_scenario_doc()
    doc["drone"] = {"rotation_rate_deg_s": 180.0}
    spec = scenario_from_dict(doc)
    assert spec.drone.rotation_rate_rad_s == pytest.approx(math.pi)


def test_unsupported_version_rejected():
    doc = tiny_scenario_doc()
    doc["version"] = 2
    with pytest.raises(ScenarioError):
        scenario_from_dict(doc)
