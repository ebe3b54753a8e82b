"""Static world definition: bridges, tasks, defects, wind, traffic, job.

A scenario is loaded once from a JSON document, validated, and then shared
read-only by the simulation, telemetry, and scoring stages.  All internal
units are SI (meters, seconds, m/s); speeds in config files may be given
as strings with an ``mph`` suffix and are converted at load time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from random import Random
from typing import Any

from .geometry import Box, MeshPatch, Primitive, Vec3, VerticalCylinder, vnorm

MPS_PER_MPH = 0.44704

# Wind levels map to a fixed horizontal force on the airframe.
WIND_FORCE_N = {
    "none": 0.0,
    "light": 0.12,
    "gentle": 3.0,
    "medium": 12.0,
}

DEFECT_SURFACE_TOLERANCE_M = 0.05


class ScenarioError(Exception):
    """Base class for scenario loading problems."""


class ScenarioParseError(ScenarioError):
    """The document could not be parsed or is structurally malformed."""


class ScenarioValidationError(ScenarioError):
    """A scenario invariant does not hold.

    ``invariant`` carries a short machine-checkable name for the violated
    rule, e.g. ``tasks.nonempty``.
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class ElementKind(str, Enum):
    SLAB = "slab"
    ARCH = "arch"
    PIER = "pier"
    INTERLAYER = "interlayer"
    DECK = "deck"
    TERRAIN = "terrain"
    WATER = "water"


# Element kinds whose surfaces may host defects.
DEFECT_HOST_KINDS = {
    ElementKind.SLAB,
    ElementKind.ARCH,
    ElementKind.PIER,
    ElementKind.INTERLAYER,
    ElementKind.DECK,
}


class DefectKind(str, Enum):
    CRACK = "crack"
    SPALLING = "spalling"
    CORROSION = "corrosion"


class WindLevel(str, Enum):
    NONE = "none"
    LIGHT = "light"
    GENTLE = "gentle"
    MEDIUM = "medium"


@dataclass(frozen=True)
class BridgeElement:
    id: str
    kind: ElementKind
    shape: Primitive
    crashable: bool = True


@dataclass(frozen=True)
class TaskSpec:
    task_id: int
    points: tuple[Vec3, ...]
    corridor_m: float
    recommended_distance_m: tuple[float, float]
    speed_limit_mps: float
    light_required: bool = False
    name: str = ""


@dataclass(frozen=True)
class DefectSpec:
    id: str
    position: Vec3
    host_element: str
    kind: DefectKind = DefectKind.CRACK


@dataclass(frozen=True)
class WindSpec:
    level: WindLevel = WindLevel.NONE
    direction: Vec3 = (1.0, 0.0, 0.0)

    @property
    def force_newtons(self) -> float:
        return WIND_FORCE_N[self.level.value]


@dataclass(frozen=True)
class AgentClassSpec:
    """One class of traffic agents (vehicles or pedestrians) on fixed lanes."""

    count: int = 0
    lanes: tuple[tuple[Vec3, ...], ...] = ()
    speed_range_mps: tuple[float, float] = (8.0, 16.0)


@dataclass(frozen=True)
class TrafficSpec:
    vehicles: AgentClassSpec = AgentClassSpec()
    humans: AgentClassSpec = AgentClassSpec(speed_range_mps=(1.0, 1.6))


@dataclass(frozen=True)
class ScoringWeights:
    """Coefficients of the four performance scores.

    The conformity pair defaults to the published 4-task values
    (on_path_gain=25, speeding_loss=-25/3) and generalizes to other task
    counts so the conformity score stays in [-100, 100]:
    on_path_gain = 100/T and speeding_loss = -100 / sum_t(max_speed/limit_t).
    """

    on_path_gain: float = 25.0
    speeding_loss: float = -25.0 / 3.0
    efficiency_base: float = 100.0
    efficiency_slope: float = -1.0 / 6.0  # points per second past the target time
    battery_fail_penalty: float = -100.0
    crash_human_penalty: float = -100.0
    crash_vehicle_penalty: float = -100.0
    crash_other_penalty: float = -3.0
    detection_scale: float = 100.0
    safety_floor: float = -100.0
    beta: float = 1.0

    @staticmethod
    def derive(
        task_count: int,
        speed_ratio_sum: float,
        target_time_s: float,
        max_flight_time_s: float,
        **overrides: float,
    ) -> "ScoringWeights":
        """Build weights from the scenario shape, honoring the range rules."""
        base = ScoringWeights(
            on_path_gain=100.0 / task_count,
            speeding_loss=-100.0 / speed_ratio_sum,
            efficiency_slope=-100.0 / (max_flight_time_s - target_time_s),
        )
        return replace(base, **overrides) if overrides else base


@dataclass(frozen=True)
class JobSpec:
    target_time_s: float = 900.0  # finishing by this time earns the full efficiency score
    max_flight_time_s: float = 1500.0  # battery reaches zero here
    frame_rate_hz: float = 50.0
    max_speed_mps: float = 30.0 * MPS_PER_MPH
    battery_capacity_pct: float = 100.0
    snapshot_range_m: float = 10.0
    camera_hfov_deg: float = 70.0
    camera_vfov_deg: float = 50.0
    weights: ScoringWeights = field(default_factory=ScoringWeights)


@dataclass(frozen=True)
class DroneSpec:
    """Airframe parameters; defaults documented here, not in the literature."""

    mass_kg: float = 1.2
    max_forward_speed_mps: float = 30.0 * MPS_PER_MPH
    max_sideward_speed_mps: float = 20.0 * MPS_PER_MPH
    max_vertical_speed_mps: float = 10.0 * MPS_PER_MPH
    rotation_rate_rad_s: float = math.pi / 2.0
    slow_down_time_s: float = 0.5
    collision_radius_m: float = 0.4
    landing_pad_radius_m: float = 4.0


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    elements: tuple[BridgeElement, ...]
    tasks: tuple[TaskSpec, ...]
    defects: tuple[DefectSpec, ...]
    wind: WindSpec
    traffic: TrafficSpec
    ground_station: Vec3
    job: JobSpec
    drone: DroneSpec
    seed: int

    def element_by_id(self, element_id: str) -> BridgeElement:
        for el in self.elements:
            if el.id == element_id:
                return el
        raise KeyError(element_id)

    @property
    def task_count(self) -> int:
        return len(self.tasks)

    @property
    def defect_count(self) -> int:
        return len(self.defects)


# ---------------------------------------------------------------------------
# Loading


def parse_speed(value: Any, context: str = "speed") -> float:
    """Accept a number (m/s) or a string like ``"10 mph"`` / ``"4.5 m/s"``."""
    if isinstance(value, bool):
        raise ScenarioParseError(f"{context}: expected a speed, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        parts = value.strip().split()
        if len(parts) == 2:
            num, unit = parts
        elif len(parts) == 1:
            num, unit = parts[0], "mps"
        else:
            raise ScenarioParseError(f"{context}: cannot parse speed {value!r}")
        try:
            magnitude = float(num)
        except ValueError as exc:
            raise ScenarioParseError(f"{context}: cannot parse speed {value!r}") from exc
        unit = unit.lower()
        if unit == "mph":
            return magnitude * MPS_PER_MPH
        if unit in ("mps", "m/s"):
            return magnitude
        raise ScenarioParseError(f"{context}: unknown speed unit {unit!r}")
    raise ScenarioParseError(f"{context}: expected a speed, got {type(value).__name__}")


def _vec3(raw: Any, context: str) -> Vec3:
    if not isinstance(raw, (list, tuple)) or len(raw) != 3:
        raise ScenarioParseError(f"{context}: expected a 3-element point, got {raw!r}")
    try:
        return (float(raw[0]), float(raw[1]), float(raw[2]))
    except (TypeError, ValueError) as exc:
        raise ScenarioParseError(f"{context}: non-numeric coordinate in {raw!r}") from exc


def _shape_from_dict(raw: dict, context: str) -> Primitive:
    kind = raw.get("type")
    try:
        if kind == "box":
            return Box(_vec3(raw["min"], context), _vec3(raw["max"], context))
        if kind == "cylinder":
            center = raw["center"]
            return VerticalCylinder(
                (float(center[0]), float(center[1])),
                (float(raw["z"][0]), float(raw["z"][1])),
                float(raw["radius"]),
            )
        if kind == "mesh":
            vertices = tuple(_vec3(v, context) for v in raw["vertices"])
            triangles = tuple(tuple(int(i) for i in t) for t in raw["triangles"])
            return MeshPatch(vertices, triangles)  # type: ignore[arg-type]
    except KeyError as exc:
        raise ScenarioParseError(f"{context}: shape missing field {exc}") from exc
    except ValueError as exc:
        raise ScenarioValidationError("element.shape_volume", f"{context}: {exc}") from exc
    raise ScenarioParseError(f"{context}: unknown shape type {kind!r}")


def _agent_class(raw: dict | None, default: AgentClassSpec, context: str) -> AgentClassSpec:
    if raw is None:
        return default
    lanes = tuple(
        tuple(_vec3(p, f"{context}.lanes[{i}]") for p in lane)
        for i, lane in enumerate(raw.get("lanes", []))
    )
    speed_range = raw.get("speed_range")
    if speed_range is not None:
        speed_range = (
            parse_speed(speed_range[0], f"{context}.speed_range"),
            parse_speed(speed_range[1], f"{context}.speed_range"),
        )
    else:
        speed_range = default.speed_range_mps
    return AgentClassSpec(
        count=int(raw.get("count", 0)), lanes=lanes, speed_range_mps=speed_range
    )


def scenario_from_dict(doc: dict) -> ScenarioSpec:
    """Build and validate a ScenarioSpec from a parsed config document."""
    if not isinstance(doc, dict):
        raise ScenarioParseError("scenario document must be a JSON object")
    version = doc.get("version")
    if version != 1:
        raise ScenarioParseError(f"unsupported scenario version {version!r}")

    seed = int(doc.get("seed", 0))
    name = str(doc.get("name", "unnamed"))
    ground_station = _vec3(doc.get("ground_station", (0, 0, 0)), "ground_station")

    elements = []
    seen_ids: set[str] = set()
    for i, raw in enumerate(doc.get("elements", [])):
        ctx = f"elements[{i}]"
        el_id = raw.get("id")
        if not el_id:
            raise ScenarioParseError(f"{ctx}: missing id")
        if el_id in seen_ids:
            raise ScenarioValidationError("element.ids_unique", f"duplicate element id {el_id!r}")
        seen_ids.add(el_id)
        try:
            kind = ElementKind(raw.get("kind"))
        except ValueError as exc:
            raise ScenarioParseError(f"{ctx}: unknown element kind {raw.get('kind')!r}") from exc
        shape = _shape_from_dict(raw.get("shape", {}), ctx)
        elements.append(
            BridgeElement(id=el_id, kind=kind, shape=shape, crashable=bool(raw.get("crashable", True)))
        )

    tasks = []
    for i, raw in enumerate(doc.get("tasks", [])):
        ctx = f"tasks[{i}]"
        points = tuple(_vec3(p, ctx) for p in raw.get("points", []))
        rec = raw.get("recommended_distance_m", [1.0, 2.0])
        tasks.append(
            TaskSpec(
                task_id=int(raw.get("id", i + 1)),
                points=points,
                corridor_m=float(raw.get("corridor_m", 2.0)),
                recommended_distance_m=(float(rec[0]), float(rec[1])),
                speed_limit_mps=parse_speed(raw.get("speed_limit", "10 mph"), f"{ctx}.speed_limit"),
                light_required=bool(raw.get("light_required", False)),
                name=str(raw.get("name", f"task {raw.get('id', i + 1)}")),
            )
        )

    wind_raw = doc.get("wind", {})
    try:
        level = WindLevel(wind_raw.get("level", "none"))
    except ValueError as exc:
        raise ScenarioParseError(f"wind: unknown level {wind_raw.get('level')!r}") from exc
    direction = _vec3(wind_raw.get("direction", (1, 0, 0)), "wind.direction")
    if level is not WindLevel.NONE:
        norm = vnorm(direction)
        if norm == 0.0:
            raise ScenarioValidationError(
                "wind.direction_unit", "wind direction must be nonzero for an active wind level"
            )
        # Skip the division for already-unit vectors so serializing and
        # re-parsing a scenario cannot drift the direction by one ulp.
        if abs(norm - 1.0) > 1e-12:
            direction = (direction[0] / norm, direction[1] / norm, direction[2] / norm)
    wind = WindSpec(level=level, direction=direction)

    traffic_raw = doc.get("traffic", {})
    traffic = TrafficSpec(
        vehicles=_agent_class(traffic_raw.get("vehicles"), TrafficSpec().vehicles, "traffic.vehicles"),
        humans=_agent_class(traffic_raw.get("humans"), TrafficSpec().humans, "traffic.humans"),
    )

    job_raw = doc.get("job", {})
    drone_raw = doc.get("drone", {})
    drone_defaults = DroneSpec()
    drone = DroneSpec(
        mass_kg=float(drone_raw.get("mass_kg", drone_defaults.mass_kg)),
        max_forward_speed_mps=parse_speed(
            drone_raw.get("max_forward_speed", drone_defaults.max_forward_speed_mps),
            "drone.max_forward_speed",
        ),
        max_sideward_speed_mps=parse_speed(
            drone_raw.get("max_sideward_speed", drone_defaults.max_sideward_speed_mps),
            "drone.max_sideward_speed",
        ),
        max_vertical_speed_mps=parse_speed(
            drone_raw.get("max_vertical_speed", drone_defaults.max_vertical_speed_mps),
            "drone.max_vertical_speed",
        ),
        rotation_rate_rad_s=(
            float(drone_raw["rotation_rate_rad_s"])
            if "rotation_rate_rad_s" in drone_raw
            else math.radians(float(drone_raw.get("rotation_rate_deg_s", 90.0)))
        ),
        slow_down_time_s=float(drone_raw.get("slow_down_time_s", drone_defaults.slow_down_time_s)),
        collision_radius_m=float(drone_raw.get("collision_radius_m", drone_defaults.collision_radius_m)),
        landing_pad_radius_m=float(
            drone_raw.get("landing_pad_radius_m", drone_defaults.landing_pad_radius_m)
        ),
    )

    job_defaults = JobSpec()
    target_time_s = float(job_raw.get("target_time_s", job_defaults.target_time_s))
    max_flight_time_s = float(job_raw.get("max_flight_time_s", job_defaults.max_flight_time_s))
    max_speed = parse_speed(job_raw.get("max_speed", job_defaults.max_speed_mps), "job.max_speed")
    fov = job_raw.get("camera_fov_deg", [job_defaults.camera_hfov_deg, job_defaults.camera_vfov_deg])

    if max_flight_time_s <= target_time_s or target_time_s <= 0:
        raise ScenarioValidationError(
            "job.time_order", "need 0 < target_time_s < max_flight_time_s"
        )
    if tasks:
        ratio_sum = sum(max_speed / t.speed_limit_mps for t in tasks)
        weights = ScoringWeights.derive(
            len(tasks),
            ratio_sum,
            target_time_s,
            max_flight_time_s,
            **{k: float(v) for k, v in job_raw.get("weights", {}).items()},
        )
    else:
        weights = ScoringWeights()
    job = JobSpec(
        target_time_s=target_time_s,
        max_flight_time_s=max_flight_time_s,
        frame_rate_hz=float(job_raw.get("frame_rate_hz", job_defaults.frame_rate_hz)),
        max_speed_mps=max_speed,
        battery_capacity_pct=float(
            job_raw.get("battery_capacity_pct", job_defaults.battery_capacity_pct)
        ),
        snapshot_range_m=float(job_raw.get("snapshot_range_m", job_defaults.snapshot_range_m)),
        camera_hfov_deg=float(fov[0]),
        camera_vfov_deg=float(fov[1]),
        weights=weights,
    )

    spec = ScenarioSpec(
        name=name,
        elements=tuple(elements),
        tasks=tuple(tasks),
        defects=(),
        wind=wind,
        traffic=traffic,
        ground_station=ground_station,
        job=job,
        drone=drone,
        seed=seed,
    )

    defects_raw = doc.get("defects", [])
    if isinstance(defects_raw, dict):
        hosts = defects_raw.get("hosts")
        defects = place_defects(
            spec, seed, count=int(defects_raw.get("count", 0)), hosts=hosts
        )
    else:
        defects = []
        for i, raw in enumerate(defects_raw):
            ctx = f"defects[{i}]"
            defects.append(
                DefectSpec(
                    id=str(raw.get("id", f"d{i + 1}")),
                    position=_vec3(raw.get("position"), ctx),
                    host_element=str(raw.get("host")),
                    kind=DefectKind(raw.get("defect_kind", "crack")),
                )
            )
    spec = replace(spec, defects=tuple(defects))
    _validate(spec)
    return spec


def load_scenario(path: str | Path) -> ScenarioSpec:
    """Load a scenario config file (JSON with a top-level ``version``)."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}: {exc}") from exc
    return scenario_from_dict(doc)


def _shape_to_dict(shape: Primitive) -> dict:
    if isinstance(shape, Box):
        return {"type": "box", "min": list(shape.min_corner), "max": list(shape.max_corner)}
    if isinstance(shape, VerticalCylinder):
        return {
            "type": "cylinder",
            "center": list(shape.center_xy),
            "z": list(shape.z_range),
            "radius": shape.radius,
        }
    if isinstance(shape, MeshPatch):
        return {
            "type": "mesh",
            "vertices": [list(v) for v in shape.vertices],
            "triangles": [list(t) for t in shape.triangles],
        }
    raise ScenarioError(f"unknown shape {type(shape).__name__}")


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    """Serialize a spec to a config document that parses back equal.

    Speeds are written in m/s and defects as an explicit resolved list,
    so the document is self-contained (session logs embed it for replay).
    """
    w = spec.job.weights
    doc: dict = {
        "version": 1,
        "name": spec.name,
        "seed": spec.seed,
        "ground_station": list(spec.ground_station),
        "elements": [
            {
                "id": el.id,
                "kind": el.kind.value,
                "crashable": el.crashable,
                "shape": _shape_to_dict(el.shape),
            }
            for el in spec.elements
        ],
        "tasks": [
            {
                "id": t.task_id,
                "name": t.name,
                "points": [list(p) for p in t.points],
                "corridor_m": t.corridor_m,
                "recommended_distance_m": list(t.recommended_distance_m),
                "speed_limit": t.speed_limit_mps,
                "light_required": t.light_required,
            }
            for t in spec.tasks
        ],
        "defects": [
            {
                "id": d.id,
                "position": list(d.position),
                "host": d.host_element,
                "defect_kind": d.kind.value,
            }
            for d in spec.defects
        ],
        "wind": {"level": spec.wind.level.value, "direction": list(spec.wind.direction)},
        "traffic": {
            "vehicles": {
                "count": spec.traffic.vehicles.count,
                "lanes": [[list(p) for p in lane] for lane in spec.traffic.vehicles.lanes],
                "speed_range": list(spec.traffic.vehicles.speed_range_mps),
            },
            "humans": {
                "count": spec.traffic.humans.count,
                "lanes": [[list(p) for p in lane] for lane in spec.traffic.humans.lanes],
                "speed_range": list(spec.traffic.humans.speed_range_mps),
            },
        },
        "job": {
            "target_time_s": spec.job.target_time_s,
            "max_flight_time_s": spec.job.max_flight_time_s,
            "frame_rate_hz": spec.job.frame_rate_hz,
            "max_speed": spec.job.max_speed_mps,
            "battery_capacity_pct": spec.job.battery_capacity_pct,
            "snapshot_range_m": spec.job.snapshot_range_m,
            "camera_fov_deg": [spec.job.camera_hfov_deg, spec.job.camera_vfov_deg],
            "weights": {
                "on_path_gain": w.on_path_gain,
                "speeding_loss": w.speeding_loss,
                "efficiency_base": w.efficiency_base,
                "efficiency_slope": w.efficiency_slope,
                "battery_fail_penalty": w.battery_fail_penalty,
                "crash_human_penalty": w.crash_human_penalty,
                "crash_vehicle_penalty": w.crash_vehicle_penalty,
                "crash_other_penalty": w.crash_other_penalty,
                "detection_scale": w.detection_scale,
                "safety_floor": w.safety_floor,
                "beta": w.beta,
            },
        },
        "drone": {
            "mass_kg": spec.drone.mass_kg,
            "max_forward_speed": spec.drone.max_forward_speed_mps,
            "max_sideward_speed": spec.drone.max_sideward_speed_mps,
            "max_vertical_speed": spec.drone.max_vertical_speed_mps,
            "rotation_rate_rad_s": spec.drone.rotation_rate_rad_s,
            "slow_down_time_s": spec.drone.slow_down_time_s,
            "collision_radius_m": spec.drone.collision_radius_m,
            "landing_pad_radius_m": spec.drone.landing_pad_radius_m,
        },
    }
    return doc


def _validate(spec: ScenarioSpec) -> None:
    if len(spec.tasks) < 1:
        raise ScenarioValidationError("tasks.nonempty", "scenario needs at least one task")
    seen_tasks: set[int] = set()
    for task in spec.tasks:
        ctx = f"task {task.task_id}"
        if task.task_id in seen_tasks:
            raise ScenarioValidationError("tasks.ids_unique", f"duplicate task id {task.task_id}")
        seen_tasks.add(task.task_id)
        if len(task.points) < 2:
            raise ScenarioValidationError(
                "task.min_points", f"{ctx}: reference path needs at least 2 points"
            )
        for a, b in zip(task.points, task.points[1:]):
            if a == b:
                raise ScenarioValidationError(
                    "task.distinct_points", f"{ctx}: consecutive reference points must differ"
                )
        if task.corridor_m <= 0:
            raise ScenarioValidationError("task.corridor_positive", f"{ctx}: corridor must be > 0")
        lo, hi = task.recommended_distance_m
        if not lo < hi:
            raise ScenarioValidationError(
                "task.recommended_distance_order", f"{ctx}: need min < max recommended distance"
            )
        if task.speed_limit_mps <= 0:
            raise ScenarioValidationError("task.speed_limit_positive", f"{ctx}: speed limit must be > 0")

    if not spec.elements:
        raise ScenarioValidationError("elements.nonempty", "scenario needs at least one element")
    for el in spec.elements:
        if el.shape.volume <= 0:
            raise ScenarioValidationError("element.shape_volume", f"element {el.id}: empty shape")
        if el.shape.contains(spec.ground_station):
            raise ScenarioValidationError(
                "ground_station.outside_elements",
                f"ground station lies inside element {el.id}",
            )

    ids = {el.id for el in spec.elements}
    for defect in spec.defects:
        if defect.host_element not in ids:
            raise ScenarioValidationError(
                "defect.host_exists", f"defect {defect.id}: unknown host {defect.host_element!r}"
            )
        host = spec.element_by_id(defect.host_element)
        d = host.shape.distance_to_surface(defect.position)
        if d > DEFECT_SURFACE_TOLERANCE_M:
            raise ScenarioValidationError(
                "defect.on_surface",
                f"defect {defect.id} is {d:.3f} m from the surface of {defect.host_element}",
            )

    if spec.job.frame_rate_hz <= 0:
        raise ScenarioValidationError("job.frame_rate_positive", "frame rate must be > 0")
    if spec.job.max_speed_mps <= 0:
        raise ScenarioValidationError("job.max_speed_positive", "max speed must be > 0")

    for label, cls in (("vehicles", spec.traffic.vehicles), ("humans", spec.traffic.humans)):
        if cls.count < 0:
            raise ScenarioValidationError("traffic.count_nonnegative", f"{label}: count < 0")
        if cls.count > 0 and not cls.lanes:
            raise ScenarioValidationError("traffic.lanes_present", f"{label}: agents need lanes")
        for lane in cls.lanes:
            if len(lane) < 2:
                raise ScenarioValidationError(
                    "traffic.lane_min_points", f"{label}: lanes need at least 2 points"
                )
        lo, hi = cls.speed_range_mps
        if lo <= 0 or hi < lo:
            raise ScenarioValidationError(
                "traffic.speed_range", f"{label}: need 0 < min <= max agent speed"
            )


# ---------------------------------------------------------------------------
# Operations


def place_defects(
    spec: ScenarioSpec,
    seed: int,
    count: int | None = None,
    hosts: list[str] | None = None,
) -> list[DefectSpec]:
    """Place surface defects uniformly over host element surfaces.

    Deterministic for a given seed.  Hosts default to every element whose
    kind can carry defects (bridge structure, not terrain or water).
    """
    if count is None:
        count = len(spec.defects)
    if count < 0:
        raise ScenarioValidationError("defects.count_nonnegative", "defect count must be >= 0")
    if count == 0:
        return []

    if hosts is None:
        candidates = [el for el in spec.elements if el.kind in DEFECT_HOST_KINDS]
    else:
        candidates = [spec.element_by_id(h) for h in hosts]
    areas = [el.shape.surface_area for el in candidates]
    total = sum(areas)
    if not candidates or total <= 0:
        raise ScenarioValidationError(
            "defects.host_surface", "no host surface area available for defect placement"
        )

    rng = Random(seed)
    kinds = list(DefectKind)
    out = []
    for i in range(count):
        r = rng.uniform(0.0, total)
        host = candidates[-1]
        for el, area in zip(candidates, areas):
            if r <= area:
                host = el
                break
            r -= area
        position = host.shape.sample_surface(rng)
        out.append(
            DefectSpec(
                id=f"d{i + 1}",
                position=position,
                host_element=host.id,
                kind=kinds[rng.randrange(len(kinds))],
            )
        )
    return out


def nearest_element(spec: ScenarioSpec, point: Vec3) -> tuple[str, float]:
    """Closest element to a point: (element id, distance to its solid).

    Exact ties resolve to the lexicographically smaller id.
    """
    if not spec.elements:
        raise ValueError("scenario has no elements")
    best_id = ""
    best = math.inf
    for el in spec.elements:
        d = el.shape.distance_to_solid(point)
        if d < best or (d == best and el.id < best_id):
            best = d
            best_id = el.id
    return best_id, best
