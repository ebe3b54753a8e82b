"""Fixed-timestep drone physics, battery, traffic agents, and sensing.

The flight model is kinematic with first-order drag: stick inputs command
a velocity (axis fraction times the per-axis top speed, rotated by yaw),
the actual velocity relaxes toward the command with the airframe's
slow-down time constant, and wind adds a constant acceleration.  This
reproduces the behavior of speed-and-slow-down-time drone models while
keeping every step analytically checkable and bit-deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from random import Random

from .geometry import Box, Vec3, dist, point_on_polyline, polyline_length
from .scenario import (
    BridgeElement,
    DefectSpec,
    ElementKind,
    JobSpec,
    ScenarioSpec,
    TrafficSpec,
)

# Schematic axis-aligned half-extents (x, y, z) of traffic agents, meters.
VEHICLE_HALF_EXTENTS = (2.0, 2.0, 0.8)
HUMAN_HALF_EXTENTS = (0.3, 0.3, 0.9)


def _clamp_axis(value: float) -> float:
    if value < -1.0:
        return -1.0
    if value > 1.0:
        return 1.0
    return value


@dataclass(frozen=True)
class ControlInput:
    """One frame of pilot input.

    Axis values are fractions of the per-axis top speed in [-1, +1]:
    forward/backward, right/left sideward, up/down, right/left rotation.
    ``light`` and ``snapshot`` are edge events: true only on the frame the
    key was pressed, regardless of how long it is held.
    """

    forward: float = 0.0
    right: float = 0.0
    up: float = 0.0
    rotate: float = 0.0
    light: bool = False
    snapshot: bool = False

    def clamped(self) -> "ControlInput":
        return ControlInput(
            forward=_clamp_axis(self.forward),
            right=_clamp_axis(self.right),
            up=_clamp_axis(self.up),
            rotate=_clamp_axis(self.rotate),
            light=self.light,
            snapshot=self.snapshot,
        )


@dataclass(frozen=True)
class DroneState:
    """Immutable flight state snapshot; one value per frame."""

    position: Vec3
    velocity: Vec3 = (0.0, 0.0, 0.0)
    yaw: float = 0.0  # radians, 0 = +x, positive toward +y
    battery_pct: float = 100.0
    light_on: bool = False
    flight_time_s: float = 0.0

    @property
    def speed(self) -> float:
        vx, vy, vz = self.velocity
        return math.sqrt(vx * vx + vy * vy + vz * vz)


@dataclass(frozen=True)
class CollisionReport:
    hit_human: bool = False
    hit_vehicle: bool = False
    hit_object_id: str | None = None
    hit_object_kind: str | None = None
    min_clearance: float = math.inf

    @property
    def any_contact(self) -> bool:
        return self.hit_human or self.hit_vehicle or self.hit_object_id is not None


@dataclass(frozen=True)
class TrafficAgent:
    id: str
    kind: str  # "vehicle" | "human"
    lane_index: int
    arc_s: float
    speed_mps: float
    position: Vec3
    waypoint_index: int


@dataclass(frozen=True)
class TrafficState:
    agents: tuple[TrafficAgent, ...]
    lanes: tuple[tuple[Vec3, ...], ...]
    lane_lengths: tuple[float, ...]


def step(state: DroneState, control: ControlInput, spec: ScenarioSpec, dt: float) -> DroneState:
    """Advance the drone one fixed timestep.

    Order: yaw integrates the rotation stick, the commanded velocity is
    built in the new heading and capped at the job's top speed, drag
    relaxes the velocity toward it, wind acceleration is added, and the
    position integrates the resulting velocity.
    """
    control = control.clamped()
    drone = spec.drone

    # Positive rotate = right (clockwise from above) = decreasing yaw.
    yaw = state.yaw - control.rotate * drone.rotation_rate_rad_s * dt

    cos_y = math.cos(yaw)
    sin_y = math.sin(yaw)
    fwd = control.forward * drone.max_forward_speed_mps
    side = control.right * drone.max_sideward_speed_mps
    vert = control.up * drone.max_vertical_speed_mps
    cmd = (
        fwd * cos_y + side * sin_y,
        fwd * sin_y - side * cos_y,
        vert,
    )
    cmd_speed = math.sqrt(cmd[0] * cmd[0] + cmd[1] * cmd[1] + cmd[2] * cmd[2])
    cap = spec.job.max_speed_mps
    if cmd_speed > cap:
        k = cap / cmd_speed
        cmd = (cmd[0] * k, cmd[1] * k, cmd[2] * k)

    if drone.slow_down_time_s > 0.0:
        alpha = 1.0 - math.exp(-dt / drone.slow_down_time_s)
    else:
        alpha = 1.0
    vx, vy, vz = state.velocity
    vx += (cmd[0] - vx) * alpha
    vy += (cmd[1] - vy) * alpha
    vz += (cmd[2] - vz) * alpha

    wind = spec.wind
    force = wind.force_newtons
    if force > 0.0:
        gain = force / drone.mass_kg * dt
        vx += wind.direction[0] * gain
        vy += wind.direction[1] * gain
        vz += wind.direction[2] * gain

    px, py, pz = state.position
    position = (px + vx * dt, py + vy * dt, pz + vz * dt)

    light_on = (not state.light_on) if control.light else state.light_on
    return DroneState(
        position=position,
        velocity=(vx, vy, vz),
        yaw=yaw,
        battery_pct=state.battery_pct,
        light_on=light_on,
        flight_time_s=state.flight_time_s,
    )


def drain_battery(state: DroneState, dt: float, job: JobSpec) -> DroneState:
    """Linear drain: full charge lasts exactly the maximum flight time."""
    t = state.flight_time_s + dt
    level = job.battery_capacity_pct * (1.0 - t / job.max_flight_time_s)
    if level < 0.0:
        level = 0.0
    return replace(state, battery_pct=level, flight_time_s=t)


def flight_time_exceeded(state: DroneState, job: JobSpec) -> bool:
    return state.flight_time_s > job.max_flight_time_s


def _box_distance(p: Vec3, center: Vec3, half: tuple[float, float, float]) -> float:
    s = 0.0
    for k in range(3):
        d = abs(p[k] - center[k]) - half[k]
        if d > 0.0:
            s += d * d
    return math.sqrt(s)


def _aabb_distance(p: Vec3, lo: Vec3, hi: Vec3) -> float:
    s = 0.0
    for k in range(3):
        if p[k] < lo[k]:
            d = lo[k] - p[k]
            s += d * d
        elif p[k] > hi[k]:
            d = p[k] - hi[k]
            s += d * d
    return math.sqrt(s)


# Beyond this clearance, element distances may be reported as the
# (smaller) bounding-box distance instead of the exact one.  It sits
# above every clearance threshold feedback cares about, so alert and
# contact decisions are always made on exact distances.
BROADPHASE_CLEARANCE_M = 3.0

ElementIndex = tuple[tuple[BridgeElement, Vec3, Vec3], ...]


def collision_index(spec: ScenarioSpec) -> ElementIndex:
    """Precomputed element bounding boxes for the narrow-phase skip."""
    return tuple((el, *el.shape.aabb) for el in spec.elements)


def detect_collisions(
    state: DroneState,
    spec: ScenarioSpec,
    traffic: TrafficState | None = None,
    index: ElementIndex | None = None,
) -> CollisionReport:
    """Sphere-vs-world contact and clearance test for the current frame.

    Terrain contact inside the landing pad around the ground station is
    not a crash: that is where the drone parks.  Clearance still reflects
    every object, pad included; it is exact up to the broadphase bound
    and a lower bound past it.
    """
    p = state.position
    radius = spec.drone.collision_radius_m
    station = spec.ground_station
    pad_r = spec.drone.landing_pad_radius_m
    dx = p[0] - station[0]
    dy = p[1] - station[1]
    on_pad = dx * dx + dy * dy <= pad_r * pad_r

    nearest = math.inf
    hit_id: str | None = None
    hit_kind: str | None = None
    hit_dist = math.inf
    if index is None:
        index = collision_index(spec)
    far = radius + BROADPHASE_CLEARANCE_M
    for el, lo, hi in index:
        coarse = _aabb_distance(p, lo, hi)
        if coarse > far:
            if coarse < nearest:
                nearest = coarse
            continue
        d = el.shape.distance_to_solid(p)
        if d < nearest:
            nearest = d
        if d <= radius and el.crashable:
            if el.kind is ElementKind.TERRAIN and on_pad:
                continue
            if d < hit_dist:
                hit_dist = d
                hit_id = el.id
                hit_kind = el.kind.value

    hit_human = False
    hit_vehicle = False
    if traffic is not None:
        for agent in traffic.agents:
            half = VEHICLE_HALF_EXTENTS if agent.kind == "vehicle" else HUMAN_HALF_EXTENTS
            d = _box_distance(p, agent.position, half)
            if d < nearest:
                nearest = d
            if d <= radius:
                if agent.kind == "vehicle":
                    hit_vehicle = True
                else:
                    hit_human = True

    clearance = nearest - radius
    if clearance < 0.0:
        clearance = 0.0
    return CollisionReport(
        hit_human=hit_human,
        hit_vehicle=hit_vehicle,
        hit_object_id=hit_id,
        hit_object_kind=hit_kind,
        min_clearance=clearance,
    )


def camera_sees(state: DroneState, defect: DefectSpec, job: JobSpec) -> bool:
    """Frustum-and-range visibility of a defect from the forward camera.

    The camera looks along yaw with zero pitch; no occlusion test.
    """
    rel = (
        defect.position[0] - state.position[0],
        defect.position[1] - state.position[1],
        defect.position[2] - state.position[2],
    )
    rng = math.sqrt(rel[0] * rel[0] + rel[1] * rel[1] + rel[2] * rel[2])
    if rng > job.snapshot_range_m:
        return False
    cos_y = math.cos(state.yaw)
    sin_y = math.sin(state.yaw)
    ahead = rel[0] * cos_y + rel[1] * sin_y
    if ahead <= 0.0:
        return False
    lateral = rel[0] * sin_y - rel[1] * cos_y
    if math.degrees(math.atan2(abs(lateral), ahead)) > job.camera_hfov_deg / 2.0:
        return False
    if math.degrees(math.atan2(abs(rel[2]), ahead)) > job.camera_vfov_deg / 2.0:
        return False
    return True


def visible_defects(state: DroneState, spec: ScenarioSpec) -> list[str]:
    """Ids of defects currently inside the camera frustum and range."""
    return [d.id for d in spec.defects if camera_sees(state, d, spec.job)]


# ---------------------------------------------------------------------------
# Traffic


def init_traffic(spec: TrafficSpec, seed: int) -> TrafficState:
    """Spawn agents on their lanes; deterministic for a given seed."""
    rng = Random(seed)
    lanes: list[tuple[Vec3, ...]] = []
    lengths: list[float] = []
    agents: list[TrafficAgent] = []

    for prefix, cls in (("veh", spec.vehicles), ("ped", spec.humans)):
        kind = "vehicle" if prefix == "veh" else "human"
        base = len(lanes)
        for lane in cls.lanes:
            lanes.append(lane)
            lengths.append(polyline_length(lane))
        for i in range(cls.count):
            lane_index = base + i % len(cls.lanes)
            length = lengths[lane_index]
            arc = rng.uniform(0.0, length)
            speed = rng.uniform(*cls.speed_range_mps)
            position, waypoint = _locate(lanes[lane_index], arc)
            agents.append(
                TrafficAgent(
                    id=f"{prefix}{i + 1}",
                    kind=kind,
                    lane_index=lane_index,
                    arc_s=arc,
                    speed_mps=speed,
                    position=position,
                    waypoint_index=waypoint,
                )
            )
    return TrafficState(agents=tuple(agents), lanes=tuple(lanes), lane_lengths=tuple(lengths))


def _locate(lane: tuple[Vec3, ...], s: float) -> tuple[Vec3, int]:
    remaining = s
    for idx, (a, b) in enumerate(zip(lane, lane[1:])):
        seg = dist(a, b)
        if remaining <= seg:
            if seg == 0.0:
                return a, idx
            t = remaining / seg
            return (
                a[0] + (b[0] - a[0]) * t,
                a[1] + (b[1] - a[1]) * t,
                a[2] + (b[2] - a[2]) * t,
            ), idx
        remaining -= seg
    return lane[-1], max(len(lane) - 2, 0)


def step_traffic(traffic: TrafficState, dt: float) -> TrafficState:
    """Advance every agent by arc length, wrapping at the lane end."""
    if not traffic.agents:
        return traffic
    agents = []
    for agent in traffic.agents:
        length = traffic.lane_lengths[agent.lane_index]
        arc = agent.arc_s + agent.speed_mps * dt
        if length > 0.0:
            arc = arc % length
        position, waypoint = _locate(traffic.lanes[agent.lane_index], arc)
        agents.append(
            replace(agent, arc_s=arc, position=position, waypoint_index=waypoint)
        )
    return replace(traffic, agents=tuple(agents))


def grounded(state: DroneState, spec: ScenarioSpec, altitude_tolerance_m: float = 0.2) -> bool:
    """True when the drone sits at ground level near the station pad."""
    station = spec.ground_station
    dx = state.position[0] - station[0]
    dy = state.position[1] - station[1]
    pad = spec.drone.landing_pad_radius_m
    return (
        dx * dx + dy * dy <= pad * pad
        and abs(state.position[2] - station[2]) <= altitude_tolerance_m
    )
