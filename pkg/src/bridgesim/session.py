"""Session orchestration: fixed-rate loop from takeoff to termination.

A session couples an input source (human via gateway, scripted timeline,
or closed-loop waypoint autopilot) to the physics step, collision pass,
telemetry pipeline, and log writer.  Frame 0 is the first frame with an
upward command while grounded; the session ends at the first of landing
at the station, a traffic crash, battery exhaustion, or abort.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Sequence

from .assessment import ScoreCard, build_scorecard
from .dynamics import (
    ControlInput,
    DroneState,
    TrafficState,
    camera_sees,
    collision_index,
    detect_collisions,
    drain_battery,
    flight_time_exceeded,
    init_traffic,
    step,
    step_traffic,
)
from .geometry import Vec3
from .scenario import ScenarioSpec, ScoringWeights, scenario_from_dict, scenario_to_dict
from .sessionlog import SessionLog, SessionLogWriter, frame_inputs, read_session_log
from .telemetry import (
    FrameInput,
    FrameTick,
    TelemetryPipeline,
    TelemetryResult,
    analyze_frames,
)

LANDING_RADIUS_M = 3.0
LANDING_MAX_ALTITUDE_M = 0.2
LANDING_MAX_SPEED_MPS = 0.2
LANDING_HOLD_FRAMES = 25
# Scripted sources get this long (in frames) to issue an upward command
# before the session is abandoned as never-started.
MAX_PRE_TAKEOFF_FRAMES = 30_000


class SessionError(Exception):
    pass


class SessionMode(str, Enum):
    INTERACTIVE = "interactive"
    SCRIPTED = "scripted"
    REPLAY = "replay"


class EndReason(str, Enum):
    LANDED_AT_STATION = "landed_at_station"
    CRASH_TRAFFIC = "crash_traffic"
    BATTERY_EXHAUSTED = "battery_exhausted"
    ABORTED = "aborted"


@dataclass(frozen=True)
class SessionConfig:
    scenario: ScenarioSpec
    mode: SessionMode = SessionMode.SCRIPTED
    seed: int = 0
    participant_id: str = "anonymous"
    repetition: int = 1
    practice: bool = False
    log_path: str | None = None


@dataclass(frozen=True)
class SessionOutcome:
    end_reason: EndReason
    frame_count: int
    flight_time_s: float
    log_path: str | None
    result: TelemetryResult
    card: ScoreCard


class InputSource(Protocol):
    def next_control(self, frame_index: int, state: DroneState) -> ControlInput | None:
        """Control for the next frame; None aborts the session."""


@dataclass(frozen=True)
class TimelineEntry:
    start: int
    end: int  # exclusive
    control: ControlInput


class ScriptedPilot:
    """Open-loop input source: a sorted, non-overlapping frame timeline.

    Ticks are counted from the first poll, including any pre-takeoff
    frames; past the final entry the source reports exhaustion.
    """

    def __init__(self, entries: Sequence[TimelineEntry]):
        prev_end = -1
        for entry in entries:
            if entry.start < 0 or entry.end <= entry.start:
                raise SessionError(f"bad timeline range [{entry.start}, {entry.end})")
            if entry.start < prev_end:
                raise SessionError("timeline entries overlap or are unsorted")
            prev_end = entry.end
        self.entries = tuple(entries)
        self._tick = 0

    @classmethod
    def from_dict(cls, doc: dict) -> "ScriptedPilot":
        entries = []
        for item in doc.get("timeline", []):
            ctrl = item.get("control", {})
            entries.append(
                TimelineEntry(
                    start=item["from"],
                    end=item["until"],
                    control=ControlInput(
                        forward=ctrl.get("forward", 0.0),
                        right=ctrl.get("right", 0.0),
                        up=ctrl.get("up", 0.0),
                        rotate=ctrl.get("rotate", 0.0),
                        light=ctrl.get("light", False),
                        snapshot=ctrl.get("snapshot", False),
                    ),
                )
            )
        return cls(entries)

    def next_control(self, frame_index: int, state: DroneState) -> ControlInput | None:
        tick = self._tick
        self._tick += 1
        if self.entries and tick >= self.entries[-1].end:
            return None
        for entry in self.entries:
            if entry.start <= tick < entry.end:
                return entry.control
        return ControlInput()


@dataclass(frozen=True)
class MissionStep:
    kind: str  # goto | face | hover | snapshot | light
    target: Vec3 | None = None
    speed: float = 2.0
    tolerance: float = 0.05
    frames: int = 0


class WaypointPilot:
    """Closed-loop autopilot that tracks waypoints exactly.

    Inverts the drag relaxation and wind push each frame to command the
    velocity that lands the drone on the straight line to the target, so
    the flown track follows mission legs to float precision.  Used by the
    scripted end-to-end fixtures.
    """

    def __init__(self, scenario: ScenarioSpec, steps: Sequence[MissionStep]):
        self.scenario = scenario
        self.steps = list(steps)
        self._step_index = 0
        self._hover_left = 0
        self._light_on = False

    @classmethod
    def from_dict(cls, scenario: ScenarioSpec, doc: dict) -> "WaypointPilot":
        steps = []
        for item in doc.get("mission", []):
            kind = item["kind"]
            steps.append(
                MissionStep(
                    kind=kind,
                    target=tuple(item["target"]) if "target" in item else None,
                    speed=item.get("speed", 2.0),
                    tolerance=item.get("tolerance", 0.05),
                    frames=item.get("frames", 0),
                )
            )
        return cls(scenario, steps)

    def next_control(self, frame_index: int, state: DroneState) -> ControlInput | None:
        drone = self.scenario.drone
        job = self.scenario.job
        dt = 1.0 / job.frame_rate_hz

        while self._step_index < len(self.steps):
            step_def = self.steps[self._step_index]
            if step_def.kind == "goto":
                to_target = (
                    step_def.target[0] - state.position[0],
                    step_def.target[1] - state.position[1],
                    step_def.target[2] - state.position[2],
                )
                dist = math.sqrt(
                    to_target[0] ** 2 + to_target[1] ** 2 + to_target[2] ** 2
                )
                if dist <= step_def.tolerance:
                    self._step_index += 1
                    continue
                # Desired speed covers the remaining distance without
                # overshooting the waypoint this frame.
                speed = min(step_def.speed, dist / dt)
                scale = speed / dist
                desired = (
                    to_target[0] * scale,
                    to_target[1] * scale,
                    to_target[2] * scale,
                )
                return self._steer(state, desired, 0.0, dt)
            if step_def.kind == "face":
                want = math.atan2(
                    step_def.target[1] - state.position[1],
                    step_def.target[0] - state.position[0],
                )
                delta = _wrap_angle(want - state.yaw)
                if abs(delta) < 1e-9:
                    self._step_index += 1
                    continue
                # Positive rotate turns clockwise (decreasing yaw).
                max_turn = drone.rotation_rate_rad_s * dt
                rotate = -delta / max_turn
                rotate = max(-1.0, min(1.0, rotate))
                return self._steer(state, (0.0, 0.0, 0.0), rotate, dt)
            if step_def.kind == "hover":
                if self._hover_left == 0:
                    self._hover_left = step_def.frames
                if self._hover_left > 0:
                    self._hover_left -= 1
                    if self._hover_left == 0:
                        self._step_index += 1
                    return self._steer(state, (0.0, 0.0, 0.0), 0.0, dt)
                self._step_index += 1
                continue
            if step_def.kind == "snapshot":
                self._step_index += 1
                ctrl = self._steer(state, (0.0, 0.0, 0.0), 0.0, dt)
                return ControlInput(
                    forward=ctrl.forward,
                    right=ctrl.right,
                    up=ctrl.up,
                    rotate=0.0,
                    light=ctrl.light,
                    snapshot=True,
                )
            if step_def.kind == "light":
                self._step_index += 1
                self._light_on = not self._light_on
                ctrl = self._steer(state, (0.0, 0.0, 0.0), 0.0, dt)
                return ControlInput(
                    forward=ctrl.forward,
                    right=ctrl.right,
                    up=ctrl.up,
                    rotate=0.0,
                    light=True,
                    snapshot=False,
                )
            raise SessionError(f"unknown mission step kind {step_def.kind!r}")
        return None

    def _steer(
        self, state: DroneState, desired: Vec3, rotate: float, dt: float
    ) -> ControlInput:
        """Command velocity that makes the post-step velocity equal the
        desired one, compensating drag relaxation and wind."""
        drone = self.scenario.drone
        wind = self.scenario.wind
        if drone.slow_down_time_s > 0.0:
            alpha = 1.0 - math.exp(-dt / drone.slow_down_time_s)
        else:
            alpha = 1.0
        force = wind.force_newtons
        wind_dv = (
            wind.direction[0] * force / drone.mass_kg * dt,
            wind.direction[1] * force / drone.mass_kg * dt,
            wind.direction[2] * force / drone.mass_kg * dt,
        )
        v = state.velocity
        cmd = (
            v[0] + (desired[0] - v[0] - wind_dv[0]) / alpha,
            v[1] + (desired[1] - v[1] - wind_dv[1]) / alpha,
            v[2] + (desired[2] - v[2] - wind_dv[2]) / alpha,
        )
        # The step rotates yaw before applying the command; reproduce it.
        yaw = state.yaw - rotate * drone.rotation_rate_rad_s * dt
        cos_y = math.cos(yaw)
        sin_y = math.sin(yaw)
        body_fwd = cmd[0] * cos_y + cmd[1] * sin_y
        body_right = cmd[0] * sin_y - cmd[1] * cos_y
        return ControlInput(
            forward=_clamp1(body_fwd / drone.max_forward_speed_mps),
            right=_clamp1(body_right / drone.max_sideward_speed_mps),
            up=_clamp1(cmd[2] / drone.max_vertical_speed_mps),
            rotate=_clamp1(rotate),
            light=False,
            snapshot=False,
        )


def _clamp1(x: float) -> float:
    return max(-1.0, min(1.0, x))


def _wrap_angle(a: float) -> float:
    while a > math.pi:
        a -= 2.0 * math.pi
    while a < -math.pi:
        a += 2.0 * math.pi
    return a


def initial_state(scenario: ScenarioSpec) -> DroneState:
    return DroneState(
        position=scenario.ground_station,
        velocity=(0.0, 0.0, 0.0),
        yaw=0.0,
        battery_pct=scenario.job.battery_capacity_pct,
        light_on=False,
        flight_time_s=0.0,
    )


class SessionLoop:
    """Stepwise session driver; the gateway and run() both use it."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.scenario = config.scenario
        self.job = self.scenario.job
        self.dt = 1.0 / self.job.frame_rate_hz
        self.state = initial_state(self.scenario)
        self.traffic: TrafficState = init_traffic(self.scenario.traffic, config.seed)
        self._elements = collision_index(self.scenario)
        self.pipeline = TelemetryPipeline(
            self.scenario.tasks, self.job, visible_fn=self._visible
        )
        self.started = False
        self.ended = False
        self.end_reason: EndReason | None = None
        self.frame_index = -1
        self._landing_streak = 0
        self._pre_takeoff_polls = 0
        self.writer: SessionLogWriter | None = None
        if config.log_path is not None:
            os.makedirs(os.path.dirname(config.log_path) or ".", exist_ok=True)
            self.writer = SessionLogWriter(config.log_path)
            self.writer.write_header(
                scenario_doc=scenario_to_dict(self.scenario),
                participant=config.participant_id,
                repetition=config.repetition,
                seed=config.seed,
                frame_rate_hz=self.job.frame_rate_hz,
                mode=config.mode.value,
                practice=config.practice,
            )

    def _visible(self, frame: FrameInput) -> tuple[str, ...]:
        probe = DroneState(
            position=frame.position,
            velocity=(0.0, 0.0, 0.0),
            yaw=frame.yaw,
            battery_pct=frame.battery_pct,
            light_on=frame.control.light,
            flight_time_s=0.0,
        )
        return tuple(
            d.id for d in self.scenario.defects if camera_sees(probe, d, self.job)
        )

    def offer_pre_takeoff(self, control: ControlInput) -> bool:
        """Consume one pre-takeoff poll; True once the drone lifts off."""
        if self.started:
            return True
        self._pre_takeoff_polls += 1
        if control.clamped().up > 0.0:
            self.started = True
            return True
        return False

    @property
    def pre_takeoff_exhausted(self) -> bool:
        return self._pre_takeoff_polls >= MAX_PRE_TAKEOFF_FRAMES

    def tick(self, control: ControlInput) -> FrameTick:
        """Advance one frame; callers must check .ended afterwards."""
        if self.ended:
            raise SessionError("session already ended")
        if not self.started:
            raise SessionError("session has not started (no takeoff yet)")
        self.frame_index += 1
        control = control.clamped()

        self.state = step(self.state, control, self.scenario, self.dt)
        self.traffic = step_traffic(self.traffic, self.dt)
        # Drain against the exact frame-count elapsed time rather than a
        # running dt sum, so the strict exceedance test agrees with the
        # frames/rate arithmetic used when scoring the finished log.
        elapsed = (self.frame_index + 1) / self.job.frame_rate_hz
        self.state = drain_battery(
            self.state, elapsed - self.state.flight_time_s, self.job
        )
        collision = detect_collisions(
            self.state, self.scenario, self.traffic, self._elements
        )

        frame = FrameInput(
            control=control,
            position=self.state.position,
            yaw=self.state.yaw,
            speed=self.state.speed,
            battery_pct=self.state.battery_pct,
            collision=collision,
        )
        tick = self.pipeline.observe(frame)

        if self.writer is not None:
            self.writer.write_frame(tick.record)
            if tick.new_snapshot is not None:
                self.writer.write_snapshot(tick.new_snapshot)
            for crash in tick.new_crashes:
                self.writer.write_crash(crash)
            for msg in tick.new_messages:
                self.writer.write_message(msg)

        # Termination checks in fixed precedence within the frame.
        if collision.hit_human or collision.hit_vehicle:
            self._end(EndReason.CRASH_TRAFFIC)
        elif flight_time_exceeded(self.state, self.job):
            self._end(EndReason.BATTERY_EXHAUSTED)
        elif self._landed():
            self._end(EndReason.LANDED_AT_STATION)
        return tick

    def _landed(self) -> bool:
        station = self.scenario.ground_station
        dx = self.state.position[0] - station[0]
        dy = self.state.position[1] - station[1]
        horizontal = math.sqrt(dx * dx + dy * dy)
        altitude = self.state.position[2] - station[2]
        if (
            horizontal <= LANDING_RADIUS_M
            and altitude < LANDING_MAX_ALTITUDE_M
            and self.state.speed < LANDING_MAX_SPEED_MPS
        ):
            self._landing_streak += 1
        else:
            self._landing_streak = 0
        return self._landing_streak >= LANDING_HOLD_FRAMES

    def _end(self, reason: EndReason) -> None:
        self.ended = True
        self.end_reason = reason

    def abort(self) -> None:
        if not self.ended:
            self._end(EndReason.ABORTED)

    def finish(self) -> SessionOutcome:
        """Finalize telemetry, score, and close the log."""
        if not self.ended:
            self._end(EndReason.ABORTED)
        result = self.pipeline.finalize()
        frames = len(result.records)
        flight_time = frames / self.job.frame_rate_hz
        if self.writer is not None:
            self.writer.write_end(self.end_reason.value, frames, flight_time)
            self.writer.close()
        card = build_scorecard(result, self.job, self.scenario.defect_count)
        return SessionOutcome(
            end_reason=self.end_reason,
            frame_count=frames,
            flight_time_s=flight_time,
            log_path=self.config.log_path,
            result=result,
            card=card,
        )


def run(config: SessionConfig, source: InputSource) -> SessionOutcome:
    """Drive a full scripted session synchronously at simulated rate."""
    loop = SessionLoop(config)
    while not loop.started:
        control = source.next_control(loop.frame_index, loop.state)
        if control is None or loop.pre_takeoff_exhausted:
            loop.abort()
            return loop.finish()
        loop.offer_pre_takeoff(control)
        if loop.started:
            loop.tick(control)
    while not loop.ended:
        control = source.next_control(loop.frame_index, loop.state)
        if control is None:
            loop.abort()
            break
        loop.tick(control)
    return loop.finish()


@dataclass(frozen=True)
class ReplayOutcome:
    log: SessionLog
    result: TelemetryResult
    card: ScoreCard
    matches_log: bool  # recomputed per-frame analysis equals logged fields


def replay(log_path: str, weights: ScoringWeights | None = None) -> ReplayOutcome:
    """Re-run telemetry and scoring over a logged session.

    The scenario embedded in the header drives the same camera model, so
    the recomputed ledger and card must match the original run exactly;
    weights may be overridden to re-score the same events.
    """
    log = read_session_log(log_path)
    scenario = scenario_from_dict(log.scenario_doc)
    job = scenario.job

    def visible(frame: FrameInput) -> tuple[str, ...]:
        probe = DroneState(
            position=frame.position,
            velocity=(0.0, 0.0, 0.0),
            yaw=frame.yaw,
            battery_pct=frame.battery_pct,
            light_on=frame.control.light,
            flight_time_s=0.0,
        )
        return tuple(
            d.id for d in scenario.defects if camera_sees(probe, d, job)
        )

    result = analyze_frames(list(frame_inputs(log)), scenario.tasks, job, visible)
    matches = all(
        logged.task_id == recomputed.task_id
        and logged.l_star == recomputed.l_star
        and logged.speeding == recomputed.speeding
        for logged, recomputed in zip(log.frames, result.records)
    )
    card = build_scorecard(result, job, scenario.defect_count, weights)
    return ReplayOutcome(log=log, result=result, card=card, matches_log=matches)


# ---------------------------------------------------------------------------
# Training history


def history_path(root: str, participant: str) -> str:
    return os.path.join(root, participant, "history.jsonl")


def new_session_dir(root: str, participant: str, practice: bool = False) -> str:
    """Create and return the next rep_<n> (or practice_<n>) directory."""
    base = os.path.join(root, participant)
    os.makedirs(base, exist_ok=True)
    prefix = "practice" if practice else "rep"
    taken = {
        name for name in os.listdir(base) if os.path.isdir(os.path.join(base, name))
    }
    index = 1
    while f"{prefix}_{index}" in taken:
        index += 1
    path = os.path.join(base, f"{prefix}_{index}")
    os.makedirs(path)
    return path


def record_repetition(
    root: str, participant: str, outcome: SessionOutcome
) -> dict:
    """Append one completed session to the participant's history index."""
    entry = {
        "participant": participant,
        "end_reason": outcome.end_reason.value,
        "frames": outcome.frame_count,
        "flight_time_s": outcome.flight_time_s,
        "log_path": outcome.log_path,
        "scores": {
            "conformity": outcome.card.conformity,
            "efficiency": outcome.card.efficiency,
            "safety": outcome.card.safety,
            "accuracy": outcome.card.accuracy,
        },
        "standardized": outcome.card.standardized.as_dict(),
    }
    path = history_path(root, participant)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(entry, separators=(",", ":")))
        fh.write("\n")
    return entry


def load_history(root: str, participant: str) -> list[dict]:
    path = history_path(root, participant)
    if not os.path.exists(path):
        return []
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    return entries


def load_pilot(scenario: ScenarioSpec, path: str) -> InputSource:
    """Load a pilot file: scripted timeline or waypoint mission."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if "mission" in doc:
        return WaypointPilot.from_dict(scenario, doc)
    if "timeline" in doc:
        return ScriptedPilot.from_dict(doc)
    raise SessionError(f"{path} has neither a 'mission' nor a 'timeline' section")
