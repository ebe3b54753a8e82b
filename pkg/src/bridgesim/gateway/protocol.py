"""Wire protocol between the session server and the cockpit client.

Messages are newline-delimited JSON objects, one message per line:

    {"kind": "<kind>", "seq": <int>, "payload": {...}}

The handshake message carries a ``v`` field inside its payload; both ends
refuse to talk across protocol versions.  Sequence numbers increase
strictly per direction; gaps are allowed (the server drops stale frames
for slow clients rather than delaying the simulation).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from bridgesim.dynamics import ControlInput, DroneState, TrafficState
from bridgesim.scenario import ScenarioSpec
from bridgesim.telemetry import FrameTick, HudState

PROTOCOL_VERSION = 1


class ProtocolError(ValueError):
    pass


class MessageKind(str, Enum):
    HELLO = "hello"
    SCENARIO_SUMMARY = "scenario_summary"
    CONTROL = "control"
    FRAME = "frame"
    FEEDBACK = "feedback"
    HUD = "hud"
    SESSION_END = "session_end"
    REPORT_READY = "report_ready"
    ERROR = "error"
    QUESTIONNAIRE = "questionnaire"


# Direction rules: the cockpit only ever sends these three kinds.
CLIENT_KINDS = frozenset(
    {MessageKind.HELLO, MessageKind.CONTROL, MessageKind.QUESTIONNAIRE}
)
SERVER_KINDS = frozenset(
    {
        MessageKind.SCENARIO_SUMMARY,
        MessageKind.FRAME,
        MessageKind.FEEDBACK,
        MessageKind.HUD,
        MessageKind.SESSION_END,
        MessageKind.REPORT_READY,
        MessageKind.ERROR,
    }
)


@dataclass(frozen=True)
class WireMessage:
    kind: MessageKind
    seq: int
    payload: dict


def encode_message(message: WireMessage) -> str:
    """One compact JSON line, newline terminated."""
    doc = {
        "kind": message.kind.value,
        "seq": message.seq,
        "payload": message.payload,
    }
    return json.dumps(doc, separators=(",", ":"), allow_nan=False) + "\n"


def decode_message(line: str) -> WireMessage:
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed message: {exc}") from None
    if not isinstance(doc, dict):
        raise ProtocolError("message must be a JSON object")
    try:
        kind = MessageKind(doc["kind"])
    except KeyError:
        raise ProtocolError("message missing kind") from None
    except ValueError:
        raise ProtocolError(f"unknown message kind {doc.get('kind')!r}") from None
    seq = doc.get("seq")
    if not isinstance(seq, int) or isinstance(seq, bool):
        raise ProtocolError("message seq must be an integer")
    payload = doc.get("payload")
    if not isinstance(payload, dict):
        raise ProtocolError("message payload must be an object")
    return WireMessage(kind=kind, seq=seq, payload=payload)


class SequenceCounter:
    """Allocates strictly increasing sequence numbers for one direction."""

    def __init__(self) -> None:
        self._next = 0

    def take(self) -> int:
        value = self._next
        self._next += 1
        return value


class SequenceChecker:
    """Rejects out-of-order sequence numbers on the receiving side."""

    def __init__(self) -> None:
        self._last = -1

    def accept(self, seq: int) -> None:
        if seq <= self._last:
            raise ProtocolError(
                f"sequence number {seq} not greater than {self._last}"
            )
        self._last = seq


def check_direction(message: WireMessage, from_client: bool) -> None:
    allowed = CLIENT_KINDS if from_client else SERVER_KINDS
    if message.kind not in allowed:
        side = "client" if from_client else "server"
        raise ProtocolError(f"kind {message.kind.value} not allowed from {side}")


# ---------------------------------------------------------------------------
# Payload builders


def hello_payload(participant: str | None = None) -> dict:
    payload: dict = {"v": PROTOCOL_VERSION}
    if participant is not None:
        payload["participant"] = participant
    return payload


def check_hello(payload: Mapping) -> None:
    version = payload.get("v")
    if version != PROTOCOL_VERSION:
        raise ProtocolError(
            f"protocol version mismatch: got {version!r}, need {PROTOCOL_VERSION}"
        )


def scenario_summary_payload(scenario: ScenarioSpec) -> dict:
    """Everything the cockpit needs to render and label the scenario.

    All displayed thresholds stay server side; the client only receives
    scenario geometry and job parameters.
    """
    job = scenario.job
    drone = scenario.drone
    tasks = [
        {
            "id": t.task_id,
            "name": t.name,
            "points": [list(p) for p in t.points],
            "corridor_m": t.corridor_m,
            "recommended_distance_m": list(t.recommended_distance_m),
            "speed_limit_mps": t.speed_limit_mps,
            "light_required": t.light_required,
        }
        for t in scenario.tasks
    ]
    elements = []
    for element in scenario.elements:
        lo, hi = element.shape.aabb
        elements.append(
            {
                "id": element.id,
                "kind": element.kind.value,
                "aabb": [list(lo), list(hi)],
                "crashable": element.crashable,
            }
        )
    defects = [
        {"id": d.id, "position": list(d.position), "host": d.host_element}
        for d in scenario.defects
    ]
    return {
        "name": scenario.name,
        "ground_station": list(scenario.ground_station),
        "job": {
            "frame_rate_hz": job.frame_rate_hz,
            "target_time_s": job.target_time_s,
            "max_flight_time_s": job.max_flight_time_s,
            "max_speed_mps": job.max_speed_mps,
            "battery_capacity_pct": job.battery_capacity_pct,
            "snapshot_range_m": job.snapshot_range_m,
            "camera_fov_deg": [job.camera_hfov_deg, job.camera_vfov_deg],
        },
        "drone": {
            "collision_radius_m": drone.collision_radius_m,
            "max_forward_speed_mps": drone.max_forward_speed_mps,
            "max_sideward_speed_mps": drone.max_sideward_speed_mps,
            "max_vertical_speed_mps": drone.max_vertical_speed_mps,
            "rotation_rate_rad_s": drone.rotation_rate_rad_s,
        },
        "tasks": tasks,
        "elements": elements,
        "defects": defects,
    }


def control_payload(
    forward: float = 0.0,
    right: float = 0.0,
    up: float = 0.0,
    rotate: float = 0.0,
    light: bool = False,
    snapshot: bool = False,
) -> dict:
    return {
        "axes": {"forward": forward, "right": right, "up": up, "rotate": rotate},
        "light": bool(light),
        "snapshot": bool(snapshot),
    }


def control_from_payload(payload: Mapping) -> tuple[ControlInput, bool]:
    """Parse a control payload; True when any axis needed clamping."""
    axes = payload.get("axes", {})
    if not isinstance(axes, Mapping):
        raise ProtocolError("control axes must be an object")
    values = {}
    for name in ("forward", "right", "up", "rotate"):
        raw = axes.get(name, 0.0)
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ProtocolError(f"control axis {name} must be a number")
        values[name] = float(raw)
    control = ControlInput(
        forward=values["forward"],
        right=values["right"],
        up=values["up"],
        rotate=values["rotate"],
        light=bool(payload.get("light", False)),
        snapshot=bool(payload.get("snapshot", False)),
    )
    clamped = control.clamped()
    needed_clamp = any(
        getattr(control, name) != getattr(clamped, name)
        for name in ("forward", "right", "up", "rotate")
    )
    return control, needed_clamp


def frame_payload(
    index: int,
    sim_time_s: float,
    state: DroneState,
    tick: FrameTick,
    traffic: TrafficState,
) -> dict:
    record = tick.record
    return {
        "i": index,
        "t": sim_time_s,
        "position": list(state.position),
        "yaw": state.yaw,
        "speed_mps": state.speed,
        "battery_pct": state.battery_pct,
        "light_on": state.light_on,
        "task": record.task_id,
        "path_distance_m": record.l_star,
        "clearance_m": record.collision.min_clearance,
        "traffic": [
            {"id": agent.id, "kind": agent.kind, "position": list(agent.position)}
            for agent in traffic.agents
        ],
    }


def hud_payload(hud: HudState) -> dict:
    return {
        "battery_pct": hud.battery_pct,
        "battery_color": hud.battery_color,
        "battery_flashing": hud.battery_flashing,
        "speed_mps": hud.speed_mps,
        "light_on": hud.light_on,
    }


def feedback_payload(tick: FrameTick) -> dict:
    def rows(messages: Sequence) -> list[dict]:
        return [{"kind": m.kind.value, "text": m.text} for m in messages]

    return {"active": rows(tick.messages), "new": rows(tick.new_messages)}


def session_end_payload(reason: str, frames: int, flight_time_s: float) -> dict:
    return {"reason": reason, "frames": frames, "flight_time_s": flight_time_s}


def error_payload(code: str, detail: str) -> dict:
    return {"code": code, "detail": detail}
