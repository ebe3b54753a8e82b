"""Append-only JSONL session logs with exact float round-tripping.

One JSON object per line.  The first line is a header embedding the full
scenario document so a log is self-contained for replay; frame and event
lines follow in stream order; a completed log ends with an end line.
Key order is fixed and floats serialize via the shortest round-trip repr,
so identical sessions produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterator, Mapping

from .dynamics import CollisionReport, ControlInput
from .telemetry import (
    CrashEvent,
    FeedbackMessage,
    FrameInput,
    FrameRecord,
    MessageKind,
    SnapshotEvent,
)

LOG_VERSION = 1


class SessionLogError(Exception):
    pass


def _dumps(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


class SessionLogWriter:
    """Streams records to disk as the session runs."""

    def __init__(self, path: str):
        self.path = path
        self._fh: IO[str] | None = open(path, "w", encoding="utf-8", newline="\n")
        self._wrote_end = False

    def _write(self, obj: dict) -> None:
        if self._fh is None:
            raise SessionLogError("log writer is closed")
        self._fh.write(_dumps(obj))
        self._fh.write("\n")

    def write_header(
        self,
        scenario_doc: Mapping,
        participant: str,
        repetition: int,
        seed: int,
        frame_rate_hz: float,
        mode: str,
        practice: bool,
    ) -> None:
        self._write(
            {
                "kind": "header",
                "version": LOG_VERSION,
                "participant": participant,
                "repetition": repetition,
                "seed": seed,
                "frame_rate_hz": frame_rate_hz,
                "mode": mode,
                "practice": practice,
                "scenario": dict(scenario_doc),
            }
        )

    def write_frame(self, rec: FrameRecord) -> None:
        o = rec.control
        col = rec.collision
        self._write(
            {
                "kind": "frame",
                "i": rec.index,
                "o": [o.forward, o.right, o.up, o.rotate, o.light, o.snapshot],
                "p": list(rec.position),
                "yaw": rec.yaw,
                "v": rec.speed,
                "b": rec.battery_pct,
                "task": rec.task_id,
                "l": rec.l_star,
                "xs": rec.speeding,
                "col": [
                    col.hit_human,
                    col.hit_vehicle,
                    col.hit_object_id,
                    col.hit_object_kind,
                    col.min_clearance,
                ],
            }
        )

    def write_snapshot(self, ev: SnapshotEvent) -> None:
        self._write(
            {
                "kind": "event",
                "event": "snapshot",
                "i": ev.frame,
                "p": list(ev.position),
                "visible": list(ev.visible_ids),
                "credited": ev.credited_id,
            }
        )

    def write_crash(self, ev: CrashEvent) -> None:
        self._write(
            {
                "kind": "event",
                "event": "crash",
                "i": ev.frame,
                "category": ev.category,
                "object_kind": ev.object_kind,
                "object_id": ev.object_id,
            }
        )

    def write_message(self, msg: FeedbackMessage) -> None:
        self._write(
            {
                "kind": "event",
                "event": "message",
                "i": msg.frame,
                "msg_kind": msg.kind.value,
                "text": msg.text,
            }
        )

    def write_end(self, reason: str, frames: int, flight_time_s: float) -> None:
        self._write(
            {
                "kind": "end",
                "reason": reason,
                "frames": frames,
                "flight_time_s": flight_time_s,
            }
        )
        self._wrote_end = True

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "SessionLogWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass(frozen=True)
class LoggedEvent:
    record: dict


@dataclass(frozen=True)
class SessionLog:
    header: dict
    frames: tuple[FrameRecord, ...]
    events: tuple[dict, ...]
    end: dict | None

    @property
    def scenario_doc(self) -> dict:
        return self.header["scenario"]


def _frame_from_doc(doc: dict) -> FrameRecord:
    o = doc["o"]
    col = doc["col"]
    return FrameRecord(
        index=doc["i"],
        control=ControlInput(
            forward=o[0], right=o[1], up=o[2], rotate=o[3], light=o[4], snapshot=o[5]
        ),
        position=tuple(doc["p"]),
        yaw=doc["yaw"],
        speed=doc["v"],
        battery_pct=doc["b"],
        collision=CollisionReport(
            hit_human=col[0],
            hit_vehicle=col[1],
            hit_object_id=col[2],
            hit_object_kind=col[3],
            min_clearance=col[4],
        ),
        task_id=doc["task"],
        l_star=doc["l"],
        speeding=doc["xs"],
    )


def read_session_log(path: str) -> SessionLog:
    """Parse a complete log; truncation errors name the byte offset."""
    header: dict | None = None
    frames: list[FrameRecord] = []
    events: list[dict] = []
    end: dict | None = None
    offset = 0
    with open(path, "r", encoding="utf-8", newline="\n") as fh:
        for raw in fh:
            if not raw.endswith("\n"):
                raise SessionLogError(
                    f"truncated record at byte {offset} in {path}"
                )
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SessionLogError(
                    f"truncated or corrupt record at byte {offset} in {path}: {exc.msg}"
                ) from exc
            kind = doc.get("kind")
            if kind == "header":
                if doc.get("version") != LOG_VERSION:
                    raise SessionLogError(
                        f"log version {doc.get('version')} unsupported "
                        f"(expected {LOG_VERSION})"
                    )
                header = doc
            elif kind == "frame":
                frames.append(_frame_from_doc(doc))
            elif kind == "event":
                events.append(doc)
            elif kind == "end":
                end = doc
            else:
                raise SessionLogError(f"unknown record kind {kind!r} at byte {offset}")
            offset += len(raw.encode("utf-8"))
    if header is None:
        raise SessionLogError(f"{path} has no header record")
    return SessionLog(
        header=header, frames=tuple(frames), events=tuple(events), end=end
    )


def frame_inputs(log: SessionLog) -> Iterator[FrameInput]:
    """Raw per-frame observables for re-analysis."""
    for rec in log.frames:
        yield FrameInput(
            control=rec.control,
            position=rec.position,
            yaw=rec.yaw,
            speed=rec.speed,
            battery_pct=rec.battery_pct,
            collision=rec.collision,
        )


def logged_messages(log: SessionLog) -> list[FeedbackMessage]:
    out = []
    for doc in log.events:
        if doc.get("event") == "message":
            out.append(
                FeedbackMessage(
                    kind=MessageKind(doc["msg_kind"]), text=doc["text"], frame=doc["i"]
                )
            )
    return out
