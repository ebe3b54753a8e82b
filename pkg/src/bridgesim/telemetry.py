"""Frame-stream analysis: on-path corridor tracking, event detection, feedback.

The same analysis runs in two modes that must agree exactly: a streaming
pipeline that consumes one frame at a time during flight (driving the HUD
and live messages), and a batch pass over a complete frame list used for
replay, audit, and scoring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

from .dynamics import CollisionReport, ControlInput
from .geometry import Vec3
from .scenario import JobSpec, TaskSpec

# Corridor miss distance below which the "keep the recommended distance"
# reminder is shown while off-path.
DISTANCE_REMINDER_RANGE_M = 8.0
# Clearance at or below which the obstacle warning is shown.
PROXIMITY_ALERT_CLEARANCE_M = 2.5
# Battery display bands (percent).
BATTERY_GREEN_MIN_PCT = 70.0
BATTERY_YELLOW_MIN_PCT = 30.0


@dataclass(frozen=True)
class FrameInput:
    """Raw per-frame observables handed to the analysis."""

    control: ControlInput
    position: Vec3
    yaw: float
    speed: float
    battery_pct: float
    collision: CollisionReport


@dataclass(frozen=True)
class FrameRecord:
    """One analyzed frame: raw observables plus derived path state."""

    index: int
    control: ControlInput
    position: Vec3
    yaw: float
    speed: float
    battery_pct: float
    collision: CollisionReport
    task_id: int | None
    l_star: float  # miss distance to the nearest task path
    speeding: bool  # causal flag: over the assigned task's limit


@dataclass(frozen=True)
class TaskWindow:
    task_id: int
    start_frame: int
    end_frame: int
    entered: bool
    speed_limit_mps: float

    def contains(self, frame: int) -> bool:
        return self.entered and self.start_frame <= frame <= self.end_frame


@dataclass(frozen=True)
class CrashEvent:
    frame: int
    category: str  # "human" | "vehicle" | "other"
    object_kind: str
    object_id: str | None = None
    task_id: int | None = None  # filled once windows are final; None = transit


@dataclass(frozen=True)
class SnapshotEvent:
    frame: int
    position: Vec3
    visible_ids: tuple[str, ...]
    credited_id: str | None

    @property
    def false_positive(self) -> bool:
        return not self.visible_ids


@dataclass(frozen=True)
class EventLedger:
    crash_human: bool = False
    crash_vehicle: bool = False
    crash_other_count: int = 0
    crash_events: tuple[CrashEvent, ...] = ()
    snapshots: tuple[SnapshotEvent, ...] = ()
    snapshot_count: int = 0
    true_detection_count: int = 0
    battery_failed: bool = False


@dataclass(frozen=True)
class TelemetryResult:
    windows: tuple[TaskWindow, ...]
    ledger: EventLedger
    speeding_final: tuple[bool, ...]  # per frame, over closed windows
    records: tuple[FrameRecord, ...]


class MessageKind(str, Enum):
    SPEEDING = "speeding"
    DISTANCE_REMINDER = "distance_reminder"
    PROXIMITY_OR_CRASH = "proximity_or_crash"


@dataclass(frozen=True)
class FeedbackMessage:
    kind: MessageKind
    text: str
    frame: int


@dataclass(frozen=True)
class HudState:
    battery_pct: float
    battery_color: str
    battery_flashing: bool
    speed_mps: float
    light_on: bool


@dataclass(frozen=True)
class FrameTick:
    """Streaming output for one frame."""

    record: FrameRecord
    hud: HudState
    messages: tuple[FeedbackMessage, ...]  # active this frame
    new_messages: tuple[FeedbackMessage, ...]  # rising-edge subset
    new_snapshot: SnapshotEvent | None = None
    new_crashes: tuple[CrashEvent, ...] = ()


def battery_color(pct: float) -> str:
    if pct >= BATTERY_GREEN_MIN_PCT:
        return "green"
    if pct >= BATTERY_YELLOW_MIN_PCT:
        return "yellow"
    return "red"


# ---------------------------------------------------------------------------
# On-path analysis


def on_path(task: TaskSpec, position: Vec3) -> tuple[bool, float]:
    """Corridor test against one task's reference path.

    Finds the nearest reference point (ties to the earlier index), takes
    the shortest distance to the segment(s) joining it with its adjacent
    point(s), and compares with the task's corridor threshold.  The search
    is deliberately local to the nearest vertex; see the module tests for
    how this relates to the exact polyline distance.
    """
    pts = task.points
    px, py, pz = position

    best_i = 0
    best_d2 = math.inf
    for i, q in enumerate(pts):
        dx = px - q[0]
        dy = py - q[1]
        dz = pz - q[2]
        d2 = dx * dx + dy * dy + dz * dz
        if d2 < best_d2:
            best_d2 = d2
            best_i = i

    l_star = math.inf
    if best_i > 0:
        l_star = _segment_distance(position, pts[best_i - 1], pts[best_i])
    if best_i < len(pts) - 1:
        d = _segment_distance(position, pts[best_i], pts[best_i + 1])
        if d < l_star:
            l_star = d
    return l_star <= task.corridor_m, l_star


def _segment_distance(p: Vec3, a: Vec3, b: Vec3) -> float:
    abx = b[0] - a[0]
    aby = b[1] - a[1]
    abz = b[2] - a[2]
    denom = abx * abx + aby * aby + abz * abz
    apx = p[0] - a[0]
    apy = p[1] - a[1]
    apz = p[2] - a[2]
    if denom > 0.0:
        t = (apx * abx + apy * aby + apz * abz) / denom
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        apx -= abx * t
        apy -= aby * t
        apz -= abz * t
    return math.sqrt(apx * apx + apy * apy + apz * apz)


@dataclass(frozen=True)
class Assignment:
    task_id: int | None
    l_star: float  # min miss distance over all tasks
    assigned_l_star: float = math.inf


def assign_task(tasks: Sequence[TaskSpec], position: Vec3) -> Assignment:
    """Pick at most one task for the frame.

    All corridor tests run; among passing tasks the smallest miss distance
    wins (ties to the smaller task id, tasks being in id order).  The
    minimum miss distance over all tasks is kept for the distance
    reminder.
    """
    best_task: int | None = None
    best_pass = math.inf
    overall = math.inf
    for task in tasks:
        inside, l_star = on_path(task, position)
        if l_star < overall:
            overall = l_star
        if inside and l_star < best_pass:
            best_pass = l_star
            best_task = task.task_id
    return Assignment(task_id=best_task, l_star=overall, assigned_l_star=best_pass)


def task_windows(frames: Sequence[FrameRecord], tasks: Sequence[TaskSpec]) -> tuple[TaskWindow, ...]:
    """First/last assigned frame per task over a complete frame list."""
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for rec in frames:
        if rec.task_id is None:
            continue
        if rec.task_id not in first:
            first[rec.task_id] = rec.index
        last[rec.task_id] = rec.index
    out = []
    for task in tasks:
        t = task.task_id
        if t in first:
            out.append(TaskWindow(t, first[t], last[t], True, task.speed_limit_mps))
        else:
            out.append(TaskWindow(t, -1, -1, False, task.speed_limit_mps))
    return tuple(out)


def speeding_flag(speed: float, frame_index: int, windows: Iterable[TaskWindow]) -> bool:
    """Final speeding predicate: over the limit inside any closed window."""
    for w in windows:
        if w.contains(frame_index) and speed > w.speed_limit_mps:
            return True
    return False


def final_speeding(frames: Sequence[FrameRecord], windows: Sequence[TaskWindow]) -> tuple[bool, ...]:
    return tuple(speeding_flag(rec.speed, rec.index, windows) for rec in frames)


def attribute_crashes(
    events: Sequence[CrashEvent], windows: Sequence[TaskWindow]
) -> tuple[CrashEvent, ...]:
    """Tag each crash with the first task window containing its frame."""
    out = []
    for ev in events:
        task_id = None
        for w in windows:
            if w.contains(ev.frame):
                task_id = w.task_id
                break
        out.append(
            CrashEvent(ev.frame, ev.category, ev.object_kind, ev.object_id, task_id)
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# Streaming pipeline

VisibleFn = Callable[[FrameInput], Sequence[str]]


class TelemetryPipeline:
    """Single-consumer frame analysis with live feedback.

    ``visible_fn`` maps a frame to the defect ids currently visible to the
    camera; the session wires it to the camera model, tests may stub it.
    """

    def __init__(
        self,
        tasks: Sequence[TaskSpec],
        job: JobSpec,
        visible_fn: VisibleFn | None = None,
    ):
        self.tasks = tuple(sorted(tasks, key=lambda t: t.task_id))
        self.job = job
        self.visible_fn = visible_fn or (lambda fi: ())
        self.records: list[FrameRecord] = []
        self._first: dict[int, int] = {}
        self._last: dict[int, int] = {}
        self._crash_human = False
        self._crash_vehicle = False
        self._crash_other = 0
        self._crash_events: list[CrashEvent] = []
        self._snapshots: list[SnapshotEvent] = []
        self._snapshot_count = 0
        self._true_detections = 0
        self._detected: set[str] = set()
        self._prev_collision = CollisionReport()
        self._prev_kinds: set[MessageKind] = set()
        self._next_index = 0

    def observe(self, frame: FrameInput) -> FrameTick:
        index = self._next_index
        self._next_index += 1

        assignment = assign_task(self.tasks, frame.position)
        limit = None
        if assignment.task_id is not None:
            limit = self._limit(assignment.task_id)
            if assignment.task_id not in self._first:
                self._first[assignment.task_id] = index
            self._last[assignment.task_id] = index
        speeding = limit is not None and frame.speed > limit

        col = frame.collision
        prev = self._prev_collision
        frame_crashes: list[CrashEvent] = []
        if col.hit_human:
            self._crash_human = True
            if not prev.hit_human:
                frame_crashes.append(CrashEvent(index, "human", "human"))
        if col.hit_vehicle:
            self._crash_vehicle = True
            if not prev.hit_vehicle:
                frame_crashes.append(CrashEvent(index, "vehicle", "vehicle"))
        if col.hit_object_id is not None and prev.hit_object_id is None:
            self._crash_other += 1
            frame_crashes.append(
                CrashEvent(index, "other", col.hit_object_kind or "object", col.hit_object_id)
            )
        self._crash_events.extend(frame_crashes)

        record = FrameRecord(
            index=index,
            control=frame.control,
            position=frame.position,
            yaw=frame.yaw,
            speed=frame.speed,
            battery_pct=frame.battery_pct,
            collision=col,
            task_id=assignment.task_id,
            l_star=assignment.l_star,
            speeding=speeding,
        )
        self.records.append(record)

        snapshot = None
        if frame.control.snapshot:
            snapshot = self._take_snapshot(frame, record)

        tick = self._feedback(record, prev, snapshot, tuple(frame_crashes))
        self._prev_collision = col
        return tick

    def _limit(self, task_id: int) -> float:
        for task in self.tasks:
            if task.task_id == task_id:
                return task.speed_limit_mps
        raise KeyError(task_id)

    def _take_snapshot(self, frame: FrameInput, record: FrameRecord) -> SnapshotEvent:
        self._snapshot_count += 1
        visible = tuple(self.visible_fn(frame))
        credited = None
        # A snapshot credits at most one not-yet-detected defect so that
        # true detections never exceed the snapshot count.
        for defect_id in visible:
            if defect_id not in self._detected:
                credited = defect_id
                self._detected.add(defect_id)
                self._true_detections += 1
                break
        event = SnapshotEvent(record.index, record.position, visible, credited)
        self._snapshots.append(event)
        return event

    def _feedback(
        self,
        record: FrameRecord,
        prev: CollisionReport,
        snapshot: SnapshotEvent | None,
        crashes: tuple[CrashEvent, ...],
    ) -> FrameTick:
        messages: list[FeedbackMessage] = []
        if record.speeding:
            messages.append(
                FeedbackMessage(
                    MessageKind.SPEEDING,
                    f"Speeding: {record.speed:.1f} m/s is over the task limit",
                    record.index,
                )
            )
        if record.task_id is None and record.l_star <= DISTANCE_REMINDER_RANGE_M:
            messages.append(
                FeedbackMessage(
                    MessageKind.DISTANCE_REMINDER,
                    f"Off the reference path by {record.l_star:.1f} m; "
                    "return to the recommended distance",
                    record.index,
                )
            )
        col = record.collision
        rising_contact = (
            (col.hit_human and not prev.hit_human)
            or (col.hit_vehicle and not prev.hit_vehicle)
            or (col.hit_object_id is not None and prev.hit_object_id is None)
        )
        if col.min_clearance <= PROXIMITY_ALERT_CLEARANCE_M or rising_contact:
            if col.any_contact:
                what = "traffic" if (col.hit_human or col.hit_vehicle) else (
                    col.hit_object_kind or "an obstacle"
                )
                text = f"Contact: the drone touched {what}"
            else:
                text = f"Obstacle within {col.min_clearance:.1f} m of the drone"
            messages.append(FeedbackMessage(MessageKind.PROXIMITY_OR_CRASH, text, record.index))

        hud = HudState(
            battery_pct=record.battery_pct,
            battery_color=battery_color(record.battery_pct),
            battery_flashing=record.battery_pct < BATTERY_YELLOW_MIN_PCT,
            speed_mps=record.speed,
            light_on=record.control.light,
        )

        kinds = {m.kind for m in messages}
        new = tuple(m for m in messages if m.kind not in self._prev_kinds)
        self._prev_kinds = kinds
        return FrameTick(
            record=record,
            hud=hud,
            messages=tuple(messages),
            new_messages=new,
            new_snapshot=snapshot,
            new_crashes=crashes,
        )

    def finalize(self) -> TelemetryResult:
        """Close the stream: windows, final speeding, crash attribution."""
        windows = []
        for task in self.tasks:
            t = task.task_id
            if t in self._first:
                windows.append(
                    TaskWindow(t, self._first[t], self._last[t], True, task.speed_limit_mps)
                )
            else:
                windows.append(TaskWindow(t, -1, -1, False, task.speed_limit_mps))
        windows = tuple(windows)

        n = len(self.records)
        battery_failed = n / self.job.frame_rate_hz > self.job.max_flight_time_s
        ledger = EventLedger(
            crash_human=self._crash_human,
            crash_vehicle=self._crash_vehicle,
            crash_other_count=self._crash_other,
            crash_events=attribute_crashes(self._crash_events, windows),
            snapshots=tuple(self._snapshots),
            snapshot_count=self._snapshot_count,
            true_detection_count=self._true_detections,
            battery_failed=battery_failed,
        )
        records = tuple(self.records)
        return TelemetryResult(
            windows=windows,
            ledger=ledger,
            speeding_final=final_speeding(records, windows),
            records=records,
        )


# ---------------------------------------------------------------------------
# Batch analysis


def analyze_frames(
    inputs: Sequence[FrameInput],
    tasks: Sequence[TaskSpec],
    job: JobSpec,
    visible_fn: VisibleFn | None = None,
) -> TelemetryResult:
    """Whole-log recomputation, independent of the streaming accumulators.

    Windows come from a min/max scan, other-object crashes from maximal
    contact runs, and snapshot bookkeeping from a fresh set walk.  Used by
    replay and as the oracle the streaming pipeline is checked against.
    """
    tasks = tuple(sorted(tasks, key=lambda t: t.task_id))
    visible_fn = visible_fn or (lambda fi: ())

    records: list[FrameRecord] = []
    assigned: dict[int, list[int]] = {t.task_id: [] for t in tasks}
    limits = {t.task_id: t.speed_limit_mps for t in tasks}
    for index, frame in enumerate(inputs):
        assignment = assign_task(tasks, frame.position)
        if assignment.task_id is not None:
            assigned[assignment.task_id].append(index)
        speeding = (
            assignment.task_id is not None and frame.speed > limits[assignment.task_id]
        )
        records.append(
            FrameRecord(
                index=index,
                control=frame.control,
                position=frame.position,
                yaw=frame.yaw,
                speed=frame.speed,
                battery_pct=frame.battery_pct,
                collision=frame.collision,
                task_id=assignment.task_id,
                l_star=assignment.l_star,
                speeding=speeding,
            )
        )

    windows = tuple(
        TaskWindow(t.task_id, min(idx), max(idx), True, t.speed_limit_mps)
        if (idx := assigned[t.task_id])
        else TaskWindow(t.task_id, -1, -1, False, t.speed_limit_mps)
        for t in tasks
    )

    crash_human = any(fi.collision.hit_human for fi in inputs)
    crash_vehicle = any(fi.collision.hit_vehicle for fi in inputs)

    # Maximal contiguous contact runs; a run starting at frame 0 counts.
    crash_events: list[CrashEvent] = []
    other_runs = 0
    for index, frame in enumerate(inputs):
        col = frame.collision
        prev = inputs[index - 1].collision if index > 0 else CollisionReport()
        if col.hit_human and not prev.hit_human:
            crash_events.append(CrashEvent(index, "human", "human"))
        if col.hit_vehicle and not prev.hit_vehicle:
            crash_events.append(CrashEvent(index, "vehicle", "vehicle"))
        if col.hit_object_id is not None and prev.hit_object_id is None:
            other_runs += 1
            crash_events.append(
                CrashEvent(index, "other", col.hit_object_kind or "object", col.hit_object_id)
            )

    snapshots: list[SnapshotEvent] = []
    detected: set[str] = set()
    true_detections = 0
    for record, frame in zip(records, inputs):
        if not frame.control.snapshot:
            continue
        visible = tuple(visible_fn(frame))
        credited = None
        for defect_id in visible:
            if defect_id not in detected:
                credited = defect_id
                detected.add(defect_id)
                true_detections += 1
                break
        snapshots.append(SnapshotEvent(record.index, record.position, visible, credited))

    battery_failed = len(records) / job.frame_rate_hz > job.max_flight_time_s
    ledger = EventLedger(
        crash_human=crash_human,
        crash_vehicle=crash_vehicle,
        crash_other_count=other_runs,
        crash_events=attribute_crashes(crash_events, windows),
        snapshots=tuple(snapshots),
        snapshot_count=sum(1 for fi in inputs if fi.control.snapshot),
        true_detection_count=true_detections,
        battery_failed=battery_failed,
    )
    records_t = tuple(records)
    return TelemetryResult(
        windows=windows,
        ledger=ledger,
        speeding_final=final_speeding(records_t, windows),
        records=records_t,
    )
