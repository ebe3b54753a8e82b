"""Session log serialization: exact round-trips and corruption handling."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bridgesim.dynamics import CollisionReport, ControlInput
from bridgesim.sessionlog import (
    SessionLogError,
    SessionLogWriter,
    frame_inputs,
    logged_messages,
    read_session_log,
)
from bridgesim.telemetry import (
    CrashEvent,
    FeedbackMessage,
    FrameRecord,
    MessageKind,
    SnapshotEvent,
)

from conftest import tiny_scenario_doc

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
axis = st.floats(-1.0, 1.0)


def example_record(index=0):
    return FrameRecord(
        index=index,
        control=ControlInput(forward=0.25, rotate=-1.0, light=True),
        position=(1.5, -2.25, 3.089),
        yaw=-0.7853981633974483,
        speed=3.1,
        battery_pct=99.96,
        collision=CollisionReport(min_clearance=4.75),
        task_id=2,
        l_star=0.125,
        speeding=False,
    )


def write_minimal(path, records, events=(), end=("landed_at_station", None, None)):
    doc = tiny_scenario_doc()
    with SessionLogWriter(str(path)) as writer:
        writer.write_header(doc, "p1", 1, 7, 50.0, "scripted", False)
        for rec in records:
            writer.write_frame(rec)
        for ev in events:
            if isinstance(ev, SnapshotEvent):
                writer.write_snapshot(ev)
            elif isinstance(ev, CrashEvent):
                writer.write_crash(ev)
            else:
                writer.write_message(ev)
        if end is not None:
            reason, frames, flight = end
            writer.write_end(
                reason,
                frames if frames is not None else len(records),
                flight if flight is not None else len(records) / 50.0,
            )
    return str(path)


def test_round_trip_preserves_every_field(tmp_path):
    rec = example_record()
    events = [
        SnapshotEvent(0, (1.5, -2.25, 3.089), ("d1", "d2"), "d1"),
        CrashEvent(0, "other", "pier", "pier_a1"),
        FeedbackMessage(MessageKind.SPEEDING, "Speeding: 9.0 m/s", 0),
    ]
    path = write_minimal(tmp_path / "log.jsonl", [rec], events)
    log = read_session_log(path)
    assert log.header["participant"] == "p1"
    assert log.header["repetition"] == 1
    assert log.scenario_doc == tiny_scenario_doc()
    assert log.frames == (rec,)
    assert log.end["reason"] == "landed_at_station"
    assert log.end["frames"] == 1
    snapshot, crash, message = log.events
    assert snapshot["visible"] == ["d1", "d2"]
    assert crash["object_id"] == "pier_a1"
    assert logged_messages(log) == [events[2]]


def test_frame_inputs_reproduce_observables(tmp_path):
    rec = example_record()
    path = write_minimal(tmp_path / "log.jsonl", [rec])
    (fi,) = frame_inputs(read_session_log(path))
    assert fi.control == rec.control
    assert fi.position == rec.position
    assert fi.collision == rec.collision
    assert fi.speed == rec.speed


@settings(max_examples=50, deadline=None)
@given(
    forward=axis,
    up=axis,
    yaw=st.floats(-math.pi, math.pi),
    speed=st.floats(0.0, 15.0),
    battery=st.floats(0.0, 100.0),
    clearance=st.floats(0.0, 50.0),
    l_star=st.floats(0.0, 200.0),
)
def test_floats_survive_exactly(tmp_path_factory, forward, up, yaw, speed, battery, clearance, l_star):
    rec = FrameRecord(
        index=0,
        control=ControlInput(forward=forward, up=up),
        position=(yaw * 2.0, speed, battery),
        yaw=yaw,
        speed=speed,
        battery_pct=battery,
        collision=CollisionReport(min_clearance=clearance),
        task_id=None,
        l_star=l_star,
        speeding=False,
    )
    path = write_minimal(tmp_path_factory.mktemp("logs") / "log.jsonl", [rec])
    log = read_session_log(path)
    assert log.frames[0] == rec  # bit-exact, not approximately equal


def test_infinite_clearance_is_rejected_at_write_time(tmp_path):
    # The writer refuses non-JSON floats rather than emitting Infinity.
    rec = example_record()
    bad = FrameRecord(
        index=0,
        control=rec.control,
        position=rec.position,
        yaw=rec.yaw,
        speed=rec.speed,
        battery_pct=rec.battery_pct,
        collision=CollisionReport(),  # min_clearance defaults to infinity
        task_id=None,
        l_star=rec.l_star,
        speeding=False,
    )
    with pytest.raises(ValueError):
        write_minimal(tmp_path / "log.jsonl", [bad])


def test_truncated_tail_names_the_byte_offset(tmp_path):
    path = write_minimal(tmp_path / "log.jsonl", [example_record()])
    data = open(path, "rb").read()
    cut = data[:-10]
    offset = cut.rfind(b"\n") + 1
    open(path, "wb").write(cut)
    with pytest.raises(SessionLogError, match=f"truncated record at byte {offset}"):
        read_session_log(path)


def test_corrupt_json_line_is_reported(tmp_path):
    path = write_minimal(tmp_path / "log.jsonl", [example_record()])
    with open(path, "a", encoding="utf-8") as fh:
        fh.write("{not json}\n")
    with pytest.raises(SessionLogError, match="corrupt record at byte"):
        read_session_log(path)


def test_unknown_record_kind_is_rejected(tmp_path):
    path = write_minimal(tmp_path / "log.jsonl", [example_record()])
    with open(path, "a", encoding="utf-8") as fh:
        fh.write('{"kind":"mystery"}\n')
    with pytest.raises(SessionLogError, match="unknown record kind 'mystery'"):
        read_session_log(path)


def test_unsupported_version_is_rejected(tmp_path):
    path = write_minimal(tmp_path / "log.jsonl", [example_record()])
    data = open(path, "r", encoding="utf-8").read()
    data = data.replace('"version":1', '"version":2', 1)
    open(path, "w", encoding="utf-8", newline="\n").write(data)
    with pytest.raises(SessionLogError, match="log version 2 unsupported"):
        read_session_log(path)


def test_missing_header_is_rejected(tmp_path):
    path = tmp_path / "log.jsonl"
    path.write_text('{"kind":"end","reason":"aborted","frames":0,"flight_time_s":0.0}\n')
    with pytest.raises(SessionLogError, match="no header record"):
        read_session_log(str(path))


def test_writer_is_single_use(tmp_path):
    writer = SessionLogWriter(str(tmp_path / "log.jsonl"))
    writer.close()
    with pytest.raises(SessionLogError, match="closed"):
        writer.write_end("aborted", 0, 0.0)
