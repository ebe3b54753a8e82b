"""Acceptance gate: one test per shipping criterion, each printing a
single PASS/FAIL line and enforcing its own runtime budget.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import filecmp
import random
import time
from contextlib import contextmanager

import pytest

from bridgesim.assessment import (
    accuracy_score,
    conformity_score,
    conformity_waterfall,
    efficiency_score,
    emit_report,
    f_beta_measure,
    safety_score,
    standardize_value,
)
from bridgesim.dynamics import CollisionReport, ControlInput
from bridgesim.scenario import (
    JobSpec,
    ScoringWeights,
    TaskSpec,
    load_scenario,
    scenario_from_dict,
)
from bridgesim.session import (
    EndReason,
    MissionStep,
    SessionConfig,
    WaypointPilot,
    load_pilot,
    replay,
    run,
)
from bridgesim.telemetry import (
    EventLedger,
    FrameInput,
    FrameRecord,
    TaskWindow,
    TelemetryPipeline,
    analyze_frames,
    on_path,
)

from conftest import PILOT_PATH, SCENARIO_PATH, tiny_scenario_doc
from oracles import dense_polyline_distance, is_locality_safe, random_locality_safe_case

WEIGHTS = ScoringWeights()
JOB = JobSpec()


@contextmanager
def criterion(label):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {label}: FAIL")
        raise
    print(f"ACCEPTANCE {label}: PASS")


def record(index, speed=0.0, task_id=None):
    return FrameRecord(
        index=index,
        control=ControlInput(),
        position=(0.0, 0.0, 5.0),
        yaw=0.0,
        speed=speed,
        battery_pct=100.0,
        collision=CollisionReport(),
        task_id=task_id,
        l_star=0.0,
        speeding=False,
    )


def frame(position, speed=0.0, control=None, collision=None, battery=100.0):
    return FrameInput(
        control=control or ControlInput(),
        position=tuple(position),
        yaw=0.0,
        speed=speed,
        battery_pct=battery,
        collision=collision or CollisionReport(),
    )


def test_score_endpoints_exact(perfect_run):
    """Analytic endpoints of all four scores, exact to 1e-9, under 1 s."""
    with criterion("score endpoints"):
        started = time.perf_counter()

        # Time score: full marks at the target time, zero at the maximum,
        # and a fixed forfeit on battery exhaustion.
        assert abs(efficiency_score(45_000, 50.0, False, WEIGHTS, JOB) - 100.0) <= 1e-9
        assert abs(efficiency_score(75_000, 50.0, False, WEIGHTS, JOB) - 0.0) <= 1e-9
        assert abs(efficiency_score(45_000, 50.0, True, WEIGHTS, JOB) + 100.0) <= 1e-9

        # The flawless scripted mission earns full path conformity.
        outcome, _ = perfect_run
        assert outcome.end_reason is EndReason.LANDED_AT_STATION
        assert abs(outcome.card.conformity - 100.0) <= 1e-9

        # Never on path while always at triple the limit is the floor.
        records = []
        windows = []
        for t in range(1, 5):
            start = (t - 1) * 10
            windows.append(TaskWindow(t, start, start + 9, True, 4.0))
            records.extend(record(start + k, speed=12.0) for k in range(10))
        floor = conformity_score(records, windows, WEIGHTS)
        assert abs(floor + 100.0) <= 1e-9

        # Safety: one human strike forfeits; forty obstacle strikes clamp.
        assert abs(safety_score(EventLedger(crash_human=True), WEIGHTS) + 100.0) <= 1e-9
        assert (
            abs(safety_score(EventLedger(crash_other_count=40), WEIGHTS) + 100.0)
            <= 1e-9
        )

        assert time.perf_counter() - started < 1.0


def test_path_distance_matches_dense_oracle():
    """10,000 corridor tests against a 1 mm-sampled distance oracle,
    within 2 mm, with matching in/out verdicts away from the boundary."""
    with criterion("path distance oracle"):
        started = time.perf_counter()
        rng = random.Random(20260823)
        checked = 0
        worst = 0.0
        while checked < 10_000:
            points, query, corridor = random_locality_safe_case(rng)
            if not is_locality_safe(points, query):
                continue
            checked += 1
            task = TaskSpec(
                task_id=1,
                points=tuple(points),
                corridor_m=corridor,
                recommended_distance_m=(1.0, 2.5),
                speed_limit_mps=4.0,
            )
            inside, l_star = on_path(task, query)
            dense = dense_polyline_distance(points, query, spacing=0.001)
            worst = max(worst, abs(l_star - dense))
            assert abs(l_star - dense) <= 0.002
            if abs(l_star - corridor) > 0.005:
                assert inside == (dense <= corridor)
        elapsed = time.perf_counter() - started
        assert worst <= 0.002
        assert elapsed < 30.0


def test_streaming_ledger_matches_batch_oracle():
    """1,000 random frame sequences: the live event ledger equals a
    whole-log recomputation exactly."""
    with criterion("event ledger oracle"):
        started = time.perf_counter()
        tasks = (
            TaskSpec(1, ((0.0, 0.0, 5.0), (10.0, 0.0, 5.0)), 2.0, (1.0, 2.5), 4.0),
            TaskSpec(2, ((0.0, 4.0, 5.0), (10.0, 4.0, 5.0)), 2.0, (1.0, 2.5), 6.0),
        )
        rng = random.Random(404)
        for _ in range(1_000):
            n = rng.randint(20, 150)
            threshold = rng.uniform(-2.0, 12.0)
            contact = False
            inputs = []
            for i in range(n):
                if rng.random() < 0.08:
                    contact = not contact
                if rng.random() < 0.02:
                    collision = CollisionReport(hit_human=True, min_clearance=0.0)
                elif rng.random() < 0.02:
                    collision = CollisionReport(hit_vehicle=True, min_clearance=0.0)
                elif contact:
                    collision = CollisionReport(
                        hit_object_id="slab", hit_object_kind="slab", min_clearance=0.0
                    )
                else:
                    collision = CollisionReport(min_clearance=rng.uniform(0.0, 9.0))
                inputs.append(
                    frame(
                        (
                            rng.uniform(-2.0, 12.0),
                            rng.uniform(-4.0, 8.0),
                            rng.uniform(3.0, 7.0),
                        ),
                        speed=rng.uniform(0.0, 9.0),
                        control=ControlInput(snapshot=rng.random() < 0.06),
                        collision=collision,
                    )
                )

            def visible(fi, threshold=threshold):
                return ("d1",) if fi.position[0] > threshold else ()

            pipeline = TelemetryPipeline(tasks, JOB, visible)
            for fi in inputs:
                pipeline.observe(fi)
            assert pipeline.finalize() == analyze_frames(inputs, tasks, JOB, visible)
        elapsed = time.perf_counter() - started
        assert elapsed < 30.0


def test_score_ranges_bounded():
    """10,000 random ledgers: every score stays inside its published
    range, and standardization maps the endpoints to exactly 0 and 100."""
    with criterion("score ranges"):
        started = time.perf_counter()
        rng = random.Random(11)
        limit = 4.4704
        for _ in range(10_000):
            records = []
            windows = []
            for t in range(1, 5):
                start = (t - 1) * 5
                windows.append(TaskWindow(t, start, start + 4, True, limit))
                records.extend(
                    record(
                        start + k,
                        speed=rng.uniform(0.0, 3.0 * limit),
                        task_id=t if rng.random() < 0.5 else None,
                    )
                    for k in range(5)
                )
            p_c = conformity_score(records, windows, WEIGHTS)
            assert -100.0 - 1e-9 <= p_c <= 100.0 + 1e-9

            p_e = efficiency_score(
                rng.randint(0, 75_000), 50.0, rng.random() < 0.1, WEIGHTS, JOB
            )
            assert -100.0 <= p_e <= 100.0

            led = EventLedger(
                crash_human=rng.random() < 0.3,
                crash_vehicle=rng.random() < 0.3,
                crash_other_count=rng.randint(0, 60),
            )
            p_s = safety_score(led, WEIGHTS)
            assert -100.0 <= p_s <= 0.0

            defects = rng.randint(0, 6)
            snaps = rng.randint(0, 10)
            true_hits = rng.randint(0, min(snaps, defects)) if defects else 0
            p_a = accuracy_score(true_hits, snaps, defects, WEIGHTS).score
            assert 0.0 <= p_a <= 100.0

        assert standardize_value(-100.0, "conformity") == 0.0
        assert standardize_value(100.0, "conformity") == 100.0
        assert standardize_value(-100.0, "efficiency") == 0.0
        assert standardize_value(100.0, "efficiency") == 100.0
        assert standardize_value(-100.0, "safety") == 0.0
        assert standardize_value(0.0, "safety") == 100.0
        assert standardize_value(0.0, "accuracy") == 0.0
        assert standardize_value(100.0, "accuracy") == 100.0
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0


def test_f_measure_properties():
    """Detection blend: fixed point at equal inputs, monotone in both
    arguments, and the weight-limit behavior."""
    with criterion("detection measure"):
        grid = [i / 20.0 for i in range(21)]
        betas = (1e-6, 0.5, 1.0, 2.0, 1e6)
        for x in grid:
            for beta in betas:
                assert f_beta_measure(x, x, beta) == pytest.approx(x, abs=1e-12)
        for beta in betas:
            for fixed in (0.25, 0.6, 1.0):
                along_pr = [f_beta_measure(p, fixed, beta) for p in grid]
                along_rc = [f_beta_measure(fixed, r, beta) for r in grid]
                assert all(b >= a - 1e-12 for a, b in zip(along_pr, along_pr[1:]))
                assert all(b >= a - 1e-12 for a, b in zip(along_rc, along_rc[1:]))
        probe = [0.05, 0.3, 0.7, 1.0]
        for pr in probe:
            for rc in probe:
                assert abs(f_beta_measure(pr, rc, 1e-6) - pr) <= 1e-4
                harmonic = 2.0 * pr * rc / (pr + rc)
                assert abs(f_beta_measure(pr, rc, 1.0) - harmonic) <= 1e-4
                assert abs(f_beta_measure(pr, rc, 1e6) - rc) <= 1e-4


def test_deterministic_replay_and_rescoring(perfect_run, tmp_path):
    """Byte-identical logs across reruns, exact scorecard reproduction on
    replay, and penalty re-weighting that only moves the safety score."""
    with criterion("determinism and replay"):
        outcome, log_path = perfect_run
        scenario = scenario_from_dict(tiny_scenario_doc())

        rerun_log = str(tmp_path / "rerun.jsonl")
        twin = load_scenario(SCENARIO_PATH)
        rerun = run(
            SessionConfig(
                scenario=twin,
                seed=twin.seed,
                participant_id="fixture",
                log_path=rerun_log,
            ),
            load_pilot(twin, PILOT_PATH),
        )
        assert rerun.end_reason is EndReason.LANDED_AT_STATION
        assert filecmp.cmp(log_path, rerun_log, shallow=False)

        replayed = replay(log_path)
        assert replayed.matches_log
        assert replayed.card == outcome.card

        # A log with one obstacle strike: doubling the obstacle penalty
        # moves the safety score and nothing else.
        sx, sy, sz = scenario.ground_station
        clumsy = WaypointPilot(
            scenario,
            [
                MissionStep("goto", (sx, sy, 2.0), speed=1.0, tolerance=0.01),
                MissionStep("goto", (10.0, 0.0, 3.0), speed=2.0, tolerance=0.05),
                MissionStep("goto", (10.0, 0.0, 4.2), speed=0.8, tolerance=0.05),
                MissionStep("goto", (10.0, 0.0, 2.0), speed=0.8, tolerance=0.05),
                MissionStep("goto", (sx, sy, 0.8), speed=2.0, tolerance=0.01),
                MissionStep("goto", (sx, sy, sz + 0.05), speed=0.4, tolerance=0.02),
                MissionStep("hover", frames=60),
            ],
        )
        clumsy_log = str(tmp_path / "clumsy.jsonl")
        clumsy_outcome = run(
            SessionConfig(scenario=scenario, log_path=clumsy_log), clumsy
        )
        assert clumsy_outcome.card.crash_other_count >= 1
        rescored = replay(clumsy_log, ScoringWeights(crash_other_penalty=-6.0))
        base = clumsy_outcome.card
        assert rescored.card.safety != base.safety
        assert rescored.card.safety == max(-6.0 * base.crash_other_count, -100.0)
        assert rescored.card.conformity == base.conformity
        assert rescored.card.efficiency == base.efficiency
        assert rescored.card.accuracy == base.accuracy


def test_feedback_threshold_boundaries():
    """Exhaustive boundary grids for the battery bands, the distance
    reminder, and the proximity alert."""
    with criterion("feedback thresholds"):
        task = TaskSpec(1, ((0.0, 0.0, 5.0), (30.0, 0.0, 5.0)), 2.0, (1.0, 2.5), 4.0)

        bands = [
            (0.0, "red"),
            (15.0, "red"),
            (29.999, "red"),
            (30.0, "yellow"),
            (30.001, "yellow"),
            (69.999, "yellow"),
            (70.0, "green"),
            (70.001, "green"),
            (100.0, "green"),
        ]
        for pct, color in bands:
            pipeline = TelemetryPipeline([], JOB)
            hud = pipeline.observe(frame((0, 0, 5), battery=pct)).hud
            assert hud.battery_color == color, pct
            assert hud.battery_flashing == (pct < 30.0), pct

        for offset, expected in [(7.999, True), (8.0, True), (8.001, False)]:
            pipeline = TelemetryPipeline([task], JOB)
            tick = pipeline.observe(frame((15.0, offset, 5.0)))
            assert tick.record.task_id is None
            fired = any(m.kind.value == "distance_reminder" for m in tick.messages)
            assert fired == expected, offset
        on_path_tick = TelemetryPipeline([task], JOB).observe(frame((15.0, 1.0, 5.0)))
        assert on_path_tick.record.task_id == 1
        assert not any(
            m.kind.value == "distance_reminder" for m in on_path_tick.messages
        )

        for clearance, expected in [(2.499, True), (2.5, True), (2.501, False)]:
            pipeline = TelemetryPipeline([], JOB)
            tick = pipeline.observe(
                frame((0, 0, 5), collision=CollisionReport(min_clearance=clearance))
            )
            fired = any(m.kind.value == "proximity_or_crash" for m in tick.messages)
            assert fired == expected, clearance
        contact = TelemetryPipeline([], JOB).observe(
            frame(
                (0, 0, 5),
                collision=CollisionReport(
                    hit_object_id="slab", hit_object_kind="slab", min_clearance=0.0
                ),
            )
        )
        assert any(m.text.startswith("Contact") for m in contact.messages)


def test_scripted_mission_emits_full_report(tmp_path):
    """The four-task two-bridge mission finishes headless in under five
    seconds and its report's conformity bars sum to the score."""
    with criterion("end-to-end mission"):
        scenario = load_scenario(SCENARIO_PATH)
        pilot = load_pilot(scenario, PILOT_PATH)
        log_path = str(tmp_path / "session.jsonl")
        started = time.perf_counter()
        outcome = run(
            SessionConfig(scenario=scenario, seed=scenario.seed, log_path=log_path),
            pilot,
        )
        elapsed = time.perf_counter() - started
        assert elapsed < 5.0
        assert outcome.end_reason is EndReason.LANDED_AT_STATION

        report = emit_report(
            outcome.card, outcome.result.ledger, session={"participant": "p1"}
        )
        assert set(report) >= {"version", "session", "scores", "per_task", "events", "charts"}
        assert set(report["charts"]) == {"kiviat", "waterfall", "crash_by_task", "accuracy"}
        chart = conformity_waterfall(outcome.card.per_task)
        assert abs(chart["total"] - outcome.card.conformity) <= 1e-9
        assert report["charts"]["waterfall"]["total"] == chart["total"]
        assert len(report["per_task"]) == 4
        assert all(t["entered"] for t in report["per_task"])
