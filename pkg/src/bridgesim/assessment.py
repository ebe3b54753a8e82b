"""Post-session scoring, standardization, chart payloads, and reports.

Four dimensions are scored from a finalized telemetry result: conformity
(path keeping and speed discipline), efficiency (flight time), safety
(crashes), and accuracy (defect detection quality).  Everything here is a
pure function over finalized data, so many logs can be scored in parallel.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

from .scenario import JobSpec, ScoringWeights
from .telemetry import EventLedger, FrameRecord, TaskWindow, TelemetryResult

DIMENSIONS = ("conformity", "efficiency", "safety", "accuracy")

# Raw score range per dimension; standardization maps these onto [0, 100].
RAW_RANGES: dict[str, tuple[float, float]] = {
    "conformity": (-100.0, 100.0),
    "efficiency": (-100.0, 100.0),
    "safety": (-100.0, 0.0),
    "accuracy": (0.0, 100.0),
}

LIKERT_MIN = 1
LIKERT_MAX = 5

OVERALL_ASPECTS: dict[str, str] = {
    "time_pressure": (
        "I finished the inspection without stress in regard of the required time."
    ),
    "frustration": (
        "I never felt insecure, irritated, stressed, or discomforted during this task."
    ),
    "in_task_feedback": (
        "The in-task feedback (e.g. battery level, speed, messages) were helpful for me."
    ),
}

PHASE_ASPECTS: dict[str, str] = {
    "performance": "I finished the task with a good performance.",
    "mental_demand": "It's easy to finish the task.",
    "physical_demand": (
        "There was no physical activity (including pressing, pulling, turning, "
        "controlling, and holding) required in the task."
    ),
}

PHASES = ("calibration", "takeoff", "task1", "task2", "task3", "task4", "landing")


class AssessmentError(Exception):
    pass


class QuestionnaireError(AssessmentError):
    pass


@dataclass(frozen=True)
class TaskBreakdown:
    task_id: int
    entered: bool
    on_path_fraction: float
    speeding_sum: float
    on_path_gain: float
    speeding_loss: float
    crash_count: int
    duration_s: float


@dataclass(frozen=True)
class StandardizedScores:
    conformity: float
    efficiency: float
    safety: float
    accuracy: float

    def as_dict(self) -> dict[str, float]:
        return {
            "conformity": self.conformity,
            "efficiency": self.efficiency,
            "safety": self.safety,
            "accuracy": self.accuracy,
        }


@dataclass(frozen=True)
class ScoreCard:
    on_path_total: float  # sum of per-task on-path fractions
    speeding_total: float  # sum of per-task weighted speeding shares
    conformity: float
    efficiency: float
    safety: float
    accuracy: float
    recall: float
    precision: float
    f_beta: float
    accuracy_applicable: bool
    standardized: StandardizedScores
    per_task: tuple[TaskBreakdown, ...]
    frame_count: int
    flight_time_s: float
    snapshot_count: int
    true_detection_count: int
    defect_count: int
    crash_human: bool
    crash_vehicle: bool
    crash_other_count: int
    battery_failed: bool

    def as_dict(self) -> dict:
        doc = asdict(self)
        doc["standardized"] = self.standardized.as_dict()
        doc["per_task"] = [asdict(t) for t in self.per_task]
        return doc


# ---------------------------------------------------------------------------
# Dimension scores


def conformity_components(
    records: Sequence[FrameRecord],
    windows: Sequence[TaskWindow],
    weights: ScoringWeights,
) -> tuple[float, float, float, tuple[TaskBreakdown, ...]]:
    """On-path and speeding shares per task, aggregated to the raw score.

    A task that was never entered contributes zero.  Within an entered
    window, a frame counts toward the on-path share when it is assigned to
    that task, and toward the speeding share (weighted by speed over
    limit) when its speed exceeds the task's limit.
    """
    on_path_total = 0.0
    speeding_total = 0.0
    breakdown: list[TaskBreakdown] = []
    for window in windows:
        if not window.entered:
            breakdown.append(
                TaskBreakdown(window.task_id, False, 0.0, 0.0, 0.0, 0.0, 0, 0.0)
            )
            continue
        length = window.end_frame - window.start_frame + 1
        on_frames = 0
        speed_sum = 0.0
        limit = window.speed_limit_mps
        for i in range(window.start_frame, window.end_frame + 1):
            rec = records[i]
            if rec.task_id == window.task_id:
                on_frames += 1
            if rec.speed > limit:
                speed_sum += rec.speed / limit
        fraction = on_frames / length
        weighted = speed_sum / length
        on_path_total += fraction
        speeding_total += weighted
        breakdown.append(
            TaskBreakdown(
                task_id=window.task_id,
                entered=True,
                on_path_fraction=fraction,
                speeding_sum=weighted,
                on_path_gain=weights.on_path_gain * fraction,
                speeding_loss=weights.speeding_loss * weighted + 0.0,
                crash_count=0,
                duration_s=0.0,
            )
        )
    total = (
        weights.on_path_gain * on_path_total
        + weights.speeding_loss * speeding_total
        + 0.0
    )
    return on_path_total, speeding_total, total, tuple(breakdown)


def conformity_score(
    records: Sequence[FrameRecord],
    windows: Sequence[TaskWindow],
    weights: ScoringWeights,
) -> float:
    return conformity_components(records, windows, weights)[2]


def efficiency_score(
    frame_count: int,
    frame_rate_hz: float,
    battery_failed: bool,
    weights: ScoringWeights,
    job: JobSpec,
) -> float:
    """Time score: full marks up to the target time, then a linear slide
    to zero at the maximum flight time; battery exhaustion forfeits."""
    if battery_failed:
        return weights.battery_fail_penalty
    flight_time = frame_count / frame_rate_hz
    overtime = max(0.0, flight_time - job.target_time_s)
    return weights.efficiency_base + weights.efficiency_slope * overtime


def safety_score(ledger: EventLedger, weights: ScoringWeights) -> float:
    raw = (
        weights.crash_human_penalty * (1 if ledger.crash_human else 0)
        + weights.crash_vehicle_penalty * (1 if ledger.crash_vehicle else 0)
        + weights.crash_other_penalty * ledger.crash_other_count
    )
    # + 0.0 collapses the negative zero from penalty * 0 products.
    return max(raw, weights.safety_floor) + 0.0


def f_beta_measure(precision: float, recall: float, beta: float) -> float:
    """F-measure of precision and recall; zero when the blend is empty."""
    denom = beta * beta * precision + recall
    if denom == 0.0:
        return 0.0
    return (1.0 + beta * beta) * precision * recall / denom


@dataclass(frozen=True)
class AccuracyResult:
    recall: float
    precision: float
    f_beta: float
    score: float
    applicable: bool


def accuracy_score(
    true_detections: int,
    snapshot_count: int,
    defect_count: int,
    weights: ScoringWeights,
) -> AccuracyResult:
    """Detection quality from snapshot precision and defect recall.

    With no defects placed the dimension is not applicable and reports
    zero; with no snapshots taken precision is defined as zero.
    """
    applicable = defect_count > 0
    recall = true_detections / defect_count if applicable else 0.0
    precision = true_detections / snapshot_count if snapshot_count > 0 else 0.0
    f = f_beta_measure(precision, recall, weights.beta)
    return AccuracyResult(
        recall=recall,
        precision=precision,
        f_beta=f,
        score=weights.detection_scale * f,
        applicable=applicable,
    )


def standardize_value(raw: float, dimension: str) -> float:
    lo, hi = RAW_RANGES[dimension]
    return (raw - lo) / (hi - lo) * 100.0


def standardize(
    conformity: float, efficiency: float, safety: float, accuracy: float
) -> StandardizedScores:
    return StandardizedScores(
        conformity=standardize_value(conformity, "conformity"),
        efficiency=standardize_value(efficiency, "efficiency"),
        safety=standardize_value(safety, "safety"),
        accuracy=standardize_value(accuracy, "accuracy"),
    )


def build_scorecard(
    result: TelemetryResult,
    job: JobSpec,
    defect_count: int,
    weights: ScoringWeights | None = None,
) -> ScoreCard:
    """Assemble the full four-dimension card from finalized telemetry."""
    weights = weights or job.weights
    ledger = result.ledger
    on_path_total, speeding_total, conformity, breakdown = conformity_components(
        result.records, result.windows, weights
    )

    crash_counts: dict[int | None, int] = {}
    for ev in ledger.crash_events:
        crash_counts[ev.task_id] = crash_counts.get(ev.task_id, 0) + 1
    enriched = []
    for item, window in zip(breakdown, result.windows):
        duration = 0.0
        if window.entered:
            duration = (window.end_frame - window.start_frame + 1) / job.frame_rate_hz
        enriched.append(
            TaskBreakdown(
                task_id=item.task_id,
                entered=item.entered,
                on_path_fraction=item.on_path_fraction,
                speeding_sum=item.speeding_sum,
                on_path_gain=item.on_path_gain,
                speeding_loss=item.speeding_loss,
                crash_count=crash_counts.get(item.task_id, 0),
                duration_s=duration,
            )
        )

    frame_count = len(result.records)
    efficiency = efficiency_score(
        frame_count, job.frame_rate_hz, ledger.battery_failed, weights, job
    )
    safety = safety_score(ledger, weights)
    acc = accuracy_score(
        ledger.true_detection_count, ledger.snapshot_count, defect_count, weights
    )

    return ScoreCard(
        on_path_total=on_path_total,
        speeding_total=speeding_total,
        conformity=conformity,
        efficiency=efficiency,
        safety=safety,
        accuracy=acc.score,
        recall=acc.recall,
        precision=acc.precision,
        f_beta=acc.f_beta,
        accuracy_applicable=acc.applicable,
        standardized=standardize(conformity, efficiency, safety, acc.score),
        per_task=tuple(enriched),
        frame_count=frame_count,
        flight_time_s=frame_count / job.frame_rate_hz,
        snapshot_count=ledger.snapshot_count,
        true_detection_count=ledger.true_detection_count,
        defect_count=defect_count,
        crash_human=ledger.crash_human,
        crash_vehicle=ledger.crash_vehicle,
        crash_other_count=ledger.crash_other_count,
        battery_failed=ledger.battery_failed,
    )


# ---------------------------------------------------------------------------
# Chart payloads


def kiviat_data(standardized: StandardizedScores) -> dict:
    return {
        "axes": list(DIMENSIONS),
        "values": [
            standardized.conformity,
            standardized.efficiency,
            standardized.safety,
            standardized.accuracy,
        ],
        "range": [0.0, 100.0],
    }


def conformity_waterfall(per_task: Sequence[TaskBreakdown]) -> dict:
    bars = [
        {
            "task_id": item.task_id,
            "gain": item.on_path_gain,
            "loss": item.speeding_loss,
        }
        for item in per_task
    ]
    total = sum(b["gain"] + b["loss"] for b in bars)
    return {"bars": bars, "total": total}


def crash_by_task(ledger: EventLedger) -> dict:
    """Crash counts bucketed by the task window each crash fell in."""
    buckets: dict[int | None, int] = {}
    for ev in ledger.crash_events:
        buckets[ev.task_id] = buckets.get(ev.task_id, 0) + 1
    rows = []
    for task_id in sorted(k for k in buckets if k is not None):
        rows.append(
            {"label": f"task {task_id}", "task_id": task_id, "count": buckets[task_id]}
        )
    rows.append({"label": "transit", "task_id": None, "count": buckets.get(None, 0)})
    return {"buckets": rows, "total": len(ledger.crash_events)}


# ---------------------------------------------------------------------------
# Group analytics


@dataclass(frozen=True)
class DimensionStats:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    points: tuple[tuple[str, float], ...]  # (participant, value)

    def as_dict(self) -> dict:
        return {
            "min": self.minimum,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.maximum,
            "points": [{"participant": p, "value": v} for p, v in self.points],
        }


@dataclass(frozen=True)
class GroupStats:
    dimensions: dict[str, DimensionStats]

    def as_dict(self) -> dict:
        return {name: stats.as_dict() for name, stats in self.dimensions.items()}


def quartiles(values: Sequence[float]) -> tuple[float, float, float, float, float]:
    """Five-number summary using the median-of-halves (exclusive) rule:
    for odd counts the middle value belongs to neither half."""
    if not values:
        raise AssessmentError("quartiles need at least one value")
    s = sorted(values)
    n = len(s)
    med = statistics.median(s)
    if n == 1:
        return s[0], s[0], med, s[0], s[0]
    half = n // 2
    q1 = statistics.median(s[:half])
    q3 = statistics.median(s[n - half:])
    return s[0], q1, med, q3, s[-1]


def group_summary_from_values(values: Mapping[str, Mapping[str, float]]) -> GroupStats:
    """Boxplot statistics from {participant: {dimension: standardized value}}."""
    if not values:
        raise AssessmentError("group summary needs at least one scorecard")
    dims: dict[str, DimensionStats] = {}
    for name in DIMENSIONS:
        points = []
        for participant, vals in sorted(values.items()):
            if name not in vals:
                raise AssessmentError(
                    f"missing dimension {name} for participant {participant}"
                )
            points.append((participant, float(vals[name])))
        lo, q1, med, q3, hi = quartiles([v for _, v in points])
        dims[name] = DimensionStats(lo, q1, med, q3, hi, tuple(points))
    return GroupStats(dimensions=dims)


def group_summary(cards: Mapping[str, ScoreCard]) -> GroupStats:
    """Boxplot statistics per dimension over a group of participants."""
    return group_summary_from_values(
        {
            participant: {
                name: getattr(card.standardized, name) for name in DIMENSIONS
            }
            for participant, card in cards.items()
        }
    )


# ---------------------------------------------------------------------------
# Questionnaire


@dataclass(frozen=True)
class QuestionnaireResponse:
    participant_id: str
    overall: dict[str, int]  # aspect -> Likert value
    by_phase: dict[str, dict[str, int]]  # phase -> aspect -> Likert value

    def as_dict(self) -> dict:
        return {
            "participant_id": self.participant_id,
            "overall": dict(self.overall),
            "by_phase": {p: dict(a) for p, a in self.by_phase.items()},
        }


def _check_likert(value: object, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise QuestionnaireError(f"{where}: expected an integer Likert value")
    if not LIKERT_MIN <= value <= LIKERT_MAX:
        raise QuestionnaireError(
            f"{where}: value {value} outside the {LIKERT_MIN}..{LIKERT_MAX} scale"
        )
    return value


def questionnaire_ingest(payload: Mapping) -> QuestionnaireResponse:
    """Validate a submitted form payload against the question set."""
    if not isinstance(payload, Mapping):
        raise QuestionnaireError("payload must be an object")
    overall_raw = payload.get("overall")
    by_phase_raw = payload.get("by_phase")
    if not isinstance(overall_raw, Mapping) or not isinstance(by_phase_raw, Mapping):
        raise QuestionnaireError("payload needs 'overall' and 'by_phase' sections")

    overall: dict[str, int] = {}
    for aspect in OVERALL_ASPECTS:
        if aspect not in overall_raw:
            raise QuestionnaireError(f"overall.{aspect}: missing answer")
        overall[aspect] = _check_likert(overall_raw[aspect], f"overall.{aspect}")
    for aspect in overall_raw:
        if aspect not in OVERALL_ASPECTS:
            raise QuestionnaireError(f"overall.{aspect}: unknown question")

    by_phase: dict[str, dict[str, int]] = {}
    for phase in PHASES:
        answers = by_phase_raw.get(phase)
        if not isinstance(answers, Mapping):
            raise QuestionnaireError(f"by_phase.{phase}: missing answers")
        phase_answers: dict[str, int] = {}
        for aspect in PHASE_ASPECTS:
            if aspect not in answers:
                raise QuestionnaireError(f"by_phase.{phase}.{aspect}: missing answer")
            phase_answers[aspect] = _check_likert(
                answers[aspect], f"by_phase.{phase}.{aspect}"
            )
        for aspect in answers:
            if aspect not in PHASE_ASPECTS:
                raise QuestionnaireError(f"by_phase.{phase}.{aspect}: unknown question")
        by_phase[phase] = phase_answers
    for phase in by_phase_raw:
        if phase not in PHASES:
            raise QuestionnaireError(f"by_phase.{phase}: unknown phase")

    participant = payload.get("participant_id", "")
    if not isinstance(participant, str):
        raise QuestionnaireError("participant_id must be a string")
    return QuestionnaireResponse(
        participant_id=participant, overall=overall, by_phase=by_phase
    )


def _summarize(values: Sequence[int]) -> dict:
    # Likert 1 is the most positive response, 5 the most negative.
    return {
        "mean": sum(values) / len(values),
        "most_positive": min(values),
        "most_negative": max(values),
    }


def questionnaire_summary(responses: Sequence[QuestionnaireResponse]) -> dict:
    if not responses:
        raise QuestionnaireError("summary needs at least one response")
    overall = {
        aspect: _summarize([r.overall[aspect] for r in responses])
        for aspect in OVERALL_ASPECTS
    }
    by_phase = {
        phase: {
            aspect: _summarize([r.by_phase[phase][aspect] for r in responses])
            for aspect in PHASE_ASPECTS
        }
        for phase in PHASES
    }
    return {"respondents": len(responses), "overall": overall, "by_phase": by_phase}


# ---------------------------------------------------------------------------
# Reports


def improvement_from_values(values: Sequence[Mapping[str, float]]) -> dict:
    """Percent change of each standardized dimension between consecutive
    sessions; None where the earlier value is zero."""
    series: dict[str, list[float | None]] = {name: [] for name in DIMENSIONS}
    for prev, cur in zip(values, values[1:]):
        for name in DIMENSIONS:
            old = float(prev[name])
            new = float(cur[name])
            if old == 0.0:
                series[name].append(None)
            else:
                series[name].append((new - old) / abs(old) * 100.0)
    return series


def improvement_series(cards: Sequence[ScoreCard]) -> dict:
    return improvement_from_values(
        [
            {name: getattr(card.standardized, name) for name in DIMENSIONS}
            for card in cards
        ]
    )


def emit_report(
    card: ScoreCard,
    ledger: EventLedger,
    session: Mapping | None = None,
    questionnaire: QuestionnaireResponse | None = None,
    history: Sequence[ScoreCard] | None = None,
) -> dict:
    """Bundle scores, events, and chart payloads into one document."""
    report: dict = {
        "version": 1,
        "session": dict(session) if session else {},
        "scores": {
            "conformity": card.conformity,
            "efficiency": card.efficiency,
            "safety": card.safety,
            "accuracy": card.accuracy,
            "standardized": card.standardized.as_dict(),
            "on_path_total": card.on_path_total,
            "speeding_total": card.speeding_total,
            "recall": card.recall,
            "precision": card.precision,
            "f_beta": card.f_beta,
            "accuracy_applicable": card.accuracy_applicable,
        },
        "per_task": [asdict(t) for t in card.per_task],
        "events": {
            "crashes": [asdict(e) for e in ledger.crash_events],
            "snapshots": [
                {
                    "frame": s.frame,
                    "position": list(s.position),
                    "visible_ids": list(s.visible_ids),
                    "credited_id": s.credited_id,
                    "false_positive": s.false_positive,
                }
                for s in ledger.snapshots
            ],
            "snapshot_count": ledger.snapshot_count,
            "true_detection_count": ledger.true_detection_count,
            "crash_other_count": ledger.crash_other_count,
            "crash_human": ledger.crash_human,
            "crash_vehicle": ledger.crash_vehicle,
            "battery_failed": ledger.battery_failed,
        },
        "charts": {
            "kiviat": kiviat_data(card.standardized),
            "waterfall": conformity_waterfall(card.per_task),
            "crash_by_task": crash_by_task(ledger),
            "accuracy": {
                "recall": card.recall,
                "precision": card.precision,
                "f_beta": card.f_beta,
                "snapshots": card.snapshot_count,
                "true_detections": card.true_detection_count,
                "defects": card.defect_count,
            },
        },
    }
    if not card.accuracy_applicable:
        report["scores"]["accuracy_note"] = "no defects placed; dimension not applicable"
    if card.snapshot_count == 0:
        report["scores"]["precision_note"] = "no snapshots taken"
    if history:
        report["improvement"] = improvement_series(list(history))
        report["sessions_recorded"] = len(history)
    if questionnaire is not None:
        report["questionnaire"] = questionnaire.as_dict()
    return report


def write_report(report: Mapping, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


CSV_FIELDS = (
    "participant",
    "session",
    "conformity",
    "efficiency",
    "safety",
    "accuracy",
    "std_conformity",
    "std_efficiency",
    "std_safety",
    "std_accuracy",
    "flight_time_s",
    "crash_other_count",
    "snapshot_count",
    "true_detection_count",
)


def scorecards_to_csv(rows: Sequence[tuple[str, str, ScoreCard]]) -> str:
    """Flatten (participant, session label, card) rows for spreadsheets."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_FIELDS)
    for participant, session, card in rows:
        writer.writerow(
            [
                participant,
                session,
                f"{card.conformity:.6f}",
                f"{card.efficiency:.6f}",
                f"{card.safety:.6f}",
                f"{card.accuracy:.6f}",
                f"{card.standardized.conformity:.6f}",
                f"{card.standardized.efficiency:.6f}",
                f"{card.standardized.safety:.6f}",
                f"{card.standardized.accuracy:.6f}",
                f"{card.flight_time_s:.6f}",
                card.crash_other_count,
                card.snapshot_count,
                card.true_detection_count,
            ]
        )
    return buf.getvalue()
