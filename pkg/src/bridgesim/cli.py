"""Command line: serve, run, replay, score, and report on sessions."""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from bridgesim.assessment import (
    AssessmentError,
    DIMENSIONS,
    QuestionnaireError,
    ScoreCard,
    emit_report,
    group_summary_from_values,
    improvement_from_values,
    questionnaire_ingest,
    write_report,
)
from bridgesim.gateway.server import ADDRESS_ENV, GatewayConfig, serve
from bridgesim.scenario import ScenarioError, load_scenario
from bridgesim.session import (
    SessionConfig,
    SessionError,
    SessionMode,
    load_history,
    load_pilot,
    new_session_dir,
    record_repetition,
    replay,
    run,
)
from bridgesim.sessionlog import SessionLogError


def _yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def _print_card(card: ScoreCard, out=sys.stdout) -> None:
    std = card.standardized
    lines = [
        f"conformity   {card.conformity:10.3f}   (standardized {std.conformity:.3f})",
        f"efficiency   {card.efficiency:10.3f}   (standardized {std.efficiency:.3f})",
        f"safety       {card.safety:10.3f}   (standardized {std.safety:.3f})",
        f"accuracy     {card.accuracy:10.3f}   (standardized {std.accuracy:.3f})",
        f"detection    precision {card.precision:.3f}  recall {card.recall:.3f}  "
        f"f-measure {card.f_beta:.3f}",
        f"snapshots    {card.snapshot_count}  true detections "
        f"{card.true_detection_count}  defects {card.defect_count}",
        f"crashes      human {_yes_no(card.crash_human)}  vehicle "
        f"{_yes_no(card.crash_vehicle)}  other {card.crash_other_count}",
        f"battery      failed {_yes_no(card.battery_failed)}",
        f"flight time  {card.flight_time_s:.2f} s  ({card.frame_count} frames)",
    ]
    if not card.accuracy_applicable:
        lines.append("note         no defects placed; accuracy not applicable")
    for line in lines:
        print(line, file=out)


def _fail(message: str, code: int = 1) -> int:
    print(message, file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# Subcommands


def cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError:
        return _fail(f"scenario not found: {args.scenario}")
    except ScenarioError as exc:
        return _fail(str(exc), code=2)
    print(
        f"ok: {scenario.name} ({len(scenario.tasks)} tasks, "
        f"{len(scenario.elements)} elements, {scenario.defect_count} defects)"
    )
    return 0


def cmd_score(args) -> int:
    try:
        outcome = replay(args.log)
    except FileNotFoundError:
        return _fail(f"log not found: {args.log}")
    except (SessionLogError, ScenarioError) as exc:
        return _fail(str(exc))
    if args.format == "json":
        print(json.dumps(outcome.card.as_dict(), indent=2, sort_keys=True))
    else:
        _print_card(outcome.card)
    return 0


def cmd_replay(args) -> int:
    try:
        outcome = replay(args.log)
    except FileNotFoundError:
        return _fail(f"log not found: {args.log}")
    except (SessionLogError, ScenarioError) as exc:
        return _fail(str(exc))
    end = outcome.log.end or {}
    if args.format == "json":
        doc = {
            "end": end,
            "matches_log": outcome.matches_log,
            "card": outcome.card.as_dict(),
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        if end:
            print(f"end reason   {end.get('reason')}  ({end.get('frames')} frames)")
        print(f"log agreement: {_yes_no(outcome.matches_log)}")
        _print_card(outcome.card)
    return 0 if outcome.matches_log else 3


def cmd_run_scripted(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
        pilot = load_pilot(scenario, args.pilot)
    except FileNotFoundError as exc:
        return _fail(f"file not found: {exc.filename}")
    except (ScenarioError, SessionError) as exc:
        return _fail(str(exc))

    log_path = args.log
    session_dir = None
    if log_path is None and args.log_dir is not None:
        session_dir = new_session_dir(args.log_dir, args.participant, args.practice)
        log_path = os.path.join(session_dir, "session.jsonl")

    config = SessionConfig(
        scenario=scenario,
        mode=SessionMode.SCRIPTED,
        seed=args.seed,
        participant_id=args.participant,
        practice=args.practice,
        log_path=log_path,
    )
    outcome = run(config, pilot)
    if args.log_dir is not None and not args.practice:
        record_repetition(args.log_dir, args.participant, outcome)
    if session_dir is not None:
        report = emit_report(
            outcome.card,
            outcome.result.ledger,
            session={
                "participant": args.participant,
                "end_reason": outcome.end_reason.value,
                "frames": outcome.frame_count,
                "flight_time_s": outcome.flight_time_s,
                "practice": args.practice,
            },
        )
        write_report(report, os.path.join(session_dir, "report.json"))

    if args.format == "json":
        doc = {
            "end_reason": outcome.end_reason.value,
            "frames": outcome.frame_count,
            "flight_time_s": outcome.flight_time_s,
            "log_path": outcome.log_path,
            "card": outcome.card.as_dict(),
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"end reason   {outcome.end_reason.value}")
        if outcome.log_path:
            print(f"log          {outcome.log_path}")
        _print_card(outcome.card)
    return 0


def _latest_repetition(root: str, participant: str) -> tuple[str, int] | None:
    base = os.path.join(root, participant)
    if not os.path.isdir(base):
        return None
    best: tuple[int, str] | None = None
    for name in os.listdir(base):
        match = re.fullmatch(r"rep_(\d+)", name)
        if not match:
            continue
        log = os.path.join(base, name, "session.jsonl")
        if not os.path.exists(log):
            continue
        index = int(match.group(1))
        if best is None or index > best[0]:
            best = (index, log)
    if best is None:
        return None
    return best[1], best[0]


def cmd_report(args) -> int:
    found = _latest_repetition(args.log_dir, args.participant)
    if found is None:
        return _fail(
            f"no recorded sessions for {args.participant} under {args.log_dir}"
        )
    log_path, repetition = found
    try:
        outcome = replay(log_path)
    except (SessionLogError, ScenarioError) as exc:
        return _fail(str(exc))

    questionnaire = None
    qpath = os.path.join(os.path.dirname(log_path), "questionnaire.json")
    if os.path.exists(qpath):
        try:
            with open(qpath, "r", encoding="utf-8") as fh:
                questionnaire = questionnaire_ingest(json.load(fh))
        except (QuestionnaireError, json.JSONDecodeError) as exc:
            return _fail(f"bad questionnaire file {qpath}: {exc}")

    end = outcome.log.end or {}
    report = emit_report(
        outcome.card,
        outcome.result.ledger,
        session={
            "participant": args.participant,
            "repetition": repetition,
            "end_reason": end.get("reason"),
            "frames": outcome.card.frame_count,
            "flight_time_s": outcome.card.flight_time_s,
        },
        questionnaire=questionnaire,
    )
    history = load_history(args.log_dir, args.participant)
    if len(history) >= 2:
        report["improvement"] = improvement_from_values(
            [entry["standardized"] for entry in history]
        )
    if history:
        report["sessions_recorded"] = len(history)

    if args.out:
        write_report(report, args.out)
        print(f"report written to {args.out}")
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    elif not args.out:
        print(f"participant  {args.participant}  repetition {repetition}")
        _print_card(outcome.card)
        if "improvement" in report:
            print("improvement over previous sessions (percent):")
            for name in DIMENSIONS:
                steps = ", ".join(
                    "n/a" if v is None else f"{v:+.1f}"
                    for v in report["improvement"][name]
                )
                print(f"  {name:<12} {steps}")
    return 0


def _standardized_from_doc(doc: dict) -> dict | None:
    if isinstance(doc.get("scores"), dict):
        inner = doc["scores"].get("standardized")
        if isinstance(inner, dict):
            return inner
    if isinstance(doc.get("standardized"), dict):
        return doc["standardized"]
    return None


def cmd_group_report(args) -> int:
    if not os.path.isdir(args.directory):
        return _fail(f"not a directory: {args.directory}")
    values: dict[str, dict] = {}
    for name in sorted(os.listdir(args.directory)):
        if not name.endswith(".json"):
            continue
        path = os.path.join(args.directory, name)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            return _fail(f"bad JSON in {path}: {exc}")
        if not isinstance(doc, dict):
            continue
        standardized = _standardized_from_doc(doc)
        if standardized is None:
            continue
        participant = doc.get("session", {}).get("participant") or os.path.splitext(
            name
        )[0]
        if participant in values:
            participant = os.path.splitext(name)[0]
        values[str(participant)] = standardized
    try:
        stats = group_summary_from_values(values)
    except AssessmentError as exc:
        return _fail(str(exc))
    if args.format == "json":
        print(json.dumps(stats.as_dict(), indent=2, sort_keys=True))
    else:
        print(f"group of {len(values)}: {', '.join(sorted(values))}")
        header = f"{'dimension':<12} {'min':>8} {'q1':>8} {'median':>8} {'q3':>8} {'max':>8}"
        print(header)
        for name, dim in stats.dimensions.items():
            print(
                f"{name:<12} {dim.minimum:8.2f} {dim.q1:8.2f} "
                f"{dim.median:8.2f} {dim.q3:8.2f} {dim.maximum:8.2f}"
            )
    return 0


def cmd_serve(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError:
        return _fail(f"scenario not found: {args.scenario}")
    except ScenarioError as exc:
        return _fail(str(exc), code=2)
    config = GatewayConfig(
        scenario=scenario,
        participant_id=args.participant,
        seed=args.seed,
        log_dir=args.log_dir,
        practice=args.practice,
        decimation=args.decimation,
    )
    try:
        serve(config, args.address)
    except OSError as exc:
        return _fail(f"cannot bind {args.address or 'default address'}: {exc}")
    except ValueError as exc:
        return _fail(str(exc))
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bridgesim",
        description="Drone bridge-inspection training simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p) -> None:
        p.add_argument(
            "--format",
            choices=("text", "json"),
            default="text",
            help="output format (default: text)",
        )

    p = sub.add_parser("serve", help="run the interactive cockpit server")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument(
        "--address",
        default=None,
        help=f"host:port to bind (default: ${ADDRESS_ENV} or 127.0.0.1:8765)",
    )
    p.add_argument("--participant", default="anonymous")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log-dir", default=None, help="root directory for session logs")
    p.add_argument("--practice", action="store_true", help="do not record history")
    p.add_argument(
        "--decimation",
        type=int,
        default=2,
        help="send every Nth frame to the cockpit (default: 2)",
    )
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("run-scripted", help="fly a scripted pilot headless")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("pilot", help="pilot JSON file (timeline or mission)")
    p.add_argument("--participant", default="anonymous")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log", default=None, help="write the session log to this path")
    p.add_argument("--log-dir", default=None, help="root directory for session logs")
    p.add_argument("--practice", action="store_true", help="do not record history")
    add_format(p)
    p.set_defaults(func=cmd_run_scripted)

    p = sub.add_parser("replay", help="recompute a logged session and verify it")
    p.add_argument("log", help="session log (JSONL)")
    add_format(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("score", help="score a logged session")
    p.add_argument("log", help="session log (JSONL)")
    add_format(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("report", help="emit the report bundle for a participant")
    p.add_argument("participant")
    p.add_argument("--log-dir", required=True, help="root directory of session logs")
    p.add_argument("--out", default=None, help="also write the report JSON here")
    add_format(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser(
        "group-report", help="boxplot statistics over a directory of reports"
    )
    p.add_argument("directory", help="directory of report or scorecard JSON files")
    add_format(p)
    p.set_defaults(func=cmd_group_report)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario", help="scenario JSON file")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
