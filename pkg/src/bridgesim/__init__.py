"""Deterministic drone-assisted bridge inspection training simulator.

Scenario configuration, fixed-timestep flight dynamics, streaming
telemetry with in-task feedback, four-dimension performance scoring,
replayable session logs, and a message-stream gateway for the browser
cockpit.
"""

from .scenario import (
    ScenarioSpec,
    ScenarioError,
    ScenarioParseError,
    ScenarioValidationError,
    load_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from .session import (
    EndReason,
    ScriptedPilot,
    SessionConfig,
    SessionMode,
    SessionOutcome,
    WaypointPilot,
    load_pilot,
    replay,
    run,
)
from .assessment import ScoreCard, build_scorecard, emit_report

__version__ = "1.0.0"

__all__ = [
    "ScenarioSpec",
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioValidationError",
    "load_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "EndReason",
    "ScriptedPilot",
    "SessionConfig",
    "SessionMode",
    "SessionOutcome",
    "WaypointPilot",
    "load_pilot",
    "replay",
    "run",
    "ScoreCard",
    "build_scorecard",
    "emit_report",
    "__version__",
]
