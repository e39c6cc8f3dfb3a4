"""Decision-support engine for human-in-the-loop planning.

Layers, bottom up: model/parser/grounding (the typed STRIPS subset with
numeric resources), reachability (execution semantics + relaxed planning
graph), landmarks (extraction, verification, status tracking), advisor
(alerts/suggestions/plan validation/completion search), session (commands,
snapshots, replay), service (HTTP API), cli.
"""

from .advisor import (
    Advisory,
    AnalysisContext,
    PlanStep,
    PlanValidationReport,
    SuggestionResult,
    analyze,
    dispatch_gate,
    suggest_actions,
    validate_plan,
)
from .errors import EngineError
from .grounding import ground, instantiate_action
from .landmarks import (
    Landmark,
    LandmarkGraph,
    LandmarkStatus,
    extract_landmarks,
    landmark_status,
    verify_landmark,
)
from .model import Atom, DomainModel, Fluent, GroundAction, ProblemInstance, State
from .parser import domain_to_pddl, parse_domain, parse_problem, problem_to_pddl
from .reachability import (
    ActionClassification,
    RelaxedPlanningGraph,
    applicable,
    apply_action,
    build_rpg,
    first_achievers,
)
from .session import (
    Session,
    SessionConfig,
    create_session,
    handle,
    load_scenario,
    replay,
    restore,
    snapshot,
)

__version__ = "0.1.0"

__all__ = [
    "Advisory", "AnalysisContext", "PlanStep", "PlanValidationReport",
    "SuggestionResult", "analyze", "dispatch_gate", "suggest_actions",
    "validate_plan", "EngineError", "ground", "instantiate_action",
    "Landmark", "LandmarkGraph", "LandmarkStatus", "extract_landmarks",
    "landmark_status", "verify_landmark", "Atom", "DomainModel", "Fluent",
    "GroundAction", "ProblemInstance", "State", "domain_to_pddl",
    "parse_domain", "parse_problem", "problem_to_pddl",
    "ActionClassification", "RelaxedPlanningGraph", "applicable",
    "apply_action", "build_rpg", "first_achievers", "Session",
    "SessionConfig", "create_session", "handle", "load_scenario", "replay",
    "restore", "snapshot", "__version__",
]
