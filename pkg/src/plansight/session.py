"""Interactive session layer: a session holds the model, the evolving
context (state, goals, plan, history), and the latest advisories.

Commands are the only mutation path. Each accepted command is applied
atomically, bumps the revision by exactly one, and re-runs analysis
synchronously, so the stored advisories always describe the current
revision. A rejected command raises and leaves the session untouched.
Sessions are immutable values; ``handle`` returns the successor.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Any, Sequence, Union

from . import advisor
from .advisor import (
    Advisory,
    AnalysisContext,
    PlanStep,
    PlanValidationReport,
    SuggestionResult,
    analyze,
    dispatch_gate,
    suggest_actions,
    validation_report,
)
from .errors import (
    DispatchBlockedError,
    EngineError,
    InvalidCommandError,
    ScenarioFormatError,
    SchemaVersionMismatchError,
    StepNotApplicableError,
)
from .grounding import ground, instantiate_action
from .model import (
    Atom,
    DomainModel,
    Fluent,
    GroundAction,
    ProblemInstance,
    State,
    num_from_doc,
    num_to_doc,
)
from .parser import parse_domain, parse_problem
from .reachability import (
    APPLICABLE,
    BLOCKED_PROPOSITIONAL,
    ActionClassification,
    applicable,
    apply_action,
)

SNAPSHOT_SCHEMA = "plansight-session"
SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class SessionConfig:
    dispatch_policy: str = "block"  # block | warn
    suggest_budget: float = 5.0  # seconds
    analysis_budget: float = 2.0  # seconds

    def to_doc(self) -> dict:
        return {
            "dispatch_policy": self.dispatch_policy,
            "suggest_budget": self.suggest_budget,
            "analysis_budget": self.analysis_budget,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SessionConfig":
        cfg = cls(
            dispatch_policy=doc.get("dispatch_policy", "block"),
            suggest_budget=float(doc.get("suggest_budget", 5.0)),
            analysis_budget=float(doc.get("analysis_budget", 2.0)),
        )
        _check_config(cfg)
        return cfg


def _check_config(cfg: SessionConfig) -> None:
    if cfg.dispatch_policy not in ("block", "warn"):
        raise InvalidCommandError(f"unknown dispatch policy {cfg.dispatch_policy!r}")
    if cfg.suggest_budget <= 0 or cfg.analysis_budget <= 0:
        raise InvalidCommandError("budgets must be positive")


@dataclass(frozen=True)
class TraceEntry:
    """One state in the session history; ``origin`` records what produced it
    ("init", "step:<action id>", or "edit:<command type>")."""

    origin: str
    state: State


@dataclass(frozen=True)
class PlanStepRec:
    action_id: str
    executed: bool = False


# ---------------------------------------------------------------------------
# Commands


@dataclass(frozen=True)
class AddGoal:
    atom: Atom


@dataclass(frozen=True)
class RemoveGoal:
    atom: Atom


@dataclass(frozen=True)
class AddFact:
    atom: Atom


@dataclass(frozen=True)
class RemoveFact:
    atom: Atom


@dataclass(frozen=True)
class AdjustResource:
    fluent: Fluent
    delta: Fraction


@dataclass(frozen=True)
class AppendStep:
    action_id: str


@dataclass(frozen=True)
class RemoveStep:
    index: int


@dataclass(frozen=True)
class ExecuteStep:
    pass


@dataclass(frozen=True)
class RequestSuggestions:
    budget: float | None = None


@dataclass(frozen=True)
class Dispatch:
    pass


@dataclass(frozen=True)
class SetConfig:
    key: str
    value: Any


SessionCommand = Union[
    AddGoal, RemoveGoal, AddFact, RemoveFact, AdjustResource, AppendStep,
    RemoveStep, ExecuteStep, RequestSuggestions, Dispatch, SetConfig,
]

_COMMAND_TYPES = {
    "add-goal": AddGoal,
    "remove-goal": RemoveGoal,
    "add-fact": AddFact,
    "remove-fact": RemoveFact,
    "adjust-resource": AdjustResource,
    "append-step": AppendStep,
    "remove-step": RemoveStep,
    "execute-step": ExecuteStep,
    "request-suggestions": RequestSuggestions,
    "dispatch": Dispatch,
    "set-config": SetConfig,
}


def command_from_doc(doc: dict) -> SessionCommand:
    """Decode the wire form ``{"type": ..., ...fields}``."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise InvalidCommandError("command document needs a 'type' field")
    kind = doc["type"]
    try:
        if kind in ("add-goal", "remove-goal", "add-fact", "remove-fact"):
            return _COMMAND_TYPES[kind](Atom.parse(doc["atom"]))
        if kind == "adjust-resource":
            return AdjustResource(Atom.parse(doc["fluent"]), num_from_doc(doc["delta"]))
        if kind == "append-step":
            return AppendStep(str(doc["action"]))
        if kind == "remove-step":
            return RemoveStep(int(doc["index"]))
        if kind == "execute-step":
            return ExecuteStep()
        if kind == "request-suggestions":
            budget = doc.get("budget")
            return RequestSuggestions(float(budget) if budget is not None else None)
        if kind == "dispatch":
            return Dispatch()
        if kind == "set-config":
            return SetConfig(str(doc["key"]), doc["value"])
    except EngineError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidCommandError(f"malformed {kind} command: {exc}") from exc
    raise InvalidCommandError(f"unknown command type {kind!r}")


def command_to_doc(cmd: SessionCommand) -> dict:
    if isinstance(cmd, (AddGoal, RemoveGoal, AddFact, RemoveFact)):
        kind = {AddGoal: "add-goal", RemoveGoal: "remove-goal",
                AddFact: "add-fact", RemoveFact: "remove-fact"}[type(cmd)]
        return {"type": kind, "atom": str(cmd.atom)}
    if isinstance(cmd, AdjustResource):
        return {"type": "adjust-resource", "fluent": str(cmd.fluent),
                "delta": num_to_doc(cmd.delta)}
    if isinstance(cmd, AppendStep):
        return {"type": "append-step", "action": cmd.action_id}
    if isinstance(cmd, RemoveStep):
        return {"type": "remove-step", "index": cmd.index}
    if isinstance(cmd, ExecuteStep):
        return {"type": "execute-step"}
    if isinstance(cmd, RequestSuggestions):
        doc: dict = {"type": "request-suggestions"}
        if cmd.budget is not None:
            doc["budget"] = cmd.budget
        return doc
    if isinstance(cmd, Dispatch):
        return {"type": "dispatch"}
    if isinstance(cmd, SetConfig):
        return {"type": "set-config", "key": cmd.key, "value": cmd.value}
    raise InvalidCommandError(f"unknown command {cmd!r}")


_COMMAND_KIND = {cls: kind for kind, cls in _COMMAND_TYPES.items()}


# ---------------------------------------------------------------------------
# Session


@dataclass(frozen=True)
class Session:
    id: str
    domain: DomainModel
    problem: ProblemInstance
    domain_text: str
    problem_text: str
    goals: frozenset[Atom]
    trace: tuple[TraceEntry, ...]
    plan: tuple[PlanStepRec, ...]
    config: SessionConfig
    revision: int
    advisories: tuple[Advisory, ...]

    @property
    def current(self) -> State:
        return self.trace[-1].state

    @cached_property
    def catalog(self) -> tuple[GroundAction, ...]:
        """Ground actions, statically pruned against the current atoms (the
        state all analysis starts from)."""
        return tuple(ground(self.domain, self.problem,
                            reference_atoms=self.current.atoms))

    @cached_property
    def catalog_index(self) -> dict[str, GroundAction]:
        return {a.id: a for a in self.catalog}

    def resolve_step(self, rec: PlanStepRec) -> PlanStep:
        action = self.catalog_index.get(rec.action_id)
        if action is None:
            try:
                action = instantiate_action(self.domain, self.problem, rec.action_id)
            except EngineError:
                action = None
        return PlanStep(rec.action_id, action, rec.executed)

    def context(self) -> AnalysisContext:
        return AnalysisContext(
            actions=self.catalog,
            current=self.current,
            goals=self.goals,
            trace=tuple(entry.state for entry in self.trace),
            steps=tuple(self.resolve_step(rec) for rec in self.plan),
        )

    def plan_report(self) -> PlanValidationReport:
        return validation_report(self.context())


@dataclass(frozen=True)
class CommandResult:
    session: Session
    advisories: tuple[Advisory, ...]
    result: dict | None = None


def create_session(domain_text: str, problem_text: str,
                   config: SessionConfig | None = None,
                   session_id: str | None = None) -> Session:
    """Parse, typecheck, and open a session at revision 0 with the problem's
    goals, an empty plan, and a first analysis already run."""
    config = config or SessionConfig()
    _check_config(config)
    dom = parse_domain(domain_text)
    prob = parse_problem(problem_text, dom)
    init = State.make(prob.init_atoms, prob.fluent_index)
    session = Session(
        id=session_id or uuid.uuid4().hex,
        domain=dom,
        problem=prob,
        domain_text=domain_text,
        problem_text=problem_text,
        goals=prob.goal,
        trace=(TraceEntry("init", init),),
        plan=(),
        config=config,
        revision=0,
        advisories=(),
    )
    advisories = tuple(analyze(session.context(), config.analysis_budget))
    return replace(session, advisories=advisories)


def _check_atom(session: Session, atom: Atom, index, kind: str) -> None:
    sig = index.get(atom.pred)
    if sig is None:
        raise InvalidCommandError(f"undeclared {kind} {atom.pred}")
    if len(atom.args) != sig.arity:
        raise InvalidCommandError(
            f"{kind} {atom.pred} expects {sig.arity} arguments, got {len(atom.args)}")
    object_types = {**dict(session.domain.constants), **dict(session.problem.objects)}
    for arg, (_, typ) in zip(atom.args, sig.params):
        obj_type = object_types.get(arg)
        if obj_type is None:
            raise InvalidCommandError(f"undeclared object {arg}")
        if not session.domain.types.is_subtype(obj_type, typ):
            raise InvalidCommandError(
                f"object {arg} of type {obj_type} does not fit parameter type {typ}")


def handle(session: Session, cmd: SessionCommand) -> CommandResult:
    """Apply one command. Raises (leaving the session unchanged) on invalid
    commands, non-applicable steps, and blocked dispatches; otherwise returns
    the next session (revision + 1) with freshly recomputed advisories."""
    goals = session.goals
    trace = session.trace
    plan = session.plan
    config = session.config
    result: dict | None = None
    edit_origin = f"edit:{_COMMAND_KIND[type(cmd)]}"

    if isinstance(cmd, (AddGoal, RemoveGoal)):
        _check_atom(session, cmd.atom, session.domain.predicate_index, "predicate")
        goals = goals | {cmd.atom} if isinstance(cmd, AddGoal) else goals - {cmd.atom}
    elif isinstance(cmd, (AddFact, RemoveFact)):
        _check_atom(session, cmd.atom, session.domain.predicate_index, "predicate")
        current = session.current
        atoms = (current.atoms | {cmd.atom} if isinstance(cmd, AddFact)
                 else current.atoms - {cmd.atom})
        trace = trace + (TraceEntry(edit_origin, current.replace(atoms=atoms)),)
    elif isinstance(cmd, AdjustResource):
        _check_atom(session, cmd.fluent, session.domain.function_index, "function")
        current = session.current
        value = current.value(cmd.fluent) + cmd.delta
        if value < 0:
            raise InvalidCommandError(
                f"adjusting {cmd.fluent} by {cmd.delta} would make it negative")
        fluents = dict(current.fluent_map)
        fluents[cmd.fluent] = value
        trace = trace + (TraceEntry(edit_origin, current.replace(fluents=fluents)),)
    elif isinstance(cmd, AppendStep):
        if cmd.action_id not in session.catalog_index:
            raise InvalidCommandError(
                f"unknown or inapplicable action {cmd.action_id!r}")
        plan = plan + (PlanStepRec(cmd.action_id),)
    elif isinstance(cmd, RemoveStep):
        if not 0 <= cmd.index < len(plan):
            raise InvalidCommandError(f"no plan step at index {cmd.index}")
        if plan[cmd.index].executed:
            raise InvalidCommandError("cannot remove an executed step")
        plan = plan[:cmd.index] + plan[cmd.index + 1:]
    elif isinstance(cmd, ExecuteStep):
        pending = next((i for i, rec in enumerate(plan) if not rec.executed), None)
        if pending is None:
            raise InvalidCommandError("no pending step to execute")
        step = session.resolve_step(plan[pending])
        if step.action is None:
            raise StepNotApplicableError(
                ActionClassification(plan[pending].action_id, BLOCKED_PROPOSITIONAL))
        classification = applicable(session.current, step.action)
        if classification.status != APPLICABLE:
            raise StepNotApplicableError(classification)
        new_state = apply_action(session.current, step.action)
        trace = trace + (TraceEntry(f"step:{step.action_id}", new_state),)
        plan = plan[:pending] + (PlanStepRec(step.action_id, True),) + plan[pending + 1:]
    elif isinstance(cmd, RequestSuggestions):
        report = session.plan_report()
        budget = cmd.budget if cmd.budget is not None else config.suggest_budget
        suggestion = suggest_actions(report.end_state, goals, session.catalog, budget)
        result = {"suggestion": suggestion.to_doc()}
    elif isinstance(cmd, Dispatch):
        report = session.plan_report()
        decision = dispatch_gate(report, config.dispatch_policy)
        if decision == "block":
            raise DispatchBlockedError(report)
        result = {"decision": decision, "report": report.to_doc()}
    elif isinstance(cmd, SetConfig):
        updates = {
            "dispatch-policy": "dispatch_policy",
            "suggest-budget": "suggest_budget",
            "analysis-budget": "analysis_budget",
        }
        if cmd.key not in updates:
            raise InvalidCommandError(f"unknown config key {cmd.key!r}")
        value = cmd.value
        if cmd.key != "dispatch-policy":
            try:
                value = float(value)
            except (TypeError, ValueError) as exc:
                raise InvalidCommandError(f"config {cmd.key} needs a number") from exc
        config = replace(config, **{updates[cmd.key]: value})
        _check_config(config)
    else:
        raise InvalidCommandError(f"unknown command {cmd!r}")

    next_session = replace(session, goals=goals, trace=trace, plan=plan,
                           config=config, revision=session.revision + 1,
                           advisories=())
    advisories = tuple(analyze(next_session.context(), config.analysis_budget))
    next_session = replace(next_session, advisories=advisories)
    return CommandResult(next_session, advisories, result)


# ---------------------------------------------------------------------------
# Snapshot / restore


def snapshot(session: Session) -> dict:
    """Versioned document capturing the whole session, including history and
    the advisories of the current revision."""
    return {
        "schema": SNAPSHOT_SCHEMA,
        "schema_version": SNAPSHOT_VERSION,
        "id": session.id,
        "revision": session.revision,
        "domain": session.domain_text,
        "problem": session.problem_text,
        "goals": sorted(str(g) for g in session.goals),
        "trace": [{"origin": e.origin, "state": e.state.to_doc()} for e in session.trace],
        "plan": [{"action": rec.action_id, "executed": rec.executed}
                 for rec in session.plan],
        "config": session.config.to_doc(),
        "advisories": [adv.to_doc() for adv in session.advisories],
    }


def restore(doc: dict) -> Session:
    """Rebuild a session from a snapshot document. Any structural defect
    raises SchemaVersionMismatch; a partially-built session never escapes."""
    if not isinstance(doc, dict):
        raise SchemaVersionMismatchError("snapshot document must be an object")
    if doc.get("schema") != SNAPSHOT_SCHEMA or doc.get("schema_version") != SNAPSHOT_VERSION:
        raise SchemaVersionMismatchError(
            f"expected {SNAPSHOT_SCHEMA} v{SNAPSHOT_VERSION}, "
            f"got {doc.get('schema')!r} v{doc.get('schema_version')!r}")
    try:
        dom = parse_domain(doc["domain"])
        prob = parse_problem(doc["problem"], dom)
        goals = frozenset(Atom.parse(g) for g in doc["goals"])
        trace = tuple(TraceEntry(e["origin"], State.from_doc(e["state"]))
                      for e in doc["trace"])
        plan = tuple(PlanStepRec(p["action"], bool(p["executed"])) for p in doc["plan"])
        config = SessionConfig.from_doc(doc["config"])
        advisories = tuple(Advisory.from_doc(a) for a in doc["advisories"])
        session = Session(
            id=str(doc["id"]),
            domain=dom,
            problem=prob,
            domain_text=doc["domain"],
            problem_text=doc["problem"],
            goals=goals,
            trace=trace,
            plan=plan,
            config=config,
            revision=int(doc["revision"]),
            advisories=advisories,
        )
    except EngineError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaVersionMismatchError(f"malformed snapshot: {exc}") from exc
    if not session.trace:
        raise SchemaVersionMismatchError("snapshot has an empty trace")
    return session


# ---------------------------------------------------------------------------
# Scenario replay


@dataclass(frozen=True)
class ScenarioEvent:
    at_ms: int
    command: SessionCommand
    note: str = ""

    def to_doc(self) -> dict:
        doc = {"at_ms": self.at_ms, "command": command_to_doc(self.command)}
        if self.note:
            doc["note"] = self.note
        return doc


def load_scenario(text: str) -> list[ScenarioEvent]:
    """Line-delimited JSON, one event per line, sorted by ``at_ms``."""
    events: list[ScenarioEvent] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ScenarioFormatError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(doc, dict) or "command" not in doc:
            raise ScenarioFormatError(f"line {lineno}: event needs a 'command' field")
        try:
            at_ms = int(doc.get("at_ms", 0))
        except (TypeError, ValueError) as exc:
            raise ScenarioFormatError(f"line {lineno}: bad at_ms") from exc
        events.append(ScenarioEvent(at_ms, command_from_doc(doc["command"]),
                                    str(doc.get("note", ""))))
    for earlier, later in zip(events, events[1:]):
        if later.at_ms < earlier.at_ms:
            raise ScenarioFormatError("events must be sorted by at_ms")
    return events


def replay(events: Sequence[ScenarioEvent], session: Session,
           realtime: bool = False) -> dict:
    """Apply events in order, recording each command's outcome and the fresh
    advisories. Failed events are recorded and skipped; the session continues
    unchanged. Time offsets are compressed unless ``realtime`` is set."""
    transcript: dict = {
        "initial": {
            "revision": session.revision,
            "advisories": [adv.to_doc() for adv in session.advisories],
        },
        "events": [],
    }
    last_ms = 0
    for index, event in enumerate(events):
        if realtime and event.at_ms > last_ms:
            time.sleep((event.at_ms - last_ms) / 1000.0)
        last_ms = event.at_ms
        entry: dict = {
            "index": index,
            "at_ms": event.at_ms,
            "command": command_to_doc(event.command),
        }
        if event.note:
            entry["note"] = event.note
        try:
            outcome = handle(session, event.command)
        except EngineError as exc:
            entry["outcome"] = "rejected"
            entry["error"] = exc.to_doc()
            entry["revision"] = session.revision
        else:
            session = outcome.session
            entry["outcome"] = "accepted"
            entry["revision"] = session.revision
            entry["advisories"] = [adv.to_doc() for adv in outcome.advisories]
            if outcome.result is not None:
                entry["result"] = outcome.result
        transcript["events"].append(entry)
    transcript["final"] = {
        "revision": session.revision,
        "advisories": [adv.to_doc() for adv in session.advisories],
        "goal_satisfied": session.plan_report().goal_satisfied,
    }
    return transcript
