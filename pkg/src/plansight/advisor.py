"""Turns landmark analysis and plan simulation into the commander-facing
outputs: alerts (impossibilities, invalid steps), suggestions (resource
shortfalls), and info items (plan progress), plus an on-demand plan
completion search and the dispatch gate.

Advisory ordering is deterministic: alerts before suggestions before info;
inside a class, grouped by kind, then by the landmark's min graph level,
then lexicographically. Messages are rendered from payloads by the
template table at the bottom; clients should consume payloads, never parse
message text.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .model import Atom, GroundAction, State, num_to_doc
from .landmarks import (
    LandmarkGraph,
    REQUIRED_RESOURCE_BLOCKED,
    REQUIRED_UNREACHABLE,
    extract_landmarks,
    landmark_status,
)
from .reachability import (
    APPLICABLE,
    ActionClassification,
    applicable,
    apply_action,
)

ALERT = "alert"
SUGGESTION = "suggestion"
INFO = "info"

GOAL_UNREACHABLE = "goal-unreachable"
LANDMARK_UNREACHABLE = "landmark-unreachable"
RESOURCE_SHORTFALL = "resource-shortfall"
PLAN_STEP_INVALID = "plan-step-invalid"
PLAN_INCOMPLETE = "plan-incomplete"
GOAL_ACHIEVED = "goal-achieved"
INFO_KIND = "info"

KIND_SEVERITY = {
    GOAL_UNREACHABLE: ALERT,
    LANDMARK_UNREACHABLE: ALERT,
    PLAN_STEP_INVALID: ALERT,
    RESOURCE_SHORTFALL: SUGGESTION,
    PLAN_INCOMPLETE: INFO,
    GOAL_ACHIEVED: INFO,
    INFO_KIND: INFO,
}

_SEVERITY_RANK = {ALERT: 0, SUGGESTION: 1, INFO: 2}
_KIND_RANK = {
    LANDMARK_UNREACHABLE: 0,
    GOAL_UNREACHABLE: 1,
    PLAN_STEP_INVALID: 2,
    RESOURCE_SHORTFALL: 3,
    PLAN_INCOMPLETE: 4,
    GOAL_ACHIEVED: 5,
    INFO_KIND: 6,
}
_INF_LEVEL = 10 ** 9


@dataclass(frozen=True)
class Advisory:
    kind: str
    severity: str
    message: str
    payload: dict

    def to_doc(self) -> dict:
        return {
            "kind": self.kind,
            "severity": self.severity,
            "message": self.message,
            "payload": self.payload,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Advisory":
        return cls(doc["kind"], doc["severity"], doc["message"], doc.get("payload", {}))


def make_advisory(kind: str, payload: dict) -> Advisory:
    return Advisory(kind, KIND_SEVERITY[kind], render_message(kind, payload), payload)


def _sort_key(adv: Advisory, level: int | None = None, text: str = ""):
    return (
        _SEVERITY_RANK[adv.severity],
        _KIND_RANK.get(adv.kind, 9),
        _INF_LEVEL if level is None else level,
        text,
    )


# ---------------------------------------------------------------------------
# Plan validation


@dataclass(frozen=True)
class PlanValidationReport:
    """Per-step verdicts from sequential simulation; evaluation stops at the
    first non-applicable step and later steps stay ``not-evaluated``."""

    steps: tuple[str, ...]  # "ok" | "invalid" | "not-evaluated"
    first_invalid: int | None
    first_invalid_classification: ActionClassification | None
    end_state: State
    goal_satisfied: bool

    def to_doc(self) -> dict:
        doc: dict = {
            "steps": list(self.steps),
            "first_invalid": self.first_invalid,
            "goal_satisfied": self.goal_satisfied,
        }
        if self.first_invalid_classification is not None:
            doc["first_invalid_classification"] = self.first_invalid_classification.to_doc()
        return doc


@dataclass(frozen=True)
class PlanStep:
    """One session plan entry. ``action`` is None when the id no longer
    resolves against the model (e.g. after a context edit)."""

    action_id: str
    action: GroundAction | None
    executed: bool = False


def validate_plan(start: State, plan: Sequence[GroundAction],
                  goal: Iterable[Atom]) -> PlanValidationReport:
    """Simulate ``plan`` from ``start`` under full semantics."""
    steps = [PlanStep(a.id, a, executed=False) for a in plan]
    return _validate_steps(start, steps, goal)


def _validate_steps(current: State, steps: Sequence[PlanStep],
                    goal: Iterable[Atom]) -> PlanValidationReport:
    """Shared core: executed prefix steps are ok by construction (the trace
    already contains their outcomes); pending steps simulate from ``current``."""
    goal = frozenset(goal)
    verdicts: list[str] = []
    state = current
    first_invalid: int | None = None
    first_classification: ActionClassification | None = None
    for index, step in enumerate(steps):
        if first_invalid is not None:
            verdicts.append("not-evaluated")
            continue
        if step.executed:
            verdicts.append("ok")
            continue
        if step.action is None:
            first_invalid = index
            first_classification = ActionClassification(
                step.action_id, "blocked-propositional")
            verdicts.append("invalid")
            continue
        classification = applicable(state, step.action)
        if classification.status != APPLICABLE:
            first_invalid = index
            first_classification = classification
            verdicts.append("invalid")
            continue
        state = apply_action(state, step.action)
        verdicts.append("ok")
    goal_satisfied = first_invalid is None and goal <= state.atoms
    return PlanValidationReport(tuple(verdicts), first_invalid,
                                first_classification, state, goal_satisfied)


def dispatch_gate(report: PlanValidationReport, policy: str) -> str:
    """Gate decision for releasing a plan: ``allow`` when the plan is valid
    and satisfies the goals, otherwise ``block`` or ``allow-with-warning``
    depending on the configured policy."""
    if policy not in ("block", "warn"):
        raise ValueError(f"unknown dispatch policy {policy!r}")
    if report.first_invalid is None and report.goal_satisfied:
        return "allow"
    return "block" if policy == "block" else "allow-with-warning"


# ---------------------------------------------------------------------------
# Context analysis


@dataclass(frozen=True)
class AnalysisContext:
    """Snapshot of everything analysis looks at. ``trace`` is the state
    history ending at ``current``; ``steps`` is the plan with executed
    markers."""

    actions: tuple[GroundAction, ...]
    current: State
    goals: frozenset[Atom]
    trace: tuple[State, ...]
    steps: tuple[PlanStep, ...] = ()


def analyze(ctx: AnalysisContext, budget_s: float = 2.0) -> list[Advisory]:
    """Full advisory pipeline: landmark extraction and statuses, impossibility
    alerts, resource suggestions, plan validation, progress info."""
    deadline = time.monotonic() + budget_s if budget_s else None
    graph = extract_landmarks(ctx.current, ctx.goals, ctx.actions, deadline=deadline)
    statuses = landmark_status(graph, ctx.trace, ctx.current, ctx.actions)

    keyed: list[tuple[tuple, Advisory]] = []
    for st in statuses:
        level = graph.levels.get(st.landmark.key)
        if st.status == REQUIRED_UNREACHABLE:
            adv = make_advisory(
                LANDMARK_UNREACHABLE,
                {"landmark": sorted(str(a) for a in st.landmark.disjuncts),
                 "origin": st.landmark.origin})
            keyed.append((_sort_key(adv, level, st.landmark.key), adv))
        elif st.status == REQUIRED_RESOURCE_BLOCKED:
            alternatives = [
                {
                    "disjunct": str(d),
                    "fluent": str(f),
                    "required": num_to_doc(req),
                    "available": num_to_doc(avail),
                    "shortfall": num_to_doc(req - avail),
                }
                for d, f, req, avail in st.resource_alternatives
            ]
            adv = make_advisory(
                RESOURCE_SHORTFALL,
                {"landmark": sorted(str(a) for a in st.landmark.disjuncts),
                 "alternatives": alternatives})
            keyed.append((_sort_key(adv, level, st.landmark.key), adv))

    unreachable_goals = sorted(
        str(g) for g in ctx.goals
        if g not in ctx.current.atoms and graph.levels.get(str(g)) is None)
    if unreachable_goals:
        adv = make_advisory(GOAL_UNREACHABLE, {"atoms": unreachable_goals})
        keyed.append((_sort_key(adv, None, "|".join(unreachable_goals)), adv))

    report = _validate_steps(ctx.current, ctx.steps, ctx.goals)
    if report.first_invalid is not None:
        step = ctx.steps[report.first_invalid]
        adv = make_advisory(PLAN_STEP_INVALID, {
            "step_index": report.first_invalid,
            "action": step.action_id,
            "classification": (report.first_invalid_classification.to_doc()
                               if report.first_invalid_classification else None),
        })
        keyed.append((_sort_key(adv, None, f"step-{report.first_invalid:06d}"), adv))
    elif report.goal_satisfied:
        adv = make_advisory(GOAL_ACHIEVED,
                            {"goals": sorted(str(g) for g in ctx.goals)})
        keyed.append((_sort_key(adv), adv))
    else:
        adv = make_advisory(PLAN_INCOMPLETE, {
            "unsatisfied_goals": sorted(
                str(g) for g in ctx.goals if g not in report.end_state.atoms)})
        keyed.append((_sort_key(adv), adv))

    if graph.partial:
        adv = make_advisory(INFO_KIND, {
            "note": "analysis truncated by the time budget; "
                    "landmark coverage may be incomplete"})
        keyed.append((_sort_key(adv), adv))

    keyed.sort(key=lambda pair: pair[0])
    return [adv for _, adv in keyed]


def validation_report(ctx: AnalysisContext) -> PlanValidationReport:
    """The validation report analyze() derives its plan advisories from."""
    return _validate_steps(ctx.current, ctx.steps, ctx.goals)


# ---------------------------------------------------------------------------
# Plan completion search


FOUND = "found"
TIMEOUT = "timeout"
UNSOLVABLE = "unsolvable"


@dataclass(frozen=True)
class SuggestionResult:
    status: str  # found | timeout | unsolvable
    plan: tuple[GroundAction, ...] | None = None
    expansions: int = 0

    def to_doc(self) -> dict:
        doc: dict = {"status": self.status, "expansions": self.expansions}
        if self.plan is not None:
            doc["plan"] = [a.id for a in self.plan]
        return doc


def suggest_actions(state: State, goal: Iterable[Atom],
                    actions: Sequence[GroundAction],
                    budget_s: float = 5.0) -> SuggestionResult:
    """Greedy best-first search for a goal-reaching action sequence from
    ``state``, guided by the count of landmarks not yet achieved along the
    path (ties: remaining landmark level sum, then last action id). Exhausting
    the search space proves unsolvability; hitting the time budget does not.
    A returned plan is re-validated before being handed back."""
    goal = frozenset(goal)
    actions = sorted(actions, key=lambda a: a.id)
    if goal <= state.atoms:
        return SuggestionResult(FOUND, ())

    graph = extract_landmarks(state, goal, actions)
    tracked = [(lm.key, lm.disjuncts, graph.levels.get(lm.key)) for lm in graph.nodes]
    if any(level is None for _, _, level in tracked):
        # A verified landmark (or goal atom) is unreachable: no plan exists.
        return SuggestionResult(UNSOLVABLE)

    def achieved_in(atoms: frozenset[Atom], already: frozenset[str]) -> frozenset[str]:
        new = {key for key, disjuncts, _ in tracked
               if key not in already and any(d in atoms for d in disjuncts)}
        return already | new if new else already

    def score(achieved: frozenset[str]) -> tuple[int, int]:
        remaining = [(key, level) for key, _, level in tracked if key not in achieved]
        return (len(remaining), sum(level for _, level in remaining))

    deadline = time.monotonic() + budget_s
    counter = 0
    start_achieved = achieved_in(state.atoms, frozenset())
    h, level_sum = score(start_achieved)
    heap: list[tuple] = [(h, level_sum, "", counter, state, (), start_achieved)]
    closed: set[State] = set()
    expansions = 0

    while heap:
        if time.monotonic() > deadline:
            return SuggestionResult(TIMEOUT, expansions=expansions)
        _, _, _, _, current, path, achieved = heapq.heappop(heap)
        if current in closed:
            continue
        closed.add(current)
        expansions += 1
        if goal <= current.atoms:
            plan = tuple(path)
            check = validate_plan(state, plan, goal)
            if not check.goal_satisfied:  # pragma: no cover - construction guarantees it
                raise RuntimeError("search returned a plan that fails validation")
            return SuggestionResult(FOUND, plan, expansions)
        for action in actions:
            if applicable(current, action).status != APPLICABLE:
                continue
            successor = apply_action(current, action)
            if successor in closed:
                continue
            next_achieved = achieved_in(successor.atoms, achieved)
            h, level_sum = score(next_achieved)
            counter += 1
            heapq.heappush(heap, (h, level_sum, action.id, counter,
                                  successor, path + (action,), next_achieved))
    return SuggestionResult(UNSOLVABLE, expansions=expansions)


# ---------------------------------------------------------------------------
# Message templates (presentation only; clients consume payloads)


def _fmt_disjunction(parts: Iterable[str]) -> str:
    parts = list(parts)
    return " or ".join(parts)


def render_message(kind: str, payload: dict) -> str:
    if kind == GOAL_UNREACHABLE:
        return ("Goal cannot be accomplished from the current state: "
                f"{', '.join(payload['atoms'])} cannot be reached.")
    if kind == LANDMARK_UNREACHABLE:
        return ("Required milestone is no longer reachable: "
                f"{_fmt_disjunction(payload['landmark'])}.")
    if kind == RESOURCE_SHORTFALL:
        options = [
            f"{alt['shortfall']} more {alt['fluent']} (to reach {alt['disjunct']})"
            for alt in payload["alternatives"]
        ]
        return f"Resources needed: {_fmt_disjunction(options)}."
    if kind == PLAN_STEP_INVALID:
        cls = payload.get("classification") or {}
        reasons = []
        for item in cls.get("failed_numeric", []):
            reasons.append(f"needs {item['fluent']} >= {item['required']}, "
                           f"have {item['available']}")
        for atom in cls.get("missing_atoms", []):
            reasons.append(f"requires {atom}")
        for atom in cls.get("forbidden_atoms", []):
            reasons.append(f"forbidden while {atom} holds")
        reason = "; ".join(reasons) or "preconditions not satisfied"
        return (f"Plan step {payload['step_index'] + 1} ({payload['action']}) "
                f"is not applicable: {reason}.")
    if kind == PLAN_INCOMPLETE:
        missing = payload.get("unsatisfied_goals", [])
        return f"Plan does not yet achieve: {', '.join(missing)}."
    if kind == GOAL_ACHIEVED:
        goals = payload.get("goals", [])
        if goals:
            return f"All goals are satisfied: {', '.join(goals)}."
        return "No goals are set; nothing left to plan."
    return payload.get("note", "")
