"""Execution semantics and delete-relaxation reachability.

``applicable``/``apply_action`` implement the full semantics used to
simulate and execute plans. ``build_rpg`` builds the layered relaxed
planning graph that powers the landmark extractor: delete effects and
negative preconditions are ignored, which makes unreachability verdicts
sound (never "unreachable" when a real plan exists).

Two resource policies are supported:

* ``ignore-numeric`` treats every numeric precondition as satisfied.
* ``enforce-numeric-static`` admits an action only if its numeric
  preconditions hold against the start fluents, where any fluent some
  admitted action increases (or assigns) counts as unbounded — a monotone
  relaxation, so decreases never mask reachability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal

from .errors import (
    NegativeResourceError,
    NotApplicableError,
    TargetInitiallyTrueError,
    TargetUnreachableError,
)
from .model import Atom, Fluent, GroundAction, State, num_to_doc

ResourcePolicy = Literal["ignore-numeric", "enforce-numeric-static"]

APPLICABLE = "applicable"
BLOCKED_PROPOSITIONAL = "blocked-propositional"
BLOCKED_RESOURCE = "blocked-resource"


@dataclass(frozen=True)
class ActionClassification:
    """Why an action is or is not applicable in a given state."""

    action_id: str
    status: str
    failed_numeric: tuple[tuple[Fluent, Fraction, Fraction], ...] = ()  # (fluent, required, available)
    missing_atoms: tuple[Atom, ...] = ()
    forbidden_atoms: tuple[Atom, ...] = ()

    def to_doc(self) -> dict:
        doc: dict = {"action": self.action_id, "status": self.status}
        if self.failed_numeric:
            doc["failed_numeric"] = [
                {"fluent": str(f), "required": num_to_doc(req), "available": num_to_doc(av)}
                for f, req, av in self.failed_numeric]
        if self.missing_atoms:
            doc["missing_atoms"] = sorted(str(a) for a in self.missing_atoms)
        if self.forbidden_atoms:
            doc["forbidden_atoms"] = sorted(str(a) for a in self.forbidden_atoms)
        return doc


def applicable(state: State, action: GroundAction) -> ActionClassification:
    """Classify ``action`` against ``state``. Propositional blocking dominates:
    ``blocked-resource`` means every propositional precondition holds and at
    least one numeric precondition fails."""
    missing = tuple(sorted((a for a in action.pre if a not in state.atoms), key=str))
    forbidden = tuple(sorted((a for a in action.neg_pre if a in state.atoms), key=str))
    failed = tuple((f, req, state.value(f))
                   for f, req in action.numeric_pre if state.value(f) < req)
    if missing or forbidden:
        status = BLOCKED_PROPOSITIONAL
    elif failed:
        status = BLOCKED_RESOURCE
    else:
        status = APPLICABLE
    return ActionClassification(action.id, status, failed, missing, forbidden)


def apply_action(state: State, action: GroundAction) -> State:
    """Successor state under full semantics. Raises NotApplicable when the
    preconditions fail and NegativeResource when a decrease would drive a
    fluent below zero (a domain-authoring bug: the decrease is unguarded)."""
    classification = applicable(state, action)
    if classification.status != APPLICABLE:
        raise NotApplicableError(classification)
    atoms = (state.atoms - action.delete) | action.add
    fluents = state.fluent_map.copy()
    for fluent, op, constant in action.numeric_eff:
        current = fluents.get(fluent, Fraction(0))
        if op == "decrease":
            current -= constant
        elif op == "increase":
            current += constant
        else:  # assign
            current = constant
        if current < 0:
            raise NegativeResourceError(action.id, str(fluent))
        fluents[fluent] = current
    return State.make(atoms, fluents)


@dataclass(frozen=True)
class RelaxedPlanningGraph:
    """Layered reachability under delete relaxation. ``fact_level`` maps each
    reached atom to the first layer containing it; absent atoms are
    unreachable. An action's level is the max level of its positive
    propositional preconditions."""

    fact_level: dict[Atom, int]
    action_level: dict[str, int]
    levels: int
    policy: str
    actions_by_id: dict[str, GroundAction] = field(repr=False)

    def level(self, atom: Atom) -> int | None:
        return self.fact_level.get(atom)

    def min_level(self, atoms: Iterable[Atom]) -> int | None:
        levels = [self.fact_level[a] for a in atoms if a in self.fact_level]
        return min(levels) if levels else None

    def reachable(self, atoms: Iterable[Atom]) -> bool:
        """True when every atom in the conjunction has a finite level."""
        return all(a in self.fact_level for a in atoms)


def _numeric_eligible(action: GroundAction, state: State,
                      unbounded: set[Fluent]) -> bool:
    return all(f in unbounded or state.value(f) >= req
               for f, req in action.numeric_pre)


def build_rpg(state: State, actions: list[GroundAction],
              policy: ResourcePolicy = "ignore-numeric",
              excluded: frozenset[str] = frozenset()) -> RelaxedPlanningGraph:
    """Fixpoint construction of the relaxed planning graph from ``state``.

    ``excluded`` action ids never participate (used by landmark
    verification). Negative propositional preconditions are treated as
    satisfied at every level.
    """
    if policy not in ("ignore-numeric", "enforce-numeric-static"):
        raise ValueError(f"unknown resource policy {policy!r}")

    candidates = [a for a in actions if a.id not in excluded]
    unbounded: set[Fluent] = set()
    while True:
        fact_level: dict[Atom, int] = {a: 0 for a in state.atoms}
        action_level: dict[str, int] = {}
        pending = list(candidates)
        if policy == "enforce-numeric-static":
            pending = [a for a in pending if _numeric_eligible(a, state, unbounded)]
        level = 0
        while True:
            new_facts: dict[Atom, int] = {}
            still_pending = []
            for action in pending:
                pre_levels = [fact_level.get(p) for p in action.pre]
                if any(l is None for l in pre_levels):
                    still_pending.append(action)
                    continue
                action_level[action.id] = max(pre_levels, default=0)
                for atom in action.add:
                    if atom not in fact_level and atom not in new_facts:
                        new_facts[atom] = level + 1
            pending = still_pending
            if not new_facts:
                break
            fact_level.update(new_facts)
            level += 1
        if policy != "enforce-numeric-static":
            break
        # Widen the fluent bound by everything the admitted actions can raise,
        # then rebuild; stable once no new fluent becomes unbounded.
        grew = False
        for action in candidates:
            if action.id in action_level:
                for fluent, op, _ in action.numeric_eff:
                    if op in ("increase", "assign") and fluent not in unbounded:
                        unbounded.add(fluent)
                        grew = True
        if not grew:
            break
    return RelaxedPlanningGraph(fact_level, action_level, level, policy,
                                {a.id: a for a in candidates})


def first_achievers(rpg: RelaxedPlanningGraph,
                    target: Atom | Iterable[Atom]) -> list[GroundAction]:
    """Actions that can add a member of ``target`` strictly before the
    target's first level (for a set: the minimum member level). Sorted by id."""
    atoms = frozenset([target] if isinstance(target, Atom) else target)
    level = rpg.min_level(atoms)
    if level is None:
        raise TargetUnreachableError(f"target {sorted(map(str, atoms))} is unreachable")
    if level == 0:
        raise TargetInitiallyTrueError(f"target {sorted(map(str, atoms))} already holds")
    out = [a for a in rpg.actions_by_id.values()
           if rpg.action_level.get(a.id, None) is not None
           and rpg.action_level[a.id] < level and a.add & atoms]
    out.sort(key=lambda a: a.id)
    return out
