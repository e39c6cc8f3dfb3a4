"""Landmark extraction, verification, and status tracking.

A landmark is a fact (or same-predicate disjunction of facts) that every
plan reaching the goals from the current state must make true at some
point. Extraction backchains over the relaxed planning graph: goal atoms
seed the queue, and each landmark's first achievers contribute shared
preconditions as new candidates. Every derived candidate is certified by
``verify_landmark`` before it is emitted, so emitted landmarks are sound;
the extractor makes no completeness promise.

Ordering edges are presentational only (greedy-necessary edges record the
derivation parent, natural edges follow strictly increasing graph levels);
nothing prunes on them.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .model import Atom, Fluent, GroundAction, State
from .reachability import (
    BLOCKED_RESOURCE,
    RelaxedPlanningGraph,
    applicable,
    build_rpg,
    first_achievers,
)

DEFAULT_DISJUNCTION_CAP = 4

ACHIEVED = "achieved"
REQUIRED_REACHABLE = "required-reachable"
REQUIRED_RESOURCE_BLOCKED = "required-resource-blocked"
REQUIRED_UNREACHABLE = "required-unreachable"


def landmark_key(disjuncts: Iterable[Atom]) -> str:
    return "|".join(sorted(str(a) for a in disjuncts))


@dataclass(frozen=True)
class Landmark:
    """Singleton set = fact landmark; larger sets share one predicate symbol."""

    disjuncts: frozenset[Atom]
    origin: str  # "goal" | "derived"
    verified: bool

    @property
    def key(self) -> str:
        return landmark_key(self.disjuncts)

    def to_doc(self) -> dict:
        return {
            "disjuncts": sorted(str(a) for a in self.disjuncts),
            "origin": self.origin,
            "verified": self.verified,
        }


@dataclass(frozen=True)
class LandmarkGraph:
    """Extraction result: nodes sorted by (min graph level, key), ordering
    edges as (from-key, to-key, kind), and each node's min level at the
    extraction state (None/missing = unreachable there)."""

    nodes: tuple[Landmark, ...]
    orders: tuple[tuple[str, str, str], ...]
    levels: dict[str, int | None]
    partial: bool = False  # extraction stopped early on the analysis budget

    def node(self, key: str) -> Landmark | None:
        for lm in self.nodes:
            if lm.key == key:
                return lm
        return None

    def to_doc(self) -> dict:
        return {
            "nodes": [
                {**lm.to_doc(), "level": self.levels.get(lm.key)}
                for lm in self.nodes
            ],
            "edges": [
                {"from": a, "to": b, "kind": kind} for a, b, kind in self.orders
            ],
            "partial": self.partial,
        }


def verify_landmark(candidate: frozenset[Atom] | set[Atom], state: State,
                    goal: Iterable[Atom], actions: Sequence[GroundAction]) -> bool:
    """Certify a candidate: with every action that could add a member of the
    candidate removed, some goal atom must be relaxed-unreachable. Relaxed
    unreachability implies real unreachability, so acceptance is sound."""
    candidate = frozenset(candidate)
    excluded = frozenset(a.id for a in actions if a.add & candidate)
    rpg = build_rpg(state, list(actions), "ignore-numeric", excluded=excluded)
    return not rpg.reachable(goal)


def extract_landmarks(state: State, goal: Iterable[Atom],
                      actions: Sequence[GroundAction],
                      cap: int = DEFAULT_DISJUNCTION_CAP,
                      deadline: float | None = None) -> LandmarkGraph:
    """Backchain landmarks from the goal atoms at ``state``.

    Unreachable goal atoms stay in the graph with a ``None`` level; callers
    surface that as an alert rather than an exception. When ``deadline``
    (``time.monotonic`` value) passes mid-extraction the graph is returned
    with ``partial=True``.
    """
    goal_atoms = sorted(set(goal), key=str)
    actions = list(actions)
    rpg = build_rpg(state, actions, "ignore-numeric")

    nodes: dict[frozenset[Atom], Landmark] = {}
    gn_edges: set[tuple[str, str]] = set()
    queue: deque[frozenset[Atom]] = deque()
    partial = False

    for atom in goal_atoms:
        disjuncts = frozenset([atom])
        if disjuncts not in nodes:
            nodes[disjuncts] = Landmark(disjuncts, "goal", True)
            queue.append(disjuncts)

    while queue:
        current = queue.popleft()
        level = rpg.min_level(current)
        if level is None or level == 0:
            continue
        achievers = first_achievers(rpg, current)
        if not achievers:
            continue

        candidates: list[frozenset[Atom]] = []
        common = frozenset.intersection(*(a.pre for a in achievers))
        for atom in sorted(common, key=str):
            candidates.append(frozenset([atom]))
        for symbol in sorted({p.pred for a in achievers for p in a.pre}):
            groups = [{p for p in a.pre if p.pred == symbol} for a in achievers]
            if all(groups):
                union = frozenset().union(*groups)
                if 1 <= len(union) <= cap:
                    candidates.append(union)

        seen_here: set[frozenset[Atom]] = set()
        for cand in candidates:
            if cand in seen_here:
                continue
            seen_here.add(cand)
            if cand in nodes:
                if cand != current:
                    gn_edges.add((landmark_key(cand), landmark_key(current)))
                continue
            if all(d in state.atoms for d in cand):
                continue  # already holds here; nothing to verify or chase
            if deadline is not None and time.monotonic() > deadline:
                partial = True
                queue.clear()
                break
            if verify_landmark(cand, state, goal_atoms, actions):
                nodes[cand] = Landmark(cand, "derived", True)
                gn_edges.add((landmark_key(cand), landmark_key(current)))
                queue.append(cand)

    levels = {lm.key: rpg.min_level(lm.disjuncts) for lm in nodes.values()}

    def sort_key(lm: Landmark):
        level = levels[lm.key]
        return (level is None, level if level is not None else 0, lm.key)

    ordered = tuple(sorted(nodes.values(), key=sort_key))

    orders: set[tuple[str, str, str]] = {(a, b, "greedy-necessary") for a, b in gn_edges}
    for source in ordered:
        for target in ordered:
            ls, lt = levels[source.key], levels[target.key]
            if ls is None or lt is None or not ls < lt:
                continue
            if (source.key, target.key) in gn_edges:
                continue
            orders.add((source.key, target.key, "natural"))

    return LandmarkGraph(ordered, tuple(sorted(orders)), levels, partial)


@dataclass(frozen=True)
class LandmarkStatus:
    """Where a landmark stands against the session history and current state.
    ``resource_alternatives`` is populated for resource-blocked landmarks:
    one row per failed fluent of the cheapest blocked achiever, per disjunct."""

    landmark: Landmark
    status: str
    resource_alternatives: tuple[tuple[Atom, Fluent, Fraction, Fraction], ...] = ()
    # rows: (disjunct, fluent, required, available)

    def to_doc(self) -> dict:
        from .model import num_to_doc

        doc = {**self.landmark.to_doc(), "status": self.status}
        if self.resource_alternatives:
            doc["resource_alternatives"] = [
                {
                    "disjunct": str(d),
                    "fluent": str(f),
                    "required": num_to_doc(req),
                    "available": num_to_doc(avail),
                    "shortfall": num_to_doc(max(Fraction(0), req - avail)),
                }
                for d, f, req, avail in self.resource_alternatives
            ]
        return doc


def landmark_status(graph: LandmarkGraph, trace: Sequence[State], current: State,
                    actions: Sequence[GroundAction]) -> list[LandmarkStatus]:
    """Classify each landmark: achieved if some disjunct held anywhere in the
    trace (the trace ends at ``current``); required-unreachable if every
    disjunct is relaxed-unreachable from ``current``; required-resource-blocked
    when reachable but every first achiever of every reachable disjunct is
    blocked only by numeric preconditions in ``current``."""
    actions = list(actions)
    rpg = build_rpg(current, actions, "ignore-numeric")
    history = list(trace)
    if not history or history[-1] != current:
        history.append(current)

    out: list[LandmarkStatus] = []
    for lm in graph.nodes:
        if any(any(d in s.atoms for d in lm.disjuncts) for s in history):
            out.append(LandmarkStatus(lm, ACHIEVED))
            continue
        reachable = [d for d in sorted(lm.disjuncts, key=str)
                     if rpg.level(d) is not None]
        if not reachable:
            out.append(LandmarkStatus(lm, REQUIRED_UNREACHABLE))
            continue
        rows: list[tuple[Atom, Fluent, Fraction, Fraction]] = []
        all_resource_blocked = True
        any_achiever = False
        for disjunct in reachable:
            if rpg.level(disjunct) == 0:
                all_resource_blocked = False
                break
            achievers = first_achievers(rpg, disjunct)
            classifications = [applicable(current, a) for a in achievers]
            any_achiever = any_achiever or bool(achievers)
            if not all(c.status == BLOCKED_RESOURCE for c in classifications):
                all_resource_blocked = False
                break
            best = min(
                zip(achievers, classifications),
                key=lambda pair: (
                    sum(req - avail for _, req, avail in pair[1].failed_numeric),
                    pair[0].id,
                ),
            )
            rows.extend((disjunct, f, req, avail)
                        for f, req, avail in best[1].failed_numeric)
        if all_resource_blocked and any_achiever:
            out.append(LandmarkStatus(lm, REQUIRED_RESOURCE_BLOCKED, tuple(rows)))
        else:
            out.append(LandmarkStatus(lm, REQUIRED_REACHABLE))
    return out
