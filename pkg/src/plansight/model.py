"""Value types shared by every engine layer: atoms, fluents, states,
action schemas, and ground actions.

Everything here is immutable after construction and safe to share across
threads. Atoms double as ground numeric-function terms (a fluent is an
atom whose symbol names a declared function).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional

from .errors import PddlSemanticError

ROOT_TYPE = "object"

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_\-]*$")
_ATOM_RE = re.compile(r"\s*([A-Za-z][A-Za-z0-9_\-]*)\s*(?:\(([^()]*)\))?\s*$")


@dataclass(frozen=True)
class Atom:
    """Ground proposition or function term, canonically ``name(arg1,arg2)``
    (bare ``name`` when there are no arguments)."""

    pred: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(self.args)})"

    @classmethod
    def parse(cls, text: str) -> "Atom":
        m = _ATOM_RE.match(text)
        if not m:
            raise PddlSemanticError(f"malformed atom {text!r}")
        name, arglist = m.group(1), m.group(2)
        if arglist is None:
            return cls(name)
        args = tuple(a.strip() for a in arglist.split(",") if a.strip())
        return cls(name, args)


# A numeric-function term has the same shape as a proposition.
Fluent = Atom


def format_id(name: str, args: Iterable[str]) -> str:
    args = tuple(args)
    return f"{name}({','.join(args)})" if args else name


def num_to_doc(value: Fraction) -> int | str:
    """JSON encoding for exact rationals: int when integral, else ``p/q``."""
    if value.denominator == 1:
        return int(value)
    return f"{value.numerator}/{value.denominator}"


def num_from_doc(raw) -> Fraction:
    if isinstance(raw, bool):
        raise PddlSemanticError(f"not a number: {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        return Fraction(str(raw))
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise PddlSemanticError(f"not a number: {raw!r}") from exc
    raise PddlSemanticError(f"not a number: {raw!r}")


@dataclass(frozen=True)
class Signature:
    """Predicate or function declaration: name plus typed parameters."""

    name: str
    params: tuple[tuple[str, str], ...] = ()  # (variable, type)

    @property
    def arity(self) -> int:
        return len(self.params)


# Numeric effect operators, applied in listed order by apply().
NUM_OPS = ("decrease", "increase", "assign")


@dataclass(frozen=True)
class ActionSchema:
    """Lifted action. Atom templates use ``?var`` strings in arg positions."""

    name: str
    params: tuple[tuple[str, str], ...]  # (variable, type)
    pos_pre: tuple[Atom, ...] = ()
    neg_pre: tuple[Atom, ...] = ()
    numeric_pre: tuple[tuple[Fluent, Fraction], ...] = ()  # comparator is >=
    add: tuple[Atom, ...] = ()
    delete: tuple[Atom, ...] = ()
    numeric_eff: tuple[tuple[Fluent, str, Fraction], ...] = ()
    equalities: tuple[tuple[str, str, bool], ...] = ()  # (term, term, must-be-equal)


@dataclass(frozen=True)
class DomainModel:
    name: str
    requirements: tuple[str, ...]
    types: "TypeHierarchy"
    constants: tuple[tuple[str, str], ...]  # (object, type)
    predicates: tuple[Signature, ...]
    functions: tuple[Signature, ...]
    schemas: tuple[ActionSchema, ...]

    @cached_property
    def predicate_index(self) -> dict[str, Signature]:
        return {p.name: p for p in self.predicates}

    @cached_property
    def function_index(self) -> dict[str, Signature]:
        return {f.name: f for f in self.functions}

    @cached_property
    def schema_index(self) -> dict[str, ActionSchema]:
        return {s.name: s for s in self.schemas}

    @cached_property
    def static_predicates(self) -> frozenset[str]:
        """Predicates no schema ever adds; their true extent is fixed by init."""
        added = {a.pred for s in self.schemas for a in s.add}
        return frozenset(p.name for p in self.predicates if p.name not in added)


@dataclass(frozen=True)
class TypeHierarchy:
    """Acyclic type forest rooted at the universal type ``object``."""

    parents: tuple[tuple[str, str], ...]  # (type, parent); root omitted

    @cached_property
    def parent_index(self) -> dict[str, str]:
        return dict(self.parents)

    @cached_property
    def names(self) -> frozenset[str]:
        return frozenset({ROOT_TYPE, *self.parent_index.keys(), *self.parent_index.values()})

    def is_subtype(self, child: str, ancestor: str) -> bool:
        if ancestor == ROOT_TYPE:
            return child in self.names
        t: Optional[str] = child
        while t is not None:
            if t == ancestor:
                return True
            t = self.parent_index.get(t)
        return False


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...]  # (object, type); domain constants excluded
    init_atoms: frozenset[Atom]
    init_fluents: tuple[tuple[Fluent, Fraction], ...]
    goal: frozenset[Atom]

    @cached_property
    def fluent_index(self) -> dict[Fluent, Fraction]:
        return dict(self.init_fluents)


@dataclass(frozen=True)
class GroundAction:
    """Fully instantiated action with propositional and numeric conditions."""

    id: str
    name: str
    args: tuple[str, ...]
    pre: frozenset[Atom]
    neg_pre: frozenset[Atom]
    numeric_pre: tuple[tuple[Fluent, Fraction], ...]  # each means fluent >= constant
    add: frozenset[Atom]
    delete: frozenset[Atom]
    numeric_eff: tuple[tuple[Fluent, str, Fraction], ...]

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class State:
    """World snapshot: true atoms plus fluent valuation. Hashable so search
    and the exhaustive oracles can dedupe on it. Fluents absent from the
    valuation read as zero."""

    atoms: frozenset[Atom]
    fluents: tuple[tuple[Fluent, Fraction], ...] = ()

    @classmethod
    def make(cls, atoms: Iterable[Atom], fluents: Mapping[Fluent, Fraction] | None = None) -> "State":
        items = tuple(sorted((fluents or {}).items(), key=lambda kv: str(kv[0])))
        return cls(frozenset(atoms), items)

    @cached_property
    def fluent_map(self) -> dict[Fluent, Fraction]:
        return dict(self.fluents)

    def value(self, fluent: Fluent) -> Fraction:
        return self.fluent_map.get(fluent, Fraction(0))

    def holds(self, atom: Atom) -> bool:
        return atom in self.atoms

    def replace(self, atoms: frozenset[Atom] | None = None,
                fluents: Mapping[Fluent, Fraction] | None = None) -> "State":
        return State.make(self.atoms if atoms is None else atoms,
                          self.fluent_map if fluents is None else fluents)

    def to_doc(self) -> dict:
        return {
            "atoms": sorted(str(a) for a in self.atoms),
            "fluents": {str(f): num_to_doc(v) for f, v in self.fluents},
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "State":
        atoms = {Atom.parse(a) for a in doc.get("atoms", [])}
        fluents = {Atom.parse(f): num_from_doc(v) for f, v in doc.get("fluents", {}).items()}
        return cls.make(atoms, fluents)
