"""Instantiate action schemas into ground actions.

Grounding enumerates every type-consistent binding, resolves equality
constraints statically, and prunes actions whose static preconditions
(atoms of predicates no schema ever adds) are false in the reference
atom set. Output order is lexicographic by action id and therefore
deterministic.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Sequence

from .errors import PddlSemanticError
from .model import (
    ActionSchema,
    Atom,
    DomainModel,
    Fluent,
    GroundAction,
    ProblemInstance,
    format_id,
)


def objects_by_type(dom: DomainModel, prob: ProblemInstance) -> dict[str, list[str]]:
    """Sorted object pool (constants + problem objects) per declared type."""
    pool = list(dom.constants) + list(prob.objects)
    out: dict[str, list[str]] = {}
    for typ in sorted(dom.types.names):
        out[typ] = sorted(obj for obj, obj_type in pool
                          if dom.types.is_subtype(obj_type, typ))
    return out


def _substitute(atom: Atom, binding: dict[str, str]) -> Atom:
    return Atom(atom.pred, tuple(binding.get(a, a) for a in atom.args))


def _binding_ok(schema: ActionSchema, binding: dict[str, str]) -> bool:
    for a, b, must_equal in schema.equalities:
        va, vb = binding.get(a, a), binding.get(b, b)
        if (va == vb) != must_equal:
            return False
    return True


def instantiate(schema: ActionSchema, args: Sequence[str]) -> GroundAction:
    """Apply a binding (positional, one object per parameter) to a schema."""
    binding = {var: obj for (var, _), obj in zip(schema.params, args)}
    return GroundAction(
        id=format_id(schema.name, args),
        name=schema.name,
        args=tuple(args),
        pre=frozenset(_substitute(a, binding) for a in schema.pos_pre),
        neg_pre=frozenset(_substitute(a, binding) for a in schema.neg_pre),
        numeric_pre=tuple((_substitute(f, binding), c) for f, c in schema.numeric_pre),
        add=frozenset(_substitute(a, binding) for a in schema.add),
        delete=frozenset(_substitute(a, binding) for a in schema.delete),
        numeric_eff=tuple((_substitute(f, binding), op, c)
                          for f, op, c in schema.numeric_eff),
    )


def ground(dom: DomainModel, prob: ProblemInstance,
           reference_atoms: frozenset[Atom] | None = None) -> list[GroundAction]:
    """All type-consistent instantiations of every schema, minus bindings that
    violate an equality constraint or a static precondition.

    ``reference_atoms`` is the atom set static preconditions are checked
    against; it defaults to the problem's initial atoms.
    """
    if reference_atoms is None:
        reference_atoms = prob.init_atoms
    pools = objects_by_type(dom, prob)
    static = dom.static_predicates
    out: list[GroundAction] = []
    for schema in dom.schemas:
        for combo in product(*(pools.get(typ, []) for _, typ in schema.params)):
            binding = {var: obj for (var, _), obj in zip(schema.params, combo)}
            if not _binding_ok(schema, binding):
                continue
            action = instantiate(schema, combo)
            if any(p.pred in static and p not in reference_atoms for p in action.pre):
                continue
            out.append(action)
    out.sort(key=lambda a: a.id)
    return out


def instantiate_action(dom: DomainModel, prob: ProblemInstance,
                       action_id: str) -> GroundAction:
    """Resolve a canonical action id (``name(arg1,...)``) into a ground action,
    bypassing static pruning. Raises SemanticError on unknown names, arity
    mismatches, or ill-typed arguments."""
    ref = Atom.parse(action_id)
    schema = dom.schema_index.get(ref.pred)
    if schema is None:
        raise PddlSemanticError(f"unknown action {ref.pred}")
    if len(ref.args) != len(schema.params):
        raise PddlSemanticError(
            f"action {ref.pred} expects {len(schema.params)} arguments, "
            f"got {len(ref.args)}")
    object_types = {**dict(dom.constants), **dict(prob.objects)}
    for arg, (_, typ) in zip(ref.args, schema.params):
        obj_type = object_types.get(arg)
        if obj_type is None:
            raise PddlSemanticError(f"undeclared object {arg} in {action_id}")
        if not dom.types.is_subtype(obj_type, typ):
            raise PddlSemanticError(
                f"object {arg} of type {obj_type} does not fit parameter type {typ}")
    binding = {var: obj for (var, _), obj in zip(schema.params, ref.args)}
    if not _binding_ok(schema, binding):
        raise PddlSemanticError(f"binding violates equality constraints in {action_id}")
    return instantiate(schema, ref.args)
