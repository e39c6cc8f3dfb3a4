"""Text front end for the supported planning-language subset.

Supported: ``:strips`` ``:typing`` ``:negative-preconditions`` ``:equality``
plus numeric resource functions restricted to ``(>= (f ...) c)``
preconditions and ``increase``/``decrease``/``assign``-by-constant effects.
The machine-readable description of the subset ships in
``docs/pddl_subset.json``.

``parse_domain``/``parse_problem`` validate as they build; ``domain_to_pddl``
and ``problem_to_pddl`` re-emit canonical text that parses back to a
structurally identical model.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import PddlSemanticError, PddlSyntaxError, UnsupportedFeatureError
from .model import (
    ROOT_TYPE,
    ActionSchema,
    Atom,
    DomainModel,
    Fluent,
    ProblemInstance,
    Signature,
    TypeHierarchy,
)

SUPPORTED_REQUIREMENTS = (
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":equality",
    ":fluents",
)

_NUM_RE = re.compile(r"-?[0-9]+(\.[0-9]+)?$")
_IDENT_RE = re.compile(r"[a-z][a-z0-9_\-]*$")


# ---------------------------------------------------------------------------
# Tokenizer / reader


@dataclass(frozen=True)
class Tok:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int
    col: int


def _tokenize(text: str) -> list[Tok]:
    toks: list[Tok] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            toks.append(Tok(ch, line, col))
            col += 1
            i += 1
        else:
            start, start_col = i, col
            while i < n and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            toks.append(Tok(text[start:i].lower(), line, start_col))
    return toks


def _read(text: str) -> SList:
    """Read exactly one s-expression; anything after it is an error."""
    toks = _tokenize(text)
    if not toks:
        raise PddlSyntaxError("empty input", 1, 1)
    pos = 0

    def read_one():
        nonlocal pos
        tok = toks[pos]
        if tok.text == ")":
            raise PddlSyntaxError("unexpected ')'", tok.line, tok.col)
        if tok.text != "(":
            pos += 1
            return tok
        open_tok = tok
        pos += 1
        items = []
        while True:
            if pos >= len(toks):
                raise PddlSyntaxError("unbalanced '('", open_tok.line, open_tok.col)
            if toks[pos].text == ")":
                pos += 1
                return SList(tuple(items), open_tok.line, open_tok.col)
            items.append(read_one())

    node = read_one()
    if pos != len(toks):
        extra = toks[pos]
        raise PddlSyntaxError("trailing content after top-level form", extra.line, extra.col)
    if not isinstance(node, SList):
        raise PddlSyntaxError("expected a parenthesized form", node.line, node.col)
    return node


def _head(node: SList) -> str:
    if not node.items or not isinstance(node.items[0], Tok):
        raise PddlSyntaxError("expected a form starting with a symbol", node.line, node.col)
    return node.items[0].text


def _as_tok(node, what: str) -> Tok:
    if not isinstance(node, Tok):
        raise PddlSyntaxError(f"expected {what}", node.line, node.col)
    return node


def _check_ident(tok: Tok, what: str) -> str:
    if not _IDENT_RE.match(tok.text):
        raise PddlSyntaxError(f"invalid {what} {tok.text!r}", tok.line, tok.col)
    return tok.text


def _parse_number(tok: Tok) -> Fraction:
    if not _NUM_RE.match(tok.text):
        raise PddlSyntaxError(f"expected a numeric constant, got {tok.text!r}", tok.line, tok.col)
    value = Fraction(tok.text)
    if value < 0:
        raise PddlSemanticError("numeric constants must be nonnegative", tok.line, tok.col)
    return value


def _parse_typed_list(items: tuple, what: str) -> list[tuple[str, str, Tok]]:
    """``a b - t c`` style list; untyped trailers default to the root type.
    Returns (name, type, token) triples."""
    out: list[tuple[str, str, Tok]] = []
    pending: list[Tok] = []
    i = 0
    while i < len(items):
        tok = _as_tok(items[i], f"a {what} name")
        if tok.text == "-":
            if not pending:
                raise PddlSyntaxError("dangling '-' in typed list", tok.line, tok.col)
            if i + 1 >= len(items):
                raise PddlSyntaxError("missing type after '-'", tok.line, tok.col)
            type_tok = _as_tok(items[i + 1], "a type name")
            for p in pending:
                out.append((p.text, type_tok.text, p))
            pending = []
            i += 2
        else:
            pending.append(tok)
            i += 1
    for p in pending:
        out.append((p.text, ROOT_TYPE, p))
    return out


# ---------------------------------------------------------------------------
# Domain


def parse_domain(text: str) -> DomainModel:
    """Parse and validate a domain definition."""
    root = _read(text)
    if _head(root) != "define":
        raise PddlSyntaxError("expected (define (domain ...) ...)", root.line, root.col)
    if len(root.items) < 2 or not isinstance(root.items[1], SList) \
            or _head(root.items[1]) != "domain":
        raise PddlSyntaxError("expected (domain NAME)", root.line, root.col)
    name_form = root.items[1]
    if len(name_form.items) != 2:
        raise PddlSyntaxError("expected (domain NAME)", name_form.line, name_form.col)
    name = _check_ident(_as_tok(name_form.items[1], "a domain name"), "domain name")

    requirements: tuple[str, ...] = ()
    parents: list[tuple[str, str]] = []
    declared_types: set[str] = {ROOT_TYPE}
    constants: list[tuple[str, str]] = []
    predicates: list[Signature] = []
    functions: list[Signature] = []
    schemas: list[ActionSchema] = []

    seen_sections: set[str] = set()
    for section in root.items[2:]:
        if not isinstance(section, SList):
            raise PddlSyntaxError("expected a (:section ...) form", section.line, section.col)
        head = _head(section)
        if head in ("(", ")"):
            raise PddlSyntaxError("malformed section", section.line, section.col)
        if head != ":action" and head in seen_sections:
            raise PddlSemanticError(f"duplicate {head} section", section.line, section.col)
        seen_sections.add(head)

        if head == ":requirements":
            reqs = []
            for item in section.items[1:]:
                tok = _as_tok(item, "a requirement flag")
                if tok.text not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeatureError(tok.text, tok.line, tok.col)
                reqs.append(tok.text)
            requirements = tuple(reqs)
        elif head == ":types":
            for type_name, parent, tok in _parse_typed_list(section.items[1:], "type"):
                _check_ident(tok, "type name")
                if type_name == ROOT_TYPE:
                    raise PddlSemanticError("the root type cannot be redeclared",
                                            tok.line, tok.col)
                if type_name in declared_types:
                    raise PddlSemanticError(f"duplicate type {type_name}", tok.line, tok.col)
                declared_types.add(type_name)
                parents.append((type_name, parent))
        elif head == ":constants":
            constants.extend(
                (obj, typ) for obj, typ, tok in _parse_typed_list(section.items[1:], "constant"))
        elif head == ":predicates":
            for decl in section.items[1:]:
                predicates.append(_parse_signature(decl, "predicate"))
        elif head == ":functions":
            for decl in section.items[1:]:
                functions.append(_parse_signature(decl, "function"))
        elif head == ":action":
            schemas.append(_parse_action(section))
        else:
            raise UnsupportedFeatureError(head, section.line, section.col)

    hierarchy = TypeHierarchy(tuple(parents))
    _check_hierarchy(hierarchy, declared_types, root)
    dom = DomainModel(
        name=name,
        requirements=requirements,
        types=hierarchy,
        constants=tuple(constants),
        predicates=tuple(predicates),
        functions=tuple(functions),
        schemas=tuple(schemas),
    )
    _validate_domain(dom)
    return dom


def _parse_signature(decl, what: str) -> Signature:
    if not isinstance(decl, SList) or not decl.items:
        raise PddlSyntaxError(f"expected a {what} declaration",
                              getattr(decl, "line", 1), getattr(decl, "col", 1))
    name_tok = _as_tok(decl.items[0], f"a {what} name")
    name = _check_ident(name_tok, f"{what} name")
    params = []
    for var, typ, tok in _parse_typed_list(decl.items[1:], "parameter"):
        if not var.startswith("?"):
            raise PddlSyntaxError(f"{what} parameters must be ?variables", tok.line, tok.col)
        params.append((var, typ))
    return Signature(name, tuple(params))


def _check_hierarchy(hierarchy: TypeHierarchy, declared: set[str], root: SList) -> None:
    # Parents used without their own declaration are implicit children of the
    # root; only cycles are rejected.
    for type_name, _ in hierarchy.parents:
        seen = set()
        t = type_name
        while t is not None:
            if t in seen:
                raise PddlSemanticError(f"type hierarchy cycle through {t}", root.line, root.col)
            seen.add(t)
            t = hierarchy.parent_index.get(t)


def _parse_action(section: SList) -> ActionSchema:
    items = section.items
    if len(items) < 2:
        raise PddlSyntaxError("expected (:action NAME ...)", section.line, section.col)
    name = _check_ident(_as_tok(items[1], "an action name"), "action name")
    fields: dict[str, object] = {}
    i = 2
    while i < len(items):
        key_tok = _as_tok(items[i], "an action keyword")
        if key_tok.text not in (":parameters", ":precondition", ":effect"):
            raise UnsupportedFeatureError(key_tok.text, key_tok.line, key_tok.col)
        if i + 1 >= len(items):
            raise PddlSyntaxError(f"missing value after {key_tok.text}", key_tok.line, key_tok.col)
        fields[key_tok.text] = items[i + 1]
        i += 2

    params_form = fields.get(":parameters")
    if params_form is None:
        raise PddlSyntaxError("action is missing :parameters", section.line, section.col)
    if not isinstance(params_form, SList):
        raise PddlSyntaxError("expected a parameter list", params_form.line, params_form.col)
    params = []
    seen_vars = set()
    for var, typ, tok in _parse_typed_list(params_form.items, "parameter"):
        if not var.startswith("?"):
            raise PddlSyntaxError("parameters must be ?variables", tok.line, tok.col)
        if var in seen_vars:
            raise PddlSemanticError(f"duplicate parameter {var}", tok.line, tok.col)
        seen_vars.add(var)
        params.append((var, typ))

    pos_pre: list[Atom] = []
    neg_pre: list[Atom] = []
    numeric_pre: list[tuple[Fluent, Fraction]] = []
    equalities: list[tuple[str, str, bool]] = []
    if ":precondition" in fields:
        for literal in _conjuncts(fields[":precondition"]):
            _parse_precondition(literal, pos_pre, neg_pre, numeric_pre, equalities)

    add: list[Atom] = []
    delete: list[Atom] = []
    numeric_eff: list[tuple[Fluent, str, Fraction]] = []
    if ":effect" in fields:
        for literal in _conjuncts(fields[":effect"]):
            _parse_effect(literal, add, delete, numeric_eff)

    return ActionSchema(
        name=name,
        params=tuple(params),
        pos_pre=tuple(pos_pre),
        neg_pre=tuple(neg_pre),
        numeric_pre=tuple(numeric_pre),
        add=tuple(add),
        delete=tuple(delete),
        numeric_eff=tuple(numeric_eff),
        equalities=tuple(equalities),
    )


def _conjuncts(form) -> list[SList]:
    if not isinstance(form, SList):
        raise PddlSyntaxError("expected a condition", form.line, form.col)
    if not form.items:
        return []
    if isinstance(form.items[0], Tok) and form.items[0].text == "and":
        out = []
        for item in form.items[1:]:
            if not isinstance(item, SList):
                raise PddlSyntaxError("expected a condition", item.line, item.col)
            out.append(item)
        return out
    return [form]


_UNSUPPORTED_CONDITION_HEADS = {
    "or", "imply", "exists", "forall", "when", "oneof",
    "<", "<=", ">", "preference",
}


def _term_text(node) -> str:
    tok = _as_tok(node, "a term")
    return tok.text


def _parse_atom_template(form: SList) -> Atom:
    head_tok = _as_tok(form.items[0], "a predicate name")
    args = tuple(_term_text(item) for item in form.items[1:])
    return Atom(head_tok.text, args)


def _parse_fluent_template(node) -> Fluent:
    if not isinstance(node, SList) or not node.items:
        raise PddlSyntaxError("expected a (function ...) term",
                              getattr(node, "line", 1), getattr(node, "col", 1))
    head_tok = _as_tok(node.items[0], "a function name")
    args = tuple(_term_text(item) for item in node.items[1:])
    return Fluent(head_tok.text, args)


def _parse_precondition(form: SList, pos_pre, neg_pre, numeric_pre, equalities) -> None:
    head = _head(form)
    if head in _UNSUPPORTED_CONDITION_HEADS:
        raise UnsupportedFeatureError(head, form.line, form.col)
    if head == "not":
        if len(form.items) != 2 or not isinstance(form.items[1], SList):
            raise PddlSyntaxError("expected (not (...))", form.line, form.col)
        inner = form.items[1]
        inner_head = _head(inner)
        if inner_head in _UNSUPPORTED_CONDITION_HEADS or inner_head in ("not", "and", ">="):
            raise UnsupportedFeatureError(f"(not ({inner_head} ...))", inner.line, inner.col)
        if inner_head == "=":
            equalities.append(_parse_equality(inner, must_equal=False))
        else:
            neg_pre.append(_parse_atom_template(inner))
    elif head == "=":
        # Equality between terms; numeric (= (f) c) is outside the subset.
        if len(form.items) == 3 and isinstance(form.items[1], SList):
            raise UnsupportedFeatureError("numeric = condition", form.line, form.col)
        equalities.append(_parse_equality(form, must_equal=True))
    elif head == ">=":
        if len(form.items) != 3:
            raise PddlSyntaxError("expected (>= (function ...) constant)", form.line, form.col)
        fluent = _parse_fluent_template(form.items[1])
        constant = _parse_number(_as_tok(form.items[2], "a numeric constant"))
        numeric_pre.append((fluent, constant))
    else:
        pos_pre.append(_parse_atom_template(form))


def _parse_equality(form: SList, must_equal: bool) -> tuple[str, str, bool]:
    if len(form.items) != 3:
        raise PddlSyntaxError("expected (= term term)", form.line, form.col)
    return (_term_text(form.items[1]), _term_text(form.items[2]), must_equal)


_UNSUPPORTED_EFFECT_HEADS = {
    "when", "forall", "probabilistic", "oneof", "scale-up", "scale-down",
}


def _parse_effect(form: SList, add, delete, numeric_eff) -> None:
    head = _head(form)
    if head in _UNSUPPORTED_EFFECT_HEADS:
        raise UnsupportedFeatureError(head, form.line, form.col)
    if head == "not":
        if len(form.items) != 2 or not isinstance(form.items[1], SList):
            raise PddlSyntaxError("expected (not (...))", form.line, form.col)
        delete.append(_parse_atom_template(form.items[1]))
    elif head in ("increase", "decrease", "assign"):
        if len(form.items) != 3:
            raise PddlSyntaxError(f"expected ({head} (function ...) constant)",
                                  form.line, form.col)
        fluent = _parse_fluent_template(form.items[1])
        constant = _parse_number(_as_tok(form.items[2], "a numeric constant"))
        numeric_eff.append((fluent, head, constant))
    else:
        add.append(_parse_atom_template(form))


def _validate_domain(dom: DomainModel) -> None:
    names = set()
    for sig in dom.predicates:
        if sig.name in names:
            raise PddlSemanticError(f"duplicate predicate {sig.name}")
        names.add(sig.name)
    for sig in dom.functions:
        if sig.name in names:
            raise PddlSemanticError(f"duplicate or predicate-colliding function {sig.name}")
        names.add(sig.name)
    for sig in (*dom.predicates, *dom.functions):
        for _, typ in sig.params:
            if typ not in dom.types.names:
                raise PddlSemanticError(f"unknown type {typ} in declaration of {sig.name}")
    for obj, typ in dom.constants:
        if typ not in dom.types.names:
            raise PddlSemanticError(f"unknown type {typ} for constant {obj}")
    constant_types = dict(dom.constants)
    if len(constant_types) != len(dom.constants):
        raise PddlSemanticError("duplicate constant declaration")

    schema_names = set()
    for schema in dom.schemas:
        if schema.name in schema_names:
            raise PddlSemanticError(f"duplicate action {schema.name}")
        schema_names.add(schema.name)
        param_types = dict(schema.params)
        for _, typ in schema.params:
            if typ not in dom.types.names:
                raise PddlSemanticError(f"unknown type {typ} in action {schema.name}")

        def check_term(term: str) -> None:
            if term.startswith("?"):
                if term not in param_types:
                    raise PddlSemanticError(
                        f"variable {term} in action {schema.name} is not a parameter")
            elif term not in constant_types:
                raise PddlSemanticError(
                    f"unknown constant {term} in action {schema.name}")

        def check_atom(atom: Atom, index: dict[str, Signature], kind: str) -> None:
            sig = index.get(atom.pred)
            if sig is None:
                raise PddlSemanticError(
                    f"undeclared {kind} {atom.pred} in action {schema.name}")
            if len(atom.args) != sig.arity:
                raise PddlSemanticError(
                    f"{kind} {atom.pred} expects {sig.arity} arguments, "
                    f"got {len(atom.args)} in action {schema.name}")
            for term in atom.args:
                check_term(term)

        for atom in (*schema.pos_pre, *schema.neg_pre, *schema.add, *schema.delete):
            check_atom(atom, dom.predicate_index, "predicate")
        for fluent, _ in schema.numeric_pre:
            check_atom(fluent, dom.function_index, "function")
        for fluent, _, _ in schema.numeric_eff:
            check_atom(fluent, dom.function_index, "function")
        for a, b, _ in schema.equalities:
            check_term(a)
            check_term(b)
        if set(schema.add) & set(schema.delete):
            overlap = sorted(str(a) for a in set(schema.add) & set(schema.delete))
            raise PddlSemanticError(
                f"action {schema.name} both adds and deletes {overlap[0]}")


# ---------------------------------------------------------------------------
# Problem


def parse_problem(text: str, dom: DomainModel) -> ProblemInstance:
    """Parse and validate a problem instance against ``dom``."""
    root = _read(text)
    if _head(root) != "define":
        raise PddlSyntaxError("expected (define (problem ...) ...)", root.line, root.col)
    if len(root.items) < 2 or not isinstance(root.items[1], SList) \
            or _head(root.items[1]) != "problem":
        raise PddlSyntaxError("expected (problem NAME)", root.line, root.col)
    name_form = root.items[1]
    if len(name_form.items) != 2:
        raise PddlSyntaxError("expected (problem NAME)", name_form.line, name_form.col)
    name = _check_ident(_as_tok(name_form.items[1], "a problem name"), "problem name")

    # Collect sections first so file order never matters.
    sections: dict[str, SList] = {}
    for section in root.items[2:]:
        if not isinstance(section, SList):
            raise PddlSyntaxError("expected a (:section ...) form", section.line, section.col)
        head = _head(section)
        if head not in (":domain", ":objects", ":init", ":goal"):
            raise UnsupportedFeatureError(head, section.line, section.col)
        if head in sections:
            raise PddlSemanticError(f"duplicate {head} section", section.line, section.col)
        sections[head] = section

    if ":domain" not in sections:
        raise PddlSemanticError("problem is missing a (:domain ...) section",
                                root.line, root.col)
    if ":goal" not in sections:
        raise PddlSemanticError("problem is missing a (:goal ...) section",
                                root.line, root.col)

    section = sections[":domain"]
    if len(section.items) != 2:
        raise PddlSyntaxError("expected (:domain NAME)", section.line, section.col)
    domain_name = _as_tok(section.items[1], "a domain name").text
    if domain_name != dom.name:
        raise PddlSemanticError(f"problem targets domain {domain_name}, not {dom.name}",
                                section.line, section.col)

    constant_types = dict(dom.constants)
    objects: list[tuple[str, str]] = []
    if ":objects" in sections:
        section = sections[":objects"]
        for obj, typ, tok in _parse_typed_list(section.items[1:], "object"):
            _check_ident(tok, "object name")
            if typ not in dom.types.names:
                raise PddlSemanticError(f"unknown type {typ} for object {obj}",
                                        tok.line, tok.col)
            if obj in constant_types or any(o == obj for o, _ in objects):
                raise PddlSemanticError(f"duplicate object {obj}", tok.line, tok.col)
            objects.append((obj, typ))
    object_types = {**constant_types, **dict(objects)}

    init_atoms: set[Atom] = set()
    init_fluents: dict[Fluent, Fraction] = {}
    if ":init" in sections:
        section = sections[":init"]
        for item in section.items[1:]:
            if not isinstance(item, SList) or not item.items:
                raise PddlSyntaxError("expected an init literal",
                                      getattr(item, "line", section.line),
                                      getattr(item, "col", section.col))
            if _head(item) == "=":
                if len(item.items) != 3:
                    raise PddlSyntaxError("expected (= (function ...) constant)",
                                          item.line, item.col)
                fluent = _parse_fluent_template(item.items[1])
                _check_ground_atom(fluent, dom.function_index, object_types, dom,
                                   "function", item)
                value = _parse_number(_as_tok(item.items[2], "a numeric constant"))
                if fluent in init_fluents and init_fluents[fluent] != value:
                    raise PddlSemanticError(f"conflicting init values for {fluent}",
                                            item.line, item.col)
                init_fluents[fluent] = value
            elif _head(item) == "not":
                raise UnsupportedFeatureError("negative init literal", item.line, item.col)
            else:
                atom = _parse_atom_template(item)
                _check_ground_atom(atom, dom.predicate_index, object_types, dom,
                                   "predicate", item)
                init_atoms.add(atom)

    section = sections[":goal"]
    if len(section.items) != 2:
        raise PddlSyntaxError("expected (:goal CONDITION)", section.line, section.col)
    goal: set[Atom] = set()
    for literal in _conjuncts(section.items[1]):
        head2 = _head(literal)
        if head2 in _UNSUPPORTED_CONDITION_HEADS or head2 in ("not", "=", ">="):
            raise UnsupportedFeatureError(f"goal {head2}", literal.line, literal.col)
        atom = _parse_atom_template(literal)
        _check_ground_atom(atom, dom.predicate_index, object_types, dom,
                           "predicate", literal)
        goal.add(atom)
    return ProblemInstance(
        name=name,
        domain_name=domain_name,
        objects=tuple(objects),
        init_atoms=frozenset(init_atoms),
        init_fluents=tuple(sorted(init_fluents.items(), key=lambda kv: str(kv[0]))),
        goal=frozenset(goal),
    )


def _check_ground_atom(atom: Atom, index, object_types: dict[str, str],
                       dom: DomainModel, kind: str, node: SList) -> None:
    sig = index.get(atom.pred)
    if sig is None:
        raise PddlSemanticError(f"undeclared {kind} {atom.pred}", node.line, node.col)
    if len(atom.args) != sig.arity:
        raise PddlSemanticError(
            f"{kind} {atom.pred} expects {sig.arity} arguments, got {len(atom.args)}",
            node.line, node.col)
    for arg, (_, typ) in zip(atom.args, sig.params):
        if arg.startswith("?"):
            raise PddlSemanticError(f"variable {arg} not allowed here", node.line, node.col)
        obj_type = object_types.get(arg)
        if obj_type is None:
            raise PddlSemanticError(f"undeclared object {arg}", node.line, node.col)
        if not dom.types.is_subtype(obj_type, typ):
            raise PddlSemanticError(
                f"object {arg} of type {obj_type} does not fit parameter type {typ}",
                node.line, node.col)


# ---------------------------------------------------------------------------
# Printing (canonical re-emission; parses back to an identical model)


def _format_atom_sexp(atom: Atom) -> str:
    if not atom.args:
        return f"({atom.pred})"
    return f"({atom.pred} {' '.join(atom.args)})"


def _format_number(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return str(float(value))


def _format_typed(pairs) -> str:
    return " ".join(f"{name} - {typ}" for name, typ in pairs)


def domain_to_pddl(dom: DomainModel) -> str:
    lines = [f"(define (domain {dom.name})"]
    if dom.requirements:
        lines.append(f"  (:requirements {' '.join(dom.requirements)})")
    if dom.types.parents:
        lines.append(f"  (:types {_format_typed(dom.types.parents)})")
    if dom.constants:
        lines.append(f"  (:constants {_format_typed(dom.constants)})")
    if dom.predicates:
        decls = " ".join(
            f"({sig.name}{''.join(f' {v} - {t}' for v, t in sig.params)})"
            for sig in dom.predicates)
        lines.append(f"  (:predicates {decls})")
    if dom.functions:
        decls = " ".join(
            f"({sig.name}{''.join(f' {v} - {t}' for v, t in sig.params)})"
            for sig in dom.functions)
        lines.append(f"  (:functions {decls})")
    for schema in dom.schemas:
        lines.append(f"  (:action {schema.name}")
        lines.append(f"    :parameters ({_format_typed(schema.params)})")
        pre_parts = [_format_atom_sexp(a) for a in schema.pos_pre]
        pre_parts += [f"(not {_format_atom_sexp(a)})" for a in schema.neg_pre]
        pre_parts += [f"(= {a} {b})" if eq else f"(not (= {a} {b}))"
                      for a, b, eq in schema.equalities]
        pre_parts += [f"(>= {_format_atom_sexp(f)} {_format_number(c)})"
                      for f, c in schema.numeric_pre]
        lines.append(f"    :precondition (and {' '.join(pre_parts)})")
        eff_parts = [_format_atom_sexp(a) for a in schema.add]
        eff_parts += [f"(not {_format_atom_sexp(a)})" for a in schema.delete]
        eff_parts += [f"({op} {_format_atom_sexp(f)} {_format_number(c)})"
                      for f, op, c in schema.numeric_eff]
        lines.append(f"    :effect (and {' '.join(eff_parts)}))")
    lines.append(")")
    return "\n".join(lines) + "\n"


def problem_to_pddl(prob: ProblemInstance) -> str:
    lines = [f"(define (problem {prob.name})", f"  (:domain {prob.domain_name})"]
    if prob.objects:
        lines.append(f"  (:objects {_format_typed(prob.objects)})")
    init_parts = [_format_atom_sexp(a) for a in sorted(prob.init_atoms, key=str)]
    init_parts += [f"(= {_format_atom_sexp(f)} {_format_number(v)})"
                   for f, v in prob.init_fluents]
    lines.append(f"  (:init {' '.join(init_parts)})")
    goal_parts = " ".join(_format_atom_sexp(a) for a in sorted(prob.goal, key=str))
    lines.append(f"  (:goal (and {goal_parts})))")
    return "\n".join(lines) + "\n"
