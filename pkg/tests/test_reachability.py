"""Execution semantics and relaxed-planning-graph tests, oracle-checked."""

from fractions import Fraction

import pytest

from plansight.errors import (
    NegativeResourceError,
    NotApplicableError,
    TargetInitiallyTrueError,
    TargetUnreachableError,
)
from plansight.model import Atom, State
from plansight.parser import parse_domain, parse_problem
from plansight.grounding import ground
from plansight.reachability import (
    APPLICABLE,
    BLOCKED_PROPOSITIONAL,
    BLOCKED_RESOURCE,
    applicable,
    apply_action,
    build_rpg,
    first_achievers,
)

from instance_gen import generate
from oracles import fact_depths

FIRE_OUT = Atom.parse("fire-out")


def _action(actions, action_id):
    return {a.id: a for a in actions}[action_id]


def test_dispatch_blocked_on_resources(scenario1):
    _, _, actions, init = scenario1
    cls = applicable(init, _action(actions, "dispatch-big-engines(station1)"))
    assert cls.status == BLOCKED_RESOURCE
    assert cls.failed_numeric == (
        (Atom.parse("available-big"), Fraction(2), Fraction(1)),)


def test_empty_preconditions_always_applicable():
    dom = parse_domain(
        "(define (domain d) (:predicates (p))"
        " (:action a :parameters () :effect (and (p))))")
    prob = parse_problem(
        "(define (problem x) (:domain d) (:init) (:goal (and (p))))", dom)
    action = ground(dom, prob)[0]
    assert applicable(State.make([]), action).status == APPLICABLE
    assert applicable(State.make([Atom.parse("p")]), action).status == APPLICABLE


def test_propositional_blocking_dominates(scenario2):
    _, _, actions, init = scenario2
    # extinguish-small-fire(big) needs small-fire (absent) — grounded fresh
    # since scenario2's catalog prunes it away statically.
    dom = parse_domain(
        "(define (domain d) (:predicates (p)) (:functions (f))"
        " (:action a :parameters ()"
        "  :precondition (and (p) (>= (f) 5)) :effect (and)))")
    prob = parse_problem(
        "(define (problem x) (:domain d) (:init (p) (= (f) 5))"
        " (:goal (and (p))))", dom)
    action = ground(dom, prob)[0]
    state = State.make([], {Atom.parse("f"): Fraction(1)})  # p missing AND f short
    cls = applicable(state, action)
    assert cls.status == BLOCKED_PROPOSITIONAL
    assert cls.missing_atoms == (Atom.parse("p"),)
    assert cls.failed_numeric  # still reported for diagnostics


def test_apply_dispatch_arithmetic(scenario1):
    _, _, actions, init = scenario1
    state = init.replace(fluents={**init.fluent_map,
                                  Atom.parse("available-big"): Fraction(3)})
    nxt = apply_action(state, _action(actions, "dispatch-big-engines(station1)"))
    assert nxt.value(Atom.parse("available-big")) == 1
    assert Atom.parse("engines-on-scene(big)") in nxt.atoms


def test_apply_no_effects_identity():
    dom = parse_domain(
        "(define (domain d) (:predicates (p))"
        " (:action a :parameters () :precondition (and (p)) :effect (and)))")
    prob = parse_problem(
        "(define (problem x) (:domain d) (:init (p)) (:goal (and (p))))", dom)
    action = ground(dom, prob)[0]
    state = State.make([Atom.parse("p")], {Atom.parse("zzz"): Fraction(1)})
    assert apply_action(state, action) == state


def test_apply_increase():
    dom = parse_domain(
        "(define (domain d) (:predicates (p)) (:functions (f))"
        " (:action a :parameters () :effect (and (increase (f) 2))))")
    prob = parse_problem(
        "(define (problem x) (:domain d) (:init (= (f) 1)) (:goal (and (p))))",
        dom)
    action = ground(dom, prob)[0]
    state = State.make([], {Atom.parse("f"): Fraction(1)})
    assert apply_action(state, action).value(Atom.parse("f")) == 3


def test_apply_raises_not_applicable(scenario1):
    _, _, actions, init = scenario1
    with pytest.raises(NotApplicableError) as err:
        apply_action(init, _action(actions, "dispatch-big-engines(station1)"))
    assert err.value.classification.status == BLOCKED_RESOURCE


def test_unguarded_decrease_raises_negative_resource():
    dom = parse_domain(
        "(define (domain d) (:predicates (p)) (:functions (f))"
        " (:action a :parameters () :effect (and (decrease (f) 2))))")
    prob = parse_problem(
        "(define (problem x) (:domain d) (:init (= (f) 1)) (:goal (and (p))))",
        dom)
    action = ground(dom, prob)[0]
    with pytest.raises(NegativeResourceError):
        apply_action(State.make([], {Atom.parse("f"): Fraction(1)}), action)


def test_rpg_chain_levels(chain):
    _, _, actions, init = chain
    rpg = build_rpg(init, actions)
    assert rpg.level(Atom.parse("g")) == 2
    assert rpg.action_level["op2"] == 1
    assert rpg.level(Atom.parse("a")) == 0


def test_rpg_unreachable_fact():
    dom = parse_domain(
        "(define (domain d) (:predicates (p) (q))"
        " (:action a :parameters () :precondition (and (p)) :effect (and (p))))")
    prob = parse_problem(
        "(define (problem x) (:domain d) (:init) (:goal (and (q))))", dom)
    actions = ground(dom, prob)
    rpg = build_rpg(State.make([]), actions)
    assert rpg.level(Atom.parse("q")) is None


def test_rpg_resource_policies(scenario1):
    _, _, actions, init = scenario1
    ignore = build_rpg(init, actions, "ignore-numeric")
    assert ignore.level(FIRE_OUT) is not None
    enforce = build_rpg(init, actions, "enforce-numeric-static")
    assert enforce.level(FIRE_OUT) is None  # 1 big + 1 small engine: both short


def test_rpg_enforce_numeric_sees_reachable_increases():
    dom = parse_domain(
        "(define (domain d) (:predicates (p)) (:functions (f))"
        " (:action pump :parameters () :effect (and (increase (f) 1)))"
        " (:action fire :parameters ()"
        "  :precondition (and (>= (f) 10)) :effect (and (p))))")
    prob = parse_problem(
        "(define (problem x) (:domain d) (:init (= (f) 0)) (:goal (and (p))))",
        dom)
    actions = ground(dom, prob)
    init = State.make([], {Atom.parse("f"): Fraction(0)})
    enforce = build_rpg(init, actions, "enforce-numeric-static")
    assert enforce.level(Atom.parse("p")) is not None  # pump is repeatable


def test_first_achievers_bundled(scenario1):
    _, _, actions, init = scenario1
    rpg = build_rpg(init, actions)
    achievers = first_achievers(rpg, FIRE_OUT)
    assert [a.id for a in achievers] == [
        "extinguish-small-fire(big)", "extinguish-small-fire(small)"]


def test_first_achievers_chain(chain):
    _, _, actions, init = chain
    rpg = build_rpg(init, actions)
    assert [a.id for a in first_achievers(rpg, Atom.parse("g"))] == ["op2"]
    with pytest.raises(TargetInitiallyTrueError):
        first_achievers(rpg, Atom.parse("a"))
    with pytest.raises(TargetUnreachableError):
        first_achievers(rpg, Atom.parse("nope"))


def test_rpg_fixpoint_and_determinism(scenario1):
    _, _, actions, init = scenario1
    one = build_rpg(init, actions)
    two = build_rpg(init, actions)
    assert one.fact_level == two.fact_level
    assert one.action_level == two.action_level
    assert one.levels == two.levels
    # Every fact level is within the built layers; action level invariant.
    for action_id, level in one.action_level.items():
        action = one.actions_by_id[action_id]
        pre_levels = [one.fact_level[p] for p in action.pre]
        assert level == max(pre_levels, default=0)
    assert all(0 <= l <= one.levels for l in one.fact_level.values())


@pytest.mark.parametrize("seed", [4, 22, 61, 90, 121, 153, 203, 236])
def test_rpg_sound_and_admissible_vs_oracle(seed):
    inst = generate(seed)
    dom = parse_domain(inst.domain_text)
    prob = parse_problem(inst.problem_text, dom)
    actions = ground(dom, prob)
    init = State.make(prob.init_atoms, prob.fluent_index)
    truth = fact_depths(init, actions)
    rpg = build_rpg(init, actions, "ignore-numeric")
    for atom, depth in truth.items():
        level = rpg.level(atom)
        assert level is not None, f"{atom} reachable at depth {depth} but level inf"
        assert level <= depth
