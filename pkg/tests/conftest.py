import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from plansight import bundled
from plansight.grounding import ground
from plansight.model import State
from plansight.parser import parse_domain, parse_problem

# Two-action chain: a --op1--> b --op2--> g, init {a}, goal {g}.
CHAIN_DOMAIN = """
(define (domain chain)
  (:requirements :strips)
  (:predicates (a) (b) (g) (x))
  (:action op1 :parameters () :precondition (and (a)) :effect (and (b)))
  (:action op2 :parameters () :precondition (and (b)) :effect (and (g)))
  (:action opx :parameters () :precondition (and (a)) :effect (and (x)))
)
"""

CHAIN_PROBLEM = """
(define (problem chain-1)
  (:domain chain)
  (:init (a))
  (:goal (and (g))))
"""


@pytest.fixture(scope="session")
def firefighting_texts():
    return bundled.load_example("firefighting/scenario1")


@pytest.fixture(scope="session")
def firefighting(firefighting_texts):
    dom = parse_domain(firefighting_texts[0])
    prob = parse_problem(firefighting_texts[1], dom)
    return dom, prob


@pytest.fixture(scope="session")
def scenario1(firefighting):
    dom, prob = firefighting
    actions = ground(dom, prob)
    init = State.make(prob.init_atoms, prob.fluent_index)
    return dom, prob, actions, init


@pytest.fixture(scope="session")
def scenario2():
    domain_text, problem_text = bundled.load_example("firefighting/scenario2")
    dom = parse_domain(domain_text)
    prob = parse_problem(problem_text, dom)
    actions = ground(dom, prob)
    init = State.make(prob.init_atoms, prob.fluent_index)
    return dom, prob, actions, init


@pytest.fixture(scope="session")
def chain():
    dom = parse_domain(CHAIN_DOMAIN)
    prob = parse_problem(CHAIN_PROBLEM, dom)
    actions = ground(dom, prob)
    init = State.make(prob.init_atoms, prob.fluent_index)
    return dom, prob, actions, init
