"""Deterministic random typed-STRIPS instances for oracle-backed tests.

Instances are emitted as domain/problem text so every generated model also
exercises the parser. The generator biases toward consumable preconditions
(actions often delete one of their preconditions), which keeps plan
enumeration bounded; callers filter with ``usable_instance``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from plansight.grounding import ground
from plansight.model import State
from plansight.parser import parse_domain, parse_problem

from oracles import OracleBudgetExceeded, enumerate_minimal_plans, shortest_plan


@dataclass(frozen=True)
class Instance:
    seed: int
    domain_text: str
    problem_text: str

    def load(self):
        dom = parse_domain(self.domain_text)
        prob = parse_problem(self.problem_text, dom)
        actions = ground(dom, prob)
        init = State.make(prob.init_atoms, prob.fluent_index)
        return dom, prob, actions, init


def generate(seed: int) -> Instance:
    rng = random.Random(seed)
    n_objects = rng.randint(2, 4)
    objects = [f"o{i}" for i in range(1, n_objects + 1)]
    n_preds = rng.randint(3, 5)
    preds = [(f"p{i}", rng.choice([0, 1, 1, 2])) for i in range(n_preds)]
    n_schemas = rng.randint(2, 4)

    def atom_template(params: list[str]) -> str:
        name, arity = rng.choice(preds)
        args = [rng.choice(params) if params and rng.random() < 0.8 else rng.choice(objects)
                for _ in range(arity)]
        return f"({name}{''.join(' ' + a for a in args)})"

    schema_lines = []
    for i in range(n_schemas):
        n_params = rng.randint(0, 2)
        params = [f"?v{j}" for j in range(n_params)]
        pre = sorted({atom_template(params) for _ in range(rng.randint(1, 2))})
        add = sorted({atom_template(params) for _ in range(rng.randint(1, 2))})
        add = [a for a in add if a not in pre] or add
        # Consume a precondition most of the time so plans stay short.
        delete = [rng.choice(pre)] if rng.random() < 0.8 else []
        delete = [d for d in delete if d not in add]
        effects = add + [f"(not {d})" for d in delete]
        params_decl = " ".join(f"{p} - obj" for p in params)
        schema_lines.append(
            f"  (:action op{i}\n"
            f"    :parameters ({params_decl})\n"
            f"    :precondition (and {' '.join(pre)})\n"
            f"    :effect (and {' '.join(effects)}))")

    pred_decls = " ".join(
        f"({name}{''.join(f' ?x{j} - obj' for j in range(arity))})"
        for name, arity in preds)
    # Objects live as domain constants so schema templates may name them.
    domain_text = (
        "(define (domain rnd)\n"
        "  (:requirements :strips :typing)\n"
        "  (:types obj - object)\n"
        f"  (:constants {' '.join(objects)} - obj)\n"
        f"  (:predicates {pred_decls})\n"
        + "\n".join(schema_lines) + "\n)\n")

    all_ground_atoms = []
    for name, arity in preds:
        combos = [[]]
        for _ in range(arity):
            combos = [c + [o] for c in combos for o in objects]
        for combo in combos:
            all_ground_atoms.append(f"({name}{''.join(' ' + a for a in combo)})")
    init = sorted(a for a in all_ground_atoms if rng.random() < 0.35)
    goal_pool = [a for a in all_ground_atoms if a not in init] or all_ground_atoms
    goal = sorted(rng.sample(goal_pool, k=min(len(goal_pool), rng.randint(1, 2))))

    problem_text = (
        "(define (problem rnd-1)\n"
        "  (:domain rnd)\n"
        f"  (:init {' '.join(init)})\n"
        f"  (:goal (and {' '.join(goal)})))\n")
    return Instance(seed, domain_text, problem_text)


def usable_instance(inst: Instance, max_plan_len: int = 8,
                    max_actions: int = 14, enum_cap: int = 150_000):
    """Load and vet an instance for the exhaustive oracles: solvable within
    ``max_plan_len`` steps, small grounding, bounded plan enumeration.
    Returns (dom, prob, actions, init, goal, plans) or None."""
    dom, prob, actions, init = inst.load()
    if not actions or len(actions) > max_actions:
        return None
    try:
        plan = shortest_plan(init, prob.goal, actions, max_states=60_000)
        if plan is None or len(plan) > max_plan_len:
            return None
        plans = enumerate_minimal_plans(init, prob.goal, actions,
                                        max_plan_len, cap=enum_cap)
    except OracleBudgetExceeded:
        return None
    if not plans:
        return None
    return dom, prob, actions, init, prob.goal, plans


def solvable_instances(count: int, start_seed: int = 0,
                       max_plan_len: int = 8):
    """First ``count`` vetted instances from a deterministic seed sweep."""
    found = []
    seed = start_seed
    while len(found) < count:
        vetted = usable_instance(generate(seed), max_plan_len=max_plan_len)
        if vetted is not None:
            found.append((generate(seed), vetted))
        seed += 1
        if seed - start_seed > 4000:
            raise RuntimeError("instance generator failed to produce enough cases")
    return found


# Vetted by a seed sweep (every one passes usable_instance); the tail seeds
# were picked for minimal plans of 3+ steps so the oracles see real chains.
FROZEN_SEEDS = [
    4, 22, 61, 74, 90, 93, 104, 111, 121, 122, 153, 159, 165, 167, 179,
    193, 201, 203, 236, 241, 470, 597, 637, 657, 829, 1007, 1435, 1766, 2017,
]


@lru_cache(maxsize=1)
def frozen_instances():
    """The frozen oracle-checked corpus: (instance, vetted-tuple) pairs."""
    out = []
    for seed in FROZEN_SEEDS:
        inst = generate(seed)
        vetted = usable_instance(inst)
        assert vetted is not None, f"frozen seed {seed} no longer vets"
        out.append((inst, vetted))
    return tuple(out)
