"""Seeded generators for the randomized property suites."""

import random

from mvdatalog import values as V
from mvdatalog.lang import (Atom, Constant, Literal, Program, Rule, Variable,
                            _default_impl)
from mvdatalog.kb import BackgroundKnowledge, PhiSpec, ProximityRelation

CONSTS = ["a", "b", "c", "d", "e", "f"]
PRED_POOL = [("p", 1), ("q", 1), ("r", 2), ("s", 2)]
VARS = [Variable("X"), Variable("Y"), Variable("Z")]

# recursion through these level functions walks a finite value set, so the
# generated programs always reach their fixed point (fl/vl are excluded:
# their level functions are not contractions, so recursive rules can walk
# through unboundedly many levels)
OPS = {
    V.FUZZY: ["godel", "lukasiewicz", "kleene"],
    V.IFS: ["fg2", "fg1", "fk"],
    V.IVS: ["vg2", "vg1", "vk"],
}
FUZZY_OPS = ["godel", "lukasiewicz", "kleene"]


def random_level(rng: random.Random, system: str):
    if system == V.FUZZY:
        return round(rng.uniform(0.05, 1.0), 2)
    if system == V.IVS:
        m1 = round(rng.uniform(0.0, 1.0), 2)
        m2 = round(rng.uniform(m1, 1.0), 2)
        if m1 == 0.0 and m2 == 0.0:
            m2 = 0.05
        return (m1, m2)
    m1 = round(rng.uniform(0.0, 1.0), 2)
    m2 = round(rng.uniform(0.0, 1.0 - m1), 2)
    if m1 == 0.0 and m2 == 1.0:
        m2 = 0.95
    return (m1, m2)


def random_impl(rng: random.Random, system: str):
    if system in (V.BIPOLAR_A, V.BIPOLAR_B):
        return (rng.choice(FUZZY_OPS), rng.choice(FUZZY_OPS))
    return rng.choice(OPS[system])


def random_program(rng: random.Random, system: str, allow_negation: bool = False) -> Program:
    # kept small on purpose: at most 4 predicates, 6 constants, 8 rules
    consts = rng.sample(CONSTS, rng.randint(2, 4))
    preds = rng.sample(PRED_POOL, rng.randint(2, 4))
    rules = []
    for _ in range(rng.randint(2, 4)):
        pred, arity = rng.choice(preds)
        args = tuple(Constant(rng.choice(consts)) for _ in range(arity))
        rules.append(Rule(Atom(pred, args), (), _default_impl(system),
                          random_level(rng, system)))
    for _ in range(rng.randint(1, 4)):
        rules.append(_random_rule(rng, preds, system, allow_negation))
    return Program(system, rules)


def _random_rule(rng: random.Random, preds, system: str, allow_negation: bool) -> Rule:
    # first body literal is positive and carries all the rule's variables,
    # which keeps every generated rule safe by construction
    bp, bar = rng.choice(preds)
    body_vars = VARS[:max(1, bar)]
    first = Literal(Atom(bp, tuple(body_vars[i % len(body_vars)] for i in range(bar))))
    body = [first]
    if rng.random() < 0.6:
        bp2, bar2 = rng.choice(preds)
        atom2 = Atom(bp2, tuple(rng.choice(body_vars) for _ in range(bar2)))
        negated = allow_negation and rng.random() < 0.4
        body.append(Literal(atom2, negated))
    hp, har = rng.choice(preds)
    head = Atom(hp, tuple(rng.choice(body_vars) for _ in range(har)))
    return Rule(head, tuple(body), random_impl(rng, system), random_level(rng, system))


def random_bk(rng: random.Random, program: Program) -> BackgroundKnowledge:
    system = program.system
    term_prox = ProximityRelation("terms", system)
    consts = sorted(program.constants() | {"z"})
    for _ in range(rng.randint(0, 3)):
        a, b = rng.sample(consts, 2)
        term_prox.set_pair(a, b, random_level(rng, system))
    pred_prox = ProximityRelation("predicates", system)
    arities = program.predicates()
    same_arity = {}
    for name, ar in arities.items():
        same_arity.setdefault(ar, []).append(name)
    for names in same_arity.values():
        extra = names + [names[0] + "x"]  # one synonym outside the program
        for _ in range(rng.randint(0, 2)):
            a, b = rng.sample(extra, 2)
            pred_prox.set_pair(a, b, random_level(rng, system))
    return BackgroundKnowledge(term_prox, pred_prox)


def random_phi(rng: random.Random, program: Program) -> PhiSpec:
    choices = ["meet", "meet_product"]
    if program.system == V.IVS:
        choices.append("product")
    spec = PhiSpec()
    for name, ar in program.predicates().items():
        if rng.random() < 0.7:
            spec.by_functor[(name, ar)] = rng.choice(choices)
    return spec


def grid(step: float = 0.05):
    n = int(round(1.0 / step))
    return [round(i * step, 10) for i in range(n + 1)]


def valid_pairs(system: str, step: float = 0.05):
    pts = grid(step)
    return [(a, b) for a in pts for b in pts if V.validate(system, (a, b)) is None]
