"""Background knowledge: proximity relations and the modified consequence.

A proximity relation is a reflexive, symmetric multivalued relation on
constants or on predicate symbols (a transitive one is a similarity).  A
knowledge base couples a program with two proximity relations and a
function set assigning each head functor a kb-extended uncertainty
function.  The modified transformation derives, for every applicable rule
head p(t1..tn) with level a, the synonym atoms q(s1..sn) at level
phi_p(a, lambda_q, lambda_s1, .., lambda_sn) for every q in the proximity
set of p and every s_i in the proximity set of t_i; facts take part as
empty-body rules, so the fact base itself is proximity-expanded.

Proximity file grammar (UTF-8, `#` comments):

    proxfile  := header? section+
    header    := "%system" systag "."
    section   := "%domain" ("terms"|"predicates") "." entry*
    entry     := ident "~" ident "=" level "."

Function-set file: lines `phi ident "/" arity "=" ("meet"|"meet-product"|"product") "."`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import values as V
from .lang import (Atom, Constant, ParseError, Program, _Parser, _SYSTEM_NAMES,
                   ground, herbrand)
from .engine import (EvalOrder, FixpointReport, Interpretation, applicable,
                     _head_level, _stratum_rule_lists, _sweep_to_fixpoint,
                     order_from_directive, stratify)

PHI_MEET = "meet"
PHI_MEET_PRODUCT = "meet_product"
PHI_PRODUCT = "product"
_PHI_FILE_NAMES = {"meet": PHI_MEET, "meet-product": PHI_MEET_PRODUCT, "product": PHI_PRODUCT}


@dataclass
class ProximityRelation:
    """Symmetric map (symbol, symbol) -> value; diagonal is implicitly top."""

    domain: str                      # "terms" | "predicates"
    system: Optional[str] = None
    pairs: dict = field(default_factory=dict)   # canonical (min, max) key
    symbols: set = field(default_factory=set)

    @staticmethod
    def _key(a: str, b: str):
        return (a, b) if a <= b else (b, a)

    def set_pair(self, a: str, b: str, value) -> None:
        self.symbols.add(a)
        self.symbols.add(b)
        if a == b:
            return  # reflexive entries are implicit and fixed at top
        self.pairs[self._key(a, b)] = value

    def value_of(self, a: str, b: str, system: str):
        if a == b:
            return V.top(system)
        return self.pairs.get(self._key(a, b), V.bottom(system))


def validate_proximity(rel: ProximityRelation, system: str):
    """Stored off-diagonal values must be valid for the system; reflexivity
    is implicit (explicit non-top diagonal entries are rejected at parse
    time) and symmetry is enforced by the canonical pair key."""
    problems = []
    for (a, b), v in rel.pairs.items():
        err = V.validate_input(system, v)
        if err is not None:
            problems.append(f"proximity {a} ~ {b}: {err}")
    return problems


def is_similarity(rel: ProximityRelation, system: str) -> bool:
    """True when the relation is min-transitive over its mentioned symbols
    (absent pairs read as bottom)."""
    syms = sorted(rel.symbols)
    for x in syms:
        for y in syms:
            for z in syms:
                lhs = rel.value_of(x, z, system)
                rhs = V.meet(system, rel.value_of(x, y, system), rel.value_of(y, z, system))
                if not V.leq(system, rhs, lhs):
                    return False
    return True


def proximity_set(rel: ProximityRelation, d: str, system: str):
    """All (d_i, lambda_i) with R(d, d_i) above bottom, including (d, top)."""
    out = [(d, V.top(system))]
    for (a, b), v in rel.pairs.items():
        if V.is_bottom(system, v):
            continue
        if a == d:
            out.append((b, v))
        elif b == d:
            out.append((a, v))
    return out


@dataclass
class BackgroundKnowledge:
    term_prox: ProximityRelation
    pred_prox: ProximityRelation

    @staticmethod
    def empty() -> "BackgroundKnowledge":
        return BackgroundKnowledge(ProximityRelation("terms"), ProximityRelation("predicates"))


@dataclass
class PhiSpec:
    """Functor -> phi id; unspecified functors default to meet."""

    by_functor: dict = field(default_factory=dict)   # (name, arity) -> phi id

    def phi_for(self, pred: str, arity: int) -> str:
        return self.by_functor.get((pred, arity), PHI_MEET)


@dataclass
class KnowledgeBase:
    bk: BackgroundKnowledge
    program: Program
    phi: PhiSpec
    connector: str = "modNT"


# ----------------------------------------------------------------------
# File parsing
# ----------------------------------------------------------------------

def parse_proximity_file(text: str):
    """Parse a proximity file into (term_prox, pred_prox, declared_system)."""
    p = _Parser(text)
    system = None
    if p.at("directive", "%system"):
        p.next()
        name = p.expect("ident")
        if name.text not in _SYSTEM_NAMES:
            raise ParseError(f"unknown value system {name.text!r}", name.line, name.col)
        system = _SYSTEM_NAMES[name.text]
        p.expect("punct", ".")
    term_prox = ProximityRelation("terms", system)
    pred_prox = ProximityRelation("predicates", system)
    current = None
    while not p.at("eof"):
        if p.at("directive", "%domain"):
            p.next()
            which = p.expect("ident")
            if which.text == "terms":
                current = term_prox
            elif which.text == "predicates":
                current = pred_prox
            else:
                raise ParseError(f"%domain must be 'terms' or 'predicates', got {which.text!r}",
                                 which.line, which.col)
            p.expect("punct", ".")
            continue
        if current is None:
            p.fail("proximity entries must follow a %domain directive")
        a = p.expect("ident").text
        p.expect("punct", "~")
        b = p.expect("ident").text
        eq = p.expect("punct", "=")
        lvl = p.level()
        p.expect("punct", ".")
        if a == b and system is not None and not V.values_equal(system, lvl, V.top(system)):
            raise ParseError(f"reflexive entry {a} ~ {a} must be the top element",
                             eq.line, eq.col)
        key = ProximityRelation._key(a, b)
        if a != b and key in current.pairs:
            old = current.pairs[key]
            if not (system is None or V.values_equal(system, old, lvl)):
                raise ParseError(f"contradictory proximity entries for {a} ~ {b}", eq.line, eq.col)
            if old != lvl:
                raise ParseError(f"contradictory proximity entries for {a} ~ {b}", eq.line, eq.col)
        current.set_pair(a, b, lvl)
    return term_prox, pred_prox, system


def parse_phi_file(text: str) -> PhiSpec:
    p = _Parser(text)
    spec = PhiSpec()
    while not p.at("eof"):
        kw = p.expect("ident")
        if kw.text != "phi":
            raise ParseError(f"expected 'phi', found {kw.text!r}", kw.line, kw.col)
        name = p.expect("ident").text
        p.expect("punct", "/")
        arity = int(p.expect("num").text)
        p.expect("punct", "=")
        which = p.expect("ident")
        if which.text not in _PHI_FILE_NAMES:
            raise ParseError(f"unknown uncertainty function {which.text!r}", which.line, which.col)
        p.expect("punct", ".")
        spec.by_functor[(name, arity)] = _PHI_FILE_NAMES[which.text]
    return spec


def build_kb(program: Program, bk: Optional[BackgroundKnowledge] = None,
             phi: Optional[PhiSpec] = None) -> KnowledgeBase:
    """Assemble and validate a knowledge base around a parsed program."""
    bk = bk or BackgroundKnowledge.empty()
    phi = phi or PhiSpec()
    sys = program.system
    problems = []
    for rel in (bk.term_prox, bk.pred_prox):
        if rel.system is not None and rel.system != sys:
            problems.append(f"proximity file declares {rel.system}, program is {sys}")
        problems.extend(validate_proximity(rel, sys))
    # predicate proximity may only relate predicates of equal arity
    arities = program.predicates()
    for (a, b) in bk.pred_prox.pairs:
        if a in arities and b in arities and arities[a] != arities[b]:
            problems.append(f"predicate proximity {a} ~ {b} relates arities "
                            f"{arities[a]} and {arities[b]}")
    for (name, arity), phi_id in phi.by_functor.items():
        if phi_id == PHI_PRODUCT and sys != V.IVS:
            problems.append(f"phi {name}/{arity} = product is admissible only for ivs programs")
    if problems:
        raise ParseError("; ".join(problems))
    # drop bottom-valued proximity entries: they cannot produce stored atoms
    for rel in (bk.term_prox, bk.pred_prox):
        rel.pairs = {k: v for k, v in rel.pairs.items() if not V.is_bottom(sys, v)}
    return KnowledgeBase(bk, program, phi)


# ----------------------------------------------------------------------
# kb-extended uncertainty functions
# ----------------------------------------------------------------------

def _pair_product(a, b):
    return (a[0] * b[0], a[1] * b[1])


def phi_apply(phi_id: str, system: str, alpha, lambda_pred, lambda_args):
    """Combine a derived level with proximity degrees.

    meet takes the lattice meet of all arguments; meet_product replaces the
    argument lambdas by their pairwise product; product multiplies
    everything (interval-valued programs only).  All three are identity at
    top and monotone in every argument.
    """
    if phi_id == PHI_MEET:
        return V.meet_all(system, [alpha, lambda_pred] + list(lambda_args))
    if phi_id == PHI_MEET_PRODUCT:
        # the pairwise product's neutral element is (1, 1), which is not the
        # ifs lattice top; fold the argument lambdas only
        args = [alpha, lambda_pred]
        if lambda_args:
            prod = lambda_args[0]
            for lam in lambda_args[1:]:
                prod = lam * prod if system == V.FUZZY else _pair_product(lam, prod)
            args.append(prod)
        return V.meet_all(system, args)
    if phi_id == PHI_PRODUCT:
        if system != V.IVS:
            raise ValueError("the product uncertainty function is only valid "
                             "in the interval-valued case")
        out = _pair_product(alpha, lambda_pred)
        for lam in lambda_args:
            out = _pair_product(out, lam)
        return out
    raise ValueError(f"unknown uncertainty function {phi_id!r}")


# ----------------------------------------------------------------------
# Modified consequence transformation
# ----------------------------------------------------------------------

def mod_nt_step(kb: KnowledgeBase, interp: Interpretation, rules=None,
                diagnostics: Optional[list] = None) -> Interpretation:
    """One modified step: every applicable rule fires and its head is
    spread over the proximity sets of its predicate and arguments."""
    sys = kb.program.system
    if rules is None:
        universe = modified_universe(kb)
        rules = [g for rs in ground(kb.program, universe) for g in rs]
    out = interp.copy()
    for rule in rules:
        body = applicable(rule, interp)
        if body is None:
            continue
        alpha = _head_level(rule, body, diagnostics, sys)
        _expand_head(kb, rule.head, alpha, out)
    return out


def _expand_head(kb: KnowledgeBase, head: Atom, alpha, out: Interpretation) -> None:
    sys = kb.program.system
    phi_id = kb.phi.phi_for(head.pred, len(head.args))
    pred_options = proximity_set(kb.bk.pred_prox, head.pred, sys)
    arg_options = [proximity_set(kb.bk.term_prox, t.name, sys) for t in head.args]
    for q, lam_q in pred_options:
        _expand_args(kb, sys, phi_id, q, alpha, lam_q, arg_options, (), out)


def _expand_args(kb, sys, phi_id, q, alpha, lam_q, arg_options, chosen, out):
    if len(chosen) == len(arg_options):
        value = phi_apply(phi_id, sys, alpha, lam_q, [lam for _, lam in chosen])
        out.join_in(Atom(q, tuple(Constant(s) for s, _ in chosen)), value)
        return
    for s, lam in arg_options[len(chosen)]:
        _expand_args(kb, sys, phi_id, q, alpha, lam_q, arg_options, chosen + ((s, lam),), out)


def modified_universe(kb: KnowledgeBase):
    return set(kb.program.constants()) | set(kb.bk.term_prox.symbols)


def modified_base(kb: KnowledgeBase):
    """Herbrand base over the modified universe, including predicates that
    occur only in the background knowledge (arity inherited through the
    proximity pairs)."""
    arities = dict(kb.program.predicates())
    changed = True
    while changed:
        changed = False
        for (a, b) in kb.bk.pred_prox.pairs:
            if a in arities and b not in arities:
                arities[b] = arities[a]
                changed = True
            elif b in arities and a not in arities:
                arities[a] = arities[b]
                changed = True
    extra = [(n, a) for n, a in arities.items() if n not in kb.program.predicates()]
    return herbrand(kb.program, extra_constants=kb.bk.term_prox.symbols,
                    extra_predicates=extra)[1]


def consequence(kb: KnowledgeBase, max_iters: int = 10000,
                order: Optional[EvalOrder] = None) -> FixpointReport:
    """Least fixed point of the modified transformation: the knowledge-base
    consequence.  Facts are proximity-expanded before any proper rule can
    fire, since they are always-applicable empty-body rules in the leading
    stratum."""
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    program = kb.program
    if order is None:
        if program.order_directive:
            order = order_from_directive(program.order_directive)
        else:
            order = stratify(program)
    diagnostics = list(order.warnings)
    grounded = ground(program, modified_universe(kb))
    lists = _stratum_rule_lists(program, grounded, order)

    def step(rules, interp, diags):
        return mod_nt_step(kb, interp, rules, diags)

    interp = Interpretation(program.system)
    strata_steps = [(rules, step) for rules in lists]
    interp, iterations, converged = _sweep_to_fixpoint(strata_steps, interp,
                                                       max_iters, diagnostics)
    return FixpointReport(interp, iterations, converged, diagnostics)
