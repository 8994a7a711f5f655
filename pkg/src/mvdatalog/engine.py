"""Bottom-up evaluation: consequence transformations and fixed points.

Two step operators are provided.  The deterministic step applies every
applicable ground rule at once; the nondeterministic step applies the first
ground instance (in rule order, instances in substitution order) whose head
value strictly rises under the lattice join.  Both are inflationary: an
applicable rule is one whose body kernels are all present in the current
interpretation, and duplicate derivations of an atom merge by join.

Evaluation runs stratum by stratum to saturation and repeats the whole
sweep until a full pass changes nothing, so a converged report really is a
fixed point of the complete program.  Strata order rules so that predicates
consumed under negation are fully derived first; facts always form an
implicit leading stratum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import values as V
from . import implications as Imp
from .lang import Atom, GroundRule, Program, ground, herbrand


class Interpretation:
    """Finite map from ground atoms to truth values; absent means bottom.
    Bottom values are never stored."""

    def __init__(self, system: str, entries: Optional[dict] = None):
        self.system = system
        self.entries = dict(entries or {})

    def get(self, atom: Atom):
        return self.entries.get(atom)

    def copy(self) -> "Interpretation":
        return Interpretation(self.system, self.entries)

    def join_in(self, atom: Atom, value) -> bool:
        """Merge a derived value by lattice join; True when the entry rose."""
        if V.is_bottom(self.system, value):
            return False
        old = self.entries.get(atom)
        if old is None:
            self.entries[atom] = value
            return True
        new = V.join(self.system, old, value)
        if V.values_equal(self.system, new, old, tol=1e-12):
            return False
        self.entries[atom] = new
        return True

    def would_rise(self, atom: Atom, value) -> bool:
        """Whether join_in(atom, value) would change this interpretation."""
        if V.is_bottom(self.system, value):
            return False
        old = self.entries.get(atom)
        if old is None:
            return True
        return not V.values_equal(self.system, V.join(self.system, old, value),
                                  old, tol=1e-12)

    def leq(self, other: "Interpretation") -> bool:
        """Pointwise order: every entry is dominated in the other."""
        for atom, val in self.entries.items():
            o = other.entries.get(atom)
            if o is None:
                if not V.is_bottom(self.system, val):
                    return False
            elif not V.leq(self.system, val, o):
                return False
        return True

    def same_as(self, other: "Interpretation", tol: float = V.EPS) -> bool:
        if set(self.entries) != set(other.entries):
            return False
        return all(V.values_equal(self.system, v, other.entries[a], tol)
                   for a, v in self.entries.items())

    def sorted_items(self):
        return sorted(self.entries.items(),
                      key=lambda kv: (kv[0].pred, tuple(t.name for t in kv[0].args)))

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        inner = ", ".join(f"{a} = {V.fmt(v)}" for a, v in self.sorted_items())
        return f"{{{inner}}}"


@dataclass
class EvalOrder:
    """Ordered partition of the proper (non-fact) rules into strata.
    Indices are the 1-based textual rule numbers."""

    strata: list
    warnings: list = field(default_factory=list)


@dataclass
class FixpointReport:
    interpretation: Interpretation
    iterations: int
    converged: bool
    diagnostics: list = field(default_factory=list)


# ----------------------------------------------------------------------
# Rule application
# ----------------------------------------------------------------------

def applicable(rule: GroundRule, interp: Interpretation):
    """Body value when every literal's kernel atom is present, else None.
    Negative literals contribute the complement of the stored value; an
    empty body evaluates to top."""
    sys = interp.system
    acc = V.top(sys)
    for lit in rule.body:
        val = interp.get(lit.atom)
        if val is None:
            return None
        if lit.negated:
            val = V.negate(sys, val)
        acc = V.meet(sys, acc, val)
    return acc


def _head_level(rule: GroundRule, body_value, diagnostics: Optional[list], system: str):
    result = Imp.level_fn(rule.impl, system, body_value, rule.level)
    if not result.closure_ok and diagnostics is not None:
        note = (f"closure violation: derived level {V.fmt(result.value)} for "
                f"{rule.head} is outside the {system} lattice")
        if note not in diagnostics:
            diagnostics.append(note)
    return result.value


def dt_step(rules, interp: Interpretation, diagnostics: Optional[list] = None) -> Interpretation:
    """Parallel step: heads of all applicable rules, merged by join."""
    out = interp.copy()
    for rule in rules:
        body = applicable(rule, interp)
        if body is None:
            continue
        out.join_in(rule.head, _head_level(rule, body, diagnostics, interp.system))
    return out


def nt_step(rules, interp: Interpretation, diagnostics: Optional[list] = None) -> Interpretation:
    """Sequential step: the first rule instance that strictly increases the
    interpretation is applied; unchanged input means a (stratum) fixed point."""
    for rule in rules:
        body = applicable(rule, interp)
        if body is None:
            continue
        value = _head_level(rule, body, None, interp.system)
        if interp.would_rise(rule.head, value):
            # record diagnostics only for the productive application
            _head_level(rule, body, diagnostics, interp.system)
            out = interp.copy()
            out.join_in(rule.head, value)
            return out
    return interp


# ----------------------------------------------------------------------
# Stratification
# ----------------------------------------------------------------------

def stratify(program: Program) -> EvalOrder:
    """Evaluation order for the proper rules.

    Negation-free programs form a single stratum in textual order.  With
    negation, rules are grouped by strongly connected components of the
    produces/consumes graph and emitted in topological order (ties broken
    textually); a self-negating rule is its own stratum, and a negative
    cycle across distinct rules yields a warning with textual order inside
    the component.
    """
    proper = program.proper_rules()
    if not program.has_negation():
        return EvalOrder([[n for n, _, _ in proper]] if proper else [])

    heads = {n: r.head.pred for n, _, r in proper}
    consumes = {}          # rule -> set of predicates in its body
    neg_consumes = {}      # rule -> predicates under negation
    for n, _, r in proper:
        consumes[n] = {lit.atom.pred for lit in r.body}
        neg_consumes[n] = {lit.atom.pred for lit in r.body if lit.negated}

    nodes = [n for n, _, _ in proper]
    succs = {n: set() for n in nodes}
    for b in nodes:  # edge b -> a: a consumes what b produces
        for a in nodes:
            if a != b and heads[b] in consumes[a]:
                succs[b].add(a)

    # Tarjan SCC, iterative
    index = {}
    low = {}
    onstack = {}
    stack = []
    sccs = []
    counter = [0]

    def strongconnect(v0):
        work = [(v0, iter(sorted(succs[v0])))]
        index[v0] = low[v0] = counter[0]
        counter[0] += 1
        stack.append(v0)
        onstack[v0] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    onstack[w] = True
                    work.append((w, iter(sorted(succs[w]))))
                    advanced = True
                    break
                elif onstack.get(w):
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(sorted(comp))

    for n in nodes:
        if n not in index:
            strongconnect(n)

    comp_of = {}
    for ci, comp in enumerate(sccs):
        for n in comp:
            comp_of[n] = ci

    warnings = []
    for comp in sccs:
        if len(comp) > 1:
            cyclic_negative = any(
                heads[b] in neg_consumes[a]
                for a in comp for b in comp if a != b)
            if cyclic_negative:
                warnings.append(
                    "stratification: negative dependencies are cyclic across rules "
                    f"{comp}; using best-effort textual order")

    # Kahn over the condensation, smallest first rule wins ties
    comp_succs = {i: set() for i in range(len(sccs))}
    indeg = {i: 0 for i in range(len(sccs))}
    for b in nodes:
        for a in succs[b]:
            cb, ca = comp_of[b], comp_of[a]
            if cb != ca and ca not in comp_succs[cb]:
                comp_succs[cb].add(ca)
                indeg[ca] += 1
    ready = sorted((min(sccs[i]), i) for i in indeg if indeg[i] == 0)
    order = []
    while ready:
        _, i = ready.pop(0)
        order.append(sccs[i])
        for j in sorted(comp_succs[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append((min(sccs[j]), j))
        ready.sort()
    return EvalOrder(order, warnings)


def order_from_directive(indices) -> EvalOrder:
    """An explicit %order i,j,k. puts each listed rule in its own stratum."""
    return EvalOrder([[i] for i in indices])


# ----------------------------------------------------------------------
# Fixed points
# ----------------------------------------------------------------------

def _sweep_to_fixpoint(strata_steps, interp, max_iters, diagnostics):
    """Saturate each (rules, step) stratum in order, repeat the sweep until a
    full pass is quiet.  Returns (interp, productive_steps, converged)."""
    iterations = 0
    while True:
        changed_in_pass = False
        for rules, step_fn in strata_steps:
            while True:
                if iterations >= max_iters:
                    diagnostics.append(f"iteration limit reached ({max_iters})")
                    return interp, iterations, False
                new = step_fn(rules, interp, diagnostics)
                if new.same_as(interp, tol=1e-12):
                    break
                interp = new
                iterations += 1
                changed_in_pass = True
        if not changed_in_pass:
            return interp, iterations, True


def _stratum_rule_lists(program: Program, grounded, order: EvalOrder):
    """Ground-rule lists per stratum: facts first, then the ordered strata."""
    fact_rules = [g for pos, r in enumerate(program.rules) if r.is_fact for g in grounded[pos]]
    pos_of = {n: pos for n, pos, _ in program.proper_rules()}
    lists = [fact_rules]
    for stratum in order.strata:
        rules = []
        for n in stratum:
            rules.extend(grounded[pos_of[n]])
        lists.append(rules)
    return lists


def fixpoint(program: Program, mode: str = "nondet", order: Optional[EvalOrder] = None,
             max_iters: int = 10000) -> FixpointReport:
    """Least fixed point of the program's consequence transformation.

    mode="det" iterates the parallel step, mode="nondet" the one-rule-at-a-
    time step.  A user order (the %order directive) overrides stratify().
    """
    if mode not in ("det", "nondet"):
        raise ValueError(f"mode must be 'det' or 'nondet', got {mode!r}")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if order is None:
        if program.order_directive:
            order = order_from_directive(program.order_directive)
        else:
            order = stratify(program)
    diagnostics = list(order.warnings)
    universe, _ = herbrand(program)
    grounded = ground(program, universe)
    lists = _stratum_rule_lists(program, grounded, order)
    step_fn = dt_step if mode == "det" else nt_step
    # the fact base has no bodies to race on; both modes load it in one
    # parallel step
    strata_steps = [(lists[0], dt_step)] + [(rules, step_fn) for rules in lists[1:]]
    interp = Interpretation(program.system)
    interp, iterations, converged = _sweep_to_fixpoint(strata_steps, interp,
                                                       max_iters, diagnostics)
    return FixpointReport(interp, iterations, converged, diagnostics)


# ----------------------------------------------------------------------
# Model check
# ----------------------------------------------------------------------

def is_model(program: Program, interp: Interpretation, extra_constants=()):
    """Violated ground rules, as human-readable strings; empty means model.

    A ground rule checks I(alpha_body, alpha_head) >= beta in the lattice
    order whenever all its body kernels are present; rules with a missing
    kernel hold vacuously.
    """
    sys = program.system
    universe = set(program.constants()) | set(extra_constants)
    for atom in interp.entries:
        for t in atom.args:
            universe.add(t.name)
    violations = []
    for rules in ground(program, universe):
        for g in rules:
            body = applicable(g, interp)
            if body is None:
                continue
            head_val = interp.get(g.head)
            if head_val is None:
                head_val = V.bottom(sys)
            lhs = Imp.apply_implication(g.impl, sys, body, head_val)
            if not V.leq(sys, g.level, lhs):
                violations.append(
                    f"rule instance {g.head} <- {', '.join(str(b) for b in g.body) or 'true'}: "
                    f"I({V.fmt(body)}, {V.fmt(head_val)}) = {V.fmt(lhs)} "
                    f"is below the rule level {V.fmt(g.level)}")
    return violations
