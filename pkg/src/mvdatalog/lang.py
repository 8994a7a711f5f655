"""Abstract syntax, concrete syntax, safety, Herbrand construction, grounding.

Program files are UTF-8 with `#` line comments:

    program   := header directive* clause*
    header    := "%system" ("fuzzy"|"ifs"|"ivs"|"bipolar-a"|"bipolar-b") "."
    directive := "%order" int ("," int)* "."          # 1-based rule indices
               | "%const" ident ("," ident)* "."      # uppercase constants
    clause    := fact | rule
    fact      := "fact" atom "=" level "."
    rule      := "rule" atom "<-" literal ("," literal)* ":" impl "," level "."
    literal   := ["not"] atom
    atom      := ident "(" term ("," term)* ")" | ident
    level     := number | "(" number "," number ")"
    impl      := ident | "(" ident "," ident ")"      # pair form only for bipolar

Identifiers starting with an uppercase letter are variables unless declared
with %const; everything else is a constant or predicate symbol.  Numbers are
read to at most nine decimal places and quantized there, so printing and
reparsing a program reproduces it exactly.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from . import values as V
from . import implications as Imp


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        if line:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)


class SafetyError(ParseError):
    """A rule violates the safety conditions (strict mode)."""


# ----------------------------------------------------------------------
# Terms, atoms, literals, rules
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class ProximityRef:
    """Stands for the proximity set of a constant; query-phase only."""

    name: str

    def __str__(self):
        return f"~{self.name}"


Term = Union[Variable, Constant, ProximityRef]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({', '.join(str(a) for a in self.args)})"

    @property
    def functor(self):
        return (self.pred, len(self.args))

    def is_ground(self) -> bool:
        return all(isinstance(a, Constant) for a in self.args)

    def variables(self):
        return [a for a in self.args if isinstance(a, Variable)]


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __str__(self):
        return f"not {self.atom}" if self.negated else str(self.atom)


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple = ()
    impl: object = "godel"
    level: object = 1.0
    line: int = field(default=0, compare=False)

    @property
    def is_fact(self) -> bool:
        return len(self.body) == 0

    def variables(self):
        seen = []
        for atom in [self.head] + [lit.atom for lit in self.body]:
            for v in atom.variables():
                if v not in seen:
                    seen.append(v)
        return seen


@dataclass
class Program:
    system: str
    rules: list
    declared_constants: frozenset = frozenset()
    order_directive: Optional[list] = None
    warnings: list = field(default_factory=list)

    def facts(self):
        """The empty-body rules, viewed as (atom, level) pairs."""
        return [(r.head, r.level) for r in self.rules if r.is_fact]

    def proper_rules(self):
        """Non-fact rules with their 1-based textual numbering."""
        out = []
        n = 0
        for pos, r in enumerate(self.rules):
            if not r.is_fact:
                n += 1
                out.append((n, pos, r))
        return out

    def predicates(self):
        """Map functor name -> arity over all rule heads and bodies."""
        arity = {}
        for r in self.rules:
            for atom in [r.head] + [lit.atom for lit in r.body]:
                arity[atom.pred] = len(atom.args)
        return arity

    def constants(self):
        out = set()
        for r in self.rules:
            for atom in [r.head] + [lit.atom for lit in r.body]:
                for t in atom.args:
                    if isinstance(t, Constant):
                        out.add(t.name)
        return out

    def has_negation(self) -> bool:
        return any(lit.negated for r in self.rules for lit in r.body)


# ----------------------------------------------------------------------
# Safety
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SafetyReport:
    unsafe_head_vars: tuple
    unsafe_negative_vars: tuple

    @property
    def ok(self) -> bool:
        return not self.unsafe_head_vars and not self.unsafe_negative_vars


def check_safety(rule: Rule) -> SafetyReport:
    """Head variables must occur in the body; negative-literal variables must
    occur in some positive literal."""
    body_vars = set()
    positive_vars = set()
    for lit in rule.body:
        for v in lit.atom.variables():
            body_vars.add(v)
            if not lit.negated:
                positive_vars.add(v)
    bad_head = tuple(sorted({v.name for v in rule.head.variables() if v not in body_vars}))
    bad_neg = set()
    for lit in rule.body:
        if lit.negated:
            for v in lit.atom.variables():
                if v not in positive_vars:
                    bad_neg.add(v.name)
    return SafetyReport(bad_head, tuple(sorted(bad_neg)))


# ----------------------------------------------------------------------
# Tokenizer / parser
# ----------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow><-)
  | (?P<num>\d+\.\d+|\d+|\.\d+)
  | (?P<directive>%[A-Za-z][A-Za-z0-9_-]*)
  | (?P<ident>[A-Za-z][A-Za-z0-9_-]*)
  | (?P<punct>[(),=.:~/])
    """,
    re.VERBOSE,
)

_SYSTEM_NAMES = {
    "fuzzy": V.FUZZY,
    "ifs": V.IFS,
    "ivs": V.IVS,
    "bipolar-a": V.BIPOLAR_A,
    "bipolar-b": V.BIPOLAR_B,
}
_SYSTEM_FILE_NAMES = {v: k for k, v in _SYSTEM_NAMES.items()}


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str):
    tokens = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, tok, line, m.start() - line_start + 1))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + tok.rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, declared_constants: Iterable[str] = ()):
        self.tokens = _tokenize(text)
        self.i = 0
        self.declared = set(declared_constants)

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, message: str):
        t = self.peek()
        raise ParseError(message, t.line, t.col)

    def expect(self, kind: str, text: Optional[str] = None) -> _Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            self.fail(f"expected {want!r}, found {t.text!r}" if t.text else f"expected {want!r}, found end of input")
        return self.next()

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    # --- shared small pieces ---

    def number(self) -> float:
        t = self.expect("num")
        if "." in t.text and len(t.text.split(".", 1)[1]) > 9:
            raise ParseError("numbers carry at most 9 decimal places", t.line, t.col)
        return round(float(t.text), 9)

    def level(self):
        if self.at("punct", "("):
            self.next()
            m1 = self.number()
            self.expect("punct", ",")
            m2 = self.number()
            self.expect("punct", ")")
            return (m1, m2)
        return self.number()

    def term(self) -> Term:
        t = self.expect("ident")
        if t.text in self.declared:
            return Constant(t.text)
        if t.text[0].isupper():
            return Variable(t.text)
        return Constant(t.text)

    def atom(self) -> Atom:
        t = self.expect("ident")
        pred = t.text
        args = ()
        if self.at("punct", "("):
            self.next()
            items = [self.term()]
            while self.at("punct", ","):
                self.next()
                items.append(self.term())
            self.expect("punct", ")")
            args = tuple(items)
        return Atom(pred, args)


def _default_impl(system: str):
    """Facts carry no operator in the syntax; the choice is invisible because
    every implemented level function maps (top, beta) to beta."""
    if system == V.FUZZY:
        return "godel"
    if system == V.IFS:
        return "fg2"
    if system == V.IVS:
        return "vg2"
    return ("godel", "godel")


def parse_program(text: str, safety: str = "strict") -> Program:
    """Parse a program file.

    safety="strict" rejects rules whose negative-literal variables lack a
    positive occurrence; safety="paper-examples" downgrades that to a
    warning, so self-negating rules like q(X, Y) <- not q(Y, X) still load.
    Unbound head variables are an error in both modes.
    """
    if safety not in ("strict", "paper-examples"):
        raise ValueError(f"unknown safety mode {safety!r}")
    p = _Parser(text)

    tok = p.expect("directive")
    if tok.text != "%system":
        raise ParseError("program must start with a %system header", tok.line, tok.col)
    name = p.expect("ident")
    sysname = name.text
    if sysname not in _SYSTEM_NAMES:
        raise ParseError(f"unknown value system {sysname!r}", name.line, name.col)
    system = _SYSTEM_NAMES[sysname]
    p.expect("punct", ".")

    rules = []
    order = None
    warnings = []
    arities = {}

    def note_arity(atom: Atom, tok_: _Token):
        old = arities.get(atom.pred)
        if old is not None and old != len(atom.args):
            raise ParseError(
                f"predicate {atom.pred!r} used with arity {len(atom.args)} but earlier with {old}",
                tok_.line, tok_.col)
        arities[atom.pred] = len(atom.args)

    while not p.at("eof"):
        t = p.peek()
        if t.kind == "directive" and t.text == "%const":
            p.next()
            while True:
                c = p.expect("ident")
                p.declared.add(c.text)
                if not p.at("punct", ","):
                    break
                p.next()
            p.expect("punct", ".")
            continue
        if t.kind == "directive" and t.text == "%order":
            p.next()
            order = [int(p.expect("num").text)]
            while p.at("punct", ","):
                p.next()
                order.append(int(p.expect("num").text))
            p.expect("punct", ".")
            continue
        if t.kind == "ident" and t.text == "fact":
            p.next()
            head_tok = p.peek()
            head = p.atom()
            note_arity(head, head_tok)
            p.expect("punct", "=")
            lvl = p.level()
            p.expect("punct", ".")
            _check_level(system, lvl, head_tok)
            if head.variables():
                raise ParseError(f"fact {head} is not ground", head_tok.line, head_tok.col)
            rules.append(Rule(head, (), _default_impl(system), lvl, head_tok.line))
            continue
        if t.kind == "ident" and t.text == "rule":
            p.next()
            head_tok = p.peek()
            head = p.atom()
            note_arity(head, head_tok)
            p.expect("arrow")
            body = []
            while True:
                negated = False
                if p.at("ident", "not"):
                    p.next()
                    negated = True
                atom_tok = p.peek()
                a = p.atom()
                note_arity(a, atom_tok)
                body.append(Literal(a, negated))
                if p.at("punct", ","):
                    p.next()
                    continue
                break
            p.expect("punct", ":")
            impl = _parse_impl(p, system)
            p.expect("punct", ",")
            lvl = p.level()
            p.expect("punct", ".")
            _check_level(system, lvl, head_tok)
            rule = Rule(head, tuple(body), impl, lvl, head_tok.line)
            report = check_safety(rule)
            if report.unsafe_head_vars:
                raise SafetyError(
                    f"unsafe rule: head variable(s) {', '.join(report.unsafe_head_vars)} "
                    f"do not occur in the body", head_tok.line, head_tok.col)
            if report.unsafe_negative_vars:
                msg = (f"rule at line {head_tok.line}: variable(s) "
                       f"{', '.join(report.unsafe_negative_vars)} occur only under negation")
                if safety == "strict":
                    raise SafetyError("unsafe rule: " + msg.split(": ", 1)[1],
                                      head_tok.line, head_tok.col)
                warnings.append("safety: " + msg)
            rules.append(rule)
            continue
        p.fail(f"expected 'fact', 'rule' or a directive, found {t.text!r}")

    prog = Program(system, rules, frozenset(p.declared), order, warnings)
    if order is not None:
        n = len(prog.proper_rules())
        if sorted(order) != list(range(1, n + 1)):
            raise ParseError(f"%order must be a permutation of 1..{n}, got {order}")
    return prog


def _parse_impl(p: _Parser, system: str):
    if p.at("punct", "("):
        tok = p.next()
        a = p.expect("ident").text
        p.expect("punct", ",")
        b = p.expect("ident").text
        p.expect("punct", ")")
        impl = (a, b)
        if not Imp.is_compatible(impl, system):
            raise ParseError(f"implication pair ({a}, {b}) is not valid for the {system} system",
                             tok.line, tok.col)
        return impl
    tok = p.expect("ident")
    impl = tok.text
    if not Imp.is_compatible(impl, system):
        raise ParseError(f"implication {impl!r} is not valid for the {system} system",
                         tok.line, tok.col)
    return impl


def _check_level(system: str, lvl, tok: _Token):
    err = V.validate_input(system, lvl)
    if err is not None:
        raise ParseError(f"invalid level: {err}", tok.line, tok.col)
    if V.is_bottom(system, lvl):
        raise ParseError(f"level {V.fmt(lvl)} must be above the bottom element", tok.line, tok.col)


# ----------------------------------------------------------------------
# Printing (round-trips through parse_program)
# ----------------------------------------------------------------------

def print_program(program: Program) -> str:
    lines = [f"%system {_SYSTEM_FILE_NAMES[program.system]}."]
    consts = sorted(program.declared_constants)
    if consts:
        lines.append(f"%const {', '.join(consts)}.")
    if program.order_directive:
        lines.append(f"%order {','.join(str(i) for i in program.order_directive)}.")
    for r in program.rules:
        if r.is_fact:
            lines.append(f"fact {r.head} = {V.fmt(r.level)}.")
        else:
            body = ", ".join(str(lit) for lit in r.body)
            impl = f"({r.impl[0]}, {r.impl[1]})" if isinstance(r.impl, tuple) else r.impl
            lines.append(f"rule {r.head} <- {body} : {impl}, {V.fmt(r.level)}.")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# Herbrand universe / base and grounding
# ----------------------------------------------------------------------

def herbrand(program: Program, extra_constants: Iterable[str] = (),
             extra_predicates: Iterable = ()):
    """Universe and base, optionally extended with background-knowledge
    constants and predicates (extra_predicates: iterable of (name, arity))."""
    universe = set(program.constants()) | set(extra_constants)
    preds = dict(program.predicates())
    for name, arity in extra_predicates:
        if name in preds and preds[name] != arity:
            raise ValueError(f"predicate {name!r} arity conflict: {preds[name]} vs {arity}")
        preds[name] = arity
    consts = sorted(universe)
    base = set()
    for name, arity in preds.items():
        if arity == 0:
            base.add(Atom(name))
            continue
        for combo in itertools.product(consts, repeat=arity):
            base.add(Atom(name, tuple(Constant(c) for c in combo)))
    return universe, base


@dataclass(frozen=True)
class GroundRule:
    head: Atom
    body: tuple  # Literals, ground
    impl: object
    level: object
    rule_pos: int  # index into Program.rules


def substitute(atom: Atom, theta: dict) -> Atom:
    return Atom(atom.pred, tuple(theta.get(t, t) if isinstance(t, Variable) else t
                                 for t in atom.args))


def ground_rule(rule: Rule, universe, rule_pos: int = 0):
    """All ground instances, ordered lexicographically by substitution (the
    rule's variables in first-occurrence order, constants sorted by name)."""
    variables = rule.variables()
    if not variables:
        return [GroundRule(rule.head, rule.body, rule.impl, rule.level, rule_pos)]
    consts = [Constant(c) for c in sorted(universe)]
    if not consts:
        return []
    out = []
    for combo in itertools.product(consts, repeat=len(variables)):
        theta = dict(zip(variables, combo))
        head = substitute(rule.head, theta)
        body = tuple(Literal(substitute(l.atom, theta), l.negated) for l in rule.body)
        out.append(GroundRule(head, body, rule.impl, rule.level, rule_pos))
    return out


def ground(program: Program, universe=None):
    """Ground instances per rule, in rule order."""
    if universe is None:
        universe = program.constants()
    return [ground_rule(r, universe, pos) for pos, r in enumerate(program.rules)]


# ----------------------------------------------------------------------
# Unification (function-free; proximity references act like constants,
# except that a constant unifies with its own proximity set)
# ----------------------------------------------------------------------

def _walk(t: Term, theta: dict) -> Term:
    while isinstance(t, Variable) and t in theta:
        t = theta[t]
    return t


def _terms_unify(a: Term, b: Term, theta: dict) -> bool:
    a = _walk(a, theta)
    b = _walk(b, theta)
    if a == b:
        return True
    if isinstance(a, Variable):
        theta[a] = b
        return True
    if isinstance(b, Variable):
        theta[b] = a
        return True
    if isinstance(a, Constant) and isinstance(b, ProximityRef):
        return a.name == b.name
    if isinstance(a, ProximityRef) and isinstance(b, Constant):
        return a.name == b.name
    return False


def unify(a: Atom, b: Atom) -> Optional[dict]:
    """Most general unifier of two atoms, or None."""
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    theta: dict = {}
    for ta, tb in zip(a.args, b.args):
        if not _terms_unify(ta, tb, theta):
            return None
    # resolve chains so the substitution applies in one pass
    return {v: _walk(t, theta) for v, t in theta.items()}


def rename_apart(rule: Rule, suffix: str) -> Rule:
    theta = {v: Variable(f"{v.name}_{suffix}") for v in rule.variables()}
    head = substitute(rule.head, theta)
    body = tuple(Literal(substitute(l.atom, theta), l.negated) for l in rule.body)
    return Rule(head, body, rule.impl, rule.level, rule.line)
