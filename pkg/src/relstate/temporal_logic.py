"""Many-valued temporal logic over dated experience propositions.

Atoms ``E(n, t)`` say "the observer's experience at time ``t`` is
``eta_n``".  Conjunctions of atoms at distinct times are histories;
general propositions are disjunctions of histories.  Relative to a
perspective ``(N, t0, record)``:

* past and present atoms (``t <= t0``) are read off the memory record and
  are either true or false;
* future atoms get truth values in ``[0, 1]`` from the chain (class
  operator) weight of the history they belong to;
* a disjunction is evaluated after refining it into pairwise disjoint
  histories, and its value is the sum of theirs;
* a top-level negation is ``1 - value``.

Negations nested under ``&``/``|`` are expanded over the experience basis,
``!E(n, t) = |_{m != n} E(m, t)``, so the whole formula stays a disjunction
of histories.

Text syntax::

    prop   := or
    or     := and ('|' and)*
    and    := unary ('&' unary)*
    unary  := '!' unary | atom | '(' prop ')'
    atom   := 'E' '(' int ',' decimal ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation, EmptyPerspective, ParseError, RecordGap, TooManyDisjuncts
from .future_truth import Perspective, chain_value
from .hilbert import PRUNE_EPSILON, TOL

DEFAULT_MAX_DISJUNCTS = 10_000


class Tense(Enum):
    PAST = "past"
    PRESENT = "present"
    FUTURE = "future"


@dataclass(frozen=True)
class ExperienceProposition:
    """``E(n, t)``: experience ``eta_n`` at time ``t``."""

    n: int
    t: float

    def __str__(self):
        return f"E({self.n},{self.t!r})"


def classify_tense(e: ExperienceProposition, p: Perspective) -> Tense:
    # exact comparison: times come from a discrete grid
    if e.t < p.t0:
        return Tense.PAST
    if e.t == p.t0:
        return Tense.PRESENT
    return Tense.FUTURE


@dataclass(frozen=True)
class History:
    """Conjunction of experience propositions at strictly increasing times."""

    events: tuple[ExperienceProposition, ...] = ()

    def __post_init__(self):
        ev = tuple(sorted(self.events, key=lambda e: e.t))
        for a, b in zip(ev, ev[1:]):
            if a.t == b.t:
                raise ValueError(f"history has two events at t={a.t}")
        object.__setattr__(self, "events", ev)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "History":
        return cls(tuple(ExperienceProposition(int(n), float(t)) for n, t in pairs))

    def as_dict(self) -> dict[float, int]:
        return {e.t: e.n for e in self.events}

    def __str__(self):
        return " & ".join(map(str, self.events)) if self.events else "TRUE"


def _check_perspective(psi0, p: Perspective) -> None:
    f = p.factorization
    branch = f.project(f.check_dim(psi0), p.N)
    if float(np.vdot(branch, branch).real) <= PRUNE_EPSILON:
        raise EmptyPerspective(f"experience {p.N} does not occur at t0={p.t0}")


def history_truth(h: History, psi0, H, p: Perspective) -> float:
    """Truth value of a history from perspective ``p``.

    ``psi0`` is the universal state at ``p.t0``.  Any past or present event
    that disagrees with the memory record makes the history false; the
    future events are weighted with :func:`~relstate.future_truth.chain_value`.

    Raises:
        RecordGap: a past event falls on a time the record does not cover.
        EmptyPerspective: the perspective's own branch is empty.
    """
    _check_perspective(psi0, p)
    future = []
    for e in h.events:
        p.factorization.check_index(e.n)
        if classify_tense(e, p) is Tense.FUTURE:
            future.append((e.n, e.t))
            continue
        if e.t not in p.record:
            raise RecordGap(f"memory record has no entry for t={e.t}")
        if p.record[e.t] != e.n:
            return 0.0
    if not future:
        return 1.0
    return chain_value(psi0, H, p, future)


# --- proposition syntax tree ----------------------------------------------


class Proposition:
    """Base of the connective tree; use ``&``, ``|`` and ``~`` to combine."""

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def atoms(self) -> list[ExperienceProposition]:
        raise NotImplementedError


@dataclass(frozen=True)
class Atom(Proposition):
    event: ExperienceProposition

    def atoms(self):
        return [self.event]

    def __str__(self):
        return str(self.event)


@dataclass(frozen=True)
class Not(Proposition):
    operand: Proposition

    def atoms(self):
        return self.operand.atoms()

    def __str__(self):
        return f"!{_wrap(self.operand)}"


@dataclass(frozen=True)
class And(Proposition):
    left: Proposition
    right: Proposition

    def atoms(self):
        return self.left.atoms() + self.right.atoms()

    def __str__(self):
        return f"{_wrap(self.left)} & {_wrap(self.right)}"


@dataclass(frozen=True)
class Or(Proposition):
    left: Proposition
    right: Proposition

    def atoms(self):
        return self.left.atoms() + self.right.atoms()

    def __str__(self):
        return f"{_wrap(self.left)} | {_wrap(self.right)}"


def _wrap(p: Proposition) -> str:
    return str(p) if isinstance(p, (Atom, Not)) else f"({p})"


def E(n: int, t: float) -> Atom:
    return Atom(ExperienceProposition(int(n), float(t)))


# --- parser -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<op>[E()&|!,]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = "num" if m.group("num") is not None else "op"
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, value=None, kind=None):
        tok = self.tokens[self.i]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = repr(value) if value is not None else kind
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {want}, got {got}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Proposition:
        prop = self.or_()
        if self.peek()[0] != "end":
            tok = self.peek()
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return prop

    def or_(self):
        left = self.and_()
        while self.peek()[1] == "|":
            self.take("|")
            left = Or(left, self.and_())
        return left

    def and_(self):
        left = self.unary()
        while self.peek()[1] == "&":
            self.take("&")
            left = And(left, self.unary())
        return left

    def unary(self):
        tok = self.peek()
        if tok[1] == "!":
            self.take("!")
            return Not(self.unary())
        if tok[1] == "(":
            self.take("(")
            inner = self.or_()
            self.take(")")
            return inner
        if tok[1] == "E":
            return self.atom()
        got = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ParseError(f"expected E(n,t), '!' or '(', got {got}", tok[2])

    def atom(self):
        self.take("E")
        self.take("(")
        _, n_text, n_pos = self.take(kind="num")
        if not re.fullmatch(r"\d+", n_text):
            raise ParseError(f"experience index must be a nonnegative integer, got {n_text!r}", n_pos)
        self.take(",")
        _, t_text, _ = self.take(kind="num")
        self.take(")")
        return E(int(n_text), float(t_text))


def parse(text: str) -> Proposition:
    """Parse ``E(n,t)``, ``A & B``, ``A | B``, ``!A`` and parentheses.

    Raises:
        ParseError: with ``position`` set to the offending character offset.
    """
    return _Parser(text).parse()


# --- disjoint normal form ---------------------------------------------------

Conj = dict  # time -> index


def _disjoint(a: Conj, b: Conj) -> bool:
    return any(t in b and b[t] != n for t, n in a.items())


def _subtract(h: Conj, d: Conj, dim_S: int) -> list[Conj]:
    """``h & !d`` as pairwise disjoint conjunctions."""
    if _disjoint(h, d):
        return [h]
    out = []
    prefix = dict(h)
    for t in sorted(set(d) - set(h)):
        for m in range(dim_S):
            if m != d[t]:
                out.append({**prefix, t: m})
        prefix[t] = d[t]
    return out


class _Refiner:
    def __init__(self, dim_S: int, limit: int):
        self.dim_S = dim_S
        self.limit = limit

    def check(self, items):
        if len(items) > self.limit:
            raise TooManyDisjuncts(f"refinement produced more than {self.limit} histories")
        return items

    def make_disjoint(self, items: Sequence[Conj]) -> list[Conj]:
        result: list[Conj] = []
        for h in items:
            pieces = [h]
            for d in result:
                pieces = [q for p in pieces for q in _subtract(p, d, self.dim_S)]
                if not pieces:
                    break
            result.extend(pieces)
            self.check(result)
        return result

    def conj(self, a: list[Conj], b: list[Conj]) -> list[Conj]:
        out = []
        for x in a:
            for y in b:
                if not _disjoint(x, y):
                    out.append({**x, **y})
        # products of two disjoint families are disjoint
        return self.check(out)

    def negate(self, items: list[Conj]) -> list[Conj]:
        out: list[Conj] = [{}]
        for d in items:
            out = [q for p in out for q in _subtract(p, d, self.dim_S)]
            self.check(out)
        return out

    def dnf(self, prop: Proposition) -> list[Conj]:
        if isinstance(prop, Atom):
            if not 0 <= prop.event.n < self.dim_S:
                raise IndexError(f"experience index {prop.event.n} outside 0..{self.dim_S - 1}")
            return [{prop.event.t: prop.event.n}]
        if isinstance(prop, And):
            return self.conj(self.dnf(prop.left), self.dnf(prop.right))
        if isinstance(prop, Or):
            return self.make_disjoint(self.dnf(prop.left) + self.dnf(prop.right))
        if isinstance(prop, Not):
            return self.negate(self.dnf(prop.operand))
        raise TypeError(f"not a proposition: {prop!r}")


def disjoint_histories(prop: Proposition, dim_S: int, max_disjuncts: int = DEFAULT_MAX_DISJUNCTS) -> list[History]:
    """Refine ``prop`` into pairwise disjoint histories whose disjunction equals it."""
    items = _Refiner(dim_S, max_disjuncts).dnf(prop)
    return [History.from_pairs((n, t) for t, n in h.items()) for h in items]


def evaluate(
    prop: Proposition | str,
    psi0,
    H,
    p: Perspective,
    max_disjuncts: int = DEFAULT_MAX_DISJUNCTS,
) -> float:
    """Truth value of ``prop`` from perspective ``p`` (``psi0`` is the state at ``p.t0``).

    Raises:
        TooManyDisjuncts: refinement exceeded ``max_disjuncts`` histories.
    """
    if isinstance(prop, str):
        prop = parse(prop)
    if isinstance(prop, Not):
        return 1.0 - evaluate(prop.operand, psi0, H, p, max_disjuncts)
    _check_perspective(psi0, p)
    histories = disjoint_histories(prop, p.factorization.dim_S, max_disjuncts)
    total = sum(history_truth(h, psi0, H, p) for h in histories)
    if total > 1.0 + TOL:
        raise ContractViolation(f"disjoint histories sum to {total!r} > 1; the family is not consistent")
    return min(1.0, total)
