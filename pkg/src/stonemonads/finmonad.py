"""Finitary monads over canonical finite sets.

A finite set is just its size ``n``; its elements are ``0 .. n-1``.  A
:class:`FinMonad` enumerates the computations ``T n`` and provides ``ret``
and ``bind``.  Computations are hashable canonical values, so equality of
computations is ``==``.

``bind(t, u)`` takes the continuation ``u`` as a sequence indexed by the
values of ``t``: ``u[a]`` is the computation run after ``t`` returns ``a``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .errors import DepthExceeded, NormalizerUnsound
from .report import LawReport

Computation = Hashable


# -- signatures and terms ---------------------------------------------------


@dataclass(frozen=True)
class Operation:
    name: str
    arity: int


@dataclass(frozen=True)
class Signature:
    ops: tuple[Operation, ...]

    def __post_init__(self):
        names = [op.name for op in self.ops]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate operation names in {names}")
        for op in self.ops:
            if op.arity < 0:
                raise ValueError(f"negative arity for {op.name}")

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> Signature:
        return cls(tuple(Operation(name, arity) for name, arity in pairs))

    def arity(self, name: str) -> int:
        for op in self.ops:
            if op.name == name:
                return op.arity
        raise KeyError(name)

    def names(self) -> list[str]:
        return [op.name for op in self.ops]

    def __contains__(self, name: str) -> bool:
        return any(op.name == name for op in self.ops)


@dataclass(frozen=True, slots=True)
class Leaf:
    value: int

    @property
    def depth(self) -> int:
        return 0

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True, slots=True)
class Node:
    op: str
    children: tuple = ()
    depth: int = field(default=0, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        d = 1 + max((c.depth for c in self.children), default=0)
        object.__setattr__(self, "depth", d)

    def __str__(self) -> str:
        return f"{self.op}({', '.join(map(str, self.children))})"


Term = Leaf | Node


def term_key(t: Term) -> tuple:
    """Total order on terms used for sorting and canonical choices."""
    if isinstance(t, Leaf):
        return (0, t.value)
    return (1, t.op, tuple(term_key(c) for c in t.children))


def graft(t: Term, u: Sequence[Term]) -> Term:
    """Substitute ``u[a]`` for every leaf ``a`` of ``t``."""
    if isinstance(t, Leaf):
        return u[t.value]
    return Node(t.op, tuple(graft(c, u) for c in t.children))


def leaf_values(t: Term) -> set[int]:
    if isinstance(t, Leaf):
        return {t.value}
    out: set[int] = set()
    for c in t.children:
        out |= leaf_values(c)
    return out


def check_term(t: Term, sig: Signature, n: int | None = None) -> None:
    if isinstance(t, Leaf):
        if n is not None and not 0 <= t.value < n:
            raise ValueError(f"leaf {t.value} out of range for size {n}")
        return
    if t.op not in sig:
        raise ValueError(f"unknown operation {t.op!r}")
    if len(t.children) != sig.arity(t.op):
        raise ValueError(f"{t.op} expects {sig.arity(t.op)} children")
    for c in t.children:
        check_term(c, sig, n)


def parse_term(text: str) -> Term:
    """Parse ``op(child, ...)`` syntax; leaves are integers or ``a<int>``.

    >>> str(parse_term("b(a0, b(b(a1, a2), a3))"))
    'b(0, b(b(1, 2), 3))'
    """
    pos = 0
    text = text.strip()

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def ident() -> str:
        nonlocal pos
        start = pos
        while pos < len(text) and (text[pos].isalnum() or text[pos] in "_'"):
            pos += 1
        if start == pos:
            raise ValueError(f"expected a name at offset {pos} in {text!r}")
        return text[start:pos]

    def term() -> Term:
        nonlocal pos
        skip_ws()
        name = ident()
        skip_ws()
        if pos < len(text) and text[pos] == "(":
            pos += 1
            kids = []
            skip_ws()
            if text[pos] == ")":
                pos += 1
                return Node(name, ())
            while True:
                kids.append(term())
                skip_ws()
                if text[pos] == ",":
                    pos += 1
                elif text[pos] == ")":
                    pos += 1
                    return Node(name, tuple(kids))
                else:
                    raise ValueError(f"unexpected {text[pos]!r} at offset {pos}")
        if name.isdigit():
            return Leaf(int(name))
        if name[0] == "a" and name[1:].isdigit():
            return Leaf(int(name[1:]))
        return Node(name, ())

    result = term()
    skip_ws()
    if pos != len(text):
        raise ValueError(f"trailing input at offset {pos} in {text!r}")
    return result


# -- the monad contract -----------------------------------------------------


class FinMonad:
    """Base class: subclasses implement ``_enumerate``, ``ret`` and ``bind``."""

    name = "monad"

    def __init__(self):
        self._carriers: dict[int, tuple] = {}
        self._indices: dict[int, dict] = {}

    def carrier(self, n: int) -> tuple:
        """All computations of ``T n`` in a fixed, duplicate-free order."""
        if n not in self._carriers:
            self._carriers[n] = tuple(self._enumerate(n))
        return self._carriers[n]

    def index(self, n: int) -> dict:
        if n not in self._indices:
            self._indices[n] = {t: i for i, t in enumerate(self.carrier(n))}
        return self._indices[n]

    def _enumerate(self, n: int) -> Iterable[Computation]:
        raise NotImplementedError

    def ret(self, a: int, n: int) -> Computation:
        raise NotImplementedError

    def bind(self, t: Computation, u: Sequence[Computation]) -> Computation:
        raise NotImplementedError

    def eq(self, t: Computation, s: Computation) -> bool:
        return t == s

    def fmap(self, t: Computation, f: Callable[[int], int], n: int, m: int) -> Computation:
        return self.bind(t, [self.ret(f(a), m) for a in range(n)])

    def __repr__(self) -> str:
        return f"<{self.name}>"


def skip(T: FinMonad, t: Computation, s: Computation, n: int) -> Computation:
    """``t ⊳ s``: run ``t`` (with ``n`` possible values), discard, run ``s``."""
    return T.bind(t, (s,) * n)


# -- term monads ------------------------------------------------------------


def commutative_normalizer(ops: Iterable[str] | None = None) -> Callable[[Term], Term]:
    """Normal forms for commutative operations: children sorted recursively."""
    chosen = None if ops is None else frozenset(ops)

    def normalize(t: Term) -> Term:
        if isinstance(t, Leaf):
            return t
        kids = tuple(normalize(c) for c in t.children)
        if chosen is None or t.op in chosen:
            kids = tuple(sorted(kids, key=term_key))
        return Node(t.op, kids)

    return normalize


def fail_normalizer(t: Term) -> Term:
    # The nullary-fail theory has no equations: terms are their own normal forms.
    return t


class TermMonad(FinMonad):
    """Terms over a signature, depth-bounded, optionally modulo a normalizer."""

    def __init__(
        self,
        sig: Signature,
        depth: int,
        normalizer: Callable[[Term], Term] | None = None,
        equations: Sequence[tuple[Term, Term]] = (),
        name: str | None = None,
    ):
        super().__init__()
        if depth < 0:
            raise ValueError("depth bound must be >= 0")
        self.sig = sig
        self.depth = depth
        self.normalizer = normalizer
        self.equations = tuple(equations)
        self.name = name or ("free" if normalizer is None else "quotient") + f"[{','.join(sig.names())}]"

    @property
    def is_free(self) -> bool:
        return self.normalizer is None and not self.equations

    def normalize(self, t: Term) -> Term:
        return t if self.normalizer is None else self.normalizer(t)

    def raw_terms(self, n: int, depth: int | None = None) -> list[Term]:
        """Every syntactic term with leaves in ``n`` of depth <= bound."""
        depth = self.depth if depth is None else depth
        leaves = [Leaf(a) for a in range(n)]
        level: list[Term] = list(leaves)
        for _ in range(depth):
            nxt: list[Term] = list(leaves)
            for op in self.sig.ops:
                for kids in itertools.product(level, repeat=op.arity):
                    nxt.append(Node(op.name, kids))
            level = nxt
        return level

    def _enumerate(self, n: int) -> Iterable[Term]:
        seen: dict[Term, None] = {}
        for t in self.raw_terms(n):
            seen.setdefault(self.normalize(t), None)
        return seen.keys()

    def ret(self, a: int, n: int) -> Term:
        return Leaf(a)

    def bind(self, t: Term, u: Sequence[Term]) -> Term:
        out = self.normalize(graft(t, u))
        if out.depth > self.depth:
            raise DepthExceeded(f"bind produced depth {out.depth} > bound {self.depth}")
        return out

    def check_normalizer(self, n: int = 2) -> LawReport:
        """Spot-check idempotence on the bounded universe and the equations."""
        report = LawReport(f"normalizer[{self.name}]")
        for t in self.raw_terms(n):
            nt = self.normalize(t)
            report.check(self.normalize(nt) == nt, law="idempotence", term=t)
        for lhs, rhs in self.equations:
            k = 1 + max(leaf_values(lhs) | leaf_values(rhs) | {-1})
            for labels in itertools.product(range(max(k, 1)), repeat=k):
                sub = [Leaf(a) for a in labels]
                report.check(
                    self.normalize(graft(lhs, sub)) == self.normalize(graft(rhs, sub)),
                    law="equation", lhs=lhs, rhs=rhs, labels=labels,
                )
        return report


def free_term_monad(sig: Signature, depth: int) -> TermMonad:
    return TermMonad(sig, depth)


def quotient_term_monad(
    sig: Signature,
    equations: Sequence[tuple[Term, Term]],
    normalizer: Callable[[Term], Term],
    depth: int,
    check_size: int = 2,
) -> TermMonad:
    """Term monad modulo ``equations``, decided by the caller's ``normalizer``.

    Raises :class:`NormalizerUnsound` when the normalizer is not idempotent on
    the bounded universe or fails to identify both sides of an equation.
    """
    T = TermMonad(sig, depth, normalizer=normalizer, equations=equations)
    report = T.check_normalizer(check_size)
    if not report.passed:
        raise NormalizerUnsound(report.summary())
    return T


# -- the state monad --------------------------------------------------------


class StateMonad(FinMonad):
    """``T A = (A × S)^S``; a computation is a tuple of ``(value, next)`` pairs."""

    def __init__(self, states: int):
        super().__init__()
        if states < 1:
            raise ValueError("state monad needs a nonempty state set")
        self.states = states
        self.name = f"state[{states}]"

    def _enumerate(self, n):
        pairs = [(a, s) for a in range(n) for s in range(self.states)]
        return itertools.product(pairs, repeat=self.states)

    def ret(self, a, n):
        return tuple((a, s) for s in range(self.states))

    def bind(self, t, u):
        return tuple(u[a][s] for a, s in t)

    def get(self) -> tuple:
        return tuple((s, s) for s in range(self.states))

    def put(self, k: int) -> tuple:
        return tuple((0, k) for _ in range(self.states))


def state_monad(states: int) -> StateMonad:
    return StateMonad(states)


def state_signature(states: int) -> Signature:
    """``get`` with one branch per state and ``put<k>`` for each state."""
    return Signature.of(("get", states), *((f"put{k}", 1) for k in range(states)))


def state_equations(states: int) -> list[tuple[Term, Term]]:
    """The usual laws of a single memory cell holding one of ``states`` values."""
    S = range(states)
    x = Leaf(0)
    eqs = [(Node("get", tuple(Node(f"put{s}", (x,)) for s in S)), x)]
    for s in S:
        for s2 in S:
            eqs.append((Node(f"put{s}", (Node(f"put{s2}", (x,)),)), Node(f"put{s2}", (x,))))
    for s in S:
        kids = tuple(Leaf(k) for k in S)
        eqs.append((Node(f"put{s}", (Node("get", kids),)), Node(f"put{s}", (Leaf(s),))))
    nested = Node("get", tuple(Node("get", tuple(Leaf(i * states + j) for j in S)) for i in S))
    eqs.append((nested, Node("get", tuple(Leaf(i * states + i) for i in S))))
    return eqs


def state_normalizer(states: int) -> Callable[[Term], Term]:
    """Normal forms for the state theory, read off from the semantics.

    A term denoting ``ret a`` becomes the leaf ``a``; anything else becomes
    ``get(put<s'_0>(a_0), ..., put<s'_k>(a_k))``.
    """
    T = StateMonad(states)
    ops = {"get": T.get(), **{f"put{k}": T.put(k) for k in range(states)}}

    def normalize(t: Term) -> Term:
        n = 1 + max(leaf_values(t) | {0})
        c = interpret(T, t, ops, n)
        if len({a for a, _ in c}) == 1 and all(s == i for i, (_, s) in enumerate(c)):
            return Leaf(c[0][0])
        return Node("get", tuple(Node(f"put{s}", (Leaf(a),)) for a, s in c))

    return normalize


def interpret(T: FinMonad, t: Term, ops: dict[str, Computation], n: int) -> Computation:
    """Evaluate a term in a monad given the meaning of each operation.

    ``ops[name]`` must be a computation in ``T arity``; leaves become ``ret``.
    """
    if isinstance(t, Leaf):
        return T.ret(t.value, n)
    return T.bind(ops[t.op], [interpret(T, c, ops, n) for c in t.children])


# -- monad maps and law checking --------------------------------------------


@dataclass
class MonadMap:
    """A family of functions ``component(t, n): T n -> S n``."""

    source: FinMonad
    target: FinMonad
    component: Callable[[Computation, int], Computation]
    name: str = "map"

    def __call__(self, t, n):
        return self.component(t, n)

    def then(self, other: MonadMap) -> MonadMap:
        """Composite ``other ∘ self``."""
        return MonadMap(
            self.source, other.target,
            lambda t, n: other.component(self.component(t, n), n),
            name=f"{other.name}∘{self.name}",
        )


def identity_map(T: FinMonad) -> MonadMap:
    return MonadMap(T, T, lambda t, n: t, name="id")


def check_monad_laws(
    T: FinMonad, max_a: int = 2, max_b: int = 2, max_c: int = 2, cap: int = 5_000_000
) -> LawReport:
    """Exhaustively verify the unit and associativity laws at small sizes.

    Instances whose evaluation leaves a bounded universe (deep terms,
    undefined composites) are counted as skipped, not as violations.
    """
    from .errors import BoundExceeded

    report = LawReport(f"monad-laws[{T.name}]")
    budget = [cap]

    def spend() -> bool:
        if budget[0] <= 0:
            report.partial = True
            return False
        budget[0] -= 1
        return True

    for n in range(max_a + 1):
        for m in range(max_b + 1):
            for u in itertools.product(T.carrier(m), repeat=n):
                for a in range(n):
                    if not spend():
                        return report
                    try:
                        lhs = T.bind(T.ret(a, n), u)
                    except BoundExceeded:
                        report.skipped += 1
                        continue
                    report.check(T.eq(lhs, u[a]), law="left-unit", a=a, u=u)
        for t in T.carrier(n):
            if not spend():
                return report
            try:
                lhs = T.bind(t, [T.ret(a, n) for a in range(n)])
            except BoundExceeded:
                report.skipped += 1
                continue
            report.check(T.eq(lhs, t), law="right-unit", t=t)

    for n in range(max_a + 1):
        TA = T.carrier(n)
        for m in range(max_b + 1):
            TB = T.carrier(m)
            us = list(itertools.product(TB, repeat=n))
            first: dict = {}
            for t in TA:
                for u in us:
                    try:
                        first[t, u] = T.bind(t, u)
                    except BoundExceeded:
                        first[t, u] = None
            for k in range(max_c + 1):
                memo: dict = {}
                for v in itertools.product(T.carrier(k), repeat=m):
                    after_v: dict = {}

                    def bind_v(x):
                        if x not in after_v:
                            try:
                                after_v[x] = T.bind(x, v)
                            except BoundExceeded:
                                after_v[x] = None
                        return after_v[x]

                    for t in TA:
                        for u in us:
                            if not spend():
                                return report
                            tu = first[t, u]
                            lhs = None if tu is None else bind_v(tu)
                            inner = tuple(bind_v(x) for x in u)
                            if lhs is None or None in inner:
                                report.skipped += 1
                                continue
                            key = (t, inner)
                            if key not in memo:
                                try:
                                    memo[key] = T.bind(t, inner)
                                except BoundExceeded:
                                    memo[key] = None
                            rhs = memo[key]
                            if rhs is None:
                                report.skipped += 1
                                continue
                            report.check(T.eq(lhs, rhs), law="associativity", t=t, u=u, v=v)
    return report


def check_monad_map(gamma: MonadMap, max_a: int = 2, max_b: int = 2, cap: int = 2_000_000) -> LawReport:
    """Verify that ``gamma`` preserves ``ret`` and ``bind`` at small sizes."""
    from .errors import BoundExceeded

    T, S = gamma.source, gamma.target
    report = LawReport(f"monad-map[{gamma.name}]")
    for n in range(max_a + 1):
        for a in range(n):
            report.check(S.eq(gamma(T.ret(a, n), n), S.ret(a, n)), law="ret", a=a, n=n)
    budget = cap
    for n in range(max_a + 1):
        for m in range(max_b + 1):
            images = {x: gamma(x, m) for x in T.carrier(m)}
            for t in T.carrier(n):
                gt = gamma(t, n)
                for u in itertools.product(T.carrier(m), repeat=n):
                    budget -= 1
                    if budget < 0:
                        report.partial = True
                        return report
                    try:
                        lhs = gamma(T.bind(t, u), m)
                        rhs = S.bind(gt, [images[x] for x in u])
                    except BoundExceeded:
                        report.skipped += 1
                        continue
                    report.check(S.eq(lhs, rhs), law="bind", t=t, u=u)
    return report


def maps_agree(f: MonadMap, g: MonadMap, sizes: Iterable[int]) -> LawReport:
    report = LawReport(f"agree[{f.name},{g.name}]")
    for n in sizes:
        for t in f.source.carrier(n):
            report.check(f.target.eq(f(t, n), g(t, n)), t=t, n=n)
    return report


def pair_code(a1: int, a2: int, n: int) -> int:
    """Encode ``(a1, a2) ∈ n × n`` as an element of ``n*n``."""
    return a1 * n + a2

