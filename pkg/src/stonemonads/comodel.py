"""Finite comodels (stateful runners) and their operational algebras.

A comodel over a signature assigns to each operation ``σ`` of arity ``n``
a table ``W -> (result in 0..n-1, next state)``.  Running a term descends
from the root, consulting the table at every node.  Comodels of semantic
monads (state, Boolean powers, sections) carry a ``runner`` that runs any
computation directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import EquationViolated, SearchSpaceTooLarge, Unsupported
from .finmonad import FinMonad, Leaf, Node, Signature, StateMonad, Term, state_signature
from .report import LawReport

Runner = Callable[[object, int], tuple[int, int]]


@dataclass
class Comodel:
    states: int
    signature: Signature | None = None
    coops: dict[str, tuple[tuple[int, int], ...]] = field(default_factory=dict)
    runner: Runner | None = None
    monad: FinMonad | None = None
    labels: tuple[str, ...] | None = None
    name: str = "comodel"

    def __post_init__(self):
        if self.signature is not None:
            for op in self.signature.ops:
                table = self.coops.get(op.name)
                if table is None or len(table) != self.states:
                    raise ValueError(f"coop table for {op.name} must have {self.states} rows")
                for w, (r, nxt) in enumerate(table):
                    if not (0 <= r < op.arity and 0 <= nxt < self.states):
                        raise ValueError(f"coop {op.name} at state {w} gives out-of-range ({r}, {nxt})")

    def run(self, t, w: int) -> tuple[int, int]:
        if isinstance(t, (Leaf, Node)) and self.signature is not None:
            return cointerpret(self, t, w)
        if self.runner is None:
            raise TypeError(f"{self.name} cannot run {t!r}")
        return self.runner(t, w)

    def label(self, w: int) -> str:
        return self.labels[w] if self.labels else f"w{w}"

    def with_tables(self) -> bool:
        return self.signature is not None


def cointerpret(W: Comodel, t: Term, w: int) -> tuple[int, int]:
    """Run a term from state ``w``: returns ``(leaf value, final state)``."""
    while isinstance(t, Node):
        r, w = W.coops[t.op][w]
        t = t.children[r]
    return t.value, w


def cointerpretation(W: Comodel, t) -> tuple[tuple[int, int], ...]:
    """The whole map ``W -> A × W`` of a computation."""
    return tuple(W.run(t, w) for w in range(W.states))


def check_comodel(W: Comodel, equations: Sequence[tuple[Term, Term]]) -> LawReport:
    """Both sides of every equation must run identically at every state."""
    report = LawReport(f"comodel-axioms[{W.name}]")
    report.details["note"] = "bind and return axioms hold by construction for tree terms"
    for i, (lhs, rhs) in enumerate(equations):
        for w in range(W.states):
            report.check(W.run(lhs, w) == W.run(rhs, w), law="equation", equation=i, state=w, lhs=lhs, rhs=rhs)
    return report


def require_comodel(W: Comodel, equations) -> Comodel:
    check_comodel(W, equations).require(EquationViolated)
    return W


def check_comodel_morphism(h: Sequence[int], W: Comodel, V: Comodel, sample: Sequence = ()) -> LawReport:
    """``h: W -> V`` preserves outputs and commutes with transitions.

    Table comodels are compared on their generators; ``sample`` adds any
    further computations to compare on (needed for runner-only comodels).
    """
    report = LawReport("comodel-morphism")
    if len(h) != W.states or any(not 0 <= v < V.states for v in h):
        report.fail(law="total")
        return report
    probes: list = []
    if W.signature is not None:
        for op in W.signature.ops:
            probes.append(Node(op.name, tuple(Leaf(i) for i in range(op.arity))))
    probes.extend(sample)
    for t in probes:
        for w in range(W.states):
            a, w2 = W.run(t, w)
            b, v2 = V.run(t, h[w])
            report.check(a == b and h[w2] == v2, law="preserve", state=w, computation=t)
    return report


# -- operational algebra ----------------------------------------------------


@dataclass
class SubsetAlgebra:
    """A Boolean algebra of subsets of ``range(ground)`` held by its atoms."""

    ground: int
    atoms: tuple[int, ...]
    generators: list[tuple[str, int]] = field(default_factory=list)

    @property
    def members(self) -> list[int]:
        out = []
        for choice in itertools.product((0, 1), repeat=len(self.atoms)):
            m = 0
            for bit, atom in zip(choice, self.atoms):
                if bit:
                    m |= atom
            out.append(m)
        return sorted(out)

    def contains(self, mask: int) -> bool:
        return all(mask & a in (0, a) for a in self.atoms)

    def refines(self, other: SubsetAlgebra) -> bool:
        """Every member of ``other`` is a member of ``self``."""
        return all(self.contains(a) for a in other.atoms)

    def atom_sets(self) -> list[list[int]]:
        return [[w for w in range(self.ground) if a >> w & 1] for a in self.atoms]

    def check(self) -> LawReport:
        report = LawReport("subset-algebra")
        full = (1 << self.ground) - 1
        members = set(self.members)
        report.check(0 in members and full in members, law="bounds")
        for m in members:
            report.check(full & ~m in members, law="complement", member=m)
            for k in members:
                report.check(m | k in members and m & k in members, law="union-intersection", pair=(m, k))
        for label, g in self.generators:
            report.check(g in members, law="generator", generator=label)
        return report


def _refine(blocks: list[int], key: Callable[[int], object], ground: int) -> list[int]:
    """Split every state-block by ``key``."""
    out = []
    for blk in blocks:
        groups: dict = {}
        for w in range(ground):
            if blk >> w & 1:
                groups.setdefault(key(w), 0)
                groups[key(w)] |= 1 << w
        out.extend(groups.values())
    return out


def term_shapes(sig: Signature, depth: int) -> list[Term]:
    """Terms up to ``depth`` whose leaves carry distinct labels ``0, 1, ...``."""
    level: list[Term] = [Leaf(0)]
    for _ in range(depth):
        nxt: list[Term] = [Leaf(0)]
        for op in sig.ops:
            for kids in itertools.product(level, repeat=op.arity):
                nxt.append(Node(op.name, kids))
        level = nxt
    return [_relabel(t) for t in level]


def _relabel(t: Term) -> Term:
    counter = itertools.count()

    def go(s):
        if isinstance(s, Leaf):
            return Leaf(next(counter))
        return Node(s.op, tuple(go(c) for c in s.children))

    return go(t)


def operational_algebra(W: Comodel, depth: int) -> SubsetAlgebra:
    """The Boolean algebra generated by the sets ``[t ↦ a]``.

    For a table comodel ``t`` ranges over terms of depth at most ``depth``
    (leaves labelled apart, which yields every ``[t ↦ a]`` as a union).
    For a runner-only comodel ``t`` ranges over ``T n`` for ``n <= depth``.
    """
    full = (1 << W.states) - 1
    blocks = [full] if W.states else []
    gens: list[tuple[str, int]] = []
    if W.signature is not None:
        probes = [(t, 1 + max(_leaves(t))) for t in term_shapes(W.signature, depth)]
    elif W.monad is not None:
        probes = [(t, n) for n in range(1, depth + 1) for t in W.monad.carrier(n)]
    else:
        raise Unsupported("comodel has neither tables nor a monad to probe with")
    for t, n in probes:
        values = [W.run(t, w)[0] for w in range(W.states)]
        for a in range(n):
            mask = sum(1 << w for w in range(W.states) if values[w] == a)
            gens.append((f"[{t} ↦ {a}]", mask))
        blocks = _refine(blocks, values.__getitem__, W.states)
    return SubsetAlgebra(W.states, tuple(sorted(blocks)), gens)


def _leaves(t: Term) -> list[int]:
    if isinstance(t, Leaf):
        return [t.value]
    return [v for c in t.children for v in _leaves(c)]


def stabilization_depth(W: Comodel, max_depth: int = 6) -> int:
    """Least depth from which the operational algebra stops growing."""
    prev = operational_algebra(W, 0)
    for d in range(1, max_depth + 1):
        cur = operational_algebra(W, d)
        if len(cur.atoms) == len(prev.atoms):
            return d - 1
        prev = cur
    return max_depth


# -- canonical comodels and search -----------------------------------------


def state_comodel(states: int) -> Comodel:
    """``W = S`` with ``get`` reporting the state and ``put<k>`` overwriting it."""
    sig = state_signature(states)
    coops = {"get": tuple((s, s) for s in range(states))}
    for k in range(states):
        coops[f"put{k}"] = tuple((0, k) for _ in range(states))
    T = StateMonad(states)
    return Comodel(
        states, sig, coops, runner=lambda t, s: t[s], monad=T,
        labels=tuple(f"s{s}" for s in range(states)), name=f"state-runner[{states}]",
    )


def canonical_comodel(T: FinMonad) -> Comodel:
    """The evident runner of a built-in semantic monad."""
    from .boolalg import DistributionsMonad
    from .sections import GammaMonad

    if isinstance(T, StateMonad):
        W = state_comodel(T.states)
        W.monad = T
        return W
    if isinstance(T, DistributionsMonad):
        n = T.algebra.atom_count

        def run_dist(h, p):
            for a, b in enumerate(h):
                if b >> p & 1:
                    return a, p
            raise ValueError(f"{h} does not cover atom {p}")

        return Comodel(n, runner=run_dist, monad=T, labels=tuple(f"p{p}" for p in range(n)), name=f"atoms[{n}]")
    if isinstance(T, GammaMonad):
        C = T.category

        def run_section(s, c):
            a, f = s[c]
            return a, C.tgt[f]

        labels = C.object_labels or tuple(f"c{c}" for c in range(C.objects))
        return Comodel(C.objects, runner=run_section, monad=T, labels=labels, name="objects")
    raise Unsupported(f"no canonical comodel for {T!r}")


def empty_comodel(sig: Signature) -> Comodel:
    return Comodel(0, sig, {op.name: () for op in sig.ops}, name="empty")


def enumerate_comodels(
    sig: Signature, equations: Sequence[tuple[Term, Term]], size: int, limit: int = 1_000_000
) -> list[Comodel]:
    """Every coop table on ``size`` states satisfying ``equations``."""
    per_op = []
    total = 1
    for op in sig.ops:
        rows = list(itertools.product(range(op.arity), range(size)))
        tables = list(itertools.product(rows, repeat=size)) if size else [()]
        per_op.append(tables)
        total *= len(tables)
        if total > limit:
            raise SearchSpaceTooLarge(f"{total} candidate tables exceed the limit {limit}")
    found = []
    for choice in itertools.product(*per_op):
        W = Comodel(size, sig, {op.name: tab for op, tab in zip(sig.ops, choice)})
        if check_comodel(W, equations).passed:
            found.append(W)
    return found


def flip_signature() -> Signature:
    return Signature.of(("flip", 2))


def stream_comodel(streams: Sequence[str]) -> Comodel:
    """Eventually periodic binary streams under ``flip`` (read one digit).

    Each stream is given as ``prefix(period)``, e.g. ``"(01)"`` or
    ``"1(0)"``; the state set is closed under taking tails.
    """
    seen: dict[tuple[str, str], int] = {}
    order: list[tuple[str, str]] = []

    def norm(prefix: str, period: str) -> tuple[str, str]:
        # push the period left as far as possible, then shorten it
        while prefix and prefix[-1] == period[-1]:
            prefix, period = prefix[:-1], period[-1] + period[:-1]
        for k in range(1, len(period) + 1):
            if len(period) % k == 0 and period[:k] * (len(period) // k) == period:
                return prefix, period[:k]
        return prefix, period

    def add(s):
        if s not in seen:
            seen[s] = len(order)
            order.append(s)

    for text in streams:
        prefix, rest = text.split("(")
        add(norm(prefix, rest.rstrip(")")))
    i = 0
    table = []
    while i < len(order):
        prefix, period = order[i]
        if prefix:
            head, tail = prefix[0], norm(prefix[1:], period)
        else:
            head, tail = period[0], norm("", period[1:] + period[0])
        add(tail)
        table.append((int(head), tail))
        i += 1
    coops = {"flip": tuple((d, seen[t]) for d, t in table)}
    labels = tuple(f"{p}({q})" for p, q in order)
    return Comodel(len(order), flip_signature(), coops, labels=labels, name="streams")
