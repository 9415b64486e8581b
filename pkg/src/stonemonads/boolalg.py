"""Finite Boolean algebras, B-sets, Boolean powers and the sheaf of transitions.

A finite Boolean algebra with ``n`` atoms is the powerset of ``range(n)``;
elements are bitmasks.  Every partition of a finite algebra is finite, so
the partition-indexed switch operations of a B-set are folds of the binary
if-then-else operations, and the "Grothendieck topology" is simply all
partitions.

A :class:`BSet` stores its carrier as labels ``0 .. k-1`` together with the
full if-then-else table ``ite[b][x][y]``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from scipy.cluster.hierarchy import DisjointSet

from .errors import BoundMismatch
from .finmonad import FinMonad
from .report import LawReport


# -- finite Boolean algebras ------------------------------------------------


@dataclass(frozen=True)
class FinBoolAlg:
    atom_count: int

    @property
    def top(self) -> int:
        return (1 << self.atom_count) - 1

    @property
    def bottom(self) -> int:
        return 0

    @property
    def size(self) -> int:
        return 1 << self.atom_count

    def elements(self) -> range:
        return range(self.size)

    def atoms(self) -> list[int]:
        return [1 << p for p in range(self.atom_count)]

    def meet(self, b: int, c: int) -> int:
        return b & c

    def join(self, b: int, c: int) -> int:
        return b | c

    def neg(self, b: int) -> int:
        return self.top & ~b

    def leq(self, b: int, c: int) -> bool:
        return b & ~c == 0

    def atoms_below(self, b: int) -> list[int]:
        return [p for p in range(self.atom_count) if b >> p & 1]

    def fmt(self, b: int) -> str:
        return "{" + ",".join(map(str, self.atoms_below(b))) + "}"

    @property
    def nondegenerate(self) -> bool:
        return self.atom_count >= 1

    def partitions(self) -> list[tuple[int, ...]]:
        """Every partition of ⊤ into nonzero, pairwise disjoint elements."""
        out: list[tuple[int, ...]] = []

        def grow(p: int, blocks: list[int]):
            if p == self.atom_count:
                out.append(tuple(sorted(blocks)))
                return
            for i in range(len(blocks)):
                blocks[i] |= 1 << p
                grow(p + 1, blocks)
                blocks[i] &= ~(1 << p)
            blocks.append(1 << p)
            grow(p + 1, blocks)
            blocks.pop()

        grow(0, [])
        return sorted(out)


def is_partition(B: FinBoolAlg, blocks: Sequence[int]) -> bool:
    seen = 0
    for b in blocks:
        if b == 0 or b & seen or b & ~B.top:
            return False
        seen |= b
    return seen == B.top


def check_boolean_algebra(B: FinBoolAlg) -> LawReport:
    report = LawReport(f"boolean-algebra[{B.atom_count}]")
    E = B.elements()
    report.check((B.bottom != B.top) == B.nondegenerate, law="nondegenerate")
    for x in E:
        report.check(B.meet(x, B.neg(x)) == B.bottom and B.join(x, B.neg(x)) == B.top, law="complement", x=x)
        report.check(B.meet(x, B.top) == x and B.join(x, B.bottom) == x, law="identity", x=x)
        for y in E:
            report.check(B.meet(x, B.join(x, y)) == x and B.join(x, B.meet(x, y)) == x, law="absorption", x=x, y=y)
            report.check(B.leq(x, y) == (B.meet(x, y) == x), law="order", x=x, y=y)
            for z in E:
                report.check(
                    B.meet(x, B.join(y, z)) == B.join(B.meet(x, y), B.meet(x, z)),
                    law="distributivity", x=x, y=y, z=z,
                )
    return report


def boolean_power(n: int, B: FinBoolAlg) -> list[tuple[int, ...]]:
    """Maps ``h: n -> B`` whose nonzero values partition ⊤.

    Such a map is the same thing as a labelling of atoms by elements of
    ``n``; the enumeration order is the lexicographic order of labellings.
    """
    out = []
    for labels in itertools.product(range(n), repeat=B.atom_count):
        h = [0] * n
        for p, a in enumerate(labels):
            h[a] |= 1 << p
        out.append(tuple(h))
    return out


def delta(a: int, n: int, B: FinBoolAlg) -> tuple[int, ...]:
    return tuple(B.top if i == a else 0 for i in range(n))


def value_at(h: Sequence[int], p: int) -> int:
    """The unique ``a`` with atom ``p`` below ``h(a)``."""
    for a, b in enumerate(h):
        if b >> p & 1:
            return a
    raise ValueError(f"{h} does not cover atom {p}")


# -- B-sets -----------------------------------------------------------------


class BSet:
    """A finite set with an if-then-else action of a finite Boolean algebra."""

    def __init__(self, algebra: FinBoolAlg, table: list, labels: Sequence[Hashable] | None = None, name: str = "bset"):
        self.algebra = algebra
        self.table = table
        self.size = len(table[0]) if table else 0
        self.labels = list(labels) if labels is not None else list(range(self.size))
        self.name = name
        self._index = None

    @classmethod
    def from_ite(cls, algebra: FinBoolAlg, labels: Sequence[Hashable], ite, name: str = "bset") -> BSet:
        """Tabulate ``ite(b, x_label, y_label) -> label`` over ``labels``."""
        labels = list(labels)
        index = {x: i for i, x in enumerate(labels)}
        table = [
            [[index[ite(b, x, y)] for y in labels] for x in labels]
            for b in algebra.elements()
        ]
        out = cls(algebra, table, labels, name)
        out._index = index
        return out

    @classmethod
    def from_equivalences(cls, algebra: FinBoolAlg, size: int, equiv: dict[int, Sequence[int]], name: str = "bset") -> BSet:
        """Rebuild the action from the family of relations ``x ≡_b y``.

        ``equiv[b][x]`` is a class label of ``x`` under ``≡_b``; ``b(x, y)``
        is the unique ``z`` with ``z ≡_b x`` and ``z ≡_¬b y``.
        """
        top = algebra.top
        classes = {b: list(equiv[b]) for b in algebra.elements() if b in equiv}
        classes.setdefault(top, list(range(size)))
        classes.setdefault(0, [0] * size)
        table = []
        for b in algebra.elements():
            if b not in classes or algebra.neg(b) not in classes:
                raise ValueError(f"missing relation for {algebra.fmt(b)}")
            eb, enb = classes[b], classes[algebra.neg(b)]
            rows = []
            for x in range(size):
                row = []
                for y in range(size):
                    zs = [z for z in range(size) if eb[z] == eb[x] and enb[z] == enb[y]]
                    if len(zs) != 1:
                        raise ValueError(f"no unique amalgam of {x} over {algebra.fmt(b)} and {y}")
                    row.append(zs[0])
                rows.append(row)
            table.append(rows)
        return cls(algebra, table, None, name)

    def index(self, label: Hashable) -> int:
        if self._index is None:
            self._index = {x: i for i, x in enumerate(self.labels)}
        return self._index[label]

    def ite(self, b: int, x: int, y: int) -> int:
        return self.table[b][x][y]

    def switch(self, blocks: Sequence[int], xs: Sequence[int]) -> int:
        """The partition operation: ``x_i`` on block ``b_i``."""
        z = xs[-1]
        for b, x in zip(reversed(blocks[:-1]), reversed(xs[:-1])):
            z = self.table[b][x][z]
        return z

    def equiv(self, x: int, y: int, b: int) -> bool:
        return self.table[b][x][y] == y

    def equivalences(self) -> dict[int, list[int]]:
        """For each ``b`` the class label of every element under ``≡_b``."""
        out = {}
        for b in self.algebra.elements():
            uf = DisjointSet(range(self.size))
            for x in range(self.size):
                for y in range(self.size):
                    if self.equiv(x, y, b):
                        uf.merge(x, y)
            out[b] = _labels(uf, self.size)
        return out

    def __repr__(self) -> str:
        return f"<{self.name}: {self.size} elements over {self.algebra.atom_count} atoms>"


def _labels(uf: DisjointSet, size: int) -> list[int]:
    """Canonical class labels: classes numbered by their least element."""
    ids: dict = {}
    out = []
    for x in range(size):
        out.append(ids.setdefault(uf[x], len(ids)))
    return out


def equiv_b(X: BSet, x: int, y: int, b: int) -> bool:
    return X.equiv(x, y, b)


def free_bset(n: int, B: FinBoolAlg) -> BSet:
    """The Boolean power ``n[B]``: the free B-set on ``n`` generators."""
    if not B.nondegenerate:
        raise ValueError("Boolean powers need a non-degenerate algebra")
    top = B.top

    def ite(b, h, g):
        nb = top & ~b
        return tuple((b & x) | (nb & y) for x, y in zip(h, g))

    return BSet.from_ite(B, boolean_power(n, B), ite, name=f"free[{n}]")


def omega_bset(B: FinBoolAlg) -> BSet:
    """``B`` acting on itself: ``u ≡_b v`` iff ``b ∧ u = b ∧ v``."""
    top = B.top
    return BSet.from_ite(B, list(B.elements()), lambda b, u, v: (b & u) | (top & ~b & v), name="omega")


def check_bset(X: BSet, cap: int = 3_000_000, seed: int = 0) -> LawReport:
    """All binary and partition axioms of a B-set, plus the induced relations.

    Partition axioms quantify over families indexed by the partition; when
    the number of families exceeds ``cap`` they are sampled with ``seed``
    and the report is flagged partial.
    """
    B = X.algebra
    report = LawReport(f"bset-axioms[{X.name}]")
    E = list(B.elements())
    xs = range(X.size)
    t = X.table
    top = B.top
    for x in xs:
        for y in xs:
            report.check(t[top][x][y] == x, law="top", x=x, y=y)
    for b in E:
        nb = B.neg(b)
        tb = t[b]
        for x in xs:
            report.check(tb[x][x] == x, law="idempotent", b=b, x=x)
            for y in xs:
                report.check(t[nb][x][y] == tb[y][x], law="negation", b=b, x=x, y=y)
                for z in xs:
                    report.check(tb[tb[x][y]][z] == tb[x][z], law="left-absorb", b=b, x=x, y=y, z=z)
                    report.check(tb[x][tb[y][z]] == tb[x][z], law="right-absorb", b=b, x=x, y=y, z=z)
        for c in E:
            tc = t[c]
            tbc = t[b & c]
            for x in xs:
                for y in xs:
                    report.check(tbc[x][y] == tb[tc[x][y]][y], law="meet", b=b, c=c, x=x, y=y)

    rng = random.Random(seed)
    for P in B.partitions():
        k = len(P)
        for z in xs:
            report.check(X.switch(P, [z] * k) == z, law="constant", partition=P, z=z)

        def families(count):
            total = X.size ** count
            if total <= cap:
                return itertools.product(xs, repeat=count)
            report.partial = True
            return (tuple(rng.randrange(X.size) for _ in range(count)) for _ in range(cap))

        for fam in families(2 * k):
            x, y = fam[:k], fam[k:]
            mixed = [t[b][xb][yb] for b, xb, yb in zip(P, x, y)]
            report.check(X.switch(P, mixed) == X.switch(P, x), law="local", partition=P, x=x, y=y)
        for x in families(k):
            px = X.switch(P, x)
            for b, xb in zip(P, x):
                report.check(t[b][px][xb] == xb, law="restrict", partition=P, x=x, b=b)
            # the switch is the unique amalgam of the family
            amalgams = [z for z in xs if all(t[b][z][xb] == xb for b, xb in zip(P, x))]
            report.check(amalgams == [px], law="unique-amalgam", partition=P, x=x)

    for b in E:
        for x in xs:
            for y in xs:
                if X.equiv(x, y, b):
                    report.check(X.equiv(y, x, b), law="symmetric", b=b, x=x, y=y)
                    for c in E:
                        if B.leq(c, b):
                            report.check(X.equiv(x, y, c), law="monotone", b=b, c=c, x=x, y=y)
                    for z in xs:
                        if X.equiv(y, z, b):
                            report.check(X.equiv(x, z, b), law="transitive", b=b, x=x, y=y, z=z)
                report.check(X.equiv(x, y, top) == (x == y), law="top-equality", x=x, y=y)
                report.check(X.equiv(x, y, 0), law="bottom-total", x=x, y=y)
    return report


# -- homomorphisms ----------------------------------------------------------


def generating_set(X: BSet) -> tuple[list[int], list[tuple[int, int, int, int]]]:
    """A greedy generating set and a derivation of every other element.

    The derivation lists ``(z, b, x, y)`` with ``z = b(x, y)`` in an order
    where ``x`` and ``y`` are always already known.
    """
    gens: list[int] = []
    known: set[int] = set()
    steps: list[tuple[int, int, int, int]] = []
    for g in range(X.size):
        if g in known:
            continue
        gens.append(g)
        known.add(g)
        frontier = True
        while frontier:
            frontier = False
            current = sorted(known)
            for b in X.algebra.elements():
                row = X.table[b]
                for x in current:
                    for y in current:
                        z = row[x][y]
                        if z not in known:
                            known.add(z)
                            steps.append((z, b, x, y))
                            frontier = True
    return gens, steps


def bset_homomorphisms(F: BSet, G: BSet) -> list[tuple[int, ...]]:
    """All action-preserving maps ``F -> G`` (same algebra), as value tuples."""
    if F.algebra != G.algebra:
        raise ValueError("B-sets over different algebras")
    gens, steps = generating_set(F)
    E = list(F.algebra.elements())
    out = []
    for images in itertools.product(range(G.size), repeat=len(gens)):
        w = [-1] * F.size
        for g, v in zip(gens, images):
            w[g] = v
        for z, b, x, y in steps:
            w[z] = G.table[b][w[x]][w[y]]
        if all(
            w[F.table[b][x][y]] == G.table[b][w[x]][w[y]]
            for b in E for x in range(F.size) for y in range(F.size)
        ):
            out.append(tuple(w))
    return out


@dataclass
class EtaleSpace:
    """Opens of the étale space: homomorphisms ``F -> B`` ordered pointwise."""

    bset: BSet
    opens: list[tuple[int, ...]]
    hats: list[tuple[int, ...]]
    points: int
    report: LawReport


def hat(F: BSet, x: int) -> tuple[int, ...]:
    """``y ↦ ⋁ {b | x ≡_b y}``."""
    out = []
    for y in range(F.size):
        v = 0
        for b in F.algebra.elements():
            if F.equiv(x, y, b):
                v |= b
        out.append(v)
    return tuple(out)


def etale_opens(F: BSet) -> EtaleSpace:
    B = F.algebra
    opens = bset_homomorphisms(F, omega_bset(B))
    report = LawReport(f"etale[{F.name}]")
    open_set = set(opens)
    hats = [hat(F, x) for x in range(F.size)]
    for x, h in enumerate(hats):
        report.check(h in open_set, law="hat-is-open", x=x)
    report.check(len(set(hats)) == len(hats), law="hat-injective")
    for w in opens:
        rebuilt = tuple(
            _join(hats[x][y] & w[x] for x in range(F.size)) for y in range(F.size)
        )
        report.check(rebuilt == w, law="basis-decomposition", open=w)
    points = join_irreducible_count(opens)
    report.details["opens"] = len(opens)
    report.details["points"] = points
    return EtaleSpace(F, opens, hats, points, report)


def _join(values: Iterable[int]) -> int:
    out = 0
    for v in values:
        out |= v
    return out


def join_irreducible_count(opens: Sequence[tuple[int, ...]]) -> int:
    """Points of a finite frame of pointwise-ordered maps into a powerset."""
    count = 0
    for w in opens:
        if not any(w):
            continue
        below = [v for v in opens if v != w and all(a & ~b == 0 for a, b in zip(v, w))]
        joined = tuple(_join(col) for col in zip(*below)) if below else tuple(0 for _ in w)
        if joined != w:
            count += 1
    return count


def germs(F: BSet) -> dict[int, list[list[int]]]:
    """For every atom ``p`` the classes of ``F`` under ``≡_p``."""
    out = {}
    for p in range(F.algebra.atom_count):
        uf = DisjointSet(range(F.size))
        for x in range(F.size):
            for y in range(F.size):
                if F.equiv(x, y, 1 << p):
                    uf.merge(x, y)
        out[p] = sorted(sorted(c) for c in uf.subsets())
    return out


def germ_count(F: BSet) -> int:
    return sum(len(v) for v in germs(F).values())


# -- congruences ------------------------------------------------------------


@dataclass
class BSetCongruence:
    bset: BSet
    classes: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(set(self.classes))

    def same(self, x: int, y: int) -> bool:
        return self.classes[x] == self.classes[y]

    def blocks(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for x, c in enumerate(self.classes):
            out.setdefault(c, []).append(x)
        return list(out.values())

    def quotient(self) -> BSet:
        X = self.bset
        reps = [blk[0] for blk in self.blocks()]
        cls = self.classes
        order = {cls[r]: i for i, r in enumerate(reps)}
        table = [[[order[cls[X.table[b][x][y]]] for y in reps] for x in reps] for b in X.algebra.elements()]
        labels = [tuple(X.labels[x] for x in blk) for blk in self.blocks()]
        return BSet(X.algebra, table, labels, name=f"{X.name}/~")


def congruence_closure(X: BSet, pairs: Iterable[tuple[int, int]]) -> BSetCongruence:
    """Least congruence containing ``pairs``.

    Each partition operation is a fold of binary ones, so closing under
    the binary operations closes under all of them.  An element related to
    its class root may be replaced by the root in either argument.
    """
    uf = DisjointSet(range(X.size))
    for x, y in pairs:
        uf.merge(x, y)
    E = list(X.algebra.elements())
    changed = True
    while changed:
        changed = False
        for x in range(X.size):
            r = uf[x]
            if r == x:
                continue
            for b in E:
                row_x, row_r = X.table[b][x], X.table[b][r]
                for y in range(X.size):
                    if uf.merge(row_x[y], row_r[y]):
                        changed = True
                    if uf.merge(X.table[b][y][x], X.table[b][y][r]):
                        changed = True
    return BSetCongruence(X, tuple(_labels(uf, X.size)))


def is_congruence(cong: BSetCongruence, cap: int = 1_000_000) -> LawReport:
    """Closure under every partition operation of related families."""
    X = cong.bset
    report = LawReport("congruence")
    blocks = cong.blocks()
    of = {x: blk for blk in blocks for x in blk}
    budget = cap
    for P in X.algebra.partitions():
        for xs in itertools.product(range(X.size), repeat=len(P)):
            for ys in itertools.product(*(of[x] for x in xs)):
                budget -= 1
                if budget < 0:
                    report.partial = True
                    return report
                report.check(cong.same(X.switch(P, xs), X.switch(P, ys)), partition=P, x=xs, y=ys)
    return report


# -- the distributions monad ------------------------------------------------


class DistributionsMonad(FinMonad):
    """``D_B(A)``: Boolean-power valued computations; all of them hyperaffine."""

    def __init__(self, algebra: FinBoolAlg):
        super().__init__()
        if not algebra.nondegenerate:
            raise ValueError("distributions monad needs a non-degenerate algebra")
        self.algebra = algebra
        self.name = f"dist[{algebra.atom_count}]"

    def _enumerate(self, n):
        return boolean_power(n, self.algebra)

    def ret(self, a, n):
        return delta(a, n, self.algebra)

    def bind(self, t, u):
        m = len(u[0]) if u else 0
        out = [0] * m
        for a, b in enumerate(t):
            if b:
                for a2, c in enumerate(u[a]):
                    out[a2] |= b & c
        return tuple(out)


def distributions_monad(B: FinBoolAlg | int) -> DistributionsMonad:
    if isinstance(B, int):
        B = FinBoolAlg(B)
    return DistributionsMonad(B)


# -- the sheaf of transitions ----------------------------------------------


@dataclass
class SheafReport:
    algebra: FinBoolAlg
    free: BSet
    congruence: BSetCongruence
    sheaf: BSet
    generators: int
    germ_counts: dict[int, int]
    total_germs: int
    morphism_count: int
    report: LawReport = field(default_factory=lambda: LawReport("sheaf-of-transitions"))

    def to_dict(self) -> dict:
        return {
            "atoms": self.algebra.atom_count,
            "free_size": self.free.size,
            "sheaf_size": self.sheaf.size,
            "generators": self.generators,
            "germ_counts": {str(k): v for k, v in self.germ_counts.items()},
            "total_germs": self.total_germs,
            "morphism_count": self.morphism_count,
            "report": self.report.to_dict(),
        }


def sheaf_of_transitions(T: FinMonad, W, max_a: int = 2, depth: int | None = None, strict: bool = True) -> SheafReport:
    """Quotient of the free B-set on ``T1`` by the transition relations.

    ``B`` is the operational algebra of ``W``.  The closure is compared with
    the pointwise trace relation: ``x ≈ y`` iff on every atom the values of
    ``x`` and ``y`` are trace equivalent at every state of that atom.
    """
    from .behaviour import minimize, seed_pairs, trace_partitions, unary_universe
    from .comodel import operational_algebra

    alg = operational_algebra(W, depth if depth is not None else _default_depth(T))
    B = FinBoolAlg(len(alg.atoms))
    atom_of = [0] * W.states
    for p, mask in enumerate(alg.atoms):
        for w in range(W.states):
            if mask >> w & 1:
                atom_of[w] = p

    T1 = unary_universe(T)
    pos = {m: i for i, m in enumerate(T1)}
    F = free_bset(len(T1), B)

    def region(t, a):
        """``[t ↦ a]`` as an element of B, checked constant on atoms."""
        out = 0
        for p, mask in enumerate(alg.atoms):
            vals = {W.run(t, w)[0] for w in range(W.states) if mask >> w & 1}
            if len(vals) != 1:
                raise BoundMismatch(LawReport("sheaf-atoms", violation_count=1), f"atoms do not refine [{t} ↦ -]")
            if vals == {a}:
                out |= 1 << p
        return out

    pairs = []
    count = 0
    for t, n, u, bound, skips in seed_pairs(T, T1, max_a):
        lhs = F.index(delta(pos[bound], len(T1), B))
        rhs = [0] * len(T1)
        regions = [region(t, a) for a in range(n)]
        if any(r and s is None for r, s in zip(regions, skips)):
            continue
        for a in range(n):
            if regions[a]:
                rhs[pos[skips[a]]] |= regions[a]
        pairs.append((lhs, F.index(tuple(rhs))))
        count += 1
    cong = congruence_closure(F, pairs)
    quotient = cong.quotient()

    parts = trace_partitions(T, W, range(W.states), max_a=max_a)
    report = LawReport("sheaf-vs-trace")
    for x in range(F.size):
        hx = F.labels[x]
        for y in range(F.size):
            hy = F.labels[y]
            pointwise = all(
                parts[w][value_at(hx, atom_of[w])] == parts[w][value_at(hy, atom_of[w])]
                for w in range(W.states)
            )
            report.check(pointwise == cong.same(x, y), x=hx, y=hy, closure=cong.same(x, y), pointwise=pointwise)
    report.details["max_a"] = max_a

    gs = germs(quotient)
    germ_counts = {p: len(v) for p, v in gs.items()}
    reps = minimize(W).representatives
    morphisms = sum(len(set(parts[r])) for r in reps)
    out = SheafReport(B, F, cong, quotient, count, germ_counts, sum(germ_counts.values()), morphisms, report)
    if strict and not report.passed:
        raise BoundMismatch(report)
    return out


def _default_depth(T) -> int:
    return getattr(T, "depth", 2)
