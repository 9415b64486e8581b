"""Finite categories (discrete object spaces) and retrofunctors.

Composition is diagrammatic: ``comp[f, g]`` is "first ``f`` then ``g``" and
is defined when ``tgt[f] == src[g]``.  A category built from a bounded
universe may be *truncated*: some composites fall outside the universe and
are missing from ``comp``; law checks skip those instances.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property

from .errors import CompositionUndefined
from .report import LawReport


@dataclass(frozen=True)
class FinCat:
    objects: int
    src: tuple[int, ...]
    tgt: tuple[int, ...]
    ident: tuple[int, ...]
    comp: dict = field(hash=False)
    truncated: bool = False
    object_labels: tuple[str, ...] | None = field(default=None, compare=False, hash=False)
    morphism_labels: tuple[str, ...] | None = field(default=None, compare=False, hash=False)

    @property
    def morphisms(self) -> int:
        return len(self.src)

    def compose(self, f: int, g: int) -> int:
        if self.tgt[f] != self.src[g]:
            raise ValueError(f"morphisms {f} and {g} are not composable")
        try:
            return self.comp[f, g]
        except KeyError:
            raise CompositionUndefined(f"{f};{g} lies outside the truncated category") from None

    @cached_property
    def _outgoing(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(f for f in range(self.morphisms) if self.src[f] == c) for c in range(self.objects))

    def out(self, c: int) -> tuple[int, ...]:
        """Morphisms with source ``c``, in index order."""
        return self._outgoing[c]

    def hom(self, c: int, d: int) -> list[int]:
        return [f for f in range(self.morphisms) if self.src[f] == c and self.tgt[f] == d]

    def composable_pairs(self):
        for f in range(self.morphisms):
            for g in self.out(self.tgt[f]):
                yield f, g


def check_category(C: FinCat) -> LawReport:
    report = LawReport("category-laws")
    n, m = C.objects, C.morphisms
    for c in range(n):
        i = C.ident[c]
        report.check(0 <= i < m and C.src[i] == c and C.tgt[i] == c, law="identity-endpoints", object=c)
    for f in range(m):
        report.check(0 <= C.src[f] < n and 0 <= C.tgt[f] < n, law="endpoints", morphism=f)
    for key in C.comp:
        f, g = key
        report.check(C.tgt[f] == C.src[g], law="comp-domain", pair=key)
    if not report.passed:
        return report
    for f, g in C.composable_pairs():
        if (f, g) not in C.comp:
            if C.truncated:
                report.skipped += 1
            else:
                report.fail(law="comp-total", pair=(f, g))
            continue
        h = C.comp[f, g]
        report.check(C.src[h] == C.src[f] and C.tgt[h] == C.tgt[g], law="comp-endpoints", pair=(f, g))
    for f in range(m):
        report.check(C.comp.get((C.ident[C.src[f]], f)) == f, law="left-unit", morphism=f)
        report.check(C.comp.get((f, C.ident[C.tgt[f]])) == f, law="right-unit", morphism=f)
    for f, g in C.composable_pairs():
        for h in C.out(C.tgt[g]):
            fg, gh = C.comp.get((f, g)), C.comp.get((g, h))
            if fg is None or gh is None or (fg, h) not in C.comp or (f, gh) not in C.comp:
                report.skipped += 1
                continue
            report.check(C.comp[fg, h] == C.comp[f, gh], law="associativity", triple=(f, g, h))
    return report


def discrete_category(n: int) -> FinCat:
    return FinCat(n, tuple(range(n)), tuple(range(n)), tuple(range(n)), {(c, c): c for c in range(n)})


def chaotic_category(n: int) -> FinCat:
    """Exactly one morphism ``c -> d`` for each pair; morphism ``c*n + d``."""
    src = tuple(c for c in range(n) for _ in range(n))
    tgt = tuple(d for _ in range(n) for d in range(n))
    ident = tuple(c * n + c for c in range(n))
    comp = {(c * n + d, d * n + e): c * n + e for c in range(n) for d in range(n) for e in range(n)}
    return FinCat(n, src, tgt, ident, comp)


def random_category(seed: int, max_objects: int = 3, max_morphisms: int = 7) -> FinCat:
    """A law-valid random finite category, deterministic per seed.

    Each object gets a carrier of one or two points.  Random maps between
    carriers form a quiver which is completed with identities and closed
    under composition; paths are collapsed when they act by the same
    function.  An edge is dropped if closing it would exceed
    ``max_morphisms``.
    """
    rng = random.Random(seed)
    n = rng.randint(1, max(1, min(max_objects, max_morphisms)))
    sizes = [rng.randint(1, 2) for _ in range(n)]
    morphs = [(c, c, tuple(range(sizes[c]))) for c in range(n)]
    for _ in range(rng.randint(0, 2 * max_morphisms)):
        c, d = rng.randrange(n), rng.randrange(n)
        edge = (c, d, tuple(rng.randrange(sizes[d]) for _ in range(sizes[c])))
        grown = _close_under_composition(morphs + [edge], max_morphisms)
        if grown is not None:
            morphs = grown
    index = {m: i for i, m in enumerate(morphs)}
    comp = {}
    for f, (a, b, fa) in enumerate(morphs):
        for g, (b2, c2, gb) in enumerate(morphs):
            if b == b2:
                comp[f, g] = index[(a, c2, tuple(gb[x] for x in fa))]
    return FinCat(n, tuple(m[0] for m in morphs), tuple(m[1] for m in morphs), tuple(range(n)), comp)


def _close_under_composition(morphs, cap):
    found = list(dict.fromkeys(morphs))
    if len(found) > cap:
        return None
    seen = set(found)
    changed = True
    while changed:
        changed = False
        for a in list(found):
            for b in list(found):
                if a[1] != b[0]:
                    continue
                h = (a[0], b[1], tuple(b[2][x] for x in a[2]))
                if h not in seen:
                    if len(found) >= cap:
                        return None
                    seen.add(h)
                    found.append(h)
                    changed = True
    return found


def ample_certificate(C: FinCat) -> LawReport:
    """Witness that the source map of a finite category is a local homeomorphism.

    Object spaces are discrete, so the singleton opens ``{f}`` cover the
    morphisms and the source map is injective on each of them with open
    image ``{src f}``: every morphism is the unique lift of itself there.
    """
    report = LawReport("ample-certificate")
    opens = [frozenset([f]) for f in range(C.morphisms)]
    report.check(frozenset().union(*opens) == frozenset(range(C.morphisms)), law="cover")
    for part in opens:
        report.check(len({C.src[g] for g in part}) == len(part), law="injective", open=sorted(part))
    return report


# -- retrofunctors ----------------------------------------------------------


@dataclass
class Retrofunctor:
    """``F0`` sends C-objects forward; ``F1[c, f]`` lifts a D-morphism out of ``F0 c``."""

    source: FinCat
    target: FinCat
    F0: tuple[int, ...]
    F1: dict

    def lift(self, c: int, f: int) -> int:
        return self.F1[c, f]

    def __eq__(self, other):
        return isinstance(other, Retrofunctor) and self.F0 == other.F0 and self.F1 == other.F1


def check_retrofunctor(F: Retrofunctor) -> LawReport:
    C, D = F.source, F.target
    report = LawReport("retrofunctor-laws")
    if len(F.F0) != C.objects or any(not 0 <= d < D.objects for d in F.F0):
        report.fail(law="object-map")
        return report
    for c in range(C.objects):
        for f in D.out(F.F0[c]):
            if (c, f) not in F.F1:
                report.fail(law="lift-total", object=c, morphism=f)
                continue
            lifted = F.F1[c, f]
            ok = 0 <= lifted < C.morphisms and C.src[lifted] == c
            report.check(ok, law="lift-source", object=c, morphism=f)
            if ok:
                report.check(F.F0[C.tgt[lifted]] == D.tgt[f], law="lift-target", object=c, morphism=f)
    if not report.passed:
        return report
    for c in range(C.objects):
        report.check(F.F1[c, D.ident[F.F0[c]]] == C.ident[c], law="identity", object=c)
        for f in D.out(F.F0[c]):
            first = F.F1[c, f]
            c2 = C.tgt[first]
            for g in D.out(D.tgt[f]):
                fg = D.comp.get((f, g))
                second = F.F1[c2, g]
                if fg is None or (first, second) not in C.comp:
                    report.skipped += 1
                    continue
                report.check(
                    F.F1[c, fg] == C.comp[first, second],
                    law="composition", object=c, pair=(f, g),
                )
    return report


def retro_id(C: FinCat) -> Retrofunctor:
    return Retrofunctor(C, C, tuple(range(C.objects)), {(c, f): f for c in range(C.objects) for f in C.out(c)})


def retro_compose(F: Retrofunctor, G: Retrofunctor) -> Retrofunctor:
    """``F: C ⇝ D`` followed by ``G: D ⇝ E``."""
    C, E = F.source, G.target
    F0 = tuple(G.F0[d] for d in F.F0)
    F1 = {(c, h): F.F1[c, G.F1[F.F0[c], h]] for c in range(C.objects) for h in E.out(F0[c])}
    return Retrofunctor(C, E, F0, F1)


def terminal_retrofunctor(C: FinCat) -> Retrofunctor:
    """The retrofunctor onto the one-object, one-morphism category."""
    T = discrete_category(1)
    return Retrofunctor(C, T, (0,) * C.objects, {(c, 0): C.ident[c] for c in range(C.objects)})
