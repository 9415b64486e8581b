"""Unit and counit of the behaviour/sections adjunction at finite scale.

``η_T: T -> Γ(𝔹T)`` sends a computation to the section
``β ↦ (β(t), [t ⊳ ret]_β)``.  ``ε_C: C ⇝ 𝔹(Γ C)`` sends an object to its
behaviour under the canonical runner of ``Γ C`` and lifts the class of a
section ``s`` at ``c`` to the morphism part of ``s(c)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .behaviour import BehaviourCategory, behaviour_category, refine
from .boolalg import FinBoolAlg, distributions_monad
from .comodel import Comodel, canonical_comodel
from .errors import BoundExceeded, BoundInsufficient, LawViolation, NoDecomposition, NonUnique
from .finmonad import FinMonad, Leaf, MonadMap, Node, TermMonad, check_monad_map, skip
from .report import LawReport
from .sections import GammaMonad, gamma_retro
from .topcat import FinCat, Retrofunctor, check_retrofunctor, retro_compose, retro_id

# -- hyperaffine computations -----------------------------------------------


def is_affine(T: FinMonad, h, n: int) -> bool:
    """``h ⊳ ret a = ret a`` (checked in ``T1`` and at every ``a < n``)."""
    try:
        if skip(T, h, T.ret(0, 1), n) != T.ret(0, 1):
            return False
        return all(skip(T, h, T.ret(a, n), n) == T.ret(a, n) for a in range(n))
    except BoundExceeded:
        return False


def duplicates(T: FinMonad, h, n: int) -> bool:
    """Running ``h`` twice yields the same value twice."""
    nn = n * n
    try:
        twice = T.bind(h, [T.bind(h, [T.ret(a1 * n + a2, nn) for a2 in range(n)]) for a1 in range(n)])
        diagonal = T.bind(h, [T.ret(a * n + a, nn) for a in range(n)])
    except BoundExceeded:
        return False
    return twice == diagonal


def is_hyperaffine(T: FinMonad, h, n: int) -> bool:
    return is_affine(T, h, n) and duplicates(T, h, n)


def hyperaffines(T: FinMonad, n: int) -> list:
    return [h for h in T.carrier(n) if is_hyperaffine(T, h, n)]


@dataclass
class Decomposition:
    hbar: object
    family: list

    def rebuild(self, T: FinMonad):
        return T.bind(self.hbar, self.family)


def hyperaffine_decompose(T: FinMonad, t, n: int, candidates: Sequence | None = None) -> Decomposition:
    """The unique hyperaffine ``h`` with ``t = h >>= λa. t ⊳ ret a``."""
    try:
        family = [skip(T, t, T.ret(a, n), n) for a in range(n)]
    except BoundExceeded:
        raise NoDecomposition(f"{t} ⊳ ret leaves the bounded universe") from None
    found = []
    for h in hyperaffines(T, n) if candidates is None else candidates:
        try:
            if T.bind(h, family) == t:
                found.append(h)
        except BoundExceeded:
            continue
    if not found:
        raise NoDecomposition(f"no hyperaffine factor for {t}")
    if len(found) > 1:
        raise NonUnique(len(found))
    return Decomposition(found[0], family)


def is_hyperaffine_unary(T: FinMonad, max_a: int = 2) -> LawReport:
    report = LawReport(f"hyperaffine-unary[{T.name}]")
    for n in range(max_a + 1):
        hs = hyperaffines(T, n)
        for t in T.carrier(n):
            try:
                hyperaffine_decompose(T, t, n, hs)
                report.ok()
            except NoDecomposition:
                report.fail(law="exists", t=t, n=n)
            except NonUnique as e:
                report.fail(law="unique", t=t, n=n, count=e.count)
    return report


def affine_implies_hyperaffine(T: FinMonad, max_a: int = 2) -> LawReport:
    report = LawReport(f"affine-hyperaffine[{T.name}]")
    for n in range(max_a + 1):
        for h in T.carrier(n):
            if is_affine(T, h, n):
                report.check(duplicates(T, h, n), h=h, n=n)
    return report


@dataclass
class H2Algebra:
    """Hyperaffine binary predicates with the Boolean operations they carry."""

    monad: FinMonad
    elements: list
    top: object
    bottom: object
    report: LawReport

    def meet(self, h1, h2):
        T = self.monad
        return T.bind(h1, [T.ret(0, 2), h2])

    def neg(self, h):
        T = self.monad
        return T.bind(h, [T.ret(1, 2), T.ret(0, 2)])

    def join(self, h1, h2):
        return self.neg(self.meet(self.neg(h1), self.neg(h2)))

    def leq(self, h1, h2) -> bool:
        return self.meet(h1, h2) == h1

    def atoms(self) -> list:
        return [
            h for h in self.elements
            if h != self.bottom and not any(g not in (self.bottom, h) and self.leq(g, h) for g in self.elements)
        ]

    def as_finboolalg(self) -> FinBoolAlg:
        return FinBoolAlg(len(self.atoms()))


def h2_boolean_algebra(T: FinMonad, partition_arity: int = 3) -> H2Algebra:
    """``⊤ = ret 1``, ``h1 ∧ h2 = h1 >>= (0 ↦ ret 0; 1 ↦ h2)``, ``¬`` swaps."""
    H = hyperaffines(T, 2)
    alg = H2Algebra(T, H, T.ret(1, 2), T.ret(0, 2), LawReport(f"h2[{T.name}]"))
    r = alg.report
    hs = set(H)
    r.check(alg.top in hs and alg.bottom in hs, law="bounds")
    for x in H:
        r.check(alg.neg(x) in hs, law="neg-closed", x=x)
        r.check(alg.neg(alg.neg(x)) == x, law="double-negation", x=x)
        r.check(alg.meet(x, alg.neg(x)) == alg.bottom, law="complement-meet", x=x)
        r.check(alg.join(x, alg.neg(x)) == alg.top, law="complement-join", x=x)
        r.check(alg.meet(x, alg.top) == x and alg.join(x, alg.bottom) == x, law="identity", x=x)
        r.check(alg.meet(x, x) == x and alg.join(x, x) == x, law="idempotent", x=x)
        for y in H:
            m, j = alg.meet(x, y), alg.join(x, y)
            r.check(m in hs and j in hs, law="closed", x=x, y=y)
            r.check(m == alg.meet(y, x) and j == alg.join(y, x), law="commutative", x=x, y=y)
            r.check(alg.meet(x, alg.join(x, y)) == x and alg.join(x, alg.meet(x, y)) == x, law="absorption", x=x, y=y)
            r.check(alg.neg(m) == alg.join(alg.neg(x), alg.neg(y)), law="de-morgan-meet", x=x, y=y)
            r.check(alg.neg(j) == alg.meet(alg.neg(x), alg.neg(y)), law="de-morgan-join", x=x, y=y)
            for z in H:
                r.check(alg.meet(m, z) == alg.meet(x, alg.meet(y, z)), law="associative", x=x, y=y, z=z)
                r.check(
                    alg.meet(x, alg.join(y, z)) == alg.join(m, alg.meet(x, z)),
                    law="distributive", x=x, y=y, z=z,
                )
    atoms = alg.atoms()
    r.check(len(H) == 2 ** len(atoms), law="atomic-size", size=len(H), atoms=len(atoms))
    for n in range(2, partition_arity + 1):
        for h in hyperaffines(T, n):
            pieces = [T.bind(h, [T.ret(int(x == a), 2) for x in range(n)]) for a in range(n)]
            total = alg.bottom
            for i, p in enumerate(pieces):
                r.check(p in hs, law="piece-hyperaffine", h=h, a=i)
                total = alg.join(total, p)
                for q in pieces[i + 1:]:
                    r.check(alg.meet(p, q) == alg.bottom, law="pieces-disjoint", h=h)
            r.check(total == alg.top, law="pieces-cover", h=h)
    r.details.update({"size": len(H), "atoms": len(atoms)})
    return alg


# -- the unit ---------------------------------------------------------------


@dataclass
class UnitReport:
    monad: str
    comodel: str
    sizes: dict = field(default_factory=dict)
    laws: LawReport | None = None
    missing: list = field(default_factory=list)

    @property
    def bijective(self) -> bool:
        return all(v["injective"] and v["surjective"] for v in self.sizes.values())

    @property
    def passed(self) -> bool:
        return self.bijective and (self.laws is None or self.laws.passed)

    def to_dict(self) -> dict:
        return {
            "monad": self.monad,
            "comodel": self.comodel,
            "sizes": {str(k): v for k, v in self.sizes.items()},
            "bijective": self.bijective,
            "laws": None if self.laws is None else self.laws.to_dict(),
            "missing": self.missing,
        }


def unit_map(T: FinMonad, bc: BehaviourCategory, target: GammaMonad | None = None) -> MonadMap:
    G = target or GammaMonad(bc.category)
    W = bc.comodel
    reps = bc.minimization.representatives
    one = T.ret(0, 1)

    def component(t, n):
        unary = skip(T, t, one, n)
        return tuple((W.run(t, r)[0], bc.class_of(o, unary)) for o, r in enumerate(reps))

    return MonadMap(T, G, component, name="unit")


def unit(
    T: FinMonad,
    W: Comodel | None = None,
    sizes: Sequence[int] = (0, 1, 2),
    bc: BehaviourCategory | None = None,
    law_sizes: tuple[int, int] = (2, 2),
    law_cap: int = 300_000,
    **bounds,
) -> tuple[MonadMap, UnitReport]:
    """``η_T`` with injectivity and surjectivity verdicts per size."""
    if bc is None:
        bc = behaviour_category(T, W if W is not None else canonical_comodel(T), **bounds)
    eta = unit_map(T, bc)
    G = eta.target
    report = UnitReport(T.name, bc.comodel.name)
    for n in sizes:
        image: dict = {}
        collisions = []
        for t in T.carrier(n):
            s = eta(t, n)
            if s in image and len(collisions) < 5:
                collisions.append([str(image[s]), str(t)])
            image.setdefault(s, t)
        codomain = G.carrier(n)
        outside = [s for s in codomain if s not in image]
        report.sizes[n] = {
            "domain": len(T.carrier(n)),
            "codomain": len(codomain),
            "image": len(image),
            "injective": len(image) == len(T.carrier(n)),
            "surjective": not outside,
            "collisions": collisions,
        }
        report.missing.extend([n, list(map(list, s))] for s in outside[:3])
    report.laws = check_monad_map(eta, *law_sizes, cap=law_cap)
    return eta, report


def lookahead_section(bc: BehaviourCategory, op: str) -> tuple:
    """``β ↦ (β(σ), id_β)``: predicts the answer of ``σ`` without running it.

    Returns ``(section, arity)``.  For a free theory no computation has
    this section as its image under the unit.
    """
    W = bc.comodel
    k = W.signature.arity(op)
    probe = Node(op, tuple(Leaf(i) for i in range(k)))
    s = tuple((W.run(probe, r)[0], bc.category.ident[o]) for o, r in enumerate(bc.minimization.representatives))
    return s, k


# -- the counit -------------------------------------------------------------


@dataclass
class CounitReport:
    objects: int
    morphisms: int
    max_a: int
    objects_bijective: bool = False
    morphisms_bijective: bool = False
    laws: LawReport | None = None
    escalated: bool = False

    @property
    def passed(self) -> bool:
        return self.objects_bijective and self.morphisms_bijective and self.laws is not None and self.laws.passed

    def to_dict(self) -> dict:
        return {
            "objects": self.objects,
            "morphisms": self.morphisms,
            "max_a": self.max_a,
            "objects_bijective": self.objects_bijective,
            "morphisms_bijective": self.morphisms_bijective,
            "escalated": self.escalated,
            "laws": None if self.laws is None else self.laws.to_dict(),
            "passed": self.passed,
        }


@dataclass
class Counit:
    retrofunctor: Retrofunctor
    gamma: GammaMonad
    comodel: Comodel
    behaviour: BehaviourCategory
    report: CounitReport


def counit(C: FinCat, max_a: int = 2, escalate: bool = True) -> Counit:
    """``ε_C: C ⇝ 𝔹(Γ C)``, escalating the closure bound once if needed."""
    try:
        return _counit(C, max_a)
    except BoundInsufficient:
        if not escalate:
            raise
        out = _counit(C, max_a + 1)
        out.report.escalated = True
        return out


def _counit(C: FinCat, max_a: int) -> Counit:
    G = GammaMonad(C)
    W = canonical_comodel(G)
    bc = behaviour_category(G, W, max_a=max_a)
    B = bc.category
    report = CounitReport(C.objects, C.morphisms, max_a)
    F0 = tuple(bc.minimization.blocks[c] for c in range(C.objects))
    report.objects_bijective = sorted(F0) == list(range(B.objects))
    F1 = {}
    morphism_ok = report.objects_bijective
    for c in range(C.objects):
        o = F0[c]
        lifts = set()
        for k in B.out(o):
            parts = {s[c][1] for s in G.carrier(1) if bc.class_of(o, s) == k}
            if len(parts) != 1:
                r = LawReport("counit-lift", violation_count=1)
                raise BoundInsufficient(r, f"trace class {k} at object {c} spans morphisms {sorted(parts)}")
            (f,) = parts
            F1[c, k] = f
            lifts.add(f)
        morphism_ok &= len(lifts) == len(B.out(o)) == len(C.out(c))
    report.morphisms_bijective = morphism_ok and B.morphisms == C.morphisms
    eps = Retrofunctor(C, B, F0, F1)
    report.laws = check_retrofunctor(eps)
    return Counit(eps, G, W, bc, report)


# -- behaviour functor on monad maps ---------------------------------------


def _probe_computations(T: FinMonad, W: Comodel, arity: int = 2) -> list[tuple[object, int]]:
    if isinstance(T, TermMonad):
        return [(Node(op.name, tuple(Leaf(i) for i in range(op.arity))), op.arity) for op in T.sig.ops]
    return [(t, n) for n in range(1, arity + 1) for t in T.carrier(n)]


def behaviour_functor_on_maps(
    gamma: MonadMap, bc_source: BehaviourCategory, bc_target: BehaviourCategory
) -> tuple[Retrofunctor, LawReport]:
    """``𝔹γ: 𝔹S ⇝ 𝔹T`` for ``γ: T -> S``.

    ``bc_source`` is the behaviour category of ``T`` and ``bc_target`` that
    of ``S``.  Objects go by ``β ↦ β ∘ γ`` (matched against the behaviours
    of the ``T`` comodel) and ``[m]`` lifts to ``[γ(m)]``.
    """
    T = gamma.source
    WT, WS = bc_source.comodel, bc_target.comodel
    probes = _probe_computations(T, WT)
    images = [(t, n, gamma(t, n)) for t, n in probes]
    k = WT.states

    def observe(w):
        if w < k:
            return [WT.run(t, w) for t, _, _ in images]
        out = []
        for _, _, g in images:
            a, nxt = WS.run(g, w - k)
            out.append((a, nxt + k))
        return out

    joint = refine(k + WS.states, observe)
    report = LawReport("behaviour-functor")
    F0 = []
    for o, r in enumerate(bc_target.minimization.representatives):
        matches = [v for v in range(k) if joint[v] == joint[k + r]]
        if not matches:
            report.fail(law="object-image", object=o)
            raise LawViolation(report, f"behaviour {o} of the target has no counterpart")
        F0.append(bc_source.minimization.blocks[matches[0]])
    F1 = {}
    BT = bc_source.category
    for o, d in enumerate(F0):
        for f in BT.out(d):
            m = bc_source.representative(f)
            F1[o, f] = bc_target.class_of(o, gamma(m, 1))
    F = Retrofunctor(bc_target.category, BT, tuple(F0), F1)
    report.merge(check_retrofunctor(F))
    return F, report


# -- triangle identities, Stone round trip, idempotence ---------------------


def triangle_sections(C: FinCat, sizes: Sequence[int] = (0, 1, 2), max_a: int = 2) -> LawReport:
    """``Γ(ε_C) ∘ η_{Γ C} = id`` on ``Γ C (A)``."""
    eps = counit(C, max_a)
    G = eps.gamma
    eta = unit_map(G, eps.behaviour)
    back = gamma_retro(eps.retrofunctor, source=eta.target, target=G)
    report = LawReport("triangle-sections")
    for n in sizes:
        for s in G.carrier(n):
            report.check(back(eta(s, n), n) == s, n=n, section=s)
    report.merge(eps.report.laws)
    return report


def triangle_behaviours(T: FinMonad, W: Comodel, max_a: int = 2) -> LawReport:
    """``𝔹(η_T) ∘ ε_{𝔹T} = id`` as retrofunctors on ``𝔹T``."""
    bc = behaviour_category(T, W, max_a=max_a)
    C = bc.category
    eps = counit(C, max_a)
    eta = unit_map(T, bc, target=eps.gamma)
    b_eta, report = behaviour_functor_on_maps(eta, bc, eps.behaviour)
    composite = retro_compose(eps.retrofunctor, b_eta)
    report.name = "triangle-behaviours"
    report.check(composite == retro_id(C), law="identity")
    return report


def triangle_identities(C: FinCat | None = None, T: FinMonad | None = None, W: Comodel | None = None, **kw) -> LawReport:
    report = LawReport("triangle-identities")
    if C is not None:
        report.merge(triangle_sections(C, **kw))
    if T is not None:
        report.merge(triangle_behaviours(T, W if W is not None else canonical_comodel(T)))
    return report


@dataclass
class StoneReport:
    atoms: int
    objects: int
    identities_only: bool
    unit: UnitReport

    @property
    def passed(self) -> bool:
        return self.objects == self.atoms and self.identities_only and self.unit.passed

    def summary(self) -> str:
        ident = "identities only" if self.identities_only else "non-identity morphisms"
        verdict = "unit bijective" if self.unit.bijective else "unit NOT bijective"
        return f"objects={self.objects}, {ident}, {verdict}"

    def to_dict(self) -> dict:
        return {
            "atoms": self.atoms,
            "objects": self.objects,
            "identities_only": self.identities_only,
            "unit": self.unit.to_dict(),
            "passed": self.passed,
        }


def stone_roundtrip(atoms: int, sizes: Sequence[int] = (0, 1, 2)) -> StoneReport:
    T = distributions_monad(FinBoolAlg(atoms))
    W = canonical_comodel(T)
    bc = behaviour_category(T, W)
    C = bc.category
    identities = C.morphisms == C.objects and all(C.ident[C.src[f]] == f for f in range(C.morphisms))
    _, ur = unit(T, bc=bc, sizes=sizes)
    return StoneReport(atoms, C.objects, identities, ur)


@dataclass
class IdempotenceReport:
    sizes: dict
    first_unit: UnitReport
    categories_match: bool

    @property
    def passed(self) -> bool:
        return self.first_unit.passed and self.categories_match

    def to_dict(self) -> dict:
        return {
            "sizes": {str(k): v for k, v in self.sizes.items()},
            "unit": self.first_unit.to_dict(),
            "categories_match": self.categories_match,
            "passed": self.passed,
        }


def idempotence_check(T: FinMonad, W: Comodel, sizes: Sequence[int] = (0, 1, 2), **bounds) -> IdempotenceReport:
    """``M1 = Γ𝔹T`` and ``M2 = Γ𝔹M1``: the unit of ``M1`` is a bijection."""
    bc1 = behaviour_category(T, W, **bounds)
    M1 = GammaMonad(bc1.category)
    W1 = canonical_comodel(M1)
    bc2 = behaviour_category(M1, W1)
    M2 = GammaMonad(bc2.category)
    _, ur = unit(M1, bc=bc2, sizes=sizes)
    counts = {
        n: {"T": len(T.carrier(n)), "M1": len(M1.carrier(n)), "M2": len(M2.carrier(n))}
        for n in sizes
    }
    C1, C2 = bc1.category, bc2.category
    match = (C1.objects, C1.morphisms) == (C2.objects, C2.morphisms)
    return IdempotenceReport(counts, ur, match)


def is_terminal_monad(T: FinMonad, sizes: Sequence[int] = (0, 1, 2, 3)) -> bool:
    return all(len(T.carrier(n)) == 1 for n in sizes)


def degenerate_collapse(T: FinMonad, sig, equations, max_size: int = 2) -> dict:
    """No nonempty comodel up to ``max_size`` states, hence ``Γ𝔹T`` is terminal."""
    from .comodel import empty_comodel, enumerate_comodels

    found = {size: len(enumerate_comodels(sig, equations, size)) for size in range(1, max_size + 1)}
    idem = idempotence_check(T, empty_comodel(sig))
    bc = behaviour_category(T, empty_comodel(sig))
    M1 = GammaMonad(bc.category)
    W1 = canonical_comodel(M1)
    M2 = GammaMonad(behaviour_category(M1, W1).category)
    return {
        "comodels": found,
        "no_comodels": not any(found.values()),
        "first_terminal": is_terminal_monad(M1),
        "second_terminal": is_terminal_monad(M2),
        "idempotent": idem.passed,
    }


def sections_fixture_reports(C: FinCat, max_a: int = 2) -> LawReport:
    """Unique decomposition and affine-implies-hyperaffine in ``Γ C``."""
    G = GammaMonad(C)
    report = is_hyperaffine_unary(G, max_a)
    report.merge(affine_implies_hyperaffine(G, max_a))
    for n in range(max_a + 1):
        hs = hyperaffines(G, n)
        for h in hs:
            report.check(all(f == C.ident[c] for c, (_, f) in enumerate(h)), law="identity-transitions", h=h)
    return report
