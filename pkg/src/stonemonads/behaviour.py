"""Behaviours, trace equivalence and behaviour categories of finite comodels.

Behaviours are computed relative to a given comodel: two states have the
same behaviour iff partition refinement cannot separate them.  Morphisms
out of a behaviour ``β`` are classes of unary computations ``m ∈ T1``
under the least equivalence relating ``bind(t, u)`` with
``t ⊳ u(β(t))``.  The closure ranges over ``t ∈ T n`` for ``n <= max_a``
and every answer records that bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from scipy.cluster.hierarchy import DisjointSet

from .comodel import Comodel
from .errors import BoundExceeded, CategoryLawViolation, DepthExceeded, TheoryNotFree
from .finmonad import FinMonad, Leaf, Node, Term, TermMonad, skip
from .report import LawReport
from .topcat import FinCat, check_category

DEFAULT_MAX_A = 2


# -- minimization -----------------------------------------------------------


@dataclass
class Minimization:
    blocks: tuple[int, ...]
    quotient: Comodel
    projection: tuple[int, ...]
    representatives: list[int]

    @property
    def size(self) -> int:
        return len(self.representatives)

    def members(self, block: int) -> list[int]:
        return [w for w, b in enumerate(self.blocks) if b == block]


def probes(W: Comodel, arity: int = 2) -> list:
    """Computations whose outputs and transitions determine behaviour."""
    if W.signature is not None:
        return [Node(op.name, tuple(Leaf(i) for i in range(op.arity))) for op in W.signature.ops]
    if W.monad is None:
        raise ValueError(f"{W.name} has neither tables nor a monad")
    return [t for n in range(1, arity + 1) for t in W.monad.carrier(n)]


def refine(states: int, observe: Callable[[int], Sequence[tuple[int, int]]]) -> tuple[int, ...]:
    """Coarsest partition stable under the observed outputs and successors.

    ``observe(w)`` lists ``(output, next state)`` pairs, one per probe.
    Blocks are numbered by their least state.
    """
    obs = [list(observe(w)) for w in range(states)]
    block = _number([tuple(a for a, _ in o) for o in obs])
    while True:
        keys = [(block[w], tuple(block[n] for _, n in obs[w])) for w in range(states)]
        nxt = _number(keys)
        if len(set(nxt)) == len(set(block)):
            return tuple(nxt)
        block = nxt


def _number(keys: Sequence) -> list[int]:
    ids: dict = {}
    return [ids.setdefault(k, len(ids)) for k in keys]


def minimize(W: Comodel, arity: int = 2) -> Minimization:
    ps = probes(W, arity) if W.states else []
    blocks = refine(W.states, lambda w: [W.run(t, w) for t in ps])
    count = len(set(blocks))
    reps = [blocks.index(b) for b in range(count)]
    if W.signature is not None:
        coops = {
            op: tuple((r, blocks[nxt]) for r, nxt in (table[rep] for rep in reps))
            for op, table in W.coops.items()
        }
        runner = None
    else:
        coops = {}

        def runner(t, b, _run=W.run):
            a, nxt = _run(t, reps[b])
            return a, blocks[nxt]

    labels = tuple(W.label(r) for r in reps)
    Q = Comodel(count, W.signature, coops, runner=runner, monad=W.monad, labels=labels, name=f"{W.name}/~")
    if W.signature is not None and W.runner is not None:
        Q.runner = lambda t, b, _run=W.run: (_run(t, reps[b])[0], blocks[_run(t, reps[b])[1]])
    return Minimization(blocks, Q, blocks, reps)


# -- behaviours -------------------------------------------------------------


@dataclass(frozen=True)
class Behaviour:
    comodel: Comodel = field(compare=False, hash=False)
    minimization: Minimization = field(compare=False, hash=False, repr=False)
    block: int = 0

    @property
    def state(self) -> int:
        return self.minimization.representatives[self.block]

    def observe(self, depth: int = 2) -> tuple:
        """Outputs of the probing computations up to ``depth``."""
        from .comodel import term_shapes

        W = self.comodel
        if W.signature is not None:
            ts = term_shapes(W.signature, depth)
        else:
            ts = [t for n in range(1, depth + 1) for t in W.monad.carrier(n)]
        return tuple(W.run(t, self.state)[0] for t in ts)


def behaviours(W: Comodel) -> list[Behaviour]:
    mini = minimize(W)
    return [Behaviour(W, mini, b) for b in range(mini.size)]


def behaviour_of(W: Comodel, w: int, mini: Minimization | None = None) -> Behaviour:
    mini = mini or minimize(W)
    return Behaviour(W, mini, mini.blocks[w])


def run(beta: Behaviour, t, T: FinMonad | None = None) -> tuple[int, Behaviour]:
    """``(β(t), ∂_t β)``."""
    if isinstance(T, TermMonad) and isinstance(t, (Leaf, Node)) and t.depth > T.depth:
        raise DepthExceeded(f"term of depth {t.depth} exceeds bound {T.depth}")
    a, w = beta.comodel.run(t, beta.state)
    return a, Behaviour(beta.comodel, beta.minimization, beta.minimization.blocks[w])


def trace_free(beta: Behaviour, m: Term, T: FinMonad | None = None) -> list[str]:
    """Operation names passed while running ``m`` at ``β``."""
    if T is not None and not (isinstance(T, TermMonad) and T.is_free):
        raise TheoryNotFree(f"{T!r} has equations; traces are not strings")
    W = beta.comodel
    if W.signature is None:
        raise TheoryNotFree("traces need a comodel given by operation tables")
    return _trace_string(W, m, beta.state)


def _trace_string(W: Comodel, m: Term, w: int) -> list[str]:
    out = []
    while isinstance(m, Node):
        out.append(m.op)
        r, w = W.coops[m.op][w]
        m = m.children[r]
    return out


# -- trace equivalence ------------------------------------------------------


def unary_universe(T: FinMonad) -> tuple:
    return T.carrier(1)


def _uses_strings(T: FinMonad, W: Comodel, method: str) -> bool:
    free = isinstance(T, TermMonad) and T.is_free and W.signature is not None
    if method == "trace":
        if not free:
            raise TheoryNotFree(f"{T!r} is not a free theory run by tables")
        return True
    if method == "closure":
        return False
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    return free


def seed_pairs(T: FinMonad, T1: Sequence, max_a: int) -> Iterator[tuple]:
    """Yield ``(t, n, u, bind(t, u), [t ⊳ u(a) for a])`` for ``t ∈ T n``, ``n <= max_a``.

    Entries of the skip list are ``None`` when they leave a bounded
    universe; instances whose bind leaves it are not yielded.  Free term
    monads are pruned: continuation choices that cannot fit under the
    depth bound, or that sit at values ``t`` never returns, are skipped.
    """
    prune = isinstance(T, TermMonad) and T.is_free
    for n in range(max_a + 1):
        for t in T.carrier(n):
            if prune:
                deep = _leaf_depths(t)
                choices = []
                for a in range(n):
                    if a not in deep:
                        choices.append(T1[:1])
                    else:
                        room = T.depth - deep[a]
                        choices.append([m for m in T1 if m.depth <= room])
            else:
                choices = [T1] * n
            skips_of: dict = {}
            for u in itertools.product(*choices):
                try:
                    bound = T.bind(t, u)
                except BoundExceeded:
                    continue
                skips = []
                for m in u:
                    if m not in skips_of:
                        try:
                            skips_of[m] = skip(T, t, m, n)
                        except BoundExceeded:
                            skips_of[m] = None
                    skips.append(skips_of[m])
                yield t, n, u, bound, skips


def _leaf_depths(t: Term, d: int = 0, out: dict | None = None) -> dict:
    """Deepest occurrence of each leaf value."""
    out = {} if out is None else out
    if isinstance(t, Leaf):
        out[t.value] = max(out.get(t.value, 0), d)
    else:
        for c in t.children:
            _leaf_depths(c, d + 1, out)
    return out


def trace_partitions(
    T: FinMonad, W: Comodel, states: Sequence[int], max_a: int = DEFAULT_MAX_A, method: str = "auto"
) -> dict[int, list[int]]:
    """Class label of each element of ``T1`` under ``∼`` at each given state."""
    T1 = unary_universe(T)
    states = list(states)
    if _uses_strings(T, W, method):
        return {w: _number([tuple(_trace_string(W, m, w)) for m in T1]) for w in states}
    pos = {m: i for i, m in enumerate(T1)}
    finds = {w: DisjointSet(range(len(T1))) for w in states}
    values: dict = {}
    for t, n, u, bound, skips in seed_pairs(T, T1, max_a):
        if t not in values:
            values[t] = [W.run(t, w)[0] for w in states]
        i = pos[bound]
        for w, a in zip(states, values[t]):
            s = skips[a]
            if s is not None:
                finds[w].merge(i, pos[s])
    return {w: _number([finds[w][i] for i in range(len(T1))]) for w in states}


@dataclass
class TraceClasses:
    behaviour: Behaviour
    labels: list[int]
    representatives: list[int]
    max_a: int
    method: str

    @property
    def count(self) -> int:
        return len(self.representatives)


def trace_classes(T: FinMonad, beta: Behaviour, max_a: int = DEFAULT_MAX_A, method: str = "auto") -> TraceClasses:
    labels = trace_partitions(T, beta.comodel, [beta.state], max_a, method)[beta.state]
    reps = [labels.index(k) for k in range(len(set(labels)))]
    used = "trace" if _uses_strings(T, beta.comodel, method) else "closure"
    return TraceClasses(beta, labels, reps, max_a, used)


def trace_equiv(T: FinMonad, beta: Behaviour, m, n, max_a: int = DEFAULT_MAX_A, method: str = "auto") -> bool:
    """``m ∼_β n``, exact for free theories and "at bound ``max_a``" otherwise."""
    pos = T.index(1)
    labels = trace_classes(T, beta, max_a, method).labels
    return labels[pos[m]] == labels[pos[n]]


# -- behaviour categories ---------------------------------------------------


@dataclass
class BehaviourCategory:
    category: FinCat
    monad: FinMonad
    comodel: Comodel
    minimization: Minimization
    unary: tuple
    labels: dict[int, list[int]]
    morphism_ids: dict[tuple[int, int], int]
    representatives: list[int]
    max_a: int
    method: str
    report: LawReport

    @property
    def objects(self) -> int:
        return self.category.objects

    def state(self, obj: int) -> int:
        return self.minimization.representatives[obj]

    def class_of(self, obj: int, m) -> int:
        """Morphism of the class of ``m ∈ T1`` at object ``obj``."""
        i = self.monad.index(1)[m]
        return self.morphism_ids[obj, self.labels[obj][i]]

    def representative(self, f: int):
        return self.unary[self.representatives[f]]

    def identity_class(self, obj: int) -> int:
        return self.category.ident[obj]

    def bound_tag(self) -> dict:
        return {"max_a": self.max_a, "method": self.method, "truncated": self.category.truncated}


def behaviour_category(
    T: FinMonad,
    W: Comodel,
    max_a: int = DEFAULT_MAX_A,
    method: str = "auto",
    allow_truncation: bool = False,
    verify: bool = True,
) -> BehaviourCategory:
    """Objects are behaviours of ``W``; morphisms are trace classes.

    Composition ``[m];[n] = [m ⊳ n]`` is computed on enumeration-least
    representatives; with ``verify`` every pair of class members is
    re-classified and a disagreement raises :class:`CategoryLawViolation`.
    Term monads may produce composites beyond their depth bound; these
    are left undefined when ``allow_truncation`` is set.
    """
    mini = minimize(W)
    reps = mini.representatives
    T1 = unary_universe(T)
    parts = trace_partitions(T, W, reps, max_a, method)
    used = "trace" if _uses_strings(T, W, method) else "closure"
    report = LawReport(f"behaviour-category[{T.name}]")
    labels = {o: parts[r] for o, r in enumerate(reps)}
    ids: dict[tuple[int, int], int] = {}
    src, tgt, rep_of = [], [], []
    members: dict[int, list[int]] = {}
    for o, r in enumerate(reps):
        lab = labels[o]
        for k in range(len(set(lab))):
            cls = [i for i, x in enumerate(lab) if x == k]
            f = len(src)
            ids[o, k] = f
            members[f] = cls
            targets = {mini.blocks[W.run(T1[i], r)[1]] for i in cls}
            if len(targets) != 1:
                report.fail(law="target-well-defined", object=o, representative=T1[cls[0]])
            src.append(o)
            tgt.append(min(targets))
            rep_of.append(cls[0])
    pos = T.index(1)
    ident = []
    for o in range(len(reps)):
        ident.append(ids[o, labels[o][pos[T.ret(0, 1)]]])

    comp: dict[tuple[int, int], int] = {}
    truncated = False
    for f in range(len(src)):
        o = src[f]
        for g in range(len(src)):
            if src[g] != tgt[f]:
                continue
            try:
                h = skip(T, T1[rep_of[f]], T1[rep_of[g]], 1)
            except BoundExceeded:
                if not allow_truncation:
                    raise CategoryLawViolation(
                        report, f"composite of morphisms {f};{g} leaves the bounded universe"
                    ) from None
                truncated = True
                continue
            comp[f, g] = ids[o, labels[o][pos[h]]]
            if verify:
                for i in members[f]:
                    for j in members[g]:
                        try:
                            h2 = skip(T, T1[i], T1[j], 1)
                        except BoundExceeded:
                            continue
                        report.check(
                            ids[o, labels[o][pos[h2]]] == comp[f, g],
                            law="composition-well-defined", pair=(T1[i], T1[j]),
                        )
    free = used == "trace"
    morph_labels = []
    for f in range(len(src)):
        m = T1[rep_of[f]]
        text = f"[{m}]"
        if free and isinstance(m, Node):
            text += " " + ".".join(_trace_string(W, m, reps[src[f]]))
        morph_labels.append(text)
    C = FinCat(
        len(reps), tuple(src), tuple(tgt), tuple(ident), comp, truncated,
        object_labels=mini.quotient.labels, morphism_labels=tuple(morph_labels),
    )
    report.merge(check_category(C))
    report.details.update({"max_a": max_a, "method": used, "truncated": truncated})
    if not report.passed:
        raise CategoryLawViolation(report)
    return BehaviourCategory(C, T, W, mini, T1, labels, ids, rep_of, max_a, used, report)
