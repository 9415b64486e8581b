"""Global sections of finite categories, and scrying trees.

A section of ``C`` with values in ``n`` picks, at every object ``c``, an
output ``a < n`` and a morphism ``f`` out of ``c``.  These form a monad:
``ret a`` is ``(a, id_c)`` everywhere, and ``bind`` follows ``f`` to its
target and continues with the section chosen there.

For the Cantor space of binary streams (the behaviours of a single binary
operation) sections with finite information are finite prefix trees.  A
leaf ``(n, a)`` says "consume ``n`` digits in total and output ``a``"; a
leaf may sit deeper than ``n``, which is a section that looks ahead at
digits it does not consume.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .finmonad import FinMonad, Leaf, MonadMap, Node, Term
from .topcat import FinCat, Retrofunctor


class GammaMonad(FinMonad):
    def __init__(self, category: FinCat, name: str | None = None):
        super().__init__()
        self.category = category
        self.name = name or f"gamma[{category.objects}/{category.morphisms}]"

    def _enumerate(self, n):
        C = self.category
        per_object = [[(a, f) for a in range(n) for f in C.out(c)] for c in range(C.objects)]
        return itertools.product(*per_object)

    def ret(self, a, n):
        return tuple((a, i) for i in self.category.ident)

    def bind(self, s, u):
        C = self.category
        out = []
        for a, f in s:
            b, g = u[a][C.tgt[f]]
            out.append((b, C.compose(f, g)))
        return tuple(out)


def gamma(C: FinCat) -> GammaMonad:
    return GammaMonad(C)


def gamma_retro(F: Retrofunctor, source: GammaMonad | None = None, target: GammaMonad | None = None) -> MonadMap:
    """``Γ F: Γ D -> Γ C`` for ``F: C ⇝ D``.

    ``(Γ F)(s)(c) = (a, F1(c, f))`` where ``(a, f) = s(F0 c)``.
    """
    GD = source or GammaMonad(F.target)
    GC = target or GammaMonad(F.source)
    F0, F1 = F.F0, F.F1

    def component(s, n):
        out = []
        for c, d in enumerate(F0):
            a, f = s[d]
            out.append((a, F1[c, f]))
        return tuple(out)

    return MonadMap(GD, GC, component, name="gamma-retro")


def format_section(s, C: FinCat) -> str:
    obj = C.object_labels or tuple(f"c{c}" for c in range(C.objects))
    mor = C.morphism_labels or tuple(f"f{f}" for f in range(C.morphisms))
    return "{" + "; ".join(f"{obj[c]} ↦ ({a}, {mor[f]})" for c, (a, f) in enumerate(s)) + "}"


# -- scrying trees ----------------------------------------------------------


@dataclass(frozen=True)
class ScryLeaf:
    consume: int
    output: int


@dataclass(frozen=True)
class ScryNode:
    left: ScryTree
    right: ScryTree


ScryTree = Union[ScryLeaf, ScryNode]


def node(left: ScryTree, right: ScryTree) -> ScryTree:
    """Build a node, collapsing two equal leaves."""
    if isinstance(left, ScryLeaf) and left == right:
        return left
    return ScryNode(left, right)


def reduce_tree(s: ScryTree) -> ScryTree:
    if isinstance(s, ScryLeaf):
        return s
    return node(reduce_tree(s.left), reduce_tree(s.right))


def is_reduced(s: ScryTree) -> bool:
    if isinstance(s, ScryLeaf):
        return True
    if isinstance(s.left, ScryLeaf) and s.left == s.right:
        return False
    return is_reduced(s.left) and is_reduced(s.right)


def tree_depth(s: ScryTree) -> int:
    if isinstance(s, ScryLeaf):
        return 0
    return 1 + max(tree_depth(s.left), tree_depth(s.right))


def max_consume(s: ScryTree) -> int:
    if isinstance(s, ScryLeaf):
        return s.consume
    return max(max_consume(s.left), max_consume(s.right))


def scry_from_term(t: Term) -> ScryTree:
    """The section of a binary-operation term: leaves consume their depth."""

    def go(t, d):
        if isinstance(t, Leaf):
            return ScryLeaf(d, t.value)
        if len(t.children) != 2:
            raise ValueError(f"{t.op} is not binary")
        return node(go(t.children[0], d + 1), go(t.children[1], d + 1))

    return go(t, 0)


def scry_ret(a: int) -> ScryTree:
    return ScryLeaf(0, a)


def scry_eval(s: ScryTree, digits: Sequence[int]) -> tuple[int, int]:
    """``(digits consumed, output)`` on a stream with the given prefix."""
    k = 0
    while isinstance(s, ScryNode):
        if k >= len(digits):
            raise ValueError(f"prefix of length {len(digits)} is too short")
        s = s.right if digits[k] else s.left
        k += 1
    return s.consume, s.output


def scry_bind(s: ScryTree, u: Sequence[ScryTree] | Callable[[int], ScryTree]) -> ScryTree:
    """Run ``s``, then ``u(a)`` on the stream left after ``s`` consumed.

    The result branches on stream positions in order.  A continuation node
    at depth ``j`` below a leaf ``(n, a)`` inspects position ``n + j``:
    positions already read on the current path are resolved, later ones
    become branches (with an unread position in between giving two equal
    subtrees).
    """
    f = u if callable(u) else u.__getitem__

    def graft(tree, j, offset, path):
        while isinstance(tree, ScryNode) and offset + j < len(path):
            tree = tree.right if path[offset + j] else tree.left
            j += 1
        if isinstance(tree, ScryLeaf):
            return ScryLeaf(offset + tree.consume, tree.output)
        if offset + j == len(path):
            return node(graft(tree.left, j + 1, offset, path + (0,)), graft(tree.right, j + 1, offset, path + (1,)))
        # position len(path) is skipped over: both branches agree
        same = graft(tree, j, offset, path + (0,))
        return node(same, same)

    def over(tree, path):
        if isinstance(tree, ScryLeaf):
            return graft(f(tree.output), 0, tree.consume, path)
        return node(over(tree.left, path + (0,)), over(tree.right, path + (1,)))

    return over(s, ())


def scry_skip(s: ScryTree, t: ScryTree) -> ScryTree:
    """``s ⊳ t``."""
    return scry_bind(s, lambda a: t)


def scry_hyperaffine_part(s: ScryTree) -> ScryTree:
    """Same outputs, nothing consumed."""
    if isinstance(s, ScryLeaf):
        return ScryLeaf(0, s.output)
    return node(scry_hyperaffine_part(s.left), scry_hyperaffine_part(s.right))


def scry_factorization(s: ScryTree) -> ScryTree:
    """``s̄ >>= λa. s ⊳ ret a``; equals ``s`` for every section."""
    return scry_bind(scry_hyperaffine_part(s), lambda a: scry_skip(s, scry_ret(a)))


def leaves(s: ScryTree, path: str = "") -> list[tuple[str, ScryLeaf]]:
    if isinstance(s, ScryLeaf):
        return [(path, s)]
    return leaves(s.left, path + "0") + leaves(s.right, path + "1")


def scry_table(s: ScryTree, names: Sequence[str] | None = None) -> str:
    """Assignment-table notation, e.g. ``{0 ↦ (1, a0); 1 ↦ (1, a1)}``."""

    def name(a):
        return names[a] if names else f"a{a}"

    parts = [f"{p or 'ε'} ↦ ({leaf.consume}, {name(leaf.output)})" for p, leaf in leaves(s)]
    return "{" + "; ".join(parts) + "}"


_ENTRY = re.compile(r"^\s*([01]*|ε)\s*(?:↦|->|\|->)\s*\(\s*(\d+)\s*,\s*a?(\d+)\s*\)\s*$")


def parse_scry_table(text: str) -> ScryTree:
    """Inverse of :func:`scry_table` (``->`` is accepted for ``↦``)."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError("a table is written {path ↦ (n, a); ...}")
    entries = {}
    for item in body[1:-1].split(";"):
        m = _ENTRY.match(item)
        if not m:
            raise ValueError(f"cannot parse table entry {item!r}")
        path = "" if m.group(1) == "ε" else m.group(1)
        entries[path] = ScryLeaf(int(m.group(2)), int(m.group(3)))

    def build(prefix):
        if prefix in entries:
            return entries.pop(prefix)
        if not any(p.startswith(prefix) for p in entries):
            raise ValueError(f"paths do not cover the branch {prefix or 'ε'}")
        return ScryNode(build(prefix + "0"), build(prefix + "1"))

    tree = build("")
    if entries:
        raise ValueError(f"overlapping paths {sorted(entries)}")
    return tree


def scry_to_json(s: ScryTree):
    if isinstance(s, ScryLeaf):
        return {"leaf": [s.consume, s.output]}
    return {"node": [scry_to_json(s.left), scry_to_json(s.right)]}


def scry_from_json(data) -> ScryTree:
    if "leaf" in data:
        n, a = data["leaf"]
        return ScryLeaf(int(n), int(a))
    left, right = data["node"]
    return ScryNode(scry_from_json(left), scry_from_json(right))


def random_scry_tree(rng: random.Random, depth: int, outputs: int = 2, consume: int = 4) -> ScryTree:
    """A reduced random tree of height at most ``depth``."""
    if depth == 0 or rng.random() < 0.3:
        return ScryLeaf(rng.randrange(consume + 1), rng.randrange(outputs))
    return node(
        random_scry_tree(rng, depth - 1, outputs, consume),
        random_scry_tree(rng, depth - 1, outputs, consume),
    )


def prefixes(length: int):
    return itertools.product((0, 1), repeat=length)


def scry_agree(s: ScryTree, t: ScryTree) -> bool:
    """Extensional equality: agreement on every long enough prefix."""
    k = max(tree_depth(s), tree_depth(t))
    return all(scry_eval(s, p) == scry_eval(t, p) for p in prefixes(k))


def term_of(s: ScryTree) -> Term | None:
    """A flip term whose section is ``s``, if any (no scrying anywhere)."""

    def go(t, d):
        if isinstance(t, ScryLeaf):
            if t.consume < d:
                return None
            out: Term = Leaf(t.output)
            for _ in range(t.consume - d):
                out = Node("flip", (out, out))
            return out
        kids = (go(t.left, d + 1), go(t.right, d + 1))
        return None if None in kids else Node("flip", kids)

    return go(s, 0)
