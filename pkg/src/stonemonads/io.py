"""JSON file formats and DOT export."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .boolalg import BSet, FinBoolAlg
from .comodel import Comodel, stream_comodel
from .errors import NormalizerUnsound
from .finmonad import (
    Leaf,
    Node,
    Signature,
    Term,
    TermMonad,
    check_term,
    commutative_normalizer,
    fail_normalizer,
    free_term_monad,
    quotient_term_monad,
    state_normalizer,
)
from .topcat import FinCat


class SpecError(ValueError):
    """A spec file is malformed."""


def read_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}: invalid JSON ({e})") from None
    except OSError as e:
        raise SpecError(f"{path}: {e.strerror}") from None


def plain(value: Any) -> Any:
    """Tuples to lists, keys to strings: the exact shape JSON gives back."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    return str(value)


def _keys(data: dict, allowed: set[str], what: str) -> None:
    if not isinstance(data, dict):
        raise SpecError(f"{what} spec must be a JSON object")
    extra = set(data) - allowed
    if extra:
        raise SpecError(f"unknown keys in {what} spec: {sorted(extra)}")


# -- terms and theories -----------------------------------------------------


def term_to_json(t: Term) -> dict:
    if isinstance(t, Leaf):
        return {"leaf": t.value}
    return {"op": t.op, "children": [term_to_json(c) for c in t.children]}


def term_from_json(data: Any) -> Term:
    if isinstance(data, dict) and set(data) == {"leaf"} and isinstance(data["leaf"], int):
        return Leaf(data["leaf"])
    if (
        isinstance(data, dict)
        and set(data) <= {"op", "children"}
        and isinstance(data.get("op"), str)
        and isinstance(data.get("children", []), list)
    ):
        return Node(data["op"], tuple(term_from_json(c) for c in data.get("children", [])))
    raise SpecError(f"not a term: {data!r}")


def _state_normalizer(sig: Signature):
    if "get" not in sig:
        raise SpecError("the state normalizer needs a get operation")
    return state_normalizer(sig.arity("get"))


# each entry builds a normalizer for the theory's signature
NORMALIZERS = {
    "none": lambda sig: None,
    "commutative": lambda sig: commutative_normalizer(),
    "fail": lambda sig: fail_normalizer,
    "state": _state_normalizer,
}


@dataclass
class Theory:
    signature: Signature
    equations: list[tuple[Term, Term]]
    normalizer: str = "none"

    def monad(self, depth: int) -> TermMonad:
        norm = NORMALIZERS[self.normalizer](self.signature)
        if norm is None:
            return free_term_monad(self.signature, depth)
        try:
            return quotient_term_monad(self.signature, self.equations, norm, depth)
        except NormalizerUnsound as e:
            raise SpecError(f"normalizer {self.normalizer!r} does not decide these equations: {e}") from None

    def to_json(self) -> dict:
        return {
            "ops": [{"name": op.name, "arity": op.arity} for op in self.signature.ops],
            "equations": [[term_to_json(a), term_to_json(b)] for a, b in self.equations],
            "normalizer": self.normalizer,
        }


def theory_from_json(data: Any) -> Theory:
    _keys(data, {"ops", "equations", "normalizer"}, "theory")
    try:
        sig = Signature.of(*((op["name"], int(op["arity"])) for op in data["ops"]))
    except (KeyError, TypeError) as e:
        raise SpecError(f"bad operation list: {e}") from None
    except ValueError as e:
        raise SpecError(str(e)) from None
    eqs = []
    for pair in data.get("equations", []):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SpecError("each equation is a pair [lhs, rhs]")
        lhs, rhs = term_from_json(pair[0]), term_from_json(pair[1])
        for side in (lhs, rhs):
            try:
                check_term(side, sig)
            except ValueError as e:
                raise SpecError(str(e)) from None
        eqs.append((lhs, rhs))
    norm = data.get("normalizer", "none")
    if norm not in NORMALIZERS:
        raise SpecError(f"unknown normalizer {norm!r}")
    return Theory(sig, eqs, norm)


# -- comodels ---------------------------------------------------------------


def comodel_from_json(data: Any, sig: Signature | None = None) -> Comodel:
    """``{"states": k, "coops": {op: [[result, next], ...]}}`` or ``{"streams": [...]}``."""
    _keys(data, {"states", "coops", "labels", "streams"}, "comodel")
    if "streams" in data:
        return stream_comodel(data["streams"])
    try:
        k = int(data["states"])
        coops = {name: tuple((int(r), int(n)) for r, n in rows) for name, rows in data["coops"].items()}
    except (KeyError, TypeError, ValueError) as e:
        raise SpecError(f"bad comodel spec: {e}") from None
    if sig is None:
        sig = Signature.of(*((name, 1 + max((r for r, _ in rows), default=0)) for name, rows in coops.items()))
    missing = set(sig.names()) - set(coops)
    if missing:
        raise SpecError(f"no coop table for {sorted(missing)}")
    labels = tuple(data["labels"]) if "labels" in data else None
    try:
        return Comodel(k, sig, {op: coops[op] for op in sig.names()}, labels=labels)
    except ValueError as e:
        raise SpecError(str(e)) from None


def comodel_to_json(W: Comodel) -> dict:
    out = {"states": W.states, "coops": {op: [list(p) for p in rows] for op, rows in W.coops.items()}}
    if W.labels:
        out["labels"] = list(W.labels)
    return out


# -- categories -------------------------------------------------------------


def category_to_json(C: FinCat) -> dict:
    out = {
        "objects": C.objects,
        "morphisms": [{"src": s, "tgt": t} for s, t in zip(C.src, C.tgt)],
        "identities": list(C.ident),
        "comp": [[f, g, h] for (f, g), h in sorted(C.comp.items())],
    }
    if C.truncated:
        out["truncated"] = True
    if C.object_labels:
        out["object_labels"] = list(C.object_labels)
    if C.morphism_labels:
        out["morphism_labels"] = list(C.morphism_labels)
    return out


def category_from_json(data: Any) -> FinCat:
    _keys(data, {"objects", "morphisms", "identities", "comp", "truncated", "object_labels", "morphism_labels"}, "category")
    try:
        n = int(data["objects"])
        src = tuple(int(m["src"]) for m in data["morphisms"])
        tgt = tuple(int(m["tgt"]) for m in data["morphisms"])
        ident = tuple(int(i) for i in data["identities"])
        comp = {(int(f), int(g)): int(h) for f, g, h in data["comp"]}
    except (KeyError, TypeError, ValueError) as e:
        raise SpecError(f"bad category spec: {e}") from None
    ol = tuple(data["object_labels"]) if "object_labels" in data else None
    ml = tuple(data["morphism_labels"]) if "morphism_labels" in data else None
    return FinCat(n, src, tgt, ident, comp, bool(data.get("truncated", False)), ol, ml)


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def category_to_dot(C: FinCat, name: str = "C") -> str:
    """Objects as nodes, every morphism (identities included) as an edge."""
    obj = C.object_labels or tuple(f"c{c}" for c in range(C.objects))
    mor = C.morphism_labels or tuple(f"f{f}" for f in range(C.morphisms))
    lines = [f"digraph {_dot_quote(name)} {{"]
    for c in range(C.objects):
        lines.append(f"  n{c} [label={_dot_quote(obj[c])}];")
    for f in range(C.morphisms):
        style = ", style=dashed" if C.ident[C.src[f]] == f else ""
        lines.append(f"  n{C.src[f]} -> n{C.tgt[f]} [label={_dot_quote(mor[f])}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- Boolean algebras and B-sets --------------------------------------------


def bset_to_json(X: BSet) -> dict:
    equiv = {}
    for b, labels in X.equivalences().items():
        blocks: dict[int, list[int]] = {}
        for x, c in enumerate(labels):
            blocks.setdefault(c, []).append(x)
        equiv[str(b)] = list(blocks.values())
    return {"atoms": X.algebra.atom_count, "carrier": X.size, "equiv": equiv}


def bset_from_json(data: Any) -> BSet:
    _keys(data, {"atoms", "carrier", "equiv"}, "B-set")
    try:
        B = FinBoolAlg(int(data["atoms"]))
        k = int(data["carrier"])
        equiv = {}
        for key, blocks in data["equiv"].items():
            labels = [-1] * k
            for i, blk in enumerate(blocks):
                for x in blk:
                    labels[int(x)] = i
            if -1 in labels:
                raise SpecError(f"relation for {key} does not cover the carrier")
            equiv[int(key)] = labels
        return BSet.from_equivalences(B, k, equiv)
    except (KeyError, TypeError, IndexError) as e:
        raise SpecError(f"bad B-set spec: {e}") from None
    except ValueError as e:
        raise SpecError(str(e)) from None


def algebra_from_json(data: Any) -> FinBoolAlg:
    _keys(data, {"atoms"}, "Boolean algebra")
    try:
        n = int(data["atoms"])
    except (TypeError, ValueError) as e:
        raise SpecError(str(e)) from None
    if n < 0:
        raise SpecError("atom count must be non-negative")
    return FinBoolAlg(n)


def spec_kind(data: Any) -> str:
    if not isinstance(data, dict):
        raise SpecError("a spec file holds a JSON object")
    if "ops" in data:
        return "theory"
    if "coops" in data or "streams" in data:
        return "comodel"
    if "morphisms" in data:
        return "category"
    if "equiv" in data:
        return "bset"
    if "atoms" in data:
        return "boolean"
    raise SpecError("cannot tell what kind of spec this is")
