"""Command-line front end.

Exit codes: 0 when every verdict passes, 1 when a verdict fails, 2 on bad
input.  ``--format json`` prints ``{"header", "result", "passed"}``.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

from . import __version__
from .behaviour import behaviour_category
from .boolalg import check_boolean_algebra, check_bset, distributions_monad
from .comodel import Comodel, canonical_comodel, check_comodel, empty_comodel, operational_algebra
from .duality import (
    counit,
    idempotence_check,
    lookahead_section,
    sections_fixture_reports,
    stone_roundtrip,
    triangle_behaviours,
    triangle_sections,
    unit,
)
from .errors import BoundExceeded, LawViolation, StoneError
from .finmonad import FinMonad, StateMonad, check_monad_laws, parse_term
from .io import (
    SpecError,
    Theory,
    algebra_from_json,
    bset_from_json,
    category_from_json,
    category_to_dot,
    category_to_json,
    comodel_from_json,
    plain,
    read_json,
    spec_kind,
    theory_from_json,
)
from .report import LawReport
from .sections import (
    GammaMonad,
    format_section,
    parse_scry_table,
    scry_eval,
    scry_factorization,
    scry_from_term,
    scry_table,
    scry_to_json,
)
from .topcat import FinCat, ample_certificate, chaotic_category, check_category, discrete_category, random_category


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    depth: int = 3
    max_arity: int = 2
    closure_depth: int = 3
    seed: int = 0
    fmt: str = "text"
    out: str | None = None
    jobs: int = 1
    cap: int = 2_000_000
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("depth", "max_arity", "closure_depth", "jobs", "cap"):
            if getattr(self, name) < 1:
                raise SpecError(f"--{name.replace('_', '-')} must be positive")

    def header(self) -> dict:
        return {
            "tool": "stonemonads",
            "version": __version__,
            "command": self.command,
            "inputs": self.inputs,
            "bounds": {"depth": self.depth, "max_arity": self.max_arity, "closure_depth": self.closure_depth, "cap": self.cap},
            "seed": self.seed,
            **({"options": self.extra} if self.extra else {}),
        }


@dataclass
class Outcome:
    passed: bool
    result: dict
    text: str
    dot: str | None = None


# -- resolving inputs -------------------------------------------------------


def resolve_category(ref: str, cfg: RunConfig) -> FinCat:
    """``discrete:N``, ``chaotic:N``, ``random:SEED`` or a category file."""
    kind, _, arg = ref.partition(":")
    if kind in ("discrete", "chaotic", "random") and arg:
        try:
            n = int(arg)
        except ValueError:
            raise SpecError(f"bad category reference {ref!r}") from None
        if kind == "discrete":
            return discrete_category(n)
        if kind == "chaotic":
            return chaotic_category(n)
        return random_category(n)
    data = read_json(ref)
    if spec_kind(data) != "category":
        raise SpecError(f"{ref} is not a category spec")
    C = category_from_json(data)
    check_category(C).require()
    return C


def resolve_monad(ref: str, cfg: RunConfig, comodel_ref: str | None) -> tuple[FinMonad, Comodel, Theory | None]:
    """``state:K``, ``dist:K`` or a theory file (with ``--comodel``)."""
    kind, _, arg = ref.partition(":")
    if kind in ("state", "dist") and arg:
        try:
            k = int(arg)
        except ValueError:
            raise SpecError(f"bad monad reference {ref!r}") from None
        T = StateMonad(k) if kind == "state" else distributions_monad(k)
        return T, canonical_comodel(T), None
    data = read_json(ref)
    if spec_kind(data) != "theory":
        raise SpecError(f"{ref} is not a theory spec")
    theory = theory_from_json(data)
    T = theory.monad(cfg.depth)
    if comodel_ref is None:
        W = empty_comodel(theory.signature)
    else:
        W = comodel_from_json(read_json(comodel_ref), theory.signature)
    return T, W, theory


# -- subcommands ------------------------------------------------------------


def cmd_check(cfg: RunConfig, args) -> Outcome:
    data = read_json(args.spec)
    kind = spec_kind(data)
    reports: list[LawReport] = []
    if kind == "theory":
        theory = theory_from_json(data)
        T = theory.monad(cfg.depth)
        reports.append(check_monad_laws(T, cfg.max_arity, cfg.max_arity, cfg.max_arity, cap=cfg.cap))
        if not T.is_free:
            reports.append(T.check_normalizer(cfg.max_arity))
        if args.comodel:
            W = comodel_from_json(read_json(args.comodel), theory.signature)
            reports.append(check_comodel(W, theory.equations))
    elif kind == "comodel":
        theory = theory_from_json(read_json(args.theory)) if args.theory else None
        W = comodel_from_json(data, theory.signature if theory else None)
        if theory is not None:
            reports.append(check_comodel(W, theory.equations))
        reports.append(operational_algebra(W, cfg.closure_depth).check())
    elif kind == "category":
        C = category_from_json(data)
        reports.append(check_category(C))
        if reports[0].passed:
            reports.append(ample_certificate(C))
    elif kind == "boolean":
        reports.append(check_boolean_algebra(algebra_from_json(data)))
    else:
        reports.append(check_bset(bset_from_json(data), cap=cfg.cap, seed=cfg.seed))
    passed = all(r.passed for r in reports)
    return Outcome(
        passed,
        {"kind": kind, "reports": [r.to_dict() for r in reports]},
        "\n".join(r.summary() for r in reports),
    )


def cmd_behaviour_cat(cfg: RunConfig, args) -> Outcome:
    T, W, _ = resolve_monad(args.monad, cfg, args.comodel)
    bc = behaviour_category(T, W, max_a=cfg.max_arity, allow_truncation=True)
    C = bc.category
    lines = [f"objects={C.objects}, morphisms={C.morphisms}" + (" (truncated)" if C.truncated else "")]
    for c in range(C.objects):
        name = C.object_labels[c] if C.object_labels else f"c{c}"
        lines.append(f"  {name}: {len(C.out(c))} outgoing")
    result = {"category": category_to_json(C), "bounds": bc.bound_tag(), "report": bc.report.to_dict()}
    return Outcome(bc.report.passed, result, "\n".join(lines), category_to_dot(C, "behaviour"))


def cmd_sections(cfg: RunConfig, args) -> Outcome:
    C = resolve_category(args.category, cfg)
    G = GammaMonad(C)
    secs = G.carrier(args.arity)
    lines = [f"{len(secs)} sections at arity {args.arity}"]
    if len(secs) <= args.show:
        lines += ["  " + format_section(s, C) for s in secs]
    result: dict = {"arity": args.arity, "count": len(secs), "sections": [list(map(list, s)) for s in secs[: args.show]]}
    passed = True
    if args.laws:
        r = check_monad_laws(G, cfg.max_arity, cfg.max_arity, cfg.max_arity, cap=cfg.cap)
        r.merge(sections_fixture_reports(C, cfg.max_arity))
        result["laws"] = r.to_dict()
        lines.append(r.summary())
        passed = r.passed
    return Outcome(passed, result, "\n".join(lines))


def _sizes(cfg: RunConfig) -> tuple[int, ...]:
    return tuple(range(cfg.max_arity + 1))


def cmd_duality(cfg: RunConfig, args) -> Outcome:
    what = args.construction
    if what == "stone":
        return cmd_stone(cfg, args)
    if what == "counit":
        eps = counit(resolve_category(args.target, cfg), cfg.max_arity)
        rep = eps.report
        text = (
            f"objects bijective: {rep.objects_bijective}, morphisms bijective: {rep.morphisms_bijective}, "
            f"{rep.laws.summary()}"
        )
        return Outcome(rep.passed, rep.to_dict(), text, category_to_dot(eps.behaviour.category, "counit-target"))
    if what == "triangle":
        if args.target.partition(":")[0] in ("state", "dist") or _is_theory(args.target):
            T, W, _ = resolve_monad(args.target, cfg, args.comodel)
            r = triangle_behaviours(T, W, cfg.max_arity)
        else:
            r = triangle_sections(resolve_category(args.target, cfg), _sizes(cfg), cfg.max_arity)
        return Outcome(r.passed, r.to_dict(), r.summary())
    T, W, _ = resolve_monad(args.target, cfg, args.comodel)
    if what == "idempotence":
        rep = idempotence_check(T, W, _sizes(cfg), max_a=cfg.max_arity, allow_truncation=True)
        text = f"categories match: {rep.categories_match}, second unit bijective: {rep.first_unit.bijective}"
        return Outcome(rep.passed, rep.to_dict(), text)
    bc = behaviour_category(T, W, max_a=cfg.max_arity, allow_truncation=True)
    eta, rep = unit(T, bc=bc, sizes=_sizes(cfg))
    result = rep.to_dict()
    lines = [
        f"|A|={n}: {v['domain']} -> {v['codomain']}, image {v['image']}, "
        f"injective={v['injective']}, surjective={v['surjective']}"
        for n, v in rep.sizes.items()
    ]
    if not rep.bijective and W.with_tables() and T.sig.ops:
        op = T.sig.ops[0].name
        s, k = lookahead_section(bc, op)
        in_image = any(eta(t, k) == s for t in T.carrier(k))
        result["lookahead"] = {"op": op, "arity": k, "section": list(map(list, s)), "in_image": in_image}
        lines.append(f"look-ahead section for {op}: {format_section(s, bc.category)}")
    lines.append(rep.laws.summary())
    return Outcome(rep.passed, result, "\n".join(lines))


def _is_theory(ref: str) -> bool:
    try:
        return spec_kind(read_json(ref)) == "theory"
    except SpecError:
        return False


def cmd_stone(cfg: RunConfig, args) -> Outcome:
    rep = stone_roundtrip(args.atoms, _sizes(cfg))
    return Outcome(rep.passed, rep.to_dict(), rep.summary())


def cmd_scry(cfg: RunConfig, args) -> Outcome:
    text = args.tree.strip()
    try:
        s = parse_scry_table(text) if text.startswith("{") else scry_from_term(parse_term(text))
    except ValueError as e:
        raise SpecError(str(e)) from None
    result: dict = {"table": scry_table(s), "tree": scry_to_json(s)}
    lines = [result["table"]]
    passed = True
    if args.eval is not None:
        try:
            consumed, out = scry_eval(s, [int(d) for d in args.eval])
        except ValueError as e:
            raise SpecError(str(e)) from None
        result["eval"] = {"prefix": args.eval, "consumed": consumed, "output": out}
        lines.append(f"on {args.eval}: consume {consumed}, output a{out}")
    if args.factor:
        holds = scry_factorization(s) == s
        result["factorization"] = holds
        lines.append(f"s = s̄ >>= λa. s ⊳ return a: {holds}")
        passed = holds
    return Outcome(passed, result, "\n".join(lines))


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=3, help="term depth bound for theory files")
    common.add_argument("--max-arity", type=int, default=2, help="largest value set |A| for closures and law checks")
    common.add_argument("--closure-depth", type=int, default=3, help="term depth for the operational topology")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=2_000_000, help="instance cap for law checks")
    common.add_argument("--format", choices=("text", "json", "dot"), default="text")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="accepted for compatibility; runs are single-threaded")

    p = argparse.ArgumentParser(prog="stonemonads", description="Finite Stone duality for monads.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="run the law suite for a spec file")
    c.add_argument("spec")
    c.add_argument("--comodel", help="comodel spec to check against a theory")
    c.add_argument("--theory", help="theory spec for a comodel")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("behaviour-cat", parents=[common], help="build a behaviour category")
    b.add_argument("monad", help="state:K, dist:K or a theory file")
    b.add_argument("--comodel")
    b.set_defaults(func=cmd_behaviour_cat)

    s = sub.add_parser("sections", parents=[common], help="enumerate global sections of a category")
    s.add_argument("category", help="discrete:N, chaotic:N, random:SEED or a category file")
    s.add_argument("--arity", type=int, default=2)
    s.add_argument("--laws", action="store_true", help="also check monad laws and hyperaffine structure")
    s.add_argument("--show", type=int, default=64, help="list at most this many sections")
    s.set_defaults(func=cmd_sections)

    d = sub.add_parser("duality", parents=[common], help="unit, counit, triangles, idempotence, stone")
    d.add_argument("construction", choices=("unit", "counit", "triangle", "idempotence", "stone"))
    d.add_argument("target", nargs="?", default="", help="monad or category reference")
    d.add_argument("--comodel")
    d.add_argument("--atoms", type=int, default=2)
    d.set_defaults(func=cmd_duality)

    sc = sub.add_parser("scry", parents=[common], help="assignment table of a flip term or tree")
    sc.add_argument("tree", help="a binary term like b(a0,b(a1,a2)) or a table {0 -> (1,a0); 1 -> (1,a1)}")
    sc.add_argument("--eval", help="a binary prefix to run the section on")
    sc.add_argument("--factor", action="store_true", help="check the hyperaffine factorization")
    sc.set_defaults(func=cmd_scry)

    st = sub.add_parser("stone", parents=[common], help="classical Stone duality round trip")
    st.add_argument("--atoms", type=int, default=2)
    st.set_defaults(func=cmd_stone)
    return p


def render(cfg: RunConfig, outcome: Outcome) -> str:
    if cfg.fmt == "json":
        doc = {"header": cfg.header(), "result": plain(outcome.result), "passed": outcome.passed}
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if cfg.fmt == "dot":
        if outcome.dot is None:
            raise SpecError(f"{cfg.command} has no DOT output")
        return outcome.dot
    verdict = "PASS" if outcome.passed else "FAIL"
    return f"{outcome.text}\n{verdict}\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func: Callable[[RunConfig, Any], Outcome] = args.func
    try:
        cfg = RunConfig(
            args.command, [v for v in (getattr(args, k, None) for k in ("spec", "monad", "category", "target", "tree")) if v],
            depth=args.depth, max_arity=args.max_arity, closure_depth=args.closure_depth,
            seed=args.seed, fmt=args.format, out=args.out, jobs=args.jobs, cap=args.cap,
        )
        random.seed(cfg.seed)
        if args.command == "duality":
            cfg.extra["construction"] = args.construction
            if args.construction == "stone":
                cfg.extra["atoms"] = args.atoms
            elif not args.target:
                raise SpecError(f"duality {args.construction} needs a target")
        if args.command == "stone":
            cfg.extra["atoms"] = args.atoms
        outcome = func(cfg, args)
        text = render(cfg, outcome)
    except SpecError as e:
        print(f"stonemonads: error: {e}", file=sys.stderr)
        return 2
    except LawViolation as e:
        print(f"stonemonads: verdict failed: {e}", file=sys.stderr)
        return 1
    except (BoundExceeded, StoneError) as e:
        print(f"stonemonads: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if outcome.passed else 1


if __name__ == "__main__":
    sys.exit(main())
