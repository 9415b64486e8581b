import itertools
import random

import pytest

from stonemonads.topcat import (
    FinCat,
    Retrofunctor,
    ample_certificate,
    chaotic_category,
    check_category,
    check_retrofunctor,
    discrete_category,
    random_category,
    retro_compose,
    retro_id,
    terminal_retrofunctor,
)


def monoid(table):
    """One-object category from a multiplication table on ``range(len(table))``; 0 is the unit."""
    k = len(table)
    comp = {(f, g): table[f][g] for f in range(k) for g in range(k)}
    return FinCat(1, (0,) * k, (0,) * k, (0,), comp)


Z2 = monoid([[0, 1], [1, 0]])
IDEMPOTENT = monoid([[0, 1], [1, 1]])


def all_retrofunctors(C, D, limit=200):
    """Brute force: every object map with every well-typed lift table that passes the laws."""
    found = []
    for F0 in itertools.product(range(D.objects), repeat=C.objects):
        slots = [(c, f) for c in range(C.objects) for f in D.out(F0[c])]
        choices = [[g for g in C.out(c) if F0[C.tgt[g]] == D.tgt[f]] for c, f in slots]
        for pick in itertools.product(*choices):
            F = Retrofunctor(C, D, F0, dict(zip(slots, pick)))
            if check_retrofunctor(F).passed:
                found.append(F)
                if len(found) >= limit:
                    return found
    return found


def test_small_constructors():
    assert discrete_category(3).morphisms == 3
    C = chaotic_category(2)
    assert C.morphisms == 4
    assert all(len(C.hom(c, d)) == 1 for c in range(2) for d in range(2))
    for n in (1, 2, 3):
        assert check_category(chaotic_category(n)).passed
        assert check_category(discrete_category(n)).passed
    assert check_category(discrete_category(1)).passed


def test_wrong_unit_fails():
    C = chaotic_category(2)
    comp = dict(C.comp)
    comp[C.ident[0], 1] = 0
    bad = FinCat(C.objects, C.src, C.tgt, C.ident, comp)
    report = check_category(bad)
    assert not report.passed


def test_monoids():
    assert check_category(Z2).passed
    assert check_category(IDEMPOTENT).passed


def test_random_categories_respect_caps():
    for seed in range(100):
        C = random_category(seed)
        assert 1 <= C.objects <= 3
        assert C.morphisms <= 7
        assert check_category(C).passed, seed
        assert ample_certificate(C).passed


def test_random_category_is_seed_stable():
    a, b = random_category(11), random_category(11)
    assert (a.src, a.tgt, a.ident, a.comp) == (b.src, b.tgt, b.ident, b.comp)
    C = random_category(0)
    assert (C.objects, C.morphisms) == (2, 5)
    assert C.src == (0, 1, 0, 1, 0) and C.tgt == (0, 1, 1, 0, 0)


def test_identity_retrofunctor():
    for C in (chaotic_category(2), discrete_category(3), Z2, random_category(5)):
        assert check_retrofunctor(retro_id(C)).passed
        assert check_retrofunctor(terminal_retrofunctor(C)).passed


def test_lift_ignoring_composition_fails():
    # Z2 -> idempotent monoid, lifting p to the involution s
    F = Retrofunctor(Z2, IDEMPOTENT, (0,), {(0, 0): 0, (0, 1): 1})
    report = check_retrofunctor(F)
    assert not report.passed
    assert report.violations[0]["law"] == "composition"


def test_retro_compose_units():
    C, D = chaotic_category(2), chaotic_category(1)
    for F in all_retrofunctors(C, D):
        assert retro_compose(F, retro_id(D)) == F
        assert retro_compose(retro_id(C), F) == F


def test_retro_compose_associative_and_lawful():
    rng = random.Random(3)
    cats = [random_category(s) for s in range(8)] + [chaotic_category(2), discrete_category(2)]
    checked = 0
    for _ in range(60):
        A, B, C, D = (rng.choice(cats) for _ in range(4))
        fs, gs, hs = all_retrofunctors(A, B), all_retrofunctors(B, C), all_retrofunctors(C, D)
        if not (fs and gs and hs):
            continue
        F, G, H = rng.choice(fs), rng.choice(gs), rng.choice(hs)
        FG = retro_compose(F, G)
        assert check_retrofunctor(FG).passed
        assert retro_compose(FG, H) == retro_compose(F, retro_compose(G, H))
        checked += 1
    assert checked >= 20


@pytest.mark.parametrize("n", [1, 2, 3])
def test_chaotic_composition_by_endpoints(n):
    C = chaotic_category(n)
    for f, g in C.composable_pairs():
        h = C.compose(f, g)
        assert (C.src[h], C.tgt[h]) == (C.src[f], C.tgt[g])
