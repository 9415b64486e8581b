import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stonemonads.comodel import flip_signature
from stonemonads.finmonad import (
    Leaf,
    Node,
    StateMonad,
    check_monad_laws,
    check_monad_map,
    free_term_monad,
    identity_map,
    maps_agree,
    parse_term,
    skip,
)
from stonemonads.sections import (
    GammaMonad,
    ScryLeaf,
    ScryNode,
    gamma_retro,
    is_reduced,
    max_consume,
    parse_scry_table,
    prefixes,
    random_scry_tree,
    scry_agree,
    scry_bind,
    scry_eval,
    scry_factorization,
    scry_from_json,
    scry_from_term,
    scry_hyperaffine_part,
    scry_ret,
    scry_table,
    scry_to_json,
    term_of,
    tree_depth,
)
from stonemonads.topcat import chaotic_category, discrete_category, random_category, retro_compose, retro_id, terminal_retrofunctor

WORKED_TERM = "b(a0, b(b(a1, a2), a3))"
WORKED_TABLE = "{0 ↦ (1, a0); 100 ↦ (3, a1); 101 ↦ (3, a2); 11 ↦ (2, a3)}"
LOOKAHEAD = "{0 ↦ (0, a0); 10 ↦ (1, a1); 11 ↦ (1, a2)}"


def test_gamma_carrier_sizes():
    assert len(GammaMonad(chaotic_category(2)).carrier(2)) == 16 == len(StateMonad(2).carrier(2))
    assert len(GammaMonad(discrete_category(3)).carrier(2)) == 8


@pytest.mark.parametrize(
    "C", [chaotic_category(2), discrete_category(3), chaotic_category(1)], ids=["chaotic2", "discrete3", "chaotic1"]
)
def test_gamma_laws_exhaustive(C):
    report = check_monad_laws(GammaMonad(C), 2, 2, 2)
    assert report.passed and not report.partial


@pytest.mark.parametrize("seed", range(10))
def test_gamma_laws_random(seed):
    report = check_monad_laws(GammaMonad(random_category(seed)), 2, 2, 2, cap=150_000)
    assert report.passed


def test_gamma_retro_identity_and_contravariance():
    C = chaotic_category(2)
    assert maps_agree(gamma_retro(retro_id(C)), identity_map(GammaMonad(C)), (0, 1, 2)).passed
    F = terminal_retrofunctor(C)
    G = terminal_retrofunctor(F.target)
    composite = gamma_retro(retro_compose(F, G))
    stepwise = gamma_retro(G).then(gamma_retro(F))
    assert maps_agree(composite, stepwise, (0, 1, 2)).passed


def test_collapse_induces_return():
    C = chaotic_category(2)
    g = gamma_retro(terminal_retrofunctor(C))
    assert check_monad_map(g).passed
    G = GammaMonad(C)
    for a in range(2):
        assert g(((a, 0),), 2) == G.ret(a, 2)


def test_gamma_retro_preserves_structure_on_random():
    for seed in range(6):
        C = random_category(seed)
        assert check_monad_map(gamma_retro(terminal_retrofunctor(C)), 2, 2).passed
        assert check_monad_map(gamma_retro(retro_id(C)), 1, 2).passed


# -- scrying trees ----------------------------------------------------------


def test_worked_table():
    s = scry_from_term(parse_term(WORKED_TERM))
    assert scry_table(s) == WORKED_TABLE
    assert scry_eval(s, [1, 0, 1]) == (3, 2)
    assert parse_scry_table(WORKED_TABLE) == s


def test_small_trees():
    assert scry_from_term(Leaf(3)) == ScryLeaf(0, 3)
    assert scry_from_term(parse_term("flip(1, 1)")) == ScryLeaf(1, 1)
    assert scry_eval(ScryLeaf(0, 2), [1, 1, 0]) == (0, 2)


def test_lookahead_factorization():
    s = parse_scry_table(LOOKAHEAD)
    assert scry_factorization(s) == s
    assert term_of(s) is None
    assert scry_hyperaffine_part(scry_ret(1)) == scry_ret(1)
    hp = scry_hyperaffine_part(scry_from_term(parse_term(WORKED_TERM)))
    assert all(leaf.consume == 0 for _, leaf in _leaves(hp))


def _leaves(s, path=""):
    if isinstance(s, ScryLeaf):
        return [(path, s)]
    return _leaves(s.left, path + "0") + _leaves(s.right, path + "1")


def test_lookahead_then_flip_consumes_one_more():
    s = parse_scry_table(LOOKAHEAD)
    bound = scry_bind(s, lambda a: scry_from_term(Node("flip", (Leaf(a), Leaf(a)))))
    for p in prefixes(3):
        n, a = scry_eval(s, p)
        assert scry_eval(bound, p) == (n + 1, a)


def test_scry_skip_matches_term_skip():
    T = free_term_monad(flip_signature(), 3)
    t = parse_term("flip(0, flip(flip(1, 2), 3))")
    for a in range(2):
        direct = scry_from_term(skip(T, t, T.ret(a, 2), 4))
        assert direct == scry_bind(scry_from_term(t), lambda _, a=a: scry_ret(a))


def hand_bind(s, u, p):
    n, a = scry_eval(s, p)
    m, b = scry_eval(u[a], p[n:])
    return n + m, b


def test_bind_units():
    s = scry_from_term(parse_term(WORKED_TERM))
    assert scry_bind(s, [scry_ret(a) for a in range(4)]) == s
    u = [s, scry_ret(0)]
    assert scry_bind(scry_ret(0), u) == s


trees = st.integers(0, 10_000).map(lambda seed: random_scry_tree(random.Random(seed), 3, outputs=2, consume=3))


@settings(max_examples=200, deadline=None)
@given(trees, trees, trees)
def test_bind_matches_hand_oracle(s, u0, u1):
    u = [u0, u1]
    b = scry_bind(s, u)
    assert is_reduced(b)
    length = max(tree_depth(s), max_consume(s) + max(tree_depth(u0), tree_depth(u1)))
    for p in prefixes(length):
        assert scry_eval(b, p) == hand_bind(s, u, p)


@settings(max_examples=100, deadline=None)
@given(trees, trees, trees, trees)
def test_bind_associative(s, u0, u1, v0):
    u, v = [u0, u1], [v0, v0]
    assert scry_agree(scry_bind(scry_bind(s, u), v), scry_bind(s, [scry_bind(x, v) for x in u]))


def test_factorization_random_suite():
    rng = random.Random(2024)
    for _ in range(200):
        s = random_scry_tree(rng, 4)
        assert scry_factorization(s) == s


def flip_terms(depth):
    level = [Leaf(0), Leaf(1)]
    for _ in range(depth):
        level = [Leaf(0), Leaf(1)] + [Node("flip", p) for p in itertools.product(level, repeat=2)]
    return level


def test_term_sections_match_descent():
    for t in flip_terms(2):
        s = scry_from_term(t)
        assert term_of(s) is not None
        assert scry_from_term(term_of(s)) == s
        for p in prefixes(t.depth):
            m, k = t, 0
            while isinstance(m, Node):
                m, k = m.children[p[k]], k + 1
            assert scry_eval(s, p) == (k, m.value)


def test_json_round_trip():
    rng = random.Random(5)
    for _ in range(50):
        s = random_scry_tree(rng, 4, outputs=3)
        assert scry_from_json(scry_to_json(s)) == s
        assert parse_scry_table(scry_table(s)) == s


def test_table_parsing_errors():
    with pytest.raises(ValueError):
        parse_scry_table("{0 ↦ (1, a0)}")
    with pytest.raises(ValueError):
        parse_scry_table("0 -> (1, a0)")
    assert parse_scry_table("{ε -> (2, a1)}") == ScryLeaf(2, 1)
    assert isinstance(parse_scry_table("{0 -> (0,a0); 1 |-> (0,a1)}"), ScryNode)
