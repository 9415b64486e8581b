import itertools

import pytest

from stonemonads.behaviour import (
    behaviour_category,
    behaviour_of,
    behaviours,
    minimize,
    run,
    trace_classes,
    trace_equiv,
    trace_free,
    trace_partitions,
)
from stonemonads.boolalg import distributions_monad
from stonemonads.comodel import canonical_comodel, flip_signature, state_comodel, stream_comodel
from stonemonads.errors import CategoryLawViolation, TheoryNotFree
from stonemonads.finmonad import Leaf, Node, StateMonad, free_term_monad, parse_term
from stonemonads.topcat import check_category

STREAMS = ["(0)", "(1)", "(01)", "(10)"]


@pytest.fixture(scope="module")
def flip3():
    return free_term_monad(flip_signature(), 3), stream_comodel(STREAMS)


def digits_read(W, m, w):
    # independent descent: follow the stream digits down the tree
    count = 0
    stream = []
    v = w
    for _ in range(m.depth + 1):
        d, v = W.coops["flip"][v]
        stream.append(d)
    while isinstance(m, Node):
        m = m.children[stream[count]]
        count += 1
    return count


def test_state_minimize_is_discrete():
    assert minimize(state_comodel(2)).blocks == (0, 1)


def test_run_and_traces(flip3):
    T, W = flip3
    beta = behaviour_of(W, 3)  # 1010...
    a, rest = run(beta, Node("flip", (Leaf(0), Leaf(1))), T)
    assert a == 1 and rest.state == 2  # 0101...
    assert run(beta, Leaf(0), T) == (0, beta)
    zero = behaviour_of(W, 0)
    assert trace_free(zero, Leaf(0), T) == []
    comb = parse_term("flip(flip(flip(0, 1), 1), 1)")
    assert trace_free(zero, comb, T) == ["flip"] * 3
    assert trace_free(zero, parse_term("flip(0, flip(0, 1))"), T) == ["flip"]


def test_trace_free_rejects_quotients():
    S = StateMonad(2)
    beta = behaviours(canonical_comodel(S))[0]
    with pytest.raises(TheoryNotFree):
        trace_free(beta, Leaf(0), S)


def test_state_trace_equivalence_is_pointwise():
    S = StateMonad(2)
    W = canonical_comodel(S)
    T1 = S.carrier(1)
    for beta in behaviours(W):
        s = beta.state
        for m, n in itertools.product(T1, repeat=2):
            assert trace_equiv(S, beta, m, n) == (m[s] == n[s])


def test_flip_closure_matches_trace_strings(flip3):
    T, W = flip3
    closure = trace_partitions(T, W, range(W.states), method="closure")
    strings = trace_partitions(T, W, range(W.states), method="trace")
    assert closure == strings


def test_flip_classes_are_trace_lengths(flip3):
    T, W = flip3
    T1 = T.carrier(1)
    for w in range(W.states):
        labels = trace_partitions(T, W, [w])[w]
        lengths = [digits_read(W, m, w) for m in T1]
        for i, j in itertools.combinations(range(len(T1)), 2):
            assert (labels[i] == labels[j]) == (lengths[i] == lengths[j])
        assert sorted(set(lengths)) == [0, 1, 2, 3]


def test_trace_equiv_reflexive(flip3):
    T, W = flip3
    for beta in behaviours(W):
        for m in T.carrier(1):
            assert trace_equiv(T, beta, m, m)


def test_state_behaviour_category_is_chaotic():
    S = StateMonad(2)
    bc = behaviour_category(S, canonical_comodel(S))
    C = bc.category
    assert (C.objects, C.morphisms) == (2, 4)
    for c, d in itertools.product(range(2), repeat=2):
        assert len(C.hom(c, d)) == 1
    assert check_category(C).passed


def test_state3_behaviour_category():
    S = StateMonad(3)
    C = behaviour_category(S, canonical_comodel(S)).category
    assert (C.objects, C.morphisms) == (3, 9)
    assert all(len(C.hom(c, d)) == 1 for c in range(3) for d in range(3))


def test_state_composition_follows_skip():
    S = StateMonad(2)
    bc = behaviour_category(S, canonical_comodel(S))
    C = bc.category
    for f, g in C.composable_pairs():
        m, n = bc.representative(f), bc.representative(g)
        o = C.src[f]
        assert C.compose(f, g) == bc.class_of(o, S.bind(m, [n]))


def test_flip_behaviour_category(flip3):
    T, W = flip3
    with pytest.raises(CategoryLawViolation):
        behaviour_category(T, W)
    bc = behaviour_category(T, W, allow_truncation=True)
    C = bc.category
    assert C.truncated
    assert C.objects == 4
    assert [len(C.out(c)) for c in range(4)] == [4, 4, 4, 4]
    assert bc.bound_tag() == {"max_a": 2, "method": "trace", "truncated": True}


def test_distributions_behaviour_category_is_discrete():
    D = distributions_monad(3)
    C = behaviour_category(D, canonical_comodel(D)).category
    assert (C.objects, C.morphisms) == (3, 3)
    assert all(C.ident[C.src[f]] == f for f in range(C.morphisms))


def test_trace_classes_counts():
    S = StateMonad(2)
    W = canonical_comodel(S)
    for beta in behaviours(W):
        tc = trace_classes(S, beta)
        assert tc.count == 2
        assert tc.method == "closure"
