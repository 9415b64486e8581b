import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stonemonads.boolalg import distributions_monad
from stonemonads.errors import DepthExceeded, NormalizerUnsound
from stonemonads.finmonad import (
    Leaf,
    MonadMap,
    Node,
    Signature,
    StateMonad,
    check_monad_laws,
    check_monad_map,
    commutative_normalizer,
    free_term_monad,
    identity_map,
    interpret,
    parse_term,
    quotient_term_monad,
    skip,
    state_equations,
    state_normalizer,
    state_signature,
)

FLIP = Signature.of(("flip", 2))


def brute_trees(arity: int, leaves: int, depth: int) -> int:
    # number of trees of height <= depth, one binary op
    count = leaves
    for _ in range(depth):
        count = leaves + count**arity
    return count


@pytest.mark.parametrize("n,depth", [(1, 1), (2, 1), (1, 2), (2, 2), (1, 3)])
def test_free_carrier_counts(n, depth):
    T = free_term_monad(FLIP, depth)
    assert len(T.carrier(n)) == brute_trees(2, n, depth)


def test_free_flip_depth1_has_six_terms():
    assert len(free_term_monad(FLIP, 1).carrier(2)) == 6


def test_flip_skip_flip_is_complete_tree():
    T = free_term_monad(FLIP, 2)
    flip1 = Node("flip", (Leaf(0), Leaf(0)))
    assert skip(T, flip1, flip1, 1) == parse_term("flip(flip(0, 0), flip(0, 0))")


def test_bind_past_depth_raises():
    T = free_term_monad(FLIP, 1)
    flip1 = Node("flip", (Leaf(0), Leaf(0)))
    with pytest.raises(DepthExceeded):
        skip(T, flip1, flip1, 1)


def test_commutative_normal_form_and_count():
    norm = commutative_normalizer()
    assert norm(Node("plus", (Leaf(1), Leaf(0)))) == Node("plus", (Leaf(0), Leaf(1)))
    x, y = Leaf(0), Leaf(1)
    sig = Signature.of(("plus", 2))
    T = quotient_term_monad(sig, [(Node("plus", (x, y)), Node("plus", (y, x)))], norm, 1)
    # 2 leaves + unordered pairs with repetition
    assert len(T.carrier(2)) == 2 + 3


def test_unsound_normalizer_rejected():
    x, y = Leaf(0), Leaf(1)
    sig = Signature.of(("plus", 2))
    with pytest.raises(NormalizerUnsound):
        quotient_term_monad(sig, [(Node("plus", (x, y)), Node("plus", (y, x)))], lambda t: t, 1)


@pytest.mark.parametrize("k,n", [(1, 1), (2, 1), (2, 2), (3, 2)])
def test_state_carrier_size(k, n):
    assert len(StateMonad(k).carrier(n)) == (n * k) ** k


def test_state_units():
    T = StateMonad(2)
    t = ((0, 1), (1, 0))  # emit the state, flip it
    assert T.bind(t, [T.ret(0, 2), T.ret(1, 2)]) == t
    u = [((1, 1), (0, 0)), ((0, 0), (1, 1))]
    assert T.bind(T.ret(1, 2), u) == u[1]


def test_state_skip_threads_state():
    T = StateMonad(2)
    put1 = T.put(1)
    get = T.get()
    # put1 then get reads 1 from every start state
    assert skip(T, put1, get, 1) == ((1, 1), (1, 1))


@pytest.mark.parametrize(
    "T",
    [StateMonad(1), StateMonad(2), distributions_monad(1), distributions_monad(2), free_term_monad(FLIP, 1)],
    ids=lambda T: T.name,
)
def test_builtin_monad_laws(T):
    report = check_monad_laws(T, 2, 2, 2)
    assert report.passed, report.summary()
    assert report.checks > 0


def test_free_monad_laws_small():
    report = check_monad_laws(free_term_monad(FLIP, 2), 1, 1, 1)
    assert report.passed and not report.partial


class MisthreadedState(StateMonad):
    """Reads the continuation at the initial state instead of the threaded one."""

    def bind(self, t, u):
        return tuple((u[a][i][0], u[a][s][1]) for i, (a, s) in enumerate(t))


def test_corrupted_bind_breaks_associativity():
    report = check_monad_laws(MisthreadedState(2), 2, 2, 2)
    assert not report.passed
    assert "associativity" in {v["law"] for v in report.violations}


def test_state_normalizer_gives_state_monad():
    k = 2
    T = quotient_term_monad(state_signature(k), state_equations(k), state_normalizer(k), 2)
    S = StateMonad(k)
    for n in (1, 2):
        assert len(T.carrier(n)) == len(S.carrier(n))
    assert check_monad_laws(T, 1, 1, 1).passed


def test_state_equations_hold_semantically():
    k = 3
    S = StateMonad(k)
    ops = {"get": S.get(), **{f"put{s}": S.put(s) for s in range(k)}}
    for lhs, rhs in state_equations(k):
        n = 1 + max(v for side in (lhs, rhs) for v in _leaves(side))
        assert interpret(S, lhs, ops, n) == interpret(S, rhs, ops, n)


def _leaves(t):
    if isinstance(t, Leaf):
        return [t.value]
    return [v for c in t.children for v in _leaves(c)]


def test_monad_maps():
    T = StateMonad(2)
    assert check_monad_map(identity_map(T)).passed
    const = MonadMap(T, T, lambda t, n: T.ret(0, max(n, 1)), name="const")
    report = check_monad_map(const)
    assert not report.passed
    assert report.violations[0]["law"].startswith("ret")


def test_parse_term_round_trip():
    t = parse_term("b(a0, b(b(a1, a2), a3))")
    assert t == parse_term(str(t))
    assert t.depth == 3


terms = st.recursive(
    st.integers(0, 1).map(Leaf),
    lambda kids: st.tuples(kids, kids).map(lambda p: Node("flip", p)),
    max_leaves=6,
)


@settings(max_examples=150, deadline=None)
@given(terms)
def test_parse_print_inverse(t):
    assert parse_term(str(t)) == t


@settings(max_examples=100, deadline=None)
@given(terms, terms, terms)
def test_free_bind_associative(t, u0, u1):
    T = free_term_monad(FLIP, 30)
    v = [Leaf(1), Leaf(0)]
    left = T.bind(T.bind(t, [u0, u1]), v)
    right = T.bind(t, [T.bind(u0, v), T.bind(u1, v)])
    assert left == right


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.data())
def test_state_bind_associative(k, data):
    T = StateMonad(k)
    comp = st.tuples(*[st.tuples(st.integers(0, 1), st.integers(0, k - 1))] * k)
    t, u0, u1, v0, v1 = (data.draw(comp) for _ in range(5))
    v = [v0, v1]
    assert T.bind(T.bind(t, [u0, u1]), v) == T.bind(t, [T.bind(u0, v), T.bind(u1, v)])


def test_enumeration_is_stable():
    T = StateMonad(2)
    first = T.carrier(2)
    assert first == StateMonad(2).carrier(2)
    assert first[0] == ((0, 0), (0, 0))
    assert list(itertools.islice(T.index(2).values(), 3)) == [0, 1, 2]
