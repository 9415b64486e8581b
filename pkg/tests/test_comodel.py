import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stonemonads.behaviour import minimize
from stonemonads.boolalg import distributions_monad
from stonemonads.comodel import (
    Comodel,
    canonical_comodel,
    check_comodel,
    check_comodel_morphism,
    cointerpret,
    enumerate_comodels,
    flip_signature,
    operational_algebra,
    stabilization_depth,
    state_comodel,
    stream_comodel,
    term_shapes,
)
from stonemonads.errors import SearchSpaceTooLarge
from stonemonads.finmonad import Leaf, Node, Signature, StateMonad, interpret, state_equations, state_signature

FLIP = flip_signature()
STREAMS = ["(0)", "(1)", "(01)", "(10)"]


def test_leaf_runs_to_itself():
    W = state_comodel(3)
    for w in range(3):
        assert cointerpret(W, Leaf(2), w) == (2, w)


def test_stream_comodel_reads_digits():
    W = stream_comodel(STREAMS)
    assert W.coops["flip"] == ((0, 0), (1, 1), (0, 3), (1, 2))
    flip = Node("flip", (Leaf(0), Leaf(1)))
    assert W.run(flip, 3) == (1, 2)  # 1010... -> digit 1, rest 0101...


def test_stream_comodel_closes_under_tails():
    W = stream_comodel(["01(1)"])
    assert W.labels is None or len(W.labels) == W.states
    # 01111..., 1111...
    assert W.states == 2


def test_state_runner_agrees_with_semantics():
    k = 2
    W = state_comodel(k)
    S = StateMonad(k)
    ops = {"get": S.get(), **{f"put{s}": S.put(s) for s in range(k)}}
    for t in term_shapes(state_signature(k), 2):
        n = 1 + max(_leaves(t))
        sem = interpret(S, t, ops, n)
        assert tuple(cointerpret(W, t, s) for s in range(k)) == sem


def _leaves(t):
    if isinstance(t, Leaf):
        return [t.value]
    return [v for c in t.children for v in _leaves(c)]


def test_state_runner_satisfies_state_equations():
    for k in (2, 3):
        assert check_comodel(state_comodel(k), state_equations(k)).passed


def test_commutative_theory_has_no_comodels():
    x, y = Leaf(0), Leaf(1)
    sig = Signature.of(("plus", 2))
    eqs = [(Node("plus", (x, y)), Node("plus", (y, x)))]
    assert enumerate_comodels(sig, eqs, 1) == []
    assert enumerate_comodels(sig, eqs, 2) == []
    assert len(enumerate_comodels(sig, eqs, 0)) == 1


def test_fail_theory_has_only_empty_comodel():
    sig = Signature.of(("fail", 0))
    assert enumerate_comodels(sig, [], 1) == []
    assert enumerate_comodels(sig, [], 2) == []
    assert len(enumerate_comodels(sig, [], 0)) == 1


def test_free_flip_one_state():
    assert len(enumerate_comodels(FLIP, [], 1)) == 2


def test_enumeration_guard():
    with pytest.raises(SearchSpaceTooLarge):
        enumerate_comodels(state_signature(3), [], 3, limit=1000)


def test_bad_table_rejected():
    with pytest.raises(ValueError):
        Comodel(1, FLIP, {"flip": ((2, 0),)})


def test_comodel_morphisms():
    W = stream_comodel(STREAMS)
    assert check_comodel_morphism(list(range(W.states)), W, W).passed
    mini = minimize(W)
    assert check_comodel_morphism(mini.projection, W, mini.quotient).passed
    # 0000... and 1111... swapped: outputs disagree
    swap = [1, 0, 2, 3]
    assert not check_comodel_morphism(swap, W, W).passed


def test_glued_copies_pair_up():
    base = stream_comodel(STREAMS)
    k = base.states
    table = base.coops["flip"] + tuple((r, n + k) for r, n in base.coops["flip"])
    W = Comodel(2 * k, FLIP, {"flip": table})
    mini = minimize(W)
    assert mini.size == k
    assert all(mini.blocks[w] == mini.blocks[w + k] for w in range(k))
    assert minimize(mini.quotient).size == mini.size


def test_operational_algebra_examples():
    W = state_comodel(2)
    assert operational_algebra(W, 0).atoms == (0b11,)
    assert sorted(operational_algebra(W, 1).atoms) == [0b01, 0b10]
    F = stream_comodel(STREAMS)
    assert len(operational_algebra(F, 1).atoms) == 2
    alg = operational_algebra(F, 2)
    assert len(alg.atoms) == 4
    assert alg.check().passed
    assert operational_algebra(F, 3).refines(operational_algebra(F, 1))
    assert stabilization_depth(F) == 2


def test_canonical_comodels():
    W = canonical_comodel(StateMonad(2))
    assert minimize(W).size == 2
    D = canonical_comodel(distributions_monad(3))
    assert D.states == 3 and minimize(D).size == 3
    for h in distributions_monad(3).carrier(2):
        for p in range(3):
            assert D.run(h, p)[1] == p  # transitions are identities


@st.composite
def flip_comodels(draw):
    k = draw(st.integers(1, 5))
    table = tuple((draw(st.integers(0, 1)), draw(st.integers(0, k - 1))) for _ in range(k))
    return Comodel(k, FLIP, {"flip": table})


def _digits(W, w, length):
    out = []
    for _ in range(length):
        d, w = W.coops["flip"][w]
        out.append(d)
    return tuple(out)


@settings(max_examples=150, deadline=None)
@given(flip_comodels())
def test_minimize_matches_stream_oracle(W):
    # a state is its stream; k states are told apart by prefixes of length k
    streams = [_digits(W, w, W.states) for w in range(W.states)]
    blocks = minimize(W).blocks
    for v in range(W.states):
        for w in range(W.states):
            assert (blocks[v] == blocks[w]) == (streams[v] == streams[w])
