import pytest

from stonemonads.behaviour import behaviour_category
from stonemonads.boolalg import distributions_monad, value_at
from stonemonads.comodel import canonical_comodel, flip_signature, stream_comodel
from stonemonads.duality import (
    affine_implies_hyperaffine,
    behaviour_functor_on_maps,
    counit,
    degenerate_collapse,
    h2_boolean_algebra,
    hyperaffine_decompose,
    hyperaffines,
    idempotence_check,
    is_affine,
    is_hyperaffine,
    is_hyperaffine_unary,
    is_terminal_monad,
    lookahead_section,
    sections_fixture_reports,
    stone_roundtrip,
    triangle_behaviours,
    triangle_identities,
    unit,
    unit_map,
)
from stonemonads.errors import NoDecomposition
from stonemonads.finmonad import (
    Leaf,
    MonadMap,
    Node,
    Signature,
    StateMonad,
    TermMonad,
    check_monad_map,
    commutative_normalizer,
    fail_normalizer,
    free_term_monad,
    identity_map,
)
from stonemonads.sections import GammaMonad
from stonemonads.topcat import chaotic_category, discrete_category, random_category, retro_id

STREAMS = ["(0)", "(1)", "(01)", "(10)"]
FIXTURES = [chaotic_category(2), discrete_category(3), chaotic_category(1), random_category(0)]
FIXTURE_IDS = ["chaotic2", "discrete3", "chaotic1", "random0"]


@pytest.fixture(scope="module")
def flip_bc():
    T = free_term_monad(flip_signature(), 2)
    return T, behaviour_category(T, stream_comodel(STREAMS), allow_truncation=True)


def test_return_is_hyperaffine():
    for T in (StateMonad(2), distributions_monad(2), GammaMonad(chaotic_category(2))):
        for a in range(2):
            assert is_hyperaffine(T, T.ret(a, 2), 2)


def test_state_hyperaffines_are_read_only():
    S = StateMonad(2)
    hs = hyperaffines(S, 2)
    assert len(hs) == 4
    assert all(nxt == s for h in hs for s, (_, nxt) in enumerate(h))


def test_distributions_are_all_hyperaffine():
    D = distributions_monad(3)
    assert all(is_hyperaffine(D, h, 2) for h in D.carrier(2))


def test_writing_is_not_affine():
    S = StateMonad(2)
    assert not is_affine(S, ((0, 1), (0, 1)), 1)


def test_state_decomposition():
    S = StateMonad(2)
    swap = ((0, 1), (1, 0))  # answer the state, then flip it
    d = hyperaffine_decompose(S, swap, 2)
    assert d.hbar == ((0, 0), (1, 1))
    assert d.rebuild(S) == swap


def test_free_flip_has_no_decomposition():
    T = free_term_monad(flip_signature(), 1)
    with pytest.raises(NoDecomposition):
        hyperaffine_decompose(T, Node("flip", (Leaf(0), Leaf(1))), 2)


@pytest.mark.parametrize("C", FIXTURES, ids=FIXTURE_IDS)
def test_gamma_fixtures_decompose_uniquely(C):
    assert sections_fixture_reports(C).passed


def test_hyperaffine_unary_verdicts():
    assert is_hyperaffine_unary(StateMonad(2)).passed
    assert is_hyperaffine_unary(distributions_monad(2)).passed
    assert not is_hyperaffine_unary(free_term_monad(flip_signature(), 1)).passed
    assert affine_implies_hyperaffine(StateMonad(2)).passed


@pytest.mark.parametrize("k", [2, 3])
def test_h2_algebra(k):
    for T in (StateMonad(k), distributions_monad(k)):
        alg = h2_boolean_algebra(T)
        assert alg.report.passed
        assert len(alg.elements) == 2**k
        assert len(alg.atoms()) == k


def test_state_unit_bijective():
    for k in (2, 3):
        _, report = unit(StateMonad(k))
        assert report.passed
        assert report.sizes[2]["domain"] == report.sizes[2]["codomain"] == (2 * k) ** k


def test_distributions_unit():
    _, report = unit(distributions_monad(3))
    assert report.passed
    assert report.sizes[2]["codomain"] == 8


def test_flip_unit_misses_lookahead(flip_bc):
    T, bc = flip_bc
    eta = unit_map(T, bc)
    s, k = lookahead_section(bc, "flip")
    assert k == 2
    assert s == ((0, 0), (1, 3), (0, 6), (1, 9))
    assert all(eta(t, k) != s for t in T.carrier(k))
    _, report = unit(T, bc=bc, sizes=(1, 2), law_sizes=(1, 1))
    assert not report.sizes[2]["surjective"]
    assert (report.sizes[2]["image"], report.sizes[2]["codomain"]) == (38, 1296)


@pytest.mark.parametrize("C", [discrete_category(3), chaotic_category(2)], ids=["discrete3", "chaotic2"])
def test_counit_fixtures(C):
    eps = counit(C)
    assert eps.report.passed
    assert eps.behaviour.category.morphisms == C.morphisms


def test_counit_random():
    for seed in range(100):
        assert counit(random_category(seed)).report.passed, seed


@pytest.mark.parametrize("C", [chaotic_category(2), discrete_category(3)], ids=["chaotic2", "discrete3"])
def test_triangle_on_sections(C):
    assert triangle_identities(C).passed


def test_triangle_on_behaviours():
    for T in (StateMonad(2), distributions_monad(2)):
        assert triangle_behaviours(T, canonical_comodel(T)).passed


@pytest.mark.parametrize("atoms", [1, 2, 3, 4])
def test_stone_roundtrip(atoms):
    r = stone_roundtrip(atoms)
    assert r.passed
    assert r.summary() == f"objects={atoms}, identities only, unit bijective"
    assert r.unit.sizes[2]["domain"] == 2**atoms


def test_state_idempotent():
    S = StateMonad(2)
    r = idempotence_check(S, canonical_comodel(S))
    assert r.passed
    assert r.sizes[2] == {"T": 16, "M1": 16, "M2": 16}


def test_degenerate_theories_collapse():
    x, y = Leaf(0), Leaf(1)
    plus = Signature.of(("plus", 2))
    eqs = [(Node("plus", (x, y)), Node("plus", (y, x)))]
    fail = Signature.of(("fail", 0))
    cases = [
        (TermMonad(plus, 2, normalizer=commutative_normalizer(), equations=eqs), plus, eqs),
        (TermMonad(fail, 2, normalizer=fail_normalizer), fail, []),
    ]
    for T, sig, equations in cases:
        out = degenerate_collapse(T, sig, equations)
        assert out["no_comodels"] and out["first_terminal"] and out["second_terminal"] and out["idempotent"]
    assert is_terminal_monad(GammaMonad(discrete_category(0)))


def test_behaviour_functor_identity():
    S = StateMonad(2)
    bc = behaviour_category(S, canonical_comodel(S))
    F, report = behaviour_functor_on_maps(identity_map(S), bc, bc)
    assert report.passed
    assert F == retro_id(bc.category)


def test_read_only_inclusion_collapses_transitions():
    k = 2
    D, S = distributions_monad(k), StateMonad(k)
    incl = MonadMap(D, S, lambda h, n: tuple((value_at(h, s), s) for s in range(k)), name="read-only")
    assert check_monad_map(incl).passed
    bcD = behaviour_category(D, canonical_comodel(D))
    bcS = behaviour_category(S, canonical_comodel(S))
    F, report = behaviour_functor_on_maps(incl, bcD, bcS)
    assert report.passed
    assert F.source.morphisms == 4 and F.target.morphisms == 2
    assert sorted(F.F0) == [0, 1]
