from fractions import Fraction as F
from itertools import permutations

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from powidx import binary as B
from powidx.continuous import (
    ContinuousGame,
    QuotaFunction,
    Threshold,
    banzhaf_total_power,
    bzi_continuous,
    desirability,
    eval_game,
    ghat,
    gtilde,
    join,
    meet,
    median_ssi_shortcut,
    ssi_continuous,
    ssi_per_permutation,
    structural_checks,
    tau_bar,
    tau_under,
    uniqueness_probe,
)
from powidx.errors import CapacityError, InputError, ModeError, PreconditionError
from powidx.profile import NumericsSpec

MC = NumericsSpec(mode="monte_carlo", mc_samples=4000, mc_blocks=8)
SETTINGS = settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])


# ------------------------------------------------------------ strategies


def _simplex(draw, n, allow_zero=True):
    raw = draw(st.lists(st.integers(0 if allow_zero else 1, 6), min_size=n, max_size=n).filter(lambda v: sum(v) > 0))
    total = sum(raw)
    return [F(r, total) for r in raw]


@st.composite
def monomial_games(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, 3))
    coefs = _simplex(draw, k, allow_zero=False)
    terms = []
    for c in coefs:
        e = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n).filter(any))
        terms.append((c, tuple(e)))
    return ContinuousGame.monomials(terms)


@st.composite
def linear_games(draw, max_n=4):
    return ContinuousGame.linear(_simplex(draw, draw(st.integers(1, max_n))))


@st.composite
def threshold_games(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    q = F(draw(st.integers(1, 20)), 20)
    return ContinuousGame.threshold(q, _simplex(draw, n))


@st.composite
def quota_games(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    if draw(st.booleans()):
        qf = QuotaFunction(coeffs=(F(0), F(1, 2), F(1, 2)) if draw(st.booleans()) else (F(0), F(0), F(3), F(-2)))
    else:
        y = F(draw(st.integers(0, 10)), 10)
        qf = QuotaFunction(breakpoints=((0, 0), (F(1, 2), y), (1, 1)))
    return ContinuousGame.quota_weighted(_simplex(draw, n), qf)


@st.composite
def median_games(draw, max_n=4):
    if draw(st.booleans()):
        return ContinuousGame.median(draw(st.integers(1, max_n)))
    n = draw(st.integers(1, max_n))
    return ContinuousGame.weighted_median([draw(st.integers(1, 6)) for _ in range(n)])


@st.composite
def lattice_games(draw, max_n=3):
    n = draw(st.integers(1, max_n))
    a = ContinuousGame.threshold(F(draw(st.integers(1, 10)), 10), _simplex(draw, n))
    b = ContinuousGame.linear(_simplex(draw, n))
    return meet(a, b) if draw(st.booleans()) else join(a, b)


@st.composite
def intersection_games(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    parts = [Threshold(F(draw(st.integers(1, 10)), 10), tuple(_simplex(draw, n))) for _ in range(draw(st.integers(1, 3)))]
    return ContinuousGame.intersection(parts)


@st.composite
def embedded_games(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    w = [draw(st.integers(0, 5)) for _ in range(n)]
    if sum(w) == 0:
        w[0] = 1
    return ContinuousGame.embedding(B.BinaryGame.weighted(draw(st.integers(1, sum(w))), w))


FAMILIES = {
    "monomial": monomial_games(),
    "linear": linear_games(),
    "threshold": threshold_games(),
    "quota_weighted": quota_games(),
    "median": median_games(),
    "meet_join": lattice_games(),
    "intersection": intersection_games(),
    "embedding": embedded_games(),
}


def _spec_for(game):
    return NumericsSpec(quadrature_order=8) if game.polynomial_terms() is not None else MC


# ------------------------------------------------------------- examples


def test_eval_examples():
    assert eval_game(ghat(), [1, 1, 1]) == 1
    assert eval_game(ContinuousGame.median(3), [0.2, 0.7, 0.4]) == 0.4
    assert eval_game(ContinuousGame.weighted_median([2, 1, 1, 1]), [0.9, 0.1, 0.5, 0.3]) == 0.5
    with pytest.raises(InputError):
        eval_game(ghat(), [1.2, 0, 0])
    with pytest.raises(InputError):
        eval_game(ghat(), [0.5, 0.5])


def test_tau_operators():
    x = np.array([0.3, 0.6, 0.9])
    q = (2, 1, 3)
    assert tau_bar(x, q, 0).tolist() == [1, 1, 1]
    assert tau_under(x, q, 0).tolist() == [0, 0, 0]
    assert tau_bar(x, q, 3).tolist() == x.tolist()
    assert tau_bar(x, q, 1).tolist() == [1, 0.6, 1]
    assert tau_under(x, q, 2).tolist() == [0.3, 0.6, 0]
    assert ghat()(tau_bar(x, q, 1)) == pytest.approx((2 * 0.36 + 4) / 6)


def test_ghat_and_gtilde_indices():
    assert ssi_continuous(ghat()).values == (F(1, 6), F(1, 3), F(1, 2))
    assert ssi_continuous(gtilde()).values == (F(35, 144), F(50, 144), F(59, 144))
    assert bzi_continuous(ghat()).values == (F(1, 6), F(2, 6), F(3, 6))
    assert bzi_continuous(gtilde()).values == (F(1, 12), F(1, 8), F(1, 6))


def test_gtilde_queue_relative_values():
    pp = ssi_per_permutation(gtilde(), voters=[1])
    got = {q: v for (_, q), (v, _) in pp.items()}
    assert got == {
        (1, 2, 3): F(1, 2),
        (1, 3, 2): F(1, 2),
        (2, 1, 3): F(1, 6),
        (2, 3, 1): F(1, 12),
        (3, 1, 2): F(1, 8),
        (3, 2, 1): F(1, 12),
    }


def test_per_permutation_average_is_ssi():
    pp = ssi_per_permutation(gtilde())
    ssi = ssi_continuous(gtilde())
    for i in (1, 2, 3):
        assert sum(pp[(i, q)][0] for q in permutations((1, 2, 3))) / 6 == ssi.values[i - 1]


def test_linear_bzi_equals_weights():
    w = [F(1, 5), F(3, 10), F(1, 2)]
    g = ContinuousGame.linear(w)
    assert bzi_continuous(g).values == tuple(w)
    assert ssi_continuous(g).values == tuple(w)


def test_modes_agree_on_polynomial():
    exact = np.array(ssi_continuous(gtilde()).as_floats())
    quad = np.array(ssi_continuous(gtilde(), NumericsSpec(mode="quadrature", quadrature_order=4)).values)
    mc = ssi_continuous(gtilde(), NumericsSpec(mode="monte_carlo", mc_samples=100000))
    assert np.allclose(quad, exact, atol=1e-12)
    assert np.all(np.abs(np.array(mc.values) - exact) <= np.array(mc.errors) + 1e-12)
    assert mc.seed == 0 and mc.method == "monte_carlo"


def test_exact_mode_refuses_kinked_games():
    with pytest.raises(ModeError):
        ssi_continuous(ContinuousGame.median(3), NumericsSpec(mode="exact"))


def test_capacity_on_many_voters():
    with pytest.raises(CapacityError):
        ssi_continuous(ContinuousGame.median(9), MC)


def test_median_shortcut():
    assert median_ssi_shortcut([5, 3, 2, 1]).values == (F(1, 2), F(1, 6), F(1, 6), F(1, 6))
    assert median_ssi_shortcut([1, 1, 1]).values == (F(1, 3),) * 3
    with pytest.raises(PreconditionError):
        median_ssi_shortcut([1, 1])


def test_weighted_median_mc_matches_shortcut_small():
    prof = ssi_continuous(ContinuousGame.weighted_median([3, 1, 1]), NumericsSpec(mode="monte_carlo", mc_samples=200000))
    target = median_ssi_shortcut([3, 1, 1]).as_floats()
    assert np.all(np.abs(np.array(prof.values) - target) <= np.array(prof.errors) + 1e-3)


def test_structural_examples():
    th = structural_checks(ContinuousGame.threshold(F(3, 5), [F(1, 3)] * 3))
    assert th["proper"] and not th["strong"] and not th["constant_sum"]
    low = structural_checks(ContinuousGame.threshold(F(1, 2), [F(1, 3)] * 3))
    assert not low["proper"] and low["strong"] and not low["constant_sum"]
    assert structural_checks(ContinuousGame.linear([F(1, 5), F(3, 10), F(1, 2)]))["constant_sum"]
    med = structural_checks(ContinuousGame.median(3))
    assert med["method"] == "sampled" and med["constant_sum"] and med["complete"]
    sq = structural_checks(ContinuousGame.monomials([(F(1), (2, 0))]))
    assert sq["null_voters"] == {2}
    assert not sq["proper"] or not sq["strong"]
    assert sq["witnesses"]["strong"] is not None


def test_desirability_of_ghat():
    assert desirability(ghat(), 3, 1) == "i_succ"
    assert desirability(ContinuousGame.median(3), 1, 2) == "equiv"


def test_uniqueness_probes():
    r = uniqueness_probe(ContinuousGame.linear([F(1, 5), F(3, 10), F(1, 2)]))
    assert r["matches"] and np.allclose(r["weights"], [0.2, 0.3, 0.5])
    qf = QuotaFunction(coeffs=(F(0), F(1, 2), F(1, 2)))
    r = uniqueness_probe(ContinuousGame.quota_weighted([F(1, 4), F(3, 4)], qf))
    assert r["matches"]
    r = uniqueness_probe(ContinuousGame.threshold(F(3, 5), [F(1, 5), F(3, 10), F(1, 2)]))
    assert r["matches"]
    with pytest.raises(PreconditionError):
        uniqueness_probe(ContinuousGame.threshold(1, [F(1, 2), F(1, 2)]))


def test_meet_join_pointwise():
    g = ghat()
    X = np.random.default_rng(1).random((1000, 3))
    assert np.array_equal(meet(g, g).evaluate(X), g.evaluate(X))
    t1 = ContinuousGame.threshold(F(3, 5), [F(1, 3)] * 3)
    t2 = ContinuousGame.threshold(F(2, 5), [F(1, 2), F(1, 4), F(1, 4)])
    # the join of two thresholds is the dual of the intersection of their duals
    dual = ContinuousGame.intersection([Threshold(1 - t.body.quota, t.body.weights) for t in (t1, t2)])
    assert np.array_equal(join(t1, t2).evaluate(X), 1 - dual.evaluate(1 - X))
    with pytest.raises(InputError):
        meet(g, ContinuousGame.median(2))


@settings(max_examples=20, deadline=None)
@given(threshold_games(max_n=3), threshold_games(max_n=3))
def test_transfer_property_on_thresholds(g1, g2):
    if g1.n != g2.n:
        return
    spec = MC
    a, b = ssi_continuous(g1, spec), ssi_continuous(g2, spec)
    c, d = ssi_continuous(meet(g1, g2), spec), ssi_continuous(join(g1, g2), spec)
    err = np.array(a.errors) + np.array(b.errors) + np.array(c.errors) + np.array(d.errors)
    lhs = np.array(a.values) + np.array(b.values)
    rhs = np.array(c.values) + np.array(d.values)
    assert np.all(np.abs(lhs - rhs) <= err + 1e-12)


# ------------------------------------------------------------ invariants


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_ssi_efficiency_per_family(family):
    @SETTINGS
    @given(FAMILIES[family])
    def check(game):
        prof = ssi_continuous(game, _spec_for(game))
        tol = 1e-9 if prof.method != "monte_carlo" else max(1e-9, float(np.sum(prof.errors)))
        assert abs(float(sum(prof.values)) - 1) <= tol

    check()


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_monotone_on_random_ordered_pairs(family):
    @settings(max_examples=5, deadline=None)
    @given(FAMILIES[family])
    def check(game):
        rng = np.random.default_rng(7)
        X = rng.random((10**4, game.n))
        Y = X + (1 - X) * rng.random((10**4, game.n))
        gx, gy = game.evaluate(X), game.evaluate(Y)
        assert np.all(gy >= gx - 1e-12)
        assert np.all((gx >= 0) & (gx <= 1))

    check()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.lists(st.integers(0, 5), min_size=n, max_size=n), st.integers(1, 20))))
def test_embedding_matches_binary(args):
    w, q = args
    if sum(w) == 0 or q > sum(w):
        return
    b = B.BinaryGame.weighted(q, w)
    e = ContinuousGame.embedding(b)
    assert ssi_continuous(e, NumericsSpec(mode="exact")).values == B.ssi_binary(b).values
    assert bzi_continuous(e, NumericsSpec(mode="exact")).values == B.bzi_binary(b).values


@settings(max_examples=30, deadline=None)
@given(monomial_games(max_n=3), st.permutations(range(3)))
def test_permuting_coordinates_permutes_ssi(game, perm):
    if game.n != 3:
        return
    terms = [(c, tuple(e[p] for p in perm)) for c, e in game.body.terms]
    permuted = ContinuousGame.monomials(terms)
    a, b = ssi_continuous(game).values, ssi_continuous(permuted).values
    assert tuple(a[p] for p in perm) == b


@settings(max_examples=30, deadline=None)
@given(st.one_of(monomial_games(max_n=3), linear_games(max_n=3), quota_games(max_n=3)))
def test_banzhaf_total_power_identity(game):
    spec = NumericsSpec(quadrature_order=10)
    total = float(sum(bzi_continuous(game, spec).values))
    assert banzhaf_total_power(game, spec) == pytest.approx(total, abs=1e-9)


@pytest.mark.parametrize(
    "game",
    [
        ContinuousGame.monomials([(F(1, 2), (2, 1, 0)), (F(1, 2), (0, 3, 0))]),
        ContinuousGame.linear([F(1, 2), F(1, 2), F(0)]),
        ContinuousGame.threshold(F(1, 2), [F(1, 3), F(2, 3), F(0)]),
    ],
)
def test_null_voter_gets_nothing(game):
    spec = _spec_for(game)
    for prof in (ssi_continuous(game, spec), bzi_continuous(game, spec)):
        err = prof.errors[2] if prof.errors else 0
        assert abs(float(prof.values[2])) <= max(err, 1e-12)
    assert 3 in structural_checks(game)["null_voters"]
