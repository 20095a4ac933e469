from fractions import Fraction as F
from itertools import permutations, product
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powidx import binary as B
from powidx import jk as J
from powidx.errors import CapacityError, DomainError, InputError
from powidx.profile import NumericsSpec, normalize

TABLE = {
    (1, 2, 3): (18, 6, 3),
    (1, 3, 2): (18, 3, 6),
    (2, 1, 3): (24, 0, 3),
    (2, 3, 1): (24, 0, 3),
    (3, 1, 2): (24, 3, 0),
    (3, 2, 1): (24, 3, 0),
}


@st.composite
def jk_games(draw, max_n=4, max_j=4, max_k=4):
    """Random (j,k) simple games: a monotone closure of random seeds."""
    n = draw(st.integers(1, max_n))
    j = draw(st.integers(2, max_j))
    k = draw(st.integers(2, max_k))
    if j**n > 256:
        n = 2
    raw = draw(st.lists(st.integers(1, k), min_size=j**n, max_size=j**n))
    tab = np.array(raw, dtype=np.int64).reshape((j,) * n)
    # enforce monotonicity: outputs may only grow as levels move away from 1
    for axis in range(n):
        tab = np.maximum.accumulate(tab, axis=axis)
    tab[(0,) * n] = 1
    tab[(j - 1,) * n] = k
    for axis in range(n):
        tab = np.maximum.accumulate(tab, axis=axis)
    return J.JKGame(n, j, k, tab)


def test_example_is_simple():
    assert J.is_jk_simple(J.example_jk32())


def test_leq_j_direction():
    assert J.leq_j((2, 3, 1), (1, 2, 1))
    assert not J.leq_j((1, 2, 1), (2, 3, 1))
    with pytest.raises(InputError):
        J.leq_j((1, 4), (1, 1), j=3)


@pytest.mark.parametrize("queue,counts", sorted(TABLE.items()))
def test_pivot_counts_per_queue(queue, counts):
    assert J.pivot_counts(J.example_jk32(), queue) == counts


def test_indices_of_example():
    g = J.example_jk32()
    ssi = J.ssi_jk(g)
    assert ssi.values == (F(22, 27), F(5, 54), F(5, 54))
    # the published triples are the whole story: totals over 3!*27 give the SSI
    totals = np.sum(list(TABLE.values()), axis=0)
    assert tuple(F(int(t), factorial(3) * 27) for t in totals) == ssi.values
    assert [J.swings(g, i) for i in (1, 2, 3)] == [8, 1, 1]
    assert J.bzi_jk(g).values == (F(8, 9), F(1, 9), F(1, 9))


def test_pivot_for_worked_profile():
    # counts (24,0,3) for this queue force voter 1 at profile (1,2,3)
    assert J.pivot(J.example_jk32(), (2, 1, 3), (1, 2, 3), 1) == 1


def test_non_simple_rejected():
    tab = np.full((2, 2), 2)
    tab[0, 0] = 1
    tab[1, 0] = 1
    tab[0, 1] = 2
    bad = tab.copy()
    bad[1, 1] = 1  # top profile must give the lowest approval
    with pytest.raises(DomainError):
        J.ssi_jk(J.JKGame(2, 2, 2, bad))


def test_capacity():
    big = J.JKGame.from_rule(10, 4, 2, lambda p: 1 if max(p) == 1 else 2)
    with pytest.raises(CapacityError):
        J.ssi_jk(big)


def test_sampled_ssi_close_to_exact():
    g = J.example_jk32()
    est = J.ssi_jk(g, NumericsSpec(mode="monte_carlo", mc_samples=20000, seed=3))
    exact = J.ssi_jk(g).as_floats()
    assert np.all(np.abs(np.array(est.values) - exact) <= np.array(est.errors) + 1e-3)


def test_entries_must_cover_all_profiles():
    with pytest.raises(InputError):
        J.JKGame.from_entries(2, 2, 2, [((1, 1), 1)])


@settings(max_examples=50, deadline=None)
@given(jk_games())
def test_ssi_total_is_number_of_boundaries(game):
    # one h-pivot per (queue, profile, h): the index sums to k-1, and to 1 for k = 2
    assert J.is_jk_simple(game)
    ssi = J.ssi_jk(game)
    assert sum(ssi.values) == game.k - 1
    assert sum(normalize(ssi).values) == 1


@settings(max_examples=30, deadline=None)
@given(jk_games(max_n=3))
def test_exactly_one_pivot(game):
    # the pivot voter is well defined; re-derive it by brute force and compare
    for queue in permutations(range(1, game.n + 1)):
        for prof in product(range(1, game.j + 1), repeat=game.n):
            for h in range(1, game.k):
                piv = J.pivot(game, queue, prof, h)
                hits = []
                for t, v in enumerate(queue):
                    revealed = queue[: t + 1]
                    best = [prof[i - 1] if i in revealed else 1 for i in range(1, game.n + 1)]
                    worst = [prof[i - 1] if i in revealed else game.j for i in range(1, game.n + 1)]
                    decided = game(best) > h or game(worst) <= h
                    if decided:
                        hits.append(v)
                        break
                assert hits == [piv]


@settings(max_examples=50, deadline=None)
@given(jk_games())
def test_one_step_swings_telescope(game):
    for i in range(1, game.n + 1):
        assert J.swings(game, i) <= J.telescoped_swings(game, i)
        if game.k == 2:
            assert J.swings(game, i) == J.telescoped_swings(game, i)


def _monotone_tables(n):
    if n == 0:
        return [np.array([False]), np.array([True])]
    prev = _monotone_tables(n - 1)
    return [np.concatenate([a, b]) for a in prev for b in prev if np.all(b >= a)]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_embedding_matches_binary_exhaustively(n):
    tables = [t for t in _monotone_tables(n) if not t[0] and t[-1]]
    for t in tables:
        g = B.BinaryGame.from_table(n, t)
        e = J.embed_binary(g)
        assert J.ssi_jk(e).values == B.ssi_binary(g).values
        assert J.bzi_jk(e).values == B.bzi_binary(g).values
