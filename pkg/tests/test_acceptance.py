"""Acceptance suite: one test group per criterion, results summarized at the end of the run."""

import time
from fractions import Fraction as F
from itertools import permutations

import numpy as np
import pytest

from powidx import binary as B
from powidx import jk as J
from powidx.continuous import (
    ContinuousGame,
    QuotaFunction,
    Threshold,
    bzi_continuous,
    ghat,
    gtilde,
    join,
    meet,
    ssi_continuous,
    ssi_per_permutation,
)
from powidx.density import PUBLISHED_MEDIAN_VALUES, median_density_report
from powidx.nucleolus import nucleolus_search
from powidx.profile import NumericsSpec, normalize
from powidx.reproduce import GTILDE_SWAPPED, GTILDE_TABLES, PIVOT_TABLE, median_queue_values


class Timer:
    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t


# ---------------------------------------------------------------- 1 - 3


def test_criterion_1_binary_ssi(accept):
    with Timer() as t:
        ssi = B.ssi_binary(B.BinaryGame.weighted(3, [2, 1, 1, 1]))
    accept.check(1, "values", ssi.values == (F(1, 2), F(1, 6), F(1, 6), F(1, 6)), str(ssi.values))
    accept.check(1, "runtime < 1 s", t.elapsed < 1, f"{t.elapsed:.3f} s")


def test_criterion_2_binary_nucleolus(accept):
    with Timer() as t:
        nuc = B.nucleolus_binary(B.BinaryGame.weighted(3, [2, 1, 1, 1]))
    err = np.max(np.abs(np.array(nuc.as_floats()) - [0.4, 0.2, 0.2, 0.2]))
    accept.check(2, "within 1e-9", err <= 1e-9, f"max error {err:.2e}")
    accept.check(2, "runtime < 1 s", t.elapsed < 1, f"{t.elapsed:.3f} s")


def test_criterion_3_jk_example(accept):
    with Timer() as t:
        g = J.example_jk32()
        ssi = J.ssi_jk(g)
        counts = {q: J.pivot_counts(g, q) for q in PIVOT_TABLE}
        eta = tuple(J.swings(g, i) for i in (1, 2, 3))
        nb = normalize(J.bzi_jk(g))
        l1 = sum(abs(a - b) for a, b in zip(ssi.values, nb.values))
    accept.check(3, "ssi", ssi.values == (F(22, 27), F(5, 54), F(5, 54)), str(ssi.values))
    for q, triple in PIVOT_TABLE.items():
        accept.check(3, f"pivot counts {q}", counts[q] == triple, str(counts[q]))
    accept.check(3, "eta", eta == (8, 1, 1), str(eta))
    accept.check(3, "normalized bzi", nb.values == (F(4, 5), F(1, 10), F(1, 10)), str(nb.values))
    accept.check(3, "L1 distance", l1 == F(4, 135), str(l1))
    accept.check(3, "runtime < 1 s", t.elapsed < 1, f"{t.elapsed:.3f} s")


# ---------------------------------------------------------------- 4 - 6


def test_criterion_4_ghat(accept):
    with Timer() as t:
        ssi = ssi_continuous(ghat(), NumericsSpec(mode="exact"))
        pp = ssi_per_permutation(ghat(), NumericsSpec(mode="exact"))
    accept.check(4, "ssi", ssi.values == (F(1, 6), F(1, 3), F(1, 2)), str(ssi.values))
    for v, target in ((1, F(1, 6)), (2, F(2, 6)), (3, F(3, 6))):
        for q in permutations((1, 2, 3)):
            accept.check(4, f"voter {v} queue {q}", pp[(v, q)][0] == target, str(pp[(v, q)][0]))
    accept.check(4, "runtime < 1 s", t.elapsed < 1, f"{t.elapsed:.3f} s")


@pytest.fixture(scope="module")
def gtilde_tables():
    return ssi_per_permutation(gtilde(), NumericsSpec(mode="exact"))


def test_criterion_5_gtilde(accept, gtilde_tables):
    ssi = ssi_continuous(gtilde(), NumericsSpec(mode="exact"))
    accept.check(5, "ssi", ssi.values == (F(35, 144), F(50, 144), F(59, 144)), str(ssi.values))
    for v, table in GTILDE_TABLES.items():
        for q, val in table.items():
            if (v, q) in GTILDE_SWAPPED:
                continue
            got = gtilde_tables[(v, q)][0]
            accept.check(5, f"voter {v} queue {q}", got == val, f"expected {val}, got {got}")


@pytest.mark.xfail(
    strict=True,
    reason="the published voter-1 values for queues (2,3,1) and (3,1,2) are exchanged: "
    "each row's printed integrand is the other queue's, and integrating it gives the other value",
)
@pytest.mark.parametrize("queue", sorted(q for _, q in GTILDE_SWAPPED))
def test_criterion_5_gtilde_exchanged_rows(accept, gtilde_tables, queue):
    val = GTILDE_TABLES[1][queue]
    got = gtilde_tables[(1, queue)][0]
    # the value printed for the other queue of the pair is what this queue integrates to
    other = [q for _, q in GTILDE_SWAPPED if q != queue][0]
    assert got == GTILDE_TABLES[1][other]
    accept.check(5, f"voter 1 queue {queue} (published {val})", got == val, f"computed {got}")


def test_criterion_6_continuous_bzi(accept):
    a = bzi_continuous(ghat(), NumericsSpec(mode="exact"))
    b = bzi_continuous(gtilde(), NumericsSpec(mode="exact"))
    accept.check(6, "ghat", a.values == (F(1, 6), F(2, 6), F(3, 6)), str(a.values))
    accept.check(6, "gtilde", b.values == (F(1, 12), F(1, 8), F(1, 6)), str(b.values))
    accept.check(6, "gtilde normalized", normalize(b).values == (F(2, 9), F(3, 9), F(4, 9)), str(normalize(b).values))


# -------------------------------------------------------------------- 7


def test_criterion_7_weighted_median(accept):
    spec = NumericsSpec(mode="monte_carlo", mc_samples=10**6, seed=0)
    game = ContinuousGame.weighted_median([5, 3, 2, 1])
    target = np.array([1 / 2, 1 / 6, 1 / 6, 1 / 6])
    with Timer() as t:
        prof = ssi_continuous(game, spec)
        pp = ssi_per_permutation(game, spec, voters=[1, 2])
    vals, errs = np.array(prof.values), np.array(prof.errors)
    accept.check(7, "ssi within 3 sigma", np.all(np.abs(vals - target) <= errs), f"{vals} +- {errs}")
    accept.check(7, "ssi within 5e-3", np.all(np.abs(vals - target) <= 5e-3), str(vals))
    published = median_queue_values()
    for key, val in published.items():
        got = pp[key][0]
        accept.check(7, f"voter {key[0]} queue {key[1]}", abs(got - float(val)) <= 5e-3, f"expected {val}, got {got:.5f}")
    seen = {float(v) for v in published.values()}
    accept.check(7, "all of 2/3, 1/6, 1/2, 5/6, 0 covered", seen >= {2 / 3, 1 / 6, 1 / 2, 5 / 6, 0.0})
    accept.check(7, "runtime < 60 s", t.elapsed < 60, f"{t.elapsed:.1f} s")


# ---------------------------------------------------------------- 8 - 9


def test_criterion_8_ghat_nucleolus(accept):
    with Timer() as t:
        r = nucleolus_search(ghat())
    err = np.max(np.abs(r.w_star - np.array([1, 2, 3]) / 6))
    accept.check(8, "w* within 1e-4", err <= 1e-4, f"{r.w_star}")
    accept.check(8, "max excess <= 1e-8", r.max_excess <= 1e-8, f"{r.max_excess:.2e}")
    accept.check(8, "runtime < 60 s", t.elapsed < 60, f"{t.elapsed:.1f} s")


@pytest.fixture(scope="module")
def x1x2sq_search():
    game = ContinuousGame.monomials([(F(1), (1, 2))])
    with Timer() as t:
        r = nucleolus_search(game, NumericsSpec(mc_samples=10**6, seed=0))
    return r, t.elapsed


def test_criterion_9_x1x2sq_w1(accept, x1x2sq_search):
    r, elapsed = x1x2sq_search
    (l1, h1), _ = r.box_bounds
    accept.check(9, "w1 box meets [0.4553, 0.4555]", l1 <= 0.4555 and h1 >= 0.4553, f"[{l1:.6f}, {h1:.6f}]")
    accept.check(9, "w1 box inside [0.45, 0.46]", 0.45 <= l1 and h1 <= 0.46, f"[{l1:.6f}, {h1:.6f}]")
    accept.check(9, "w* on the simplex", abs(r.w_star.sum() - 1) < 1e-12 and np.all(r.w_star >= 0))
    accept.check(9, "runtime < 10 min", elapsed < 600, f"{elapsed:.0f} s")


@pytest.mark.xfail(
    strict=True,
    reason="[0.5545, 0.5547] is incompatible with w1 + w2 = 1 and w1 in [0.4553, 0.4555]",
)
def test_criterion_9_x1x2sq_w2(accept, x1x2sq_search):
    r, _ = x1x2sq_search
    _, (l2, h2) = r.box_bounds
    accept.check(9, "w2 box meets [0.5545, 0.5547]", l2 <= 0.5547 and h2 >= 0.5545, f"[{l2:.6f}, {h2:.6f}]")


# ------------------------------------------------------------------- 10


def _random_families(rng, count=50):
    def simplex(n):
        w = rng.integers(1, 7, size=n)
        return [F(int(x), int(w.sum())) for x in w]

    fams = {k: [] for k in ("monomial", "linear", "threshold", "quota", "median", "lattice", "intersection", "embedding")}
    for _ in range(count):
        n = int(rng.integers(2, 5))
        exps = [tuple(int(e) for e in rng.integers(0, 4, size=n)) for _ in range(2)]
        exps = [e if any(e) else (1,) + e[1:] for e in exps]
        fams["monomial"].append(ContinuousGame.monomials([(F(1, 3), exps[0]), (F(2, 3), exps[1])]))
        fams["linear"].append(ContinuousGame.linear(simplex(n)))
        fams["threshold"].append(ContinuousGame.threshold(F(int(rng.integers(1, 20)), 20), simplex(n)))
        fams["quota"].append(
            ContinuousGame.quota_weighted(simplex(n), QuotaFunction(breakpoints=((0, 0), (F(1, 2), F(int(rng.integers(0, 11)), 10)), (1, 1))))
        )
        fams["median"].append(ContinuousGame.weighted_median([int(x) for x in rng.integers(1, 7, size=n)]))
        a = ContinuousGame.threshold(F(int(rng.integers(1, 10)), 10), simplex(n))
        fams["lattice"].append(meet(a, ContinuousGame.linear(simplex(n))) if rng.random() < 0.5 else join(a, ContinuousGame.linear(simplex(n))))
        fams["intersection"].append(
            ContinuousGame.intersection([Threshold(F(int(rng.integers(1, 10)), 10), tuple(simplex(n))) for _ in range(2)])
        )
        w = [int(x) for x in rng.integers(0, 5, size=n)]
        w[0] += 1
        fams["embedding"].append(ContinuousGame.embedding(B.BinaryGame.weighted(int(rng.integers(1, sum(w) + 1)), w)))
    return fams


def test_criterion_10_efficiency(accept):
    mc = NumericsSpec(mode="monte_carlo", mc_samples=4000, mc_blocks=8)
    for name, games in _random_families(np.random.default_rng(2024)).items():
        worst = 0.0
        ok = True
        for g in games:
            spec = NumericsSpec(quadrature_order=8) if g.polynomial_terms() is not None else mc
            prof = ssi_continuous(g, spec)
            gap = abs(float(sum(prof.values)) - 1)
            tol = 1e-9 if prof.method != "monte_carlo" else max(1e-9, float(np.sum(prof.errors)))
            ok &= gap <= tol
            worst = max(worst, gap)
        accept.check(10, f"SSI efficiency, 50 {name} games", ok, f"worst gap {worst:.1e}")


def test_criterion_10_quota_interval(accept):
    rng = np.random.default_rng(7)
    ok = True
    for _ in range(200):
        n = int(rng.integers(1, 9))
        w = [int(x) for x in rng.integers(0, 10, size=n)]
        w[int(rng.integers(n))] += 1
        g = B.BinaryGame.weighted(int(rng.integers(1, sum(w) + 1)), w)
        lo, hi = B.quota_interval(g)
        p = B.properties(g)
        ok &= p["proper"] == (hi > F(1, 2)) and p["strong"] == (lo < F(1, 2))
        ok &= p["constant_sum"] == (lo < F(1, 2) < hi)
    accept.check(10, "quota interval decides proper/strong on 200 games", ok)


def _monotone_tables(n):
    if n == 0:
        return [np.array([False]), np.array([True])]
    prev = _monotone_tables(n - 1)
    return [np.concatenate([a, b]) for a in prev for b in prev if np.all(b >= a)]


def test_criterion_10_embedding(accept):
    for n in range(1, 6):
        tables = [t for t in _monotone_tables(n) if not t[0] and t[-1]]
        ok = True
        for t in tables:
            g = B.BinaryGame.from_table(n, t)
            e = J.embed_binary(g)
            ok &= J.ssi_jk(e).values == B.ssi_binary(g).values and J.bzi_jk(e).values == B.bzi_binary(g).values
        accept.check(10, f"(2,2) embedding, all {len(tables)} simple games with n={n}", ok)


def test_criterion_10_worker_determinism(accept):
    game = ContinuousGame.weighted_median([5, 3, 2, 1])
    runs = [ssi_continuous(game, NumericsSpec(mode="monte_carlo", mc_samples=50000, seed=11, workers=w)) for w in (1, 2, 8)]
    raw = [np.array(r.values).tobytes() + np.array(r.errors).tobytes() for r in runs]
    accept.check(10, "Monte Carlo identical for 1, 2, 8 workers", raw[0] == raw[1] == raw[2])


# ------------------------------------------------------------------- 11


def test_criterion_11_density_example(accept):
    rep = median_density_report(NumericsSpec(mc_samples=10**6, seed=0))
    gap = rep["max_quad_mc_gap"]
    accept.check(11, "quadrature and Monte Carlo agree within 1e-6", gap <= 1e-6, f"gap {gap:.1e}")
    accept.check(11, "published values compared", rep["published"] == list(PUBLISHED_MEDIAN_VALUES))
    # the comparison is part of the report; the published triple sums to 1/8
    accept.check(11, "discrepancy reported", rep["matches_published"] is False and rep["published_sum"] == F(1, 8))
    print(
        "median density: evaluated", [str(v) for v in rep["exact"]],
        "published", [str(v) for v in rep["published"]],
    )
