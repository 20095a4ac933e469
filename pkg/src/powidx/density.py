"""Per-voter vote densities and the density-weighted power indices.

Densities are piecewise polynomials on a common interval ``[lo, hi]``. Votes
drawn there are mapped affinely onto ``[0, 1]`` before the game sees them, so
a density on ``[0, 1]`` that is identically 1 recovers the unweighted indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import numerics
from .continuous import (
    ContinuousGame,
    _profile,
    _ssi_rows,
    bzi_continuous,
    subset_integrals,
)
from .errors import InputError
from .profile import NumericsSpec, PowerProfile


# ------------------------------------------------------------ polynomials
# Ascending coefficient lists of Fractions.


def _padd(p, q):
    out = [Fraction(0)] * max(len(p), len(q))
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return out


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _pint(p):
    """Antiderivative vanishing at 0."""
    return [Fraction(0)] + [c / (k + 1) for k, c in enumerate(p)]


def _peval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _pdefinite(p, a, b):
    P = _pint(p)
    return _peval(P, b) - _peval(P, a)


@dataclass(frozen=True)
class Density:
    """Piecewise-polynomial density; ``pieces`` holds ``(a, b, coeffs)`` with
    ascending coefficients in the vote variable."""

    support: tuple
    pieces: tuple

    def __post_init__(self):
        lo, hi = (Fraction(v) for v in self.support)
        if not lo < hi:
            raise InputError("density support must satisfy lo < hi")
        pieces = []
        for a, b, co in self.pieces:
            a, b = Fraction(a), Fraction(b)
            co = [Fraction(c) for c in co] or [Fraction(0)]
            if not lo <= a < b <= hi:
                raise InputError(f"piece [{a}, {b}] lies outside the support [{lo}, {hi}]")
            pieces.append((a, b, tuple(co)))
        pieces.sort()
        for (_, b1, _), (a2, _, _) in zip(pieces, pieces[1:]):
            if a2 < b1:
                raise InputError("density pieces overlap")
        object.__setattr__(self, "support", (lo, hi))
        object.__setattr__(self, "pieces", tuple(pieces))
        mass = sum(_pdefinite(list(co), a, b) for a, b, co in pieces)
        if abs(float(mass) - 1.0) > 1e-9:
            raise InputError(f"density integrates to {float(mass):.12g}, not 1")
        for a, b, co in pieces:
            grid = np.linspace(float(a), float(b), 1025)
            if np.min(np.polynomial.polynomial.polyval(grid, [float(c) for c in co])) < -1e-12:
                raise InputError(f"density is negative on [{a}, {b}]")

    @classmethod
    def uniform(cls, lo=0, hi=1):
        lo, hi = Fraction(lo), Fraction(hi)
        return cls((lo, hi), ((lo, hi, (1 / (hi - lo),)),))

    @property
    def breakpoints(self):
        pts = {self.support[0], self.support[1]}
        for a, b, _ in self.pieces:
            pts |= {a, b}
        return sorted(pts)

    def pdf(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        for a, b, co in self.pieces:
            inside = (y >= float(a)) & (y <= float(b))
            out = np.where(inside, np.polynomial.polynomial.polyval(y, [float(c) for c in co]), out)
        return out

    def cdf(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        for a, b, co in self.pieces:
            P = np.polynomial.Polynomial([float(c) for c in co]).integ(lbnd=float(a))
            out += np.clip(P(np.clip(y, float(a), float(b))), 0.0, None)
        return out

    def cdf_poly(self):
        """Exact CDF as ``[(a, b, coeffs)]`` over the pieces, zero-filled gaps omitted."""
        acc = Fraction(0)
        out = []
        for a, b, co in self.pieces:
            P = _pint(list(co))
            shift = acc - _peval(P, a)
            out.append((a, b, _padd(P, [shift])))
            acc += _pdefinite(list(co), a, b)
        return out

    def cdf_exact(self, y: Fraction) -> Fraction:
        y = Fraction(y)
        for a, b, P in self.cdf_poly():
            if y < a:
                return _peval(P, a)
            if y <= b:
                return _peval(P, y)
        return Fraction(1)

    def quantile(self, u) -> np.ndarray:
        """Smallest vote with CDF at least ``u`` (vectorized bisection)."""
        u = np.asarray(u, dtype=float)
        lo = np.full_like(u, float(self.support[0]))
        hi = np.full_like(u, float(self.support[1]))
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return hi

    def moment(self, e: int) -> Fraction:
        """``E[((Y - lo) / (hi - lo)) ** e]`` exactly."""
        lo, hi = self.support
        L = hi - lo
        # ((y - lo) / L) ** e expanded in powers of y
        base = [-lo / L, 1 / L]
        poly = [Fraction(1)]
        for _ in range(e):
            poly = _pmul(poly, base)
        return sum((_pdefinite(_pmul(poly, list(co)), a, b) for a, b, co in self.pieces), Fraction(0))


@dataclass(frozen=True)
class DensityVector:
    densities: tuple

    def __post_init__(self):
        if not self.densities:
            raise InputError("density vector is empty")
        supports = {d.support for d in self.densities}
        if len(supports) != 1:
            raise InputError("all densities must share one support interval")

    @property
    def n(self):
        return len(self.densities)

    @property
    def support(self):
        return self.densities[0].support

    def __getitem__(self, i):
        return self.densities[i]

    def weight(self, X):
        """Density product times the Jacobian, for votes already mapped to [0, 1]."""
        lo, hi = (float(v) for v in self.support)
        L = hi - lo
        Y = lo + L * X
        out = np.ones(len(X))
        for i, d in enumerate(self.densities):
            out *= d.pdf(Y[:, i]) * L
        return out


    def sample(self, rng, m) -> np.ndarray:
        """Latin hypercube draw of ``m`` vote vectors from the densities,
        returned in unit-cube coordinates."""
        lo, hi = (float(v) for v in self.support)
        U = numerics.stratified_uniform(rng, m, self.n)
        cols = [(d.quantile(U[:, i]) - lo) / (hi - lo) for i, d in enumerate(self.densities)]
        return np.clip(np.stack(cols, axis=1), 0.0, 1.0)


def _check(game, dens):
    if dens.n != game.n:
        raise InputError(f"density vector has {dens.n} entries, game has {game.n} voters")


def ssi_density(game: ContinuousGame, dens: DensityVector, spec: NumericsSpec = NumericsSpec()) -> PowerProfile:
    """Shapley-Shubik index with voter ``i`` voting according to density ``f_i``."""
    _check(game, dens)
    sub = subset_integrals(
        game, spec, moment=lambda i, e: dens[i].moment(e), weight=dens.weight, sampler=dens.sample
    )
    values, errs = sub.combine(_ssi_rows(game.n))
    return _profile(values, errs, sub, "ssi")


def bzi_density(game: ContinuousGame, dens: DensityVector, spec: NumericsSpec = NumericsSpec()) -> PowerProfile:
    _check(game, dens)
    return bzi_continuous(
        game, spec, moment=lambda i, e: dens[i].moment(e), weight=dens.weight, sampler=dens.sample
    )


# ------------------------------------------- median-rule density example


def median_rule_example() -> DensityVector:
    """Three voters on [-1, 1]: f1 = 3/4 (1 - y^2), f2 = f3 = 3/8 (1 + y^2)."""
    f1 = Density((-1, 1), ((-1, 1, (Fraction(3, 4), 0, Fraction(-3, 4))),))
    f2 = Density((-1, 1), ((-1, 1, (Fraction(3, 8), 0, Fraction(3, 8))),))
    return DensityVector((f1, f2, f2))


def _others(i, n=3):
    return [k for k in range(n) if k != i]


def median_probability_exact(dens: DensityVector) -> list:
    """For each of three voters, the exact probability that their vote lies
    strictly between the other two, as the sum of the two ordered integrals
    ``int f_i(y) [F_a(y) (1 - F_b(y)) + F_b(y) (1 - F_a(y))] dy``."""
    if dens.n != 3:
        raise InputError("the median-position integrals are defined for three voters")
    cuts = sorted(set().union(*(d.breakpoints for d in dens.densities)))
    out = []
    for i in range(3):
        a, b = _others(i)
        total = Fraction(0)
        for lo, hi in zip(cuts, cuts[1:]):
            fi = _piece_at(dens[i].pieces, lo, hi)
            if fi is None:
                continue
            Fa = _cdf_piece(dens[a], lo, hi)
            Fb = _cdf_piece(dens[b], lo, hi)
            one = [Fraction(1)]
            inner = _padd(
                _pmul(Fa, _padd(one, [-c for c in Fb])),
                _pmul(Fb, _padd(one, [-c for c in Fa])),
            )
            total += _pdefinite(_pmul(list(fi), inner), lo, hi)
        out.append(total)
    return out


def _piece_at(pieces, lo, hi):
    for a, b, co in pieces:
        if a <= lo and hi <= b:
            return co
    return None


def _cdf_piece(d: Density, lo, hi):
    for a, b, P in d.cdf_poly():
        if a <= lo and hi <= b:
            return P
    # constant stretch (gap or outside the pieces)
    return [d.cdf_exact(lo)]


def _composite_gl(cuts, lo, hi, order):
    """Gauss-Legendre nodes and weights on [lo, hi], split at the given cuts."""
    pts = [lo] + [c for c in cuts if lo < c < hi] + [hi]
    xs, ws = [], []
    for a, b in zip(pts, pts[1:]):
        if b > a:
            x, w = numerics.gauss_legendre(order, float(a), float(b))
            xs.append(x)
            ws.append(w)
    if not xs:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(xs), np.concatenate(ws)


def median_probability_quadrature(dens: DensityVector, order: int = 16) -> list:
    """The same integrals by iterated Gauss-Legendre with variable inner limits;
    no CDFs are used, the inner integrals are quadratures of the densities."""
    if dens.n != 3:
        raise InputError("the median-position integrals are defined for three voters")
    cuts = [float(c) for c in sorted(set().union(*(d.breakpoints for d in dens.densities)))]
    lo, hi = cuts[0], cuts[-1]
    X, W = _composite_gl(cuts, lo, hi, order)
    out = []
    for i in range(3):
        a, b = _others(i)
        total = 0.0
        for y, wy in zip(X, W):
            below_a = below_b = 0.0
            xb, wb = _composite_gl(cuts, lo, y, order)
            below_a = float(wb @ dens[a].pdf(xb))
            below_b = float(wb @ dens[b].pdf(xb))
            xa, wa = _composite_gl(cuts, y, hi, order)
            above_a = float(wa @ dens[a].pdf(xa))
            above_b = float(wa @ dens[b].pdf(xa))
            total += wy * float(dens[i].pdf(y)) * (below_b * above_a + below_a * above_b)
        out.append(total)
    return out


def median_probability_mc(dens: DensityVector, spec: NumericsSpec = NumericsSpec()):
    """Conditional Monte Carlo: stratified draws of the middle vote with the
    two outer integrals taken exactly through the CDFs. Returns (values, abs_err)."""
    if dens.n != 3:
        raise InputError("the median-position integrals are defined for three voters")
    lo, hi = (float(v) for v in dens.support)
    L = hi - lo

    def integrand(U):
        y = lo + L * U[:, 0]
        cols = []
        for i in range(3):
            a, b = _others(i)
            Fa, Fb = dens[a].cdf(y), dens[b].cdf(y)
            cols.append(L * dens[i].pdf(y) * (Fa * (1 - Fb) + Fb * (1 - Fa)))
        return np.stack(cols, axis=1)

    est = numerics.integrate(integrand, 1, spec.with_mode("monte_carlo"))
    return list(np.asarray(est.value)), list(np.asarray(est.abs_err))


PUBLISHED_MEDIAN_VALUES = (Fraction(554, 13440), Fraction(563, 13440), Fraction(563, 13440))


def median_density_report(spec: NumericsSpec = NumericsSpec()) -> dict:
    """Evaluate the three-voter median example by three routes and compare
    with the published fractions."""
    dens = median_rule_example()
    exact = median_probability_exact(dens)
    quad = median_probability_quadrature(dens, spec.quadrature_order)
    mc, mc_err = median_probability_mc(dens, spec)
    published = list(PUBLISHED_MEDIAN_VALUES)
    return {
        "exact": exact,
        "quadrature": quad,
        "monte_carlo": mc,
        "monte_carlo_abs_err": mc_err,
        "max_quad_mc_gap": max(abs(a - b) for a, b in zip(quad, mc)),
        "published": published,
        "published_sum": sum(published),
        "exact_sum": sum(exact),
        "matches_published": all(abs(float(a) - float(b)) <= 1e-6 for a, b in zip(exact, published)),
    }
