"""Continuous simple games on the unit cube.

A game maps a vote vector ``x in [0,1]^n`` to an outcome in ``[0,1]``. Game
bodies are small frozen dataclasses; :meth:`ContinuousGame.evaluate` is
vectorized over rows of an ``(m, n)`` array.

The Shapley-Shubik computation works on *prefix sets*: for a queue, the
voters ahead of voter ``i`` form a set ``P``. Pinning every voter outside
``P`` to 1 (resp. 0) gives the two bounding games whose integrals, one per
subset ``P``, determine every per-queue term and hence the index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Optional, Sequence

import numpy as np

from . import numerics
from .binary import BinaryGame, popcounts
from .errors import CapacityError, InputError, ModeError, PreconditionError
from .profile import NumericsSpec, PowerProfile, exact_profile

MAX_SSI_VOTERS = 8
TOL = 1e-12


def _fractions(values):
    return tuple(Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator(10**12) for v in values)


def _check_normalized(weights, what):
    if any(w < 0 for w in weights):
        raise InputError(f"{what} weights must be nonnegative")
    if abs(float(sum(weights)) - 1.0) > 1e-12:
        raise InputError(f"{what} weights must sum to 1, got {float(sum(weights))}")


# ----------------------------------------------------------------- bodies


@dataclass(frozen=True)
class MonomialSum:
    """``sum(coef * prod(x_i ** e_i))`` with nonnegative rational coefficients."""

    terms: tuple  # of (Fraction, tuple[int, ...])

    def __post_init__(self):
        terms = tuple((Fraction(c), tuple(int(e) for e in exps)) for c, exps in self.terms)
        if not terms:
            raise InputError("monomial sum needs at least one term")
        widths = {len(e) for _, e in terms}
        if len(widths) != 1:
            raise InputError("all monomials must have the same number of exponents")
        if any(c < 0 for c, _ in terms) or any(x < 0 for _, e in terms for x in e):
            raise InputError("coefficients and exponents must be nonnegative")
        if sum(c for c, _ in terms) != 1:
            raise InputError("coefficients must sum to 1 so that g(1,...,1) = 1")
        if any(all(x == 0 for x in e) and c > 0 for c, e in terms):
            raise InputError("a constant term would break g(0,...,0) = 0")
        object.__setattr__(self, "terms", terms)


@dataclass(frozen=True)
class LinearWeighted:
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", _fractions(self.weights))
        _check_normalized(self.weights, "linear")


@dataclass(frozen=True)
class Threshold:
    quota: Fraction
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "quota", _fractions([self.quota])[0])
        object.__setattr__(self, "weights", _fractions(self.weights))
        _check_normalized(self.weights, "threshold")
        if not 0 < self.quota <= 1:
            raise InputError("threshold quota must lie in (0, 1]")


@dataclass(frozen=True)
class QuotaFunction:
    """Nondecreasing map of [0,1] onto itself with q(0)=0, q(1)=1.

    Either piecewise linear through ``breakpoints`` ((x, y) pairs from x=0 to
    x=1) or a polynomial with ascending ``coeffs``.
    """

    breakpoints: Optional[tuple] = None
    coeffs: Optional[tuple] = None

    def __post_init__(self):
        if (self.breakpoints is None) == (self.coeffs is None):
            raise InputError("quota function needs exactly one of breakpoints / coeffs")
        if self.breakpoints is not None:
            bp = tuple((Fraction(x), Fraction(y)) for x, y in self.breakpoints)
            xs = [x for x, _ in bp]
            ys = [y for _, y in bp]
            if xs[0] != 0 or xs[-1] != 1 or any(b <= a for a, b in zip(xs, xs[1:])):
                raise InputError("breakpoints must increase strictly from x=0 to x=1")
            if ys[0] != 0 or ys[-1] != 1 or any(b < a for a, b in zip(ys, ys[1:])):
                raise InputError("quota values must be nondecreasing from 0 to 1")
            object.__setattr__(self, "breakpoints", bp)
        else:
            co = tuple(Fraction(c) for c in self.coeffs)
            if co[0] != 0 or sum(co) != 1:
                raise InputError("polynomial quota function must satisfy q(0)=0, q(1)=1")
            deriv = np.polynomial.Polynomial([float(c) for c in co]).deriv()
            grid = np.linspace(0, 1, 2001)
            if len(co) > 1 and np.min(deriv(grid)) < -1e-12:
                raise InputError("polynomial quota function must be nondecreasing on [0,1]")
            object.__setattr__(self, "coeffs", co)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.breakpoints is not None:
            xs = [float(x) for x, _ in self.breakpoints]
            ys = [float(y) for _, y in self.breakpoints]
            return np.interp(s, xs, ys)
        return np.polynomial.polynomial.polyval(s, [float(c) for c in self.coeffs])

    def is_self_dual(self) -> bool:
        """Whether q(y) + q(1-y) = 1 for every y."""
        if self.coeffs is not None:
            p = np.polynomial.Polynomial([float(c) for c in self.coeffs])
            refl = p(np.polynomial.Polynomial([1.0, -1.0]))
            return bool(np.allclose((p + refl - 1).coef, 0, atol=1e-12))
        xs = sorted({x for x, _ in self.breakpoints} | {1 - x for x, _ in self.breakpoints})
        pts = np.array([float(x) for x in xs])
        return bool(np.allclose(self(pts) + self(1 - pts), 1.0, atol=1e-12))

    def dual_gap(self):
        """(min, max) of q(y) + q(1-y) - 1 over the kinks and a dense grid."""
        grid = np.linspace(0, 1, 4001)
        if self.breakpoints is not None:
            extra = [float(x) for x, _ in self.breakpoints]
            grid = np.unique(np.concatenate([grid, extra, [1 - e for e in extra]]))
        gap = self(grid) + self(1 - grid) - 1
        return float(gap.min()), float(gap.max())


@dataclass(frozen=True)
class QuotaWeighted:
    weights: tuple
    quota_fn: QuotaFunction

    def __post_init__(self):
        object.__setattr__(self, "weights", _fractions(self.weights))
        _check_normalized(self.weights, "quota-weighted")


@dataclass(frozen=True)
class WeightedMedian:
    weights: tuple

    def __post_init__(self):
        w = _fractions(self.weights)
        if any(x < 0 for x in w) or sum(w) <= 0:
            raise InputError("weighted median needs nonnegative weights with positive sum")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class Median:
    pass


@dataclass(frozen=True)
class MeetC:
    parts: tuple


@dataclass(frozen=True)
class JoinC:
    parts: tuple


@dataclass(frozen=True)
class ThresholdIntersection:
    parts: tuple  # of Threshold


@dataclass(frozen=True)
class BinaryEmbedding:
    """Threshold-type extension of a binary game: vote x_i counts as yes iff x_i >= cut."""

    game: BinaryGame
    cut: Fraction = Fraction(1, 2)


@dataclass(frozen=True, eq=False)
class ContinuousGame:
    n: int
    body: object
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        body = self.body
        if self.n < 1:
            raise InputError("need at least one voter")
        width = None
        if isinstance(body, MonomialSum):
            width = len(body.terms[0][1])
        elif isinstance(body, (LinearWeighted, Threshold, QuotaWeighted, WeightedMedian)):
            width = len(body.weights)
        elif isinstance(body, (MeetC, JoinC)):
            if any(p.n != self.n for p in body.parts):
                raise InputError("all parts must have the same voter count")
        elif isinstance(body, ThresholdIntersection):
            if any(len(p.weights) != self.n for p in body.parts):
                raise InputError("all thresholds must have the same voter count")
        elif isinstance(body, BinaryEmbedding):
            width = body.game.n
        elif not isinstance(body, Median):
            raise InputError(f"unknown continuous game body {type(body).__name__}")
        if width is not None and width != self.n:
            raise InputError(f"representation has {width} voters, game declares {self.n}")

    # constructors -----------------------------------------------------
    @classmethod
    def monomials(cls, terms):
        body = MonomialSum(tuple(terms))
        return cls(len(body.terms[0][1]), body)

    @classmethod
    def linear(cls, weights):
        return cls(len(weights), LinearWeighted(tuple(weights)))

    @classmethod
    def threshold(cls, quota, weights):
        return cls(len(weights), Threshold(quota, tuple(weights)))

    @classmethod
    def quota_weighted(cls, weights, quota_fn):
        return cls(len(weights), QuotaWeighted(tuple(weights), quota_fn))

    @classmethod
    def weighted_median(cls, weights):
        return cls(len(weights), WeightedMedian(tuple(weights)))

    @classmethod
    def median(cls, n):
        return cls(n, Median())

    @classmethod
    def embedding(cls, game: BinaryGame, cut=Fraction(1, 2)):
        return cls(game.n, BinaryEmbedding(game, Fraction(cut)))

    @classmethod
    def intersection(cls, thresholds):
        parts = tuple(t.body if isinstance(t, ContinuousGame) else t for t in thresholds)
        return cls(len(parts[0].weights), ThresholdIntersection(parts))

    # evaluation -------------------------------------------------------
    def evaluate(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n:
            raise InputError(f"expected an (m, {self.n}) array of votes")
        return _evaluate(self.body, X)

    def __call__(self, x) -> float:
        return eval_game(self, x)

    def polynomial_terms(self):
        """Monomial expansion ``[(coef, exponents), ...]`` or None if not polynomial."""
        if "terms" not in self._cache:
            self._cache["terms"] = _terms(self.body, self.n)
        return self._cache["terms"]

    @property
    def discontinuous(self) -> bool:
        return _discontinuous(self.body)


def eval_game(game: ContinuousGame, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (game.n,):
        raise InputError(f"vote vector must have length {game.n}")
    if np.any(x < 0) or np.any(x > 1) or np.any(np.isnan(x)):
        raise InputError("votes must lie in [0, 1]")
    return float(game.evaluate(x[None, :])[0])


def _median_rows(X, weights):
    """Weighted median per row with the two-index midpoint rule on ties."""
    w = [Fraction(v) for v in weights]
    den = math.lcm(*(v.denominator for v in w))
    wi = np.array([int(v * den) for v in w], dtype=np.int64)
    total = int(wi.sum())
    order = np.argsort(X, axis=1, kind="stable")
    xs = np.take_along_axis(X, order, axis=1)
    cum = np.cumsum(wi[order], axis=1)
    # smallest index with cumulative weight >= half
    lo = np.argmax(2 * cum >= total, axis=1)
    # largest index whose suffix weight (total - cum before it) >= half
    before = cum - wi[order]
    ok = 2 * (total - before) >= total
    hi = X.shape[1] - 1 - np.argmax(ok[:, ::-1], axis=1)
    rows = np.arange(len(X))
    return 0.5 * (xs[rows, lo] + xs[rows, hi])


def _evaluate(body, X):
    if isinstance(body, MonomialSum):
        out = np.zeros(len(X))
        for c, exps in body.terms:
            out += float(c) * np.prod(X ** np.array(exps, dtype=float), axis=1)
        return out
    if isinstance(body, LinearWeighted):
        return X @ np.array([float(w) for w in body.weights])
    if isinstance(body, Threshold):
        s = X @ np.array([float(w) for w in body.weights])
        return (s >= float(body.quota) - TOL).astype(float)
    if isinstance(body, QuotaWeighted):
        s = np.clip(X @ np.array([float(w) for w in body.weights]), 0.0, 1.0)
        return body.quota_fn(s)
    if isinstance(body, WeightedMedian):
        return _median_rows(X, body.weights)
    if isinstance(body, Median):
        return _median_rows(X, [1] * X.shape[1])
    if isinstance(body, MeetC):
        return np.min([p.evaluate(X) for p in body.parts], axis=0)
    if isinstance(body, JoinC):
        return np.max([p.evaluate(X) for p in body.parts], axis=0)
    if isinstance(body, ThresholdIntersection):
        return np.min([_evaluate(p, X) for p in body.parts], axis=0)
    if isinstance(body, BinaryEmbedding):
        bits = (X >= float(body.cut)).astype(np.int64)
        masks = bits @ (1 << np.arange(X.shape[1]))
        return body.game.table()[masks].astype(float)
    raise InputError(f"unknown body {type(body).__name__}")


def _discontinuous(body):
    if isinstance(body, (Threshold, ThresholdIntersection, BinaryEmbedding)):
        return True
    if isinstance(body, (MeetC, JoinC)):
        return any(p.discontinuous for p in body.parts)
    return False


def _kinked(body):
    """Families whose integrands are only piecewise smooth."""
    if isinstance(body, (WeightedMedian, Median)):
        return True
    if isinstance(body, (MeetC, JoinC)):
        return True
    return _discontinuous(body)


def _expand_power(weights, k):
    """Multinomial expansion of ``(sum w_i x_i) ** k`` as {exponents: coef}."""
    n = len(weights)
    poly = {(0,) * n: Fraction(1)}
    for _ in range(k):
        nxt = {}
        for exps, c in poly.items():
            for i, w in enumerate(weights):
                if w == 0:
                    continue
                e = list(exps)
                e[i] += 1
                e = tuple(e)
                nxt[e] = nxt.get(e, Fraction(0)) + c * w
        poly = nxt
    return poly


def _terms(body, n):
    if isinstance(body, MonomialSum):
        return list(body.terms)
    if isinstance(body, LinearWeighted):
        return [(w, tuple(int(i == j) for j in range(n))) for i, w in enumerate(body.weights) if w]
    if isinstance(body, QuotaWeighted) and body.quota_fn.coeffs is not None:
        acc = {}
        for k, a in enumerate(body.quota_fn.coeffs):
            if a == 0:
                continue
            for exps, c in _expand_power(body.weights, k).items():
                acc[exps] = acc.get(exps, Fraction(0)) + a * c
        return [(c, e) for e, c in sorted(acc.items()) if c != 0]
    return None


# ---------------------------------------------------------- combinators


def meet(g1: ContinuousGame, g2: ContinuousGame) -> ContinuousGame:
    if g1.n != g2.n:
        raise InputError(f"games have different voter counts ({g1.n} vs {g2.n})")
    return ContinuousGame(g1.n, MeetC((g1, g2)))


def join(g1: ContinuousGame, g2: ContinuousGame) -> ContinuousGame:
    if g1.n != g2.n:
        raise InputError(f"games have different voter counts ({g1.n} vs {g2.n})")
    return ContinuousGame(g1.n, JoinC((g1, g2)))


# -------------------------------------------------------------- queues


def tau_bar(x, queue: Sequence[int], t: int) -> np.ndarray:
    """Votes of the first ``t`` voters in ``queue`` kept, all others set to 1."""
    return _tau(x, queue, t, 1.0)


def tau_under(x, queue: Sequence[int], t: int) -> np.ndarray:
    """Votes of the first ``t`` voters in ``queue`` kept, all others set to 0."""
    return _tau(x, queue, t, 0.0)


def _tau(x, queue, t, fill):
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if sorted(queue) != list(range(1, n + 1)):
        raise InputError(f"queue must be a permutation of 1..{n}")
    if not 0 <= t <= n:
        raise InputError(f"t must lie in 0..{n}")
    out = np.full_like(x, fill)
    keep = [v - 1 for v in queue[:t]]
    out[..., keep] = x[..., keep]
    return out


# ---------------------------------------------------- subset integrals


def _pinned_values(game, X):
    """(m, 2 * 2^n) array: g with voters outside each subset pinned to 1, then to 0."""
    n = game.n
    m = len(X)
    full = 1 << n
    upper = np.empty((m, full))
    lower = np.empty((m, full))
    for mask in range(full):
        keep = np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
        Y = np.where(keep, X, 1.0)
        upper[:, mask] = game.evaluate(Y)
        Y = np.where(keep, X, 0.0)
        lower[:, mask] = game.evaluate(Y)
    return np.hstack([upper, lower])


def _exact_pinned(terms, n, moment):
    """Exact subset integrals for a polynomial game given per-voter moments."""
    full = 1 << n
    upper = [Fraction(0)] * full
    lower = [Fraction(0)] * full
    for mask in range(full):
        for c, exps in terms:
            val = c
            vanishes = False
            for i, e in enumerate(exps):
                if mask >> i & 1:
                    val *= moment(i, e)
                elif e > 0:
                    vanishes = True
            upper[mask] += val
            if not vanishes:
                lower[mask] += val
    return upper + lower


def _embedding_pinned(body, n):
    """Exact subset integrals for a threshold-type embedded binary game."""
    tab = body.game.table()
    p_yes = 1 - body.cut
    full = 1 << n
    upper = [Fraction(0)] * full
    lower = [Fraction(0)] * full
    for pattern in range(full):
        k = bin(pattern).count("1")
        prob = p_yes**k * body.cut ** (n - k)
        for mask in range(full):
            upper[mask] += prob * int(tab[(pattern & mask) | (~mask & (full - 1))])
            lower[mask] += prob * int(tab[pattern & mask])
    return upper + lower


def _resolve_mode(game, spec):
    mode = spec.mode
    poly = game.polynomial_terms() is not None
    embed = isinstance(game.body, BinaryEmbedding)
    if mode == "auto":
        if poly or embed:
            return "exact"
        if _kinked(game.body) or game.n > numerics.QUADRATURE_MAX_DIM:
            return "monte_carlo"
        return "quadrature"
    if mode == "exact" and not (poly or embed):
        raise ModeError(
            f"exact mode needs a polynomial game; {type(game.body).__name__} must use quadrature or monte_carlo"
        )
    return mode


@dataclass
class SubsetIntegrals:
    """Integrals of the pinned games for every subset, with Monte Carlo blocks."""

    n: int
    method: str
    exact: Optional[list] = None
    value: Optional[np.ndarray] = None
    blocks: Optional[np.ndarray] = None
    sizes: Optional[np.ndarray] = None
    seed: Optional[int] = None

    def combine(self, coeffs):
        """Apply a linear map (rows of coefficients over the 2*2^n integrals).

        Returns (values, abs_err) where abs_err is three standard errors for
        Monte Carlo and zero otherwise.
        """
        if self.method == "exact":
            vals = [sum((Fraction(c) * v for c, v in zip(row, self.exact) if c), Fraction(0)) for row in coeffs]
            return vals, [0.0] * len(vals)
        A = np.array([[float(c) for c in row] for row in coeffs])
        if self.method == "quadrature":
            return list(A @ self.value), [0.0] * len(A)
        means = self.blocks @ A.T
        val, stderr = numerics.summarize_blocks(means, self.sizes)
        return list(val), list(3 * stderr)


def subset_integrals(
    game: ContinuousGame, spec: NumericsSpec, moment=None, weight=None, sampler=None
) -> SubsetIntegrals:
    """Integrals of ``g`` with voters outside each subset pinned to 1 / to 0.

    ``moment(i, e)`` and ``weight(X)`` let the density-weighted variants reuse
    this routine; by default votes are uniform on the unit cube. In Monte
    Carlo mode a ``sampler(rng, m)`` drawing votes from the weighting
    distribution replaces the weight (importance sampling with weight 1).
    """
    n = game.n
    if n > MAX_SSI_VOTERS:
        raise CapacityError(f"Shapley-Shubik over all queues limited to {MAX_SSI_VOTERS} voters", cap=MAX_SSI_VOTERS)
    mode = _resolve_mode(game, spec)
    if mode == "exact":
        terms = game.polynomial_terms()
        if terms is not None:
            mom = moment or (lambda i, e: Fraction(1, e + 1))
            return SubsetIntegrals(n, "exact", exact=_exact_pinned(terms, n, mom))
        if moment is not None:
            raise ModeError("exact density integrals need a polynomial game")
        return SubsetIntegrals(n, "exact", exact=_embedding_pinned(game.body, n))
    f = (lambda X: _pinned_values(game, X)) if weight is None else (lambda X: _pinned_values(game, X) * weight(X)[:, None])
    if mode == "quadrature":
        est = numerics.integrate(f, n, spec.with_mode("quadrature"))
        return SubsetIntegrals(n, "quadrature", value=np.asarray(est.value))
    if sampler is not None:
        means, sizes = numerics.mc_block_means(lambda X: _pinned_values(game, X), n, spec, sampler=sampler)
    else:
        means, sizes = numerics.mc_block_means(f, n, spec)
    return SubsetIntegrals(n, "monte_carlo", blocks=means, sizes=sizes, seed=spec.seed)


def _permutation_row(n, queue, voter):
    """Coefficients picking out one per-queue term for ``voter``."""
    full = 1 << n
    pos = list(queue).index(voter)
    before = sum(1 << (v - 1) for v in queue[:pos])
    after = before | (1 << (voter - 1))
    row = [0] * (2 * full)
    row[before] += 1
    row[after] -= 1
    row[full + after] += 1
    row[full + before] -= 1
    return row


def _ssi_rows(n):
    full = 1 << n
    pc = popcounts(n)
    nf = math.factorial(n)
    coef = [Fraction(math.factorial(s) * math.factorial(n - 1 - s), nf) for s in range(n)]
    rows = []
    for i in range(n):
        row = [Fraction(0)] * (2 * full)
        bit = 1 << i
        for mask in range(full):
            if mask & bit:
                continue
            c = coef[pc[mask]]
            row[mask] += c
            row[mask | bit] -= c
            row[full + (mask | bit)] += c
            row[full + mask] -= c
        rows.append(row)
    return rows


def _profile(values, errs, sub: SubsetIntegrals, index):
    if sub.method == "exact":
        return exact_profile(values, index=index)
    return PowerProfile(
        tuple(float(v) for v in values),
        method=sub.method,
        seed=sub.seed,
        error_bound=float(max(errs)),
        errors=tuple(errs),
        index=index,
    )


def ssi_continuous(game: ContinuousGame, spec: NumericsSpec = NumericsSpec()) -> PowerProfile:
    """Shapley-Shubik index averaged over all queues of the voters."""
    sub = subset_integrals(game, spec)
    values, errs = sub.combine(_ssi_rows(game.n))
    return _profile(values, errs, sub, "ssi")


def ssi_per_permutation(game: ContinuousGame, spec: NumericsSpec = NumericsSpec(), voters=None):
    """Per-queue integrals ``{(voter, queue): (value, abs_err)}`` for each voter."""
    n = game.n
    voters = voters or range(1, n + 1)
    sub = subset_integrals(game, spec)
    keys, rows = [], []
    for v in voters:
        for q in permutations(range(1, n + 1)):
            keys.append((v, q))
            rows.append(_permutation_row(n, q, v))
    values, errs = sub.combine(rows)
    return {k: (v, e) for k, v, e in zip(keys, values, errs)}


def _bzi_pinned(game, X):
    cols = []
    for i in range(game.n):
        hi = X.copy()
        hi[:, i] = 1.0
        lo = X.copy()
        lo[:, i] = 0.0
        cols.append(game.evaluate(hi) - game.evaluate(lo))
    return np.stack(cols, axis=1)


def bzi_continuous(
    game: ContinuousGame, spec: NumericsSpec = NumericsSpec(), moment=None, weight=None, sampler=None
) -> PowerProfile:
    """Absolute Banzhaf index: mean swing of each voter from vote 0 to vote 1."""
    n = game.n
    mode = _resolve_mode(game, spec)
    if mode == "exact":
        terms = game.polynomial_terms()
        if terms is None:
            if moment is not None:
                raise ModeError("exact density integrals need a polynomial game")
            sub = subset_integrals(game, spec)
            # swing of voter i: pin i to 1 vs 0 with everyone else free
            full = 1 << n
            rows = []
            for i in range(n):
                row = [0] * (2 * full)
                others = (full - 1) ^ (1 << i)
                # voter i outside the kept set: pinned to 1 in the upper half, 0 in the lower
                row[others] += 1
                row[full + others] -= 1
                rows.append(row)
            values, errs = sub.combine(rows)
            return exact_profile(values, index="bzi")
        mom = moment or (lambda i, e: Fraction(1, e + 1))
        values = []
        for i in range(n):
            total = Fraction(0)
            for c, exps in terms:
                if exps[i] == 0:
                    continue
                val = c
                for k, e in enumerate(exps):
                    if k != i:
                        val *= mom(k, e)
                total += val
            values.append(total)
        return exact_profile(values, index="bzi")
    f = (lambda X: _bzi_pinned(game, X)) if weight is None else (lambda X: _bzi_pinned(game, X) * weight(X)[:, None])
    if mode == "monte_carlo" and sampler is not None:
        means, sizes = numerics.mc_block_means(lambda X: _bzi_pinned(game, X), n, spec, sampler=sampler)
        value, stderr = numerics.summarize_blocks(means, sizes)
        est_value, est_err, est_seed = value, 3 * stderr, spec.seed
    else:
        est = numerics.integrate(f, n, spec.with_mode(mode))
        est_value, est_err, est_seed = est.value, est.abs_err, est.seed
    errs = np.broadcast_to(np.asarray(est_err, dtype=float), (n,))
    return PowerProfile(
        tuple(float(v) for v in est_value),
        method=mode,
        seed=est_seed,
        error_bound=float(errs.max()),
        errors=tuple(errs),
        index="bzi",
    )


def banzhaf_total_power(game: ContinuousGame, spec: NumericsSpec = NumericsSpec()) -> float:
    """Sum over voters of the integrated swing, coded directly from the integrand.

    Integrates voter by voter over the other coordinates only (an
    (n-1)-dimensional integral each), independently of :func:`bzi_continuous`.
    """
    n = game.n
    total = 0.0
    for i in range(n):
        def swing(Y, i=i):
            hi = np.insert(Y, i, 1.0, axis=1)
            lo = np.insert(Y, i, 0.0, axis=1)
            return game.evaluate(hi) - game.evaluate(lo)

        mode = "quadrature" if spec.mode in ("auto", "exact") else spec.mode
        total += float(numerics.integrate(swing, n - 1, spec.with_mode(mode)).value)
    return total


# ---------------------------------------------------- weighted median


def median_ssi_shortcut(weights) -> PowerProfile:
    """Shapley-Shubik index of the weighted median rule via the binary game
    ``[sum(w)/2; w]``; refuses weights with a subset summing to exactly half."""
    from .binary import ssi_binary

    w = [Fraction(x) for x in weights]
    total = sum(w)
    n = len(w)
    if any(x < 0 for x in w) or total <= 0:
        raise InputError("weights must be nonnegative with positive sum")
    den = math.lcm(*(x.denominator for x in w))
    wi = [int(x * den) for x in w]
    from .binary import subset_sums

    sums = subset_sums(wi)
    tie = np.flatnonzero(2 * sums == sum(wi))
    if len(tie):
        members = [i + 1 for i in range(n) if int(tie[0]) >> i & 1]
        raise PreconditionError(
            f"voters {members} hold exactly half of the total weight; the weighted median is not unique"
        )
    game = BinaryGame.weighted(total / 2, w)
    prof = ssi_binary(game)
    return exact_profile(prof.values, index="ssi")


# ---------------------------------------------------- structural checks


def _probe_points(game, spec, count=None):
    rng = numerics.block_rng(spec.seed, 2**63)
    m = count or min(spec.mc_samples, 200_000)
    pts = [rng.random((m, game.n))]
    # corners, the centre and the edge midpoints catch boundary cases
    n = game.n
    if n <= 12:
        corners = np.array(list(product((0.0, 1.0), repeat=n)))
        pts.append(corners)
        pts.append(np.where(corners == 1.0, 0.5, 0.0))
    pts.append(np.full((1, n), 0.5))
    return np.vstack(pts)


def _sampled_desirable(game, i, j, X, tol=1e-12):
    Y = X.copy()
    Y[:, [i, j]] = X[:, [j, i]]
    gx, gy = game.evaluate(X), game.evaluate(Y)
    below = X[:, i] <= X[:, j]
    bad1 = below & (gy < gx - tol)
    bad2 = ~below & (gy > gx + tol)
    bad = bad1 | bad2
    return (not bad.any()), (X[np.argmax(bad)] if bad.any() else None)


def structural_checks(game: ContinuousGame, spec: NumericsSpec = NumericsSpec()) -> dict:
    """Proper / strong / constant-sum / complete verdicts and null voters.

    Closed-form families are decided analytically; everything else by
    sampled falsification, where a True verdict means "no counterexample
    found" and a False verdict comes with a witness vote vector.
    """
    body = game.body
    n = game.n
    if isinstance(body, Threshold):
        q = body.quota
        return {
            "method": "analytic",
            "proper": q > Fraction(1, 2),
            "strong": q <= Fraction(1, 2),
            "constant_sum": False,
            "complete": True,
            "null_voters": {i + 1 for i, w in enumerate(body.weights) if w == 0},
            "witnesses": {
                "proper": None if q > Fraction(1, 2) else np.full(n, 0.5),
                "strong": None if q <= Fraction(1, 2) else np.full(n, 0.5),
            },
        }
    if isinstance(body, LinearWeighted):
        return {
            "method": "analytic",
            "proper": True,
            "strong": True,
            "constant_sum": True,
            "complete": True,
            "null_voters": {i + 1 for i, w in enumerate(body.weights) if w == 0},
            "witnesses": {"proper": None, "strong": None},
        }
    if isinstance(body, QuotaWeighted):
        lo, hi = body.quota_fn.dual_gap()
        return {
            "method": "analytic",
            "proper": hi <= 1e-12,
            "strong": lo >= -1e-12,
            "constant_sum": body.quota_fn.is_self_dual(),
            "complete": True,
            "null_voters": {i + 1 for i, w in enumerate(body.weights) if w == 0},
            "witnesses": {"proper": None, "strong": None},
        }
    X = _probe_points(game, spec)
    total = game.evaluate(X) + game.evaluate(1.0 - X)
    over = total > 1 + 1e-12
    under = total < 1 - 1e-12
    nulls = set()
    rng = numerics.block_rng(spec.seed, 2**63 + 1)
    for i in range(n):
        Y = X.copy()
        Y[:, i] = rng.random(len(X))
        Z = X.copy()
        Z[:, i] = 1.0 - X[:, i]
        if np.allclose(game.evaluate(X), game.evaluate(Y), atol=1e-12) and np.allclose(
            game.evaluate(X), game.evaluate(Z), atol=1e-12
        ):
            nulls.add(i + 1)
    complete = True
    for i in range(n):
        for j in range(i + 1, n):
            ij, _ = _sampled_desirable(game, i, j, X)
            ji, _ = _sampled_desirable(game, j, i, X)
            if not (ij or ji):
                complete = False
    return {
        "method": "sampled",
        "proper": not over.any(),
        "strong": not under.any(),
        "constant_sum": not over.any() and not under.any(),
        "complete": complete,
        "null_voters": nulls,
        "witnesses": {
            "proper": X[np.argmax(over)] if over.any() else None,
            "strong": X[np.argmax(under)] if under.any() else None,
        },
    }


def desirability(game: ContinuousGame, i: int, j: int, spec: NumericsSpec = NumericsSpec()) -> str:
    """Sampled comparison of voters ``i`` and ``j`` (1-based)."""
    if i == j:
        raise InputError("desirability needs two distinct voters")
    X = _probe_points(game, spec)
    ij, _ = _sampled_desirable(game, i - 1, j - 1, X)
    ji, _ = _sampled_desirable(game, j - 1, i - 1, X)
    return {(True, True): "equiv", (True, False): "i_succ", (False, True): "j_succ"}.get(
        (ij, ji), "incomparable"
    )


# ---------------------------------------------------- uniqueness probes


def _bisect(pred, lo=0.0, hi=1.0, iters=60):
    """Smallest t in [lo, hi] with pred(t) true, assuming pred is monotone."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def uniqueness_probe(game: ContinuousGame, tol: float = 1e-9) -> dict:
    """Recover the weighted representation from evaluations of ``game`` alone.

    Linear games are probed on unit vectors, quota-weighted games on the
    diagonal (which traces the quota function), threshold games on the
    boundary of the winning region. The recovered values are checked against
    the stored representation.
    """
    body = game.body
    n = game.n
    g = lambda x: float(game.evaluate(np.asarray(x, dtype=float)[None, :])[0])
    if isinstance(body, LinearWeighted):
        w = [g(np.eye(n)[i]) for i in range(n)]
        ok = all(abs(a - float(b)) <= tol for a, b in zip(w, body.weights))
        return {"weights": w, "matches": ok}
    if isinstance(body, QuotaWeighted):
        grid = np.linspace(0, 1, 101)
        q = [g(np.full(n, t)) for t in grid]
        ok = bool(np.allclose(q, body.quota_fn(grid), atol=tol))
        # q(w_i) = g(e_i); invert q along the diagonal where it is strictly increasing
        w = []
        for i in range(n):
            target = g(np.eye(n)[i])
            lo_t = _bisect(lambda t: g(np.full(n, t)) >= target - 1e-15)
            hi_t = _bisect(lambda t: g(np.full(n, t)) > target + 1e-15)
            w.append(lo_t if hi_t - lo_t < 1e-9 else None)
        ok_w = all(a is None or abs(a - float(b)) <= 1e-8 for a, b in zip(w, body.weights))
        return {"quota_on_grid": q, "weights": w, "matches": ok and ok_w}
    if isinstance(body, Threshold):
        if body.quota == 1:
            raise PreconditionError("quota 1: every normalized weight vector gives the same game")
        ones = np.ones(n)
        # the diagonal crosses the quota exactly at t = q
        q = _bisect(lambda t: g(t * ones) >= 1)
        w = []
        for i in range(n):
            e = np.eye(n)[i]
            others = ones - e
            # x_i = 1, others at s: wins iff w_i + s (1 - w_i) >= q
            s1 = _bisect(lambda s: g(e + s * others) >= 1)
            # x_i = 0, others at s: wins iff s (1 - w_i) >= q
            s0 = _bisect(lambda s: g(s * others) >= 1)
            # others at 1, x_i at t: wins iff t w_i + 1 - w_i >= q
            t1 = _bisect(lambda t: g(others + t * e) >= 1)
            if 1e-9 < s1 < 1 - 1e-9:
                w.append((q - s1) / (1 - s1))
            elif s0 < 1 - 1e-9 and g(s0 * others) >= 1:
                w.append(1 - q / s0)
            elif 1e-9 < t1 < 1 - 1e-9:
                w.append((1 - q) / (1 - t1))
            else:
                w.append(0.0 if s0 < 1 - 1e-9 else None)
        if any(v is None for v in w):
            raise PreconditionError("threshold representation is not identifiable from evaluations")
        ok = abs(q - float(body.quota)) <= tol and all(abs(a - float(b)) <= 1e-8 for a, b in zip(w, body.weights))
        return {"quota": q, "weights": w, "matches": ok}
    raise PreconditionError(f"uniqueness probe is defined for linear, threshold and quota-weighted games, not {type(body).__name__}")


def ghat() -> ContinuousGame:
    """(x1^2 + 2 x2^2 + 3 x3^2) / 6."""
    return ContinuousGame.monomials(
        [(Fraction(1, 6), (2, 0, 0)), (Fraction(2, 6), (0, 2, 0)), (Fraction(3, 6), (0, 0, 2))]
    )


def gtilde() -> ContinuousGame:
    """x1 x2^2 x3^3."""
    return ContinuousGame.monomials([(Fraction(1), (1, 2, 3))])
