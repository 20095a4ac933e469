"""Nucleolus of continuous simple games.

The excess of a vote vector ``x`` against a weight vector ``w`` is
``g(x) - w.x``; the excess function ``E_w(c)`` is the volume of the set where
the excess is at least ``c``. A weight vector belongs to the nucleolus when its
excess function is minimal in the suffix order: smaller pointwise on some top
interval ``[c, 1]`` with a strictly smaller integral there.

:func:`nucleolus_search` works in two phases. Phase 1 minimizes the maximum
excess over the simplex; when that minimizer is provably unique it is the
answer. Otherwise phase 2 runs a shrinking-cell tournament on estimated
excess curves and reports the surviving region as per-coordinate bounds.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.stats import qmc

from . import numerics
from .continuous import ContinuousGame, MonomialSum
from .errors import InputError
from .profile import NumericsSpec

SIMPLEX_TOL = 1e-12


def _check_w(w, n):
    w = np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise InputError(f"weight vector must have length {n}")
    if np.any(w < -SIMPLEX_TOL) or abs(w.sum() - 1.0) > 1e-9:
        raise InputError("weight vector must be nonnegative and sum to 1")
    return w


def excess(game: ContinuousGame, x, w) -> float:
    w = _check_w(w, game.n)
    return game(x) - float(np.dot(w, x))


# ------------------------------------------------------------ max excess


def _separable_parts(game):
    """Per-coordinate univariate polynomials when every term has one variable."""
    body = game.body
    if not isinstance(body, MonomialSum):
        return None
    parts = [dict() for _ in range(game.n)]
    for c, exps in body.terms:
        used = [i for i, e in enumerate(exps) if e]
        if len(used) != 1:
            return None
        i = used[0]
        parts[i][exps[i]] = parts[i].get(exps[i], 0.0) + float(c)
    return [np.array([p.get(k, 0.0) for k in range(max(p, default=0) + 1)]) for p in parts]


def _coordinate_candidates(poly, wi):
    """0, 1 and interior stationary points of ``poly(t) - wi * t`` on [0, 1]."""
    p = np.polynomial.Polynomial(poly) - np.polynomial.Polynomial([0.0, wi])
    cands = [0.0, 1.0]
    d = p.deriv()
    if d.degree() >= 1 or (d.degree() == 0 and d.coef[0] == 0):
        for r in np.atleast_1d(d.roots()):
            if abs(r.imag) < 1e-12 and 0 < r.real < 1:
                cands.append(float(r.real))
    return p, cands


@dataclass(frozen=True)
class MaxExcess:
    value: float
    argmax: np.ndarray
    heuristic: bool
    candidates: int


def max_excess(game: ContinuousGame, w, starts: int = 64, seed: int = 0) -> MaxExcess:
    """Maximum of ``g(x) - w.x`` over the unit cube.

    Separable monomial sums are solved exactly by enumerating the stationary
    candidates of each coordinate. Other games use corners plus Sobol starts
    polished by bounded quasi-Newton steps; the result is flagged heuristic.
    """
    n = game.n
    w = _check_w(w, n)
    parts = _separable_parts(game)
    if parts is not None:
        per = [_coordinate_candidates(parts[i], w[i]) for i in range(n)]
        best, arg, count = -np.inf, None, 0
        for combo in product(*(c for _, c in per)):
            count += 1
            val = sum(float(per[i][0](combo[i])) for i in range(n))
            if val > best + 1e-15:
                best, arg = val, np.array(combo)
        return MaxExcess(float(best), arg, False, count)

    corners = np.array(list(product((0.0, 1.0), repeat=n)))
    m = max(starts - len(corners), 1)
    sob = qmc.Sobol(n, scramble=True, seed=seed).random(1 << math.ceil(math.log2(max(m, 2))))
    pts = np.vstack([corners, sob[: max(m, 0)], qmc.Sobol(n, scramble=True, seed=seed + 1).random(256)])
    vals = game.evaluate(pts) - pts @ w
    order = np.argsort(-vals)
    best = float(vals[order[0]])
    arg = pts[order[0]].copy()
    f = lambda x: -(float(game.evaluate(x[None, :])[0]) - float(x @ w))
    for idx in order[:4]:
        res = minimize(f, pts[idx], method="L-BFGS-B", bounds=[(0.0, 1.0)] * n)
        if -res.fun > best:
            best, arg = float(-res.fun), np.clip(res.x, 0, 1)
    return MaxExcess(best, arg, True, len(pts))


def corner_bound_lp(game: ContinuousGame):
    """Minimize the largest corner excess ``g(1_S) - w(S)`` over the simplex.

    Returns (w, t, active) where ``active`` lists the corners attaining t.
    """
    n = game.n
    corners = np.array(list(product((0.0, 1.0), repeat=n)))
    gv = game.evaluate(corners)
    # variables: w_1..w_n, t ; constraint g(S) - w(S) <= t
    A = np.hstack([-corners, -np.ones((len(corners), 1))])
    b = -gv
    res = linprog(
        np.r_[np.zeros(n), 1.0],
        A_ub=A,
        b_ub=b,
        A_eq=np.r_[np.ones(n), 0.0][None, :],
        b_eq=[1.0],
        bounds=[(0, 1)] * n + [(None, None)],
        method="highs",
    )
    w, t = res.x[:n], float(res.x[n])
    exc = gv - corners @ w
    active = corners[exc >= t - 1e-9]
    return w, t, active


def _strict_minimizer(w, active, tol=1e-9):
    """True if no feasible simplex direction keeps every active corner excess from rising."""
    n = len(w)
    grads = -active  # gradient in w of g(1_S) - w(S)
    grads = grads[np.any(grads != 0, axis=1)]
    bounds = [((0 if w[j] <= tol else -1), 1) for j in range(n)]
    for j in range(n):
        for s in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = -s
            res = linprog(
                c,
                A_ub=grads if len(grads) else None,
                b_ub=np.zeros(len(grads)) if len(grads) else None,
                A_eq=np.ones((1, n)),
                b_eq=[0.0],
                bounds=bounds,
                method="highs",
            )
            if res.status == 0 and -res.fun > tol:
                return False
    return True


# ----------------------------------------------------------- excess curves


@dataclass
class ExcessCurve:
    """Estimated excess function on a descending grid of levels.

    ``blocks`` keeps the per-block estimates so that two curves built from
    the same random stream can be compared through paired differences.
    """

    w: np.ndarray
    grid: np.ndarray
    volumes: np.ndarray
    stderr: np.ndarray
    blocks: Optional[np.ndarray] = None
    stream: Optional[tuple] = None

    def __post_init__(self):
        if len(self.grid) == 0:
            raise InputError("excess curve needs a nonempty grid")


def curve_grid(level: float = 1.0, count: int = 64, closest: float = 1e-4, depth: Optional[float] = None) -> np.ndarray:
    """Descending levels: ``level`` itself, then ``level - d`` with gaps ``d``
    spaced geometrically from ``closest`` to ``depth`` (by default down to the
    bottom of the excess range at -1)."""
    span = level + 1.0 if depth is None else min(depth, level + 1.0)
    if span <= closest:
        return np.array([level])
    d = np.geomspace(closest, span, count - 1)
    return np.r_[level, level - d]


class CurveSampler:
    """Shared random stream for excess-curve estimates.

    For polynomial games one coordinate (the one of lowest degree) is
    integrated exactly: with the others fixed the excess is a univariate
    polynomial, and the length of its superlevel set in [0, 1] comes from its
    real roots. The remaining coordinates are Latin-hypercube samples drawn
    per block from the counter-based stream; every weight vector reuses the
    same points.
    """

    def __init__(self, game: ContinuousGame, spec: NumericsSpec):
        self.game = game
        self.spec = spec
        n = game.n
        terms = game.polynomial_terms()
        self.terms = terms
        if terms is not None:
            degs = [max(e[i] for _, e in terms) for i in range(n)]
            self.k = int(np.argmin(degs))
            self.degree = max(degs[self.k], 1)
            dim = n - 1
        else:
            self.k = None
            dim = n
        sizes = numerics._block_sizes(spec.mc_samples, spec.mc_blocks)
        self.sizes = np.asarray(sizes)
        self.samples = []
        for b, m in enumerate(sizes):
            rng = numerics.block_rng(spec.seed, b)
            self.samples.append(numerics.stratified_uniform(rng, m, dim) if dim else np.zeros((m, 0)))

    def _coefficients(self, Y, w):
        """(m, degree+1) ascending coefficients of the excess along coordinate k."""
        n, k = self.game.n, self.k
        others = [i for i in range(n) if i != k]
        C = np.zeros((len(Y), self.degree + 1))
        for c, exps in self.terms:
            val = float(c) * np.ones(len(Y))
            for col, i in enumerate(others):
                if exps[i]:
                    val = val * Y[:, col] ** exps[i]
            C[:, exps[k]] += val
        C[:, 1] -= w[k]
        C[:, 0] -= Y @ w[others] if others else 0.0
        return C

    def block_volumes(self, w, grid):
        """(blocks, len(grid)) array of per-block volume estimates."""
        out = np.empty((len(self.samples), len(grid)))
        for b, Y in enumerate(self.samples):
            if self.k is None:
                e = self.game.evaluate(Y) - Y @ w
                out[b] = [(e >= c).mean() for c in grid]
                continue
            C = self._coefficients(Y, w)
            if C.shape[1] <= 3:
                out[b] = _low_degree_lengths(C, grid).mean(axis=1)
                continue
            for j, c in enumerate(grid):
                D = C.copy()
                D[:, 0] -= c
                out[b, j] = _superlevel_length(D).mean()
        return out


def _low_degree_lengths(C, grid):
    """(len(grid), m) superlevel lengths for polynomials of degree <= 2,
    broadcasting the level over all rows in closed form."""
    c = np.asarray(grid, dtype=float)[:, None]
    a0 = C[None, :, 0] - c
    a1 = C[None, :, 1]
    a2 = C[None, :, 2] if C.shape[1] == 3 else np.zeros_like(a1)
    with np.errstate(divide="ignore", invalid="ignore"):
        if not np.any(a2):
            lin = C[:, 1]
            if np.all(lin != 0):
                r = np.clip((c - C[None, :, 0]) * (1.0 / lin)[None, :], 0.0, 1.0)
                return np.where(lin[None, :] > 0, 1.0 - r, r)
            r = np.clip(-a0 / a1, 0.0, 1.0)
            return np.where(a1 > 0, 1.0 - r, np.where(a1 < 0, r, (a0 >= 0).astype(float)))
        disc = a1 * a1 - 4 * a2 * a0
        sq = np.sqrt(np.where(disc >= 0, disc, 0.0))
        qq = -0.5 * (a1 + np.copysign(sq, a1))
        quad = a2 != 0
        r1 = np.where(quad, qq / a2, np.where(a1 != 0, -a0 / a1, 0.0))
        r2 = np.where(quad & (qq != 0), a0 / qq, r1)
    real = disc >= 0
    r1 = np.where(real, np.clip(r1, 0, 1), 0.0)
    r2 = np.where(real, np.clip(r2, 0, 1), 0.0)
    lo_r, hi_r = np.minimum(r1, r2), np.maximum(r1, r2)
    pts = (np.zeros_like(lo_r), lo_r, hi_r, np.ones_like(lo_r))
    total = np.zeros_like(lo_r)
    for left, right in zip(pts, pts[1:]):
        mid = 0.5 * (left + right)
        val = (a2 * mid + a1) * mid + a0
        total += (right - left) * (val >= 0)
    return total


def _real_roots(C):
    """Real roots per row of ascending coefficients (m, d+1), padded with NaN."""
    m, d1 = C.shape
    d = d1 - 1
    if d == 1:
        a1 = C[:, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(a1 != 0, -C[:, 0] / a1, np.nan)
        return r[:, None]
    if d == 2:
        a, b, c = C[:, 2], C[:, 1], C[:, 0]
        disc = b * b - 4 * a * c
        with np.errstate(divide="ignore", invalid="ignore"):
            sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
            # numerically stable pair
            qq = -0.5 * (b + np.copysign(sq, b))
            r1 = np.where(a != 0, qq / a, np.where(b != 0, -c / b, np.nan))
            r2 = np.where(a != 0, c / qq, np.nan)
        return np.stack([r1, r2], axis=1)
    lead = C[:, -1]
    lead = np.where(np.abs(lead) < 1e-14, np.copysign(1e-14, lead + 0.0), lead)
    comp = np.zeros((m, d, d))
    comp[:, 1:, :-1] = np.eye(d - 1)
    comp[:, :, -1] = -C[:, :-1] / lead[:, None]
    ev = np.linalg.eigvals(comp)
    return np.where(np.abs(ev.imag) < 1e-9, ev.real, np.nan)


def _superlevel_length(C):
    """Measure of {t in [0,1] : sum C[:, p] t^p >= 0} per row."""
    roots = _real_roots(C)
    roots = np.where((roots > 0) & (roots < 1), roots, 0.0)
    pts = np.sort(np.hstack([np.zeros((len(C), 1)), roots, np.ones((len(C), 1))]), axis=1)
    mids = 0.5 * (pts[:, 1:] + pts[:, :-1])
    vals = np.zeros_like(mids)
    for p in range(C.shape[1] - 1, -1, -1):
        vals = vals * mids + C[:, p : p + 1]
    return np.sum(np.diff(pts, axis=1) * (vals >= 0), axis=1)


def excess_curve(game: ContinuousGame, w, grid=None, spec: NumericsSpec = NumericsSpec(), sampler=None) -> ExcessCurve:
    """Monte Carlo estimate of ``E_w(c)`` on a descending grid."""
    w = _check_w(w, game.n)
    grid = np.asarray(curve_grid() if grid is None else grid, dtype=float)
    if len(grid) == 0:
        raise InputError("excess curve needs a nonempty grid")
    if np.any(np.diff(grid) > 0):
        raise InputError("grid must be descending")
    sampler = sampler or CurveSampler(game, spec)
    blocks = sampler.block_volumes(w, grid)
    value, stderr = numerics.summarize_blocks(blocks, sampler.sizes)
    return ExcessCurve(w, grid, value, stderr, blocks, (spec.seed, tuple(sampler.sizes)))


def _trapezoid_suffix(grid, values):
    """Cumulative trapezoidal integrals from the top of the grid downwards."""
    seg = 0.5 * (values[..., 1:] + values[..., :-1]) * (grid[:-1] - grid[1:])
    return np.concatenate([np.zeros(values.shape[:-1] + (1,)), np.cumsum(seg, axis=-1)], axis=-1)


def compare_curves(a: ExcessCurve, b: ExcessCurve, sigmas: float = 3.0) -> str:
    """Suffix order between two curves: ``a_less``, ``b_less`` or ``indistinguishable``.

    Scanning down from the top level, the first suffix on which one curve
    stays below the other (up to ``sigmas`` standard errors pointwise) with
    an integral smaller by more than ``sigmas`` standard errors decides.
    """
    if a.grid.shape != b.grid.shape or not np.array_equal(a.grid, b.grid):
        raise InputError("curves must share the same grid")
    grid = a.grid
    paired = (
        a.blocks is not None
        and b.blocks is not None
        and a.stream is not None
        and a.stream == b.stream
        and a.blocks.shape == b.blocks.shape
    )
    diff = a.volumes - b.volumes
    if paired:
        sizes = np.asarray(a.stream[1], dtype=float)
        dblocks = a.blocks - b.blocks
        _, sd = numerics.summarize_blocks(dblocks, sizes)
        _, si = numerics.summarize_blocks(_trapezoid_suffix(grid, dblocks), sizes)
    else:
        sd = np.hypot(a.stderr, b.stderr)
        ia = _trapezoid_suffix(grid, a.stderr)
        ib = _trapezoid_suffix(grid, b.stderr)
        si = np.hypot(ia, ib)
    integ = _trapezoid_suffix(grid, diff)
    a_below = np.cumsum(diff > sigmas * sd) == 0
    b_below = np.cumsum(-diff > sigmas * sd) == 0
    for k in range(1, len(grid)):
        if a_below[k] and integ[k] < -sigmas * si[k]:
            return "a_less"
        if b_below[k] and integ[k] > sigmas * si[k]:
            return "b_less"
    return "indistinguishable"


# ----------------------------------------------------------------- search


@dataclass
class NucleolusResult:
    w_star: np.ndarray
    max_excess: float
    phase: str
    box_bounds: list
    rounds: int = 0
    curves: list = field(default_factory=list, repr=False)
    heuristic: bool = False

    def dump_csv(self, path):
        """Write (w..., c, volume, stderr) rows for every evaluated curve."""
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            n = len(self.w_star)
            wr.writerow([f"w{i + 1}" for i in range(n)] + ["c", "volume", "stderr"])
            for cv in self.curves:
                for c, v, s in zip(cv.grid, cv.volumes, cv.stderr):
                    wr.writerow([repr(float(x)) for x in cv.w] + [repr(float(c)), repr(float(v)), repr(float(s))])


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 32
    grid_points: int = 64
    closest: float = 1e-5
    depth: float = 4e-3  # curves are compared on [level - depth, level]
    split: Optional[int] = None  # children per axis; default gives about 8 per cell
    min_width: float = 2e-5
    max_rounds: int = 12
    max_cells: int = 48


def _full_w(v):
    return np.r_[v, 1.0 - v.sum()]


def _phase1(game, spec, cfg):
    n = game.n
    if _separable_parts(game) is not None:
        w, t, active = corner_bound_lp(game)
        w = np.clip(w, 0, None)
        w /= w.sum()
        me = max_excess(game, w)
        if abs(me.value - t) <= 1e-9 and _strict_minimizer(w, active):
            return w, me.value, True, False
    # Nelder-Mead over the first n-1 coordinates with restarts
    rng = numerics.block_rng(spec.seed, 2**62)

    def obj(v):
        if np.any(v < 0) or v.sum() > 1:
            return 10.0 + float(np.sum(np.clip(-v, 0, None)) + max(v.sum() - 1, 0))
        return max_excess(game, _full_w(v), starts=16, seed=spec.seed).value

    best_v, best_f = None, np.inf
    finals = []
    for r in range(cfg.restarts):
        start = rng.dirichlet(np.ones(n))[: n - 1]
        res = minimize(obj, start, method="Nelder-Mead", options={"xatol": 1e-7, "fatol": 1e-10, "maxiter": 400})
        finals.append((res.fun, res.x))
        if res.fun < best_f:
            best_f, best_v = res.fun, res.x
    w = _full_w(np.clip(best_v, 0, 1))
    return w, float(best_f), False, True


class _Cell:
    __slots__ = ("lo", "hi", "curve")

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.curve = None

    @property
    def center(self):
        v = 0.5 * (self.lo + self.hi)
        s = v.sum()
        if s > 1:
            v = v / s
        return _full_w(v)

    def feasible(self):
        return self.lo.sum() <= 1 + 1e-12

    def touches(self, other, eps=1e-12):
        return bool(np.all(self.lo <= other.hi + eps) and np.all(other.lo <= self.hi + eps))

    def split(self, k):
        axes = [np.linspace(l, h, k + 1) for l, h in zip(self.lo, self.hi)]
        out = []
        for idx in product(range(k), repeat=len(self.lo)):
            lo = [axes[d][i] for d, i in enumerate(idx)]
            hi = [axes[d][i + 1] for d, i in enumerate(idx)]
            c = _Cell(lo, hi)
            if c.feasible():
                out.append(c)
        return out


def _default_split(dim):
    return max(2, round(8 ** (1 / dim))) if dim else 1


def nucleolus_search(game: ContinuousGame, spec: NumericsSpec = NumericsSpec(), config: SearchConfig = SearchConfig()) -> NucleolusResult:
    """Two-phase search for the nucleolus of a small continuous game (n <= 4)."""
    n = game.n
    if n > 4:
        from .errors import CapacityError

        raise CapacityError("nucleolus search is limited to 4 voters", cap=4)
    if n == 1:
        return NucleolusResult(np.array([1.0]), 0.0, "max_excess_unique", [(1.0, 1.0)])
    w1, m1, certified, heuristic = _phase1(game, spec, config)
    if certified:
        return NucleolusResult(w1, m1, "max_excess_unique", [(float(v), float(v)) for v in w1], heuristic=False)

    dim = n - 1
    k = config.split or _default_split(dim)
    grid = curve_grid(m1, config.grid_points, config.closest, config.depth)
    sampler = CurveSampler(game, spec)
    evaluated = []

    def curve(cell):
        if cell.curve is None:
            cell.curve = excess_curve(game, cell.center, grid, spec, sampler)
            evaluated.append(cell.curve)
        return cell.curve

    cells = _Cell(np.zeros(dim), np.ones(dim)).split(k)
    rounds = 0
    kept = cells
    while True:
        rounds += 1
        champ = cells[0]
        for c in cells[1:]:
            if compare_curves(curve(c), curve(champ)) == "a_less":
                champ = c
        kept = [
            c
            for c in cells
            if c is champ or c.touches(champ) or compare_curves(curve(c), curve(champ)) == "indistinguishable"
        ]
        width = max(float(np.max(c.hi - c.lo)) for c in kept)
        if width <= config.min_width or rounds >= config.max_rounds or len(kept) * k**dim > config.max_cells:
            break
        cells = [child for c in kept for child in c.split(k)]

    lo = np.min([c.lo for c in kept], axis=0)
    hi = np.max([c.hi for c in kept], axis=0)
    box = [(float(a), float(b)) for a, b in zip(lo, hi)]
    box.append((float(max(0.0, 1 - hi.sum())), float(min(1.0, 1 - lo.sum()))))
    w_star = champ.center
    me = max_excess(game, w_star, seed=spec.seed)
    return NucleolusResult(w_star, me.value, "curve_refined", box, rounds, evaluated, heuristic=me.heuristic)


def ghat_corner_excesses(w):
    """Corner excesses of (x1^2 + 2 x2^2 + 3 x3^2)/6 as a dict keyed by corner."""
    w = np.asarray(w, dtype=float)
    g = {c: (c[0] + 2 * c[1] + 3 * c[2]) / 6 for c in product((0, 1), repeat=3)}
    return {c: g[c] - float(np.dot(w, c)) for c in g}
