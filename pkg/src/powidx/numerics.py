"""Integration engine: exact monomial integrals, tensor Gauss-Legendre
quadrature and block-seeded stratified Monte Carlo.

Random streams
--------------
Monte Carlo samples are drawn in ``spec.mc_blocks`` fixed blocks. Block ``b``
of a run with 64-bit seed ``s`` uses numpy's Philox4x64 counter-based
generator with ``key = s`` and the counter's most significant 64-bit word set
to ``b`` (``counter = b << 192``). Blocks therefore never share random numbers,
and each block is a pure function of ``(s, b)``. Block results are reduced in
block order, so the estimate does not depend on how many workers evaluated
the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import CapacityError, InputError
from .profile import IntegralEstimate, NumericsSpec

QUADRATURE_MAX_DIM = 6
QUADRATURE_CHUNK = 1 << 18


def monomial_box_integral(coef, exponents) -> Fraction:
    """Exact integral of ``coef * prod(x_i ** e_i)`` over the unit cube."""
    out = Fraction(coef)
    for e in exponents:
        if int(e) != e or e < 0:
            raise InputError(f"exponents must be nonnegative integers, got {e!r}")
        out /= int(e) + 1
    return out


@lru_cache(maxsize=64)
def gauss_legendre(order: int, lo: float = 0.0, hi: float = 1.0):
    """Gauss-Legendre nodes and weights mapped to ``[lo, hi]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (hi - lo)
    nodes = half * x + 0.5 * (hi + lo)
    nodes.flags.writeable = False
    weights = half * w
    weights.flags.writeable = False
    return nodes, weights


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Counter-based generator for one Monte Carlo block (see module docstring)."""
    bitgen = np.random.Philox(key=int(seed) & (2**64 - 1), counter=int(block) << 192)
    return np.random.Generator(bitgen)


def stratified_uniform(rng: np.random.Generator, m: int, dim: int) -> np.ndarray:
    """Latin hypercube sample of ``m`` points in ``[0, 1)^dim``."""
    out = np.empty((m, dim))
    for k in range(dim):
        out[:, k] = (rng.permutation(m) + rng.random(m)) / m
    return out


def _block_sizes(samples: int, blocks: int):
    blocks = min(blocks, samples)
    base, extra = divmod(samples, blocks)
    return [base + (1 if b < extra else 0) for b in range(blocks)]


def mc_block_means(f, dim, spec: NumericsSpec, lo=0.0, hi=1.0, sampler=None):
    """Evaluate ``f`` on every Monte Carlo block and return the block means.

    The result has shape ``(blocks,) + value_shape``. ``sampler(rng, m)`` may
    override the default stratified uniform design; it must return points in
    the integration box.
    """
    sizes = _block_sizes(spec.mc_samples, spec.mc_blocks)
    scale = (hi - lo) ** dim

    def run(b):
        rng = block_rng(spec.seed, b)
        if sampler is None:
            pts = lo + (hi - lo) * stratified_uniform(rng, sizes[b], dim)
        else:
            pts = sampler(rng, sizes[b])
        vals = np.asarray(f(pts), dtype=float)
        return scale * vals.mean(axis=0)

    if spec.workers == 1:
        means = [run(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            means = list(pool.map(run, range(len(sizes))))
    return np.stack(means), np.asarray(sizes)


def summarize_blocks(means, sizes):
    """Weighted mean of block means and its standard error."""
    w = sizes / sizes.sum()
    value = np.tensordot(w, means, axes=1)
    b = len(sizes)
    dev = means - value
    var = np.tensordot(w, dev * dev, axes=1) * b / (b - 1)
    stderr = np.sqrt(var / b)
    return value, stderr


def _quadrature(f, dim, order, lo, hi):
    if dim > QUADRATURE_MAX_DIM:
        raise CapacityError(
            f"quadrature limited to dimension {QUADRATURE_MAX_DIM}, got {dim}",
            cap=QUADRATURE_MAX_DIM,
        )
    if dim == 0:
        return np.asarray(f(np.zeros((1, 0))), dtype=float)[0]
    nodes, weights = gauss_legendre(order, float(lo), float(hi))
    total = None
    # iterate the leading axes in Python so that chunks stay bounded
    inner = dim if order == 1 else max(1, min(dim, int(math.log(QUADRATURE_CHUNK) / math.log(order))))
    outer = dim - inner
    grids = np.meshgrid(*([nodes] * inner), indexing="ij")
    inner_pts = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([weights] * inner), indexing="ij")
    inner_w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    for idx in product(range(order), repeat=outer):
        head = nodes[list(idx)] if outer else np.zeros(0)
        pts = np.hstack([np.broadcast_to(head, (len(inner_pts), outer)), inner_pts])
        vals = np.asarray(f(pts), dtype=float)
        wt = inner_w * (np.prod(weights[list(idx)]) if outer else 1.0)
        part = np.tensordot(wt, vals, axes=1)
        total = part if total is None else total + part
    return total


def integrate(f, dim: int, spec: NumericsSpec, lo=0.0, hi=1.0) -> IntegralEstimate:
    """Integrate a vectorized ``f: (m, dim) -> (m,) | (m, k)`` over ``[lo, hi]^dim``.

    Quadrature uses a tensor Gauss-Legendre rule of ``spec.quadrature_order``
    points per axis. Monte Carlo reports ``abs_err`` as three standard errors
    estimated from the spread of the block means.
    """
    mode = spec.mode
    if mode == "auto":
        mode = "quadrature" if dim <= QUADRATURE_MAX_DIM else "monte_carlo"
    if mode == "quadrature":
        value = _quadrature(f, dim, spec.quadrature_order, lo, hi)
        zero = np.zeros_like(np.asarray(value, dtype=float))
        return IntegralEstimate(
            value, zero, spec.quadrature_order, None, "quadrature", zero
        )
    if mode == "monte_carlo":
        means, sizes = mc_block_means(f, dim, spec, lo, hi)
        value, stderr = summarize_blocks(means, sizes)
        return IntegralEstimate(
            value, 3.0 * stderr, spec.mc_samples, spec.seed, "monte_carlo", stderr
        )
    raise InputError(f"integrate() does not support mode {mode!r}; use monomial_box_integral")
