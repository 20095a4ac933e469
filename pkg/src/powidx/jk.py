"""(j,k) simple games: ordered j-partitions as level profiles, pivot-based
Shapley-Shubik index and swing-based Banzhaf index.

Levels follow the convention that input level 1 is the strongest approval
and output level 1 the highest outcome; a profile that moves voters to
smaller levels can therefore only move the output to a smaller level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Optional, Sequence

import numpy as np

from .binary import BinaryGame
from .errors import CapacityError, DomainError, InputError
from .numerics import block_rng
from .profile import NumericsSpec, PowerProfile, exact_profile

EXHAUSTIVE_CAP = 10**9


def leq_j(s: Sequence[int], t: Sequence[int], j: Optional[int] = None) -> bool:
    """``s`` below ``t`` in the ordered-partition order.

    For every threshold the voters at level <= threshold in ``s`` also sit at
    level <= threshold in ``t``; i.e. ``t`` is componentwise at most ``s``.
    """
    if len(s) != len(t):
        raise InputError("profiles have different lengths")
    if j is not None and any(not 1 <= v <= j for v in (*s, *t)):
        raise InputError(f"profile levels must lie in 1..{j}")
    return all(b <= a for a, b in zip(s, t))


@dataclass(frozen=True, eq=False)
class JKGame:
    """Table-driven (j,k) game; ``table`` has shape ``(j,) * n`` with entries in 1..k."""

    n: int
    j: int
    k: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1 or self.j < 2 or self.k < 2:
            raise InputError("need n >= 1 and j, k >= 2")
        tab = np.asarray(self.table, dtype=np.int64)
        if tab.shape != (self.j,) * self.n:
            raise InputError(f"table must have shape {(self.j,) * self.n}, got {tab.shape}")
        if tab.min() < 1 or tab.max() > self.k:
            raise InputError(f"outputs must lie in 1..{self.k}")
        tab.flags.writeable = False
        object.__setattr__(self, "table", tab)

    @classmethod
    def from_rule(cls, n, j, k, rule) -> "JKGame":
        """Tabulate ``rule(profile) -> output`` over all ``j^n`` profiles."""
        tab = np.empty((j,) * n, dtype=np.int64)
        for prof in product(range(1, j + 1), repeat=n):
            tab[tuple(p - 1 for p in prof)] = rule(prof)
        return cls(n, j, k, tab)

    @classmethod
    def from_entries(cls, n, j, k, entries) -> "JKGame":
        """Build from ``(profile, output)`` pairs; every profile exactly once."""
        tab = np.zeros((j,) * n, dtype=np.int64)
        seen = np.zeros((j,) * n, dtype=bool)
        for prof, out in entries:
            if len(prof) != n or any(not 1 <= p <= j for p in prof):
                raise InputError(f"invalid profile {prof!r}")
            idx = tuple(p - 1 for p in prof)
            if seen[idx]:
                raise InputError(f"profile {list(prof)} listed twice")
            seen[idx] = True
            tab[idx] = out
        if not seen.all():
            missing = [i + 1 for i in np.argwhere(~seen)[0]]
            raise InputError(f"profile {missing} missing; all {j}^{n} profiles are required")
        return cls(n, j, k, tab)

    def __call__(self, profile) -> int:
        if len(profile) != self.n or any(not 1 <= p <= self.j for p in profile):
            raise InputError(f"invalid profile {profile!r}")
        return int(self.table[tuple(p - 1 for p in profile)])


def is_jk_simple(game: JKGame) -> bool:
    tab = game.table
    if tab[(game.j - 1,) * game.n] != game.k or tab[(0,) * game.n] != 1:
        return False
    # covering pairs: one voter, one level step towards approval
    for axis in range(game.n):
        lower = np.take(tab, range(game.j - 1), axis=axis)
        upper = np.take(tab, range(1, game.j), axis=axis)
        if np.any(lower > upper):
            return False
    return True


def _require_simple(game):
    if not is_jk_simple(game):
        raise DomainError("operation requires a (j,k) simple game")


def _pivot_voters(game: JKGame, orders, profiles):
    """h-pivots for many queues at once.

    ``orders`` has shape (P, n) (0-based voters), ``profiles`` shape (m, n)
    with 0-based levels. Returns a (k-1, P, m) array of 0-based pivot voters.

    After each reveal step the output is bracketed by the best case (later
    voters at level 1) and the worst case (later voters at level j). The
    h-pivot is the voter whose reveal first closes the bracket around the
    boundary between outputs h and h+1.
    """
    orders = np.asarray(orders, dtype=np.int64)
    P, n = orders.shape
    m = len(profiles)
    pidx = np.arange(P)[:, None]
    midx = np.arange(m)[None, :]
    hi = np.zeros((P, m, n), dtype=np.int64)
    lo = np.full((P, m, n), game.j - 1, dtype=np.int64)
    best = np.empty((n + 1, P, m), dtype=np.int64)
    worst = np.empty_like(best)

    def look(a):
        return game.table[tuple(a.reshape(-1, n).T)].reshape(P, m)

    best[0], worst[0] = look(hi), look(lo)
    for t in range(n):
        v = orders[:, t]
        vals = profiles[:, v].T  # (P, m)
        hi[pidx, midx, v[:, None]] = vals
        lo[pidx, midx, v[:, None]] = vals
        best[t + 1], worst[t + 1] = look(hi), look(lo)
    out = np.empty((game.k - 1, P, m), dtype=np.int64)
    for h in range(1, game.k):
        open_ = (best <= h) & (h < worst)
        # the boundary is open at step 0 and closed once everyone has voted
        pos = np.argmax(~open_, axis=0) - 1
        out[h - 1] = np.take_along_axis(orders, pos, axis=1)
    return out


def _pivot_positions(game, order, profiles):
    """(k-1, m) array: position in ``order`` of the h-pivot for each profile."""
    voters = _pivot_voters(game, np.asarray([order]), profiles)[:, 0, :]
    where = np.empty(game.n, dtype=np.int64)
    where[np.asarray(order)] = np.arange(game.n)
    return where[voters]


def pivot(game: JKGame, queue: Sequence[int], profile: Sequence[int], h: int) -> int:
    """The voter whose revealed level first settles the output on one side
    of the boundary between levels ``h`` and ``h + 1``."""
    _require_simple(game)
    if not 1 <= h < game.k:
        raise InputError(f"h must be in 1..{game.k - 1}")
    order = [v - 1 for v in queue]
    if sorted(order) != list(range(game.n)):
        raise InputError(f"queue {queue!r} is not a permutation of 1..{game.n}")
    prof = np.array([[p - 1 for p in profile]])
    pos = _pivot_positions(game, order, prof)[h - 1, 0]
    return order[pos] + 1


def _all_profiles(game):
    return np.array(list(product(range(game.j), repeat=game.n)), dtype=np.int64)


def pivot_counts(game: JKGame, queue: Sequence[int]) -> tuple:
    """Per-voter number of (profile, h) pairs with that voter as h-pivot for ``queue``."""
    _require_simple(game)
    order = [v - 1 for v in queue]
    pos = _pivot_positions(game, order, _all_profiles(game))
    voters = np.asarray(order)[pos.ravel()]
    return tuple(int(c) for c in np.bincount(voters, minlength=game.n))


def ssi_jk(game: JKGame, spec: Optional[NumericsSpec] = None) -> PowerProfile:
    """Shapley-Shubik index: pivot counts over all queues and profiles, divided by n! j^n.

    Every (queue, profile, h) has exactly one h-pivot, so the components sum
    to k - 1; use :func:`powidx.profile.normalize` for shares summing to 1.

    Above the exhaustive cap a Monte Carlo estimate over random (queue,
    profile) pairs is returned when ``spec.mode == "monte_carlo"``.
    """
    _require_simple(game)
    n, j, k = game.n, game.j, game.k
    size = math.factorial(n) * j**n * (k - 1)
    if spec is not None and spec.mode == "monte_carlo":
        return _ssi_jk_sampled(game, spec)
    if size > EXHAUSTIVE_CAP:
        raise CapacityError(
            f"exhaustive (j,k) Shapley-Shubik needs n!*j^n*(k-1) = {size} > {EXHAUSTIVE_CAP}",
            cap=EXHAUSTIVE_CAP,
        )
    profiles = _all_profiles(game)
    totals = np.zeros(n, dtype=np.int64)
    orders = np.array(list(permutations(range(n))), dtype=np.int64)
    chunk = max(1, 2**22 // (len(profiles) * n))
    for start in range(0, len(orders), chunk):
        voters = _pivot_voters(game, orders[start : start + chunk], profiles)
        totals += np.bincount(voters.ravel(), minlength=n)
    den = math.factorial(n) * j**n
    return exact_profile([Fraction(int(c), den) for c in totals], index="ssi")


def _ssi_jk_sampled(game, spec):
    n = game.n
    block_means = []
    per_block = max(1, spec.mc_samples // spec.mc_blocks)
    for b in range(spec.mc_blocks):
        rng = block_rng(spec.seed, b)
        profiles = rng.integers(0, game.j, size=(per_block, n))
        orders = np.argsort(rng.random((per_block, n)), axis=1)
        hits = np.zeros((per_block, n))
        # group samples by queue to reuse the vectorized kernel
        uniq, inverse = np.unique(orders, axis=0, return_inverse=True)
        for u, order in enumerate(uniq):
            rows = np.flatnonzero(inverse.ravel() == u)
            pos = _pivot_positions(game, tuple(order), profiles[rows])
            for h in range(game.k - 1):
                hits[rows, np.asarray(order)[pos[h]]] += 1
        block_means.append(hits.mean(axis=0))
    means = np.array(block_means)
    value = means.mean(axis=0)
    stderr = means.std(axis=0, ddof=1) / math.sqrt(len(means))
    errs = tuple(3 * stderr)
    return PowerProfile(
        tuple(value), method="monte_carlo", seed=spec.seed, error_bound=max(errs), errors=errs, index="ssi"
    )


def swings(game: JKGame, i: int) -> int:
    """Number of output-raising one-step downward shifts of voter ``i``.

    Counts profiles ``S`` where moving voter ``i`` one level away from
    approval (h -> h+1, h < j) changes the output from ``l`` to some ``m > l``.
    """
    _require_simple(game)
    if not 1 <= i <= game.n:
        raise InputError(f"voter {i} out of range")
    tab = game.table
    axis = i - 1
    before = np.take(tab, range(game.j - 1), axis=axis)
    after = np.take(tab, range(1, game.j), axis=axis)
    return int(np.count_nonzero(after > before))


def telescoped_swings(game: JKGame, i: int) -> int:
    """Output spread between voter ``i`` at level j and at level 1, summed over
    the other voters' profiles (counts each level crossed)."""
    tab = game.table
    axis = i - 1
    return int(np.sum(np.take(tab, game.j - 1, axis=axis) - np.take(tab, 0, axis=axis)))


def bzi_jk(game: JKGame) -> PowerProfile:
    n, j, k = game.n, game.j, game.k
    den = j ** (n - 1) * (k - 1)
    return exact_profile([Fraction(swings(game, i), den) for i in range(1, n + 1)], index="bzi")


def embed_binary(game: BinaryGame) -> JKGame:
    """(2,2) form of a binary game: input level 1 = yes, output level 1 = pass."""
    from .binary import is_simple

    if not is_simple(game):
        raise DomainError("embedding needs a simple game")
    n = game.n
    tab = game.table()
    out = np.empty((2,) * n, dtype=np.int64)
    for prof in product((0, 1), repeat=n):
        mask = sum(1 << v for v in range(n) if prof[v] == 0)
        out[prof] = 1 if tab[mask] else 2
    return JKGame(n, 2, 2, out)


def example_jk32() -> JKGame:
    """The (3,2) game: output 1 iff voter 1 picks level 1 and voters 2, 3 do not both pick level 3."""

    def rule(p):
        return 1 if p[0] == 1 and not (p[1] == 3 and p[2] == 3) else 2

    return JKGame.from_rule(3, 3, 2, rule)
