"""Binary simple games: representations, structural predicates, Shapley-Shubik
and Banzhaf indices, and the (lexicographic) nucleolus.

Coalitions are bit masks: voter ``i`` (1-based) is bit ``i - 1``. Every game
can materialize its full winning table as a boolean numpy array indexed by
mask, which is what all the exhaustive operations work on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import CapacityError, DomainError, InputError
from .profile import PowerProfile, exact_profile

MAX_VOTERS = 24
MAX_NUCLEOLUS_VOTERS = 12


@dataclass(frozen=True)
class Coalition:
    n: int
    mask: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VOTERS:
            raise InputError(f"voter count must be in [0, {MAX_VOTERS}], got {self.n}")
        if self.mask < 0 or self.mask >> self.n:
            raise InputError(f"coalition mask {self.mask:#x} has bits beyond voter {self.n}")

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> "Coalition":
        mask = 0
        for i in members:
            if not 1 <= i <= n:
                raise InputError(f"voter {i} out of range 1..{n}")
            mask |= 1 << (i - 1)
        return cls(n, mask)

    @property
    def members(self) -> tuple:
        return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

    def complement(self) -> "Coalition":
        return Coalition(self.n, ((1 << self.n) - 1) ^ self.mask)

    def __len__(self):
        return bin(self.mask).count("1")

    def __contains__(self, voter):
        return bool(self.mask >> (voter - 1) & 1)

    def __repr__(self):
        return "{" + ",".join(map(str, self.members)) + "}"


def _coalition_list(n, masks):
    return [Coalition(n, int(m)) for m in masks]


def popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1, dtype=np.uint8)
    for _ in range(n):
        pc = np.concatenate([pc, pc + 1])
    return pc


def subset_sums(values: Sequence[int]) -> np.ndarray:
    """``out[mask] = sum(values[i] for bits i of mask)``."""
    out = np.zeros(1, dtype=np.int64)
    for v in values:
        out = np.concatenate([out, out + v])
    return out


# ---------------------------------------------------------------- bodies


@dataclass(frozen=True)
class WeightedRep:
    quota: Fraction
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "quota", Fraction(self.quota))
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        if self.quota <= 0:
            raise InputError("quota must be positive")
        if any(w < 0 for w in self.weights):
            raise InputError("weights must be nonnegative")
        if not any(w > 0 for w in self.weights):
            raise InputError("at least one weight must be positive")
        if sum(self.weights) < self.quota:
            raise InputError("the grand coalition must reach the quota")

    @property
    def n(self):
        return len(self.weights)

    def normalized(self) -> "WeightedRep":
        total = sum(self.weights)
        return WeightedRep(self.quota / total, tuple(w / total for w in self.weights))

    def integer_form(self):
        """Scale quota and weights to integers with a common denominator."""
        den = reduce(math.lcm, (x.denominator for x in (self.quota, *self.weights)), 1)
        return int(self.quota * den), [int(w * den) for w in self.weights], den

    def __str__(self):
        return f"[{self.quota};" + ",".join(str(w) for w in self.weights) + "]"


@dataclass(frozen=True)
class ExplicitTable:
    bits: bytes  # one byte per coalition mask, 0 or 1


@dataclass(frozen=True)
class Meet:
    parts: tuple


@dataclass(frozen=True)
class Join:
    parts: tuple


@dataclass(frozen=True, eq=False)
class BinaryGame:
    """A 0/1 valuation of the ``2^n`` coalitions of ``n`` voters."""

    n: int
    body: object
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_VOTERS:
            raise CapacityError(f"binary games support 1..{MAX_VOTERS} voters, got {self.n}", cap=MAX_VOTERS)

    # constructors -----------------------------------------------------
    @classmethod
    def weighted(cls, quota, weights) -> "BinaryGame":
        rep = WeightedRep(quota, weights)
        return cls(rep.n, rep)

    @classmethod
    def from_table(cls, n: int, table) -> "BinaryGame":
        arr = np.asarray(table, dtype=bool)
        if arr.shape != (1 << n,):
            raise InputError(f"table must have 2^{n} entries, got {arr.shape}")
        return cls(n, ExplicitTable(arr.astype(np.uint8).tobytes()))

    @classmethod
    def from_winning(cls, n: int, winning: Iterable[Iterable[int]]) -> "BinaryGame":
        """Game whose winning coalitions are exactly the listed ones (1-based)."""
        arr = np.zeros(1 << n, dtype=bool)
        for members in winning:
            arr[Coalition.of(n, members).mask] = True
        return cls.from_table(n, arr)

    @classmethod
    def from_minimal_winning(cls, n: int, minimal: Iterable[Iterable[int]]) -> "BinaryGame":
        """Monotone game generated by the given (up-closed) coalitions."""
        masks = np.arange(1 << n)
        arr = np.zeros(1 << n, dtype=bool)
        for members in minimal:
            m = Coalition.of(n, members).mask
            arr |= (masks & m) == m
        return cls.from_table(n, arr)

    # evaluation -------------------------------------------------------
    def table(self) -> np.ndarray:
        if "table" not in self._cache:
            self._cache["table"] = self._build_table()
        return self._cache["table"]

    def _build_table(self):
        body = self.body
        if isinstance(body, ExplicitTable):
            return np.frombuffer(body.bits, dtype=np.uint8).astype(bool)
        if isinstance(body, WeightedRep):
            q, w, _ = body.integer_form()
            return subset_sums(w) >= q
        if isinstance(body, Meet):
            return np.logical_and.reduce([p.table() for p in body.parts])
        if isinstance(body, Join):
            return np.logical_or.reduce([p.table() for p in body.parts])
        raise InputError(f"unknown game body {type(body).__name__}")

    def __call__(self, s) -> int:
        return eval_binary(self, s)

    def __repr__(self):
        if isinstance(self.body, WeightedRep):
            return f"BinaryGame{self.body}"
        return f"BinaryGame(n={self.n}, {type(self.body).__name__})"


def _as_mask(game: BinaryGame, s) -> int:
    if isinstance(s, Coalition):
        if s.n != game.n:
            raise InputError(f"coalition width {s.n} does not match game width {game.n}")
        return s.mask
    return Coalition.of(game.n, s).mask


def eval_binary(game: BinaryGame, s) -> int:
    """Value (0 or 1) of coalition ``s`` (a Coalition or iterable of voters)."""
    mask = _as_mask(game, s)
    body = game.body
    if isinstance(body, WeightedRep):
        total = sum((w for i, w in enumerate(body.weights) if mask >> i & 1), Fraction(0))
        return int(total >= body.quota)
    if isinstance(body, Meet):
        return min(eval_binary(p, Coalition(game.n, mask)) for p in body.parts)
    if isinstance(body, Join):
        return max(eval_binary(p, Coalition(game.n, mask)) for p in body.parts)
    return int(game.table()[mask])


def _swing_table(tab: np.ndarray, i: int) -> np.ndarray:
    """Boolean array over masks without bit ``i``: True where adding ``i`` flips 0 -> 1."""
    masks = np.arange(len(tab))
    without = masks[(masks >> i & 1) == 0]
    return without, tab[without | (1 << i)] & ~tab[without]


# ------------------------------------------------------------ predicates


def is_simple(game: BinaryGame) -> bool:
    tab = game.table()
    if tab[0] or not tab[-1]:
        return False
    masks = np.arange(len(tab))
    for i in range(game.n):
        without = masks[(masks >> i & 1) == 0]
        if np.any(tab[without] & ~tab[without | (1 << i)]):
            return False
    return True


def _require_simple(game: BinaryGame):
    if not is_simple(game):
        raise DomainError("operation requires a simple (monotone Boolean) game")


@dataclass(frozen=True)
class CoalitionFamilies:
    winning: list
    losing: list
    minimal_winning: list
    maximal_losing: list
    shift_minimal_winning: Optional[list] = None
    shift_maximal_losing: Optional[list] = None


def _minimal_maximal(game):
    tab = game.table()
    n = game.n
    masks = np.arange(len(tab))
    minimal = tab.copy()
    maximal = ~tab
    for i in range(n):
        has = (masks >> i & 1) == 1
        # a winning S with S - {i} winning is not minimal
        minimal[has] &= ~tab[masks[has] ^ (1 << i)]
        # a losing S with S + {i} losing is not maximal
        maximal[~has] &= tab[masks[~has] | (1 << i)]
    return minimal, maximal


def _right_shifts(mask, n):
    """Direct right-shifts: swap voter i for i+1, or drop voter n."""
    for i in range(n - 1):
        if mask >> i & 1 and not mask >> (i + 1) & 1:
            yield mask ^ (1 << i) ^ (1 << (i + 1))
    if mask >> (n - 1) & 1:
        yield mask ^ (1 << (n - 1))


def _left_shifts(mask, n):
    """Direct left-shifts: swap voter i for i-1, or add voter n."""
    for i in range(1, n):
        if mask >> i & 1 and not mask >> (i - 1) & 1:
            yield mask ^ (1 << i) ^ (1 << (i - 1))
    if not mask >> (n - 1) & 1:
        yield mask | (1 << (n - 1))


def classify_coalitions(game: BinaryGame, shifts: bool = False) -> CoalitionFamilies:
    """Winning/losing families, minimal winning and maximal losing coalitions.

    With ``shifts=True`` also the shift-minimal winning and shift-maximal
    losing coalitions; these need a complete game whose voters are already
    labelled in weakly decreasing desirability (1 >= 2 >= ... >= n).
    """
    _require_simple(game)
    n = game.n
    tab = game.table()
    masks = np.arange(len(tab))
    minimal, maximal = _minimal_maximal(game)
    fam = dict(
        winning=_coalition_list(n, masks[tab]),
        losing=_coalition_list(n, masks[~tab]),
        minimal_winning=_coalition_list(n, masks[minimal]),
        maximal_losing=_coalition_list(n, masks[maximal]),
    )
    if shifts:
        for i in range(1, n):
            if desirability(game, i, i + 1) in ("j_succ", "incomparable"):
                raise DomainError(
                    f"shift families need 1 >= 2 >= ... >= n; voter {i} is not at least as desirable as {i + 1}"
                )
        # in a complete game with this ordering, checking direct shifts suffices
        fam["shift_minimal_winning"] = [
            Coalition(n, int(m))
            for m in masks[minimal]
            if all(not tab[t] for t in _right_shifts(int(m), n))
        ]
        fam["shift_maximal_losing"] = [
            Coalition(n, int(m))
            for m in masks[~tab]
            if all(tab[t] for t in _left_shifts(int(m), n))
        ]
    return CoalitionFamilies(**fam)


def properties(game: BinaryGame) -> dict:
    """Proper / strong / constant-sum verdicts with violating coalitions."""
    _require_simple(game)
    tab = game.table()
    full = len(tab) - 1
    masks = np.arange(len(tab))
    comp = tab[full ^ masks]
    improper = masks[tab & comp]
    weak = masks[~tab & ~comp]
    out = {
        "proper": len(improper) == 0,
        "strong": len(weak) == 0,
        "witnesses": {
            "proper": Coalition(game.n, int(improper[0])) if len(improper) else None,
            "strong": Coalition(game.n, int(weak[0])) if len(weak) else None,
        },
    }
    out["constant_sum"] = out["proper"] and out["strong"]
    return out


def quota_interval(rep) -> tuple:
    """Interval ``(q_lo, q_hi]`` of normalized quotas inducing the same game.

    ``q_lo`` is the largest normalized weight of a losing coalition and
    ``q_hi`` the smallest normalized weight of a winning coalition.
    """
    if isinstance(rep, BinaryGame):
        rep = rep.body
    if not isinstance(rep, WeightedRep):
        raise DomainError("quota_interval needs a weighted representation")
    q, w, _ = rep.integer_form()
    total = sum(w)
    if total == 0:
        raise DomainError("all-zero weights")
    sums = subset_sums(w)
    win = sums >= q
    lo = Fraction(int(sums[~win].max()), total)
    hi = Fraction(int(sums[win].min()), total)
    return lo, hi


def desirability(game: BinaryGame, i: int, j: int) -> str:
    """Compare voters ``i`` and ``j``: 'i_succ', 'j_succ', 'equiv' or 'incomparable'."""
    if i == j:
        raise InputError("desirability needs two distinct voters")
    n = game.n
    for v in (i, j):
        if not 1 <= v <= n:
            raise InputError(f"voter {v} out of range 1..{n}")
    _require_simple(game)
    tab = game.table()
    masks = np.arange(len(tab))
    bi, bj = 1 << (i - 1), 1 << (j - 1)
    rest = masks[(masks & (bi | bj)) == 0]
    with_i, with_j = tab[rest | bi], tab[rest | bj]
    i_ge = not np.any(with_j & ~with_i)
    j_ge = not np.any(with_i & ~with_j)
    if i_ge and j_ge:
        return "equiv"
    if i_ge:
        return "i_succ"
    if j_ge:
        return "j_succ"
    return "incomparable"


def is_complete(game: BinaryGame) -> bool:
    n = game.n
    return all(
        desirability(game, i, j) != "incomparable"
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
    )


def null_voters(game: BinaryGame) -> set:
    _require_simple(game)
    tab = game.table()
    out = set()
    for i in range(game.n):
        _, swing = _swing_table(tab, i)
        if not swing.any():
            out.add(i + 1)
    return out


# ---------------------------------------------------------------- indices


def swing_counts_by_size(game: BinaryGame) -> np.ndarray:
    """``counts[i, s]`` = number of swings of voter i+1 at coalitions of size s."""
    tab = game.table()
    n = game.n
    pc = popcounts(n)
    counts = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        without, swing = _swing_table(tab, i)
        # a "negative swing" (non-monotone game) counts -1
        neg = ~tab[without | (1 << i)] & tab[without]
        counts[i] = np.bincount(pc[without][swing], minlength=n)[:n] - np.bincount(
            pc[without][neg], minlength=n
        )[:n]
    return counts


def ssi_binary(game: BinaryGame) -> PowerProfile:
    """Exact Shapley-Shubik index."""
    n = game.n
    counts = swing_counts_by_size(game)
    nf = math.factorial(n)
    coef = [Fraction(math.factorial(s) * math.factorial(n - 1 - s), nf) for s in range(n)]
    values = [sum((int(counts[i, s]) * coef[s] for s in range(n)), Fraction(0)) for i in range(n)]
    return exact_profile(values, index="ssi")


def bzi_binary(game: BinaryGame) -> PowerProfile:
    """Exact absolute Banzhaf index."""
    n = game.n
    counts = swing_counts_by_size(game).sum(axis=1)
    return exact_profile([Fraction(int(c), 2 ** (n - 1)) for c in counts], index="bzi")


def _round_rational(x, max_den=10**4, tol=1e-9):
    out = []
    for v in x:
        r = Fraction(float(v)).limit_denominator(max_den)
        if abs(float(r) - v) > tol:
            return None
        out.append(r)
    return out


def nucleolus_binary(game: BinaryGame, tight_dual=1e-7) -> PowerProfile:
    """Nucleolus over imputations via the usual sequence of linear programs.

    Each round minimizes the largest excess over the coalitions not yet
    fixed; coalitions with a dual value above ``tight_dual`` are then fixed at
    that excess. Rounds stop once the fixed coalitions determine the point.
    Values are snapped to rationals with denominator <= 10^4 when within 1e-9.
    """
    _require_simple(game)
    n = game.n
    if n > MAX_NUCLEOLUS_VOTERS:
        raise CapacityError(
            f"nucleolus limited to {MAX_NUCLEOLUS_VOTERS} voters, got {n}", cap=MAX_NUCLEOLUS_VOTERS
        )
    tab = game.table().astype(float)
    full = (1 << n) - 1
    masks = np.arange(1, full)
    incid = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    value = tab[masks]

    free = np.ones(len(masks), dtype=bool)
    eq_rows, eq_rhs = [np.ones(n)], [1.0]
    x = np.full(n, 1.0 / n)
    for _ in range(len(masks) + 1):
        if np.linalg.matrix_rank(np.array(eq_rows)) >= n or not free.any():
            break
        # variables (x_1..x_n, t); minimize t s.t. g(S) - x(S) <= t
        c = np.zeros(n + 1)
        c[-1] = 1.0
        A_ub = np.hstack([-incid[free], -np.ones((free.sum(), 1))])
        b_ub = -value[free]
        A_eq = np.hstack([np.array(eq_rows), np.zeros((len(eq_rows), 1))])
        # fixed coalitions carry their level in eq_rhs already
        res = linprog(
            c,
            A_ub=A_ub,
            b_ub=b_ub,
            A_eq=A_eq,
            b_eq=np.array(eq_rhs),
            bounds=[(0, None)] * n + [(None, None)],
            method="highs",
        )
        if res.status != 0:
            raise DomainError(f"nucleolus LP failed: {res.message}")
        t = res.x[-1]
        x = res.x[:n]
        duals = -res.ineqlin.marginals
        idx = np.flatnonzero(free)
        tight = idx[duals > tight_dual]
        if len(tight) == 0:
            slack = value[idx] - incid[idx] @ x - t
            tight = idx[np.abs(slack) < 1e-9]
        added = False
        rank = np.linalg.matrix_rank(np.array(eq_rows))
        for k in tight:
            free[k] = False
            trial = eq_rows + [incid[k]]
            if np.linalg.matrix_rank(np.array(trial)) > rank:
                eq_rows.append(incid[k])
                eq_rhs.append(value[k] - t)
                rank += 1
                added = True
        if not added and len(tight) == 0:
            break
    exact = _round_rational(x)
    if exact is not None and sum(exact) == 1:
        return exact_profile(exact, index="nucleolus")
    return PowerProfile(tuple(float(v) for v in x), method="quadrature", error_bound=1e-9, index="nucleolus")


# ------------------------------------------------------------ combinators


def _check_same_n(g1, g2):
    if g1.n != g2.n:
        raise InputError(f"games have different voter counts ({g1.n} vs {g2.n})")


def meet(g1: BinaryGame, g2: BinaryGame) -> BinaryGame:
    _check_same_n(g1, g2)
    return BinaryGame(g1.n, Meet((g1, g2)))


def join(g1: BinaryGame, g2: BinaryGame) -> BinaryGame:
    _check_same_n(g1, g2)
    return BinaryGame(g1.n, Join((g1, g2)))


def same_game(g1: BinaryGame, g2: BinaryGame) -> bool:
    return g1.n == g2.n and bool(np.array_equal(g1.table(), g2.table()))


def transfer_check(index, g1: BinaryGame, g2: BinaryGame) -> bool:
    """Whether ``index(g1) + index(g2) == index(g1 ^ g2) + index(g1 v g2)`` exactly."""
    _check_same_n(g1, g2)
    a, b = index(g1), index(g2)
    c, d = index(meet(g1, g2)), index(join(g1, g2))
    return all(x + y == z + w for x, y, z, w in zip(a, b, c, d))
