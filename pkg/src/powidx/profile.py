from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DomainError, InputError

METHODS = ("exact", "quadrature", "monte_carlo")
MODES = ("auto",) + METHODS


@dataclass(frozen=True)
class NumericsSpec:
    """How integrals are evaluated.

    ``mode="auto"`` picks exact arithmetic for polynomial games, Monte Carlo
    for discontinuous ones and Gauss-Legendre quadrature otherwise.
    """

    mode: str = "auto"
    quadrature_order: int = 16
    mc_samples: int = 10**6
    seed: int = 0
    target_abs_err: Optional[float] = None
    workers: int = 1
    mc_blocks: int = 32

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown numerics mode {self.mode!r}; expected one of {MODES}")
        if self.quadrature_order < 1:
            raise InputError("quadrature_order must be positive")
        if self.mc_samples < 2:
            raise InputError("mc_samples must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")
        if self.workers < 1 or self.mc_blocks < 2:
            raise InputError("workers >= 1 and mc_blocks >= 2 required")

    def with_mode(self, mode: str) -> "NumericsSpec":
        return replace(self, mode=mode)


@dataclass(frozen=True)
class PowerProfile:
    """Per-voter index values with the method that produced them.

    ``errors`` holds per-voter absolute error bars (three standard errors for
    Monte Carlo, zero for exact values); ``error_bound`` is their maximum.
    """

    values: tuple
    method: str = "exact"
    seed: Optional[int] = None
    error_bound: Optional[float] = None
    errors: Optional[tuple] = None
    index: str = ""

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}")
        object.__setattr__(self, "values", tuple(self.values))
        if self.errors is not None:
            object.__setattr__(self, "errors", tuple(float(e) for e in self.errors))
            if len(self.errors) != len(self.values):
                raise InputError("errors must have one entry per voter")
        if self.method == "exact":
            if not all(isinstance(v, (int, Fraction)) for v in self.values):
                raise InputError("exact profiles must hold rationals")
            object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
            object.__setattr__(self, "error_bound", 0.0)

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def as_floats(self) -> list:
        return [float(v) for v in self.values]

    def total(self):
        return sum(self.values, Fraction(0) if self.method == "exact" else 0.0)


def exact_profile(values: Sequence, index: str = "") -> PowerProfile:
    return PowerProfile(tuple(Fraction(v) for v in values), method="exact", index=index)


def normalize(profile: PowerProfile) -> PowerProfile:
    """Divide every component by the component sum."""
    total = profile.total()
    if total == 0:
        raise DomainError("cannot normalize an all-zero profile")
    values = tuple(v / total for v in profile.values)
    errors = None
    if profile.errors is not None:
        errors = tuple(e / abs(float(total)) for e in profile.errors)
    index = profile.index + "_normalized" if profile.index else ""
    return PowerProfile(
        values,
        method=profile.method,
        seed=profile.seed,
        error_bound=max(errors) if errors else profile.error_bound,
        errors=errors,
        index=index,
    )


@dataclass(frozen=True)
class IntegralEstimate:
    """Value of an integral (scalar or vector) with its absolute error bar."""

    value: object
    abs_err: object = 0.0
    samples_or_order: int = 0
    seed: Optional[int] = None
    method: str = "exact"
    stderr: object = field(default=0.0)

    def __post_init__(self):
        import numpy as np

        if np.any(np.asarray(self.abs_err, dtype=float) < 0):
            raise InputError("abs_err must be nonnegative")
