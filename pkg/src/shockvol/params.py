"""Model parameters and volatility-mark laws.

The model has four effective parameters: the time-change exponent ``d``,
the shock intensity ``lam`` (per day) and the first two moments of the
volatility mark drawn at each shock. Marks are restricted to laws with
closed-form first two moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Constant:
    """Degenerate mark law: every shock carries the same volatility."""

    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"volatility must be positive, got {self.value}")

    def mean(self) -> float:
        return self.value

    def mean_sq(self) -> float:
        return self.value**2

    def moment(self, q: float) -> float:
        return self.value**q

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([self.value]), np.array([1.0])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.value)


@dataclass(frozen=True)
class TwoPoint:
    """Mark law supported on two volatility levels."""

    lo: float
    hi: float
    p_hi: float

    def __post_init__(self):
        if not (self.lo > 0 and self.hi > 0):
            raise ValueError("volatility levels must be positive")
        if self.lo > self.hi:
            raise ValueError(f"lo={self.lo} exceeds hi={self.hi}")
        if not 0.0 <= self.p_hi <= 1.0:
            raise ValueError(f"p_hi must lie in [0, 1], got {self.p_hi}")

    def mean(self) -> float:
        return (1.0 - self.p_hi) * self.lo + self.p_hi * self.hi

    def mean_sq(self) -> float:
        return (1.0 - self.p_hi) * self.lo**2 + self.p_hi * self.hi**2

    def moment(self, q: float) -> float:
        return (1.0 - self.p_hi) * self.lo**q + self.p_hi * self.hi**q

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([self.lo, self.hi]), np.array([1.0 - self.p_hi, self.p_hi])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.where(rng.random(size) < self.p_hi, self.hi, self.lo)


@dataclass(frozen=True)
class LogNormal:
    """Log-normal mark law with log-space location ``mu`` and scale ``s``."""

    mu: float
    s: float

    # Gauss-Hermite nodes approximate expectations over the continuous law
    # wherever a finite mixture is required (density and tail quadrature).
    _N_NODES = 31

    def __post_init__(self):
        if not self.s >= 0:
            raise ValueError(f"log-space scale must be nonnegative, got {self.s}")

    def mean(self) -> float:
        return math.exp(self.mu + 0.5 * self.s**2)

    def mean_sq(self) -> float:
        return math.exp(2.0 * self.mu + 2.0 * self.s**2)

    def moment(self, q: float) -> float:
        return math.exp(q * self.mu + 0.5 * (q * self.s) ** 2)

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        z, w = np.polynomial.hermite_e.hermegauss(self._N_NODES)
        return np.exp(self.mu + self.s * z), w / w.sum()

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.lognormal(self.mu, self.s, size)


SigmaLaw = Union[Constant, TwoPoint, LogNormal]


def sigma_law_to_dict(law: SigmaLaw) -> dict:
    """JSON-ready representation of a mark law."""
    if isinstance(law, Constant):
        return {"kind": "constant", "value": law.value}
    if isinstance(law, TwoPoint):
        return {"kind": "two_point", "lo": law.lo, "hi": law.hi, "p_hi": law.p_hi}
    if isinstance(law, LogNormal):
        return {"kind": "log_normal", "mu": law.mu, "s": law.s}
    raise TypeError(f"not a sigma law: {law!r}")


def sigma_law_from_dict(spec: dict) -> SigmaLaw:
    kind = spec.get("kind")
    if kind == "constant":
        return Constant(spec["value"])
    if kind == "two_point":
        return TwoPoint(spec["lo"], spec["hi"], spec["p_hi"])
    if kind == "log_normal":
        return LogNormal(spec["mu"], spec["s"])
    raise ValueError(f"unknown sigma law kind: {kind!r}")


@dataclass(frozen=True)
class ModelParams:
    """Full simulation parameter set.

    ``d`` is the sub-linear time-change exponent (trading time advances like
    elapsed**(2d) after each shock), ``lam`` the shock intensity per day and
    ``sigma_law`` the law of the volatility marks.
    """

    d: float
    lam: float
    sigma_law: SigmaLaw

    def __post_init__(self):
        if not 0.0 < self.d <= 0.5:
            raise ValueError(f"d must lie in (0, 1/2], got {self.d}")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")

    @property
    def mean_sigma(self) -> float:
        return self.sigma_law.mean()

    @property
    def mean_sigma_sq(self) -> float:
        return self.sigma_law.mean_sq()

    def theory(self) -> "TheoryParams":
        return TheoryParams(self.d, self.lam, self.mean_sigma, self.mean_sigma_sq)

    def to_dict(self) -> dict:
        return {"d": self.d, "lambda": self.lam,
                "sigma_law": sigma_law_to_dict(self.sigma_law)}


@dataclass(frozen=True)
class TheoryParams:
    """Parameters entering the closed-form quantities.

    Only the first two mark moments matter here; ``e_sigma_sq >= e_sigma**2``
    is required for a valid law.
    """

    d: float
    lam: float
    e_sigma: float
    e_sigma_sq: float

    def __post_init__(self):
        if not 0.0 < self.d <= 0.5:
            raise ValueError(f"d must lie in (0, 1/2], got {self.d}")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.e_sigma > 0:
            raise ValueError(f"e_sigma must be positive, got {self.e_sigma}")
        if self.e_sigma_sq < self.e_sigma**2:
            raise ValueError(
                f"e_sigma_sq={self.e_sigma_sq} below e_sigma^2={self.e_sigma**2}")

    @property
    def var_sigma(self) -> float:
        return self.e_sigma_sq - self.e_sigma**2

    def to_dict(self) -> dict:
        return {"d": self.d, "lambda": self.lam,
                "e_sigma": self.e_sigma, "e_sigma_sq": self.e_sigma_sq}
