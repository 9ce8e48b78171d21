"""Factor matrices with i.i.d. centered, unit-variance entries of chosen kurtosis."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ParameterError
from .linalg import Rotation, haar_rotation
from .seeding import derive_seed, rng_for

FAMILIES = ("three_point", "sparse_gaussian", "gaussian")


@dataclass(frozen=True)
class KurtosisLaw:
    """Entry distribution with mean 0, variance 1, zero third moment.

    ``three_point(a)``: values ``+-a`` with probability ``1/(2a^2)`` each, else 0;
    fourth moment ``a^2``.
    ``sparse_gaussian(p)``: ``G * B / sqrt(p)`` with ``B ~ Bernoulli(p)``;
    fourth moment ``3/p``.
    ``gaussian``: fourth moment 3, the non-identifiable control.
    """

    family: str
    param: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown law family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "gaussian":
            if self.param is not None:
                raise ParameterError("gaussian law takes no parameter")
            return
        if self.param is None:
            raise ParameterError(f"{self.family} needs a parameter")
        param = float(self.param)
        object.__setattr__(self, "param", param)
        if self.family == "three_point" and not param > math.sqrt(3.0):
            raise ParameterError(f"three_point needs a > sqrt(3) (kappa <= 3 not leptokurtic), got a={param}")
        if self.family == "sparse_gaussian" and not 0.0 < param < 1.0:
            raise ParameterError(f"sparse_gaussian needs 0 < p < 1, got p={param}")

    @property
    def kappa(self) -> float:
        if self.family == "three_point":
            return self.param**2
        if self.family == "sparse_gaussian":
            return 3.0 / self.param
        return 3.0

    @classmethod
    def three_point(cls, a):
        return cls("three_point", a)

    @classmethod
    def sparse_gaussian(cls, p):
        return cls("sparse_gaussian", p)

    @classmethod
    def gaussian(cls):
        return cls("gaussian")

    @classmethod
    def with_kappa(cls, kappa, family="three_point"):
        """Pick the family parameter that gives fourth moment ``kappa``."""
        if kappa == 3.0 and family != "gaussian":
            return cls.gaussian()
        if family == "three_point":
            return cls.three_point(math.sqrt(kappa))
        if family == "sparse_gaussian":
            return cls.sparse_gaussian(3.0 / kappa)
        return cls.gaussian()

    @classmethod
    def parse(cls, text: str) -> "KurtosisLaw":
        """Parse ``three_point:2.0``, ``sparse_gaussian:0.75`` or ``gaussian``."""
        family, _, param = text.strip().partition(":")
        if not param:
            return cls(family)
        try:
            return cls(family, float(param))
        except ValueError as exc:
            if isinstance(exc, ParameterError):
                raise
            raise ParameterError(f"bad law parameter in {text!r}") from exc

    def __str__(self):
        return self.family if self.param is None else f"{self.family}:{self.param!r}"


def sample_law(law: KurtosisLaw, count: int, seed: int) -> np.ndarray:
    if count < 1:
        raise ParameterError(f"count must be positive, got {count}")
    rng = rng_for(seed)
    if law.family == "three_point":
        a = law.param
        u = rng.random(count)
        half = 0.5 / a**2
        out = np.zeros(count)
        out[u < half] = a
        out[(u >= half) & (u < 2 * half)] = -a
        return out
    if law.family == "sparse_gaussian":
        g = rng.standard_normal(count)
        keep = rng.random(count) < law.param
        return np.where(keep, g / math.sqrt(law.param), 0.0)
    return rng.standard_normal(count)


@dataclass(frozen=True, eq=False)
class Instance:
    n: int
    k: int
    law: KurtosisLaw
    seed: int
    z: np.ndarray
    r_star: Rotation
    z_hat: np.ndarray


def make_instance(n: int, k: int, law: KurtosisLaw, seed: int) -> Instance:
    """Draw ``Z`` (n x k) and a Haar ``R*``; observe ``Z_hat = Z R*``."""
    if k < 1 or n <= k:
        raise ParameterError(f"need n > k >= 1, got n={n}, k={k}")
    z = sample_law(law, n * k, derive_seed(seed, "z")).reshape(n, k)
    r_star = haar_rotation(k, derive_seed(seed, "r_star"))
    z_hat = z @ r_star.mat
    z.setflags(write=False)
    z_hat.setflags(write=False)
    return Instance(n=n, k=k, law=law, seed=seed, z=z, r_star=r_star, z_hat=z_hat)


class Moments(NamedTuple):
    mean: float
    variance: float
    third: float
    kurtosis: float


def sample_moments(v) -> Moments:
    """Plain (divide-by-N) central moments; kurtosis is NaN for zero variance."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size < 2:
        raise ParameterError("need at least two values")
    mean = float(v.mean())
    c = v - mean
    c2 = c * c
    var = float(c2.mean())
    third = float((c2 * c).mean())
    kurt = float((c2 * c2).mean() / var**2) if var > 0 else math.nan
    return Moments(mean, var, third, kurt)


def batched_standard_error(v, statistic, batches=100) -> float:
    """Standard error of ``statistic`` by splitting ``v`` into equal batches."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size < 2 * batches:
        raise ParameterError(f"need at least {2 * batches} values for {batches} batches")
    usable = v[: v.size - v.size % batches].reshape(batches, -1)
    vals = np.array([statistic(row) for row in usable])
    return float(vals.std(ddof=1) / math.sqrt(batches))
