"""Executable checks of the deterministic inequality and the population objective."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adversarial import expected_objective
from .datagen import KurtosisLaw, make_instance
from .errors import ParameterError
from .linalg import Rotation, SignedPermutation, dense, haar_rotation
from .metrics import BRUTE_FORCE_MAX_K, signed_permutation_gap
from .seeding import derive_seed, rng_for
from .varimax import objective

GAP_TOL = 1e-12
ZERO_T = 1e-8


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str = ""

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: margin={self.margin:.6g} {self.detail}".rstrip()


def random_signed_permutation(k, seed):
    rng = rng_for(seed)
    return SignedPermutation(tuple(rng.permutation(k)), tuple(rng.choice([1, -1], size=k)))


def check_gap_inequality(k, samples, seed, gap_fn=signed_permutation_gap):
    """``gap <= -t^2/16`` on Haar rotations; margin is the largest ``gap + t^2/16``."""
    worst = -math.inf
    for s in range(samples):
        gap, t = gap_fn(haar_rotation(k, derive_seed(seed, "gap", k, s)))
        worst = max(worst, gap + t * t / 16)
    return CheckResult(f"gap <= -t^2/16 (k={k}, {samples} Haar)", worst <= GAP_TOL, worst)


def check_gap_zero_set(k, samples, seed, gap_fn=signed_permutation_gap):
    """``gap <= 0`` always and ``gap == 0`` exactly on the signed permutations."""
    bad = 0
    worst = -math.inf
    mats = [haar_rotation(k, derive_seed(seed, "zero-set", k, s)) for s in range(samples)]
    mats += [Rotation(dense(random_signed_permutation(k, derive_seed(seed, "sp", k, s))))
             for s in range(max(1, samples // 10))]
    for a in mats:
        gap, t = gap_fn(a)
        worst = max(worst, gap)
        is_zero = abs(gap) <= GAP_TOL
        if gap > GAP_TOL or is_zero != (t <= ZERO_T):
            bad += 1
    return CheckResult(f"gap <= 0, gap = 0 iff t = 0 (k={k}, {len(mats)} matrices)", bad == 0, worst,
                       f"violations={bad}")


def monte_carlo_objective(a, law, k, draws, n, seed):
    """Mean and standard error of the sample objective at ``R = A R*`` over fresh draws."""
    a = a if isinstance(a, Rotation) else Rotation(a)
    vals = np.empty(draws)
    for d in range(draws):
        inst = make_instance(n, k, law, derive_seed(seed, "mc", d))
        vals[d] = objective(inst.z_hat, a.mat @ inst.r_star.mat)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(draws))


def check_expectation(a, kappa, k, draws, n, seed, name=None):
    law = KurtosisLaw.with_kappa(kappa)
    expected = expected_objective(a, kappa, k)
    mean, se = monte_carlo_objective(a, law, k, draws, n, seed)
    z = abs(mean - expected) / se if se > 0 else (0.0 if mean == expected else math.inf)
    name = name or f"E objective (k={k}, kappa={kappa:g})"
    return CheckResult(name, z <= 3.0, 3.0 - z,
                       f"mc={mean:.6g} expected={expected:.6g} se={se:.3g}")


def check_theory(samples, k_max, seed, gap_fn=signed_permutation_gap, mc_draws=200, mc_n=10_000):
    """All checks; ``gap_fn`` is injectable so the failure path can be exercised."""
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    if not 2 <= k_max <= BRUTE_FORCE_MAX_K:
        raise ParameterError(f"k_max must be in [2, {BRUTE_FORCE_MAX_K}], got {k_max}")
    results = []
    for k in range(2, k_max + 1):
        results.append(check_gap_inequality(k, samples, seed, gap_fn))
        results.append(check_gap_zero_set(k, samples, seed, gap_fn))
    k = k_max
    a = haar_rotation(k, derive_seed(seed, "expectation-A"))
    for kappa in (3.0, 4.0, 6.0):
        results.append(check_expectation(a, kappa, k, mc_draws, mc_n, derive_seed(seed, "mc", kappa)))
    results.append(check_expectation(np.eye(k), 4.0, k, mc_draws, mc_n, derive_seed(seed, "mc-truth"),
                                     name=f"E objective at truth = kappa*k (k={k}, kappa=4)"))
    return results
