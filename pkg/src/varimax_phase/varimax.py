"""Centered Varimax: the fourth-power objective and its maximization over O(k)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, DimensionError, ParameterError, SingularityError
from .linalg import Rotation, as_matrix, haar_rotation, polar_project
from .seeding import derive_seed

TIE_TOL = 1e-12


def _rotation_matrix(r, k):
    m = r.mat if isinstance(r, Rotation) else as_matrix(r)
    if m.shape != (k, k):
        raise DimensionError(f"rotation shape {m.shape} does not match k={k}")
    return m


def objective(z_hat, r) -> float:
    """``(1/n) * sum(((Z_hat R^T)_ij)^4)``."""
    z_hat = np.asarray(z_hat, dtype=np.float64)
    if z_hat.ndim != 2:
        raise DimensionError("z_hat must be 2-D")
    y = z_hat @ _rotation_matrix(r, z_hat.shape[1]).T
    y2 = y * y
    return float(np.sum(y2 * y2) / z_hat.shape[0])


def directional_objective(z, a) -> float:
    """``v(Z; a) = (1/n) * sum_i (sum_j a_j Z_ij)^4`` for a unit vector ``a``."""
    z = np.asarray(z, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64).ravel()
    if z.ndim != 2 or a.size != z.shape[1]:
        raise DimensionError(f"direction of length {a.size} does not match z of shape {z.shape}")
    if abs(np.linalg.norm(a) - 1.0) > 1e-8:
        raise ParameterError(f"direction must be a unit vector (norm {np.linalg.norm(a):.3e})")
    p = z @ a
    p2 = p * p
    return float(np.mean(p2 * p2))


def ascent_matrix(z_hat, r) -> np.ndarray:
    """``(Y o Y o Y)^T Z_hat`` with ``Y = Z_hat R^T``; proportional to the gradient."""
    y = z_hat @ _rotation_matrix(r, z_hat.shape[1]).T
    return (y * y * y).T @ z_hat


@dataclass
class VarimaxSolution:
    r_hat: Rotation
    objective: float
    iterations: list = field(default_factory=list)
    restarts_used: int = 0
    objective_trace: list = field(default_factory=list)
    best_restart: int = 0
    converged: list = field(default_factory=list)

    @property
    def best_iterations(self):
        return self.iterations[self.best_restart]


class _DirectPath:
    """Ascent quantities straight from the n x k data; O(n k^2) per step."""

    def __init__(self, z_hat):
        self.z_hat = z_hat

    def step(self, r):
        y = self.z_hat @ r.T
        y2 = y * y
        return float(np.sum(y2 * y2) / self.z_hat.shape[0]), (y2 * y).T @ self.z_hat


class _MomentPath:
    """Same quantities from the k^2 x k^2 fourth-moment matrix; O(k^5) per step.

    ``M[(a,b),(c,d)] = mean_i z_ia z_ib z_ic z_id``, so the objective is
    ``sum_j w_j^T M w_j`` with ``w_j = vec(r_j r_j^T)``.
    """

    def __init__(self, z_hat):
        n, k = z_hat.shape
        outer = (z_hat[:, :, None] * z_hat[:, None, :]).reshape(n, k * k)
        self.m = outer.T @ outer / n
        self.k = k

    def step(self, r):
        k = self.k
        w = (r[:, :, None] * r[:, None, :]).reshape(k, k * k)
        wm = w @ self.m
        f = float(np.sum(wm * w))
        g = np.einsum("jab,jb->ja", wm.reshape(k, k, k), r)
        return f, g


def _pick_path(z_hat, method):
    n, k = z_hat.shape
    if method == "auto":
        method = "moments" if k <= 16 and n > 4 * k**3 else "direct"
    if method == "moments":
        return _MomentPath(z_hat)
    if method == "direct":
        return _DirectPath(z_hat)
    raise ParameterError(f"unknown method {method!r}")


def _ascend(path, r0, max_iter, rel_tol, step_tol):
    r = r0.mat
    f, g = path.step(r)
    trace = [f]
    for it in range(1, max_iter + 1):
        r_new = polar_project(g).mat
        f_new, g = path.step(r_new)
        trace.append(f_new)
        step = float(np.max(np.abs(r_new - r)))
        done = abs(f_new - f) <= rel_tol * abs(f) and step <= step_tol
        f, r = f_new, r_new
        if done:
            return Rotation(r), it, trace, True
    return Rotation(r), max_iter, trace, False


def optimize(z_hat, restarts=10, max_iter=1000, rel_tol=1e-10, seed=0, extra_starts=(),
             step_tol=1e-8, method="auto"):
    """Maximize the centered Varimax objective by polar-projection ascent.

    Each step replaces ``R`` with the polar factor of :func:`ascent_matrix`.
    The objective is convex in ``R``, so maximizing its linearization over
    O(k) never decreases it. A restart stops once the relative objective
    change is below ``rel_tol`` and the largest entry change of ``R`` is below
    ``step_tol``, or after ``max_iter`` steps.

    Restart 0 starts at the identity, restarts ``1..restarts-1`` at Haar draws
    seeded from ``seed``; ``extra_starts`` (e.g. the true rotation, for
    diagnostics) are appended after those. The best objective wins, lowest
    restart index on ties.

    ``method`` selects how each step is evaluated: ``"direct"`` works on the
    data, ``"moments"`` on its fourth-moment matrix (much cheaper when
    ``n >> k^3``), ``"auto"`` chooses.
    """
    z_hat = as_matrix(z_hat, name="z_hat")
    n, k = z_hat.shape
    if n <= k:
        raise ParameterError(f"need n > k, got n={n}, k={k}")
    if restarts < 1 and not extra_starts:
        raise ParameterError("need at least one restart")
    if max_iter < 1:
        raise ParameterError("max_iter must be positive")
    path = _pick_path(z_hat, method)

    starts = [Rotation.identity(k) if i == 0 else haar_rotation(k, derive_seed(seed, "restart", i))
              for i in range(restarts)]
    starts.extend(s if isinstance(s, Rotation) else Rotation(s) for s in extra_starts)

    best = None
    iterations, converged = [], []
    for idx, r0 in enumerate(starts):
        try:
            result = _ascend(path, r0, max_iter, rel_tol, step_tol)
        except SingularityError:
            r0 = haar_rotation(k, derive_seed(seed, "rerandomize", idx))
            try:
                result = _ascend(path, r0, max_iter, rel_tol, step_tol)
            except SingularityError as exc:
                raise DegenerateInputError(
                    f"ascent matrix singular from restart {idx} even after re-randomizing"
                ) from exc
        r, its, trace, ok = result
        iterations.append(its)
        converged.append(ok)
        f = trace[-1]
        if best is None or f > best[1] + TIE_TOL * max(1.0, abs(best[1])):
            best = (r, f, trace, idx)

    r, _, trace, idx = best
    return VarimaxSolution(r_hat=r, objective=objective(z_hat, r), iterations=iterations,
                           restarts_used=len(starts), objective_trace=trace, best_restart=idx,
                           converged=converged)


def fixed_point_residual(z_hat, r) -> float:
    """Max-entry gap between ``r`` and the next ascent iterate."""
    z_hat = np.asarray(z_hat, dtype=np.float64)
    nxt = polar_project(ascent_matrix(z_hat, r))
    return float(np.max(np.abs(nxt.mat - _rotation_matrix(r, z_hat.shape[1]))))
