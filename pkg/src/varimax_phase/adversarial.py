"""The lower-bound witness: a rotation far from the truth that Varimax still prefers.

Take the first ``m = ceil(k/2)`` rows ``Z1`` of the factor matrix and the full
QR factorization ``Z1^T = Q [R1; 0]``. The rotation ``A = Q^T R*`` maps those
rows onto ``[R1^T 0]``, packing their whole energy into ``m`` coordinates. When
``n`` is not much larger than ``k^2`` the fourth powers of ``diag(R1)`` alone
(order ``k^3``) outweigh the kurtosis advantage of the truth (order ``n k``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datagen import Instance
from .errors import ParameterError
from .linalg import Rotation, qr_decompose
from .metrics import signed_permutation_gap
from .varimax import objective


@dataclass(frozen=True, eq=False)
class AdversarialWitness:
    a: Rotation
    u1: np.ndarray
    r1: np.ndarray
    d1: float
    d2: float
    sigma_min_z1: float

    @property
    def m(self):
        return self.r1.shape[0]


def build_witness(inst: Instance) -> AdversarialWitness:
    n, k = inst.z.shape
    if k < 2 or n <= k:
        raise ParameterError(f"witness needs n > k >= 2, got n={n}, k={k}")
    m = math.ceil(k / 2)
    z1 = inst.z[:m]
    q, r = qr_decompose(z1.T, complete=True)
    r1 = r[:m, :m].copy()
    a = Rotation(q.T @ inst.r_star.mat)

    y = inst.z_hat @ a.mat.T
    d1 = float(np.sum(np.diag(r1) ** 4))
    d2 = float(np.sum(y[k:] ** 4))
    sigma_min = float(np.linalg.svd(z1, compute_uv=False)[-1])
    u1 = q[:, :m].copy()
    for arr in (u1, r1):
        arr.setflags(write=False)
    return AdversarialWitness(a=a, u1=u1, r1=r1, d1=d1, d2=d2, sigma_min_z1=sigma_min)


def witness_beats_truth(inst: Instance, w: AdversarialWitness):
    """Return ``(v_adv, v_true, v_adv > v_true)``."""
    v_adv = objective(inst.z_hat, w.a)
    v_true = objective(inst.z_hat, inst.r_star)
    return v_adv, v_true, v_adv > v_true


def expected_objective(a, kappa: float, k: int) -> float:
    """Population objective ``kappa*k + (kappa - 3) * gap(A)`` with ``A = R R*^T``."""
    if kappa < 1:
        raise ParameterError(f"a unit-variance law has fourth moment >= 1, got kappa={kappa}")
    a = a if isinstance(a, Rotation) else Rotation(a)
    if a.dim != k:
        raise ParameterError(f"A has dimension {a.dim}, expected k={k}")
    gap, _ = signed_permutation_gap(a)
    return kappa * k + (kappa - 3.0) * gap
