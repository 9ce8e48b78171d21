"""Small dense primitives: orthogonal matrices, signed permutations, QR, polar.

Plain ``numpy.ndarray`` (2-D, float64, finite) plays the role of a general
matrix throughout the package; :func:`as_matrix` is the validating gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParameterError, SingularityError
from .seeding import rng_for

ORTHO_TOL = 1e-10
REPAIR_TOL = 1e-6
RANK_RTOL = 1e-12


def as_matrix(m, *, name="matrix"):
    """Validate ``m`` as a finite 2-D float array and return a float64 copy."""
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ParameterError(f"{name} contains NaN or Inf")
    return a


def orthogonality_residual(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m.T @ m - np.eye(m.shape[1]))))


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Rotation:
    """A k-by-k orthogonal matrix (determinant +1 or -1).

    Inputs with orthogonality residual up to ``REPAIR_TOL`` are snapped back
    onto the group with a polar projection; anything worse is rejected.
    """

    mat: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.mat, name="rotation")
        if a.shape[0] != a.shape[1]:
            raise DimensionError(f"rotation must be square, got shape {a.shape}")
        res = orthogonality_residual(a)
        if res > REPAIR_TOL:
            raise ParameterError(f"matrix is not orthogonal (residual {res:.3e})")
        if res > ORTHO_TOL:
            u, _, vt = np.linalg.svd(a)
            a = u @ vt
        object.__setattr__(self, "mat", _frozen(a))

    @property
    def dim(self):
        return self.mat.shape[0]

    @property
    def T(self):
        return Rotation(self.mat.T)

    def __matmul__(self, other):
        if isinstance(other, Rotation):
            return Rotation(self.mat @ other.mat)
        return self.mat @ np.asarray(other)

    def __rmatmul__(self, other):
        return np.asarray(other) @ self.mat

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)

    def __eq__(self, other):
        return isinstance(other, Rotation) and np.array_equal(self.mat, other.mat)

    def __hash__(self):
        return hash(self.mat.tobytes())

    def __repr__(self):
        return f"Rotation(dim={self.dim})"

    @classmethod
    def identity(cls, k):
        return cls(np.eye(k))


@dataclass(frozen=True)
class SignedPermutation:
    """Column ``j`` of the dense form carries ``signs[j]`` in row ``perm[j]``."""

    perm: tuple
    signs: tuple

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        signs = tuple(int(s) for s in self.signs)
        k = len(perm)
        if k < 1 or len(signs) != k:
            raise DimensionError("perm and signs must be non-empty and of equal length")
        if sorted(perm) != list(range(k)):
            raise ParameterError(f"perm {perm} is not a permutation of 0..{k - 1}")
        if any(s not in (1, -1) for s in signs):
            raise ParameterError(f"signs must be +1/-1, got {signs}")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)

    @property
    def dim(self):
        return len(self.perm)

    @classmethod
    def identity(cls, k):
        return cls(tuple(range(k)), (1,) * k)

    def dense(self):
        return dense(self)


def dense(p: SignedPermutation) -> np.ndarray:
    out = np.zeros((p.dim, p.dim))
    out[list(p.perm), list(range(p.dim))] = p.signs
    return out


def _sign_nonneg(x):
    # sign with sign(0) = +1
    return np.where(x < 0, -1.0, 1.0)


def haar_rotation(k: int, seed: int) -> Rotation:
    """Haar-distributed orthogonal matrix via sign-corrected QR of a Gaussian matrix."""
    if k < 1:
        raise DimensionError(f"k must be positive, got {k}")
    g = rng_for(seed).standard_normal((k, k))
    q, r = np.linalg.qr(g)
    return Rotation(q * _sign_nonneg(np.diag(r)))


def _check_rank(m):
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] <= RANK_RTOL * s[0]:
        raise SingularityError(
            f"matrix is rank deficient (sigma_min/sigma_max = {s[-1] / s[0] if s[0] else 0.0:.3e})"
        )
    return s


def qr_decompose(m, complete=False):
    """QR factorization with a nonnegative diagonal in ``R``.

    Requires ``rows >= cols`` and full column rank. With ``complete=True`` the
    returned ``Q`` is square: its first ``cols`` columns are the thin factor
    and the remainder is an orthonormal completion; ``R`` is then
    ``rows x cols`` with zeros below the top square block.
    """
    a = as_matrix(m)
    rows, cols = a.shape
    if rows < cols:
        raise DimensionError(f"qr_decompose needs rows >= cols, got {a.shape}")
    _check_rank(a)
    q, r = np.linalg.qr(a, mode="complete" if complete else "reduced")
    d = _sign_nonneg(np.diag(r))
    q[:, :cols] *= d
    r[:cols, :] *= d[:, None]
    return q, r


def polar_project(m) -> Rotation:
    """Orthogonal polar factor ``U V^T`` of ``m = U S V^T``.

    This is the maximizer of ``trace(m^T R)`` over the orthogonal group.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"polar_project needs a square matrix, got {a.shape}")
    u, s, vt = np.linalg.svd(a)
    if s[0] == 0.0 or s[-1] <= RANK_RTOL * s[0]:
        raise SingularityError("matrix is numerically singular; polar factor is not unique")
    return Rotation(u @ vt)


# -- matrix text format -------------------------------------------------------

def format_matrix(m) -> str:
    a = as_matrix(m)
    lines = [f"# rows={a.shape[0]} cols={a.shape[1]}"]
    lines.extend(",".join(f"{x:.17e}" for x in row) for row in a)
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    shape = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if rows or shape is not None:
                raise ParameterError(f"line {lineno}: header must be the first line")
            fields = dict(tok.split("=", 1) for tok in line[1:].split() if "=" in tok)
            try:
                shape = (int(fields["rows"]), int(fields["cols"]))
            except (KeyError, ValueError) as exc:
                raise ParameterError(f"line {lineno}: malformed header {line!r}") from exc
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise ParameterError(f"line {lineno}: {exc}") from exc
    if not rows:
        raise ParameterError("matrix file has no rows")
    if len({len(r) for r in rows}) != 1:
        raise DimensionError("ragged matrix rows")
    a = as_matrix(rows)
    if shape is not None and a.shape != shape:
        raise DimensionError(f"header says {shape} but found {a.shape}")
    return a


def write_matrix(path, m):
    Path(path).write_text(format_matrix(m), encoding="utf-8")


def read_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text(encoding="utf-8"))
