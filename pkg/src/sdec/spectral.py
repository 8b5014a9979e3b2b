"""Dense linear-algebra primitives used everywhere else in the package.

Deterministic thin SVD, row-space orthonormal bases, orthogonal projectors,
matrix norms, and principal-angle cosines between subspaces.  Everything
computes in IEEE double precision; lower-precision input is widened on entry.
All functions are pure, so results are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NonFinite,
    NotOrthonormal,
    ShapeNotTwoDim,
    ZeroMatrix,
)

#: Relative cutoff under which singular values count as numerically zero.
RANK_RTOL = 1e-10

#: Frobenius tolerance for accepting a matrix as column-orthonormal input.
ORTHONORMAL_TOL = 1e-8

_ZERO_TOL = 1e-14


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Widen ``a`` to a float64 2-D array, rejecting bad shapes and non-finite entries."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeNotTwoDim(
            f"{name} must be 2-D with at least one row and one column, got shape {arr.shape}"
        )
    if not np.isfinite(arr).all():
        raise NonFinite(f"{name} contains NaN or Inf entries")
    return arr


def as_basis(b, name: str = "basis") -> np.ndarray:
    """Like :func:`as_matrix` but a basis may legitimately have zero columns."""
    arr = np.asarray(b, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ShapeNotTwoDim(f"{name} must be 2-D with at least one row, got shape {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise NonFinite(f"{name} contains NaN or Inf entries")
    return arr


def check_orthonormal(b, name: str = "basis") -> np.ndarray:
    """Validate that the columns of ``b`` are orthonormal and return it widened."""
    arr = as_basis(b, name)
    gram = arr.T @ arr
    err = float(np.linalg.norm(gram - np.eye(arr.shape[1])))
    if err > ORTHONORMAL_TOL:
        raise NotOrthonormal(f"{name} columns are not orthonormal (Gram deviation {err:.3e})")
    return arr


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``a == u @ diag(s) @ v.T`` with a fixed sign convention.

    ``u`` is n x r, ``s`` is the descending singular-value vector of length
    r = min(n, d), and ``v`` is d x r with orthonormal columns.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.T

    def rank(self, rtol: float = RANK_RTOL) -> int:
        """Numerical rank: singular values above ``rtol`` times the largest."""
        if self.s.size == 0 or self.s[0] <= 0.0:
            return 0
        return int(np.count_nonzero(self.s > rtol * self.s[0]))


@dataclass(frozen=True)
class Projector:
    """Orthogonal projector onto an ``rank``-dimensional subspace of R^dim."""

    data: np.ndarray
    rank: int

    @property
    def dim(self) -> int:
        return self.data.shape[0]


def svd_decompose(a) -> SvdFactors:
    """Thin SVD with descending singular values and deterministic signs.

    The sign of each right-singular column is fixed so that its
    largest-magnitude entry is nonnegative (the matching left column flips
    with it), which makes repeated decompositions of equal matrices
    bit-identical.

    Raises
    ------
    NonFinite
        If ``a`` contains NaN or Inf.
    ConvergenceFailure
        If the underlying factorization does not converge.
    """
    arr = as_matrix(a, "input matrix")
    try:
        u, s, vt = np.linalg.svd(arr, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"SVD did not converge: {exc}") from exc
    v = vt.T
    pick = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[pick, np.arange(v.shape[1])])
    signs[signs == 0.0] = 1.0
    return SvdFactors(u=u * signs, s=s, v=v * signs)


def orth(a, rtol: float = RANK_RTOL) -> np.ndarray:
    """Column-orthonormal basis of the row space of ``a``.

    Parameters
    ----------
    a : array_like, shape (n, d)
        Matrix whose rows span the subspace of interest.
    rtol : float
        Relative singular-value cutoff defining the numerical rank.

    Returns
    -------
    ndarray, shape (d, r)
        Leading right-singular vectors of ``a``; r is the numerical rank.
    """
    arr = as_matrix(a, "input matrix")
    if float(np.linalg.norm(arr)) <= _ZERO_TOL:
        raise ZeroMatrix("cannot orthonormalize the row space of an all-zero matrix")
    f = svd_decompose(arr)
    return f.v[:, : f.rank(rtol)]


def projector_from_basis(b) -> Projector:
    """Build the orthogonal projector ``b @ b.T`` onto the column span of ``b``."""
    arr = check_orthonormal(b)
    d, r = arr.shape
    if r == 0:
        return Projector(data=np.zeros((d, d)), rank=0)
    return Projector(data=arr @ arr.T, rank=r)


def spectral_norm(a) -> float:
    """Largest singular value of ``a``; 1-D input gets its Euclidean norm."""
    arr = np.asarray(a, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise NonFinite("input contains NaN or Inf entries")
    if arr.ndim == 1:
        return float(np.linalg.norm(arr))
    if arr.ndim != 2:
        raise ShapeNotTwoDim(f"expected a vector or matrix, got shape {arr.shape}")
    if arr.size == 0 or not arr.any():
        return 0.0
    return float(np.linalg.norm(arr, 2))


def frobenius_norm(a) -> float:
    """Square root of the sum of squared entries."""
    arr = np.asarray(a, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise NonFinite("input contains NaN or Inf entries")
    return float(np.linalg.norm(arr))


def principal_angle_cosines(b1, b2) -> np.ndarray:
    """Cosines of the principal angles between two column spans.

    Parameters
    ----------
    b1 : array_like, shape (d, r1)
        Orthonormal basis of the first subspace.
    b2 : array_like, shape (d, r2)
        Orthonormal basis of the second subspace.

    Returns
    -------
    ndarray, shape (min(r1, r2),)
        Cosines in descending order, clipped to [0, 1].
    """
    m1 = check_orthonormal(b1, "first basis")
    m2 = check_orthonormal(b2, "second basis")
    if m1.shape[0] != m2.shape[0]:
        raise DimensionMismatch(
            f"bases live in different ambient dimensions: {m1.shape[0]} vs {m2.shape[0]}"
        )
    if m1.shape[1] == 0 or m2.shape[1] == 0:
        return np.zeros(0)
    sig = np.linalg.svd(m1.T @ m2, compute_uv=False)
    return np.clip(sig, 0.0, 1.0)


def random_orthonormal(d: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a d x k frame with orthonormal columns (QR of a Gaussian, signs fixed)."""
    if k == 0:
        return np.zeros((d, 0))
    q, r = np.linalg.qr(rng.standard_normal((d, k)))
    diag = np.diag(r).copy()
    diag[diag == 0.0] = 1.0
    return q * np.sign(diag)
