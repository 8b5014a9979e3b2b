"""Estimate the shared subspace of two embeddings and project it away.

The row spaces of the identity and scene matrices are compared through the
principal angles between them; directions whose cosine clears a threshold
``tau`` are taken as the (near-)intersection.  Removing that subspace from
the identity embedding is the blunt, hard-threshold counterpart of the
spectral reweighting in :mod:`sdec.decontext`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .spectral import RANK_RTOL, Projector, as_matrix, orth, projector_from_basis


@dataclass(frozen=True)
class IntersectionEstimate:
    """Principal-angle analysis of two row spaces.

    ``cosines`` are descending principal-angle cosines, ``selected`` the
    indices that cleared ``tau``, ``basis_cap`` an orthonormal basis of the
    estimated shared subspace (columns live inside the identity row space),
    and ``p_cap`` the corresponding projector.
    """

    cosines: np.ndarray
    tau: float
    selected: np.ndarray
    basis_cap: np.ndarray
    p_cap: Projector


def estimate_intersection(z_id, z_sc, tau: float = 0.98,
                          r_id: Optional[int] = None,
                          r_sc: Optional[int] = None,
                          rank_rtol: float = RANK_RTOL) -> IntersectionEstimate:
    """Estimate the shared subspace of the row spaces of ``z_id`` and ``z_sc``.

    Parameters
    ----------
    z_id, z_sc : array_like, shape (n, d)
        Embedding matrices over the same ambient dimension.
    tau : float
        Cosine threshold in (0, 1]; a principal direction is counted as
        shared when its cosine is >= ``tau``.
    r_id, r_sc : int, optional
        Caps on how many leading row-space directions of each matrix are
        compared; default is the numerical rank.
    """
    if not 0.0 < tau <= 1.0:
        raise ValidationError(f"tau must lie in (0, 1], got {tau}")
    b_id = orth(as_matrix(z_id, "z_id"), rtol=rank_rtol)
    b_sc = orth(as_matrix(z_sc, "z_sc"), rtol=rank_rtol)
    if b_id.shape[0] != b_sc.shape[0]:
        raise DimensionMismatch(
            f"embedding widths differ: {b_id.shape[0]} vs {b_sc.shape[0]}"
        )
    if r_id is not None:
        if r_id < 1:
            raise ValidationError(f"r_id must be >= 1, got {r_id}")
        b_id = b_id[:, :r_id]
    if r_sc is not None:
        if r_sc < 1:
            raise ValidationError(f"r_sc must be >= 1, got {r_sc}")
        b_sc = b_sc[:, :r_sc]
    d = b_id.shape[0]
    u_m, sig, _ = np.linalg.svd(b_id.T @ b_sc)
    cosines = np.clip(sig, 0.0, 1.0)
    selected = np.flatnonzero(cosines >= tau)
    if selected.size:
        raw = b_id @ u_m[:, selected]
        # the product already has orthonormal columns; QR is numerical hygiene
        basis_cap, _ = np.linalg.qr(raw)
    else:
        basis_cap = np.zeros((d, 0))
    return IntersectionEstimate(
        cosines=cosines,
        tau=float(tau),
        selected=selected,
        basis_cap=basis_cap,
        p_cap=projector_from_basis(basis_cap),
    )


def hard_suppress(z_id, p_cap: Projector) -> np.ndarray:
    """Remove the ``p_cap`` component from every row of ``z_id``."""
    z = as_matrix(z_id, "z_id")
    if p_cap.dim != z.shape[1]:
        raise DimensionMismatch(
            f"projector dimension {p_cap.dim} does not match embedding width {z.shape[1]}"
        )
    return z - z @ p_cap.data
