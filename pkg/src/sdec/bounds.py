"""Upper bound on the scene-token leak into the identity subspace.

For one attention row the leak ``alpha_sc @ Z_sc @ W_v @ P_id`` is controlled
by splitting the scene rows into their components inside and outside the
identity/scene intersection and applying norm submultiplicativity to each
part.  :func:`compute_bound` evaluates every term of that estimate for a
single instance; :func:`monte_carlo_bound_sweep` verifies it across seeded
random instances and reports how tight it runs.

The intersection factor is taken as ``P_cap @ W_v @ P_id`` (the orientation
that makes the split identity exact); the report also carries the transposed
variant ``P_id @ W_v @ P_cap`` for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .attention import SubspaceSpec, attention_forward, sample_instance
from .errors import (
    LengthMismatch,
    NonFinite,
    NotNested,
    NotProjector,
    SdecError,
    ValidationError,
)
from .rng import SeedLike, seed_key
from .spectral import Projector, as_matrix, projector_from_basis

_SYM_TOL = 1e-10
_IDEM_TOL = 1e-9
_TRACE_TOL = 1e-8
_NEST_TOL = 1e-8

#: Relative slack when counting bound violations.
VIOLATION_RTOL = 1e-9


def _check_projector(p: Projector, name: str) -> np.ndarray:
    m = np.asarray(p.data, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotProjector(f"{name} must be square, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise NonFinite(f"{name} contains NaN or Inf entries")
    if np.linalg.norm(m - m.T) > _SYM_TOL:
        raise NotProjector(f"{name} is not symmetric")
    if np.linalg.norm(m @ m - m) > _IDEM_TOL:
        raise NotProjector(f"{name} is not idempotent")
    if abs(float(np.trace(m)) - p.rank) > _TRACE_TOL:
        raise NotProjector(f"{name} trace {np.trace(m):.6f} does not match rank {p.rank}")
    return m


def _range_basis(p: np.ndarray, rank: int) -> np.ndarray:
    """Orthonormal columns spanning the range of a validated projector."""
    if rank == 0:
        return np.zeros((p.shape[0], 0))
    w, vecs = np.linalg.eigh(p)
    return vecs[:, w > 0.5]


@dataclass(frozen=True)
class BoundBreakdown:
    """Every term of the leak estimate for one instance.

    ``bound`` is ``epsilon * (r_cap_norm * t_cap_fro + r_perp_norm *
    t_perp_fro)`` and must dominate ``measured``, the Euclidean norm of the
    actual leak vector.  ``sigma_cap`` / ``sigma_perp`` restate the Frobenius
    factors against an explicit basis of the identity subspace and agree with
    them to rounding; ``t_cap_fro_alt`` is the transposed intersection factor
    kept for reference.
    """

    epsilon: float
    r_cap_norm: float
    r_perp_norm: float
    t_cap_fro: float
    t_perp_fro: float
    sigma_cap: float
    sigma_perp: float
    bound: float
    measured: float
    t_cap_fro_alt: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "epsilon", "r_cap_norm", "r_perp_norm", "t_cap_fro", "t_perp_fro",
            "sigma_cap", "sigma_perp", "bound", "measured", "t_cap_fro_alt",
        )}


def compute_bound(z_sc, alpha_sc, w_v, id_projector: Projector,
                  sc_projector: Projector, cap_projector: Projector) -> BoundBreakdown:
    """Evaluate the leak bound and its measured counterpart for one instance.

    Parameters
    ----------
    z_sc : array_like, shape (n_sc, d)
        Scene token rows; each must lie in the range of ``sc_projector``.
    alpha_sc : array_like, shape (n_sc,)
        Nonnegative attention mass on the scene rows.
    w_v : array_like, shape (d, d)
        Value matrix of the attention head.
    id_projector, sc_projector, cap_projector : Projector
        Identity subspace, scene subspace, and their intersection;
        ``cap_projector`` must be dominated by ``sc_projector``.
    """
    z_sc = as_matrix(z_sc, "z_sc")
    w_v = as_matrix(w_v, "w_v")
    alpha = np.asarray(alpha_sc, dtype=np.float64).reshape(-1)
    if not np.isfinite(alpha).all():
        raise NonFinite("alpha_sc contains NaN or Inf entries")
    if alpha.size != z_sc.shape[0]:
        raise LengthMismatch(
            f"alpha_sc has {alpha.size} entries but z_sc has {z_sc.shape[0]} rows"
        )
    if np.any(alpha < 0.0):
        raise ValidationError("alpha_sc entries must be nonnegative")

    p_id = _check_projector(id_projector, "id projector")
    p_sc = _check_projector(sc_projector, "scene projector")
    p_cap = _check_projector(cap_projector, "intersection projector")
    d = z_sc.shape[1]
    for name, m in (("id", p_id), ("scene", p_sc), ("intersection", p_cap)):
        if m.shape[0] != d:
            raise LengthMismatch(f"{name} projector is {m.shape[0]}-dimensional, expected {d}")
    if np.linalg.norm(p_sc @ p_cap - p_cap) > _NEST_TOL:
        raise NotNested("intersection projector is not dominated by the scene projector")
    resid = np.linalg.norm(z_sc - z_sc @ p_sc)
    if resid > 1e-8 * max(1.0, float(np.linalg.norm(z_sc))):
        raise ValidationError(f"z_sc rows leave the scene subspace (residual {resid:.3e})")

    p_perp = p_sc - p_cap
    perp = Projector(data=p_perp, rank=sc_projector.rank - cap_projector.rank)
    _check_projector(perp, "scene-minus-intersection projector")

    u_id = _range_basis(p_id, id_projector.rank)

    epsilon = float(np.linalg.norm(alpha))
    r_cap_norm = _spec_norm(z_sc @ p_cap)
    r_perp_norm = _spec_norm(z_sc @ p_perp)
    t_cap_fro = float(np.linalg.norm(p_cap @ w_v @ p_id))
    t_perp_fro = float(np.linalg.norm(p_perp @ w_v @ p_id))
    sigma_cap = float(np.linalg.norm(p_cap @ w_v @ u_id))
    sigma_perp = float(np.linalg.norm(p_perp @ w_v @ u_id))
    t_cap_fro_alt = float(np.linalg.norm(p_id @ w_v @ p_cap))
    measured = float(np.linalg.norm(alpha @ z_sc @ w_v @ p_id))
    bound = epsilon * (r_cap_norm * t_cap_fro + r_perp_norm * t_perp_fro)
    return BoundBreakdown(
        epsilon=epsilon,
        r_cap_norm=r_cap_norm,
        r_perp_norm=r_perp_norm,
        t_cap_fro=t_cap_fro,
        t_perp_fro=t_perp_fro,
        sigma_cap=sigma_cap,
        sigma_perp=sigma_perp,
        bound=bound,
        measured=measured,
        t_cap_fro_alt=t_cap_fro_alt,
    )


def _spec_norm(a: np.ndarray) -> float:
    if a.size == 0 or not a.any():
        return 0.0
    return float(np.linalg.norm(a, 2))


@dataclass(frozen=True)
class BoundSweepSummary:
    """Violation count and tightness statistics over a seeded sweep."""

    trials: int
    violations: int
    ratios: np.ndarray
    corollary_gap_max: float

    @property
    def ratio_min(self) -> float:
        return float(self.ratios.min())

    @property
    def ratio_median(self) -> float:
        return float(np.median(self.ratios))

    @property
    def ratio_max(self) -> float:
        return float(self.ratios.max())

    def summary(self) -> dict:
        return {
            "trials": self.trials,
            "violations": self.violations,
            "tightness": {
                "min": self.ratio_min,
                "median": self.ratio_median,
                "max": self.ratio_max,
            },
            "corollary_gap_max": self.corollary_gap_max,
        }


def monte_carlo_bound_sweep(spec: SubspaceSpec, trials: int, seed: SeedLike,
                            n_id: Optional[int] = None,
                            n_sc: Optional[int] = None) -> BoundSweepSummary:
    """Check the leak bound on ``trials`` random instances of ``spec``.

    Each trial draws fresh subspaces, token rows, weights, and an identity
    query from a per-trial seed, so any single trial can be reproduced alone.
    A trial counts as a violation when ``measured > bound * (1 + 1e-9)``.
    ``corollary_gap_max`` tracks the largest relative gap between the bound
    and its restatement through ``sigma_cap`` / ``sigma_perp``.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    key = seed_key(seed)
    ratios = np.zeros(trials)
    violations = 0
    gap_max = 0.0
    for k in range(trials):
        try:
            inst = sample_instance(spec, n_id, n_sc, seed=key + (k,))
            row, _ = attention_forward(inst.z, inst.weights, inst.q_row,
                                       inst.id_slice, inst.sc_slice)
            alpha_sc = row.alpha[inst.sc_slice[0]:inst.sc_slice[1]]
            bd = compute_bound(
                inst.z_sc, alpha_sc, inst.weights.w_v,
                projector_from_basis(inst.b_id),
                projector_from_basis(inst.b_sc),
                projector_from_basis(inst.b_cap),
            )
        except SdecError as exc:
            raise type(exc)(f"trial {k}: {exc}") from exc
        if bd.measured > bd.bound * (1.0 + VIOLATION_RTOL):
            violations += 1
        ratios[k] = bd.measured / bd.bound if bd.bound > 0.0 else 0.0
        alt = bd.epsilon * (bd.r_cap_norm * bd.sigma_cap + bd.r_perp_norm * bd.sigma_perp)
        gap_max = max(gap_max, abs(alt - bd.bound) / max(1.0, bd.bound))
    return BoundSweepSummary(
        trials=trials, violations=violations, ratios=ratios, corollary_gap_max=gap_max
    )
