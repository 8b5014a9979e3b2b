"""Scene de-contextualization of an identity embedding via its spectrum.

The identity matrix ``Z_id`` is factored once; its singular vectors stay
fixed while the singular values are optimized in two phases: first pulled
toward the scene matrix (to discover which spectral directions the scene can
reach), then pulled back toward the original identity (to keep the rest
intact).  The per-value excursion ``|optimized - original|`` scores how
scene-correlated each direction is, and the embedding is rebuilt with each
singular value amplified according to that score.  Directions the scene
never moved keep weight one; the most-moved direction gets ``1 + omega``.

A PCA-style variant zeroes whole directions instead of reweighting them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    Diverged,
    LengthMismatch,
    MissingProfile,
    NegativeExcursion,
    NonFinite,
    ValidationError,
    ZeroMatrix,
)
from .spectral import SvdFactors, as_matrix, svd_decompose

#: Loss blow-up factor (relative to the starting loss) that aborts the run.
DIVERGENCE_FACTOR = 1e6

#: Consecutive loss increases tolerated before the step size is halved.
MAX_STRIKES = 5


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs of the two-phase spectrum optimizer.

    Phase one runs ``m_switch`` iterations with only the scene-attraction
    term active; the identity-attraction term (weight ``beta``) switches on
    for the remaining ``total_iters - m_switch`` iterations.  ``omega`` caps
    the amplification applied during reconstruction;
    ``invert_weighting=True`` amplifies the least-moved directions instead.
    """

    beta: float = 10.0
    m_switch: int = 20
    total_iters: int = 40
    omega: float = 1.0
    step_size: float = 0.01
    clamp_nonnegative: bool = True
    invert_weighting: bool = False
    degenerate_eps: float = 1e-12

    def __post_init__(self):
        if self.beta < 0.0:
            raise ValidationError(f"beta must be >= 0, got {self.beta}")
        if not 0 < self.m_switch < self.total_iters:
            raise ValidationError(
                f"need 0 < m_switch < total_iters, got ({self.m_switch}, {self.total_iters})"
            )
        if self.omega < 0.0:
            raise ValidationError(f"omega must be >= 0, got {self.omega}")
        if self.step_size <= 0.0:
            raise ValidationError(f"step_size must be > 0, got {self.step_size}")
        if self.degenerate_eps < 0.0:
            raise ValidationError(f"degenerate_eps must be >= 0, got {self.degenerate_eps}")


@dataclass(frozen=True)
class OptimizeTrace:
    """Per-iteration record of one optimizer run.

    ``loss`` holds the active objective after each update (length
    ``total_iters``); ``dist_scene`` / ``dist_id`` hold Frobenius distances
    of the reconstruction to the scene and identity targets at every state,
    including the initial one (length ``total_iters + 1``); ``step_sizes``
    records the step size each iteration actually used.
    """

    loss: np.ndarray
    dist_scene: np.ndarray
    dist_id: np.ndarray
    step_sizes: np.ndarray


@dataclass(frozen=True)
class ExcursionProfile:
    """Spectral audit of one refinement run.

    ``lambda_o`` is the original spectrum, ``lambda_star`` the optimized one,
    ``lambda_delta`` the absolute excursion of each value, ``lambda_omega``
    the amplification weights (each in ``[1, 1 + omega]``), and ``loss_trace``
    the optimizer's per-iteration objective.  ``trace`` keeps the full
    iteration record.
    """

    lambda_o: np.ndarray
    lambda_star: np.ndarray
    lambda_delta: np.ndarray
    lambda_omega: np.ndarray
    loss_trace: np.ndarray
    trace: OptimizeTrace

    def as_dict(self) -> dict:
        return {
            "lambda_o": self.lambda_o.tolist(),
            "lambda_star": self.lambda_star.tolist(),
            "lambda_delta": self.lambda_delta.tolist(),
            "lambda_omega": self.lambda_omega.tolist(),
            "loss_trace": self.loss_trace.tolist(),
            "dist_scene": self.trace.dist_scene.tolist(),
            "dist_id": self.trace.dist_id.tolist(),
            "step_sizes": self.trace.step_sizes.tolist(),
        }

    @classmethod
    def from_dict(cls, doc) -> "ExcursionProfile":
        """Rebuild a profile from its :meth:`as_dict` form (e.g. a saved report)."""
        keys = ("lambda_o", "lambda_star", "lambda_delta", "lambda_omega",
                "loss_trace", "dist_scene", "dist_id", "step_sizes")
        if not isinstance(doc, dict) or any(k not in doc for k in keys):
            missing = [k for k in keys if not isinstance(doc, dict) or k not in doc]
            raise ValidationError(f"profile document is missing fields: {missing}")
        arrays = {}
        for k in keys:
            arr = np.asarray(doc[k], dtype=np.float64).reshape(-1)
            if not np.all(np.isfinite(arr)):
                raise NonFinite(f"profile field {k!r} contains non-finite values")
            arrays[k] = arr
        trace = OptimizeTrace(loss=arrays["loss_trace"],
                              dist_scene=arrays["dist_scene"],
                              dist_id=arrays["dist_id"],
                              step_sizes=arrays["step_sizes"])
        return cls(lambda_o=arrays["lambda_o"], lambda_star=arrays["lambda_star"],
                   lambda_delta=arrays["lambda_delta"], lambda_omega=arrays["lambda_omega"],
                   loss_trace=arrays["loss_trace"], trace=trace)


def _align_rows(z_sc: np.ndarray, n: int) -> np.ndarray:
    """Truncate or zero-pad the scene matrix to ``n`` rows."""
    if z_sc.shape[0] == n:
        return z_sc
    if z_sc.shape[0] > n:
        return z_sc[:n]
    pad = np.zeros((n - z_sc.shape[0], z_sc.shape[1]))
    return np.vstack([z_sc, pad])


def _optimize(factors: SvdFactors, z_id: np.ndarray, z_sc: np.ndarray,
              cfg: OptimizerConfig) -> tuple[np.ndarray, OptimizeTrace]:
    u, v = factors.u, factors.v
    lam = factors.s.copy()
    total, m = cfg.total_iters, cfg.m_switch
    loss = np.zeros(total)
    dist_scene = np.zeros(total + 1)
    dist_id = np.zeros(total + 1)
    steps = np.zeros(total)

    recon = (u * lam) @ v.T
    dist_scene[0] = np.linalg.norm(recon - z_sc)
    dist_id[0] = np.linalg.norm(recon - z_id)
    initial_loss = dist_scene[0] ** 2

    eta = cfg.step_size
    strikes = 0
    prev_loss = None
    for t in range(total):
        beta = 0.0 if t < m else cfg.beta
        if t == m:
            # the objective changes shape here; loss comparisons restart
            prev_loss = None
            strikes = 0
        err_sc = recon - z_sc
        grad = 2.0 * ((u.T @ err_sc) * v.T).sum(axis=1)
        if beta:
            grad += 2.0 * beta * ((u.T @ (recon - z_id)) * v.T).sum(axis=1)
        lam = lam - eta * grad
        if cfg.clamp_nonnegative:
            np.maximum(lam, 0.0, out=lam)
        recon = (u * lam) @ v.T
        d_sc = float(np.linalg.norm(recon - z_sc))
        d_id = float(np.linalg.norm(recon - z_id))
        cur = d_sc ** 2 + beta * d_id ** 2
        loss[t] = cur
        dist_scene[t + 1] = d_sc
        dist_id[t + 1] = d_id
        steps[t] = eta
        if cur > DIVERGENCE_FACTOR * max(initial_loss, 1e-12):
            raise Diverged(
                f"loss {cur:.3e} exceeded {DIVERGENCE_FACTOR:.0e} x initial at iteration {t}"
            )
        if prev_loss is not None and cur > prev_loss:
            strikes += 1
            if strikes >= MAX_STRIKES:
                eta *= 0.5
                strikes = 0
        else:
            strikes = 0
        prev_loss = cur
    trace = OptimizeTrace(loss=loss, dist_scene=dist_scene, dist_id=dist_id, step_sizes=steps)
    return lam, trace


def two_phase_optimize(z_id_o, z_sc, cfg: Optional[OptimizerConfig] = None
                       ) -> tuple[np.ndarray, OptimizeTrace]:
    """Optimize the singular values of ``z_id_o`` toward the scene, then back.

    The singular vectors of ``z_id_o`` are held fixed throughout.  ``z_sc``
    must share the embedding width; its rows are truncated or zero-padded to
    match (an all-zero scene is legal and simply pulls the spectrum toward
    zero in phase one).

    Returns
    -------
    (lambda_star, trace)
        The optimized spectrum after the final iteration and the full
        per-iteration record.
    """
    cfg = cfg or OptimizerConfig()
    z_id = as_matrix(z_id_o, "z_id_o")
    if float(np.linalg.norm(z_id)) <= 1e-14:
        raise ZeroMatrix("identity matrix is all-zero; nothing to refine")
    z_sc = as_matrix(z_sc, "z_sc")
    if z_sc.shape[1] != z_id.shape[1]:
        raise DimensionMismatch(
            f"scene width {z_sc.shape[1]} does not match identity width {z_id.shape[1]}"
        )
    z_sc = _align_rows(z_sc, z_id.shape[0])
    return _optimize(svd_decompose(z_id), z_id, z_sc, cfg)


def excursion(lambda_o, lambda_star) -> np.ndarray:
    """Absolute change of each singular value, ``|lambda_star - lambda_o|``."""
    a = np.asarray(lambda_o, dtype=np.float64).reshape(-1)
    b = np.asarray(lambda_star, dtype=np.float64).reshape(-1)
    if a.size != b.size:
        raise LengthMismatch(f"spectra have different lengths: {a.size} vs {b.size}")
    return np.abs(b - a)


def reweight(lambda_delta, omega: float, invert: bool = False,
             degenerate_eps: float = 1e-12) -> np.ndarray:
    """Map excursions to amplification weights in ``[1, 1 + omega]``.

    The most-moved direction gets ``1 + omega`` and the least-moved gets 1,
    by min-max normalization; ``invert=True`` swaps the two ends.  When all
    excursions agree to within ``degenerate_eps`` every weight is 1.
    """
    delta = np.asarray(lambda_delta, dtype=np.float64).reshape(-1)
    if delta.size == 0:
        raise ValidationError("excursion vector is empty")
    if np.any(delta < 0.0):
        raise NegativeExcursion("excursion magnitudes must be nonnegative")
    if omega < 0.0:
        raise ValidationError(f"omega must be >= 0, got {omega}")
    lo, hi = float(delta.min()), float(delta.max())
    if hi - lo <= degenerate_eps:
        return np.ones_like(delta)
    frac = (hi - delta) if invert else (delta - lo)
    return 1.0 + omega * frac / (hi - lo)


def refine(z_id_o, z_sc, cfg: Optional[OptimizerConfig] = None,
           excursion_transform: Optional[Callable[[np.ndarray], np.ndarray]] = None
           ) -> tuple[np.ndarray, ExcursionProfile]:
    """De-contextualize an identity embedding against a scene embedding.

    Runs the two-phase optimizer, scores each spectral direction by its
    excursion, and rebuilds the embedding with scene-correlated directions
    amplified:``Z* = U diag(w * lambda_o) V^T``.  ``excursion_transform``,
    if given, maps the raw excursion vector before weighting (it must
    preserve length and nonnegativity).

    Returns
    -------
    (z_id_star, profile)
        The refined embedding (same shape as ``z_id_o``) and the full
        spectral audit of the run.
    """
    cfg = cfg or OptimizerConfig()
    z_id = as_matrix(z_id_o, "z_id_o")
    if float(np.linalg.norm(z_id)) <= 1e-14:
        raise ZeroMatrix("identity matrix is all-zero; nothing to refine")
    z_sc = as_matrix(z_sc, "z_sc")
    if z_sc.shape[1] != z_id.shape[1]:
        raise DimensionMismatch(
            f"scene width {z_sc.shape[1]} does not match identity width {z_id.shape[1]}"
        )
    z_sc = _align_rows(z_sc, z_id.shape[0])
    factors = svd_decompose(z_id)
    lambda_star, trace = _optimize(factors, z_id, z_sc, cfg)
    delta = excursion(factors.s, lambda_star)
    if excursion_transform is not None:
        delta = np.asarray(excursion_transform(delta), dtype=np.float64).reshape(-1)
        if delta.size != factors.s.size:
            raise LengthMismatch("excursion transform changed the vector length")
    weights = reweight(delta, cfg.omega, invert=cfg.invert_weighting,
                       degenerate_eps=cfg.degenerate_eps)
    z_star = (factors.u * (weights * factors.s)) @ factors.v.T
    profile = ExcursionProfile(
        lambda_o=factors.s,
        lambda_star=lambda_star,
        lambda_delta=delta,
        lambda_omega=weights,
        loss_trace=trace.loss,
        trace=trace,
    )
    return z_star, profile


def pca_suppress(z, criterion: str = "original",
                 profile: Optional[ExcursionProfile] = None,
                 energy_threshold: float = 0.9) -> np.ndarray:
    """Keep only the strongest spectral directions of ``z``.

    Directions are ranked by ``criterion``: their own singular values
    (``"original"``) or the amplification weights of a prior refinement run
    (``"omega"``, requires ``profile``).  The smallest prefix of the ranking
    whose cumulative squared criterion reaches ``energy_threshold`` of the
    total is kept; every other singular value is zeroed before
    reconstruction.  A threshold of 0 therefore keeps nothing and 1 keeps
    every direction that carries criterion mass.
    """
    if criterion not in ("original", "omega"):
        raise ValidationError(f"criterion must be 'original' or 'omega', got {criterion!r}")
    if not 0.0 <= energy_threshold <= 1.0:
        raise ValidationError(f"energy_threshold must lie in [0, 1], got {energy_threshold}")
    factors = svd_decompose(as_matrix(z, "z"))
    if criterion == "omega":
        if profile is None:
            raise MissingProfile("criterion 'omega' needs the profile of a refinement run")
        scores = np.asarray(profile.lambda_omega, dtype=np.float64).reshape(-1)
        if scores.size != factors.s.size:
            raise LengthMismatch(
                f"profile carries {scores.size} weights but z has {factors.s.size} "
                "spectral directions"
            )
    else:
        scores = factors.s
    order = np.argsort(-scores, kind="stable")
    csum = np.cumsum(scores[order] ** 2)
    total = float(csum[-1])
    target = energy_threshold * total
    if target <= 0.0:
        keep = 0
    else:
        # tiny slack so "reaches the threshold" survives rounding
        keep = min(int(np.searchsorted(csum, target - 1e-12 * max(total, 1.0))) + 1,
                   scores.size)
    kept = np.zeros(factors.s.size, dtype=bool)
    kept[order[:keep]] = True
    s_kept = np.where(kept, factors.s, 0.0)
    return (factors.u * s_kept) @ factors.v.T
