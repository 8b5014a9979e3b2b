"""Single-head attention over synthetic identity/scene subspaces.

The simulator builds a pair of subspaces with a controlled intersection,
samples token embeddings inside them, runs one row of scaled dot-product
attention, and splits the output's identity-subspace component into the part
contributed by identity tokens and the part contributed by scene tokens.
The scene part is the quantity the rest of the package suppresses or bounds.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    ComputationError,
    DimensionMismatch,
    InfeasibleSpec,
    NonDisjoint,
    NonFinite,
    QueryNotInId,
    SliceOverlap,
    ValidationError,
)
from .rng import SeedLike, rng_for, seed_key
from .spectral import (
    Projector,
    as_matrix,
    check_orthonormal,
    principal_angle_cosines,
    projector_from_basis,
    random_orthonormal,
)

#: Stage indices used to derive per-purpose generators from one seed.
_STAGE_BASES, _STAGE_Z_ID, _STAGE_Z_SC, _STAGE_WEIGHTS, _STAGE_QUERY = range(5)


@dataclass(frozen=True)
class SubspaceSpec:
    """Ambient dimension plus identity/scene subspace sizes and overlap.

    ``k_cap`` is the dimension of the shared intersection; feasibility
    requires ``k_id + k_sc - k_cap <= d`` and ``0 <= k_cap <= min(k_id, k_sc)``.
    """

    d: int
    k_id: int
    k_sc: int
    k_cap: int = 0
    seed: SeedLike = 0

    def __post_init__(self):
        if self.d < 1 or self.k_id < 1 or self.k_sc < 1:
            raise InfeasibleSpec(
                f"d, k_id, k_sc must be positive, got ({self.d}, {self.k_id}, {self.k_sc})"
            )
        if not 0 <= self.k_cap <= min(self.k_id, self.k_sc):
            raise InfeasibleSpec(
                f"k_cap={self.k_cap} must lie in [0, min(k_id, k_sc)={min(self.k_id, self.k_sc)}]"
            )
        if self.k_id + self.k_sc - self.k_cap > self.d:
            raise InfeasibleSpec(
                f"k_id + k_sc - k_cap = {self.k_id + self.k_sc - self.k_cap} exceeds d={self.d}"
            )
        seed_key(self.seed)


@dataclass(frozen=True)
class AttentionWeights:
    """Projection matrices of one attention head, all d x d."""

    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray
    d_k: int


@dataclass(frozen=True)
class AttentionRow:
    """One softmax row plus the token ranges it was split against."""

    alpha: np.ndarray
    id_slice: tuple[int, int]
    sc_slice: tuple[int, int]


@dataclass(frozen=True)
class ContextualizationReport:
    """Identity-subspace component of one attention output, split by source.

    ``t_id`` is contributed by identity tokens, ``t_sc`` by scene tokens, and
    their sum equals the projected output ``o_qid`` restricted to the identity
    subspace.  ``t_sc_norm`` is the Euclidean size of the scene leak.
    """

    o_qid: np.ndarray
    t_id: np.ndarray
    t_sc: np.ndarray
    t_sc_norm: float


def build_subspaces(spec: SubspaceSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample identity/scene bases sharing an exactly ``k_cap``-dimensional overlap.

    One orthonormal frame of ``k_id + k_sc - k_cap`` columns is drawn; the
    identity basis takes the leading ``k_id`` columns and the scene basis a
    window overlapping it in exactly the ``k_cap`` middle columns, so the two
    spans intersect in precisely that shared block (and are orthogonal when
    ``k_cap == 0``).

    Returns
    -------
    (b_id, b_sc, b_cap) : ndarrays of shape (d, k_id), (d, k_sc), (d, k_cap)
    """
    rng = rng_for(spec.seed, _STAGE_BASES)
    frame = random_orthonormal(spec.d, spec.k_id + spec.k_sc - spec.k_cap, rng)
    b_id = frame[:, : spec.k_id]
    lo = spec.k_id - spec.k_cap
    b_sc = frame[:, lo : lo + spec.k_sc]
    b_cap = frame[:, lo : spec.k_id]
    return b_id, b_sc, b_cap


def sample_embedding(basis, n: int, seed: SeedLike) -> np.ndarray:
    """Draw ``n`` token rows with standard-normal coordinates in ``basis``."""
    b = check_orthonormal(basis)
    if n < 1:
        raise ValidationError(f"need at least one row, got n={n}")
    coeffs = rng_for(seed).standard_normal((n, b.shape[1]))
    return coeffs @ b.T


def random_weights(d: int, seed: SeedLike, d_k: Optional[int] = None) -> AttentionWeights:
    """Random query/key/value matrices for a head of width ``d``.

    The value matrix has standard-normal entries (a generic dense mapping);
    the query/key matrices are scaled by ``1/sqrt(d)`` so the attention
    logits stay O(1) and no token's weight collapses to the underflow floor.
    """
    if d < 1:
        raise ValidationError(f"d must be positive, got {d}")
    rng = rng_for(seed)
    scale = 1.0 / np.sqrt(d)
    w_q = rng.standard_normal((d, d)) * scale
    w_k = rng.standard_normal((d, d)) * scale
    w_v = rng.standard_normal((d, d))
    return AttentionWeights(w_q=w_q, w_k=w_k, w_v=w_v, d_k=int(d_k or d))


def make_degenerate_wv(b_id, b_sc, seed: SeedLike, w0=None) -> AttentionWeights:
    """Weights whose value matrix sends the scene span nowhere near the identity span.

    Starting from a random (or supplied) ``w0``, the value matrix is
    ``w0 - P_sc @ w0 @ P_id``, which zeroes the identity-subspace image of
    every scene-span row exactly when the two spans are orthogonal.

    Raises
    ------
    NonDisjoint
        If the spans share a direction (any principal cosine above 1e-8).
    """
    b_id = check_orthonormal(b_id, "identity basis")
    b_sc = check_orthonormal(b_sc, "scene basis")
    cos = principal_angle_cosines(b_id, b_sc)
    if cos.size and float(cos.max()) > 1e-8:
        raise NonDisjoint(
            f"spans intersect: largest principal cosine {float(cos.max()):.3e}"
        )
    d = b_id.shape[0]
    rng = rng_for(seed)
    if w0 is None:
        w0 = rng.standard_normal((d, d))
    else:
        w0 = as_matrix(w0, "w0")
        if w0.shape != (d, d):
            raise DimensionMismatch(f"w0 must be {d}x{d}, got {w0.shape}")
    p_id = b_id @ b_id.T
    p_sc = b_sc @ b_sc.T
    w_v = w0 - p_sc @ w0 @ p_id
    scale = 1.0 / np.sqrt(d)
    return AttentionWeights(
        w_q=rng.standard_normal((d, d)) * scale,
        w_k=rng.standard_normal((d, d)) * scale,
        w_v=w_v,
        d_k=d,
    )


def _check_slices(id_slice, sc_slice, n: int) -> tuple[tuple[int, int], tuple[int, int]]:
    a = (int(id_slice[0]), int(id_slice[1]))
    b = (int(sc_slice[0]), int(sc_slice[1]))
    for name, (lo, hi) in (("id_slice", a), ("sc_slice", b)):
        if not (0 <= lo <= hi <= n):
            raise SliceOverlap(f"{name}={lo, hi} out of range for {n} rows")
    lo, hi = sorted([a, b])
    if lo[1] > hi[0]:
        raise SliceOverlap(f"row ranges {a} and {b} overlap")
    if lo[0] != 0 or lo[1] != hi[0] or hi[1] != n:
        raise SliceOverlap(f"row ranges {a} and {b} do not partition 0..{n}")
    return a, b


def attention_forward(z, w: AttentionWeights, q_row: int,
                      id_slice=None, sc_slice=None) -> tuple[AttentionRow, np.ndarray]:
    """One row of scaled dot-product attention.

    The query is row ``q_row`` of ``z @ w_q``; logits are scaled by
    ``sqrt(d_k)`` and shifted by their maximum before exponentiation.
    Returns the softmax row and the attended output vector.
    """
    z = as_matrix(z, "token matrix")
    n, d = z.shape
    if not 0 <= int(q_row) < n:
        raise ValidationError(f"q_row={q_row} out of range for {n} rows")
    if w.d_k < 1:
        raise ValidationError(f"d_k must be positive, got {w.d_k}")
    if (id_slice is None) != (sc_slice is None):
        raise ValidationError("pass both id_slice and sc_slice or neither")
    if id_slice is None:
        id_slice, sc_slice = (0, n), (n, n)
    id_slice, sc_slice = _check_slices(id_slice, sc_slice, n)
    with np.errstate(over="ignore", invalid="ignore"):
        q = z[int(q_row)] @ w.w_q
        logits = (q @ (z @ w.w_k).T) / np.sqrt(float(w.d_k))
    if not np.isfinite(logits).all():
        raise NonFinite("attention logits overflowed")
    shifted = np.exp(logits - logits.max())
    alpha = shifted / shifted.sum()
    if not np.isfinite(alpha).all():
        raise NonFinite("softmax produced non-finite weights")
    out = alpha @ (z @ w.w_v)
    return AttentionRow(alpha=alpha, id_slice=id_slice, sc_slice=sc_slice), out


def split_contextualization(z, w: AttentionWeights, q_row: int, id_slice, sc_slice,
                            id_projector: Projector) -> ContextualizationReport:
    """Split the identity-subspace part of one attention output by token source.

    Token rows are grouped by ``id_slice`` / ``sc_slice`` (which must
    partition the matrix); the query row must fall inside the identity range.
    """
    z = as_matrix(z, "token matrix")
    n, d = z.shape
    id_slice, sc_slice = _check_slices(id_slice, sc_slice, n)
    if not id_slice[0] <= int(q_row) < id_slice[1]:
        raise QueryNotInId(f"q_row={q_row} outside identity range {id_slice}")
    if id_projector.dim != d:
        raise DimensionMismatch(
            f"projector dimension {id_projector.dim} does not match d={d}"
        )
    row, out = attention_forward(z, w, q_row, id_slice, sc_slice)
    p = id_projector.data
    values = z @ w.w_v
    a, b = id_slice
    c, e = sc_slice
    t_id = (row.alpha[a:b] @ values[a:b]) @ p
    t_sc = (row.alpha[c:e] @ values[c:e]) @ p if e > c else np.zeros(d)
    o_proj = out @ p
    gap = float(np.linalg.norm((t_id + t_sc) - o_proj))
    if gap > 1e-10 * max(1.0, float(np.linalg.norm(out))):
        raise ComputationError(f"identity-component split is inconsistent (gap {gap:.3e})")
    return ContextualizationReport(
        o_qid=out,
        t_id=t_id,
        t_sc=t_sc,
        t_sc_norm=float(np.linalg.norm(t_sc)),
    )


# --- synthetic-instance plumbing for the Monte-Carlo sweeps --------------------


@dataclass(frozen=True)
class SyntheticInstance:
    """Everything one simulated trial needs, derived from a single seed."""

    spec: SubspaceSpec
    b_id: np.ndarray
    b_sc: np.ndarray
    b_cap: np.ndarray
    z_id: np.ndarray
    z_sc: np.ndarray
    z: np.ndarray
    weights: AttentionWeights
    q_row: int
    id_slice: tuple[int, int]
    sc_slice: tuple[int, int]


def sample_instance(spec: SubspaceSpec, n_id: Optional[int] = None,
                    n_sc: Optional[int] = None, seed: Optional[SeedLike] = None,
                    degenerate: bool = False) -> SyntheticInstance:
    """Build one trial: bases, token rows, weights, and a random identity query.

    ``n_id`` / ``n_sc`` default to the subspace dimensions.  With
    ``degenerate=True`` the value matrix is constructed to annihilate the
    scene span's identity image (requires ``k_cap == 0``).
    """
    if seed is None:
        seed = spec.seed
    key = seed_key(seed)
    spec = dataclasses.replace(spec, seed=key)
    n_id = int(n_id) if n_id is not None else spec.k_id
    n_sc = int(n_sc) if n_sc is not None else spec.k_sc
    b_id, b_sc, b_cap = build_subspaces(spec)
    z_id = sample_embedding(b_id, n_id, key + (_STAGE_Z_ID,))
    z_sc = sample_embedding(b_sc, n_sc, key + (_STAGE_Z_SC,))
    if degenerate:
        weights = make_degenerate_wv(b_id, b_sc, key + (_STAGE_WEIGHTS,))
    else:
        weights = random_weights(spec.d, key + (_STAGE_WEIGHTS,))
    q_row = int(rng_for(key, _STAGE_QUERY).integers(0, n_id))
    return SyntheticInstance(
        spec=spec,
        b_id=b_id,
        b_sc=b_sc,
        b_cap=b_cap,
        z_id=z_id,
        z_sc=z_sc,
        z=np.vstack([z_id, z_sc]),
        weights=weights,
        q_row=q_row,
        id_slice=(0, n_id),
        sc_slice=(n_id, n_id + n_sc),
    )


@dataclass(frozen=True)
class ContextualizationSweep:
    """Scene-leak statistics across seeded trials."""

    trials: int
    t_sc_norms: np.ndarray
    split_gap_max: float

    def summary(self) -> dict:
        return {
            "trials": self.trials,
            "t_sc_norm_min": float(self.t_sc_norms.min()),
            "t_sc_norm_median": float(np.median(self.t_sc_norms)),
            "t_sc_norm_max": float(self.t_sc_norms.max()),
            "positive": int(np.count_nonzero(self.t_sc_norms > 1e-12)),
            "split_gap_max": self.split_gap_max,
        }


def contextualization_sweep(spec: SubspaceSpec, trials: int, seed: SeedLike,
                            n_id: Optional[int] = None,
                            n_sc: Optional[int] = None) -> ContextualizationSweep:
    """Measure the scene leak over ``trials`` independently seeded instances.

    Also tracks the worst deviation between ``t_id + t_sc`` and the projected
    attention output, which should sit at rounding level on every trial.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    key = seed_key(seed)
    norms = np.zeros(trials)
    gap_max = 0.0
    for k in range(trials):
        inst = sample_instance(spec, n_id, n_sc, seed=key + (k,))
        p_id = projector_from_basis(inst.b_id)
        rep = split_contextualization(
            inst.z, inst.weights, inst.q_row, inst.id_slice, inst.sc_slice, p_id
        )
        norms[k] = rep.t_sc_norm
        resid = np.linalg.norm((rep.t_id + rep.t_sc) - rep.o_qid @ p_id.data)
        gap_max = max(gap_max, float(resid / max(1.0, np.linalg.norm(rep.o_qid))))
    return ContextualizationSweep(trials=trials, t_sc_norms=norms, split_gap_max=gap_max)


def degenerate_suppression_check(spec: SubspaceSpec, seeds, n_id: Optional[int] = None,
                                 n_sc: Optional[int] = None) -> list[dict]:
    """Scene leak under the annihilating value matrix, one entry per seed.

    Each entry reports the leak norm and a scale reference
    ``|Z_sc|_2 * |W_v|_2`` against which the leak should vanish.
    """
    if spec.k_cap != 0:
        raise NonDisjoint("the annihilating construction needs disjoint spans (k_cap == 0)")
    results = []
    for s in seeds:
        inst = sample_instance(spec, n_id, n_sc, seed=s, degenerate=True)
        p_id = projector_from_basis(inst.b_id)
        rep = split_contextualization(
            inst.z, inst.weights, inst.q_row, inst.id_slice, inst.sc_slice, p_id
        )
        scale = float(
            np.linalg.norm(inst.z_sc, 2) * np.linalg.norm(inst.weights.w_v, 2)
        )
        results.append({"seed": int(s) if np.isscalar(s) else list(s),
                        "t_sc_norm": rep.t_sc_norm,
                        "scale": scale})
    return results
