import numpy as np
import pytest
from numpy.testing import assert_allclose

from sdec import attention, spectral
from sdec.attention import (
    AttentionWeights,
    SubspaceSpec,
    attention_forward,
    build_subspaces,
    contextualization_sweep,
    degenerate_suppression_check,
    make_degenerate_wv,
    random_weights,
    sample_embedding,
    sample_instance,
    split_contextualization,
)
from sdec.errors import (
    DimensionMismatch,
    InfeasibleSpec,
    NonDisjoint,
    NonFinite,
    QueryNotInId,
    SliceOverlap,
    ValidationError,
)
from sdec.spectral import principal_angle_cosines, projector_from_basis


def identity_weights(d):
    return AttentionWeights(w_q=np.eye(d), w_k=np.eye(d), w_v=np.eye(d), d_k=d)


# --- subspace construction -----------------------------------------------------


def test_disjoint_construction_is_orthogonal():
    b_id, b_sc, b_cap = build_subspaces(SubspaceSpec(d=4, k_id=2, k_sc=2, k_cap=0, seed=1))
    assert b_cap.shape == (4, 0)
    cos = principal_angle_cosines(b_id, b_sc)
    assert np.all(cos <= 1e-10)


def test_overlap_construction_shares_exactly_k_cap_directions():
    spec = SubspaceSpec(d=64, k_id=8, k_sc=8, k_cap=2, seed=7)
    b_id, b_sc, b_cap = build_subspaces(spec)
    assert b_id.shape == (64, 8) and b_sc.shape == (64, 8) and b_cap.shape == (64, 2)
    cos = principal_angle_cosines(b_id, b_sc)
    assert np.count_nonzero(cos >= 1.0 - 1e-10) == 2
    assert np.all(cos[2:] < 0.99)
    # the shared block is literally part of both bases
    for col in b_cap.T:
        assert any(np.allclose(col, c) for c in b_id.T)
        assert any(np.allclose(col, c) for c in b_sc.T)


def test_infeasible_specs_rejected():
    with pytest.raises(InfeasibleSpec):
        SubspaceSpec(d=8, k_id=5, k_sc=5, k_cap=1)
    with pytest.raises(InfeasibleSpec):
        SubspaceSpec(d=16, k_id=2, k_sc=4, k_cap=3)
    with pytest.raises(InfeasibleSpec):
        SubspaceSpec(d=4, k_id=0, k_sc=2)


def test_sample_embedding_stays_in_span():
    spec = SubspaceSpec(d=24, k_id=5, k_sc=4, k_cap=1, seed=11)
    b_id, b_sc, _ = build_subspaces(spec)
    z = sample_embedding(b_id, 9, seed=3)
    assert z.shape == (9, 24)
    p = projector_from_basis(b_id).data
    assert np.linalg.norm(z - z @ p) <= 1e-10 * max(1.0, np.linalg.norm(z))
    assert np.array_equal(z, sample_embedding(b_id, 9, seed=3))
    with pytest.raises(ValidationError):
        sample_embedding(b_id, 0, seed=3)


# --- attention_forward -----------------------------------------------------------


def test_softmax_row_matches_direct_computation():
    z = np.array([[1.0, 0.5], [-0.3, 2.0], [0.7, -1.2]])
    row, out = attention_forward(z, identity_weights(2), q_row=0)
    logits = (z[0] @ z.T) / np.sqrt(2.0)
    expect = np.exp(logits - logits.max())
    expect /= expect.sum()
    assert_allclose(row.alpha, expect, rtol=1e-15)
    assert_allclose(out, expect @ z, rtol=1e-15)


def test_identical_tokens_share_attention():
    z = np.array([[1.0, 2.0], [1.0, 2.0]])
    row, _ = attention_forward(z, random_weights(2, seed=0), q_row=1)
    assert_allclose(row.alpha, [0.5, 0.5], atol=1e-15)


def test_softmax_rows_are_distributions():
    rng = np.random.default_rng(17)
    for _ in range(50):
        n, d = int(rng.integers(1, 9)), int(rng.integers(2, 12))
        z = rng.standard_normal((n, d)) * 3.0
        row, _ = attention_forward(z, random_weights(d, seed=int(rng.integers(1 << 30))),
                                   q_row=int(rng.integers(0, n)))
        assert np.all(row.alpha >= 0.0)
        assert abs(row.alpha.sum() - 1.0) <= 1e-12


def test_forward_rejects_overflow_and_bad_query():
    z = np.full((2, 2), 1e200)
    w = AttentionWeights(w_q=np.eye(2) * 1e200, w_k=np.eye(2), w_v=np.eye(2), d_k=2)
    with pytest.raises(NonFinite):
        attention_forward(z, w, q_row=0)
    with pytest.raises(ValidationError):
        attention_forward(np.eye(2), identity_weights(2), q_row=2)


# --- split_contextualization -----------------------------------------------------


def brute_force_split(z, w, q_row, id_slice, sc_slice, p):
    logits = (z[q_row] @ w.w_q) @ (z @ w.w_k).T / np.sqrt(w.d_k)
    alpha = np.exp(logits - logits.max())
    alpha /= alpha.sum()
    t_id = np.zeros(z.shape[1])
    t_sc = np.zeros(z.shape[1])
    for j in range(z.shape[0]):
        contrib = alpha[j] * (z[j] @ w.w_v) @ p
        if id_slice[0] <= j < id_slice[1]:
            t_id += contrib
        else:
            t_sc += contrib
    return t_id, t_sc


def test_split_matches_brute_force():
    rng = np.random.default_rng(5)
    for k in range(20):
        spec = SubspaceSpec(d=16, k_id=3, k_sc=4, k_cap=int(k % 3 > 0), seed=k)
        inst = sample_instance(spec, n_id=5, n_sc=6, seed=(100, k))
        p = projector_from_basis(inst.b_id)
        rep = split_contextualization(inst.z, inst.weights, inst.q_row,
                                      inst.id_slice, inst.sc_slice, p)
        t_id, t_sc = brute_force_split(inst.z, inst.weights, inst.q_row,
                                       inst.id_slice, inst.sc_slice, p.data)
        assert_allclose(rep.t_id, t_id, atol=1e-12)
        assert_allclose(rep.t_sc, t_sc, atol=1e-12)
        scale = max(1.0, np.linalg.norm(rep.o_qid))
        assert np.linalg.norm((rep.t_id + rep.t_sc) - rep.o_qid @ p.data) <= 1e-10 * scale
        assert rep.t_sc_norm == pytest.approx(np.linalg.norm(t_sc), abs=1e-13)


def test_split_with_empty_scene_block():
    z = np.array([[1.0, -2.0, 0.5]])
    rep = split_contextualization(z, identity_weights(3), 0, (0, 1), (1, 1),
                                  projector_from_basis(np.eye(3)))
    assert_allclose(rep.t_sc, np.zeros(3), atol=0)
    assert_allclose(rep.t_id, z[0], rtol=1e-15)


def test_split_validation():
    z = np.zeros((4, 3))
    z[:, 0] = [1.0, 2.0, 3.0, 4.0]
    w = identity_weights(3)
    p = projector_from_basis(np.eye(3))
    with pytest.raises(SliceOverlap):
        split_contextualization(z, w, 0, (0, 3), (2, 4), p)
    with pytest.raises(SliceOverlap):
        split_contextualization(z, w, 0, (0, 1), (2, 4), p)
    with pytest.raises(QueryNotInId):
        split_contextualization(z, w, 3, (0, 2), (2, 4), p)
    with pytest.raises(DimensionMismatch):
        split_contextualization(z, w, 0, (0, 2), (2, 4), projector_from_basis(np.eye(4)))


# --- degenerate value matrix ------------------------------------------------------


def test_degenerate_construction_arithmetic():
    b_id = np.array([[1.0], [0.0]])
    b_sc = np.array([[0.0], [1.0]])
    w = make_degenerate_wv(b_id, b_sc, seed=0, w0=np.eye(2))
    assert_allclose(w.w_v, np.eye(2), atol=0)


def test_degenerate_wv_annihilates_scene_image():
    for s in range(10):
        spec = SubspaceSpec(d=32, k_id=6, k_sc=5, k_cap=0, seed=s)
        b_id, b_sc, _ = build_subspaces(spec)
        w = make_degenerate_wv(b_id, b_sc, seed=(s, 1))
        p_id = b_id @ b_id.T
        z_sc = sample_embedding(b_sc, 7, seed=(s, 2))
        scale = np.linalg.norm(z_sc, 2) * np.linalg.norm(w.w_v, 2)
        assert np.linalg.norm(z_sc @ w.w_v @ p_id) <= 1e-10 * scale
        # identity-span rows keep a generically nonzero image
        z_id = sample_embedding(b_id, 7, seed=(s, 3))
        for row in z_id:
            assert np.linalg.norm(row @ w.w_v @ p_id) > 1e-6


def test_degenerate_requires_disjoint_spans():
    b = np.eye(3)[:, :2]
    with pytest.raises(NonDisjoint):
        make_degenerate_wv(b, b[:, :1], seed=0)


# --- sweeps -----------------------------------------------------------------------


def test_scene_leak_is_generically_nonzero():
    for k_cap in (0, 1):
        spec = SubspaceSpec(d=24, k_id=4, k_sc=4, k_cap=k_cap, seed=0)
        sweep = contextualization_sweep(spec, trials=200, seed=42)
        assert sweep.trials == 200
        assert np.all(sweep.t_sc_norms > 1e-12)
        assert sweep.split_gap_max <= 1e-10


def test_sweep_is_reproducible():
    spec = SubspaceSpec(d=16, k_id=3, k_sc=3, k_cap=1, seed=0)
    a = contextualization_sweep(spec, trials=32, seed=7)
    b = contextualization_sweep(spec, trials=32, seed=7)
    assert np.array_equal(a.t_sc_norms, b.t_sc_norms)
    assert a.summary() == b.summary()
    with pytest.raises(ValidationError):
        contextualization_sweep(spec, trials=0, seed=7)


def test_degenerate_check_reports_vanishing_leak():
    spec = SubspaceSpec(d=24, k_id=4, k_sc=4, k_cap=0, seed=0)
    rows = degenerate_suppression_check(spec, seeds=range(10), n_id=5, n_sc=5)
    assert len(rows) == 10
    for row in rows:
        assert row["t_sc_norm"] <= 1e-10 * row["scale"]
    with pytest.raises(NonDisjoint):
        degenerate_suppression_check(
            SubspaceSpec(d=24, k_id=4, k_sc=4, k_cap=1, seed=0), seeds=[0]
        )
