"""Acceptance suite: one test per release criterion, at its stated tolerance.

Each test prints a single PASS line on success (run with `pytest -s` to see
them); a failure shows up as a normal pytest failure for that criterion.
"""
import math

import numpy as np
import pytest

from pae_kit import (
    AugKind,
    LossSpec,
    PaeConfig,
    alpha_sweep,
    aug_plus,
    build_gs,
    coefficients,
    compute_dpe_targets,
    compute_pae,
    cosine_similarity,
    finite_diff_check,
    fixture_basis_items,
    fixture_triples,
    group_heatmap,
    make_generator,
    make_synthetic_fixture,
    normalize,
    optimize,
    project,
    trajectory_similarity,
)
from conftest import image_emb, random_unit, text_emb


def _random_gs(rng, dim, n):
    prompts = [text_emb(f"p{i}", rng.standard_normal(dim)) for i in range(n)]
    return build_gs(prompts)


def test_algebraic_identity_suite():
    rng = np.random.default_rng(2024)
    dim = 12
    for trial in range(1000):
        s = _random_gs(rng, dim, 3)
        e_I = normalize(rng.standard_normal(dim))
        w = project(s, e_I)
        r = e_I - w
        # Reconstruction, exact up to one rounding in the add
        np.testing.assert_allclose(w + r, e_I, rtol=0, atol=1e-15)
        # Residual orthogonality and Pythagorean split
        assert np.max(np.abs(coefficients(s, r))) < 1e-6
        assert abs(np.dot(e_I, e_I) - (np.dot(w, w) + np.dot(r, r))) < 1e-6
        # Projection idempotence
        assert np.max(np.abs(project(s, w) - w)) < 1e-6
        # Coefficient-sum conservation under plus-augmentation
        e_T = rng.standard_normal(dim)
        d_sum = np.sum(coefficients(s, project(s, e_T)))
        if abs(d_sum) < 1e-6:
            e_T = e_T + s.basis[0]
        alpha = rng.uniform(0, 10)
        out = aug_plus(s, w, e_T, alpha)
        assert abs(np.sum(coefficients(s, out)) - np.sum(coefficients(s, w))) < 1e-6
        # alpha=0 identity, exact
        np.testing.assert_array_equal(aug_plus(s, w, e_T, 0.0), w)
    # simple-augmentation collapse: PAE = e_I + alpha * e_T
    for trial in range(100):
        s = _random_gs(rng, dim, 3)
        cfg = PaeConfig("gs", s, AugKind("simple", rng.uniform(0, 5)))
        e_I = normalize(rng.standard_normal(dim))
        e_T = normalize(rng.standard_normal(dim))
        out = compute_pae(cfg, image_emb("i", e_I), text_emb("t", e_T))
        assert np.max(np.abs(out - (e_I + cfg.augmentation.alpha * e_T))) < 1e-9
    print("[PASS] algebraic identity suite (1000 random instances)")


def test_chord_identity_and_ranking():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        a = random_unit(rng, 10)
        b = random_unit(rng, 10)
        chord = math.sqrt(2 - 2 * cosine_similarity(a, b))
        assert abs(np.linalg.norm(a - b) - chord) < 1e-6
    for _ in range(200):
        q = random_unit(rng, 6)
        cands = [random_unit(rng, 6) for _ in range(10)]
        by_dist = sorted(range(10), key=lambda i: np.linalg.norm(q - cands[i]))
        by_cos = sorted(range(10), key=lambda i: -cosine_similarity(q, cands[i]))
        assert by_dist == by_cos
    print("[PASS] chord-length identity on 10^4 unit pairs + ranking equivalence")


def test_hand_computed_pae_vector():
    s = build_gs([text_emb("p0", [1, 0, 0]), text_emb("p1", [0, 1, 0])])
    cfg = PaeConfig("gs", s, AugKind("plus", 1.0))
    out = compute_pae(cfg, image_emb("i", [0.6, 0, 0.8]), text_emb("t", [0, 1, 0]))
    np.testing.assert_allclose(out, [0, 0.6, 0.8], atol=1e-9)
    print("[PASS] hand-computed golden vector (0, 0.6, 0.8) within 1e-9")


def test_gradient_correctness_all_combinations():
    dim = 8
    rng = np.random.default_rng(99)
    s = _random_gs(rng, dim, 3)
    specs = {
        "naive_text": LossSpec("naive_text", target=random_unit(rng, dim)),
        "pae": LossSpec("pae", target=random_unit(rng, dim) * 1.3),
        "dpe": LossSpec("dpe", subspace=s,
                        projected_text=project(s, random_unit(rng, dim) + s.basis[0])),
        "directional": LossSpec("directional", origin_image=random_unit(rng, dim),
                                text=random_unit(rng, dim),
                                neutral_text=random_unit(rng, dim)),
    }
    generators = {
        "linear": make_generator("linear", 11, dim, dim),
        "mlp1": make_generator("mlp1", 12, dim, dim, hidden_dim=10),
    }
    for gname, g in generators.items():
        for sname, spec in specs.items():
            for _ in range(10):
                z = rng.standard_normal(dim)
                err = finite_diff_check(spec, g, z, eps=1e-5)
                assert err < 1e-4, (gname, sname, err)
    print("[PASS] gradient correctness: 2 generators x 4 targets x 10 points, rel err < 1e-4")


def test_optimization_convergence_identity_fixture():
    s = build_gs([text_emb("p0", [1, 0, 0]), text_emb("p1", [0, 1, 0])])
    e_I = normalize([0.6, 0, 0.8])
    e_T = np.array([0, 1.0, 0])
    g = make_generator("linear", 0, 3, 3)
    cfg = PaeConfig("gs", s, AugKind("plus", 1.0))
    targets = {
        "naive": LossSpec("naive_text", target=e_T),
        "pae": LossSpec("pae", target=compute_pae(cfg, e_I, e_T)),
        "dpe": LossSpec("dpe", subspace=s,
                        projected_text=compute_dpe_targets(s, e_I, e_T)[1]),
    }
    for name, spec in targets.items():
        trace = optimize(spec, g, e_I, lr=0.1, max_steps=500, tol=1e-3)
        assert trace.converged, name
        assert trace.losses[-1] < 1e-3
    print("[PASS] identity-generator convergence: naive, pae, dpe < 1e-3 within 500 steps")


def test_disentanglement_residual_preserved():
    bundle = make_synthetic_fixture("pae_triples", 7)
    s = build_gs(fixture_basis_items(bundle))
    cfg = PaeConfig("gs", s, AugKind("plus", 1.0))
    g = make_generator("linear", 0, bundle.dim, bundle.dim)

    def out_of_span(v):
        return v - project(s, v)

    pae_cosines, naive_cosines = [], []
    for e_I_item, e_T_item, _ in fixture_triples(bundle):
        e_I = normalize(e_I_item.vector)
        e_T = normalize(e_T_item.vector)
        r = out_of_span(e_I)
        pae_vec = compute_pae(cfg, e_I_item, e_T_item)
        tr_pae = optimize(LossSpec("pae", target=pae_vec), g, e_I,
                          lr=0.1, max_steps=500, tol=1e-4)
        tr_naive = optimize(LossSpec("naive_text", target=e_T), g, e_I,
                            lr=0.1, max_steps=500, tol=1e-4)
        pae_cosines.append(cosine_similarity(out_of_span(tr_pae.final_output), r))
        naive_cosines.append(cosine_similarity(out_of_span(tr_naive.final_output), r))
    for c_pae, c_naive in zip(pae_cosines, naive_cosines):
        assert c_pae > 0.99
        assert c_naive < c_pae
    print("[PASS] disentanglement: residual cosine > 0.99 for pae target, "
          f"naive strictly lower (pae min {min(pae_cosines):.4f}, "
          f"naive max {max(naive_cosines):.4f})")


def test_criteria_machinery_on_fixture():
    bundle = make_synthetic_fixture("pae_triples", 7)
    triples = fixture_triples(bundle)
    s = build_gs(fixture_basis_items(bundle))
    cfg = PaeConfig("gs", s, AugKind("plus", 1.0))
    result = alpha_sweep([cfg], [0.0, 0.5, 1.0, 2.0, 5.0], triples)
    assert result.passing_alphas.get("gs+plus"), "no passing alpha range"
    row0 = next(r for r in result.rows if r.alpha == 0.0)
    assert not row0.criterion2  # alpha=0 leaves the embedding unchanged
    print(f"[PASS] criteria machinery: passing alphas {result.passing_alphas['gs+plus']}, "
          "alpha=0 fails criterion 2")


def test_dpe_ablation_moves_residual_more():
    bundle = make_synthetic_fixture("grouped_attributes", 3)
    s = build_gs(fixture_basis_items(bundle))
    e_I = normalize(bundle.get("img_probe").vector)
    e_T = normalize(bundle.get("txt_target").vector)
    dim = bundle.dim
    cfg = PaeConfig("gs", s, AugKind("plus", 1.0))
    pae_vec = compute_pae(cfg, e_I, e_T)
    _, proj_text = compute_dpe_targets(s, e_I, e_T)

    def out_of_span_move(trace):
        d = trace.final_output - e_I
        return np.linalg.norm(d - project(s, d))

    for seed in (1, 2, 3):
        g = make_generator("linear", seed, dim, dim)
        z0 = np.linalg.solve(g.params["W"], e_I - g.params["b"])
        tr_pae = optimize(LossSpec("pae", target=pae_vec), g, z0,
                          lr=0.1, max_steps=500, tol=1e-3)
        tr_dpe = optimize(LossSpec("dpe", subspace=s, projected_text=proj_text),
                          g, z0, lr=0.1, max_steps=500, tol=1e-3)
        assert out_of_span_move(tr_dpe) > out_of_span_move(tr_pae), seed
    print("[PASS] double-projection ablation drags the out-of-subspace component "
          "more than the full operator (3 seeds)")


def test_analysis_fixture_directions():
    # trajectory: in-subspace similarity decays faster than full-space
    bundle = make_synthetic_fixture("attribute_trajectory", 0)
    frames = bundle.with_tag("role=frame")
    s = build_gs(fixture_basis_items(bundle))
    full = trajectory_similarity(frames, "first_frame")
    sub = trajectory_similarity(frames, "first_frame", space=s)
    assert all(sub.values[t] <= full.values[t] for t in range(1, len(frames)))
    assert sub.values[-1] < full.values[-1]
    # heat map: block contrast increases after projection
    grouped = make_synthetic_fixture("grouped_attributes", 3)
    members = grouped.with_tag("role=member")
    sg = build_gs(fixture_basis_items(grouped))
    assert group_heatmap(members, space=sg).block_contrast() > \
        group_heatmap(members).block_contrast()
    print("[PASS] analysis fixtures: faster in-subspace decay; "
          "projection raises group block contrast")
