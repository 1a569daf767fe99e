"""Acceptance gate: one test per criterion, each at its stated tolerance.

The terminal summary prints a PASS/FAIL line per test (see conftest.py).
"""
import os
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from conftest import TOY_SENTENCES, synthetic_pairs
from dkpca._threads import reference_mode
from dkpca.classify import knn_fit, knn_predict_many
from dkpca.cli import main
from dkpca.corpus import corpus_from_pairs, load_dataset
from dkpca.eigen import jacobi_eigh
from dkpca.evaluation import (PipelineConfig, SplitPlan, build_kernel_for, compute_metrics, embed, make_splits,
                              run_experiment)
from dkpca.kernels import (cooccurrence_matrix, diffusion_semantic_matrix, gram_diffusion,
                           gram_diffusion_factored, gram_linear, gram_poly, gram_rbf, validate_mercer)
from dkpca.kpca import center_kernel, kernel_pca, project, symmetric_eigendecomposition


def random_doc_term(rng, m, n, high=4):
    D = rng.integers(0, high, size=(m, n)).astype(float)
    D[rng.integers(0, m), :] += D.sum(axis=0) == 0
    return D


def every_kernel(D):
    B = (D > 0).astype(int)
    S = diffusion_semantic_matrix(cooccurrence_matrix(B), 0.3, 3)
    return [gram_linear(D), gram_rbf(D, 2.0), gram_rbf(D, 2.0, squared=False), gram_poly(D, 3),
            gram_diffusion(D, S), gram_diffusion_factored(D, B, 0.0039, 3)]


def test_criterion_01_lambda_zero_degenerates_to_linear():
    corpus = corpus_from_pairs("interest", synthetic_pairs(20, seed=0))
    start = time.perf_counter()
    with reference_mode():
        lin = embed(corpus, PipelineConfig(kernel="linear"))
        for steps in (0, 1, 3, 8):
            for route in ("explicit", "factored"):
                cfg = PipelineConfig(kernel="diffusion", lam=0.0, steps=steps, diffusion_route=route)
                dif = embed(corpus, cfg)
                assert np.array_equal(dif.points, lin.points), (steps, route)
                assert np.array_equal(dif.spectrum.eigenvalues, lin.spectrum.eigenvalues)
        labels = np.array(corpus.labels)
        for train, test in make_splits(20, SplitPlan(0.5, repeats=5, seed=9)):
            pred_lin = knn_predict_many(knn_fit(lin.points[train], labels[train].tolist(), 3), lin.points[test])
            pred_dif = knn_predict_many(knn_fit(dif.points[train], labels[train].tolist(), 3), dif.points[test])
            assert pred_lin == pred_dif
        plans = [SplitPlan(r, repeats=10, seed=0) for r in (0.3, 0.5)]
        a = run_experiment(corpus, PipelineConfig(kernel="linear", k=3), plans)
        b = run_experiment(corpus, PipelineConfig(kernel="diffusion", lam=0.0, k=3), plans)
        assert [r.per_repeat for r in a.rows] == [r.per_repeat for r in b.rows]
    assert time.perf_counter() - start < 1.0


def test_criterion_02_diffusion_kernel_matches_brute_force():
    rng = np.random.default_rng(2)
    cases = []
    for _ in range(100):
        m, n = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        D = random_doc_term(rng, m, n)
        B = (D > 0).astype(int)
        cases.append((D, B, float(rng.choice([0.1, 1.0])), int(rng.integers(0, 4))))
    start = time.perf_counter()
    ours = [gram_diffusion(D, diffusion_semantic_matrix(cooccurrence_matrix(B), lam, steps)).values
            for D, B, lam, steps in cases]
    elapsed = time.perf_counter() - start
    # entries reach 1e10 at lam=1, steps=3; below unit scale the bound is the plain absolute one
    worst = 0.0
    for K, (D, B, lam, steps) in zip(ours, cases):
        expected = np.array(oracles.diffusion_kernel(D.tolist(), B.tolist(), lam, steps))
        scale = max(1.0, np.abs(expected).max())
        worst = max(worst, np.abs(K - expected).max() / scale)
    print(f"max scaled error {worst:.2e}, {elapsed:.3f}s for 100 cases")
    assert worst <= 1e-10
    assert elapsed < 1.0


def test_criterion_03_every_kernel_is_mercer():
    rng = np.random.default_rng(3)
    for _ in range(100):
        D = random_doc_term(rng, int(rng.integers(2, 12)), int(rng.integers(2, 10)))
        for K in every_kernel(D):
            verdict = validate_mercer(K)
            scale = np.abs(K.values).max()
            assert verdict.symmetry_tol == 1e-9 * scale and verdict.eigen_tol == 1e-8 * scale
            assert verdict.passed, (K.kind, verdict)


def test_criterion_04_centering():
    rng = np.random.default_rng(4)
    for _ in range(50):
        m = int(rng.integers(2, 15))
        D = random_doc_term(rng, m, int(rng.integers(2, 10)))
        for K in every_kernel(D):
            Kc = center_kernel(K).values
            bound = 1e-8 * m * np.abs(Kc).max()
            assert np.abs(Kc.sum(axis=0)).max() <= bound
            assert np.abs(Kc.sum(axis=1)).max() <= bound
            assert np.abs(center_kernel(Kc).values - Kc).max() <= 1e-10 * max(1.0, np.abs(Kc).max())


def test_criterion_05_eigensolver():
    rng = np.random.default_rng(5)
    for _ in range(3):
        A = rng.normal(size=(50, 50))
        for K in (A + A.T, center_kernel(A @ A.T).values):
            spec = symmetric_eigendecomposition(K, method="jacobi")
            w, W = spec.eigenvalues, spec.eigenvectors
            frob = np.linalg.norm(K)
            residuals = np.linalg.norm(K @ W - W * w, axis=0)
            assert residuals.max() <= 1e-8 * frob
            assert np.abs(W.T @ W - np.eye(50)).max() <= 1e-9
    # diagonal plus rank one: eigenvalues c + |u|^2 along u, c elsewhere
    u = np.array([1.0, 2.0, 2.0])
    for A, expected in ((np.eye(3) + np.ones((3, 3)), [4, 1, 1]), (2 * np.eye(3) + np.outer(u, u), [11, 2, 2])):
        spec = symmetric_eigendecomposition(A, method="jacobi")
        assert np.abs(spec.eigenvalues - expected).max() <= 1e-10
        w, _, _ = jacobi_eigh(A)
        assert np.abs(np.sort(w)[::-1] - expected).max() <= 1e-10
    spec = symmetric_eigendecomposition(2 * np.eye(3) + np.outer(u, u), method="jacobi")
    assert np.abs(np.abs(spec.eigenvectors[:, 0]) - u / 3).max() <= 1e-10


def test_criterion_06_projection_identities():
    rng = np.random.default_rng(6)
    for m in (5, 12, 30):
        for rank in (m, m // 2):
            X = rng.normal(size=(m, rank))
            Kc = center_kernel(X @ X.T).values
            spec = symmetric_eigendecomposition(Kc)
            d = spec.positive_count
            Y = project(spec, d).coordinates
            lam = spec.eigenvalues[:d]
            assert np.abs(Y @ Y.T - np.diag(lam)).max() <= 1e-6 * lam[0]
            sq = ((Y.T[:, None, :] - Y.T[None, :, :]) ** 2).sum(axis=2)
            diag = np.diag(Kc)
            expected = diag[:, None] + diag[None, :] - 2 * Kc
            assert np.abs(sq - expected).max() <= 1e-6


def covariance_pca_scores(D):
    Xc = D - D.mean(axis=0)
    C = Xc.T @ Xc / (len(D) - 1)
    w, V = np.linalg.eigh(C)
    order = np.argsort(w)[::-1]
    return w[order], Xc @ V[:, order]


def test_criterion_07_linear_kpca_is_pca():
    rng = np.random.default_rng(7)
    for _ in range(50):
        D = rng.normal(size=(6, 4))
        proj, spec = kernel_pca(gram_linear(D))
        w, scores = covariance_pca_scores(D)
        d = proj.dimension
        assert d == 4
        Y = proj.points
        for i in range(d):
            a, b = Y[:, i], scores[:, i]
            assert min(np.abs(a - b).max(), np.abs(a + b).max()) <= 1e-6
        np.testing.assert_allclose(spec.eigenvalues[:d] / 5, w, rtol=1e-9)


def test_criterion_08_micro_f1_is_accuracy():
    rng = np.random.default_rng(8)
    classes = ["s1", "s2", "s3", "s4", "s5"]
    for _ in range(1000):
        n = int(rng.integers(1, 60))
        truth = rng.choice(classes, size=n).tolist()
        pred = rng.choice(classes, size=n).tolist()
        m = compute_metrics(pred, truth, classes)
        assert m.f1_micro == m.accuracy
    m = compute_metrics(list("AAAA"), list("AABB"), {"A", "B"})
    assert m.accuracy == 0.5 and m.f1_micro == 0.5
    assert m.f1_macro == 1 / 3


def test_criterion_09_second_order_correlation_on_toy_corpus():
    corpus = corpus_from_pairs("today", [("a", TOY_SENTENCES[0]), ("b", TOY_SENTENCES[1]), ("b", TOY_SENTENCES[2])])
    K_lin = build_kernel_for(corpus, PipelineConfig(kernel="linear")).values
    K_dif = build_kernel_for(corpus, PipelineConfig(kernel="diffusion")).values
    assert K_lin[0, 2] == 0.0
    assert K_dif[0, 2] > 0.0


DATA_DIR = os.environ.get("DKPCA_DATA_DIR")


@pytest.mark.skipif(not DATA_DIR or not (Path(DATA_DIR) / "interest.tsv").is_file(),
                    reason="set DKPCA_DATA_DIR to a directory holding interest.tsv")
def test_criterion_09_interest_benchmark():
    corpus = load_dataset(Path(DATA_DIR) / "interest.tsv")
    plans = [SplitPlan(0.30, repeats=10), SplitPlan(0.05, repeats=10)]
    dif = run_experiment(corpus, PipelineConfig(lam=0.0039, steps=3, k=6, dim=1710), plans)
    lin = run_experiment(corpus, PipelineConfig(kernel="linear", k=6, dim=1710), plans[1])
    acc30 = 100 * dif.rows[0].mean.accuracy
    acc5, lin5 = 100 * dif.rows[1].mean.accuracy, 100 * lin.rows[0].mean.accuracy
    print(f"interest: 30% {acc30:.2f}  5% {acc5:.2f} vs linear {lin5:.2f}")
    assert abs(acc30 - 81.68) <= 3.0
    assert acc5 - lin5 >= 5.0


def test_criterion_10_byte_identical_reports(tmp_path, write_tsv, monkeypatch):
    monkeypatch.setenv("DKPCA_THREADS", "1")
    dataset = write_tsv(synthetic_pairs(60, seed=10))
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        assert main(["run", "--dataset", str(dataset), "--ratios", "0.1,0.3", "--k", "3", "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    grid = ["--grid", "lambda=0,0.0039", "--grid", "k=1,3"]
    for name in ("c.csv", "d.csv"):
        out = tmp_path / name
        assert main(["sweep", "--dataset", str(dataset), "--ratios", "0.3", *grid, "--out", str(out)]) == 0
    assert (tmp_path / "c.csv").read_bytes() == (tmp_path / "d.csv").read_bytes()
