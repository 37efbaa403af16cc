import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from gzslkit import BilinearRanking, Dataset, LinearSV, LinearVS, ModelSpec, SgdConfig
from gzslkit.exceptions import SingularSystem
from gzslkit.models import (
    _sgd_bilinear,
    ale_weight,
    build_target_matrix,
    fit_bilinear_ranking,
    fit_linear_sv,
    fit_linear_vs,
    hinge_rank_loss,
    hinge_rank_loss_and_grad,
    score_bilinear,
    score_linear_sv,
    score_linear_vs,
)

from .oracles import gd_ridge, grad_sv, grad_vs, lipschitz


def xt(seed, n=30, dim=8, k=4):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, dim)), rng.standard_normal((n, k))


def test_target_matrix():
    P = np.array([[1.0, 2.0], [3.0, 4.0]])
    d = Dataset(np.zeros((3, 1)), [0, 0, 1], P)
    np.testing.assert_array_equal(build_target_matrix(d, [0, 1, 2]), P[[0, 0, 1]])
    assert build_target_matrix(d, []).shape == (0, 2)


def test_target_matrix_random():
    rng = np.random.default_rng(0)
    d = Dataset(rng.standard_normal((20, 2)), rng.integers(5, size=20), rng.standard_normal((5, 3)))
    idx = rng.permutation(20)[:12]
    T = build_target_matrix(d, idx)
    for n, i in enumerate(idx):
        assert np.array_equal(T[n], d.prototypes[d.labels[i]])


def test_vs_matches_gradient_descent():
    X, T = xt(0)
    W = fit_linear_vs(X, T, 0.1)
    ref = gd_ridge(grad_vs(X, T, 0.1), np.zeros_like(W), lipschitz(X, 0.1, 30))
    assert np.linalg.norm(W - ref) <= 1e-8 * np.linalg.norm(ref)


def test_sv_matches_gradient_descent():
    X, T = xt(1)
    W = fit_linear_sv(X, T, 0.1)
    ref = gd_ridge(grad_sv(X, T, 0.1), np.zeros_like(W), lipschitz(T, 0.1, 30))
    assert np.linalg.norm(W - ref) <= 1e-8 * np.linalg.norm(ref)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), lam=st.sampled_from([0.0, 1e-3, 0.1, 10.0]))
def test_first_order_optimality(seed, lam):
    X, T = xt(seed)
    for fit, grad in ((fit_linear_vs, grad_vs), (fit_linear_sv, grad_sv)):
        W = fit(X, T, lam)
        assert np.linalg.norm(grad(X, T, lam)(W)) <= 1e-8 * (1 + np.linalg.norm(W))


def test_vs_identity_design():
    T = np.random.default_rng(2).standard_normal((5, 3))
    np.testing.assert_allclose(fit_linear_vs(np.eye(5), T, 0.0), T.T, atol=1e-12)


def test_sv_orthonormal_targets():
    n = 12
    Q, _ = np.linalg.qr(np.random.default_rng(3).standard_normal((n, 4)))
    T = Q * np.sqrt(n)
    X = np.random.default_rng(4).standard_normal((n, 6))
    np.testing.assert_allclose(fit_linear_sv(X, T, 0.0), T.T @ X / n, atol=1e-12)


@pytest.mark.parametrize("fit", [fit_linear_vs, fit_linear_sv])
def test_shrinkage_limit(fit):
    X, T = xt(5)
    lam = 1e12
    W = fit(X, T, lam)
    bound = np.linalg.norm(T.T @ X) / (lam * 30)
    assert np.linalg.norm(W) <= bound * (1 + 1e-9)
    assert np.linalg.norm(W) < 1e-10


def test_singular_system():
    X = np.ones((10, 3))
    with pytest.raises(SingularSystem):
        fit_linear_vs(X, np.ones((10, 2)), 0.0)
    with pytest.raises(SingularSystem):
        fit_linear_sv(np.ones((10, 2)), np.ones((10, 2)), 0.0)


def test_vs_score_examples():
    W = np.eye(2)
    S = np.array([[1.0, 2.0], [0.0, 0.0], [2.0, 1.0]])
    sc = score_linear_vs(W, np.array([[1.0, 2.0]]), S)
    assert sc[0, 0] == 0.0 and sc[0].argmax() == 0
    sc = score_linear_vs(W, np.array([[1.5, 1.5]]), S)
    assert sc[0, 0] == sc[0, 2]


def test_vs_score_expansion():
    rng = np.random.default_rng(6)
    W, X, S = rng.standard_normal((3, 4)), rng.standard_normal((3, 4)), rng.standard_normal((2, 3))
    ref = np.array([[-(p @ p - 2 * s @ p + s @ s) for s in S] for p in X @ W.T])
    np.testing.assert_allclose(score_linear_vs(W, X, S), ref, atol=1e-12)


def test_sv_scores():
    rng = np.random.default_rng(7)
    W, S = rng.standard_normal((3, 5)), rng.standard_normal((4, 3))
    X = rng.standard_normal((6, 5))
    X[0] = S[2] @ W
    sc = score_linear_sv(W, X, S)
    assert sc[0].argmax() == 2 and abs(sc[0, 2]) < 1e-12
    ref = np.array([[-sum((x[j] - (s @ W)[j]) ** 2 for j in range(5)) for s in S] for x in X])
    np.testing.assert_allclose(sc, ref, atol=1e-10)
    same = score_linear_sv(np.zeros((3, 5)), X, S)
    assert np.all(same == same[:, :1])


def test_bilinear_scores():
    rng = np.random.default_rng(8)
    W, X, S = rng.standard_normal((3, 4)), rng.standard_normal((5, 4)), rng.standard_normal((6, 3))
    assert not score_bilinear(np.zeros((3, 4)), X, S).any()
    np.testing.assert_allclose(score_bilinear(W, X, np.eye(3)), X @ W.T)
    ref = np.zeros((5, 6))
    for m in range(5):
        for c in range(6):
            ref[m, c] = sum(S[c, i] * W[i, j] * X[m, j] for i in range(3) for j in range(4))
    np.testing.assert_allclose(score_bilinear(W, X, S), ref, atol=1e-12)


@pytest.mark.parametrize("score", [score_linear_vs, score_bilinear])
def test_candidate_permutation(score):
    rng = np.random.default_rng(9)
    W, X, S = rng.standard_normal((3, 4)), rng.standard_normal((5, 4)), rng.standard_normal((6, 3))
    perm = rng.permutation(6)
    np.testing.assert_allclose(score(W, X, S[perm]), score(W, X, S)[:, perm])
    W = rng.standard_normal((3, 4))
    np.testing.assert_allclose(score_linear_sv(W, X, S[perm]), score_linear_sv(W, X, S)[:, perm])


def test_ale_weight():
    assert ale_weight(0) == 0.0 and ale_weight(1) == 1.0
    assert ale_weight(2) == pytest.approx(0.75)


def _two_violation_case():
    # x = e1, W = I: score of class c is S[c, 0]
    W = np.eye(2)
    x = np.array([1.0, 0.0])
    S = np.array([[1.0, 0.0], [1.4, 0.0], [1.2, 0.0], [0.0, 0.0]])
    return W, x, S


def test_hinge_examples():
    W, x, S = _two_violation_case()
    assert all(hinge_rank_loss(np.zeros((2, 2)), x, 0, S, 0.0, v) == 0.0 for v in ("ale", "devise", "sje"))
    expected = {"devise": 0.8, "sje": 0.5, "ale": 0.6}
    for v, want in expected.items():
        assert hinge_rank_loss(W, x, 0, S, 0.1, v) == pytest.approx(want, abs=1e-12)
    one = S[[0, 1, 3]]
    for v in expected:
        assert hinge_rank_loss(W, x, 0, one, 0.1, v) == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), variant=st.sampled_from(["ale", "devise", "sje"]))
def test_hinge_gradient_finite_differences(seed, variant):
    rng = np.random.default_rng(seed)
    W, x, S = rng.standard_normal((3, 4)), rng.standard_normal(4), rng.standard_normal((5, 3))
    y, margin = int(rng.integers(5)), 1.0
    loss, grad = hinge_rank_loss_and_grad(W, x, y, S, margin, variant)
    fd = np.zeros_like(W)
    h = 1e-5
    for i in range(3):
        for j in range(4):
            E = np.zeros_like(W)
            E[i, j] = h
            fd[i, j] = (hinge_rank_loss(W + E, x, y, S, margin, variant) - hinge_rank_loss(W - E, x, y, S, margin, variant)) / (2 * h)
    assert np.linalg.norm(grad - fd) <= 1e-4 * max(np.linalg.norm(fd), 1e-12) or np.linalg.norm(fd) == 0


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), margin=st.floats(0.0, 3.0))
def test_hinge_loss_properties(seed, margin):
    rng = np.random.default_rng(seed)
    W, x, S = rng.standard_normal((3, 4)), rng.standard_normal(4), rng.standard_normal((5, 3))
    y = int(rng.integers(5))
    losses = {v: hinge_rank_loss(W, x, y, S, margin, v) for v in ("ale", "devise", "sje")}
    assert min(losses.values()) >= 0
    assert losses["sje"] <= losses["devise"] + 1e-12
    f = S @ W @ x
    violated = any(margin + f[c] - f[y] > 0 for c in range(5) if c != y)
    assert (losses["devise"] > 0) == violated


def test_sgd_zero_epochs_keeps_init():
    rng = np.random.default_rng(0)
    X, S = rng.standard_normal((10, 4)), rng.standard_normal((3, 2))
    y = rng.integers(3, size=10)
    cfg = SgdConfig(epochs=0, seed=5)
    W, _ = _sgd_bilinear(X, y, S, 0.0, "ale", cfg)
    init = np.random.default_rng(5).uniform(-cfg.init_scale, cfg.init_scale, size=(2, 4))
    np.testing.assert_array_equal(W, init)


def test_sgd_large_lambda_shrinks():
    rng = np.random.default_rng(1)
    X, S = rng.standard_normal((20, 4)), rng.standard_normal((3, 2))
    y = rng.integers(3, size=20)
    cfg = SgdConfig(epochs=3, seed=2, init_scale=1.0)
    init = np.random.default_rng(2).uniform(-1.0, 1.0, size=(2, 4))
    W, _ = _sgd_bilinear(X, y, S, 1e6, "devise", cfg)
    assert np.linalg.norm(W) < np.linalg.norm(init)


def test_estimators_sklearn_api(toy):
    for est in (LinearVS(alpha=0.3), LinearSV(alpha=0.3), BilinearRanking(variant="sje", alpha=0.01, epochs=2)):
        params = est.get_params()
        twin = clone(est)
        assert twin.get_params() == params and twin is not est
        assert est.fit(toy.features, toy.labels, toy.prototypes) is est
        assert est.coef_.shape == (toy.prototypes.shape[1], toy.features.shape[1])
        pred = est.predict(toy.features, toy.prototypes)
        assert pred.shape == toy.labels.shape
        assert np.mean(pred == toy.labels) > 1.0 / toy.class_count


def test_bilinear_is_seeded(toy):
    a = BilinearRanking(epochs=2, random_state=3).fit(toy.features, toy.labels, toy.prototypes).coef_
    b = BilinearRanking(epochs=2, random_state=3).fit(toy.features, toy.labels, toy.prototypes).coef_
    c = BilinearRanking(epochs=2, random_state=4).fit(toy.features, toy.labels, toy.prototypes).coef_
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_fit_bilinear_ranking(toy):
    spec = ModelSpec(family="bilinear", lam=0.0, variant="ale", sgd=SgdConfig(epochs=1))
    out = fit_bilinear_ranking(toy, np.arange(50), spec)
    assert out.target_matrix_rows == 50 and out.weights.shape == (4, 6)


def test_model_spec_validation():
    with pytest.raises(ValueError):
        ModelSpec(family="bilinear")
    with pytest.raises(ValueError):
        ModelSpec(family="linear_vs", variant="ale")
    assert not ModelSpec().seeded and ModelSpec("bilinear", variant="sje").seeded
