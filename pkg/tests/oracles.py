"""Independent reference computations used as test oracles."""

import numpy as np


def gd_ridge(grad, W0, lipschitz, tol=1e-14, max_iter=200_000):
    """Plain gradient descent with step 1/L until the gradient vanishes."""
    W = W0.copy()
    for _ in range(max_iter):
        g = grad(W)
        if np.linalg.norm(g) <= tol * (1 + np.linalg.norm(W)):
            break
        W = W - g / lipschitz
    return W


def grad_vs(X, T, lam):
    n = X.shape[0]
    return lambda W: 2.0 / n * (X @ W.T - T).T @ X + 2.0 * lam * W


def grad_sv(X, T, lam):
    n = X.shape[0]
    return lambda W: -2.0 / n * T.T @ (X - T @ W) + 2.0 * lam * W


def lipschitz(A, lam, n):
    return 2.0 / n * np.linalg.eigvalsh(A.T @ A).max() + 2.0 * lam


def dense_accuracies(scores, seen_mask, classes, truth, gammas):
    """Per-sample (A_U->C, A_S->C) at every gamma via explicit calibration."""
    out_u, out_s = [], []
    seen_ids = set(classes[seen_mask].tolist())
    is_seen = np.array([t in seen_ids for t in truth])
    for g in gammas:
        cal = scores - g * seen_mask
        pred = np.empty(len(truth), dtype=np.int64)
        for m, row in enumerate(cal):
            best = row.max()
            pred[m] = min(c for c, v in zip(classes, row) if v == best)
        hit = pred == truth
        out_u.append(100.0 * hit[~is_seen].mean())
        out_s.append(100.0 * hit[is_seen].mean())
    return np.array(out_u), np.array(out_s)


def dense_accuracies_fast(scores, seen_mask, classes, truth, gammas):
    """Vectorised version of :func:`dense_accuracies` for large grids."""
    gammas = np.asarray(gammas)
    cal = scores[None, :, :] - gammas[:, None, None] * seen_mask[None, None, :]
    pred = classes[np.argmax(cal, axis=2)]
    hit = pred == truth[None, :]
    is_seen = np.isin(truth, classes[seen_mask])
    return 100.0 * hit[:, ~is_seen].mean(1), 100.0 * hit[:, is_seen].mean(1)


def trapezoid_area(u, s):
    order = np.lexsort((-s, u))
    u, s = u[order] / 100.0, s[order] / 100.0
    return float(np.sum((u[1:] - u[:-1]) * (s[1:] + s[:-1]) / 2.0))


def hm(a, b):
    return 0.0 if a + b == 0 else 2 * a * b / (a + b)


def random_score_instance(rng, n=50, n_seen=3, n_unseen=3):
    c = n_seen + n_unseen
    scores = rng.standard_normal((n, c))
    classes = np.arange(c)
    seen_mask = classes < n_seen
    truth = rng.integers(c, size=n)
    truth[0], truth[1] = 0, n_seen
    return scores, classes, seen_mask, truth


def dense_per_class(scores, seen_mask, classes, truth, gammas):
    """Per-class (A_U->C, A_S->C) at every gamma via explicit calibration."""
    gammas = np.asarray(gammas)
    cal = scores[None, :, :] - gammas[:, None, None] * seen_mask[None, None, :]
    hit = classes[np.argmax(cal, axis=2)] == truth[None, :]
    seen_ids = classes[seen_mask]

    def mean_over(ids):
        present = [c for c in ids if (truth == c).any()]
        return 100.0 * np.mean([hit[:, truth == c].mean(1) for c in present], axis=0)

    return mean_over(classes[~seen_mask]), mean_over(seen_ids)
