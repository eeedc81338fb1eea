"""Self-test battery: cross-checks paired formulations on random data.

Each check reports its worst deviation against a documented tolerance.
The battery is what the ``okreg verify`` command runs; the test suite
exercises the same checks at larger sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .batch_gp import batch_fit, batch_predict_grid
from .kernels import Dictionary, KernelSpec, gram_matrix
from .klms import BetaKlms, Klms, Knlms, general_alpha_update, matched_eta
from .online_gp import OnlineGP

__all__ = ["CheckResult", "run_all_checks", "format_results"]


@dataclass
class CheckResult:
    name: str
    max_error: float
    tolerance: float
    passed: bool


def _jittered_grid_stream(rng, n: int):
    """1-D inputs on a perturbed grid, shuffled: keeps Gram matrices well
    conditioned even for long streams."""
    base = np.linspace(-1.0, 1.0, n)
    h = base[1] - base[0]
    x = base + rng.uniform(-0.3 * h, 0.3 * h, size=n)
    rng.shuffle(x)
    y = np.sin(3.0 * x) + 0.1 * rng.standard_normal(n)
    return x[:, np.newaxis], y


def _random_stream(rng, n: int, d: int, scale: float = 1.0):
    X = rng.uniform(-scale, scale, size=(n, d))
    y = np.sin(X.sum(axis=1)) + 0.1 * rng.standard_normal(n)
    return X, y


def _check_online_vs_batch(rng):
    worst_mean = 0.0
    worst_var = 0.0
    cases = [
        (KernelSpec(lengthscale=0.02, noise_variance=0.1), *_jittered_grid_stream(rng, 80)),
        (KernelSpec(lengthscale=0.6, noise_variance=0.1), *_random_stream(rng, 80, 4)),
    ]
    for spec, X, y in cases:
        gp = OnlineGP(spec, admission_threshold=1e-12)
        for xi, yi in zip(X, y):
            gp.update(xi, yi)
        grid = rng.uniform(-1.1, 1.1, size=(60, X.shape[1]))
        fit = batch_fit(spec, gp.dictionary, y)
        bm, _, bv = batch_predict_grid(fit, grid)
        om, _, ov = gp.predict_batch(grid)
        worst_mean = max(worst_mean, float(np.max(np.abs(bm - om))))
        worst_var = max(worst_var, float(np.max(np.abs(bv - ov))))
    return worst_mean, worst_var


def _check_weight_bridge_and_inverse(rng):
    spec = KernelSpec(lengthscale=0.5, noise_variance=0.1)
    X, y = _random_stream(rng, 60, 2, scale=2.0)
    gp = OnlineGP(spec, admission_threshold=1e-12)
    worst_w = 0.0
    worst_q = 0.0
    for i, (xi, yi) in enumerate(zip(X, y)):
        gp.update(xi, yi)
        fit = batch_fit(spec, gp.dictionary, y[: i + 1])
        worst_w = max(worst_w, float(np.max(np.abs(gp.krls_weights() - fit.weights))))
        K = gram_matrix(spec, gp.dictionary)
        resid = gp.q_inv @ K - np.eye(gp.size)
        worst_q = max(worst_q, float(np.max(np.abs(resid))))
    return worst_w, worst_q


def _check_identity_a(rng, n_steps: int = 200):
    spec = KernelSpec(lengthscale=0.7, noise_variance=0.1)
    X, y = _random_stream(rng, n_steps, 2)
    klms = Klms(spec, eta=matched_eta(spec))
    beta0 = BetaKlms(spec, beta=0.0)
    worst = 0.0
    for xi, yi in zip(X, y):
        klms.update(xi, yi)
        beta0.update(xi, yi)
        worst = max(worst, float(np.max(np.abs(klms.alpha - beta0.alpha))))
    return worst


def _check_identity_b(rng, n_steps: int = 200, noise_mismatch: float = 1.0):
    spec = KernelSpec(lengthscale=0.7, signal_variance=1.0, noise_variance=0.1)
    X, y = _random_stream(rng, n_steps, 2)
    knlms = Knlms(
        spec, eta=1.0, eps_reg=spec.noise_variance * noise_mismatch, coherence_mu0=1.0
    )
    beta1 = BetaKlms(spec, beta=1.0)
    worst = 0.0
    for xi, yi in zip(X, y):
        knlms.update(xi, yi)
        beta1.update(xi, yi)
        worst = max(worst, float(np.max(np.abs(knlms.alpha - beta1.alpha))))
    return worst


def _check_identity_c(rng, n_steps: int = 30):
    """BetaKlms step vs the exact recursion under covariance K(beta K + I)."""
    spec = KernelSpec(lengthscale=0.5, noise_variance=0.1, jitter=0.0)
    worst = 0.0
    for beta in (0.0, 0.25, 1.0, 2.0):
        X, y = _random_stream(rng, n_steps, 2, scale=3.0)
        model = BetaKlms(spec, beta=beta)
        for xi, yi in zip(X, y):
            if model.size:
                K = gram_matrix(spec, model.dictionary)
                q_inv = np.linalg.inv(K)
                state = OnlineGP.from_components(
                    spec,
                    model.dictionary.copy(),
                    mu=K @ model.alpha,
                    sigma=np.zeros_like(K),
                    q_inv=0.5 * (q_inv + q_inv.T),
                )
                expected = general_alpha_update(
                    state, xi, yi, sigma_override=K @ (beta * K + np.eye(model.size))
                )
            else:
                expected = np.array([yi / (spec.noise_variance + spec.signal_variance)])
            model.update(xi, yi)
            worst = max(worst, float(np.max(np.abs(model.alpha - expected))))
    return worst


def _check_covariance_model_identity(rng):
    """||Q Sigma Q - Q - beta I|| for Sigma = K (beta K + I)."""
    spec = KernelSpec(lengthscale=0.5, noise_variance=0.1, jitter=0.0)
    worst = 0.0
    for n in (5, 20, 40):
        X = rng.uniform(-3.0, 3.0, size=(n, 2))
        d = Dictionary(X)
        K = gram_matrix(spec, d)
        Q = np.linalg.inv(K)
        for beta in (0.0, 0.25, 1.0, 2.0):
            sigma = K @ (beta * K + np.eye(n))
            resid = Q @ sigma @ Q - Q - beta * np.eye(n)
            worst = max(worst, float(np.max(np.abs(resid))))
    return worst


def run_all_checks(seed: int = 0, tol: float | None = None, noise_mismatch: float = 1.0):
    """Run every consistency check; ``tol`` overrides all tolerances.

    ``noise_mismatch`` rescales the regularizer on one side of the
    KNLMS/BetaKlms pairing and exists as a negative control: anything
    other than 1.0 must make that check fail.
    """
    rng = np.random.default_rng(seed)
    mean_err, var_err = _check_online_vs_batch(rng)
    bridge_err, inv_err = _check_weight_bridge_and_inverse(rng)
    raw = [
        ("online vs batch: predictive mean", mean_err, 1e-8),
        ("online vs batch: predictive variance", var_err, 1e-8),
        ("krls weight bridge (q_inv @ mu)", bridge_err, 1e-8),
        ("inverse-gram recursion (QK - I)", inv_err, 1e-7),
        ("identity A: matched-eta klms = beta 0", _check_identity_a(rng), 1e-12),
        (
            "identity B: knlms = beta 1",
            _check_identity_b(rng, noise_mismatch=noise_mismatch),
            1e-12,
        ),
        ("identity C: exact step = beta rule", _check_identity_c(rng), 1e-10),
        ("covariance model: QSQ - Q = beta I", _check_covariance_model_identity(rng), 1e-8),
    ]
    results = []
    for name, err, default_tol in raw:
        tolerance = default_tol if tol is None else tol
        results.append(CheckResult(name, err, tolerance, err < tolerance))
    return results


def format_results(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check'.ljust(width)}  {'max_error':>12}  {'tolerance':>10}  result"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{r.name.ljust(width)}  {r.max_error:12.3e}  {r.tolerance:10.1e}  {status}"
        )
    return "\n".join(lines)
