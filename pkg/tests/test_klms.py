"""KLMS family: per-variant update rules and the pairwise equivalences."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from okreg import (
    BetaKlms,
    Dictionary,
    KernelSpec,
    Klms,
    Knlms,
    OnlineGP,
    Qklms,
    general_alpha_update,
    gram_matrix,
    matched_eta,
)

SPEC = KernelSpec(lengthscale=1.0, signal_variance=1.0, noise_variance=0.1)

coord = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)
target = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
stream = st.lists(st.tuples(coord, coord, target), min_size=1, max_size=20)


def _run(model, triples):
    for a, b, y in triples:
        model.update([a, b], y)
    return model


# -- shared behavior -----------------------------------------------------------


def test_empty_model_predicts_zero():
    assert Klms(SPEC, eta=0.5).predict([1.0]) == 0.0


def test_matched_eta_value():
    assert matched_eta(SPEC) == pytest.approx(0.9090909090909091, abs=1e-15)


def test_predict_batch_matches_pointwise():
    rng = np.random.default_rng(2)
    model = _run(Klms(SPEC, eta=0.3), rng.uniform(-1, 1, size=(10, 3)))
    grid = rng.uniform(-1, 1, size=(6, 2))
    preds = model.predict_batch(grid)
    for i, x in enumerate(grid):
        assert preds[i] == pytest.approx(model.predict(x), abs=1e-14)


# -- Klms ------------------------------------------------------------------------


def test_klms_first_step_appends_scaled_error():
    model = Klms(SPEC, eta=0.5)
    model.update([0.0], 1.0)
    assert model.size == 1
    assert model.alpha.tolist() == [0.5]


def test_klms_duplicate_second_step():
    # second update at the same input sees y_hat = eta, so the appended
    # weight is eta * (1 - eta); frozen for eta = 1/1.1
    eta = matched_eta(SPEC)
    model = Klms(SPEC, eta=eta)
    model.update([0.0], 1.0)
    model.update([0.0], 1.0)
    np.testing.assert_allclose(
        model.alpha,
        [0.9090909090909091, 0.08264462809917356],
        rtol=0,
        atol=1e-15,
    )


def test_klms_eta_validation():
    with pytest.raises(ValueError):
        Klms(SPEC, eta=0.0)


def test_klms_always_grows():
    model = _run(Klms(SPEC, eta=0.1), [(0.0, 0.0, 1.0)] * 5)
    assert model.size == 5


# -- Qklms -----------------------------------------------------------------------


def test_qklms_duplicate_updates_in_place():
    model = Qklms(SPEC, eta=0.5, quant_radius=0.0)
    model.update([1.0], 1.0)
    model.update([1.0], 1.0)
    assert model.size == 1
    assert model.alpha.tolist() == [0.75]


def test_qklms_outside_radius_grows():
    model = Qklms(SPEC, eta=0.5, quant_radius=0.1)
    model.update([0.0], 1.0)
    model.update([0.5], 1.0)
    assert model.size == 2


def test_qklms_tie_resolves_to_lowest_index():
    model = Qklms(SPEC, eta=1.0, quant_radius=2.0)
    model.update([0.0], 0.0)
    model._grow([2.0], 0.0)  # second center with zero weight, no error spent
    model.update([1.0], 1.0)  # equidistant from both centers
    assert model.size == 2
    assert model.alpha[0] != 0.0
    assert model.alpha[1] == 0.0


def test_qklms_parameter_validation():
    with pytest.raises(ValueError):
        Qklms(SPEC, eta=1.0, quant_radius=-0.5)
    with pytest.raises(ValueError):
        Qklms(SPEC, eta=-1.0)


@settings(derandomize=True, max_examples=30)
@given(stream, st.floats(min_value=0.05, max_value=1.0))
def test_qklms_centers_stay_separated(triples, radius):
    model = Qklms(SPEC, eta=0.5, quant_radius=radius)
    _run(model, triples)
    P = model.dictionary.points
    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            assert float(np.linalg.norm(P[i] - P[j])) > radius


# -- Knlms -----------------------------------------------------------------------


def test_knlms_first_step():
    model = Knlms(SPEC)  # eta 1, eps_reg defaults to the noise variance
    model.update([0.0], 1.0)
    assert model.eps_reg == 0.1
    np.testing.assert_allclose(model.alpha, [0.9090909090909091], rtol=0, atol=1e-15)


def test_knlms_duplicate_second_step():
    model = Knlms(SPEC)
    model.update([0.0], 1.0)
    model.update([0.0], 1.0)
    np.testing.assert_allclose(
        model.alpha,
        [0.9523809523809523, 0.04329004329004329],
        rtol=0,
        atol=1e-15,
    )


def test_knlms_coherence_rejection_updates_existing_weights():
    model = Knlms(SPEC, coherence_mu0=0.2)
    model.update([0.0], 1.0)
    alpha_before = model.alpha.copy()
    model.update([0.1], 1.0)  # k is ~1, far above 0.2: rejected
    assert model.size == 1
    assert model.alpha.shape == (1,)
    assert model.alpha[0] != alpha_before[0]


def test_knlms_distant_point_passes_coherence():
    model = Knlms(SPEC, coherence_mu0=0.2)
    model.update([0.0], 1.0)
    model.update([10.0], 1.0)
    assert model.size == 2


def test_knlms_parameter_validation():
    with pytest.raises(ValueError):
        Knlms(SPEC, eta=0.0)
    with pytest.raises(ValueError):
        Knlms(SPEC, eps_reg=-1.0)
    with pytest.raises(ValueError):
        Knlms(SPEC, coherence_mu0=1.5)


@settings(derandomize=True, max_examples=30)
@given(stream, st.floats(min_value=0.1, max_value=0.9))
def test_knlms_coherence_invariant(triples, mu0):
    model = Knlms(SPEC, coherence_mu0=mu0)
    _run(model, triples)
    # every pair of stored centers respects the admission bound
    K = gram_matrix(model.spec, model.dictionary) if model.size else None
    if model.size > 1:
        off = K - np.diag(np.diag(K))
        assert float(off.max()) <= mu0 * SPEC.signal_variance + 1e-12


# -- BetaKlms ----------------------------------------------------------------------


def test_beta_zero_equals_matched_klms_exactly():
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 1, size=(50, 2))
    y = rng.standard_normal(50)
    klms = Klms(SPEC, eta=matched_eta(SPEC))
    beta0 = BetaKlms(SPEC, beta=0.0)
    for xi, yi in zip(X, y):
        klms.update(xi, yi)
        beta0.update(xi, yi)
        # one path multiplies by the reciprocal step size, the other divides
        # by the denominator, so agreement is to rounding, not bitwise
        np.testing.assert_allclose(klms.alpha, beta0.alpha, rtol=0, atol=1e-13)


def test_beta_one_equals_all_admit_knlms_exactly():
    rng = np.random.default_rng(1)
    X = rng.uniform(-1, 1, size=(50, 2))
    y = rng.standard_normal(50)
    knlms = Knlms(SPEC, eta=1.0, eps_reg=SPEC.noise_variance, coherence_mu0=1.0)
    beta1 = BetaKlms(SPEC, beta=1.0)
    for xi, yi in zip(X, y):
        knlms.update(xi, yi)
        beta1.update(xi, yi)
        np.testing.assert_array_equal(knlms.alpha, beta1.alpha)


@settings(derandomize=True, max_examples=25)
@given(stream, st.floats(min_value=0.5, max_value=4.0))
def test_beta_zero_klms_identity_any_signal_variance(triples, sv):
    # the pairing scales both corrections by the same constant, so it
    # holds for every kernel amplitude, not just the unit one
    spec = KernelSpec(lengthscale=1.0, signal_variance=sv, noise_variance=0.1)
    klms = _run(Klms(spec, eta=matched_eta(spec)), triples)
    beta0 = _run(BetaKlms(spec, beta=0.0), triples)
    np.testing.assert_allclose(klms.alpha, beta0.alpha, rtol=0, atol=1e-13)


def test_beta_duplicate_second_step():
    model = BetaKlms(SPEC, beta=1.0)
    model.update([0.0], 1.0)
    model.update([0.0], 1.0)
    np.testing.assert_allclose(
        model.alpha,
        [0.9523809523809523, 0.04329004329004329],
        rtol=0,
        atol=1e-15,
    )


def test_beta_variance_is_prior_at_beta_zero():
    model = _run(BetaKlms(SPEC, beta=0.0), [(0.0, 0.0, 1.0), (0.5, 0.5, 2.0)])
    sf2, sy2 = model.variance([0.0, 0.0])
    assert sf2 == 1.0
    assert sy2 == 1.1


def test_beta_variance_grows_with_kernel_mass():
    model = BetaKlms(SPEC, beta=1.0)
    model.update([0.0], 1.0)
    sf2, sy2 = model.variance([0.0])
    # one center at the query itself: k(x,x)^2 = 1 on top of the prior
    assert sf2 == 2.0
    assert sy2 == pytest.approx(2.1, abs=1e-15)
    far, _ = model.variance([50.0])
    assert far == pytest.approx(1.0, abs=1e-12)


def test_beta_variance_batch_matches_pointwise():
    rng = np.random.default_rng(3)
    model = _run(BetaKlms(SPEC, beta=0.7), rng.uniform(-1, 1, size=(8, 3)))
    grid = rng.uniform(-1, 1, size=(5, 2))
    sf2, sy2 = model.variance_batch(grid)
    for i, x in enumerate(grid):
        f, yv = model.variance(x)
        assert sf2[i] == pytest.approx(f, abs=1e-14)
        assert sy2[i] == pytest.approx(yv, abs=1e-14)


def test_beta_coherence_gate_rejected_branch():
    model = BetaKlms(SPEC, beta=1.0, coherence_mu0=0.2)
    model.update([0.0], 1.0)
    alpha_before = model.alpha.copy()
    model.update([0.05], 1.0)
    assert model.size == 1
    assert model.alpha[0] != alpha_before[0]


def test_beta_parameter_validation():
    with pytest.raises(ValueError):
        BetaKlms(SPEC, beta=-0.1)
    with pytest.raises(ValueError):
        BetaKlms(SPEC, beta=1.0, coherence_mu0=2.0)


# -- exact one-step recursion ---------------------------------------------------


def _oracle_state(spec, model):
    K = gram_matrix(spec, model.dictionary)
    q_inv = np.linalg.inv(K)
    return OnlineGP.from_components(
        spec,
        model.dictionary.copy(),
        mu=K @ model.alpha,
        sigma=np.zeros_like(K),
        q_inv=0.5 * (q_inv + q_inv.T),
    ), K


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 2.0])
def test_beta_rule_matches_general_update(beta):
    spec = KernelSpec(lengthscale=0.8, noise_variance=0.1, jitter=0.0)
    rng = np.random.default_rng(int(beta * 10))
    X = rng.uniform(-3, 3, size=(20, 2))
    y = rng.standard_normal(20)
    model = BetaKlms(spec, beta=beta)
    for xi, yi in zip(X, y):
        if model.size:
            state, K = _oracle_state(spec, model)
            expected = general_alpha_update(
                state, xi, yi, sigma_override=K @ (beta * K + np.eye(model.size))
            )
        else:
            expected = np.array([yi / 1.1])
        model.update(xi, yi)
        np.testing.assert_allclose(model.alpha, expected, rtol=0, atol=1e-10)


def test_general_update_rejects_bad_covariance_shape():
    spec = KernelSpec(lengthscale=1.0, jitter=0.0)
    model = BetaKlms(spec, beta=1.0)
    model.update([0.0], 1.0)
    state, _ = _oracle_state(spec, model)
    with pytest.raises(ValueError, match="covariance shape"):
        general_alpha_update(state, [1.0], 1.0, sigma_override=np.eye(3))
