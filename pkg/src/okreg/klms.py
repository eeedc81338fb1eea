"""The KLMS family of online kernel filters under one interface.

Every model keeps a dictionary of centers and a weight vector ``alpha``;
prediction is always ``alpha . k(centers, x)``.  The variants differ in
how they spend each step's prediction error e = y - y_hat:

* ``Klms``     appends one new weight eta * e (growing LMS in kernel space).
* ``Qklms``    folds eta * e into the nearest stored center when one lies
               within ``quant_radius``, growing otherwise.
* ``Knlms``    spreads a normalized correction over all weights; a
               coherence test decides whether the dictionary grows.
* ``BetaKlms`` interpolates between those behaviors with a single
               parameter beta >= 0 and carries an explicit variance
               model: latent variance k(x,x) + beta * ||k||^2.

``general_alpha_update`` is the exact one-step weight recursion driven
by a full posterior state; it is the reference the closed-form BetaKlms
rule is checked against.
"""

from __future__ import annotations

import numpy as np

from .kernels import Dictionary, KernelSpec, cross_kernel, eval_kernel, kernel_vector

__all__ = [
    "KlmsModel",
    "Klms",
    "Qklms",
    "Knlms",
    "BetaKlms",
    "matched_eta",
    "general_alpha_update",
]


def matched_eta(spec: KernelSpec) -> float:
    """Learning rate that makes Klms coincide with BetaKlms(beta=0):
    1 / (noise_variance + k(x, x))."""
    return 1.0 / (spec.noise_variance + spec.signal_variance)


class KlmsModel:
    """Common state and the shared prediction rule."""

    variant: str = "base"

    def __init__(self, spec: KernelSpec):
        self.spec = spec
        self.dictionary = Dictionary()
        self.alpha = np.zeros(0)

    @property
    def size(self) -> int:
        return len(self.dictionary)

    def predict(self, x) -> float:
        return float(kernel_vector(self.spec, self.dictionary, x) @ self.alpha)

    def predict_batch(self, X) -> np.ndarray:
        return cross_kernel(self.spec, self.dictionary, X).T @ self.alpha

    def update(self, x, y) -> None:
        raise NotImplementedError

    def _grow(self, x, weight: float) -> None:
        self.dictionary.append(x)
        self.alpha = np.append(self.alpha, weight)


class Klms(KlmsModel):
    """Growing LMS in kernel space: the whole correction lands on a new weight."""

    variant = "klms"

    def __init__(self, spec: KernelSpec, eta: float):
        super().__init__(spec)
        if not eta > 0:
            raise ValueError("eta must be positive")
        self.eta = float(eta)

    def update(self, x, y) -> None:
        e = float(y) - self.predict(x)
        self._grow(x, self.eta * e)


class Qklms(KlmsModel):
    """Klms with input quantization: near-duplicates update in place.

    ``quant_radius == 0`` degenerates to Klms except that exact
    duplicates of a stored center reuse its weight.  Ties on the nearest
    center resolve to the lowest index.
    """

    variant = "qklms"

    def __init__(self, spec: KernelSpec, eta: float, quant_radius: float = 0.0):
        super().__init__(spec)
        if not eta > 0:
            raise ValueError("eta must be positive")
        if not quant_radius >= 0:
            raise ValueError("quant_radius must be non-negative")
        self.eta = float(eta)
        self.quant_radius = float(quant_radius)

    def update(self, x, y) -> None:
        e = float(y) - self.predict(x)
        if self.size:
            v = np.atleast_1d(np.asarray(x, dtype=float))
            dist = np.linalg.norm(self.dictionary.points - v, axis=1)
            nearest = int(np.argmin(dist))
            if dist[nearest] <= self.quant_radius:
                self.alpha[nearest] += self.eta * e
                return
        self._grow(x, self.eta * e)


class Knlms(KlmsModel):
    """Normalized KLMS with coherence-gated growth.

    ``coherence_mu0`` is a fraction of ``signal_variance``: a point is
    admitted when its largest kernel value against the dictionary stays
    at or below ``coherence_mu0 * signal_variance``.  The default 1.0
    admits everything.  ``eps_reg=None`` defaults to
    ``KernelSpec.noise_variance``.
    """

    variant = "knlms"

    def __init__(
        self,
        spec: KernelSpec,
        eta: float = 1.0,
        eps_reg: float | None = None,
        coherence_mu0: float = 1.0,
    ):
        super().__init__(spec)
        if not eta > 0:
            raise ValueError("eta must be positive")
        if eps_reg is None:
            eps_reg = spec.noise_variance
        if not eps_reg >= 0:
            raise ValueError("eps_reg must be non-negative")
        if not 0.0 <= coherence_mu0 <= 1.0:
            raise ValueError("coherence_mu0 must lie in [0, 1]")
        self.eta = float(eta)
        self.eps_reg = float(eps_reg)
        self.coherence_mu0 = float(coherence_mu0)

    def update(self, x, y) -> None:
        k = kernel_vector(self.spec, self.dictionary, x)
        e = float(y) - float(k @ self.alpha)
        kss = self.spec.signal_variance
        admit = self.size == 0 or float(np.max(k)) <= self.coherence_mu0 * kss
        if admit:
            denom = self.eps_reg + kss * kss + float(k @ k)
            self.alpha = np.append(self.alpha, 0.0) + (self.eta * e / denom) * np.append(k, kss)
            self.dictionary.append(x)
        else:
            denom = self.eps_reg + float(k @ k)
            self.alpha = self.alpha + (self.eta * e / denom) * k


class BetaKlms(KlmsModel):
    """One-parameter filter between Klms (beta=0) and normalized spreading.

    The step scales the correction by 1 / (noise_variance + k(x,x) +
    beta * ||k||^2), appends the scaled error as a new weight, and
    spreads beta times the kernel vector over the existing weights.
    ``coherence_mu0=None`` grows on every step; a value in [0, 1] gates
    growth like Knlms, in which case a rejected point still receives the
    spreading part of the update.
    """

    variant = "beta"

    def __init__(
        self,
        spec: KernelSpec,
        beta: float,
        coherence_mu0: float | None = None,
    ):
        super().__init__(spec)
        if not beta >= 0:
            raise ValueError("beta must be non-negative")
        if coherence_mu0 is not None and not 0.0 <= coherence_mu0 <= 1.0:
            raise ValueError("coherence_mu0 must lie in [0, 1] or be None")
        self.beta = float(beta)
        self.coherence_mu0 = None if coherence_mu0 is None else float(coherence_mu0)

    def update(self, x, y) -> None:
        k = kernel_vector(self.spec, self.dictionary, x)
        e = float(y) - float(k @ self.alpha)
        kss = self.spec.signal_variance
        denom = self.spec.noise_variance + kss + self.beta * float(k @ k)
        coef = e / denom
        admit = (
            self.coherence_mu0 is None
            or self.size == 0
            or float(np.max(k)) <= self.coherence_mu0 * kss
        )
        if admit:
            self.alpha = np.append(self.alpha, 0.0) + coef * np.append(self.beta * k, 1.0)
            self.dictionary.append(x)
        else:
            self.alpha = self.alpha + coef * (self.beta * k)

    def variance(self, x) -> tuple[float, float]:
        """Modeled (latent, output) variance at x.

        Grows with the squared kernel mass the dictionary puts near x;
        beta=0 reduces to the constant prior variance.
        """
        k = kernel_vector(self.spec, self.dictionary, x)
        sf2 = self.spec.signal_variance + self.beta * float(k @ k)
        return sf2, self.spec.noise_variance + sf2

    def variance_batch(self, X) -> tuple[np.ndarray, np.ndarray]:
        Kx = cross_kernel(self.spec, self.dictionary, X)
        sf2 = self.spec.signal_variance + self.beta * np.einsum("ij,ij->j", Kx, Kx)
        return sf2, self.spec.noise_variance + sf2


def general_alpha_update(state, x, y, sigma_override=None) -> np.ndarray:
    """One exact weight-vector step computed from full posterior state.

    ``state`` is an OnlineGP (or anything exposing spec, dictionary, mu,
    sigma, q_inv).  The implied weights are q_inv @ mu; the step rescales
    the innovation by the modeled output variance, spreads
    (q_inv @ sigma @ q_inv - q_inv) k over the existing weights, and
    appends the scaled innovation.  ``sigma_override`` substitutes the
    posterior covariance, which is how parametric covariance models
    (for example K (beta K + I) for BetaKlms) are exercised against it.
    """
    n = len(state.dictionary)
    sigma = state.sigma if sigma_override is None else np.asarray(sigma_override, dtype=float)
    if sigma.shape != (n, n):
        raise ValueError(f"covariance shape {sigma.shape} does not match size {n}")
    k = kernel_vector(state.spec, state.dictionary, x)
    kss = eval_kernel(state.spec, x, x)
    alpha = state.q_inv @ state.mu
    e = float(y) - float(k @ alpha)
    qk = state.q_inv @ k
    spread = state.q_inv @ (sigma @ qk) - qk
    sf2 = kss + float(k @ spread)
    sy2 = state.spec.noise_variance + sf2
    return np.append(alpha + (e / sy2) * spread, e / sy2)
