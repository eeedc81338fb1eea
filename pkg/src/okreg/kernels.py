"""Gaussian-kernel primitives shared by every model in the package.

The kernel is the classic squared-exponential form

    k(x, x') = signal_variance * exp(-||x - x'||^2 / (2 * lengthscale^2))

so k(x, x) equals ``signal_variance`` for every x.  ``noise_variance``
is the observation-noise variance of the regression model; it rides
along in :class:`KernelSpec` because every estimator needs the pair
together.  ``jitter`` is added to Gram-matrix diagonals (and only
there) so that inverses stay computable when inputs nearly repeat.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "KernelFamily",
    "KernelSpec",
    "Dictionary",
    "eval_kernel",
    "kernel_vector",
    "gram_matrix",
    "cross_kernel",
]

_DEFAULT_JITTER_FACTOR = 1e-10


class KernelFamily(Enum):
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel hyperparameters plus the observation-noise variance.

    ``jitter=None`` selects the default ``1e-10 * signal_variance``.
    Pass an explicit 0.0 to disable diagonal regularization entirely.
    """

    lengthscale: float
    signal_variance: float = 1.0
    noise_variance: float = 0.1
    jitter: float | None = None
    family: KernelFamily = KernelFamily.GAUSSIAN

    def __post_init__(self) -> None:
        if self.family is not KernelFamily.GAUSSIAN:
            raise ValueError(f"unsupported kernel family: {self.family!r}")
        if not self.lengthscale > 0:
            raise ValueError("lengthscale must be positive")
        if not self.signal_variance > 0:
            raise ValueError("signal_variance must be positive")
        if not self.noise_variance >= 0:
            raise ValueError("noise_variance must be non-negative")
        if self.jitter is None:
            object.__setattr__(
                self, "jitter", _DEFAULT_JITTER_FACTOR * self.signal_variance
            )
        elif not self.jitter >= 0:
            raise ValueError("jitter must be non-negative")


class Dictionary:
    """Ordered collection of kernel centers.

    Points keep insertion order and each gets a stable integer id, so
    evicting old centers never renumbers the survivors.
    """

    def __init__(self, points=None):
        self._points: np.ndarray | None = None
        self._ids: list[int] = []
        self._next_id = 0
        if points is not None:
            arr = np.asarray(points, dtype=float)
            if arr.size:
                for row in np.atleast_2d(arr):
                    self.append(row)

    @classmethod
    def restore(cls, points, ids, next_id) -> "Dictionary":
        """Rebuild a dictionary with explicit ids (snapshot loading)."""
        d = cls(points)
        ids = [int(i) for i in ids]
        if len(ids) != len(d._ids):
            raise ValueError("id list does not match the number of points")
        d._ids = ids
        d._next_id = int(next_id)
        return d

    def __len__(self) -> int:
        return len(self._ids)

    @property
    def dim(self) -> int | None:
        """Point dimension, or None while the dictionary has never held a point."""
        return None if self._points is None else int(self._points.shape[1])

    @property
    def points(self) -> np.ndarray:
        if self._points is None:
            return np.zeros((0, 0))
        return self._points

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(self._ids)

    @property
    def next_id(self) -> int:
        return self._next_id

    def point(self, index: int) -> np.ndarray:
        return self.points[index]

    def append(self, x) -> int:
        p = np.atleast_1d(np.asarray(x, dtype=float))
        if p.ndim != 1:
            raise ValueError("a dictionary point must be a 1-D vector")
        if p.size == 0:
            raise ValueError("a dictionary point needs dimension >= 1")
        if self._points is None:
            self._points = p[np.newaxis, :].copy()
        else:
            if p.size != self._points.shape[1]:
                raise ValueError(
                    f"dimension mismatch: dictionary holds "
                    f"{self._points.shape[1]}-dimensional points, got {p.size}"
                )
            self._points = np.vstack([self._points, p])
        new_id = self._next_id
        self._next_id += 1
        self._ids.append(new_id)
        return new_id

    def drop(self, index: int) -> None:
        n = len(self._ids)
        if not -n <= index < n:
            raise IndexError(f"index {index} out of range for {n} points")
        if index < 0:
            index += n
        self._points = np.delete(self._points, index, axis=0)
        del self._ids[index]

    def copy(self) -> "Dictionary":
        d = Dictionary()
        if self._points is not None:
            d._points = self._points.copy()
        d._ids = list(self._ids)
        d._next_id = self._next_id
        return d


def _vector(x) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ValueError("input points must be 1-D vectors")
    return v


def eval_kernel(spec: KernelSpec, x, x2) -> float:
    """k(x, x2): symmetric, positive, equal to signal_variance at x == x2."""
    a = _vector(x)
    b = _vector(x2)
    if a.size != b.size:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    d2 = float(np.sum((a - b) ** 2))
    return float(spec.signal_variance * np.exp(-d2 / (2.0 * spec.lengthscale**2)))


def kernel_vector(spec: KernelSpec, dictionary: Dictionary, x) -> np.ndarray:
    """k(c_i, x) for every dictionary center c_i, in insertion order."""
    v = _vector(x)
    if len(dictionary) == 0:
        return np.zeros(0)
    if dictionary.dim != v.size:
        raise ValueError(
            f"dimension mismatch: dictionary is {dictionary.dim}-dimensional, "
            f"query has dimension {v.size}"
        )
    d2 = np.sum((dictionary.points - v) ** 2, axis=1)
    return spec.signal_variance * np.exp(-d2 / (2.0 * spec.lengthscale**2))


def gram_matrix(spec: KernelSpec, dictionary: Dictionary) -> np.ndarray:
    """Pairwise kernel matrix of the dictionary with jitter on the diagonal."""
    if len(dictionary) == 0:
        raise ValueError("gram matrix of an empty dictionary is undefined")
    P = dictionary.points
    d2 = cdist(P, P, "sqeuclidean")
    K = spec.signal_variance * np.exp(-d2 / (2.0 * spec.lengthscale**2))
    if spec.jitter:
        K[np.diag_indices_from(K)] += spec.jitter
    return K


def cross_kernel(spec: KernelSpec, dictionary: Dictionary, X) -> np.ndarray:
    """Kernel matrix between dictionary centers (rows) and query points (columns)."""
    Q = np.atleast_2d(np.asarray(X, dtype=float))
    if len(dictionary) == 0:
        return np.zeros((0, Q.shape[0]))
    if dictionary.dim != Q.shape[1]:
        raise ValueError(
            f"dimension mismatch: dictionary is {dictionary.dim}-dimensional, "
            f"queries have dimension {Q.shape[1]}"
        )
    d2 = cdist(dictionary.points, Q, "sqeuclidean")
    return spec.signal_variance * np.exp(-d2 / (2.0 * spec.lengthscale**2))
