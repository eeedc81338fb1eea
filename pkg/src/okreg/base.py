"""Result types and exceptions shared across the package."""

from __future__ import annotations

from typing import NamedTuple


class PredictiveDistribution(NamedTuple):
    """Gaussian prediction at one input.

    ``sigma_f2`` is the variance of the latent function value,
    ``sigma_y2`` adds the observation-noise variance on top.
    """

    mean: float
    sigma_f2: float
    sigma_y2: float


class NumericalError(RuntimeError):
    """A factorization failed or a variance went negative beyond tolerance."""


class CsvFormatError(ValueError):
    """An input CSV row could not be parsed."""


class ConfigError(ValueError):
    """A command-line flag or config-file entry is invalid."""
