"""Statistics of an entanglement spectrum.

Indices count from 1 in descending-probability order. Entropies are in nats.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from qwa_sim.errors import InvalidInputError
from qwa_sim.mps import EntanglementSpectrum, retained_count

DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3)


@dataclass
class SpectrumReport:
    vn_entropy: float
    index_mean: float
    index_variance: float
    m_eff: dict[float, int] = field(default_factory=dict)
    chebyshev_m: dict[float, int] = field(default_factory=dict)

    @property
    def index_sigma(self) -> float:
        return math.sqrt(self.index_variance)


def _probs(spec: EntanglementSpectrum) -> np.ndarray:
    p = np.asarray(spec.probs, dtype=float)
    if p.size == 0:
        raise InvalidInputError(f"Empty entanglement spectrum at cut {spec.cut}")
    return p


def _check_epsilon(epsilon: float) -> None:
    if not 0 < epsilon < 1:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")


def von_neumann(spec: EntanglementSpectrum) -> float:
    """``-sum p_i ln p_i``."""
    p = _probs(spec)
    entropy = float(-np.sum(p * np.log(p)))
    return entropy if entropy > 0 else 0.0


def index_variance(spec: EntanglementSpectrum) -> tuple[float, float]:
    """Mean and variance of the eigenvalue index.

    Example:
        >>> import numpy as np
        >>> index_variance(EntanglementSpectrum(np.array([0.5, 0.25, 0.25]), 1))
        (1.75, 0.6875)
    """
    p = _probs(spec)
    i = np.arange(1, p.size + 1, dtype=float)
    mean = float(np.sum(i * p))
    variance = float(np.sum(i * i * p) - mean * mean)
    return mean, max(variance, 0.0)


def m_eff(spec: EntanglementSpectrum, epsilon: float) -> int:
    """Smallest ``m`` with ``sum_{i > m} p_i < epsilon`` (strict)."""
    _check_epsilon(epsilon)
    return retained_count(_probs(spec), epsilon)


def chebyshev_m(spec: EntanglementSpectrum, epsilon: float) -> int:
    """Chebyshev bound ``ceil(<i> + sigma / sqrt(epsilon))`` on the retained count."""
    _check_epsilon(epsilon)
    mean, variance = index_variance(spec)
    return int(math.ceil(mean + math.sqrt(variance) / math.sqrt(epsilon)))


def entropy_capacity_ratio(spec: EntanglementSpectrum) -> float:
    """``exp(S) / N_T``: how much of the available Schmidt rank the entropy uses."""
    return math.exp(von_neumann(spec)) / len(_probs(spec))


def spectrum_report(spec: EntanglementSpectrum, epsilons: Iterable[float] = DEFAULT_EPSILONS) -> SpectrumReport:
    mean, variance = index_variance(spec)
    epsilons = tuple(epsilons)
    return SpectrumReport(
        vn_entropy=von_neumann(spec),
        index_mean=mean,
        index_variance=variance,
        m_eff={eps: m_eff(spec, eps) for eps in epsilons},
        chebyshev_m={eps: chebyshev_m(spec, eps) for eps in epsilons},
    )
