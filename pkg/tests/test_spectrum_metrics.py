"""Tests for entropy, index variance and the truncation-count bounds."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qwa_sim.errors import InvalidInputError
from qwa_sim.mps import EntanglementSpectrum
from qwa_sim.spectrum_metrics import (
    DEFAULT_EPSILONS,
    chebyshev_m,
    entropy_capacity_ratio,
    index_variance,
    m_eff,
    spectrum_report,
    von_neumann,
)


def spectrum(weights) -> EntanglementSpectrum:
    return EntanglementSpectrum.from_weights(np.asarray(weights, dtype=float), 1)


def tail_beyond(spec: EntanglementSpectrum, m: int) -> float:
    return float(np.sum(spec.probs[m:]))


def synthetic_spectra():
    """Exponential, truncated power-law and uniform families."""
    out = []
    i = np.arange(1, 65, dtype=float)
    for r in (0.3, 0.5, 0.9):
        out.append((f"exp r={r}", spectrum(r**i)))
    for a in (1.5, 2.0, 3.0):
        out.append((f"power a={a}", spectrum(i ** (-a))))
    for m in range(2, 65):
        out.append((f"uniform m={m}", spectrum(np.ones(m))))
    return out


SYNTHETIC = synthetic_spectra()


class TestVonNeumann:
    def test_pure_state(self):
        assert von_neumann(spectrum([1.0])) == 0.0

    def test_uniform_pair(self):
        assert von_neumann(spectrum([0.5, 0.5])) == pytest.approx(math.log(2), abs=1e-12)

    def test_uniform_four(self):
        assert von_neumann(spectrum([1, 1, 1, 1])) == pytest.approx(math.log(4), abs=1e-12)

    def test_empty_spectrum_raises(self):
        with pytest.raises(InvalidInputError):
            von_neumann(EntanglementSpectrum(np.array([]), 1))

    @pytest.mark.parametrize("name, spec", SYNTHETIC, ids=[name for name, _ in SYNTHETIC])
    def test_bounded_by_log_rank(self, name, spec):
        assert 0.0 <= von_neumann(spec) <= math.log(len(spec)) + 1e-12

    def test_capacity_ratio_of_uniform_is_one(self):
        assert entropy_capacity_ratio(spectrum(np.ones(16))) == pytest.approx(1.0, abs=1e-12)


class TestIndexVariance:
    def test_point_mass(self):
        assert index_variance(spectrum([1.0])) == (1.0, 0.0)

    def test_uniform_four(self):
        mean, var = index_variance(spectrum([1, 1, 1, 1]))
        assert mean == pytest.approx(2.5)
        assert var == pytest.approx((4**2 - 1) / 12)

    def test_three_terms(self):
        mean, var = index_variance(spectrum([0.5, 0.25, 0.25]))
        assert mean == pytest.approx(1.75)
        assert var == pytest.approx(0.6875)


class TestMEff:
    """Strict-tail retained count."""

    def test_pure_state(self):
        assert m_eff(spectrum([1.0]), 0.3) == 1

    def test_cumulative_tail(self):
        assert m_eff(spectrum([0.5, 0.25, 0.125, 0.125]), 0.2) == 3

    def test_tail_equal_to_epsilon_is_not_enough(self):
        assert m_eff(spectrum([1, 1, 1, 1]), 0.25) == 4

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.5])
    def test_epsilon_out_of_range(self, eps):
        with pytest.raises(InvalidInputError):
            m_eff(spectrum([1.0]), eps)


class TestChebyshevM:
    def test_zero_variance(self):
        assert chebyshev_m(spectrum([1.0]), 0.01) == 1

    def test_uniform_four(self):
        spec = spectrum([1, 1, 1, 1])
        assert chebyshev_m(spec, 0.25) == 5
        assert chebyshev_m(spec, 0.25) >= m_eff(spec, 0.25)

    def test_dyadic(self):
        spec = spectrum([0.5, 0.25, 0.125, 0.125])
        assert chebyshev_m(spec, 0.2) >= m_eff(spec, 0.2) == 3

    @pytest.mark.parametrize("name, spec", SYNTHETIC, ids=[name for name, _ in SYNTHETIC])
    @pytest.mark.parametrize("eps", DEFAULT_EPSILONS)
    def test_bound_is_sound_on_synthetic_spectra(self, name, spec, eps):
        bound = chebyshev_m(spec, eps)
        assert tail_beyond(spec, bound) < eps, f"{name}: tail beyond Chebyshev count not below {eps}"
        assert m_eff(spec, eps) <= bound

    @settings(max_examples=200, deadline=None)
    @given(arrays(np.float64, st.integers(1, 48), elements=st.floats(1e-6, 1.0)))
    def test_bound_is_sound_on_random_spectra(self, weights):
        spec = spectrum(weights)
        for eps in DEFAULT_EPSILONS:
            bound = chebyshev_m(spec, eps)
            assert tail_beyond(spec, bound) < eps
            assert m_eff(spec, eps) <= bound

    @pytest.mark.parametrize("name, spec", SYNTHETIC[:6], ids=[name for name, _ in SYNTHETIC[:6]])
    def test_monotone_in_epsilon(self, name, spec):
        grid = [0.5, 0.2, 0.1, 0.05, 1e-2, 1e-3, 1e-4, 1e-6, 1e-12]
        effs = [m_eff(spec, e) for e in grid]
        chebs = [chebyshev_m(spec, e) for e in grid]
        assert effs == sorted(effs), "m_eff must not decrease as epsilon shrinks"
        assert chebs == sorted(chebs), "chebyshev_m must not decrease as epsilon shrinks"


class TestSpectrumReport:
    def test_report_fields(self):
        report = spectrum_report(spectrum([0.5, 0.25, 0.125, 0.125]))
        assert report.index_mean == pytest.approx(1.875)
        assert report.index_sigma == pytest.approx(math.sqrt(report.index_variance))
        assert set(report.m_eff) == set(DEFAULT_EPSILONS)
        for eps in DEFAULT_EPSILONS:
            assert report.m_eff[eps] <= report.chebyshev_m[eps]
