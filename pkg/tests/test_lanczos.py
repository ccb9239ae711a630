"""Tests for the matrix-free Lanczos solver."""

import numpy as np
import pytest

from qwa_sim.errors import NumericalFailure
from qwa_sim.lanczos import lowest_eigenpair


def random_symmetric(rng, dim):
    a = rng.standard_normal((dim, dim))
    return (a + a.T) / 2


class TestLowestEigenpair:
    @pytest.mark.parametrize("dim", [1, 2, 7, 40, 64])
    def test_matches_dense_eigh(self, rng, dim):
        a = random_symmetric(rng, dim)
        result = lowest_eigenpair(lambda x: a @ x, rng.standard_normal(dim), tol=1e-12, max_iter=64)
        expected = np.linalg.eigvalsh(a)[0]
        assert result.value == pytest.approx(expected, abs=1e-9)
        assert np.linalg.norm(result.vector) == pytest.approx(1.0, abs=1e-12)
        residual = np.linalg.norm(a @ result.vector - result.value * result.vector)
        assert residual < 1e-6

    def test_never_above_start_energy(self, rng):
        a = random_symmetric(rng, 30)
        v0 = rng.standard_normal(30)
        start = v0 @ a @ v0 / (v0 @ v0)
        result = lowest_eigenpair(lambda x: a @ x, v0, max_iter=3, restarts=0)
        assert result.value <= start + 1e-12

    def test_eigenvector_start_converges_immediately(self, rng):
        a = np.diag([-2.0, 1.0, 3.0, 5.0])
        result = lowest_eigenpair(lambda x: a @ x, np.array([1.0, 0.0, 0.0, 0.0]))
        assert result.converged
        assert result.iterations == 1
        assert result.value == pytest.approx(-2.0)

    def test_zero_start_vector_is_replaced(self):
        a = np.diag([3.0, -1.0, 2.0])
        result = lowest_eigenpair(lambda x: a @ x, np.zeros(3))
        assert result.value == pytest.approx(-1.0, abs=1e-10)

    def test_non_finite_operator_raises(self):
        with pytest.raises(NumericalFailure) as excinfo:
            lowest_eigenpair(lambda x: x * np.nan, np.ones(4))
        assert "iteration" in excinfo.value.diagnostics
