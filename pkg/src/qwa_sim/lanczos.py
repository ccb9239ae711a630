"""Lanczos lowest-eigenpair solver with full reorthogonalization.

Matrix-free: the operator is only applied through ``matvec``. The Krylov
space is started from the caller's vector, so a good guess (the current DMRG
block) converges in a handful of iterations, and the first Ritz value equals
the starting energy: the returned eigenvalue never exceeds it.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from qwa_sim.errors import NumericalFailure

BREAKDOWN_TOL = 1e-14


@dataclass
class LanczosResult:
    value: float
    vector: np.ndarray
    iterations: int
    residual: float
    converged: bool


def lowest_eigenpair(
    matvec: Callable[[np.ndarray], np.ndarray],
    v0: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 64,
    restarts: int = 3,
) -> LanczosResult:
    """Lowest eigenpair of a real symmetric operator.

    Args:
        matvec: ``x -> A @ x`` on flat vectors.
        v0: Starting vector (any norm; a zero vector is replaced by ones).
        tol: Stop when the residual ``||A x - theta x||`` falls below
            ``tol * max(1, |theta|)``.
        max_iter: Krylov dimension cap per pass (also capped by the problem size).
        restarts: Extra passes restarted from the current Ritz vector when a
            pass ends unconverged.

    Returns:
        LanczosResult with a unit-norm ``vector``.
    """
    result = _lanczos_pass(matvec, v0, tol, max_iter)
    iterations = result.iterations
    for _ in range(restarts):
        if result.converged:
            break
        result = _lanczos_pass(matvec, result.vector, tol, max_iter)
        iterations += result.iterations
    result.iterations = iterations
    return result


def _lanczos_pass(matvec, v0, tol, max_iter) -> LanczosResult:
    v = np.asarray(v0, dtype=float).reshape(-1)
    dim = v.size
    norm = np.linalg.norm(v)
    if not np.isfinite(norm):
        raise NumericalFailure("Non-finite Lanczos start vector", {"dim": dim})
    if norm < BREAKDOWN_TOL:
        v = np.ones(dim)
        norm = np.linalg.norm(v)

    basis = np.zeros((min(max_iter, dim), dim))
    basis[0] = v / norm
    alphas: list[float] = []
    betas: list[float] = []
    theta, y = 0.0, np.ones(1)
    residual = np.inf

    steps = basis.shape[0]
    for j in range(steps):
        w = matvec(basis[j])
        alpha = float(basis[j] @ w)
        w = w - alpha * basis[j]
        if j:
            w = w - betas[-1] * basis[j - 1]
        # full reorthogonalization, twice is enough
        for _ in range(2):
            w = w - basis[: j + 1].T @ (basis[: j + 1] @ w)
        alphas.append(alpha)
        beta = float(np.linalg.norm(w))
        if not (np.isfinite(alpha) and np.isfinite(beta)):
            raise NumericalFailure("Non-finite value in Lanczos recursion", {"iteration": j, "dim": dim})

        if j == 0:
            theta, y = alpha, np.ones(1)
        else:
            evals, evecs = scipy.linalg.eigh_tridiagonal(
                np.array(alphas), np.array(betas), select="i", select_range=(0, 0)
            )
            theta, y = float(evals[0]), evecs[:, 0]
        residual = beta * abs(y[-1])

        if residual < tol * max(1.0, abs(theta)) or beta < BREAKDOWN_TOL or j + 1 == steps:
            break
        betas.append(beta)
        basis[j + 1] = w / beta

    k = len(alphas)
    x = basis[:k].T @ y
    x /= np.linalg.norm(x)
    converged = residual < tol * max(1.0, abs(theta)) or k == dim
    return LanczosResult(value=theta, vector=x, iterations=k, residual=float(residual), converged=converged)
