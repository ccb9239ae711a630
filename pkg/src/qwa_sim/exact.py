"""Exact references for small instances.

Dense or sparse diagonalisation of ``H(s)`` in the same basis convention as
``Mpo.to_dense`` (slot 0 most significant, bit 0 = up), exhaustive classical
minimisation, and Schmidt spectra of dense vectors.
"""

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from qwa_sim.errors import CapacityError, CutIndexError, DimensionError
from qwa_sim.instance import GraphInstance, SpinConfiguration
from qwa_sim.mpo import SchedulePoint
from qwa_sim.mps import EntanglementSpectrum
from qwa_sim.ordering import SitePath
from qwa_sim.spectrum_metrics import von_neumann

logger = logging.getLogger(__name__)

DENSE_MAX_N = 10
KRYLOV_MAX_N = 14
BRUTE_FORCE_MAX_N = 24
CHUNK_BITS = 18


@dataclass
class StateVector:
    """Dense real amplitudes over ``2^n`` basis states, slot 0 most significant."""

    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=float).reshape(-1)
        n = int(round(np.log2(self.amplitudes.size))) if self.amplitudes.size else -1
        if n < 1 or self.amplitudes.size != 2**n:
            raise DimensionError(f"Length {self.amplitudes.size} is not a power of two >= 2")

    @property
    def n(self) -> int:
        return int(round(np.log2(self.amplitudes.size)))

    def normalized(self) -> "StateVector":
        return StateVector(self.amplitudes / np.linalg.norm(self.amplitudes))


def _slot_spins(n: int) -> np.ndarray:
    """``(2^n, n)`` array of sigma values per basis state and slot."""
    idx = np.arange(2**n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return 1 - 2 * bits


def sparse_hamiltonian(inst: GraphInstance, path: SitePath, s: float) -> scipy.sparse.csr_matrix:
    """``H(s)`` as a sparse matrix (``n <= 14``)."""
    point = SchedulePoint(s)
    n = inst.n
    if n > KRYLOV_MAX_N:
        raise CapacityError(f"Exact Hamiltonian limited to n <= {KRYLOV_MAX_N}, got {n}")
    if len(path) != n:
        raise DimensionError(f"Path has {len(path)} slots, instance has {n} spins")

    dim = 2**n
    spins = _slot_spins(n)
    pos = path.positions
    diag = np.zeros(dim)
    for i, j, coupling in inst.edges:
        diag -= point.s * coupling * 0.25 * spins[:, pos[i]] * spins[:, pos[j]]

    rows = [np.arange(dim)]
    cols = [np.arange(dim)]
    vals = [diag]
    if point.s < 1.0:
        idx = np.arange(dim, dtype=np.int64)
        for k in range(n):
            rows.append(idx)
            cols.append(idx ^ (1 << (n - 1 - k)))
            vals.append(np.full(dim, -(1.0 - point.s) * 0.5))
    return scipy.sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )


def dense_hamiltonian(inst: GraphInstance, path: SitePath, s: float) -> np.ndarray:
    if inst.n > DENSE_MAX_N:
        raise CapacityError(f"Dense Hamiltonian limited to n <= {DENSE_MAX_N}, got {inst.n}")
    return sparse_hamiltonian(inst, path, s).toarray()


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude amplitude positive."""
    return vec if vec[np.argmax(np.abs(vec))] >= 0 else -vec


def ground_space(inst: GraphInstance, path: SitePath, s: float, k: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Lowest ``k`` eigenvalues (ascending) and eigenvectors (columns)."""
    n = inst.n
    if n > KRYLOV_MAX_N:
        raise CapacityError(f"Exact diagonalisation limited to n <= {KRYLOV_MAX_N}, got {n}")
    k = min(k, 2**n)
    if n <= DENSE_MAX_N:
        values, vectors = scipy.linalg.eigh(dense_hamiltonian(inst, path, s), subset_by_index=[0, k - 1])
    else:
        h = sparse_hamiltonian(inst, path, s)
        v0 = np.ones(h.shape[0]) / np.sqrt(h.shape[0])
        values, vectors = scipy.sparse.linalg.eigsh(h, k=k, which="SA", v0=v0, tol=1e-13)
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]
    vectors = np.column_stack([_fix_sign(vectors[:, c]) for c in range(vectors.shape[1])])
    return values, vectors


def exact_ground(inst: GraphInstance, path: SitePath, s: float) -> tuple[StateVector, float]:
    """Lowest eigenpair of ``H(s)``: dense for ``n <= 10``, Krylov for ``n <= 14``.

    Raises:
        CapacityError: ``n > 14``.
    """
    values, vectors = ground_space(inst, path, s, k=1)
    return StateVector(vectors[:, 0]), float(values[0])


def brute_force_minimum(inst: GraphInstance) -> tuple[SpinConfiguration, float]:
    """Exhaustive classical minimum over ``2^(n-1)`` configurations.

    Spin 0 is fixed to +1 (flip symmetry). Configurations are enumerated in
    chunks with spin 1 as the most significant bit (bit set = -1); ties go to
    the first minimiser, i.e. the lexicographically smallest configuration
    with +1 ordered before -1.

    Raises:
        CapacityError: ``n > 24``.
    """
    n = inst.n
    if n > BRUTE_FORCE_MAX_N:
        raise CapacityError(f"Brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if n == 1:
        return SpinConfiguration((1,)), 0.0

    total = 2 ** (n - 1)
    chunk = min(total, 2**CHUNK_BITS)
    shifts = np.array([n - 1 - i for i in range(1, n)], dtype=np.int64)
    best_code, best_energy = 0, np.inf
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        sigma = np.ones((codes.size, n), dtype=np.int8)
        sigma[:, 1:] = 1 - 2 * ((codes[:, None] >> shifts[None, :]) & 1)
        energy = np.zeros(codes.size)
        for i, j, coupling in inst.edges:
            energy -= coupling * (sigma[:, i] * sigma[:, j])
        local = int(np.argmin(energy))
        if energy[local] < best_energy:
            best_code, best_energy = int(codes[local]), float(energy[local])

    values = [1] + [1 - 2 * ((best_code >> int(sh)) & 1) for sh in shifts]
    return SpinConfiguration(tuple(values)), best_energy


def exact_cut_spectrum(v: StateVector | np.ndarray, cut: int) -> EntanglementSpectrum:
    """Schmidt probabilities of the ``2^cut x 2^(n-cut)`` reshaped amplitudes."""
    v = v if isinstance(v, StateVector) else StateVector(v)
    n = v.n
    if not 1 <= cut <= n - 1:
        raise CutIndexError(f"Cut {cut} outside 1..{n - 1}")
    s = scipy.linalg.svdvals(v.amplitudes.reshape(2**cut, 2 ** (n - cut)))
    return EntanglementSpectrum.from_weights(s**2, cut)


def exact_entropy_profile(
    inst: GraphInstance, path: SitePath, s_grid: Iterable[float]
) -> list[tuple[float, float]]:
    """``(s, max over cuts of the von Neumann entropy)`` of the exact ground state."""
    profile = []
    for s in s_grid:
        state, _ = exact_ground(inst, path, s)
        entropies = [von_neumann(exact_cut_spectrum(state, cut)) for cut in range(1, inst.n)]
        profile.append((float(s), max(entropies, default=0.0)))
    return profile
