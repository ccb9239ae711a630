"""Two-site DMRG ground-state search seeded by an input MPS.

Each full sweep goes left-to-right then right-to-left over neighbouring slot
pairs. The two-site block is optimised by Lanczos started from the current
block (the seed's wavefunction carried along), split by SVD and truncated to
the smallest bond dimension whose discarded probability is below
``epsilon``, capped at ``m_max``. MPO environments are cached and updated
incrementally in the sweep direction.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import opt_einsum as oe
import scipy.linalg

from qwa_sim.errors import DimensionError, InvalidInputError, NumericalFailure
from qwa_sim.lanczos import lowest_eigenpair
from qwa_sim.mpo import Mpo, expectation
from qwa_sim.mps import PHYS_DIM, Mps, retained_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DmrgSettings:
    """Sweep and truncation controls.

    Attributes:
        epsilon: Discarded-probability tolerance per bond.
        m_max: Bond-dimension cap.
        energy_tol: Relative energy change per full sweep that counts as converged.
        max_sweeps: Upper bound on full sweeps.
        eig_tol: Relative residual tolerance of the local Lanczos solve.
        eig_max_iter: Krylov dimension per Lanczos pass.
    """

    epsilon: float = 1e-8
    m_max: int = 256
    energy_tol: float = 1e-10
    max_sweeps: int = 20
    eig_tol: float = 1e-10
    eig_max_iter: int = 64

    def __post_init__(self):
        for name in ("epsilon", "energy_tol", "eig_tol"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be positive, got {getattr(self, name)}")
        if self.m_max < 2:
            raise InvalidInputError(f"m_max must be at least 2, got {self.m_max}")
        if self.max_sweeps < 1 or self.eig_max_iter < 1:
            raise InvalidInputError("max_sweeps and eig_max_iter must be positive")


@dataclass
class GroundResult:
    """Outcome of one ground-state search.

    Attributes:
        psi: Converged state, normalised.
        energy: ``<psi|H|psi>``.
        sweeps_used: Full sweeps performed.
        max_bond_dim: Largest bond dimension of ``psi``.
        cap_saturated: Some bond needed more than ``m_max`` states.
        converged: Energy change fell below ``energy_tol``.
        sweep_energies: Energy after each full sweep.
        max_discarded: Largest discarded probability of any split.
    """

    psi: Mps
    energy: float
    sweeps_used: int
    max_bond_dim: int
    cap_saturated: bool
    converged: bool
    sweep_energies: list[float] = field(default_factory=list)
    max_discarded: float = 0.0


def _grow_left(env: np.ndarray, t: np.ndarray, w: np.ndarray) -> np.ndarray:
    return oe.contract("awb,asc,wstv,btd->cvd", env, t, w, t)


def _grow_right(env: np.ndarray, t: np.ndarray, w: np.ndarray) -> np.ndarray:
    return oe.contract("asc,wstv,btd,cvd->awb", t, w, t, env)


class _Sweeper:
    """Mutable sweep state: tensors, environments and bookkeeping."""

    def __init__(self, seed: Mps, h: Mpo, cfg: DmrgSettings):
        self.h = h
        self.cfg = cfg
        self.tensors = seed.canonicalize(0).tensors
        n = len(self.tensors)
        self.left: list[np.ndarray | None] = [None] * n
        self.right: list[np.ndarray | None] = [None] * n
        self.left[0] = np.ones((1, 1, 1))
        self.right[n - 1] = np.ones((1, 1, 1))
        for k in range(n - 1, 0, -1):
            self.right[k - 1] = _grow_right(self.right[k], self.tensors[k], h.tensors[k])
        self.cap_saturated = False
        self.max_discarded = 0.0
        self.last_energy = np.nan

    def optimise_pair(self, i: int, moving_right: bool, sweep: int) -> None:
        """Optimise slots ``i, i+1`` and move the centre one step."""
        a, b = self.tensors[i], self.tensors[i + 1]
        theta = np.tensordot(a, b, axes=(2, 0))  # (ml, 2, 2, mr)
        expr = oe.contract_expression(
            "awb,bstd,wusv,vytz,czd->auyc",
            self.left[i],
            theta.shape,
            self.h.tensors[i],
            self.h.tensors[i + 1],
            self.right[i + 1],
            constants=[0, 2, 3, 4],
        )
        shape = theta.shape

        def matvec(x: np.ndarray) -> np.ndarray:
            return expr(x.reshape(shape)).reshape(-1)

        result = lowest_eigenpair(matvec, theta.reshape(-1), self.cfg.eig_tol, self.cfg.eig_max_iter)
        if not np.isfinite(result.value) or not np.all(np.isfinite(result.vector)):
            raise NumericalFailure(
                "Non-finite local eigenpair", {"sweep": sweep, "site": i, "shape": shape}
            )
        self.last_energy = result.value

        ml, _, _, mr = shape
        u, s, vt = scipy.linalg.svd(
            result.vector.reshape(ml * PHYS_DIM, PHYS_DIM * mr), full_matrices=False
        )
        p = s**2 / np.sum(s**2)
        needed = retained_count(p, self.cfg.epsilon)
        keep = min(needed, self.cfg.m_max)
        if needed > self.cfg.m_max:
            self.cap_saturated = True
        self.max_discarded = max(self.max_discarded, float(np.sum(p[keep:])))
        s = s[:keep] / np.linalg.norm(s[:keep])

        if moving_right:
            self.tensors[i] = u[:, :keep].reshape(ml, PHYS_DIM, keep)
            self.tensors[i + 1] = (s[:, None] * vt[:keep]).reshape(keep, PHYS_DIM, mr)
            self.left[i + 1] = _grow_left(self.left[i], self.tensors[i], self.h.tensors[i])
        else:
            self.tensors[i] = (u[:, :keep] * s).reshape(ml, PHYS_DIM, keep)
            self.tensors[i + 1] = vt[:keep].reshape(keep, PHYS_DIM, mr)
            self.right[i] = _grow_right(self.right[i + 1], self.tensors[i + 1], self.h.tensors[i + 1])


def _solve_single_site(seed: Mps, h: Mpo) -> GroundResult:
    local = h.tensors[0][0, :, :, 0]
    values, vectors = scipy.linalg.eigh(local)
    vec = vectors[:, 0]
    # orient like the seed so repeated solves are continuous
    if float(vec @ seed.tensors[0].reshape(-1)) < 0:
        vec = -vec
    psi = Mps([vec.reshape(1, PHYS_DIM, 1)], center=0)
    energy = float(values[0])
    return GroundResult(psi, energy, 1, 1, False, True, [energy], 0.0)


def solve_ground(seed: Mps, h: Mpo, cfg: DmrgSettings | None = None) -> GroundResult:
    """Two-site DMRG ground state of ``h`` started from ``seed``.

    Args:
        seed: Starting state (normalised or not; it is canonicalised first).
        h: Hamiltonian MPO of the same length.
        cfg: Sweep settings; defaults when None.

    Returns:
        GroundResult; ``energy`` is the expectation value of the returned state.

    Raises:
        DimensionError: ``seed`` and ``h`` have different lengths.
        NumericalFailure: A non-finite number appeared.
    """
    cfg = cfg or DmrgSettings()
    if seed.n != h.n:
        raise DimensionError(f"Seed has {seed.n} sites, Hamiltonian has {h.n}")
    if seed.n == 1:
        return _solve_single_site(seed, h)

    n = seed.n
    sweeper = _Sweeper(seed, h, cfg)
    previous = expectation(h, Mps(list(sweeper.tensors), center=0))
    if not np.isfinite(previous):
        raise NumericalFailure("Non-finite seed energy", {"n": n})

    sweep_energies: list[float] = []
    converged = False
    for sweep in range(1, cfg.max_sweeps + 1):
        for i in range(n - 1):
            sweeper.optimise_pair(i, moving_right=True, sweep=sweep)
        for i in range(n - 2, -1, -1):
            sweeper.optimise_pair(i, moving_right=False, sweep=sweep)

        energy = float(sweeper.last_energy)
        sweep_energies.append(energy)
        bond_dims = [t.shape[2] for t in sweeper.tensors[:-1]]
        logger.debug("Sweep %d: E=%.14f, bond dims %s", sweep, energy, bond_dims)
        if abs(previous - energy) < cfg.energy_tol * max(1.0, abs(energy)):
            converged = True
            break
        previous = energy

    psi = Mps(list(sweeper.tensors), center=0)
    energy = expectation(h, psi)
    if not np.isfinite(energy):
        raise NumericalFailure("Non-finite final energy", {"n": n, "sweeps": len(sweep_energies)})
    if sweeper.cap_saturated:
        logger.warning("Bond-dimension cap m_max=%d saturated", cfg.m_max)
    if not converged:
        logger.warning("DMRG not converged after %d sweeps", cfg.max_sweeps)

    return GroundResult(
        psi=psi,
        energy=float(energy),
        sweeps_used=len(sweep_energies),
        max_bond_dim=psi.max_bond_dim,
        cap_saturated=sweeper.cap_saturated,
        converged=converged,
        sweep_energies=sweep_energies,
        max_discarded=sweeper.max_discarded,
    )
