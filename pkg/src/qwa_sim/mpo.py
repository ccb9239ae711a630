"""Matrix product operator for the interpolated Hamiltonian.

    H(s) = (1 - s) H0 + s H1,   H0 = -sum_i S^x_i,   H1 = -sum_<ij> J_ij S^z_i S^z_j

with spin-1/2 operators (S^z = diag(1/2, -1/2), S^x = offdiag(1/2, 1/2)).
Pauli-matrix conventions differ by 4x on couplings and 2x on the field.

Couplings are routed along the DMRG path by a finite-state automaton. On each
operator bond the channels are: ``start`` (nothing placed yet), one channel per
slot ``a`` left of the bond that still has a partner right of it (carrying a
pending ``S^z_a``), and ``done`` (a term has been completed). So the bond
dimension is at most 2 plus the number of couplings straddling the bond.
"""

from dataclasses import dataclass

import numpy as np
import opt_einsum as oe

from qwa_sim.errors import DimensionError, ScheduleRangeError
from qwa_sim.instance import GraphInstance
from qwa_sim.mps import SX, SZ, Mps
from qwa_sim.ordering import SitePath

IDENTITY = np.eye(2)
DENSE_LIMIT = 12


@dataclass(frozen=True)
class SchedulePoint:
    """Annealing parameter ``s`` in ``[0, 1]``."""

    s: float

    def __post_init__(self):
        s = float(self.s)
        if not 0.0 <= s <= 1.0:
            raise ScheduleRangeError(f"Schedule point s={self.s} outside [0, 1]")
        object.__setattr__(self, "s", s)

    @property
    def gamma_effective(self) -> float:
        """Transverse field of the equivalent ``H(Gamma)``, i.e. ``H(s) / s``.

        Documentation-only mapping; infinite at ``s = 0``.
        """
        return np.inf if self.s == 0 else (1.0 - self.s) / self.s


@dataclass(frozen=True)
class Mpo:
    """Operator tensors indexed ``(left op-bond, physical out, physical in, right op-bond)``."""

    tensors: tuple[np.ndarray, ...]

    def __post_init__(self):
        tensors = tuple(np.asarray(w, dtype=float) for w in self.tensors)
        if not tensors:
            raise DimensionError("An MPO needs at least one site")
        if tensors[0].shape[0] != 1 or tensors[-1].shape[3] != 1:
            raise DimensionError("Outer operator bonds must have dimension 1")
        for k, w in enumerate(tensors):
            if w.ndim != 4 or w.shape[1:3] != (2, 2):
                raise DimensionError(f"Site {k} operator has shape {w.shape}")
            if k and tensors[k - 1].shape[3] != w.shape[0]:
                raise DimensionError(f"Operator bond {k} dimensions disagree")
        object.__setattr__(self, "tensors", tensors)

    @property
    def n(self) -> int:
        return len(self.tensors)

    @property
    def op_bond_dims(self) -> tuple[int, ...]:
        return tuple(w.shape[0] for w in self.tensors) + (1,)

    def to_dense(self) -> np.ndarray:
        """Full ``2^n x 2^n`` matrix, slot 0 most significant (``n <= 12``)."""
        if self.n > DENSE_LIMIT:
            raise DimensionError(f"Refusing to densify an MPO with {self.n} > {DENSE_LIMIT} sites")
        acc = np.ones((1, 1, 1))  # (row, col, op-bond)
        for w in self.tensors:
            acc = oe.contract("xyw,wsta->xsyta", acc, w)
            r, s, c, t, a = acc.shape
            acc = acc.reshape(r * s, c * t, a)
        return acc[:, :, 0]


def build_hamiltonian(inst: GraphInstance, path: SitePath, s: float | SchedulePoint) -> Mpo:
    """MPO of ``H(s)`` with couplings mapped through ``path``.

    Args:
        inst: Coupling graph.
        path: ``path.order[k]`` is the spin at slot ``k``.
        s: Schedule point in ``[0, 1]``.

    Raises:
        ScheduleRangeError: ``s`` outside ``[0, 1]``.
        DimensionError: Path length differs from the spin count.

    Example:
        >>> from qwa_sim.instance import GraphInstance
        >>> from qwa_sim.ordering import identity_path
        >>> inst = GraphInstance.from_edges(2, [(0, 1, 1.0)])
        >>> np.diag(build_hamiltonian(inst, identity_path(2), 1.0).to_dense()).tolist()
        [-0.25, 0.25, 0.25, -0.25]
    """
    point = s if isinstance(s, SchedulePoint) else SchedulePoint(s)
    n = inst.n
    if len(path) != n:
        raise DimensionError(f"Path has {len(path)} slots, instance has {n} spins")

    field_coeff = -(1.0 - point.s)
    pos = path.positions
    # partners[a] = {b: coefficient} for slots a < b
    partners: list[dict[int, float]] = [dict() for _ in range(n)]
    if point.s != 0.0:
        for i, j, coupling in inst.edges:
            if coupling == 0.0:
                continue
            a, b = sorted((int(pos[i]), int(pos[j])))
            partners[a][b] = -point.s * coupling

    last_partner = [max(p) if p else -1 for p in partners]

    def channels(bond: int) -> list:
        """Channel labels on operator bond ``bond`` (between slots bond-1 and bond)."""
        labels = []
        if bond < n:
            labels.append("start")
        labels.extend(a for a in range(bond) if last_partner[a] >= bond)
        if bond > 0:
            labels.append("done")
        return labels

    bonds = [channels(k) for k in range(n + 1)]
    tensors = []
    for k in range(n):
        left = {label: idx for idx, label in enumerate(bonds[k])}
        right = {label: idx for idx, label in enumerate(bonds[k + 1])}
        w = np.zeros((len(left), 2, 2, len(right)))

        if "start" in right:
            w[left["start"], :, :, right["start"]] = IDENTITY
        if "done" in left:
            w[left["done"], :, :, right["done"]] = IDENTITY
        if field_coeff != 0.0:
            w[left["start"], :, :, right["done"]] += field_coeff * SX
        if k in right:
            w[left["start"], :, :, right[k]] = SZ

        for a in range(k):
            if a not in left:
                continue
            if a in right:
                w[left[a], :, :, right[a]] = IDENTITY
            coeff = partners[a].get(k)
            if coeff is not None:
                w[left[a], :, :, right["done"]] += coeff * SZ
        tensors.append(w)
    return Mpo(tuple(tensors))


def expectation(h: Mpo, psi: Mps) -> float:
    """``<psi|H|psi>`` by transfer contraction (``psi`` assumed normalised).

    Raises:
        DimensionError: Operator and state lengths differ.
    """
    if h.n != psi.n:
        raise DimensionError(f"MPO has {h.n} sites, MPS has {psi.n}")
    env = np.ones((1, 1, 1))  # (bra, op, ket)
    for w, t in zip(h.tensors, psi.tensors):
        env = oe.contract("awb,asc,wstv,btd->cvd", env, t, w, t)
    return float(env[0, 0, 0])
