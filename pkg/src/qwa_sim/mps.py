"""Open-boundary matrix product states of spin-1/2 chains.

Site tensors are real arrays indexed ``(left bond, physical, right bond)``
with physical index 0 = up (S^z = +1/2, sigma = +1) and 1 = down. The outer
bonds have dimension 1. Dense vectors order the basis with slot 0 as the most
significant bit.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import opt_einsum as oe
import scipy.linalg

from qwa_sim.errors import CutIndexError, DimensionError, InvalidInputError, InvalidSizeError
from qwa_sim.instance import SpinConfiguration
from qwa_sim.ordering import SitePath, identity_path

logger = logging.getLogger(__name__)

PHYS_DIM = 2
PROB_FLOOR = 1e-16
TIE_TOL = 1e-12
DENSE_LIMIT = 20

SZ = np.diag([0.5, -0.5])
SX = np.array([[0.0, 0.5], [0.5, 0.0]])


@dataclass
class EntanglementSpectrum:
    """Reduced-density-matrix eigenvalues at one cut, descending.

    Attributes:
        probs: ``p_1 >= p_2 >= ... > 0``, summing to one.
        cut: Bond index; the cut separates slots ``< cut`` from slots ``>= cut``.
    """

    probs: np.ndarray
    cut: int

    @classmethod
    def from_weights(cls, weights: np.ndarray, cut: int) -> "EntanglementSpectrum":
        """Normalise, drop entries below the floor and sort descending."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if not total > 0:
            raise InvalidInputError(f"Spectrum at cut {cut} has no weight")
        p = np.sort(w / total)[::-1]
        p = p[p >= PROB_FLOOR]
        return cls(probs=p / p.sum(), cut=cut)

    def __len__(self) -> int:
        return len(self.probs)


@dataclass
class Mps:
    """Matrix product state.

    Attributes:
        tensors: One ``(m_k, 2, m_{k+1})`` array per slot.
        center: Orthogonality centre, or None when no canonical form is known.
    """

    tensors: list[np.ndarray]
    center: int | None = field(default=None)

    def __post_init__(self):
        if not self.tensors:
            raise InvalidSizeError("An MPS needs at least one site")
        self.tensors = [np.asarray(t, dtype=float) for t in self.tensors]
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise DimensionError("Outer bonds of an open-boundary MPS must have dimension 1")
        for k, t in enumerate(self.tensors):
            if t.ndim != 3 or t.shape[1] != PHYS_DIM:
                raise DimensionError(f"Site {k} tensor has shape {t.shape}, expected (m, 2, m')")
            if k and self.tensors[k - 1].shape[2] != t.shape[0]:
                raise DimensionError(f"Bond {k} dimensions disagree between sites {k - 1} and {k}")

    @property
    def n(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> tuple[int, ...]:
        """``m_0 .. m_n`` with ``m_0 = m_n = 1``."""
        return tuple(t.shape[0] for t in self.tensors) + (1,)

    @property
    def max_bond_dim(self) -> int:
        return max(self.bond_dims)

    def copy(self) -> "Mps":
        return Mps([t.copy() for t in self.tensors], self.center)

    def norm(self) -> float:
        return float(np.sqrt(abs(_inner(self, self))))

    def canonicalize(self, center: int = 0) -> "Mps":
        """Mixed-canonical copy with orthogonality centre ``center``, norm 1.

        Sites left of the centre become left isometries, sites right of it
        right isometries. Bond dimensions may shrink to their rank bound.
        """
        if not 0 <= center < self.n:
            raise CutIndexError(f"Centre {center} outside 0..{self.n - 1}")
        tensors = [t.copy() for t in self.tensors]
        for k in range(center):
            m, _, r = tensors[k].shape
            q, rr = scipy.linalg.qr(tensors[k].reshape(m * PHYS_DIM, r), mode="economic")
            tensors[k] = q.reshape(m, PHYS_DIM, -1)
            tensors[k + 1] = np.tensordot(rr, tensors[k + 1], axes=(1, 0))
        for k in range(self.n - 1, center, -1):
            m, _, r = tensors[k].shape
            q, rr = scipy.linalg.qr(tensors[k].reshape(m, PHYS_DIM * r).T, mode="economic")
            tensors[k] = q.T.reshape(-1, PHYS_DIM, r)
            tensors[k - 1] = np.tensordot(tensors[k - 1], rr.T, axes=(2, 0))
        norm = np.linalg.norm(tensors[center])
        if not norm > 0:
            raise InvalidInputError("Cannot canonicalize a zero state")
        tensors[center] = tensors[center] / norm
        return Mps(tensors, center)

    def to_statevector(self) -> np.ndarray:
        """Dense amplitudes, slot 0 most significant (``n <= 20``)."""
        if self.n > DENSE_LIMIT:
            raise DimensionError(f"Refusing to densify an MPS with {self.n} > {DENSE_LIMIT} sites")
        v = np.ones((1, 1))
        for t in self.tensors:
            v = np.tensordot(v, t, axes=(1, 0)).reshape(-1, t.shape[2])
        return v.reshape(-1)

    @classmethod
    def from_statevector(cls, amplitudes: np.ndarray, cutoff: float = 1e-14) -> "Mps":
        """Exact MPS of a dense vector by successive SVDs.

        Singular values below ``cutoff`` times the largest are dropped. The
        result is left-canonical with centre at the last site.
        """
        v = np.asarray(amplitudes, dtype=float).reshape(-1)
        n = int(round(np.log2(v.size)))
        if v.size != 2**n or n < 1:
            raise DimensionError(f"Vector length {v.size} is not a power of two")
        tensors = []
        rest = v.reshape(1, -1)
        for _ in range(n - 1):
            m = rest.shape[0]
            u, s, vt = scipy.linalg.svd(rest.reshape(m * PHYS_DIM, -1), full_matrices=False)
            keep = max(1, int(np.sum(s > cutoff * s[0])))
            tensors.append(u[:, :keep].reshape(m, PHYS_DIM, keep))
            rest = s[:keep, None] * vt[:keep]
        tensors.append(rest.reshape(rest.shape[0], PHYS_DIM, 1))
        return cls(tensors).canonicalize(n - 1)


def _inner(a: Mps, b: Mps) -> float:
    env = np.ones((1, 1))
    for ta, tb in zip(a.tensors, b.tensors):
        env = oe.contract("ab,asc,bsd->cd", env, ta, tb)
    return float(env[0, 0])


def product_state(site_amplitudes) -> Mps:
    """Product state from one ``(up, down)`` amplitude pair per site, normalised."""
    tensors = []
    for amp in site_amplitudes:
        a = np.asarray(amp, dtype=float).reshape(PHYS_DIM)
        norm = np.linalg.norm(a)
        if not norm > 0:
            raise InvalidInputError("Site amplitudes must not both vanish")
        tensors.append((a / norm).reshape(1, PHYS_DIM, 1))
    if not tensors:
        raise InvalidSizeError("A product state needs at least one site")
    return Mps(tensors, center=0)


def product_plus_x(n: int) -> Mps:
    """All spins along +X: ``(|up> + |down>) / sqrt(2)`` on every site."""
    if n < 1:
        raise InvalidSizeError(f"State needs at least one site, got n={n}")
    return product_state([(1.0, 1.0)] * n)


def basis_state(spins) -> Mps:
    """Computational basis state from sigma values (+1 = up, -1 = down) per slot."""
    return product_state([(1.0, 0.0) if s > 0 else (0.0, 1.0) for s in spins])


def polarized_state(n: int, tilt: float = 0.1) -> Mps:
    """Product state leaning towards up: amplitudes ``(cos(pi/4 - tilt), sin(pi/4 - tilt))``."""
    theta = np.pi / 4 - tilt
    return product_state([(np.cos(theta), np.sin(theta))] * n)


def random_mps(n: int, bond_dim: int, rng: np.random.Generator) -> Mps:
    """Normalised MPS with Gaussian entries and bond dimension up to ``bond_dim``."""
    if n < 1:
        raise InvalidSizeError(f"State needs at least one site, got n={n}")
    dims = [1] + [min(bond_dim, 2**k, 2 ** (n - k)) for k in range(1, n)] + [1]
    tensors = [rng.standard_normal((dims[k], PHYS_DIM, dims[k + 1])) for k in range(n)]
    return Mps(tensors).canonicalize(0)


def random_product_state(n: int, rng: np.random.Generator) -> Mps:
    return product_state(rng.standard_normal((n, PHYS_DIM)))


def overlap(a: Mps, b: Mps) -> float:
    """``|<a|b>|`` by left-to-right transfer contraction.

    Raises:
        DimensionError: The states have different lengths.
    """
    if a.n != b.n:
        raise DimensionError(f"Cannot overlap MPS of lengths {a.n} and {b.n}")
    return abs(_inner(a, b))


def global_flip(psi: Mps) -> Mps:
    """Apply the spin flip ``prod_k sigma^x_k``: swap up and down on every site."""
    return Mps([t[:, ::-1, :].copy() for t in psi.tensors], center=psi.center)


def _span_fidelity(a: Mps, b: Mps) -> float:
    # norm of the projection of a onto span{b, flip(b)}, via the orthogonal flip-even and flip-odd parts of b
    flipped = global_flip(b)
    direct, crossed, parity = _inner(a, b), _inner(a, flipped), _inner(b, flipped)
    total = 0.0
    for sign in (1.0, -1.0):
        weight = (1.0 + sign * parity) / 2
        if weight > TIE_TOL:
            total += ((direct + sign * crossed) / 2) ** 2 / weight
    return math.sqrt(total)


def flip_fidelity(a: Mps, b: Mps) -> float:
    """Overlap of ``a`` and ``b`` modulo the global spin flip, clipped to 1.

    Each state is projected onto the span of the other and its flip, and the
    larger norm is returned. Inside one flip sector this equals
    ``overlap(a, b)``; between a cat and either of its symmetry-broken halves,
    or between the two halves, it is 1. Both states are assumed normalised.

    Raises:
        DimensionError: The states have different lengths.
    """
    if a.n != b.n:
        raise DimensionError(f"Cannot overlap MPS of lengths {a.n} and {b.n}")
    return min(max(_span_fidelity(a, b), _span_fidelity(b, a)), 1.0)


def _check_cut(psi: Mps, cut: int) -> None:
    if not 1 <= cut <= psi.n - 1:
        raise CutIndexError(f"Cut {cut} outside 1..{psi.n - 1}")


def entanglement_spectrum(psi: Mps, cut: int) -> EntanglementSpectrum:
    """Schmidt probabilities of the bipartition at bond ``cut``.

    The state is brought to centre ``cut - 1`` first unless it is already there.
    """
    _check_cut(psi, cut)
    if psi.center != cut - 1:
        psi = psi.canonicalize(cut - 1)
    t = psi.tensors[cut - 1]
    s = scipy.linalg.svdvals(t.reshape(-1, t.shape[2]))
    return EntanglementSpectrum.from_weights(s**2, cut)


def all_spectra(psi: Mps) -> list[EntanglementSpectrum]:
    """Spectra at every cut ``1..n-1`` in one left-to-right canonical sweep."""
    work = psi.canonicalize(0)
    tensors = work.tensors
    spectra = []
    for k in range(psi.n - 1):
        m, _, r = tensors[k].shape
        u, s, vt = scipy.linalg.svd(tensors[k].reshape(m * PHYS_DIM, r), full_matrices=False)
        spectra.append(EntanglementSpectrum.from_weights(s**2, k + 1))
        tensors[k + 1] = np.tensordot(s[:, None] * vt, tensors[k + 1], axes=(1, 0))
    return spectra


def retained_count(probs: np.ndarray, epsilon: float) -> int:
    """Smallest ``m`` with ``sum_{i > m} p_i < epsilon`` (probs descending)."""
    p = np.asarray(probs, dtype=float)
    if p.size == 0:
        raise InvalidInputError("Empty spectrum")
    # tail_after[m - 1] = sum(p[m:]), summed smallest-first
    tail_after = np.append(np.cumsum(p[::-1])[::-1][1:], 0.0)
    return int(np.argmax(tail_after < epsilon)) + 1


@dataclass
class TruncationReport:
    """Per-bond outcome of a truncation sweep (bonds ``1..n-1``)."""

    kept: list[int]
    discarded: list[float]
    cap_bound: list[bool]

    @property
    def max_discarded(self) -> float:
        return max(self.discarded, default=0.0)

    @property
    def any_cap_bound(self) -> bool:
        return any(self.cap_bound)


def truncate(psi: Mps, epsilon: float, m_max: int) -> tuple[Mps, TruncationReport]:
    """Compress every bond to the smallest ``m`` whose discarded tail is below ``epsilon``.

    The kept dimension is capped at ``m_max``; hitting the cap is reported,
    not raised. The result is renormalised with centre 0.

    Args:
        psi: State to compress.
        epsilon: Tolerance on the discarded probability per bond.
        m_max: Bond-dimension cap.

    Returns:
        The truncated state and a TruncationReport.
    """
    if not epsilon > 0:
        raise InvalidInputError(f"epsilon must be positive, got {epsilon}")
    if m_max < 1:
        raise InvalidInputError(f"m_max must be at least 1, got {m_max}")

    n = psi.n
    tensors = psi.canonicalize(n - 1).tensors
    kept = [0] * (n - 1)
    discarded = [0.0] * (n - 1)
    capped = [False] * (n - 1)
    for k in range(n - 1, 0, -1):
        m, _, r = tensors[k].shape
        u, s, vt = scipy.linalg.svd(tensors[k].reshape(m, PHYS_DIM * r), full_matrices=False)
        p = s**2 / np.sum(s**2)
        needed = retained_count(p, epsilon)
        keep = min(needed, m_max)
        kept[k - 1] = keep
        discarded[k - 1] = float(np.sum(p[keep:]))
        capped[k - 1] = needed > m_max
        tensors[k] = vt[:keep].reshape(keep, PHYS_DIM, r)
        tensors[k - 1] = np.tensordot(tensors[k - 1], u[:, :keep] * s[:keep], axes=(2, 0))
    tensors[0] = tensors[0] / np.linalg.norm(tensors[0])
    if any(capped):
        logger.warning("Bond-dimension cap %d bound during truncation", m_max)
    return Mps(tensors, center=0), TruncationReport(kept, discarded, capped)


def _environments(psi: Mps, op: np.ndarray | None = None):
    """Left and right transfer environments of ``<psi|psi>``.

    ``left[k]`` contracts slots ``< k``, ``right[k]`` slots ``> k``.
    """
    n = psi.n
    left = [np.ones((1, 1))]
    for t in psi.tensors[:-1]:
        left.append(oe.contract("ab,asc,bsd->cd", left[-1], t, t))
    right = [np.ones((1, 1))]
    for t in reversed(psi.tensors[1:]):
        right.append(oe.contract("asc,bsd,cd->ab", t, t, right[-1]))
    return left, right[::-1][:n]


def magnetizations(psi: Mps) -> np.ndarray:
    """``<S^z_k>`` per slot, normalised by ``<psi|psi>``."""
    left, right = _environments(psi)
    norm = _inner(psi, psi)
    return np.array(
        [
            oe.contract("ab,asc,st,btd,cd->", left[k], t, SZ, t, right[k]) / norm
            for k, t in enumerate(psi.tensors)
        ]
    )


def zz_correlations(psi: Mps, ref: int) -> np.ndarray:
    """``<S^z_ref S^z_k>`` for every slot ``k`` (``1/4`` at ``k = ref``)."""
    n = psi.n
    left, right = _environments(psi)
    norm = _inner(psi, psi)
    out = np.empty(n)
    out[ref] = 0.25

    t = psi.tensors[ref]
    env = oe.contract("ab,asc,st,btd->cd", left[ref], t, SZ, t)
    for k in range(ref + 1, n):
        t = psi.tensors[k]
        out[k] = oe.contract("ab,asc,st,btd,cd->", env, t, SZ, t, right[k]) / norm
        env = oe.contract("ab,asc,bsd->cd", env, t, t)

    t = psi.tensors[ref]
    env = oe.contract("asc,st,btd,cd->ab", t, SZ, t, right[ref])
    for k in range(ref - 1, -1, -1):
        t = psi.tensors[k]
        out[k] = oe.contract("ab,asc,st,btd,cd->", left[k], t, SZ, t, env) / norm
        env = oe.contract("asc,bsd,cd->ab", t, t, env)
    return out


def readout_z(psi: Mps, path: SitePath | None = None) -> SpinConfiguration:
    """Classical configuration read from the S^z structure of ``psi``.

    The reference slot ``r`` is the most polarized one, with sign
    ``sign(<S^z_r>)`` (+1 when ``|<S^z_r>| < 1e-12``). Every other slot takes
    ``sign(<S^z_r S^z_k>)`` relative to it, falling back to ``sign(<S^z_k>)``
    and then +1 when the correlation ties. The correlation sign can differ
    from ``sign(<S^z_k>)`` on a weakly polarized mixed state, where it follows
    the dominant two-point structure; on a flip-symmetric cat it still yields
    one sector.

    Args:
        psi: Normalised state.
        path: Slot-to-spin mapping; identity when omitted.

    Returns:
        Configuration indexed by original spin.
    """
    path = path or identity_path(psi.n)
    if len(path) != psi.n:
        raise DimensionError(f"Path has {len(path)} slots, state has {psi.n} sites")

    mz = magnetizations(psi)
    # below the tie tolerance every slot counts as unpolarized, so ref falls to slot 0
    ref = int(np.argmax(np.where(np.abs(mz) < TIE_TOL, 0.0, np.abs(mz))))
    ref_sign = 1 if mz[ref] >= -TIE_TOL else -1
    corr = zz_correlations(psi, ref)

    slots = np.empty(psi.n, dtype=np.int64)
    for k in range(psi.n):
        if k == ref:
            slots[k] = ref_sign
        elif abs(corr[k]) >= TIE_TOL:
            slots[k] = ref_sign * (1 if corr[k] > 0 else -1)
        else:
            slots[k] = 1 if mz[k] >= -TIE_TOL else -1

    values = np.empty(psi.n, dtype=np.int64)
    values[list(path.order)] = slots
    return SpinConfiguration(tuple(values.tolist()))


def mps_to_dict(psi: Mps) -> dict:
    """Nested-list dump for debugging; not a stable format."""
    return {
        "n": psi.n,
        "center": psi.center,
        "bond_dims": list(psi.bond_dims),
        "tensors": [t.tolist() for t in psi.tensors],
    }


def mps_from_dict(data: dict) -> Mps:
    return Mps([np.array(t, dtype=float) for t in data["tensors"]], data.get("center"))
