"""Spin-glass problem instances on chains, grids and random regular graphs.

An instance is a coupling graph ``J_ij`` over ``n`` Ising spins. Its classical
energy for a configuration ``sigma`` in {-1, +1}^n is

    E(sigma) = - sum_{(i, j)} J_ij sigma_i sigma_j

with no spin-operator 1/4 factor.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from qwa_sim.errors import (
    DimensionError,
    GraphConstructionError,
    InvalidInputError,
    InvalidInstanceError,
    InvalidSizeError,
)
from qwa_sim.rng import SplitMix64

logger = logging.getLogger(__name__)

KINDS = ("chain", "grid", "regular", "custom")
DISTRIBUTIONS = ("pm1", "gaussian", "ferro")

# Pairing-model attempts before a regular graph is declared infeasible
MAX_PAIRING_ATTEMPTS = 10_000

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class GraphInstance:
    """Immutable coupling graph.

    Attributes:
        n: Number of spins.
        edges: ``(i, j, J_ij)`` triples with ``i < j``, sorted by ``(i, j)``.
        kind: One of ``chain``, ``grid``, ``regular``, ``custom``.
        params: Size parameters (``n`` for chain/regular, ``w``/``h`` for grid,
            ``d`` for regular).
        dist: Coupling distribution name.
        seed: Generator seed (0 for hand-built instances).
    """

    n: int
    edges: tuple[Edge, ...]
    kind: str = "custom"
    params: dict = field(default_factory=dict, compare=True, hash=False)
    dist: str = "custom"
    seed: int = 0

    def __post_init__(self):
        edges = tuple(
            sorted((int(i), int(j), float(J)) for i, j, J in self.edges)
        )
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "params", dict(self.params))
        _validate(self)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence], **kwargs) -> "GraphInstance":
        """Build a ``custom`` instance from ``(i, j, J)`` triples.

        Pairs given as ``(j, i)`` are normalised to ``i < j``.

        Example:
            >>> GraphInstance.from_edges(2, [(1, 0, 1.0)]).edges
            ((0, 1, 1.0),)
        """
        normalised = [(min(i, j), max(i, j), J) for i, j, J in edges]
        kwargs.setdefault("params", {"n": n})
        return cls(n=n, edges=tuple(normalised), **kwargs)

    @property
    def couplings(self) -> np.ndarray:
        return np.array([J for _, _, J in self.edges], dtype=float)

    @property
    def pairs(self) -> np.ndarray:
        """Edge endpoints as an ``(E, 2)`` integer array."""
        return np.array([(i, j) for i, j, _ in self.edges], dtype=np.int64).reshape(-1, 2)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def to_networkx(self) -> nx.Graph:
        """Undirected graph with ``J`` stored as edge attribute ``weight``.

        Nodes and edges are inserted in index order, so neighbour iteration is
        ascending by vertex index.
        """
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_weighted_edges_from(self.edges)
        return graph

    def to_dict(self) -> dict:
        """JSON-ready mapping matching the instance file format."""
        return {
            "n": self.n,
            "kind": self.kind,
            "params": dict(self.params),
            "dist": self.dist,
            "seed": self.seed,
            "edges": [[i, j, J] for i, j, J in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GraphInstance":
        try:
            return cls(
                n=int(data["n"]),
                edges=tuple((int(i), int(j), float(J)) for i, j, J in data["edges"]),
                kind=str(data.get("kind", "custom")),
                params=dict(data.get("params", {})),
                dist=str(data.get("dist", "custom")),
                seed=int(data.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInstanceError):
                raise
            raise InvalidInstanceError(f"Malformed instance data: {exc}") from exc


@dataclass(frozen=True)
class SpinConfiguration:
    """Classical Ising configuration, one entry in {-1, +1} per spin."""

    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if any(v not in (-1, 1) for v in values):
            raise InvalidInputError(f"Spin values must be +1 or -1, got {values}")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def __neg__(self) -> "SpinConfiguration":
        return SpinConfiguration(tuple(-v for v in self.values))

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int64)


def _validate(inst: GraphInstance) -> None:
    if inst.n < 1:
        raise InvalidSizeError(f"Instance needs at least one spin, got n={inst.n}")
    if inst.kind not in KINDS:
        raise InvalidInstanceError(f"Unknown instance kind {inst.kind!r}")

    seen = set()
    for i, j, J in inst.edges:
        if not 0 <= i < j < inst.n:
            raise InvalidInstanceError(f"Edge ({i}, {j}) must satisfy 0 <= i < j < n={inst.n}")
        if (i, j) in seen:
            raise InvalidInstanceError(f"Duplicate edge ({i}, {j})")
        if not np.isfinite(J):
            raise InvalidInstanceError(f"Coupling on ({i}, {j}) is not finite: {J}")
        seen.add((i, j))

    if inst.kind == "chain":
        expected = {(i, i + 1) for i in range(inst.n - 1)}
        if seen != expected:
            raise InvalidInstanceError("Chain instance must have exactly the edges (i, i+1)")
    elif inst.kind == "grid":
        w, h = int(inst.params.get("w", 0)), int(inst.params.get("h", 0))
        if w * h != inst.n or seen != set(_grid_pairs(w, h)):
            raise InvalidInstanceError(f"Grid instance must be the {w}x{h} nearest-neighbour lattice")
    elif inst.kind == "regular":
        d = int(inst.params.get("d", 0))
        if np.any(inst.degrees() != d):
            raise InvalidInstanceError(f"Regular instance must have every degree equal to {d}")


def _grid_pairs(w: int, h: int) -> list[tuple[int, int]]:
    """Nearest-neighbour pairs on a w x h lattice, site index y * w + x."""
    pairs = []
    for y in range(h):
        for x in range(w):
            i = y * w + x
            if x < w - 1:
                pairs.append((i, i + 1))
            if y < h - 1:
                pairs.append((i, i + w))
    return pairs


def _regular_pairs(n: int, d: int, rng: SplitMix64) -> list[tuple[int, int]]:
    """Configuration-model pairing, rejecting self-loops and multi-edges."""
    for attempt in range(MAX_PAIRING_ATTEMPTS):
        points = [v for v in range(n) for _ in range(d)]
        rng.shuffle(points)
        pairs = set()
        ok = True
        for k in range(0, len(points), 2):
            a, b = points[k], points[k + 1]
            if a == b or (min(a, b), max(a, b)) in pairs:
                ok = False
                break
            pairs.add((min(a, b), max(a, b)))
        if ok:
            logger.debug("Regular graph n=%d d=%d built after %d attempt(s)", n, d, attempt + 1)
            return sorted(pairs)
    raise GraphConstructionError(
        f"No simple {d}-regular graph on {n} vertices after {MAX_PAIRING_ATTEMPTS} pairings"
    )


def _draw_coupling(dist: str, rng: SplitMix64) -> float:
    if dist == "pm1":
        return float(rng.next_sign())
    if dist == "gaussian":
        return rng.next_gaussian()
    return 1.0


def generate_instance(kind: str, params: dict, dist: str, seed: int) -> GraphInstance:
    """Generate a seeded spin-glass instance.

    Topology is drawn first (regular graphs only), then one coupling per edge in
    sorted ``(i, j)`` order, all from a single SplitMix64 stream.

    Args:
        kind: ``chain`` (params ``n``), ``grid`` (params ``w``, ``h``) or
            ``regular`` (params ``n``, ``d``).
        params: Size parameters for the kind.
        dist: ``pm1`` (uniform on {-1, +1}), ``gaussian`` (standard normal) or
            ``ferro`` (every J = 1).
        seed: Unsigned 64-bit seed.

    Returns:
        A validated GraphInstance.

    Raises:
        InvalidSizeError: Fewer than two spins or a non-positive side.
        GraphConstructionError: Infeasible regular-graph parameters.

    Example:
        >>> inst = generate_instance("chain", {"n": 3}, "pm1", seed=7)
        >>> [(i, j) for i, j, _ in inst.edges]
        [(0, 1), (1, 2)]
    """
    if dist not in DISTRIBUTIONS:
        raise InvalidInstanceError(f"Unknown coupling distribution {dist!r}")
    rng = SplitMix64(seed)

    if kind == "chain":
        n = int(params.get("n", 0))
        if n < 2:
            raise InvalidSizeError(f"Chain needs at least 2 spins, got n={n}")
        pairs = [(i, i + 1) for i in range(n - 1)]
        params = {"n": n}
    elif kind == "grid":
        w, h = int(params.get("w", 0)), int(params.get("h", 0))
        if w < 1 or h < 1 or w * h < 2:
            raise InvalidSizeError(f"Grid needs positive sides and at least 2 spins, got {w}x{h}")
        n = w * h
        pairs = sorted(_grid_pairs(w, h))
        params = {"w": w, "h": h}
    elif kind == "regular":
        n, d = int(params.get("n", 0)), int(params.get("d", 0))
        if n < 2:
            raise InvalidSizeError(f"Regular graph needs at least 2 spins, got n={n}")
        if d < 3 or d >= n or (n * d) % 2:
            raise GraphConstructionError(
                f"No simple {d}-regular graph on {n} vertices (need 3 <= d < n and n*d even)"
            )
        pairs = _regular_pairs(n, d, rng)
        params = {"n": n, "d": d}
    else:
        raise InvalidInstanceError(f"Cannot generate instances of kind {kind!r}")

    edges = tuple((i, j, _draw_coupling(dist, rng)) for i, j in pairs)
    return GraphInstance(n=n, edges=edges, kind=kind, params=params, dist=dist, seed=seed)


def classical_energy(inst: GraphInstance, config: SpinConfiguration | Sequence[int]) -> float:
    """Classical spin-glass energy ``-sum J_ij sigma_i sigma_j``.

    Raises:
        DimensionError: Configuration length differs from ``inst.n``.
    """
    sigma = config.as_array() if isinstance(config, SpinConfiguration) else np.asarray(config)
    if sigma.shape != (inst.n,):
        raise DimensionError(f"Configuration has {sigma.size} spins, instance has {inst.n}")
    if not inst.edges:
        return 0.0
    pairs = inst.pairs
    return float(-np.sum(inst.couplings * sigma[pairs[:, 0]] * sigma[pairs[:, 1]]))


def disjoint_union(a: GraphInstance, b: GraphInstance) -> GraphInstance:
    """Place ``b`` after ``a``: spins of ``b`` are shifted by ``a.n``."""
    shifted = [(i + a.n, j + a.n, J) for i, j, J in b.edges]
    return GraphInstance.from_edges(a.n + b.n, list(a.edges) + shifted)


def relabel(inst: GraphInstance, perm: Sequence[int]) -> GraphInstance:
    """Rename spin ``i`` to ``perm[i]``."""
    perm = list(perm)
    if sorted(perm) != list(range(inst.n)):
        raise InvalidInstanceError(f"Relabeling must be a permutation of 0..{inst.n - 1}")
    edges = [(perm[i], perm[j], J) for i, j, J in inst.edges]
    return GraphInstance.from_edges(inst.n, edges)

