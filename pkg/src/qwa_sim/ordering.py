"""DMRG paths: the 1D order in which spins are laid out for sweeping.

A path is a permutation ``order`` where ``order[k]`` is the original spin
placed at chain slot ``k``. Path quality is measured by graph bandwidth,
the longest stretch of any coupling along the chain.
"""

import itertools
from dataclasses import dataclass
from typing import Sequence

import networkx as nx
import numpy as np

from qwa_sim.errors import InvalidInputError, InvalidSizeError
from qwa_sim.instance import GraphInstance

# equal-degree groups up to this size are searched in every order
TIE_GROUP_LIMIT = 4
# branching expansions per component before falling back to index order
SEARCH_BUDGET = 100_000
TIE_SEARCH_MAX_N = 400


@dataclass(frozen=True)
class SitePath:
    """Permutation mapping chain slots to original spins."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(v) for v in self.order)
        if sorted(order) != list(range(len(order))):
            raise InvalidInputError(f"Path {order} is not a permutation of 0..{len(order) - 1}")
        object.__setattr__(self, "order", order)

    def __len__(self) -> int:
        return len(self.order)

    @property
    def positions(self) -> np.ndarray:
        """``positions[i]`` is the slot holding original spin ``i``."""
        pos = np.empty(len(self.order), dtype=np.int64)
        pos[list(self.order)] = np.arange(len(self.order))
        return pos

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.order)


def identity_path(n: int) -> SitePath:
    if n < 1:
        raise InvalidSizeError(f"Path needs at least one site, got n={n}")
    return SitePath(tuple(range(n)))


def parse_path(text: str, n: int) -> SitePath:
    """Parse a comma-separated permutation such as ``"2,0,1"``."""
    try:
        order = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise InvalidInputError(f"Path {text!r} is not a comma-separated list of integers") from exc
    if len(order) != n:
        raise InvalidInputError(f"Path {text!r} has {len(order)} entries, instance has {n} spins")
    return SitePath(order)


def bandwidth(inst: GraphInstance, path: SitePath) -> int:
    """Largest ``|position(i) - position(j)|`` over the edges (0 without edges)."""
    if len(path) != inst.n:
        raise InvalidInputError(f"Path has {len(path)} slots, instance has {inst.n} spins")
    if not inst.edges:
        return 0
    pos = path.positions
    pairs = inst.pairs
    return int(np.max(np.abs(pos[pairs[:, 0]] - pos[pairs[:, 1]])))


class _LayeringSearch:
    """Depth-first search over Cuthill-McKee layerings of one component.

    Children of a parent are queued by increasing degree. Instead of breaking
    degree ties by vertex index, every order of an equal-degree group is
    tried, so the narrowest width found is a property of the graph and not of
    its labels. The index order is explored first. Once ``budget`` expansions
    are spent only the index order is followed.
    """

    def __init__(self, graph: nx.Graph, budget: int):
        self.graph = graph
        self.degree = dict(graph.degree)
        self.budget = budget
        self.best_order: list[int] | None = None
        self.best_width: int | None = None

    def search(self, start: int) -> None:
        self._expand([start], {start: 0}, 0, 0)

    def _arrangements(self, children: list[int]) -> list[tuple[int, ...]]:
        groups = [
            sorted(group)
            for _, group in itertools.groupby(sorted(children, key=self.degree.get), key=self.degree.get)
        ]
        if self.budget <= 0 or all(len(g) == 1 for g in groups):
            return [tuple(v for g in groups for v in g)]
        choices = [
            list(itertools.permutations(g)) if len(g) <= TIE_GROUP_LIMIT else [tuple(g)] for g in groups
        ]
        return [tuple(v for part in combo for v in part) for combo in itertools.product(*choices)]

    def _place(self, order: list[int], pos: dict[int, int], arrangement, width: int) -> int:
        for v in arrangement:
            p = len(order)
            pos[v] = p
            order.append(v)
            width = max(width, p - min(pos[u] for u in self.graph.neighbors(v) if u in pos and u != v))
        return width

    def _expand(self, order: list[int], pos: dict[int, int], head: int, width: int) -> None:
        placed_here = 0
        while True:
            if self.best_width is not None and width >= self.best_width:
                break
            if head == len(order):
                self.best_order, self.best_width = list(order), width
                break
            parent = order[head]
            head += 1
            children = [v for v in self.graph.neighbors(parent) if v not in pos]
            arrangements = self._arrangements(children)
            if len(arrangements) == 1:
                width = self._place(order, pos, arrangements[0], width)
                placed_here += len(arrangements[0])
                continue

            self.budget -= 1
            for arrangement in arrangements:
                branch_width = self._place(order, pos, arrangement, width)
                self._expand(order, pos, head, branch_width)
                for v in arrangement:
                    order.pop()
                    del pos[v]
            break

        for _ in range(placed_here):
            del pos[order.pop()]


def _component_order(graph: nx.Graph) -> list[int]:
    """Narrowest Cuthill-McKee layering of one connected component.

    Every vertex is tried as the start, smaller vertices first; a later
    layering replaces the current one only when strictly narrower.
    """
    budget = SEARCH_BUDGET if graph.number_of_nodes() <= TIE_SEARCH_MAX_N else 0
    search = _LayeringSearch(graph, budget)
    for start in sorted(graph.nodes):
        search.search(start)
    return search.best_order


def heuristic_path(inst: GraphInstance) -> SitePath:
    """Greedy bandwidth-reducing path.

    Connected components are laid out contiguously, ordered by their smallest
    vertex. The achieved bandwidth does not change when the instance is
    relabelled (for components within the tie-search limits).

    Example:
        >>> from qwa_sim.instance import generate_instance
        >>> grid = generate_instance("grid", {"w": 3, "h": 2}, "pm1", seed=1)
        >>> heuristic_path(grid).order
        (0, 3, 1, 4, 2, 5)
    """
    graph = inst.to_networkx()
    order: list[int] = []
    for component in sorted(nx.connected_components(graph), key=min):
        order.extend(_component_order(graph.subgraph(component)))
    return SitePath(tuple(order))


def resolve_path(inst: GraphInstance, spec: str | Sequence[int] | SitePath | None) -> SitePath:
    """Turn a CLI-style path spec into a SitePath.

    Args:
        spec: ``"identity"``, ``"heuristic"`` (also the default for None), an
            explicit permutation string, a sequence, or a SitePath.
    """
    if isinstance(spec, SitePath):
        path = spec
    elif spec is None or spec == "heuristic":
        path = heuristic_path(inst)
    elif spec == "identity":
        path = identity_path(inst.n)
    elif isinstance(spec, str):
        path = parse_path(spec, inst.n)
    else:
        path = SitePath(tuple(spec))
    if len(path) != inst.n:
        raise InvalidInputError(f"Path has {len(path)} slots, instance has {inst.n} spins")
    return path
