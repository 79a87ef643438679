"""Undirected simple graphs over agents, vertex covers, distances, and core/outer shape validators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import BadSize, InvalidInstance, NotAdditive, ShapeMismatch, TooLarge
from .model import Additive, Instance, are_consistent

EXACT_COVER_BOUND = 20
SHAPE_SEARCH_BOUND = 16


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset

    def __post_init__(self):
        norm = set()
        for e in self.edges:
            i, j = (int(x) for x in e)
            if i == j:
                raise InvalidInstance(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidInstance(f"edge ({i}, {j}) leaves vertex range 0..{self.n - 1}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        edges = [tuple(e) for e in edges]
        keys = [(min(e), max(e)) for e in edges]
        if len(set(keys)) != len(keys):
            raise InvalidInstance("duplicate edge")
        return cls(n, frozenset(keys))

    def neighbors(self, v: int) -> frozenset:
        return frozenset(j if i == v else i for i, j in self.edges if v in (i, j))

    def adjacency(self) -> list:
        adj: list = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def induced(self, vertices: Iterable[int]) -> frozenset:
        vs = set(vertices)
        return frozenset(e for e in self.edges if e[0] in vs and e[1] in vs)

    def sorted_edges(self) -> list:
        return sorted(self.edges)


def make_path(n: int) -> Graph:
    if n < 1:
        raise BadSize(f"path needs n >= 1, got {n}")
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def make_star(n: int) -> Graph:
    """K_{1,n-1} with centre 0."""
    if n < 1:
        raise BadSize(f"star needs n >= 1, got {n}")
    return Graph(n, frozenset((0, i) for i in range(1, n)))


def make_complete(n: int) -> Graph:
    if n < 1:
        raise BadSize(f"complete graph needs n >= 1, got {n}")
    return Graph(n, frozenset(combinations(range(n), 2)))


def hiddennottight_layout(n: int) -> dict:
    """Vertex roles of :func:`make_hiddennottight_graph` (0-based).

    Vertex ``k`` here is vertex ``k + 1`` in the usual 1-based drawing.
    """
    if n < 3:
        raise BadSize(f"construction needs n >= 3, got {n}")
    a = math.ceil((n - 1) / 2)
    b = (n - 1) // 2
    return {
        "center": 0,
        "leaves": list(range(1, a)),
        "bridge": a,
        "clique": list(range(a + 1, a + 1 + b)),
    }


def make_hiddennottight_graph(n: int) -> Graph:
    """Star K_{1,ceil((n-1)/2)-1} whose centre also reaches a bridge vertex hanging off a clique K_{floor((n-1)/2)}."""
    lay = hiddennottight_layout(n)
    c, bridge, clique = lay["center"], lay["bridge"], lay["clique"]
    edges = {(c, leaf) for leaf in lay["leaves"]}
    edges.add((c, bridge))
    edges.add((bridge, clique[0]))
    edges.update(combinations(clique, 2))
    return Graph(n, frozenset(edges))


def connected_components(G: Graph) -> list:
    adj = G.adjacency()
    seen = [False] * G.n
    comps = []
    for s in range(G.n):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], {s}
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.add(w)
                    stack.append(w)
        comps.append(frozenset(comp))
    return comps


def is_vertex_cover(G: Graph, cover: Iterable[int], edges: Iterable | None = None) -> bool:
    cover = set(cover)
    edges = G.edges if edges is None else edges
    return all(i in cover or j in cover for i, j in edges)


def vertex_cover_2approx(G: Graph) -> frozenset:
    """Both endpoints of a greedy maximal matching (edges scanned in sorted order)."""
    cover: set = set()
    for i, j in G.sorted_edges():
        if i not in cover and j not in cover:
            cover.update((i, j))
    return frozenset(cover)


def min_vertex_cover_exact(G: Graph, bound: int = EXACT_COVER_BOUND) -> frozenset:
    """Minimum vertex cover by branching on an uncovered edge.

    A greedy matching on the uncovered edges gives the lower bound used for
    pruning.
    """
    if G.n > bound:
        raise TooLarge(f"exact vertex cover limited to {bound} vertices, graph has {G.n}")
    edges = G.sorted_edges()
    best = [frozenset(vertex_cover_2approx(G))]

    def matching_bound(remaining):
        used: set = set()
        size = 0
        for i, j in remaining:
            if i not in used and j not in used:
                used.update((i, j))
                size += 1
        return size

    def rec(cover: frozenset, remaining: list):
        if not remaining:
            if len(cover) < len(best[0]):
                best[0] = cover
            return
        if len(cover) + matching_bound(remaining) >= len(best[0]):
            return
        u, v = remaining[0]
        for w in (u, v):
            rec(cover | {w}, [e for e in remaining if w not in e])

    rec(frozenset(), edges)
    return best[0]


def all_pairs_distance(G: Graph) -> list:
    """Hop distances by Floyd-Warshall; ``math.inf`` marks disconnected pairs."""
    n = G.n
    d = [[0 if i == j else math.inf for j in range(n)] for i in range(n)]
    for i, j in G.edges:
        d[i][j] = d[j][i] = 1
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik == math.inf:
                continue
            di = d[i]
            for j in range(n):
                if dik + dk[j] < di[j]:
                    di[j] = dik + dk[j]
    return d


def diameter(G: Graph, dist: list | None = None):
    """Largest finite distance (0 for a single vertex)."""
    dist = all_pairs_distance(G) if dist is None else dist
    return max((x for row in dist for x in row if x != math.inf), default=0)


# --- core/outer shapes ----------------------------------------------------------


@dataclass(frozen=True)
class CoreStructure:
    core_groups: tuple
    outer: frozenset

    def __post_init__(self):
        object.__setattr__(self, "core_groups", tuple(frozenset(g) for g in self.core_groups))
        object.__setattr__(self, "outer", frozenset(self.outer))

    @property
    def core(self) -> frozenset:
        return frozenset().union(*self.core_groups)

    def group_index(self, agent: int) -> int:
        for k, g in enumerate(self.core_groups):
            if agent in g:
                return k
        raise KeyError(agent)

    def outer_group(self, G: Graph, agent: int) -> int | None:
        """Index of the group holding the outer agent's whole neighbourhood (``None`` if isolated)."""
        nbd = G.neighbors(agent)
        if not nbd:
            return None
        for k, g in enumerate(self.core_groups):
            if nbd <= g:
                return k
        raise ShapeMismatch(f"outer agent {agent} has neighbours in several groups")


def _valuation_classes(inst: Instance, agents: Iterable[int]) -> list:
    classes: dict = {}
    for i in sorted(agents):
        classes.setdefault(inst.valuations[i], []).append(i)
    return [frozenset(c) for c in sorted(classes.values(), key=min)]


def _check_core(inst: Instance, G: Graph, core: frozenset, mode: int) -> CoreStructure:
    if not core:
        raise ShapeMismatch("core is empty")
    outer = frozenset(range(G.n)) - core
    inner = G.induced(outer)
    if inner:
        i, j = min(inner)
        raise ShapeMismatch(f"outer agents {i} and {j} are adjacent, so the outer set is not independent")
    groups = _valuation_classes(inst, core)
    if mode == 1 and len(groups) > 1:
        raise ShapeMismatch(f"core agents do not share one valuation ({len(groups)} distinct)")
    if mode == 3 and len(groups) > 2:
        raise ShapeMismatch(f"core has {len(groups)} valuation types, at most two allowed")
    if mode == 2:
        for i in sorted(core):
            if not isinstance(inst.valuations[i], Additive):
                raise ShapeMismatch(f"core agent {i} is not additive")
        for g1, g2 in combinations(groups, 2):
            a, b = min(g1), min(g2)
            if not are_consistent(inst, (a, b)):
                raise ShapeMismatch(f"core agents {a} and {b} have inconsistent valuations")
    structure = CoreStructure(tuple(groups), outer)
    if mode != 1:
        for i in sorted(outer):
            nbd = G.neighbors(i)
            if nbd and not any(nbd <= g for g in groups):
                raise ShapeMismatch(
                    f"outer agent {i} is adjacent to agents {sorted(nbd)} from different valuation groups"
                )
    return structure


def _validate(inst: Instance, G: Graph, core, mode: int) -> CoreStructure:
    if G.n != inst.n:
        raise ShapeMismatch(f"graph has {G.n} vertices, instance has {inst.n} agents")
    if core is not None:
        return _check_core(inst, G, frozenset(core), mode)
    if mode == 1:
        candidates = sorted(_valuation_classes(inst, range(inst.n)), key=lambda c: (-len(c), sorted(c)))
    else:
        if inst.n > SHAPE_SEARCH_BOUND:
            raise TooLarge(f"core search limited to {SHAPE_SEARCH_BOUND} agents")
        candidates = (
            frozenset(c) for k in range(inst.n, 0, -1) for c in combinations(range(inst.n), k)
        )
    first_reason = None
    for cand in candidates:
        try:
            return _check_core(inst, G, cand, mode)
        except ShapeMismatch as exc:
            first_reason = first_reason or f"core {sorted(cand)}: {exc.reason}"
    raise ShapeMismatch(f"no admissible core; largest candidate rejected ({first_reason})")


def validate_thm1_shape(inst: Instance, G: Graph, core: Iterable[int] | None = None) -> CoreStructure:
    """Core of identical valuations whose complement is an independent set."""
    return _validate(inst, G, core, 1)


def validate_thm2_shape(inst: Instance, G: Graph, core: Iterable[int] | None = None) -> CoreStructure:
    """Consistent additive core split into identical groups; each outer neighbourhood inside one group."""
    if core is not None:
        bad = [i for i in core if not isinstance(inst.valuations[i], Additive)]
        if bad:
            raise NotAdditive(f"agents {bad} are not additive")
    return _validate(inst, G, core, 2)


def validate_thm3_shape(inst: Instance, G: Graph, core: Iterable[int] | None = None) -> CoreStructure:
    """Core with at most two valuation types; each outer neighbourhood inside one type."""
    return _validate(inst, G, core, 3)
