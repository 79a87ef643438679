"""Hidden-envy allocations: vertex-cover round robin, picking sequences, minimum hidden sets."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import BadSize, ChoresUnsupported, NotACover, NotAdditive, OrderTooShort, SearchExhausted, TooLarge
from .graphs import Graph, hiddennottight_layout, is_vertex_cover, make_hiddennottight_graph
from .model import (
    Additive,
    Allocation,
    HiddenSet,
    Instance,
    Item,
    bundle_value,
    check_partition,
    is_g_hef,
)

HIDDEN_SEARCH_BOUND = 18


def _require_additive_goods(inst: Instance) -> None:
    if not inst.goods_only:
        raise ChoresUnsupported("hidden-envy constructions are defined for goods only")
    if not inst.is_additive():
        raise NotAdditive("picking protocols need additive valuations")


def pick_log(inst: Instance, order: Iterable[int]) -> list:
    """Run a picking sequence and return ``(agent, good)`` pairs until the goods run out.

    Each agent takes a most valuable remaining good, lowest id on ties.
    """
    _require_additive_goods(inst)
    left = set(range(inst.m))
    picks = []
    for a in order:
        if not left:
            break
        vals = inst.valuations[a].values
        g = min(left, key=lambda x: (-vals[x], x))
        left.remove(g)
        picks.append((a, g))
    return picks


def _allocation_from_picks(n: int, picks: list) -> Allocation:
    bundles: list = [set() for _ in range(n)]
    for a, g in picks:
        bundles[a].add(g)
    return Allocation(tuple(bundles))


def picking_sequence(inst: Instance, order: Sequence[int]) -> Allocation:
    if len(order) < inst.m:
        raise OrderTooShort(f"order has {len(order)} turns for {inst.m} goods")
    X = _allocation_from_picks(inst.n, pick_log(inst, order))
    check_partition(inst, X)
    return X


def vcrr_order(component: Iterable[int], cover: Iterable[int], m: int) -> list:
    """Cover members first (ascending), then the rest of the component, repeated for enough rounds."""
    cover = sorted(cover)
    rest = sorted(set(component) - set(cover))
    per_round = cover + rest
    rounds = math.ceil(m / len(per_round)) if per_round else 0
    return per_round * rounds


def vertex_cover_round_robin(inst: Instance, G: Graph, component: Iterable[int], C: Iterable[int]):
    """Round robin inside one component with the cover ``C`` picking first each round.

    Agents outside ``component`` get nothing.  The hidden set is the first
    good each cover member picked.  Returns ``(allocation, hidden_set)``.
    """
    _require_additive_goods(inst)
    component, C = frozenset(component), frozenset(C)
    if not component:
        raise BadSize("component is empty")
    if not C <= component:
        raise NotACover(f"cover vertices {sorted(C - component)} lie outside the component")
    if not is_vertex_cover(G, C, G.induced(component)):
        raise NotACover(f"{sorted(C)} does not cover the component's edges")
    picks = pick_log(inst, vcrr_order(component, C, inst.m))
    X = _allocation_from_picks(inst.n, picks)
    check_partition(inst, X)
    first: dict = {}
    for a, g in picks:
        first.setdefault(a, g)
    S = HiddenSet(first[a] for a in C if a in first)
    if not is_g_hef(inst, X, G, S, uniform=True):
        raise AssertionError("vertex-cover round robin failed its own hidden-envy check")
    return X, S


def hiddennottight_protocol(inst: Instance, n: int | None = None):
    """Two hidden goods suffice on the star-bridge-clique graph despite a large vertex cover.

    Needs ``m == n``.  Returns ``(graph, allocation, hidden_set)``.
    """
    n = inst.n if n is None else n
    if n != inst.n or inst.m != n:
        raise BadSize(f"protocol needs n agents and n goods (n={n}, agents={inst.n}, goods={inst.m})")
    lay = hiddennottight_layout(n)
    G = make_hiddennottight_graph(n)
    a = lay["bridge"]
    b = len(lay["clique"])
    order = list(range(a)) + [a] + list(range(b))
    picks = pick_log(inst, order)
    X = _allocation_from_picks(n, picks)
    check_partition(inst, X)
    centre_first = next(g for ag, g in picks if ag == lay["center"])
    (bridge_good,) = X[a]
    S = HiddenSet({centre_first, bridge_good})
    if not is_g_hef(inst, X, G, S, uniform=True):
        raise AssertionError("protocol output failed its hidden-envy check")
    return G, X, S


def hide_candidates(inst: Instance, X: Allocation, G: Graph) -> frozenset:
    """Goods in a bundle that is envied along some edge; hiding anything else cannot help."""
    out: set = set()
    for a, b in G.edges:
        for i, j in ((a, b), (b, a)):
            if bundle_value(inst, i, X[j]) > bundle_value(inst, i, X[i]):
                out |= X[j]
    return frozenset(out)


def min_hidden_set(inst: Instance, X: Allocation, G: Graph, uniform: bool = False,
                   bound: int = HIDDEN_SEARCH_BOUND) -> HiddenSet:
    """A smallest hidden set certifying (u)HEF along ``G``; subsets tried by size, then lexicographically."""
    if not inst.goods_only:
        raise ChoresUnsupported("hidden envy is only defined for goods")
    cand = sorted(hide_candidates(inst, X, G))
    if len(cand) > bound:
        raise TooLarge(f"{len(cand)} candidate goods exceed the search bound {bound}")
    owner = {g: i for i, b in enumerate(X) for g in b}
    for k in range(len(cand) + 1):
        for S in combinations(cand, k):
            if uniform and len({owner[g] for g in S}) < k:
                continue
            if is_g_hef(inst, X, G, S, uniform=uniform):
                return HiddenSet(S)
    if uniform:
        raise SearchExhausted("no hidden set with at most one good per bundle removes the envy")
    raise AssertionError("hiding every candidate good must remove all edge envy")


# --- lower-bound family ---------------------------------------------------------


def lower_bound_values(m: int) -> list:
    """``1 + 2**-j`` for ``j = 1..m``."""
    return [1 + Fraction(1, 2**j) for j in range(1, m + 1)]


def gen_lower_bound_instance(G: Graph, scale: int | None = None) -> Instance:
    """Identical additive agents on ``G`` valuing good ``j`` (1-based) at ``1 + 2**-j``; ``n**3`` goods unless scaled."""
    m = G.n**3 if scale is None else scale
    vals = lower_bound_values(m)
    return Instance(G.n, tuple(Item(g) for g in range(m)), tuple(Additive(tuple(vals)) for _ in range(G.n)))


def size_bounds_hold(inst: Instance, S: Iterable[int], agent: int = 0) -> bool:
    """``|S| < v(S) < |S| + 1``, read as ``v(S) = 0`` for the empty set."""
    S = frozenset(S)
    v = bundle_value(inst, agent, S)
    if not S:
        return v == 0
    return len(S) < v < len(S) + 1


def values_distinct(inst: Instance, subsets: Iterable[Iterable[int]], agent: int = 0) -> bool:
    seen: set = set()
    for S in subsets:
        v = bundle_value(inst, agent, S)
        if v in seen:
            return False
        seen.add(v)
    return True
