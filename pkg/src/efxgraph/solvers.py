"""Complete-graph EFX subroutines, the two-agent cut-and-choose step, and exact search.

Every constructor re-checks its result with the predicates in
:mod:`efxgraph.model` before returning; nothing is trusted by construction.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import lcm
from typing import Iterable, Iterator, Sequence

from .errors import (
    BudgetExceeded,
    ChoresUnsupported,
    InvalidInstance,
    NotAdditive,
    NotConsistent,
    SearchExhausted,
)
from .model import (
    Additive,
    Allocation,
    Instance,
    Lexicographic,
    Table,
    are_consistent,
    check_partition,
    is_efx,
    is_g_efx,
    prefers,
    strongly_envies,
    to_fraction,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7


def _sort_desc(items: Iterable[int], values: Sequence[Fraction]) -> list:
    return sorted(items, key=lambda g: (-values[g], g))


def local_efx(X_i, X_j, v_cutter, v_chooser) -> tuple:
    """Cut-and-choose between two additive agents.

    The cutter fills two bags greedily (items in decreasing cutter value, each
    to the bag the cutter currently values less); the chooser takes the bag it
    values more and the cutter keeps the other.  Returns
    ``(cutter_bundle, chooser_bundle)``.
    """
    if not isinstance(v_cutter, Additive) or not isinstance(v_chooser, Additive):
        raise NotAdditive("local_efx needs additive valuations")
    X_i, X_j = frozenset(X_i), frozenset(X_j)
    if X_i & X_j:
        raise InvalidInstance("input bundles overlap")
    bags: list = [[], []]
    worth = [Fraction(0), Fraction(0)]
    for g in _sort_desc(X_i | X_j, v_cutter.values):
        k = 0 if worth[0] <= worth[1] else 1
        bags[k].append(g)
        worth[k] += v_cutter.values[g]
    Y1, Y2 = frozenset(bags[0]), frozenset(bags[1])
    if v_chooser.value(Y1) >= v_chooser.value(Y2):
        return Y2, Y1
    return Y1, Y2


def efx_identical_additive(values: Sequence, n: int) -> list:
    """Greedy bag filling for ``n`` agents sharing one additive valuation."""
    values = [to_fraction(v) for v in values]
    bags: list = [set() for _ in range(n)]
    worth = [Fraction(0)] * n
    for g in _sort_desc(range(len(values)), values):
        k = min(range(n), key=lambda b: (worth[b], b))
        bags[k].add(g)
        worth[k] += values[g]
    bundles = [frozenset(b) for b in bags]
    copies = Instance.additive([values] * n)
    if not is_efx(copies, Allocation(bundles)):
        raise AssertionError("greedy bag filling produced a non-EFX split")
    return bundles


def _sub_instance(inst: Instance, agents: Sequence[int]) -> Instance:
    return inst.with_valuations([inst.valuations[a] for a in agents])


def _common_order(inst: Instance, agents: Sequence[int], reverse: bool = True) -> list:
    """A single item order compatible with every agent's ranking (ties broken agent by agent, then by id)."""
    vals = [inst.valuations[a].values for a in agents]
    sign = -1 if reverse else 1
    return sorted(range(inst.m), key=lambda g: tuple(sign * v[g] for v in vals) + (g,))


def _envy_graph(sub: Instance, bundles: list) -> list:
    n = sub.n
    return [[j for j in range(n) if j != i and prefers(sub, i, bundles[j], bundles[i])] for i in range(n)]


def _walk_to_cycle(step: list) -> list:
    """Follow ``step`` from agent 0 until a node repeats; return the repeating stretch."""
    seen: dict = {}
    path = []
    u = 0
    while u not in seen:
        seen[u] = len(path)
        path.append(u)
        u = step[u]
    return path[seen[u]:]


def envy_cycle_elimination(sub: Instance, order: Sequence[int], chores: bool = False) -> list:
    """Assign items in ``order`` to an unenvied agent (goods) or a non-envious agent (chores).

    When no such agent exists the envy graph has a cycle, and every agent on
    it takes the bundle it envies until one appears.
    """
    n = sub.n
    bundles = [frozenset() for _ in range(n)]
    for g in order:
        while True:
            envies = _envy_graph(sub, bundles)
            if chores:
                free = [i for i in range(n) if not envies[i]]
            else:
                envied = {j for row in envies for j in row}
                free = [i for i in range(n) if i not in envied]
            if free:
                break
            if chores:
                cycle = _walk_to_cycle([row[0] for row in envies])
                # each agent envies the next one on the cycle
                takes = {u: cycle[(t + 1) % len(cycle)] for t, u in enumerate(cycle)}
            else:
                enviers = [min(i for i in range(n) if j in envies[i]) for j in range(n)]
                cycle = _walk_to_cycle(enviers)
                # each agent envies the previous one on the cycle
                takes = {u: cycle[t - 1] for t, u in enumerate(cycle)}
            old = list(bundles)
            for u, v in takes.items():
                bundles[u] = old[v]
        k = free[0]
        bundles[k] = bundles[k] | {g}
    return bundles


def efx_consistent_additive(inst: Instance, agents: Sequence[int] | None = None, budget: int = DEFAULT_BUDGET) -> list:
    """Complete EFX split among consistent additive ``agents``; one bundle per agent, in order."""
    agents = list(range(inst.n)) if agents is None else list(agents)
    if not inst.goods_only:
        raise ChoresUnsupported("use efx_consistent_chores for chores")
    if not are_consistent(inst, agents):
        raise NotConsistent(f"agents {agents} do not rank the goods consistently")
    sub = _sub_instance(inst, agents)
    bundles = envy_cycle_elimination(sub, _common_order(inst, agents))
    if not is_efx(sub, Allocation(bundles)):
        log.warning("envy-cycle split not EFX for %s; falling back to search", agents)
        found = search_efx(sub, list(combinations(range(sub.n), 2)), budget=budget)
        if found is None:
            raise SearchExhausted("no EFX allocation found for consistent additive agents")
        bundles = list(found.bundles)
    return bundles


def efx_consistent_chores(inst: Instance, agents: Sequence[int] | None = None, budget: int = DEFAULT_BUDGET) -> list:
    """Complete EFX split of chores among consistent additive ``agents``."""
    agents = list(range(inst.n)) if agents is None else list(agents)
    if not inst.chores_only:
        raise InvalidInstance("efx_consistent_chores needs a chores-only instance")
    if not are_consistent(inst, agents):
        raise NotConsistent(f"agents {agents} do not rank the chores consistently")
    sub = _sub_instance(inst, agents)
    # most burdensome first: ascending value
    bundles = envy_cycle_elimination(sub, _common_order(inst, agents, reverse=False), chores=True)
    if not is_efx(sub, Allocation(bundles)):
        log.warning("envy-cycle chore split not EFX for %s; falling back to search", agents)
        found = search_efx(sub, list(combinations(range(sub.n), 2)), budget=budget)
        if found is None:
            raise SearchExhausted("no EFX chore allocation found")
        bundles = list(found.bundles)
    return bundles


def efx_two_types(inst: Instance, agents: Sequence[int] | None = None, budget: int = DEFAULT_BUDGET) -> list:
    """Complete EFX split among agents holding at most two distinct valuations.

    Cheap constructions are tried first; exhaustive search settles the rest.
    """
    agents = list(range(inst.n)) if agents is None else list(agents)
    types = {inst.valuations[a] for a in agents}
    if len(types) > 2:
        raise InvalidInstance(f"{len(types)} valuation types among {agents}, at most two allowed")
    sub = _sub_instance(inst, agents)
    if len(types) == 1:
        (v,) = types
        if isinstance(v, Additive) and inst.goods_only:
            return efx_identical_additive(v.values, len(agents))
    if sub.is_additive() and inst.goods_only:
        for t in dict.fromkeys(inst.valuations[a] for a in agents):
            order = _sort_desc(range(inst.m), t.values)
            bundles = envy_cycle_elimination(sub, order)
            if is_efx(sub, Allocation(bundles)):
                return bundles
    found = search_efx(sub, list(combinations(range(sub.n), 2)), budget=budget)
    if found is None:
        raise SearchExhausted("no EFX allocation found for two valuation types")
    return list(found.bundles)


def efx_complete_general(inst: Instance, agents: Sequence[int] | None = None, budget: int = DEFAULT_BUDGET) -> list:
    """EFX among ``agents`` on the complete graph for any numeric valuations, by search."""
    agents = list(range(inst.n)) if agents is None else list(agents)
    sub = _sub_instance(inst, agents)
    found = search_efx(sub, list(combinations(range(sub.n), 2)), budget=budget)
    if found is None:
        raise SearchExhausted("no EFX allocation found")
    return list(found.bundles)


# --- exact search ---------------------------------------------------------------


def _integer_scale(values: Sequence[Fraction]) -> list:
    den = lcm(*(v.denominator for v in values)) if values else 1
    return [int(v * den) for v in values]


class _MaskEval:
    """Per-agent exact integer evaluation of item bitmasks, memoised."""

    def __init__(self, inst: Instance, agent: int):
        v = inst.valuations[agent]
        self.m = inst.m
        self.good_bits = [g for g in range(inst.m) if inst.items[g].is_good]
        self.chore_bits = [g for g in range(inst.m) if not inst.items[g].is_good]
        if isinstance(v, Additive):
            w = _integer_scale(v.values)
            self.value = lru_cache(maxsize=None)(lambda mask: sum(w[g] for g in range(self.m) if mask >> g & 1))
        elif isinstance(v, Table):
            t = _integer_scale(v.values)
            self.value = t.__getitem__
        else:
            raise TypeError("lexicographic valuations have no numeric evaluation")
        self.goods_removed = lru_cache(maxsize=None)(self._goods_removed)
        self.chores_removed = lru_cache(maxsize=None)(self._chores_removed)

    def _goods_removed(self, mask: int):
        vals = [self.value(mask & ~(1 << g)) for g in self.good_bits if mask >> g & 1]
        return max(vals) if vals else None

    def _chores_removed(self, mask: int):
        vals = [self.value(mask & ~(1 << c)) for c in self.chore_bits if mask >> c & 1]
        return min(vals) if vals else None

    def strongly_envies(self, own: int, other: int) -> bool:
        gr = self.goods_removed(other)
        if gr is not None and gr > self.value(own):
            return True
        cr = self.chores_removed(own)
        return cr is not None and self.value(other) > cr


def _interchangeable(inst: Instance, pairs: list) -> list:
    """Class id per agent: same valuation and same neighbourhood (ignoring each other)."""
    nbd = [set() for _ in range(inst.n)]
    for i, j in pairs:
        nbd[i].add(j)
        nbd[j].add(i)
    cls = list(range(inst.n))
    for i in range(inst.n):
        for j in range(i):
            if cls[j] == j and inst.valuations[i] == inst.valuations[j] and nbd[i] - {j} == nbd[j] - {i}:
                cls[i] = j
                break
    return cls


def search_efx(inst: Instance, pairs: Sequence, budget: int = DEFAULT_BUDGET) -> Allocation | None:
    """Depth-first search for a complete allocation with no strong envy across ``pairs``.

    Items are placed most valuable first.  For goods-only and chores-only
    numeric instances a branch is cut as soon as some strong envy can no
    longer be undone by the items still unplaced.  Agents that are
    interchangeable (same valuation, same neighbours) are only ever opened in
    index order.  Returns ``None`` once the space is exhausted.
    """
    n, m = inst.n, inst.m
    pairs = [tuple(p) for p in pairs]
    directed = [p for a, b in pairs for p in ((a, b), (b, a))]
    if m == 0:
        return Allocation.empty(n)
    numeric = inst.is_numeric()
    if numeric:
        evals = [_MaskEval(inst, i) for i in range(n)]
        weight = [max(abs(inst.valuations[i].value({g})) for i in range(n)) for g in range(m)]
    else:
        weight = [0] * m
    order = sorted(range(m), key=lambda g: (-weight[g], g))
    prune_goods = numeric and inst.goods_only
    prune_chores = numeric and inst.chores_only
    cls = _interchangeable(inst, pairs)
    touching = [[p for p in directed if k in p] for k in range(n)]
    masks = [0] * n
    nodes = [0]

    def violated_leaf() -> bool:
        if numeric:
            return any(evals[i].strongly_envies(masks[i], masks[j]) for i, j in directed)
        X = Allocation(tuple(_bits(mk) for mk in masks))
        return any(strongly_envies(inst, X, i, j) for i, j in directed)

    def doomed(rest: int, changed: int) -> bool:
        if prune_goods:
            for i, j in directed:
                gr = evals[i].goods_removed(masks[j])
                if gr is not None and gr > evals[i].value(masks[i] | rest):
                    return True
        elif prune_chores:
            for i, j in touching[changed]:
                cr = evals[i].chores_removed(masks[i])
                if cr is not None and evals[i].value(masks[j] | rest) > cr:
                    return True
        return False

    def rec(pos: int, rest: int) -> bool:
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded(f"search exceeded {budget} nodes")
        if pos == m:
            return not violated_leaf()
        g = order[pos]
        bit = 1 << g
        rest &= ~bit
        if numeric:
            cand = sorted(range(n), key=lambda a: (evals[a].value(masks[a]), a))
        else:
            cand = list(range(n))
        for a in cand:
            if masks[a] == 0 and any(cls[b] == cls[a] and masks[b] == 0 for b in range(a)):
                continue
            masks[a] |= bit
            if not doomed(rest, a) and rec(pos + 1, rest):
                return True
            masks[a] &= ~bit
        return False

    full = (1 << m) - 1
    if rec(0, full):
        X = Allocation(tuple(_bits(mk) for mk in masks))
        check_partition(inst, X)
        return X
    return None


def _bits(mask: int) -> frozenset:
    out = []
    g = 0
    while mask:
        if mask & 1:
            out.append(g)
        mask >>= 1
        g += 1
    return frozenset(out)


def brute_force_efx_search(inst: Instance, G, budget: int = DEFAULT_BUDGET) -> Allocation | None:
    """Some complete allocation that is EFX along every edge of ``G``, or ``None`` if none exists."""
    X = search_efx(inst, sorted(G.edges), budget=budget)
    if X is not None and not is_g_efx(inst, X, G):
        raise AssertionError("search returned an allocation the verifier rejects")
    return X


def enumerate_allocations(inst: Instance, limit: int = DEFAULT_BUDGET) -> Iterator[Allocation]:
    """Every complete allocation, in lexicographic order of owner tuples.  No pruning."""
    if inst.n ** inst.m > limit:
        raise BudgetExceeded(f"{inst.n}^{inst.m} allocations exceed the limit {limit}")
    for owners in product(range(inst.n), repeat=inst.m):
        bundles: list = [set() for _ in range(inst.n)]
        for g, a in enumerate(owners):
            bundles[a].add(g)
        yield Allocation(tuple(bundles))


def is_lexicographic(inst: Instance) -> bool:
    return all(isinstance(v, Lexicographic) for v in inst.valuations)
