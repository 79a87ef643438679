"""Constructive G-EFX allocations for star-like, core/outer, and long-diameter graphs.

The core/outer constructions share one pattern: compute a complete EFX
allocation for a proxy profile in which every outer agent borrows the
valuation of the core group it touches, then let outer agents pick their
favourite bundle from that group's pool before the core agents take what
is left.
"""

from __future__ import annotations

import random
from typing import Sequence

from .errors import DiameterTooSmall, NotAdditive, NotLexicographic, ShapeMismatch
from .graphs import (
    CoreStructure,
    Graph,
    all_pairs_distance,
    make_path,
    validate_thm1_shape,
    validate_thm2_shape,
    validate_thm3_shape,
)
from .model import (
    Additive,
    Allocation,
    Instance,
    Lexicographic,
    bundle_value,
    check_partition,
    is_g_efx,
)
from .solvers import (
    efx_complete_general,
    efx_consistent_additive,
    efx_consistent_chores,
    efx_identical_additive,
    efx_two_types,
)


def _verified(inst: Instance, X: Allocation, G: Graph) -> Allocation:
    check_partition(inst, X)
    if not is_g_efx(inst, X, G):
        raise AssertionError("construction produced an allocation that is not G-EFX")
    return X


def _best(inst: Instance, agent: int, bundles: list, avail: list) -> int:
    """Index in ``avail`` of the bundle ``agent`` values most; earliest wins ties."""
    return max(avail, key=lambda b: (bundle_value(inst, agent, bundles[b]), -b))


def _identical_bundles(inst: Instance, agent: int, chores: bool = False) -> list:
    """``n`` bundles that are EFX among ``n`` copies of ``agent``."""
    v = inst.valuations[agent]
    copies = inst.with_valuations([v] * inst.n)
    if chores:
        return efx_consistent_chores(copies)
    if isinstance(v, Additive) and inst.goods_only:
        return efx_identical_additive(v.values, inst.n)
    return efx_complete_general(copies)


def _redistribute(inst: Instance, Y: list, pool_of: Sequence[int], structure: CoreStructure,
                  outer_pool: dict, rng: random.Random | None = None) -> Allocation:
    """Hand out bundles pool by pool: outer agents choose first, core agents take the rest.

    ``pool_of[b]`` is the group bundle ``b`` was built for; ``outer_pool``
    maps each outer agent to the group it picks from.
    """
    n = inst.n
    X: list = [None] * n
    for k, group in enumerate(structure.core_groups):
        avail = [b for b in range(n) if pool_of[b] == k]
        pickers = sorted(i for i in structure.outer if outer_pool[i] == k)
        chosen = {}
        for i in pickers:
            b = _best(inst, i, Y, avail)
            avail.remove(b)
            chosen[i] = b
            X[i] = Y[b]
        for i, b in chosen.items():
            # an outer agent never envies a bundle handed out after its turn
            for later in avail:
                assert bundle_value(inst, i, Y[b]) >= bundle_value(inst, i, Y[later])
        core = sorted(group)
        if rng is not None:
            rng.shuffle(avail)
        if len(avail) != len(core):
            raise AssertionError(f"pool {k} has {len(avail)} bundles for {len(core)} core agents")
        for i, b in zip(core, avail):
            assert pool_of[b] == k
            X[i] = Y[b]
    return Allocation(tuple(X))


def _outer_pools(G: Graph, structure: CoreStructure, proxies: dict | None) -> dict:
    pools = {}
    for i in structure.outer:
        if proxies and i in proxies:
            pools[i] = proxies[i]
            continue
        k = structure.outer_group(G, i)
        pools[i] = 0 if k is None else k
    return pools


def _proxy_instance(inst: Instance, structure: CoreStructure, pools: dict):
    reps = [min(g) for g in structure.core_groups]
    vals, pool_of = [], []
    for a in range(inst.n):
        k = pools[a] if a in structure.outer else structure.group_index(a)
        vals.append(inst.valuations[reps[k]])
        pool_of.append(k)
    return inst.with_valuations(vals), pool_of


def star_efx(inst: Instance, center: int = 0) -> Allocation:
    """EFX bundles for copies of the centre; leaves pick in ascending order; the centre keeps the last one."""
    Y = _identical_bundles(inst, center)
    avail = list(range(inst.n))
    X: list = [None] * inst.n
    for i in range(inst.n):
        if i == center:
            continue
        b = _best(inst, i, Y, avail)
        avail.remove(b)
        X[i] = Y[b]
    (X[center],) = (Y[b] for b in avail)
    G = Graph(inst.n, frozenset((center, i) for i in range(inst.n) if i != center))
    return _verified(inst, Allocation(tuple(X)), G)


def core_identical_efx(inst: Instance, G: Graph, structure: CoreStructure | None = None,
                       rng: random.Random | None = None) -> Allocation:
    structure = structure or validate_thm1_shape(inst, G)
    if len(structure.core_groups) != 1:
        raise ShapeMismatch("core must be a single identical-valuation group")
    validate_thm1_shape(inst, G, structure.core)
    Y = _identical_bundles(inst, min(structure.core))
    X = _redistribute(inst, Y, [0] * inst.n, structure, {i: 0 for i in structure.outer}, rng)
    return _verified(inst, X, G)


def consistent_core_efx(inst: Instance, G: Graph, structure: CoreStructure | None = None, *,
                        base: Sequence | None = None, proxies: dict | None = None,
                        bypass: bool = False, rng: random.Random | None = None) -> Allocation:
    """Core of consistent additive groups; each outer agent picks within its neighbours' pool.

    ``base`` supplies the proxy-profile EFX allocation instead of computing
    it.  ``bypass`` skips shape validation and the final G-EFX check (with
    ``proxies`` naming the pool an outer agent should use), which reproduces
    what goes wrong on graphs outside the validated core/outer shape.
    """
    if not inst.is_additive():
        raise NotAdditive("consistent-core construction needs additive valuations")
    structure = structure or validate_thm2_shape(inst, G)
    if not bypass:
        validate_thm2_shape(inst, G, structure.core)
    pools = _outer_pools(G, structure, proxies) if not bypass else dict(proxies or {})
    proxy, pool_of = _proxy_instance(inst, structure, pools)
    Y = [frozenset(b) for b in base] if base is not None else efx_consistent_additive(proxy)
    X = _redistribute(inst, Y, pool_of, structure, pools, rng)
    if bypass:
        check_partition(inst, X)
        return X
    return _verified(inst, X, G)


def two_type_core_efx(inst: Instance, G: Graph, structure: CoreStructure | None = None,
                      rng: random.Random | None = None) -> Allocation:
    structure = structure or validate_thm3_shape(inst, G)
    validate_thm3_shape(inst, G, structure.core)
    pools = _outer_pools(G, structure, None)
    proxy, pool_of = _proxy_instance(inst, structure, pools)
    Y = efx_two_types(proxy)
    X = _redistribute(inst, Y, pool_of, structure, pools, rng)
    return _verified(inst, X, G)


def three_edge_path_efx(inst: Instance) -> Allocation:
    """P4 with agents 0-1-2-3: the two middle agents form the core."""
    if inst.n != 4:
        raise ShapeMismatch(f"three-edge path needs 4 agents, got {inst.n}")
    G = make_path(4)
    return two_type_core_efx(inst, G, validate_thm3_shape(inst, G, core=(1, 2)))


def _require_chores(inst: Instance) -> None:
    if not inst.chores_only or not inst.is_additive():
        raise ShapeMismatch("chores constructions need a chores-only additive instance")


def core_identical_efx_chores(inst: Instance, G: Graph, structure: CoreStructure | None = None) -> Allocation:
    _require_chores(inst)
    structure = structure or validate_thm1_shape(inst, G)
    validate_thm1_shape(inst, G, structure.core)
    Y = _identical_bundles(inst, min(structure.core), chores=True)
    X = _redistribute(inst, Y, [0] * inst.n, structure, {i: 0 for i in structure.outer})
    return _verified(inst, X, G)


def consistent_core_efx_chores(inst: Instance, G: Graph, structure: CoreStructure | None = None) -> Allocation:
    _require_chores(inst)
    structure = structure or validate_thm2_shape(inst, G)
    validate_thm2_shape(inst, G, structure.core)
    pools = _outer_pools(G, structure, None)
    proxy, pool_of = _proxy_instance(inst, structure, pools)
    Y = efx_consistent_chores(proxy)
    X = _redistribute(inst, Y, pool_of, structure, pools)
    return _verified(inst, X, G)


def far_pair(G: Graph, dist: list | None = None):
    """Lexicographically smallest ``(u, v)`` with distance at least 4, or ``None``."""
    dist = all_pairs_distance(G) if dist is None else dist
    for u in range(G.n):
        for v in range(u + 1, G.n):
            if dist[u][v] >= 4:
                return u, v
    return None


def lex_mixed_diameter4(inst: Instance, G: Graph) -> Allocation:
    """Goods around one end of a long shortest path, chores around the other.

    Neighbours of ``u`` each take their top remaining good; ``v``'s
    highest-priority chores go one apiece to ``v``'s neighbours; ``u`` and
    ``v`` absorb whatever goods and chores remain.
    """
    if not all(isinstance(v, Lexicographic) for v in inst.valuations):
        raise NotLexicographic("every agent needs a lexicographic valuation")
    pair = far_pair(G)
    if pair is None:
        raise DiameterTooSmall("no pair of agents at distance 4 or more")
    u, v = pair
    nu, nv = sorted(G.neighbors(u)), sorted(G.neighbors(v))
    assert not set(nu) & set(nv)
    bundles: list = [set() for _ in range(inst.n)]
    goods = set(inst.goods)
    for w in nu:
        top = next((o for o in inst.valuations[w].priority if o in goods), None)
        if top is None:
            break
        goods.remove(top)
        bundles[w].add(top)
    v_chores = [o for o in inst.valuations[v].priority if o in inst.chores]
    for w, c in zip(nv, v_chores):
        bundles[w].add(c)
    bundles[u] |= goods
    bundles[v] |= set(v_chores[len(nv):])
    X = Allocation(tuple(bundles))
    assert all(len(X[w]) <= 1 for w in nu + nv)
    return _verified(inst, X, G)
