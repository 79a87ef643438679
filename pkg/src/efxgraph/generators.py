"""Seeded random instances and graphs, including ones shaped for each construction."""

from __future__ import annotations

import random
from itertools import combinations

from .graphs import Graph, all_pairs_distance, make_path
from .model import Instance, Item, Kind, Lexicographic

KIND_MIXES = ("goods", "chores", "mixed")


def gen_random(n: int, m: int, max_value: int = 1000, kind_mix: str = "goods", seed=None) -> Instance:
    """Additive integer values in ``[0, max_value]``, negated on chores."""
    if kind_mix not in KIND_MIXES:
        raise ValueError(f"kind_mix must be one of {KIND_MIXES}")
    rng = random.Random(seed)
    if kind_mix == "goods":
        kinds = [Kind.GOOD] * m
    elif kind_mix == "chores":
        kinds = [Kind.CHORE] * m
    else:
        kinds = [rng.choice((Kind.GOOD, Kind.CHORE)) for _ in range(m)]
    sign = [1 if k is Kind.GOOD else -1 for k in kinds]
    rows = [[sign[g] * rng.randint(0, max_value) for g in range(m)] for _ in range(n)]
    return Instance.additive(rows, kinds)


def random_connected_graph(n: int, rng: random.Random, p: float = 0.3) -> Graph:
    """Random spanning tree plus each remaining edge with probability ``p``."""
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for k in range(1, n):
        u, v = order[k], order[rng.randrange(k)]
        edges.add((min(u, v), max(u, v)))
    for e in combinations(range(n), 2):
        if e not in edges and rng.random() < p:
            edges.add(e)
    return Graph(n, frozenset(edges))


def _row(rng: random.Random, m: int, max_value: int, sign: int = 1) -> list:
    return [sign * rng.randint(0, max_value) for _ in range(m)]


def _core_outer_graph(rng: random.Random, core_groups: list, outer: list, attach: dict, p: float = 0.5) -> Graph:
    """Edges inside the core at random; each outer agent tied to a nonempty subset of its assigned group."""
    n = sum(len(g) for g in core_groups) + len(outer)
    core = sorted(a for g in core_groups for a in g)
    edges = {e for e in combinations(core, 2) if rng.random() < p}
    for i in outer:
        group = sorted(attach[i])
        k = rng.randint(1, len(group))
        for j in rng.sample(group, k):
            edges.add((min(i, j), max(i, j)))
    return Graph(n, frozenset(edges))


def _split_agents(rng: random.Random, n: int, groups: int):
    agents = list(range(n))
    rng.shuffle(agents)
    n_core = rng.randint(groups, n)
    core, outer = agents[:n_core], sorted(agents[n_core:])
    cuts = sorted(rng.sample(range(1, n_core), groups - 1)) if groups > 1 else []
    parts = [sorted(core[a:b]) for a, b in zip([0] + cuts, cuts + [n_core])]
    return parts, outer


def gen_star_instance(rng: random.Random, n: int, m: int, max_value: int = 100) -> Instance:
    return Instance.additive([_row(rng, m, max_value) for _ in range(n)])


def gen_thm1_instance(rng: random.Random, n: int, m: int, max_value: int = 100, chores: bool = False):
    """Identical-valuation core, independent outer set.  Returns ``(instance, graph)``."""
    sign = -1 if chores else 1
    (core,), outer = _split_agents(rng, n, 1)
    shared = _row(rng, m, max_value, sign)
    rows = [shared if a in core else _row(rng, m, max_value, sign) for a in range(n)]
    G = _core_outer_graph(rng, [core], outer, {i: core for i in outer})
    kinds = [Kind.CHORE if chores else Kind.GOOD] * m
    return Instance.additive(rows, kinds), G


def _consistent_rows(rng: random.Random, m: int, k: int, max_value: int, sign: int) -> list:
    """``k`` value rows sharing one item ranking (ties allowed)."""
    perm = list(range(m))
    rng.shuffle(perm)
    rows = []
    for _ in range(k):
        mags = sorted((rng.randint(0, max_value) for _ in range(m)), reverse=True)
        row = [0] * m
        for rank, g in enumerate(perm):
            row[g] = mags[rank]
        rows.append([sign * x for x in row])
    return rows


def gen_thm2_instance(rng: random.Random, n: int, m: int, max_value: int = 100, chores: bool = False,
                      groups: int | None = None):
    """Consistent core split into identical groups; each outer agent attached inside one group."""
    sign = -1 if chores else 1
    groups = groups or rng.randint(1, min(3, n))
    parts, outer = _split_agents(rng, n, groups)
    # magnitudes per group ranked by a common permutation; chores negate so the ranking flips uniformly
    grows = _consistent_rows(rng, m, groups, max_value, sign)
    rows = [None] * n
    for k, part in enumerate(parts):
        for a in part:
            rows[a] = grows[k]
    attach = {}
    for i in outer:
        attach[i] = parts[rng.randrange(groups)]
        rows[i] = _row(rng, m, max_value, sign)
    G = _core_outer_graph(rng, parts, outer, attach)
    kinds = [Kind.CHORE if chores else Kind.GOOD] * m
    return Instance.additive(rows, kinds), G


def gen_thm3_instance(rng: random.Random, n: int, m: int, max_value: int = 100):
    """Two arbitrary core valuation types; each outer agent attached inside one type."""
    parts, outer = _split_agents(rng, n, 2 if n >= 2 else 1)
    types = [_row(rng, m, max_value) for _ in parts]
    rows = [None] * n
    for k, part in enumerate(parts):
        for a in part:
            rows[a] = types[k]
    attach = {}
    for i in outer:
        attach[i] = parts[rng.randrange(len(parts))]
        rows[i] = _row(rng, m, max_value)
    G = _core_outer_graph(rng, parts, outer, attach)
    return Instance.additive(rows), G


def gen_p4_instance(rng: random.Random, m: int, max_value: int = 100) -> Instance:
    return Instance.additive([_row(rng, m, max_value) for _ in range(4)])


def gen_lex_diameter4(rng: random.Random, n: int, m: int, p: float = 0.15, tries: int = 1000):
    """Connected graph of diameter at least 4 with random priorities and item kinds."""
    if n < 5:
        raise ValueError("diameter 4 needs at least 5 vertices")
    for _ in range(tries):
        G = random_connected_graph(n, rng, p)
        dist = all_pairs_distance(G)
        if max(max(r) for r in dist) >= 4:
            break
    else:
        G = make_path(n)
    kinds = [rng.choice((Kind.GOOD, Kind.CHORE)) for _ in range(m)]
    vals = []
    for _ in range(n):
        pr = list(range(m))
        rng.shuffle(pr)
        vals.append(Lexicographic(tuple(pr)))
    return Instance(n, tuple(Item(g, k) for g, k in enumerate(kinds)), tuple(vals)), G


def gen_path_instance(rng: random.Random, n: int, m: int, total: int = 1000) -> Instance:
    """Each agent spreads at most ``total`` integer points over the goods."""
    rows = []
    for _ in range(n):
        cuts = sorted(rng.randint(0, total) for _ in range(m))
        row = [b - a for a, b in zip([0] + cuts[:-1], cuts)]
        rows.append(row)
    return Instance.additive(rows)


def gen_hiddennottight_instance(n: int, seed=None, max_value: int = 100) -> Instance:
    rng = random.Random(seed)
    return Instance.additive([_row(rng, n, max_value) for _ in range(n)])


__all__ = [
    "gen_random",
    "random_connected_graph",
    "gen_star_instance",
    "gen_thm1_instance",
    "gen_thm2_instance",
    "gen_thm3_instance",
    "gen_p4_instance",
    "gen_lex_diameter4",
    "gen_path_instance",
    "gen_hiddennottight_instance",
]
