"""Instances, valuations, allocations, and the envy / EFX / hidden-envy predicates.

All numeric values are :class:`fractions.Fraction`, so every comparison made
here is exact.  Bundles are ``frozenset`` objects of item ids ``0..m-1`` and
agents are ``0..n-1``.

Graphs are duck-typed: anything with an ``edges`` attribute holding ``(i, j)``
pairs works (see :class:`efxgraph.graphs.Graph`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

from .errors import (
    ChoresUnsupported,
    InvalidAllocation,
    InvalidInstance,
    LexicographicNotNumeric,
    NotAdditive,
)

Bundle = frozenset

ZERO = Fraction(0)


class Kind(enum.Enum):
    GOOD = "good"
    CHORE = "chore"


@dataclass(frozen=True)
class Item:
    id: int
    kind: Kind = Kind.GOOD

    @property
    def is_good(self) -> bool:
        return self.kind is Kind.GOOD


def to_fraction(x) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(x, bool):
        raise TypeError("booleans are not valuations")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"refusing inexact value {x!r} of type {type(x).__name__}")


def _mask(bundle: Iterable[int]) -> int:
    m = 0
    for g in bundle:
        m |= 1 << g
    return m


@dataclass(frozen=True)
class Additive:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(to_fraction(v) for v in self.values))

    @property
    def m(self) -> int:
        return len(self.values)

    def value(self, bundle: Iterable[int]) -> Fraction:
        return sum((self.values[g] for g in bundle), ZERO)


@dataclass(frozen=True)
class Table:
    """A general set function stored as a full table indexed by item bitmask."""

    values: tuple
    m: int = field(default=-1)

    def __post_init__(self):
        vals = tuple(to_fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        m = (len(vals) - 1).bit_length()
        if len(vals) != 1 << m:
            raise InvalidInstance(f"table has {len(vals)} entries, not a power of two")
        if self.m not in (-1, m):
            raise InvalidInstance(f"table size {len(vals)} does not match m={self.m}")
        object.__setattr__(self, "m", m)

    @classmethod
    def from_entries(cls, m: int, entries) -> "Table":
        """Build from ``{subset: value}`` (or pairs); every subset must appear once."""
        if isinstance(entries, dict):
            entries = entries.items()
        vals: list = [None] * (1 << m)
        for subset, value in entries:
            idx = _mask(subset)
            if idx >= len(vals):
                raise InvalidInstance(f"subset {sorted(subset)} mentions items outside 0..{m - 1}")
            if vals[idx] is not None:
                raise InvalidInstance(f"subset {sorted(subset)} listed twice")
            vals[idx] = value
        missing = [i for i, v in enumerate(vals) if v is None]
        if missing:
            raise InvalidInstance(f"table is missing {len(missing)} of {len(vals)} subsets")
        return cls(tuple(vals))

    @classmethod
    def from_additive(cls, values: Sequence) -> "Table":
        vals = [to_fraction(v) for v in values]
        m = len(vals)
        return cls(tuple(sum((vals[g] for g in range(m) if mask >> g & 1), ZERO) for mask in range(1 << m)))

    def value(self, bundle: Iterable[int]) -> Fraction:
        return self.values[_mask(bundle)]


@dataclass(frozen=True)
class Lexicographic:
    """Comparison-only valuation given by a priority order, most important first."""

    priority: tuple

    def __post_init__(self):
        object.__setattr__(self, "priority", tuple(int(o) for o in self.priority))
        if sorted(self.priority) != list(range(len(self.priority))):
            raise InvalidInstance(f"priority {self.priority} is not a permutation of item ids")

    @property
    def m(self) -> int:
        return len(self.priority)


Valuation = Union[Additive, Table, Lexicographic]


@dataclass(frozen=True)
class Instance:
    n: int
    items: tuple
    valuations: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "valuations", tuple(self.valuations))
        if self.n < 1:
            raise InvalidInstance("need at least one agent")
        if len(self.valuations) != self.n:
            raise InvalidInstance(f"{len(self.valuations)} valuations for {self.n} agents")
        for k, it in enumerate(self.items):
            if it.id != k:
                raise InvalidInstance(f"item at position {k} has id {it.id}")
        m = len(self.items)
        for i, v in enumerate(self.valuations):
            if v.m != m:
                raise InvalidInstance(f"agent {i} valuation covers {v.m} items, instance has {m}")
            if isinstance(v, Additive):
                for g, x in enumerate(v.values):
                    if self.items[g].is_good and x < 0:
                        raise InvalidInstance(f"agent {i}: good {g} has negative value {x}")
                    if not self.items[g].is_good and x > 0:
                        raise InvalidInstance(f"agent {i}: chore {g} has positive value {x}")
            elif isinstance(v, Table) and self.goods_only:
                _check_monotone(i, v)

    @classmethod
    def additive(cls, rows: Sequence[Sequence], kinds: Sequence[Kind] | None = None) -> "Instance":
        """Shorthand: one row of per-item values per agent."""
        rows = [list(r) for r in rows]
        m = len(rows[0]) if rows else 0
        if kinds is None:
            kinds = [Kind.GOOD] * m
        items = tuple(Item(g, Kind(k)) for g, k in enumerate(kinds))
        return cls(len(rows), items, tuple(Additive(tuple(r)) for r in rows))

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def all_items(self) -> frozenset:
        return frozenset(range(self.m))

    @property
    def goods(self) -> frozenset:
        return frozenset(it.id for it in self.items if it.is_good)

    @property
    def chores(self) -> frozenset:
        return frozenset(it.id for it in self.items if not it.is_good)

    @property
    def goods_only(self) -> bool:
        return all(it.is_good for it in self.items)

    @property
    def chores_only(self) -> bool:
        return not any(it.is_good for it in self.items)

    def is_numeric(self, agent: int | None = None) -> bool:
        vals = self.valuations if agent is None else [self.valuations[agent]]
        return not any(isinstance(v, Lexicographic) for v in vals)

    def is_additive(self, agent: int | None = None) -> bool:
        vals = self.valuations if agent is None else [self.valuations[agent]]
        return all(isinstance(v, Additive) for v in vals)

    def with_valuations(self, valuations: Sequence[Valuation]) -> "Instance":
        return Instance(len(valuations), self.items, tuple(valuations))


def _check_monotone(agent: int, v: Table) -> None:
    vals = v.values
    for mask in range(len(vals)):
        for g in range(v.m):
            if not mask >> g & 1 and vals[mask] > vals[mask | 1 << g]:
                raise InvalidInstance(f"agent {agent}: table valuation is not monotone at item {g}")


@dataclass(frozen=True)
class Allocation:
    """Per-agent bundles; disjointness is enforced, completeness via :func:`check_partition`."""

    bundles: tuple

    def __post_init__(self):
        bundles = tuple(frozenset(b) for b in self.bundles)
        object.__setattr__(self, "bundles", bundles)
        seen: set = set()
        for i, b in enumerate(bundles):
            clash = seen & b
            if clash:
                raise InvalidAllocation(f"items {sorted(clash)} assigned twice (again to agent {i})")
            seen |= b

    @classmethod
    def empty(cls, n: int) -> "Allocation":
        return cls(tuple(frozenset() for _ in range(n)))

    def __getitem__(self, i: int) -> frozenset:
        return self.bundles[i]

    def __len__(self) -> int:
        return len(self.bundles)

    def __iter__(self):
        return iter(self.bundles)

    @property
    def items(self) -> frozenset:
        return frozenset().union(*self.bundles)

    def as_lists(self) -> list:
        return [sorted(b) for b in self.bundles]


def check_partition(inst: Instance, X: Allocation) -> None:
    if len(X) != inst.n:
        raise InvalidAllocation(f"allocation has {len(X)} bundles for {inst.n} agents")
    if X.items != inst.all_items:
        missing = sorted(inst.all_items - X.items)
        extra = sorted(X.items - inst.all_items)
        raise InvalidAllocation(f"not a partition of the items: missing {missing}, unknown {extra}")


@dataclass(frozen=True)
class HiddenSet:
    hidden: frozenset

    def __post_init__(self):
        object.__setattr__(self, "hidden", frozenset(self.hidden))

    def __len__(self) -> int:
        return len(self.hidden)

    def __iter__(self):
        return iter(sorted(self.hidden))


# --- valuation queries -----------------------------------------------------


def bundle_value(inst: Instance, agent: int, bundle: Iterable[int]) -> Fraction:
    v = inst.valuations[agent]
    if isinstance(v, Lexicographic):
        raise LexicographicNotNumeric(f"agent {agent} has a lexicographic valuation")
    return v.value(bundle)


def _lex_prefers(inst: Instance, v: Lexicographic, a: frozenset, b: frozenset) -> bool:
    for o in v.priority:
        in_a, in_b = o in a, o in b
        if in_a != in_b:
            return in_a if inst.items[o].is_good else in_b
    return False


def prefers(inst: Instance, agent: int, a: Iterable[int], b: Iterable[int]) -> bool:
    """True iff ``agent`` strictly prefers bundle ``a`` to bundle ``b``."""
    a, b = frozenset(a), frozenset(b)
    v = inst.valuations[agent]
    if isinstance(v, Lexicographic):
        return _lex_prefers(inst, v, a, b)
    return v.value(a) > v.value(b)


def envy_amount(inst: Instance, X: Allocation, i: int, j: int) -> Fraction:
    own = bundle_value(inst, i, X[i])
    return max(bundle_value(inst, i, X[j]) - own, ZERO)


def strong_envy_amount(inst: Instance, X: Allocation, i: int, j: int) -> Fraction:
    """Envy of ``i`` towards ``j`` that survives the most favourable single-item removal.

    The goods branch removes a good from ``X[j]``; the chores branch removes a
    chore from ``X[i]``.  Each branch is clamped at zero and the larger is
    returned.
    """
    v = inst.valuations[i]
    if isinstance(v, Lexicographic):
        raise LexicographicNotNumeric(f"agent {i} has a lexicographic valuation")
    xi, xj = X[i], X[j]
    own = v.value(xi)
    other = v.value(xj)
    best = ZERO
    for g in xj:
        if inst.items[g].is_good:
            best = max(best, v.value(xj - {g}) - own)
    for c in xi:
        if not inst.items[c].is_good:
            best = max(best, other - v.value(xi - {c}))
    return best


def strongly_envies(inst: Instance, X: Allocation, i: int, j: int) -> bool:
    """Existential strong-envy test; works for every valuation variant."""
    xi, xj = X[i], X[j]
    v = inst.valuations[i]
    if not isinstance(v, Lexicographic):
        return strong_envy_amount(inst, X, i, j) > 0
    for g in xj:
        if inst.items[g].is_good and _lex_prefers(inst, v, xj - {g}, xi):
            return True
    for c in xi:
        if not inst.items[c].is_good and _lex_prefers(inst, v, xj, xi - {c}):
            return True
    return False


strongly_envies_lex = strongly_envies


def is_g_efx(inst: Instance, X: Allocation, G) -> bool:
    for i, j in G.edges:
        if strongly_envies(inst, X, i, j) or strongly_envies(inst, X, j, i):
            return False
    return True


def is_efx(inst: Instance, X: Allocation, agents: Iterable[int] | None = None) -> bool:
    """EFX among ``agents`` (default: everyone), i.e. on the complete graph."""
    agents = range(inst.n) if agents is None else list(agents)
    return not any(
        strongly_envies(inst, X, i, j) or strongly_envies(inst, X, j, i)
        for i, j in combinations(agents, 2)
    )


def is_g_hef(inst: Instance, X: Allocation, G, S, uniform: bool = False) -> bool:
    """Envy-freeness along every edge once the goods in ``S`` are deleted from the envied bundle.

    The comparison is weak (``v_i(X_i) >= v_i(X_j - S)``).  With ``uniform``
    the hidden set may meet each bundle at most once.
    """
    if not inst.goods_only:
        raise ChoresUnsupported("hidden envy is only defined for goods")
    hidden = frozenset(S.hidden if isinstance(S, HiddenSet) else S)
    if uniform and any(len(hidden & b) > 1 for b in X):
        return False
    for a, b in G.edges:
        for i, j in ((a, b), (b, a)):
            if bundle_value(inst, i, X[i]) < bundle_value(inst, i, X[j] - hidden):
                return False
    return True


def are_consistent(inst: Instance, agents: Iterable[int], strict: bool = False) -> bool:
    """Whether the named additive agents rank single items the same way.

    By default the check is weak: it fails only when one agent strictly
    prefers ``a`` to ``b`` while another strictly prefers ``b`` to ``a``
    (ties are compatible with either order).  ``strict=True`` additionally
    requires the tie pattern to match.
    """
    agents = list(agents)
    for i in agents:
        if not isinstance(inst.valuations[i], Additive):
            raise NotAdditive(f"agent {i} is not additive")
    for i, j in combinations(agents, 2):
        vi, vj = inst.valuations[i].values, inst.valuations[j].values
        for a, b in combinations(range(inst.m), 2):
            si = (vi[a] > vi[b]) - (vi[a] < vi[b])
            sj = (vj[a] > vj[b]) - (vj[a] < vj[b])
            if si * sj < 0 or (strict and si != sj):
                return False
    return True


@dataclass(frozen=True)
class EnvyReport:
    envy: dict
    strong_envy: dict

    @property
    def total_envy(self) -> Fraction:
        return sum(self.envy.values(), ZERO)

    @property
    def total_strong_envy(self) -> Fraction:
        return sum(self.strong_envy.values(), ZERO)


def envy_report(inst: Instance, X: Allocation, G=None) -> EnvyReport:
    """Envy and strong envy for every ordered pair, or only along the edges of ``G``."""
    if G is None:
        pairs = [(i, j) for i in range(inst.n) for j in range(inst.n) if i != j]
    else:
        pairs = [p for a, b in sorted(G.edges) for p in ((a, b), (b, a))]
    return EnvyReport(
        envy={p: envy_amount(inst, X, *p) for p in pairs},
        strong_envy={p: strong_envy_amount(inst, X, *p) for p in pairs},
    )
