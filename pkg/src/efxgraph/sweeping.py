"""Sweeping cut-and-choose along a path, with per-round potential tracing."""

from __future__ import annotations

import enum
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import ChoresUnsupported, NotAdditive
from .graphs import make_path
from .model import (
    Allocation,
    Instance,
    bundle_value,
    check_partition,
    envy_amount,
    is_g_efx,
    strong_envy_amount,
    strongly_envies,
)
from .solvers import local_efx

LEFT, RIGHT = "left", "right"


def always_left(edge: int, round_no: int) -> str:
    return LEFT


@dataclass(frozen=True)
class SweepConfig:
    """Sweep settings.

    ``role_policy(edge, round)`` names the cutter on edge ``(edge, edge+1)``
    (0-based) during round ``round`` (1-based): ``"left"`` or ``"right"``.
    ``skip_efx_edges`` leaves an edge alone when neither endpoint strongly
    envies the other; ``include_last_edge_in_reverse`` also revisits edge
    ``(n-2, n-1)`` at the start of the reverse sweep.
    """

    max_rounds: int = 1000
    role_policy: Callable[[int, int], str] = always_left
    skip_efx_edges: bool = True
    include_last_edge_in_reverse: bool = False

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")


class Outcome(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    MAX_ROUNDS = "max_rounds"


@dataclass
class SweepTrace:
    rounds: int = 0
    initial: tuple = ()
    potentials: list = field(default_factory=list)
    allocations: list = field(default_factory=list)
    final: Allocation | None = None
    outcome: Outcome | None = None

    def series(self, which: int) -> list:
        """Values of one potential (0, 1, 2 for phi1, phi2, phi3) from the start through every round."""
        return [self.initial[which]] + [p[which] for p in self.potentials]


def potentials(inst: Instance, X: Allocation, n: int | None = None) -> tuple:
    """``(total envy, total strong envy, minimum own value)`` over the path ``0-1-...-(n-1)``."""
    n = inst.n if n is None else n
    phi1 = phi2 = Fraction(0)
    for i in range(n - 1):
        for a, b in ((i, i + 1), (i + 1, i)):
            phi1 += envy_amount(inst, X, a, b)
            phi2 += strong_envy_amount(inst, X, a, b)
    phi3 = min(bundle_value(inst, i, X[i]) for i in range(n))
    return phi1, phi2, phi3


def _edge_has_strong_envy(inst: Instance, bundles: list, i: int) -> bool:
    X = Allocation(tuple(bundles))
    return strongly_envies(inst, X, i, i + 1) or strongly_envies(inst, X, i + 1, i)


def _any_strong_envy(inst: Instance, bundles: list) -> bool:
    return any(_edge_has_strong_envy(inst, bundles, i) for i in range(inst.n - 1))


def _fix_edge(inst: Instance, bundles: list, i: int, cutter: str) -> None:
    v = inst.valuations
    before = bundles[i] | bundles[i + 1]
    if cutter == LEFT:
        bundles[i], bundles[i + 1] = local_efx(bundles[i], bundles[i + 1], v[i], v[i + 1])
    elif cutter == RIGHT:
        bundles[i + 1], bundles[i] = local_efx(bundles[i + 1], bundles[i], v[i + 1], v[i])
    else:
        raise ValueError(f"role policy returned {cutter!r}")
    assert bundles[i] | bundles[i + 1] == before
    assert not _edge_has_strong_envy(inst, bundles, i)


def sweep(inst: Instance, config: SweepConfig | None = None) -> tuple:
    """Start with every good at agent 0 and sweep edges forward then back until no edge has strong envy.

    Returns ``(final allocation, trace)``.  A round that changes nothing while
    strong envy remains ends the run as a failure.
    """
    config = config or SweepConfig()
    if not inst.goods_only:
        raise ChoresUnsupported("sweeping is defined for goods")
    if not inst.is_additive():
        raise NotAdditive("sweeping uses the additive cut-and-choose step")
    n = inst.n
    bundles = [inst.all_items] + [frozenset()] * (n - 1)
    trace = SweepTrace(initial=potentials(inst, Allocation(tuple(bundles))))
    forward = list(range(n - 1))
    start = n - 2 if config.include_last_edge_in_reverse else n - 3
    reverse = list(range(start, -1, -1))
    while _any_strong_envy(inst, bundles):
        if trace.rounds >= config.max_rounds:
            trace.outcome = Outcome.MAX_ROUNDS
            break
        snapshot = list(bundles)
        trace.rounds += 1
        for i in forward + reverse:
            if config.skip_efx_edges and not _edge_has_strong_envy(inst, bundles, i):
                continue
            _fix_edge(inst, bundles, i, config.role_policy(i, trace.rounds))
        X = Allocation(tuple(bundles))
        check_partition(inst, X)
        trace.allocations.append(X)
        trace.potentials.append(potentials(inst, X))
        if bundles == snapshot and _any_strong_envy(inst, bundles):
            trace.outcome = Outcome.FAILURE
            break
    else:
        trace.outcome = Outcome.SUCCESS
    trace.final = Allocation(tuple(bundles))
    if trace.outcome is Outcome.SUCCESS and not is_g_efx(inst, trace.final, make_path(n)):
        raise AssertionError("sweep reported success on an allocation that is not G-EFX")
    return trace.final, trace


def monotonicity_violations(series: Sequence, increasing: bool = False) -> list:
    """Round indices ``t`` where the series moves the wrong way between ``t-1`` and ``t``."""
    bad = []
    for t in range(1, len(series)):
        if (series[t] < series[t - 1]) if increasing else (series[t] > series[t - 1]):
            bad.append(t)
    return bad


@dataclass
class BatchResult:
    instance_id: str
    outcome: Outcome
    rounds: int
    trace: SweepTrace


def _run_one(args):
    key, inst, config = args
    _, trace = sweep(inst, config)
    return BatchResult(key, trace.outcome, trace.rounds, trace)


def run_batch(instances, config: SweepConfig | None = None, workers: int = 1) -> list:
    """Sweep every instance; ``instances`` holds instances, ``(id, instance)`` pairs, or
    tuples whose first two fields are id and instance.

    Results come back in input order whatever ``workers`` is.  Parallel runs
    need a picklable ``role_policy`` (a module-level function).
    """
    config = config or SweepConfig()
    jobs = []
    for k, item in enumerate(instances):
        if isinstance(item, Instance):
            key, inst = str(k), item
        else:
            key, inst = item[0], item[1]
        jobs.append((key, inst, config))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


def rounds_histogram(results: Sequence[BatchResult]) -> dict:
    """Successful runs counted by number of rounds."""
    return dict(sorted(Counter(r.rounds for r in results if r.outcome is Outcome.SUCCESS).items()))
