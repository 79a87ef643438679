"""Command-line entry point: solve, verify, generate, sweep and inspect graphs.

Exit status: 0 when a command succeeds or a check passes, 1 when a check
comes back negative, 2 on any error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import formats
from .errors import FairDivisionError
from .graph_efx import (
    consistent_core_efx,
    consistent_core_efx_chores,
    core_identical_efx,
    core_identical_efx_chores,
    lex_mixed_diameter4,
    star_efx,
    three_edge_path_efx,
    two_type_core_efx,
)
from .graphs import (
    Graph,
    all_pairs_distance,
    connected_components,
    diameter,
    make_complete,
    make_hiddennottight_graph,
    make_path,
    make_star,
    min_vertex_cover_exact,
    validate_thm1_shape,
    validate_thm2_shape,
    validate_thm3_shape,
    vertex_cover_2approx,
    EXACT_COVER_BOUND,
)
from .hef import gen_lower_bound_instance, min_hidden_set, vertex_cover_round_robin
from .generators import gen_hiddennottight_instance, gen_path_instance, gen_random
from .model import Allocation, HiddenSet, check_partition, envy_report, is_g_efx, is_g_hef
from .solvers import brute_force_efx_search
from .sweeping import SweepConfig, rounds_histogram, run_batch, sweep

OK, NEGATIVE, ERROR = 0, 1, 2

SOLVERS = ("star", "thm1", "thm2", "thm3", "p4", "chores1", "chores2", "lex4", "vcrr", "sweep", "brute")
SHAPES = {"1": validate_thm1_shape, "2": validate_thm2_shape, "3": validate_thm3_shape}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return formats.frac_str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(doc: dict) -> None:
    print(json.dumps(doc, default=_jsonable, indent=2))


def _int_list(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    return [int(x) for x in text.split(",")]


def _cover(G: Graph, agents) -> frozenset:
    sub = Graph.from_edges(G.n, G.induced(agents))
    if len(agents) <= EXACT_COVER_BOUND:
        return min_vertex_cover_exact(sub)
    return vertex_cover_2approx(sub)


def _load_allocation(args, loaded: formats.InstanceFile) -> Allocation:
    if args.allocation is not None:
        raw = args.allocation
        path = Path(raw)
        doc = json.loads(path.read_text(encoding="utf-8") if path.exists() else raw)
        X = Allocation(tuple(doc))
    elif loaded.allocation is not None:
        X = loaded.allocation
    else:
        raise FairDivisionError("no allocation: pass --allocation or include one in the instance file")
    check_partition(loaded.instance, X)
    return X


# --- solve ---------------------------------------------------------------------------


def _solve(args) -> int:
    loaded = formats.read_instance_file(args.instance)
    inst, G = loaded.instance, loaded.graph
    core = _int_list(args.core) if args.core is not None else None
    extra: dict = {}
    hidden = None
    algo = args.algorithm
    if algo == "star":
        center = args.center
        G = make_star(inst.n) if center == 0 else Graph(inst.n, frozenset(
            (min(center, i), max(center, i)) for i in range(inst.n) if i != center))
        X = star_efx(inst, center)
    elif algo == "thm1":
        X = core_identical_efx(inst, G, validate_thm1_shape(inst, G, core))
    elif algo == "thm2":
        X = consistent_core_efx(inst, G, validate_thm2_shape(inst, G, core))
    elif algo == "thm3":
        X = two_type_core_efx(inst, G, validate_thm3_shape(inst, G, core))
    elif algo == "p4":
        G = make_path(4)
        X = three_edge_path_efx(inst)
    elif algo == "chores1":
        X = core_identical_efx_chores(inst, G, validate_thm1_shape(inst, G, core))
    elif algo == "chores2":
        X = consistent_core_efx_chores(inst, G, validate_thm2_shape(inst, G, core))
    elif algo == "lex4":
        X = lex_mixed_diameter4(inst, G)
    elif algo == "vcrr":
        comps = connected_components(G)
        component = next(c for c in comps if args.component in c)
        C = _int_list(args.cover) if args.cover is not None else sorted(_cover(G, component))
        X, hidden = vertex_cover_round_robin(inst, G, component, C)
        extra["cover"] = sorted(C)
        extra["component"] = sorted(component)
    elif algo == "sweep":
        G = make_path(inst.n)
        config = SweepConfig(max_rounds=args.max_rounds, skip_efx_edges=not args.no_skip,
                             include_last_edge_in_reverse=args.include_last_edge)
        X, trace = sweep(inst, config)
        extra["outcome"] = trace.outcome.value
        extra["rounds"] = trace.rounds
        extra["potentials"] = [list(trace.initial)] + [list(p) for p in trace.potentials]
        if trace.outcome.value != "success":
            _emit({"algorithm": algo, "verified": False, **extra})
            return NEGATIVE
    elif algo == "brute":
        X = brute_force_efx_search(inst, G, budget=args.budget)
        if X is None:
            _emit({"algorithm": algo, "verified": False, "allocation": None})
            return NEGATIVE
    else:  # argparse restricts the choices
        raise AssertionError(algo)

    # never print an allocation that has not been checked here
    check_partition(inst, X)
    ok = is_g_efx(inst, X, G) if hidden is None else is_g_hef(inst, X, G, hidden, uniform=True)
    doc = {"algorithm": algo, "verified": ok, "allocation": X.as_lists(), **extra}
    if hidden is not None:
        doc["hidden"] = sorted(hidden.hidden)
    _emit(doc)
    if args.output:
        formats.write_instance(args.output, inst, G, X)
    return OK if ok else ERROR


# --- verify / minhide -------------------------------------------------------------------


def _verify(args) -> int:
    loaded = formats.read_instance_file(args.instance)
    inst, G = loaded.instance, loaded.graph
    X = _load_allocation(args, loaded)
    if args.property == "efx":
        ok = is_g_efx(inst, X, G)
        rep = envy_report(inst, X, G)
        doc = {
            "property": "efx",
            "holds": ok,
            "strong_envy": [[i, j, amt] for (i, j), amt in sorted(rep.strong_envy.items()) if amt > 0],
        }
    else:
        S = HiddenSet(_int_list(args.hidden or ""))
        ok = is_g_hef(inst, X, G, S, uniform=args.uniform)
        doc = {"property": "uhef" if args.uniform else "hef", "holds": ok, "hidden": sorted(S.hidden)}
    _emit(doc)
    return OK if ok else NEGATIVE


def _minhide(args) -> int:
    loaded = formats.read_instance_file(args.instance)
    X = _load_allocation(args, loaded)
    S = min_hidden_set(loaded.instance, X, loaded.graph, uniform=args.uniform)
    _emit({"size": len(S), "hidden": sorted(S.hidden), "uniform": args.uniform})
    return OK


# --- gen -----------------------------------------------------------------------------------


def _named_graph(kind: str, n: int) -> Graph:
    makers = {"path": make_path, "star": make_star, "complete": make_complete,
              "hiddennottight": make_hiddennottight_graph}
    return makers[kind](n)


def _gen(args) -> int:
    if args.family == "random":
        inst = gen_random(args.n, args.m, args.max_value, args.kind_mix, args.seed)
        G = _named_graph(args.graph, args.n)
    elif args.family == "lowerbound":
        G = _named_graph(args.graph, args.n)
        inst = gen_lower_bound_instance(G, args.scale)
    else:
        inst = gen_hiddennottight_instance(args.n, args.seed, args.max_value)
        G = make_hiddennottight_graph(args.n)
    doc = formats.dump_instance(inst, G)
    if args.output:
        formats.write_instance(args.output, inst, G)
    else:
        _emit(doc)
    return OK


# --- sweep-batch -------------------------------------------------------------------------


def _sweep_batch(args) -> int:
    problems: list = []
    if args.spliddit:
        problems += [(p.id, p.instance) for p in formats.ingest_spliddit(args.spliddit)]
    for path in args.instances:
        problems.append((Path(path).stem, formats.read_instance_file(path).instance))
    if args.random:
        rng = random.Random(args.seed)
        for k in range(args.random):
            inst = gen_path_instance(rng, rng.randint(3, 6), rng.randint(3, 10))
            problems.append((f"random-{k}", inst))
    if args.min_agents:
        problems = [p for p in problems if p[1].n >= args.min_agents]
    problems.sort(key=lambda p: p[0])
    config = SweepConfig(max_rounds=args.max_rounds, skip_efx_edges=not args.no_skip,
                         include_last_edge_in_reverse=args.include_last_edge)
    results = run_batch(problems, config, workers=args.workers)
    if args.csv:
        formats.write_trace_csv(args.csv, results)
    failures = [r.instance_id for r in results if r.outcome.value != "success"]
    _emit({
        "instances": len(results),
        "succeeded": len(results) - len(failures),
        "rounds_histogram": {str(k): v for k, v in rounds_histogram(results).items()},
        "unfinished": failures,
    })
    return OK if not failures else NEGATIVE


# --- graph -----------------------------------------------------------------------------------


def _graph_from_args(args):
    if args.instance:
        loaded = formats.read_instance_file(args.instance)
        return loaded.instance, loaded.graph
    if args.type is None or args.n is None:
        raise FairDivisionError("give an instance file or both --type and --n")
    return None, _named_graph(args.type, args.n)


def _graph(args) -> int:
    inst, G = _graph_from_args(args)
    if args.query == "cover":
        if args.approx:
            C = vertex_cover_2approx(G)
        else:
            C = min_vertex_cover_exact(G)
        _emit({"cover": sorted(C), "size": len(C), "exact": not args.approx})
        return OK
    if args.query == "diameter":
        dist = all_pairs_distance(G)
        connected = all(x != float("inf") for row in dist for x in row)
        _emit({"diameter": diameter(G, dist), "connected": connected})
        return OK
    if inst is None:
        raise FairDivisionError("validate-shape needs an instance file")
    core = _int_list(args.core) if args.core is not None else None
    try:
        st = SHAPES[args.shape](inst, G, core)
    except FairDivisionError as exc:
        _emit({"valid": False, "reason": str(exc)})
        return NEGATIVE
    _emit({"valid": True, "core_groups": [sorted(g) for g in st.core_groups], "outer": sorted(st.outer)})
    return OK


# --- parser -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="efxgraph", description="Graph-constrained fair allocation tools.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run a construction and print a verified allocation")
    s.add_argument("algorithm", choices=SOLVERS)
    s.add_argument("instance")
    s.add_argument("--center", type=int, default=0, help="star centre (0-based)")
    s.add_argument("--core", help="comma-separated core agents")
    s.add_argument("--cover", help="comma-separated vertex cover for vcrr")
    s.add_argument("--component", type=int, default=0, help="any agent of the component vcrr should serve")
    s.add_argument("--budget", type=int, default=10**7)
    s.add_argument("--max-rounds", type=int, default=1000)
    s.add_argument("--no-skip", action="store_true", help="sweep: also redo edges without strong envy")
    s.add_argument("--include-last-edge", action="store_true")
    s.add_argument("-o", "--output", help="write instance plus allocation as JSON")
    s.set_defaults(func=_solve)

    v = sub.add_parser("verify", help="check G-EFX or hidden envy of an allocation")
    v.add_argument("property", choices=("efx", "hef"))
    v.add_argument("instance")
    v.add_argument("--allocation", help="JSON list of bundles, inline or as a file path")
    v.add_argument("--hidden", help="comma-separated hidden goods")
    v.add_argument("--uniform", action="store_true")
    v.set_defaults(func=_verify)

    mh = sub.add_parser("minhide", help="smallest hidden set for an allocation")
    mh.add_argument("instance")
    mh.add_argument("--allocation")
    mh.add_argument("--uniform", action="store_true")
    mh.set_defaults(func=_minhide)

    g = sub.add_parser("gen", help="write a generated instance")
    g.add_argument("family", choices=("random", "lowerbound", "hiddennottight"))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=0)
    g.add_argument("--max-value", type=int, default=1000)
    g.add_argument("--kind-mix", choices=("goods", "chores", "mixed"), default="goods")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--graph", choices=("path", "star", "complete", "hiddennottight"), default="path")
    g.add_argument("--scale", type=int, help="lowerbound: number of goods (default n**3)")
    g.add_argument("-o", "--output")
    g.set_defaults(func=_gen)

    b = sub.add_parser("sweep-batch", help="sweep many path instances and export potentials")
    b.add_argument("instances", nargs="*", help="JSON instance files")
    b.add_argument("--spliddit", help="CSV in the instance_id,agent,points... shape")
    b.add_argument("--random", type=int, default=0, help="also sweep this many seeded random instances")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--min-agents", type=int, default=0)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--max-rounds", type=int, default=1000)
    b.add_argument("--no-skip", action="store_true")
    b.add_argument("--include-last-edge", action="store_true")
    b.add_argument("--csv", help="per-round potentials output")
    b.set_defaults(func=_sweep_batch)

    gr = sub.add_parser("graph", help="graph queries")
    gr.add_argument("query", choices=("cover", "diameter", "validate-shape"))
    gr.add_argument("instance", nargs="?")
    gr.add_argument("--type", choices=("path", "star", "complete", "hiddennottight"))
    gr.add_argument("--n", type=int)
    gr.add_argument("--approx", action="store_true", help="cover: matching-based 2-approximation")
    gr.add_argument("--shape", choices=tuple(SHAPES), default="1")
    gr.add_argument("--core")
    gr.set_defaults(func=_graph)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK
    try:
        return args.func(args)
    except (FairDivisionError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
