"""JSON instance files, Spliddit-style CSV ingestion, and CSV trace export.

Instance file layout::

    {
      "agents": 3,
      "items": [{"id": 0, "kind": "good"}, ...],
      "valuations": [
        {"type": "additive", "values": [9, "1/2", 0]},
        {"type": "table", "entries": [[[], 0], [[0], 1], ...]},
        {"type": "lexicographic", "priority": [2, 0, 1]}
      ],
      "graph": {"type": "path" | "star" | "complete" | "custom", "n": 3, "edges": [[0, 1]]},
      "allocation": [[0, 1], [2], []]          # optional
    }

Rationals are written as integers or ``"p/q"`` strings; floats are rejected.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

from .errors import InvalidInstance, RaggedRows
from .graphs import Graph, make_complete, make_path, make_star
from .model import Additive, Allocation, Instance, Item, Kind, Lexicographic, Table, to_fraction

SPLIDDIT_POINTS = 1000


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _rational(raw, where: str) -> Fraction:
    if isinstance(raw, float):
        raise InvalidInstance(f"{where}: float {raw!r} is not exact; write it as \"p/q\"")
    try:
        return to_fraction(raw)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidInstance(f"{where}: cannot read {raw!r} as a rational ({exc})") from None


def _field(doc: dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise InvalidInstance(f"{where}: missing field {key!r}")
    return doc[key]


@dataclass
class InstanceFile:
    instance: Instance
    graph: Graph
    allocation: Allocation | None = None


def _parse_valuation(doc, m: int, where: str):
    kind = _field(doc, "type", where)
    if kind == "additive":
        vals = _field(doc, "values", where)
        if not isinstance(vals, list) or len(vals) != m:
            raise InvalidInstance(f"{where}.values: expected a list of {m} rationals")
        return Additive(tuple(_rational(x, f"{where}.values[{g}]") for g, x in enumerate(vals)))
    if kind == "table":
        entries = _field(doc, "entries", where)
        pairs = []
        for k, e in enumerate(entries):
            if not (isinstance(e, list) and len(e) == 2 and isinstance(e[0], list)):
                raise InvalidInstance(f"{where}.entries[{k}]: expected [item-id-list, rational]")
            pairs.append((e[0], _rational(e[1], f"{where}.entries[{k}]")))
        try:
            return Table.from_entries(m, pairs)
        except InvalidInstance as exc:
            raise InvalidInstance(f"{where}: {exc}") from None
    if kind == "lexicographic":
        try:
            return Lexicographic(tuple(_field(doc, "priority", where)))
        except InvalidInstance as exc:
            raise InvalidInstance(f"{where}: {exc}") from None
    raise InvalidInstance(f"{where}.type: unknown valuation type {kind!r}")


def _parse_graph(doc, n: int) -> Graph:
    if doc is None:
        return make_complete(n)
    kind = _field(doc, "type", "graph")
    gn = doc.get("n", n)
    if gn != n:
        raise InvalidInstance(f"graph.n: {gn} vertices for {n} agents")
    if kind == "path":
        return make_path(n)
    if kind == "star":
        return make_star(n)
    if kind == "complete":
        return make_complete(n)
    if kind == "custom":
        edges = _field(doc, "edges", "graph")
        return Graph.from_edges(n, edges)
    raise InvalidInstance(f"graph.type: unknown graph type {kind!r}")


def load_document(doc: dict) -> InstanceFile:
    n = _field(doc, "agents", "instance")
    if not isinstance(n, int) or n < 1:
        raise InvalidInstance(f"agents: expected a positive integer, got {n!r}")
    raw_items = _field(doc, "items", "instance")
    kinds: dict = {}
    for k, it in enumerate(raw_items):
        where = f"items[{k}]"
        gid = _field(it, "id", where)
        try:
            kind = Kind(it.get("kind", "good"))
        except ValueError:
            raise InvalidInstance(f"{where}.kind: expected 'good' or 'chore', got {it.get('kind')!r}") from None
        if gid in kinds and kinds[gid] is not kind:
            raise InvalidInstance(f"{where}: item {gid} listed as both good and chore")
        if gid in kinds:
            raise InvalidInstance(f"{where}: item {gid} listed twice")
        kinds[gid] = kind
    if sorted(kinds) != list(range(len(kinds))):
        raise InvalidInstance(f"items: ids must be 0..{len(kinds) - 1}")
    m = len(kinds)
    items = tuple(Item(g, kinds[g]) for g in range(m))
    raw_vals = _field(doc, "valuations", "instance")
    if len(raw_vals) != n:
        raise InvalidInstance(f"valuations: {len(raw_vals)} entries for {n} agents")
    vals = tuple(_parse_valuation(v, m, f"valuations[{i}]") for i, v in enumerate(raw_vals))
    inst = Instance(n, items, vals)
    graph = _parse_graph(doc.get("graph"), n)
    alloc = doc.get("allocation")
    return InstanceFile(inst, graph, Allocation(tuple(alloc)) if alloc is not None else None)


def read_instance_file(path) -> InstanceFile:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstance(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return load_document(doc)


def parse_instance(path) -> tuple:
    f = read_instance_file(path)
    return f.instance, f.graph


def dump_valuation(v) -> dict:
    if isinstance(v, Additive):
        return {"type": "additive", "values": [frac_str(x) for x in v.values]}
    if isinstance(v, Table):
        entries = [[[g for g in range(v.m) if mask >> g & 1], frac_str(x)] for mask, x in enumerate(v.values)]
        return {"type": "table", "entries": entries}
    return {"type": "lexicographic", "priority": list(v.priority)}


def dump_graph(G: Graph) -> dict:
    return {"type": "custom", "n": G.n, "edges": [list(e) for e in G.sorted_edges()]}


def dump_instance(inst: Instance, G: Graph | None = None, allocation: Allocation | None = None) -> dict:
    doc = {
        "agents": inst.n,
        "items": [{"id": it.id, "kind": it.kind.value} for it in inst.items],
        "valuations": [dump_valuation(v) for v in inst.valuations],
    }
    if G is not None:
        doc["graph"] = dump_graph(G)
    if allocation is not None:
        doc["allocation"] = allocation.as_lists()
    return doc


def write_instance(path, inst: Instance, G: Graph | None = None, allocation: Allocation | None = None) -> None:
    Path(path).write_text(json.dumps(dump_instance(inst, G, allocation), indent=2) + "\n", encoding="utf-8")


# --- Spliddit-shaped CSV -----------------------------------------------------------


class Problem(NamedTuple):
    id: str
    instance: Instance
    graph: Graph


def ingest_spliddit(path) -> list:
    """Read goods problems from a CSV with one row per (problem, agent).

    Row layout: ``instance_id, agent, points_0, points_1, ...``.  A header
    row whose first cell is ``instance_id`` is skipped.  Agents of a problem
    are ordered by their ``agent`` value and placed on a path.  Point totals
    other than 1000 only produce a warning.
    """
    groups: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            row = [c.strip() for c in row]
            if not row or not any(row):
                continue
            if row[0] == "instance_id":
                continue
            if len(row) < 2:
                raise InvalidInstance(f"line {lineno}: need instance_id and agent columns")
            try:
                agent = int(row[1])
                points = [int(x) for x in row[2:]]
            except ValueError as exc:
                raise InvalidInstance(f"line {lineno}: {exc}") from None
            if any(p < 0 for p in points):
                raise InvalidInstance(f"line {lineno}: negative points")
            groups.setdefault(row[0], []).append((agent, points, lineno))
    problems = []
    for pid, rows in groups.items():
        widths = {len(p) for _, p, _ in rows}
        if len(widths) != 1:
            raise RaggedRows(f"problem {pid}: rows have {sorted(widths)} goods (lines {[r[2] for r in rows]})")
        if len({a for a, _, _ in rows}) != len(rows):
            raise InvalidInstance(f"problem {pid}: an agent appears twice")
        rows.sort(key=lambda r: r[0])
        for agent, points, lineno in rows:
            if sum(points) != SPLIDDIT_POINTS:
                warnings.warn(f"problem {pid}, agent {agent} (line {lineno}): points sum to {sum(points)}")
        inst = Instance.additive([p for _, p, _ in rows])
        problems.append(Problem(pid, inst, make_path(inst.n)))
    return problems


def write_spliddit(path, problems) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        for pid, inst in problems:
            for a, v in enumerate(inst.valuations):
                w.writerow([pid, a, *(frac_str(x) for x in v.values)])


TRACE_COLUMNS = ("instance_id", "round", "phi1", "phi2", "phi3")


def write_trace_csv(path_or_fh, results) -> None:
    """Potentials per round; round 0 is the starting allocation."""
    own = isinstance(path_or_fh, (str, Path))
    fh = open(path_or_fh, "w", newline="", encoding="utf-8") if own else path_or_fh
    try:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for r in results:
            rows = [r.trace.initial] + list(r.trace.potentials)
            for t, (p1, p2, p3) in enumerate(rows):
                w.writerow([r.instance_id, t, frac_str(p1), frac_str(p2), frac_str(p3)])
    finally:
        if own:
            fh.close()


def read_trace_csv(path) -> dict:
    out: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["instance_id"], []).append(
                tuple(Fraction(row[c]) for c in ("phi1", "phi2", "phi3"))
            )
    return out
