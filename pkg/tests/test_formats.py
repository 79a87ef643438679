import json
import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import P3_SPLIT_ROWS
from efxgraph.errors import InvalidInstance, RaggedRows
from efxgraph.formats import (
    TRACE_COLUMNS,
    dump_instance,
    frac_str,
    ingest_spliddit,
    load_document,
    parse_instance,
    read_instance_file,
    read_trace_csv,
    write_instance,
    write_spliddit,
    write_trace_csv,
)
from efxgraph.generators import KIND_MIXES, gen_path_instance, gen_random, random_connected_graph
from efxgraph.graphs import make_path
from efxgraph.model import Additive, Instance, Item, Kind, Lexicographic, Table
from efxgraph.sweeping import run_batch


def test_p3_split_fixture_parses_to_table(fixtures_dir):
    inst, G = parse_instance(fixtures_dir / "p3_split.json")
    assert [list(v.values) for v in inst.valuations] == P3_SPLIT_ROWS
    assert G == make_path(3)
    assert read_instance_file(fixtures_dir / "p3_split.json").allocation.as_lists() == [[0, 1], [4, 5], [2, 3]]


def test_round_trip_mixed_valuations(tmp_path):
    items = (Item(0), Item(1), Item(2, Kind.CHORE))
    table = Table.from_entries(2, [([], 0), ([0], 1), ([1], Fraction(1, 3)), ([0, 1], 2)])
    inst2 = Instance(2, (Item(0), Item(1)), (table, Additive((Fraction(7, 2), Fraction(0)))))
    inst3 = Instance(2, items, (Additive((Fraction(1, 2), Fraction(3), Fraction(-5, 7))), Lexicographic((2, 0, 1))))
    for inst in (inst2, inst3):
        G = random_connected_graph(inst.n, random.Random(0))
        path = tmp_path / "x.json"
        write_instance(path, inst, G)
        again, G2 = parse_instance(path)
        assert again == inst and G2 == G


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 7), st.sampled_from(KIND_MIXES), st.integers(0, 10**6))
def test_round_trip_random(n, m, mix, seed):
    inst = gen_random(n, m, 50, mix, seed)
    assert load_document(json.loads(json.dumps(dump_instance(inst)))).instance == inst


def _doc(**overrides):
    doc = {
        "agents": 2,
        "items": [{"id": 0, "kind": "good"}, {"id": 1, "kind": "good"}],
        "valuations": [{"type": "additive", "values": [1, "1/2"]}, {"type": "additive", "values": [0, 3]}],
        "graph": {"type": "complete", "n": 2},
    }
    doc.update(overrides)
    return doc


def test_valid_document():
    f = load_document(_doc())
    assert f.instance.valuations[0].values == (1, Fraction(1, 2))


@pytest.mark.parametrize("bad, message", [
    ({"valuations": [{"type": "additive", "values": [-1, 0]}, {"type": "additive", "values": [0, 3]}]}, "negative"),
    ({"valuations": [{"type": "additive", "values": [0.5, 0]}, {"type": "additive", "values": [0, 3]}]}, r"valuations\[0\]\.values\[0\]"),
    ({"valuations": [{"type": "additive", "values": [1]}, {"type": "additive", "values": [0, 3]}]}, r"valuations\[0\]\.values"),
    ({"valuations": [{"type": "weird"}, {"type": "additive", "values": [0, 3]}]}, "unknown valuation type"),
    ({"items": [{"id": 0, "kind": "good"}, {"id": 0, "kind": "chore"}]}, "both good and chore"),
    ({"items": [{"id": 0, "kind": "gift"}, {"id": 1}]}, r"items\[0\]\.kind"),
    ({"graph": {"type": "path", "n": 5}}, "graph.n"),
    ({"agents": 0}, "agents"),
])
def test_invalid_documents(bad, message):
    with pytest.raises(InvalidInstance, match=message):
        load_document(_doc(**bad))


def test_missing_field():
    doc = _doc()
    del doc["valuations"]
    with pytest.raises(InvalidInstance, match="valuations"):
        load_document(doc)


def test_malformed_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"agents": 2,\n  "items": [}\n')
    with pytest.raises(InvalidInstance, match="line 2"):
        read_instance_file(p)


def test_frac_str():
    assert frac_str(Fraction(6, 4)) == "3/2" and frac_str(Fraction(-4, 2)) == "-2"


# --- Spliddit-shaped CSV -----------------------------------------------------------------------------


def test_spliddit_synthetic_fixture(fixtures_dir):
    problems = ingest_spliddit(fixtures_dir / "spliddit_synthetic.csv")
    assert [p.id for p in problems] == ["a", "b", "c"]
    b = problems[1]
    # rows are reordered by agent number
    assert [list(v.values) for v in b.instance.valuations] == [[0, 0, 500, 500], [500, 500, 0, 0]]
    assert all(p.graph == make_path(p.instance.n) for p in problems)


def test_spliddit_two_agents_three_goods(tmp_path):
    p = tmp_path / "hand.csv"
    p.write_text("x,1,600,300,100\nx,2,0,500,500\n")
    (prob,) = ingest_spliddit(p)
    assert prob.id == "x" and prob.instance.n == 2 and prob.instance.m == 3
    assert prob.instance.valuations[0].values == (600, 300, 100)
    assert prob.instance.valuations[1].values == (0, 500, 500)
    assert prob.graph.edges == {(0, 1)}


def test_spliddit_single_and_empty(tmp_path):
    one = tmp_path / "one.csv"
    one.write_text("solo,0,1000\n")
    assert len(ingest_spliddit(one)) == 1
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert ingest_spliddit(empty) == []


def test_spliddit_ragged_rows(tmp_path):
    p = tmp_path / "ragged.csv"
    p.write_text("x,0,500,500\nx,1,1000\n")
    with pytest.raises(RaggedRows):
        ingest_spliddit(p)


def test_spliddit_point_total_only_warns(tmp_path):
    p = tmp_path / "off.csv"
    p.write_text("x,0,10,20\nx,1,500,500\n")
    with pytest.warns(UserWarning, match="sum to 30"):
        ingest_spliddit(p)


def test_spliddit_rejects_negative_points(tmp_path):
    p = tmp_path / "neg.csv"
    p.write_text("x,0,-10,1010\n")
    with pytest.raises(InvalidInstance, match="negative"):
        ingest_spliddit(p)


def test_spliddit_write_read_round_trip(tmp_path):
    rng = random.Random(3)
    probs = [(f"p{k}", gen_path_instance(rng, rng.randint(2, 5), 4)) for k in range(5)]
    path = tmp_path / "rt.csv"
    write_spliddit(path, probs)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        back = ingest_spliddit(path)
    assert [(p.id, p.instance) for p in back] == probs


# --- traces -------------------------------------------------------------------------------------------------


def test_trace_csv_reproduces_in_memory_potentials(tmp_path):
    rng = random.Random(12)
    insts = [(f"r{k}", gen_path_instance(rng, rng.randint(3, 6), rng.randint(3, 10))) for k in range(30)]
    results = run_batch(insts)
    path = tmp_path / "trace.csv"
    write_trace_csv(path, results)
    assert path.read_text().splitlines()[0] == ",".join(TRACE_COLUMNS)
    back = read_trace_csv(path)
    for r in results:
        assert back[r.instance_id] == [r.trace.initial] + r.trace.potentials
