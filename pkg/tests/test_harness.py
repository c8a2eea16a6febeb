import itertools
import json
from fractions import Fraction
from pathlib import Path

import pytest

from lapsep.criteria import Verdict, verdict
from lapsep.errors import LoopEdge, OutOfBounds, TooLarge, UnknownFamily
from lapsep.graph import apply_vertex_permutation, build_graph, density_matrix, from_bitmask, laplacian, to_bitmask
from lapsep.harness import (
    RECORD_FIELDS,
    analyze_graph,
    canonical_form,
    canonical_mask,
    counterexample_graph,
    enumerate_labeled_graphs,
    enumerate_records,
    family,
    parallel_map,
    parse_graph_file,
    records_to_csv,
    records_to_json,
    table4_report,
)
from lapsep.measures import concurrence_upper_bound, wootters_concurrence

DATA = Path(__file__).parent / "data"


def test_parse_graph_file(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("2 2\n1 1 2 2\n")
    assert parse_graph_file(path) == build_graph(2, 2, [((1, 1), (2, 2))])
    with pytest.raises(LoopEdge, match="line 2"):
        parse_graph_file(DATA / "loop.txt")
    assert parse_graph_file(DATA / "counterexample.txt") == counterexample_graph()
    assert parse_graph_file(DATA / "star.txt") == family("star", 2, 2)


def test_counterexample_graph():
    g = counterexample_graph()
    lap = laplacian(g).to_numpy()
    assert lap[4].tolist() == [0] * 9
    assert all(lap[i, i] == lap[i + 5, i + 5] == 1 and lap[i, i + 5] == -1 for i in range(4))
    rec = analyze_graph(g)
    assert rec.degree_criterion and rec.verdict == "ENTANGLED_PPT_REALIGNMENT"
    assert (rec.n1, rec.n2) == (0, 4) and rec.concurrence_bound == 1


def test_families():
    k4 = family("complete", 2, 2)
    assert len(k4.edges) == 6 and verdict(k4).verdict is Verdict.SEPARABLE_CERTIFIED
    star = family("star", 2, 2)
    assert all((1, 1) in e for e in star.edges)
    assert abs(wootters_concurrence(density_matrix(star)) - 1 / 3) < 1e-9
    tally = family("tallymark(3)", 2, 3)
    rep = verdict(tally)
    assert rep.verdict is Verdict.SEPARABLE_CERTIFIED
    assert [t.provenance.kind for t in rep.decomposition.terms] == ["cycle"] * 3
    assert family("tallymark:2", 2, 3) == family("tallymark2", 2, 3) == family("crisscross", 2, 3)
    assert family("TallyMark", 2, 4) == family("tallymark(4)", 2, 4)
    king = family("nearest_point_sample", 2, 3)
    assert len(king.edges) == 11  # 7 unit steps, 4 diagonals
    assert family("nearest_point_sample", 1, 3).edges == frozenset({((1, 1), (1, 2)), ((1, 2), (1, 3))})


def test_family_errors():
    with pytest.raises(UnknownFamily):
        family("wheel", 2, 2)
    with pytest.raises(UnknownFamily):
        family("star(3)", 2, 2)
    with pytest.raises(OutOfBounds):
        family("crisscross", 1, 4)
    with pytest.raises(OutOfBounds):
        family("tallymark(4)", 2, 3)
    with pytest.raises(OutOfBounds):
        family("complete", 1, 1)


def test_enumeration():
    gs = list(enumerate_labeled_graphs(2, 2))
    assert len(gs) == 63
    assert gs[0].edges == frozenset({((1, 1), (1, 2))})
    assert [to_bitmask(g) for g in gs] == list(range(1, 64))
    assert sum(1 for _ in enumerate_labeled_graphs(2, 3)) == 32767
    with pytest.raises(TooLarge):
        next(enumerate_labeled_graphs(3, 3))
    with pytest.raises(TooLarge):
        next(enumerate_labeled_graphs(2, 5, allow_large=True))
    assert next(enumerate_labeled_graphs(2, 4, allow_large=True)).n == 8


def test_canonical_form_examples():
    star = family("star", 2, 2)
    ids = {canonical_form(apply_vertex_permutation(star, perm)) for perm in itertools.permutations(range(1, 5))}
    assert len(ids) == 1
    k4 = family("complete", 2, 2)
    assert canonical_form(k4) == format(63, "x")
    assert len({canonical_form(g) for g in enumerate_labeled_graphs(2, 2)}) == 10
    with pytest.raises(TooLarge):
        canonical_form(family("complete", 3, 3))


@pytest.mark.parametrize("p,q,classes", [(1, 3, 3), (1, 5, 33), (2, 3, 155)])
def test_canonical_class_counts(p, q, classes):
    # nonisomorphic graphs with at least one edge on 3, 5 and 6 vertices
    n = p * q
    masks = range(1, 1 << (n * (n - 1) // 2))
    assert len({canonical_mask(m, n) for m in masks}) == classes


def test_canonical_form_invariant_and_idempotent():
    for mask in range(1, 1 << 15, 997):
        g = from_bitmask(2, 3, mask)
        cid = canonical_form(g)
        assert canonical_form(from_bitmask(2, 3, int(cid, 16))) == cid
        h = apply_vertex_permutation(g, [3, 6, 1, 5, 2, 4])
        assert canonical_form(h) == cid
        assert int(cid, 16) <= mask


def test_table4_report():
    rep = table4_report()
    assert rep.labeled_graphs == 63 and rep.class_count == 10
    ent = rep.entangled_classes
    assert len(ent) == 7
    assert sorted(Fraction(r.concurrence).limit_denominator(10) for r in ent) == sorted(
        Fraction(1, r.edges) for r in ent)
    assert sorted(round(1 / r.concurrence) for r in ent) == [1, 2, 3, 3, 3, 4, 5]
    assert rep.labeling_independent == {"complete": True, "star": True}
    assert rep.to_csv().splitlines()[0].startswith("class_id,edges")
    assert "7 classes admit entangled labelings" in rep.to_text()


def test_graph_record_fields_and_id():
    g = family("star", 2, 2)
    rec = analyze_graph(g)
    doc = json.loads(rec.to_json())
    assert tuple(doc) == RECORD_FIELDS
    assert from_bitmask(2, 2, int(doc["id"], 16)) == g
    assert rec.graph == g
    assert doc["concurrence_bound"] == "1/3" and doc["en"] == pytest.approx(1 / 3, abs=1e-12)
    assert doc["ln"] == 0.247543882859 and doc["ef"] == 0.187298598569
    assert doc["verdict"] == "ENTANGLED_NPT" and doc["class_id"] == canonical_form(g)
    assert Fraction(doc["concurrence_bound"]) == concurrence_upper_bound(g)
    big = json.loads(analyze_graph(family("complete", 3, 3)).to_json())
    assert big["class_id"] is None and big["concurrence"] is None


def test_records_csv_and_json_deterministic():
    first = enumerate_records(2, 2)
    second = enumerate_records(2, 2)
    assert records_to_csv(first) == records_to_csv(second)
    assert records_to_json(first) == records_to_json(second)
    lines = records_to_csv(first).splitlines()
    assert len(lines) == 64 and lines[0] == ",".join(RECORD_FIELDS)
    assert lines[1].startswith("1,2,2,\"1,1-1,2\",true,")
    assert [r["id"] for r in json.loads(records_to_json(first))] == [format(m, "x") for m in range(1, 64)]


def test_parallel_map_preserves_order():
    items = list(range(-50, 50))
    assert parallel_map(abs, items, workers=2) == [abs(x) for x in items]
    assert parallel_map(abs, [], workers=3) == []
    serial = records_to_json(enumerate_records(2, 2))
    assert records_to_json(enumerate_records(2, 2, workers=2)) == serial
