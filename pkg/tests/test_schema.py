import pytest

from pmisolate.generate import planar_grid, torus_cycle
from pmisolate.oracle import enumerate_pms
from pmisolate.schema import (
    Edge,
    EmbeddedGraph,
    SchemaError,
    SideRef,
    Signature,
    edge_signature,
    induced_weights,
    make_matching,
    matchings_correspond,
    normalize,
    set_signature,
    standard_sides,
)
from conftest import first_random, multi_crossing, shared_crossing_endpoint


def test_side_labels_round_trip():
    assert str(SideRef.parse("T3'")) == "T3'"
    assert SideRef.parse("T1").partner() == SideRef(1, True)
    with pytest.raises(SchemaError):
        SideRef.parse("T0")


def test_standard_sides_order():
    assert [str(s.ref) for s in standard_sides(2)] == ["T1", "T2", "T1'", "T2'", "T3", "T4", "T3'", "T4'"]


def test_signature_bits_and_xor():
    s = Signature.of_pair(3, 4)
    assert str(s) == "0010"
    assert s.bit(3) == 1 and s.bit(1) == 0
    assert (s ^ s).is_zero()
    assert Signature.from_bits("10").value == 2


def test_k5_edge_signatures(k5):
    assert str(edge_signature(k5, 9)) == "10"
    assert str(edge_signature(k5, 10)) == "01"
    assert str(edge_signature(k5, 1)) == "00"
    assert str(set_signature(k5, [9, 10])) == "11"
    assert str(set_signature(k5, [])) == "00"
    assert str(set_signature(k5, [9, 9])) == "00"


def test_unknown_edge_rejected(k5):
    with pytest.raises(SchemaError):
        edge_signature(k5, 99)


def test_validate_rejects_one_sided_crossing():
    g = torus_cycle(4)
    broken = EmbeddedGraph(
        g.n, g.edges, g.genus, g.sides,
        (g.crossing_lists[0], (), (), ()), g.rotation, g.partition,
    )
    with pytest.raises(SchemaError, match="T1"):
        broken.validate()


def test_validate_rejects_self_loop():
    g = EmbeddedGraph(1, (Edge(1, (1, 1)),), rotation=((1, 1),))
    with pytest.raises(SchemaError):
        g.validate()


def test_validate_rejects_bad_partition():
    g = planar_grid(2, 2)
    bad = EmbeddedGraph(g.n, g.edges, g.genus, g.sides, g.crossing_lists, g.rotation, ("L",) * 4)
    with pytest.raises(SchemaError, match="side L"):
        bad.validate()


def test_normalize_fixpoint():
    g = torus_cycle(4)
    h, cmap = normalize(g)
    assert h == g
    assert all(path == (eid,) for eid, path in cmap.items())


def test_normalize_splits_multi_crossing_edge():
    g = first_random(multi_crossing, n=8, genus=1, tracks=3, detach=0.8, base="grid")
    h, cmap = normalize(g)
    for e in g.edges:
        path = cmap[e.id]
        assert len(path) % 2 == 1
        if len(e.crossings) == 2:
            segs = [h.edge(s) for s in path]
            assert len(segs) == 3
            assert [len(s.crossings) for s in segs] == [1, 0, 1]
    assert all(len(e.crossings) <= 1 for e in h.edges)
    assert h.is_normalized


def test_normalize_separates_shared_endpoints():
    g = first_random(shared_crossing_endpoint, n=6, genus=1, tracks=3, base="grid")
    h, cmap = normalize(g)
    assert h.n > g.n
    assert not shared_crossing_endpoint(h)
    assert any(len(path) == 3 for path in cmap.values())
    assert len(enumerate_pms(g)) == len(enumerate_pms(h))


def test_matchings_correspond_bijection():
    g = first_random(lambda g: multi_crossing(g) and enumerate_pms(g),
                     n=8, genus=1, tracks=3, detach=0.8, base="grid")
    h, cmap = normalize(g)
    before = {m.edges for m in enumerate_pms(g)}
    after = {matchings_correspond(g, h, cmap, m).edges for m in enumerate_pms(h)}
    assert before == after


def test_matchings_correspond_rejects_non_matching():
    g = torus_cycle(4)
    h, cmap = normalize(g)
    with pytest.raises(SchemaError):
        matchings_correspond(g, h, cmap, [1])


def test_induced_weights_pull_back():
    cmap = {1: (1,), 2: (2, 3, 4)}
    pulled, offset = induced_weights(cmap, {1: 5, 2: 10, 3: 3, 4: 1})
    assert pulled == {1: 5, 2: 8}
    assert offset == 3


def test_matching_signature():
    g = torus_cycle(4)
    assert str(make_matching(g, [2, 4]).signature) == "10"
    assert str(make_matching(g, [1, 3]).signature) == "00"
