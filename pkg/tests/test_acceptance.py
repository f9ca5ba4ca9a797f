"""Acceptance criteria, one test each.

Every test records a one-line detail; conftest prints a PASS/FAIL line per
criterion in the terminal summary.  Oracles here are independent of the code
under test where that is practical: shapely for areas, networkx for cycle
enumeration and bipartite matching, sympy for permutation signs.
"""

import random
import time
from collections import defaultdict
from itertools import permutations

import networkx as nx
import numpy as np
import shapely
import pytest
from sympy.combinatorics import Permutation

from pmisolate.corpus import corpus
from pmisolate.decider import build_matrix, decide_pm, exact_determinant, lowest_set_bit
from pmisolate.oracle import decompose_symmetric_difference, enumerate_pms, proof_orientation_check
from pmisolate.pipeline import PREPARED_LIMIT, ablated, prepare, same_class_pairs
from pmisolate.planar import cycle_area_check, embed_planar_subgraph, w_pl
from pmisolate.schema import induced_weights, matchings_correspond
from pmisolate.weights import build_family, fks_bit_budget


@pytest.fixture
def report(record_property):
    def emit(criterion: str, detail: str) -> None:
        record_property("criterion", criterion)
        record_property("detail", detail)
    return emit


def parity_signature(g, edge_ids) -> str:
    """Crossing parity per side pair, counted straight from the edges."""
    counts = [0] * (2 * g.genus)
    for eid in edge_ids:
        for ref in g.edge(eid).crossings:
            counts[ref.pair - 1] += 1
    return "".join(str(c % 2) for c in counts)


def small_instances(max_genus=1, max_n=16):
    for group in ("genus0", "genus1", "orientation", "normalization"):
        for entry in corpus(group):
            g = entry.build()
            if g.genus <= max_genus and g.n <= max_n:
                yield entry, g


def test_area_law(report):
    report("1 area-law", "")
    start = time.perf_counter()
    entries = corpus("area")
    assert len(entries) >= 200
    n_cycles = 0
    for entry in entries:
        g = entry.build()
        assert g.n <= 16 and not g.crossing_edges
        emb = embed_planar_subgraph(g)
        nxg = nx.Graph()
        by_pair = {}
        for e in g.planar_edges:
            nxg.add_edge(*e.endpoints)
            by_pair[frozenset(e.endpoints)] = e
        assert len(by_pair) == len(g.planar_edges)
        cycles, weights, coords, index = [], [], [], []
        for cyc in nx.simple_cycles(nxg, length_bound=12):
            darts = []
            weight = 0
            for k, v in enumerate(cyc):
                e = by_pair[frozenset((v, cyc[(k + 1) % len(cyc)]))]
                darts.append((e.id, v))
                rev = v != emb.endpoints[e.id][0]
                weight += w_pl(emb, e.id, reverse=rev)
                pts = emb.polyline(e.id, reverse=rev)[:-1]
                coords.extend(pts)
                index.extend([len(cycles)] * len(pts))
            cycles.append(darts)
            weights.append(weight)
        if not cycles:
            continue
        rings = shapely.linearrings(np.array(coords, dtype=float), indices=index)
        assert shapely.is_simple(rings).all()
        area2 = 2 * shapely.area(shapely.polygons(rings))
        assert (area2 == np.round(area2)).all() and (area2 > 0).all()
        expected = np.where(shapely.is_ccw(rings), area2, -area2).astype(np.int64)
        for darts, weight, want in zip(cycles, weights, expected.tolist()):
            assert weight == want, (entry.name, darts)
            # reversing every dart flips the sign
            back = [(eid, emb.endpoints[eid][1] if t == emb.endpoints[eid][0] else emb.endpoints[eid][0])
                    for eid, t in reversed(darts)]
            assert cycle_area_check(emb, darts) == want
            assert cycle_area_check(emb, back) == -want
            n_cycles += 2
    elapsed = time.perf_counter() - start
    report("1 area-law", f"{len(entries)} instances, {n_cycles} directed cycles, {elapsed:.1f}s")
    assert elapsed < 60


def test_lemma2_zero_signature(report):
    report("2 lemma2", "")
    n_inst = n_pairs = 0
    for entry, g in small_instances():
        prep = prepare(g)
        ms = enumerate_pms(prep.graph, limit=PREPARED_LIMIT)
        n_inst += 1
        for a, b in same_class_pairs(ms, prep.graph.genus):
            n_pairs += 1
            assert set(parity_signature(prep.graph, a.edges ^ b.edges)) <= {"0"}, entry.name
        # the same holds before normalization
        for a, b in same_class_pairs(enumerate_pms(g, limit=PREPARED_LIMIT), g.genus):
            assert set(parity_signature(g, a.edges ^ b.edges)) <= {"0"}, entry.name
    report("2 lemma2", f"{n_inst} instances, {n_pairs} same-class pairs, 0 failures")
    assert n_pairs > 0


def class_minima(ms, graph, w):
    best: dict[str, list[int]] = defaultdict(list)
    for m in ms:
        best[parity_signature(graph, m.edges)].append(w.total(m.edges))
    return {sig: vals.count(min(vals)) for sig, vals in best.items()}


def test_lemma1_class_minima(report):
    report("3 lemma1", "")
    n_inst = ablated_fails = 0
    for entry in corpus("genus1"):
        prep = prepare(entry.build())
        d = prep.graph
        ms = enumerate_pms(d, limit=PREPARED_LIMIT)
        if len(ms) < 2:
            continue
        n_inst += 1
        counts = class_minima(ms, d, prep.combined.w_comb)
        assert max(counts.values()) <= 1, (entry.name, counts)
        if max(class_minima(ms, d, ablated(prep.combined)).values()) > 1:
            ablated_fails += 1
    report("3 lemma1", f"{n_inst} instances with >=2 PMs, 0 failures; ablated control fails on {ablated_fails}")
    assert n_inst >= 100
    assert ablated_fails >= 1


def test_global_bound(report):
    report("4 global-bound", "")
    worst = {0: 0, 1: 0}
    for entry, g in small_instances():
        prep = prepare(g)
        ms = enumerate_pms(prep.graph, limit=PREPARED_LIMIT)
        if not ms:
            continue
        vals = [prep.combined.base.total(m.edges) for m in ms]
        count = vals.count(min(vals))
        worst[g.genus] = max(worst[g.genus], count)
        assert count <= 4 ** g.genus, entry.name
    report("4 global-bound", f"max minima genus0={worst[0]} (<=1), genus1={worst[1]} (<=4)")


def all_corpus():
    for group in ("genus0", "genus1", "orientation", "normalization", "decider"):
        for entry in corpus(group):
            yield entry


def test_fks_isolation(report):
    report("5 fks-isolation", "")
    n_inst = doubled = max_bits = 0
    for entry in all_corpus():
        prep = prepare(entry.build())
        ms = enumerate_pms(prep.graph, limit=PREPARED_LIMIT)
        if not ms:
            continue
        n_inst += 1
        fam = build_family(prep.normalized, "oracle-assisted", tight=True, enumerate_fn=lambda _g: ms)
        (member,) = fam.members
        vals = [member.weights.total(m.edges) for m in ms]
        assert vals.count(min(vals)) == 1, entry.name
        start = fks_bit_budget(len(fam.minima), len(prep.graph.edges) + 1)
        assert fam.doublings <= 1 and fam.bit_budget <= 2 * start, entry.name
        assert member.p.bit_length() <= fam.bit_budget
        doubled += fam.doublings
        max_bits = max(max_bits, member.p.bit_length())
    report("5 fks-isolation", f"{n_inst} instances isolated, {doubled} doublings, largest prime {max_bits} bits")


def hopcroft_karp_has_pm(g) -> bool:
    nxg = nx.MultiGraph()
    left = [v for v in g.vertices if g.side_of(v) == "L"]
    nxg.add_nodes_from(g.vertices)
    nxg.add_edges_from(e.endpoints for e in g.edges)
    mate = nx.bipartite.hopcroft_karp_matching(nx.Graph(nxg), top_nodes=left)
    return len(mate) == g.n


def test_decider_soundness(report):
    report("6 decider", "")
    start = time.perf_counter()
    entries = corpus("decider")
    assert len(entries) == 500
    yes = checked = 0
    for entry in entries:
        g = entry.build()
        assert g.n <= 20
        prep = prepare(g)
        fam = build_family(prep.normalized, "oracle-assisted", tight=True)
        res = decide_pm(prep.graph, fam)
        assert not res.alarm
        assert res.has_pm == hopcroft_karp_has_pm(prep.graph) == hopcroft_karp_has_pm(prep.original), entry.name
        yes += res.has_pm
        if res.has_pm:
            ms = enumerate_pms(prep.graph, limit=PREPARED_LIMIT)
            w = {mb.p: mb.weights for mb in fam.members}[res.witness_member]
            assert res.witness_weight == min(w.total(m.edges) for m in ms), entry.name
            checked += 1
    elapsed = time.perf_counter() - start
    report("6 decider", f"500/500 agree ({yes} with PM), {checked} witness weights exact, {elapsed:.1f}s")
    assert elapsed < 300


def test_lowest_bit_law(report):
    report("7 lowest-bit", "")
    n_inst = 0
    for entry in all_corpus():
        prep = prepare(entry.build())
        ms = enumerate_pms(prep.graph, limit=PREPARED_LIMIT)
        if not ms:
            continue
        fam = build_family(prep.normalized, "oracle-assisted", tight=True, enumerate_fn=lambda _g: ms)
        w = fam.members[0].weights
        vals = [w.total(m.edges) for m in ms]
        low = min(vals)
        if vals.count(low) != 1:
            continue
        for reduce in (True, False):
            mat = build_matrix(prep.graph, w, reduce=reduce)
            det = exact_determinant(mat.entries())
            assert lowest_set_bit(det) == low - mat.offset, (entry.name, reduce)
        n_inst += 1
    report("7 lowest-bit", f"{n_inst} certified instances, exact determinant, shifted and unshifted")
    assert n_inst > 0


def test_orientation(report):
    report("8 orientation", "")
    n_fam = 0
    for entry in corpus("orientation"):
        prep = prepare(entry.build())
        d, comb = prep.graph, prep.combined
        ms = enumerate_pms(d, limit=PREPARED_LIMIT)
        for a, b in same_class_pairs(ms, d.genus):
            dec = decompose_symmetric_difference(d, a, b)
            if not any(d.edge(e).crossings for e in dec.edges):
                continue
            assert parity_signature(d, dec.edges) == "0" * (2 * d.genus)
            rep = proof_orientation_check(d, dec, comb.sigma, comb.w_comb, comb.embedding).witness
            assert rep.directed and rep.tau_parity and rep.side_sum != 0, entry.name
            assert all(rep.cycle_weights), entry.name
            n_fam += 1
    report("8 orientation", f"{n_fam} crossing zero-signature families, all directed, odd tau, nonzero side sum")
    assert n_fam >= 50


def test_normalization_bijection(report):
    report("9 normalization", "")
    n_inst = 0
    for entry in all_corpus():
        g = entry.build()
        if g.is_normalized:
            continue
        prep = prepare(g)
        ms_norm = enumerate_pms(prep.normalized, limit=PREPARED_LIMIT)
        ms_orig = enumerate_pms(g, limit=PREPARED_LIMIT)
        assert len(ms_norm) == len(ms_orig), entry.name
        images = {matchings_correspond(g, prep.normalized, prep.cmap, m).edges for m in ms_norm}
        assert images == {m.edges for m in ms_orig}
        if ms_norm:
            base = prep.combined.base
            pulled, offset = induced_weights(prep.cmap, base.values)
            norm_vals = {m.edges: base.total(m.edges) for m in ms_norm}
            low = min(norm_vals.values())
            low_norm = {matchings_correspond(g, prep.normalized, prep.cmap, m).edges
                        for m in ms_norm if norm_vals[m.edges] == low}
            orig_vals = {m.edges: sum(pulled[e] for e in m.edges) for m in ms_orig}
            low_orig = min(orig_vals.values())
            assert low_orig + offset == low
            assert {k for k, v in orig_vals.items() if v == low_orig} == low_norm, entry.name
        n_inst += 1
    report("9 normalization", f"{n_inst} instances needing normalization, counts and minima preserved")
    assert n_inst > 0


def leibniz(m):
    n = len(m)
    total = 0
    for perm in permutations(range(n)):
        term = Permutation(list(perm)).signature()
        for i, j in enumerate(perm):
            term *= m[i][j]
        total += term
    return total


def test_exact_determinant(report):
    report("10 determinant", "")
    rng = random.Random(20261015)
    mismatches = 0
    for trial in range(1000):
        n = rng.randint(1, 6)
        style = trial % 3
        if style == 0:
            m = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        elif style == 1:
            m = [[rng.choice((0, 1 << rng.randint(0, 120))) for _ in range(n)] for _ in range(n)]
        else:
            m = [[rng.randint(-(1 << 80), 1 << 80) * rng.randint(0, 1) for _ in range(n)] for _ in range(n)]
        mismatches += exact_determinant(m) != leibniz(m)
    report("10 determinant", f"1000 random matrices up to 6x6, {mismatches} mismatches")
    assert mismatches == 0
