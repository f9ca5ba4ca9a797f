"""Per-instance runs: normalize, weigh, enumerate, and collect verdicts."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations

from .oracle import (
    Verdict,
    check_claim1,
    check_global_bound,
    check_isolation,
    check_lemma1,
    check_lemma2,
    decompose_symmetric_difference,
    enumerate_pms,
    partition_classes,
    proof_orientation_check,
)
from .schema import EmbeddedGraph, Matching, induced_weights, matchings_correspond, normalize
from .weights import CombinedWeights, WeightFunction, build_family, combine

# normalized graphs grow dummy vertices, so enumeration is bounded by count of
# matchings in practice rather than by vertex count
PREPARED_LIMIT = 64
ORIENTATION_PAIRS = 40


@dataclass(frozen=True)
class Prepared:
    original: EmbeddedGraph
    normalized: EmbeddedGraph
    cmap: dict[int, tuple[int, ...]]
    combined: CombinedWeights

    @property
    def graph(self) -> EmbeddedGraph:
        """The normalized graph, oriented L to R."""
        return self.combined.graph


def prepare(g: EmbeddedGraph, tight: bool = True, sigma_mode: str = "unprimed") -> Prepared:
    h, cmap = normalize(g)
    return Prepared(g, h, cmap, combine(h, tight=tight, sigma_mode=sigma_mode))


def same_class_pairs(ms: list[Matching], genus: int):
    for members in partition_classes(ms, genus).classes.values():
        yield from combinations(members, 2)


def ablated(comb: CombinedWeights) -> WeightFunction:
    """w_comb with the side weight removed, used to show the side term matters."""
    values = {eid: v * comb.s_inner for eid, v in comb.w_pl.values.items()}
    return WeightFunction("w_comb-ablated", values)


def check_normalization(prep: Prepared, ms_norm: list[Matching]) -> Verdict:
    """Matchings biject across normalization and induced weights keep minima."""
    if prep.normalized.n == prep.original.n:
        return Verdict("normalization", True, "already normalized")
    ms_orig = enumerate_pms(prep.original, limit=PREPARED_LIMIT)
    if len(ms_orig) != len(ms_norm):
        return Verdict("normalization", False, f"{len(ms_orig)} matchings before, {len(ms_norm)} after")
    base = prep.combined.base
    pulled, offset = induced_weights(prep.cmap, base.values)
    images = set()
    for m in ms_norm:
        image = matchings_correspond(prep.original, prep.normalized, prep.cmap, m)
        images.add(image.edges)
        if base.total(m.edges) != sum(pulled[e] for e in image.edges) + offset:
            return Verdict("normalization", False, f"induced weight mismatch on {sorted(image.edges)}")
    if images != {m.edges for m in ms_orig}:
        return Verdict("normalization", False, "correspondence is not onto")
    return Verdict("normalization", True, f"{len(ms_norm)} matchings")


def verify_instance(
    g: EmbeddedGraph,
    tight: bool = True,
    sigma_mode: str = "unprimed",
    mode: str = "oracle-assisted",
    ablate: bool = False,
) -> list[Verdict]:
    """All checks on one instance; ``ablate`` adds the side-weight control."""
    prep = prepare(g, tight, sigma_mode)
    d, comb = prep.graph, prep.combined
    ms = enumerate_pms(d, limit=PREPARED_LIMIT)
    out = [check_normalization(prep, ms)]

    pairs = list(same_class_pairs(ms, d.genus))
    bad = [v for v in (check_lemma2(d, a, b) for a, b in pairs) if not v.passed]
    out.append(bad[0] if bad else Verdict("lemma2", True, f"{len(pairs)} pairs"))

    l1 = check_lemma1(d, comb.w_comb, ms)
    out.append(l1)
    if not l1.passed:
        m1, m2, _ = l1.witness
        out.append(check_claim1(d, m1, m2, comb.w_comb))
    if ablate:
        v = check_lemma1(d, ablated(comb), ms)
        out.append(Verdict("lemma1-ablated", v.passed, v.detail, v.witness))
    out.append(check_global_bound(d, comb.base, ms))

    tally: Counter = Counter()
    first_fail = None
    for a, b in pairs[:ORIENTATION_PAIRS]:
        dec = decompose_symmetric_difference(d, a, b)
        v = proof_orientation_check(d, dec, comb.sigma, comb.w_comb, comb.embedding)
        tally[v.passed] += 1
        if not v.passed and first_fail is None:
            first_fail = v
    out.append(first_fail or Verdict("orientation", True, f"{tally[True]} families"))

    fam = build_family(prep.normalized, mode, tight=tight, sigma_mode=sigma_mode,
                       enumerate_fn=lambda _g: ms)
    out.append(check_isolation(d, fam, ms).verdict())
    return out
