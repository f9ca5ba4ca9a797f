"""
Brute-force checks of the isolation argument on small instances.

Everything here works from an explicit list of perfect matchings, so it is
only usable at desk scale.  Verdicts are plain records that print as one
``instance check PASS|FAIL [witness]`` line each.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .planar import GridEmbedding, cycle_area_check
from .schema import (
    EmbeddedGraph,
    Matching,
    SchemaError,
    Signature,
    make_matching,
    set_signature,
)
from .weights import SigmaOrder, WeightFamily, WeightFunction, side_weights

ENUMERATION_LIMIT = 24


class EnumerationLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class Verdict:
    check: str
    passed: bool
    detail: str = ""
    witness: object = None

    @property
    def label(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def line(self, instance: str) -> str:
        return " ".join(x for x in (instance, self.check, self.label, self.detail) if x)


# ---------------------------------------------------------------------------
# enumeration

def enumerate_pms(
    g: EmbeddedGraph,
    weights: Sequence[WeightFunction] = (),
    limit: int = ENUMERATION_LIMIT,
) -> list[Matching]:
    """All perfect matchings, branching on the lowest uncovered vertex."""
    if g.n > limit:
        raise EnumerationLimitError(f"{g.n} vertices exceeds the enumeration limit {limit}")
    if g.n % 2:
        return []
    ends = {e.id: e.endpoints for e in g.edges}
    covered = [False] * (g.n + 1)
    chosen: list[int] = []
    found: list[frozenset[int]] = []

    def extend(start: int) -> None:
        v = start
        while v <= g.n and covered[v]:
            v += 1
        if v > g.n:
            found.append(frozenset(chosen))
            return
        covered[v] = True
        for eid in g.incident(v):
            a, b = ends[eid]
            w = b if a == v else a
            if not covered[w]:
                covered[w] = True
                chosen.append(eid)
                extend(v + 1)
                chosen.pop()
                covered[w] = False
        covered[v] = False

    extend(1)
    return [make_matching(g, ids, weights) for ids in found]


# ---------------------------------------------------------------------------
# classes

@dataclass(frozen=True)
class ClassPartition:
    classes: Mapping[Signature, tuple[Matching, ...]]
    # per class: minimum weight and the matchings attaining it
    minimum: Mapping[Signature, int] = field(default_factory=dict)
    achievers: Mapping[Signature, tuple[Matching, ...]] = field(default_factory=dict)

    def sizes(self) -> dict[str, int]:
        return {str(s): len(ms) for s, ms in self.classes.items()}


def partition_classes(
    ms: Iterable[Matching], genus: int, weight: WeightFunction | None = None
) -> ClassPartition:
    width = 2 * genus
    groups: dict[Signature, list[Matching]] = defaultdict(list)
    for m in ms:
        if m.signature.width != width:
            raise SchemaError("matching signature width disagrees with the genus")
        groups[m.signature].append(m)
    classes = {s: tuple(v) for s, v in sorted(groups.items(), key=lambda kv: kv[0].value)}
    minimum, achievers = {}, {}
    if weight is not None:
        for s, members in classes.items():
            vals = [weight.total(m.edges) for m in members]
            low = min(vals)
            minimum[s] = low
            achievers[s] = tuple(m for m, v in zip(members, vals) if v == low)
    return ClassPartition(classes, minimum, achievers)


# ---------------------------------------------------------------------------
# symmetric differences

@dataclass(frozen=True)
class AlternatingCycle:
    # darts[i] = (edge id, tail vertex); M1 edges are walked from their stored
    # tail and M2 edges against it, so the darts chain head to tail
    darts: tuple[tuple[int, int], ...]
    first: frozenset[int]
    second: frozenset[int]

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(t for _, t in self.darts)

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.darts)


@dataclass(frozen=True)
class SymDiffDecomposition:
    cycles: tuple[AlternatingCycle, ...]

    @property
    def edges(self) -> frozenset[int]:
        return frozenset(e for c in self.cycles for e in c.edges)


def decompose_symmetric_difference(
    g: EmbeddedGraph, m1: Matching | Iterable[int], m2: Matching | Iterable[int]
) -> SymDiffDecomposition:
    a = m1.edges if isinstance(m1, Matching) else frozenset(m1)
    b = m2.edges if isinstance(m2, Matching) else frozenset(m2)
    diff = a ^ b
    at: dict[int, list[int]] = defaultdict(list)
    for eid in diff:
        for v in g.edge(eid).endpoints:
            at[v].append(eid)
    for v, es in at.items():
        if len(es) != 2 or len(set(es) & a) != 1:
            raise SchemaError(f"symmetric difference is not alternating at vertex {v}")
    cycles = []
    used: set[int] = set()
    for start_edge in sorted(diff & a):
        if start_edge in used:
            continue
        darts = []
        eid = start_edge
        v = g.edge(eid).tail
        while True:
            used.add(eid)
            darts.append((eid, v))
            v = g.edge(eid).other(v)
            nxt = next(x for x in at[v] if x != eid)
            if nxt == start_edge:
                break
            eid = nxt
        if len(darts) % 2:
            raise SchemaError("odd alternating cycle")
        es = {e for e, _ in darts}
        cycles.append(AlternatingCycle(tuple(darts), frozenset(es & a), frozenset(es & b)))
    return SymDiffDecomposition(tuple(cycles))


def dart_weight(g: EmbeddedGraph, w: WeightFunction, dart: tuple[int, int]) -> int:
    eid, tail = dart
    return w(eid, reverse=(g.edge(eid).tail != tail))


def cycle_weight(g: EmbeddedGraph, w: WeightFunction, darts: Iterable[tuple[int, int]]) -> int:
    return sum(dart_weight(g, w, d) for d in darts)


def format_witness(g: EmbeddedGraph, m1: Matching, m2: Matching, dec: SymDiffDecomposition) -> str:
    """Counterexample record in the line style of the instance format."""
    out = [
        "matching1 " + " ".join(map(str, sorted(m1.edges))) + f" sign={m1.signature}",
        "matching2 " + " ".join(map(str, sorted(m2.edges))) + f" sign={m2.signature}",
    ]
    for c in dec.cycles:
        sig = set_signature(g, c.edges)
        out.append("cycle " + " ".join(f"{e}@{t}" for e, t in c.darts) + f" sign={sig}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# lemma checks

def check_lemma1(
    g: EmbeddedGraph, w: WeightFunction, ms: Sequence[Matching] | None = None
) -> Verdict:
    """At most one minimum-weight perfect matching per signature class."""
    if ms is None:
        ms = enumerate_pms(g)
    part = partition_classes(ms, g.genus, w)
    for sig, best in part.achievers.items():
        if len(best) > 1:
            m1, m2 = best[0], best[1]
            dec = decompose_symmetric_difference(g, m1, m2)
            return Verdict(
                "lemma1", False,
                f"class {sig} has {len(best)} minima of weight {part.minimum[sig]}",
                (m1, m2, dec),
            )
    return Verdict("lemma1", True, f"{len(part.classes)} classes")


def check_lemma2(g: EmbeddedGraph, m1: Matching, m2: Matching) -> Verdict:
    if m1.signature != m2.signature:
        raise ValueError("matchings belong to different classes")
    sig = set_signature(g, m1.edges ^ m2.edges)
    return Verdict("lemma2", sig.is_zero(), f"sign={sig}")


def exchange(m1: Matching, cycle: AlternatingCycle) -> frozenset[int]:
    """Swap the M1 edges of one alternating cycle for its M2 edges."""
    return (m1.edges - cycle.first) | cycle.second


def check_claim1(
    g: EmbeddedGraph,
    m1: Matching,
    m2: Matching,
    w: WeightFunction,
    class_minimum: int | None = None,
) -> Verdict:
    """Each alternating cycle of two class minima splits into equal halves.

    When a cycle is unbalanced the exchange along it gives a lighter perfect
    matching; the witness records it with its signature, which shows whether
    it stays inside the class.
    """
    if m1.signature != m2.signature:
        raise ValueError("matchings belong to different classes")
    w1, w2 = w.total(m1.edges), w.total(m2.edges)
    if w1 != w2 or (class_minimum is not None and w1 != class_minimum):
        raise ValueError("both matchings must be minimum in their class")
    dec = decompose_symmetric_difference(g, m1, m2)
    for k, c in enumerate(dec.cycles):
        a, b = w.total(c.first), w.total(c.second)
        if a != b:
            base, swap = (m1, c) if a > b else (m2, _swap_sides(c))
            lighter = make_matching(g, exchange(base, swap))
            same = lighter.signature == m1.signature
            return Verdict(
                "claim1", False,
                f"cycle {k} halves weigh {a} and {b}; exchange gives weight "
                f"{w.total(lighter.edges)} with sign={lighter.signature}"
                + (" (same class)" if same else " (other class)"),
                (dec, lighter),
            )
    return Verdict("claim1", True, f"{len(dec.cycles)} cycles balanced")


def _swap_sides(c: AlternatingCycle) -> AlternatingCycle:
    return AlternatingCycle(c.darts, c.second, c.first)


def check_global_bound(
    g: EmbeddedGraph, w_und: WeightFunction, ms: Sequence[Matching] | None = None
) -> Verdict:
    if ms is None:
        ms = enumerate_pms(g)
    bound = 4 ** g.genus
    if not ms:
        return Verdict("global-bound", True, "no perfect matching")
    vals = [w_und.total(m.edges) for m in ms]
    count = vals.count(min(vals))
    return Verdict("global-bound", count <= bound, f"{count} minima, bound {bound}")


# ---------------------------------------------------------------------------
# the reorientation argument

@dataclass(frozen=True)
class OrientationReport:
    edge_order: tuple[int, ...]
    boundary_vertices: tuple[int, ...]
    edge_prop: bool
    tau_parity: bool
    step2_consistent: bool
    directed: bool
    side_sum: int | None
    cycle_weights: tuple[int, ...]
    planar_branch: bool = False
    # w_side(e_i) < -w_side(e_{i+1}) for odd i, in Step 1 directions
    sigma_chain: bool = True

    @property
    def passed(self) -> bool:
        if self.planar_branch:
            return all(self.cycle_weights)
        return (
            self.edge_prop and self.tau_parity and self.step2_consistent and self.directed
            and self.sigma_chain and self.side_sum != 0
        )


def proof_orientation_check(
    g: EmbeddedGraph,
    cycles: SymDiffDecomposition,
    sigma: SigmaOrder,
    w: WeightFunction | None = None,
    emb: GridEmbedding | None = None,
) -> Verdict:
    """Run the two-step reorientation on a zero-signature family of cycles.

    Step 1 numbers the crossing edges of the cycles clockwise from the tail
    of T1 and points odd ones away from their unprimed-side endpoint, even
    ones towards it.  Step 2 orients each planar path so it continues the
    crossing edge arriving at one end and feeds the one leaving the other.
    Checks the parity facts the argument relies on, that Step 2 yields
    directed cycles, and that their total side weight is nonzero.
    """
    all_edges = [e for c in cycles.cycles for e in c.edges]
    if not set_signature(g, all_edges).is_zero():
        raise ValueError("cycle family has nonzero total signature")
    crossing = [e for e in all_edges if g.edge(e).crossings]
    ends_seen: set[int] = set()
    for eid in crossing:
        e = g.edge(eid)
        if len(e.crossings) > 1 or ends_seen & set(e.endpoints):
            raise ValueError("crossing edges of the cycles must be normalized first")
        ends_seen.update(e.endpoints)

    if not crossing:
        weights = []
        for c in cycles.cycles:
            if emb is not None:
                weights.append(cycle_area_check(emb, c.darts))
            elif w is not None:
                weights.append(cycle_weight(g, w, c.darts))
        rep = OrientationReport((), (), True, True, True, True, None, tuple(weights), planar_branch=True)
        return Verdict("orientation", rep.passed, "planar cycles, weights " + _fmt(weights), rep)

    # Step 1: clockwise numbering, restricted to the cycles' crossing edges
    in_family = set(crossing)
    order = []
    for side, lst in zip(g.sides, g.crossing_lists):
        if sigma.mode == "unprimed" and side.ref.primed:
            continue
        for eid in lst:
            if eid in in_family and eid not in order:
                order.append(eid)
    directed: dict[int, tuple[int, int]] = {}
    for i, eid in enumerate(order, 1):
        e = g.edge(eid)
        u = e.tail if not e.crossing.primed else e.head  # endpoint on the unprimed side
        v = e.other(u)
        directed[eid] = (u, v) if i % 2 else (v, u)

    # boundary order X of the endpoints and the parity of tails
    xs: list[int] = []
    for side, lst in zip(g.sides, g.crossing_lists):
        for eid in lst:
            if eid in in_family:
                e = g.edge(eid)
                on_this = e.tail if e.crossing == side.ref else e.head
                xs.append(on_this)
    pos = {v: k for k, v in enumerate(xs, 1)}
    edge_prop = all(pos[t] % 2 == 1 and pos[h] % 2 == 0 for t, h in directed.values())

    # planar paths between boundary vertices
    darts_of: dict[int, list[int]] = defaultdict(list)
    for c in cycles.cycles:
        for eid in c.edges:
            if eid not in in_family:
                for x in g.edge(eid).endpoints:
                    darts_of[x].append(eid)
    tau: dict[int, int] = {}
    paths: dict[int, list[tuple[int, int]]] = {}
    for x in xs:
        if x in tau:
            continue
        path = []
        v, prev = x, None
        while True:
            nxt = [e for e in darts_of[v] if e != prev]
            if not nxt:
                break
            eid = nxt[0]
            path.append((eid, v))
            v = g.edge(eid).other(v)
            prev = eid
            if v in pos:
                break
        tau[x], tau[v] = v, x
        paths[x] = path
    tau_parity = all(abs(pos[a] - pos[b]) % 2 == 1 for a, b in tau.items())

    # Step 2: orient each planar path from a head to a tail
    heads = {h for _, h in directed.values()}
    oriented: dict[int, tuple[int, int]] = dict(directed)
    step2 = True
    for x, path in paths.items():
        y = tau[x]
        if (x in heads) == (y in heads):
            step2 = False
        forward = x in heads
        for eid, frm in path:
            e = g.edge(eid)
            to = e.other(frm)
            oriented[eid] = (frm, to) if forward else (to, frm)
    indeg: dict[int, int] = defaultdict(int)
    outdeg: dict[int, int] = defaultdict(int)
    cyc_edges = set(all_edges)
    for c in cycles.cycles:
        if not (set(c.edges) & in_family):
            # purely planar cycles carry no side weight; walk them as given
            for eid, t in c.darts:
                oriented[eid] = (t, g.edge(eid).other(t))
    for eid in cyc_edges:
        a, b = oriented[eid]
        outdeg[a] += 1
        indeg[b] += 1
    is_directed = all(indeg[v] == 1 and outdeg[v] == 1 for v in set(indeg) | set(outdeg))

    def signed(weight, eid: int) -> int:
        a, _ = oriented[eid]
        return weight(eid, reverse=(a != g.edge(eid).tail))

    ws = side_weights(g, sigma)
    side_sum = sum(signed(ws, eid) for eid in crossing)
    step1 = [ws(eid, reverse=(directed[eid][0] != g.edge(eid).tail)) for eid in order]
    chain = all(step1[i] < -step1[i + 1] for i in range(0, len(step1) - 1, 2))
    weights: list[int] = []
    if w is not None:
        for c in cycles.cycles:
            weights.append(sum(signed(w, eid) for eid in c.edges))
    rep = OrientationReport(
        tuple(order), tuple(xs), edge_prop, tau_parity, step2, is_directed, side_sum,
        tuple(weights), sigma_chain=chain,
    )
    detail = (
        f"edges={len(order)} edge_prop={_yn(edge_prop)} tau={_yn(tau_parity)} "
        f"step2={_yn(step2)} directed={_yn(is_directed)} chain={_yn(chain)} side_sum={side_sum}"
    )
    return Verdict("orientation", rep.passed, detail, rep)


def _yn(flag: bool) -> str:
    return "ok" if flag else "no"


def _fmt(xs) -> str:
    return ",".join(map(str, xs)) or "-"


# ---------------------------------------------------------------------------
# isolation

@dataclass(frozen=True)
class MemberResult:
    p: int
    minimum: int | None
    count: int

    @property
    def isolates(self) -> bool:
        return self.count == 1


@dataclass(frozen=True)
class IsolationReport:
    members: tuple[MemberResult, ...]
    vacuous: bool
    witness: int | None

    @property
    def passed(self) -> bool:
        return self.vacuous or self.witness is not None

    def verdict(self) -> Verdict:
        if self.vacuous:
            return Verdict("isolation", True, "vacuous: no perfect matching")
        n_iso = sum(m.isolates for m in self.members)
        if self.witness is None:
            return Verdict("isolation", False, f"no member isolates ({len(self.members)} tried)")
        return Verdict("isolation", True, f"p={self.witness} isolates ({n_iso}/{len(self.members)} members)")


def check_isolation(
    g: EmbeddedGraph, family: WeightFamily, ms: Sequence[Matching] | None = None
) -> IsolationReport:
    if ms is None:
        ms = enumerate_pms(family.graph)
    if not ms:
        return IsolationReport((), True, None)
    results = []
    witness = None
    for member in family.members:
        vals = [member.weights.total(m.edges) for m in ms]
        low = min(vals)
        res = MemberResult(member.p, low, vals.count(low))
        results.append(res)
        if witness is None and res.isolates:
            witness = member.p
    return IsolationReport(tuple(results), False, witness)
