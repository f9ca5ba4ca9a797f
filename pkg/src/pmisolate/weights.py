"""
Isolating weight functions for bipartite graphs on a polygonal schema.

Edges are directed from the L side to the R side.  The combined weight
``w_comb = w_pl * S + w_side`` mixes the signed-area weight of the planar
drawing with a small index weight on side-crossing edges, where ``S`` is
large enough that both parts can be read off any sum separately.  The final
members ``w_p = w_comb * S' + (w_b mod p)`` break the remaining ties between
signature classes with a prime modulus found by trial division.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Sequence

import gmpy2

from .planar import GridEmbedding, embed_planar_subgraph, w_pl
from .schema import EmbeddedGraph, SchemaError


class NotBipartiteError(SchemaError):
    pass


class FKSBudgetExhausted(RuntimeError):
    """No prime within the bit budget separates the values."""


@dataclass(frozen=True)
class WeightFunction:
    name: str
    # weight of each edge in its stored (L to R) direction
    values: Mapping[int, int]
    directed: bool = True

    def __call__(self, eid: int, reverse: bool = False) -> int:
        w = self.values[eid]
        if reverse:
            if not self.directed:
                return w
            return -w
        return w

    def total(self, edge_ids: Iterable[int]) -> int:
        return sum(self.values[e] for e in edge_ids)

    def table(self) -> str:
        return "".join(f"{eid} {self.values[eid]}\n" for eid in sorted(self.values))


# ---------------------------------------------------------------------------
# orientation

def two_coloring(g: EmbeddedGraph) -> tuple[str, ...]:
    """L/R labels by breadth-first search; the lowest vertex of each component is L."""
    adj: dict[int, list[int]] = {v: [] for v in g.vertices}
    for e in g.edges:
        u, v = e.endpoints
        adj[u].append(v)
        adj[v].append(u)
    color: dict[int, int] = {}
    for s in g.vertices:
        if s in color:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in color:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    raise NotBipartiteError(f"not bipartite: odd cycle through edge {{{u},{v}}}")
    return tuple("LR"[color[v]] for v in g.vertices)


def orient_bipartite(g: EmbeddedGraph) -> EmbeddedGraph:
    """Store every edge with its L endpoint first, computing L/R if needed."""
    part = g.partition
    if part is None:
        part = two_coloring(g)
    else:
        for e in g.edges:
            if part[e.tail - 1] == part[e.head - 1]:
                raise NotBipartiteError(f"not bipartite: edge {e.id} joins two {part[e.tail - 1]} vertices")
    edges = tuple(e if part[e.tail - 1] == "L" else e.reversed() for e in g.edges)
    return replace(g, edges=edges, partition=part).validate()


# ---------------------------------------------------------------------------
# side-crossing weight

@dataclass(frozen=True)
class SigmaEntry:
    edge: int
    index: int
    # True when the tail (L endpoint) lies on the unprimed side of the pair
    tail_unprimed: bool


@dataclass(frozen=True)
class SigmaOrder:
    entries: tuple[SigmaEntry, ...]
    mode: str = "unprimed"

    def __post_init__(self):
        object.__setattr__(self, "_by_edge", {e.edge: e for e in self.entries})

    def entry(self, eid: int) -> SigmaEntry | None:
        return self._by_edge.get(eid)

    def index(self, eid: int) -> int:
        return self._by_edge[eid].index


SIGMA_MODES = ("unprimed", "all-sides")


def sigma_order(g: EmbeddedGraph, mode: str = "unprimed") -> SigmaOrder:
    """Number the crossing edges along a clockwise walk from the tail of T1.

    In ``unprimed`` mode only crossings of unprimed sides are counted, so
    the indices run 1..k.  ``all-sides`` counts every crossing of every side,
    so each edge takes two positions and is indexed by the first of them.
    """
    if mode not in SIGMA_MODES:
        raise ValueError(f"unknown sigma mode {mode!r}")
    if not g.is_normalized:
        raise SchemaError("sigma order needs a normalized graph")
    seen: set[int] = set()
    entries = []
    position = 0
    for side, lst in zip(g.sides, g.crossing_lists):
        if mode == "unprimed" and side.ref.primed:
            continue
        for eid in lst:
            position += 1
            if eid in seen:
                continue
            seen.add(eid)
            c = g.edge(eid).crossing
            entries.append(SigmaEntry(eid, position, not c.primed))
    return SigmaOrder(tuple(entries), mode)


def w_side(g: EmbeddedGraph, sigma: SigmaOrder, eid: int) -> int:
    """+i when the tail of the i-th crossing edge is on an unprimed side, else -i."""
    if not g.has_edge(eid):
        raise SchemaError(f"unknown edge id {eid}")
    entry = sigma.entry(eid)
    if entry is None:
        return 0
    return entry.index if entry.tail_unprimed else -entry.index


def side_weights(g: EmbeddedGraph, sigma: SigmaOrder) -> WeightFunction:
    return WeightFunction("w_side", {e.id: w_side(g, sigma, e.id) for e in g.edges})


def planar_weights(g: EmbeddedGraph, emb: GridEmbedding) -> WeightFunction:
    return WeightFunction("w_pl", {e.id: w_pl(emb, e.id) for e in g.edges})


def default_scale(n: int) -> int:
    return max(n, 1) ** 10


def tight_inner_scale(ws: WeightFunction) -> int:
    return 1 + 2 * sum(abs(v) for v in ws.values.values())


def w_comb(
    g: EmbeddedGraph,
    emb: GridEmbedding,
    sigma: SigmaOrder,
    scale: int | None = None,
) -> WeightFunction:
    """Per-edge ``w_pl * scale + w_side``; scale defaults to n^10."""
    ws = side_weights(g, sigma)
    if scale is None:
        scale = default_scale(g.n)
    if scale <= 2 * sum(abs(v) for v in ws.values.values()):
        raise ValueError(f"scale {scale} does not dominate the side weights")
    return WeightFunction(
        "w_comb", {e.id: w_pl(emb, e.id) * scale + ws.values[e.id] for e in g.edges}
    )


def to_undirected(w: WeightFunction) -> WeightFunction:
    # values are already keyed by the L-to-R direction
    name = w.name if w.name.endswith("^und") else w.name + "^und"
    return WeightFunction(name, dict(w.values), directed=False)


# ---------------------------------------------------------------------------
# hashing

def edge_ranks(g: EmbeddedGraph) -> dict[int, int]:
    return {eid: k for k, eid in enumerate(sorted(e.id for e in g.edges), 1)}


def w_b(g: EmbeddedGraph, e_index: int) -> int:
    if not 1 <= e_index <= len(g.edges):
        raise IndexError(f"edge index {e_index} outside 1..{len(g.edges)}")
    return 1 << e_index


def binary_weights(g: EmbeddedGraph) -> WeightFunction:
    return WeightFunction("w_b", {eid: 1 << k for eid, k in edge_ranks(g).items()}, directed=False)


def fks_weights(g: EmbeddedGraph, p: int) -> WeightFunction:
    return WeightFunction(
        f"w_fks[{p}]", {eid: pow(2, k, p) for eid, k in edge_ranks(g).items()}, directed=False
    )


def fks_bit_budget(count: int, max_bits: int) -> int:
    return math.ceil(math.log2(max(count * count * max_bits, 2))) + 4


def primes_up_to_bits(bits: int):
    p = 2
    while p.bit_length() <= bits:
        yield p
        p = int(gmpy2.next_prime(p))


def find_fks_prime(values: Iterable[int], bit_budget: int) -> int:
    """Smallest prime of at most ``bit_budget`` bits with distinct residues."""
    vals = list(values)
    if len(set(vals)) != len(vals):
        raise ValueError("values must be distinct")
    for p in primes_up_to_bits(bit_budget):
        if len({v % p for v in vals}) == len(vals):
            return p
    raise FKSBudgetExhausted(f"no prime of at most {bit_budget} bits separates the values")


def find_fks_prime_doubling(values: Sequence[int], bit_budget: int) -> tuple[int, int, int]:
    """Retry with a doubled budget until a prime is found: (p, budget, doublings)."""
    doublings = 0
    while True:
        try:
            return find_fks_prime(values, bit_budget), bit_budget, doublings
        except FKSBudgetExhausted:
            bit_budget *= 2
            doublings += 1


# ---------------------------------------------------------------------------
# the family

@dataclass(frozen=True)
class CombinedWeights:
    graph: EmbeddedGraph
    embedding: GridEmbedding
    sigma: SigmaOrder
    w_pl: WeightFunction
    w_side: WeightFunction
    w_comb: WeightFunction
    base: WeightFunction
    s_inner: int


def combine(
    g: EmbeddedGraph,
    tight: bool = False,
    sigma_mode: str = "unprimed",
    outer_face: str = "boundary",
) -> CombinedWeights:
    """Orient, draw, and build w_comb and its undirected transfer for ``g``."""
    if not g.is_normalized:
        raise SchemaError("graph must be normalized first")
    d = orient_bipartite(g)
    emb = embed_planar_subgraph(d, outer=outer_face)
    sigma = sigma_order(d, sigma_mode)
    wpl = planar_weights(d, emb)
    wside = side_weights(d, sigma)
    scale = tight_inner_scale(wside) if tight else default_scale(d.n)
    wc = w_comb(d, emb, sigma, scale)
    return CombinedWeights(d, emb, sigma, wpl, wside, wc, to_undirected(wc), scale)


@dataclass(frozen=True)
class FamilyMember:
    p: int
    weights: WeightFunction
    s_outer: int


@dataclass(frozen=True)
class WeightFamily:
    mode: str
    combined: CombinedWeights
    members: tuple[FamilyMember, ...]
    bit_budget: int
    doublings: int = 0
    # oracle-assisted families are empty when the graph has no perfect matching
    empty: bool = False
    tight: bool = False
    minima: tuple[frozenset, ...] = field(default=())

    @property
    def base(self) -> WeightFunction:
        return self.combined.base

    @property
    def s_inner(self) -> int:
        return self.combined.s_inner

    @property
    def graph(self) -> EmbeddedGraph:
        return self.combined.graph


def make_member(g: EmbeddedGraph, base: WeightFunction, p: int, tight: bool) -> FamilyMember:
    fks = fks_weights(g, p)
    spread = 2 * sum(fks.values.values())
    s_outer = 1 + spread if tight else default_scale(g.n)
    if s_outer <= spread:
        raise ValueError(f"outer scale {s_outer} does not dominate w_fks for p = {p}")
    values = {eid: base.values[eid] * s_outer + fks.values[eid] for eid in base.values}
    return FamilyMember(p, WeightFunction(f"w_p[{p}]", values, directed=False), s_outer)


def build_family(
    g: EmbeddedGraph,
    mode: str = "oracle-assisted",
    tight: bool = False,
    sigma_mode: str = "unprimed",
    enumerate_fn: Callable | None = None,
) -> WeightFamily:
    """Weight family for a normalized bipartite graph.

    ``constructive`` emits one member per prime within the bit budget;
    ``oracle-assisted`` enumerates the minimum perfect matchings under the
    base weight and keeps only the member for the smallest separating prime.
    """
    comb = combine(g, tight=tight, sigma_mode=sigma_mode)
    d = comb.graph
    m = len(d.edges)
    if mode == "constructive":
        budget = fks_bit_budget(4 ** d.genus, m + 1)
        members = tuple(make_member(d, comb.base, p, tight) for p in primes_up_to_bits(budget))
        return WeightFamily(mode, comb, members, budget, tight=tight)
    if mode != "oracle-assisted":
        raise ValueError(f"unknown family mode {mode!r}")
    if enumerate_fn is None:
        from .oracle import enumerate_pms as enumerate_fn
    pms = enumerate_fn(d)
    if not pms:
        return WeightFamily(mode, comb, (), 0, empty=True, tight=tight)
    weights = [comb.base.total(pm.edges) for pm in pms]
    best = min(weights)
    minima = tuple(pm.edges for pm, w in zip(pms, weights) if w == best)
    wb = binary_weights(d)
    values = [wb.total(mm) for mm in minima]
    budget = fks_bit_budget(len(values), m + 1)
    p, used, doublings = find_fks_prime_doubling(values, budget)
    return WeightFamily(
        mode, comb, (make_member(d, comb.base, p, tight),), used, doublings, tight=tight, minima=minima
    )
