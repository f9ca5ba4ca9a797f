"""
Embedded graphs on a polygonal schema.

A genus-g surface is represented by a 4g-gon whose sides T1, T1', ..., T2g,
T2g' are glued in pairs.  A graph is given by its vertices, its edges, the
clockwise rotation of edges around every vertex and, for every side, the
clockwise-ordered list of edges that cross it.  Edges that cross no side are
the planar edges.

Vertices are the integers 1..n.  An edge stores an ordered pair of endpoints
and the sequence of sides it exits through when walked from its first
endpoint to its second one, so a single-crossing edge ``(u, v)`` with
crossing ``T1`` has ``u`` incident on T1 and ``v`` incident on T1'.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class SchemaError(ValueError):
    """Raised for malformed embedded graphs or invalid operations on them."""


@dataclass(frozen=True, order=True)
class SideRef:
    pair: int
    primed: bool = False

    _LABEL = re.compile(r"^T(\d+)('?)$")

    @classmethod
    def parse(cls, text: str) -> SideRef:
        m = cls._LABEL.match(text)
        if not m or int(m.group(1)) < 1:
            raise SchemaError(f"bad side label {text!r}")
        return cls(int(m.group(1)), bool(m.group(2)))

    def partner(self) -> SideRef:
        return SideRef(self.pair, not self.primed)

    def __str__(self) -> str:
        return f"T{self.pair}" + ("'" if self.primed else "")


@dataclass(frozen=True)
class Side:
    """A polygon side; ``tail`` is the corner its arrow starts from."""
    ref: SideRef
    tail: int


@dataclass(frozen=True)
class Edge:
    id: int
    endpoints: tuple[int, int]
    crossings: tuple[SideRef, ...] = ()
    # (original edge id, segment index) for edges produced by subdivision
    origin: tuple[int, int] | None = None

    @property
    def tail(self) -> int:
        return self.endpoints[0]

    @property
    def head(self) -> int:
        return self.endpoints[1]

    @property
    def crossing(self) -> SideRef | None:
        """The single side exited from ``tail``; None for planar edges."""
        if len(self.crossings) > 1:
            raise SchemaError(f"edge {self.id} crosses several side pairs")
        return self.crossings[0] if self.crossings else None

    def other(self, v: int) -> int:
        u, w = self.endpoints
        if v == u:
            return w
        if v == w:
            return u
        raise SchemaError(f"vertex {v} is not an endpoint of edge {self.id}")

    def reversed(self) -> Edge:
        return replace(
            self,
            endpoints=(self.endpoints[1], self.endpoints[0]),
            crossings=tuple(c.partner() for c in reversed(self.crossings)),
        )


def standard_sides(genus: int) -> tuple[Side, ...]:
    """Sides T1, T2, T1', T2', T3, ... with unprimed arrows running clockwise."""
    sides = []
    corners = 4 * genus
    for h in range(genus):
        a, b = 2 * h + 1, 2 * h + 2
        k = 4 * h
        sides += [
            Side(SideRef(a), k),
            Side(SideRef(b), k + 1),
            Side(SideRef(a, True), (k + 3) % corners),
            Side(SideRef(b, True), (k + 4) % corners),
        ]
    return tuple(sides)


@dataclass(frozen=True)
class EmbeddedGraph:
    n: int
    edges: tuple[Edge, ...]
    genus: int = 0
    sides: tuple[Side, ...] = ()
    # crossing_lists[k] lists the edges crossing sides[k] in clockwise order
    crossing_lists: tuple[tuple[int, ...], ...] = ()
    # rotation[v - 1] is the clockwise cyclic order of edges around v
    rotation: tuple[tuple[int, ...], ...] = ()
    # partition[v - 1] is "L" or "R" when a bipartition is declared
    partition: tuple[str, ...] | None = None

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def _edge_index(self) -> dict[int, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _side_index(self) -> dict[SideRef, int]:
        return {s.ref: k for k, s in enumerate(self.sides)}

    @cached_property
    def _positions(self) -> dict[tuple[SideRef, int], int]:
        pos = {}
        for side, lst in zip(self.sides, self.crossing_lists):
            for k, eid in enumerate(lst):
                pos[side.ref, eid] = k
        return pos

    def edge(self, eid: int) -> Edge:
        try:
            return self._edge_index[eid]
        except KeyError:
            raise SchemaError(f"unknown edge id {eid}") from None

    def has_edge(self, eid: int) -> bool:
        return eid in self._edge_index

    def side_position(self, ref: SideRef) -> int:
        return self._side_index[ref]

    def crossing_list(self, ref: SideRef) -> tuple[int, ...]:
        return self.crossing_lists[self._side_index[ref]]

    def position(self, ref: SideRef, eid: int) -> int:
        """Rank of edge ``eid`` in the clockwise crossing list of side ``ref``."""
        try:
            return self._positions[ref, eid]
        except KeyError:
            raise SchemaError(f"edge {eid} does not cross side {ref}") from None

    def incident(self, v: int) -> tuple[int, ...]:
        return self.rotation[v - 1]

    def side_of(self, v: int) -> str | None:
        return None if self.partition is None else self.partition[v - 1]

    @property
    def planar_edges(self) -> list[Edge]:
        return [e for e in self.edges if not e.crossings]

    @property
    def crossing_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.crossings]

    @property
    def is_normalized(self) -> bool:
        if any(len(e.crossings) > 1 for e in self.edges):
            return False
        seen: set[int] = set()
        for e in self.crossing_edges:
            if seen & set(e.endpoints):
                return False
            seen.update(e.endpoints)
        return True

    def validate(self) -> EmbeddedGraph:
        """Check every structural invariant; returns self for chaining."""
        if self.n < 0 or self.genus < 0:
            raise SchemaError("vertex count and genus must be nonnegative")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise SchemaError("duplicate edge ids")
        for e in self.edges:
            if e.id < 1:
                raise SchemaError(f"edge id {e.id} must be positive")
            u, v = e.endpoints
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise SchemaError(f"edge {e.id} has an endpoint outside 1..{self.n}")
            if u == v:
                raise SchemaError(f"edge {e.id} is a self-loop")
            pairs = [c.pair for c in e.crossings]
            if len(set(pairs)) != len(pairs):
                raise SchemaError(f"edge {e.id} crosses the same side pair twice")
            for c in e.crossings:
                if not 1 <= c.pair <= 2 * self.genus:
                    raise SchemaError(f"edge {e.id} crosses unknown side {c}")
        self._validate_sides()
        self._validate_rotation()
        if self.partition is not None:
            if len(self.partition) != self.n or set(self.partition) - {"L", "R"}:
                raise SchemaError("partition must give L or R for every vertex")
            for e in self.edges:
                u, v = e.endpoints
                if self.partition[u - 1] == self.partition[v - 1]:
                    raise SchemaError(f"edge {e.id} joins two vertices on side {self.partition[u - 1]}")
        return self

    def _validate_sides(self) -> None:
        g = self.genus
        if len(self.sides) != 4 * g:
            raise SchemaError(f"genus {g} needs {4 * g} sides, got {len(self.sides)}")
        if len(self.crossing_lists) != 4 * g:
            raise SchemaError("one crossing list is required per side")
        labels = Counter(s.ref for s in self.sides)
        expected = {SideRef(j, p) for j in range(1, 2 * g + 1) for p in (False, True)}
        if set(labels) != expected or any(c > 1 for c in labels.values()):
            raise SchemaError("sides must name every T_j and T_j' exactly once")
        if g and (self.sides[0].ref != SideRef(1) or self.sides[0].tail != 0):
            raise SchemaError("T1 must be the first side, with its tail at corner 0")
        corners = 4 * g
        clockwise = {}
        for k, s in enumerate(self.sides):
            if s.tail == k % corners:
                clockwise[s.ref] = True
            elif s.tail == (k + 1) % corners:
                clockwise[s.ref] = False
            else:
                raise SchemaError(f"side {s.ref} has tail {s.tail}, not one of its corners")
        for j in range(1, 2 * g + 1):
            if clockwise[SideRef(j)] == clockwise[SideRef(j, True)]:
                raise SchemaError(f"sides T{j} and T{j}' are glued without reversing orientation")
        expected_members: dict[SideRef, set[int]] = {s.ref: set() for s in self.sides}
        for e in self.edges:
            for c in e.crossings:
                expected_members[c].add(e.id)
                expected_members[c.partner()].add(e.id)
        for s, lst in zip(self.sides, self.crossing_lists):
            if len(set(lst)) != len(lst):
                raise SchemaError(f"side {s.ref} lists an edge twice")
            for eid in lst:
                if eid not in self._edge_index:
                    raise SchemaError(f"side {s.ref} lists unknown edge {eid}")
            if set(lst) != expected_members[s.ref]:
                raise SchemaError(f"crossing list of {s.ref} disagrees with the edge crossings")
        for j in range(1, 2 * g + 1):
            a = self.crossing_list(SideRef(j))
            b = self.crossing_list(SideRef(j, True))
            if set(a) != set(b):
                raise SchemaError(f"T{j} and T{j}' are crossed by different edges")
            if tuple(reversed(a)) != b:
                raise SchemaError(f"crossing order on T{j}' is not the reverse of T{j}")

    def _validate_rotation(self) -> None:
        if len(self.rotation) != self.n:
            raise SchemaError("rotation must list every vertex")
        expected: list[Counter] = [Counter() for _ in range(self.n)]
        for e in self.edges:
            for v in e.endpoints:
                expected[v - 1][e.id] += 1
        for v in self.vertices:
            if Counter(self.rotation[v - 1]) != expected[v - 1]:
                raise SchemaError(f"rotation at vertex {v} does not list its incident edges exactly once")


@dataclass(frozen=True)
class Signature:
    """A 2g-bit vector b_1 ... b_2g; ``value`` reads the bits as a binary number."""
    value: int
    width: int

    @classmethod
    def zero(cls, width: int) -> Signature:
        return cls(0, width)

    @classmethod
    def from_bits(cls, bits: str) -> Signature:
        return cls(int(bits, 2) if bits else 0, len(bits))

    @classmethod
    def of_pair(cls, pair: int, width: int) -> Signature:
        return cls(1 << (width - pair), width)

    def bit(self, pair: int) -> int:
        return (self.value >> (self.width - pair)) & 1

    def is_zero(self) -> bool:
        return self.value == 0

    def __xor__(self, other: Signature) -> Signature:
        if self.width != other.width:
            raise SchemaError("signatures of different widths")
        return Signature(self.value ^ other.value, self.width)

    def __str__(self) -> str:
        return format(self.value, f"0{self.width}b") if self.width else ""


@dataclass(frozen=True)
class Matching:
    edges: frozenset[int]
    signature: Signature
    weights: Mapping[str, int] = field(default_factory=dict)

    def weight(self, name: str) -> int:
        return self.weights[name]


def edge_signature(g: EmbeddedGraph, eid: int) -> Signature:
    e = g.edge(eid)
    sig = Signature.zero(2 * g.genus)
    for c in e.crossings:
        sig ^= Signature.of_pair(c.pair, 2 * g.genus)
    return sig


def set_signature(g: EmbeddedGraph, edge_ids: Iterable[int]) -> Signature:
    sig = Signature.zero(2 * g.genus)
    for eid in edge_ids:
        sig ^= edge_signature(g, eid)
    return sig


def is_perfect_matching(g: EmbeddedGraph, edge_ids: Iterable[int]) -> bool:
    covered: list[int] = []
    for eid in edge_ids:
        covered.extend(g.edge(eid).endpoints)
    return len(covered) == len(set(covered)) == g.n


def make_matching(g: EmbeddedGraph, edge_ids: Iterable[int], weights=()) -> Matching:
    ids = frozenset(edge_ids)
    return Matching(ids, set_signature(g, ids), {w.name: w.total(ids) for w in weights})


# ---------------------------------------------------------------------------
# normalization

CorrespondenceMap = Mapping[int, tuple[int, ...]]


class _Builder:
    """Mutable working copy used while subdividing edges."""

    def __init__(self, g: EmbeddedGraph):
        self.n = g.n
        self.genus = g.genus
        self.sides = g.sides
        self.edges: dict[int, Edge] = {e.id: e for e in g.edges}
        self.lists = [list(lst) for lst in g.crossing_lists]
        self.rotation = [list(r) for r in g.rotation]
        self.partition = None if g.partition is None else list(g.partition)
        self.next_id = max(self.edges, default=0) + 1
        self.paths: dict[int, list[int]] = {eid: [eid] for eid in self.edges}
        self.owner: dict[int, int] = {eid: eid for eid in self.edges}
        self.side_index = {s.ref: k for k, s in enumerate(g.sides)}

    def new_vertex(self, side: str | None) -> int:
        self.n += 1
        self.rotation.append([])
        if self.partition is not None:
            self.partition.append(side)
        return self.n

    def flip(self, v: int) -> str | None:
        if self.partition is None:
            return None
        return "R" if self.partition[v - 1] == "L" else "L"

    def replace_edge(self, eid: int, segments: list[Edge]) -> None:
        """Replace edge ``eid`` by a path of segments ordered tail to head."""
        old = self.edges.pop(eid)
        for s in segments:
            self.edges[s.id] = s
        tail, head = old.endpoints
        self._swap_rotation(tail, eid, segments[0].id)
        self._swap_rotation(head, eid, segments[-1].id)
        for a, b in zip(segments, segments[1:]):
            shared = set(a.endpoints) & set(b.endpoints)
            (d,) = shared
            self.rotation[d - 1] = [a.id, b.id]
        for s in segments:
            for c in s.crossings:
                for ref in (c, c.partner()):
                    lst = self.lists[self.side_index[ref]]
                    lst[lst.index(eid)] = s.id
        orig = self.owner.pop(eid)
        path = self.paths[orig]
        k = path.index(eid)
        path[k:k + 1] = [s.id for s in segments]
        for s in segments:
            self.owner[s.id] = orig

    def _swap_rotation(self, v: int, old: int, new: int) -> None:
        rot = self.rotation[v - 1]
        rot[rot.index(old)] = new

    def fresh_id(self) -> int:
        self.next_id += 1
        return self.next_id - 1

    def subdivide_crossings(self, eid: int) -> None:
        e = self.edges[eid]
        u, v = e.endpoints
        k = len(e.crossings)
        dummies = []
        prev = u
        for _ in range(2 * k - 2):
            prev = self.new_vertex(self.flip(prev))
            dummies.append(prev)
        chain = [u, *dummies, v]
        segments = []
        for i in range(2 * k - 1):
            crossing = (e.crossings[i // 2],) if i % 2 == 0 else ()
            segments.append(Edge(self.fresh_id(), (chain[i], chain[i + 1]), crossing))
        self.replace_edge(eid, segments)

    def split_near(self, eid: int, v: int) -> None:
        """Move a crossing edge off vertex v through two dummy vertices."""
        e = self.edges[eid]
        d1 = self.new_vertex(self.flip(v))
        d2 = self.new_vertex(self.flip(d1))
        if e.tail == v:
            segments = [
                Edge(self.fresh_id(), (v, d1)),
                Edge(self.fresh_id(), (d1, d2)),
                Edge(self.fresh_id(), (d2, e.head), e.crossings),
            ]
        else:
            segments = [
                Edge(self.fresh_id(), (e.tail, d2), e.crossings),
                Edge(self.fresh_id(), (d2, d1)),
                Edge(self.fresh_id(), (d1, v)),
            ]
        self.replace_edge(eid, segments)

    def freeze(self) -> tuple[EmbeddedGraph, dict[int, tuple[int, ...]]]:
        edges = []
        for eid in sorted(self.edges):
            e = self.edges[eid]
            orig = self.owner[eid]
            path = self.paths[orig]
            origin = None if path == [orig] else (orig, path.index(eid) + 1)
            edges.append(replace(e, origin=origin))
        g = EmbeddedGraph(
            n=self.n,
            edges=tuple(edges),
            genus=self.genus,
            sides=self.sides,
            crossing_lists=tuple(tuple(lst) for lst in self.lists),
            rotation=tuple(tuple(r) for r in self.rotation),
            partition=None if self.partition is None else tuple(self.partition),
        )
        return g, {orig: tuple(path) for orig, path in sorted(self.paths.items())}


def normalize(g: EmbeddedGraph) -> tuple[EmbeddedGraph, dict[int, tuple[int, ...]]]:
    """Subdivide edges so each crosses at most one side pair and crossing
    edges are pairwise vertex-disjoint.

    Every subdivision replaces an edge by an odd path, which keeps perfect
    matchings in bijection.  Returns the normalized graph and a map from each
    original edge id to its segment ids, ordered from the edge's tail.
    """
    g.validate()
    b = _Builder(g)
    for eid in sorted(b.edges):
        if len(b.edges[eid].crossings) > 1:
            b.subdivide_crossings(eid)
    for v in range(1, g.n + 1):
        crossing = [eid for eid in b.rotation[v - 1] if b.edges[eid].crossings]
        for eid in crossing[1:]:
            b.split_near(eid, v)
    h, cmap = b.freeze()
    return h.validate(), cmap


def matchings_correspond(
    original: EmbeddedGraph,
    normalized: EmbeddedGraph,
    cmap: CorrespondenceMap,
    m: Matching | Iterable[int],
) -> Matching:
    """Map a perfect matching of the normalized graph back to the original."""
    ids = m.edges if isinstance(m, Matching) else frozenset(m)
    if not is_perfect_matching(normalized, ids):
        raise SchemaError("not a perfect matching of the normalized graph")
    chosen = []
    for orig, path in cmap.items():
        odd = [s in ids for s in path[0::2]]
        even = [s in ids for s in path[1::2]]
        if all(odd) and not any(even):
            chosen.append(orig)
        elif any(odd) or not all(even):
            raise SchemaError(f"matching is inconsistent on the subdivision path of edge {orig}")
    if not is_perfect_matching(original, chosen):
        raise SchemaError("image is not a perfect matching of the original graph")
    return make_matching(original, chosen)


def induced_weights(cmap: CorrespondenceMap, values: Mapping[int, int]) -> tuple[dict[int, int], int]:
    """Pull segment weights back to original edges.

    A normalized perfect matching of weight W corresponds to an original one
    of weight W - offset under the returned per-edge values.
    """
    pulled = {}
    offset = 0
    for orig, path in cmap.items():
        odd = sum(values[s] for s in path[0::2])
        even = sum(values[s] for s in path[1::2])
        pulled[orig] = odd - even
        offset += even
    return pulled, offset


def delete_vertices(g: EmbeddedGraph, doomed: Sequence[int]) -> EmbeddedGraph:
    """Remove vertices and their edges; survivors are renumbered in order."""
    gone = set(doomed)
    keep = [v for v in g.vertices if v not in gone]
    relabel = {v: k + 1 for k, v in enumerate(keep)}
    dead = {e.id for e in g.edges if gone & set(e.endpoints)}
    edges = tuple(
        replace(e, endpoints=(relabel[e.tail], relabel[e.head]))
        for e in g.edges if e.id not in dead
    )
    return EmbeddedGraph(
        n=len(keep),
        edges=edges,
        genus=g.genus,
        sides=g.sides,
        crossing_lists=tuple(tuple(x for x in lst if x not in dead) for lst in g.crossing_lists),
        rotation=tuple(tuple(x for x in g.rotation[v - 1] if x not in dead) for v in keep),
        partition=None if g.partition is None else tuple(g.partition[v - 1] for v in keep),
    ).validate()
