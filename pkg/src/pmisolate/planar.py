"""
Straight-line grid drawings of the planar part and the signed-area weight.

The weight of a directed segment from (x1, y1) to (x2, y2) is
``(y2 - y1) * (x1 + x2)``.  Summed around a directed simple cycle this is
twice the enclosed area, positive for counter-clockwise traversal, so every
cycle of planar edges gets a nonzero weight.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import networkx as nx
from networkx.algorithms.planar_drawing import combinatorial_embedding_to_pos

from .schema import EmbeddedGraph, SchemaError

Point = tuple[int, int]
Segment = tuple[Point, Point]


class AreaLawError(AssertionError):
    """A directed cycle whose signed-area weight disagrees with its area."""


@dataclass(frozen=True)
class GridEmbedding:
    coords: Mapping[int, Point]
    # segments of every edge, listed from the edge's tail to its head;
    # crossing edges have no segments
    segments: Mapping[int, tuple[Segment, ...]]
    endpoints: Mapping[int, tuple[int, int]]

    def polyline(self, eid: int, reverse: bool = False) -> list[Point]:
        segs = self.segments[eid]
        pts = [segs[0][0]] + [s[1] for s in segs] if segs else []
        return pts[::-1] if reverse else pts


# ---------------------------------------------------------------------------
# rotation systems

def trace_faces(
    rotation: Mapping[Hashable, Sequence[Hashable]],
    ends: Mapping[Hashable, tuple[Hashable, Hashable]],
) -> list[list[tuple[Hashable, Hashable]]]:
    """Faces of a rotation system as lists of darts ``(edge, from_node)``.

    Rotations are clockwise.  Arriving at a node along an edge, the walk
    leaves along the clockwise successor of that edge, which traces bounded
    faces counter-clockwise and the outer face clockwise.
    """
    where = {}
    for node, rot in rotation.items():
        for k, key in enumerate(rot):
            where[node, key] = k
    seen = set()
    faces = []
    for node, rot in rotation.items():
        for key in rot:
            start = (key, node)
            if start in seen:
                continue
            face = []
            dart = start
            while dart not in seen:
                seen.add(dart)
                face.append(dart)
                key_, frm = dart
                a, b = ends[key_]
                to = b if frm == a else a
                rot_to = rotation[to]
                nxt = rot_to[(where[to, key_] + 1) % len(rot_to)]
                dart = (nxt, to)
            faces.append(face)
    return faces


def _components(nodes, ends) -> list[list]:
    adj = defaultdict(list)
    for a, b in ends.values():
        adj[a].append(b)
        adj[b].append(a)
    seen = set()
    comps = []
    for s in nodes:
        if s in seen:
            continue
        seen.add(s)
        stack, comp = [s], []
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def euler_genus_defects(
    rotation: Mapping[Hashable, Sequence[Hashable]],
    ends: Mapping[Hashable, tuple[Hashable, Hashable]],
) -> list[int]:
    """Orientable genus of each connected component of a rotation system."""
    faces = trace_faces(rotation, ends)
    face_of = {}
    for k, face in enumerate(faces):
        for key, frm in face:
            face_of[frm] = face_of.get(frm, set()) | {k}
    out = []
    for comp in _components(list(rotation), ends):
        cs = set(comp)
        n_edges = sum(1 for a, _ in ends.values() if a in cs)
        n_faces = len({k for v in comp for k in face_of.get(v, ())}) or 1
        chi = len(comp) - n_edges + n_faces
        out.append((2 - chi) // 2)
    return out


def planar_rotation(g: EmbeddedGraph) -> dict[int, list[int]]:
    planar = {e.id for e in g.planar_edges}
    return {v: [eid for eid in g.incident(v) if eid in planar] for v in g.vertices}


def check_schema_embedding(g: EmbeddedGraph) -> None:
    """Verify that rotations and crossing lists describe a drawing in the polygon.

    The polygon boundary becomes a cycle through its corners and through one
    point per side crossing; every edge is cut into pieces at the boundary.
    The result must be a plane map, which holds exactly when the combinatorial
    data is realizable inside the disc with sides glued as declared.
    """
    ends: dict[Hashable, tuple[Hashable, Hashable]] = {}
    rotation: dict[Hashable, list[Hashable]] = {}
    slot = {}
    points = []
    for k, (side, lst) in enumerate(zip(g.sides, g.crossing_lists)):
        points.append(("c", k))
        for eid in lst:
            slot[side.ref, eid] = ("s", k, eid)
            points.append(("s", k, eid))
    for i, p in enumerate(points):
        q = points[(i + 1) % len(points)]
        ends["bd", i] = (p, q)
    for i, p in enumerate(points):
        rotation[p] = [("bd", i - 1 if i else len(points) - 1), ("bd", i)]
    for e in g.edges:
        stops = [("v", e.tail)]
        for c in e.crossings:
            stops += [slot[c, e.id], slot[c.partner(), e.id]]
        stops.append(("v", e.head))
        for i in range(0, len(stops), 2):
            ends["p", e.id, i // 2] = (stops[i], stops[i + 1])
            for node in stops[i:i + 2]:
                if node[0] == "s":
                    rotation[node].append(("p", e.id, i // 2))
    last = {e.id: len(e.crossings) for e in g.edges}
    for v in g.vertices:
        rotation["v", v] = [
            ("p", eid, 0 if g.edge(eid).tail == v else last[eid]) for eid in g.incident(v)
        ]
    defects = euler_genus_defects(rotation, ends)
    if any(defects):
        raise SchemaError("rotations and crossing lists do not embed in the polygonal schema")


# ---------------------------------------------------------------------------
# drawing

def embed_planar_subgraph(g: EmbeddedGraph, outer: str = "boundary") -> GridEmbedding:
    """Integer straight-line drawing of the planar edges of ``g``.

    Each component is drawn by the Chrobak-Payne shift method, honouring the
    clockwise rotation restricted to planar edges, inside its own horizontal
    band.  Parallel planar edges get one bend point each so the drawing stays
    simple.

    ``outer`` picks the outer face of each component: ``"boundary"`` uses the
    face that holds the polygon boundary (the face a crossing edge leaves
    through), falling back to ``"largest"`` for components without crossing
    edges.
    """
    if outer not in ("boundary", "largest"):
        raise ValueError(f"unknown outer face rule {outer!r}")
    rot = planar_rotation(g)
    planar = {e.id: e for e in g.planar_edges}
    ends = {eid: e.endpoints for eid, e in planar.items()}
    if any(euler_genus_defects(rot, ends)):
        raise SchemaError("rotation system of the planar edges is not planar")

    coords: dict[int, Point] = {}
    segments: dict[int, tuple[Segment, ...]] = {e.id: () for e in g.edges}
    band = 0
    for comp in _components(list(g.vertices), ends):
        comp = sorted(comp)
        anchor = _boundary_anchor(g, comp, planar) if outer == "boundary" else None
        emb, bends = _component_embedding(comp, rot, planar, anchor)
        pos = combinatorial_embedding_to_pos(emb)
        pos = {v: p for v, p in pos.items() if not (isinstance(v, tuple) and v[0] == "pendant")}
        low = min(y for _, y in pos.values())
        left = min(x for x, _ in pos.values())
        height = max(y for _, y in pos.values()) - low
        pos = {v: (x - left, y - low + band) for v, (x, y) in pos.items()}
        band += height + 2
        for v in comp:
            coords[v] = pos[v]
        for eid, e in planar.items():
            if e.tail not in pos:
                continue
            if eid in bends:
                b = pos[bends[eid]]
                segments[eid] = ((pos[e.tail], b), (b, pos[e.head]))
            else:
                segments[eid] = ((pos[e.tail], pos[e.head]),)
    result = GridEmbedding(coords, segments, {e.id: e.endpoints for e in g.edges})
    _check_drawing(result)
    return result


def _boundary_anchor(g: EmbeddedGraph, comp, planar) -> tuple[int, int] | None:
    # (v, q): the boundary face is the one entered by leaving v along planar
    # edge q, the first planar edge clockwise after a crossing edge at v
    for v in comp:
        rot = g.incident(v)
        k = len(rot)
        for i, eid in enumerate(rot):
            if eid in planar:
                continue
            for step in range(1, k):
                q = rot[(i + step) % k]
                if q in planar:
                    return v, q
            break
    return None


def _component_embedding(comp, rot, planar, anchor=None):
    emb = nx.PlanarEmbedding()
    bends = {}
    seen_pairs = set()
    seen = set()
    for v in comp:
        for eid in rot[v]:
            if eid not in seen:
                pair = frozenset(planar[eid].endpoints)
                if pair in seen_pairs:
                    bends[eid] = ("bend", eid)
                seen_pairs.add(pair)
                seen.add(eid)
    for v in comp:
        emb.add_node(v)
        order = [bends.get(eid, planar[eid].other(v)) for eid in rot[v]]
        if anchor is not None and anchor[0] == v:
            k = rot[v].index(anchor[1])
            order.insert(k, ("pendant", 0))
        prev = None
        for w in order:
            emb.add_half_edge(v, w, **({} if prev is None else {"ccw": prev}))
            prev = w
    for eid, b in bends.items():
        u, v = planar[eid].endpoints
        emb.add_half_edge(b, u)
        emb.add_half_edge(b, v, ccw=u)
    if anchor is not None:
        # a long pendant path makes the anchored face the largest one, which
        # the shift method then places on the outside
        length = _pendant_length(comp, rot, planar, anchor)
        path = [anchor[0]] + [("pendant", i) for i in range(length)]
        for i in range(1, len(path)):
            emb.add_half_edge(path[i], path[i - 1])
            if i + 1 < len(path):
                emb.add_half_edge(path[i], path[i + 1], ccw=path[i - 1])
    return emb, bends


def _pendant_length(comp, rot, planar, anchor) -> int:
    sub = {v: rot[v] for v in comp}
    ends = {eid: planar[eid].endpoints for v in comp for eid in rot[v]}
    faces = trace_faces(sub, ends)
    target = next(f for f in faces if (anchor[1], anchor[0]) in f)
    others = max((len(f) for f in faces if f is not target), default=0)
    return max(0, (others - len(target)) // 2) + 2


def _orient(p: Point, q: Point, r: Point) -> int:
    d = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (d > 0) - (d < 0)


def _on_segment(p: Point, q: Point, r: Point) -> bool:
    return min(p[0], r[0]) <= q[0] <= max(p[0], r[0]) and min(p[1], r[1]) <= q[1] <= max(p[1], r[1])


def segments_cross(s: Segment, t: Segment) -> bool:
    """True if two segments meet anywhere other than a shared endpoint."""
    (p1, p2), (q1, q2) = s, t
    shared = {p1, p2} & {q1, q2}
    if len(shared) == 2:
        return True
    o1, o2 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    o3, o4 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    if shared:
        # touching at one endpoint is fine unless the segments overlap
        return o1 == o2 == 0 and (
            (_on_segment(p1, q1, p2) and q1 not in shared)
            or (_on_segment(p1, q2, p2) and q2 not in shared)
            or (_on_segment(q1, p1, q2) and p1 not in shared)
            or (_on_segment(q1, p2, q2) and p2 not in shared)
        )
    if o1 != o2 and o3 != o4:
        return True
    return (
        (o1 == 0 and _on_segment(p1, q1, p2))
        or (o2 == 0 and _on_segment(p1, q2, p2))
        or (o3 == 0 and _on_segment(q1, p1, q2))
        or (o4 == 0 and _on_segment(q1, p2, q2))
    )


def drawing_violations(emb: GridEmbedding) -> list[tuple]:
    """Pairs of segments that cross, and vertices lying on foreign segments."""
    segs = [(eid, s) for eid, ss in emb.segments.items() for s in ss]
    bad = []
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if segments_cross(segs[i][1], segs[j][1]):
                bad.append(("cross", segs[i][0], segs[j][0]))
    if len(set(emb.coords.values())) != len(emb.coords):
        bad.append(("coincident vertices",))
    for v, p in emb.coords.items():
        for eid, (a, b) in segs:
            if p not in (a, b) and _orient(a, b, p) == 0 and _on_segment(a, p, b):
                bad.append(("vertex on edge", v, eid))
    return bad


def _check_drawing(emb: GridEmbedding) -> None:
    bad = drawing_violations(emb)
    if bad:
        raise RuntimeError(f"planar drawing is not plane: {bad[:3]}")


# ---------------------------------------------------------------------------
# signed-area weight

def segment_weight(tail: Point, head: Point) -> int:
    (x1, y1), (x2, y2) = tail, head
    return (y2 - y1) * (x1 + x2)


def w_pl(emb: GridEmbedding, eid: int, reverse: bool = False) -> int:
    """Signed-area weight of edge ``eid`` in its stored direction (or reversed).

    Crossing edges weigh 0.
    """
    if eid not in emb.segments:
        raise SchemaError(f"edge {eid} is not in the embedding")
    total = sum(segment_weight(a, b) for a, b in emb.segments[eid])
    return -total if reverse else total


def shoelace2(points: Sequence[Point]) -> int:
    """Twice the signed area of a closed polygon given by its vertex list."""
    k = len(points)
    return sum(points[i][0] * points[(i + 1) % k][1] - points[(i + 1) % k][0] * points[i][1] for i in range(k))


def _is_counter_clockwise(points: Sequence[Point]) -> bool:
    # the lowest, then leftmost, vertex of a simple polygon is convex
    k = len(points)
    i = min(range(k), key=lambda t: (points[t][1], points[t][0]))
    prev, nxt = points[i - 1], points[(i + 1) % k]
    return _orient(prev, points[i], nxt) > 0


def cycle_points(emb: GridEmbedding, cycle: Sequence[tuple[int, int]]) -> list[Point]:
    """Polygon traced by a directed cycle given as darts ``(edge, tail vertex)``."""
    if not cycle:
        raise SchemaError("empty cycle")
    verts = []
    for k, (eid, tail) in enumerate(cycle):
        if eid not in emb.endpoints or not emb.segments.get(eid):
            raise SchemaError(f"edge {eid} is not a drawn planar edge")
        a, b = emb.endpoints[eid]
        if tail not in (a, b):
            raise SchemaError(f"vertex {tail} is not an endpoint of edge {eid}")
        head = b if tail == a else a
        nxt_tail = cycle[(k + 1) % len(cycle)][1]
        if head != nxt_tail:
            raise SchemaError("darts do not chain head to tail")
        verts.append(tail)
    if len(set(verts)) != len(verts) or len({eid for eid, _ in cycle}) != len(cycle):
        raise SchemaError("cycle is not simple")
    pts: list[Point] = []
    for eid, tail in cycle:
        line = emb.polyline(eid, reverse=(tail != emb.endpoints[eid][0]))
        pts.extend(line[:-1])
    return pts


def cycle_area_check(emb: GridEmbedding, cycle: Sequence[tuple[int, int]]) -> int:
    """Return w_pl of a directed simple cycle, checking it against its area."""
    pts = cycle_points(emb, cycle)
    weight = sum(w_pl(emb, eid, reverse=(tail != emb.endpoints[eid][0])) for eid, tail in cycle)
    area2 = abs(shoelace2(pts))
    expected = area2 if _is_counter_clockwise(pts) else -area2
    if weight != expected or area2 == 0:
        raise AreaLawError(f"cycle weight {weight} but twice its area is {area2}")
    return weight


# ---------------------------------------------------------------------------
# export

def to_dot(emb: GridEmbedding) -> str:
    lines = ["graph planar {", "  node [shape=point];"]
    for v, (x, y) in sorted(emb.coords.items()):
        lines.append(f'  {v} [pos="{x},{y}!", xlabel="{v}"];')
    for eid, segs in sorted(emb.segments.items()):
        if segs:
            u, w = emb.endpoints[eid]
            lines.append(f'  {u} -- {w} [label="{eid}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_svg(emb: GridEmbedding, scale: int = 40) -> str:
    xs = [x for x, _ in emb.coords.values()] or [0]
    ys = [y for _, y in emb.coords.values()] or [0]
    w = (max(xs) - min(xs) + 2) * scale
    h = (max(ys) - min(ys) + 2) * scale

    def tr(p: Point) -> tuple[int, int]:
        return (p[0] - min(xs) + 1) * scale, (max(ys) - p[1] + 1) * scale

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">']
    for eid, segs in sorted(emb.segments.items()):
        for a, b in segs:
            (x1, y1), (x2, y2) = tr(a), tr(b)
            out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="black"/>')
    for v, p in sorted(emb.coords.items()):
        x, y = tr(p)
        out.append(f'<circle cx="{x}" cy="{y}" r="4"/>')
        out.append(f'<text x="{x + 6}" y="{y - 6}" font-size="12">{v}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
