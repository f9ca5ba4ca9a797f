"""
Deterministic instance generators.

Every generator is a pure function of its parameters and seed and returns a
validated ``EmbeddedGraph`` whose rotations and crossing lists have been
checked to embed in the polygonal schema.
"""

from __future__ import annotations

import math
import random
from collections import defaultdict, deque
from typing import Sequence

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .planar import check_schema_embedding, trace_faces
from .schema import Edge, EmbeddedGraph, SchemaError, SideRef, standard_sides

KINDS = ("planar-grid", "torus-cycle", "genus-g-random", "k33-torus", "parallel-loops")


def _cw_rotation(coords: dict[int, tuple[float, float]], spokes: dict[int, list[tuple[int, tuple[float, float]]]]):
    """Clockwise order of edge ids around each vertex from direction vectors."""
    rot = {}
    for v in coords:
        rot[v] = [eid for eid, (dx, dy) in sorted(spokes[v], key=lambda s: -math.atan2(s[1][1], s[1][0]))]
    return rot


def _graph(n, edges, genus=0, lists=None, rotation=None, partition=None) -> EmbeddedGraph:
    sides = standard_sides(genus)
    lists = lists or {}
    g = EmbeddedGraph(
        n=n,
        edges=tuple(sorted(edges, key=lambda e: e.id)),
        genus=genus,
        sides=sides,
        crossing_lists=tuple(tuple(lists.get(s.ref, ())) for s in sides),
        rotation=tuple(tuple(rotation[v]) for v in range(1, n + 1)),
        partition=None if partition is None else tuple(partition),
    ).validate()
    check_schema_embedding(g)
    return g


def planar_grid(rows: int, cols: int) -> EmbeddedGraph:
    if rows < 1 or cols < 1:
        raise ValueError("grid needs at least one row and one column")
    vid = {(r, c): r * cols + c + 1 for r in range(rows) for c in range(cols)}
    coords = {v: (float(c), float(-r)) for (r, c), v in vid.items()}
    edges, spokes = [], defaultdict(list)
    for (r, c), v in sorted(vid.items(), key=lambda kv: kv[1]):
        for dr, dc in ((0, 1), (1, 0)):
            w = vid.get((r + dr, c + dc))
            if w is None:
                continue
            eid = len(edges) + 1
            edges.append(Edge(eid, (v, w)))
            spokes[v].append((eid, (coords[w][0] - coords[v][0], coords[w][1] - coords[v][1])))
            spokes[w].append((eid, (coords[v][0] - coords[w][0], coords[v][1] - coords[w][1])))
    rot = _cw_rotation(coords, spokes)
    part = ["L" if (r + c) % 2 == 0 else "R" for (r, c) in sorted(vid, key=vid.get)]
    return _graph(rows * cols, edges, rotation=rot, partition=part)


def torus_cycle(length: int, pairs: Sequence[int] = (1,), genus: int | None = None) -> EmbeddedGraph:
    """Even cycle 1..length whose edges crossing side pairs are spread evenly.

    The k-th crossing edge leaves its lower-numbered end through T_{pairs[k]}.
    """
    if length < 2 or length % 2:
        raise ValueError("cycle length must be even and at least 2")
    if not pairs or len(pairs) > length:
        raise ValueError("need between 1 and length crossing pairs")
    if len(set(pairs)) != len(pairs):
        raise ValueError("each side pair may be crossed once")
    if genus is None:
        genus = (max(pairs) + 1) // 2
    if max(pairs) > 2 * genus or min(pairs) < 1:
        raise ValueError("pair index outside the schema")
    step = length // len(pairs)
    crossing_at = {length - k * step: p for k, p in enumerate(pairs)}
    edges, lists = [], defaultdict(list)
    for i in range(1, length + 1):
        j = i % length + 1
        p = crossing_at.get(i)
        cross = (SideRef(p),) if p else ()
        edges.append(Edge(i, (i, j), cross))
        if p:
            lists[SideRef(p)].append(i)
            lists[SideRef(p, True)].append(i)
    rot = {v: [v - 1 if v > 1 else length, v] for v in range(1, length + 1)}
    part = ["L" if v % 2 else "R" for v in range(1, length + 1)]
    try:
        return _graph(length, edges, genus, lists, rot, part)
    except SchemaError as exc:
        raise ValueError(f"infeasible torus-cycle parameters: {exc}") from None


def parallel_loops(count: int, length: int = 2, pairs: Sequence[int] = (1,), genus: int | None = None) -> EmbeddedGraph:
    """Disjoint copies of a torus cycle, nested along the sides they cross.

    Swapping every loop's matching keeps the signature class whenever the
    number of loops swapped is even, and the loops cross no side pair in a
    way the planar weight can see, so only the side weight separates them.
    """
    if count < 1:
        raise ValueError("need at least one loop")
    one = torus_cycle(length, pairs, genus)
    edges, lists, rot, part = [], defaultdict(list), {}, []
    for c in range(count):
        shift_v, shift_e = c * one.n, c * len(one.edges)
        for e in one.edges:
            edges.append(Edge(e.id + shift_e, (e.tail + shift_v, e.head + shift_v), e.crossings))
        for v in one.vertices:
            rot[v + shift_v] = [eid + shift_e for eid in one.incident(v)]
        part.extend(one.partition)
    for s, lst in zip(one.sides, one.crossing_lists):
        for c in (reversed(range(count)) if s.ref.primed else range(count)):
            lists[s.ref].extend(eid + c * len(one.edges) for eid in lst)
    try:
        return _graph(count * one.n, edges, one.genus, lists, rot, part)
    except SchemaError as exc:
        raise ValueError(f"infeasible parallel-loops parameters: {exc}") from None


def k33_torus() -> EmbeddedGraph:
    """K_{3,3} on the torus: a hexagon, one chord inside, two chords through the sides."""
    # hexagon a1 b1 a2 b2 a3 b3 placed clockwise
    names = ["a1", "b1", "a2", "b2", "a3", "b3"]
    vid = {nm: k + 1 for k, nm in enumerate(names)}
    coords = {
        vid[nm]: (math.cos(math.pi / 2 - k * math.pi / 3), math.sin(math.pi / 2 - k * math.pi / 3))
        for k, nm in enumerate(names)
    }
    planar = [("a1", "b1"), ("a2", "b1"), ("a2", "b2"), ("a3", "b2"), ("a3", "b3"), ("a1", "b3"), ("a1", "b2")]
    crossing = [("a2", "b3", 1), ("a3", "b1", 2)]
    edges, spokes, lists = [], defaultdict(list), defaultdict(list)
    for u, w in planar:
        eid = len(edges) + 1
        a, b = vid[u], vid[w]
        edges.append(Edge(eid, (a, b)))
        spokes[a].append((eid, (coords[b][0] - coords[a][0], coords[b][1] - coords[a][1])))
        spokes[b].append((eid, (coords[a][0] - coords[b][0], coords[a][1] - coords[b][1])))
    for u, w, p in crossing:
        eid = len(edges) + 1
        a, b = vid[u], vid[w]
        edges.append(Edge(eid, (a, b), (SideRef(p),)))
        lists[SideRef(p)].append(eid)
        lists[SideRef(p, True)].append(eid)
        for x in (a, b):
            spokes[x].append((eid, coords[x]))  # radially outwards
    rot = _cw_rotation(coords, spokes)
    part = ["L" if nm[0] == "a" else "R" for nm in names]
    return _graph(6, edges, 1, lists, rot, part)


# ---------------------------------------------------------------------------
# random instances

def _random_points(rng: random.Random, n: int) -> list[tuple[int, int]]:
    span = max(4, 3 * n)
    pts: set[tuple[int, int]] = set()
    while len(pts) < n:
        pts.add((rng.randrange(span), rng.randrange(span)))
    return sorted(pts, key=lambda p: (rng.random(), p))


def _delaunay_edges(pts) -> set[tuple[int, int]]:
    if len(pts) == 2:
        return {(0, 1)}
    tri = Delaunay(np.array(pts, dtype=float))
    out = set()
    for simplex in tri.simplices:
        for i in range(3):
            a, b = sorted((int(simplex[i]), int(simplex[(i + 1) % 3])))
            out.add((a, b))
    return out


def _planar_base(rng: random.Random, n: int, keep: float, bipartite: bool):
    """Connected plane graph on random lattice points, bipartite if asked."""
    for _ in range(100):
        pts = _random_points(rng, n)
        if n == 1:
            return pts, [], ["L"]
        try:
            cand = sorted(_delaunay_edges(pts))
        except QhullError:
            continue
        adj = defaultdict(list)
        for a, b in cand:
            adj[a].append(b)
            adj[b].append(a)
        color = {0: 0}
        tree = set()
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in sorted(adj[u]):
                if w not in color:
                    color[w] = 1 - color[u]
                    tree.add((min(u, w), max(u, w)))
                    queue.append(w)
        edges = []
        for a, b in cand:
            if bipartite and color[a] == color[b]:
                continue
            if (a, b) in tree or rng.random() < keep:
                edges.append((a, b))
        part = ["L" if color[v] == 0 else "R" for v in range(n)]
        return pts, edges, part
    raise ValueError("could not place points in general position")


def _grid_shape(n: int) -> tuple[int, int]:
    if n < 2 or n % 2:
        raise ValueError("a grid base needs an even number of vertices")
    cols = max(c for c in range(1, int(n ** 0.5) + 1) if n % c == 0)
    return n // cols, cols


def _domino_tiling(rng: random.Random, rows: int, cols: int) -> list[tuple[int, int]]:
    """Random tiling of the grid cells by dominoes, as pairs of cell indices."""
    for _ in range(200):
        covered = [False] * (rows * cols)
        tiles = []
        for k in range(rows * cols):
            if covered[k]:
                continue
            r, c = divmod(k, cols)
            moves = []
            if c + 1 < cols and not covered[k + 1]:
                moves.append(k + 1)
            if r + 1 < rows:
                moves.append(k + cols)
            if not moves:
                break
            j = rng.choice(moves)
            covered[k] = covered[j] = True
            tiles.append((k, j))
        else:
            return tiles
    if cols % 2 == 0:
        return [(k, k + 1) for k in range(0, rows * cols, 2)]
    return [(r * cols + c, (r + 1) * cols + c) for r in range(0, rows, 2) for c in range(cols)]


def _grid_base(rng: random.Random, n: int, keep: float):
    """Grid subgraph that keeps a random domino tiling, so it has a perfect matching."""
    rows, cols = _grid_shape(n)
    pts = [(c, r) for r in range(rows) for c in range(cols)]
    tiles = set(_domino_tiling(rng, rows, cols))
    edges, spare = [], []
    for k in range(n):
        r, c = divmod(k, cols)
        for j in ([k + 1] if c + 1 < cols else []) + ([k + cols] if r + 1 < rows else []):
            (edges if (k, j) in tiles or rng.random() < keep else spare).append((k, j))
    # reconnect with spare grid edges
    root = list(range(n))

    def find(x: int) -> int:
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    for a, b in edges:
        root[find(a)] = find(b)
    rng.shuffle(spare)
    for a, b in spare:
        if find(a) != find(b):
            root[find(a)] = find(b)
            edges.append((a, b))
    edges.sort()
    part = ["L" if sum(divmod(k, cols)) % 2 == 0 else "R" for k in range(n)]
    return pts, edges, part


def genus_g_random(
    n: int,
    genus: int = 1,
    seed: int = 0,
    tracks: int = 2,
    keep: float = 0.6,
    detach: float = 0.0,
    bipartite: bool = True,
    base: str = "delaunay",
) -> EmbeddedGraph:
    """Random plane graph with extra edges routed through the side pairs.

    The plane graph sits inside the polygon.  Each side pair gets up to
    ``tracks`` parallel tracks; the slots where tracks meet the boundary are
    attached, in boundary order, to corners of the outer face, so the stubs
    never cross.  With probability ``detach`` two neighbouring slots are
    joined to each other instead, which splices their tracks into a single
    edge crossing several pairs.  Tracks that would join a vertex to itself,
    break bipartiteness, or cross one pair twice are dropped.

    ``base="grid"`` replaces the random points by a grid that keeps a random
    domino tiling, which guarantees a perfect matching.  Grid bases are
    always bipartite.
    """
    if n < 1 or genus < 0 or tracks < 0:
        raise ValueError("need n >= 1, genus >= 0, tracks >= 0")
    if not 0 <= keep <= 1 or not 0 <= detach <= 1:
        raise ValueError("keep and detach are probabilities")
    if base not in ("delaunay", "grid"):
        raise ValueError(f"unknown base {base!r}")
    tag = "" if base == "delaunay" else f"/{base}"
    rng = random.Random(f"genus-g-random/{n}/{genus}/{seed}/{tracks}/{keep}/{detach}/{bipartite}{tag}")
    if base == "grid":
        pts, plane, part = _grid_base(rng, n, keep)
        bipartite = True
    else:
        pts, plane, part = _planar_base(rng, n, keep, bipartite)

    edges: list[Edge] = []
    spokes = defaultdict(list)
    coords = {v + 1: (float(x), float(y)) for v, (x, y) in enumerate(pts)}
    for a, b in plane:
        eid = len(edges) + 1
        u, w = a + 1, b + 1
        edges.append(Edge(eid, (u, w)))
        spokes[u].append((eid, (coords[w][0] - coords[u][0], coords[w][1] - coords[u][1])))
        spokes[w].append((eid, (coords[u][0] - coords[w][0], coords[u][1] - coords[w][1])))
    rot = _cw_rotation(coords, spokes)

    sides = standard_sides(genus)
    count = {j: rng.randint(1, tracks) if tracks else 0 for j in range(1, 2 * genus + 1)}
    # slots in clockwise boundary order as (side, track)
    slots = []
    for s in sides:
        order = range(1, count[s.ref.pair] + 1)
        for t in (reversed(order) if s.ref.primed else order):
            slots.append((s.ref, t))
    if not slots:
        return _graph(n, edges, genus, {}, rot, part if bipartite else None)

    corners = _outer_corners(rot, {e.id: e.endpoints for e in edges}, coords, n)
    offset = rng.randrange(len(corners))
    picks = sorted(rng.randrange(len(corners)) for _ in slots)
    at_corner = [(offset + p) % len(corners) for p in picks]

    # splice neighbouring slots that share a corner
    partner_slot: dict[int, int] = {}
    k = 0
    while k < len(slots) - 1:
        if at_corner[k] == at_corner[k + 1] and rng.random() < detach:
            partner_slot[k], partner_slot[k + 1] = k + 1, k
            k += 2
        else:
            k += 1
    other_end = {}
    index = {sl: k for k, sl in enumerate(slots)}
    for k, (ref, t) in enumerate(slots):
        other_end[k] = index[ref.partner(), t]

    chains = []
    seen = set()
    for k in range(len(slots)):
        if k in partner_slot or k in seen:
            continue
        chain = [k]
        cur = other_end[k]
        while cur in partner_slot:
            chain.append(cur)
            nxt = partner_slot[cur]
            chain.append(nxt)
            cur = other_end[nxt]
        chain.append(cur)
        seen.update(chain)
        chains.append(chain)

    lists = defaultdict(list)
    used_slots = {}
    corner_vertex = [c[0] for c in corners]
    for chain in chains:
        u = corner_vertex[at_corner[chain[0]]]
        v = corner_vertex[at_corner[chain[-1]]]
        exits = [slots[chain[i]][0] for i in range(0, len(chain), 2)]
        if u == v or len({c.pair for c in exits}) != len(exits):
            continue
        if bipartite and part[u - 1] == part[v - 1]:
            continue
        eid = len(edges) + 1
        edges.append(Edge(eid, (u, v), tuple(exits)))
        for sk in chain:
            used_slots[sk] = eid

    for k, (ref, _) in enumerate(slots):
        if k in used_slots:
            lists[ref].append(used_slots[k])
    # stubs go into the outer corners in boundary order
    stubs = defaultdict(list)
    for k in range(len(slots)):
        if k in used_slots and k not in partner_slot:
            stubs[at_corner[k]].append(used_slots[k])
    for c, (v, after) in enumerate(corners):
        if not stubs[c]:
            continue
        r = rot[v]
        pos = r.index(after) + 1 if after is not None else 0
        rot[v] = r[:pos] + stubs[c] + r[pos:]
    try:
        return _graph(n, edges, genus, lists, rot, part if bipartite else None)
    except SchemaError as exc:
        raise RuntimeError(f"generator produced an invalid schema: {exc}") from None


def _outer_corners(rot, ends, coords, n) -> list[tuple[int, int | None]]:
    """Corners of the outer face in clockwise order as (vertex, incoming edge)."""
    if not ends:
        return [(1, None)] if n >= 1 else []
    faces = trace_faces(rot, ends)

    def area2(face):
        total = 0.0
        for eid, frm in face:
            a, b = ends[eid]
            to = b if frm == a else a
            (x1, y1), (x2, y2) = coords[frm], coords[to]
            total += x1 * y2 - x2 * y1
        return total

    outer = min(faces, key=area2)
    out = []
    for eid, frm in outer:
        a, b = ends[eid]
        to = b if frm == a else a
        out.append((to, eid))
    return out


PARAMS = {
    "planar-grid": {"rows", "cols"},
    "torus-cycle": {"length", "pairs", "genus"},
    "genus-g-random": {"n", "genus", "tracks", "keep", "detach", "bipartite", "base"},
    "k33-torus": set(),
    "parallel-loops": {"count", "length", "pairs", "genus"},
}


def generate(kind: str, seed: int = 0, **params) -> EmbeddedGraph:
    if kind not in PARAMS:
        raise ValueError(f"unknown generator kind {kind!r}")
    extra = set(params) - PARAMS[kind]
    if extra:
        raise ValueError(f"{kind} takes no parameter {', '.join(sorted(extra))}")
    if kind == "planar-grid":
        return planar_grid(int(params.get("rows", 2)), int(params.get("cols", 4)))
    if kind == "torus-cycle":
        pairs = params.get("pairs", (1,))
        return torus_cycle(int(params.get("length", 4)), tuple(int(p) for p in pairs), params.get("genus"))
    if kind == "genus-g-random":
        return genus_g_random(
            int(params.get("n", 12)),
            int(params.get("genus", 1)),
            seed,
            int(params.get("tracks", 2)),
            float(params.get("keep", 0.6)),
            float(params.get("detach", 0.0)),
            bool(params.get("bipartite", True)),
            str(params.get("base", "delaunay")),
        )
    if kind == "k33-torus":
        return k33_torus()
    if kind == "parallel-loops":
        pairs = params.get("pairs", (1,))
        return parallel_loops(
            int(params.get("count", 2)), int(params.get("length", 2)),
            tuple(int(p) for p in pairs), params.get("genus"),
        )
    raise ValueError(f"unknown generator kind {kind!r}")
