"""
Line-oriented text format for embedded graphs (``.psg``).

    psg 1
    genus 1
    vertices 4
    side T1 tail=0
    side T2 tail=1
    side T1' tail=3
    side T2' tail=0
    edge 1 1 2
    edge 2 2 3 cross T1
    crossings T1 2
    crossings T2
    crossings T1' 2
    crossings T2'
    rotation 1 1
    ...
    partition L R L R

Blank lines and lines starting with ``#`` are ignored.  ``serialize_psg``
emits the canonical form: header, sides in boundary order, edges by id,
crossing lists in side order, rotations by vertex, then the partition.
"""

from __future__ import annotations

import re

from .schema import Edge, EmbeddedGraph, SchemaError, Side, SideRef

FORMAT_VERSION = 1


class PSGError(SchemaError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise PSGError(f"expected integer {what}, got {tok!r}", lineno) from None


def _side(tok: str, lineno: int) -> SideRef:
    try:
        return SideRef.parse(tok)
    except SchemaError as exc:
        raise PSGError(str(exc), lineno) from None


def parse_psg(text: str) -> EmbeddedGraph:
    header: dict[str, int] = {}
    sides: list[Side] = []
    edges: list[Edge] = []
    lists: dict[SideRef, tuple[int, ...]] = {}
    rotation: dict[int, tuple[int, ...]] = {}
    partition = None
    where: dict[tuple, int] = {}
    last = 0

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        last = lineno
        key, *rest = line.split()
        if key in ("psg", "genus", "vertices"):
            if len(rest) != 1:
                raise PSGError(f"{key} takes one value", lineno)
            if key in header:
                raise PSGError(f"repeated {key} line", lineno)
            if key != "psg" and "psg" not in header:
                raise PSGError("document must start with 'psg <version>'", lineno)
            header[key] = _int(rest[0], lineno, key)
            if key == "psg" and header[key] != FORMAT_VERSION:
                raise PSGError(f"unsupported format version {header[key]}", lineno)
            continue
        if "psg" not in header:
            raise PSGError("document must start with 'psg <version>'", lineno)
        if key == "side":
            if len(rest) != 2 or not rest[1].startswith("tail="):
                raise PSGError("expected 'side <label> tail=<corner>'", lineno)
            ref = _side(rest[0], lineno)
            sides.append(Side(ref, _int(rest[1][5:], lineno, "corner")))
            where["side", ref] = lineno
        elif key == "edge":
            if len(rest) < 3 or (len(rest) > 3 and rest[3] != "cross") or len(rest) == 4:
                raise PSGError("expected 'edge <id> <u> <v> [cross <side> ...]'", lineno)
            eid = _int(rest[0], lineno, "edge id")
            u, v = _int(rest[1], lineno, "endpoint"), _int(rest[2], lineno, "endpoint")
            crossings = tuple(_side(t, lineno) for t in rest[4:])
            edges.append(Edge(eid, (u, v), crossings))
            where["edge", eid] = lineno
        elif key == "crossings":
            if not rest:
                raise PSGError("expected 'crossings <side> <edge ids...>'", lineno)
            ref = _side(rest[0], lineno)
            if ref in lists:
                raise PSGError(f"repeated crossing list for {ref}", lineno)
            lists[ref] = tuple(_int(t, lineno, "edge id") for t in rest[1:])
            where["crossings", ref] = lineno
        elif key == "rotation":
            if not rest:
                raise PSGError("expected 'rotation <vertex> <edge ids...>'", lineno)
            v = _int(rest[0], lineno, "vertex")
            if v in rotation:
                raise PSGError(f"repeated rotation for vertex {v}", lineno)
            rotation[v] = tuple(_int(t, lineno, "edge id") for t in rest[1:])
            where["rotation", v] = lineno
        elif key == "partition":
            if partition is not None:
                raise PSGError("repeated partition line", lineno)
            partition = tuple(rest)
            where["partition"] = lineno
        else:
            raise PSGError(f"unknown directive {key!r}", lineno)

    for key in ("psg", "genus", "vertices"):
        if key not in header:
            raise PSGError(f"missing '{key}' line", last or None)
    n = header["vertices"]
    for v in rotation:
        if not 1 <= v <= n:
            raise PSGError(f"rotation for unknown vertex {v}", where["rotation", v])
    missing = [v for v in range(1, n + 1) if v not in rotation]
    if missing:
        raise PSGError(f"no rotation line for vertex {missing[0]}", last or None)
    for s in sides:
        if s.ref not in lists:
            raise PSGError(f"no crossing list for side {s.ref}", where["side", s.ref])
    for ref in lists:
        if ("side", ref) not in where:
            raise PSGError(f"crossing list for undeclared side {ref}", where["crossings", ref])

    g = EmbeddedGraph(
        n=n,
        edges=tuple(edges),
        genus=header["genus"],
        sides=tuple(sides),
        crossing_lists=tuple(lists[s.ref] for s in sides),
        rotation=tuple(rotation[v] for v in range(1, n + 1)),
        partition=partition,
    )
    try:
        return g.validate()
    except PSGError:
        raise
    except SchemaError as exc:
        raise PSGError(str(exc), _blame(str(exc), where)) from None


def _blame(message: str, where: dict) -> int | None:
    """Best guess at the line responsible for a validation failure."""
    m = re.search(r"T(\d+)('?)", message)
    if m:
        ref = SideRef(int(m.group(1)), bool(m.group(2)))
        if "crossing list of" in message or "lists" in message:
            return where.get(("crossings", ref))
        if "crossed" in message or "crossing order" in message:
            return where.get(("crossings", SideRef(ref.pair, True)))
        return where.get(("side", ref))
    m = re.search(r"edge (\d+)", message)
    if m and ("edge", int(m.group(1))) in where:
        return where["edge", int(m.group(1))]
    m = re.search(r"vertex (\d+)", message)
    if m and ("rotation", int(m.group(1))) in where:
        return where["rotation", int(m.group(1))]
    if "partition" in message:
        return where.get("partition")
    return None


def serialize_psg(g: EmbeddedGraph) -> str:
    out = [f"psg {FORMAT_VERSION}", f"genus {g.genus}", f"vertices {g.n}"]
    for s in g.sides:
        out.append(f"side {s.ref} tail={s.tail}")
    for e in sorted(g.edges, key=lambda e: e.id):
        line = f"edge {e.id} {e.tail} {e.head}"
        if e.crossings:
            line += " cross " + " ".join(str(c) for c in e.crossings)
        out.append(line)
    for s, lst in zip(g.sides, g.crossing_lists):
        out.append(" ".join(["crossings", str(s.ref), *map(str, lst)]))
    for v in g.vertices:
        out.append(" ".join(["rotation", str(v), *map(str, g.incident(v))]))
    if g.partition is not None:
        out.append(" ".join(["partition", *g.partition]))
    return "\n".join(out) + "\n"


def load_psg(path) -> EmbeddedGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_psg(fh.read())


def save_psg(g: EmbeddedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_psg(g))
