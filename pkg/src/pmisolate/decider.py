"""
Perfect-matching decision through exact determinants.

For a bipartite graph with edge weights w, the matrix with entry 2^w(u,v)
at (u, v) has determinant equal to the signed sum of 2^w(M) over perfect
matchings M.  When one matching is the unique lightest, the lowest set bit
of the determinant sits exactly at its weight.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import gmpy2

from .schema import EmbeddedGraph
from .weights import WeightFamily, WeightFunction, orient_bipartite

FIRST_PRECISION = 64


@dataclass(frozen=True)
class WeightedBiadjacencyMatrix:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    # exponents[i][j] lists 2-exponents of the edges joining rows[i] and cols[j]
    exponents: tuple[tuple[tuple[int, ...], ...], ...]
    # perfect-matching weights exceed matrix exponents by exactly this much
    offset: int = 0

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def square(self) -> bool:
        return len(self.rows) == len(self.cols)

    def max_exponent(self) -> int:
        return max((e for row in self.exponents for cell in row for e in cell), default=0)

    def entries(self, below: int | None = None) -> list[list[int]]:
        """Integer matrix, dropping powers 2^e with e >= ``below`` if given."""
        return [
            [sum(1 << e for e in cell if below is None or e < below) for cell in row]
            for row in self.exponents
        ]


def build_matrix(g: EmbeddedGraph, w: WeightFunction, reduce: bool = True) -> WeightedBiadjacencyMatrix:
    """Biadjacency matrix of an L/R graph, shifted by vertex potentials.

    Subtracting a constant from all edges at one vertex changes every
    perfect matching's weight by the same amount, so row then column minima
    are removed and their total is kept as ``offset``.
    """
    d = g if g.partition is not None else orient_bipartite(g)
    rows = tuple(v for v in d.vertices if d.side_of(v) == "L")
    cols = tuple(v for v in d.vertices if d.side_of(v) == "R")
    ri = {v: k for k, v in enumerate(rows)}
    ci = {v: k for k, v in enumerate(cols)}
    cells = [[[] for _ in cols] for _ in rows]
    for e in d.edges:
        u, v = e.endpoints
        if d.side_of(u) == "R":
            u, v = v, u
        cells[ri[u]][ci[v]].append(w.values[e.id])
    offset = 0
    if reduce:
        for row in cells:
            vals = [x for cell in row for x in cell]
            if vals:
                low = min(vals)
                offset += low
                for cell in row:
                    cell[:] = [x - low for x in cell]
        for j in range(len(cols)):
            vals = [x for row in cells for x in row[j]]
            if vals:
                low = min(vals)
                offset += low
                for row in cells:
                    row[j][:] = [x - low for x in row[j]]
    else:
        low = min((x for row in cells for cell in row for x in cell), default=0)
        if low < 0:
            # constant shift: every edge weight moves by -low
            for row in cells:
                for cell in row:
                    cell[:] = [x - low for x in cell]
            offset = low * len(rows)
    return WeightedBiadjacencyMatrix(
        rows, cols, tuple(tuple(tuple(sorted(c)) for c in row) for row in cells), offset
    )


def exact_determinant(m: Sequence[Sequence[int]] | WeightedBiadjacencyMatrix) -> int:
    """Determinant by Bareiss fraction-free elimination; every division is exact."""
    if isinstance(m, WeightedBiadjacencyMatrix):
        if not m.square:
            raise ValueError("matrix is not square")
        m = m.entries()
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix is not square")
    if n == 0:
        return 1
    a = [[gmpy2.mpz(x) for x in row] for row in m]
    sign = 1
    prev = gmpy2.mpz(1)
    for k in range(n - 1):
        # smallest nonzero pivot keeps intermediate sizes down
        best = None
        for r in range(k, n):
            if a[r][k]:
                size = gmpy2.bit_length(a[r][k])
                if best is None or size < best[0]:
                    best = (size, r)
        if best is None:
            return 0
        r = best[1]
        if r != k:
            a[k], a[r] = a[r], a[k]
            sign = -sign
        piv = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            f = rowi[k]
            for j in range(k + 1, n):
                x = rowi[j] * piv - f * rowk[j]
                rowi[j] = gmpy2.divexact(x, prev) if prev != 1 else x
            rowi[k] = 0
        prev = piv
    return int(sign * a[n - 1][n - 1])


def lowest_set_bit(x: int) -> int:
    if x == 0:
        raise ValueError("zero has no set bit")
    return (x & -x).bit_length() - 1


@dataclass(frozen=True)
class BlockResult:
    nonzero: bool
    low_bit: int | None
    precision: int


def _components(m: WeightedBiadjacencyMatrix) -> list[tuple[list[int], list[int]]]:
    adj = defaultdict(list)
    for i, row in enumerate(m.exponents):
        for j, cell in enumerate(row):
            if cell:
                adj["r", i].append(("c", j))
                adj["c", j].append(("r", i))
    seen = set()
    out = []
    nodes = [("r", i) for i in range(len(m.rows))] + [("c", j) for j in range(len(m.cols))]
    for s in nodes:
        if s in seen:
            continue
        seen.add(s)
        stack, rs, cs = [s], [], []
        while stack:
            x = stack.pop()
            (rs if x[0] == "r" else cs).append(x[1])
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        out.append((sorted(rs), sorted(cs)))
    return out


def _block_lowest_bit(cells: list[list[tuple[int, ...]]]) -> BlockResult:
    """Lowest set bit of a block's determinant by increasing 2-adic precision.

    det(A) mod 2^B only depends on the entries mod 2^B, so powers 2^e with
    e >= B can be dropped.  Precision doubles until the residue is nonzero or
    nothing is dropped any more, at which point the determinant is exact.
    """
    top = max((e for row in cells for cell in row for e in cell), default=0)
    b = FIRST_PRECISION
    while True:
        exact = b > top
        mat = [[sum(1 << e for e in cell if exact or e < b) for cell in row] for row in cells]
        det = exact_determinant(mat)
        if exact:
            return BlockResult(det != 0, lowest_set_bit(det) if det else None, b)
        residue = det % (1 << b)
        if residue:
            return BlockResult(True, lowest_set_bit(residue), b)
        b = min(2 * b, top + 1)


@dataclass(frozen=True)
class DeterminantStatus:
    nonzero: bool
    # lowest set bit of the determinant (matrix exponents, before the offset)
    low_bit: int | None
    offset: int
    precision: int

    @property
    def weight(self) -> int | None:
        return None if self.low_bit is None else self.low_bit + self.offset


def determinant_status(m: WeightedBiadjacencyMatrix) -> DeterminantStatus:
    """Whether det is nonzero and where its lowest set bit sits, block by block."""
    if not m.square:
        return DeterminantStatus(False, None, m.offset, 0)
    total = 0
    precision = 0
    for rs, cs in _components(m):
        if len(rs) != len(cs):
            return DeterminantStatus(False, None, m.offset, precision)
        if not rs:
            continue
        cells = [[m.exponents[i][j] for j in cs] for i in rs]
        res = _block_lowest_bit(cells)
        precision = max(precision, res.precision)
        if not res.nonzero:
            return DeterminantStatus(False, None, m.offset, precision)
        total += res.low_bit
    return DeterminantStatus(True, total, m.offset, precision)


def cross_check_max_matching(g: EmbeddedGraph) -> bool:
    """Perfect matching exists, by augmenting paths from every L vertex."""
    d = g if g.partition is not None else orient_bipartite(g)
    left = [v for v in d.vertices if d.side_of(v) == "L"]
    right = [v for v in d.vertices if d.side_of(v) == "R"]
    if len(left) != len(right):
        return False
    adj = defaultdict(list)
    for e in d.edges:
        u, v = e.endpoints
        if d.side_of(u) == "R":
            u, v = v, u
        adj[u].append(v)
    mate: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for v in adj[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in mate or augment(mate[v], seen):
                mate[v] = u
                return True
        return False

    return all(augment(u, set()) for u in left)


@dataclass(frozen=True)
class MemberStatus:
    p: int | None
    status: DeterminantStatus


@dataclass(frozen=True)
class DecisionResult:
    has_pm: bool
    witness_weight: int | None = None
    witness_member: int | None = None
    # determinant and augmenting-path search disagree
    alarm: bool = False
    tried: tuple[MemberStatus, ...] = field(default=())
    reason: str = ""

    def report(self) -> str:
        lines = []
        for t in self.tried:
            label = "base" if t.p is None else f"p={t.p}"
            if t.status.nonzero:
                lines.append(f"member {label} det nonzero lowbit={t.status.low_bit} offset={t.status.offset}")
            else:
                lines.append(f"member {label} det zero")
        if self.has_pm:
            lines.append(f"perfect matching: yes, weight {self.witness_weight} under p={self.witness_member}")
        else:
            lines.append("no perfect matching" + (f" ({self.reason})" if self.reason else ""))
        if self.alarm:
            lines.append("ALARM: determinant and augmenting-path search disagree")
        return "\n".join(lines) + "\n"


def decide_pm(g: EmbeddedGraph, family: WeightFamily, reduce: bool = True) -> DecisionResult:
    """Test family members until one has a nonzero determinant.

    An empty family (no perfect matching was found when it was built) falls
    back to the base weight.  If every determinant vanishes the answer is
    checked against augmenting-path search and any disagreement raises the
    alarm flag.
    """
    d = family.graph
    n_left = sum(1 for v in d.vertices if d.side_of(v) == "L")
    if 2 * n_left != d.n:
        return DecisionResult(False, reason="sides have different sizes")
    members = [(mb.p, mb.weights) for mb in family.members] or [(None, family.base)]
    tried = []
    for p, w in members:
        st = determinant_status(build_matrix(d, w, reduce=reduce))
        tried.append(MemberStatus(p, st))
        if st.nonzero:
            return DecisionResult(True, st.weight, p, tried=tuple(tried))
    exists = cross_check_max_matching(d)
    return DecisionResult(False, alarm=exists, tried=tuple(tried))
