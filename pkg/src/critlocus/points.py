"""Classical points: matrix triples, cyclicity, plane partitions, oracles.

A point is a triple of n x n rational matrices with an optional marked
vector.  Cyclicity (the stability condition for the Hilbert-scheme chart)
is decided by Krylov saturation; criticality is pairwise commutation.

Plane partitions, the finite downward-closed subsets of N^3, index the
torus-fixed points and generate the standard test corpus via multiplication
operators on the monomial basis.  Two independent enumeration strategies
are provided; their agreement is one of the acceptance checks.

``koszul_ext_oracle`` computes Ext dimensions from scratch using the Koszul
complex of the three commuting adjoint operators on End(V), a code path
sharing nothing with the endomorphism model beyond the matrix kernels.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .linalg import DenseMatrix
from .scalars import QQ


class MatrixPoint:
    """A triple (X, Y, Z) of n x n matrices with an optional vector v."""

    def __init__(self, X, Y, Z, v=None, provenance="manual"):
        self.n = len(X)
        self.X = [[Fraction(x) for x in row] for row in X]
        self.Y = [[Fraction(x) for x in row] for row in Y]
        self.Z = [[Fraction(x) for x in row] for row in Z]
        for m in (self.X, self.Y, self.Z):
            if len(m) != self.n or any(len(row) != self.n for row in m):
                raise ValueError("matrices must be square of equal size")
        self.v = [Fraction(x) for x in v] if v is not None else None
        if self.v is not None and len(self.v) != self.n:
            raise ValueError("vector length mismatch")
        self.provenance = provenance

    def matrices(self):
        return self.X, self.Y, self.Z

    def is_commuting(self) -> bool:
        for a, b in ((self.X, self.Y), (self.Y, self.Z), (self.Z, self.X)):
            if not _commutes(a, b):
                return False
        return True

    def conjugate(self, g, g_inv=None) -> "MatrixPoint":
        if g_inv is None:
            g_inv = _invert(g)
            if g_inv is None:
                raise ValueError("conjugating matrix is singular")
        conj = lambda m: _mul(_mul(g, m), g_inv)
        v = _apply(g, self.v) if self.v is not None else None
        return MatrixPoint(
            conj(self.X), conj(self.Y), conj(self.Z), v, provenance="random-conjugate"
        )

    def to_record(self) -> dict:
        enc = lambda m: [[str(x) for x in row] for row in m]
        rec = {
            "n": self.n,
            "X": enc(self.X),
            "Y": enc(self.Y),
            "Z": enc(self.Z),
            "provenance": self.provenance,
        }
        if self.v is not None:
            rec["v"] = [str(x) for x in self.v]
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "MatrixPoint":
        dec = lambda m: [[Fraction(x) for x in row] for row in m]
        return cls(
            dec(rec["X"]),
            dec(rec["Y"]),
            dec(rec["Z"]),
            [Fraction(x) for x in rec["v"]] if "v" in rec else None,
            rec.get("provenance", "manual"),
        )


def _mul(a, b):
    n = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)
    ]


def _commutes(a, b):
    return _mul(a, b) == _mul(b, a)


def _apply(m, v):
    n = len(m)
    return [sum(m[i][j] * v[j] for j in range(n)) for i in range(n)]


def _invert(g):
    n = len(g)
    m = DenseMatrix.from_rows(g)
    if m.rank() < n:
        return None
    from .linalg import solve

    cols = []
    for j in range(n):
        e = [Fraction(1) if i == j else Fraction(0) for i in range(n)]
        cols.append(solve(m, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def save_corpus(points, path):
    with open(path, "w") as fh:
        json.dump([p.to_record() for p in points], fh, indent=1, sort_keys=True)


def load_corpus(path):
    with open(path) as fh:
        return [MatrixPoint.from_record(rec) for rec in json.load(fh)]


# -- cyclicity and criticality -------------------------------------------------


class _RowSpan:
    def __init__(self, dim):
        self.dim = dim
        self.rows = []

    def reduce(self, vec):
        v = list(vec)
        for piv, row in self.rows:
            if v[piv] != 0:
                c = v[piv]
                v = [x - c * y for x, y in zip(v, row)]
        return v

    def add(self, vec) -> bool:
        v = self.reduce(vec)
        for i, x in enumerate(v):
            if x != 0:
                v = [y / x for y in v]
                self.rows.append((i, v))
                self.rows.sort()
                return True
        return False


def is_cyclic(pt: MatrixPoint) -> bool:
    """Krylov saturation: grow span{v} by X, Y, Z until stable."""
    if pt.v is None:
        raise ValueError("cyclicity needs a marked vector")
    span = _RowSpan(pt.n)
    if not span.add(pt.v):
        return False
    frontier = [pt.v]
    while frontier and len(span.rows) < pt.n:
        new_frontier = []
        for vec in frontier:
            for m in pt.matrices():
                w = _apply(m, vec)
                if span.add(w):
                    new_frontier.append(w)
        frontier = new_frontier
    return len(span.rows) == pt.n


def is_critical(pt: MatrixPoint) -> bool:
    """dW = 0 at the point, i.e. the three matrices pairwise commute."""
    return pt.is_commuting()


def is_critical_via_symbolic_gradient(pt: MatrixPoint) -> bool:
    """Cross-check: evaluate the symbolic entries of dW at the point."""
    from .potential import MatrixCdga

    cdga = MatrixCdga(pt.n)
    assignment = cdga.point_assignment(pt.X, pt.Y, pt.Z)
    return all(p.evaluate(assignment) == 0 for p in cdga.jacobian_entries())


# -- plane partitions ---------------------------------------------------------------


def _is_downward_closed(cells) -> bool:
    s = set(cells)
    for (a, b, c) in s:
        for d in range(3):
            p = list((a, b, c))
            if p[d] > 0:
                p[d] -= 1
                if tuple(p) not in s:
                    return False
    return True


class PlanePartition:
    """A finite downward-closed subset of N^3."""

    def __init__(self, cells):
        self.cells = frozenset(tuple(c) for c in cells)
        if not _is_downward_closed(self.cells):
            raise ValueError("cell set is not downward closed")

    def __len__(self):
        return len(self.cells)

    def __eq__(self, other):
        return isinstance(other, PlanePartition) and self.cells == other.cells

    def __hash__(self):
        return hash(self.cells)

    def sorted_cells(self):
        return sorted(self.cells)


def enumerate_partitions(n: int):
    """All plane partitions of size n, by growing along addable cells."""
    if n < 1:
        raise ValueError("size must be positive")
    level = {frozenset({(0, 0, 0)})}
    for _ in range(n - 1):
        nxt = set()
        for s in level:
            for cell in _addable_cells(s):
                nxt.add(s | {cell})
        level = nxt
    return [PlanePartition(s) for s in sorted(level, key=sorted)]


def _addable_cells(s):
    out = set()
    for (a, b, c) in s:
        for d in range(3):
            p = [a, b, c]
            p[d] += 1
            cand = tuple(p)
            if cand in s:
                continue
            ok = True
            for e in range(3):
                q = list(cand)
                if q[e] > 0:
                    q[e] -= 1
                    if tuple(q) not in s:
                        ok = False
                        break
            if ok:
                out.add(cand)
    return out


def enumerate_partitions_by_heights(n: int):
    """Independent strategy: a plane partition is a height matrix h(a, b),
    weakly decreasing along rows and columns, with total sum n."""
    results = []

    def extend_rows(remaining, prev_row, acc):
        # acc rows are weakly decreasing tuples; each entrywise <= prev_row
        if remaining == 0:
            results.append(tuple(acc))
            return
        for row in _weakly_decreasing_rows(remaining, prev_row):
            weight = sum(row)
            if weight == 0:
                continue
            extend_rows(remaining - weight, row, acc + [row])

    def _weakly_decreasing_rows(budget, bound_row):
        # all nonzero weakly decreasing tuples fitting under bound_row
        out = []

        def rec(pos, last, left, acc):
            if acc:
                out.append(tuple(acc))
            if pos >= len(bound_row):
                return
            cap = min(last, bound_row[pos], left)
            for v in range(cap, 0, -1):
                rec(pos + 1, v, left - v, acc + [v])

        rec(0, budget, budget, [])
        return out

    top = tuple([n] * n)
    extend_rows(n, top, [])
    parts = []
    for mat in results:
        cells = []
        for a, row in enumerate(mat):
            for b, h in enumerate(row):
                for c in range(h):
                    cells.append((a, b, c))
        parts.append(PlanePartition(cells))
    uniq = sorted({p.cells for p in parts}, key=sorted)
    return [PlanePartition(c) for c in uniq]


def point_from_partition(pp: PlanePartition) -> MatrixPoint:
    """Multiplication by x, y, z on the monomial basis of the partition,
    truncated to zero outside; the marked vector is the monomial 1."""
    basis = pp.sorted_cells()
    index = {cell: k for k, cell in enumerate(basis)}
    n = len(basis)

    def mult_op(axis):
        m = [[Fraction(0)] * n for _ in range(n)]
        for cell, k in index.items():
            target = list(cell)
            target[axis] += 1
            tk = index.get(tuple(target))
            if tk is not None:
                m[tk][k] = Fraction(1)
        return m

    v = [Fraction(0)] * n
    v[index[(0, 0, 0)]] = Fraction(1)
    return MatrixPoint(mult_op(0), mult_op(1), mult_op(2), v, provenance="partition")


def nilpotent_regular_point(n: int) -> MatrixPoint:
    """The single-row partition point: X the nilpotent shift, Y = Z = 0."""
    pp = PlanePartition({(a, 0, 0) for a in range(n)})
    return point_from_partition(pp)


# -- samplers ------------------------------------------------------------------------


def random_invertible(n, rng):
    while True:
        g = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        if DenseMatrix.from_rows(g).rank() == n:
            return g


def random_conjugate_points(n, count, rng):
    """Commuting cyclic points: partition points conjugated by random
    invertible small-integer matrices, plus diagonal points with distinct
    joint eigenvalues."""
    parts = enumerate_partitions(n)
    out = []
    while len(out) < count:
        if rng.random() < 0.25:
            # diagonal triple with distinct eigenvalue triples is cyclic
            triples = set()
            while len(triples) < n:
                triples.add(
                    (rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3))
                )
            triples = sorted(triples)
            diag = lambda vals: [
                [Fraction(vals[i]) if i == j else Fraction(0) for j in range(n)]
                for i in range(n)
            ]
            base = MatrixPoint(
                diag([t[0] for t in triples]),
                diag([t[1] for t in triples]),
                diag([t[2] for t in triples]),
                [Fraction(1)] * n,
                provenance="manual",
            )
        else:
            base = point_from_partition(parts[rng.randrange(len(parts))])
        out.append(base.conjugate(random_invertible(n, rng)))
    return out


# -- the independent Koszul oracle -----------------------------------------------------


def _adjoint_matrix(m, field=QQ):
    """Matrix of [m, -] on End(V) in the basis E_(p,q), index p*n + q."""
    n = len(m)
    nn = n * n
    out = DenseMatrix.zero(nn, nn, field)
    for p in range(n):
        for q in range(n):
            col = p * n + q
            for a in range(n):
                # [m, E_pq] = sum_a m(a,p) E_aq - E_p? m: (E_pq m)(p,b) = m(q,b)
                out.data[a * n + q][col] = field.add(
                    out.data[a * n + q][col], field.of(m[a][p])
                )
            for b in range(n):
                out.data[p * n + b][col] = field.sub(
                    out.data[p * n + b][col], field.of(m[q][b])
                )
    return out


def koszul_ext_oracle(pt: MatrixPoint, field=QQ) -> dict:
    """Ext dimensions from the Koszul complex of ad_X, ad_Y, ad_Z on End(V),
    with the composition-trace pairing.  Independent of the endomorphism
    model; shares only the dense matrix kernels.
    """
    if not pt.is_commuting():
        raise ValueError("oracle needs a commuting triple")
    n = pt.n
    nn = n * n
    ax = _adjoint_matrix(pt.X, field)
    ay = _adjoint_matrix(pt.Y, field)
    az = _adjoint_matrix(pt.Z, field)
    zero = DenseMatrix.zero(nn, nn, field)

    def stack(rows_of_blocks):
        blocks_per_row = len(rows_of_blocks[0])
        data = []
        for row_blocks in rows_of_blocks:
            for i in range(nn):
                row = []
                for blk in row_blocks:
                    row.extend(blk.data[i])
                data.append(row)
        return DenseMatrix(field, nn * len(rows_of_blocks), nn * blocks_per_row, data)

    d0 = stack([[ax], [ay], [az]])
    d1 = stack(
        [
            [zero, az.scale(-1), ay],
            [az, zero, ax.scale(-1)],
            [ay.scale(-1), ax, zero],
        ]
    )
    d2 = stack([[ax, ay, az]])
    cx = FreeComplexOracle(field, nn, d0, d1, d2)
    dims = cx.homology_dims()
    pair01 = cx.pairing_rank()
    perfect = (
        dims[0] == dims[3]
        and dims[1] == dims[2]
        and pair01[0] == dims[0]
        and pair01[1] == dims[1]
    )
    return {
        "dims": dims,
        "euler": dims[0] - dims[1] + dims[2] - dims[3],
        "pairing_ranks": pair01,
        "pairing_perfect": perfect,
    }


class FreeComplexOracle:
    """Minimal four-term numeric complex used only by the oracle."""

    def __init__(self, field, nn, d0, d1, d2):
        from .complexes import FreeComplex

        self.field = field
        self.nn = nn
        self.cx = FreeComplex(
            field, {0: nn, 1: 3 * nn, 2: 3 * nn, 3: nn}, {0: d0, 1: d1, 2: d2}
        )

    def homology_dims(self):
        return self.cx.homology_dims()

    def pairing_rank(self):
        from .complexes import homology_representatives

        field = self.field
        nn = self.nn
        n = int(round(nn ** 0.5))
        reps = {k: homology_representatives(self.cx, k) for k in range(4)}

        def tr_pair(va, vb, slots):
            # slot s of degree k pairs with slot s of degree 3 - k by the
            # trace of the composition
            acc = field.zero
            for s in range(slots):
                base = s * nn
                for p in range(n):
                    for q in range(n):
                        xa = va[base + p * n + q]
                        xb = vb[base + q * n + p]
                        acc = field.add(acc, field.mul(xa, xb))
            return acc

        ranks = []
        for k, slots in ((0, 1), (1, 3)):
            ra = reps[k]
            rb = reps[3 - k]
            m = DenseMatrix.zero(len(ra), len(rb), field)
            for a, va in enumerate(ra):
                for b, vb in enumerate(rb):
                    m.data[a][b] = tr_pair(va, vb, slots)
            ranks.append(m.rank() if ra and rb else 0)
        return tuple(ranks)
