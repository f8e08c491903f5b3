"""Bounded complexes of finite free modules, symbolic and numeric.

A :class:`FreeComplex` stores a rank per degree and, for each consecutive
pair of degrees, a differential matrix.  Entries are SuperPoly elements
(symbolic complex over a generator table) or field scalars (numeric
complex).  Matrices act on column vectors: the entry at (row, col) is the
coefficient of target basis vector ``row`` in the image of source basis
vector ``col``.

Complexes arising as generator-degree presentations of dg modules also
carry *twist* components: matrices from degree k to degree l >= k+2 whose
entries have negative cohomological degree.  For those, the structural
identity is not the bare matrix equation d . d = 0 but the flatness
equation of the twisted differential,

    d(D[a->c]) + sum_b (-1)^((a+1-b)(b+2-c)) D[b->c] . D[a->b]  =  0,

where d differentiates the entries.  ``check_d_squared`` tests the bare
matrix equation (which holds for honest complexes, e.g. anything numeric
or the Koszul presentation of the potential); ``check_flatness`` tests the
twisted identity.  Setting every negative-degree generator to zero kills
the twist components, so evaluation at a classical point of the critical
locus always produces an honest numeric complex.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .linalg import DenseMatrix, kernel_basis
from .scalars import QQ
from .superpoly import Derivation, GeneratorTable, SuperPoly, poly_from_text, poly_to_text


class SymMatrix:
    """Dense matrix with SuperPoly entries."""

    __slots__ = ("table", "rows", "cols", "data")

    def __init__(self, table: GeneratorTable, rows: int, cols: int, data=None):
        self.table = table
        self.rows = rows
        self.cols = cols
        if data is None:
            z = SuperPoly.zero(table)
            self.data = [[z for _ in range(cols)] for _ in range(rows)]
        else:
            if len(data) != rows or any(len(r) != cols for r in data):
                raise ValueError("shape mismatch")
            self.data = [list(r) for r in data]

    @classmethod
    def zero(cls, table, rows, cols):
        return cls(table, rows, cols)

    def copy(self):
        return SymMatrix(self.table, self.rows, self.cols, self.data)

    def __eq__(self, other):
        return (
            isinstance(other, SymMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and all(
                self.data[i][j] == other.data[i][j]
                for i in range(self.rows)
                for j in range(self.cols)
            )
        )

    def set(self, i, j, p: SuperPoly):
        self.data[i][j] = p

    def add_to(self, i, j, p: SuperPoly):
        self.data[i][j] = self.data[i][j] + p

    def entry(self, i, j) -> SuperPoly:
        return self.data[i][j]

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.data for p in row)

    def first_nonzero(self):
        for i in range(self.rows):
            for j in range(self.cols):
                if not self.data[i][j].is_zero():
                    return (i, j, self.data[i][j])
        return None

    def matmul(self, other: "SymMatrix") -> "SymMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matmul")
        out = SymMatrix(self.table, self.rows, other.cols)
        for i in range(self.rows):
            for k in range(self.cols):
                a = self.data[i][k]
                if a.is_zero():
                    continue
                for j in range(other.cols):
                    b = other.data[k][j]
                    if b.is_zero():
                        continue
                    out.data[i][j] = out.data[i][j] + a * b
        return out

    def add(self, other: "SymMatrix") -> "SymMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in add")
        out = SymMatrix(self.table, self.rows, self.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                out.data[i][j] = self.data[i][j] + other.data[i][j]
        return out

    def scale(self, c) -> "SymMatrix":
        out = SymMatrix(self.table, self.rows, self.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                out.data[i][j] = self.data[i][j].scale(c)
        return out

    def transpose(self) -> "SymMatrix":
        return SymMatrix(
            self.table,
            self.cols,
            self.rows,
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def map_entries(self, fn) -> "SymMatrix":
        return SymMatrix(
            self.table,
            self.rows,
            self.cols,
            [[fn(p) for p in row] for row in self.data],
        )

    def evaluate(self, assignment, field=QQ) -> DenseMatrix:
        return DenseMatrix(
            field,
            self.rows,
            self.cols,
            [[field.of(p.evaluate(assignment)) for p in row] for row in self.data],
        )


class FreeComplex:
    """Cohomologically indexed complex of free modules.

    ``ranks``: dict degree -> rank (sparse; missing degrees are rank 0).
    ``diff``:  dict degree k -> matrix for d^k : C^k -> C^(k+1).
    ``twist``: dict (k, l) with l >= k+2 -> matrix of the extra dg-module
               components (empty for honest complexes).
    ``base``:  a GeneratorTable for symbolic complexes, or a scalar field.
    """

    def __init__(self, base, ranks: dict, diff: dict, twist: Optional[dict] = None):
        self.base = base
        self.ranks = {int(k): int(r) for k, r in ranks.items() if r}
        self.diff = dict(diff)
        self.twist = dict(twist) if twist else {}
        self.symbolic = isinstance(base, GeneratorTable)
        self._check_shapes()

    def _check_shapes(self):
        for k, m in self.diff.items():
            if m.cols != self.ranks.get(k, 0) or m.rows != self.ranks.get(k + 1, 0):
                raise ValueError(f"differential at degree {k} has wrong shape")
        for (k, l), m in self.twist.items():
            if l < k + 2:
                raise ValueError("twist components must jump at least 2 degrees")
            if m.cols != self.ranks.get(k, 0) or m.rows != self.ranks.get(l, 0):
                raise ValueError(f"twist component {k}->{l} has wrong shape")

    def degrees(self):
        return sorted(self.ranks)

    def rank(self, k: int) -> int:
        return self.ranks.get(k, 0)

    def differential(self, k: int):
        d = self.diff.get(k)
        if d is not None:
            return d
        rows = self.ranks.get(k + 1, 0)
        cols = self.ranks.get(k, 0)
        if self.symbolic:
            return SymMatrix.zero(self.base, rows, cols)
        return DenseMatrix.zero(rows, cols, self.base)

    def component(self, k: int, l: int):
        """Full differential component from degree k to degree l."""
        if l == k + 1:
            return self.differential(k)
        m = self.twist.get((k, l))
        if m is not None:
            return m
        rows, cols = self.ranks.get(l, 0), self.ranks.get(k, 0)
        if self.symbolic:
            return SymMatrix.zero(self.base, rows, cols)
        return DenseMatrix.zero(rows, cols, self.base)

    # -- structural checks ---------------------------------------------------

    def check_d_squared(self):
        """Bare matrix check: each composite of consecutive differentials is 0.

        Returns (ok, failures) where failures lists (degree, row, col, entry)
        for the first offending entry of each nonzero composite.
        """
        failures = []
        degs = self.degrees()
        for k in degs:
            if self.rank(k) and self.rank(k + 1) and self.rank(k + 2):
                comp = self.differential(k + 1).matmul(self.differential(k))
                bad = _first_nonzero(comp)
                if bad is not None:
                    failures.append((k, *bad))
        return (not failures), failures

    def check_flatness(self, derivation: Optional[Derivation] = None):
        """Twisted flatness: d(D[a->c]) + sum_b +-(D[b->c] D[a->b]) = 0.

        For numeric complexes, or symbolic ones with closed entries and no
        twist, this reduces to check_d_squared.  ``derivation`` is the
        differential of the base cdga acting on entries; omit it for
        numeric bases.  The route through degree b carries the Koszul sign
        (-1)^((a+1-b)(b+2-c)) from moving entries past each other.
        """
        failures = []
        degs = self.degrees()
        lo, hi = degs[0], degs[-1]
        for a in range(lo, hi + 1):
            if not self.rank(a):
                continue
            for c in range(a + 1, hi + 1):
                if not self.rank(c):
                    continue
                total = None
                for b in range(a + 1, c):
                    if not self.rank(b):
                        continue
                    prod = self.component(b, c).matmul(self.component(a, b))
                    if ((a + 1 - b) * (b + 2 - c)) & 1:
                        prod = prod.scale(-1)
                    total = prod if total is None else total.add(prod)
                if derivation is not None:
                    dD = self.component(a, c).map_entries(derivation.apply)
                    total = dD if total is None else total.add(dD)
                if total is not None:
                    bad = _first_nonzero(total)
                    if bad is not None:
                        failures.append((a, c, bad[0], bad[1]))
        return (not failures), failures

    # -- evaluation ------------------------------------------------------------

    def evaluate_at(self, assignment: dict, field=QQ) -> "FreeComplex":
        """Set degree-0 generators to scalars, all others to zero.

        ``assignment`` maps generator index (or name) to a rational.  Twist
        components have strictly negative entry degrees, so they evaluate to
        zero and are dropped; this is asserted.
        """
        if not self.symbolic:
            raise ValueError("complex is already numeric")
        table = self.base
        idx_assignment = {}
        for k, v in assignment.items():
            idx_assignment[k if isinstance(k, int) else table.idx(k)] = Fraction(v)
        for k in range(len(table)):
            g = table.gen(k)
            if g.cdeg == 0 and g.fdeg == 0 and k not in idx_assignment:
                raise KeyError(f"missing assignment for degree-0 generator {g.name}")
        diff = {k: m.evaluate(idx_assignment, field) for k, m in self.diff.items()}
        for (k, l), m in self.twist.items():
            ev = m.evaluate(idx_assignment, field)
            if not ev.is_zero():
                raise AssertionError("twist component survived evaluation")
        return FreeComplex(field, dict(self.ranks), diff)

    # -- homology ----------------------------------------------------------------

    def homology_dims(self) -> dict:
        """dim H^k = rank_k - rank d^k - rank d^(k-1) for a numeric complex."""
        if self.symbolic:
            raise ValueError("homology over a polynomial base is out of scope")
        ok, failures = self.check_d_squared()
        if not ok:
            raise ValueError(f"d^2 != 0 at {failures[0][:2]}")
        dims = {}
        rk = {k: self.differential(k).rank() if self.rank(k) and self.rank(k + 1) else 0 for k in self.ranks}
        for k in self.degrees():
            dims[k] = self.rank(k) - rk.get(k, 0) - rk.get(k - 1, 0)
        return dims

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * r for k, r in self.ranks.items())

    # -- serialization -------------------------------------------------------------

    def to_json(self) -> str:
        if not self.symbolic:
            raise ValueError("serialization is for symbolic complexes")
        obj = {
            "degrees": [self.degrees()[0], self.degrees()[-1]],
            "ranks": {str(k): r for k, r in sorted(self.ranks.items())},
            "differentials": {
                str(k): _matrix_entries(m) for k, m in sorted(self.diff.items())
            },
            "twists": {
                f"{k},{l}": _matrix_entries(m)
                for (k, l), m in sorted(self.twist.items())
            },
        }
        return json.dumps(obj, sort_keys=True)

    @classmethod
    def from_json(cls, table: GeneratorTable, text: str) -> "FreeComplex":
        obj = json.loads(text)
        ranks = {int(k): r for k, r in obj["ranks"].items()}

        def load(entries, rows, cols):
            m = SymMatrix.zero(table, rows, cols)
            for key, s in entries.items():
                i, j = (int(x) for x in key.split(","))
                m.set(i, j, poly_from_text(table, s))
            return m

        diff = {
            int(k): load(v, ranks.get(int(k) + 1, 0), ranks.get(int(k), 0))
            for k, v in obj["differentials"].items()
        }
        twist = {}
        for key, v in obj.get("twists", {}).items():
            k, l = (int(x) for x in key.split(","))
            twist[(k, l)] = load(v, ranks.get(l, 0), ranks.get(k, 0))
        return cls(table, ranks, diff, twist)


def _image_basis(mat: DenseMatrix):
    return [[mat.data[i][j] for i in range(mat.rows)] for j in range(mat.cols)]


class _Span:
    """Incremental row-echelon span over a field."""

    def __init__(self, field, dim):
        self.field = field
        self.dim = dim
        self.rows = []  # (pivot index, normalized vector)

    def reduce(self, vec):
        f = self.field
        v = list(vec)
        for piv, row in self.rows:
            if not f.is_zero(v[piv]):
                c = v[piv]
                v = [f.sub(x, f.mul(c, y)) for x, y in zip(v, row)]
        return v

    def add(self, vec) -> bool:
        f = self.field
        v = self.reduce(vec)
        for i, x in enumerate(v):
            if not f.is_zero(x):
                inv = f.inv(x)
                v = [f.mul(inv, y) for y in v]
                self.rows.append((i, v))
                self.rows.sort(key=lambda r: r[0])
                return True
        return False

    def size(self):
        return len(self.rows)


def homology_representatives(cx: FreeComplex, k: int):
    """Vectors spanning H^k of a numeric complex, as cycle representatives."""
    field = cx.base
    rk = cx.rank(k)
    if rk == 0:
        return []
    if cx.rank(k + 1):
        cycles = kernel_basis(cx.differential(k))
    else:
        cycles = [
            [field.one if i == j else field.zero for i in range(rk)]
            for j in range(rk)
        ]
    span = _Span(field, rk)
    if cx.rank(k - 1):
        for col in _image_basis(cx.differential(k - 1)):
            span.add(col)
    reps = []
    for v in cycles:
        if span.add(v):
            reps.append(v)
    return reps


def _matrix_entries(m: SymMatrix) -> dict:
    out = {}
    for i in range(m.rows):
        for j in range(m.cols):
            p = m.data[i][j]
            if not p.is_zero():
                out[f"{i},{j}"] = poly_to_text(p)
    return out


def _first_nonzero(m):
    if isinstance(m, SymMatrix):
        return m.first_nonzero()
    f = m.field
    for i in range(m.rows):
        for j in range(m.cols):
            if not f.is_zero(m.data[i][j]):
                return (i, j, m.data[i][j])
    return None


class ChainMap:
    """A degree-0 map of complexes, one matrix per degree."""

    def __init__(self, source: FreeComplex, target: FreeComplex, blocks: dict):
        self.source = source
        self.target = target
        self.blocks = dict(blocks)
        for k, m in self.blocks.items():
            if m.cols != source.rank(k) or m.rows != target.rank(k):
                raise ValueError(f"block at degree {k} has wrong shape")

    def block(self, k: int):
        b = self.blocks.get(k)
        if b is not None:
            return b
        rows, cols = self.target.rank(k), self.source.rank(k)
        if self.source.symbolic:
            return SymMatrix.zero(self.source.base, rows, cols)
        return DenseMatrix.zero(rows, cols, self.source.base)

    def check_symbolic(self) -> dict:
        """All squares commute, including twist components."""
        report = {"ok": True, "failures": []}
        degs = sorted(set(self.source.degrees()) | set(self.target.degrees()))
        lo, hi = degs[0], degs[-1]
        for a in range(lo, hi + 1):
            for c in range(a + 1, hi + 1):
                if not (self.source.rank(a) and self.target.rank(c)):
                    continue
                lhs = self.block(c).matmul(self.source.component(a, c))
                rhs = self.target.component(a, c).matmul(self.block(a))
                diff = lhs.add(rhs.scale(-1))
                bad = _first_nonzero(diff)
                if bad is not None:
                    report["ok"] = False
                    report["failures"].append((a, c, *bad[:2]))
        return report

    def check_at_point(self, assignment: dict, field=QQ) -> dict:
        """Evaluate both complexes and the blocks, check squares and invertibility."""
        src = self.source.evaluate_at(assignment, field)
        tgt = self.target.evaluate_at(assignment, field)
        report = {"ok": True, "failures": [], "invertible": {}}
        blocks = {}
        for k in set(src.degrees()) | set(tgt.degrees()):
            b = self.block(k)
            if isinstance(b, SymMatrix):
                idx = {kk if isinstance(kk, int) else self.source.base.idx(kk): Fraction(v) for kk, v in assignment.items()}
                b = b.evaluate(idx, field)
            blocks[k] = b
            if src.rank(k) == tgt.rank(k) and src.rank(k):
                report["invertible"][k] = b.rank() == src.rank(k)
        for k in sorted(blocks):
            if not (src.rank(k) and tgt.rank(k + 1)):
                continue
            lhs = blocks[k + 1].matmul(src.differential(k))
            rhs = tgt.differential(k).matmul(blocks[k])
            delta = lhs.add(rhs.scale(-1))
            if not delta.is_zero():
                report["ok"] = False
                report["failures"].append(k)
        report["all_invertible"] = all(report["invertible"].values()) if report["invertible"] else False
        return report
