"""Dense exact linear algebra: rank, kernel bases, solving, row reduction.

Matrices are stored row-major over a field from :mod:`critlocus.scalars`.
Over QQ the rank computation clears denominators row by row and runs
fraction-free (Bareiss) elimination on integers, which keeps intermediate
entries polynomial-size instead of letting rational gcd work blow up.  Over
a prime field plain Gaussian elimination is used.

Kernel bases and solving go through a reduced row echelon form; at the desk
scales used here (blocks up to ~64 columns) a single normalization pass after
echelon reduction is cheap.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional

from .scalars import QQ, RationalField


class DenseMatrix:
    """A rows x cols matrix over an exact field."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field, rows: int, cols: int, data):
        if len(data) != rows:
            raise ValueError("row count mismatch")
        for row in data:
            if len(row) != cols:
                raise ValueError("column count mismatch")
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = [list(row) for row in data]

    @classmethod
    def from_rows(cls, rows, field=QQ) -> "DenseMatrix":
        data = [[field.of(x) for x in row] for row in rows]
        r = len(data)
        c = len(data[0]) if data else 0
        return cls(field, r, c, data)

    @classmethod
    def zero(cls, rows: int, cols: int, field=QQ) -> "DenseMatrix":
        z = field.zero
        return cls(field, rows, cols, [[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int, field=QQ) -> "DenseMatrix":
        m = cls.zero(n, n, field)
        for i in range(n):
            m.data[i][i] = field.one
        return m

    def copy(self) -> "DenseMatrix":
        return DenseMatrix(self.field, self.rows, self.cols, self.data)

    def __eq__(self, other):
        return (
            isinstance(other, DenseMatrix)
            and self.field == other.field
            and self.data == other.data
        )

    def __repr__(self):
        return f"DenseMatrix({self.rows}x{self.cols} over {self.field})"

    def entry(self, i: int, j: int):
        return self.data[i][j]

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix(
            self.field,
            self.cols,
            self.rows,
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def matmul(self, other: "DenseMatrix") -> "DenseMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matmul")
        f = self.field
        out = DenseMatrix.zero(self.rows, other.cols, f)
        for i in range(self.rows):
            arow = self.data[i]
            orow = out.data[i]
            for k in range(self.cols):
                a = arow[k]
                if f.is_zero(a):
                    continue
                brow = other.data[k]
                for j in range(other.cols):
                    orow[j] = f.add(orow[j], f.mul(a, brow[j]))
        return out

    def add(self, other: "DenseMatrix") -> "DenseMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in add")
        f = self.field
        return DenseMatrix(
            self.field,
            self.rows,
            self.cols,
            [
                [f.add(self.data[i][j], other.data[i][j]) for j in range(self.cols)]
                for i in range(self.rows)
            ],
        )

    def scale(self, c) -> "DenseMatrix":
        f = self.field
        c = f.of(c)
        return DenseMatrix(
            self.field,
            self.rows,
            self.cols,
            [[f.mul(c, x) for x in row] for row in self.data],
        )

    def apply_vector(self, v):
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        f = self.field
        out = []
        for i in range(self.rows):
            acc = f.zero
            row = self.data[i]
            for j in range(self.cols):
                acc = f.add(acc, f.mul(row[j], v[j]))
            out.append(acc)
        return out

    def is_zero(self) -> bool:
        f = self.field
        return all(f.is_zero(x) for row in self.data for x in row)

    def rank(self) -> int:
        if isinstance(self.field, RationalField):
            return _rank_bareiss(self.data, self.rows, self.cols)
        return _rank_modp(self.data, self.rows, self.cols, self.field.p)


def _integer_rows(data, rows, cols):
    """Scale each row by the lcm of denominators; rank is unchanged."""
    out = []
    for i in range(rows):
        den = 1
        for x in data[i]:
            fx = Fraction(x)
            den = den // gcd(den, fx.denominator) * fx.denominator
        out.append([int(Fraction(x) * den) for x in data[i]])
    return out


def _rank_bareiss(data, rows, cols) -> int:
    """Fraction-free (Bareiss) elimination rank over the integers."""
    a = _integer_rows(data, rows, cols)
    rank = 0
    prev = 1
    row = 0
    for col in range(cols):
        piv = None
        for r in range(row, rows):
            if a[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        p = a[row][col]
        for r in range(row + 1, rows):
            arc = a[r][col]
            ar = a[r]
            arow = a[row]
            for c in range(col, cols):
                ar[c] = (p * ar[c] - arc * arow[c]) // prev
        prev = p
        row += 1
        rank += 1
        if row == rows:
            break
    return rank


def _rank_modp(data, rows, cols, p) -> int:
    a = [[x % p for x in row] for row in data]
    rank = 0
    row = 0
    for col in range(cols):
        piv = None
        for r in range(row, rows):
            if a[r][col]:
                piv = r
                break
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = pow(a[row][col], -1, p)
        a[row] = [x * inv % p for x in a[row]]
        for r in range(rows):
            if r != row and a[r][col]:
                c0 = a[r][col]
                a[r] = [(x - c0 * y) % p for x, y in zip(a[r], a[row])]
        row += 1
        rank += 1
        if row == rows:
            break
    return rank


def rref(m: DenseMatrix):
    """Reduced row echelon form.  Returns (new matrix, pivot column list)."""
    f = m.field
    a = [row[:] for row in m.data]
    rows, cols = m.rows, m.cols
    pivots = []
    row = 0
    for col in range(cols):
        piv = None
        for r in range(row, rows):
            if not f.is_zero(a[r][col]):
                piv = r
                break
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = f.inv(a[row][col])
        a[row] = [f.mul(inv, x) for x in a[row]]
        for r in range(rows):
            if r != row and not f.is_zero(a[r][col]):
                c0 = a[r][col]
                a[r] = [f.sub(x, f.mul(c0, y)) for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
        if row == rows:
            break
    return DenseMatrix(f, rows, cols, a), pivots


def kernel_basis(m: DenseMatrix):
    """Basis of the right kernel, as a list of column vectors.

    The returned vectors are linearly independent, each is annihilated by m,
    and there are exactly cols - rank(m) of them.
    """
    f = m.field
    red, pivots = rref(m)
    pivot_set = set(pivots)
    free_cols = [j for j in range(m.cols) if j not in pivot_set]
    basis = []
    for j in free_cols:
        v = [f.zero] * m.cols
        v[j] = f.one
        for r, pc in enumerate(pivots):
            v[pc] = f.neg(red.data[r][j])
        basis.append(v)
    return basis


def solve(m: DenseMatrix, b) -> Optional[list]:
    """One exact solution of m x = b, or None if the system is inconsistent."""
    if len(b) != m.rows:
        raise ValueError("right-hand side length mismatch")
    f = m.field
    aug = DenseMatrix(
        f, m.rows, m.cols + 1, [m.data[i] + [f.of(b[i])] for i in range(m.rows)]
    )
    red, pivots = rref(aug)
    if m.cols in pivots:
        return None
    x = [f.zero] * m.cols
    for r, pc in enumerate(pivots):
        x[pc] = red.data[r][m.cols]
    return x


def row_space_basis(m: DenseMatrix):
    red, pivots = rref(m)
    return [red.data[r][:] for r in range(len(pivots))]
