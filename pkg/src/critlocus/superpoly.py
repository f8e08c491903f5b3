"""Free graded-commutative algebras on generators of degrees 0, -1, -2.

A generator carries a cohomological degree and (optionally) a de Rham form
degree; its sign parity is the total degree mod 2.  Odd generators
anticommute and square to zero, even generators are central.  Monomials are
kept in a normal form: even generators as a sorted exponent vector, odd
generators as a strictly increasing word, with the Koszul sign tracked when
products are reordered.

The canonical table of rank n carries the matrix-entry generators
X0(i,j), Y0(i,j), Z0(i,j) in degree 0, Xm1(i,j), Ym1(i,j), Zm1(i,j) in
degree -1 and T(i,j) in degree -2, in that global order with (i,j)
lexicographic inside each block.  ``extend_with_forms`` adjoins a symbol
d(g) for every generator g, with the same cohomological degree and form
degree 1, which is how 1- and 2-forms are represented.

Elements print to and parse from a plain text format, e.g.::

    3/2*X0(1,2)*Xm1(2,1) - T(1,1)^2

See README for the grammar.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Optional


class Generator:
    __slots__ = ("name", "cdeg", "fdeg", "index")

    def __init__(self, name: str, cdeg: int, fdeg: int = 0, index=None):
        self.name = name
        self.cdeg = cdeg
        self.fdeg = fdeg
        self.index = index  # optional (i, j) matrix position

    @property
    def parity(self) -> int:
        return (self.cdeg + self.fdeg) & 1

    def __repr__(self):
        return f"Generator({self.name}, cdeg={self.cdeg}, fdeg={self.fdeg})"


class GeneratorTable:
    """An ordered list of generators; order fixes all normal-form signs."""

    def __init__(self, gens: Iterable[Generator]):
        self.gens = list(gens)
        self.by_name = {}
        for k, g in enumerate(self.gens):
            if g.name in self.by_name:
                raise ValueError(f"duplicate generator name {g.name}")
            self.by_name[g.name] = k

    def __len__(self):
        return len(self.gens)

    def idx(self, name: str) -> int:
        return self.by_name[name]

    def gen(self, k: int) -> Generator:
        return self.gens[k]

    def parity(self, k: int) -> int:
        return self.gens[k].parity

    def cdeg(self, k: int) -> int:
        return self.gens[k].cdeg

    def fdeg(self, k: int) -> int:
        return self.gens[k].fdeg

    # -- canonical tables -------------------------------------------------

    MATRIX_BLOCKS = (("X0", 0), ("Y0", 0), ("Z0", 0), ("Xm1", -1), ("Ym1", -1), ("Zm1", -1), ("T", -2))

    @classmethod
    def canonical(cls, n: int) -> "GeneratorTable":
        """Rank-n table: 3n^2 degree-0, 3n^2 degree-(-1), n^2 degree-(-2) gens."""
        gens = []
        for name, deg in cls.MATRIX_BLOCKS:
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    gens.append(Generator(f"{name}({i},{j})", deg, 0, (i, j)))
        t = cls(gens)
        t.n = n
        return t

    def extend_with_forms(self) -> "GeneratorTable":
        """Adjoin a de Rham symbol d(g) of form degree 1 for every generator."""
        gens = [Generator(g.name, g.cdeg, g.fdeg, g.index) for g in self.gens]
        for g in self.gens:
            gens.append(Generator(f"d({g.name})", g.cdeg, g.fdeg + 1, g.index))
        ext = GeneratorTable(gens)
        ext.base_size = len(self.gens)
        if hasattr(self, "n"):
            ext.n = self.n
        return ext


# A monomial is (even, odd):
#   even: tuple of (gen index, exponent), sorted by index, exponents > 0
#   odd:  tuple of gen indices, strictly increasing
Monomial = tuple

ONE_MONOMIAL: Monomial = ((), ())


def _merge_odd(o1, o2):
    """Merge two increasing odd words; return (sign, merged) or (0, None)."""
    if not o1:
        return 1, o2
    if not o2:
        return 1, o1
    merged = []
    sign = 1
    i = j = 0
    n1, n2 = len(o1), len(o2)
    while i < n1 and j < n2:
        a, b = o1[i], o2[j]
        if a == b:
            return 0, None
        if a < b:
            merged.append(a)
            i += 1
        else:
            # b jumps over the remaining n1 - i letters of o1
            if (n1 - i) & 1:
                sign = -sign
            merged.append(b)
            j += 1
    merged.extend(o1[i:])
    merged.extend(o2[j:])
    return sign, tuple(merged)


def _merge_even(e1, e2):
    if not e1:
        return e2
    if not e2:
        return e1
    d = dict(e1)
    for k, e in e2:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


class SuperPoly:
    """Element of the free graded-commutative algebra on a generator table."""

    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms: Optional[dict] = None):
        self.table = table
        self.terms = {}
        if terms:
            for m, c in terms.items():
                if c != 0:
                    self.terms[m] = self.terms.get(m, Fraction(0)) + Fraction(c)
            self.terms = {m: c for m, c in self.terms.items() if c != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, table) -> "SuperPoly":
        return cls(table)

    @classmethod
    def scalar(cls, table, c) -> "SuperPoly":
        c = Fraction(c)
        return cls(table, {ONE_MONOMIAL: c} if c else {})

    @classmethod
    def one(cls, table) -> "SuperPoly":
        return cls.scalar(table, 1)

    @classmethod
    def gen(cls, table, name_or_idx) -> "SuperPoly":
        k = name_or_idx if isinstance(name_or_idx, int) else table.idx(name_or_idx)
        if table.parity(k):
            m = ((), (k,))
        else:
            m = (((k, 1),), ())
        return cls(table, {m: Fraction(1)})

    # -- ring structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, SuperPoly):
            return NotImplemented
        return self.table is other.table and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        self._same_table(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            nc = terms.get(m, Fraction(0)) + c
            if nc:
                terms[m] = nc
            elif m in terms:
                del terms[m]
        out = SuperPoly(self.table)
        out.terms = terms
        return out

    def __neg__(self):
        out = SuperPoly(self.table)
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._same_table(other)
        terms = {}
        for (e1, o1), c1 in self.terms.items():
            for (e2, o2), c2 in other.terms.items():
                sign, odd = _merge_odd(o1, o2)
                if sign == 0:
                    continue
                m = (_merge_even(e1, e2), odd)
                c = sign * c1 * c2
                nc = terms.get(m, Fraction(0)) + c
                if nc:
                    terms[m] = nc
                elif m in terms:
                    del terms[m]
        out = SuperPoly(self.table)
        out.terms = terms
        return out

    __rmul__ = __mul__

    def scale(self, c) -> "SuperPoly":
        c = Fraction(c)
        out = SuperPoly(self.table)
        if c:
            out.terms = {m: c * x for m, x in self.terms.items()}
        return out

    def _same_table(self, other):
        if self.table is not other.table:
            raise ValueError("operands built over different generator tables")

    # -- grading -----------------------------------------------------------

    def monomial_cdeg(self, m: Monomial) -> int:
        t = self.table
        e, o = m
        return sum(t.cdeg(k) * x for k, x in e) + sum(t.cdeg(k) for k in o)

    def monomial_fdeg(self, m: Monomial) -> int:
        t = self.table
        e, o = m
        return sum(t.fdeg(k) * x for k, x in e) + sum(t.fdeg(k) for k in o)

    def cdeg(self) -> Optional[int]:
        """Cohomological degree if homogeneous, else raises."""
        degs = {self.monomial_cdeg(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous element, degrees {sorted(degs)}")
        return degs.pop()

    def fdeg(self) -> Optional[int]:
        degs = {self.monomial_fdeg(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous form degree {sorted(degs)}")
        return degs.pop()

    def form_component(self, q: int) -> "SuperPoly":
        out = SuperPoly(self.table)
        out.terms = {m: c for m, c in self.terms.items() if self.monomial_fdeg(m) == q}
        return out

    # -- evaluation and coefficient extraction -----------------------------

    def evaluate(self, assignment: dict) -> Fraction:
        """Evaluate with degree-0 generators set from ``assignment`` (by index)
        and every other generator set to 0."""
        t = self.table
        total = Fraction(0)
        for (e, o), c in self.terms.items():
            if o:
                continue
            val = c
            dead = False
            for k, exp in e:
                if t.cdeg(k) == 0 and t.fdeg(k) == 0:
                    v = assignment.get(k)
                    if v is None:
                        raise KeyError(f"no value assigned to generator {t.gen(k).name}")
                    if v == 0:
                        dead = True
                        break
                    val *= Fraction(v) ** exp
                else:
                    dead = True
                    break
            if not dead:
                total += val
        return total

    def coefficient_of_gen(self, k: int) -> "SuperPoly":
        """For an element linear in generator k, the coefficient c with the
        k-terms equal to c * k (k moved to the right)."""
        t = self.table
        out = SuperPoly(t)
        par = t.parity(k)
        for (e, o), c in self.terms.items():
            if par:
                if k not in o:
                    continue
                pos = o.index(k)
                rest = o[:pos] + o[pos + 1 :]
                # move k to the rightmost position past the trailing letters
                sign = -1 if (len(o) - 1 - pos) & 1 else 1
                out += SuperPoly(t, {(e, rest): sign * c})
            else:
                d = dict(e)
                if k not in d:
                    continue
                if d[k] > 1:
                    raise ValueError("not linear in generator")
                del d[k]
                out += SuperPoly(t, {(tuple(sorted(d.items())), o): c})
        return out

    def max_word_length(self) -> int:
        return max(
            (sum(x for _, x in e) + len(o) for (e, o) in self.terms),
            default=0,
        )

    # -- printing / parsing -------------------------------------------------

    def __repr__(self):
        return f"SuperPoly({self})"

    def __str__(self):
        return poly_to_text(self)


def _monomial_sort_key(table, m):
    e, o = m
    flat = []
    for k, exp in e:
        flat.extend([k] * exp)
    flat.extend(o)
    return (len(flat), tuple(flat))


def poly_to_text(p: SuperPoly) -> str:
    if not p.terms:
        return "0"
    t = p.table
    parts = []
    for m in sorted(p.terms, key=lambda m: _monomial_sort_key(t, m)):
        c = p.terms[m]
        e, o = m
        factors = []
        for k, exp in e:
            nm = t.gen(k).name
            factors.append(nm if exp == 1 else f"{nm}^{exp}")
        for k in o:
            factors.append(t.gen(k).name)
        if not factors:
            body = str(abs(c))
        elif abs(c) == 1:
            body = "*".join(factors)
        else:
            body = f"{abs(c)}*" + "*".join(factors)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>d\([A-Za-z]+[0-9a-z]*\(\d+,\d+\)\)|[A-Za-z]+[0-9a-z]*\(\d+,\d+\))|(?P<op>[\^*+-]))"
)


def poly_from_text(table: GeneratorTable, text: str) -> SuperPoly:
    """Parse the textual polynomial format back into a SuperPoly."""
    tokens = []
    pos = 0
    text = text.strip()
    if text == "0":
        return SuperPoly.zero(table)
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ValueError(f"bad token at: {text[pos:pos + 20]!r}")
        pos = m.end()
        if m.group("num"):
            tokens.append(("num", Fraction(m.group("num"))))
        elif m.group("name"):
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
    result = SuperPoly.zero(table)
    i = 0
    n = len(tokens)
    while i < n:
        sign = 1
        while i < n and tokens[i][0] == "op" and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        term = SuperPoly.scalar(table, sign)
        expect_factor = True
        while i < n:
            kind, val = tokens[i]
            if kind == "op" and val == "*":
                i += 1
                expect_factor = True
                continue
            if not expect_factor:
                break
            if kind == "num":
                term = term.scale(val)
                i += 1
            elif kind == "name":
                f = SuperPoly.gen(table, val)
                i += 1
                if i + 1 < n and tokens[i] == ("op", "^") and tokens[i + 1][0] == "num":
                    exp = int(tokens[i + 1][1])
                    i += 2
                    g = SuperPoly.one(table)
                    for _ in range(exp):
                        g = g * f
                    f = g
                term = term * f
            else:
                break
            expect_factor = False
        result = result + term
    return result


class Derivation:
    """A graded derivation of fixed parity, given by its values on generators.

    ``apply`` extends the generator assignment by the graded Leibniz rule
    d(ab) = (da)b + (-1)^(p(d) p(a)) a (db).
    """

    def __init__(self, table: GeneratorTable, images: dict, parity: int, cdeg_shift: Optional[int] = None):
        self.table = table
        self.images = {}
        for k, v in images.items():
            idx = k if isinstance(k, int) else table.idx(k)
            self.images[idx] = v
        self.parity = parity & 1
        self.cdeg_shift = cdeg_shift

    def image_of(self, k: int) -> SuperPoly:
        img = self.images.get(k)
        if img is None:
            return SuperPoly.zero(self.table)
        return img

    def check_degrees(self):
        """Each image must be homogeneous of degree gen degree + shift."""
        if self.cdeg_shift is None:
            return
        t = self.table
        for k, img in self.images.items():
            if img.is_zero():
                continue
            want = t.cdeg(k) + self.cdeg_shift
            got = img.cdeg()
            if got != want:
                raise ValueError(
                    f"image of {t.gen(k).name} has degree {got}, expected {want}"
                )

    def apply(self, p: SuperPoly) -> SuperPoly:
        t = self.table
        out = SuperPoly.zero(t)
        pd = self.parity
        for (e, o), c in p.terms.items():
            # even factors first (their parity is 0, no Leibniz sign)
            for pos, (k, exp) in enumerate(e):
                img = self.images.get(k)
                if img is None or img.is_zero():
                    continue
                rest_e = list(e)
                if exp == 1:
                    del rest_e[pos]
                else:
                    rest_e[pos] = (k, exp - 1)
                prefix = SuperPoly(t, {(tuple(rest_e), ()): c * exp})
                odd_tail = SuperPoly(t, {((), o): Fraction(1)})
                out += prefix * img * odd_tail
            # odd factors, walking left to right
            for j, k in enumerate(o):
                img = self.images.get(k)
                if img is None or img.is_zero():
                    continue
                sign = -1 if (pd and (j & 1)) else 1
                left = SuperPoly(t, {(e, o[:j]): c * sign})
                right = SuperPoly(t, {((), o[j + 1 :]): Fraction(1)})
                out += left * img * right
        return out
