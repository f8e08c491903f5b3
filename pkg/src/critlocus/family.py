"""The universal family, its endomorphism complex, and the comparison map.

The rank-n family is the free module on V = k^n over the Koszul cdga,
with the free dga letters acting through n x n matrices over the cdga:
x, y, z act by the degree-0 symbol matrices, and the actions of u, v, w, t
are pinned by the graded Leibniz rule.  The letter images are searched over
the natural index variants (symbol matrix, its transpose, and for t the two
diagonal readings); requiring Leibniz leaves exactly one variant of each.

``EndomorphismModel`` packages RHom(F, F) as a twisted complex: the free
module End(V) (x) Lambda(e_x, e_y, e_z) placed in degrees 0..3, with
differential the graded commutator against the superconnection

    A = X0 (x) e_x + Y0 (x) e_y + Z0 (x) e_z
        - Mu (x) e_y e_z - Mv (x) e_z e_x - Mw (x) e_x e_y
        - Mt (x) e_x e_y e_z,

whose flatness dA + A^2 = 0 is equivalent to the Leibniz identities.  The
adjacent blocks are the maps induced by the length-3 bimodule resolution of
k[x,y,z] (left-minus-right multiplication patterns); the jump components
carry the homotopies and vanish at every classical point.

``TangentModel`` is the shifted dual of the cotangent model, placed in
degrees 0..3, and ``build_comparison_map`` finds the signed permutation
identifying it with the endomorphism model, block by block.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

from .complexes import ChainMap, FreeComplex, SymMatrix, homology_representatives
from .freenc import DIFFERENTIAL_ON_LETTERS, NCElement
from .linalg import DenseMatrix
from .potential import CotangentModel, MatrixCdga, mat_transpose
from .scalars import QQ
from .superpoly import SuperPoly

LETTER_NAMES = ("x", "y", "z", "u", "v", "w", "t")
EPS_BITS = {"x": 1, "y": 2, "z": 4}
FULL_MASK = 7
# degree-2 slots ordered as the complements of x, y, z
MASKS_BY_DEGREE = {0: (0,), 1: (1, 2, 4), 2: (6, 5, 3), 3: (7,)}


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def eps_merge_sign(m1: int, m2: int) -> int:
    """Sign of e_{m1} ^ e_{m2} against the canonical order, 0 if they meet."""
    if m1 & m2:
        return 0
    sign = 1
    for b2 in range(3):
        if not m2 >> b2 & 1:
            continue
        higher = sum(1 for b1 in range(b2 + 1, 3) if m1 >> b1 & 1)
        if higher & 1:
            sign = -sign
    return sign


# -- the module structure -----------------------------------------------------------


class DModuleAction:
    """Action matrices of the dga letters on the rank-n family.

    ``matrices[g]`` is the n x n matrix over the cdga with
    g . (1 (x) e_i) = sum_j M(j, i) (x) e_j.
    """

    def __init__(self, cdga: MatrixCdga, matrices: dict, provenance: dict):
        self.cdga = cdga
        self.n = cdga.n
        self.matrices = matrices
        self.provenance = provenance

    def act_word(self, word):
        """Matrix of a word of letters (product in word order)."""
        n = self.n
        t = self.cdga.table
        out = None
        for letter in word:
            m = self.matrices[letter]
            out = m if out is None else _mat_mul(out, m)
        if out is None:
            one = SuperPoly.one(t)
            zero = SuperPoly.zero(t)
            out = [[one if i == j else zero for j in range(n)] for i in range(n)]
        return out

    def act(self, element: NCElement):
        n = self.n
        t = self.cdga.table
        zero = SuperPoly.zero(t)
        acc = [[zero for _ in range(n)] for _ in range(n)]
        for word, c in element.terms.items():
            m = self.act_word(word)
            for i in range(n):
                for j in range(n):
                    acc[i][j] += m[i][j].scale(c)
        return acc

    def leibniz_defect(self, letter: str):
        """d(M_g) - M_(dg), zero iff the Leibniz rule holds for g."""
        d = self.cdga.differential
        lhs = [[d.apply(p) for p in row] for row in self.matrices[letter]]
        rhs = self.act(DIFFERENTIAL_ON_LETTERS[letter])
        return _mat_sub(lhs, rhs)

    def leibniz_report(self) -> dict:
        out = {}
        for g in LETTER_NAMES:
            out[g] = all(p.is_zero() for row in self.leibniz_defect(g) for p in row)
        out["ok"] = all(out[g] for g in LETTER_NAMES)
        return out


def _mat_mul(a, b):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for k in range(n):
                term = a[i][k] * b[k][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def _mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _mat_eq(a, b):
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def build_universal_family(n: int, cdga: MatrixCdga = None) -> DModuleAction:
    """Resolve the letter actions by the Leibniz search.

    x, y, z always act by the degree-0 symbol matrices.  For each of
    u, v, w the candidates are the odd symbol matrix and its transpose; for
    t they are the T symbol matrix, its transpose, and the two diagonal
    readings of the summed formula.  Exactly one candidate (up to equal
    matrices) may survive; anything else raises.
    """
    cdga = cdga or MatrixCdga(n)
    t = cdga.table
    d = cdga.differential
    matrices = {
        "x": cdga.x0,
        "y": cdga.y0,
        "z": cdga.z0,
    }
    provenance = {"x": "symbol", "y": "symbol", "z": "symbol"}

    def d_matrix(m):
        return [[d.apply(p) for p in row] for row in m]

    partial = DModuleAction(cdga, dict(matrices), {})

    def resolve(letter, candidates):
        target = partial.act(DIFFERENTIAL_ON_LETTERS[letter])
        winners = []
        for tag, cand in candidates:
            if _mat_eq(d_matrix(cand), target):
                if not any(_mat_eq(cand, w[1]) for w in winners):
                    winners.append((tag, cand))
        if len(winners) != 1:
            raise ValueError(
                f"Leibniz search for {letter!r} found {len(winners)} inequivalent "
                f"candidates: {[w[0] for w in winners]}"
            )
        return winners[0]

    for letter, sym in (("u", cdga.xm1), ("v", cdga.ym1), ("w", cdga.zm1)):
        tag, m = resolve(
            letter, [("symbol", sym), ("transposed symbol", mat_transpose(sym))]
        )
        matrices[letter] = m
        provenance[letter] = tag
        partial = DModuleAction(cdga, dict(matrices), {})

    zero = SuperPoly.zero(t)
    diag_rows = [
        [sum((cdga.tgen[i][j] for j in range(n)), zero) if i == k else zero for k in range(n)]
        for i in range(n)
    ]
    diag_cols = [
        [sum((cdga.tgen[j][i] for j in range(n)), zero) if i == k else zero for k in range(n)]
        for i in range(n)
    ]
    tag, m = resolve(
        "t",
        [
            ("symbol", cdga.tgen),
            ("transposed symbol", mat_transpose(cdga.tgen)),
            ("row-summed diagonal", diag_rows),
            ("column-summed diagonal", diag_cols),
        ],
    )
    matrices["t"] = m
    provenance["t"] = tag
    return DModuleAction(cdga, matrices, provenance)


# -- the bimodule resolution of k[x,y,z] ----------------------------------------------


class BimodElement:
    """Element of C (x) S (x) C for C = k[x,y,z] and a slot alphabet S.

    Terms are (left word, slot, right word) with words kept as written;
    ``normalize`` rewrites each word to sorted order (the commutation
    relations xy = yx, yz = zy, zx = xz) and merges, so cancellation after
    rewriting is literal dictionary cancellation.
    """

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for k, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[k] = self.terms.get(k, Fraction(0)) + c
            self.terms = {k: c for k, c in self.terms.items() if c}

    @classmethod
    def term(cls, left, slot, right, coeff=1):
        return cls({(tuple(left), slot, tuple(right)): coeff})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            nc = out.get(k, Fraction(0)) + c
            if nc:
                out[k] = nc
            elif k in out:
                del out[k]
        r = BimodElement()
        r.terms = out
        return r

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        r = BimodElement()
        c = Fraction(c)
        if c:
            r.terms = {k: c * x for k, x in self.terms.items()}
        return r

    def lmul(self, word):
        r = BimodElement()
        r.terms = {(tuple(word) + l, s, rt): c for (l, s, rt), c in self.terms.items()}
        return r

    def rmul(self, word):
        r = BimodElement()
        r.terms = {(l, s, rt + tuple(word)): c for (l, s, rt), c in self.terms.items()}
        return r

    def normalize(self) -> "BimodElement":
        out = {}
        for (l, s, rt), c in self.terms.items():
            k = (tuple(sorted(l)), s, tuple(sorted(rt)))
            nc = out.get(k, Fraction(0)) + c
            if nc:
                out[k] = nc
            elif k in out:
                del out[k]
        r = BimodElement()
        r.terms = out
        return r

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, BimodElement) and self.terms == other.terms


CYCLIC_NEXT = {"x": ("y", "z"), "y": ("z", "x"), "z": ("x", "y")}


class GinzburgResolution:
    """The length-3 self-dual bimodule resolution of C = k[x,y,z].

    Slots: None for C (x) C, a letter for C (x) E (x) C, a starred letter
    for C (x) E* (x) C.
    """

    def alpha0(self, elem: BimodElement) -> BimodElement:
        out = BimodElement()
        for (l, s, rt), c in elem.terms.items():
            if s is None or s.endswith("*"):
                raise ValueError("alpha0 expects E-slot elements")
            out += BimodElement.term(l + (s,), None, rt, c)
            out -= BimodElement.term(l, None, (s,) + rt, c)
        return out

    def alpha_m1(self, elem: BimodElement) -> BimodElement:
        out = BimodElement()
        for (l, s, rt), c in elem.terms.items():
            if s is None or not s.endswith("*"):
                raise ValueError("alpha_m1 expects E*-slot elements")
            a = s[0]
            b, d = CYCLIC_NEXT[a]
            img = (
                BimodElement.term((b,), d, ())
                + BimodElement.term((), b, (d,))
                - BimodElement.term((d,), b, ())
                - BimodElement.term((), d, (b,))
            )
            out += img.lmul(l).rmul(rt).scale(c)
        return out

    def alpha_m2(self, elem: BimodElement) -> BimodElement:
        out = BimodElement()
        for (l, s, rt), c in elem.terms.items():
            if s is not None:
                raise ValueError("alpha_m2 expects C (x) C elements")
            img = BimodElement()
            for a in ("x", "y", "z"):
                img += BimodElement.term((), a + "*", (a,))
                img -= BimodElement.term((a,), a + "*", ())
            out += img.lmul(l).rmul(rt).scale(c)
        return out

    def multiply_out(self, elem: BimodElement) -> BimodElement:
        """The augmentation C (x) C -> C, as sorted words with empty slot."""
        out = BimodElement()
        for (l, s, rt), c in elem.terms.items():
            if s is not None:
                raise ValueError("augmentation expects C (x) C elements")
            out += BimodElement.term(tuple(sorted(l + rt)), None, (), c)
        return out

    def composites_vanish(self) -> dict:
        report = {}
        for a in ("x", "y", "z"):
            img = self.alpha0(self.alpha_m1(BimodElement.term((), a + "*", ())))
            report[f"alpha0.alpha_m1 on {a}*"] = img.normalize().is_zero()
        img = self.alpha_m1(self.alpha_m2(BimodElement.term((), None, ())))
        report["alpha_m1.alpha_m2"] = img.normalize().is_zero()
        for a in ("x", "y", "z"):
            img = self.multiply_out(self.alpha0(BimodElement.term((), a, ())))
            report[f"augmentation.alpha0 on {a}"] = img.normalize().is_zero()
        report["ok"] = all(v for k, v in report.items() if k != "ok")
        return report


def build_ginzburg_resolution() -> GinzburgResolution:
    return GinzburgResolution()


# -- the endomorphism complex ---------------------------------------------------------


class EndomorphismModel:
    """RHom(F, F) as a twisted complex in degrees 0..3.

    Basis at degree q: pairs ((i,j), mask) with popcount(mask) = q, masks
    ordered as in MASKS_BY_DEGREE and (i,j) row-major inside each mask
    block.  The differential is [A, -] for the superconnection A; the
    coefficient differential of the base cdga completes it to a flat
    twisted complex.
    """

    def __init__(self, action: DModuleAction):
        self.action = action
        self.cdga = action.cdga
        self.n = action.n
        nn = self.n * self.n
        self.ranks = {0: nn, 1: 3 * nn, 2: 3 * nn, 3: nn}
        self.terms = self._superconnection_terms()
        self.complex = self._build()

    def _superconnection_terms(self):
        # the homotopy letters enter with minus signs; v flips once more
        # because e_z e_x is written against the canonical order
        m = self.action.matrices
        return [
            (m["x"], EPS_BITS["x"], 1),
            (m["y"], EPS_BITS["y"], 1),
            (m["z"], EPS_BITS["z"], 1),
            (m["u"], EPS_BITS["y"] | EPS_BITS["z"], -1),
            (m["v"], EPS_BITS["z"] | EPS_BITS["x"], 1),
            (m["w"], EPS_BITS["x"] | EPS_BITS["y"], -1),
            (m["t"], FULL_MASK, -1),
        ]

    def slot(self, i: int, j: int, mask: int) -> int:
        q = popcount(mask)
        block = MASKS_BY_DEGREE[q].index(mask)
        return block * self.n * self.n + i * self.n + j

    def _parity_of_term(self, term_matrix) -> int:
        for row in term_matrix:
            for p in row:
                if not p.is_zero():
                    return p.cdeg() & 1
        return 0

    def commutator_with_connection(self, k: int, l: int, mask: int):
        """[A, E_kl (x) e_mask] as {(i, j, mask'): SuperPoly}."""
        n = self.n
        out = {}
        s_par = popcount(mask) & 1

        def add(i, j, m, poly):
            if poly.is_zero():
                return
            key = (i, j, m)
            cur = out.get(key)
            out[key] = poly if cur is None else cur + poly
            if out[key].is_zero():
                del out[key]

        for matrix, amask, sgn in self.terms:
            p_m = self._parity_of_term(matrix)
            left_sign = eps_merge_sign(amask, mask)
            if left_sign:
                for m_row in range(n):
                    poly = matrix[m_row][k]
                    add(m_row, l, amask | mask, poly.scale(sgn * left_sign))
            right_sign = eps_merge_sign(mask, amask)
            if right_sign:
                # right term of [A, b] = A b - (-1)^{|b|} b A with |b| = s_par,
                # and e_S moves past the entries of M at cost (-1)^(s_par p_m)
                total = right_sign * (1 if s_par else -1)
                if s_par and p_m:
                    total = -total
                for m_col in range(n):
                    poly = matrix[l][m_col]
                    add(k, m_col, mask | amask, poly.scale(sgn * total))
        return out

    def _build(self) -> FreeComplex:
        n, t = self.n, self.cdga.table
        nn = n * n
        blocks = {}

        def block(qsrc, qtgt):
            key = (qsrc, qtgt)
            if key not in blocks:
                blocks[key] = SymMatrix(t, self.ranks[qtgt], self.ranks[qsrc])
            return blocks[key]

        for q in range(4):
            for mask in MASKS_BY_DEGREE[q]:
                for k in range(n):
                    for l in range(n):
                        col = self.slot(k, l, mask)
                        img = self.commutator_with_connection(k, l, mask)
                        for (i, j, m2), poly in img.items():
                            q2 = popcount(m2)
                            block(q, q2).set(self.slot(i, j, m2), col, poly)
        diff = {q: blocks[(q, q + 1)] for q in range(3) if (q, q + 1) in blocks}
        twist = {
            (q, r): m for (q, r), m in blocks.items() if r >= q + 2
        }
        return FreeComplex(t, self.ranks, diff, twist)

    # -- flatness of the superconnection ------------------------------------------

    def connection_flatness_defect(self):
        """dA + A^2 in the algebra End(V) (x) cdga (x) Lambda."""
        n = self.n
        t = self.cdga.table
        d = self.cdga.differential
        acc = {}

        def add(key, poly):
            if poly.is_zero():
                return
            cur = acc.get(key)
            acc[key] = poly if cur is None else cur + poly
            if acc[key].is_zero():
                del acc[key]

        for matrix, amask, sgn in self.terms:
            for i in range(n):
                for j in range(n):
                    add((i, j, amask), d.apply(matrix[i][j]).scale(sgn))
        parities = [self._parity_of_term(m) for m, _, _ in self.terms]
        for m1, a1, s1 in self.terms:
            for (m2, a2, s2), p2 in zip(self.terms, parities):
                merge = eps_merge_sign(a1, a2)
                if not merge:
                    continue
                sign = s1 * s2 * merge
                if (popcount(a1) & 1) and p2:
                    sign = -sign
                for i in range(n):
                    for k in range(n):
                        if m1[i][k].is_zero():
                            continue
                        for j in range(n):
                            add((i, j, a1 | a2), (m1[i][k] * m2[k][j]).scale(sign))
        return acc

    def flatness_report(self):
        defect = self.connection_flatness_defect()
        ok, failures = self.complex.check_flatness(self.cdga.differential)
        return {
            "connection_flat": not defect,
            "complex_flat": ok,
            "ok": not defect and ok,
            "failures": failures[:5],
        }

    # -- evaluation ----------------------------------------------------------------

    def evaluate_at(self, X, Y, Z, field=None) -> FreeComplex:
        assignment = self.cdga.point_assignment(X, Y, Z)
        return self.complex.evaluate_at(assignment, field or QQ)


_ENDO_CACHE = {}


def endomorphism_model(n: int) -> EndomorphismModel:
    if n not in _ENDO_CACHE:
        _ENDO_CACHE[n] = EndomorphismModel(build_universal_family(n))
    return _ENDO_CACHE[n]


def endo_complex_at_point(X, Y, Z, field=QQ) -> FreeComplex:
    """Numeric twisted-End complex assembled directly from a point.

    Independent assembly path used to confirm that evaluation commutes
    with construction: only the adjacent blocks survive at a point, and
    they are the graded commutators with the evaluated matrices.
    """
    n = len(X)
    nn = n * n
    ranks = {0: nn, 1: 3 * nn, 2: 3 * nn, 3: nn}
    mats = {
        EPS_BITS["x"]: X,
        EPS_BITS["y"]: Y,
        EPS_BITS["z"]: Z,
    }

    def slot(i, j, mask):
        q = popcount(mask)
        return MASKS_BY_DEGREE[q].index(mask) * nn + i * n + j

    diff = {}
    for q in range(3):
        m = DenseMatrix.zero(ranks[q + 1], ranks[q], field)
        for mask in MASKS_BY_DEGREE[q]:
            for k in range(n):
                for l in range(n):
                    col = slot(k, l, mask)
                    for amask, mat in mats.items():
                        ls = eps_merge_sign(amask, mask)
                        rs = eps_merge_sign(mask, amask)
                        if ls:
                            for r in range(n):
                                val = field.of(Fraction(mat[r][k]))
                                if not field.is_zero(val):
                                    row = slot(r, l, amask | mask)
                                    m.data[row][col] = field.add(
                                        m.data[row][col], field.mul(field.of(ls), val)
                                    )
                        if rs:
                            tot = rs * (1 if (q & 1) else -1)
                            for c2 in range(n):
                                val = field.of(Fraction(mat[l][c2]))
                                if not field.is_zero(val):
                                    row = slot(k, c2, mask | amask)
                                    m.data[row][col] = field.add(
                                        m.data[row][col], field.mul(field.of(tot), val)
                                    )
        diff[q] = m
    return FreeComplex(field, ranks, diff)


# -- the trace pairing --------------------------------------------------------------


def trace_pairing_matrix(model_n: int, reps_k, reps_comp, field=QQ) -> DenseMatrix:
    """Pairing <a, b> = sum over complementary slots of the matrix trace
    weighted by the orientation of e_S ^ e_S'."""
    n = model_n
    nn = n * n

    def decode(idx, q):
        block, rem = divmod(idx, nn)
        i, j = divmod(rem, n)
        return i, j, MASKS_BY_DEGREE[q][block]

    rows = len(reps_k)
    cols = len(reps_comp)
    out = DenseMatrix.zero(rows, cols, field)
    if not rows or not cols:
        return out
    # recover the degrees from the representative lengths
    for (qa, qb) in ((0, 3), (1, 2), (2, 1), (3, 0)):
        if len(reps_k[0]) == nn * len(MASKS_BY_DEGREE[qa]) and len(
            reps_comp[0]
        ) == nn * len(MASKS_BY_DEGREE[qb]):
            qk, qc = qa, qb
            break
    else:
        raise ValueError("representative lengths do not match any degree pair")

    for a, va in enumerate(reps_k):
        for b, vb in enumerate(reps_comp):
            acc = field.zero
            for ia, xa in enumerate(va):
                if field.is_zero(xa):
                    continue
                i, j, mask_a = decode(ia, qk)
                for ib, xb in enumerate(vb):
                    if field.is_zero(xb):
                        continue
                    p, q2, mask_b = decode(ib, qc)
                    if (mask_a | mask_b) != FULL_MASK or (mask_a & mask_b):
                        continue
                    if j != p or q2 != i:
                        continue
                    sgn = eps_merge_sign(mask_a, mask_b)
                    acc = field.add(acc, field.mul(field.of(sgn), field.mul(xa, xb)))
            out.data[a][b] = acc
    return out


def ext_dims_at(point, n: int = None, field=QQ, model: EndomorphismModel = None) -> dict:
    """Homology dimensions of the endomorphism complex at a commuting point,
    plus the trace pairing between complementary degrees.

    ``point`` carries X, Y, Z as n x n arrays of rationals.
    """
    X, Y, Z = point.X, point.Y, point.Z
    if not point.is_commuting():
        raise ValueError("ext dimensions require a commuting triple")
    n = n or point.n
    model = model or endomorphism_model(n)
    cx = model.evaluate_at(X, Y, Z, field)
    dims = cx.homology_dims()
    reps = {k: homology_representatives(cx, k) for k in range(4)}
    pairings = {}
    ranks = {}
    perfect = True
    for k in (0, 1):
        pk = trace_pairing_matrix(n, reps[k], reps[3 - k], field)
        pairings[(k, 3 - k)] = pk
        ranks[(k, 3 - k)] = pk.rank()
        if dims[k] != dims[3 - k] or ranks[(k, 3 - k)] != dims[k]:
            perfect = False
    return {
        "dims": dims,
        "euler": sum((-1) ** k * v for k, v in dims.items()),
        "pairings": pairings,
        "pairing_ranks": ranks,
        "pairing_perfect": perfect,
    }


# -- the tangent model and the comparison map ---------------------------------------------


class TangentModel:
    """The shifted dual of the cotangent model, in degrees 0..3.

    Degree q holds the duals of the cotangent generators in degree 1 - q;
    the component (q -> r) is the transpose of the cotangent component
    (1-r -> 1-q) times the Koszul sign of dualizing and shifting.
    """

    def __init__(self, cotangent: CotangentModel):
        self.cotangent = cotangent
        self.n = cotangent.n
        nn = self.n * self.n
        self.ranks = {0: nn, 1: 3 * nn, 2: 3 * nn, 3: nn}
        self.complex = self._build()

    # Signs of the dualized components by (source, target) degree.  The
    # flat dualizations form a single orbit under flipping basis-block
    # signs; this is the representative with every adjacent block positive.
    DUAL_SIGNS = {(0, 1): 1, (1, 2): 1, (2, 3): 1, (0, 2): 1, (0, 3): -1, (1, 3): 1}

    def _build(self) -> FreeComplex:
        c = self.cotangent.complex
        diff = {}
        twist = {}
        for q in range(4):
            for r in range(q + 1, 4):
                a, b = 1 - q, 1 - r
                src = c.component(b, a)
                m = src.transpose()
                if self.DUAL_SIGNS[(q, r)] < 0:
                    m = m.scale(-1)
                if m.is_zero():
                    continue
                if r == q + 1:
                    diff[q] = m
                else:
                    twist[(q, r)] = m
        return FreeComplex(c.base, self.ranks, diff, twist)

    def flatness_report(self):
        ok, failures = self.complex.check_flatness(self.cotangent.cdga.differential)
        return {"ok": ok, "failures": failures[:5]}


def _signed_permutation(table, n, slot_signs, flavor):
    """Block-diagonal signed permutation: slot b gets sign slot_signs[b],
    and flavor = 1 transposes the (i,j) labels inside each slot."""
    nn = n * n
    size = len(slot_signs) * nn
    m = SymMatrix(table, size, size)
    for b, sign in enumerate(slot_signs):
        s = SuperPoly.scalar(table, sign)
        for i in range(n):
            for j in range(n):
                src = b * nn + i * n + j
                tgt = b * nn + (j * n + i if flavor else i * n + j)
                m.set(tgt, src, s)
    return m


# Identity on the gl block and the letter slots, transposed labels with the
# complement orientation signs on the two-letter slots, identity on top.
CANONICAL_COMPARISON = ((0, (1,)), (0, (1, 1, 1)), (1, (-1, 1, -1)), (0, (1,)))


def build_comparison_map(n: int, cdga: MatrixCdga = None, search: bool = None):
    """The signed-permutation chain map from the shifted tangent model to
    the endomorphism model.

    Per degree, the candidates are: transpose the (i,j) labels inside each
    slot or not, and one of four slot sign patterns (uniform signs, or
    signs following the wedge orientation of the complementary slots).
    Candidates are prefiltered at a commuting point, survivors verified
    symbolically, twist components included.  Returns (chain map, record).

    ``search`` defaults to n <= 3; above that the canonical solution is
    constructed directly.  Either way the returned map is verified
    symbolically, twist components included.
    """
    cdga = cdga or MatrixCdga(n)
    cot = CotangentModel(cdga)
    tangent = TangentModel(cot)
    endo = EndomorphismModel(build_universal_family(n, cdga))
    t = cdga.table

    # numeric prefilter at a simple cyclic commuting point
    from .points import nilpotent_regular_point

    pt = nilpotent_regular_point(n)
    assignment = cdga.point_assignment(pt.X, pt.Y, pt.Z)
    src_num = tangent.complex.evaluate_at(assignment)
    tgt_num = endo.complex.evaluate_at(assignment)

    def numeric_block(flavor, slot_signs):
        nn = n * n
        size = len(slot_signs) * nn
        m = DenseMatrix.zero(size, size, QQ)
        for b, sign in enumerate(slot_signs):
            for i in range(n):
                for j in range(n):
                    src = b * nn + i * n + j
                    tgt = b * nn + (j * n + i if flavor else i * n + j)
                    m.data[tgt][src] = QQ.of(sign)
        return m

    if search is None:
        search = n <= 3

    if not search:
        combo = CANONICAL_COMPARISON
        blocks = {
            q: _signed_permutation(t, n, combo[q][1], combo[q][0]) for q in range(4)
        }
        cm = ChainMap(tangent.complex, endo.complex, blocks)
        rep = cm.check_symbolic()
        if not rep["ok"]:
            raise ValueError(f"canonical comparison map fails: {rep['failures'][:3]}")
        return cm, {"chosen": combo, "search": False, "symbolic": True}

    sign_patterns = {
        1: [(1,), (-1,)],
        3: [(1, 1, 1), (-1, -1, -1), (1, -1, 1), (-1, 1, -1)],
    }
    block_sizes = {0: 1, 1: 3, 2: 3, 3: 1}
    candidates_per_degree = {
        q: [
            (flavor, signs)
            for flavor in (0, 1)
            for signs in sign_patterns[block_sizes[q]]
        ]
        for q in range(4)
    }

    survivors = []
    for combo in iproduct(*(candidates_per_degree[q] for q in range(4))):
        ok = True
        blocks_num = {q: numeric_block(*combo[q]) for q in range(4)}
        for q in range(3):
            lhs = blocks_num[q + 1].matmul(src_num.differential(q))
            rhs = tgt_num.differential(q).matmul(blocks_num[q])
            if not lhs.add(rhs.scale(-1)).is_zero():
                ok = False
                break
        if ok:
            survivors.append(combo)

    verified = []
    for combo in survivors:
        blocks = {
            q: _signed_permutation(t, n, combo[q][1], combo[q][0]) for q in range(4)
        }
        cm = ChainMap(tangent.complex, endo.complex, blocks)
        rep = cm.check_symbolic()
        if rep["ok"]:
            verified.append((combo, cm))

    record = {
        "numeric_survivors": len(survivors),
        "symbolic_solutions": len(verified),
        "solutions": [c for c, _ in verified],
        "search": True,
    }
    if not verified:
        raise ValueError(f"no signed permutation intertwines the models: {record}")
    by_canonical = [vc for vc in verified if vc[0] == CANONICAL_COMPARISON]
    combo, cm = by_canonical[0] if by_canonical else verified[0]
    record["chosen"] = combo
    return cm, record
