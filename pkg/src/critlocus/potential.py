"""The matrix superpotential W = tr(X0 [Y0, Z0]) and its Koszul cdga.

Conventions (the transpose ledger, fixed once here and imported everywhere):

* W = tr(X0 [Y0, Z0]); its partial derivative in the (i,j) entry of X0 is
  the (j,i) entry of [Y0, Z0], i.e. the transposed commutator.
* The cdga differential sends Xm1(i,j) to [Y0,Z0]^T(i,j), cyclically for
  Ym1, Zm1, and T(i,j) to ([X0, Xm1^T] + [Y0, Ym1^T] + [Z0, Zm1^T])(i,j).
  The transposes on the odd blocks in dT are forced: with dXm1 = [Y0,Z0]^T,
  the untransposed combination [X0, Xm1] fails d.d = 0 in rank >= 3, while
  this one reduces to the matrix Jacobi identity.
* gl_n acts on X0, Y0, Z0 and T by the commutator action E.M = [E, M] and
  on the odd generators by E.M = -[E^T, M]; this is the unique assignment
  making the differential equivariant.
* The de Rham differential anticommutes with the cdga differential, so the
  internal differential of the module of Kahler differentials is
  d(dg) = -ddr(d g).

The cotangent complex of the quotient by GL_n is modelled as a free complex
in degrees -2..1 with ranks (n^2, 3n^2, 3n^2, n^2): the adjacent blocks are
the degree-0 components of the total differential, and the components that
jump two or three degrees (entries of negative degree) are kept as twist
components, so the flatness identity of :meth:`FreeComplex.check_flatness`
holds exactly.  Setting the odd generators to zero recovers an honest
complex at every commuting triple.
"""

from __future__ import annotations

from fractions import Fraction

from .complexes import FreeComplex, SymMatrix
from .superpoly import Derivation, GeneratorTable, SuperPoly

BLOCKS = ("X", "Y", "Z")


def _gen(table, name):
    return SuperPoly.gen(table, name)


def symbol_matrix(table, name: str, n: int):
    """The n x n matrix whose (i,j) entry is the generator name(i+1,j+1)."""
    return [[_gen(table, f"{name}({i},{j})") for j in range(1, n + 1)] for i in range(1, n + 1)]


def mat_mul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = None
            for k in range(m):
                term = a[i][k] * b[k][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_transpose(a):
    return [[a[i][j] for i in range(len(a))] for j in range(len(a[0]))]


def commutator(a, b):
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def trace(a):
    acc = a[0][0]
    for i in range(1, len(a)):
        acc = acc + a[i][i]
    return acc


def build_potential(n: int, table=None) -> SuperPoly:
    """W = tr(X0 [Y0, Z0]) as a degree-0 element of the rank-n cdga."""
    if table is None:
        table = GeneratorTable.canonical(n)
    x = symbol_matrix(table, "X0", n)
    y = symbol_matrix(table, "Y0", n)
    z = symbol_matrix(table, "Z0", n)
    return trace(mat_mul(x, commutator(y, z)))


class MatrixCdga:
    """The rank-n Koszul cdga with its degree +1 differential."""

    def __init__(self, n: int):
        self.n = n
        self.table = GeneratorTable.canonical(n)
        t = self.table
        self.x0 = symbol_matrix(t, "X0", n)
        self.y0 = symbol_matrix(t, "Y0", n)
        self.z0 = symbol_matrix(t, "Z0", n)
        self.xm1 = symbol_matrix(t, "Xm1", n)
        self.ym1 = symbol_matrix(t, "Ym1", n)
        self.zm1 = symbol_matrix(t, "Zm1", n)
        self.tgen = symbol_matrix(t, "T", n)
        self.potential = build_potential(n, t)
        self.differential = self._build_differential()
        self._ext = None

    # -- the differential ----------------------------------------------------

    def _odd_images(self):
        """dXm1 = [Y0,Z0]^T entrywise, cyclically for Ym1, Zm1."""
        n, t = self.n, self.table
        trips = (
            ("Xm1", self.y0, self.z0),
            ("Ym1", self.z0, self.x0),
            ("Zm1", self.x0, self.y0),
        )
        images = {}
        for name, a, b in trips:
            comm_t = mat_transpose(commutator(a, b))
            for i in range(n):
                for j in range(n):
                    images[t.idx(f"{name}({i + 1},{j + 1})")] = comm_t[i][j]
        return images

    def _t_images(self):
        n, t = self.n, self.table
        mu = commutator(self.x0, mat_transpose(self.xm1))
        mu = mat_add(mu, commutator(self.y0, mat_transpose(self.ym1)))
        mu = mat_add(mu, commutator(self.z0, mat_transpose(self.zm1)))
        return {
            t.idx(f"T({i + 1},{j + 1})"): mu[i][j]
            for i in range(n)
            for j in range(n)
        }

    def _build_differential(self) -> Derivation:
        images = self._odd_images()
        images.update(self._t_images())
        d = Derivation(self.table, images, parity=1, cdeg_shift=1)
        d.check_degrees()
        return d

    def partial_w(self, block: str, i: int, j: int) -> SuperPoly:
        """dW/d(block)(i,j) by coefficient extraction from W."""
        marker = self.table.idx(f"{block}0({i},{j})")
        # W is multilinear in the three blocks, so coefficient extraction
        # in a degree-0 generator is the honest partial derivative.
        out = SuperPoly.zero(self.table)
        for (e, o), c in self.potential.terms.items():
            d = dict(e)
            if marker not in d:
                continue
            exp = d.pop(marker)
            out += SuperPoly(
                self.table, {(tuple(sorted(d.items())), o): c * exp}
            )
        return out

    # -- checks ----------------------------------------------------------------

    def d_squared_on_generators(self):
        """d(d(g)) for every generator; returns list of nonzero offenders."""
        bad = []
        d = self.differential
        for k in range(len(self.table)):
            val = d.apply(d.image_of(k))
            if not val.is_zero():
                bad.append((self.table.gen(k).name, val))
        return bad

    def jacobian_entries(self):
        """The 3n^2 entries of dW, in block order."""
        out = []
        for block in BLOCKS:
            for i in range(1, self.n + 1):
                for j in range(1, self.n + 1):
                    out.append(self.partial_w(block, i, j))
        return out

    def commutator_entries_transposed(self):
        """[Y0,Z0]^T, [Z0,X0]^T, [X0,Y0]^T entries in the same order."""
        out = []
        for a, b in ((self.y0, self.z0), (self.z0, self.x0), (self.x0, self.y0)):
            ct = mat_transpose(commutator(a, b))
            for i in range(self.n):
                out.extend(ct[i])
        return out

    def koszul_display(self) -> FreeComplex:
        """The low wedge degrees of the Koszul complex of dW, extended by the
        degree -2 generators: ranks (n^2, 3n^2, 1) in degrees -2, -1, 0.

        d(-1 -> 0) is the row vector of Jacobian entries, d(-2 -> -1)
        expresses dT in the odd-generator basis; the composite vanishes
        identically by the matrix Jacobi identity.
        """
        n, t = self.n, self.table
        nn = n * n
        d_top = SymMatrix(t, 1, 3 * nn)
        for col, p in enumerate(self.jacobian_entries()):
            d_top.set(0, col, p)
        d_bot = SymMatrix(t, 3 * nn, nn)
        for col in range(nn):
            i, j = divmod(col, n)
            image = self.differential.image_of(t.idx(f"T({i + 1},{j + 1})"))
            for bi, block in enumerate(BLOCKS):
                for p in range(n):
                    for q in range(n):
                        k = t.idx(f"{block}m1({p + 1},{q + 1})")
                        coeff = image.coefficient_of_gen(k)
                        if not coeff.is_zero():
                            d_bot.set(bi * nn + p * n + q, col, coeff)
        return FreeComplex(
            t,
            {-2: nn, -1: 3 * nn, 0: 1},
            {-2: d_bot, -1: d_top},
        )

    # -- the de Rham extension --------------------------------------------------

    def extended(self):
        """(ext table, d extended, ddr) with d(dg) = -ddr(d g)."""
        if self._ext is not None:
            return self._ext
        t = self.table
        ext = t.extend_with_forms()
        base = len(t)

        def lift(p: SuperPoly) -> SuperPoly:
            # base and extension share generator indices below ``base``
            return SuperPoly(ext, dict(p.terms))

        ddr_images = {k: SuperPoly.gen(ext, base + k) for k in range(base)}
        ddr = Derivation(ext, ddr_images, parity=1)
        d_images = {}
        for k in range(base):
            d_images[k] = lift(self.differential.image_of(k))
        for k in range(base):
            d_images[base + k] = -ddr.apply(d_images[k])
        d_ext = Derivation(ext, d_images, parity=1)
        self._ext = (ext, d_ext, ddr)
        return self._ext

    def point_assignment(self, X, Y, Z) -> dict:
        """Map degree-0 generators to the entries of three n x n matrices."""
        n, t = self.n, self.table
        out = {}
        for name, m in (("X0", X), ("Y0", Y), ("Z0", Z)):
            for i in range(n):
                for j in range(n):
                    out[t.idx(f"{name}({i + 1},{j + 1})")] = Fraction(m[i][j])
        return out


def build_koszul_cdga(n: int) -> MatrixCdga:
    return MatrixCdga(n)


# -- the action of gl_n -----------------------------------------------------------


def coaction_derivation(cdga: MatrixCdga, a: int, b: int) -> Derivation:
    """The vector field of the elementary matrix E_(a,b), 1-based indices.

    Even generators transform by M -> [E, M], odd ones by M -> -[E^T, M];
    this is the unique extension under which the differential is
    equivariant.
    """
    n, t = cdga.n, cdga.table
    images = {}

    def add_adjoint(name, sign):
        # sign * [E_ab, M](i,j) = sign * (delta_ia M(b,j) - M(i,a) delta_jb)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                val = SuperPoly.zero(t)
                if i == a:
                    val += _gen(t, f"{name}({b},{j})")
                if j == b:
                    val -= _gen(t, f"{name}({i},{a})")
                images[t.idx(f"{name}({i},{j})")] = val.scale(sign)

    def add_coadjoint(name):
        # -[E_ab^T, M](i,j) = -(delta_ib M(a,j) - M(i,b) delta_ja)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                val = SuperPoly.zero(t)
                if i == b:
                    val -= _gen(t, f"{name}({a},{j})")
                if j == a:
                    val += _gen(t, f"{name}({i},{b})")
                images[t.idx(f"{name}({i},{j})")] = val

    for name in ("X0", "Y0", "Z0", "T"):
        add_adjoint(name, 1)
    for name in ("Xm1", "Ym1", "Zm1"):
        add_coadjoint(name)
    return Derivation(t, images, parity=0, cdeg_shift=0)


# -- the cotangent model ------------------------------------------------------------


class CotangentModel:
    """Generator-degree presentation of the stacky cotangent complex.

    Blocks, in order inside each degree:

    * degree -2: tau(i,j), the de Rham symbols of the T generators
    * degree -1: xi_A(i,j) for A = X, Y, Z, symbols of the odd generators
    * degree  0: eta_A(i,j), symbols of the degree-0 generators
    * degree  1: the dual gl_n slots g(a,b)

    ``complex`` holds the free complex with adjacent differentials and
    twist components; ``self_duality_report`` checks the transpose match
    of the outer blocks (pairing tau(i,j) ~ g(j,i)) and the symmetry of
    the middle block (pairing xi_A(i,j) ~ eta_A(i,j)).
    """

    COACTION_SIGN = -1

    def __init__(self, cdga: MatrixCdga):
        self.cdga = cdga
        self.n = cdga.n
        nn = self.n * self.n
        self.ranks = {-2: nn, -1: 3 * nn, 0: 3 * nn, 1: nn}
        self.complex = self._build()

    # slot helpers, all 0-based
    def _slot(self, block: str, i: int, j: int) -> int:
        # block in X, Y, Z; returns offset within a 3n^2 group
        return BLOCKS.index(block) * self.n * self.n + i * self.n + j

    def _pair_slot(self, i: int, j: int) -> int:
        return i * self.n + j

    def _build(self) -> FreeComplex:
        cdga = self.cdga
        n, t = self.n, cdga.table
        nn = n * n

        def degree_zero_gens():
            for block in BLOCKS:
                for i in range(n):
                    for j in range(n):
                        yield block, i, j, t.idx(f"{block}0({i + 1},{j + 1})")

        def odd_gens():
            for block in BLOCKS:
                for i in range(n):
                    for j in range(n):
                        yield block, i, j, t.idx(f"{block}m1({i + 1},{j + 1})")

        def t_gens():
            for i in range(n):
                for j in range(n):
                    yield i, j, t.idx(f"T({i + 1},{j + 1})")

        # -- internal part: columns are -ddr(d gen), decomposed by symbol slot
        ext, d_ext, ddr = cdga.extended()
        base = len(t)

        def drop_to_base(p: SuperPoly) -> SuperPoly:
            for (e, o) in p.terms:
                for k, _ in e:
                    if k >= base:
                        raise ValueError("unextracted form symbol")
                for k in o:
                    if k >= base:
                        raise ValueError("unextracted form symbol")
            return SuperPoly(t, dict(p.terms))

        def internal_column(gen_idx):
            """-ddr(d g) as {target gen idx: coefficient SuperPoly}."""
            img = d_ext.image_of(base + gen_idx)  # already -ddr(d g)
            out = {}
            for k in range(base):
                coeff = img.coefficient_of_gen(base + k)
                if not coeff.is_zero():
                    out[k] = drop_to_base(coeff)
            return out

        d_m2_m1 = SymMatrix(t, 3 * nn, nn)
        tw_m2_0 = SymMatrix(t, 3 * nn, nn)
        tw_m2_1 = SymMatrix(t, nn, nn)
        d_m1_0 = SymMatrix(t, 3 * nn, 3 * nn)
        tw_m1_1 = SymMatrix(t, nn, 3 * nn)
        d_0_1 = SymMatrix(t, nn, 3 * nn)

        def target_slot(k):
            g = t.gen(k)
            name = g.name
            i, j = g.index
            if name.startswith("T"):
                return -2, self._pair_slot(i - 1, j - 1)
            block = name[0]
            if "m1" in name:
                return -1, self._slot(block, i - 1, j - 1)
            return 0, self._slot(block, i - 1, j - 1)

        # columns from the tau block
        for i, j, k in t_gens():
            col = self._pair_slot(i, j)
            for tgt, coeff in internal_column(k).items():
                deg, slot = target_slot(tgt)
                if deg == -1:
                    d_m2_m1.set(slot, col, coeff)
                elif deg == 0:
                    tw_m2_0.set(slot, col, coeff)
                else:
                    raise AssertionError("unexpected target degree")

        # columns from the xi block
        for block, i, j, k in odd_gens():
            col = self._slot(block, i, j)
            for tgt, coeff in internal_column(k).items():
                deg, slot = target_slot(tgt)
                if deg != 0:
                    raise AssertionError("unexpected target degree")
                d_m1_0.set(slot, col, coeff)

        # -- coaction part into the gl slots
        actions = [
            [coaction_derivation(cdga, a + 1, b + 1) for b in range(n)]
            for a in range(n)
        ]
        s = SuperPoly.scalar(t, self.COACTION_SIGN)

        def coaction_entries(gen_idx, matrix, col):
            for a in range(n):
                for b in range(n):
                    val = actions[a][b].image_of(gen_idx)
                    if not val.is_zero():
                        matrix.add_to(self._pair_slot(a, b), col, s * val)

        for block, i, j, k in degree_zero_gens():
            coaction_entries(k, d_0_1, self._slot(block, i, j))
        for block, i, j, k in odd_gens():
            coaction_entries(k, tw_m1_1, self._slot(block, i, j))
        for i, j, k in t_gens():
            coaction_entries(k, tw_m2_1, self._pair_slot(i, j))

        return FreeComplex(
            t,
            self.ranks,
            {-2: d_m2_m1, -1: d_m1_0, 0: d_0_1},
            {(-2, 0): tw_m2_0, (-2, 1): tw_m2_1, (-1, 1): tw_m1_1},
        )

    # -- reports -------------------------------------------------------------

    def flatness_report(self):
        ok, failures = self.complex.check_flatness(self.cdga.differential)
        return {"ok": ok, "failures": failures}

    def self_duality_report(self):
        """Outer blocks transpose-match under tau(i,j) ~ g(j,i); middle is
        symmetric under xi_A(i,j) ~ eta_A(i,j).  Records the matching sign."""
        n = self.n
        c = self.complex
        outer_sign = None
        ok = True
        d_low = c.differential(-2)
        d_top = c.differential(0)
        for i in range(n):
            for j in range(n):
                col = self._pair_slot(i, j)
                for row in range(3 * n * n):
                    lhs = d_low.entry(row, col)
                    rhs = d_top.entry(self._pair_slot(j, i), row)
                    if lhs.is_zero() and rhs.is_zero():
                        continue
                    for sign in (1, -1):
                        if lhs == rhs.scale(sign):
                            if outer_sign is None:
                                outer_sign = sign
                            elif outer_sign != sign:
                                ok = False
                            break
                    else:
                        ok = False
        mid = c.differential(-1)
        mid_symmetric = mid == mid.transpose()
        # outer_sign stays None only when both outer blocks vanish (n = 1)
        return {
            "ok": ok and mid_symmetric,
            "outer_sign": outer_sign,
            "middle_symmetric": mid_symmetric,
        }

    def evaluate_at(self, X, Y, Z, field=None) -> FreeComplex:
        from .scalars import QQ

        assignment = self.cdga.point_assignment(X, Y, Z)
        return self.complex.evaluate_at(assignment, field or QQ)


def build_cotangent_complex(n: int, cdga: MatrixCdga = None) -> CotangentModel:
    return CotangentModel(cdga or MatrixCdga(n))


# -- the shifted 2-form and its primitive -------------------------------------------


def build_two_form(cdga: MatrixCdga) -> SuperPoly:
    """omega = sum_ij d(Xm1(i,j)) ^ d(X0(i,j)) + the Y and Z terms."""
    ext, _, _ = cdga.extended()
    n = cdga.n
    base = len(cdga.table)
    acc = SuperPoly.zero(ext)
    for block in BLOCKS:
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                xi = SuperPoly.gen(ext, base + cdga.table.idx(f"{block}m1({i},{j})"))
                eta = SuperPoly.gen(ext, base + cdga.table.idx(f"{block}0({i},{j})"))
                acc += xi * eta
    return acc


def build_primitive_one_form(cdga: MatrixCdga) -> SuperPoly:
    """phi = tr(Xm1 (ddr X0)^T + ...) = sum_ij Xm1(i,j) d(X0(i,j)) + cyc."""
    ext, _, _ = cdga.extended()
    n = cdga.n
    base = len(cdga.table)
    acc = SuperPoly.zero(ext)
    for block in BLOCKS:
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                odd = SuperPoly.gen(ext, cdga.table.idx(f"{block}m1({i},{j})"))
                eta = SuperPoly.gen(ext, base + cdga.table.idx(f"{block}0({i},{j})"))
                acc += odd * eta
    return acc


def verify_superpotential_identities(cdga: MatrixCdga) -> dict:
    """Checks, as symbolic normal forms:

    (i)   ddr(phi) = omega
    (ii)  ddr(Phi) + d(phi) = 0 with Phi = -W
    plus the calculus consistency d.d = 0, ddr.ddr = 0, d.ddr + ddr.d = 0
    on all generators of the extended table.
    """
    ext, d_ext, ddr = cdga.extended()
    base = len(cdga.table)

    omega = build_two_form(cdga)
    phi = build_primitive_one_form(cdga)
    w_lift = SuperPoly(ext, dict(cdga.potential.terms))
    big_phi = -w_lift

    report = {}
    report["ddr_phi_equals_omega"] = ddr.apply(phi) == omega
    report["ddr_bigphi_plus_d_phi_zero"] = (
        ddr.apply(big_phi) + d_ext.apply(phi)
    ).is_zero()
    report["omega_closed"] = ddr.apply(omega).is_zero()
    report["omega_form_degree"] = omega.fdeg()
    report["omega_internal_degree"] = omega.cdeg()

    calc_ok = True
    for k in range(len(ext)):
        g = SuperPoly.gen(ext, k)
        if not d_ext.apply(d_ext.apply(g)).is_zero():
            calc_ok = False
        if not ddr.apply(ddr.apply(g)).is_zero():
            calc_ok = False
        anti = d_ext.apply(ddr.apply(g)) + ddr.apply(d_ext.apply(g))
        if not anti.is_zero():
            calc_ok = False
    report["calculus_consistent"] = calc_ok
    report["ok"] = (
        report["ddr_phi_equals_omega"]
        and report["ddr_bigphi_plus_d_phi_zero"]
        and report["omega_closed"]
        and calc_ok
    )
    return report
