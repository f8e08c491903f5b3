from fractions import Fraction

import pytest

from critlocus.complexes import ChainMap, FreeComplex, SymMatrix
from critlocus.linalg import DenseMatrix
from critlocus.potential import MatrixCdga
from critlocus.scalars import GF, QQ
from critlocus.superpoly import GeneratorTable, SuperPoly


def sym_identity(table, n):
    m = SymMatrix(table, n, n)
    for i in range(n):
        m.set(i, i, SuperPoly.one(table))
    return m


def test_two_term_complex_trivially_square_zero():
    t = GeneratorTable.canonical(1)
    c = FreeComplex(t, {0: 2, 1: 2}, {0: sym_identity(t, 2)})
    ok, failures = c.check_d_squared()
    assert ok and failures == []


def test_three_term_identity_fails_at_first_entry():
    t = GeneratorTable.canonical(1)
    c = FreeComplex(
        t, {0: 1, 1: 1, 2: 1}, {0: sym_identity(t, 1), 1: sym_identity(t, 1)}
    )
    ok, failures = c.check_d_squared()
    assert not ok
    deg, row, col, entry = failures[0]
    assert (deg, row, col) == (0, 0, 0)
    assert entry == SuperPoly.one(t)


def test_evaluate_zero_differential():
    cdga = MatrixCdga(1)
    t = cdga.table
    c = FreeComplex(t, {0: 2, 1: 3}, {0: SymMatrix.zero(t, 3, 2)})
    ev = c.evaluate_at(cdga.point_assignment([[1]], [[2]], [[3]]))
    assert ev.differential(0).is_zero()


def test_evaluate_requires_full_assignment():
    cdga = MatrixCdga(1)
    t = cdga.table
    c = FreeComplex(t, {0: 1, 1: 1}, {0: sym_identity(t, 1)})
    with pytest.raises(KeyError):
        c.evaluate_at({t.idx("X0(1,1)"): Fraction(1)})


def test_homology_identity_complex_acyclic():
    d = DenseMatrix.identity(1)
    c = FreeComplex(QQ, {0: 1, 1: 1}, {0: d})
    assert c.homology_dims() == {0: 0, 1: 0}


def test_homology_zero_differentials_gives_ranks():
    c = FreeComplex(
        QQ,
        {0: 1, 1: 3, 2: 3, 3: 1},
        {k: DenseMatrix.zero(r, s) for k, (s, r) in enumerate([(1, 3), (3, 3), (3, 1)])},
    )
    assert c.homology_dims() == {0: 1, 1: 3, 2: 3, 3: 1}


def test_homology_rejects_non_complex():
    d = DenseMatrix.identity(1)
    c = FreeComplex(QQ, {0: 1, 1: 1, 2: 1}, {0: d, 1: d})
    with pytest.raises(ValueError):
        c.homology_dims()


def test_euler_characteristic_matches_homology():
    import random

    rng = random.Random(31)
    for _ in range(10):
        # random two-step complex d1 d0 = 0 built from a kernel factor
        a = DenseMatrix.from_rows(
            [[rng.randint(-2, 2) for _ in range(4)] for _ in range(3)]
        )
        from critlocus.linalg import kernel_basis

        ker = kernel_basis(a)
        if not ker:
            continue
        b = DenseMatrix.from_rows([[v[i] for v in ker] for i in range(4)])
        c = FreeComplex(QQ, {0: len(ker), 1: 4, 2: 3}, {0: b, 1: a})
        ok, _ = c.check_d_squared()
        assert ok
        dims = c.homology_dims()
        assert sum((-1) ** k * d for k, d in dims.items()) == c.euler_characteristic()


def test_homology_dims_agree_mod_p_default_prime():
    from critlocus.scalars import DEFAULT_PRIME

    cdga = MatrixCdga(2)
    from critlocus.family import endomorphism_model
    from critlocus.points import nilpotent_regular_point

    model = endomorphism_model(2)
    pt = nilpotent_regular_point(2)
    over_q = model.evaluate_at(pt.X, pt.Y, pt.Z).homology_dims()
    over_p = model.evaluate_at(pt.X, pt.Y, pt.Z, GF(DEFAULT_PRIME)).homology_dims()
    assert over_q == over_p


def test_identity_chain_map_commutes():
    t = GeneratorTable.canonical(1)
    d = SymMatrix(t, 1, 1)
    d.set(0, 0, SuperPoly.gen(t, "X0(1,1)"))
    c = FreeComplex(t, {0: 1, 1: 1}, {0: d})
    cm = ChainMap(c, c, {0: sym_identity(t, 1), 1: sym_identity(t, 1)})
    assert cm.check_symbolic()["ok"]


def test_json_round_trip():
    cdga = MatrixCdga(2)
    model_complex = cdga.koszul_display()
    text = model_complex.to_json()
    back = FreeComplex.from_json(cdga.table, text)
    assert back.ranks == model_complex.ranks
    for k in model_complex.diff:
        assert back.differential(k) == model_complex.differential(k)
    assert back.to_json() == text


def test_json_round_trip_with_twists():
    from critlocus.potential import build_cotangent_complex

    model = build_cotangent_complex(2)
    text = model.complex.to_json()
    back = FreeComplex.from_json(model.cdga.table, text)
    for key, m in model.complex.twist.items():
        assert back.twist[key] == m


def test_evaluation_is_a_chain_functor():
    # wherever the symbolic composite vanishes identically, every
    # evaluation is again a complex, commuting triple or not
    import random

    cdga = MatrixCdga(2)
    disp = cdga.koszul_display()
    rng = random.Random(5)
    for _ in range(10):
        mats = [
            [[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)]
            for _ in range(3)
        ]
        ev = disp.evaluate_at(cdga.point_assignment(*mats))
        ok, failures = ev.check_d_squared()
        assert ok, failures
