import random
from fractions import Fraction

import pytest

from critlocus.superpoly import (
    Derivation,
    GeneratorTable,
    SuperPoly,
    poly_from_text,
    poly_to_text,
)


def table2():
    return GeneratorTable.canonical(2)


def g(t, name):
    return SuperPoly.gen(t, name)


def test_canonical_table_counts():
    t = GeneratorTable.canonical(3)
    by_deg = {0: 0, -1: 0, -2: 0}
    for gen in t.gens:
        by_deg[gen.cdeg] += 1
    assert by_deg == {0: 27, -1: 27, -2: 9}


def test_odd_square_zero():
    t = table2()
    xi = g(t, "Xm1(1,1)")
    assert (xi * xi).is_zero()


def test_odd_anticommute():
    t = table2()
    xi, eta = g(t, "Xm1(1,2)"), g(t, "Ym1(2,1)")
    assert (xi * eta + eta * xi).is_zero()


def test_even_odd_commute():
    t = table2()
    a, xi = g(t, "X0(1,1)"), g(t, "Xm1(1,2)")
    prod = a * xi
    assert prod == xi * a
    assert len(prod.terms) == 1
    assert list(prod.terms.values()) == [Fraction(1)]


def test_degree_minus_two_square_allowed():
    t = table2()
    T = g(t, "T(1,1)")
    sq = T * T
    assert not sq.is_zero()
    assert sq.cdeg() == -4


def _random_homogeneous(t, rng, max_factors=3):
    p = SuperPoly.scalar(t, rng.randint(1, 3))
    for _ in range(rng.randint(0, max_factors)):
        k = rng.randrange(len(t))
        p = p * SuperPoly.gen(t, k)
        if p.is_zero():
            return SuperPoly.scalar(t, 1)
    return p


def _random_element(t, rng):
    p = SuperPoly.zero(t)
    for _ in range(rng.randint(1, 3)):
        p = p + _random_homogeneous(t, rng)
    return p


def test_associativity_random():
    t = table2()
    rng = random.Random(17)
    for _ in range(100):
        a, b, c = (_random_element(t, rng) for _ in range(3))
        assert ((a * b) * c) == (a * (b * c))


def test_graded_commutativity_random():
    t = table2()
    rng = random.Random(19)
    for _ in range(100):
        a = _random_homogeneous(t, rng)
        b = _random_homogeneous(t, rng)
        if a.is_zero() or b.is_zero():
            continue
        sign = -1 if (a.cdeg() % 2) and (b.cdeg() % 2) else 1
        assert a * b == (b * a).scale(sign)


def sample_differential(t):
    """d(Xm1(i,j)) = (Y0 Z0 - Z0 Y0)^T (i,j); zero on other generators."""
    n = t.n
    images = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            acc = SuperPoly.zero(t)
            for k in range(1, n + 1):
                acc += g(t, f"Y0({j},{k})") * g(t, f"Z0({k},{i})")
                acc -= g(t, f"Z0({j},{k})") * g(t, f"Y0({k},{i})")
            images[t.idx(f"Xm1({i},{j})")] = acc
    return Derivation(t, images, parity=1, cdeg_shift=1)


def test_derivation_on_quoted_generator_image():
    t = table2()
    d = sample_differential(t)
    img = d.apply(g(t, "Xm1(1,2)"))
    want = (
        g(t, "Y0(2,1)") * g(t, "Z0(1,1)")
        + g(t, "Y0(2,2)") * g(t, "Z0(2,1)")
        - g(t, "Z0(2,1)") * g(t, "Y0(1,1)")
        - g(t, "Z0(2,2)") * g(t, "Y0(2,1)")
    )
    assert img == want


def test_derivation_kills_degree_zero():
    t = table2()
    d = sample_differential(t)
    assert d.apply(g(t, "X0(1,2)") * g(t, "Y0(2,2)")).is_zero()


def test_derivation_leibniz_odd_pair():
    t = table2()
    d = sample_differential(t)
    xi, eta = g(t, "Xm1(1,2)"), g(t, "Xm1(2,1)")
    lhs = d.apply(xi * eta)
    rhs = d.apply(xi) * eta - xi * d.apply(eta)
    assert lhs == rhs


def test_derivation_leibniz_random():
    t = table2()
    d = sample_differential(t)
    rng = random.Random(23)
    for _ in range(100):
        a = _random_homogeneous(t, rng)
        b = _random_element(t, rng)
        if a.is_zero():
            continue
        sign = -1 if a.cdeg() % 2 else 1
        assert d.apply(a * b) == d.apply(a) * b + (a * d.apply(b)).scale(sign)


def test_degree_check_rejects_bad_assignment():
    t = table2()
    bad = Derivation(t, {t.idx("Xm1(1,1)"): g(t, "T(1,1)")}, parity=1, cdeg_shift=1)
    with pytest.raises(ValueError):
        bad.check_degrees()


def test_evaluation_is_ring_map():
    t = table2()
    rng = random.Random(29)
    assignment = {
        k: Fraction(rng.randint(-3, 3))
        for k in range(len(t))
        if t.cdeg(k) == 0
    }
    for _ in range(50):
        a = _random_element(t, rng)
        b = _random_element(t, rng)
        assert (a * b).evaluate(assignment) == a.evaluate(assignment) * b.evaluate(
            assignment
        )
        assert (a + b).evaluate(assignment) == a.evaluate(assignment) + b.evaluate(
            assignment
        )


def test_text_round_trip():
    t = table2()
    rng = random.Random(31)
    for _ in range(50):
        p = _random_element(t, rng)
        assert poly_from_text(t, poly_to_text(p)) == p


def test_text_format_example():
    t = table2()
    p = g(t, "X0(1,2)") * g(t, "Xm1(2,1)") * 3
    assert poly_to_text(p) == "3*X0(1,2)*Xm1(2,1)"
    assert poly_from_text(t, "3*X0(1,2)*Xm1(2,1)") == p
    assert poly_from_text(t, "0").is_zero()
    assert poly_from_text(t, "1/2*T(1,1)^2 - X0(1,1)") == (
        g(t, "T(1,1)") * g(t, "T(1,1)")
    ).scale(Fraction(1, 2)) - g(t, "X0(1,1)")


def test_extended_table_form_symbols():
    t = table2().extend_with_forms()
    dx0 = g(t, "d(X0(1,1))")
    dxm1 = g(t, "d(Xm1(1,1))")
    # d(X0) is odd (form degree 1, cohomological 0)
    assert (dx0 * dx0).is_zero()
    # d(Xm1) is even (form 1, cohomological -1)
    assert not (dxm1 * dxm1).is_zero()
    other = g(t, "d(X0(1,2))")
    assert dx0 * other == -(other * dx0)


def test_mismatched_tables_rejected():
    a = SuperPoly.gen(GeneratorTable.canonical(2), "X0(1,1)")
    b = SuperPoly.gen(GeneratorTable.canonical(2), "X0(1,1)")
    with pytest.raises(ValueError):
        a * b  # distinct table objects, even if structurally equal
