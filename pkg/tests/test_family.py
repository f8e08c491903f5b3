import random

import pytest

from critlocus.family import (
    BimodElement,
    CANONICAL_COMPARISON,
    EndomorphismModel,
    TangentModel,
    build_comparison_map,
    build_ginzburg_resolution,
    build_universal_family,
    endo_complex_at_point,
    endomorphism_model,
    ext_dims_at,
    trace_pairing_matrix,
)
from critlocus.freenc import NCElement
from critlocus.potential import CotangentModel, MatrixCdga
from critlocus.points import (
    MatrixPoint,
    enumerate_partitions,
    koszul_ext_oracle,
    nilpotent_regular_point,
    point_from_partition,
    random_conjugate_points,
)


# -- the module structure ------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_leibniz_holds_for_all_letters(n):
    fam = build_universal_family(n)
    rep = fam.leibniz_report()
    assert rep["ok"], rep


def test_action_resolution_record():
    fam = build_universal_family(2)
    assert fam.provenance["u"] == "transposed symbol"
    assert fam.provenance["v"] == "transposed symbol"
    assert fam.provenance["w"] == "transposed symbol"
    assert fam.provenance["t"] == "symbol"


def test_rank_one_actions_are_single_generators():
    fam = build_universal_family(1)
    t = fam.cdga.table
    # all commutators vanish, each letter acts by its lone symbol
    for letter, name in (("u", "Xm1(1,1)"), ("v", "Ym1(1,1)"), ("w", "Zm1(1,1)"), ("t", "T(1,1)")):
        m = fam.matrices[letter]
        assert len(m) == 1
        from critlocus.superpoly import SuperPoly

        assert m[0][0] == SuperPoly.gen(t, name)


def test_word_action_is_matrix_product():
    fam = build_universal_family(2)
    xy = fam.act(NCElement.word("xy"))
    from critlocus.potential import mat_mul

    assert xy == mat_mul(fam.matrices["x"], fam.matrices["y"])


def test_leibniz_fails_for_untransposed_u():
    fam = build_universal_family(2)
    broken = dict(fam.matrices)
    broken["u"] = fam.cdga.xm1  # the untransposed symbol matrix
    from critlocus.family import DModuleAction

    bad = DModuleAction(fam.cdga, broken, {})
    defect = bad.leibniz_defect("u")
    assert any(not p.is_zero() for row in defect for p in row)


# -- the bimodule resolution -----------------------------------------------------


def test_ginzburg_composites_vanish_literally():
    rep = build_ginzburg_resolution().composites_vanish()
    assert rep["ok"], rep


def test_ginzburg_alpha0_on_x():
    res = build_ginzburg_resolution()
    img = res.alpha0(BimodElement.term((), "x", ()))
    assert img == BimodElement.term(("x",), None, ()) - BimodElement.term(
        (), None, ("x",)
    )


def test_ginzburg_alpha_m1_quoted_expansion():
    res = build_ginzburg_resolution()
    img = res.alpha_m1(BimodElement.term((), "x*", ()))
    want = (
        BimodElement.term(("y",), "z", ())
        + BimodElement.term((), "y", ("z",))
        - BimodElement.term(("z",), "y", ())
        - BimodElement.term((), "z", ("y",))
    )
    assert img == want


def test_ginzburg_needs_rewriting_before_cancelling():
    res = build_ginzburg_resolution()
    img = res.alpha0(res.alpha_m1(BimodElement.term((), "x*", ())))
    # before sorting the words the expansion does not collapse
    assert not img.is_zero()
    assert img.normalize().is_zero()


# -- the endomorphism model -------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_endo_model_flat(n):
    model = EndomorphismModel(build_universal_family(n))
    rep = model.flatness_report()
    assert rep["connection_flat"]
    assert rep["complex_flat"]


def test_endo_ranks_and_euler():
    model = endomorphism_model(2)
    assert model.ranks == {0: 4, 1: 12, 2: 12, 3: 4}
    assert model.complex.euler_characteristic() == 0


def test_evaluation_commutes_with_direct_assembly():
    model = endomorphism_model(2)
    rng = random.Random(3)
    for pt in random_conjugate_points(2, 5, rng):
        via_symbolic = model.evaluate_at(pt.X, pt.Y, pt.Z)
        direct = endo_complex_at_point(pt.X, pt.Y, pt.Z)
        for q in range(3):
            assert via_symbolic.differential(q) == direct.differential(q)


def test_ext_dims_origin_rank_one():
    pt = MatrixPoint([[0]], [[0]], [[0]], v=[1])
    rep = ext_dims_at(pt)
    assert rep["dims"] == {0: 1, 1: 3, 2: 3, 3: 1}
    assert rep["euler"] == 0
    assert rep["pairing_perfect"]


def test_ext_dims_rejects_noncommuting():
    pt = MatrixPoint([[0, 1], [0, 0]], [[0, 0], [1, 0]], [[0, 0], [0, 0]])
    with pytest.raises(ValueError):
        ext_dims_at(pt)


def test_ext_dims_two_distinct_points():
    pt = MatrixPoint(
        [[1, 0], [0, 2]], [[3, 0], [0, 5]], [[7, 0], [0, 11]], v=[1, 1]
    )
    rep = ext_dims_at(pt)
    assert rep["dims"] == {0: 2, 1: 6, 2: 6, 3: 2}
    assert rep["pairing_perfect"]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ext_dims_match_oracle_on_partition_points(n):
    model = endomorphism_model(n)
    for pp in enumerate_partitions(n):
        pt = point_from_partition(pp)
        mine = ext_dims_at(pt, model=model)
        oracle = koszul_ext_oracle(pt)
        assert mine["dims"] == oracle["dims"]
        assert mine["euler"] == 0
        assert mine["pairing_perfect"] and oracle["pairing_perfect"]


def test_trace_pairing_descends():
    # the pairing of a boundary against a cycle vanishes
    model = endomorphism_model(2)
    pt = nilpotent_regular_point(2)
    cx = model.evaluate_at(pt.X, pt.Y, pt.Z)
    from critlocus.linalg import kernel_basis

    cycles2 = kernel_basis(cx.differential(2))
    d0 = cx.differential(0)
    boundaries1 = [
        [d0.data[i][j] for i in range(d0.rows)] for j in range(d0.cols)
    ]
    pm = trace_pairing_matrix(2, boundaries1, cycles2)
    assert pm.is_zero()


# -- tangent model and comparison -----------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_tangent_model_flat(n):
    tang = TangentModel(CotangentModel(MatrixCdga(n)))
    assert tang.flatness_report()["ok"]


def test_comparison_map_symbolic_rank_two():
    cm, record = build_comparison_map(2)
    assert record["symbolic_solutions"] == 2
    # the two solutions are the map and its global negation
    sols = record["solutions"]
    assert record["chosen"] == CANONICAL_COMPARISON
    flip = tuple((f, tuple(-s for s in signs)) for f, signs in sols[0])
    assert flip == sols[1]


def test_comparison_map_at_points_rank_two_and_three():
    rng = random.Random(11)
    for n, count in ((2, 5), (3, 3)):
        cdga = MatrixCdga(n)
        cm, _ = build_comparison_map(n, cdga)
        for pt in random_conjugate_points(n, count, rng):
            rep = cm.check_at_point(cdga.point_assignment(pt.X, pt.Y, pt.Z))
            assert rep["ok"]
            assert rep["all_invertible"]


def test_comparison_map_perturbed_sign_fails():
    cdga = MatrixCdga(2)
    cm, _ = build_comparison_map(2, cdga)
    from critlocus.complexes import ChainMap

    blocks = dict(cm.blocks)
    blocks[2] = blocks[2].scale(-1)  # flip one block's sign
    bad = ChainMap(cm.source, cm.target, blocks)
    pt = nilpotent_regular_point(2)
    rep = bad.check_at_point(cdga.point_assignment(pt.X, pt.Y, pt.Z))
    assert not rep["ok"]


def test_ext_dims_fat_point_not_cyclic():
    # the square-zero triple at rank 2: every endomorphism commutes, so
    # the dimensions are the full ranks; the trace pairing is still perfect
    pt = MatrixPoint([[0, 0], [0, 0]], [[0, 0], [0, 0]], [[0, 0], [0, 0]])
    mine = ext_dims_at(pt)
    oracle = koszul_ext_oracle(pt)
    assert mine["dims"] == {0: 4, 1: 12, 2: 12, 3: 4}
    assert mine["dims"] == oracle["dims"]
    assert mine["pairing_perfect"] and oracle["pairing_perfect"]


@pytest.mark.parametrize("n", [3, 4])
def test_comparison_map_symbolic_above_search_rank(n):
    cm, record = build_comparison_map(n, search=False)
    assert record["symbolic"]
    assert record["chosen"] == CANONICAL_COMPARISON
