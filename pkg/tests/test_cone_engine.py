"""Cone computations: membership, faces, duals, projections, dicing, supports."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product

import pytest

from nefcone.cone_atlas import (
    Cone,
    FaceLabel,
    atlas,
    cone_by_name,
    facet_labels,
    opposite_pairs,
)
from nefcone.cone_engine import (
    SQUARE_CORE_CHART_BASIS,
    conic_combination,
    dual_description,
    gamma_delta,
    is_dicing,
    is_face,
    member,
    monomial_exponents,
    project_and_check,
    psi2,
    psi3,
    square_core_cone,
    support_eval,
    voronoi_decomposition,
)
from nefcone.lattice_forms import (
    _rank,
    dual_vector,
    linear_form,
    linear_root,
    pair_slots,
    project,
    quadform,
    square,
)

SLOTS = pair_slots(4)


def unit_dual(i: int, j: int):
    coords = [0] * 10
    coords[SLOTS.index((i - 1, j - 1))] = 1
    return dual_vector(4, coords)


# ---------------------------------------------------------------------------
# membership


def test_central_ray_is_interior_member_with_coefficient_sum():
    at = atlas()
    res = member(at.pi2_4, at.e)
    assert res.is_member
    assert sum(res.coefficients) == Fraction(4)
    recombined = [
        sum(c * g.coords[k] for c, g in zip(res.coefficients, at.pi2_4.generators))
        for k in range(10)
    ]
    assert tuple(recombined) == at.e.coords


def test_member_produces_separator_for_outside_point():
    at = atlas()
    bad = quadform(4, (-1, 0, 0, 0, 0, 0, 0, 0, 0, 0))
    res = member(at.pi2_4, bad)
    assert not res.is_member and res.coefficients is None
    sep = res.separator
    assert sep is not None
    assert sep.pairing(bad) < 0
    assert all(sep.pairing(g) >= 0 for g in at.pi2_4.generators)


def test_member_accepts_generator_ray():
    at = atlas()
    res = member(at.pi2_4, quadform(4, (1, 0, 0, 0, 0, 0, 0, 0, 0, 0)))
    assert res.is_member and res.separator is None


# ---------------------------------------------------------------------------
# faces


def test_is_face_matches_facet_enumeration_on_nine_subsets():
    at = atlas()
    facet_set = {f.indices for f in facet_labels()}
    rng = random.Random(0)
    subsets = rng.sample(list(combinations(range(12), 9)), 40)
    for s in subsets:
        assert bool(is_face(at.pi2_4, FaceLabel("pi2_4", s))) == (s in facet_set)


def test_is_face_accepts_improper_face_and_supplies_support():
    at = atlas()
    full = is_face(at.pi2_4, FaceLabel("pi2_4", tuple(range(12))))
    assert full.is_face
    f = is_face(at.pi2_4, at.sigma0)
    assert f.is_face and f.support is not None
    others = [i for i in range(12) if i not in at.sigma0.indices]
    for i in at.sigma0.indices:
        assert f.support.pairing(at.pi2_4.generators[i]) == 0
    for i in others:
        assert f.support.pairing(at.pi2_4.generators[i]) > 0


def test_is_face_rejects_foreign_label():
    at = atlas()
    with pytest.raises(ValueError):
        is_face(at.pi2_4, FaceLabel("pi1_3", (0, 1)))


# ---------------------------------------------------------------------------
# dual descriptions


def test_dual_of_two_axis_squares_matches_printed_generators():
    x1sq = square(linear_form((1, 0, 0, 0)))
    x2sq = square(linear_form((0, 1, 0, 0)))
    dd = dual_description(Cone(4, (x1sq, x2sq), name="two_squares"))
    assert len(dd.rays) == 2 and len(dd.lineality) == 8

    lin = [list(d.coords) for d in dd.lineality]
    computed = [list(d.coords) for d in dd.rays] + lin + [[-x for x in v] for v in lin]
    printed_rays = [unit_dual(1, 1), unit_dual(2, 2)]
    printed_lin = [
        list(unit_dual(i, j).coords)
        for (i, j) in ((3, 3), (4, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
    ]
    printed_all = (
        [list(r.coords) for r in printed_rays]
        + printed_lin
        + [[-x for x in v] for v in printed_lin]
    )
    for ray in printed_rays:
        assert conic_combination(computed, list(ray.coords)) is not None
    for d in list(dd.rays) + list(dd.lineality):
        assert conic_combination(printed_all, list(d.coords)) is not None


def test_square_core_chart_basis_is_adapted_to_the_cone():
    sc = square_core_cone()
    b1, b2 = SQUARE_CORE_CHART_BASIS[0], SQUARE_CORE_CHART_BASIS[1]
    assert b1.pairing(sc.generators[0]) > 0 and b1.pairing(sc.generators[1]) == 0
    assert b2.pairing(sc.generators[0]) == 0 and b2.pairing(sc.generators[1]) > 0
    for k in range(2, 10):
        assert all(SQUARE_CORE_CHART_BASIS[k].pairing(g) == 0 for g in sc.generators)


MONOMIAL_TABLE = {
    (1, 1): {1: 1, 2: 2},
    (1, 2): {2: 1},
    (1, 3): {2: -1, 5: 1, 6: -1},
    (1, 4): {2: -1, 5: 1, 7: -1},
    (2, 2): {2: 2, 9: -1},
    (2, 3): {2: -1, 5: 1, 8: -1},
    (2, 4): {2: -1, 5: 1},
    (3, 3): {2: 2, 3: -1, 9: -1},
    (3, 4): {10: 1},
    (4, 4): {2: 2, 4: -1, 9: -1},
}


def test_monomial_exponent_table_all_ten_rows():
    dd = dual_description(square_core_cone(), monomial_basis=SQUARE_CORE_CHART_BASIS)
    assert len(dd.rays) == 2 and len(dd.lineality) == 8
    for (i, j), exponents in MONOMIAL_TABLE.items():
        got = monomial_exponents(dd, unit_dual(i, j))
        assert got == tuple(exponents.get(k + 1, 0) for k in range(10)), (i, j)


def test_monomial_exponents_requires_attached_basis():
    dd = dual_description(square_core_cone())
    with pytest.raises(ValueError):
        monomial_exponents(dd, unit_dual(1, 1))


# ---------------------------------------------------------------------------
# projections


def test_axis_projection_images_against_rank3_principal_cone():
    at = atlas()
    target = [at.pi1(3)]
    rep = project_and_check(at.pi1(4), 1, target)
    assert rep.checks[0].contains and rep.checks[0].equals
    for name in ("Pi2_1", "Pi2_2"):
        rep = project_and_check(cone_by_name(name), 1, target)
        assert rep.checks[0].contains and rep.checks[0].equals, name
    rep = project_and_check(cone_by_name("Pi2_3"), 1, target)
    assert rep.checks[0].contains and not rep.checks[0].equals
    assert rep.first_containing == "pi1_3"


def test_projected_generators_match_pointwise_restriction():
    at = atlas()
    rep = project_and_check(at.pi1(4), 1, [at.pi1(3)])
    projected = {project(g, 1).coords for g in at.pi1(4).generators}
    assert {g.coords for g in rep.image_generators} <= projected


# ---------------------------------------------------------------------------
# dicing


def test_dicing_examples():
    assert is_dicing([linear_form(l) for l in ((1, 0), (0, 1), (1, -1))])
    res = is_dicing([linear_form(l) for l in ((1, 0), (0, 1), (1, 1), (1, -1))])
    assert not res
    assert res.determinant in (2, -2)
    assert res.witness is not None


def test_principal_cone_lines_are_dicings():
    for g in (2, 3, 4):
        cone = atlas().pi1(g)
        lines = [linear_root(q) for q in cone.generators]
        assert is_dicing(lines)


def _dicing_oracle(lines, span=3) -> bool:
    """Brute force: on a box, integer points are exactly the points where all
    form values are integers and which can be separated from non-lattice
    rational points; equivalently every independent subset has unit det."""
    dim = lines[0].dim
    for subset in combinations(lines, dim):
        rows = [[int(c) for c in l.coeffs] for l in subset]
        if _rank(rows) < dim:
            continue
        det = _det(rows)
        if abs(det) != 1:
            return False
    return True


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        sign = -1 if j % 2 else 1
        rest = [row[:j] + row[j + 1:] for row in rows[1:]]
        total += sign * rows[0][j] * _det(rest)
    return total


def test_dicing_agrees_with_subset_determinant_oracle():
    rng = random.Random(1)
    agreements = 0
    for _ in range(120):
        dim = rng.choice((2, 3))
        count = rng.randint(dim, dim + 3)
        lines = []
        while len(lines) < count:
            coeffs = [rng.randint(-2, 2) for _ in range(dim)]
            if any(coeffs):
                lines.append(linear_form(coeffs))
        rows = [[int(c) for c in l.coeffs] for l in lines]
        if _rank(rows) < dim:
            with pytest.raises(ValueError):
                is_dicing(lines)
            continue
        assert bool(is_dicing(lines)) == _dicing_oracle(lines)
        agreements += 1
    assert agreements > 60


# ---------------------------------------------------------------------------
# support functions and the depth invariants


def test_voronoi_decomposition_of_projected_central_form():
    ebar = project(atlas().e, 1)
    dec = voronoi_decomposition(ebar)
    assert all(c == 1 for c, _ in dec)
    total = [
        sum(c * l[k] * l[m] for c, l in dec)
        for (k, m) in pair_slots(3)
    ]
    assert tuple(total) == ebar.coords


def test_support_values_on_pinned_forms():
    ebar = project(atlas().e, 1)
    assert support_eval(psi3(), ebar) == 4
    assert support_eval(psi2(), quadform(2, (2, 2, 0))) == 4
    assert support_eval(psi2(), quadform(2, (2, 2, -1))) == 3
    with pytest.raises(ValueError):
        support_eval(psi2(), quadform(2, (1, 1, 2)))


def test_boundary_pair_counts_on_rank3_principal_faces():
    string3 = FaceLabel("pi1_3", (0, 1, 2))
    for xi1, xi2 in ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)):
        gd = gamma_delta(string3, (xi1, xi2))
        want_gamma = 3 if xi1 in (1, 2) else 2
        assert (gd.gamma, gd.delta, gd.k_size) == (want_gamma, 2, 2)


def test_boundary_pair_counts_on_dim3_orbit_representatives():
    d3 = atlas().dim3_representatives
    mu = 3
    for xi1 in range(1, mu + 1):
        for xi2 in range(1, mu + 1):
            if xi1 == xi2:
                continue
            gd = gamma_delta(d3["BFstar"], (xi1, xi2))
            assert (gd.gamma, gd.delta, gd.k_size) == (2, 2, 2)
            gd = gamma_delta(d3["disconnected"], (xi1, xi2))
            assert (gd.gamma, gd.delta, gd.k_size) == (4, 4, 2)
    gd = gamma_delta(d3["string"], (3, 1))
    assert (gd.gamma, gd.delta) == (2, 2)
    for xi1 in (1, 2):
        gd = gamma_delta(d3["string"], (xi1, 3))
        assert (gd.gamma, gd.delta) == (3, 2)
    with pytest.raises(ValueError):
        gamma_delta(d3["RTstar"], (1, 2))


def test_six_line_face_pairs_all_share_invariants():
    mu6 = atlas().mu6_face
    for xi1 in range(1, 7):
        for xi2 in range(1, 7):
            if xi1 == xi2:
                continue
            gd = gamma_delta(mu6, (xi1, xi2))
            assert (gd.gamma, gd.delta, gd.k_size) == (2, 2, 3)


def test_full_admissible_enumeration_on_rank3_principal_cone():
    pi13 = atlas().pi1(3)
    count_by_size = {}
    for r in range(3, 7):
        for subset in combinations(range(6), r):
            lines = [
                [int(c) for c in linear_root(pi13.generators[i]).coeffs]
                for i in subset
            ]
            if _rank(lines) != 3:
                continue
            count_by_size[r] = count_by_size.get(r, 0) + 1
            label = FaceLabel("pi1_3", subset)
            for a, b in product(range(1, r + 1), repeat=2):
                if a == b:
                    continue
                gd = gamma_delta(label, (a, b))
                assert gd.delta == 2 and gd.gamma >= 2
    assert count_by_size == {3: 16, 4: 15, 5: 6, 6: 1}


def test_hit_class_sizes_on_selected_rank3_faces():
    label = FaceLabel("pi1_3", (0, 2, 3, 5))
    ks = [gamma_delta(label, (a, 1 if a != 1 else 2)).k_size for a in range(1, 5)]
    assert ks == [3, 3, 3, 3]
    label5 = FaceLabel("pi1_3", (0, 1, 2, 3, 4))
    ks5 = [gamma_delta(label5, (a, 1 if a != 1 else 2)).k_size for a in range(1, 6)]
    assert ks5 == [2, 3, 3, 3, 3]


def test_gamma_delta_validates_positions():
    string3 = FaceLabel("pi1_3", (0, 1, 2))
    with pytest.raises(ValueError):
        gamma_delta(string3, (1, 1))
    with pytest.raises(ValueError):
        gamma_delta(string3, (0, 2))
    with pytest.raises(ValueError):
        gamma_delta(string3, (1, 4))
