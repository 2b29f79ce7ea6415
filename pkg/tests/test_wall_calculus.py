"""Wall relations, divisor assignments, and intersection-number arithmetic."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from nefcone.cone_atlas import Cone, atlas, face_generators
from nefcone.lattice_forms import act, half_trace_prime, linear_form, square
from nefcone.wall_calculus import (
    DivisorAssignment,
    boundary_pullback_assignment,
    boundary_strict_assignment,
    curve_intersections,
    depth4_pairing,
    exceptional_assignment,
    formal_curve_intersections,
    formal_divisor,
    half_trace_support,
    principal_relation,
    ray_symbol,
    star_walls,
    wall_relation,
)


def test_wall_relation_coefficients_and_completing_rays():
    at = atlas()
    walls = star_walls()
    w0, w1 = walls["sigma0"], walls["sigma1"]
    assert (w0.alpha, w0.alpha_prime) == (1, 1)
    assert w0.coefficients == (-1,) * 9
    assert w0.u == at.e and w0.u_prime == at.e_prime_wall
    assert (w1.alpha, w1.alpha_prime) == (1, 1)
    assert w1.coefficients == (-1, -1, 0, 0, -1, -1, -1, -1, 0)
    assert w1.u_prime == square(linear_form((1, -1, 0, 0)))


def test_half_trace_annihilates_both_wall_relations():
    for rel in star_walls().values():
        total = rel.alpha * half_trace_prime(rel.u)
        total += rel.alpha_prime * half_trace_prime(rel.u_prime)
        total += sum(
            a * half_trace_prime(v)
            for a, v in zip(rel.coefficients, rel.facet.generators)
        )
        assert total == 0


def test_wall_relation_rejects_degenerate_input():
    at = atlas()
    with pytest.raises(ValueError):
        wall_relation(Cone(4, face_generators(at.sigma0)[:8]), at.e, at.e_prime_wall)
    with pytest.raises(ValueError):
        wall_relation(Cone(4, face_generators(at.sigma0)), at.e, at.e)
    toy = Cone(2, (square(linear_form((1, 0))),))
    with pytest.raises(ValueError):
        wall_relation(toy, square(linear_form((0, 1))), square(linear_form((1, -1))))


def test_curve_intersection_reference_values():
    walls = star_walls()
    w0, w1 = walls["sigma0"], walls["sigma1"]
    assert curve_intersections(w0, boundary_pullback_assignment(w0.rays)) == -1
    assert curve_intersections(w0, exceptional_assignment(w0.rays)) == 2
    assert curve_intersections(w1, boundary_pullback_assignment(w1.rays)) == -1
    assert curve_intersections(w1, exceptional_assignment(w1.rays)) == 1


def test_pullback_decomposes_as_strict_plus_four_exceptional():
    for rel in star_walls().values():
        pullback = boundary_pullback_assignment(rel.rays)
        strict = boundary_strict_assignment(rel.rays)
        exceptional = exceptional_assignment(rel.rays)
        for ray in rel.rays:
            assert pullback.value(ray) == strict.value(ray) + 4 * exceptional.value(ray)
        assert curve_intersections(rel, pullback) == curve_intersections(
            rel, strict
        ) + 4 * curve_intersections(rel, exceptional)


def test_curve_intersections_linear_in_the_assignment():
    rel = star_walls()["sigma0"]
    d4 = boundary_pullback_assignment(rel.rays)
    exc = exceptional_assignment(rel.rays)
    mix = DivisorAssignment(
        "mix",
        {
            r.coords: Fraction(3) * d4.value(r) - Fraction(7, 2) * exc.value(r)
            for r in rel.rays
        },
    )
    assert curve_intersections(rel, mix) == 3 * curve_intersections(
        rel, d4
    ) - Fraction(7, 2) * curve_intersections(rel, exc)
    assert curve_intersections(rel, DivisorAssignment("empty", {})) == 0


def test_depth4_pairing_values_and_unknown_wall():
    assert depth4_pairing(0, 1, 0, "sigma0") == 1
    assert depth4_pairing(0, 2, 1, "sigma0") == 0
    assert depth4_pairing(0, 1, 1, "sigma1") == 0
    assert depth4_pairing(5, 1, 0, "sigma0") == 1
    assert depth4_pairing(0, 7, 3, "sigma0") == 1
    assert depth4_pairing(0, 7, 3, "sigma1") == 4
    with pytest.raises(ValueError):
        depth4_pairing(0, 1, 0, "sigma2")


def test_principal_relation_coefficient_multisets():
    at = atlas()
    walls = star_walls()
    w0, w1 = walls["sigma0"], walls["sigma1"]

    div0 = principal_relation(half_trace_support(w0.rays), w0.rays)
    assert sorted(div0.coefficients.values()) == [1] * 9 + [4, 5]
    assert div0.coefficient(ray_symbol(at.e)) == 4
    assert div0.coefficient(ray_symbol(at.e_prime_wall)) == 5
    assert formal_curve_intersections(w0, div0) == 0

    div1 = principal_relation(half_trace_support(w1.rays), w1.rays)
    assert sorted(div1.coefficients.values()) == [1] * 9 + [2, 4]
    assert div1.coefficient(ray_symbol(w1.u_prime)) == 2
    assert formal_curve_intersections(w1, div1) == 0


def test_principal_relation_requires_values_on_every_ray():
    walls = star_walls()
    psi0 = half_trace_support(walls["sigma0"].rays)
    with pytest.raises(ValueError):
        principal_relation(psi0, walls["sigma1"].rays)


def test_formal_divisor_algebra():
    fd = formal_divisor({"A": 2, "B": Fraction(1, 3)})
    fd2 = fd.plus(formal_divisor({"B": Fraction(-1, 3), "C": 1}))
    assert fd2.coefficient("A") == 2
    assert fd2.coefficient("B") == 0
    assert fd2.coefficient("C") == 1
    assert fd2.support == ("A", "C")
    assert fd.minus(fd).is_zero
    assert fd.times(0).is_zero
    assert fd.times(Fraction(3, 2)).coefficient("B") == Fraction(1, 2)
    assert formal_divisor({"Z": 0}).is_zero


def test_intersection_numbers_invariant_under_ray_stabilizer():
    at = atlas()
    walls = star_walls()
    rng = random.Random(7)
    g1 = at.g1_generators
    for _ in range(8):
        word = [rng.choice(g1) for _ in range(rng.randint(1, 4))]
        m = word[0]
        for w in word[1:]:
            m = m @ w
        for rel in walls.values():
            moved = wall_relation(
                Cone(4, tuple(act(m, v) for v in rel.facet.generators)),
                act(m, rel.u),
                act(m, rel.u_prime),
            )
            assert curve_intersections(
                moved, boundary_pullback_assignment(moved.rays)
            ) == curve_intersections(rel, boundary_pullback_assignment(rel.rays))
            assert curve_intersections(
                moved, exceptional_assignment(moved.rays)
            ) == curve_intersections(rel, exceptional_assignment(rel.rays))
