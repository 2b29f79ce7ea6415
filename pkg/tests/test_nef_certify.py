"""Nef membership, basis conversion, identity audits, and depth bounds."""

from __future__ import annotations

from fractions import Fraction

import pytest

from nefcone.cone_atlas import atlas, cone_by_name, opposite_pairs
from nefcone.cone_engine import gamma_delta, is_face
from nefcone.nef_certify import (
    BASIS_IGUSA,
    BASIS_VORONOI,
    BASIS_VORONOI_D4,
    DepthCase,
    Relation,
    audit_identity,
    canonical_class,
    convert_basis,
    depth_bound,
    depth_case_entry,
    depth_case_from_face,
    divisor_class,
    identities_wire_payload,
    identity_spec,
    is_ample_interior,
    is_nef,
    normalize,
    registered_identities,
    representative_depth_face,
    shipped_identities,
    standard_depth_cases,
)
from nefcone.wall_calculus import depth4_pairing, formal_divisor

DEPTH_TABLE = {
    "string": (3, Fraction(2), Fraction(1, 2)),
    "BFstar": (3, Fraction(1), Fraction(1)),
    "disconnected": (3, Fraction(4, 3), Fraction(3, 4)),
    "four": (4, Fraction(2, 3), Fraction(3, 2)),
    "five": (5, Fraction(1, 2), Fraction(2)),
    "six": (6, Fraction(46, 75), Fraction(75, 46)),
}


# ---------------------------------------------------------------------------
# representative faces


@pytest.mark.parametrize("mu", [3, 4, 5, 6])
def test_representative_faces_are_faces_with_expected_size(mu):
    face = representative_depth_face(mu)
    assert len(face.indices) == mu
    assert bool(is_face(cone_by_name(face.parent), face))


@pytest.mark.parametrize("mu", [3, 4, 5, 6])
def test_gamma_at_least_delta_at_least_two_on_every_ordered_pair(mu):
    face = representative_depth_face(mu)
    for i in range(1, mu + 1):
        for j in range(1, mu + 1):
            if i == j:
                continue
            gd = gamma_delta(face, (i, j))
            assert gd.gamma >= gd.delta >= 2


# ---------------------------------------------------------------------------
# identity audits


def test_registered_identity_names():
    assert registered_identities() == (
        "eliminate_first_stage",
        "elliptic_normal_bundle",
        "m3_normal_bundle",
        "pullback_depth3",
        "restriction_two_components",
        "symmetrised_depth3",
        "symmetrised_depth_mu",
    )


@pytest.mark.parametrize("name", [
    "eliminate_first_stage",
    "elliptic_normal_bundle",
    "m3_normal_bundle",
    "pullback_depth3",
    "restriction_two_components",
    "symmetrised_depth3",
    "symmetrised_depth_mu",
])
def test_identity_residual_vanishes_across_parameters(name):
    for level in (1, 2, 3, 5):
        for mu in (3, 4, 5, 6):
            res = audit_identity(
                name,
                level=level,
                a=Fraction(7, 3),
                b=Fraction(5, 2),
                c=Fraction(1, 3),
                boundary_count=mu,
            )
            assert res.is_zero


@pytest.mark.parametrize("name", [
    "eliminate_first_stage",
    "elliptic_normal_bundle",
    "m3_normal_bundle",
    "pullback_depth3",
    "restriction_two_components",
    "symmetrised_depth3",
    "symmetrised_depth_mu",
])
def test_perturbed_identity_residual_hits_control_symbol(name):
    pert = audit_identity(name, perturbation=1)
    assert not pert.is_zero
    assert pert.coefficient(identity_spec(name).control_symbol) != 0


def test_default_parameters_audit():
    assert audit_identity("restriction_two_components").is_zero
    assert audit_identity("symmetrised_depth_mu", level=4, boundary_count=6).is_zero


def test_symmetrised_depth3_perturbation_lands_on_exceptional():
    res = audit_identity("symmetrised_depth3", perturbation=1)
    assert res.support == ("exceptional",)


def test_unknown_identity_rejected():
    with pytest.raises(ValueError, match="unknown identity"):
        audit_identity("no_such_identity")


def test_normalize_detects_cycles_and_conflicts():
    cyc = [
        Relation("r1", formal_divisor({"p": 1}), formal_divisor({"q": 1})),
        Relation("r2", formal_divisor({"q": 1}), formal_divisor({"p": 1})),
    ]
    with pytest.raises(ValueError, match="substitution cycle detected"):
        normalize(formal_divisor({"p": 1}), cyc)
    self_rule = Relation(
        "r", formal_divisor({"p": 1}), formal_divisor({"p": 1, "q": 2})
    )
    with pytest.raises(ValueError, match="substitution cycle detected"):
        normalize(formal_divisor({"p": 1}), [self_rule])
    with pytest.raises(ValueError, match="conflicting"):
        normalize(formal_divisor({"p": 1}), cyc + [cyc[0]])


def test_shipped_identities_match_live_payload():
    payload = identities_wire_payload()
    assert shipped_identities() == payload
    names = [rec["name"] for rec in payload["identities"]]
    assert len(names) == 13
    assert names.count("symmetrised_depth_mu") == 4


# ---------------------------------------------------------------------------
# depth bounds


def test_standard_depth_bound_table():
    cases = standard_depth_cases()
    for name, (mu, b_coeff, threshold) in DEPTH_TABLE.items():
        bound = depth_bound(mu, cases[name])
        assert bound.b_coefficient == b_coeff
        assert bound.c_coefficient == Fraction(-1)
        assert bound.threshold == threshold
    assert max(row[2] for row in DEPTH_TABLE.values()) == Fraction(2)


def test_three_generator_bounds_validate_against_atlas_faces():
    cases = standard_depth_cases()
    reps = atlas().dim3_representatives
    for name in ("string", "BFstar", "disconnected"):
        bound = depth_bound(3, cases[name], face=reps[name])
        assert bound.b_coefficient == DEPTH_TABLE[name][1]


def test_live_faces_dominate_envelope_cases():
    face4 = representative_depth_face(4)
    live4 = depth_bound(4, depth_case_from_face(face4), face=face4)
    assert live4.boundary_count == 4
    assert live4.b_coefficient >= DEPTH_TABLE["four"][1]
    face5 = representative_depth_face(5)
    live5 = depth_bound(5, depth_case_from_face(face5), face=face5)
    assert live5.b_coefficient >= DEPTH_TABLE["five"][1]


def test_six_generator_face_with_and_without_fibre_pairs():
    face6 = representative_depth_face(6)
    part = opposite_pairs(face6)
    pos = {idx: p + 1 for p, idx in enumerate(face6.indices)}
    flags = []
    for i, j in part.non_opposite:
        flags.append((pos[i], pos[j]))
        flags.append((pos[j], pos[i]))
    assert len(flags) == 24
    flagged = depth_bound(6, depth_case_from_face(face6, fibre_pairs=flags))
    assert flagged.b_coefficient >= DEPTH_TABLE["six"][1]
    unflagged = depth_bound(6, depth_case_from_face(face6))
    assert unflagged.b_coefficient == Fraction(2, 5)


def test_envelope_case_rejected_against_mismatching_face():
    cases = standard_depth_cases()
    face4 = representative_depth_face(4)
    with pytest.raises(ValueError, match="does not match"):
        depth_bound(4, cases["four"], face=face4)


def test_disconnected_live_case_matches_table():
    reps = atlas().dim3_representatives
    pairs = [(i, j) for i in (1, 2, 3) for j in (1, 2, 3) if i != j]
    live = depth_case_from_face(reps["disconnected"], fibre_pairs=pairs)
    assert depth_bound(3, live).b_coefficient == Fraction(4, 3)


def test_depth_case_validation():
    cases = standard_depth_cases()
    with pytest.raises(ValueError):
        depth_bound(4, cases["string"])
    with pytest.raises(ValueError):
        DepthCase(3, (depth_case_entry(5, 2, 2, 2),))
    with pytest.raises(ValueError):
        depth_case_entry(1, 2, 2, 3)
    with pytest.raises(ValueError):
        DepthCase(3, (depth_case_entry(6, 3, 2, 2),))


# ---------------------------------------------------------------------------
# nef membership and basis conversion


def test_reference_divisor_is_nef_with_expected_tight_constraints():
    verdict = is_nef(divisor_class("vor-d4", 24, 2, 1))
    assert bool(verdict)
    tight = tuple(ch.name for ch in verdict.constraints if ch.tight)
    assert tight == ("hodge_versus_boundary", "boundary_versus_exceptional")
    assert verdict.active_constraints == tight


def test_reference_non_nef_divisors():
    assert not bool(is_nef(divisor_class("vor-d4", 12, 1, 1)))
    for level in (1, 2, 3, 7):
        assert not bool(is_nef(divisor_class("vor", 5, 1, 1, level=level)))


def test_canonical_classes():
    assert canonical_class(BASIS_IGUSA).coefficients == (Fraction(5), Fraction(1))
    assert canonical_class(BASIS_VORONOI_D4).coefficients == (
        Fraction(5), Fraction(1), Fraction(-3),
    )
    assert canonical_class(BASIS_VORONOI).coefficients == (
        Fraction(5), Fraction(1), Fraction(1),
    )
    assert (
        convert_basis(canonical_class("vor-d4"), "vor").coefficients
        == canonical_class("vor").coefficients
    )
    for level in (1, 2, 3, 4, 11):
        assert bool(is_nef(canonical_class("igu", level=level))) == (level >= 3)
    for level in (1, 2, 3):
        assert not bool(is_nef(canonical_class("vor-d4", level=level)))


def test_ample_interior():
    assert is_ample_interior(divisor_class("igu", 5, 1, level=3))
    assert not is_ample_interior(divisor_class("igu", 5, 1, level=2))
    assert not is_ample_interior(divisor_class("igu", 12, 1, level=1))
    with pytest.raises(ValueError):
        is_ample_interior(divisor_class("vor", 5, 1, 1))


def test_basis_conversion_round_trip():
    d = divisor_class("vor-d4", 24, 2, 1)
    d2 = convert_basis(d, "vor")
    assert d2.coefficients == (Fraction(24), Fraction(2), Fraction(9))
    assert convert_basis(d2, "vor-d4") == d
    with pytest.raises(ValueError):
        convert_basis(d, "igu")


def test_divisor_class_validation():
    with pytest.raises(ValueError):
        divisor_class("humbert", 1, 1, 1)
    with pytest.raises(ValueError):
        divisor_class("igu", 1, 1, 1)
    with pytest.raises(ValueError):
        divisor_class("vor", 1, 1)


def test_nef_region_grid_properties():
    cases = standard_depth_cases()
    values = [
        Fraction(0), Fraction(1), Fraction(2), Fraction(5),
        Fraction(-1), Fraction(1, 2), Fraction(12), Fraction(24),
    ]
    for a in values:
        for b in values:
            for c in values:
                d = divisor_class(BASIS_VORONOI_D4, a, b, c, level=2)
                nef = bool(is_nef(d))
                assert nef == bool(is_nef(d.scaled(Fraction(7, 3))))
                assert nef == bool(is_nef(convert_basis(d, BASIS_VORONOI)))
                if nef:
                    assert depth4_pairing(a, b, c, "sigma0") >= 0
                    assert depth4_pairing(a, b, c, "sigma1") >= 0
                    for name, (mu, _, _) in DEPTH_TABLE.items():
                        assert depth_bound(mu, cases[name]).holds(b, c)
