"""Nef certificates for divisor classes on the two toroidal models of level n.

A divisor class is recorded by its coefficients against a named basis:

* ``igusa``       -- (hodge, boundary) on the blown-up model,
* ``voronoi-d4``  -- (hodge, boundary, exceptional) with the boundary taken as
  the full degree-four divisor class,
* ``voronoi``     -- (hodge, boundary, exceptional) with the boundary taken as
  the sum of the irreducible branches only.

Throughout, the class with coefficients (a, b, c) means

    a * (hodge class)  -  b * (boundary)  -  c * (exceptional) ,

so nef classes have small boundary coefficients relative to a.  ``is_nef``
evaluates the exact linear inequalities cutting out the nef cone in each basis
and reports every constraint with its margin.

The second half of the module certifies the identities that feed those
inequalities.  Each registered identity packages a target combination of
formal divisor symbols together with oriented rewrite relations; substituting
the relations into the target must leave the zero divisor.  ``audit_identity``
performs the reduction (optionally after a deliberate perturbation, which must
leave a visible residual), and ``depth_bound`` turns the projection invariants
of a rank-three face into the linear inequality in (b, c) that the face
imposes on nef classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .cone_atlas import FaceLabel, atlas, cone_by_name, face_generators
from .cone_engine import gamma_delta, is_face, psi3, support_eval
from .lattice_forms import LinearForm, Rat, _rank, linear_root, project
from .wall_calculus import FormalDivisor, formal_divisor

__all__ = [
    "BASIS_IGUSA",
    "BASIS_VORONOI_D4",
    "BASIS_VORONOI",
    "DivisorClass",
    "divisor_class",
    "ConstraintCheck",
    "NefVerdict",
    "is_nef",
    "convert_basis",
    "canonical_class",
    "is_ample_interior",
    "Relation",
    "IdentitySpec",
    "normalize",
    "identity_spec",
    "audit_identity",
    "registered_identities",
    "representative_depth_face",
    "DepthCaseEntry",
    "DepthCase",
    "DepthBound",
    "depth_case_from_face",
    "standard_depth_cases",
    "depth_bound",
    "identities_wire_payload",
    "shipped_identities",
]


# ---------------------------------------------------------------------------
# divisor classes


BASIS_IGUSA = "igusa"
BASIS_VORONOI_D4 = "voronoi-d4"
BASIS_VORONOI = "voronoi"

_BASES = (BASIS_IGUSA, BASIS_VORONOI_D4, BASIS_VORONOI)

_BASIS_ALIASES = {
    BASIS_IGUSA: BASIS_IGUSA,
    "igu": BASIS_IGUSA,
    BASIS_VORONOI_D4: BASIS_VORONOI_D4,
    "vor-d4": BASIS_VORONOI_D4,
    "vor_d4": BASIS_VORONOI_D4,
    BASIS_VORONOI: BASIS_VORONOI,
    "vor": BASIS_VORONOI,
}


def _canonical_basis(basis: str) -> str:
    key = basis.strip().lower()
    if key not in _BASIS_ALIASES:
        raise ValueError(
            f"unknown basis {basis!r}; classes outside the span of the three "
            f"named bases {_BASES} are not accepted"
        )
    return _BASIS_ALIASES[key]


@dataclass(frozen=True)
class DivisorClass:
    """Coefficients (a, b, c) of a * hodge - b * boundary - c * exceptional.

    ``c`` is None exactly in the ``igusa`` basis, whose model has no separate
    exceptional class.  ``level`` is the level n of the underlying family.
    """

    basis: str
    a: Fraction
    b: Fraction
    c: Fraction | None
    level: int = 1

    def __post_init__(self) -> None:
        if self.basis not in _BASES:
            raise ValueError(f"unknown basis {self.basis!r}")
        if (self.c is None) != (self.basis == BASIS_IGUSA):
            raise ValueError(
                "the igusa basis takes exactly two coefficients and the "
                "voronoi bases exactly three"
            )
        if not isinstance(self.level, int) or self.level < 1:
            raise ValueError("level must be a positive integer")

    def scaled(self, factor: Rat) -> "DivisorClass":
        """The same ray, rescaled by a positive rational factor."""
        f = Fraction(factor)
        if f <= 0:
            raise ValueError("scaling factor must be positive")
        c = None if self.c is None else f * self.c
        return DivisorClass(self.basis, f * self.a, f * self.b, c, self.level)

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        if self.c is None:
            return (self.a, self.b)
        return (self.a, self.b, self.c)


def divisor_class(
    basis: str,
    a: Rat | str,
    b: Rat | str,
    c: Rat | str | None = None,
    *,
    level: int = 1,
) -> DivisorClass:
    """Build a divisor class with exact rational coefficients."""
    name = _canonical_basis(basis)
    cc = None if c is None else Fraction(c)
    return DivisorClass(name, Fraction(a), Fraction(b), cc, level)


# ---------------------------------------------------------------------------
# nef membership


@dataclass(frozen=True)
class ConstraintCheck:
    """One facet inequality of the nef cone, evaluated exactly.

    ``margin`` is the slack (nonnegative iff the constraint holds), ``tight``
    marks exact equality, and ``active`` marks margins at most the reporting
    tolerance (tight, nearly tight, or violated).
    """

    name: str
    margin: Fraction
    satisfied: bool
    tight: bool
    active: bool


@dataclass(frozen=True)
class NefVerdict:
    nef: bool
    constraints: tuple[ConstraintCheck, ...]

    def __bool__(self) -> bool:
        return self.nef

    @property
    def active_constraints(self) -> tuple[str, ...]:
        return tuple(ch.name for ch in self.constraints if ch.active)


def _nef_margins(d: DivisorClass) -> tuple[tuple[str, Fraction], ...]:
    n = d.level
    if d.basis == BASIS_IGUSA:
        return (
            ("boundary_coefficient_nonnegative", d.b),
            ("hodge_versus_boundary", d.a - Fraction(12, n) * d.b),
        )
    assert d.c is not None
    if d.basis == BASIS_VORONOI_D4:
        return (
            ("hodge_versus_boundary", d.a - Fraction(12, n) * d.b),
            ("boundary_versus_exceptional", d.b - 2 * d.c),
            ("exceptional_nonnegative", d.c),
        )
    assert d.basis == BASIS_VORONOI
    return (
        ("boundary_coefficient_nonnegative", d.b),
        ("hodge_versus_boundary", d.a - Fraction(12, n) * d.b),
        ("exceptional_versus_boundary", d.c - 4 * d.b),
        ("boundary_versus_exceptional", 4 * d.b - Fraction(8, 9) * d.c),
    )


def is_nef(d: DivisorClass, *, epsilon: Rat = Fraction(1, 100)) -> NefVerdict:
    """Exact nef test, with a per-constraint margin report.

    ``epsilon`` only controls which satisfied constraints are flagged as
    active in the report; the verdict itself never depends on it.
    """
    eps = Fraction(epsilon)
    if eps < 0:
        raise ValueError("reporting tolerance must be nonnegative")
    checks = []
    for name, margin in _nef_margins(d):
        checks.append(
            ConstraintCheck(
                name=name,
                margin=margin,
                satisfied=margin >= 0,
                tight=margin == 0,
                active=margin <= eps,
            )
        )
    return NefVerdict(all(ch.satisfied for ch in checks), tuple(checks))


def convert_basis(d: DivisorClass, basis: str) -> DivisorClass:
    """Rewrite a class between the two voronoi bases.

    The boundary class of ``voronoi-d4`` equals the branch sum plus four times
    the exceptional class, so (a, b, c) maps to (a, b, 4 b + c) and back.  No
    exact conversion relates the igusa basis to the voronoi ones: the models
    differ by more than a change of basis, and such requests raise ValueError.
    """
    target = _canonical_basis(basis)
    if target == d.basis:
        return d
    if BASIS_IGUSA in (target, d.basis):
        raise ValueError(
            "no exact conversion between the igusa and voronoi bases"
        )
    assert d.c is not None
    if d.basis == BASIS_VORONOI_D4 and target == BASIS_VORONOI:
        return DivisorClass(target, d.a, d.b, 4 * d.b + d.c, d.level)
    assert d.basis == BASIS_VORONOI and target == BASIS_VORONOI_D4
    return DivisorClass(target, d.a, d.b, d.c - 4 * d.b, d.level)


def canonical_class(basis: str, *, level: int = 1) -> DivisorClass:
    """The canonical class in the requested basis."""
    name = _canonical_basis(basis)
    if name == BASIS_IGUSA:
        return divisor_class(name, 5, 1, level=level)
    if name == BASIS_VORONOI_D4:
        return divisor_class(name, 5, 1, -3, level=level)
    return divisor_class(name, 5, 1, 1, level=level)


def is_ample_interior(d: DivisorClass) -> bool:
    """Strict version of the nef inequalities, on the igusa model only.

    There the nef cone is the closure of the ample cone away from the
    boundary strata, so interior classes are exactly the strictly nef ones.
    """
    if d.basis != BASIS_IGUSA:
        raise ValueError("the interior ampleness test applies to the igusa basis only")
    return all(margin > 0 for _, margin in _nef_margins(d))


# ---------------------------------------------------------------------------
# formal identities


@dataclass(frozen=True)
class Relation:
    """An oriented rewrite rule between formal divisors.

    The left side must be a single symbol with coefficient one; normalizing a
    divisor replaces every occurrence of that symbol by the right side.
    ``note`` records in words what the relation expresses.
    """

    name: str
    left: FormalDivisor
    right: FormalDivisor
    note: str = ""

    def __post_init__(self) -> None:
        if len(self.left.support) != 1:
            raise ValueError("relation left side must be a single symbol")
        head = self.left.support[0]
        if self.left.coefficient(head) != 1:
            raise ValueError("relation left side must have coefficient one")

    @property
    def head(self) -> str:
        return self.left.support[0]


def normalize(divisor: FormalDivisor, relations: Sequence[Relation]) -> FormalDivisor:
    """Substitute the relations into the divisor until none applies.

    Each pass rewrites every ruled symbol simultaneously.  An acyclic rule set
    stabilizes within one pass per rule; if the divisor still contains ruled
    symbols after that many passes the rules feed back into themselves.
    """
    rules: dict[str, FormalDivisor] = {}
    for rel in relations:
        if rel.head in rules:
            raise ValueError(f"conflicting relations for symbol {rel.head!r}")
        rules[rel.head] = rel.right
    current = divisor
    for _ in range(len(rules) + 1):
        if not any(s in rules for s in current.support):
            return current
        updated: dict[str, Fraction] = {}
        for symbol in current.support:
            coeff = current.coefficient(symbol)
            replacement = rules.get(symbol)
            if replacement is None:
                updated[symbol] = updated.get(symbol, Fraction(0)) + coeff
                continue
            for sym2, coeff2 in replacement.coefficients.items():
                updated[sym2] = updated.get(sym2, Fraction(0)) + coeff * coeff2
        current = formal_divisor(updated)
    raise ValueError("substitution cycle detected")


@dataclass(frozen=True)
class IdentitySpec:
    """A certified identity: target, rewrite relations, and a control symbol.

    Normalizing ``target`` by ``relations`` must give zero; adding the control
    symbol to the target first must leave a nonzero residual, which guards the
    audit against vacuous vocabularies.
    """

    name: str
    target: FormalDivisor
    relations: tuple[Relation, ...]
    vocabulary: frozenset[str]
    control_symbol: str

    def __post_init__(self) -> None:
        used = set(self.target.support)
        for rel in self.relations:
            used.update(rel.left.support)
            used.update(rel.right.support)
        unknown = used - self.vocabulary
        if unknown:
            raise ValueError(f"symbols outside the declared vocabulary: {sorted(unknown)}")
        if self.control_symbol not in self.vocabulary:
            raise ValueError("control symbol outside the declared vocabulary")


# symbol builders ------------------------------------------------------------


def _branch(i: int) -> str:
    return f"branch[{i}]"


def _moduli_pull(i: int, j: int) -> str:
    return f"moduli_pull[{i},{j}]"


def _stage_pull(a: int, k: int) -> str:
    return f"stage_pull[{a},{k}]"


def _base_pull(a: int, k: int) -> str:
    return f"base_pull[{a},{k}]"


def _base_near(a: int, k: int) -> str:
    return f"base_pull_near[{a},{k}]"


def _base_far(a: int, k: int) -> str:
    return f"base_pull_far[{a},{k}]"


def _stage_rest(a: int) -> str:
    return f"stage_rest[{a}]"


# representative faces and projection classes --------------------------------


_DEPTH_FACE_INDICES = {4: (0, 1, 2, 4), 5: (0, 1, 2, 4, 6)}

_DEPTH_FACES: dict[int, FaceLabel] = {}


def representative_depth_face(boundary_count: int) -> FaceLabel:
    """A face of the big simplicial cone whose generator lines span rank
    three and number ``boundary_count``; one representative per count."""
    if boundary_count not in (3, 4, 5, 6):
        raise ValueError("boundary count must be between 3 and 6")
    face = _DEPTH_FACES.get(boundary_count)
    if face is not None:
        return face
    table = atlas()
    if boundary_count == 3:
        face = table.dim3_representatives["string"]
    elif boundary_count == 6:
        face = table.mu6_face
    else:
        face = FaceLabel("pi2_4", _DEPTH_FACE_INDICES[boundary_count])
    assert is_face(cone_by_name(face.parent), face)
    lines = [linear_root(g) for g in face_generators(face)]
    assert _line_rank(lines) == 3
    _DEPTH_FACES[boundary_count] = face
    return face


def _line_rank(lines: Sequence[LinearForm]) -> int:
    return _rank([[Fraction(x) for x in l.coeffs] for l in lines])


def _hit_classes(lines: Sequence[LinearForm]) -> tuple[dict[int, int], ...]:
    """Per 1-based generator position a, the partition of the other positions
    into planes through the a-th line, as {smallest member: multiplicity}.

    Two positions j, j' land in the same class iff the three lines a, j, j'
    stay inside a rank-two subspace.
    """
    mu = len(lines)
    out: list[dict[int, int]] = []
    for a in range(1, mu + 1):
        classes: list[list[int]] = []
        for j in range(1, mu + 1):
            if j == a:
                continue
            for members in classes:
                if _line_rank([lines[a - 1], lines[members[0] - 1], lines[j - 1]]) <= 2:
                    members.append(j)
                    break
            else:
                classes.append([j])
        out.append({members[0]: len(members) for members in classes})
    return tuple(out)


def _depth_hit_classes(boundary_count: int) -> tuple[dict[int, int], ...]:
    face = representative_depth_face(boundary_count)
    lines = [linear_root(g) for g in face_generators(face)]
    return _hit_classes(lines)


# identity builders -----------------------------------------------------------


def _m3_normal_bundle(n: int, a: Fraction, b: Fraction) -> IdentitySpec:
    hodge = "hodge"
    target = formal_divisor({hodge: a, "boundary_self_restriction": -b}).minus(
        formal_divisor({hodge: a - b / n, "moduli_boundary": Fraction(b, n)})
    )
    relations = (
        Relation(
            "self_restriction_to_normal",
            formal_divisor({"boundary_self_restriction": 1}),
            formal_divisor({"normal_class": 1}),
            note="restricting the deepest boundary divisor to itself gives its normal class",
        ),
        Relation(
            "moduli_boundary_degree",
            formal_divisor({"moduli_boundary": 1}),
            formal_divisor({"normal_class": -n, hodge: 1}),
            note="the boundary of the modular family restricts to the hodge "
            "class minus the level times the normal class",
        ),
    )
    return IdentitySpec(
        name="m3_normal_bundle",
        target=target,
        relations=relations,
        vocabulary=frozenset(
            {hodge, "boundary_self_restriction", "normal_class", "moduli_boundary"}
        ),
        control_symbol=hodge,
    )


def _pullback_depth3() -> IdentitySpec:
    multiplicity = support_eval(psi3(), project(atlas().e, 1))
    target = formal_divisor(
        {"stage_pullback": 1, "branch_rest": -1, "exceptional_sum": -4}
    )
    relations = (
        Relation(
            "stage_pullback_branches",
            formal_divisor({"stage_pullback": 1}),
            formal_divisor({"branch_rest": 1, "exceptional_sum": multiplicity}),
            note="pulling the depth-one boundary back to the deepest stratum "
            "spreads it over the outside branches plus the exceptional "
            "divisors, each weighted by the support function of the core "
            "form in three variables",
        ),
    )
    return IdentitySpec(
        name="pullback_depth3",
        target=target,
        relations=relations,
        vocabulary=frozenset({"stage_pullback", "branch_rest", "exceptional_sum"}),
        control_symbol="exceptional_sum",
    )


def _restriction_two_components(
    n: int, a: Fraction, b: Fraction, c: Fraction
) -> IdentitySpec:
    hodge = "hodge"
    pairs = ((1, 2), (2, 1))
    lhs = formal_divisor({hodge: a, "boundary_total": -b, "exceptional": -c})
    rhs: dict[str, Fraction] = {
        hodge: a - 2 * b / n,
        "branch_rest": Fraction(b),
        "exceptional": 4 * b - c,
    }
    for i, j in pairs:
        rhs[_moduli_pull(i, j)] = Fraction(b, n)
        rhs[_base_pull(i, j)] = -Fraction(b)
    target = lhs.minus(formal_divisor(rhs))
    relations = [
        Relation(
            "boundary_decomposition",
            formal_divisor({"boundary_total": 1}),
            formal_divisor(
                {
                    _branch(1): 1,
                    _branch(2): 1,
                    "branch_rest": 1,
                    "exceptional": 4,
                }
            ),
            note="the degree-four boundary splits into its branches plus four "
            "times the exceptional class",
        ),
    ]
    for i, j in pairs:
        relations.append(
            Relation(
                f"moduli_pull_degree[{i},{j}]",
                formal_divisor({_moduli_pull(i, j): 1}),
                formal_divisor(
                    {
                        _branch(j): -n,
                        hodge: 1,
                        _base_pull(i, j): n,
                        "branch_rest": -n,
                        "exceptional": -4 * n,
                    }
                ),
                note="restricting the modular bundle pulled through one branch "
                "to the double stratum",
            )
        )
    vocabulary = {hodge, "boundary_total", "branch_rest", "exceptional"}
    vocabulary.update(_branch(i) for i in (1, 2))
    vocabulary.update(_moduli_pull(i, j) for i, j in pairs)
    vocabulary.update(_base_pull(i, j) for i, j in pairs)
    return IdentitySpec(
        name="restriction_two_components",
        target=target,
        relations=tuple(relations),
        vocabulary=frozenset(vocabulary),
        control_symbol="exceptional",
    )


def _symmetrised_depth3(n: int) -> IdentitySpec:
    hodge = "hodge"
    pairs = tuple((i, j) for i in (1, 2, 3) for j in (1, 2, 3) if i != j)
    rhs: dict[str, Fraction] = {
        hodge: Fraction(-6, n),
        "branch_rest": Fraction(2),
        "exceptional": Fraction(8),
    }
    for i, j in pairs:
        rhs[_moduli_pull(i, j)] = Fraction(1, n)
        rhs[_base_pull(i, j)] = Fraction(-1)
    target = formal_divisor({"boundary_total": -4}).minus(formal_divisor(rhs))
    relations = [
        Relation(
            "boundary_decomposition",
            formal_divisor({"boundary_total": 1}),
            formal_divisor(
                {
                    _branch(1): 1,
                    _branch(2): 1,
                    _branch(3): 1,
                    "branch_rest": 1,
                    "exceptional": 4,
                }
            ),
            note="the degree-four boundary splits into its branches plus four "
            "times the exceptional class",
        ),
    ]
    for i, j in pairs:
        (k,) = [m for m in (1, 2, 3) if m not in (i, j)]
        relations.append(
            Relation(
                f"moduli_pull_degree[{i},{j}]",
                formal_divisor({_moduli_pull(i, j): 1}),
                formal_divisor(
                    {
                        _branch(j): -n,
                        _branch(k): -n,
                        hodge: 1,
                        _base_pull(i, j): n,
                        "branch_rest": -n,
                        "exceptional": -4 * n,
                    }
                ),
                note="restricting the modular bundle pulled through one branch "
                "to the triple stratum",
            )
        )
    vocabulary = {hodge, "boundary_total", "branch_rest", "exceptional"}
    vocabulary.update(_branch(i) for i in (1, 2, 3))
    vocabulary.update(_moduli_pull(i, j) for i, j in pairs)
    vocabulary.update(_base_pull(i, j) for i, j in pairs)
    return IdentitySpec(
        name="symmetrised_depth3",
        target=target,
        relations=tuple(relations),
        vocabulary=frozenset(vocabulary),
        control_symbol="exceptional",
    )


def _symmetrised_depth_mu(mu: int) -> IdentitySpec:
    classes = _depth_hit_classes(mu)
    weight = math.factorial(mu - 2)
    rhs: dict[str, Fraction] = {
        "branch_rest": Fraction(math.factorial(mu - 1)),
        "exceptional": Fraction(4 * math.factorial(mu - 1)),
    }
    for a in range(1, mu + 1):
        for k, mult in classes[a - 1].items():
            rhs[_stage_pull(a, k)] = Fraction(-weight * mult)
            rhs[_base_pull(a, k)] = Fraction(-weight * mult)
    target = formal_divisor(
        {"boundary_total": -(mu - 1) * math.factorial(mu - 1)}
    ).minus(formal_divisor(rhs))
    relations = [
        Relation(
            "boundary_decomposition",
            formal_divisor({"boundary_total": 1}),
            formal_divisor(
                {
                    **{_branch(i): Fraction(1) for i in range(1, mu + 1)},
                    "branch_rest": Fraction(1),
                    "exceptional": Fraction(4),
                }
            ),
            note="the degree-four boundary splits into its branches plus four "
            "times the exceptional class",
        ),
    ]
    for a in range(1, mu + 1):
        for k in classes[a - 1]:
            relations.append(
                Relation(
                    f"stage_pull_decomposition[{a},{k}]",
                    formal_divisor({_stage_pull(a, k): 1}),
                    formal_divisor(
                        {
                            **{
                                _branch(l): Fraction(1)
                                for l in range(1, mu + 1)
                                if l != a
                            },
                            _base_pull(a, k): Fraction(-1),
                            "branch_rest": Fraction(1),
                            "exceptional": Fraction(4),
                        }
                    ),
                    note="the second-stage pull through one branch covers the "
                    "other branches and subtracts the base pull of its plane",
                )
            )
    vocabulary = {"boundary_total", "branch_rest", "exceptional"}
    vocabulary.update(_branch(i) for i in range(1, mu + 1))
    for a in range(1, mu + 1):
        for k in classes[a - 1]:
            vocabulary.add(_stage_pull(a, k))
            vocabulary.add(_base_pull(a, k))
    return IdentitySpec(
        name="symmetrised_depth_mu",
        target=target,
        relations=tuple(relations),
        vocabulary=frozenset(vocabulary),
        control_symbol="exceptional",
    )


def _eliminate_first_stage(mu: int, b: Fraction, c: Fraction) -> IdentitySpec:
    classes = _depth_hit_classes(mu)
    weight = math.factorial(mu - 2)
    c1 = b / ((mu - 1) * math.factorial(mu))
    c2 = b / ((mu - 1) * math.factorial(mu - 1))
    shared = {
        "branch_rest": b / (mu - 1),
        "exceptional": 4 * b / (mu - 1) - c,
    }
    first: dict[str, Fraction] = {"nef_stage_one": Fraction(1), **shared}
    second: dict[str, Fraction] = {"nef_stage_two": Fraction(1), **shared}
    absorbed: dict[str, Fraction] = {"nef_stage_one": Fraction(1)}
    for a in range(1, mu + 1):
        kappa = len(classes[a - 1])
        second[_stage_rest(a)] = weight * (mu - 1) * c2 / (kappa - 1)
        for k, mult in classes[a - 1].items():
            first[_base_pull(a, k)] = -c1 * weight * mult
            first[_stage_pull(a, k)] = -c2 * weight * mult
            second[_base_far(a, k)] = -(c1 + c2 / (kappa - 1)) * weight * mult
            absorbed[_base_near(a, k)] = -(c1 + c2 / (kappa - 1)) * weight * mult
    target = formal_divisor(first).minus(formal_divisor(second))
    relations = [
        Relation(
            "second_stage_absorption",
            formal_divisor({"nef_stage_two": 1}),
            formal_divisor(absorbed),
            note="the second reduction stage absorbs the near parts of the "
            "base pulls into the first stage",
        ),
    ]
    for a in range(1, mu + 1):
        kappa = len(classes[a - 1])
        for k in classes[a - 1]:
            replacement = {
                _base_pull(a, k): Fraction(1, kappa - 1),
                _stage_rest(a): Fraction(-1, kappa - 1),
                _base_near(a, k): Fraction(-1),
            }
            for k2 in classes[a - 1]:
                if k2 != k:
                    replacement[_base_near(a, k2)] = replacement.get(
                        _base_near(a, k2), Fraction(0)
                    ) + Fraction(1, kappa - 1)
            relations.append(
                Relation(
                    f"stage_pull_elimination[{a},{k}]",
                    formal_divisor({_stage_pull(a, k): 1}),
                    formal_divisor(replacement),
                    note="eliminating the second-stage pull against the base "
                    "pulls of the other planes through the same branch",
                )
            )
            relations.append(
                Relation(
                    f"base_pull_split[{a},{k}]",
                    formal_divisor({_base_pull(a, k): 1}),
                    formal_divisor({_base_near(a, k): 1, _base_far(a, k): 1}),
                    note="the base pull splits into the components over the "
                    "distinguished image ray and the rest",
                )
            )
    for a in range(1, mu + 1):
        kappa = len(classes[a - 1])
        coeffs = {
            k: Fraction(mu - 1 - kappa * mult, kappa - 1)
            for k, mult in classes[a - 1].items()
        }
        if all(v == 0 for v in coeffs.values()):
            continue
        head = next(k for k in sorted(coeffs) if coeffs[k] != 0)
        replacement = {
            _base_near(a, k): -coeffs[k] / coeffs[head]
            for k in sorted(coeffs)
            if k != head and coeffs[k] != 0
        }
        relations.append(
            Relation(
                f"telescope[{a}]",
                formal_divisor({_base_near(a, head): 1}),
                formal_divisor(replacement),
                note="planes through one branch hit the distinguished image "
                "ray with equal total weight, so the unbalanced combination "
                "of near parts collapses",
            )
        )
    vocabulary = {"nef_stage_one", "nef_stage_two", "branch_rest", "exceptional"}
    for a in range(1, mu + 1):
        vocabulary.add(_stage_rest(a))
        for k in classes[a - 1]:
            vocabulary.update(
                {_stage_pull(a, k), _base_pull(a, k), _base_near(a, k), _base_far(a, k)}
            )
    return IdentitySpec(
        name="eliminate_first_stage",
        target=target,
        relations=tuple(relations),
        vocabulary=frozenset(vocabulary),
        control_symbol="exceptional",
    )


def _elliptic_normal_bundle(n: int) -> IdentitySpec:
    target = formal_divisor(
        {
            "normal_surface": 1,
            "section_sum": Fraction(-2, n),
            "cusp_sum": Fraction(-1, 6),
        }
    )
    relations = (
        Relation(
            "normal_surface_decomposition",
            formal_divisor({"normal_surface": 1}),
            formal_divisor(
                {"modular_line": Fraction(2, n), "section_sum": Fraction(2, n)}
            ),
            note="the normal class of the elliptic surface splits over the "
            "modular line bundle and the sections",
        ),
        Relation(
            "modular_line_degree",
            formal_divisor({"modular_line": 1}),
            formal_divisor({"cusp_sum": Fraction(n, 12)}),
            note="the modular line bundle has degree level over twelve on the "
            "cusp sum",
        ),
    )
    return IdentitySpec(
        name="elliptic_normal_bundle",
        target=target,
        relations=relations,
        vocabulary=frozenset(
            {"normal_surface", "section_sum", "cusp_sum", "modular_line"}
        ),
        control_symbol="cusp_sum",
    )


_IDENTITY_NAMES = (
    "eliminate_first_stage",
    "elliptic_normal_bundle",
    "m3_normal_bundle",
    "pullback_depth3",
    "restriction_two_components",
    "symmetrised_depth3",
    "symmetrised_depth_mu",
)


def registered_identities() -> tuple[str, ...]:
    """Names of the identities the auditor knows, alphabetically."""
    return _IDENTITY_NAMES


def identity_spec(
    name: str,
    *,
    level: int = 1,
    a: Rat | str = 24,
    b: Rat | str = 2,
    c: Rat | str = 1,
    boundary_count: int = 3,
) -> IdentitySpec:
    """Build a registered identity at the given parameters.

    ``level`` is the level n; (a, b, c) feed the identities that track an
    explicit divisor class; ``boundary_count`` picks the representative face
    for the identities parameterized by the number of branches.
    """
    if not isinstance(level, int) or level < 1:
        raise ValueError("level must be a positive integer")
    if boundary_count not in (3, 4, 5, 6):
        raise ValueError("boundary count must be between 3 and 6")
    aa, bb, cc = Fraction(a), Fraction(b), Fraction(c)
    builders: Mapping[str, Callable[[], IdentitySpec]] = {
        "m3_normal_bundle": lambda: _m3_normal_bundle(level, aa, bb),
        "pullback_depth3": _pullback_depth3,
        "restriction_two_components": lambda: _restriction_two_components(
            level, aa, bb, cc
        ),
        "symmetrised_depth3": lambda: _symmetrised_depth3(level),
        "symmetrised_depth_mu": lambda: _symmetrised_depth_mu(boundary_count),
        "eliminate_first_stage": lambda: _eliminate_first_stage(
            boundary_count, bb, cc
        ),
        "elliptic_normal_bundle": lambda: _elliptic_normal_bundle(level),
    }
    if name not in builders:
        raise ValueError(f"unknown identity {name!r}")
    return builders[name]()


def audit_identity(
    name: str,
    *,
    level: int = 1,
    a: Rat | str = 24,
    b: Rat | str = 2,
    c: Rat | str = 1,
    boundary_count: int = 3,
    perturbation: Rat = 0,
) -> FormalDivisor:
    """Reduce a registered identity to its residual divisor.

    The residual is zero exactly when the identity holds; a nonzero
    ``perturbation`` adds that multiple of the identity's control symbol to
    the target first, and must surface in the residual.
    """
    spec = identity_spec(
        name, level=level, a=a, b=b, c=c, boundary_count=boundary_count
    )
    target = spec.target
    shift = Fraction(perturbation)
    if shift != 0:
        target = target.plus(formal_divisor({spec.control_symbol: shift}))
    return normalize(target, spec.relations)


# ---------------------------------------------------------------------------
# depth bounds


@dataclass(frozen=True)
class DepthCaseEntry:
    """A batch of ordered generator pairs sharing the same invariants.

    ``ordered_pairs`` counts the pairs, ``k_size`` the planes through the
    first generator, and (gamma, delta) the two projection invariants.
    ``fibre_bonus`` marks pairs whose distinguished image ray cannot carry a
    section, which strengthens the bound along the fibre direction.
    """

    ordered_pairs: int
    k_size: int
    gamma: Fraction
    delta: Fraction
    fibre_bonus: bool = False

    def __post_init__(self) -> None:
        if self.ordered_pairs < 1:
            raise ValueError("each entry must cover at least one ordered pair")
        if self.k_size not in (2, 3):
            raise ValueError("plane count through a generator is two or three")
        if not self.gamma >= self.delta >= 2:
            raise ValueError("invariants must satisfy gamma >= delta >= 2")


def depth_case_entry(
    ordered_pairs: int,
    k_size: int,
    gamma: Rat,
    delta: Rat,
    *,
    fibre_bonus: bool = False,
) -> DepthCaseEntry:
    return DepthCaseEntry(
        ordered_pairs, k_size, Fraction(gamma), Fraction(delta), fibre_bonus
    )


@dataclass(frozen=True)
class DepthCase:
    """Projection data of one rank-three face with ``boundary_count``
    generators: every ordered pair of generators appears in some entry."""

    boundary_count: int
    entries: tuple[DepthCaseEntry, ...]

    def __post_init__(self) -> None:
        mu = self.boundary_count
        if mu not in (3, 4, 5, 6):
            raise ValueError("boundary count must be between 3 and 6")
        total = sum(e.ordered_pairs for e in self.entries)
        if total != mu * (mu - 1):
            raise ValueError(
                f"entries cover {total} ordered pairs, expected {mu * (mu - 1)}"
            )
        for e in self.entries:
            if mu == 3 and e.k_size != 2:
                raise ValueError("three lines in rank three span two planes each")
            if mu == 6 and e.k_size != 3:
                raise ValueError("the six-line face has three planes through each line")


@dataclass(frozen=True)
class DepthBound:
    """The inequality  b_coefficient * b + c_coefficient * c >= 0  that one
    depth case imposes on a nef class written against the voronoi-d4 basis.

    ``threshold`` is the least admissible ratio b : c for positive c, when the
    inequality constrains it at all.
    """

    boundary_count: int
    b_coefficient: Fraction
    c_coefficient: Fraction
    threshold: Fraction | None

    def evaluate(self, b: Rat, c: Rat) -> Fraction:
        return self.b_coefficient * Fraction(b) + self.c_coefficient * Fraction(c)

    def holds(self, b: Rat, c: Rat) -> bool:
        return self.evaluate(b, c) >= 0


def _case_signature(case: DepthCase) -> dict[tuple[Fraction, Fraction, int], int]:
    signature: dict[tuple[Fraction, Fraction, int], int] = {}
    for e in case.entries:
        key = (e.gamma, e.delta, e.k_size)
        signature[key] = signature.get(key, 0) + e.ordered_pairs
    return signature


def depth_case_from_face(
    face: FaceLabel, *, fibre_pairs: Sequence[tuple[int, int]] = ()
) -> DepthCase:
    """Collect the projection invariants of every ordered generator pair.

    ``fibre_pairs`` lists the ordered pairs (1-based positions) to flag for
    the fibre bonus; flags are never inferred from the face itself.
    """
    gens = face_generators(face)
    mu = len(gens)
    flagged = set()
    for pair in fibre_pairs:
        i, j = pair
        if not (1 <= i <= mu and 1 <= j <= mu and i != j):
            raise ValueError(f"invalid ordered pair {pair!r}")
        flagged.add((i, j))
    grouped: dict[tuple[Fraction, Fraction, int, bool], int] = {}
    for i in range(1, mu + 1):
        for j in range(1, mu + 1):
            if i == j:
                continue
            gd = gamma_delta(face, (i, j))
            key = (gd.gamma, gd.delta, gd.k_size, (i, j) in flagged)
            grouped[key] = grouped.get(key, 0) + 1
    entries = tuple(
        DepthCaseEntry(count, k_size, gamma, delta, bonus)
        for (gamma, delta, k_size, bonus), count in sorted(grouped.items())
    )
    return DepthCase(mu, entries)


def depth_bound(
    boundary_count: int, case: DepthCase, *, face: FaceLabel | None = None
) -> DepthBound:
    """The linear inequality in (b, c) that the depth case imposes.

    Each ordered pair of generators contributes through the two projection
    invariants, weighted by the symmetrisation factorials; flagged pairs add
    the fibre bonus.  When ``face`` is given, the case's pair counts and
    invariants must reproduce the face's own (fibre flags aside).
    """
    if boundary_count != case.boundary_count:
        raise ValueError("boundary count differs from the case data")
    mu = boundary_count
    if face is not None:
        gens = face_generators(face)
        if len(gens) != mu:
            raise ValueError("face has a different number of generators")
        live = _case_signature(depth_case_from_face(face))
        if live != _case_signature(case):
            raise ValueError("case data does not match the face invariants")
    c1 = Fraction(1, (mu - 1) * math.factorial(mu))
    c2 = Fraction(1, (mu - 1) * math.factorial(mu - 1))
    weight = math.factorial(mu - 2)
    b_coeff = Fraction(4, mu - 1)
    for e in case.entries:
        share = c2 / (e.k_size - 1)
        per_pair = -c1 * e.delta - share * e.delta + share * e.gamma
        if e.fibre_bonus:
            per_pair += (c1 + share) * e.delta / 6
        b_coeff += e.ordered_pairs * weight * per_pair
    threshold = None
    if b_coeff > 0:
        threshold = 1 / b_coeff
    return DepthBound(mu, b_coeff, Fraction(-1), threshold)


def standard_depth_cases() -> Mapping[str, DepthCase]:
    """The six case records behind the published nef thresholds.

    The three-generator cases carry the exact invariants of their
    representative faces; the larger cases use the uniform floor
    gamma = delta = 2, which only weakens the bound.
    """
    return {
        "string": DepthCase(
            3,
            (
                depth_case_entry(4, 2, 3, 2),
                depth_case_entry(2, 2, 2, 2),
            ),
        ),
        "BFstar": DepthCase(3, (depth_case_entry(6, 2, 2, 2),)),
        "disconnected": DepthCase(
            3, (depth_case_entry(6, 2, 4, 4, fibre_bonus=True),)
        ),
        "four": DepthCase(
            4,
            (
                depth_case_entry(9, 2, 2, 2),
                depth_case_entry(3, 3, 2, 2),
            ),
        ),
        "five": DepthCase(
            5,
            (
                depth_case_entry(4, 2, 2, 2),
                depth_case_entry(16, 3, 2, 2),
            ),
        ),
        "six": DepthCase(
            6,
            (
                depth_case_entry(24, 3, 2, 2, fibre_bonus=True),
                depth_case_entry(6, 3, 2, 2),
            ),
        ),
    }


# ---------------------------------------------------------------------------
# wire format


IDENTITIES_WIRE_VERSION = 1

_IDENTITIES_DATA_FILE = f"identities_v{IDENTITIES_WIRE_VERSION}.json"

_WIRE_PARAMETERS = {"level": 1, "hodge": "24", "boundary": "2", "exceptional": "1"}


def _divisor_wire(d: FormalDivisor) -> dict[str, str]:
    return {symbol: str(d.coefficient(symbol)) for symbol in d.support}


def identities_wire_payload() -> dict:
    """Every registered identity, instantiated at the documented defaults.

    The two branch-parameterized identities appear once per branch count 3-6;
    relation coefficients at other parameters are re-derived by
    :func:`identity_spec`, which this file mirrors verbatim at the defaults.
    """
    records = []
    for name in registered_identities():
        if name in ("symmetrised_depth_mu", "eliminate_first_stage"):
            counts: tuple[int | None, ...] = (3, 4, 5, 6)
        else:
            counts = (None,)
        for count in counts:
            spec = identity_spec(name, boundary_count=count or 3)
            records.append(
                {
                    "name": name,
                    "boundary_count": count,
                    "control_symbol": spec.control_symbol,
                    "target": _divisor_wire(spec.target),
                    "relations": [
                        {
                            "name": rel.name,
                            "replaces": rel.head,
                            "with": _divisor_wire(rel.right),
                            "note": rel.note,
                        }
                        for rel in spec.relations
                    ],
                }
            )
    return {
        "format": "nefcone-identities",
        "version": IDENTITIES_WIRE_VERSION,
        "parameters": dict(_WIRE_PARAMETERS),
        "identities": records,
    }


def shipped_identities() -> dict:
    """Parse the bundled human-readable identity-relation data file."""
    import json
    from importlib import resources

    text = (
        resources.files("nefcone").joinpath("data").joinpath(_IDENTITIES_DATA_FILE)
    ).read_text(encoding="utf-8")
    return json.loads(text)
