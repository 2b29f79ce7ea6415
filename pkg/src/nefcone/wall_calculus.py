"""Wall relations between adjacent maximal cones and the intersection
numbers of divisor assignments with the associated rational curves.

A wall is a codimension-one cone together with the two rays completing it to
maximal cones on either side.  The unique primitive integral relation among
the wall's rays determines how any finitely supported divisor assignment
pairs with the curve of the wall; both maximal cones are required to be
basic, so the two completing rays pair with multiplicity one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Sequence

from .cone_atlas import Cone, atlas, face_generators
from .cone_engine import SupportFunction, support_function
from .lattice_forms import (
    QuadForm,
    Rat,
    _det,
    format_form,
    half_trace_prime,
    integer_kernel,
    linear_form,
    psd_rank,
    square,
)

# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class WallRelation:
    """The primitive integral relation across a codimension-one wall.

    ``alpha * u + alpha_prime * u_prime + sum(a_i * v_i) == 0`` exactly,
    where the ``v_i`` are the facet generators; the relation is normalized
    so that ``alpha > 0`` and the coefficients have no common factor.
    """

    facet: Cone
    u: QuadForm
    u_prime: QuadForm
    alpha: int
    alpha_prime: int
    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        gens = self.facet.generators
        if len(self.coefficients) != len(gens):
            raise ValueError("one relation coefficient per facet generator")
        if self.alpha <= 0:
            raise ValueError("relation must be normalized with alpha > 0")
        common = gcd(abs(self.alpha), abs(self.alpha_prime))
        for a in self.coefficients:
            common = gcd(common, abs(a))
        if common != 1:
            raise ValueError("relation coefficients must be coprime")
        n = len(self.u.coords)
        for k in range(n):
            total = (
                self.alpha * self.u.coords[k]
                + self.alpha_prime * self.u_prime.coords[k]
                + sum(a * v.coords[k] for a, v in zip(self.coefficients, gens))
            )
            if total != 0:
                raise ValueError("coefficients do not form an exact relation")

    @property
    def rays(self) -> tuple[QuadForm, ...]:
        """All rays of the wall's star: facet generators, then u, u'."""
        return (*self.facet.generators, self.u, self.u_prime)


@dataclass(frozen=True)
class DivisorAssignment:
    """Finitely supported map from primitive rays to rational multiplicities.

    Rays outside the support contribute zero to every pairing.
    """

    name: str
    multiplicities: Mapping[tuple[Fraction, ...], Fraction]

    def value(self, ray: QuadForm) -> Fraction:
        return self.multiplicities.get(ray.coords, Fraction(0))


@dataclass(frozen=True)
class FormalDivisor:
    """Finitely supported rational combination of named divisor symbols."""

    coefficients: Mapping[str, Fraction]

    def coefficient(self, symbol: str) -> Fraction:
        return self.coefficients.get(symbol, Fraction(0))

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(sorted(s for s, c in self.coefficients.items() if c != 0))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients.values())

    def plus(self, other: FormalDivisor) -> FormalDivisor:
        total = dict(self.coefficients)
        for symbol, c in other.coefficients.items():
            total[symbol] = total.get(symbol, Fraction(0)) + c
        return FormalDivisor({s: c for s, c in total.items() if c != 0})

    def times(self, r: Rat) -> FormalDivisor:
        factor = Fraction(r)
        if factor == 0:
            return FormalDivisor({})
        return FormalDivisor({s: factor * c for s, c in self.coefficients.items()})

    def minus(self, other: FormalDivisor) -> FormalDivisor:
        return self.plus(other.times(-1))


def formal_divisor(coefficients: Mapping[str, Rat]) -> FormalDivisor:
    return FormalDivisor({s: Fraction(c) for s, c in coefficients.items() if c != 0})


def ray_symbol(ray: QuadForm) -> str:
    """The divisor symbol attached to a ray: ``D[<formatted form>]``."""
    return f"D[{format_form(ray)}]"


# ---------------------------------------------------------------------------
# wall relations


def wall_relation(facet: Cone, u: QuadForm, u_prime: QuadForm) -> WallRelation:
    """Solve for the unique primitive relation across the wall.

    The facet generators together with either completing ray must form a
    basis of the ambient lattice (both maximal cones basic); non-basic or
    degenerate inputs are refused.
    """
    if u.dim != facet.dim or u_prime.dim != facet.dim:
        raise ValueError("completing rays must match the facet dimension")
    gens = facet.generators
    columns = [u.coords, u_prime.coords, *(g.coords for g in gens)]
    rows: list[list[int]] = []
    for k in range(len(u.coords)):
        row = []
        for col in columns:
            if col[k].denominator != 1:
                raise ValueError("wall data must have integral coordinates")
            row.append(int(col[k]))
        rows.append(row)
    kernel = integer_kernel(rows)
    if len(kernel) != 1:
        raise ValueError("inputs do not form a wall: relation space is not one-dimensional")
    rel = list(kernel[0])
    if rel[0] < 0:
        rel = [-x for x in rel]
    alpha, alpha_prime = rel[0], rel[1]
    if alpha <= 0 or alpha_prime <= 0:
        raise ValueError("inputs do not form a wall: completing rays are not on opposite sides")
    if len(gens) + 1 != len(u.coords):
        raise ValueError("wall cones are not simplicial")
    for extra in (u, u_prime):
        det = _det([list(g.coords) for g in (*gens, extra)])
        if abs(det) != 1:
            raise ValueError("maximal cone at the wall is not basic")
    relation = WallRelation(facet, u, u_prime, alpha, alpha_prime, tuple(rel[2:]))
    if facet.dim == 4:
        # a relation sums to the zero form, so every linear functional kills it
        checksum = alpha * half_trace_prime(u) + alpha_prime * half_trace_prime(u_prime)
        for a, v in zip(relation.coefficients, gens):
            checksum += a * half_trace_prime(v)
        assert checksum == 0
    return relation


@lru_cache(maxsize=1)
def star_walls() -> Mapping[str, WallRelation]:
    """The two pinned walls of the principal rank-4 cone's star."""
    at = atlas()
    facet0 = Cone(4, face_generators(at.sigma0), name="sigma0")
    facet1 = Cone(4, face_generators(at.sigma1), name="sigma1")
    return {
        "sigma0": wall_relation(facet0, at.e, at.e_prime_wall),
        "sigma1": wall_relation(facet1, at.e, square(linear_form((1, -1, 0, 0)))),
    }


# ---------------------------------------------------------------------------
# divisor assignments


def _classify_ray(ray: QuadForm) -> str:
    is_psd, rank = psd_rank(ray)
    if is_psd and rank == 1:
        return "square"
    if is_psd and rank == ray.dim:
        return "definite"
    raise ValueError(
        f"ray {format_form(ray)} is neither a square nor a positive definite form"
    )


def boundary_pullback_assignment(rays: Iterable[QuadForm]) -> DivisorAssignment:
    """Total boundary pullback: multiplicity 1 on square rays, 4 on the
    positive definite rays that blow down to them."""
    mult = {
        ray.coords: Fraction(1) if _classify_ray(ray) == "square" else Fraction(4)
        for ray in rays
    }
    return DivisorAssignment("boundary_pullback", mult)


def boundary_strict_assignment(rays: Iterable[QuadForm]) -> DivisorAssignment:
    """Strict boundary part: multiplicity 1 on square rays only."""
    mult = {
        ray.coords: Fraction(1) for ray in rays if _classify_ray(ray) == "square"
    }
    return DivisorAssignment("boundary_strict", mult)


def exceptional_assignment(rays: Iterable[QuadForm]) -> DivisorAssignment:
    """Exceptional part: multiplicity 1 on positive definite rays only."""
    mult = {
        ray.coords: Fraction(1) for ray in rays if _classify_ray(ray) == "definite"
    }
    return DivisorAssignment("exceptional", mult)


# ---------------------------------------------------------------------------
# pairings


def curve_intersections(rel: WallRelation, d: DivisorAssignment) -> Fraction:
    """Intersection number of the assignment with the wall's curve.

    Each facet generator contributes its relation coefficient times its
    multiplicity; the completing rays contribute with alpha, alpha_prime.
    """
    total = rel.alpha * d.value(rel.u) + rel.alpha_prime * d.value(rel.u_prime)
    for a, v in zip(rel.coefficients, rel.facet.generators):
        total += a * d.value(v)
    return Fraction(total)


def formal_curve_intersections(rel: WallRelation, div: FormalDivisor) -> Fraction:
    """The same pairing for a symbol-keyed divisor built from ray symbols."""
    total = rel.alpha * div.coefficient(ray_symbol(rel.u))
    total += rel.alpha_prime * div.coefficient(ray_symbol(rel.u_prime))
    for a, v in zip(rel.coefficients, rel.facet.generators):
        total += a * div.coefficient(ray_symbol(v))
    return Fraction(total)


def depth4_pairing(a: Rat, b: Rat, c: Rat, which: str) -> Fraction:
    """Pairing of the class with coordinates (a, b, c) against a star curve.

    The class is a*scale - b*boundary_pullback - c*exceptional; the scale
    part pairs to zero with every wall curve, so only b and c contribute.
    Yields b - 2c on the "sigma0" wall and b - c on the "sigma1" wall.
    """
    walls = star_walls()
    if which not in walls:
        raise ValueError(f"unknown wall {which!r}; expected one of {sorted(walls)}")
    rel = walls[which]
    boundary = boundary_pullback_assignment(rel.rays)
    exceptional = exceptional_assignment(rel.rays)
    boundary_part = Fraction(b) * curve_intersections(rel, boundary)
    exceptional_part = Fraction(c) * curve_intersections(rel, exceptional)
    return -boundary_part - exceptional_part


def principal_relation(psi: SupportFunction, rays: Sequence[QuadForm]) -> FormalDivisor:
    """The formal combination sum(psi(v) * D_v) over the given rays.

    psi must carry a stored value for every ray; the result pairs to zero
    against any wall whose star lies among the rays.
    """
    coefficients: dict[str, Fraction] = {}
    for ray in rays:
        value = psi.values.get(ray.coords)
        if value is None:
            raise ValueError(f"{psi.name} is not defined on ray {format_form(ray)}")
        coefficients[ray_symbol(ray)] = value
    return FormalDivisor(coefficients)


def half_trace_support(rays: Sequence[QuadForm], name: str = "half_trace_prime") -> SupportFunction:
    """Support data recording the half-trace character on the given rays."""
    cone = Cone(4, tuple(rays), name=name)
    return support_function(name, (cone,), {q.coords: half_trace_prime(q) for q in rays})
