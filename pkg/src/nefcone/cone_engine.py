"""Exact cone computations: membership, faces, dual descriptions, dicings,
support functions, and the two-stage projection invariants gamma/delta.

Everything is certified: membership returns nonnegative coefficients or a
strictly separating dual vector, face tests return a supporting functional,
and all certificates are re-verified by direct arithmetic before being
returned.  No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import Mapping, Sequence

from .cone_atlas import Cone, FaceLabel, atlas, cone_by_name, face_generators
from .lattice_forms import (
    DualVector,
    LinearForm,
    QuadForm,
    Rat,
    _det,
    _mat_inv,
    _mat_mul,
    _rank,
    _transpose,
    dual_vector,
    from_gram,
    linear_form,
    linear_root,
    project,
)

# ---------------------------------------------------------------------------
# exact phase-1 simplex


def _phase1(
    columns: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> tuple[Fraction, tuple[Fraction, ...] | None, tuple[Fraction, ...]]:
    """Minimize the artificial total for {columns @ lam = rhs, lam >= 0}.

    Returns (optimal value, lam if value is 0 else None, dual vector y with
    y . columns_j <= 0 for all j and y . rhs = value).  Bland's rule, so the
    iteration always terminates.
    """
    m = len(rhs)
    n = len(columns)
    rows = [[Fraction(columns[j][r]) for j in range(n)] for r in range(m)]
    b = [Fraction(x) for x in rhs]
    sign = [1] * m
    for r in range(m):
        if b[r] < 0:
            rows[r] = [-x for x in rows[r]]
            b[r] = -b[r]
            sign[r] = -1
    total = n + m
    tab = [rows[r] + [Fraction(int(k == r)) for k in range(m)] + [b[r]] for r in range(m)]
    basis = [n + r for r in range(m)]
    # reduced costs for the all-artificial basis (costs: 0 structural, 1 artificial)
    z = [Fraction(0)] * (total + 1)
    for j in range(total + 1):
        col_sum = sum(tab[r][j] for r in range(m))
        cost = Fraction(1) if n <= j < total else Fraction(0)
        z[j] = cost - col_sum
    while True:
        enter = next((j for j in range(total) if z[j] < 0), None)
        if enter is None:
            break
        leave = None
        best: Fraction | None = None
        for r in range(m):
            if tab[r][enter] > 0:
                ratio = tab[r][total] / tab[r][enter]
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        assert leave is not None  # the phase-1 objective is bounded below
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for r in range(m):
            if r != leave and tab[r][enter] != 0:
                f = tab[r][enter]
                tab[r] = [x - f * y for x, y in zip(tab[r], tab[leave])]
        if z[enter] != 0:
            f = z[enter]
            z = [x - f * y for x, y in zip(z, tab[leave])]
        basis[leave] = enter
    value = -z[total]
    y = tuple(sign[r] * (Fraction(1) - z[n + r]) for r in range(m))
    if value != 0:
        return value, None, y
    lam = [Fraction(0)] * n
    for r, j in enumerate(basis):
        if j < n:
            lam[j] = tab[r][total]
    return value, tuple(lam), y


def conic_combination(
    vectors: Sequence[Sequence[Rat]], target: Sequence[Rat]
) -> tuple[Fraction, ...] | None:
    """Nonnegative rational coefficients writing target over vectors, or None.

    The returned coefficients are re-verified exactly.
    """
    tgt = [Fraction(x) for x in target]
    if not vectors:
        return () if all(x == 0 for x in tgt) else None
    cols = [[Fraction(x) for x in v] for v in vectors]
    value, lam, _ = _phase1(cols, tgt)
    if value != 0:
        return None
    assert lam is not None and all(c >= 0 for c in lam)
    for r in range(len(tgt)):
        assert sum(lam[j] * cols[j][r] for j in range(len(cols))) == tgt[r]
    return lam


# ---------------------------------------------------------------------------
# membership and faces


@dataclass(frozen=True)
class Membership:
    """Certificate for a cone-membership query: coefficients on success, a
    strictly separating dual vector on refusal."""

    is_member: bool
    coefficients: tuple[Fraction, ...] | None
    separator: DualVector | None


def member(cone: Cone, q: QuadForm) -> Membership:
    """Exact membership of q in the cone, with a self-verified certificate."""
    if cone.dim != q.dim:
        raise ValueError("dimension mismatch between cone and form")
    cols = [list(g.coords) for g in cone.generators]
    rhs = list(q.coords)
    if not cols:
        if all(x == 0 for x in rhs):
            return Membership(True, (), None)
        sep = dual_vector(q.dim, [-x for x in rhs])
        return Membership(False, None, sep)
    value, lam, y = _phase1(cols, rhs)
    if value == 0:
        assert lam is not None
        for r in range(len(rhs)):
            assert sum(lam[j] * cols[j][r] for j in range(len(cols))) == rhs[r]
        return Membership(True, lam, None)
    sep_coords = tuple(-v for v in y)
    sep = DualVector(q.dim, sep_coords)
    for g in cone.generators:
        assert sep.pairing(g) >= 0
    assert sep.pairing(q) < 0
    return Membership(False, None, sep)


@dataclass(frozen=True)
class FaceResult:
    is_face: bool
    support: DualVector | None

    def __bool__(self) -> bool:
        return self.is_face


def is_face(cone: Cone, subset: FaceLabel) -> FaceResult:
    """Whether the index subset spans a face, certified by a dual vector that
    vanishes on the subset and is strictly positive on the other generators.

    The full generator set is the improper face (supported by zero).
    """
    if cone.name is not None and subset.parent != cone.name:
        raise ValueError("face label belongs to a different cone")
    gens = cone.generators
    if subset.indices and subset.indices[-1] >= len(gens):
        raise ValueError("face index out of range")
    inside = set(subset.indices)
    outside = [i for i in range(len(gens)) if i not in inside]
    ncoords = len(gens[0].coords) if gens else 0
    if not gens:
        return FaceResult(True, None)
    # variables: y = u - v (u, v >= 0), one slack per strict constraint
    cols: list[list[Fraction]] = []
    for k in range(ncoords):
        cols.append([Fraction(g.coords[k]) for g in gens])
    for k in range(ncoords):
        cols.append([-Fraction(g.coords[k]) for g in gens])
    for i in outside:
        cols.append([Fraction(-int(r == i)) for r in range(len(gens))])
    rhs = [Fraction(int(i in outside)) for i in range(len(gens))]
    value, lam, _ = _phase1(cols, rhs)
    if value != 0:
        return FaceResult(False, None)
    assert lam is not None
    y = tuple(lam[k] - lam[ncoords + k] for k in range(ncoords))
    support = DualVector(cone.dim, y)
    for j in sorted(inside):
        assert support.pairing(gens[j]) == 0
    for i in outside:
        assert support.pairing(gens[i]) >= 1
    return FaceResult(True, support)


# ---------------------------------------------------------------------------
# dual descriptions


@dataclass(frozen=True)
class DualDescription:
    cone_name: str | None
    lineality: tuple[DualVector, ...]
    rays: tuple[DualVector, ...]
    monomial_basis: tuple[DualVector, ...] | None = None


def _primitive_int_vector(vec: Sequence[Fraction]) -> tuple[int, ...]:
    from math import lcm

    scale = lcm(*(x.denominator for x in vec)) if vec else 1
    ints = [int(x * scale) for x in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(v // g for v in ints)


def _extreme_rays_pointed(
    mat: Sequence[Sequence[Fraction]],
) -> tuple[tuple[int, ...], ...]:
    """Extreme rays of the pointed cone {t : mat @ t >= 0} (mat of full column
    rank), by incremental double description with the algebraic adjacency test."""
    r = len(mat[0])
    chosen: list[int] = []
    for i in range(len(mat)):
        if _rank([mat[j] for j in chosen + [i]]) > len(chosen):
            chosen.append(i)
        if len(chosen) == r:
            break
    assert len(chosen) == r, "constraint matrix does not have full column rank"
    inv = _mat_inv([mat[i] for i in chosen])
    rays = [
        _primitive_int_vector([inv[k][j] for k in range(r)]) for j in range(r)
    ]
    processed = list(chosen)

    def tight(ray: Sequence[int]) -> list[int]:
        return [
            i
            for i in processed
            if sum(Fraction(a) * t for a, t in zip(mat[i], ray)) == 0
        ]

    for i in range(len(mat)):
        if i in processed:
            continue
        vals = {
            tuple(ray): sum(Fraction(a) * t for a, t in zip(mat[i], ray))
            for ray in rays
        }
        pos = [ray for ray in rays if vals[tuple(ray)] > 0]
        zero = [ray for ray in rays if vals[tuple(ray)] == 0]
        neg = [ray for ray in rays if vals[tuple(ray)] < 0]
        if not neg:
            processed.append(i)
            continue
        new: list[tuple[int, ...]] = []
        for p in pos:
            tp = set(tight(p))
            for q in neg:
                common = tp & set(tight(q))
                if _rank([mat[k] for k in common]) != r - 2:
                    continue
                combo = tuple(
                    vals[tuple(p)] * Fraction(b) - vals[tuple(q)] * Fraction(a)
                    for a, b in zip(p, q)
                )
                new.append(_primitive_int_vector(combo))
        processed.append(i)
        merged = {tuple(ray) for ray in pos + zero + new}
        rays = [tuple(t) for t in sorted(merged)]
    for ray in rays:
        assert all(
            sum(Fraction(a) * t for a, t in zip(row, ray)) >= 0 for row in mat
        )
        assert _rank([mat[k] for k in tight(ray)]) == r - 1
    return tuple(sorted(rays))


def dual_description(
    cone: Cone, monomial_basis: Sequence[DualVector] | None = None
) -> DualDescription:
    """Lineality basis and extreme rays of the dual cone, exactly.

    An optional dual lattice basis may be attached for monomial coordinates;
    it is validated (unimodular; each vector pairs >= 0 with every generator,
    with the non-ray part pairing to 0).
    """
    from .lattice_forms import integer_kernel

    ncoords = cone.dim * (cone.dim + 1) // 2
    gens = cone.generators
    if not gens:
        lin = tuple(
            dual_vector(cone.dim, [int(k == i) for k in range(ncoords)])
            for i in range(ncoords)
        )
        return DualDescription(cone.name, lin, (), None)
    rows = [[int(c) for c in g.coords] for g in gens]
    lineality = integer_kernel(rows)
    rank = ncoords - len(lineality)
    # basis of the row space, from the echelon form of the generator rows
    echelon = [list(map(Fraction, row)) for row in rows]
    basis_w: list[list[Fraction]] = []
    for col in range(ncoords):
        piv = next(
            (r for r in range(len(basis_w), len(echelon)) if echelon[r][col] != 0),
            None,
        )
        if piv is None:
            continue
        k = len(basis_w)
        echelon[k], echelon[piv] = echelon[piv], echelon[k]
        for r in range(len(echelon)):
            if r != k and echelon[r][col] != 0:
                f = echelon[r][col] / echelon[k][col]
                echelon[r] = [x - f * y for x, y in zip(echelon[r], echelon[k])]
        basis_w.append(echelon[k])
        if len(basis_w) == rank:
            break
    mat = [
        [sum(Fraction(g) * w for g, w in zip(row, wvec)) for wvec in basis_w]
        for row in rows
    ]
    rays_t = _extreme_rays_pointed(mat)
    rays = []
    for t in rays_t:
        lift = [
            sum(Fraction(t[a]) * basis_w[a][k] for a in range(rank))
            for k in range(ncoords)
        ]
        rays.append(dual_vector(cone.dim, _primitive_int_vector(lift)))
    rays_sorted = tuple(sorted(rays, key=lambda d: d.coords))
    lin_vectors = tuple(dual_vector(cone.dim, v) for v in lineality)
    for d in lin_vectors:
        assert all(d.pairing(g) == 0 for g in gens)
    for d in rays_sorted:
        assert all(d.pairing(g) >= 0 for g in gens)
    checked_basis: tuple[DualVector, ...] | None = None
    if monomial_basis is not None:
        bas = tuple(monomial_basis)
        if len(bas) != ncoords:
            raise ValueError("monomial basis must have one vector per coordinate")
        det = _det([[Fraction(x) for x in d.coords] for d in bas])
        if det not in (1, -1):
            raise ValueError("monomial basis is not a dual lattice basis")
        for d in bas:
            if any(d.pairing(g) < 0 for g in gens):
                raise ValueError("monomial basis vector lies outside the dual cone")
        checked_basis = bas
    return DualDescription(cone.name, lin_vectors, rays_sorted, checked_basis)


def monomial_exponents(dd: DualDescription, target: DualVector) -> tuple[int, ...]:
    """Integer exponents of the target over the attached dual lattice basis."""
    if dd.monomial_basis is None:
        raise ValueError("dual description carries no monomial basis")
    cols = [[Fraction(x) for x in d.coords] for d in dd.monomial_basis]
    matrix = list(zip(*cols))
    from .lattice_forms import solve_linear

    sol = solve_linear(matrix, list(target.coords))
    if sol is None:
        raise ValueError("target is not in the span of the basis")
    if any(x.denominator != 1 for x in sol):
        raise ValueError("target is not integral over the monomial basis")
    return tuple(int(x) for x in sol)


def square_core_cone() -> Cone:
    """The two-generator cone spanned by x_1^2 and the core form."""
    at = atlas()
    return Cone(4, (at.pi2_4.generators[0], at.e), name="square_core")


def _dual_from_slots(entries: Mapping[tuple[int, int], int]) -> DualVector:
    from .lattice_forms import pair_slots

    slots = pair_slots(4)
    coords = [Fraction(0)] * len(slots)
    for (i, j), v in entries.items():
        coords[slots.index((i - 1, j - 1))] += v
    return DualVector(4, tuple(coords))


#: Dual lattice basis adapted to square_core_cone: the first two vectors
#: support its two facets, the remaining eight span the annihilator of the
#: cone.  Induces the monomial chart coordinates T_1..T_10.
SQUARE_CORE_CHART_BASIS: tuple[DualVector, ...] = (
    _dual_from_slots({(1, 1): 1, (1, 2): -2}),
    _dual_from_slots({(1, 2): 1}),
    _dual_from_slots({(2, 2): 1, (3, 3): -1}),
    _dual_from_slots({(2, 2): 1, (4, 4): -1}),
    _dual_from_slots({(2, 4): 1, (1, 2): 1}),
    _dual_from_slots({(2, 4): 1, (1, 3): -1}),
    _dual_from_slots({(2, 4): 1, (1, 4): -1}),
    _dual_from_slots({(2, 4): 1, (2, 3): -1}),
    _dual_from_slots({(1, 2): 2, (2, 2): -1}),
    _dual_from_slots({(3, 4): 1}),
)


# ---------------------------------------------------------------------------
# projections


@dataclass(frozen=True)
class TargetCheck:
    target: str | None
    contains: bool
    equals: bool


@dataclass(frozen=True)
class ProjectionReport:
    source: str | None
    axis: int
    image_generators: tuple[QuadForm, ...]
    checks: tuple[TargetCheck, ...]
    first_containing: str | None


def project_and_check(
    cone: Cone, axis: int, targets: Sequence[Cone]
) -> ProjectionReport:
    """Project the cone along a coordinate axis and test the image against
    each target cone: containment, and equality by mutual membership."""
    from .cone_atlas import primitive_form

    images: list[QuadForm] = []
    for g in cone.generators:
        img = project(g, axis)
        if all(c == 0 for c in img.coords):
            continue
        prim = primitive_form(img)
        if all(prim.coords != q.coords for q in images):
            images.append(prim)
    image_cone = Cone(cone.dim - 1, tuple(images))
    checks: list[TargetCheck] = []
    first: str | None = None
    for target in targets:
        contains = all(member(target, q).is_member for q in images)
        equals = contains and all(
            member(image_cone, q).is_member for q in target.generators
        )
        checks.append(TargetCheck(target.name, contains, equals))
        if contains and first is None:
            first = target.name
    return ProjectionReport(cone.name, axis, tuple(images), tuple(checks), first)


# ---------------------------------------------------------------------------
# dicings


@dataclass(frozen=True)
class DicingResult:
    is_dicing: bool
    witness: tuple[int, ...] | None
    determinant: Fraction | None

    def __bool__(self) -> bool:
        return self.is_dicing


def is_dicing(forms: Sequence[LinearForm]) -> DicingResult:
    """Whether the integral forms cut the lattice into unimodular cells:
    every linearly independent dim-subset must have determinant +-1."""
    if not forms:
        raise ValueError("need at least one form")
    dim = forms[0].dim
    rows = []
    for l in forms:
        if l.dim != dim:
            raise ValueError("forms of mixed dimension")
        if any(c.denominator != 1 for c in l.coeffs):
            raise ValueError("dicing test needs integral forms")
        rows.append([int(c) for c in l.coeffs])
    if _rank(rows) != dim:
        raise ValueError("forms do not span the dual space")
    for subset in combinations(range(len(rows)), dim):
        det = _det([rows[i] for i in subset])
        if det != 0 and det not in (1, -1):
            return DicingResult(False, subset, det)
    return DicingResult(True, None, None)


# ---------------------------------------------------------------------------
# canonical decomposition of low-rank positive forms


def _normalize_line(vec: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for v in vec:
        g = gcd(g, abs(v))
    if g == 0:
        raise ValueError("zero line")
    out = [v // g for v in vec]
    lead = next(v for v in out if v != 0)
    if lead < 0:
        out = [-v for v in out]
    return tuple(out)


def voronoi_decomposition(q: QuadForm) -> tuple[tuple[Fraction, tuple[int, ...]], ...]:
    """Write a positive definite form of rank 2 or 3 as a positive rational
    combination of squares of the difference lines of a unimodular complete
    configuration (the containing cone of the rank-<=3 perfect-form fan).

    A superbase is reduced until all its mutual products are <= 0; the
    negated products are the coefficients.  The result is canonical up to
    line signs and is re-verified by exact reconstruction.
    """
    dim = q.dim
    if dim not in (2, 3):
        raise ValueError("canonical decompositions are for rank 2 and 3 forms")
    a = q.gram()
    vecs = [[int(r == c) for c in range(dim)] for r in range(dim)]
    vecs.append([-1] * dim)

    def prod(u: Sequence[int], v: Sequence[int]) -> Fraction:
        return sum(
            Fraction(u[i]) * a[i][j] * v[j] for i in range(dim) for j in range(dim)
        )

    steps = 0
    while True:
        flip = next(
            (
                (i, j)
                for i in range(dim + 1)
                for j in range(i + 1, dim + 1)
                if prod(vecs[i], vecs[j]) > 0
            ),
            None,
        )
        if flip is None:
            break
        i, j = flip
        for k in range(dim + 1):
            if k != i and k != j:
                vecs[k] = [x + y for x, y in zip(vecs[k], vecs[i])]
        vecs[i] = [-x for x in vecs[i]]
        steps += 1
        if steps > 100000:
            raise ValueError("superbase reduction did not terminate; form not positive definite?")
    basis = [[Fraction(x) for x in v] for v in vecs[:dim]]
    inv = _mat_inv(_transpose(basis))
    duals = [list(row) for row in inv] + [[Fraction(0)] * dim]
    out: list[tuple[Fraction, tuple[int, ...]]] = []
    recon = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(dim + 1):
        for j in range(i + 1, dim + 1):
            c = -prod(vecs[i], vecs[j])
            assert c >= 0
            if c == 0:
                continue
            line = [x - y for x, y in zip(duals[i], duals[j])]
            assert all(x.denominator == 1 for x in line)
            norm = _normalize_line([int(x) for x in line])
            out.append((c, norm))
            for r in range(dim):
                for s in range(dim):
                    recon[r][s] += c * norm[r] * norm[s]
    assert all(recon[r][s] == a[r][s] for r in range(dim) for s in range(dim))
    return tuple(sorted(out, key=lambda t: t[1]))


# ---------------------------------------------------------------------------
# support functions


@dataclass(frozen=True)
class SupportFunction:
    """Conewise-linear function given by fragment cones and ray values."""

    name: str
    fragments: tuple[Cone, ...]
    values: Mapping[tuple[Fraction, ...], Fraction]


def support_function(
    name: str, fragments: Sequence[Cone], values: Mapping[tuple[Fraction, ...], Fraction]
) -> SupportFunction:
    for frag in fragments:
        for g in frag.generators:
            if g.coords not in values:
                raise ValueError(f"missing value for a generator of {frag.name}")
    return SupportFunction(name, tuple(fragments), dict(values))


@lru_cache(maxsize=1)
def psi2() -> SupportFunction:
    cone = atlas().pi1(2)
    return support_function(
        "psi2", (cone,), {g.coords: Fraction(1) for g in cone.generators}
    )


@lru_cache(maxsize=1)
def psi3() -> SupportFunction:
    cone = atlas().pi1(3)
    return support_function(
        "psi3", (cone,), {g.coords: Fraction(1) for g in cone.generators}
    )


def support_eval(psi: SupportFunction, q: QuadForm) -> Fraction:
    """Value of the support function, via an exact membership certificate in
    a fragment; evaluation in several fragments must agree."""
    values: list[Fraction] = []
    for frag in psi.fragments:
        if frag.dim != q.dim:
            continue
        res = member(frag, q)
        if res.is_member:
            assert res.coefficients is not None
            total = sum(
                (
                    c * psi.values[g.coords]
                    for c, g in zip(res.coefficients, frag.generators)
                ),
                Fraction(0),
            )
            values.append(total)
    if not values:
        raise ValueError(f"form lies outside the fragments of {psi.name}")
    assert all(v == values[0] for v in values)
    return values[0]


# ---------------------------------------------------------------------------
# the two-stage projection invariants


class GammaDelta(tuple):
    """(gamma, delta, k_size) with named access."""

    __slots__ = ()

    def __new__(cls, gamma: Fraction, delta: Fraction, k_size: int) -> "GammaDelta":
        return super().__new__(cls, (gamma, delta, k_size))

    @property
    def gamma(self) -> Fraction:
        return self[0]

    @property
    def delta(self) -> Fraction:
        return self[1]

    @property
    def k_size(self) -> int:
        return self[2]


def _restrict_form(
    basis: Sequence[Sequence[int]], q: QuadForm
) -> QuadForm:
    b = [[Fraction(x) for x in row] for row in basis]
    gram = _mat_mul(_mat_mul(b, q.gram()), _transpose(b))
    return from_gram(gram)


def gamma_delta(sigma: FaceLabel, xi: tuple[int, int]) -> GammaDelta:
    """The two projection invariants of a rank-3 face and an ordered pair of
    its generators (1-based positions), plus the count of second-stage rays.

    First the face and the core form are restricted to the kernel of the
    xi(1) line; the core restriction is decomposed canonically and the
    decomposition must be compatible (as a dicing) with the restricted
    generator rays K.  gamma adds the coefficients of the summands outside K.
    Then everything is restricted once more to the kernel of the xi(2) ray;
    the other K rays must agree on a single image ray m, and delta adds the
    (rescaled) coefficients of the summands projecting outside m.
    """
    from .lattice_forms import integer_kernel

    gens = face_generators(sigma)
    parent = cone_by_name(sigma.parent)
    mu = len(gens)
    if mu < 3:
        raise ValueError("need a face with at least three generators")
    if parent.dim not in (3, 4):
        raise ValueError("faces must live in rank 3 or 4")
    lines: list[tuple[int, ...]] = []
    for q in gens:
        try:
            root = linear_root(q)
        except ValueError as exc:
            raise ValueError(
                "face generators must all be squares of linear forms"
            ) from exc
        coeffs = [int(c) for c in root.coeffs]
        if parent.dim == 3:
            coeffs.append(0)
        lines.append(tuple(coeffs))
    if _rank([list(l) for l in lines]) != 3:
        raise ValueError("the generator lines must span dimension 3")
    a, b = xi
    if not (1 <= a <= mu and 1 <= b <= mu) or a == b:
        raise ValueError("xi must be two distinct 1-based generator positions")

    basis1 = integer_kernel([list(lines[a - 1])])
    assert len(basis1) == 3

    def restrict_line(
        basis: Sequence[Sequence[int]], line: Sequence[int]
    ) -> tuple[int, ...]:
        return tuple(sum(bv * c for bv, c in zip(row, line)) for row in basis)

    ray_by_pos: dict[int, tuple[int, ...]] = {}
    for p in range(mu):
        if p == a - 1:
            continue
        img = restrict_line(basis1, lines[p])
        assert any(v != 0 for v in img)
        ray_by_pos[p] = _normalize_line(img)
    k_rays = sorted(set(ray_by_pos.values()))
    if len(k_rays) not in (2, 3):
        raise ValueError(
            f"found {len(k_rays)} distinct restricted rays; the face is not admissible"
        )

    # gamma: the conewise-linear function on the rank-3 fan that is 0 on the
    # rays of K and 1 on every other ray, evaluated at the restricted core
    # via its canonical decomposition.
    core1 = _restrict_form(basis1, atlas().e)
    decomposition = voronoi_decomposition(core1)
    k_set = set(k_rays)
    gamma = sum((c for c, line in decomposition if line not in k_set), Fraction(0))

    # delta: restrict once more, to the kernel of the xi(2) ray; the other
    # K rays must land on a single ray m, and the analogous function on the
    # rank-2 fan is 0 on m and 1 elsewhere.
    k_line = ray_by_pos[b - 1]
    basis2 = integer_kernel([list(k_line)])
    assert len(basis2) == 2
    m_candidates = {
        _normalize_line(restrict_line(basis2, ray))
        for ray in k_rays
        if ray != k_line
    }
    if len(m_candidates) != 1:
        raise ValueError("the distinguished second-stage ray is not unique")
    m_ray = m_candidates.pop()
    core2 = _restrict_form(basis2, core1)
    delta = sum(
        (c for c, line in voronoi_decomposition(core2) if line != m_ray),
        Fraction(0),
    )
    return GammaDelta(Fraction(gamma), Fraction(delta), len(k_rays))
