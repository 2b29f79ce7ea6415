"""Exact arithmetic for quadratic forms on low-rank lattices.

Conventions, used throughout the package:

* A quadratic form ``q`` on ``Z^g`` is stored by its coordinates with respect
  to the dual basis ``U*_11, ..., U*_gg, U*_12, U*_13, ...`` (diagonal slots
  first, then off-diagonal slots in lexicographic order).  The basis vector
  ``U*_ii`` is the form ``x_i^2`` and ``U*_ij`` (``i < j``) is ``2*x_i*x_j``,
  so the Gram matrix of ``q`` is ``A_ii = coords[ii]``, ``A_ij = coords[ij]``
  and the polynomial coefficient of ``x_i*x_j`` is ``2*coords[ij]``.
* Lattice maps are stored the way matrices are usually printed: the columns
  are the images of the basis vectors.  A map ``m`` acts on forms by
  ``A -> M A M^T`` (see :func:`act`) and composes naturally,
  ``act(m1, act(m2, q)) == act(m1 @ m2, q)``.

All arithmetic is over :class:`fractions.Fraction`; nothing in this module
ever rounds.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction | int


def pair_slots(dim: int) -> list[tuple[int, int]]:
    """Index pairs (0-based) for the coordinate slots of a form on Z^dim."""
    slots = [(i, i) for i in range(dim)]
    slots.extend((i, j) for i in range(dim) for j in range(i + 1, dim))
    return slots


def _as_fraction_tuple(values: Iterable[Rat]) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class QuadForm:
    """A quadratic form in the dual-basis coordinates described above."""

    dim: int
    coords: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        expected = self.dim * (self.dim + 1) // 2
        if len(self.coords) != expected:
            raise ValueError(
                f"need {expected} coordinates for dim {self.dim}, got {len(self.coords)}"
            )

    @property
    def integrality(self) -> bool:
        """True when the form is integral on the lattice (all coords integers)."""
        return all(c.denominator == 1 for c in self.coords)

    def gram(self) -> tuple[tuple[Fraction, ...], ...]:
        slots = pair_slots(self.dim)
        a = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for c, (i, j) in zip(self.coords, slots):
            a[i][j] = c
            a[j][i] = c
        return tuple(tuple(row) for row in a)

    def __str__(self) -> str:
        return format_form(self)


@dataclass(frozen=True)
class LinearForm:
    dim: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.dim:
            raise ValueError("coefficient count does not match dim")

    @property
    def primitive(self) -> bool:
        if not all(c.denominator == 1 for c in self.coeffs):
            return False
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, abs(c.numerator))
        return g == 1


@dataclass(frozen=True)
class LatticeMap:
    """An endomorphism of Z^dim; columns are images of the basis vectors."""

    dim: int
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if len(self.matrix) != self.dim or any(len(r) != self.dim for r in self.matrix):
            raise ValueError("matrix shape does not match dim")

    @property
    def determinant(self) -> Fraction:
        return _det(self.matrix)

    def __matmul__(self, other: "LatticeMap") -> "LatticeMap":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return LatticeMap(self.dim, _mat_mul(self.matrix, other.matrix))


@dataclass(frozen=True)
class DualVector:
    """A vector in the dual lattice, in the basis U_11, ..., U_gg, U_12, ...

    ``pairing`` with a form is the coordinate pairing: ``U_ij`` reads off the
    ``ij`` slot.  Note that pulling a dual vector through a lattice map uses
    the contragredient matrix; this package never does so implicitly.
    """

    dim: int
    coords: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        expected = self.dim * (self.dim + 1) // 2
        if len(self.coords) != expected:
            raise ValueError("coordinate count does not match dim")

    def pairing(self, q: QuadForm) -> Fraction:
        if q.dim != self.dim:
            raise ValueError("dimension mismatch")
        return sum((d * c for d, c in zip(self.coords, q.coords)), Fraction(0))


def quadform(dim: int, coords: Iterable[Rat]) -> QuadForm:
    return QuadForm(dim, _as_fraction_tuple(coords))


def linear_form(coeffs: Iterable[Rat]) -> LinearForm:
    cs = _as_fraction_tuple(coeffs)
    return LinearForm(len(cs), cs)


def lattice_map(rows: Sequence[Sequence[Rat]]) -> LatticeMap:
    mat = tuple(_as_fraction_tuple(r) for r in rows)
    return LatticeMap(len(mat), mat)


def dual_vector(dim: int, coords: Iterable[Rat]) -> DualVector:
    return DualVector(dim, _as_fraction_tuple(coords))


def from_gram(a: Sequence[Sequence[Rat]]) -> QuadForm:
    dim = len(a)
    rows = [_as_fraction_tuple(r) for r in a]
    for i in range(dim):
        for j in range(dim):
            if rows[i][j] != rows[j][i]:
                raise ValueError("Gram matrix must be symmetric")
    return QuadForm(dim, tuple(rows[i][j] for (i, j) in pair_slots(dim)))


def square(l: LinearForm | Sequence[Rat]) -> QuadForm:
    """The rank-one form l^2; slot ij holds l_i*l_j."""
    coeffs = l.coeffs if isinstance(l, LinearForm) else _as_fraction_tuple(l)
    return QuadForm(len(coeffs), tuple(coeffs[i] * coeffs[j] for (i, j) in pair_slots(len(coeffs))))


def evaluate(q: QuadForm, v: Sequence[Rat]) -> Fraction:
    """q(v) = v^T A v, exactly."""
    if len(v) != q.dim:
        raise ValueError("vector length does not match dim")
    vec = _as_fraction_tuple(v)
    a = q.gram()
    return sum((vec[i] * a[i][j] * vec[j] for i in range(q.dim) for j in range(q.dim)), Fraction(0))


def linear_root(q: QuadForm) -> LinearForm:
    """Recover l (up to sign) from a rank-one form q = l^2.

    Raises ValueError if q is not the square of a rational linear form.
    """
    a = q.gram()
    pivot = next((i for i in range(q.dim) if a[i][i] != 0), None)
    if pivot is None:
        if any(c != 0 for c in q.coords):
            raise ValueError("form is not a square of a linear form")
        return LinearForm(q.dim, tuple(Fraction(0) for _ in range(q.dim)))
    s = _fraction_sqrt(a[pivot][pivot])
    if s is None:
        raise ValueError("form is not a square of a rational linear form")
    coeffs = tuple(a[pivot][j] / s for j in range(q.dim))
    if square(coeffs).coords != q.coords:
        raise ValueError("form is not a square of a linear form")
    return LinearForm(q.dim, coeffs)


def _fraction_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n = math.isqrt(x.numerator)
    d = math.isqrt(x.denominator)
    if n * n != x.numerator or d * d != x.denominator:
        return None
    return Fraction(n, d)


def psd_rank(q: QuadForm) -> tuple[bool, int]:
    """(is positive semidefinite, rank), by exact congruence diagonalization."""
    a = [list(row) for row in q.gram()]
    n = q.dim
    rank = _rank(a)
    # Diagonalize by symmetric row+column operations; a negative pivot or a
    # non-trivial block with zero diagonal witnesses indefiniteness.
    m = [list(row) for row in q.gram()]
    psd = True
    row = 0
    while row < n and psd:
        piv = next((i for i in range(row, n) if m[i][i] != 0), None)
        if piv is None:
            if any(m[i][j] != 0 for i in range(row, n) for j in range(row, n)):
                psd = False  # [[0, c], [c, 0]] block: eigenvalues of both signs
            break
        if piv != row:
            m[row], m[piv] = m[piv], m[row]
            for r in m:
                r[row], r[piv] = r[piv], r[row]
        if m[row][row] < 0:
            psd = False
            break
        for i in range(row + 1, n):
            if m[i][row] != 0:
                f = m[i][row] / m[row][row]
                for j in range(n):
                    m[i][j] -= f * m[row][j]
                for r in m:
                    r[i] -= f * r[row]
        row += 1
    return psd, rank


def act(m: LatticeMap, q: QuadForm) -> QuadForm:
    """Transform the form by the lattice map: Gram A -> M A M^T.

    On squares this is act(m, square(l)) == square(M l), and
    evaluate(act(m, q), v) == evaluate(q, M^T v).
    """
    if m.dim != q.dim:
        raise ValueError("dimension mismatch")
    a = q.gram()
    b = _mat_mul(_mat_mul(m.matrix, a), _transpose(m.matrix))
    return from_gram(b)


def project(q: QuadForm, axis: int) -> QuadForm:
    """Restrict the form to the coordinate hyperplane x_axis = 0 (axis 1-based)."""
    if not 1 <= axis <= q.dim:
        raise ValueError("axis out of range")
    keep = [i for i in range(q.dim) if i != axis - 1]
    a = q.gram()
    return from_gram([[a[i][j] for j in keep] for i in keep])


#: Integer matrix conjugating the reference form e of the atlas to 2*(identity):
#: E_DIAGONALIZER @ Gram(e) @ E_DIAGONALIZER^T == 2*I.  Its rows double as the
#: evaluation vectors of half_trace_prime.  Determinant -2: it identifies an
#: index-2 sublattice with a rescaled square lattice.
E_DIAGONALIZER = lattice_map(
    [
        [1, 1, 1, 1],
        [1, -1, 0, 0],
        [0, 0, -1, 0],
        [0, 0, 0, -1],
    ]
)


def half_trace_prime(q: QuadForm) -> Fraction:
    """Half the trace of the form in the diagonalizing coordinates.

    Linear in q; takes the value 1 on x_i^2 and on each of the twelve
    generators of the rank-4 principal cone of the atlas.
    """
    if q.dim != 4:
        raise ValueError("half_trace_prime is defined for forms on Z^4")
    total = sum((evaluate(q, row) for row in E_DIAGONALIZER.matrix), Fraction(0))
    return total / 2


def y_to_x(m: LatticeMap | Sequence[Sequence[Rat]]) -> LatticeMap:
    """Convert a map written in the diagonalizing coordinates to lattice coordinates.

    The input may have half-integral entries; the result must be an integer
    matrix (conjugation by E_DIAGONALIZER), otherwise a ValueError reports the
    first offending entry.
    """
    if not isinstance(m, LatticeMap):
        m = lattice_map(m)
    if m.dim != 4:
        raise ValueError("y_to_x is defined for maps on Z^4")
    psi = E_DIAGONALIZER.matrix
    conj = _mat_mul(_mat_mul(_mat_inv(psi), m.matrix), psi)
    for i, row in enumerate(conj):
        for j, entry in enumerate(row):
            if entry.denominator != 1:
                raise ValueError(
                    f"conjugated matrix is not integral: entry ({i + 1},{j + 1}) = {entry}"
                )
    return LatticeMap(4, conj)


def kernel_lattice(forms: Sequence[QuadForm]) -> tuple[tuple[int, ...], ...]:
    """Basis of the integer kernel common to the given psd forms.

    Each form must be positive semidefinite (for psd forms q(v) = 0 is the
    linear condition A v = 0, so the common kernel is the kernel of the sum).
    """
    if not forms:
        raise ValueError("need at least one form")
    dim = forms[0].dim
    total = [[Fraction(0)] * dim for _ in range(dim)]
    for q in forms:
        if q.dim != dim:
            raise ValueError("forms of mixed dimension")
        psd, _ = psd_rank(q)
        if not psd:
            raise ValueError("kernel_lattice needs positive semidefinite forms")
        a = q.gram()
        for i in range(dim):
            for j in range(dim):
                total[i][j] += a[i][j]
    scale = math.lcm(*(f.denominator for row in total for f in row))
    int_rows = [[int(f * scale) for f in row] for row in total]
    return integer_kernel(int_rows)


def integer_kernel(rows: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Basis of {v in Z^n : A v = 0} via unimodular column reduction."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [list(map(int, row)) for row in rows]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def col_op(c1: int, c2: int, f: int) -> None:  # col c2 -= f * col c1
        for i in range(m):
            a[i][c2] -= f * a[i][c1]
        for i in range(n):
            u[i][c2] -= f * u[i][c1]

    def col_swap(c1: int, c2: int) -> None:
        for i in range(m):
            a[i][c1], a[i][c2] = a[i][c2], a[i][c1]
        for i in range(n):
            u[i][c1], u[i][c2] = u[i][c2], u[i][c1]

    row = 0
    col = 0
    while row < m and col < n:
        piv = next((c for c in range(col, n) if a[row][c] != 0), None)
        if piv is None:
            row += 1
            continue
        col_swap(col, piv)
        # Euclidean reduction across the remaining columns of this row.
        again = True
        while again:
            again = False
            for c in range(col + 1, n):
                if a[row][c] != 0:
                    f = a[row][c] // a[row][col]
                    col_op(col, c, f)
                    if a[row][c] != 0:  # remainder smaller than pivot: rotate
                        col_swap(col, c)
                        again = True
        row += 1
        col += 1
    kernel = [
        tuple(u[i][c] for i in range(n))
        for c in range(n)
        if all(a[r][c] == 0 for r in range(m))
    ]
    return tuple(kernel)


# ---------------------------------------------------------------------------
# wire formats


_TERM_RE = re.compile(r"([+-]?[^+-]+)")


def parse_form(text: str, dim: int = 4) -> QuadForm:
    """Parse a polynomial like ``2*x1^2 + x1*x2 - x3*x4``; see format_form."""
    slots = pair_slots(dim)
    coords = [Fraction(0)] * len(slots)
    cleaned = text.replace(" ", "")
    if not cleaned:
        raise ValueError("empty form")
    for term in _TERM_RE.findall(cleaned):
        sign = Fraction(-1 if term.startswith("-") else 1)
        body = term.lstrip("+-")
        if not body:
            raise ValueError(f"malformed term {term!r}")
        parts = body.split("*")
        coeff = Fraction(1)
        vars_seen: list[int] = []
        for part in parts:
            if not part:
                raise ValueError(f"malformed term {term!r}")
            if part[0] == "x":
                if part.endswith("^2"):
                    idx = int(part[1:-2])
                    vars_seen.extend([idx, idx])
                else:
                    vars_seen.append(int(part[1:]))
            else:
                coeff *= Fraction(part)
        if len(vars_seen) != 2:
            raise ValueError(f"term {term!r} is not quadratic")
        i, j = sorted(v - 1 for v in vars_seen)
        if not 0 <= i <= j < dim:
            raise ValueError(f"variable index out of range in {term!r}")
        value = sign * coeff
        if i == j:
            coords[slots.index((i, i))] += value
        else:
            coords[slots.index((i, j))] += value / 2
    return QuadForm(dim, tuple(coords))


def format_form(q: QuadForm) -> str:
    parts: list[str] = []
    for c, (i, j) in zip(q.coords, pair_slots(q.dim)):
        if c == 0:
            continue
        coeff = c if i == j else 2 * c
        mono = f"x{i + 1}^2" if i == j else f"x{i + 1}*x{j + 1}"
        mag = abs(coeff)
        body = mono if mag == 1 else f"{mag}*{mono}"
        if not parts:
            parts.append(body if coeff > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


def parse_coords(text: str, dim: int = 4) -> QuadForm:
    """Parse a coordinate vector like ``[2,2,2,2,1,-1,-1,-1,-1,0]``."""
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    values = [Fraction(p) for p in body.split(",") if p.strip()]
    return QuadForm(dim, tuple(values))


def format_coords(q: QuadForm) -> str:
    return "[" + ",".join(_format_rational(c) for c in q.coords) + "]"


def _format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# small exact matrix helpers shared across the package


def _transpose(m: Sequence[Sequence[Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(zip(*m))


def _mat_mul(
    a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]
) -> tuple[tuple[Fraction, ...], ...]:
    bt = list(zip(*b))
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a
    )


def _mat_vec(a: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def _mat_inv(m: Sequence[Sequence[Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(m)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def _det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(m)
    a = [list(map(Fraction, row)) for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def _rank(m: Sequence[Sequence[Fraction]]) -> int:
    rows = [list(map(Fraction, row)) for row in m]
    if not rows:
        return 0
    n = len(rows[0])
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def solve_linear(
    matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> tuple[Fraction, ...] | None:
    """One exact solution of matrix @ x = rhs, or None if inconsistent."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    aug = [list(map(Fraction, row)) + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    pivots: list[int] = []
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, m) if aug[r][col] != 0), None)
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = 1 / aug[rank][col]
        aug[rank] = [x * inv for x in aug[rank]]
        for r in range(m):
            if r != rank and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[rank])]
        pivots.append(col)
        rank += 1
    for r in range(rank, m):
        if aug[r][n] != 0:
            return None
    x = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        x[col] = aug[r][n]
    return tuple(x)
