"""Exact shifted-lattice quadratic minimization and a certified quadrature.

The central quantity is the lattice-minimum function of the distinguished
positive definite form: fmin(x) = min over integer q of f(x - q).  The
module computes single values exactly (``min_shifted``, ``emin``), averages
fmin over midpoint grids with exact rational accumulation (``grid_mean``),
and derives a rigorous error bound for the difference between the grid mean
and the true integral (``error_certificate``).

All certificates are exact: the enumeration boxes provably contain every
global minimizer, the branch list used by the quadrature provably contains
every active lattice shift on the unit cube, and the error bound is a sum
of per-cell bounds on the deviation of fmin from its cell-center value.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import isqrt
from typing import Mapping, Sequence

import numpy as np

from .cone_atlas import atlas
from .lattice_forms import Rat, _mat_inv, solve_linear

# thresholds for the integral comparisons; the last two are conjectural
WEISSAUER_THRESHOLD = Fraction(3, 16)
CONJECTURED_MEAN = Fraction(13, 60)
CONJECTURED_LIMIT_CONSTANT = Fraction(7, 240)


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class ShiftedQuadMin:
    """Exact minimum of Q(q + shift) over integer vectors q.

    ``box`` is the enumeration certificate: per-coordinate integer bounds
    (lo, hi) that provably contain every global minimizer; ``minimizers``
    lists every integer argmin inside the box.
    """

    dim: int
    gram: tuple[tuple[Fraction, ...], ...]
    shift: tuple[Fraction, ...]
    value: Fraction
    minimizers: tuple[tuple[int, ...], ...]
    box: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.minimizers:
            raise ValueError("at least one minimizer must be recorded")
        for q in self.minimizers:
            if any(not lo <= c <= hi for c, (lo, hi) in zip(q, self.box)):
                raise ValueError("minimizer escapes the certified box")


@dataclass(frozen=True)
class QuadratureResult:
    """Exact midpoint-grid average of the lattice-minimum function.

    ``mean`` is the exact average over the grid with coordinates
    (2k+1)/(2N); ``error_bound`` is a rigorous bound on the difference
    between the mean and the true integral over the unit cube;
    ``comparisons`` ledgers the margins against the reference constants
    (the entries for 13/60 and 7/240 are conjectural, never ground truth).
    """

    points_per_axis: int
    mean: Fraction
    mean_float: float
    error_bound: Fraction
    comparisons: Mapping[str, Fraction]


# ---------------------------------------------------------------------------
# exact linear algebra helpers


def _as_gram(gram: Sequence[Sequence[Rat]]) -> tuple[tuple[Fraction, ...], ...]:
    rows = tuple(tuple(Fraction(x) for x in row) for row in gram)
    k = len(rows)
    if any(len(row) != k for row in rows):
        raise ValueError("gram matrix must be square")
    for i in range(k):
        for j in range(k):
            if rows[i][j] != rows[j][i]:
                raise ValueError("gram matrix must be symmetric")
    return rows


def _ldl_pivots(gram: Sequence[Sequence[Fraction]]) -> tuple[Fraction, ...]:
    """Diagonal pivots of the LDL' decomposition; all positive iff definite."""
    k = len(gram)
    a = [list(row) for row in gram]
    pivots: list[Fraction] = []
    for i in range(k):
        piv = a[i][i]
        if piv <= 0:
            raise ValueError("gram matrix is not positive definite")
        pivots.append(piv)
        for r in range(i + 1, k):
            factor = a[r][i] / piv
            for c in range(i, k):
                a[r][c] -= factor * a[i][c]
    return tuple(pivots)


def _sqrt_upper(x: Fraction) -> Fraction:
    """A rational upper bound for sqrt(x), exact when x is a perfect square."""
    if x < 0:
        raise ValueError("square root of a negative rational")
    p, q = x.numerator, x.denominator
    root = isqrt(p * q)
    if root * root == p * q:
        return Fraction(root, q)
    return Fraction(root + 1, q)


def _eval_int(gram_int: Sequence[Sequence[int]], v: Sequence[int]) -> int:
    total = 0
    k = len(v)
    for i in range(k):
        vi = v[i]
        row = gram_int[i]
        total += row[i] * vi * vi
        for j in range(i + 1, k):
            total += 2 * row[j] * vi * v[j]
    return total


# ---------------------------------------------------------------------------
# exact shifted minimization


def min_shifted(gram: Sequence[Sequence[Rat]], m: Sequence[Rat]) -> ShiftedQuadMin:
    """Exact minimum of Q(q + m) over integer vectors q.

    The enumeration box comes from the Schur complements of the inverse
    gram matrix: any point with value at most the starting value U0
    satisfies |q_i + m_i| <= sqrt(U0 * inv(G)_ii), so a full scan of the
    box finds the global minimum and every argmin.
    """
    g = _as_gram(gram)
    k = len(g)
    if not 1 <= k <= 4:
        raise ValueError("supported dimensions are 1 through 4")
    _ldl_pivots(g)
    shift = tuple(Fraction(x) for x in m)
    if len(shift) != k:
        raise ValueError("shift length must match the gram dimension")

    # integer rescaling: Q(q + m) = E(d*q + d*m) / (s * d^2) with E integral
    denom = 1
    for x in shift:
        denom = denom * x.denominator // math.gcd(denom, x.denominator)
    scale = 1
    for row in g:
        for x in row:
            scale = scale * x.denominator // math.gcd(scale, x.denominator)
    gram_int = [[int(x * scale) for x in row] for row in g]
    shift_int = [int(x * denom) for x in shift]

    def value_at(q: Sequence[int]) -> Fraction:
        v = [denom * q[i] + shift_int[i] for i in range(k)]
        return Fraction(_eval_int(gram_int, v), scale * denom * denom)

    start = tuple(-round(x) for x in shift)
    u0 = value_at(start)
    inv = _mat_inv(g)
    box: list[tuple[int, int]] = []
    for i in range(k):
        radius = _sqrt_upper(u0 * inv[i][i])
        box.append((math.ceil(-shift[i] - radius), math.floor(-shift[i] + radius)))

    best = u0
    argmins: list[tuple[int, ...]] = []
    for q in product(*(range(lo, hi + 1) for lo, hi in box)):
        val = value_at(q)
        if val < best:
            best = val
            argmins = [q]
        elif val == best:
            argmins.append(q)
    return ShiftedQuadMin(k, g, shift, best, tuple(argmins), tuple(box))


@lru_cache(maxsize=1)
def _principal_gram() -> tuple[tuple[Fraction, ...], ...]:
    """Gram matrix of the exponent form: HALF the even form's matrix.

    The distinguished form is even on the lattice, and the minimum that
    feeds the quadrature is the theta exponent q -> (1/2) q^T A q; all the
    printed reference values (the grid estimate, 13/60, 3/16) live in this
    normalization.
    """
    g = atlas().e.gram()
    return tuple(tuple(x / 2 for x in row) for row in g)


@lru_cache(maxsize=1)
def _even_gram_int() -> tuple[tuple[int, ...], ...]:
    """The even form's integer matrix A (twice the exponent gram)."""
    return tuple(tuple(int(x) for x in row) for row in atlas().e.gram())


def emin(x: Sequence[Rat]) -> Fraction:
    """min over integer q of f(q + x) for the distinguished definite form."""
    if len(x) != 4:
        raise ValueError("emin takes a rational 4-vector")
    return min_shifted(_principal_gram(), x).value


def affine_min(
    gram: Sequence[Sequence[Rat]],
    linear: Sequence[Rat],
    constant: Rat,
    denominator: int,
) -> tuple[Fraction, tuple[tuple[Fraction, ...], ...]]:
    """Exact minimum of Q(w) + linear.w + constant over w in (1/denominator)Z^k.

    Completing the square reduces each residue class of the refined lattice
    to a shifted minimization of the quadratic part; returns the minimum
    and every argmin vector.
    """
    g = _as_gram(gram)
    k = len(g)
    if denominator < 1:
        raise ValueError("denominator must be a positive integer")
    lin = [Fraction(x) for x in linear]
    if len(lin) != k:
        raise ValueError("linear part must match the gram dimension")
    # real critical point: 2 G w* = -linear
    centre = solve_linear([[2 * g[i][j] for j in range(k)] for i in range(k)], [-c for c in lin])
    assert centre is not None
    base = Fraction(constant) + sum(lin[i] * centre[i] for i in range(k)) / 2
    best: Fraction | None = None
    argmins: list[tuple[Fraction, ...]] = []
    step = Fraction(1, denominator)
    for residue in product(range(denominator), repeat=k):
        offset = [r * step for r in residue]
        res = min_shifted(g, [offset[i] - centre[i] for i in range(k)])
        value = res.value + base
        points = [tuple(q[i] + offset[i] for i in range(k)) for q in res.minimizers]
        if best is None or value < best:
            best = value
            argmins = points
        elif value == best:
            argmins.extend(points)
    assert best is not None
    return best, tuple(sorted(set(argmins)))


# ---------------------------------------------------------------------------
# the certified branch list for the quadrature


def _box_min(
    gram: Sequence[Sequence[Fraction]],
    lo: Sequence[Fraction],
    hi: Sequence[Fraction],
) -> Fraction:
    """Exact minimum of the definite form over a box, by face enumeration.

    A convex quadratic attains its box minimum at a point where each
    coordinate is either clamped to a bound or free and stationary; all
    3^k clamp patterns are solved exactly.
    """
    k = len(gram)
    best: Fraction | None = None
    for pattern in product((0, 1, 2), repeat=k):
        fixed = {i: (lo[i] if pattern[i] == 1 else hi[i]) for i in range(k) if pattern[i]}
        free = [i for i in range(k) if not pattern[i]]
        point = [Fraction(0)] * k
        for i, val in fixed.items():
            point[i] = val
        if free:
            rows = [[2 * gram[i][j] for j in free] for i in free]
            rhs = [
                -2 * sum(gram[i][j] * fixed[j] for j in fixed) for i in free
            ]
            sol = solve_linear(rows, rhs)
            if sol is None:
                continue
            ok = True
            for idx, i in enumerate(free):
                if not lo[i] <= sol[idx] <= hi[i]:
                    ok = False
                    break
                point[i] = sol[idx]
            if not ok:
                continue
        value = sum(
            gram[i][j] * point[i] * point[j] for i in range(k) for j in range(k)
        )
        if best is None or value < best:
            best = value
    assert best is not None
    return best


@lru_cache(maxsize=1)
def _cube_max() -> Fraction:
    """Exact maximum of the form over [-1/2, 1/2]^4 (attained at a corner)."""
    g = _principal_gram()
    half = Fraction(1, 2)
    best = Fraction(0)
    for corner in product((-half, half), repeat=4):
        val = sum(g[i][j] * corner[i] * corner[j] for i in range(4) for j in range(4))
        best = max(best, val)
    return best


@lru_cache(maxsize=1)
def quadrature_candidates() -> tuple[tuple[int, int, int, int], ...]:
    """Every integer shift whose branch can be active on the unit cube.

    fmin(x) <= M for all x, where M is the cube maximum of the form, so a
    shift q matters only if min over x in [0,1]^4 of f(x - q) <= M.  The
    scan window comes from a certified definiteness margin: f - c*|.|^2 is
    positive semidefinite for the rational constant c below, hence any
    point y with f(y) <= M has |y_i|^2 <= M/c.
    """
    g = _principal_gram()
    m_max = _cube_max()
    margin = Fraction(1, 5)
    shifted = [[g[i][j] - (margin if i == j else 0) for j in range(4)] for i in range(4)]
    _ldl_pivots(shifted)  # certifies the margin
    radius = _sqrt_upper(m_max / margin)
    lo_q = math.ceil(-radius)        # q = x - y with x in [0,1], |y_i| <= radius
    hi_q = math.floor(1 + radius)
    out: list[tuple[int, int, int, int]] = []
    for q in product(range(lo_q, hi_q + 1), repeat=4):
        # cheap certified prefilter: margin * dist(0, box)^2 <= box minimum
        dist_sq = sum(max(-qi, qi - 1, 0) ** 2 for qi in q)
        if margin * dist_sq > m_max:
            continue
        box_lo = [Fraction(-qi) for qi in q]
        box_hi = [Fraction(1 - qi) for qi in q]
        if _box_min(g, box_lo, box_hi) <= m_max:
            out.append(q)
    assert out
    # closure under the mirror symmetry q -> 1 - q used to halve the grid
    members = set(out)
    assert all((1 - a, 1 - b, 1 - c, 1 - d) in members for a, b, c, d in out)
    return tuple(sorted(out))


@lru_cache(maxsize=1)
def _penalty_matrix() -> np.ndarray:
    """pen[i, j] = l1-norm of G (q_i - q_j), the gradient gap of two branches."""
    cands = quadrature_candidates()
    g = _even_gram_int()
    arr = np.array(cands, dtype=np.int64)
    rows = []
    for q in cands:
        diff = arr - np.array(q, dtype=np.int64)
        grad = diff @ np.array(g, dtype=np.int64).T
        rows.append(np.abs(grad).sum(axis=1))
    return np.stack(rows)


# ---------------------------------------------------------------------------
# the midpoint-grid quadrature


def _slab_sums(n: int, k1: int) -> tuple[int, int]:
    """Scaled minimum sum and defect sum over one first-coordinate slab.

    Works with the even form's integer values E(q, j) = A[j - 2Nq] at odd
    numerators j; the exponent value at a cell center is min_q E / (8N^2).
    The defect sum bounds, per cell, the maximum over branches of the
    scaled affine gap E_best - E_q + 4N * |A (q_best - q)|_1, which
    dominates the deviation of the exponent minimum from its center branch
    over the cell.
    """
    cands = quadrature_candidates()
    pen = _penalty_matrix()
    two_n = 2 * n
    j1 = 2 * k1 + 1
    js = np.arange(1, two_n, 2, dtype=np.int64)
    min_threshold = 18 * n * n  # cell minima never exceed (2N)^2 * cube max
    defect_threshold = min_threshold + 4 * n * int(pen.max())

    def axis_values(qi: int) -> np.ndarray:
        return js - two_n * qi

    def slab_lower_bound(q: Sequence[int]) -> int:
        v1 = j1 - two_n * q[0]
        mins = []
        for qi in q[1:]:
            v = axis_values(qi)
            mins.append(int(np.min(np.abs(v))))
        # f(v) >= v1^2 + v2^2 and f(v) >= (2/3)(v3^2 + v4^2), exactly
        bound_a = v1 * v1 + mins[0] * mins[0]
        bound_b = 2 * (mins[1] * mins[1] + mins[2] * mins[2]) // 3
        return max(bound_a, bound_b)

    def branch_values(q: Sequence[int]) -> np.ndarray:
        v1 = j1 - two_n * q[0]
        v2 = axis_values(q[1])
        v3 = axis_values(q[2])
        v4 = axis_values(q[3])
        w = v1 + v2  # v1 + v2 couples to both of the last two coordinates
        c0 = 2 * v1 * v1
        a = 2 * v2 * v2 + 2 * v1 * v2
        b = 2 * v3 * v3 - 2 * np.multiply.outer(w, v3)
        c = 2 * v4 * v4 - 2 * np.multiply.outer(w, v4)
        return (
            (c0 + a)[:, None, None]
            + b[:, :, None]
            + c[:, None, :]
        )

    shape = (n, n, n)
    best = np.full(shape, np.iinfo(np.int64).max, dtype=np.int64)
    best_idx = np.zeros(shape, dtype=np.int32)
    active: list[int] = []
    for qi, q in enumerate(cands):
        if slab_lower_bound(q) > defect_threshold:
            continue
        active.append(qi)
        if slab_lower_bound(q) > min_threshold:
            continue
        values = branch_values(q)
        mask = values < best
        best = np.where(mask, values, best)
        best_idx = np.where(mask, np.int32(qi), best_idx)
    assert int(best.max()) <= min_threshold

    defect = np.zeros(shape, dtype=np.int64)
    four_n = 4 * n
    for qi in active:
        values = branch_values(cands[qi])
        gap = best - values + four_n * pen[best_idx, qi]
        np.maximum(defect, gap, out=defect)
    return int(best.sum()), int(defect.sum())


_GRID_CACHE: dict[int, QuadratureResult] = {}


def grid_mean(n: int, threads: int | None = None) -> QuadratureResult:
    """Exact average of emin over the grid with coordinates (2k+1)/(2N).

    The mirror symmetry x -> 1 - x pairs the first-coordinate slabs, so
    only half of them are evaluated; accumulation is exact integer
    arithmetic, making the result independent of the thread schedule.
    """
    if n < 1:
        raise ValueError("the grid needs at least one point per axis")
    cached = _GRID_CACHE.get(n)
    if cached is not None:
        return cached
    if threads is None:
        threads = min(8, os.cpu_count() or 1)
    half = [(k1, 2) for k1 in range((n - n % 2) // 2)]
    if n % 2:
        half.append(((n - 1) // 2, 1))
    total_min = 0
    total_defect = 0
    if threads > 1 and len(half) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda kw: _slab_sums(n, kw[0]), half))
    else:
        results = [_slab_sums(n, k1) for k1, _ in half]
    for (smin, sdef), (_, weight) in zip(results, half):
        total_min += weight * smin
        total_defect += weight * sdef
    mean = Fraction(total_min, 8 * n**6)
    # mean of each center branch over its cell exceeds the center value by
    # exactly trace(gram)/(12 N^2); the defect sum bounds branch switching
    trace = sum(_even_gram_int()[i][i] for i in range(4))
    bound = Fraction(trace, 24 * n * n) + Fraction(total_defect, 8 * n**6)
    result = QuadratureResult(
        points_per_axis=n,
        mean=mean,
        mean_float=float(mean),
        error_bound=bound,
        comparisons={
            "minus_3_16": mean - WEISSAUER_THRESHOLD,
            "minus_13_60_conjectural": mean - CONJECTURED_MEAN,
            "limit_7_240_conjectural": CONJECTURED_LIMIT_CONSTANT,
        },
    )
    _GRID_CACHE[n] = result
    return result


def grid_mean_reference(n: int) -> Fraction:
    """Slow exact reference: per-point branch minimization, no numpy."""
    if n < 1:
        raise ValueError("the grid needs at least one point per axis")
    g_int = _even_gram_int()
    cands = quadrature_candidates()
    two_n = 2 * n
    total = 0
    for k in product(range(n), repeat=4):
        j = [2 * ki + 1 for ki in k]
        total += min(
            _eval_int(g_int, [j[i] - two_n * q[i] for i in range(4)]) for q in cands
        )
    return Fraction(total, 8 * n**6)


def error_certificate(n: int, threads: int | None = None) -> Fraction:
    """Rigorous bound on |grid_mean(n) - integral of emin over the cube|."""
    return grid_mean(n, threads).error_bound


def weissauer_margin(n: int, threads: int | None = None) -> Fraction:
    """Certified signed margin grid_mean(n) - 3/16.

    Raises when the error bound cannot separate the mean from 3/16; the
    comparison ledger of grid_mean carries the conjectural distances.
    """
    result = grid_mean(n, threads)
    margin = result.mean - WEISSAUER_THRESHOLD
    if result.error_bound >= abs(margin):
        raise ValueError(
            "error bound does not certify the sign of the margin; increase the grid"
        )
    return margin
