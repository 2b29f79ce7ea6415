"""Built-in cones of quadratic forms, their reflection groups, and the
bicoloured-graph bookkeeping for faces.

The atlas hard-codes a small zoo of rational polyhedral cones in the space of
quadratic forms on Z^g (g <= 4), all spanned by squares of integral linear
forms:

* ``pi1(g)`` -- the first principal cone of rank g, spanned by the squares
  x_i^2 and (x_i - x_j)^2;
* ``pi2_4`` -- the second principal cone of rank 4, spanned by the twelve
  squares listed in ``_GENERATOR_LINES``;
* ``e`` -- the distinguished positive definite form spanning the extra ray
  used to extend the face fan of ``pi2_4``, together with two of its
  reflection images and the three extended cones ``Pi2_1``/``Pi2_2``/``Pi2_3``.

Each generator of ``pi2_4`` is tagged with a vertex pair {i,j} and a colour
(``GENERATOR_SLOTS``); a face is drawn as a graph on four vertices whose
edges are the tags of either its vanishing or its non-vanishing generators,
and all orbit classifications below are stated in terms of these graphs.

The symmetry group of ``pi2_4`` fixing ``e`` has order 1152; the stabilizer
of the ray through the first generator has order 96.  Both are enumerated
exactly by breadth-first closure over integer matrices.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Mapping, Sequence

from .lattice_forms import (
    LatticeMap,
    QuadForm,
    _rank,
    act,
    integer_kernel,
    lattice_map,
    linear_form,
    linear_root,
    project,
    quadform,
    square,
    y_to_x,
)

# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class Cone:
    """A rational polyhedral cone given by primitive integral generators."""

    dim: int
    generators: tuple[QuadForm, ...]
    name: str | None = None

    def __post_init__(self) -> None:
        seen: set[tuple[Fraction, ...]] = set()
        for q in self.generators:
            if q.dim != self.dim:
                raise ValueError("generator dimension does not match cone dimension")
            if not _is_primitive_coords(q.coords):
                raise ValueError(f"generator {q} is not primitive")
            if q.coords in seen:
                raise ValueError(f"duplicate generator {q}")
            seen.add(q.coords)


@dataclass(frozen=True)
class FaceLabel:
    """A face of a named cone, recorded as a sorted subset of generator indices."""

    parent: str
    indices: tuple[int, ...]
    orbit_tag: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if list(self.indices) != sorted(set(self.indices)):
            raise ValueError("indices must be sorted and distinct")
        if self.indices and self.indices[0] < 0:
            raise ValueError("indices must be nonnegative")


Colour = str  # "black" | "red"

BLACK = "black"
RED = "red"


@dataclass(frozen=True)
class BicolouredGraph:
    """Edges on the vertex set {1,2,3,4}, each carrying one of two colours.

    Vertices are numbered clockwise starting from the top left.  A vertex
    pair may carry one edge of each colour (that happens for faces containing
    both generators tagged with the same pair), but never two edges of the
    same colour.
    """

    edges: tuple[tuple[tuple[int, int], Colour], ...]

    def __post_init__(self) -> None:
        for (i, j), colour in self.edges:
            if not (1 <= i < j <= 4):
                raise ValueError(f"bad vertex pair ({i},{j})")
            if colour not in (BLACK, RED):
                raise ValueError(f"bad colour {colour!r}")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate coloured edge")
        if tuple(sorted(self.edges)) != self.edges:
            raise ValueError("edges must be sorted")

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(pair for pair, _ in self.edges)

    def colour_count(self, colour: Colour) -> int:
        return sum(1 for _, c in self.edges if c == colour)


@dataclass(frozen=True)
class MatrixGroup:
    """A finite group of unimodular lattice maps, fully enumerated.

    ``elements`` is closed under products and inverses and is sorted by the
    flattened integer entries, so equal groups compare equal.
    """

    generators: tuple[LatticeMap, ...]
    elements: tuple[LatticeMap, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, m: LatticeMap) -> bool:
        return m in self.elements


# ---------------------------------------------------------------------------
# the built-in data

#: Linear forms whose squares generate the rank-4 second principal cone, in
#: the fixed order used by every index in this package.
_GENERATOR_LINES: tuple[tuple[int, int, int, int], ...] = (
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
    (1, 0, -1, 0),
    (1, 0, 0, -1),
    (0, 1, -1, 0),
    (0, 1, 0, -1),
    (0, 0, 1, -1),
    (1, 1, -1, 0),
    (1, 1, 0, -1),
    (1, 1, -1, -1),
)

#: Vertex-pair/colour tag of each generator, aligned with _GENERATOR_LINES.
#: The tags are what the graph encodings of faces are built from.
GENERATOR_SLOTS: tuple[tuple[tuple[int, int], Colour], ...] = (
    ((1, 2), BLACK),
    ((1, 2), RED),
    ((1, 3), RED),
    ((1, 4), RED),
    ((2, 3), BLACK),
    ((2, 4), BLACK),
    ((2, 3), RED),
    ((2, 4), RED),
    ((3, 4), RED),
    ((1, 3), BLACK),
    ((1, 4), BLACK),
    ((3, 4), BLACK),
)


@dataclass(frozen=True)
class Atlas:
    """All named constants, constructed once and shared via :func:`atlas`."""

    e: QuadForm
    e_prime: QuadForm
    e_prime_wall: QuadForm
    pi2_4: Cone
    sigma0: FaceLabel
    sigma1: FaceLabel
    pi2_1: Cone
    pi2_2: Cone
    pi2_3: Cone
    mu6_face: FaceLabel
    dim2_representatives: tuple[FaceLabel, FaceLabel]
    dim3_representatives: Mapping[str, FaceLabel]
    y_generators: Mapping[str, LatticeMap]
    x_generators: Mapping[str, LatticeMap]
    g_generator_names: tuple[str, ...]
    g1_generator_names: tuple[str, ...]
    cones: Mapping[str, Cone]

    def pi1(self, g: int) -> Cone:
        if not 2 <= g <= 4:
            raise ValueError("pi1(g) is built in for g = 2, 3, 4 only")
        return self.cones[f"pi1_{g}"]

    @property
    def g_generators(self) -> tuple[LatticeMap, ...]:
        return tuple(self.x_generators[n] for n in self.g_generator_names)

    @property
    def g1_generators(self) -> tuple[LatticeMap, ...]:
        return tuple(self.x_generators[n] for n in self.g1_generator_names)


def _pi1_cone(g: int) -> Cone:
    lines = [[int(i == k) for k in range(g)] for i in range(g)]
    for i in range(g):
        for j in range(i + 1, g):
            lines.append([int(k == i) - int(k == j) for k in range(g)])
    gens = tuple(square(linear_form(line)) for line in lines)
    return Cone(g, gens, name=f"pi1_{g}")


def _y_generator_table() -> dict[str, LatticeMap]:
    table: dict[str, LatticeMap] = {}
    for i in range(1, 5):
        table[f"k{i}"] = lattice_map(
            [[-1 if (r == c == i - 1) else int(r == c) for c in range(4)] for r in range(4)]
        )
    for i in range(1, 5):
        for j in range(i + 1, 5):
            perm = list(range(4))
            perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
            table[f"s{i}{j}"] = lattice_map(
                [[int(perm[r] == c) for c in range(4)] for r in range(4)]
            )
    half = Fraction(1, 2)
    table["w"] = lattice_map([[half - int(r == c) for c in range(4)] for r in range(4)])
    table["w_prime"] = table["s14"] @ table["s23"] @ table["w"]
    table["k1k2"] = table["k1"] @ table["k2"]
    return table


@lru_cache(maxsize=1)
def atlas() -> Atlas:
    gens = tuple(square(linear_form(line)) for line in _GENERATOR_LINES)
    pi2 = Cone(4, gens, name="pi2_4")

    e = quadform(4, (2, 2, 2, 2, 1, -1, -1, -1, -1, 0))
    e_prime = quadform(4, (2, 2, 2, 2, -1, 1, -1, -1, 0, -1))
    e_prime_wall = quadform(4, (2, 2, 2, 2, 0, -1, -1, -1, -1, 1))
    total = [sum(q.coords[k] for q in gens) for k in range(10)]
    assert all(t == 3 * c for t, c in zip(total, e.coords))

    y_table = _y_generator_table()
    x_table = {name: y_to_x(m) for name, m in y_table.items()}
    for m in x_table.values():
        assert act(m, e).coords == e.coords

    sigma0 = FaceLabel("pi2_4", (0, 1, 2, 3, 4, 5, 6, 7, 11))
    sigma1 = FaceLabel("pi2_4", (0, 1, 2, 3, 4, 5, 6, 7, 8))

    def extended(indices: tuple[int, ...], name: str) -> Cone:
        return Cone(4, tuple(gens[i] for i in indices) + (e,), name=name)

    pi2_1 = extended((0, 1, 3, 4, 5, 6, 7, 8, 9), "Pi2_1")
    pi2_2 = extended(sigma1.indices, "Pi2_2")
    pi2_3 = extended((0, 1, 2, 3, 4, 5, 6, 8, 9), "Pi2_3")

    cones: dict[str, Cone] = {
        "pi2_4": pi2,
        "pi1_2": _pi1_cone(2),
        "pi1_3": _pi1_cone(3),
        "pi1_4": _pi1_cone(4),
        "Pi2_1": pi2_1,
        "Pi2_2": pi2_2,
        "Pi2_3": pi2_3,
    }

    return Atlas(
        e=e,
        e_prime=e_prime,
        e_prime_wall=e_prime_wall,
        pi2_4=pi2,
        sigma0=sigma0,
        sigma1=sigma1,
        pi2_1=pi2_1,
        pi2_2=pi2_2,
        pi2_3=pi2_3,
        mu6_face=FaceLabel("pi2_4", (0, 2, 3, 4, 5, 8)),
        dim2_representatives=(
            FaceLabel("pi2_4", (0, 1)),
            FaceLabel("pi2_4", (0, 2)),
        ),
        dim3_representatives={
            "string": FaceLabel("pi2_4", (0, 1, 2)),
            "BFstar": FaceLabel("pi2_4", (0, 2, 3)),
            "RTstar": FaceLabel("pi2_4", (0, 3, 5)),
            "disconnected": FaceLabel("pi2_4", (0, 1, 8)),
        },
        y_generators=y_table,
        x_generators=x_table,
        g_generator_names=(
            "k1",
            "k2",
            "k3",
            "k4",
            "s12",
            "s13",
            "s14",
            "s23",
            "s24",
            "s34",
            "w",
        ),
        g1_generator_names=("k3", "k4", "k1k2", "s12", "s34", "w_prime"),
        cones=cones,
    )


def cone_by_name(name: str) -> Cone:
    at = atlas()
    if name not in at.cones:
        raise ValueError(f"unknown cone {name!r}")
    return at.cones[name]


def face_generators(face: FaceLabel) -> tuple[QuadForm, ...]:
    cone = cone_by_name(face.parent)
    if face.indices and face.indices[-1] >= len(cone.generators):
        raise ValueError("face index out of range for its parent cone")
    return tuple(cone.generators[i] for i in face.indices)


@lru_cache(maxsize=1)
def symmetry_group() -> MatrixGroup:
    """The full symmetry group: order 1152, permutes the 12 generators."""
    at = atlas()
    return generate_group(at.g_generators)


@lru_cache(maxsize=1)
def ray_stabilizer_group() -> MatrixGroup:
    """The stabilizer of the first generator ray: order 96.

    Built from its own generator list; tests cross-check it against direct
    stabilizer enumeration inside the full group.
    """
    return generate_group(atlas().g1_generators)


# ---------------------------------------------------------------------------
# group machinery


def _int_matrix(m: LatticeMap) -> tuple[tuple[int, ...], ...]:
    for row in m.matrix:
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not integral")
    return tuple(tuple(int(x) for x in row) for row in m.matrix)


def _int_mat_mul(
    a: tuple[tuple[int, ...], ...], b: tuple[tuple[int, ...], ...]
) -> tuple[tuple[int, ...], ...]:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def generate_group(gens: Sequence[LatticeMap], cap: int = 10000) -> MatrixGroup:
    """Breadth-first closure of unimodular generators under multiplication."""
    if not gens:
        raise ValueError("need at least one generator")
    dim = gens[0].dim
    mats = []
    for m in gens:
        if m.dim != dim:
            raise ValueError("generators of mixed dimension")
        mat = _int_matrix(m)
        if m.determinant not in (1, -1):
            raise ValueError("generators must be unimodular")
        mats.append(mat)
    identity = tuple(tuple(int(r == c) for c in range(dim)) for r in range(dim))
    elements = {identity}
    frontier = [identity]
    while frontier:
        new: list[tuple[tuple[int, ...], ...]] = []
        for a in frontier:
            for g in mats:
                p = _int_mat_mul(a, g)
                if p not in elements:
                    elements.add(p)
                    new.append(p)
                    if len(elements) > cap:
                        raise ValueError(
                            f"group closure exceeded cap = {cap}; wrong generators?"
                        )
        frontier = new
    ordered = tuple(lattice_map(m) for m in sorted(elements))
    return MatrixGroup(tuple(gens), ordered)


def _primitive_coords(coords: Sequence[Fraction]) -> tuple[Fraction, ...]:
    scale = lcm(*(c.denominator for c in coords))
    ints = [int(c * scale) for c in coords]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g == 0:
        raise ValueError("zero form has no primitive representative")
    return tuple(Fraction(v, g) for v in ints)


def _is_primitive_coords(coords: Sequence[Fraction]) -> bool:
    if any(c.denominator != 1 for c in coords):
        return False
    g = 0
    for c in coords:
        g = gcd(g, abs(c.numerator))
    return g == 1


def primitive_form(q: QuadForm) -> QuadForm:
    """The primitive integral form spanning the same ray."""
    return QuadForm(q.dim, _primitive_coords(q.coords))


@lru_cache(maxsize=8)
def _integer_elements(grp: MatrixGroup) -> tuple[tuple[tuple[int, ...], ...], ...]:
    return tuple(_int_matrix(m) for m in grp.elements)


def _act_coords_int(
    mat: tuple[tuple[int, ...], ...], gram: tuple[tuple[int, ...], ...], dim: int
) -> tuple[int, ...]:
    ma = _int_mat_mul(mat, gram)
    b = _int_mat_mul(ma, tuple(zip(*mat)))
    out = [b[i][i] for i in range(dim)]
    out.extend(b[i][j] for i in range(dim) for j in range(i + 1, dim))
    return tuple(out)


def _int_gram(q: QuadForm) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in q.gram())


def orbit_and_stabilizer(grp: MatrixGroup, ray: QuadForm) -> tuple[int, MatrixGroup]:
    """Orbit size of the ray and its stabilizer subgroup."""
    base = primitive_form(ray)
    gram = _int_gram(base)
    base_key = tuple(int(c) for c in base.coords)
    orbit: set[tuple[int, ...]] = set()
    stab: list[LatticeMap] = []
    for m, mat in zip(grp.elements, _integer_elements(grp)):
        key = _act_coords_int(mat, gram, base.dim)
        orbit.add(key)
        if key == base_key:
            stab.append(m)
    return len(orbit), MatrixGroup(tuple(stab), tuple(stab))


def _permutation_on_generators(
    mat: tuple[tuple[int, ...], ...], cone: Cone
) -> tuple[int, ...]:
    index = {tuple(int(c) for c in q.coords): i for i, q in enumerate(cone.generators)}
    perm = []
    for q in cone.generators:
        key = _act_coords_int(mat, _int_gram(q), cone.dim)
        pos = index.get(key)
        if pos is None:
            raise ValueError(
                f"group element does not permute the generators of {cone.name}"
            )
        perm.append(pos)
    if len(set(perm)) != len(perm):
        raise ValueError(f"group element does not permute the generators of {cone.name}")
    return tuple(perm)


@lru_cache(maxsize=8)
def _generator_permutations(grp: MatrixGroup, parent: str) -> tuple[tuple[int, ...], ...]:
    cone = cone_by_name(parent)
    return tuple(
        _permutation_on_generators(mat, cone) for mat in _integer_elements(grp)
    )


def map_face(m: LatticeMap, face: FaceLabel) -> FaceLabel:
    """The image face under a symmetry (m must permute the parent generators)."""
    cone = cone_by_name(face.parent)
    perm = _permutation_on_generators(_int_matrix(m), cone)
    return FaceLabel(face.parent, tuple(sorted(perm[i] for i in face.indices)))


@dataclass(frozen=True)
class FaceOrbit:
    representative: FaceLabel
    members: tuple[FaceLabel, ...]

    @property
    def size(self) -> int:
        return len(self.members)


def face_orbits(grp: MatrixGroup, faces: Sequence[FaceLabel]) -> tuple[FaceOrbit, ...]:
    """Partition faces into orbits; representative = lexicographically least."""
    if not faces:
        return ()
    parent = faces[0].parent
    dim = len(faces[0].indices)
    for f in faces:
        if f.parent != parent or len(f.indices) != dim:
            raise ValueError("faces must share one parent cone and one dimension")
    perms = _generator_permutations(grp, parent)
    index_sets = {f.indices for f in faces}
    seen: set[tuple[int, ...]] = set()
    orbits: list[FaceOrbit] = []
    for start in sorted(index_sets):
        if start in seen:
            continue
        images = {tuple(sorted(p[i] for i in start)) for p in perms}
        members = tuple(
            FaceLabel(parent, s) for s in sorted(images & index_sets)
        )
        seen.update(images & index_sets)
        rep = FaceLabel(parent, min(images))
        orbits.append(FaceOrbit(rep, members))
    return tuple(sorted(orbits, key=lambda o: o.representative.indices))


# ---------------------------------------------------------------------------
# graphs and face classification


def face_graph(face: FaceLabel, mode: str) -> BicolouredGraph:
    """Graph encoding of a face: tags of vanishing or non-vanishing generators.

    ``vanishing`` draws the generators *not* in the face (used for facets),
    ``nonvanishing`` draws the face's own generators (used in low dimension).
    """
    if face.parent != "pi2_4":
        raise ValueError("face graphs are defined for faces of pi2_4")
    if mode not in ("vanishing", "nonvanishing"):
        raise ValueError("mode must be 'vanishing' or 'nonvanishing'")
    if face.indices and face.indices[-1] >= 12:
        raise ValueError("face index out of range")
    chosen = (
        [i for i in range(12) if i not in face.indices]
        if mode == "vanishing"
        else list(face.indices)
    )
    return BicolouredGraph(tuple(sorted(GENERATOR_SLOTS[i] for i in chosen)))


def _three_edge_shape(graph: BicolouredGraph) -> str:
    """Shape of a 3-edge graph: triangle, fork, path, or a doubled pair plus
    an adjacent/disjoint edge."""
    pairs = [frozenset(p) for p in graph.pairs]
    if len(pairs) != 3:
        raise ValueError("shape analysis needs exactly three edges")
    distinct = set(pairs)
    if len(distinct) == 2:
        doubled = next(p for p in distinct if pairs.count(p) == 2)
        other = next(p for p in distinct if p != doubled)
        return "doubled_adjacent" if doubled & other else "doubled_disjoint"
    vertices = set().union(*distinct)
    if len(vertices) == 3:
        return "triangle"
    degrees = Counter(v for p in distinct for v in p)
    return "fork" if 3 in degrees.values() else "path"


@lru_cache(maxsize=1)
def facet_labels() -> tuple[FaceLabel, ...]:
    """All facets of pi2_4, found by exact rank/annihilator search over 9-subsets."""
    gens = atlas().pi2_4.generators
    rows = [[int(c) for c in q.coords] for q in gens]
    out: list[FaceLabel] = []
    for subset in itertools.combinations(range(12), 9):
        sub = [rows[i] for i in subset]
        if _rank(sub) != 9:
            continue
        kern = integer_kernel(sub)
        assert len(kern) == 1
        y = kern[0]
        others = [j for j in range(12) if j not in subset]
        vals = [sum(a * b for a, b in zip(y, rows[j])) for j in others]
        if all(v > 0 for v in vals) or all(v < 0 for v in vals):
            out.append(FaceLabel("pi2_4", subset))
    return tuple(out)


def facet_type(facet: FaceLabel) -> str:
    """"RT" for even-black vanishing triangles, "BF" for the rest."""
    if facet.parent != "pi2_4" or len(facet.indices) != 9:
        raise ValueError("facet_type expects a facet of pi2_4")
    graph = face_graph(facet, "vanishing")
    shape = _three_edge_shape(graph)
    if shape not in ("triangle", "fork"):
        raise ValueError("not a facet: vanishing graph is neither triangle nor fork")
    if shape == "triangle" and graph.colour_count(BLACK) % 2 == 0:
        return "RT"
    return "BF"


def classify_dim3(face: FaceLabel) -> str:
    """Orbit label of a 3-dimensional face: string, BFstar, RTstar, disconnected."""
    if face.parent != "pi2_4" or len(face.indices) != 3:
        raise ValueError("classify_dim3 expects a 3-generator face of pi2_4")
    graph = face_graph(face, "nonvanishing")
    shape = _three_edge_shape(graph)
    if shape == "triangle":
        return "RTstar" if graph.colour_count(BLACK) % 2 == 0 else "BFstar"
    if shape == "fork":
        return "BFstar"
    if shape in ("path", "doubled_adjacent"):
        return "string"
    return "disconnected"


@dataclass(frozen=True)
class AdjoiningFacets:
    ray_index: int
    rt: tuple[FaceLabel, ...]
    bf: tuple[FaceLabel, ...]

    @property
    def counts(self) -> dict[str, int]:
        return {"RT": len(self.rt), "BF": len(self.bf)}

    @property
    def total(self) -> int:
        return len(self.rt) + len(self.bf)


def generator_index(ray: QuadForm) -> int | None:
    """Index of the pi2_4 generator spanning the same ray, if any."""
    target = primitive_form(ray).coords
    for i, q in enumerate(atlas().pi2_4.generators):
        if q.coords == target:
            return i
    return None


def facets_adjoining(ray: QuadForm) -> AdjoiningFacets:
    """The facets containing a generator ray, split into RT and BF."""
    idx = generator_index(ray)
    if idx is None:
        raise ValueError("ray is not a generator of pi2_4")
    rt: list[FaceLabel] = []
    bf: list[FaceLabel] = []
    for f in facet_labels():
        if idx in f.indices:
            (rt if facet_type(f) == "RT" else bf).append(f)
    return AdjoiningFacets(idx, tuple(rt), tuple(bf))


def _orbit_key(indices: tuple[int, ...], perms: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    return min(tuple(sorted(p[i] for i in indices)) for p in perms)


@lru_cache(maxsize=1)
def _g1_bf_keys() -> dict[tuple[int, ...], str]:
    at = atlas()
    perms = _generator_permutations(ray_stabilizer_group(), "pi2_4")
    return {
        _orbit_key(at.sigma1.indices, perms): "Pi2_2",
        _orbit_key((0, 1, 2, 3, 4, 5, 6, 8, 9), perms): "Pi2_3",
    }


def g1_class(facet: FaceLabel) -> str:
    """Stabilizer-orbit label (Pi2_1/Pi2_2/Pi2_3) of a facet adjoining the
    first generator ray: which of the three extended cones the span of the
    facet together with the core form is equivalent to under the stabilizer.

    RT facets extend to the first type; BF facets are classified by exact
    orbit membership against the two pinned BF representatives.
    """
    if facet.parent != "pi2_4" or len(facet.indices) != 9:
        raise ValueError("g1_class expects a facet of pi2_4")
    if 0 not in facet.indices:
        raise ValueError("facet does not adjoin the first generator ray")
    if facet_type(facet) == "RT":
        return "Pi2_1"
    perms = _generator_permutations(ray_stabilizer_group(), "pi2_4")
    key = _orbit_key(facet.indices, perms)
    label = _g1_bf_keys().get(key)
    if label is None:
        raise ValueError("facet is not stabilizer-equivalent to a BF representative")
    return label


# ---------------------------------------------------------------------------
# the six-generator face with three-dimensional span


@dataclass(frozen=True)
class OppositePartition:
    opposite: tuple[tuple[int, int], ...]
    non_opposite: tuple[tuple[int, int], ...]


def opposite_pairs(mu6_face: FaceLabel) -> OppositePartition:
    """Split the 15 generator pairs of a six-line rank-3 face into 3 opposite
    and 12 non-opposite pairs.

    Two generators are opposite when, restricting to the kernel of either
    one's linear form, the other is the unique generator whose image ray is
    not shared (the image rays always come with multiplicities 2, 2, 1).
    """
    gens = face_generators(mu6_face)
    if len(gens) != 6:
        raise ValueError("need a face with exactly six generators")
    lines = [linear_root(q) for q in gens]
    coeff_rows = [[int(c) for c in l.coeffs] for l in lines]
    if _rank(coeff_rows) != 3:
        raise ValueError("face generators must span a three-dimensional line space")
    partner: dict[int, int] = {}
    for pos, idx in enumerate(mu6_face.indices):
        basis = integer_kernel([coeff_rows[pos]])
        hits: dict[tuple[int, ...], list[int]] = {}
        for pos2, idx2 in enumerate(mu6_face.indices):
            if pos2 == pos:
                continue
            img = [sum(b * c for b, c in zip(vec, coeff_rows[pos2])) for vec in basis]
            if all(v == 0 for v in img):
                raise ValueError("two generators share a line; not a six-line face")
            g = 0
            for v in img:
                g = gcd(g, abs(v))
            img = [v // g for v in img]
            lead = next(v for v in img if v != 0)
            if lead < 0:
                img = [-v for v in img]
            hits.setdefault(tuple(img), []).append(idx2)
        sizes = sorted(len(v) for v in hits.values())
        if sizes != [1, 2, 2]:
            raise ValueError("image-ray multiplicities are not (2,2,1); wrong face type")
        partner[idx] = next(v[0] for v in hits.values() if len(v) == 1)
    for idx, other in partner.items():
        if partner[other] != idx:
            raise ValueError("opposite relation is not an involution; wrong face type")
    opposite = tuple(sorted({tuple(sorted((i, j))) for i, j in partner.items()}))
    non_opposite = tuple(
        p
        for p in itertools.combinations(mu6_face.indices, 2)
        if p not in opposite
    )
    return OppositePartition(opposite, non_opposite)


# ---------------------------------------------------------------------------
# wire format


ATLAS_WIRE_VERSION = 1

_ATLAS_DATA_FILE = f"atlas_v{ATLAS_WIRE_VERSION}.json"


def atlas_wire_payload() -> dict:
    """The atlas in the dual-basis wire format shipped under ``data/``.

    All form coordinates are integer rows in the slot order 11, 22, 33, 44,
    12, 13, 14, 23, 24, 34; group matrices are exact entry strings in the
    diagonalizing coordinates, columns being images of basis vectors.
    """
    at = atlas()

    def int_coords(q: QuadForm) -> list[int]:
        assert all(c.denominator == 1 for c in q.coords)
        return [int(c) for c in q.coords]

    def cone_payload(cone: Cone) -> dict:
        return {
            "dim": cone.dim,
            "generators": [int_coords(g) for g in cone.generators],
        }

    def matrix_payload(m: LatticeMap) -> list[list[str]]:
        return [[str(x) for x in row] for row in m.matrix]

    slot_names = ["11", "22", "33", "44", "12", "13", "14", "23", "24", "34"]
    return {
        "format": "nefcone-atlas",
        "version": ATLAS_WIRE_VERSION,
        "coordinate_order": slot_names,
        "generator_lines": [list(line) for line in _GENERATOR_LINES],
        "generator_slots": [
            {"pair": list(pair), "colour": colour} for pair, colour in GENERATOR_SLOTS
        ],
        "special_rays": {
            "e": int_coords(at.e),
            "e_prime": int_coords(at.e_prime),
            "e_prime_wall": int_coords(at.e_prime_wall),
        },
        "cones": {name: cone_payload(cone) for name, cone in sorted(at.cones.items())},
        "faces": {
            "sigma0": list(at.sigma0.indices),
            "sigma1": list(at.sigma1.indices),
            "six_line": list(at.mu6_face.indices),
            "dim2_representatives": [list(f.indices) for f in at.dim2_representatives],
            "dim3_representatives": {
                name: list(f.indices)
                for name, f in sorted(at.dim3_representatives.items())
            },
        },
        "group": {
            "y_generators": {
                name: matrix_payload(m) for name, m in sorted(at.y_generators.items())
            },
            "g_generator_names": list(at.g_generator_names),
            "g1_generator_names": list(at.g1_generator_names),
            "orders": {
                "full": symmetry_group().order,
                "ray_stabilizer": ray_stabilizer_group().order,
            },
        },
    }


def shipped_atlas() -> dict:
    """Parse the bundled wire-format atlas data file."""
    import json
    from importlib import resources

    text = (
        resources.files("nefcone").joinpath("data").joinpath(_ATLAS_DATA_FILE)
    ).read_text(encoding="utf-8")
    return json.loads(text)
