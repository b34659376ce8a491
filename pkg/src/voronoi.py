#!/usr/bin/env python3
"""
Voronoi cells of graphs and twisted mixed Voronoi tilings.

The Voronoi cell of a graph lives in the cut space F; its faces are
indexed by coherent acyclic orientations of cut subgraphs (CAC). A
twisted mixed tiling assigns to every potential f whose active subgraph
is connected the tile d*(level) + Vor(active subgraph), written in the
sum-zero coordinates H0 = {x : sum x = 0}.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from sympy import Matrix
from sympy.utilities.iterables import multiset_partitions
from tqdm import tqdm

from .feasibility import Inequality, find_point, inequality
from .graphcore import (
    Graph,
    LevelVector,
    OrientedEdge,
    ZeroCochain,
    apply_d,
    apply_d_star,
    laplacian,
)
from .lattice import Bond, enumerate_bonds
from .utils import (
    NotATileError,
    Scalar,
    ValidationError,
    WindowError,
    check_vertex_cap,
    format_half_integer,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CACOrientation:
    """
    Coherent acyclic orientation of a cut subgraph.

    Equality is equality of the oriented edge set; the ordered partition
    is kept only as a witness.
    """

    oriented_edges: FrozenSet[OrientedEdge]
    witness: Tuple[FrozenSet[int], ...] = field(default=(), compare=False, hash=False)

    @classmethod
    def from_partition(cls, g: Graph, parts: Sequence[Iterable[int]]) -> "CACOrientation":
        """Orient every edge between two parts from the earlier part to the later one."""
        blocks = tuple(frozenset(p) for p in parts)
        rank = {}
        for i, block in enumerate(blocks):
            for v in block:
                rank[v] = i
        if sorted(rank) != list(range(g.n)):
            raise ValidationError("Ordered partition must cover every vertex once")
        oriented = set()
        for e, (t, h) in enumerate(g.edges):
            if rank[t] < rank[h]:
                oriented.add(OrientedEdge(e, 1))
            elif rank[t] > rank[h]:
                oriented.add(OrientedEdge(e, -1))
        return cls(frozenset(oriented), blocks)

    @property
    def cut_edges(self) -> FrozenSet[int]:
        return frozenset(oe.edge for oe in self.oriented_edges)

    def chi(self, m: int) -> Tuple[int, ...]:
        vec = [0] * m
        for oe in self.oriented_edges:
            vec[oe.edge] = oe.sign
        return tuple(vec)

    def precedes(self, other: "CACOrientation") -> bool:
        """self <= other in the CAC order: E(other) is contained in E(self)."""
        return other.oriented_edges <= self.oriented_edges

    def sorted_edges(self) -> List[OrientedEdge]:
        return sorted(self.oriented_edges)

    def key(self, g: Graph) -> str:
        return ",".join(g.oriented_name(oe) for oe in self.sorted_edges())

    def to_json(self, g: Graph) -> dict:
        return {
            "oriented_edges": [g.oriented_name(oe) for oe in self.sorted_edges()],
            "witness": [sorted(g.vertices[v] for v in part) for part in self.witness],
        }


@dataclass(frozen=True)
class CACPoset:
    """CAC elements ordered by reverse inclusion of oriented edge sets."""

    graph: Graph
    elements: Tuple[CACOrientation, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def leq(self, i: int, j: int) -> bool:
        return self.elements[i].precedes(self.elements[j])

    def minimal(self) -> List[CACOrientation]:
        return [
            d
            for i, d in enumerate(self.elements)
            if not any(j != i and self.leq(j, i) for j in range(len(self.elements)))
        ]

    def index(self, d: CACOrientation) -> int:
        return self.elements.index(d)

    def to_json(self) -> List[dict]:
        return [d.to_json(self.graph) for d in self.elements]


def _ordered_partitions(n: int):
    for partition in multiset_partitions(list(range(n))):
        for order in itertools.permutations(partition):
            yield order


def enumerate_cac(g: Graph, max_vertices: Optional[int] = None) -> CACPoset:
    """
    All coherent acyclic orientations of cut subgraphs.

    Args:
        g: Graph
        max_vertices: Vertex cap for the ordered-partition scan

    Returns:
        CACPoset sorted by number of oriented edges, then edge order

    Raises:
        SizeLimitError: If the graph is above the vertex cap
    """
    check_vertex_cap(g.n, max_vertices)
    seen: Dict[FrozenSet[OrientedEdge], CACOrientation] = {}
    for parts in _ordered_partitions(g.n):
        d = CACOrientation.from_partition(g, parts)
        seen.setdefault(d.oriented_edges, d)
    elements = sorted(seen.values(), key=lambda d: (len(d.oriented_edges), d.sorted_edges()))
    logger.debug("enumerated %d CAC elements", len(elements))
    return CACPoset(g, tuple(elements))


def face_dimension(g: Graph, d: CACOrientation) -> int:
    """|V| minus the number of components of G - E(D)."""
    kept = [e for e in range(g.m) if e not in d.cut_edges]
    return g.n - len(g.components(kept))


@dataclass(frozen=True)
class CellVertex:
    """Vertex of a Voronoi cell in three coordinate systems."""

    potential: Tuple[Fraction, ...]
    cut: Tuple[Fraction, ...]
    h0: Tuple[Fraction, ...]


@dataclass(frozen=True)
class CellFace:
    vertices: FrozenSet[int]
    tight: FrozenSet[int]
    dimension: int
    orientation: CACOrientation


@dataclass(frozen=True)
class CellGeometry:
    """
    Halfspaces, vertices and faces of the Voronoi cell of a graph.

    Halfspaces are 2<z, beta> <= |beta|^2 for every bond beta; in
    potential coordinates (g(v0) = 0) they read 2<g, Laplacian chi_X> <= |beta|^2.
    """

    graph: Graph
    bonds: Tuple[Bond, ...]
    vertices: Tuple[CellVertex, ...]
    faces: Tuple[CellFace, ...]

    @property
    def h0_vertices(self) -> List[Tuple[Fraction, ...]]:
        return [v.h0 for v in self.vertices]

    def contains_cut(self, z: Sequence[Scalar]) -> bool:
        """Membership of a cut-space point z."""
        for bond in self.bonds:
            pairing = sum((Fraction(a) * b for a, b in zip(z, bond.cochain)), Fraction(0))
            if 2 * pairing > bond.norm_sq:
                return False
        return True

    def to_json(self) -> dict:
        g = self.graph
        return {
            "halfspaces": [
                {
                    "X": sorted(g.vertices[v] for v in bond.X),
                    "normal": list(bond.cochain),
                    "bound": bond.norm_sq,
                }
                for bond in self.bonds
            ],
            "vertices": [[str(c) for c in v.h0] for v in self.vertices],
            "faces": [
                {
                    "orientation": face.orientation.key(g),
                    "dimension": face.dimension,
                    "vertices": sorted(face.vertices),
                }
                for face in self.faces
            ],
        }


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def _affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    rows = [[p[i] - base[i] for i in range(len(base))] for p in points[1:]]
    if not rows[0]:
        return 0
    return Matrix(rows).rank()


def ordered_components(g: Graph, oriented: FrozenSet[OrientedEdge]) -> Tuple[FrozenSet[int], ...]:
    """Components of G - E(D) in lexicographically smallest topological order."""
    cut = {oe.edge for oe in oriented}
    comps = g.components(e for e in range(g.m) if e not in cut)
    where = {v: i for i, comp in enumerate(comps) for v in comp}
    dag = nx.DiGraph()
    dag.add_nodes_from(range(len(comps)))
    for oe in oriented:
        dag.add_edge(where[g.oriented_tail(oe)], where[g.oriented_head(oe)])
    order = list(nx.lexicographical_topological_sort(dag, key=lambda i: min(comps[i])))
    return tuple(comps[i] for i in order)


@lru_cache(maxsize=256)
def _cell_geometry(g: Graph) -> CellGeometry:
    bonds = tuple(enumerate_bonds(g, max_vertices=g.n))
    k = g.n - 1
    if k == 0:
        vertex = CellVertex((Fraction(0),), (), (Fraction(0),))
        face = CellFace(frozenset([0]), frozenset(), 0, CACOrientation(frozenset(), (frozenset([0]),)))
        return CellGeometry(g, bonds, (vertex,), (face,))

    rows = []
    bounds = []
    for bond in bonds:
        lap = laplacian(g, tuple(1 if v in bond.X else 0 for v in range(g.n)))
        rows.append([2 * lap[v] for v in range(1, g.n)])
        bounds.append(bond.norm_sq)

    def tight_set(point: Sequence[Fraction]) -> FrozenSet[int]:
        return frozenset(
            i
            for i, (row, b) in enumerate(zip(rows, bounds))
            if sum((a * x for a, x in zip(row, point)), Fraction(0)) == b
        )

    found: Dict[Tuple[Fraction, ...], FrozenSet[int]] = {}
    for subset in itertools.combinations(range(len(rows)), k):
        A = Matrix([rows[i] for i in subset])
        if A.rank() < k:
            continue
        solution = A.LUsolve(Matrix([bounds[i] for i in subset]))
        point = tuple(_to_fraction(solution[j]) for j in range(k))
        if point in found:
            continue
        if all(
            sum((a * x for a, x in zip(row, point)), Fraction(0)) <= b
            for row, b in zip(rows, bounds)
        ):
            found[point] = tight_set(point)

    ordered = sorted(found)
    vertices = []
    tights = []
    for point in ordered:
        potential = (Fraction(0),) + point
        vertices.append(
            CellVertex(potential, tuple(apply_d(g, potential)), tuple(laplacian(g, potential)))
        )
        tights.append(found[point])

    family = set(tights)
    frontier = list(family)
    while frontier:
        new = []
        for a in frontier:
            for b in list(family):
                c = a & b
                if c not in family:
                    family.add(c)
                    new.append(c)
        frontier = new
    family.add(frozenset())

    faces: Dict[FrozenSet[int], CellFace] = {}
    for S in family:
        members = frozenset(i for i, t in enumerate(tights) if S <= t)
        if not members or members in faces:
            continue
        tight = frozenset.intersection(*(tights[i] for i in members))
        oriented = frozenset(oe for i in tight for oe in bonds[i].support)
        dim = _affine_rank([vertices[i].potential[1:] for i in members])
        faces[members] = CellFace(
            members,
            tight,
            dim,
            CACOrientation(oriented, ordered_components(g, oriented)),
        )

    ordered_faces = sorted(
        faces.values(), key=lambda f: (f.dimension, sorted(f.vertices))
    )
    logger.debug(
        "cell geometry: %d bonds, %d vertices, %d faces",
        len(bonds),
        len(vertices),
        len(ordered_faces),
    )
    return CellGeometry(g, bonds, tuple(vertices), tuple(ordered_faces))


def cell_geometry(g: Graph, max_vertices: Optional[int] = None) -> CellGeometry:
    """
    Exact halfspaces, vertices and face lattice of the Voronoi cell of g.

    Vertices come from solving every full-rank set of |V|-1 tight bond
    hyperplanes and keeping the feasible solutions. Faces are the vertex
    sets cut out by intersections of tight sets, each mapped to the union
    of the positive supports of its tight bonds.

    Raises:
        SizeLimitError: If the graph is above the vertex cap
        ValidationError: If g is disconnected
    """
    check_vertex_cap(g.n, max_vertices)
    if not g.is_connected():
        raise ValidationError("Voronoi cell needs a connected graph")
    return _cell_geometry(g)


def check_face_poset(geometry: CellGeometry, poset: CACPoset) -> bool:
    """
    True when faces and CAC elements correspond bijectively and in order.

    Smaller faces map to larger orientations; each face dimension equals
    face_dimension of its orientation.
    """
    faces = geometry.faces
    images = [face.orientation for face in faces]
    if len(set(images)) != len(images) or set(images) != set(poset.elements):
        return False
    for face in faces:
        if face.dimension != face_dimension(geometry.graph, face.orientation):
            return False
    for a, b in itertools.product(faces, repeat=2):
        if (a.vertices <= b.vertices) != a.orientation.precedes(b.orientation):
            return False
    return True


def _validate_arrangement_data(g: Graph, lengths: Sequence[int], twisting: Sequence[int]) -> None:
    if len(lengths) != g.m or len(twisting) != g.m:
        raise ValidationError("lengths and twisting need one value per edge")
    if any(int(l) != l or l < 1 for l in lengths):
        raise ValidationError("Edge lengths must be positive integers")
    if any(int(t) != t for t in twisting):
        raise ValidationError("Twisting must be integral")


def dee(
    g: Graph,
    lengths: Sequence[int],
    twisting: Sequence[int],
    f: Sequence[int],
    n: int = 1,
) -> LevelVector:
    """
    Level function: (f(head)-f(tail)+n m_e)/(n l_e) when integral, else floor + 1/2.

    Args:
        g: Graph
        lengths: Edge lengths l_e >= 1
        twisting: Integral twisting m
        f: Integral potential
        n: Positive scaling

    Returns:
        LevelVector (doubled encoding)
    """
    _validate_arrangement_data(g, lengths, twisting)
    if n < 1:
        raise ValidationError("n must be a positive integer")
    if len(f) != g.n:
        raise ValidationError(f"Potential has length {len(f)} (expected {g.n})")
    doubled = []
    for e, (t, h) in enumerate(g.edges):
        q = Fraction(f[h] - f[t] + n * twisting[e], n * lengths[e])
        doubled.append(math.floor(q) + math.ceil(q))
    return LevelVector(tuple(doubled))


@dataclass(frozen=True)
class ActiveSubgraph:
    """Spanning subgraph on the integral-level edges."""

    edges: Tuple[int, ...]
    components: Tuple[FrozenSet[int], ...]

    @property
    def connected(self) -> bool:
        return len(self.components) == 1


def active_subgraph(g: Graph, level: LevelVector) -> ActiveSubgraph:
    if len(level) != g.m:
        raise ValidationError("Level vector length does not match edge count")
    edges = level.integral_edges()
    return ActiveSubgraph(edges, tuple(g.components(edges)))


@dataclass(frozen=True)
class Tile:
    """Tile d*(level) + Vor(active subgraph) of a twisted mixed tiling."""

    graph: Graph = field(compare=False, repr=False)
    f: Tuple[int, ...]
    level: LevelVector
    active: ActiveSubgraph
    center: Tuple[Fraction, ...]

    @cached_property
    def subgraph(self) -> Graph:
        return self.graph.spanning_subgraph(self.active.edges)

    @cached_property
    def geometry(self) -> CellGeometry:
        return cell_geometry(self.subgraph, max_vertices=self.graph.n)

    @cached_property
    def bonds(self) -> Tuple[Tuple[FrozenSet[int], int], ...]:
        return tuple(
            (bond.X, bond.norm_sq)
            for bond in enumerate_bonds(self.subgraph, max_vertices=self.graph.n)
        )

    @cached_property
    def degree_bound(self) -> Tuple[Fraction, ...]:
        sub = self.subgraph
        degree = [0] * sub.n
        for t, h in sub.edges:
            degree[t] += 1
            degree[h] += 1
        return tuple(Fraction(d, 2) for d in degree)

    def near(self, x: Sequence[Fraction]) -> bool:
        """Necessary condition: |x_v - c_v| <= deg(v)/2 on the active subgraph."""
        return all(
            abs(Fraction(xv) - cv) <= bound
            for xv, cv, bound in zip(x, self.center, self.degree_bound)
        )

    def contains(self, x: Sequence[Scalar]) -> bool:
        """Exact membership of a sum-zero point."""
        if not self.near(x):
            return False
        diff = [Fraction(xv) - cv for xv, cv in zip(x, self.center)]
        for X, bound in self.bonds:
            if 2 * sum(diff[v] for v in X) > bound:
                return False
        return True

    def halfspaces(self) -> List[Tuple[FrozenSet[int], Fraction]]:
        """(X, b) with sum_{v in X} x_v <= b."""
        return [
            (X, Fraction(bound, 2) + sum(self.center[v] for v in X))
            for X, bound in self.bonds
        ]

    def h0_vertices(self) -> List[Tuple[Fraction, ...]]:
        return [
            tuple(c + d for c, d in zip(self.center, vertex))
            for vertex in self.geometry.h0_vertices
        ]

    def to_json(self) -> dict:
        return {
            "f": list(self.f),
            "level": [format_half_integer(d) for d in self.level.doubled],
            "active_edges": [self.graph.edge_names[e] for e in self.active.edges],
            "center": [str(c) for c in self.center],
        }


def _tile(g: Graph, lengths, twisting, f: Sequence[int]) -> Tile:
    level = dee(g, lengths, twisting, f)
    active = active_subgraph(g, level)
    center = tuple(apply_d_star(g, level.values()))
    return Tile(g, tuple(int(v) for v in f), level, active, center)


def build_tile(g: Graph, lengths: Sequence[int], twisting: Sequence[int], f: Sequence[int]) -> Tile:
    """
    Tile of the potential f.

    Raises:
        ValidationError: If f is not normalized by f(v0) = 0
        NotATileError: If the active subgraph of f is disconnected
    """
    if len(f) != g.n or any(int(v) != v for v in f):
        raise ValidationError("Potential must be integral with one value per vertex")
    if f[0] != 0:
        raise ValidationError("Potential must be normalized by f(v0) = 0")
    tile = _tile(g, lengths, twisting, f)
    if not tile.active.connected:
        raise NotATileError(
            f"Active subgraph of f={list(f)} has {len(tile.active.components)} components"
        )
    return tile


def window_potentials(n_vertices: int, window: int):
    """Normalized potentials with |f(v)| <= window, in lexicographic order."""
    for values in itertools.product(range(-window, window + 1), repeat=n_vertices - 1):
        yield (0,) + values


def enumerate_tiles(
    g: Graph,
    lengths: Sequence[int],
    twisting: Sequence[int],
    window: int,
    progress: bool = False,
) -> List[Tile]:
    """All tiles with |f(v)| <= window, f(v0) = 0 and connected active subgraph."""
    _validate_arrangement_data(g, lengths, twisting)
    if window < 0:
        raise ValidationError("Window must be nonnegative")
    total = (2 * window + 1) ** (g.n - 1)
    tiles = []
    for f in tqdm(
        window_potentials(g.n, window),
        total=total,
        desc="タイル列挙",
        disable=not progress,
    ):
        tile = _tile(g, lengths, twisting, f)
        if tile.active.connected:
            tiles.append(tile)
    logger.debug("window %d: %d tiles out of %d potentials", window, len(tiles), total)
    return tiles


def suggest_window(
    g: Graph, lengths: Sequence[int], twisting: Sequence[int], x: Sequence[Scalar]
) -> int:
    """Heuristic window: max(l) * diameter * (ceil |x|_inf + 1) + max |m|."""
    diameter = nx.diameter(nx.Graph(g.to_networkx())) if g.n > 1 else 0
    norm = max((abs(Fraction(v)) for v in x), default=Fraction(0))
    twist = max((abs(t) for t in twisting), default=0)
    return max(1, max(lengths, default=1) * max(diameter, 1) * (math.ceil(norm) + 1) + twist)


def locate_point(
    g: Graph,
    lengths: Sequence[int],
    twisting: Sequence[int],
    x: Sequence[Scalar],
    window: int,
    tiles: Optional[Sequence[Tile]] = None,
) -> List[Tile]:
    """
    All tiles in the window containing the sum-zero point x.

    Args:
        g: Graph
        lengths: Edge lengths
        twisting: Twisting
        x: Rational point with sum zero
        window: Potential window
        tiles: Precomputed enumerate_tiles output for the same window

    Returns:
        Tiles containing x, in window order

    Raises:
        ValidationError: If x does not lie in H0
        WindowError: If no tile in the window contains x
    """
    if len(x) != g.n:
        raise ValidationError(f"Point has length {len(x)} (expected {g.n})")
    point = [Fraction(v) for v in x]
    if sum(point) != 0:
        raise ValidationError("Point must have coordinate sum zero")
    if tiles is None:
        tiles = enumerate_tiles(g, lengths, twisting, window)
    found = [tile for tile in tiles if tile.contains(point)]
    if not found:
        raise WindowError(
            f"No tile within window {window} contains the point; "
            f"try at least {suggest_window(g, lengths, twisting, point)}"
        )
    return found


@dataclass(frozen=True)
class SharedFace:
    """Intersection data of two tiles."""

    alpha: LevelVector
    D1: CACOrientation
    D2: CACOrientation
    components: Tuple[Tuple[FrozenSet[int], Tuple[int, ...]], ...]

    def point(self, g: Graph) -> Tuple[Fraction, ...]:
        """d*(alpha), a point of the shared face."""
        return tuple(apply_d_star(g, self.alpha.values()))

    def to_json(self, g: Graph) -> dict:
        return {
            "alpha": [format_half_integer(d) for d in self.alpha.doubled],
            "D1": self.D1.key(g),
            "D2": self.D2.key(g),
            "components": [
                {
                    "vertices": sorted(g.vertices[v] for v in verts),
                    "edges": [g.edge_names[e] for e in edges],
                }
                for verts, edges in self.components
            ],
        }


def _level_set_orientation(
    g: Graph, edges: Iterable[int], rank: Dict[int, int], increasing: bool
) -> FrozenSet[OrientedEdge]:
    out = set()
    for e in edges:
        t, h = g.edges[e]
        if rank[t] == rank[h]:
            continue
        forward = rank[t] < rank[h]
        out.add(OrientedEdge(e, 1 if forward == increasing else -1))
    return frozenset(out)


def tiles_adjacent(
    g: Graph,
    lengths: Sequence[int],
    twisting: Sequence[int],
    f1: Sequence[int],
    f2: Sequence[int],
) -> Optional[SharedFace]:
    """
    Shared face of the tiles of f1 and f2, or None when they do not meet.

    The level sets X_1 < ... < X_q of f2 - f1 orient the active edges of
    f1 upwards (D1) and those of f2 downwards (D2); the tiles meet exactly
    when level(f1) + chi(D1)/2 equals level(f2) + chi(D2)/2.

    Raises:
        NotATileError: If either active subgraph is disconnected
    """
    t1 = build_tile(g, lengths, twisting, f1)
    t2 = build_tile(g, lengths, twisting, f2)
    diff = [b - a for a, b in zip(t1.f, t2.f)]
    levels = sorted(set(diff))
    rank = {v: levels.index(diff[v]) for v in range(g.n)}
    parts = tuple(
        frozenset(v for v in range(g.n) if diff[v] == value) for value in levels
    )
    D1 = CACOrientation(_level_set_orientation(g, t1.active.edges, rank, True), parts)
    D2 = CACOrientation(
        _level_set_orientation(g, t2.active.edges, rank, False), tuple(reversed(parts))
    )
    alpha1 = t1.level.shifted(D1.chi(g.m))
    alpha2 = t2.level.shifted(D2.chi(g.m))
    if alpha1 != alpha2:
        return None
    kept = [e for e in range(g.m) if t1.level.doubled[e] == t2.level.doubled[e]]
    components = tuple(
        (comp, tuple(e for e in kept if g.edges[e][0] in comp))
        for comp in g.components(kept)
    )
    return SharedFace(alpha1, D1, D2, components)


def _h0_rows(g: Graph, tile: Tile) -> List[Inequality]:
    rows = []
    for X, bound in tile.halfspaces():
        coeffs = []
        for w in range(1, g.n):
            coeffs.append((1 if w in X else 0) - (1 if 0 in X else 0))
        rows.append(inequality(coeffs, bound))
    return rows


def tiles_intersect(g: Graph, t1: Tile, t2: Tile) -> bool:
    """Exact LP oracle: do the two halfspace systems have a common point in H0."""
    if g.n == 1:
        return True
    return find_point(_h0_rows(g, t1) + _h0_rows(g, t2), g.n - 1) is not None


def solve_level_function(
    g: Graph,
    lengths: Sequence[int],
    twisting: Sequence[int],
    alpha: LevelVector,
) -> Optional[Tuple[int, Tuple[int, ...]]]:
    """
    Find (n, f) with dee(f, n) = alpha, or None when no such pair exists.

    A rational potential g = f/n satisfies equalities on integral-level
    edges and open interval constraints on half-level edges; the offsets
    of the components of the integral subgraph are found by exact
    Fourier-Motzkin elimination.
    """
    _validate_arrangement_data(g, lengths, twisting)
    if len(alpha) != g.m:
        raise ValidationError("Level vector length does not match edge count")

    integral = alpha.integral_edges()
    comps = g.components(integral)
    where = {v: i for i, comp in enumerate(comps) for v in comp}

    base: Dict[int, Fraction] = {}
    for comp in comps:
        root = min(comp)
        base[root] = Fraction(0)
        pending = [e for e in integral if g.edges[e][0] in comp]
        changed = True
        while changed:
            changed = False
            for e in pending:
                t, h = g.edges[e]
                step = alpha.integer(e) * lengths[e] - twisting[e]
                if t in base and h not in base:
                    base[h] = base[t] + step
                    changed = True
                elif h in base and t not in base:
                    base[t] = base[h] - step
                    changed = True
    for e in integral:
        t, h = g.edges[e]
        if base[h] - base[t] != alpha.integer(e) * lengths[e] - twisting[e]:
            return None

    # offset variable j-1 belongs to component j; component 0 holds v0
    n_vars = len(comps) - 1
    rows: List[Inequality] = []
    for e, (t, h) in enumerate(g.edges):
        if alpha.is_integral(e):
            continue
        value = alpha.value(e)
        lo = lengths[e] * (value - Fraction(1, 2)) - twisting[e]
        hi = lengths[e] * (value + Fraction(1, 2)) - twisting[e]
        delta = base[h] - base[t]
        ch, ct = where[h], where[t]
        if ch == ct:
            if not lo < delta < hi:
                return None
            continue
        coeffs = [Fraction(0)] * n_vars
        if ch > 0:
            coeffs[ch - 1] += 1
        if ct > 0:
            coeffs[ct - 1] -= 1
        rows.append(inequality(coeffs, hi - delta, strict=True))
        rows.append(inequality([-c for c in coeffs], delta - lo, strict=True))

    offsets = find_point(rows, n_vars)
    if offsets is None:
        return None
    potential = [
        base[v] + (offsets[where[v] - 1] if where[v] > 0 else Fraction(0))
        for v in range(g.n)
    ]
    potential = [p - potential[0] for p in potential]
    n = math.lcm(*(p.denominator for p in potential))
    f = tuple(int(p * n) for p in potential)
    if dee(g, lengths, twisting, f, n) != alpha:
        raise ArithmeticError("level function solution failed verification")
    return n, f


def connected_refinement(
    g: Graph, lengths: Sequence[int], twisting: Sequence[int], h: Sequence[int]
) -> Tuple[int, ...]:
    """
    Shift h until its active subgraph is connected.

    The component S of v0 stays fixed and the rest T is raised by the
    least amount making some crossing edge integral. Levels move by at
    most 1/2 and only on half-level edges, so the stratum of h lies in
    the closure of the returned tile.
    """
    current = list(h)
    while True:
        level = dee(g, lengths, twisting, current)
        active = active_subgraph(g, level)
        if active.connected:
            return tuple(current)
        S = active.components[0]
        steps = []
        for e, (t, hd) in enumerate(g.edges):
            if (t in S) == (hd in S):
                continue
            delta = current[hd] - current[t] + twisting[e]
            if t in S:
                steps.append((-delta) % lengths[e])
            else:
                steps.append(delta % lengths[e])
        q = min(steps)
        current = [value if v in S else value + q for v, value in enumerate(current)]
