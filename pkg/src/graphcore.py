#!/usr/bin/env python3
"""
Graph representation and (co)chain algebra.

A graph is a finite loopless multigraph whose edges carry a reference
orientation (the stored tail -> head direction). Cochains are tuples of
exact scalars indexed by vertices (0-cochains) or by reference-oriented
edges (1-cochains); the value on a reversed edge is the negation.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
from networkx.utils import UnionFind

from .utils import Scalar, ValidationError, safe_json_load

logger = logging.getLogger(__name__)

ZeroCochain = Tuple[Scalar, ...]
OneCochain = Tuple[Scalar, ...]


class OrientedEdge(NamedTuple):
    """Edge index plus direction: +1 for the reference orientation, -1 reversed."""

    edge: int
    sign: int

    def reversed(self) -> "OrientedEdge":
        return OrientedEdge(self.edge, -self.sign)


@dataclass(frozen=True)
class Graph:
    """
    Finite loopless multigraph with reference edge orientations.

    Vertex and edge indices are positions in the ``vertices`` and
    ``edges`` tuples. Spanning subgraphs built with
    :meth:`spanning_subgraph` keep the vertex set and may be disconnected.
    """

    vertices: Tuple[str, ...]
    edges: Tuple[Tuple[int, int], ...]
    edge_names: Tuple[str, ...] = ()
    allow_disconnected: bool = field(default=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(
            self, "edges", tuple((int(t), int(h)) for t, h in self.edges)
        )
        if not self.edge_names:
            names = tuple(f"e{i + 1}" for i in range(len(self.edges)))
            object.__setattr__(self, "edge_names", names)
        else:
            object.__setattr__(self, "edge_names", tuple(self.edge_names))

        if not self.vertices:
            raise ValidationError("Graph needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("Duplicate vertex identifiers")
        if len(self.edge_names) != len(self.edges):
            raise ValidationError("Edge name count does not match edge count")
        if len(set(self.edge_names)) != len(self.edge_names):
            raise ValidationError("Duplicate edge names")
        n = len(self.vertices)
        for i, (t, h) in enumerate(self.edges):
            if not (0 <= t < n and 0 <= h < n):
                raise ValidationError(f"Edge {self.edge_names[i]} has unknown endpoint")
            if t == h:
                raise ValidationError(f"Self loop at edge {self.edge_names[i]}")
        if not self.allow_disconnected and not self.is_connected():
            raise ValidationError("Graph is not connected")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def tail(self, e: int) -> int:
        return self.edges[e][0]

    def head(self, e: int) -> int:
        return self.edges[e][1]

    def oriented_tail(self, oe: OrientedEdge) -> int:
        t, h = self.edges[oe.edge]
        return t if oe.sign > 0 else h

    def oriented_head(self, oe: OrientedEdge) -> int:
        t, h = self.edges[oe.edge]
        return h if oe.sign > 0 else t

    def vertex_index(self, name: str) -> int:
        try:
            return self.vertices.index(str(name))
        except ValueError:
            raise ValidationError(f"Unknown vertex: {name!r}")

    def edge_index(self, name: str) -> int:
        try:
            return self.edge_names.index(str(name))
        except ValueError:
            raise ValidationError(f"Unknown edge: {name!r}")

    def oriented_name(self, oe: OrientedEdge) -> str:
        name = self.edge_names[oe.edge]
        return name if oe.sign > 0 else f"-{name}"

    def components(self, edge_subset: Optional[Iterable[int]] = None) -> List[FrozenSet[int]]:
        """
        Connected components of the spanning subgraph on ``edge_subset``.

        Args:
            edge_subset: Edge indices to keep (all edges when None)

        Returns:
            Components as vertex-index sets, sorted by smallest vertex
        """
        keep = range(self.m) if edge_subset is None else edge_subset
        uf = UnionFind(range(self.n))
        for e in keep:
            t, h = self.edges[e]
            uf.union(t, h)
        return sorted((frozenset(c) for c in uf.to_sets()), key=min)

    def is_connected(self, edge_subset: Optional[Iterable[int]] = None) -> bool:
        return len(self.components(edge_subset)) == 1

    def induced_connected(self, vertex_set: Iterable[int]) -> bool:
        """True when the induced subgraph on ``vertex_set`` is nonempty and connected."""
        xs = frozenset(vertex_set)
        if not xs:
            return False
        uf = UnionFind(sorted(xs))
        for t, h in self.edges:
            if t in xs and h in xs:
                uf.union(t, h)
        return len(list(uf.to_sets())) == 1

    def spanning_subgraph(self, edge_subset: Iterable[int]) -> "Graph":
        """Spanning subgraph keeping ``edge_subset`` (edge order and names preserved)."""
        keep = sorted(set(edge_subset))
        return Graph(
            self.vertices,
            tuple(self.edges[e] for e in keep),
            tuple(self.edge_names[e] for e in keep),
            allow_disconnected=True,
        )

    def to_networkx(self) -> nx.MultiGraph:
        """Undirected networkx multigraph keyed by edge index, weighted by index."""
        mg = nx.MultiGraph()
        mg.add_nodes_from(range(self.n))
        for e, (t, h) in enumerate(self.edges):
            mg.add_edge(t, h, key=e, weight=e)
        return mg

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [
                {"name": self.edge_names[e], "tail": self.vertices[t], "head": self.vertices[h]}
                for e, (t, h) in enumerate(self.edges)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        """
        Build a graph from its JSON form.

        Args:
            data: {"vertices": [...], "edges": [{"tail": u, "head": v}, ...]}

        Returns:
            Connected graph; edge order in the file defines edge indices

        Raises:
            ValidationError: If the structure is malformed
        """
        if not isinstance(data, dict):
            raise ValidationError("Graph JSON must be an object")
        vertices = data.get("vertices")
        edges = data.get("edges")
        if not isinstance(vertices, list) or not isinstance(edges, list):
            raise ValidationError("Graph JSON needs 'vertices' and 'edges' lists")
        names = [str(v) for v in vertices]
        lookup = {v: i for i, v in enumerate(names)}
        pairs = []
        edge_names = []
        for i, item in enumerate(edges):
            if not isinstance(item, dict) or "tail" not in item or "head" not in item:
                raise ValidationError(f"Edge {i + 1} needs 'tail' and 'head'")
            tail, head = str(item["tail"]), str(item["head"])
            if tail not in lookup or head not in lookup:
                raise ValidationError(f"Edge {i + 1} has unknown endpoint")
            pairs.append((lookup[tail], lookup[head]))
            edge_names.append(str(item.get("name", f"e{i + 1}")))
        return cls(tuple(names), tuple(pairs), tuple(edge_names))

    @classmethod
    def load(cls, file_path: str) -> "Graph":
        return cls.from_json(safe_json_load(file_path))


def _check_length(values: Sequence, expected: int, what: str) -> None:
    if len(values) != expected:
        raise ValidationError(f"{what} has length {len(values)} (expected {expected})")


def apply_d(g: Graph, f: Sequence[Scalar]) -> OneCochain:
    """d(f)(e) = f(head e) - f(tail e)."""
    _check_length(f, g.n, "0-cochain")
    return tuple(f[h] - f[t] for t, h in g.edges)


def apply_d_star(g: Graph, alpha: Sequence[Scalar]) -> ZeroCochain:
    """Adjoint of d: inflow minus outflow at every vertex."""
    _check_length(alpha, g.m, "1-cochain")
    out: List[Scalar] = [0] * g.n
    for (t, h), a in zip(g.edges, alpha):
        out[h] += a
        out[t] -= a
    return tuple(out)


def laplacian(g: Graph, f: Sequence[Scalar]) -> ZeroCochain:
    return apply_d_star(g, apply_d(g, f))


def inner(x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
    """Standard pairing of two cochains of equal length."""
    if len(x) != len(y):
        raise ValidationError("Cochain lengths differ in pairing")
    return sum((a * b for a, b in zip(x, y)), 0)


def indicator(g: Graph, vertex_set: Iterable[int]) -> ZeroCochain:
    xs = set(vertex_set)
    return tuple(1 if v in xs else 0 for v in range(g.n))


def cut_element(g: Graph, vertex_set: Iterable[int]) -> OneCochain:
    """
    d(chi_X): -1 on edges leaving X, +1 on edges entering X.

    Args:
        g: Graph
        vertex_set: Vertex indices of X

    Returns:
        Integer 1-cochain whose positive support is E(V-X, X)
    """
    return apply_d(g, indicator(g, vertex_set))


def positive_support(g: Graph, alpha: Sequence[Scalar]) -> FrozenSet[OrientedEdge]:
    """Oriented edges on which the antisymmetric cochain is positive."""
    support = set()
    for e, a in enumerate(alpha):
        if a > 0:
            support.add(OrientedEdge(e, 1))
        elif a < 0:
            support.add(OrientedEdge(e, -1))
    return frozenset(support)


def orientation_vector(g: Graph, oriented: Iterable[OrientedEdge]) -> Tuple[int, ...]:
    """chi of an oriented edge set as an integer 1-cochain."""
    vec = [0] * g.m
    for oe in oriented:
        if vec[oe.edge] != 0:
            raise ValidationError(
                f"Both orientations of edge {g.edge_names[oe.edge]} given"
            )
        vec[oe.edge] = oe.sign
    return tuple(vec)


@dataclass(frozen=True)
class LevelVector:
    """
    Half-integer 1-cochain in doubled-integer encoding.

    ``doubled[e]`` is twice the level of the reference orientation of e.
    """

    doubled: Tuple[int, ...]

    @classmethod
    def from_values(cls, values: Iterable[Scalar]) -> "LevelVector":
        out = []
        for v in values:
            d = 2 * Fraction(v)
            if d.denominator != 1:
                raise ValidationError(f"Level {v} is not a half-integer")
            out.append(int(d))
        return cls(tuple(out))

    @classmethod
    def zeros(cls, m: int) -> "LevelVector":
        return cls((0,) * m)

    def __len__(self) -> int:
        return len(self.doubled)

    def value(self, e: int) -> Fraction:
        return Fraction(self.doubled[e], 2)

    def values(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(d, 2) for d in self.doubled)

    def is_integral(self, e: int) -> bool:
        return self.doubled[e] % 2 == 0

    def integral_edges(self) -> Tuple[int, ...]:
        return tuple(e for e, d in enumerate(self.doubled) if d % 2 == 0)

    def integer(self, e: int) -> int:
        if not self.is_integral(e):
            raise ValidationError(f"Level on edge index {e} is not integral")
        return self.doubled[e] // 2

    def shifted(self, chi: Sequence[int]) -> "LevelVector":
        """self + 1/2 chi for a {-1,0,1}-valued chi."""
        return LevelVector(tuple(d + c for d, c in zip(self.doubled, chi)))


@dataclass(frozen=True)
class OrientedCycle:
    """Closed walk of oriented edges without repeated vertices."""

    edges: Tuple[OrientedEdge, ...]

    def vector(self, m: int) -> Tuple[int, ...]:
        vec = [0] * m
        for oe in self.edges:
            vec[oe.edge] += oe.sign
        return tuple(vec)

    def reversed(self) -> "OrientedCycle":
        return OrientedCycle(tuple(oe.reversed() for oe in reversed(self.edges)))

    def describe(self, g: Graph) -> str:
        return " ".join(g.oriented_name(oe) for oe in self.edges)


@dataclass(frozen=True)
class CycleSpace:
    """Spanning tree, fundamental cycle basis and all simple oriented cycles."""

    tree: Tuple[int, ...]
    fundamental: Tuple[Tuple[int, Tuple[int, ...]], ...]
    simple_cycles: Tuple[OrientedCycle, ...]

    @property
    def rank(self) -> int:
        return len(self.fundamental)

    def fundamental_vector(self, e: int) -> Tuple[int, ...]:
        for edge, vec in self.fundamental:
            if edge == e:
                return vec
        raise ValidationError(f"Edge index {e} is a tree edge")


def spanning_tree(g: Graph) -> Tuple[int, ...]:
    """Lexicographically first spanning tree (Kruskal with edge index as weight)."""
    mst = nx.minimum_spanning_edges(
        g.to_networkx(), algorithm="kruskal", weight="weight", keys=True, data=False
    )
    return tuple(sorted(k for _, _, k in mst))


def _check_tree(g: Graph, tree: Sequence[int]) -> Tuple[int, ...]:
    tree = tuple(sorted(set(int(e) for e in tree)))
    if any(not 0 <= e < g.m for e in tree):
        raise ValidationError("Spanning tree references unknown edge")
    if len(tree) != g.n - 1 or not g.is_connected(tree):
        raise ValidationError("Edge set is not a spanning tree")
    return tree


def _tree_path(g: Graph, tree: Sequence[int], start: int, goal: int) -> List[OrientedEdge]:
    adj: Dict[int, List[Tuple[OrientedEdge, int]]] = {v: [] for v in range(g.n)}
    for e in tree:
        t, h = g.edges[e]
        adj[t].append((OrientedEdge(e, 1), h))
        adj[h].append((OrientedEdge(e, -1), t))
    parent: Dict[int, Optional[Tuple[OrientedEdge, int]]] = {start: None}
    queue = [start]
    while queue:
        v = queue.pop(0)
        if v == goal:
            break
        for oe, w in adj[v]:
            if w not in parent:
                parent[w] = (oe, v)
                queue.append(w)
    path: List[OrientedEdge] = []
    v = goal
    while parent[v] is not None:
        oe, prev = parent[v]
        path.append(oe)
        v = prev
    return list(reversed(path))


def fundamental_cycle(g: Graph, tree: Sequence[int], e: int) -> Tuple[int, ...]:
    """Cycle of a non-tree edge e, oriented so that it traverses e forwards."""
    t, h = g.edges[e]
    walk = [OrientedEdge(e, 1)] + _tree_path(g, tree, h, t)
    return OrientedCycle(tuple(walk)).vector(g.m)


def _rotate_to_smallest(walk: List[OrientedEdge], g: Graph) -> Tuple[OrientedEdge, ...]:
    tails = [g.oriented_tail(oe) for oe in walk]
    k = tails.index(min(tails))
    return tuple(walk[k:] + walk[:k])


def simple_cycles(g: Graph) -> Tuple[OrientedCycle, ...]:
    """
    All simple oriented cycles, both orientations of each undirected cycle.

    Cycles are grown by depth-first search from their smallest vertex,
    visiting only larger vertices; parallel edges give cycles of length two.
    """
    adj: Dict[int, List[Tuple[OrientedEdge, int]]] = {v: [] for v in range(g.n)}
    for e, (t, h) in enumerate(g.edges):
        adj[t].append((OrientedEdge(e, 1), h))
        adj[h].append((OrientedEdge(e, -1), t))

    found: Dict[Tuple[int, ...], OrientedCycle] = {}

    def extend(start: int, v: int, walk: List[OrientedEdge], on_path: set, used: set):
        for oe, w in adj[v]:
            if oe.edge in used:
                continue
            if w == start:
                closed = walk + [oe]
                if len(closed) >= 2:
                    cycle = OrientedCycle(_rotate_to_smallest(closed, g))
                    found.setdefault(cycle.vector(g.m), cycle)
            elif w > start and w not in on_path:
                on_path.add(w)
                used.add(oe.edge)
                extend(start, w, walk + [oe], on_path, used)
                used.discard(oe.edge)
                on_path.discard(w)

    for start in range(g.n):
        extend(start, start, [], {start}, set())

    def sort_key(item):
        vec, _ = item
        return (tuple(e for e, c in enumerate(vec) if c), tuple(-c for c in vec))

    return tuple(cycle for _, cycle in sorted(found.items(), key=sort_key))


def canonical_cycles(g: Graph) -> Tuple[OrientedCycle, ...]:
    """One orientation per undirected simple cycle: first nonzero coordinate +1."""
    out = []
    for cycle in simple_cycles(g):
        vec = cycle.vector(g.m)
        first = next(c for c in vec if c != 0)
        if first > 0:
            out.append(cycle)
    return tuple(out)


def cycle_space(g: Graph, tree: Optional[Sequence[int]] = None) -> CycleSpace:
    """
    Spanning tree, fundamental cycle basis and simple oriented cycles.

    Args:
        g: Graph
        tree: Optional spanning tree edge indices (default: lexicographically first)

    Returns:
        CycleSpace with |E| - |V| + 1 fundamental cycles
    """
    tree = spanning_tree(g) if tree is None else _check_tree(g, tree)
    tree_set = set(tree)
    fundamental = tuple(
        (e, fundamental_cycle(g, tree, e)) for e in range(g.m) if e not in tree_set
    )
    return CycleSpace(tree, fundamental, simple_cycles(g))


def is_acyclic(g: Graph, oriented: Iterable[OrientedEdge]) -> bool:
    """True when the directed graph on the given oriented edges has no directed cycle."""
    dg = nx.DiGraph()
    dg.add_nodes_from(range(g.n))
    for oe in oriented:
        dg.add_edge(g.oriented_tail(oe), g.oriented_head(oe))
    return nx.is_directed_acyclic_graph(dg)


def enumerate_acyclic_orientations(g: Graph) -> List[Tuple[int, ...]]:
    """All acyclic orientations of every edge, as sign vectors."""
    out = []
    for signs in itertools.product((1, -1), repeat=g.m):
        if is_acyclic(g, (OrientedEdge(e, s) for e, s in enumerate(signs))):
            out.append(tuple(signs))
    return out
