#!/usr/bin/env python3
"""
Cut lattice structure of a graph.

Bond enumeration, Kirchhoff counts and the Laplacian lattice index, and
the two constructive flow results: integral flows bounded by an edge
capacity with prescribed cycle sums, and nonnegative flows with
prescribed divergence on a partially oriented edge set.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.flow import edmonds_karp
from sympy import Matrix
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors, smith_normal_form

from .graphcore import (
    Graph,
    OneCochain,
    OrientedEdge,
    ZeroCochain,
    apply_d,
    cut_element,
    orientation_vector,
    positive_support,
    simple_cycles,
    spanning_tree,
)
from .utils import HypothesisError, Scalar, ValidationError, check_vertex_cap

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Bond:
    """Cut element d(chi_X) with both G[X] and G[V-X] connected."""

    X: FrozenSet[int]
    cochain: Tuple[int, ...]
    norm_sq: int
    support: FrozenSet[OrientedEdge]


@dataclass(frozen=True)
class FlowCertificate:
    """Either a flow eta or a cut X violating the cut condition."""

    eta: Optional[OneCochain] = None
    cut: Optional[FrozenSet[int]] = None

    def __post_init__(self):
        if (self.eta is None) == (self.cut is None):
            raise ValueError("FlowCertificate needs exactly one of eta or cut")

    @property
    def feasible(self) -> bool:
        return self.eta is not None


def make_bond(g: Graph, vertex_set: Iterable[int]) -> Bond:
    X = frozenset(vertex_set)
    cochain = cut_element(g, X)
    return Bond(
        X,
        tuple(cochain),
        sum(c * c for c in cochain),
        positive_support(g, cochain),
    )


@lru_cache(maxsize=256)
def _bonds(g: Graph) -> Tuple[Bond, ...]:
    seen = set()
    out = []
    vertices = range(g.n)
    for size in range(1, g.n):
        for X in itertools.combinations(vertices, size):
            rest = [v for v in vertices if v not in X]
            if not (g.induced_connected(X) and g.induced_connected(rest)):
                continue
            bond = make_bond(g, X)
            if bond.cochain in seen:
                continue
            seen.add(bond.cochain)
            out.append(bond)
    logger.debug("enumerated %d bonds on %d vertices", len(out), g.n)
    return tuple(out)


def enumerate_bonds(g: Graph, max_vertices: Optional[int] = None) -> List[Bond]:
    """
    All bond elements, both X and V-X for each split.

    Args:
        g: Graph
        max_vertices: Vertex cap for the exhaustive subset scan

    Returns:
        Bonds ordered by |X| then lexicographically by X

    Raises:
        SizeLimitError: If the graph has more vertices than the cap
    """
    check_vertex_cap(g.n, max_vertices)
    return list(_bonds(g))


def laplacian_matrix(g: Graph) -> Matrix:
    L = [[0] * g.n for _ in range(g.n)]
    for t, h in g.edges:
        L[t][t] += 1
        L[h][h] += 1
        L[t][h] -= 1
        L[h][t] -= 1
    return Matrix(L)


def spanning_tree_count(g: Graph) -> int:
    """Kirchhoff: |det| of the Laplacian with the first row and column removed."""
    if g.n == 1:
        return 1
    reduced = laplacian_matrix(g)[1:, 1:]
    return abs(int(reduced.det()))


def enumerate_spanning_trees(g: Graph) -> List[Tuple[int, ...]]:
    """Exhaustive oracle: all (|V|-1)-edge subsets that connect the graph."""
    return [
        tree
        for tree in itertools.combinations(range(g.m), g.n - 1)
        if g.is_connected(tree)
    ]


def _domain_matrix(M: Matrix) -> DomainMatrix:
    rows = [[ZZ(int(M[i, j])) for j in range(M.cols)] for i in range(M.rows)]
    return DomainMatrix(rows, M.shape, ZZ)


def laplacian_lattice_index(g: Graph) -> int:
    """
    Index of the Laplacian lattice inside the sum-zero integer vectors.

    The Smith normal form of the Laplacian has one zero invariant and the
    product of the remaining ones is the index.
    """
    snf = smith_normal_form(_domain_matrix(laplacian_matrix(g))).to_Matrix()
    index = 1
    for i in range(min(snf.shape)):
        d = int(snf[i, i])
        if d != 0:
            index *= abs(d)
    return index


def critical_group(g: Graph) -> Tuple[int, ...]:
    """Nontrivial invariant factors of the reduced Laplacian."""
    if g.n == 1:
        return ()
    reduced = laplacian_matrix(g)[1:, 1:]
    factors = invariant_factors(_domain_matrix(reduced))
    return tuple(abs(int(d)) for d in factors if abs(int(d)) != 1)


def solve_potential(g: Graph, x: Sequence[Scalar]) -> Optional[ZeroCochain]:
    """
    Find f with d(f) = x and f(v0) = 0, or None when x is not in the cut space.

    Integral x in the cut space always yields an integral f.
    """
    if len(x) != g.m:
        raise ValidationError(f"1-cochain has length {len(x)} (expected {g.m})")
    f: Dict[int, Scalar] = {0: 0}
    tree = spanning_tree(g)
    pending = list(tree)
    while pending:
        progressed = []
        for e in pending:
            t, h = g.edges[e]
            if t in f and h not in f:
                f[h] = f[t] + x[e]
            elif h in f and t not in f:
                f[t] = f[h] - x[e]
            elif t not in f and h not in f:
                continue
            progressed.append(e)
        pending = [e for e in pending if e not in progressed]
    potential = tuple(f[v] for v in range(g.n))
    if tuple(apply_d(g, potential)) != tuple(x):
        return None
    return potential


def _cycle_sum(vec: Sequence[int], values: Sequence[Scalar]) -> Scalar:
    return sum((c * v for c, v in zip(vec, values)), 0)


def _capacity(vec: Sequence[int], h: Sequence[int]) -> int:
    return sum(abs(c) * cap for c, cap in zip(vec, h))


def bounded_flow(g: Graph, beta: Sequence[int], h: Sequence[int]) -> OneCochain:
    """
    Integral eta with |eta_e| <= h(e) and the same cycle sums as beta.

    The capacity is lowered one unit at a time on an edge lying on no
    tight cycle (lexicographically first such edge); once every edge with
    positive capacity lies on a tight cycle, eta is +-h on the tight
    oriented edges.

    Args:
        g: Graph
        beta: Integral 1-cochain
        h: Nonnegative integral capacity per edge

    Returns:
        Integral 1-cochain eta

    Raises:
        HypothesisError: If some simple cycle sum of beta exceeds its capacity
        ValidationError: If lengths or capacities are malformed
    """
    if len(beta) != g.m or len(h) != g.m:
        raise ValidationError("beta and h must have one value per edge")
    if any(int(c) != c or c < 0 for c in h):
        raise ValidationError("Capacities must be nonnegative integers")
    cap = [int(c) for c in h]

    cycles = [(cycle, cycle.vector(g.m)) for cycle in simple_cycles(g)]
    for cycle, vec in cycles:
        total = _cycle_sum(vec, beta)
        if total > _capacity(vec, cap):
            raise HypothesisError(
                f"Cycle sum {total} exceeds capacity {_capacity(vec, cap)} "
                f"on cycle {cycle.describe(g)}"
            )

    while True:
        tight: set = set()
        for cycle, vec in cycles:
            if _cycle_sum(vec, beta) == _capacity(vec, cap):
                tight.update(cycle.edges)
        slack = [
            e
            for e in range(g.m)
            if cap[e] > 0
            and OrientedEdge(e, 1) not in tight
            and OrientedEdge(e, -1) not in tight
        ]
        if not slack:
            break
        cap[slack[0]] -= 1

    eta = []
    for e in range(g.m):
        if OrientedEdge(e, 1) in tight:
            eta.append(cap[e])
        elif OrientedEdge(e, -1) in tight:
            eta.append(-cap[e])
        else:
            eta.append(0)

    for _, vec in cycles:
        if _cycle_sum(vec, eta) != _cycle_sum(vec, beta):
            raise ArithmeticError("bounded flow lost a cycle sum")
    return tuple(eta)


def brute_force_bounded_flow(
    g: Graph, beta: Sequence[int], h: Sequence[int]
) -> Optional[OneCochain]:
    """
    Exhaustive oracle for bounded_flow.

    eta - beta must lie in the cut space, so eta is fixed by its values on
    a spanning tree; those range over [-h(e), h(e)].
    """
    tree = spanning_tree(g)
    ranges = [range(-h[e], h[e] + 1) for e in tree]
    for values in itertools.product(*ranges):
        x = list(beta)
        for e, v in zip(tree, values):
            x[e] = beta[e] - v
        f = _potential_from_tree(g, tree, x)
        df = apply_d(g, f)
        eta = tuple(b - d for b, d in zip(beta, df))
        if all(abs(eta[e]) <= h[e] for e in range(g.m)):
            return eta
    return None


def _potential_from_tree(g: Graph, tree: Sequence[int], x: Sequence[Scalar]) -> ZeroCochain:
    f: Dict[int, Scalar] = {0: 0}
    changed = True
    while changed:
        changed = False
        for e in tree:
            t, hd = g.edges[e]
            if t in f and hd not in f:
                f[hd] = f[t] + x[e]
                changed = True
            elif hd in f and t not in f:
                f[t] = f[hd] - x[e]
                changed = True
    return tuple(f[v] for v in range(g.n))


def _validate_flow_input(
    g: Graph, h: Sequence[Scalar], D: Iterable[OrientedEdge]
) -> FrozenSet[OrientedEdge]:
    if len(h) != g.n:
        raise ValidationError("h must have one value per vertex")
    oriented = frozenset(OrientedEdge(int(e), int(s)) for e, s in D)
    for oe in oriented:
        if not 0 <= oe.edge < g.m or oe.sign not in (1, -1):
            raise ValidationError(f"Malformed oriented edge {tuple(oe)}")
    orientation_vector(g, oriented)
    if sum(Fraction(v) for v in h) != 0:
        raise ValidationError("h must sum to zero")
    return oriented


def nonneg_flow(
    g: Graph, h: Sequence[Scalar], D: Iterable[OrientedEdge]
) -> FlowCertificate:
    """
    Flow eta with d*(eta) = h and eta >= 0 on E(D), or a violating cut.

    Solved as a max-flow problem: vertices with h < 0 are sources, those
    with h > 0 are sinks and an edge may carry flow against an oriented
    edge of D only when that direction is unconstrained. Integral h gives
    an integral eta.

    Args:
        g: Graph
        h: 0-cochain summing to zero
        D: Oriented edges, never both orientations of one edge

    Returns:
        FlowCertificate with eta, or with a cut X such that every edge
        between X and V-X enters X, lies in D, and h(X) < 0

    Raises:
        ValidationError: If D is malformed or h does not sum to zero
    """
    oriented = _validate_flow_input(g, h, D)
    values = [Fraction(v) for v in h]
    scale = math.lcm(*(v.denominator for v in values)) if values else 1
    demand = [int(v * scale) for v in values]

    source, sink = "source", "sink"
    dg = nx.DiGraph()
    dg.add_nodes_from(range(g.n))
    dg.add_nodes_from([source, sink])
    arc_edge: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for e, (t, hd) in enumerate(g.edges):
        if OrientedEdge(e, -1) not in oriented and (t, hd) not in arc_edge:
            dg.add_edge(t, hd)
            arc_edge[(t, hd)] = (e, 1)
        if OrientedEdge(e, 1) not in oriented and (hd, t) not in arc_edge:
            dg.add_edge(hd, t)
            arc_edge[(hd, t)] = (e, -1)
    for v, d in enumerate(demand):
        if d < 0:
            dg.add_edge(source, v, capacity=-d)
        elif d > 0:
            dg.add_edge(v, sink, capacity=d)

    required = sum(d for d in demand if d > 0)
    flow_value, flow = nx.maximum_flow(dg, source, sink, flow_func=edmonds_karp)
    if flow_value == required:
        eta = [Fraction(0)] * g.m
        for (u, w), (e, sign) in arc_edge.items():
            amount = flow[u][w]
            if amount:
                eta[e] += sign * Fraction(amount, scale)
        if all(v.denominator == 1 for v in eta):
            return FlowCertificate(eta=tuple(int(v) for v in eta))
        return FlowCertificate(eta=tuple(eta))

    _, (reachable, _) = nx.minimum_cut(dg, source, sink, flow_func=edmonds_karp)
    cut = frozenset(v for v in reachable if v != source)
    logger.debug("nonneg_flow infeasible, violating cut %s", sorted(cut))
    return FlowCertificate(cut=cut)


def cut_is_violating(
    g: Graph, h: Sequence[Scalar], D: Iterable[OrientedEdge], X: Iterable[int]
) -> bool:
    """E(V-X, X) lies in D, no edge leaves X, and h(X) < 0."""
    oriented = frozenset(D)
    xs = frozenset(X)
    for e, (t, hd) in enumerate(g.edges):
        if (t in xs) == (hd in xs):
            continue
        entering = OrientedEdge(e, 1) if hd in xs else OrientedEdge(e, -1)
        if entering not in oriented:
            return False
    return sum(Fraction(h[v]) for v in xs) < 0


def find_violating_cut(
    g: Graph, h: Sequence[Scalar], D: Iterable[OrientedEdge]
) -> Optional[FrozenSet[int]]:
    """Exhaustive oracle over all vertex subsets."""
    oriented = frozenset(D)
    for size in range(1, g.n):
        for X in itertools.combinations(range(g.n), size):
            if cut_is_violating(g, h, oriented, X):
                return frozenset(X)
    return None
