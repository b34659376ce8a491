#!/usr/bin/env python3
"""
Normal fan of the Voronoi cell, cycle binomials and orbit closures.

The cone of a face D is generated by the bonds whose positive support
lies in E(D). The toric variety of a graph is cut out of the product of
projective lines by one binomial per oriented cycle; torus orbit
closures split along the components of G - E(D).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from sympy import Matrix

from .feasibility import equality, find_point, inequality
from .graphcore import (
    Graph,
    LevelVector,
    OrientedEdge,
    canonical_cycles,
    is_acyclic,
    orientation_vector,
    positive_support,
    simple_cycles,
)
from .lattice import Bond, enumerate_bonds, solve_potential
from .utils import Field, HypothesisError, Scalar, ValidationError
from .voronoi import CACOrientation, ordered_components

logger = logging.getLogger(__name__)

Variable = Tuple[int, int, str]
Monomial = Tuple[Tuple[Variable, int], ...]
ChainCoordinate = Callable[[int, int], Tuple[Any, Any]]


@dataclass(frozen=True)
class Cone:
    """Cone spanned by bond cochains inside the cut space."""

    generators: Tuple[Bond, ...]
    dimension: int
    ambient: str = "F"

    def contains(self, x: Sequence[Scalar]) -> bool:
        """Exact test for x = sum lambda_i beta_i with lambda >= 0."""
        k = len(self.generators)
        if k == 0:
            return all(Fraction(v) == 0 for v in x)
        rows = []
        for e in range(len(x)):
            rows.extend(equality([b.cochain[e] for b in self.generators], Fraction(x[e])))
        for i in range(k):
            rows.append(inequality([-1 if j == i else 0 for j in range(k)], 0))
        return find_point(rows, k) is not None


def normal_cone(g: Graph, d: CACOrientation) -> Cone:
    """Cone generated by every bond with positive support inside E(D)."""
    generators = tuple(
        bond for bond in enumerate_bonds(g) if bond.support <= d.oriented_edges
    )
    dimension = Matrix([list(b.cochain) for b in generators]).rank() if generators else 0
    return Cone(generators, dimension)


def cone_contains(g: Graph, d: CACOrientation, x: Sequence[Scalar]) -> bool:
    return normal_cone(g, d).contains(x)


def in_cone_by_support(g: Graph, d: CACOrientation, x: Sequence[Scalar]) -> bool:
    """x lies in the cut space and its positive support lies in E(D)."""
    if solve_potential(g, [Fraction(v) for v in x]) is None:
        return False
    return positive_support(g, x) <= d.oriented_edges


def _monomial(counts: Dict[Variable, int]) -> Monomial:
    return tuple(sorted((var, exp) for var, exp in counts.items() if exp))


def evaluate_monomial(monomial: Monomial, coord: ChainCoordinate, field: Field) -> Any:
    value = field.one
    for (edge, level, side), exp in monomial:
        pair = coord(edge, level)
        value = value * field.power(pair[0] if side == "+" else pair[1], exp)
    return value


def monomial_to_json(g: Graph, monomial: Monomial) -> List[list]:
    out = []
    for (edge, level, side), exp in monomial:
        out.extend([[g.edge_names[edge], level, side]] * exp)
    return out


@dataclass(frozen=True)
class Binomial:
    """lhs = coeff * rhs over chain coordinates x_{e,i} ('+') and x_{e-bar,i} ('-')."""

    lhs: Monomial
    rhs: Monomial
    coeff: Any

    def evaluate(self, coord: ChainCoordinate, field: Field) -> bool:
        left = evaluate_monomial(self.lhs, coord, field)
        right = self.coeff * evaluate_monomial(self.rhs, coord, field)
        return field.equal(left, right)

    def to_json(self, g: Graph, field: Field) -> dict:
        return {
            "lhs": monomial_to_json(g, self.lhs),
            "rhs": monomial_to_json(g, self.rhs),
            "coeff": field.format(self.coeff),
        }


def cycle_binomial(
    gamma: Sequence[int],
    levels: Sequence[int],
    a: Sequence[Any],
    b: Sequence[Any],
    field: Field,
) -> Binomial:
    """Binomial of an integral cycle vector at the given integer levels."""
    lhs: Dict[Variable, int] = {}
    rhs: Dict[Variable, int] = {}
    coeff = field.one
    for e, c in enumerate(gamma):
        if c == 0:
            continue
        L = levels[e]
        forward, backward = (e, L, "+"), (e, L, "-")
        if c > 0:
            lhs[forward] = lhs.get(forward, 0) + c
            rhs[backward] = rhs.get(backward, 0) + c
        else:
            lhs[backward] = lhs.get(backward, 0) - c
            rhs[forward] = rhs.get(forward, 0) - c
        coeff = coeff * field.power(b[e] * field.power(a[e], L), c)
    return Binomial(_monomial(lhs), _monomial(rhs), coeff)


def cycle_binomials(
    g: Graph,
    edges: Iterable[int],
    level: LevelVector,
    a: Sequence[Any],
    b: Sequence[Any],
    field: Field,
) -> List[Binomial]:
    """
    One binomial per undirected simple cycle of the subgraph on ``edges``.

    Args:
        g: Graph
        edges: Edge indices of the subgraph G'
        level: Level vector, integral on G'
        a: Character value per edge
        b: Extended character value per edge
        field: Scalar field

    Returns:
        Binomials prod x_{gamma, level} = coeff * prod x_{gamma-bar, level}

    Raises:
        ValidationError: If the level is not integral on G'
    """
    keep = frozenset(edges)
    for e in keep:
        if not level.is_integral(e):
            raise ValidationError(
                f"Level on edge {g.edge_names[e]} is not integral"
            )
    levels = [level.doubled[e] // 2 for e in range(g.m)]
    out = []
    for cycle in canonical_cycles(g):
        if all(oe.edge in keep for oe in cycle.edges):
            out.append(cycle_binomial(cycle.vector(g.m), levels, a, b, field))
    return out


def cycle_symmetry_witness(g: Graph, A: Iterable[OrientedEdge]):
    """First simple cycle meeting A while its reverse does not, or None."""
    oriented = frozenset(A)
    for cycle in simple_cycles(g):
        meets = any(oe in oriented for oe in cycle.edges)
        reverse_meets = any(oe.reversed() in oriented for oe in cycle.edges)
        if meets != reverse_meets:
            return cycle
    return None


def complete_orientation(g: Graph, A: Iterable[OrientedEdge]) -> Tuple[int, ...]:
    """
    Extend a partial orientation A to an acyclic orientation of every edge.

    Edges outside A are first oriented from the lower to the higher vertex
    index and A is put back; when that closes a directed cycle the
    remaining edges follow a topological order of A instead.

    Args:
        g: Graph
        A: Oriented edges, never both orientations of one edge

    Returns:
        Sign per edge of an acyclic orientation containing A

    Raises:
        HypothesisError: If A itself contains a directed cycle (named)
    """
    oriented = frozenset(OrientedEdge(int(e), int(s)) for e, s in A)
    base = orientation_vector(g, oriented)

    dg = nx.DiGraph()
    dg.add_nodes_from(range(g.n))
    for oe in oriented:
        dg.add_edge(g.oriented_tail(oe), g.oriented_head(oe), edge=oe)
    if not nx.is_directed_acyclic_graph(dg):
        cycle = nx.find_cycle(dg)
        names = " ".join(g.oriented_name(dg.edges[u, w]["edge"]) for u, w in cycle)
        raise HypothesisError(f"Partial orientation contains the directed cycle {names}")

    witness = cycle_symmetry_witness(g, oriented)
    if witness is not None:
        logger.debug("cycle %s meets A in one direction only", witness.describe(g))

    signs = list(base)
    for e, (t, h) in enumerate(g.edges):
        if signs[e] == 0:
            signs[e] = 1 if t < h else -1
    if is_acyclic(g, (OrientedEdge(e, s) for e, s in enumerate(signs))):
        return tuple(signs)

    order = list(nx.lexicographical_topological_sort(dg))
    position = {v: i for i, v in enumerate(order)}
    signs = list(base)
    for e, (t, h) in enumerate(g.edges):
        if signs[e] == 0:
            signs[e] = 1 if position[t] < position[h] else -1
    return tuple(signs)


@dataclass(frozen=True)
class OrbitComponent:
    """Connected component Y_i of G - E(D)."""

    vertices: FrozenSet[int]
    edges: Tuple[int, ...]

    def to_json(self, g: Graph) -> dict:
        return {
            "vertices": sorted(g.vertices[v] for v in self.vertices),
            "edges": [g.edge_names[e] for e in self.edges],
        }


def orbit_closure(g: Graph, d: CACOrientation) -> List[OrbitComponent]:
    """
    Components of G - E(D), ordered so that every D-edge points forward.

    The closure of the orbit of D is the product of the toric varieties of
    these components; their equations come from closure_binomials.
    """
    cut = d.cut_edges
    out = []
    for comp in ordered_components(g, d.oriented_edges):
        edges = tuple(
            e for e in range(g.m) if e not in cut and g.edges[e][0] in comp
        )
        out.append(OrbitComponent(comp, edges))
    return out


def closure_binomials(
    g: Graph,
    d: CACOrientation,
    level: LevelVector,
    a: Sequence[Any],
    b: Sequence[Any],
    field: Field,
) -> List[Binomial]:
    """Cycle binomials of every component of G - E(D)."""
    edges = [e for comp in orbit_closure(g, d) for e in comp.edges]
    return cycle_binomials(g, edges, level, a, b, field)
