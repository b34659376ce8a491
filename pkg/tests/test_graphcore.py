#!/usr/bin/env python3
"""
Test module for graphs, cochains and cycle spaces.
"""

import random
from fractions import Fraction

import pytest

from src.graphcore import (
    Graph,
    LevelVector,
    OrientedEdge,
    apply_d,
    apply_d_star,
    canonical_cycles,
    cut_element,
    cycle_space,
    enumerate_acyclic_orientations,
    inner,
    is_acyclic,
    laplacian,
    orientation_vector,
    positive_support,
    simple_cycles,
    spanning_tree,
)
from src.utils import ValidationError
from tests.graphs import b2, c4, k3, k4, p2, theta


class TestGraph:
    """Test graph construction and JSON round trips."""

    def test_default_edge_names(self):
        """Test e1, e2, ... naming."""
        assert k3().edge_names == ("e1", "e2", "e3")

    def test_json(self):
        """Test loading from the documented JSON form."""
        g = Graph.from_json(
            {
                "vertices": ["a", "b"],
                "edges": [{"name": "x", "tail": "a", "head": "b"}, {"tail": "b", "head": "a"}],
            }
        )
        assert g.edges == ((0, 1), (1, 0))
        assert g.edge_names == ("x", "e2")
        assert Graph.from_json(g.to_json()) == g

    def test_lookup_errors(self):
        """Test unknown vertex and edge names."""
        g = k3()
        assert g.edge_index("e3") == 2
        with pytest.raises(ValidationError, match="Unknown edge"):
            g.edge_index("e9")
        with pytest.raises(ValidationError, match="Unknown vertex"):
            g.vertex_index("v9")

    def test_components(self):
        """Test components of spanning subgraphs."""
        g = c4()
        assert g.components([0, 2]) == [frozenset({0, 1}), frozenset({2, 3})]
        assert g.is_connected([0, 1, 2])
        sub = g.spanning_subgraph([0])
        assert sub.m == 1 and sub.n == 4
        assert not sub.is_connected()


class TestCochains:
    """Test d, d* and the Laplacian."""

    def test_adjointness(self):
        """Test <d f, a> = <f, d* a> on random data."""
        rng = random.Random(0)
        for g in (k3(), c4(), k4(), b2(), theta()):
            for _ in range(10):
                f = [rng.randint(-3, 3) for _ in range(g.n)]
                a = [rng.randint(-3, 3) for _ in range(g.m)]
                assert inner(apply_d(g, f), a) == inner(f, apply_d_star(g, a))

    def test_laplacian_kills_constants(self):
        """Test L(1) = 0."""
        g = k4()
        assert laplacian(g, [1] * g.n) == (0,) * g.n

    def test_cut_element(self):
        """Test signs of d(chi_X)."""
        g = k3()
        assert cut_element(g, {1}) == (1, -1, 0)
        assert positive_support(g, cut_element(g, {1})) == frozenset(
            {OrientedEdge(0, 1), OrientedEdge(1, -1)}
        )

    def test_length_checks(self):
        """Test mismatched lengths."""
        with pytest.raises(ValidationError, match="0-cochain has length"):
            apply_d(k3(), [0, 1])

    def test_orientation_vector(self):
        """Test both orientations of one edge are rejected."""
        g = p2()
        assert orientation_vector(g, [OrientedEdge(0, -1)]) == (-1,)
        with pytest.raises(ValidationError, match="Both orientations"):
            orientation_vector(g, [OrientedEdge(0, 1), OrientedEdge(0, -1)])


class TestLevelVector:
    """Test the doubled half-integer encoding."""

    def test_values(self):
        """Test integrality and shifting."""
        level = LevelVector.from_values([0, Fraction(1, 2), -1])
        assert level.doubled == (0, 1, -2)
        assert level.integral_edges() == (0, 2)
        assert level.integer(2) == -1
        assert level.shifted((1, -1, 0)).doubled == (1, 0, -2)
        with pytest.raises(ValidationError, match="not integral"):
            level.integer(1)
        with pytest.raises(ValidationError, match="not a half-integer"):
            LevelVector.from_values([Fraction(1, 3)])


class TestCycles:
    """Test spanning trees and cycle enumeration."""

    def test_spanning_tree(self):
        """Test the lexicographically first tree."""
        assert spanning_tree(k3()) == (0, 1)
        assert spanning_tree(b2()) == (0,)

    def test_fundamental_cycles(self):
        """Test fundamental cycles are cycles through their edge."""
        g = k3()
        space = cycle_space(g)
        assert space.rank == 1
        ((e, vec),) = space.fundamental
        assert e == 2
        assert vec == (-1, -1, 1)
        assert apply_d_star(g, vec) == (0, 0, 0)

    def test_explicit_tree(self):
        """Test a user-chosen tree and a bad one."""
        space = cycle_space(k3(), tree=[1, 2])
        assert space.tree == (1, 2)
        with pytest.raises(ValidationError, match="not a spanning tree"):
            cycle_space(c4(), tree=[0, 1])

    def test_simple_cycle_counts(self):
        """Test both orientations of each undirected cycle appear."""
        assert len(simple_cycles(p2())) == 0
        assert len(simple_cycles(k3())) == 2
        assert len(simple_cycles(b2())) == 2
        assert len(simple_cycles(k4())) == 14
        assert len(canonical_cycles(k4())) == 7
        assert len(canonical_cycles(theta())) == 3

    def test_simple_cycles_are_closed(self):
        """Test every simple cycle lies in ker d*."""
        for g in (k4(), theta(), b2()):
            for cycle in simple_cycles(g):
                assert all(v == 0 for v in apply_d_star(g, cycle.vector(g.m)))


class TestAcyclicOrientations:
    """Test acyclic orientation enumeration."""

    def test_counts(self):
        """Test counts equal |chromatic polynomial at -1|."""
        assert len(enumerate_acyclic_orientations(k3())) == 6
        assert len(enumerate_acyclic_orientations(c4())) == 14
        assert len(enumerate_acyclic_orientations(k4())) == 24
        assert len(enumerate_acyclic_orientations(b2())) == 2

    def test_is_acyclic(self):
        """Test a directed triangle is detected."""
        g = k3()
        cyclic = [OrientedEdge(0, 1), OrientedEdge(1, 1), OrientedEdge(2, -1)]
        assert not is_acyclic(g, cyclic)
        assert is_acyclic(g, cyclic[:2])
