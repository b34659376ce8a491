#!/usr/bin/env python3
"""
Test module for bonds, Kirchhoff counts and the flow constructions.
"""

import math
import random

import pytest

from src.graphcore import Graph, OrientedEdge, apply_d, apply_d_star, simple_cycles
from src.lattice import (
    FlowCertificate,
    bounded_flow,
    brute_force_bounded_flow,
    critical_group,
    cut_is_violating,
    enumerate_bonds,
    enumerate_spanning_trees,
    find_violating_cut,
    laplacian_lattice_index,
    nonneg_flow,
    solve_potential,
    spanning_tree_count,
)
from src.utils import HypothesisError, SizeLimitError, ValidationError
from tests.graphs import b2, c4, k3, k4, make_graph, p2, p4, theta

ALL_GRAPHS = [p2, p4, k3, c4, k4, b2, theta]


def random_connected_graph(rng, max_vertices=4, max_edges=6):
    while True:
        n = rng.randint(2, max_vertices)
        m = rng.randint(n - 1, max_edges)
        edges = []
        for _ in range(m):
            t, h = rng.sample(range(n), 2)
            edges.append((t, h))
        try:
            return make_graph(n, edges)
        except ValidationError:
            continue


class TestBonds:
    """Test bond enumeration."""

    def test_counts(self):
        """Test exhaustive bond counts."""
        assert len(enumerate_bonds(p2())) == 2
        assert len(enumerate_bonds(k3())) == 6
        assert len(enumerate_bonds(c4())) == 12
        assert len(enumerate_bonds(k4())) == 14
        assert len(enumerate_bonds(p4())) == 6

    def test_bond_properties(self):
        """Test cochains are {-1,0,1}-valued cuts with nonempty positive support."""
        for make in ALL_GRAPHS:
            g = make()
            for bond in enumerate_bonds(g):
                assert set(bond.cochain) <= {-1, 0, 1}
                assert bond.support
                assert bond.norm_sq == sum(c * c for c in bond.cochain)
                assert g.induced_connected(bond.X)
                assert g.induced_connected(set(range(g.n)) - bond.X)

    def test_both_sides_emitted(self):
        """Test -beta is a bond whenever beta is."""
        cochains = {bond.cochain for bond in enumerate_bonds(theta())}
        assert all(tuple(-c for c in beta) in cochains for beta in cochains)

    def test_size_limit(self):
        """Test the vertex cap."""
        with pytest.raises(SizeLimitError):
            enumerate_bonds(k4(), max_vertices=3)


class TestKirchhoff:
    """Test tree counts against the lattice index."""

    def test_known_counts(self):
        """Test small known values."""
        assert spanning_tree_count(p2()) == 1
        assert spanning_tree_count(k3()) == 3
        assert spanning_tree_count(k4()) == 16
        assert spanning_tree_count(theta()) == 8
        assert laplacian_lattice_index(k3()) == 3
        assert laplacian_lattice_index(p2()) == 1

    def test_consistency(self):
        """Test determinant, Smith form and enumeration agree."""
        for make in ALL_GRAPHS:
            g = make()
            count = spanning_tree_count(g)
            assert laplacian_lattice_index(g) == count
            assert len(enumerate_spanning_trees(g)) == count
            assert math.prod(critical_group(g)) == count

    def test_critical_group(self):
        """Test invariant factors."""
        assert critical_group(k3()) == (3,)
        assert critical_group(c4()) == (4,)
        assert critical_group(k4()) == (4, 4)
        assert critical_group(p4()) == ()

    def test_single_vertex(self):
        """Test the one-vertex graph."""
        g = Graph(("v1",), ())
        assert spanning_tree_count(g) == 1
        assert laplacian_lattice_index(g) == 1


class TestSolvePotential:
    """Test potentials of cut space elements."""

    def test_round_trip(self):
        """Test d(f) recovers f up to the value at v0."""
        g = k4()
        f = (0, 2, -1, 5)
        assert solve_potential(g, apply_d(g, f)) == f

    def test_not_a_cut(self):
        """Test cycle-carrying cochains."""
        assert solve_potential(k3(), (1, 1, 1)) is None


class TestBoundedFlow:
    """Test the bounded flow construction."""

    def test_tight_triangle(self):
        """Test the unique flow on a tight triangle."""
        assert bounded_flow(k3(), (1, 1, -1), (1, 1, 1)) == (1, 1, -1)

    def test_coboundary_zero_capacity(self):
        """Test beta = d(f) with zero capacity."""
        g = k4()
        beta = apply_d(g, (0, 3, -2, 1))
        assert bounded_flow(g, beta, (0,) * g.m) == (0,) * g.m

    def test_hypothesis_error(self):
        """Test a violated cycle condition names the cycle."""
        with pytest.raises(HypothesisError, match="Cycle sum 4 exceeds capacity 3"):
            bounded_flow(k3(), (2, 2, 0), (1, 1, 1))

    def test_malformed_input(self):
        """Test capacity validation."""
        with pytest.raises(ValidationError, match="nonnegative integers"):
            bounded_flow(k3(), (0, 0, 0), (1, -1, 1))

    def test_against_brute_force(self):
        """Test bounded_flow and the exhaustive oracle agree on seeded instances."""
        rng = random.Random(0)
        for _ in range(200):
            g = random_connected_graph(rng)
            beta = tuple(rng.randint(-3, 3) for _ in range(g.m))
            h = tuple(rng.randint(0, 3) for _ in range(g.m))
            oracle = brute_force_bounded_flow(g, beta, h)
            try:
                eta = bounded_flow(g, beta, h)
            except HypothesisError:
                assert oracle is None
                continue
            assert oracle is not None
            assert all(abs(eta[e]) <= h[e] for e in range(g.m))
            for cycle in simple_cycles(g):
                vec = cycle.vector(g.m)
                assert sum(a * b for a, b in zip(vec, eta)) == sum(
                    a * b for a, b in zip(vec, beta)
                )


class TestNonnegFlow:
    """Test nonnegative flows and violating cuts."""

    def test_single_edge(self):
        """Test both directions on P2."""
        g = p2()
        D = [OrientedEdge(0, 1)]
        assert nonneg_flow(g, (-1, 1), D) == FlowCertificate(eta=(1,))
        result = nonneg_flow(g, (1, -1), D)
        assert not result.feasible
        assert result.cut == frozenset({1})

    def test_zero_demand(self):
        """Test h = 0."""
        assert nonneg_flow(k3(), (0, 0, 0), []).eta == (0, 0, 0)

    def test_malformed_orientation(self):
        """Test both orientations of one edge."""
        with pytest.raises(ValidationError, match="Both orientations"):
            nonneg_flow(p2(), (0, 0), [OrientedEdge(0, 1), OrientedEdge(0, -1)])
        with pytest.raises(ValidationError, match="sum to zero"):
            nonneg_flow(p2(), (1, 0), [])

    def test_against_cut_oracle(self):
        """Test certificates on seeded instances."""
        rng = random.Random(1)
        for _ in range(200):
            g = random_connected_graph(rng)
            D = []
            for e in range(g.m):
                choice = rng.choice([0, 1, -1])
                if choice:
                    D.append(OrientedEdge(e, choice))
            h = [rng.randint(-3, 3) for _ in range(g.n - 1)]
            h.append(-sum(h))
            result = nonneg_flow(g, h, D)
            oracle = find_violating_cut(g, h, D)
            if result.feasible:
                assert oracle is None
                assert apply_d_star(g, result.eta) == tuple(h)
                for oe in D:
                    assert oe.sign * result.eta[oe.edge] >= 0
            else:
                assert oracle is not None
                assert cut_is_violating(g, h, D, result.cut)
