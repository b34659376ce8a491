#!/usr/bin/env python3
"""
Test module for normal cones, cycle binomials and orbit closures.
"""

import random
from fractions import Fraction

import pytest

from src.graphcore import (
    LevelVector,
    OrientedEdge,
    apply_d,
    cut_element,
    enumerate_acyclic_orientations,
    is_acyclic,
)
from src.toric import (
    closure_binomials,
    complete_orientation,
    cone_contains,
    cycle_binomials,
    in_cone_by_support,
    normal_cone,
    orbit_closure,
)
from src.utils import Field, HypothesisError, ValidationError
from src.voronoi import CACOrientation, enumerate_cac
from tests.graphs import c4, k3, k4


class TestNormalCone:
    """Test cones of CAC elements."""

    def test_empty_orientation(self):
        """Test the empty orientation gives the zero cone."""
        cone = normal_cone(k3(), CACOrientation(frozenset()))
        assert cone.generators == ()
        assert cone.dimension == 0
        assert cone.contains((0, 0, 0))
        assert not cone.contains((1, 0, 1))

    def test_total_order(self):
        """Test a full-dimensional cone."""
        g = k3()
        d = CACOrientation.from_partition(g, [[0], [1], [2]])
        cone = normal_cone(g, d)
        assert {b.X for b in cone.generators} == {frozenset({1, 2}), frozenset({2})}
        assert cone.dimension == 2

    def test_membership(self):
        """Test sums of generators and their negatives."""
        g = k3()
        d = CACOrientation.from_partition(g, [[0], [1], [2]])
        x = tuple(a + b for a, b in zip(cut_element(g, {2}), cut_element(g, {1, 2})))
        assert x == (1, 1, 2)
        assert cone_contains(g, d, x)
        assert not cone_contains(g, d, tuple(-v for v in x))
        assert not cone_contains(g, d, (1, 0, 0))
        assert not in_cone_by_support(g, d, (1, 0, 0))

    @pytest.mark.parametrize("graph", [k3, c4])
    def test_support_criterion(self, graph):
        """Test cone membership agrees with the positive support criterion."""
        g = graph()
        rng = random.Random(7)
        for d in enumerate_cac(g).elements:
            for _ in range(10):
                f = [Fraction(rng.randint(-2, 2), rng.randint(1, 2)) for _ in range(g.n)]
                x = apply_d(g, f)
                assert cone_contains(g, d, x) == in_cone_by_support(g, d, x)


class TestCycleBinomials:
    """Test binomial equations of cycles."""

    def coordinate(self, ratios):
        return lambda e, level: (Fraction(ratios[e]), Fraction(1))

    def test_trivial_characters(self):
        """Test ratios with trivial cycle product."""
        field = Field("q")
        (binomial,) = cycle_binomials(
            k3(), range(3), LevelVector.zeros(3), (1, 1, 1), (1, 1, 1), field
        )
        assert binomial.coeff == 1
        assert binomial.evaluate(self.coordinate((2, 3, 6)), field)
        assert not binomial.evaluate(self.coordinate((2, 3, 5)), field)

    def test_levels_enter_coefficient(self):
        """Test the coefficient picks up a^level."""
        field = Field("q")
        (binomial,) = cycle_binomials(
            k3(), range(3), LevelVector((2, 2, 2)), (2, 3, 5), (1, 1, 1), field
        )
        assert binomial.evaluate(self.coordinate((2, 3, 5)), field)
        assert not binomial.evaluate(self.coordinate((2, 3, 6)), field)

    def test_subgraph_without_cycles(self):
        """Test forests give no equations."""
        assert cycle_binomials(k3(), [0, 1], LevelVector.zeros(3), (1, 1, 1), (1, 1, 1), Field("q")) == []

    def test_half_level(self):
        """Test half-integral levels on the subgraph are rejected."""
        with pytest.raises(ValidationError, match="not integral"):
            cycle_binomials(k3(), range(3), LevelVector((1, 0, 0)), (1, 1, 1), (1, 1, 1), Field("q"))

    def test_k4_equations(self):
        """Test one equation per undirected simple cycle."""
        field = Field("fp:101")
        eqs = cycle_binomials(k4(), range(6), LevelVector.zeros(6), (1,) * 6, (1,) * 6, field)
        assert len(eqs) == 7


class TestCompleteOrientation:
    """Test extending partial orientations."""

    def test_directed_cycle(self):
        """Test cyclic partial orientations are named in the error."""
        with pytest.raises(HypothesisError, match="directed cycle"):
            complete_orientation(k3(), [(0, 1), (1, 1), (2, -1)])

    def test_fallback_order(self):
        """Test the topological fallback when the index order closes a cycle."""
        assert complete_orientation(k3(), [(2, -1)]) == (-1, 1, -1)

    def test_random_partial_orientations(self):
        """Test extensions of seeded subsets of acyclic orientations."""
        g = k4()
        rng = random.Random(3)
        orientations = enumerate_acyclic_orientations(g)
        for _ in range(100):
            signs = rng.choice(orientations)
            A = [OrientedEdge(e, s) for e, s in enumerate(signs) if rng.random() < 0.5]
            result = complete_orientation(g, A)
            assert all(result[oe.edge] == oe.sign for oe in A)
            assert is_acyclic(g, (OrientedEdge(e, s) for e, s in enumerate(result)))


class TestOrbitClosure:
    """Test components of G - E(D)."""

    def test_components(self):
        """Test the ordered components and their equations."""
        g = k3()
        d = CACOrientation.from_partition(g, [[0], [1, 2]])
        components = orbit_closure(g, d)
        assert [c.vertices for c in components] == [frozenset({0}), frozenset({1, 2})]
        assert [c.edges for c in components] == [(), (1,)]
        field = Field("q")
        assert closure_binomials(g, d, LevelVector.zeros(3), (1, 1, 1), (1, 1, 1), field) == []

    def test_empty_orientation(self):
        """Test the open orbit keeps the whole graph."""
        g = k3()
        (component,) = orbit_closure(g, CACOrientation(frozenset()))
        assert component.edges == (0, 1, 2)
        assert len(closure_binomials(g, CACOrientation(frozenset()), LevelVector.zeros(3), (1, 1, 1), (1, 1, 1), Field("q"))) == 1
