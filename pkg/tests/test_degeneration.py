#!/usr/bin/env python3
"""
Test module for the degeneration family, its fibers and limits.
"""

import itertools
import random
from fractions import Fraction

import pytest

from src.arrangement import ArrangementConfig, base_point, special_fiber_system
from src.degeneration import (
    cycle_equation,
    edge_equation,
    evaluate_family,
    family_equations,
    limit_point,
    one_parameter_subgroup,
    solve_character_equations,
    solve_generic_fiber,
    specialize,
    torsor_transporter,
)
from src.utils import Field, FieldExtensionError, NotSameFiberError, ValidationError
from src.voronoi import CACOrientation, enumerate_cac
from tests.graphs import k3


def triangle(twisting=(0, 1, -1), b=(7,), field=None):
    return ArrangementConfig.create(k3(), [1, 2, 1], twisting, [2, 3, 5], b, field)


class TestFamilyEquations:
    """Test the equations of the degeneration family."""

    def test_edge_equation(self):
        """Test the t-degree grows with the level gap."""
        cfg = triangle()
        eq = edge_equation(cfg, 1, -1, 2)
        assert eq.lhs_coeff == (1, 0)
        assert eq.rhs_coeff == (Fraction(1, 27), 6)
        assert eq.to_json(cfg.graph, cfg.field)["t_exp"] == 6

    def test_cycle_equation_sign(self):
        """Test the t-power moves to the mirror side for negative sums."""
        cfg = triangle(twisting=(0, 0, 0), b=(1,))
        gamma = (1, 1, -1)
        assert cycle_equation(cfg, gamma, (1, 0, 0)).rhs_coeff == (1, 1)
        eq = cycle_equation(cfg, gamma, (0, 0, 1))
        assert eq.lhs_coeff == (Fraction(1, 5), 1)
        assert eq.rhs_coeff == (1, 0)

    def test_counts(self):
        """Test window zero keeps only cycle equations."""
        cfg = triangle()
        only_cycles = family_equations(cfg, 0)
        assert [eq.kind for eq in only_cycles] == ["cycle"]
        assert len(family_equations(cfg, 1)) == 9 + 27
        assert len(family_equations(cfg, [1, 0, 0])) == 3 + 3

    def test_cycle_equations_per_level(self):
        """Test every level on the cycle's support gets its own equation."""
        cfg = triangle()
        cycles = [eq for eq in family_equations(cfg, 1) if eq.kind == "cycle"]
        expected = [
            cycle_equation(cfg, (1, 1, -1), alpha)
            for alpha in itertools.product(range(-1, 2), repeat=3)
        ]
        assert cycles == expected

    def test_window_validation(self):
        """Test negative and mismatched windows."""
        with pytest.raises(ValidationError, match="Window"):
            family_equations(triangle(), -1)
        with pytest.raises(ValidationError, match="Window"):
            family_equations(triangle(), [1, 1])

    @pytest.mark.parametrize("twisting", [(0, 0, 0), (0, 1, -1), (2, 0, 1)])
    def test_special_fiber(self, twisting):
        """Test t = 0 gives the equations of R and Y up to scaling."""
        cfg = triangle(twisting=twisting)
        field = cfg.field
        family = sorted(
            specialize(eq, field, 0).normal_form(field) for eq in family_equations(cfg, 1)
        )
        special = sorted(z.normal_form(field) for z in special_fiber_system(cfg, 1))
        assert family == special


class TestGenericFiber:
    """Test points of fibers over nonzero t."""

    def test_solution_satisfies_family(self):
        """Test generic fiber points at seeded values of t."""
        cfg = triangle()
        equations = family_equations(cfg, 2)
        rng = random.Random(11)
        for _ in range(5):
            t0 = cfg.field.random_unit(rng)
            assignment = solve_generic_fiber(cfg, t0, window=2)
            assert evaluate_family(cfg, equations, assignment, t0)

    def test_twisted_ratio(self):
        """Test the level-zero ratio of the non-tree edge."""
        cfg = ArrangementConfig.create(k3(), [1, 1, 1], [0, 0, 1])
        assignment = solve_generic_fiber(cfg, Fraction(1, 2), window=0)
        assert assignment[(2, 0)] == (Fraction(1, 2), 1)
        assert assignment[(0, 0)] == (1, 1)

    def test_character_b(self):
        """Test b enters the non-tree ratio."""
        cfg = ArrangementConfig.create(k3(), [1, 1, 1], b=[5])
        assignment = solve_generic_fiber(cfg, Fraction(1, 2), window=0)
        assert assignment[(2, 0)] == (5, 1)

    def test_prime_field(self):
        """Test the fiber over a prime field."""
        cfg = triangle(field=Field("fp:101"))
        equations = family_equations(cfg, 1)
        assignment = solve_generic_fiber(cfg, 3, window=1)
        assert evaluate_family(cfg, equations, assignment, 3)

    def test_zero_t(self):
        """Test t0 = 0 is not a generic fiber."""
        with pytest.raises(ValidationError, match="nonzero"):
            solve_generic_fiber(triangle(), 0)

    def test_assignment_errors(self):
        """Test missing levels and vanishing pairs."""
        cfg = triangle()
        equations = family_equations(cfg, 1)
        short = solve_generic_fiber(cfg, 2, window=0)
        with pytest.raises(ValidationError, match="no coordinates"):
            evaluate_family(cfg, equations, short, 2)
        broken = dict(solve_generic_fiber(cfg, 2, window=1))
        broken[(0, 0)] = (0, 0)
        with pytest.raises(ValidationError, match="both vanish"):
            evaluate_family(cfg, equations, broken, 2)


class TestTransporter:
    """Test torus translates between fiber points."""

    def test_translate(self):
        """Test the character between a point and its translate."""
        cfg = triangle()
        t0 = Fraction(3, 2)
        first = solve_generic_fiber(cfg, t0, window=1)
        c = (1, 2, 3)
        second = {}
        for (e, i), (x, y) in first.items():
            t, h = cfg.graph.edges[e]
            second[(e, i)] = (x * c[h] / c[t], y)
        assert torsor_transporter(cfg, first, second, t0) == c

    def test_pinned(self):
        """Test pinning a tree ratio moves the point within the fiber."""
        cfg = triangle()
        t0 = Fraction(3, 2)
        first = solve_generic_fiber(cfg, t0, window=1)
        second = solve_generic_fiber(cfg, t0, window=1, pinned={0: 3})
        assert second[(0, 0)] == (3, 1)
        assert torsor_transporter(cfg, first, second, t0) == (1, 3, 3)

    def test_different_fibers(self):
        """Test changing one non-tree ratio leaves the orbit."""
        cfg = triangle()
        t0 = Fraction(3, 2)
        first = solve_generic_fiber(cfg, t0, window=1)
        second = dict(first)
        x, y = second[(2, 0)]
        second[(2, 0)] = (2 * x, y)
        with pytest.raises(NotSameFiberError, match="e3"):
            torsor_transporter(cfg, first, second, t0)


class TestCharacterEquations:
    """Test multiplicative linear systems."""

    def test_two_unknowns(self):
        """Test xy = 8 and x/y = 2."""
        rows = [((1, 1), 8), ((1, -1), 2)]
        assert solve_character_equations(rows, 2, Field("q")) == (4, 2)

    def test_missing_root(self):
        """Test square roots outside the rationals."""
        with pytest.raises(FieldExtensionError, match="root"):
            solve_character_equations([((2,), 2)], 1, Field("q"))

    def test_prime_field_root(self):
        """Test square roots that exist modulo a prime."""
        field = Field("fp:7")
        (x,) = solve_character_equations([((2,), 2)], 1, field)
        assert field.equal(x**2, 2)

    def test_inconsistent(self):
        """Test contradictory rows."""
        with pytest.raises(ValidationError, match="inconsistent"):
            solve_character_equations([((1,), 2), ((1,), 3)], 1, Field("q"))
        with pytest.raises(ValidationError, match="units"):
            solve_character_equations([((1,), 0)], 1, Field("q"))

    def test_free_unknowns(self):
        """Test unknowns without equations stay at one."""
        assert solve_character_equations([((0, 1), Fraction(1, 8))], 2, Field("q")) == (1, Fraction(1, 8))


class TestLimits:
    """Test limits along one-parameter subgroups."""

    def test_subgroup(self):
        """Test components are numbered in order."""
        g = k3()
        d = CACOrientation.from_partition(g, [[0], [1, 2]])
        assert one_parameter_subgroup(g, d) == (0, 1, 1)

    @pytest.mark.parametrize(
        "twisting,shift",
        [((0, 0, 0), (0, 0, 0)), ((0, 0, 1), (0, 0, 0)), ((1, 0, 0), (0, -1, -1))],
    )
    def test_limit_is_base_point(self, twisting, shift):
        """Test limits land on base points of shifted potentials."""
        cfg = triangle(twisting=twisting)
        for d in enumerate_cac(cfg.graph).elements:
            rho = one_parameter_subgroup(cfg.graph, d)
            expected = base_point(cfg, 1, tuple(r + s for r, s in zip(rho, shift)))
            assert limit_point(cfg, rho) == expected

    def test_rho_length(self):
        """Test malformed subgroups."""
        with pytest.raises(ValidationError, match="expected 3"):
            limit_point(triangle(), (0, 1))
