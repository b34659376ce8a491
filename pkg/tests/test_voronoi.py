#!/usr/bin/env python3
"""
Test module for Voronoi cells, tiles and tile adjacency.
"""

import itertools
import random
from fractions import Fraction

import pytest

from src.graphcore import LevelVector
from src.utils import NotATileError, SizeLimitError, ValidationError, WindowError
from src.voronoi import (
    CACOrientation,
    active_subgraph,
    build_tile,
    cell_geometry,
    check_face_poset,
    connected_refinement,
    dee,
    enumerate_cac,
    enumerate_tiles,
    face_dimension,
    locate_point,
    solve_level_function,
    suggest_window,
    tiles_adjacent,
    tiles_intersect,
)
from tests.graphs import b2, c4, k3, k4, p2, tiling_configurations


def strictly_inside(tile, x):
    diff = [Fraction(xv) - cv for xv, cv in zip(x, tile.center)]
    return all(2 * sum(diff[v] for v in X) < bound for X, bound in tile.bonds)


def boxes_overlap(t1, t2):
    """Bounding boxes |x_v - c_v| <= deg(v)/2 of two tiles meet."""
    return all(
        abs(c1 - c2) <= b1 + b2
        for c1, c2, b1, b2 in zip(t1.center, t2.center, t1.degree_bound, t2.degree_bound)
    )


class TestCAC:
    """Test coherent acyclic orientations."""

    def test_counts(self):
        """Test the number of CAC elements of small graphs."""
        assert len(enumerate_cac(p2())) == 3
        assert len(enumerate_cac(k3())) == 13

    def test_minimal_elements_are_acyclic_orientations(self):
        """Test minimal elements orient every edge."""
        poset = enumerate_cac(k3())
        minimal = poset.minimal()
        assert len(minimal) == 6
        assert all(len(d.oriented_edges) == 3 for d in minimal)

    def test_partition_must_cover(self):
        """Test ordered partitions with missing vertices."""
        with pytest.raises(ValidationError, match="cover every vertex"):
            CACOrientation.from_partition(k3(), [[0], [1]])

    def test_face_dimension(self):
        """Test dimensions of the empty and full orientations."""
        g = k3()
        assert face_dimension(g, CACOrientation(frozenset())) == 2
        total = CACOrientation.from_partition(g, [[0], [1], [2]])
        assert face_dimension(g, total) == 0
        assert total.chi(3) == (1, 1, 1)

    def test_vertex_cap(self):
        """Test the enumeration refuses graphs above the cap."""
        with pytest.raises(SizeLimitError, match="max: 3"):
            enumerate_cac(k4(), max_vertices=3)


class TestCellGeometry:
    """Test exact Voronoi cells."""

    @pytest.mark.parametrize(
        "graph,expected",
        [(p2, 2), (k3, 6), (c4, 14), (k4, 24), (b2, 2)],
    )
    def test_vertex_counts(self, graph, expected):
        """Test vertices match acyclic orientations."""
        assert len(cell_geometry(graph()).vertices) == expected

    @pytest.mark.parametrize("graph", [p2, k3, c4, b2])
    def test_face_poset(self, graph):
        """Test faces correspond to CAC elements in reverse order."""
        g = graph()
        assert check_face_poset(cell_geometry(g), enumerate_cac(g))

    def test_hexagon(self):
        """Test the cell of the triangle in sum-zero coordinates."""
        vertices = set(cell_geometry(k3()).h0_vertices)
        expected = set(itertools.permutations((Fraction(1), Fraction(-1), Fraction(0))))
        assert vertices == expected

    def test_cut_membership(self):
        """Test points of the cut space inside and outside the cell."""
        geometry = cell_geometry(p2())
        assert geometry.contains_cut((Fraction(1, 2),))
        assert not geometry.contains_cut((Fraction(3, 4),))

    def test_disconnected(self):
        """Test disconnected graphs have no cell."""
        g = k3().spanning_subgraph([0])
        with pytest.raises(ValidationError, match="connected graph"):
            cell_geometry(g)


class TestLevels:
    """Test the level function and level solving."""

    def test_dee(self):
        """Test integral and half-integral levels."""
        assert dee(p2(), (2,), (0,), (0, 1)).doubled == (1,)
        assert dee(k3(), (1, 1, 1), (0, 0, 0), (0, 1, 1)).doubled == (2, 0, 2)
        assert dee(p2(), (1,), (1,), (0, 1), n=2).doubled == (3,)

    def test_dee_validation(self):
        """Test invalid lengths and scalings."""
        with pytest.raises(ValidationError, match="positive integers"):
            dee(p2(), (0,), (0,), (0, 0))
        with pytest.raises(ValidationError, match="n must be"):
            dee(p2(), (1,), (0,), (0, 0), n=0)

    def test_active_subgraph(self):
        """Test integral-level edges and their components."""
        whole = active_subgraph(k3(), LevelVector((0, 0, 0)))
        assert whole.edges == (0, 1, 2)
        assert whole.connected
        split = active_subgraph(p2(), LevelVector((1,)))
        assert split.edges == ()
        assert split.components == (frozenset({0}), frozenset({1}))
        path = active_subgraph(k3(), LevelVector((0, 0, 1)))
        assert path.edges == (0, 1)
        assert path.connected
        with pytest.raises(ValidationError, match="edge count"):
            active_subgraph(k3(), LevelVector((0,)))

    def test_solve_half_level(self):
        """Test a half-integral level is realized by a rational potential."""
        assert solve_level_function(p2(), (2,), (0,), LevelVector((1,))) == (1, (0, 1))

    def test_unrealizable(self):
        """Test integral levels with a nonzero cycle sum."""
        g = k3()
        assert solve_level_function(g, (1, 1, 1), (0, 0, 0), LevelVector((2, 2, 2))) is None

    def test_round_trip(self):
        """Test every level in a window is solved back."""
        g = k3()
        lengths, twisting = (1, 2, 3), (0, 1, -1)
        for f in itertools.product(range(-2, 3), repeat=2):
            level = dee(g, lengths, twisting, (0,) + f)
            result = solve_level_function(g, lengths, twisting, level)
            assert result is not None
            n, found = result
            assert dee(g, lengths, twisting, found, n) == level


class TestTiles:
    """Test tiles, enumeration and location."""

    def test_build_tile(self):
        """Test centers and active subgraphs."""
        tile = build_tile(p2(), (1,), (0,), (0, 1))
        assert tile.center == (Fraction(-1), Fraction(1))
        assert tile.active.connected

    def test_build_tile_errors(self):
        """Test normalization and connectivity checks."""
        with pytest.raises(ValidationError, match="normalized"):
            build_tile(p2(), (1,), (0,), (1, 0))
        with pytest.raises(NotATileError, match="2 components"):
            build_tile(p2(), (2,), (0,), (0, 1))

    def test_enumerate(self):
        """Test windows skip potentials with disconnected active subgraphs."""
        tiles = enumerate_tiles(p2(), (2,), (0,), 2)
        assert [t.f for t in tiles] == [(0, -2), (0, 0), (0, 2)]
        assert len(enumerate_tiles(k3(), (1, 1, 1), (0, 0, 0), 1)) == 9

    def test_locate_shared_point(self):
        """Test a point on the boundary of two segments."""
        x = (Fraction(-1, 2), Fraction(1, 2))
        found = locate_point(p2(), (2,), (0,), x, 2)
        assert [t.f for t in found] == [(0, 0), (0, 2)]

    def test_locate_errors(self):
        """Test points off H0 and windows that are too small."""
        with pytest.raises(ValidationError, match="sum zero"):
            locate_point(p2(), (2,), (0,), (1, 1), 2)
        with pytest.raises(WindowError, match="try at least"):
            locate_point(p2(), (2,), (0,), (-2, 2), 0)

    def test_suggest_window(self):
        """Test the window heuristic."""
        assert suggest_window(p2(), (2,), (0,), (Fraction(-1, 2), Fraction(1, 2))) == 4


    @pytest.mark.parametrize("graph,lengths,twisting", tiling_configurations())
    def test_tiles_cover_points(self, graph, lengths, twisting):
        """Test random points lie in a tile, interior points in exactly one."""
        g = graph()
        window = suggest_window(g, lengths, twisting, [3] * g.n)
        nearby = [
            tile
            for tile in enumerate_tiles(g, lengths, twisting, window)
            if all(abs(c) <= Fraction(1, 2) + b for c, b in zip(tile.center, tile.degree_bound))
        ]
        rng = random.Random(0)
        for _ in range(500):
            rest = [Fraction(rng.randint(-6, 6), 36) for _ in range(g.n - 1)]
            x = [-sum(rest)] + rest
            found = locate_point(g, lengths, twisting, x, window, tiles=nearby)
            assert found
            if any(strictly_inside(tile, x) for tile in found):
                assert len(found) == 1
    def test_connected_refinement(self):
        """Test disconnected potentials are shifted to a tile."""
        assert connected_refinement(p2(), (2,), (0,), (0, 1)) == (0, 2)
        assert connected_refinement(p2(), (2,), (0,), (0, 2)) == (0, 2)
        g = k3()
        lengths, twisting = (2, 3, 2), (0, 1, 0)
        for f in itertools.product(range(-2, 3), repeat=2):
            refined = connected_refinement(g, lengths, twisting, (0,) + f)
            build_tile(g, lengths, twisting, refined)


class TestAdjacency:
    """Test the combinatorial adjacency criterion."""

    def test_segments(self):
        """Test neighbouring and distant segments."""
        assert tiles_adjacent(p2(), (1,), (0,), (0, 0), (0, 1)) is not None
        assert tiles_adjacent(p2(), (1,), (0,), (0, 0), (0, 2)) is None

    def test_triangle(self):
        """Test tiles of the triangle."""
        ones = (1, 1, 1)
        zeros = (0, 0, 0)
        face = tiles_adjacent(k3(), ones, zeros, (0, 0, 0), (0, 1, 1))
        assert face is not None
        assert tiles_adjacent(k3(), ones, zeros, (0, 0, 0), (0, 2, 2)) is None

    def test_shared_point_in_both_tiles(self):
        """Test d*(alpha) lies in both tiles."""
        g = k3()
        ones, zeros = (1, 1, 1), (0, 0, 0)
        face = tiles_adjacent(g, ones, zeros, (0, 0, 0), (0, 1, 0))
        assert face is not None
        point = face.point(g)
        assert build_tile(g, ones, zeros, (0, 0, 0)).contains(point)
        assert build_tile(g, ones, zeros, (0, 1, 0)).contains(point)

    @pytest.mark.parametrize(
        "graph,lengths,twisting,window",
        [(p2, (2,), (0,), 2), (k3, (1, 1, 1), (0, 0, 0), 1)]
        + [config + (3,) for config in tiling_configurations()],
    )
    def test_agrees_with_intersection(self, graph, lengths, twisting, window):
        """Test the criterion against the exact intersection oracle."""
        g = graph()
        tiles = enumerate_tiles(g, lengths, twisting, window)
        for t1, t2 in itertools.combinations(tiles, 2):
            combinatorial = tiles_adjacent(g, lengths, twisting, t1.f, t2.f) is not None
            if not boxes_overlap(t1, t2):
                assert not combinatorial
                continue
            assert combinatorial == tiles_intersect(g, t1, t2)
