"""
Toric Tiling

Exact computations for twisted mixed Voronoi tilings of graphs and the
toric arrangements glued from their tiles: bonds and Voronoi cells, tile
enumeration and adjacency, cycle binomials, torus orbits, membership and
the one-parameter degeneration to the arrangement.
"""

__version__ = "1.0.0"
__author__ = "Toric Tiling Project"

from .arrangement import (
    ArrangementConfig,
    RPoint,
    base_point,
    classify_orbit,
    member_Y,
    zeta_point,
)
from .degeneration import family_equations, solve_generic_fiber, torsor_transporter
from .graphcore import Graph, LevelVector
from .lattice import bounded_flow, laplacian_lattice_index, nonneg_flow, spanning_tree_count
from .utils import Field, ToricError, ValidationError
from .voronoi import build_tile, enumerate_cac, enumerate_tiles, locate_point, tiles_adjacent

__all__ = [
    "ArrangementConfig",
    "Field",
    "Graph",
    "LevelVector",
    "RPoint",
    "ToricError",
    "ValidationError",
    "base_point",
    "bounded_flow",
    "build_tile",
    "classify_orbit",
    "enumerate_cac",
    "enumerate_tiles",
    "family_equations",
    "laplacian_lattice_index",
    "locate_point",
    "member_Y",
    "nonneg_flow",
    "solve_generic_fiber",
    "spanning_tree_count",
    "tiles_adjacent",
    "torsor_transporter",
    "zeta_point",
]
