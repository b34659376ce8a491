#!/usr/bin/env python3
"""
SVG rendering of tilings of rank at most two.

Points of H0 are drawn in the coordinates (x_{v1}, x_{v2}); a graph with
two vertices gives a strip of segments on the horizontal axis. All
geometry stays exact until the serialization boundary, where values are
rounded to six decimals.
"""

import functools
import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from lxml import etree

from .feasibility import find_point, inequality
from .graphcore import Graph
from .utils import Scalar, UnsupportedRankError, ValidationError
from .voronoi import Tile, enumerate_tiles, suggest_window

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
DEFAULT_BBOX = (Fraction(-2), Fraction(-2), Fraction(2), Fraction(2))
PRECISION = 6

Point2 = Tuple[Fraction, Fraction]


def format_coordinate(value: Fraction) -> str:
    """Round half to even at six decimals, without going through floats."""
    scaled = round(Fraction(value) * 10**PRECISION)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**PRECISION)
    return f"{sign}{whole}.{frac:0{PRECISION}d}"


def _tag(name: str) -> str:
    return f"{{{SVG_NS}}}{name}"


def _project(point: Sequence[Fraction]) -> Point2:
    if len(point) == 1:
        return (Fraction(0), Fraction(0))
    if len(point) == 2:
        return (Fraction(point[1]), Fraction(0))
    return (Fraction(point[1]), Fraction(point[2]))


def _cross(o: Point2, a: Point2, b: Point2) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _angular_order(points: List[Point2]) -> List[Point2]:
    """Counter-clockwise order around the centroid, exact."""
    cx = sum((p[0] for p in points), Fraction(0)) / len(points)
    cy = sum((p[1] for p in points), Fraction(0)) / len(points)
    center = (cx, cy)

    def half(p: Point2) -> int:
        dx, dy = p[0] - cx, p[1] - cy
        return 0 if dy > 0 or (dy == 0 and dx > 0) else 1

    def compare(p: Point2, q: Point2) -> int:
        hp, hq = half(p), half(q)
        if hp != hq:
            return hp - hq
        cross = _cross(center, p, q)
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    return sorted(points, key=functools.cmp_to_key(compare))


def _is_empty(bbox: Sequence[Fraction], rank: int) -> bool:
    x0, y0, x1, y1 = bbox
    if rank <= 1:
        return x0 > x1 or y0 > y1
    return x0 >= x1 or y0 >= y1


def _tile_meets_bbox(g: Graph, tile: Tile, bbox: Sequence[Fraction]) -> bool:
    x0, y0, x1, y1 = bbox
    if g.n == 1:
        return x0 <= 0 <= x1 and y0 <= 0 <= y1
    n_vars = g.n - 1
    rows = []
    for X, bound in tile.halfspaces():
        coeffs = [(1 if w in X else 0) - (1 if 0 in X else 0) for w in range(1, g.n)]
        rows.append(inequality(coeffs, bound))
    box = [(0, x0, x1)] if n_vars == 1 else [(0, x0, x1), (1, y0, y1)]
    for k, lo, hi in box:
        unit = [1 if j == k else 0 for j in range(n_vars)]
        rows.append(inequality(unit, hi))
        rows.append(inequality([-c for c in unit], -lo))
    return find_point(rows, n_vars) is not None


def _label(tile: Tile) -> str:
    return "f=(" + ",".join(str(v) for v in tile.f) + ")"


def render_tiling(
    g: Graph,
    lengths: Sequence[int],
    twisting: Sequence[int],
    bbox: Optional[Sequence[Scalar]] = None,
    window: Optional[int] = None,
) -> bytes:
    """
    SVG 1.1 document with one shape per tile meeting the bounding box.

    Args:
        g: Graph with at most three vertices
        lengths: Edge lengths
        twisting: Twisting
        bbox: (x0, y0, x1, y1) in (x_{v1}, x_{v2}) coordinates
        window: Potential window (default: derived from the box corners)

    Returns:
        UTF-8 encoded SVG

    Raises:
        UnsupportedRankError: If the graph has more than three vertices
    """
    if g.n > 3:
        raise UnsupportedRankError(
            f"Rendering needs rank at most 2 (graph has {g.n} vertices)"
        )
    box = tuple(Fraction(v) for v in (bbox if bbox is not None else DEFAULT_BBOX))
    if len(box) != 4:
        raise ValidationError("Bounding box needs four values")
    x0, y0, x1, y1 = box
    width = max(x1 - x0, Fraction(0))
    height = max(y1 - y0, Fraction(0))

    root = etree.Element(
        _tag("svg"),
        nsmap={None: SVG_NS},
        version="1.1",
        viewBox=" ".join(format_coordinate(v) for v in (x0, y0, width, height)),
    )
    style = etree.SubElement(root, _tag("style"))
    style.text = (
        ".tile{fill:none;stroke:#336;stroke-width:0.01}"
        ".shared-face{stroke:#c33;stroke-width:0.02}"
        "text{font-size:0.08px;text-anchor:middle}"
    )
    body = etree.SubElement(root, _tag("g"), id="tiling")

    rank = g.n - 1
    if not _is_empty(box, rank):
        if window is None:
            corner = [Fraction(0)] + [max(abs(v) for v in box)] * rank
            window = suggest_window(g, lengths, twisting, corner)
        tiles = [
            tile
            for tile in enumerate_tiles(g, lengths, twisting, window)
            if _tile_meets_bbox(g, tile, box)
        ]
        logger.debug("rendering %d tiles", len(tiles))
        _draw_tiles(body, tiles)
        _draw_shared_faces(body, tiles, rank)

    return etree.tostring(root, pretty_print=True, xml_declaration=True, encoding="UTF-8")


def _draw_tiles(body, tiles: Sequence[Tile]) -> None:
    for tile in tiles:
        points = sorted(set(_project(p) for p in tile.h0_vertices()))
        group = etree.SubElement(body, _tag("g"), attrib={"class": "tile-group"})
        if len(points) == 1:
            (x, y), = points
            etree.SubElement(
                group,
                _tag("circle"),
                attrib={"class": "tile", "cx": format_coordinate(x), "cy": format_coordinate(y), "r": "0.050000"},
            )
        elif all(p[1] == points[0][1] for p in points):
            etree.SubElement(
                group,
                _tag("line"),
                attrib={
                    "class": "tile",
                    "x1": format_coordinate(points[0][0]),
                    "y1": format_coordinate(points[0][1]),
                    "x2": format_coordinate(points[-1][0]),
                    "y2": format_coordinate(points[-1][1]),
                },
            )
        else:
            etree.SubElement(
                group,
                _tag("polygon"),
                attrib={
                    "class": "tile",
                    "points": " ".join(
                        f"{format_coordinate(x)},{format_coordinate(y)}"
                        for x, y in _angular_order(points)
                    ),
                },
            )
        cx = sum((p[0] for p in points), Fraction(0)) / len(points)
        cy = sum((p[1] for p in points), Fraction(0)) / len(points)
        text = etree.SubElement(
            group, _tag("text"), x=format_coordinate(cx), y=format_coordinate(cy)
        )
        text.text = _label(tile)


def _draw_shared_faces(body, tiles: Sequence[Tile], rank: int) -> None:
    """Stroke the common facets of tiles sharing enough vertices."""
    vertex_sets = [set(_project(p) for p in tile.h0_vertices()) for tile in tiles]
    needed = 2 if rank == 2 else 1
    drawn = set()
    for i in range(len(tiles)):
        for j in range(i + 1, len(tiles)):
            common = sorted(vertex_sets[i] & vertex_sets[j])
            if len(common) < needed or rank == 0:
                continue
            key = tuple(common)
            if key in drawn:
                continue
            drawn.add(key)
            if rank == 1:
                x, y = common[0]
                etree.SubElement(
                    body,
                    _tag("circle"),
                    attrib={"class": "shared-face", "cx": format_coordinate(x), "cy": format_coordinate(y), "r": "0.020000"},
                )
            else:
                a, b = common[0], common[-1]
                etree.SubElement(
                    body,
                    _tag("line"),
                    attrib={
                        "class": "shared-face",
                        "x1": format_coordinate(a[0]),
                        "y1": format_coordinate(a[1]),
                        "x2": format_coordinate(b[0]),
                        "y2": format_coordinate(b[1]),
                    },
                )


def write_svg(document: bytes, out_path: str) -> None:
    with open(out_path, "wb") as f:
        f.write(document)
