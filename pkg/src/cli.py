#!/usr/bin/env python3
"""
Command-line front end.

Every subcommand reads a graph JSON (and optionally an arrangement config
JSON), runs one exact computation and writes deterministic JSON to stdout
or --out. Exit status: 0 on success, 1 on usage errors, 2 on validation
errors, 3 on window or size-limit errors.
"""

import logging
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, List, Optional, Sequence

import click

from . import __version__
from .arrangement import (
    ArrangementConfig,
    RPoint,
    base_point,
    classify_orbit,
    member_Y,
    zeta_point,
)
from .degeneration import DEFAULT_WINDOW, evaluate_family, family_equations, solve_generic_fiber
from .graphcore import Graph, LevelVector, cycle_space
from .lattice import critical_group, enumerate_bonds, laplacian_lattice_index, spanning_tree_count
from .render import render_tiling, write_svg
from .toric import cycle_binomials
from .utils import (
    SizeLimitError,
    ToricError,
    ValidationError,
    WindowError,
    dump_json,
    parse_bbox,
    parse_scalar,
    safe_json_load,
    sanitize_log_message,
)
from .voronoi import (
    cell_geometry,
    enumerate_cac,
    enumerate_tiles,
    locate_point,
    suggest_window,
    tiles_adjacent,
)

logger = logging.getLogger(__name__)

DEFAULT_TILE_WINDOW = 2


@dataclass
class RunConfig:
    """Options shared by every subcommand."""

    command: str
    graph_path: str
    config_path: Optional[str] = None
    window: Optional[int] = None
    bbox: Optional[str] = None
    seed: int = 0
    out: Optional[str] = None
    field: Optional[str] = None
    log_level: int = logging.INFO
    log_file: Optional[str] = None
    progress: bool = False

    @classmethod
    def from_options(cls, command: str, options: dict) -> "RunConfig":
        if options["quiet"]:
            log_level = logging.WARNING
        elif options["verbose"]:
            log_level = logging.DEBUG
        else:
            log_level = getattr(
                logging, os.environ.get("LOG_LEVEL", "INFO").upper(), logging.INFO
            )
        return cls(
            command=command,
            graph_path=options["graph"],
            config_path=options["config"],
            window=options["window"],
            bbox=options["bbox"],
            seed=options["seed"],
            out=options["out"],
            field=options["field"],
            log_level=log_level,
            log_file=options["log_file"],
            progress=options["progress"],
        )

    def load_graph(self) -> Graph:
        graph = Graph.load(self.graph_path)
        logger.info(
            "グラフを読み込みました: %s (頂点 %d, 辺 %d)",
            sanitize_log_message(self.graph_path),
            graph.n,
            graph.m,
        )
        return graph

    def load_arrangement(self, graph: Graph) -> ArrangementConfig:
        """Config file if given, else unit lengths, zero twisting and trivial characters."""
        if self.config_path:
            cfg = ArrangementConfig.load(graph, self.config_path, self.field)
            logger.info("設定を読み込みました: %s", sanitize_log_message(self.config_path))
            return cfg
        data = {"lengths": [1] * graph.m}
        return ArrangementConfig.from_json(graph, data, self.field)


def _setup_logging(log_level: int, log_file: Optional[str] = None) -> logging.Logger:
    """Setup logging configuration; stdout stays reserved for results."""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )
    return logging.getLogger(__name__)


def _exit_code(error: ToricError) -> int:
    if isinstance(error, (SizeLimitError, WindowError)):
        return 3
    return 2


class ToricGroup(click.Group):
    """Group mapping domain errors and usage errors onto the exit codes above."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = 1
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = 1
            raise
        except ToricError as e:
            logger.error("処理に失敗しました: %s", sanitize_log_message(str(e)))
            click.echo(f"エラー: {e}", err=True)
            raise click.exceptions.Exit(_exit_code(e))


def _common_options(f: Callable) -> Callable:
    options = [
        click.option("--graph", "graph", required=True, type=click.Path(), help="Graph JSON file"),
        click.option("--config", "config", type=click.Path(), help="Arrangement config JSON"),
        click.option("--window", type=click.IntRange(min=0), help="Potential window N"),
        click.option("--bbox", help="Bounding box x0,y0,x1,y1"),
        click.option("--seed", type=int, default=0, show_default=True, help="PRNG seed"),
        click.option("--out", type=click.Path(), help="Output file (default: stdout)"),
        click.option("--field", help="Field override: q or fp:P"),
        click.option("--log-file", type=click.Path(), help="Also log to this file"),
        click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging"),
        click.option("--quiet", "-q", is_flag=True, help="Suppress most output"),
        click.option("--progress", is_flag=True, help="Show progress bars on stderr"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _start(command: str, options: dict) -> RunConfig:
    run = RunConfig.from_options(command, options)
    _setup_logging(run.log_level, run.log_file)
    logger.debug("コマンド: %s", command)
    return run


def _emit(run: RunConfig, data: Any) -> None:
    text = dump_json(data)
    if run.out:
        with open(run.out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        logger.info("結果を保存しました: %s", sanitize_log_message(run.out))
    else:
        click.echo(text)


def _int_vector(raw: str, what: str) -> List[int]:
    try:
        return [int(v) for v in raw.split(",")] if raw.strip() else []
    except ValueError:
        raise ValidationError(f"{what} must be comma-separated integers")


def _scalar_vector(raw: str) -> List[Fraction]:
    return [parse_scalar(v.strip()) for v in raw.split(",")]


@click.group(cls=ToricGroup)
@click.version_option(version=__version__)
def cli():
    """Exact twisted Voronoi tilings and toric arrangements of graphs."""


@cli.command()
@_common_options
def check(**options):
    """Validate the graph (and config) and report basic invariants."""
    run = _start("check", options)
    g = run.load_graph()
    result = {
        "vertices": g.n,
        "edges": g.m,
        "cycle_rank": cycle_space(g).rank,
    }
    if run.config_path:
        result["config"] = run.load_arrangement(g).to_json()
    _emit(run, result)


@cli.command()
@_common_options
def trees(**options):
    """Spanning tree count and Laplacian lattice index."""
    run = _start("trees", options)
    g = run.load_graph()
    result = {
        "spanning_trees": spanning_tree_count(g),
        "lattice_index": laplacian_lattice_index(g),
    }
    logger.info("臨界群: %s", critical_group(g))
    _emit(run, result)


@cli.command()
@_common_options
def bonds(**options):
    """Bonds of the graph with their cut cochains."""
    run = _start("bonds", options)
    g = run.load_graph()
    _emit(
        run,
        [
            {
                "X": sorted(g.vertices[v] for v in bond.X),
                "cochain": list(bond.cochain),
                "norm_sq": bond.norm_sq,
            }
            for bond in enumerate_bonds(g)
        ],
    )


@cli.command()
@_common_options
def cac(**options):
    """Coherent acyclic orientations of cut subgraphs."""
    run = _start("cac", options)
    _emit(run, enumerate_cac(run.load_graph()).to_json())


@cli.command()
@_common_options
def cell(**options):
    """Halfspaces, vertices and faces of the Voronoi cell."""
    run = _start("cell", options)
    _emit(run, cell_geometry(run.load_graph()).to_json())


@cli.command()
@_common_options
def tiles(**options):
    """Tiles of the twisted mixed tiling within the window."""
    run = _start("tiles", options)
    g = run.load_graph()
    cfg = run.load_arrangement(g)
    window = DEFAULT_TILE_WINDOW if run.window is None else run.window
    found = enumerate_tiles(g, cfg.lengths, cfg.twisting, window, progress=run.progress)
    logger.info("タイル数: %d", len(found))
    _emit(run, [tile.to_json() for tile in found])


@cli.command()
@_common_options
@click.option("--point", "point", required=True, help="Sum-zero point, e.g. -1/2,1/2")
def locate(point, **options):
    """Tiles containing a rational point of H0."""
    run = _start("locate", options)
    g = run.load_graph()
    cfg = run.load_arrangement(g)
    x = _scalar_vector(point)
    if run.window is None:
        window = suggest_window(g, cfg.lengths, cfg.twisting, x)
        logger.info("ウィンドウを自動設定しました: %d", window)
    else:
        window = run.window
    found = locate_point(g, cfg.lengths, cfg.twisting, x, window)
    _emit(run, [tile.to_json() for tile in found])


@cli.command()
@_common_options
@click.option("--f1", required=True, help="First potential, comma-separated")
@click.option("--f2", required=True, help="Second potential, comma-separated")
def adjacency(f1, f2, **options):
    """Shared face of two tiles, or null."""
    run = _start("adjacency", options)
    g = run.load_graph()
    cfg = run.load_arrangement(g)
    face = tiles_adjacent(
        g, cfg.lengths, cfg.twisting, _int_vector(f1, "f1"), _int_vector(f2, "f2")
    )
    _emit(run, face.to_json(g) if face is not None else None)


@cli.command()
@_common_options
def ideal(**options):
    """Cycle binomials of the toric variety of the graph at level zero."""
    run = _start("ideal", options)
    g = run.load_graph()
    cfg = run.load_arrangement(g)
    binomials = cycle_binomials(
        g, range(g.m), LevelVector.zeros(g.m), cfg.a, cfg.b_edge, cfg.field
    )
    _emit(run, [b.to_json(g, cfg.field) for b in binomials])


@cli.command()
@_common_options
@click.option("--f", "potential", required=True, help="Integral potential")
@click.option("--n", "scale", type=click.IntRange(min=1), default=1, show_default=True)
def point(potential, scale, **options):
    """Base point of the orbit of (n, f)."""
    run = _start("point", options)
    g = run.load_graph()
    cfg = run.load_arrangement(g)
    p = base_point(cfg, scale, _int_vector(potential, "f"))
    _emit(run, p.to_json(g, cfg.field))


@cli.command()
@_common_options
@click.option("--point-file", required=True, type=click.Path(), help="RPoint JSON")
def orbit(point_file, **options):
    """Classify the torus orbit of a point and find a component containing it."""
    run = _start("orbit", options)
    g = run.load_graph()
    cfg = run.load_arrangement(g)
    p = RPoint.from_json(g, safe_json_load(point_file), cfg.field)
    window = DEFAULT_WINDOW if run.window is None else run.window
    component = member_Y(cfg, p, window, progress=run.progress)
    classified = classify_orbit(cfg, p)
    result = {"component": list(component) if component is not None else None}
    if classified is None:
        result["orbit"] = None
    else:
        n, f, c = classified
        result["orbit"] = {
            "n": n,
            "f": list(f),
            "character": [cfg.field.format(v) for v in c],
        }
    _emit(run, result)


@cli.command()
@_common_options
@click.option("--alpha", required=True, help="Integral level per edge")
@click.option("--gamma", required=True, help="Integral cycle per edge")
def zeta(alpha, gamma, **options):
    """Projective pair (P:Q) of an (alpha, gamma) equation."""
    run = _start("zeta", options)
    g = run.load_graph()
    cfg = run.load_arrangement(g)
    z = zeta_point(cfg, _int_vector(alpha, "alpha"), _int_vector(gamma, "gamma"))
    _emit(
        run,
        {
            "alpha": list(z.alpha),
            "gamma": list(z.gamma),
            "P": cfg.field.format(z.pq[0]),
            "Q": cfg.field.format(z.pq[1]),
        },
    )


@cli.command()
@_common_options
@click.option("--t0", help="Nonzero parameter value (default: drawn from --seed)")
def fiber(t0, **options):
    """A point of the generic fiber over t0, checked against the family."""
    run = _start("fiber", options)
    g = run.load_graph()
    cfg = run.load_arrangement(g)
    field = cfg.field
    value = field(t0) if t0 is not None else field.random_unit(random.Random(run.seed))
    window = DEFAULT_WINDOW if run.window is None else run.window
    assignment = solve_generic_fiber(cfg, value, window)
    valid = evaluate_family(cfg, family_equations(cfg, window), assignment, value)
    logger.info("ファミリー方程式の検証: %s", "成功" if valid else "失敗")
    _emit(
        run,
        {
            "t0": field.format(value),
            "valid": valid,
            "assignment": [
                {
                    "edge": g.edge_names[e],
                    "level": level,
                    "x": field.format(x),
                    "xbar": field.format(y),
                }
                for (e, level), (x, y) in sorted(assignment.items())
            ],
        },
    )


@cli.command()
@_common_options
def render(**options):
    """SVG picture of the tiling for graphs with at most three vertices."""
    run = _start("render", options)
    g = run.load_graph()
    cfg = run.load_arrangement(g)
    bbox = parse_bbox(run.bbox) if run.bbox else None
    document = render_tiling(g, cfg.lengths, cfg.twisting, bbox, run.window)
    if run.out:
        write_svg(document, run.out)
        logger.info("SVGを保存しました: %s", sanitize_log_message(run.out))
    else:
        click.echo(document.decode("utf-8"), nl=False)


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI without exiting the interpreter; returns the exit status."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 1 if isinstance(e, click.UsageError) else e.exit_code
    except click.exceptions.Abort:
        click.echo("\n処理が中断されました", err=True)
        return 1
    return result if isinstance(result, int) else 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run_command(argv)
