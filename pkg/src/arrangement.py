#!/usr/bin/env python3
"""
Toric arrangements over the chain arrangement R.

R is the product over edges of doubly infinite chains of projective
lines; a point is recorded per edge either as a node between two
consecutive levels or as an interior point (integer level, nonzero
ratio x_e / x_e-bar). The arrangement Y is the union over tiles of the
toric varieties cut out by character-twisted cycle binomials.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from tqdm import tqdm

from .graphcore import (
    CycleSpace,
    Graph,
    LevelVector,
    apply_d_star,
    canonical_cycles,
    cycle_space,
    simple_cycles,
)
from .toric import Binomial, Monomial, _monomial, cycle_binomials, evaluate_monomial, monomial_to_json
from .utils import (
    Field,
    NotInYError,
    ValidationError,
    format_half_integer,
    parse_half_integer,
    safe_json_load,
)
from .voronoi import active_subgraph, dee, solve_level_function, window_potentials

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArrangementConfig:
    """
    Lengths, twisting and characters of an arrangement.

    ``b`` holds one value per fundamental cycle of ``tree``; it is
    extended to edges by 1 on tree edges and b(fundamental cycle of e)
    on the other edges.
    """

    graph: Graph
    lengths: Tuple[int, ...]
    twisting: Tuple[int, ...]
    a: Tuple[Any, ...]
    b: Tuple[Any, ...]
    field: Field
    tree: Tuple[int, ...]

    def __post_init__(self):
        g = self.graph
        if len(self.lengths) != g.m or any(int(l) != l or l < 1 for l in self.lengths):
            raise ValidationError("lengths must be positive integers, one per edge")
        if len(self.twisting) != g.m or any(int(t) != t for t in self.twisting):
            raise ValidationError("twisting must be integral, one value per edge")
        if len(self.a) != g.m:
            raise ValidationError("a needs one value per edge")
        if len(self.b) != self.cycles.rank:
            raise ValidationError(
                f"b needs one value per fundamental cycle ({self.cycles.rank})"
            )
        for value in self.a + self.b:
            if self.field.is_zero(value):
                raise ValidationError("Character values must be units")

    @cached_property
    def cycles(self) -> CycleSpace:
        return cycle_space(self.graph, self.tree)

    @cached_property
    def b_edge(self) -> Tuple[Any, ...]:
        values = [self.field.one] * self.graph.m
        for (e, _), value in zip(self.cycles.fundamental, self.b):
            values[e] = value
        return tuple(values)

    def b_of_cycle(self, gamma: Sequence[int]) -> Any:
        value = self.field.one
        for e, c in enumerate(gamma):
            if c:
                value = value * self.field.power(self.b_edge[e], c)
        return value

    @classmethod
    def create(
        cls,
        graph: Graph,
        lengths: Sequence[int],
        twisting: Optional[Sequence[int]] = None,
        a: Optional[Sequence[Any]] = None,
        b: Optional[Sequence[Any]] = None,
        field: Optional[Field] = None,
        tree: Optional[Sequence[int]] = None,
    ) -> "ArrangementConfig":
        """Build a config, defaulting to zero twisting and trivial characters."""
        field = field or Field("q")
        cycles = cycle_space(graph, tree)
        twisting = tuple(twisting) if twisting is not None else (0,) * graph.m
        a_values = tuple(field(v) for v in a) if a is not None else (field.one,) * graph.m
        b_values = (
            tuple(field(v) for v in b) if b is not None else (field.one,) * cycles.rank
        )
        return cls(
            graph,
            tuple(int(l) for l in lengths),
            tuple(int(t) for t in twisting),
            a_values,
            b_values,
            field,
            cycles.tree,
        )

    @classmethod
    def from_json(
        cls, graph: Graph, data: dict, field_override: Optional[str] = None
    ) -> "ArrangementConfig":
        """
        Parse {"lengths", "twisting", "a", "b", "field", "tree"}.

        Raises:
            ValidationError: If a key is missing or malformed
        """
        if not isinstance(data, dict) or "lengths" not in data:
            raise ValidationError("Config JSON needs at least 'lengths'")
        field = Field(field_override or data.get("field", "q"))
        tree = data.get("tree")
        if tree is not None:
            tree = [graph.edge_index(e) if isinstance(e, str) else int(e) for e in tree]
        try:
            lengths = [int(l) for l in data["lengths"]]
            twisting = [int(t) for t in data["twisting"]] if "twisting" in data else None
        except (TypeError, ValueError):
            raise ValidationError("lengths and twisting must be integer lists")
        return cls.create(
            graph,
            lengths,
            twisting,
            data.get("a"),
            data.get("b"),
            field,
            tree,
        )

    @classmethod
    def load(cls, graph: Graph, file_path: str, field_override: Optional[str] = None):
        return cls.from_json(graph, safe_json_load(file_path), field_override)

    def to_json(self) -> dict:
        return {
            "lengths": list(self.lengths),
            "twisting": list(self.twisting),
            "a": [self.field.format(v) for v in self.a],
            "b": [self.field.format(v) for v in self.b],
            "field": self.field.name,
            "tree": list(self.tree),
        }

    def level(self, f: Sequence[int], n: int = 1) -> LevelVector:
        return dee(self.graph, self.lengths, self.twisting, f, n)


@dataclass(frozen=True)
class EdgePosition:
    """Node (odd doubled level, no ratio) or interior point (even level, ratio)."""

    doubled: int
    ratio: Any = None

    @property
    def is_node(self) -> bool:
        return self.doubled % 2 != 0

    def coordinate(self, level: int) -> Tuple[int, int]:
        """(x_e, x_e-bar) at an integer level, ratio slot marked by 2."""
        if 2 * level < self.doubled:
            return (0, 1)
        if 2 * level > self.doubled:
            return (1, 0)
        return (2, 1)


@dataclass(frozen=True)
class RPoint:
    """A point of R: one EdgePosition per reference-oriented edge."""

    positions: Tuple[EdgePosition, ...]

    @classmethod
    def build(cls, positions: Iterable[EdgePosition], field: Field) -> "RPoint":
        checked = []
        for pos in positions:
            if pos.is_node:
                if pos.ratio is not None:
                    raise ValidationError("Node positions carry no ratio")
            elif pos.ratio is None or field.is_zero(pos.ratio):
                raise ValidationError("Interior positions need a nonzero ratio")
            checked.append(pos)
        return cls(tuple(checked))

    @property
    def level(self) -> LevelVector:
        return LevelVector(tuple(p.doubled for p in self.positions))

    def interior_edges(self) -> Tuple[int, ...]:
        return tuple(e for e, p in enumerate(self.positions) if not p.is_node)

    def coordinate(self, field: Field, e: int, level: int) -> Tuple[Any, Any]:
        pos = self.positions[e]
        x, y = pos.coordinate(level)
        if x == 2:
            return (pos.ratio, field.one)
        return (field(x), field(y))

    def coordinates(self, field: Field):
        return lambda e, level: self.coordinate(field, e, level)

    def to_json(self, g: Graph, field: Field) -> List[dict]:
        out = []
        for e, pos in enumerate(self.positions):
            if pos.is_node:
                out.append(
                    {"edge": g.edge_names[e], "kind": "node", "level": format_half_integer(pos.doubled)}
                )
            else:
                out.append(
                    {
                        "edge": g.edge_names[e],
                        "kind": "interior",
                        "level": pos.doubled // 2,
                        "ratio": field.format(pos.ratio),
                    }
                )
        return out

    @classmethod
    def from_json(cls, g: Graph, data: Sequence[dict], field: Field) -> "RPoint":
        """
        Parse per-edge records; edges may appear in any order but all must appear.

        Raises:
            ValidationError: If a record is malformed or an edge is missing
        """
        if not isinstance(data, list):
            raise ValidationError("RPoint JSON must be a list of edge records")
        slots: Dict[int, EdgePosition] = {}
        for i, item in enumerate(data):
            if not isinstance(item, dict) or "kind" not in item or "level" not in item:
                raise ValidationError(f"RPoint record {i + 1} needs 'kind' and 'level'")
            e = g.edge_index(item["edge"]) if "edge" in item else i
            doubled = parse_half_integer(item["level"])
            if item["kind"] == "node":
                if doubled % 2 == 0:
                    raise ValidationError("Node level must be a strict half-integer")
                slots[e] = EdgePosition(doubled)
            elif item["kind"] == "interior":
                if doubled % 2 != 0 or "ratio" not in item:
                    raise ValidationError("Interior record needs an integer level and a ratio")
                slots[e] = EdgePosition(doubled, field(item["ratio"]))
            else:
                raise ValidationError(f"Unknown position kind {item['kind']!r}")
        if sorted(slots) != list(range(g.m)):
            raise ValidationError("RPoint must give exactly one record per edge")
        return cls.build((slots[e] for e in range(g.m)), field)


@dataclass(frozen=True)
class ZetaPoint:
    alpha: Tuple[int, ...]
    gamma: Tuple[int, ...]
    pq: Tuple[Any, Any]


@dataclass(frozen=True)
class ZEquation:
    """P * lhs = Q * rhs for a pair (alpha, gamma)."""

    P: Any
    Q: Any
    lhs: Monomial
    rhs: Monomial

    def evaluate(self, coord, field: Field) -> bool:
        left = self.P * evaluate_monomial(self.lhs, coord, field)
        right = self.Q * evaluate_monomial(self.rhs, coord, field)
        return field.equal(left, right)

    def normal_form(self, field: Field) -> tuple:
        """Representative up to swapping sides and scaling (P, Q)."""
        P, Q, lhs, rhs = self.P, self.Q, self.lhs, self.rhs
        if rhs < lhs:
            P, Q, lhs, rhs = Q, P, rhs, lhs
        scale = P if not field.is_zero(P) else Q
        return (field.to_key(P / scale), lhs, field.to_key(Q / scale), rhs)

    def to_json(self, g: Graph, field: Field) -> dict:
        return {
            "P": field.format(self.P),
            "Q": field.format(self.Q),
            "lhs": monomial_to_json(g, self.lhs),
            "rhs": monomial_to_json(g, self.rhs),
        }


def base_point(cfg: ArrangementConfig, n: int, f: Sequence[int]) -> RPoint:
    """p^n_f: ratio b_e a_e^level on integral edges, nodes elsewhere."""
    level = cfg.level(f, n)
    positions = []
    for e in range(cfg.graph.m):
        if level.is_integral(e):
            L = level.integer(e)
            positions.append(
                EdgePosition(2 * L, cfg.b_edge[e] * cfg.field.power(cfg.a[e], L))
            )
        else:
            positions.append(EdgePosition(level.doubled[e]))
    return RPoint(tuple(positions))


def act(g: Graph, c: Sequence[Any], p: RPoint, field: Field) -> RPoint:
    """
    Torus action: interior ratios times c(head)/c(tail), nodes fixed.

    Raises:
        ValidationError: If c has the wrong length or a zero entry
    """
    if len(c) != g.n:
        raise ValidationError(f"Character has length {len(c)} (expected {g.n})")
    units = [field(v) for v in c]
    if any(field.is_zero(v) for v in units):
        raise ValidationError("Character values must be nonzero")
    positions = []
    for e, pos in enumerate(p.positions):
        if pos.is_node:
            positions.append(pos)
        else:
            t, h = g.edges[e]
            positions.append(EdgePosition(pos.doubled, pos.ratio * units[h] / units[t]))
    return RPoint(tuple(positions))


def in_stratum_closure(point_level: LevelVector, level: LevelVector) -> bool:
    """The stratum of the point lies in P_level: half-steps only at integral levels."""
    for p, d in zip(point_level.doubled, level.doubled):
        if d % 2 != 0:
            if p != d:
                return False
        elif abs(p - d) > 1:
            return False
    return True


def component_binomials(cfg: ArrangementConfig, f: Sequence[int]) -> List[Binomial]:
    level = cfg.level(f)
    active = active_subgraph(cfg.graph, level)
    return cycle_binomials(cfg.graph, active.edges, level, cfg.a, cfg.b_edge, cfg.field)


def member_component(cfg: ArrangementConfig, p: RPoint, f: Sequence[int]) -> bool:
    """True iff p lies on the toric component P_f of Y."""
    level = cfg.level(f)
    if not in_stratum_closure(p.level, level):
        return False
    coord = p.coordinates(cfg.field)
    return all(b.evaluate(coord, cfg.field) for b in component_binomials(cfg, f))


def _level_reach(cfg: ArrangementConfig, window: int) -> Fraction:
    twist = max((abs(t) for t in cfg.twisting), default=0)
    return Fraction(2 * window + twist, min(cfg.lengths, default=1)) + 1


def member_Y(
    cfg: ArrangementConfig, p: RPoint, window: int, progress: bool = False
) -> Optional[Tuple[int, ...]]:
    """
    First normalized f in the window whose component contains p.

    Candidates are ordered by max |f(v)| then lexicographically; only
    potentials with connected active subgraph are considered.
    """
    g = cfg.graph
    top = max((abs(Fraction(d, 2)) for d in p.level.doubled), default=Fraction(0))
    if top > _level_reach(cfg, window):
        logger.warning("点のレベル %s がウィンドウ %d の範囲を超えています", top, window)
    candidates = sorted(
        window_potentials(g.n, window),
        key=lambda f: (max((abs(v) for v in f), default=0), f),
    )
    for f in tqdm(candidates, desc="成分探索", disable=not progress):
        level = cfg.level(f)
        if not in_stratum_closure(p.level, level):
            continue
        if not active_subgraph(g, level).connected:
            continue
        if member_component(cfg, p, f):
            return tuple(f)
    return None


def _check_cycle(g: Graph, gamma: Sequence[int]) -> None:
    if len(gamma) != g.m:
        raise ValidationError(f"Cycle has length {len(gamma)} (expected {g.m})")
    if any(v != 0 for v in apply_d_star(g, gamma)):
        raise ValidationError("gamma is not a cycle")


def zeta_point(cfg: ArrangementConfig, alpha: Sequence[int], gamma: Sequence[int]) -> ZetaPoint:
    """
    (P : Q) for an integral level alpha and a cycle gamma.

    s = sum(alpha_e gamma_e l_e - m_e gamma_e) decides (1:0) for s < 0,
    (0:1) for s > 0 and (1 : b(gamma) prod a_e^{alpha_e gamma_e}) for s = 0.
    """
    g = cfg.graph
    _check_cycle(g, gamma)
    if len(alpha) != g.m:
        raise ValidationError(f"alpha has length {len(alpha)} (expected {g.m})")
    field = cfg.field
    s = sum(
        alpha[e] * gamma[e] * cfg.lengths[e] - cfg.twisting[e] * gamma[e]
        for e in range(g.m)
    )
    if s < 0:
        pq = (field.one, field.zero)
    elif s > 0:
        pq = (field.zero, field.one)
    else:
        q = cfg.b_of_cycle(gamma)
        for e in range(g.m):
            if gamma[e]:
                q = q * field.power(cfg.a[e], alpha[e] * gamma[e])
        pq = (field.one, q)
    return ZetaPoint(tuple(alpha), tuple(gamma), pq)


def z_equation(cfg: ArrangementConfig, alpha: Sequence[int], gamma: Sequence[int]) -> ZEquation:
    z = zeta_point(cfg, alpha, gamma)
    lhs: Dict = {}
    rhs: Dict = {}
    for e, c in enumerate(gamma):
        if c > 0:
            lhs[(e, alpha[e], "+")] = c
            rhs[(e, alpha[e], "-")] = c
        elif c < 0:
            lhs[(e, alpha[e], "-")] = -c
            rhs[(e, alpha[e], "+")] = -c
    return ZEquation(z.pq[0], z.pq[1], _monomial(lhs), _monomial(rhs))


def check_z_equation(
    cfg: ArrangementConfig, p: RPoint, alpha: Sequence[int], gamma: Sequence[int]
) -> bool:
    return z_equation(cfg, alpha, gamma).evaluate(p.coordinates(cfg.field), cfg.field)


def check_all_z_equations(cfg: ArrangementConfig, p: RPoint, radius: int = 3) -> bool:
    """
    Windowed check over every simple cycle and every alpha within radius of p's levels.

    alpha only matters on the support of gamma, so it is enumerated there.
    """
    g = cfg.graph
    levels = [d // 2 for d in p.level.doubled]
    for cycle in simple_cycles(g):
        gamma = cycle.vector(g.m)
        support = [e for e in range(g.m) if gamma[e]]
        ranges = [range(levels[e] - radius, levels[e] + radius + 1) for e in support]
        alpha = list(levels)
        for values in product(*ranges):
            for e, v in zip(support, values):
                alpha[e] = v
            if not check_z_equation(cfg, p, alpha, gamma):
                return False
    return True


def r_equations(g: Graph, window: int) -> List[Tuple[int, int, int]]:
    """Equations x_{e,i} x_{e-bar,j} = 0 (i < j) cutting out R, as (e, i, j)."""
    return [
        (e, i, j)
        for e in range(g.m)
        for i in range(-window, window + 1)
        for j in range(i + 1, window + 1)
    ]


def special_fiber_system(cfg: ArrangementConfig, window: int = 3) -> List[ZEquation]:
    """
    Equations of R and of Y on a level window, as ZEquations.

    R contributes 1 * x_{e,i} x_{e-bar,j} = 0 * x_{e-bar,i} x_{e,j} for i < j;
    every canonical simple cycle contributes the (alpha, gamma) equation for
    alpha in [-window, window] on its support (zero elsewhere).
    """
    g = cfg.graph
    field = cfg.field
    out = []
    for e, i, j in r_equations(g, window):
        lhs = _monomial({(e, i, "+"): 1, (e, j, "-"): 1})
        rhs = _monomial({(e, i, "-"): 1, (e, j, "+"): 1})
        out.append(ZEquation(field.one, field.zero, lhs, rhs))
    for cycle in canonical_cycles(g):
        gamma = cycle.vector(g.m)
        support = [e for e in range(g.m) if gamma[e]]
        ranges = [range(-window, window + 1)] * len(support)
        for values in product(*ranges):
            alpha = [0] * g.m
            for e, v in zip(support, values):
                alpha[e] = v
            out.append(z_equation(cfg, alpha, gamma))
    return out


def classify_orbit(
    cfg: ArrangementConfig, p: RPoint
) -> Optional[Tuple[int, Tuple[int, ...], Tuple[Any, ...]]]:
    """
    (n, f, c) with act(c, base_point(n, f)) = p, or None if p's levels are unrealizable.

    Raises:
        NotInYError: If the ratios are not a torus translate of the base point
    """
    g = cfg.graph
    field = cfg.field
    solved = solve_level_function(g, cfg.lengths, cfg.twisting, p.level)
    if solved is None:
        return None
    n, f = solved
    base = base_point(cfg, n, f)
    interior = p.interior_edges()
    quotient = {
        e: p.positions[e].ratio / base.positions[e].ratio for e in interior
    }

    c: Dict[int, Any] = {}
    for comp in g.components(interior):
        root = min(comp)
        c[root] = field.one
        stack = [root]
        while stack:
            v = stack.pop()
            for e in interior:
                t, h = g.edges[e]
                if t == v and h not in c:
                    c[h] = c[t] * quotient[e]
                    stack.append(h)
                elif h == v and t not in c:
                    c[t] = c[h] / quotient[e]
                    stack.append(t)
    for e in interior:
        t, h = g.edges[e]
        if not field.equal(c[h] / c[t], quotient[e]):
            raise NotInYError(
                f"Ratio on edge {g.edge_names[e]} is inconsistent with the torus orbit"
            )
    character = tuple(c[v] for v in range(g.n))
    return n, f, character
