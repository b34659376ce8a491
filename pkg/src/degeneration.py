#!/usr/bin/env python3
"""
One-parameter degeneration of the torus torsor to the arrangement Y.

Coefficients carry an exact indeterminate t as (scalar, exponent) pairs.
At t = 0 the family specializes to the equations of R and Y; at t = t0
nonzero its solutions form a single torus orbit.
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .arrangement import ArrangementConfig, EdgePosition, RPoint, ZEquation
from .graphcore import Graph, canonical_cycles
from .toric import Monomial, _monomial, evaluate_monomial, monomial_to_json, orbit_closure
from .utils import (
    Field,
    FieldExtensionError,
    NotSameFiberError,
    ValidationError,
)
from .voronoi import CACOrientation

logger = logging.getLogger(__name__)

TCoefficient = Tuple[Any, int]
ChainAssignment = Dict[Tuple[int, int], Tuple[Any, Any]]

DEFAULT_WINDOW = 3


@dataclass(frozen=True)
class TEquation:
    """lhs_coeff * lhs = rhs_coeff * rhs with coefficients scalar * t^exp."""

    kind: str
    lhs: Monomial
    rhs: Monomial
    lhs_coeff: TCoefficient
    rhs_coeff: TCoefficient

    def coefficient(self, side: TCoefficient, t0: Any, field: Field) -> Any:
        scalar, exp = side
        if exp == 0:
            return scalar
        return scalar * field.power(t0, exp)

    def evaluate(self, coord, t0: Any, field: Field) -> bool:
        left = self.coefficient(self.lhs_coeff, t0, field) * evaluate_monomial(
            self.lhs, coord, field
        )
        right = self.coefficient(self.rhs_coeff, t0, field) * evaluate_monomial(
            self.rhs, coord, field
        )
        return field.equal(left, right)

    def to_json(self, g: Graph, field: Field) -> dict:
        return {
            "kind": self.kind,
            "lhs": monomial_to_json(g, self.lhs),
            "rhs": monomial_to_json(g, self.rhs),
            "coeff": field.format(self.rhs_coeff[0] / self.lhs_coeff[0]),
            "t_exp": self.rhs_coeff[1] - self.lhs_coeff[1],
        }


def _edge_windows(g: Graph, window: Union[int, Sequence[int]]) -> Tuple[int, ...]:
    if isinstance(window, int):
        windows = (window,) * g.m
    else:
        windows = tuple(int(w) for w in window)
    if len(windows) != g.m or any(w < 0 for w in windows):
        raise ValidationError("Window must be a nonnegative integer or one per edge")
    return windows


def edge_equation(cfg: ArrangementConfig, e: int, i: int, j: int) -> TEquation:
    """x_{e,i} x_{e-bar,j} = a_e^{-(j-i)} t^{l_e (j-i)} x_{e-bar,i} x_{e,j}."""
    field = cfg.field
    k = j - i
    return TEquation(
        "edge",
        _monomial({(e, i, "+"): 1, (e, j, "-"): 1}),
        _monomial({(e, i, "-"): 1, (e, j, "+"): 1}),
        (field.one, 0),
        (field.power(cfg.a[e], -k), cfg.lengths[e] * k),
    )


def cycle_equation(
    cfg: ArrangementConfig, gamma: Sequence[int], alpha: Sequence[int]
) -> TEquation:
    """
    Cycle equation at levels alpha; t^s multiplies the forward side.

    With K = b(gamma) prod a_e^{alpha_e gamma_e} and
    s = sum(alpha_e gamma_e l_e - m_e gamma_e), the equation reads
    K * mirror = t^s * forward, the t-power moved to the mirror side when s < 0.
    """
    field = cfg.field
    forward: Dict = {}
    mirror: Dict = {}
    K = cfg.b_of_cycle(gamma)
    s = 0
    for e, c in enumerate(gamma):
        if c == 0:
            continue
        plus, minus = (e, alpha[e], "+"), (e, alpha[e], "-")
        if c > 0:
            forward[plus] = c
            mirror[minus] = c
        else:
            forward[minus] = -c
            mirror[plus] = -c
        K = K * field.power(cfg.a[e], alpha[e] * c)
        s += alpha[e] * c * cfg.lengths[e] - cfg.twisting[e] * c
    if s >= 0:
        return TEquation("cycle", _monomial(mirror), _monomial(forward), (K, 0), (field.one, s))
    return TEquation("cycle", _monomial(mirror), _monomial(forward), (K, -s), (field.one, 0))


def family_equations(
    cfg: ArrangementConfig, window: Union[int, Sequence[int]] = DEFAULT_WINDOW
) -> List[TEquation]:
    """
    Edge equations for -n_e <= i < j <= n_e and cycle equations for every
    canonical simple cycle with alpha_e in [-n_e, n_e] on its support.
    """
    g = cfg.graph
    windows = _edge_windows(g, window)
    out = [
        edge_equation(cfg, e, i, j)
        for e in range(g.m)
        for i in range(-windows[e], windows[e] + 1)
        for j in range(i + 1, windows[e] + 1)
    ]
    for cycle in canonical_cycles(g):
        gamma = cycle.vector(g.m)
        support = [e for e in range(g.m) if gamma[e]]
        for values in product(*[range(-windows[e], windows[e] + 1) for e in support]):
            alpha = [0] * g.m
            for e, v in zip(support, values):
                alpha[e] = v
            out.append(cycle_equation(cfg, gamma, alpha))
    logger.debug("family: %d equations", len(out))
    return out


def specialize(eq: TEquation, field: Field, t0: Any = 0) -> ZEquation:
    """Substitute t = t0, giving P * lhs = Q * rhs."""
    t = field(t0)
    return ZEquation(
        eq.coefficient(eq.lhs_coeff, t, field),
        eq.coefficient(eq.rhs_coeff, t, field),
        eq.lhs,
        eq.rhs,
    )


def evaluate_family(
    cfg: ArrangementConfig,
    equations: Sequence[TEquation],
    assignment: Mapping[Tuple[int, int], Tuple[Any, Any]],
    t0: Any,
) -> bool:
    """
    True iff every equation holds at t = t0.

    Raises:
        ValidationError: If the assignment misses a level or has a zero pair
    """
    field = cfg.field
    t = field(t0)

    def coord(e: int, level: int) -> Tuple[Any, Any]:
        if (e, level) not in assignment:
            raise ValidationError(
                f"Assignment has no coordinates for {cfg.graph.edge_names[e]} at level {level}"
            )
        x, y = assignment[(e, level)]
        if field.is_zero(x) and field.is_zero(y):
            raise ValidationError("Chain coordinates must not both vanish")
        return x, y

    return all(eq.evaluate(coord, t, field) for eq in equations)


def assignment_from_point(
    cfg: ArrangementConfig, p: RPoint, window: Union[int, Sequence[int]] = DEFAULT_WINDOW
) -> ChainAssignment:
    g = cfg.graph
    windows = _edge_windows(g, window)
    return {
        (e, i): p.coordinate(cfg.field, e, i)
        for e in range(g.m)
        for i in range(-windows[e], windows[e] + 1)
    }


def solve_character_equations(
    rows: Sequence[Tuple[Sequence[int], Any]], n_unknowns: int, field: Field
) -> Tuple[Any, ...]:
    """
    Solve prod_j x_j^{v_j} = c for every row (v, c) in units of the field.

    Integer row operations bring the exponent matrix to echelon form; free
    unknowns are set to 1 and pivots with exponent other than 1 take roots.

    Raises:
        ValidationError: If the system is inconsistent
        FieldExtensionError: If a required root does not exist in the field
    """
    work = [[list(int(v) for v in vec), field(c)] for vec, c in rows]
    for vec, c in work:
        if len(vec) != n_unknowns:
            raise ValidationError("Exponent vector has the wrong length")
        if field.is_zero(c):
            raise ValidationError("Right-hand sides must be units")

    def combine(target, source, q):
        # target -= q * source
        target[0] = [a - q * b for a, b in zip(target[0], source[0])]
        target[1] = target[1] / field.power(source[1], q)

    pivots: List[Tuple[int, list]] = []
    rest = work
    for k in range(n_unknowns):
        while True:
            active = [row for row in rest if row[0][k] != 0]
            if len(active) <= 1:
                break
            pivot = min(active, key=lambda row: abs(row[0][k]))
            for row in active:
                if row is not pivot:
                    combine(row, pivot, row[0][k] // pivot[0][k])
        active = [row for row in rest if row[0][k] != 0]
        if active:
            pivot = active[0]
            if pivot[0][k] < 0:
                pivot[0] = [-v for v in pivot[0]]
                pivot[1] = field.one / pivot[1]
            pivots.append((k, pivot))
            rest = [row for row in rest if row is not pivot]
    for vec, c in rest:
        if any(vec) or not field.equal(c, field.one):
            raise ValidationError("Character equations are inconsistent")

    x = [field.one] * n_unknowns
    for k, (vec, c) in reversed(pivots):
        known = field.one
        for j in range(k + 1, n_unknowns):
            if vec[j]:
                known = known * field.power(x[j], vec[j])
        root = field.nth_root(c / known, vec[k])
        if root is None:
            raise FieldExtensionError(
                f"No {vec[k]}-th root of {field.format(c / known)} in {field.name}"
            )
        x[k] = root
    return tuple(x)


def solve_generic_fiber(
    cfg: ArrangementConfig,
    t0: Any,
    window: Union[int, Sequence[int]] = DEFAULT_WINDOW,
    pinned: Optional[Mapping[int, Any]] = None,
) -> ChainAssignment:
    """
    A point of the fiber over t0 != 0.

    The level-0 ratios mu_e satisfy prod mu^gamma = b(gamma) t0^{sum m_e gamma_e}
    on fundamental cycles (unpinned tree edges default to 1); higher levels
    follow from the edge equations, x_{e,i} / x_{e-bar,i} = mu_e a_e^i t0^{-l_e i}.

    Raises:
        ValidationError: If t0 is zero or a pinned value is not a unit
        FieldExtensionError: If pinned values force a missing root
    """
    g = cfg.graph
    field = cfg.field
    t = field(t0)
    if field.is_zero(t):
        raise ValidationError("t0 must be nonzero on the generic fiber")
    windows = _edge_windows(g, window)
    pinned = {int(e): field(v) for e, v in (pinned or {}).items()}
    if any(field.is_zero(v) for v in pinned.values()):
        raise ValidationError("Pinned ratios must be units")

    # non-tree edges first so they take the pivots and tree edges stay at 1
    tree = set(cfg.tree)
    free = sorted((e for e in range(g.m) if e not in pinned), key=lambda e: (e in tree, e))
    rows = []
    for e, gamma in cfg.cycles.fundamental:
        rhs = cfg.b_of_cycle(gamma) * field.power(
            t, sum(cfg.twisting[k] * c for k, c in enumerate(gamma))
        )
        for k, c in enumerate(gamma):
            if c and k in pinned:
                rhs = rhs / field.power(pinned[k], c)
        rows.append(([gamma[k] for k in free], rhs))
    solved = solve_character_equations(rows, len(free), field)
    mu = dict(pinned)
    mu.update(zip(free, solved))

    assignment: ChainAssignment = {}
    for e in range(g.m):
        for i in range(-windows[e], windows[e] + 1):
            ratio = mu[e] * field.power(cfg.a[e], i) * field.power(t, -cfg.lengths[e] * i)
            assignment[(e, i)] = (ratio, field.one)
    return assignment


def _level_zero_ratio(cfg: ArrangementConfig, assignment, e: int) -> Any:
    x, y = assignment[(e, 0)]
    if cfg.field.is_zero(x) or cfg.field.is_zero(y):
        raise ValidationError("Generic fiber coordinates must be nonzero")
    return x / y


def torsor_transporter(
    cfg: ArrangementConfig,
    assignment1: Mapping[Tuple[int, int], Tuple[Any, Any]],
    assignment2: Mapping[Tuple[int, int], Tuple[Any, Any]],
    t0: Any,
) -> Tuple[Any, ...]:
    """
    Character c with ratio2 = c(head)/c(tail) * ratio1 at level 0, c(v0) = 1.

    Raises:
        NotSameFiberError: If the quotients are not a coboundary
    """
    g = cfg.graph
    field = cfg.field
    if field.is_zero(field(t0)):
        raise ValidationError("t0 must be nonzero on the generic fiber")
    quotient = [
        _level_zero_ratio(cfg, assignment2, e) / _level_zero_ratio(cfg, assignment1, e)
        for e in range(g.m)
    ]
    c: Dict[int, Any] = {0: field.one}
    changed = True
    while changed:
        changed = False
        for e in cfg.tree:
            t, h = g.edges[e]
            if t in c and h not in c:
                c[h] = c[t] * quotient[e]
                changed = True
            elif h in c and t not in c:
                c[t] = c[h] / quotient[e]
                changed = True
    for e, (t, h) in enumerate(g.edges):
        if not field.equal(c[h] / c[t], quotient[e]):
            raise NotSameFiberError(
                f"Assignments differ on {g.edge_names[e]} by more than a torus translate"
            )
    return tuple(c[v] for v in range(g.n))


def one_parameter_subgroup(g: Graph, d: CACOrientation) -> Tuple[int, ...]:
    """rho(v) = i for v in the i-th ordered component of G - E(D)."""
    rho = [0] * g.n
    for i, comp in enumerate(orbit_closure(g, d)):
        for v in comp.vertices:
            rho[v] = i
    return tuple(rho)


def limit_point(cfg: ArrangementConfig, rho: Sequence[int]) -> RPoint:
    """
    Limit as t -> 0 of t^rho acting on the generic fiber point of solve_generic_fiber.

    On edge e the level-i ratio is b_e a_e^i t^(w - l_e i) with
    w = k_e + rho(head) - rho(tail), where k_e is the t-degree of mu_e.
    The limit sits on level w / l_e when it is integral, otherwise on the
    node between the two neighbouring levels.
    """
    g = cfg.graph
    field = cfg.field
    if len(rho) != g.n:
        raise ValidationError(f"rho has length {len(rho)} (expected {g.n})")
    degree = [0] * g.m
    for e, gamma in cfg.cycles.fundamental:
        degree[e] = sum(cfg.twisting[k] * c for k, c in enumerate(gamma))
    positions = []
    for e, (t, h) in enumerate(g.edges):
        w = degree[e] + rho[h] - rho[t]
        level, rem = divmod(w, cfg.lengths[e])
        if rem == 0:
            positions.append(
                EdgePosition(2 * level, cfg.b_edge[e] * field.power(cfg.a[e], level))
            )
        else:
            positions.append(EdgePosition(2 * level + 1))
    return RPoint(tuple(positions))
