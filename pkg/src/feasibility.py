#!/usr/bin/env python3
"""
Exact rational feasibility by Fourier-Motzkin elimination.

Systems are lists of inequalities a.x <= b or a.x < b over the rationals.
Elimination runs from the last variable to the first; a witness point is
recovered by back-substitution, preferring integers inside each interval.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Inequality:
    """coeffs . x <= bound (or < bound when strict)."""

    coeffs: Tuple[Fraction, ...]
    bound: Fraction
    strict: bool = False

    def holds(self, x: Sequence[Fraction]) -> bool:
        lhs = sum((Fraction(a) * v for a, v in zip(self.coeffs, x)), Fraction(0))
        return lhs < self.bound if self.strict else lhs <= self.bound


def inequality(coeffs: Sequence, bound, strict: bool = False) -> Inequality:
    return Inequality(tuple(Fraction(c) for c in coeffs), Fraction(bound), strict)


def equality(coeffs: Sequence, bound) -> List[Inequality]:
    """a.x = b as the pair a.x <= b and -a.x <= -b."""
    return [inequality(coeffs, bound), inequality([-c for c in coeffs], -Fraction(bound))]


def satisfies(rows: Sequence[Inequality], x: Sequence[Fraction]) -> bool:
    return all(row.holds(x) for row in rows)


def _normalized(row: Inequality) -> Inequality:
    pivot = next((abs(c) for c in row.coeffs if c != 0), None)
    if pivot is None or pivot == 1:
        return row
    return Inequality(tuple(c / pivot for c in row.coeffs), row.bound / pivot, row.strict)


def _prune(rows: Sequence[Inequality]) -> Optional[List[Inequality]]:
    """Drop trivial and dominated rows; None when a constant row fails."""
    best: Dict[Tuple[Fraction, ...], Tuple[Fraction, bool]] = {}
    for row in rows:
        if all(c == 0 for c in row.coeffs):
            if row.bound < 0 or (row.strict and row.bound == 0):
                return None
            continue
        row = _normalized(row)
        current = best.get(row.coeffs)
        if (
            current is None
            or row.bound < current[0]
            or (row.bound == current[0] and row.strict and not current[1])
        ):
            best[row.coeffs] = (row.bound, row.strict)
    return [Inequality(c, b, s) for c, (b, s) in sorted(best.items())]


def _eliminate(rows: Sequence[Inequality], k: int) -> Optional[List[Inequality]]:
    upper = [r for r in rows if r.coeffs[k] > 0]
    lower = [r for r in rows if r.coeffs[k] < 0]
    kept = [r for r in rows if r.coeffs[k] == 0]
    for p in upper:
        cp = p.coeffs[k]
        for q in lower:
            cq = -q.coeffs[k]
            coeffs = tuple(a / cp + b / cq for a, b in zip(p.coeffs, q.coeffs))
            kept.append(
                Inequality(coeffs, p.bound / cp + q.bound / cq, p.strict or q.strict)
            )
    return _prune(kept)


def _pick(
    lo: Optional[Fraction], lo_strict: bool, hi: Optional[Fraction], hi_strict: bool
) -> Fraction:
    def ok(v: Fraction) -> bool:
        if lo is not None and (v < lo or (lo_strict and v == lo)):
            return False
        if hi is not None and (v > hi or (hi_strict and v == hi)):
            return False
        return True

    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        v = Fraction(math.floor(hi))
        return v if ok(v) else v - 1
    if hi is None:
        v = Fraction(math.ceil(lo))
        return v if ok(v) else v + 1
    mid = (lo + hi) / 2
    for v in (Fraction(round(mid)), Fraction(math.floor(mid)), Fraction(math.ceil(mid))):
        if ok(v):
            return v
    return mid


def find_point(rows: Sequence[Inequality], n_vars: int) -> Optional[Tuple[Fraction, ...]]:
    """
    Find a rational point satisfying every inequality.

    Args:
        rows: Inequalities over ``n_vars`` variables
        n_vars: Number of variables

    Returns:
        Witness point, or None when the system is infeasible
    """
    current = _prune(rows)
    if current is None:
        return None
    stages: List[List[Inequality]] = [current]
    for k in range(n_vars - 1, -1, -1):
        current = _eliminate(current, k)
        if current is None:
            logger.debug("infeasible after eliminating variable %d", k)
            return None
        stages.append(current)

    # stages[n_vars - k] only involves variables 0..k-1
    x: List[Fraction] = []
    for k in range(n_vars):
        system = stages[n_vars - k - 1]
        lo: Optional[Fraction] = None
        hi: Optional[Fraction] = None
        lo_strict = hi_strict = False
        for row in system:
            c = row.coeffs[k]
            if c == 0:
                continue
            rest = row.bound - sum(
                (row.coeffs[j] * x[j] for j in range(k)), Fraction(0)
            )
            value = rest / c
            if c > 0:
                if hi is None or value < hi or (value == hi and row.strict):
                    hi, hi_strict = value, row.strict
            else:
                if lo is None or value > lo or (value == lo and row.strict):
                    lo, lo_strict = value, row.strict
        x.append(_pick(lo, lo_strict, hi, hi_strict))

    point = tuple(x)
    if not satisfies(rows, point):
        # elimination is exact, so this indicates a bug upstream
        raise ArithmeticError("Fourier-Motzkin witness failed verification")
    return point


def is_feasible(rows: Sequence[Inequality], n_vars: int) -> bool:
    return find_point(rows, n_vars) is not None
