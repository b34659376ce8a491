#!/usr/bin/env python3
"""
Utility functions shared by the toric tiling modules.

This module provides the exception hierarchy, the exact scalar fields
(rationals and prime fields), safe JSON loading and small parsing and
formatting helpers used throughout the system.
"""

import json
import os
import random
import re
from fractions import Fraction
from typing import Any, List, Optional, Union

from sympy import integer_nthroot, isprime
from sympy.ntheory.residue_ntheory import nthroot_mod
from sympy.polys.domains import GF

Scalar = Union[int, Fraction]

DEFAULT_MAX_VERTICES = 8


class ToricError(ValueError):
    """Base class for all domain errors."""


class ValidationError(ToricError):
    """Malformed input: graph, config, cochain or orientation data."""


class HypothesisError(ValidationError):
    """A precondition of a constructive result does not hold."""


class NotATileError(ValidationError):
    """The active subgraph of a potential is disconnected."""


class NotInYError(ValidationError):
    """A point does not lie on the arrangement."""


class NotSameFiberError(ValidationError):
    """Two fiber points are not related by the torus action."""


class FieldExtensionError(ValidationError):
    """A required root does not exist in the chosen field."""


class UnsupportedRankError(ValidationError):
    """Rendering requested for a graph of rank above two."""


class SizeLimitError(ToricError):
    """An exhaustive enumeration would exceed the configured vertex cap."""


class WindowError(ToricError):
    """An enumeration window is too small to produce a result."""


def max_vertices_from_env(default: int = DEFAULT_MAX_VERTICES) -> int:
    """
    Read the vertex cap for exhaustive enumerations.

    Args:
        default: Value used when TORIC_MAX_VERTICES is unset or invalid

    Returns:
        Positive vertex cap
    """
    raw = os.environ.get("TORIC_MAX_VERTICES", "")
    try:
        value = int(raw)
    except ValueError:
        return default
    return value if value > 0 else default


def check_vertex_cap(n_vertices: int, max_vertices: Optional[int] = None) -> None:
    """Raise SizeLimitError when an exhaustive enumeration is too large."""
    cap = max_vertices if max_vertices is not None else max_vertices_from_env()
    if n_vertices > cap:
        raise SizeLimitError(
            f"Graph too large for exhaustive enumeration: {n_vertices} vertices "
            f"(max: {cap})"
        )


def parse_scalar(value: Any) -> Fraction:
    """
    Parse an exact rational from an int, Fraction or "p/q" string.

    Args:
        value: Raw value from a config file or the command line

    Returns:
        Exact rational value

    Raises:
        ValidationError: If the value is not an exact rational
    """
    if isinstance(value, bool):
        raise ValidationError(f"Not a rational value: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"Not a rational value: {value!r}")
    raise ValidationError(f"Not a rational value: {value!r}")


def parse_half_integer(value: Any) -> int:
    """Parse an integer or half-integer ("7/2") into its doubled encoding."""
    q = parse_scalar(value)
    doubled = 2 * q
    if doubled.denominator != 1:
        raise ValidationError(f"Not a half-integer: {value!r}")
    return int(doubled)


def format_fraction(value: Fraction) -> str:
    """Format a rational as "p/q" with an explicit denominator."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_half_integer(doubled: int) -> Union[int, str]:
    """Render a doubled half-integer as an int or a "p/2" string."""
    if doubled % 2 == 0:
        return doubled // 2
    return f"{doubled}/2"


class Field:
    """
    Exact scalar field: the rationals ("q") or a prime field ("fp:P").

    Elements of the rationals are Fraction instances; elements of a prime
    field are sympy GF elements with representatives in [0, P).
    """

    def __init__(self, name: str = "q"):
        name = (name or "q").strip().lower()
        if name == "q":
            self.characteristic = 0
            self._domain = None
        else:
            match = re.fullmatch(r"fp:(\d+)", name)
            if not match:
                raise ValidationError(f"Unknown field: {name!r} (expected q or fp:P)")
            p = int(match.group(1))
            if not isprime(p):
                raise ValidationError(f"Field characteristic is not prime: {p}")
            self.characteristic = p
            self._domain = GF(p, symmetric=False)
        self.name = name

    def __repr__(self) -> str:
        return f"Field({self.name!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and other.name == self.name

    def __hash__(self) -> int:
        return hash(self.name)

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    @property
    def zero(self) -> Any:
        return self(0)

    @property
    def one(self) -> Any:
        return self(1)

    def __call__(self, value: Any) -> Any:
        """
        Coerce a value into the field.

        Args:
            value: int, Fraction, "p/q" string or an element of this field

        Returns:
            Field element

        Raises:
            ValidationError: If the value has no image in the field
        """
        if self._domain is None:
            return parse_scalar(value)
        if not isinstance(value, (int, Fraction, str)) or isinstance(value, bool):
            return self._domain(int(value))
        q = parse_scalar(value)
        den = self._domain(q.denominator)
        if int(den) == 0:
            raise ValidationError(
                f"Value {format_fraction(q)} has no image in F_{self.characteristic}"
            )
        return self._domain(q.numerator) / den

    def is_zero(self, x: Any) -> bool:
        if self._domain is None:
            return x == 0
        return int(x) == 0

    def equal(self, x: Any, y: Any) -> bool:
        return self.to_key(self(x)) == self.to_key(self(y))

    def power(self, x: Any, k: int) -> Any:
        """Integer power; negative exponents invert."""
        if k >= 0:
            return x**k
        return self.one / (x ** (-k))

    def nth_root(self, x: Any, m: int) -> Optional[Any]:
        """
        Find some r with r**m == x, or None when no root lies in the field.

        Args:
            x: Field element
            m: Nonzero integer exponent

        Returns:
            A root, or None
        """
        if m == 0:
            return self.one if x == self.one else None
        if m < 0:
            if self.is_zero(x):
                return None
            root = self.nth_root(self.one / x, -m)
            return root
        if m == 1:
            return x
        if self._domain is None:
            x = Fraction(x)
            sign = 1
            if x < 0:
                if m % 2 == 0:
                    return None
                sign = -1
                x = -x
            num, num_exact = integer_nthroot(x.numerator, m)
            den, den_exact = integer_nthroot(x.denominator, m)
            if not (num_exact and den_exact):
                return None
            return Fraction(sign * int(num), int(den))
        value = int(x)
        if value == 0:
            return self.zero
        root = nthroot_mod(value, m, self.characteristic)
        if root is None:
            return None
        if isinstance(root, list):
            if not root:
                return None
            root = min(root)
        return self._domain(int(root))

    def random_unit(self, rng: random.Random, bound: int = 5) -> Any:
        """Draw a nonzero element from a small deterministic range."""
        if self._domain is None:
            num = rng.choice([k for k in range(-bound, bound + 1) if k != 0])
            return Fraction(num, rng.randint(1, bound))
        return self._domain(rng.randint(1, self.characteristic - 1))

    def format(self, x: Any) -> str:
        """Serialize an element: "p/q" over the rationals, "k" mod P otherwise."""
        if self._domain is None:
            return format_fraction(x)
        return str(int(x))

    def to_key(self, x: Any) -> Union[Fraction, int]:
        """Hashable, comparable representative of an element."""
        if self._domain is None:
            return Fraction(x)
        return int(x)


def safe_json_load(file_path: str, max_size_mb: int = 10) -> Union[dict, list]:
    """
    Safely load JSON file with size and content validation.

    Args:
        file_path: Path to JSON file
        max_size_mb: Maximum file size in MB

    Returns:
        Parsed JSON data

    Raises:
        ValidationError: If the file is missing, too large or not a JSON
            object or array
    """
    if not os.path.isfile(file_path):
        raise ValidationError(f"File not found: {file_path}")

    file_size = os.path.getsize(file_path)
    max_size_bytes = max_size_mb * 1024 * 1024
    if file_size > max_size_bytes:
        raise ValidationError(
            f"File too large: {file_size} bytes (max: {max_size_bytes})"
        )

    try:
        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"Invalid JSON in {file_path}: {e}")

    if not isinstance(data, (dict, list)):
        raise ValidationError("JSON must be object or array")

    return data


def safe_json_loads(json_str: str, max_length: int = 1024 * 1024) -> Union[dict, list]:
    """
    Safely parse JSON string with length validation.

    Args:
        json_str: JSON string to parse
        max_length: Maximum string length

    Returns:
        Parsed JSON data

    Raises:
        ValidationError: If the string is too long or not an object or array
    """
    if len(json_str) > max_length:
        raise ValidationError(
            f"JSON string too long: {len(json_str)} chars (max: {max_length})"
        )

    try:
        data = json.loads(json_str)
    except json.JSONDecodeError as e:
        raise ValidationError(f"Invalid JSON: {e}")

    if not isinstance(data, (dict, list)):
        raise ValidationError("JSON must be object or array")

    return data


def dump_json(data: Any) -> str:
    """Deterministic JSON serialization used for every artifact."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False)


def sanitize_log_message(message: str, max_length: int = 1000) -> str:
    """
    Sanitize a user-supplied string before it is logged.

    Args:
        message: Log message to sanitize
        max_length: Maximum message length

    Returns:
        Sanitized log message
    """
    if len(message) > max_length:
        message = message[:max_length] + "...[truncated]"

    message = re.sub(r"[\x00-\x1f\x7f-\x9f]", "", message)
    message = message.replace("\n", "\\n").replace("\r", "\\r")

    return message


def parse_bbox(raw: str) -> List[Fraction]:
    """Parse "x0,y0,x1,y1" into four exact rationals."""
    parts = [p for p in raw.split(",")]
    if len(parts) != 4:
        raise ValidationError(f"Bounding box needs four values: {raw!r}")
    return [parse_scalar(p) for p in parts]
