"""JSON encodings shared by every module.

A matrix is a list of rows; each entry is an ``[re, im]`` pair. In the
exact backend each component is a ``[num, den]`` pair. On input we also
accept bare numbers and ``"p/q"`` strings for convenience.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .gaussrat import QQi
from .linops import exact_matrix, float_matrix


class ParseError(ValueError):
    """Malformed input; ``where`` locates the offending item."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def _component(x, where: str, exact: bool):
    if isinstance(x, bool):
        raise ParseError(f"boolean is not a number: {x!r}", where)
    if isinstance(x, list):
        if len(x) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in x):
            raise ParseError(f"rational component must be [num, den] integers, got {x!r}", where)
        if x[1] == 0:
            raise ParseError("zero denominator", where)
        return Fraction(x[0], x[1]) if exact else x[0] / x[1]
    if isinstance(x, str):
        try:
            f = Fraction(x)
        except ValueError:
            raise ParseError(f"not a number: {x!r}", where) from None
        return f if exact else float(f)
    if isinstance(x, (int, float)):
        if exact:
            if isinstance(x, float) and not x.is_integer():
                f = Fraction(x).limit_denominator(10**9)
                if float(f) != x:
                    raise ParseError(f"inexact float {x!r} in rational backend; use [num, den]", where)
                return f
            return Fraction(x)
        return float(x)
    raise ParseError(f"not a number: {x!r}", where)


def _entry(x, where: str, exact: bool):
    if isinstance(x, list):
        if len(x) != 2:
            raise ParseError(f"entry must be an [re, im] pair, got {x!r}", where)
        re = _component(x[0], where + "[0]", exact)
        im = _component(x[1], where + "[1]", exact)
    else:
        re, im = _component(x, where, exact), 0
    return QQi(re, im) if exact else complex(re, im)


def matrix_from_json(data, exact: bool, where: str = "matrix") -> np.ndarray:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ParseError("matrix must be a nonempty list of rows", where)
    n = len(data)
    rows = []
    for i, row in enumerate(data):
        if len(row) != n:
            raise ParseError(f"row {i} has {len(row)} entries, expected {n}", where)
        rows.append([_entry(x, f"{where}[{i}][{j}]", exact) for j, x in enumerate(row)])
    return exact_matrix(rows) if exact else float_matrix(rows)


def _frac_json(f: Fraction):
    return [f.numerator, f.denominator]


def _float_json(x: float):
    x = float(x)
    return 0.0 if x == 0 else x


def scalar_to_json(x):
    """Real scalar: ``[num, den]`` if exact, else a float."""
    if isinstance(x, QQi):
        x = x.re
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return _frac_json(Fraction(x))
    return _float_json(x)


def matrix_to_json(m) -> list:
    m = np.asarray(m)
    if m.dtype == object:
        return [[[_frac_json(z.re), _frac_json(z.im)] for z in row] for row in m]
    return [[[_float_json(z.real), _float_json(z.imag)] for z in row] for row in m]
