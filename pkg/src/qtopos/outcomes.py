"""Outcome sets (finite unions of real intervals) and compact intervals."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

INF = math.inf


def _num(x):
    if x is None:
        return None
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        if math.isinf(x):
            return None
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "-inf", "oo", "-oo"):
            return None
        return Fraction(s)
    raise TypeError(f"bad interval endpoint {x!r}")


@dataclass(frozen=True)
class Segment:
    """One interval; ``lo``/``hi`` of ``None`` mean -inf/+inf (always open)."""

    lo: Fraction | None
    hi: Fraction | None
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", _num(self.lo))
        object.__setattr__(self, "hi", _num(self.hi))
        if self.lo is None:
            object.__setattr__(self, "lo_closed", False)
        if self.hi is None:
            object.__setattr__(self, "hi_closed", False)
        if self.is_empty():
            raise ValueError(f"empty interval {self}")

    def is_empty(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and self.lo_closed and self.hi_closed)

    def admits(self, x, eps: float = 0.0) -> bool:
        """Membership; within ``eps`` of an endpoint, closed includes and open excludes."""
        if self.lo is not None:
            if self.lo_closed:
                if x < self.lo - eps if eps else x < self.lo:
                    return False
            elif (x <= self.lo + eps) if eps else (x <= self.lo):
                return False
        if self.hi is not None:
            if self.hi_closed:
                if x > self.hi + eps if eps else x > self.hi:
                    return False
            elif (x >= self.hi - eps) if eps else (x >= self.hi):
                return False
        return True

    def __str__(self):
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"{'[' if self.lo_closed else '('}{lo},{hi}{']' if self.hi_closed else ')'}"


def _lo_key(s: Segment):
    return (-INF if s.lo is None else s.lo, 0 if s.lo_closed else 1)


def _touch(a: Segment, b: Segment) -> bool:
    """True when a ∪ b is an interval (a starts no later than b)."""
    if a.hi is None or b.lo is None:
        return True
    if b.lo < a.hi:
        return True
    return b.lo == a.hi and (a.hi_closed or b.lo_closed)


def _merge(a: Segment, b: Segment) -> Segment:
    if a.hi is None or b.hi is None:
        hi, hc = None, False
    elif a.hi > b.hi:
        hi, hc = a.hi, a.hi_closed
    elif b.hi > a.hi:
        hi, hc = b.hi, b.hi_closed
    else:
        hi, hc = a.hi, a.hi_closed or b.hi_closed
    return Segment(a.lo, hi, a.lo_closed, hc)


_SEG = re.compile(r"\s*([\[(])\s*([^,]+?)\s*,\s*([^\])]+?)\s*([\])])\s*")


class OutcomeSet:
    """A finite union of intervals, kept sorted with touching pieces merged."""

    __slots__ = ("segments",)

    def __init__(self, segments=()):
        segs = sorted(segments, key=_lo_key)
        merged: list[Segment] = []
        for s in segs:
            if merged and _touch(merged[-1], s):
                merged[-1] = _merge(merged[-1], s)
            else:
                merged.append(s)
        self.segments = tuple(merged)

    @classmethod
    def real_line(cls):
        return cls([Segment(None, None)])

    @classmethod
    def empty(cls):
        return cls([])

    @classmethod
    def point(cls, x):
        return cls([Segment(x, x, True, True)])

    @classmethod
    def open(cls, lo, hi):
        return cls([Segment(lo, hi)])

    @classmethod
    def closed(cls, lo, hi):
        return cls([Segment(lo, hi, True, True)])

    @classmethod
    def parse(cls, text: str) -> "OutcomeSet":
        """Parse e.g. ``"(0,2)"``, ``"[1,1] | (3,inf)"``, ``"R"`` or ``"{}"``."""
        text = text.strip()
        if text in ("R", "ℝ", "reals"):
            return cls.real_line()
        if text in ("{}", "∅", "empty", ""):
            return cls.empty()
        segs = []
        for part in re.split(r"[|∪U]", text):
            m = _SEG.fullmatch(part)
            if not m:
                raise ValueError(f"cannot parse interval {part.strip()!r}")
            lb, lo, hi, rb = m.groups()
            segs.append(Segment(lo, hi, lb == "[", rb == "]"))
        return cls(segs)

    def contains(self, x, eps: float = 0.0) -> bool:
        return any(s.admits(x, eps) for s in self.segments)

    __contains__ = contains

    def contains_interval(self, lo, hi, eps: float = 0.0) -> bool:
        return any(s.admits(lo, eps) and s.admits(hi, eps) for s in self.segments)

    def is_open(self) -> bool:
        return all(not s.lo_closed and not s.hi_closed for s in self.segments)

    def is_disjoint(self, other: "OutcomeSet") -> bool:
        for a in self.segments:
            for b in other.segments:
                first, second = (a, b) if _lo_key(a) <= _lo_key(b) else (b, a)
                if first.hi is None or second.lo is None:
                    return False
                if second.lo < first.hi:
                    return False
                if second.lo == first.hi and first.hi_closed and second.lo_closed:
                    return False
        return True

    def union(self, other: "OutcomeSet") -> "OutcomeSet":
        return OutcomeSet(self.segments + other.segments)

    def __eq__(self, other):
        return isinstance(other, OutcomeSet) and self.segments == other.segments

    def __hash__(self):
        return hash(self.segments)

    def __str__(self):
        if not self.segments:
            return "{}"
        return " | ".join(str(s) for s in self.segments)

    def __repr__(self):
        return f"OutcomeSet({str(self)!r})"

    def to_json(self):
        return str(self)


@dataclass(frozen=True)
class Interval:
    """Nonempty compact interval ``[lo, hi]``."""

    lo: object
    hi: object

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval with lo > hi: [{self.lo}, {self.hi}]")

    def as_tuple(self):
        return (self.lo, self.hi)
