"""Inner and outer daseinisation, the spectral order and interval values."""
from __future__ import annotations

import numpy as np

from . import linops
from .contexts import Character, Context, evaluate_character
from .linops import SpectralFamily, operator_from_family, proj_leq, spectral_family
from .outcomes import Interval, OutcomeSet

__all__ = [
    "Interval",
    "OutcomeSet",
    "outer_proj",
    "inner_proj",
    "outer_indices",
    "inner_indices",
    "spectral_leq",
    "outer_obs",
    "inner_obs",
    "interval_value",
    "scott_contains",
]


def outer_indices(p, ctx: Context) -> frozenset[int]:
    """Atoms P_j of ``ctx`` with P_j p != 0."""
    be = ctx.backend
    return frozenset(j for j, atom in enumerate(ctx.atoms) if not be.is_zero(atom @ p))


def inner_indices(p, ctx: Context) -> frozenset[int]:
    """Atoms P_j of ``ctx`` with P_j <= p."""
    be = ctx.backend
    return frozenset(j for j, atom in enumerate(ctx.atoms) if be.eq(p @ atom, atom))


def outer_proj(p, ctx: Context) -> np.ndarray:
    """Smallest projection of the context lying above ``p``."""
    return ctx.atom_sum(outer_indices(p, ctx))


def inner_proj(p, ctx: Context) -> np.ndarray:
    """Largest projection of the context lying below ``p``."""
    return ctx.atom_sum(inner_indices(p, ctx))


def spectral_leq(a, b) -> bool:
    """a <=_s b: E^b(t) <= E^a(t) for every t.

    This orientation is the one that agrees with the projection order on
    projections; checking at the breakpoints of both families suffices.
    """
    fa, fb = spectral_family(a), spectral_family(b)
    for t in sorted(set(fa.breakpoints) | set(fb.breakpoints)):
        if not proj_leq(fb.at(t), fa.at(t)):
            return False
    return True


def _daseinised_family(a, ctx: Context, approx) -> SpectralFamily:
    fam = spectral_family(a)
    steps = tuple(approx(e, ctx) for e in fam.steps)
    try:
        return SpectralFamily(fam.breakpoints, steps)
    except linops.InvalidFamilyError as err:  # pragma: no cover - guarded invariant
        raise AssertionError(f"daseinised family is not a resolution: {err}") from err


def outer_obs(a, ctx: Context) -> np.ndarray:
    """Smallest element of the context algebra above ``a`` in the spectral order."""
    return operator_from_family(_daseinised_family(a, ctx, inner_proj))


def inner_obs(a, ctx: Context) -> np.ndarray:
    """Largest element of the context algebra below ``a`` in the spectral order.

    The family t -> outer_proj(E(t)) is constant between breakpoints of
    ``a``, so its right limit at a breakpoint is its value there.
    """
    return operator_from_family(_daseinised_family(a, ctx, outer_proj))


def interval_value(a, ctx: Context, lam: Character) -> Interval:
    if lam.context is not ctx and lam.context != ctx:
        raise ValueError("character does not belong to this context")
    lo = evaluate_character(lam, inner_obs(a, ctx))
    hi = evaluate_character(lam, outer_obs(a, ctx))
    return Interval(lo, hi)


def interval_table(a, ctx: Context) -> list[Interval]:
    """Interval values for every character of ``ctx`` (one daseinisation pass)."""
    lo_op, hi_op = inner_obs(a, ctx), outer_obs(a, ctx)
    lo_c, hi_c = ctx.coefficients(lo_op), ctx.coefficients(hi_op)
    be = ctx.backend
    return [Interval(be.real(lo), be.real(hi)) for lo, hi in zip(lo_c, hi_c)]


def scott_contains(delta: OutcomeSet, iv: Interval, eps: float = 0.0) -> bool:
    """True iff [iv.lo, iv.hi] is a subset of delta."""
    return delta.contains_interval(iv.lo, iv.hi, eps)

