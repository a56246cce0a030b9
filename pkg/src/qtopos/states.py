"""Density-matrix states, per-context measures and truth values."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linops
from .contexts import ContextPoset
from .linops import backend_of
from .logic import CO, CONTRA, ClopenSubobject, Family, OpenFamily, TruthValue, embed_inner, embed_outer
from .outcomes import OutcomeSet


class StateError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class State:
    """Density matrix: Hermitian, positive semidefinite, unit trace."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho)
        linops.check_hermitian(rho, "density matrix")
        be = backend_of(rho)
        if not be.scalar_close(np.trace(rho), 1):
            raise StateError(f"density matrix has trace {np.trace(rho)}, expected 1")
        lows = np.linalg.eigvalsh(linops.to_float(rho))
        if lows[0] < -max(be.eps, 1e-12) * 10:
            raise StateError(f"density matrix is not positive: eigenvalue {lows[0]:.3g}")
        if be.exact and lows[0] < 1e-9:
            # eigvalsh is only a screen; confirm exactly via the rational spectrum when possible
            try:
                if min(linops.spectrum(rho)) < 0:
                    raise StateError("density matrix is not positive")
            except linops.IrrationalSpectrumError:
                pass
        object.__setattr__(self, "rho", rho)

    @classmethod
    def pure(cls, vec, exact: bool | None = None) -> "State":
        return cls(linops.ket_projection(vec, exact=exact))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @property
    def backend(self):
        return backend_of(self.rho)


def expectation(state: State, a) -> object:
    """tr(rho a) for Hermitian a."""
    a = np.asarray(a)
    if a.shape != state.rho.shape:
        raise linops.DimensionError(f"state is {state.rho.shape}, operator is {a.shape}")
    be = backend_of(state.rho, a)
    return be.real(np.trace(state.rho @ a))


def born(state: State, a, delta: OutcomeSet) -> object:
    """Probability that measuring ``a`` gives an outcome in ``delta``."""
    linops.check_hermitian(a)
    return _clamp(expectation(state, linops.spectral_projection(a, delta)), state.backend)


def _clamp(x, be):
    if be.exact:
        if x < 0 or x > 1:
            raise StateError(f"probability {x} outside [0, 1]")
        return x
    if x < -be.eps or x > 1 + be.eps:
        raise StateError(f"probability {x} outside [0, 1]")
    return min(1.0, max(0.0, float(x)))


@dataclass(frozen=True, eq=False)
class MeasureReport:
    """Values of a measure at each context (aligned with ``poset.contexts``)."""

    poset: ContextPoset
    values: tuple

    def __post_init__(self):
        vals = self.values
        if isinstance(vals, dict):
            vals = [vals[n] for n in self.poset.names]
        if len(vals) != len(self.poset):
            raise StateError("one value per context is required")
        object.__setattr__(self, "values", tuple(vals))

    def __getitem__(self, key):
        return self.values[self.poset.index(key)]

    def as_dict(self) -> dict:
        return dict(zip(self.poset.names, self.values))


def _measure(state: State, fam: Family) -> MeasureReport:
    poset = fam.poset
    if poset.dim != state.dim:
        raise linops.DimensionError(f"state dimension {state.dim} != poset dimension {poset.dim}")
    be = state.backend
    vals = []
    for ctx, sec in zip(poset.contexts, fam.sections):
        vals.append(_clamp(expectation(state, ctx.atom_sum(sec)), be))
    return MeasureReport(poset, tuple(vals))


def measure_contra(state: State, s: ClopenSubobject) -> MeasureReport:
    if not isinstance(s, ClopenSubobject):
        raise TypeError("measure_contra expects a ClopenSubobject")
    return _measure(state, s)


def measure_covar(state: State, u: OpenFamily) -> MeasureReport:
    if not isinstance(u, OpenFamily):
        raise TypeError("measure_covar expects an OpenFamily")
    return _measure(state, u)


def is_one(x, eps: float = 0.0) -> bool:
    return x == 1 if not eps else x >= 1 - eps


def dichotomy(m: MeasureReport, variance: str, eps: float | None = None) -> TruthValue:
    """Contexts where the measure is 1; must form a down/upset for the variance."""
    if eps is None:
        eps = m.poset.backend.eps
    members = frozenset(i for i, v in enumerate(m.values) if is_one(v, eps))
    return TruthValue(m.poset, members, variance)


def truth_contra(state: State, p, poset: ContextPoset) -> TruthValue:
    return dichotomy(measure_contra(state, embed_outer(p, poset)), CONTRA)


def truth_covar(state: State, p, poset: ContextPoset) -> TruthValue:
    return dichotomy(measure_covar(state, embed_inner(p, poset)), CO)


def truth(state: State, p, poset: ContextPoset, variance: str) -> tuple[MeasureReport, TruthValue]:
    """Measure report and truth value of ``p`` in the requested variance."""
    if variance == CONTRA:
        m = measure_contra(state, embed_outer(p, poset))
    elif variance == CO:
        m = measure_covar(state, embed_inner(p, poset))
    else:
        raise ValueError(f"unknown variance {variance!r}")
    return m, dichotomy(m, variance)
