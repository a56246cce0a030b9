"""Session specs: the JSON document the command line works from."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import linops
from .contexts import Context, ContextError, context_from_commuting
from .io import ParseError, matrix_from_json, matrix_to_json
from .outcomes import OutcomeSet
from .states import State

BACKENDS = ("rational", "float")


class UnknownNameError(KeyError):
    def __str__(self):
        return self.args[0] if self.args else "unknown name"


@dataclass
class PropositionDef:
    """Either an explicit projection or an (observable, outcome set) pair."""

    projection: np.ndarray
    observable: str | None = None
    outcomes: OutcomeSet | None = None

    def to_json(self):
        if self.observable is not None:
            return {"observable": self.observable, "outcomes": str(self.outcomes)}
        return matrix_to_json(self.projection)


@dataclass
class SessionSpec:
    dimension: int
    backend: str
    contexts: list[Context] = field(default_factory=list)
    observables: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)
    propositions: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.backend == "rational"

    def observable(self, name):
        if name not in self.observables:
            raise UnknownNameError(f"unknown observable {name!r}")
        return self.observables[name]

    def state(self, name) -> State:
        if name not in self.states:
            raise UnknownNameError(f"unknown state {name!r}")
        return self.states[name]

    def proposition(self, name):
        if name not in self.propositions:
            raise UnknownNameError(f"unknown proposition {name!r}")
        return self.propositions[name].projection

    def context(self, name) -> Context:
        for c in self.contexts:
            if c.name == name:
                return c
        raise UnknownNameError(f"unknown context {name!r}")

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "backend": self.backend,
            "contexts": [
                {"name": c.name, "atoms": [matrix_to_json(a) for a in c.atoms]} for c in self.contexts
            ],
            "observables": {k: matrix_to_json(v) for k, v in self.observables.items()},
            "states": {k: matrix_to_json(v.rho) for k, v in self.states.items()},
            "propositions": {k: v.to_json() for k, v in self.propositions.items()},
        }


def _need(data, key, where, kind):
    if key not in data:
        raise ParseError(f"missing required field {key!r}", where)
    val = data[key]
    if not isinstance(val, kind):
        raise ParseError(f"field {key!r} has the wrong type", where)
    return val


def _matrix(data, exact, where, dim):
    m = matrix_from_json(data, exact, where)
    if m.shape != (dim, dim):
        raise ParseError(f"expected a {dim}x{dim} matrix, got {m.shape[0]}x{m.shape[1]}", where)
    return m


def parse_session(data, backend: str | None = None) -> SessionSpec:
    """Build a :class:`SessionSpec`; raises ParseError (shape) or invariant errors (content).

    Content errors are the library's own exceptions: non-Hermitian matrices
    raise ``InvalidOperatorError`` naming the entry, non-commuting context
    generators raise ``NonCommutingError`` and so on.
    """
    if not isinstance(data, dict):
        raise ParseError("session spec must be a JSON object", "$")
    dim = _need(data, "dimension", "$", int)
    if dim < 1:
        raise ParseError("dimension must be positive", "$.dimension")
    be = backend or data.get("backend", "float")
    if be not in BACKENDS:
        raise ParseError(f"unknown backend {be!r}", "$.backend")
    exact = be == "rational"
    spec = SessionSpec(dim, be)

    seen: set[str] = set()

    def claim(name, where):
        if not isinstance(name, str) or not name:
            raise ParseError("names must be nonempty strings", where)
        if name in seen:
            raise ParseError(f"duplicate name {name!r}", where)
        seen.add(name)

    for name, m in data.get("observables", {}).items():
        where = f"$.observables.{name}"
        claim(name, where)
        spec.observables[name] = linops.check_hermitian(_matrix(m, exact, where, dim), f"observable {name!r}")

    for i, cdef in enumerate(data.get("contexts", [])):
        where = f"$.contexts[{i}]"
        if not isinstance(cdef, dict):
            raise ParseError("context must be an object", where)
        name = _need(cdef, "name", where, str)
        claim(name, where + ".name")
        if name == "trivial":
            raise ParseError("the name 'trivial' is reserved", where + ".name")
        if "atoms" in cdef:
            atoms = [_matrix(a, exact, f"{where}.atoms[{j}]", dim) for j, a in enumerate(cdef["atoms"])]
            for j, a in enumerate(atoms):
                linops.check_hermitian(a, f"context {name!r} atom {j}")
            ctx = Context(atoms, name=name)
        elif "generators" in cdef:
            gens = []
            for j, g in enumerate(cdef["generators"]):
                if isinstance(g, str):
                    gens.append(spec.observable(g))
                else:
                    gens.append(_matrix(g, exact, f"{where}.generators[{j}]", dim))
            try:
                ctx = context_from_commuting(gens, name=name)
            except ContextError as err:
                raise type(err)(f"context {name!r}: {err}") from None
        else:
            raise ParseError("context needs 'atoms' or 'generators'", where)
        spec.contexts.append(ctx)

    for name, m in data.get("states", {}).items():
        where = f"$.states.{name}"
        claim(name, where)
        spec.states[name] = State(_matrix(m, exact, where, dim))

    for name, pdef in data.get("propositions", {}).items():
        where = f"$.propositions.{name}"
        claim(name, where)
        if isinstance(pdef, dict):
            obs = _need(pdef, "observable", where, str)
            text = _need(pdef, "outcomes", where, str)
            try:
                delta = OutcomeSet.parse(text)
            except ValueError as err:
                raise ParseError(str(err), where + ".outcomes") from None
            proj = linops.spectral_projection(spec.observable(obs), delta)
            spec.propositions[name] = PropositionDef(proj, obs, delta)
        else:
            proj = linops.check_projection(_matrix(pdef, exact, where, dim), f"proposition {name!r}")
            spec.propositions[name] = PropositionDef(proj)
    return spec


def load_session(path, backend: str | None = None) -> SessionSpec:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON: {err.msg}", f"{path}:{err.lineno}:{err.colno}") from None
    except OSError as err:
        raise ParseError(str(err), str(path)) from None
    return parse_session(data, backend)
