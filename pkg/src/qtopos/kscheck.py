"""Kochen-Specker checks by exhaustive search.

``find_global_section`` looks for a compatible choice of one character per
context of a poset. ``verify_coloring_witness`` works directly on a family
of orthonormal bases of rank-1 projections and is kept independent of the
poset machinery so the two searches can cross-check each other.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from . import linops
from .contexts import Context, ContextPoset, build_poset

DATA_DIR = Path(__file__).parent / "data"


class WitnessError(ValueError):
    pass


class NotRepresentableError(ValueError):
    pass


@dataclass(frozen=True)
class SectionCandidate:
    """One atom index per context, keyed by context name."""

    poset: ContextPoset = field(repr=False, compare=False)
    assignment: dict

    def as_indices(self) -> list[int]:
        return [self.assignment[n] for n in self.poset.names]


@dataclass(frozen=True)
class SearchResult:
    section: SectionCandidate | None
    nodes_explored: int

    @property
    def found(self) -> bool:
        return self.section is not None

    def to_json(self) -> dict:
        return {
            "colorable": self.found,
            "section": None if self.section is None else dict(sorted(self.section.assignment.items())),
            "nodes_explored": self.nodes_explored,
        }


def is_compatible(poset: ContextPoset, choice) -> bool:
    """Re-check a full assignment (indices aligned with contexts) against every restriction."""
    for small, big in poset.pairs():
        if poset.restriction(big, small)[choice[big]] != choice[small]:
            return False
    return True


def _search(poset: ContextPoset, order, prefix: dict[int, int]):
    """Backtracking over ``order`` (supercontexts first); returns (assignment|None, nodes)."""
    below = {i: [j for j in poset.below[i] if j != i] for i in range(len(poset))}
    forced: dict[int, int] = {}
    owner: dict[int, int] = {}
    nodes = 0

    def place(i, lam, trail):
        for j in below[i]:
            r = poset.restriction(i, j)[lam]
            if j in forced:
                if forced[j] != r:
                    return False
            else:
                forced[j] = r
                trail.append(j)
        return True

    def undo(trail):
        for j in trail:
            del forced[j]

    assignment: dict[int, int] = {}
    for i, lam in prefix.items():
        if i in forced and forced[i] != lam:
            return None, nodes
        trail: list[int] = []
        if not place(i, lam, trail):
            return None, nodes
        assignment[i] = lam
    rest = [i for i in order if i not in prefix]

    def rec(pos):
        nonlocal nodes
        if pos == len(rest):
            return True
        i = rest[pos]
        cands = [forced[i]] if i in forced else range(poset.contexts[i].k)
        for lam in cands:
            nodes += 1
            trail: list[int] = []
            if place(i, lam, trail):
                assignment[i] = lam
                if rec(pos + 1):
                    return True
                del assignment[i]
            undo(trail)
        return False

    return (dict(assignment) if rec(0) else None), nodes


def find_global_section(poset: ContextPoset, parallel: int = 1) -> SearchResult:
    """First compatible character assignment in canonical order, or None.

    Contexts are visited largest first, atoms in canonical order, so the
    returned section is the lexicographically first one. With
    ``parallel > 1`` the branches at the first context run concurrently and
    the lowest successful branch wins, so the output does not depend on
    scheduling.
    """
    order = poset.top_down_order()
    if parallel <= 1 or not order:
        found, nodes = _search(poset, order, {})
    else:
        first = order[0]
        branches = range(poset.contexts[first].k)
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(lambda lam: _search(poset, order, {first: lam}), branches))
        nodes = sum(n for _, n in results) + len(results)
        found = next((a for a, _ in results if a is not None), None)
    if found is None:
        return SearchResult(None, nodes)
    choice = [found[i] for i in range(len(poset))]
    assert is_compatible(poset, choice)
    return SearchResult(SectionCandidate(poset, dict(zip(poset.names, choice))), nodes)


def brute_force_section(poset: ContextPoset):
    """Enumerate every assignment (product of fibres); returns the first compatible one."""
    for choice in product(*(range(c.k) for c in poset.contexts)):
        if is_compatible(poset, choice):
            return choice
    return None


def sections_agree(section: SectionCandidate, p) -> int:
    """Value 0/1 the section assigns to projection ``p``, consistent over all contexts holding it."""
    poset = section.poset
    values = set()
    for i, ctx in enumerate(poset.contexts):
        idx = ctx.projection_indices(p)
        if idx is not None:
            values.add(int(section.assignment[poset.names[i]] in idx))
    if not values:
        raise NotRepresentableError("no context of the poset contains this projection")
    if len(values) != 1:
        raise AssertionError("section assigns inconsistent values to the same projection")
    return values.pop()


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class ColoringResult:
    no_coloring: bool
    nodes_explored: int
    coloring: tuple | None = None

    def __bool__(self):
        return self.no_coloring


def _dedupe(bases):
    """Map each projection to an id, identifying equal projections (exact equality)."""
    reps: list = []
    ids = []
    for b in bases:
        row = []
        for p in b:
            be = linops.backend_of(p)
            hit = next((k for k, q in enumerate(reps) if q.shape == p.shape and be.eq(p, q)), None)
            if hit is None:
                reps.append(p)
                hit = len(reps) - 1
            row.append(hit)
        ids.append(row)
    return reps, ids


def check_bases(bases) -> None:
    if not bases:
        raise WitnessError("no bases given")
    n = np.asarray(bases[0][0]).shape[0]
    for bi, b in enumerate(bases):
        if len(b) != n:
            raise WitnessError(f"basis {bi} has {len(b)} vectors, dimension is {n}")
        be = linops.backend_of(*b)
        for p in b:
            if np.asarray(p).shape != (n, n) or not linops.is_projection(p) or linops.proj_rank(p) != 1:
                raise WitnessError(f"basis {bi} contains a non rank-1 projection")
        for x in range(n):
            for y in range(x + 1, n):
                if not be.is_zero(b[x] @ b[y]):
                    raise WitnessError(f"basis {bi}: members {x} and {y} are not orthogonal")
        if not be.eq(sum(b[1:], b[0]), be.identity(n)):
            raise WitnessError(f"basis {bi} does not sum to the identity")


def verify_coloring_witness(bases) -> ColoringResult:
    """True (no coloring) iff no 0/1 assignment picks exactly one vector per basis.

    Backtracks basis by basis; a vector once set is shared by all bases
    containing it. ``nodes_explored`` counts tried (basis, vector) choices.
    """
    check_bases(bases)
    _, ids = _dedupe(bases)
    nvec = 1 + max(v for row in ids for v in row)
    value: list[int | None] = [None] * nvec
    nodes = 0

    def rec(bi):
        nonlocal nodes
        if bi == len(ids):
            return True
        row = ids[bi]
        ones = [v for v in row if value[v] == 1]
        if len(ones) > 1:
            return False
        if ones:
            nodes += 1
            free = [v for v in row if value[v] is None]
            for v in free:
                value[v] = 0
            if rec(bi + 1):
                return True
            for v in free:
                value[v] = None
            return False
        for v in row:
            if value[v] == 0:
                continue
            nodes += 1
            free = [w for w in row if value[w] is None]
            for w in free:
                value[w] = 1 if w == v else 0
            if rec(bi + 1):
                return True
            for w in free:
                value[w] = None
        return False

    ok = rec(0)
    return ColoringResult(not ok, nodes, tuple(value) if ok else None)


@dataclass(frozen=True)
class Witness:
    dimension: int
    vectors: dict
    bases: list
    provenance: str = ""

    def projections(self) -> dict:
        return {k: linops.ket_projection(np.array(v, dtype=object), exact=True) for k, v in self.vectors.items()}

    def basis_projections(self) -> list[list]:
        proj = self.projections()
        return [[proj[v] for v in b] for b in self.bases]

    def contexts(self) -> list[Context]:
        return [Context(b, name=f"B{i + 1}") for i, b in enumerate(self.basis_projections())]

    def poset(self) -> ContextPoset:
        return build_poset(self.contexts())


def _rational(x, where):
    from .io import ParseError, _component

    try:
        return _component(x, where, exact=True)
    except ParseError as err:
        raise WitnessError(str(err)) from None


def witness_from_json(data: dict) -> Witness:
    try:
        n = data["dimension"]
        vectors = data["vectors"]
        bases = data["bases"]
    except (KeyError, TypeError) as err:
        raise WitnessError(f"witness missing field {err}") from None
    if not isinstance(n, int) or n < 1:
        raise WitnessError("dimension must be a positive integer")
    vecs = {}
    for name, comps in vectors.items():
        if not isinstance(comps, list) or len(comps) != n:
            raise WitnessError(f"vector {name!r} must have {n} components")
        vecs[name] = [_rational(c, f"vectors.{name}") for c in comps]
        if not any(vecs[name]):
            raise WitnessError(f"vector {name!r} is zero")
    for bi, b in enumerate(bases):
        for v in b:
            if v not in vecs:
                raise WitnessError(f"basis {bi} names unknown vector {v!r}")
    w = Witness(n, vecs, [list(b) for b in bases], data.get("provenance", ""))
    check_bases(w.basis_projections())
    return w


def load_witness(path) -> Witness:
    with open(path) as fh:
        return witness_from_json(json.load(fh))


def cabello18() -> Witness:
    """The bundled 18-vector / 9-basis witness in dimension 4."""
    return load_witness(DATA_DIR / "cabello18.json")
