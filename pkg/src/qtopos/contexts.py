"""Classical contexts as partitions of the identity, and finite context posets.

A context is stored by its atoms: mutually orthogonal nonzero projections
summing to the identity. The commutative algebra it stands for is the span
of those atoms, so algebra inclusion is partition coarsening.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import networkx as nx
import numpy as np

from . import linops
from .linops import backend_of

TRIVIAL = "trivial"


class ContextError(ValueError):
    pass


class InvalidContextError(ContextError):
    pass


class NonCommutingError(ContextError):
    pass


class NotASubcontextError(ContextError):
    pass


class NotInContextError(ContextError):
    pass


class Context:
    """A commutative unital subalgebra, given by its atoms in canonical order."""

    __slots__ = ("atoms", "name", "backend", "_float_atoms", "_shadows")

    def __init__(self, atoms, name: str | None = None, check: bool = True):
        atoms = [np.asarray(a) for a in atoms]
        if not atoms:
            raise InvalidContextError("a context needs at least one atom")
        be = backend_of(*atoms)
        if check:
            _validate_partition(atoms, be)
        self.atoms = tuple(sorted(atoms, key=be.key, reverse=True))
        self.name = name
        self.backend = be
        self._float_atoms = None
        self._shadows = None

    @classmethod
    def trivial(cls, dim: int, exact: bool = False, name: str = TRIVIAL) -> "Context":
        be = linops.EXACT if exact else linops.float_backend()
        return cls([be.identity(dim)], name=name, check=False)

    @property
    def dim(self) -> int:
        return self.atoms[0].shape[0]

    @property
    def k(self) -> int:
        return len(self.atoms)

    def is_trivial(self) -> bool:
        return self.k == 1

    def renamed(self, name: str) -> "Context":
        c = Context(self.atoms, name=name, check=False)
        return c

    def float_atoms(self):
        if self._float_atoms is None:
            self._float_atoms = tuple(linops.to_float(a) for a in self.atoms)
        return self._float_atoms

    def shadows(self):
        if self._shadows is None:
            self._shadows = tuple(linops.integer_shadow(a) for a in self.atoms)
        return self._shadows

    def __eq__(self, other):
        if not isinstance(other, Context):
            return NotImplemented
        if self.dim != other.dim or self.k != other.k:
            return False
        be = self.backend
        return all(any(be.eq(p, q) for q in other.atoms) for p in self.atoms)

    def __hash__(self):
        return hash((self.dim, self.k))

    def __repr__(self):
        return f"Context({self.name!r}, k={self.k}, dim={self.dim})"

    # algebra membership

    def projection_indices(self, p) -> frozenset[int] | None:
        """Atom indices whose sum is ``p``, or None if p is not a projection of this context."""
        be = self.backend
        idx = set()
        for i, atom in enumerate(self.atoms):
            pa = p @ atom
            if be.eq(pa, atom):
                idx.add(i)
            elif not be.is_zero(pa):
                return None
        if not be.eq(self.atom_sum(idx), p):
            return None
        return frozenset(idx)

    def contains_projection(self, p) -> bool:
        return self.projection_indices(p) is not None

    def coefficients(self, a) -> list | None:
        """Values c_i with a = sum of c_i P_i, or None if a is outside the algebra."""
        be = self.backend
        coeffs = []
        for atom in self.atoms:
            aa = a @ atom
            c = np.trace(aa) / np.trace(atom)
            if not be.eq(aa, atom * c):
                return None
            coeffs.append(c)
        recon = sum((atom * c for atom, c in zip(self.atoms[1:], coeffs[1:])), self.atoms[0] * coeffs[0])
        if not be.eq(recon, a):
            return None
        return coeffs

    def contains_operator(self, a) -> bool:
        return self.coefficients(a) is not None

    def atom_sum(self, indices) -> np.ndarray:
        out = self.backend.zeros(self.dim)
        for i in sorted(indices):
            out = out + self.atoms[i]
        return out

    def projections(self):
        """All 2^k projections of the context as (frozenset of atom indices, projection)."""
        for mask in range(1 << self.k):
            idx = frozenset(i for i in range(self.k) if mask >> i & 1)
            yield idx, self.atom_sum(idx)


def _validate_partition(atoms, be):
    n = atoms[0].shape[0]
    for i, p in enumerate(atoms):
        if p.shape != (n, n):
            raise InvalidContextError(f"atom {i} has shape {p.shape}, expected {(n, n)}")
        if not linops.is_projection(p):
            raise InvalidContextError(f"atom {i} is not a projection")
        if be.is_zero(p):
            raise InvalidContextError(f"atom {i} is zero")
    for i, j in combinations(range(len(atoms)), 2):
        if not be.is_zero(atoms[i] @ atoms[j]):
            raise InvalidContextError(f"atoms {i} and {j} are not orthogonal")
    total = sum(atoms[1:], atoms[0])
    if not be.eq(total, be.identity(n)):
        raise InvalidContextError("atoms do not sum to the identity")


def _overlaps(a: Context, i: int, b: Context, j: int) -> bool:
    """P_i Q_j != 0, with a cheap float screen before the exact test."""
    if a.backend.exact:
        fa, fb = a.float_atoms()[i], b.float_atoms()[j]
        if np.max(np.abs(fa @ fb)) > 1e-6:
            return True
        return not linops.shadow_product_is_zero(a.shadows()[i], b.shadows()[j])
    return not a.backend.is_zero(a.atoms[i] @ b.atoms[j])


def context_from_commuting(ops, name: str | None = None) -> Context:
    """Context generated by pairwise commuting Hermitian operators."""
    ops = [np.asarray(o) for o in ops]
    if not ops:
        raise InvalidContextError("need at least one generator")
    for i, o in enumerate(ops):
        linops.check_hermitian(o, f"generator {i}")
    for i, j in combinations(range(len(ops)), 2):
        if not linops.commutes(ops[i], ops[j]):
            raise NonCommutingError(f"generators {i} and {j} do not commute")
    be = backend_of(*ops)
    parts = [be.identity(ops[0].shape[0])]
    for o in ops:
        eig = [p for _, p in linops.eigendecompose(o)]
        refined = []
        for part in parts:
            for e in eig:
                prod = part @ e
                if not be.is_zero(prod):
                    refined.append(prod)
        parts = refined
    return Context(parts, name=name)


def refines(a: Context, b: Context) -> bool:
    """True iff b ⊆ a as algebras, i.e. every atom of b is a sum of atoms of a."""
    if a.dim != b.dim:
        raise ContextError("dimension mismatch")
    if b.k > a.k:
        return False
    be = a.backend
    for i in range(a.k):
        hits = [j for j in range(b.k) if _overlaps(a, i, b, j)]
        if len(hits) != 1:
            return False
        j = hits[0]
        if not be.eq(a.atoms[i] @ b.atoms[j], a.atoms[i]):
            return False
    return True


def intersect(a: Context, b: Context, name: str | None = None) -> Context:
    """Largest context contained in both (components of the atom-overlap graph)."""
    if a.dim != b.dim:
        raise ContextError("dimension mismatch")
    g = nx.Graph()
    g.add_nodes_from(("a", i) for i in range(a.k))
    g.add_nodes_from(("b", j) for j in range(b.k))
    for i in range(a.k):
        for j in range(b.k):
            if _overlaps(a, i, b, j):
                g.add_edge(("a", i), ("b", j))
    atoms = []
    for comp in nx.connected_components(g):
        idx = [i for side, i in comp if side == "a"]
        atoms.append(a.atom_sum(idx))
    return Context(atoms, name=name, check=False)


@dataclass(frozen=True)
class Character:
    """The character of ``context`` that is 1 on atom ``atom_index``."""

    context: Context
    atom_index: int

    def __post_init__(self):
        if not 0 <= self.atom_index < self.context.k:
            raise ValueError(f"atom index {self.atom_index} out of range for {self.context}")


def gelfand_spectrum(a: Context) -> list[Character]:
    return [Character(a, i) for i in range(a.k)]


def restrict_character(lam: Character, a: Context) -> Character:
    big = lam.context
    if not refines(big, a):
        raise NotASubcontextError(f"{a.name or a} is not a subcontext of {big.name or big}")
    q = big.atoms[lam.atom_index]
    be = a.backend
    for j, p in enumerate(a.atoms):
        if be.eq(p @ q, q):
            return Character(a, j)
    raise AssertionError("refinement without a containing atom")


def evaluate_character(lam: Character, a) -> object:
    coeffs = lam.context.coefficients(np.asarray(a))
    if coeffs is None:
        raise NotInContextError("operator is not in the context algebra")
    return lam.context.backend.real(coeffs[lam.atom_index])


class ContextPoset:
    """A finite intersection-closed family of contexts ordered by inclusion.

    Contexts are kept in construction order (trivial first). ``leq(i, j)``
    means context i is a subalgebra of context j.
    """

    def __init__(self, contexts):
        contexts = list(contexts)
        names = [c.name for c in contexts]
        if len(set(names)) != len(names) or any(n is None for n in names):
            raise ContextError("contexts in a poset need unique names")
        self.contexts = tuple(contexts)
        self.names = tuple(names)
        self._index = {n: i for i, n in enumerate(names)}
        size = len(contexts)
        self._leq = [[False] * size for _ in range(size)]
        self._restrict: dict[tuple[int, int], tuple[int, ...]] = {}
        for i in range(size):
            for j in range(size):
                if i == j:
                    self._leq[i][j] = True
                    self._restrict[(j, i)] = tuple(range(contexts[i].k))
                elif refines(contexts[j], contexts[i]):
                    self._leq[i][j] = True
                    self._restrict[(j, i)] = _restriction_table(contexts[j], contexts[i])
        self.below = tuple(frozenset(i for i in range(size) if self._leq[i][j]) for j in range(size))
        self.above = tuple(frozenset(j for j in range(size) if self._leq[i][j]) for i in range(size))

    # basic access
    def __len__(self):
        return len(self.contexts)

    def __iter__(self):
        return iter(self.contexts)

    def __getitem__(self, key) -> Context:
        return self.contexts[self.index(key)] if isinstance(key, str) else self.contexts[key]

    def index(self, key) -> int:
        if isinstance(key, int):
            return key
        if isinstance(key, Context):
            if key.name in self._index and self.contexts[self._index[key.name]] == key:
                return self._index[key.name]
            for i, c in enumerate(self.contexts):
                if c == key:
                    return i
            raise KeyError(f"context not in poset: {key!r}")
        return self._index[key]

    @property
    def dim(self) -> int:
        return self.contexts[0].dim

    @property
    def backend(self):
        return self.contexts[0].backend

    @property
    def trivial(self) -> int:
        return next(i for i, c in enumerate(self.contexts) if c.is_trivial())

    def sizes(self) -> tuple[int, ...]:
        return tuple(c.k for c in self.contexts)

    def leq(self, i, j) -> bool:
        return self._leq[self.index(i)][self.index(j)]

    def restriction(self, big, small) -> tuple[int, ...]:
        """Table sending atom indices of ``big`` to those of ``small`` (small <= big)."""
        key = (self.index(big), self.index(small))
        if key not in self._restrict:
            raise NotASubcontextError(f"{self.names[key[1]]} is not below {self.names[key[0]]}")
        return self._restrict[key]

    def pairs(self):
        """All (small, big) index pairs with small <= big, small != big."""
        for j in range(len(self)):
            for i in sorted(self.below[j]):
                if i != j:
                    yield i, j

    def maximal(self) -> list[int]:
        return [i for i in range(len(self)) if self.above[i] == {i}]

    def top_down_order(self) -> list[int]:
        """Indices sorted so that every context precedes its subcontexts."""
        return sorted(range(len(self)), key=lambda i: (-_height(self, i), i))

    def covers(self) -> list[tuple[int, int]]:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self)))
        g.add_edges_from(self.pairs())
        return sorted(nx.transitive_reduction(g).edges())

    def is_downset(self, members) -> bool:
        m = {self.index(x) for x in members}
        return all(self.below[j] <= m for j in m)

    def is_upset(self, members) -> bool:
        m = {self.index(x) for x in members}
        return all(self.above[i] <= m for i in m)

    def containing(self, p) -> list[int]:
        return [i for i, c in enumerate(self.contexts) if c.contains_projection(p)]

    # export
    def to_json(self) -> dict:
        from .io import matrix_to_json

        return {
            "dimension": self.dim,
            "backend": self.backend.name,
            "contexts": [
                {"name": c.name, "atoms": [matrix_to_json(a) for a in c.atoms]} for c in self.contexts
            ],
            "order": [[self.names[i], self.names[j]] for i, j in self.pairs()],
            "covers": [[self.names[i], self.names[j]] for i, j in self.covers()],
        }

    def to_dot(self, labels: dict | None = None) -> str:
        lines = ["digraph contexts {", "  rankdir=BT;"]
        for i, c in enumerate(self.contexts):
            label = f"{c.name} ({c.k})"
            if labels and c.name in labels:
                label += f"\\n{labels[c.name]}"
            shape = "box" if c.is_trivial() else "ellipse"
            lines.append(f'  "{c.name}" [label="{label}", shape={shape}];')
        for i, j in self.covers():
            lines.append(f'  "{self.names[i]}" -> "{self.names[j]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _height(poset: ContextPoset, i: int) -> int:
    return len(poset.below[i])


def _restriction_table(big: Context, small: Context) -> tuple[int, ...]:
    table = []
    for i in range(big.k):
        hits = [j for j in range(small.k) if _overlaps(big, i, small, j)]
        table.append(hits[0])
    return tuple(table)


def build_poset(seeds, dim: int | None = None, exact: bool | None = None) -> ContextPoset:
    """Close ``seeds`` plus the trivial context under pairwise intersection."""
    seeds = list(seeds)
    if not seeds and dim is None:
        raise ContextError("need seeds or an explicit dimension")
    if seeds:
        dim = seeds[0].dim
        exact = seeds[0].backend.exact
        if any(s.dim != dim for s in seeds):
            raise ContextError("seed contexts differ in dimension")
    found: list[Context] = [Context.trivial(dim, exact=bool(exact))]
    for s in seeds:
        if not any(s == c for c in found):
            name = s.name or f"C{len(found)}"
            if any(name == c.name for c in found):
                raise ContextError(f"duplicate context name {name!r}")
            found.append(s if s.name else s.renamed(name))
    done = set()
    changed = True
    while changed:
        changed = False
        for i in range(len(found)):
            for j in range(i + 1, len(found)):
                if (i, j) in done:
                    continue
                done.add((i, j))
                if found[i].is_trivial() or found[j].is_trivial():
                    continue
                meet = intersect(found[i], found[j])
                if not any(meet == c for c in found):
                    found.append(meet.renamed(f"{found[i].name}&{found[j].name}"))
                    changed = True
    return ContextPoset(found)
