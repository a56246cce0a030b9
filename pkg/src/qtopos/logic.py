"""Subobject lattices of the spectral presheaf / spectral bundle over a context poset.

A family assigns to each context a set of atom indices (equivalently a set
of characters). Contravariant families (clopen subobjects) must be closed
under restricting characters to subcontexts; covariant families (opens of
the spectral bundle) must contain every extension of a member character to
a larger context. Fibres are finite and discrete, so every subset of a
fibre is clopen and these closure conditions are the whole content.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .contexts import ContextPoset
from .dasein import inner_indices, interval_table, outer_indices, scott_contains
from .outcomes import OutcomeSet

CONTRA = "contra"
CO = "co"


class LogicError(ValueError):
    pass


class PosetMismatchError(LogicError):
    pass


class InvalidFamilyError(LogicError):
    pass


class Family:
    """Per-context subsets of the Gelfand spectrum, aligned with ``poset.contexts``."""

    variance: str = ""

    __slots__ = ("poset", "sections")

    def __init__(self, poset: ContextPoset, sections):
        if isinstance(sections, dict):
            sections = [sections.get(name, ()) for name in poset.names]
        sections = tuple(frozenset(s) for s in sections)
        if len(sections) != len(poset):
            raise LogicError("one section per context is required")
        for c, s in zip(poset.contexts, sections):
            if any(not 0 <= i < c.k for i in s):
                raise LogicError(f"atom index out of range at context {c.name!r}")
        self.poset = poset
        self.sections = sections

    @classmethod
    def top(cls, poset):
        return cls(poset, [range(c.k) for c in poset.contexts])

    @classmethod
    def bottom(cls, poset):
        return cls(poset, [()] * len(poset))

    def at(self, key) -> frozenset[int]:
        return self.sections[self.poset.index(key)]

    def _compatible(self, other):
        if type(self) is not type(other):
            raise LogicError(f"variance mismatch: {self.variance} vs {other.variance}")
        if self.poset is not other.poset:
            raise PosetMismatchError("families live on different posets")

    def __eq__(self, other):
        if not isinstance(other, Family):
            return NotImplemented
        return type(self) is type(other) and self.poset is other.poset and self.sections == other.sections

    def __hash__(self):
        return hash((self.variance, self.sections))

    def __le__(self, other):
        self._compatible(other)
        return all(a <= b for a, b in zip(self.sections, other.sections))

    def __lt__(self, other):
        return self <= other and self != other

    def __and__(self, other):
        return sub_meet(self, other)

    def __or__(self, other):
        return sub_join(self, other)

    def __repr__(self):
        body = ", ".join(f"{n}: {sorted(s)}" for n, s in zip(self.poset.names, self.sections))
        return f"{type(self).__name__}({{{body}}})"

    def to_json(self) -> dict:
        return {
            "variance": self.variance,
            "sections": {n: sorted(s) for n, s in zip(self.poset.names, self.sections)},
        }

    def bitmasks(self) -> dict[str, int]:
        return {n: sum(1 << i for i in s) for n, s in zip(self.poset.names, self.sections)}

    def dot_labels(self) -> dict[str, str]:
        return {c.name: f"{len(s)}/{c.k}" for c, s in zip(self.poset.contexts, self.sections)}


class ClopenSubobject(Family):
    """Contravariant: closed under restriction to subcontexts."""

    variance = CONTRA
    __slots__ = ()


class OpenFamily(Family):
    """Covariant: contains every extension of its members to larger contexts."""

    variance = CO
    __slots__ = ()


_KINDS = {CONTRA: ClopenSubobject, CO: OpenFamily}


def family_class(variance: str):
    try:
        return _KINDS[variance]
    except KeyError:
        raise LogicError(f"unknown variance {variance!r}") from None


def from_json(poset: ContextPoset, data: dict) -> Family:
    cls = family_class(data["variance"])
    unknown = set(data["sections"]) - set(poset.names)
    if unknown:
        raise LogicError(f"unknown contexts {sorted(unknown)}")
    fam = cls(poset, data["sections"])
    if not is_valid(fam):
        raise InvalidFamilyError(f"family violates the {fam.variance} coherence condition")
    return fam


def is_valid(s: Family) -> bool:
    poset = s.poset
    for small, big in poset.pairs():
        table = poset.restriction(big, small)
        low, high = s.sections[small], s.sections[big]
        if isinstance(s, ClopenSubobject):
            if any(table[l] not in low for l in high):
                return False
        else:
            if any(table[l] in low and l not in high for l in range(len(table))):
                return False
    return True


def sub_meet(s: Family, t: Family) -> Family:
    s._compatible(t)
    out = type(s)(s.poset, [a & b for a, b in zip(s.sections, t.sections)])
    assert is_valid(out) or not (is_valid(s) and is_valid(t))
    return out


def sub_join(s: Family, t: Family) -> Family:
    s._compatible(t)
    out = type(s)(s.poset, [a | b for a, b in zip(s.sections, t.sections)])
    assert is_valid(out) or not (is_valid(s) and is_valid(t))
    return out


def heyting_implies(s: Family, t: Family) -> Family:
    s._compatible(t)
    poset = s.poset
    if isinstance(s, ClopenSubobject):
        # Kripke clause over subcontexts
        out = []
        for a, ctx in enumerate(poset.contexts):
            keep = set()
            for lam in range(ctx.k):
                ok = True
                for b in poset.below[a]:
                    r = poset.restriction(a, b)[lam]
                    if r in s.sections[b] and r not in t.sections[b]:
                        ok = False
                        break
                if ok:
                    keep.add(lam)
            out.append(keep)
        return ClopenSubobject(poset, out)
    # covariant: interior of (complement S) ∪ T by deleting escaping points
    work = [set(range(c.k)) - s.sections[i] | t.sections[i] for i, c in enumerate(poset.contexts)]
    pairs = list(poset.pairs())
    changed = True
    while changed:
        changed = False
        for small, big in pairs:
            table = poset.restriction(big, small)
            for l, r in enumerate(table):
                if r in work[small] and l not in work[big]:
                    work[small].discard(r)
                    changed = True
    return OpenFamily(poset, work)


def heyting_not(s: Family) -> Family:
    return heyting_implies(s, type(s).bottom(s.poset))


def embed_outer(p, poset: ContextPoset) -> ClopenSubobject:
    return ClopenSubobject(poset, [outer_indices(p, c) for c in poset.contexts])


def embed_inner(p, poset: ContextPoset) -> OpenFamily:
    return OpenFamily(poset, [inner_indices(p, c) for c in poset.contexts])


def covariant_proposition(a, delta: OutcomeSet, poset: ContextPoset) -> OpenFamily:
    """Characters whose daseinised interval value lies inside ``delta``."""
    eps = poset.backend.eps
    sections = []
    for ctx in poset.contexts:
        table = interval_table(a, ctx)
        sections.append({i for i, iv in enumerate(table) if scott_contains(delta, iv, eps)})
    return OpenFamily(poset, sections)


def all_families(poset: ContextPoset, variance: str, valid_only: bool = True):
    """Every family on the poset (exponential; meant for small posets)."""
    cls = family_class(variance)
    fibres = [
        [frozenset(i for i in range(c.k) if m >> i & 1) for m in range(1 << c.k)] for c in poset.contexts
    ]
    for choice in product(*fibres):
        fam = cls(poset, choice)
        if not valid_only or is_valid(fam):
            yield fam


@dataclass(frozen=True)
class TruthValue:
    """A downset (contravariant) or upset (covariant) of contexts."""

    poset: ContextPoset
    members: frozenset
    variance: str

    def __post_init__(self):
        members = frozenset(self.poset.index(m) for m in self.members)
        object.__setattr__(self, "members", members)
        family_class(self.variance)
        ok = self.poset.is_downset(members) if self.variance == CONTRA else self.poset.is_upset(members)
        if not ok:
            kind = "downset" if self.variance == CONTRA else "upset"
            raise VarianceViolationError(
                f"{sorted(self.names())} is not a {kind} of the context poset"
            )

    def names(self) -> list[str]:
        return [self.poset.names[i] for i in sorted(self.members)]

    def is_full(self) -> bool:
        return len(self.members) == len(self.poset)


class VarianceViolationError(LogicError):
    pass
