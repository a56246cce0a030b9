"""Random exact test objects built from Gaussian-integer vectors.

Rank-1 projections onto Gaussian-integer vectors have Gaussian-rational
entries, so exact Gram-Schmidt gives exact orthonormal frames (as
projections) without square roots.
"""
from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from qtopos import linops
from qtopos.contexts import Context, build_poset
from qtopos.gaussrat import QQi
from qtopos.logic import CO, CONTRA, family_class
from qtopos.states import State


def rand_vec(rng: random.Random, n: int, cplx: bool = True, span: int = 2) -> np.ndarray:
    while True:
        v = [QQi(rng.randint(-span, span), rng.randint(-span, span) if cplx else 0) for _ in range(n)]
        if any(v):
            return np.array(v, dtype=object)


def _inner(u, v):
    return sum((a.conjugate() * b for a, b in zip(u, v)), QQi(0))


def gram_schmidt(vectors) -> list[np.ndarray]:
    out = []
    for v in vectors:
        w = np.array(v, dtype=object)
        for u in out:
            w = w - u * (_inner(u, w) / _inner(u, u))
        if any(w):
            out.append(w)
    return out


def random_frame(rng, n, within=None, cplx=True) -> list[np.ndarray]:
    """Rank-1 projections of an orthonormal frame of C^n, or of range(within)."""
    target = n if within is None else linops.proj_rank(within)
    vecs: list[np.ndarray] = []
    while len(vecs) < target:
        v = rand_vec(rng, n, cplx)
        if within is not None:
            v = within @ v
        vecs = gram_schmidt(vecs + [v])
    return [linops.ket_projection(v, exact=True) for v in vecs]


def group(rng, projs, k=None) -> list[np.ndarray]:
    """Sum the projections into k random nonempty groups."""
    projs = list(projs)
    rng.shuffle(projs)
    k = k or rng.randint(1, len(projs))
    cuts = sorted(rng.sample(range(1, len(projs)), k - 1)) if k > 1 else []
    bounds = [0] + cuts + [len(projs)]
    return [sum(projs[a + 1 : b], projs[a]) for a, b in zip(bounds, bounds[1:])]


def random_context(rng, n, name=None, k=None, cplx=True) -> Context:
    return Context(group(rng, random_frame(rng, n, cplx=cplx), k), name=name)


def related_context(rng, ctx: Context, name=None) -> Context:
    """Keep some atoms of ``ctx``; re-split the span of the rest in a fresh frame."""
    atoms = list(ctx.atoms)
    rng.shuffle(atoms)
    keep = atoms[: rng.randint(0, len(atoms) - 1)]
    rest = atoms[len(keep) :]
    sub = sum(rest[1:], rest[0])
    fresh = random_frame(rng, ctx.dim, within=sub)
    parts = group(rng, fresh) if len(fresh) > 1 else fresh
    return Context(keep + parts, name=name)


def random_seeds(rng, n, m, cplx=True) -> list[Context]:
    seeds: list[Context] = []
    while len(seeds) < m:
        name = f"C{len(seeds) + 1}"
        if seeds and rng.random() < 0.7:
            c = related_context(rng, rng.choice(seeds), name)
        else:
            c = random_context(rng, n, name, cplx=cplx)
        if c.k > 1 and not any(c == s for s in seeds):
            seeds.append(c)
    return seeds


def random_poset(rng, n, m=None, cplx=True):
    m = m or rng.randint(1, 4)
    return build_poset(random_seeds(rng, n, m, cplx))


def random_projection(rng, n, cplx=True) -> np.ndarray:
    frame = random_frame(rng, n, cplx=cplx)
    chosen = [p for p in frame if rng.random() < 0.5]
    return sum(chosen, linops.EXACT.zeros(n))


def random_state(rng, n, support=None, cplx=True) -> State:
    """Rational mixture of a random frame, optionally supported inside ``support``."""
    frame = random_frame(rng, n, within=support, cplx=cplx)
    if rng.random() < 0.3:
        frame = frame[:1]
    weights = [Fraction(rng.randint(1, 4)) for _ in frame]
    total = sum(weights)
    rho = sum((p * QQi(w / total) for p, w in zip(frame, weights)), linops.EXACT.zeros(n))
    return State(rho)


def random_hermitian(rng, n, lo=-3, hi=3, cplx=True) -> np.ndarray:
    frame = random_frame(rng, n, cplx=cplx)
    return sum((p * QQi(rng.randint(lo, hi)) for p in frame), linops.EXACT.zeros(n))


def random_float_hermitian(rng: np.random.Generator, n: int, degenerate: bool = False) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if not degenerate:
        return (m + m.conj().T) / 2
    q, _ = np.linalg.qr(m)
    vals = rng.integers(-2, 3, size=n).astype(float)
    return q @ np.diag(vals) @ q.conj().T


def close_family(fam, variance):
    """Smallest valid family of the given variance containing ``fam``'s sections."""
    poset = fam.poset
    secs = [set(s) for s in fam.sections]
    changed = True
    while changed:
        changed = False
        for small, big in poset.pairs():
            table = poset.restriction(big, small)
            if variance == CONTRA:
                for lam in secs[big]:
                    if table[lam] not in secs[small]:
                        secs[small].add(table[lam])
                        changed = True
            else:
                for lam, r in enumerate(table):
                    if r in secs[small] and lam not in secs[big]:
                        secs[big].add(lam)
                        changed = True
    return family_class(variance)(poset, secs)


def random_family(rng, poset, variance, density=0.3):
    cls = family_class(variance)
    raw = cls(poset, [{i for i in range(c.k) if rng.random() < density} for c in poset.contexts])
    return close_family(raw, variance)


def qubit_poset(exact=True):
    sz = [[1, 0], [0, -1]]
    sx = [[0, 1], [1, 0]]
    make = linops.exact_matrix if exact else linops.float_matrix
    from qtopos.contexts import context_from_commuting

    return build_poset(
        [context_from_commuting([make(sz)], "A_z"), context_from_commuting([make(sx)], "A_x")]
    )



def float_poset(poset):
    """The same fragment rebuilt on the float backend."""
    seeds = [Context([linops.to_float(a) for a in c.atoms], c.name) for c in poset.contexts if not c.is_trivial()]
    return build_poset(seeds, dim=poset.dim, exact=False)


def rngs():
    """Hypothesis strategy yielding seeded ``random.Random`` instances."""
    from hypothesis import strategies as st

    return st.integers(0, 2**32 - 1).map(random.Random)
