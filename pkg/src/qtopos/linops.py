"""Matrix numerics over two backends.

Operators are plain numpy arrays. An ``object`` array of :class:`QQi`
entries selects the exact rational backend; any numeric array selects the
float backend, whose tolerance ``eps`` is fixed per session via
:func:`set_epsilon` (default 1e-9).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .gaussrat import QQi
from .outcomes import OutcomeSet

DEFAULT_EPS = 1e-9


class LinopsError(ValueError):
    pass


class InvalidOperatorError(LinopsError):
    pass


class InvalidFamilyError(LinopsError):
    pass


class DimensionError(LinopsError):
    pass


class IrrationalSpectrumError(LinopsError):
    """The exact backend met an eigenvalue outside the rationals."""


# ---------------------------------------------------------------------------
# exact linear algebra helpers


def _exact_rref(m: np.ndarray):
    a = [list(row) for row in m]
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = QQi(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def _exact_inverse(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    aug = np.concatenate([m, _exact_identity(n)], axis=1)
    red, pivots = _exact_rref(aug)
    if pivots[:n] != list(range(n)):
        raise LinopsError("singular matrix")
    return np.array([row[n:] for row in red], dtype=object)


def _exact_identity(n: int) -> np.ndarray:
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = QQi(1 if i == j else 0)
    return out


def _exact_zeros(n: int, m: int | None = None) -> np.ndarray:
    out = np.empty((n, n if m is None else m), dtype=object)
    out.fill(QQi(0))
    return out


def _projector_onto_columns(b: np.ndarray, like: "Backend") -> np.ndarray:
    """Orthogonal projector onto span of the (independent) columns of ``b``."""
    n = b.shape[0]
    if b.shape[1] == 0:
        return like.zeros(n)
    bh = b.conj().T
    return b @ _exact_inverse(bh @ b) @ bh


def _faddeev_leverrier(h: np.ndarray) -> list[Fraction]:
    """Characteristic polynomial coefficients, highest degree first."""
    n = h.shape[0]
    ident = _exact_identity(n)
    coeffs = [QQi(1)]
    mk = _exact_zeros(n)
    for k in range(1, n + 1):
        mk = h @ mk + ident * coeffs[-1]
        ck = -np.trace(h @ mk) / k
        coeffs.append(QQi.coerce(ck))
    out = []
    for c in coeffs:
        if c.im != 0:
            raise InvalidOperatorError("characteristic polynomial is not real")
        out.append(c.re)
    return out


def _rational_roots(coeffs: list[Fraction]) -> dict[Fraction, int]:
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], x, domain="QQ")
    roots = poly.ground_roots()
    return {Fraction(int(r.p), int(r.q)): int(mult) for r, mult in roots.items()}


# ---------------------------------------------------------------------------
# backends


class Backend:
    name = "abstract"
    exact = False
    eps = 0.0

    # --- constructors
    def identity(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def zeros(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def scalar(self, x):
        raise NotImplementedError

    # --- comparisons
    def is_zero(self, m) -> bool:
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return self.is_zero(np.asarray(a) - np.asarray(b))

    def scalar_close(self, x, y) -> bool:
        raise NotImplementedError

    def real(self, x):
        raise NotImplementedError

    def key(self, m) -> tuple:
        raise NotImplementedError

    # --- decompositions
    def eigen(self, h) -> list[tuple[object, np.ndarray]]:
        raise NotImplementedError

    def range_projection(self, m) -> np.ndarray:
        raise NotImplementedError

    def kernel_projection(self, m) -> np.ndarray:
        raise NotImplementedError

    def rank(self, m) -> int:
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.name} backend eps={self.eps}>"


class ExactBackend(Backend):
    name = "rational"
    exact = True
    eps = 0

    def identity(self, n):
        return _exact_identity(n)

    def zeros(self, n):
        return _exact_zeros(n)

    def scalar(self, x):
        return QQi.coerce(x)

    def is_zero(self, m):
        return not any(bool(x) for x in np.asarray(m).flat)

    def scalar_close(self, x, y):
        return QQi.coerce(x) == QQi.coerce(y)

    def real(self, x):
        z = QQi.coerce(x)
        if z.im != 0:
            raise LinopsError(f"expected a real value, got {z}")
        return z.re

    def key(self, m):
        return tuple((x.re, x.im) for x in np.asarray(m).flat)

    def eigen(self, h):
        n = h.shape[0]
        roots = _rational_roots(_faddeev_leverrier(h))
        if sum(roots.values()) != n:
            raise IrrationalSpectrumError(
                "spectrum is not rational; use the float backend for this operator"
            )
        lams = sorted(roots)
        ident = self.identity(n)
        out = []
        for i, lam in enumerate(lams):
            p = ident
            for j, mu in enumerate(lams):
                if j != i:
                    p = p @ ((h - ident * QQi(mu)) * QQi(1 / (lam - mu)))
            out.append((lam, p))
        return out

    def rank(self, m):
        return len(_exact_rref(np.asarray(m))[1])

    def range_projection(self, m):
        m = np.asarray(m)
        _, pivots = _exact_rref(m)
        return _projector_onto_columns(m[:, pivots], self)

    def kernel_projection(self, m):
        m = np.asarray(m)
        cols = m.shape[1]
        red, pivots = _exact_rref(m)
        free = [c for c in range(cols) if c not in pivots]
        basis = np.empty((cols, len(free)), dtype=object)
        for k, f in enumerate(free):
            for c in range(cols):
                basis[c, k] = QQi(1 if c == f else 0)
            for r, pc in enumerate(pivots):
                basis[pc, k] = -red[r][f]
        return _projector_onto_columns(basis, self)


class FloatBackend(Backend):
    name = "float"
    exact = False

    def __init__(self, eps: float = DEFAULT_EPS):
        self.eps = float(eps)

    def identity(self, n):
        return np.eye(n, dtype=complex)

    def zeros(self, n):
        return np.zeros((n, n), dtype=complex)

    def scalar(self, x):
        return complex(x)

    def is_zero(self, m):
        m = np.asarray(m)
        return m.size == 0 or float(np.max(np.abs(m))) <= self.eps

    def scalar_close(self, x, y):
        return abs(complex(x) - complex(y)) <= self.eps

    def real(self, x):
        z = complex(x)
        if abs(z.imag) > max(self.eps, 1e-12) * max(1.0, abs(z.real)) * 10:
            raise LinopsError(f"expected a real value, got {z}")
        return z.real

    def key(self, m):
        digits = max(1, int(round(-np.log10(self.eps))) - 3)
        out = []
        for x in np.asarray(m, dtype=complex).flat:
            re, im = round(x.real, digits), round(x.imag, digits)
            out.append((re + 0.0, im + 0.0))
        return tuple(out)

    def eigen(self, h):
        w, v = np.linalg.eigh(np.asarray(h, dtype=complex))
        groups: list[list[int]] = []
        for i in range(len(w)):
            if groups and w[i] - w[groups[-1][-1]] <= self.eps:
                groups[-1].append(i)
            else:
                groups.append([i])
        out = []
        for g in groups:
            vecs = v[:, g]
            out.append((float(np.mean(w[g])), vecs @ vecs.conj().T))
        return out

    def _svd_tol(self, m):
        return self.eps

    def rank(self, m):
        m = np.asarray(m, dtype=complex)
        if m.size == 0:
            return 0
        s = np.linalg.svd(m, compute_uv=False)
        return int(np.sum(s > self._svd_tol(m)))

    def range_projection(self, m):
        m = np.asarray(m, dtype=complex)
        u, s, _ = np.linalg.svd(m)
        r = int(np.sum(s > self._svd_tol(m)))
        ur = u[:, :r]
        return ur @ ur.conj().T

    def kernel_projection(self, m):
        m = np.asarray(m, dtype=complex)
        _, s, vh = np.linalg.svd(m)
        r = int(np.sum(s > self._svd_tol(m)))
        k = vh[r:].conj().T
        return k @ k.conj().T


EXACT = ExactBackend()
_FLOAT = FloatBackend(DEFAULT_EPS)


def set_epsilon(eps: float) -> None:
    """Fix the float-backend tolerance for the session."""
    global _FLOAT
    _FLOAT = FloatBackend(eps)


def get_epsilon() -> float:
    return _FLOAT.eps


def float_backend() -> FloatBackend:
    return _FLOAT


def backend_of(*ms) -> Backend:
    exact = [np.asarray(m).dtype == object for m in ms]
    if all(exact):
        return EXACT
    if any(exact):
        raise LinopsError("cannot mix exact and float operators")
    return _FLOAT


def get_backend(name: str) -> Backend:
    if name in ("rational", "exact"):
        return EXACT
    if name == "float":
        return _FLOAT
    raise ValueError(f"unknown backend {name!r}")


# ---------------------------------------------------------------------------
# construction


def exact_matrix(rows) -> np.ndarray:
    """Object array of :class:`QQi` from nested rows of numbers / QQi / complex."""
    arr = np.asarray(rows, dtype=object)
    if arr.ndim != 2:
        raise DimensionError("expected a 2-d matrix")
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = QQi.coerce(x)
    return out


def float_matrix(rows) -> np.ndarray:
    arr = np.asarray(rows)
    if arr.dtype == object:
        arr = np.array([[complex(x) for x in row] for row in arr], dtype=complex)
    arr = arr.astype(complex)
    if arr.ndim != 2:
        raise DimensionError("expected a 2-d matrix")
    return arr


def to_float(m) -> np.ndarray:
    return float_matrix(m)


def to_exact(m, max_denominator: int = 10**6) -> np.ndarray:
    """Rationalise a float matrix (entries snapped to nearby small fractions)."""
    m = np.asarray(m)
    if m.dtype == object:
        return m
    out = np.empty(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        z = complex(x)
        out[idx] = QQi(
            Fraction(z.real).limit_denominator(max_denominator),
            Fraction(z.imag).limit_denominator(max_denominator),
        )
    return out


def integer_shadow(m) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of ``D * m`` as integer arrays, D a common denominator.

    Products of shadows vanish exactly when the exact products do, which
    gives a fast exact zero test.
    """
    m = np.asarray(m)
    den = 1
    for z in m.flat:
        den = den * z.re.denominator // gcd(den, z.re.denominator)
        den = den * z.im.denominator // gcd(den, z.im.denominator)
    re = np.array([[int(z.re * den) for z in row] for row in m], dtype=object)
    im = np.array([[int(z.im * den) for z in row] for row in m], dtype=object)
    bound = max([abs(x) for x in re.flat] + [abs(x) for x in im.flat] + [1])
    if bound * bound * m.shape[0] * 2 < 2**62:
        re, im = re.astype(np.int64), im.astype(np.int64)
    return re, im


def shadow_product_is_zero(a, b) -> bool:
    ar, ai = a
    br, bi = b
    if ar.dtype != br.dtype:
        ar, ai, br, bi = (x.astype(object) for x in (ar, ai, br, bi))
    return not np.any(ar @ br - ai @ bi) and not np.any(ar @ bi + ai @ br)


def identity_like(m) -> np.ndarray:
    return backend_of(m).identity(np.asarray(m).shape[0])


def ket_projection(vec, exact: bool | None = None) -> np.ndarray:
    """Rank-1 projection |v><v| / <v|v>."""
    v = np.asarray(vec)
    if exact is None:
        exact = v.dtype == object or np.issubdtype(v.dtype, np.integer)
    if exact:
        v = np.array([QQi.coerce(x) for x in v], dtype=object)
        norm = sum((x.abs2() for x in v), Fraction(0))
        if norm == 0:
            raise InvalidOperatorError("zero vector")
        return np.outer(v, v.conj()) * QQi(1 / norm)
    v = v.astype(complex)
    n = np.vdot(v, v).real
    if n == 0:
        raise InvalidOperatorError("zero vector")
    return np.outer(v, v.conj()) / n


# ---------------------------------------------------------------------------
# predicates


def _check_square(h):
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
        raise DimensionError(f"expected a nonempty square matrix, got shape {h.shape}")
    return h


def _check_same_dim(*ms):
    dims = {np.asarray(m).shape for m in ms}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")


def hermitian_defect(h) -> tuple[int, int] | None:
    """Index of the worst entry breaking h = h*, or None if Hermitian."""
    h = _check_square(h)
    be = backend_of(h)
    d = h - h.conj().T
    if be.is_zero(d):
        return None
    if be.exact:
        for idx, x in np.ndenumerate(d):
            if x:
                return idx
    i, j = np.unravel_index(int(np.argmax(np.abs(d))), d.shape)
    return (int(i), int(j))


def is_hermitian(h) -> bool:
    return hermitian_defect(h) is None


def check_hermitian(h, name: str = "operator"):
    h = _check_square(h)
    bad = hermitian_defect(h)
    if bad is not None:
        i, j = bad
        raise InvalidOperatorError(
            f"{name} is not Hermitian: entry [{i}][{j}] = {h[i, j]} but conj of [{j}][{i}] = {np.conj(h[j, i])}"
        )
    return h


def is_projection(p) -> bool:
    p = np.asarray(p)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        return False
    be = backend_of(p)
    return is_hermitian(p) and be.eq(p @ p, p)


def check_projection(p, name: str = "projection"):
    check_hermitian(p, name)
    if not backend_of(p).eq(p @ p, p):
        raise InvalidOperatorError(f"{name} is not idempotent")
    return p


def commutes(a, b) -> bool:
    _check_same_dim(a, b)
    return backend_of(a, b).is_zero(a @ b - b @ a)


def trace_real(m):
    be = backend_of(m)
    t = np.trace(m)
    return be.real(t)


# ---------------------------------------------------------------------------
# eigenstructure


def eigendecompose(h) -> list[tuple[object, np.ndarray]]:
    """Distinct eigenvalues (increasing) with their eigenprojections."""
    check_hermitian(h)
    return backend_of(h).eigen(h)


def spectrum(h) -> list:
    return [lam for lam, _ in eigendecompose(h)]


def spectral_projection(h, delta: OutcomeSet) -> np.ndarray:
    """Projection onto the eigenspaces of ``h`` whose eigenvalues lie in ``delta``."""
    be = backend_of(h)
    out = be.zeros(np.asarray(h).shape[0])
    for lam, p in eigendecompose(h):
        if delta.contains(lam, be.eps):
            out = out + p
    return out


@dataclass(frozen=True, eq=False)
class SpectralFamily:
    """Right-continuous step resolution: E(t) = steps[i] for breakpoints[i] <= t < breakpoints[i+1]."""

    breakpoints: tuple
    steps: tuple

    def __post_init__(self):
        bps, steps = tuple(self.breakpoints), tuple(self.steps)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "steps", steps)
        if not bps or len(bps) != len(steps):
            raise InvalidFamilyError("breakpoints and steps must be nonempty and of equal length")
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise InvalidFamilyError("breakpoints must be strictly increasing")
        _check_same_dim(*steps)
        be = backend_of(*steps)
        for i, e in enumerate(steps):
            if not is_projection(e):
                raise InvalidFamilyError(f"step {i} is not a projection")
        for i, (e, f) in enumerate(zip(steps, steps[1:])):
            if not proj_leq(e, f):
                raise InvalidFamilyError(f"family not monotone: E_{i + 1} is not below E_{i + 2}")
        if not be.eq(steps[-1], be.identity(steps[-1].shape[0])):
            raise InvalidFamilyError("last step must be the identity")

    @property
    def dim(self) -> int:
        return self.steps[0].shape[0]

    def at(self, t) -> np.ndarray:
        be = backend_of(*self.steps)
        current = be.zeros(self.dim)
        for b, e in zip(self.breakpoints, self.steps):
            if b <= t:
                current = e
            else:
                break
        return current


def spectral_family(h) -> SpectralFamily:
    be = backend_of(h)
    acc = be.zeros(np.asarray(h).shape[0])
    bps, steps = [], []
    for lam, p in eigendecompose(h):
        acc = acc + p
        bps.append(lam)
        steps.append(acc)
    # pin the top step to I exactly
    steps[-1] = be.identity(acc.shape[0])
    return SpectralFamily(tuple(bps), tuple(steps))


def operator_from_family(fam: SpectralFamily) -> np.ndarray:
    be = backend_of(*fam.steps)
    prev = be.zeros(fam.dim)
    out = be.zeros(fam.dim)
    for lam, e in zip(fam.breakpoints, fam.steps):
        out = out + (e - prev) * be.scalar(lam)
        prev = e
    return out


# ---------------------------------------------------------------------------
# projection lattice


def proj_leq(p, q) -> bool:
    """p <= q as projections (range inclusion)."""
    _check_same_dim(p, q)
    return backend_of(p, q).eq(q @ p, p)


def proj_eq(p, q) -> bool:
    _check_same_dim(p, q)
    return backend_of(p, q).eq(p, q)


def proj_ortho(p) -> np.ndarray:
    return identity_like(p) - p


def proj_meet(p, q) -> np.ndarray:
    _check_same_dim(p, q)
    be = backend_of(p, q)
    ident = be.identity(np.asarray(p).shape[0])
    if proj_leq(p, q):
        return p
    if proj_leq(q, p):
        return q
    stacked = np.concatenate([ident - p, ident - q], axis=0)
    return be.kernel_projection(stacked)


def proj_join(p, q) -> np.ndarray:
    _check_same_dim(p, q)
    be = backend_of(p, q)
    if proj_leq(p, q):
        return q
    if proj_leq(q, p):
        return p
    return be.range_projection(np.concatenate([p, q], axis=1))


def proj_rank(p) -> int:
    be = backend_of(p)
    return int(be.real(np.trace(p))) if be.exact else int(round(np.trace(p).real))
