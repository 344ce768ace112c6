"""The Lawrence-Krammer representation ``B_N -> GL_n(Z[t, 1/t, 1/2])``.

Basis vectors ``v_{j,k}`` (``1 <= j < k <= N``) are ordered lexicographically;
``n = N(N-1)/2``.  With ``q = 1/2`` the generator ``sigma_i`` sends

* ``v_{j,k} -> v_{j,k}``                                     if ``i`` not in {j-1, j, k-1, k}
* ``v_{j,k} -> q v_{i,k} + (q^2 - q) v_{i,j} + (1 - q) v_{j,k}`` if ``i = j-1``
* ``v_{j,k} -> v_{j+1,k}``                                   if ``i = j != k-1``
* ``v_{j,k} -> q v_{j,i} + (1 - q) v_{j,k} - (q^2 - q) t v_{i,k}`` if ``i = k-1 != j``
* ``v_{j,k} -> v_{j,k+1}``                                   if ``i = k``
* ``v_{j,k} -> -t q^2 v_{j,k}``                              if ``i = j = k-1``

and the image of ``Delta^2`` is the scalar ``t^2 q^(2N)``.  That scalar is
checked exactly when the generators are first built and gives the inverse
generators without any division: ``sigma_i^-1 = Delta^-1 A_{w s_i}``.

Exact images are computed internally as ``2^-e t^-s P`` with ``P`` a matrix
of ``fmpz_poly``; the public :class:`LKMatrix` has canonical dyadic Laurent
entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import flint

from .braid import Braid, IndexOutOfRange, perm_to_word, _omega, _right_mul_s, _identity, _compose
from .ff import ExtCtx, centered_lift
from .linalg import Matrix

__all__ = [
    "DegreeOverflow",
    "Dyadic",
    "DyadicLaurent",
    "LKMatrix",
    "BoundsReport",
    "lk_dim",
    "lk_generator",
    "lk_of_braid",
    "lk_of_word",
    "lk_bounds_check",
    "lk_reduce",
    "lk_of_braid_mod",
    "lk_lift",
]


class DegreeOverflow(ArithmeticError):
    """A lifted entry has t-degree above 2M: the field is too small or the
    key lies outside the promised interval."""


def lk_dim(N: int) -> int:
    return N * (N - 1) // 2


# -- dyadic Laurent polynomials ----------------------------------------------

def _two_adic(c: int) -> int:
    return (c & -c).bit_length() - 1


@dataclass(frozen=True)
class Dyadic:
    """``c / 2^d`` as a reduced fraction: ``d >= 0``, and ``c`` odd when ``d > 0``."""

    c: int
    d: int = 0

    @classmethod
    def make(cls, c: int, d: int) -> "Dyadic":
        if c == 0:
            return cls(0, 0)
        if d > 0:
            v = min(_two_adic(c), d)
            return cls(c >> v, d - v)
        return cls(c << -d, 0)

    def __post_init__(self):
        if self.d < 0 or (self.d > 0 and self.c % 2 == 0) or (self.c == 0 and self.d != 0):
            raise ValueError(f"non-canonical dyadic {self.c}/2^{self.d}")


@dataclass(frozen=True)
class DyadicLaurent:
    """Finite sum of ``Dyadic * t^e``; ``terms`` is sorted by exponent, no zeros."""

    terms: tuple[tuple[int, Dyadic], ...] = ()

    @classmethod
    def from_poly(cls, poly, e: int, s: int) -> "DyadicLaurent":
        """``2^-e t^-s poly``."""
        out = []
        for k, c in enumerate(poly.coeffs()):
            c = int(c)
            if c:
                out.append((k - s, Dyadic.make(c, e)))
        return cls(tuple(out))

    def as_dict(self) -> dict[int, Dyadic]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> list:
        return [[e, hex(v.c), v.d] for e, v in self.terms]

    @classmethod
    def from_json(cls, obj) -> "DyadicLaurent":
        terms = tuple(sorted(((int(e), Dyadic(int(c, 16), int(d))) for e, c, d in obj), key=lambda term: term[0]))
        if any(v.c == 0 for _, v in terms) or len({e for e, _ in terms}) != len(terms):
            raise ValueError("zero or repeated terms")
        return cls(terms)


# -- internal exact matrices: 2^-e t^-s P -------------------------------------

_ZERO = flint.fmpz_poly(0)


@dataclass(frozen=True)
class _LMat:
    e: int
    s: int
    rows: tuple[tuple, ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> "_LMat":
        one = flint.fmpz_poly(1)
        return cls(0, 0, tuple(tuple(one if i == j else _ZERO for j in range(n)) for i in range(n)))

    def __matmul__(self, other: "_LMat") -> "_LMat":
        cols = list(zip(*other.rows))
        rows = []
        for r in self.rows:
            rows.append(tuple(sum((a * b for a, b in zip(r, c) if not a.is_zero() and not b.is_zero()), _ZERO)
                              for c in cols))
        return _LMat(self.e + other.e, self.s + other.s, tuple(rows)).normalized()

    def scaled(self, e: int, s: int, c: int = 1) -> "_LMat":
        """Multiply by the scalar ``c 2^-e t^-s``."""
        if c == 1:
            return _LMat(self.e + e, self.s + s, self.rows)
        return _LMat(self.e + e, self.s + s, tuple(tuple(c * x for x in r) for r in self.rows))

    def normalized(self) -> "_LMat":
        """Pull common powers of 2 (up to ``e``) and of ``t`` out of ``P``."""
        nz = [x for r in self.rows for x in r if not x.is_zero()]
        if not nz:
            return _LMat(0, 0, self.rows)
        low = min(next(k for k, c in enumerate(x.coeffs()) if c != 0) for x in nz)
        v2 = self.e
        if v2 > 0:
            for x in nz:
                for c in x.coeffs():
                    if c != 0:
                        v2 = min(v2, _two_adic(int(c)))
                        if v2 == 0:
                            break
                if v2 == 0:
                    break
        else:
            v2 = 0
        if low == 0 and v2 == 0:
            return self
        div = 1 << v2
        rows = tuple(tuple(_shift_down(x, low, div) for x in r) for r in self.rows)
        return _LMat(self.e - v2, self.s - low, rows)

    def mul_sparse(self, g: "_Sparse") -> "_LMat":
        rows = []
        for r in self.rows:
            rows.append(tuple(sum((r[k] * v for k, v in col), _ZERO) for col in g.cols))
        return _LMat(self.e + g.e, self.s + g.s, tuple(rows))

    def to_lk(self, N: int) -> "LKMatrix":
        m = self.normalized()
        return LKMatrix(N, tuple(tuple(DyadicLaurent.from_poly(x, m.e, m.s) for x in r) for r in m.rows))

    def reduce(self, ctx: ExtCtx) -> Matrix:
        R = flint.fmpz_mod_poly_ctx(ctx.p)
        fpoly = R(list(ctx.f))
        half = ctx.element((ctx.p + 1) // 2)
        scale = half ** self.e * ctx.t ** (-self.s)
        rows = []
        for r in self.rows:
            row = []
            for x in r:
                cs = (R([int(c) for c in x.coeffs()]) % fpoly).coeffs() if not x.is_zero() else []
                row.append(ctx.element([int(c) for c in cs]) * scale)
            rows.append(row)
        return Matrix(ctx, rows)


def _shift_down(x, low: int, div: int):
    if x.is_zero():
        return x
    cs = [int(c) for c in x.coeffs()][low:]
    return flint.fmpz_poly([c // div for c in cs])


@dataclass(frozen=True)
class _Sparse:
    """``2^-e t^-s G`` with ``G`` stored by columns as ``[(row, poly), ...]``."""

    e: int
    s: int
    cols: tuple[tuple[tuple[int, object], ...], ...]


def _dense_to_sparse(m: _LMat) -> _Sparse:
    cols = tuple(tuple((k, x) for k, x in enumerate(c) if not x.is_zero()) for c in zip(*m.rows))
    return _Sparse(m.e, m.s, cols)


@lru_cache(maxsize=None)
def _basis_index(N: int) -> dict[tuple[int, int], int]:
    return {jk: idx for idx, jk in enumerate(combinations(range(1, N + 1), 2))}


@lru_cache(maxsize=None)
def _positive_generator(N: int, i: int) -> _LMat:
    """``4 * LK(sigma_i)`` as an integer matrix with ``e = 2``."""
    idx = _basis_index(N)
    n = len(idx)
    t = flint.fmpz_poly([0, 1])
    cols = [[_ZERO] * n for _ in range(n)]
    # q = 1/2 scaled by 4: q -> 2, q^2 - q -> -1, 1 - q -> 2, -(q^2 - q) t -> t, -t q^2 -> -t
    for (j, k), c in idx.items():
        col = cols[c]

        def put(jk, val):
            col[idx[jk]] = col[idx[jk]] + val

        if i not in (j - 1, j, k - 1, k):
            put((j, k), 4)
        elif i == j - 1:
            put((i, k), 2)
            put((i, j), -1)
            put((j, k), 2)
        elif i == j and i != k - 1:
            put((j + 1, k), 4)
        elif i == k - 1 and i != j:
            put((j, i), 2)
            put((j, k), 2)
            put((i, k), t)
        elif i == k:
            put((j, k + 1), 4)
        else:
            put((j, k), -t)
    rows = tuple(tuple(flint.fmpz_poly(x) if isinstance(x, int) else x for x in r) for r in zip(*cols))
    return _LMat(2, 0, rows)


def _word_product(N: int, word) -> _LMat:
    m = _LMat.identity(lk_dim(N))
    for i, sign in word:
        m = m.mul_sparse(_generator_sparse(N, i, sign))
    return m.normalized()


@lru_cache(maxsize=None)
def _delta(N: int) -> _LMat:
    return _word_product(N, [(j, 1) for j in perm_to_word(_omega(N))])


@lru_cache(maxsize=None)
def _delta_squared_scalar(N: int) -> tuple[int, int]:
    """``(e, s)`` with ``LK(Delta^2) = 2^-e t^-s I``, verified exactly."""
    d2 = (_delta(N) @ _delta(N)).normalized()
    n = lk_dim(N)
    one = flint.fmpz_poly(1)
    if any(x != (one if i == j else _ZERO) for i, r in enumerate(d2.rows) for j, x in enumerate(r)):
        raise AssertionError("LK(Delta^2) is not the expected scalar")
    if (d2.e, d2.s) != (2 * N, -2) or n != len(d2.rows):
        raise AssertionError("LK(Delta^2) is not the expected scalar")
    return d2.e, d2.s


@lru_cache(maxsize=None)
def _generator_exact(N: int, i: int, sign: int) -> _LMat:
    if not 1 <= i <= N - 1:
        raise IndexOutOfRange(f"generator {i} not in [1, {N - 1}]")
    if sign == 1:
        return _positive_generator(N, i)
    # sigma_i^-1 = Delta^-1 A_{w s_i} and Delta^-1 = LK(Delta^2)^-1 Delta
    e2, s2 = _delta_squared_scalar(N)
    rest = _compose(_omega(N), _right_mul_s(_identity(N), i - 1))
    pos = _word_product(N, [(j, 1) for j in perm_to_word(rest)])
    inv = (_delta(N) @ pos).scaled(-e2, -s2).normalized()
    check = (inv @ _positive_generator(N, i)).normalized()
    if check != _LMat.identity(lk_dim(N)):
        raise AssertionError("inverse generator check failed")
    return inv


@lru_cache(maxsize=None)
def _generator_sparse(N: int, i: int, sign: int) -> _Sparse:
    if sign == 1:
        return _dense_to_sparse(_positive_generator(N, i))
    return _dense_to_sparse(_generator_exact(N, i, sign))


# -- public matrices -------------------------------------------------------

@dataclass(frozen=True)
class LKMatrix:
    N: int
    entries: tuple[tuple[DyadicLaurent, ...], ...] = field(repr=False)

    def __post_init__(self):
        n = lk_dim(self.N)
        if len(self.entries) != n or any(len(r) != n for r in self.entries):
            raise ValueError(f"LK matrices for B_{self.N} are {n} x {n}")

    @property
    def n(self) -> int:
        return lk_dim(self.N)

    @classmethod
    def identity(cls, N: int) -> "LKMatrix":
        return _LMat.identity(lk_dim(N)).to_lk(N)

    def _internal(self) -> _LMat:
        e = max((v.d for r in self.entries for x in r for _, v in x.terms), default=0)
        s = -min((ex for r in self.entries for x in r for ex, _ in x.terms), default=0)
        rows = []
        for r in self.entries:
            row = []
            for x in r:
                cs: dict[int, int] = {}
                for ex, v in x.terms:
                    cs[ex + s] = v.c << (e - v.d)
                row.append(flint.fmpz_poly([cs.get(k, 0) for k in range(max(cs, default=-1) + 1)]))
            rows.append(tuple(row))
        return _LMat(e, s, tuple(rows))

    def __matmul__(self, other: "LKMatrix") -> "LKMatrix":
        if self.N != other.N:
            raise ValueError("strand counts differ")
        return (self._internal() @ other._internal()).to_lk(self.N)

    def is_identity(self) -> bool:
        return self == LKMatrix.identity(self.N)

    def to_json(self) -> dict:
        return {"N": self.N, "entries": [[x.to_json() for x in r] for r in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "LKMatrix":
        return cls(obj["N"], tuple(tuple(DyadicLaurent.from_json(x) for x in r) for r in obj["entries"]))


def lk_generator(N: int, j: int, sign: int = 1) -> LKMatrix:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return _generator_exact(N, j, sign).to_lk(N)


def _lk_internal(b: Braid) -> _LMat:
    N = b.N
    q, r = divmod(b.inf, 2)
    m = _delta(N) if r else _LMat.identity(lk_dim(N))
    if q:
        e2, s2 = _delta_squared_scalar(N)
        m = m.scaled(q * e2, q * s2)
    for p in b.factors:
        for j in perm_to_word(p):
            m = m.mul_sparse(_generator_sparse(N, j, 1))
        m = m.normalized()
    return m


def lk_of_braid(b: Braid) -> LKMatrix:
    return _lk_internal(b).to_lk(b.N)


def lk_of_word(N: int, word) -> LKMatrix:
    """LK image of a word by direct generator products (no normal form)."""
    return _word_product(N, word).to_lk(N)


def lk_reduce(m: LKMatrix, ctx: ExtCtx) -> Matrix:
    """Map entries into ``ctx`` via ``t -> t mod f``, ``1/2 -> 2^-1 mod p``."""
    return m._internal().reduce(ctx)


@dataclass(frozen=True)
class BoundsReport:
    passed: bool
    max_degree: int
    max_coeff_bits: int
    max_denominator_exp: int
    violations: tuple[str, ...] = ()


def lk_bounds_check(m: LKMatrix, M: int, N: int | None = None) -> BoundsReport:
    """Degrees in ``[-M, M]``, numerators ``|c| <= 2^(N^2 M)``, ``d <= 2NM``."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    N = m.N if N is None else N
    cbound = 1 << (N * N * M)
    dbound = 2 * N * M
    violations = []
    max_deg = max_bits = max_d = 0
    for a, r in enumerate(m.entries):
        for b, x in enumerate(r):
            for ex, v in x.terms:
                max_deg = max(max_deg, abs(ex))
                max_bits = max(max_bits, abs(v.c).bit_length())
                max_d = max(max_d, v.d)
                if not -M <= ex <= M:
                    violations.append(f"entry ({a},{b}): exponent {ex} outside [-{M}, {M}]")
                if abs(v.c) > cbound:
                    violations.append(f"entry ({a},{b}): |c| has {abs(v.c).bit_length()} bits > {N * N * M}")
                if v.d > dbound:
                    violations.append(f"entry ({a},{b}): d = {v.d} > {dbound}")
    return BoundsReport(not violations, max_deg, max_bits, max_d, tuple(violations))


# -- modular images and lifting ---------------------------------------------

@lru_cache(maxsize=256)
def _generator_mod(ctx: ExtCtx, N: int, j: int, sign: int):
    """Column-sparse image of sigma_j^sign in ``ctx``."""
    g = _generator_exact(N, j, sign).reduce(ctx)
    return tuple(tuple((k, x) for k, x in enumerate(col) if not x.is_zero()) for col in zip(*g.rows))


@lru_cache(maxsize=64)
def _delta_mod(ctx: ExtCtx, N: int):
    return _delta(N).reduce(ctx), _delta_squared_scalar(N)


def _mul_sparse_mod(rows: list[list], cols, zero) -> list[list]:
    out = []
    for r in rows:
        row = []
        for col in cols:
            acc = zero
            for k, v in col:
                acc += r[k] * v
            row.append(acc)
        out.append(row)
    return out


def lk_of_braid_mod(b: Braid, ctx: ExtCtx) -> Matrix:
    """``LK(b)`` with entries mapped into ``ctx``, multiplied directly over the field."""
    N = b.N
    n = lk_dim(N)
    dmod, (e2, s2) = _delta_mod(ctx, N)
    q, r = divmod(b.inf, 2)
    rows = [list(row) for row in (dmod.rows if r else Matrix.identity(ctx, n).rows)]
    if q:
        half = ctx.element((ctx.p + 1) // 2)
        scal = (half ** e2 * ctx.t ** (-s2)) ** q
        rows = [[x * scal for x in row] for row in rows]
    for p in b.factors:
        for j in perm_to_word(p):
            rows = _mul_sparse_mod(rows, _generator_mod(ctx, N, j, 1), ctx.zero)
    return Matrix(ctx, rows)


def lk_lift(khat: Matrix, M: int, N: int, ctx: ExtCtx) -> LKMatrix:
    """Recover ``LK(K)`` from its image in ``ctx`` for ``K`` in ``[-M, M]``.

    ``2^(2NM) t^M LK(K)`` has integer polynomial entries of degree <= 2M;
    the field must have ``d > 2M`` and ``p`` above twice the largest
    coefficient for the centered lift to be exact.
    """
    n = lk_dim(N)
    if khat.shape != (n, n):
        raise ValueError(f"expected a {n} x {n} matrix")
    clear = ctx.element(2) ** (2 * N * M) * ctx.t ** M
    rows = []
    for a, r in enumerate(khat.rows):
        row = []
        for b, x in enumerate(r):
            cs = [centered_lift(ctx.p, c) for c in ctx.coeffs(x * clear)]
            deg = max((k for k, c in enumerate(cs) if c), default=-1)
            if deg > 2 * M:
                raise DegreeOverflow(f"entry ({a},{b}) has degree {deg} > 2M = {2 * M}")
            row.append(flint.fmpz_poly(cs[:deg + 1]) if deg >= 0 else _ZERO)
        rows.append(tuple(row))
    return _LMat(2 * N * M, M, tuple(rows)).to_lk(N)
