"""Dense exact linear algebra over a finite field context.

Matrices are small (n <= a few dozen) and entries are field elements from
:mod:`linear_centralizer.ff`, so everything here is plain Python loops over
lists.  Matrix unknowns are vectorized row-major: entry ``x[a][b]`` is
coordinate ``a*n + b``.

Subspaces are kept in reduced row echelon form (leading ones, first nonzero
column as pivot), so two subspaces are equal iff their bases are equal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

import flint
from typing import Iterable, Sequence

from .ff import ExtCtx

__all__ = [
    "ShapeMismatchError",
    "SingularMatrixError",
    "NoInvertibleFound",
    "Matrix",
    "Subspace",
    "SampleConfig",
    "rref",
    "nullspace",
    "mat_arith",
    "centralizer_basis",
    "double_centralizer_basis",
    "solve_conjugacy_system",
    "solve_coupled_system",
    "sample_invertible_pair",
    "random_invertible_in",
    "sample_invertible",
]


class ShapeMismatchError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


class NoInvertibleFound(RuntimeError):
    def __init__(self, msg: str, draws: int = 0):
        super().__init__(msg)
        self.draws = draws


def _dot(u, v):
    acc = u[0] * v[0]
    for k in range(1, len(u)):
        acc += u[k] * v[k]
    return acc


@lru_cache(maxsize=64)
def _mod_ctx(p: int):
    return flint.fmpz_mod_ctx(p)


def _mod_mat(ctx: ExtCtx, rows) -> "flint.fmpz_mod_mat":
    return flint.fmpz_mod_mat([[int(x) for x in r] for r in rows], _mod_ctx(ctx.p))


def _matmul_prime(ctx: ExtCtx, a_rows, b_rows) -> list[list]:
    # prime fields: one multiplication in flint's modular matrix type
    make = ctx._fq
    prod = _mod_mat(ctx, a_rows) * _mod_mat(ctx, b_rows)
    return [[make(int(v)) for v in row] for row in prod.tolist()]


class Matrix:
    """An immutable ``rows x cols`` matrix over ``ctx``."""

    __slots__ = ("ctx", "rows", "_hash")

    def __init__(self, ctx: ExtCtx, rows: Iterable[Sequence]):
        self.ctx = ctx
        self.rows = [list(r) for r in rows]
        if not self.rows or not self.rows[0]:
            raise ShapeMismatchError("matrices must be at least 1x1")
        c = len(self.rows[0])
        if any(len(r) != c for r in self.rows):
            raise ShapeMismatchError("ragged rows")
        self._hash = None

    # -- constructors
    @classmethod
    def identity(cls, ctx: ExtCtx, n: int) -> "Matrix":
        return cls.scalar(ctx, n, ctx.one)

    @classmethod
    def scalar(cls, ctx: ExtCtx, n: int, a) -> "Matrix":
        z = ctx.zero
        return cls(ctx, [[a if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, ctx: ExtCtx, r: int, c: int) -> "Matrix":
        z = ctx.zero
        return cls(ctx, [[z] * c for _ in range(r)])

    @classmethod
    def from_ints(cls, ctx: ExtCtx, rows) -> "Matrix":
        return cls(ctx, [[ctx.element(v) for v in r] for r in rows])

    @classmethod
    def from_vec(cls, ctx: ExtCtx, vec: Sequence, r: int, c: int) -> "Matrix":
        return cls(ctx, [vec[i * c:(i + 1) * c] for i in range(r)])

    @classmethod
    def random(cls, ctx: ExtCtx, r: int, c: int, rng: random.Random) -> "Matrix":
        p, d = ctx.p, ctx.d
        return cls(ctx, [[ctx.element([rng.randrange(p) for _ in range(d)]) for _ in range(c)]
                         for _ in range(r)])

    # -- shape
    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def vec(self) -> list:
        return [x for r in self.rows for x in r]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "Matrix":
        return Matrix(self.ctx, zip(*self.rows))

    # -- arithmetic
    def _check_same(self, other: "Matrix"):
        if self.shape != other.shape:
            raise ShapeMismatchError(f"{self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.ctx, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.ctx, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Matrix":
        return Matrix(self.ctx, [[-a for a in r] for r in self.rows])

    def scale(self, a) -> "Matrix":
        return Matrix(self.ctx, [[a * x for x in r] for r in self.rows])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.n_cols != other.n_rows:
            raise ShapeMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        if self.ctx.d == 1:
            return Matrix(self.ctx, _matmul_prime(self.ctx, self.rows, other.rows))
        cols = list(zip(*other.rows))
        return Matrix(self.ctx, [[_dot(r, c) for c in cols] for r in self.rows])

    def matvec(self, v: Sequence) -> list:
        return [_dot(r, v) for r in self.rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(tuple(self.ctx.coeffs(x)) for x in self.vec()))
        return self._hash

    def __repr__(self):
        return f"Matrix({self.n_rows}x{self.n_cols} over {self.ctx!r})"

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def is_scalar(self) -> bool:
        if self.n_rows != self.n_cols:
            return False
        a = self.rows[0][0]
        return all((x == a) if i == j else x.is_zero()
                   for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def det(self):
        if self.n_rows != self.n_cols:
            raise ShapeMismatchError("det of non-square matrix")
        a = [list(r) for r in self.rows]
        n = len(a)
        det = self.ctx.one
        for c in range(n):
            piv = next((r for r in range(c, n) if not a[r][c].is_zero()), None)
            if piv is None:
                return self.ctx.zero
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            pr = a[c]
            det *= pr[c]
            inv = pr[c] ** -1
            for r in range(c + 1, n):
                row = a[r]
                if row[c].is_zero():
                    continue
                m = row[c] * inv
                for k in range(c + 1, n):
                    row[k] -= m * pr[k]
        return det

    def inv(self) -> "Matrix":
        """Gauss-Jordan inverse; raises :class:`SingularMatrixError`."""
        if self.n_rows != self.n_cols:
            raise ShapeMismatchError("inverse of non-square matrix")
        n = self.n_rows
        one, zero = self.ctx.one, self.ctx.zero
        a = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next((r for r in range(c, n) if not a[r][c].is_zero()), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular")
            a[c], a[piv] = a[piv], a[c]
            pr = a[c]
            inv = pr[c] ** -1
            for k in range(c, 2 * n):
                pr[k] *= inv
            for r in range(n):
                if r == c:
                    continue
                row = a[r]
                m = row[c]
                if m.is_zero():
                    continue
                for k in range(c, 2 * n):
                    row[k] -= m * pr[k]
        return Matrix(self.ctx, [r[n:] for r in a])

    def is_invertible(self) -> bool:
        return self.n_rows == self.n_cols and not self.det().is_zero()

    def pow(self, e: int) -> "Matrix":
        if e < 0:
            return self.inv().pow(-e)
        result = Matrix.identity(self.ctx, self.n_rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            e >>= 1
            if e:
                base = base @ base
        return result

    # -- JSON
    def to_json(self) -> dict:
        ej = self.ctx.element_to_json
        return {"rows": self.n_rows, "cols": self.n_cols,
                "entries": [[ej(x) for x in r] for r in self.rows]}

    @classmethod
    def from_json(cls, ctx: ExtCtx, obj: dict) -> "Matrix":
        m = cls(ctx, [[ctx.element_from_json(x) for x in r] for r in obj["entries"]])
        if m.shape != (obj["rows"], obj["cols"]):
            raise ShapeMismatchError("declared shape does not match entries")
        return m


def mat_arith(op: str, *operands):
    """Dispatch ``mul, add, inv, det, eq`` on :class:`Matrix` operands."""
    if op == "mul":
        a, b = operands
        return a @ b
    if op == "add":
        a, b = operands
        return a + b
    if op == "inv":
        (a,) = operands
        return a.inv()
    if op == "det":
        (a,) = operands
        return a.det()
    if op == "eq":
        a, b = operands
        return a == b
    raise ValueError(f"unknown matrix op {op!r}")


# -- elimination ------------------------------------------------------------

def rref(rows: list[list], ncols: int, columns: Sequence[int] | None = None,
         ctx: ExtCtx | None = None) -> list[int]:
    """Gauss-Jordan in place; returns pivot columns in row order.

    ``columns`` sets the order in which columns are tried as pivots (default
    left to right).  Zero rows are removed from ``rows``.  Passing a prime
    field ``ctx`` selects an integer kernel with the same output.
    """
    order = range(ncols) if columns is None else columns
    if ctx is not None and ctx.d == 1:
        return _rref_prime(rows, order, ctx)
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in order:
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if not rows[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        inv = pr[c] ** -1
        nz = [k for k in range(ncols) if not pr[k].is_zero()]
        for k in nz:
            pr[k] *= inv
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            m = row[c]
            if m.is_zero():
                continue
            for k in nz:
                row[k] -= m * pr[k]
        pivots.append(c)
        r += 1
    del rows[r:]
    return pivots


def _rref_ints(R: list[list[int]], order, p: int) -> list[int]:
    """Integer kernel of :func:`rref` modulo a prime ``p``; zero rows are dropped."""
    pivots: list[int] = []
    r = 0
    nrows = len(R)
    for c in order:
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if R[i][c]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = pow(R[r][c], -1, p)
        pr = R[r] = [v * inv % p for v in R[r]]
        for i in range(nrows):
            m = R[i][c]
            if i != r and m:
                R[i] = [(a - m * b) % p for a, b in zip(R[i], pr)]
        pivots.append(c)
        r += 1
    del R[r:]
    return pivots


def _rref_prime(rows: list[list], order, ctx: ExtCtx) -> list[int]:
    R = [[int(x) for x in row] for row in rows]
    pivots = _rref_ints(R, order, ctx.p)
    make = ctx._fq
    rows[:] = [[make(v) for v in row] for row in R]
    return pivots


def _nullspace_ints(R: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    """Same basis as :func:`_nullspace_vectors`, on integer rows mod ``p``."""
    pivots = _rref_ints(R, range(ncols - 1, -1, -1), p)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(R, pivots):
            if row[f]:
                v[pc] = -row[f] % p
        basis.append(v)
    return basis


def _nullspace_vectors(rows: list[list], ncols: int, ctx: ExtCtx) -> list[list]:
    """Canonical (RREF) basis of ``{x : rows . x = 0}``; consumes ``rows``."""
    # Pivoting from the right leaves the free columns on the left, which makes
    # the natural basis e_f - sum(...) already reduced with leading ones.
    pivots = rref(rows, ncols, range(ncols - 1, -1, -1), ctx)
    pivset = set(pivots)
    one, zero = ctx.one, ctx.zero
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [zero] * ncols
        v[f] = one
        for row, pc in zip(rows, pivots):
            if not row[f].is_zero():
                v[pc] = -row[f]
        basis.append(v)
    return basis


class Subspace:
    """A subspace of ``r x c`` matrices, stored as RREF vectorized basis."""

    __slots__ = ("ctx", "shape", "vectors", "pivots")

    def __init__(self, ctx: ExtCtx, shape: tuple[int, int], vectors: list[list], pivots: list[int]):
        self.ctx = ctx
        self.shape = tuple(shape)
        self.vectors = vectors
        self.pivots = pivots

    @classmethod
    def span(cls, ctx: ExtCtx, shape, vectors: Iterable[Sequence]) -> "Subspace":
        rows = [list(v) for v in vectors]
        m = shape[0] * shape[1]
        if any(len(v) != m for v in rows):
            raise ShapeMismatchError("vector length does not match ambient shape")
        pivots = rref(rows, m, ctx=ctx)
        return cls(ctx, shape, rows, pivots)

    @classmethod
    def span_matrices(cls, mats: Sequence[Matrix]) -> "Subspace":
        if not mats:
            raise ValueError("need at least one matrix to infer the ambient space")
        return cls.span(mats[0].ctx, mats[0].shape, [m.vec() for m in mats])

    @classmethod
    def full(cls, ctx: ExtCtx, shape) -> "Subspace":
        m = shape[0] * shape[1]
        one, zero = ctx.one, ctx.zero
        return cls(ctx, shape, [[one if i == j else zero for j in range(m)] for i in range(m)],
                   list(range(m)))

    @classmethod
    def zero(cls, ctx: ExtCtx, shape) -> "Subspace":
        return cls(ctx, shape, [], [])

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def ambient_dim(self) -> int:
        return self.shape[0] * self.shape[1]

    @property
    def basis(self) -> list[Matrix]:
        r, c = self.shape
        return [Matrix.from_vec(self.ctx, v, r, c) for v in self.vectors]

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.shape == other.shape and self.pivots == other.pivots
                and all(a == b for u, v in zip(self.vectors, other.vectors) for a, b in zip(u, v)))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, shape={self.shape})"

    def residual(self, vec: Sequence) -> list:
        """``vec`` minus its reduction against the basis (zero iff in span)."""
        res = list(vec)
        for v, pc in zip(self.vectors, self.pivots):
            a = res[pc]
            if a.is_zero():
                continue
            for k in range(len(res)):
                if not v[k].is_zero():
                    res[k] -= a * v[k]
        return res

    def contains(self, m: Matrix | Sequence) -> bool:
        vec = m.vec() if isinstance(m, Matrix) else m
        return all(x.is_zero() for x in self.residual(vec))

    def coordinates(self, m: Matrix | Sequence) -> list | None:
        """Coefficients in the stored basis, or ``None`` if not in the span."""
        vec = m.vec() if isinstance(m, Matrix) else m
        if not self.contains(vec):
            return None
        return [vec[pc] for pc in self.pivots]

    def combine(self, coeffs: Sequence) -> Matrix:
        r, c = self.shape
        m = r * c
        out = [self.ctx.zero] * m
        for a, v in zip(coeffs, self.vectors):
            if a.is_zero():
                continue
            for k in range(m):
                if not v[k].is_zero():
                    out[k] += a * v[k]
        return Matrix.from_vec(self.ctx, out, r, c)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.shape != other.shape:
            raise ShapeMismatchError("subspaces live in different ambient spaces")
        if other.is_full() or self.dim == 0:
            return self
        if self.is_full():
            return other
        res = [other.residual(v) for v in self.vectors]
        # columns of `res` are residuals; solve sum c_i res_i = 0
        m = self.ambient_dim
        rows = [[res[i][k] for i in range(self.dim)] for k in range(m)]
        coeffs = _nullspace_vectors(rows, self.dim, self.ctx)
        return Subspace.span(self.ctx, self.shape, (_lincomb(self.ctx, c, self.vectors) for c in coeffs))

    def to_json(self) -> dict:
        return {"shape": list(self.shape), "basis": [b.to_json() for b in self.basis]}

    @classmethod
    def from_json(cls, ctx: ExtCtx, obj: dict) -> "Subspace":
        shape = tuple(obj["shape"])
        mats = [Matrix.from_json(ctx, b) for b in obj["basis"]]
        sub = cls.span(ctx, shape, [m.vec() for m in mats])
        if sub.dim != len(mats):
            raise ValueError("basis matrices are linearly dependent")
        return sub


def _lincomb(ctx, coeffs, vectors):
    out = [ctx.zero] * len(vectors[0])
    for a, v in zip(coeffs, vectors):
        if a.is_zero():
            continue
        for k, x in enumerate(v):
            if not x.is_zero():
                out[k] += a * x
    return out


def nullspace(A: Matrix) -> Subspace:
    """``{x : A x = 0}`` as a subspace of ``n_cols x 1`` column vectors."""
    rows = [list(r) for r in A.rows]
    vecs = _nullspace_vectors(rows, A.n_cols, A.ctx)
    return Subspace(A.ctx, (A.n_cols, 1), vecs, [next(i for i, x in enumerate(v) if not x.is_zero())
                                                 for v in vecs])


# -- conjugacy systems g x = x h ----------------------------------------------

def _stacked_rows(g: Matrix, h: Matrix) -> list[list]:
    """Rows of ``g x - x h = 0`` in the n^2 row-major entries of x."""
    n = g.n_rows
    ctx = g.ctx
    zero = ctx.zero
    out = []
    G, H = g.rows, h.rows
    for i in range(n):
        for j in range(n):
            row = [zero] * (n * n)
            # (g x)_{ij} = sum_a g[i][a] x[a][j]
            for a in range(n):
                row[a * n + j] = G[i][a]
            # -(x h)_{ij} = -sum_b x[i][b] h[b][j]
            for b in range(n):
                row[i * n + b] = row[i * n + b] - H[b][j]
            out.append(row)
    return out


def _impose(basis: list[Matrix], g: Matrix, h: Matrix) -> list[Matrix]:
    """Restrict span(basis) to solutions of ``g x = x h``."""
    if not basis:
        return basis
    ctx = g.ctx
    if ctx.d == 1:
        return _impose_prime(basis, g, h)
    diffs = [(g @ b - b @ h).vec() for b in basis]
    m = len(diffs[0])
    if all(x.is_zero() for dv in diffs for x in dv):
        return basis
    rows = [[diffs[j][k] for j in range(len(basis))] for k in range(m)]
    coeffs = _nullspace_vectors(rows, len(basis), ctx)
    n = g.n_rows
    vecs = [b.vec() for b in basis]
    return [Matrix.from_vec(ctx, _lincomb(ctx, c, vecs), n, n) for c in coeffs]


def _impose_prime(basis: list[Matrix], g: Matrix, h: Matrix) -> list[Matrix]:
    ctx = g.ctx
    p = ctx.p
    G, H = _mod_mat(ctx, g.rows), _mod_mat(ctx, h.rows)
    mats = [_mod_mat(ctx, b.rows) for b in basis]
    diffs = [[int(v) for v in (G * B - B * H).entries()] for B in mats]
    if not any(any(dv) for dv in diffs):
        return basis
    rows = [list(col) for col in zip(*diffs)]
    coeffs = _nullspace_ints(rows, len(basis), p)
    vecs = [[int(v) for v in B.entries()] for B in mats]
    make, n = ctx._fq, g.n_rows
    out = []
    for c in coeffs:
        terms = [(a, v) for a, v in zip(c, vecs) if a]
        vec = [make(sum(a * v[k] for a, v in terms) % p) for k in range(n * n)]
        out.append(Matrix.from_vec(ctx, vec, n, n))
    return out


def _krylov(r: Matrix, u: Sequence) -> list[list]:
    """Columns u, r u, ..., r^(n-1) u (as a list of column vectors)."""
    cols = [list(u)]
    for _ in range(r.n_rows - 1):
        cols.append(r.matvec(cols[-1]))
    return cols


def _cols_to_matrix(ctx, cols) -> Matrix:
    return Matrix(ctx, zip(*cols))


def _sylvester_space(r: Matrix, rp: Matrix, rng: random.Random, tries: int = 3) -> list[Matrix] | None:
    """Basis of ``{x : r x = x rp}`` via a cyclic vector of ``rp``.

    If ``u`` is cyclic for ``rp`` then ``x`` is determined by ``z = x u`` as
    ``x = K_r(z) K_rp(u)^-1`` and ``z`` ranges over ``ker chi_rp(r)``.
    Returns ``None`` when no cyclic vector turned up (derogatory ``rp``).
    """
    ctx, n = r.ctx, r.n_rows
    for _ in range(tries):
        u = [ctx.element([rng.randrange(ctx.p) for _ in range(ctx.d)]) for _ in range(n)]
        cols = _krylov(rp, u)
        K = _cols_to_matrix(ctx, cols)
        try:
            Kinv = K.inv()
        except SingularMatrixError:
            continue
        # rp^n u = sum_j c_j rp^j u
        c = Kinv.matvec(rp.matvec(cols[-1]))
        powers = [Matrix.identity(ctx, n), r]
        for _ in range(n - 1):
            powers.append(powers[-1] @ r)
        P = powers[n]
        for j in range(n):
            if not c[j].is_zero():
                P = P - powers[j].scale(c[j])
        zs = nullspace(P)
        out = []
        for z in zs.vectors:
            kz = [z] + [powers[j].matvec(z) for j in range(1, n)]
            out.append(_cols_to_matrix(ctx, kz) @ Kinv)
        return out
    return None


def _check_pairs(pairs):
    if not pairs:
        raise ValueError("need at least one pair")
    n = pairs[0][0].n_rows
    ctx = pairs[0][0].ctx
    for g, h in pairs:
        if g.shape != (n, n) or h.shape != (n, n):
            raise ShapeMismatchError("all matrices must be n x n")
    return ctx, n


def _solve_stacked(pairs, constraint: Subspace | None) -> Subspace:
    ctx, n = _check_pairs(pairs)
    shape = (n, n)
    if constraint is not None and not constraint.is_full():
        basis = constraint.basis
        for g, h in pairs:
            basis = _impose(basis, g, h)
            if not basis:
                break
        return Subspace.span(ctx, shape, [b.vec() for b in basis])
    rows = []
    for g, h in pairs:
        rows.extend(_stacked_rows(g, h))
    vecs = _nullspace_vectors(rows, n * n, ctx)
    return Subspace(ctx, shape, vecs, [next(i for i, x in enumerate(v) if not x.is_zero()) for v in vecs])


def _solve_krylov(pairs, constraint: Subspace | None, rng: random.Random) -> Subspace:
    ctx, n = _check_pairs(pairs)
    shape = (n, n)
    if constraint is not None and constraint.dim <= n:
        return _solve_stacked(pairs, constraint)
    pairs = [(g, h) for g, h in pairs if not (g == h and g.is_scalar())]
    if not pairs:
        return constraint if constraint is not None else Subspace.full(ctx, shape)
    if len(pairs) == 1:
        r, rp = pairs[0]
    else:
        alphas = [ctx.element([rng.randrange(ctx.p) for _ in range(ctx.d)]) for _ in pairs]
        r = pairs[0][0].scale(alphas[0])
        rp = pairs[0][1].scale(alphas[0])
        for a, (g, h) in zip(alphas[1:], pairs[1:]):
            r = r + g.scale(a)
            rp = rp + h.scale(a)
    basis = _sylvester_space(r, rp, rng)
    rest = pairs
    if basis is None:
        # rp has no cyclic vector: fall back to the stacked system for one
        # pair and impose the others on its (already small) solution space.
        first = _solve_stacked([pairs[0]], None)
        basis = first.basis
        rest = pairs[1:]
    for g, h in rest:
        basis = _impose(basis, g, h)
        if not basis:
            break
    sol = Subspace.span(ctx, shape, [b.vec() for b in basis])
    if constraint is not None:
        sol = sol.intersect(constraint)
    return sol


def solve_conjugacy_system(pairs: Sequence[tuple[Matrix, Matrix]], constraint: Subspace | None = None,
                           *, method: str = "auto") -> Subspace:
    """All ``x`` with ``g x = x h`` for every ``(g, h)`` in ``pairs``, inside ``constraint``.

    ``method="stacked"`` solves the k n^2 x n^2 system directly (or, with a
    constraint, the system in the constraint's coordinates).  ``"krylov"``
    first solves one random combination of the pairs through a cyclic vector
    and then imposes every pair exactly on that small space.  Both return
    the same canonical subspace; the randomness affects only speed.
    """
    pairs = list(pairs)
    if method == "stacked":
        return _solve_stacked(pairs, constraint)
    if method in ("auto", "krylov"):
        return _solve_krylov(pairs, constraint, random.Random(0x5EED))
    raise ValueError(f"unknown method {method!r}")


def centralizer_basis(mats: Sequence[Matrix], n: int | None = None, *, method: str = "auto") -> Subspace:
    """``C(mats) = {x : b x = x b for all b}``."""
    mats = list(mats)
    if n is not None and any(m.shape != (n, n) for m in mats):
        raise ShapeMismatchError(f"expected {n} x {n} matrices")
    return solve_conjugacy_system([(m, m) for m in mats], method=method)


def double_centralizer_basis(mats: Sequence[Matrix], n: int | None = None, *, method: str = "auto") -> Subspace:
    """``C(C(mats))``."""
    c = centralizer_basis(mats, n, method=method)
    return centralizer_basis(c.basis, n, method=method)


def solve_coupled_system(space_x: Subspace, a: Matrix, b: Matrix, space_y: Subspace) -> list[tuple[Matrix, Matrix]]:
    """Basis of ``{(x, y) in space_x x space_y : x a = b y}``.

    The unknowns are the ``d_x + d_y`` coordinates in the two given bases, so
    the system is ``n^2`` equations in at most ``2 n^2`` variables.
    """
    ctx = a.ctx
    bx, by = space_x.basis, space_y.basis
    cols = [(x @ a).vec() for x in bx] + [(-(b @ y)).vec() for y in by]
    if not cols:
        return []
    m = len(cols[0])
    rows = [[col[k] for col in cols] for k in range(m)]
    coeffs = _nullspace_vectors(rows, len(cols), ctx)
    out = []
    dx = len(bx)
    r, c = space_x.shape
    for v in coeffs:
        x = _lincomb(ctx, v[:dx], [m_.vec() for m_ in bx]) if dx else [ctx.zero] * (r * c)
        y = _lincomb(ctx, v[dx:], [m_.vec() for m_ in by]) if by else [ctx.zero] * (r * c)
        out.append((Matrix.from_vec(ctx, x, r, c), Matrix.from_vec(ctx, y, r, c)))
    return out


# -- Las Vegas sampling ------------------------------------------------------

@dataclass(frozen=True)
class SampleConfig:
    """``sample_set_size=None`` samples coefficients from the whole field."""

    max_tries: int = 64
    sample_set_size: int | None = None

    def check(self, ctx: ExtCtx, n: int):
        if self.max_tries < 1:
            raise ValueError("max_tries must be positive")
        size = ctx.order if self.sample_set_size is None else self.sample_set_size
        if size <= n:
            raise ValueError(f"|S| = {size} must exceed n = {n}")
        if self.sample_set_size is not None and self.sample_set_size > ctx.order:
            raise ValueError("sample set larger than the field")

    def draw(self, ctx: ExtCtx, rng: random.Random):
        if self.sample_set_size is None:
            return ctx.element([rng.randrange(ctx.p) for _ in range(ctx.d)])
        # S = the first |S| elements in base-p coefficient order
        k = rng.randrange(self.sample_set_size)
        cs = []
        for _ in range(ctx.d):
            k, c = divmod(k, ctx.p)
            cs.append(c)
        return ctx.element(cs)


def sample_invertible(space: Subspace, cfg: SampleConfig, rng: random.Random):
    """Draw random ``S``-combinations until one is invertible.

    Returns ``(matrix, inverse, coeffs, draws)``.
    """
    r, c = space.shape
    if r != c:
        raise ShapeMismatchError("need a space of square matrices")
    cfg.check(space.ctx, r)
    if space.dim == 0:
        raise NoInvertibleFound("the zero space has no invertible element", 0)
    for draw in range(1, cfg.max_tries + 1):
        coeffs = [cfg.draw(space.ctx, rng) for _ in range(space.dim)]
        m = space.combine(coeffs)
        try:
            return m, m.inv(), coeffs, draw
        except SingularMatrixError:
            continue
    raise NoInvertibleFound(f"no invertible element after {cfg.max_tries} draws", cfg.max_tries)


def random_invertible_in(space: Subspace, cfg: SampleConfig, rng: random.Random):
    """A random invertible ``S``-combination of the basis and its coefficients."""
    m, _, coeffs, _ = sample_invertible(space, cfg, rng)
    return m, coeffs


def sample_invertible_pair(pairs: Sequence[tuple[Matrix, Matrix]], which: int, cfg: SampleConfig,
                           rng: random.Random):
    """Random combination ``(x, y)`` of basis pairs with component ``which`` invertible.

    Returns ``(x, y, inverse of the chosen component, draws)``.
    """
    if not pairs:
        raise NoInvertibleFound("the solution space is zero", 0)
    ctx = pairs[0][0].ctx
    n = pairs[0][0].n_rows
    cfg.check(ctx, n)
    for draw in range(1, cfg.max_tries + 1):
        coeffs = [cfg.draw(ctx, rng) for _ in pairs]
        x = _combine_mats(ctx, coeffs, [p[0] for p in pairs])
        y = _combine_mats(ctx, coeffs, [p[1] for p in pairs])
        try:
            return x, y, (x, y)[which].inv(), draw
        except SingularMatrixError:
            continue
    raise NoInvertibleFound(f"no invertible element after {cfg.max_tries} draws", cfg.max_tries)


def _combine_mats(ctx, coeffs, mats: Sequence[Matrix]) -> Matrix:
    r, c = mats[0].shape
    return Matrix.from_vec(ctx, _lincomb(ctx, coeffs, [m.vec() for m in mats]), r, c)
