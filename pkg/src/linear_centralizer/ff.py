"""Prime fields and extension fields ``Z_p[t]/<f(t)>``.

Field elements are ``flint.fq_default`` values: immutable, hashable, and
closed under ``+ - * /``.  The modulus ``f`` is always chosen here (our own
Miller-Rabin and distinct-degree irreducibility test); flint only supplies
the element arithmetic.

Coefficient vectors are stored least-significant first.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import flint

__all__ = [
    "EvenPrimeError",
    "NotPrimeError",
    "PrimeCtx",
    "ExtCtx",
    "is_probable_prime",
    "next_prime",
    "is_irreducible",
    "make_ext_ctx",
    "prime_field",
    "field_arith",
    "centered_lift",
    "sample_uniform",
]

MR_ROUNDS = 64

_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151,
    157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233,
)


class EvenPrimeError(ValueError):
    """p = 2 was supplied; the LK coefficient ring needs 1/2."""


class NotPrimeError(ValueError):
    pass


def is_probable_prime(n: int, rounds: int = MR_ROUNDS) -> bool:
    """Miller-Rabin with ``rounds`` pseudo-random bases.

    Bases come from an RNG seeded by ``n`` so the answer is reproducible.
    """
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(n)
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest probable prime strictly greater than ``n``."""
    c = n + 1
    if c <= 2:
        return 2
    if c % 2 == 0:
        c += 1
    while not is_probable_prime(c):
        c += 2
    return c


@dataclass(frozen=True)
class PrimeCtx:
    p: int

    def __post_init__(self):
        if self.p == 2:
            raise EvenPrimeError("p = 2: the coefficient ring requires 2 to be invertible")
        if not is_probable_prime(self.p):
            raise NotPrimeError(f"{self.p} is not prime")

    @property
    def half(self) -> int:
        return (self.p - 1) // 2


def centered_lift(ctx: PrimeCtx | int, r: int) -> int:
    """The representative of ``r`` in ``[-(p-1)/2, (p-1)/2]``."""
    p = ctx.p if isinstance(ctx, PrimeCtx) else ctx
    r %= p
    return r - p if r > (p - 1) // 2 else r


# -- polynomials over Z_p ---------------------------------------------------

def _poly_ring(p: int):
    return flint.fmpz_mod_poly_ctx(p)


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Distinct-degree test: ``f`` (monic, low-first) has no factor in common
    with ``t^(p^i) - t`` for ``1 <= i <= deg(f)/2``."""
    d = len(f) - 1
    if d < 1 or f[-1] % p != 1:
        raise ValueError("f must be monic of degree >= 1")
    if d == 1:
        return True
    R = _poly_ring(p)
    fp = R(list(f))
    t = R([0, 1])
    frob = h = t.pow_mod(p, fp)
    for i in range(1, d // 2 + 1):
        if i > 1:
            # t^(p^i) = h_{i-1}(t^p) mod f
            h = h.compose_mod(frob, fp)
        g = (h - t).gcd(fp)
        if g.degree() > 0:
            return False
    return True


# -- extension field context ------------------------------------------------

@dataclass(frozen=True, eq=False)
class ExtCtx:
    """The finite field ``Z_p[t]/<f(t)>`` of order ``p**d``."""

    prime: PrimeCtx
    f: tuple[int, ...]
    _fq: object = field(repr=False, compare=False)

    @property
    def p(self) -> int:
        return self.prime.p

    @property
    def d(self) -> int:
        return len(self.f) - 1

    @property
    def order(self) -> int:
        return self.p ** self.d

    def __eq__(self, other):
        return isinstance(other, ExtCtx) and self.p == other.p and self.f == other.f

    def __hash__(self):
        return hash((self.p, self.f))

    def __repr__(self):
        return f"ExtCtx(p={self.p:#x}, d={self.d})"

    # element construction
    def element(self, coeffs: int | Iterable[int]):
        if isinstance(coeffs, int):
            return self._fq(coeffs % self.p)
        cs = [c % self.p for c in coeffs]
        if len(cs) > self.d:
            raise ValueError(f"expected at most {self.d} coefficients")
        if self.d == 1:
            return self._fq(cs[0] if cs else 0)
        return self._fq(cs)

    def __call__(self, value):
        return self.element(value)

    @property
    def zero(self):
        return self._fq.zero()

    @property
    def one(self):
        return self._fq.one()

    @property
    def t(self):
        """The class of ``t`` modulo ``f``."""
        if self.d == 1:
            return self.element(-self.f[0])
        return self._fq.gen()

    def coeffs(self, x) -> tuple[int, ...]:
        """Coefficient vector of ``x`` with exactly ``d`` residues."""
        cs = [int(c) for c in x.to_list()]
        return tuple(cs + [0] * (self.d - len(cs)))

    # JSON
    def to_json(self) -> dict:
        return {"p": hex(self.p), "f": [hex(c) for c in self.f]}

    @classmethod
    def from_json(cls, obj: dict) -> "ExtCtx":
        p = int(obj["p"], 16)
        f = tuple(int(c, 16) for c in obj["f"])
        return _build_ctx(p, f)

    def element_to_json(self, x) -> list[str]:
        return [hex(c) for c in self.coeffs(x)]

    def element_from_json(self, obj: Sequence[str]):
        if len(obj) != self.d:
            raise ValueError(f"field element must have {self.d} coefficients, got {len(obj)}")
        return self.element(int(c, 16) for c in obj)


@lru_cache(maxsize=64)
def _build_ctx(p: int, f: tuple[int, ...]) -> ExtCtx:
    prime = PrimeCtx(p)
    if f[-1] != 1:
        raise ValueError("f must be monic")
    if len(f) == 2:
        fq = flint.fq_default_ctx(p, 1)
    else:
        fq = flint.fq_default_ctx(modulus=_poly_ring(p)(list(f)), check_prime=False, check_modulus=False)
    return ExtCtx(prime, tuple(f), fq)


def _random_monic(p: int, d: int, rng: random.Random, sparse: bool) -> tuple[int, ...]:
    if not sparse or d < 3:
        return tuple(rng.randrange(p) for _ in range(d)) + (1,)
    # t^d + a t^j + b
    cs = [0] * d + [1]
    cs[0] = rng.randrange(1, p)
    cs[rng.randrange(1, d)] = rng.randrange(1, p)
    return tuple(cs)


def make_ext_ctx(p: int, d: int, rng: random.Random | None = None, *, sparse: bool = False,
                 max_tries: int = 100_000) -> ExtCtx:
    """Build ``Z_p[t]/<f>`` for an irreducible monic ``f`` of degree ``d``.

    ``f`` is found by rejection sampling.  With ``sparse=True`` candidates are
    trinomials ``t^d + a t^j + b``, which flint multiplies roughly twice as fast.
    """
    PrimeCtx(p)
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = rng if rng is not None else random.Random()
    for _ in range(max_tries):
        f = _random_monic(p, d, rng, sparse)
        if d > 1 and f[0] == 0:
            continue
        if is_irreducible(f, p):
            return _build_ctx(p, f)
    raise RuntimeError(f"no irreducible polynomial found in {max_tries} tries")


def ext_ctx_from_poly(p: int, f: Sequence[int]) -> ExtCtx:
    """Context for a caller-chosen modulus; irreducibility is checked."""
    f = tuple(c % p for c in f)
    if not is_irreducible(f, p):
        raise ValueError("f is reducible over Z_p")
    return _build_ctx(p, f)


def prime_field(p: int) -> ExtCtx:
    """``Z_p`` as a degree-1 context (modulus ``t``)."""
    return _build_ctx(p, (0, 1))


def sample_uniform(ctx: ExtCtx, rng: random.Random):
    return ctx.element([rng.randrange(ctx.p) for _ in range(ctx.d)])


def field_arith(ctx: ExtCtx, op: str, *operands):
    """Dispatch one of ``add, sub, mul, neg, inv`` on elements of ``ctx``."""
    if op == "add":
        a, b = operands
        return a + b
    if op == "sub":
        a, b = operands
        return a - b
    if op == "mul":
        a, b = operands
        return a * b
    if op == "neg":
        (a,) = operands
        return -a
    if op == "inv":
        (a,) = operands
        if a.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return a ** -1
    raise ValueError(f"unknown field op {op!r}")
