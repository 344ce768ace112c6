"""Braid groups in Garside left normal form.

A braid is ``Delta^inf * A_{p_1} ... A_{p_r}`` where each ``A_p`` is the
positive permutation braid of ``p`` and consecutive factors are
left-weighted.  Permutations are 0-indexed image tuples; composition is
``(p * q)(k) = p(q(k))`` so that ``sigma_i -> s_i`` is a homomorphism.

Conventions:

* starting set ``S(p) = {i : p^-1(i) > p^-1(i+1)}`` (``sigma_i`` is a prefix),
* finishing set ``F(p) = {i : p(i) > p(i+1)}`` (``sigma_i`` is a suffix),
* ``(p, q)`` is left-weighted iff ``S(q)`` is a subset of ``F(p)``,
* ``Delta X = tau(X) Delta`` with ``tau(p) = w p w`` and ``w(k) = N-1-k``.

Generator indices in words and in the public API are 1-based.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "IndexOutOfRange",
    "StrandMismatch",
    "Perm",
    "Braid",
    "Interval",
    "identity_braid",
    "delta_power",
    "generator",
    "braid_from_word",
    "braid_mul",
    "braid_inv",
    "braid_conj",
    "braid_pow",
    "braid_interval",
    "central_decompose",
    "random_word",
    "random_braid",
    "perm_to_word",
    "braid_to_positive_word",
    "is_left_weighted",
    "evaluate_word",
]

Perm = tuple[int, ...]
Word = list[tuple[int, int]]


class IndexOutOfRange(ValueError):
    pass


class StrandMismatch(ValueError):
    pass


# -- permutations -------------------------------------------------------------

def _compose(p: Perm, q: Perm) -> Perm:
    return tuple(p[k] for k in q)


def _inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for k, v in enumerate(p):
        inv[v] = k
    return tuple(inv)


@lru_cache(maxsize=None)
def _omega(N: int) -> Perm:
    return tuple(range(N - 1, -1, -1))


def _tau(p: Perm) -> Perm:
    N = len(p)
    return tuple(N - 1 - p[N - 1 - k] for k in range(N))


def _identity(N: int) -> Perm:
    return tuple(range(N))


def _finishing(p: Perm) -> set[int]:
    return {i for i in range(len(p) - 1) if p[i] > p[i + 1]}


def _starting(p: Perm) -> set[int]:
    return _finishing(_inverse(p))


def _right_mul_s(p: Perm, i: int) -> Perm:
    """``p * s_i``: swap positions i, i+1."""
    q = list(p)
    q[i], q[i + 1] = q[i + 1], q[i]
    return tuple(q)


def _left_mul_s(p: Perm, i: int) -> Perm:
    """``s_i * p``: swap the values i, i+1."""
    return tuple(i + 1 if v == i else i if v == i + 1 else v for v in p)


def is_left_weighted(p: Perm, q: Perm) -> bool:
    return _starting(q) <= _finishing(p)


def _make_left_weighted(p: Perm, q: Perm) -> tuple[Perm, Perm]:
    while True:
        extra = _starting(q) - _finishing(p)
        if not extra:
            return p, q
        i = min(extra)
        p = _right_mul_s(p, i)
        q = _left_mul_s(q, i)


def perm_to_word(p: Perm) -> list[int]:
    """A reduced positive word (1-based indices) whose permutation braid is ``A_p``."""
    word = []
    while True:
        s = _starting(p)
        if not s:
            return word
        i = min(s)
        word.append(i + 1)
        p = _left_mul_s(p, i)


# -- braids -------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    def __contains__(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    @property
    def radius(self) -> int:
        return max(abs(self.lo), abs(self.hi))


@dataclass(frozen=True)
class Braid:
    """``Delta^inf * A_{factors[0]} * ...`` in left normal form."""

    N: int
    inf: int
    factors: tuple[Perm, ...] = ()

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("need at least 2 strands")

    @property
    def canonical_length(self) -> int:
        return len(self.factors)

    @property
    def sup(self) -> int:
        return self.inf + len(self.factors)

    def is_identity(self) -> bool:
        return self.inf == 0 and not self.factors

    def is_normal(self) -> bool:
        ident, omega = _identity(self.N), _omega(self.N)
        for p in self.factors:
            if len(p) != self.N or sorted(p) != list(ident) or p == ident or p == omega:
                return False
        return all(is_left_weighted(p, q) for p, q in zip(self.factors, self.factors[1:]))

    def __mul__(self, other: "Braid") -> "Braid":
        return braid_mul(self, other)

    def __invert__(self) -> "Braid":
        return braid_inv(self)

    def to_json(self) -> dict:
        return {"N": self.N, "inf": self.inf, "factors": [[v + 1 for v in p] for p in self.factors]}

    @classmethod
    def from_json(cls, obj: dict) -> "Braid":
        N = obj["N"]
        factors = tuple(tuple(v - 1 for v in p) for p in obj["factors"])
        b = cls(N, obj["inf"], factors)
        if not b.is_normal():
            raise ValueError("factors are not a left normal form")
        return b


def identity_braid(N: int) -> Braid:
    return Braid(N, 0, ())


def delta_power(N: int, k: int) -> Braid:
    return Braid(N, k, ())


def _append(factors: list[Perm], q: Perm, ident: Perm) -> None:
    """Append a simple factor and restore left-weightedness right to left."""
    if q == ident:
        return
    factors.append(q)
    for k in range(len(factors) - 1, 0, -1):
        p, q = factors[k - 1], factors[k]
        p2, q2 = _make_left_weighted(p, q)
        if p2 == p:
            break
        factors[k - 1], factors[k] = p2, q2
    # a fully absorbed factor can only be the last one
    if factors[-1] == ident:
        factors.pop()


def _normalize(N: int, inf: int, factors: Iterable[Perm]) -> Braid:
    ident, omega = _identity(N), _omega(N)
    out: list[Perm] = []
    for q in factors:
        _append(out, q, ident)
    lead = 0
    while lead < len(out) and out[lead] == omega:
        lead += 1
    return Braid(N, inf + lead, tuple(out[lead:]))


def _check_same(a: Braid, b: Braid):
    if a.N != b.N:
        raise StrandMismatch(f"B_{a.N} vs B_{b.N}")


def braid_mul(a: Braid, b: Braid) -> Braid:
    _check_same(a, b)
    # Delta^i P Delta^j Q = Delta^(i+j) tau^j(P) Q
    left = a.factors if b.inf % 2 == 0 else tuple(_tau(p) for p in a.factors)
    ident, omega = _identity(a.N), _omega(a.N)
    out = list(left)
    for q in b.factors:
        _append(out, q, ident)
    lead = 0
    while lead < len(out) and out[lead] == omega:
        lead += 1
    return Braid(a.N, a.inf + b.inf + lead, tuple(out[lead:]))


def braid_inv(a: Braid) -> Braid:
    # A_p^-1 = Delta^-1 A_{w p^-1}; push every Delta to the left through tau.
    N, r = a.N, len(a.factors)
    omega = _omega(N)
    out = []
    for k in range(r - 1, -1, -1):
        q = _compose(omega, _inverse(a.factors[k]))
        # Delta exponents to the right of this factor: -(i + k)
        if (a.inf + k) % 2:
            q = _tau(q)
        out.append(q)
    return _normalize(N, -a.inf - r, out)


def braid_conj(g: Braid, x: Braid) -> Braid:
    """``g^x = x^-1 g x``."""
    _check_same(g, x)
    return braid_mul(braid_mul(braid_inv(x), g), x)


def braid_pow(a: Braid, e: int) -> Braid:
    base = a if e >= 0 else braid_inv(a)
    result = identity_braid(a.N)
    for _ in range(abs(e)):
        result = braid_mul(result, base)
    return result


def braid_interval(x: Braid) -> Interval:
    return Interval(x.inf, x.sup)


def central_decompose(x: Braid) -> tuple[int, Braid]:
    """``x = Delta^(2j) * x~`` with ``inf(x~)`` in {0, 1}."""
    r = x.inf % 2
    return (x.inf - r) // 2, Braid(x.N, r, x.factors)


@lru_cache(maxsize=None)
def generator(N: int, j: int, sign: int = 1) -> Braid:
    """``sigma_j^sign`` (1-based ``j``)."""
    if not 1 <= j <= N - 1:
        raise IndexOutOfRange(f"generator {j} not in [1, {N - 1}]")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    s = _right_mul_s(_identity(N), j - 1)
    if sign == 1:
        return _normalize(N, 0, [s])
    return _normalize(N, -1, [_compose(_omega(N), s)])


def braid_from_word(N: int, word: Sequence[tuple[int, int]]) -> Braid:
    result = identity_braid(N)
    for j, sign in word:
        result = braid_mul(result, generator(N, j, sign))
    return result


def braid_to_positive_word(x: Braid) -> tuple[int, list[int]]:
    """``(inf, word)`` with ``x = Delta^inf * sigma_word``."""
    return x.inf, [j for p in x.factors for j in perm_to_word(p)]


def evaluate_word(word: Sequence[tuple[int, int]], gens: Sequence, mul, inv, one):
    """Evaluate a word over abstract generators ``gens`` (1-based letters)."""
    result = one
    for j, sign in word:
        g = gens[j - 1]
        result = mul(result, g if sign == 1 else inv(g))
    return result


# -- sampling -----------------------------------------------------------------

def random_word(k: int, m: int, rng: random.Random, *, exact: bool = False) -> Word:
    """Freely reduced word over ``{1..k} x {+1,-1}``.

    Default: ``m`` i.i.d. uniform letters, then free reduction (length <= m).
    ``exact=True`` samples a uniform non-backtracking word of length exactly m.
    """
    if k < 1 or m < 0:
        raise ValueError("need k >= 1 and m >= 0")
    word: Word = []
    if exact:
        for _ in range(m):
            while True:
                letter = (rng.randrange(1, k + 1), rng.choice((1, -1)))
                if not word or word[-1] != (letter[0], -letter[1]):
                    break
            word.append(letter)
        return word
    for _ in range(m):
        letter = (rng.randrange(1, k + 1), rng.choice((1, -1)))
        if word and word[-1] == (letter[0], -letter[1]):
            word.pop()
        else:
            word.append(letter)
    return word


def random_perm(N: int, rng: random.Random) -> Perm:
    p = list(range(N))
    rng.shuffle(p)
    return tuple(p)


def random_braid(N: int, ell: int, rng: random.Random, inf: int = 0) -> Braid:
    """``Delta^inf`` times ``ell`` uniform permutation braids.

    The result lies in ``[inf, inf + ell]``, so its canonical length is at most ``ell``.
    """
    return _normalize(N, inf, [random_perm(N, rng) for _ in range(ell)])
