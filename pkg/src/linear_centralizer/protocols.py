"""Honest-party simulators for the five key exchanges.

Each simulator returns a :class:`SimulatedInstance` holding the public
transcript, every secret, and the shared key; both parties' key
computations are carried out and compared before returning.

Commuting subgroups come from disjoint strand blocks in ``B_N`` and from
block-diagonal matrices (conjugated by a hidden random basis change) in
``GL_n``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Sequence

from .braid import (
    Braid,
    braid_inv,
    braid_mul,
    generator,
    identity_braid,
    random_word,
    _normalize,
)
from .ff import ExtCtx, sample_uniform
from .linalg import Matrix

__all__ = [
    "PROTOCOLS",
    "GroupCtx",
    "SimulatedInstance",
    "InstanceError",
    "random_invertible",
    "simulate",
    "simulate_commutator",
    "simulate_centralizer",
    "simulate_braid_dh",
    "simulate_double_coset",
    "simulate_stickel",
    "check_promises",
]

PROTOCOLS = ("commutator", "centralizer", "braid-dh", "double-coset", "stickel")


class InstanceError(ValueError):
    """Malformed instance data (bad schema, wrong shapes, unknown protocol)."""


# -- groups --------------------------------------------------------------------

@dataclass(frozen=True)
class GroupCtx:
    """``B_N`` (``kind="braid"``) or ``GL_n`` over ``field`` (``kind="matrix"``)."""

    kind: str
    N: int = 0
    n: int = 0
    field: ExtCtx | None = None

    def __post_init__(self):
        if self.kind == "braid":
            if self.N < 2:
                raise InstanceError("braid groups need N >= 2")
        elif self.kind == "matrix":
            if self.n < 1 or self.field is None:
                raise InstanceError("matrix groups need n >= 1 and a field")
        else:
            raise InstanceError(f"unknown group kind {self.kind!r}")

    @classmethod
    def braid(cls, N: int) -> "GroupCtx":
        return cls("braid", N=N)

    @classmethod
    def matrix(cls, field: ExtCtx, n: int) -> "GroupCtx":
        return cls("matrix", n=n, field=field)

    @property
    def is_braid(self) -> bool:
        return self.kind == "braid"

    def one(self):
        return identity_braid(self.N) if self.is_braid else Matrix.identity(self.field, self.n)

    def mul(self, a, b):
        return braid_mul(a, b) if self.is_braid else a @ b

    def inv(self, a):
        return braid_inv(a) if self.is_braid else a.inv()

    def prod(self, *xs):
        result = xs[0]
        for x in xs[1:]:
            result = self.mul(result, x)
        return result

    def conj(self, g, x):
        """``g^x = x^-1 g x``."""
        return self.prod(self.inv(x), g, x)

    def commute(self, a, b) -> bool:
        return self.mul(a, b) == self.mul(b, a)

    def word(self, word: Sequence[tuple[int, int]], gens: Sequence):
        invs: dict[int, Any] = {}
        result = self.one()
        for j, sign in word:
            if sign == 1:
                g = gens[j - 1]
            else:
                if j not in invs:
                    invs[j] = self.inv(gens[j - 1])
                g = invs[j]
            result = self.mul(result, g)
        return result

    def is_invertible(self, x) -> bool:
        return True if self.is_braid else x.is_invertible()

    # JSON
    def to_json(self) -> dict:
        if self.is_braid:
            return {"kind": "braid", "N": self.N}
        return {"kind": "matrix", "n": self.n, "field": self.field.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "GroupCtx":
        if obj.get("kind") == "braid":
            return cls.braid(int(obj["N"]))
        if obj.get("kind") == "matrix":
            return cls.matrix(ExtCtx.from_json(obj["field"]), int(obj["n"]))
        raise InstanceError(f"unknown group {obj!r}")

    def element_to_json(self, x):
        return x.to_json()

    def element_from_json(self, obj):
        if self.is_braid:
            b = Braid.from_json(obj)
            if b.N != self.N:
                raise InstanceError("braid has the wrong strand count")
            return b
        m = Matrix.from_json(self.field, obj)
        if m.shape != (self.n, self.n):
            raise InstanceError("matrix has the wrong shape")
        return m


# -- instances -----------------------------------------------------------------

# field kinds: "elem" group element, "list" list of elements, "word" list of
# (index, sign), "int", "scalar" field element
PUBLIC_SCHEMA: dict[str, dict[str, str]] = {
    "commutator": {"a_list": "list", "b_list": "list", "a_conj_list": "list", "b_conj_list": "list"},
    "centralizer": {"g": "elem", "g_list": "list", "h_list": "list", "u": "elem", "v": "elem"},
    "braid-dh": {"g": "elem", "g_a": "elem", "g_b": "elem", "a_gens": "list", "b_gens": "list"},
    "double-coset": {"g": "elem", "u": "elem", "v": "elem", "a1_gens": "list", "a2_gens": "list",
                     "b1_gens": "list", "b2_gens": "list"},
    "stickel": {"a": "elem", "b": "elem", "g": "elem", "u": "elem", "v": "elem"},
}

SECRET_SCHEMA: dict[str, dict[str, str]] = {
    "commutator": {"v": "word", "w": "word", "a": "elem", "b": "elem"},
    "centralizer": {"a1": "elem", "a2": "elem", "b1": "elem", "b2": "elem", "a2_word": "word", "b1_word": "word"},
    "braid-dh": {"a": "elem", "b": "elem", "a_word": "word", "b_word": "word"},
    "double-coset": {"a1": "elem", "a2": "elem", "b1": "elem", "b2": "elem",
                     "a1_word": "word", "a2_word": "word", "b1_word": "word", "b2_word": "word"},
    "stickel": {"a1": "elem", "a2": "elem", "b1": "elem", "b2": "elem",
                "e1": "int", "e2": "int", "f1": "int", "f2": "int", "lam": "scalar", "mu": "scalar"},
}


@dataclass
class SimulatedInstance:
    protocol: str
    group: GroupCtx
    public: dict[str, Any]
    secrets: dict[str, Any] | None
    shared_key: Any | None
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def has_secrets(self) -> bool:
        return self.secrets is not None and self.shared_key is not None

    def attacker_view(self) -> "SimulatedInstance":
        return SimulatedInstance(self.protocol, self.group, dict(self.public), None, None, dict(self.params))

    def to_json(self, with_secrets: bool = True) -> dict:
        out = {
            "protocol": self.protocol,
            "group": self.group.to_json(),
            "public": _encode(self.group, PUBLIC_SCHEMA[self.protocol], self.public),
            "params": self.params,
        }
        if with_secrets and self.has_secrets:
            out["secrets"] = _encode(self.group, SECRET_SCHEMA[self.protocol], self.secrets)
            out["shared_key"] = self.group.element_to_json(self.shared_key)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SimulatedInstance":
        try:
            protocol = obj["protocol"]
            if protocol not in PROTOCOLS:
                raise InstanceError(f"unknown protocol {protocol!r}")
            group = GroupCtx.from_json(obj["group"])
            public = _decode(group, PUBLIC_SCHEMA[protocol], obj["public"])
            secrets = shared = None
            if "secrets" in obj:
                secrets = _decode(group, SECRET_SCHEMA[protocol], obj["secrets"])
                shared = group.element_from_json(obj["shared_key"])
            return cls(protocol, group, public, secrets, shared, dict(obj.get("params", {})))
        except InstanceError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InstanceError(f"malformed instance: {exc}") from exc


def _encode(group: GroupCtx, schema: dict[str, str], values: dict) -> dict:
    out = {}
    for key, kind in schema.items():
        v = values[key]
        if kind == "elem":
            out[key] = group.element_to_json(v)
        elif kind == "list":
            out[key] = [group.element_to_json(x) for x in v]
        elif kind == "word":
            out[key] = [[j, s] for j, s in v]
        elif kind == "scalar":
            out[key] = group.field.element_to_json(v)
        else:
            out[key] = v
    return out


def _decode(group: GroupCtx, schema: dict[str, str], obj: dict) -> dict:
    out = {}
    for key, kind in schema.items():
        v = obj[key]
        if kind == "elem":
            out[key] = group.element_from_json(v)
        elif kind == "list":
            out[key] = [group.element_from_json(x) for x in v]
        elif kind == "word":
            out[key] = [(int(j), int(s)) for j, s in v]
        elif kind == "scalar":
            out[key] = group.field.element_from_json(v)
        else:
            out[key] = int(v)
    return out


# -- sampling helpers -------------------------------------------------------------

def random_invertible(field: ExtCtx, n: int, rng: random.Random) -> Matrix:
    while True:
        m = Matrix.random(field, n, n, rng)
        if m.is_invertible():
            return m


def _nonzero(field: ExtCtx, rng: random.Random):
    while True:
        x = sample_uniform(field, rng)
        if not x.is_zero():
            return x


class _Blocks:
    """``Q diag(X, Y) Q^-1`` with a hidden random ``Q``; the two blocks commute."""

    def __init__(self, field: ExtCtx, n: int, rng: random.Random):
        if n < 2:
            raise InstanceError("block constructions need n >= 2")
        self.field, self.n = field, n
        self.n1 = n // 2
        self.n2 = n - self.n1
        self.q = random_invertible(field, n, rng)
        self.qinv = self.q.inv()

    def emb(self, x: Matrix | None, y: Matrix | None, lam=None, mu=None) -> Matrix:
        F = self.field
        x = x if x is not None else Matrix.scalar(F, self.n1, lam if lam is not None else F.one)
        y = y if y is not None else Matrix.scalar(F, self.n2, mu if mu is not None else F.one)
        z = F.zero
        rows = [list(r) + [z] * self.n2 for r in x.rows] + [[z] * self.n1 + list(r) for r in y.rows]
        return self.q @ Matrix(F, rows) @ self.qinv

    def lower(self, rng: random.Random) -> Matrix:
        return self.emb(random_invertible(self.field, self.n1, rng), None, mu=_nonzero(self.field, rng))

    def upper(self, rng: random.Random) -> Matrix:
        return self.emb(None, random_invertible(self.field, self.n2, rng), lam=_nonzero(self.field, rng))


def _block_perm(N: int, lo: int, hi: int, rng: random.Random) -> tuple[int, ...]:
    """Uniform permutation of strands ``lo..hi-1``, identity elsewhere."""
    block = list(range(lo, hi))
    rng.shuffle(block)
    return tuple(range(lo)) + tuple(block) + tuple(range(hi, N))


def _block_braid(N: int, lo: int, hi: int, ell: int, rng: random.Random, inf: int) -> Braid:
    """``Delta^inf`` times ``ell`` permutation braids supported on one strand block."""
    return _normalize(N, inf, [_block_perm(N, lo, hi, rng) for _ in range(ell)])


def _split(N: int) -> tuple[list[int], list[int]]:
    """Generator indices acting on the lower and upper strand blocks."""
    h = N // 2
    return list(range(1, h)), list(range(h + 1, N))


def _random_inf(rng: random.Random, inf_range: tuple[int, int]) -> int:
    return rng.randint(*inf_range)


def _secret_word(k: int, m: int, rng: random.Random):
    return random_word(k, m, rng, exact=True)


def _params(**kw) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in kw.items()}


# -- simulators ----------------------------------------------------------------------

def simulate_commutator(group: GroupCtx, k: int, m: int, rng: random.Random, *, ell: int = 2,
                        inf_range: tuple[int, int] = (0, 0), seed: int | None = None) -> SimulatedInstance:
    """Commutator exchange: key ``a^-1 b^-1 a b``.

    Braid generators are ``Delta^i`` times ``ell`` random permutation braids
    with ``i`` uniform in ``inf_range``; matrix generators are uniform in GL_n.
    """
    if k < 1 or m < 0:
        raise ValueError("need k >= 1 and m >= 0")
    if group.is_braid:
        def gen():
            return _normalize(group.N, _random_inf(rng, inf_range),
                              [tuple(rng.sample(range(group.N), group.N)) for _ in range(ell)])
    else:
        def gen():
            return random_invertible(group.field, group.n, rng)
    a_list = [gen() for _ in range(k)]
    b_list = [gen() for _ in range(k)]
    v = _secret_word(k, m, rng)
    w = _secret_word(k, m, rng)
    a = group.word(v, a_list)
    b = group.word(w, b_list)
    a_conj = [group.conj(x, b) for x in a_list]
    b_conj = [group.conj(x, a) for x in b_list]
    alice = group.mul(group.inv(a), group.word(v, a_conj))
    bob = group.mul(group.inv(group.word(w, b_conj)), b)
    key = group.prod(group.inv(a), group.inv(b), a, b)
    if not (alice == bob == key):
        raise AssertionError("commutator parties disagree")
    public = {"a_list": a_list, "b_list": b_list, "a_conj_list": a_conj, "b_conj_list": b_conj}
    secrets = {"v": v, "w": w, "a": a, "b": b}
    params = _params(k=k, m=m, ell=ell, inf_range=inf_range, seed=seed)
    return SimulatedInstance("commutator", group, public, secrets, key, params)


def simulate_centralizer(group: GroupCtx, k: int, m: int, rng: random.Random, *, ell: int = 2,
                         inf_range: tuple[int, int] = (0, 0), seed: int | None = None) -> SimulatedInstance:
    """Centralizer exchange: key ``a1 b1 g a2 b2``.

    ``a1`` and ``h_i`` live on the lower block, ``g_i`` and ``b2`` on the
    upper block; ``b1`` is a word in the ``g_i`` and ``a2`` a word in the ``h_i``.
    In ``B_N`` every block element is ``Delta^(2c)`` times ``ell`` block
    permutation braids, so its canonical length is at most ``ell``.
    """
    if k < 1 or m < 0:
        raise ValueError("need k >= 1 and m >= 0")
    if group.is_braid:
        N = group.N
        if N < 4:
            raise InstanceError("the braid centralizer exchange needs N >= 4")
        h = N // 2

        def even_inf():
            i = _random_inf(rng, inf_range)
            return i - (i % 2)

        def lower():
            return _block_braid(N, 0, h, ell, rng, even_inf())

        def upper():
            return _block_braid(N, h, N, ell, rng, even_inf())

        g = _normalize(N, _random_inf(rng, inf_range), [tuple(rng.sample(range(N), N)) for _ in range(ell)])
    else:
        blocks = _Blocks(group.field, group.n, rng)
        lower, upper = (lambda: blocks.lower(rng)), (lambda: blocks.upper(rng))
        g = random_invertible(group.field, group.n, rng)
    a1 = lower()
    b2 = upper()
    g_list = [upper() for _ in range(k)]
    h_list = [lower() for _ in range(k)]
    b1_word = _secret_word(k, m, rng)
    a2_word = _secret_word(k, m, rng)
    b1 = group.word(b1_word, g_list)
    a2 = group.word(a2_word, h_list)
    u = group.prod(a1, g, a2)
    v = group.prod(b1, g, b2)
    alice = group.prod(a1, v, a2)
    bob = group.prod(b1, u, b2)
    key = group.prod(a1, b1, g, a2, b2)
    if not (alice == bob == key):
        raise AssertionError("centralizer parties disagree")
    public = {"g": g, "g_list": g_list, "h_list": h_list, "u": u, "v": v}
    secrets = {"a1": a1, "a2": a2, "b1": b1, "b2": b2, "a2_word": a2_word, "b1_word": b1_word}
    params = _params(k=k, m=m, ell=ell, inf_range=inf_range, seed=seed)
    return SimulatedInstance("centralizer", group, public, secrets, key, params)


def _commuting_generators(group: GroupCtx, k: int, rng: random.Random):
    """Two generator lists whose elements commute pairwise."""
    if group.is_braid:
        if group.N < 4:
            raise InstanceError("commuting strand blocks need N >= 4")
        lo, hi = _split(group.N)
        return [generator(group.N, j) for j in lo], [generator(group.N, j) for j in hi]
    blocks = _Blocks(group.field, group.n, rng)
    return [blocks.lower(rng) for _ in range(k)], [blocks.upper(rng) for _ in range(k)]


def simulate_braid_dh(group: GroupCtx, m: int, rng: random.Random, *, k: int = 2, ell: int = 2,
                      inf_range: tuple[int, int] = (0, 0), seed: int | None = None) -> SimulatedInstance:
    """Diffie-Hellman conjugacy exchange: key ``g^(ab)`` with ``[A, B] = 1``."""
    a_gens, b_gens = _commuting_generators(group, k, rng)
    if group.is_braid:
        g = _normalize(group.N, _random_inf(rng, inf_range),
                       [tuple(rng.sample(range(group.N), group.N)) for _ in range(ell)])
    else:
        g = random_invertible(group.field, group.n, rng)
    a_word = _secret_word(len(a_gens), m, rng)
    b_word = _secret_word(len(b_gens), m, rng)
    a = group.word(a_word, a_gens)
    b = group.word(b_word, b_gens)
    g_a, g_b = group.conj(g, a), group.conj(g, b)
    alice = group.conj(g_b, a)
    bob = group.conj(g_a, b)
    key = group.conj(g, group.mul(a, b))
    if not (alice == bob == key):
        raise AssertionError("DH parties disagree")
    public = {"g": g, "g_a": g_a, "g_b": g_b, "a_gens": a_gens, "b_gens": b_gens}
    secrets = {"a": a, "b": b, "a_word": a_word, "b_word": b_word}
    params = _params(k=len(a_gens), m=m, ell=ell, inf_range=inf_range, seed=seed)
    return SimulatedInstance("braid-dh", group, public, secrets, key, params)


def simulate_double_coset(group: GroupCtx, m: int, rng: random.Random, *, k: int = 2, ell: int = 2,
                          inf_range: tuple[int, int] = (0, 0), seed: int | None = None) -> SimulatedInstance:
    """Double coset exchange: key ``a1 b1 g b2 a2`` with ``[A_i, B_i] = 1``."""
    a1_gens, b1_gens = _commuting_generators(group, k, rng)
    a2_gens, b2_gens = _commuting_generators(group, k, rng)
    if group.is_braid:
        g = _normalize(group.N, _random_inf(rng, inf_range),
                       [tuple(rng.sample(range(group.N), group.N)) for _ in range(ell)])
    else:
        g = random_invertible(group.field, group.n, rng)
    words = {name: _secret_word(len(gens), m, rng)
             for name, gens in (("a1_word", a1_gens), ("a2_word", a2_gens), ("b1_word", b1_gens), ("b2_word", b2_gens))}
    a1 = group.word(words["a1_word"], a1_gens)
    a2 = group.word(words["a2_word"], a2_gens)
    b1 = group.word(words["b1_word"], b1_gens)
    b2 = group.word(words["b2_word"], b2_gens)
    u = group.prod(a1, g, a2)
    v = group.prod(b1, g, b2)
    alice = group.prod(a1, v, a2)
    bob = group.prod(b1, u, b2)
    if alice != bob:
        raise AssertionError("double coset parties disagree")
    public = {"g": g, "u": u, "v": v, "a1_gens": a1_gens, "a2_gens": a2_gens, "b1_gens": b1_gens, "b2_gens": b2_gens}
    secrets = {"a1": a1, "a2": a2, "b1": b1, "b2": b2, **words}
    params = _params(k=len(a1_gens), m=m, ell=ell, inf_range=inf_range, seed=seed)
    return SimulatedInstance("double-coset", group, public, secrets, alice, params)


def simulate_stickel(group: GroupCtx, rng: random.Random, *, m: int = 16, seed: int | None = None) -> SimulatedInstance:
    """Stickel's exchange: ``u = lam a^e1 g b^f1``, ``v = mu a^e2 g b^f2``.

    Exponents are uniform in ``[1, m]``; ``lam, mu`` are nonzero scalars.
    """
    if group.is_braid:
        raise InstanceError("Stickel's exchange is defined over matrix groups")
    F, n = group.field, group.n
    a = random_invertible(F, n, rng)
    b = random_invertible(F, n, rng)
    g = random_invertible(F, n, rng)
    e1, e2, f1, f2 = (rng.randint(1, max(m, 1)) for _ in range(4))
    lam, mu = _nonzero(F, rng), _nonzero(F, rng)
    a1 = a.pow(e1).scale(lam)
    b1 = a.pow(e2).scale(mu)
    a2 = b.pow(f1)
    b2 = b.pow(f2)
    u = a1 @ g @ a2
    v = b1 @ g @ b2
    alice = a1 @ v @ a2
    bob = b1 @ u @ b2
    if alice != bob:
        raise AssertionError("Stickel parties disagree")
    public = {"a": a, "b": b, "g": g, "u": u, "v": v}
    secrets = {"a1": a1, "a2": a2, "b1": b1, "b2": b2, "e1": e1, "e2": e2, "f1": f1, "f2": f2, "lam": lam, "mu": mu}
    return SimulatedInstance("stickel", group, public, secrets, alice, _params(m=m, seed=seed))


def simulate(protocol: str, group: GroupCtx, rng: random.Random, *, k: int = 2, m: int = 2, ell: int = 2,
             inf_range: tuple[int, int] = (0, 0), seed: int | None = None) -> SimulatedInstance:
    """Dispatch by protocol name."""
    if protocol == "commutator":
        return simulate_commutator(group, k, m, rng, ell=ell, inf_range=inf_range, seed=seed)
    if protocol == "centralizer":
        return simulate_centralizer(group, k, m, rng, ell=ell, inf_range=inf_range, seed=seed)
    if protocol == "braid-dh":
        return simulate_braid_dh(group, m, rng, k=k, ell=ell, inf_range=inf_range, seed=seed)
    if protocol == "double-coset":
        return simulate_double_coset(group, m, rng, k=k, ell=ell, inf_range=inf_range, seed=seed)
    if protocol == "stickel":
        return simulate_stickel(group, rng, m=m, seed=seed)
    raise InstanceError(f"unknown protocol {protocol!r}")


# -- promise checks -------------------------------------------------------------------

def check_promises(inst: SimulatedInstance) -> list[str]:
    """Violated promises (empty when the instance is honest).

    Public-only checks always run; checks that need secrets run when the
    instance carries them.
    """
    G, P = inst.group, inst.public
    bad: list[str] = []
    elems = [x for key, kind in PUBLIC_SCHEMA[inst.protocol].items()
             for x in (P[key] if kind == "list" else [P[key]])]
    if not G.is_braid and not all(G.is_invertible(x) for x in elems):
        bad.append("public matrix not invertible")
    if G.is_braid and "ell" in inst.params and inst.protocol in ("commutator", "centralizer"):
        gens = P["a_list"] + P["b_list"] if inst.protocol == "commutator" else [P["g"], *P["g_list"], *P["h_list"]]
        if any(x.canonical_length > inst.params["ell"] for x in gens):
            bad.append("public generator longer than ell")
    proto = inst.protocol
    if proto in ("double-coset", "braid-dh"):
        pairs = ([(P["a_gens"], P["b_gens"])] if proto == "braid-dh"
                 else [(P["a1_gens"], P["b1_gens"]), (P["a2_gens"], P["b2_gens"])])
        for xs, ys in pairs:
            if not all(G.commute(x, y) for x in xs for y in ys):
                bad.append("generator subgroups do not commute")
    if proto == "stickel" and G.commute(P["a"], P["b"]):
        bad.append("a and b commute (degenerate instance)")
    if not inst.has_secrets:
        return bad
    S = inst.secrets
    if proto == "commutator":
        if G.word(S["v"], P["a_list"]) != S["a"] or G.word(S["w"], P["b_list"]) != S["b"]:
            bad.append("secret words do not evaluate to a, b")
        if [G.conj(x, S["b"]) for x in P["a_list"]] != P["a_conj_list"]:
            bad.append("a_i^b mismatch")
        if [G.conj(x, S["a"]) for x in P["b_list"]] != P["b_conj_list"]:
            bad.append("b_i^a mismatch")
        key = G.prod(G.inv(S["a"]), G.inv(S["b"]), S["a"], S["b"])
    elif proto == "centralizer":
        if not all(G.commute(S["a1"], x) for x in P["g_list"]):
            bad.append("a1 does not commute with g_list")
        if not all(G.commute(S["b2"], x) for x in P["h_list"]):
            bad.append("b2 does not commute with h_list")
        if G.word(S["b1_word"], P["g_list"]) != S["b1"] or G.word(S["a2_word"], P["h_list"]) != S["a2"]:
            bad.append("b1/a2 are not the declared words")
        if G.prod(S["a1"], P["g"], S["a2"]) != P["u"] or G.prod(S["b1"], P["g"], S["b2"]) != P["v"]:
            bad.append("u/v mismatch")
        key = G.prod(S["a1"], S["b1"], P["g"], S["a2"], S["b2"])
    elif proto == "braid-dh":
        if not G.commute(S["a"], S["b"]):
            bad.append("a and b do not commute")
        if G.conj(P["g"], S["a"]) != P["g_a"] or G.conj(P["g"], S["b"]) != P["g_b"]:
            bad.append("g^a/g^b mismatch")
        key = G.conj(P["g"], G.mul(S["a"], S["b"]))
    else:
        if proto == "stickel":
            for name, base in (("a1", P["a"]), ("b1", P["a"]), ("a2", P["b"]), ("b2", P["b"])):
                if not G.commute(S[name], base):
                    bad.append(f"{name} not in the algebra of its generator")
        if not G.commute(S["a1"], S["b1"]) or not G.commute(S["a2"], S["b2"]):
            bad.append("[A_i, B_i] != 1 on the secrets")
        if G.prod(S["a1"], P["g"], S["a2"]) != P["u"] or G.prod(S["b1"], P["g"], S["b2"]) != P["v"]:
            bad.append("u/v mismatch")
        key = G.prod(S["a1"], S["b1"], P["g"], S["b2"], S["a2"])
    if key != inst.shared_key:
        bad.append("shared key mismatch")
    return bad
