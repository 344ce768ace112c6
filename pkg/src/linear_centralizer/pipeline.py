"""Full attack chains on braid-group instances.

Each chain removes central ``Delta^2`` powers from the public data, picks a
field large enough for exact lifting, maps the public braids into
``GL_n(F)`` through the Lawrence-Krammer representation, runs the matrix
attack, and lifts the key's image back to ``Z[t, 1/t, 1/2]``.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

from .attacks import (
    DEFAULT_RETRIES,
    AttackReport,
    CentralizerPublic,
    CommutatorPublic,
    centralizer_attack,
    commutator_attack,
    dh_conjugacy_attack,
    double_coset_attack,
)
from .braid import Braid, braid_mul, central_decompose, delta_power
from .ff import ExtCtx, make_ext_ctx, next_prime
from .linalg import Matrix, SampleConfig
from .lkrep import LKMatrix, lk_dim, lk_lift, lk_of_braid, lk_of_braid_mod
from .protocols import SimulatedInstance

__all__ = [
    "AttackParams",
    "FullAttackResult",
    "interval_radius",
    "select_params",
    "field_for",
    "reduce_commutator_instance",
    "reduce_centralizer_instance",
    "run_full_commutator_attack",
    "run_full_centralizer_attack",
    "run_full_dh_attack",
    "run_full_double_coset_attack",
    "run_full_attack",
    "run_matrix_attack",
]


def interval_radius(protocol: str, m: int, ell: int) -> int:
    """``M`` such that the (reduced) key lies in ``[-M, M]``.

    Commutator: ``4m(ell+1)``.  Centralizer: ``(m+2)(4 ell+6)``.  For the
    Diffie-Hellman and double coset exchanges over Artin-generator words of
    length ``m`` and a reduced ``g`` in ``[0, ell+1]`` the key lies in
    ``[-4m, ell+1+4m]``.
    """
    if protocol == "commutator":
        return 4 * m * (ell + 1)
    if protocol == "centralizer":
        return (m + 2) * (4 * ell + 6)
    if protocol in ("braid-dh", "double-coset"):
        return 4 * m + ell + 1
    raise ValueError(f"no braid pipeline for {protocol!r}")


@dataclass(frozen=True)
class AttackParams:
    protocol: str
    N: int
    k: int
    m: int
    ell: int
    M: int
    p: int
    f: tuple[int, ...]

    @property
    def n(self) -> int:
        return lk_dim(self.N)

    @property
    def d(self) -> int:
        return len(self.f) - 1

    @property
    def ctx(self) -> ExtCtx:
        return ExtCtx.from_json({"p": hex(self.p), "f": [hex(c) for c in self.f]})

    def to_json(self) -> dict:
        return {"N": self.N, "k": self.k, "m": self.m, "ell": self.ell, "M": self.M,
                "p": hex(self.p), "f": [hex(c) for c in self.f]}


@lru_cache(maxsize=32)
def field_for(N: int, M: int) -> ExtCtx:
    """``p = nextprime(2^(N^2 (M+1) + 1))`` and a trinomial ``f`` of degree ``2M+1``.

    ``f`` is a deterministic function of ``(p, d)`` so that repeated runs and
    reports agree.
    """
    p = next_prime(1 << (N * N * (M + 1) + 1))
    d = 2 * M + 1
    return make_ext_ctx(p, d, random.Random(f"{p}:{d}"), sparse=True)


def select_params(protocol: str, N: int, k: int, m: int, ell: int, rng: random.Random | None = None) -> AttackParams:
    if min(N - 1, k, m, ell) < 1:
        raise ValueError("bounds must be >= 1 and N >= 2")
    M = interval_radius(protocol, m, ell)
    if rng is None:
        ctx = field_for(N, M)
    else:
        ctx = make_ext_ctx(next_prime(1 << (N * N * (M + 1) + 1)), 2 * M + 1, rng, sparse=True)
    return AttackParams(protocol, N, k, m, ell, M, ctx.p, ctx.f)


# -- infimum reduction ---------------------------------------------------------

def _shift(x: Braid, j: int) -> Braid:
    """``Delta^(2j) x``."""
    return Braid(x.N, x.inf + 2 * j, x.factors)


def reduce_commutator_instance(inst: SimulatedInstance) -> SimulatedInstance:
    """Replace each ``a_j = Delta^(2c) a~_j`` by ``a~_j`` (same for ``b_j``).

    The conjugates lose the same central factor; the key is unchanged.
    """
    P = inst.public
    out: dict[str, list] = {"a_list": [], "a_conj_list": [], "b_list": [], "b_conj_list": []}
    for name in ("a", "b"):
        for x, xc in zip(P[f"{name}_list"], P[f"{name}_conj_list"]):
            j, xt = central_decompose(x)
            out[f"{name}_list"].append(xt)
            out[f"{name}_conj_list"].append(_shift(xc, -j))
    secrets = None
    if inst.secrets is not None:
        G = inst.group
        secrets = dict(inst.secrets)
        secrets["a"] = G.word(secrets["v"], out["a_list"])
        secrets["b"] = G.word(secrets["w"], out["b_list"])
    return SimulatedInstance(inst.protocol, inst.group, out, secrets, inst.shared_key, dict(inst.params))


def reduce_centralizer_instance(inst: SimulatedInstance) -> tuple[SimulatedInstance, Braid]:
    """Reduce ``g, g_i, h_i, u, v`` to infimum 0 or 1.

    With ``g = Delta^(2l) g~``, ``u = Delta^(2i) u~``, ``v = Delta^(2j) v~``
    the reduced key ``K'`` satisfies ``K = K' * Delta^(2(i+j-l))``; that
    central correction is returned alongside the reduced instance.
    """
    P = inst.public
    lg, g = central_decompose(P["g"])
    iu, u = central_decompose(P["u"])
    jv, v = central_decompose(P["v"])
    public = {
        "g": g,
        "g_list": [central_decompose(x)[1] for x in P["g_list"]],
        "h_list": [central_decompose(x)[1] for x in P["h_list"]],
        "u": u,
        "v": v,
    }
    N = P["g"].N
    correction = delta_power(N, 2 * (iu + jv - lg))
    # reduced secrets differ from the originals by central factors; only the key is kept
    shared = None
    if inst.shared_key is not None:
        shared = braid_mul(inst.shared_key, delta_power(N, -2 * (iu + jv - lg)))
    reduced = SimulatedInstance(inst.protocol, inst.group, public, None, shared, dict(inst.params))
    return reduced, correction


# -- full chains -----------------------------------------------------------------

@dataclass
class FullAttackResult:
    lk_key: LKMatrix
    field_key: Matrix
    params: AttackParams
    report: AttackReport
    timings: dict[str, float] = field(default_factory=dict)
    verified: bool | None = None

    def to_json(self) -> dict:
        return {
            "protocol": self.params.protocol,
            "group": {"kind": "braid", "N": self.params.N},
            "params": self.params.to_json(),
            "key_lk": self.lk_key.to_json(),
            "key_field": self.field_key.to_json(),
            "draws": self.report.draws_used,
            "dims": dict(self.report.offline_dims),
            "verified": self.verified,
        }

    def timings_ms(self) -> dict[str, float]:
        return {k: round(v * 1000, 3) for k, v in self.timings.items()}


def _bound(inst: SimulatedInstance, name: str, given: int | None) -> int:
    if given is not None:
        return given
    try:
        return int(inst.params[name])
    except KeyError:
        raise ValueError(f"bound {name!r} missing from the instance; pass it explicitly") from None


def _image(x: Braid, ctx: ExtCtx) -> Matrix:
    return lk_of_braid_mod(x, ctx)


def _finish(params: AttackParams, ctx: ExtCtx, report: AttackReport, key_hat: Matrix, timings: dict,
            inst: SimulatedInstance, correction: Braid | None = None) -> FullAttackResult:
    t0 = time.perf_counter()
    lk_key = lk_lift(key_hat, params.M, params.N, ctx)
    field_key = key_hat
    if correction is not None and not correction.is_identity():
        lk_key = lk_key @ lk_of_braid(correction)
        field_key = key_hat @ lk_of_braid_mod(correction, ctx)
    timings["lift"] = time.perf_counter() - t0
    verified = None
    if inst.shared_key is not None:
        verified = lk_key == lk_of_braid(inst.shared_key)
    return FullAttackResult(lk_key, field_key, params, report, timings, verified)


def run_full_commutator_attack(inst: SimulatedInstance, rng: random.Random, *, k: int | None = None,
                               m: int | None = None, ell: int | None = None, params: AttackParams | None = None,
                               cfg: SampleConfig = SampleConfig(), retries: int = DEFAULT_RETRIES) -> FullAttackResult:
    """Reduce, map into ``GL_n(F)``, attack, lift: returns ``LK(a^-1 b^-1 a b)``."""
    N = inst.group.N
    k = k if k is not None else len(inst.public["a_list"])
    reduced = reduce_commutator_instance(inst)
    if params is None:
        params = select_params("commutator", N, k, _bound(inst, "m", m), _bound(inst, "ell", ell))
    ctx = params.ctx
    t0 = time.perf_counter()
    P = reduced.public
    pub = CommutatorPublic(*(tuple(_image(x, ctx) for x in P[name])
                             for name in ("a_list", "b_list", "a_conj_list", "b_conj_list")))
    t1 = time.perf_counter()
    report = commutator_attack(pub, cfg, rng, retries=retries)
    timings = {"represent": t1 - t0, "offline": report.timings["offline"], "online": report.timings["online"]}
    return _finish(params, ctx, report, report.key, timings, inst)


def run_full_centralizer_attack(inst: SimulatedInstance, rng: random.Random, *, k: int | None = None,
                                m: int | None = None, ell: int | None = None, params: AttackParams | None = None,
                                cfg: SampleConfig = SampleConfig(), retries: int = DEFAULT_RETRIES) -> FullAttackResult:
    """Recover ``LK(K')`` for the reduced instance and multiply by ``LK(cd)``."""
    N = inst.group.N
    k = k if k is not None else len(inst.public["g_list"])
    reduced, correction = reduce_centralizer_instance(inst)
    if params is None:
        params = select_params("centralizer", N, k, _bound(inst, "m", m), _bound(inst, "ell", ell))
    ctx = params.ctx
    t0 = time.perf_counter()
    P = reduced.public
    pub = CentralizerPublic(_image(P["g"], ctx), _image(P["u"], ctx), _image(P["v"], ctx),
                            tuple(_image(x, ctx) for x in P["g_list"]), tuple(_image(x, ctx) for x in P["h_list"]))
    t1 = time.perf_counter()
    report = centralizer_attack(pub, cfg, rng, retries=retries)
    timings = {"represent": t1 - t0, "offline": report.timings["offline"], "online": report.timings["online"]}
    return _finish(params, ctx, report, report.key, timings, inst, correction)


def run_full_dh_attack(inst: SimulatedInstance, rng: random.Random, *, m: int | None = None,
                       ell: int | None = None, params: AttackParams | None = None,
                       cfg: SampleConfig = SampleConfig(), retries: int = DEFAULT_RETRIES) -> FullAttackResult:
    """``g = Delta^(2l) g~`` gives ``g^(ab) = Delta^(2l) g~^(ab)``."""
    P = inst.public
    N = inst.group.N
    lg, g = central_decompose(P["g"])
    if params is None:
        params = select_params("braid-dh", N, len(P["b_gens"]), _bound(inst, "m", m), _bound(inst, "ell", ell))
    ctx = params.ctx
    t0 = time.perf_counter()
    g_a, g_b = _shift(P["g_a"], -lg), _shift(P["g_b"], -lg)
    mats = [_image(x, ctx) for x in (g, g_a, g_b)]
    b_gens = [_image(x, ctx) for x in P["b_gens"]]
    t1 = time.perf_counter()
    report = dh_conjugacy_attack(*mats, b_gens, cfg, rng, retries=retries)
    timings = {"represent": t1 - t0, "offline": report.timings["offline"], "online": report.timings["online"]}
    return _finish(params, ctx, report, report.key, timings, inst, delta_power(N, 2 * lg))


def run_full_double_coset_attack(inst: SimulatedInstance, rng: random.Random, *, m: int | None = None,
                                 ell: int | None = None, params: AttackParams | None = None,
                                 cfg: SampleConfig = SampleConfig(),
                                 retries: int = DEFAULT_RETRIES) -> FullAttackResult:
    """``g = Delta^(2l) g~`` gives ``K = Delta^(2l) a1 b1 g~ b2 a2``."""
    P = inst.public
    N = inst.group.N
    lg, g = central_decompose(P["g"])
    if params is None:
        params = select_params("double-coset", N, len(P["b1_gens"]), _bound(inst, "m", m), _bound(inst, "ell", ell))
    ctx = params.ctx
    t0 = time.perf_counter()
    u, v = _shift(P["u"], -lg), _shift(P["v"], -lg)
    mats = [_image(x, ctx) for x in (g, u, v)]
    b1 = [_image(x, ctx) for x in P["b1_gens"]]
    b2 = [_image(x, ctx) for x in P["b2_gens"]]
    t1 = time.perf_counter()
    report = double_coset_attack(*mats, b1, b2, cfg, rng, retries=retries)
    timings = {"represent": t1 - t0, "offline": report.timings["offline"], "online": report.timings["online"]}
    return _finish(params, ctx, report, report.key, timings, inst, delta_power(N, 2 * lg))


def run_full_attack(inst: SimulatedInstance, rng: random.Random, **kw: Any) -> FullAttackResult:
    """Dispatch a braid-group instance to its chain."""
    if not inst.group.is_braid:
        raise ValueError("full chains take braid-group instances")
    runners = {
        "commutator": run_full_commutator_attack,
        "centralizer": run_full_centralizer_attack,
        "braid-dh": run_full_dh_attack,
        "double-coset": run_full_double_coset_attack,
    }
    if inst.protocol not in runners:
        raise ValueError(f"no braid pipeline for {inst.protocol!r}")
    return runners[inst.protocol](inst, rng, **kw)


def run_matrix_attack(inst: SimulatedInstance, rng: random.Random, cfg: SampleConfig = SampleConfig(),
                      *, retries: int = DEFAULT_RETRIES) -> tuple[AttackReport, bool | None]:
    """Run the engine matching a matrix-group instance; ``verified`` is None without a known key."""
    if inst.group.is_braid:
        raise ValueError("matrix engines take matrix-group instances")
    P = inst.public
    if inst.protocol == "commutator":
        pub = CommutatorPublic(*(tuple(P[name]) for name in ("a_list", "b_list", "a_conj_list", "b_conj_list")))
        report = commutator_attack(pub, cfg, rng, retries=retries)
    elif inst.protocol == "centralizer":
        pub = CentralizerPublic(P["g"], P["u"], P["v"], tuple(P["g_list"]), tuple(P["h_list"]))
        report = centralizer_attack(pub, cfg, rng, retries=retries)
    elif inst.protocol == "braid-dh":
        report = dh_conjugacy_attack(P["g"], P["g_a"], P["g_b"], P["b_gens"], cfg, rng, retries=retries)
    elif inst.protocol == "double-coset":
        report = double_coset_attack(P["g"], P["u"], P["v"], P["b1_gens"], P["b2_gens"], cfg, rng, retries=retries)
    elif inst.protocol == "stickel":
        # a1, b1 are polynomials in a; a2, b2 polynomials in b
        report = double_coset_attack(P["g"], P["u"], P["v"], [P["a"]], [P["b"]], cfg, rng, retries=retries)
    else:
        raise ValueError(f"unknown protocol {inst.protocol!r}")
    verified = None if inst.shared_key is None else report.key == inst.shared_key
    return report, verified
