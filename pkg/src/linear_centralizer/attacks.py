"""Linear centralizer attacks on key exchanges over matrix groups.

Every engine works on plain :class:`~linear_centralizer.linalg.Matrix`
inputs over any field context.  Sampling is Las Vegas: a failed batch of
draws is retried with fresh randomness up to ``retries`` times, and any key
that is returned is exact.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .linalg import (
    Matrix,
    NoInvertibleFound,
    SampleConfig,
    ShapeMismatchError,
    Subspace,
    centralizer_basis,
    double_centralizer_basis,
    sample_invertible,
    sample_invertible_pair,
    solve_conjugacy_system,
    solve_coupled_system,
)

__all__ = [
    "DEFAULT_RETRIES",
    "AttackFailed",
    "AttackReport",
    "CommutatorPublic",
    "CentralizerPublic",
    "commutator_offline",
    "commutator_online",
    "commutator_attack",
    "centralizer_attack",
    "dh_conjugacy_offline",
    "dh_conjugacy_attack",
    "double_coset_offline",
    "double_coset_attack",
]

DEFAULT_RETRIES = 16


class AttackFailed(RuntimeError):
    """Every retry ran out of draws; the instance is probably malformed."""

    def __init__(self, msg: str, draws: int):
        super().__init__(msg)
        self.draws = draws


@dataclass
class AttackReport:
    key: Matrix
    draws_used: int
    offline_dims: dict[str, int] = field(default_factory=dict)
    elapsed: float = 0.0
    timings: dict[str, float] = field(default_factory=dict)
    attempts: int = 1

    def summary(self) -> dict:
        return {"draws": self.draws_used, "attempts": self.attempts, "dims": dict(self.offline_dims)}


@dataclass(frozen=True)
class CommutatorPublic:
    a_list: tuple[Matrix, ...]
    b_list: tuple[Matrix, ...]
    a_conj_list: tuple[Matrix, ...]
    b_conj_list: tuple[Matrix, ...]

    def __post_init__(self):
        k = len(self.a_list)
        if k == 0 or not (len(self.b_list) == len(self.a_conj_list) == len(self.b_conj_list) == k):
            raise ValueError("all four lists must be nonempty and of equal length")
        n = self.a_list[0].n_rows
        if k > n * n:
            raise ValueError("k must not exceed n^2")
        for m in (*self.a_list, *self.b_list, *self.a_conj_list, *self.b_conj_list):
            if m.shape != (n, n):
                raise ShapeMismatchError("all matrices must be n x n")

    @property
    def n(self) -> int:
        return self.a_list[0].n_rows


@dataclass(frozen=True)
class CentralizerPublic:
    g: Matrix
    u: Matrix
    v: Matrix
    g_list: tuple[Matrix, ...]
    h_list: tuple[Matrix, ...]

    def __post_init__(self):
        n = self.g.n_rows
        for m in (self.g, self.u, self.v, *self.g_list, *self.h_list):
            if m.shape != (n, n):
                raise ShapeMismatchError("all matrices must be n x n")

    @property
    def n(self) -> int:
        return self.g.n_rows


def _with_retries(sampler: Callable[[], tuple], cfg: SampleConfig, retries: int):
    """Run ``sampler`` until it succeeds; returns ``(result, draws, attempts)``."""
    draws = 0
    for attempt in range(1, retries + 1):
        try:
            result = sampler()
        except NoInvertibleFound as exc:
            draws += exc.draws
            continue
        return result, draws + result[-1], attempt
    raise AttackFailed(f"no invertible element after {retries} x {cfg.max_tries} draws", draws)


# -- Commutator ----------------------------------------------------------------

def commutator_offline(b_list: Sequence[Matrix], n: int | None = None) -> Subspace:
    """``C(C(b_1, ..., b_k))``."""
    return double_centralizer_basis(b_list, n)


def commutator_online(pub: CommutatorPublic, dc: Subspace, cfg: SampleConfig, rng: random.Random,
                      *, retries: int = DEFAULT_RETRIES) -> AttackReport:
    """``x^-1 y^-1 x y`` with ``b_i x = x b_i^a`` and ``a_i y = y a_i^b``, ``y`` in ``dc``."""
    start = time.perf_counter()
    xs = solve_conjugacy_system(list(zip(pub.b_list, pub.b_conj_list)))
    ys = solve_conjugacy_system(list(zip(pub.a_list, pub.a_conj_list)), dc)
    solved = time.perf_counter()
    (x, xinv, _, dx), drx, atx = _with_retries(lambda: sample_invertible(xs, cfg, rng), cfg, retries)
    (y, yinv, _, dy), dry, aty = _with_retries(lambda: sample_invertible(ys, cfg, rng), cfg, retries)
    key = xinv @ yinv @ x @ y
    end = time.perf_counter()
    return AttackReport(
        key=key,
        draws_used=drx + dry,
        offline_dims={"double_centralizer": dc.dim, "x_space": xs.dim, "y_space": ys.dim},
        elapsed=end - start,
        timings={"solve": solved - start, "sample": end - solved},
        attempts=max(atx, aty),
    )


def commutator_attack(pub: CommutatorPublic, cfg: SampleConfig, rng: random.Random,
                      *, retries: int = DEFAULT_RETRIES) -> AttackReport:
    """Offline and online phases together; ``timings`` records both."""
    t0 = time.perf_counter()
    dc = commutator_offline(pub.b_list, pub.n)
    t1 = time.perf_counter()
    report = commutator_online(pub, dc, cfg, rng, retries=retries)
    report.timings["offline"] = t1 - t0
    report.timings["online"] = report.elapsed
    report.elapsed += t1 - t0
    return report


# -- Centralizer ---------------------------------------------------------------

def centralizer_attack(pub: CentralizerPublic, cfg: SampleConfig, rng: random.Random,
                       *, retries: int = DEFAULT_RETRIES) -> AttackReport:
    """Solve ``x g = u y`` over ``C(g_list) x C(C(h_list))`` and output ``x v y^-1``."""
    t0 = time.perf_counter()
    n = pub.n
    cx = centralizer_basis(pub.g_list, n) if pub.g_list else Subspace.full(pub.g.ctx, (n, n))
    # C(C(empty set)) = C(M_n) = scalars
    cy = (double_centralizer_basis(pub.h_list, n) if pub.h_list
          else Subspace.span_matrices([Matrix.identity(pub.g.ctx, n)]))
    t1 = time.perf_counter()
    pairs = solve_coupled_system(cx, pub.g, pub.u, cy)
    (x, y, yinv, _), draws, attempts = _with_retries(
        lambda: sample_invertible_pair(pairs, 1, cfg, rng), cfg, retries)
    key = x @ pub.v @ yinv
    t2 = time.perf_counter()
    return AttackReport(
        key=key,
        draws_used=draws,
        offline_dims={"centralizer": cx.dim, "double_centralizer": cy.dim, "solution": len(pairs)},
        elapsed=t2 - t0,
        timings={"offline": t1 - t0, "online": t2 - t1},
        attempts=attempts,
    )


# -- Diffie-Hellman conjugacy ----------------------------------------------------

def dh_conjugacy_offline(b_gens: Sequence[Matrix], n: int | None = None) -> Subspace:
    return centralizer_basis(b_gens, n)


def dh_conjugacy_attack(g: Matrix, g_a: Matrix, g_b: Matrix, b_gens: Sequence[Matrix], cfg: SampleConfig,
                        rng: random.Random, *, cb: Subspace | None = None,
                        retries: int = DEFAULT_RETRIES) -> AttackReport:
    """``g^(ab)`` from ``g^a``, ``g^b`` when ``a`` commutes with ``B = <b_gens>``."""
    t0 = time.perf_counter()
    n = g.n_rows
    if cb is None:
        cb = dh_conjugacy_offline(b_gens, n) if b_gens else Subspace.full(g.ctx, (n, n))
    t1 = time.perf_counter()
    # x g^a = g x  <=>  g x = x g^a
    hs = solve_conjugacy_system([(g, g_a)], cb)
    (a, ainv, _, _), draws, attempts = _with_retries(lambda: sample_invertible(hs, cfg, rng), cfg, retries)
    key = ainv @ g_b @ a
    t2 = time.perf_counter()
    return AttackReport(
        key=key,
        draws_used=draws,
        offline_dims={"centralizer": cb.dim, "solution": hs.dim},
        elapsed=t2 - t0,
        timings={"offline": t1 - t0, "online": t2 - t1},
        attempts=attempts,
    )


# -- Double coset (and Stickel) --------------------------------------------------

def double_coset_offline(b1_gens: Sequence[Matrix], b2_gens: Sequence[Matrix], n: int) -> tuple[Subspace, Subspace]:
    return centralizer_basis(b1_gens, n), centralizer_basis(b2_gens, n)


def double_coset_attack(g: Matrix, u: Matrix, v: Matrix, b1_gens: Sequence[Matrix], b2_gens: Sequence[Matrix],
                        cfg: SampleConfig, rng: random.Random, *,
                        offline: tuple[Subspace, Subspace] | None = None,
                        retries: int = DEFAULT_RETRIES) -> AttackReport:
    """``a_1 b_1 g a_2 b_2`` from ``u = a_1 g a_2`` and ``v = b_1 g b_2``.

    Solves ``x u = g y`` over ``C(B_1) x C(B_2)``; with ``x`` invertible,
    ``(x^-1, y)`` reproduces ``u`` and commutes with Bob's secrets.
    """
    t0 = time.perf_counter()
    n = g.n_rows
    if offline is None:
        # C(empty set) = M_n
        full = Subspace.full(g.ctx, (n, n))
        offline = (centralizer_basis(b1_gens, n) if b1_gens else full,
                   centralizer_basis(b2_gens, n) if b2_gens else full)
    c1, c2 = offline
    t1 = time.perf_counter()
    pairs = solve_coupled_system(c1, u, g, c2)
    (x, y, xinv, _), draws, attempts = _with_retries(
        lambda: sample_invertible_pair(pairs, 0, cfg, rng), cfg, retries)
    key = xinv @ v @ y
    t2 = time.perf_counter()
    return AttackReport(
        key=key,
        draws_used=draws,
        offline_dims={"centralizer_1": c1.dim, "centralizer_2": c2.dim, "solution": len(pairs)},
        elapsed=t2 - t0,
        timings={"offline": t1 - t0, "online": t2 - t1},
        attempts=attempts,
    )
