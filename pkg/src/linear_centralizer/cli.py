"""Command-line entry point: ``simulate``, ``attack``, ``selfcheck``, ``bench``.

Exit codes: 0 success, 1 selfcheck failure, 2 malformed input, 3 attack
failure.  Errors go to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from pathlib import Path
from typing import Callable, Sequence

from .attacks import AttackFailed, CommutatorPublic, commutator_offline, commutator_online
from .braid import braid_conj, braid_from_word, braid_inv, braid_mul, generator, random_braid
from .ff import make_ext_ctx, next_prime, prime_field
from .linalg import Matrix, NoInvertibleFound, SampleConfig, centralizer_basis
from .lkrep import DegreeOverflow, lk_bounds_check, lk_dim, lk_lift, lk_of_braid, lk_of_braid_mod
from .pipeline import run_full_attack, run_matrix_attack
from .protocols import PROTOCOLS, GroupCtx, InstanceError, SimulatedInstance, check_promises, simulate

__all__ = ["run", "main", "DEFAULT_MATRIX_PRIME", "parse_group", "bench_rows"]

DEFAULT_MATRIX_PRIME = next_prime(1 << 61)

EXIT_OK, EXIT_CHECK, EXIT_MALFORMED, EXIT_ATTACK = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code, self.kind = code, kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_MALFORMED, "usage", message)


def _fail(err: CliError) -> int:
    sys.stderr.write(json.dumps({"error": err.kind, "message": str(err), "exit": err.code}) + "\n")
    return err.code


def parse_group(spec: str) -> GroupCtx:
    """``braid:N``, ``matrix:n`` or ``matrix:n:p`` (``p`` decimal or 0x-hex)."""
    parts = spec.split(":")
    try:
        if parts[0] == "braid" and len(parts) == 2:
            return GroupCtx.braid(int(parts[1]))
        if parts[0] == "matrix" and len(parts) in (2, 3):
            p = int(parts[2], 0) if len(parts) == 3 else DEFAULT_MATRIX_PRIME
            return GroupCtx.matrix(prime_field(p), int(parts[1]))
    except ValueError as exc:
        raise CliError(EXIT_MALFORMED, "usage", f"bad group {spec!r}: {exc}") from exc
    raise CliError(EXIT_MALFORMED, "usage", f"bad group {spec!r}; expected braid:N or matrix:n[:p]")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    return lo, hi


def _write_json(path: str, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# -- simulate --------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    group = parse_group(args.group)
    rng = random.Random(args.seed)
    try:
        inst = simulate(args.protocol, group, rng, k=args.k, m=args.m, ell=args.ell,
                        inf_range=args.inf_range, seed=args.seed)
    except (InstanceError, ValueError) as exc:
        raise CliError(EXIT_MALFORMED, "instance", str(exc)) from exc
    obj = inst.to_json(with_secrets=args.with_secrets)
    obj["config"] = {"verb": "simulate", "protocol": args.protocol, "group": args.group, "k": args.k,
                     "m": args.m, "ell": args.ell, "inf_range": list(args.inf_range), "seed": args.seed,
                     "with_secrets": args.with_secrets}
    _write_json(args.out, obj)
    return EXIT_OK


# -- attack ----------------------------------------------------------------------

def _load_instance(path: str) -> SimulatedInstance:
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(EXIT_MALFORMED, "io", str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_MALFORMED, "json", f"{path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise CliError(EXIT_MALFORMED, "instance", "instance file must hold a JSON object")
    try:
        return SimulatedInstance.from_json(obj)
    except InstanceError as exc:
        raise CliError(EXIT_MALFORMED, "instance", str(exc)) from exc


def _cmd_attack(args) -> int:
    inst = _load_instance(args.instance)
    rng = random.Random(args.seed)
    cfg = SampleConfig(max_tries=args.max_draws)
    config = {"verb": "attack", "instance": args.instance, "max_draws": args.max_draws, "seed": args.seed}
    try:
        if inst.group.is_braid:
            res = run_full_attack(inst, rng, cfg=cfg)
            report = res.to_json()
            timings = res.timings_ms()
            verified = res.verified
        else:
            rep, verified = run_matrix_attack(inst, rng, cfg)
            report = {
                "protocol": inst.protocol,
                "group": inst.group.to_json(),
                "key_field": rep.key.to_json(),
                "draws": rep.draws_used,
                "attempts": rep.attempts,
                "dims": dict(rep.offline_dims),
                "verified": verified,
            }
            timings = {k: round(v * 1000, 3) for k, v in rep.timings.items()}
    except (AttackFailed, NoInvertibleFound, DegreeOverflow) as exc:
        raise CliError(EXIT_ATTACK, "attack", f"{type(exc).__name__}: {exc}") from exc
    except (KeyError, ValueError, InstanceError) as exc:
        raise CliError(EXIT_MALFORMED, "instance", f"{type(exc).__name__}: {exc}") from exc
    report["config"] = config
    _write_json(args.out, report)
    # wall-clock numbers live beside the report so the report itself is reproducible
    _write_json(args.out + ".timings.json", {"timings_ms": timings})
    if verified is False:
        raise CliError(EXIT_ATTACK, "verification", "recovered key differs from the shared key")
    return EXIT_OK


# -- selfcheck -------------------------------------------------------------------

def _check_ff() -> bool:
    rng = random.Random(1)
    F = make_ext_ctx(10007, 3, rng)
    xs = [F.element([rng.randrange(F.p) for _ in range(3)]) for _ in range(20)]
    return all((x * y) * z == x * (y * z) and x * (y + z) == x * y + x * z and (x.is_zero() or x * x ** -1 == F.one)
               for x, y, z in zip(xs, xs[1:], xs[2:]))


def _check_linalg() -> bool:
    rng = random.Random(2)
    F = prime_field(101)
    ms = [Matrix.random(F, 4, 4, rng) for _ in range(2)]
    c = centralizer_basis(ms)
    ok = all(b @ m == m @ b for b in c.basis for m in ms)
    a = Matrix.random(F, 4, 4, rng)
    return ok and (not a.is_invertible() or a @ a.inv() == Matrix.identity(F, 4))


def _check_braid() -> bool:
    rng = random.Random(3)
    N = 5
    s = [generator(N, j) for j in range(1, N)]
    ok = all(braid_mul(braid_mul(s[i], s[i + 1]), s[i]) == braid_mul(braid_mul(s[i + 1], s[i]), s[i + 1])
             for i in range(N - 2))
    ok &= braid_mul(s[0], s[2]) == braid_mul(s[2], s[0])
    for _ in range(20):
        x = random_braid(N, 3, rng, rng.randint(-3, 3))
        ok &= braid_mul(x, braid_inv(x)).is_identity() and x.is_normal()
    return ok


def _check_lk() -> bool:
    rng = random.Random(4)
    N = 4
    g = [braid_from_word(N, [(j, 1)]) for j in range(1, N)]
    L = [lk_of_braid(x) for x in g]
    ok = all(L[i] @ L[i + 1] @ L[i] == L[i + 1] @ L[i] @ L[i + 1] for i in range(N - 2))
    ok &= L[0] @ L[2] == L[2] @ L[0]
    F = make_ext_ctx(next_prime(1 << (N * N * 5 + 1)), 9, rng, sparse=True)
    for _ in range(5):
        x = random_braid(N, 2, rng, rng.randint(-2, 0))
        lx = lk_of_braid(x)
        ok &= (lx @ lk_of_braid(braid_inv(x))).is_identity()
        M = max(abs(x.inf), abs(x.sup))
        ok &= lk_bounds_check(lx, M, N).passed
        if M <= 4:
            ok &= lk_lift(lk_of_braid_mod(x, F), M, N, F) == lx
    return ok


def _check_attacks() -> bool:
    rng = random.Random(5)
    G = GroupCtx.matrix(prime_field(DEFAULT_MATRIX_PRIME), 4)
    ok = True
    for proto in PROTOCOLS:
        inst = simulate(proto, G, rng, k=2, m=6)
        ok &= not check_promises(inst)
        _, verified = run_matrix_attack(inst, rng)
        ok &= verified is True
    return ok


def _check_pipeline() -> bool:
    rng = random.Random(6)
    G = GroupCtx.braid(4)
    inst = simulate("braid-dh", G, rng, m=1, ell=1, inf_range=(-2, 2))
    return run_full_attack(inst, rng).verified is True


SELF_CHECKS: dict[str, Callable[[], bool]] = {
    "ff": _check_ff,
    "linalg": _check_linalg,
    "braid": _check_braid,
    "lkrep": _check_lk,
    "attacks": _check_attacks,
    "pipeline": _check_pipeline,
}


def _cmd_selfcheck(args) -> int:
    results = {}
    for name, check in SELF_CHECKS.items():
        t0 = time.perf_counter()
        try:
            ok = bool(check())
            err = None
        except Exception as exc:  # a crashing suite is a failing suite
            ok, err = False, f"{type(exc).__name__}: {exc}"
        results[name] = {"passed": ok, "ms": round((time.perf_counter() - t0) * 1000, 1)}
        if err:
            results[name]["error"] = err
        print(f"{'PASS' if ok else 'FAIL'} {name}", flush=True)
    if args.out:
        _write_json(args.out, {"config": {"verb": "selfcheck"}, "results": results})
    return EXIT_OK if all(r["passed"] for r in results.values()) else EXIT_CHECK


# -- bench -----------------------------------------------------------------------

def _bench_matrix(n: int, seed: int, protocols: Sequence[str]) -> dict:
    G = GroupCtx.matrix(prime_field(DEFAULT_MATRIX_PRIME), n)
    rng = random.Random(seed)
    row: dict = {"n": n}
    for proto in protocols:
        inst = simulate(proto, G, rng, k=4, m=16)
        key = proto.replace("-", "_")
        if proto == "commutator":
            P = inst.public
            pub = CommutatorPublic(*(tuple(P[x]) for x in ("a_list", "b_list", "a_conj_list", "b_conj_list")))
            t0 = time.perf_counter()
            dc = commutator_offline(pub.b_list, n)
            t1 = time.perf_counter()
            rep = commutator_online(pub, dc, SampleConfig(), rng)
            t2 = time.perf_counter()
            row.update({"commutator_offline_ms": round((t1 - t0) * 1000, 3),
                        "commutator_online_ms": round((t2 - t1) * 1000, 3),
                        "commutator_dc_dim": dc.dim, "commutator_ok": rep.key == inst.shared_key})
        else:
            t0 = time.perf_counter()
            rep, ok = run_matrix_attack(inst, rng)
            row[f"{key}_ms"] = round((time.perf_counter() - t0) * 1000, 3)
            row[f"{key}_dims"] = ";".join(f"{k}={v}" for k, v in rep.offline_dims.items())
            row[f"{key}_ok"] = ok
    return row


def _bench_braid(N: int, seed: int) -> dict:
    rng = random.Random(seed)
    xs = [random_braid(N, 4, rng, rng.randint(-4, 4)) for _ in range(101)]
    t0 = time.perf_counter()
    prods = [braid_mul(x, y) for x, y in zip(xs, xs[1:])]
    t1 = time.perf_counter()
    for x in xs[:100]:
        braid_inv(x)
    t2 = time.perf_counter()
    for x, y in zip(xs, xs[1:]):
        braid_conj(x, y)
    t3 = time.perf_counter()
    return {"N": N, "mul_us": round((t1 - t0) * 1e4, 2), "inv_us": round((t2 - t1) * 1e4, 2),
            "conj_us": round((t3 - t2) * 1e4, 2),
            "mean_canonical_length": round(sum(p.canonical_length for p in prods) / len(prods), 3)}


def _bench_lk(N: int, seed: int) -> dict:
    rng = random.Random(seed)
    xs = [random_braid(N, 2, rng, rng.randint(-1, 1)) for _ in range(10)]
    F = make_ext_ctx(DEFAULT_MATRIX_PRIME, 5, rng, sparse=True)
    t0 = time.perf_counter()
    images = [lk_of_braid(x) for x in xs]
    t1 = time.perf_counter()
    for x in xs:
        lk_of_braid_mod(x, F)
    t2 = time.perf_counter()
    reports = [lk_bounds_check(m, max(abs(x.inf), abs(x.sup)), N) for m, x in zip(images, xs)]
    return {"N": N, "n": lk_dim(N), "exact_ms": round((t1 - t0) * 100, 3), "mod_ms": round((t2 - t1) * 100, 3),
            "max_degree": max(r.max_degree for r in reports),
            "max_coeff_bits": max(r.max_coeff_bits for r in reports),
            "bounds_ok": all(r.passed for r in reports)}


def bench_rows(suite: str, sizes: Sequence[int], seed: int = 0,
               protocols: Sequence[str] = PROTOCOLS) -> list[dict]:
    """One row per size; used by the ``bench`` verb."""
    if suite == "matrix-attacks":
        return [_bench_matrix(n, seed, protocols) for n in sizes]
    if suite == "braid-core":
        return [_bench_braid(N, seed) for N in sizes]
    if suite == "lk":
        return [_bench_lk(N, seed) for N in sizes]
    raise ValueError(f"unknown suite {suite!r}")


def _cmd_bench(args) -> int:
    protocols = tuple(args.protocols.split(",")) if args.protocols else PROTOCOLS
    if any(p not in PROTOCOLS for p in protocols):
        raise CliError(EXIT_MALFORMED, "usage", f"unknown protocol in {args.protocols!r}")
    rows = bench_rows(args.suite, args.sizes, args.seed, protocols)
    fields: list[str] = []
    for r in rows:
        fields += [k for k in r if k not in fields]
    with open(args.out, "w", newline="") as fh:
        fh.write(f"# suite={args.suite} sizes={','.join(map(str, args.sizes))} seed={args.seed}\n")
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)
    return EXIT_OK


# -- entry -----------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="linear-centralizer", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="write a simulated key exchange instance")
    s.add_argument("--protocol", required=True, choices=PROTOCOLS)
    s.add_argument("--group", required=True, help="braid:N, matrix:n or matrix:n:p")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--ell", type=int, default=2)
    s.add_argument("--inf-range", type=_range, default=(0, 0),
                   help="LO:HI range for Delta exponents; write --inf-range=-4:4 when LO < 0")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--with-secrets", action="store_true")

    a = sub.add_parser("attack", help="attack an instance file and write a report")
    a.add_argument("--instance", required=True)
    a.add_argument("--out", required=True)
    a.add_argument("--max-draws", type=int, default=64)
    a.add_argument("--seed", type=int, default=0)

    c = sub.add_parser("selfcheck", help="run every module's invariant checks")
    c.add_argument("--out")

    b = sub.add_parser("bench", help="time a suite over a list of sizes (CSV)")
    b.add_argument("--suite", required=True, choices=("matrix-attacks", "braid-core", "lk"))
    b.add_argument("--sizes", required=True, type=_int_list)
    b.add_argument("--out", required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--protocols", help="comma-separated subset for matrix-attacks")
    return p


_COMMANDS = {"simulate": _cmd_simulate, "attack": _cmd_attack, "selfcheck": _cmd_selfcheck, "bench": _cmd_bench}


def run(argv: Sequence[str]) -> int:
    try:
        args = _parser().parse_args(list(argv))
        return _COMMANDS[args.verb](args)
    except CliError as err:
        return _fail(err)


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
