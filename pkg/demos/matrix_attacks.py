"""Break all five key exchanges over GL_12(F_p) from public data alone."""

import random

from linear_centralizer import GroupCtx, next_prime, prime_field, simulate
from linear_centralizer.pipeline import run_matrix_attack

F = prime_field(next_prime(1 << 61))
G = GroupCtx.matrix(F, 12)
rng = random.Random(2024)

for proto in ("commutator", "centralizer", "braid-dh", "double-coset", "stickel"):
    inst = simulate(proto, G, rng, k=4, m=16)
    # the attacker only sees the public transcript
    report, _ = run_matrix_attack(inst.attacker_view(), rng)
    match = report.key == inst.shared_key
    print(f"{proto:13s} key recovered: {match}  draws={report.draws_used}  "
          f"dims={report.offline_dims}  {report.elapsed * 1000:.0f} ms")
