"""Commutator exchange in B_4, broken through the Lawrence-Krammer representation.

Steps: strip central Delta^2 powers, choose a field large enough to lift
exactly, map the public braids to 6 x 6 matrices, solve the linear
conjugacy systems, and lift the key's image back to Z[t, 1/t, 1/2].
"""

import random

from linear_centralizer import GroupCtx, lk_of_braid, simulate
from linear_centralizer.pipeline import run_full_commutator_attack, select_params

rng = random.Random(7)
inst = simulate("commutator", GroupCtx.braid(4), rng, k=2, m=2, ell=2, inf_range=(-4, 4))
print("public a_1 =", inst.public["a_list"][0])

params = select_params("commutator", N=4, k=2, m=2, ell=2)
print(f"key interval radius M={params.M}, field F_p^{params.d} with p ~ 2^{params.p.bit_length()}")

res = run_full_commutator_attack(inst.attacker_view(), rng, params=params)
print("LK image of the recovered key equals LK(a^-1 b^-1 a b):", res.lk_key == lk_of_braid(inst.shared_key))
print("stage timings (ms):", res.timings_ms())
