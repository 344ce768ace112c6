import random

import pytest

from linear_centralizer.attacks import (
    AttackFailed,
    CentralizerPublic,
    CommutatorPublic,
    centralizer_attack,
    commutator_attack,
    commutator_offline,
    commutator_online,
    dh_conjugacy_attack,
    double_coset_attack,
)
from linear_centralizer.ff import make_ext_ctx, next_prime, prime_field
from linear_centralizer.linalg import Matrix, SampleConfig, ShapeMismatchError
from linear_centralizer.pipeline import run_matrix_attack
from linear_centralizer.protocols import PROTOCOLS, GroupCtx, simulate
from oracles import brute_solutions, int_matmul

FIELDS = {
    "F101": prime_field(101),
    "F61bit": prime_field(next_prime(1 << 61)),
    "F1009^2": make_ext_ctx(1009, 2, random.Random(0)),
    "F7^3": make_ext_ctx(7, 3, random.Random(1)),
}
CFG = SampleConfig()


def as_ints(m: Matrix):
    return [[int(x) for x in row] for row in m.rows]


@pytest.mark.parametrize("proto", PROTOCOLS)
@pytest.mark.parametrize("fname", list(FIELDS))
def test_engines_recover_key(proto, fname):
    F = FIELDS[fname]
    for n in (2, 4, 5):
        G = GroupCtx.matrix(F, n)
        rng = random.Random(n)
        for _ in range(2):
            inst = simulate(proto, G, rng, k=min(3, n * n), m=6)
            report, verified = run_matrix_attack(inst.attacker_view(), random.Random(0))
            assert report.key == inst.shared_key
            assert verified is None
            _, verified = run_matrix_attack(inst, random.Random(0))
            assert verified is True


def test_commutator_key_is_independent_of_solution_choice():
    # brute force over F_3, n = 2: every admissible (x, y) yields the same key
    F = prime_field(3)
    G = GroupCtx.matrix(F, 2)
    rng = random.Random(11)
    for _ in range(4):
        inst = simulate("commutator", G, rng, k=2, m=4)
        P = inst.public
        bx = [(as_ints(b), as_ints(bc)) for b, bc in zip(P["b_list"], P["b_conj_list"])]
        ay = [(as_ints(a), as_ints(ac)) for a, ac in zip(P["a_list"], P["a_conj_list"])]
        cb = brute_solutions([(as_ints(b), as_ints(b)) for b in P["b_list"]], 3, 2)
        xs = [X for X in brute_solutions(bx, 3, 2) if _det2(X, 3)]
        ys = [Y for Y in brute_solutions(ay, 3, 2) if _det2(Y, 3)
              and all(int_matmul(Y, Z, 3) == int_matmul(Z, Y, 3) for Z in cb)]
        K = as_ints(inst.shared_key)
        assert xs and ys
        for X in xs:
            for Y in ys:
                # x^-1 y^-1 x y = K  <=>  x y = y x K
                assert int_matmul(X, Y, 3) == int_matmul(int_matmul(Y, X, 3), K, 3)
        report, _ = run_matrix_attack(inst.attacker_view(), random.Random(0))
        assert as_ints(report.key) == K


def _det2(X, p):
    return (X[0][0] * X[1][1] - X[0][1] * X[1][0]) % p


def test_offline_phase_is_reusable():
    F = FIELDS["F101"]
    G = GroupCtx.matrix(F, 4)
    inst = simulate("commutator", G, random.Random(3), k=2, m=5)
    P = inst.public
    pub = CommutatorPublic(*(tuple(P[x]) for x in ("a_list", "b_list", "a_conj_list", "b_conj_list")))
    dc = commutator_offline(pub.b_list, pub.n)
    for seed in range(3):
        assert commutator_online(pub, dc, CFG, random.Random(seed)).key == inst.shared_key


def test_report_fields():
    G = GroupCtx.matrix(FIELDS["F61bit"], 6)
    inst = simulate("commutator", G, random.Random(4), k=4, m=16)
    report, verified = run_matrix_attack(inst, random.Random(0))
    assert verified and report.attempts == 1 and report.draws_used >= 2
    assert {"offline", "online"} <= set(report.timings)
    assert set(report.summary()) == {"draws", "attempts", "dims"}


def test_small_sample_set_still_works():
    F = FIELDS["F101"]
    G = GroupCtx.matrix(F, 3)
    inst = simulate("centralizer", G, random.Random(5), k=2, m=4)
    report, verified = run_matrix_attack(inst, random.Random(0), SampleConfig(sample_set_size=5))
    assert verified


def test_sample_set_must_exceed_n():
    G = GroupCtx.matrix(FIELDS["F101"], 4)
    inst = simulate("braid-dh", G, random.Random(6), m=4)
    with pytest.raises(ValueError):
        run_matrix_attack(inst, random.Random(0), SampleConfig(sample_set_size=4))


def test_non_conjugate_instance_fails():
    F = FIELDS["F101"]
    rng = random.Random(7)
    g = Matrix.scalar(F, 3, F.element(2))
    h = Matrix.scalar(F, 3, F.element(3))
    # g^x = h has no solution for distinct scalars
    with pytest.raises(AttackFailed):
        dh_conjugacy_attack(g, h, h, [], SampleConfig(max_tries=4), rng, retries=2)
    inst = simulate("commutator", GroupCtx.matrix(F, 3), rng, k=2, m=4)
    P = inst.public
    bad = CommutatorPublic(tuple(P["a_list"]), tuple(P["b_list"]), tuple(P["a_conj_list"]),
                           (P["b_list"][0] @ P["b_list"][0], *P["b_conj_list"][1:]))
    with pytest.raises(AttackFailed) as info:
        commutator_attack(bad, SampleConfig(max_tries=4), rng, retries=2)
    assert info.value.draws >= 0


def test_public_validation():
    F = FIELDS["F101"]
    I2, I3 = Matrix.identity(F, 2), Matrix.identity(F, 3)
    with pytest.raises(ValueError):
        CommutatorPublic((I2,), (I2, I2), (I2,), (I2,))
    with pytest.raises(ValueError):
        CommutatorPublic((), (), (), ())
    with pytest.raises(ValueError):
        CommutatorPublic(*(((I2,) * 5,) * 4))
    with pytest.raises(ShapeMismatchError):
        CommutatorPublic((I2,), (I3,), (I2,), (I2,))
    with pytest.raises(ShapeMismatchError):
        CentralizerPublic(I2, I2, I3, (), ())


def test_empty_generator_sets():
    F = FIELDS["F101"]
    rng = random.Random(8)
    g = Matrix.random(F, 3, 3, rng)
    a = Matrix.random(F, 3, 3, rng)
    b = Matrix.random(F, 3, 3, rng)
    u, v = a @ g, g @ b
    # C(empty) = M_n, C(C(empty)) = scalars: key a g b
    rep = centralizer_attack(CentralizerPublic(g, u, v, (), ()), CFG, rng)
    assert rep.key == a @ g @ b
    # Bob's secrets must then be scalars; with b1 = b2 = I the key is a g
    assert double_coset_attack(g, a @ g, g, [], [], CFG, rng).key == a @ g
