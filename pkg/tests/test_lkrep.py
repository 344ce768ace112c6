import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linear_centralizer.braid import (
    IndexOutOfRange,
    _omega,
    braid_from_word,
    braid_inv,
    braid_mul,
    delta_power,
    generator,
    perm_to_word,
    random_braid,
)
from linear_centralizer.ff import make_ext_ctx, next_prime
from linear_centralizer.linalg import Matrix
from linear_centralizer.lkrep import (
    DegreeOverflow,
    Dyadic,
    DyadicLaurent,
    LKMatrix,
    lk_bounds_check,
    lk_dim,
    lk_generator,
    lk_lift,
    lk_of_braid,
    lk_of_braid_mod,
    lk_of_word,
    lk_reduce,
)
from oracles import lk_generator_oracle, lk_matrix_as_dicts, lk_positive_word_oracle

SEEDS = st.integers(0, 2 ** 32)
CTX = make_ext_ctx(next_prime(1 << 61), 7, random.Random(0), sparse=True)


def braids(N, ell=2, inf=(-2, 2)):
    return SEEDS.map(lambda s: random_braid(N, ell, random.Random(s), random.Random(s + 1).randint(*inf)))


def radius(b):
    return max(abs(b.inf), abs(b.sup))


# -- coefficient ring ---------------------------------------------------------------

def test_dyadic_canonical_form():
    assert Dyadic.make(12, 3) == Dyadic(3, 1)
    assert Dyadic.make(12, 0) == Dyadic(12, 0)
    assert Dyadic.make(3, -2) == Dyadic(12, 0)
    assert Dyadic.make(0, 5) == Dyadic(0, 0)
    assert Dyadic.make(-5, 2) == Dyadic(-5, 2)
    for bad in ((4, 1), (0, 1), (3, -1)):
        with pytest.raises(ValueError):
            Dyadic(*bad)


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(-5, 30))
def test_dyadic_make_preserves_value(c, d):
    x = Dyadic.make(c, d)
    assert Fraction(x.c, 1 << x.d) == Fraction(c) / Fraction(2) ** d


def test_dyadic_laurent_json():
    x = DyadicLaurent(((-1, Dyadic(3, 2)), (4, Dyadic(-8, 0))))
    assert DyadicLaurent.from_json(x.to_json()) == x
    with pytest.raises(ValueError):
        DyadicLaurent.from_json([[0, "0x0", 0]])
    with pytest.raises(ValueError):
        DyadicLaurent.from_json([[0, "0x1", 0], [0, "0x3", 0]])


# -- generators against the independent formula --------------------------------------

def test_lk_dim():
    assert [lk_dim(N) for N in range(2, 7)] == [1, 3, 6, 10, 15]


def test_b2_generator_is_minus_t_over_four():
    m = lk_generator(2, 1)
    assert m.entries == ((DyadicLaurent(((1, Dyadic(-1, 2)),)),),)
    inv = lk_generator(2, 1, -1)
    assert inv.entries == ((DyadicLaurent(((-1, Dyadic(-4, 0)),)),),)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_generators_match_oracle(N):
    for i in range(1, N):
        assert lk_matrix_as_dicts(lk_generator(N, i)) == lk_generator_oracle(N, i)


@pytest.mark.parametrize("N", [2, 3, 4, 5, 6])
def test_inverse_generators(N):
    for i in range(1, N):
        assert (lk_generator(N, i) @ lk_generator(N, i, -1)).is_identity()
        assert (lk_generator(N, i, -1) @ lk_generator(N, i)).is_identity()


def test_generator_errors():
    with pytest.raises(IndexOutOfRange):
        lk_generator(4, 4)
    with pytest.raises(ValueError):
        lk_generator(4, 1, 2)


@pytest.mark.parametrize("N", [3, 4, 5, 6])
def test_braid_relations(N):
    g = [lk_generator(N, i) for i in range(1, N)]
    for i, j in itertools.combinations(range(N - 1), 2):
        if j == i + 1:
            assert g[i] @ g[j] @ g[i] == g[j] @ g[i] @ g[j]
        else:
            assert g[i] @ g[j] == g[j] @ g[i]


@given(st.lists(st.integers(1, 3), max_size=7))
def test_positive_words_match_oracle(word):
    b = braid_from_word(4, [(j, 1) for j in word])
    assert lk_matrix_as_dicts(lk_of_braid(b)) == lk_positive_word_oracle(4, word)


@pytest.mark.parametrize("N", [3, 4])
def test_delta_squared_is_scalar(N):
    w = perm_to_word(_omega(N))
    d2 = lk_positive_word_oracle(N, w + w)
    n = lk_dim(N)
    scalar = {2: Fraction(1, 2 ** (2 * N))}
    assert d2 == [[scalar if i == j else {} for j in range(n)] for i in range(n)]
    assert lk_matrix_as_dicts(lk_of_braid(delta_power(N, 2))) == d2


# -- homomorphism, inverses, injectivity -------------------------------------------------

def test_trivial_braid_is_identity():
    for N in (2, 3, 5):
        assert lk_of_braid(delta_power(N, 0)).is_identity()


@given(braids(4), braids(4))
def test_homomorphism(x, y):
    assert lk_of_braid(braid_mul(x, y)) == lk_of_braid(x) @ lk_of_braid(y)


@given(braids(5, 2, (-3, 1)))
def test_inverse_image(x):
    assert (lk_of_braid(x) @ lk_of_braid(braid_inv(x))).is_identity()


@given(st.lists(st.tuples(st.integers(1, 3), st.sampled_from((1, -1))), max_size=8))
def test_word_path_matches_normal_form_path(word):
    assert lk_of_word(4, word) == lk_of_braid(braid_from_word(4, word))


def test_distinct_normal_forms_give_distinct_images():
    rng = random.Random(7)
    seen = {}
    while len(seen) < 100:
        b = random_braid(4, rng.randint(0, 6), rng, rng.randint(-2, 2))
        seen.setdefault(b, lk_of_braid(b))
    images = list(seen.values())
    assert len({json_key(m) for m in images}) == 100


def json_key(m: LKMatrix):
    return repr(m.to_json())


def test_lkmatrix_json_round_trip():
    m = lk_of_braid(random_braid(4, 2, random.Random(1), -1))
    assert LKMatrix.from_json(m.to_json()) == m
    with pytest.raises(ValueError):
        LKMatrix(3, ((DyadicLaurent(),),))


# -- bounds ------------------------------------------------------------------------------

def test_bounds_examples():
    assert lk_bounds_check(LKMatrix.identity(4), 0).passed
    rep = lk_bounds_check(lk_generator(2, 1), 0, 2)
    assert not rep.passed and rep.max_degree == 1 and rep.violations
    with pytest.raises(ValueError):
        lk_bounds_check(LKMatrix.identity(3), -1)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_bounds_hold_for_random_braids(N):
    rng = random.Random(N)
    for _ in range(30):
        b = random_braid(N, rng.randint(0, 3), rng, rng.randint(-3, 2))
        rep = lk_bounds_check(lk_of_braid(b), radius(b), N)
        assert rep.passed, rep.violations


# -- modular images and lifting ----------------------------------------------------------

def test_mod_trivial_is_identity():
    assert lk_of_braid_mod(delta_power(4, 0), CTX) == Matrix.identity(CTX, 6)


def test_mod_agrees_with_exact_path():
    rng = random.Random(3)
    for _ in range(50):
        b = random_braid(4, rng.randint(0, 3), rng, rng.randint(-3, 3))
        assert lk_of_braid_mod(b, CTX) == lk_reduce(lk_of_braid(b), CTX)


@given(braids(4, 2, (-3, 3)), braids(4, 2, (-3, 3)))
def test_mod_homomorphism(x, y):
    assert lk_of_braid_mod(braid_mul(x, y), CTX) == lk_of_braid_mod(x, CTX) @ lk_of_braid_mod(y, CTX)


def test_mod_inverse_generators():
    for i in (1, 2, 3):
        prod = lk_of_braid_mod(generator(4, i), CTX) @ lk_of_braid_mod(generator(4, i, -1), CTX)
        assert prod == Matrix.identity(CTX, 6)


def _lift_ctx(N, M):
    return make_ext_ctx(next_prime(1 << (N * N * (M + 1) + 1)), 2 * M + 1, random.Random(M), sparse=True)


@pytest.mark.parametrize("M", [0, 1, 3])
def test_lift_round_trip(M):
    N = 4
    ctx = _lift_ctx(N, M)
    rng = random.Random(M)
    for _ in range(10):
        ell = rng.randint(0, M)
        lo = rng.randint(-M, M - ell)
        b = random_braid(N, ell, rng, lo)
        assert radius(b) <= M
        assert lk_lift(lk_of_braid_mod(b, ctx), M, N, ctx) == lk_of_braid(b)


def test_lift_identity():
    ctx = _lift_ctx(3, 2)
    assert lk_lift(Matrix.identity(ctx, 3), 2, 3, ctx).is_identity()


def test_lift_detects_undersized_field():
    N, M = 4, 3
    rng = random.Random(0)
    b = random_braid(N, 3, rng, -3)
    assert radius(b) <= M
    small_p = make_ext_ctx(next_prime(1 << 8), 2 * M + 1, random.Random(1), sparse=True)
    try:
        lifted = lk_lift(lk_of_braid_mod(b, small_p), M, N, small_p)
    except DegreeOverflow:
        pass
    else:
        assert lifted != lk_of_braid(b)
    small_d = make_ext_ctx(next_prime(1 << (N * N * (M + 1) + 1)), M + 1, random.Random(2), sparse=True)
    # t^M LK(Delta^3) reaches degree 2M >= d, so reduction mod f wraps
    big = delta_power(N, M)
    try:
        lifted = lk_lift(lk_of_braid_mod(big, small_d), M, N, small_d)
    except DegreeOverflow:
        pass
    else:
        assert lifted != lk_of_braid(big)


def test_lift_rejects_wrong_shape():
    ctx = _lift_ctx(3, 1)
    with pytest.raises(ValueError):
        lk_lift(Matrix.identity(ctx, 4), 1, 3, ctx)
