"""Batch digit-array arithmetic must agree with the scalar field engine."""

import math
import random

import numpy as np
import pytest

from excov._batch import (
    BatchField,
    get_batch,
    is_permutation,
    multiplicity_histogram,
    permutation_period,
)
from excov.gf import make_extension, make_field


FIELDS = [
    make_field(3, 2),
    make_field(5, 2),
    make_field(2, 4),
    make_extension(make_field(2, 2), 2),  # 16 over 4
    make_field(7, 2),
    make_extension(make_field(3, 2), 2),  # 81 over 9
]


@pytest.mark.parametrize("ctx", FIELDS, ids=lambda c: f"{c.p}^{c.k}")
def test_element_table_matches_enumeration(ctx):
    bf = BatchField(ctx)
    tab = bf.elements()
    assert tab.shape == (ctx.order, ctx.k)
    for i in range(ctx.order):
        assert tuple(int(v) for v in tab[i]) == ctx.from_index(i).prime_coeffs()
    # pack is the inverse walk
    assert np.array_equal(bf.pack(tab), np.arange(ctx.order))
    assert np.array_equal(bf.unpack(np.arange(ctx.order)), tab)


@pytest.mark.parametrize("ctx", FIELDS, ids=lambda c: f"{c.p}^{c.k}")
def test_mul_add_agree_with_scalar_engine(ctx):
    bf = BatchField(ctx)
    q = ctx.order
    rng = random.Random(7)
    pairs = [(rng.randrange(q), rng.randrange(q)) for _ in range(120)]
    if q <= 81:
        pairs = [(i, j) for i in range(q) for j in range(q)]
    a_idx = np.array([i for i, _ in pairs])
    b_idx = np.array([j for _, j in pairs])
    A, B = bf.unpack(a_idx), bf.unpack(b_idx)
    got_mul = bf.pack(bf.mul(A, B))
    got_add = bf.pack(bf.add(A, B))
    got_sub = bf.pack(bf.sub(A, B))
    for n, (i, j) in enumerate(pairs):
        x, y = ctx.from_index(i), ctx.from_index(j)
        assert got_mul[n] == (x * y).index
        assert got_add[n] == (x + y).index
        assert got_sub[n] == (x - y).index


@pytest.mark.parametrize("ctx", FIELDS, ids=lambda c: f"{c.p}^{c.k}")
def test_power_tables_agree_with_scalar_engine(ctx):
    bf = BatchField(ctx)
    for n in (0, 1, 2, 3, 5, 8, 13):
        tab = bf.pack(bf.power_table(n))
        for i in range(0, ctx.order, max(1, ctx.order // 23)):
            assert tab[i] == (ctx.from_index(i) ** n).index


def test_pow_and_inverse():
    ctx = make_field(7, 2)
    bf = BatchField(ctx)
    elems = bf.elements()
    inv = bf.pack(bf.inverse(elems))
    for i in range(1, ctx.order):
        assert inv[i] == ctx.from_index(i).inverse().index
    assert inv[0] == 0  # convention: caller masks zeros
    cube = bf.pack(bf.pow(elems, 3))
    for i in range(ctx.order):
        assert cube[i] == (ctx.from_index(i) ** 3).index


def test_scalar_broadcast_multiplication():
    base = make_field(3, 2)
    ctx = make_extension(base, 2)
    bf = BatchField(ctx)
    g = base.gen()
    got = bf.pack(bf.mul(bf.elements().astype(np.int16), bf.scalar_digits(g)))
    for i in range(ctx.order):
        assert got[i] == (ctx.from_index(i) * g).index


def test_eval_sparse_matches_pointwise():
    base = make_field(5, 1)
    ctx = make_extension(base, 3)
    bf = BatchField(ctx)
    a = base.from_int(3)
    # 2*x^7 + a*x^2 + 4
    vals = bf.pack(bf.eval_sparse([(7, 2), (2, a), (0, 4)]))
    for i in range(0, ctx.order, 7):
        x = ctx.from_index(i)
        want = x**7 * 2 + x**2 * a + ctx.from_int(4)
        assert vals[i] == want.index


def test_eval_sparse_subfield_coefficients():
    base = make_field(3, 2)
    ctx = make_extension(base, 2)
    bf = BatchField(ctx)
    a = base.gen()  # not a prime-field constant
    vals = bf.pack(bf.eval_sparse([(3, a), (1, a * a)]))
    for i in range(ctx.order):
        x = ctx.from_index(i)
        assert vals[i] == (a * x**3 + a * a * x).index


def test_eval_dense_matches_horner():
    ctx = make_field(2, 4)
    bf = BatchField(ctx)
    coeffs = [ctx.from_index(i % ctx.order) for i in (5, 0, 9, 1, 14)]
    vals = bf.pack(bf.eval_dense(coeffs))
    for i in range(ctx.order):
        x = ctx.from_index(i)
        acc = ctx.zero()
        for c in reversed(coeffs):
            acc = acc * x + c
        assert vals[i] == acc.index


def test_is_permutation_and_histogram():
    assert is_permutation(np.array([2, 0, 1]), 3)
    assert not is_permutation(np.array([2, 2, 1]), 3)
    assert not is_permutation(np.array([0, 1]), 3)
    hist = multiplicity_histogram(np.array([0, 0, 3, 3, 3, 1]), 5)
    assert hist == {0: 2, 1: 1, 2: 1, 3: 1}


def test_permutation_period_known_cycles():
    # disjoint 3-cycle and 2-cycle: order 6
    perm = np.array([1, 2, 0, 4, 3])
    assert permutation_period(perm) == 6
    assert permutation_period(np.arange(9)) == 1
    rng = random.Random(11)
    for _ in range(10)          :
        n = rng.randrange(2, 60)
        p = list(range(n))
        rng.shuffle(p)
        arr = np.array(p)
        # reference lcm from explicit cycle walk
        seen = [False] * n
        want = 1
        for s in range(n):
            if seen[s]:
                continue
            ln, c = 0, s
            while not seen[c]:
                seen[c] = True
                c = p[c]
                ln += 1
            want = math.lcm(want, ln)
        assert permutation_period(arr) == want


def test_index_space_multiplication():
    ctx = make_field(3, 3)
    bf = BatchField(ctx)
    q = ctx.order
    a = np.arange(q).repeat(q)
    b = np.tile(np.arange(q), q)
    got = bf.mul_indices(a, b)
    for n in range(0, q * q, 11):
        want = (ctx.from_index(int(a[n])) * ctx.from_index(int(b[n]))).index
        assert got[n] == want
    pw = bf.pow_indices(np.arange(q), 5)
    for i in range(q):
        assert pw[i] == (ctx.from_index(i) ** 5).index


def test_log_parity_is_quadratic_character():
    ctx = make_field(7, 2)
    bf = BatchField(ctx)
    log = bf.log_table()
    squares = {(ctx.from_index(i) ** 2).index for i in range(1, ctx.order)}
    for i in range(1, ctx.order):
        assert (log[i] % 2 == 0) == (i in squares)


def test_generator_has_full_order():
    for ctx in (make_field(2, 1), make_field(3, 2), make_extension(make_field(2, 2), 2)):
        g = BatchField(ctx).generator()
        seen = set()
        x = ctx.one()
        for _ in range(ctx.order - 1):
            seen.add(x.index)
            x = x * g
        assert len(seen) == ctx.order - 1


def test_frobenius_power_is_linear_over_base():
    base = make_field(2, 2)
    ctx = make_extension(base, 3)
    bf = BatchField(ctx)
    frob = bf.pack(bf.pow(bf.elements(), base.order))
    fixed = [i for i in range(ctx.order) if frob[i] == i]
    assert len(fixed) == base.order


def test_get_batch_caches_and_evicts():
    a = get_batch(make_field(3, 1))
    assert get_batch(make_field(3, 1)) is a
    for p in (5, 7, 11, 13):
        get_batch(make_field(p, 1))
    assert get_batch(make_field(3, 1)) is not a


def test_wide_characteristic_agrees_with_scalar_engine():
    # digits no longer fit int8 once p > 127 and a single digit product
    # no longer fits int16 once p > 182; both regimes must still match
    rng = random.Random(3)
    for p, t in ((131, 1), (199, 1), (131, 2), (67, 1)):
        ctx = make_field(p, 1)
        K = make_extension(ctx, t)
        bf = BatchField(K)
        coeffs = [ctx.from_index(rng.randrange(p)) for _ in range(9)]
        terms = [(e, c) for e, c in enumerate(coeffs) if not c.is_zero()]
        got = bf.pack(bf.eval_sparse(terms, cache=False))
        for i in rng.sample(range(K.order), min(80, K.order)):
            x = K.from_index(i)
            want = K.zero()
            for e, c in terms:
                want = want + K.embed(c) * x ** e
            assert int(got[i]) == want.index, (p, t, i)


def test_budget_forces_reduction_passes_on_long_sums():
    # over F_101 the int32 budget is large but a 200-term polynomial still
    # has to come out exactly; compare against dense Horner evaluation
    ctx = make_field(101, 1)
    bf = BatchField(ctx)
    rng = random.Random(11)
    coeffs = [rng.randrange(101) for _ in range(200)] + [1]
    sparse = bf.pack(bf.eval_sparse(list(enumerate(coeffs)), cache=False))
    dense = bf.pack(bf.eval_dense(coeffs))
    assert np.array_equal(sparse, dense)
