from fractions import Fraction

import numpy as np
import pytest

import chaingeo.finitemodels as fm


@pytest.fixture(scope="module")
def s3():
    return fm.preset_model("S3")


@pytest.fixture(scope="module")
def s4():
    return fm.preset_model("S4")


def test_preset_orders(s3, s4):
    assert s3.n == 6 and len(s3.H) == 2 and len(s3.Q) == 1
    assert s4.n == 24 and len(s4.H) == 6 and len(s4.Q) == 2
    d4 = fm.preset_model("D4")
    assert d4.n == 8 and len(d4.H) == 4 and len(d4.Q) == 2


def test_fibered_counting(s3):
    # |G/H| * |H/Q|^n = 3 * 2^n
    for n in (1, 2, 3):
        space = fm.fibered_product(s3, n)
        assert len(space.tuples) == 3 * 2**n
        assert sum(space.nu) == 1
    assert len(fm.fibered_product(s3, 2).tuples) == 12  # 3 * 2^2


def test_fibered_n0_is_gh(s3):
    space = fm.fibered_product(s3, 0)
    assert len(space.tuples) == len(s3.gh_cosets)
    assert all(w == Fraction(1, 3) for w in space.nu)


def test_marginals_push_exactly(s3):
    wq = fm.WeightedQuotient(s3, [Fraction(1, 3), Fraction(2, 3)])
    s_2 = fm.fibered_product(s3, 2, wq)
    s_3 = fm.fibered_product(s3, 3, wq)
    for i in (1, 2, 3):
        marg = {}
        for tup, w in zip(s_3.tuples, s_3.nu):
            face = s_3.face(tup, i)
            marg[face] = marg.get(face, Fraction(0)) + w
        for tup, w in zip(s_2.tuples, s_2.nu):
            assert marg[tup] == w


def test_action_preserves_tuple_set(s3):
    space = fm.fibered_product(s3, 2)
    tups = set(space.tuples)
    for g in range(s3.n):
        for t in space.tuples:
            moved = tuple(s3.act_gq(g, c) for c in t)
            assert moved in tups


def test_weighted_quotient_validation(s3):
    with pytest.raises(ValueError):
        fm.WeightedQuotient(s3, [Fraction(1, 2), Fraction(1, 3)])  # sum != 1
    with pytest.raises(ValueError):
        fm.WeightedQuotient(s3, [Fraction(0), Fraction(1)])  # not positive
    wq = fm.WeightedQuotient(s3, [Fraction(1, 4), Fraction(3, 4)])
    # lambda cocycle exact
    for y1 in s3.H:
        for y2 in s3.H:
            y12 = int(s3.mul[y1, y2])
            for j in range(2):
                assert wq.lam(y12, j) == wq.lam(y1, s3.act_hq(y2, j)) * wq.lam(y2, j)


def test_differential_constant_and_dd_zero(s3, rng):
    wq = fm.WeightedQuotient(s3, [Fraction(1, 3), Fraction(2, 3)])
    s_1 = fm.fibered_product(s3, 1, wq)
    s_2 = fm.fibered_product(s3, 2, wq)
    s_3 = fm.fibered_product(s3, 3, wq)
    const = {t: Fraction(5, 3) for t in s_1.tuples}
    d1 = fm.differential_d(s_1, s_2, const)
    assert all(v == 0 for v in d1.values())
    f = fm.random_rational_function(s_1, rng)
    dd = fm.differential_d(s_2, s_3, fm.differential_d(s_1, s_2, f))
    assert all(v == 0 for v in dd.values())


def test_differential_preserves_invariance(s3, rng):
    s_1 = fm.fibered_product(s3, 1)
    s_2 = fm.fibered_product(s3, 2)
    raw = fm.random_rational_function(s_1, rng)
    # G-average to make an invariant function
    f = {}
    for t in s_1.tuples:
        acc = Fraction(0)
        for g in range(s3.n):
            acc += raw[tuple(s3.act_gq(g, c) for c in t)]
        f[t] = acc / s3.n
    df = fm.differential_d(s_1, s_2, f)
    for t in s_2.tuples:
        for g in range(s3.n):
            moved = tuple(s3.act_gq(g, c) for c in t)
            assert df[moved] == df[t]


def test_bruhat_beta_default_and_validation(s3):
    beta = fm.bruhat_beta(s3)
    assert all(b == Fraction(1, 6) * 3 for b in beta) or all(
        b == Fraction(1, len(s3.H)) for b in beta
    )
    bad = [Fraction(0)] * s3.n
    with pytest.raises(ValueError):
        fm.bruhat_beta(s3, bad)
    # discrete-topology translate differences vanish identically at g0 = e
    g0 = s3.identity
    for g in range(s3.n):
        diff = sum(
            abs(beta[s3.mul[g0, s3.mul[g, h]] if False else s3.mul[g, h]] - beta[s3.mul[g, h]])
            for h in s3.H
        )
        assert diff == 0


def test_psi_uniform_weights_is_one(s3):
    wq = fm.WeightedQuotient(s3)
    psi = fm.psi_kernel(s3, fm.bruhat_beta(s3), wq)
    assert all(psi[g, j] == 1 for g in range(s3.n) for j in range(2))


def test_psi_properties_nonuniform(s3, s4):
    wq3 = fm.WeightedQuotient(s3, [Fraction(1, 3), Fraction(2, 3)])
    fm.psi_kernel(s3, fm.bruhat_beta(s3), wq3)  # raises on any failure
    wq4 = fm.WeightedQuotient(s4, [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)])
    fm.psi_kernel(s4, fm.bruhat_beta(s4), wq4)


def test_homotopy_preserves_constants_and_norm(s3, rng):
    wq = fm.WeightedQuotient(s3, [Fraction(1, 5), Fraction(4, 5)])
    psi = fm.psi_kernel(s3, fm.bruhat_beta(s3), wq)
    k = len(s3.hq_cosets)
    const = np.empty((s3.n, k), dtype=object)
    const[...] = Fraction(7, 2)
    out = fm.homotopy_h(s3, psi, wq, const, 0)
    assert all(out[g] == Fraction(7, 2) for g in range(s3.n))
    for _ in range(100):
        f = fm.random_rational_function((s3.n, k, k), rng)
        hf = fm.homotopy_h(s3, psi, wq, f, 1)
        assert max(abs(v) for v in hf.ravel()) <= max(abs(v) for v in f.ravel())


def test_homotopy_identity_exact(s3, rng):
    wq = fm.WeightedQuotient(s3, [Fraction(1, 3), Fraction(2, 3)])
    psi = fm.psi_kernel(s3, fm.bruhat_beta(s3), wq)
    k = len(s3.hq_cosets)
    for n in (1, 2, 3):
        for _ in range(10):
            f = fm.random_rational_function((s3.n,) + (k,) * n, rng)
            lhs = fm.homotopy_h(
                s3, psi, wq, fm.differential_group_picture(s3, f, n), n
            ) + fm.differential_group_picture(
                s3, fm.homotopy_h(s3, psi, wq, f, n - 1), n - 1
            )
            assert np.all(lhs == f)


def test_homotopy_equivariance_on_invariants(s3, rng):
    # H-invariant input stays H-invariant through the homotopy
    wq = fm.WeightedQuotient(s3, [Fraction(2, 5), Fraction(3, 5)])
    psi = fm.psi_kernel(s3, fm.bruhat_beta(s3), wq)
    f = fm.h_invariant_function(s3, 2, rng)
    hf = fm.homotopy_h(s3, psi, wq, f, 1)
    for g in range(s3.n):
        for h in s3.H:
            gh = int(s3.mul[g, h])
            hinv = int(s3.inv[h])
            for j in range(len(s3.hq_cosets)):
                assert hf[gh, s3.act_hq(hinv, j)] == hf[g, j]


def test_resolution_primitive_for_cocycles(s3, rng):
    # any H-invariant cocycle in low degree has the explicit primitive h f
    wq = fm.WeightedQuotient(s3, [Fraction(1, 3), Fraction(2, 3)])
    psi = fm.psi_kernel(s3, fm.bruhat_beta(s3), wq)
    for n in (1, 2):
        g_fun = fm.h_invariant_function(s3, n, rng)
        f = fm.differential_group_picture(s3, g_fun, n)  # a cocycle: d f = 0
        df = fm.differential_group_picture(s3, f, n + 1)
        assert np.all(df == Fraction(0))
        hf = fm.homotopy_h(s3, psi, wq, f, n)
        assert np.all(fm.differential_group_picture(s3, hf, n) == f)


def test_transfer_properties(s3, rng):
    wq = fm.WeightedQuotient(s3, [Fraction(1, 3), Fraction(2, 3)])
    s_1 = fm.fibered_product(s3, 1, wq)
    s_2 = fm.fibered_product(s3, 2, wq)
    L = s3.H
    # L-invariant random function: average over L
    raw = fm.random_rational_function(s_2, rng)
    f = {}
    for t in s_2.tuples:
        acc = Fraction(0)
        for l in L:
            acc += raw[tuple(s3.act_gq(l, c) for c in t)]
        f[t] = acc / len(L)
    tau = fm.transfer_tau(s_2, L, f)
    # G-invariance of the result
    for t in s_2.tuples:
        for g in range(s3.n):
            moved = tuple(s3.act_gq(g, c) for c in t)
            assert tau[moved] == tau[t]
    # left inverse on G-invariants
    ginv = {}
    for t in s_2.tuples:
        acc = Fraction(0)
        for g in range(s3.n):
            acc += raw[tuple(s3.act_gq(g, c) for c in t)]
        ginv[t] = acc / s3.n
    assert fm.transfer_tau(s_2, L, ginv) == ginv
    # commutes with the differential
    f1 = {}
    raw1 = fm.random_rational_function(s_1, rng)
    for t in s_1.tuples:
        acc = Fraction(0)
        for l in L:
            acc += raw1[tuple(s3.act_gq(l, c) for c in t)]
        f1[t] = acc / len(L)
    lhs = fm.transfer_tau(s_2, L, fm.differential_d(s_1, s_2, f1))
    rhs = fm.differential_d(s_1, s_2, fm.transfer_tau(s_1, L, f1))
    assert lhs == rhs


def test_transfer_full_group_is_identity(s3, rng):
    s_1 = fm.fibered_product(s3, 1)
    f = fm.random_rational_function(s_1, rng)
    L = frozenset(range(s3.n))
    assert fm.transfer_tau(s_1, L, _g_average(s3, s_1, f)) == _g_average(s3, s_1, f)


def _g_average(model, space, f):
    out = {}
    for t in space.tuples:
        acc = Fraction(0)
        for g in range(model.n):
            acc += f[tuple(model.act_gq(g, c) for c in t)]
        out[t] = acc / model.n
    return out


def test_transfer_rejects_noninvariant(s3, rng):
    s_2 = fm.fibered_product(s3, 2)
    f = fm.random_rational_function(s_2, rng)
    with pytest.raises(ValueError):
        fm.transfer_tau(s_2, s3.H, f)


def test_group_order_bound():
    # an 8-cycle and a transposition generate S8, order 40320 > the bound
    cycle = tuple(range(1, 8)) + (0,)
    swap = (1, 0) + tuple(range(2, 8))
    with pytest.raises(ValueError):
        fm._close_generators([cycle, swap], 8)


def test_orbit_map_equivariance(s3, rng):
    # the enumeration map (g, x1..xn) -> (g x1, .., g xn) intertwines left
    # translation with the diagonal action, exactly
    for _ in range(50):
        g = int(rng.integers(s3.n))
        h = int(rng.integers(s3.n))
        combo = [int(rng.integers(len(s3.hq_cosets))) for _ in range(2)]
        xs = [s3.hq_cosets[j] for j in combo]
        lhs = tuple(s3.act_gq(g, s3.act_gq(h, x)) for x in xs)
        gh = int(s3.mul[g, h])
        rhs = tuple(s3.act_gq(gh, x) for x in xs)
        assert lhs == rhs
