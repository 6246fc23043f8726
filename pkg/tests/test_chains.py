import numpy as np
import pytest
from numpy.testing import assert_allclose

from chaingeo import (
    ProjPoint,
    cartan_invariant,
    cartan_invariant_flagged,
    chain_contains,
    chain_through,
    heisenberg_projection,
    k_plane_through,
    sample_chain_point,
)
from chaingeo.chains import cartan_triple_lifts
from chaingeo.isometries import apply_isometry, random_isometry

from conftest import fit_circle, random_boundary


def circle_point(z, model):
    return ProjPoint(np.array([z, 1.0]), model=model, kind="boundary")


def test_cartan_degenerate_flag(disc, rng):
    xi = circle_point(1.0, disc)
    eta = circle_point(1j, disc)
    val, deg = cartan_invariant_flagged(disc, xi, xi, eta)
    assert val == 0.0 and deg


def test_cartan_calibration_triple(disc):
    # direct-expansion oracle: lifts (1,1), (i,1), (-1,1) give triple
    # product (-1-i)(-1-i)(-2) = -4i, so arg(4i) = pi/2 and c = +1
    t = (1 * np.conj(1j) - 1) * (1j * np.conj(-1) - 1) * (-1 * np.conj(1) - 1)
    assert_allclose(t, -4j, atol=1e-15)
    pts = [circle_point(z, disc) for z in (1.0, 1j, -1.0)]
    assert_allclose(cartan_invariant(disc, *pts), 1.0, atol=1e-14)


def test_cartan_alternating_and_bounded(plane2, rng):
    pts = random_boundary(plane2, rng, n=3)
    c1 = cartan_invariant(plane2, *pts)
    c2 = cartan_invariant(plane2, pts[1], pts[0], pts[2])
    assert_allclose(c1, -c2, atol=1e-12)
    assert abs(c1) <= 1.0


def test_cartan_lift_independent(plane2, rng):
    lifts = np.stack([random_boundary(plane2, rng).lift for _ in range(3)])
    c1 = cartan_triple_lifts(lifts[0][None], lifts[1][None], lifts[2][None])[0]
    scales = np.array([2.0 * np.exp(0.7j), -3.1, 0.2 - 1.4j])
    scaled = lifts * scales[:, None]
    c2 = cartan_triple_lifts(scaled[0][None], scaled[1][None], scaled[2][None])[0]
    assert_allclose(c1, c2, atol=1e-12)


def test_cartan_cocycle_identity(plane2, rng):
    n = 2000
    x = [np.stack([random_boundary(plane2, rng).lift for _ in range(n)]) for _ in range(4)]
    c = cartan_triple_lifts
    alt = (
        c(x[1], x[2], x[3])
        - c(x[0], x[2], x[3])
        + c(x[0], x[1], x[3])
        - c(x[0], x[1], x[2])
    )
    assert np.max(np.abs(alt)) < 1e-9


def test_chain_through_contains_defining_points(plane2, rng):
    a, b = random_boundary(plane2, rng), random_boundary(plane2, rng)
    C = chain_through(plane2, a, b)
    assert chain_contains(C, a) and chain_contains(C, b)
    with pytest.raises(ValueError):
        chain_through(plane2, a, a)


def test_chain_membership_span_oracle(plane2):
    e = lambda v: ProjPoint(np.array(v, dtype=complex), model=plane2)
    a, b = e([1, 0, 1]), e([-1, 0, 1])
    C = chain_through(plane2, a, b)
    probe = e([1j, 0, 1])
    # rank-2 span membership oracle: least-squares residual of the lift
    span = np.column_stack([a.lift, b.lift])
    coef, res, *_ = np.linalg.lstsq(span, probe.lift, rcond=None)
    assert np.linalg.norm(span @ coef - probe.lift) < 1e-12
    assert chain_contains(C, probe)
    assert not chain_contains(C, e([0, 1, 1]))


def test_chain_triples_are_extremal(plane2, rng):
    a, b = random_boundary(plane2, rng), random_boundary(plane2, rng)
    C = chain_through(plane2, a, b)
    pts = [sample_chain_point(C, t) for t in (0.4, 2.0, 5.2)]
    assert abs(abs(cartan_invariant(plane2, *pts)) - 1.0) < 1e-9


def test_generic_triples_not_extremal(plane2, rng):
    for _ in range(50):
        pts = random_boundary(plane2, rng, n=3)
        assert abs(cartan_invariant(plane2, *pts)) < 1 - 1e-4


def test_k_plane_whole_space_and_chain_cases(plane2, rng):
    e = lambda v: ProjPoint(np.array(v, dtype=complex), model=plane2)
    # three generic boundary points span all of C^3 (rank oracle)
    generic = [e([1, 0, 1]), e([0, 1, 1]), e([1j / np.sqrt(2), 0.5, 1])]
    lifts = np.column_stack([p.lift for p in generic])
    assert np.linalg.matrix_rank(lifts) == 3
    basis = k_plane_through(plane2, generic)
    assert basis.shape == (3, 3)
    # three co-chain points only span the chain plane
    a, b = e([1, 0, 1]), e([-1, 0, 1])
    C = chain_through(plane2, a, b)
    cochain = [a, b, sample_chain_point(C, 1.0)]
    with pytest.raises(ValueError):
        k_plane_through(plane2, cochain)  # rank 2, not in general position


def test_k1_plane_agrees_with_chain(plane2, rng):
    a, b = random_boundary(plane2, rng), random_boundary(plane2, rng)
    basis = k_plane_through(plane2, [a, b])
    C = chain_through(plane2, a, b)
    for t in np.linspace(0, 2 * np.pi, 10, endpoint=False):
        pt = sample_chain_point(C, t)
        res = pt.lift - basis @ (basis.conj().T @ pt.lift)
        assert np.linalg.norm(res) < 1e-9


def test_sample_chain_point_periodicity(plane2, rng):
    a, b = random_boundary(plane2, rng), random_boundary(plane2, rng)
    C = chain_through(plane2, a, b)
    p = sample_chain_point(C, 0.9)
    q = sample_chain_point(C, 0.9 + 2 * np.pi)
    assert p.same_point_as(q)
    assert chain_contains(C, p)


def test_sample_chain_orientation_calibration(plane2, rng):
    a, b = random_boundary(plane2, rng), random_boundary(plane2, rng)
    C = chain_through(plane2, a, b)
    ts = np.sort(rng.uniform(0, 2 * np.pi, size=3))
    pts = [sample_chain_point(C, t) for t in ts]
    assert_allclose(cartan_invariant(plane2, *pts), C.orientation, atol=1e-9)
    rev = C.reversed()
    pts_r = [sample_chain_point(rev, t) for t in ts]
    assert_allclose(cartan_invariant(plane2, *pts_r), rev.orientation, atol=1e-9)


def test_chains_map_to_chains_under_isometries(plane2, rng):
    g = random_isometry(2, seed=31)
    a, b = random_boundary(plane2, rng), random_boundary(plane2, rng)
    C = chain_through(plane2, a, b)
    gC = chain_through(plane2, apply_isometry(g, a), apply_isometry(g, b))
    for t in np.linspace(0, 2 * np.pi, 50, endpoint=False):
        moved = apply_isometry(g, sample_chain_point(C, t))
        assert chain_contains(gC, moved)


def test_heisenberg_fibers_are_chains(plane2, rng):
    xi = random_boundary(plane2, rng)
    other = random_boundary(plane2, rng)
    C = chain_through(plane2, xi, other)
    zs = [
        heisenberg_projection(plane2, xi, sample_chain_point(C, t))
        for t in (0.3, 1.1, 2.8, 4.4)
    ]
    assert max(abs(z - zs[0]) for z in zs) < 1e-9


def test_heisenberg_chain_image_is_circle(plane2, rng):
    xi = random_boundary(plane2, rng)
    a, b = random_boundary(plane2, rng), random_boundary(plane2, rng)
    C = chain_through(plane2, a, b)
    zs = np.array(
        [
            heisenberg_projection(plane2, xi, sample_chain_point(C, t))
            for t in np.linspace(0, 2 * np.pi, 50, endpoint=False)
        ]
    )
    _, _, resid = fit_circle(zs)
    assert resid < 1e-7


def test_heisenberg_projective_well_defined(plane2, rng):
    xi = random_boundary(plane2, rng)
    zeta = random_boundary(plane2, rng)
    z1 = heisenberg_projection(plane2, xi, zeta)
    rescaled = ProjPoint(np.exp(0.83j) * 2.5 * zeta.lift, model=plane2, kind="boundary")
    z2 = heisenberg_projection(plane2, xi, rescaled)
    assert abs(z1 - z2) < 1e-12


def test_heisenberg_rejects_coincident(plane2, rng):
    xi = random_boundary(plane2, rng)
    with pytest.raises(ValueError):
        heisenberg_projection(plane2, xi, xi)


def test_heisenberg_requires_p2(disc, rng):
    xi = circle_point(1.0, disc)
    zeta = circle_point(1j, disc)
    with pytest.raises(ValueError):
        heisenberg_projection(disc, xi, zeta)


def test_chain_config_validates_membership(plane2, rng):
    from chaingeo import ChainConfig

    a, b = random_boundary(plane2, rng), random_boundary(plane2, rng)
    C = chain_through(plane2, a, b)
    pts = [sample_chain_point(C, t) for t in (0.2, 1.0, 3.3)]
    cfg = ChainConfig(chain=C, points=pts)
    assert len(cfg.points) == 3
    with pytest.raises(ValueError):
        ChainConfig(chain=C, points=[random_boundary(plane2, rng)])


def test_heisenberg_unique_chain_over_circle(plane2, rng):
    # a circle image determines the chain through a given preimage point:
    # the original chain reproduces its circle, while other chains through
    # the same point project to different circles
    xi = random_boundary(plane2, rng)
    a, b = random_boundary(plane2, rng), random_boundary(plane2, rng)
    C = chain_through(plane2, a, b)
    circle = [
        heisenberg_projection(plane2, xi, sample_chain_point(C, t))
        for t in np.linspace(0, 2 * np.pi, 24, endpoint=False)
    ]
    _, _, resid = fit_circle(np.array(circle))
    assert resid < 1e-7
    s = sample_chain_point(C, 1.234)
    for _ in range(5):
        other = chain_through(plane2, s, random_boundary(plane2, rng))
        img = [
            heisenberg_projection(plane2, xi, sample_chain_point(other, t))
            for t in np.linspace(0, 2 * np.pi, 12, endpoint=False)
        ]
        # different chain through s => its circle differs from the original
        center, r, _ = fit_circle(np.array(circle))
        off = max(abs(abs(z - center) - r) for z in img)
        assert off > 1e-4


def test_sample_chain_point_injective(plane2, rng):
    a, b = random_boundary(plane2, rng), random_boundary(plane2, rng)
    C = chain_through(plane2, a, b)
    ts = np.linspace(0, 2 * np.pi, 40, endpoint=False)
    pts = [sample_chain_point(C, t) for t in ts]
    for i in range(len(pts)):
        assert not pts[i].same_point_as(pts[(i + 1) % len(pts)])


def test_heisenberg_stabilizer_acts_affinely(plane2, rng):
    # the chart intertwines the stabilizer of xi with complex-affine maps:
    # conjugating a Heisenberg element into the frame of xi and reading it
    # through the chart must give a map fitted exactly by lam*z + c
    from chaingeo import Isometry, apply_isometry, fit_affine
    from chaingeo.chains import _null_frame

    xi = random_boundary(plane2, rng)
    B = _null_frame(plane2, xi)
    a = 0.4 - 0.2j
    n = np.eye(3, dtype=complex)
    n[0, 1] = a
    n[1, 2] = np.conj(a)
    n[0, 2] = abs(a) ** 2 / 2 + 0.15j
    h = Isometry(B @ n @ np.linalg.inv(B), 2)
    assert apply_isometry(h, xi).same_point_as(xi)
    zs, ws = [], []
    for _ in range(12):
        zeta = random_boundary(plane2, rng)
        zs.append(heisenberg_projection(plane2, xi, zeta))
        ws.append(heisenberg_projection(plane2, xi, apply_isometry(h, zeta)))
    lam, c, diag = fit_affine(list(zip(zs, ws)))
    assert diag["mode"] == "affine" and diag["residual"] < 1e-9
