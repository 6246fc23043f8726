import numpy as np
import pytest

from chaingeo import (
    BoundarySampleMap,
    HermitianModel,
    NoRigidModelError,
    chain_compatibility_check,
    fit_embedding,
    verify_embedding,
)
from chaingeo.chains import cartan_triple_lifts
from chaingeo.verify import _planted_sample_map


def test_sample_map_minimum_count(plane2, rng):
    from conftest import random_boundary

    pairs = [
        (random_boundary(plane2, rng), random_boundary(plane2, rng)) for _ in range(5)
    ]
    with pytest.raises(ValueError):
        BoundarySampleMap(pairs=pairs, p=2, q=2)


def test_compatibility_planted(rng):
    smap, _, _ = _planted_sample_map(rng, 2, 3, 152)
    rep = chain_compatibility_check(smap, seed=1)
    assert rep.cochain_triples > 0
    assert rep.image_cochain_fraction == 1.0
    assert rep.orientation_match_fraction == 1.0
    assert rep.image_generic_fraction == 1.0


def test_compatibility_scrambled(rng):
    smap, _, _ = _planted_sample_map(rng, 2, 2, 152, scramble=True)
    rep = chain_compatibility_check(smap, seed=1)
    assert rep.image_cochain_fraction < 0.2  # measure-theoretic baseline


def test_compatibility_conjugated_orientation(rng):
    smap, _, _ = _planted_sample_map(rng, 2, 2, 152, conjugate=True)
    rep = chain_compatibility_check(smap, seed=1)
    assert rep.image_cochain_fraction == 1.0
    assert rep.orientation_match_fraction == 0.0


def test_fit_identity(rng):
    model = HermitianModel(2)
    from conftest import random_boundary

    pts = [random_boundary(model, rng) for _ in range(40)]
    from chaingeo.chains import chain_through, sample_chain_point

    # add chain structure so the compatibility gate has material
    from chaingeo import VisualMeasure

    nu = VisualMeasure(model, seed=2)
    for _ in range(10):
        a, b = nu.sample_points(2, rng=rng)
        C = chain_through(model, a, b)
        pts.extend(sample_chain_point(C, t) for t in rng.uniform(0, 6.28, size=4))
    pairs = [(p, p) for p in pts]
    smap = BoundarySampleMap(pairs=pairs, p=2, q=2)
    emb, diags = fit_embedding(smap, seed=0)
    w = emb.matrix / emb.matrix[0, 0]
    assert np.linalg.norm(w - np.eye(3)) < 1e-8
    assert diags.median_residual < 1e-10


def test_fit_planted_with_holdout(rng):
    smap, emb, g = _planted_sample_map(rng, 2, 3, 152)
    fitted, diags = fit_embedding(smap, seed=0)
    assert diags.mode == "holomorphic"
    truth = g.matrix @ emb.matrix
    model = HermitianModel(2)
    from chaingeo import VisualMeasure

    held = VisualMeasure(model, seed=77).sample_lifts(100)
    a = held @ truth.T
    b = held @ fitted.matrix.T
    ip = np.abs(np.sum(a * np.conj(b), axis=1))
    cos2 = (ip / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))) ** 2
    assert np.sqrt(np.clip(1 - cos2, 0, 1)).max() < 1e-6


def test_fit_corrupted_fraction_reported(rng):
    smap, emb, g = _planted_sample_map(rng, 2, 2, 152)
    n = len(smap.pairs)
    n_bad = n // 20  # 5%
    model_q = HermitianModel(2)
    bad_idx = rng.choice(n, size=n_bad, replace=False)
    from conftest import random_boundary

    pairs = list(smap.pairs)
    for i in bad_idx:
        pairs[i] = (pairs[i][0], random_boundary(model_q, rng))
    corrupted = BoundarySampleMap(pairs=pairs, p=2, q=2)
    fitted, diags = fit_embedding(corrupted, seed=0)
    report = verify_embedding(fitted, corrupted, tol=1e-6, mode=diags.mode)
    assert abs(report["fraction"] - (1 - n_bad / n)) < 0.02
    assert set(bad_idx).issubset(set(report["failing"]))


def test_fit_antiholomorphic(rng):
    smap, _, _ = _planted_sample_map(rng, 2, 2, 152, conjugate=True)
    fitted, diags = fit_embedding(smap, seed=0)
    assert diags.mode == "antiholomorphic"
    report = verify_embedding(fitted, smap, tol=1e-6, mode="antiholomorphic")
    assert report["fraction"] == 1.0


def test_fit_rejects_scramble(rng):
    smap, _, _ = _planted_sample_map(rng, 2, 2, 152, scramble=True)
    with pytest.raises(NoRigidModelError):
        fit_embedding(smap, seed=0)


def test_cartan_transport_of_fit(rng):
    smap, emb, g = _planted_sample_map(rng, 2, 3, 152)
    fitted, _ = fit_embedding(smap, seed=0)
    model = HermitianModel(2)
    from chaingeo import VisualMeasure

    lifts = VisualMeasure(model, seed=5).sample_lifts(60)
    worst = 0.0
    for k in range(0, 60, 3):
        tri = lifts[k : k + 3]
        cp = cartan_triple_lifts(tri[0][None], tri[1][None], tri[2][None])[0]
        img = tri @ fitted.matrix.T
        cq = cartan_triple_lifts(img[0][None], img[1][None], img[2][None])[0]
        worst = max(worst, abs(cp - cq))
    assert worst < 1e-8
