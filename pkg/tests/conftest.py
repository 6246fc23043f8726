import numpy as np
import pytest

from chaingeo import HermitianModel, ProjPoint, tangent


@pytest.fixture
def disc():
    return HermitianModel(1)


@pytest.fixture
def plane2():
    return HermitianModel(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_boundary(model, rng, n=1):
    u = rng.normal(size=(n, model.p)) + 1j * rng.normal(size=(n, model.p))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    lifts = np.concatenate([u, np.ones((n, 1), dtype=complex)], axis=1) / np.sqrt(2)
    pts = [ProjPoint(v, model=model, kind="boundary") for v in lifts]
    return pts[0] if n == 1 else pts


def random_interior(model, rng, spread=0.8):
    u = rng.normal(size=model.p) + 1j * rng.normal(size=model.p)
    u *= spread * rng.random() / np.linalg.norm(u)
    return ProjPoint(np.concatenate([u, [1.0 + 0j]]), model=model, kind="interior")


def random_tangent(model, rng, x):
    raw = rng.normal(size=model.dim) + 1j * rng.normal(size=model.dim)
    return tangent(model, x, raw)


def fit_circle(zs):
    """Kasa circle fit; returns (center, radius, max geometric residual)."""
    zs = np.asarray(zs)
    a = np.column_stack([2 * zs.real, 2 * zs.imag, np.ones(len(zs))])
    b = zs.real**2 + zs.imag**2
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    cx, cy, c0 = sol
    r = np.sqrt(c0 + cx * cx + cy * cy)
    center = cx + 1j * cy
    resid = float(np.max(np.abs(np.abs(zs - center) - r)))
    return center, r, resid
