"""Chains, the angular invariant of boundary triples, and the Heisenberg chart.

A chain is the boundary circle of a complex geodesic: the null lines of a
signature-(1,1) plane in C^{p+1}.  It is determined by any two of its
points and carries a canonical orientation (the complex orientation of the
disc it bounds).  The angular invariant of a boundary triple is

    c(x1, x2, x3) = (2/pi) arg(-<v1,v2><v2,v3><v3,v1>)

for arbitrary lifts v_i; it is lift-independent, alternating, takes values
in [-1, 1], and has |c| = 1 exactly on pairwise-distinct triples lying on
one chain.  The sign is calibrated so the positively oriented triple
(1, i, -1) on the unit circle of H^1_C gives +1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermitian import HermitianModel, ProjPoint, _herm

__all__ = [
    "Chain",
    "ChainConfig",
    "cartan_invariant",
    "cartan_invariant_flagged",
    "cartan_triple_lifts",
    "chain_through",
    "chain_contains",
    "k_plane_through",
    "plane_contains",
    "sample_chain_point",
    "heisenberg_projection",
]

DEGENERACY_TOL = 1e-12


def cartan_triple_lifts(lifts1, lifts2, lifts3):
    """Vectorized angular invariant from raw boundary lifts (last axis = C^{p+1}).

    Degenerate triples (vanishing triple product) give 0.
    """
    t = _herm(lifts1, lifts2) * _herm(lifts2, lifts3) * _herm(lifts3, lifts1)
    out = (2.0 / np.pi) * np.angle(-t)
    return np.where(np.abs(t) < DEGENERACY_TOL, 0.0, out)


def cartan_invariant_flagged(model, x1, x2, x3):
    """Angular invariant of a boundary triple, plus a degeneracy flag."""
    for x in (x1, x2, x3):
        if not x.is_boundary:
            raise ValueError("the angular invariant is defined on boundary points")
    t = _herm(x1.lift, x2.lift) * _herm(x2.lift, x3.lift) * _herm(x3.lift, x1.lift)
    if abs(t) < DEGENERACY_TOL:
        return 0.0, True
    return float((2.0 / np.pi) * np.angle(-t)), False


def cartan_invariant(model, x1, x2, x3):
    """Angular invariant in [-1, 1]; 0 for degenerate triples."""
    value, _ = cartan_invariant_flagged(model, x1, x2, x3)
    return value


@dataclass
class Chain:
    """Boundary circle of a complex geodesic, as a (1,1) plane in C^{p+1}."""

    span: np.ndarray  # (p+1, 2), columns spanning the plane
    orientation: int
    model: HermitianModel

    def __post_init__(self):
        s = np.asarray(self.span, dtype=complex)
        if s.shape != (self.model.dim, 2) or np.linalg.matrix_rank(s) != 2:
            raise ValueError("span must be two independent vectors")
        gram = np.array(
            [[_herm(s[:, i], s[:, j]) for j in range(2)] for i in range(2)]
        )
        ev = np.linalg.eigvalsh(gram)
        if not (ev[0] < -1e-10 and ev[1] > 1e-10):
            raise ValueError("span is not of signature (1,1)")
        if self.orientation not in (+1, -1):
            raise ValueError("orientation must be +1 or -1")
        object.__setattr__(self, "span", s)
        # cache an orthonormalized (positive, negative) basis for sampling
        neg, pos = self._split_basis(s)
        self._pos = pos
        self._neg = neg

    @staticmethod
    def _split_basis(s):
        """Gram-Schmidt a (negative, positive) orthonormal pair out of the span."""
        xi, eta = s[:, 0], s[:, 1]
        u = _herm(eta, xi)
        if abs(u) < 1e-14:
            # xi already negative or positive; mix differently
            cand = xi + eta
        else:
            cand = xi - (np.conj(u) / abs(u)) * eta
        q = _herm(cand, cand).real
        if q >= 0:
            cand = xi + (np.conj(u) / abs(u)) * eta
            q = _herm(cand, cand).real
        neg = cand / np.sqrt(-q)
        praw = xi + _herm(xi, neg) * neg
        p2 = _herm(praw, praw).real
        if p2 < 1e-14:
            praw = eta + _herm(eta, neg) * neg
            p2 = _herm(praw, praw).real
        pos = praw / np.sqrt(p2)
        return neg, pos

    def reversed(self):
        return Chain(self.span, -self.orientation, self.model)


@dataclass
class ChainConfig:
    """A chain together with k boundary points lying on it."""

    chain: Chain
    points: list

    def __post_init__(self):
        for pt in self.points:
            if not chain_contains(self.chain, pt):
                raise ValueError("configuration point not on the chain")


def chain_through(model, xi, eta):
    """The unique chain through two distinct boundary points.

    Carries the canonical (+1) complex orientation.
    """
    if not (xi.is_boundary and eta.is_boundary):
        raise ValueError("chains pass through boundary points")
    if xi.same_point_as(eta):
        raise ValueError("chain through equal points is not defined")
    span = np.column_stack([xi.lift, eta.lift])
    return Chain(span, orientation=+1, model=model)


def chain_contains(C, zeta, tol=1e-8):
    """Whether a boundary point lies on the chain (projective residual test)."""
    s = C.span
    # least-squares distance of the lift to the span, relative to its norm
    q, _ = np.linalg.qr(s)
    v = zeta.lift
    res = v - q @ (q.conj().T @ v)
    return np.linalg.norm(res) <= tol * np.linalg.norm(v)


def k_plane_through(model, points):
    """Span of k+1 boundary points in general position: a k-plane.

    Returns an orthonormal (Euclidean) basis of the span; raises if the
    restricted form is not of signature (k, 1).
    """
    lifts = np.column_stack([p.lift for p in points])
    k = lifts.shape[1] - 1
    q, r = np.linalg.qr(lifts)
    rank = int(np.sum(np.abs(np.diag(r)) > 1e-10 * abs(r[0, 0])))
    if rank != k + 1:
        raise ValueError("points are not in general position")
    basis = q[:, : k + 1]
    gram = basis.conj().T @ np.diag(model.form_diagonal) @ basis
    ev = np.linalg.eigvalsh(gram)
    if not (ev[0] < -1e-10 and np.all(ev[1:] > 1e-10)):
        raise ValueError("span is degenerate or of wrong signature")
    return basis


def plane_contains(model, basis, zeta, tol=1e-8):
    """Membership of a boundary point in a k-plane given by a basis."""
    v = zeta.lift
    res = v - basis @ (basis.conj().T @ v)
    return np.linalg.norm(res) <= tol * np.linalg.norm(v)


def sample_chain_point(C, t):
    """Boundary point of the chain at angle t; injective on [0, 2pi).

    Increasing t traverses the chain positively for orientation +1: three
    increasing angles within one period have angular invariant equal to the
    chain's orientation.
    """
    tt = C.orientation * np.asarray(t, dtype=float)
    if np.ndim(tt) == 0:
        v = np.exp(1j * tt) * C._pos + C._neg
        return ProjPoint(v, model=C.model, kind="boundary")
    return [
        ProjPoint(np.exp(1j * a) * C._pos + C._neg, model=C.model, kind="boundary")
        for a in tt
    ]


# ---------------------------------------------------------------------------
# Heisenberg projection for p = 2
# ---------------------------------------------------------------------------


def _null_frame(model, xi):
    """Deterministic basis (E_plus, E_1, E_minus) with xi = [E_plus].

    Gram matrix of the frame is [[0,0,-1],[0,1,0],[-1,0,0]]; used to read
    off Heisenberg coordinates adapted to xi.
    """
    X = xi.lift
    # opposite null partner: flipping the sign of the last coordinate of a
    # null vector gives another null vector pairing to its Euclidean norm,
    # so the pairing never vanishes
    Y = X.copy()
    Y[-1] = -Y[-1]
    # scale so <X, Y> = -1 (then <Y, X> = -1 as well)
    Y = Y * np.conj(-1.0 / _herm(X, Y))
    # positive unit vector J-orthogonal to both
    E = None
    for k in range(3):
        e = np.zeros(3, dtype=complex)
        e[k] = 1.0
        v = e + _herm(e, Y) * X + _herm(e, X) * Y  # remove span(X, Y) components
        n2 = _herm(v, v).real
        if n2 > 1e-8:
            E = v / np.sqrt(n2)
            break
    return np.column_stack([X, E, Y])


def heisenberg_projection(model, xi, zeta):
    """Chart C of the boundary punctured at xi whose fibers are the chains
    through xi.

    The frame adapted to xi identifies the unipotent radical N of the
    stabilizer with the Heisenberg group C x R; the map returns the
    N/Z(N)-coordinate of zeta.  Chains through xi project to points, chains
    missing xi project bijectively to Euclidean circles, and the chart is
    equivariant for the quotient of the stabilizer onto the complex affine
    group of C.
    """
    if model.p != 2:
        raise ValueError("the Heisenberg chart is implemented for p = 2")
    if not (xi.is_boundary and zeta.is_boundary):
        raise ValueError("boundary points required")
    if xi.same_point_as(zeta):
        raise ValueError("zeta must differ from the chart's center xi")
    B = _null_frame(model, xi)
    v = np.linalg.solve(B, zeta.lift)  # coordinates (v_plus, v_1, v_minus)
    if abs(v[2]) < 1e-14 * np.linalg.norm(v):
        raise ValueError("zeta coincides with the chart's center xi")
    return complex(np.conj(v[1] / v[2]))
