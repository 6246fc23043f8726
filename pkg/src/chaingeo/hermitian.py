"""Signature-(p,1) Hermitian geometry of complex hyperbolic space.

The model is the cone of negative lines in C^{p+1} for the diagonal form

    <X, Y> = sum_{i<=p} X_i conj(Y_i)  -  X_{p+1} conj(Y_{p+1}),

with the metric normalized so the minimal holomorphic sectional curvature
is -1.  In this normalization the distance between negative lines is

    d(x, y) = 2 arccosh sqrt(delta),
    delta   = <X,Y><Y,X> / (<X,X><Y,Y>),

the Riemannian metric at a canonical lift X (i.e. <X,X> = -1) is
``g(u, v) = metric_scale * Re<u, v>`` on horizontal vectors, and the Kahler
form is ``omega(u, v) = g(Ju, v)`` with J multiplication by i.  The default
``metric_scale = 4`` is the unique value consistent with the curvature
normalization; it is validated by a finite-difference curvature oracle in
the test suite rather than assumed.

Geodesic triangles are filled by coning a vertex over the opposite side and
the Kahler area is computed by adaptive 2-D quadrature of the pulled-back
form.  All parameterizations below keep lifts polynomial or hyperbolic-
trigonometric in the parameters, so the pullback integrand is evaluated
from closed-form derivatives (no finite differencing inside the
quadrature).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quadrature import integrate_unit_square

__all__ = [
    "HermitianModel",
    "ProjPoint",
    "TangentVector",
    "TriangleArea",
    "inner",
    "distance",
    "geodesic",
    "exp_map",
    "unit_tangent_toward",
    "tangent",
    "metric_and_kahler",
    "triangle_area",
]

# relative tolerance deciding interior vs boundary classification
TOL_NULL = 1e-10


@dataclass(frozen=True)
class HermitianModel:
    """Ambient geometry: complex dimension p and metric normalization.

    ``metric_scale`` multiplies Re<u,v> on horizontal vectors at canonical
    lifts.  The default 4.0 gives minimal holomorphic sectional curvature
    -1 (so H^1_C is the curvature -1 Poincare disc).
    """

    p: int
    metric_scale: float = 4.0

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("complex dimension p must be >= 1")
        if self.metric_scale <= 0:
            raise ValueError("metric_scale must be positive")

    @property
    def dim(self):
        """Dimension of the ambient vector space, p + 1."""
        return self.p + 1

    @property
    def form_diagonal(self):
        d = np.ones(self.dim)
        d[-1] = -1.0
        return d

    @property
    def form_matrix(self):
        return np.diag(self.form_diagonal).astype(complex)

    def basepoint(self):
        """The origin: the negative line through e_{p+1}."""
        v = np.zeros(self.dim, dtype=complex)
        v[-1] = 1.0
        return ProjPoint(v, model=self)

    # arclength in the metric_scale normalization is (sqrt(s)/2) times the
    # scale-4 arclength used by the lift parameterizations below
    @property
    def _unit_per_scale4(self):
        return np.sqrt(self.metric_scale) / 2.0


def inner(model, X, Y):
    """Hermitian form <X, Y> of signature (p, 1); sesquilinear, linear in X.

    Accepts vectors or arrays of vectors (form applied along the last axis).
    """
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    if X.shape[-1] != model.dim or Y.shape[-1] != model.dim:
        raise ValueError(
            f"expected vectors of dimension {model.dim}, "
            f"got {X.shape[-1]} and {Y.shape[-1]}"
        )
    s = np.sum(X[..., :-1] * np.conj(Y[..., :-1]), axis=-1)
    return s - X[..., -1] * np.conj(Y[..., -1])


def _herm(X, Y):
    # form without the dimension check, for hot paths
    s = np.sum(X[..., :-1] * np.conj(Y[..., :-1]), axis=-1)
    return s - X[..., -1] * np.conj(Y[..., -1])


class ProjPoint:
    """Projective class of a nonzero vector: a point of H_C^p or its boundary.

    The stored lift is canonical: last coordinate real and positive, and
    <X,X> = -1 for interior points or Euclidean norm 1 for boundary points.
    Classification uses the relative tolerance TOL_NULL.
    """

    __slots__ = ("lift", "kind", "model")

    def __init__(self, lift, model, kind=None):
        v = np.asarray(lift, dtype=complex).copy()
        if v.shape != (model.dim,):
            raise ValueError(f"lift must have shape ({model.dim},)")
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise ValueError("lift must be nonzero")
        v /= nrm
        q = _herm(v, v).real  # |q| <= 1 after Euclidean normalization
        if kind is None:
            kind = "boundary" if abs(q) <= TOL_NULL else ("interior" if q < 0 else "exterior")
        if kind == "exterior" or (kind == "interior" and q >= 0):
            raise ValueError("vector does not span a negative or null line")
        if kind == "interior":
            v /= np.sqrt(-q)
        # pin the phase: last coordinate real positive (never zero on the
        # closed cone of nonpositive lines)
        last = v[-1]
        if abs(last) > 0:
            v *= np.conj(last) / abs(last)
        self.lift = v
        self.kind = kind
        self.model = model

    @property
    def is_interior(self):
        return self.kind == "interior"

    @property
    def is_boundary(self):
        return self.kind == "boundary"

    def __repr__(self):
        return f"ProjPoint({self.lift!r}, kind={self.kind!r})"

    def same_point_as(self, other, tol=1e-9):
        """Projective equality test (lift-independent).

        The distance is the norm of the phase-aligned difference of unit
        lifts, which stays accurate near zero (no sqrt(1 - cos^2)
        cancellation).
        """
        a = self.lift / np.linalg.norm(self.lift)
        b = other.lift / np.linalg.norm(other.lift)
        ph = np.vdot(b, a)
        if abs(ph) < 1e-300:
            return False
        return np.linalg.norm(a - b * (ph / abs(ph))) < tol


@dataclass
class TangentVector:
    """Horizontal representative of a tangent vector at an interior point.

    ``components`` satisfies <components, base.lift> = 0 at the canonical
    lift of the base point.
    """

    base: ProjPoint
    components: np.ndarray = field()

    def __post_init__(self):
        if not self.base.is_interior:
            raise ValueError("tangent vectors live at interior points")
        v = np.asarray(self.components, dtype=complex)
        if v.shape != self.base.lift.shape:
            raise ValueError("component shape mismatch")
        res = abs(_herm(v, self.base.lift))
        if res > 1e-12 * max(1.0, np.linalg.norm(v)):
            raise ValueError(f"components not horizontal (residual {res:.2e})")
        self.components = v

    def norm(self, model):
        g, _ = metric_and_kahler(model, self.base, self, self)
        return np.sqrt(g)


def tangent(model, base, raw):
    """Project a raw ambient vector to the horizontal tangent space at base."""
    X = base.lift
    v = np.asarray(raw, dtype=complex)
    v = v - (_herm(v, X) / _herm(X, X)) * X
    return TangentVector(base, v)


def distance(model, x, y):
    """Geodesic distance between interior points; 2 arccosh sqrt(delta)."""
    if not (x.is_interior and y.is_interior):
        raise ValueError("distance is defined for interior points")
    X, Y = x.lift, y.lift
    delta = (_herm(X, Y) * _herm(Y, X)).real / (_herm(X, X).real * _herm(Y, Y).real)
    delta = max(1.0, delta)  # guard rounding below 1
    return model.metric_scale ** 0.5 * np.arccosh(np.sqrt(delta))


def _aligned_pair(X, Y):
    """Phase-align Y against canonical interior X so <Y', X> is real < 0."""
    c = _herm(Y, X)
    r = abs(c)
    return -(r / c) * Y, r


def unit_tangent_toward(model, x, target):
    """Unit tangent vector at interior x pointing toward target.

    ``target`` may be interior or boundary; the returned TangentVector has
    g-norm 1.
    """
    X = x.lift
    T = target.lift
    if target.is_boundary:
        w = np.conj(-1.0 / _herm(X, T))
        Ts = w * T  # <X, Ts> = -1
        v = 0.5 * (Ts - X)  # derivative of e^{-t/2} X + sinh(t/2) Ts at t=0
    else:
        Tt, r = _aligned_pair(X, T)
        if r - 1.0 < 1e-14:
            raise ValueError("undefined direction: coincident points")
        v = 0.5 * (Tt - r * X) / np.sqrt(r * r - 1.0)
    n2 = _herm(v, v).real  # g-norm^2 is metric_scale * n2
    return TangentVector(x, v / np.sqrt(model.metric_scale * n2))


def geodesic(model, x, target, t):
    """Unit-speed geodesic from interior x toward target, at arclength t.

    ``geodesic(model, x, target, 0)`` is x; for an interior target,
    ``t = distance(x, target)`` lands on the target.
    """
    if not x.is_interior:
        raise ValueError("geodesic origin must be interior")
    X = x.lift
    tau = t / model.metric_scale ** 0.5 * 2.0  # scale-4 arclength
    if target.is_boundary:
        T = target.lift
        w = np.conj(-1.0 / _herm(X, T))
        Ts = w * T
        v = np.exp(-tau / 2.0) * X + np.sinh(tau / 2.0) * Ts
    else:
        Tt, r = _aligned_pair(X, target.lift)
        if r - 1.0 < 1e-14:
            raise ValueError("undefined direction: coincident points")
        U = (Tt - r * X) / np.sqrt(r * r - 1.0)
        v = np.cosh(tau / 2.0) * X + np.sinh(tau / 2.0) * U
    return ProjPoint(v, model=model, kind="interior")


def exp_map(model, x, v):
    """Riemannian exponential at interior x of the tangent vector v."""
    X = x.lift
    n2 = _herm(v.components, v.components).real
    if n2 <= 0.0:
        raise ValueError("tangent vector must have positive square")
    speed = model.metric_scale ** 0.5 * np.sqrt(n2)  # g-norm
    if speed < 1e-300:
        return x
    u = v.components / np.sqrt(n2)
    tau = speed / model.metric_scale ** 0.5 * 2.0
    return ProjPoint(np.cosh(tau / 2.0) * X + np.sinh(tau / 2.0) * u, model=model, kind="interior")


def metric_and_kahler(model, x, u, v):
    """Riemannian inner product and Kahler form at x, on tangent vectors u, v.

    Returns ``(g, omega)`` with ``g = s Re<u,v>`` and ``omega = -s Im<u,v>``
    for horizontal components at the canonical lift, ``s = metric_scale``.
    ``omega(u, v) = g(Ju, v)`` for J = multiplication by i.
    """
    if u.base is not x and not u.base.same_point_as(x):
        raise ValueError("tangent vector u not based at x")
    if v.base is not x and not v.base.same_point_as(x):
        raise ValueError("tangent vector v not based at x")
    ip = _herm(u.components, v.components)
    pi = _herm(v.components, u.components)
    s = model.metric_scale
    # antisymmetrized so that omega(u, u) = 0 and omega(u, v) = -omega(v, u)
    # hold exactly in floating point, not just to rounding
    return s * 0.5 * (ip.real + pi.real), -s * 0.5 * (ip.imag - pi.imag)


# ---------------------------------------------------------------------------
# triangle area: adaptive quadrature of the Kahler form over a cone filling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TriangleArea:
    """Result of a Kahler-area quadrature; degenerate triples carry value 0."""

    value: float
    err_estimate: float
    degenerate: bool = False
    panels: int = 0

    def __float__(self):
        return self.value


def _omega_on_lifts(scale, C, V, W):
    """Kahler form on arbitrary lifts: C base lift (<C,C> < 0), V, W lift
    derivatives of curves through [C].  Invariant under pointwise rescaling
    of the lift family."""
    mu = _herm(C, C).real
    a = _herm(V, C)
    b = _herm(W, C)
    hor = _herm(V, W) - a * np.conj(b) / mu
    return scale * hor.imag / mu


def _side_curve(Y, ykind, Z, zkind):
    """Lift parameterization S(t), t in [0,1], of the geodesic [y, z].

    Returns callables S, S', M, M' with M(t) = -<S,S> > 0 on (0,1).  The
    lifts are polynomial (ideal ends) or hyperbolic-trigonometric
    (interior ends) in t so that derivatives are exact.
    """
    if ykind == "interior" and zkind == "interior":
        Zt, r = _aligned_pair(Y, Z)
        n = np.sqrt(r * r - 1.0)
        U = (Zt - r * Y) / n
        D = np.arccosh(r)

        def S(t):
            return np.cosh(t * D)[..., None] * Y + np.sinh(t * D)[..., None] * U

        def Sp(t):
            return D * (np.sinh(t * D)[..., None] * Y + np.cosh(t * D)[..., None] * U)

        def M(t):
            return np.ones_like(t)

        def Mp(t):
            return np.zeros_like(t)

    elif ykind == "interior":  # z ideal
        w = np.conj(-1.0 / _herm(Y, Z))
        Zs = w * Z

        def S(t):
            return ((1 - t) ** 2)[..., None] * Y + (t * (2 - t) / 2)[..., None] * Zs

        def Sp(t):
            return (-2 * (1 - t))[..., None] * Y + (1 - t)[..., None] * Zs

        def M(t):
            return (1 - t) ** 2

        def Mp(t):
            return -2 * (1 - t)

    elif zkind == "interior":  # y ideal
        w = np.conj(-1.0 / _herm(Z, Y))
        Ys = w * Y

        def S(t):
            return (t**2)[..., None] * Z + ((1 - t * t) / 2)[..., None] * Ys

        def Sp(t):
            return (2 * t)[..., None] * Z + (-t)[..., None] * Ys

        def M(t):
            return t**2

        def Mp(t):
            return 2 * t

    else:  # both ideal
        c0 = _herm(Z, Y)
        Zs = -Z / c0  # <Y, Zs> = <Zs, Y> = -1

        def S(t):
            return ((1 - t) ** 2)[..., None] * Y + (t**2)[..., None] * Zs

        def Sp(t):
            return (-2 * (1 - t))[..., None] * Y + (2 * t)[..., None] * Zs

        def M(t):
            return 2.0 * (t**2) * ((1 - t) ** 2)

        def Mp(t):
            return 2.0 * (2 * t * (1 - t) ** 2 - 2 * (t**2) * (1 - t))

    return S, Sp, M, Mp


def _cone_integrand(scale, A, akind, side):
    """Pullback of the Kahler form under the cone map from vertex A over a
    side curve; vectorized in the quadrature parameters (sigma, tau)."""
    S, Sp, M, Mp = side

    def F(sig, tau):
        Sv = S(tau)
        Spv = Sp(tau)
        Mv = M(tau)
        Mpv = Mp(tau)
        c = _herm(Sv, A)
        cp = _herm(Spv, A)
        if akind == "interior":
            r = np.abs(c)
            rp = (np.conj(c) * cp).real / r
            chi = r / np.sqrt(Mv)
            chip = rp / np.sqrt(Mv) - r * Mpv / (2.0 * Mv**1.5)
            ph = c / r
            php = cp / r - c * rp / r**2
            St = -Sv / ph[..., None]
            Stp = -Spv / ph[..., None] + Sv * (php / ph**2)[..., None]
            Wv = St - r[..., None] * A
            Wp = Stp - rp[..., None] * A
            n2 = r * r - Mv
            n = np.sqrt(n2)
            nd = (2.0 * r * rp - Mpv) / (2.0 * n)
            Wh = Wv / n[..., None]
            Whp = Wp / n[..., None] - Wv * (nd / n2)[..., None]
            Th = np.arccosh(np.maximum(chi, 1.0))
            Thp = chip / np.sqrt(np.maximum(chi * chi - 1.0, 1e-300))
            ch = np.cosh(sig * Th)
            sh = np.sinh(sig * Th)
            Phi = ch[..., None] * A + sh[..., None] * Wh
            dsig = Th[..., None] * (sh[..., None] * A + ch[..., None] * Wh)
            dtau = (sig * Thp)[..., None] * (sh[..., None] * A + ch[..., None] * Wh) + sh[
                ..., None
            ] * Whp
            return _omega_on_lifts(scale, Phi, dsig, dtau)
        # ideal vertex: sigma runs from the side (0) toward the vertex (1),
        # reversing the orientation of the (sigma, tau) frame
        q = Mv / np.conj(c)
        qp = Mpv / np.conj(c) - Mv * np.conj(cp) / np.conj(c) ** 2
        one = 1.0 - sig
        Phi = (one**2)[..., None] * Sv - (sig * (2 - sig) / 2)[..., None] * (q[..., None] * A)
        dsig = (-2 * one)[..., None] * Sv - one[..., None] * (q[..., None] * A)
        dtau = (one**2)[..., None] * Spv - (sig * (2 - sig) / 2)[..., None] * (qp[..., None] * A)
        return -_omega_on_lifts(scale, Phi, dsig, dtau)

    return F


def triangle_area(model, x, y, z, tol=1e-6):
    """Signed Kahler area of the geodesic triangle (x, y, z).

    The filling cones the first vertex over the geodesic side [y, z] and
    the integral is independent of which vertex cones (up to quadrature
    tolerance).  The value is alternating in the arguments and bounded by
    pi in absolute value for the curvature normalization metric_scale = 4.
    Degenerate triples (two projectively equal points) return 0 with the
    ``degenerate`` flag set.
    """
    for a, b in ((x, y), (y, z), (z, x)):
        if a.kind == b.kind and a.same_point_as(b):
            return TriangleArea(0.0, 0.0, degenerate=True)
    side = _side_curve(y.lift, y.kind, z.lift, z.kind)
    F = _cone_integrand(model.metric_scale, x.lift, x.kind, side)
    val, err, n = integrate_unit_square(F, tol=tol)
    return TriangleArea(val, err, degenerate=False, panels=n)
