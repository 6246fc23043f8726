"""Elements of U(p,1)/PU(p,1): action, classification, embeddings, sampling.

Matrices are stored up to a positive scalar (the form is preserved up to
lambda > 0), so no determinant normalization is enforced; projective
isometry groups act through these representatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .hermitian import HermitianModel, ProjPoint, TangentVector

__all__ = [
    "Isometry",
    "EmbeddingMap",
    "apply_isometry",
    "apply_tangent",
    "classify",
    "standard_embedding",
    "random_isometry",
    "rotation_about_origin",
    "translation_along_axis",
]

TOL_CLS = 1e-8  # eigenvalue-modulus spread threshold for hyperbolicity


@dataclass(frozen=True)
class Isometry:
    """A (p+1)x(p+1) complex matrix with M* J M = lambda J, lambda > 0."""

    matrix: np.ndarray
    source_p: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        n = self.source_p + 1
        if m.shape != (n, n):
            raise ValueError(f"matrix must be {n}x{n}")
        lam = self.form_scale()
        if lam <= 0:
            raise ValueError("matrix does not preserve the form positively")
        J = _form_diag(self.source_p)
        res = np.linalg.norm(m.conj().T @ np.diag(J) @ m - lam * np.diag(J))
        if res > 1e-10 * max(1.0, np.linalg.norm(m) ** 2):
            raise ValueError(f"form-preservation residual too large: {res:.2e}")

    def form_scale(self):
        J = _form_diag(self.source_p)
        g = self.matrix.conj().T @ np.diag(J) @ self.matrix
        return (np.trace(g @ np.diag(J)).real) / (self.source_p + 1.0)

    def inverse(self):
        return Isometry(np.linalg.inv(self.matrix), self.source_p)

    def __matmul__(self, other):
        if isinstance(other, Isometry):
            return Isometry(self.matrix @ other.matrix, self.source_p)
        return NotImplemented

    def conjugate(self):
        """Entrywise complex conjugate; represents the antiholomorphic mirror."""
        return Isometry(self.matrix.conj(), self.source_p)


def _form_diag(p):
    d = np.ones(p + 1)
    d[-1] = -1.0
    return d


@dataclass(frozen=True)
class EmbeddingMap:
    """Linear map W: C^{p+1} -> C^{q+1} with <Wv, Ww>_q = scale <v, w>_p."""

    matrix: np.ndarray
    source_p: int
    target_q: int
    scale: float = 1.0

    def __post_init__(self):
        W = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", W)
        if W.shape != (self.target_q + 1, self.source_p + 1):
            raise ValueError("embedding matrix shape mismatch")
        Jp = np.diag(_form_diag(self.source_p))
        Jq = np.diag(_form_diag(self.target_q))
        res = np.linalg.norm(W.conj().T @ Jq @ W - self.scale * Jp)
        if res > 1e-9 * max(1.0, np.linalg.norm(W) ** 2):
            raise ValueError(f"not a form isometry up to scale (residual {res:.2e})")

    def push_point(self, x, target_model=None):
        model = target_model or HermitianModel(self.target_q)
        return ProjPoint(self.matrix @ x.lift, model=model, kind=x.kind)

    def push_isometry(self, g):
        """Conjugate a source isometry into the target group on the image block.

        Satisfies ``push_isometry(g).push_point(x) = push_point(g x)`` and
        acts as the identity on the J-orthocomplement of the image.
        """
        if g.source_p != self.source_p:
            raise ValueError("dimension mismatch")
        q, p = self.target_q, self.source_p
        W = self.matrix / np.sqrt(self.scale)
        Jq = np.diag(_form_diag(q))
        # columns of W are J-orthonormal with signs (+..+, -); complete them
        # to a basis by J-Gram-Schmidt over the standard basis
        basis = [(W[:, k], _form_diag(p)[k]) for k in range(p + 1)]
        for k in range(q + 1):
            if len(basis) == q + 1:
                break
            v = np.zeros(q + 1, dtype=complex)
            v[k] = 1.0
            for u, sgn in basis:
                v = v - ((u.conj() @ Jq @ v) / sgn) * u
            nv = (v.conj() @ Jq @ v).real
            if abs(nv) > 1e-8:
                basis.append((v / np.sqrt(abs(nv)), np.sign(nv)))
        B = np.column_stack([u for u, _ in basis])
        blk = np.zeros((q + 1, q + 1), dtype=complex)
        blk[: p + 1, : p + 1] = g.matrix
        blk[p + 1 :, p + 1 :] = np.eye(q - p)
        return Isometry(B @ blk @ np.linalg.inv(B), q)


def apply_isometry(g, x):
    """Image of a point under an isometry; preserves kind and distances."""
    if g.matrix.shape[0] != x.lift.shape[0]:
        raise ValueError("dimension mismatch")
    return ProjPoint(g.matrix @ x.lift, model=x.model, kind=x.kind)


def apply_tangent(g, model, v):
    """Pushforward of a tangent vector by an isometry.

    The image components are re-expressed at the canonical lift of the
    image base point, so g-norms are preserved exactly.
    """
    X = v.base.lift
    lam = g.form_scale()
    MX = g.matrix @ X
    Mv = g.matrix @ v.components
    # canonical lift of the image divides by sqrt(lam) and a phase; tangent
    # components must follow the same rescaling
    Y = MX / np.sqrt(lam)
    last = Y[-1]
    phase = np.conj(last) / abs(last)
    base = ProjPoint(MX, model=model, kind="interior")
    return TangentVector(base, Mv / np.sqrt(lam) * phase)


def classify(g):
    """Coarse dynamical type: 'elliptic' | 'parabolic' | 'hyperbolic'.

    Hyperbolic iff the eigenvalue modulus spread exceeds 1 + TOL_CLS and
    the extreme-modulus eigenvectors are two separated boundary fixed
    points; elliptic iff a negative-type eigenvector exists (interior
    fixed point); parabolic when the whole eigenvector structure collapses
    onto a single null direction.  Near-threshold spectra -- tiny spread
    with separated null fixed points, or a marginal spread -- come back
    'indeterminate' rather than misclassified: defective spectra of true
    parabolics split by about sqrt(eps) in floating point, so the spread
    alone cannot be trusted there.
    """
    m = g.matrix / np.sqrt(g.form_scale())
    vals, vecs = np.linalg.eig(m)
    mods = np.abs(vals)
    spread = mods.max() / mods.min()
    J = _form_diag(g.source_p)
    qs = np.array(
        [float(np.sum(J * np.abs(vecs[:, k]) ** 2)) for k in range(vecs.shape[1])]
    )
    # projective separation of the extreme-modulus eigenvectors
    v_hi = vecs[:, int(np.argmax(mods))]
    v_lo = vecs[:, int(np.argmin(mods))]
    ip = abs(np.vdot(v_hi, v_lo)) / (np.linalg.norm(v_hi) * np.linalg.norm(v_lo))
    separation = np.sqrt(max(0.0, 1.0 - ip**2))
    if qs.min() < -1e-6 and spread < 1.0 + TOL_CLS:
        return "elliptic"
    if spread > 1.0 + TOL_CLS and separation > 1e-3:
        return "hyperbolic"
    # defective spectra: a 3-step unipotent splits its eigenvalues by about
    # eps^(1/3), so parabolic detection must tolerate that much blur
    if np.all(np.abs(qs) <= 1e-4) and spread <= 1.0 + 1e-4 and separation <= 1e-2:
        return "parabolic"
    return "indeterminate"


def standard_embedding(p, q):
    """The block embedding (z_1..z_p, w) -> (z_1..z_p, 0..0, w); scale 1."""
    if q < p:
        raise ValueError("target dimension must satisfy q >= p")
    W = np.zeros((q + 1, p + 1), dtype=complex)
    W[:p, :p] = np.eye(p)
    W[q, p] = 1.0
    return EmbeddingMap(W, source_p=p, target_q=q, scale=1.0)


def random_isometry(p, seed, sigma=1.0):
    """Reproducible random element: exp of a Gaussian element of u(p,1).

    The Lie algebra is {A : A* J + J A = 0}; a Gaussian matrix is projected
    onto it and exponentiated.  Deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    n = p + 1
    A = rng.normal(size=(n, n), scale=sigma) + 1j * rng.normal(size=(n, n), scale=sigma)
    J = np.diag(_form_diag(p))
    A = 0.5 * (A - J @ A.conj().T @ J)
    return Isometry(expm(A), p)


def rotation_about_origin(p, thetas):
    """Unitary diag(e^{i theta_1}, .., e^{i theta_p}, 1): fixes the origin."""
    d = np.ones(p + 1, dtype=complex)
    d[:p] = np.exp(1j * np.asarray(thetas, dtype=float))
    return Isometry(np.diag(d), p)


def translation_along_axis(p, length, axis=0):
    """Hyperbolic translation through the origin along a coordinate axis.

    The axis is the geodesic through the origin in the ``axis``-th complex
    coordinate direction; ``length`` is the translation distance for the
    model normalization metric_scale = 4.
    """
    t = length / 2.0  # scale-4 arclength parameter of the flow
    m = np.eye(p + 1, dtype=complex)
    m[axis, axis] = np.cosh(t)
    m[axis, p] = np.sinh(t)
    m[p, axis] = np.sinh(t)
    m[p, p] = np.cosh(t)
    return Isometry(m, p)
