"""JSON wire formats: points, models, chains, matrices, representations.

Complex numbers are [re, im] pairs; vectors and matrices nest them.  Every
statistics payload carries (seed, N) so runs are reproducible, and dumps
are key-sorted so identical inputs give byte-identical outputs.
"""

from __future__ import annotations

import json

import numpy as np

from .hermitian import HermitianModel, ProjPoint
from .isometries import Isometry
from .toledo import SurfaceGroupRep

__all__ = [
    "complex_to_json",
    "vector_to_json",
    "json_to_vector",
    "matrix_to_json",
    "json_to_matrix",
    "point_to_json",
    "json_to_point",
    "model_to_json",
    "json_to_model",
    "rep_from_json",
    "chain_to_json",
    "dumps",
]


def complex_to_json(z):
    return [float(np.real(z)), float(np.imag(z))]


def vector_to_json(v):
    return [complex_to_json(z) for z in v]


def json_to_vector(data):
    return np.array([complex(re, im) for re, im in data], dtype=complex)


def matrix_to_json(m):
    return [vector_to_json(row) for row in np.asarray(m)]


def json_to_matrix(data):
    return np.stack([json_to_vector(row) for row in data])


def point_to_json(pt):
    return {"lift": vector_to_json(pt.lift), "kind": pt.kind}


def json_to_point(data, model):
    return ProjPoint(json_to_vector(data["lift"]), model=model, kind=data.get("kind"))


def model_to_json(model):
    return {"p": model.p, "metric_scale": model.metric_scale}


def json_to_model(data):
    return HermitianModel(p=int(data["p"]), metric_scale=float(data.get("metric_scale", 4.0)))


def rep_from_json(data):
    """{'genus': g, 'generators': [matrix..]} -> SurfaceGroupRep in PU(1,1).

    Optional 'relators' are words in the generators as strings of signed
    integers ('1 2 -1 -2'); negative means inverse.  Each listed word must
    evaluate to a scalar matrix.
    """
    gens = [Isometry(json_to_matrix(m), 1) for m in data["generators"]]
    for word in data.get("relators", []):
        m = word_to_matrix(word, [g.matrix for g in gens])
        lam = np.trace(m) / m.shape[0]
        if np.linalg.norm(m - lam * np.eye(m.shape[0])) > 1e-8 * max(1.0, abs(lam)):
            raise ValueError(f"relator word {word!r} does not close")
    return SurfaceGroupRep(genus=int(data["genus"]), generators=gens)


def word_to_matrix(word, generator_matrices):
    """Evaluate a word of signed 1-based generator indices ('1 -2 1')."""
    n = generator_matrices[0].shape[0]
    m = np.eye(n, dtype=complex)
    for tok in str(word).split():
        k = int(tok)
        if k == 0 or abs(k) > len(generator_matrices):
            raise ValueError(f"generator index {k} out of range")
        g = generator_matrices[abs(k) - 1]
        m = m @ (np.linalg.inv(g) if k < 0 else g)
    return m


def boundary_map_from_json(data):
    """Sample-table boundary map {'p', 'q', 'pairs': [[lift, lift]..]} with
    nearest-neighbor completion."""
    from .forms import BoundaryMapHandle

    p, q = int(data["p"]), int(data["q"])
    src = np.stack([json_to_vector(a) for a, _ in data["pairs"]])
    tgt = np.stack([json_to_vector(b) for _, b in data["pairs"]])
    return BoundaryMapHandle.from_samples(src, tgt, p, q)


def load_sample_table_csv(path):
    """CSV sample table (z_re, z_im, w_re, w_im) -> list of (z, w)."""
    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    if rows.shape[1] != 4:
        raise ValueError("sample table needs 4 columns: z_re, z_im, w_re, w_im")
    return [(complex(a, b), complex(c, d)) for a, b, c, d in rows]


def chain_to_json(chain):
    s = chain.span
    return {
        "points": [vector_to_json(s[:, 0]), vector_to_json(s[:, 1])],
        "orientation": chain.orientation,
    }


def dumps(payload):
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
