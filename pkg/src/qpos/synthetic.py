"""Deterministic generators for random test data: forms, metrics, fields.

Used by the test suite and the demo scripts.  Everything takes an explicit
``numpy.random.Generator`` so runs are reproducible.
"""

from __future__ import annotations

import numpy as np

from .fields import FieldPoint, FormField


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_hermitian(rng: np.random.Generator, d: int, scale: float = 1.0) -> np.ndarray:
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * 0.5 * (Z + Z.conj().T)


def hermitian_with_eigs(rng: np.random.Generator, eigs) -> np.ndarray:
    """Hermitian matrix with prescribed eigenvalues and random eigenvectors."""
    eigs = np.asarray(eigs, dtype=float)
    U = random_unitary(rng, eigs.size)
    return (U * eigs) @ U.conj().T


def random_metric(rng: np.random.Generator, d: int, cond: float = 10.0) -> np.ndarray:
    """Random positive-definite metric with condition number about ``cond``."""
    eigs = np.exp(rng.uniform(0.0, np.log(cond), size=d))
    return hermitian_with_eigs(rng, eigs / eigs.min())


def random_g_orthonormal_frames(rng: np.random.Generator, G, count: int, q: int) -> np.ndarray:
    """Stack of ``count`` g-orthonormal q-frames, shape (count, d, q)."""
    G = np.asarray(G, dtype=complex)
    d = G.shape[0]
    w, U = np.linalg.eigh(G)
    W = (U / np.sqrt(w)) @ U.conj().T  # G^{-1/2}
    Z = rng.standard_normal((count, d, q)) + 1j * rng.standard_normal((count, d, q))
    Q, _ = np.linalg.qr(Z)
    return W @ Q


def planted_inertia_field(rng: np.random.Generator, n_points: int, d: int, q_tilde: int,
                          form_name: str = "S", nu_choices=None,
                          n_anchor: int = 0, neg_scale: float = 5.0) -> FormField:
    """Field of forms with planted negative-eigenvalue counts.

    Each point gets ``nu`` negative eigenvalues drawn from ``nu_choices``
    (default 0..q_tilde-1) and ``d - nu`` positive ones, so the synthesis
    hypothesis (at least d - q_tilde + 1 strictly positive) holds everywhere.
    The first ``n_anchor`` points are flagged in_F with an identity g0 and get
    forms that are already strictly q_tilde-positive there.
    """
    if nu_choices is None:
        nu_choices = list(range(q_tilde))
    points = []
    for i in range(n_points):
        in_f = i < n_anchor
        nu = 0 if in_f else int(rng.choice(nu_choices))
        pos = rng.uniform(0.5, 2.0, size=d - nu)
        neg = -rng.uniform(0.5, neg_scale, size=nu)
        S = hermitian_with_eigs(rng, np.concatenate([neg, pos]))
        points.append(FieldPoint(
            id=f"p{i}",
            forms={form_name: S},
            g0=np.eye(d, dtype=complex) if in_f else None,
            in_F=in_f,
        ))
    return FormField(dim=d, points=points)


def planted_subbundle_field(rng: np.random.Generator, n_points: int, d: int, q: int,
                            form_names=("Q1", "Q2", "Q3"), neg_scale: float = 8.0):
    """Subbundle field: rank d-q+1 subspace V with all forms PD on V.

    Returns ``(field, gamma)`` where ``gamma`` is the per-point metric stack
    the subspace bases are orthonormal against.
    """
    k = d - q + 1
    points = []
    gammas = np.empty((n_points, d, d), dtype=complex)
    for i in range(n_points):
        gamma = random_metric(rng, d, cond=4.0)
        w, U = np.linalg.eigh(gamma)
        Winv = (U / np.sqrt(w)) @ U.conj().T   # gamma^{-1/2}
        frame = Winv @ random_unitary(rng, d)  # gamma-orthonormal full frame
        BV, BW = frame[:, :k], frame[:, k:]
        forms = {}
        for name in form_names:
            vv = hermitian_with_eigs(rng, rng.uniform(0.4, 2.0, size=k))
            ww = hermitian_with_eigs(rng, rng.uniform(-neg_scale, 1.0, size=q - 1)) \
                if q > 1 else np.zeros((0, 0))
            vw = 0.5 * (rng.standard_normal((k, q - 1)) + 1j * rng.standard_normal((k, q - 1)))
            QF = np.block([[vv, vw], [vw.conj().T, ww]]) if q > 1 else vv
            # form with prescribed blocks in the gamma-orthonormal frame
            Finv = np.linalg.inv(frame)
            forms[name] = Finv.conj().T @ QF @ Finv
        gammas[i] = gamma
        points.append(FieldPoint(id=f"p{i}", forms=forms, subspace=BV))
    return FormField(dim=d, points=points), gammas


def random_pair_with_common_direction(rng: np.random.Generator, d: int,
                                      margin: float = 0.3):
    """Pair of Hermitian forms guaranteed to share a positive direction.

    Both forms are given value >= margin on a common random unit vector, with
    otherwise arbitrary (possibly very indefinite) structure.
    """
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    out = []
    for _ in range(2):
        Q = random_hermitian(rng, d)
        val = float(np.real(v.conj() @ Q @ v))
        want = rng.uniform(margin, 1.0)
        out.append(Q + (want - val) * np.outer(v, v.conj()))
    return out[0], out[1], v
