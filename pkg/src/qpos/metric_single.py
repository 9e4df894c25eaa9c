"""Metric synthesis for a single Hermitian form field by stratified inflation.

Given a form field where every point has at least d - q + 1 strictly
positive eigenvalues, a metric making the form strictly q-positive is built
stage by stage: points are stratified by their count of negative eigenvalues
nu, and at stage r every point with nu = r gets its metric inflated along
the span of the negative eigenvectors by a factor 1 + f chosen so that

    sum_{j<=r} lam_j  +  (1 + f) * sum_{r<j<=q} lam_j  >  0.

Dividing by 1 + f shows the new q-smallest-eigenvalue sum is positive: the
inflation rescales exactly the negative eigenvalues to lam_j / (1 + f) and
leaves the rest unchanged.  Points flagged as anchored (the set F and, when
adjacency is present, its 1-ring) keep their prescribed metric g0 bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CertificateFailed,
    DenominatorNonpositive,
    HypothesisViolated,
    NoSpectralGap,
    NotPositiveDefinite,
    NotProjector,
)
from .fields import FormField, certificate_from_sums
from .hermitian import as_form, as_metric, pencil_eigh, pencil_eigvalsh
from .riesz import Disc, riesz_projector

DEFAULT_THETA = 0.1
MARGIN_FLOOR_SCALE = 1e-9


@dataclass
class Stratification:
    """Per-point negative-eigenvalue counts and anchor flags."""

    q_tilde: int
    nu_minus: np.ndarray         # (N,) int
    anchored: np.ndarray         # (N,) bool; these points keep g0

    def stage_mask(self, r: int) -> np.ndarray:
        """Points updated at stage r: nu = r and not anchored."""
        return (self.nu_minus == r) & ~self.anchored

    def v_mask(self, r: int) -> np.ndarray:
        """The closed stratum after stage r: nu <= r, plus the anchor set."""
        return (self.nu_minus <= r) | self.anchored


def stratify(field: FormField, form: str, q_tilde: int,
             zero_threshold: float | None = None) -> Stratification:
    """Count negative eigenvalues per point and check the synthesis hypothesis.

    Requires at least d - q_tilde + 1 strictly positive eigenvalues at every
    point (counts are metric-independent, so they are taken against the
    identity).  Raises HypothesisViolated with the offending point id.
    """
    d = field.dim
    if not 1 <= q_tilde <= d:
        raise ValueError(f"q_tilde = {q_tilde} not in [1, {d}]")
    S = field.form_stack(form)
    lam = np.linalg.eigvalsh(S)
    if zero_threshold is None:
        scale = np.maximum(1.0, np.max(np.abs(lam), axis=1))
        thr = 1e-10 * scale
    else:
        thr = np.full(len(field), float(zero_threshold))
    n_plus = np.sum(lam > thr[:, None], axis=1)
    n_minus = np.sum(lam < -thr[:, None], axis=1)
    need = d - q_tilde + 1
    bad = np.where(n_plus < need)[0]
    if bad.size:
        i = int(bad[0])
        tup = (int(n_plus[i]), int(n_minus[i]), d - int(n_plus[i]) - int(n_minus[i]))
        raise HypothesisViolated(field.points[i].id, tup)
    return Stratification(q_tilde=q_tilde, nu_minus=n_minus.astype(int),
                          anchored=field.anchored_mask())


def choose_f(field: FormField, r: int, g_prev: np.ndarray, q_tilde: int,
             theta: float = DEFAULT_THETA, strat: Stratification | None = None,
             form: str | None = None) -> np.ndarray:
    """Inflation factors f >= 0 for stage r, zero off the stage's stratum.

    At each stage-r point, with eigenvalues lam relative to the current
    metric, sets f = max(0, (1 + theta) * phi) where
    phi = -(sum_{1..q} lam) / (sum_{r+1..q} lam); any phi < 0 means the point
    already has a positive q-sum and needs no inflation.  The returned f
    satisfies the stage inequality with margin theta * |sum lam| wherever
    inflation happens.
    """
    if strat is None:
        strat = stratify(field, form, q_tilde)
    S = field.form_stack(form) if form is not None else None
    if S is None:
        raise ValueError("choose_f needs the form name to evaluate eigenvalues")
    mask = strat.stage_mask(r)
    f = np.zeros(len(field))
    if not mask.any():
        return f
    lam = pencil_eigvalsh(S[mask], g_prev[mask])
    scale = np.maximum(1.0, np.max(np.abs(lam), axis=1))
    den = np.sum(lam[:, r:q_tilde], axis=1)
    bad = den <= 1e-12 * scale
    if bad.any():
        i = int(np.where(mask)[0][np.argmax(bad)])
        raise DenominatorNonpositive(
            f"nonpositive eigenvalue-tail sum at point {field.points[i].id!r}")
    phi = -np.sum(lam[:, :q_tilde], axis=1) / den
    f[mask] = np.maximum(0.0, (1.0 + theta) * phi)
    # stage inequality, checked rather than assumed
    head = np.sum(lam[:, :r], axis=1)
    value = head + (1.0 + f[mask]) * den
    if not np.all(value > 0):
        i = int(np.where(mask)[0][np.argmin(value)])
        raise DenominatorNonpositive(
            f"stage inequality failed at point {field.points[i].id!r}")
    return f


def negative_projector(S, g, r: int, tau_gap: float | None = None,
                       check_riesz: bool = True, nodes: int | None = None) -> np.ndarray:
    """g-orthogonal projector onto the span of the r negative eigenvectors.

    Computed from the pencil eigenvectors, and (by default) cross-checked
    against a Riesz projector of the congruence-reduced operator over a disc
    through alpha < lam_1 and lam_r < beta < 0; the two routes must agree to
    1e-8.  With ``nodes=None`` the quadrature node count is chosen from the
    trapezoid error law |u|^N so the comparison is meaningful at any
    spectral separation.
    """
    M = as_form(S)
    G = as_metric(g)
    d = M.shape[0]
    if not 0 <= r <= d:
        raise ValueError(f"r = {r} not in [0, {d}]")
    if r == 0:
        return np.zeros((d, d), dtype=complex)
    lam, V = pencil_eigh(M, G)
    if tau_gap is None:
        tau_gap = 1e-10 * max(1.0, float(np.max(np.abs(lam))))
    if abs(lam[r - 1]) <= tau_gap and (r >= d or abs(lam[r]) <= tau_gap):
        raise NoSpectralGap(f"lam_r = {lam[r - 1]:.3e} and lam_(r+1) both near zero")
    if lam[r - 1] >= 0:
        raise NoSpectralGap(f"lam_r = {lam[r - 1]:.3e} is not negative")
    if r < d and lam[r] < -tau_gap:
        raise NoSpectralGap(f"lam_(r+1) = {lam[r]:.3e} is negative; r does not split the spectrum")
    Vr = V[:, :r]
    P = Vr @ Vr.conj().T @ G
    if check_riesz:
        beta = lam[r - 1] / 2.0
        alpha = lam[0] + beta
        disc = Disc(center=(alpha + beta) / 2.0, radius=(beta - alpha) / 2.0)
        if nodes is None:
            u = np.abs(lam - disc.center) / disc.radius
            rho = max(np.max(u[:r]), np.max(1.0 / u[r:], initial=0.0))
            nodes = int(min(max(32, np.ceil(np.log(1e-11) / np.log(rho))), 8192))
        w, U = np.linalg.eigh(G)
        Ghalf = (U * np.sqrt(w)) @ U.conj().T
        Ginvhalf = (U / np.sqrt(w)) @ U.conj().T
        T = Ginvhalf @ M @ Ginvhalf
        T = 0.5 * (T + T.conj().T)
        PT = riesz_projector(T, disc, nodes=nodes).matrix
        P2 = Ginvhalf @ PT @ Ghalf
        if np.linalg.norm(P2 - P, 2) > 1e-8:
            raise RuntimeError(
                f"eigenvector and Riesz projector routes disagree by "
                f"{np.linalg.norm(P2 - P, 2):.3e}")
    return P


def update_metric(g_prev, P, f: float, tau_proj: float = 1e-8) -> np.ndarray:
    """g_new(X, Y) = g_prev(X, Y) + f * g_prev(P X, P Y).

    P must be a g_prev-orthogonal projector (idempotent and g-self-adjoint).
    The form's eigenvalues relative to g_new are lam_j / (1 + f) on range(P)
    and unchanged on the complement.
    """
    G = as_metric(g_prev)
    P = np.asarray(P, dtype=complex)
    if f < 0:
        raise ValueError("f must be nonnegative")
    scale = max(1.0, float(np.linalg.norm(P, 2)))
    if np.linalg.norm(P @ P - P, 2) > tau_proj * scale:
        raise NotProjector(f"||P^2 - P|| = {np.linalg.norm(P @ P - P, 2):.3e}")
    if np.linalg.norm(G @ P - P.conj().T @ G, 2) > tau_proj * scale * np.linalg.norm(G, 2):
        raise NotProjector("P is not g-self-adjoint")
    Gn = G + f * (P.conj().T @ G @ P)
    Gn = 0.5 * (Gn + Gn.conj().T)
    if np.linalg.eigvalsh(Gn)[0] <= 0:
        raise NotPositiveDefinite("updated metric lost positive definiteness")
    return Gn


def _batched_negative_projectors(S, G, r: int) -> np.ndarray:
    """Eigenvector-route projectors for a stack of stage-r points."""
    lam, V = pencil_eigh(S, G)
    Vr = V[:, :, :r]
    return Vr @ np.conj(np.swapaxes(Vr, -1, -2)) @ G


def synthesize_single(field: FormField, form: str, q_tilde: int,
                      theta: float = DEFAULT_THETA, g0_default=None,
                      smooth: bool = False, riesz_check_count: int = 4,
                      margin_floor_scale: float = MARGIN_FLOOR_SCALE):
    """Build a per-point metric making the named form strictly q_tilde-positive.

    Runs stages r = 1 .. q_tilde - 1 of stratified inflation.  Anchored
    points (F and its 1-ring under adjacency) keep g0 exactly.  With
    ``smooth=True`` and adjacency present, the inflation factors are averaged
    once over each 1-ring and the stage inequality re-verified; points where
    smoothing breaks it fall back to their pointwise value.

    Returns ``(metrics, certificate)`` with ``metrics`` of shape (N, d, d).
    Raises CertificateFailed (with the certificate attached) if any point
    ends up non-positive.
    """
    strat = stratify(field, form, q_tilde)
    S = field.form_stack(form)
    n = len(field)
    metrics = field.g0_stack(default=g0_default).copy()
    provenance = np.array(
        ["g0_anchor" if a else "g0_default" for a in strat.anchored], dtype=object)

    neighbor_idx = field.neighbor_indices() if smooth and field.has_adjacency() else None

    for r in range(1, q_tilde):
        mask = strat.stage_mask(r)
        if not mask.any():
            continue
        f = choose_f(field, r, metrics, q_tilde, theta=theta, strat=strat, form=form)
        if neighbor_idx is not None:
            f = _smoothed_factors(f, mask, neighbor_idx, S, metrics, r, q_tilde)
        idx = np.where(mask & (f > 0))[0]
        if idx.size == 0:
            continue
        g_prev = metrics[idx].copy()
        # dual-route spot check (eigenvector vs Riesz) on a few stage points,
        # against the pre-update metric
        for j in range(min(riesz_check_count, idx.size)):
            negative_projector(S[idx[j]], g_prev[j], r, check_riesz=True)
        P = _batched_negative_projectors(S[idx], g_prev, r)
        upd = g_prev + f[idx, None, None] * (
            np.conj(np.swapaxes(P, -1, -2)) @ g_prev @ P)
        metrics[idx] = 0.5 * (upd + np.conj(np.swapaxes(upd, -1, -2)))
        provenance[idx] = f"inflated_stage_{r}"

    # certificate
    lam = pencil_eigvalsh(S, metrics)
    sums = np.sum(lam[:, :q_tilde], axis=1)
    floors = margin_floor_scale * np.linalg.norm(S, axis=(1, 2))
    cert = certificate_from_sums(form, q_tilde, field.ids, sums, floors, provenance)
    if not cert.passed:
        raise CertificateFailed(
            f"{len(cert.failed_ids())} points failed strict {q_tilde}-positivity",
            certificate=cert, failed_ids=cert.failed_ids())
    return metrics, cert


def _smoothed_factors(f, mask, neighbor_idx, S, metrics, r, q_tilde):
    """One-pass neighbor averaging of f over the stage stratum, then re-verify.

    The averaged factor is kept only where the stage inequality still holds;
    re-verification, not the smoothing itself, is the contract.
    """
    f_s = f.copy()
    idx = np.where(mask)[0]
    for i in idx:
        ring = [j for j in neighbor_idx[i] if mask[j]] + [i]
        f_s[i] = float(np.mean(f[ring]))
    lam = pencil_eigvalsh(S[idx], metrics[idx])
    head = np.sum(lam[:, :r], axis=1)
    den = np.sum(lam[:, r:q_tilde], axis=1)
    ok = head + (1.0 + f_s[idx]) * den > 0
    f_s[idx[~ok]] = f[idx[~ok]]
    return f_s
