"""Boundary weight bump: verify the three positivity claims quantitatively.

Given a domain whose Levi form and weight Hessian share a rank n - q
subbundle of positive directions on the boundary, bump the weight by
delta0 * eps * chi(rho / eps) with a convex cutoff chi.  On the boundary the
bumped Hessian is

    H_eps = H_phi + delta0 * H_rho + (delta0 / eps) * chi''(0) * drho (x) drho-bar,

and for eps below  delta0 * chi''(0) * eta / (B1 + delta0 * B2)  three
claims hold at every boundary sample:

  (1) H_eps has at least n - q + 1 positive eigenvalues,
  (2) the restriction of H_eps to the holomorphic boundary tangent is
      strictly q-positive for the synthesized boundary metric h,
  (3) H_eps on the full tangent space is strictly q-positive for the
      extension g0 of h by the unit normal.

B1 and B2 bound |restricted trace| of the weight and rho Hessians over
q-planes (computed from extreme eigenvalue sums of both signs, so they are
valid two-sided bounds); eta is the largest mass of the normal component
below which q-frames still have positive trace, computed per sample from
the exact dual form  eta = sup_{mu > 0} (q-smallest eigenvalue sum of
A + mu * N) / mu  with A the boundary trace form and N the rank-one normal
form.  That dual value is the conservative limit of scanning frames by
candidate thresholds: any frame with normal mass below it has positive
trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from ..errors import BoundNotFound, NoCommonDirection, QposError
from ..fields import FieldPoint, FormField
from ..hermitian import pencil_eigvalsh
from ..metric_subbundle import synthesize_subbundle
from ..synthetic import random_g_orthonormal_frames
from ..two_forms import find_common_direction
from .domains import Domain
from .levi import BoundarySample, boundary_weight_hessian, levi_form

CHI_SECOND_DERIVATIVE = 2.0


def chi(t):
    """Convex C^2 cutoff: 0 for t <= -1, (t + 1)^3 / 3 beyond.

    chi'(0) = 1 and chi''(0) = 2; nondecreasing and convex on all of R.
    """
    t = np.asarray(t, dtype=float)
    return np.where(t <= -1.0, 0.0, (t + 1.0) ** 3 / 3.0)


def chi_prime(t):
    t = np.asarray(t, dtype=float)
    return np.where(t <= -1.0, 0.0, (t + 1.0) ** 2)


def chi_double_prime(t):
    t = np.asarray(t, dtype=float)
    return np.where(t <= -1.0, 0.0, 2.0 * (t + 1.0))


@dataclass
class WeightBumpReport:
    n: int
    q: int
    delta0: float
    eta: float
    epsilon: float
    epsilon_bound: float
    B1: float
    B2: float
    kappa: float
    claim1_pass: np.ndarray
    claim2_min: np.ndarray
    claim3_min: np.ndarray
    trace_identity_max_err: float
    large_eps_claim3_failures: int
    subbundle_constants: dict = dc_field(default_factory=dict)
    boundary_metrics: np.ndarray = dc_field(repr=False, default=None)
    g0: np.ndarray = dc_field(repr=False, default=None)

    @property
    def all_claims_pass(self) -> bool:
        return (bool(np.all(self.claim1_pass))
                and float(np.min(self.claim2_min)) > 0
                and float(np.min(self.claim3_min)) > 0)


def _common_positive_subbundle(Lv, Hv, rank: int, seed: int) -> np.ndarray:
    """Per-sample rank-``rank`` frames on which both forms are positive definite.

    Supported: full-rank (both forms PD on the whole kernel) and rank one
    (common-direction search).  Intermediate ranks would need a genuine
    subbundle optimizer and are rejected.
    """
    n_samples, d, _ = Lv.shape
    if rank == d:
        for name, F in (("levi", Lv), ("hessian", Hv)):
            lam = np.linalg.eigvalsh(F)
            if np.min(lam[:, 0]) <= 0:
                raise NoCommonDirection(
                    f"boundary {name} form is not positive definite on the full tangent")
        return np.broadcast_to(np.eye(d, dtype=complex), (n_samples, d, d)).copy()
    if rank == 1:
        V = np.empty((n_samples, d, 1), dtype=complex)
        for i in range(n_samples):
            v = find_common_direction(Lv[i], Hv[i], seed=seed)
            if v is None:
                raise NoCommonDirection(i)
            V[i, :, 0] = v
        return V
    raise QposError(f"common positive subbundle of rank {rank} (1 < rank < {d}) "
                    "is not constructed from raw forms")


def _positive_count(forms: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvalsh(forms)
    thr = 1e-10 * np.maximum(1.0, np.max(np.abs(lam), axis=-1))
    return np.sum(lam > thr[..., None], axis=-1)


def _find_delta0(Mphi: np.ndarray, Mrho: np.ndarray, need: int,
                 floor: float = 1e-8) -> float:
    """Largest bisected delta0 with >= ``need`` positive eigenvalues kept.

    The count must hold for the whole range [0, delta0]; the bisected
    threshold is halved for safety and re-verified on a grid.  The search is
    capped at the norm ratio of the two Hessians: past that point the rho
    term is no longer subordinate to the weight, and when the count never
    fails any positive delta0 is admissible, so the cap itself is used.
    """
    def ok(delta):
        return bool(np.all(_positive_count(Mphi + delta * Mrho) >= need))

    if not ok(0.0):
        raise BoundNotFound("weight Hessian lacks the required positive eigenvalues")
    cap = float(np.max(np.linalg.norm(Mphi, axis=(1, 2)))
                / max(np.max(np.linalg.norm(Mrho, axis=(1, 2))), 1e-30))
    if ok(cap):
        delta0 = 0.5 * cap
        if all(ok(d) for d in np.linspace(0.0, delta0, 9)[1:]):
            return float(delta0)
    hi = cap
    while not ok(hi) and hi > floor:
        hi *= 0.5
    if hi <= floor:
        raise BoundNotFound("delta0 collapsed below 1e-8")
    lo = hi
    hi = 2.0 * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    delta0 = 0.5 * lo
    for _ in range(10):
        if delta0 < floor:
            raise BoundNotFound("delta0 collapsed below 1e-8")
        if all(ok(d) for d in np.linspace(0.0, delta0, 9)[1:]):
            return float(delta0)
        delta0 *= 0.5
    raise BoundNotFound("delta0 verification failed on the subdivision grid")


def _eta_dual(A: np.ndarray, Nrm: np.ndarray, q: int, floor: float = 1e-8) -> float:
    """Per-sample sup over mu of (q-smallest eigenvalue sum of A + mu N) / mu.

    A and N are stacks in g0-orthonormal coordinates, N PSD of rank one.
    Samples whose trace form is already strictly q-positive impose no
    constraint (eta infinite there).
    """
    def phi(i, mu):
        lam = np.linalg.eigvalsh(A[i] + mu * Nrm[i])
        return float(np.sum(lam[:q]))

    etas = []
    scale = max(1.0, float(np.max(np.abs(np.linalg.eigvalsh(A)))))
    for i in range(len(A)):
        if phi(i, 0.0) > 0:
            continue
        mus = np.geomspace(1e-6 * scale, 1e9 * scale, 160)
        vals = np.array([phi(i, m) / m for m in mus])
        j = int(np.argmax(vals))
        lo = mus[max(j - 1, 0)]
        hi = mus[min(j + 1, len(mus) - 1)]
        for _ in range(80):  # golden-section refinement of the unimodal ratio
            m1 = lo + 0.381966 * (hi - lo)
            m2 = hi - 0.381966 * (hi - lo)
            if phi(i, m1) / m1 < phi(i, m2) / m2:
                lo = m1
            else:
                hi = m2
        mu_star = 0.5 * (lo + hi)
        etas.append(phi(i, mu_star) / mu_star)
    if not etas:
        return float("inf")
    eta = 0.95 * float(np.min(etas))
    if eta < floor:
        raise BoundNotFound(f"eta = {eta:.3e} below the 1e-8 floor")
    return eta


def weight_bump(domain: Domain, q: int, samples: list[BoundarySample],
                eps0: float | None = None, seed: int = 0,
                trace_check_samples: int = 100, trace_check_frames: int = 100,
                theta_safety: float = 0.9) -> WeightBumpReport:
    """Compute (delta0, eta, eps) and verify the three claims at every sample."""
    n = domain.n
    if not 1 <= q <= n - 1:
        raise QposError(f"q = {q} not in [1, {n - 1}]")
    if eps0 is None:
        eps0 = 0.1 * domain.scale
    n_samp = len(samples)
    d = n - 1

    frames = np.stack([s.frame for s in samples])
    normals = np.stack([s.normal for s in samples])
    ws = np.stack([s.w for s in samples])
    Mrho = np.stack([domain.rho_hessian(s.z, s.chart) for s in samples])
    Mphi = np.stack([boundary_weight_hessian(domain, s) for s in samples])
    Lv = np.stack([levi_form(domain, s) for s in samples])
    Hv = np.conj(np.swapaxes(frames, -1, -2)) @ Mphi @ frames
    Hv = 0.5 * (Hv + np.conj(np.swapaxes(Hv, -1, -2)))

    # boundary metric h from the common positive subbundle of both forms
    V = _common_positive_subbundle(Lv, Hv, n - q, seed)
    pts = [FieldPoint(id=i, forms={"levi": Lv[i], "hess": Hv[i]}, subspace=V[i])
           for i in range(n_samp)]
    kernel_field = FormField(dim=d, points=pts)
    h, certs, consts = synthesize_subbundle(kernel_field, ["levi", "hess"], q)
    kappa = consts["levi"].kappa

    # g0: h on the kernel, the unit normal orthogonal and unit
    F = np.concatenate([frames, normals[:, :, None]], axis=2)
    blocks = np.zeros((n_samp, n, n), dtype=complex)
    blocks[:, :d, :d] = h
    blocks[:, d, d] = 1.0
    G0 = F @ blocks @ np.conj(np.swapaxes(F, -1, -2))
    G0 = 0.5 * (G0 + np.conj(np.swapaxes(G0, -1, -2)))

    delta0 = _find_delta0(Mphi, Mrho, n - q + 1)

    # two-sided trace bounds over q-planes, relative to g0
    lam_phi = pencil_eigvalsh(Mphi, G0)
    lam_rho = pencil_eigvalsh(Mrho, G0)
    B1 = float(max(np.max(np.sum(lam_phi[:, -q:], axis=1)),
                   np.max(np.sum(-lam_phi[:, :q], axis=1))))
    B2 = float(max(np.max(np.sum(lam_rho[:, -q:], axis=1)),
                   np.max(np.sum(-lam_rho[:, :q], axis=1))))

    # eta from the dual form, in g0-orthonormal coordinates
    w_eig, U = np.linalg.eigh(G0)
    G0_inv_half = np.einsum("...ik,...k,...jk->...ij", U, 1.0 / np.sqrt(w_eig), U.conj())
    A_form = Mphi + delta0 * Mrho
    Nrm_form = np.conj(ws)[:, :, None] * ws[:, None, :]
    A_t = G0_inv_half @ A_form @ G0_inv_half
    A_t = 0.5 * (A_t + np.conj(np.swapaxes(A_t, -1, -2)))
    N_t = G0_inv_half @ Nrm_form @ G0_inv_half
    N_t = 0.5 * (N_t + np.conj(np.swapaxes(N_t, -1, -2)))
    eta = _eta_dual(A_t, N_t, q)

    chi2 = float(chi_double_prime(0.0))
    denom = B1 + delta0 * B2
    eps_bound = float("inf") if denom <= 0 else delta0 * chi2 * eta / denom
    epsilon = theta_safety * min(eps_bound, eps0)

    def bumped(eps):
        return A_form + (delta0 / eps) * chi2 * Nrm_form

    M_eps = bumped(epsilon)
    claim1 = _positive_count(M_eps) >= n - q + 1
    lam2 = pencil_eigvalsh(Hv + delta0 * Lv, h)
    claim2 = np.sum(lam2[:, :q], axis=1)
    lam3 = pencil_eigvalsh(M_eps, G0)
    claim3 = np.sum(lam3[:, :q], axis=1)

    # restricted-trace decomposition on random g0-orthonormal frames
    rng = np.random.default_rng(seed)
    sel = np.linspace(0, n_samp - 1, min(trace_check_samples, n_samp)).astype(int)
    max_err = 0.0
    for i in sel:
        T = random_g_orthonormal_frames(rng, G0[i], trace_check_frames, q)
        direct = np.einsum("nki,kl,nli->n", T.conj(), M_eps[i], T).real
        t_phi = np.einsum("nki,kl,nli->n", T.conj(), Mphi[i], T).real
        t_rho = np.einsum("nki,kl,nli->n", T.conj(), Mrho[i], T).real
        mass = np.sum(np.abs(np.einsum("k,nkj->nj", ws[i], T)) ** 2, axis=1)
        recomposed = t_phi + delta0 * t_rho + (delta0 / epsilon) * chi2 * mass
        err = np.max(np.abs(direct - recomposed) / np.maximum(1.0, np.abs(direct)))
        max_err = max(max_err, float(err))

    # observational negative control at 10x the bound
    if np.isfinite(eps_bound):
        lam_large = pencil_eigvalsh(bumped(10.0 * eps_bound), G0)
        large_fail = int(np.sum(np.sum(lam_large[:, :q], axis=1) <= 0))
    else:
        large_fail = 0

    return WeightBumpReport(
        n=n, q=q, delta0=delta0, eta=eta, epsilon=float(epsilon),
        epsilon_bound=float(eps_bound), B1=B1, B2=B2, kappa=float(kappa),
        claim1_pass=claim1, claim2_min=claim2, claim3_min=claim3,
        trace_identity_max_err=max_err, large_eps_claim3_failures=large_fail,
        subbundle_constants={name: {"A1": c.A1, "A2": c.A2, "A3": c.A3, "C": c.C}
                             for name, c in consts.items()},
        boundary_metrics=h, g0=G0)
