"""Riesz projector quadrature against the eigendecomposition oracle."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qpos import (
    Disc,
    EigenvalueOnContour,
    NearSingularResolvent,
    inertia,
    oracle_projector,
    quadrature_convergence,
    resolvent,
    riesz_projector,
)
from qpos.synthetic import hermitian_with_eigs, random_hermitian


def test_resolvent_diagonal():
    assert_allclose(resolvent(np.diag([1.0, 2.0]), 0.0), np.diag([-1.0, -0.5]), atol=1e-14)
    assert_allclose(resolvent(np.zeros((3, 3)), 2.0), 0.5 * np.eye(3), atol=1e-14)


def test_resolvent_multiply_back(rng):
    T = random_hermitian(rng, 6)
    zeta = 0.3 + 1.1j
    R = resolvent(T, zeta)
    assert np.linalg.norm((zeta * np.eye(6) - T) @ R - np.eye(6), 2) < 1e-10 * np.linalg.cond(
        zeta * np.eye(6) - T)


def test_resolvent_rejects_near_spectrum():
    with pytest.raises(NearSingularResolvent):
        resolvent(np.diag([1.0, 2.0]), 1.0 + 1e-12)


def test_projector_diagonal_case():
    T = np.diag([-2.0, -1.0, 3.0])
    res = riesz_projector(T, Disc(center=-1.75, radius=1.25))
    assert_allclose(res.matrix, np.diag([1.0, 1.0, 0.0]), atol=1e-12)
    assert res.separation == pytest.approx(0.5)
    assert res.idempotency_defect < 1e-12
    assert res.hermiticity_defect < 1e-12


def test_projector_empty_disc_is_zero():
    T = np.diag([1.0, 2.0])
    res = riesz_projector(T, Disc(center=-5.0, radius=1.0))
    assert np.linalg.norm(res.matrix, 2) < 1e-10
    assert np.linalg.norm(oracle_projector(T, Disc(center=-5.0, radius=1.0)), 2) == 0.0


def test_oracle_projector_trivial():
    assert_allclose(oracle_projector(np.eye(2), Disc(1.0, 0.5)), np.eye(2), atol=1e-14)
    assert_allclose(oracle_projector(np.diag([0.0, 5.0]), Disc(0.0, 1.0)),
                    np.diag([1.0, 0.0]), atol=1e-14)


def test_projector_matches_oracle_random(rng):
    for _ in range(10):
        d = 8
        # planted gap so the 64-node rule resolves the contour comfortably
        eigs = np.concatenate([rng.uniform(-3.0, -1.2, 3), rng.uniform(1.2, 3.0, d - 3)])
        T = hermitian_with_eigs(rng, eigs)
        disc = Disc(center=-2.1, radius=1.5)
        res = riesz_projector(T, disc, nodes=64)
        assert res.separation >= 0.1 * disc.radius
        assert res.idempotency_defect <= 1e-8
        assert res.hermiticity_defect <= 1e-8
        P0 = oracle_projector(T, disc)
        assert np.linalg.norm(res.matrix - P0, 2) <= 1e-8
        assert np.linalg.norm(P0 @ P0 - P0, 2) <= 1e-12
        assert np.linalg.norm(P0 - P0.conj().T, 2) <= 1e-12


def test_projector_error_law(rng):
    # in T's eigenbasis the N-node trapezoid projector has eigenvalue
    # exactly 1 / (1 - u^N), u = (lam - c) / r: a sharp independent oracle
    eigs = np.array([-2.0, -0.5, 0.8, 2.5])
    T = hermitian_with_eigs(rng, eigs)
    disc = Disc(center=-1.4, radius=1.0)
    nodes = 24
    res = riesz_projector(T, disc, nodes=nodes)
    u = (eigs - disc.center) / disc.radius
    predicted = 1.0 / (1.0 - u ** nodes)
    lam_quad, V = np.linalg.eigh(T)
    diag = V.conj().T @ res.matrix @ V
    assert_allclose(np.diag(diag).real, predicted, rtol=1e-10, atol=1e-12)


def test_projector_rank_counts_eigenvalues_inside(rng):
    eigs = np.array([-3.0, -1.0, 2.0, 4.0, 5.0])
    T = hermitian_with_eigs(rng, eigs)
    P = oracle_projector(T, Disc(center=-2.0, radius=1.6))
    # rank via inertia of P - I/2: projectors have eigenvalues {0, 1}
    assert inertia(P - 0.5 * np.eye(5)).n_plus == 2


def test_projector_rejects_contour_hit():
    T = np.diag([0.0, 1.0])
    with pytest.raises(EigenvalueOnContour):
        riesz_projector(T, Disc(center=0.0, radius=1.0))


def test_quadrature_convergence_decay(rng):
    T = hermitian_with_eigs(rng, np.array([-2.0, -1.5, 1.0, 2.0]))
    disc = Disc(center=-1.75, radius=0.75)
    errs = dict(quadrature_convergence(T, disc, [8, 16, 32, 64]))
    assert errs[64] <= 1e-12
    assert errs[8] > errs[16] > errs[32]


def test_quadrature_needs_more_nodes_when_separation_shrinks(rng):
    T = np.diag([-1.0, 1.0])
    wide = dict(quadrature_convergence(T, Disc(-1.0, 1.0), [32]))[32]
    tight = dict(quadrature_convergence(T, Disc(-1.0, 1.9), [32]))[32]
    assert tight > wide


def test_projector_continuity_under_perturbation(rng):
    T = hermitian_with_eigs(rng, np.array([-2.0, -1.0, 1.0, 2.0]))
    disc = Disc(center=-1.5, radius=1.0)
    P0 = oracle_projector(T, disc)
    sep = riesz_projector(T, disc).separation
    E = random_hermitian(rng, 4)
    E /= np.linalg.norm(E, 2)
    ratios = []
    for delta in [sep / 20, sep / 40, sep / 80]:
        P1 = oracle_projector(T + delta * E, disc)
        ratios.append(np.linalg.norm(P1 - P0, 2) / delta)
    assert max(ratios) < 1e3  # finite empirical Lipschitz constant
