"""Bound tests: whitening roots, derivative stacking, error covariances."""

import numpy as np
import pytest

from doamap import (
    ArrayGeometry,
    BoundConfig,
    acrb,
    crb,
    derivative_stack,
    hermitian_sqrt_inv,
    noise_covariance,
    signal_covariance,
    steering_derivative,
    steering_matrix,
    steering_vector,
)
from doamap.exceptions import NotPositiveDefinite, RankDeficientSteering

from conftest import reference_scenario


def _reference_inputs(N=100, alpha=1.0, kappa1=1e5, random1=True):
    scn = reference_scenario()
    thetas = scn.mean_thetas
    P = scn.signal_scale * scn.signal_cov
    Q = noise_covariance(scn)
    config = BoundConfig(
        treat_random=(random1, False, False),
        kappas=(kappa1, 0.0, 0.0),
        N=N,
        alpha=alpha,
    )
    return thetas, P, Q, config, scn.geom


class TestHermitianSqrtInv:
    def test_scaled_identity(self):
        np.testing.assert_allclose(hermitian_sqrt_inv(4.0 * np.eye(3)), np.eye(3) / 2)

    def test_diagonal(self):
        Z = hermitian_sqrt_inv(np.diag([1.0, 9.0]))
        np.testing.assert_allclose(Z, np.diag([1.0, 1.0 / 3.0]), atol=1e-14)

    def test_whitens_random_covariances(self):
        for seed in range(50):
            rng = np.random.default_rng(seed)
            m = int(rng.integers(2, 8))
            B = rng.standard_normal((m, 2 * m)) + 1j * rng.standard_normal((m, 2 * m))
            Q = B @ B.conj().T / (2 * m) + 0.05 * np.eye(m)
            Z = hermitian_sqrt_inv(Q)
            np.testing.assert_allclose(Z, Z.conj().T, atol=1e-10)
            np.testing.assert_allclose(Z @ Q @ Z, np.eye(m), atol=1e-9)


class TestDerivativeStack:
    def test_single_angle_block(self):
        geom = ArrayGeometry(4)
        D = derivative_stack([0.3], geom)
        assert D.shape == (4, 1)
        np.testing.assert_allclose(D[:, 0], steering_derivative(0.3, geom))

    def test_block_structure(self):
        geom = ArrayGeometry(5)
        thetas = np.array([-0.4, 0.1, 0.7])
        D = derivative_stack(thetas, geom)
        assert D.shape == (15, 3)
        for i, t in enumerate(thetas):
            block = D[i * 5:(i + 1) * 5, :]
            np.testing.assert_allclose(block[:, i], steering_derivative(t, geom))
            off = np.delete(block, i, axis=1)
            np.testing.assert_array_equal(off, np.zeros_like(off))

    def test_matches_finite_differences(self):
        geom = ArrayGeometry(6)
        thetas = np.array([-0.5, 0.2])
        D = derivative_stack(thetas, geom)
        h = 1e-6
        for i in range(2):
            tp, tm = thetas.copy(), thetas.copy()
            tp[i] += h
            tm[i] -= h
            fd = (steering_matrix(tp, geom).A - steering_matrix(tm, geom).A) / (2 * h)
            np.testing.assert_allclose(
                D[:, i].reshape(2, geom.m).T[:, :], fd[:, :], atol=2e-6
            )


class TestBoundConfig:
    def test_random_angle_needs_concentration(self):
        with pytest.raises(ValueError):
            BoundConfig(treat_random=(True,), kappas=(0.0,), N=10, alpha=1.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            BoundConfig(treat_random=(True, False), kappas=(1.0,), N=10, alpha=1.0)

    def test_prior_curvature_masks_deterministic_angles(self):
        config = BoundConfig(
            treat_random=(True, False, False),
            kappas=(1e5, 3.0, 0.0),
            N=10,
            alpha=0.5,
        )
        np.testing.assert_array_equal(config.prior_curvature, [1e5, 0.0, 0.0])


class TestAcrb:
    def test_prior_free_bound_is_special_case(self):
        thetas, P, Q, config, geom = _reference_inputs()
        flat = BoundConfig(
            treat_random=(False, False, False),
            kappas=config.kappas,
            N=config.N,
            alpha=config.alpha,
        )
        b1 = acrb(thetas, P, Q, flat, geom)
        b2 = crb(thetas, P, Q, config, geom)
        assert b1.C_theta.tobytes() == b2.C_theta.tobytes()

    def test_tight_prior_pins_first_angle(self):
        # with a single snapshot the data barely informs the angle, so the
        # bound collapses to the prior variance 1/kappa
        thetas, P, Q, config, geom = _reference_inputs(N=1, kappa1=1e5)
        b = acrb(thetas, P, Q, config, geom)
        assert b.C_theta[0, 0] < 1.0 / 1e5
        assert b.C_theta[0, 0] > 0.8 / 1e5
        c = crb(thetas, P, Q, config, geom)
        assert b.C_theta[0, 0] < 0.15 * c.C_theta[0, 0]

    def test_prior_never_hurts(self):
        thetas, P, Q, config, geom = _reference_inputs()
        with_prior = acrb(thetas, P, Q, config, geom)
        without = crb(thetas, P, Q, config, geom)
        assert np.all(np.diag(with_prior.C_theta) <= np.diag(without.C_theta) + 1e-18)

    def test_more_snapshots_tighten_bound(self):
        diags = []
        for N in (100, 200, 400):
            thetas, P, Q, config, geom = _reference_inputs(N=N)
            diags.append(np.diag(acrb(thetas, P, Q, config, geom).C_theta))
        assert np.all(diags[1] < diags[0])
        assert np.all(diags[2] < diags[1])

    def test_better_noise_knowledge_tightens_bound(self):
        # alpha = N/M -> 0 is the exactly-known-noise limit
        diags = []
        for alpha in (1.0, 0.1, 0.01):
            thetas, P, Q, config, geom = _reference_inputs(alpha=alpha)
            diags.append(np.diag(acrb(thetas, P, Q, config, geom).C_theta))
        assert np.all(diags[1] <= diags[0] + 1e-18)
        assert np.all(diags[2] <= diags[1] + 1e-18)

    def test_symmetry_and_rms_consistency(self):
        thetas, P, Q, config, geom = _reference_inputs()
        b = acrb(thetas, P, Q, config, geom)
        np.testing.assert_allclose(b.C_theta, b.C_theta.T, atol=1e-12)
        np.testing.assert_allclose(
            b.rms_deg, np.degrees(np.sqrt(np.diag(b.C_theta))), atol=1e-15
        )
        assert np.all(np.linalg.eigvalsh(b.C_theta) > 0)

    def test_whitened_projector_annihilates_steering(self):
        thetas, P, Q, config, geom = _reference_inputs()
        from doamap.array_model import steering_grid

        A = steering_grid(thetas, geom)
        Z = hermitian_sqrt_inv(Q)
        ZA = Z @ A
        proj = ZA @ np.linalg.solve(ZA.conj().T @ ZA, ZA.conj().T)
        perp = np.eye(geom.m) - proj
        np.testing.assert_allclose(perp @ ZA, np.zeros_like(ZA), atol=1e-10)

    def test_invariant_to_degenerate_eigenbasis(self):
        # orthogonal steering columns with P = Q = I give a doubly repeated
        # dominant eigenvalue; the bound must not depend on which basis the
        # eigensolver picks inside that eigenspace
        m = 6
        geom = ArrayGeometry(m)
        thetas = np.array([-np.arcsin(1.0 / m), np.arcsin(1.0 / m)])
        A = np.column_stack([steering_vector(t, geom) for t in thetas])
        assert abs(A[:, 0].conj() @ A[:, 1]) < 1e-12
        P = np.eye(2)
        Q = np.eye(m)
        config = BoundConfig(
            treat_random=(False, False), kappas=(0.0, 0.0), N=50, alpha=0.7
        )
        b = acrb(thetas, P, Q, config, geom)

        R = A @ P @ A.conj().T + Q
        evals, evecs = np.linalg.eigh(R)
        Es = evecs[:, ::-1][:, :2]
        Ls = evals[::-1][:2]
        assert abs(Ls[0] - Ls[1]) < 1e-10
        rng = np.random.default_rng(3)
        X = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        U, _ = np.linalg.qr(X)
        Es_rot = Es @ U

        ZA = A  # Z = I here
        proj = ZA @ np.linalg.solve(ZA.conj().T @ ZA, ZA.conj().T)
        perp = np.eye(m) - proj
        ZAP = ZA @ P
        Gamma = ZAP.conj().T @ (Es_rot / (Ls + config.alpha)) @ Es_rot.conj().T @ ZAP
        D = derivative_stack(thetas, geom)
        info = 2.0 * config.N * np.real(D.conj().T @ np.kron(Gamma.T, perp) @ D)
        info = (info + info.T) / 2.0
        C_manual = np.linalg.inv(info)
        np.testing.assert_allclose(b.C_theta, C_manual, atol=1e-10)

    def test_zero_alpha_matches_manual_known_noise_bound(self):
        # full hand computation of the alpha = 0 case on a small instance
        m = 5
        geom = ArrayGeometry(m)
        thetas = np.array([np.deg2rad(-20.0), np.deg2rad(30.0)])
        P = signal_covariance(0.4, 2) * 2.0
        rng = np.random.default_rng(8)
        B = rng.standard_normal((m, 2 * m)) + 1j * rng.standard_normal((m, 2 * m))
        Q = B @ B.conj().T / (2 * m) + 0.2 * np.eye(m)
        config = BoundConfig(
            treat_random=(False, False), kappas=(0.0, 0.0), N=64, alpha=0.0
        )
        b = acrb(thetas, P, Q, config, geom)

        A = np.column_stack([steering_vector(t, geom) for t in thetas])
        Z = hermitian_sqrt_inv(Q)
        ZA = Z @ A
        proj = ZA @ np.linalg.solve(ZA.conj().T @ ZA, ZA.conj().T)
        W = Z @ (np.eye(m) - proj) @ Z
        Rz = ZA @ P @ ZA.conj().T + np.eye(m)
        evals, evecs = np.linalg.eigh(Rz)
        Es, Ls = evecs[:, ::-1][:, :2], evals[::-1][:2]
        ZAP = ZA @ P
        Gamma = ZAP.conj().T @ (Es / Ls) @ Es.conj().T @ ZAP
        d1 = steering_derivative(thetas[0], geom)
        d2 = steering_derivative(thetas[1], geom)
        info = np.empty((2, 2))
        for i, di in enumerate((d1, d2)):
            for j, dj in enumerate((d1, d2)):
                info[i, j] = 2.0 * config.N * np.real(Gamma.T[i, j] * (di.conj() @ W @ dj))
        C_manual = np.linalg.inv((info + info.T) / 2.0)
        np.testing.assert_allclose(b.C_theta, C_manual, atol=1e-12)


class TestAcrbErrors:
    def test_too_many_sources(self):
        geom = ArrayGeometry(3)
        config = BoundConfig(
            treat_random=(False,) * 3, kappas=(0.0,) * 3, N=10, alpha=1.0
        )
        with pytest.raises(ValueError, match="m-1"):
            acrb([-0.4, 0.1, 0.5], np.eye(3), np.eye(3), config, geom)

    def test_config_length_mismatch(self):
        thetas, P, Q, config, geom = _reference_inputs()
        with pytest.raises(ValueError, match="config"):
            acrb(thetas[:2], P[:2, :2], Q, config, geom)

    def test_coincident_angles_rejected(self):
        geom = ArrayGeometry(6)
        config = BoundConfig(
            treat_random=(False, False), kappas=(0.0, 0.0), N=10, alpha=1.0
        )
        with pytest.raises((RankDeficientSteering, Exception)):
            acrb([0.3, 0.3 + 1e-14], np.eye(2), np.eye(6), config, geom)

    def test_indefinite_noise_rejected(self):
        geom = ArrayGeometry(4)
        config = BoundConfig(treat_random=(False,), kappas=(0.0,), N=10, alpha=1.0)
        with pytest.raises(NotPositiveDefinite):
            acrb([0.2], np.eye(1), np.diag([1.0, 1.0, 1.0, -0.1]), config, geom)

    def test_vanishing_source_power_gives_singular_information(self):
        geom = ArrayGeometry(5)
        config = BoundConfig(
            treat_random=(False, False), kappas=(0.0, 0.0), N=10, alpha=1.0
        )
        # source power so small the information matrix underflows to zero
        with pytest.raises(NotPositiveDefinite, match="information"):
            acrb([-0.3, 0.4], 1e-300 * np.eye(2), np.eye(5), config, geom)

    def test_zero_source_power_rejected(self):
        geom = ArrayGeometry(5)
        config = BoundConfig(
            treat_random=(False, False), kappas=(0.0, 0.0), N=10, alpha=1.0
        )
        with pytest.raises(NotPositiveDefinite, match="P"):
            acrb([-0.3, 0.4], np.zeros((2, 2)), np.eye(5), config, geom)
