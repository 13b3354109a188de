import math

import numpy as np
import pytest

from todahess import spectra
from todahess.errors import AccuracyError, DomainError, FitError
from todahess.gram import spike_vector, weighted_block
from todahess.maps import thresholds

ZC3 = float(thresholds(3).zeta_c)


def test_sym_eig_identity_and_diag():
    dec = spectra.sym_eig(np.eye(3))
    assert np.allclose(dec.eigenvalues, [1, 1, 1])
    dec = spectra.sym_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(dec.eigenvalues, [3, 2, 1])


def test_sym_eig_rank_one():
    v = np.array([1.0, 2.0, 1.0, 1.0])  # ||v||^2 = 7
    dec = spectra.sym_eig(np.outer(v, v))
    assert abs(dec.eigenvalues[0] - 7.0) < 1e-12
    assert np.all(np.abs(dec.eigenvalues[1:]) < 1e-12)


def test_sym_eig_sign_convention_and_contracts():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(12, 12))
    a = a + a.T
    dec = spectra.sym_eig(a)
    for k in range(12):
        col = dec.eigenvectors[:, k]
        nz = np.nonzero(np.abs(col) > 1e-12 * np.max(np.abs(col)))[0]
        assert col[nz[0]] > 0
    resid = np.max(np.abs(a @ dec.eigenvectors - dec.eigenvectors * dec.eigenvalues))
    assert resid <= 1e-9 * np.max(np.abs(dec.eigenvalues))
    assert np.max(np.abs(dec.eigenvectors.T @ dec.eigenvectors - np.eye(12))) < 1e-10


def test_sym_eig_rejects_nonsymmetric():
    with pytest.raises(DomainError):
        spectra.sym_eig(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_log_scale_values():
    zc = 0.25
    assert abs(spectra.log_scale(zc * math.sqrt(1 - math.e**-1), zc) - 1.0) < 1e-12
    assert abs(spectra.log_scale(0.9 * zc, zc) - math.log(1 / 0.19)) < 1e-12
    assert spectra.log_scale(1e-8 * zc, zc) < 1e-15
    with pytest.raises(DomainError):
        spectra.log_scale(zc, zc)


def test_stiff_trajectory_small_config():
    # spec example: s=2, q=1, beta=1, N=40 -> slope near pi^3/96 (within 10%)
    zc2 = float(thresholds(2).zeta_c)
    grid = (1.0 - np.geomspace(1e-2, 1e-5, 8)) * zc2
    fit = spectra.stiff_trajectory(2, 1, 1.0, 40, grid)
    gamma = fit.gamma_truncated
    assert abs(gamma - math.pi**3 / 96) < 1e-4  # truncated vs analytic
    assert abs(fit.slope - gamma) / gamma < 0.10
    assert fit.slope > 0
    assert fit.residual < 0.02


def test_stiff_trajectory_needs_grid():
    with pytest.raises(FitError):
        spectra.stiff_trajectory(3, 1, 1.0, 12, [0.5 * ZC3])
    with pytest.raises(DomainError):
        spectra.stiff_trajectory(3, 1, 1.0, 4, [0.5 * ZC3, 0.6 * ZC3])


def test_alignment_monotone_and_bounded():
    a1 = spectra.eigvec_alignment(3, 1, 1.0, 30, 0.9 * ZC3)
    a2 = spectra.eigvec_alignment(3, 1, 1.0, 30, 0.9999 * ZC3)
    assert 0.0 <= a1.value <= 1.0
    assert a2.value > a1.value
    assert not a2.degenerate
    assert float(a2) == a2.value


def test_alignment_order_one_over_L():
    zc = ZC3
    cs = []
    for ratio in (0.99, 0.999, 0.9999):
        al = spectra.eigvec_alignment(3, 1, 1.0, 30, ratio * zc)
        cs.append((1 - al.value) * spectra.log_scale(ratio * zc, zc))
    cs = np.array(cs)
    assert cs.max() < 3.0 * max(cs.min(), 1e-12)


def test_soft_spectrum_shapes_and_errors():
    ss = spectra.soft_spectrum(3, 1, 1.0, 16, 0.99 * ZC3, 5)
    assert ss.values.shape == (4,)  # mu_2..mu_5
    assert ss.compressed_limit.shape == (15,)
    assert np.all(ss.values >= -1e-12)
    with pytest.raises(DomainError):
        spectra.soft_spectrum(3, 1, 1.0, 10, 0.9 * ZC3, 11)


def test_soft_spectrum_bounded_cap():
    caps = []
    for ratio in (0.9, 0.99, 0.999, 0.9999):
        ss = spectra.soft_spectrum(3, 1, 1.0, 20, ratio * ZC3, 4)
        caps.append(ss.values[0])
    assert max(caps) < 0.01  # config-level cap; stiff branch excluded


def test_rank_one_remainder_reconstruction():
    zeta = 0.999 * ZC3
    n = 20
    blk = weighted_block(3, zeta, 1, 1.0, n)
    d = spike_vector(3, 1, 1.0, n).entries
    c = spectra.rank_one_remainder(3, 1, 1.0, n, zeta)
    lval = spectra.log_scale(zeta, ZC3)
    assert np.allclose(c + lval * np.outer(d, d), blk.matrix, rtol=0, atol=1e-14)


def test_rank_one_remainder_stabilizes():
    norms = []
    for ratio in (0.9, 0.99, 0.999, 0.9999):
        c = spectra.rank_one_remainder(3, 1, 1.0, 24, ratio * ZC3)
        norms.append(np.linalg.norm(c, 2))
    last = norms[1:]
    assert (max(last) - min(last)) / max(last) < 0.25
    # norm-convergence surrogate
    c1 = spectra.rank_one_remainder(3, 1, 1.0, 24, 0.999 * ZC3)
    c2 = spectra.rank_one_remainder(3, 1, 1.0, 24, 0.9999 * ZC3)
    assert np.linalg.norm(c2 - c1, 2) < 0.2 * np.linalg.norm(c2, 2)


def test_rayleigh_lower_bound():
    n = 24
    gamma = spike_vector(3, 1, 1.0, n).gamma_truncated
    for ratio in (0.99, 0.9999):
        zeta = ratio * ZC3
        blk = weighted_block(3, zeta, 1, 1.0, n)
        mu1 = spectra.sym_eig(blk.matrix).eigenvalues[0]
        lval = spectra.log_scale(zeta, ZC3)
        cnorm = np.linalg.norm(
            spectra.rank_one_remainder(3, 1, 1.0, n, zeta), 2
        )
        assert mu1 >= gamma * lval - cnorm - 1e-12


def test_gap_growth():
    gaps = []
    for ratio in (0.99, 0.999, 0.9999):
        blk = weighted_block(3, ratio * ZC3, 1, 1.0, 24)
        ev = spectra.sym_eig(blk.matrix).eigenvalues
        gaps.append(ev[0] - ev[1])
    assert gaps[0] < gaps[1] < gaps[2]


def test_toeplitz_removal_basics():
    assert spectra.toeplitz_hs_norm(3, 1, 1.0, 50, 1.0) == 0.0
    vals = spectra.toeplitz_removal_check(3, 1, 1.0, 200, [0.9, 0.99, 0.999])
    assert vals[0] > vals[1] > vals[2] > 0


def test_toeplitz_exponent_beta_quarter():
    etas = np.array([0.9, 0.99, 0.999])
    hs = np.array([spectra.toeplitz_hs_norm(3, 1, 0.25, 400, e) for e in etas])
    slope = np.polyfit(np.log(1 - etas), np.log(hs), 1)[0]
    assert abs(slope - 0.75) < 0.15


def test_nodal_count():
    assert spectra.nodal_count([1.0, 2.0, 3.0]) == 0
    assert spectra.nodal_count([1.0, -1.0, 1.0]) == 2
    assert spectra.nodal_count([1.0, 1e-18, -1.0]) == 1  # tiny entry ignored
    with pytest.raises(DomainError):
        spectra.nodal_count([0.0, 0.0])


def test_isospectral_blocks_surrogate():
    # nonzero spectra of V~^T V~ and V~ V~^T agree to 1e-8 relative
    from todahess.gram import synthesis_matrix

    v = synthesis_matrix(2, 1, 1.0, 0.5 * float(thresholds(2).zeta_c), 6, 80)
    e1 = np.linalg.eigvalsh(v.T @ v)[::-1]
    e2 = np.linalg.eigvalsh(v @ v.T)[::-1][:6]
    assert np.max(np.abs(e1 - e2)) <= 1e-8 * e1[0]
