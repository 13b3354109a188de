"""Eigen-decomposition of truncated blocks and the stiff/soft spectral checks.

All spectral statements are finite-N surrogates: one logarithmically stiff
eigenvalue per sector with slope Gamma = ||d~||^2 against L(zeta) =
log(1/(1 - zeta^2/zeta_c^2)), a bounded soft remainder converging to the
compressed limit, and the Toeplitz/rank-one bookkeeping behind both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FitError, AccuracyError
from .gram import spike_vector, weighted_block
from .maps import thresholds

#: relative gap below which the top eigenvalue is reported as degenerate
DEGENERACY_GAP = 1e-10


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns, matching order


def sym_eig(matrix: np.ndarray) -> EigenDecomposition:
    """Full symmetric eigen-decomposition, eigenvalues descending.

    Validates symmetry on input and the residual / orthonormality contract on
    output; eigenvector signs are fixed so the first component above
    1e-12 * max|component| is positive.
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("sym_eig needs a square matrix")
    scale = float(np.max(np.abs(a))) or 1.0
    if np.max(np.abs(a - a.T)) > 1e-12 * scale:
        raise DomainError("matrix is not symmetric to 1e-12 relative")
    w, v = np.linalg.eigh(0.5 * (a + a.T))
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        nz = np.nonzero(np.abs(col) > 1e-12 * np.max(np.abs(col)))[0]
        if nz.size and col[nz[0]] < 0:
            v[:, k] = -col
    norm = scale * max(1.0, float(np.max(np.abs(w))) / scale)
    resid = np.max(np.abs(a @ v - v * w[np.newaxis, :]))
    if resid > 1e-9 * norm:
        raise AccuracyError(f"eigen residual {resid:.2e} exceeds 1e-9 * ||A||")
    ortho = np.max(np.abs(v.T @ v - np.eye(v.shape[1])))
    if ortho > 1e-10:
        raise AccuracyError(f"eigenvector orthonormality defect {ortho:.2e}")
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def log_scale(zeta: float, zeta_c: float) -> float:
    """L(zeta) = log(1/(1 - zeta^2/zeta_c^2)), the stiff eigenvalue scale."""
    if not 0 < zeta < zeta_c:
        raise DomainError(f"log_scale needs 0 < zeta < zeta_c, got {zeta}")
    return -math.log1p(-((zeta / zeta_c) ** 2))


@dataclass(frozen=True)
class StiffFit:
    slope: float
    intercept: float
    residual: float  # RMS of fit residuals / range of mu1 over fit window
    L_values: np.ndarray
    mu1_values: np.ndarray
    gamma_truncated: float


def stiff_trajectory(s, q, beta, n, zeta_grid, tol=1e-12) -> StiffFit:
    """Affine fit of mu_1 against L(zeta) over the tail half of the grid.

    The slope targets the truncated Gamma = sum_{j<N} d~_j^2 (truncation caps
    the reachable slope).  Needs at least two grid points in the fit window.
    """
    if n < 10:
        raise DomainError(f"N must be >= 10, got {n}")
    zc = float(thresholds(s).zeta_c)
    zetas = np.sort(np.asarray(zeta_grid, dtype=np.float64))
    if zetas.size < 2:
        raise FitError("stiff_trajectory needs at least 2 grid points")
    ls = np.array([log_scale(z, zc) for z in zetas])
    mu1 = np.empty_like(ls)
    for i, z in enumerate(zetas):
        blk = weighted_block(s, z, q, beta, n, tol)
        mu1[i] = sym_eig(blk.matrix).eigenvalues[0]
    cut = 0.5 * (ls.min() + ls.max())
    mask = ls >= cut
    if mask.sum() < 2:
        mask[-2:] = True
    slope, intercept = np.polyfit(ls[mask], mu1[mask], 1)
    pred = slope * ls[mask] + intercept
    span = float(mu1[mask].max() - mu1[mask].min()) or 1.0
    residual = float(np.sqrt(np.mean((pred - mu1[mask]) ** 2)) / span)
    return StiffFit(
        slope=float(slope),
        intercept=float(intercept),
        residual=residual,
        L_values=ls,
        mu1_values=mu1,
        gamma_truncated=spike_vector(s, q, beta, n).gamma_truncated,
    )


@dataclass(frozen=True)
class AlignmentResult:
    value: float  # |<psi_1, d-hat>|
    degenerate: bool
    mu1: float
    mu2: float

    def __float__(self) -> float:
        return self.value


def eigvec_alignment(s, q, beta, n, zeta, tol=1e-12) -> AlignmentResult:
    """|<psi_1, d-hat>| with the phase convention <psi_1, d~> >= 0.

    Flags degeneracy when mu_1 - mu_2 < 1e-10 mu_1 (alignment is then
    basis-dependent and should not be trusted).
    """
    blk = weighted_block(s, zeta, q, beta, n, tol)
    dec = sym_eig(blk.matrix)
    d = spike_vector(s, q, beta, n).entries
    dhat = d / np.linalg.norm(d)
    val = abs(float(dec.eigenvectors[:, 0] @ dhat))
    mu1, mu2 = float(dec.eigenvalues[0]), float(dec.eigenvalues[1])
    return AlignmentResult(
        value=val, degenerate=(mu1 - mu2) < DEGENERACY_GAP * abs(mu1), mu1=mu1, mu2=mu2
    )


def _complement_basis(dhat: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of dhat (N x (N-1) columns)."""
    n = dhat.size
    full = np.eye(n)
    full[:, 0] = dhat
    qmat, _ = np.linalg.qr(full)
    # First column of Q spans dhat (up to sign); the rest span the complement.
    return qmat[:, 1:]


@dataclass(frozen=True)
class SoftSpectrum:
    s: int
    q: int
    beta: float
    zeta: float
    values: np.ndarray  # mu_2 .. mu_k of the weighted block
    compressed_limit: np.ndarray  # spectrum of Q C~ Q on the complement


def soft_spectrum(s, q, beta, n, zeta, k, tol=1e-12) -> SoftSpectrum:
    """mu_2..mu_k plus the compressed-remainder spectrum (finite-N surrogate
    of the limiting soft operator)."""
    if k > n:
        raise DomainError(f"k = {k} exceeds truncation N = {n}")
    if k < 2:
        raise DomainError("k must be >= 2 (soft spectrum starts at mu_2)")
    blk = weighted_block(s, zeta, q, beta, n, tol)
    dec = sym_eig(blk.matrix)
    zc = float(thresholds(s).zeta_c)
    lval = log_scale(zeta, zc)
    d = spike_vector(s, q, beta, n).entries
    dhat = d / np.linalg.norm(d)
    ctilde = blk.matrix - lval * np.outer(d, d)
    basis = _complement_basis(dhat)
    compressed = basis.T @ ctilde @ basis
    comp_eigs = sym_eig(0.5 * (compressed + compressed.T)).eigenvalues
    return SoftSpectrum(
        s=s,
        q=q,
        beta=float(beta),
        zeta=zeta,
        values=dec.eigenvalues[1:k],
        compressed_limit=comp_eigs,
    )


def rank_one_remainder(s, q, beta, n, zeta, tol=1e-12) -> np.ndarray:
    """C~(zeta) = G~(zeta) - L(zeta) d~ d~^T, truncated to N."""
    blk = weighted_block(s, zeta, q, beta, n, tol)
    zc = float(thresholds(s).zeta_c)
    d = spike_vector(s, q, beta, n).entries
    return blk.matrix - log_scale(zeta, zc) * np.outer(d, d)


def toeplitz_hs_norm(s, q, beta, n, eta) -> float:
    """||K_eta - K_1||_HS for (K_eta)_{j1 j2} = eta^|j1-j2| d~_j1 d~_j2."""
    if not 0 < eta <= 1:
        raise DomainError(f"eta must lie in (0, 1], got {eta}")
    d = spike_vector(s, q, beta, n).entries
    idx = np.arange(n)
    damp = eta ** np.abs(idx[:, None] - idx[None, :])
    diff = (damp - 1.0) * np.outer(d, d)
    return float(np.linalg.norm(diff))


def toeplitz_removal_check(s, q, beta, n, eta_grid) -> list:
    """L * ||K_eta - K_1||_HS for each eta; tends to 0 as eta -> 1."""
    out = []
    for eta in eta_grid:
        lval = -math.log1p(-(eta * eta))
        out.append(lval * toeplitz_hs_norm(s, q, beta, n, eta))
    return out


def nodal_count(vector) -> int:
    """Strict sign changes along the vector, ignoring entries below
    1e-12 * max|entry|."""
    v = np.asarray(vector, dtype=np.float64)
    if v.size == 0 or not np.any(v):
        raise DomainError("nodal_count needs a nonzero vector")
    thresh = 1e-12 * float(np.max(np.abs(v)))
    signs = [x for x in np.sign(v[np.abs(v) > thresh]) if x]
    return int(sum(1 for a, b in zip(signs, signs[1:]) if a != b))
