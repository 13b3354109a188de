"""Gram vectors, scalar Gram weights, Hessian entries and weighted blocks.

The mixed Hessian has entries H_{mn} = m n sum_p (1/p) R_{s,p}(k) R_{s,p}(l)
zeta^{k+l} over p = m mod s, p <= min(m,n), with k = (m-p)/s, l = (n-p)/s.
It factorizes through the Gram vectors v^{(p)}_m = (m/sqrt(p)) R_{s,p}(k)
zeta^k supported on m = p + ks.  Sector q holds the indices p_j = q + j s;
the weighted realization divides column j by w_j = p_j^{3/2+beta} M^{p_j}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import DivergenceError, DomainError
from .maps import thresholds
from .raney import raney_table

DEFAULT_TOL = 1e-12


def _check_subcritical(s: int, zeta: float) -> float:
    """Exact zeta < zeta_c check; returns float(zeta_c)."""
    zc = thresholds(s).zeta_c
    if not zeta > 0:
        raise DomainError(f"zeta must be > 0, got {zeta}")
    if Fraction(zeta) >= zc:
        raise DivergenceError(
            f"zeta = {zeta!r} >= zeta_c = {float(zc):.9g}: Gram series diverges"
        )
    return float(zc)


def weight(s: int, q: int, beta: float, j: int) -> float:
    """w_j = p_j^(3/2+beta) M^(p_j) with p_j = q + j s, M = s/(s-1)."""
    p = q + j * s
    return p ** (1.5 + beta) * (s / (s - 1.0)) ** p


def spike_constant(s: int) -> float:
    """c_s = sqrt(s / (2 pi (s-1))); the weighted spike is c_s p_j^(-1-beta)."""
    return math.sqrt(s / (2.0 * math.pi * (s - 1)))


def raney_zeta(s: int, p: int, k: int, zeta: float) -> float:
    """R_{s,p}(k) * zeta^k via ratio steps (safe for k with R ~ zeta_c^{-k})."""
    val = 1.0
    for m in range(k):
        num = 1.0
        for i in range(s):
            num *= s * m + p + i
        den = m + 1.0
        for l in range(1, s):
            den *= (s - 1) * m + p + l
        val *= (num / den) * zeta
    return val


# ---------------------------------------------------------------------------
# Scalar Gram weights and Hessian entries


def sigma_p(s: int, p: int, zeta: float, tol: float = DEFAULT_TOL) -> float:
    """sigma_p(zeta) = sum_m ((p+ms)^2 / p) R_{s,p}(m)^2 zeta^{2m}.

    Raises DivergenceError at or beyond zeta_c; the truncation tail is kept
    below tol (relative) by the geometric bound on the term ratios.
    """
    zc = _check_subcritical(s, zeta)
    ratio_limit = (zeta / zc) ** 2
    val, _, tail = _kernels.gram_series(
        s, p, p, 0, zeta, tol, -math.log(p), ratio_limit
    )
    if tail < 0:
        raise DivergenceError(f"sigma_{p} series did not reach tolerance {tol}")
    return val


@dataclass(frozen=True)
class GramVector:
    """v^{(p)} restricted to its support m = p + ks, stored as values[k]."""

    s: int
    p: int
    zeta: float
    values: np.ndarray  # values[k] = ((p+ks)/sqrt(p)) R_{s,p}(k) zeta^k

    def entry(self, m: int) -> float:
        """Ambient entry v^{(p)}_m; zero off the progression p + ks."""
        if m < self.p or (m - self.p) % self.s:
            return 0.0
        k = (m - self.p) // self.s
        if k >= len(self.values):
            raise DomainError(f"GramVector built only up to k={len(self.values)-1}")
        return float(self.values[k])


def gram_vector(s: int, p: int, zeta: float, k_max: int) -> GramVector:
    _check_subcritical(s, zeta)
    vals = np.empty(k_max + 1)
    rz = 1.0
    for k in range(k_max + 1):
        vals[k] = (p + k * s) / math.sqrt(p) * rz
        num = 1.0
        for i in range(s):
            num *= s * k + p + i
        den = k + 1.0
        for l in range(1, s):
            den *= (s - 1) * k + p + l
        rz *= (num / den) * zeta
    return GramVector(s=s, p=p, zeta=zeta, values=vals)


def hessian_entry(s: int, zeta: float, m: int, n: int) -> float:
    """H_{mn}; vanishes unless m = n (mod s).  Defined for zeta < zeta_univ."""
    if m < 1 or n < 1:
        raise DomainError("indices m, n must be >= 1")
    th = thresholds(s)
    if not 0 < zeta < float(th.zeta_univ):
        raise DomainError(
            f"hessian_entry needs 0 < zeta < zeta_univ = {float(th.zeta_univ):.6g}"
        )
    if (m - n) % s:
        return 0.0
    p0 = (m - 1) % s + 1
    total = 0.0
    for p in range(p0, min(m, n) + 1, s):
        k = (m - p) // s
        l = (n - p) // s
        total += raney_zeta(s, p, k, zeta) * raney_zeta(s, p, l, zeta) / p
    return m * n * total


def gram_consistency(
    s: int, zeta: float, m: int, n: int, p_max: int | None = None
) -> bool:
    """Check sum_p v^{(p)}_m v^{(p)}_n == H_{mn} to 1e-12 relative.

    The left side is assembled from GramVector objects (independent code
    path from hessian_entry's direct double loop).
    """
    h = hessian_entry(s, zeta, m, n)
    if p_max is None:
        p_max = min(m, n)
    total = 0.0
    for p in range(1, p_max + 1):
        if (m - p) % s or (n - p) % s or p > min(m, n):
            continue
        v = gram_vector(s, p, zeta, max(m, n) // s + 1)
        total += v.entry(m) * v.entry(n)
    scale = max(abs(h), abs(total), 1e-300)
    return abs(total - h) <= 1e-12 * scale


# ---------------------------------------------------------------------------
# Weighted blocks


def block_entry(
    s: int,
    zeta: float,
    q: int,
    beta: float,
    j1: int,
    j2: int,
    tol: float = DEFAULT_TOL,
) -> float:
    """Entry (j1, j2) of the weighted block Gram operator in sector q."""
    if not 1 <= q <= s:
        raise DomainError(f"sector q must lie in [1, s], got {q}")
    if j1 < 0 or j2 < 0:
        raise DomainError("block indices must be >= 0")
    zc = _check_subcritical(s, zeta)
    ja, jb = min(j1, j2), max(j1, j2)
    pa = q + ja * s
    pb = q + jb * s
    log_m_big = math.log(s / (s - 1.0))
    log_pref = (
        -(1.5 + beta) * (math.log(pa) + math.log(pb))
        - (pa + pb) * log_m_big
        - 0.5 * (math.log(pa) + math.log(pb))
    )
    val, _, tail = _kernels.gram_series(
        s, pa, pb, jb - ja, zeta, tol, log_pref, (zeta / zc) ** 2
    )
    if tail < 0:
        raise DivergenceError("block entry series did not reach tolerance")
    return val


@dataclass(frozen=True)
class WeightedBlock:
    s: int
    q: int
    beta: float
    zeta: float
    n: int
    matrix: np.ndarray
    weights: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))


def weighted_block(
    s: int,
    zeta: float,
    q: int,
    beta: float,
    n: int,
    tol: float = DEFAULT_TOL,
) -> WeightedBlock:
    """Truncated N x N weighted block; entries via the series kernel."""
    if not 1 <= q <= s:
        raise DomainError(f"sector q must lie in [1, s], got {q}")
    if n < 2:
        raise DomainError(f"truncation N must be >= 2, got {n}")
    zc = _check_subcritical(s, zeta)
    mat = _kernels.block_matrix(s, q, float(beta), zeta, tol, (zeta / zc) ** 2, n)
    w = np.array([weight(s, q, beta, j) for j in range(n)])
    return WeightedBlock(s=s, q=q, beta=float(beta), zeta=zeta, n=n, matrix=mat, weights=w)


@dataclass(frozen=True)
class SpikeVector:
    """Weighted spike direction d~_j = c_s p_j^(-1-beta) and its norms."""

    s: int
    q: int
    beta: float
    entries: np.ndarray
    gamma_truncated: float
    gamma_analytic: float


def spike_vector(s: int, q: int, beta: float, n: int) -> SpikeVector:
    """Spike entries up to j < n, plus Gamma both truncated and analytic.

    gamma_analytic = c_s^2 sum_{j>=0} (q+js)^(-2-2beta), summed directly to
    large j with an integral tail bound below 1e-12.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 1 <= q <= s:
        raise DomainError(f"sector q must lie in [1, s], got {q}")
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    cs = spike_constant(s)
    pj = q + s * np.arange(n, dtype=np.float64)
    entries = cs * pj ** (-1.0 - beta)
    gamma_trunc = float(np.sum(entries**2))

    j_tail = max(n, int(40000 / s) + 1)
    pj_full = q + s * np.arange(j_tail, dtype=np.float64)
    head = float(np.sum(pj_full ** (-2.0 - 2.0 * beta)))
    # Midpoint-rule tail: sum_{j>=J} f(j) ~ int_{J-1/2}^inf f(x) dx.
    a = q + s * (j_tail - 0.5)
    tail = a ** (-1.0 - 2.0 * beta) / (s * (1.0 + 2.0 * beta))
    gamma_analytic = cs**2 * (head + tail)
    return SpikeVector(
        s=s,
        q=q,
        beta=float(beta),
        entries=entries,
        gamma_truncated=gamma_trunc,
        gamma_analytic=gamma_analytic,
    )


def synthesis_matrix(
    s: int, q: int, beta: float, zeta: float, n_cols: int, n_rows: int
) -> np.ndarray:
    """Weighted synthesis factor V~ with rows = ambient indices q + is.

    V~[i, j] = ((q+is)/sqrt(p_j)) R_{s,p_j}(i-j) zeta^(i-j) / w_j for i >= j
    (lower triangular); then G~ = V~^T V~ up to row truncation, and V~ V~^T
    has the same nonzero spectrum exactly.
    """
    _check_subcritical(s, zeta)
    out = np.zeros((n_rows, n_cols))
    for j in range(n_cols):
        p = q + j * s
        wj = weight(s, q, beta, j)
        rz = 1.0
        for i in range(j, n_rows):
            k = i - j
            out[i, j] = (q + i * s) / math.sqrt(p) * rz / wj
            num = 1.0
            for a in range(s):
                num *= s * k + p + a
            den = k + 1.0
            for l in range(1, s):
                den *= (s - 1) * k + p + l
            rz *= (num / den) * zeta
    return out
