"""Moment sequences, Hankel positivity, Jacobi recurrences, Weyl function
and the Perron density of the representing measure of G_p.

For 1 <= p <= s the rescaled sequence m_n = R_{s,p}(n)^2 zeta_c^{2n} is a
Hausdorff moment sequence on [0, 1]; equivalently the unrescaled integers
R_{s,p}(n)^2 are moments of a probability measure on [0, 1/zeta_c^2].  All
recurrence data are computed in exact rational arithmetic (the notorious
float instability of moment-based orthogonalization never enters); floats
appear only at output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .continuation import cut_trace, gp_continue
from .errors import ConditioningError, DomainError, PositivityError
from .maps import thresholds
from .raney import _validate_sp, raney_table


@dataclass(frozen=True)
class MomentSequence:
    """Rescaled moments m_n = R_{s,p}(n)^2 zeta_c^{2n} (exact rationals).

    unscaled(n) returns the integer moment R_{s,p}(n)^2 of the measure on
    [0, 1/zeta_c^2]; the two differ by the substitution t -> t zeta_c^2.
    """

    s: int
    p: int
    moments: tuple  # Fractions

    @property
    def n_max(self) -> int:
        return len(self.moments) - 1

    def unscaled(self, n: int) -> int:
        zc2 = Fraction((self.s - 1) ** (self.s - 1), self.s**self.s) ** 2
        val = self.moments[n] / zc2**n
        assert val.denominator == 1
        return val.numerator


def moments(s: int, p: int, n_max: int) -> MomentSequence:
    _validate_sp(s, p)
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    tbl = raney_table(s, p, n_max)
    zc2 = Fraction((s - 1) ** (s - 1), s**s) ** 2
    ms = tuple(Fraction(tbl[n] ** 2) * zc2**n for n in range(n_max + 1))
    return MomentSequence(s=s, p=p, moments=ms)


def hankel_positivity(mseq: MomentSequence, k_max: int) -> bool:
    """All leading Hankel minors det(m_{i+j})_{0<=i,j<=k} > 0 for k <= k_max,
    in exact rational arithmetic."""
    if 2 * k_max > mseq.n_max:
        raise DomainError("k_max needs moments up to index 2 k_max")
    for k in range(k_max + 1):
        mat = [[mseq.moments[i + j] for j in range(k + 1)] for i in range(k + 1)]
        if _det_fraction(mat) <= 0:
            return False
    return True


def _det_fraction(mat) -> Fraction:
    """Determinant by fraction-preserving Gaussian elimination with pivoting."""
    a = [row[:] for row in mat]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            if a[r][c]:
                f = a[r][c] * inv
                for cc in range(c, n):
                    a[r][cc] -= f * a[c][cc]
    return det


@dataclass(frozen=True)
class JacobiData:
    """Three-term recurrence data in rescaled units (spectrum in [0, 1]).

    a_sq_exact / b_exact are the exact rationals; a and b are their float
    images.  tridiagonal(rescaled=False) returns the operator acting in the
    original t units, with spectrum inside [0, 1/zeta_c^2].
    """

    s: int
    p: int
    a_sq_exact: tuple  # Fractions a_1^2 .. a_n^2
    b_exact: tuple  # Fractions b_0 .. b_{n-1} (or b_n, see jacobi_coefficients)
    source: MomentSequence
    precision: str  # 'exact'

    @property
    def a(self) -> np.ndarray:
        return np.sqrt(np.array([float(x) for x in self.a_sq_exact]))

    @property
    def b(self) -> np.ndarray:
        return np.array([float(x) for x in self.b_exact])

    @property
    def n(self) -> int:
        return len(self.b_exact)

    def tridiagonal(self, rescaled: bool = True) -> np.ndarray:
        scale = 1.0 if rescaled else 1.0 / float(
            Fraction((self.s - 1) ** (self.s - 1), self.s**self.s) ** 2
        )
        n = self.n
        mat = np.zeros((n, n))
        for i in range(n):
            mat[i, i] = float(self.b_exact[i]) * scale
        for i in range(1, n):
            aij = math.sqrt(float(self.a_sq_exact[i - 1])) * scale
            mat[i, i - 1] = mat[i - 1, i] = aij
        return mat


def jacobi_coefficients(mseq: MomentSequence, n: int) -> JacobiData:
    """(a_k, b_k) by the Stieltjes procedure in exact rationals.

    Computes b_0..b_{n-1} and a_1^2..a_{n-1}^2 (enough for the n x n
    truncation).  Raises PositivityError when some L[P_k^2] <= 0, which
    signals p outside the guaranteed range 1 <= p <= s or too few moments.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if 2 * n + 1 > mseq.n_max + 1:
        raise DomainError(f"need moments up to 2n = {2*n}, have {mseq.n_max}")
    big = [mseq.moments[k] for k in range(mseq.n_max + 1)]

    def functional(poly):
        return sum(c * big[i] for i, c in enumerate(poly) if c)

    def polymul(a, b):
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return out

    p_prev = [Fraction(1)]
    h_prev = functional(p_prev)  # m_0
    if h_prev <= 0:
        raise PositivityError("m_0 <= 0")
    b_list = [functional([Fraction(0)] + p_prev) / h_prev]
    a_sq = []
    p_cur = [-b_list[0], Fraction(1)]
    for k in range(1, n):
        pk2 = polymul(p_cur, p_cur)
        h_cur = functional(pk2)
        if h_cur <= 0:
            raise PositivityError(f"L[P_{k}^2] = {h_cur} <= 0")
        a_sq.append(h_cur / h_prev)
        b_list.append(functional([Fraction(0)] + pk2) / h_cur)
        nxt = [Fraction(0)] + p_cur  # t P_k
        for i, ci in enumerate(p_cur):
            nxt[i] -= b_list[-1] * ci
        for i, ci in enumerate(p_prev):
            nxt[i] -= a_sq[-1] * ci
        p_prev, p_cur, h_prev = p_cur, nxt, h_cur
    return JacobiData(
        s=mseq.s,
        p=mseq.p,
        a_sq_exact=tuple(a_sq),
        b_exact=tuple(b_list),
        source=mseq,
        precision="exact",
    )


def weyl_function(jac: JacobiData, u: complex) -> complex:
    """<e_0, (I - u J)^{-1} e_0> by the backward continued fraction.

    J is the unrescaled Jacobi operator; with the stored rescaled data this
    is the same fraction evaluated at x = u / zeta_c^2.  Converges to G_p(u)
    as the depth grows, for u off [zeta_c^2, inf).
    """
    zc2 = float(Fraction((jac.s - 1) ** (jac.s - 1), jac.s**jac.s) ** 2)
    x = complex(u) / zc2
    b = jac.b
    a2 = [float(v) for v in jac.a_sq_exact]
    n = len(b)
    # u^{-1} must stay off the truncated spectrum; near-pole denominators
    # below the 1e-8 margin are rejected rather than amplified.
    den = 1.0 - x * b[n - 1]
    if abs(den) < 1e-8:
        raise ConditioningError("continued fraction hit a near-pole")
    f = 1.0 / den
    for k in range(n - 2, -1, -1):
        den = 1.0 - x * b[k] - x * x * a2[k] * f
        if abs(den) < 1e-8:
            raise ConditioningError("continued fraction hit a near-pole")
        f = 1.0 / den
    return f if isinstance(u, complex) and u.imag else complex(f).real + 0j


def perron_density(s: int, p: int, t: float, tol: float = 1e-9) -> float:
    """varrho_p(t) = (1/pi t) Im G_p(1/t + i0) on (0, 1/zeta_c^2)."""
    zc2 = float(thresholds(s).zeta_c) ** 2
    tmax = 1.0 / zc2
    if not 0 < t < tmax:
        raise DomainError(f"t must lie in (0, {tmax:.6g})")
    if t < 1e-3 * tmax or t > tmax * (1 - 1e-3):
        raise DomainError("t too close to an endpoint (1e-3 relative margin)")
    st = gp_continue(s, p, 1.0 / t, "above", tol=min(tol, 1e-10))
    val = st.value.imag / (math.pi * t)
    return val


def _gauss_legendre_panels(a: float, b: float, n_panels: int, n_nodes: int):
    """Log-spaced panels on [a, b] with Gauss-Legendre nodes per panel."""
    edges = np.geomspace(a, b, n_panels + 1)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    nodes, weights = [], []
    for lo, hi in zip(edges, edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        nodes.append(mid + half * x)
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def perron_integrals(
    s: int,
    p: int,
    delta_rel: float = 1e-3,
    powers=(0,),
    n_panels: int = 40,
    n_nodes: int = 12,
    tol: float = 1e-10,
):
    """Integrals int t^n varrho_p(t) dt over [delta, T - delta], T = 1/zc^2.

    Substituting t = T/xi turns them into (1/pi) int (T/xi)^n Im G(xi+i0)
    dxi/xi over xi in [1/(1-delta_rel), 1/delta_rel]; one transport with
    dense output supplies all the nodes.
    """
    if not 0 < delta_rel < 0.5:
        raise DomainError("delta_rel must lie in (0, 0.5)")
    zc2 = float(thresholds(s).zeta_c) ** 2
    tmax = 1.0 / zc2
    xi_a = 1.0 / (1.0 - delta_rel)
    xi_b = 1.0 / delta_rel
    nodes, weights = _gauss_legendre_panels(xi_a, xi_b, n_panels, n_nodes)
    order = np.argsort(nodes)
    states = cut_trace(s, p, nodes[order], side="above", tol=tol)
    im_g = np.empty_like(nodes)
    for idx, st in zip(order, states):
        im_g[idx] = st.value.imag
    out = {}
    for n in powers:
        integrand = (tmax / nodes) ** n * im_g / nodes
        out[n] = float(np.sum(weights * integrand) / math.pi)
    return out


def perron_endpoint_exponent(
    s: int, p: int, eps_lo: float = 2e-3, eps_hi: float = 2e-2, n_pts: int = 8
):
    """Log-log slope of varrho_p(t) against (T - t) near the right endpoint
    (the density vanishes quadratically there)."""
    zc2 = float(thresholds(s).zeta_c) ** 2
    tmax = 1.0 / zc2
    eps = np.geomspace(eps_lo, eps_hi, n_pts)
    xi = 1.0 / (1.0 - eps)  # t = T/xi = T (1 - eps)
    states = cut_trace(s, p, xi, side="above")
    ts = tmax / xi
    rho = np.array([st.value.imag for st in states]) / (math.pi * ts)
    slope = np.polyfit(np.log(tmax - ts), np.log(np.abs(rho)), 1)[0]
    return float(slope)
