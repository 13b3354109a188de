"""Analytic continuation of the squared-Raney generating functions.

G_p(u) = sum_m R_{s,p}(m)^2 u^m converges for |u| < zeta_c^2 and extends to
the slit plane C \\ [zeta_c^2, inf).  The coefficient ratio is rational in m,
so G_p is a generalized hypergeometric function; after cancelling common
upper/lower parameters the reduced equation has order q_p + 1 and its only
finite singular points are xi = 0, 1 in xi = u / zeta_c^2.  Continuation is
performed by integrating that reduced equation in theta-form as a companion
first-order system along piecewise-linear paths that detour around xi = 1.

The scalar Gram weights are recovered by the Euler operator
sigma = (1/p) (p + s u d/du)^2 G_p, and the branch-cut jump of sigma gives
the discontinuity density with positive edge value (p/2pi) (s/(s-1))^{2p+1}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    AccuracyError,
    ConditioningError,
    DomainError,
    DivergenceError,
    PathError,
    StiffnessError,
)
from .maps import thresholds
from .raney import _validate_sp

#: default exclusion radius around xi = 1 (relative to zeta_c^2 units)
EXCLUSION_RADIUS = 1e-4
#: default imaginary offset of the detour rectangle
DETOUR_OFFSET = 0.3
#: seed point of all transports
XI_SEED = 0.5


# ---------------------------------------------------------------------------
# Hypergeometric parameter data


@dataclass(frozen=True)
class HypParams:
    s: int
    p: int
    upper: tuple  # Fractions, with multiplicity
    lower: tuple
    reduced_upper: tuple
    reduced_lower: tuple
    excess: Fraction
    cancelled: int


def hyp_params(s: int, p: int) -> HypParams:
    """Exact parameter multisets of G_p and their reduction.

    upper = {(p+k)/s : k < s} twice; lower = {1} + {(p+l)/(s-1) : 1<=l<s}
    twice.  The parametric excess (sum lower - sum upper) equals 2 for every
    (s, p); cancellation preserves it.
    """
    _validate_sp(s, p)
    upper = sorted(Fraction(p + k, s) for k in range(s)) * 2
    lower = [Fraction(1)] + sorted(Fraction(p + l, s - 1) for l in range(1, s)) * 2
    upper.sort()
    lower.sort()

    red_up = list(upper)
    red_lo = []
    for b in lower:
        if b in red_up:
            red_up.remove(b)
        else:
            red_lo.append(b)
    cancelled = len(lower) - len(red_lo)
    excess = sum(lower) - sum(upper)
    return HypParams(
        s=s,
        p=p,
        upper=tuple(upper),
        lower=tuple(lower),
        reduced_upper=tuple(red_up),
        reduced_lower=tuple(sorted(red_lo)),
        excess=excess,
        cancelled=cancelled,
    )


def _coeff_ratio_exact(s: int, p: int, m: int) -> Fraction:
    """a_{m+1}/a_m for a_m = R_{s,p}(m)^2 zeta_c^{2m} (exact)."""
    num = 1
    for k in range(s):
        num *= s * m + p + k
    den = m + 1
    for l in range(1, s):
        den *= (s - 1) * m + p + l
    return Fraction(num**2 * (s - 1) ** (2 * s - 2), den**2 * s ** (2 * s))


def gp_series(s: int, p: int, u: complex, tol: float = 1e-14):
    """G_p(u) by direct summation; only inside |u| <= 0.98 zeta_c^2."""
    _validate_sp(s, p)
    zc2 = float(thresholds(s).zeta_c) ** 2
    if abs(u) > 0.98 * zc2:
        raise DivergenceError(
            f"|u| = {abs(u):.3g} beyond 0.98 * zeta_c^2 = {0.98*zc2:.3g}; "
            "use gp_continue for the slit-plane continuation"
        )
    xi = complex(u) / zc2
    term = 1.0 + 0.0j
    acc = term
    r_geo = abs(xi)
    m = 0
    while True:
        num = 1.0
        for k in range(s):
            num *= s * m + p + k
        den = m + 1.0
        for l in range(1, s):
            den *= (s - 1) * m + p + l
        ratio = (num / den) ** 2 * (s - 1.0) ** (2 * s - 2) / float(s) ** (2 * s)
        term *= ratio * xi
        acc += term
        m += 1
        if m >= 4 and abs(term) * r_geo / (1.0 - r_geo + 1e-300) <= tol * max(
            abs(acc), 1e-300
        ):
            break
        if m > 200000:
            raise DivergenceError("gp_series failed to reach tolerance")
    return acc.real if complex(u).imag == 0.0 else acc


# ---------------------------------------------------------------------------
# Reduced ODE in theta form and its companion system


def _stirling2(n: int):
    """Table S(k, j), 0 <= j <= k <= n, Stirling numbers of the second kind."""
    tab = [[0] * (n + 1) for _ in range(n + 1)]
    tab[0][0] = 1
    for k in range(1, n + 1):
        for j in range(1, k + 1):
            tab[k][j] = j * tab[k - 1][j] + tab[k - 1][j - 1]
    return tab


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


class _OdeData(NamedTuple):
    d: int  # order of the reduced equation
    c: np.ndarray  # c_j = sum_k p_k S(k, j)   (theta-poly of the lower data)
    e: np.ndarray  # e_j = sum_k r_k S(k, j)   (theta-poly of the upper data)


@lru_cache(maxsize=None)
def _ode_data(s: int, p: int) -> _OdeData:
    """Companion coefficients of the reduced equation.

    The reduced operator is theta * prod_b (theta + b - 1) - xi *
    prod_a (theta + a); converting theta^k = sum_j S(k,j) xi^j D^j gives
    sum_j xi^j (c_j - xi e_j) y^(j) = 0 with c_d = e_d = 1, so

        y^(d) = - sum_{j<d} xi^j (c_j - xi e_j) y^(j) / (xi^d (1 - xi)).
    """
    hp = hyp_params(s, p)
    a_list = hp.reduced_upper
    b_list = hp.reduced_lower
    d = len(a_list)
    if len(b_list) != d - 1:
        raise ArithmeticError("reduced parameter lists are unbalanced")

    p_poly = [Fraction(0), Fraction(1)]  # theta
    for b in b_list:
        p_poly = _poly_mul(p_poly, [b - 1, Fraction(1)])
    r_poly = [Fraction(1)]
    for a in a_list:
        r_poly = _poly_mul(r_poly, [a, Fraction(1)])
    s2 = _stirling2(d)
    c = np.zeros(d + 1)
    e = np.zeros(d + 1)
    for j in range(d + 1):
        cj = sum(p_poly[k] * s2[k][j] for k in range(j, d + 1))
        ej = sum(r_poly[k] * s2[k][j] for k in range(j, d + 1))
        c[j] = float(cj)
        e[j] = float(ej)
    if c[d] != 1.0 or e[d] != 1.0:
        raise ArithmeticError("theta polynomials are not monic")
    return _OdeData(d=d, c=c, e=e)


def _seed_state(s: int, p: int, d: int) -> np.ndarray:
    """(y, y', ..., y^(d-1)) at xi = XI_SEED from the differentiated series."""
    xi0 = XI_SEED
    y = np.zeros(d, dtype=np.complex128)
    a_m = 1.0  # a_m * xi0^m carried jointly
    t = 1.0
    m = 0
    while True:
        ff = 1.0
        contrib = 0.0
        for j in range(d):
            # term of y^(j): a_m m!/(m-j)! xi0^(m-j)
            if m >= j:
                val = t * ff / xi0**j
                y[j] += val
                contrib = max(contrib, abs(val))
            ff *= m - j
        m += 1
        num = 1.0
        for k in range(s):
            num *= s * (m - 1) + p + k
        den = m
        for l in range(1, s):
            den *= (s - 1) * (m - 1) + p + l
        t *= (num / den) ** 2 * (s - 1.0) ** (2 * s - 2) / float(s) ** (2 * s) * xi0
        if m > 8 * d and contrib < 1e-19 * max(abs(y[0]), 1.0):
            break
        if m > 5000:
            raise AccuracyError("seed series did not converge")
    return y


def _rhs_factory(data: _OdeData):
    d, c, e = data.d, data.c, data.e

    def rhs(xi: complex, z: np.ndarray) -> np.ndarray:
        acc = 0.0 + 0.0j
        xp = 1.0 + 0.0j
        for j in range(d):
            acc += xp * (c[j] - xi * e[j]) * z[j]
            xp *= xi
        top = -acc / (xp * (1.0 - xi))
        out = np.empty(d, dtype=np.complex128)
        out[:-1] = z[1:]
        out[-1] = top
        return out

    return rhs


def _transport_segment(data: _OdeData, z0, xi_a: complex, xi_b: complex, tol: float):
    if xi_a == xi_b:
        return z0
    rhs = _rhs_factory(data)
    span = xi_b - xi_a

    def f(tau, z):
        return span * rhs(xi_a + span * tau, z)

    atol = np.maximum(np.abs(z0), 1.0) * tol * 1e-2
    sol = solve_ivp(
        f,
        (0.0, 1.0),
        np.asarray(z0, dtype=np.complex128),
        method="DOP853",
        rtol=max(tol, 1e-13),
        atol=atol,
    )
    if not sol.success:
        raise StiffnessError(
            f"ODE transport failed on segment {xi_a} -> {xi_b}: {sol.message}"
        )
    return sol.y[:, -1]


def _waypoints(xi_t: complex, side: str, h: float):
    xi0 = complex(XI_SEED)
    re, im = xi_t.real, xi_t.imag
    if side == "none":
        if im == 0.0 and re >= 1.0:
            raise PathError("target on the cut: pass side='above' or side='below'")
        if im == 0.0 and 0.02 <= re <= 0.98:
            return [xi0, xi_t]
        sigma = 1.0 if im >= 0 else -1.0
    elif side in ("above", "below"):
        sigma = 1.0 if side == "above" else -1.0
        if im != 0.0 and math.copysign(1.0, im) != sigma:
            raise PathError(f"target {xi_t} is on the opposite side of the cut")
    else:
        raise DomainError(f"side must be 'above', 'below' or 'none', got {side!r}")
    pts = [xi0, complex(XI_SEED, sigma * h), complex(re, sigma * h), xi_t]
    out = [pts[0]]
    for pt in pts[1:]:
        if pt != out[-1]:
            out.append(pt)
    return out


@dataclass(frozen=True)
class ContinuationState:
    """Value and u-derivatives of G_p at the endpoint of a transport path."""

    s: int
    p: int
    u: complex
    side: str
    derivs: tuple  # (G, G', G'', ...) with respect to u
    path: tuple  # xi-plane waypoints actually used

    @property
    def value(self) -> complex:
        return self.derivs[0]


def transport(s: int, p: int, waypoints, tol: float = 1e-12) -> np.ndarray:
    """Low-level: carry the solution vector along explicit xi waypoints.

    The first waypoint must be XI_SEED.  Returns the xi-derivative vector
    (y, y', ..., y^{d-1}) at the final waypoint.
    """
    data = _ode_data(s, p)
    if complex(waypoints[0]) != complex(XI_SEED):
        raise PathError(f"paths must start at the seed point xi = {XI_SEED}")
    z = _seed_state(s, p, data.d)
    for a, b in zip(waypoints, waypoints[1:]):
        z = _transport_segment(data, z, complex(a), complex(b), tol)
    return z


def gp_continue(
    s: int,
    p: int,
    u: complex,
    side: str = "none",
    tol: float = 1e-12,
    detour: float = DETOUR_OFFSET,
    exclusion: float = EXCLUSION_RADIUS,
) -> ContinuationState:
    """Continue G_p to u on the slit plane along a detour path.

    side selects the lateral boundary value for u on the cut [zeta_c^2, inf);
    'none' is for targets off the cut.  Inside the exclusion disk around
    zeta_c^2 the ODE is too stiff and the value is reported from the fitted
    resonant local model instead.
    """
    _validate_sp(s, p)
    side = side or "none"
    zc2 = float(thresholds(s).zeta_c) ** 2
    uc = complex(u)
    if uc == 0:
        raise PathError("u = 0 is a singular point of the transport ODE; "
                        "gp_series covers the disk")
    xi_t = uc / zc2
    if abs(xi_t - 1.0) < exclusion:
        return _local_model_state(s, p, uc, side)
    pts = _waypoints(xi_t, side, detour)
    z = transport(s, p, pts, tol)
    derivs = tuple(z[j] / zc2**j for j in range(len(z)))
    return ContinuationState(
        s=s, p=p, u=uc, side=side, derivs=derivs, path=tuple(pts)
    )


def sigma_cont(
    s: int, p: int, u: complex, side: str = "none", tol: float = 1e-12
) -> complex:
    """Continued scalar Gram weight
    (1/p) [p^2 G + s(2p+s) u G' + s^2 u^2 G''] at u."""
    st = gp_continue(s, p, u, side, tol)
    return sigma_from_state(st)


def sigma_from_state(st: ContinuationState) -> complex:
    g, g1, g2 = st.derivs[0], st.derivs[1], st.derivs[2]
    s, p, u = st.s, st.p, st.u
    return (p * p * g + s * (2 * p + s) * u * g1 + s * s * u * u * g2) / p


# ---------------------------------------------------------------------------
# Resonant expansion at the branch point


class BranchCoefficient(NamedTuple):
    """B(zeta_c^2) = rational / pi (pi_power = -1); always negative."""

    rational: Fraction
    pi_power: int

    @property
    def value(self) -> float:
        return float(self.rational) * math.pi**self.pi_power


def B_closed_form(s: int, p: int) -> BranchCoefficient:
    """B(zeta_c^2) = -(p^2/4pi) s^{2p-1}/(s-1)^{2p+1}."""
    _validate_sp(s, p)
    return BranchCoefficient(
        rational=Fraction(-(p**2) * s ** (2 * p - 1), 4 * (s - 1) ** (2 * p + 1)),
        pi_power=-1,
    )


def edge_density_closed(s: int, p: int) -> float:
    """rho_p(zeta_c^2) = (p/2pi) (s/(s-1))^{2p+1} = -(2s^2/p) B(zeta_c^2)."""
    _validate_sp(s, p)
    return p / (2.0 * math.pi) * (s / (s - 1.0)) ** (2 * p + 1)


def _gp_xi_mp(s: int, p: int, xi, tail: float = None):
    """G_p at real xi in (0, 1) summed in the current mpmath precision."""
    xi = mp.mpf(xi)
    tail_tol = tail if tail is not None else mp.mpf(10) ** (-(mp.mp.dps + 6))
    term = mp.mpf(1)
    acc = mp.mpf(1)
    m = 0
    while True:
        num = 1
        for k in range(s):
            num *= s * m + p + k
        den = m + 1
        for l in range(1, s):
            den *= (s - 1) * m + p + l
        term = term * (num * num * (s - 1) ** (2 * s - 2)) * xi
        term = term / (den * den * s ** (2 * s))
        acc += term
        m += 1
        if m >= 8 and term * xi / (1 - xi) < tail_tol * acc:
            return acc
        if m > 5_000_000:
            raise DivergenceError("extended-precision series exceeded term budget")


@dataclass(frozen=True)
class ResonantCoefficients:
    """Local model G = a0 + a1 w + a2 w^2 + a3 w^3 + (b2 + b3 w) w^2 log w."""

    s: int
    p: int
    B_at_branch: float
    A_fit: float
    B_fit: float
    coeffs: tuple  # (a0, a1, a2, a3, b2, b3)
    max_rel_residual: float


def resonant_fit(
    s: int, p: int, eps_grid=None, dps: int = 40
) -> ResonantCoefficients:
    """Fit the resonant local model to extended-precision series values.

    w = 1 - u/zeta_c^2 runs over eps_grid (default: 24 log-spaced points in
    [1.5e-3, 6e-2]).  The w^3 and w^3 log w columns absorb the next-order
    analytic background so the w^2 log w coefficient lands within a few
    percent of the closed form.
    """
    _validate_sp(s, p)
    if eps_grid is None:
        eps_grid = np.geomspace(1.5e-3, 6e-2, 24)
    eps_grid = sorted(float(e) for e in eps_grid)
    if not 1e-4 < eps_grid[0] and eps_grid[-1] < 1e-1:
        raise DomainError("eps_grid must lie inside (1e-4, 1e-1)")
    if eps_grid[-1] / eps_grid[0] < 4.0:
        raise ConditioningError("eps_grid spans less than a factor 4; fit is "
                                "too ill-conditioned to separate w^2 log w")
    with mp.workdps(dps):
        rows = []
        rhs = []
        for eps in eps_grid:
            w = mp.mpf(eps)
            lw = mp.log(w)
            rows.append([mp.mpf(1), w, w**2, w**3, w**2 * lw, w**3 * lw])
            rhs.append(_gp_xi_mp(s, p, 1 - w))
        amat = mp.matrix(rows)
        bvec = mp.matrix(rhs)
        ata = amat.T * amat
        atb = amat.T * bvec
        try:
            coef = mp.lu_solve(ata, atb)
        except ZeroDivisionError as exc:
            raise ConditioningError("normal equations singular") from exc
        resid = amat * coef - bvec
        rel = max(abs(resid[i]) / abs(bvec[i]) for i in range(len(rhs)))
        coeffs = tuple(float(coef[i]) for i in range(6))
    return ResonantCoefficients(
        s=s,
        p=p,
        B_at_branch=B_closed_form(s, p).value,
        A_fit=coeffs[0],
        B_fit=coeffs[4],
        coeffs=coeffs,
        max_rel_residual=float(rel),
    )


@lru_cache(maxsize=None)
def _cached_fit(s: int, p: int) -> ResonantCoefficients:
    return resonant_fit(s, p)


def _local_model_state(s: int, p: int, u: complex, side: str) -> ContinuationState:
    """G and two u-derivatives from the resonant model inside the exclusion
    disk around the branch point."""
    fit = _cached_fit(s, p)
    a0, a1, a2, a3, b2, b3 = fit.coeffs
    zc2 = float(thresholds(s).zeta_c) ** 2
    w = 1.0 - complex(u) / zc2
    if w.real < 0 and w.imag == 0.0:
        if side == "above":
            lw = complex(math.log(abs(w)), -math.pi)
        elif side == "below":
            lw = complex(math.log(abs(w)), math.pi)
        else:
            raise PathError("on-cut local model needs side='above' or 'below'")
    else:
        lw = cmath.log(w)
    g = a0 + a1 * w + a2 * w**2 + a3 * w**3 + (b2 + b3 * w) * w**2 * lw
    dg_dw = (
        a1
        + 2 * a2 * w
        + 3 * a3 * w**2
        + 2 * b2 * w * lw
        + b2 * w
        + 3 * b3 * w**2 * lw
        + b3 * w**2
    )
    d2g_dw2 = (
        2 * a2
        + 6 * a3 * w
        + 2 * b2 * lw
        + 3 * b2
        + 6 * b3 * w * lw
        + 5 * b3 * w
    )
    du = -1.0 / zc2  # dw/du
    derivs = (g, dg_dw * du, d2g_dw2 * du * du)
    return ContinuationState(
        s=s, p=p, u=complex(u), side=side, derivs=derivs, path=("local-model",)
    )


# ---------------------------------------------------------------------------
# Discontinuity density across the cut


def disc_density_rho(s: int, p: int, u: float, tol: float = 1e-6) -> float:
    """rho_p(u) from the two lateral transports of the continued weight.

    Orientation follows the edge-positive convention: rho(zeta_c^2) =
    (p/2pi)(s/(s-1))^{2p+1} > 0.  The imaginary residue (a Schwarz-symmetry
    check, since both sides are computed independently) must stay below tol.
    """
    zc2 = float(thresholds(s).zeta_c) ** 2
    if not u > zc2 * (1.0 + 1e-4):
        raise DomainError(
            f"u must exceed zeta_c^2 (1 + 1e-4) = {zc2 * (1 + 1e-4):.6g}"
        )
    sa = sigma_cont(s, p, u, "above")
    sb = sigma_cont(s, p, u, "below")
    val = (sa - sb) / (2.0j * math.pi)
    if abs(val.imag) > tol * max(1.0, abs(val.real)):
        raise AccuracyError(
            f"imaginary residue {val.imag:.2e} of rho exceeds tol = {tol:.1e}"
        )
    return val.real


def cut_trace(s, p, xi_nodes, side: str = "above", tol: float = 1e-12):
    """States along the cut at the given xi nodes (all > 1), one transport.

    Transports to the smallest node via the detour, then integrates along the
    real axis with dense output.  Returns a list of ContinuationState.
    """
    nodes = sorted(float(x) for x in xi_nodes)
    if nodes[0] < 1.0 + EXCLUSION_RADIUS:
        raise DomainError(
            f"cut_trace nodes must satisfy xi >= 1 + {EXCLUSION_RADIUS:g} "
            "(the ODE is too stiff inside the branch-point exclusion disk)"
        )
    data = _ode_data(s, p)
    zc2 = float(thresholds(s).zeta_c) ** 2
    pts = _waypoints(complex(nodes[0]), side, DETOUR_OFFSET)
    z = transport(s, p, pts, tol)
    states = []

    def mkstate(xi, zvec):
        derivs = tuple(zvec[j] / zc2**j for j in range(len(zvec)))
        return ContinuationState(
            s=s, p=p, u=xi * zc2, side=side, derivs=derivs, path=(xi,)
        )

    states.append(mkstate(nodes[0], z))
    if len(nodes) > 1:
        rhs = _rhs_factory(data)
        atol = np.maximum(np.abs(z), 1.0) * tol * 1e-2
        sol = solve_ivp(
            rhs,
            (nodes[0], nodes[-1]),
            z,
            method="DOP853",
            rtol=max(tol, 1e-13),
            atol=atol,
            t_eval=np.asarray(nodes[1:]),
        )
        if not sol.success:
            raise StiffnessError(f"cut trace failed: {sol.message}")
        for i, xi in enumerate(nodes[1:]):
            states.append(mkstate(xi, sol.y[:, i]))
    return states
