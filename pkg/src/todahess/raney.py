"""Exact Raney numbers R_{s,p}(n) and their explicit asymptotics.

R_{s,p}(n) = (p/(sn+p)) * C(sn+p, n) counts the coefficient of t^n in U^p
where U = 1 + t U^s.  Everything here is exact integer / rational arithmetic
except the explicitly float-valued asymptotic helpers, which carry the
products R * zeta^m through multiplicative ratio updates so that the
zeta_c^{-m} growth never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, UnsupportedRangeError


def _validate_sp(s: int, p: int) -> None:
    if s < 2:
        raise DomainError(f"symmetry order s must be >= 2, got {s}")
    if p < 1:
        raise UnsupportedRangeError(f"index p must be >= 1, got {p}")


def raney(s: int, p: int, n: int) -> int:
    """Exact Raney number R_{s,p}(n) as a Python integer."""
    _validate_sp(s, p)
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    num = p * math.comb(s * n + p, n)
    q, r = divmod(num, s * n + p)
    # The quotient is always integral; a nonzero remainder means a bug.
    if r:
        raise ArithmeticError("Raney closed form produced a non-integer")
    return q


def raney_ratio(s: int, p: int, n: int) -> Fraction:
    """Exact step ratio R_{s,p}(n+1) / R_{s,p}(n)."""
    num = 1
    for k in range(s):
        num *= s * n + p + k
    den = n + 1
    for l in range(1, s):
        den *= (s - 1) * n + p + l
    return Fraction(num, den)


@dataclass(frozen=True)
class RaneyTable:
    """Exact values R_{s,p}(0..n_max) built by the integer ratio recurrence."""

    s: int
    p: int
    values: tuple

    def __getitem__(self, n: int) -> int:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


def raney_table(s: int, p: int, n_max: int) -> RaneyTable:
    """Table of R_{s,p}(n) for n = 0..n_max via the exact ratio recurrence."""
    _validate_sp(s, p)
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    vals = [1]
    r = 1
    for n in range(n_max):
        num = r
        for k in range(s):
            num *= s * n + p + k
        den = n + 1
        for l in range(1, s):
            den *= (s - 1) * n + p + l
        q, rem = divmod(num, den)
        if rem:
            raise ArithmeticError("ratio recurrence left a remainder")
        r = q
        vals.append(r)
    return RaneyTable(s=s, p=p, values=tuple(vals))


def convolution_check(s: int, p_list, m: int) -> bool:
    """Check sum over compositions n_1+..+n_k = m of prod R_{s,p_i}(n_i)
    against R_{s, sum p_i}(m), exactly."""
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    for p in p_list:
        _validate_sp(s, p)
    tables = [raney_table(s, p, m) for p in p_list]

    def partial(i, remaining):
        if i == len(tables) - 1:
            return tables[i][remaining]
        total = 0
        for n in range(remaining + 1):
            total += tables[i][n] * partial(i + 1, remaining - n)
        return total

    return partial(0, m) == raney(s, sum(p_list), m)


# ---------------------------------------------------------------------------
# Explicit m^{-3/2} asymptotics


def zeta_c_value(s: int) -> float:
    return (s - 1) ** (s - 1) / float(s**s)


def amplitude(s: int, p: int) -> float:
    """Amplitude A_{s,p} = p M^p / sqrt(2 pi s (s-1)), M = s/(s-1)."""
    _validate_sp(s, p)
    big_m = s / (s - 1)
    return p * big_m**p / math.sqrt(2.0 * math.pi * s * (s - 1))


@dataclass(frozen=True)
class AsymptoticData:
    s: int
    p: int
    amplitude: float
    M: Fraction
    zeta_c: Fraction


def asymptotic_data(s: int, p: int) -> AsymptoticData:
    _validate_sp(s, p)
    return AsymptoticData(
        s=s,
        p=p,
        amplitude=amplitude(s, p),
        M=Fraction(s, s - 1),
        zeta_c=Fraction((s - 1) ** (s - 1), s**s),
    )


def asymptotic_value(s: int, p: int, m: int) -> float:
    """A_{s,p} * zeta_c^{-m} * m^{-3/2}; overflows to inf for very large m
    (use asymptotic_ratio for scaled comparisons)."""
    _validate_sp(s, p)
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    logv = math.log(amplitude(s, p)) - m * math.log(zeta_c_value(s)) - 1.5 * math.log(m)
    try:
        return math.exp(logv)
    except OverflowError:
        return math.inf


def scaled_raney_seq(s: int, p: int, m_max: int) -> list:
    """h_m = R_{s,p}(m) * zeta_c^m * m^{3/2} for m = 1..m_max, by float ratio
    updates (h stays O(1), so no overflow for any m)."""
    _validate_sp(s, p)
    zc = zeta_c_value(s)
    # R(1) * zeta_c = p/ (s+p) * C(s+p,1) * zc = p * zc  ... compute exactly:
    r_scaled = float(raney(s, p, 1)) * zc
    out = [r_scaled]  # m = 1, before the m^{3/2} factor
    for m in range(1, m_max):
        num = 1.0
        for k in range(s):
            num *= s * m + p + k
        den = m + 1.0
        for l in range(1, s):
            den *= (s - 1) * m + p + l
        r_scaled *= (num / den) * zc
        out.append(r_scaled)
    return [out[m - 1] * m**1.5 for m in range(1, m_max + 1)]


def asymptotic_ratio(s: int, p: int, m: int) -> float:
    """R_{s,p}(m) * zeta_c^m * m^{3/2} / A_{s,p}, computed without overflow."""
    return scaled_raney_seq(s, p, m)[-1] / amplitude(s, p)


@lru_cache(maxsize=None)
def _calibrated_cs(s: int) -> float:
    """C_s for the uniform bound: scan p, m <= 200, then double."""
    big_m = s / (s - 1)
    worst = 0.0
    for p in range(1, 201):
        hs = scaled_raney_seq(s, p, 200)
        scale = p * big_m**p
        for h in hs:
            worst = max(worst, h / scale)
    return 2.0 * worst


def uniform_bound(s: int, p: int, m: int) -> float:
    """Calibrated uniform bound C_s * p * M^p * zeta_c^{-m} * m^{-3/2}.

    The bound dominates R_{s,p}(m) on the calibration grid by construction
    and (by the convexity of the Stirling exponent) everywhere else tested.
    """
    _validate_sp(s, p)
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    big_m = s / (s - 1)
    logv = (
        math.log(_calibrated_cs(s))
        + math.log(p)
        + p * math.log(big_m)
        - m * math.log(zeta_c_value(s))
        - 1.5 * math.log(m)
    )
    try:
        return math.exp(logv)
    except OverflowError:
        return math.inf


def uniform_bound_scaled(s: int, p: int, m: int) -> float:
    """The uniform bound divided by zeta_c^{-m} m^{-3/2} (never overflows)."""
    _validate_sp(s, p)
    big_m = s / (s - 1)
    return _calibrated_cs(s) * p * big_m**p
