import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from todahess import raney
from todahess.errors import DomainError, UnsupportedRangeError


def u_series(s, n_max):
    """Oracle: exact coefficients of U = 1 + t U^s by fixed-point iteration
    on truncated integer polynomials (independent of the closed form)."""
    u = [1] + [0] * n_max
    for _ in range(n_max + 1):
        power = [1] + [0] * n_max
        for _ in range(s):
            new = [0] * (n_max + 1)
            for i, ai in enumerate(power):
                if ai:
                    for j in range(n_max + 1 - i):
                        if u[j]:
                            new[i + j] += ai * u[j]
            power = new
        u = [1] + power[:n_max]
    return u


def poly_pow(coeffs, p, n_max):
    out = [1] + [0] * n_max
    for _ in range(p):
        new = [0] * (n_max + 1)
        for i, ai in enumerate(out):
            if ai:
                for j in range(n_max + 1 - i):
                    if coeffs[j]:
                        new[i + j] += ai * coeffs[j]
        out = new
    return out


def test_catalan_row():
    assert [raney.raney(2, 1, n) for n in range(6)] == [1, 1, 2, 5, 14, 42]


def test_fuss_catalan_row():
    assert raney.raney_table(3, 1, 3).values == (1, 1, 3, 12)


def test_small_values():
    assert raney.raney(3, 2, 2) == 7  # (2/8) C(8,2)
    assert raney.raney(2, 3, 1) == 3  # (3/5) C(5,1)


def test_r0_is_one():
    for s in (2, 4, 7):
        for p in (1, 3, 9):
            assert raney.raney(s, p, 0) == 1


def test_errors():
    with pytest.raises(UnsupportedRangeError):
        raney.raney(2, 0, 3)
    with pytest.raises(UnsupportedRangeError):
        raney.raney(2, -2, 3)
    with pytest.raises(DomainError):
        raney.raney(1, 1, 3)
    with pytest.raises(DomainError):
        raney.raney(2, 1, -1)


def test_table_matches_closed_form():
    for s in (2, 3, 5):
        for p in (1, 2, 7):
            tbl = raney.raney_table(s, p, 40)
            for n in (0, 1, 5, 17, 40):
                assert tbl[n] == raney.raney(s, p, n)


def test_functional_equation_polynomial_identity():
    # U_N - 1 - t U_N^s = O(t^{N+1}) as an exact polynomial identity, N = 25
    n_max = 25
    for s in (2, 3, 4):
        u = u_series(s, n_max)
        tbl = raney.raney_table(s, 1, n_max)
        assert list(tbl.values) == u
        power = poly_pow(u, s, n_max)
        # coefficient of t^{n+1} in t*U^s must equal coefficient n+1 of U
        for n in range(n_max):
            assert u[n + 1] == power[n]


def test_power_identity():
    # coefficients of U^p equal R_{s,p}(n) for n <= N - p (exact)
    n_max = 25
    for s in (2, 3):
        u = u_series(s, n_max)
        for p in (2, 3, 5):
            upow = poly_pow(u, p, n_max)
            tbl = raney.raney_table(s, p, n_max - p)
            for n in range(n_max - p + 1):
                assert upow[n] == tbl[n]


@given(st.integers(2, 6), st.integers(1, 12), st.integers(0, 60))
@settings(max_examples=60, deadline=None)
def test_integrality_property(s, p, n):
    val = raney.raney(s, p, n)
    assert isinstance(val, int) and val >= 1
    # closed form as exact rational is integral
    assert Fraction(p * math.comb(s * n + p, n), s * n + p).denominator == 1


def test_convolution_examples():
    assert raney.convolution_check(2, [1, 1], 2)
    assert raney.convolution_check(3, [1, 2], 1)
    assert raney.convolution_check(4, [3], 9)  # single factor trivial


@given(
    st.integers(2, 5),
    st.lists(st.integers(1, 4), min_size=1, max_size=3),
    st.integers(0, 8),
)
@settings(max_examples=40, deadline=None)
def test_convolution_property(s, plist, m):
    assert raney.convolution_check(s, plist, m)


def test_amplitude_values():
    assert abs(raney.amplitude(2, 1) - 1 / math.sqrt(math.pi)) < 1e-15
    # A_{3,2} = 2 (3/2)^2 / sqrt(12 pi)
    assert abs(raney.amplitude(3, 2) - 4.5 / math.sqrt(12 * math.pi)) < 1e-15


def test_asymptotic_data_fields():
    data = raney.asymptotic_data(3, 2)
    assert data.M == Fraction(3, 2)
    assert data.zeta_c == Fraction(4, 27)
    assert abs(data.amplitude - raney.amplitude(3, 2)) == 0.0


def test_asymptotic_ratio_trend():
    # R / asymptotic -> 1 with O(1/m) error (contract: within 5/m)
    r100 = raney.asymptotic_ratio(2, 1, 100)
    assert abs(r100 - 1.0) < 5.0 / 100
    r1000 = raney.asymptotic_ratio(2, 1, 1000)
    assert abs(r1000 - 1.0) < abs(r100 - 1.0)


def test_asymptotic_value_small_m():
    v = raney.asymptotic_value(2, 1, 100)
    assert abs(raney.raney(2, 1, 100) / v - 1.0) < 2e-2


def test_asymptotic_tolerance_band():
    for s in (2, 3, 5):
        for p in (1, 2, s):
            amp = raney.amplitude(s, p)
            seq = raney.scaled_raney_seq(s, p, 500)
            for m in (50, 120, 500):
                assert abs(seq[m - 1] / amp - 1.0) <= 5.0 / m


def test_uniform_bound_dominates():
    for s in (2, 3):
        for p in (1, 4, 60):
            for m in (1, 7, 150):
                scaled = raney.scaled_raney_seq(s, p, m)[-1]
                assert scaled <= raney.uniform_bound_scaled(s, p, m)


def test_uniform_bound_small_case():
    assert raney.uniform_bound(2, 1, 1) >= 1.0  # R_{2,1}(1) = 1


def test_uniform_bound_scaling_constant():
    # bound(s,p,m) * zeta_c^m m^{3/2} / (p M^p) is constant in (p, m)
    vals = set()
    for p in (1, 3, 8):
        for m in (2, 9, 33):
            big_m = 2.0
            v = raney.uniform_bound_scaled(2, p, m) / (p * big_m**p)
            vals.add(round(v, 12))
    assert len(vals) == 1


def test_uniform_one_term_expansion_fixed_p():
    # one-term expansion: m |eps| stays bounded for each fixed p, with the
    # bound growing like p^2/(2 s (s-1)) (the exp(-p^2/(2s(s-1)m)) factor)
    for s in (2, 3):
        for p in (1, 4, 12):
            cap = 4.0 + 0.75 * p * p / (s * (s - 1))
            for m in (50, 200, 1000, 2000):
                dev = abs(raney.asymptotic_ratio(s, p, m) - 1.0) * m
                assert dev < cap


def test_uniform_expansion_breaks_at_theta_half():
    # counterexample to the theta-uniform |eps| <= C/m claim: at p = m/2 the
    # suppression exp(-p^2/(2s(s-1)m)) drives the ratio to 0, so eps -> -1
    # (see the decisions ledger)
    assert raney.asymptotic_ratio(2, 1000, 2000) < 1e-20
    assert raney.asymptotic_ratio(2, 25, 50) < 0.1
