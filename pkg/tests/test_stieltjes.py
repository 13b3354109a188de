import math
from fractions import Fraction

import numpy as np
import pytest

from todahess import continuation as cont
from todahess import stieltjes as st
from todahess.errors import ConditioningError, DomainError, PositivityError
from todahess.maps import thresholds

ZC2_2 = float(thresholds(2).zeta_c) ** 2


def test_moments_examples():
    ms = st.moments(2, 1, 4)
    assert ms.moments[:4] == (
        Fraction(1), Fraction(1, 16), Fraction(1, 64), Fraction(25, 4096))
    assert st.moments(3, 1, 1).moments[1] == Fraction(16, 729)
    assert ms.unscaled(2) == 4  # R_{2,1}(2)^2


def test_moments_hausdorff_bound():
    # rescaled moments of a measure on [0,1]: 0 < m_n <= 1s
    for s, p in ((2, 1), (3, 2), (5, 5)):
        ms = st.moments(s, p, 20)
        assert all(0 < m <= 1 for m in ms.moments)
        # and nonincreasing (t^n >= t^{n+1} on [0,1])
        assert all(a >= b for a, b in zip(ms.moments, ms.moments[1:]))


def test_hankel_positivity_in_range():
    assert st.hankel_positivity(st.moments(2, 1, 16), 6)
    for s in (2, 3):
        for p in range(1, s + 1):
            assert st.hankel_positivity(st.moments(s, p, 12), 5)


def test_hankel_positivity_outside_range_recorded():
    # p > s: the paper is silent; we compute and record, no assertion on sign
    result = st.hankel_positivity(st.moments(2, 5, 16), 6)
    assert result in (True, False)


def test_hankel_needs_enough_moments():
    with pytest.raises(DomainError):
        st.hankel_positivity(st.moments(2, 1, 5), 4)


def test_jacobi_first_coefficients():
    jac = st.jacobi_coefficients(st.moments(2, 1, 10), 3)
    assert jac.b_exact[0] == Fraction(1, 16)
    assert jac.a_sq_exact[0] == Fraction(3, 256)  # m2 - m1^2
    assert jac.precision == "exact"


def test_jacobi_spectrum_containment():
    for s, p in ((2, 1), (3, 2), (5, 3)):
        tmax = 1.0 / float(thresholds(s).zeta_c) ** 2
        jac = st.jacobi_coefficients(st.moments(s, p, 25), 12)
        ev = np.linalg.eigvalsh(jac.tridiagonal(rescaled=False))
        assert ev.min() >= -1e-8
        assert ev.max() <= tmax + 1e-8
        # rescaled spectrum sits in [0, 1]
        ev_r = np.linalg.eigvalsh(jac.tridiagonal())
        assert ev_r.min() >= -1e-10 and ev_r.max() <= 1 + 1e-10


def test_jacobi_positivity_error():
    bad = st.MomentSequence(s=2, p=1, moments=(
        Fraction(1), Fraction(2), Fraction(1), Fraction(1), Fraction(1),
        Fraction(1), Fraction(1)))
    with pytest.raises(PositivityError):
        st.jacobi_coefficients(bad, 3)


def test_jacobi_requires_moment_depth():
    with pytest.raises(DomainError):
        st.jacobi_coefficients(st.moments(2, 1, 5), 4)


def test_weyl_at_zero():
    jac = st.jacobi_coefficients(st.moments(2, 1, 20), 8)
    assert st.weyl_function(jac, 0.0) == 1.0


def test_weyl_converges_geometrically():
    # convergence is so fast that the float floor (~1e-14) is hit by n = 6;
    # the geometric regime lives at small depths
    u = 0.3 * ZC2_2
    target = cont.gp_series(2, 1, u)
    ms = st.moments(2, 1, 70)
    errs = []
    for n in (2, 3, 4, 6):
        w = st.weyl_function(st.jacobi_coefficients(ms, n), u)
        errs.append(abs(complex(w) - target))
    assert errs[0] > errs[1] > errs[2] > errs[3]
    assert errs[2] / errs[1] < 0.1  # geometric decay per extra level
    assert errs[3] < 1e-12


def test_weyl_matches_continuation_off_disk():
    jac = st.jacobi_coefficients(st.moments(2, 1, 85), 40)
    w = st.weyl_function(jac, -1.0)
    g = cont.gp_continue(2, 1, -1.0, "none").value
    assert abs(complex(w) - g) < 1e-8


def test_weyl_near_pole_errors():
    jac = st.jacobi_coefficients(st.moments(2, 1, 20), 8)
    ev = np.linalg.eigvalsh(jac.tridiagonal(rescaled=False))
    raised = False
    for bump in (0.0, 1e-13, -1e-13, 1e-12):
        try:
            st.weyl_function(jac, 1.0 / ev[-1] + bump)
        except ConditioningError:
            raised = True
            break
    assert raised


def test_perron_density_positive_interior():
    # one transport along the cut; varrho >= 0 on 50 interior points
    zc2 = float(thresholds(3).zeta_c) ** 2
    tmax = 1.0 / zc2
    for p in (1, 2, 3):
        xi = np.geomspace(1.01, 50.0, 50)
        states = cont.cut_trace(3, p, xi, side="above")
        for x, s_ in zip(np.sort(xi), states):
            rho = s_.value.imag / (math.pi * (tmax / x))
            assert rho >= -1e-9


def test_perron_density_single_points():
    tmax = 1.0 / ZC2_2
    v = st.perron_density(2, 1, 0.5 * tmax)
    assert v >= 0
    with pytest.raises(DomainError):
        st.perron_density(2, 1, tmax * 0.99999)
    with pytest.raises(DomainError):
        st.perron_density(2, 1, -0.1)


def test_perron_mass_and_moments():
    out = st.perron_integrals(2, 1, delta_rel=1e-12, powers=(0, 1, 2),
                              n_panels=120)
    assert abs(out[0] - 1.0) < 0.02
    assert abs(out[1] - 1.0) < 0.02  # R_{2,1}(1)^2 = 1
    assert abs(out[2] - 4.0) < 0.08  # R_{2,1}(2)^2 = 4, 2%


def test_perron_mass_coarse_delta_recorded():
    # at the op example's delta = 1e-3/zeta_c^2 the left tail still holds
    # ~20% of the mass for (2,1); recorded, not asserted against 2%
    out = st.perron_integrals(2, 1, delta_rel=1e-3)
    assert 0.5 < out[0] < 1.0


def test_perron_endpoint_exponent():
    slope = st.perron_endpoint_exponent(2, 1)
    assert abs(slope - 2.0) <= 0.2


def test_quadrature_domain_guards():
    with pytest.raises(DomainError):
        st.perron_integrals(2, 1, delta_rel=0.7)
    with pytest.raises(DomainError):
        cont.cut_trace(2, 1, [1.00001, 2.0])  # inside the exclusion disk


def test_perron_left_exponent_logged():
    # t -> 0 behavior ~ t^{p/s - 1} (log factor not asserted)
    zc2 = float(thresholds(3).zeta_c) ** 2
    tmax = 1.0 / zc2
    xi = np.geomspace(1e3, 1e5, 6)
    states = cont.cut_trace(3, 1, xi, side="above")
    ts = tmax / np.sort(xi)[::-1]
    rho = np.array(
        [s_.value.imag / (math.pi * (tmax / x))
         for x, s_ in zip(np.sort(xi), states)]
    )[::-1]
    slope = np.polyfit(np.log(ts), np.log(rho), 1)[0]
    # exponent p/s - 1 = -2/3 up to the (unasserted) log factor; measured
    # -0.84 on this window, recorded here with a band wide enough for the
    # log correction
    print(f"left-endpoint exponent fit: {slope:.3f} (pure power: -2/3)")
    assert -1.05 < slope < -0.55
