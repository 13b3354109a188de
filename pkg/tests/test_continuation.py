import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from todahess import continuation as cont
from todahess.errors import ConditioningError, DivergenceError, DomainError, PathError
from todahess.gram import sigma_p
from todahess.maps import thresholds

ZC2_2 = float(thresholds(2).zeta_c) ** 2
ZC2_3 = float(thresholds(3).zeta_c) ** 2

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786, 208012]


def test_hyp_params_s2p1():
    hp = cont.hyp_params(2, 1)
    assert hp.upper == (Fraction(1, 2),) * 2 + (Fraction(1),) * 2
    assert hp.lower == (Fraction(1), Fraction(2), Fraction(2))
    assert hp.reduced_upper == (Fraction(1, 2), Fraction(1, 2), Fraction(1))
    assert hp.reduced_lower == (Fraction(2), Fraction(2))
    assert hp.excess == 2 and hp.cancelled == 1


def test_hyp_params_s3p1():
    hp = cont.hyp_params(3, 1)
    assert hp.excess == 2
    assert hp.cancelled == 2
    assert len(hp.reduced_upper) == len(hp.reduced_lower) + 1


@pytest.mark.parametrize("s", range(2, 9))
@pytest.mark.parametrize("p", range(1, 9))
def test_parametric_excess_always_two(s, p):
    assert cont.hyp_params(s, p).excess == 2


def test_coefficient_ratio_identity_exact():
    # the hypergeometric term ratio reproduces R^2 zeta_c^2m exactly, m <= 40
    from todahess.raney import raney_table

    for s, p in ((2, 1), (3, 2), (5, 3)):
        zc2 = Fraction((s - 1) ** (s - 1), s**s) ** 2
        tbl = raney_table(s, p, 41)
        a = [Fraction(tbl[m] ** 2) * zc2**m for m in range(42)]
        hp = cont.hyp_params(s, p)
        for m in range(41):
            ratio = Fraction(1)
            for al in hp.reduced_upper:
                ratio *= m + al
            ratio /= m + 1
            for be in hp.reduced_lower:
                ratio /= m + be
            assert a[m + 1] == a[m] * ratio
            assert cont._coeff_ratio_exact(s, p, m) == a[m + 1] / a[m]


def test_gp_series_values():
    assert cont.gp_series(3, 4, 0.0) == 1.0
    got = cont.gp_series(2, 1, 0.01)
    want = sum(c * c * 0.01**m for m, c in enumerate(CATALAN))
    assert abs(got - want) < 1e-12


def test_gp_series_outside_disk_redirects():
    with pytest.raises(DivergenceError) as err:
        cont.gp_series(2, 1, 0.99 * ZC2_2)
    assert "gp_continue" in str(err.value)


def test_continue_matches_series_inside_disk():
    for s, p in ((2, 1), (3, 1), (3, 2), (5, 1)):
        zc2 = float(thresholds(s).zeta_c) ** 2
        st = cont.gp_continue(s, p, 0.5 * zc2, "none")
        assert abs(st.value - cont.gp_series(s, p, 0.5 * zc2)) < 1e-10


def test_sides_agree_inside_disk():
    u = 0.4 * ZC2_2
    above = cont.gp_continue(2, 1, u, "above")
    below = cont.gp_continue(2, 1, u, "below")
    assert abs(above.value - below.value) < 1e-10


def test_schwarz_reflection():
    u = ZC2_3 * (1.5 + 0.2j)
    a = cont.gp_continue(3, 1, u, "none")
    b = cont.gp_continue(3, 1, u.conjugate(), "none")
    assert abs(b.value - a.value.conjugate()) < 1e-10


def test_cut_is_real():
    u = 1.5 * ZC2_2
    ga = cont.gp_continue(2, 1, u, "above").value
    gb = cont.gp_continue(2, 1, u, "below").value
    assert abs(ga - gb) > 1e-4  # nonzero jump across the cut
    assert ga.imag > 0 > gb.imag


def test_monodromy_trivial_off_cut():
    wp = [0.5, 0.5 + 0.4j, 0.9 + 0.4j, 0.9, 0.9 - 0.4j, 0.5 - 0.4j, 0.5]
    z = cont.transport(2, 1, wp, tol=1e-12)
    z0 = cont._seed_state(2, 1, cont._ode_data(2, 1).d)
    assert np.max(np.abs(z - z0)) < 1e-10


def test_path_errors():
    with pytest.raises(PathError):
        cont.gp_continue(2, 1, 1.5 * ZC2_2, "none")  # on the cut, no side
    with pytest.raises(PathError):
        cont.gp_continue(2, 1, 0.0, "none")
    with pytest.raises(PathError):
        cont.gp_continue(2, 1, ZC2_2 * (1.5 + 0.3j), "below")  # wrong side
    with pytest.raises(PathError):
        cont.transport(2, 1, [0.3, 0.8])  # must start at the seed


def test_finiteness_at_univalence_threshold():
    for s in (2, 3):
        uu = float(thresholds(s).zeta_univ) ** 2
        for p in (1, 2):
            for side in ("above", "below"):
                st = cont.gp_continue(s, p, uu, side)
                assert abs(st.value) < 1e6
                assert abs(cont.sigma_from_state(st)) < 1e6


def test_sigma_cont_matches_sigma_p():
    for s, p in ((2, 1), (3, 2)):
        zeta = 0.5 * float(thresholds(s).zeta_c)
        a = cont.sigma_cont(s, p, zeta * zeta, "none")
        assert abs(a - sigma_p(s, p, zeta)) < 1e-8 * abs(a)


def test_sigma_cont_small_u_limit():
    # sigma -> p as u -> 0; for (2,1) the leading correction is 9u exactly
    vals = []
    for xr in (0.3, 0.15, 0.08, 0.04):
        u = xr * ZC2_2
        dev = abs(cont.sigma_cont(2, 1, u, "none") - 1.0)
        vals.append(dev)
        assert abs(dev - 9 * u) < 3 * u * u / ZC2_2**2
    assert vals[0] > vals[-1]


def test_b_closed_form_values():
    assert cont.B_closed_form(2, 1).rational == Fraction(-1, 2)
    assert abs(cont.B_closed_form(2, 1).value + 1 / (2 * math.pi)) < 1e-15
    # paper formula: -(p^2/4pi) s^{2p-1}/(s-1)^{2p+1}
    assert cont.B_closed_form(3, 1).rational == Fraction(-3, 32)
    assert cont.B_closed_form(2, 2).rational == Fraction(-8, 1)
    assert abs(cont.B_closed_form(2, 2).value + 8 / math.pi) < 1e-14
    for s, p in ((2, 1), (4, 3), (6, 2)):
        bc = cont.B_closed_form(s, p)
        assert bc.rational < 0 and bc.pi_power == -1


def test_edge_density_closed():
    assert abs(cont.edge_density_closed(2, 1) - 4 / math.pi) < 1e-14
    assert abs(cont.edge_density_closed(2, 2) - 32 / math.pi) < 1e-13
    # consistency with -(2 s^2/p) B
    for s, p in ((3, 1), (3, 2), (5, 4)):
        assert (
            abs(
                cont.edge_density_closed(s, p)
                + 2 * s * s / p * cont.B_closed_form(s, p).value
            )
            < 1e-12
        )


def test_resonant_fit_s2p1_small_grid():
    fit = cont.resonant_fit(2, 1, eps_grid=np.geomspace(3e-3, 6e-2, 16), dps=32)
    closed = cont.B_closed_form(2, 1).value
    assert fit.B_fit < 0
    assert abs(fit.B_fit - closed) / abs(closed) < 0.05


def test_resonant_fit_narrow_grid_rejected():
    with pytest.raises(ConditioningError):
        cont.resonant_fit(2, 1, eps_grid=np.geomspace(1e-2, 2e-2, 6))


def test_disc_density_positive_near_edge():
    u = ZC2_2 * 1.01
    rho = cont.disc_density_rho(2, 1, u)
    assert 0 < rho < 2.0
    with pytest.raises(DomainError):
        cont.disc_density_rho(2, 1, ZC2_2 * (1.0 + 1e-5))


def test_disc_gp_local_expansion():
    # (1/2pi) |Disc G| ~ |B| w^2 within 10% for w in [-0.02, -0.002]
    bval = cont.B_closed_form(2, 1).value
    for eps in (0.002, 0.006, 0.02):
        u = ZC2_2 * (1 + eps)
        ga = cont.gp_continue(2, 1, u, "above").value
        assert abs(ga.imag / math.pi - abs(bval) * eps**2) < 0.1 * abs(bval) * eps**2


def test_local_model_inside_exclusion():
    u_in = ZC2_2 * (1 + 0.6e-4)
    st = cont.gp_continue(2, 1, u_in, "above")
    assert st.path == ("local-model",)
    # continuity across the exclusion boundary
    u_out = ZC2_2 * (1 + 1.2e-4)
    st_out = cont.gp_continue(2, 1, u_out, "above")
    assert abs(st.value - st_out.value) < 1e-3 * abs(st_out.value)


def test_growth_at_infinity():
    # |G_p(u)| |u|^{p/s} / (1 + log|u|) bounded along the negative real axis
    s, p = 2, 1
    vals = []
    for mag in (10.0, 100.0, 1000.0):
        u = -mag * ZC2_2
        g = cont.gp_continue(s, p, u, "none").value
        vals.append(abs(g) * abs(u / ZC2_2) ** (p / s) / (1 + math.log(mag)))
    assert max(vals) < 10 * min(vals)
    assert max(vals) < 10.0


def test_ode_transport_vs_mpmath_hypergeometric():
    # independent oracle: mpmath's own hypergeometric continuation, fed the
    # reduced parameter lists, evaluated well outside the disk
    import mpmath as mp

    mp.mp.dps = 25
    cases = [
        (2, 1, -3.0, "none"),
        (2, 1, -48.0, "none"),
        (2, 1, 1.5 + 0.4j, "above"),
        (3, 2, -5.0, "none"),
        (3, 2, 2.0 + 0.7j, "above"),
    ]
    for s, p, xi, side in cases:
        hp = cont.hyp_params(s, p)
        a_list = [mp.mpf(f.numerator) / f.denominator for f in hp.reduced_upper]
        b_list = [mp.mpf(f.numerator) / f.denominator for f in hp.reduced_lower]
        ref = complex(mp.hyper(a_list, b_list, xi))
        zc2 = float(thresholds(s).zeta_c) ** 2
        st = cont.gp_continue(s, p, complex(xi) * zc2, side)
        assert abs(st.value - ref) < 1e-11 * max(1.0, abs(ref))


def test_state_fields():
    st = cont.gp_continue(3, 2, 0.5 * ZC2_3, "none")
    assert st.s == 3 and st.p == 2 and st.side == "none"
    assert len(st.derivs) >= 3
    assert st.path[0] == 0.5
