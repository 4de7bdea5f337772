import math
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from transmon_cqed import circuit as cc
from transmon_cqed.constants import E_CHARGE, FLUX_QUANTUM, PLANCK_H
from transmon_cqed.errors import DomainError, TransmonRegimeWarning

fF = 1e-15
# device of the measured sample, with the extracted resonator
DEVICE = cc.CircuitParams(c_j=51 * fF, c_c=9 * fF, c_r=57.1 * fF, l_r=9.65e-9,
                          e_j_max=46e9)

caps = st.floats(min_value=0.1, max_value=1e4)


def test_effective_capacitances_device():
    c_star_sq, c_j_eff, c_r_eff = cc.effective_capacitances(DEVICE)
    assert c_star_sq == pytest.approx(3885 * fF**2, rel=1e-12)
    assert c_j_eff == pytest.approx(58.77458396369139 * fF, rel=1e-12)
    assert c_r_eff == pytest.approx(64.75 * fF, rel=1e-12)


def test_energies_device():
    d = cc.derive(DEVICE)
    assert d.e_c == pytest.approx(329.56812312997884e6, rel=1e-12)
    assert d.omega_r == pytest.approx(6.367025490797978e9, rel=1e-12)
    assert d.e_j == 46e9
    assert d.omega_a == pytest.approx(math.sqrt(8 * 46e9 * d.e_c) - d.e_c)


def test_constants_exact():
    assert E_CHARGE == 1.602176634e-19
    assert PLANCK_H == 6.62607015e-34
    assert FLUX_QUANTUM == pytest.approx(2.067833848e-15, rel=1e-9)


@pytest.mark.parametrize("flux, expected, sign", [
    (0.0, 46e9, 1),
    (0.5, 0.0, 1),
    (1.0, 46e9, -1),
    (1 / 3, 23e9, 1),
    (-1 / 3, 23e9, 1),
])
def test_josephson_energy(flux, expected, sign):
    e_j, s = cc.josephson_energy(46e9, flux, return_sign=True)
    assert e_j == pytest.approx(expected, abs=1e-3)
    assert s == sign


def test_half_flux_quantum_has_no_transmon():
    p = cc.CircuitParams(51 * fF, 9 * fF, 57.1 * fF, 9.65e-9, 46e9, flux=0.5)
    assert cc.josephson_inductance(0.0) == math.inf
    # cos(pi/2) is ~6e-17 in floating point, so E_J is a few microhertz
    assert cc.coupling_rate_impedance(p) < 1e-3 * cc.coupling_rate(DEVICE)


def test_josephson_inductance_value():
    # 46 GHz junction: L_J = (phi0 / 2 pi)^2 / (h * 46 GHz)
    assert cc.josephson_inductance(46e9) == pytest.approx(3.5535e-9, rel=1e-4)


def test_normalized_coupling_device():
    assert cc.normalized_coupling(DEVICE) == pytest.approx(0.07145558166641658,
                                                           rel=1e-12)


def test_three_coupling_forms_agree():
    g1 = cc.coupling_rate(DEVICE)
    assert cc.coupling_rate_impedance(DEVICE) == pytest.approx(g1, rel=1e-12)
    assert cc.coupling_rate_charge(DEVICE) == pytest.approx(g1, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(c_j=caps, c_c=caps, c_r=caps, l_r=st.floats(0.1, 100),
       e_j=st.floats(1, 200), flux=st.floats(-0.45, 0.45))
def test_coupling_forms_agree_anywhere(c_j, c_c, c_r, l_r, e_j, flux):
    p = cc.CircuitParams(c_j * fF, c_c * fF, c_r * fF, l_r * 1e-9, e_j * 1e9,
                         flux=flux)
    g1 = cc.coupling_rate(p)
    assert cc.coupling_rate_impedance(p) == pytest.approx(g1, rel=1e-9)
    assert cc.coupling_rate_charge(p) == pytest.approx(g1, rel=1e-9)


@settings(max_examples=500, deadline=None)
@given(c_j=caps, c_c=caps, c_r=caps)
def test_effective_capacitance_identity(c_j, c_c, c_r):
    p = cc.CircuitParams(c_j * fF, c_c * fF, c_r * fF, 1e-9, 1e9)
    c_star_sq, c_j_eff, c_r_eff = cc.effective_capacitances(p)
    assert c_j_eff * (c_r + c_c) * fF == pytest.approx(c_star_sq, rel=1e-12)
    assert c_r_eff * (c_j + c_c) * fF == pytest.approx(c_star_sq, rel=1e-12)
    assert c_j_eff > c_j * fF and c_r_eff > c_r * fF


@settings(max_examples=500, deadline=None)
@given(c_j=caps, c_c=caps, c_r=caps, f_a=st.floats(1e8, 2e10),
       f_r=st.floats(1e8, 2e10))
def test_coupling_bound(c_j, c_c, c_r, f_a, f_r):
    p = cc.CircuitParams(c_j * fF, c_c * fF, c_r * fF, 1e-9, 1e9)
    assert cc.normalized_coupling(p) <= 0.5
    assert cc.coupling_rate(p, f_a=f_a, f_r=f_r) <= 0.5 * math.sqrt(f_a * f_r)


def test_bound_approached_for_large_coupling_capacitor():
    p = cc.CircuitParams(1 * fF, 1e6 * fF, 1 * fF, 1e-9, 1e9)
    assert cc.normalized_coupling(p) == pytest.approx(0.5, rel=1e-5)


def test_impedance_chain():
    z_r, z_0 = cc.impedance_chain(57.1 * fF, 9.65e-9)
    assert z_r == pytest.approx(411.1, rel=1e-3)
    assert z_0 == pytest.approx(math.pi * z_r / 2)


def test_transmon_regime_warning():
    with pytest.warns(TransmonRegimeWarning):
        f = cc.transmon_frequency(5e9, 1e9)
    assert f == pytest.approx(math.sqrt(40e18) - 1e9)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        cc.transmon_frequency(20e9, 1e9)


@pytest.mark.parametrize("field", ["c_j", "c_c", "c_r", "l_r", "e_j_max"])
@pytest.mark.parametrize("value", [0.0, -1.0, float("nan")])
def test_rejects_non_positive(field, value):
    kwargs = dict(c_j=51 * fF, c_c=9 * fF, c_r=57.1 * fF, l_r=9.65e-9, e_j_max=46e9)
    kwargs[field] = value
    with pytest.raises(DomainError) as err:
        cc.CircuitParams(**kwargs)
    assert err.value.module == "circuit_core"
    assert err.value.field == field
    assert field in str(err.value)


def test_rejects_infinite_flux():
    with pytest.raises(DomainError):
        cc.CircuitParams(51 * fF, 9 * fF, 57.1 * fF, 9.65e-9, 46e9, flux=math.inf)
