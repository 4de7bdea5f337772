"""Lumped circuit of a Transmon capacitively coupled to one resonator mode.

All energies and frequencies are ordinary frequencies in hertz (E/h and
omega/2pi). Capacitances are in farad, inductances in henry and the external
flux in units of the flux quantum.
"""

import math
import warnings
from dataclasses import dataclass

from .constants import E_CHARGE, FLUX_QUANTUM, HBAR, PLANCK_H
from .errors import DomainError, TransmonRegimeWarning, require_positive

TRANSMON_RATIO = 20.0


@dataclass(frozen=True)
class CircuitParams:
    """Physical network: junction capacitance to ground, coupling capacitor,
    resonator mode (C_r, L_r), SQUID maximum Josephson energy and flux."""

    c_j: float
    c_c: float
    c_r: float
    l_r: float
    e_j_max: float
    flux: float = 0.0

    def __post_init__(self):
        require_positive("circuit_core", c_j=self.c_j, c_c=self.c_c,
                         c_r=self.c_r, l_r=self.l_r, e_j_max=self.e_j_max)
        if not math.isfinite(self.flux):
            raise DomainError("must be finite", module="circuit_core",
                              field="flux")


@dataclass(frozen=True)
class DerivedParams:
    c_star_sq: float
    c_j_eff: float
    c_r_eff: float
    e_c: float
    e_j: float
    e_j_sign: int
    omega_a: float
    omega_r: float
    l_j: float
    z_r_eff: float
    z_a_eff: float
    g: float


def effective_capacitances(p):
    """Return ``(C*^2, C_J,eff, C_r,eff)``.

    ``p`` is anything with ``c_j``, ``c_c`` and ``c_r`` attributes.
    """
    require_positive("circuit_core", c_j=p.c_j, c_c=p.c_c, c_r=p.c_r)
    c_star_sq = p.c_c * p.c_j + p.c_c * p.c_r + p.c_j * p.c_r
    return c_star_sq, c_star_sq / (p.c_r + p.c_c), c_star_sq / (p.c_j + p.c_c)


def charging_energy(c_j_eff):
    """E_c/h = e^2 / (2 C_J,eff h)."""
    require_positive("circuit_core", c_j_eff=c_j_eff)
    return E_CHARGE**2 / (2 * c_j_eff * PLANCK_H)


def josephson_energy(e_j_max, flux, return_sign=False):
    """SQUID Josephson energy ``|E_J,max cos(pi flux)|``.

    With ``return_sign`` the sign of the cosine (the branch) is returned as
    a second value; the spectrum only depends on the magnitude.
    """
    c = math.cos(math.pi * flux)
    e_j = abs(e_j_max * c)
    if return_sign:
        return e_j, (1 if c >= 0 else -1)
    return e_j


def plasma_frequency(e_j, e_c):
    """sqrt(8 E_J E_c), the harmonic Transmon frequency."""
    return math.sqrt(8 * e_j * e_c)


def transmon_frequency(e_j, e_c):
    """Transmon 0-1 frequency ``sqrt(8 E_J E_c) - E_c``.

    Warns with :class:`TransmonRegimeWarning` when ``E_J/E_c < 20`` but
    still returns the closed form.
    """
    require_positive("circuit_core", e_c=e_c)
    if e_j < 0:
        raise DomainError("must be non-negative", module="circuit_core",
                          field="e_j")
    if e_j < TRANSMON_RATIO * e_c:
        warnings.warn(f"outside Transmon regime: E_J/E_c = {e_j / e_c:.3g} < "
                      f"{TRANSMON_RATIO:g}", TransmonRegimeWarning,
                      stacklevel=2)
    return math.sqrt(8 * e_j * e_c) - e_c


def resonator_frequency(l_r, c_r_eff):
    """1 / (2 pi sqrt(L_r C_r,eff))."""
    require_positive("circuit_core", l_r=l_r, c_r_eff=c_r_eff)
    return 1 / (2 * math.pi * math.sqrt(l_r * c_r_eff))


def josephson_inductance(e_j):
    """L_J = phi0^2 / (4 pi^2 E_J), with E_J given in hertz."""
    if e_j <= 0:
        return math.inf
    return FLUX_QUANTUM**2 / (4 * math.pi**2 * e_j * PLANCK_H)


def normalized_coupling(p):
    """g / sqrt(f_a f_r) from the capacitance ratios alone; at most 1/2."""
    require_positive("circuit_core", c_j=p.c_j, c_c=p.c_c, c_r=p.c_r)
    return 0.5 / math.sqrt((1 + p.c_j / p.c_c) * (1 + p.c_r / p.c_c))


def charge_zpf(l_r, c_r_eff):
    """Zero-point charge fluctuation sqrt(hbar/2 sqrt(C/L)) of a mode."""
    return math.sqrt(HBAR / 2 * math.sqrt(c_r_eff / l_r))


def charge_coupling(p):
    """Coupling per unit Cooper-pair matrix element, in hertz.

    ``g_kl = charge_coupling(p) * <k|n_J|l>``.
    """
    c_star_sq, _, c_r_eff = effective_capacitances(p)
    q_zpf = charge_zpf(p.l_r, c_r_eff)
    return 2 * E_CHARGE * (p.c_c / c_star_sq) * q_zpf / PLANCK_H


def _frequencies(p):
    _, c_j_eff, c_r_eff = effective_capacitances(p)
    e_c = charging_energy(c_j_eff)
    e_j = josephson_energy(p.e_j_max, p.flux)
    return e_c, e_j, resonator_frequency(p.l_r, c_r_eff)


def coupling_rate(p, f_a=None, f_r=None):
    """Capacitance-ratio form of the coupling rate g/2pi.

    ``g = (1/2) sqrt(f_a f_r / ((1 + C_J/C_c)(1 + C_r/C_c)))``.

    When not given, ``f_a`` defaults to the plasma frequency sqrt(8 E_J E_c)
    at the circuit's flux (the approximation under which this form is exact)
    and ``f_r`` to the loaded resonator frequency.
    """
    if f_a is None or f_r is None:
        e_c, e_j, f_r_loaded = _frequencies(p)
        if f_a is None:
            f_a = plasma_frequency(e_j, e_c)
        if f_r is None:
            f_r = f_r_loaded
    if f_a < 0 or f_r < 0:
        raise DomainError("frequencies must be non-negative",
                          module="circuit_core", field="f_a" if f_a < 0 else "f_r")
    return normalized_coupling(p) * math.sqrt(f_a * f_r)


def coupling_rate_impedance(p):
    """Impedance form (1/4pi) (C_c/C*^2) / sqrt(Z_r,eff Z_a,eff), in hertz."""
    c_star_sq, c_j_eff, c_r_eff = effective_capacitances(p)
    l_j = josephson_inductance(josephson_energy(p.e_j_max, p.flux))
    if math.isinf(l_j):
        return 0.0
    z_r = math.sqrt(p.l_r / c_r_eff)
    z_a = math.sqrt(l_j / c_j_eff)
    return (p.c_c / c_star_sq) / math.sqrt(z_r * z_a) / (4 * math.pi)


def coupling_rate_charge(p):
    """Charge form 2e (C_c/C*^2) (E_J/32E_c)^(1/4) q_zpf / h, in hertz."""
    e_c, e_j, _ = _frequencies(p)
    return charge_coupling(p) * (e_j / (32 * e_c)) ** 0.25


def impedance_chain(c_r, l_r):
    """Mode impedance ``Z_r = sqrt(L_r/C_r)`` and the lambda/2 line
    impedance ``Z_0 = pi Z_r / 2``."""
    require_positive("circuit_core", c_r=c_r, l_r=l_r)
    z_r = math.sqrt(l_r / c_r)
    return z_r, math.pi * z_r / 2


def derive(p):
    """All closed-form quantities of a circuit at its flux."""
    c_star_sq, c_j_eff, c_r_eff = effective_capacitances(p)
    e_c = charging_energy(c_j_eff)
    e_j, sign = josephson_energy(p.e_j_max, p.flux, return_sign=True)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TransmonRegimeWarning)
        omega_a = transmon_frequency(e_j, e_c)
    omega_r = resonator_frequency(p.l_r, c_r_eff)
    l_j = josephson_inductance(e_j)
    return DerivedParams(
        c_star_sq=c_star_sq,
        c_j_eff=c_j_eff,
        c_r_eff=c_r_eff,
        e_c=e_c,
        e_j=e_j,
        e_j_sign=sign,
        omega_a=omega_a,
        omega_r=omega_r,
        l_j=l_j,
        z_r_eff=math.sqrt(p.l_r / c_r_eff),
        z_a_eff=math.sqrt(l_j / c_j_eff),
        g=coupling_rate(p),
    )
