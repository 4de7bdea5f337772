"""Coupling-maximizing design rules: normalized coupling from capacitance
ratios, the impedance a resonator needs, and capacitance scans."""

import itertools
import math
from dataclasses import dataclass

from . import circuit as cc
from .errors import DomainError, require_positive
from .foster import Topology, z0_from_zeq

USC_THRESHOLD = 0.1
DSC_THRESHOLD = 1.0


@dataclass(frozen=True)
class DesignPoint:
    c_j: float
    c_c: float
    c_r: float
    target_f: float
    topology: Topology = Topology.QUARTER_WAVE

    def __post_init__(self):
        require_positive("design", c_j=self.c_j, c_c=self.c_c, c_r=self.c_r,
                         target_f=self.target_f)
        object.__setattr__(self, "topology", Topology(self.topology))


@dataclass(frozen=True)
class DesignReport:
    point: DesignPoint
    g_bar: float
    g: float
    required_impedance: float
    regime: str
    bound_margin: float
    e_c: float
    e_j_over_e_c: float
    transmon_ok: bool
    quoted_g_bar: float | None = None

    @property
    def quoted_gap(self):
        """Relative difference between a quoted g_bar and the formula value."""
        if self.quoted_g_bar is None:
            return None
        return (self.quoted_g_bar - self.g_bar) / self.g_bar

    def lines(self):
        p = self.point
        out = [
            f"C_J={p.c_j * 1e15:.4g} fF  C_c={p.c_c * 1e15:.4g} fF  "
            f"C_r={p.c_r * 1e15:.4g} fF  f={p.target_f / 1e9:.4g} GHz  "
            f"topology={p.topology.value}",
            f"g_bar (capacitance formula) = {self.g_bar:.4f}",
            f"g/2pi = {self.g / 1e6:.1f} MHz  regime = {self.regime}  "
            f"bound margin = {self.bound_margin:.3f}",
            f"required impedance = {self.required_impedance:.1f} ohm",
            f"E_c = {self.e_c / 1e6:.1f} MHz  E_J/E_c = {self.e_j_over_e_c:.2f}"
            + ("" if self.transmon_ok else "  (outside Transmon regime)"),
        ]
        if self.quoted_g_bar is not None:
            out.append(f"quoted g_bar = {self.quoted_g_bar:.4f} "
                       f"({100 * self.quoted_gap:+.1f}% from formula)")
        return out


def regime_label(g_bar):
    if g_bar >= DSC_THRESHOLD:
        return "deep-strong"
    if g_bar >= USC_THRESHOLD:
        return "ultrastrong"
    return "strong"


def required_impedance(c_r, f, topology):
    """Characteristic impedance putting a mode of capacitance ``c_r`` at ``f``.

    Lumped: Z_eq = 1/(2 pi f C_r). Lines: Z_0 = pi Z_eq / 4 (lambda/4) or
    pi Z_eq / 2 (lambda/2).
    """
    require_positive("design", c_r=c_r, f=f)
    z_eq = 1 / (2 * math.pi * f * c_r)
    return z0_from_zeq(z_eq, topology)


def evaluate(point, quoted_g_bar=None):
    """Normalized coupling, regime and required impedance at a design point.

    The Transmon and resonator are taken resonant at ``target_f``; the
    Josephson energy that puts the Transmon there sets the E_J/E_c flag.
    """
    g_bar = cc.normalized_coupling(point)
    _, c_j_eff, _ = cc.effective_capacitances(point)
    e_c = cc.charging_energy(c_j_eff)
    e_j = (point.target_f + e_c) ** 2 / (8 * e_c)
    ratio = e_j / e_c
    return DesignReport(
        point=point,
        g_bar=g_bar,
        g=g_bar * point.target_f,
        required_impedance=required_impedance(point.c_r, point.target_f,
                                              point.topology),
        regime=regime_label(g_bar),
        bound_margin=2 * g_bar,
        e_c=e_c,
        e_j_over_e_c=ratio,
        transmon_ok=ratio >= cc.TRANSMON_RATIO,
        quoted_g_bar=quoted_g_bar,
    )


def scan_coupling(c_j_range, c_c_range, c_r_range, target_f,
                  topology=Topology.QUARTER_WAVE):
    """Evaluate every capacitance combination, best g_bar first.

    Points outside the Transmon regime stay in the list with
    ``transmon_ok=False``.
    """
    ranges = {"c_j_range": c_j_range, "c_c_range": c_c_range,
              "c_r_range": c_r_range}
    for name, rng in ranges.items():
        if len(rng) == 0:
            raise DomainError("empty range", module="design", field=name)
    reports = [evaluate(DesignPoint(c_j, c_c, c_r, target_f, topology))
               for c_j, c_c, c_r in itertools.product(c_j_range, c_c_range,
                                                      c_r_range)]
    reports.sort(key=lambda r: -r.g_bar)
    return reports
