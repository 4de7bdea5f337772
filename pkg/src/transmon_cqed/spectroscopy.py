"""Simulated flux-sweep spectroscopy: transition branches, the avoided
crossing, dressed anharmonicity and synthetic Lorentzian line shapes."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.signal import find_peaks

from .cpb import josephson_for_frequency
from .errors import DomainError
from .hamiltonian import Tier, branches, multimode_parameters

DEFAULT_LINEWIDTH = 29.3e6
# Minimum overlap with the bare |e,0>/|f,0> states for dispersive labelling.
DISPERSIVE_PURITY = 0.5
BRANCH_NAMES = ("lower", "upper", "ge", "cavity", "ef")


@dataclass(frozen=True)
class FluxAxis:
    """Sweep values, optionally in raw units mapped by
    ``flux = (value - offset) / period``."""

    values: np.ndarray
    offset: float | None = None
    period: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.atleast_1d(np.asarray(self.values, dtype=float)))
        if self.period is not None and not self.period > 0:
            raise DomainError("must be strictly positive", module="spectroscopy",
                              field="period")

    @property
    def flux(self):
        if self.period is None:
            return self.values - (self.offset or 0.0)
        return (self.values - (self.offset or 0.0)) / self.period

    def __len__(self):
        return self.values.size

    @classmethod
    def from_flux(cls, flux, offset=0.0, period=1.0):
        """Raw axis whose mapping reproduces the given fluxes."""
        raw = offset + period * np.asarray(flux, dtype=float)
        return cls(raw, offset=offset, period=period)


@dataclass(frozen=True)
class TransitionSpectrum:
    axis: FluxAxis
    branches: dict
    failures: list = field(default_factory=list)

    def rows(self, names=BRANCH_NAMES):
        """(flux, branch, frequency) triples, flux-major."""
        flux = self.axis.flux
        out = []
        for i, x in enumerate(flux):
            for name in names:
                if name in self.branches:
                    out.append((x, name, self.branches[name][i]))
        return out


@dataclass(frozen=True)
class LineShapeTrace:
    frequencies: np.ndarray
    amplitudes: np.ndarray
    width: float


def flux_sweep(cfg, axis):
    """Transition branches of ``cfg`` at every point of ``axis``.

    Points whose model evaluation fails are recorded in ``failures`` as
    ``(index, message)`` and carry NaN frequencies; the sweep continues.
    """
    flux = axis.flux
    try:
        result = branches(cfg, flux)
        failures = []
    except (DomainError, np.linalg.LinAlgError):
        result, failures = _pointwise(cfg, flux)
    return TransitionSpectrum(axis=axis, branches=result, failures=failures)


def _pointwise(cfg, flux):
    rows, failures = [], []
    for i, x in enumerate(flux):
        try:
            rows.append(branches(cfg, [x]))
        except (DomainError, np.linalg.LinAlgError) as exc:
            failures.append((i, str(exc)))
            rows.append(None)
    keys = next((r.keys() for r in rows if r is not None), ())
    out = {k: np.full(len(flux), np.nan) for k in keys}
    for i, r in enumerate(rows):
        if r is not None:
            for k in keys:
                out[k][i] = r[k][0]
    return out, failures


def _vertex(x, y):
    # Vertex of the parabola through three points.
    (x0, x1, x2), (y0, y1, y2) = x, y
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    if a <= 0:
        return x1
    return -b / (2 * a)


def _quadratic_at(x, y, xv):
    coeffs = np.polyfit(x, y, 2)
    return float(np.polyval(coeffs, xv))


def avoided_crossing(spec, lower="lower", upper="upper"):
    """Centre and splitting of the avoided crossing between two branches.

    The minimum of ``upper - lower`` on the grid is refined by a three-point
    quadratic; the centre is the mean of the two branches there.
    """
    x = spec.axis.flux
    lo = np.asarray(spec.branches[lower])
    hi = np.asarray(spec.branches[upper])
    gap = hi - lo
    if x.size < 3 or np.all(np.isnan(gap)):
        raise DomainError("crossing not bracketed", module="spectroscopy",
                          field="axis")
    i = int(np.nanargmin(gap))
    if i == 0 or i == x.size - 1:
        raise DomainError("crossing not bracketed: minimum separation on the "
                          "axis boundary", module="spectroscopy", field="axis")
    sl = slice(i - 1, i + 2)
    xv = _vertex(x[sl], gap[sl])
    splitting = max(_quadratic_at(x[sl], gap[sl], xv), 0.0)
    center = _quadratic_at(x[sl], 0.5 * (lo[sl] + hi[sl]), xv)
    return center, splitting


def dressed_anharmonicity(cfg, flux):
    """(|g>->|e>) - (|e>->|f>) of the coupled system at ``flux``."""
    b = branches(cfg, [flux])
    if "ef" not in b:
        raise DomainError("needs k_levels >= 3", module="spectroscopy",
                          field="k_levels")
    purity = min(b["ge_weight"][0], b["ef_weight"][0])
    if purity < DISPERSIVE_PURITY:
        raise DomainError(f"not in dispersive regime (bare-state overlap "
                          f"{purity:.2f})", module="spectroscopy", field="flux")
    return float(b["ge"][0] - b["ef"][0])


def flux_for_qubit(cfg, f_target, dressed=True):
    """Flux in [0, 1/2] placing the qubit 0-1 line at ``f_target``.

    With ``dressed`` the coupled ``ge`` branch is matched; otherwise the bare
    Transmon transition of the tier.
    """
    e_c = cfg.params.e_c
    if cfg.tier is Tier.EXACT_MULTIMODE:
        e_c = multimode_parameters(cfg.circuit, cfg.n_modes,
                                   cfg.series_c_threshold).e_c
    e_j_max = float(cfg.e_j_at([0.0])[0])
    exact = cfg.tier is not Tier.DUFFING_SINGLE
    e_j = josephson_for_frequency(e_c, f_target, exact=exact, n_cut=cfg.n_cut)
    if e_j > e_j_max:
        raise DomainError(f"{f_target:.6g} Hz is above the qubit maximum",
                          module="spectroscopy", field="f_target")
    bare = math.acos(e_j / e_j_max) / math.pi
    if not dressed:
        return bare

    def gap(x):
        return branches(cfg, [x])["ge"][0] - f_target

    lo, hi = max(bare - 0.05, 0.0), min(bare + 0.05, 0.5)
    return brentq(gap, lo, hi, xtol=1e-12)


def synth_lineshape(spec, width=DEFAULT_LINEWIDTH, noise_seed=None, noise=0.0,
                    frequencies=None, names=("lower", "upper")):
    """Lorentzian absorption traces, one per axis point.

    Peaks of full width ``width`` sit at the listed branch frequencies; the
    summed trace is scaled to a maximum of one, Gaussian amplitude noise of
    standard deviation ``noise`` (seeded by ``noise_seed``) is added and the
    result is clipped to [0, 1].
    """
    if not width > 0:
        raise DomainError("must be strictly positive", module="spectroscopy",
                          field="width")
    centers = np.stack([np.asarray(spec.branches[n], dtype=float) for n in names],
                       axis=1)
    if frequencies is None:
        lo = np.nanmin(centers) - 10 * width
        hi = np.nanmax(centers) + 10 * width
        frequencies = np.arange(lo, hi, width / 20)
    frequencies = np.asarray(frequencies, dtype=float)
    rng = np.random.default_rng(noise_seed)
    half = width / 2
    traces = []
    for row in centers:
        row = row[np.isfinite(row)]
        amp = np.sum(half**2 / ((frequencies[:, None] - row[None, :]) ** 2 + half**2),
                     axis=1)
        if amp.size and amp.max() > 1:
            amp = amp / amp.max()
        if noise:
            amp = amp + rng.normal(0.0, noise, amp.shape)
        traces.append(LineShapeTrace(frequencies=frequencies,
                                     amplitudes=np.clip(amp, 0.0, 1.0),
                                     width=width))
    return traces


def pick_peaks(trace, n_peaks=None, prominence=0.1):
    """Peak centres of a trace, refined by a parabola through each maximum
    and its two neighbours. With ``n_peaks`` only the most prominent are
    kept, returned in ascending frequency."""
    f, a = trace.frequencies, trace.amplitudes
    idx, props = find_peaks(a, prominence=prominence)
    if n_peaks is not None:
        keep = np.argsort(props["prominences"])[::-1][:n_peaks]
        idx = np.sort(idx[keep])
    out = []
    for i in idx:
        if 0 < i < f.size - 1:
            out.append(_vertex(f[i - 1:i + 2], -a[i - 1:i + 2]))
        else:
            out.append(f[i])
    return np.array(out)
