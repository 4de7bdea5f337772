"""Least-squares extraction of Hamiltonian parameters from peak positions,
and the back-derivation of resonator circuit elements."""

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize

from . import circuit as cc
from .errors import DomainError, FitWarning, require_positive
from .hamiltonian import HamiltonianParams, Tier, branches
from .spectroscopy import FluxAxis, flux_sweep

PARAM_NAMES = ("e_c", "e_j_max", "f_r", "g", "flux_offset", "flux_period")
NEAREST_BRANCHES = ("lower", "upper", "ef")
CSV_COLUMNS = ("sweep_value", "frequency_hz", "branch", "weight")


@dataclass(frozen=True)
class PeakData:
    """Measured (or synthetic) peak positions against a raw sweep axis."""

    sweep_value: np.ndarray
    frequency: np.ndarray
    branch: tuple
    weight: np.ndarray

    def __post_init__(self):
        sv = np.atleast_1d(np.asarray(self.sweep_value, dtype=float))
        fr = np.atleast_1d(np.asarray(self.frequency, dtype=float))
        n = sv.size
        br = tuple(self.branch) if self.branch is not None else (None,) * n
        w = (np.ones(n) if self.weight is None
             else np.atleast_1d(np.asarray(self.weight, dtype=float)))
        if not (fr.size == len(br) == w.size == n):
            raise DomainError("columns have different lengths", module="fitting",
                              field="points")
        if np.any(~(fr > 0)):
            raise DomainError("frequencies must be positive", module="fitting",
                              field="frequency")
        if np.any(~(w > 0)):
            raise DomainError("weights must be positive", module="fitting",
                              field="weight")
        br = tuple(b if b else None for b in br)
        object.__setattr__(self, "sweep_value", sv)
        object.__setattr__(self, "frequency", fr)
        object.__setattr__(self, "branch", br)
        object.__setattr__(self, "weight", w)

    def __len__(self):
        return self.sweep_value.size

    @classmethod
    def from_points(cls, points):
        """From ``(sweep_value, frequency[, branch[, weight]])`` tuples."""
        cols = [[], [], [], []]
        for pt in points:
            pt = tuple(pt) + (None, 1.0)[len(pt) - 2:]
            for c, v in zip(cols, pt):
                c.append(v)
        return cls(cols[0], cols[1], tuple(cols[2]), cols[3])

    @classmethod
    def read_csv(cls, path):
        with open(path, newline="", encoding="utf-8") as fh:
            return cls.parse_csv(fh.read())

    @classmethod
    def parse_csv(cls, text):
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
        reader = csv.DictReader(lines)
        if reader.fieldnames is None or not {"sweep_value", "frequency_hz"} <= set(
                reader.fieldnames):
            raise DomainError("CSV needs a header with sweep_value and "
                              "frequency_hz", module="fitting", field="peaks")
        sv, fr, br, w = [], [], [], []
        for row in reader:
            sv.append(float(row["sweep_value"]))
            fr.append(float(row["frequency_hz"]))
            br.append((row.get("branch") or "").strip() or None)
            w.append(float(row["weight"]) if (row.get("weight") or "").strip() else 1.0)
        return cls(sv, fr, tuple(br), w)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for s, f, b, w in zip(self.sweep_value, self.frequency, self.branch,
                              self.weight):
            writer.writerow([repr(float(s)), repr(float(f)), b or "",
                             repr(float(w))])
        return buf.getvalue()


@dataclass(frozen=True)
class FitConfig:
    """Which parameters float, where they start and how far they may go.

    ``initial`` must hold all six of :data:`PARAM_NAMES`. Missing ``bounds``
    default to a factor of two around the initial value (one period either
    side for the flux offset). ``c_j``/``c_c`` enable circuit extraction.
    """

    initial: dict
    free_params: tuple = PARAM_NAMES
    bounds: dict = field(default_factory=dict)
    tolerance: float = 1e-12
    max_evals: int = 2000
    method: str = "least_squares"
    restarts: int = 0
    seed: int = 0
    c_j: float | None = None
    c_c: float | None = None
    f_a_at_resonance: float | None = None

    def __post_init__(self):
        missing = [p for p in PARAM_NAMES if p not in self.initial]
        if missing:
            raise DomainError(f"missing initial values {missing}",
                              module="fitting", field="initial")
        unknown = [p for p in self.free_params if p not in PARAM_NAMES]
        if unknown:
            raise DomainError(f"unknown parameters {unknown}", module="fitting",
                              field="free_params")
        if self.method not in ("least_squares", "simplex"):
            raise DomainError(f"unknown method {self.method!r}", module="fitting",
                              field="method")
        for name in self.free_params:
            lo, hi = self.bound(name)
            if not lo <= self.initial[name] <= hi:
                raise DomainError(f"initial value {self.initial[name]!r} "
                                  f"outside bounds ({lo!r}, {hi!r})",
                                  module="fitting", field=name)

    def bound(self, name):
        if name in self.bounds:
            return tuple(self.bounds[name])
        v = self.initial[name]
        if name == "flux_offset":
            period = self.initial["flux_period"]
            return v - period, v + period
        return (v / 2, v * 2) if v > 0 else (v * 2, v / 2)

    def scale(self, name):
        if name == "flux_offset":
            return abs(self.initial["flux_period"])
        return abs(self.initial[name]) or 1.0


@dataclass(frozen=True)
class ExtractedCircuit:
    c_r: float
    l_r: float
    z_r: float
    z_0: float


@dataclass(frozen=True)
class FitResult:
    params: dict
    residual_rms: float
    residuals: np.ndarray
    assignments: tuple
    converged: bool
    n_evaluations: int
    message: str
    derived_circuit: ExtractedCircuit | None = None

    @property
    def hamiltonian_params(self):
        return HamiltonianParams(e_c=self.params["e_c"],
                                 e_j_max=self.params["e_j_max"],
                                 f_r=self.params["f_r"], g=self.params["g"])


def extract_circuit(f_r, g, c_j, c_c, f_a_at_resonance=None):
    """Resonator C_r, L_r, Z_r and lambda/2 Z_0 from fitted f_r and g.

    Inverts the capacitance-ratio coupling formula for C_r given the known
    C_J and C_c, then fixes L_r from the loaded resonator frequency.
    ``f_a_at_resonance`` defaults to ``f_r``.
    """
    f_a = f_r if f_a_at_resonance is None else f_a_at_resonance
    require_positive("fitting", f_r=f_r, g=g, c_j=c_j, c_c=c_c, f_a=f_a)
    ratio = f_a * f_r / (4 * g**2 * (1 + c_j / c_c))
    c_r = (ratio - 1) * c_c
    if not c_r > 0:
        raise DomainError(f"coupling {g:.6g} Hz is too large for C_J={c_j:.4g} F "
                          f"and C_c={c_c:.4g} F (C_r would be {c_r:.4g} F)",
                          module="fitting", field="g")
    c_star_sq = c_c * c_j + c_c * c_r + c_j * c_r
    c_r_eff = c_star_sq / (c_j + c_c)
    l_r = 1 / ((2 * math.pi * f_r) ** 2 * c_r_eff)
    z_r, z_0 = cc.impedance_chain(c_r, l_r)
    return ExtractedCircuit(c_r=c_r, l_r=l_r, z_r=z_r, z_0=z_0)


def synth_peaks(model, axis, names=("lower", "upper", "ef"), noise=0.0, seed=None,
                min_purity=0.8):
    """Peak positions simulated from ``model`` along ``axis``, with branch
    hints. ``ge``/``cavity``/``ef`` points are kept only where the state is
    at least ``min_purity`` bare-like, as they would be resolved in
    two-tone spectroscopy; Gaussian noise of ``noise`` hertz is added."""
    spec = flux_sweep(model, axis)
    rng = np.random.default_rng(seed)
    sv, fr, br = [], [], []
    for i, x in enumerate(axis.values):
        for name in names:
            f = spec.branches[name][i]
            purity_key = f"{name}_weight"
            if purity_key in spec.branches and spec.branches[purity_key][i] < min_purity:
                continue
            if name == "ef" and spec.branches["ge"][i] > spec.branches["cavity"][i]:
                continue
            if np.isfinite(f):
                sv.append(x)
                fr.append(f)
                br.append(name)
    fr = np.asarray(fr)
    if noise:
        fr = fr + rng.normal(0.0, noise, fr.shape)
    return PeakData(sv, fr, tuple(br), np.ones(len(sv)))


class _Problem:
    def __init__(self, data, cfg, model):
        self.data = data
        self.cfg = cfg
        self.model = model
        self.free = tuple(cfg.free_params)
        self.scales = np.array([cfg.scale(n) for n in self.free])
        self.x0 = np.array([cfg.initial[n] for n in self.free]) / self.scales
        lo, hi = zip(*(cfg.bound(n) for n in self.free))
        self.lo = np.array(lo) / self.scales
        self.hi = np.array(hi) / self.scales
        self.sqrt_w = np.sqrt(data.weight)
        self.nfev = 0

    def values(self, x):
        vals = dict(self.cfg.initial)
        vals.update(zip(self.free, np.asarray(x) * self.scales))
        return vals

    def model_branches(self, vals):
        m = self.model.with_params(e_c=vals["e_c"], e_j_max=vals["e_j_max"],
                                   f_r=vals["f_r"], g=vals["g"])
        flux = (self.data.sweep_value - vals["flux_offset"]) / vals["flux_period"]
        uniq, inverse = np.unique(flux, return_inverse=True)
        b = branches(m, uniq)
        return {k: v[inverse] for k, v in b.items()}

    def assign(self, vals):
        b = self.model_branches(vals)
        out = []
        for i, hint in enumerate(self.data.branch):
            if hint is not None:
                if hint not in b:
                    raise DomainError(f"unknown branch hint {hint!r}",
                                      module="fitting", field="branch")
                out.append(hint)
            else:
                cands = [n for n in NEAREST_BRANCHES if n in b]
                dist = [abs(b[n][i] - self.data.frequency[i]) for n in cands]
                out.append(cands[int(np.argmin(dist))])
        return tuple(out)

    def residuals(self, x, assignment):
        self.nfev += 1
        vals = self.values(x)
        try:
            b = self.model_branches(vals)
        except DomainError:
            return np.full(len(self.data), 1e12)
        model = np.array([b[name][i] for i, name in enumerate(assignment)])
        return self.sqrt_w * (model - self.data.frequency)


def _check_coverage(problem, vals):
    """Warn when data cannot pin the coupling or sit unhinted at the crossing."""
    b = problem.model_branches(vals)
    side = np.sign(b["ge"] - b["cavity"])
    if np.all(side > 0) or np.all(side < 0):
        warnings.warn("all data on one side of the crossing: g weakly "
                      "constrained", FitWarning, stacklevel=3)
    gap = b["upper"] - b["lower"]
    unhinted = np.array([h is None for h in problem.data.branch])
    if np.any(unhinted & (gap < 2 * np.min(gap))):
        warnings.warn("unhinted points within twice the splitting of the "
                      "crossing; nearest-branch assignment may swap branches",
                      FitWarning, stacklevel=3)


def _run_least_squares(problem, x0, assignment):
    res = least_squares(problem.residuals, x0, args=(assignment,),
                        bounds=(problem.lo, problem.hi), method="trf",
                        x_scale=1.0, ftol=problem.cfg.tolerance,
                        xtol=problem.cfg.tolerance, gtol=problem.cfg.tolerance,
                        max_nfev=problem.cfg.max_evals)
    return res.x, res.status > 0, res.message


def _run_simplex(problem, x0, assignment):
    def cost(x):
        x = np.clip(x, problem.lo, problem.hi)
        r = problem.residuals(x, assignment)
        return float(r @ r)

    rng = np.random.default_rng(problem.cfg.seed)
    starts = [x0] + [np.clip(x0 * (1 + 0.02 * rng.standard_normal(x0.size)),
                             problem.lo, problem.hi)
                     for _ in range(problem.cfg.restarts)]
    best = None
    for start in starts:
        res = minimize(cost, start, method="Nelder-Mead",
                       options={"xatol": problem.cfg.tolerance,
                                "fatol": problem.cfg.tolerance * cost(start),
                                "maxfev": problem.cfg.max_evals,
                                "adaptive": True})
        if best is None or res.fun < best.fun:
            best = res
    # polish from the best vertex
    res = minimize(cost, best.x, method="Nelder-Mead",
                   options={"xatol": problem.cfg.tolerance,
                            "fatol": problem.cfg.tolerance * max(best.fun, 1.0),
                            "maxfev": problem.cfg.max_evals, "adaptive": True})
    if res.fun > best.fun:
        res = best
    return np.clip(res.x, problem.lo, problem.hi), bool(res.success), res.message


def fit(data, cfg, model):
    """Fit model transition frequencies to peak positions.

    Each datum is compared with the branch named by its hint, or else with
    the nearest of ``lower``/``upper``/``ef`` at the current parameters.
    Assignments are held fixed during a minimization and re-derived after
    it; the cycle repeats until they stop changing (at most three times).

    Parameters
    ----------
    data : PeakData
    cfg : FitConfig
    model : ModelConfig
        Cutoffs and tier; its parameters are replaced by the fit values.

    Returns
    -------
    FitResult
        ``converged`` is False when the optimizer hit its evaluation cap; the
        best parameters found are still returned.
    """
    if model.tier is Tier.EXACT_MULTIMODE:
        raise DomainError("multimode models are not parametrized by the fit "
                          "parameters", module="fitting", field="tier")
    if len(data) < 1:
        raise DomainError("no data", module="fitting", field="points")
    problem = _Problem(data, cfg, model)
    run = _run_least_squares if cfg.method == "least_squares" else _run_simplex
    x = problem.x0
    _check_coverage(problem, problem.values(x))
    assignment = problem.assign(problem.values(x))
    converged, message = False, ""
    for _ in range(3):
        x, converged, message = run(problem, x, assignment)
        new = problem.assign(problem.values(x))
        if new == assignment:
            break
        assignment = new
    vals = problem.values(x)
    resid = problem.residuals(x, assignment) / problem.sqrt_w
    derived = None
    if cfg.c_j is not None and cfg.c_c is not None:
        derived = extract_circuit(vals["f_r"], vals["g"], cfg.c_j, cfg.c_c,
                                  cfg.f_a_at_resonance)
    return FitResult(params={k: float(v) for k, v in vals.items()},
                     residual_rms=float(np.sqrt(np.mean(resid**2))),
                     residuals=resid, assignments=assignment,
                     converged=converged, n_evaluations=problem.nfev,
                     message=str(message), derived_circuit=derived)


def default_axis(flux_offset=0.0, flux_period=1.0, n=61, span=0.47):
    """Symmetric raw sweep through the sweet spot and both crossings."""
    return FluxAxis.from_flux(np.linspace(-span, span, n), flux_offset, flux_period)
