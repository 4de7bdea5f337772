"""Command-line front end.

Configuration files are flat JSON objects whose physical quantities carry
their unit in the key (``c_j_fF``, ``l_r_nH``, ``e_j_max_GHz``, ...). Values
are converted to SI once, here, and everything downstream works in farad,
henry and hertz.

Exit codes: 0 success, 1 bad usage or configuration, 2 domain error,
3 fit did not converge.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
import warnings

import numpy as np

from . import circuit as cc
from . import constants
from .design import DesignPoint, evaluate, scan_coupling
from .errors import DomainError
from .fitting import FitConfig, PARAM_NAMES, PeakData, extract_circuit, fit, synth_peaks
from .foster import LineSpec, Topology, decompose, keep_series_capacitance, line_from_lc
from .hamiltonian import HamiltonianParams, ModelConfig, Tier, diagonalize
from .spectroscopy import FluxAxis, avoided_crossing, flux_sweep

CSV_SCHEMA_VERSION = 1

# decimal exponent of each unit; converting by 10**k (or dividing by 10**-k)
# keeps values like 9 fF correctly rounded
UNITS = {
    "fF": -15, "pF": -12, "F": 0,
    "nH": -9, "H": 0,
    "Hz": 0, "kHz": 3, "MHz": 6, "GHz": 9,
    "ohm": 0,
}
DIMENSIONS = {
    "capacitance": ("fF", "pF", "F"),
    "inductance": ("nH", "H"),
    "frequency": ("Hz", "kHz", "MHz", "GHz"),
    "impedance": ("ohm",),
}
QUANTITIES = {
    "c_j": "capacitance", "c_c": "capacitance", "c_r": "capacitance",
    "l_r": "inductance",
    "e_c": "frequency", "e_j_max": "frequency", "f_r": "frequency",
    "g": "frequency", "target_f": "frequency", "noise": "frequency",
    "f_1": "frequency", "z_0": "impedance",
}
PLAIN_KEYS = {
    "flux": float, "flux_offset": float, "flux_period": float,
    "tier": str, "k_levels": int, "n_ph": int, "n_modes": int, "n_cut": int,
    "rwa": bool, "topology": str, "series_c_threshold": float,
    "free_params": list, "method": str, "max_evals": int, "tolerance": float,
    "restarts": int, "quoted_g_bar": float, "flux_range": str, "seed": int,
}
SCAN_KEYS = ("c_j", "c_c", "c_r")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# configuration ---------------------------------------------------------

def _split_unit(key):
    base, _, unit = key.rpartition("_")
    if base and unit in UNITS:
        return base, unit
    return key, None


def _to_si(value, unit):
    k = UNITS[unit]
    return float(value) * 10.0**k if k >= 0 else float(value) / 10.0**-k


def resolve_config(raw):
    """Unit-suffixed JSON object -> dict of SI values keyed by bare name.

    Scan lists are given as ``scan_<name>_<unit>`` and come back under
    ``scan_<name>``.
    """
    out = {}
    for key, value in raw.items():
        base, unit = _split_unit(key)
        scan = base.startswith("scan_")
        name = base[5:] if scan else base
        if name in QUANTITIES and (not scan or name in SCAN_KEYS):
            if unit is None:
                raise UsageError(f"config key {key!r} needs a unit suffix, "
                                 f"one of {DIMENSIONS[QUANTITIES[name]]}")
            if unit not in DIMENSIONS[QUANTITIES[name]]:
                raise UsageError(f"config key {key!r}: {unit} is not a "
                                 f"{QUANTITIES[name]} unit")
            try:
                if scan:
                    value = [_to_si(v, unit) for v in value]
                else:
                    value = _to_si(value, unit)
            except (TypeError, ValueError):
                raise UsageError(f"config key {key!r}: not a number") from None
            out[base] = value
        elif unit is None and key in PLAIN_KEYS:
            kind = PLAIN_KEYS[key]
            if kind is float:
                value = float(value)
            elif kind is int:
                if int(value) != value:
                    raise UsageError(f"config key {key!r}: not an integer")
                value = int(value)
            elif not isinstance(value, kind):
                raise UsageError(f"config key {key!r}: expected {kind.__name__}")
            out[key] = value
        else:
            raise UsageError(f"unknown config key {key!r}")
    return out


def load_config(path, overrides=()):
    raw = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(raw, dict):
            raise UsageError(f"{path}: top level must be an object")
    for item in overrides:
        key, sep, text = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects key=value, got {item!r}")
        try:
            raw[key.strip()] = json.loads(text)
        except json.JSONDecodeError:
            raw[key.strip()] = text
    return raw, resolve_config(raw)


def config_hash(raw):
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _need(cfg, *names):
    missing = [n for n in names if n not in cfg]
    if missing:
        raise UsageError(f"config is missing {', '.join(missing)}")
    return [cfg[n] for n in names]


def _has(cfg, *names):
    return all(n in cfg for n in names)


def circuit_from(cfg):
    if not _has(cfg, "c_j", "c_c", "c_r", "l_r", "e_j_max"):
        return None
    return cc.CircuitParams(c_j=cfg["c_j"], c_c=cfg["c_c"], c_r=cfg["c_r"],
                            l_r=cfg["l_r"], e_j_max=cfg["e_j_max"],
                            flux=cfg.get("flux", 0.0))


def hamiltonian_from(cfg):
    if not _has(cfg, "e_c", "e_j_max", "f_r", "g"):
        return None
    return HamiltonianParams(e_c=cfg["e_c"], e_j_max=cfg["e_j_max"],
                             f_r=cfg["f_r"], g=cfg["g"],
                             flux=cfg.get("flux", 0.0))


def model_from(cfg, tier=None, n_modes=None):
    tier = Tier(tier or cfg.get("tier", Tier.EXACT_SINGLE.value))
    circuit = circuit_from(cfg)
    params = hamiltonian_from(cfg)
    if params is None and circuit is None:
        raise UsageError("config needs e_c/e_j_max/f_r/g or a full circuit "
                         "(c_j, c_c, c_r, l_r, e_j_max)")
    if n_modes is None:
        n_modes = cfg.get("n_modes", 1) if tier is Tier.EXACT_MULTIMODE else 1
    return ModelConfig(tier=tier, params=params, circuit=circuit,
                       k_levels=cfg.get("k_levels", 6), n_ph=cfg.get("n_ph", 8),
                       n_modes=n_modes, n_cut=cfg.get("n_cut", 15),
                       rwa=cfg.get("rwa", False),
                       series_c_threshold=cfg.get("series_c_threshold", 5.0))


def parse_flux_range(text):
    parts = text.split(":")
    try:
        if len(parts) != 3:
            raise ValueError
        start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"--flux expects START:STOP:N, got {text!r}") from None
    if n < 1:
        raise UsageError("--flux needs N >= 1")
    return np.linspace(start, stop, n)


# output ----------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def header_lines(command, raw, cfg):
    lines = [f"command: {command}",
             f"config_sha256: {config_hash(raw)}",
             f"csv_schema: {CSV_SCHEMA_VERSION}"]
    for key in sorted(cfg):
        value = cfg[key]
        lines.append(f"{key}: {json.dumps(value) if isinstance(value, list) else _fmt(value)}")
    for key, value in constants.metadata().items():
        lines.append(f"{key}: {value}")
    return ["# " + ln for ln in lines]


def render_csv(header, columns, rows):
    buf = io.StringIO()
    for ln in header:
        buf.write(ln + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, raw, cfg, columns, rows):
    text = render_csv(header_lines(args.command, raw, cfg), columns, rows)
    if args.out:
        write_atomic(args.out, text)
    return text


# commands --------------------------------------------------------------

def cmd_params(args, raw, cfg, out):
    rows = []
    circuit = circuit_from(cfg)
    if circuit is not None:
        d = cc.derive(circuit)
        rows += [
            ("c_star_sq", d.c_star_sq, "F^2"),
            ("c_j_eff", d.c_j_eff, "F"),
            ("c_r_eff", d.c_r_eff, "F"),
            ("e_c", d.e_c, "Hz"),
            ("e_j", d.e_j, "Hz"),
            ("f_a", d.omega_a, "Hz"),
            ("f_r", d.omega_r, "Hz"),
            ("l_j", d.l_j, "H"),
            ("z_r_eff", d.z_r_eff, "ohm"),
            ("z_a_eff", d.z_a_eff, "ohm"),
            ("g", d.g, "Hz"),
            ("g_impedance", cc.coupling_rate_impedance(circuit), "Hz"),
            ("g_charge", cc.coupling_rate_charge(circuit), "Hz"),
            ("g_bar", cc.normalized_coupling(circuit), "1"),
        ]
    params = hamiltonian_from(cfg)
    if params is not None:
        e_j_res = (params.f_r + params.e_c) ** 2 / (8 * params.e_c)
        f_a_res = math.sqrt(8 * e_j_res * params.e_c)
        rows.append(("g_bar_resonant", params.g / math.sqrt(f_a_res * params.f_r),
                     "1"))
        if _has(cfg, "c_j", "c_c"):
            ex = extract_circuit(params.f_r, params.g, cfg["c_j"], cfg["c_c"])
            rows += [("extracted_c_r", ex.c_r, "F"), ("extracted_l_r", ex.l_r, "H"),
                     ("extracted_z_r", ex.z_r, "ohm"),
                     ("extracted_z_0", ex.z_0, "ohm")]
    if not rows:
        raise UsageError("params needs a circuit or Hamiltonian parameters")
    for name, value, unit in rows:
        print(f"{name:16s} {value:.6g} {unit}", file=out)
    _emit(args, raw, cfg, ("quantity", "value", "unit"), rows)
    return 0


def cmd_foster(args, raw, cfg, out):
    topology = Topology(cfg.get("topology", Topology.HALF_WAVE.value))
    if _has(cfg, "z_0", "f_1"):
        spec = LineSpec(z_0=cfg["z_0"], f_1=cfg["f_1"], topology=topology)
    else:
        c_r, l_r = _need(cfg, "c_r", "l_r")
        spec = line_from_lc(c_r, l_r, topology)
    n_modes = args.modes or cfg.get("n_modes", 3)
    fm = decompose(spec, n_modes)
    print(f"line: Z_0 = {spec.z_0:.6g} ohm, f_1 = {spec.f_1:.6g} Hz, "
          f"{spec.topology.value}", file=out)
    if fm.series_c is not None:
        line = f"series capacitance: {fm.series_c:.6g} F"
        if "c_c" in cfg:
            keep = keep_series_capacitance(fm.series_c, cfg["c_c"],
                                           cfg.get("series_c_threshold", 5.0))
            line += " (kept)" if keep else " (negligible next to C_c, dropped)"
        print(line, file=out)
    rows = [(m.harmonic, m.f, m.z, m.c, m.l) for m in fm.modes]
    for h, f, z, c, l in rows:
        print(f"mode {h}: f = {f:.6g} Hz  Z = {z:.6g} ohm  C = {c:.6g} F  "
              f"L = {l:.6g} H", file=out)
    _emit(args, raw, cfg, ("harmonic", "f_hz", "z_ohm", "c_f", "l_h"), rows)
    return 0


def cmd_spectrum(args, raw, cfg, out):
    model = model_from(cfg, args.tier, args.modes)
    if args.flux is not None:
        try:
            model = model.with_flux(float(args.flux))
        except ValueError:
            raise UsageError(f"--flux expects a number, got {args.flux!r}") from None
    res = diagonalize(model)
    n_show = min(args.levels, res.eigenfrequencies.size)
    rows = []
    for i in range(n_show):
        lab = res.labels[i]
        rows.append((i, lab[0], " ".join(str(n) for n in lab[1:]),
                     res.eigenfrequencies[i]))
        print(f"{i:3d}  |{lab[0]},{','.join(str(n) for n in lab[1:])}>  "
              f"{res.eigenfrequencies[i] / 1e9:.6f} GHz", file=out)
    _emit(args, raw, cfg, ("level", "transmon", "photons", "frequency_hz"), rows)
    return 0


def cmd_sweep(args, raw, cfg, out):
    model = model_from(cfg, args.tier, args.modes)
    flux_text = args.flux or cfg.get("flux_range", "0.30:0.45:601")
    axis = FluxAxis(parse_flux_range(flux_text))
    spec = flux_sweep(model, axis)
    for i, msg in spec.failures:
        print(f"warning: flux point {i} failed: {msg}", file=sys.stderr)
    names = ("lower", "upper", "ge", "cavity", "ef")
    _emit(args, raw, cfg, ("flux", "branch", "frequency_hz"), spec.rows(names))
    try:
        center, split = avoided_crossing(spec)
        print(f"avoided crossing: center {center / 1e9:.4f} GHz, splitting "
              f"{split / 1e6:.1f} MHz", file=out)
    except DomainError as exc:
        print(f"avoided crossing: {exc}", file=out)
    if args.peaks_out:
        offset = cfg.get("flux_offset", 0.0)
        period = cfg.get("flux_period", 1.0)
        raw_axis = FluxAxis.from_flux(axis.values, offset, period)
        noise = args.noise * 1e6 if args.noise is not None else cfg.get("noise", 0.0)
        peaks = synth_peaks(model, raw_axis, noise=noise, seed=args.seed)
        header = header_lines("sweep --peaks-out", raw, cfg)
        write_atomic(args.peaks_out, "\n".join(header) + "\n" + peaks.to_csv())
    return 0


def _fit_config(cfg):
    e_c, e_j_max, f_r, g = _need(cfg, "e_c", "e_j_max", "f_r", "g")
    initial = {"e_c": e_c, "e_j_max": e_j_max, "f_r": f_r, "g": g,
               "flux_offset": cfg.get("flux_offset", 0.0),
               "flux_period": cfg.get("flux_period", 1.0)}
    return FitConfig(initial=initial,
                     free_params=tuple(cfg.get("free_params", PARAM_NAMES)),
                     tolerance=cfg.get("tolerance", 1e-12),
                     max_evals=cfg.get("max_evals", 2000),
                     method=cfg.get("method", "least_squares"),
                     restarts=cfg.get("restarts", 0),
                     seed=cfg.get("seed", 0),
                     c_j=cfg.get("c_j"), c_c=cfg.get("c_c"))


def cmd_fit(args, raw, cfg, out):
    if not args.peaks:
        raise UsageError("fit needs --peaks PATH")
    try:
        data = PeakData.read_csv(args.peaks)
    except OSError as exc:
        raise UsageError(f"cannot read peaks: {exc}") from None
    fit_cfg = _fit_config(cfg)
    model = model_from(cfg, args.tier)
    result = fit(data, fit_cfg, model)
    units = {"e_c": "Hz", "e_j_max": "Hz", "f_r": "Hz", "g": "Hz",
             "flux_offset": "1", "flux_period": "1"}
    rows = [(name, result.params[name], units[name]) for name in PARAM_NAMES]
    rows.append(("residual_rms", result.residual_rms, "Hz"))
    ex = result.derived_circuit
    if ex is not None:
        rows += [("c_r", ex.c_r, "F"), ("l_r", ex.l_r, "H"), ("z_r", ex.z_r, "ohm"),
                 ("z_0", ex.z_0, "ohm")]
    for name, value, unit in rows:
        print(f"{name:14s} {value:.8g} {unit}", file=out)
    print(f"converged: {result.converged} ({result.n_evaluations} evaluations)",
          file=out)
    _emit(args, raw, cfg, ("parameter", "value", "unit"), rows)
    return 0 if result.converged else 3


def cmd_design(args, raw, cfg, out):
    target_f = _need(cfg, "target_f")[0]
    topology = cfg.get("topology", Topology.QUARTER_WAVE.value)
    if any(f"scan_{k}" in cfg for k in SCAN_KEYS):
        ranges = [cfg.get(f"scan_{k}", [cfg[k]] if k in cfg else []) for k in SCAN_KEYS]
        reports = scan_coupling(*ranges, target_f=target_f, topology=topology)
        top = reports[0]
        print(f"{len(reports)} points; best g_bar = {top.g_bar:.4f}", file=out)
        for line in top.lines():
            print("  " + line, file=out)
    else:
        c_j, c_c, c_r = _need(cfg, "c_j", "c_c", "c_r")
        report = evaluate(DesignPoint(c_j, c_c, c_r, target_f, topology),
                          quoted_g_bar=cfg.get("quoted_g_bar"))
        reports = [report]
        for line in report.lines():
            print(line, file=out)
    rows = [(r.point.c_j, r.point.c_c, r.point.c_r, r.g_bar, r.g,
             r.required_impedance, r.regime, r.e_j_over_e_c,
             int(r.transmon_ok)) for r in reports]
    _emit(args, raw, cfg, ("c_j_f", "c_c_f", "c_r_f", "g_bar", "g_hz", "z_0_ohm",
                           "regime", "e_j_over_e_c", "transmon_ok"), rows)
    return 0


COMMANDS = {
    "params": cmd_params,
    "foster": cmd_foster,
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "design": cmd_design,
}


def build_parser():
    parser = _Parser(prog="transmon-cqed",
                     description="Transmon coupled to a high-impedance resonator.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a configuration key")
        if name in ("spectrum", "sweep", "fit"):
            p.add_argument("--tier", choices=[t.value for t in Tier])
        if name in ("spectrum", "sweep", "foster"):
            p.add_argument("--modes", type=int)
        if name == "spectrum":
            p.add_argument("--flux", help="flux in flux quanta")
            p.add_argument("--levels", type=int, default=12)
        if name == "sweep":
            p.add_argument("--flux", help="START:STOP:N in flux quanta")
            p.add_argument("--peaks-out", help="also write synthetic peak CSV")
            p.add_argument("--noise", type=float, help="peak noise in MHz")
            p.add_argument("--seed", type=int, default=0)
        if name == "fit":
            p.add_argument("--peaks", help="peak CSV")
            p.add_argument("--seed", type=int)
    return parser


def run(argv=None, out=None):
    """Run one command; returns the exit code."""
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        raw, cfg = load_config(args.config, args.set)
        if getattr(args, "seed", None) is not None and args.command == "fit":
            cfg["seed"] = args.seed
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return COMMANDS[args.command](args, raw, cfg, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # enum lookups on config strings
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())
