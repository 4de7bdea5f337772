"""Coupled Transmon-resonator Hamiltonian in three tiers.

``duffing_single``
    Duffing Transmon, one mode, coupling g(phi) (b + b^dag)(a + a^dag).
``exact_single``
    Charge-basis box eigenstates |k>, one mode, sum_kl g_kl |k><l| (a + a^dag)
    with g_kl proportional to <k|n|l>.
``exact_multimode``
    Exact box coupled to the first ``n_modes`` Foster modes of the resonator.
    Quantized from the full capacitance matrix of the network (junction node
    plus one branch flux per mode), so each mode's coupling comes from its own
    zero-point charge and the modes also couple to one another through C_c.
    With one mode it reduces to ``exact_single`` built from the same circuit.

Product basis ordering: Transmon index slowest, then modes ascending, each
mode with Fock states 0..n_ph-1. Everything is in hertz.

Single-mode tiers are parametrized by :class:`HamiltonianParams`, where ``g``
is the on-resonance 0-1 coupling: the coupling prefactor is fixed so that
|g_01| = g at the Josephson energy where the tier's own bare Transmon 0-1
transition equals ``f_r``. Away from that point g_01 follows the Transmon
charge matrix element (roughly E_J^(1/4)).
"""

import enum
import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import circuit as cc
from .constants import E_CHARGE, HBAR, PLANCK_H
from .cpb import (DEFAULT_N_CUT, cpb_batch, duffing_charge_scale,
                  duffing_levels, josephson_for_frequency)
from .errors import DomainError
from .foster import Topology, decompose, keep_series_capacitance, line_from_lc

DEFAULT_MAX_DIM = 20_000
# Elements per batched eigh call, to bound memory in sweeps.
_CHUNK_ELEMENTS = 4_000_000


class Tier(str, enum.Enum):
    DUFFING_SINGLE = "duffing_single"
    EXACT_SINGLE = "exact_single"
    EXACT_MULTIMODE = "exact_multimode"


@dataclass(frozen=True)
class HamiltonianParams:
    """Fit-level parameters: E_c, E_J,max, resonator f_r, on-resonance g."""

    e_c: float
    e_j_max: float
    f_r: float
    g: float
    flux: float = 0.0

    def __post_init__(self):
        for name in ("e_c", "e_j_max", "f_r"):
            if not getattr(self, name) > 0:
                raise DomainError("must be strictly positive",
                                  module="rabi_hamiltonian", field=name)
        if not self.g >= 0:
            raise DomainError("must be non-negative", module="rabi_hamiltonian",
                              field="g")

    @property
    def e_j(self):
        return cc.josephson_energy(self.e_j_max, self.flux)

    @classmethod
    def from_circuit(cls, p, n_cut=DEFAULT_N_CUT):
        """Hamiltonian parameters implied by a circuit.

        E_c comes from C_J,eff and f_r from C_r,eff; ``g`` is the exact-box
        0-1 coupling at resonance, so the ``exact_single`` tier built from
        these parameters uses exactly the circuit's coupling prefactor.
        """
        _, c_j_eff, c_r_eff = cc.effective_capacitances(p)
        e_c = cc.charging_energy(c_j_eff)
        f_r = cc.resonator_frequency(p.l_r, c_r_eff)
        n01 = _resonant_matrix_element(e_c, f_r, True, n_cut)
        return cls(e_c=e_c, e_j_max=p.e_j_max, f_r=f_r,
                   g=float(cc.charge_coupling(p) * n01), flux=p.flux)


@dataclass(frozen=True)
class ModelConfig:
    tier: Tier = Tier.EXACT_SINGLE
    params: HamiltonianParams | None = None
    circuit: cc.CircuitParams | None = None
    k_levels: int = 6
    n_ph: int = 8
    n_modes: int = 1
    n_cut: int = DEFAULT_N_CUT
    rwa: bool = False
    max_dim: int = DEFAULT_MAX_DIM
    series_c_threshold: float = 5.0

    def __post_init__(self):
        object.__setattr__(self, "tier", Tier(self.tier))
        if self.params is None:
            if self.circuit is None:
                raise DomainError("needs params or circuit",
                                  module="rabi_hamiltonian", field="params")
            object.__setattr__(self, "params",
                               HamiltonianParams.from_circuit(self.circuit, self.n_cut))
        if self.k_levels < 2:
            raise DomainError("must be >= 2", module="rabi_hamiltonian",
                              field="k_levels")
        if self.n_ph < 2:
            raise DomainError("must be >= 2", module="rabi_hamiltonian",
                              field="n_ph")
        if self.n_modes < 1:
            raise DomainError("must be >= 1", module="rabi_hamiltonian",
                              field="n_modes")
        if self.tier is Tier.EXACT_MULTIMODE:
            if self.circuit is None:
                raise DomainError("the multimode tier needs circuit parameters",
                                  module="rabi_hamiltonian", field="circuit")
        elif self.n_modes != 1:
            raise DomainError(f"tier {self.tier.value} has a single mode",
                              module="rabi_hamiltonian", field="n_modes")
        if self.tier is not Tier.DUFFING_SINGLE and self.k_levels > 2 * self.n_cut:
            raise DomainError("k_levels exceeds the charge basis",
                              module="rabi_hamiltonian", field="k_levels")
        if self.dim > self.max_dim:
            n_ok = int((self.max_dim / self.k_levels) ** (1 / self.n_modes))
            raise DomainError(
                f"dimension {self.dim} exceeds the cap {self.max_dim}; try "
                f"n_ph <= {n_ok} with k_levels={self.k_levels}, or fewer modes",
                module="rabi_hamiltonian", field="n_ph")

    @property
    def dim(self):
        return self.k_levels * self.n_ph**self.n_modes

    @property
    def flux(self):
        return self.params.flux

    def with_flux(self, flux):
        circuit = self.circuit
        if circuit is not None:
            circuit = replace(circuit, flux=flux)
        return replace(self, params=replace(self.params, flux=flux),
                       circuit=circuit)

    def with_params(self, **changes):
        return replace(self, params=replace(self.params, **changes))

    def e_j_at(self, fluxes):
        e_j_max = (self.circuit.e_j_max if self.tier is Tier.EXACT_MULTIMODE
                   else self.params.e_j_max)
        return np.abs(e_j_max * np.cos(np.pi * np.asarray(fluxes, dtype=float)))


@dataclass(frozen=True)
class CouplingSet:
    """Per-mode coupling rates ``g_kl[p, k, l]`` (hertz), mode frequencies and
    mode-mode couplings (hertz, multiplying x_p x_q)."""

    g_kl: np.ndarray
    mode_frequencies: np.ndarray
    mode_coupling: np.ndarray
    e_c: float


@dataclass(frozen=True)
class SpectrumResult:
    eigenfrequencies: np.ndarray
    labels: list
    transitions_from_ground: np.ndarray
    transitions_from_excited: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    def index(self, label):
        """Eigenstate index whose dominant bare state is ``label``."""
        label = tuple(label)
        for i, lab in enumerate(self.labels):
            if lab == label:
                return i
        raise KeyError(label)

    def energy(self, label):
        return self.eigenfrequencies[self.index(label)]


@functools.lru_cache(maxsize=256)
def _resonant_matrix_element(e_c, f_r, exact, n_cut):
    e_j = josephson_for_frequency(e_c, f_r, exact=exact, n_cut=n_cut)
    if exact:
        return abs(cpb_batch(e_c, e_j, n_cut, 2)[1][0, 0, 1])
    return duffing_charge_scale(e_c, e_j)


def coupling_prefactor(params, tier, n_cut=DEFAULT_N_CUT):
    """Hertz per unit charge matrix element for a single-mode tier."""
    exact = Tier(tier) is not Tier.DUFFING_SINGLE
    return params.g / _resonant_matrix_element(params.e_c, params.f_r, exact, n_cut)


@dataclass(frozen=True)
class _Multimode:
    e_c: float
    frequencies: np.ndarray
    prefactors: np.ndarray
    mode_coupling: np.ndarray


def multimode_parameters(p, n_modes, series_c_threshold=5.0):
    """Transmon charging energy, mode frequencies, per-mode coupling
    prefactors and mode-mode couplings for the Foster-ladder network."""
    line = line_from_lc(p.c_r, p.l_r, Topology.HALF_WAVE)
    modes = decompose(line, n_modes)
    c_c = p.c_c
    if keep_series_capacitance(modes.series_c, c_c, series_c_threshold):
        c_c = c_c * modes.series_c / (c_c + modes.series_c)
    n = n_modes + 1
    cap = np.full((n, n), c_c)
    cap[0, :] = -c_c
    cap[:, 0] = -c_c
    cap[0, 0] = p.c_j + c_c
    for i, m in enumerate(modes.modes, start=1):
        cap[i, i] = m.c + c_c
    inv = np.linalg.inv(cap)
    e_c = E_CHARGE**2 * inv[0, 0] / (2 * PLANCK_H)
    l_p = np.array([m.l for m in modes.modes])
    c_tilde = 1 / np.diag(inv)[1:]
    freqs = 1 / (2 * np.pi * np.sqrt(l_p * c_tilde))
    q_zpf = np.sqrt(HBAR / 2 * np.sqrt(c_tilde / l_p))
    prefactors = 2 * E_CHARGE * inv[0, 1:] * q_zpf / PLANCK_H
    mode_coupling = inv[1:, 1:] * np.outer(q_zpf, q_zpf) / PLANCK_H
    np.fill_diagonal(mode_coupling, 0.0)
    return _Multimode(e_c=e_c, frequencies=freqs, prefactors=prefactors,
                      mode_coupling=mode_coupling)


def _transmon_terms(cfg, fluxes):
    """Bare Transmon levels (N, K), per-mode g_kl (P, N, K, K), mode
    frequencies (P,) and mode-mode couplings (P, P)."""
    e_j = cfg.e_j_at(fluxes)
    k = cfg.k_levels
    p = cfg.params
    if cfg.tier is Tier.DUFFING_SINGLE:
        eps = np.stack([duffing_levels(p.e_c, ej, k) for ej in e_j])
        b = np.diag(np.sqrt(np.arange(1, k)), 1)
        scale = coupling_prefactor(p, cfg.tier) * duffing_charge_scale(p.e_c, e_j)
        g_kl = scale[:, None, None] * (b + b.T)[None]
        return eps, g_kl[None], np.array([p.f_r]), np.zeros((1, 1))
    if cfg.tier is Tier.EXACT_SINGLE:
        eps, n_el, _, _ = cpb_batch(p.e_c, e_j, cfg.n_cut, k)
        g_kl = coupling_prefactor(p, cfg.tier, cfg.n_cut) * n_el
        return eps, g_kl[None], np.array([p.f_r]), np.zeros((1, 1))
    mm = multimode_parameters(cfg.circuit, cfg.n_modes, cfg.series_c_threshold)
    eps, n_el, _, _ = cpb_batch(mm.e_c, e_j, cfg.n_cut, k)
    g_kl = mm.prefactors[:, None, None, None] * n_el[None]
    return eps, g_kl, mm.frequencies, mm.mode_coupling


def coupling_set(cfg):
    """Coupling rates between Transmon eigenstates at the config's flux."""
    if cfg.tier is Tier.DUFFING_SINGLE:
        raise DomainError("coupling sets are defined for the exact tiers only",
                          module="rabi_hamiltonian", field="tier")
    eps, g_kl, freqs, mode_coupling = _transmon_terms(cfg, [cfg.flux])
    e_c = (cfg.params.e_c if cfg.tier is Tier.EXACT_SINGLE else
           multimode_parameters(cfg.circuit, cfg.n_modes, cfg.series_c_threshold).e_c)
    return CouplingSet(g_kl=g_kl[:, 0], mode_frequencies=freqs,
                       mode_coupling=mode_coupling, e_c=e_c)


def _ladder(n_ph):
    return np.diag(np.sqrt(np.arange(1, n_ph)), 1)


def _embed(op, index, n_modes, n_ph):
    out = np.ones((1, 1))
    for q in range(n_modes):
        out = np.kron(out, op if q == index else np.eye(n_ph))
    return out


def _tkron(t_ops, ph_op):
    # (N, K, K) x (D, D) -> (N, K*D, K*D), Transmon index slowest
    n, k, _ = t_ops.shape
    d = ph_op.shape[0]
    return np.einsum("nij,ab->niajb", t_ops, ph_op).reshape(n, k * d, k * d)


def _assemble_batch(cfg, fluxes):
    eps, g_kl, freqs, mode_coupling = _transmon_terms(cfg, fluxes)
    n_modes, n_ph = cfg.n_modes, cfg.n_ph
    npts, k = eps.shape
    d_ph = n_ph**n_modes
    a = _ladder(n_ph)
    eye_t = np.broadcast_to(np.eye(k), (npts, k, k))
    diag_t = eps[:, :, None] * np.eye(k)[None]

    h = _tkron(diag_t, np.eye(d_ph))
    ph = np.zeros((d_ph, d_ph))
    for m in range(n_modes):
        ph += freqs[m] * _embed(a.T @ a, m, n_modes, n_ph)
        for q in range(m + 1, n_modes):
            am, aq = _embed(a, m, n_modes, n_ph), _embed(a, q, n_modes, n_ph)
            if cfg.rwa:
                ph += mode_coupling[m, q] * (am.T @ aq + aq.T @ am)
            else:
                ph += mode_coupling[m, q] * (am + am.T) @ (aq + aq.T)
    h += _tkron(eye_t, ph)

    for m in range(n_modes):
        am = _embed(a, m, n_modes, n_ph)
        if cfg.rwa:
            # keep |k><k+1| a^dag + h.c. only: excitation-number conserving
            lower = np.zeros_like(g_kl[m])
            idx = np.arange(k - 1)
            lower[:, idx, idx + 1] = g_kl[m][:, idx, idx + 1]
            h += _tkron(lower, am.T)
            h += _tkron(np.swapaxes(lower, 1, 2), am)
        else:
            h += _tkron(g_kl[m], am + am.T)
    return h


def assemble(cfg):
    """Hamiltonian matrix (hertz) in the product basis at the config's flux."""
    return _assemble_batch(cfg, [cfg.flux])[0]


def bare_energies(cfg, flux=None):
    """Uncoupled energies of every product basis state, in basis order."""
    flux = cfg.flux if flux is None else flux
    eps, _, freqs, _ = _transmon_terms(cfg, [flux])
    out = eps[0]
    for f in freqs:
        photons = f * np.arange(cfg.n_ph)
        out = (out[:, None] + photons[None, :]).ravel()
    return out


def basis_labels(cfg):
    """Tuples (k, m_1, ..., m_P) in basis order."""
    shape = (cfg.k_levels,) + (cfg.n_ph,) * cfg.n_modes
    return [tuple(int(i) for i in idx) for idx in np.ndindex(*shape)]


def basis_index(cfg, label):
    shape = (cfg.k_levels,) + (cfg.n_ph,) * cfg.n_modes
    return int(np.ravel_multi_index(tuple(label), shape))


def eig_batch(cfg, fluxes):
    """Eigenvalues (referenced to the ground state) and eigenvectors for an
    array of fluxes; chunked to bound memory."""
    fluxes = np.atleast_1d(np.asarray(fluxes, dtype=float))
    chunk = max(1, _CHUNK_ELEMENTS // cfg.dim**2)
    ws, vs = [], []
    for start in range(0, fluxes.size, chunk):
        w, v = np.linalg.eigh(_assemble_batch(cfg, fluxes[start:start + chunk]))
        ws.append(w - w[:, :1])
        vs.append(v)
    return np.concatenate(ws), np.concatenate(vs)


def _labels(cfg, vecs, bare):
    order = np.argsort(bare, kind="stable")
    weights = np.abs(vecs[order, :]) ** 2
    dominant = order[np.argmax(weights, axis=0)]
    basis = basis_labels(cfg)
    return [basis[i] for i in dominant]


def diagonalize(cfg):
    """Full dense diagonalization at the config's flux.

    Labels are the bare product state of largest squared overlap, ties going
    to the lower bare energy. ``transitions_from_excited`` is measured from
    the state labelled (1, 0, ..., 0), the qubit-like first excited state,
    and lists only the states above it.
    """
    w, v = eig_batch(cfg, [cfg.flux])
    w, v = w[0], v[0]
    labels = _labels(cfg, v, bare_energies(cfg))
    first = (1,) + (0,) * cfg.n_modes
    try:
        e1 = w[labels.index(first)]
    except ValueError:
        e1 = math.nan
    above = w[w > e1] - e1 if math.isfinite(e1) else np.array([])
    return SpectrumResult(eigenfrequencies=w, labels=labels,
                          transitions_from_ground=w[1:],
                          transitions_from_excited=above,
                          eigenvectors=v)


def branches(cfg, fluxes):
    """Named transition branches for an array of fluxes.

    ``lower``/``upper`` are the two eigenstates carrying most of the weight of
    {|e,0>, |g,1>} (the polaritons), ordered by energy. ``ge`` and ``cavity``
    are the states of largest overlap with |e,0> and |g,1>; ``ef`` is the
    transition from the ``ge`` state to the state of largest overlap with
    |f,0>. The ``*_weight`` entries give those overlaps.
    """
    w, v = eig_batch(cfg, fluxes)
    zeros = (0,) * (cfg.n_modes - 1)
    i_e0 = basis_index(cfg, (1, 0) + zeros)
    i_g1 = basis_index(cfg, (0, 1) + zeros)
    w_e = np.abs(v[:, i_e0, :]) ** 2
    w_g = np.abs(v[:, i_g1, :]) ** 2
    rows = np.arange(w.shape[0])
    ge = np.argmax(w_e, axis=1)
    cav = np.argmax(w_g, axis=1)
    pol = np.sort(np.argsort(w_e + w_g, axis=1)[:, -2:], axis=1)
    out = {
        "lower": w[rows, pol[:, 0]],
        "upper": w[rows, pol[:, 1]],
        "ge": w[rows, ge],
        "cavity": w[rows, cav],
        "ge_weight": w_e[rows, ge],
        "cavity_weight": w_g[rows, cav],
    }
    if cfg.k_levels > 2:
        i_f0 = basis_index(cfg, (2, 0) + zeros)
        w_f = np.abs(v[:, i_f0, :]) ** 2
        f = np.argmax(w_f, axis=1)
        out["ef"] = w[rows, f] - w[rows, ge]
        out["ef_weight"] = w_f[rows, f]
    return out
