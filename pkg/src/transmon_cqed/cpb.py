"""Cooper-pair box in the charge basis, and its Duffing approximation.

The box Hamiltonian 4 E_c n^2 - E_J cos(delta) at zero offset charge commutes
with charge parity n -> -n. It is diagonalized in the symmetrized basis

    even: |0>, (|n> + |-n>)/sqrt(2)      odd: (|n> - |-n>)/sqrt(2),   n >= 1

so each eigenstate has a definite parity, <k|n|l> vanishes exactly between
states of equal parity, and exactly degenerate pairs (E_J = 0) come out in a
fixed order: odd before even, which is the order they take for any E_J > 0.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

DEFAULT_N_CUT = 15
DEFAULT_K_LEVELS = 6
# Edge weight above which a retained eigenvector is considered truncated.
EDGE_TOL = 1e-8


@dataclass(frozen=True)
class CpbSpectrum:
    e_c: float
    e_j: float
    n_cut: int
    levels: np.ndarray
    n_elements: np.ndarray
    parity: np.ndarray
    converged: bool


def _check(e_c, n_cut, k_levels):
    if not e_c > 0:
        raise DomainError("must be strictly positive", module="cpb",
                          field="e_c")
    if n_cut < 1:
        raise DomainError("must be >= 1", module="cpb", field="n_cut")
    if k_levels < 1 or k_levels > 2 * n_cut:
        raise DomainError(f"k_levels={k_levels} does not fit a basis of "
                          f"{2 * n_cut + 1} charge states", module="cpb",
                          field="k_levels")


def _fix_sign(vecs):
    # Largest-magnitude component of every eigenvector made positive.
    idx = np.argmax(np.abs(vecs), axis=-2)
    pick = np.take_along_axis(vecs, idx[..., None, :], axis=-2)
    return vecs * np.where(pick < 0, -1.0, 1.0)


def cpb_batch(e_c, e_j, n_cut=DEFAULT_N_CUT, k_levels=DEFAULT_K_LEVELS):
    """Diagonalize the box for an array of Josephson energies.

    Returns ``(levels, n_elements, parity, edge_weight)`` with shapes
    ``(N, K)``, ``(N, K, K)``, ``(N, K)`` and ``(N,)``. Levels are referenced
    to the ground state; parity is +1 (even) or -1 (odd).
    """
    _check(e_c, n_cut, k_levels)
    e_j = np.atleast_1d(np.asarray(e_j, dtype=float))
    if np.any(e_j < 0):
        raise DomainError("must be non-negative", module="cpb", field="e_j")
    npts = e_j.size
    n = np.arange(n_cut + 1, dtype=float)

    even = np.zeros((npts, n_cut + 1, n_cut + 1))
    even[:, np.arange(n_cut + 1), np.arange(n_cut + 1)] = 4 * e_c * n**2
    off = np.full((npts, n_cut), -0.5) * e_j[:, None]
    off[:, 0] *= np.sqrt(2)
    even[:, np.arange(n_cut), np.arange(1, n_cut + 1)] = off
    even[:, np.arange(1, n_cut + 1), np.arange(n_cut)] = off

    odd = np.zeros((npts, n_cut, n_cut))
    odd[:, np.arange(n_cut), np.arange(n_cut)] = 4 * e_c * n[1:] ** 2
    off = np.full((npts, n_cut - 1), -0.5) * e_j[:, None]
    odd[:, np.arange(n_cut - 1), np.arange(1, n_cut)] = off
    odd[:, np.arange(1, n_cut), np.arange(n_cut - 1)] = off

    ev_e, vec_e = np.linalg.eigh(even)
    ev_o, vec_o = np.linalg.eigh(odd)
    vec_e = _fix_sign(vec_e)
    vec_o = _fix_sign(vec_o)

    vals = np.concatenate([ev_e, ev_o], axis=1)
    par = np.concatenate([np.ones(n_cut + 1), -np.ones(n_cut)])
    # odd first on exact ties
    order = np.lexsort((np.broadcast_to(par, vals.shape), vals), axis=1)[:, :k_levels]
    levels = np.take_along_axis(vals, order, axis=1)
    levels = levels - levels[:, :1]
    parity = par[order]

    # <even_i| n |odd_j> = sum_{m>=1} u_i[m] * m * v_j[m-1]
    cross = np.einsum("pmi,m,pmj->pij", vec_e[:, 1:, :], n[1:], vec_o)
    n_el = np.zeros((npts, k_levels, k_levels))
    n_even = n_cut + 1
    for a in range(k_levels):
        for b in range(k_levels):
            ia, ib = order[:, a], order[:, b]
            ea, eb = ia < n_even, ib < n_even
            val = np.zeros(npts)
            m = ea & ~eb
            val[m] = cross[m, ia[m], ib[m] - n_even]
            m = ~ea & eb
            val[m] = cross[m, ib[m], ia[m] - n_even]
            n_el[:, a, b] = val

    # weight of the retained states on the outermost charge states
    edge_e = np.abs(vec_e[:, -1, :]) ** 2
    edge_o = np.abs(vec_o[:, -1, :]) ** 2
    edge = np.take_along_axis(np.concatenate([edge_e, edge_o], axis=1),
                              order, axis=1).max(axis=1)
    return levels, n_el, parity, edge


def diagonalize_cpb(e_c, e_j, n_cut=DEFAULT_N_CUT, k_levels=DEFAULT_K_LEVELS):
    """Lowest ``k_levels`` box eigenfrequencies and charge matrix elements.

    Parameters
    ----------
    e_c, e_j : float
        Charging and Josephson energies, in hertz.
    n_cut : int
        The basis spans charge states -n_cut..n_cut.
    k_levels : int
        Number of eigenstates retained; at most ``2 * n_cut``.

    Returns
    -------
    CpbSpectrum
        ``levels[0] == 0``; ``n_elements[k, l] = <k|n|l>`` in Cooper pairs.
        ``converged`` is False when a retained state leaks onto the basis
        edge, in which case ``n_cut`` should be raised.
    """
    levels, n_el, parity, edge = cpb_batch(e_c, e_j, n_cut, k_levels)
    return CpbSpectrum(e_c=e_c, e_j=float(e_j), n_cut=n_cut, levels=levels[0],
                       n_elements=n_el[0], parity=parity[0].astype(int),
                       converged=bool(edge[0] < EDGE_TOL))


def duffing_levels(e_c, e_j, k_levels=DEFAULT_K_LEVELS):
    """Duffing-oscillator levels k f_a - (E_c/2) k (k-1)."""
    if not e_c > 0:
        raise DomainError("must be strictly positive", module="cpb",
                          field="e_c")
    f_a = np.sqrt(8 * e_j * e_c) - e_c
    k = np.arange(k_levels, dtype=float)
    return k * f_a - 0.5 * e_c * k * (k - 1)


def duffing_charge_scale(e_c, e_j):
    """(E_J / 32 E_c)^(1/4): the charge operator is this times (b + b^dag)."""
    return (e_j / (32 * e_c)) ** 0.25


def josephson_for_frequency(e_c, f_01, exact=True, n_cut=DEFAULT_N_CUT):
    """Josephson energy at which the box 0-1 transition equals ``f_01``.

    The exact transition grows monotonically from 4 E_c at E_J = 0, so
    targets below 4 E_c have no solution in the exact model.
    """
    if not exact:
        return (f_01 + e_c) ** 2 / (8 * e_c)
    if f_01 <= 4 * e_c:
        raise DomainError(f"0-1 frequency {f_01:.6g} Hz is below 4 E_c, the "
                          "exact box minimum", module="cpb", field="f_01")

    def gap(e_j):
        return cpb_batch(e_c, e_j, n_cut, 2)[0][0, 1] - f_01

    hi = max((f_01 + e_c) ** 2 / (8 * e_c), e_c) * 1.5
    while gap(hi) < 0:
        hi *= 2
    return brentq(gap, 0.0, hi, xtol=1e-12 * hi, rtol=1e-13)
