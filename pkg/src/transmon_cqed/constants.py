"""Physical constants (CODATA 2018, exact in the 2019 SI)."""

import math

CODATA_VERSION = "CODATA 2018"

E_CHARGE = 1.602176634e-19  # C
PLANCK_H = 6.62607015e-34  # J s
HBAR = PLANCK_H / (2 * math.pi)
FLUX_QUANTUM = PLANCK_H / (2 * E_CHARGE)  # Wb, h/2e


def metadata():
    """Constants as a flat dict, for echoing into output headers."""
    return {
        "constants": CODATA_VERSION,
        "e_C": repr(E_CHARGE),
        "h_Js": repr(PLANCK_H),
    }
