"""Foster equivalent of a lossless transmission-line resonator.

A lambda/2 line open at both ends is a series capacitance followed by a
ladder of parallel LC modes at every harmonic p f_1 with equal capacitance
and impedance 2 Z_0 / (p pi). A shorted lambda/4 line keeps odd harmonics
only, with impedance 4 Z_0 / (h pi) for harmonic h and no series capacitance.

Note that the fundamental ``f_1`` here is the *bare* line frequency
1/(2pi sqrt(L_1 C_1)); the frequency that enters the Hamiltonian is the
loaded one, computed with C_r,eff (see :mod:`transmon_cqed.circuit`).
"""

import enum
import math
from dataclasses import dataclass

from .errors import DomainError, require_positive


class Topology(str, enum.Enum):
    HALF_WAVE = "half_wave"
    QUARTER_WAVE = "quarter_wave"
    LUMPED = "lumped"


# Z_0 = factor * Z_eq, with Z_eq = sqrt(L_1/C_1) the fundamental-mode impedance.
_Z0_PER_ZEQ = {
    Topology.HALF_WAVE: math.pi / 2,
    Topology.QUARTER_WAVE: math.pi / 4,
    Topology.LUMPED: 1.0,
}


@dataclass(frozen=True)
class LineSpec:
    z_0: float
    f_1: float
    topology: Topology = Topology.HALF_WAVE

    def __post_init__(self):
        require_positive("foster", z_0=self.z_0, f_1=self.f_1)
        object.__setattr__(self, "topology", Topology(self.topology))
        if self.topology is Topology.LUMPED:
            raise DomainError("a line must be half_wave or quarter_wave",
                              module="foster", field="topology")


@dataclass(frozen=True)
class FosterMode:
    harmonic: int
    f: float
    z: float
    c: float
    l: float


@dataclass(frozen=True)
class FosterModes:
    series_c: float | None
    modes: tuple

    def __len__(self):
        return len(self.modes)

    def __getitem__(self, i):
        return self.modes[i]


def _mode_capacitance(spec):
    w1 = 2 * math.pi * spec.f_1
    if spec.topology is Topology.HALF_WAVE:
        return math.pi / (2 * w1 * spec.z_0)
    return math.pi / (4 * w1 * spec.z_0)


def decompose(spec, n_modes):
    """Series capacitance plus the first ``n_modes`` LC modes of ``spec``."""
    if int(n_modes) != n_modes or n_modes < 1:
        raise DomainError(f"need at least one mode, got {n_modes!r}",
                          module="foster", field="n_modes")
    c = _mode_capacitance(spec)
    if spec.topology is Topology.HALF_WAVE:
        harmonics = range(1, n_modes + 1)
        series_c = c
        z_scale = 2 * spec.z_0 / math.pi
    else:
        harmonics = range(1, 2 * n_modes, 2)
        series_c = None
        z_scale = 4 * spec.z_0 / math.pi
    modes = []
    for h in harmonics:
        f = h * spec.f_1
        l = 1 / ((2 * math.pi * f) ** 2 * c)
        modes.append(FosterMode(harmonic=h, f=f, z=z_scale / h, c=c, l=l))
    return FosterModes(series_c=series_c, modes=tuple(modes))


def line_from_lc(c_r, l_r, topology=Topology.HALF_WAVE):
    """Line whose fundamental Foster mode is the LC pair (c_r, l_r)."""
    require_positive("foster", c_r=c_r, l_r=l_r)
    topology = Topology(topology)
    z_eq = math.sqrt(l_r / c_r)
    f_1 = 1 / (2 * math.pi * math.sqrt(l_r * c_r))
    return LineSpec(z_0=_Z0_PER_ZEQ[topology] * z_eq, f_1=f_1, topology=topology)


def z0_from_zeq(z_eq, topology):
    """Characteristic impedance realising a fundamental-mode impedance."""
    return _Z0_PER_ZEQ[Topology(topology)] * z_eq


def keep_series_capacitance(series_c, c_c, threshold=5.0):
    """Whether a series capacitance matters next to the coupling capacitor.

    It is dropped (returns False) once it exceeds ``threshold`` times ``c_c``,
    because the two act in series and the small one dominates.
    """
    if series_c is None:
        return False
    return series_c <= threshold * c_c
