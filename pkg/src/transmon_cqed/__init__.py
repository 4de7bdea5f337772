"""Transmon qubit capacitively coupled to a high-impedance resonator:
circuit quantities, Foster modes, exact and Duffing Hamiltonians, flux-sweep
spectroscopy, spectral fitting and coupling design rules."""

from .circuit import CircuitParams, DerivedParams, derive
from .cpb import CpbSpectrum, diagonalize_cpb
from .design import DesignPoint, DesignReport, evaluate, scan_coupling
from .errors import DomainError, FitWarning, TransmonRegimeWarning
from .fitting import (ExtractedCircuit, FitConfig, FitResult, PeakData,
                      extract_circuit, fit)
from .foster import FosterModes, LineSpec, Topology, decompose
from .hamiltonian import (HamiltonianParams, ModelConfig, SpectrumResult, Tier,
                          assemble, coupling_set, diagonalize)
from .spectroscopy import (FluxAxis, TransitionSpectrum, avoided_crossing,
                           dressed_anharmonicity, flux_sweep, synth_lineshape)

__version__ = "0.1.0"

__all__ = [
    "CircuitParams", "DerivedParams", "derive",
    "CpbSpectrum", "diagonalize_cpb",
    "DesignPoint", "DesignReport", "evaluate", "scan_coupling",
    "DomainError", "FitWarning", "TransmonRegimeWarning",
    "ExtractedCircuit", "FitConfig", "FitResult", "PeakData",
    "extract_circuit", "fit",
    "FosterModes", "LineSpec", "Topology", "decompose",
    "HamiltonianParams", "ModelConfig", "SpectrumResult", "Tier",
    "assemble", "coupling_set", "diagonalize",
    "FluxAxis", "TransitionSpectrum", "avoided_crossing",
    "dressed_anharmonicity", "flux_sweep", "synth_lineshape",
]
