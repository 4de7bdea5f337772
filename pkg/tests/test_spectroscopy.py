import numpy as np
import pytest

from transmon_cqed import spectroscopy as sp
from transmon_cqed.errors import DomainError
from transmon_cqed.hamiltonian import HamiltonianParams, ModelConfig, Tier, branches

FIT = HamiltonianParams(e_c=300e6, e_j_max=46e9, f_r=6.367e9, g=455e6)
CFG = ModelConfig(tier=Tier.EXACT_SINGLE, params=FIT)


def jc_spectrum(x, f0=6e9, slope=-20e9, x0=0.37, g=400e6):
    """Two-level avoided crossing with a linear detuning."""
    d = slope * (x - x0)
    mid = f0 + d / 2
    half = np.sqrt((d / 2) ** 2 + g**2)
    return sp.TransitionSpectrum(sp.FluxAxis(x), {"lower": mid - half,
                                                  "upper": mid + half})


def test_flux_axis_mapping():
    ax = sp.FluxAxis([0.12, 0.77, 1.42], offset=0.12, period=1.3)
    assert ax.flux == pytest.approx([0.0, 0.5, 1.0])
    back = sp.FluxAxis.from_flux(ax.flux, 0.12, 1.3)
    assert back.values == pytest.approx(ax.values)
    assert sp.FluxAxis([0.3]).flux == pytest.approx([0.3])
    with pytest.raises(DomainError):
        sp.FluxAxis([0.0], period=0.0)


def test_avoided_crossing_analytic():
    x = np.linspace(0.30, 0.45, 601)
    center, split = sp.avoided_crossing(jc_spectrum(x))
    assert split == pytest.approx(800e6, rel=1e-6)
    assert center == pytest.approx(6e9, rel=1e-9)


def test_avoided_crossing_coarse_grid_refined():
    x = np.linspace(0.30, 0.45, 31)
    center, split = sp.avoided_crossing(jc_spectrum(x, x0=0.3712))
    assert split == pytest.approx(800e6, rel=0.01)
    assert center == pytest.approx(6e9, rel=1e-3)


def test_crossing_not_bracketed():
    x = np.linspace(0.38, 0.45, 50)
    with pytest.raises(DomainError, match="not bracketed"):
        sp.avoided_crossing(jc_spectrum(x, x0=0.37))


def test_sweep_device_crossing():
    spec = sp.flux_sweep(CFG, sp.FluxAxis(np.linspace(0.30, 0.45, 601)))
    assert not spec.failures
    center, split = sp.avoided_crossing(spec)
    # reference from an independent Kronecker-product build
    assert split == pytest.approx(909995740.6, abs=0.2e6)
    assert center == pytest.approx(6317983111.7, abs=0.5e6)


def test_sweep_rows_layout():
    spec = sp.flux_sweep(CFG, sp.FluxAxis([0.3, 0.4]))
    rows = spec.rows(("lower", "upper"))
    assert [r[:2] for r in rows] == [(0.3, "lower"), (0.3, "upper"),
                                     (0.4, "lower"), (0.4, "upper")]


def test_sweep_records_failures(monkeypatch):
    calls = []

    def flaky(cfg, fluxes):
        calls.append(len(fluxes))
        if any(abs(f - 0.35) < 1e-12 for f in fluxes):
            raise DomainError("boom", module="test", field="flux")
        return branches(cfg, fluxes)

    monkeypatch.setattr(sp, "branches", flaky)
    spec = sp.flux_sweep(CFG, sp.FluxAxis([0.30, 0.35, 0.40]))
    assert [i for i, _ in spec.failures] == [1]
    assert np.isnan(spec.branches["lower"][1])
    assert np.isfinite(spec.branches["lower"][[0, 2]]).all()


def test_dressed_anharmonicity_device():
    flux = sp.flux_for_qubit(CFG, 3.586e9)
    assert branches(CFG, [flux])["ge"][0] == pytest.approx(3.586e9, abs=1.0)
    alpha = sp.dressed_anharmonicity(CFG, flux)
    assert 300e6 <= alpha <= 450e6


def test_dressed_anharmonicity_needs_dispersive_regime():
    flux = sp.flux_for_qubit(CFG, FIT.f_r, dressed=False)
    with pytest.raises(DomainError, match="dispersive"):
        sp.dressed_anharmonicity(CFG, flux)


def test_dressed_anharmonicity_needs_third_level():
    cfg = ModelConfig(tier=Tier.EXACT_SINGLE, params=FIT, k_levels=2)
    with pytest.raises(DomainError):
        sp.dressed_anharmonicity(cfg, 0.42)


def test_uncoupled_anharmonicity_is_bare():
    cfg = ModelConfig(tier=Tier.DUFFING_SINGLE,
                      params=HamiltonianParams(300e6, 46e9, 6.367e9, 0.0))
    assert sp.dressed_anharmonicity(cfg, 0.42) == pytest.approx(300e6, abs=1e-3)


def test_qubit_above_maximum():
    with pytest.raises(DomainError):
        sp.flux_for_qubit(CFG, 20e9)


def test_lineshape_peaks_recovered():
    spec = sp.flux_sweep(CFG, sp.FluxAxis([0.33, 0.37, 0.41]))
    traces = sp.synth_lineshape(spec, frequencies=np.arange(5e9, 8e9, 1e6))
    for i, trace in enumerate(traces):
        assert trace.amplitudes.max() <= 1.0
        peaks = sp.pick_peaks(trace, n_peaks=2)
        expected = [spec.branches["lower"][i], spec.branches["upper"][i]]
        assert peaks == pytest.approx(expected, abs=2e6)


def test_lineshape_noise_seeded():
    spec = sp.flux_sweep(CFG, sp.FluxAxis([0.37]))
    a = sp.synth_lineshape(spec, noise=0.05, noise_seed=3)[0].amplitudes
    b = sp.synth_lineshape(spec, noise=0.05, noise_seed=3)[0].amplitudes
    c = sp.synth_lineshape(spec, noise=0.05, noise_seed=4)[0].amplitudes
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.min() >= 0.0 and a.max() <= 1.0


def test_lineshape_width_validated():
    spec = sp.flux_sweep(CFG, sp.FluxAxis([0.37]))
    with pytest.raises(DomainError):
        sp.synth_lineshape(spec, width=0.0)
