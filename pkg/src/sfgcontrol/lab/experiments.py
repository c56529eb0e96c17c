"""Figure-level experiments: spectra, split-delay scans, sinusoidal theta scans, ratio sweeps.

Scans default to the Gaussian-moment path.  All reported intensities are
normalized to the zero-mask total at the pump frequency of the same source
and path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..engine import (Lineshape, SfgSpectrum, photon_bandwidth, qc_ratio_formula,
                      response_kernel, sfg_coherent, sfg_ensemble,
                      sfg_gaussian_decomposition, _convolve)
from ..fields import coherent_pulse, squeezed_moments, squeezed_vacuum
from ..grid import SpectralEnvelope, make_grid, measure_fwhm
from ..oracles import sinusoidal_null_alpha
from ..shaper import (PhaseMask, Sinusoidal, SplitDelay, compose, descriptor_from_dict,
                      pixelate_mask)
from .config import ExperimentConfig


@dataclass
class Setup:
    cfg: ExperimentConfig
    grid: object
    spec: object
    moments: object
    pump: Lineshape
    detector: Lineshape
    base_mask: PhaseMask


def build(cfg: ExperimentConfig, photons: float | None = None, pump_linewidth: float | None = None,
          detector_fwhm: float | None = None) -> Setup:
    s = cfg.source
    grid = make_grid(s.pump_freq, cfg.grid.half_span, cfg.grid.n_modes)
    gp = s.pump_linewidth if pump_linewidth is None else pump_linewidth
    spec = squeezed_vacuum(grid, s.pump_freq, s.photons if photons is None else photons,
                           s.bandwidth, s.profile, pump_linewidth=gp,
                           pump_lineshape=s.pump_lineshape, carrier_scaling=s.carrier_scaling,
                           envelope_jitter=s.envelope_jitter)
    det = Lineshape(cfg.detector.fwhm if detector_fwhm is None else detector_fwhm,
                    cfg.detector.lineshape)
    return Setup(cfg, grid, spec, squeezed_moments(spec), Lineshape(gp, s.pump_lineshape), det,
                 PhaseMask.from_descriptor(grid, descriptor_from_dict(cfg.mask.descriptor)))


def scan_mask(setup: Setup, desc) -> PhaseMask:
    """Configured base mask plus the scanned descriptor, pixelated if requested."""
    m = PhaseMask.from_descriptor(setup.grid, desc)
    if setup.cfg.mask.descriptor.get("kind") != "zero":
        m = compose(setup.base_mask, m)
    if setup.cfg.mask.pixels:
        m = pixelate_mask(m, setup.cfg.mask.pixels)
    return m


def _final_mask(setup: Setup) -> PhaseMask:
    m = setup.base_mask
    if setup.cfg.mask.pixels:
        m = pixelate_mask(m, setup.cfg.mask.pixels)
    return m


def _spectrum(setup: Setup, mask: PhaseMask, stochastic: bool, threads: int) -> SfgSpectrum:
    cfg = setup.cfg
    kind = cfg.source.kind
    if kind == "coherent":
        env = SpectralEnvelope(setup.grid, np.sqrt(setup.moments.field_photons()))
        sp = sfg_coherent(coherent_pulse(env), mask)
        i = _convolve(sp.intensity, response_kernel(setup.detector, setup.grid.spacing,
                                                    sp.omega.size))
        return replace(sp, intensity=i, quantum=i, classical=np.zeros_like(i))
    if kind == "uncorrelated" or stochastic:
        src = "uncorrelated" if kind == "uncorrelated" else "paired"
        return sfg_ensemble(setup.spec, mask, cfg.run.shots, cfg.run.master_seed, setup.detector,
                            source=src, threads=threads)
    return sfg_gaussian_decomposition(setup.moments, mask, setup.pump, setup.detector)


def fit_fwhm(x, y) -> float:
    """FWHM of a sampled peak by linear interpolation of the half-maximum crossings."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y))
    if i == 0 or i == y.size - 1:
        raise ValueError("series has no interior maximum")
    half = y[i] / 2.0
    left = np.nonzero(y[:i] < half)[0]
    right = np.nonzero(y[i:] < half)[0]
    if left.size == 0 or right.size == 0:
        raise ValueError("no half-maximum crossing found")
    a = left[-1]
    b = i + right[0]
    xl = x[a] + (half - y[a]) * (x[a + 1] - x[a]) / (y[a + 1] - y[a])
    xr = x[b - 1] + (half - y[b - 1]) * (x[b] - x[b - 1]) / (y[b] - y[b - 1])
    return float(xr - xl)


def transform_limited_duration(grid, photons, pad_factor: int = 64) -> float:
    """Intensity FWHM (fs) of the transform-limited pulse with spectrum ``photons``."""
    amp = np.sqrt(np.asarray(photons, dtype=float))
    L = pad_factor * grid.n_modes
    field_t = np.fft.fftshift(np.fft.ifft(amp, n=L))
    dt = 2.0 * np.pi / (L * grid.spacing)
    t = (np.arange(L) - L // 2) * dt
    return measure_fwhm(t, np.abs(field_t) ** 2)


@dataclass
class ScanResult:
    x: np.ndarray
    x_unit: str
    total: np.ndarray
    quantum: np.ndarray
    classical: np.ndarray
    stderr: np.ndarray
    summary: dict = field(default_factory=dict)

    @property
    def contrast(self) -> float:
        return float(np.min(self.total) / np.max(self.total))


def _moment_point(setup: Setup, mask: PhaseMask) -> dict:
    return sfg_gaussian_decomposition(setup.moments, mask, setup.pump, setup.detector).at_pump()


def _scan(setup: Setup, descs, x, x_unit: str, threads: int) -> ScanResult:
    stochastic = setup.cfg.run.stochastic
    ref = _spectrum(setup, _final_mask(setup), stochastic, threads).at_pump()
    norm = ref["I_total"]
    rows = []
    for d in descs:
        p = _spectrum(setup, scan_mask(setup, d), stochastic, threads).at_pump()
        rows.append((p["I_total"], p.get("I_q", p["I_total"]), p.get("I_c", 0.0),
                     p.get("stderr", 0.0)))
    arr = np.array(rows) / norm
    return ScanResult(np.asarray(x, dtype=float), x_unit, arr[:, 0], arr[:, 1], arr[:, 2],
                      arr[:, 3], {"normalization_I_total": norm,
                                  "path": "stochastic" if stochastic else "gaussian_moments"})


def delay_scan(cfg: ExperimentConfig, threads: int = 1) -> ScanResult:
    """Split-delay scan; x is the equivalent total delay 2*tau in fs."""
    setup = build(cfg)
    taus = np.asarray(cfg.run.tau)
    res = _scan(setup, [SplitDelay(float(t)) for t in taus], 2.0 * taus, "fs", threads)
    summary = res.summary
    n = setup.moments.field_photons()
    summary["transform_limited_fwhm_fs"] = transform_limited_duration(setup.grid, n)
    summary["bandwidth_rad_per_fs"] = photon_bandwidth(setup.moments)
    try:
        summary["delay_fwhm_fs"] = fit_fwhm(res.x, res.quantum)
    except ValueError:
        summary["delay_fwhm_fs"] = None
    i0 = int(np.argmax(res.quantum))
    summary["quantum_min_over_max"] = float(np.min(res.quantum) / res.quantum[i0])
    summary["classical_max_abs_change"] = float(np.max(np.abs(res.classical - res.classical[i0])))
    return res


def default_beta(setup: Setup) -> float:
    """Ten sinusoid periods across the half band."""
    return 20.0 * math.pi / photon_bandwidth(setup.moments)


def null_alpha(setup: Setup, beta: float) -> float:
    grid = setup.grid
    w = np.abs(setup.moments.field_anomalous())
    xi = grid.xi[grid.upper]
    keep = w > 0
    return sinusoidal_null_alpha(w[keep], xi[keep], beta)


def theta_scan(cfg: ExperimentConfig, threads: int = 1) -> ScanResult:
    setup = build(cfg)
    beta = default_beta(setup) if cfg.run.beta == "auto" else float(cfg.run.beta)
    alpha = null_alpha(setup, beta) if cfg.run.alpha == "auto" else float(cfg.run.alpha)
    thetas = np.asarray(cfg.run.theta)
    res = _scan(setup, [Sinusoidal(alpha, beta, float(t)) for t in thetas], thetas, "rad",
                threads)
    res.summary.update({"alpha_rad": alpha, "beta_fs": beta, "contrast_min_over_max": res.contrast,
                        "classical_background": float(np.max(res.classical))})
    return res


def spectrum(cfg: ExperimentConfig, threads: int = 1) -> tuple[SfgSpectrum, dict]:
    setup = build(cfg)
    mask = _final_mask(setup)
    stochastic = cfg.run.stochastic or cfg.source.kind == "uncorrelated"
    sp = _spectrum(setup, mask, stochastic, threads)
    if cfg.mask.descriptor.get("kind") == "zero" and not cfg.mask.pixels:
        norm = sp.at_pump()["I_total"]
    else:
        norm = _spectrum(setup, PhaseMask(setup.grid, np.zeros(setup.grid.n_modes)),
                         stochastic, threads).at_pump()["I_total"]
    scale = 1.0 / norm if norm > 0 else 1.0

    def sc(a):
        return None if a is None else a * scale

    sp = replace(sp, intensity=sc(sp.intensity), quantum=sc(sp.quantum),
                 classical=sc(sp.classical), stderr=sc(sp.stderr),
                 quantum_stderr=sc(sp.quantum_stderr))
    at = sp.at_pump()
    summary = {"normalization_I_total": norm, "at_pump": at,
               "path": "stochastic" if stochastic else
               ("coherent" if cfg.source.kind == "coherent" else "gaussian_moments")}
    if cfg.source.kind != "coherent":
        b = photon_bandwidth(setup.moments)
        summary["bandwidth_rad_per_fs"] = b
        if at.get("I_c"):
            summary["quantum_to_classical"] = at["I_q"] / at["I_c"]
        gsum = setup.pump.fwhm + setup.detector.fwhm
        if gsum > 0:
            summary["formula_ratio"] = qc_ratio_formula(b, setup.pump.fwhm, setup.detector.fwhm,
                                                        cfg.source.photons)
    return sp, summary


def ratio_sweep(cfg: ExperimentConfig, threads: int = 1) -> tuple[ScanResult, list[dict]]:
    """Quantum/classical ratio at wp versus photon number and B/(gp+gf).

    Pump and detector widths are rescaled together, keeping their configured
    proportion, to hit each requested bandwidth ratio.
    """
    base = build(cfg)
    b = photon_bandwidth(base.moments)
    gp0, gf0 = cfg.source.pump_linewidth, cfg.detector.fwhm
    if gp0 + gf0 <= 0:
        raise ValueError("ratio_sweep needs a nonzero pump linewidth or detector width")
    rows = []
    xs, tot, q, c = [], [], [], []
    for ratio in cfg.run.bandwidth_ratio:
        k = b / ratio / (gp0 + gf0)
        for n in cfg.run.photons:
            st = build(cfg, photons=n, pump_linewidth=gp0 * k, detector_fwhm=gf0 * k)
            p = _moment_point(st, PhaseMask(st.grid, np.zeros(st.grid.n_modes)))
            engine = p["I_q"] / p["I_c"]
            formula = qc_ratio_formula(b, gp0 * k, gf0 * k, n)
            rows.append({"photons": n, "bandwidth_ratio": ratio, "engine_ratio": engine,
                         "formula_ratio": formula, "relative_deviation": engine / formula - 1.0})
            xs.append(n)
            tot.append(p["I_total"])
            q.append(p["I_q"])
            c.append(p["I_c"])
    res = ScanResult(np.array(xs), "photons_per_mode", np.array(tot), np.array(q), np.array(c),
                     np.zeros(len(xs)), {"bandwidth_rad_per_fs": b, "rows": rows,
                                         "path": "gaussian_moments"})
    return res, rows
