"""Sum-frequency / two-photon spectra.

Three routes to the spectrum on the output axis ``Omega`` (2N-1 bins, bin
N-1 at the pump frequency):

* :func:`sfg_coherent` -- ``|C(Omega)|**2`` with
  ``C(Omega) = dw * sum_w E(w) E(Omega - w)`` for a deterministic field.
* :func:`sfg_gaussian_decomposition` -- exact ensemble average for the
  squeezed state from its second moments, split into the phase-sensitive
  quantum term and the mask-independent classical term.
* :func:`sfg_ensemble` -- Monte Carlo average over surrogate field shots.

Ensemble spectra are densities per unit Omega; the coherent spectrum is the
bare ``|C|**2`` of a single field.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.ndimage import convolve1d
from scipy.special import voigt_profile

from .fields import (LINESHAPES, CoherentField, GaussianStateMoments, SqueezedVacuumSpec,
                     sample_realization, uncorrelated_thermal_realization)
from .grid import measure_fwhm
from .shaper import PhaseMask, apply_mask, zero_mask

_FWHM_TO_SIGMA = 1.0 / math.sqrt(8.0 * math.log(2.0))
# kernel half-extent in units of fwhm
_KERNEL_EXTENT = {"gaussian": 8.0, "lorentzian": 200.0}


@dataclass(frozen=True)
class Lineshape:
    fwhm: float = 0.0
    shape: str = "gaussian"

    def __post_init__(self):
        if not self.fwhm >= 0:
            raise ValueError("fwhm must be nonnegative")
        if self.shape not in LINESHAPES:
            raise ValueError(f"lineshape must be one of {LINESHAPES}")

    def profile(self, x) -> np.ndarray:
        """Unit-area lineshape evaluated at offsets ``x`` (requires fwhm > 0)."""
        x = np.asarray(x, dtype=float)
        if self.shape == "gaussian":
            s = self.fwhm * _FWHM_TO_SIGMA
            return np.exp(-0.5 * (x / s) ** 2) / (s * math.sqrt(2.0 * math.pi))
        hw = 0.5 * self.fwhm
        return hw / (math.pi * (x**2 + hw**2))


class DetectorResponse(Lineshape):
    """Spectrometer resolution (equivalently the final-level broadening)."""


def combined_lineshape(x, a: Lineshape, b: Lineshape) -> np.ndarray | None:
    """Analytic convolution of two unit-area lineshapes; None if both are deltas."""
    parts = [p for p in (a, b) if p.fwhm > 0]
    if not parts:
        return None
    if len(parts) == 1:
        return parts[0].profile(x)
    x = np.asarray(x, dtype=float)
    g = [p.fwhm for p in parts if p.shape == "gaussian"]
    lor = [p.fwhm for p in parts if p.shape == "lorentzian"]
    if len(g) == 2:
        return Lineshape(math.hypot(*g), "gaussian").profile(x)
    if len(lor) == 2:
        return Lineshape(sum(lor), "lorentzian").profile(x)
    return voigt_profile(x, g[0] * _FWHM_TO_SIGMA, 0.5 * lor[0])


def response_kernel(response: Lineshape, spacing: float, n_bins: int) -> np.ndarray:
    """Unit-sum kernel sampled at integer multiples of ``spacing``."""
    span = spacing * (n_bins - 1)
    if response.fwhm > span:
        raise ValueError("response kernel wider than the Omega span")
    if response.fwhm == 0:
        return np.ones(1)
    half = int(min(math.ceil(_KERNEL_EXTENT[response.shape] * response.fwhm / spacing), n_bins - 1))
    k = response.profile(np.arange(-half, half + 1) * spacing)
    return k / k.sum()


def _convolve(y: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    if kernel.size == 1:
        return y.copy()
    return convolve1d(y, kernel, axis=-1, mode="constant", cval=0.0)


@dataclass(frozen=True, eq=False)
class SfgSpectrum:
    omega: np.ndarray = field(repr=False)
    intensity: np.ndarray = field(repr=False)
    quantum: np.ndarray | None = field(default=None, repr=False)
    classical: np.ndarray | None = field(default=None, repr=False)
    stderr: np.ndarray | None = field(default=None, repr=False)
    quantum_stderr: np.ndarray | None = field(default=None, repr=False)
    mean_amplitude: np.ndarray | None = field(default=None, repr=False)
    amplitude_stderr: np.ndarray | None = field(default=None, repr=False)
    provenance: dict = field(default_factory=dict)

    @property
    def pump_index(self) -> int:
        return (self.omega.size - 1) // 2

    def at_pump(self) -> dict:
        """Values in the bin at the pump frequency."""
        i = self.pump_index
        out = {"omega": float(self.omega[i]), "I_total": float(self.intensity[i])}
        for name, arr in (("I_q", self.quantum), ("I_c", self.classical), ("stderr", self.stderr),
                          ("I_q_stderr", self.quantum_stderr)):
            if arr is not None:
                out[name] = float(arr[i])
        return out

    def index_of(self, omega: float) -> int:
        i = int(np.argmin(np.abs(self.omega - omega)))
        dw = self.omega[1] - self.omega[0]
        if abs(self.omega[i] - omega) > 1e-9 * dw + 1e-12 * abs(omega):
            raise ValueError(f"Omega={omega} is not on the output axis")
        return i


def _pad_length(n: int) -> int:
    return 1 << (2 * n - 1).bit_length() if (2 * n) & (2 * n - 1) else 2 * n


def autoconvolve(e, spacing: float) -> np.ndarray:
    """dw * linear autoconvolution along the last axis, zero-padded FFT."""
    e = np.asarray(e, dtype=complex)
    n = e.shape[-1]
    L = _pad_length(n)
    f = np.fft.fft(e, n=L, axis=-1)
    return spacing * np.fft.ifft(f * f, axis=-1)[..., : 2 * n - 1]


def sfg_coherent(fld: CoherentField, mask: PhaseMask | None = None) -> SfgSpectrum:
    grid = fld.grid
    if mask is None:
        mask = zero_mask(grid)
    grid.check_same(mask.grid)
    c = autoconvolve(apply_mask(fld.amplitude, mask), grid.spacing)
    return SfgSpectrum(grid.output_axis(), np.abs(c) ** 2,
                       provenance={"source": "coherent", "mask": mask.descriptor.to_dict()})


def spectral_energy(e, spacing: float) -> tuple[float, float]:
    """sum |C|^2 dw two ways: via Parseval on the padded transform, and directly."""
    e = np.asarray(e, dtype=complex)
    n = e.shape[-1]
    L = _pad_length(n)
    f = np.fft.fft(e, n=L)
    via_transform = spacing**3 * float(np.sum(np.abs(f) ** 4)) / L
    c = spacing * np.convolve(e, e)
    direct = spacing * float(np.sum(np.abs(c) ** 2))
    return via_transform, direct


def quantum_amplitude(moments: GaussianStateMoments, pair_phase) -> np.ndarray:
    """dw * sum over all modes of m * exp(i pair-phase).

    ``pair_phase`` is phi(wp/2+xi) + phi(wp/2-xi) per pair, shape (..., n_pairs).
    Every pair enters twice, once per ordering of its two modes.
    """
    grid = moments.grid
    ph = np.asarray(pair_phase, dtype=float)
    terms = moments.field_anomalous() * np.exp(1j * ph)
    return 2.0 * grid.spacing * terms.sum(axis=-1)


def classical_term(moments: GaussianStateMoments) -> np.ndarray:
    """2 dw sum_w n(w) n(Omega - w): both normal-order Wick pairings."""
    n = moments.field_photons()
    return 2.0 * moments.grid.spacing * np.convolve(n, n)


def sfg_gaussian_decomposition(moments: GaussianStateMoments, mask: PhaseMask | None = None,
                               pump: Lineshape = Lineshape(), detector: Lineshape = Lineshape()
                               ) -> SfgSpectrum:
    """Exact ensemble SFG spectrum of the squeezed state.

    The quantum term is ``|S|**2 V(Omega - wp)`` with ``S`` from
    :func:`quantum_amplitude` and ``V`` the analytic pump-detector lineshape
    convolution (a single-bin delta when both widths are zero).  The classical
    term does not see the mask.
    """
    grid = moments.grid
    if mask is None:
        mask = zero_mask(grid)
    grid.check_same(mask.grid)
    omega = grid.output_axis()
    s = quantum_amplitude(moments, mask.pair_sum())
    v = combined_lineshape(omega - grid.pump_freq, pump, detector)
    if v is None:
        v = np.zeros(omega.size)
        v[grid.n_modes - 1] = 1.0 / grid.spacing
    iq = abs(s) ** 2 * v
    kernel = response_kernel(detector, grid.spacing, omega.size)
    ic = _convolve(classical_term(moments), kernel)
    return SfgSpectrum(omega, iq + ic, quantum=iq, classical=ic,
                       provenance={"source": "gaussian_moments",
                                   "mask": mask.descriptor.to_dict(),
                                   "pump": {"fwhm": pump.fwhm, "lineshape": pump.shape},
                                   "detector": {"fwhm": detector.fwhm,
                                                "lineshape": detector.shape}})


def convolve_response(spectrum: SfgSpectrum, response: Lineshape) -> SfgSpectrum:
    """Convolve every component with the unit-sum sampled response kernel.

    Standard errors are propagated as if bins were independent.
    """
    dw = spectrum.omega[1] - spectrum.omega[0]
    kernel = response_kernel(response, dw, spectrum.omega.size)

    def conv(a):
        return None if a is None else _convolve(a, kernel)

    def conv_err(a):
        return None if a is None else np.sqrt(_convolve(a**2, kernel**2))

    return replace(spectrum, intensity=conv(spectrum.intensity), quantum=conv(spectrum.quantum),
                   classical=conv(spectrum.classical), stderr=conv_err(spectrum.stderr),
                   quantum_stderr=conv_err(spectrum.quantum_stderr))


def qc_ratio_formula(bandwidth: float, pump_linewidth: float, detector_fwhm: float,
                     photons: float) -> float:
    """Approximate quantum-to-classical peak ratio B/(2(gp+gf)) * (n^2+n)/n^2."""
    denom = 2.0 * (pump_linewidth + detector_fwhm)
    if not denom > 0:
        raise ValueError("pump_linewidth + detector_fwhm must be positive")
    if not photons > 0:
        raise ValueError("photons must be positive")
    # (n^2 + n)/n^2 written as 1 + 1/n so huge n cannot overflow
    return bandwidth / denom * (1.0 + 1.0 / photons)


def photon_bandwidth(moments: GaussianStateMoments) -> float:
    """FWHM of n(w), the operational squeezed-vacuum bandwidth."""
    return measure_fwhm(moments.grid.omega, moments.field_photons())


def _shift_rows(p: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """out[s, j] = (1-w) p[s, j-k] + w p[s, j-k-1] with k + w = offsets[s]; zero fill."""
    k0 = np.floor(offsets).astype(np.int64)
    w = (offsets - k0)[:, None]
    L = p.shape[-1]
    j = np.arange(L)[None, :]
    out = np.zeros_like(p)
    for shift, weight in ((k0[:, None], 1.0 - w), (k0[:, None] + 1, w)):
        src = j - shift
        ok = (src >= 0) & (src < L)
        vals = np.take_along_axis(p, np.clip(src, 0, L - 1), axis=-1)
        out += np.where(ok, vals, 0.0) * weight
    return out


def _shift_weights(offsets: np.ndarray, L: int) -> np.ndarray:
    """Empirical detuning kernel on integer bin offsets, centred at index L-1."""
    k0 = np.floor(offsets).astype(np.int64)
    w = offsets - k0
    hist = np.zeros(2 * L - 1)
    for k, wt in ((k0, 1.0 - w), (k0 + 1, w)):
        ok = np.abs(k) <= L - 1
        np.add.at(hist, k[ok] + L - 1, wt[ok])
    return hist


@dataclass
class _ChunkSums:
    sum_c: np.ndarray
    sum_abs2: np.ndarray
    sum_p: np.ndarray
    sum_p2: np.ndarray
    offsets: np.ndarray


def _draw_chunk(spec, mask_phase, shots, seed, source):
    sampler = sample_realization if source == "paired" else uncorrelated_thermal_realization
    reals = [sampler(spec, seed, s) for s in shots]
    e = np.stack([r.amplitude for r in reals])
    det = np.array([r.detuning for r in reals])
    return e * np.exp(1j * mask_phase), det


def _run_chunk(spec, mask_phase, shots, seed, source, kernel) -> _ChunkSums:
    dw = spec.grid.spacing
    e, det = _draw_chunk(spec, mask_phase, shots, seed, source)
    c = autoconvolve(e, dw)
    a2 = np.abs(c) ** 2
    offsets = det / dw
    p = _convolve(_shift_rows(a2 / dw, offsets), kernel)
    return _ChunkSums(c.sum(axis=0), a2.sum(axis=0), p.sum(axis=0), (p**2).sum(axis=0), offsets)


def sfg_ensemble(spec: SqueezedVacuumSpec, mask: PhaseMask | None, shots: int, master_seed: int,
                 detector: Lineshape = Lineshape(), source: str = "paired", threads: int = 1,
                 chunk_size: int = 256) -> SfgSpectrum:
    """Monte Carlo SFG spectrum averaged over ``shots`` surrogate realizations.

    Each shot's ``|C|**2 / dw`` is moved along Omega by that shot's pump
    detuning and convolved with the detector.  The quantum estimate is the
    coherent mean ``|<C>|**2`` taken in the shot frame, broadened by the
    empirical detuning distribution and the detector; the classical estimate
    is the remainder.  Chunks are fixed-size and merged in shot order, so the
    result is independent of ``threads``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if source not in ("paired", "uncorrelated"):
        raise ValueError("source must be 'paired' or 'uncorrelated'")
    grid = spec.grid
    if mask is None:
        mask = zero_mask(grid)
    grid.check_same(mask.grid)
    dw = grid.spacing
    L = 2 * grid.n_modes - 1
    kernel = response_kernel(detector, dw, L)
    starts = range(0, shots, chunk_size)
    jobs = [np.arange(s, min(s + chunk_size, shots)) for s in starts]

    def work(idx):
        return _run_chunk(spec, mask.phase, idx, master_seed, source, kernel)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, jobs))
    else:
        parts = [work(j) for j in jobs]

    sum_c = np.zeros(L, dtype=complex)
    sum_abs2 = np.zeros(L)
    sum_p = np.zeros(L)
    sum_p2 = np.zeros(L)
    for part in parts:
        sum_c += part.sum_c
        sum_abs2 += part.sum_abs2
        sum_p += part.sum_p
        sum_p2 += part.sum_p2
    offsets = np.concatenate([p.offsets for p in parts])

    M = shots
    mean_c = sum_c / M
    intensity = sum_p / M
    if M > 1:
        var_p = np.maximum(sum_p2 - M * intensity**2, 0.0) / (M - 1)
        var_c = np.maximum(sum_abs2 - M * np.abs(mean_c) ** 2, 0.0) / (M - 1)
        stderr = np.sqrt(var_p / M)
        amp_err = np.sqrt(var_c / M)
    else:
        stderr = np.full(L, np.nan)
        amp_err = np.full(L, np.nan)

    hist = _shift_weights(offsets, L) / M
    frame_q = np.abs(mean_c) ** 2 / dw
    frame_q_err = 2.0 * np.abs(mean_c) * amp_err / dw

    def broaden(y):
        if np.count_nonzero(hist) == 1 and hist[L - 1] == 1.0:
            out = y.copy()
        else:
            out = np.convolve(y, hist)[L - 1: 2 * L - 1]
        return _convolve(out, kernel)

    iq = broaden(frame_q)
    iq_err = broaden(frame_q_err)
    return SfgSpectrum(grid.output_axis(), intensity, quantum=iq, classical=intensity - iq,
                       stderr=stderr, quantum_stderr=iq_err, mean_amplitude=mean_c,
                       amplitude_stderr=amp_err,
                       provenance={"source": source, "mask": mask.descriptor.to_dict(),
                                   "shots": M, "seed": int(master_seed),
                                   "detector": {"fwhm": detector.fwhm,
                                                "lineshape": detector.shape}})
