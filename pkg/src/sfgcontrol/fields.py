"""Field sources: coherent pulses, squeezed vacuum and its classical surrogate.

Squeezed vacuum is described per mode pair ``(wp/2 + xi, wp/2 - xi)`` by a
squeeze parameter ``r``.  Two descriptions are provided:

* :func:`squeezed_moments` gives the exact Gaussian second moments,
  ``n = sinh(r)**2`` and ``m = <a+ a-> = i sinh(r) cosh(r)``.
* :func:`sample_realization` draws classical fields whose pair products carry
  the same pi/2 phase but only ``<E+ E-> = i n``; it cannot reproduce the
  ``+n`` part of ``|m|**2 = n**2 + n``.

Random draws come from a Philox stream keyed by ``(master_seed, shot)``;
pair ``k`` always reads the same four counter words, so any shot or pair can
be regenerated independently of execution order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .grid import SpectralEnvelope, SpectralGrid

LINESHAPES = ("gaussian", "lorentzian")

_WORDS_PER_SLOT = 4
_HEADER_WORDS = 4
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class CoherentField:
    grid: SpectralGrid
    amplitude: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.amplitude, dtype=complex)
        if e.shape != (self.grid.n_modes,) or not np.all(np.isfinite(e)):
            raise ValueError("field must be finite and match the grid")
        object.__setattr__(self, "amplitude", e)


def coherent_pulse(envelope: SpectralEnvelope, phase=None) -> CoherentField:
    """E = A exp(i Theta); ``phase`` may be an array or a PhaseMask."""
    grid = envelope.grid
    if phase is None:
        return CoherentField(grid, envelope.amplitude.astype(complex))
    if hasattr(phase, "grid"):
        grid.check_same(phase.grid)
        phase = phase.phase
    phase = np.asarray(phase, dtype=float)
    if phase.shape != (grid.n_modes,):
        raise ValueError("grid mismatch between envelope and phase")
    return CoherentField(grid, envelope.amplitude * np.exp(1j * phase))


@dataclass(frozen=True, eq=False)
class SqueezedVacuumSpec:
    """Broadband two-mode squeezed vacuum pumped at ``pump_freq``.

    ``squeeze`` holds one r per pair, pair 0 nearest the degenerate frequency.
    ``pump_linewidth`` is a FWHM in rad/fs; it enters the stochastic path as a
    static per-shot detuning drawn from ``pump_lineshape``.
    """

    grid: SpectralGrid
    pump_freq: float
    squeeze: np.ndarray = field(repr=False)
    pump_linewidth: float = 0.0
    pump_lineshape: str = "lorentzian"
    carrier_scaling: bool = False
    envelope_jitter: float = 0.0

    def __post_init__(self):
        r = np.asarray(self.squeeze, dtype=float)
        if r.shape != (self.grid.n_pairs,):
            raise ValueError(f"squeeze profile needs {self.grid.n_pairs} pair values")
        if not np.all(np.isfinite(r)) or np.any(r < 0):
            raise ValueError("squeeze parameters must be finite and nonnegative")
        if self.grid.degenerate_freq != self.pump_freq / 2.0:
            raise ValueError("grid is not centred on pump_freq/2")
        if self.pump_linewidth < 0:
            raise ValueError("pump_linewidth must be nonnegative")
        if self.pump_lineshape not in LINESHAPES:
            raise ValueError(f"pump_lineshape must be one of {LINESHAPES}")
        if self.envelope_jitter < 0:
            raise ValueError("envelope_jitter must be nonnegative")
        r.setflags(write=False)
        object.__setattr__(self, "squeeze", r)

    @property
    def pair_photons(self) -> np.ndarray:
        return np.sinh(self.squeeze) ** 2

    def field_weight(self) -> np.ndarray:
        """Per-mode amplitude factor sqrt(w / (wp/2)), or ones when carrier scaling is off."""
        if not self.carrier_scaling:
            return np.ones(self.grid.n_modes)
        return np.sqrt(self.grid.omega / self.grid.degenerate_freq)


def squeeze_from_photons(photons) -> np.ndarray:
    """Invert n = sinh(r)**2."""
    return np.arcsinh(np.sqrt(np.asarray(photons, dtype=float)))


def squeezed_vacuum(grid: SpectralGrid, pump_freq: float, photons: float,
                    bandwidth: float | None = None, profile: str = "flat",
                    **kwargs) -> SqueezedVacuumSpec:
    """Squeezed vacuum whose photon number n(w) has FWHM ``bandwidth``.

    ``profile`` is ``"flat"`` (top-hat, the whole grid when bandwidth is None)
    or ``"gaussian"`` with peak ``photons``.
    """
    xi = grid.xi[grid.upper]
    if profile == "flat":
        n = np.full(grid.n_pairs, float(photons))
        if bandwidth is not None:
            n[xi > bandwidth / 2.0] = 0.0
    elif profile == "gaussian":
        if bandwidth is None:
            raise ValueError("gaussian profile needs a bandwidth")
        n = photons * np.exp(-4.0 * math.log(2.0) * xi**2 / bandwidth**2)
    else:
        raise ValueError(f"unknown profile {profile!r}")
    return SqueezedVacuumSpec(grid, pump_freq, squeeze_from_photons(n), **kwargs)


@dataclass(frozen=True, eq=False)
class GaussianStateMoments:
    """Second moments of the pair-squeezed state.

    ``photons`` is n per mode; ``anomalous`` is m per pair.  ``weight`` is the
    per-mode field factor applied when forming field correlations.
    """

    grid: SpectralGrid
    photons: np.ndarray = field(repr=False)
    anomalous: np.ndarray = field(repr=False)
    weight: np.ndarray = field(repr=False)

    def field_photons(self) -> np.ndarray:
        return self.photons * self.weight**2

    def field_anomalous(self) -> np.ndarray:
        up, lo = self.grid.modes_to_pairs(self.weight)
        return self.anomalous * up * lo


def squeezed_moments(spec: SqueezedVacuumSpec) -> GaussianStateMoments:
    r = spec.squeeze
    sh = np.sinh(r)
    n_pair = sh**2
    # pump phase 0: arg m = pi/2
    m = 1j * (sh * np.cosh(r))
    return GaussianStateMoments(spec.grid, spec.grid.pair_to_modes(n_pair), m, spec.field_weight())


@dataclass(frozen=True, eq=False)
class FieldRealization:
    grid: SpectralGrid
    amplitude: np.ndarray = field(repr=False)
    seed: int = 0
    shot: int = 0
    detuning: float = 0.0


def _philox_words(master_seed: int, shot: int, count: int) -> np.ndarray:
    key = (int(master_seed) & _MASK64) | ((int(shot) & _MASK64) << 64)
    return np.random.Philox(key=key).random_raw(count)


def _uniform_open(words: np.ndarray) -> np.ndarray:
    """uint64 -> uniform on (0, 1)."""
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def _detuning(u: float, linewidth: float, lineshape: str) -> float:
    if linewidth == 0:
        return 0.0
    if lineshape == "lorentzian":
        return 0.5 * linewidth * math.tan(math.pi * (u - 0.5))
    sigma = linewidth / math.sqrt(8.0 * math.log(2.0))
    return float(sigma * ndtri(u))


def _slot_draws(master_seed: int, shot: int, n_slots: int):
    """Per-slot standard normals (c_re, c_im, jitter) and the shot-level uniform."""
    words = _philox_words(master_seed, shot, _HEADER_WORDS + _WORDS_PER_SLOT * n_slots)
    u = _uniform_open(words)
    slots = u[_HEADER_WORDS:].reshape(n_slots, _WORDS_PER_SLOT)
    rad1 = np.sqrt(-2.0 * np.log(slots[:, 0]))
    ang1 = 2.0 * np.pi * slots[:, 1]
    rad2 = np.sqrt(-2.0 * np.log(slots[:, 2]))
    z_re = rad1 * np.cos(ang1)
    z_im = rad1 * np.sin(ang1)
    z_jit = rad2 * np.cos(2.0 * np.pi * slots[:, 3])
    return z_re, z_im, z_jit, float(u[0])


def _jitter(z: np.ndarray, sigma: float) -> np.ndarray:
    # lognormal with <g**2> = 1 so mean photon numbers are unchanged
    if sigma == 0:
        return np.ones_like(z)
    return np.exp(sigma * z - sigma**2)


def sample_realization(spec: SqueezedVacuumSpec, seed: int, shot: int = 0) -> FieldRealization:
    """One shot of the paired classical surrogate.

    For pair k: E(w+) = c g, E(w-) = i conj(c) g with c circular Gaussian,
    <|c|**2> = sinh(r)**2, and g the envelope jitter of that pair.
    """
    grid = spec.grid
    z_re, z_im, z_jit, u0 = _slot_draws(seed, shot, grid.n_pairs)
    amp = np.sqrt(spec.pair_photons / 2.0)
    g = _jitter(z_jit, spec.envelope_jitter)
    c = (amp * z_re + 1j * (amp * z_im)) * g
    e = np.empty(grid.n_modes, dtype=complex)
    e[grid.upper] = c
    e[grid.n_pairs - 1::-1] = 1j * np.conj(c)
    if spec.carrier_scaling:
        e = e * spec.field_weight()
    delta = _detuning(u0, spec.pump_linewidth, spec.pump_lineshape)
    return FieldRealization(grid, e, int(seed), int(shot), delta)


def uncorrelated_thermal_realization(spec: SqueezedVacuumSpec, seed: int,
                                     shot: int = 0) -> FieldRealization:
    """Control source: same per-mode thermal statistics, no pair correlation."""
    grid = spec.grid
    z_re, z_im, z_jit, u0 = _slot_draws(seed, shot, grid.n_modes)
    n = grid.pair_to_modes(spec.pair_photons)
    amp = np.sqrt(n / 2.0)
    g = _jitter(z_jit, spec.envelope_jitter)
    e = (amp * z_re + 1j * (amp * z_im)) * g
    if spec.carrier_scaling:
        e = e * spec.field_weight()
    delta = _detuning(u0, spec.pump_linewidth, spec.pump_lineshape)
    return FieldRealization(grid, e, int(seed), int(shot), delta)
