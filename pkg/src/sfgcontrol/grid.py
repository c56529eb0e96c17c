"""Frequency grid, unit conversions and spectral envelopes.

All internal frequencies are angular, in rad/fs.  The grid is uniform and
half-offset about the degenerate frequency ``wp/2`` so that every mode has a
unique partner with ``w_i + w_pair(i) == wp`` holding exactly in floating
point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# speed of light in nm/fs
C_NM_PER_FS = 299.792458


def wavelength_to_angular(wavelength_nm):
    """Vacuum wavelength (nm) to angular frequency (rad/fs)."""
    lam = np.asarray(wavelength_nm, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("wavelength must be positive")
    out = 2.0 * np.pi * C_NM_PER_FS / lam
    return float(out) if out.ndim == 0 else out


def angular_to_wavelength(omega):
    """Angular frequency (rad/fs) to vacuum wavelength (nm)."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise ValueError("angular frequency must be positive")
    out = 2.0 * np.pi * C_NM_PER_FS / w
    return float(out) if out.ndim == 0 else out


def fwhm_wavelength_to_angular(center_nm: float, fwhm_nm: float) -> float:
    """First-order conversion of a wavelength width to an angular-frequency width."""
    if center_nm <= 0:
        raise ValueError("center wavelength must be positive")
    if fwhm_nm < 0:
        raise ValueError("wavelength width must be nonnegative")
    return 2.0 * np.pi * C_NM_PER_FS * fwhm_nm / center_nm**2


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Uniform, pair-symmetric angular-frequency grid.

    Mode ``i`` and mode ``n_modes - 1 - i`` form a pair whose frequencies sum
    to ``pump_freq`` exactly.  ``xi`` holds the offsets from the degenerate
    frequency and is exactly antisymmetric under the pairing.
    """

    pump_freq: float
    half_span: float
    n_modes: int
    omega: np.ndarray = field(repr=False)
    xi: np.ndarray = field(repr=False)

    @property
    def degenerate_freq(self) -> float:
        return self.pump_freq / 2.0

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_span / self.n_modes

    @property
    def n_pairs(self) -> int:
        return self.n_modes // 2

    def pair(self, i):
        """Index of the partner mode(s); works on ints and integer arrays."""
        return self.n_modes - 1 - i

    @property
    def upper(self) -> slice:
        """Slice of the modes above the degenerate frequency, ordered by pair index."""
        return slice(self.n_pairs, self.n_modes)

    def pair_to_modes(self, values) -> np.ndarray:
        """Expand a per-pair array (pair 0 closest to wp/2) to a per-mode array."""
        values = np.asarray(values)
        if values.shape[-1] != self.n_pairs:
            raise ValueError(f"expected {self.n_pairs} pair values, got {values.shape[-1]}")
        return np.concatenate([values[..., ::-1], values], axis=-1)

    def modes_to_pairs(self, values) -> tuple[np.ndarray, np.ndarray]:
        """Split a per-mode array into (upper, lower) per-pair views."""
        values = np.asarray(values)
        return values[..., self.n_pairs:], values[..., self.n_pairs - 1::-1]

    def output_axis(self) -> np.ndarray:
        """Sum-frequency axis of the linear autoconvolution, 2N-1 bins.

        Bin ``n_modes - 1`` sits at the pump frequency exactly.
        """
        k = np.arange(2 * self.n_modes - 1) - (self.n_modes - 1)
        return self.pump_freq + k * self.spacing

    def same_as(self, other: "SpectralGrid") -> bool:
        return other is self or (
            self.n_modes == other.n_modes
            and self.pump_freq == other.pump_freq
            and self.half_span == other.half_span
        )

    def check_same(self, other: "SpectralGrid") -> None:
        if not self.same_as(other):
            raise ValueError("grid mismatch")


def make_grid(pump_freq: float, half_span: float, n_modes: int) -> SpectralGrid:
    """Build the half-offset pairing grid centred on ``pump_freq / 2``."""
    if int(n_modes) != n_modes or n_modes % 2 or n_modes < 4:
        raise ValueError(f"n_modes must be an even integer >= 4, got {n_modes}")
    n_modes = int(n_modes)
    if not half_span > 0:
        raise ValueError("half_span must be positive")
    if not pump_freq / 2.0 - half_span > 0:
        raise ValueError("grid extends to nonpositive frequencies")
    d = pump_freq / 2.0
    dw = 2.0 * half_span / n_modes
    xi_up = (np.arange(n_modes // 2) + 0.5) * dw
    w_up = d + xi_up
    # wp - w_up is exact (Sterbenz), so each pair sums to wp bit-exactly
    w_lo = pump_freq - w_up
    omega = np.concatenate([w_lo[::-1], w_up])
    xi = np.concatenate([-xi_up[::-1], xi_up])
    omega.setflags(write=False)
    xi.setflags(write=False)
    return SpectralGrid(float(pump_freq), float(half_span), n_modes, omega, xi)


@dataclass(frozen=True, eq=False)
class SpectralEnvelope:
    grid: SpectralGrid
    amplitude: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitude, dtype=float)
        if a.shape != (self.grid.n_modes,):
            raise ValueError("envelope length does not match grid")
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise ValueError("envelope must be finite and nonnegative")
        object.__setattr__(self, "amplitude", a)

    @property
    def photons(self) -> np.ndarray:
        return self.amplitude**2


def gaussian_envelope(grid: SpectralGrid, center: float, fwhm: float,
                      peak_photons: float) -> SpectralEnvelope:
    """Amplitude envelope whose squared modulus is Gaussian with the given FWHM."""
    if not fwhm > 0:
        raise ValueError("fwhm must be positive")
    if peak_photons < 0:
        raise ValueError("peak_photons must be nonnegative")
    # offsets via xi keep the envelope pair-symmetric when centred on wp/2
    x = grid.xi + (grid.degenerate_freq - center)
    amp = math.sqrt(peak_photons) * np.exp(-2.0 * math.log(2.0) * x**2 / fwhm**2)
    return SpectralEnvelope(grid, amp)


def flat_envelope(grid: SpectralGrid, width: float | None, photons: float) -> SpectralEnvelope:
    """Top-hat photon number of total width ``width`` about wp/2 (whole grid if None)."""
    if photons < 0:
        raise ValueError("photons must be nonnegative")
    amp = np.full(grid.n_modes, math.sqrt(photons))
    if width is not None:
        amp[np.abs(grid.xi) > width / 2.0] = 0.0
    return SpectralEnvelope(grid, amp)


def measure_fwhm(x, y) -> float:
    """FWHM of a sampled single-peaked profile by linear half-maximum interpolation.

    The profile is treated as zero one sample beyond either end, so a top-hat
    that fills the samples reports its full cell width.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two samples")
    dx = x[1] - x[0]
    x = np.concatenate([[x[0] - dx], x, [x[-1] + dx]])
    y = np.concatenate([[0.0], y, [0.0]])
    imax = int(np.argmax(y))
    half = y[imax] / 2.0
    if not half > 0:
        raise ValueError("profile has no positive maximum")
    left = imax
    while y[left] >= half:
        left -= 1
    right = imax
    while y[right] >= half:
        right += 1
    xl = x[left] + (half - y[left]) * (x[left + 1] - x[left]) / (y[left + 1] - y[left])
    xr = x[right - 1] + (half - y[right - 1]) * (x[right] - x[right - 1]) / (y[right] - y[right - 1])
    return float(xr - xl)
