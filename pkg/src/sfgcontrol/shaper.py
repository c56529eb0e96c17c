"""Spectral phase masks: construction, composition, SLM pixelation, application.

A mask is a sampled phase on a :class:`~sfgcontrol.grid.SpectralGrid` plus the
descriptor that produced it.  Descriptors are small frozen records that can be
re-evaluated at arbitrary offsets ``xi = w - wp/2``; this is what lets a
pixelated mask sample its source at pixel centres that fall between modes.
Phases are stored unwrapped and only wrapped on export.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .grid import SpectralGrid


@dataclass(frozen=True)
class Zero:
    kind = "zero"

    def negated(self):
        return self

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class SplitDelay:
    """phi = tau*|xi|; relative delay of 2*tau between the spectral halves."""

    tau: float
    kind = "split_delay"

    def negated(self):
        return SplitDelay(-self.tau)

    def to_dict(self):
        return {"kind": self.kind, "tau_fs": self.tau}


@dataclass(frozen=True)
class Sinusoidal:
    alpha: float
    beta: float
    theta: float
    kind = "sinusoidal"

    def negated(self):
        return Sinusoidal(-self.alpha, self.beta, self.theta)

    def to_dict(self):
        return {"kind": self.kind, "alpha_rad": self.alpha, "beta_fs": self.beta,
                "theta_rad": self.theta}


@dataclass(frozen=True)
class Polynomial:
    """phi = sum_k coeffs[k] * xi**k, coefficient k in fs**k."""

    coeffs: tuple
    kind = "polynomial"

    def negated(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def to_dict(self):
        return {"kind": self.kind, "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class Tabulated:
    """Arbitrary phase samples at offsets ``xi`` (linear interpolation between)."""

    xi: tuple
    phase: tuple
    kind = "tabulated"

    def negated(self):
        return Tabulated(self.xi, tuple(-p for p in self.phase))

    def to_dict(self):
        return {"kind": self.kind, "xi_rad_per_fs": list(self.xi), "phase_rad": list(self.phase)}


@dataclass(frozen=True)
class Pixelated:
    n_pixels: int
    source: "Descriptor"
    kind = "pixelated"

    def negated(self):
        return Pixelated(self.n_pixels, self.source.negated())

    def to_dict(self):
        return {"kind": self.kind, "n_pixels": self.n_pixels, "source": self.source.to_dict()}


@dataclass(frozen=True)
class Composite:
    parts: tuple
    kind = "composite"

    def negated(self):
        return Composite(tuple(p.negated() for p in self.parts))

    def to_dict(self):
        return {"kind": self.kind, "parts": [p.to_dict() for p in self.parts]}


Descriptor = Union[Zero, SplitDelay, Sinusoidal, Polynomial, Tabulated, Pixelated, Composite]


def descriptor_from_dict(d: dict) -> Descriptor:
    kind = d.get("kind")
    if kind == "zero":
        return Zero()
    if kind == "split_delay":
        return SplitDelay(float(d["tau_fs"]))
    if kind == "sinusoidal":
        return Sinusoidal(float(d["alpha_rad"]), float(d["beta_fs"]), float(d["theta_rad"]))
    if kind == "polynomial":
        return Polynomial(tuple(float(c) for c in d["coeffs"]))
    if kind == "tabulated":
        return Tabulated(tuple(map(float, d["xi_rad_per_fs"])), tuple(map(float, d["phase_rad"])))
    if kind == "pixelated":
        return Pixelated(int(d["n_pixels"]), descriptor_from_dict(d["source"]))
    if kind == "composite":
        return Composite(tuple(descriptor_from_dict(p) for p in d["parts"]))
    raise ValueError(f"unknown mask kind {kind!r}")


def _pixel_blocks(n_modes: int, n_pixels: int) -> np.ndarray:
    """Start index of each pixel block plus the end sentinel."""
    base, rem = divmod(n_modes, n_pixels)
    sizes = np.full(n_pixels, base)
    sizes[:rem] += 1
    return np.concatenate([[0], np.cumsum(sizes)])


def phase_at(desc: Descriptor, grid: SpectralGrid, xi) -> np.ndarray:
    """Evaluate a descriptor at arbitrary offsets from the degenerate frequency."""
    xi = np.asarray(xi, dtype=float)
    if isinstance(desc, Zero):
        return np.zeros_like(xi)
    if isinstance(desc, SplitDelay):
        return desc.tau * np.abs(xi)
    if isinstance(desc, Sinusoidal):
        # odd/even split keeps theta=0 exactly antisymmetric and theta=pi/2 exactly symmetric
        a = np.abs(xi)
        s = np.sign(xi) * np.sin(desc.beta * a)
        c = np.cos(desc.beta * a)
        return desc.alpha * (s * math.cos(desc.theta) + c * math.sin(desc.theta))
    if isinstance(desc, Polynomial):
        out = np.zeros_like(xi)
        for k, ck in enumerate(desc.coeffs):
            if ck:
                out = out + ck * xi**k
        return out
    if isinstance(desc, Tabulated):
        return np.interp(xi, np.asarray(desc.xi), np.asarray(desc.phase))
    if isinstance(desc, Pixelated):
        edges = _pixel_blocks(grid.n_modes, desc.n_pixels)
        gx = grid.xi
        centers = 0.5 * (gx[edges[:-1]] + gx[edges[1:] - 1])
        values = phase_at(desc.source, grid, centers)
        # block boundaries sit halfway between neighbouring modes of adjacent blocks
        bounds = 0.5 * (gx[edges[1:-1] - 1] + gx[edges[1:-1]])
        return values[np.searchsorted(bounds, xi, side="right")]
    if isinstance(desc, Composite):
        out = np.zeros_like(xi)
        for p in desc.parts:
            out = out + phase_at(p, grid, xi)
        return out
    raise TypeError(f"not a mask descriptor: {desc!r}")


@dataclass(frozen=True, eq=False)
class PhaseMask:
    grid: SpectralGrid
    phase: np.ndarray = field(repr=False)
    descriptor: Descriptor = Zero()

    def __post_init__(self):
        ph = np.asarray(self.phase, dtype=float)
        if ph.shape != (self.grid.n_modes,):
            raise ValueError("mask length does not match grid")
        if not np.all(np.isfinite(ph)):
            raise ValueError("mask phase must be finite")
        ph.setflags(write=False)
        object.__setattr__(self, "phase", ph)

    @classmethod
    def from_descriptor(cls, grid: SpectralGrid, desc: Descriptor) -> "PhaseMask":
        return cls(grid, phase_at(desc, grid, grid.xi), desc)

    def pair_sum(self) -> np.ndarray:
        """phi(wp/2 + xi) + phi(wp/2 - xi) per pair, by mirrored indexing."""
        up, lo = self.grid.modes_to_pairs(self.phase)
        return up + lo

    def __neg__(self) -> "PhaseMask":
        return PhaseMask(self.grid, -self.phase, self.descriptor.negated())

    def __add__(self, other: "PhaseMask") -> "PhaseMask":
        return compose(self, other)


def _check_pump(grid: SpectralGrid, pump_freq: float) -> None:
    if grid.degenerate_freq != pump_freq / 2.0:
        raise ValueError("grid is not centred on pump_freq/2")


def zero_mask(grid: SpectralGrid) -> PhaseMask:
    return PhaseMask(grid, np.zeros(grid.n_modes), Zero())


def split_delay_mask(grid: SpectralGrid, pump_freq: float, tau: float) -> PhaseMask:
    _check_pump(grid, pump_freq)
    return PhaseMask.from_descriptor(grid, SplitDelay(float(tau)))


def sinusoidal_mask(grid: SpectralGrid, pump_freq: float, alpha: float, beta: float,
                    theta: float) -> PhaseMask:
    _check_pump(grid, pump_freq)
    return PhaseMask.from_descriptor(grid, Sinusoidal(float(alpha), float(beta), float(theta)))


def polynomial_mask(grid: SpectralGrid, pump_freq: float, coeffs) -> PhaseMask:
    coeffs = tuple(float(c) for c in coeffs)
    if not all(math.isfinite(c) for c in coeffs):
        raise ValueError("polynomial coefficients must be finite")
    _check_pump(grid, pump_freq)
    return PhaseMask.from_descriptor(grid, Polynomial(coeffs))


def tabulated_mask(grid: SpectralGrid, phase) -> PhaseMask:
    """Mask from one phase value per grid mode."""
    phase = np.asarray(phase, dtype=float)
    desc = Tabulated(tuple(grid.xi.tolist()), tuple(phase.tolist()))
    return PhaseMask(grid, phase, desc)


def pixelate_mask(mask: PhaseMask, n_pixels: int) -> PhaseMask:
    """Staircase the mask over ``n_pixels`` contiguous, mode-aligned blocks.

    Each block takes the source phase at its centre frequency.  Leading
    blocks absorb the remainder when n_pixels does not divide n_modes.
    """
    if int(n_pixels) != n_pixels or not 1 <= n_pixels <= mask.grid.n_modes:
        raise ValueError(f"n_pixels must be in [1, {mask.grid.n_modes}], got {n_pixels}")
    return PhaseMask.from_descriptor(mask.grid, Pixelated(int(n_pixels), mask.descriptor))


def compose(*masks: PhaseMask) -> PhaseMask:
    grid = masks[0].grid
    for m in masks[1:]:
        grid.check_same(m.grid)
    phase = np.zeros(grid.n_modes)
    for m in masks:
        phase = phase + m.phase
    return PhaseMask(grid, phase, Composite(tuple(m.descriptor for m in masks)))


def apply_mask(field_amplitudes, mask: PhaseMask) -> np.ndarray:
    """E'(w) = E(w) exp(i phi(w)); works on (..., n_modes) batches."""
    e = np.asarray(field_amplitudes)
    if e.shape[-1] != mask.grid.n_modes:
        raise ValueError("grid mismatch between field and mask")
    return e * np.exp(1j * mask.phase)


def wrap_phase(phase) -> np.ndarray:
    """Wrap to [-pi, pi)."""
    return np.mod(np.asarray(phase) + np.pi, 2.0 * np.pi) - np.pi


def export_mask_csv(mask: PhaseMask, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["omega_rad_per_fs", "phase_rad_wrapped"])
        for om, ph in zip(mask.grid.omega, wrap_phase(mask.phase)):
            w.writerow([repr(float(om)), repr(float(ph))])


def import_mask_csv(path, grid: SpectralGrid) -> PhaseMask:
    """Read a mask CSV; samples are interpolated onto ``grid`` if they differ."""
    data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] == grid.n_modes and np.array_equal(data[:, 0], grid.omega):
        return tabulated_mask(grid, data[:, 1])
    xi = data[:, 0] - grid.degenerate_freq
    desc = Tabulated(tuple(xi.tolist()), tuple(data[:, 1].tolist()))
    return PhaseMask.from_descriptor(grid, desc)
