"""Slow, independent reference computations used to check the fast paths."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, sparse

from .grid import SpectralGrid


def direct_pair_sum(field, grid: SpectralGrid, targets, mask_phase=None) -> np.ndarray:
    """|dw * sum_{i+j=k} E_i E_j|**2 at each target Omega, by explicit loops over pairs."""
    e = np.asarray(field, dtype=complex)
    if mask_phase is not None:
        e = e * np.exp(1j * np.asarray(mask_phase))
    n = grid.n_modes
    dw = grid.spacing
    out = []
    for om in np.atleast_1d(targets):
        kf = (om - grid.pump_freq) / dw + (n - 1)
        k = int(round(kf))
        if abs(kf - k) > 1e-6 or not 0 <= k <= 2 * n - 2:
            raise ValueError(f"Omega={om} is not on the output axis")
        acc = 0j
        for i in range(max(0, k - n + 1), min(n - 1, k) + 1):
            acc += e[i] * e[k - i]
        out.append(abs(dw * acc) ** 2)
    return np.array(out)


def gaussian_autoconvolution(omega, center: float, fwhm: float, peak_photons: float) -> np.ndarray:
    """Closed-form |integral E(w) E(Omega-w) dw|**2 for a transform-limited Gaussian.

    E(w) = sqrt(peak) exp(-a (w-center)**2) with a = 2 ln2 / fwhm**2.
    """
    a = 2.0 * math.log(2.0) / fwhm**2
    x = np.asarray(omega) - 2.0 * center
    amp = peak_photons * math.sqrt(math.pi / (2.0 * a)) * np.exp(-a * x**2 / 2.0)
    return amp**2


@dataclass(frozen=True)
class FockOracleConfig:
    squeeze: float
    n_max: int = 60
    pump_phase: float = 0.0

    def __post_init__(self):
        if self.n_max < 4:
            raise ValueError("n_max must be >= 4")
        if self.squeeze < 0:
            raise ValueError("squeeze must be nonnegative")


NORM_TOLERANCE = 1e-10


def fock_two_mode_moments(cfg: FockOracleConfig) -> tuple[float, float, float]:
    """(n, |m|**2, <a+^dag a-^dag a- a+>) of a truncated two-mode squeezed vacuum.

    Built from explicit (sparse) ladder matrices on the (n_max+1)**2 product space.
    """
    r = cfg.squeeze
    dim = cfg.n_max + 1
    k = np.arange(dim)
    t = math.tanh(r)
    ph = 1j * np.exp(1j * cfg.pump_phase)
    coef = (ph * t) ** k / math.cosh(r)
    norm = float(np.sum(np.abs(coef) ** 2))
    if 1.0 - norm > NORM_TOLERANCE:
        raise ValueError(f"truncation n_max={cfg.n_max} too small for r={r}: "
                         f"norm deficit {1.0 - norm:.3g}")
    psi = np.zeros((dim, dim), dtype=complex)
    psi[k, k] = coef
    psi = psi.ravel()

    a = sparse.diags(np.sqrt(np.arange(1, dim)), 1, format="csr")
    eye = sparse.identity(dim, format="csr")
    a_p = sparse.kron(a, eye, format="csr")
    a_m = sparse.kron(eye, a, format="csr")

    def expect(op):
        return np.vdot(psi, op @ psi)

    n = expect(a_p.conj().T @ a_p).real
    m = expect(a_p @ a_m)
    fourth = expect(a_p.conj().T @ a_m.conj().T @ a_m @ a_p).real
    return float(n), float(abs(m) ** 2), float(fourth)


def fock_anomalous(cfg: FockOracleConfig) -> complex:
    """<a+ a-> from the same truncated state (for phase checks)."""
    r = cfg.squeeze
    dim = cfg.n_max + 1
    k = np.arange(1, dim)
    coef = (1j * np.exp(1j * cfg.pump_phase) * math.tanh(r)) ** np.arange(dim) / math.cosh(r)
    return complex(np.sum(np.conj(coef[k - 1]) * coef[k] * k))


def null_objective(alpha: float, weights, xi, beta: float) -> float:
    """|sum w exp(2i alpha cos(beta xi))|**2 / |sum w|**2."""
    w = np.asarray(weights, dtype=float)
    s = np.sum(w * np.exp(2j * alpha * np.cos(beta * np.asarray(xi))))
    return float(abs(s) ** 2 / np.sum(w) ** 2)


def sinusoidal_null_alpha(weights, xi, beta: float, bracket=(0.0, 1.9), tol=1e-6) -> float:
    """Sinusoidal-mask amplitude that best nulls the pair sum at theta = pi/2.

    ``weights`` are the pair amplitudes |m(xi)| at offsets ``xi`` > 0.  The
    default bracket stops short of the second null near 2.76.
    """
    xi = np.asarray(xi, dtype=float)
    # band edge is half a cell beyond the outermost sample
    edge = xi.max() + (0.5 * (xi[1] - xi[0]) if xi.size > 1 else 0.0)
    if beta * edge < 10.0 * math.pi * (1 - 1e-9):
        raise ValueError("beta must span at least 10 periods over the band")
    lo, hi = bracket
    res = optimize.minimize_scalar(null_objective, args=(weights, xi, beta),
                                   bracket=(lo, 0.5 * (lo + hi), hi), method="golden",
                                   tol=tol)
    if not lo <= res.x <= hi:
        raise ValueError("null search left its bracket")
    return float(res.x)


def split_delay_quadrature(profile, half_width: float, tau_values) -> np.ndarray:
    """|integral_0^h a(xi) exp(2i tau xi) dxi|**2 by adaptive quadrature."""
    out = []
    for tau in np.atleast_1d(tau_values):
        k = 2.0 * tau
        re = integrate.quad(profile, 0.0, half_width, weight="cos", wvar=k, limit=500)[0]
        im = integrate.quad(profile, 0.0, half_width, weight="sin", wvar=k, limit=500)[0]
        out.append(re * re + im * im)
    return np.array(out)


def run_verification(quick: bool = True) -> list[tuple[str, bool, str]]:
    """Oracle suite for the CLI ``--verify`` flag: (name, passed, detail) triples."""
    from .engine import sfg_coherent, sfg_gaussian_decomposition
    from .fields import CoherentField, squeezed_moments, squeezed_vacuum
    from .grid import make_grid
    from .shaper import tabulated_mask

    results = []
    rng = np.random.default_rng(12345)
    for n in (16, 128) if quick else (16, 128, 1024):
        grid = make_grid(2.0, 0.5, n)
        e = rng.normal(size=n) + 1j * rng.normal(size=n)
        fast = sfg_coherent(CoherentField(grid, e))
        slow = direct_pair_sum(e, grid, fast.omega)
        err = float(np.max(np.abs(fast.intensity - slow)) / np.max(slow))
        results.append((f"fast_path_N{n}", err <= 1e-9, f"rel sup err {err:.2e}"))

    for r in (0.25, 0.5, 1.0):
        n, m2, f4 = fock_two_mode_moments(FockOracleConfig(r, 60))
        n0 = math.sinh(r) ** 2
        m0 = n0 * (n0 + 1.0)
        err = max(abs(n - n0) / n0, abs(m2 - m0) / m0, abs(f4 - (n0**2 + m0)) / (n0**2 + m0))
        results.append((f"fock_r{r}", err <= 1e-8, f"max rel err {err:.2e}"))

    grid = make_grid(2.0, 0.3, 64)
    mom = squeezed_moments(squeezed_vacuum(grid, 2.0, 2.0))
    ref = sfg_gaussian_decomposition(mom).at_pump()["I_q"]
    up = rng.normal(size=grid.n_pairs)
    anti = tabulated_mask(grid, grid.pair_to_modes(up) * np.sign(grid.xi))
    val = sfg_gaussian_decomposition(mom, anti).at_pump()["I_q"]
    results.append(("antisymmetric_invariance", val == ref, f"{val!r} vs {ref!r}"))
    return results
