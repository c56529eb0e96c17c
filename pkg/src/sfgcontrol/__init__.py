"""Spectral simulation of two-photon processes driven by broadband squeezed vacuum."""

__version__ = "0.1.0"

from .engine import (DetectorResponse, Lineshape, SfgSpectrum, convolve_response,
                     qc_ratio_formula, sfg_coherent, sfg_ensemble, sfg_gaussian_decomposition)
from .fields import (CoherentField, SqueezedVacuumSpec, coherent_pulse, sample_realization,
                     squeezed_moments, squeezed_vacuum, uncorrelated_thermal_realization)
from .grid import (SpectralGrid, angular_to_wavelength, fwhm_wavelength_to_angular,
                   gaussian_envelope, make_grid, wavelength_to_angular)
from .shaper import (PhaseMask, apply_mask, pixelate_mask, polynomial_mask, sinusoidal_mask,
                     split_delay_mask, zero_mask)
