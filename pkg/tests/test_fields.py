import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from sfgcontrol.fields import (CoherentField, SqueezedVacuumSpec, coherent_pulse,
                               sample_realization, squeeze_from_photons, squeezed_moments,
                               squeezed_vacuum, uncorrelated_thermal_realization)
from sfgcontrol.grid import gaussian_envelope, make_grid
from sfgcontrol.shaper import sinusoidal_mask

WP = 3.5406984347910777
GRID = make_grid(WP, 0.06, 32)


def _spec(r, **kw):
    return SqueezedVacuumSpec(GRID, WP, np.full(GRID.n_pairs, r), **kw)


def test_coherent_pulse_phase_and_mask():
    env = gaussian_envelope(GRID, GRID.degenerate_freq, 0.05, 2.0)
    tl = coherent_pulse(env)
    assert np.array_equal(tl.amplitude, env.amplitude.astype(complex))
    m = sinusoidal_mask(GRID, WP, 1.0, 300.0, 0.2)
    shaped = coherent_pulse(env, m)
    np.testing.assert_allclose(shaped.amplitude, env.amplitude * np.exp(1j * m.phase))
    with pytest.raises(ValueError):
        coherent_pulse(env, np.zeros(5))
    with pytest.raises(ValueError):
        CoherentField(GRID, np.full(GRID.n_modes, np.inf))


def test_vacuum_moments_are_zero():
    mom = squeezed_moments(_spec(0.0))
    assert not np.any(mom.photons) and not np.any(mom.anomalous)


def test_moments_at_r_one():
    mom = squeezed_moments(_spec(1.0))
    n = mom.photons[0]
    assert n == pytest.approx(1.38109, abs=1e-5)
    assert abs(mom.anomalous[0]) ** 2 == pytest.approx(n * (n + 1), rel=1e-14)
    assert abs(mom.anomalous[0]) ** 2 == pytest.approx(3.28853, abs=1e-5)
    np.testing.assert_allclose(np.angle(mom.anomalous), math.pi / 2, atol=1e-15)


@settings(max_examples=80, deadline=None)
@given(r=st.lists(st.floats(0.0, 4.0), min_size=16, max_size=16))
def test_moment_identity(r):
    spec = SqueezedVacuumSpec(GRID, WP, np.array(r))
    mom = squeezed_moments(spec)
    n_pair = mom.photons[GRID.upper]
    m2 = np.abs(mom.anomalous) ** 2
    target = n_pair * (n_pair + 1)
    assert np.all(np.abs(m2 - target) <= 1e-12 * np.maximum(target, 1e-300))
    # n is symmetric between partners
    assert np.array_equal(mom.photons, mom.photons[::-1])


def test_squeeze_from_photons_inverts():
    n = np.array([0.0, 0.1, 1.0, 10.0, 1e4])
    np.testing.assert_allclose(np.sinh(squeeze_from_photons(n)) ** 2, n, rtol=1e-12)


def test_squeezed_vacuum_profiles():
    g = make_grid(WP, 0.06, 128)
    flat = squeezed_vacuum(g, WP, 4.0, 0.06)
    assert np.count_nonzero(flat.pair_photons) == 32
    gau = squeezed_vacuum(g, WP, 4.0, 0.06, profile="gaussian")
    xi0 = g.xi[g.n_pairs]
    assert gau.pair_photons[0] == pytest.approx(4.0 * math.exp(-4 * math.log(2) * xi0**2 / 0.06**2))
    with pytest.raises(ValueError):
        squeezed_vacuum(g, WP, 4.0, None, profile="gaussian")
    with pytest.raises(ValueError):
        squeezed_vacuum(g, WP, 4.0, 0.06, profile="triangle")


@pytest.mark.parametrize("kw", [dict(pump_linewidth=-1.0), dict(pump_lineshape="voigt"),
                                dict(envelope_jitter=-0.1)])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        _spec(0.5, **kw)


def test_spec_validation_profile_and_pump():
    with pytest.raises(ValueError):
        SqueezedVacuumSpec(GRID, WP, np.full(3, 0.1))
    with pytest.raises(ValueError):
        SqueezedVacuumSpec(GRID, WP, np.full(GRID.n_pairs, -0.1))
    with pytest.raises(ValueError):
        SqueezedVacuumSpec(GRID, WP + 0.01, np.full(GRID.n_pairs, 0.1))


def test_carrier_scaling_weight():
    spec = _spec(0.7, carrier_scaling=True)
    w = spec.field_weight()
    np.testing.assert_allclose(w**2, GRID.omega / GRID.degenerate_freq)
    mom = squeezed_moments(spec)
    np.testing.assert_allclose(mom.field_photons(), mom.photons * w**2)
    assert np.all(squeezed_moments(_spec(0.7)).weight == 1.0)


def test_zero_squeeze_gives_zero_field():
    for sampler in (sample_realization, uncorrelated_thermal_realization):
        r = sampler(_spec(0.0), seed=3, shot=5)
        assert not np.any(r.amplitude)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), shot=st.integers(0, 2**40), jit=st.floats(0.0, 1.0))
def test_pair_product_phase_exact(seed, shot, jit):
    spec = _spec(0.9, envelope_jitter=jit, pump_linewidth=1e-4)
    e = sample_realization(spec, seed, shot).amplitude
    up, lo = GRID.modes_to_pairs(e)
    # E(w-) = i conj(E(w+)) bit for bit, so the product is i|E(w+)|**2 exactly
    assert np.array_equal(lo, 1j * np.conj(up))
    prod = up * lo
    ok = prod != 0
    np.testing.assert_allclose(np.angle(prod[ok]), math.pi / 2, rtol=0, atol=1e-15)


def test_realizations_are_deterministic():
    spec = _spec(0.8, envelope_jitter=0.3, pump_linewidth=1e-4)
    a = sample_realization(spec, 99, 7)
    b = sample_realization(spec, 99, 7)
    assert np.array_equal(a.amplitude, b.amplitude) and a.detuning == b.detuning
    c = sample_realization(spec, 99, 8)
    assert not np.array_equal(a.amplitude, c.amplitude)
    u1 = uncorrelated_thermal_realization(spec, 99, 7)
    u2 = uncorrelated_thermal_realization(spec, 99, 7)
    assert np.array_equal(u1.amplitude, u2.amplitude)
    assert (a.seed, a.shot) == (99, 7)


def _draw(sampler, spec, shots, seed=11):
    return np.array([sampler(spec, seed, s).amplitude for s in range(shots)])


@pytest.mark.parametrize("sampler", [sample_realization, uncorrelated_thermal_realization])
def test_per_mode_intensity_is_thermal(sampler):
    r = 0.8
    n = math.sinh(r) ** 2
    e = _draw(sampler, _spec(r), 10_000)
    for mode in (0, GRID.n_modes // 2, GRID.n_modes - 1):
        x = np.abs(e[:, mode]) ** 2
        p = stats.kstest(x, "expon", args=(0, n)).pvalue
        assert p > 0.01


def test_surrogate_moments_within_five_sigma():
    r = 0.8
    n = math.sinh(r) ** 2
    M = 10_000
    e = _draw(sample_realization, _spec(r, envelope_jitter=0.2), M)
    inten = np.abs(e) ** 2
    mean_i = inten.mean(axis=0)
    se_i = inten.std(axis=0, ddof=1) / math.sqrt(M)
    assert np.all(np.abs(mean_i - n) <= 5 * se_i)
    up = e[:, GRID.upper]
    lo = e[:, GRID.n_pairs - 1::-1]
    prod = up * lo
    mean_p = prod.mean(axis=0)
    se_p = np.abs(prod).std(axis=0, ddof=1) / math.sqrt(M)
    # classical surrogate reaches i*n, not i*sqrt(n(n+1))
    assert np.all(np.abs(mean_p - 1j * n) <= 5 * se_p)
    assert np.all(np.abs(mean_p - 1j * math.sqrt(n * (n + 1))) > 5 * se_p)


def test_uncorrelated_pairs_average_to_zero():
    M = 10_000
    e = _draw(uncorrelated_thermal_realization, _spec(0.8), M)
    prod = e[:, GRID.upper] * e[:, GRID.n_pairs - 1::-1]
    se = np.abs(prod).std(axis=0, ddof=1) / math.sqrt(M)
    assert np.all(np.abs(prod.mean(axis=0)) <= 5 * se)


def test_detuning_distribution_follows_pump_lineshape():
    gp = 1e-4
    for shape, ref in (("lorentzian", stats.cauchy(scale=gp / 2)),
                       ("gaussian", stats.norm(scale=gp / math.sqrt(8 * math.log(2))))):
        spec = _spec(0.5, pump_linewidth=gp, pump_lineshape=shape)
        d = np.array([sample_realization(spec, 4, s).detuning for s in range(3000)])
        assert stats.kstest(d, ref.cdf).pvalue > 0.01
    assert sample_realization(_spec(0.5), 4, 0).detuning == 0.0


def test_jitter_preserves_mean_photons():
    r = 0.6
    n = math.sinh(r) ** 2
    M = 10_000
    e = _draw(sample_realization, _spec(r, envelope_jitter=0.5), M)
    inten = np.abs(e) ** 2
    tot = inten.mean()
    se = inten.mean(axis=1).std(ddof=1) / math.sqrt(M)
    assert abs(tot - n) <= 5 * se
