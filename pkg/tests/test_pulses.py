"""Waveform definitions: areas, phases, windows, chirp, and the catalog."""
from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from scipy.integrate import quad

from reqsim.dynamics import TWO_PI, propagate_array
from reqsim.models import TwoLevelModel, build_two_level
from reqsim.pulses import (
    COMPOSITE_TOTAL_US,
    GaussianComposite,
    Pulse,
    SechPulse,
    SubPulse,
    gaussian_composite,
    phase_shifted,
    pulse_pieces,
    rabi_at,
    rectangular_composite,
    sech_chirp_decomposition,
    standard_pulses,
)

GROUND = np.array([1.0, 0.0], dtype=complex)


# ------------------------------------------------------------------ catalog


def test_catalog_names_and_durations():
    catalog = standard_pulses()
    for name in ("rect90-180-90", "gauss-naive", "gauss-opt", "sech-default"):
        assert name in catalog
    for name, pulse in catalog.items():
        start, end = pulse.window
        expected = 3.0 if name == "sech-default" else COMPOSITE_TOTAL_US
        assert end - start == pytest.approx(expected)
        assert pulse.name == name


def test_optimized_catalog_parameters():
    subs = standard_pulses()["gauss-opt"].shape.subpulses
    assert [s.area_deg for s in subs] == [92.50, 192.00, 92.42]
    assert [s.phase_deg for s in subs] == [96.98, 6.86, 96.23]


def test_sech_catalog_parameters():
    shape = standard_pulses()["sech-default"].shape
    assert (shape.peak_mhz, shape.rate_mhz, shape.mu) == (2.0, 0.64, 3.0)
    assert shape.center_us == pytest.approx(1.5)


def test_rectangular_durations_scale_with_areas():
    subs = standard_pulses()["rect90-180-90"].shape.subpulses
    assert [s.width_us for s in subs] == pytest.approx([0.375, 0.75, 0.375])


# ------------------------------------------------------------------- areas


def test_gaussian_subpulse_integrated_magnitude_matches_area():
    pulse = standard_pulses()["gauss-naive"]
    for sub, area_deg in zip(pulse.shape.subpulses, (90.0, 180.0, 90.0)):
        half = pulse.shape.cutoff_multiple * sub.width_us
        lo, hi = sub.center_us - half, sub.center_us + half
        integral, _ = quad(lambda t: abs(rabi_at(pulse, t)), lo + 1e-12, hi - 1e-12, limit=200)
        # area-normalized up to the 3.5 sigma truncation loss (< 0.5%)
        assert integral == pytest.approx(math.radians(area_deg), rel=5e-3)
        assert integral < math.radians(area_deg)


def test_rectangular_subpulse_magnitude_is_area_over_duration():
    pulse = standard_pulses()["rect90-180-90"]
    sub = pulse.shape.subpulses[1]
    assert abs(rabi_at(pulse, sub.center_us)) == pytest.approx(math.pi / 0.75)


def test_truncation_ratio_at_three_and_a_half_sigma():
    pulse = standard_pulses()["gauss-naive"]
    sub = pulse.shape.subpulses[1]
    lo = sub.center_us - 3.5 * sub.width_us
    ratio = abs(rabi_at(pulse, lo + 1e-12)) / abs(rabi_at(pulse, sub.center_us))
    # exp(-3.5^2/2); the often-quoted "0.2%" is this value rounded down
    assert ratio == pytest.approx(math.exp(-6.125), rel=1e-6)
    assert ratio < 2.2e-3


# ------------------------------------------------------------------ windows


def test_waveform_is_zero_outside_window():
    for pulse in standard_pulses().values():
        start, end = pulse.window
        assert rabi_at(pulse, start - 1e-9) == 0.0
        assert rabi_at(pulse, end + 1e-9) == 0.0
        assert abs(rabi_at(pulse, 0.5 * (start + end))) > 0.0


def test_phase_is_constant_within_each_gaussian_subwindow():
    pulse = standard_pulses()["gauss-opt"]
    for sub in pulse.shape.subpulses:
        half = pulse.shape.cutoff_multiple * sub.width_us
        ts = np.linspace(sub.center_us - 0.9 * half, sub.center_us + 0.9 * half, 7)
        args = np.array([cmath.phase(rabi_at(pulse, t)) for t in ts])
        ref = cmath.phase(cmath.exp(-1j * math.radians(sub.phase_deg)))
        wrapped = np.angle(np.exp(1j * (args - ref)))
        assert np.max(np.abs(wrapped)) < 1e-12


def test_extra_phase_multiplies_waveform_by_unit_phasor():
    pulse = standard_pulses()["gauss-opt"]
    shifted = phase_shifted(pulse, 72.0)
    factor = cmath.exp(-1j * math.radians(72.0))
    for t in (0.2, 0.75, 1.3):
        assert rabi_at(shifted, t) == pytest.approx(rabi_at(pulse, t) * factor, abs=1e-12)


def test_inverse_pulse_is_a_180_degree_shift():
    pulse = standard_pulses()["sech-default"]
    inverse = phase_shifted(pulse, 180.0)
    assert rabi_at(inverse, 1.5) == pytest.approx(-rabi_at(pulse, 1.5), abs=1e-12)


# --------------------------------------------------------------------- sech


def test_sech_magnitude_at_center_is_peak():
    pulse = standard_pulses()["sech-default"]
    assert abs(rabi_at(pulse, 1.5)) == pytest.approx(TWO_PI * 2.0, abs=1e-12)


def test_chirp_decomposition_center_and_asymptote():
    shape = standard_pulses()["sech-default"].shape
    mag0, off0 = sech_chirp_decomposition(shape, 1.5)
    assert (mag0, off0) == (pytest.approx(2.0), pytest.approx(0.0, abs=1e-15))
    mag_far, off_far = sech_chirp_decomposition(shape, 1.5 + 50.0)
    assert mag_far == pytest.approx(0.0, abs=1e-12)
    assert off_far == pytest.approx(3.0 * 0.64)  # asymptote 1.92 MHz


def test_chirp_rate_matches_numerical_phase_derivative():
    pulse = standard_pulses()["sech-default"]
    shape = pulse.shape
    for t in (0.8, 1.5, 2.1):
        dt = 1e-6
        darg = cmath.phase(rabi_at(pulse, t + dt) / rabi_at(pulse, t - dt)) / (2 * dt)
        _, offset_mhz = sech_chirp_decomposition(shape, t)
        assert darg == pytest.approx(-TWO_PI * offset_mhz, abs=1e-6)


def test_chirp_recombination_reproduces_waveform():
    pulse = standard_pulses()["sech-default"]
    shape = pulse.shape
    beta = shape.rate_rad_us
    for t in (0.5, 1.1, 1.5, 2.4):
        mag, _ = sech_chirp_decomposition(shape, t)
        # integral of mu*beta*tanh is mu*ln cosh
        arg = -shape.mu * math.log(math.cosh(beta * (t - shape.center_us)))
        rebuilt = TWO_PI * mag * cmath.exp(1j * arg)
        assert abs(rebuilt - rabi_at(pulse, t)) <= 1e-10 * abs(rabi_at(pulse, t))


# ------------------------------------------------------------ constructors


def test_composite_windows_are_contiguous_and_sigma_follows_total():
    pulse = gaussian_composite((90.0, 180.0, 90.0), (0.0, 0.0, 0.0), total_duration_us=2.1)
    subs = pulse.shape.subpulses
    assert subs[0].width_us == pytest.approx(2.1 / 21.0)
    assert subs[1].center_us - subs[0].center_us == pytest.approx(0.7)


def test_overlapping_subpulse_windows_are_rejected():
    subs = (
        SubPulse(area_deg=90.0, phase_deg=0.0, center_us=0.25, width_us=0.1),
        SubPulse(area_deg=90.0, phase_deg=0.0, center_us=0.5, width_us=0.1),
    )
    with pytest.raises(ValueError):
        GaussianComposite(subpulses=subs, cutoff_multiple=3.5)


def test_subpulse_parameter_validation():
    with pytest.raises(ValueError):
        SubPulse(area_deg=-10.0, phase_deg=0.0, center_us=0.0, width_us=0.1)
    with pytest.raises(ValueError):
        SubPulse(area_deg=90.0, phase_deg=0.0, center_us=0.0, width_us=0.0)
    with pytest.raises(ValueError):
        rectangular_composite((90.0, -90.0), (0.0, 0.0))
    with pytest.raises(ValueError):
        gaussian_composite((90.0,), (0.0, 0.0))


def test_sech_spec_validation():
    with pytest.raises(ValueError):
        SechPulse(peak_mhz=0.0)
    with pytest.raises(ValueError):
        SechPulse(rate_mhz=-1.0)
    with pytest.raises(ValueError):
        SechPulse(duration_us=0.0)


def test_zero_area_subpulse_produces_silent_pieces():
    pulse = gaussian_composite((0.0, 180.0, 0.0), (0.0, 0.0, 0.0))
    pieces = pulse_pieces(pulse)
    assert pieces[0].envelope is None and pieces[2].envelope is None
    assert pieces[1].envelope is not None


def test_resonant_populations_match_between_rect_and_gaussian():
    # on resonance only areas and phases matter, not the envelope shape
    for areas, phases in [
        ((90.0, 180.0, 90.0), (90.0, 0.0, 90.0)),
        ((92.5, 192.0, 92.42), (96.98, 6.86, 96.23)),
    ]:
        out = []
        for build in (rectangular_composite, gaussian_composite):
            pulse = build(areas, phases)
            h = build_two_level(TwoLevelModel(0.0, pulse))
            out.append(np.abs(propagate_array(GROUND, h, 0.0, 1.5)) ** 2)
        assert np.max(np.abs(out[0] - out[1])) < 1e-6
