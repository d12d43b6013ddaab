"""Level structures: diagonals, leg couplings, dark states, blockade shift."""
from __future__ import annotations

import math

import numpy as np
import pytest

from reqsim.dynamics import TWO_PI, propagate_array
from reqsim.models import (
    DEFAULT_DIPOLE_SHIFT_MHZ,
    LAMBDA_LABELS,
    TWO_ION_LABELS,
    LambdaModel,
    TwoIonModel,
    TwoLevelModel,
    build_lambda,
    build_two_ion,
    build_two_level,
    dark_bright,
)
from reqsim.pulses import standard_pulses

CATALOG = standard_pulses()


def test_two_level_matrix_structure():
    pulse = CATALOG["gauss-naive"]
    h = build_two_level(TwoLevelModel(1.5, pulse))
    m = h.evaluate(0.75)
    assert m.shape == (2, 2)
    assert m[1, 1] == pytest.approx(-TWO_PI * 1.5)
    assert m[0, 0] == 0.0
    assert m[1, 0] == pytest.approx(np.conj(m[0, 1]))
    assert np.max(np.abs(m - m.conj().T)) < 1e-12


def test_lambda_detuning_sits_on_the_excited_level():
    pulse = CATALOG["gauss-naive"]
    h = build_lambda(LambdaModel(2.0, pulse))
    m = h.evaluate(0.75)
    assert m[0, 0] == m[1, 1] == 0.0
    assert m[2, 2] == pytest.approx(-TWO_PI * 2.0)


def test_single_leg_couples_only_that_leg():
    pulse = CATALOG["gauss-naive"]
    m0 = build_lambda(LambdaModel(0.0, pulse, legs="0")).evaluate(0.75)
    m1 = build_lambda(LambdaModel(0.0, pulse, legs="1")).evaluate(0.75)
    assert m0[2, 1] == 0.0 and m0[2, 0] != 0.0
    assert m1[2, 0] == 0.0 and m1[2, 1] != 0.0


def test_both_leg_drive_splits_amplitude_across_legs():
    pulse = CATALOG["gauss-naive"]
    single = build_lambda(LambdaModel(0.0, pulse, legs="0")).evaluate(0.75)
    both = build_lambda(LambdaModel(0.0, pulse, legs="both")).evaluate(0.75)
    assert abs(both[2, 0]) == pytest.approx(abs(single[2, 0]) / math.sqrt(2.0))
    assert abs(both[2, 1]) == pytest.approx(abs(both[2, 0]))


def test_dark_bright_vectors_are_orthonormal_and_phase_locked():
    import cmath

    for phi in (0.0, 90.0, 180.0, 222.5):
        basis = dark_bright(phi)
        assert np.vdot(basis.dark, basis.dark) == pytest.approx(1.0)
        assert np.vdot(basis.bright, basis.bright) == pytest.approx(1.0)
        assert abs(np.vdot(basis.dark, basis.bright)) < 1e-15
        phasor = cmath.exp(-1j * math.radians(phi))
        assert abs(basis.bright[1] / basis.bright[0] - phasor) < 1e-12
        assert abs(basis.dark[1] / basis.dark[0] + phasor) < 1e-12


def test_matched_leg_phases_leave_the_dark_state_alone():
    pulse = CATALOG["gauss-opt"]
    for phi in (0.0, 135.0, 180.0):
        basis = dark_bright(phi)
        model = LambdaModel(0.0, pulse, phi0_deg=0.0, phi1_deg=phi, legs="both")
        psi0 = np.append(basis.dark, 0.0).astype(complex)
        final = propagate_array(psi0, build_lambda(model), 0.0, 1.5)
        fidelity = abs(np.vdot(psi0, final)) ** 2
        assert fidelity > 1.0 - 1e-12


def test_bright_state_sees_the_calibrated_pulse_area():
    # a pi pulse on both legs must fully empty the bright state
    pulse = CATALOG["gauss-naive"]
    basis = dark_bright(70.0)
    model = LambdaModel(0.0, pulse, phi0_deg=0.0, phi1_deg=70.0, legs="both")
    psi0 = np.append(basis.bright, 0.0).astype(complex)
    final = propagate_array(psi0, build_lambda(model), 0.0, 1.5)
    assert abs(final[2]) ** 2 > 1.0 - 1e-6


def test_two_ion_diagonal_shifts():
    pulse = CATALOG["gauss-naive"]
    model = TwoIonModel(
        control_detuning_mhz=1.0,
        target_detuning_mhz=-2.0,
        pulse=pulse,
        dipole_shift_mhz=15.0,
    )
    m = build_two_ion(model).evaluate(0.75)
    labels = {lbl: i for i, lbl in enumerate(TWO_ION_LABELS)}
    assert m[labels["00"], labels["00"]] == 0.0
    assert m[labels["e0"], labels["e0"]] == pytest.approx(-TWO_PI * 1.0)
    assert m[labels["0e"], labels["0e"]] == pytest.approx(-TWO_PI * -2.0)
    ee = labels["ee"]
    assert m[ee, ee] == pytest.approx(-TWO_PI * 1.0 + TWO_PI * 2.0 + TWO_PI * 15.0)


def test_two_ion_drive_acts_on_the_selected_ion_only():
    pulse = CATALOG["gauss-naive"]
    labels = {lbl: i for i, lbl in enumerate(TWO_ION_LABELS)}
    mt = build_two_ion(
        TwoIonModel(0.0, 0.0, pulse, drive_ion="target", legs="0")
    ).evaluate(0.75)
    assert mt[labels["0e"], labels["00"]] != 0.0
    assert mt[labels["e0"], labels["00"]] == 0.0
    mc = build_two_ion(
        TwoIonModel(0.0, 0.0, pulse, drive_ion="control", legs="0")
    ).evaluate(0.75)
    assert mc[labels["e0"], labels["00"]] != 0.0
    assert mc[labels["0e"], labels["00"]] == 0.0


def test_label_orders():
    assert LAMBDA_LABELS == ("0", "1", "e")
    assert TWO_ION_LABELS[0] == "00"
    assert TWO_ION_LABELS[4] == "11"
    assert TWO_ION_LABELS[8] == "ee"
    assert DEFAULT_DIPOLE_SHIFT_MHZ == 15.0


def test_model_validation():
    pulse = CATALOG["gauss-naive"]
    with pytest.raises(ValueError):
        LambdaModel(0.0, pulse, legs="2")
    with pytest.raises(ValueError):
        TwoIonModel(0.0, 0.0, pulse, drive_ion="both")
