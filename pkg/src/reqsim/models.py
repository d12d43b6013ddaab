"""Hamiltonian builders for driven ions: a two-level transition, a
three-level lambda ion, and two dipole-coupled ions over nine product states.

Detunings are cyclic MHz (laser minus ion transition frequency) and enter as
-2 pi Delta on the excited diagonals.  Basis orders are (g, e) for the
two-level case, (0, 1, e) for the lambda ion, and the product labels
"ab" (control level a, target level b over {0, 1, e}) for the two-ion
space, index 3a + b.

Field-phase convention: the |q> <-> |e> leg driven with phase phi_q carries
the matrix element <e|H|q> = env(t) e^{+i phi_q} / 2, i.e. the conjugate
element <q|H|e> holds env*(t) e^{-i phi_q} / 2.  With this sign the ground
superposition of phase phi = phi_1 - phi_0 is dark: it decouples from |e>
whenever both legs are driven with those phases.

When both legs share one envelope, each leg carries env/sqrt(2), so the
bright superposition is driven at exactly the envelope's Rabi frequency and
a catalog pi-pulse stays a pi-pulse on the bright transition; a single
addressed leg carries the full envelope.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import TWO_PI, HamiltonianFn, NDArrayComplex, NDArrayFloat, drive_hamiltonian
from .pulses import Pulse, pulse_pieces

__all__ = [
    "TWO_LEVEL_LABELS",
    "LAMBDA_LABELS",
    "TWO_ION_LABELS",
    "DEFAULT_DIPOLE_SHIFT_MHZ",
    "TwoLevelModel",
    "LambdaModel",
    "TwoIonModel",
    "DarkBrightBasis",
    "build_two_level",
    "build_lambda",
    "build_two_ion",
    "dark_bright",
]

TWO_LEVEL_LABELS = ("g", "e")
LAMBDA_LABELS = ("0", "1", "e")
TWO_ION_LABELS = tuple(a + b for a in ("0", "1", "e") for b in ("0", "1", "e"))

# Places blocked transitions well outside the 5 MHz no-transfer band.
DEFAULT_DIPOLE_SHIFT_MHZ = 15.0

_LEG_CHOICES = ("0", "1", "both")


@dataclass(frozen=True, eq=False)
class TwoLevelModel:
    """One driven transition at a fixed (or batched) detuning."""

    detuning_mhz: float | NDArrayFloat
    pulse: Pulse


@dataclass(frozen=True, eq=False)
class LambdaModel:
    """Lambda ion: ground |0>, |1> coupled to a common |e> by one envelope.

    legs selects which transition(s) the envelope drives; phi0/phi1 are the
    per-leg field phases (only the driven legs' phases matter).
    """

    detuning_mhz: float | NDArrayFloat
    pulse: Pulse
    phi0_deg: float = 0.0
    phi1_deg: float = 0.0
    legs: str = "both"

    def __post_init__(self) -> None:
        if self.legs not in _LEG_CHOICES:
            raise ValueError(f"legs must be one of {_LEG_CHOICES}")


@dataclass(frozen=True, eq=False)
class TwoIonModel:
    """Two spectrally distinct ions; exactly one is driven per step.

    The doubly excited state |ee> is shifted by +2 pi dipole_shift_mhz,
    which is what blocks the target while the control is excited.
    """

    control_detuning_mhz: float | NDArrayFloat
    target_detuning_mhz: float | NDArrayFloat
    pulse: Pulse
    drive_ion: str = "target"
    legs: str = "both"
    phi0_deg: float = 0.0
    phi1_deg: float = 0.0
    dipole_shift_mhz: float = DEFAULT_DIPOLE_SHIFT_MHZ

    def __post_init__(self) -> None:
        if self.drive_ion not in ("control", "target"):
            raise ValueError("drive_ion must be 'control' or 'target'")
        if self.legs not in _LEG_CHOICES:
            raise ValueError(f"legs must be one of {_LEG_CHOICES}")


@dataclass(frozen=True)
class DarkBrightBasis:
    """Ground-state basis |0bar> = (|0> - e^{-i phi}|1>)/sqrt2 and
    |1bar> = (|0> + e^{-i phi}|1>)/sqrt2."""

    phi_deg: float
    dark: NDArrayComplex
    bright: NDArrayComplex


def dark_bright(phi_deg: float) -> DarkBrightBasis:
    """Dark/bright ground-state basis for superposition phase phi."""
    z = cmath.exp(-1j * math.radians(phi_deg)) / math.sqrt(2.0)
    dark = np.array([1.0 / math.sqrt(2.0), -z], dtype=np.complex128)
    bright = np.array([1.0 / math.sqrt(2.0), z], dtype=np.complex128)
    return DarkBrightBasis(phi_deg=float(phi_deg), dark=dark, bright=bright)


def _lambda_lowering(legs: str, phi0_deg: float, phi1_deg: float) -> NDArrayComplex:
    low = np.zeros((3, 3), dtype=np.complex128)
    if legs == "0":
        low[2, 0] = cmath.exp(1j * math.radians(phi0_deg))
    elif legs == "1":
        low[2, 1] = cmath.exp(1j * math.radians(phi1_deg))
    else:
        s = 1.0 / math.sqrt(2.0)
        low[2, 0] = s * cmath.exp(1j * math.radians(phi0_deg))
        low[2, 1] = s * cmath.exp(1j * math.radians(phi1_deg))
    return low


def build_two_level(model: TwoLevelModel) -> HamiltonianFn:
    """H = [[0, env*/2], [env/2, -2 pi Delta]] in basis (g, e)."""
    delta = np.asarray(model.detuning_mhz, dtype=np.float64)
    diag = np.zeros(delta.shape + (2,), dtype=np.float64)
    diag[..., 1] = -TWO_PI * delta
    low = np.zeros((2, 2), dtype=np.complex128)
    low[1, 0] = 1.0
    return drive_hamiltonian(diag, low, pulse_pieces(model.pulse))


def build_lambda(model: LambdaModel) -> HamiltonianFn:
    """Lambda Hamiltonian in basis (0, 1, e) with detuning on |e>."""
    delta = np.asarray(model.detuning_mhz, dtype=np.float64)
    diag = np.zeros(delta.shape + (3,), dtype=np.float64)
    diag[..., 2] = -TWO_PI * delta
    low = _lambda_lowering(model.legs, model.phi0_deg, model.phi1_deg)
    return drive_hamiltonian(diag, low, pulse_pieces(model.pulse))


def build_two_ion(model: TwoIonModel) -> HamiltonianFn:
    """Nine-state Hamiltonian: driven ion's coupling tensored with identity.

    Diagonal: -2 pi Delta_c on control-excited states, -2 pi Delta_t on
    target-excited states, +2 pi Delta_dip extra on |ee>.
    """
    dc = np.asarray(model.control_detuning_mhz, dtype=np.float64)
    dt = np.asarray(model.target_detuning_mhz, dtype=np.float64)
    shape = np.broadcast_shapes(dc.shape, dt.shape)
    dc = np.broadcast_to(dc, shape)
    dt = np.broadcast_to(dt, shape)
    diag = np.zeros(shape + (9,), dtype=np.float64)
    for a in range(3):
        for b in range(3):
            idx = 3 * a + b
            if a == 2:
                diag[..., idx] -= TWO_PI * dc
            if b == 2:
                diag[..., idx] -= TWO_PI * dt
            if a == 2 and b == 2:
                diag[..., idx] += TWO_PI * model.dipole_shift_mhz
    low3 = _lambda_lowering(model.legs, model.phi0_deg, model.phi1_deg)
    if model.drive_ion == "control":
        low = np.kron(low3, np.eye(3, dtype=np.complex128))
    else:
        low = np.kron(np.eye(3, dtype=np.complex128), low3)
    return drive_hamiltonian(diag, low, pulse_pieces(model.pulse))
