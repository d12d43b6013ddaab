"""Gate programs assembled from catalog pi-pulses.

A robust phase shift on the bright ground-state superposition is two
back-to-back pi-pulses on |1bar> <-> |e>, the second with its global phase
shifted by 180 + theta degrees; in the (|0>, |1>) basis this acts as

    U(theta, phi) = e^{i theta/2} [[cos(theta/2),          i e^{i phi} sin(theta/2)],
                                   [i e^{-i phi} sin(theta/2),        cos(theta/2)]]

with phi the superposition phase of the bright state.  Appending the same
pulse+inverse pair on the orthogonal superposition compensates the
detuning-dependent phase so it becomes global.  The 12-step program extends
this to two ions: the control ion is parked in |e> (conditioned on |0>,
then on |1>) while the target runs the rotation or its compensating pairs,
the dipole shift blocking every step that faces an excited neighbor.

Steps are gapless and strictly sequential; only one ion is driven at a
time.  Because the Hamiltonian has no memory, each step is integrated over
its own pulse window and the results are composed in order.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import IntegratorConfig, NDArrayComplex, NDArrayFloat, propagate_array
from .models import (
    DEFAULT_DIPOLE_SHIFT_MHZ,
    LambdaModel,
    TwoIonModel,
    build_lambda,
    build_two_ion,
)
from .pulses import Pulse, phase_shifted, standard_pulses

__all__ = [
    "QUBIT_LABELS",
    "QUBIT_INDICES_NINE",
    "LeakageError",
    "GateStep",
    "GateProgram",
    "phase_gate_program",
    "rotation_program",
    "cnot_program",
    "program_duration",
    "program_listing",
    "run_program_lambda",
    "run_program_two_ion",
    "extract_qubit_unitary",
    "rotation_unitary",
    "controlled_rotation_unitary",
    "embed_qubit_state",
    "qubit_amplitudes",
]

QUBIT_LABELS = ("00", "01", "10", "11")
# Positions of the qubit product states inside the nine-state basis.
QUBIT_INDICES_NINE = (0, 1, 3, 4)

# Basis phase of the dark/bright superpositions used by the two-qubit
# program: the NOT setting of the rotation.
CNOT_BASIS_PHI_DEG = 180.0


class LeakageError(RuntimeError):
    """Residual excited-state population above threshold: a failed pi-pulse,
    not a phase error."""


@dataclass(frozen=True)
class GateStep:
    """One pi-pulse: which ion, which legs, leg phases, pulse, extra phase."""

    ion: str  # "control" | "target"
    legs: str  # "0" | "1" | "both"
    phi0_deg: float
    phi1_deg: float
    pulse_name: str
    extra_phase_deg: float

    def __post_init__(self) -> None:
        if self.ion not in ("control", "target"):
            raise ValueError("ion must be 'control' or 'target'")
        if self.legs not in ("0", "1", "both"):
            raise ValueError("legs must be '0', '1' or 'both'")


@dataclass(frozen=True)
class GateProgram:
    """Ordered pi-pulse steps plus the intended qubit-space action."""

    steps: tuple[GateStep, ...]
    intent: str  # "rotation" | "cnot"
    theta_deg: float
    phi_deg: float

    def __post_init__(self) -> None:
        if self.intent not in ("rotation", "cnot"):
            raise ValueError("intent must be 'rotation' or 'cnot'")


def _wrap360(deg: float) -> float:
    return float(deg) % 360.0


def _bright_step(pulse_name: str, phi_deg: float, extra_deg: float) -> GateStep:
    """Both-leg step whose bright state is |1bar>(phi): phi1 - phi0 = phi."""
    return GateStep(
        ion="target",
        legs="both",
        phi0_deg=0.0,
        phi1_deg=_wrap360(phi_deg),
        pulse_name=pulse_name,
        extra_phase_deg=_wrap360(extra_deg),
    )


def phase_gate_program(theta_deg: float, phi_deg: float, pulse_name: str) -> GateProgram:
    """Two pulses on |1bar>(phi) <-> |e|: pulse, then pulse shifted 180+theta.

    Net action: |1bar> -> e^{i theta} |1bar>, dark state untouched.
    """
    steps = (
        _bright_step(pulse_name, phi_deg, 0.0),
        _bright_step(pulse_name, phi_deg, 180.0 + theta_deg),
    )
    return GateProgram(steps=steps, intent="rotation", theta_deg=float(theta_deg), phi_deg=float(phi_deg))


def rotation_program(
    theta_deg: float, phi_deg: float, pulse_name: str, compensate: bool = True
) -> GateProgram:
    """U(theta, phi) on one ion; optionally compensate the detuning phase.

    The compensation pair drives |0bar>(phi) <-> |e> (the orthogonal
    superposition, bright when phi1 - phi0 = phi + 180) with a pulse and its
    inverse, which only replays the same detuning-dependent phase there.
    """
    steps = list(phase_gate_program(theta_deg, phi_deg, pulse_name).steps)
    if compensate:
        steps.append(_bright_step(pulse_name, phi_deg + 180.0, 0.0))
        steps.append(_bright_step(pulse_name, phi_deg + 180.0, 180.0))
    return GateProgram(
        steps=tuple(steps), intent="rotation", theta_deg=float(theta_deg), phi_deg=float(phi_deg)
    )


def cnot_program(pulse_name: str, theta_deg: float = 180.0) -> GateProgram:
    """The 12-step blockade-conditioned program of the two-qubit gate.

    With theta_deg = 180 this is the C-NOT; adjusting only step 3's extra
    phase to 180 + theta yields the controlled rotation U(theta, 180).
    Steps: (1) pi on control |0>; (2,3) the theta phase gate on the target's
    |1bar>; (4,5) pulse+inverse on |0bar>; (6) inverse of 1; (7) pi on
    control |1>; (8-11) the same target pairs with theta = 0; (12) inverse
    of 7.
    """
    phi = CNOT_BASIS_PHI_DEG
    p = pulse_name
    steps = (
        GateStep("control", "0", 0.0, 0.0, p, 0.0),
        _bright_step(p, phi, 0.0),
        _bright_step(p, phi, 180.0 + theta_deg),
        _bright_step(p, phi + 180.0, 0.0),
        _bright_step(p, phi + 180.0, 180.0),
        GateStep("control", "0", 0.0, 0.0, p, 180.0),
        GateStep("control", "1", 0.0, 0.0, p, 0.0),
        _bright_step(p, phi, 0.0),
        _bright_step(p, phi, 180.0),
        _bright_step(p, phi + 180.0, 0.0),
        _bright_step(p, phi + 180.0, 180.0),
        GateStep("control", "1", 0.0, 0.0, p, 180.0),
    )
    return GateProgram(steps=steps, intent="cnot", theta_deg=float(theta_deg), phi_deg=float(phi))


def _resolve_pulse(step: GateStep, catalog) -> Pulse:
    try:
        pulse = catalog[step.pulse_name]
    except KeyError:
        raise KeyError(f"pulse {step.pulse_name!r} is not in the catalog") from None
    if step.extra_phase_deg != 0.0:
        pulse = phase_shifted(pulse, step.extra_phase_deg)
    return pulse


def program_duration(program: GateProgram, catalog=None) -> float:
    """Total duration in us of the gapless step schedule."""
    if catalog is None:
        catalog = standard_pulses()
    return sum(catalog[s.pulse_name].duration_us for s in program.steps)


def program_listing(program: GateProgram, catalog=None) -> str:
    """Line-oriented listing: index, ion, legs, leg phases, pulse, extra phase."""
    if catalog is None:
        catalog = standard_pulses()
    lines = []
    for k, s in enumerate(program.steps, start=1):
        legs = "0+1" if s.legs == "both" else s.legs
        lines.append(
            f"{k:2d}  {s.ion:<7s}  legs {legs:<3s}  phi0 {s.phi0_deg:6.1f}  "
            f"phi1 {s.phi1_deg:6.1f}  {s.pulse_name:<15s}  extra {s.extra_phase_deg:6.1f}"
        )
    total = program_duration(program, catalog)
    lines.append(f"total duration {total:g} us ({len(program.steps)} steps)")
    return "\n".join(lines)


def run_program_lambda(
    program: GateProgram,
    psi: NDArrayComplex,
    detuning_mhz: float | NDArrayFloat,
    catalog=None,
    cfg: IntegratorConfig | None = None,
) -> NDArrayComplex:
    """Run a single-ion program on lambda amplitudes of shape (..., 3).

    Only target-ion steps are allowed here; two-ion programs go through
    run_program_two_ion.
    """
    if catalog is None:
        catalog = standard_pulses()
    y = np.asarray(psi, dtype=np.complex128)
    for step in program.steps:
        if step.ion != "target":
            raise ValueError("single-ion program must not address the control ion")
        pulse = _resolve_pulse(step, catalog)
        model = LambdaModel(
            detuning_mhz=detuning_mhz,
            pulse=pulse,
            phi0_deg=step.phi0_deg,
            phi1_deg=step.phi1_deg,
            legs=step.legs,
        )
        y = propagate_array(y, build_lambda(model), pulse.window[0], pulse.window[1], cfg)
    return y


def run_program_two_ion(
    program: GateProgram,
    psi: NDArrayComplex,
    control_detuning_mhz: float | NDArrayFloat,
    target_detuning_mhz: float | NDArrayFloat,
    dipole_shift_mhz: float = DEFAULT_DIPOLE_SHIFT_MHZ,
    catalog=None,
    cfg: IntegratorConfig | None = None,
) -> NDArrayComplex:
    """Run a two-ion program on nine-state amplitudes of shape (..., 9)."""
    if catalog is None:
        catalog = standard_pulses()
    y = np.asarray(psi, dtype=np.complex128)
    for step in program.steps:
        pulse = _resolve_pulse(step, catalog)
        model = TwoIonModel(
            control_detuning_mhz=control_detuning_mhz,
            target_detuning_mhz=target_detuning_mhz,
            pulse=pulse,
            drive_ion=step.ion,
            legs=step.legs,
            phi0_deg=step.phi0_deg,
            phi1_deg=step.phi1_deg,
            dipole_shift_mhz=dipole_shift_mhz,
        )
        y = propagate_array(y, build_two_ion(model), pulse.window[0], pulse.window[1], cfg)
    return y


def embed_qubit_state(amplitudes: NDArrayComplex) -> NDArrayComplex:
    """Lift qubit amplitudes (00, 01, 10, 11) into the nine-state basis."""
    amp = np.asarray(amplitudes, dtype=np.complex128)
    if amp.shape[-1] != 4:
        raise ValueError("expected four qubit amplitudes")
    out = np.zeros(amp.shape[:-1] + (9,), dtype=np.complex128)
    for col, idx in enumerate(QUBIT_INDICES_NINE):
        out[..., idx] = amp[..., col]
    return out


def qubit_amplitudes(nine: NDArrayComplex) -> NDArrayComplex:
    """Restrict nine-state amplitudes to the (00, 01, 10, 11) block."""
    arr = np.asarray(nine, dtype=np.complex128)
    return arr[..., list(QUBIT_INDICES_NINE)]


def _is_two_ion(program: GateProgram) -> bool:
    return any(s.ion == "control" for s in program.steps)


def extract_qubit_unitary(
    program: GateProgram,
    control_detuning_mhz: float = 0.0,
    target_detuning_mhz: float = 0.0,
    dipole_shift_mhz: float = DEFAULT_DIPOLE_SHIFT_MHZ,
    catalog=None,
    cfg: IntegratorConfig | None = None,
    leakage_tol: float = 1e-4,
) -> NDArrayComplex:
    """Qubit-space matrix of a program from basis-state propagation.

    Single-ion programs give a 2x2 matrix over (|0>, |1>) at the target
    detuning; two-ion programs a 4x4 over (00, 01, 10, 11).  Columns are the
    final states; the global phase is fixed by making the largest-magnitude
    entry of the first column real positive.  Raises LeakageError when any
    probed basis state retains more than leakage_tol excited population,
    which signals a failed pi-pulse rather than a phase error.
    """
    if _is_two_ion(program):
        basis = np.zeros((4, 9), dtype=np.complex128)
        for col, idx in enumerate(QUBIT_INDICES_NINE):
            basis[col, idx] = 1.0
        final = run_program_two_ion(
            program,
            basis,
            control_detuning_mhz,
            target_detuning_mhz,
            dipole_shift_mhz,
            catalog,
            cfg,
        )
        qubit = qubit_amplitudes(final)
    else:
        basis = np.zeros((2, 3), dtype=np.complex128)
        basis[0, 0] = 1.0
        basis[1, 1] = 1.0
        final = run_program_lambda(program, basis, target_detuning_mhz, catalog, cfg)
        qubit = final[..., :2]
    leak = 1.0 - np.sum(np.abs(qubit) ** 2, axis=-1)
    worst = float(np.max(leak))
    if worst > leakage_tol:
        raise LeakageError(f"excited-state leakage {worst:.3e} exceeds {leakage_tol:.1e}")
    matrix = qubit.T.copy()  # columns = evolved basis states
    anchor = int(np.argmax(np.abs(matrix[:, 0])))
    phase = matrix[anchor, 0]
    matrix *= cmath.exp(-1j * math.atan2(phase.imag, phase.real))
    return matrix


def rotation_unitary(theta_deg: float, phi_deg: float) -> NDArrayComplex:
    """Ideal qubit rotation: phase theta on the bright state of phase phi."""
    half = 0.5 * math.radians(theta_deg)
    ephi = cmath.exp(1j * math.radians(phi_deg))
    u = np.array(
        [
            [math.cos(half), 1j * ephi * math.sin(half)],
            [1j * math.sin(half) / ephi, math.cos(half)],
        ],
        dtype=np.complex128,
    )
    return cmath.exp(1j * half) * u


def controlled_rotation_unitary(theta_deg: float, phi_deg: float) -> NDArrayComplex:
    """Ideal two-qubit action: identity with control |0>, U(theta, phi) with |1>."""
    u = np.eye(4, dtype=np.complex128)
    u[2:, 2:] = rotation_unitary(theta_deg, phi_deg)
    return u
