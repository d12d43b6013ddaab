"""Pulse design and gate simulation for spectrally addressed ion qubits.

The package splits into five layers: ``dynamics`` (generic propagation),
``pulses`` (waveforms and the named catalog), ``models`` (ion level
structures), ``gates`` (step programs and unitary extraction), and the
``sweeps``/``optimizer``/``cli`` harness on top.
"""
from __future__ import annotations

from .dynamics import (
    IntegrationError,
    IntegratorConfig,
    StateVector,
    populations,
    propagate,
    propagate_array,
    relative_phases,
)
from .gates import (
    GateProgram,
    GateStep,
    LeakageError,
    cnot_program,
    controlled_rotation_unitary,
    extract_qubit_unitary,
    phase_gate_program,
    program_duration,
    program_listing,
    rotation_program,
    rotation_unitary,
    run_program_lambda,
    run_program_two_ion,
)
from .models import (
    LambdaModel,
    TwoIonModel,
    TwoLevelModel,
    build_lambda,
    build_two_ion,
    build_two_level,
    dark_bright,
)
from .optimizer import ObjectiveSpec, OptimizerConfig, OptimizeResult, objective, optimize
from .pulses import (
    GAUSS_NAIVE,
    GAUSS_OPT,
    Pulse,
    RECT_NAIVE,
    SECH_DEFAULT,
    gaussian_composite,
    phase_shifted,
    rabi_at,
    rectangular_composite,
    sech_chirp_decomposition,
    standard_pulses,
)
from .sweeps import (
    SweepResult,
    SweepSpec,
    bloch_trajectory,
    cnot_sweep,
    deviation_metrics,
    excitation_profile,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "IntegrationError",
    "IntegratorConfig",
    "StateVector",
    "populations",
    "propagate",
    "propagate_array",
    "relative_phases",
    "GateProgram",
    "GateStep",
    "LeakageError",
    "cnot_program",
    "controlled_rotation_unitary",
    "extract_qubit_unitary",
    "phase_gate_program",
    "program_duration",
    "program_listing",
    "rotation_program",
    "rotation_unitary",
    "run_program_lambda",
    "run_program_two_ion",
    "LambdaModel",
    "TwoIonModel",
    "TwoLevelModel",
    "build_lambda",
    "build_two_ion",
    "build_two_level",
    "dark_bright",
    "ObjectiveSpec",
    "OptimizerConfig",
    "OptimizeResult",
    "objective",
    "optimize",
    "Pulse",
    "RECT_NAIVE",
    "GAUSS_NAIVE",
    "GAUSS_OPT",
    "SECH_DEFAULT",
    "gaussian_composite",
    "phase_shifted",
    "rabi_at",
    "rectangular_composite",
    "sech_chirp_decomposition",
    "standard_pulses",
    "SweepResult",
    "SweepSpec",
    "bloch_trajectory",
    "cnot_sweep",
    "deviation_metrics",
    "excitation_profile",
    "write_csv",
]
