"""Detuning sweeps, deviation metrics, Bloch traces, and CSV output.

Sweeps evaluate grids of detunings through the simulator and collect the
results as labeled columns.  Grids are processed in fixed-size chunks so
that sequential and parallel execution produce bitwise-identical rows:
each chunk is one lockstep batch regardless of how chunks are scheduled.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import IntegratorConfig, propagate_array
from .gates import (
    CNOT_BASIS_PHI_DEG,
    QUBIT_INDICES_NINE,
    QUBIT_LABELS,
    cnot_program,
    controlled_rotation_unitary,
    embed_qubit_state,
    qubit_amplitudes,
    run_program_two_ion,
)
from .models import DEFAULT_DIPOLE_SHIFT_MHZ, TwoLevelModel, build_two_level
from .pulses import Pulse, standard_pulses

__all__ = [
    "KIND_SINGLE",
    "KIND_CNOT_1D",
    "KIND_CNOT_2D",
    "BENCHMARK_INPUT_AMPLITUDES",
    "SweepSpec",
    "SweepResult",
    "DeviationSummary",
    "RegionStats",
    "excitation_profile",
    "cnot_sweep",
    "deviation_metrics",
    "bloch_trajectory",
    "write_csv",
    "ideal_cnot_output",
]

KIND_SINGLE = "single-pulse"
KIND_CNOT_1D = "cnot-1d"
KIND_CNOT_2D = "cnot-2d"

SINGLE_GRID_DEFAULT = (-10.0, 10.0, 401)
CNOT_1D_GRID_DEFAULT = (-10.0, 10.0, 201)
CNOT_2D_GRID_DEFAULT = (-0.5, 0.5, 21)

# Canonical benchmark input: populations 0.1/0.2/0.3/0.4 on 00/01/10/11.
BENCHMARK_INPUT_AMPLITUDES = (math.sqrt(0.1), math.sqrt(0.2), math.sqrt(0.3), math.sqrt(0.4))

IN_BAND_EDGE_MHZ = 0.5
OUT_BAND_EDGE_MHZ = 5.0

# Rows per lockstep batch.  Fixed so the chunk partition, and hence every
# adaptive step decision, is identical under any scheduling of the chunks.
_CHUNK_ROWS = 64

# Relative phases are undefined where an amplitude vanishes.
_PHASE_AMPLITUDE_FLOOR = 1e-6

_POPULATION_SUM_TOL = 1e-6

SINGLE_COLUMNS = ("detuning_mhz", "p_excited")
CNOT_1D_COLUMNS = (
    "detuning_mhz",
    "p00",
    "p01",
    "p10",
    "p11",
    "leak_e",
    "phase01_deg",
    "phase10_deg",
    "phase11_deg",
)
CNOT_2D_COLUMNS = ("dc_mhz", "dt_mhz") + CNOT_1D_COLUMNS[1:]


@dataclass(frozen=True)
class SweepSpec:
    """One sweep request: what to run, over which grid, from which state."""

    kind: str
    pulse: str | Pulse
    axes: tuple[tuple[float, float, int], ...] = ()
    initial_state: tuple[complex, ...] = BENCHMARK_INPUT_AMPLITUDES
    theta_deg: float = 180.0
    dipole_shift_mhz: float = DEFAULT_DIPOLE_SHIFT_MHZ
    integrator: IntegratorConfig | None = None

    def __post_init__(self) -> None:
        if self.kind not in (KIND_SINGLE, KIND_CNOT_1D, KIND_CNOT_2D):
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        axes = self.axes
        if not axes:
            defaults = {
                KIND_SINGLE: (SINGLE_GRID_DEFAULT,),
                KIND_CNOT_1D: (CNOT_1D_GRID_DEFAULT,),
                KIND_CNOT_2D: (CNOT_2D_GRID_DEFAULT, CNOT_2D_GRID_DEFAULT),
            }
            axes = defaults[self.kind]
            object.__setattr__(self, "axes", axes)
        expected = 2 if self.kind == KIND_CNOT_2D else 1
        if len(axes) != expected:
            raise ValueError(f"{self.kind} needs {expected} axis spec(s), got {len(axes)}")
        for lo, hi, count in axes:
            if count < 2:
                raise ValueError("grid count must be >= 2")
            if not lo < hi:
                raise ValueError("grid min must be < max")
        if self.kind != KIND_SINGLE:
            state = np.asarray(self.initial_state, dtype=np.complex128)
            if state.shape != (4,):
                raise ValueError("initial_state must hold four qubit amplitudes")
            if abs(float(np.sum(np.abs(state) ** 2)) - 1.0) > 1e-9:
                raise ValueError("initial_state must be normalized")


@dataclass(frozen=True)
class SweepResult:
    """Sorted grid rows with named columns."""

    kind: str
    pulse_name: str
    columns: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.ndim != 2 or self.data.shape[1] != len(self.columns):
            raise ValueError("data shape does not match columns")
        if "leak_e" in self.columns:
            cols = [self.columns.index(f"p{l}") for l in QUBIT_LABELS]
            cols.append(self.columns.index("leak_e"))
            total = self.data[:, cols].sum(axis=1)
            if np.max(np.abs(total - 1.0)) > _POPULATION_SUM_TOL:
                raise ValueError("per-point populations do not sum to 1")

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]


@dataclass(frozen=True)
class RegionStats:
    max_deviation: float
    mean_deviation: float
    max_phase_error_deg: float | None
    points: int


@dataclass(frozen=True)
class DeviationSummary:
    max_deviation: float
    mean_deviation: float
    max_phase_error_deg: float | None
    in_band: RegionStats | None
    out_band: RegionStats | None


def _grid(axis: tuple[float, float, int]) -> np.ndarray:
    lo, hi, count = axis
    return np.linspace(lo, hi, count)


def _resolve(pulse: str | Pulse) -> Pulse:
    if isinstance(pulse, Pulse):
        return pulse
    catalog = standard_pulses()
    try:
        return catalog[pulse]
    except KeyError:
        raise KeyError(f"unknown pulse {pulse!r}; catalog: {', '.join(catalog)}") from None


def _chunks(n: int) -> list[tuple[int, int]]:
    return [(i, min(i + _CHUNK_ROWS, n)) for i in range(0, n, _CHUNK_ROWS)]


def _single_chunk(spec: SweepSpec, detunings: np.ndarray) -> np.ndarray:
    pulse = _resolve(spec.pulse)
    h = build_two_level(TwoLevelModel(detunings, pulse))
    psi = np.zeros((detunings.size, 2), dtype=np.complex128)
    psi[:, 0] = 1.0
    final = propagate_array(psi, h, pulse.window[0], pulse.window[1], spec.integrator)
    return np.column_stack([detunings, np.abs(final[:, 1]) ** 2])


def ideal_cnot_output(amplitudes: np.ndarray, theta_deg: float = 180.0) -> np.ndarray:
    """Qubit amplitudes after the ideal controlled rotation on the input."""
    u = controlled_rotation_unitary(theta_deg, CNOT_BASIS_PHI_DEG)
    return u @ np.asarray(amplitudes, dtype=np.complex128)


def _phase_errors(final_qubit: np.ndarray, ideal: np.ndarray) -> np.ndarray:
    # Relative phase of each label against |00>, minus the ideal value;
    # NaN wherever either amplitude is too small to carry a phase.
    rows, cols = final_qubit.shape[0], 3
    out = np.full((rows, cols), np.nan)
    ref = final_qubit[:, 0]
    ideal_ok = np.abs(ideal) > _PHASE_AMPLITUDE_FLOOR
    if not ideal_ok[0]:
        return out
    ideal_rel = np.angle(ideal[1:] / ideal[0])
    ref_ok = np.abs(ref) > _PHASE_AMPLITUDE_FLOOR
    for j in range(cols):
        if not ideal_ok[1 + j]:
            continue
        amp = final_qubit[:, 1 + j]
        ok = ref_ok & (np.abs(amp) > _PHASE_AMPLITUDE_FLOOR)
        err = np.angle(amp[ok] / ref[ok]) - ideal_rel[j]
        err = np.mod(err + np.pi, 2.0 * np.pi) - np.pi
        out[ok, j] = np.degrees(err)
    return out


def _cnot_chunk(spec: SweepSpec, dc: np.ndarray, dt: np.ndarray) -> np.ndarray:
    catalog = dict(standard_pulses())
    if isinstance(spec.pulse, Pulse):
        if not spec.pulse.name:
            raise ValueError("a pulse used in a gate sweep needs a name")
        pulse_name = spec.pulse.name
        catalog[pulse_name] = spec.pulse
    else:
        pulse_name = spec.pulse
    program = cnot_program(pulse_name, theta_deg=spec.theta_deg)
    state = np.asarray(spec.initial_state, dtype=np.complex128)
    psi = np.broadcast_to(embed_qubit_state(state), (dc.size, 9)).copy()
    final = run_program_two_ion(
        program,
        psi,
        dc,
        dt,
        dipole_shift_mhz=spec.dipole_shift_mhz,
        catalog=catalog,
        cfg=spec.integrator,
    )
    qubit = qubit_amplitudes(final)
    pops = np.abs(qubit) ** 2
    excited = [i for i in range(9) if i not in QUBIT_INDICES_NINE]
    leak = (np.abs(final[:, excited]) ** 2).sum(axis=1)
    ideal = ideal_cnot_output(state, spec.theta_deg)
    phases = _phase_errors(qubit, ideal)
    lead = [dc] if spec.kind == KIND_CNOT_1D else [dc, dt]
    return np.column_stack([*lead, pops, leak, phases])


def _run_chunk(payload: tuple[SweepSpec, np.ndarray, np.ndarray | None]) -> np.ndarray:
    spec, a, b = payload
    if spec.kind == KIND_SINGLE:
        return _single_chunk(spec, a)
    return _cnot_chunk(spec, a, b)


def _sweep_rows(spec: SweepSpec, workers: int = 1) -> np.ndarray:
    if spec.kind == KIND_SINGLE:
        points = _grid(spec.axes[0])
        payloads = [(spec, points[lo:hi], None) for lo, hi in _chunks(points.size)]
    elif spec.kind == KIND_CNOT_1D:
        points = _grid(spec.axes[0])
        payloads = [(spec, points[lo:hi], points[lo:hi]) for lo, hi in _chunks(points.size)]
    else:
        dc = _grid(spec.axes[0])
        dt = _grid(spec.axes[1])
        grid_c = np.repeat(dc, dt.size)
        grid_t = np.tile(dt, dc.size)
        payloads = [(spec, grid_c[lo:hi], grid_t[lo:hi]) for lo, hi in _chunks(grid_c.size)]
    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_run_chunk, payloads))
    else:
        blocks = [_run_chunk(p) for p in payloads]
    return np.vstack(blocks)


def excitation_profile(
    pulse: str | Pulse,
    grid: tuple[float, float, int] = SINGLE_GRID_DEFAULT,
    cfg: IntegratorConfig | None = None,
    workers: int = 1,
) -> SweepResult:
    """Excited-state population of a driven two-level ion versus detuning."""
    spec = SweepSpec(kind=KIND_SINGLE, pulse=pulse, axes=(grid,), integrator=cfg)
    name = pulse if isinstance(pulse, str) else pulse.name
    return SweepResult(KIND_SINGLE, name, SINGLE_COLUMNS, _sweep_rows(spec, workers))


def cnot_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Final qubit populations and phase errors of the 12-pulse sequence.

    1D sweeps detune both ions together; 2D sweeps them independently.
    Phase columns hold the relative phase of each label against |00>
    minus the ideal value, NaN where an amplitude is below 1e-6.
    """
    if spec.kind not in (KIND_CNOT_1D, KIND_CNOT_2D):
        raise ValueError("cnot_sweep needs a cnot-1d or cnot-2d spec")
    columns = CNOT_1D_COLUMNS if spec.kind == KIND_CNOT_1D else CNOT_2D_COLUMNS
    name = spec.pulse if isinstance(spec.pulse, str) else spec.pulse.name
    return SweepResult(spec.kind, name, columns, _sweep_rows(spec, workers))


def _region_mask(result: SweepResult, lo: float | None, hi: float | None) -> np.ndarray:
    axes = 2 if result.kind == KIND_CNOT_2D else 1
    mags = np.abs(result.data[:, :axes])
    mask = np.ones(result.data.shape[0], dtype=bool)
    if lo is not None:
        mask &= (mags >= lo).all(axis=1)
    if hi is not None:
        mask &= (mags <= hi).all(axis=1)
    return mask


def _stats(devs: np.ndarray, phases: np.ndarray) -> tuple[float, float, float | None]:
    max_dev = float(np.max(devs))
    mean_dev = float(np.mean(devs))
    finite = phases[np.isfinite(phases)]
    phase = float(np.max(np.abs(finite))) if finite.size else None
    return max_dev, mean_dev, phase


def deviation_metrics(result: SweepResult, ideal: dict[str, float]) -> DeviationSummary:
    """Aggregate population and phase errors against an ideal distribution.

    Regions: in-band means every detuning axis within 0.5 MHz, out-of-band
    means every axis at least 5 MHz out.  Empty regions report None.
    """
    if result.kind == KIND_SINGLE:
        raise ValueError("deviation metrics apply to cnot sweeps")
    missing = set(QUBIT_LABELS) - set(ideal)
    if missing:
        raise ValueError(f"ideal distribution missing labels {sorted(missing)}")
    target = np.array([ideal[l] for l in QUBIT_LABELS])
    if abs(float(target.sum()) - 1.0) > 1e-9:
        raise ValueError("ideal distribution must sum to 1")
    pop_cols = [result.columns.index(f"p{l}") for l in QUBIT_LABELS]
    devs = np.abs(result.data[:, pop_cols] - target)
    phase_cols = [result.columns.index(c) for c in ("phase01_deg", "phase10_deg", "phase11_deg")]
    phases = result.data[:, phase_cols]
    max_dev, mean_dev, max_phase = _stats(devs, phases)

    def region(lo, hi):
        mask = _region_mask(result, lo, hi)
        if not mask.any():
            return None
        m, mn, ph = _stats(devs[mask], phases[mask])
        return RegionStats(m, mn, ph, int(mask.sum()))

    return DeviationSummary(
        max_deviation=max_dev,
        mean_deviation=mean_dev,
        max_phase_error_deg=max_phase,
        in_band=region(None, IN_BAND_EDGE_MHZ),
        out_band=region(OUT_BAND_EDGE_MHZ, None),
    )


def bloch_trajectory(
    pulse: str | Pulse,
    detuning_mhz: float = 0.0,
    samples: int = 201,
    cfg: IntegratorConfig | None = None,
) -> np.ndarray:
    """Bloch components of a driven two-level ion at uniform times.

    Returns rows (time_us, sx, sy, sz) over the pulse window; the ground
    state sits at the south pole (0, 0, -1).
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    p = _resolve(pulse)
    h = build_two_level(TwoLevelModel(float(detuning_mhz), p))
    times = np.linspace(p.window[0], p.window[1], samples)
    psi = np.array([1.0, 0.0], dtype=np.complex128)
    rows = np.empty((samples, 4))
    for k, t in enumerate(times):
        if k:
            psi = propagate_array(psi, h, times[k - 1], t, cfg)
        cross = psi[0].conjugate() * psi[1]
        rows[k] = (t, 2.0 * cross.real, 2.0 * cross.imag, abs(psi[1]) ** 2 - abs(psi[0]) ** 2)
    return rows


def write_csv(result_or_rows, path, columns: tuple[str, ...] | None = None) -> None:
    """Write rows with a header; floats carry 12 significant digits."""
    if isinstance(result_or_rows, SweepResult):
        rows = result_or_rows.data
        columns = result_or_rows.columns
    else:
        rows = np.asarray(result_or_rows)
        if columns is None:
            raise ValueError("columns required when writing bare rows")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([f"{v:.12g}" for v in row])
