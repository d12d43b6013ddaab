"""Time-dependent Schrodinger propagation for driven few-level systems.

Times are microseconds, Hamiltonian entries angular frequencies (rad/us),
and hbar = 1, so the equation of motion is i d|psi>/dt = H(t)|psi>.
Frequencies quoted in MHz elsewhere in the package are cyclic and are
multiplied by 2*pi on their way into a Hamiltonian; see `TWO_PI`.

Two integration schemes are provided: an embedded Dormand-Prince 4(5) pair
with proportional step-size control (the default) and a fixed-step classical
Runge-Kutta scheme kept for convergence checks.  Both advance whole stacks of
state vectors in lock step: a Hamiltonian built from `drive_hamiltonian` may
carry a batch of static diagonals (one per detuning grid point) under a
single shared drive envelope, so a dense detuning sweep costs one envelope
evaluation per stage regardless of grid size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import numpy.typing as npt

NDArrayFloat = npt.NDArray[np.float64]
NDArrayComplex = npt.NDArray[np.complex128]

__all__ = [
    "TWO_PI",
    "IntegrationError",
    "StateVector",
    "DrivePiece",
    "HamiltonianFn",
    "IntegratorConfig",
    "drive_hamiltonian",
    "propagate",
    "propagate_array",
    "populations",
    "relative_phases",
    "wrap_angle_deg",
]

TWO_PI = 2.0 * math.pi

_ALLOWED_DIMS = (2, 3, 9)

# Norm guard applied to propagation output.  Looser than the construction
# default on purpose: it flags integrator blow-up without masking it behind a
# tolerance meant for freshly prepared states.
_PROPAGATION_NORM_TOL = 1e-6


class IntegrationError(RuntimeError):
    """Propagation produced non-finite or badly non-normalized amplitudes."""


class StateVector:
    """Unit-norm complex amplitudes over a labeled basis.

    Supported dimensions are 2 (driven transition), 3 (lambda ion) and
    9 (two-ion product space).
    """

    __slots__ = ("amplitudes", "basis_labels")

    def __init__(
        self,
        amplitudes: Sequence[complex] | NDArrayComplex,
        basis_labels: Sequence[str],
        *,
        norm_tol: float = 1e-9,
    ) -> None:
        amp = np.asarray(amplitudes, dtype=np.complex128)
        if amp.ndim != 1:
            raise ValueError("amplitudes must be one-dimensional")
        if amp.size not in _ALLOWED_DIMS:
            raise ValueError(f"dimension must be one of {_ALLOWED_DIMS}, got {amp.size}")
        labels = tuple(str(s) for s in basis_labels)
        if len(labels) != amp.size:
            raise ValueError("basis_labels length must match the amplitude count")
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be unique")
        if not np.all(np.isfinite(amp.view(np.float64))):
            raise IntegrationError("non-finite amplitude")
        norm_err = abs(float(np.linalg.norm(amp)) - 1.0)
        if norm_err > norm_tol:
            raise ValueError(f"state norm deviates from 1 by {norm_err:.3e}")
        self.amplitudes = amp
        self.basis_labels = labels

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    def __repr__(self) -> str:
        pairs = ", ".join(
            f"{lbl}: {a.real:+.4f}{a.imag:+.4f}j" for lbl, a in zip(self.basis_labels, self.amplitudes)
        )
        return f"StateVector({pairs})"


@dataclass(frozen=True)
class DrivePiece:
    """One smooth branch of a drive envelope on [t_start, t_end].

    `envelope` maps time (us) to a complex Rabi frequency (rad/us) and must
    be smooth on the closed span, so evaluating it at either endpoint gives
    the correct one-sided limit; composite pulses with phase jumps are
    represented as one piece per sub-pulse.  envelope None means no drive in
    the span, which the integrator advances exactly by diagonal phases.
    """

    t_start: float
    t_end: float
    envelope: Callable[[float], complex] | None

    def __post_init__(self) -> None:
        if not self.t_end > self.t_start:
            raise ValueError("piece must have positive duration")


@dataclass(frozen=True)
class _DriveTerms:
    """Structured form H(t) = diag(static) + env(t)/2 * L + conj(env(t))/2 * L^dag."""

    static_diag: NDArrayFloat  # (..., d) rad/us
    lowering: NDArrayComplex  # (d, d), couples lower levels into upper ones
    pieces: tuple[DrivePiece, ...]  # ordered, non-overlapping


@dataclass(frozen=True)
class HamiltonianFn:
    """Hermitian matrix of angular frequencies as a function of time.

    `evaluate` maps a time in us to the matrix in rad/us; a batched
    Hamiltonian returns shape (..., d, d) with the batch axes leading.
    `breakpoints` lists times where the matrix is non-smooth (window edges,
    sub-pulse boundaries); the integrator restarts there so step control
    never has to discover a kink by rejection.
    """

    dimension: int
    evaluate: Callable[[float], NDArrayComplex]
    breakpoints: tuple[float, ...] = ()
    _terms: _DriveTerms | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.dimension not in _ALLOWED_DIMS:
            raise ValueError(f"dimension must be one of {_ALLOWED_DIMS}, got {self.dimension}")

    @property
    def batch_shape(self) -> tuple[int, ...]:
        if self._terms is None:
            return ()
        return self._terms.static_diag.shape[:-1]


def _piece_envelope_value(pieces: tuple[DrivePiece, ...], t: float) -> complex:
    """Single-valued envelope lookup: half-open spans [t_start, t_end)."""
    for piece in pieces:
        if piece.t_start <= t < piece.t_end:
            return 0.0 if piece.envelope is None else complex(piece.envelope(t))
    return 0.0


def drive_hamiltonian(
    static_diag: NDArrayFloat,
    lowering: NDArrayComplex,
    pieces: Sequence[DrivePiece],
) -> HamiltonianFn:
    """Build a HamiltonianFn of the form diag + env(t)/2 * L + h.c.

    Parameters
    ----------
    static_diag : array, shape (..., d)
        Static diagonal in rad/us.  Leading axes batch independent systems
        (typically detuning grid points) sharing the same drive.
    lowering : array, shape (d, d)
        Dimensionless coupling pattern; the physical coupling at time t is
        env(t)/2 * lowering plus its Hermitian conjugate.
    pieces : sequence of DrivePiece
        Smooth envelope branches in time order, non-overlapping.  Outside
        every piece the drive is zero.
    """
    diag = np.asarray(static_diag, dtype=np.float64)
    low = np.asarray(lowering, dtype=np.complex128)
    if low.ndim != 2 or low.shape[0] != low.shape[1]:
        raise ValueError("lowering must be a square matrix")
    d = low.shape[0]
    if diag.shape[-1] != d:
        raise ValueError("static_diag last axis must match the lowering dimension")
    parts = tuple(pieces)
    for prev, cur in zip(parts[:-1], parts[1:]):
        if cur.t_start < prev.t_end - 1e-12:
            raise ValueError("drive pieces overlap")
    raising = low.conj().T.copy()

    def _evaluate(t: float) -> NDArrayComplex:
        env = _piece_envelope_value(parts, t)
        h = np.zeros(diag.shape + (d,), dtype=np.complex128)
        idx = np.arange(d)
        h[..., idx, idx] = diag
        h += (0.5 * env) * low + (0.5 * env.conjugate()) * raising
        return h

    edges = sorted({float(p.t_start) for p in parts} | {float(p.t_end) for p in parts})
    terms = _DriveTerms(static_diag=diag, lowering=low, pieces=parts)
    return HamiltonianFn(
        dimension=d,
        evaluate=_evaluate,
        breakpoints=tuple(edges),
        _terms=terms,
    )


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration scheme selection.

    method "adaptive" is the embedded Dormand-Prince 4(5) pair controlled by
    rel_tol/abs_tol; "fixed" is classical RK4 with the given step.  max_step
    caps adaptive steps; when None each smooth segment is capped at an eighth
    of its length.
    """

    method: str = "adaptive"
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    step: float = 1e-3  # us, fixed-step method only
    max_step: float | None = None  # us

    def __post_init__(self) -> None:
        if self.method not in ("adaptive", "fixed"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be strictly positive")
        if self.step <= 0.0:
            raise ValueError("fixed step must be strictly positive")
        if self.max_step is not None and self.max_step <= 0.0:
            raise ValueError("max_step must be strictly positive when given")


# Dormand-Prince 4(5) tableau (the RK45 pair of Dormand & Prince 1980).
_DP_A21 = 1.0 / 5.0
_DP_A31, _DP_A32 = 3.0 / 40.0, 9.0 / 40.0
_DP_A41, _DP_A42, _DP_A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_DP_A51, _DP_A52, _DP_A53, _DP_A54 = (
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
)
_DP_A61, _DP_A62, _DP_A63, _DP_A64, _DP_A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_DP_B1, _DP_B3, _DP_B4, _DP_B5, _DP_B6 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
# Fifth-minus-fourth-order error weights (b - b_hat).
_DP_E1, _DP_E3, _DP_E4, _DP_E5, _DP_E6, _DP_E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _generic_rhs(h: HamiltonianFn) -> Callable[[float, NDArrayComplex], NDArrayComplex]:
    """f(t, y) = -i H(t) y through the evaluate callback."""
    evaluate = h.evaluate

    def _rhs(t: float, y: NDArrayComplex) -> NDArrayComplex:
        mat = np.asarray(evaluate(t), dtype=np.complex128)
        return -1j * np.einsum("...ij,...j->...i", mat, y)

    return _rhs


def _drive_rhs(
    terms: _DriveTerms, envelope: Callable[[float], complex]
) -> Callable[[float, NDArrayComplex], NDArrayComplex]:
    """f(t, y) = -i H(t) y for one smooth envelope branch."""
    diag = terms.static_diag
    # Right-multiplication forms of L y and L^dag y for row-stacked states.
    low_t = np.ascontiguousarray(terms.lowering.T)
    low_c = np.ascontiguousarray(terms.lowering.conj())

    def _rhs(t: float, y: NDArrayComplex) -> NDArrayComplex:
        env = complex(envelope(t))
        hy = diag * y
        hy = hy + (0.5 * env) * (y @ low_t) + (0.5 * env.conjugate()) * (y @ low_c)
        return -1j * hy

    return _rhs


def _error_ratio(err: NDArrayComplex, y0: NDArrayComplex, y1: NDArrayComplex, cfg: IntegratorConfig) -> float:
    scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.max(np.abs(err) / scale))


def _advance_adaptive(
    rhs: Callable[[float, NDArrayComplex], NDArrayComplex],
    y: NDArrayComplex,
    t0: float,
    t1: float,
    cfg: IntegratorConfig,
    max_step: float,
) -> NDArrayComplex:
    """Dormand-Prince 4(5) over one smooth segment [t0, t1]."""
    t = t0
    k1 = rhs(t, y)
    # Initial step guess from the RHS magnitude; a bad guess is corrected by
    # the controller within a step or two and costs nothing deterministic.
    f_norm = float(np.max(np.abs(k1)))
    dt = min(max_step, t1 - t0)
    if f_norm > 0.0:
        dt = min(dt, 0.1 / f_norm)

    while t < t1:
        remaining = t1 - t
        dt = min(dt, remaining)
        # A controller-chosen step this small relative to the segment cannot
        # make progress (the error estimate is roundoff-dominated well before
        # this point); a tiny final step that merely closes the span is fine.
        if dt < remaining and dt <= 1e-12 * (t1 - t0):
            raise IntegrationError("adaptive step underflow; tighten tolerances or check the Hamiltonian")
        k2 = rhs(t + _DP_C[1] * dt, y + dt * (_DP_A21 * k1))
        k3 = rhs(t + _DP_C[2] * dt, y + dt * (_DP_A31 * k1 + _DP_A32 * k2))
        k4 = rhs(t + _DP_C[3] * dt, y + dt * (_DP_A41 * k1 + _DP_A42 * k2 + _DP_A43 * k3))
        k5 = rhs(
            t + _DP_C[4] * dt,
            y + dt * (_DP_A51 * k1 + _DP_A52 * k2 + _DP_A53 * k3 + _DP_A54 * k4),
        )
        k6 = rhs(
            t + dt,
            y + dt * (_DP_A61 * k1 + _DP_A62 * k2 + _DP_A63 * k3 + _DP_A64 * k4 + _DP_A65 * k5),
        )
        y_new = y + dt * (_DP_B1 * k1 + _DP_B3 * k3 + _DP_B4 * k4 + _DP_B5 * k5 + _DP_B6 * k6)
        k7 = rhs(t + dt, y_new)
        err = dt * (
            _DP_E1 * k1 + _DP_E3 * k3 + _DP_E4 * k4 + _DP_E5 * k5 + _DP_E6 * k6 + _DP_E7 * k7
        )
        ratio = _error_ratio(err, y, y_new, cfg)
        if not math.isfinite(ratio):
            raise IntegrationError("non-finite amplitude during adaptive integration")
        if ratio <= 1.0:
            t = t + dt
            y = y_new
            k1 = k7  # first-same-as-last
            factor = _MAX_FACTOR if ratio == 0.0 else min(_MAX_FACTOR, _SAFETY * ratio ** -0.2)
            dt = min(max_step, dt * max(_MIN_FACTOR, factor))
        else:
            dt = dt * max(_MIN_FACTOR, _SAFETY * ratio ** -0.2)
    return y


def _advance_fixed(
    rhs: Callable[[float, NDArrayComplex], NDArrayComplex],
    y: NDArrayComplex,
    t0: float,
    t1: float,
    step: float,
) -> NDArrayComplex:
    """Classical RK4 with the step rounded down to divide the segment."""
    span = t1 - t0
    n = max(1, int(math.ceil(span / step - 1e-12)))
    dt = span / n
    t = t0
    for _ in range(n):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k1)
        k3 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
    return y


def propagate_array(
    psi: NDArrayComplex,
    h: HamiltonianFn,
    t0: float,
    t1: float,
    cfg: IntegratorConfig | None = None,
) -> NDArrayComplex:
    """Propagate amplitudes of shape (..., d) from t0 to t1.

    Leading axes of `psi` are independent systems integrated in lock step;
    they must broadcast against the Hamiltonian's batch shape.  Returns the
    final amplitudes without normalization checks (see `propagate` for the
    checked single-state entry point).
    """
    if cfg is None:
        cfg = IntegratorConfig()
    if t1 < t0:
        raise ValueError("t1 must not precede t0")
    y = np.asarray(psi, dtype=np.complex128)
    if y.shape[-1] != h.dimension:
        raise ValueError(
            f"state dimension {y.shape[-1]} does not match Hamiltonian dimension {h.dimension}"
        )
    batch = h.batch_shape
    if batch:
        y = np.broadcast_to(y, np.broadcast_shapes(y.shape, batch + (h.dimension,))).copy()
    else:
        y = y.copy()
    if t1 == t0:
        return y

    cuts = sorted({float(b) for b in h.breakpoints if t0 < b < t1})
    edges = [t0, *cuts, t1]
    terms = h._terms
    generic_rhs = None if terms is not None else _generic_rhs(h)
    for a, b in zip(edges[:-1], edges[1:]):
        if terms is not None:
            mid = 0.5 * (a + b)
            branch = None
            for piece in terms.pieces:
                if piece.t_start - 1e-12 <= mid <= piece.t_end + 1e-12:
                    branch = piece.envelope
                    break
            if branch is None:
                # No drive here: the diagonal advances exactly by phases.
                y = y * np.exp(-1j * terms.static_diag * (b - a))
                continue
            rhs = _drive_rhs(terms, branch)
        else:
            rhs = generic_rhs
        if cfg.method == "fixed":
            y = _advance_fixed(rhs, y, a, b, cfg.step)
        else:
            max_step = (b - a) / 8.0 if cfg.max_step is None else min(cfg.max_step, b - a)
            y = _advance_adaptive(rhs, y, a, b, cfg, max_step)
    if not np.all(np.isfinite(y.view(np.float64))):
        raise IntegrationError("non-finite amplitude produced; tighten tolerances")
    return y


def propagate(
    state: StateVector,
    h: HamiltonianFn,
    t0: float,
    t1: float,
    cfg: IntegratorConfig | None = None,
) -> StateVector:
    """Solve i d|psi>/dt = H(t)|psi> from t0 to t1 and return the final state.

    Raises IntegrationError when the result is non-finite or its norm has
    drifted past 1e-6 (a sign the step control was defeated, not a rounding
    issue); at the default adaptive tolerances the drift stays below 1e-9.
    """
    if h.batch_shape:
        raise ValueError("propagate takes an unbatched Hamiltonian; use propagate_array")
    if state.dimension != h.dimension:
        raise ValueError(
            f"state dimension {state.dimension} does not match Hamiltonian dimension {h.dimension}"
        )
    amp = propagate_array(state.amplitudes, h, t0, t1, cfg)
    try:
        return StateVector(amp, state.basis_labels, norm_tol=_PROPAGATION_NORM_TOL)
    except ValueError as exc:
        raise IntegrationError(str(exc)) from exc


def populations(state: StateVector) -> Mapping[str, float]:
    """Per-label probabilities |amplitude|^2."""
    probs = np.abs(state.amplitudes) ** 2
    return {lbl: float(p) for lbl, p in zip(state.basis_labels, probs)}


def relative_phases(state: StateVector, reference_label: str) -> Mapping[str, float]:
    """Phase of each amplitude relative to the reference, in (-180, 180] degrees.

    The reference amplitude must have magnitude above 1e-6 or the phase
    origin is numerically meaningless.
    """
    if reference_label not in state.basis_labels:
        raise ValueError(f"unknown reference label {reference_label!r}")
    ref = state.amplitudes[state.basis_labels.index(reference_label)]
    if abs(ref) <= 1e-6:
        raise ValueError("reference amplitude too small to define a phase")
    ref_arg = math.atan2(ref.imag, ref.real)
    out: dict[str, float] = {}
    for lbl, a in zip(state.basis_labels, state.amplitudes):
        if lbl == reference_label:
            continue
        out[lbl] = wrap_angle_deg(math.degrees(math.atan2(a.imag, a.real) - ref_arg))
    return out


def wrap_angle_deg(angle: float) -> float:
    """Wrap an angle in degrees to the interval (-180, 180]."""
    wrapped = math.fmod(angle, 360.0)
    if wrapped <= -180.0:
        wrapped += 360.0
    elif wrapped > 180.0:
        wrapped -= 360.0
    return wrapped
