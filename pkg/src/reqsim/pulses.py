"""Complex Rabi-frequency waveforms: rectangular and Gaussian composites and
the chirped hyperbolic-secant pulse.

A composite is a back-to-back train of sub-pulses, each with an area theta_k
(degrees), a constant phase phi_k (degrees), a center time (us) and a width
(us).  The Gaussian form is area-normalized,

    env(t) = sum_k theta_k * e^{-i phi_k} / sqrt(2 pi sigma_k^2)
             * exp(-(t - t_k)^2 / (2 sigma_k^2)),

with each term truncated to the window |t - t_k| <= cutoff_multiple * sigma_k.
The sech pulse is env(t) = Omega_0 * sech(beta (t - t_0))^{1 + i mu}, whose
phase derivative is the tanh frequency sweep mu * beta * tanh(beta (t - t_0)).

Areas and phases are degrees, times us, rates MHz (cyclic; multiplied by 2 pi
internally).  `rabi_at` returns rad/us.  Every pulse carries a global extra
phase delta that multiplies the waveform by e^{-i delta}; shifting it by 180
degrees turns a pulse into its inverse.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence, Union

from .dynamics import TWO_PI, DrivePiece

__all__ = [
    "SubPulse",
    "GaussianComposite",
    "RectangularComposite",
    "SechPulse",
    "Pulse",
    "rabi_at",
    "pulse_pieces",
    "sech_chirp_decomposition",
    "phase_shifted",
    "gaussian_composite",
    "rectangular_composite",
    "standard_pulses",
    "RECT_NAIVE",
    "RECT_NAIVE_ALT",
    "GAUSS_NAIVE",
    "GAUSS_NAIVE_ALT",
    "GAUSS_OPT",
    "SECH_DEFAULT",
    "COMPOSITE_TOTAL_US",
    "SECH_TOTAL_US",
    "NAIVE_AREAS_DEG",
    "NAIVE_PHASES_DEG",
    "OPT_AREAS_DEG",
    "OPT_PHASES_DEG",
]

# Catalog names, addressable from the CLI and gate programs.
RECT_NAIVE = "rect90-180-90"
RECT_NAIVE_ALT = "rect90-180-90-alt"
GAUSS_NAIVE = "gauss-naive"
GAUSS_NAIVE_ALT = "gauss-naive-alt"
GAUSS_OPT = "gauss-opt"
SECH_DEFAULT = "sech-default"

COMPOSITE_TOTAL_US = 1.5
SECH_TOTAL_US = 3.0

NAIVE_AREAS_DEG = (90.0, 180.0, 90.0)
NAIVE_PHASES_DEG = (90.0, 0.0, 90.0)
# Variant with the middle phase at 180 instead of 0, kept for comparison.
NAIVE_ALT_PHASES_DEG = (90.0, 180.0, 90.0)
OPT_AREAS_DEG = (92.50, 192.00, 92.42)
OPT_PHASES_DEG = (96.98, 6.86, 96.23)

SECH_PEAK_MHZ = 2.0
SECH_RATE_MHZ = 0.64
SECH_MU = 3.0


@dataclass(frozen=True)
class SubPulse:
    """One sub-pulse of a composite.

    width_us is the Gaussian sigma for Gaussian composites and the full
    duration for rectangular ones.
    """

    area_deg: float
    phase_deg: float
    center_us: float
    width_us: float

    def __post_init__(self) -> None:
        if self.area_deg < 0.0:
            raise ValueError("sub-pulse area must be non-negative")
        if self.width_us <= 0.0:
            raise ValueError("sub-pulse width must be strictly positive")


def _check_contiguous(spans: Sequence[tuple[float, float]]) -> None:
    for (s0, e0), (s1, e1) in zip(spans[:-1], spans[1:]):
        if s1 < e0 - 1e-9:
            raise ValueError("sub-pulse windows overlap")
        if s1 > e0 + 1e-9:
            raise ValueError("sub-pulse windows leave a gap; composites are contiguous")


@dataclass(frozen=True)
class GaussianComposite:
    """Train of truncated Gaussian sub-pulses, windows [t_k - a, t_k + a]."""

    subpulses: tuple[SubPulse, ...]
    cutoff_multiple: float = 3.5

    def __post_init__(self) -> None:
        if not self.subpulses:
            raise ValueError("composite needs at least one sub-pulse")
        if self.cutoff_multiple <= 0.0:
            raise ValueError("cutoff_multiple must be strictly positive")
        _check_contiguous([self._span(p) for p in self.subpulses])

    def _span(self, p: SubPulse) -> tuple[float, float]:
        a = self.cutoff_multiple * p.width_us
        return (p.center_us - a, p.center_us + a)

    @property
    def support(self) -> tuple[float, float]:
        return (self._span(self.subpulses[0])[0], self._span(self.subpulses[-1])[1])


@dataclass(frozen=True)
class RectangularComposite:
    """Train of constant-amplitude sub-pulses, windows [t_k - w/2, t_k + w/2]."""

    subpulses: tuple[SubPulse, ...]

    def __post_init__(self) -> None:
        if not self.subpulses:
            raise ValueError("composite needs at least one sub-pulse")
        _check_contiguous([self._span(p) for p in self.subpulses])

    def _span(self, p: SubPulse) -> tuple[float, float]:
        half = 0.5 * p.width_us
        return (p.center_us - half, p.center_us + half)

    @property
    def support(self) -> tuple[float, float]:
        return (self._span(self.subpulses[0])[0], self._span(self.subpulses[-1])[1])


@dataclass(frozen=True)
class SechPulse:
    """Chirped hyperbolic-secant pulse env = Omega_0 sech(beta (t-t0))^{1+i mu}.

    peak_mhz (Omega_0) and rate_mhz (beta) are cyclic frequencies by default;
    set cyclic_frequencies False to read them as angular rates (rad/us and
    1/us) instead.
    """

    peak_mhz: float = SECH_PEAK_MHZ
    rate_mhz: float = SECH_RATE_MHZ
    mu: float = SECH_MU
    center_us: float = 0.5 * SECH_TOTAL_US
    duration_us: float = SECH_TOTAL_US
    cyclic_frequencies: bool = True

    def __post_init__(self) -> None:
        if self.peak_mhz <= 0.0 or self.rate_mhz <= 0.0:
            raise ValueError("peak and rate must be strictly positive")
        if self.duration_us <= 0.0:
            raise ValueError("duration must be strictly positive")

    @property
    def support(self) -> tuple[float, float]:
        half = 0.5 * self.duration_us
        return (self.center_us - half, self.center_us + half)

    @property
    def peak_rad_us(self) -> float:
        return self.peak_mhz * TWO_PI if self.cyclic_frequencies else self.peak_mhz

    @property
    def rate_rad_us(self) -> float:
        return self.rate_mhz * TWO_PI if self.cyclic_frequencies else self.rate_mhz


PulseShape = Union[GaussianComposite, RectangularComposite, SechPulse]


@dataclass(frozen=True)
class Pulse:
    """A pulse shape with a global extra phase and an explicit time window.

    The waveform is identically zero outside the window.  If no window is
    given it defaults to the shape's support.
    """

    shape: PulseShape
    extra_phase_deg: float = 0.0
    window: tuple[float, float] | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.window is None:
            object.__setattr__(self, "window", self.shape.support)
        t0, t1 = self.window
        if not t1 > t0:
            raise ValueError("window must have positive duration")

    @property
    def duration_us(self) -> float:
        t0, t1 = self.window
        return t1 - t0


def pulse_pieces(pulse: Pulse) -> tuple[DrivePiece, ...]:
    """Compile a pulse into smooth envelope branches clipped to its window.

    Zero-amplitude sub-pulses compile to drive-free pieces so the integrator
    can skip them.  Each returned piece's envelope is the analytic branch of
    its sub-pulse, valid on the closed span.
    """
    delta = math.radians(pulse.extra_phase_deg)
    phase_factor = cmath.exp(-1j * delta)
    shape = pulse.shape
    pieces: list[DrivePiece] = []

    if isinstance(shape, SechPulse):
        coeff = shape.peak_rad_us * phase_factor
        beta = shape.rate_rad_us
        center = shape.center_us
        mu = shape.mu

        def _sech_env(t: float) -> complex:
            s = 1.0 / math.cosh(beta * (t - center))
            return coeff * s * cmath.exp(1j * mu * math.log(s))

        spans = [(shape.support, _sech_env)]
    elif isinstance(shape, GaussianComposite):
        spans = []
        for p in shape.subpulses:
            amp = math.radians(p.area_deg) / math.sqrt(TWO_PI * p.width_us * p.width_us)
            coeff = amp * phase_factor * cmath.exp(-1j * math.radians(p.phase_deg))
            if amp == 0.0:
                spans.append((shape._span(p), None))
                continue
            inv_two_sig_sq = 1.0 / (2.0 * p.width_us * p.width_us)
            center = p.center_us

            def _gauss_env(t: float, _c=coeff, _k=inv_two_sig_sq, _t0=center) -> complex:
                dt = t - _t0
                return _c * math.exp(-dt * dt * _k)

            spans.append((shape._span(p), _gauss_env))
    elif isinstance(shape, RectangularComposite):
        spans = []
        for p in shape.subpulses:
            amp = math.radians(p.area_deg) / p.width_us
            coeff = amp * phase_factor * cmath.exp(-1j * math.radians(p.phase_deg))
            if amp == 0.0:
                spans.append((shape._span(p), None))
                continue

            def _rect_env(t: float, _c=coeff) -> complex:
                return _c

            spans.append((shape._span(p), _rect_env))
    else:
        raise TypeError(f"unknown pulse shape {type(shape).__name__}")

    w0, w1 = pulse.window
    for (s0, s1), env in spans:
        a, b = max(s0, w0), min(s1, w1)
        if b > a:
            pieces.append(DrivePiece(a, b, env))
    return tuple(pieces)


def rabi_at(pulse: Pulse, t: float) -> complex:
    """Complex Rabi frequency (rad/us) at time t; zero outside the window."""
    for piece in pulse_pieces(pulse):
        if piece.t_start <= t < piece.t_end:
            return 0.0 if piece.envelope is None else piece.envelope(t)
    return 0.0


def sech_chirp_decomposition(pulse: Pulse | SechPulse, t: float) -> tuple[float, float]:
    """Magnitude (MHz) and instantaneous frequency offset (MHz) of a sech pulse.

    Returns (Omega_0 sech(beta (t-t0)), mu beta tanh(beta (t-t0))), the
    amplitude/frequency-sweep reading of the complex-exponent envelope.
    Values are cyclic MHz regardless of the spec's input convention.
    """
    shape = pulse.shape if isinstance(pulse, Pulse) else pulse
    if not isinstance(shape, SechPulse):
        raise TypeError("sech_chirp_decomposition needs a sech pulse")
    x = shape.rate_rad_us * (t - shape.center_us)
    mag = (shape.peak_rad_us / TWO_PI) / math.cosh(x)
    offset = shape.mu * (shape.rate_rad_us / TWO_PI) * math.tanh(x)
    return (mag, offset)


def phase_shifted(pulse: Pulse, delta_deg: float) -> Pulse:
    """Same pulse with its global extra phase shifted by delta_deg.

    A shift of 180 degrees yields the inverse pulse.
    """
    return replace(pulse, extra_phase_deg=pulse.extra_phase_deg + delta_deg)


def gaussian_composite(
    areas_deg: Sequence[float],
    phases_deg: Sequence[float],
    total_duration_us: float = COMPOSITE_TOTAL_US,
    cutoff_multiple: float = 3.5,
    start_us: float = 0.0,
    extra_phase_deg: float = 0.0,
    name: str = "",
) -> Pulse:
    """Equal-width contiguous Gaussian composite over a fixed total duration.

    With n sub-pulses and windows of width 2 * cutoff * sigma each,
    sigma = total / (n * 2 * cutoff); centers sit at window midpoints.
    """
    if len(areas_deg) != len(phases_deg):
        raise ValueError("areas and phases must have the same length")
    n = len(areas_deg)
    if n == 0:
        raise ValueError("composite needs at least one sub-pulse")
    if total_duration_us <= 0.0:
        raise ValueError("total duration must be strictly positive")
    window_us = total_duration_us / n
    sigma = window_us / (2.0 * cutoff_multiple)
    subs = tuple(
        SubPulse(
            area_deg=float(th),
            phase_deg=float(ph),
            center_us=start_us + (k + 0.5) * window_us,
            width_us=sigma,
        )
        for k, (th, ph) in enumerate(zip(areas_deg, phases_deg))
    )
    shape = GaussianComposite(subpulses=subs, cutoff_multiple=cutoff_multiple)
    return Pulse(
        shape=shape,
        extra_phase_deg=extra_phase_deg,
        window=(start_us, start_us + total_duration_us),
        name=name,
    )


def rectangular_composite(
    areas_deg: Sequence[float],
    phases_deg: Sequence[float],
    total_duration_us: float = COMPOSITE_TOTAL_US,
    start_us: float = 0.0,
    extra_phase_deg: float = 0.0,
    name: str = "",
) -> Pulse:
    """Contiguous rectangular composite; durations scale with sub-pulse areas.

    Constant peak Rabi frequency across the train, so a 90-180-90 sequence in
    1.5 us uses 0.375/0.75/0.375 us sub-pulses.
    """
    if len(areas_deg) != len(phases_deg):
        raise ValueError("areas and phases must have the same length")
    total_area = float(sum(areas_deg))
    if total_area <= 0.0:
        raise ValueError("rectangular composite needs positive total area")
    if any(th <= 0.0 for th in areas_deg):
        raise ValueError("rectangular sub-pulses need strictly positive areas")
    t = start_us
    subs = []
    for th, ph in zip(areas_deg, phases_deg):
        dur = total_duration_us * float(th) / total_area
        subs.append(SubPulse(area_deg=float(th), phase_deg=float(ph), center_us=t + 0.5 * dur, width_us=dur))
        t += dur
    shape = RectangularComposite(subpulses=tuple(subs))
    return Pulse(
        shape=shape,
        extra_phase_deg=extra_phase_deg,
        window=(start_us, start_us + total_duration_us),
        name=name,
    )


def standard_pulses() -> Mapping[str, Pulse]:
    """Named pulse catalog.

    rect90-180-90      rectangular 90_90 180_0 90_90, 1.5 us
    rect90-180-90-alt  rectangular 90_90 180_180 90_90 (middle-phase variant)
    gauss-naive        Gaussian 90_90 180_0 90_90, 1.5 us, cutoff 3.5 sigma
    gauss-naive-alt    Gaussian 90_90 180_180 90_90 (middle-phase variant)
    gauss-opt          Gaussian 92.50_96.98 192.00_6.86 92.42_96.23, 1.5 us
    sech-default       sech, Omega_0 = 2 MHz, beta = 0.64 MHz, mu = 3, 3 us
    """
    sech = Pulse(shape=SechPulse(), name=SECH_DEFAULT)
    return {
        RECT_NAIVE: rectangular_composite(NAIVE_AREAS_DEG, NAIVE_PHASES_DEG, name=RECT_NAIVE),
        RECT_NAIVE_ALT: rectangular_composite(NAIVE_AREAS_DEG, NAIVE_ALT_PHASES_DEG, name=RECT_NAIVE_ALT),
        GAUSS_NAIVE: gaussian_composite(NAIVE_AREAS_DEG, NAIVE_PHASES_DEG, name=GAUSS_NAIVE),
        GAUSS_NAIVE_ALT: gaussian_composite(NAIVE_AREAS_DEG, NAIVE_ALT_PHASES_DEG, name=GAUSS_NAIVE_ALT),
        GAUSS_OPT: gaussian_composite(OPT_AREAS_DEG, OPT_PHASES_DEG, name=GAUSS_OPT),
        SECH_DEFAULT: sech,
    }
