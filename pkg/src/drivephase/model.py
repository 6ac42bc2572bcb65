"""Pulse envelopes, the phase-amplitude distortion model, and drive normalization.

Conventions used throughout the package:

* times in seconds, angles in radians, amplitudes dimensionless
* a pulse of duration ``T`` with sin^2 ramps of length ``t_ramp`` and
  amplitude scale ``A`` drives a rotation of angle ``Omega * A * (T - t_ramp)``,
  where ``Omega`` is the drive chain's Rabi normalization; for the reference
  shape ``Omega = 2*pi/(T - t_ramp)`` so that ``A = 1`` is a 2*pi rotation
* the carrier phase depends on the instantaneous field amplitude through a
  polynomial ``phi(a) = phi0 + phi' a + phi'' a^2 + ...``
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "PulseShape",
    "PhasePolynomial",
    "AmplitudePolynomial",
    "DriveChain",
    "NoiseModel",
    "PulseTrain",
    "envelope_at",
    "envelope_integral",
    "phase_at",
    "rabi_normalization",
    "turns",
]

TWO_PI = 2.0 * math.pi


def turns(x: float) -> float:
    """Convert an angle in turns to radians (1 turn = 2*pi rad)."""
    return TWO_PI * x


@dataclass(frozen=True)
class PulseShape:
    """Amplitude envelope: sin^2 up-ramp, flat plateau, sin^2 down-ramp.

    Attributes:
        duration: total pulse length T (s).
        t_ramp: length of each ramp (s); ``2*t_ramp == duration`` gives the
            full-sin^2 shape with no plateau.
        amplitude: plateau amplitude scale A (dimensionless, >= 0).
    """

    duration: float
    t_ramp: float
    amplitude: float = 1.0
    ramp_family: str = "sin2"

    def __post_init__(self):
        if not (self.duration > 0 and self.t_ramp > 0):
            raise ValueError("PulseShape.ramp: duration and t_ramp must be positive")
        if 2 * self.t_ramp > self.duration * (1 + 1e-12):
            raise ValueError("PulseShape.ramp: need 2*t_ramp <= duration")
        if self.amplitude < 0:
            raise ValueError("PulseShape.amplitude: must be >= 0")
        if self.ramp_family != "sin2":
            raise ValueError(f"unsupported ramp family {self.ramp_family!r}")

    def scaled(self, amplitude: float) -> "PulseShape":
        """Same shape with a different plateau amplitude."""
        return PulseShape(self.duration, self.t_ramp, amplitude)


@dataclass(frozen=True)
class PhasePolynomial:
    """Phase-vs-amplitude polynomial phi(a) = c0 + c1*a + c2*a^2 + ...

    Coefficients are radians per (amplitude unit)^n.
    """

    coefficients: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("PhasePolynomial.coefficients: must be finite")
        object.__setattr__(self, "coefficients", coeffs if coeffs else (0.0,))

    @classmethod
    def linear(cls, slope: float, offset: float = 0.0) -> "PhasePolynomial":
        return cls((offset, slope))

    @property
    def slope(self) -> float:
        """First-order coefficient phi'."""
        return self.coefficients[1] if len(self.coefficients) > 1 else 0.0

    def __call__(self, a):
        """Evaluate phi(a); works on scalars and arrays (Horner)."""
        acc = 0.0 * np.asarray(a, dtype=float)
        for c in reversed(self.coefficients):
            acc = acc * a + c
        return acc if isinstance(a, np.ndarray) else float(acc)


@dataclass(frozen=True)
class AmplitudePolynomial:
    """Amplitude nonlinearity g(a) = c1*a + c2*a^2 + ... (no constant term).

    The identity map is ``AmplitudePolynomial((1.0,))``.
    """

    coefficients: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs or not all(math.isfinite(c) for c in coeffs):
            raise ValueError("AmplitudePolynomial.coefficients: need finite values")
        object.__setattr__(self, "coefficients", coeffs)

    def __call__(self, a):
        acc = 0.0 * np.asarray(a, dtype=float)
        for c in reversed(self.coefficients):
            acc = (acc + c) * a
        return acc if isinstance(a, np.ndarray) else float(acc)


def _identity_poly(a):
    return a


@dataclass(frozen=True)
class DriveChain:
    """Drive-chain model: native + compensation phase, nonlinearity, Rabi rate.

    Attributes:
        native: phase polynomial phi_n(a) produced by the physical chain.
        compensation: phase polynomial phi_c(a) programmed as pre-distortion.
        rabi_rate: Rabi normalization Omega (rad/s per unit field amplitude).
        nonlinearity: map from programmed to field amplitude, g(a); must
            satisfy g(0) = 0 and be monotone increasing. The field amplitude
            g(a) is what both the Hamiltonian and the phase polynomials see.
    """

    native: PhasePolynomial = field(default_factory=PhasePolynomial)
    compensation: PhasePolynomial = field(default_factory=PhasePolynomial)
    rabi_rate: float = TWO_PI / 1.0e-6
    nonlinearity: Callable | None = None

    def __post_init__(self):
        if self.nonlinearity is None:
            object.__setattr__(self, "nonlinearity", _identity_poly)
        if not (self.rabi_rate > 0):
            raise ValueError("DriveChain.rabi_rate: must be positive")
        g = self.nonlinearity
        if abs(g(0.0)) > 1e-12:
            raise ValueError("DriveChain.nonlinearity: g(0) must be 0")
        probe = np.linspace(0.0, 2.0, 41)
        if np.any(np.diff(np.asarray(g(probe), dtype=float)) <= 0):
            raise ValueError("DriveChain.nonlinearity: g must be monotone increasing")

    @classmethod
    def for_shape(
        cls,
        shape: PulseShape,
        native: PhasePolynomial | None = None,
        compensation: PhasePolynomial | None = None,
        nonlinearity=None,
    ) -> "DriveChain":
        """Chain whose Rabi rate makes ``shape`` at A=1 a 2*pi rotation."""
        return cls(
            native=native or PhasePolynomial(),
            compensation=compensation or PhasePolynomial(),
            rabi_rate=rabi_normalization(shape),
            nonlinearity=nonlinearity,
        )

    @property
    def total_slope(self) -> float:
        """Effective linear phase-amplitude slope phi_n' + phi_c'."""
        return self.native.slope + self.compensation.slope

    def with_compensation(self, compensation: PhasePolynomial) -> "DriveChain":
        return DriveChain(self.native, compensation, self.rabi_rate, self.nonlinearity)


@dataclass(frozen=True)
class NoiseModel:
    """Dephasing time and SPAM contrast loss.

    Observed survival is ``e_spam/2 + (1 - e_spam) * P_ideal``; dephasing
    multiplies z-basis coherences by ``exp(-dt/T2)`` per time slice.
    """

    t2: float = math.inf
    e_spam: float = 0.0

    def __post_init__(self):
        if not (self.t2 > 0):
            raise ValueError("NoiseModel.T2: must be positive (use inf to disable)")
        if not (0.0 <= self.e_spam < 1.0):
            raise ValueError("NoiseModel.e_spam: must be in [0, 1)")

    @property
    def is_trivial(self) -> bool:
        return math.isinf(self.t2) and self.e_spam == 0.0

    def observe(self, p_ideal):
        """Apply the SPAM contrast map to an ideal survival probability."""
        return self.e_spam / 2.0 + (1.0 - self.e_spam) * p_ideal


@dataclass(frozen=True)
class PulseTrain:
    """N identical pulses, optional inter-pulse gap and per-pulse frame phases."""

    shape: PulseShape
    n_pulses: int
    gap: float = 0.0
    frame_phases: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.n_pulses < 1:
            raise ValueError("PulseTrain.n_pulses: must be >= 1")
        if self.gap < 0:
            raise ValueError("PulseTrain.gap: must be >= 0")
        if self.frame_phases is not None:
            phases = tuple(float(p) for p in self.frame_phases)
            if len(phases) != self.n_pulses:
                raise ValueError("PulseTrain.frame_phases: length must equal n_pulses")
            object.__setattr__(self, "frame_phases", phases)


def envelope_at(shape: PulseShape, t):
    """Programmed amplitude a(t) at time t in [0, T].

    Vectorized over ``t``. Raises for t outside the pulse.
    """
    scalar = np.isscalar(t) or np.ndim(t) == 0
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0) or np.any(t_arr > shape.duration * (1 + 1e-12)):
        raise ValueError("envelope_at: t outside [0, duration]")
    tr, T, A = shape.t_ramp, shape.duration, shape.amplitude
    a = np.ones_like(t_arr)
    up = t_arr < tr
    down = t_arr > T - tr
    a[up] = np.sin(np.pi * t_arr[up] / (2 * tr)) ** 2
    a[down] = np.sin(np.pi * (T - t_arr[down]) / (2 * tr)) ** 2
    a *= A
    return float(a[0]) if scalar else a


def envelope_integral(shape: PulseShape, t) -> float:
    """Closed-form integral of the envelope from 0 to t.

    Uses int sin^2(pi x / (2 tr)) dx = x/2 - (tr/(2 pi)) sin(pi x / tr).
    """
    tr, T, A = shape.t_ramp, shape.duration, shape.amplitude
    if t < 0 or t > T * (1 + 1e-12):
        raise ValueError("envelope_integral: t outside [0, duration]")

    def ramp_area(x):  # integral of the unit up-ramp over [0, x], x <= tr
        return x / 2 - (tr / TWO_PI) * math.sin(math.pi * x / tr)

    full_ramp = ramp_area(tr)
    if t <= tr:
        val = ramp_area(t)
    elif t <= T - tr:
        val = full_ramp + (t - tr)
    else:
        val = full_ramp + (T - 2 * tr) + (full_ramp - ramp_area(T - t))
    return A * val


def phase_at(chain: DriveChain, a) -> float:
    """Total carrier phase phi_n(a) + phi_c(a) at field amplitude a."""
    if np.any(np.asarray(a) < 0):
        raise ValueError("phase_at: amplitude must be >= 0")
    return chain.native(a) + chain.compensation(a)


def rabi_normalization(shape: PulseShape) -> float:
    """Rabi rate Omega = 2*pi/(T - t_ramp) making the shape's area 2*pi*A.

    With sin^2 ramps the envelope area is A*(T - t_ramp), so this choice
    gives ``integral(Omega * a(t) dt) = 2*pi*A`` exactly.
    """
    dt = shape.duration - shape.t_ramp
    if dt <= 0:
        raise ValueError("rabi_normalization: degenerate shape (duration == t_ramp)")
    return TWO_PI / dt
