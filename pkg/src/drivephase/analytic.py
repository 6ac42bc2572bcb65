"""Closed-form theory: ramp rotations, Euler decomposition, perturbative
coefficients, survival formulas, and the dephasing-limited sensitivity.

All phase arguments here are plateau-referenced: the carrier phase is taken
to vanish on the pulse plateau, so ramp-time phase deviations appear as
small y-rotations. Survival probabilities are unaffected by the referencing
(a constant phase offset is a z-frame rotation), but axis decompositions are
not, so the conversion from chain polynomials subtracts phi(plateau).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from .model import (
    DriveChain,
    PulseShape,
    envelope_at,
    envelope_integral,
    phase_at,
    rabi_normalization,
)
from .quadrature import adaptive_simpson

__all__ = [
    "RampRotation",
    "PerturbativeCoefficients",
    "EulerAnglesZYX",
    "DecoherenceSurvival",
    "ramp_rotation_integrals",
    "tait_bryan_ramp_angles",
    "zyx_euler_decompose",
    "perturbative_coefficients",
    "perturbative_survival",
    "sensitivity_expansions",
    "decoherence_survival",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RampRotation:
    """Accumulated x/y rotation angles over one ramp (plateau-referenced)."""

    r_x: float
    r_y: float


@dataclass(frozen=True)
class PerturbativeCoefficients:
    """First-order coefficients for a unit-amplitude (2*pi area) profile.

    Attributes:
        a_x: x coefficient, exactly 2*pi for the reference profile.
        a_y: y coefficient from the cosine-weighted ramp integral (signed;
            all survival formulas depend only on its square).
        eps: fractional amplitude deviation, A = 1 + eps.
        n_pulses: train length N.
        theta: accumulated rotation angle theta(t) of the reference profile.
    """

    a_x: float
    a_y: float
    eps: float = 0.0
    n_pulses: int = 1
    theta: Callable[[float], float] | None = None

    def with_eps(self, eps: float) -> "PerturbativeCoefficients":
        return replace(self, eps=eps)

    def with_pulses(self, n_pulses: int) -> "PerturbativeCoefficients":
        return replace(self, n_pulses=n_pulses)


class EulerAnglesZYX(NamedTuple):
    """Angles with U = Rx(angle_x) @ Ry(angle_y) @ Rz(angle_z) (z acts first)."""

    angle_z: float
    angle_y: float
    angle_x: float
    gimbal: bool = False


@dataclass(frozen=True)
class DecoherenceSurvival:
    """Dephasing-limited survival and the phi' >> T/T2 sensitivity check."""

    p0: float
    condition_ratio: float
    condition_satisfied: bool


def _plateau_referenced_phase(chain: DriveChain, shape: PulseShape):
    plateau = phase_at(chain, chain.nonlinearity(shape.amplitude))

    def phi(t: float) -> float:
        return phase_at(chain, chain.nonlinearity(envelope_at(shape, t))) - plateau

    return phi


def ramp_rotation_integrals(chain: DriveChain, shape: PulseShape) -> RampRotation:
    """r_{x,y} = integral of Omega*g(a)*{cos,sin}(phi) over the up-ramp."""
    phi = _plateau_referenced_phase(chain, shape)
    om = chain.rabi_rate

    def fx(t):
        return om * chain.nonlinearity(envelope_at(shape, t)) * math.cos(phi(t))

    def fy(t):
        return om * chain.nonlinearity(envelope_at(shape, t)) * math.sin(phi(t))

    r_x = adaptive_simpson(fx, 0.0, shape.t_ramp, tol=1e-12)
    r_y = adaptive_simpson(fy, 0.0, shape.t_ramp, tol=1e-12)
    return RampRotation(r_x, r_y)


def tait_bryan_ramp_angles(r: RampRotation) -> tuple[float, float, float]:
    """First-order Tait-Bryan angles (alpha_x, alpha_y, alpha_z) of a ramp.

    Valid for |r_y| << 1; the r_x -> 0 limits are handled analytically.
    """
    if abs(r.r_x) < 1e-12:
        return (r.r_x, r.r_y, 0.0)
    alpha_y = r.r_y * math.sin(r.r_x) / r.r_x
    alpha_z = -r.r_y * (1 - math.cos(r.r_x)) / r.r_x
    return (r.r_x, alpha_y, alpha_z)


def zyx_euler_decompose(u: np.ndarray, gimbal_tol: float = 1e-7) -> EulerAnglesZYX:
    """Decompose a 2x2 unitary as Rx(ax) Ry(ay) Rz(az), modulo global phase.

    ``angle_y`` is in [-pi/2, pi/2]. Near the gimbal degeneracy
    |angle_y| = pi/2 the z angle is fixed to 0 and the result is flagged.
    """
    u = np.asarray(u, dtype=complex)
    if np.abs(u.conj().T @ u - np.eye(2)).max() > 1e-9:
        raise ValueError("zyx_euler_decompose: input is not unitary")
    det = np.linalg.det(u)
    v = u * np.exp(-0.5j * np.angle(det))

    cross = v[1, 0] * np.conj(v[0, 0])
    sin_ay = min(1.0, max(-1.0, 2.0 * cross.real))
    angle_y = math.asin(sin_ay)
    cos_ay_sq = abs(v[0, 0]) ** 2 - abs(v[0, 1]) ** 2  # cos(ax) * cos(ay)

    if math.cos(angle_y) < gimbal_tol:
        sign = 1.0 if sin_ay > 0 else -1.0
        prod = -2.0 * sign * v[0, 1] * np.conj(v[0, 0])
        angle_x = sign * float(np.angle(prod))
        return EulerAnglesZYX(0.0, angle_y, angle_x, gimbal=True)

    angle_x = math.atan2(-2.0 * cross.imag, cos_ay_sq)
    # remaining diagonal factor carries az
    rx_inv = _rx(-angle_x)
    ry_inv = _ry(-angle_y)
    m = ry_inv @ rx_inv @ v
    angle_z = float(np.angle(m[1, 1] * np.conj(m[0, 0])))
    return EulerAnglesZYX(angle_z, angle_y, angle_x, gimbal=False)


def _rx(a: float) -> np.ndarray:
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(a: float) -> np.ndarray:
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(a: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * a), 0], [0, np.exp(0.5j * a)]], dtype=complex
    )


def compose_zyx(angles: EulerAnglesZYX) -> np.ndarray:
    """Rebuild the unitary Rx(ax) @ Ry(ay) @ Rz(az) from its angles."""
    return _rx(angles.angle_x) @ _ry(angles.angle_y) @ _rz(angles.angle_z)


def perturbative_coefficients(
    shape: PulseShape,
    n_pulses: int = 1,
    eps: float = 0.0,
    tol: float = 1e-10,
) -> PerturbativeCoefficients:
    """A_x, A_y and the angle profile theta(t) of the unit-amplitude pulse.

    A_x = integral(Omega a dt) = 2*pi exactly; A_y is the cosine-weighted
    integral of Omega*a*(a-1) evaluated by adaptive quadrature. The
    sine-weighted companion vanishes for symmetric shapes and is asserted
    below 1e-9.
    """
    unit = shape.scaled(1.0)
    om = rabi_normalization(unit)
    breaks = (unit.t_ramp, unit.duration - unit.t_ramp)

    def theta(t: float) -> float:
        return om * envelope_integral(unit, t)

    def integrand_cos(t):
        a = envelope_at(unit, t)
        return om * a * (a - 1.0) * math.cos(theta(t))

    def integrand_sin(t):
        a = envelope_at(unit, t)
        return om * a * (a - 1.0) * math.sin(theta(t))

    a_y = adaptive_simpson(integrand_cos, 0.0, unit.duration, tol=tol, breakpoints=breaks)
    companion = adaptive_simpson(
        integrand_sin, 0.0, unit.duration, tol=tol, breakpoints=breaks
    )
    if abs(companion) > 1e-9:
        raise ValueError(
            f"perturbative_coefficients: sine companion integral {companion:.2e} "
            "does not vanish (asymmetric shape?)"
        )
    return PerturbativeCoefficients(
        a_x=TWO_PI, a_y=a_y, eps=eps, n_pulses=n_pulses, theta=theta
    )


def perturbative_survival(coeffs: PerturbativeCoefficients, phi_prime: float) -> float:
    """First-order train survival 0.5*(1 + cos(N*sqrt((eps Ax)^2+(phi' Ay)^2)))."""
    arg = coeffs.n_pulses * math.hypot(coeffs.eps * coeffs.a_x, phi_prime * coeffs.a_y)
    return 0.5 * (1.0 + math.cos(arg))


def sensitivity_expansions(
    coeffs: PerturbativeCoefficients, phi_prime: float
) -> tuple[float, float]:
    """Small-argument expansions of the survival deficit.

    Returns (quadratic, quartic): the quadratic law at eps = 0 and the
    quartic law at the neighbouring revival eps = 1/N.
    """
    x = coeffs.n_pulses * phi_prime * coeffs.a_y
    p_quadratic = 1.0 - 0.25 * x * x
    p_quartic = 1.0 - x**4 / (64.0 * math.pi**2)
    return (p_quadratic, p_quartic)


def decoherence_survival(
    coeffs: PerturbativeCoefficients,
    phi_prime: float,
    duration: float,
    t2: float,
    condition_threshold: float = 100.0,
) -> DecoherenceSurvival:
    """Survival with dephasing: 1 - (N phi' Ay)^2/4 - N*T/(4*T2).

    Valid when N*T << T2 (warned otherwise) and the Bloch rotation is close
    to uniform over the pulse. Also reports whether the sensitivity
    condition phi' >> T/T2 holds.
    """
    if not (t2 > 0):
        raise ValueError("decoherence_survival: T2 must be positive")
    n = coeffs.n_pulses
    if not math.isinf(t2) and n * duration > 0.1 * t2:
        warnings.warn("decoherence_survival: N*T << T2 assumption is violated")
    x = n * phi_prime * coeffs.a_y
    p0 = 1.0 - 0.25 * x * x - (0.0 if math.isinf(t2) else n * duration / (4.0 * t2))
    ratio = abs(phi_prime) / (duration / t2) if not math.isinf(t2) else math.inf
    return DecoherenceSurvival(p0, ratio, ratio >= condition_threshold)
