"""Compensation calibration: scan-and-refine argmax search for the phase
pre-distortion coefficients, and the contrast-to-slope inversion.

The objective is always evaluated by exact propagation (never the
perturbative formula), so calibration stays valid outside the
small-parameter regime. Results are invariant under affine rescaling of the
objective, which is what makes the argmax robust to SPAM contrast loss.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    DriveChain,
    NoiseModel,
    PhasePolynomial,
    PulseShape,
    envelope_at,
    envelope_integral,
)
from .propagator import DEFAULT_STEP, PulseCache
from .quadrature import adaptive_simpson
from .experiments import shot_sample

__all__ = [
    "CalibrationResult",
    "PolynomialCalibration",
    "InferredSlope",
    "compensation_objective",
    "polynomial_compensation_objective",
    "probe_decoupling_directions",
    "calibrate_chain_polynomial",
    "calibrate_linear",
    "calibrate_polynomial",
    "infer_slope_from_contrast",
]


@dataclass(frozen=True)
class CalibrationResult:
    """Argmax of a 1-D compensation scan."""

    value: float
    p0: float
    tie_broken: bool = False


@dataclass(frozen=True)
class PolynomialCalibration:
    """Coordinate-ascent result over (phi', phi'', phi''')."""

    coefficients: tuple[float, ...]
    p0: float
    converged: bool
    n_evaluations: int


@dataclass(frozen=True)
class InferredSlope:
    """|phi'| inferred from an A=1 contrast measurement (first lobe)."""

    phi_prime_abs: float
    ambiguous: bool


def compensation_objective(
    chain: DriveChain,
    shape: PulseShape,
    n_pulses: int,
    noise: NoiseModel | None = None,
    shots: int | None = None,
    seed: int = 0,
    amplitude: float = 1.0,
    eps_drift: float = 0.0,
    step: float = DEFAULT_STEP,
    order: int = 1,
):
    """Objective phi_c^(order) -> observed P0 of an N-pulse train.

    ``eps_drift`` injects a constant amplitude offset during calibration (the
    drift-robustness study); ``order`` selects which compensation coefficient
    the argument sets, keeping the chain's other coefficients fixed.
    """
    counter = {"n": 0}
    base = list(chain.compensation.coefficients) + [0.0] * (order + 1)

    def objective(value: float) -> float:
        coeffs = list(base)
        coeffs[order] = value
        trimmed = chain.with_compensation(PhasePolynomial(tuple(coeffs)))
        cache = PulseCache(trimmed, step)
        p = cache.train_survival(shape.scaled(amplitude * (1.0 + eps_drift)), n_pulses)
        if noise is not None:
            p = noise.observe(p)
        if shots is not None:
            p = shot_sample(p, shots, seed, (counter["n"],))
            counter["n"] += 1
        return p

    return objective


def polynomial_compensation_objective(
    chain: DriveChain,
    shape: PulseShape,
    n_pulses: int,
    probe_amplitudes=(0.5, 0.75, 1.0),
    noise: NoiseModel | None = None,
    step: float = DEFAULT_STEP,
):
    """Objective [phi_c', phi_c'', ...] -> mean survival over 2*pi probes.

    A single working amplitude cannot pin more than one compensation
    coefficient: a linear term can null the first-order effect of any
    higher-order phase at one amplitude, and trains at other revival
    amplitudes sit in the insensitive (quartic) regime. Each probe here is
    therefore a train of pulses whose duration is stretched so the probed
    amplitude itself drives 2*pi rotations, recreating the coherently
    amplified (quadratic) sensitivity at that amplitude scale.
    """
    probes = _probe_shapes(shape, probe_amplitudes, chain.rabi_rate)

    def objective(coeffs) -> float:
        trimmed = chain.with_compensation(PhasePolynomial((0.0, *coeffs)))
        cache = PulseCache(trimmed, step)
        p = float(np.mean([cache.train_survival(s, n_pulses) for s in probes]))
        return noise.observe(p) if noise is not None else p

    return objective


def _probe_shapes(shape: PulseShape, amplitudes, rabi_rate: float):
    return [
        PulseShape(shape.t_ramp + 2 * math.pi / (rabi_rate * a), shape.t_ramp, a)
        for a in amplitudes
    ]


def probe_decoupling_directions(
    shape: PulseShape, probe_amplitudes, orders: int, rabi_rate: float
) -> np.ndarray:
    """Search directions that decouple the probes' first-order responses.

    The first-order y-argument of probe w responds linearly to the
    compensation coefficients, Y_w = sum_k G[w, k] c_k with

        G[w, k] = integral(Omega a (a^(k+1) - A_w^(k+1)) cos(theta_w) dt)

    over the probe pulse. Columns of inv(G) are coefficient-space directions
    each moving a single Y_w, turning the strongly correlated coordinate
    ascent into nearly independent 1-D problems. Requires one probe per
    order; columns are normalized to unit infinity-norm so scan ranges keep
    their radian meaning.
    """
    if len(probe_amplitudes) != orders:
        raise ValueError("probe_decoupling_directions: need one probe per order")
    probes = _probe_shapes(shape, probe_amplitudes, rabi_rate)
    g = np.empty((orders, orders))
    for w, probe in enumerate(probes):
        amp = probe.amplitude
        breaks = (probe.t_ramp, probe.duration - probe.t_ramp)
        for k in range(orders):
            power = k + 1

            def f(t):
                a = envelope_at(probe, t)
                theta = rabi_rate * envelope_integral(probe, t)
                return rabi_rate * a * (a**power - amp**power) * math.cos(theta)

            g[w, k] = adaptive_simpson(f, 0.0, probe.duration, tol=1e-9, breakpoints=breaks)
    directions = np.linalg.inv(g)
    return directions / np.abs(directions).max(axis=0, keepdims=True)


def _parabola_vertex(x: np.ndarray, y: np.ndarray) -> float:
    """Vertex of the least-squares parabola through (x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.max() - y.min() <= 0:  # flat slice: vertex is undefined
        return float(x[np.argmax(y)])
    x0 = x.mean()
    scale = max(x.max() - x.min(), 1e-300)
    xs = (x - x0) / scale
    c2, c1, _ = np.polyfit(xs, y, 2)
    if c2 >= 0:  # no curvature or a minimum: fall back to the best sample
        return float(x[np.argmax(y)])
    return float(x0 - scale * c1 / (2.0 * c2))


def calibrate_linear(
    objective,
    scan_range: tuple[float, float] = (-2 * math.pi * 5e-3, 2 * math.pi * 5e-3),
    grid_size: int = 41,
    refine_halfwidth: int = 1,
) -> CalibrationResult:
    """Grid scan of the objective followed by parabolic refinement.

    ``refine_halfwidth`` is the number of grid steps on each side of the
    coarse argmax included in the parabola fit; 1 reproduces the plain
    three-point refinement, while noisy objectives (shot sampling) should use
    a wider window so the vertex averages over the noise.

    Raises if the maximum lands on the scan boundary (the bracket failed).
    Exact ties are broken toward the smallest |value| and flagged.
    """
    if grid_size < 3:
        raise ValueError("calibrate_linear: grid_size must be >= 3")
    grid = np.linspace(scan_range[0], scan_range[1], grid_size)
    vals = np.array([objective(x) for x in grid])

    best = float(vals.max())
    ties = np.flatnonzero(vals == best)
    tie_broken = ties.size > 1
    k = int(ties[np.argmin(np.abs(grid[ties]))]) if tie_broken else int(ties[0])
    if k == 0 or k == grid_size - 1:
        raise ValueError(
            "calibrate_linear: maximum on the scan boundary; widen scan_range"
        )
    lo = max(0, k - refine_halfwidth)
    hi = min(grid_size, k + refine_halfwidth + 1)
    if vals[lo:hi].max() - vals[lo:hi].min() <= 0:  # flat window: keep argmax
        vertex = float(grid[k])
    else:
        vertex = _parabola_vertex(grid[lo:hi], vals[lo:hi])
    return CalibrationResult(value=vertex, p0=best, tie_broken=tie_broken)


def calibrate_polynomial(
    objective,
    orders: int,
    budget: int = 4000,
    scan_ranges=None,
    grid_size: int = 41,
    refine_halfwidth: int = 1,
    tol: float = 2 * math.pi * 1e-5,
    max_sweeps: int = 20,
    directions: np.ndarray | None = None,
) -> PolynomialCalibration:
    """Cyclic coordinate ascent over compensation coefficients.

    ``objective`` maps a coefficient list [phi_c', phi_c'', ...] (length
    ``orders``) to observed P0. Each coordinate is solved by the linear
    scan-and-refine; sweeps repeat until every coefficient update is below
    ``tol`` or the evaluation budget runs out (returning best-so-far,
    flagged).

    ``directions`` (columns = coefficient-space search directions) replaces
    the raw coordinate axes. The monomial coefficients respond to survival
    in a strongly correlated way, which makes axis-aligned ascent crawl; use
    ``probe_decoupling_directions`` to precondition when orders > 1.
    """
    if not (1 <= orders <= 3):
        raise ValueError("calibrate_polynomial: orders must be in 1..3")
    if scan_ranges is None:
        scan_ranges = [(-2 * math.pi * 5e-3, 2 * math.pi * 5e-3)] * orders
    scan_ranges = list(scan_ranges)
    basis = np.eye(orders) if directions is None else np.asarray(directions, dtype=float)
    count = {"n": 0}

    def counted(coeffs) -> float:
        count["n"] += 1
        return objective(list(coeffs))

    pos = np.zeros(orders)  # position in the search basis
    converged = False
    for _ in range(max_sweeps):
        if count["n"] + orders * (grid_size + 15) > budget:
            break
        start_coeffs = basis @ pos
        for k in range(orders):
            center = pos[k]
            lo, hi = scan_ranges[k]

            def slice_obj(v, k=k, center=center):
                p = pos.copy()
                p[k] = center + v
                return counted(basis @ p)

            for _ in range(5):  # re-bracket if the maximum escapes the window
                try:
                    coarse = calibrate_linear(
                        slice_obj, (lo, hi), grid_size, refine_halfwidth
                    ).value
                    break
                except ValueError:
                    lo, hi = 2 * lo, 2 * hi
            else:
                raise ValueError("calibrate_polynomial: could not bracket a maximum")
            # second, finer pass removes the grid-scale bias of the vertex
            fine = 2.0 * (hi - lo) / (grid_size - 1)
            update = coarse
            try:
                update = coarse + calibrate_linear(
                    lambda v: slice_obj(coarse + v), (-fine, fine), 15, refine_halfwidth
                ).value
            except ValueError:
                pass
            pos[k] = center + update
        if np.abs(basis @ pos - start_coeffs).max() < tol:
            converged = True
            break
    coeffs = basis @ pos
    return PolynomialCalibration(
        coefficients=tuple(float(c) for c in coeffs),
        p0=counted(coeffs),
        converged=converged,
        n_evaluations=count["n"],
    )


_PROBE_SETS = {1: (1.0,), 2: (0.5, 1.0), 3: (0.5, 0.75, 1.0)}


def calibrate_chain_polynomial(
    chain: DriveChain,
    shape: PulseShape,
    n_pulses: int,
    orders: int,
    noise: NoiseModel | None = None,
    step: float = DEFAULT_STEP,
    **kwargs,
) -> PolynomialCalibration:
    """Recover compensation coefficients up to ``orders`` for a drive chain.

    Builds the multi-probe objective (one 2*pi probe amplitude per order)
    and its decoupling directions, then runs the coordinate ascent.
    """
    probes = _PROBE_SETS[orders]
    objective = polynomial_compensation_objective(
        chain, shape, n_pulses, probes, noise, step
    )
    directions = probe_decoupling_directions(shape, probes, orders, chain.rabi_rate)
    return calibrate_polynomial(objective, orders, directions=directions, **kwargs)


def infer_slope_from_contrast(
    p0_observed: float, n_pulses: int, a_y: float
) -> InferredSlope:
    """Invert the quadratic contrast law at A=1 for |phi'|.

    Assumes the first lobe N*|phi' A_y| <= pi; deeper lobes reproduce the
    same contrast, so any deficit short of full contrast is flagged
    ambiguous.
    """
    if not (0.0 <= p0_observed <= 1.0):
        raise ValueError("infer_slope_from_contrast: P0 must be in [0, 1]")
    arg = math.acos(2.0 * p0_observed - 1.0)
    value = arg / (n_pulses * abs(a_y))
    return InferredSlope(phi_prime_abs=value, ambiguous=p0_observed < 1.0)

