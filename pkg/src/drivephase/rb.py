"""Single-qubit Clifford randomized benchmarking under the distortion model.

Cliffords are generated as products of pi/2 rotations about x and y and
decomposed into physical pulses three ways:

* ``PiAndPiHalf``   - virtual z plus at most one physical pulse (pi or pi/2
  area) per Clifford; pi pulses have twice the amplitude of pi/2 pulses.
* ``PiHalfOnly``    - shortest products of pi/2 pulses about +-x, +-y, no
  virtual z; all pulses share one amplitude.
* ``DoubleDurationPi`` - like PiAndPiHalf but pi pulses stretch to twice the
  duration with nearly the pi/2 amplitude, minimizing the phase difference.

Sequence survivals reuse one propagated unitary per distinct pulse shape,
conjugated by z-frame rotations (exact by the frame-covariance identity).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import curve_fit

from . import kernels
from .model import DriveChain, NoiseModel, PulseShape
from .seeding import derived_rng
from .propagator import DEFAULT_STEP, PulseCache, rot_axis, rot_z, fidelity, slice_angles

__all__ = [
    "STRATEGIES",
    "CliffordElement",
    "CliffordTable",
    "PhysicalPulse",
    "CompiledClifford",
    "RbConfig",
    "RbTable",
    "RbFit",
    "clifford_table",
    "decompose_clifford",
    "generate_rb_sequence",
    "compile_sequence",
    "simulate_rb",
    "fit_rb_decay",
    "rb_error_scan",
]

STRATEGIES = ("PiAndPiHalf", "PiHalfOnly", "DoubleDurationPi")

_PHASE_TOL = 1e-9


@dataclass(frozen=True)
class CliffordElement:
    """One of the 24 single-qubit Cliffords, as an SU(2) representative."""

    index: int
    matrix: np.ndarray


@dataclass(frozen=True)
class PhysicalPulse:
    """A pulse to play: nominal area, xy-axis phase, amplitude, duration."""

    area: float
    frame_phase: float
    amplitude: float
    duration: float


@dataclass(frozen=True)
class CompiledClifford:
    """Virtual z update followed (in time) by physical pulses.

    The executed unitary is pulses[-1] @ ... @ pulses[0] @ Rz(pre_z), where
    pulse j is an xy-plane rotation rot_axis(axis[j], area[j]).
    """

    pre_z: float
    areas: tuple[float, ...]
    axes: tuple[float, ...]


class CliffordTable:
    """The 24-element group with multiplication and inverse lookups."""

    def __init__(self, elements: list[np.ndarray]):
        self.elements = tuple(
            CliffordElement(i, m) for i, m in enumerate(elements)
        )
        n = len(elements)
        self._mult = np.full((n, n), -1, dtype=np.int64)
        self._inv = np.full(n, -1, dtype=np.int64)
        for i, a in enumerate(elements):
            for j, b in enumerate(elements):
                k = self._find(a @ b)
                if k < 0:
                    raise RuntimeError("Clifford table is not closed")
                self._mult[i, j] = k
                if k == 0:
                    self._inv[i] = j
        if np.any(self._inv < 0):
            raise RuntimeError("Clifford table is missing inverses")

    def __len__(self) -> int:
        return len(self.elements)

    def matrix(self, i: int) -> np.ndarray:
        return self.elements[i].matrix

    def _find(self, u: np.ndarray) -> int:
        for el in self.elements:
            if fidelity(el.matrix, u) > 1 - _PHASE_TOL:
                return el.index
        return -1

    def index_of(self, u: np.ndarray) -> int:
        k = self._find(u)
        if k < 0:
            raise ValueError("matrix is not a Clifford element")
        return k

    def multiply(self, i: int, j: int) -> int:
        """Index of C_i @ C_j."""
        return int(self._mult[i, j])

    def inverse(self, i: int) -> int:
        return int(self._inv[i])


@lru_cache(maxsize=1)
def clifford_table() -> CliffordTable:
    """Generate the 24 Cliffords from pi/2 rotations about x and y."""
    gens = [rot_axis(0.0, math.pi / 2), rot_axis(math.pi / 2, math.pi / 2)]
    elements = [np.eye(2, dtype=complex)]
    frontier = [np.eye(2, dtype=complex)]
    while frontier:
        new = []
        for u in frontier:
            for g in gens:
                v = g @ u
                if all(fidelity(v, w) <= 1 - _PHASE_TOL for w in elements):
                    elements.append(v)
                    new.append(v)
        frontier = new
    if len(elements) != 24:
        raise RuntimeError(f"expected 24 Cliffords, generated {len(elements)}")
    return CliffordTable(elements)


def _zyz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """(alpha, beta, gamma) with U ~ Rz(alpha) Ry(beta) Rz(gamma), beta in [0, pi]."""
    det = np.linalg.det(u)
    v = u * np.exp(-0.5j * np.angle(det))
    beta = 2.0 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[1, 0]) < 1e-12:  # beta = 0: only alpha+gamma defined
        return (float(2 * np.angle(v[1, 1])), 0.0, 0.0)
    if abs(v[0, 0]) < 1e-12:  # beta = pi: only alpha-gamma defined
        return (float(2 * np.angle(v[1, 0])), math.pi, 0.0)
    apg = 2 * np.angle(v[1, 1])
    amg = 2 * np.angle(v[1, 0])
    return (0.5 * (apg + amg), beta, 0.5 * (apg - amg))


@lru_cache(maxsize=8)
def _decompositions(strategy: str) -> tuple[CompiledClifford, ...]:
    table = clifford_table()
    if strategy in ("PiAndPiHalf", "DoubleDurationPi"):
        out = []
        for el in table.elements:
            alpha, beta, gamma = _zyz_angles(el.matrix)
            area = min((0.0, math.pi / 2, math.pi), key=lambda x: abs(x - beta))
            if abs(area - beta) > 1e-9:
                raise RuntimeError(f"Clifford beta angle {beta} is not in the pulse set")
            if area == 0.0:
                out.append(CompiledClifford(alpha + gamma, (), ()))
            else:
                out.append(
                    CompiledClifford(alpha + gamma, (area,), (math.pi / 2 + alpha,))
                )
        return tuple(out)
    if strategy == "PiHalfOnly":
        # BFS for shortest words over pi/2 pulses about +-x, +-y
        axes = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
        gens = [rot_axis(ax, math.pi / 2) for ax in axes]
        words: dict[int, tuple[float, ...]] = {0: ()}
        frontier = [(np.eye(2, dtype=complex), ())]
        while frontier and len(words) < len(table):
            new = []
            for u, word in frontier:
                for ax, g in zip(axes, gens):
                    v = g @ u
                    k = table.index_of(v)
                    if k not in words:
                        words[k] = word + (ax,)
                        new.append((v, word + (ax,)))
            frontier = new
        return tuple(
            CompiledClifford(0.0, (math.pi / 2,) * len(words[i]), words[i])
            for i in range(len(table))
        )
    raise ValueError(f"unknown decomposition strategy {strategy!r}")


def decompose_clifford(c: CliffordElement, strategy: str) -> CompiledClifford:
    """Decompose a Clifford into virtual z plus physical pulses."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown decomposition strategy {strategy!r}")
    return _decompositions(strategy)[c.index]


def recompose(plan: CompiledClifford) -> np.ndarray:
    """Ideal (undistorted) unitary of a compiled Clifford."""
    u = rot_z(plan.pre_z)
    for area, axis in zip(plan.areas, plan.axes):
        u = rot_axis(axis, area) @ u
    return u


def mean_pulse_count(strategy: str) -> float:
    """Average physical-pulse count per Clifford over the group."""
    return float(np.mean([len(d.areas) for d in _decompositions(strategy)]))


def generate_rb_sequence(
    m: int, seed, table: CliffordTable | None = None
) -> tuple[list[int], int]:
    """m uniform Cliffords plus the recovery element (ideal net = identity).

    ``seed`` may be an int or a key tuple for the counter-based generator.
    """
    table = table or clifford_table()
    key = seed if isinstance(seed, tuple) else (seed,)
    rng = derived_rng(*key)
    indices = rng.integers(0, len(table), size=m).tolist()
    net = 0
    for idx in indices:
        net = table.multiply(idx, net)
    return indices, table.inverse(net)


@dataclass(frozen=True)
class RbConfig:
    """Plan for one RB run."""

    lengths: tuple[int, ...]
    n_random: int
    seed: int
    strategy: str
    chain: DriveChain
    shape: PulseShape
    noise: NoiseModel | None = None
    step: float = DEFAULT_STEP
    gap: float = 0.0

    def __post_init__(self):
        ls = tuple(int(x) for x in self.lengths)
        if not ls or any(x < 1 for x in ls) or any(b <= a for a, b in zip(ls, ls[1:])):
            raise ValueError("RbConfig.lengths: need a strictly increasing list, all >= 1")
        if self.n_random < 2:
            raise ValueError("RbConfig.n_random: need >= 2 randomizations")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"RbConfig.strategy: unknown strategy {self.strategy!r}")
        object.__setattr__(self, "lengths", ls)


@dataclass(frozen=True)
class RbTable:
    """Per-sequence survivals, shape (len(lengths), n_random)."""

    lengths: tuple[int, ...]
    survivals: np.ndarray
    strategy: str

    def means(self) -> np.ndarray:
        return self.survivals.mean(axis=1)


@dataclass(frozen=True)
class RbFit:
    """A*p^m + B decay fit and the error per Clifford (1-p)/2."""

    p: float
    amplitude: float
    offset: float
    error_per_clifford: float
    p_stderr: float
    epc_stderr: float
    non_decaying: bool = False
    epc_bootstrap_err: float | None = None


def pulse_shapes_for(strategy: str, base: PulseShape, chain: DriveChain):
    """Map nominal pulse area -> PulseShape for a strategy.

    Amplitudes follow from the chain's Rabi rate: a pulse of duration T and
    amplitude A rotates by Omega*A*(T - t_ramp).
    """
    om = chain.rabi_rate
    t, tr = base.duration, base.t_ramp
    amp = lambda area, dur: area / (om * (dur - tr))
    if strategy == "DoubleDurationPi":
        return {
            math.pi / 2: PulseShape(t, tr, amp(math.pi / 2, t)),
            math.pi: PulseShape(2 * t, tr, amp(math.pi, 2 * t)),
        }
    return {
        math.pi / 2: PulseShape(t, tr, amp(math.pi / 2, t)),
        math.pi: PulseShape(t, tr, amp(math.pi, t)),
    }


def compile_sequence(
    indices: list[int], recovery: int, strategy: str
) -> tuple[np.ndarray, np.ndarray, float]:
    """Flatten a Clifford sequence into pulse ids, executed axes, trailing z.

    Returns (area_ids, axes, z_total): area_ids[j] is 0 for a pi/2 pulse and
    1 for a pi pulse; axes[j] is the executed axis after folding the running
    virtual-z frame through (pulse axis chi becomes chi - F).
    """
    decomps = _decompositions(strategy)
    area_ids: list[int] = []
    axes: list[float] = []
    frame = 0.0
    for idx in list(indices) + [recovery]:
        plan = decomps[idx]
        frame += plan.pre_z
        for area, axis in zip(plan.areas, plan.axes):
            area_ids.append(0 if area < 3 * math.pi / 4 else 1)
            axes.append(axis - frame)
    return (
        np.asarray(area_ids, dtype=np.int64),
        np.asarray(axes, dtype=np.float64),
        frame,
    )


class _SuperopCache:
    """Per-shape pulse superoperators for density-matrix RB (finite T2)."""

    def __init__(self, chain: DriveChain, noise: NoiseModel, step: float, gap: float):
        self.chain, self.noise, self.step, self.gap = chain, noise, step, gap
        self._store: dict[tuple, np.ndarray] = {}

    def superop(self, shape: PulseShape) -> np.ndarray:
        key = (shape.duration, shape.t_ramp, shape.amplitude)
        s = self._store.get(key)
        if s is None:
            theta, phi, dt = slice_angles(self.chain, shape, 0.0, self.step)
            c, sn = np.cos(theta / 2), np.sin(theta / 2)
            u = np.empty((len(theta), 2, 2), dtype=complex)
            u[:, 0, 0] = c
            u[:, 1, 1] = c
            u[:, 0, 1] = -1j * sn * np.exp(-1j * phi)
            u[:, 1, 0] = -1j * sn * np.exp(1j * phi)
            # row-major vec: S = (U kron conj(U)), dephasing on (01),(10)
            sup = np.einsum("kab,kcd->kacbd", u, u.conj()).reshape(-1, 4, 4)
            decay = math.exp(-dt / self.noise.t2)
            deph = np.diag([1.0, decay, decay, 1.0])
            sup = np.matmul(deph, sup)
            s = kernels.sequence_product(sup)
            if self.gap > 0:
                gd = math.exp(-self.gap / self.noise.t2)
                s = np.diag([1.0, gd, gd, 1.0]) @ s
            self._store[key] = s
        return s


def _survival_unitary(cache_stack, area_ids, axes) -> float:
    u = kernels.conjugated_product(cache_stack, area_ids, axes)
    return min(1.0, float(abs(u[0, 0]) ** 2))


def _survival_density(superops, area_ids, axes) -> float:
    rho = np.array([1, 0, 0, 0], dtype=complex)
    for aid, ax in zip(area_ids, axes):
        ph = np.exp(-1j * ax)
        scale = np.array([1.0, ph, np.conj(ph), 1.0])
        rho = scale * (superops[aid] @ (np.conj(scale) * rho))
    return min(1.0, max(0.0, float(rho[0].real)))


def simulate_rb(config: RbConfig) -> RbTable:
    """Compile and propagate every RB sequence; returns per-sequence survival.

    Sequence (li, ri) uses the counter-based key (seed, li, ri), so any
    sequence is reproducible in isolation.
    """
    shapes = pulse_shapes_for(config.strategy, config.shape, config.chain)
    noise = config.noise
    use_density = noise is not None and not math.isinf(noise.t2)
    if use_density:
        scache = _SuperopCache(config.chain, noise, config.step, config.gap)
        superops = [scache.superop(shapes[math.pi / 2]), scache.superop(shapes[math.pi])]
    else:
        ucache = PulseCache(config.chain, config.step)
        stack = ucache.stack([shapes[math.pi / 2], shapes[math.pi]])
    table = clifford_table()
    surv = np.empty((len(config.lengths), config.n_random))
    for li, m in enumerate(config.lengths):
        for ri in range(config.n_random):
            indices, rec = generate_rb_sequence(m, (config.seed, li, ri), table)
            area_ids, axes, _ = compile_sequence(indices, rec, config.strategy)
            if use_density:
                p = _survival_density(superops, area_ids, axes)
            else:
                p = _survival_unitary(stack, area_ids, axes)
            if noise is not None:
                p = noise.observe(p)
            surv[li, ri] = p
    return RbTable(config.lengths, surv, config.strategy)


def _decay(m, a, p, b):
    return a * np.power(p, m) + b


def fit_rb_decay(
    table: RbTable,
    bootstrap: int = 0,
    seed: int = 0,
    fix_offset: float | None = None,
) -> RbFit:
    """Least-squares fit of survival = A*p^m + B.

    Non-decaying data pins p to 1 (zero error) and sets a flag. Optional
    nonparametric bootstrap over randomizations estimates the EPC spread.

    For shallow decays the three-parameter model is degenerate (A trades
    against p) and the fitted error biases upward; when the asymptote is
    known, pass ``fix_offset`` (0.5 for ideal single-qubit readout) to pin B
    and restore identifiability.
    """
    lengths = np.asarray(table.lengths, dtype=float)
    if lengths.size < 3:
        raise ValueError("fit_rb_decay: need at least 3 sequence lengths")

    def run_fit(y: np.ndarray) -> tuple[float, float, float, np.ndarray]:
        drop = y[0] - y[-1]
        if drop <= 0:  # non-decaying
            return 1.0, max(0.0, y[0] - 0.5), 0.5, np.full(3, np.nan)
        span = max(lengths[-1], 1.0)
        common = dict(maxfev=20000, xtol=1e-14, ftol=1e-14, gtol=1e-14)
        if fix_offset is None:
            p0 = [max(drop, 0.1), math.exp(math.log(0.5) / span), 0.5]
            popt, pcov = curve_fit(
                _decay, lengths, y, p0=p0,
                bounds=([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]), **common,
            )
            return popt[1], popt[0], popt[2], np.sqrt(np.abs(np.diag(pcov)))
        b = fix_offset
        p0 = [max(drop, 0.1), math.exp(math.log(0.5) / span)]
        popt, pcov = curve_fit(
            lambda m, a, p: _decay(m, a, p, b), lengths, y, p0=p0,
            bounds=([0.0, 0.0], [1.0, 1.0]), **common,
        )
        err = np.sqrt(np.abs(np.diag(pcov)))
        return popt[1], popt[0], b, np.array([err[0], err[1], 0.0])

    means = table.means()
    p, a, b, perr = run_fit(means)
    non_decaying = bool(np.isnan(perr).all())
    boot_err = None
    if bootstrap > 0:
        rng = derived_rng(seed, 0xB007)
        n = table.survivals.shape[1]
        epcs = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # resamples can be near-degenerate
            for _ in range(bootstrap):
                cols = rng.integers(0, n, size=n)
                pb, *_ = run_fit(table.survivals[:, cols].mean(axis=1))
                epcs.append((1 - pb) / 2)
        boot_err = float(np.std(epcs))
    return RbFit(
        p=float(p),
        amplitude=float(a),
        offset=float(b),
        error_per_clifford=(1 - float(p)) / 2,
        p_stderr=float(perr[1]) if not non_decaying else 0.0,
        epc_stderr=float(perr[1] / 2) if not non_decaying else 0.0,
        non_decaying=non_decaying,
        epc_bootstrap_err=boot_err,
    )


def rb_error_scan(
    config: RbConfig, phic_values, fix_offset: float | None = None
) -> list[tuple[float, RbFit]]:
    """RB error per Clifford as a function of the compensation slope."""
    from .model import PhasePolynomial  # local import to avoid cycle noise

    out = []
    for phic in np.asarray(phic_values, dtype=float):
        chain = config.chain.with_compensation(PhasePolynomial.linear(phic))
        cfg = RbConfig(
            lengths=config.lengths,
            n_random=config.n_random,
            seed=config.seed,
            strategy=config.strategy,
            chain=chain,
            shape=config.shape,
            noise=config.noise,
            step=config.step,
            gap=config.gap,
        )
        out.append((float(phic), fit_rb_decay(simulate_rb(cfg), fix_offset=fix_offset)))
    return out
