"""drivephase: amplitude-dependent drive-phase distortion in qubit pulses.

Simulates coherent amplification of phase-amplitude distortion in resonant
pulse trains, the pre-distortion calibration that removes it, and its impact
on single-qubit Clifford randomized benchmarking.
"""
from .model import (
    AmplitudePolynomial,
    DriveChain,
    NoiseModel,
    PhasePolynomial,
    PulseShape,
    PulseTrain,
    envelope_at,
    phase_at,
    rabi_normalization,
    turns,
)
from .propagator import (
    DensityMatrix,
    PulseCache,
    Su2Matrix,
    hamiltonian_at,
    propagate_density,
    propagate_pulse,
    propagate_train,
    survival_probability,
)
from .analytic import (
    PerturbativeCoefficients,
    RampRotation,
    decoherence_survival,
    perturbative_coefficients,
    perturbative_survival,
    ramp_rotation_integrals,
    sensitivity_expansions,
    tait_bryan_ramp_angles,
    zyx_euler_decompose,
)
from .experiments import (
    ScanResult,
    compensation_map,
    oscillation_period_analysis,
    rabi_amplitude_scan,
    sandwich_phase_probe,
    train_amplitude_scan,
)
from .calibration import (
    calibrate_linear,
    calibrate_polynomial,
    compensation_objective,
    infer_slope_from_contrast,
)
from .rb import (
    RbConfig,
    RbFit,
    clifford_table,
    decompose_clifford,
    fit_rb_decay,
    generate_rb_sequence,
    simulate_rb,
)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
