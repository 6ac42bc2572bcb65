import math

import numpy as np
import pytest
from scipy.linalg import expm

from drivephase import (
    DriveChain,
    NoiseModel,
    PhasePolynomial,
    PulseShape,
    PulseTrain,
    propagate_density,
    propagate_pulse,
    propagate_train,
    survival_probability,
    turns,
)
from drivephase.analytic import perturbative_coefficients
from drivephase.propagator import (
    SIGMA_X,
    SIGMA_Y,
    DensityMatrix,
    PulseCache,
    fidelity,
    hamiltonian_at,
    rot_z,
)
from conftest import TRAIN_N, NATIVE_SLOPE, plateau_referenced

# frozen by this implementation at step = 1 ns; cross-checked against the
# first-order formula (agreement 8e-7) and step-converged to 2e-7
DIP_SURVIVAL = 0.882964567058


class TestHamiltonian:
    def test_zero_envelope(self, distorted_chain, ref_shape):
        h = hamiltonian_at(distorted_chain, ref_shape, 0.0, 0.0)
        assert np.abs(h).max() == 0.0

    def test_x_axis(self, clean_chain, ref_shape):
        t = ref_shape.duration / 2
        h = hamiltonian_at(clean_chain, ref_shape, 0.0, t)
        expected = clean_chain.rabi_rate / 2 * SIGMA_X
        assert np.abs(h - expected).max() < 1e-6

    def test_y_axis_by_frame(self, clean_chain, ref_shape):
        t = ref_shape.duration / 2
        h = hamiltonian_at(clean_chain, ref_shape, math.pi / 2, t)
        expected = clean_chain.rabi_rate / 2 * SIGMA_Y
        assert np.abs(h - expected).max() < 1e-6

    def test_hermitian(self, distorted_chain, ref_shape):
        for t in np.linspace(0, ref_shape.duration, 7):
            h = hamiltonian_at(distorted_chain, ref_shape, 0.3, t)
            assert np.abs(h - h.conj().T).max() < 1e-12


class TestPropagatePulse:
    def test_2pi_rotation_is_minus_identity(self, clean_chain, ref_shape):
        u = propagate_pulse(clean_chain, ref_shape).matrix
        assert abs(np.trace(u.conj().T @ (-np.eye(2)))) / 2 >= 1 - 1e-9

    def test_pi_rotation(self, clean_chain, ref_shape):
        u = propagate_pulse(clean_chain, ref_shape.scaled(0.5)).matrix
        target = expm(-0.5j * math.pi * SIGMA_X)
        assert fidelity(u, target) >= 1 - 1e-9

    def test_unitarity(self, distorted_chain, ref_shape):
        assert propagate_pulse(distorted_chain, ref_shape).unitarity_defect() < 1e-12

    def test_step_halving_single_pulse(self, distorted_chain, ref_shape):
        p1 = propagate_pulse(distorted_chain, ref_shape, step=1e-9).survival()
        p2 = propagate_pulse(distorted_chain, ref_shape, step=0.5e-9).survival()
        assert abs(p1 - p2) < 1e-10

    def test_bad_step(self, distorted_chain, ref_shape):
        with pytest.raises(ValueError):
            propagate_pulse(distorted_chain, ref_shape, step=0.0)

    def test_frame_covariance(self, distorted_chain, ref_shape):
        u0 = propagate_pulse(distorted_chain, ref_shape.scaled(0.37)).matrix
        for theta in (0.3, -1.2, 2.9):
            u_theta = propagate_pulse(
                distorted_chain, ref_shape.scaled(0.37), frame_phase=theta
            ).matrix
            conj = rot_z(theta) @ u0 @ rot_z(-theta)
            assert np.abs(u_theta - conj).max() < 1e-10


class TestPropagateTrain:
    def test_revival_at_199_over_200(self, clean_chain, ref_shape):
        train = PulseTrain(ref_shape.scaled(199 / 200), TRAIN_N)
        p = propagate_train(clean_chain, train).survival()
        assert p >= 1 - 1e-9

    def test_dip_at_unity_amplitude(self, distorted_chain, ref_shape):
        train = PulseTrain(ref_shape, TRAIN_N)
        p = propagate_train(distorted_chain, train).survival()
        assert p == pytest.approx(DIP_SURVIVAL, abs=1e-9)
        assert p < 0.9  # clearly visible dip

    def test_single_pulse_matches(self, distorted_chain, ref_shape):
        train = PulseTrain(ref_shape.scaled(0.73), 1)
        u1 = propagate_train(distorted_chain, train).matrix
        u2 = propagate_pulse(distorted_chain, ref_shape.scaled(0.73)).matrix
        assert np.abs(u1 - u2).max() < 1e-14

    def test_unitarity_long_train(self, distorted_chain, ref_shape):
        train = PulseTrain(ref_shape.scaled(0.371), 10_000)
        assert propagate_train(distorted_chain, train).unitarity_defect() < 1e-12

    def test_convergence_order(self, distorted_chain, ref_shape):
        # midpoint rule: successive step-halving differences shrink ~4x
        train = PulseTrain(ref_shape, TRAIN_N)
        p = [
            propagate_train(distorted_chain, train, step=s).survival()
            for s in (4e-9, 2e-9, 1e-9)
        ]
        ratio = abs(p[0] - p[1]) / abs(p[1] - p[2])
        assert ratio >= 3.5

    def test_per_pulse_frame_phases(self, distorted_chain, ref_shape):
        phases = (0.0, 0.4, -0.9)
        train = PulseTrain(ref_shape.scaled(0.5), 3, frame_phases=phases)
        u = propagate_train(distorted_chain, train).matrix
        direct = np.eye(2, dtype=complex)
        for ph in phases:
            direct = propagate_pulse(distorted_chain, ref_shape.scaled(0.5), ph).matrix @ direct
        assert np.abs(u - direct).max() < 1e-10


class TestPerturbativeConsistency:
    def test_first_order_unitary_error_scales_quadratically(self, ref_shape):
        # U_exact vs U0 + U1 with (eps, phi') scaled: error falls as s^2
        coeffs = perturbative_coefficients(ref_shape)
        eps0, slope0 = 1.5e-3, turns(2e-3)
        errs = []
        for s in (0.5, 0.25, 0.125):
            eps, slope = s * eps0, s * slope0
            chain = DriveChain.for_shape(
                ref_shape, native=plateau_referenced(slope, 1 + eps)
            )
            u = propagate_pulse(chain, ref_shape.scaled(1 + eps), step=0.5e-9).matrix
            model = -(
                np.eye(2)
                - 0.5j * eps * coeffs.a_x * SIGMA_X
                - 0.5j * slope * coeffs.a_y * SIGMA_Y
            )
            phase = np.exp(1j * np.angle(np.trace(model.conj().T @ u)))
            errs.append(np.abs(u / phase - model).max())
        assert errs[0] / errs[1] >= 3.5
        assert errs[1] / errs[2] >= 3.5


class TestDensity:
    def test_infinite_t2_matches_unitary(self, distorted_chain, ref_shape):
        train = PulseTrain(ref_shape, 5)
        rho = propagate_density(distorted_chain, train, NoiseModel())
        u = propagate_train(distorted_chain, train)
        assert abs(rho.survival() - u.survival()) < 1e-10

    def test_pure_dephasing(self, ref_shape):
        # zero drive: coherence decays as exp(-t/T2)
        chain = DriveChain.for_shape(ref_shape)
        t2 = 3e-6
        plus = DensityMatrix(np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex))
        train = PulseTrain(ref_shape.scaled(0.0), 1)
        rho = propagate_density(chain, train, NoiseModel(t2=t2), initial=plus)
        expected = 0.5 * math.exp(-ref_shape.duration / t2)
        assert abs(rho.coherence()) == pytest.approx(expected, rel=1e-9)

    def test_t2_validation(self):
        with pytest.raises(ValueError):
            NoiseModel(t2=0.0)

    def test_decoherence_formula_terms(self):
        # short ramps keep the Bloch rotation nearly uniform, where the
        # 1 - (N phi' Ay)^2/4 - N*T/(4*T2) law holds term by term
        duration = 1.2e-6
        shape = PulseShape(duration, duration / 30, 1.0)
        n = 20
        t2 = 1000 * n * duration
        coeffs = perturbative_coefficients(shape, n_pulses=n)
        slope = 2 * math.sqrt(1e-3) / (n * abs(coeffs.a_y))
        chain = DriveChain.for_shape(shape, native=plateau_referenced(slope))
        train = PulseTrain(shape, n)
        p_full = propagate_density(chain, train, NoiseModel(t2=t2)).survival()
        p_unit = propagate_density(chain, train, NoiseModel()).survival()
        phase_deficit = 1 - p_unit
        dec_deficit = p_unit - p_full
        assert phase_deficit == pytest.approx(1e-3, rel=0.1)
        assert dec_deficit == pytest.approx(n * duration / (4 * t2), rel=0.1)

    def test_validate(self):
        DensityMatrix.ground().validate()
        with pytest.raises(ValueError):
            DensityMatrix(np.array([[0.7, 0], [0, 0.7]], dtype=complex)).validate()


class TestSurvivalProbability:
    def test_identity_map(self, clean_chain, ref_shape):
        u = propagate_pulse(clean_chain, ref_shape.scaled(0.25))
        assert survival_probability(u) == pytest.approx(u.survival())

    def test_spam(self, clean_chain, ref_shape):
        u = propagate_pulse(clean_chain, ref_shape)  # survival ~ 1
        obs = survival_probability(u, NoiseModel(e_spam=0.02))
        assert obs == pytest.approx(0.99, abs=1e-6)

    def test_argmax_invariance(self, ref_shape):
        # SPAM rescales affinely: the argmax over a scan cannot move
        slopes = np.linspace(-turns(3e-3), turns(3e-3), 21)
        def scan(noise):
            out = []
            for s in slopes:
                chain = DriveChain.for_shape(
                    ref_shape,
                    native=PhasePolynomial.linear(NATIVE_SLOPE),
                    compensation=PhasePolynomial.linear(s),
                )
                cache = PulseCache(chain)
                p = cache.train_survival(ref_shape, 50)
                out.append(noise.observe(p) if noise else p)
            return np.argmax(out)

        assert scan(None) == scan(NoiseModel(e_spam=0.3))


class TestPulseCache:
    def test_cache_matches_direct(self, distorted_chain, ref_shape):
        cache = PulseCache(distorted_chain)
        train = PulseTrain(ref_shape.scaled(0.9), 17)
        direct = propagate_train(distorted_chain, train).survival()
        assert cache.train_survival(ref_shape.scaled(0.9), 17) == pytest.approx(
            direct, abs=1e-12
        )
