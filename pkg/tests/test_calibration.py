import math

import numpy as np
import pytest

from drivephase import (
    DriveChain,
    NoiseModel,
    PhasePolynomial,
    PulseShape,
    turns,
)
from drivephase.analytic import perturbative_coefficients, perturbative_survival
from drivephase.calibration import (
    calibrate_chain_polynomial,
    calibrate_linear,
    calibrate_polynomial,
    compensation_objective,
    infer_slope_from_contrast,
    polynomial_compensation_objective,
)
from conftest import A_Y_REF, TRAIN_N, NATIVE_SLOPE


def chain_with_native(shape, *coeffs):
    return DriveChain.for_shape(shape, native=PhasePolynomial((0.0, *coeffs)))


class TestCalibrateLinear:
    def test_reference_value_recovery(self, ref_shape):
        chain = chain_with_native(ref_shape, NATIVE_SLOPE)
        objective = compensation_objective(chain, ref_shape, TRAIN_N)
        res = calibrate_linear(objective)
        assert res.value == pytest.approx(-NATIVE_SLOPE, abs=turns(1e-4))

    def test_zero_native(self, ref_shape):
        chain = chain_with_native(ref_shape, 0.0)
        res = calibrate_linear(compensation_objective(chain, ref_shape, TRAIN_N))
        assert abs(res.value) < turns(1e-4)

    def test_spam_does_not_move_argmax(self, ref_shape):
        chain = chain_with_native(ref_shape, NATIVE_SLOPE)
        clean = calibrate_linear(compensation_objective(chain, ref_shape, TRAIN_N))
        spam = calibrate_linear(
            compensation_objective(chain, ref_shape, TRAIN_N, NoiseModel(e_spam=0.05))
        )
        assert spam.value == pytest.approx(clean.value, abs=turns(1e-6))

    def test_boundary_raises(self, ref_shape):
        chain = chain_with_native(ref_shape, turns(8e-3))
        objective = compensation_objective(chain, ref_shape, TRAIN_N)
        with pytest.raises(ValueError, match="boundary"):
            calibrate_linear(objective, scan_range=(-turns(5e-3), turns(5e-3)))

    def test_tie_flagged(self):
        objective = lambda x: 1.0  # flat: every point ties
        res = calibrate_linear(objective, scan_range=(-1.0, 1.0), grid_size=5)
        assert res.tie_broken
        assert res.value == pytest.approx(0.0, abs=1e-12)

    def test_recovery_across_slope_range(self, ref_shape):
        for slope in (-turns(5e-3), turns(2.5e-3), turns(5e-3)):
            chain = chain_with_native(ref_shape, slope)
            res = calibrate_linear(
                compensation_objective(chain, ref_shape, TRAIN_N),
                scan_range=(-turns(7e-3), turns(7e-3)),
                grid_size=57,
            )
            assert abs(res.value + slope) <= turns(1e-4)

    def test_monotone_sensitivity_in_n(self, ref_shape):
        # under fixed shot noise the recovery error shrinks with N (the
        # contrast curvature grows as N^2); noise-free errors sit at the
        # grid-symmetry floor, so the comparison needs noise to be meaningful
        chain = chain_with_native(ref_shape, NATIVE_SLOPE)
        errs = {}
        for n in (50, 200):
            errors = []
            for seed in range(4):
                res = calibrate_linear(
                    compensation_objective(
                        chain, ref_shape, n, shots=500, seed=seed
                    ),
                    refine_halfwidth=6,
                )
                errors.append(abs(res.value + NATIVE_SLOPE))
            errs[n] = np.mean(errors)
        assert errs[200] < errs[50]

    def test_drift_robustness_regime(self, ref_shape):
        # amplitude offsets shift the objective but, while |eps*A_x| << |phi'*A_y|,
        # barely move the argmax
        chain = chain_with_native(ref_shape, NATIVE_SLOPE)
        eps = 1e-5  # |eps A_x| / |phi' A_y| ~ 0.018
        res = calibrate_linear(
            compensation_objective(chain, ref_shape, TRAIN_N, eps_drift=eps)
        )
        assert res.value == pytest.approx(-NATIVE_SLOPE, abs=turns(1.5e-4))


class TestCalibratePolynomial:
    def test_quadratic_native_roundtrip(self, ref_shape):
        # native phase is purely quadratic: recover phi'' within 5% and
        # restore P0 >= 1 - 1e-6; the multi-amplitude objective is what pins
        # the individual coefficients (a single amplitude leaves a
        # linear-vs-quadratic degeneracy)
        native_quad = turns(2e-3)
        chain = DriveChain.for_shape(
            ref_shape, native=PhasePolynomial((0.0, 0.0, native_quad))
        )
        res = calibrate_chain_polynomial(chain, ref_shape, TRAIN_N, orders=2)
        assert res.coefficients[1] == pytest.approx(-native_quad, rel=0.05)
        assert abs(res.coefficients[0]) < turns(1e-4)
        assert res.p0 >= 1 - 1e-6
        assert res.converged

    def test_zero_native_all_zero(self, ref_shape):
        chain = DriveChain.for_shape(ref_shape)
        res = calibrate_chain_polynomial(chain, ref_shape, TRAIN_N, orders=2)
        assert np.abs(res.coefficients).max() < turns(1e-4)

    def test_cubic_native_roundtrip(self, ref_shape):
        native_cubic = turns(1.5e-3)
        chain = DriveChain.for_shape(
            ref_shape, native=PhasePolynomial((0.0, 0.0, 0.0, native_cubic))
        )
        res = calibrate_chain_polynomial(chain, ref_shape, TRAIN_N, orders=3, budget=8000)
        assert res.coefficients[2] == pytest.approx(-native_cubic, rel=0.05)
        assert res.p0 >= 1 - 1e-6

    def test_orders_one_matches_linear(self, ref_shape):
        # same scan-and-refine machinery; the ascent adds one fine pass
        chain = chain_with_native(ref_shape, NATIVE_SLOPE)
        objective_1d = compensation_objective(chain, ref_shape, TRAIN_N)
        lin = calibrate_linear(objective_1d)
        poly = calibrate_polynomial(
            lambda c: objective_1d(c[0]), orders=1, budget=200, max_sweeps=1
        )
        assert poly.coefficients[0] == pytest.approx(lin.value, abs=turns(2e-5))

    def test_budget_exhaustion_flags(self, ref_shape):
        chain = chain_with_native(ref_shape, NATIVE_SLOPE)
        objective_1d = compensation_objective(chain, ref_shape, 20)
        res = calibrate_polynomial(
            lambda c: objective_1d(c[0]), orders=1, budget=10
        )
        assert not res.converged

    def test_bad_orders(self):
        with pytest.raises(ValueError):
            calibrate_polynomial(lambda c: 1.0, orders=4)


class TestInferSlope:
    def test_full_contrast(self):
        res = infer_slope_from_contrast(1.0, TRAIN_N, A_Y_REF)
        assert res.phi_prime_abs == 0.0
        assert not res.ambiguous

    def test_zero_contrast(self):
        res = infer_slope_from_contrast(0.0, TRAIN_N, A_Y_REF)
        assert res.phi_prime_abs == pytest.approx(math.pi / (TRAIN_N * abs(A_Y_REF)))
        assert res.ambiguous

    def test_roundtrip_with_survival_formula(self, ref_shape):
        coeffs = perturbative_coefficients(ref_shape, n_pulses=TRAIN_N)
        for p0 in (0.2, 0.6, 0.95):
            res = infer_slope_from_contrast(p0, TRAIN_N, coeffs.a_y)
            assert perturbative_survival(coeffs, res.phi_prime_abs) == pytest.approx(
                p0, abs=1e-12
            )

    def test_domain_error(self):
        with pytest.raises(ValueError):
            infer_slope_from_contrast(1.2, TRAIN_N, A_Y_REF)
