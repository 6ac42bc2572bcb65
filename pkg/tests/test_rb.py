import math

import numpy as np
import pytest

from drivephase import DriveChain, NoiseModel, PhasePolynomial
from drivephase import rb as rbm
from drivephase.propagator import fidelity, propagate_pulse, rot_axis, rot_z
from conftest import NATIVE_SLOPE


@pytest.fixture(scope="module")
def table():
    return rbm.clifford_table()


class TestCliffordTable:
    def test_24_elements(self, table):
        assert len(table) == 24

    def test_identity_in_table(self, table):
        assert table.index_of(np.eye(2, dtype=complex)) == 0

    def test_closure_brute_force(self, table):
        for a in table.elements:
            for b in table.elements:
                k = table.multiply(a.index, b.index)
                assert fidelity(table.matrix(k), a.matrix @ b.matrix) > 1 - 1e-9

    def test_inverses_brute_force(self, table):
        for el in table.elements:
            inv = table.inverse(el.index)
            assert fidelity(table.matrix(inv) @ el.matrix, np.eye(2)) > 1 - 1e-9

    def test_elements_distinct_mod_phase(self, table):
        for a in table.elements:
            for b in table.elements:
                if a.index != b.index:
                    assert fidelity(a.matrix, b.matrix) < 1 - 1e-6


class TestDecompositions:
    @pytest.mark.parametrize("strategy", rbm.STRATEGIES)
    def test_recomposition_fidelity(self, table, strategy):
        for el in table.elements:
            plan = rbm.decompose_clifford(el, strategy)
            assert fidelity(rbm.recompose(plan), el.matrix) >= 1 - 1e-12

    def test_identity_uses_no_pulses(self, table):
        for strategy in rbm.STRATEGIES:
            plan = rbm.decompose_clifford(table.elements[0], strategy)
            assert plan.areas == ()

    def test_pi_and_pi_half_at_most_one_pulse(self, table):
        for el in table.elements:
            plan = rbm.decompose_clifford(el, "PiAndPiHalf")
            assert len(plan.areas) <= 1

    def test_pi_half_only_uses_only_pi_half(self, table):
        for el in table.elements:
            plan = rbm.decompose_clifford(el, "PiHalfOnly")
            assert all(a == math.pi / 2 for a in plan.areas)
            assert plan.pre_z == 0.0

    def test_mean_pulse_counts(self):
        # the stated increase from ~1 to ~2.2 pulses per Clifford
        assert rbm.mean_pulse_count("PiAndPiHalf") == pytest.approx(1.0, abs=0.2)
        assert rbm.mean_pulse_count("PiHalfOnly") == pytest.approx(2.2, abs=0.15)

    def test_unknown_strategy(self, table):
        with pytest.raises(ValueError):
            rbm.decompose_clifford(table.elements[3], "Nope")

    def test_double_duration_pulse_shapes(self, ref_shape):
        chain = DriveChain.for_shape(ref_shape)
        shapes = rbm.pulse_shapes_for("DoubleDurationPi", ref_shape, chain)
        assert shapes[math.pi].duration == pytest.approx(2 * ref_shape.duration)
        # nearly equal amplitudes is the point of this strategy
        ratio = shapes[math.pi].amplitude / shapes[math.pi / 2].amplitude
        assert 0.85 < ratio < 1.0
        std = rbm.pulse_shapes_for("PiAndPiHalf", ref_shape, chain)
        assert std[math.pi].amplitude / std[math.pi / 2].amplitude == pytest.approx(2.0)


class TestSequences:
    def test_zero_length(self, table):
        indices, rec = rbm.generate_rb_sequence(0, 1)
        assert indices == []
        assert rec == 0

    def test_net_identity(self, table):
        for seed in range(5):
            indices, rec = rbm.generate_rb_sequence(20, seed)
            u = np.eye(2, dtype=complex)
            for k in indices + [rec]:
                u = table.matrix(k) @ u
            assert fidelity(u, np.eye(2)) > 1 - 1e-12

    def test_seed_determinism(self):
        a = rbm.generate_rb_sequence(50, 7)
        b = rbm.generate_rb_sequence(50, 7)
        c = rbm.generate_rb_sequence(50, 8)
        assert a == b
        assert a != c

    @pytest.mark.parametrize("strategy", rbm.STRATEGIES)
    def test_compiled_sequence_matches_direct(self, table, strategy):
        for seed in range(3):
            indices, rec = rbm.generate_rb_sequence(15, (11, seed))
            area_ids, axes, z_tot = rbm.compile_sequence(indices, rec, strategy)
            areas = (math.pi / 2, math.pi)
            u = np.eye(2, dtype=complex)
            for aid, ax in zip(area_ids, axes):
                u = rot_axis(ax, areas[aid]) @ u
            u = rot_z(z_tot) @ u
            direct = np.eye(2, dtype=complex)
            for k in indices + [rec]:
                direct = table.matrix(k) @ direct
            assert fidelity(u, direct) > 1 - 1e-10


class TestSimulateRb:
    def test_no_distortion_no_decay(self, ref_shape):
        chain = DriveChain.for_shape(ref_shape)
        for strategy in rbm.STRATEGIES:
            cfg = rbm.RbConfig(
                lengths=(4, 16, 64), n_random=3, seed=0, strategy=strategy,
                chain=chain, shape=ref_shape,
            )
            table = rbm.simulate_rb(cfg)
            assert np.all(table.survivals > 1 - 1e-9)

    def test_distortion_produces_decay(self, ref_shape):
        chain = DriveChain.for_shape(ref_shape, native=PhasePolynomial.linear(NATIVE_SLOPE))
        cfg = rbm.RbConfig(
            lengths=(512, 2048, 8192, 32768), n_random=6, seed=1,
            strategy="PiAndPiHalf", chain=chain, shape=ref_shape,
        )
        table = rbm.simulate_rb(cfg)
        means = table.means()
        assert means[0] > means[-1]
        fit = rbm.fit_rb_decay(table)
        assert fit.error_per_clifford > 1e-8
        assert not fit.non_decaying

    def test_compensation_improves_error(self, ref_shape):
        native = PhasePolynomial.linear(NATIVE_SLOPE)
        lengths, n_random = (512, 2048, 8192, 32768), 6
        fits = {}
        for comp in (0.0, -NATIVE_SLOPE):
            chain = DriveChain.for_shape(
                ref_shape, native=native, compensation=PhasePolynomial.linear(comp)
            )
            cfg = rbm.RbConfig(
                lengths=lengths, n_random=n_random, seed=5,
                strategy="PiAndPiHalf", chain=chain, shape=ref_shape,
            )
            fits[comp] = rbm.fit_rb_decay(rbm.simulate_rb(cfg))
        assert fits[-NATIVE_SLOPE].error_per_clifford < 1e-8
        assert fits[0.0].error_per_clifford >= 3 * max(
            fits[-NATIVE_SLOPE].error_per_clifford, 1e-12
        )

    def test_cache_matches_per_pulse_propagation(self, ref_shape):
        # frame-conjugated cached pulses vs direct propagation of each pulse
        chain = DriveChain.for_shape(ref_shape, native=PhasePolynomial.linear(NATIVE_SLOPE))
        shapes = rbm.pulse_shapes_for("PiAndPiHalf", ref_shape, chain)
        cfg = rbm.RbConfig(
            lengths=(100,), n_random=2, seed=3, strategy="PiAndPiHalf",
            chain=chain, shape=ref_shape,
        )
        table = rbm.clifford_table()
        for ri in range(100):
            indices, rec = rbm.generate_rb_sequence(100, (cfg.seed, 0, ri), table)
            area_ids, axes, _ = rbm.compile_sequence(indices, rec, "PiAndPiHalf")
            u = np.eye(2, dtype=complex)
            for aid, ax in zip(area_ids, axes):
                shape = shapes[math.pi if aid else math.pi / 2]
                u = propagate_pulse(chain, shape, float(ax)).matrix @ u
            direct = abs(u[0, 0]) ** 2
            from drivephase.propagator import PulseCache
            cache = PulseCache(chain)
            stack = cache.stack([shapes[math.pi / 2], shapes[math.pi]])
            cached = rbm._survival_unitary(stack, area_ids, axes)
            assert cached == pytest.approx(direct, abs=1e-9)

    def test_density_path_matches_unitary_at_infinite_t2(self, ref_shape):
        chain = DriveChain.for_shape(ref_shape, native=PhasePolynomial.linear(NATIVE_SLOPE))
        base = dict(
            lengths=(16, 64, 256), n_random=3, seed=9, strategy="PiAndPiHalf",
            chain=chain, shape=ref_shape,
        )
        unit = rbm.simulate_rb(rbm.RbConfig(**base))
        dens = rbm.simulate_rb(rbm.RbConfig(**base, noise=NoiseModel(t2=1e6)))
        assert np.abs(unit.survivals - dens.survivals).max() < 1e-6

    def test_finite_t2_decays(self, ref_shape):
        chain = DriveChain.for_shape(ref_shape)
        cfg = rbm.RbConfig(
            lengths=(16, 64, 256), n_random=3, seed=9, strategy="PiAndPiHalf",
            chain=chain, shape=ref_shape, noise=NoiseModel(t2=0.05),
        )
        table = rbm.simulate_rb(cfg)
        means = table.means()
        assert means[0] > means[1] > means[2]


class TestFitRbDecay:
    def test_exact_model_recovery(self):
        lengths = (10, 40, 160, 640)
        p, a, b = 0.999, 0.48, 0.5
        surv = np.array([[a * p**m + b] * 4 for m in lengths])
        fit = rbm.fit_rb_decay(rbm.RbTable(lengths, surv, "PiAndPiHalf"))
        assert fit.p == pytest.approx(p, abs=1e-10)
        assert fit.amplitude == pytest.approx(a, abs=1e-10)
        assert fit.offset == pytest.approx(b, abs=1e-10)
        assert fit.error_per_clifford == pytest.approx((1 - p) / 2, abs=1e-10)

    def test_depolarizing_sanity(self):
        # depolarizing strength r per Clifford shows up as EPC = r/2
        r = 4e-4
        lengths = (50, 200, 800, 3200)
        surv = np.array([[0.5 + 0.5 * (1 - r) ** m] * 3 for m in lengths])
        fit = rbm.fit_rb_decay(rbm.RbTable(lengths, surv, "PiAndPiHalf"))
        assert fit.error_per_clifford == pytest.approx(r / 2, rel=0.05)

    def test_non_decaying_clamped(self):
        surv = np.ones((3, 4))
        fit = rbm.fit_rb_decay(rbm.RbTable((1, 10, 100), surv, "PiAndPiHalf"))
        assert fit.p == 1.0
        assert fit.non_decaying
        assert fit.error_per_clifford == 0.0

    def test_too_few_lengths(self):
        with pytest.raises(ValueError):
            rbm.fit_rb_decay(rbm.RbTable((1, 10), np.ones((2, 3)), "PiAndPiHalf"))

    def test_bootstrap_spread(self):
        rng = np.random.default_rng(0)
        lengths = (50, 200, 800)
        p = 0.9995
        surv = 0.5 + 0.5 * np.power(p, np.array(lengths))[:, None] + rng.normal(
            0, 1e-4, size=(3, 16)
        )
        fit = rbm.fit_rb_decay(
            rbm.RbTable(lengths, surv, "PiAndPiHalf"), bootstrap=50, seed=1
        )
        assert fit.epc_bootstrap_err is not None
        assert fit.epc_bootstrap_err > 0


class TestConfigValidation:
    def test_lengths_must_increase(self, ref_shape):
        chain = DriveChain.for_shape(ref_shape)
        with pytest.raises(ValueError):
            rbm.RbConfig(lengths=(10, 10), n_random=2, seed=0,
                         strategy="PiAndPiHalf", chain=chain, shape=ref_shape)

    def test_min_randomizations(self, ref_shape):
        chain = DriveChain.for_shape(ref_shape)
        with pytest.raises(ValueError):
            rbm.RbConfig(lengths=(10, 20), n_random=1, seed=0,
                         strategy="PiAndPiHalf", chain=chain, shape=ref_shape)
