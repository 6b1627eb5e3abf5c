"""Tests for the numeric overlap solver and its geometric helpers."""

import math

import numpy as np
import pytest

from entgeo import (
    SolverConfig,
    basis_state,
    bloch_to_spinor,
    bloch_vector,
    correlation_matrix,
    dicke4_state,
    geometric_measure,
    ghz_state,
    haar_random_state,
    maximize_quarter_form,
    nearest_product_state,
    overlap_with_product,
    permute_qubits,
    quarter_form,
    spinor_to_bloch,
    stationarity_residual,
    w_state,
    LocalUnitary,
    apply_local_unitary,
)

from oracles import grid_overlap_sq

FAST = SolverConfig(restarts=16)


class TestKnownValues:
    def test_ghz(self):
        result = nearest_product_state(ghz_state(3), FAST)
        assert result.g_squared == pytest.approx(0.5, abs=1e-9)
        # either |000> or |111> is an acceptable maximizer
        amps = np.abs(result.product.amplitudes())
        assert max(amps[0], amps[7]) == pytest.approx(1.0, abs=1e-7)

    def test_w(self):
        result = nearest_product_state(w_state(3), FAST)
        assert result.g_squared == pytest.approx(4 / 9, abs=1e-9)

    def test_w_against_grid_oracle(self):
        assert grid_overlap_sq(w_state(3).amplitudes) == pytest.approx(4 / 9, abs=1e-9)

    def test_dicke4(self):
        result = nearest_product_state(dicke4_state(), FAST)
        assert result.g_squared == pytest.approx(3 / 8, abs=1e-9)

    def test_product_state_converges_fast(self):
        result = nearest_product_state(basis_state(3, 5), FAST)
        assert result.g_squared == pytest.approx(1.0, abs=1e-12)
        assert result.iterations <= 3

    def test_g_squared_consistent_with_product(self):
        for seed in range(5):
            s = haar_random_state(3, seed=seed)
            result = nearest_product_state(s, FAST)
            direct = overlap_with_product(s, result.product) ** 2
            assert result.g_squared == pytest.approx(direct, abs=1e-10)


class TestSolverContracts:
    def test_monotone_sweeps(self):
        for seed in range(5):
            s = haar_random_state(3, seed=seed)
            result = nearest_product_state(
                s, SolverConfig(restarts=8, seed=seed), record_history=True
            )
            hist = result.sweep_history
            diffs = np.diff(hist, axis=0)
            assert np.nanmin(diffs) > -1e-14

    def test_determinism(self):
        s = haar_random_state(3, seed=3)
        a = nearest_product_state(s, SolverConfig(restarts=8, seed=11))
        b = nearest_product_state(s, SolverConfig(restarts=8, seed=11))
        assert a.g_squared == b.g_squared
        for x, y in zip(a.product.spinors, b.product.spinors):
            assert np.array_equal(x, y)

    def test_solver_vs_grid_oracle(self):
        for seed in range(25):
            s = haar_random_state(3, seed=seed)
            solver = nearest_product_state(s, FAST).g_squared
            oracle = grid_overlap_sq(s.amplitudes)
            assert solver == pytest.approx(oracle, abs=1e-6)

    def test_lu_invariance(self):
        for seed in range(10):
            s = haar_random_state(3, seed=seed)
            u = LocalUnitary.random(3, seed=500 + seed)
            a = nearest_product_state(s, FAST).g_squared
            b = nearest_product_state(apply_local_unitary(s, u), FAST).g_squared
            assert a == pytest.approx(b, abs=1e-7)

    def test_permutation_symmetry(self):
        for seed in range(10):
            s = haar_random_state(3, seed=seed)
            a = nearest_product_state(s, FAST).g_squared
            b = nearest_product_state(permute_qubits(s, (2, 0, 1)), FAST).g_squared
            assert a == pytest.approx(b, abs=1e-9)

    def test_stationarity_and_multipliers(self):
        for seed in range(10):
            s = haar_random_state(3, seed=seed)
            result = nearest_product_state(s, FAST)
            assert result.stationarity_residual <= 1e-8
            lam1, lam2 = result.lagrange
            assert lam1 > 0 and lam2 > 0

    def test_four_qubit_residual(self):
        result = nearest_product_state(haar_random_state(4, seed=2), FAST)
        assert result.stationarity_residual <= 1e-8
        assert result.lagrange is None

    def test_single_qubit_rejected(self):
        with pytest.raises(ValueError):
            nearest_product_state(basis_state(1, 0), FAST)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(restarts=0)


class TestQuarterForm:
    def test_basis_state(self):
        s = basis_state(3, 0)
        z = np.array([0.0, 0.0, 1.0])
        value = quarter_form(z, z, bloch_vector(s, 0), bloch_vector(s, 1),
                             correlation_matrix(s, 0, 1))
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_ghz_along_z(self):
        s = ghz_state(3)
        z = np.array([0.0, 0.0, 1.0])
        value = quarter_form(z, z, bloch_vector(s, 0), bloch_vector(s, 1),
                             correlation_matrix(s, 0, 1))
        assert value == pytest.approx(0.5, abs=1e-12)

    def test_non_unit_rejected(self):
        s = ghz_state(3)
        with pytest.raises(ValueError):
            quarter_form([0, 0, 2.0], [0, 0, 1.0], bloch_vector(s, 0),
                         bloch_vector(s, 1), correlation_matrix(s, 0, 1))

    def test_maximum_equals_solver(self):
        for seed in range(15):
            s = haar_random_state(3, seed=seed)
            value, x, y = maximize_quarter_form(
                bloch_vector(s, 0), bloch_vector(s, 1), correlation_matrix(s, 0, 1),
                seed=seed,
            )
            solver = nearest_product_state(s, FAST).g_squared
            assert value == pytest.approx(solver, abs=1e-9)


class TestStationarityResidual:
    def test_ghz_exact_solution(self):
        z = np.array([0.0, 0.0, 1.0])
        assert stationarity_residual(ghz_state(3), z, z, 1.0, 1.0) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_perturbed_is_positive(self):
        x = np.array([math.sin(0.1), 0.0, math.cos(0.1)])
        z = np.array([0.0, 0.0, 1.0])
        assert stationarity_residual(ghz_state(3), x, z, 1.0, 1.0) > 1e-3

    def test_converged_result_satisfies_stationarity(self):
        s = haar_random_state(3, seed=77)
        result = nearest_product_state(s, FAST)
        x = spinor_to_bloch(result.product.spinors[0])
        y = spinor_to_bloch(result.product.spinors[1])
        lam1, lam2 = result.lagrange
        assert stationarity_residual(s, x, y, lam1, lam2) <= 1e-8


class TestSpinorBloch:
    def test_poles(self):
        assert np.allclose(bloch_to_spinor([0, 0, 1]), [1, 0])
        assert np.allclose(bloch_to_spinor([0, 0, -1]), [0, 1])

    def test_equator(self):
        assert np.allclose(bloch_to_spinor([1, 0, 0]), [1 / math.sqrt(2), 1 / math.sqrt(2)])

    def test_roundtrip(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            v = rng.normal(size=3)
            v /= np.linalg.norm(v)
            assert np.abs(spinor_to_bloch(bloch_to_spinor(v)) - v).max() < 1e-12

    def test_phase_convention(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            z = rng.normal(size=2) + 1j * rng.normal(size=2)
            z /= np.linalg.norm(z)
            back = bloch_to_spinor(spinor_to_bloch(z))
            assert back[0].imag == pytest.approx(0.0, abs=1e-12)
            assert back[0].real >= -1e-15
            # equal up to the removed phase
            assert abs(abs(np.vdot(back, z)) - 1.0) < 1e-12

    def test_non_unit_rejected(self):
        with pytest.raises(ValueError):
            bloch_to_spinor([0, 0, 0.5])
        with pytest.raises(ValueError):
            spinor_to_bloch([1.0, 1.0])


class TestGeometricMeasure:
    def test_product(self):
        assert geometric_measure(1.0) == pytest.approx(0.0)

    def test_half(self):
        assert geometric_measure(0.5) == pytest.approx(math.log(2.0))

    def test_dicke_value(self):
        assert geometric_measure(3 / 8) == pytest.approx(math.log(8 / 3))

    def test_invalid(self):
        with pytest.raises(ValueError):
            geometric_measure(0.0)
        with pytest.raises(ValueError):
            geometric_measure(-0.2)
