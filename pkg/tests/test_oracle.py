"""Tests for the finite-difference moving-boundary solver."""

import math

import numpy as np
import pytest

from stefansim.errors import FrontCollapse, InvalidInput, MismatchedProblem
from stefansim.model import (
    BoundaryData,
    ExponentialSource,
    FluxFeedbackSource,
    Material,
    NoSource,
)
from stefansim.oracle import OracleConfig, OracleRun, compare, run_oracle, run_oracle_for
from stefansim.reconstruct import front_position, temperature
from stefansim.similarity import solve_problem

BD = BoundaryData(theta0=1.0, theta_f=0.0)


def unit_material(ste=1.0, delta=1.0, p=1.0):
    return Material(rho=1.0, c0=1.0, k0=1.0, latent_heat=1.0 / ste, delta=delta, p=p)


@pytest.fixture(scope="module")
def classical_sol():
    return solve_problem(unit_material(delta=1e-12), BD, NoSource())


@pytest.fixture(scope="module")
def classical_run(classical_sol):
    return run_oracle_for(classical_sol, OracleConfig(n_space=64, n_time=256))


class TestConfigValidation:
    def test_grid_minimums(self):
        with pytest.raises(InvalidInput):
            OracleConfig(n_space=8)
        with pytest.raises(InvalidInput):
            OracleConfig(n_time=4)

    def test_time_window(self):
        with pytest.raises(InvalidInput):
            OracleConfig(t_start=0.0)
        with pytest.raises(InvalidInput):
            OracleConfig(t_start=2.0, t_end=1.0)

    def test_scheme_weight_range(self):
        with pytest.raises(InvalidInput):
            OracleConfig(theta_scheme=0.25)
        with pytest.raises(InvalidInput):
            OracleConfig(theta_scheme=1.5)


class TestRunStructure:
    def test_shapes_and_monotone_front(self, classical_run):
        cfg = classical_run.config
        assert classical_run.fields.shape == (cfg.n_time + 1, cfg.n_space)
        assert classical_run.front.shape == (cfg.n_time + 1,)
        assert np.all(np.diff(classical_run.front) > 0.0)

    def test_fields_within_band(self, classical_run):
        assert classical_run.fields.min() >= -1e-6
        assert classical_run.fields.max() <= 1.0 + 1e-6

    def test_initial_state_copied_exactly(self, classical_sol, classical_run):
        cfg = classical_run.config
        s0 = front_position(classical_sol, cfg.t_start)
        want = temperature(
            classical_sol, classical_run.xi * s0, cfg.t_start, exact=True
        )
        np.testing.assert_array_equal(classical_run.fields[0], want)
        assert classical_run.front[0] == s0

    def test_run_oracle_entry_point_matches(self, classical_sol, classical_run):
        run = run_oracle(
            unit_material(delta=1e-12),
            BD,
            NoSource(),
            OracleConfig(n_space=64, n_time=256),
        )
        np.testing.assert_array_equal(run.front, classical_run.front)
        np.testing.assert_array_equal(run.fields, classical_run.fields)


class TestAgreement:
    def test_classical_front_coefficient(self, classical_sol, classical_run):
        # s_num(t) / (2 a sqrt(t)) approaches lam at the final time.
        coeff = classical_run.front[-1] / (2.0 * math.sqrt(classical_run.times[-1]))
        assert coeff == pytest.approx(classical_sol.lam, rel=0.01)

    def test_comparison_errors_recorded(self, classical_run):
        assert classical_run.front_rel_err <= 0.02
        assert classical_run.temp_max_err <= 0.02

    def test_refinement_shrinks_error(self, classical_sol, classical_run):
        finer = run_oracle_for(classical_sol, OracleConfig(n_space=128, n_time=1024))
        ratio = classical_run.front_rel_err / finer.front_rel_err
        assert 3.0 <= ratio <= 5.0

    def test_crank_nicolson_scheme_agrees(self, classical_sol):
        run = run_oracle_for(
            classical_sol,
            OracleConfig(n_space=64, n_time=256, theta_scheme=0.5),
        )
        assert run.front_rel_err <= 0.02

    def test_feedback_source_tracks_solution(self):
        sol = solve_problem(unit_material(), BD, FluxFeedbackSource(lambda0=0.5))
        run = run_oracle_for(sol, OracleConfig(n_space=64, n_time=256))
        assert run.front_rel_err <= 0.02
        assert run.temp_max_err <= 0.03


class TestCompare:
    def test_initialized_never_stepped_is_exact(self, classical_sol):
        cfg = OracleConfig(n_space=64, n_time=256)
        s0 = front_position(classical_sol, cfg.t_start)
        xi = np.linspace(0.0, 1.0, cfg.n_space)
        u0 = np.asarray(
            temperature(classical_sol, xi * s0, cfg.t_start, exact=True), dtype=float
        )
        run = OracleRun(
            config=cfg,
            material=classical_sol.material,
            boundary=classical_sol.boundary,
            source=classical_sol.source,
            xi=xi,
            times=np.array([cfg.t_start]),
            front=np.array([s0]),
            fields=u0[None, :],
            front_rel_err=math.nan,
            temp_max_err=math.nan,
        )
        front_err, temp_err = compare(classical_sol, run)
        assert front_err == 0.0
        assert temp_err <= 1e-12

    def test_mismatched_problem_rejected(self, classical_sol, classical_run):
        other = solve_problem(unit_material(ste=2.0, delta=1e-12), BD, NoSource())
        with pytest.raises(MismatchedProblem):
            compare(other, classical_run)

    def test_run_invariants_enforced(self, classical_sol):
        cfg = OracleConfig(n_space=64, n_time=256)
        xi = np.linspace(0.0, 1.0, cfg.n_space)
        common = dict(
            config=cfg,
            material=classical_sol.material,
            boundary=classical_sol.boundary,
            source=classical_sol.source,
            xi=xi,
            times=np.array([0.01, 0.02]),
            front_rel_err=math.nan,
            temp_max_err=math.nan,
        )
        with pytest.raises(FrontCollapse):
            OracleRun(
                front=np.array([0.2, 0.1]),
                fields=np.zeros((2, cfg.n_space)),
                **common,
            )
        with pytest.raises(InvalidInput):
            OracleRun(
                front=np.array([0.1, 0.2]),
                fields=np.full((2, cfg.n_space), 2.0),
                **common,
            )
