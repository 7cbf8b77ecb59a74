import numpy as np
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_allclose

from elipsoides import logdet_sdp as lp


def _max_logdet_under_identity(scale: float = 1.0) -> lp.SdpProblem:
    """max logdet X s.a. X <= scale*I; ótimo X = scale*I."""
    p = lp.new_problem()
    X = p.add_matrix_variable("X", 2)
    p.add_psd_constraint(scale * np.eye(2) - X, name="teto")
    p.set_objective(logdet=X)
    return p


class SolveTests(SimpleTestCase):
    def test_logdet_optimum(self):
        sol = lp.solve(_max_logdet_under_identity(2.0))
        self.assertEqual(sol.status, lp.OPTIMAL)
        assert_allclose(sol["X"], 2.0 * np.eye(2), atol=1e-5)
        self.assertAlmostEqual(sol.objective, -2.0 * np.log(2.0), places=5)

    def test_linear_program(self):
        p = lp.new_problem()
        x = p.add_vector_variable("x", 2)
        p.add_linear_constraint(x, ">=", np.array([[1.0], [2.0]]))
        p.set_objective(linear=np.ones((1, 2)) @ x)
        sol = lp.solve(p).raise_for_status()
        self.assertAlmostEqual(sol.objective, 3.0, places=5)
        assert_allclose(sol["x"].reshape(-1), [1.0, 2.0], atol=1e-5)

    def test_equalities_and_nonneg(self):
        p = lp.new_problem()
        x = p.add_vector_variable("x", 2, nonneg=True)
        p.add_linear_constraint(np.ones((1, 2)) @ x, "==", 1.0)
        p.set_objective(linear=np.array([[1.0, 3.0]]) @ x)
        sol = lp.solve(p).raise_for_status()
        self.assertAlmostEqual(sol.objective, 1.0, places=5)

    def test_second_order_cone(self):
        p = lp.new_problem()
        u = p.add_vector_variable("u", 2)
        w = p.add_scalar_variable("w")
        p.add_linear_constraint(u, "==", np.array([[3.0], [4.0]]))
        p.add_soc_constraint(u, w)
        p.set_objective(linear=w)
        sol = lp.solve(p).raise_for_status()
        self.assertAlmostEqual(sol.objective, 5.0, places=5)

    def test_infeasible_is_reported_not_raised(self):
        p = lp.new_problem()
        x = p.add_scalar_variable("x")
        p.add_linear_constraint(x, ">=", 1.0)
        p.add_linear_constraint(x, "<=", 0.0)
        p.set_objective(linear=x)
        sol = lp.solve(p)
        self.assertEqual(sol.status, lp.INFEASIBLE)
        with self.assertRaises(lp.SolverError) as ctx:
            sol.raise_for_status()
        self.assertEqual(ctx.exception.status, lp.INFEASIBLE)

    def test_inconsistent_equalities(self):
        p = lp.new_problem()
        x = p.add_scalar_variable("x")
        p.add_linear_constraint(x, "==", 1.0)
        p.add_linear_constraint(x, "==", 2.0)
        p.set_objective(linear=x)
        self.assertEqual(lp.solve(p).status, lp.INFEASIBLE)

    def test_residual_report_is_feasible(self):
        p = _max_logdet_under_identity()
        sol = lp.solve(p)
        rep = lp.residuals(p, sol)
        self.assertTrue(rep.feasible(1e-7))
        self.assertGreaterEqual(rep.min_psd_eig, -1e-9)

    def test_tight_iteration_cap(self):
        sol = lp.solve(_max_logdet_under_identity(), max_newton=2)
        self.assertIn(sol.status, (lp.MAX_ITERATIONS, lp.OPTIMAL))
        self.assertIn(sol.status, lp.report.STATUSES)


class ModelTests(SimpleTestCase):
    def test_objective_set_twice(self):
        p = lp.new_problem()
        x = p.add_scalar_variable("x")
        p.set_objective(linear=x)
        with self.assertRaises(lp.ModelError):
            p.set_objective(linear=x)

    def test_objective_unset(self):
        p = lp.new_problem()
        p.add_scalar_variable("x")
        with self.assertRaises(lp.ModelError):
            lp.solve(p)

    def test_unknown_variable(self):
        other = lp.new_problem()
        y = other.add_scalar_variable("y")
        p = lp.new_problem()
        p.add_scalar_variable("x")
        with self.assertRaises(lp.ModelError):
            p.add_linear_constraint(y, ">=", 0.0)

    def test_nonsymmetric_block(self):
        p = lp.new_problem()
        x = p.add_scalar_variable("x")
        with self.assertRaises(lp.ModelError):
            p.add_psd_constraint(lp.bmat([[x, 1.0], [0.0, x]]))

    def test_dimension_mismatch(self):
        p = lp.new_problem()
        x = p.add_vector_variable("x", 2)
        with self.assertRaises(lp.ModelError):
            p.add_linear_constraint(x, ">=", np.zeros((3, 1)))

    def test_json_round_trip_solves_the_same(self):
        p = _max_logdet_under_identity(1.5)
        q = lp.SdpProblem.from_dict(p.to_dict())
        self.assertEqual(q.summary(), p.summary())
        self.assertAlmostEqual(lp.solve(q).objective, lp.solve(p).objective, places=6)


class SettingsTests(SimpleTestCase):
    @override_settings(LOGDET_SDP={"max_newton": 123, "gap_tol": 1e-7})
    def test_settings_dict_then_overrides(self):
        cfg = lp.SolverSettings.from_settings(gap_tol=1e-8)
        self.assertEqual(cfg.max_newton, 123)
        self.assertEqual(cfg.gap_tol, 1e-8)

    def test_with_tol(self):
        cfg = lp.SolverSettings().with_tol(1e-5)
        self.assertEqual(cfg.feas_tol, 1e-5)
        self.assertEqual(cfg.accept_gap, 1e-5)
        self.assertIs(cfg.with_tol(None), cfg)


class GradientTests(SimpleTestCase):
    def test_barrier_gradient_matches_finite_differences(self):
        M = np.array([[2.0, 0.3], [0.3, 1.0]])
        self.assertLessEqual(lp.gradient_error(_max_logdet_under_identity(3.0), {"X": M}), 1e-5)

    def test_point_outside_the_domain(self):
        with self.assertRaises(lp.ModelError):
            lp.gradient_error(_max_logdet_under_identity(1.0), {"X": 2.0 * np.eye(2)})
