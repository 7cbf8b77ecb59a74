from unittest import mock

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from elipsoides import mve_baselines
from elipsoides.geometry import Ellipsoid
from elipsoides.instances import (
    chipped_hypercube,
    chipped_smvie_radius,
    random_simplex,
    simplex,
    square_ball_set,
    square_with_circumscribed_ball,
    unit_square,
    with_redundant_ellipsoid,
)
from elipsoides.mve_baselines import (
    MveError,
    SMVIE_GAP_TOL,
    SmvieDual,
    design_weights,
    mve_of_points,
    run_method,
    separation_oracle,
    solve_exact_constraint_generation,
    solve_ktt,
    solve_smvie,
    solve_sproc,
)
from elipsoides.parallel import make_rng


class SmvieTests(SimpleTestCase):
    def test_square(self):
        E, inner, dual = solve_smvie(unit_square())
        self.assertAlmostEqual(E.volume, 1.0, delta=1e-4)
        assert_allclose(inner.d, [0.5, 0.5], atol=1e-5)
        self.assertLessEqual(inner.max_row_violation(unit_square()), 1e-6)
        self.assertAlmostEqual(-E.logdet, dual.objective(unit_square()), delta=1e-5)
        self.assertLessEqual(dual.gap, SMVIE_GAP_TOL)

    def test_gap_above_tolerance_is_an_error(self):
        original = mve_baselines._solve_smvie_dual

        def shifted(P, settings):
            dual, sol = original(P, settings)
            return SmvieDual(dual.Lam, 1.01 * dual.rho), sol

        with mock.patch.object(mve_baselines, "_solve_smvie_dual", shifted):
            with self.assertRaises(MveError):
                solve_smvie(unit_square())

    def test_chipped_closed_form(self):
        E, _, _ = solve_smvie(chipped_hypercube(2), with_dual=False)
        self.assertAlmostEqual(E.radius, chipped_smvie_radius(2), delta=1e-4 * chipped_smvie_radius(2))


class SprocTests(SimpleTestCase):
    def test_fixed_point_with_the_smvie_row(self):
        E_s, _, _ = solve_smvie(unit_square(), with_dual=False)
        E, mu, lam = solve_sproc(with_redundant_ellipsoid(unit_square(), E_s), return_multipliers=True)
        assert_allclose(E.A, E_s.A, atol=1e-4)
        assert_allclose(E.b, E_s.b, atol=1e-4)
        self.assertLessEqual(float(np.abs(mu).max()), 1e-4)
        self.assertAlmostEqual(float(lam[0]), 1.0, delta=1e-4)

    def test_circumscribed_ball_is_kept(self):
        E = solve_sproc(square_with_circumscribed_ball())
        self.assertAlmostEqual(E.volume, 0.5, delta=1e-4)

    def test_contains_the_quarter_disk(self):
        X = square_ball_set()
        E = solve_sproc(X)
        self.assertTrue(E.contains(X.sample(300, make_rng(11)), 1e-6))

    def test_needs_a_quadratic_row(self):
        from elipsoides.geometry import QuadSet

        with self.assertRaisesMessage(MveError, "sproc exige ao menos uma linha quadrática"):
            solve_sproc(QuadSet(unit_square(), ()))


class KttTests(SimpleTestCase):
    def test_square(self):
        E = solve_ktt(unit_square())
        self.assertTrue(E.contains(unit_square().vertices, 1e-6))
        self.assertGreaterEqual(E.volume, 0.5 - 1e-5)

    def test_contains_simplex(self):
        E = solve_ktt(simplex(3))
        self.assertTrue(E.contains(simplex(3).vertices, 1e-6))


class ExactTests(SimpleTestCase):
    def test_design_weights_on_square(self):
        res = design_weights(unit_square().vertices, eps=1e-9)
        assert_allclose(res.weights, np.full(4, 0.25), atol=1e-6)
        self.assertLessEqual(res.measure, 1e-9)

    def test_mve_of_points_contains_every_point(self):
        X = make_rng(4).standard_normal((30, 3))
        E = mve_of_points(X)
        self.assertTrue(E.contains(X, 1e-9))

    def test_mve_of_points_rejects_flat_sets(self):
        with self.assertRaises(MveError):
            mve_of_points([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])

    def test_square(self):
        E = solve_exact_constraint_generation(unit_square())
        self.assertAlmostEqual(E.volume, 0.5, delta=1e-4)
        _, level = separation_oracle(unit_square(), E)
        self.assertLessEqual(level, 1.0 + 1e-7)

    def test_constraint_generation_matches_the_vertex_mve(self):
        from elipsoides.instances import random_polytope
        from elipsoides.mve_baselines import CG_EPS

        P = random_polytope(3, 3, make_rng(21))
        cg = solve_exact_constraint_generation(P).volume
        pts = mve_of_points(P.vertices, eps=CG_EPS).volume
        self.assertLessEqual(abs(cg - pts) / pts, 1e-5)

    def test_simplex_matches_cop_and_smvie(self):
        P = random_simplex(3, make_rng(9))
        exact = run_method(P, "exact").ellipsoid.volume
        for method in ("cop", "smvie"):
            got = run_method(P, method).ellipsoid.volume
            self.assertLessEqual(abs(got - exact) / exact, 1e-3, method)


class RunMethodTests(SimpleTestCase):
    def test_every_method_on_the_square(self):
        expected = {"cop": 0.5, "smvie": 1.0, "exact": 0.5}
        for method, vol in expected.items():
            res = run_method(unit_square(), method)
            self.assertEqual(res.method, method)
            self.assertAlmostEqual(res.ellipsoid.volume, vol, delta=1e-4, msg=method)
            self.assertGreaterEqual(res.wall_time, 0.0)

    def test_sproc_on_pure_polytope(self):
        with self.assertRaises(MveError):
            run_method(unit_square(), "sproc")

    def test_unknown_method(self):
        with self.assertRaises(MveError):
            run_method(unit_square(), "lowner")

    def test_polytope_only_methods_reject_quadratic_rows(self):
        with self.assertRaises(MveError):
            run_method(square_ball_set(), "smvie")

    def test_cop_dominates_smvie_on_random_polytopes(self):
        from elipsoides.instances import random_polytope

        rng = make_rng(2024)
        for _ in range(3):
            P = random_polytope(2, 2, rng)
            cop = run_method(P, "cop").ellipsoid.volume
            smvie = run_method(P, "smvie").ellipsoid.volume
            self.assertLessEqual(cop, smvie * (1 + 1e-6))

    def test_redundant_row_requires_containment(self):
        from elipsoides.geometry import GeometryError

        with self.assertRaises(GeometryError):
            with_redundant_ellipsoid(unit_square(), Ellipsoid.ball([0.5, 0.5], 0.1))
