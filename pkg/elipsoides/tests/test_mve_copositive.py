import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from elipsoides.geometry import DimensionMismatchError, Ellipsoid
from elipsoides.instances import (
    chipped_cop_closed_form,
    chipped_hypercube,
    chipped_smvie_closed_form,
    simplex,
    square_ball_set,
    two_balls_set,
    unit_box,
    unit_square,
)
from elipsoides.mve_copositive import (
    Certificate,
    InfeasibleDualError,
    MveError,
    check_smvie_dual,
    lift_smvie_certificate,
    smvie_dual_objective,
    solve_minkowski_mve,
    solve_polytope_mve,
    solve_projection_mve,
    solve_quadset_mve,
    solve_union_mve,
    verify_certificate,
)
from elipsoides.parallel import make_rng


class PolytopeMveTests(SimpleTestCase):
    def test_simplex_is_the_steiner_ellipse(self):
        E, cert = solve_polytope_mve(simplex(2))
        self.assertAlmostEqual(E.volume, 2.0 / (3.0 * np.sqrt(3.0)), delta=1e-3)
        assert_allclose(E.center, [1.0 / 3.0, 1.0 / 3.0], atol=1e-4)
        self.assertTrue(verify_certificate(simplex(2), E, cert).passed)

    def test_square_gives_the_circumscribed_disk(self):
        E, cert = solve_polytope_mve(unit_square())
        self.assertAlmostEqual(E.volume, 0.5, delta=1e-4)
        self.assertTrue(E.contains(unit_square().vertices, 1e-6))

    def test_certificate_json_round_trip(self):
        E, cert = solve_polytope_mve(simplex(3))
        again = Certificate.from_dict(cert.to_dict())
        self.assertTrue(verify_certificate(simplex(3), E, again).passed)

    def test_corrupted_certificate_fails(self):
        E, cert = solve_polytope_mve(unit_square())
        bad = Certificate(N=-np.abs(cert.N) - 1.0, F=cert.F, g=cert.g, h=cert.h)
        report = verify_certificate(unit_square(), E, bad)
        self.assertFalse(report.passed)
        self.assertIn("N negativo", report.failures)

    def test_shrunken_ellipsoid_fails(self):
        E, cert = solve_polytope_mve(unit_square())
        small = Ellipsoid(2.0 * np.asarray(E.A), 2.0 * np.asarray(E.b))
        self.assertFalse(verify_certificate(unit_square(), small, cert).passed)


class ChippedClosedFormTests(SimpleTestCase):
    def test_closed_form_point_is_feasible(self):
        for K in (2, 3, 4):
            E, cert = chipped_cop_closed_form(K)
            report = verify_certificate(chipped_hypercube(K), E, cert)
            self.assertTrue(report.passed, f"K={K}: {report.failures}")

    def test_optimum_beats_the_closed_form_point(self):
        E_cf, _ = chipped_cop_closed_form(3)
        E, _ = solve_polytope_mve(chipped_hypercube(3))
        self.assertLessEqual(E.volume, E_cf.volume * (1 + 1e-6))


class SmvieLiftTests(SimpleTestCase):
    def test_lift_is_a_valid_certificate(self):
        P = chipped_hypercube(2)
        _, _, Lam, rho = chipped_smvie_closed_form(2)
        E, cert = lift_smvie_certificate(P, Lam, rho)
        self.assertTrue(verify_certificate(P, E, cert).passed)
        self.assertLessEqual(-E.logdet, smvie_dual_objective(P, Lam, rho) + 1e-7)

    def test_lift_of_the_solved_dual_contains_the_polytope(self):
        from elipsoides.mve_baselines import solve_smvie

        for P in (unit_square(), simplex(3), chipped_hypercube(2)):
            _, _, dual = solve_smvie(P)
            E, cert = lift_smvie_certificate(P, dual.Lam, dual.rho)
            self.assertTrue(verify_certificate(P, E, cert).passed)
            self.assertTrue(E.contains(P.vertices, 1e-7))

    def test_infeasible_dual(self):
        P = chipped_hypercube(2)
        _, _, Lam, rho = chipped_smvie_closed_form(2)
        with self.assertRaises(InfeasibleDualError):
            check_smvie_dual(P, Lam, rho + 1.0)
        with self.assertRaises(InfeasibleDualError):
            check_smvie_dual(P, 10.0 * Lam, rho)


class QuadSetMveTests(SimpleTestCase):
    def test_square_with_ball_row(self):
        X = square_ball_set()
        E, cert = solve_quadset_mve(X)
        self.assertTrue(verify_certificate(X, E, cert).passed)
        self.assertTrue(E.contains(X.sample(300, make_rng(5)), 1e-6))
        # não pode ser maior que o MVE do quadrado inteiro
        self.assertLessEqual(E.volume, 0.5 + 1e-5)

    def test_rlt_terms_never_hurt(self):
        X = square_ball_set()
        with_rlt, _ = solve_quadset_mve(X, include_rlt=True)
        without, _ = solve_quadset_mve(X, include_rlt=False)
        self.assertLessEqual(with_rlt.volume, without.volume * (1 + 1e-6))

    def test_lens_of_two_balls(self):
        E, _ = solve_quadset_mve(two_balls_set())
        for p in ([0.5, np.sqrt(0.75)], [0.5, -np.sqrt(0.75)], [0.0, 0.0], [1.0, 0.0]):
            self.assertTrue(E.contains(p, 1e-5))


class LiftedMveTests(SimpleTestCase):
    def test_minkowski_sum_of_squares(self):
        E, cert = solve_minkowski_mve([unit_square(), unit_square()], [np.eye(2), np.eye(2)])
        self.assertTrue(E.contains(2.0 * unit_square().vertices, 1e-6))
        self.assertGreaterEqual(E.volume, 2.0 - 1e-4)
        self.assertEqual(cert.lift.shape, (2, 4))

    def test_union_covers_both_parts(self):
        left = unit_square()
        right = unit_square().image(np.eye(2), [1.0, 0.0])
        E, certs = solve_union_mve([left, right])
        self.assertEqual(len(certs), 2)
        self.assertTrue(E.contains(np.vstack([left.vertices, right.vertices]), 1e-6))

    def test_projection_of_cube(self):
        E, cert = solve_projection_mve(unit_box(3), 2)
        self.assertTrue(E.contains(unit_square().vertices, 1e-6))
        self.assertGreaterEqual(E.volume, 0.5 - 1e-5)

    def test_projection_dimension_check(self):
        with self.assertRaises(MveError):
            solve_projection_mve(unit_box(3), 3)

    def test_union_dimension_check(self):
        with self.assertRaises(DimensionMismatchError):
            solve_union_mve([unit_square(), unit_box(3)])


class AffineCovarianceTests(SimpleTestCase):
    def _check(self, P, T):
        E, _ = solve_polytope_mve(P)
        E_T, cert = solve_polytope_mve(P.image(T))
        expected = abs(np.linalg.det(T)) * E.volume
        self.assertLessEqual(abs(E_T.volume - expected), 1e-5 * expected)
        self.assertTrue(verify_certificate(P.image(T), E_T, cert).passed)

    def test_diagonal_scaling(self):
        self._check(chipped_hypercube(3), np.diag([2.0, 0.5, 3.0]))

    def test_axis_permutation(self):
        from elipsoides.instances import random_polytope

        P = random_polytope(3, 2, make_rng(17))
        self._check(P, np.eye(3)[[2, 0, 1]])
