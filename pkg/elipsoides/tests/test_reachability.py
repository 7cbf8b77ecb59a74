import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from elipsoides import reachability as reach
from elipsoides.geometry import Ellipsoid, Polytope
from elipsoides.instances import box
from elipsoides.mve_copositive import verify_certificate
from elipsoides.parallel import make_rng


def _point_control(u):
    u = np.asarray(u, dtype=float)
    return Polytope(np.vstack([np.eye(u.size), -np.eye(u.size)]), np.concatenate([u, -u]))


class ExampleSystemTests(SimpleTestCase):
    def test_first_step_is_the_ball_through_the_octagon_vertices(self):
        E1 = reach.first_step(reach.example_system())
        self.assertAlmostEqual(E1.radius, np.sqrt(1.16), delta=1e-4)
        assert_allclose(E1.center, [0.0, 0.0], atol=1e-5)
        self.assertTrue(E1.contains(reach.example_system().control_vertices, 1e-9))

    def test_sequence_contains_the_sampled_states(self):
        sys = reach.example_system()
        ells = reach.run_example(3)
        self.assertEqual(len(ells), 3)
        self.assertLessEqual(reach.containment_worst(sys, ells, 400, make_rng(6)), 1.0 + reach.CONTAIN_TOL)
        for t, E in enumerate(ells, start=1):
            self.assertTrue(E.contains(reach.reachable_boundary(sys, t, 64), 1e-5), t)

    def test_step_certificate_checks_out(self):
        sys = reach.example_system()
        E1 = reach.first_step(sys)
        E2, X, cert = reach.propagate_with_certificate(sys, E1)
        self.assertTrue(verify_certificate(X, E2, cert).passed)
        self.assertTrue(E2.contains(reach.step_samples(sys, E1), 1e-5))

    def test_horizon_must_be_positive(self):
        with self.assertRaises(reach.ReachabilityError):
            reach.reach_sequence(reach.example_system(), 0)


class ExactSetTests(SimpleTestCase):
    def test_support_function(self):
        sys = reach.example_system()
        self.assertAlmostEqual(reach.reachable_support(sys, 1, [1.0, 0.0]), 1.0)
        h2 = reach.reachable_support(sys, 2, [1.0, 0.0])
        self.assertGreater(h2, 1.0)
        self.assertAlmostEqual(float(reach.reachable_boundary(sys, 2, 360)[:, 0].max()), h2, places=6)

    def test_membership(self):
        sys = reach.example_system()
        self.assertTrue(reach.reach_membership_exact(sys, [1.0, 0.4], 1))
        self.assertFalse(reach.reach_membership_exact(sys, [3.0, 3.0], 1))
        self.assertTrue(reach.reach_membership_exact(sys, [1.5, 0.5], 2))

    def test_scale_cap(self):
        with self.assertRaises(reach.ScaleCapError):
            reach.reach_membership_exact(reach.example_system(), [0.0, 0.0], 31)

    def test_samples_shape(self):
        X = reach.sample_reachable(reach.example_system(), 4, 50, make_rng(1))
        self.assertEqual(X.shape, (50, 2))


class SystemValidationTests(SimpleTestCase):
    def test_point_control_shifts_the_ellipsoid(self):
        W1 = np.array([[2.0, 0.0], [0.0, 0.5]])
        sys = reach.LinearSystem(W1, np.eye(2), _point_control([1.0, 1.0]))
        self.assertTrue(sys.degenerate)
        E = reach.propagate(sys, Ellipsoid.ball([0.0, 0.0], 1.0))
        assert_allclose(E.center, [1.0, 1.0], atol=1e-10)
        self.assertAlmostEqual(E.volume, 1.0)
        with self.assertRaises(reach.ReachabilityError):
            reach.first_step(sys)

    def test_flat_control_image_has_no_first_step(self):
        sys = reach.LinearSystem(np.eye(2), np.array([[1.0, 0.0], [0.0, 0.0]]), reach.example_system().U)
        with self.assertRaises(reach.ReachabilityError):
            reach.first_step(sys)

    def test_point_control_with_singular_dynamics(self):
        sys = reach.LinearSystem(np.zeros((2, 2)), np.eye(2), _point_control([0.0, 0.0]))
        with self.assertRaises(reach.ReachabilityError):
            reach.propagate(sys, Ellipsoid.ball([0.0, 0.0], 1.0))

    def test_dimension_checks(self):
        with self.assertRaises(reach.ReachabilityError):
            reach.LinearSystem(np.eye(2), np.ones((2, 3)), box(np.zeros(2), np.ones(2)))
        with self.assertRaises(reach.ReachabilityError):
            reach.LinearSystem(np.eye(2), np.eye(2), Polytope([[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]))
