import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from elipsoides.geometry import GeometryError, is_bounded
from elipsoides.instances import (
    ball_set,
    box,
    chipped_cop_radius_bound,
    chipped_hypercube,
    chipped_smvie_radius,
    random_polytope,
    random_simplex,
)
from elipsoides.mve_copositive import solve_quadset_mve
from elipsoides.parallel import make_rng


class RandomPolytopeTests(SimpleTestCase):
    def test_box_plus_cuts(self):
        P = random_polytope(3, 4, make_rng(1))
        self.assertEqual(P.S.shape, (10, 3))
        self.assertTrue(is_bounded(P))
        self.assertTrue(np.all(P.vertices >= -1e-9) and np.all(P.vertices <= 1 + 1e-9))

    def test_same_seed_same_polytope(self):
        a = random_polytope(2, 3, make_rng(42))
        b = random_polytope(2, 3, make_rng(42))
        assert_allclose(a.S, b.S)
        assert_allclose(a.t, b.t)

    def test_random_simplex_has_k_plus_one_vertices(self):
        self.assertEqual(random_simplex(3, make_rng(2)).vertices.shape, (4, 3))


class ChippedTests(SimpleTestCase):
    def test_chamfer_cuts_the_far_corner(self):
        P = chipped_hypercube(3)
        self.assertFalse(P.contains(np.ones(3)))
        self.assertTrue(P.contains(np.full(3, 0.5)))

    def test_smvie_grows_faster_than_the_bound(self):
        ratios = [chipped_smvie_radius(K) / chipped_cop_radius_bound(K) for K in (3, 5, 8)]
        self.assertTrue(all(b > a for a, b in zip(ratios, ratios[1:])))

    def test_smvie_radius_closed_form_k2(self):
        self.assertAlmostEqual(chipped_smvie_radius(2), (4.0 / 3.0 ** 1.5) ** 0.5)


class QuadraticSetTests(SimpleTestCase):
    def test_mve_of_a_ball_is_the_ball(self):
        E, _ = solve_quadset_mve(ball_set([1.0, 2.0], 0.5))
        assert_allclose(E.center, [1.0, 2.0], atol=1e-4)
        self.assertAlmostEqual(E.radius, 0.5, delta=1e-4)

    def test_invalid_box(self):
        with self.assertRaises(GeometryError):
            box([0.0, 1.0], [1.0, 1.0])
