import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from elipsoides.geometry import (
    DegeneratePolytopeError,
    DimensionMismatchError,
    Ellipsoid,
    InvalidEllipsoidError,
    PartitionError,
    Polytope,
    QuadSet,
    UnboundedPolytopeError,
    chebyshev_center,
    ellipsoid_contains,
    ellipsoid_volume,
    enumerate_vertices,
    in_convex_hull,
    membership,
    unbounded_space,
    voronoi_partition,
)
from elipsoides.instances import box, random_polytope, simplex, unit_square
from elipsoides.parallel import make_rng


class EllipsoidTests(SimpleTestCase):
    def test_unit_ball_volume_and_radius(self):
        E = Ellipsoid(np.eye(2), np.zeros(2))
        self.assertAlmostEqual(ellipsoid_volume(E), 1.0)
        self.assertAlmostEqual(E.radius, 1.0)

    def test_scaled_ball_volume(self):
        E = Ellipsoid(2.0 * np.eye(2), np.zeros(2))
        self.assertAlmostEqual(E.volume, 0.25)

    def test_contains_boundary_with_tolerance(self):
        E = Ellipsoid.ball([1.0, 0.0], 1.0)
        self.assertTrue(ellipsoid_contains(E, [2.0 + 1e-12, 0.0]))
        self.assertFalse(ellipsoid_contains(E, [2.1, 0.0]))

    def test_rejects_nonsymmetric_and_indefinite(self):
        with self.assertRaises(InvalidEllipsoidError):
            Ellipsoid([[1.0, 0.5], [0.0, 1.0]], [0.0, 0.0])
        with self.assertRaises(InvalidEllipsoidError):
            Ellipsoid([[1.0, 0.0], [0.0, -1.0]], [0.0, 0.0])

    def test_dimension_mismatch(self):
        E = Ellipsoid(np.eye(2), np.zeros(2))
        with self.assertRaises(DimensionMismatchError):
            ellipsoid_contains(E, [0.0, 0.0, 0.0])

    def test_from_center_shape_and_center(self):
        E = Ellipsoid.from_center_shape([1.0, -1.0], np.diag([4.0, 1.0]))
        assert_allclose(E.center, [1.0, -1.0])
        self.assertAlmostEqual(E.volume, 2.0)
        self.assertTrue(E.contains([3.0, -1.0]))

    def test_boundary_points_lie_on_the_surface(self):
        E = Ellipsoid.from_center_shape([0.5, 0.2], [[2.0, 0.3], [0.3, 1.0]])
        assert_allclose(E.level(E.boundary(32)), np.ones(32), atol=1e-10)


class PolytopeTests(SimpleTestCase):
    def test_square_vertices_are_sorted(self):
        V = unit_square().vertices
        assert_allclose(V, [[0, 0], [0, 1], [1, 0], [1, 1]])

    def test_simplex_vertices(self):
        V = enumerate_vertices(simplex(3))
        self.assertEqual(V.shape, (4, 3))

    def test_unbounded_polytope(self):
        with self.assertRaises(UnboundedPolytopeError):
            enumerate_vertices(Polytope([[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]))

    def test_empty_polytope(self):
        with self.assertRaises(DegeneratePolytopeError):
            enumerate_vertices(Polytope([[1.0], [-1.0]], [0.0, -1.0]))

    def test_flat_polytope(self):
        P = Polytope([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], [0.0, 0.0, 1.0, 0.0])
        with self.assertRaises(DegeneratePolytopeError):
            P.vertices

    def test_image_keeps_vertices(self):
        P = unit_square().image(np.diag([2.0, 3.0]), [1.0, 1.0])
        assert_allclose(P.bounding_box()[1], [3.0, 4.0])
        self.assertTrue(P.contains([2.0, 2.5]))

    def test_chebyshev_center_of_box(self):
        c, r = chebyshev_center(box([0.0, 0.0], [2.0, 4.0]))
        assert_allclose(c[0], 1.0, atol=1e-8)
        self.assertAlmostEqual(r, 1.0)

    def test_sample_stays_inside(self):
        P = simplex(2)
        X = P.sample(200, make_rng(7))
        self.assertEqual(X.shape, (200, 2))
        self.assertTrue(P.contains(X))

    def test_in_convex_hull(self):
        V = unit_square().vertices
        self.assertTrue(in_convex_hull(V, [0.3, 0.9]))
        self.assertFalse(in_convex_hull(V, [1.2, 0.5]))


class QuadSetTests(SimpleTestCase):
    def test_membership_checks_every_row(self):
        # bola de centro (0.5, 0.5) e raio 0.5
        X = QuadSet(unit_square(), ((2.0 * np.eye(2), -np.ones(2)),))
        self.assertTrue(membership(X, [0.5, 0.9]))
        self.assertFalse(membership(X, [0.99, 0.99]))
        self.assertFalse(membership(X, [1.5, 0.5]))

    def test_rectangular_rows(self):
        Q = np.array([[1.0, 0.0, 0.0]])
        X = QuadSet(unbounded_space(3), ((Q, np.zeros(1)),), witness=np.zeros(3))
        self.assertTrue(membership(X, [0.5, 100.0, -100.0]))

    def test_bad_witness(self):
        from elipsoides.geometry import GeometryError

        with self.assertRaises(GeometryError):
            QuadSet(unit_square(), (), witness=[2.0, 2.0])

    def test_json_round_trip(self):
        X = QuadSet(unit_square(), ((np.eye(2), -np.array([0.5, 0.5])),))
        Y = QuadSet.from_dict(X.to_dict())
        assert_allclose(Y.base.S, X.base.S)
        assert_allclose(Y.quads[0][1], X.quads[0][1])


class VoronoiTests(SimpleTestCase):
    def test_cells_cover_the_parent(self):
        P = unit_square()
        fam = voronoi_partition(P, [[0.25, 0.25], [0.75, 0.5], [0.2, 0.8]])
        self.assertEqual(fam.J, 3)
        self.assertTrue(fam.covers(P.sample(500, make_rng(3))))
        self.assertEqual(fam.locate([0.25, 0.25]), [0])

    def test_seed_outside(self):
        with self.assertRaises(PartitionError):
            voronoi_partition(unit_square(), [[2.0, 0.0]])

    def test_duplicate_seeds(self):
        with self.assertRaises(PartitionError):
            voronoi_partition(unit_square(), [[0.5, 0.5], [0.5, 0.5]])

    def test_interior_of_a_cell_is_cut_by_every_other_cell(self):
        P = unit_square()
        seeds = np.array([[0.25, 0.25], [0.75, 0.5], [0.2, 0.8]])
        fam = voronoi_partition(P, seeds)
        rng = make_rng(8)
        for j, cell in enumerate(fam.cells):
            X = cell.sample(200, rng)
            d = np.linalg.norm(X[:, None, :] - seeds[None, :, :], axis=2)
            others = np.delete(d, j, axis=1)
            X = X[others.min(axis=1) - d[:, j] > 1e-6]
            self.assertGreater(len(X), 0)
            for i, other in enumerate(fam.cells):
                if i == j:
                    continue
                bisectors = other.S[P.J:], other.t[P.J:]
                violated = np.any(X @ bisectors[0].T > bisectors[1] + 1e-9, axis=1)
                self.assertTrue(np.all(violated), f"célula {j} invade a célula {i}")


class VertexContainmentTests(SimpleTestCase):
    def test_vertices_decide_containment(self):
        rng = make_rng(31)
        for _ in range(8):
            P = random_polytope(2, 3, rng)
            X = P.sample(2000, rng)
            c = P.vertices.mean(axis=0) + rng.uniform(-0.05, 0.05, 2)
            far = np.linalg.norm(P.vertices - c, axis=1).max()
            for scale in (1.001, 0.999):
                E = Ellipsoid.ball(c, scale * far)
                # o máximo do nível sobre P é atingido num vértice
                self.assertLessEqual(E.level(X).max(), E.level(P.vertices).max() + 1e-9)
                if scale > 1.0:
                    self.assertTrue(E.contains(P.vertices))
                    self.assertTrue(E.contains(X))
                else:
                    self.assertFalse(E.contains(P.vertices))
