import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from elipsoides import dro
from elipsoides.geometry import Ellipsoid
from elipsoides.instances import unit_box
from elipsoides.parallel import STREAM_SEEDS, make_rng


class ExampleTests(SimpleTestCase):
    def _z(self, inst, mode="pwl"):
        parts, ells = dro.single_cell(inst)
        if mode == "pwl":
            return dro.solve_pld(inst, parts, ells).objective
        return dro.solve_ablation(inst, parts, ells, mode).objective

    def test_example2_value_is_r(self):
        for r in (1.0, 2.0, 5.0):
            self.assertAlmostEqual(self._z(dro.example2_instance(2, r)), dro.z_example2(r), delta=1e-5)

    def test_example2_in_higher_dimension(self):
        self.assertAlmostEqual(self._z(dro.example2_instance(3, 1.5)), 1.5, delta=1e-5)

    def test_example3_branches(self):
        for s, expected in ((0.0, 1.125), (3.0, 1.75), (6.0, 2.0)):
            self.assertAlmostEqual(dro.z_example3(s), expected)
            self.assertAlmostEqual(self._z(dro.example3_instance(3, s)), expected, delta=1e-4)

    def test_multipliers_are_reported_per_cell_and_row(self):
        inst = dro.example3_instance(3, 3.0)
        policy = dro.solve_pld(inst, *dro.single_cell(inst))
        lam = policy.multipliers["lam"]
        self.assertEqual((len(lam), len(lam[0])), (1, inst.L))
        self.assertTrue(all(isinstance(v, float) and v >= -1e-9 for v in lam[0]))

    def test_doubled_radii_match_the_inflated_ball(self):
        self.assertAlmostEqual(self._z(dro.example3_instance(3, 0.0), "pwl2"), dro.z_example3(3.0), delta=1e-4)

    def test_invalid_parameters(self):
        with self.assertRaises(dro.DroError):
            dro.example2_instance(2, 0.5)
        with self.assertRaises(dro.DroError):
            dro.example3_instance(3, -1.0)


class InstanceValidationTests(SimpleTestCase):
    def _row(self, K=2):
        return dro.RecourseRow(W=np.zeros((1, K)), w=[1.0], T0=np.zeros(K), Tx=np.zeros((K, 1)))

    def test_moment_matrix_must_dominate_the_mean(self):
        with self.assertRaises(dro.DroError):
            dro.DroInstance(
                c=[1.0], D=np.zeros((1, 2)), d=[1.0], rows=[self._row()],
                support=unit_box(2), mu=[0.5, 0.5], Sigma=np.zeros((2, 2)),
            )

    def test_needs_recourse_rows(self):
        with self.assertRaises(dro.DroError):
            dro.DroInstance(
                c=[1.0], D=np.zeros((1, 2)), d=[1.0], rows=[],
                support=unit_box(2), mu=[0.5, 0.5], Sigma=np.eye(2),
            )

    def test_row_dimensions(self):
        bad = dro.RecourseRow(W=np.zeros((2, 2)), w=[1.0, 0.0], T0=np.zeros(2), Tx=np.zeros((2, 1)))
        with self.assertRaises(dro.DroError):
            dro.DroInstance(
                c=[1.0], D=np.zeros((1, 2)), d=[1.0], rows=[bad],
                support=unit_box(2), mu=[0.5, 0.5], Sigma=np.eye(2),
            )

    def test_unknown_mode(self):
        inst = dro.example2_instance()
        parts, ells = dro.single_cell(inst)
        with self.assertRaises(dro.DroError):
            dro.solve_pld(inst, parts, ells, mode="affine")
        with self.assertRaises(dro.DroError):
            dro.solve_ablation(inst, parts, ells, "affine")

    def test_ellipsoid_must_cover_its_cell(self):
        inst = dro.example2_instance()
        parts, _ = dro.single_cell(inst)
        with self.assertRaises(dro.DroError):
            dro.solve_pld(inst, parts, [Ellipsoid.ball([0.0, 0.0], 0.1)])


class InventoryTests(SimpleTestCase):
    def test_instance_shape(self):
        inst = dro.generate_inventory_instance(3, seed=1)
        self.assertEqual((inst.K, inst.N1, inst.N2, inst.L), (6, 4, 7, 14))
        assert_allclose(inst.mu[3:], 10.0)
        self.assertTrue(np.all((inst.mu[:3] >= 0.0) & (inst.mu[:3] <= 2.0)))
        assert_allclose(inst.d, np.eye(7)[0] / dro.INVENTORY_EPS)

    def test_instance_is_reproducible(self):
        a = dro.generate_inventory_instance(2, seed=5)
        b = dro.generate_inventory_instance(2, seed=5)
        assert_allclose(a.Sigma, b.Sigma)
        self.assertEqual(a.to_dict(), b.to_dict())

    def test_partition_policy_is_feasible_and_nested(self):
        inst = dro.generate_inventory_instance(2, seed=3)
        seeds = dro.sample_seeds(inst.support, 2, make_rng(3, STREAM_SEEDS))
        parts, ells = dro.build_partitions(inst.support, seeds)
        pwl = dro.solve_pld(inst, parts, ells)
        pws = dro.solve_ablation(inst, parts, ells, "pws")
        self.assertEqual(pwl.J, 2)
        self.assertGreaterEqual(pws.objective, pwl.objective - 1e-7)
        for Y, _ in pws.pieces:
            assert_allclose(Y, 0.0)
        self.assertLessEqual(dro.check_policy(inst, pwl, samples=300, rng=make_rng(3)), dro.CHECK_TOL)
        self.assertTrue(np.all(pwl.x[1:] >= -1e-7))
        self.assertLessEqual(pwl.x[1:].sum(), dro.INVENTORY_BUDGET + 1e-6)

        xi = inst.support.sample(1, make_rng(8))[0]
        self.assertEqual(pwl.rule(xi).shape, (inst.N2,))
        self.assertEqual(pwl.to_dict()["mode"], "pwl")

    def test_study_row(self):
        out = dro.inventory_study(2, 2, seed=4)
        for key in ("pwl", "pws", "ldr", "pwl2", "gap_pws", "gap_ldr", "gap_pwl2"):
            self.assertIn(key, out)
        self.assertGreaterEqual(out["gap_pws"], -1e-6)

    def test_relative_gap(self):
        self.assertAlmostEqual(dro.relative_gap(3.0, 2.0), 0.5)
