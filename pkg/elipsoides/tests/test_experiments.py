import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, override_settings

from elipsoides import experiments as ex
from elipsoides.parallel import STREAM_SEEDS, make_rng, parallel_map, rng_label


class ConfigTests(SimpleTestCase):
    @override_settings(ELIPSOIDES={"SEED": 7, "WORKERS": 3})
    def test_settings_then_flags(self):
        cfg = ex.ExperimentConfig.from_options("random", K=3, seed=None, methods="cop, smvie", verbosity=1)
        self.assertEqual(cfg.seed, 7)
        self.assertEqual(cfg.workers, 3)
        self.assertEqual(cfg.K, 3)
        self.assertEqual(cfg.methods, ("cop", "smvie"))
        self.assertEqual(ex.ExperimentConfig.from_options("random", seed=11).seed, 11)

    def test_output_path(self):
        with tempfile.TemporaryDirectory() as tmp:
            with override_settings(ELIPSOIDES={"OUTPUT_DIR": tmp}):
                cfg = ex.ExperimentConfig.from_options("chipped")
                self.assertEqual(cfg.output_path("chipped.csv"), Path(tmp) / "chipped.csv")
            cfg = ex.ExperimentConfig.from_options("chipped", out=f"{tmp}/x.csv")
            self.assertEqual(cfg.output_path("chipped.csv"), Path(tmp) / "x.csv")

    def test_tol_reaches_the_solver(self):
        cfg = ex.ExperimentConfig.from_options("chipped", tol=1e-6)
        self.assertEqual(cfg.solver_settings.feas_tol, 1e-6)
        self.assertEqual(cfg.to_dict()["tol"], 1e-6)


class OutputTests(SimpleTestCase):
    @override_settings(ELIPSOIDES={"CSV_DIGITS": 4})
    def test_fmt(self):
        self.assertEqual(ex.fmt(1.0 / 3.0), "0.3333")
        self.assertEqual(ex.fmt(True), "true")
        self.assertEqual(ex.fmt(np.bool_(False)), "false")
        self.assertEqual(ex.fmt(3), "3")

    def test_csv_has_the_generator_line_and_header(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = ex.write_csv(Path(tmp) / "sub" / "t.csv", ["a", "b"], [[1, 0.5], [2, math.nan]])
            lines = path.read_text(encoding="utf-8").splitlines()
        self.assertEqual(lines[0], f"# gerador: {rng_label()}")
        self.assertEqual(lines[1], "a,b")
        self.assertEqual(lines[2], "1,0.5")
        self.assertEqual(len(lines), 4)

    def test_summarize_ignores_nan(self):
        stats = ex.summarize([1.0, math.nan, 3.0])
        self.assertEqual(stats["mean"], 2.0)
        self.assertTrue(math.isnan(ex.summarize([])["mean"]))


class RandomnessTests(SimpleTestCase):
    def test_streams_are_reproducible_and_distinct(self):
        a = make_rng(5).random(4)
        np.testing.assert_array_equal(a, make_rng(5).random(4))
        self.assertFalse(np.allclose(a, make_rng(5, STREAM_SEEDS).random(4)))

    def test_parallel_map_keeps_order(self):
        self.assertEqual(parallel_map(lambda v: v * v, range(8), workers=4), [v * v for v in range(8)])
        self.assertEqual(parallel_map(lambda v: v + 1, [1], workers=4), [2])


class StudyTests(SimpleTestCase):
    def test_random_polytopes(self):
        cfg = ex.ExperimentConfig("random", seed=3, count=3, K=2, M=2, methods=("cop", "smvie"))
        result = ex.random_polytopes_study(cfg, relative_to="cop")
        self.assertEqual(result.header, ["seed", "instancia", "K", "M", "R_cop", "R_smvie"])
        self.assertEqual(len(result.rows), 3)
        self.assertTrue(result.passed, result.checks)
        again = ex.random_polytopes_study(cfg, relative_to="cop")
        self.assertEqual(result.rows, again.rows)

    def test_random_polytopes_with_every_default_method(self):
        cfg = ex.ExperimentConfig("random", seed=5, count=1, K=2, M=2)
        result = ex.random_polytopes_study(cfg)
        self.assertEqual(result.header[4:], [f"R_{m}" for m in cfg.methods])
        self.assertTrue(all(np.isfinite(v) for v in result.rows[0][4:]), result.rows[0])

    def test_random_polytopes_bad_reference(self):
        with self.assertRaises(ValueError):
            ex.random_polytopes_study(ex.ExperimentConfig("random", count=1), relative_to="ktt")

    def test_chipped(self):
        result = ex.chipped_study([2, 3], ex.ExperimentConfig("chipped"))
        self.assertEqual(len(result.rows), 2)
        self.assertTrue(result.passed, [c for c in result.checks if not c[1]])

    def test_dro_examples(self):
        result = ex.dro_examples_study(ex.ExperimentConfig("dro"), r_values=(1.0,), s_values=(0.0, 6.0))
        self.assertEqual(len(result.rows), 3)
        self.assertTrue(result.passed, result.checks)

    def test_reach(self):
        result = ex.reach_study(ex.ExperimentConfig("reach", T=2), samples=200, boundary_points=16)
        self.assertEqual(len(result.rows), 2 * 2 * 16)
        self.assertEqual(len(result.documents["ellipsoids"]), 2)
        self.assertTrue(result.passed, result.checks)

    def test_failed_check_is_recorded(self):
        result = ex.StudyResult(header=["x"])
        result.check("ok", True)
        self.assertTrue(result.passed)
        result.check("falha", False, "detalhe")
        self.assertFalse(result.passed)
