import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from elipsoides.experiments import StudyResult
from elipsoides.parallel import make_rng
from elipsoides.selftest import GOLDEN_PATH, barrier_gradient_errors, compare_golden, load_golden


class GoldenTests(SimpleTestCase):
    def setUp(self):
        self.golden = load_golden()
        self.exact = {name: float(entry["value"]) for name, entry in self.golden["values"].items()}

    def test_golden_file_is_packaged(self):
        self.assertTrue(GOLDEN_PATH.exists())
        self.assertIn("reach_t1_radius", self.golden["values"])

    def test_matching_values_pass(self):
        result = StudyResult(header=["valor", "medido", "esperado", "erro"])
        compare_golden(self.exact, self.golden, result)
        self.assertTrue(result.passed)
        self.assertEqual(len(result.rows), len(self.exact))

    def test_entry_tolerance_is_used(self):
        values = dict(self.exact, simplex_cop_volume=self.exact["simplex_cop_volume"] + 5e-4)
        result = StudyResult(header=[])
        compare_golden(values, self.golden, result)
        self.assertTrue(result.passed)

    def test_corrupted_value_fails(self):
        values = dict(self.exact, example2_r2=2.1)
        result = StudyResult(header=[])
        compare_golden(values, self.golden, result)
        failed = [name for name, ok, _ in result.checks if not ok]
        self.assertEqual(failed, ["golden example2_r2"])

    def test_missing_value_fails(self):
        values = dict(self.exact)
        values.pop("reach_t1_radius")
        result = StudyResult(header=[])
        compare_golden(values, self.golden, result)
        self.assertFalse(result.passed)

    def test_alternative_golden_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "g.json"
            path.write_text(json.dumps({"values": {"x": {"value": 1.0}}}), encoding="utf-8")
            golden = load_golden(path)
        result = StudyResult(header=[])
        compare_golden({"x": 1.0 + 1e-6}, golden, result)
        self.assertTrue(result.passed)


class SolverHealthTests(SimpleTestCase):
    def test_barrier_gradient_on_random_matrices(self):
        errors = barrier_gradient_errors(3, make_rng(12))
        self.assertEqual(len(errors), 3)
        self.assertLessEqual(max(errors), 1e-5)
