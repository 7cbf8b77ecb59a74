import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from elipsoides.experiments import StudyResult
from elipsoides.instances import square_ball_set
from elipsoides.management.commands._base import StudyCommand

SQUARE = {"S": [[1, 0], [0, 1], [-1, 0], [0, -1]], "t": [1, 1, 0, 0]}


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.addCleanup(self._tmp.cleanup)
        override = override_settings(ELIPSOIDES={"OUTPUT_DIR": self._tmp.name})
        override.enable()
        self.addCleanup(override.disable)

    def call(self, *args, **kwargs) -> str:
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO(), **kwargs)
        return out.getvalue()


class MveCommandTests(CommandTestCase):
    def test_prints_json(self):
        path = self.tmp / "quadrado.json"
        path.write_text(json.dumps(SQUARE), encoding="utf-8")
        data = json.loads(self.call("mve", str(path)))
        self.assertAlmostEqual(data["volume"], 0.5, delta=1e-4)

    def test_writes_file_for_a_wrapped_quadset(self):
        src = self.tmp / "q.json"
        src.write_text(json.dumps({"set": square_ball_set().to_dict()}), encoding="utf-8")
        dst = self.tmp / "r.json"
        out = self.call("mve", str(src), "--method", "sproc", "--out", str(dst))
        self.assertIn("sproc", out)
        self.assertEqual(json.loads(dst.read_text(encoding="utf-8"))["method"], "sproc")

    def test_bad_inputs(self):
        with self.assertRaises(CommandError):
            self.call("mve", str(self.tmp / "nao_existe.json"))
        bad = self.tmp / "ruim.json"
        bad.write_text(json.dumps({"S": [[1, 0]]}), encoding="utf-8")
        with self.assertRaises(CommandError):
            self.call("mve", str(bad))
        unbounded = self.tmp / "ilimitado.json"
        unbounded.write_text(json.dumps({"S": [[-1, 0], [0, -1]], "t": [0, 0]}), encoding="utf-8")
        with self.assertRaises(CommandError):
            self.call("mve", str(unbounded))


class StudyCommandTests(CommandTestCase):
    def test_chipped_writes_csv(self):
        out = self.call("chipped", "--k-max", "3")
        self.assertIn("[ok]", out)
        lines = (self.tmp / "chipped.csv").read_text(encoding="utf-8").splitlines()
        self.assertTrue(lines[0].startswith("# gerador:"))
        self.assertEqual(len(lines), 4)

    def test_chipped_bad_range(self):
        with self.assertRaises(CommandError):
            self.call("chipped", "--k-min", "4", "--k-max", "3")

    def test_dro_examples(self):
        self.call("dro", "examples", "--seed", "9")
        rows = (self.tmp / "dro_examples.csv").read_text(encoding="utf-8").splitlines()[2:]
        self.assertTrue(all(r.startswith("9,") for r in rows))

    def test_reach_writes_csv_and_json(self):
        csv_path = self.tmp / "alcance.csv"
        self.call("reach", "--T", "2", "--points", "8", "--samples", "100", "--out", str(csv_path))
        self.assertTrue(csv_path.exists())
        doc = json.loads(csv_path.with_suffix(".json").read_text(encoding="utf-8"))
        self.assertEqual([e["t"] for e in doc["ellipsoids"]], [1, 2])

    def test_random_polytopes_small(self):
        self.call("random_polytopes", "--count", "2", "--method", "cop,smvie", "--relative-to", "cop")
        self.assertTrue((self.tmp / "random_polytopes.csv").exists())


class _FailingStudy(StudyCommand):
    subcommand = "falha"
    csv_name = "falha.csv"

    def run_study(self, cfg, options):
        result = StudyResult(header=["x"], rows=[[1]])
        result.check("sempre falha", False, "proposital")
        return result


class _DomainErrorStudy(StudyCommand):
    subcommand = "erro"

    def run_study(self, cfg, options):
        from elipsoides.dro import example2_instance

        example2_instance(2, 0.1)


class StudyCommandErrorTests(CommandTestCase):
    def test_failed_check_exits_with_error_after_writing(self):
        with self.assertRaises(CommandError):
            self.call(_FailingStudy())
        self.assertTrue((self.tmp / "falha.csv").exists())

    def test_domain_error_becomes_command_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.call(_DomainErrorStudy())
        self.assertIn("erro", str(ctx.exception))
