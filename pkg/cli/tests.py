import csv
import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from closed_form.formulas import dim_closed_form
from core.exceptions import InstanceError
from core.types import validate_stochastic

from .schemas import parse_instances
from .serializers import report_from_dict, report_to_dict

SHARED = {"d": {"2": 0.5, "3": 0.5}, "alpha": [0.5, 0.3333333333, 0.1666666667]}
SHARED_PATTERN = {"pattern": [2, 3], "alpha": ["1/2", "1/3", "1/6"], "seed": 11}


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write_instance(self, data, name="instance.json"):
        path = Path(self.tmp.name) / name
        path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
        return str(path)

    def run_command(self, *args):
        out, err = StringIO(), StringIO()
        call_command("cantordim", *args, stdout=out, stderr=err)
        return out.getvalue(), err.getvalue()

    def assertExitCode(self, code, *args):
        out, err = StringIO(), StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command("cantordim", *args, stdout=out, stderr=err)
        self.assertEqual(ctx.exception.returncode, code)
        return out.getvalue()


class DimCommandTests(CommandTestCase):

    def test_shared_instance(self):
        out, _ = self.run_command("dim", "--instance", self.write_instance(SHARED))
        result = json.loads(out)
        self.assertAlmostEqual(result["dimension"], 0.98127, delta=5e-5)
        self.assertEqual(result["recursion"]["L"], 3)
        self.assertEqual(len(result["optimal_matrix"]["3"]), 3)

    def test_constant_base_pattern(self):
        out, _ = self.run_command("dim", "--instance", self.write_instance({"pattern": [2], "alpha": [0.5, 0.5]}))
        result = json.loads(out)
        self.assertAlmostEqual(result["dimension"], 1.0, places=12)
        self.assertTrue(result["is_full_dimension"])

    def test_infeasible_prints_report(self):
        path = self.write_instance({"pattern": [2, 2, 3], "alpha": [0.3, 0.3, 0.4]})
        out = self.assertExitCode(2, "dim", "--instance", path)
        result = json.loads(out)
        self.assertFalse(result["feasibility"]["feasible"])
        self.assertEqual(result["feasibility"]["violated_level"], 3)

    def test_bad_json_reports_line(self):
        path = self.write_instance('{\n  "alpha": [0.5, 0.5],\n  "pattern": [2,\n}')
        with self.assertRaises(CommandError) as ctx:
            self.run_command("dim", "--instance", path)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn("line 4", str(ctx.exception))

    def test_invalid_instance_reports_field(self):
        path = self.write_instance({"d": {"2": 1}, "pattern": [2], "alpha": [1]})
        self.assertExitCode(1, "dim", "--instance", path)
        path = self.write_instance({"pattern": [2], "alpha": [0.5, "half"]})
        with self.assertRaises(CommandError) as ctx:
            self.run_command("dim", "--instance", path)
        self.assertIn("alpha", str(ctx.exception))

    def test_alpha_not_summing_to_one(self):
        self.assertExitCode(1, "dim", "--instance", self.write_instance({"pattern": [2], "alpha": [0.5, 0.4]}))

    def test_batch_keeps_order_and_worst_code(self):
        path = self.write_instance([SHARED, {"pattern": [2, 2, 3], "alpha": [0.3, 0.3, 0.4]}])
        out = self.assertExitCode(2, "dim", "--instance", path)
        results = json.loads(out)
        self.assertEqual(len(results), 2)
        self.assertTrue(results[0]["success"])
        self.assertFalse(results[1]["success"])

    def test_out_file(self):
        target = Path(self.tmp.name) / "report.json"
        out, _ = self.run_command("dim", "--instance", self.write_instance(SHARED), "--out", str(target))
        self.assertEqual(out, "")
        self.assertIn("dimension", json.loads(target.read_text(encoding="utf-8")))


class VerifyCommandTests(CommandTestCase):

    def test_shared_instance(self):
        out, _ = self.run_command("verify", "--instance", self.write_instance({**SHARED_PATTERN, "samples": 200}))
        result = json.loads(out)
        self.assertTrue(result["passed"])
        self.assertEqual({m["method"] for m in result["methods"]}, {"ipf", "mirror_descent"})
        for method in result["methods"]:
            self.assertLessEqual(abs(method["gap"]), 1e-6)

    def test_constant_base(self):
        out, _ = self.run_command("verify", "--instance", self.write_instance({"pattern": [2], "alpha": [0.5, 0.5]}))
        self.assertEqual(json.loads(out)["moves"], 0)

    def test_not_converged(self):
        data = {**SHARED_PATTERN, "solver": {"max_iter": 1}}
        out = self.assertExitCode(3, "verify", "--instance", self.write_instance(data))
        result = json.loads(out)
        self.assertIn("residuals", result)
        self.assertEqual(result["iterations"], 1)


class SampleCommandTests(CommandTestCase):

    def test_trace_file(self):
        target = Path(self.tmp.name) / "trace.csv"
        path = self.write_instance(SHARED_PATTERN)
        out, _ = self.run_command("sample", "--instance", path, "--n", "100000", "--out", str(target))
        summary = json.loads(out)
        self.assertEqual(summary["rng"], "PCG64")
        self.assertEqual(summary["seed"], 11)
        with target.open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ["depth", "log_mu", "log_len", "ratio"])
        self.assertEqual(int(rows[-1][0]), 100000)
        self.assertLessEqual(abs(float(rows[-1][3]) - summary["closed_form"]), 0.01)
        self.assertEqual(set(summary["digit_frequencies"]), {"0", "1", "2"})

    def test_uniform_binary_ratio_is_one(self):
        out, _ = self.run_command("sample", "--instance", self.write_instance({"pattern": [2], "alpha": [0.5, 0.5]}), "--n", "500")
        rows = list(csv.reader(StringIO(out)))[1:]
        self.assertTrue(rows)
        for row in rows:
            self.assertAlmostEqual(float(row[3]), 1.0, places=12)

    def test_zero_depth(self):
        out, _ = self.run_command("sample", "--instance", self.write_instance(SHARED_PATTERN), "--n", "0")
        self.assertEqual(out.strip().splitlines(), ["depth,log_mu,log_len,ratio"])

    def test_needs_pattern(self):
        self.assertExitCode(1, "sample", "--instance", self.write_instance(SHARED))


class ExpandCommandTests(CommandTestCase):

    def test_five_sixths(self):
        out, _ = self.run_command("expand", "--instance", self.write_instance(SHARED_PATTERN), "--x", "5/6", "--n", "4")
        result = json.loads(out)
        self.assertEqual(result["digits"], [1, 2, 0, 0])
        self.assertEqual(result["cylinder"]["left_exact"], "5/6")
        self.assertEqual(result["cylinder"]["length_exact"], "1/36")

    def test_zero(self):
        out, _ = self.run_command("expand", "--instance", self.write_instance(SHARED_PATTERN), "--x", "0", "--n", "6")
        self.assertEqual(json.loads(out)["digits"], [0] * 6)

    def test_one_is_out_of_range(self):
        self.assertExitCode(1, "expand", "--instance", self.write_instance(SHARED_PATTERN), "--x", "1")

    def test_pattern_derived_from_d(self):
        out, _ = self.run_command("expand", "--instance", self.write_instance(SHARED), "--x", "0.5", "--n", "2")
        self.assertEqual(json.loads(out)["bases"], [2, 3])


class SchemaTests(SimpleTestCase):

    def test_fraction_strings_are_exact(self):
        instance = parse_instances(json.dumps(SHARED_PATTERN))[0]
        problem = instance.to_problem()
        self.assertTrue(problem.alpha.is_exact)
        self.assertTrue(problem.d.is_exact)

    def test_sparse_alpha_map(self):
        instance = parse_instances('{"alpha": {"1": 0.5, "2": 0.5}, "d": {"3": 1}}')[0]
        self.assertEqual(instance.to_problem().alpha.support, (1, 2))

    def test_unknown_field(self):
        with self.assertRaises(InstanceError) as ctx:
            parse_instances('{"alpha": [1], "pattern": [2], "colour": "red"}')
        self.assertEqual(ctx.exception.field, "colour")


class SerializerTests(SimpleTestCase):

    def test_report_round_trip(self):
        d = validate_stochastic({2: 0.5, 3: 0.5})
        alpha = validate_stochastic({0: 0.5, 1: 0.3, 2: 0.2})
        report = dim_closed_form(alpha, d)
        data = json.loads(json.dumps(report_to_dict(report)))
        parsed = report_from_dict(data)
        self.assertEqual(report_to_dict(parsed), data)
        self.assertAlmostEqual(parsed.dimension, report.dimension, delta=1e-14)
        self.assertEqual(parsed.recursion.j0, report.recursion.j0)
        for n in report.optimal_matrix.bases:
            for a, b in zip(parsed.optimal_matrix.row(n), report.optimal_matrix.row(n)):
                self.assertAlmostEqual(a, b, delta=1e-14)
