# cli/management/commands/cantordim.py
import json
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from cli import serializers
from cli.runners import EXIT_INVALID, EXIT_OK, parse_point, run_batch
from cli.schemas import load_instances
from core.exceptions import InstanceError

ACTIONS = {
    "dim": "Closed-form dimension, optimal matrix and recursion table",
    "verify": "Cross-check the closed form against both solvers and sampled members of pi(alpha)",
    "sample": "Sample digits from the optimal cylinder measure and trace the pointwise dimension",
    "expand": "Cantor series digits, frequency counts and cylinder of a point x",
}


class Command(BaseCommand):
    help = "Hausdorff dimension of digit-frequency sets of Cantor series expansions"
    requires_system_checks = []

    def add_arguments(self, parser):
        actions = parser.add_subparsers(dest="action", required=True)
        for name, text in ACTIONS.items():
            sub = actions.add_parser(name, help=text)
            sub.add_argument("--instance", required=True, help="JSON instance file (a list runs a batch)")
            sub.add_argument("--out", help="Write the result here instead of stdout")
            if name in ("sample", "expand"):
                sub.add_argument("--n", type=int, help="Depth")
            if name in ("verify", "sample"):
                sub.add_argument("--seed", type=int, help="Overrides the instance seed")
            if name == "expand":
                sub.add_argument("--x", required=True, help='Point in [0, 1), e.g. "5/6" or 0.25')
            if name in ("dim", "verify"):
                sub.add_argument("--workers", type=int, default=1, help="Processes for batch files")

    def handle(self, *args, **options):
        action = options["action"]
        try:
            instances = load_instances(options["instance"])
        except InstanceError as e:
            raise CommandError(str(e), returncode=EXIT_INVALID)

        if action in ("sample", "expand") and len(instances) > 1:
            raise CommandError(f"'{action}' takes a single instance, got {len(instances)}", returncode=EXIT_INVALID)
        if options.get("n") is not None and options["n"] < 0:
            raise CommandError("--n must be nonnegative", returncode=EXIT_INVALID)

        kwargs = {}
        if options.get("n") is not None:
            kwargs["n"] = options["n"]
        if options.get("seed") is not None:
            kwargs["seed"] = options["seed"]
        if action == "expand":
            try:
                kwargs["x"] = parse_point(options["x"])
            except ValueError:
                raise CommandError(f"--x {options['x']!r} is not a number", returncode=EXIT_INVALID)

        outcomes = run_batch(action, instances, workers=options.get("workers", 1), **kwargs)
        payload = outcomes[0].payload if len(outcomes) == 1 else [o.payload for o in outcomes]
        text = json.dumps(payload, indent=2)

        out = options.get("out")
        trace = outcomes[0].trace
        if trace is not None:
            # the trace is the result of `sample`; the summary goes next to it
            if out:
                with open(out, "w", encoding="utf-8", newline="") as handle:
                    serializers.write_trace(trace, handle)
                self.stdout.write(text)
            else:
                serializers.write_trace(trace, self.stdout)
                self.stderr.write(text)
        elif out:
            Path(out).write_text(text + "\n", encoding="utf-8")
        else:
            self.stdout.write(text)

        code = max(o.code for o in outcomes)
        if code != EXIT_OK:
            errors = [o.payload.get("error", "certification failed") for o in outcomes if o.code]
            raise CommandError("; ".join(errors), returncode=code)
