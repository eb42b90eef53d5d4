from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from scenarios.export import ExportError, export_results
from scenarios.loader import load_scenario
from scenarios.schema import MODES, POLICY_NAMES, default_scenario_text
from scenarios.simulation import run_simulation

# command-line option -> scenario key
OVERRIDE_OPTIONS = {
    "mode": "mode",
    "policy_primary": "primary.policy",
    "policy_secondary": "secondary.policy",
    "beams": "beams",
    "inr_avg_th_db": "protection.inr_avg_th_db",
    "inr_max_th_db": "protection.inr_max_th_db",
    "th_s": "protection.th_s",
    "tw_s": "protection.tw_s",
    "duration_s": "duration_s",
    "seed": "seed",
}


def overrides_from_options(options) -> dict:
    return {
        key: options[option]
        for option, key in OVERRIDE_OPTIONS.items()
        if options.get(option) is not None
    }


def add_override_arguments(parser) -> None:
    parser.add_argument("--scenario", help="Scenario file or preset name")
    parser.add_argument("--mode", choices=MODES)
    parser.add_argument("--policy-primary", choices=POLICY_NAMES)
    parser.add_argument("--policy-secondary", choices=POLICY_NAMES)
    parser.add_argument("--beams", type=int)
    parser.add_argument("--inr-avg-th-db", type=float)
    parser.add_argument("--inr-max-th-db", type=float, help="Accepts inf")
    parser.add_argument("--th-s", type=float, help="Secondary handover period")
    parser.add_argument("--tw-s", type=float, help="Past averaging window")
    parser.add_argument("--duration-s", type=float)
    parser.add_argument("--seed", type=int)


class Command(BaseCommand):
    help = "Runs one coexistence scenario and writes its metrics and traces"

    def add_arguments(self, parser):
        add_override_arguments(parser)
        parser.add_argument("--out", help="Output directory")
        parser.add_argument("--overwrite", action="store_true")
        parser.add_argument(
            "--print-default-scenario",
            action="store_true",
            help="Print every scenario key with its default and exit",
        )

    def handle(self, *args, **options):
        if options["print_default_scenario"]:
            self.stdout.write(default_scenario_text(), ending="")
            return

        try:
            scenario = load_scenario(options["scenario"], overrides_from_options(options))
            result = run_simulation(scenario)
            out = options["out"] or str(
                Path(settings.SIMULATION_RESULTS_ROOT, f"{scenario.name}-{scenario.mode}")
            )
            export_results(result, out, options["overwrite"])
        except (ExportError, ValueError, LookupError) as error:
            raise CommandError(str(error))

        summary = result.summary()
        self.stdout.write(
            self.style.SUCCESS(
                f"{scenario.name}: mean violation rate {summary['mean_violation_rate']:.4f}, "
                f"mean utilization {summary['mean_utilization']:.4f}; results in {out}"
            )
        )
