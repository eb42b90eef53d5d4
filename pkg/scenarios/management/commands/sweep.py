from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from scenarios.export import ExportError
from scenarios.management.commands.simulate import add_override_arguments, overrides_from_options
from scenarios.sweeps import SWEEP_SUMMARY_FILE, SWEEPS, run_sweep


class Command(BaseCommand):
    help = "Runs a parameter grid, one scenario per point, and collects sweep_summary.csv"

    def add_arguments(self, parser):
        parser.add_argument("sweep", choices=sorted(SWEEPS))
        add_override_arguments(parser)
        parser.add_argument("--out", help="Sweep directory")
        parser.add_argument("--overwrite", action="store_true")

    def handle(self, *args, **options):
        out = options["out"] or str(Path(settings.SIMULATION_RESULTS_ROOT, f"sweep-{options['sweep']}"))
        try:
            frame = run_sweep(
                options["sweep"],
                options["scenario"],
                out,
                overrides_from_options(options),
                options["overwrite"],
            )
        except (ExportError, ValueError, LookupError) as error:
            raise CommandError(str(error))
        self.stdout.write(
            self.style.SUCCESS(f"{len(frame)} points; summary in {Path(out, SWEEP_SUMMARY_FILE)}")
        )
