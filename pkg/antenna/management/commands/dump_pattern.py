from django.core.management.base import BaseCommand, CommandError

from antenna.patterns import sample_pattern
from scenarios.loader import load_scenario


class Command(BaseCommand):
    help = "Writes G(theta) of the scenario's patterns as CSV: theta_deg,tx_gain_dbi,rx_gain_dbi"

    def add_arguments(self, parser):
        parser.add_argument("--scenario", help="Scenario file or preset name")
        parser.add_argument("--max-offset-deg", type=float, default=20.0)
        parser.add_argument("--step-deg", type=float, default=0.05)
        parser.add_argument("--out", help="CSV file; standard output when omitted")

    def handle(self, *args, **options):
        if not 0 < options["step_deg"] <= options["max_offset_deg"] <= 180:
            raise CommandError("Need 0 < --step-deg <= --max-offset-deg <= 180")
        try:
            scenario = load_scenario(options["scenario"])
        except ValueError as error:
            raise CommandError(str(error))
        frame = sample_pattern(
            scenario.tx_pattern, scenario.rx_pattern, options["max_offset_deg"], options["step_deg"]
        )
        if not options["out"]:
            self.stdout.write(frame.to_csv(index=False), ending="")
            return
        try:
            frame.to_csv(options["out"], index=False)
        except OSError as error:
            raise CommandError(f"{options['out']}: {error}")
