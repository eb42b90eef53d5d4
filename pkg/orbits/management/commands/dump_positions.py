import numpy as np
import pandas
from django.core.management.base import BaseCommand, CommandError

from orbits.constants import EARTH_ROTATION_RATE, SYSTEM_TAGS
from orbits.walker import build_walker_delta, positions_frame, randomize_epoch
from scenarios.loader import load_scenario


class Command(BaseCommand):
    help = "Writes propagated satellite positions as CSV: time_s,sat_id,system,x_m,y_m,z_m"

    def add_arguments(self, parser):
        parser.add_argument("--scenario", help="Scenario file or preset name")
        parser.add_argument("--system", choices=SYSTEM_TAGS, help="Only this constellation")
        parser.add_argument("--duration-s", type=float, default=0.0)
        parser.add_argument("--every-s", type=float, default=1.0, help="Time between dumped snapshots")
        parser.add_argument("--out", help="CSV file; standard output when omitted")

    def handle(self, *args, **options):
        try:
            scenario = load_scenario(options["scenario"])
        except ValueError as error:
            raise CommandError(str(error))
        if not options["every_s"] > 0 or options["duration_s"] < 0:
            raise CommandError("--every-s must be positive and --duration-s non-negative")

        dt = scenario.slot_duration
        step = max(int(round(options["every_s"] / dt)), 1)
        slots = np.arange(0, int(round(options["duration_s"] / dt)) + 1, step)
        rotation = EARTH_ROTATION_RATE if scenario.earth_rotation else 0.0
        seeds = np.random.SeedSequence(scenario.seed).spawn(2)

        frames = []
        for spec, seed in zip((scenario.primary, scenario.secondary), seeds):
            if options["system"] and spec.tag != options["system"]:
                continue
            shells = spec.shells
            if scenario.randomize_epoch:
                shells = randomize_epoch(shells, np.random.default_rng(seed))
            constellation = build_walker_delta(shells, spec.tag)
            frames.append(positions_frame(constellation, slots, dt, rotation))

        frame = pandas.concat(frames, ignore_index=True)
        if not options["out"]:
            self.stdout.write(frame.to_csv(index=False), ending="")
            return
        try:
            frame.to_csv(options["out"], index=False)
        except OSError as error:
            raise CommandError(f"{options['out']}: {error}")
        self.stdout.write(self.style.SUCCESS(f"Wrote {len(frame)} positions to {options['out']}"))
