"""The slot loop of one run.

Time advances one secondary handover period at a time. At each handover the
secondary association is decided (solved under protection or by the plain
policy), then every slot of the period is evaluated for both systems and the
realised primary INR feeds the interference history the next decision sees.
"""
import logging
import math
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
import pandas

from association.beams import BeamSchedule
from association.grid import UserSet, build_grid
from association.matrix import AssociationMatrix
from association.policies import MAX_CONTACT_TIME, baseline_secondary_assign
from association.sources import (
    UNSERVED,
    PolicyAssociationSource,
    PrimaryAssociationSource,
    TraceAssociationSource,
    association_frame,
)
from linkbudget.engine import LinkEngine, LinkState, SystemModel
from linkbudget.params import SystemLink, linear_to_db
from metrics.distributions import association_lifetimes
from metrics.report import MetricsCollector, MetricsReport
from orbits.constants import EARTH_ROTATION_RATE, PRIMARY, SECONDARY
from orbits.snapshots import SnapshotCache
from orbits.walker import build_walker_delta, randomize_epoch
from protection.constraints import effective_avg_threshold
from protection.history import InterferenceHistory
from protection.verification import WindowReport, verify_window
from scenarios.schema import PROTECTED, Scenario, SystemSpec
from solver.coefficients import build_coefficients
from solver.handover import solve_handover
from solver.lagrangian import Thresholds

logger = logging.getLogger(__name__)

LINK_TRACE_COLUMNS = ["time_s", "user_id", "system", "snr_db", "inr_db", "sinr_db"]


class SimulationResult(NamedTuple):
    scenario: Scenario
    layout: Dict[str, int]
    report: MetricsReport
    window: WindowReport
    handovers: List[Dict]
    associations: pandas.DataFrame
    lifetimes: pandas.DataFrame
    link_trace: Optional[pandas.DataFrame]

    def summary(self) -> Dict:
        """Headline numbers of the run with the scenario echoed."""
        summary = self.report.summary()
        summary.update(
            {
                "name": self.scenario.name,
                "seed": self.scenario.seed,
                "mode": self.scenario.mode,
                "duration_s": self.scenario.duration,
                "layout": dict(self.layout),
                "window_avg_violations": self.window.avg_flags,
                "window_abs_violations": self.window.abs_flags,
                "zero_filled_handovers": len(self.window.zero_filled),
                "infeasible_handovers": sum(1 for h in self.handovers if not h.get("feasible", True)),
                "unconverged_handovers": sum(1 for h in self.handovers if not h.get("converged", True)),
                "scenario": self.scenario.as_dict(),
            }
        )
        return summary


def _serving_row(association: AssociationMatrix) -> np.ndarray:
    return np.array([UNSERVED if s is None else s for s in association.satellites], dtype=int)


def _link_frame(
    slots: np.ndarray, slot_duration: float, system_tag: str, users: UserSet, state: LinkState
) -> pandas.DataFrame:
    count = len(users)
    return pandas.DataFrame(
        {
            "time_s": np.repeat(np.round(slots * slot_duration, 6), count),
            "user_id": np.tile(users.user_ids, len(slots)),
            "system": system_tag,
            "snr_db": linear_to_db(state.snr).ravel(),
            "inr_db": linear_to_db(state.inr).ravel(),
            "sinr_db": linear_to_db(state.sinr).ravel(),
        },
        columns=LINK_TRACE_COLUMNS,
    )


class CoexistenceSimulation:
    """Both constellations, the region and the users of one scenario.

    Randomness (epoch offsets and extra users) comes from independent streams
    spawned from the scenario seed, so changing one draw leaves the others
    alone.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        primary_epoch, secondary_epoch, primary_draw, secondary_draw = (
            np.random.default_rng(seed) for seed in np.random.SeedSequence(scenario.seed).spawn(4)
        )
        self.grid = build_grid(scenario.region)
        primary = self._system(scenario.primary, primary_epoch)
        secondary = self._system(scenario.secondary, secondary_epoch)
        self.engine = LinkEngine(
            self.grid,
            scenario.link,
            primary,
            secondary,
            self._primary_source(primary),
            scenario.chunk_slots,
        )
        self.primary_users = self._users(primary_draw)
        self.secondary_users = self._users(secondary_draw)
        self.protected = self.primary_users.subset(self.primary_users.representative)

    def __repr__(self):
        return f"<CoexistenceSimulation {self.scenario.name!r} {self.scenario.mode}>"

    def _system(self, spec: SystemSpec, rng: np.random.Generator) -> SystemModel:
        scenario = self.scenario
        shells = randomize_epoch(spec.shells, rng) if scenario.randomize_epoch else list(spec.shells)
        constellation = build_walker_delta(shells, spec.tag)
        snapshots = SnapshotCache(
            constellation,
            self.grid.cells,
            scenario.link.eps_min_for(spec.tag),
            scenario.slot_duration,
            EARTH_ROTATION_RATE if scenario.earth_rotation else 0.0,
        )
        return SystemModel(
            SystemLink(spec.tag, constellation.top_altitude, scenario.tx_pattern, scenario.rx_pattern),
            snapshots,
            BeamSchedule(scenario.n_beams, self.grid.cells_per_cluster),
        )

    def _primary_source(self, primary: SystemModel) -> PrimaryAssociationSource:
        spec = self.scenario.primary
        if spec.association_trace:
            return TraceAssociationSource(
                spec.association_trace, self.grid, PRIMARY, self.scenario.slot_duration
            )
        return PolicyAssociationSource(primary.snapshots, self.grid, spec.policy, spec.handover_period)

    def _users(self, rng: np.random.Generator) -> UserSet:
        users = self.grid.representative_users()
        if self.scenario.users_per_cell:
            users = users.merge(self.grid.random_users(self.scenario.users_per_cell, rng))
        return users

    @property
    def layout(self) -> Dict[str, int]:
        return {
            "primary_satellites": len(self.engine.primary.snapshots.constellation),
            "secondary_satellites": len(self.engine.secondary.snapshots.constellation),
            "clusters": len(self.grid),
            "cells_per_cluster": self.grid.cells_per_cluster,
            "primary_users": len(self.primary_users),
            "secondary_users": len(self.secondary_users),
        }

    def decide(
        self,
        slots: np.ndarray,
        history: InterferenceHistory,
        previous: Optional[AssociationMatrix],
        end_slot: int,
    ) -> Tuple[List[AssociationMatrix], Dict]:
        """Secondary association of every slot of the handover period starting at slots[0].

        A protected association holds for the whole period. Baseline follows
        the primary's mechanics: HE re-associates at the period start, MCT
        steps slot by slot and replaces a satellite as soon as it sets.
        """
        scenario = self.scenario
        t = int(slots[0])
        if scenario.mode == PROTECTED:
            cfg = scenario.protection
            coeffs = build_coefficients(
                t,
                self.engine,
                self.protected,
                cfg.handover_period,
                end_slot=end_slot,
                keep_slot_inr=math.isfinite(cfg.max_threshold),
            )
            average = effective_avg_threshold(history, cfg, t)
            solution = solve_handover(
                coeffs,
                Thresholds(average, cfg.max_threshold),
                self.grid.priority_order,
                scenario.solver,
            )
            diagnostics = solution.as_dict()
            diagnostics.update({"effective_avg_threshold": average, "candidates": len(coeffs)})
            return [solution.association] * len(slots), diagnostics

        policy = scenario.secondary.policy
        associations = []
        for slot in slots:
            if slot == t or policy == MAX_CONTACT_TIME:
                previous = baseline_secondary_assign(
                    policy, self.engine.secondary.snapshots, self.grid, previous, int(slot)
                )
            associations.append(previous)
        first = associations[0]
        return associations, {
            "t": t,
            "satellites": [None if s is None else int(s) for s in first.satellites],
            "outage_clusters": first.unserved(),
            "slot_handovers": sum(
                a.satellites != b.satellites for a, b in zip(associations, associations[1:])
            ),
        }

    def evaluate(
        self, slots: np.ndarray, primary_table: np.ndarray, secondary_table: np.ndarray
    ) -> Tuple[LinkState, LinkState]:
        """Link state of every user of both systems over consecutive slots."""
        engine = self.engine
        primary_tx = engine.transmissions(engine.primary, primary_table, slots)
        secondary_tx = engine.transmissions(engine.secondary, secondary_table, slots)
        primary = engine.link_state(
            engine.primary, primary_table, primary_tx, secondary_tx, self.primary_users, slots
        )
        secondary = engine.link_state(
            engine.secondary, secondary_table, secondary_tx, primary_tx, self.secondary_users, slots
        )
        return primary, secondary

    def run(self) -> SimulationResult:
        scenario = self.scenario
        cfg = scenario.protection
        total = scenario.duration_slots
        dt = scenario.slot_duration
        logger.info(f"Running {self!r}: {total} slots, layout {self.layout}")

        history = InterferenceHistory(len(self.protected), cfg.window_length)
        collector = MetricsCollector(cfg.inr_avg_threshold_db, dt, self.primary_users)
        handovers: List[Dict] = []
        handover_slots: List[int] = []
        association_frames, link_frames = [], []
        primary_tables, secondary_tables = [], []
        association = None

        for t in range(0, total, cfg.handover_period):
            slots = np.arange(t, min(t + cfg.handover_period, total))
            block, diagnostics = self.decide(slots, history, association, total)
            association = block[-1]
            diagnostics["time_s"] = round(t * dt, 6)
            handovers.append(diagnostics)
            handover_slots.append(t)

            primary_table = self.engine.primary_table(slots)
            secondary_table = np.vstack([_serving_row(matrix) for matrix in block])
            primary, secondary = self.evaluate(slots, primary_table, secondary_table)

            history.extend(t, primary.inr[:, self.primary_users.representative])
            collector.record_block(slots, primary, secondary, self.secondary_users)
            collector.record_handover(t, block[0])

            primary_tables.append(primary_table)
            secondary_tables.append(secondary_table)
            association_frames.append(
                association_frame(self.engine.primary_source.associations(slots), slots, dt)
            )
            association_frames.append(association_frame(block, slots, dt))
            if scenario.link_trace:
                link_frames.append(_link_frame(slots, dt, PRIMARY, self.primary_users, primary))
                link_frames.append(_link_frame(slots, dt, SECONDARY, self.secondary_users, secondary))

            logger.info(
                f"Handover at {t * dt:g} s: {block[0].served()}/{len(block[0])} clusters served"
            )

        report = collector.finish()
        window = verify_window(report.primary_trace, handover_slots, cfg, collector.primary_ids)
        lifetimes = pandas.concat(
            [
                association_lifetimes(np.vstack(primary_tables), PRIMARY, dt),
                association_lifetimes(np.vstack(secondary_tables), SECONDARY, dt),
            ],
            ignore_index=True,
        )
        return SimulationResult(
            scenario,
            self.layout,
            report,
            window,
            handovers,
            pandas.concat(association_frames, ignore_index=True),
            lifetimes,
            pandas.concat(link_frames, ignore_index=True) if link_frames else None,
        )


def run_simulation(scenario: Scenario) -> SimulationResult:
    """Runs a validated scenario end to end.

    Outages and solver non-convergence are reported in the result, never
    raised.
    """
    return CoexistenceSimulation(scenario).run()
