import numpy as np
from django.test import SimpleTestCase

from association.beams import BeamSchedule, check_beam_count, schedule_beams
from association.grid import (
    CELLS_PER_CLUSTER,
    GridError,
    RegionConfig,
    build_grid,
    hexagon_axial,
    reuse_color,
)
from association.matrix import AssociationError, AssociationMatrix, check_association
from orbits.constants import PRIMARY

NEIGHBOURS = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)]


class HexagonTestCase(SimpleTestCase):
    def test_cluster_size(self):
        axial = hexagon_axial()
        self.assertEqual(len(axial), CELLS_PER_CLUSTER)
        self.assertEqual(CELLS_PER_CLUSTER, 127)
        np.testing.assert_array_equal(axial[0], [0, 0])

    def test_neighbours_never_share_a_colour(self):
        axial = hexagon_axial()
        colours = dict(zip(map(tuple, axial), reuse_color(axial)))
        for (q, r), colour in colours.items():
            for dq, dr in NEIGHBOURS:
                neighbour = colours.get((q + dq, r + dr))
                if neighbour is not None:
                    self.assertNotEqual(colour, neighbour)

    def test_every_colour_is_used(self):
        self.assertEqual(set(reuse_color(hexagon_axial()).tolist()), {1, 2, 3})


class BuildGridTestCase(SimpleTestCase):
    def test_tiled_region(self):
        grid = build_grid(RegionConfig(clusters=3))
        self.assertEqual(len(grid), 3)
        self.assertEqual(grid.cells.shape, (3, 127, 3))
        self.assertEqual(grid.total_cells, 381)
        self.assertEqual(grid.priority_order, [0, 1, 2])

    def test_tiled_clusters_do_not_overlap(self):
        grid = build_grid(RegionConfig(clusters=4))
        points = grid.cells.reshape(-1, 3)
        gaps = np.linalg.norm(points[:, None] - points[None], axis=-1)
        np.fill_diagonal(gaps, np.inf)
        self.assertGreater(gaps.min(), 15e3)

    def test_cell_spacing(self):
        grid = build_grid(RegionConfig(clusters=1, cell_radius=10.0))
        spacing = np.linalg.norm(grid.cells[0, 1] - grid.cells[0, 0])
        self.assertAlmostEqual(spacing, 10e3 * np.sqrt(3.0), delta=5.0)

    def test_explicit_centres_and_priorities(self):
        grid = build_grid(RegionConfig(centers=((30.0, -100.0), (33.0, -97.0)), priorities=(2, 1)))
        self.assertEqual(grid.priority_order, [1, 0])
        self.assertAlmostEqual(grid.clusters[1].center_lat, 33.0)

    def test_rejects_bad_regions(self):
        with self.assertRaises(GridError):
            build_grid(RegionConfig(clusters=0))
        with self.assertRaises(GridError):
            build_grid(RegionConfig(clusters=2, priorities=(1, 1)))
        with self.assertRaises(GridError):
            build_grid(RegionConfig(centers=((30.0, -100.0), (30.0, -100.0))))
        with self.assertRaises(GridError):
            build_grid(RegionConfig(cell_radius=0.0))

    def test_users(self):
        grid = build_grid(RegionConfig(clusters=2))
        representative = grid.representative_users()
        self.assertEqual(len(representative), 254)
        self.assertEqual(representative.user_ids[130], grid.user_id(1, 3))
        np.testing.assert_array_equal(representative.positions[130], grid.cells[1, 3])

        drawn = grid.random_users(2, np.random.default_rng(1))
        self.assertEqual(len(drawn), 508)
        self.assertEqual(drawn.user_ids[0], 254)
        self.assertFalse(drawn.representative.any())
        offsets = np.linalg.norm(drawn.positions - grid.cells[drawn.clusters, drawn.cells], axis=-1)
        self.assertLessEqual(offsets.max(), 10e3 + 50.0)
        np.testing.assert_array_equal(drawn.colors, grid.colors[drawn.clusters, drawn.cells])

        subset = drawn.subset(drawn.clusters == 1)
        self.assertEqual(len(subset), 254)
        self.assertEqual(next(subset.users()).cluster, 1)


class BeamScheduleTestCase(SimpleTestCase):
    def test_round_robin(self):
        schedule = BeamSchedule(16)
        np.testing.assert_array_equal(schedule.active(0), np.arange(16))
        np.testing.assert_array_equal(schedule.active(1), np.arange(16, 32))
        np.testing.assert_array_equal(schedule.active(7)[-1], (7 * 16 + 15) % 127)
        self.assertEqual(schedule.cycle, 8)

    def test_every_cell_is_lit_within_a_cycle(self):
        schedule = BeamSchedule(24)
        lit = np.unique(schedule.active_matrix(np.arange(schedule.cycle)))
        self.assertEqual(len(lit), 127)

    def test_full_illumination(self):
        np.testing.assert_array_equal(BeamSchedule(127).active(5), np.arange(127))

    def test_bad_counts(self):
        with self.assertRaises(GridError):
            BeamSchedule(0)
        with self.assertRaises(GridError):
            check_beam_count(200)
        with self.assertLogs("association.beams", level="WARNING"):
            check_beam_count(10)
        np.testing.assert_array_equal(schedule_beams(0, 5, 8, 1), np.arange(8, 16))


class AssociationMatrixTestCase(SimpleTestCase):
    def test_pairs(self):
        matrix = AssociationMatrix((4, None, 2), PRIMARY)
        self.assertEqual(list(matrix.pairs()), [(4, 0), (2, 2)])
        self.assertEqual(matrix.served(), 2)
        self.assertEqual(matrix.unserved(), [1])
        self.assertEqual(matrix.with_cluster(1, 9).serving(1), 9)
        self.assertEqual(AssociationMatrix.empty(2, PRIMARY).satellites, (None, None))

    def test_one_cluster_per_satellite(self):
        with self.assertRaises(AssociationError):
            check_association(AssociationMatrix((4, 4), PRIMARY))
