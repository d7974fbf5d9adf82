import math
import os
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from utils.uislab.calculi import UISKind
from utils.uislab.errors import DegenerateRegression, TooManyLeaves
from utils.uislab.families import UNSHIPPED, family_names, fixture_name, generate_family
from utils.uislab.harness import (
    expected_sq_error,
    input_grid,
    rank_cases,
    run_sweep,
    shift_regression,
    zeta,
)
from utils.uislab.rulemodel import load
from utils.uislab.schema import SweepReport

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


class TestZeta(unittest.TestCase):
    def test_expected_sq_error(self):
        self.assertAlmostEqual(expected_sq_error(0.5, 0.5), 1 / 12)
        self.assertAlmostEqual(expected_sq_error(0.6, 0.2), 0.92 / 6)

    def test_expected_sq_error_matches_sampling(self):
        rng = np.random.default_rng(2024)
        for p_m1, p0 in rng.uniform(0.0, 1.0, size=(20, 2)):
            cf = rng.uniform(-1.0, 1.0, size=4_000_000)
            guess = np.where(cf >= 0.0, p0 + cf * (1.0 - p0), p0 * (1.0 + cf))
            with self.subTest(p_m1=p_m1, p0=p0):
                self.assertAlmostEqual(expected_sq_error(p_m1, p0), float(np.mean((guess - p_m1) ** 2)), delta=1e-3)

    def test_anchors(self):
        self.assertEqual(zeta(0.7, 0.7, 0.4), 1.0)
        self.assertAlmostEqual(zeta(0.5 + math.sqrt(1 / 12), 0.5, 0.5), 0.0)
        self.assertAlmostEqual(zeta(1.0, 0.5, 0.5), -1.0)
        self.assertAlmostEqual(zeta(0.0, 0.5, 0.5), -1.0)

    def test_piecewise_linear_in_squared_error(self):
        mu = expected_sq_error(0.5, 0.5)
        self.assertAlmostEqual(zeta(0.5 + math.sqrt(mu / 2), 0.5, 0.5), 0.5)
        halfway = mu + (0.25 - mu) / 2
        self.assertAlmostEqual(zeta(0.5 - math.sqrt(halfway), 0.5, 0.5), -0.5)

    def test_bounded(self):
        for pu in (0.0, 0.2, 0.55, 1.0):
            for pm in (0.0, 0.3, 0.9, 1.0):
                self.assertTrue(-1.0 <= zeta(pu, pm, 0.4) <= 1.0)


class TestInputGrid(unittest.TestCase):
    def test_full_product(self):
        grid = input_grid(["B1", "B2"], seed=7)
        self.assertEqual(len(grid), 16)
        self.assertEqual(set(grid[0]), {"B1", "B2"})
        for row in grid:
            for value in row.values():
                self.assertTrue(0.0 <= value <= 1.0)

    def test_jitter_stays_near_levels(self):
        grid = input_grid(["A"], seed=3, levels=(0.05, 0.95), jitter=0.01)
        self.assertLessEqual(abs(grid[0]["A"] - 0.05), 0.01)
        self.assertLessEqual(abs(grid[1]["A"] - 0.95), 0.01)

    def test_seeded(self):
        self.assertEqual(input_grid(["A", "B"], seed=1), input_grid(["A", "B"], seed=1))
        self.assertNotEqual(input_grid(["A", "B"], seed=1), input_grid(["A", "B"], seed=2))

    def test_no_jitter_is_exact(self):
        grid = input_grid(["A"], seed=0, levels=(0.25, 0.75), jitter=0.0)
        self.assertEqual(grid, [{"A": 0.25}, {"A": 0.75}])

    def test_leaf_limits(self):
        with self.assertRaises(TooManyLeaves):
            input_grid([f"B{i}" for i in range(9)], seed=0)
        with self.assertRaises(TooManyLeaves):
            input_grid([], seed=0)


class TestShiftRegression(unittest.TestCase):
    def test_exact_line(self):
        reg = shift_regression([0.1, 0.2, 0.3, 0.4], [0.3, 0.5, 0.7, 0.9])
        self.assertAlmostEqual(reg.slope, 2.0)
        self.assertAlmostEqual(reg.intercept, 0.1)
        self.assertAlmostEqual(reg.r_squared, 1.0)
        self.assertEqual(reg.response, "over-response")

    def test_flat_response(self):
        reg = shift_regression([0.1, 0.2, 0.3], [0.0, 0.0, 0.0])
        self.assertEqual(reg.slope, 0.0)
        self.assertEqual(reg.response, "under-response")

    def test_degenerate(self):
        with self.assertRaises(DegenerateRegression):
            shift_regression([0.1, 0.2], [0.1, 0.2])
        with self.assertRaises(DegenerateRegression):
            shift_regression([0.2, 0.2, 0.2], [0.1, 0.2, 0.3])


class TestSweep(unittest.TestCase):
    def test_identity_rule_set_is_reproduced(self):
        rs = load(FIXTURES / "identity.rules")
        reports = run_sweep(rs, seed=0, case="identity", levels=(0.6, 0.7, 0.8, 0.9), jitter=0.0)
        self.assertEqual(list(reports), [UISKind.MYC, UISKind.TSM, UISKind.CI])
        for uis, report in reports.items():
            with self.subTest(uis=uis.value):
                self.assertEqual(report.trial_count, 4)
                self.assertEqual(report.failed_trials, 0)
                self.assertAlmostEqual(report.mean_zeta, 1.0, places=6)
                self.assertAlmostEqual(report.regression.slope, 1.0, places=5)

    def test_single_leaf(self):
        rs = load(FIXTURES / "single-leaf.rules")
        reports = run_sweep(rs, seed=0, case="single-leaf")
        self.assertEqual(len(reports[UISKind.TSM].trials), 4)
        self.assertAlmostEqual(reports[UISKind.TSM].mean_zeta, 1.0, places=5)
        self.assertAlmostEqual(reports[UISKind.CI].mean_zeta, 1.0, places=5)
        self.assertLess(reports[UISKind.MYC].mean_zeta, reports[UISKind.TSM].mean_zeta)
        self.assertEqual(reports[UISKind.MYC].trials[0].outcomes[0].consequent, "C")

    def test_scores_sink_consequents_only(self):
        rs = load(FIXTURES / "dpth-2.rules")
        reports = run_sweep(rs, uis=["myc"], seed=0, levels=(0.2, 0.8))
        trial = reports[UISKind.MYC].trials[0]
        self.assertEqual([o.consequent for o in trial.outcomes], ["A"])
        self.assertEqual(reports[UISKind.MYC].trial_count, 16)

    def test_threads_do_not_change_results(self):
        rs = load(FIXTURES / "bsh2-upr.rules")
        serial = run_sweep(rs, seed=5, workers=1)
        threaded = run_sweep(rs, seed=5, workers=3)
        for uis in serial:
            self.assertEqual(serial[uis].mean_zeta, threaded[uis].mean_zeta)
            self.assertEqual(
                [t.zeta for t in serial[uis].trials],
                [t.zeta for t in threaded[uis].trials],
            )



class TestFamilySweep(unittest.TestCase):
    """Every registered family at seed 0: shipped fixtures, generated where none is shipped."""

    @classmethod
    def setUpClass(cls):
        cls.reports = {}
        for name in family_names():
            if name in UNSHIPPED:
                rs = generate_family(name)
            else:
                rs = load(FIXTURES / f"{fixture_name(name)}.rules")
            for uis, report in run_sweep(rs, seed=0, case=name).items():
                cls.reports[name, uis] = report

    def test_worst_case_ordering(self):
        worst = {r.uis: r.worst_zeta for r in rank_cases(self.reports.values())}
        self.assertGreater(worst["ci"], worst["myc"])
        self.assertGreater(worst["myc"], worst["tsm"])

    def test_myc_worst_case_is_forced_down_lower_strength(self):
        ranking = {r.uis: r for r in rank_cases(self.reports.values())}
        self.assertTrue(ranking["myc"].worst[0].case.startswith("cnd-ind-"))

    def test_myc_beats_tsm_where_tsm_mirrors_the_upper_strength(self):
        for name in ("bsh3-upr", "bsh3-upr-pos", "bsh3-upr-neg"):
            with self.subTest(family=name):
                self.assertGreater(
                    self.reports[name, UISKind.MYC].mean_zeta, self.reports[name, UISKind.TSM].mean_zeta
                )

    def test_declared_lower_strength_keeps_tsm_level_with_myc(self):
        for name in ("bsh3-u&l", "bsh3-u&l-pos", "bsh3-u&l-neg"):
            with self.subTest(family=name):
                self.assertGreater(
                    self.reports[name, UISKind.TSM].mean_zeta, self.reports[name, UISKind.MYC].mean_zeta - 0.01
                )


class TestRanking(unittest.TestCase):
    def _report(self, case, uis, z):
        return SweepReport(case=case, uis=uis, trial_count=1, mean_zeta=z, seed=0)

    def test_best_and_worst(self):
        reports = [
            self._report("a", "myc", 0.9),
            self._report("b", "myc", 0.1),
            self._report("c", "myc", 0.5),
            self._report("a", "ci", 0.2),
        ]
        ranking = rank_cases(reports, k=2)
        self.assertEqual([r.uis for r in ranking], ["myc", "ci"])
        myc = ranking[0]
        self.assertEqual([c.case for c in myc.best], ["a", "c"])
        self.assertEqual([c.case for c in myc.worst], ["b", "c"])
        self.assertEqual(myc.worst_zeta, 0.1)


if __name__ == "__main__":
    unittest.main()
