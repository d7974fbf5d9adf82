import os
import sys
import unittest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from utils.uislab.joint import two_proposition_prior
from utils.uislab.diagnostics import (
    INDEPENDENT_PRIOR,
    NEGATIVE_PRIOR,
    PRIORS,
    bias_table,
    demorgan_audit,
    ignored_evidence_case,
    one_datum_diagnostic,
    rule_or_identity_sides,
    rule_or_independence_check,
    standard_table,
)


class TestBiasTables(unittest.TestCase):
    def test_negative_prior_conjunction(self):
        rows = standard_table("3-1")
        self.assertEqual([(r.cf_a1, r.cf_a2) for r in rows], [(0.8, 0.8), (-0.8, 0.8), (-0.8, -0.8)])
        for row, want in zip(rows, (0.776, -0.501, -0.991)):
            self.assertAlmostEqual(row.cf_mxe, want, delta=0.002)
        self.assertAlmostEqual(rows[0].p0, 1 / 9)
        self.assertAlmostEqual(rows[0].p_mxe, 0.801, delta=0.001)
        self.assertEqual([r.cf_myc for r in rows], [0.8, -0.8, -0.8])
        self.assertAlmostEqual(rows[1].p_mxe, 0.05543, delta=1e-4)
        self.assertAlmostEqual(rows[2].p_mxe, 0.001, delta=5e-4)

    def test_misstatement(self):
        rows = standard_table("3-1")
        self.assertAlmostEqual(rows[0].misstatement_pct, 3.08, delta=0.1)
        self.assertAlmostEqual(rows[1].misstatement_pct, 59.6, delta=0.5)

    def test_positive_prior_conjunction(self):
        rows = standard_table("3-2")
        for row, want in zip(rows, (0.746, -0.746, -0.885)):
            self.assertAlmostEqual(row.cf_mxe, want, delta=0.002)

    def test_independent_disjunction(self):
        rows = standard_table("3-3")
        for row, rule_or, mxe in zip(rows, (0.96, 0.0, 0.64, -0.96), (0.96, 0.64, 0.64, -0.7467)):
            self.assertAlmostEqual(row.cf_rule_or, rule_or, places=9)
            self.assertAlmostEqual(row.cf_mxe, mxe, places=3)
        self.assertEqual([r.cf_myc for r in rows], [0.8, 0.8, 0.4, -0.8])

    def test_rule_or_across_correlation(self):
        rows = standard_table("3-4")
        self.assertEqual([r.label for r in rows], ["negative", "independent", "positive"])
        for row, want in zip(rows, (-0.776, -0.747, -0.746)):
            self.assertAlmostEqual(row.cf_mxe, want, delta=0.002)
            self.assertAlmostEqual(row.cf_myc, -0.96)
            self.assertGreater(abs(row.cf_myc), abs(row.cf_mxe))

    def test_unknown_table(self):
        with self.assertRaises(ValueError):
            standard_table("3-9")

    def test_zero_cfs_keep_prior(self):
        (row,) = bias_table(NEGATIVE_PRIOR, [(0.0, 0.0)], "and")
        self.assertAlmostEqual(row.p_mxe, row.p0)
        self.assertEqual(row.cf_myc, 0.0)


class TestDeMorgan(unittest.TestCase):
    def test_rule_or_routes_disagree(self):
        report = demorgan_audit(INDEPENDENT_PRIOR, [(0.8, 0.8)])
        row = report.rows[0]
        self.assertAlmostEqual(row.p_direct, 0.99)
        self.assertAlmostEqual(row.p_via_complements, 0.83)
        self.assertAlmostEqual(report.max_discrepancy, 0.16)

    def test_mxe_routes_agree(self):
        pairs = [(0.8, 0.8), (-0.5, 0.3), (0.2, -0.9), (-0.6, -0.6)]
        for name, prior in PRIORS.items():
            with self.subTest(prior=name):
                report = demorgan_audit(prior, pairs, engine="mxe")
                self.assertLess(report.max_discrepancy, 1e-9)


class TestOneDatum(unittest.TestCase):
    def test_branches(self):
        cases = [
            ("and", (-0.4, 0.6), "and-one-datum"),
            ("and", (0.6, 0.3), "and-implied"),
            ("or", (0.3, -0.5), "or-one-datum"),
            ("or", (-0.3, -0.6), "or-implied"),
        ]
        for mode, pair, branch in cases:
            with self.subTest(mode=mode, pair=pair):
                report = one_datum_diagnostic(NEGATIVE_PRIOR, pair, mode)
                self.assertEqual(report.branch, branch)

    def test_one_datum_branches_match_myc(self):
        grid = [-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0]
        for name in ("negative", "independent"):
            for mode in ("and", "or"):
                for a in grid:
                    for b in grid:
                        report = one_datum_diagnostic(PRIORS[name], (a, b), mode)
                        if not report.branch.endswith("one-datum"):
                            continue
                        with self.subTest(prior=name, mode=mode, pair=(a, b)):
                            self.assertTrue(report.holds)

    def test_implied_branches_need_the_implication(self):
        grid = [-0.75, -0.5, -0.25, 0.25, 0.5, 0.75]
        for name in ("negative", "independent"):
            for mode in ("and", "or"):
                for a in grid:
                    for b in grid:
                        report = one_datum_diagnostic(PRIORS[name], (a, b), mode)
                        if report.branch.endswith("one-datum"):
                            continue
                        with self.subTest(prior=name, mode=mode, pair=(a, b)):
                            self.assertFalse(report.assumption_in_prior)
                            self.assertFalse(report.holds)
                            # the kept input's own posterior sits further from its prior
                            if mode == "and":
                                self.assertLess(report.p_myc, report.p_reference)
                            else:
                                self.assertGreater(report.p_myc, report.p_reference)

    def test_implied_branches_hold_on_nested_prior(self):
        # A1 implies A2
        nested = two_proposition_prior(0.3, 0.6, 0.3)
        report = one_datum_diagnostic(nested, (0.4, 0.7), "and")
        self.assertEqual(report.branch, "and-implied")
        self.assertTrue(report.assumption_in_prior)
        self.assertTrue(report.holds)
        self.assertAlmostEqual(report.p_reference, 0.3 + 0.4 * 0.7)
        report = one_datum_diagnostic(nested, (-0.7, -0.4), "or")
        self.assertEqual(report.branch, "or-implied")
        self.assertTrue(report.assumption_in_prior)
        self.assertTrue(report.holds)
        self.assertAlmostEqual(report.p_reference, 0.6 * 0.6)


class TestRuleOrIdentities(unittest.TestCase):
    def test_positive_identity_scalar(self):
        lhs, rhs = rule_or_identity_sides(0.2, 0.6, 0.5, 0.8)
        self.assertAlmostEqual(float(lhs), float(rhs))

    def test_sampled_check(self):
        check = rule_or_independence_check(samples=100_000, seed=1)
        self.assertTrue(check.passed)
        self.assertEqual(check.negative_violations, 0)
        self.assertGreater(check.samples, 99_000)


class TestIgnoredEvidence(unittest.TestCase):
    def test_three_inputs(self):
        report = ignored_evidence_case(inputs=3)
        self.assertAlmostEqual(report.p0, 0.99 * 0.01 * 0.01)
        self.assertAlmostEqual(report.p_myc, report.p0)
        self.assertAlmostEqual(report.p_mxe, 0.99, places=6)


if __name__ == "__main__":
    unittest.main()
