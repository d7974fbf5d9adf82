import os
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from utils.uislab.calculi import (
    CIParameters,
    TSMLowerMode,
    UISKind,
    build_model,
    cf_and,
    cf_from_probs,
    cf_or,
    ci_update,
    combine_parallel,
    evaluate,
    extract_ci_parameters,
    formula_cf,
    myc_modus_ponens,
    prob_from_cf,
    read_rule_strengths,
    term_posterior,
    tsm_modus_ponens,
)
from utils.uislab.errors import ContradictoryCertainty, DegenerateAnchor, UnboundLeaf
from utils.uislab.formula import Atom, parse_formula
from utils.uislab.joint import JointDistribution, PropositionSpace, conditional_probability, probability
from utils.uislab.rulemodel import fit_prior, load, parse

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

SINGLE_LEAF = """
prop C
prop A
prior A = 0.5
rule C <- A cf 0.8 lower cf -0.3
"""

# Fitted values for SINGLE_LEAF: p0(C) = 8/11, p0(C|A) = 10.4/11, p0(C|!A) = 5.6/11
P0_C = 8 / 11


class TestConversions(unittest.TestCase):
    def test_prob_from_cf_anchors(self):
        self.assertEqual(prob_from_cf(0.0, 0.3), 0.3)
        self.assertEqual(prob_from_cf(1.0, 0.3), 1.0)
        self.assertEqual(prob_from_cf(-1.0, 0.3), 0.0)
        self.assertAlmostEqual(prob_from_cf(0.5, 0.2), 0.6)
        self.assertAlmostEqual(prob_from_cf(-0.5, 0.2), 0.1)

    def test_cf_from_probs_inverts(self):
        for cf in (-0.9, -0.25, 0.0, 0.4, 1.0):
            self.assertAlmostEqual(cf_from_probs(prob_from_cf(cf, 0.35), 0.35), cf)

    def test_negative_prior_conjunction_cf(self):
        self.assertAlmostEqual(cf_from_probs(0.801, 1 / 9), 0.776, places=3)

    def test_extreme_priors(self):
        self.assertAlmostEqual(cf_from_probs(0.5, 1.0), -0.5)
        self.assertAlmostEqual(cf_from_probs(0.5, 0.0), 0.5)
        self.assertEqual(cf_from_probs(1.0, 1.0), 0.0)
        self.assertEqual(cf_from_probs(0.0, 0.0), 0.0)

    def test_degenerate_anchor(self):
        # no room above p0 = 1 or below p0 = 0
        with self.assertRaises(DegenerateAnchor):
            cf_from_probs(1.0 + 1e-9, 1.0)
        with self.assertRaises(DegenerateAnchor):
            cf_from_probs(-1e-9, 0.0)


class TestCFOperators(unittest.TestCase):
    def test_formula_cf_min_max_neg(self):
        cfs = {"A": 0.5, "B": -0.2}
        self.assertAlmostEqual(formula_cf(parse_formula("A & !B"), cfs), 0.2)
        self.assertAlmostEqual(formula_cf(parse_formula("A | B"), cfs), 0.5)
        self.assertAlmostEqual(formula_cf(parse_formula("A & B"), cfs), -0.2)
        with self.assertRaises(UnboundLeaf):
            formula_cf(parse_formula("A & Z"), cfs)

    def test_myc_ignores_negative_antecedent(self):
        self.assertAlmostEqual(myc_modus_ponens(0.8, 0.5), 0.4)
        self.assertEqual(myc_modus_ponens(0.8, -0.5), 0.0)

    def test_tsm_lower_and_mirror(self):
        self.assertAlmostEqual(tsm_modus_ponens(0.8, -0.3, 0.5), 0.4)
        self.assertAlmostEqual(tsm_modus_ponens(0.8, -0.3, -0.5), -0.15)
        self.assertAlmostEqual(tsm_modus_ponens(0.8, None, -0.5), -0.4)

    def test_combine_parallel(self):
        self.assertAlmostEqual(combine_parallel(0.6, 0.5), 0.8)
        self.assertAlmostEqual(combine_parallel(-0.6, -0.5), -0.8)
        self.assertAlmostEqual(combine_parallel(0.6, -0.5), 0.2)
        self.assertAlmostEqual(combine_parallel(1.0, -0.5), 1.0)
        self.assertAlmostEqual(combine_parallel(0.3, 0.0), 0.3)
        self.assertAlmostEqual(combine_parallel(0.3, -0.7), combine_parallel(-0.7, 0.3))

    def test_combine_parallel_commutes_and_associates(self):
        rng = np.random.default_rng(17)
        for x, y, z in rng.uniform(-0.99, 0.99, size=(200, 3)):
            self.assertAlmostEqual(combine_parallel(x, y), combine_parallel(y, x), places=12)
            self.assertAlmostEqual(
                combine_parallel(combine_parallel(x, y), z), combine_parallel(x, combine_parallel(y, z)), places=9
            )

    def test_de_morgan(self):
        rng = np.random.default_rng(23)
        for x, y in rng.uniform(-1.0, 1.0, size=(100, 2)):
            self.assertEqual(cf_or([x, y]), -cf_and([-x, -y]))

    def test_conjunction_on_negative_prior(self):
        prior, _ = fit_prior(load(FIXTURES / "table-3-1.rules"))
        cf = formula_cf(parse_formula("A1 & A2"), {"A1": 0.8, "A2": 0.8})
        self.assertAlmostEqual(prob_from_cf(cf, probability(prior, parse_formula("A1 & A2"))), 0.822, places=3)

    def test_contradictory_certainty(self):
        with self.assertRaises(ContradictoryCertainty):
            combine_parallel(1.0, -1.0)


class TestCIUpdate(unittest.TestCase):
    def setUp(self):
        self.params = CIParameters(prior0=0.2, likelihood_true={"A": 0.9}, likelihood_false={"A": 0.1})

    def test_neutral_at_term_prior(self):
        self.assertAlmostEqual(self.params.term_prior("A"), 0.26)
        self.assertAlmostEqual(ci_update(self.params, {"A": 0.26}), 0.2)
        self.assertAlmostEqual(ci_update(self.params, {}), 0.2)

    def test_sharp_evidence_is_likelihood_ratio(self):
        self.assertAlmostEqual(ci_update(self.params, {"A": 1.0}), 2.25 / 3.25)
        self.assertAlmostEqual(ci_update(self.params, {"A": 0.0}), (0.25 / 9) / (1 + 0.25 / 9))

    def test_degenerate_prior_passes_through(self):
        params = CIParameters(prior0=0.0, likelihood_true={"A": 0.0}, likelihood_false={"A": 0.5})
        self.assertEqual(ci_update(params, {"A": 1.0}), 0.0)

    def test_monotone_in_evidence(self):
        params = CIParameters(
            prior0=0.3, likelihood_true={"A": 0.8, "B": 0.6}, likelihood_false={"A": 0.2, "B": 0.3}
        )
        out = [ci_update(params, {"A": a, "B": 0.4}) for a in np.linspace(0.0, 1.0, 21)]
        self.assertTrue(all(lo <= hi for lo, hi in zip(out, out[1:])))
        self.assertLess(out[0], out[-1])

    def test_sharp_evidence_matches_bayes(self):
        # C, A, B with A and B independent given C
        space = PropositionSpace(["C", "A", "B"])
        weights = {}
        for c, pc, pa, pb in ((True, 0.3, 0.8, 0.6), (False, 0.7, 0.2, 0.3)):
            for a in (True, False):
                for b in (True, False):
                    weights[c, a, b] = pc * (pa if a else 1 - pa) * (pb if b else 1 - pb)
        joint = JointDistribution.from_assignments(space, weights)
        params = extract_ci_parameters(joint, "C", [parse_formula("A & B")])
        bayes = conditional_probability(joint, Atom("C"), parse_formula("A & B"))
        self.assertAlmostEqual(bayes, 24 / 31)
        self.assertAlmostEqual(ci_update(params, {"A": 1.0, "B": 1.0}), bayes, places=9)
        self.assertAlmostEqual(
            ci_update(params, {"A": 0.0, "B": 1.0}),
            conditional_probability(joint, Atom("C"), parse_formula("!A & B")),
            places=9,
        )

    def test_term_posterior_treats_inputs_as_independent(self):
        posts = {"A": 0.5, "B": 0.4}
        self.assertAlmostEqual(term_posterior(parse_formula("A & B"), posts), 0.2)
        self.assertAlmostEqual(term_posterior(parse_formula("A | B"), posts), 0.7)
        self.assertAlmostEqual(term_posterior(parse_formula("!A & B"), posts), 0.2)


class TestRuleTreeEvaluation(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.rs = parse(SINGLE_LEAF)
        cls.prior, _ = fit_prior(cls.rs)

    def test_strengths_read_back(self):
        (strength,) = read_rule_strengths(self.rs, self.prior)
        self.assertAlmostEqual(strength.upper_cf, 0.8, places=6)
        self.assertAlmostEqual(strength.lower_cf, -0.3, places=6)

    def test_positive_evidence_all_match_jeffrey(self):
        model = build_model(self.rs, self.prior)
        for uis in UISKind:
            self.assertAlmostEqual(model.evaluate(uis, {"A": 0.9})["C"], 9.92 / 11, places=6, msg=uis.value)

    def test_negative_evidence(self):
        model = build_model(self.rs, self.prior)
        self.assertAlmostEqual(model.evaluate(UISKind.MYC, {"A": 0.2})["C"], P0_C, places=6)
        self.assertAlmostEqual(model.evaluate(UISKind.TSM, {"A": 0.2})["C"], 6.56 / 11, places=6)
        self.assertAlmostEqual(model.evaluate(UISKind.CI, {"A": 0.2})["C"], 6.56 / 11, places=6)

    def test_tsm_mirror_mode(self):
        out = evaluate(UISKind.TSM, self.rs, self.prior, {"A": 0.2}, tsm_lower=TSMLowerMode.MIRROR)
        self.assertAlmostEqual(out["C"], 4.16 / 11, places=6)

    def test_unchanged_evidence_keeps_prior(self):
        for uis in UISKind:
            self.assertAlmostEqual(evaluate(uis, self.rs, self.prior, {"A": 0.5})["C"], P0_C, places=6)

    def test_tsm_matches_myc_on_non_negative_evidence(self):
        rng = np.random.default_rng(29)
        for name in ("dpth-2", "bsh3-unl", "1cnc-2rls-pos"):
            rs = load(FIXTURES / f"{name}.rules")
            model = build_model(rs, fit_prior(rs)[0])
            for _ in range(10):
                posts = {leaf: float(rng.uniform(rs.leaf_priors[leaf], 1.0)) for leaf in rs.leaves}
                myc, tsm = model.evaluate(UISKind.MYC, posts), model.evaluate(UISKind.TSM, posts)
                with self.subTest(case=name, posts=posts):
                    for node in rs.outputs:
                        self.assertAlmostEqual(myc[node], tsm[node], places=12)

    def test_missing_leaf(self):
        with self.assertRaises(UnboundLeaf):
            evaluate(UISKind.MYC, self.rs, self.prior, {})


if __name__ == "__main__":
    unittest.main()
