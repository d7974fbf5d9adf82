import os
import sys
import unittest

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from utils.uislab.errors import InvalidFormula, NotConverged
from utils.uislab.formula import Atom, Not, parse_formula
from utils.uislab.joint import (
    EventPartition,
    JointDistribution,
    PropositionSpace,
    conditional_probability,
    entropy,
    jeffrey_update,
    kl_divergence,
    probability,
    probability_of,
)
from utils.uislab.maxent import (
    Conditional,
    Marginal,
    constraints_from_json,
    constraints_to_json,
    fit_max_entropy_prior,
    mxe_update,
    project,
    residual,
)


def table_3_1_constraints():
    return [
        Marginal(Atom("A1"), 0.5),
        Marginal(Atom("A2"), 0.5),
        Marginal(parse_formula("A1 & A2"), 1.0 / 9.0),
    ]


class TestConstraints(unittest.TestCase):
    def test_value_range(self):
        with self.assertRaises(InvalidFormula):
            Marginal(Atom("A"), 1.2)
        with self.assertRaises(InvalidFormula):
            Conditional(Atom("A"), Atom("B"), -0.1)

    def test_json(self):
        cs = [Marginal(Atom("A"), 0.3), Conditional(parse_formula("A & B"), parse_formula("!C"), 0.25)]
        self.assertEqual(constraints_from_json(constraints_to_json(cs)), cs)

    def test_unknown_kind(self):
        with self.assertRaises(InvalidFormula):
            constraints_from_json('[{"kind": "joint", "target": "A", "value": 0.1}]')


class TestProjection(unittest.TestCase):
    def test_conditional_projection_holds_given_mass(self):
        space = PropositionSpace(["A", "B"])
        dist = JointDistribution.uniform(space)
        post = project(dist, Conditional(Atom("B"), Atom("A"), 0.9))
        self.assertAlmostEqual(conditional_probability(post, Atom("B"), Atom("A")), 0.9)
        self.assertAlmostEqual(probability(post, Atom("A")), 0.5)

    def test_residual_counts_null_given_as_one(self):
        space = PropositionSpace(["A", "B"])
        dist = JointDistribution(space, [0.5, 0.0, 0.5, 0.0])
        self.assertEqual(residual(dist, [Conditional(Atom("B"), Atom("A"), 0.5)]), 1.0)


class TestMaxEntropyFit(unittest.TestCase):
    def test_single_marginal_keeps_independence(self):
        space = PropositionSpace(["A", "B"])
        dist, report = fit_max_entropy_prior(space, [Marginal(Atom("A"), 0.3)])
        self.assertTrue(report.converged)
        np.testing.assert_allclose(dist.atoms, [0.35, 0.15, 0.35, 0.15], atol=1e-9)

    def test_negative_prior_from_marginals_and_overlap(self):
        space = PropositionSpace(["A1", "A2"])
        dist, report = fit_max_entropy_prior(space, table_3_1_constraints())
        np.testing.assert_allclose(dist.atoms, [1 / 9, 7 / 18, 7 / 18, 1 / 9], atol=1e-8)
        self.assertLessEqual(report.max_residual, report.tolerance)

    def test_fit_is_max_entropy_among_feasible(self):
        space = PropositionSpace(["A", "B"])
        dist, _ = fit_max_entropy_prior(space, [Marginal(parse_formula("A | B"), 0.75)])
        # another point with p(A or B) = 0.75
        other = JointDistribution(space, [0.25, 0.5, 0.125, 0.125])
        self.assertGreater(entropy(dist), entropy(other))
        np.testing.assert_allclose(dist.atoms, [0.25, 0.25, 0.25, 0.25], atol=1e-9)

    def test_infeasible_constraints_raise_with_report(self):
        space = PropositionSpace(["A", "B"])
        cs = [Marginal(Atom("A"), 0.9), Marginal(Atom("B"), 0.9), Marginal(parse_formula("A & B"), 0.5)]
        with self.assertRaises(NotConverged) as ctx:
            fit_max_entropy_prior(space, cs, max_iters=200)
        self.assertFalse(ctx.exception.report.converged)
        self.assertEqual(ctx.exception.report.iterations, 200)

    def test_no_constraints_returns_prior(self):
        space = PropositionSpace(["A"])
        prior = JointDistribution(space, [0.2, 0.8])
        post, report = mxe_update(prior, [])
        self.assertEqual(post, prior)
        self.assertEqual(report.iterations, 0)


class TestMinimumCrossEntropyUpdate(unittest.TestCase):
    def test_two_certainties_on_negative_prior(self):
        space = PropositionSpace(["A1", "A2"])
        prior, _ = fit_max_entropy_prior(space, table_3_1_constraints())
        post, _ = mxe_update(prior, [Marginal(Atom("A1"), 0.9), Marginal(Atom("A2"), 0.9)])
        self.assertAlmostEqual(probability_of(post, "A1"), 0.9, places=8)
        self.assertAlmostEqual(probability_of(post, "A2"), 0.9, places=8)
        self.assertAlmostEqual(probability_of(post, "A1 & A2"), 0.801, delta=0.002)

    def test_single_marginal_update_is_jeffrey(self):
        space = PropositionSpace(["A1", "A2"])
        prior, _ = fit_max_entropy_prior(space, table_3_1_constraints())
        post, report = mxe_update(prior, [Marginal(Atom("A1"), 0.9)])
        self.assertEqual(report.iterations, 1)
        self.assertAlmostEqual(conditional_probability(post, Atom("A2"), Atom("A1")), 2 / 9, places=8)

    def test_single_marginal_update_matches_jeffrey_update(self):
        space = PropositionSpace(["A", "B", "C"])
        prior = JointDistribution(space, np.random.default_rng(5).dirichlet(np.ones(space.size)))
        post, _ = mxe_update(prior, [Marginal(Atom("A"), 0.85)])
        kin = jeffrey_update(prior, EventPartition(space, [(Atom("A"), 0.85), (Not(Atom("A")), 0.15)]))
        np.testing.assert_allclose(post.atoms, kin.atoms, rtol=1e-12, atol=1e-15)

    def test_constraint_order_does_not_change_posterior(self):
        space = PropositionSpace(["A", "B", "C"])
        prior = JointDistribution(space, np.random.default_rng(7).dirichlet(np.ones(space.size) * 3))
        constraints = [
            Marginal(Atom("A"), 0.65),
            Marginal(Atom("C"), 0.2),
            Conditional(Atom("B"), parse_formula("A & !C"), 0.7),
        ]
        forward, _ = mxe_update(prior, constraints, tol=1e-12)
        backward, _ = mxe_update(prior, constraints[::-1], tol=1e-12)
        np.testing.assert_allclose(forward.atoms, backward.atoms, atol=1e-9)

    def test_update_is_idempotent(self):
        space = PropositionSpace(["A1", "A2"])
        prior, _ = fit_max_entropy_prior(space, table_3_1_constraints())
        constraints = [Marginal(Atom("A1"), 0.9), Marginal(Atom("A2"), 0.2)]
        once, _ = mxe_update(prior, constraints, tol=1e-12)
        twice, report = mxe_update(once, constraints)
        self.assertEqual(report.iterations, 1)
        np.testing.assert_allclose(twice.atoms, once.atoms, atol=1e-10)

    def test_posterior_minimizes_kl_over_feasible_set(self):
        space = PropositionSpace(["A", "B", "C"])
        prior = JointDistribution(space, np.random.default_rng(3).dirichlet(np.ones(space.size) * 2))
        a, ab = Atom("A").mask(space), parse_formula("A & B").mask(space)
        post, _ = mxe_update(prior, [Marginal(Atom("A"), 0.7), Conditional(Atom("B"), Atom("A"), 0.4)], tol=1e-12)
        # directions that keep the total, p(A) and p(A & B) - 0.4 p(A) fixed
        rows = np.vstack([np.ones(space.size), a.astype(float), ab.astype(float) - 0.4 * a])
        basis = np.linalg.svd(rows)[2][rows.shape[0]:]
        best = kl_divergence(post, prior)
        rng = np.random.default_rng(11)
        for _ in range(50):
            d = basis.T @ rng.normal(size=basis.shape[0])
            step = 0.5 * post.atoms.min() / np.abs(d).max()
            other = post.with_atoms(post.atoms + step * d)
            self.assertGreaterEqual(kl_divergence(other, prior), best - 1e-12)


if __name__ == "__main__":
    unittest.main()
