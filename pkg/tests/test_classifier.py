import numpy as np
import pytest
from hypothesis import given, strategies as st

from riskloop.classifier import (CalibratedClassifier, ClassifierError,
                                 FeatureConfig, LinearModel, PlattParams,
                                 TrainConfig, _levenshtein, active_learn,
                                 featurize, jaccard, load_model, norm_edit_sim,
                                 number_eq, platt_fit, save_model, train)
from riskloop.ingest import Record, RecordPair, synth_workload
from riskloop.orchestrator import oracle_from_gold

text = st.one_of(st.none(), st.text(max_size=20))


class TestSimilarity:
    def test_jaccard_identical(self):
        assert jaccard("rust compiler", "rust compiler") == 1.0

    def test_jaccard_hand_value(self):
        assert jaccard("a b", "b c") == pytest.approx(1 / 3)

    def test_jaccard_missing(self):
        assert jaccard(None, "x") == 0.0
        assert jaccard("", "") == 0.0

    def test_edit_identical(self):
        assert norm_edit_sim("abc", "abc") == 1.0

    def test_edit_hand_value(self):
        # DP table for abc vs abd: one substitution, max length 3
        assert norm_edit_sim("abc", "abd") == pytest.approx(2 / 3)

    def test_edit_conventions(self):
        assert norm_edit_sim("", "") == 1.0
        assert norm_edit_sim(None, "x") == 0.0

    def test_levenshtein_against_reference(self):
        def ref(a, b):
            prev = list(range(len(b) + 1))
            for i, ca in enumerate(a, 1):
                cur = [i]
                for j, cb in enumerate(b, 1):
                    cur.append(min(prev[j] + 1, cur[j - 1] + 1,
                                   prev[j - 1] + (ca != cb)))
                prev = cur
            return prev[-1]

        rng = np.random.default_rng(0)
        for _ in range(100):
            a = "".join(chr(97 + c) for c in rng.integers(0, 5, rng.integers(0, 12)))
            b = "".join(chr(97 + c) for c in rng.integers(0, 5, rng.integers(0, 12)))
            assert _levenshtein(a, b) == ref(a, b)

    def test_number_eq(self):
        assert number_eq("1998", "1998") == 1.0
        assert number_eq("1998", "2001") == 0.0
        assert number_eq("n/a", "1998") == 0.0

    @given(text, text)
    def test_similarities_bounded_and_symmetric(self, a, b):
        for fn in (jaccard, norm_edit_sim, number_eq):
            v = fn(a, b)
            assert 0.0 <= v <= 1.0
            assert v == fn(b, a)


class TestFeaturize:
    config = FeatureConfig([("jaccard", "name"), ("edit", "name"), ("numeq", "year")])

    def pair(self, la, ra):
        return RecordPair("x|y", Record("x", "A", la), Record("y", "B", ra))

    def test_identical_records(self):
        p = self.pair({"name": "rust book", "year": "1998"},
                      {"name": "rust book", "year": "1998"})
        assert featurize(p, self.config).tolist() == [1.0, 1.0, 1.0]

    def test_disjoint_records(self):
        p = self.pair({"name": "abc"}, {"name": "xyz"})
        v = featurize(p, self.config)
        assert v[0] == 0.0 and v[2] == 0.0
        assert v[1] == pytest.approx(0.0)  # abc -> xyz is 3 substitutions over len 3

    def test_mixed_fixture_hand_computed(self):
        p = self.pair({"name": "rust book", "year": "1998"},
                      {"name": "rust code", "year": "2001"})
        v = featurize(p, self.config)
        assert v[0] == pytest.approx(1 / 3)          # {rust} / {rust, book, code}
        # levenshtein("rust book","rust code") = 3 (b->c, oo->od, k->e), len 9
        assert v[1] == pytest.approx(1 - 3 / 9)
        assert v[2] == 0.0


class TestTrain:
    def test_separable_points(self):
        X = np.array([[0.0, 0.0], [0.1, 0.2], [0.9, 1.0], [1.0, 0.8]])
        y = np.array([0, 0, 1, 1])
        m = train(X, y)
        assert np.all((m.decision(X) > 0) == (y > 0))

    def test_conflicting_duplicates_still_returns(self):
        X = np.array([[0.5, 0.5], [0.5, 0.5], [0.0, 0.0], [1.0, 1.0]])
        y = np.array([1, 0, 0, 1])
        m = train(X, y)
        acc = np.mean((m.decision(X) > 0) == (y > 0))
        assert acc < 1.0

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        X = rng.random((40, 3))
        y = (X[:, 0] > 0.5).astype(int)
        m1, m2 = train(X, y, TrainConfig(seed=5)), train(X, y, TrainConfig(seed=5))
        assert np.array_equal(m1.weights, m2.weights) and m1.bias == m2.bias

    def test_single_class_rejected(self):
        with pytest.raises(ClassifierError):
            train(np.zeros((3, 2)), np.ones(3))


class TestPlatt:
    def test_symmetric_scores_midpoint(self):
        scores = np.array([-1.0] * 10 + [1.0] * 10)
        labels = np.array([0] * 10 + [1] * 10)
        platt = platt_fit(scores, labels)
        assert platt.prob(np.array([0.0]))[0] == pytest.approx(0.5, abs=1e-6)
        assert platt.A < 0

    def test_no_signal_gives_base_rate(self):
        scores = np.zeros(12)
        labels = np.array([1] * 3 + [0] * 9)
        platt = platt_fit(scores, labels)
        # smoothed base rate: (sum of smoothed targets) / n
        t_hi, t_lo = 4 / 5, 1 / 11
        expected = (3 * t_hi + 9 * t_lo) / 12
        assert platt.prob(np.array([5.0]))[0] == pytest.approx(expected, abs=1e-4)

    def test_objective_non_increasing_and_gradient_small(self):
        rng = np.random.default_rng(11)
        scores = rng.normal(size=50)
        labels = (scores + rng.normal(scale=0.8, size=50) > 0).astype(int)
        trace = []
        platt = platt_fit(scores, -labels + 1, trace=trace)  # inverted labels: A > 0 branch
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))
        trace = []
        platt = platt_fit(scores, labels, trace=trace)
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))
        # gradient of the smoothed NLL at the fit
        pos = labels > 0
        t_hi = (pos.sum() + 1) / (pos.sum() + 2)
        t_lo = 1 / ((~pos).sum() + 2)
        targets = np.where(pos, t_hi, t_lo)
        z = platt.A * scores + platt.B
        p = 1 / (1 + np.exp(z))
        g = np.array([np.dot(scores, targets - p), np.sum(targets - p)])
        assert np.linalg.norm(g) <= 1e-6

    def test_single_class_rejected(self):
        with pytest.raises(ClassifierError):
            platt_fit(np.arange(4.0), np.ones(4))


class TestPriorProb:
    def fit_clf(self):
        rng = np.random.default_rng(2)
        X = rng.random((60, 2))
        y = (X.sum(axis=1) > 1.0).astype(int)
        model = train(X, y)
        platt = platt_fit(model.decision(X), y)
        return CalibratedClassifier(model, platt, FeatureConfig([("jaccard", "a"), ("jaccard", "b")])), X

    def test_midpoint_is_half(self):
        clf, _ = self.fit_clf()
        mid = -clf.platt.B / clf.platt.A
        v = np.array([mid])
        assert clf.platt.prob(v)[0] == pytest.approx(0.5)

    def test_monotone_in_decision(self):
        clf, X = self.fit_clf()
        assert clf.platt.A < 0
        d = np.sort(clf.decision(X))
        p = clf.platt.prob(d)
        assert np.all(np.diff(p) >= 0)

    def test_matches_direct_sigmoid(self):
        clf, _ = self.fit_clf()
        for s in (-1.3, 0.0, 2.7):
            expected = 1.0 / (1.0 + np.exp(clf.platt.A * s + clf.platt.B))
            assert clf.platt.prob(np.array([s]))[0] == pytest.approx(expected, rel=1e-12)

    def test_prior_prob_strictly_interior(self):
        clf, X = self.fit_clf()
        p = clf.prior_prob(X)
        assert np.all((p > 0) & (p < 1))


class TestSerialization:
    def test_round_trip(self, tmp_path):
        clf = CalibratedClassifier(
            LinearModel(np.array([0.25, -1.5]), 0.125),
            PlattParams(-2.0, 0.375),
            FeatureConfig([("jaccard", "name"), ("edit", "descr")]),
        )
        path = tmp_path / "model.txt"
        save_model(clf, path)
        loaded = load_model(path)
        assert np.array_equal(loaded.model.weights, clf.model.weights)
        assert loaded.model.bias == clf.model.bias
        assert (loaded.platt.A, loaded.platt.B) == (clf.platt.A, clf.platt.B)
        assert loaded.feature_config.specs == clf.feature_config.specs


class TestActiveLearn:
    def setup_method(self):
        self.workload, self.gold = synth_workload(5, 80)
        self.config = FeatureConfig([("jaccard", "name"), ("jaccard", "descr")])
        self.oracle = oracle_from_gold(self.gold)

    def test_budget_equals_seed_size(self):
        calls = []

        def counting(pair):
            calls.append(pair.pair_id)
            return self.oracle(pair)

        res = active_learn(self.workload, counting, 20, self.config,
                           hyper=TrainConfig(seed=1))
        assert len(calls) == 20
        assert len(res.train_indices) == 20

    def test_exact_budget_consumption(self):
        calls = []

        def counting(pair):
            calls.append(pair.pair_id)
            return self.oracle(pair)

        res = active_learn(self.workload, counting, 35, self.config,
                           hyper=TrainConfig(seed=1))
        assert len(calls) == 35
        assert len(res.train_indices) == 35
        assert len(set(res.train_indices)) == 35

    def test_oracle_failure_propagates(self):
        def broken(pair):
            raise RuntimeError("labeler offline")

        with pytest.raises(RuntimeError, match="labeler offline"):
            active_learn(self.workload, broken, 20, self.config)
