"""Budgeted verification loop: score, select, label, re-score.

A session owns the machine labels and the evolving risk state of every pair.
Each human (or oracle) label updates the feature statistics, appends
pseudo-observations to the still-unverified pairs and re-ranks them; for the
ACTL strategy the classifier is also retrained and its priors refreshed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import riskengine
from .classifier import CalibratedClassifier, TrainConfig, featurize_all, platt_fit, train
from .ingest import GoldStandard, Workload
from .riskengine import (MATCH, UNMATCH, FeatureStatsTable, PairRiskState,
                         RiskConfig, bayes_update, cvar_scores, extract_features,
                         generate_observation)

STRATEGIES = ("cvar", "base", "unct", "actl")


class SessionError(ValueError):
    pass


@dataclass
class SessionConfig:
    strategy: str = "cvar"
    budget: int = 0
    batch_size: int = 1
    risk: RiskConfig = field(default_factory=RiskConfig)
    seed: int = 0
    labeler: str = "oracle"   # "oracle" or "human"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise SessionError(f"unknown strategy {self.strategy!r}")
        if self.batch_size < 1:
            raise SessionError("batch_size must be >= 1")


@dataclass
class MetricReport:
    pickup_curve: list = field(default_factory=list)   # (budget, cumulative machine errors found)
    quality_curve: list = field(default_factory=list)  # (budget, precision, recall, f1)
    iterations: list = field(default_factory=list)     # per-label log dicts


def prf1(predicted_match, gold_match):
    """Precision/recall/F1 over the workload's pairs.

    Zero predicted positives: precision is 1 when there are no gold positives,
    else 0; recall symmetrically; f1 is 0 when p + r = 0.
    """
    predicted_match = np.asarray(predicted_match, dtype=bool)
    gold_match = np.asarray(gold_match, dtype=bool)
    tp = int(np.sum(predicted_match & gold_match))
    fp = int(np.sum(predicted_match & ~gold_match))
    fn = int(np.sum(~predicted_match & gold_match))
    if tp + fp == 0:
        precision = 1.0 if tp + fn == 0 else 0.0
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall = 1.0
    else:
        recall = tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


class VerificationSession:
    """Single-writer state machine for one verification run.

    Drive it either with `run(oracle)` or, for a human labeler, through
    `offer()` / `apply_label()`.
    """

    def __init__(self, workload: Workload, clf: CalibratedClassifier,
                 config: SessionConfig, gold: GoldStandard | None = None,
                 features: np.ndarray | None = None,
                 train_indices=None, train_labels=None):
        if config.budget > len(workload.pairs):
            raise SessionError("budget exceeds workload size")
        self.workload = workload
        self.clf = clf
        self.config = config
        self.gold = gold
        self.features = features if features is not None else featurize_all(workload, clf.feature_config)
        self.stats = FeatureStatsTable()
        self.report = MetricReport()

        mu0 = clf.prior_prob(self.features)
        self.mu0 = mu0
        self.states = []
        self.token_features = []
        self._feature_index = {}  # TokenFeature -> set of pair indices
        for i, pair in enumerate(workload.pairs):
            label = MATCH if mu0[i] >= 0.5 else UNMATCH
            feats = extract_features(pair)
            self.states.append(PairRiskState(pair_id=pair.pair_id, machine_label=label,
                                             mu0=float(mu0[i]), features=feats))
            self.token_features.append(feats)
            for f in feats:
                self._feature_index.setdefault(f, set()).add(i)

        self.verified = {}        # pair index -> human label (1/0)
        self.machine_at_pick = {}  # pair index -> machine label when selected
        self._index_of = {p.pair_id: i for i, p in enumerate(workload.pairs)}
        self.pickup = 0

        # ACTL retraining state: the classifier's own training set plus labels
        # accumulated during verification
        self._train_X = [self.features[i] for i in (train_indices or [])]
        self._train_y = list(train_labels or [])
        self._offered = None
        self._record_metrics()

    # -- scoring ------------------------------------------------------------

    @property
    def consumed(self):
        return len(self.verified)

    @property
    def complete(self):
        return self.consumed >= self.config.budget or self.consumed >= len(self.states)

    def _scores(self):
        """Risk of every unverified pair under the configured strategy."""
        unverified = [i for i in range(len(self.states)) if i not in self.verified]
        if not unverified:
            return [], np.array([])
        strat = self.config.strategy
        if strat == "base":
            vals = np.array([riskengine.base_risk(self.states[i].mu0, self.states[i].machine_label)
                             for i in unverified])
        elif strat in ("unct", "actl"):
            vals = np.array([riskengine.unct_risk(self.states[i].mu0) for i in unverified])
        else:
            cfg = self.config.risk
            mu_hat = np.empty(len(unverified))
            var_hat = np.empty(len(unverified))
            is_match = np.empty(len(unverified), dtype=bool)
            for j, i in enumerate(unverified):
                st = self.states[i]
                post = bayes_update(st.mu0, st.observations, cfg.theta, cfg)
                st.posterior = post
                mu_hat[j] = post.mu_hat
                var_hat[j] = max(post.sigma2_hat, cfg.var_floor)
                is_match[j] = st.machine_label == MATCH
            vals = cvar_scores(mu_hat, var_hat, is_match, cfg.theta)
        for j, i in enumerate(unverified):
            self.states[i].risk = float(vals[j])
        return unverified, vals

    def ranking(self):
        """Unverified pair indices by decreasing risk, ties by pair_id."""
        unverified, vals = self._scores()
        return sorted(unverified, key=lambda i: (-self.states[i].risk, self.states[i].pair_id))

    def offer(self):
        """Current most-risky unverified pair; idempotent until labeled."""
        if self.complete:
            return None
        if self._offered is None:
            self._offered = self.ranking()[0]
        return self._offered

    # -- labeling -----------------------------------------------------------

    def apply_label(self, pair_id: str, label: int):
        """Record one human/oracle label and refresh risk state."""
        if self.complete:
            raise SessionError("budget exhausted")
        idx = self._index_of.get(pair_id)
        if idx is None:
            raise SessionError(f"unknown pair {pair_id!r}")
        if idx in self.verified:
            raise SessionError(f"pair already verified: {pair_id}")
        label = int(bool(label))
        st = self.states[idx]
        self.verified[idx] = label
        self.machine_at_pick[idx] = st.machine_label
        if (st.machine_label == MATCH) != bool(label):
            self.pickup += 1

        feats = self.token_features[idx]
        self.stats.update(feats, label)
        # propagate a pseudo-observation to every unverified pair sharing a
        # feature with the newly labeled pair
        candidates = set()
        for f in feats:
            candidates |= self._feature_index[f]
        w = self.config.risk.feature_weight
        for i in candidates:
            if i in self.verified:
                continue
            target_seen = self.stats.seen_subset(self.token_features[i])
            obs = generate_observation(target_seen, feats, label, self.stats, w)
            if obs is not None:
                self.states[i].observations.add(obs)

        if self.config.strategy == "actl":
            self._train_X.append(self.features[idx])
            self._train_y.append(label)
            self._retrain()
        self._offered = None
        self._record_metrics()

    def _retrain(self):
        y = np.array(self._train_y)
        if len(np.unique(y)) < 2:
            return
        X = np.array(self._train_X)
        hyper = TrainConfig(seed=self.config.seed)
        model = train(X, y, hyper)
        platt = platt_fit(model.decision(X), y)
        self.clf = CalibratedClassifier(model=model, platt=platt,
                                        feature_config=self.clf.feature_config)
        mu0 = platt.prob(model.decision(self.features))
        self.mu0 = mu0
        for i, st in enumerate(self.states):
            if i in self.verified:
                continue
            st.mu0 = float(mu0[i])
            st.machine_label = MATCH if mu0[i] >= 0.5 else UNMATCH

    # -- metrics ------------------------------------------------------------

    def combined_labels(self):
        """Human labels override machine labels."""
        out = np.array([st.machine_label == MATCH for st in self.states])
        for i, lab in self.verified.items():
            out[i] = bool(lab)
        return out

    def metrics(self):
        if self.gold is None:
            return None
        gold_flags = np.array([self.gold.is_match(p) for p in self.workload.pairs])
        return prf1(self.combined_labels(), gold_flags)

    def _record_metrics(self):
        self.report.pickup_curve.append((self.consumed, self.pickup))
        entry = {"budget": self.consumed, "pickup": self.pickup}
        m = self.metrics()
        if m is not None:
            p, r, f1 = m
            self.report.quality_curve.append((self.consumed, p, r, f1))
            entry.update(precision=p, recall=r, f1=f1)
        self.report.iterations.append(entry)

    # -- driving ------------------------------------------------------------

    def run(self, oracle):
        """Consume the whole budget with the given labeler callable."""
        while not self.complete:
            batch = self.ranking()[: self.config.batch_size]
            remaining = self.config.budget - self.consumed
            for i in batch[:remaining]:
                pair = self.workload.pairs[i]
                self.apply_label(pair.pair_id, int(oracle(pair)))
        return self


def pickup_count(session: VerificationSession) -> int:
    """Machine-mislabeled pairs among the manually verified set."""
    count = 0
    for i, lab in session.verified.items():
        if (session.machine_at_pick[i] == MATCH) != bool(lab):
            count += 1
    return count


def oracle_from_gold(gold: GoldStandard):
    return lambda pair: int(gold.is_match(pair))


def run_session(workload, clf, gold, config: SessionConfig,
                features=None, train_indices=None, train_labels=None):
    """Run a full oracle-labeled session and return (session, report)."""
    session = VerificationSession(workload, clf, config, gold=gold, features=features,
                                  train_indices=train_indices, train_labels=train_labels)
    if config.budget > 0:
        session.run(oracle_from_gold(gold))
    return session, session.report
