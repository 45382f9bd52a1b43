"""Mislabeling-risk scoring: token evidence, Bayesian updating and CVaR.

Evidence flows from human-labeled pairs to a target pair through shared
Same/Diff token features: each labeled pair that overlaps the target yields a
pseudo-observation of the target's match probability. Observations are folded
into the classifier prior with a normal-inverse-gamma conjugate update, and
risk is the tail expectation (CVaR) of the resulting truncated normal.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .ingest import RecordPair
from .text import token_set
from .truncnorm import TruncatedNormal

MATCH, UNMATCH = "match", "unmatch"


@dataclass(frozen=True)
class TokenFeature:
    kind: str        # "same" or "diff"
    token: str
    attribute: str


@dataclass
class RiskConfig:
    theta: float = 0.8            # confidence level, shared by prior and CVaR
    feature_weight: float = 1.0
    var_floor: float = 1e-4       # floor on the sample variance
    fallback_var: float = 0.05    # prior-only distribution variance

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie strictly inside (0, 1)")


def extract_features(pair: RecordPair) -> frozenset:
    """Same(t)/Diff(t) token features per attribute, deduplicated."""
    feats = set()
    attrs = set(pair.left.attributes) | set(pair.right.attributes)
    for attr in attrs:
        ta = token_set(pair.left.get(attr))
        tb = token_set(pair.right.get(attr))
        for tok in ta & tb:
            feats.add(TokenFeature("same", tok, attr))
        for tok in ta ^ tb:
            feats.add(TokenFeature("diff", tok, attr))
    return frozenset(feats)


class FeatureStatsTable:
    """Per-feature match/total counts over the human-labeled pairs.

    A feature is "seen" once any labeled pair contains it; unseen features
    carry no information and are excluded from observation generation.
    """

    def __init__(self):
        self._counts = {}  # TokenFeature -> [match_count, total_count]

    def update(self, features, label: int):
        for f in features:
            entry = self._counts.setdefault(f, [0, 0])
            entry[0] += int(label)
            entry[1] += 1

    def seen(self, feature) -> bool:
        return feature in self._counts

    def seen_subset(self, features) -> set:
        return {f for f in features if f in self._counts}

    def expectation(self, feature) -> float:
        entry = self._counts.get(feature)
        if entry is None or entry[1] == 0:
            raise KeyError(f"feature never labeled: {feature}")
        return entry[0] / entry[1]

    def __len__(self):
        return len(self._counts)


def feature_expectation(match_count: int, total_count: int) -> float:
    """Fraction of human-labeled pairs containing the feature that are matches."""
    if total_count <= 0:
        raise ValueError("expectation undefined for an unseen feature")
    return match_count / total_count


def generate_observation(target_features, labeled_features, label: int,
                         stats: FeatureStatsTable, weight: float = 1.0):
    """Pseudo-observation of the target's match probability from one labeled pair.

    target_features must already be restricted to features seen by the stats
    table. Returns None when the labeled pair shares no feature with the
    target (it contributes no observation).
    """
    shared = target_features & labeled_features
    if not shared:
        return None
    missing = target_features - labeled_features
    num = float(label)
    den = 1.0
    for f in missing:
        num += weight * stats.expectation(f)
        den += weight
    return num / den


@dataclass
class ObservationSet:
    """Running observation samples with Welford mean/variance accumulation."""
    samples: list = field(default_factory=list)
    mean: float = 0.0
    _m2: float = 0.0

    @property
    def n(self):
        return len(self.samples)

    @property
    def variance(self):
        """Population variance of the samples (divide by n)."""
        if not self.samples:
            return 0.0
        return self._m2 / len(self.samples)

    @property
    def sum_sq_dev(self):
        return self._m2

    def add(self, value: float):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"observation out of [0,1]: {value}")
        self.samples.append(value)
        delta = value - self.mean
        self.mean += delta / len(self.samples)
        self._m2 += delta * (value - self.mean)


@dataclass
class Posterior:
    mu1: float
    n1: float
    alpha1: float
    beta1: float
    mu_hat: float
    sigma2_hat: float
    prior_only: bool = False


def bayes_update(mu0: float, obs: ObservationSet, theta: float,
                 config: RiskConfig | None = None) -> Posterior:
    """Normal-inverse-gamma conjugate update of the match-probability law.

    The prior pseudo-counts are chosen so a confidence of theta is preserved
    for the classifier prior: n0 = theta*n/(1-theta), alpha0 = (n/2)*theta/(1-theta)+1,
    beta0 = S_n^2 * (alpha0 - 1). With no observations the prior-only fallback
    N(mu0, fallback_var) is returned, flagged.
    """
    cfg = config or RiskConfig(theta=theta)
    n = obs.n
    if n == 0:
        return Posterior(mu1=mu0, n1=0.0, alpha1=float("nan"), beta1=float("nan"),
                         mu_hat=mu0, sigma2_hat=cfg.fallback_var, prior_only=True)
    ratio = theta / (1.0 - theta)
    n0 = ratio * n
    alpha0 = 0.5 * n * ratio + 1.0
    s2 = max(obs.variance, cfg.var_floor)
    beta0 = s2 * (alpha0 - 1.0)
    p_bar = obs.mean
    mu1 = (n0 * mu0 + n * p_bar) / (n0 + n)
    n1 = n0 + n
    alpha1 = alpha0 + 0.5 * n
    beta1 = beta0 + 0.5 * obs.sum_sq_dev + 0.5 * (n0 * n / (n0 + n)) * (mu0 - p_bar) ** 2
    return Posterior(mu1=mu1, n1=n1, alpha1=alpha1, beta1=beta1,
                     mu_hat=mu1, sigma2_hat=beta1 / (alpha1 - 1.0))


@dataclass
class PairRiskState:
    pair_id: str
    machine_label: str
    mu0: float
    features: frozenset = frozenset()
    observations: ObservationSet = field(default_factory=ObservationSet)
    posterior: Posterior | None = None
    risk: float = 0.0


def trunc_normal(mu_hat: float, sigma2_hat: float,
                 config: RiskConfig | None = None) -> TruncatedNormal:
    """The pair's match-probability law: N(mu_hat, sigma2_hat) clipped to [0,1]."""
    cfg = config or RiskConfig()
    if sigma2_hat <= 0:
        sigma2_hat = cfg.var_floor
    return TruncatedNormal(mu_hat, sigma2_hat)


def cvar_scores(mu_hat, sigma2_hat, is_match, theta: float) -> np.ndarray:
    """Vectorized CVaR of mislabeling loss for truncated-normal match laws.

    unmatch-labeled: expected x over the upper 1-theta tail;
    match-labeled: expected 1-x over the lower 1-theta tail.
    """
    mu_hat = np.atleast_1d(np.asarray(mu_hat, dtype=float))
    sigma2 = np.atleast_1d(np.asarray(sigma2_hat, dtype=float))
    is_match = np.atleast_1d(np.asarray(is_match, dtype=bool))
    dist = TruncatedNormal(mu_hat, sigma2)
    q_up = dist.quantile(np.full_like(mu_hat, theta))
    q_lo = dist.quantile(np.full_like(mu_hat, 1.0 - theta))
    upper = dist.upper_tail_mean(q_up)
    lower = dist.lower_tail_mean(q_lo)
    return np.where(is_match, 1.0 - lower, upper)


def cvar_risk(state: PairRiskState, theta: float, config: RiskConfig | None = None) -> float:
    post = state.posterior or bayes_update(state.mu0, state.observations, theta, config)
    return float(cvar_scores(post.mu_hat, post.sigma2_hat, state.machine_label == MATCH, theta)[0])


def base_risk(mu0: float, machine_label: str) -> float:
    """Machine-expectation risk: the prior mass on the opposite label."""
    return 1.0 - mu0 if machine_label == MATCH else mu0


def unct_risk(mu0: float) -> float:
    """Classifier uncertainty, maximal at mu0 = 0.5."""
    return 1.0 - abs(2.0 * mu0 - 1.0)


def dump_diagnostics(states, fh, scorer: str, delimiter=","):
    """One audit row per pair: prior, observation summary, posterior, risk."""
    writer = csv.writer(fh, delimiter=delimiter)
    writer.writerow(["pair_id", "machine_label", "mu0", "n_obs", "p_bar",
                     "mu_hat", "sigma2_hat", "risk", "scorer"])
    for st in states:
        post = st.posterior
        writer.writerow([
            st.pair_id, st.machine_label, f"{st.mu0:.6g}", st.observations.n,
            f"{st.observations.mean:.6g}" if st.observations.n else "",
            f"{post.mu_hat:.6g}" if post else "",
            f"{post.sigma2_hat:.6g}" if post else "",
            f"{st.risk:.6g}", scorer,
        ])
