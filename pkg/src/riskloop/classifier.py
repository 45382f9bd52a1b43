"""Similarity features, linear-margin training and Platt-calibrated match priors."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .ingest import RecordPair, Workload
from .text import token_set


class ClassifierError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Similarity metrics (all in [0, 1])
# ---------------------------------------------------------------------------

def jaccard(a, b):
    """Token-set Jaccard similarity; 0 when either side is missing or both empty."""
    if a is None or b is None:
        return 0.0
    ta, tb = token_set(a), token_set(b)
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def _levenshtein(a: str, b: str) -> int:
    # vectorized DP rows; the in-row insertion dependency is resolved with a
    # prefix-min over (tentative - j)
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    bs = np.frombuffer(b.encode("utf-32-le"), dtype=np.uint32)
    js = np.arange(1, len(b) + 1)
    prev = np.arange(len(b) + 1)
    for ch in a:
        cost = (bs != ord(ch)).astype(np.int64)
        tentative = np.minimum(prev[1:] + 1, prev[:-1] + cost)
        row = np.empty(len(b) + 1, dtype=np.int64)
        row[0] = prev[0] + 1
        shifted = np.minimum(tentative, row[0] + js)
        row[1:] = js + np.minimum.accumulate(shifted - js)
        prev = row
    return int(prev[-1])


def norm_edit_sim(a, b):
    """1 - Levenshtein/max-length; both empty -> 1, either missing -> 0."""
    if a is None or b is None:
        return 0.0
    if not a and not b:
        return 1.0
    m = max(len(a), len(b))
    return 1.0 - _levenshtein(a, b) / m


_INT_RE = re.compile(r"\d+")


def number_eq(a, b):
    """1 when the first integer on each side exists and matches, else 0."""
    if a is None or b is None:
        return 0.0
    ma, mb = _INT_RE.search(a), _INT_RE.search(b)
    if ma is None or mb is None:
        return 0.0
    return 1.0 if int(ma.group()) == int(mb.group()) else 0.0


_METRICS = {"jaccard": jaccard, "edit": norm_edit_sim, "numeq": number_eq}


@dataclass
class FeatureConfig:
    """Ordered list of (metric, attribute) similarity features."""
    specs: list  # of (metric name, attribute name)

    def __post_init__(self):
        for metric, _ in self.specs:
            if metric not in _METRICS:
                raise ClassifierError(f"unknown metric {metric!r}")

    @property
    def arity(self):
        return len(self.specs)


def featurize(pair: RecordPair, config: FeatureConfig) -> np.ndarray:
    vals = np.empty(config.arity)
    for i, (metric, attr) in enumerate(config.specs):
        vals[i] = _METRICS[metric](pair.left.get(attr), pair.right.get(attr))
    return vals


def featurize_all(workload: Workload, config: FeatureConfig) -> np.ndarray:
    return np.array([featurize(p, config) for p in workload.pairs])


# ---------------------------------------------------------------------------
# Linear-margin training
# ---------------------------------------------------------------------------

@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float

    def decision(self, X):
        return np.asarray(X) @ self.weights + self.bias


@dataclass
class TrainConfig:
    lam: float = 1e-3     # L2 regularization strength
    epochs: int = 1500
    lr0: float = 2.0
    seed: int = 0


def train(X, y, hyper: TrainConfig | None = None) -> LinearModel:
    """Regularized hinge-loss subgradient descent, deterministic for fixed config.

    y may be given as {0,1} or {-1,+1}.
    """
    hyper = hyper or TrainConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    y = np.where(y > 0, 1.0, -1.0)
    if len(np.unique(y)) < 2:
        raise ClassifierError("training data must contain both classes")
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    for t in range(1, hyper.epochs + 1):
        margins = y * (X @ w + b)
        viol = margins < 1.0
        grad_w = hyper.lam * w - (y[viol, None] * X[viol]).sum(axis=0) / n
        grad_b = -y[viol].sum() / n
        lr = hyper.lr0 / np.sqrt(t)
        w -= lr * grad_w
        b -= lr * grad_b
    return LinearModel(weights=w, bias=b)


# ---------------------------------------------------------------------------
# Platt calibration
# ---------------------------------------------------------------------------

@dataclass
class PlattParams:
    A: float
    B: float

    def prob(self, scores):
        z = self.A * np.asarray(scores, dtype=float) + self.B
        return _sigmoid_neg(z)


def _sigmoid_neg(z):
    # 1 / (1 + exp(z)) without overflow
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = np.exp(-z[pos]) / (1.0 + np.exp(-z[pos]))
    out[~pos] = 1.0 / (1.0 + np.exp(z[~pos]))
    return out


def _platt_objective(scores, targets, a, b):
    z = a * scores + b
    # -sum t*log(p) + (1-t)*log(1-p) with p = 1/(1+e^z), stable form
    return float(np.sum(targets * z + np.logaddexp(0.0, -z)))


def platt_fit(scores, labels, max_iter=200, tol=1e-10, trace=None) -> PlattParams:
    """Fit sigmoid 1/(1+exp(A*s+B)) by damped Newton on smoothed targets.

    Targets follow the standard smoothing t+ = (N+ + 1)/(N+ + 2),
    t- = 1/(N- + 2). The accepted-step objective is non-increasing and the
    returned gradient norm is at most 1e-6.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = labels > 0
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise ClassifierError("platt_fit needs both classes")
    t_hi = (n_pos + 1.0) / (n_pos + 2.0)
    t_lo = 1.0 / (n_neg + 2.0)
    targets = np.where(pos, t_hi, t_lo)

    a = 0.0
    b = np.log((n_neg + 1.0) / (n_pos + 1.0))
    obj = _platt_objective(scores, targets, a, b)
    if trace is not None:
        trace.append(obj)
    sigma = 1e-12  # Hessian damping
    for _ in range(max_iter):
        z = a * scores + b
        p = _sigmoid_neg(z)
        d1 = targets - p                      # dObj/dz per point (negated)
        g_a = float(np.dot(scores, d1))
        g_b = float(np.sum(d1))
        if max(abs(g_a), abs(g_b)) < 1e-7:
            break
        d2 = p * (1.0 - p)
        h11 = float(np.dot(scores * scores, d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h12 = float(np.dot(scores, d2))
        det = h11 * h22 - h12 * h12
        if det <= 0:
            break
        # Newton direction for minimizing the NLL
        da = (h22 * g_a - h12 * g_b) / det
        db = (h11 * g_b - h12 * g_a) / det
        step = 1.0
        improved = False
        for _ in range(40):
            na, nb = a - step * da, b - step * db
            new_obj = _platt_objective(scores, targets, na, nb)
            if new_obj <= obj + 1e-12:
                a, b, obj = na, nb, new_obj
                if trace is not None:
                    trace.append(obj)
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        if abs(step * da) < tol and abs(step * db) < tol:
            break
    return PlattParams(A=a, B=b)


@dataclass
class CalibratedClassifier:
    model: LinearModel
    platt: PlattParams
    feature_config: FeatureConfig

    def decision(self, X):
        return self.model.decision(X)

    def prior_prob(self, X):
        """Calibrated match prior; the machine label is match iff prob >= 0.5."""
        return self.platt.prob(self.model.decision(X))

    def prior_prob_pair(self, pair: RecordPair) -> float:
        v = featurize(pair, self.feature_config)
        return float(self.platt.prob(np.array([self.model.decision(v)]))[0])


def prior_prob(clf: CalibratedClassifier, v) -> float:
    return float(clf.platt.prob(np.atleast_1d(clf.model.decision(np.asarray(v))))[0])


# ---------------------------------------------------------------------------
# Model serialization (versioned flat text)
# ---------------------------------------------------------------------------

MODEL_FORMAT_VERSION = 1


def save_model(clf: CalibratedClassifier, path):
    lines = [f"riskloop-model {MODEL_FORMAT_VERSION}"]
    lines.append("features " + ",".join(f"{m}:{a}" for m, a in clf.feature_config.specs))
    lines.append("weights " + " ".join(repr(float(w)) for w in clf.model.weights))
    lines.append(f"bias {clf.model.bias!r}")
    lines.append(f"platt {clf.platt.A!r} {clf.platt.B!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> CalibratedClassifier:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    tag, version = lines[0].split()
    if tag != "riskloop-model" or int(version) != MODEL_FORMAT_VERSION:
        raise ClassifierError(f"unsupported model file: {lines[0]!r}")
    fields = dict(ln.split(" ", 1) for ln in lines[1:])
    specs = [tuple(item.split(":", 1)) for item in fields["features"].split(",")]
    weights = np.array([float(x) for x in fields["weights"].split()])
    bias = float(fields["bias"])
    a_str, b_str = fields["platt"].split()
    return CalibratedClassifier(
        model=LinearModel(weights=weights, bias=bias),
        platt=PlattParams(A=float(a_str), B=float(b_str)),
        feature_config=FeatureConfig(specs),
    )


# ---------------------------------------------------------------------------
# Active learning
# ---------------------------------------------------------------------------

@dataclass
class ActiveLearnResult:
    classifier: CalibratedClassifier
    train_indices: list
    train_labels: list


def active_learn(workload: Workload, oracle, budget, feature_config: FeatureConfig,
                 hyper: TrainConfig | None = None, features: np.ndarray | None = None,
                 seed_size=None) -> ActiveLearnResult:
    """Margin-based acquisition: label a random seed, then repeatedly query the
    unlabeled pair closest to the hyperplane until the budget is spent.

    Consumes exactly `budget` oracle calls; the final model is Platt-calibrated
    on the accumulated training set.
    """
    hyper = hyper or TrainConfig()
    n = len(workload.pairs)
    if budget < 1 or budget > n:
        raise ClassifierError("budget must be between 1 and the workload size")
    X = features if features is not None else featurize_all(workload, feature_config)
    rng = np.random.default_rng(hyper.seed)

    if seed_size is None:
        seed_size = max(20, budget // 10)
    seed_size = min(seed_size, budget)

    labels = {}
    for attempt in range(200):
        candidate = sorted(rng.choice(n, size=seed_size, replace=False).tolist())
        got = {i: int(oracle(workload.pairs[i])) for i in candidate}
        if len(set(got.values())) == 2 or seed_size >= n:
            labels = got
            break
    else:
        raise ClassifierError("could not draw a two-class seed sample")

    def fit_current():
        idx = sorted(labels)
        return train(X[idx], np.array([labels[i] for i in idx]), hyper), idx

    model, idx = fit_current()
    while len(labels) < budget:
        unl = np.array([i for i in range(n) if i not in labels])
        dist = np.abs(model.decision(X[unl]))
        # ties by pair_id for determinism
        order = sorted(range(len(unl)), key=lambda j: (dist[j], workload.pairs[unl[j]].pair_id))
        pick = int(unl[order[0]])
        labels[pick] = int(oracle(workload.pairs[pick]))
        model, idx = fit_current()

    y = np.array([labels[i] for i in idx])
    platt = platt_fit(model.decision(X[idx]), y)
    clf = CalibratedClassifier(model=model, platt=platt, feature_config=feature_config)
    return ActiveLearnResult(classifier=clf, train_indices=idx, train_labels=y.tolist())
