"""Bundled desk-scale benchmark scenario.

The synthetic workload pairs a clean source with a noisy copy and groups
entities into families that share most of their description. The benchmark
classifier is deliberately handicapped: it only sees description similarity,
so same-family non-matches crowd the decision boundary and its mistakes
cluster on shared tokens -- exactly the situation the risk engine exploits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifier import FeatureConfig, TrainConfig, active_learn, featurize_all
from .ingest import SynthConfig, synth_workload
from .orchestrator import oracle_from_gold

# similarity features available to the benchmark classifier (description only;
# names stay exclusive to the risk engine's token evidence)
DEGRADED_FEATURES = FeatureConfig([("jaccard", "descr"), ("edit", "descr")])

FULL_FEATURES = FeatureConfig([
    ("jaccard", "name"), ("edit", "name"),
    ("jaccard", "descr"), ("edit", "descr"),
])

N_ENTITIES = 650  # ~2000 blocked pairs with the default family size of 3
TRAIN_FRACTION = 0.05


@dataclass
class Scenario:
    workload: object
    gold: object
    classifier: object
    features: np.ndarray
    train_indices: list
    train_labels: list


def build_scenario(seed: int, n_entities: int = N_ENTITIES,
                   feature_config: FeatureConfig = DEGRADED_FEATURES,
                   train_fraction: float = TRAIN_FRACTION) -> Scenario:
    """Workload + trained (degraded) classifier, deterministic per seed."""
    workload, gold = synth_workload(seed, n_entities, SynthConfig())
    features = featurize_all(workload, feature_config)
    budget = max(40, int(train_fraction * len(workload.pairs)))
    result = active_learn(workload, oracle_from_gold(gold), budget, feature_config,
                          hyper=TrainConfig(seed=seed), features=features)
    return Scenario(workload=workload, gold=gold, classifier=result.classifier,
                    features=features, train_indices=result.train_indices,
                    train_labels=result.train_labels)
