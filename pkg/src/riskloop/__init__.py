"""Risk-prioritized human verification for machine-based entity resolution."""

from .classifier import (CalibratedClassifier, FeatureConfig, LinearModel,
                         PlattParams, TrainConfig, active_learn, featurize,
                         featurize_all, jaccard, norm_edit_sim, number_eq,
                         platt_fit, prior_prob, train)
from .ingest import (BlockingConfig, GoldStandard, NoiseConfig, Record,
                     RecordPair, SynthConfig, Workload, block, load_gold,
                     load_records, synth_workload)
from .orchestrator import (MetricReport, SessionConfig, VerificationSession,
                           oracle_from_gold, pickup_count, prf1, run_session)
from .riskengine import (FeatureStatsTable, ObservationSet, PairRiskState,
                         RiskConfig, TokenFeature, base_risk, bayes_update,
                         cvar_risk, cvar_scores, extract_features,
                         feature_expectation, generate_observation,
                         trunc_normal, unct_risk)
from .truncnorm import TruncatedNormal

__version__ = "0.1.0"
