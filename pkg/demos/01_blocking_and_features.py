"""Walk through ingestion: records, token blocking and pair features.

Generates a tiny synthetic catalog, blocks it into candidate pairs and shows
how the similarity features and the risk engine's token features look for a
matching and a non-matching pair.
"""

from riskloop.classifier import FeatureConfig, featurize
from riskloop.ingest import synth_workload
from riskloop.riskengine import extract_features

workload, gold = synth_workload(seed=1, n_entities=12)
print(f"workload: {len(workload.pairs)} candidate pairs from 12 entities "
      f"({len(gold.matches)} gold matches)\n")

features = FeatureConfig([("jaccard", "name"), ("edit", "name"),
                          ("jaccard", "descr"), ("edit", "descr")])

match = next(p for p in workload.pairs if gold.is_match(p))
nonmatch = next(p for p in workload.pairs if not gold.is_match(p))

for title, pair in (("matching pair", match), ("non-matching pair", nonmatch)):
    print(f"--- {title}: {pair.pair_id}")
    print(f"  A name:  {pair.left.get('name')}")
    print(f"  B name:  {pair.right.get('name')}")
    vec = featurize(pair, features)
    for (metric, attr), v in zip(features.specs, vec):
        print(f"  {metric:>8}({attr}) = {v:.3f}")
    toks = extract_features(pair)
    same = sorted(f.token for f in toks if f.kind == "same")
    print(f"  shared tokens ({len(same)}): {' '.join(same[:8])}"
          + (" ..." if len(same) > 8 else ""))
    print()
