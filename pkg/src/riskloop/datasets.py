"""On-disk dataset directories: record files, gold mapping and run config."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

from .classifier import FeatureConfig
from .ingest import (BlockingConfig, GoldStandard, IngestError, SynthConfig,
                     Workload, block, load_gold, load_records, synth_sources)

CONFIG_NAME = "config.json"


@dataclass
class Dataset:
    workload: Workload
    gold: GoldStandard
    feature_config: FeatureConfig
    config: dict


def load_dataset(path) -> Dataset:
    """Load a dataset directory: config.json + records_{a,b} + gold."""
    cfg_path = os.path.join(path, CONFIG_NAME)
    if not os.path.exists(cfg_path):
        raise IngestError(f"dataset config not found: {cfg_path}")
    with open(cfg_path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    delimiter = cfg.get("delimiter", ",")
    id_column = cfg.get("id_column", "id")
    schema = cfg["schema"]
    records_a = load_records(os.path.join(path, cfg.get("records_a", "records_a.csv")),
                             "A", schema["A"], id_column, delimiter)
    records_b = load_records(os.path.join(path, cfg.get("records_b", "records_b.csv")),
                             "B", schema["B"], id_column, delimiter)
    gold = load_gold(os.path.join(path, cfg.get("gold", "gold.csv")))
    blocking = BlockingConfig(key_attributes=cfg["blocking"]["key_attributes"],
                              df_ceiling=cfg["blocking"].get("df_ceiling", 50))
    workload = block(records_a, records_b, blocking)
    feature_config = FeatureConfig([tuple(spec) for spec in cfg["features"]])
    return Dataset(workload=workload, gold=gold, feature_config=feature_config, config=cfg)


def _write_records(path, records, schema, id_column, delimiter):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow([id_column, *schema])
        for rec in records:
            writer.writerow([rec.id, *(rec.attributes.get(a, "") for a in schema)])


def write_synth_dataset(path, seed: int, n_entities: int,
                        synth_config: SynthConfig | None = None,
                        features=None, train_budget=None):
    """Generate a synthetic dataset directory consumable by load_dataset."""
    synth_config = synth_config or SynthConfig()
    records_a, records_b, gold = synth_sources(seed, n_entities, synth_config)
    os.makedirs(path, exist_ok=True)
    schema = ["name", "descr"]
    _write_records(os.path.join(path, "records_a.csv"), records_a, schema, "id", ",")
    _write_records(os.path.join(path, "records_b.csv"), records_b, schema, "id", ",")
    with open(os.path.join(path, "gold.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["idA", "idB"])
        for ida, idb in sorted(gold.matches):
            writer.writerow([ida, idb])
    cfg = {
        "delimiter": ",",
        "id_column": "id",
        "schema": {"A": schema, "B": schema},
        "blocking": {"key_attributes": ["name"], "df_ceiling": synth_config.df_ceiling},
        "features": features or [["jaccard", "descr"], ["edit", "descr"]],
        "seed": seed,
        "n_entities": n_entities,
    }
    if train_budget is not None:
        cfg["train_budget"] = train_budget
    with open(os.path.join(path, CONFIG_NAME), "w", encoding="utf-8") as fh:
        json.dump(cfg, fh, indent=2)
    return cfg
