"""Record loading, token blocking and synthetic workload generation."""

from __future__ import annotations

import csv
import string
from dataclasses import dataclass, field

import numpy as np

from .text import token_set


class IngestError(ValueError):
    """Raised on malformed input files or invalid configuration."""


@dataclass(frozen=True)
class Record:
    id: str
    source: str  # "A" or "B"
    attributes: dict  # attribute name -> value; missing values are absent

    def get(self, attr):
        return self.attributes.get(attr)


@dataclass(frozen=True)
class RecordPair:
    pair_id: str
    left: Record   # source A
    right: Record  # source B


@dataclass
class Workload:
    pairs: list
    schema: dict  # source -> attribute list

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


@dataclass
class GoldStandard:
    matches: set  # of (idA, idB)

    def is_match(self, pair: RecordPair) -> bool:
        return (pair.left.id, pair.right.id) in self.matches


@dataclass
class BlockingConfig:
    key_attributes: list
    df_ceiling: int = 50


def make_pair_id(id_a: str, id_b: str) -> str:
    return f"{id_a}|{id_b}"


def load_records(path, source, schema, id_column="id", delimiter=","):
    """Load one source's records from a delimited file with a header row.

    Empty cells become absent attributes. Duplicate ids and missing schema
    columns are rejected with the offending row / column named.
    """
    records = []
    seen_ids = set()
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise IngestError(f"record file not found: {path}")
    with fh:
        reader = csv.DictReader(fh, delimiter=delimiter)
        header = reader.fieldnames or []
        for col in [id_column, *schema]:
            if col not in header:
                raise IngestError(f"{path}: missing column {col!r} in header")
        for rownum, row in enumerate(reader, start=2):
            rid = (row.get(id_column) or "").strip()
            if not rid:
                raise IngestError(f"{path}: row {rownum}: empty id")
            if rid in seen_ids:
                raise IngestError(f"{path}: row {rownum}: duplicate id {rid!r}")
            seen_ids.add(rid)
            attrs = {}
            for col in schema:
                val = row.get(col)
                if val is not None and val != "":
                    attrs[col] = val
            records.append(Record(id=rid, source=source, attributes=attrs))
    return records


def _token_postings(records, key_attributes):
    postings = {}
    for rec in records:
        toks = set()
        for attr in key_attributes:
            toks |= token_set(rec.get(attr))
        for tok in toks:
            postings.setdefault(tok, set()).add(rec.id)
    return postings


def block(records_a, records_b, config: BlockingConfig) -> Workload:
    """Generate candidate pairs sharing at least one qualifying key token.

    A token qualifies when its document frequency stays at or below the
    ceiling in both sources; the ceiling suppresses stopword-like tokens.
    Output is deterministic, sorted by (idA, idB).
    """
    if not records_a or not records_b:
        raise IngestError("both record lists must be nonempty")
    schema_a = _schema_of(records_a)
    schema_b = _schema_of(records_b)
    for attr in config.key_attributes:
        if attr not in schema_a or attr not in schema_b:
            raise IngestError(f"key attribute {attr!r} absent from schema")

    post_a = _token_postings(records_a, config.key_attributes)
    post_b = _token_postings(records_b, config.key_attributes)
    by_id_a = {r.id: r for r in records_a}
    by_id_b = {r.id: r for r in records_b}

    matched = set()
    for tok, ids_a in post_a.items():
        ids_b = post_b.get(tok)
        if ids_b is None:
            continue
        if len(ids_a) > config.df_ceiling or len(ids_b) > config.df_ceiling:
            continue
        for ia in ids_a:
            for ib in ids_b:
                matched.add((ia, ib))

    pairs = [
        RecordPair(make_pair_id(ia, ib), by_id_a[ia], by_id_b[ib])
        for ia, ib in sorted(matched)
    ]
    return Workload(pairs=pairs, schema={"A": list(schema_a), "B": list(schema_b)})


def _schema_of(records):
    schema = []
    seen = set()
    for rec in records:
        for attr in rec.attributes:
            if attr not in seen:
                seen.add(attr)
                schema.append(attr)
    return schema


def load_gold(path) -> GoldStandard:
    """Load a two-column `idA,idB` match mapping; duplicates collapse."""
    matches = set()
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise IngestError(f"gold file not found: {path}")
    with fh:
        reader = csv.reader(fh)
        try:
            next(reader)  # header
        except StopIteration:
            raise IngestError(f"{path}: empty gold file (header required)")
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 or not row[0] or not row[1]:
                raise IngestError(f"{path}: row {rownum}: malformed gold row {row!r}")
            matches.add((row[0], row[1]))
    return GoldStandard(matches=matches)


# ---------------------------------------------------------------------------
# Synthetic workloads
# ---------------------------------------------------------------------------

@dataclass
class NoiseConfig:
    """Token-level perturbation rates applied to the B-side copies."""
    drop: float = 0.0   # probability a token is dropped
    typo: float = 0.0   # probability a token gets one character mutated
    swap: float = 0.0   # probability two adjacent tokens are transposed


@dataclass
class SynthConfig:
    family_size: int = 3        # entities sharing a series token
    model_vocab: int = 3000
    descr_shared: int = 4       # descr tokens shared within a family
    descr_unique: int = 2       # descr tokens specific to the entity
    tight_rate: float = 0.25    # fraction of families whose descr is fully shared
    spec_vocab: int = 24        # small trait vocabulary (colors/sizes/editions)
    spec_per_entity: int = 2
    df_ceiling: int = 8
    noise: NoiseConfig = field(default_factory=lambda: NoiseConfig(drop=0.12, typo=0.18, swap=0.05))


_LETTERS = string.ascii_lowercase


def _rand_word(rng, lo=4, hi=9):
    n = int(rng.integers(lo, hi))
    return "".join(_LETTERS[i] for i in rng.integers(0, 26, size=n))


def _perturb_tokens(tokens, noise: NoiseConfig, rng):
    out = [t for t in tokens if rng.random() >= noise.drop]
    if not out:
        out = list(tokens[:1])
    for i, tok in enumerate(out):
        if rng.random() < noise.typo and len(tok) > 1:
            pos = int(rng.integers(0, len(tok)))
            repl = _LETTERS[int(rng.integers(0, 26))]
            out[i] = tok[:pos] + repl + tok[pos + 1:]
    i = 0
    while i + 1 < len(out):
        if rng.random() < noise.swap:
            out[i], out[i + 1] = out[i + 1], out[i]
            i += 2
        else:
            i += 1
    return out


def synth_sources(seed, n_entities, config: SynthConfig | None = None):
    """Generate clean A-side records, perturbed B-side duplicates and gold.

    Entities are grouped into families that share a series token and most of
    their description, which makes same-family cross pairs genuinely hard to
    separate on description similarity alone.
    """
    if n_entities < 2:
        raise IngestError("n_entities must be >= 2")
    cfg = config or SynthConfig()
    rng = np.random.default_rng(seed)

    n_brands = max(4, n_entities // 12)
    brands = [f"{_rand_word(rng, 5, 8)}co" for _ in range(n_brands)]
    model_vocab = [_rand_word(rng) for _ in range(cfg.model_vocab)]
    descr_vocab = [_rand_word(rng) for _ in range(cfg.model_vocab)]
    spec_vocab = [_rand_word(rng, 3, 6) for _ in range(cfg.spec_vocab)]

    records_a, records_b = [], []
    matches = set()
    n_families = (n_entities + cfg.family_size - 1) // cfg.family_size
    entity = 0
    for fam in range(n_families):
        brand = brands[int(rng.integers(0, n_brands))]
        series = f"{_rand_word(rng, 4, 7)}{fam}"
        # tight families reuse one description for every member, which makes
        # their cross pairs nearly indistinguishable on descr similarity
        tight = rng.random() < cfg.tight_rate
        n_shared = cfg.descr_shared + (cfg.descr_unique if tight else 0)
        fam_descr = [descr_vocab[int(i)] for i in rng.integers(0, len(descr_vocab), n_shared)]
        for _ in range(cfg.family_size):
            if entity >= n_entities:
                break
            model = [model_vocab[int(i)] for i in rng.integers(0, len(model_vocab), 2)]
            spec = [spec_vocab[int(i)] for i in rng.integers(0, len(spec_vocab), cfg.spec_per_entity)]
            serial = f"sn{10000 + entity}"
            name = [brand, series, *model, *spec, serial]
            descr = list(fam_descr)
            if not tight:
                descr += [descr_vocab[int(i)] for i in rng.integers(0, len(descr_vocab), cfg.descr_unique)]
            ida, idb = f"a{entity}", f"b{entity}"
            records_a.append(Record(ida, "A", {"name": " ".join(name), "descr": " ".join(descr)}))
            b_name = _perturb_tokens(name, cfg.noise, rng)
            b_descr = _perturb_tokens(descr, cfg.noise, rng)
            records_b.append(Record(idb, "B", {"name": " ".join(b_name), "descr": " ".join(b_descr)}))
            matches.add((ida, idb))
            entity += 1
    return records_a, records_b, GoldStandard(matches=matches)


def synth_workload(seed, n_entities, config: SynthConfig | None = None):
    """Deterministic desk-scale workload: blocked pairs plus gold standard."""
    cfg = config or SynthConfig()
    records_a, records_b, gold = synth_sources(seed, n_entities, cfg)
    workload = block(records_a, records_b, BlockingConfig(["name"], cfg.df_ceiling))
    return workload, gold
