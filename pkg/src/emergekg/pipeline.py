"""Full pipeline orchestration with cached, checksummed stage artifacts.

Stages run in order (fetch, corpus, train, associate, type, card, pca);
each reads only files produced by earlier stages, and everything lands
under ``<cache_dir>/<config-hash>/`` together with a manifest recording the
configuration, per-stage inputs/outputs and artifact checksums.  Re-running
with the same configuration and fixtures reproduces the files bit for bit
(workers=1).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import corpus as corpus_mod
from . import kgraph, ner, projection, typeinfer, wordnet
from .corpus import TargetEntity
from .embedding import AssociationResult, EmbeddingModel, Hyperparameters, top_k_associated, train
from .errors import ConfigError, StageError

log = logging.getLogger(__name__)

VARIANTS = ("extended", "enhanced")


@dataclass(frozen=True)
class PipelineConfig:
    query: str
    n: int = 8
    corpus_variant: str = "enhanced"  # corpus the embedding trains on
    type_corpus_variant: str = "extended"  # corpus the type entailment reads
    k: int = 10
    m: int = 3
    hyper: Hyperparameters = field(default_factory=Hyperparameters)
    fixture_dir: Optional[str] = None
    cache_dir: str = "cache"
    seed: int = 1
    live: bool = False
    target_type_hint: Optional[str] = None

    def __post_init__(self):
        if not self.query.strip():
            raise ConfigError("query must not be empty")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.m < 1:
            raise ConfigError("m must be >= 1")
        if self.corpus_variant not in VARIANTS or self.type_corpus_variant not in VARIANTS:
            raise ConfigError(f"corpus variants must be one of {VARIANTS}")

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        data = dict(data)
        hyper = data.pop("hyper", {})
        if isinstance(hyper, dict):
            try:
                hyper = Hyperparameters(**hyper)
            except TypeError as exc:
                raise ConfigError(f"bad hyperparameter field: {exc}") from exc
        try:
            return cls(hyper=hyper, **data)
        except TypeError as exc:
            raise ConfigError(f"bad configuration field: {exc}") from exc

    def semantic_dict(self) -> dict:
        """Every field that influences pipeline output (cache_dir does not)."""
        d = dataclasses.asdict(self)
        d.pop("cache_dir")
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.semantic_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def association_payload(target: TargetEntity, k: int, results: list[AssociationResult]) -> dict:
    return {
        "target": target.surface,
        "k": k,
        "associations": [
            {
                "entity": r.entity,
                "surface": ner.defuse(r.entity),
                "type": r.coarse_type,
                "score": r.score,
            }
            for r in results
        ],
    }


def type_payload(target: TargetEntity, m: int, result: typeinfer.TypeResult) -> dict:
    return {
        "target": target.surface,
        "m": m,
        "status": "ok" if result else "no type entailed",
        "types": [{"term": term, "score": score} for term, score in result.types],
    }


@dataclass
class PipelineResult:
    run_dir: str
    manifest: dict

    def artifact_path(self, name: str, variant: Optional[str] = None) -> str:
        entry = self.manifest["artifacts"][name]
        if isinstance(entry, dict):
            entry = entry[variant or "extended"]
        return os.path.join(self.run_dir, entry)


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    """Execute every stage and write the manifest; see the module docstring.

    Raises :class:`ConfigError` before any work when the configuration is
    unusable, and :class:`StageError` (partial outputs retained) when a
    stage fails.
    """
    if not cfg.live:
        if cfg.fixture_dir is None:
            raise ConfigError("offline mode requires fixture_dir (or pass live=True)")
        if not os.path.isdir(cfg.fixture_dir):
            raise ConfigError(f"fixture_dir does not exist: {cfg.fixture_dir}")
    hyper = dataclasses.replace(cfg.hyper, seed=cfg.seed)
    target = TargetEntity.from_surface(cfg.query, cfg.target_type_hint)
    run_dir = os.path.join(cfg.cache_dir, cfg.config_hash()[:16])
    os.makedirs(run_dir, exist_ok=True)

    stages: list[dict] = []

    def run_stage(name: str, inputs: list[str], outputs: list[str], fn):
        log.info("stage %s", name)
        try:
            result = fn()
        except Exception as exc:
            raise StageError(name, exc) from exc
        stages.append({"name": name, "inputs": inputs, "outputs": outputs})
        return result

    p = lambda rel: os.path.join(run_dir, rel)  # noqa: E731

    # fetch
    def do_fetch():
        if cfg.live:
            client = corpus_mod.LiveSearchClient()
        else:
            client = corpus_mod.FixtureSearchClient(cfg.fixture_dir)
        snippets = corpus_mod.fetch_snippets(cfg.query, cfg.n, client)
        payload = [
            {"rank": s.rank, "title": s.title, "body": s.body, "url": s.url} for s in snippets
        ]
        _write_json(p("snippets.json"), payload)
        return snippets

    snippets = run_stage("fetch", [], ["snippets.json"], do_fetch)

    # corpus: extend, preprocess, recognize, fuse, build both variants
    def do_corpus():
        if cfg.live:
            fetcher = corpus_mod.LivePageFetcher()
        else:
            fetcher = corpus_mod.FixturePageFetcher(cfg.fixture_dir)
        stopwords = corpus_mod.load_stopwords()
        docs = corpus_mod.extend_snippets(snippets, fetcher, max_workers=hyper.workers)
        docs = [corpus_mod.preprocess(d, stopwords) for d in docs]
        if cfg.live:
            backend = ner.HeuristicBackend()
        else:
            backend = ner.AnnotationFileBackend(os.path.join(cfg.fixture_dir, "annotations"))
        inventory = ner.recognize_corpus_docs(docs, backend, target)
        ner.save_inventory(inventory, p("inventory.json"))
        extended = ner.transform_corpus(corpus_mod.build_extended_corpus(docs, target), inventory)
        enhanced = ner.transform_corpus(corpus_mod.build_enhanced_corpus(docs, target), inventory)
        corpus_mod.write_corpus_file(extended, p("corpus_extended.txt"))
        corpus_mod.write_corpus_file(enhanced, p("corpus_enhanced.txt"))

    run_stage(
        "corpus",
        ["snippets.json"],
        ["corpus_extended.txt", "corpus_enhanced.txt", "inventory.json"],
        do_corpus,
    )

    train_corpus_file = f"corpus_{cfg.corpus_variant}.txt"
    type_corpus_file = f"corpus_{cfg.type_corpus_variant}.txt"

    # train
    def do_train():
        c = corpus_mod.corpus_from_cache(p(train_corpus_file), target)
        model = train(c, hyper)
        model.save(p("model.txt"))
        return model

    model = run_stage("train", [train_corpus_file], ["model.txt"], do_train)

    # associate
    def do_associate():
        inventory = ner.load_inventory(p("inventory.json"))
        results = top_k_associated(model, target, inventory, cfg.k)
        _write_json(p("associations.json"), association_payload(target, cfg.k, results))

    run_stage("associate", ["model.txt", "inventory.json"], ["associations.json"], do_associate)

    # type
    def do_type():
        inventory = ner.load_inventory(p("inventory.json"))
        c = corpus_mod.corpus_from_cache(p(type_corpus_file), target)
        lexicon = wordnet.NounLexicon.load()
        result = typeinfer.entail_types(c, inventory, cfg.m, lexicon)
        _write_json(p("types.json"), type_payload(target, cfg.m, result))

    run_stage("type", [type_corpus_file, "inventory.json"], ["types.json"], do_type)

    # card
    def do_card():
        with open(p("types.json"), encoding="utf-8") as fh:
            types = [t["term"] for t in json.load(fh)["types"]]
        with open(p("associations.json"), encoding="utf-8") as fh:
            assoc = [
                AssociationResult(a["entity"], a["type"], a["score"])
                for a in json.load(fh)["associations"]
            ]
        triples = kgraph.build_type_triples(target, types) + kgraph.build_association_triples(
            target, assoc
        )
        with open(p("card.ttl"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(kgraph.serialize_turtle(triples))

    run_stage("card", ["types.json", "associations.json"], ["card.ttl"], do_card)

    # pca
    def do_pca():
        inventory = ner.load_inventory(p("inventory.json"))
        loaded = EmbeddingModel.load(p("model.txt"))
        target_type = cfg.target_type_hint or ner.PERSON
        labels = [(target.fused_token, target_type)]
        labels += [
            (fused, inventory.coarse_type_of(fused))
            for fused in inventory.entity_tokens()
            if fused != target.fused_token and fused in loaded.vocab
        ]
        vectors = np.stack([loaded.vector(tok) for tok, _ in labels])
        points, _ = projection.pca_project(vectors, labels)
        projection.write_pca_csv(points, p("pca.csv"))

    run_stage("pca", ["model.txt", "inventory.json"], ["pca.csv"], do_pca)

    artifacts = {
        "corpus": {"extended": "corpus_extended.txt", "enhanced": "corpus_enhanced.txt"},
        "model": "model.txt",
        "associations": "associations.json",
        "types": "types.json",
        "card": "card.ttl",
        "pca": "pca.csv",
    }
    files = sorted({f for st in stages for f in st["outputs"]})
    manifest = {
        "config": cfg.semantic_dict(),
        "config_hash": cfg.config_hash(),
        "artifacts": artifacts,
        "stages": stages,
        "checksums": {f: _sha256(p(f)) for f in files},
    }
    _write_json(p("manifest.json"), manifest)
    return PipelineResult(run_dir=run_dir, manifest=manifest)
