"""Command line interface.

Subcommands mirror the pipeline stages (fetch, corpus, train, associate,
type, pca, card, eval) plus ``pipeline`` for the whole run.  Every
subcommand accepts ``--config <file>`` (TOML or JSON) whose keys match the
flags; explicit flags win.  Exit codes: 0 success, 1 user error, 2
pipeline failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from typing import Optional

import numpy as np

from . import corpus as corpus_mod
from . import kgraph, ner, pipeline, projection, typeinfer, wordnet
from .corpus import TargetEntity
from .embedding import AssociationResult, EmbeddingModel, Hyperparameters, top_k_associated, train
from .errors import ConfigError, EmergeKGError, StageError
from .evaluation import GroundTruthCard, aggregate, evaluate

log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # user error must exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_config_file(path: str) -> dict:
    with open(path, "rb") as fh:
        if path.endswith(".toml"):
            try:
                import tomllib
            except ModuleNotFoundError:
                import tomli as tomllib
            return tomllib.load(fh)
        return json.load(fh)


def _merge_config(args: argparse.Namespace, keys: list[str]) -> dict:
    """File values first, explicit CLI flags override."""
    merged = {}
    if getattr(args, "config", None):
        file_cfg = _load_config_file(args.config)
        merged.update({k: v for k, v in file_cfg.items() if k in keys or k == "hyper"})
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    return merged


def _hyper_from_args(args: argparse.Namespace, base: Optional[dict] = None) -> Hyperparameters:
    fields = dict(base or {})
    for name in ("window", "min_count", "workers", "dims", "epochs", "seed"):
        v = getattr(args, name, None)
        if v is not None:
            fields[name] = v
    return Hyperparameters(**fields)


def _target_from(args: argparse.Namespace) -> TargetEntity:
    return TargetEntity.from_surface(args.target, getattr(args, "target_type", None))


def _client_and_fetcher(args: argparse.Namespace):
    if getattr(args, "live", False):
        return corpus_mod.LiveSearchClient(), corpus_mod.LivePageFetcher()
    if not args.fixtures:
        raise ConfigError("offline mode requires --fixtures (or pass --live)")
    return corpus_mod.FixtureSearchClient(args.fixtures), corpus_mod.FixturePageFetcher(args.fixtures)


def _build_docs(args: argparse.Namespace, query: str, n: int):
    client, fetcher = _client_and_fetcher(args)
    snippets = corpus_mod.fetch_snippets(query, n, client)
    stopwords = corpus_mod.load_stopwords(getattr(args, "stopwords", None))
    docs = corpus_mod.extend_snippets(snippets, fetcher)
    return snippets, [corpus_mod.preprocess(d, stopwords) for d in docs]


# --------------------------------------------------------------------------
# subcommands


def cmd_fetch(args) -> int:
    client, _ = _client_and_fetcher(args)
    snippets = corpus_mod.fetch_snippets(args.query, args.n, client)
    payload = [{"rank": s.rank, "title": s.title, "body": s.body, "url": s.url} for s in snippets]
    text = json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {len(snippets)} snippets to {args.out}")
    else:
        print(text, end="")
    return 0


def cmd_corpus(args) -> int:
    target = _target_from_query(args)
    _, docs = _build_docs(args, args.query, args.n)
    if args.mode == "extended":
        c = corpus_mod.build_extended_corpus(docs, target)
    else:
        c = corpus_mod.build_enhanced_corpus(docs, target)
    if args.annotations:
        backend = ner.AnnotationFileBackend(args.annotations)
    else:
        backend = ner.HeuristicBackend()
    inventory = ner.recognize_corpus_docs(docs, backend, target)
    c = ner.transform_corpus(c, inventory)
    corpus_mod.write_corpus_file(c, args.out)
    if args.entities_out:
        ner.save_inventory(inventory, args.entities_out)
    print(f"wrote {args.mode} corpus ({len(c)} documents) to {args.out}")
    return 0


def _target_from_query(args) -> TargetEntity:
    return TargetEntity.from_surface(args.query, getattr(args, "target_type", None))


def cmd_train(args) -> int:
    merged = _merge_config(args, [])
    hyper = _hyper_from_args(args, merged.get("hyper"))
    # without --target the required-token check is skipped and training
    # runs over the raw cache contents
    target = TargetEntity.from_surface(args.target) if args.target else None
    sentences = [tokens for _, tokens in corpus_mod.read_corpus_file(args.corpus)]
    from .embedding import train_sentences

    model = train_sentences(sentences, hyper, required_token=target.fused_token if target else None)
    model.save(args.out)
    print(f"trained {len(model.vocab)} x {hyper.dims} model -> {args.out}")
    return 0


def _default_inventory_path(model_path: str) -> Optional[str]:
    sibling = os.path.join(os.path.dirname(model_path) or ".", "inventory.json")
    return sibling if os.path.exists(sibling) else None


def cmd_associate(args) -> int:
    model = EmbeddingModel.load(args.model)
    entities = args.entities or _default_inventory_path(args.model)
    if not entities:
        raise ConfigError("--entities inventory file required (none found beside the model)")
    inventory = ner.load_inventory(entities)
    target = _target_from(args)
    results = top_k_associated(model, target, inventory, args.k)
    payload = pipeline.association_payload(target, args.k, results)
    if args.format == "json":
        text = json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    else:
        rows = ["entity\ttype\tscore"]
        rows += [f"{r.entity}\t{r.coarse_type}\t{r.score!r}" for r in results]
        text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def cmd_type(args) -> int:
    target = _target_from_query(args) if args.query else TargetEntity.from_surface("unknown")
    lexicon = wordnet.NounLexicon.load(args.lexicon)
    if args.fixtures:
        # rebuild documents from fixtures so mention spans are exact
        _, docs = _build_docs(args, args.query or "unknown", args.n)
        backend = (
            ner.AnnotationFileBackend(args.annotations)
            if args.annotations
            else ner.AnnotationFileBackend(os.path.join(args.fixtures, "annotations"))
        )
        inventory = ner.recognize_corpus_docs(docs, backend, target if args.query else None)
        if args.corpus_variant == "enhanced":
            c = corpus_mod.build_enhanced_corpus(docs, target)
        else:
            c = corpus_mod.build_extended_corpus(docs, target)
    elif args.corpus and args.entities:
        inventory = ner.load_inventory(args.entities)
        c = corpus_mod.corpus_from_cache(args.corpus, target)
    else:
        raise ConfigError("need either --fixtures or both --corpus and --entities")
    stopwords = corpus_mod.load_stopwords(args.stopwords) if args.stopwords else None
    result = typeinfer.entail_types(c, inventory, args.m, lexicon, stopwords)
    payload = pipeline.type_payload(target, args.m, result)
    text = json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def cmd_pca(args) -> int:
    model = EmbeddingModel.load(args.model)
    inventory = ner.load_inventory(args.entities)
    labels = []
    if args.target:
        target = _target_from(args)
        if target.fused_token in model.vocab:
            labels.append((target.fused_token, args.target_type or ner.PERSON))
    labels += [
        (fused, inventory.coarse_type_of(fused))
        for fused in inventory.entity_tokens()
        if fused in model.vocab and all(fused != l[0] for l in labels)
    ]
    vectors = np.stack([model.vector(tok) for tok, _ in labels])
    points, explained = projection.pca_project(vectors, labels)
    projection.write_pca_csv(points, args.out)
    print(f"wrote {len(points)} points to {args.out} (explained variance {explained[0]:.4g}, {explained[1]:.4g})")
    return 0


def cmd_card(args) -> int:
    target = _target_from(args)
    with open(args.types, encoding="utf-8") as fh:
        terms = [t["term"] for t in json.load(fh)["types"]]
    with open(args.associations, encoding="utf-8") as fh:
        assoc = [
            AssociationResult(a["entity"], a["type"], a["score"])
            for a in json.load(fh)["associations"]
        ]
    triples = kgraph.build_type_triples(target, terms) + kgraph.build_association_triples(target, assoc)
    text = kgraph.serialize_turtle(triples)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(f"wrote {len(triples)} triples to {args.out}")
    return 0


def cmd_eval(args) -> int:
    with open(args.entailed, encoding="utf-8") as fh:
        payload = json.load(fh)
    entailed = [a["entity"] for a in payload["associations"]]
    k = args.k or payload.get("k") or len(entailed)
    with open(args.truth, encoding="utf-8") as fh:
        truth_raw = json.load(fh)
    cards = truth_raw if isinstance(truth_raw, list) else [truth_raw]
    reports = []
    for card in cards:
        truth = GroundTruthCard.create(card["entity"], card["card"])
        reports.append(evaluate(entailed, truth, k=k))
    print(
        "note: ratio_over_k = overlap/k and ratio_over_card = overlap/|card| are "
        "reported raw; mapping them onto precision/recall is left to the reader."
    )
    for card, r in zip(cards, reports):
        print(
            f"{card['entity']}: overlap={r.overlap} k={r.retrieved_k} card={r.card_size} "
            f"ratio_over_k={r.ratio_over_k:.2f} ratio_over_card={r.ratio_over_card:.2f} f1={r.f1:.2f}"
        )
    if len(reports) > 1:
        mean = aggregate(reports).rounded()
        print(f"average: ratio_over_k={mean['ratio_over_k']:.2f} ratio_over_card={mean['ratio_over_card']:.2f} f1={mean['f1']:.2f}")
    return 0


def cmd_pipeline(args) -> int:
    keys = [
        "query",
        "n",
        "corpus_variant",
        "type_corpus_variant",
        "k",
        "m",
        "fixture_dir",
        "cache_dir",
        "seed",
        "live",
        "target_type_hint",
    ]
    merged = _merge_config(args, keys)
    merged["hyper"] = dataclasses.asdict(_hyper_from_args(args, merged.get("hyper")))
    if "seed" in merged:
        merged["hyper"]["seed"] = merged["seed"]
    if merged.get("live") is None:
        merged.pop("live", None)
    if "query" not in merged:
        raise ConfigError("--query is required (flag or config file)")
    cfg = pipeline.PipelineConfig.from_dict(merged)
    result = pipeline.run_pipeline(cfg)
    print(f"pipeline complete: {result.run_dir}")
    for name, entry in result.manifest["artifacts"].items():
        if isinstance(entry, dict):
            for variant, rel in entry.items():
                print(f"  {name} ({variant}): {os.path.join(result.run_dir, rel)}")
        else:
            print(f"  {name}: {os.path.join(result.run_dir, entry)}")
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="emergekg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help, parents=[], formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        sp.set_defaults(fn=fn)
        sp.add_argument("--config", help="TOML or JSON config file; flags override")
        return sp

    sp = add("fetch", cmd_fetch, "fetch ranked snippets")
    sp.add_argument("--query", required=True)
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--fixtures", help="fixture directory (offline mode)")
    sp.add_argument("--live", action="store_true", help="use the live search adapter")
    sp.add_argument("--out", help="output JSON file (stdout when omitted)")

    sp = add("corpus", cmd_corpus, "build a fused corpus file")
    sp.add_argument("--query", required=True)
    sp.add_argument("--mode", choices=["extended", "enhanced"], default="enhanced")
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--fixtures")
    sp.add_argument("--live", action="store_true")
    sp.add_argument("--annotations", help="annotation dir (heuristic recognizer when omitted)")
    sp.add_argument("--stopwords", help="stop-word list override")
    sp.add_argument("--target-type", choices=list(ner.COARSE_TYPES))
    sp.add_argument("--out", required=True)
    sp.add_argument("--entities-out", help="also write the entity inventory JSON here")

    sp = add("train", cmd_train, "train entity embeddings on a corpus file")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--target", help="target surface; verifies its fused token is in vocabulary")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--window", type=int)
    sp.add_argument("--min-count", dest="min_count", type=int)
    sp.add_argument("--dims", type=int)
    sp.add_argument("--epochs", type=int)

    sp = add("associate", cmd_associate, "rank associated entities by cosine similarity")
    sp.add_argument("--model", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--target-type", choices=list(ner.COARSE_TYPES))
    sp.add_argument("--k", type=int, default=10)
    sp.add_argument("--entities", help="inventory JSON (defaults to inventory.json beside the model)")
    sp.add_argument("--format", choices=["json", "tsv"], default="json")
    sp.add_argument("--out")

    sp = add("type", cmd_type, "entail fine-grained types")
    sp.add_argument("--corpus", help="corpus cache file (pair with --entities)")
    sp.add_argument("--entities", help="inventory JSON for pruning")
    sp.add_argument("--fixtures", help="rebuild documents from a fixture dir instead")
    sp.add_argument("--annotations", help="annotation dir (fixture mode)")
    sp.add_argument("--query", help="target surface (fixture mode)")
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--corpus-variant", choices=["extended", "enhanced"], default="extended")
    sp.add_argument("--lexicon", help="WordNet dict directory (bundled mini lexicon by default)")
    sp.add_argument("--stopwords")
    sp.add_argument("--format", choices=["json"], default="json")
    sp.add_argument("--out")

    sp = add("pca", cmd_pca, "project entity vectors to 2D")
    sp.add_argument("--model", required=True)
    sp.add_argument("--entities", required=True, help="inventory JSON listing the entities to project")
    sp.add_argument("--target", help="include this surface's fused token first")
    sp.add_argument("--target-type", choices=list(ner.COARSE_TYPES))
    sp.add_argument("--out", required=True)

    sp = add("card", cmd_card, "serialize the knowledge card as Turtle")
    sp.add_argument("--target", required=True)
    sp.add_argument("--types", required=True, help="types JSON artifact")
    sp.add_argument("--associations", required=True, help="associations JSON artifact")
    sp.add_argument("--out", required=True)

    sp = add("eval", cmd_eval, "score an association list against a ground-truth card")
    sp.add_argument("--entailed", required=True, help="associations JSON artifact")
    sp.add_argument("--truth", required=True, help='{"entity": ..., "card": [...]} (or a list of them)')
    sp.add_argument("--k", type=int)

    sp = add("pipeline", cmd_pipeline, "run every stage and write a manifest")
    sp.add_argument("--query")
    sp.add_argument("--n", type=int)
    sp.add_argument("--corpus-variant", dest="corpus_variant", choices=["extended", "enhanced"])
    sp.add_argument("--type-corpus-variant", dest="type_corpus_variant", choices=["extended", "enhanced"])
    sp.add_argument("--k", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--fixtures", dest="fixture_dir")
    sp.add_argument("--cache-dir", dest="cache_dir")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--dims", type=int)
    sp.add_argument("--epochs", type=int)
    sp.add_argument("--live", action="store_true", default=None)
    sp.add_argument("--target-type", dest="target_type_hint", choices=list(ner.COARSE_TYPES))

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=os.environ.get("EMERGEKG_LOG", "WARNING"))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except StageError as exc:
        print(f"emergekg: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, FileNotFoundError) as exc:
        print(f"emergekg: {exc}", file=sys.stderr)
        return 1
    except EmergeKGError as exc:
        print(f"emergekg: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"emergekg: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
