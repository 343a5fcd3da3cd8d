"""emergekg: capture knowledge of emerging entities from ranked search snippets.

Pipeline: fetch ranked snippets, extend them with page text, build the
extended and rank-weighted enhanced corpora, recognize and fuse named
entities, train skip-gram entity embeddings, entail associated entities and
fine-grained types, and emit a Turtle knowledge card plus 2D projection data.
"""

__version__ = "0.1.0"

from .backend import active_backend
from .corpus import (
    Corpus,
    CorpusVariant,
    ExtendedDocument,
    Snippet,
    TargetEntity,
    build_enhanced_corpus,
    build_extended_corpus,
    fetch_snippets,
    preprocess,
)
from .embedding import EmbeddingModel, Hyperparameters, cosine, top_k_associated, train
from .evaluation import EvalReport, GroundTruthCard, aggregate, evaluate
from .kgraph import Triple, build_association_triples, build_type_triples, parse_turtle, serialize_turtle
from .ner import EntityInventory, EntityMention, fuse_mention, recognize, transform_corpus
from .projection import ProjectedPoint, pca_project
from .typeinfer import TypeResult, entail_types, score_terms

__all__ = [
    "active_backend",
    "Corpus",
    "CorpusVariant",
    "ExtendedDocument",
    "Snippet",
    "TargetEntity",
    "build_enhanced_corpus",
    "build_extended_corpus",
    "fetch_snippets",
    "preprocess",
    "EmbeddingModel",
    "Hyperparameters",
    "cosine",
    "top_k_associated",
    "train",
    "EvalReport",
    "GroundTruthCard",
    "aggregate",
    "evaluate",
    "Triple",
    "build_association_triples",
    "build_type_triples",
    "parse_turtle",
    "serialize_turtle",
    "EntityInventory",
    "EntityMention",
    "fuse_mention",
    "recognize",
    "transform_corpus",
    "ProjectedPoint",
    "pca_project",
    "TypeResult",
    "entail_types",
    "score_terms",
]
