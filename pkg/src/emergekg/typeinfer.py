"""Fine-grained type entailment.

Three stages over the extended corpus: prune every named-entity word, pull
noun and noun-phrase terms out of what is left, and score the terms with a
modified tf-idf (tf is the sum of log(1 + count) over documents, idf is the
raw ratio N/df, and the final score their product).  The top-m terms become
the entity's types.
"""

from __future__ import annotations

import dataclasses
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from .corpus import Corpus, ExtendedDocument, load_stopwords
from .ner import EntityInventory
from .wordnet import NounLexicon


@dataclass(frozen=True)
class TermStats:
    term: str
    per_document_frequency: dict[int, int]  # doc index -> raw count
    tf: float
    df: int
    idf: float
    tfidf: float


@dataclass(frozen=True)
class TypeResult:
    """Entailed types, best first.  Empty means no type could be entailed."""

    types: tuple[tuple[str, float], ...]

    def __bool__(self) -> bool:
        return bool(self.types)

    def terms(self) -> list[str]:
        return [t for t, _ in self.types]


def prune_named_entities(
    c: Corpus, inv: EntityInventory, stopwords: Optional[frozenset[str]] = None
) -> Corpus:
    """Drop every token that is part of any entity mention (by surface
    word, case-insensitive), every fused entity token, and stop-words.
    Applied uniformly to all documents including replicas."""
    if stopwords is None:
        stopwords = load_stopwords()
    removed = set(stopwords)
    for m in inv.mentions:
        removed.update(w.lower() for w in m.surface.split())
    for fused in inv.distinct:
        # defused words equal the mention surface words, so an inventory
        # loaded without mention objects still prunes completely
        removed.add(fused.lower())
        removed.update(w.lower() for w in fused.replace("#", " ").split())

    cache: dict[int, ExtendedDocument] = {}
    new_docs = []
    for doc in c.documents:
        if doc.source_rank not in cache:
            kept = tuple(t for t in doc.tokens if t.text.lower() not in removed)
            cache[doc.source_rank] = dataclasses.replace(doc, tokens=kept)
        new_docs.append(cache[doc.source_rank])
    return dataclasses.replace(c, documents=tuple(new_docs))


def extract_noun_phrases(doc: ExtendedDocument, wordnet: NounLexicon) -> list[str]:
    """Terms of a pruned document, lowercased, with multiplicity.

    A token is a noun candidate when its lowercase or lemmatized form has a
    noun entry.  Maximal runs of noun candidates that are adjacent in the
    raw text (nothing but whitespace between them) form one phrase term;
    each phrase also contributes its head word (the final noun), and
    singleton nouns stand alone.
    """
    terms: list[str] = []
    run: list[str] = []

    def flush():
        if not run:
            return
        if len(run) == 1:
            terms.append(run[0])
        else:
            terms.append(" ".join(run))
            terms.append(run[-1])

    prev_end = None
    for tok in doc.tokens:
        adjacent = prev_end is not None and not doc.raw_text[prev_end : tok.start].strip()
        if wordnet.is_noun(tok.text):
            if run and adjacent:
                run.append(tok.text.lower())
            else:
                flush()
                run = [tok.text.lower()]
        else:
            flush()
            run = []
        prev_end = tok.end
    flush()
    return terms


def score_terms(doc_terms: Sequence[Sequence[str]]) -> list[TermStats]:
    """tf_t = sum over documents of log(1 + f_{t,d}) (natural log),
    idf_t = N / df_t, score = tf_t * idf_t.  Terms absent from every
    document are excluded; output sorted by score descending, ties broken
    lexicographically."""
    N = len(doc_terms)
    if N < 1:
        raise ValueError("need at least one document")
    per_doc: dict[str, dict[int, int]] = {}
    for d, terms in enumerate(doc_terms):
        for term, count in Counter(terms).items():
            per_doc.setdefault(term, {})[d] = count
    stats = []
    for term, freqs in per_doc.items():
        tf = 0.0
        for d in sorted(freqs):
            tf += math.log(1 + freqs[d])
        df = len(freqs)
        idf = N / df
        stats.append(
            TermStats(term=term, per_document_frequency=freqs, tf=tf, df=df, idf=idf, tfidf=tf * idf)
        )
    stats.sort(key=lambda s: (-s.tfidf, s.term))
    return stats


def entail_types(
    c: Corpus,
    inv: EntityInventory,
    m: int,
    wordnet: NounLexicon,
    stopwords: Optional[frozenset[str]] = None,
) -> TypeResult:
    """prune -> noun-phrase extraction -> tf-idf scoring -> top-m terms."""
    if m < 1:
        raise ValueError("m must be >= 1")
    pruned = prune_named_entities(c, inv, stopwords)
    doc_terms = [extract_noun_phrases(doc, wordnet) for doc in pruned.documents]
    stats = score_terms(doc_terms)
    return TypeResult(types=tuple((s.term, s.tfidf) for s in stats[:m]))
