"""Coarse-typed named entity recognition and corpus fusion.

Recognition is backend-pluggable: an annotation-file backend replays
precomputed mention spans (used for all fixtures, reproducible without any
external tagger) and a heuristic backend detects capitalized sequences and
classifies them with gazetteers.  Multi-word mentions are fused into single
``#``-joined tokens so a word-level embedding treats each entity as one
vocabulary item.
"""

from __future__ import annotations

import dataclasses
import json
import os
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Optional, Sequence

from .corpus import Corpus, ExtendedDocument, TargetEntity, Token, tokenize
from .errors import MissingAnnotationError

PERSON = "PERSON"
LOCATION = "LOCATION"
ORGANIZATION = "ORGANIZATION"
COARSE_TYPES = (PERSON, LOCATION, ORGANIZATION)

# fixed tie order after majority vote
_TYPE_PRIORITY = {PERSON: 0, LOCATION: 1, ORGANIZATION: 2}

_GAZETTEER_DIR = os.path.join(os.path.dirname(__file__), "data", "gazetteers")

# articles trimmed from the head of capitalized runs
_RUN_ARTICLES = {"the", "a", "an"}


def fuse_mention(surface: str) -> str:
    """Join the words of a multi-word entity with '#': the single-token form."""
    words = surface.split()
    if not words:
        raise ValueError("cannot fuse an empty surface")
    return "#".join(words)


def defuse(token: str) -> str:
    """Inverse of :func:`fuse_mention` up to whitespace normalization."""
    return token.replace("#", " ")


@dataclass(frozen=True)
class EntityMention:
    surface: str
    coarse_type: str
    doc_rank: int
    start: int
    end: int
    fused: str

    @classmethod
    def create(cls, surface: str, coarse_type: str, doc_rank: int, start: int, end: int) -> "EntityMention":
        return cls(surface, coarse_type, doc_rank, start, end, fuse_mention(surface))

    def __post_init__(self):
        if self.coarse_type not in COARSE_TYPES:
            raise ValueError(f"unknown coarse type {self.coarse_type!r}")
        if self.fused.replace("#", " ") != " ".join(self.surface.split()):
            raise ValueError("fused form does not match surface")
        if not (0 <= self.start < self.end):
            raise ValueError(f"bad span [{self.start}, {self.end})")


@dataclass(frozen=True)
class EntityInventory:
    """All mentions plus the per-entity coarse type and mention count."""

    mentions: tuple[EntityMention, ...]
    distinct: dict[str, tuple[str, int]]  # fused token -> (coarse_type, count)

    def coarse_type_of(self, fused: str) -> str:
        return self.distinct[fused][0]

    def entity_tokens(self) -> list[str]:
        return sorted(self.distinct)


def save_inventory(inv: EntityInventory, path: str) -> None:
    """Persist the distinct-entity table (fused token -> type, count)."""
    payload = {fused: {"type": t, "count": c} for fused, (t, c) in inv.distinct.items()}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def load_inventory(path: str) -> EntityInventory:
    """Inventory reloaded from :func:`save_inventory` output; mention
    objects are not recoverable, only the distinct-entity table."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    distinct = {fused: (v["type"], int(v["count"])) for fused, v in payload.items()}
    return EntityInventory(mentions=(), distinct=distinct)


def build_inventory(mentions: Sequence[EntityMention]) -> EntityInventory:
    """Aggregate mentions; each fused token gets one type by majority vote,
    ties broken PERSON > LOCATION > ORGANIZATION."""
    votes: dict[str, Counter] = defaultdict(Counter)
    for m in mentions:
        votes[m.fused][m.coarse_type] += 1
    distinct = {}
    for fused, counter in votes.items():
        best = max(counter.items(), key=lambda kv: (kv[1], -_TYPE_PRIORITY[kv[0]]))
        distinct[fused] = (best[0], sum(counter.values()))
    return EntityInventory(mentions=tuple(mentions), distinct=distinct)


# --------------------------------------------------------------------------
# backends


class AnnotationFileBackend:
    """Replays mention spans from ``<dir>/<rank>.json`` files.

    Each file is a JSON list of {"start": int, "end": int, "type": ...}
    objects with spans indexing into the document's raw_text.
    """

    def __init__(self, annotations_dir: str):
        self.annotations_dir = annotations_dir

    def annotate(self, doc: ExtendedDocument) -> list[tuple[int, int, str]]:
        path = os.path.join(self.annotations_dir, f"{doc.source_rank}.json")
        if not os.path.exists(path):
            raise MissingAnnotationError(
                f"no annotation file for document rank {doc.source_rank} (expected {path})"
            )
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return [(int(a["start"]), int(a["end"]), a["type"]) for a in raw]


class HeuristicBackend:
    """Capitalized-sequence detection classified by gazetteer lookup.

    A maximal run of capitalized tokens (adjacent up to whitespace) becomes
    a candidate; it is kept only when a gazetteer rule fires: organization
    suffix on the last word, given name on the first word, or place-name
    match on the full surface or any word.
    """

    def __init__(self, gazetteer_dir: Optional[str] = None):
        gdir = gazetteer_dir or _GAZETTEER_DIR
        self.given_names = self._load(os.path.join(gdir, "person.txt"))
        self.places = self._load(os.path.join(gdir, "location.txt"))
        self.org_suffixes = self._load(os.path.join(gdir, "org_suffix.txt"))

    @staticmethod
    def _load(path: str) -> frozenset[str]:
        with open(path, encoding="utf-8") as fh:
            return frozenset(line.strip() for line in fh if line.strip())

    def _classify(self, words: list[str], surface: str) -> Optional[str]:
        if words[-1] in self.org_suffixes:
            return ORGANIZATION
        if words[0] in self.given_names:
            return PERSON
        if surface in self.places or any(w in self.places for w in words):
            return LOCATION
        return None

    def annotate(self, doc: ExtendedDocument) -> list[tuple[int, int, str]]:
        text = doc.raw_text
        tokens = tokenize(text)
        out = []
        run: list[Token] = []

        def flush():
            if not run:
                return
            while run and run[0].text.lower() in _RUN_ARTICLES:
                run.pop(0)
            if not run:
                return
            start, end = run[0].start, run[-1].end
            surface = text[start:end]
            ctype = self._classify([t.text for t in run], surface)
            if ctype is not None:
                out.append((start, end, ctype))

        prev_end = None
        for tok in tokens:
            capitalized = tok.text[:1].isupper()
            adjacent = prev_end is not None and not text[prev_end : tok.start].strip()
            if capitalized and (not run or adjacent):
                run.append(tok)
            else:
                flush()
                run = [tok] if capitalized else []
            prev_end = tok.end
        flush()
        return out


def _target_spans(doc: ExtendedDocument, target: TargetEntity) -> list[tuple[int, int]]:
    pattern = re.compile(
        r"(?<![^\W_])" + re.escape(target.surface) + r"(?![^\W_])"
    )
    return [(m.start(), m.end()) for m in pattern.finditer(doc.raw_text)]


def recognize(
    doc: ExtendedDocument, backend, target: Optional[TargetEntity] = None
) -> list[EntityMention]:
    """Run the backend over raw_text and validate spans.

    When a target entity is given, its exact surface occurrences are always
    recognized regardless of backend, so the fused target token is
    guaranteed to reach the vocabulary.
    """
    if not doc.raw_text:
        raise ValueError(f"document rank {doc.source_rank} has no text")
    spans = list(backend.annotate(doc))
    if target is not None:
        have = {(s, e) for s, e, _ in spans}
        ttype = target.coarse_type_hint or PERSON
        for s, e in _target_spans(doc, target):
            if (s, e) not in have:
                spans.append((s, e, ttype))
    mentions = []
    for start, end, ctype in spans:
        if not (0 <= start < end <= len(doc.raw_text)):
            raise ValueError(
                f"annotation span [{start}, {end}) out of bounds for document rank {doc.source_rank}"
            )
        surface = doc.raw_text[start:end]
        if not surface.strip():
            raise ValueError(f"annotation span [{start}, {end}) covers only whitespace")
        mentions.append(EntityMention.create(surface, ctype, doc.source_rank, start, end))
    mentions.sort(key=lambda m: (m.start, m.end))
    return mentions


def recognize_corpus_docs(
    docs: Sequence[ExtendedDocument], backend, target: Optional[TargetEntity] = None
) -> EntityInventory:
    """Recognize over each distinct document and aggregate the inventory."""
    mentions: list[EntityMention] = []
    for doc in docs:
        mentions.extend(recognize(doc, backend, target))
    return build_inventory(mentions)


# --------------------------------------------------------------------------
# corpus transformation


def _resolve_overlaps(mentions: Sequence[EntityMention]) -> list[EntityMention]:
    # longest match first, leftmost wins among equal lengths
    ordered = sorted(mentions, key=lambda m: (-(m.end - m.start), m.start))
    taken: list[EntityMention] = []
    for m in ordered:
        if all(m.end <= o.start or m.start >= o.end for o in taken):
            taken.append(m)
    taken.sort(key=lambda m: m.start)
    return taken


def _transform_doc(doc: ExtendedDocument, mentions: Sequence[EntityMention]) -> ExtendedDocument:
    if not mentions:
        return doc
    chosen = _resolve_overlaps(mentions)
    new_tokens: list[Token] = []
    ti = 0
    tokens = doc.tokens
    for m in chosen:
        while ti < len(tokens) and tokens[ti].end <= m.start:
            new_tokens.append(tokens[ti])
            ti += 1
        # consume every token overlapping the mention span
        while ti < len(tokens) and tokens[ti].start < m.end:
            ti += 1
        new_tokens.append(Token(m.fused, m.start, m.end))
    new_tokens.extend(tokens[ti:])
    return dataclasses.replace(doc, tokens=tuple(new_tokens))


def transform_corpus(c: Corpus, inv: EntityInventory) -> Corpus:
    """Rewrite every document (including all replicas) so each mention span
    becomes its fused token.  Document count and variant are preserved."""
    by_rank: dict[int, list[EntityMention]] = defaultdict(list)
    for m in inv.mentions:
        by_rank[m.doc_rank].append(m)
    cache: dict[int, ExtendedDocument] = {}
    new_docs = []
    for doc in c.documents:
        if doc.source_rank not in cache:
            cache[doc.source_rank] = _transform_doc(doc, by_rank.get(doc.source_rank, []))
        new_docs.append(cache[doc.source_rank])
    return dataclasses.replace(c, documents=tuple(new_docs))
