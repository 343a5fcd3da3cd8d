"""RDF knowledge card assembly and Turtle serialization.

The entailed types and associated entities become triples around the
target entity; a minimal Turtle writer/reader pair keeps the output
round-trippable without an RDF library.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .corpus import TargetEntity
from .embedding import AssociationResult
from .ner import LOCATION, ORGANIZATION, PERSON
from .typeinfer import TypeResult

log = logging.getLogger(__name__)

PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "foaf": "http://xmlns.com/foaf/0.1/",
    "schema": "https://schema.org/",
    "local": "http://example.org/emergekg/",
}

RDF_TYPE = "rdf:type"

# generic relation per coarse type
RELATION_BY_TYPE = {
    PERSON: "foaf:knows",
    LOCATION: "schema:location",
    ORGANIZATION: "schema:affiliation",
}


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: str


def local_name(surface: str) -> str:
    """Whitespace (or '#' fusion glue) becomes hyphens: 'Saeedeh
    Shekarpour' -> 'Saeedeh-Shekarpour'."""
    return "-".join(surface.replace("#", " ").split())


def _title_case(term: str) -> str:
    return " ".join(w[:1].upper() + w[1:] for w in term.split())


def build_type_triples(target: TargetEntity, types: Union[TypeResult, Iterable[str]]) -> list[Triple]:
    """One rdf:type triple per entailed type; type terms are title-cased
    and hyphenated into local class names."""
    terms = types.terms() if isinstance(types, TypeResult) else list(types)
    if not terms:
        log.warning("no types to serialize for %s", target.surface)
        return []
    subject = "local:" + local_name(target.surface)
    return [Triple(subject, RDF_TYPE, "local:" + local_name(_title_case(t))) for t in terms]


def build_association_triples(target: TargetEntity, assoc: Sequence[AssociationResult]) -> list[Triple]:
    """One triple per associated entity; the predicate is the generic
    relation of its coarse type."""
    subject = "local:" + local_name(target.surface)
    return [
        Triple(subject, RELATION_BY_TYPE[r.coarse_type], "local:" + local_name(r.entity)) for r in assoc
    ]


# --------------------------------------------------------------------------
# Turtle


_PN_RE = re.compile(r"^[^\s<>\"{}|^`\\]+:[^\s<>\"{}|^`\\]*$")


def _render_term(term: str) -> str:
    if _PN_RE.match(term):
        return term
    escaped = term.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def serialize_turtle(triples: Sequence[Triple]) -> str:
    """Deterministic Turtle: the prefix block, then rdf:type statements,
    then the rest, each group sorted lexicographically."""
    lines = [f"@prefix {p}: <{iri}> ." for p, iri in PREFIXES.items()]
    lines.append("")
    ordered = sorted(
        triples, key=lambda t: (0 if t.predicate == RDF_TYPE else 1, t.subject, t.predicate, t.object)
    )
    for t in ordered:
        lines.append(f"{_render_term(t.subject)} {_render_term(t.predicate)} {_render_term(t.object)} .")
    return "\n".join(lines) + "\n"


_TERM_RE = re.compile(r'<[^>]*>|"(?:[^"\\]|\\.)*"|[^\s]+')


def _parse_term(raw: str) -> str:
    if raw.startswith('"') and raw.endswith('"'):
        body = raw[1:-1]
        return body.replace("\\n", "\n").replace('\\"', '"').replace("\\\\", "\\")
    if raw.startswith("<") and raw.endswith(">"):
        return raw[1:-1]
    return raw


def parse_turtle(text: str) -> list[Triple]:
    """Minimal reader for the subset this module writes: @prefix lines and
    one triple statement per line, terminated by '.'."""
    triples = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("@prefix"):
            continue
        terms = _TERM_RE.findall(line)
        if not terms or terms[-1] != ".":
            raise ValueError(f"line {lineno}: statement does not end with '.'")
        terms = terms[:-1]
        if len(terms) != 3:
            raise ValueError(f"line {lineno}: expected 3 terms, got {len(terms)}")
        triples.append(Triple(*(_parse_term(t) for t in terms)))
    return triples
