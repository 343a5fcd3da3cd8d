"""Noun lexicon backed by the standard WordNet database file layout.

Only two files are read: ``index.noun`` (the noun lemma index; header lines
start with a space) and ``noun.exc`` (irregular plural -> base form).  A
small bundled lexicon ships with the package; point ``load`` at a full
WordNet ``dict`` directory for real coverage.
"""

from __future__ import annotations

import os
from typing import Optional

from .errors import LexiconError

_DEFAULT_DIR = os.path.join(os.path.dirname(__file__), "data", "lexicon")

# suffix detachment rules for nouns, tried in order
_DETACH_RULES = (
    ("s", ""),
    ("ses", "s"),
    ("xes", "x"),
    ("zes", "z"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("men", "man"),
    ("ies", "y"),
)


class NounLexicon:
    def __init__(self, nouns: frozenset[str], exceptions: dict[str, str]):
        self.nouns = nouns
        self.exceptions = exceptions

    @classmethod
    def load(cls, directory: Optional[str] = None) -> "NounLexicon":
        directory = directory or _DEFAULT_DIR
        index_path = os.path.join(directory, "index.noun")
        exc_path = os.path.join(directory, "noun.exc")
        try:
            nouns = set()
            with open(index_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.startswith(" "):
                        continue  # license header
                    fields = line.split()
                    if len(fields) >= 2 and fields[1] == "n":
                        nouns.add(fields[0])
            exceptions = {}
            if os.path.exists(exc_path):
                with open(exc_path, encoding="utf-8") as fh:
                    for line in fh:
                        fields = line.split()
                        if len(fields) >= 2:
                            exceptions[fields[0]] = fields[1]
        except OSError as exc:
            raise LexiconError(f"cannot read lexicon from {directory}: {exc}") from exc
        if not nouns:
            raise LexiconError(f"no noun entries found in {index_path}")
        return cls(frozenset(nouns), exceptions)

    def noun_form(self, word: str) -> Optional[str]:
        """Base noun form of ``word`` (lowercased), or None if no noun
        entry exists: exact lookup, then the exception list, then the
        suffix detachment rules."""
        w = word.lower()
        if w in self.nouns:
            return w
        exc = self.exceptions.get(w)
        if exc is not None and exc in self.nouns:
            return exc
        for suffix, repl in _DETACH_RULES:
            if w.endswith(suffix) and len(w) > len(suffix):
                candidate = w[: len(w) - len(suffix)] + repl
                if candidate in self.nouns:
                    return candidate
        return None

    def is_noun(self, word: str) -> bool:
        return self.noun_form(word) is not None
