"""Snippet acquisition and corpus construction.

A query yields ranked snippets; each snippet is extended with the visible
text of the page it links to, preprocessed into tokens, and packed into one
of two corpora: the extended corpus (one document per snippet) or the
enhanced corpus, where the document of rank ``i`` is replicated ``n+1-i``
times so that higher-ranked content carries more statistical weight.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from html.parser import HTMLParser
from typing import Optional, Sequence

from .errors import EmptyDocumentError, EmptyResultError, SearchError

log = logging.getLogger(__name__)

_DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

# Word runs of unicode letters/digits plus '#' (reserved fusion glue),
# optionally joined by internal hyphens.  Everything else is a separator.
_TOKEN_RE = re.compile(r"(?:[^\W_]|#)+(?:-(?:[^\W_]|#)+)*")


def load_stopwords(path: Optional[str] = None) -> frozenset[str]:
    """Load the stop-word list (one lowercase word per line)."""
    if path is None:
        path = os.path.join(_DATA_DIR, "stopwords.txt")
    with open(path, encoding="utf-8") as fh:
        return frozenset(w.strip().lower() for w in fh if w.strip())


class CorpusVariant(Enum):
    EXTENDED = "extended"
    ENHANCED = "enhanced"


@dataclass(frozen=True)
class Snippet:
    """One ranked search result."""

    rank: int
    title: str
    body: str
    url: str

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"snippet rank must be >= 1, got {self.rank}")
        if not self.body.strip():
            raise ValueError(f"snippet body is empty (rank {self.rank})")


@dataclass(frozen=True)
class Token:
    """A token with the character span it was cut from."""

    text: str
    start: int
    end: int


@dataclass(frozen=True)
class ExtendedDocument:
    """A snippet body concatenated with the linked page's visible text."""

    source_rank: int
    url: str
    raw_text: str
    tokens: tuple[Token, ...] = ()
    degraded: bool = False  # page fetch failed, raw_text is the snippet alone

    def token_texts(self) -> list[str]:
        return [t.text for t in self.tokens]


@dataclass(frozen=True)
class TargetEntity:
    """The user-supplied entity the whole pipeline is about."""

    surface: str
    fused_token: str
    coarse_type_hint: Optional[str] = None

    @classmethod
    def from_surface(cls, surface: str, coarse_type_hint: Optional[str] = None) -> "TargetEntity":
        words = surface.split()
        if not words:
            raise ValueError("target surface is empty")
        return cls(surface=surface, fused_token="#".join(words), coarse_type_hint=coarse_type_hint)

    def __post_init__(self):
        if any(c.isspace() for c in self.fused_token):
            raise ValueError("fused token must not contain whitespace")
        if self.fused_token.replace("#", " ") != " ".join(self.surface.split()):
            raise ValueError("fused token does not match surface")


@dataclass(frozen=True)
class Corpus:
    """Ordered document collection, extended (one doc per rank) or enhanced
    (rank-i doc replicated n+1-i times, replicas grouped by ascending rank)."""

    documents: tuple[ExtendedDocument, ...]
    variant: CorpusVariant
    n: int
    target: TargetEntity

    def __post_init__(self):
        ranks = [d.source_rank for d in self.documents]
        if self.variant is CorpusVariant.EXTENDED:
            if ranks != list(range(1, self.n + 1)):
                raise ValueError("extended corpus must hold ranks 1..n exactly once, in order")
        else:
            expected = [i for i in range(1, self.n + 1) for _ in range(self.n + 1 - i)]
            if ranks != expected:
                raise ValueError("enhanced corpus multiplicities do not follow n+1-i")

    def __len__(self) -> int:
        return len(self.documents)


# --------------------------------------------------------------------------
# snippet acquisition


class FixtureSearchClient:
    """Serves the checked-in snippet list of a fixture directory.

    The fixture is query-agnostic: whatever query it is asked for, it
    returns the bundled result set, which keeps runs reproducible.
    """

    def __init__(self, fixture_dir: str):
        self.fixture_dir = fixture_dir

    def search(self, query: str) -> list[Snippet]:
        path = os.path.join(self.fixture_dir, "snippets.json")
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return [Snippet(rank=r["rank"], title=r["title"], body=r["body"], url=r["url"]) for r in raw]


class LiveSearchClient:
    """Adapter for a SerpAPI-style JSON search endpoint.

    Requires ``EMERGEKG_SEARCH_API_KEY``; the endpoint can be overridden
    with ``EMERGEKG_SEARCH_ENDPOINT``.  Never used in offline mode.
    """

    DEFAULT_ENDPOINT = "https://serpapi.com/search"

    def __init__(self, api_key: Optional[str] = None, endpoint: Optional[str] = None, num: int = 10):
        self.api_key = api_key or os.environ.get("EMERGEKG_SEARCH_API_KEY")
        self.endpoint = endpoint or os.environ.get("EMERGEKG_SEARCH_ENDPOINT", self.DEFAULT_ENDPOINT)
        self.num = num
        if not self.api_key:
            raise ValueError("EMERGEKG_SEARCH_API_KEY is not set")

    def search(self, query: str) -> list[Snippet]:
        import requests

        resp = requests.get(
            self.endpoint,
            params={"q": query, "api_key": self.api_key, "num": self.num},
            timeout=15,
        )
        resp.raise_for_status()
        results = resp.json().get("organic_results", [])
        snippets = []
        for r in results:
            body = r.get("snippet") or r.get("title") or ""
            if not body.strip():
                continue
            snippets.append(
                Snippet(rank=len(snippets) + 1, title=r.get("title", ""), body=body, url=r.get("link", ""))
            )
        return snippets


def fetch_snippets(query: str, n: int, client) -> list[Snippet]:
    """Return the top-n snippets for ``query``, ranks 1..k with k <= n.

    Client failures surface as :class:`SearchError` carrying the query;
    an empty result set raises the distinct :class:`EmptyResultError`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    try:
        snippets = client.search(query)
    except SearchError:
        raise
    except Exception as exc:
        raise SearchError(query, f"search client failed: {exc}") from exc
    if not snippets:
        raise EmptyResultError(query)
    snippets = sorted(snippets, key=lambda s: s.rank)[:n]
    ranks = [s.rank for s in snippets]
    if ranks != list(range(1, len(snippets) + 1)):
        raise SearchError(query, f"snippet ranks not contiguous from 1: {ranks}")
    return snippets


# --------------------------------------------------------------------------
# page extension


class _VisibleTextExtractor(HTMLParser):
    """Collects text content, dropping script/style bodies and all markup."""

    _SKIP = {"script", "style"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self._skip_depth = 0
        self._chunks: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip_depth > 0:
            self._skip_depth -= 1

    def handle_data(self, data):
        if self._skip_depth == 0:
            self._chunks.append(data)

    def text(self) -> str:
        return " ".join(" ".join(self._chunks).split())


def extract_page_text(html: str) -> str:
    """Visible text of an HTML page: markup, script and style stripped,
    whitespace collapsed."""
    parser = _VisibleTextExtractor()
    parser.feed(html)
    parser.close()
    return parser.text()


def url_fixture_name(url: str) -> str:
    """Page fixtures are keyed by the SHA-1 of the URL."""
    return hashlib.sha1(url.encode("utf-8")).hexdigest() + ".html"


class FixturePageFetcher:
    """Reads page HTML from ``<fixture_dir>/pages/<sha1(url)>.html``."""

    def __init__(self, fixture_dir: str):
        self.pages_dir = os.path.join(fixture_dir, "pages")

    def fetch(self, url: str) -> str:
        path = os.path.join(self.pages_dir, url_fixture_name(url))
        with open(path, encoding="utf-8") as fh:
            return fh.read()


class LivePageFetcher:
    """Single GET per URL with a timeout; no crawl politeness beyond that."""

    def __init__(self, timeout: float = 10.0):
        self.timeout = timeout

    def fetch(self, url: str) -> str:
        import requests

        resp = requests.get(url, timeout=self.timeout)
        resp.raise_for_status()
        return resp.text


def extend_snippet(snippet: Snippet, fetcher) -> ExtendedDocument:
    """Concatenate the snippet body with the linked page's visible text.

    A failed fetch is not fatal: the document degrades to the snippet body
    alone and records the degradation, because dead links must not kill
    the pipeline.
    """
    try:
        html = fetcher.fetch(snippet.url)
    except Exception as exc:
        log.warning("page fetch failed for rank %d (%s): %s", snippet.rank, snippet.url, exc)
        return ExtendedDocument(
            source_rank=snippet.rank, url=snippet.url, raw_text=snippet.body, degraded=True
        )
    page_text = extract_page_text(html)
    raw_text = snippet.body + "\n" + page_text if page_text else snippet.body
    return ExtendedDocument(source_rank=snippet.rank, url=snippet.url, raw_text=raw_text)


def extend_snippets(snippets: Sequence[Snippet], fetcher, max_workers: int = 4) -> list[ExtendedDocument]:
    """Extend many snippets, fetching pages concurrently, output in input order."""
    if max_workers <= 1 or len(snippets) <= 1:
        return [extend_snippet(s, fetcher) for s in snippets]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(lambda s: extend_snippet(s, fetcher), snippets))


# --------------------------------------------------------------------------
# preprocessing


def tokenize(text: str) -> list[Token]:
    """Split on whitespace/punctuation, keeping '#' and intra-word hyphens."""
    return [Token(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def _is_pure_digits(token: str) -> bool:
    stripped = token.replace("-", "").replace("#", "")
    return stripped.isdigit() if stripped else False


def preprocess(doc: ExtendedDocument, stopwords: frozenset[str]) -> ExtendedDocument:
    """Populate ``doc.tokens``: special characters stripped by the token
    split, pure-digit tokens and stop-words removed, case preserved,
    character spans kept so NER output can be aligned against raw_text.
    """
    if not doc.raw_text:
        raise EmptyDocumentError(f"document rank {doc.source_rank} has no text")
    tokens = [
        t
        for t in tokenize(doc.raw_text)
        if not _is_pure_digits(t.text) and t.text.lower() not in stopwords
    ]
    if not tokens:
        raise EmptyDocumentError(
            f"document rank {doc.source_rank}: preprocessing removed every token"
        )
    return dataclasses.replace(doc, tokens=tuple(tokens))


# --------------------------------------------------------------------------
# corpus assembly


def _check_ranks(docs: Sequence[ExtendedDocument]):
    ranks = sorted(d.source_rank for d in docs)
    if len(set(ranks)) != len(ranks):
        dupes = sorted({r for r in ranks if ranks.count(r) > 1})
        raise ValueError(f"duplicate source ranks: {dupes}")
    if ranks != list(range(1, len(ranks) + 1)):
        raise ValueError(f"source ranks must be exactly 1..n, got {ranks}")


def build_extended_corpus(docs: Sequence[ExtendedDocument], target: TargetEntity) -> Corpus:
    """One document per source rank, in rank order."""
    _check_ranks(docs)
    ordered = tuple(sorted(docs, key=lambda d: d.source_rank))
    return Corpus(documents=ordered, variant=CorpusVariant.EXTENDED, n=len(ordered), target=target)


def build_enhanced_corpus(docs: Sequence[ExtendedDocument], target: TargetEntity) -> Corpus:
    """Rank-weighted replication: the document of rank i appears n+1-i
    times, replicas grouped and ordered by ascending rank (n(n+1)/2 total)."""
    _check_ranks(docs)
    ordered = sorted(docs, key=lambda d: d.source_rank)
    n = len(ordered)
    documents = tuple(doc for doc in ordered for _ in range(n + 1 - doc.source_rank))
    return Corpus(documents=documents, variant=CorpusVariant.ENHANCED, n=n, target=target)


# --------------------------------------------------------------------------
# corpus cache file (one line per document: rank<TAB>space-joined tokens)


def write_corpus_file(corpus: Corpus, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in corpus.documents:
            fh.write(f"{doc.source_rank}\t{' '.join(doc.token_texts())}\n")


def read_corpus_file(path: str) -> list[tuple[int, list[str]]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            rank_s, _, rest = line.partition("\t")
            out.append((int(rank_s), rest.split(" ") if rest else []))
    return out


def corpus_from_cache(path: str, target: TargetEntity) -> Corpus:
    """Rebuild a corpus from its cache file.

    Documents reconstructed this way carry synthetic raw_text (the tokens
    joined by single spaces) with spans pointing into it; the variant is
    inferred from whether ranks repeat.
    """
    lines = read_corpus_file(path)
    if not lines:
        raise ValueError(f"corpus file {path} is empty")
    by_rank: dict[int, ExtendedDocument] = {}
    for rank, words in lines:
        if rank in by_rank:
            continue
        text = " ".join(words)
        tokens = []
        pos = 0
        for w in words:
            tokens.append(Token(w, pos, pos + len(w)))
            pos += len(w) + 1
        by_rank[rank] = ExtendedDocument(source_rank=rank, url="", raw_text=text, tokens=tuple(tokens))
    documents = tuple(by_rank[rank] for rank, _ in lines)
    enhanced = len(lines) > len(by_rank)
    variant = CorpusVariant.ENHANCED if enhanced else CorpusVariant.EXTENDED
    return Corpus(documents=documents, variant=variant, n=len(by_rank), target=target)
