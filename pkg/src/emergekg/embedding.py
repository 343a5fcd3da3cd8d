"""Skip-gram entity embeddings with negative sampling.

Trains input/output vector tables over the fused-token corpus and ranks
candidate entities by cosine similarity to the target.  The SGD inner loop
lives in a numba kernel with a pure-numpy fallback (see
:mod:`emergekg.backend`); training is bit-deterministic for ``workers=1``
and a fixed seed on a given backend.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import backend
from ._sgns_numpy import splitmix64
from .corpus import Corpus, TargetEntity
from .ner import EntityInventory

log = logging.getLogger(__name__)

NEGATIVE_EXPONENT = 0.75
_NOISE_DOMAIN = 2**31 - 1


@dataclass(frozen=True)
class Hyperparameters:
    window: int = 7
    min_count: int = 1
    workers: int = 4
    dims: int = 280
    batch_words: int = 300
    skip_gram: bool = True
    negative_samples: int = 5
    epochs: int = 5
    initial_learning_rate: float = 0.025
    subsample_threshold: float = 1e-3
    seed: int = 1

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.dims < 1:
            raise ValueError("dims must be >= 1")
        if self.negative_samples < 1:
            raise ValueError("negative_samples must be >= 1")
        if not (0.0 < self.initial_learning_rate < 1.0):
            raise ValueError("initial_learning_rate must be in (0, 1)")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not self.skip_gram:
            raise ValueError("only the skip-gram architecture is implemented")


@dataclass
class Vocabulary:
    """Token statistics: dense indices, counts, subsampling keep
    probabilities and the cumulative noise table (counts^0.75)."""

    tokens: list[str]
    index: dict[str, int]
    counts: np.ndarray
    total_tokens: int
    keep_prob: np.ndarray
    cum_table: np.ndarray

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    @classmethod
    def from_counts(cls, counts: dict[str, int], min_count: int, subsample_threshold: float) -> "Vocabulary":
        retained = {w: c for w, c in counts.items() if c >= min_count}
        if not retained:
            raise ValueError("empty corpus: no token meets min_count")
        # most frequent first, lexicographic among equals: deterministic indices
        tokens = sorted(retained, key=lambda w: (-retained[w], w))
        index = {w: i for i, w in enumerate(tokens)}
        cnt = np.array([retained[w] for w in tokens], dtype=np.int64)
        total = int(cnt.sum())

        if subsample_threshold > 0:
            threshold_count = subsample_threshold * total
            ratio = threshold_count / cnt
            keep = (np.sqrt(1.0 / ratio) + 1.0) * ratio
            keep_prob = np.minimum(keep, 1.0)
        else:
            keep_prob = np.ones(len(tokens))

        weights = cnt.astype(np.float64) ** NEGATIVE_EXPONENT
        cum = np.cumsum(weights)
        cum_table = np.rint(cum / cum[-1] * _NOISE_DOMAIN).astype(np.int64)
        cum_table[-1] = _NOISE_DOMAIN
        return cls(tokens, index, cnt, total, keep_prob, cum_table)

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> "Vocabulary":
        """Minimal vocabulary for a loaded model (inference only)."""
        index = {w: i for i, w in enumerate(tokens)}
        ones = np.ones(len(tokens), dtype=np.int64)
        cum = np.rint(np.cumsum(ones / len(tokens)) * _NOISE_DOMAIN).astype(np.int64)
        return cls(list(tokens), index, ones, len(tokens), np.ones(len(tokens)), cum)


@dataclass(frozen=True)
class AssociationResult:
    entity: str
    coarse_type: str
    score: float


@dataclass
class EmbeddingModel:
    input_vectors: np.ndarray
    output_vectors: Optional[np.ndarray]
    vocab: Vocabulary
    hyper: Hyperparameters

    def vector(self, token: str) -> np.ndarray:
        return self.input_vectors[self.vocab.index[token]]

    def save(self, path: str) -> None:
        """Text format: header ``V dims``, then one ``token v1 .. vD`` line
        per vocabulary entry (input vectors only).  Floats are written with
        shortest round-trip precision, so load() reproduces them exactly."""
        V, dims = self.input_vectors.shape
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{V} {dims}\n")
            for i, token in enumerate(self.vocab.tokens):
                values = " ".join(repr(float(x)) for x in self.input_vectors[i])
                fh.write(f"{token} {values}\n")

    @classmethod
    def load(cls, path: str) -> "EmbeddingModel":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            V, dims = int(header[0]), int(header[1])
            tokens = []
            vectors = np.empty((V, dims))
            for i in range(V):
                parts = fh.readline().rstrip("\n").split(" ")
                tokens.append(parts[0])
                vectors[i] = [float(x) for x in parts[1 : dims + 1]]
        return cls(
            input_vectors=vectors,
            output_vectors=None,
            vocab=Vocabulary.from_tokens(tokens),
            hyper=Hyperparameters(dims=dims),
        )


# --------------------------------------------------------------------------
# training


def build_vocab(c: Corpus, h: Hyperparameters) -> Vocabulary:
    """Count tokens over all documents (replicas included) and keep those
    with count >= min_count."""
    counts: dict[str, int] = {}
    for doc in c.documents:
        for tok in doc.tokens:
            counts[tok.text] = counts.get(tok.text, 0) + 1
    return Vocabulary.from_counts(counts, h.min_count, h.subsample_threshold)


def _encode(sentences: Sequence[Sequence[str]], vocab: Vocabulary) -> tuple[np.ndarray, np.ndarray]:
    ids = []
    offsets = [0]
    for sent in sentences:
        ids.extend(vocab.index[w] for w in sent if w in vocab.index)
        offsets.append(len(ids))
    return np.array(ids, dtype=np.int64), np.array(offsets, dtype=np.int64)


def _initial_vectors(V: int, dims: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    syn0 = (rng.random((V, dims)) - 0.5) / dims
    syn1 = np.zeros((V, dims))
    return syn0, syn1


def _kernel():
    if backend.numba_enabled():
        from . import _sgns_numba

        return _sgns_numba.train_job, True
    from . import _sgns_numpy

    return _sgns_numpy.train_job, False


def _call_kernel(kernel, is_numba, sents, offsets, syn0, syn1, vocab, h, alpha_min, t, t_total, state):
    args = (
        sents,
        offsets,
        syn0,
        syn1,
        vocab.keep_prob,
        vocab.cum_table,
        h.window,
        h.negative_samples,
        h.initial_learning_rate,
        alpha_min,
        t,
        t_total,
    )
    if is_numba:
        new_t, new_state = kernel(*args, np.uint64(state))
    else:
        new_t, new_state = kernel(*args, state)
    return int(new_t), int(new_state)


def _job_slices(offsets: np.ndarray, batch_words: int) -> list[tuple[int, int]]:
    """Split sentences into work units of at least ``batch_words`` tokens."""
    slices = []
    nsent = len(offsets) - 1
    start = 0
    while start < nsent:
        end = start
        while end < nsent and offsets[end + 1] - offsets[start] < batch_words:
            end += 1
        slices.append((start, min(end + 1, nsent)))
        start = min(end + 1, nsent)
    return slices


def train_sentences(
    sentences: Sequence[Sequence[str]], h: Hyperparameters, required_token: Optional[str] = None
) -> EmbeddingModel:
    """Train on raw token sequences (one list per document)."""
    counts: dict[str, int] = {}
    for sent in sentences:
        for w in sent:
            counts[w] = counts.get(w, 0) + 1
    vocab = Vocabulary.from_counts(counts, h.min_count, h.subsample_threshold)
    if required_token is not None and required_token not in vocab:
        raise ValueError(
            f"target token {required_token!r} absent from vocabulary; "
            "entity recognition or fusion failed upstream"
        )
    sents, offsets = _encode(sentences, vocab)
    syn0, syn1 = _initial_vectors(len(vocab), h.dims, h.seed)
    t_total = int(sents.shape[0]) * h.epochs
    alpha_min = h.initial_learning_rate / 10000.0
    kernel, is_numba = _kernel()

    if t_total > 0 and h.workers == 1:
        # single continuous stream: bit-deterministic per backend
        state = splitmix64(h.seed)
        t = 0
        for _ in range(h.epochs):
            t, state = _call_kernel(
                kernel, is_numba, sents, offsets, syn0, syn1, vocab, h, alpha_min, t, t_total, state
            )
    elif t_total > 0:
        slices = _job_slices(offsets, h.batch_words)
        progress = [0]

        def run(job) -> None:
            epoch, job_idx, lo, hi = job
            job_offsets = offsets[lo : hi + 1]
            state = splitmix64(splitmix64(h.seed) ^ (epoch * 2654435761 + job_idx))
            _call_kernel(
                kernel,
                is_numba,
                sents,
                job_offsets,
                syn0,
                syn1,
                vocab,
                h,
                alpha_min,
                progress[0],
                t_total,
                state,
            )
            progress[0] += int(offsets[hi] - offsets[lo])

        with ThreadPoolExecutor(max_workers=h.workers) as pool:
            for epoch in range(h.epochs):
                jobs = [(epoch, j, lo, hi) for j, (lo, hi) in enumerate(slices)]
                list(pool.map(run, jobs))

    if not np.all(np.isfinite(syn0)) or not np.all(np.isfinite(syn1)):
        raise ArithmeticError("training produced non-finite vectors")
    return EmbeddingModel(input_vectors=syn0, output_vectors=syn1, vocab=vocab, hyper=h)


def train(c: Corpus, h: Hyperparameters) -> EmbeddingModel:
    """Train over a (transformed) corpus; the target's fused token must
    have survived into the vocabulary."""
    sentences = [doc.token_texts() for doc in c.documents]
    return train_sentences(sentences, h, required_token=c.target.fused_token)


# --------------------------------------------------------------------------
# objective (used by the gradient tests; the kernels apply the same math)


def negative_sampling_loss(center: np.ndarray, context: np.ndarray, negatives: np.ndarray) -> float:
    """-log sigma(v.u_ctx) - sum_k log sigma(-v.u_k)."""
    loss = np.logaddexp(0.0, -center @ context)
    if len(negatives):
        loss += np.logaddexp(0.0, negatives @ center).sum()
    return float(loss)


def negative_sampling_gradients(
    center: np.ndarray, context: np.ndarray, negatives: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradients of :func:`negative_sampling_loss` with respect to
    the center row, the context row and each negative row."""

    def sigmoid(z):
        return 1.0 / (1.0 + np.exp(-np.clip(z, -60.0, 60.0)))

    f_pos = sigmoid(center @ context)
    g_center = -(1.0 - f_pos) * context
    g_context = -(1.0 - f_pos) * center
    g_negatives = np.zeros_like(negatives)
    if len(negatives):
        f_neg = sigmoid(negatives @ center)
        g_center = g_center + f_neg @ negatives
        g_negatives = f_neg[:, None] * center[None, :]
    return g_center, g_context, g_negatives


# --------------------------------------------------------------------------
# similarity ranking


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """dot(a, b) / (|a| |b|); rejects zero vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return float(a @ b / (na * nb))


def top_k_associated(
    m: EmbeddingModel, target: TargetEntity, inv: EntityInventory, k: int
) -> list[AssociationResult]:
    """Rank the inventory's entity tokens (minus the target) by cosine
    similarity to the target vector; top k, ties broken lexicographically."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if target.fused_token not in m.vocab:
        raise ValueError(f"target token {target.fused_token!r} absent from vocabulary")
    target_vec = m.vector(target.fused_token)
    candidates = [
        fused for fused in inv.distinct if fused != target.fused_token and fused in m.vocab
    ]
    if not candidates:
        log.warning("no candidate entities in vocabulary; empty association list")
        return []
    scored = [
        AssociationResult(
            entity=fused, coarse_type=inv.coarse_type_of(fused), score=cosine(target_vec, m.vector(fused))
        )
        for fused in candidates
    ]
    scored.sort(key=lambda r: (-r.score, r.entity))
    return scored[:k]
