import numpy as np
import pytest

from emergekg import backend
from emergekg.corpus import TargetEntity
from emergekg.embedding import (
    EmbeddingModel,
    Hyperparameters,
    Vocabulary,
    _initial_vectors,
    build_vocab,
    cosine,
    negative_sampling_gradients,
    negative_sampling_loss,
    top_k_associated,
    train,
    train_sentences,
)
from emergekg.ner import EntityInventory, PERSON

from util import FRIENDS, STRANGERS, TARGET_TOKEN, planted_corpus_object

PLANTED_HYPER = dict(
    dims=48, window=7, epochs=5, workers=1, min_count=1, negative_samples=5, subsample_threshold=0.0
)


# --------------------------------------------------------------------------
# vocabulary


def vocab_of(sentences, **kw):
    h = Hyperparameters(**{"workers": 1, **kw})
    counts = {}
    for s in sentences:
        for w in s:
            counts[w] = counts.get(w, 0) + 1
    return Vocabulary.from_counts(counts, h.min_count, h.subsample_threshold)


def test_vocab_min_count_one_keeps_everything():
    v = vocab_of([["a", "a", "b"]], min_count=1)
    assert set(v.tokens) == {"a", "b"}


def test_vocab_min_count_two_drops_singletons():
    v = vocab_of([["a", "a", "b"]], min_count=2)
    assert "b" not in v and "a" in v


def test_vocab_counts_toy_corpus():
    v = vocab_of([["a", "a", "b"]])
    assert v.counts[v.index["a"]] == 2
    assert v.counts[v.index["b"]] == 1
    assert v.total_tokens == 3


def test_vocab_empty_corpus_rejected():
    with pytest.raises(ValueError, match="empty corpus"):
        Vocabulary.from_counts({}, 1, 1e-3)


def test_vocab_indices_dense_and_deterministic():
    v = vocab_of([["b", "a", "a", "c", "c"]])
    assert sorted(v.index.values()) == [0, 1, 2]
    # frequency desc, then lexicographic
    assert v.tokens == ["a", "c", "b"]


def test_noise_table_uses_three_quarter_power():
    v = vocab_of([["a"] * 16 + ["b"]])
    weights = v.counts.astype(float) ** 0.75
    expected = np.rint(np.cumsum(weights) / weights.sum() * (2**31 - 1)).astype(np.int64)
    expected[-1] = 2**31 - 1
    assert np.array_equal(v.cum_table, expected)


def test_subsampling_targets_frequent_tokens():
    sentences = [["common"] * 900 + [f"rare{i}" for i in range(100)]]
    v = vocab_of(sentences, subsample_threshold=1e-3)
    assert v.keep_prob[v.index["common"]] < 1.0
    assert v.keep_prob[v.index["rare0"]] == 1.0


# --------------------------------------------------------------------------
# gradient oracle


def finite_difference(loss_fn, array, h=1e-5):
    grad = np.zeros_like(array)
    flat = array.ravel()
    g = grad.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = loss_fn()
        flat[i] = orig - h
        down = loss_fn()
        flat[i] = orig
        g[i] = (up - down) / (2 * h)
    return grad


def check_gradients(rng, dims, n_neg):
    center = rng.standard_normal(dims) * 0.5
    context = rng.standard_normal(dims) * 0.5
    negatives = rng.standard_normal((n_neg, dims)) * 0.5
    loss = lambda: negative_sampling_loss(center, context, negatives)  # noqa: E731
    g_center, g_context, g_negs = negative_sampling_gradients(center, context, negatives)
    for analytic, array in ((g_center, center), (g_context, context), (g_negs, negatives)):
        fd = finite_difference(loss, array)
        denom = np.maximum(1e-3, np.maximum(np.abs(fd), np.abs(analytic)))
        rel = np.abs(analytic - fd) / denom
        assert rel.max() < 1e-4, f"relative error {rel.max():.2e}"


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(123)
    for _ in range(20):
        check_gradients(rng, dims=int(rng.integers(2, 11)), n_neg=int(rng.integers(1, 6)))


def test_loss_decreases_after_one_sgd_step():
    rng = np.random.default_rng(5)
    center = rng.standard_normal(6) * 0.3
    context = rng.standard_normal(6) * 0.3
    negatives = rng.standard_normal((3, 6)) * 0.3
    before = negative_sampling_loss(center, context, negatives)
    g_c, g_ctx, g_n = negative_sampling_gradients(center, context, negatives)
    lr = 0.05
    after = negative_sampling_loss(center - lr * g_c, context - lr * g_ctx, negatives - lr * g_n)
    assert after < before


# --------------------------------------------------------------------------
# training behaviour


def test_zero_epochs_leaves_initial_vectors():
    h = Hyperparameters(dims=2, epochs=0, workers=1, seed=9)
    model = train_sentences([["a", "b", "c", "a"]], h)
    syn0, syn1 = _initial_vectors(len(model.vocab), 2, 9)
    assert np.array_equal(model.input_vectors, syn0)
    assert np.array_equal(model.output_vectors, syn1)


def test_initialization_range_and_zero_outputs():
    syn0, syn1 = _initial_vectors(50, 20, 3)
    assert np.all(np.abs(syn0) <= 0.5 / 20)
    assert not np.any(syn1)


def test_training_deterministic_with_fixed_seed():
    corpus, _, _ = planted_corpus_object(20)
    h = Hyperparameters(**{**PLANTED_HYPER, "dims": 16, "seed": 4})
    m1 = train(corpus, h)
    m2 = train(corpus, h)
    assert np.array_equal(m1.input_vectors, m2.input_vectors)
    assert np.array_equal(m1.output_vectors, m2.output_vectors)


def test_batch_words_has_no_effect_single_worker():
    corpus, _, _ = planted_corpus_object(15)
    base = {**PLANTED_HYPER, "dims": 12, "seed": 2, "epochs": 2}
    m1 = train(corpus, Hyperparameters(**{**base, "batch_words": 10}))
    m2 = train(corpus, Hyperparameters(**{**base, "batch_words": 10000}))
    assert np.array_equal(m1.input_vectors, m2.input_vectors)


def test_trained_vectors_finite():
    corpus, _, _ = planted_corpus_object(25)
    model = train(corpus, Hyperparameters(**{**PLANTED_HYPER, "dims": 16, "seed": 1}))
    assert np.all(np.isfinite(model.input_vectors))
    assert np.all(np.isfinite(model.output_vectors))


def test_missing_target_token_is_an_error():
    h = Hyperparameters(workers=1, dims=4, epochs=1)
    with pytest.raises(ValueError, match="absent from vocabulary"):
        train_sentences([["a", "b"]], h, required_token="Missing#Entity")


def test_multiworker_training_runs():
    corpus, tgt, inv = planted_corpus_object(40)
    h = Hyperparameters(**{**PLANTED_HYPER, "dims": 16, "seed": 1, "workers": 3})
    model = train(corpus, h)
    assert np.all(np.isfinite(model.input_vectors))
    assert model.input_vectors.shape[0] == len(model.vocab)


def test_planted_association_recovered_quickly():
    corpus, tgt, inv = planted_corpus_object(100)
    hits = 0
    for seed in range(3):
        model = train(corpus, Hyperparameters(**{**PLANTED_HYPER, "dims": 32, "seed": seed}))
        top = {r.entity for r in top_k_associated(model, tgt, inv, 3)}
        if set(FRIENDS) <= top:
            hits += 1
    assert hits >= 2


def test_planted_tokens_rank_high_over_whole_vocabulary():
    corpus, tgt, inv = planted_corpus_object(313)
    model = train(corpus, Hyperparameters(**{**PLANTED_HYPER, "seed": 0}))
    tv = model.vector(TARGET_TOKEN)
    # independent ranking: brute-force cosine against every vocabulary row
    scores = {
        tok: float(tv @ model.input_vectors[i] / (np.linalg.norm(tv) * np.linalg.norm(model.input_vectors[i])))
        for tok, i in model.vocab.index.items()
        if tok != TARGET_TOKEN
    }
    ranked = sorted(scores, key=lambda t: -scores[t])
    assert set(FRIENDS) <= set(ranked[:3])
    for friend in FRIENDS:
        for stranger in STRANGERS:
            assert scores[friend] > scores[stranger]


# --------------------------------------------------------------------------
# cosine + ranking


def test_cosine_identity():
    v = np.array([1.0, 2.0, -3.0])
    assert cosine(v, v) == pytest.approx(1.0)


def test_cosine_orthogonal():
    assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(0.0)


def test_cosine_scale_invariant():
    assert cosine(np.array([1.0, 1.0]), np.array([2.0, 2.0])) == pytest.approx(1.0)


def test_cosine_zero_vector_rejected():
    with pytest.raises(ValueError, match="zero vector"):
        cosine(np.zeros(3), np.ones(3))


def test_cosine_dimension_mismatch_rejected():
    with pytest.raises(ValueError, match="mismatch"):
        cosine(np.ones(3), np.ones(4))


def small_model():
    vocab = Vocabulary.from_tokens(["T", "a", "b", "c", "d"])
    vecs = np.array(
        [
            [1.0, 0.0],
            [0.9, 0.1],   # a: closest
            [0.5, 0.5],   # b
            [0.5, 0.5],   # c: tied with b
            [-1.0, 0.0],  # d: opposite
        ]
    )
    model = EmbeddingModel(vecs, None, vocab, Hyperparameters(dims=2))
    inv = EntityInventory(
        mentions=(), distinct={t: (PERSON, 1) for t in ["a", "b", "c", "d"]}
    )
    target = TargetEntity(surface="T", fused_token="T", coarse_type_hint=PERSON)
    return model, target, inv


def test_top_k_sorted_with_lexicographic_ties():
    model, target, inv = small_model()
    results = top_k_associated(model, target, inv, 4)
    assert [r.entity for r in results] == ["a", "b", "c", "d"]
    assert results[1].score == pytest.approx(results[2].score)


def test_top_k_truncates_to_candidate_count():
    model, target, inv = small_model()
    assert len(top_k_associated(model, target, inv, 10)) == 4


def test_top_k_excludes_target_and_scores_bounded():
    model, target, inv = small_model()
    results = top_k_associated(model, target, inv, 10)
    assert all(r.entity != "T" for r in results)
    for r in results:
        assert -1 - 1e-9 <= r.score <= 1 + 1e-9


def test_top_k_candidates_carry_inventory_types():
    model, target, inv = small_model()
    for r in top_k_associated(model, target, inv, 4):
        assert inv.distinct[r.entity][0] == r.coarse_type


def test_top_k_empty_inventory_warns_and_returns_empty():
    model, target, _ = small_model()
    empty = EntityInventory(mentions=(), distinct={})
    assert top_k_associated(model, target, empty, 3) == []


def test_ranking_scale_invariant():
    model, target, inv = small_model()
    before = [r.entity for r in top_k_associated(model, target, inv, 4)]
    scaled = EmbeddingModel(model.input_vectors * 37.5, None, model.vocab, model.hyper)
    after = [r.entity for r in top_k_associated(scaled, target, inv, 4)]
    assert before == after


# --------------------------------------------------------------------------
# persistence


def test_model_save_load_round_trip(tmp_path):
    corpus, tgt, inv = planted_corpus_object(20)
    model = train(corpus, Hyperparameters(**{**PLANTED_HYPER, "dims": 8, "seed": 3}))
    path = tmp_path / "model.txt"
    model.save(str(path))
    loaded = EmbeddingModel.load(str(path))
    assert loaded.vocab.tokens == model.vocab.tokens
    assert np.array_equal(loaded.input_vectors, model.input_vectors)
    before = [(r.entity, r.score) for r in top_k_associated(model, tgt, inv, 4)]
    after = [(r.entity, r.score) for r in top_k_associated(loaded, tgt, inv, 4)]
    assert before == after


def test_model_header_format(tmp_path):
    corpus, _, _ = planted_corpus_object(10)
    model = train(corpus, Hyperparameters(**{**PLANTED_HYPER, "dims": 4, "seed": 3, "epochs": 1}))
    path = tmp_path / "m.txt"
    model.save(str(path))
    lines = path.read_text().splitlines()
    V, dims = map(int, lines[0].split())
    assert V == len(model.vocab) and dims == 4
    assert len(lines) == V + 1
    assert all(len(line.split(" ")) == dims + 1 for line in lines[1:])


# --------------------------------------------------------------------------
# backends


needs_numba = pytest.mark.skipif(not backend.numba_available(), reason="numba not installed")


def test_env_flag_selects_numpy_path(monkeypatch):
    monkeypatch.setenv("EMERGEKG_DISABLE_NUMBA", "1")
    assert backend.active_backend() == "numpy"
    monkeypatch.delenv("EMERGEKG_DISABLE_NUMBA")


@needs_numba
def test_lcg_streams_identical_across_backends():
    from numba import njit

    from emergekg import _sgns_numpy as sp

    @njit(cache=False)
    def advance(state, n):
        out = np.empty(n, dtype=np.uint64)
        mul = np.uint64(sp.LCG_MUL)
        inc = np.uint64(sp.LCG_INC)
        for i in range(n):
            state = state * mul + inc
            out[i] = state
        return out

    s0 = sp.splitmix64(99)
    compiled = [int(x) for x in advance(np.uint64(s0), 64)]
    state = s0
    reference = []
    for _ in range(64):
        state = sp.lcg_next(state)
        reference.append(state)
    assert compiled == reference


@needs_numba
def test_kernels_agree_on_identical_streams():
    from emergekg import _sgns_numba as sb
    from emergekg import _sgns_numpy as sp

    rng = np.random.default_rng(0)
    V, D = 15, 6
    sents = rng.integers(0, V, size=300).astype(np.int64)
    offsets = np.array([0, 120, 300], dtype=np.int64)
    counts = np.bincount(sents, minlength=V).astype(np.float64) + 1
    keep_prob = np.full(V, 0.85)
    w = counts**0.75
    cum = np.rint(np.cumsum(w) / w.sum() * (2**31 - 1)).astype(np.int64)
    cum[-1] = 2**31 - 1
    s0 = sp.splitmix64(11)

    def run(mod, cast):
        syn0 = (np.random.default_rng(1).random((V, D)) - 0.5) / D
        syn1 = np.zeros((V, D))
        t, st = mod.train_job(
            sents, offsets, syn0, syn1, keep_prob, cum, 4, 5, 0.025, 0.025 / 1e4, 0, 300, cast(s0)
        )
        return syn0, syn1, int(t), int(st)

    a0, a1, ta, sa = run(sp, lambda s: s)
    b0, b1, tb, sb_ = run(sb.__wrapped__ if hasattr(sb, "__wrapped__") else sb, np.uint64)
    assert (ta, sa) == (tb, sb_)
    np.testing.assert_allclose(a0, b0, atol=1e-12)
    np.testing.assert_allclose(a1, b1, atol=1e-12)


@needs_numba
def test_training_identical_streams_across_backends(monkeypatch):
    corpus, tgt, inv = planted_corpus_object(30)
    h = Hyperparameters(**{**PLANTED_HYPER, "dims": 12, "seed": 6, "epochs": 2})
    m_numba = train(corpus, h)
    monkeypatch.setenv("EMERGEKG_DISABLE_NUMBA", "1")
    m_numpy = train(corpus, h)
    np.testing.assert_allclose(m_numba.input_vectors, m_numpy.input_vectors, atol=1e-10)


def test_build_vocab_over_corpus(extended_corpus):
    h = Hyperparameters(workers=1)
    v = build_vocab(extended_corpus, h)
    assert "Saeedeh#Shekarpour" in v
    assert all(c >= h.min_count for c in v.counts)
