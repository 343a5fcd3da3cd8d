import math

import numpy as np
import pytest

from emergekg.corpus import ExtendedDocument, TargetEntity, build_extended_corpus, preprocess
from emergekg.errors import LexiconError
from emergekg.ner import PERSON, EntityInventory, EntityMention, build_inventory
from emergekg.typeinfer import entail_types, extract_noun_phrases, prune_named_entities, score_terms
from emergekg.wordnet import NounLexicon

TABLE_SNIPPET = (
    "Saeedeh Shekarpour Assistant Professor Department of Computer Science "
    "University of Dayton News and Opportunities am founding CANAB: Cognitive "
    "ANalytics Lab in the University of Dayton, looking for talented, "
    "hardworking and passionate students."
)


def doc(text, rank=1):
    return ExtendedDocument(source_rank=rank, url="", raw_text=text)


# --------------------------------------------------------------------------
# independent oracle: literal reimplementation of the three scoring formulas


def oracle_scores(doc_terms):
    all_terms = sorted({t for terms in doc_terms for t in terms})
    N = len(doc_terms)
    out = {}
    for term in all_terms:
        tf = 0.0
        df = 0
        for terms in doc_terms:
            f = terms.count(term)
            tf += math.log(1 + f)
            if f > 0:
                df += 1
        if df == 0:
            continue
        idf = N / df
        out[term] = (tf, df, idf, tf * idf)
    return out


# --------------------------------------------------------------------------
# score_terms


def test_scoring_three_doc_example():
    # counts (2, 0, 1) across three documents
    doc_terms = [["t", "t", "x"], ["x"], ["t", "y"]]
    stats = {s.term: s for s in score_terms(doc_terms)}
    t = stats["t"]
    assert t.tf == pytest.approx(math.log(3) + math.log(2))
    assert t.df == 2
    assert t.idf == pytest.approx(1.5)
    assert t.tfidf == pytest.approx(1.5 * (math.log(3) + math.log(2)))
    assert t.tfidf == pytest.approx(2.687, abs=1e-3)


def test_scoring_term_once_in_every_document():
    N = 5
    stats = {s.term: s for s in score_terms([["z", "pad"]] * N)}
    z = stats["z"]
    assert z.tf == pytest.approx(N * math.log(2))
    assert z.idf == 1.0
    assert z.tfidf == pytest.approx(N * math.log(2))


def test_scoring_excludes_absent_terms():
    stats = score_terms([["a"], ["b"]])
    assert {s.term for s in stats} == {"a", "b"}


def test_scoring_matches_oracle_bit_exact_randomized():
    rng = np.random.default_rng(42)
    vocab = [f"term{i}" for i in range(30)]
    for _ in range(50):
        n_docs = int(rng.integers(1, 6))
        doc_terms = [
            [vocab[int(rng.integers(0, 30))] for _ in range(int(rng.integers(0, 25)))]
            for _ in range(n_docs)
        ]
        expected = oracle_scores(doc_terms)
        got = score_terms(doc_terms)
        assert {s.term for s in got} == set(expected)
        for s in got:
            tf, df, idf, tfidf = expected[s.term]
            assert s.tf == tf and s.df == df and s.idf == idf and s.tfidf == tfidf


def test_scoring_invariants_randomized():
    rng = np.random.default_rng(7)
    for _ in range(20):
        doc_terms = [
            [f"w{int(rng.integers(0, 10))}" for _ in range(int(rng.integers(1, 15)))]
            for _ in range(int(rng.integers(1, 5)))
        ]
        for s in score_terms(doc_terms):
            assert s.tfidf == s.tf * s.idf
            assert s.idf >= 1.0
            assert s.tf > 0.0
            assert 1 <= s.df <= len(doc_terms)


def test_scoring_monotone_in_single_document_count():
    base = [["q", "pad"], ["pad"]]
    more = [["q", "q", "pad"], ["pad"]]
    s_base = {s.term: s for s in score_terms(base)}["q"]
    s_more = {s.term: s for s in score_terms(more)}["q"]
    assert s_more.tf > s_base.tf
    assert s_more.tfidf > s_base.tfidf


def test_duplicating_a_document_recomputes_coherently():
    doc_terms = [["a", "b"], ["b"]]
    dup = doc_terms + [doc_terms[0]]
    expected = oracle_scores(dup)
    for s in score_terms(dup):
        assert s.tfidf == expected[s.term][3]


# --------------------------------------------------------------------------
# pruning


def table_fixture(stopwords):
    d = preprocess(doc(TABLE_SNIPPET), stopwords)
    target = TargetEntity.from_surface("Saeedeh Shekarpour", PERSON)
    surfaces = [
        ("Saeedeh Shekarpour", "PERSON"),
        ("Department of Computer Science", "ORGANIZATION"),
        ("University of Dayton", "ORGANIZATION"),
        ("CANAB", "ORGANIZATION"),
        ("Cognitive ANalytics Lab", "ORGANIZATION"),
    ]
    mentions = []
    for surface, ctype in surfaces:
        start = 0
        while (idx := TABLE_SNIPPET.find(surface, start)) >= 0:
            mentions.append(EntityMention.create(surface, ctype, 1, idx, idx + len(surface)))
            start = idx + len(surface)
    return build_extended_corpus([d], target), build_inventory(mentions)


def test_prune_removes_entity_words_keeps_type_words(stopwords):
    corpus, inv = table_fixture(stopwords)
    pruned = prune_named_entities(corpus, inv, stopwords)
    texts = pruned.documents[0].token_texts()
    for gone in ("Saeedeh", "Shekarpour", "Dayton", "Department", "University", "CANAB"):
        assert gone not in texts
    for kept in ("Assistant", "Professor", "News", "students"):
        assert kept in texts


def test_prune_without_mentions_or_stopwords_is_identity():
    d = preprocess(doc("plain words stay put"), frozenset())
    corpus = build_extended_corpus([d], TargetEntity.from_surface("X"))
    inv = EntityInventory(mentions=(), distinct={})
    pruned = prune_named_entities(corpus, inv, frozenset())
    assert pruned.documents[0].tokens == d.tokens


def test_prune_applies_to_every_replica(stopwords):
    from emergekg.corpus import build_enhanced_corpus

    d1 = preprocess(doc("Paris visit notes", rank=1), stopwords)
    d2 = preprocess(doc("Paris again with friends", rank=2), stopwords)
    target = TargetEntity.from_surface("Someone Else")
    mention = EntityMention.create("Paris", "LOCATION", 1, 0, 5)
    c = build_enhanced_corpus([d1, d2], target)
    pruned = prune_named_entities(c, build_inventory([mention]), stopwords)
    assert len(pruned) == 3
    for dd in pruned.documents:
        assert "Paris" not in dd.token_texts()


# --------------------------------------------------------------------------
# noun phrase extraction


def test_extract_fixture_terms(stopwords, lexicon):
    corpus, inv = table_fixture(stopwords)
    pruned = prune_named_entities(corpus, inv, stopwords)
    terms = extract_noun_phrases(pruned.documents[0], lexicon)
    assert "assistant professor" in terms
    assert "news" in terms
    assert "students" in terms


def test_extract_non_nouns_yield_nothing(lexicon):
    d = preprocess(doc("walked quickly and spoke loudly"), frozenset())
    assert extract_noun_phrases(d, lexicon) == []


def test_extract_phrase_plus_head(lexicon):
    d = preprocess(doc("quantum computing research"), frozenset())
    for tok in d.tokens:
        assert lexicon.is_noun(tok.text)
    terms = extract_noun_phrases(d, lexicon)
    assert terms == ["quantum computing research", "research"]


def test_extract_breaks_runs_at_gaps(lexicon):
    # removed tokens leave a raw-text gap, so nouns on each side stay separate
    d = preprocess(doc("news and statistics"), frozenset({"and"}))
    terms = extract_noun_phrases(d, lexicon)
    assert terms == ["news", "statistics"]


def test_extract_counts_multiplicity(lexicon):
    d = preprocess(doc("news today news tomorrow news"), frozenset({"today", "tomorrow"}))
    assert extract_noun_phrases(d, lexicon).count("news") == 3


# --------------------------------------------------------------------------
# entail_types


def test_entail_singleton(lexicon):
    d = preprocess(doc("researcher walked slowly"), frozenset())
    corpus = build_extended_corpus([d], TargetEntity.from_surface("X"))
    inv = EntityInventory(mentions=(), distinct={})
    result = entail_types(corpus, inv, 1, lexicon, frozenset())
    assert len(result.types) == 1
    assert result.types[0][0] == "researcher"


def test_entail_no_terms_is_empty_status(lexicon):
    d = preprocess(doc("walked quickly"), frozenset())
    corpus = build_extended_corpus([d], TargetEntity.from_surface("X"))
    inv = EntityInventory(mentions=(), distinct={})
    result = entail_types(corpus, inv, 3, lexicon, frozenset())
    assert not result
    assert result.types == ()


def test_entail_order_matches_oracle_on_toy_corpora(lexicon):
    nouns = ["news", "student", "professor", "career", "award"]
    rng = np.random.default_rng(3)
    for _ in range(10):
        docs = []
        for rank in range(1, int(rng.integers(2, 6)) + 1):
            words = [nouns[int(rng.integers(0, len(nouns)))] for _ in range(int(rng.integers(1, 12)))]
            # separator breaks noun runs so terms are single nouns
            text = " xx ".join(words)
            docs.append(preprocess(doc(text, rank=rank), frozenset()))
        corpus = build_extended_corpus(docs, TargetEntity.from_surface("X"))
        inv = EntityInventory(mentions=(), distinct={})
        result = entail_types(corpus, inv, 3, lexicon, frozenset())
        doc_terms = [extract_noun_phrases(d, lexicon) for d in corpus.documents]
        expected = oracle_scores(doc_terms)
        ranked = sorted(expected, key=lambda t: (-expected[t][3], t))[:3]
        assert result.terms() == ranked


def test_entail_validates_m(lexicon, extended_corpus, inventory):
    with pytest.raises(ValueError):
        entail_types(extended_corpus, inventory, 0, lexicon)


def test_no_type_term_equals_entity_word(raw_extended_corpus, inventory, lexicon, stopwords):
    result = entail_types(raw_extended_corpus, inventory, 10, lexicon, stopwords)
    entity_words = set()
    for m in inventory.mentions:
        entity_words.update(w.lower() for w in m.surface.split())
    for term in result.terms():
        for word in term.split():
            assert word not in entity_words


def test_fixture_top_terms(raw_extended_corpus, inventory, lexicon, stopwords):
    result = entail_types(raw_extended_corpus, inventory, 4, lexicon, stopwords)
    top = [t.lower() for t in result.terms()]
    assert top[0] == "professor"
    assert "assistant professor" in top
    assert "students" in top and "news" in top


# --------------------------------------------------------------------------
# lexicon


def test_lexicon_plural_rules(lexicon):
    assert lexicon.noun_form("students") == "student"
    assert lexicon.noun_form("Students") == "student"
    assert lexicon.noun_form("classes") == "class"
    assert lexicon.noun_form("matrices") == "matrix"   # exception list
    assert lexicon.noun_form("children") == "child"
    assert lexicon.noun_form("opportunities") == "opportunity"


def test_lexicon_exact_and_missing(lexicon):
    assert lexicon.is_noun("news")
    assert not lexicon.is_noun("quickly")
    assert lexicon.noun_form("zzqx") is None


def test_lexicon_missing_directory_fails_at_load(tmp_path):
    with pytest.raises(LexiconError):
        NounLexicon.load(str(tmp_path / "nowhere"))
