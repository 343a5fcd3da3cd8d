"""Shared builders for embedding tests."""

from emergekg.corpus import ExtendedDocument, TargetEntity, Token, build_extended_corpus
from emergekg.ner import PERSON, EntityInventory

TARGET_TOKEN = "Target#Person"
FRIENDS = ("Friend#One", "Friend#Two")
STRANGERS = ("Stranger#One", "Stranger#Two")


def doc_from_tokens(words, rank):
    text = " ".join(words)
    tokens = []
    pos = 0
    for w in words:
        tokens.append(Token(w, pos, pos + len(w)))
        pos += len(w) + 1
    return ExtendedDocument(source_rank=rank, url="", raw_text=text, tokens=tuple(tokens))


def planted_corpus(n_sentences_per_side=313):
    """Synthetic corpus: the friend tokens always sit within the training
    window of the target, the stranger tokens never share a sentence with
    it.  One shared filler pool feeds both sentence kinds, so fillers
    co-occur with everything and only the friends align tightly with the
    target.  Roughly 16 tokens per sentence pair, ~5k at the default."""
    fillers = [f"ctx{i}" for i in range(30)]
    sentences = []
    for s in range(n_sentences_per_side):
        fa = [fillers[(5 * s + j) % len(fillers)] for j in range(5)]
        fb = [fillers[(5 * s + 2 + j) % len(fillers)] for j in range(6)]
        sentences.append([fa[0], FRIENDS[0], TARGET_TOKEN, FRIENDS[1], fa[1], fa[2], fa[3], fa[4]])
        sentences.append([fb[0], STRANGERS[0], fb[1], STRANGERS[1], fb[2], fb[3], fb[4], fb[5]])
    return sentences


def planted_corpus_object(n_sentences_per_side=313):
    sentences = planted_corpus(n_sentences_per_side)
    docs = [doc_from_tokens(words, rank=i + 1) for i, words in enumerate(sentences)]
    target = TargetEntity(surface="Target Person", fused_token=TARGET_TOKEN, coarse_type_hint=PERSON)
    inventory = EntityInventory(
        mentions=(),
        distinct={tok: (PERSON, n_sentences_per_side) for tok in FRIENDS + STRANGERS},
    )
    return build_extended_corpus(docs, target), target, inventory
