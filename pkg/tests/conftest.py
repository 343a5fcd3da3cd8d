import logging
import os

import pytest

from emergekg.corpus import (
    FixturePageFetcher,
    FixtureSearchClient,
    TargetEntity,
    build_enhanced_corpus,
    build_extended_corpus,
    extend_snippets,
    fetch_snippets,
    load_stopwords,
    preprocess,
)
from emergekg.ner import AnnotationFileBackend, recognize_corpus_docs, transform_corpus
from emergekg.wordnet import NounLexicon

logging.disable(logging.WARNING)

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURE_DIR = os.path.join(REPO_ROOT, "fixtures", "saeedeh")


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords()


@pytest.fixture(scope="session")
def target():
    return TargetEntity.from_surface("Saeedeh Shekarpour", "PERSON")


@pytest.fixture(scope="session")
def fixture_docs(fixture_dir, stopwords):
    snippets = fetch_snippets("Saeedeh Shekarpour", 8, FixtureSearchClient(fixture_dir))
    docs = extend_snippets(snippets, FixturePageFetcher(fixture_dir), max_workers=1)
    return [preprocess(d, stopwords) for d in docs]


@pytest.fixture(scope="session")
def inventory(fixture_docs, fixture_dir, target):
    backend = AnnotationFileBackend(os.path.join(fixture_dir, "annotations"))
    return recognize_corpus_docs(fixture_docs, backend, target)


@pytest.fixture(scope="session")
def extended_corpus(fixture_docs, target, inventory):
    return transform_corpus(build_extended_corpus(fixture_docs, target), inventory)


@pytest.fixture(scope="session")
def enhanced_corpus(fixture_docs, target, inventory):
    return transform_corpus(build_enhanced_corpus(fixture_docs, target), inventory)


@pytest.fixture(scope="session")
def raw_extended_corpus(fixture_docs, target):
    return build_extended_corpus(fixture_docs, target)


@pytest.fixture(scope="session")
def lexicon():
    return NounLexicon.load()
