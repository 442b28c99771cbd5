import pathlib

import pytest

from discrimattr import load_assertions, load_definitions, load_scene_graphs
from discrimattr.cascade import StoreSet
from discrimattr.text import load_lemma_table, load_stopwords

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def lemma_table():
    return load_lemma_table(DATA / "lemmas.tsv")


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords(DATA / "stopwords.txt")


@pytest.fixture(scope="session")
def definition_store(lemma_table, stopwords):
    return load_definitions(DATA / "definitions.jsonl", lemma_table, stopwords)


@pytest.fixture(scope="session")
def ckg_store(lemma_table):
    return load_assertions(DATA / "assertions.tsv", lemma_table)


@pytest.fixture(scope="session")
def visual_store(lemma_table, stopwords):
    return load_scene_graphs(
        [DATA / "scene_regions.jsonl", DATA / "scene_relationships.jsonl"],
        lemma_table,
        stopwords,
    )


@pytest.fixture(scope="session")
def stores(definition_store, ckg_store, visual_store):
    return StoreSet(definitions=definition_store, commonsense=ckg_store, visual=visual_store)


def term(surface, lemma=None):
    from discrimattr.types import Term

    return Term(surface, lemma if lemma is not None else surface.lower())
