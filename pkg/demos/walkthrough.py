"""End-to-end walkthrough on the bundled test fixtures.

Builds the three knowledge stores in memory, classifies a few triples,
and prints the explanation for each positive verdict.

Run from the repository root:

    python3 demos/walkthrough.py
"""
from pathlib import Path

from discrimattr import (CascadeConfig, StoreSet, classify, load_assertions,
                         load_definitions, load_scene_graphs)
from discrimattr.text import lemma_of, load_lemma_table, load_stopwords
from discrimattr.types import Term, Triple

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def main():
    lemma_table = load_lemma_table(DATA / "lemmas.tsv")
    stopwords = load_stopwords(DATA / "stopwords.txt")

    stores = StoreSet(
        definitions=load_definitions(DATA / "definitions.jsonl", lemma_table, stopwords),
        commonsense=load_assertions(DATA / "assertions.tsv", lemma_table),
        visual=load_scene_graphs(
            [DATA / "scene_regions.jsonl", DATA / "scene_relationships.jsonl"],
            lemma_table, stopwords,
        ),
    )

    def term(s):
        return Term(s, lemma_of(s, lemma_table))

    queries = [
        ("apple", "banana", "red"),
        ("brandy", "whiskey", "wine"),
        ("cognac", "whiskey", "french"),
        ("cat", "lion", "whiskers"),
        ("planet", "moon", "body"),
    ]
    config = CascadeConfig()
    for p, c, a in queries:
        verdict = classify(Triple(term(p), term(c), term(a)), stores, config)
        label = 1 if verdict.discriminative else 0
        print(f"({p}, {c}, {a}) -> {label}")
        if verdict.discriminative:
            print(f"  [{verdict.deciding_component}] {verdict.explanation.rendered_text}")

    # the same triple can flip once supertype inheritance is enabled
    t = Triple(term("planet"), term("moon"), term("body"))
    shallow = classify(t, stores, CascadeConfig(dbm_max_depth=0))
    print(f"(planet, moon, body) without supertype expansion -> "
          f"{1 if shallow.discriminative else 0}")


if __name__ == "__main__":
    main()
