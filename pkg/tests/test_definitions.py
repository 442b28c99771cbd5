import json

import pytest

from discrimattr.definitions import (expand_supertypes, has_property_dbm,
                                     load_definitions)
from discrimattr.errors import DataFormatError
from discrimattr.text import normalize
from discrimattr.types import Term

from conftest import term


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


def test_supertype_head_extraction(definition_store):
    # "celestial body" -> head is the last non-stopword token
    assert definition_store.supertype_edges["planet"] == ("body",)
    assert definition_store.supertype_edges["moon"] == ("satellite",)


def test_space_documents_are_segments(definition_store):
    postings = definition_store.space.documents_containing("wine")
    assert [(p.document_id, p.field) for p in postings] == [
        ("brandy", "brandy.n.01/differentia_event")
    ]


def test_empty_file(tmp_path, lemma_table, stopwords):
    p = tmp_path / "empty.jsonl"
    p.write_text("", encoding="utf-8")
    store = load_definitions(p, lemma_table, stopwords)
    assert store.records == {}
    assert not store.has_property(term("x"), term("y")).member


def test_duplicate_sense_rejected(tmp_path, lemma_table, stopwords):
    rec = {"term": "apple", "sense": "s1", "segments": [{"role": "supertype", "text": "fruit"}]}
    p = write_jsonl(tmp_path / "dup.jsonl", [rec, rec])
    with pytest.raises(DataFormatError) as exc:
        load_definitions(p, lemma_table, stopwords)
    assert "2" in str(exc.value)  # error names the line


def test_unknown_role_rejected(tmp_path, lemma_table, stopwords):
    rec = {"term": "apple", "sense": "s1", "segments": [{"role": "genus", "text": "fruit"}]}
    p = write_jsonl(tmp_path / "badrole.jsonl", [rec])
    with pytest.raises(DataFormatError):
        load_definitions(p, lemma_table, stopwords)


def test_malformed_json_names_line(tmp_path, lemma_table, stopwords):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"term": "a", "sense": "s", "segments": []}\n{oops\n', encoding="utf-8")
    with pytest.raises(DataFormatError) as exc:
        load_definitions(p, lemma_table, stopwords)
    assert exc.value.line == 2


def test_expand_no_supertypes(definition_store):
    recs = expand_supertypes(term("body"), definition_store, max_depth=3)
    assert [r.term.lemma for r in recs] == ["body"]


def test_expand_planet_reaches_body(definition_store):
    recs = expand_supertypes(term("planet"), definition_store, max_depth=1)
    assert [r.term.lemma for r in recs] == ["planet", "body"]


def test_expand_depth_zero_is_own_records(definition_store):
    recs = expand_supertypes(term("planet"), definition_store, max_depth=0)
    assert [r.term.lemma for r in recs] == ["planet"]


def test_expand_cycle_terminates(tmp_path, lemma_table, stopwords):
    records = [
        {"term": "a", "sense": "s1", "segments": [{"role": "supertype", "text": "b"}]},
        {"term": "b", "sense": "s1", "segments": [{"role": "supertype", "text": "a"}]},
    ]
    store = load_definitions(write_jsonl(tmp_path / "cycle.jsonl", records), lemma_table, stopwords)
    recs = expand_supertypes(term("a"), store, max_depth=5)
    assert [r.term.lemma for r in recs] == ["a", "b"]


def test_has_property_brandy_wine(definition_store):
    res = has_property_dbm(term("brandy"), term("wine"), definition_store)
    assert res.member
    assert res.evidence[0].role == "differentia_event"
    assert res.evidence[0].term == "brandy"


def test_has_property_inheritance_depth(definition_store):
    assert not has_property_dbm(term("moon"), term("body"), definition_store, max_depth=0).member
    res = has_property_dbm(term("moon"), term("body"), definition_store, max_depth=1)
    assert res.member
    assert res.evidence[0].path == ("moon", "satellite")


def test_self_mention_false(definition_store):
    assert not has_property_dbm(term("apple"), term("apple"), definition_store, max_depth=0).member


def test_unknown_term_empty(definition_store):
    assert expand_supertypes(term("zzz"), definition_store, 3) == []
    assert not has_property_dbm(term("zzz"), term("red"), definition_store).member


def test_inheritance_monotonic(definition_store):
    terms = list(definition_store.records)
    attrs = ["body", "fruit", "wine", "liquor", "red", "plant"]
    for t in terms:
        for a in attrs:
            prev = set()
            for depth in range(4):
                res = has_property_dbm(term(t), term(a), definition_store, max_depth=depth)
                ev = {(e.term, e.sense_id, e.role) for e in res.evidence}
                assert prev <= ev
                prev = ev


def test_evidence_soundness(definition_store, lemma_table, stopwords):
    for t in definition_store.records:
        for a in ["body", "fruit", "wine", "yellow"]:
            res = has_property_dbm(term(t), term(a), definition_store)
            for e in res.evidence:
                lemmas = [x.lemma for x in normalize(e.text, lemma_table, stopwords)]
                assert a in lemmas


def test_depth0_oracle_equivalence(definition_store):
    # brute force over the term's own segments
    vocab = {t.lemma for recs in definition_store.records.values()
             for r in recs for s in r.segments for t in s.tokens}
    for t, recs in definition_store.records.items():
        for a in vocab:
            brute = any(a in [x.lemma for x in s.tokens] for r in recs for s in r.segments)
            res = has_property_dbm(term(t), Term(a, a), definition_store, max_depth=0)
            assert res.member == brute
