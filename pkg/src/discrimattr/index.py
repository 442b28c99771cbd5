"""Sparse explicit vector space materialized as an inverted index.

Documents are (document_id, field, tokens) triples; a document_id may span
several fields (e.g. the semantic-role segments of one definition sense).
Posting weights are idf-derived: ln(N / df), with unseen lemmas mapped to
the sentinel ln(N + 1).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import DataFormatError, EmptyCorpusError

FORMAT_VERSION = 1


@dataclass(frozen=True, order=True)
class Posting:
    document_id: str
    field: str
    weight: float

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError("posting weight must be nonnegative")


class SparseVector:
    """Nonnegative weights keyed by lemma; zero entries are never stored."""

    def __init__(self, entries=None):
        self.entries = {k: v for k, v in (entries or {}).items() if v != 0.0}

    def __eq__(self, other):
        return isinstance(other, SparseVector) and self.entries == other.entries

    def __len__(self):
        return len(self.entries)

    def __bool__(self):
        return bool(self.entries)


def cosine(v1: SparseVector, v2: SparseVector) -> float:
    """Cosine similarity over shared lemmas; 0 if either vector is empty."""
    if not v1 or not v2:
        return 0.0
    dot = sum(w * v2.entries[k] for k, w in v1.entries.items() if k in v2.entries)
    n1 = math.sqrt(sum(w * w for w in v1.entries.values()))
    n2 = math.sqrt(sum(w * w for w in v2.entries.values()))
    if n1 == 0.0 or n2 == 0.0:
        return 0.0
    return min(1.0, dot / (n1 * n2))


class ExplicitVectorSpace:
    """Inverted index over lemmas with idf posting weights.

    Immutable after `build`; safe for concurrent readers.
    """

    def __init__(self, postings, document_count, document_frequency):
        self.postings = postings
        self.document_count = document_count
        self.document_frequency = document_frequency

    @classmethod
    def build(cls, documents) -> "ExplicitVectorSpace":
        """Build from (document_id, field, token-list) records.

        Duplicate (document_id, field) pairs with identical tokens are
        collapsed; with differing tokens they are rejected.
        """
        seen = {}
        for doc_id, fld, tokens in documents:
            key = (str(doc_id), str(fld))
            toks = tuple(t.lemma if hasattr(t, "lemma") else str(t) for t in tokens)
            if key in seen and seen[key] != toks:
                raise DataFormatError(
                    f"duplicate document ({key[0]!r}, field {key[1]!r}) with differing tokens"
                )
            seen[key] = toks

        doc_ids = sorted({doc_id for doc_id, _ in seen})
        n = len(doc_ids)

        docs_with = {}
        for (doc_id, _), toks in seen.items():
            for lemma in toks:
                docs_with.setdefault(lemma, set()).add(doc_id)
        df = {lemma: len(ids) for lemma, ids in docs_with.items()}

        postings = {}
        for (doc_id, fld), toks in sorted(seen.items()):
            for lemma in set(toks):
                w = math.log(n / df[lemma])
                postings.setdefault(lemma, []).append(Posting(doc_id, fld, w))
        for plist in postings.values():
            plist.sort()
        return cls(postings=postings, document_count=n, document_frequency=df)

    def idf(self, lemma: str) -> float:
        """ln(N/df); unseen lemmas get the sentinel ln(N+1)."""
        if self.document_count == 0:
            raise EmptyCorpusError("idf undefined on an empty space")
        df = self.document_frequency.get(lemma)
        if df is None:
            return math.log(self.document_count + 1)
        return math.log(self.document_count / df)

    def documents_containing(self, lemma: str) -> list[Posting]:
        return self.postings.get(lemma, [])

    def vector(self, document_id: str) -> SparseVector:
        """Explicit representation of one document_id across all its fields.

        Lemmas repeated across fields (e.g. two senses) merge by maximum
        weight; with pure idf weights all occurrences agree anyway.
        """
        entries = {}
        for lemma, plist in self.postings.items():
            for p in plist:
                if p.document_id == document_id:
                    entries[lemma] = max(entries.get(lemma, 0.0), p.weight)
        return SparseVector(entries)

    def to_dict(self):
        return {
            "format_version": FORMAT_VERSION,
            "document_count": self.document_count,
            "document_frequency": dict(sorted(self.document_frequency.items())),
            "postings": {
                lemma: [[p.document_id, p.field, p.weight] for p in plist]
                for lemma, plist in sorted(self.postings.items())
            },
        }

    @classmethod
    def from_dict(cls, data):
        postings = {
            lemma: [Posting(d, f, w) for d, f, w in plist]
            for lemma, plist in data["postings"].items()
        }
        return cls(
            postings=postings,
            document_count=data["document_count"],
            document_frequency=dict(data["document_frequency"]),
        )


def dump_json(obj: dict, path) -> None:
    """Canonical JSON dump: sorted keys, fixed separators, byte-stable."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        fh.write("\n")


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
