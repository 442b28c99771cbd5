"""Converters from external dictionary formats to the role-annotated
JSON-lines definition format.

The native format is one JSON object per line:

    {"term": "planet", "sense": "planet.n.01",
     "segments": [{"role": "supertype", "text": "celestial body"},
                  {"role": "differentia_event", "text": "orbiting a star"}]}

WordNet 3.0 mapping: a synset's first lemma name becomes `term`, the
synset identifier (e.g. "planet.n.01") becomes `sense`, and each
role-labeled span of the gloss becomes one segment. Role labels must
already be assigned upstream (e.g. by a definition role labeler); this
module only reshapes, it never predicts roles.
"""
from __future__ import annotations

import json

from .definitions import SEMANTIC_ROLES
from .errors import DataFormatError


def wordnet_records_to_jsonl(records, path) -> int:
    """Write (term, sense_id, [(role, text), ...]) tuples as JSON-lines.

    Returns the number of records written. Unknown role labels are
    rejected here rather than at load time, so a bad upstream labeling
    fails fast.
    """
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for term, sense_id, segments in records:
            for role, _ in segments:
                if role not in SEMANTIC_ROLES:
                    raise DataFormatError(
                        f"unknown semantic role {role!r} for {term}/{sense_id}"
                    )
            rec = {
                "term": term,
                "sense": sense_id,
                "segments": [{"role": role, "text": text} for role, text in segments],
            }
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
            count += 1
    return count
