"""Command-line front-end: build indexes, classify triples, render
explanations, and evaluate against a gold standard.

Subcommands: build, classify, explain, evaluate, report.
Exit codes: 0 success, 1 usage/config error, 2 data error.
Relative data paths resolve against $DISCRIMATTR_DATA_DIR when set,
otherwise against the config file's directory.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import commonsense, definitions, evaluation, text, visual
from .cascade import CascadeConfig, StoreSet, classify_batch, render_explanation
from .commonsense import Assertion, CkgStore, EdgeEvidence
from .definitions import DefinitionEvidence
from .errors import ConfigError, DataFormatError, DiscrimAttrError
from .index import dump_json, load_json
from .text import lemma_of
from .types import COMPONENTS, Term, Triple
from .visual import RegionEvidence, RelationshipAnnotation, VisualStore

DATA_DIR_ENV = "DISCRIMATTR_DATA_DIR"

STORE_FILES = {
    "definitions": "definitions.index.json",
    "commonsense": "commonsense.index.json",
    "visual": "visual.index.json",
}


@dataclass
class RunConfig:
    definitions: str | None = None
    scene_graphs: list[str] = field(default_factory=list)
    assertions: str | None = None
    lemma_table: str | None = None
    stopwords: str | None = None
    gold: str | None = None
    annotations: str | None = None
    output_dir: str = "out"
    language: str = "en"
    stage_order: list[str] = field(default_factory=lambda: list(COMPONENTS))
    dbm_max_depth: int = 3
    vfm_min_count: int = 1
    vfm_use_sor: bool = False
    verbose: bool = False

    def cascade_config(self) -> CascadeConfig:
        try:
            return self._cascade_config()
        except ValueError as e:
            raise ConfigError(str(e))

    def _cascade_config(self) -> CascadeConfig:
        return CascadeConfig(
            stage_order=tuple(self.stage_order),
            dbm_max_depth=self.dbm_max_depth,
            vfm_min_count=self.vfm_min_count,
            vfm_use_sor=self.vfm_use_sor,
        )

    def to_dict(self):
        return {
            "definitions": self.definitions,
            "scene_graphs": list(self.scene_graphs),
            "assertions": self.assertions,
            "lemma_table": self.lemma_table,
            "stopwords": self.stopwords,
            "gold": self.gold,
            "annotations": self.annotations,
            "output_dir": self.output_dir,
            "language": self.language,
            "stage_order": list(self.stage_order),
            "dbm_max_depth": self.dbm_max_depth,
            "vfm_min_count": self.vfm_min_count,
            "vfm_use_sor": self.vfm_use_sor,
        }

    def input_paths(self):
        paths = {}
        if self.definitions:
            paths["definitions"] = self.definitions
        for i, p in enumerate(self.scene_graphs):
            paths[f"scene_graphs[{i}]"] = p
        if self.assertions:
            paths["assertions"] = self.assertions
        if self.lemma_table:
            paths["lemma_table"] = self.lemma_table
        if self.stopwords:
            paths["stopwords"] = self.stopwords
        return paths


def _resolve(path, base):
    p = Path(path)
    if p.is_absolute():
        return str(p)
    data_dir = os.environ.get(DATA_DIR_ENV)
    if data_dir:
        return str(Path(data_dir) / p)
    return str(base / p)


def load_config(path=None, overrides=None) -> RunConfig:
    cfg = RunConfig()
    base = Path.cwd()
    if path:
        base = Path(path).resolve().parent
        try:
            raw = load_json(path)
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}")
        unknown = set(raw) - set(cfg.to_dict())
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, value in raw.items():
            setattr(cfg, key, value)
    for key, value in (overrides or {}).items():
        if value is not None:
            setattr(cfg, key, value)
    for attr in ("definitions", "assertions", "lemma_table", "stopwords", "gold", "annotations"):
        value = getattr(cfg, attr)
        if value:
            setattr(cfg, attr, _resolve(value, base))
    cfg.scene_graphs = [_resolve(p, base) for p in cfg.scene_graphs]
    cfg.output_dir = _resolve(cfg.output_dir, base)
    return cfg


def _validate_inputs(cfg):
    for name, path in cfg.input_paths().items():
        if not Path(path).exists():
            raise ConfigError(f"input path for {name!r} does not exist: {path}")


def _load_vocab(cfg):
    lemma_table = (
        text.load_lemma_table(cfg.lemma_table) if cfg.lemma_table else text.default_lemma_table()
    )
    stopwords = (
        text.load_stopwords(cfg.stopwords) if cfg.stopwords else text.default_stopwords()
    )
    return lemma_table, stopwords


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _manifest(cfg):
    return {
        "inputs": {name: {"path": p, "sha256": _sha256(p)} for name, p in cfg.input_paths().items()},
        "config": cfg.to_dict(),
    }


def cmd_build(cfg) -> int:
    _validate_inputs(cfg)
    lemma_table, stopwords = _load_vocab(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    dstore = (
        definitions.load_definitions(cfg.definitions, lemma_table, stopwords)
        if cfg.definitions
        else definitions._build_store([], lemma_table, stopwords)
    )
    cstore = (
        commonsense.load_assertions(cfg.assertions, lemma_table, language_filter=cfg.language)
        if cfg.assertions
        else CkgStore.build([])
    )
    vstore = visual.load_scene_graphs(cfg.scene_graphs, lemma_table, stopwords)

    dump_json(dstore.to_dict(), out / STORE_FILES["definitions"])
    dump_json(cstore.to_dict(), out / STORE_FILES["commonsense"])
    dump_json(vstore.to_dict(), out / STORE_FILES["visual"])
    manifest = _manifest(cfg)
    manifest["document_counts"] = {
        "definitions": dstore.space.document_count,
        "commonsense": len(cstore.assertions),
        "visual": len(vstore.oa_index),
    }
    skipped = cstore.skipped + vstore.skipped
    if skipped:
        manifest["skipped_records"] = skipped
        print(f"warning: skipped {skipped} malformed records", file=sys.stderr)
    dump_json(manifest, out / "manifest.json")
    print(f"built 3 stores in {cfg.output_dir}")
    for name, count in manifest["document_counts"].items():
        print(f"  {name}: {count} documents")
    return 0


def _check_manifest(cfg, out):
    manifest_path = out / "manifest.json"
    if not manifest_path.exists():
        raise DataFormatError(
            f"no manifest in {out}; run `discrimattr build` first", path=str(manifest_path)
        )
    manifest = load_json(manifest_path)
    for name, entry in manifest["inputs"].items():
        if not Path(entry["path"]).exists() or _sha256(entry["path"]) != entry["sha256"]:
            raise DataFormatError(
                f"input {name!r} changed since build; rebuild the indexes",
                path=entry["path"],
            )
    return manifest


def _load_stores(cfg) -> StoreSet:
    out = Path(cfg.output_dir)
    _check_manifest(cfg, out)
    for f in STORE_FILES.values():
        if not (out / f).exists():
            raise DataFormatError(f"missing index file; run `discrimattr build`", path=str(out / f))
    lemma_table, stopwords = _load_vocab(cfg)
    dstore = definitions.store_from_dict(
        load_json(out / STORE_FILES["definitions"]), lemma_table, stopwords
    )
    cstore = CkgStore.from_dict(load_json(out / STORE_FILES["commonsense"]))
    vstore = VisualStore.from_dict(load_json(out / STORE_FILES["visual"]))
    return StoreSet(definitions=dstore, commonsense=cstore, visual=vstore)


def _term(surface, lemma_table):
    return Term(surface, lemma_of(surface, lemma_table))


def _read_triples_file(path, lemma_table):
    triples = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row:
                continue
            if lineno == 1 and row[0].strip().lower() == "pivot":
                continue
            if len(row) < 3:
                raise DataFormatError("expected at least 3 columns", path=path, line=lineno)
            triples.append(
                Triple(
                    _term(row[0].strip(), lemma_table),
                    _term(row[1].strip(), lemma_table),
                    _term(row[2].strip(), lemma_table),
                )
            )
    return triples


def _write_verdicts(results, out):
    with open(out / "verdicts.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for triple, verdict in results:
            fh.write(json.dumps(verdict.to_dict(triple), sort_keys=True, ensure_ascii=False))
            fh.write("\n")
    with open(out / "semeval.csv", "w", encoding="utf-8", newline="\n") as fh:
        for triple, verdict in results:
            fh.write(
                f"{triple.pivot.surface},{triple.comparison.surface},"
                f"{triple.attribute.surface},{1 if verdict.discriminative else 0}\n"
            )


def cmd_classify(cfg, triple_args=None, triples_file=None) -> int:
    stores = _load_stores(cfg)
    lemma_table, _ = _load_vocab(cfg)
    if triple_args:
        triples = [Triple(*(_term(a, lemma_table) for a in triple_args))]
    elif triples_file:
        triples = _read_triples_file(triples_file, lemma_table)
    else:
        raise ConfigError("provide a triple (pivot comparison attribute) or --triples-file")
    results, _ = classify_batch(triples, stores, cfg.cascade_config())
    out = Path(cfg.output_dir)
    _write_verdicts(results, out)
    for triple, verdict in results:
        line = f"{triple.pivot.surface},{triple.comparison.surface},{triple.attribute.surface}," \
               f"{1 if verdict.discriminative else 0}"
        print(line)
        if verdict.discriminative and cfg.verbose:
            print(f"  [{verdict.deciding_component}] {verdict.explanation.rendered_text}")
        elif verdict.discriminative:
            print(f"  {verdict.explanation.rendered_text}")
        elif cfg.verbose:
            print("  no evidence found in any component")
    return 0


_EVIDENCE_LOADERS = {
    "DBM": lambda d: DefinitionEvidence(
        term=d["term"], sense_id=d["sense"], role=d["role"], text=d["text"],
        path=tuple(d["path"]),
    ),
    "CKG": lambda d: EdgeEvidence(
        assertion=Assertion(**d["assertion"]), direction=d["direction"],
    ),
    "VFM": lambda d: RegionEvidence(
        object=d["object"], attribute=d["attribute"],
        regions=tuple(tuple(r) for r in d["regions"]),
        via=RelationshipAnnotation(
            d["via"]["image"], d["via"]["subject"], d["via"]["predicate"], d["via"]["object"]
        ) if "via" in d else None,
    ),
}


def cmd_explain(cfg, triple_args) -> int:
    lemma_table, _ = _load_vocab(cfg)
    triple = Triple(*(_term(a, lemma_table) for a in triple_args))
    path = Path(cfg.output_dir) / "verdicts.jsonl"
    if not path.exists():
        raise DataFormatError("no stored verdicts; run `discrimattr classify` first", path=str(path))
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            if (rec["pivot"], rec["comparison"], rec["attribute"]) == triple.key():
                if not rec["label"]:
                    print("not discriminative: no explanation")
                    return 0
                component = rec["deciding_component"]
                evidence = tuple(
                    _EVIDENCE_LOADERS[component](e)
                    for e in rec["explanation"]["pivot_evidence"]
                )
                print(render_explanation(triple, component, evidence,
                                         rec["explanation"]["template_id"]))
                return 0
    raise DataFormatError(f"no stored verdict for {triple.key()}", path=str(path))


def cmd_evaluate(cfg) -> int:
    if not cfg.gold:
        raise ConfigError("evaluate requires a gold file (config key 'gold' or --gold)")
    stores = _load_stores(cfg)
    lemma_table, _ = _load_vocab(cfg)
    gold = evaluation.load_gold(cfg.gold, lemma_table)
    annotations = None
    if cfg.annotations:
        if Path(cfg.annotations).exists():
            annotations = evaluation.load_annotations(cfg.annotations, lemma_table)
        else:
            print(
                f"notice: annotation file {cfg.annotations} not found; "
                "category tables skipped", file=sys.stderr,
            )
    results, bitmaps = classify_batch(gold.triples, stores, cfg.cascade_config())
    keys = [t.key() for t in gold.triples]
    combined = {k: v.discriminative for k, (_, v) in zip(keys, results)}
    component_preds = {
        name: dict(zip(keys, bits)) for name, bits in bitmaps.items()
    }
    report = evaluation.build_report(component_preds, combined, gold, annotations)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_verdicts(results, out)
    dump_json(report.to_dict(), out / "report.json")
    rendered = evaluation.render_report(report)
    with open(out / "report.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(rendered)
    print(rendered, end="")
    return 0


def cmd_report(cfg) -> int:
    path = Path(cfg.output_dir) / "report.json"
    if not path.exists():
        raise DataFormatError("no report.json; run `discrimattr evaluate` first", path=str(path))
    data = load_json(path)
    report = evaluation.EvalReport(
        macro_f1=data["macro_f1"], metrics=data["metrics"], errors=data["errors"],
        category_recall=data["category_recall"], overlap=data["overlap"],
        notes=data["notes"],
    )
    print(evaluation.render_report(report), end="")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_common(parser):
    parser.add_argument("--config", help="JSON run-config file")
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--lemma-table", dest="lemma_table")
    parser.add_argument("--stopwords", dest="stopwords")
    parser.add_argument("--stage-order", dest="stage_order",
                        help="comma-separated permutation of DBM,CKG,VFM")
    parser.add_argument("--dbm-max-depth", dest="dbm_max_depth", type=int)
    parser.add_argument("--vfm-min-count", dest="vfm_min_count", type=int)
    parser.add_argument("--vfm-use-sor", dest="vfm_use_sor", action="store_const", const=True)
    parser.add_argument("--verbose", action="store_const", const=True)


def build_parser():
    parser = _Parser(prog="discrimattr",
                     description="Discriminative attribute classification and explanation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="ingest corpora and persist the three indexes")
    _add_common(p)
    p.add_argument("--definitions")
    p.add_argument("--scene-graphs", dest="scene_graphs", nargs="*")
    p.add_argument("--assertions")
    p.add_argument("--language")

    p = sub.add_parser("classify", help="classify a triple or a file of triples")
    _add_common(p)
    p.add_argument("triple", nargs="*", metavar="TERM",
                   help="pivot comparison attribute")
    p.add_argument("--triples-file")

    p = sub.add_parser("explain", help="re-render the explanation for a stored verdict")
    _add_common(p)
    p.add_argument("triple", nargs=3, metavar="TERM")

    p = sub.add_parser("evaluate", help="run the full evaluation against a gold file")
    _add_common(p)
    p.add_argument("--gold")
    p.add_argument("--annotations")

    p = sub.add_parser("report", help="re-render the report from report.json")
    _add_common(p)
    return parser


_OVERRIDE_KEYS = (
    "output_dir", "lemma_table", "stopwords", "dbm_max_depth", "vfm_min_count",
    "vfm_use_sor", "verbose", "definitions", "scene_graphs", "assertions",
    "language", "gold", "annotations",
)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        overrides = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
        if getattr(args, "stage_order", None):
            overrides["stage_order"] = [s.strip() for s in args.stage_order.split(",")]
        cfg = load_config(args.config, overrides)
        if args.command == "build":
            return cmd_build(cfg)
        if args.command == "classify":
            if args.triple and len(args.triple) != 3:
                raise ConfigError("a triple needs exactly 3 terms: pivot comparison attribute")
            return cmd_classify(cfg, triple_args=args.triple or None,
                                triples_file=args.triples_file)
        if args.command == "explain":
            return cmd_explain(cfg, args.triple)
        if args.command == "evaluate":
            return cmd_evaluate(cfg)
        if args.command == "report":
            return cmd_report(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except DataFormatError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2
    except DiscrimAttrError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
