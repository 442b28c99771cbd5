"""Evaluation harness: macro F1, per-category recall, component overlap,
and error breakdowns over a gold standard of labeled triples.

Gold file: CSV `pivot,comparison,attribute,label` with label in {0,1}.
Category annotations: CSV `pivot,comparison,attribute,category[;category...]`.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .errors import DataFormatError
from .text import lemma_of
from .types import CATEGORIES, COMPONENTS, Term, Triple

PAIRS = (("DBM", "CKG"), ("DBM", "VFM"), ("CKG", "VFM"))


@dataclass
class GoldDataset:
    triples: list[Triple]
    source: str = ""

    def keys(self):
        return [t.key() for t in self.triples]


def _triple_from_row(row, lemma_table):
    pivot, comparison, attribute = (s.strip() for s in row[:3])
    return (
        Term(pivot, lemma_of(pivot, lemma_table)),
        Term(comparison, lemma_of(comparison, lemma_table)),
        Term(attribute, lemma_of(attribute, lemma_table)),
    )


def load_gold(path, lemma_table) -> GoldDataset:
    """Load and validate the gold CSV; identical duplicate rows collapse,
    conflicting duplicates are an error, an empty gold set is an error."""
    triples = []
    seen = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row:
                continue
            if lineno == 1 and [c.strip().lower() for c in row] == [
                "pivot", "comparison", "attribute", "label",
            ]:
                continue
            if len(row) != 4:
                raise DataFormatError("expected 4 columns", path=path, line=lineno)
            if row[3].strip() not in ("0", "1"):
                raise DataFormatError(f"label must be 0 or 1, got {row[3]!r}", path=path, line=lineno)
            pivot, comparison, attribute = _triple_from_row(row, lemma_table)
            label = row[3].strip() == "1"
            key = (pivot.lemma, comparison.lemma, attribute.lemma)
            if key in seen:
                if seen[key] != label:
                    raise DataFormatError(
                        f"conflicting duplicate labels for {key}", path=path, line=lineno
                    )
                continue
            seen[key] = label
            triples.append(Triple(pivot, comparison, attribute, gold_label=label))
    if not triples:
        raise DataFormatError("empty gold set", path=path)
    return GoldDataset(triples=triples, source=str(path))


def load_annotations(path, lemma_table) -> dict:
    """Load the category annotation CSV into key -> frozenset of categories."""
    annotations = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row:
                continue
            if lineno == 1 and row[0].strip().lower() == "pivot":
                continue
            if len(row) != 4:
                raise DataFormatError("expected 4 columns", path=path, line=lineno)
            cats = frozenset(c.strip().lower() for c in row[3].split(";") if c.strip())
            if not cats:
                raise DataFormatError("empty category set", path=path, line=lineno)
            unknown = cats - CATEGORIES
            if unknown:
                raise DataFormatError(f"unknown categories {sorted(unknown)}", path=path, line=lineno)
            pivot, comparison, attribute = _triple_from_row(row, lemma_table)
            annotations[(pivot.lemma, comparison.lemma, attribute.lemma)] = cats
    return annotations


def _check_coverage(predictions, gold):
    missing = [k for k in gold.keys() if k not in predictions]
    if missing:
        raise DataFormatError(f"predictions missing for {len(missing)} gold triples: {missing[:5]}")


def confusion(predictions: dict, gold: GoldDataset) -> dict:
    """Confusion-matrix counts {tp, fp, fn, tn}."""
    _check_coverage(predictions, gold)
    counts = {"tp": 0, "fp": 0, "fn": 0, "tn": 0}
    for t in gold.triples:
        pred = predictions[t.key()]
        if pred and t.gold_label:
            counts["tp"] += 1
        elif pred and not t.gold_label:
            counts["fp"] += 1
        elif not pred and t.gold_label:
            counts["fn"] += 1
        else:
            counts["tn"] += 1
    return counts


def class_prf(tp, fp, fn) -> dict:
    """Precision/recall/F1 for one class. A class with no predicted and no
    actual members scores F1 = 1 by convention (flagged upstream)."""
    if tp == 0 and fp == 0 and fn == 0:
        return {"precision": 1.0, "recall": 1.0, "f1": 1.0, "vacuous": True}
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1, "vacuous": False}


def per_class_metrics(predictions, gold) -> dict:
    c = confusion(predictions, gold)
    return {
        "positive": class_prf(c["tp"], c["fp"], c["fn"]),
        # negative class: swap roles (predicted-negative over actually-negative)
        "negative": class_prf(c["tn"], c["fn"], c["fp"]),
        "confusion": c,
    }


def macro_f1(predictions: dict, gold: GoldDataset) -> float:
    """Unweighted mean of positive- and negative-class F1."""
    m = per_class_metrics(predictions, gold)
    return (m["positive"]["f1"] + m["negative"]["f1"]) / 2


def per_category_recall(component_preds: dict, combined_preds: dict,
                        gold: GoldDataset, annotations: dict) -> dict:
    """Recall over positive gold triples per category, per component and
    combined, plus the relative gain of combined over the best component.

    Cells with no positive triples in a category are None (undefined).
    """
    models = dict(component_preds)
    models["combined"] = combined_preds
    categories = sorted(CATEGORIES)
    table = {name: {} for name in models}
    for cat in categories:
        positives = [
            t for t in gold.triples
            if t.gold_label and cat in annotations.get(t.key(), ())
        ]
        for name, preds in models.items():
            if not positives:
                table[name][cat] = None
            else:
                hit = sum(1 for t in positives if preds[t.key()])
                table[name][cat] = hit / len(positives)
    gain = {}
    for cat in categories:
        best = max(
            (table[c][cat] for c in component_preds if table[c][cat] is not None),
            default=None,
        )
        combined = table["combined"][cat]
        if best is None or combined is None or best == 0:
            gain[cat] = None
        else:
            gain[cat] = (combined - best) / best
    table["gain"] = gain
    return table


def _tp_fp_sets(preds, gold):
    tp = {t.key() for t in gold.triples if t.gold_label and preds[t.key()]}
    fp = {t.key() for t in gold.triples if not t.gold_label and preds[t.key()]}
    return tp, fp


def _overlap_row(sets_by_component, denominator):
    row = {}
    fractions = []
    for a, b in PAIRS:
        inter = sets_by_component[a] & sets_by_component[b]
        frac = len(inter & denominator) / len(denominator) if denominator else None
        row[f"{a}^{b}"] = frac
        fractions.append(frac)
    three = sets_by_component["DBM"] & sets_by_component["CKG"] & sets_by_component["VFM"]
    frac3 = len(three & denominator) / len(denominator) if denominator else None
    row["DBM^CKG^VFM"] = frac3
    fractions.append(frac3)
    row["average"] = (
        sum(fractions) / len(fractions) if all(f is not None for f in fractions) else None
    )
    return row


def overlap_analysis(component_preds: dict, combined_preds: dict,
                     gold: GoldDataset, annotations: dict | None = None) -> dict:
    """Pairwise and three-way TP/FP intersections as fractions of the
    combined model's TPs (resp. FPs); optionally stratified by category."""
    comp_tp = {}
    comp_fp = {}
    for name, preds in component_preds.items():
        comp_tp[name], comp_fp[name] = _tp_fp_sets(preds, gold)
    combined_tp, combined_fp = _tp_fp_sets(combined_preds, gold)
    out = {
        "true": _overlap_row(comp_tp, combined_tp),
        "false": _overlap_row(comp_fp, combined_fp),
    }
    if annotations is not None:
        by_cat = {}
        for cat in sorted(CATEGORIES):
            keys = {k for k, cats in annotations.items() if cat in cats}
            by_cat[cat] = _overlap_row(comp_tp, combined_tp & keys)
        out["by_category"] = by_cat
    return out


def error_breakdown(models_preds: dict, gold: GoldDataset, sample_size: int = 10) -> dict:
    """Per model: FN/FP counts, FN share of total errors, error samples."""
    out = {}
    for name, preds in models_preds.items():
        c = confusion(preds, gold)
        errors = c["fn"] + c["fp"]
        samples = []
        for t in gold.triples:
            pred = preds[t.key()]
            if pred != t.gold_label and len(samples) < sample_size:
                samples.append(
                    {
                        "triple": list(t.key()),
                        "gold": int(t.gold_label),
                        "predicted": int(pred),
                        "type": "FN" if t.gold_label else "FP",
                    }
                )
        out[name] = {
            "fn": c["fn"],
            "fp": c["fp"],
            "fn_share": c["fn"] / errors if errors else None,
            "samples": samples,
        }
    return out


@dataclass
class EvalReport:
    macro_f1: float
    metrics: dict
    errors: dict
    category_recall: dict | None = None
    overlap: dict | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self):
        return {
            "macro_f1": self.macro_f1,
            "metrics": self.metrics,
            "errors": self.errors,
            "category_recall": self.category_recall,
            "overlap": self.overlap,
            "notes": self.notes,
        }


def build_report(component_preds, combined_preds, gold, annotations=None) -> EvalReport:
    metrics = per_class_metrics(combined_preds, gold)
    notes = []
    if metrics["positive"]["vacuous"] or metrics["negative"]["vacuous"]:
        notes.append("a class with no predicted and no actual members scored F1=1 by convention")
    report = EvalReport(
        macro_f1=macro_f1(combined_preds, gold),
        metrics=metrics,
        errors=error_breakdown({**component_preds, "combined": combined_preds}, gold),
        notes=notes,
    )
    if annotations:
        report.category_recall = per_category_recall(
            component_preds, combined_preds, gold, annotations
        )
        report.overlap = overlap_analysis(component_preds, combined_preds, gold, annotations)
    else:
        report.overlap = overlap_analysis(component_preds, combined_preds, gold)
        report.notes.append("no category annotations supplied; category tables skipped")
    report.notes.append(
        "per-category cells report recall, not F1 (the two are sometimes conflated)"
    )
    return report


def _fmt(value):
    if value is None:
        return "undef"
    return f"{value:.3f}"


def render_report(report: EvalReport) -> str:
    """Human-readable report; byte-stable for identical inputs."""
    lines = []
    c = report.metrics["confusion"]
    lines.append("== Discriminative attribute evaluation ==")
    lines.append(f"macro F1: {report.macro_f1:.4f}")
    lines.append(f"confusion: TP={c['tp']} FP={c['fp']} FN={c['fn']} TN={c['tn']}")
    for cls in ("positive", "negative"):
        m = report.metrics[cls]
        lines.append(
            f"{cls}: precision={m['precision']:.4f} recall={m['recall']:.4f} f1={m['f1']:.4f}"
        )
    if report.category_recall:
        lines.append("")
        lines.append("-- per-category recall --")
        cats = sorted(CATEGORIES)
        lines.append("model      " + " ".join(f"{c:>10}" for c in cats))
        for name in list(COMPONENTS) + ["combined", "gain"]:
            row = report.category_recall[name]
            lines.append(f"{name:<10} " + " ".join(f"{_fmt(row[c]):>10}" for c in cats))
    if report.overlap:
        lines.append("")
        lines.append("-- component overlap (fraction of combined TPs / FPs) --")
        keys = ("DBM^CKG", "DBM^VFM", "CKG^VFM", "DBM^CKG^VFM", "average")
        for kind in ("true", "false"):
            row = report.overlap[kind]
            cells = " ".join(f"{k}={_fmt(row[k])}" for k in keys)
            lines.append(f"{kind}: {cells}")
    lines.append("")
    lines.append("-- error breakdown --")
    ordered = [n for n in list(COMPONENTS) + ["combined"] if n in report.errors]
    ordered += sorted(set(report.errors) - set(ordered))
    for name in ordered:
        row = report.errors[name]
        lines.append(f"{name}: FN={row['fn']} FP={row['fp']} FN-share={_fmt(row['fn_share'])}")
    if report.notes:
        lines.append("")
        for note in report.notes:
            lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"
