"""Scoring predicted annotations against gold ones.

Three modes:

strict  one class per (label, boundary position), e.g. ``<EnamexLocStr/>``,
        ``<EnamexLocStr>`` and ``</EnamexLocStr>``; a predicted tag is
        correct when the gold tag on the same token is identical.
loose   labels pass through a TagMapping, boundaries are dropped and each
        maximal run of one label is an entity; a predicted entity is correct
        if it overlaps a gold entity of that label, and a gold entity is
        recalled if some such prediction overlaps it.
spans   conventional whole-span exact match (not used for the published
        tables; kept for interoperability).
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Dict, Iterable, Optional, Sequence

from . import __version__
from .corpus import DEFAULT_LABELS, Position, group_snippets, spans_from_tags
from .errors import AlignmentError

MODES = ("strict", "loose", "spans")
_POSITION_ORDER = {Position.UNIT: 0, Position.BEGIN: 1, Position.END: 2}


def f_score(p: float, r: float) -> float:
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


def percent(part: int, whole: int) -> float:
    return 100.0 * part / whole if whole else 0.0


def round2(value: float) -> Decimal:
    return Decimal(repr(float(value))).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class ClassCounts:
    found: int = 0
    gold: int = 0
    correct: int = 0
    # gold items credited; differs from ``correct`` only in loose mode
    recalled: Optional[int] = None

    @property
    def gold_hits(self) -> int:
        return self.correct if self.recalled is None else self.recalled

    def __add__(self, other: "ClassCounts") -> "ClassCounts":
        recalled = None
        if self.recalled is not None or other.recalled is not None:
            recalled = self.gold_hits + other.gold_hits
        return ClassCounts(self.found + other.found, self.gold + other.gold,
                           self.correct + other.correct, recalled)

    @property
    def precision(self) -> float:
        return percent(self.correct, self.found)

    @property
    def recall(self) -> float:
        return percent(self.gold_hits, self.gold)

    @property
    def f(self) -> float:
        return f_score(self.precision, self.recall)


class EvalCounts(dict):
    """label -> ClassCounts; merges by componentwise addition."""

    def __add__(self, other: "EvalCounts") -> "EvalCounts":
        out = EvalCounts(self)
        for label, c in other.items():
            out[label] = out[label] + c if label in out else c
        return out

    def total(self) -> ClassCounts:
        acc = ClassCounts()
        for c in self.values():
            acc = acc + c
        return acc


def micro_average(counts: EvalCounts) -> tuple:
    t = counts.total()
    return t.precision, t.recall, t.f


@dataclass(frozen=True)
class TagMapping:
    pairs: Dict[str, Optional[str]] = field(default_factory=dict)

    def __call__(self, label: Optional[str]) -> Optional[str]:
        if label is None:
            return None
        return self.pairs.get(label, label)

    def image(self, labels: Iterable[str]) -> list:
        out = []
        for label in labels:
            m = self(label)
            if m is not None and m not in out:
                out.append(m)
        return out


IDENTITY = TagMapping()


def merge_locations() -> TagMapping:
    return TagMapping({
        "EnamexLocGpl": "EnamexLocXxx",
        "EnamexLocPpl": "EnamexLocXxx",
        "EnamexLocXxx": "EnamexLocXxx",
    })


def check_aligned(gold: Sequence, pred: Sequence):
    if len(gold) != len(pred):
        raise AlignmentError("gold has %d tokens, prediction %d" % (len(gold), len(pred)))
    for n, (g, p) in enumerate(zip(gold, pred), 1):
        if g.surface != p.surface or g.snippet_id != p.snippet_id or g.index != p.index:
            raise AlignmentError("token %d differs: %r vs %r" % (n, g.surface, p.surface))


def _strict_key(label: str):
    # "<Lab/>", "<Lab>", "</Lab>" -> (Lab, position order)
    if label.startswith("</"):
        return label[2:-1], 2
    if label.endswith("/>"):
        return label[1:-2], 0
    return label[1:-1], 1


def strict_counts(gold: Sequence, pred: Sequence) -> EvalCounts:
    check_aligned(gold, pred)
    found = defaultdict(int)
    ref = defaultdict(int)
    correct = defaultdict(int)
    for g, p in zip(gold, pred):
        if not p.tag.is_outside:
            found[str(p.tag)] += 1
            if p.tag == g.tag:
                correct[str(p.tag)] += 1
        if not g.tag.is_outside:
            ref[str(g.tag)] += 1
    labels = sorted(set(found) | set(ref), key=_strict_key)
    return EvalCounts((l, ClassCounts(found[l], ref[l], correct[l])) for l in labels)


def label_runs(tokens: Sequence, mapping: TagMapping = IDENTITY) -> list:
    """Maximal runs of one mapped label: (snippet_id, start, end, label)."""
    runs = []
    for snippet in group_snippets(tokens):
        current = None
        for tok in snippet:
            label = mapping(tok.tag.label)
            if current is not None and label == current[3] and tok.index == current[2] + 1:
                current[2] = tok.index
                continue
            if current is not None:
                runs.append(tuple(current))
            current = [tok.snippet_id, tok.index, tok.index, label] if label is not None else None
        if current is not None:
            runs.append(tuple(current))
    return runs


def _overlaps(a, b):
    return a[0] == b[0] and a[3] == b[3] and a[1] <= b[2] and b[1] <= a[2]


def loose_counts(gold: Sequence, pred: Sequence, mapping: TagMapping = IDENTITY) -> EvalCounts:
    check_aligned(gold, pred)
    gold_runs = label_runs(gold, mapping)
    pred_runs = label_runs(pred, mapping)
    by_key = defaultdict(list)
    for r in gold_runs:
        by_key[(r[0], r[3])].append(r)
    stats = defaultdict(lambda: [0, 0, 0, 0])
    for r in pred_runs:
        s = stats[r[3]]
        s[0] += 1
        if any(_overlaps(r, g) for g in by_key[(r[0], r[3])]):
            s[2] += 1
    pred_by_key = defaultdict(list)
    for r in pred_runs:
        pred_by_key[(r[0], r[3])].append(r)
    for g in gold_runs:
        s = stats[g[3]]
        s[1] += 1
        if any(_overlaps(g, r) for r in pred_by_key[(g[0], g[3])]):
            s[3] += 1
    order = {l: i for i, l in enumerate(mapping.image(DEFAULT_LABELS))}
    labels = sorted(stats, key=lambda l: (order.get(l, len(order)), l))
    return EvalCounts((l, ClassCounts(*stats[l])) for l in labels)


def span_counts(gold: Sequence, pred: Sequence) -> EvalCounts:
    check_aligned(gold, pred)
    gold_spans = set(spans_from_tags(gold))
    pred_spans = set(spans_from_tags(pred))
    stats = defaultdict(lambda: [0, 0, 0])
    for s in pred_spans:
        stats[s.label][0] += 1
        if s in gold_spans:
            stats[s.label][2] += 1
    for s in gold_spans:
        stats[s.label][1] += 1
    return EvalCounts((l, ClassCounts(*stats[l])) for l in sorted(stats))


@dataclass(frozen=True)
class ClassScore:
    label: str
    counts: ClassCounts

    @property
    def precision(self):
        return self.counts.precision

    @property
    def recall(self):
        return self.counts.recall

    @property
    def f_score(self):
        return self.counts.f


@dataclass(frozen=True)
class EvalReport:
    mode: str
    classes: tuple
    micro: ClassScore

    @classmethod
    def from_counts(cls, mode: str, counts: EvalCounts) -> "EvalReport":
        return cls(mode, tuple(ClassScore(l, c) for l, c in counts.items()),
                   ClassScore("MICRO", counts.total()))

    def __getitem__(self, label) -> ClassScore:
        for c in self.classes:
            if c.label == label:
                return c
        raise KeyError(label)

    def labels(self) -> list:
        return [c.label for c in self.classes]

    def to_text(self) -> str:
        lines = []
        for c in self.classes + (self.micro,):
            lines.append("%s\t%s\t%s\t%s\t%d\t%d" % (
                c.label, round2(c.precision), round2(c.recall), round2(c.f_score),
                c.counts.found, c.counts.gold))
        return "\n".join(lines) + "\n"

    def to_json(self, **extra) -> str:
        def row(c):
            return {
                "label": c.label,
                "precision": float(round2(c.precision)),
                "recall": float(round2(c.recall)),
                "f_score": float(round2(c.f_score)),
                "found": c.counts.found,
                "gold": c.counts.gold,
                "correct": c.counts.correct,
                "recalled": c.counts.gold_hits,
            }
        doc = {"version": __version__, "mode": self.mode,
               "classes": [row(c) for c in self.classes], "micro": row(self.micro)}
        doc.update(extra)
        return json.dumps(doc, ensure_ascii=False, indent=1, sort_keys=True) + "\n"


def score_strict(gold: Sequence, pred: Sequence) -> EvalReport:
    return EvalReport.from_counts("strict", strict_counts(gold, pred))


def score_loose(gold: Sequence, pred: Sequence, mapping: TagMapping = IDENTITY) -> EvalReport:
    return EvalReport.from_counts("loose", loose_counts(gold, pred, mapping))


def score_spans(gold: Sequence, pred: Sequence) -> EvalReport:
    return EvalReport.from_counts("spans", span_counts(gold, pred))
