"""Diagnostic protocols: name lists in carrier sentences, tag-count
comparison between two versions of a text, and word unrecognition rates of
rightly versus wrongly tagged entities."""
from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

from . import __version__
from .corpus import DEFAULT_LABELS, Token, spans_from_tags
from .errors import ConfigError, DataError
from .evaluation import TagMapping, check_aligned, label_runs, merge_locations, round2
from .morpho import MorphLexicon, normalize_historical

SLOT = "X"


class TemplatePosition(enum.Enum):
    NONE = "none"
    BEGINNING = "beginning"
    MIDDLE = "middle"
    END = "end"


DEFAULT_CARRIERS = {
    TemplatePosition.NONE: "X",
    TemplatePosition.BEGINNING: "X on mukava juttu .",
    TemplatePosition.MIDDLE: "Meistä X on mukava juttu .",
    TemplatePosition.END: "Mukava juttu on X .",
}


def _position(value) -> TemplatePosition:
    if isinstance(value, TemplatePosition):
        return value
    try:
        return TemplatePosition(value)
    except ValueError:
        raise ConfigError("unknown template position %r" % (value,)) from None


def check_carrier(template: str) -> list:
    words = template.split()
    if words.count(SLOT) != 1:
        raise DataError("carrier %r must contain the slot %s exactly once" % (template, SLOT))
    return words


def load_carriers(path) -> dict:
    """TSV of ``position<TAB>template``; unlisted positions keep their default."""
    carriers = dict(DEFAULT_CARRIERS)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields_ = line.split("\t")
            try:
                pos = TemplatePosition(fields_[0])
            except ValueError:
                raise DataError("unknown position %r" % fields_[0], lineno) from None
            if len(fields_) != 2:
                raise DataError("expected position<TAB>template", lineno)
            try:
                check_carrier(fields_[1])
            except DataError as exc:
                raise DataError(str(exc), lineno) from None
            carriers[pos] = fields_[1]
    return carriers


def template_slot(name: str, position, carriers: Optional[dict] = None) -> tuple:
    """Token range (start, end inclusive) the name occupies once wrapped."""
    words = check_carrier((carriers or DEFAULT_CARRIERS)[_position(position)])
    at = words.index(SLOT)
    return at, at + len(name.split()) - 1


def wrap_template(name: str, position, carriers: Optional[dict] = None, snippet_id: int = 0) -> list:
    if not name.split():
        raise ValueError("name must be non-empty")
    words = check_carrier((carriers or DEFAULT_CARRIERS)[_position(position)])
    at = words.index(SLOT)
    words = words[:at] + name.split() + words[at + 1:]
    return [Token(w, i, snippet_id) for i, w in enumerate(words)]


def sentence(tokens: Sequence) -> str:
    return " ".join(t.surface for t in tokens)


@dataclass
class TagDistribution:
    counts: Dict[str, int] = field(default_factory=dict)
    untagged: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts.values()) + self.untagged

    def __add__(self, other: "TagDistribution") -> "TagDistribution":
        merged = Counter(self.counts)
        merged.update(other.counts)
        return TagDistribution(dict(sorted(merged.items())), self.untagged + other.untagged)

    def to_text(self) -> str:
        lines = ["%s\t%d" % (label, n) for label, n in sorted(self.counts.items())]
        lines.append("untagged\t%d" % self.untagged)
        lines.append("total\t%d" % self.total)
        return "\n".join(lines) + "\n"

    def to_json(self, **extra) -> str:
        doc = {"version": __version__, "counts": dict(sorted(self.counts.items())),
               "untagged": self.untagged, "total": self.total}
        doc.update(extra)
        return json.dumps(doc, ensure_ascii=False, indent=1, sort_keys=True) + "\n"


def tag_distribution(names: Sequence[str], position, tagger: Callable,
                     carriers: Optional[dict] = None) -> TagDistribution:
    """Wrap each name, tag the lot and record the label found on the name.

    A name counts under the label of its first tagged token, or as untagged.
    """
    dist = TagDistribution()
    if not names:
        return dist
    tokens = []
    slots = []
    for sid, name in enumerate(names):
        tokens.extend(wrap_template(name, position, carriers, sid))
        slots.append(template_slot(name, position, carriers))
    tagged = tagger(tokens)
    by_snippet = {}
    for t in tagged:
        by_snippet.setdefault(t.snippet_id, []).append(t)
    counts = Counter()
    for sid, (start, end) in enumerate(slots):
        label = None
        for t in by_snippet.get(sid, [])[start:end + 1]:
            if not t.tag.is_outside:
                label = t.tag.label
                break
        if label is None:
            dist.untagged += 1
        else:
            counts[label] += 1
    dist.counts = dict(sorted(counts.items()))
    return dist


def entity_counts(tagged: Sequence) -> Counter:
    return Counter(s.label for s in spans_from_tags(tagged))


@dataclass(frozen=True)
class CountDelta:
    label: str
    count_a: int
    count_b: int

    @property
    def delta(self) -> int:
        return self.count_b - self.count_a

    @property
    def percent(self) -> Optional[float]:
        return 100.0 * self.delta / self.count_a if self.count_a else None


@dataclass(frozen=True)
class TagCountComparison:
    rows: tuple
    total: CountDelta

    def __getitem__(self, label) -> CountDelta:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)

    def to_text(self) -> str:
        lines = []
        for r in self.rows + (self.total,):
            pct = "-" if r.percent is None else str(round2(r.percent))
            lines.append("%s\t%d\t%d\t%+d\t%s" % (r.label, r.count_a, r.count_b, r.delta, pct))
        return "\n".join(lines) + "\n"

    def to_json(self, **extra) -> str:
        def row(r):
            return {"label": r.label, "count_a": r.count_a, "count_b": r.count_b, "delta": r.delta,
                    "percent": None if r.percent is None else float(round2(r.percent))}
        doc = {"version": __version__, "classes": [row(r) for r in self.rows], "total": row(self.total)}
        doc.update(extra)
        return json.dumps(doc, ensure_ascii=False, indent=1, sort_keys=True) + "\n"


def compare_counts(tagged_a: Sequence, tagged_b: Sequence, labels: Sequence[str] = DEFAULT_LABELS) -> TagCountComparison:
    a, b = entity_counts(tagged_a), entity_counts(tagged_b)
    extra = sorted((set(a) | set(b)) - set(labels))
    rows = tuple(CountDelta(l, a[l], b[l]) for l in list(labels) + extra)
    return TagCountComparison(rows, CountDelta("TOTAL", sum(a.values()), sum(b.values())))


def compare_tag_counts(text_a: Sequence, text_b: Sequence, tagger: Callable,
                       labels: Sequence[str] = DEFAULT_LABELS) -> TagCountComparison:
    """Entity counts per class when tagging two versions of a text; deltas
    read as b minus a."""
    return compare_counts(tagger(list(text_a)), tagger(list(text_b)), labels)


@dataclass(frozen=True)
class UnrecognitionRow:
    label: str
    right_tokens: int
    right_unrecognized: int
    wrong_tokens: int
    wrong_unrecognized: int

    @property
    def right_rate(self) -> Optional[float]:
        return 100.0 * self.right_unrecognized / self.right_tokens if self.right_tokens else None

    @property
    def wrong_rate(self) -> Optional[float]:
        return 100.0 * self.wrong_unrecognized / self.wrong_tokens if self.wrong_tokens else None


def unrecognition_by_correctness(gold: Sequence, pred: Sequence, lexicon: MorphLexicon,
                                 mapping: Optional[TagMapping] = None, wv: bool = False) -> list:
    """Per merged class, the share of words the lexicon does not know among
    tokens of rightly and of wrongly tagged predicted entities."""
    check_aligned(gold, pred)
    mapping = merge_locations() if mapping is None else mapping
    gold_runs = label_runs(gold, mapping)
    where = {(t.snippet_id, t.index): t.surface for t in pred}
    stats = {}
    for run in label_runs(pred, mapping):
        sid, start, end, label = run
        right = any(g[0] == sid and g[3] == label and g[1] <= end and start <= g[2] for g in gold_runs)
        s = stats.setdefault(label, [0, 0, 0, 0])
        for i in range(start, end + 1):
            surface = where[(sid, i)]
            unknown = not lexicon.analyze(normalize_historical(surface) if wv else surface)
            slot = 0 if right else 2
            s[slot] += 1
            s[slot + 1] += unknown
    order = {l: i for i, l in enumerate(mapping.image(DEFAULT_LABELS))}
    return [UnrecognitionRow(l, *stats[l]) for l in sorted(stats, key=lambda l: (order.get(l, len(order)), l))]


def unrecognition_text(rows: Sequence[UnrecognitionRow]) -> str:
    def fmt(rate):
        return "-" if rate is None else str(round2(rate))
    return "".join("%s\t%s\t%s\t%d\t%d\n" % (r.label, fmt(r.right_rate), fmt(r.wrong_rate),
                                             r.right_tokens, r.wrong_tokens) for r in rows)


def unrecognition_json(rows: Sequence[UnrecognitionRow], **extra) -> str:
    doc = {"version": __version__, "classes": [
        {"label": r.label, "right_tokens": r.right_tokens, "right_unrecognized": r.right_unrecognized,
         "wrong_tokens": r.wrong_tokens, "wrong_unrecognized": r.wrong_unrecognized,
         "right_rate": None if r.right_rate is None else float(round2(r.right_rate)),
         "wrong_rate": None if r.wrong_rate is None else float(round2(r.wrong_rate))}
        for r in rows]}
    doc.update(extra)
    return json.dumps(doc, ensure_ascii=False, indent=1, sort_keys=True) + "\n"
