"""Annotated token-per-line corpora.

One record per line, ``surface<TAB>tag``, where the tag is ``O`` or one of
``<Label/>`` (single-token entity), ``<Label>`` (first or interior token of a
multiword entity) and ``</Label>`` (last token of a multiword entity). A
blank line ends a snippet.
"""
from __future__ import annotations

import enum
import io
import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, TextIO, Union

from .errors import BoundaryError, DataError

DEFAULT_LABELS = (
    "EnamexPrsHum",
    "EnamexLocXxx",
    "EnamexLocGpl",
    "EnamexLocPpl",
    "EnamexLocStr",
    "EnamexOrgEdu",
    "EnamexOrgCrp",
    "TimexTmeDat",
)


@dataclass(frozen=True)
class TagSet:
    labels: tuple = DEFAULT_LABELS

    def __contains__(self, label):
        return label in self.labels

    def __iter__(self):
        return iter(self.labels)

    def __len__(self):
        return len(self.labels)

    @classmethod
    def from_file(cls, path) -> "TagSet":
        """One label per line; blank lines and ``#`` comments are skipped."""
        labels = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", line):
                    raise DataError("invalid label %r" % line, lineno)
                if line in labels:
                    raise DataError("duplicate label %r" % line, lineno)
                labels.append(line)
        return cls(tuple(labels))


DEFAULT_TAGSET = TagSet()


class Position(enum.Enum):
    UNIT = "unit"
    BEGIN = "begin"
    END = "end"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class BoundaryTag:
    label: Optional[str]
    position: Position

    def __post_init__(self):
        if (self.position is Position.OUTSIDE) != (self.label is None):
            raise ValueError("Outside tags carry no label; all others need one")

    def __str__(self):
        if self.position is Position.OUTSIDE:
            return "O"
        if self.position is Position.UNIT:
            return "<%s/>" % self.label
        if self.position is Position.BEGIN:
            return "<%s>" % self.label
        return "</%s>" % self.label

    @property
    def is_outside(self):
        return self.position is Position.OUTSIDE


OUTSIDE = BoundaryTag(None, Position.OUTSIDE)

_TAG_RE = re.compile(r"<(/?)([A-Za-z][A-Za-z0-9_]*)(/?)>")


def parse_tag(text: str, tagset: TagSet = DEFAULT_TAGSET) -> BoundaryTag:
    if text == "O":
        return OUTSIDE
    m = _TAG_RE.fullmatch(text)
    if m is None or (m.group(1) and m.group(3)):
        raise ValueError("malformed tag %r" % text)
    label = m.group(2)
    if label not in tagset:
        raise ValueError("unknown label %r" % label)
    if m.group(3):
        return BoundaryTag(label, Position.UNIT)
    if m.group(1):
        return BoundaryTag(label, Position.END)
    return BoundaryTag(label, Position.BEGIN)


def _has_space(text):
    return any(c.isspace() for c in text)


@dataclass(frozen=True)
class Token:
    surface: str
    index: int = 0
    snippet_id: int = 0

    def __post_init__(self):
        if not self.surface or _has_space(self.surface):
            raise ValueError("token surface must be non-empty without whitespace: %r" % self.surface)


@dataclass(frozen=True)
class AnnotatedToken:
    token: Token
    tag: BoundaryTag = OUTSIDE

    @property
    def surface(self):
        return self.token.surface

    @property
    def snippet_id(self):
        return self.token.snippet_id

    @property
    def index(self):
        return self.token.index


@dataclass(frozen=True, order=True)
class EntitySpan:
    snippet_id: int
    start: int
    end: int
    label: str

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError("bad span bounds %d..%d" % (self.start, self.end))

    def __len__(self):
        return self.end - self.start + 1

    def overlaps(self, other: "EntitySpan") -> bool:
        return (self.snippet_id == other.snippet_id
                and self.start <= other.end and other.start <= self.end)


class Corpus(list):
    """A parsed corpus: a flat list of AnnotatedToken.

    ``trailing_blank`` records whether the source ended with an extra blank
    line, so that serializing reproduces it.
    """

    trailing_blank = False


def group_snippets(items: Iterable) -> list:
    """Group tokens (plain or annotated) into lists sharing a snippet id."""
    return [list(g) for _, g in itertools.groupby(items, key=lambda t: t.snippet_id)]


def _iter_lines(source) -> tuple:
    if isinstance(source, str):
        text = source
    else:
        text = source.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def parse_annotated(source: Union[TextIO, str], tagset: TagSet = DEFAULT_TAGSET) -> Corpus:
    """Parse an annotated corpus from a text stream or a string of its content."""
    corpus = Corpus()
    lines = _iter_lines(source)
    snippet = 0
    index = 0
    for lineno, line in enumerate(lines, 1):
        if line == "":
            if index == 0:
                if lineno == len(lines) and corpus:
                    corpus.trailing_blank = True
                    continue
                raise DataError("empty snippet", lineno)
            snippet += 1
            index = 0
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise DataError("expected 2 tab-separated fields, got %d" % len(fields), lineno)
        surface, tag_text = fields
        if not surface or _has_space(surface):
            raise DataError("bad token surface %r" % surface, lineno)
        try:
            tag = parse_tag(tag_text, tagset)
        except ValueError as exc:
            raise DataError(str(exc), lineno) from None
        corpus.append(AnnotatedToken(Token(surface, index, snippet), tag))
        index += 1
    return corpus


def read_annotated(path, tagset: TagSet = DEFAULT_TAGSET) -> Corpus:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_annotated(fh, tagset)


def serialize_annotated(tokens: Sequence[AnnotatedToken], trailing_blank: Optional[bool] = None) -> str:
    if trailing_blank is None:
        trailing_blank = getattr(tokens, "trailing_blank", False)
    out = io.StringIO()
    previous = None
    for tok in tokens:
        if previous is not None and tok.snippet_id != previous:
            out.write("\n")
        previous = tok.snippet_id
        out.write("%s\t%s\n" % (tok.surface, tok.tag))
    if trailing_blank and previous is not None:
        out.write("\n")
    return out.getvalue()


def write_annotated(path, tokens: Sequence[AnnotatedToken]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(serialize_annotated(tokens))


def read_tokens(source: Union[TextIO, str]) -> list:
    """Read plain tokens from either annotated or bare token-per-line input.

    Tags, when present, are ignored.
    """
    tokens = []
    snippet = 0
    index = 0
    for lineno, line in enumerate(_iter_lines(source), 1):
        if line == "":
            if index:
                snippet += 1
                index = 0
            continue
        surface = line.split("\t", 1)[0]
        if not surface or _has_space(surface):
            raise DataError("bad token surface %r" % surface, lineno)
        tokens.append(Token(surface, index, snippet))
        index += 1
    return tokens


def tokens_from_text(text: str, snippet_id: int = 0) -> list:
    return [Token(w, i, snippet_id) for i, w in enumerate(text.split())]


def _tagged_lines(tokens) -> Iterator:
    # Line numbers as laid out by serialize_annotated.
    line = 0
    previous = None
    for tok in tokens:
        if previous is not None and tok.snippet_id != previous:
            line += 1
        previous = tok.snippet_id
        line += 1
        yield line, tok


def spans_from_tags(tokens: Sequence[AnnotatedToken]) -> list:
    spans = []
    open_label = open_start = open_line = None
    previous = None
    for line, tok in _tagged_lines(tokens):
        if tok.snippet_id != previous and open_label is not None:
            raise BoundaryError("<%s> left unclosed at snippet end" % open_label, open_line)
        previous = tok.snippet_id
        tag = tok.tag
        pos = tag.position
        if open_label is not None:
            if pos is Position.OUTSIDE or pos is Position.UNIT:
                raise BoundaryError("<%s> left unclosed" % open_label, open_line)
            if tag.label != open_label:
                raise BoundaryError("label %s inside open <%s>" % (tag.label, open_label), line)
            if pos is Position.END:
                spans.append(EntitySpan(tok.snippet_id, open_start, tok.index, open_label))
                open_label = None
            continue
        if pos is Position.UNIT:
            spans.append(EntitySpan(tok.snippet_id, tok.index, tok.index, tag.label))
        elif pos is Position.BEGIN:
            open_label, open_start, open_line = tag.label, tok.index, line
        elif pos is Position.END:
            raise BoundaryError("</%s> without preceding <%s>" % (tag.label, tag.label), line)
    if open_label is not None:
        raise BoundaryError("<%s> left unclosed at snippet end" % open_label, open_line)
    return spans


def tags_from_spans(spans: Iterable[EntitySpan], tokens: Sequence[Token]) -> list:
    where = {(t.snippet_id, t.index): i for i, t in enumerate(tokens)}
    tags = [OUTSIDE] * len(tokens)
    taken = [False] * len(tokens)
    for span in spans:
        for idx in range(span.start, span.end + 1):
            pos = where.get((span.snippet_id, idx))
            if pos is None:
                raise DataError("span %r outside the token range" % (span,))
            if taken[pos]:
                raise DataError("overlapping spans at snippet %s token %d" % (span.snippet_id, idx))
            taken[pos] = True
            if span.start == span.end:
                tags[pos] = BoundaryTag(span.label, Position.UNIT)
            elif idx == span.end:
                tags[pos] = BoundaryTag(span.label, Position.END)
            else:
                tags[pos] = BoundaryTag(span.label, Position.BEGIN)
    return [AnnotatedToken(tok, tag) for tok, tag in zip(tokens, tags)]


def split_snippets(tokens: Sequence, max_len: int, spans: Iterable[EntitySpan] = ()) -> list:
    """Cut a flat token stream into snippets of at most ``max_len`` tokens.

    ``spans`` index into the flat stream (their snippet ids are ignored). A cut
    that would fall inside a span is deferred to just after it, so such
    snippets may exceed ``max_len``. Items may be Token or AnnotatedToken;
    they are renumbered into the new snippets.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    spans = sorted(spans, key=lambda s: (s.start, s.end))
    groups = []
    start = 0
    n = len(tokens)
    while start < n:
        cut = min(start + max_len, n)
        moved = True
        while moved and cut < n:
            moved = False
            for span in spans:
                if span.start < cut <= span.end:
                    cut = min(span.end + 1, n)
                    moved = True
        groups.append(tokens[start:cut])
        start = cut
    result = []
    for sid, group in enumerate(groups):
        snippet = []
        for i, item in enumerate(group):
            if isinstance(item, AnnotatedToken):
                snippet.append(AnnotatedToken(Token(item.surface, i, sid), item.tag))
            else:
                snippet.append(Token(item.surface, i, sid))
        result.append(snippet)
    return result
