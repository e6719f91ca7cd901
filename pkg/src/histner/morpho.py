"""Lexicon-backed morphological analysis with suffix-analogy guessing."""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import DataError, UndefinedRateError

NAME_CLASSES = ("place", "person")
UNKNOWN_POS = "unknown"
DEFAULT_MIN_SUFFIX = 3

_WV = str.maketrans("wW", "vV")


@dataclass(frozen=True)
class MorphAnalysis:
    lemma: str
    pos: str
    case_tag: Optional[str] = None
    name_class: Optional[str] = None
    frequency_weight: float = 0.0
    guessed: bool = False

    def __post_init__(self):
        if self.frequency_weight < 0:
            raise ValueError("frequency_weight must be nonnegative")
        if self.guessed and self.frequency_weight != 0:
            raise ValueError("guessed analyses carry weight 0")
        if self.name_class is not None and self.name_class not in NAME_CLASSES:
            raise ValueError("unknown name class %r" % self.name_class)


def _sort_key(a: MorphAnalysis):
    return (-a.frequency_weight, a.lemma, a.pos, a.case_tag or "", a.name_class or "", a.guessed)


class MorphLexicon:
    """Immutable surface-form lexicon with a reversed-form suffix index."""

    def __init__(self, entries: Iterable = ()):
        table = {}
        for surface, analysis in entries:
            table.setdefault(surface, set()).add(analysis)
        self._entries = {s: tuple(sorted(a, key=_sort_key)) for s, a in table.items()}
        self._reversed = sorted(s[::-1] for s in self._entries)

    @classmethod
    def from_file(cls, path) -> "MorphLexicon":
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "MorphLexicon":
        entries = []
        for lineno, line in enumerate(lines, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 6:
                raise DataError("expected 6 columns, got %d" % len(fields), lineno)
            surface, lemma, pos, case_tag, name_class, weight = fields
            if not surface or not lemma or not pos:
                raise DataError("empty surface, lemma or pos", lineno)
            try:
                analysis = MorphAnalysis(
                    lemma, pos,
                    None if case_tag == "-" else case_tag,
                    None if name_class == "-" else name_class,
                    float(weight),
                )
            except ValueError as exc:
                raise DataError(str(exc), lineno) from None
            entries.append((surface, analysis))
        return cls(entries)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, surface):
        return surface in self._entries

    def surfaces(self):
        return sorted(self._entries)

    def items(self):
        for surface in sorted(self._entries):
            for analysis in self._entries[surface]:
                yield surface, analysis

    def extended(self, entries: Iterable) -> "MorphLexicon":
        return MorphLexicon(list(self.items()) + list(entries))

    def analyze(self, surface: str) -> tuple:
        found = self._entries.get(surface)
        if found is None and surface[:1].isupper():
            # sentence-initial capitalization of a common word
            found = self._entries.get(surface[0].lower() + surface[1:])
        return found or ()

    def longest_suffix_block(self, surface: str):
        """Return (length, forms) for lexicon forms sharing the longest suffix."""
        rev = surface[::-1]
        table = self._reversed
        i = bisect.bisect_left(table, rev)
        best = 0
        for j in (i - 1, i):
            if 0 <= j < len(table):
                best = max(best, _common_prefix(rev, table[j]))
        if best == 0:
            return 0, []
        prefix = rev[:best]
        lo = bisect.bisect_left(table, prefix)
        hi = bisect.bisect_right(table, prefix + "\U0010ffff")
        return best, [r[::-1] for r in table[lo:hi]]


def _common_prefix(a: str, b: str) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def analyze(surface: str, lexicon: MorphLexicon) -> tuple:
    return lexicon.analyze(surface)


def disambiguate(analyses: Iterable[MorphAnalysis]) -> MorphAnalysis:
    """Highest frequency weight; ties go to the smaller lemma, then pos."""
    analyses = list(analyses)
    if not analyses:
        raise ValueError("cannot disambiguate an empty analysis set")
    return min(analyses, key=_sort_key)


def unknown_analysis(surface: str) -> MorphAnalysis:
    return MorphAnalysis(surface, UNKNOWN_POS, guessed=True)


def _reconstruct_lemma(surface: str, form: str, lemma: str, shared: int) -> str:
    stem = _common_prefix(form, lemma)
    strip = len(form) - stem
    if strip > shared:
        # inflection reaches past the shared ending; nothing to transfer
        return surface
    return surface[:len(surface) - strip] + lemma[stem:]


def guess(surface: str, lexicon: MorphLexicon, min_suffix: int = DEFAULT_MIN_SUFFIX) -> MorphAnalysis:
    """Analyse an unknown word by analogy with the longest shared ending."""
    assert not lexicon.analyze(surface), "guess() called on a known form %r" % surface
    shared, forms = lexicon.longest_suffix_block(surface)
    if shared < min_suffix:
        return unknown_analysis(surface)
    candidates = [(a, f) for f in forms for a in lexicon.analyze(f)]
    best, form = min(candidates, key=lambda c: (_sort_key(c[0]), c[1]))
    return MorphAnalysis(
        _reconstruct_lemma(surface, form, best.lemma, shared),
        best.pos, best.case_tag, best.name_class, 0.0, True,
    )


def analyze_or_guess(surface: str, lexicon: MorphLexicon, min_suffix: int = DEFAULT_MIN_SUFFIX) -> MorphAnalysis:
    found = lexicon.analyze(surface)
    if found:
        return disambiguate(found)
    return guess(surface, lexicon, min_suffix)


def normalize_historical(surface: str) -> str:
    """Map 19th-century w spellings to modern v (w->v, W->V)."""
    return surface.translate(_WV)


def recognition_rate(tokens: Iterable, lexicon: MorphLexicon) -> float:
    """Fraction of tokens the lexicon recognizes. Accepts Tokens or strings."""
    total = known = 0
    for tok in tokens:
        surface = getattr(tok, "surface", tok)
        total += 1
        if lexicon.analyze(surface):
            known += 1
    if total == 0:
        raise UndefinedRateError("recognition rate of an empty token sequence")
    return known / total
