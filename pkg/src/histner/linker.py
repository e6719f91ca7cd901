"""Entity linking in the lookup style: lemmatize (guessing when needed), look
the lemma up in the registries, drop place hits that look like person names
unless the place is big, and optionally fall back to fuzzy matching.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .corpus import AnnotatedToken, EntitySpan, group_snippets, tags_from_spans
from .errors import ConfigError, DataError
from .gazetteer import FormIndex, FuzzyMatch, GazetteerIndex, QueryRecord, source_contributions
from .morpho import DEFAULT_MIN_SUFFIX, MorphLexicon, analyze_or_guess, normalize_historical
from .rules import is_capitalized, is_initial

FUZZY_STAGES = ("query", "lexical")
FILTER_REASONS = ("person-morph", "person-pattern", "none")


@dataclass(frozen=True)
class LinkerConfig:
    fuzzy_max_dist: int = 0
    person_filter_enabled: bool = True
    size_threshold: float = 50_000
    wv_normalize: bool = False
    # where fuzzy matching happens: against registry names after
    # lemmatization ("query"), or against lexicon forms before it ("lexical")
    fuzzy_stage: str = "query"
    fuzzy_min_length: int = 4
    require_capitalized: bool = True
    min_suffix: int = DEFAULT_MIN_SUFFIX
    place_label: str = "EnamexLocPpl"
    person_label: str = "EnamexPrsHum"

    def __post_init__(self):
        if self.fuzzy_max_dist < 0:
            raise ConfigError("fuzzy_max_dist must be nonnegative")
        if self.size_threshold < 0:
            raise ConfigError("size_threshold must be nonnegative")
        if self.fuzzy_stage not in FUZZY_STAGES:
            raise ConfigError("fuzzy_stage must be one of %s" % ", ".join(FUZZY_STAGES))


@dataclass(frozen=True)
class LinkCandidate:
    span: EntitySpan
    matches: tuple = ()
    filtered: bool = False
    reason: str = "none"
    kind: str = "place"
    linkable: bool = True

    @property
    def best(self) -> Optional[FuzzyMatch]:
        if not self.matches:
            return None
        return min(self.matches, key=lambda m: (m.distance, -m.entry.size_or_zero, m.entry.sort_key()))


class NameAuthority:
    """First and last names, matched case-insensitively."""

    def __init__(self, first_names: Iterable[str] = (), last_names: Iterable[str] = ()):
        self.first_names = frozenset(n.casefold() for n in first_names)
        self.last_names = frozenset(n.casefold() for n in last_names)

    @classmethod
    def from_file(cls, path) -> "NameAuthority":
        first, last = [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 2 or fields[1] not in ("first", "last"):
                    raise DataError("expected name<TAB>first|last", lineno)
                (first if fields[1] == "first" else last).append(fields[0])
        return cls(first, last)

    def is_first(self, word: str) -> bool:
        return word.casefold() in self.first_names

    def is_last(self, word: str) -> bool:
        return word.casefold() in self.last_names

    def is_name(self, word: str) -> bool:
        return self.is_first(word) or self.is_last(word)


class _Lexical:
    """Per-run helpers shared by the place linking steps."""

    def __init__(self, lexicon: MorphLexicon, index: GazetteerIndex, config: LinkerConfig):
        self.lexicon = lexicon
        self.index = index
        self.config = config
        self._lexicon_forms = None

    def norm(self, surface: str) -> str:
        return normalize_historical(surface) if self.config.wv_normalize else surface

    def lemma(self, surface: str) -> str:
        return analyze_or_guess(self.norm(surface), self.lexicon, self.config.min_suffix).lemma

    def places_exact(self, form: str) -> list:
        return [FuzzyMatch(e, v, 0) for e, v in self.index.lookup_exact(form) if e.entity_class == "place"]

    def places_fuzzy(self, form: str, dist: int) -> list:
        return [m for m in self.index.lookup_fuzzy(form, dist) if m.entry.entity_class == "place"]

    def lexicon_neighbours(self, form: str, dist: int) -> list:
        if self._lexicon_forms is None:
            self._lexicon_forms = FormIndex(((s, s) for s in self.lexicon.surfaces()), self.index.ceiling)
        hits = self._lexicon_forms.fuzzy(form, dist)
        if not hits:
            return []
        best = min(d for _, d in hits)
        return [(f, d) for f, d in hits if d == best]


def _link_token(lex: _Lexical, surface: str) -> tuple:
    config = lex.config
    form = lex.norm(surface)
    lemma = lex.lemma(surface)
    matches = lex.places_exact(lemma)
    if matches or not config.fuzzy_max_dist or len(form) < config.fuzzy_min_length:
        return tuple(matches)
    if config.fuzzy_stage == "query":
        return tuple(lex.places_fuzzy(lemma, config.fuzzy_max_dist))
    if lex.lexicon.analyze(form):
        return ()
    found = []
    for neighbour, dist in lex.lexicon_neighbours(form, config.fuzzy_max_dist):
        neighbour_lemma = analyze_or_guess(neighbour, lex.lexicon, config.min_suffix).lemma
        found.extend(FuzzyMatch(m.entry, m.variant, dist) for m in lex.places_exact(neighbour_lemma))
    return tuple(sorted(set(found), key=lambda m: (m.distance, m.entry.sort_key(), m.variant)))


def link_places(tokens: Sequence, lexicon: MorphLexicon, index: GazetteerIndex, config: LinkerConfig = LinkerConfig(),
                authority: Optional[NameAuthority] = None) -> list:
    """Place candidates for a token stream (one or more snippets)."""
    index.check_distance(config.fuzzy_max_dist)
    lex = _Lexical(lexicon, index, config)
    max_words = index.max_words
    out = []
    for snippet in group_snippets(tokens):
        surfaces = [t.surface for t in snippet]
        sid = snippet[0].snippet_id
        i = 0
        while i < len(snippet):
            if config.require_capitalized and not is_capitalized(surfaces[i]):
                i += 1
                continue
            merged = None
            for k in range(min(max_words, len(snippet) - i), 1, -1):
                window = surfaces[i:i + k]
                if config.require_capitalized and not is_capitalized(window[-1]):
                    continue
                for form in (" ".join(window), " ".join(window[:-1] + [lex.lemma(window[-1])])):
                    hits = lex.places_exact(lex.norm(form))
                    if hits:
                        merged = (k, tuple(hits))
                        break
                if merged:
                    break
            if merged:
                k, hits = merged
                out.append(LinkCandidate(EntitySpan(sid, snippet[i].index, snippet[i + k - 1].index,
                                                    config.place_label), hits))
                i += k
                continue
            hits = _link_token(lex, surfaces[i])
            if hits:
                out.append(LinkCandidate(EntitySpan(sid, snippet[i].index, snippet[i].index,
                                                    config.place_label), hits))
            i += 1
    if config.person_filter_enabled:
        out = filter_person_conflicts(out, tokens, lexicon, config, authority)
    return out


def filter_person_conflicts(candidates: Sequence[LinkCandidate], tokens: Sequence, lexicon: MorphLexicon,
                            config: LinkerConfig, authority: Optional[NameAuthority] = None) -> list:
    """Mark place candidates that look like person names, unless the best
    matched place is at least ``config.size_threshold`` big."""
    if not config.person_filter_enabled:
        return list(candidates)
    where = {(t.snippet_id, t.index): t.surface for t in tokens}
    out = []
    for cand in candidates:
        if cand.kind != "place":
            out.append(cand)
            continue
        span = cand.span
        best = cand.best
        size = best.entry.size_or_zero if best else 0
        if size >= config.size_threshold:
            out.append(replace(cand, filtered=False, reason="none"))
            continue
        words = [where[(span.snippet_id, i)] for i in range(span.start, span.end + 1)]
        reason = "none"
        norm = normalize_historical if config.wv_normalize else (lambda s: s)
        if any(a.name_class == "person" for w in words for a in lexicon.analyze(norm(w))):
            reason = "person-morph"
        else:
            prev = where.get((span.snippet_id, span.start - 1))
            if prev is not None and is_capitalized(words[0]):
                if is_initial(prev):
                    reason = "person-pattern"
                elif is_capitalized(prev) and (authority.is_first(prev) if authority else True):
                    reason = "person-pattern"
        out.append(replace(cand, filtered=reason != "none", reason=reason))
    return out


def link_persons(tokens: Sequence, authority: NameAuthority, label: str = "EnamexPrsHum") -> list:
    """Runs of capitalized authority names, with any leading initials."""
    out = []
    for snippet in group_snippets(tokens):
        surfaces = [t.surface for t in snippet]
        sid = snippet[0].snippet_id
        n = len(snippet)
        i = 0
        while i < n:
            j = i
            while j < n and is_initial(surfaces[j]):
                j += 1
            k = j
            while k < n and is_capitalized(surfaces[k]) and not is_initial(surfaces[k]) \
                    and authority.is_name(surfaces[k]):
                k += 1
            if k == j:
                i = max(j, i + 1)
                continue
            out.append(LinkCandidate(EntitySpan(sid, snippet[i].index, snippet[k - 1].index, label),
                                     kind="person", linkable=j == i))
            i = k
    return out


def _extent(span: EntitySpan) -> tuple:
    return span.snippet_id, span.start, span.end


def resolve_overlaps(candidates: Sequence[LinkCandidate]) -> list:
    """Keep unfiltered candidates; on collision a retained place beats a
    person with the identical span, otherwise the person wins."""
    live = [c for c in candidates if not c.filtered]
    persons = [c for c in live if c.kind == "person"]
    places = [c for c in live if c.kind == "place"]
    dropped_persons = set()
    kept_places = []
    for p in places:
        clash = [q for q in persons if q.span.overlaps(p.span)]
        if not clash:
            kept_places.append(p)
        elif all(_extent(q.span) == _extent(p.span) for q in clash):
            kept_places.append(p)
            dropped_persons.update(id(q) for q in clash)
    kept = kept_places + [q for q in persons if id(q) not in dropped_persons]
    return sorted(kept, key=lambda c: (c.span.snippet_id, c.span.start))


def candidates_to_tags(candidates: Sequence[LinkCandidate], tokens: Sequence,
                       place_label: Optional[str] = None, person_label: Optional[str] = None) -> list:
    spans = []
    for c in resolve_overlaps(candidates):
        label = c.span.label
        if c.kind == "place" and place_label:
            label = place_label
        elif c.kind == "person" and person_label:
            label = person_label
        spans.append(replace(c.span, label=label))
    plain = [t.token if isinstance(t, AnnotatedToken) else t for t in tokens]
    return tags_from_spans(spans, plain)


def link_statistics(candidates: Sequence[LinkCandidate], tokens: Sequence, sources: Sequence[str] = ()) -> list:
    where = {(t.snippet_id, t.index): t.surface for t in tokens}
    records = []
    for c in candidates:
        if c.kind != "place" or c.filtered:
            continue
        form = " ".join(where[(c.span.snippet_id, i)] for i in range(c.span.start, c.span.end + 1))
        records.append(QueryRecord(form, c.matches))
    return source_contributions(records, sources)


@dataclass
class Linker:
    """Bundle of linking resources; callable as a tagger."""

    lexicon: MorphLexicon
    index: GazetteerIndex
    config: LinkerConfig = field(default_factory=LinkerConfig)
    authority: Optional[NameAuthority] = None
    link_people: bool = False

    def candidates(self, tokens: Sequence) -> list:
        plain = [t.token if isinstance(t, AnnotatedToken) else t for t in tokens]
        cands = link_places(plain, self.lexicon, self.index, self.config, self.authority)
        if self.link_people:
            if self.authority is None:
                raise ConfigError("person linking needs a name authority")
            cands += link_persons(plain, self.authority, self.config.person_label)
        return cands

    def tag(self, tokens: Sequence) -> list:
        plain = [t.token if isinstance(t, AnnotatedToken) else t for t in tokens]
        return candidates_to_tags(self.candidates(plain), plain)

    __call__ = tag

