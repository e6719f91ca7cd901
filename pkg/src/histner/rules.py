"""Rule-based tagging: a small pattern DSL, leftmost-longest matching and
two-phase application.

Rule file syntax, one rule per line::

    rule <id> phase=<1|2> label=<Label> : <step> <step> ...

A step tests one token (or a run of tokens with a ``+``, ``*`` or ``?``
suffix). Tests may be joined with ``&`` so that all must hold::

    "literal"|"other"   surface equals one of the literals
    CAP                 first character is an uppercase letter
    NUM                 a number such as 45, 1890 or 12.
    INITIAL             a single capital letter followed by a period
    CASE(nom|gen)       case of the chosen analysis
    GAZ(place)          lexical or registry class (place, person-first, person-last)
    SUFFIX(katu|tie)    surface or lemma ends with one of the suffixes
    LEMMA(tuottaa)      lemma of the chosen analysis
    PUNCT(,|(|))        punctuation token
    TRIG(person)        start of a context trigger of that kind

``CTX(step)`` marks a step as context: it must match and is consumed, but it
is not part of the labeled span. Context steps may only open or close a rule.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .corpus import DEFAULT_TAGSET, AnnotatedToken, EntitySpan, TagSet, group_snippets, tags_from_spans
from .errors import CompileError
from .gazetteer import ENTITY_CLASSES, GazetteerIndex
from .morpho import (DEFAULT_MIN_SUFFIX, MorphAnalysis, MorphLexicon, analyze_or_guess,
                     normalize_historical)

KEEP_CASES = frozenset({"nom", "gen"})
KEYWORDS_BARE = ("CAP", "NUM", "INITIAL")
KEYWORDS_ARG = ("CASE", "GAZ", "SUFFIX", "LEMMA", "PUNCT", "TRIG")
QUANTIFIERS = ("+", "*", "?")

_NUM_RE = re.compile(r"\d+(?:[.,:/-]\d+)*\.?")
_INITIAL_RE = re.compile(r"\w\.", re.UNICODE)


def is_capitalized(surface: str) -> bool:
    return bool(surface) and unicodedata.category(surface[0]) in ("Lu", "Lt")


def is_number(surface: str) -> bool:
    return bool(_NUM_RE.fullmatch(surface))


def is_initial(surface: str) -> bool:
    return bool(_INITIAL_RE.fullmatch(surface)) and is_capitalized(surface)


@dataclass(frozen=True)
class AnalyzedToken:
    surface: str
    analysis: MorphAnalysis
    name_classes: frozenset = frozenset()
    triggers: frozenset = frozenset()

    @property
    def lemma(self):
        return self.analysis.lemma

    @property
    def case_tag(self):
        return self.analysis.case_tag


@dataclass(frozen=True)
class PatternAtom:
    kind: str
    payload: object = None

    def __post_init__(self):
        if self.kind in ("literal", "suffix", "case", "gaz", "lemma", "punct", "trigger"):
            if not self.payload or any(not p for p in self.payload):
                raise ValueError("empty payload for %s" % self.kind)

    def test(self, tok: AnalyzedToken) -> bool:
        kind = self.kind
        if kind == "literal":
            return tok.surface in self.payload
        if kind == "capitalized-word":
            return is_capitalized(tok.surface)
        if kind == "number":
            return is_number(tok.surface)
        if kind == "initial":
            return is_initial(tok.surface)
        if kind == "case":
            return tok.case_tag in self.payload
        if kind == "gaz":
            return not tok.name_classes.isdisjoint(self.payload)
        if kind == "suffix":
            return any(tok.surface.endswith(s) or tok.lemma.endswith(s) for s in self.payload)
        if kind == "lemma":
            return tok.lemma in self.payload
        if kind == "punct":
            return tok.surface in self.payload
        if kind == "trigger":
            return not tok.triggers.isdisjoint(self.payload)
        raise ValueError("unknown atom kind %r" % kind)


@dataclass(frozen=True)
class PatternStep:
    atoms: tuple
    context: bool = False
    repeat: str = ""

    def test(self, tok: AnalyzedToken) -> bool:
        return all(a.test(tok) for a in self.atoms)


@dataclass(frozen=True)
class PatternRule:
    id: str
    atoms: tuple
    action_label: str
    phase: int
    priority: int

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("rule %s has no steps" % self.id)
        if all(s.context for s in self.atoms):
            raise ValueError("rule %s has only context steps" % self.id)
        flags = [s.context for s in self.atoms]
        first = flags.index(False)
        last = len(flags) - 1 - flags[::-1].index(False)
        if any(flags[first:last + 1]):
            raise ValueError("rule %s has a context step inside the labeled part" % self.id)


@dataclass(frozen=True)
class RuleSet:
    rules: tuple = ()

    def __post_init__(self):
        ids = [r.id for r in self.rules]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate rule ids")

    def __len__(self):
        return len(self.rules)

    def phase(self, n: int) -> list:
        return [r for r in self.rules if r.phase == n]


@dataclass(frozen=True, order=True)
class MatchSpan:
    start: int
    end: int
    label: str
    rule_id: str


# -- compiler -------------------------------------------------------------

_RULE_RE = re.compile(r"rule\s+(\S+)\s+phase=(\S+)\s+label=(\S+)\s*:\s*(.*)")


def _split_alternatives(text):
    return tuple(text.split("|"))


def _punct_end(step, start):
    for j in range(start + 1, len(step)):
        if step[j] != ")":
            continue
        rest = step[j + 1:]
        if rest == "" or rest[0] == "&" or (len(rest) == 1 and rest in QUANTIFIERS):
            return j
    return -1


def _parse_atoms(step: str) -> list:
    atoms = []
    i = 0
    while True:
        if i >= len(step):
            raise ValueError("dangling '&'" if atoms else "empty step")
        if step[i] == '"':
            literals = []
            while True:
                j = step.find('"', i + 1)
                if j < 0:
                    raise ValueError("unterminated literal")
                if j == i + 1:
                    raise ValueError("empty literal")
                literals.append(step[i + 1:j])
                i = j + 1
                if step.startswith('|"', i):
                    i += 1
                    continue
                break
            atoms.append(PatternAtom("literal", frozenset(literals)))
        else:
            m = re.match(r"[A-Z]+", step[i:])
            if not m:
                raise ValueError("cannot parse %r" % step[i:])
            word = m.group(0)
            i += len(word)
            if word in KEYWORDS_BARE:
                atoms.append(PatternAtom({"CAP": "capitalized-word", "NUM": "number",
                                          "INITIAL": "initial"}[word]))
            elif word in KEYWORDS_ARG:
                if not step.startswith("(", i):
                    raise ValueError("%s needs an argument" % word)
                if word == "PUNCT":
                    j = _punct_end(step, i)
                else:
                    j = step.find(")", i)
                if j < 0:
                    raise ValueError("unclosed %s(" % word)
                args = _split_alternatives(step[i + 1:j])
                i = j + 1
                if word == "GAZ":
                    bad = [a for a in args if a not in ENTITY_CLASSES]
                    if bad:
                        raise ValueError("unknown gazetteer class %s" % bad[0])
                kind = {"CASE": "case", "GAZ": "gaz", "SUFFIX": "suffix", "LEMMA": "lemma",
                        "PUNCT": "punct", "TRIG": "trigger"}[word]
                payload = args if kind == "suffix" else frozenset(args)
                atoms.append(PatternAtom(kind, payload))
            else:
                raise ValueError("unknown keyword %s" % word)
        if i == len(step):
            return atoms
        if step[i] == "&":
            i += 1
            continue
        raise ValueError("unexpected %r" % step[i:])


def _parse_step(text: str) -> PatternStep:
    context = False
    if text.startswith("CTX(") and text.endswith(")"):
        context = True
        text = text[4:-1]
    repeat = ""
    head = text[:-1]
    if len(text) > 1 and text[-1] in QUANTIFIERS and (
            text[-2] in ')"' or head.rsplit("&", 1)[-1] in KEYWORDS_BARE):
        repeat = text[-1]
        text = text[:-1]
    return PatternStep(tuple(_parse_atoms(text)), context, repeat)


def compile_ruleset(source: str, tagset: TagSet = DEFAULT_TAGSET) -> RuleSet:
    rules = []
    seen = set()
    for lineno, raw in enumerate(source.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _RULE_RE.fullmatch(line)
        if not m:
            raise CompileError("syntax error", lineno)
        rule_id, phase, label, body = m.groups()
        if rule_id in seen:
            raise CompileError("duplicate rule id %s" % rule_id, lineno)
        if phase not in ("1", "2"):
            raise CompileError("phase must be 1 or 2", lineno)
        if label not in tagset:
            raise CompileError("unknown label %s" % label, lineno)
        try:
            steps = tuple(_parse_step(s) for s in body.split())
            rule = PatternRule(rule_id, steps, label, int(phase), len(rules))
        except ValueError as exc:
            raise CompileError(str(exc), lineno) from None
        seen.add(rule_id)
        rules.append(rule)
    return RuleSet(tuple(rules))


def load_ruleset(path, tagset: TagSet = DEFAULT_TAGSET) -> RuleSet:
    with open(path, encoding="utf-8") as fh:
        return compile_ruleset(fh.read(), tagset)


# -- matcher --------------------------------------------------------------

def rule_matches(rule: PatternRule, tokens: Sequence[AnalyzedToken], start: int,
                 blocked=frozenset()) -> set:
    """All ways ``rule`` matches from ``start``: (end, span_start, span_end),
    half-open, with the labeled span excluding context steps."""
    n = len(tokens)

    def ok(pos, step):
        return pos < n and pos not in blocked and step.test(tokens[pos])

    states = {(start, None, None)}
    for step in rule.atoms:
        nxt = set()
        for pos, ss, se in states:
            if not step.context and ss is None:
                ss = pos
            reach = set()
            if step.repeat in ("", "+"):
                if ok(pos, step):
                    reach.add(pos + 1)
            else:
                reach.add(pos)
                if ok(pos, step):
                    reach.add(pos + 1)
            if step.repeat in ("+", "*"):
                frontier = set(reach)
                while frontier:
                    p = frontier.pop()
                    if ok(p, step) and p + 1 not in reach:
                        reach.add(p + 1)
                        frontier.add(p + 1)
            for p in reach:
                nxt.add((p, ss, p if not step.context else se))
        states = nxt
        if not states:
            return set()
    return {(end, ss, se) for end, ss, se in states if se is not None and se > ss}


def match_leftmost_longest(tokens: Sequence[AnalyzedToken], rules: Iterable[PatternRule],
                           blocked=frozenset()) -> list:
    """Leftmost-longest, non-overlapping matches of one rule phase.

    At each position the longest match (context steps included) wins; ties go
    to the lower priority number, then to the longer and earlier labeled
    span. Scanning resumes after the whole match.
    """
    rules = sorted(rules, key=lambda r: r.priority)
    out = []
    pos = 0
    n = len(tokens)
    while pos < n:
        best = None
        for rule in rules:
            for end, ss, se in rule_matches(rule, tokens, pos, blocked):
                key = (end - pos, -rule.priority, se - ss, -ss)
                if best is None or key > best[0]:
                    best = (key, end, ss, se, rule)
        if best is None:
            pos += 1
            continue
        _, end, ss, se, rule = best
        out.append(MatchSpan(ss, se - 1, rule.action_label, rule.id))
        pos = end
    return out


def apply_two_pass(tokens: Sequence[AnalyzedToken], ruleset: RuleSet) -> list:
    """Phase 1 fixes its spans first; phase 2 may not touch those tokens."""
    first = match_leftmost_longest(tokens, ruleset.phase(1))
    blocked = frozenset(i for m in first for i in range(m.start, m.end + 1))
    second = match_leftmost_longest(tokens, ruleset.phase(2), blocked)
    return sorted(first + second)


def structural_boundary_trim(run: Sequence[AnalyzedToken]) -> list:
    """Drop leading capitalized words in a case other than nominative or
    genitive; the last word keeps any case. Unknown case is kept."""
    run = list(run)
    while (len(run) > 1 and is_capitalized(run[0].surface)
           and run[0].case_tag is not None and run[0].case_tag not in KEEP_CASES):
        run.pop(0)
    return run


# -- context triggers -----------------------------------------------------

@dataclass(frozen=True)
class TriggerLexicons:
    corp_verbs: frozenset = frozenset({"tuottaa", "työllistää", "lanseerata"})
    party_abbrevs: frozenset = frozenset({"sos.dem.", "sd.", "suom.", "nuors.", "ruots.",
                                          "maalaisl.", "kok.", "rkp."})

    @classmethod
    def from_file(cls, path) -> "TriggerLexicons":
        """TSV of ``kind<TAB>word``, kind being ``corp`` or ``party``."""
        corp, party = set(), set()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 2 or fields[0] not in ("corp", "party"):
                    raise CompileError("expected corp|party<TAB>word", lineno)
                (corp if fields[0] == "corp" else party).add(fields[1])
        return cls(frozenset(corp), frozenset(party))


TRIGGER_LABELS = {"corp": "EnamexOrgCrp", "person": "EnamexPrsHum"}


@dataclass(frozen=True)
class TriggerAnnotation:
    run_start: int
    run_end: int
    trigger_start: int
    trigger_end: int
    kind: str
    label: str


def _trigger_at(tokens, p, lex: TriggerLexicons):
    n = len(tokens)
    tok = tokens[p]
    lemma = getattr(tok, "lemma", tok.surface)
    if lemma in lex.corp_verbs or tok.surface.lower() in lex.corp_verbs:
        return "corp", p
    if tok.surface.lower() in lex.party_abbrevs:
        return "person", p
    if tok.surface == "," and p + 1 < n:
        nxt = tokens[p + 1].surface
        if is_number(nxt) or nxt.lower() in lex.party_abbrevs:
            return "person", p + 1
    if tok.surface == "(" and p + 2 < n and is_number(tokens[p + 1].surface) \
            and tokens[p + 2].surface == ")":
        return "person", p + 2
    return None


def context_trigger_match(tokens: Sequence, lexicons: TriggerLexicons = TriggerLexicons()) -> list:
    """Find collocations after a capitalized run that license a label for it."""
    out = []
    for p in range(1, len(tokens)):
        if not is_capitalized(tokens[p - 1].surface):
            continue
        found = _trigger_at(tokens, p, lexicons)
        if found is None:
            continue
        kind, last = found
        start = p - 1
        while start > 0 and is_capitalized(tokens[start - 1].surface):
            start -= 1
        out.append(TriggerAnnotation(start, p - 1, p, last, kind, TRIGGER_LABELS[kind]))
    return out


# -- tagger ---------------------------------------------------------------

_PERSON_CLASSES = frozenset({"person-first", "person-last"})


@dataclass
class Tagger:
    """Analyse, annotate triggers, run both rule phases and trim spans."""

    ruleset: RuleSet
    lexicon: MorphLexicon
    index: Optional[GazetteerIndex] = None
    triggers: TriggerLexicons = field(default_factory=TriggerLexicons)
    wv: bool = False
    min_suffix: int = DEFAULT_MIN_SUFFIX
    trim: bool = True

    def analyze(self, surface: str) -> AnalyzedToken:
        form = normalize_historical(surface) if self.wv else surface
        analyses = self.lexicon.analyze(form)
        analysis = analyze_or_guess(form, self.lexicon, self.min_suffix)
        classes = set()
        for a in analyses:
            if a.name_class == "place":
                classes.add("place")
            elif a.name_class == "person":
                classes |= _PERSON_CLASSES
        if self.index is not None:
            for key in {form, analysis.lemma}:
                for m in self.index.lookup_exact(key):
                    classes.add(m.entry.entity_class)
        return AnalyzedToken(surface, analysis, frozenset(classes))

    def analyze_snippet(self, tokens: Sequence) -> list:
        analyzed = [self.analyze(t.surface) for t in tokens]
        marks = {}
        for ann in context_trigger_match(analyzed, self.triggers):
            marks.setdefault(ann.trigger_start, set()).add(ann.kind)
        return [replace(t, triggers=frozenset(marks[i])) if i in marks else t
                for i, t in enumerate(analyzed)]

    def match_snippet(self, tokens: Sequence) -> list:
        analyzed = self.analyze_snippet(tokens)
        spans = apply_two_pass(analyzed, self.ruleset)
        if not self.trim:
            return spans
        out = []
        for m in spans:
            run = analyzed[m.start:m.end + 1]
            kept = structural_boundary_trim(run)
            out.append(replace(m, start=m.end - len(kept) + 1))
        return out

    def tag(self, tokens: Sequence) -> list:
        """Tag Tokens (or AnnotatedTokens, whose tags are ignored)."""
        plain = [t.token if isinstance(t, AnnotatedToken) else t for t in tokens]
        result = []
        for snippet in group_snippets(plain):
            sid = snippet[0].snippet_id
            base = snippet[0].index
            spans = [EntitySpan(sid, base + m.start, base + m.end, m.label)
                     for m in self.match_snippet(snippet)]
            result.extend(tags_from_spans(spans, snippet))
        return result

    __call__ = tag
