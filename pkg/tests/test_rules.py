import random

import pytest

from histner.corpus import spans_from_tags, tokens_from_text
from histner.errors import CompileError
from histner.morpho import MorphAnalysis
from histner.rules import (
    AnalyzedToken, RuleSet, Tagger, TriggerLexicons, apply_two_pass, compile_ruleset,
    context_trigger_match, load_ruleset, match_leftmost_longest, structural_boundary_trim,
)
from generators import analyzed, oracle_token, random_rules, random_tokens
from oracles import oracle_leftmost_longest


def tok(surface, case=None, classes=(), lemma=None):
    return AnalyzedToken(surface, MorphAnalysis(lemma or surface, "x", case), frozenset(classes))


def test_empty_and_comment_only():
    assert len(compile_ruleset("")) == 0
    assert len(compile_ruleset("# nothing\n\n")) == 0


def test_single_literal_rule():
    rs = compile_ruleset('rule r1 phase=2 label=EnamexLocPpl : "Helsinki"\n')
    assert len(rs) == 1 and rs.rules[0].priority == 0


@pytest.mark.parametrize("src,line", [
    ("rule r1 phase=2 label=EnamexFoo : CAP\n", 1),
    ("\nrule r1 phase=3 label=EnamexPrsHum : CAP\n", 2),
    ("rule r1 phase=1 label=EnamexPrsHum : CAP\nrule r1 phase=1 label=EnamexPrsHum : NUM\n", 2),
    ("this is not a rule\n", 1),
    ("rule r1 phase=1 label=EnamexPrsHum : BOGUS\n", 1),
    ('rule r1 phase=1 label=EnamexPrsHum : "unterminated\n', 1),
    ("rule r1 phase=1 label=EnamexPrsHum : CTX(CAP)\n", 1),
    ("rule r1 phase=1 label=EnamexPrsHum : CAP CTX(NUM) CAP\n", 1),
    ("rule r1 phase=1 label=EnamexPrsHum : GAZ(dragon)\n", 1),
    ("rule r1 phase=1 label=EnamexPrsHum : CAP&\n", 1),
])
def test_compile_errors(src, line):
    with pytest.raises(CompileError) as err:
        compile_ruleset(src)
    assert err.value.line == line


def test_quantifier_after_conjunction():
    rs = compile_ruleset("rule r phase=1 label=EnamexPrsHum : GAZ(place)&CAP+\n")
    assert rs.rules[0].atoms[0].repeat == "+"


def test_punct_payloads():
    rs = compile_ruleset("rule r phase=1 label=EnamexPrsHum : CAP PUNCT(,) PUNCT())\n")
    toks = [tok("Aa"), tok(","), tok(")")]
    assert match_leftmost_longest(toks, rs.rules)[0].end == 2


def test_bundled_rules_load(ruleset):
    assert len(ruleset.phase(1)) and len(ruleset.phase(2))


def test_new_york_longest():
    rs = compile_ruleset('rule york phase=2 label=EnamexLocPpl : "York"\n'
                         'rule ny phase=2 label=EnamexLocPpl : "New" "York"\n')
    toks = [tok("Asuin"), tok("New"), tok("York"), tok("ssa")]
    got = match_leftmost_longest(toks, rs.rules)
    assert [(m.start, m.end, m.rule_id) for m in got] == [(1, 2, "ny")]
    rules = [
        {"id": "york", "priority": 0, "label": "EnamexLocPpl",
         "steps": [{"atoms": [("lit", ("York",))], "repeat": "", "context": False}]},
        {"id": "ny", "priority": 1, "label": "EnamexLocPpl",
         "steps": [{"atoms": [("lit", ("New",))], "repeat": "", "context": False},
                   {"atoms": [("lit", ("York",))], "repeat": "", "context": False}]},
    ]
    otoks = [{"surface": t.surface, "lemma": t.lemma, "case": None, "classes": ()} for t in toks]
    assert oracle_leftmost_longest(rules, otoks) == [(1, 2, "EnamexLocPpl", "ny")]


def test_no_match():
    rs = compile_ruleset("rule r phase=1 label=EnamexPrsHum : NUM\n")
    assert match_leftmost_longest([tok("ja"), tok("on")], rs.rules) == []


def test_priority_tie():
    rs = compile_ruleset("rule a phase=2 label=EnamexLocPpl : CAP\n"
                         "rule b phase=2 label=EnamexPrsHum : CAP\n")
    results = set()
    for _ in range(10):
        rules = list(rs.rules)
        random.shuffle(rules)
        results.add(tuple(match_leftmost_longest([tok("Lahti")], rules)))
    assert len(results) == 1
    assert next(iter(results))[0].rule_id == "a"


def test_context_excluded_from_span():
    rs = compile_ruleset('rule r phase=2 label=TimexTmeDat : CTX("vuonna") NUM\n')
    [m] = match_leftmost_longest([tok("vuonna"), tok("1890")], rs.rules)
    assert (m.start, m.end) == (1, 1)


def test_blocked_tokens():
    rs = compile_ruleset("rule r phase=2 label=EnamexLocPpl : CAP+\n")
    got = match_leftmost_longest([tok("Aa"), tok("Bb"), tok("Cc")], rs.rules, blocked={1})
    assert [(m.start, m.end) for m in got] == [(0, 0), (2, 2)]


def test_random_rules_against_oracle():
    rng = random.Random(11)
    for _ in range(200):
        rules, text = random_rules(rng, rng.randint(1, 3))
        toks = random_tokens(rng, rng.randint(1, 8))
        got = [(m.start, m.end, m.label, m.rule_id)
               for m in match_leftmost_longest([analyzed(t) for t in toks], compile_ruleset(text).rules)]
        assert got == oracle_leftmost_longest(rules, [oracle_token(t) for t in toks])


def test_two_pass_age_context(ruleset, lexicon):
    tagger = Tagger(ruleset, lexicon)
    spans = tagger.match_snippet(tokens_from_text("Matti Lahti , 45"))
    assert [(m.start, m.end, m.label) for m in spans] == [(0, 1, "EnamexPrsHum")]


def test_two_pass_neutral_place(ruleset, lexicon):
    tagger = Tagger(ruleset, lexicon)
    spans = tagger.match_snippet(tokens_from_text("Hän muutti Lahti kaupunkiin"))
    assert [(m.start, m.label) for m in spans] == [(2, "EnamexLocPpl")]


def test_empty_phase_one(ruleset, lexicon):
    phase2 = RuleSet(tuple(ruleset.phase(2)))
    toks = Tagger(ruleset, lexicon).analyze_snippet(tokens_from_text("Lahti ja Rautakatu ja Oulu"))
    assert apply_two_pass(toks, phase2) == match_leftmost_longest(toks, ruleset.phase(2))


def test_trim(lexicon):
    tagger = Tagger(RuleSet(), lexicon)
    run = [tagger.analyze(s) for s in ("Helsingissä", "Suomen", "Pankki")]
    assert [t.surface for t in structural_boundary_trim(run)] == ["Suomen", "Pankki"]
    nom = [tok("Matti", "nom"), tok("Virtanen", "nom")]
    assert structural_boundary_trim(nom) == nom
    single = [tok("Helsingissä", "ine")]
    assert structural_boundary_trim(single) == single


def test_triggers():
    words = [tok(s) for s in "Nokia työllistää paljon".split()]
    [ann] = context_trigger_match(words)
    assert (ann.run_start, ann.run_end, ann.kind, ann.label) == (0, 0, "corp", "EnamexOrgCrp")
    words = [tok(s) for s in "Juho Virtanen ( 45 ) asuu".split()]
    [ann] = context_trigger_match(words)
    assert (ann.run_start, ann.run_end, ann.label) == (0, 1, "EnamexPrsHum")
    assert context_trigger_match([tok(s) for s in "Juho asuu täällä".split()]) == []


def test_trigger_file(tmp_path):
    p = tmp_path / "t.tsv"
    p.write_text("corp\tvalmistaa\nparty\tkesk.\n")
    lex = TriggerLexicons.from_file(p)
    assert "valmistaa" in lex.corp_verbs and "kesk." in lex.party_abbrevs
    p.write_text("verb\tx\n")
    with pytest.raises(CompileError):
        TriggerLexicons.from_file(p)


def test_tagger_output_is_well_formed(ruleset, lexicon, sample):
    tagger = Tagger(ruleset, lexicon)
    out = tagger(sample)
    assert [t.surface for t in out] == [t.surface for t in sample]
    spans_from_tags(out)
    assert tagger(sample) == out


def test_load_ruleset_file(tmp_path):
    p = tmp_path / "r.rules"
    p.write_text("rule a phase=1 label=EnamexPrsHum : INITIAL+ CAP\n")
    rs = load_ruleset(p)
    toks = [tok("A."), tok("B."), tok("Virtanen")]
    assert match_leftmost_longest(toks, rs.rules)[0].end == 2
