import random

import pytest
from hypothesis import given, strategies as st

from histner.corpus import Token
from histner.errors import DataError, UndefinedRateError
from histner.morpho import (
    MorphAnalysis, MorphLexicon, analyze, analyze_or_guess, disambiguate, guess,
    normalize_historical, recognition_rate,
)


def test_lahti_place_and_surname(lexicon):
    classes = {a.name_class for a in analyze("Lahti", lexicon)}
    assert classes == {"place", "person"}


def test_unknown_is_empty(lexicon):
    assert analyze("qxzzv", lexicon) == ()


def test_lexicon_rejects_bad_rows():
    with pytest.raises(DataError) as err:
        MorphLexicon.from_lines(["a\ta\tnoun\t-\t-\t1", "broken\trow"])
    assert err.value.line == 2


def test_disambiguate():
    a = MorphAnalysis("x", "noun", frequency_weight=3.0)
    b = MorphAnalysis("y", "noun", frequency_weight=1.0)
    assert disambiguate([a]) is a
    assert disambiguate([b, a]) == a
    with pytest.raises(ValueError):
        disambiguate([])


def test_disambiguate_tie_is_stable():
    lower = MorphAnalysis("aalto", "noun", frequency_weight=1.0)
    upper = MorphAnalysis("Aalto", "propn", frequency_weight=1.0)
    winners = set()
    for seed in range(20):
        items = [lower, upper]
        random.Random(seed).shuffle(items)
        winners.add(disambiguate(items))
    assert len(winners) == 1


def test_guess_street_suffix(lexicon):
    g = guess("Rautakatu", lexicon)
    assert g.guessed and g.lemma.endswith("katu")
    assert g.pos in ("noun", "propn")


def test_guess_without_overlap(lexicon):
    g = guess("qqqqxz", lexicon)
    assert g.pos == "unknown" and g.guessed


def test_guess_sensitive_to_suffix_noise(lexicon):
    assert guess("Rautakafu", lexicon) != guess("Rautakatu", lexicon)


def test_analyze_or_guess_prefers_lexicon(lexicon):
    a = analyze_or_guess("Lahti", lexicon)
    assert not a.guessed and a.name_class == "place"


def test_normalize():
    assert normalize_historical("wapaa") == "vapaa"
    assert normalize_historical("Waasa") == "Vaasa"


@given(st.text())
def test_normalize_idempotent(s):
    once = normalize_historical(s)
    assert normalize_historical(once) == once
    assert "w" not in once and "W" not in once
    assert len(once) == len(s)


def _tokens(known, total, lexicon):
    surfaces = sorted(lexicon.surfaces())[:known] + ["zzq%d" % i for i in range(total - known)]
    return [Token(s, i) for i, s in enumerate(surfaces)]


def test_recognition_rate(lexicon):
    assert recognition_rate(_tokens(5, 5, lexicon), lexicon) == 1.0
    assert recognition_rate(_tokens(0, 5, lexicon), lexicon) == 0.0
    assert recognition_rate(_tokens(73, 100, lexicon), lexicon) == pytest.approx(0.73)
    with pytest.raises(UndefinedRateError):
        recognition_rate([], lexicon)
