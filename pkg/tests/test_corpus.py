import pytest
from hypothesis import given, strategies as st

from histner.corpus import (
    AnnotatedToken, BoundaryTag, DEFAULT_TAGSET, EntitySpan, OUTSIDE, Position, TagSet, Token,
    group_snippets, parse_annotated, parse_tag, read_tokens, serialize_annotated,
    spans_from_tags, split_snippets, tags_from_spans, tokens_from_text,
)
from histner.errors import BoundaryError, DataError

LABELS = DEFAULT_TAGSET.labels
surface = st.text(st.characters(blacklist_categories=("Cs", "Cc", "Zs", "Zl", "Zp")),
                  min_size=1, max_size=8).filter(lambda s: not any(c.isspace() for c in s))


@st.composite
def snippet_spans(draw, sid=0):
    n = draw(st.integers(1, 12))
    spans, i = [], 0
    while i < n:
        if draw(st.booleans()):
            length = draw(st.integers(1, n - i))
            spans.append(EntitySpan(sid, i, i + length - 1, draw(st.sampled_from(LABELS))))
            i += length
        else:
            i += draw(st.integers(1, n - i))
    return n, spans


@st.composite
def corpora(draw):
    tokens = []
    for sid in range(draw(st.integers(0, 4))):
        n, spans = draw(snippet_spans(sid))
        toks = [Token(draw(surface), i, sid) for i in range(n)]
        tokens.extend(tags_from_spans(spans, toks))
    return tokens


def test_parse_unit_tag():
    [tok] = parse_annotated("Helsinki\t<EnamexLocPpl/>\n")
    assert tok.surface == "Helsinki"
    assert tok.tag == BoundaryTag("EnamexLocPpl", Position.UNIT)


def test_parse_outside():
    [tok] = parse_annotated("ja\tO\n")
    assert tok.surface == "ja" and tok.tag == OUTSIDE


def test_parse_snippets_and_indices():
    toks = parse_annotated("a\tO\nb\tO\n\nc\tO\n")
    assert [(t.surface, t.snippet_id, t.index) for t in toks] == [("a", 0, 0), ("b", 0, 1), ("c", 1, 0)]


@pytest.mark.parametrize("text,line", [
    ("a\tO\nb\n", 2),
    ("a\tO\tx\n", 1),
    ("a\t<EnamexFooBar/>\n", 1),
    ("a\t<Enamex\n", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(DataError) as err:
        parse_annotated(text)
    assert err.value.line == line


def test_parse_tag_forms():
    assert parse_tag("O") == OUTSIDE
    assert parse_tag("<EnamexPrsHum>") == BoundaryTag("EnamexPrsHum", Position.BEGIN)
    assert parse_tag("</EnamexPrsHum>") == BoundaryTag("EnamexPrsHum", Position.END)
    with pytest.raises(ValueError):
        parse_tag("<EnamexPrsHum")


def test_custom_tagset():
    ts = TagSet(("Foo",))
    assert parse_annotated("a\t<Foo/>\n", ts)[0].tag.label == "Foo"
    with pytest.raises(DataError):
        parse_annotated("a\t<EnamexPrsHum/>\n", ts)


def test_serialize_trivial():
    assert serialize_annotated([]) == ""
    out = serialize_annotated([AnnotatedToken(Token("ja"))])
    assert out == "ja\tO\n"


@given(corpora())
def test_roundtrip(tokens):
    assert list(parse_annotated(serialize_annotated(tokens))) == tokens


def test_tokens_from_text():
    toks = tokens_from_text("Matti asui  Helsingissä .")
    assert [(t.surface, t.index) for t in toks][-1] == (".", 3)


def test_read_tokens_plain():
    toks = read_tokens("Matti\nasui\n\nHelsingissä\n.\n")
    assert [t.surface for t in toks] == ["Matti", "asui", "Helsingissä", "."]
    assert {t.snippet_id for t in toks} == {0, 1}


def tagged(*tags):
    return [AnnotatedToken(Token("w%d" % i, i), t) for i, t in enumerate(tags)]


def test_spans_begin_end():
    b = BoundaryTag("EnamexPrsHum", Position.BEGIN)
    e = BoundaryTag("EnamexPrsHum", Position.END)
    assert spans_from_tags(tagged(b, b, e)) == [EntitySpan(0, 0, 2, "EnamexPrsHum")]


def test_spans_unit():
    u = BoundaryTag("EnamexLocPpl", Position.UNIT)
    assert spans_from_tags(tagged(u)) == [EntitySpan(0, 0, 0, "EnamexLocPpl")]


@pytest.mark.parametrize("tags", [
    [BoundaryTag("EnamexPrsHum", Position.END)],
    [BoundaryTag("EnamexPrsHum", Position.BEGIN)],
    [BoundaryTag("EnamexPrsHum", Position.BEGIN), BoundaryTag("EnamexOrgCrp", Position.END)],
])
def test_spans_malformed(tags):
    with pytest.raises(BoundaryError):
        spans_from_tags(tagged(*tags))


def test_unclosed_across_snippet_boundary():
    toks = [AnnotatedToken(Token("a", 0, 0), BoundaryTag("EnamexPrsHum", Position.BEGIN)),
            AnnotatedToken(Token("b", 0, 1), BoundaryTag("EnamexPrsHum", Position.END))]
    with pytest.raises(BoundaryError):
        spans_from_tags(toks)


def test_tags_from_spans_trivial():
    toks = [Token("a", 0), Token("b", 1)]
    assert [t.tag for t in tags_from_spans([], toks)] == [OUTSIDE, OUTSIDE]
    out = tags_from_spans([EntitySpan(0, 1, 1, "EnamexOrgEdu")], toks)
    assert out[1].tag == BoundaryTag("EnamexOrgEdu", Position.UNIT)


def test_tags_from_spans_overlap():
    toks = [Token("a", i) for i in range(3)]
    with pytest.raises(DataError):
        tags_from_spans([EntitySpan(0, 0, 1, "EnamexPrsHum"), EntitySpan(0, 1, 2, "EnamexPrsHum")], toks)


@given(snippet_spans())
def test_span_roundtrip(drawn):
    n, spans = drawn
    toks = [Token("t", i) for i in range(n)]
    assert spans_from_tags(tags_from_spans(spans, toks)) == spans


def test_split_snippets():
    toks = [Token("t", i) for i in range(10)]
    assert [len(s) for s in split_snippets(toks, 5)] == [5, 5]
    assert [len(s) for s in split_snippets(toks[:3], 5)] == [3]
    twelve = [Token("t", i) for i in range(12)]
    parts = split_snippets(twelve, 5, [EntitySpan(0, 4, 6, "EnamexPrsHum")])
    assert [len(s) for s in parts] == [7, 5]
    assert parts[1][0].snippet_id == 1 and parts[1][0].index == 0


def test_group_snippets():
    toks = parse_annotated("a\tO\n\nb\tO\nc\tO\n")
    assert [[t.surface for t in g] for g in group_snippets(toks)] == [["a"], ["b", "c"]]
