"""Acceptance criteria. Each test records one PASS/FAIL line through the
``verdict`` fixture; the lines are repeated in the pytest terminal summary."""
import csv
import json
import random
import subprocess
import sys
import time
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path

import pytest

from histner import bundled
from histner.cli import main
from histner.corpus import read_annotated, tokens_from_text
from histner.evaluation import (
    IDENTITY, f_score, merge_locations, score_loose, score_spans, score_strict, strict_counts,
)
from histner.gazetteer import GazetteerEntry, GazetteerIndex
from histner.linker import LinkerConfig, link_places
from histner.noise import NoiseConfig, apply_noise
from histner.rules import Tagger, compile_ruleset, match_leftmost_longest
from generators import analyzed, oracle_token, random_rules, random_tokens, scoring_instance
from oracles import NumpyScan, brute_loose, brute_strict, oracle_leftmost_longest

DATA = Path(__file__).parent / "data"
MERGE = {"EnamexLocGpl": "EnamexLocXxx", "EnamexLocPpl": "EnamexLocXxx", "EnamexLocXxx": "EnamexLocXxx"}


def half_up(x) -> int:
    return int(Decimal(repr(float(x))).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def published_rows():
    with open(DATA / "published_scores.tsv", encoding="utf-8") as fh:
        lines = [l for l in fh if not l.startswith("#")]
    rows = []
    for r in csv.DictReader(lines, delimiter="\t"):
        rows.append({
            "group": r["group"], "label": r["label"],
            "p": float(r["precision"]), "r": float(r["recall"]), "f": float(r["f_score"]),
            "found": int(r["found"]) if r["found"] else None,
            "gold": int(r["gold"]) if r["gold"] else None,
        })
    return rows


@pytest.fixture(scope="module")
def tagger(ruleset, lexicon):
    return Tagger(ruleset, lexicon)


def test_c01_f_score_arithmetic(verdict):
    rows = published_rows()
    start = time.perf_counter()
    bad = [(r["group"], r["label"], r["f"], round(f_score(r["p"], r["r"]), 3))
           for r in rows if abs(f_score(r["p"], r["r"]) - r["f"]) > 0.015]
    elapsed = time.perf_counter() - start
    ok = len(rows) >= 20 and not bad and elapsed < 1.0
    detail = "%d/%d triples within 0.015 in %.4f s" % (len(rows) - len(bad), len(rows), elapsed)
    if bad:
        detail += "; off: " + ", ".join("%s %s printed %.2f computed %.3f" % b for b in bad)
    verdict(1, ok, detail)
    assert ok, detail


def test_c02_count_consistency(verdict, sample, tagger, lexicon):
    rows = [r for r in published_rows() if r["found"] is not None and r["gold"] is not None]
    bad = []
    for r in rows:
        a, b = half_up(r["p"] * r["found"] / 100), half_up(r["r"] * r["gold"] / 100)
        if abs(a - b) > 1:
            bad.append("%s %d vs %d" % (r["label"], a, b))

    noisy = apply_noise(sample, NoiseConfig(0.8, seed=1), lexicon)
    pred = tagger(noisy)
    reports = [score_strict(noisy, pred), score_spans(noisy, pred),
               score_loose(noisy, pred, merge_locations())]
    own_bad, checked = [], 0
    for report in reports:
        doc = json.loads(report.to_json())
        for row in doc["classes"] + [doc["micro"]]:
            checked += 1
            if half_up(row["precision"] * row["found"] / 100) != row["correct"] or \
                    half_up(row["recall"] * row["gold"] / 100) != row["recalled"]:
                own_bad.append("%s %s" % (doc["mode"], row["label"]))
    ok = len(rows) > 0 and not bad and not own_bad
    detail = "published %d/%d rows within 1, own reports %d/%d exact" % (
        len(rows) - len(bad), len(rows), checked - len(own_bad), checked)
    if bad:
        detail += "; off: " + ", ".join(bad)
    if own_bad:
        detail += "; own reports off: " + ", ".join(own_bad)
    verdict(2, ok, detail)
    assert ok, detail


def test_c03_scorer_oracle(verdict):
    rng = random.Random(2024)
    mismatches = 0
    start = time.perf_counter()
    for _ in range(1000):
        gold, pred, _ = scoring_instance(rng)
        got = {l: (c.found, c.gold, c.correct) for l, c in strict_counts(gold, pred).items()}
        mismatches += got != brute_strict(gold, pred)
        for mapping, table in ((IDENTITY, {}), (merge_locations(), MERGE)):
            got = {c.label: (c.counts.found, c.counts.gold, c.counts.correct, c.counts.recalled)
                   for c in score_loose(gold, pred, mapping).classes}
            mismatches += got != brute_loose(gold, pred, table)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 30
    detail = "1000 instances x 3 scorings, %d mismatches, %.2f s" % (mismatches, elapsed)
    verdict(3, ok, detail)
    assert ok, detail


def test_c04_matcher_oracle(verdict):
    rng = random.Random(4048)
    mismatches = nonempty = 0
    start = time.perf_counter()
    for _ in range(1000):
        rules, text = random_rules(rng, rng.randint(1, 5))
        toks = random_tokens(rng, rng.randint(1, 15))
        blocked = {i for i in range(len(toks)) if rng.random() < 0.15}
        got = [(m.start, m.end, m.label, m.rule_id) for m in match_leftmost_longest(
            [analyzed(t) for t in toks], compile_ruleset(text).rules, blocked=blocked)]
        want = oracle_leftmost_longest(rules, [oracle_token(t) for t in toks], blocked)
        mismatches += got != want
        nonempty += bool(want)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 60
    detail = "1000 instances (%d with matches), %d mismatches, %.2f s" % (nonempty, mismatches, elapsed)
    verdict(4, ok, detail)
    assert ok, detail


SYLLABLES = ("ka", "ri", "mä", "ne", "vi", "ta", "lo", "sa", "ku", "pe", "ho", "jo", "lah", "ti",
             "vaa", "ra", "nen", "ki", "su", "me", "la", "koi", "tu", "va", "hel", "sin", "öl", "y")
LETTERS = "abdefghijklmnoprstuvyäö"


def registry_fixture(rng, n=10_000):
    names = set()
    while len(names) < n:
        names.add("".join(rng.choice(SYLLABLES) for _ in range(rng.randint(2, 4))).capitalize())
    return sorted(names)


def edit(rng, word, k):
    w = list(word)
    for _ in range(k):
        op = rng.choice("sid") if len(w) > 1 else "i"
        i = rng.randrange(len(w) + (op == "i"))
        if op == "s":
            w[i] = rng.choice(LETTERS)
        elif op == "i":
            w.insert(i, rng.choice(LETTERS))
        else:
            del w[i]
    return "".join(w)


def test_c05_fuzzy_lookup(verdict):
    rng = random.Random(5)
    names = registry_fixture(rng)
    index = GazetteerIndex([GazetteerEntry(n, source_id="fixture") for n in names])
    queries = [edit(rng, rng.choice(names), rng.randint(0, 3)) for _ in range(700)]
    queries += ["".join(rng.choice(LETTERS) for _ in range(rng.randint(3, 10))) for _ in range(300)]
    rng.shuffle(queries)

    # the reference pays for every form on every query, whatever the distance
    scan = NumpyScan([n.casefold() for n in names])
    start = time.perf_counter()
    distances = [scan.distances(q.casefold()) for q in queries]
    scan_time = time.perf_counter() - start

    start = time.perf_counter()
    index._forms._ensure_depth(2)
    build_time = time.perf_counter() - start

    mismatches, lookup_time, hits = 0, {}, {}
    for d in (0, 1, 2):
        results = []
        start = time.perf_counter()
        for q in queries:
            results.append(index.lookup_fuzzy(q, d))
        lookup_time[d] = time.perf_counter() - start
        hits[d] = sum(map(len, results))
        for q, got, dist in zip(queries, results, distances):
            want = {(scan.forms[i], int(dist[i])) for i in (dist <= d).nonzero()[0]}
            mismatches += {(m.variant.casefold(), m.distance) for m in got} != want
    ratios = {d: scan_time / max(t, 1e-9) for d, t in lookup_time.items()}
    aggregate = 3 * scan_time / sum(lookup_time.values())
    with_build = 3 * scan_time / (sum(lookup_time.values()) + build_time)
    ok = mismatches == 0 and aggregate >= 10 and all(r >= 10 for r in ratios.values())
    detail = ("10000 entries, 1000 queries, %d mismatches; hits %s; scan %.2f s per pass; "
              "speedup %s, aggregate %.0fx (%.0fx counting the %.2f s table build)") % (
        mismatches, "/".join(str(hits[d]) for d in (0, 1, 2)), scan_time,
        "/".join("%.0fx" % ratios[d] for d in (0, 1, 2)), aggregate, with_build, build_time)
    verdict(5, ok, detail)
    assert ok, detail


def test_c06_two_pass(verdict, tagger, lexicon):
    gold = bundled.corpus("twopass.tsv")
    ambiguous = {s for s in lexicon.surfaces()
                 if {"place", "person"} <= {a.name_class for a in lexicon.analyze(s)}}
    pred = tagger(gold)
    cases = [(g, p) for g, p in zip(gold, pred) if g.surface in ambiguous]
    kinds = {g.tag.label for g, _ in cases}
    wrong = ["%s in snippet %d: %s" % (g.surface, g.snippet_id, p.tag.label) for g, p in cases
             if p.tag.label != g.tag.label]
    ok = len(cases) >= 20 and kinds == {"EnamexPrsHum", "EnamexLocPpl"} and not wrong
    detail = "%d/%d ambiguous tokens tagged as annotated (%s)" % (
        len(cases) - len(wrong), len(cases), ", ".join(sorted(kinds)))
    if wrong:
        detail += "; wrong: " + "; ".join(wrong)
    verdict(6, ok, detail)
    assert ok, detail


def test_c07_size_filter(verdict, lexicon, index, authority):
    threshold = 50_000
    sized = {}
    for e in bundled.registry_entries():
        if e.entity_class == "place" and e.size and " " not in e.canonical:
            sized[e.canonical] = max(sized.get(e.canonical, 0), e.size)
    cities = sorted(n for n, s in sized.items() if s >= threshold)
    villages = sorted(n for n, s in sized.items() if s < threshold)
    between = max(sized[v] for v in villages) < threshold <= min(sized[c] for c in cities)
    with open(bundled.data_path("authority.tsv"), encoding="utf-8") as fh:
        firsts = [l.split("\t")[0] for l in fh if l.rstrip("\n").endswith("\tfirst")]
    config = LinkerConfig(size_threshold=threshold)
    bad = []
    for first in firsts:
        for place in cities + villages:
            cands = [c for c in link_places(tokens_from_text("%s %s" % (first, place)), lexicon, index,
                                            config, authority) if c.span.start == 1]
            want_filtered = place in villages
            if len(cands) != 1 or cands[0].filtered != want_filtered:
                bad.append("%s %s" % (first, place))
    pairs = len(firsts) * (len(cities) + len(villages))
    ok = between and firsts and cities and villages and not bad
    detail = "%d/%d pairs (%d first names x %d cities, %d villages)" % (
        pairs - len(bad), pairs, len(firsts), len(cities), len(villages))
    if bad:
        detail += "; wrong: " + ", ".join(bad[:10])
    verdict(7, ok, detail)
    assert ok, detail


def test_c08_degradation(verdict, sample, tagger, lexicon):
    def scores():
        out = []
        for level in (1.0, 0.9, 0.8, 0.7):
            noisy = apply_noise(sample, NoiseConfig(level, seed=7), lexicon)
            # noisy tokens keep their gold tags, so they serve as the reference
            out.append(score_loose(noisy, tagger(noisy), merge_locations()).micro.f_score)
        return out

    first, second = scores(), scores()
    ok = first == second and all(a >= b for a, b in zip(first, first[1:]))
    detail = "loose merged F at 1.0/0.9/0.8/0.7: %s; repeat identical: %s" % (
        "/".join("%.2f" % f for f in first), first == second)
    verdict(8, ok, detail)
    assert ok, detail


def test_c09_wv_recall(verdict, tmp_path, capsys):
    src = bundled.data_path("wspelled.tsv")
    gold = read_annotated(src)
    recall = {}
    for flag in ("", "--wv"):
        out = tmp_path / ("pred%s.tsv" % flag)
        assert main(["tag", "-i", str(src), "-o", str(out)] + ([flag] if flag else [])) == 0
        report = score_loose(gold, read_annotated(out), merge_locations())
        recall[flag] = report["EnamexLocXxx"].recall
    capsys.readouterr()
    ok = recall["--wv"] > recall[""]
    detail = "location recall %.2f without, %.2f with --wv" % (recall[""], recall["--wv"])
    verdict(9, ok, detail)
    assert ok, detail


def test_c10_end_to_end(verdict, tmp_path):
    sample = str(bundled.data_path("sample.tsv"))
    runs, elapsed, codes = [], [], []
    for n in range(2):
        pred = tmp_path / ("pred%d.tsv" % n)
        report = tmp_path / ("eval%d.json" % n)
        start = time.perf_counter()
        tag = subprocess.run([sys.executable, "-m", "histner", "tag", "--seed", "3", "-i", sample,
                              "-o", str(pred)], capture_output=True)
        ev = subprocess.run([sys.executable, "-m", "histner", "eval", "--seed", "3", sample, str(pred),
                             "--report-json", str(report)], capture_output=True)
        elapsed.append(time.perf_counter() - start)
        codes += [tag.returncode, ev.returncode]
        runs.append((pred.read_bytes(), report.read_bytes(), tag.stdout, ev.stdout))
    stable = runs[0] == runs[1]
    ok = codes == [0, 0, 0, 0] and max(elapsed) < 5 and stable
    detail = "exit codes %s, %.2f s / %.2f s, outputs byte-identical: %s" % (
        codes, elapsed[0], elapsed[1], stable)
    verdict(10, ok, detail)
    assert ok, detail
