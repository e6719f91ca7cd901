"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 data error
(unreadable or malformed input).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, bundled
from .corpus import (DEFAULT_TAGSET, AnnotatedToken, TagSet, parse_annotated, read_tokens,
                     serialize_annotated)
from .diagnostics import (TemplatePosition, compare_tag_counts, load_carriers, sentence, tag_distribution,
                          unrecognition_by_correctness, unrecognition_json, unrecognition_text, wrap_template)
from .errors import ConfigError, DataError, HistnerError, RemoteLookupError, UndefinedRateError
from .evaluation import IDENTITY, MODES, merge_locations, score_loose, score_spans, score_strict
from .gazetteer import (DEFAULT_CEILING, GazetteerIndex, QueryRecord, load_source, read_query_log,
                        source_contributions, write_query_log)
from .linker import FUZZY_STAGES, Linker, LinkerConfig, NameAuthority, link_statistics
from .morpho import MorphLexicon
from .noise import CHAR_OPS, NoiseConfig, apply_noise
from .rules import Tagger, TriggerLexicons, load_ruleset


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


# -- shared helpers -----------------------------------------------------------

def _tagset(args) -> TagSet:
    return TagSet.from_file(args.tagset) if args.tagset else DEFAULT_TAGSET


def _read_text(path) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def _write_text(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_json(args, text: str):
    if args.report_json:
        _write_text(args.report_json, text)


def _lexicon(args) -> MorphLexicon:
    return MorphLexicon.from_file(args.lexicon) if args.lexicon else bundled.lexicon()


def _source_spec(spec: str):
    # "id=path" or a bare path whose stem becomes the source id
    if "=" in spec:
        source, path = spec.split("=", 1)
        return source, path
    return Path(spec).stem, spec


def _index(args, default_bundled: bool):
    ceiling = getattr(args, "ceiling", DEFAULT_CEILING)
    if getattr(args, "index", None):
        idx = GazetteerIndex.load(args.index)
        if idx.wv != args.wv:
            idx = GazetteerIndex(idx.entries, ceiling=idx.ceiling, wv=args.wv)
        return idx
    specs = args.gazetteer or []
    if not specs:
        if not default_bundled:
            return None
        return GazetteerIndex(bundled.registry_entries(), ceiling=ceiling, wv=args.wv)
    entries = []
    for spec in specs:
        source, path = _source_spec(spec)
        entries.extend(load_source(path, source))
    return GazetteerIndex(entries, ceiling=ceiling, wv=args.wv)


def _tagger(args) -> Tagger:
    tagset = _tagset(args)
    ruleset = load_ruleset(args.rules, tagset) if args.rules else bundled.ruleset()
    triggers = TriggerLexicons.from_file(args.triggers) if args.triggers else TriggerLexicons()
    return Tagger(ruleset, _lexicon(args), _index(args, default_bundled=False), triggers, wv=args.wv)


def _read_corpus(path, args):
    return parse_annotated(_read_text(path), _tagset(args))


# -- commands -----------------------------------------------------------------

def cmd_tag(args) -> int:
    tagger = _tagger(args)
    tokens = read_tokens(_read_text(args.input))
    _write_text(args.output, serialize_annotated(tagger(tokens)))
    return 0


def cmd_link(args) -> int:
    config = LinkerConfig(
        fuzzy_max_dist=args.fuzzy, person_filter_enabled=not args.no_person_filter,
        size_threshold=args.size_threshold, wv_normalize=args.wv, fuzzy_stage=args.fuzzy_stage,
    )
    if args.persons and not args.authority:
        raise UsageError("--persons needs --authority")
    authority = NameAuthority.from_file(args.authority) if args.authority else None
    index = _index(args, default_bundled=True)
    linker = Linker(_lexicon(args), index, config, authority, link_people=args.persons)
    tokens = read_tokens(_read_text(args.input))
    candidates = linker.candidates(tokens)
    _write_text(args.output, serialize_annotated(linker.tag(tokens)))
    stats = link_statistics(candidates, tokens, index.sources)
    places = [c for c in candidates if c.kind == "place"]
    summary = {
        "candidates": len(places),
        "filtered": sum(c.filtered for c in places),
        "persons": sum(c.kind == "person" for c in candidates),
    }
    text = _contribution_text(stats) + "".join("#%s\t%d\n" % kv for kv in summary.items())
    if args.stats:
        _write_text(args.stats, text)
    elif args.output not in (None, "-"):
        sys.stdout.write(text)
    if args.query_log:
        where = {(t.snippet_id, t.index): t.surface for t in tokens}
        records = [QueryRecord(" ".join(where[(c.span.snippet_id, i)] for i in range(c.span.start, c.span.end + 1)),
                               c.matches) for c in places if not c.filtered]
        with open(args.query_log, "w", encoding="utf-8", newline="") as fh:
            write_query_log(records, fh)
    _write_json(args, _contribution_json(stats, **summary))
    return 0


def _contribution_text(stats) -> str:
    lines = ["source\tmatches\tfuzzy_matches"]
    lines += ["%s\t%d\t%d" % (s.source_id, s.match_count, s.fuzzy_match_count) for s in stats]
    return "\n".join(lines) + "\n"


def _contribution_json(stats, **extra) -> str:
    doc = {"version": __version__, "sources": [
        {"source_id": s.source_id, "matches": s.match_count, "fuzzy_matches": s.fuzzy_match_count}
        for s in stats]}
    doc.update(extra)
    return json.dumps(doc, ensure_ascii=False, indent=1, sort_keys=True) + "\n"


def cmd_eval(args) -> int:
    gold = _read_corpus(args.gold, args)
    pred = _read_corpus(args.pred, args)
    if args.mode == "strict":
        report = score_strict(gold, pred)
    elif args.mode == "loose":
        report = score_loose(gold, pred, merge_locations() if args.merge_locations else IDENTITY)
    else:
        report = score_spans(gold, pred)
    sys.stdout.write(report.to_text())
    _write_json(args, report.to_json(merge_locations=bool(args.merge_locations)))
    return 0


def cmd_gazetteer_build(args) -> int:
    if not args.gazetteer:
        raise UsageError("gazetteer build needs at least one --gazetteer")
    index = _index(args, default_bundled=False)
    if args.output in (None, "-"):
        sys.stdout.write(json.dumps(index.to_json(), ensure_ascii=False, indent=1, sort_keys=True) + "\n")
    else:
        index.save(args.output)
    sys.stderr.write("%d entries from %d sources\n" % (len(index), len(index.sources)))
    return 0


def cmd_gazetteer_query(args) -> int:
    index = _index(args, default_bundled=True)
    if args.dist < 0:
        raise ConfigError("--dist must be nonnegative")
    index.check_distance(args.dist)
    records = []
    for form in args.forms:
        matches = index.lookup_fuzzy(form, args.dist) if args.dist else \
            [m + (0,) for m in index.lookup_exact(form)]
        records.append(QueryRecord(form, tuple(matches)))
        for m in matches:
            sys.stdout.write("%s\t%s\t%s\t%s\t%d\n" % (form, m[0].source_id, m[0].canonical, m[1], m[2]))
    if args.query_log:
        with open(args.query_log, "w", encoding="utf-8", newline="") as fh:
            write_query_log(records, fh)
    return 0


def cmd_gazetteer_stats(args) -> int:
    records = read_query_log(_read_text(args.log).splitlines())
    stats = source_contributions(records, args.sources or ())
    sys.stdout.write(_contribution_text(stats))
    _write_json(args, _contribution_json(stats))
    return 0


def _noise_config(args) -> NoiseConfig:
    values = {}
    if args.config:
        base = NoiseConfig.from_file(args.config)
        values = {k: getattr(base, k) for k in ("target_word_accuracy", "char_ops", "word_swap_rate",
                                               "hyphen_split_rate", "seed")}
    for flag, key in (("target_accuracy", "target_word_accuracy"), ("char_ops", "char_ops"),
                      ("swap_rate", "word_swap_rate"), ("hyphen_rate", "hyphen_split_rate"), ("seed", "seed")):
        value = getattr(args, flag)
        if value is not None:
            values[key] = value
    return NoiseConfig.from_mapping(values)


def cmd_noise(args) -> int:
    config = _noise_config(args)
    text = _read_text(args.input)
    first = next((line for line in text.split("\n") if line), "")
    annotated = "\t" in first
    tokens = parse_annotated(text, _tagset(args)) if annotated else read_tokens(text)
    lexicon = _lexicon(args) if config.target_word_accuracy < 1.0 else None
    noisy = apply_noise(tokens, config, lexicon)
    if annotated:
        out = serialize_annotated(noisy, trailing_blank=getattr(tokens, "trailing_blank", False))
    else:
        out = serialize_annotated([AnnotatedToken(t) for t in noisy])
        out = "\n".join(line.split("\t", 1)[0] for line in out.split("\n"))
    _write_text(args.output, out)
    return 0


def _names(path) -> list:
    names = [line.strip() for line in _read_text(path).split("\n")]
    return [n for n in names if n]


def cmd_diag_namelist(args) -> int:
    carriers = load_carriers(args.carriers) if args.carriers else None
    names = _names(args.names)
    if args.distribution:
        dist = tag_distribution(names, args.position, _tagger(args), carriers)
        sys.stdout.write(dist.to_text())
        _write_json(args, dist.to_json(position=args.position))
    else:
        for name in names:
            sys.stdout.write(sentence(wrap_template(name, args.position, carriers)) + "\n")
    return 0


def cmd_diag_compare(args) -> int:
    a = read_tokens(_read_text(args.text_a))
    b = read_tokens(_read_text(args.text_b))
    result = compare_tag_counts(a, b, _tagger(args), list(_tagset(args)))
    sys.stdout.write(result.to_text())
    _write_json(args, result.to_json())
    return 0


def cmd_diag_unrec(args) -> int:
    gold = _read_corpus(args.gold, args)
    pred = _read_corpus(args.pred, args)
    rows = unrecognition_by_correctness(gold, pred, _lexicon(args), wv=args.wv)
    sys.stdout.write(unrecognition_text(rows))
    _write_json(args, unrecognition_json(rows))
    return 0


# -- parser -------------------------------------------------------------------

def _shared() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None, help="random seed (unsigned 64-bit)")
    p.add_argument("--wv", action="store_true", help="fold w to v before analysis and lookup")
    p.add_argument("--tagset", help="file with one entity label per line")
    p.add_argument("--report-json", metavar="PATH", help="also write a machine-readable report")
    return p


def _tagging_flags(p):
    p.add_argument("--rules", help="rule file (default: bundled starter rules)")
    p.add_argument("--lexicon", help="lexicon TSV (default: bundled lexicon)")
    p.add_argument("--gazetteer", action="append", metavar="[ID=]PATH",
                   help="registry TSV; repeatable")
    p.add_argument("--triggers", help="trigger lexicon TSV (corp|party<TAB>word)")


def build_parser() -> argparse.ArgumentParser:
    shared = _shared()
    parser = _Parser(prog="histner", description="Tag, link and evaluate named entities in noisy OCR text.")
    parser.add_argument("--version", action="version", version="histner %s" % __version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("tag", parents=[shared], help="tag a token-per-line file with the rule engine")
    _tagging_flags(p)
    p.add_argument("--input", "-i", help="tokens or annotated corpus (default: stdin)")
    p.add_argument("--output", "-o", help="annotated output (default: stdout)")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("link", parents=[shared], help="link place (and person) names against registries")
    p.add_argument("--lexicon", help="lexicon TSV (default: bundled lexicon)")
    p.add_argument("--gazetteer", action="append", metavar="[ID=]PATH",
                   help="registry TSV; repeatable (default: bundled registries)")
    p.add_argument("--index", help="index snapshot written by 'gazetteer build'")
    p.add_argument("--authority", help="name authority TSV (name<TAB>first|last)")
    p.add_argument("--persons", action="store_true", help="also link person names (needs --authority)")
    p.add_argument("--fuzzy", type=int, default=0, help="Levenshtein fallback distance (0 disables)")
    p.add_argument("--fuzzy-stage", choices=FUZZY_STAGES, default="query",
                   help="match fuzzily after lemmatization (query) or against lexicon forms (lexical)")
    p.add_argument("--size-threshold", type=float, default=50_000,
                   help="places at least this big survive the person filter")
    p.add_argument("--no-person-filter", action="store_true", help="disable the person/place filter")
    p.add_argument("--stats", metavar="PATH", help="write per-source statistics here")
    p.add_argument("--query-log", metavar="PATH", help="write the lookup log for 'gazetteer stats'")
    p.add_argument("--input", "-i", help="tokens or annotated corpus (default: stdin)")
    p.add_argument("--output", "-o", help="annotated output (default: stdout)")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("eval", parents=[shared], help="score predictions against gold annotations")
    p.add_argument("gold")
    p.add_argument("pred")
    p.add_argument("--mode", choices=MODES, default="strict",
                   help="strict: per boundary tag; loose: any overlap; spans: whole-span exact match")
    p.add_argument("--merge-locations", action="store_true",
                   help="fold LocGpl and LocPpl into LocXxx (loose mode)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gazetteer", help="build, query and summarize registries")
    gsub = p.add_subparsers(dest="gcommand", metavar="SUBCOMMAND", parser_class=_Parser)
    gsub.required = True
    g = gsub.add_parser("build", parents=[shared], help="merge registry files into an index snapshot")
    g.add_argument("--gazetteer", action="append", metavar="[ID=]PATH", help="registry TSV; repeatable")
    g.add_argument("--ceiling", type=int, default=DEFAULT_CEILING, help="largest fuzzy distance allowed")
    g.add_argument("--output", "-o", help="snapshot path (default: stdout)")
    g.set_defaults(func=cmd_gazetteer_build)
    g = gsub.add_parser("query", parents=[shared], help="look names up exactly or fuzzily")
    g.add_argument("forms", nargs="+")
    g.add_argument("--gazetteer", action="append", metavar="[ID=]PATH",
                   help="registry TSV; repeatable (default: bundled registries)")
    g.add_argument("--index", help="index snapshot")
    g.add_argument("--dist", type=int, default=0, help="maximum Levenshtein distance")
    g.add_argument("--query-log", metavar="PATH", help="append results to a lookup log")
    g.set_defaults(func=cmd_gazetteer_query)
    g = gsub.add_parser("stats", parents=[shared], help="per-source match counts from a lookup log")
    g.add_argument("log")
    g.add_argument("--sources", nargs="*", help="list these sources even when they have no matches")
    g.set_defaults(func=cmd_gazetteer_stats)

    p = sub.add_parser("noise", parents=[shared], help="inject seeded OCR-style noise")
    p.add_argument("--config", help="key = value file with noise settings")
    p.add_argument("--target-accuracy", type=float, help="word accuracy to corrupt down to")
    p.add_argument("--char-ops", help="comma list from: %s" % ", ".join(CHAR_OPS))
    p.add_argument("--swap-rate", type=float, help="adjacent word swap rate")
    p.add_argument("--hyphen-rate", type=float, help="hyphenation split rate")
    p.add_argument("--lexicon", help="lexicon TSV (default: bundled lexicon)")
    p.add_argument("--input", "-i", help="tokens or annotated corpus (default: stdin)")
    p.add_argument("--output", "-o", help="output path (default: stdout)")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("diag", help="diagnostic protocols")
    dsub = p.add_subparsers(dest="dcommand", metavar="SUBCOMMAND", parser_class=_Parser)
    dsub.required = True
    d = dsub.add_parser("namelist", parents=[shared], help="wrap names in carrier sentences")
    d.add_argument("names", help="one name per line")
    d.add_argument("--position", choices=[p.value for p in TemplatePosition], default="none")
    d.add_argument("--carriers", help="TSV of position<TAB>template with X as the slot")
    d.add_argument("--distribution", action="store_true", help="tag the sentences and count labels")
    _tagging_flags(d)
    d.set_defaults(func=cmd_diag_namelist)
    d = dsub.add_parser("compare", parents=[shared], help="tag counts of two versions of a text")
    d.add_argument("text_a")
    d.add_argument("text_b")
    _tagging_flags(d)
    d.set_defaults(func=cmd_diag_compare)
    d = dsub.add_parser("unrec", parents=[shared], help="unrecognized words among right and wrong tags")
    d.add_argument("gold")
    d.add_argument("pred")
    d.add_argument("--lexicon", help="lexicon TSV (default: bundled lexicon)")
    d.set_defaults(func=cmd_diag_unrec)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1, --help and --version exit 0
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        sys.stderr.write("histner: error: %s\n" % exc)
        return 1
    except (DataError, UndefinedRateError, RemoteLookupError, OSError, UnicodeDecodeError) as exc:
        sys.stderr.write("histner: error: %s\n" % exc)
        return 2
    except HistnerError as exc:
        sys.stderr.write("histner: error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
