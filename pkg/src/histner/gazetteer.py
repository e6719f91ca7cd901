"""Name registries: loading, merged indexing, exact and fuzzy lookup."""
from __future__ import annotations

import json
import threading
import urllib.error
import urllib.parse
import urllib.request
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import ConfigError, DataError, RemoteLookupError
from .morpho import normalize_historical

ENTITY_CLASSES = ("place", "person-first", "person-last")
DEFAULT_CEILING = 3
REGISTRY_COLUMNS = 7


@dataclass(frozen=True)
class GazetteerEntry:
    canonical: str
    variants: frozenset = field(default_factory=frozenset)
    entity_class: str = "place"
    size: Optional[int] = None
    source_id: str = ""
    external_id: Optional[str] = None
    coordinates: Optional[tuple] = None

    def __post_init__(self):
        if not self.canonical:
            raise ValueError("empty canonical name")
        if self.entity_class not in ENTITY_CLASSES:
            raise ValueError("unknown entity class %r" % self.entity_class)
        if self.size is not None and self.size < 0:
            raise ValueError("negative size")
        object.__setattr__(self, "variants", frozenset(self.variants) | {self.canonical})

    @property
    def size_or_zero(self) -> int:
        return self.size or 0

    def sort_key(self):
        return (self.canonical, self.source_id, self.entity_class, self.size_or_zero,
                self.external_id or "", sorted(self.variants))


class ExactMatch(NamedTuple):
    entry: GazetteerEntry
    variant: str


class FuzzyMatch(NamedTuple):
    entry: GazetteerEntry
    variant: str
    distance: int


def _opt(value):
    return None if value in ("-", "") else value


def entry_from_row(fields: Sequence[str], source_id: str) -> GazetteerEntry:
    if len(fields) != REGISTRY_COLUMNS:
        raise ValueError("expected %d columns, got %d" % (REGISTRY_COLUMNS, len(fields)))
    canonical, variants, entity_class, size, external_id, lat, lon = fields
    variants = {v for v in variants.split("|") if v and v != "-"}
    size = None if _opt(size) is None else int(size)
    coords = None
    if _opt(lat) is not None or _opt(lon) is not None:
        coords = (float(lat), float(lon))
    return GazetteerEntry(canonical, frozenset(variants), entity_class, size,
                          source_id, _opt(external_id), coords)


def parse_registry(lines: Iterable[str], source_id: str) -> list:
    merged = {}
    order = []
    for rowno, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        try:
            entry = entry_from_row(line.split("\t"), source_id)
        except ValueError as exc:
            raise DataError(str(exc), rowno) from None
        key = (entry.canonical, entry.entity_class)
        if key not in merged:
            merged[key] = entry
            order.append(key)
            continue
        old = merged[key]
        sizes = [s for s in (old.size, entry.size) if s is not None]
        merged[key] = GazetteerEntry(
            old.canonical, old.variants | entry.variants, old.entity_class,
            max(sizes) if sizes else None, source_id,
            old.external_id or entry.external_id, old.coordinates or entry.coordinates,
        )
    return [merged[k] for k in order]


def load_source(path, source_id: str) -> list:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_registry(fh, source_id)
    except OSError as exc:
        raise DataError("cannot read registry %s: %s" % (path, exc.strerror or exc)) from exc


def normalize_form(form: str, wv: bool = False) -> str:
    form = form.casefold()
    if wv:
        form = normalize_historical(form)
    return form


def levenshtein(a: str, b: str, bound: Optional[int] = None) -> int:
    """Unit-cost edit distance. With ``bound``, any value above it is
    reported as ``bound + 1``."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if bound is not None and len(a) - len(b) > bound:
        return bound + 1
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        best = i
        for j, cb in enumerate(b, 1):
            cost = previous[j - 1] + (ca != cb)
            ins = current[j - 1] + 1
            dele = previous[j] + 1
            if ins < cost:
                cost = ins
            if dele < cost:
                cost = dele
            current.append(cost)
            if cost < best:
                best = cost
        if bound is not None and best > bound:
            return bound + 1
        previous = current
    result = previous[-1]
    if bound is not None and result > bound:
        return bound + 1
    return result


def _deletions(word: str, depth: int) -> set:
    out = {word}
    frontier = {word}
    for _ in range(depth):
        nxt = set()
        for w in frontier:
            for i in range(len(w)):
                nxt.add(w[:i] + w[i + 1:])
        out |= nxt
        frontier = nxt
    return out


class FormIndex:
    """Exact and bounded-edit-distance lookup over a set of string keys.

    Fuzzy search uses a symmetric-deletion table built lazily up to the
    deepest distance asked for so far (never beyond ``ceiling``).
    """

    def __init__(self, keyed: Iterable, ceiling: int = DEFAULT_CEILING):
        self.ceiling = ceiling
        table = defaultdict(list)
        for key, payload in keyed:
            table[key].append(payload)
        self._table = dict(table)
        self.forms = sorted(self._table)
        self._deletes = {}
        self._depth = -1
        self._lock = threading.Lock()

    def _ensure_depth(self, depth: int):
        if depth <= self._depth:
            return
        with self._lock:
            if depth <= self._depth:
                return
            table = defaultdict(set)
            for form in self.forms:
                for d in _deletions(form, depth):
                    table[d].add(form)
            self._deletes = dict(table)
            self._depth = depth

    def check_distance(self, max_dist: int):
        if max_dist < 0 or max_dist > self.ceiling:
            raise ConfigError("max_dist %d outside 0..%d" % (max_dist, self.ceiling))

    def exact(self, key: str) -> list:
        return list(self._table.get(key, ()))

    def fuzzy(self, key: str, max_dist: int) -> list:
        """(form, distance) for every indexed form within ``max_dist``."""
        self.check_distance(max_dist)
        if max_dist == 0:
            return [(key, 0)] if key in self._table else []
        self._ensure_depth(max_dist)
        candidates = set()
        for d in _deletions(key, max_dist):
            hit = self._deletes.get(d)
            if hit:
                candidates |= hit
        out = []
        for cand in sorted(candidates):
            dist = levenshtein(key, cand, max_dist)
            if dist <= max_dist:
                out.append((cand, dist))
        return out

    def scan(self, key: str, max_dist: int) -> list:
        """Linear-scan twin of fuzzy()."""
        self.check_distance(max_dist)
        out = []
        for cand in self.forms:
            dist = levenshtein(key, cand, max_dist)
            if dist <= max_dist:
                out.append((cand, dist))
        return out


class GazetteerIndex:
    """Every variant of every entry, searchable exactly or within an edit
    distance, after case folding (and w/v folding when ``wv``)."""

    def __init__(self, entries: Iterable[GazetteerEntry] = (), ceiling: int = DEFAULT_CEILING,
                 wv: bool = False):
        self.ceiling = ceiling
        self.wv = wv
        self.entries = tuple(sorted(set(entries), key=GazetteerEntry.sort_key))
        self.sources = sorted({e.source_id for e in self.entries})
        self._forms = FormIndex(
            ((normalize_form(v, wv), ExactMatch(e, v)) for e in self.entries for v in sorted(e.variants)),
            ceiling,
        )

    def __len__(self):
        return len(self.entries)

    def normalize(self, form: str) -> str:
        return normalize_form(form, self.wv)

    @property
    def max_words(self) -> int:
        return max((len(f.split()) for f in self._forms.forms), default=0)

    def check_distance(self, max_dist: int):
        self._forms.check_distance(max_dist)

    def lookup_exact(self, form: str) -> list:
        return self._forms.exact(self.normalize(form))

    def _expand(self, hits) -> list:
        results = [FuzzyMatch(e, v, dist) for form, dist in hits for e, v in self._forms.exact(form)]
        results.sort(key=_match_key)
        return results

    def lookup_fuzzy(self, form: str, max_dist: int) -> list:
        return self._expand(self._forms.fuzzy(self.normalize(form), max_dist))

    def scan_fuzzy(self, form: str, max_dist: int) -> list:
        """Reference linear scan with the same contract as lookup_fuzzy."""
        return self._expand(self._forms.scan(self.normalize(form), max_dist))

    def to_json(self) -> dict:
        return {
            "ceiling": self.ceiling,
            "wv": self.wv,
            "entries": [
                {
                    "canonical": e.canonical,
                    "variants": sorted(e.variants),
                    "entity_class": e.entity_class,
                    "size": e.size,
                    "source_id": e.source_id,
                    "external_id": e.external_id,
                    "coordinates": list(e.coordinates) if e.coordinates else None,
                }
                for e in self.entries
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GazetteerIndex":
        entries = [
            GazetteerEntry(
                d["canonical"], frozenset(d["variants"]), d["entity_class"], d["size"],
                d["source_id"], d["external_id"],
                tuple(d["coordinates"]) if d["coordinates"] else None,
            )
            for d in data["entries"]
        ]
        return cls(entries, ceiling=data.get("ceiling", DEFAULT_CEILING), wv=data.get("wv", False))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, ensure_ascii=False, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "GazetteerIndex":
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_json(json.load(fh))
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError("bad index snapshot: %s" % exc) from None


def _match_key(m):
    return (m[2] if len(m) > 2 else 0, m.entry.sort_key(), m.variant)


def build_index(entries: Iterable[GazetteerEntry], ceiling: int = DEFAULT_CEILING, wv: bool = False) -> GazetteerIndex:
    return GazetteerIndex(entries, ceiling=ceiling, wv=wv)


def lookup_exact(form: str, index: GazetteerIndex) -> list:
    return index.lookup_exact(form)


def lookup_fuzzy(form: str, max_dist: int, index: GazetteerIndex) -> list:
    return index.lookup_fuzzy(form, max_dist)


# -- per-source contribution counts -----------------------------------------

@dataclass(frozen=True)
class QueryRecord:
    form: str
    matches: tuple = ()


@dataclass(frozen=True)
class SourceContribution:
    source_id: str
    match_count: int
    fuzzy_match_count: int


def source_contributions(records: Iterable[QueryRecord], sources: Sequence[str] = ()) -> list:
    """Distinct query forms credited to each source.

    ``match_count`` counts forms with a distance-0 hit in the source,
    ``fuzzy_match_count`` forms with any hit. A form found in k sources
    credits all k.
    """
    exact = defaultdict(set)
    fuzzy = defaultdict(set)
    for rec in records:
        key = rec.form.casefold()
        for m in rec.matches:
            src = m.entry.source_id
            fuzzy[src].add(key)
            if getattr(m, "distance", 0) == 0:
                exact[src].add(key)
    ordered = list(sources) + sorted(set(fuzzy) - set(sources))
    return [SourceContribution(s, len(exact[s]), len(fuzzy[s])) for s in ordered]


def write_query_log(records: Iterable[QueryRecord], fh) -> None:
    for rec in records:
        if not rec.matches:
            fh.write("%s\t-\t-\t-\t-\n" % rec.form)
        for m in rec.matches:
            fh.write("%s\t%s\t%s\t%s\t%d\n" % (rec.form, m.entry.source_id, m.entry.canonical,
                                               m.variant, getattr(m, "distance", 0)))


def read_query_log(lines: Iterable[str]) -> list:
    """Inverse of write_query_log, enough for source_contributions."""
    by_form = {}
    for rowno, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise DataError("expected 5 columns in query log", rowno)
        form, source, canonical, variant, distance = fields
        matches = by_form.setdefault(form, [])
        if source == "-":
            continue
        try:
            entry = GazetteerEntry(canonical, frozenset([variant]), source_id=source)
            matches.append(FuzzyMatch(entry, variant, int(distance)))
        except ValueError as exc:
            raise DataError(str(exc), rowno) from None
    return [QueryRecord(f, tuple(m)) for f, m in by_form.items()]


# -- remote registries --------------------------------------------------------

class HttpRegistryClient:
    """Client for a registry served over HTTP.

    ``GET <base_url>?form=<form>&max_dist=<n>`` must answer with registry
    rows (same TSV columns as registry files). Transport and parse failures
    raise RemoteLookupError; one request runs at a time per client.
    """

    def __init__(self, base_url: str, source_id: str, timeout: float = 10.0):
        self.base_url = base_url
        self.source_id = source_id
        self.timeout = timeout
        self._lock = threading.Lock()

    def query(self, form: str, max_dist: int) -> list:
        url = "%s?%s" % (self.base_url, urllib.parse.urlencode({"form": form, "max_dist": max_dist}))
        with self._lock:
            try:
                with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                    body = resp.read().decode("utf-8")
            except (urllib.error.URLError, OSError, UnicodeDecodeError) as exc:
                raise RemoteLookupError("registry %s unreachable: %s" % (self.source_id, exc)) from exc
        rows = []
        for line in body.splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != REGISTRY_COLUMNS:
                raise RemoteLookupError("registry %s sent a malformed row: %r" % (self.source_id, line))
            rows.append(fields)
        return rows


def remote_lookup(client, form: str, max_dist: int, wv: bool = False) -> list:
    """Query a remote registry and score its rows locally."""
    query = normalize_form(form, wv)
    results = []
    for fields in client.query(form, max_dist):
        try:
            entry = entry_from_row(fields, client.source_id)
        except ValueError as exc:
            raise RemoteLookupError("registry %s sent a bad row: %s" % (client.source_id, exc)) from exc
        for variant in sorted(entry.variants):
            dist = levenshtein(query, normalize_form(variant, wv), max_dist)
            if dist <= max_dist:
                results.append(FuzzyMatch(entry, variant, dist))
    results.sort(key=_match_key)
    return results
