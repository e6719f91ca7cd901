"""Paths and loaders for the data files shipped with the package."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

REGISTRY_SOURCES = ("pnr", "sapo", "geonames", "oldmaps")


def data_path(name: str) -> Path:
    return Path(str(resources.files("histner").joinpath("data", name)))


def lexicon():
    from .morpho import MorphLexicon
    return MorphLexicon.from_file(data_path("lexicon.tsv"))


def ruleset():
    from .rules import load_ruleset
    return load_ruleset(data_path("starter.rules"))


def registry_entries(sources=REGISTRY_SOURCES) -> list:
    from .gazetteer import load_source
    entries = []
    for source in sources:
        entries.extend(load_source(data_path("registries/%s.tsv" % source), source))
    return entries


def index(wv: bool = False):
    from .gazetteer import GazetteerIndex
    return GazetteerIndex(registry_entries(), wv=wv)


def authority():
    from .linker import NameAuthority
    return NameAuthority.from_file(data_path("authority.tsv"))


def corpus(name: str = "sample.tsv"):
    from .corpus import read_annotated
    return read_annotated(data_path(name))
