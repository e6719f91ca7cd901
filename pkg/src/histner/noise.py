"""Seeded OCR-style noise: character edits down to a target word accuracy,
adjacent word swaps and hyphenation splits.

All functions accept Token or AnnotatedToken sequences and return the same
kind. Tags stay attached to token positions.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, fields, replace
from typing import Iterable, Optional, Sequence

from .corpus import AnnotatedToken, BoundaryTag, Position, group_snippets
from .errors import ConfigError, DataError
from .morpho import MorphLexicon

CHAR_OPS = ("substitute", "delete", "insert")
ALPHABET = "abcdefghijklmnopqrstuvwxyzäö"
_MAX_TRIES = 64


@dataclass(frozen=True)
class NoiseConfig:
    target_word_accuracy: float = 1.0
    char_ops: tuple = CHAR_OPS
    word_swap_rate: float = 0.0
    hyphen_split_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("target_word_accuracy", "word_swap_rate", "hyphen_split_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError("%s must be in [0, 1], got %r" % (name, value))
        ops = tuple(self.char_ops)
        if not ops or any(op not in CHAR_OPS for op in ops):
            raise ConfigError("char_ops must be a non-empty subset of %s" % ", ".join(CHAR_OPS))
        object.__setattr__(self, "char_ops", ops)
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    @classmethod
    def from_mapping(cls, values: dict) -> "NoiseConfig":
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise ConfigError("unknown noise key %r" % key)
            try:
                if key == "char_ops":
                    kwargs[key] = tuple(s.strip() for s in str(raw).split(",") if s.strip()) \
                        if isinstance(raw, str) else tuple(raw)
                elif key == "seed":
                    kwargs[key] = int(raw)
                else:
                    kwargs[key] = float(raw)
            except ValueError:
                raise ConfigError("bad value for %s: %r" % (key, raw)) from None
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "NoiseConfig":
        """``key = value`` lines; ``#`` starts a comment."""
        values = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise DataError("expected key = value", lineno)
                key, value = (s.strip() for s in line.split("=", 1))
                values[key] = value
        return cls.from_mapping(values)


def derive_seed(seed: int, *parts) -> int:
    """Mix a base seed with shard or token identifiers into a new 64-bit seed."""
    text = ":".join(str(p) for p in (seed,) + parts)
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def _with_surface(item, surface: str, index: Optional[int] = None, tag: Optional[BoundaryTag] = None):
    if isinstance(item, AnnotatedToken):
        tok = replace(item.token, surface=surface, index=item.index if index is None else index)
        return AnnotatedToken(tok, item.tag if tag is None else tag)
    return replace(item, surface=surface, index=item.index if index is None else index)


def edit_once(surface: str, rng: random.Random, ops: Sequence[str]) -> str:
    """One uniform character edit; never empties the token or adds spaces."""
    usable = [op for op in ops if op != "delete" or len(surface) > 1]
    op = rng.choice(usable)
    if op == "substitute":
        i = rng.randrange(len(surface))
        choices = [c for c in ALPHABET if c != surface[i].lower()]
        return surface[:i] + rng.choice(choices) + surface[i + 1:]
    if op == "delete":
        i = rng.randrange(len(surface))
        return surface[:i] + surface[i + 1:]
    i = rng.randrange(len(surface) + 1)
    return surface[:i] + rng.choice(ALPHABET) + surface[i:]


def corrupt_token(surface: str, lexicon: MorphLexicon, seed: int, ops: Sequence[str] = CHAR_OPS) -> str:
    """Edit ``surface`` until the lexicon no longer knows it."""
    rng = random.Random(seed)
    for _ in range(_MAX_TRIES):
        candidate = edit_once(surface, rng, ops)
        if candidate != surface and not lexicon.analyze(candidate):
            return candidate
    # single edits keep landing on known words; stack them instead
    current = surface
    for _ in range(_MAX_TRIES):
        current = edit_once(current, rng, ops)
        if not lexicon.analyze(current):
            return current
    raise ConfigError("could not corrupt %r into an unknown word" % surface)


def inject_char_errors(tokens: Sequence, config: NoiseConfig, lexicon: MorphLexicon) -> list:
    """Corrupt known tokens, chosen in seeded random order, until the
    recognition rate first drops to or below the target.

    A token's edit depends only on the seed and its position, so lower
    targets corrupt a superset of the tokens corrupted by higher ones.
    """
    out = list(tokens)
    if not out:
        return out
    n = len(out)
    known = [i for i, t in enumerate(out) if lexicon.analyze(t.surface)]
    target = config.target_word_accuracy
    if target > len(known) / n + 1e-12:
        raise ConfigError("target accuracy %.4f is above the current rate %.4f" % (target, len(known) / n))
    order = list(known)
    random.Random(derive_seed(config.seed, "order")).shuffle(order)
    remaining = len(known)
    for i in order:
        if remaining / n <= target + 1e-12:
            break
        noisy = corrupt_token(out[i].surface, lexicon, derive_seed(config.seed, "token", i), config.char_ops)
        out[i] = _with_surface(out[i], noisy)
        remaining -= 1
    return out


def inject_word_order_errors(tokens: Sequence, config: NoiseConfig) -> list:
    """Swap adjacent surfaces within snippets; swapped pairs are disjoint."""
    rng = random.Random(derive_seed(config.seed, "swap"))
    out = []
    for snippet in group_snippets(tokens):
        snippet = list(snippet)
        i = 0
        while i + 1 < len(snippet):
            if config.word_swap_rate and rng.random() < config.word_swap_rate:
                a, b = snippet[i], snippet[i + 1]
                snippet[i], snippet[i + 1] = _with_surface(a, b.surface), _with_surface(b, a.surface)
                i += 2
            else:
                i += 1
        out.extend(snippet)
    return out


_SPLIT_TAGS = {
    Position.OUTSIDE: (Position.OUTSIDE, Position.OUTSIDE),
    Position.UNIT: (Position.BEGIN, Position.END),
    Position.BEGIN: (Position.BEGIN, Position.BEGIN),
    Position.END: (Position.BEGIN, Position.END),
}


def split_token(surface: str, point: int) -> tuple:
    return surface[:point] + "-", surface[point:]


def inject_hyphenation_splits(tokens: Sequence, config: NoiseConfig) -> list:
    """Split tokens of length >= 4 into ``head-`` and ``tail``; indices are
    renumbered. A split entity token keeps its label across both halves."""
    rng = random.Random(derive_seed(config.seed, "hyphen"))
    out = []
    for snippet in group_snippets(tokens):
        index = 0
        for item in snippet:
            surface = item.surface
            if len(surface) >= 4 and config.hyphen_split_rate and rng.random() < config.hyphen_split_rate:
                point = rng.randint(2, len(surface) - 2)
                head, tail = split_token(surface, point)
                tags = (None, None)
                if isinstance(item, AnnotatedToken):
                    first, second = _SPLIT_TAGS[item.tag.position]
                    tags = (BoundaryTag(item.tag.label, first), BoundaryTag(item.tag.label, second))
                out.append(_with_surface(item, head, index, tags[0]))
                out.append(_with_surface(item, tail, index + 1, tags[1]))
                index += 2
            else:
                out.append(_with_surface(item, surface, index))
                index += 1
    return out


def apply_noise(tokens: Sequence, config: NoiseConfig, lexicon: Optional[MorphLexicon] = None) -> list:
    """Character errors, then word swaps, then hyphenation splits."""
    out = list(tokens)
    if lexicon is not None and out and config.target_word_accuracy < 1.0:
        out = inject_char_errors(out, config, lexicon)
    out = inject_word_order_errors(out, config)
    return inject_hyphenation_splits(out, config)


def dehyphenate(parts: Iterable[str]) -> str:
    return "".join(p[:-1] if p.endswith("-") else p for p in parts)
