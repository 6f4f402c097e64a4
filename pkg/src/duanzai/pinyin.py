"""Pinyin syllables, the syllable inventory, and the hanzi reading lexicon."""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from typing import IO, Iterable

# The 23 standard initials, longest first so greedy prefix matching
# tries zh/ch/sh before z/c/s.
INITIALS = (
    "zh", "ch", "sh",
    "b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h",
    "j", "q", "x", "r", "z", "c", "s", "y", "w",
)

HANZI_START, HANZI_END = 0x4E00, 0x9FFF


def is_hanzi(ch: str) -> bool:
    return HANZI_START <= ord(ch) <= HANZI_END


def all_hanzi(text: str) -> bool:
    return bool(text) and all(is_hanzi(c) for c in text)


class PinyinError(ValueError):
    """Bad syllable text, malformed lexicon line, or out-of-lexicon character."""


@dataclass(frozen=True)
class Syllable:
    """One Mandarin syllable: initial (may be empty), final, tone 0-4 (0=neutral)."""

    initial: str
    final: str
    tone: int

    def render(self) -> str:
        return f"{self.initial}{self.final}{self.tone}"

    def base(self) -> str:
        return self.initial + self.final


class SyllableInventory:
    """The set of valid (initial, final) combinations."""

    def __init__(self, pairs: Iterable[tuple[str, str]]):
        self.pairs = frozenset(pairs)

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    @classmethod
    def from_stream(cls, stream: IO[str]) -> "SyllableInventory":
        pairs = []
        for raw in stream:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            initial, _, final = line.partition(",")
            pairs.append((initial.strip(), final.strip()))
        return cls(pairs)


def parse_syllable(text: str, inventory: SyllableInventory) -> Syllable:
    """Parse a romanized syllable with optional trailing tone digit, e.g. "zhang1".

    Splits greedily on the longest matching initial and validates the
    (initial, final) pair against the inventory. A missing digit means
    neutral tone (0).
    """
    if not text:
        raise PinyinError("empty syllable")
    body, tone = text, 0
    if text[-1].isdigit():
        body = text[:-1]
        tone = int(text[-1])
        if tone > 4:
            raise PinyinError(f"invalid tone digit in {text!r}: tone must be 0-4")
    if not body or not body.isascii() or not body.islower():
        raise PinyinError(f"invalid syllable text {text!r}")
    initial = ""
    for cand in INITIALS:
        if body.startswith(cand):
            initial = cand
            break
    final = body[len(initial):]
    if (initial, final) not in inventory:
        raise PinyinError(f"unknown syllable {body!r}")
    return Syllable(initial, final, tone)


class PinyinLexicon:
    """Per-character readings with relative-frequency weights.

    readings maps a single hanzi to a non-empty ordered list of
    (Syllable, weight); weights sum to 1 per character.
    """

    def __init__(self, readings: dict[str, list[tuple[Syllable, float]]],
                 inventory: SyllableInventory):
        self.readings = readings
        self.inventory = inventory
        for ch, items in readings.items():
            total = sum(w for _, w in items)
            if not items or abs(total - 1.0) > 1e-9:
                raise PinyinError(f"weights for {ch!r} sum to {total}, expected 1")

    def __contains__(self, ch: str) -> bool:
        return ch in self.readings

    def __len__(self) -> int:
        return len(self.readings)

    def characters(self) -> list[str]:
        return list(self.readings)

    def top_reading(self, ch: str) -> Syllable:
        """Highest-weight reading; earliest listed wins ties."""
        items = self.readings[ch]
        best = max(items, key=lambda it: it[1])
        for syl, w in items:
            if w == best[1]:
                return syl
        return best[0]

    def is_polyphone(self, ch: str) -> bool:
        return len(self.readings.get(ch, ())) > 1


def load_lexicon(stream: IO[str], inventory: SyllableInventory) -> PinyinLexicon:
    """Load the tab-separated lexicon format.

    Each line: `<hanzi>\\t<syllable>[:weight](,<syllable>[:weight])*`.
    `#` starts a comment. Missing weights get a uniform share, then the
    whole list is normalized to sum to 1.
    """
    readings: dict[str, list[tuple[Syllable, float]]] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise PinyinError(f"line {lineno}: expected <hanzi>\\t<readings>")
        ch, readings_text = parts
        if len(ch) != 1 or not is_hanzi(ch):
            raise PinyinError(f"line {lineno}: {ch!r} is not a single hanzi")
        if ch in readings:
            raise PinyinError(f"line {lineno}: duplicate entry for {ch!r}")
        items: list[tuple[Syllable, float | None]] = []
        for token in readings_text.split(","):
            text, _, weight_str = token.partition(":")
            try:
                syl = parse_syllable(text.strip(), inventory)
            except PinyinError as exc:
                raise PinyinError(f"line {lineno}: {exc}") from exc
            weight: float | None = None
            if weight_str:
                try:
                    weight = float(weight_str)
                except ValueError:
                    raise PinyinError(
                        f"line {lineno}: bad weight {weight_str!r}") from None
                if weight < 0 or weight > 1:
                    raise PinyinError(
                        f"line {lineno}: weight {weight} outside [0, 1]")
            items.append((syl, weight))
        uniform = 1.0 / len(items)
        filled = [(s, w if w is not None else uniform) for s, w in items]
        total = sum(w for _, w in filled)
        if total <= 0:
            raise PinyinError(f"line {lineno}: weights for {ch!r} sum to zero")
        readings[ch] = [(s, w / total) for s, w in filled]
    return PinyinLexicon(readings, inventory)


def hanzi_to_syllables(text: str, lexicon: PinyinLexicon) -> list[list[Syllable]]:
    """Full ordered reading list for each character of a hanzi string."""
    out = []
    for i, ch in enumerate(text):
        if ch not in lexicon:
            raise PinyinError(f"character {ch!r} at index {i} not in lexicon")
        out.append([syl for syl, _ in lexicon.readings[ch]])
    return out


def _data_stream(name: str) -> IO[str]:
    ref = importlib.resources.files("duanzai.data").joinpath(name)
    return ref.open("r", encoding="utf-8")


def default_inventory() -> SyllableInventory:
    with _data_stream("syllables.csv") as fh:
        return SyllableInventory.from_stream(fh)


def default_lexicon(inventory: SyllableInventory | None = None) -> PinyinLexicon:
    """The lexicon shipped with the package (common hanzi, curated)."""
    inv = inventory or default_inventory()
    with _data_stream("lexicon.tsv") as fh:
        return load_lexicon(fh, inv)
