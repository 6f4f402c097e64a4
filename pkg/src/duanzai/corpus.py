"""Annotated pun-slang corpus: schema, JSONL loading, synthetic generation."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import IO, Iterable

from .pinyin import all_hanzi

PUN_HOLE = "{PUN}"


class CorpusError(ValueError):
    """Malformed corpus line or invariant violation, located by line/id."""


@dataclass(frozen=True)
class PunInstance:
    """One annotated slang sentence.

    Offsets count Unicode scalar values (Python string indices), end
    exclusive. The punchline surface text[start:end] must be all-hanzi.
    """

    id: str
    text: str
    punchline_start: int
    punchline_end: int
    original: str
    source: str = ""

    def __post_init__(self):
        n = len(self.text)
        if not (0 <= self.punchline_start < self.punchline_end <= n):
            raise CorpusError(
                f"instance {self.id!r}: span ({self.punchline_start}, "
                f"{self.punchline_end}) out of bounds for length {n}")
        if not all_hanzi(self.surface):
            raise CorpusError(
                f"instance {self.id!r}: punchline {self.surface!r} is not all-hanzi")
        if not self.original:
            raise CorpusError(f"instance {self.id!r}: empty original")

    @property
    def surface(self) -> str:
        return self.text[self.punchline_start:self.punchline_end]

    @property
    def span(self) -> tuple[int, int]:
        return (self.punchline_start, self.punchline_end)


@dataclass
class Corpus:
    instances: list[PunInstance]
    name: str = "corpus"
    version: str = "1"

    def __post_init__(self):
        seen = set()
        for inst in self.instances:
            if inst.id in seen:
                raise CorpusError(f"duplicate instance id {inst.id!r}")
            seen.add(inst.id)

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)


def parse_instances(stream: IO[str] | Iterable[str], name: str = "corpus") -> Corpus:
    """Parse line-delimited JSON instances; errors carry the line number."""
    instances = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or not isinstance(obj.get("punchline"), dict):
            raise CorpusError(f"line {lineno}: expected an object with a "
                              f"punchline {{start, end}} field")
        try:
            span = obj["punchline"]
            inst = PunInstance(
                id=str(obj["id"]),
                text=obj["text"],
                punchline_start=int(span["start"]),
                punchline_end=int(span["end"]),
                original=obj["original"],
                source=obj.get("source", ""),
            )
        except KeyError as exc:
            raise CorpusError(f"line {lineno}: missing key {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, CorpusError):
                raise CorpusError(f"line {lineno}: {exc}") from exc
            raise CorpusError(f"line {lineno}: bad field type: {exc}") from exc
        instances.append(inst)
    return Corpus(instances, name=name)


def serialize_instances(corpus: Corpus) -> str:
    """Inverse of parse_instances (modulo the corpus name)."""
    lines = []
    for inst in corpus:
        obj = {
            "id": inst.id,
            "text": inst.text,
            "punchline": {"start": inst.punchline_start, "end": inst.punchline_end},
            "original": inst.original,
        }
        if inst.source:
            obj["source"] = inst.source
        lines.append(json.dumps(obj, ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")


def generate_synthetic(templates: list[str], pairs: list[tuple[str, str]],
                       seed: int) -> Corpus:
    """Cartesian product of templates x (pun, original) pairs.

    Each template must contain exactly one PUN hole. The product order is
    shuffled deterministically by seed; ids are syn-<n> over that order.
    """
    if not pairs:
        raise CorpusError("no pun/original pairs given")
    for t in templates:
        if t.count(PUN_HOLE) != 1:
            raise CorpusError(
                f"template {t!r} must contain exactly one {PUN_HOLE} hole")
    items = []
    for template in templates:
        hole = template.index(PUN_HOLE)
        for pun, original in pairs:
            text = template.replace(PUN_HOLE, pun)
            items.append((text, hole, hole + len(pun), pun, original))
    rng = random.Random(seed)
    rng.shuffle(items)
    instances = [
        PunInstance(
            id=f"syn-{i}", text=text, punchline_start=start, punchline_end=end,
            original=original, source="synthetic",
        )
        for i, (text, start, end, _pun, original) in enumerate(items)
    ]
    return Corpus(instances, name=f"synthetic-seed{seed}")


def split(corpus: Corpus, train_fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Deterministic shuffled partition; train size = round-half-up."""
    if not corpus.instances:
        raise CorpusError("cannot split an empty corpus")
    if not 0 < train_fraction < 1:
        raise CorpusError("train_fraction must be in (0, 1)")
    order = list(range(len(corpus)))
    random.Random(seed).shuffle(order)
    n_train = int(train_fraction * len(order) + 0.5)
    train_idx = sorted(order[:n_train])
    test_idx = sorted(order[n_train:])
    train = Corpus([corpus.instances[i] for i in train_idx],
                   name=f"{corpus.name}-train")
    test = Corpus([corpus.instances[i] for i in test_idx],
                  name=f"{corpus.name}-test")
    return train, test


def load_pairs(stream: IO[str] | Iterable[str]) -> list[tuple[str, str]]:
    """Tab-separated (pun, original) pairs, `#` comments allowed."""
    pairs = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise CorpusError(f"line {lineno}: expected <pun>\\t<original>")
        pairs.append((parts[0], parts[1]))
    return pairs


def load_templates(stream: IO[str] | Iterable[str]) -> list[str]:
    return [line.rstrip("\n") for line in stream if line.strip()]
