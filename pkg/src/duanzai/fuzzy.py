"""Fuzzy phonetic distance between syllables and syllable sequences."""

from __future__ import annotations

from dataclasses import dataclass, field

from .pinyin import Syllable

# Conventional confusable pairs from Chinese input methods.
DEFAULT_FUZZY_INITIALS = {
    ("z", "zh"): 0.5,
    ("c", "ch"): 0.5,
    ("s", "sh"): 0.5,
    ("n", "l"): 0.5,
    ("f", "h"): 0.5,
    ("r", "l"): 0.5,
}
DEFAULT_FUZZY_FINALS = {
    ("an", "ang"): 0.5,
    ("en", "eng"): 0.5,
    ("in", "ing"): 0.5,
    ("ian", "iang"): 0.5,
    ("uan", "uang"): 0.5,
}


def _symmetrize(pairs: dict[tuple[str, str], float]) -> dict[tuple[str, str], float]:
    out = {}
    for (a, b), cost in pairs.items():
        out[(a, b)] = cost
        out[(b, a)] = cost
    return out


@dataclass(frozen=True)
class FuzzyCostTable:
    """Costs for phonetic confusions; immutable and shareable."""

    initial_pairs: dict[tuple[str, str], float] = field(
        default_factory=lambda: dict(DEFAULT_FUZZY_INITIALS))
    final_pairs: dict[tuple[str, str], float] = field(
        default_factory=lambda: dict(DEFAULT_FUZZY_FINALS))
    tone_mismatch_cost: float = 0.2
    component_mismatch_cost: float = 1.0
    indel_cost: float = 1.5

    def __post_init__(self):
        object.__setattr__(self, "initial_pairs", _symmetrize(self.initial_pairs))
        object.__setattr__(self, "final_pairs", _symmetrize(self.final_pairs))
        for table in (self.initial_pairs, self.final_pairs):
            for pair, cost in table.items():
                if not 0 < cost < self.component_mismatch_cost:
                    raise ValueError(
                        f"fuzzy cost for {pair} must lie strictly between 0 "
                        f"and component_mismatch_cost={self.component_mismatch_cost}")
        if self.tone_mismatch_cost < 0 or self.indel_cost < 0:
            raise ValueError("costs must be non-negative")

    def initial_cost(self, a: str, b: str) -> float:
        if a == b:
            return 0.0
        return self.initial_pairs.get((a, b), self.component_mismatch_cost)

    def final_cost(self, a: str, b: str) -> float:
        if a == b:
            return 0.0
        return self.final_pairs.get((a, b), self.component_mismatch_cost)


DEFAULT_COSTS = FuzzyCostTable()


def syllable_distance(a: Syllable, b: Syllable,
                      costs: FuzzyCostTable = DEFAULT_COSTS) -> float:
    """Additive distance over initial, final and tone; 0 iff identical."""
    d = costs.initial_cost(a.initial, b.initial) + costs.final_cost(a.final, b.final)
    if a.tone != b.tone:
        d += costs.tone_mismatch_cost
    return d


def sequence_distance(a: list[Syllable], b: list[Syllable],
                      costs: FuzzyCostTable = DEFAULT_COSTS) -> float:
    """Levenshtein alignment cost with syllable_distance substitutions."""
    n, m = len(a), len(b)
    prev = [j * costs.indel_cost for j in range(m + 1)]
    for i in range(1, n + 1):
        cur = [i * costs.indel_cost] + [0.0] * m
        for j in range(1, m + 1):
            cur[j] = min(
                prev[j] + costs.indel_cost,
                cur[j - 1] + costs.indel_cost,
                prev[j - 1] + syllable_distance(a[i - 1], b[j - 1], costs),
            )
        prev = cur
    return prev[m]
