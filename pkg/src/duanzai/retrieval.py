"""Original-phrase recovery: fuzzy lattice over the lexicon, decoded
against a character bigram language model."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO

from .fuzzy import DEFAULT_COSTS, FuzzyCostTable, syllable_distance
from .pinyin import PinyinLexicon, Syllable, all_hanzi, hanzi_to_syllables

BOS = "<s>"
EOS = "</s>"


class RetrievalError(ValueError):
    pass


class LatticeError(RetrievalError):
    """Some input position admits no candidate below the threshold."""


class BigramLm:
    """Add-k smoothed character bigram model over BOS-padded sentences.

    P(c|p) = (count(p,c) + k) / (count(p) + k * |vocab|), where |vocab|
    counts the distinct hanzi plus EOS (BOS is never predicted).
    """

    def __init__(self, smoothing_k: float = 0.1):
        if smoothing_k <= 0:
            raise RetrievalError("smoothing_k must be positive")
        self.smoothing_k = smoothing_k
        self.unigram_counts: dict[str, int] = {}
        self.bigram_counts: dict[str, dict[str, int]] = {}
        self.vocab: set[str] = set()

    @property
    def predict_vocab_size(self) -> int:
        return len(self.vocab) + 1  # + EOS

    def add_text(self, text: str) -> None:
        tokens = [BOS, *text, EOS]
        self.vocab.update(text)
        for prev, cur in zip(tokens, tokens[1:]):
            self.unigram_counts[prev] = self.unigram_counts.get(prev, 0) + 1
            row = self.bigram_counts.setdefault(prev, {})
            row[cur] = row.get(cur, 0) + 1

    def prob(self, cur: str, prev: str) -> float:
        k = self.smoothing_k
        count = self.bigram_counts.get(prev, {}).get(cur, 0)
        total = self.unigram_counts.get(prev, 0)
        return (count + k) / (total + k * self.predict_vocab_size)

    def logprob(self, cur: str, prev: str) -> float:
        return math.log(self.prob(cur, prev))


def train_bigram_lm(texts: list[str], smoothing_k: float = 0.1) -> BigramLm:
    if not texts:
        raise RetrievalError("empty LM training corpus")
    lm = BigramLm(smoothing_k)
    for text in texts:
        lm.add_text(text)
    return lm


LM_FORMAT = "duanzai-lm"
LM_FORMAT_VERSION = 1


def save_lm(lm: BigramLm, stream: IO[str]) -> None:
    obj = {
        "format": LM_FORMAT,
        "format_version": LM_FORMAT_VERSION,
        "smoothing_k": lm.smoothing_k,
        "vocab": sorted(lm.vocab),
        "unigram_counts": {k: lm.unigram_counts[k] for k in sorted(lm.unigram_counts)},
        "bigram_counts": {
            p: {c: row[c] for c in sorted(row)}
            for p, row in sorted(lm.bigram_counts.items())
        },
    }
    json.dump(obj, stream, ensure_ascii=False)


def load_lm(stream: IO[str]) -> BigramLm:
    obj = json.load(stream)
    if obj.get("format") != LM_FORMAT:
        raise RetrievalError("not a bigram LM file")
    lm = BigramLm(obj["smoothing_k"])
    lm.vocab = set(obj["vocab"])
    lm.unigram_counts = {k: int(v) for k, v in obj["unigram_counts"].items()}
    lm.bigram_counts = {
        p: {c: int(n) for c, n in row.items()}
        for p, row in obj["bigram_counts"].items()
    }
    return lm


@dataclass(frozen=True)
class LatticeArc:
    hanzi: str
    reading: Syllable
    distance: float


@dataclass
class Lattice:
    """Per input position, candidate hanzi within the distance threshold."""

    positions: list[list[LatticeArc]]
    tau: float


def build_lattice(syllables: list[Syllable], lexicon: PinyinLexicon,
                  costs: FuzzyCostTable = DEFAULT_COSTS,
                  tau: float = 1.3) -> Lattice:
    """Candidate arcs: every lexicon hanzi whose closest reading is <= tau."""
    if not syllables:
        raise RetrievalError("empty syllable sequence")
    if tau < 0:
        raise RetrievalError("tau must be non-negative")
    positions = []
    for i, obs in enumerate(syllables):
        arcs = []
        for ch, readings in lexicon.readings.items():
            best_d = None
            best_reading = None
            for reading, _w in readings:
                d = syllable_distance(obs, reading, costs)
                if best_d is None or d < best_d:
                    best_d, best_reading = d, reading
            if best_d is not None and best_d <= tau:
                arcs.append(LatticeArc(ch, best_reading, best_d))
        if not arcs:
            raise LatticeError(
                f"no lattice candidates at position {i} for {obs.render()!r} "
                f"(tau={tau}); widen tau")
        arcs.sort(key=lambda a: (a.distance, a.hanzi))
        positions.append(arcs)
    return Lattice(positions, tau)


@dataclass(frozen=True)
class OriginalCandidate:
    hanzi: str
    total_score: float
    lm_logprob: float
    phonetic_distance: float


@dataclass(frozen=True)
class RetrievalConfig:
    tau: float = 1.3
    beta: float = 2.0
    k: int = 5


def decode_topk(lattice: Lattice, lm: BigramLm, beta: float,
                k: int) -> list[OriginalCandidate]:
    """k-best Viterbi over the lattice.

    Path score = sum_i [log P(c_i|c_{i-1}) - beta * d_i] + log P(EOS|c_n).
    Ties break toward the smaller hanzi string (code-point order).
    """
    if k < 1:
        raise RetrievalError("k must be >= 1")

    # per arc: list of (score, lm_part, dist_part, path) kept at size <= k
    def merge(cands: list[tuple[float, float, float, str]], limit: int):
        cands.sort(key=lambda it: (-it[0], it[3]))
        return cands[:limit]

    beam: list[list[list[tuple[float, float, float, str]]]] = []
    first = []
    for arc in lattice.positions[0]:
        lp = lm.logprob(arc.hanzi, BOS)
        score = lp - beta * arc.distance
        first.append([(score, lp, arc.distance, arc.hanzi)])
    beam.append(first)

    for pos in range(1, len(lattice.positions)):
        layer = []
        for arc in lattice.positions[pos]:
            cands = []
            for prev_idx, prev_arc in enumerate(lattice.positions[pos - 1]):
                step_lp = lm.logprob(arc.hanzi, prev_arc.hanzi)
                step = step_lp - beta * arc.distance
                for score, lp, dist, path in beam[pos - 1][prev_idx]:
                    cands.append((score + step, lp + step_lp,
                                  dist + arc.distance, path + arc.hanzi))
            layer.append(merge(cands, k))
        beam.append(layer)

    finals = []
    for arc_idx, arc in enumerate(lattice.positions[-1]):
        eos_lp = lm.logprob(EOS, arc.hanzi)
        for score, lp, dist, path in beam[-1][arc_idx]:
            finals.append((score + eos_lp, lp + eos_lp, dist, path))
    finals = merge(finals, k)
    return [
        OriginalCandidate(hanzi=path, total_score=score,
                          lm_logprob=lp, phonetic_distance=dist)
        for score, lp, dist, path in finals
    ]


def retrieve_original(punchline: str, lexicon: PinyinLexicon, lm: BigramLm,
                      costs: FuzzyCostTable = DEFAULT_COSTS,
                      config: RetrievalConfig = RetrievalConfig(),
                      ) -> list[OriginalCandidate]:
    """Phoneticize the punchline (top-weight readings), decode candidates.

    The punchline itself is never filtered out; the identity path can win
    when the language model favors it.
    """
    if not all_hanzi(punchline):
        raise RetrievalError(f"punchline {punchline!r} must be all-hanzi")
    hanzi_to_syllables(punchline, lexicon)  # raises with index if unknown
    observation = [lexicon.top_reading(ch) for ch in punchline]
    lattice = build_lattice(observation, lexicon, costs, config.tau)
    return decode_topk(lattice, lm, config.beta, config.k)


def fuzzy_expand(syllables: list[Syllable], budget: int,
                 costs: FuzzyCostTable = DEFAULT_COSTS,
                 inventory=None,
                 ) -> list[tuple[tuple[Syllable, ...], float]]:
    """All variants reachable by <= budget single-component fuzzy swaps.

    Each swap applies one listed initial- or final-pair to one syllable and
    adds the pair cost. Variants whose (initial, final) would leave the
    given syllable inventory are skipped. Duplicates keep their minimal
    cumulative distance; identity is always included at 0.
    """
    if budget < 0:
        raise RetrievalError("budget must be non-negative")

    def neighbors(syl: Syllable):
        for (a, b), cost in costs.initial_pairs.items():
            if syl.initial == a:
                if inventory is None or (b, syl.final) in inventory:
                    yield Syllable(b, syl.final, syl.tone), cost
        for (a, b), cost in costs.final_pairs.items():
            if syl.final == a:
                if inventory is None or (syl.initial, b) in inventory:
                    yield Syllable(syl.initial, b, syl.tone), cost

    best: dict[tuple[Syllable, ...], float] = {tuple(syllables): 0.0}
    frontier = [(tuple(syllables), 0.0)]
    for _ in range(budget):
        nxt = []
        for seq, dist in frontier:
            for i, syl in enumerate(seq):
                for cand, cost in neighbors(syl):
                    variant = seq[:i] + (cand,) + seq[i + 1:]
                    total = dist + cost
                    if variant not in best or total < best[variant]:
                        best[variant] = total
                        nxt.append((variant, total))
        frontier = nxt
    return sorted(best.items(), key=lambda it: (it[1], [s.render() for s in it[0]]))
