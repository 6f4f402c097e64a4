"""Hand-crafted character/pinyin feature templates for punchline tagging.

The emission scorer consumes whatever featurize() yields, so a future
dense/neural scorer only needs to provide a drop-in featurize + scores
implementation with its own template_version string.
"""

from __future__ import annotations

from ..pinyin import PinyinLexicon, is_hanzi

TEMPLATE_VERSION = "char-pinyin-v1"

NONPY = "NONPY"


def _char_at(chars: list[str], pos: int) -> str:
    n = len(chars)
    if pos < 0:
        return f"<S{pos}>"
    if pos >= n:
        return f"<E+{pos - n + 1}>"
    return chars[pos]


def featurize(sentence: str, lexicon: PinyinLexicon) -> list[list[str]]:
    """Active feature strings per character position.

    Templates: unigrams at offsets -2..+2 (U00..U04, with boundary
    sentinels), bigrams (-1,0) and (0,+1) (B00, B01), pinyin initial/final
    of the top reading (P00, P01, NONPY when unavailable), a polyphone
    flag, and a bias.
    """
    chars = list(sentence)
    out = []
    for i in range(len(chars)):
        ch = chars[i]
        feats = [
            f"U00={_char_at(chars, i - 2)}",
            f"U01={_char_at(chars, i - 1)}",
            f"U02={ch}",
            f"U03={_char_at(chars, i + 1)}",
            f"U04={_char_at(chars, i + 2)}",
            f"B00={_char_at(chars, i - 1)}{ch}",
            f"B01={ch}{_char_at(chars, i + 1)}",
        ]
        if is_hanzi(ch) and ch in lexicon:
            top = lexicon.top_reading(ch)
            feats.append(f"P00={top.initial}")
            feats.append(f"P01={top.final}")
            if lexicon.is_polyphone(ch):
                feats.append("POLY")
        else:
            feats.append(f"P00={NONPY}")
            feats.append(f"P01={NONPY}")
        feats.append("BIAS")
        out.append(feats)
    return out
