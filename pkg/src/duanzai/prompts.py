"""Prompt assembly for the three querying modes: zero-shot, five-shot,
and clue-provided."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import IO


class PromptMode(enum.Enum):
    ZERO_SHOT = "zero_shot"
    FIVE_SHOT = "five_shot"
    CLUE_PROVIDED = "clue_provided"


class TemplateError(ValueError):
    pass


# Required placeholders per template key; each must occur exactly once.
TEMPLATE_KEYS = {
    "zero_shot": ("{text}",),
    "clue_suffix": ("{punchline}", "{original}"),
    "exemplar_user": ("{text}",),
    "exemplar_assistant": ("{explanation}",),
}

DEFAULT_TEMPLATES = {
    "system": "",
    "zero_shot": "请解释下面这句话的笑点:{text}",
    "clue_suffix": "提示:句中谐音梗为「{punchline}」,其原词可能是「{original}」。",
    "exemplar_user": "例子:{text}",
    "exemplar_assistant": "解读:{explanation}",
}


@dataclass(frozen=True)
class TemplateSet:
    system: str
    zero_shot: str
    clue_suffix: str
    exemplar_user: str
    exemplar_assistant: str

    def __post_init__(self):
        for key, placeholders in TEMPLATE_KEYS.items():
            template = getattr(self, key)
            for ph in placeholders:
                if template.count(ph) != 1:
                    raise TemplateError(
                        f"template {key!r} must contain {ph} exactly once")

    @classmethod
    def default(cls) -> "TemplateSet":
        return cls(**DEFAULT_TEMPLATES)

    @classmethod
    def from_stream(cls, stream: IO[str]) -> "TemplateSet":
        obj = json.load(stream)
        merged = dict(DEFAULT_TEMPLATES)
        unknown = set(obj) - set(merged)
        if unknown:
            raise TemplateError(f"unknown template keys: {sorted(unknown)}")
        merged.update(obj)
        return cls(**merged)


@dataclass(frozen=True)
class ExemplarSet:
    """Ordered (joke text, gold explanation) pairs; >= 5 for five-shot."""

    pairs: tuple[tuple[str, str], ...]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class PromptBundle:
    mode: PromptMode
    messages: tuple[tuple[str, str], ...]  # (role, content)
    provenance: tuple[str, str] | None = None  # (punchline surface, candidate)

    def final_user_message(self) -> str:
        for role, content in reversed(self.messages):
            if role == "user":
                return content
        raise ValueError("bundle has no user message")


def _fill(template: str, **values: str) -> str:
    out = template
    for key, value in values.items():
        out = out.replace("{" + key + "}", value, 1)
    return out


def build_prompt(mode: PromptMode, text: str,
                 clue: tuple[str, str] | None = None,
                 exemplars: ExemplarSet | None = None,
                 templates: TemplateSet | None = None) -> PromptBundle:
    """Deterministic message assembly for one query.

    clue = (punchline surface, recovered original); required for
    CLUE_PROVIDED. FIVE_SHOT uses the first five exemplars, in order.
    """
    t = templates or TemplateSet.default()
    messages: list[tuple[str, str]] = []
    if t.system:
        messages.append(("system", t.system))

    query = _fill(t.zero_shot, text=text)
    provenance = None

    if mode is PromptMode.ZERO_SHOT:
        messages.append(("user", query))
    elif mode is PromptMode.CLUE_PROVIDED:
        if clue is None:
            raise TemplateError("clue-provided mode requires a clue")
        punchline, original = clue
        suffix = _fill(t.clue_suffix, punchline=punchline, original=original)
        messages.append(("user", f"{query}\n{suffix}"))
        provenance = (punchline, original)
    elif mode is PromptMode.FIVE_SHOT:
        if exemplars is None or len(exemplars) < 5:
            raise TemplateError("five-shot mode requires >= 5 exemplars")
        for joke, explanation in exemplars.pairs[:5]:
            messages.append(("user", _fill(t.exemplar_user, text=joke)))
            messages.append(
                ("assistant", _fill(t.exemplar_assistant, explanation=explanation)))
        messages.append(("user", query))
    else:  # pragma: no cover - enum is closed
        raise TemplateError(f"unknown mode {mode!r}")

    return PromptBundle(mode=mode, messages=tuple(messages), provenance=provenance)
