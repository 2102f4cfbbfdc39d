"""Review preprocessing: emoji translation, tokenization, filtering.

Only short-enough-to-matter rules live here: emojis become word
tokens via a configurable mapping table, text is lowercased and split
on non-alphanumerics, and a comment is dropped when it has fewer than
5 tokens or its star rating is above the negative-feedback cutoff.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

MIN_TOKENS = 5
DEFAULT_STAR_CUTOFF = 2  # keep comments with stars <= cutoff

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass
class Comment:
    app_package: str
    stars: int
    text: str
    tokens: list[str] = field(default_factory=list)


@dataclass
class PreprocessConfig:
    stopwords: frozenset[str]
    emoji_map: dict[str, str]
    star_cutoff: int = DEFAULT_STAR_CUTOFF

    @classmethod
    def default(cls, star_cutoff: int = DEFAULT_STAR_CUTOFF) -> "PreprocessConfig":
        return cls(stopwords=load_default_stopwords(),
                   emoji_map=load_default_emoji_map(),
                   star_cutoff=star_cutoff)


def load_default_stopwords() -> frozenset[str]:
    text = resources.files("kidsaudit.data").joinpath("stopwords.txt").read_text()
    return frozenset(w for w in text.split() if w)


def load_default_emoji_map() -> dict[str, str]:
    text = resources.files("kidsaudit.data").joinpath("emoji_map.json").read_text()
    return json.loads(text)


def load_stopwords(path: str | Path) -> frozenset[str]:
    return frozenset(w for w in Path(path).read_text(encoding="utf-8").split() if w)


def tokenize(text: str, emoji_map: dict[str, str]) -> list[str]:
    for emoji, words in emoji_map.items():
        if emoji in text:
            text = text.replace(emoji, f" {words} ")
    return _TOKEN_RE.findall(text.lower())


def preprocess(raw_text: str, stars: int, config: PreprocessConfig,
               app_package: str = "") -> Comment | None:
    """Build a Comment, or None when the comment is dropped.

    Drops: stars above the negative-feedback cutoff, or fewer than 5
    tokens (counted before stopword removal).  Never raises.
    """
    if stars > config.star_cutoff:
        return None
    tokens = tokenize(raw_text, config.emoji_map)
    if len(tokens) < MIN_TOKENS:
        return None
    return Comment(app_package=app_package, stars=stars, text=raw_text,
                   tokens=tokens)


def load_comments(path: str | Path, config: PreprocessConfig | None = None,
                  ) -> list[Comment]:
    """Ingest a comment file (JSON lines: package, stars, text),
    preprocessing and dropping as it goes."""
    config = config or PreprocessConfig.default()
    out: list[Comment] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            comment = preprocess(raw["text"], int(raw["stars"]), config,
                                 app_package=raw.get("package", ""))
            if comment is not None:
                out.append(comment)
    return out


def content_tokens(comment: Comment, stopwords: frozenset[str]) -> list[str]:
    """Tokens with stopwords removed; the basis for vector weights and
    rule distance counting."""
    return [t for t in comment.tokens if t not in stopwords]
