"""Keyword-pair rules for complaint topic detection.

A rule is (w1, w2, d, topic): a comment matches when w1 occurs and,
if w2 is set, some occurrence of w2 lies within a token distance
strictly below d.  Distances are counted over tokens *after* stopword
removal, so "improper for kid" matches (kid, improper, d=2) once
"for" is dropped.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import EmptyKeywordSet
from .preprocess import Comment, content_tokens

F1_THRESHOLD = 0.8       # keep rules strictly above
MAX_ERROR_RATE = 0.10    # drop rules strictly above
DEFAULT_D_RANGE = range(1, 21)


@dataclass(frozen=True)
class SemanticRule:
    w1: str
    w2: str | None
    d: int
    topic: str

    def __post_init__(self):
        if self.w2 is None and self.d != 0:
            raise ValueError("single-keyword rule must have d == 0")
        if self.d < 0:
            raise ValueError("distance constraint must be >= 0")

    def matches_tokens(self, tokens: list[str]) -> bool:
        if self.w2 is None:
            return self.w1 in tokens
        pos1 = [i for i, t in enumerate(tokens) if t == self.w1]
        if not pos1:
            return False
        pos2 = [i for i, t in enumerate(tokens) if t == self.w2]
        return any(abs(i - j) < self.d for i in pos1 for j in pos2)


@dataclass
class TopicCatalog:
    """Topic id -> (category, description); categories are Content,
    Ads, Privacy, Security."""
    topics: dict[str, tuple[str, str]]

    def categories(self) -> list[str]:
        seen = []
        for cat, _ in self.topics.values():
            if cat not in seen:
                seen.append(cat)
        return seen

    def category_of(self, topic: str) -> str:
        return self.topics[topic][0]

    @classmethod
    def default(cls) -> "TopicCatalog":
        raw = resources.files("kidsaudit.data").joinpath("topics.json").read_text()
        return cls._from_raw(json.loads(raw))

    @classmethod
    def from_file(cls, path: str | Path) -> "TopicCatalog":
        with open(path, encoding="utf-8") as fh:
            return cls._from_raw(json.load(fh))

    @classmethod
    def _from_raw(cls, raw: dict) -> "TopicCatalog":
        topics = {}
        for category, entries in raw.items():
            for entry in entries:
                topics[entry["id"]] = (category, entry.get("description", ""))
        return cls(topics=topics)


def load_rules(path: str | Path) -> list[SemanticRule]:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return [SemanticRule(w1=r["w1"], w2=r.get("w2"), d=int(r.get("d", 0)),
                         topic=r["topic"]) for r in raw]


def default_rules() -> list[SemanticRule]:
    """Starter rule file; not the original study's rules (those are
    not public), intended as a template for curation."""
    raw = json.loads(
        resources.files("kidsaudit.data").joinpath("rules.json").read_text())
    return [SemanticRule(w1=r["w1"], w2=r.get("w2"), d=int(r.get("d", 0)),
                         topic=r["topic"]) for r in raw]


def save_rules(rules: list[SemanticRule], path: str | Path) -> None:
    payload = [{"w1": r.w1, "w2": r.w2, "d": r.d, "topic": r.topic}
               for r in rules]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_keyword_sets(path: str | Path) -> dict[str, list[str]]:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    return 0.0 if denom == 0 else 2 * tp / denom


def induce_rules(labeled: list[tuple[Comment, str]],
                 keyword_sets: dict[str, list[str]],
                 d_range=DEFAULT_D_RANGE,
                 f1_threshold: float = F1_THRESHOLD,
                 stopwords: frozenset[str] = frozenset(),
                 ) -> list[SemanticRule]:
    """Exhaustively score candidate rules against a labeled sample.

    Candidates per topic: every single keyword (w2=None, d=0) and every
    keyword pair under every distance in d_range.  Rules with F1
    strictly above the threshold survive.
    """
    if not keyword_sets or any(not kws for kws in keyword_sets.values()):
        raise EmptyKeywordSet("every topic needs at least one keyword")

    docs = [(content_tokens(c, stopwords), topic) for c, topic in labeled]
    kept: list[SemanticRule] = []
    for topic, keywords in keyword_sets.items():
        candidates = [SemanticRule(w1=w, w2=None, d=0, topic=topic)
                      for w in keywords]
        for w1, w2 in itertools.combinations(keywords, 2):
            for d in d_range:
                candidates.append(SemanticRule(w1=w1, w2=w2, d=d, topic=topic))
        for rule in candidates:
            tp = fp = fn = 0
            for tokens, label in docs:
                matched = rule.matches_tokens(tokens)
                positive = label == topic
                if matched and positive:
                    tp += 1
                elif matched:
                    fp += 1
                elif positive:
                    fn += 1
            if _f1(tp, fp, fn) > f1_threshold:
                kept.append(rule)
    return kept


def validate_rules(rules: list[SemanticRule],
                   pilot: list[tuple[Comment, set[str]]],
                   max_error: float = MAX_ERROR_RATE,
                   stopwords: frozenset[str] = frozenset(),
                   ) -> list[SemanticRule]:
    """Drop rules whose error rate on a labeled pilot set is strictly
    above max_error.  Error rate = wrong matches / total matches; rules
    that never match are kept."""
    docs = [(content_tokens(c, stopwords), labels) for c, labels in pilot]
    kept = []
    for rule in rules:
        matches = wrong = 0
        for tokens, labels in docs:
            if rule.matches_tokens(tokens):
                matches += 1
                if rule.topic not in labels:
                    wrong += 1
        if matches == 0 or wrong / matches <= max_error:
            kept.append(rule)
    return kept


def apply_rules(comment: Comment, rules: list[SemanticRule],
                stopwords: frozenset[str] = frozenset()) -> set[str]:
    """Topics assigned to one comment by the rule set."""
    tokens = content_tokens(comment, stopwords)
    return {rule.topic for rule in rules if rule.matches_tokens(tokens)}


def categorize_corpus(comments: list[Comment], rules: list[SemanticRule],
                      catalog: TopicCatalog,
                      stopwords: frozenset[str] = frozenset(),
                      ) -> dict[str, dict[str, float]]:
    """Per category: fraction of comments with a matched topic in it,
    and fraction of apps with at least one such comment."""
    categories = catalog.categories()
    comment_hits = {cat: 0 for cat in categories}
    app_hits: dict[str, set[str]] = {cat: set() for cat in categories}
    apps = {c.app_package for c in comments}

    for comment in comments:
        topics = apply_rules(comment, rules, stopwords)
        hit_cats = {catalog.category_of(t) for t in topics}
        for cat in hit_cats:
            comment_hits[cat] += 1
            app_hits[cat].add(comment.app_package)

    n_comments = len(comments)
    n_apps = len(apps)
    return {
        cat: {
            "comment_fraction": comment_hits[cat] / n_comments if n_comments else 0.0,
            "app_fraction": len(app_hits[cat]) / n_apps if n_apps else 0.0,
        }
        for cat in categories
    }
