"""Content age rating consistency across territories.

Each authority's rating label maps to a suitable-age interval; the
interval runs from the label's minimum allowed age up to the next
level's minimum minus one (the top level is open-ended).  The
inconsistency level between two intervals is a 0-4 step function of
the gap between them, with a step width of 3 years.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import InsufficientRatings, UnknownLabel

DEFAULT_STEP_YEARS = 3
MAX_LEVEL = 4
MANUAL_REVIEW_LEVEL = 3  # levels above this get tagged for manual review


class RatingAuthority(enum.Enum):
    ACB = "ACB"
    ESRB = "ESRB"
    PEGI = "PEGI"
    USK = "USK"
    IARC = "IARC"


@dataclass(frozen=True)
class AgeGroup:
    min_age: int
    max_age: int | None  # None = open-ended (18+)

    def __post_init__(self):
        if self.max_age is not None and not 0 <= self.min_age <= self.max_age:
            raise ValueError(f"invalid age interval [{self.min_age}, {self.max_age}]")


@dataclass
class AgeGroupTable:
    groups: dict[tuple[RatingAuthority, str], AgeGroup]

    def __post_init__(self):
        self._validate()

    def _validate(self):
        # Within an authority: ordered, disjoint, each bounded max is the
        # next level's min minus 1.
        by_auth: dict[RatingAuthority, list[AgeGroup]] = {}
        for (auth, _label), group in self.groups.items():
            by_auth.setdefault(auth, []).append(group)
        for auth, groups in by_auth.items():
            ordered = sorted(groups, key=lambda g: g.min_age)
            for lower, upper in zip(ordered, ordered[1:]):
                if lower.max_age is None or lower.max_age != upper.min_age - 1:
                    raise ValueError(
                        f"{auth.value}: intervals not contiguous at"
                        f" min_age={upper.min_age}")

    def labels(self) -> list[tuple[RatingAuthority, str]]:
        return list(self.groups)

    @classmethod
    def from_file(cls, path: str | Path) -> "AgeGroupTable":
        with open(path, encoding="utf-8") as fh:
            return cls._from_raw(json.load(fh))

    @classmethod
    def default(cls) -> "AgeGroupTable":
        raw = resources.files("kidsaudit.data").joinpath("age_groups.json").read_text()
        return cls._from_raw(json.loads(raw))

    @classmethod
    def _from_raw(cls, raw: dict) -> "AgeGroupTable":
        groups = {}
        for auth_name, labels in raw.items():
            auth = RatingAuthority(auth_name)
            for label, (lo, hi) in labels.items():
                groups[(auth, label)] = AgeGroup(min_age=lo, max_age=hi)
        return cls(groups=groups)


@dataclass
class RatingRecord:
    app_package: str
    country: str
    authority: RatingAuthority
    label: str


@dataclass
class InconsistencyReport:
    app_package: str
    pair_levels: dict[tuple[RatingAuthority, RatingAuthority], int]
    max_level: int
    needs_manual_review: bool = field(default=False)


def age_group(authority: RatingAuthority, label: str,
              table: AgeGroupTable) -> AgeGroup:
    try:
        return table.groups[(authority, label)]
    except KeyError:
        raise UnknownLabel(f"{authority.value} {label!r}") from None


def inconsistency_level(a: AgeGroup, b: AgeGroup,
                        step: int = DEFAULT_STEP_YEARS) -> int:
    """0-4 inconsistency between two suitable-age intervals.

    Symmetric: the pair is ordered by min_age, and the gap is the
    later interval's minimum minus the earlier one's maximum.  Gap <= 0
    (overlap) is level 0; each `step` years of gap adds a level,
    capping at 4 (reached at a 9-year gap with the default step).
    """
    if step < 1:
        raise ValueError("step must be >= 1")
    lo, hi = (a, b) if a.min_age <= b.min_age else (b, a)
    if lo.max_age is None:  # open-ended lower interval always overlaps
        return 0
    gap = hi.min_age - lo.max_age
    if gap <= 0:
        return 0
    if gap <= 9:
        return min(gap // step + 1, MAX_LEVEL)
    return MAX_LEVEL


def build_matrix(table: AgeGroupTable, step: int = DEFAULT_STEP_YEARS,
                 ) -> tuple[list[tuple[RatingAuthority, str]], list[list[int]]]:
    """Pairwise inconsistency levels over every (authority, label) pair."""
    labels = table.labels()
    groups = [table.groups[key] for key in labels]
    matrix = [[inconsistency_level(gi, gj, step) for gj in groups]
              for gi in groups]
    return labels, matrix


def app_inconsistency(records: list[RatingRecord], table: AgeGroupTable,
                      step: int = DEFAULT_STEP_YEARS) -> InconsistencyReport:
    """Score one app's ratings across authorities.

    Requires ratings from at least two distinct authorities.  When an
    authority appears with several labels, the worst pairwise level is
    kept.  Reports with a level above 3 are tagged for manual review.
    """
    if not records:
        raise InsufficientRatings("no rating records")
    by_auth: dict[RatingAuthority, list[AgeGroup]] = {}
    for rec in records:
        group = age_group(rec.authority, rec.label, table)
        by_auth.setdefault(rec.authority, []).append(group)
    if len(by_auth) < 2:
        raise InsufficientRatings(
            f"{records[0].app_package}: ratings from"
            f" {len(by_auth)} authority(ies), need >= 2")

    authorities = sorted(by_auth, key=lambda a: a.value)
    pair_levels: dict[tuple[RatingAuthority, RatingAuthority], int] = {}
    max_level = 0
    for i, auth_a in enumerate(authorities):
        for auth_b in authorities[i + 1:]:
            level = max(inconsistency_level(ga, gb, step)
                        for ga in by_auth[auth_a] for gb in by_auth[auth_b])
            pair_levels[(auth_a, auth_b)] = level
            pair_levels[(auth_b, auth_a)] = level
            max_level = max(max_level, level)

    return InconsistencyReport(
        app_package=records[0].app_package,
        pair_levels=pair_levels,
        max_level=max_level,
        needs_manual_review=max_level > MANUAL_REVIEW_LEVEL,
    )


def load_rating_records(path: str | Path) -> list[RatingRecord]:
    """Per-app ratings file: {"package": ..., "ratings": [{country,
    authority, label}, ...]}."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return [
        RatingRecord(
            app_package=raw["package"],
            country=rec.get("country", ""),
            authority=RatingAuthority(rec["authority"]),
            label=rec["label"],
        )
        for rec in raw.get("ratings", [])
    ]
