"""Families-policy checks over one app's static facts.

Two rules are enforced: apps aimed purely at children must not request
location permissions, and must only embed family-certified ad SDKs.
Apps that merely include children in their audience get warnings
instead of violations, since the neutral-age-screen requirement cannot
be verified statically.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .apk import ManifestInfo
from .errors import UnknownTracker
from .signatures import SignatureDatabase

LOCATION_PERMISSIONS = frozenset({
    "android.permission.ACCESS_COARSE_LOCATION",
    "android.permission.ACCESS_FINE_LOCATION",
})

EXCESSIVE_TRACKER_THRESHOLD = 10


class Audience(enum.Enum):
    FAMILY_DESIGNED = "family"          # listed under Children / Designed for Families
    INCLUDES_CHILDREN = "includes_children"


class FindingCode(enum.Enum):
    LOCATION_PERMISSION_FAMILY = "LocationPermissionFamily"
    LOCATION_PERMISSION_CHILD_TARGET = "LocationPermissionChildTarget"
    NON_CERTIFIED_SDK_FAMILY = "NonCertifiedSdkFamily"
    NON_CERTIFIED_SDK_CHILD_TARGET = "NonCertifiedSdkChildTarget"
    EXCESSIVE_TRACKERS = "ExcessiveTrackers"


class Severity(enum.Enum):
    INFO = "Info"
    WARNING = "Warning"
    VIOLATION = "Violation"


@dataclass
class AppMetadata:
    package_name: str
    audience: Audience
    category: str = ""
    install_count: int | None = None
    rating_score: float | None = None


@dataclass
class Finding:
    code: FindingCode
    severity: Severity
    evidence: list[str] = field(default_factory=list)
    policy_ref: str = ""


def audit_location(manifest: ManifestInfo, meta: AppMetadata) -> list[Finding]:
    """Flag location permission requests in children's apps.

    Family apps get a Violation (location access is forbidden outright);
    apps that include children get a Warning.
    """
    matched = sorted(manifest.permissions & LOCATION_PERMISSIONS)
    if not matched:
        return []
    if meta.audience is Audience.FAMILY_DESIGNED:
        return [Finding(
            code=FindingCode.LOCATION_PERMISSION_FAMILY,
            severity=Severity.VIOLATION,
            evidence=matched,
            policy_ref="Play Families policy: apps that solely target children"
                       " may not access location permissions",
        )]
    return [Finding(
        code=FindingCode.LOCATION_PERMISSION_CHILD_TARGET,
        severity=Severity.WARNING,
        evidence=matched,
        policy_ref="Play Families policy: location access is discouraged when"
                   " the target audience includes children (neutral age screen"
                   " cannot be verified statically)",
    )]


def audit_trackers(matched: set[str], meta: AppMetadata, db: SignatureDatabase,
                   excessive_threshold: int = EXCESSIVE_TRACKER_THRESHOLD,
                   ) -> list[Finding]:
    """Flag non-certified SDKs and excessive tracker counts.

    Raises UnknownTracker for names absent from the database.
    """
    unknown = matched - db.names()
    if unknown:
        raise UnknownTracker(", ".join(sorted(unknown)))

    non_certified = sorted(matched & db.non_certified())
    findings: list[Finding] = []
    if non_certified:
        if meta.audience is Audience.FAMILY_DESIGNED:
            findings.append(Finding(
                code=FindingCode.NON_CERTIFIED_SDK_FAMILY,
                severity=Severity.VIOLATION,
                evidence=non_certified,
                policy_ref="Play Families Ads Program: Family apps may only use"
                           " certified ad SDKs",
            ))
        else:
            findings.append(Finding(
                code=FindingCode.NON_CERTIFIED_SDK_CHILD_TARGET,
                severity=Severity.WARNING,
                evidence=non_certified,
                policy_ref="Play Families Ads Program: non-certified ad SDKs"
                           " may only serve users above 13",
            ))
    if len(non_certified) >= excessive_threshold:
        findings.append(Finding(
            code=FindingCode.EXCESSIVE_TRACKERS,
            severity=Severity.WARNING,
            evidence=non_certified,
            policy_ref="excessive number of non-certified trackers"
                       f" ({len(non_certified)} >= {excessive_threshold})",
        ))
    return findings


def filter_google_facebook(matched: set[str], db: SignatureDatabase) -> set[str]:
    """Report-time variant: drop trackers from Google and Facebook."""
    return {name for name in matched
            if (db.by_name(name) is None
                or db.by_name(name).vendor not in ("Google", "Facebook"))}
