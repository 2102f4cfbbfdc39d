"""PII detection over decoded network-flow logs.

Payloads arrive already decrypted (capture and TLS interception happen
upstream); this module only string-matches the known identifiers of a
test device, attributes destinations to trackers, and flags
transmissions made without consent.  Hashed or encoded identifiers are
not detected, so results are a lower bound.
"""
from __future__ import annotations

import enum
import ipaddress
import json
import re
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MalformedRecord
from .signatures import SignatureDatabase, match_host


class Risk(enum.IntEnum):
    LOW = 1
    MID = 2
    HIGH = 3


class DetectionMode(enum.Enum):
    PROFILE_VALUE = "profile_value"
    KEYWORD_PATTERN = "keyword_pattern"
    BOTH = "both"


@dataclass(frozen=True)
class PiiCategory:
    name: str
    risk: Risk
    detection_mode: DetectionMode


# The twelve checked PII categories and their risk tiers.  Device
# characteristics are low risk (often needed for app functionality);
# network-level identifiers are mid; persistent unique identifiers and
# location data are high.
PII_CATEGORIES: tuple[PiiCategory, ...] = (
    PiiCategory("device_model", Risk.LOW, DetectionMode.PROFILE_VALUE),
    PiiCategory("brand", Risk.LOW, DetectionMode.PROFILE_VALUE),
    PiiCategory("board", Risk.LOW, DetectionMode.PROFILE_VALUE),
    PiiCategory("build_number", Risk.LOW, DetectionMode.PROFILE_VALUE),
    PiiCategory("mac_address", Risk.MID, DetectionMode.BOTH),
    PiiCategory("private_ip", Risk.MID, DetectionMode.PROFILE_VALUE),
    PiiCategory("device_fingerprint", Risk.HIGH, DetectionMode.PROFILE_VALUE),
    PiiCategory("location", Risk.HIGH, DetectionMode.BOTH),
    PiiCategory("timezone", Risk.HIGH, DetectionMode.PROFILE_VALUE),
    PiiCategory("imei", Risk.HIGH, DetectionMode.PROFILE_VALUE),
    PiiCategory("serial", Risk.HIGH, DetectionMode.PROFILE_VALUE),
    PiiCategory("advertising_id", Risk.HIGH, DetectionMode.PROFILE_VALUE),
)

CATEGORY_BY_NAME = {c.name: c for c in PII_CATEGORIES}

LOCATION_KEYWORDS = ("$country", "$city")
MAC_PATTERN = re.compile(r"(?:[0-9A-Fa-f]{2}:){5}[0-9A-Fa-f]{2}")


@dataclass
class DeviceProfile:
    """Known identifiers of the capture device, one per PII category."""
    device_model: str | None = None
    brand: str | None = None
    board: str | None = None
    build_number: str | None = None
    mac_address: str | None = None
    private_ip: str | None = None
    device_fingerprint: str | None = None
    location_tokens: list[str] = field(default_factory=list)
    latitude: float | None = None
    longitude: float | None = None
    timezone: str | None = None
    imei: str | None = None
    serial: str | None = None
    advertising_id: str | None = None

    def __post_init__(self):
        if self.advertising_id is not None:
            uuid.UUID(self.advertising_id)  # raises ValueError if not a UUID
        if self.private_ip is not None:
            ipaddress.ip_address(self.private_ip)

    @classmethod
    def from_file(cls, path: str | Path) -> "DeviceProfile":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(**raw)


@dataclass
class FlowRecord:
    app_package: str
    destination_host: str
    timestamp: float
    payload_text: str
    consent_given: bool


@dataclass
class LeakFinding:
    category: PiiCategory
    destination_host: str
    consent_given: bool
    matched_excerpt: str
    app_package: str = ""
    attributed_trackers: set[str] = field(default_factory=set)
    violation_flag: bool = False


_REQUIRED_FLOW_FIELDS = ("package", "host", "timestamp", "payload_text",
                         "consent_given")


def ingest_flows(path: str | Path) -> list[FlowRecord]:
    """Read a flow-log file (JSON lines, one request per line).

    Records are ordered by timestamp within each app package.  Raises
    MalformedRecord when a required field is missing.
    """
    records: list[FlowRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"line {lineno}: invalid JSON") from exc
            missing = [f for f in _REQUIRED_FLOW_FIELDS if f not in raw]
            if missing:
                raise MalformedRecord(
                    f"line {lineno}: missing field(s) {', '.join(missing)}")
            records.append(FlowRecord(
                app_package=raw["package"],
                destination_host=raw["host"],
                timestamp=float(raw["timestamp"]),
                payload_text=raw["payload_text"],
                consent_given=bool(raw["consent_given"]),
            ))
    records.sort(key=lambda r: (r.app_package, r.timestamp))
    return records


def _profile_needles(profile: DeviceProfile, category: str) -> list[str]:
    if category == "location":
        needles = list(profile.location_tokens)
        if profile.latitude is not None:
            needles.append(f"{profile.latitude:.4f}")
        if profile.longitude is not None:
            needles.append(f"{profile.longitude:.4f}")
        return needles
    value = getattr(profile, category)
    return [value] if value else []


def detect_pii(flow: FlowRecord, profile: DeviceProfile) -> list[LeakFinding]:
    """One finding per PII category present in the payload.

    A category matches when one of its profile values occurs as a
    substring of the payload, or (for location and MAC address) when a
    keyword / canonical pattern occurs.
    """
    findings: list[LeakFinding] = []
    payload = flow.payload_text
    for cat in PII_CATEGORIES:
        excerpt = None
        for needle in _profile_needles(profile, cat.name):
            if needle in payload:
                excerpt = needle
                break
        if excerpt is None and cat.name == "location":
            for kw in LOCATION_KEYWORDS:
                if kw in payload:
                    excerpt = kw
                    break
        if excerpt is None and cat.name == "mac_address":
            m = MAC_PATTERN.search(payload)
            if m:
                excerpt = m.group(0)
        if excerpt is not None:
            findings.append(LeakFinding(
                category=cat,
                destination_host=flow.destination_host,
                consent_given=flow.consent_given,
                matched_excerpt=excerpt,
                app_package=flow.app_package,
            ))
    return findings


def attribute_and_score(findings: list[LeakFinding],
                        db: SignatureDatabase) -> list[LeakFinding]:
    """Attribute destinations to trackers and flag consent violations.

    A finding is flagged when the transmission happened without consent
    and the category is mid risk or above (potential GDPR/COPPA issue).
    """
    for f in findings:
        f.attributed_trackers = match_host(f.destination_host, db)
        f.violation_flag = (not f.consent_given and f.category.risk >= Risk.MID)
    return findings
