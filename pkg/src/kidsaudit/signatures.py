"""Tracker / ad-SDK signature database.

Answers two questions: which trackers does a class index match (code
signatures, path-prefix semantics) and which trackers does a hostname
match (network signatures, label-aligned suffix semantics), plus
whether each tracker is certified for children's apps.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .apk import DexClassIndex
from .errors import DuplicateName, EmptySignature


@dataclass
class TrackerSignature:
    name: str
    code_signatures: list[str] = field(default_factory=list)
    network_signatures: list[str] = field(default_factory=list)
    family_certified: bool = False
    vendor: str | None = None


@dataclass
class SignatureDatabase:
    signatures: list[TrackerSignature]
    # first path segment -> [(prefix, tracker name)]
    code_index: dict[str, list[tuple[str, str]]]
    # exact domain suffix -> {tracker names}
    host_index: dict[str, set[str]]

    def names(self) -> set[str]:
        return {s.name for s in self.signatures}

    def certified(self) -> set[str]:
        return {s.name for s in self.signatures if s.family_certified}

    def non_certified(self) -> set[str]:
        return {s.name for s in self.signatures if not s.family_certified}

    def by_name(self, name: str) -> TrackerSignature | None:
        for s in self.signatures:
            if s.name == name:
                return s
        return None


def build_database(signatures: list[TrackerSignature]) -> SignatureDatabase:
    seen = set()
    code_index: dict[str, list[tuple[str, str]]] = {}
    host_index: dict[str, set[str]] = {}
    for sig in signatures:
        if sig.name in seen:
            raise DuplicateName(sig.name)
        seen.add(sig.name)
        if not sig.code_signatures and not sig.network_signatures:
            raise EmptySignature(sig.name)
        for prefix in sig.code_signatures:
            head = prefix.split("/", 1)[0]
            code_index.setdefault(head, []).append((prefix, sig.name))
        for domain in sig.network_signatures:
            host_index.setdefault(domain, set()).add(sig.name)
    return SignatureDatabase(signatures=signatures, code_index=code_index,
                             host_index=host_index)


def load_database(path: str | Path) -> SignatureDatabase:
    """Load a signature list file (JSON array of tracker records)."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    sigs = [
        TrackerSignature(
            name=rec["name"],
            code_signatures=list(rec.get("code_signatures", [])),
            network_signatures=list(rec.get("network_signatures", [])),
            family_certified=bool(rec.get("family_certified", False)),
            vendor=rec.get("vendor"),
        )
        for rec in raw
    ]
    return build_database(sigs)


def default_database() -> SignatureDatabase:
    """The bundled signature list: the ten certified family-ads SDKs
    plus a user-replaceable set of common non-certified trackers."""
    data = resources.files("kidsaudit.data").joinpath("signatures.json").read_text()
    raw = json.loads(data)
    return build_database([
        TrackerSignature(
            name=rec["name"],
            code_signatures=list(rec.get("code_signatures", [])),
            network_signatures=list(rec.get("network_signatures", [])),
            family_certified=bool(rec.get("family_certified", False)),
            vendor=rec.get("vendor"),
        )
        for rec in raw
    ])


def match_code(index: DexClassIndex, db: SignatureDatabase,
               substring: bool = False) -> set[str]:
    """Trackers whose code signature matches some class path.

    Default semantics: the class path starts with the signature prefix.
    With substring=True the signature may occur anywhere in the path.
    """
    matched: set[str] = set()
    if substring:
        prefixes = [(p, n) for entries in db.code_index.values() for p, n in entries]
        for cls in index.class_paths:
            for prefix, name in prefixes:
                if prefix in cls:
                    matched.add(name)
        return matched
    for cls in index.class_paths:
        head = cls.split("/", 1)[0]
        for prefix, name in db.code_index.get(head, ()):
            if cls.startswith(prefix):
                matched.add(name)
    return matched


def match_host(hostname: str, db: SignatureDatabase) -> set[str]:
    """Trackers whose network signature matches the hostname.

    A signature matches iff the hostname equals it or ends with
    "." + signature (label-aligned, so "notadcolony.com" does not
    match "adcolony.com").
    """
    matched: set[str] = set()
    labels = hostname.split(".")
    for i in range(len(labels)):
        candidate = ".".join(labels[i:])
        matched |= db.host_index.get(candidate, set())
    return matched
