"""Corpus scanning and report emission.

A corpus directory holds one subdirectory per app, named by package,
with any subset of:

    app.apk        the binary (static analysis)
    metadata.json  package, audience, category, installs, rating_score
    flows.jsonl    decoded network-flow log
    ratings.json   per-country age ratings
    comments.jsonl user reviews

Missing inputs degrade to partial reports; a broken input is recorded
in that app's report without affecting the others.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import apk, netflow, policy, ratings, signatures
from .comments import (PreprocessConfig, TopicCatalog, categorize_corpus,
                       default_rules, load_comments, load_rules)
from .errors import AuditError
from .netflow import DeviceProfile, LeakFinding
from .policy import AppMetadata, Audience, Finding, FindingCode, Severity
from .ratings import InconsistencyReport, RatingAuthority

SCHEMA_VERSION = 1

APK_NAME = "app.apk"
METADATA_NAME = "metadata.json"
FLOWS_NAME = "flows.jsonl"
RATINGS_NAME = "ratings.json"
COMMENTS_NAME = "comments.jsonl"


@dataclass
class ScanConfig:
    corpus_dir: Path
    signature_db_path: Path | None = None
    age_table_path: Path | None = None
    rule_file_path: Path | None = None
    device_profile_path: Path | None = None
    parallelism: int = 4
    exclude_google_facebook: bool = False
    audience_filter: Audience | None = None
    excessive_threshold: int = policy.EXCESSIVE_TRACKER_THRESHOLD


@dataclass
class AppReport:
    package: str
    audience: str | None = None
    permissions: list[str] = field(default_factory=list)
    trackers: list[str] = field(default_factory=list)
    tracker_counts: dict[str, int] = field(default_factory=dict)
    findings: list[Finding] = field(default_factory=list)
    leaks: list[LeakFinding] = field(default_factory=list)
    inconsistency: InconsistencyReport | None = None
    complaint_stats: dict[str, dict[str, float]] | None = None
    errors: list[str] = field(default_factory=list)

    def has_violation(self) -> bool:
        return any(f.severity is Severity.VIOLATION for f in self.findings)

    def needs_manual_review(self) -> bool:
        return self.inconsistency is not None and self.inconsistency.needs_manual_review


def _load_metadata(path: Path) -> AppMetadata:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return AppMetadata(
        package_name=raw["package"],
        audience=Audience(raw["audience"]),
        category=raw.get("category", ""),
        install_count=raw.get("installs"),
        rating_score=raw.get("rating_score"),
    )


def _scan_app(app_dir: Path, db: signatures.SignatureDatabase,
              age_table: ratings.AgeGroupTable,
              rules, catalog: TopicCatalog,
              profile: DeviceProfile | None,
              config: ScanConfig) -> AppReport:
    package = app_dir.name
    report = AppReport(package=package)

    meta = None
    meta_path = app_dir / METADATA_NAME
    if meta_path.exists():
        try:
            meta = _load_metadata(meta_path)
            report.audience = meta.audience.value
        except (AuditError, KeyError, ValueError, OSError) as exc:
            report.errors.append(f"metadata: {exc}")
    if meta is None:
        # static checks still run; severity defaults to the weaker tier
        meta = AppMetadata(package_name=package,
                           audience=Audience.INCLUDES_CHILDREN)

    apk_path = app_dir / APK_NAME
    if apk_path.exists():
        try:
            archive = apk.open_apk(apk_path)
            manifest = apk.decode_manifest(archive.manifest_bytes)
            index = apk.index_classes(archive.dex_blobs)
            matched = signatures.match_code(index, db)
            if config.exclude_google_facebook:
                matched = policy.filter_google_facebook(matched, db)
            report.permissions = sorted(manifest.permissions)
            report.trackers = sorted(matched)
            report.tracker_counts = {
                "certified": len(matched & db.certified()),
                "non_certified": len(matched & db.non_certified()),
            }
            report.findings.extend(policy.audit_location(manifest, meta))
            report.findings.extend(policy.audit_trackers(
                matched, meta, db,
                excessive_threshold=config.excessive_threshold))
        except AuditError as exc:
            report.errors.append(f"apk: {type(exc).__name__}: {exc}")

    flows_path = app_dir / FLOWS_NAME
    if flows_path.exists():
        if profile is None:
            report.errors.append("flows: no device profile configured")
        else:
            try:
                for flow in netflow.ingest_flows(flows_path):
                    findings = netflow.detect_pii(flow, profile)
                    report.leaks.extend(
                        netflow.attribute_and_score(findings, db))
            except AuditError as exc:
                report.errors.append(f"flows: {type(exc).__name__}: {exc}")

    ratings_path = app_dir / RATINGS_NAME
    if ratings_path.exists():
        try:
            records = ratings.load_rating_records(ratings_path)
            report.inconsistency = ratings.app_inconsistency(records, age_table)
        except (AuditError, KeyError, ValueError) as exc:
            report.errors.append(f"ratings: {type(exc).__name__}: {exc}")

    comments_path = app_dir / COMMENTS_NAME
    if comments_path.exists():
        try:
            pp = PreprocessConfig.default()
            comments = load_comments(comments_path, pp)
            report.complaint_stats = categorize_corpus(
                comments, rules, catalog, stopwords=pp.stopwords)
        except (AuditError, KeyError, ValueError) as exc:
            report.errors.append(f"comments: {type(exc).__name__}: {exc}")

    return report


def scan(config: ScanConfig) -> list[AppReport]:
    """Run the full pipeline over every app directory in the corpus.

    Per-app failures are captured inside that app's report; the scan
    itself never fails on corpus content.  Reports come back ordered
    by package name regardless of scheduling.
    """
    corpus = Path(config.corpus_dir)
    db = (signatures.load_database(config.signature_db_path)
          if config.signature_db_path else signatures.default_database())
    age_table = (ratings.AgeGroupTable.from_file(config.age_table_path)
                 if config.age_table_path else ratings.AgeGroupTable.default())
    rules = (load_rules(config.rule_file_path)
             if config.rule_file_path else default_rules())
    catalog = TopicCatalog.default()
    profile = (DeviceProfile.from_file(config.device_profile_path)
               if config.device_profile_path else None)

    app_dirs = sorted(p for p in corpus.iterdir() if p.is_dir())
    workers = max(1, config.parallelism)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reports = list(pool.map(
            lambda d: _scan_app(d, db, age_table, rules, catalog, profile,
                                config),
            app_dirs))

    if config.audience_filter is not None:
        reports = [r for r in reports
                   if r.audience == config.audience_filter.value]
    return sorted(reports, key=lambda r: r.package)


# --- serialization ---

def _finding_to_dict(f: Finding) -> dict:
    return {"code": f.code.value, "severity": f.severity.value,
            "evidence": list(f.evidence), "policy_ref": f.policy_ref}


def _finding_from_dict(d: dict) -> Finding:
    return Finding(code=FindingCode(d["code"]),
                   severity=Severity(d["severity"]),
                   evidence=list(d["evidence"]),
                   policy_ref=d["policy_ref"])


def _leak_to_dict(l: LeakFinding) -> dict:
    return {
        "category": l.category.name,
        "risk": l.category.risk.name,
        "destination_host": l.destination_host,
        "consent_given": l.consent_given,
        "matched_excerpt": l.matched_excerpt,
        "app_package": l.app_package,
        "attributed_trackers": sorted(l.attributed_trackers),
        "violation_flag": l.violation_flag,
    }


def _leak_from_dict(d: dict) -> LeakFinding:
    return LeakFinding(
        category=netflow.CATEGORY_BY_NAME[d["category"]],
        destination_host=d["destination_host"],
        consent_given=d["consent_given"],
        matched_excerpt=d["matched_excerpt"],
        app_package=d["app_package"],
        attributed_trackers=set(d["attributed_trackers"]),
        violation_flag=d["violation_flag"],
    )


def _inconsistency_to_dict(rep: InconsistencyReport) -> dict:
    pairs = sorted({tuple(sorted((a.value, b.value))) + (level,)
                    for (a, b), level in rep.pair_levels.items()})
    return {"app_package": rep.app_package,
            "pair_levels": [list(p) for p in pairs],
            "max_level": rep.max_level,
            "needs_manual_review": rep.needs_manual_review}


def _inconsistency_from_dict(d: dict) -> InconsistencyReport:
    pair_levels = {}
    for a, b, level in d["pair_levels"]:
        auth_a, auth_b = RatingAuthority(a), RatingAuthority(b)
        pair_levels[(auth_a, auth_b)] = level
        pair_levels[(auth_b, auth_a)] = level
    return InconsistencyReport(app_package=d["app_package"],
                               pair_levels=pair_levels,
                               max_level=d["max_level"],
                               needs_manual_review=d["needs_manual_review"])


def report_to_dict(report: AppReport) -> dict:
    return {
        "package": report.package,
        "audience": report.audience,
        "permissions": list(report.permissions),
        "trackers": list(report.trackers),
        "tracker_counts": dict(report.tracker_counts),
        "findings": [_finding_to_dict(f) for f in report.findings],
        "leaks": [_leak_to_dict(l) for l in report.leaks],
        "inconsistency": (_inconsistency_to_dict(report.inconsistency)
                          if report.inconsistency else None),
        "complaint_stats": report.complaint_stats,
        "errors": list(report.errors),
    }


def report_from_dict(d: dict) -> AppReport:
    return AppReport(
        package=d["package"],
        audience=d["audience"],
        permissions=list(d["permissions"]),
        trackers=list(d["trackers"]),
        tracker_counts=dict(d["tracker_counts"]),
        findings=[_finding_from_dict(f) for f in d["findings"]],
        leaks=[_leak_from_dict(l) for l in d["leaks"]],
        inconsistency=(_inconsistency_from_dict(d["inconsistency"])
                       if d["inconsistency"] else None),
        complaint_stats=d["complaint_stats"],
        errors=list(d["errors"]),
    )


def emit(reports: list[AppReport], format: str = "structured") -> str:
    """Render reports as versioned JSON ("structured") or a summary
    table ("table").  Structured output is byte-stable for a given
    report list."""
    ordered = sorted(reports, key=lambda r: r.package)
    if format == "structured":
        doc = {"schema_version": SCHEMA_VERSION,
               "reports": [report_to_dict(r) for r in ordered]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if format == "table":
        return _emit_table(ordered)
    raise ValueError(f"unknown format {format!r}")


def parse_report(text: str) -> list[AppReport]:
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version"
                         f" {doc.get('schema_version')!r}")
    return [report_from_dict(d) for d in doc["reports"]]


def _emit_table(reports: list[AppReport]) -> str:
    header = (f"{'package':<36} {'audience':<18} {'viol':>4} {'warn':>4}"
              f" {'trackers':>8} {'leaks':>5} {'incons':>6} review")
    lines = [header, "-" * len(header)]
    for r in reports:
        viol = sum(1 for f in r.findings if f.severity is Severity.VIOLATION)
        warn = sum(1 for f in r.findings if f.severity is Severity.WARNING)
        incons = r.inconsistency.max_level if r.inconsistency else "-"
        review = "MANUAL-REVIEW" if r.needs_manual_review() else ""
        lines.append(
            f"{r.package:<36} {r.audience or '-':<18} {viol:>4} {warn:>4}"
            f" {len(r.trackers):>8} {len(r.leaks):>5} {incons!s:>6} {review}")
    lines.append("")
    lines.append(f"{len(reports)} app(s),"
                 f" {sum(1 for r in reports if r.has_violation())} with"
                 f" violations")
    return "\n".join(lines) + "\n"
