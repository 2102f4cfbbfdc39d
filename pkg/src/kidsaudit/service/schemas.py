"""Pydantic request/response models for the audit service."""
from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


# --- scan ---

class ScanRequest(BaseModel):
    corpus_dir: str
    signature_db_path: str | None = None
    age_table_path: str | None = None
    rule_file_path: str | None = None
    device_profile_path: str | None = None
    parallelism: int = 4
    exclude_google_facebook: bool = False
    audience: str | None = None
    excessive_threshold: int = 10


class ScanResponse(BaseModel):
    schema_version: int
    reports: list[dict]
    violation_count: int


class RenderRequest(BaseModel):
    reports: list[dict]
    format: str = "table"


class RenderResponse(BaseModel):
    output: str


# --- ratings ---

class RatingEntry(BaseModel):
    country: str = ""
    authority: str
    label: str


class RatingsAppRequest(BaseModel):
    package: str
    ratings: list[RatingEntry]
    age_table_path: str | None = None


class RatingsAppResponse(BaseModel):
    app_package: str
    pair_levels: list[list] = Field(
        description="[authority_a, authority_b, level] per pair")
    max_level: int
    needs_manual_review: bool


class RatingsMatrixRequest(BaseModel):
    age_table_path: str | None = None


class RatingsMatrixResponse(BaseModel):
    labels: list[list[str]] = Field(description="[authority, label] per row")
    matrix: list[list[int]]


# --- flows ---

class FlowsAuditRequest(BaseModel):
    flow_log_path: str
    device_profile_path: str
    signature_db_path: str | None = None


class FlowsAuditResponse(BaseModel):
    findings: list[dict]
    violation_count: int


# --- comments ---

class CommentsClusterRequest(BaseModel):
    comments_path: str
    k: int | None = None
    grid: list[int] | None = None
    seed: int = 0
    top_n: int = 20
    star_cutoff: int = 2


class ClusterSummary(BaseModel):
    cluster_id: int
    size: int
    representatives: list[str]


class CommentsClusterResponse(BaseModel):
    k: int
    score: float
    clusters: list[ClusterSummary]


class RulesInduceRequest(BaseModel):
    labeled_path: str
    keywords_path: str
    d_max: int = 20
    f1_threshold: float = 0.8
    pilot_path: str | None = None
    max_error: float = 0.10


class RuleModel(BaseModel):
    w1: str
    w2: str | None
    d: int
    topic: str


class RulesInduceResponse(BaseModel):
    rules: list[RuleModel]


class RulesApplyRequest(BaseModel):
    comments_path: str
    rules_path: str | None = None
    star_cutoff: int = 2


class CommentMatch(BaseModel):
    package: str
    text: str
    topics: list[str]


class RulesApplyResponse(BaseModel):
    matches: list[CommentMatch]
    category_stats: dict[str, dict[str, float]]
