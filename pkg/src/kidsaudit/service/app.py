"""FastAPI service exposing the audit pipeline.

The service is a thin shell: every endpoint validates the request with
a pydantic model, calls the corresponding core function, and shapes
the result.  File paths in requests are resolved on the host running
the service (the deployment model is a local or single-tenant
service over a shared corpus volume).
"""
from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

import kidsaudit
from .. import netflow, ratings, report, signatures
from ..comments import (PreprocessConfig, TopicCatalog, apply_rules,
                        categorize_corpus, cluster, default_rules,
                        induce_rules, load_comments, load_keyword_sets,
                        load_rules, representatives, select_k,
                        summarization_metric, validate_rules, vectorize)
from ..comments.cluster import DEFAULT_K_GRID
from ..comments.preprocess import Comment, tokenize
from ..errors import AuditError
from ..policy import Audience
from . import schemas


def _load_labeled(path: str, single_topic: bool):
    """JSONL of curated labeled comments: package, stars, text, plus
    `topic` (induction) or `topics` (pilot validation).  Curated
    samples bypass the star/length drop rules."""
    config = PreprocessConfig.default()
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            comment = Comment(
                app_package=raw.get("package", ""),
                stars=int(raw.get("stars", 1)),
                text=raw["text"],
                tokens=tokenize(raw["text"], config.emoji_map),
            )
            if single_topic:
                out.append((comment, raw["topic"]))
            else:
                topics = raw.get("topics")
                if topics is None:
                    topics = [raw["topic"]] if "topic" in raw else []
                out.append((comment, set(topics)))
    return out


def create_app() -> FastAPI:
    app = FastAPI(title="kidsaudit", version=kidsaudit.__version__)

    @app.exception_handler(AuditError)
    async def audit_error_handler(_request: Request, exc: AuditError):
        return JSONResponse(
            status_code=422,
            content={"error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(FileNotFoundError)
    async def missing_file_handler(_request: Request, exc: FileNotFoundError):
        return JSONResponse(status_code=404,
                            content={"error": "FileNotFound",
                                     "detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok",
                                      version=kidsaudit.__version__)

    @app.post("/scan", response_model=schemas.ScanResponse)
    def scan(req: schemas.ScanRequest):
        corpus = Path(req.corpus_dir)
        if not corpus.is_dir():
            raise FileNotFoundError(f"corpus dir {corpus} does not exist")
        config = report.ScanConfig(
            corpus_dir=corpus,
            signature_db_path=_opt_path(req.signature_db_path),
            age_table_path=_opt_path(req.age_table_path),
            rule_file_path=_opt_path(req.rule_file_path),
            device_profile_path=_opt_path(req.device_profile_path),
            parallelism=req.parallelism,
            exclude_google_facebook=req.exclude_google_facebook,
            audience_filter=Audience(req.audience) if req.audience else None,
            excessive_threshold=req.excessive_threshold,
        )
        reports = report.scan(config)
        return schemas.ScanResponse(
            schema_version=report.SCHEMA_VERSION,
            reports=[report.report_to_dict(r) for r in reports],
            violation_count=sum(1 for r in reports if r.has_violation()),
        )

    @app.post("/report/render", response_model=schemas.RenderResponse)
    def render(req: schemas.RenderRequest):
        reports = [report.report_from_dict(d) for d in req.reports]
        return schemas.RenderResponse(output=report.emit(reports, req.format))

    @app.post("/ratings/app", response_model=schemas.RatingsAppResponse)
    def ratings_app(req: schemas.RatingsAppRequest):
        table = (ratings.AgeGroupTable.from_file(req.age_table_path)
                 if req.age_table_path else ratings.AgeGroupTable.default())
        records = [
            ratings.RatingRecord(
                app_package=req.package, country=entry.country,
                authority=ratings.RatingAuthority(entry.authority),
                label=entry.label)
            for entry in req.ratings
        ]
        rep = ratings.app_inconsistency(records, table)
        pairs = sorted({tuple(sorted((a.value, b.value))) + (lvl,)
                        for (a, b), lvl in rep.pair_levels.items()})
        return schemas.RatingsAppResponse(
            app_package=rep.app_package,
            pair_levels=[list(p) for p in pairs],
            max_level=rep.max_level,
            needs_manual_review=rep.needs_manual_review,
        )

    @app.post("/ratings/matrix", response_model=schemas.RatingsMatrixResponse)
    def ratings_matrix(req: schemas.RatingsMatrixRequest):
        table = (ratings.AgeGroupTable.from_file(req.age_table_path)
                 if req.age_table_path else ratings.AgeGroupTable.default())
        labels, matrix = ratings.build_matrix(table)
        return schemas.RatingsMatrixResponse(
            labels=[[auth.value, label] for auth, label in labels],
            matrix=matrix,
        )

    @app.post("/flows/audit", response_model=schemas.FlowsAuditResponse)
    def flows_audit(req: schemas.FlowsAuditRequest):
        profile = netflow.DeviceProfile.from_file(req.device_profile_path)
        db = (signatures.load_database(req.signature_db_path)
              if req.signature_db_path else signatures.default_database())
        findings = []
        for flow in netflow.ingest_flows(req.flow_log_path):
            found = netflow.detect_pii(flow, profile)
            findings.extend(netflow.attribute_and_score(found, db))
        return schemas.FlowsAuditResponse(
            findings=[report._leak_to_dict(f) for f in findings],
            violation_count=sum(1 for f in findings if f.violation_flag),
        )

    @app.post("/comments/cluster",
              response_model=schemas.CommentsClusterResponse)
    def comments_cluster(req: schemas.CommentsClusterRequest):
        pp = PreprocessConfig.default(star_cutoff=req.star_cutoff)
        comments = load_comments(req.comments_path, pp)
        vectors = vectorize(comments, stopwords=pp.stopwords)
        usable = [i for i, v in enumerate(vectors) if v.norm > 0]
        usable_vecs = [vectors[i] for i in usable]
        k = req.k
        if k is None:
            grid = req.grid or list(DEFAULT_K_GRID)
            k = select_k(usable_vecs, grid=grid, seed=req.seed)
        model = cluster(usable_vecs, k, seed=req.seed)
        reps = representatives(model, n=req.top_n)
        clusters = [
            schemas.ClusterSummary(
                cluster_id=cid,
                size=int((model.assignment == cid).sum()),
                representatives=[comments[usable[i]].text for i in members],
            )
            for cid, members in sorted(reps.items())
        ]
        return schemas.CommentsClusterResponse(
            k=model.k, score=summarization_metric(model), clusters=clusters)

    @app.post("/comments/rules/induce",
              response_model=schemas.RulesInduceResponse)
    def rules_induce(req: schemas.RulesInduceRequest):
        pp = PreprocessConfig.default()
        labeled = _load_labeled(req.labeled_path, single_topic=True)
        keyword_sets = load_keyword_sets(req.keywords_path)
        rules = induce_rules(labeled, keyword_sets,
                             d_range=range(1, req.d_max + 1),
                             f1_threshold=req.f1_threshold,
                             stopwords=pp.stopwords)
        if req.pilot_path:
            pilot = _load_labeled(req.pilot_path, single_topic=False)
            rules = validate_rules(rules, pilot, max_error=req.max_error,
                                   stopwords=pp.stopwords)
        return schemas.RulesInduceResponse(
            rules=[schemas.RuleModel(w1=r.w1, w2=r.w2, d=r.d, topic=r.topic)
                   for r in rules])

    @app.post("/comments/rules/apply",
              response_model=schemas.RulesApplyResponse)
    def rules_apply(req: schemas.RulesApplyRequest):
        pp = PreprocessConfig.default(star_cutoff=req.star_cutoff)
        comments = load_comments(req.comments_path, pp)
        rules = (load_rules(req.rules_path) if req.rules_path
                 else default_rules())
        catalog = TopicCatalog.default()
        matches = []
        for comment in comments:
            topics = apply_rules(comment, rules, stopwords=pp.stopwords)
            if topics:
                matches.append(schemas.CommentMatch(
                    package=comment.app_package, text=comment.text,
                    topics=sorted(topics)))
        stats = categorize_corpus(comments, rules, catalog,
                                  stopwords=pp.stopwords)
        return schemas.RulesApplyResponse(matches=matches,
                                          category_stats=stats)

    return app


def _opt_path(value: str | None) -> Path | None:
    return Path(value) if value else None


app = create_app()
