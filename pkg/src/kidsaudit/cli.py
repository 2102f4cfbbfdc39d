"""Command-line interface.

The CLI is a thin HTTP client of the audit service.  With --url it
talks to a running server; without it, requests go to an in-process
instance of the same app over an ASGI transport, so everything works
offline with identical request/response semantics.

Exit codes: 0 scan completed, 1 usage/config error, 2 scan completed
with at least one policy violation.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATIONS = 2


def _client(url: str | None) -> httpx.Client:
    if url:
        return httpx.Client(base_url=url, timeout=600.0)
    # no server configured: drive an in-process instance of the service
    # over a synchronous ASGI test transport
    from fastapi.testclient import TestClient

    from kidsaudit.service.app import create_app
    return TestClient(create_app())


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        click.echo(f"error: {detail}", err=True)
        sys.exit(EXIT_USAGE)
    return resp.json()


def _write_output(text: str, output: str | None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


class AuditGroup(click.Group):
    """Group whose usage errors exit 1, keeping exit code 2 reserved
    for scans that found violations."""

    def main(self, *args, **kwargs):
        kwargs.setdefault("standalone_mode", False)
        try:
            return super().main(*args, **kwargs)
        except click.ClickException as exc:
            exc.show()
            sys.exit(EXIT_USAGE)
        except click.exceptions.Abort:
            sys.exit(EXIT_USAGE)


@click.group(cls=AuditGroup)
@click.option("--url", envvar="KIDSAUDIT_URL", default=None,
              help="Base URL of a running audit service; defaults to an"
                   " in-process instance.")
@click.pass_context
def main(ctx: click.Context, url: str | None):
    """Audit pipeline for children's mobile apps."""
    ctx.ensure_object(dict)
    ctx.obj["url"] = url


@main.command()
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--signatures", "signature_db", type=click.Path(exists=True),
              help="Tracker signature database (JSON).")
@click.option("--age-table", type=click.Path(exists=True),
              help="Age group table config (JSON).")
@click.option("--rules", "rule_file", type=click.Path(exists=True),
              help="Semantic rule file (JSON).")
@click.option("--device-profile", type=click.Path(exists=True),
              help="Device profile for flow analysis (JSON).")
@click.option("--parallelism", default=4, show_default=True)
@click.option("--exclude-google-facebook", is_flag=True,
              help="Drop Google/Facebook trackers before auditing.")
@click.option("--audience", type=click.Choice(["family", "includes_children"]),
              help="Only report apps with this audience.")
@click.option("--format", "fmt", type=click.Choice(["structured", "table"]),
              default="structured", show_default=True)
@click.option("-o", "--output", type=click.Path(), help="Write to file.")
@click.pass_context
def scan(ctx, corpus_dir, signature_db, age_table, rule_file, device_profile,
         parallelism, exclude_google_facebook, audience, fmt, output):
    """Run the full pipeline over a corpus directory."""
    with _client(ctx.obj["url"]) as client:
        result = _post(client, "/scan", {
            "corpus_dir": str(Path(corpus_dir).resolve()),
            "signature_db_path": signature_db,
            "age_table_path": age_table,
            "rule_file_path": rule_file,
            "device_profile_path": device_profile,
            "parallelism": parallelism,
            "exclude_google_facebook": exclude_google_facebook,
            "audience": audience,
        })
        rendered = _post(client, "/report/render",
                         {"reports": result["reports"], "format": fmt})
    _write_output(rendered["output"], output)
    sys.exit(EXIT_VIOLATIONS if result["violation_count"] else EXIT_OK)


@main.command()
@click.argument("ratings_file", type=click.Path(exists=True, dir_okay=False),
                required=False)
@click.option("--age-table", type=click.Path(exists=True))
@click.option("--matrix", is_flag=True,
              help="Print the full label-pair inconsistency matrix.")
@click.pass_context
def ratings(ctx, ratings_file, age_table, matrix):
    """Age rating inconsistency for one app, or the full matrix."""
    with _client(ctx.obj["url"]) as client:
        if matrix:
            result = _post(client, "/ratings/matrix",
                           {"age_table_path": age_table})
            labels = [f"{a} {l}" for a, l in result["labels"]]
            width = max(len(l) for l in labels)
            for label, row in zip(labels, result["matrix"]):
                click.echo(f"{label:<{width}} " + " ".join(map(str, row)))
            return
        if not ratings_file:
            raise click.UsageError("provide a ratings file or --matrix")
        with open(ratings_file, encoding="utf-8") as fh:
            raw = json.load(fh)
        result = _post(client, "/ratings/app", {
            "package": raw["package"],
            "ratings": raw["ratings"],
            "age_table_path": age_table,
        })
    click.echo(json.dumps(result, indent=2))
    if result["needs_manual_review"]:
        click.echo("flagged for manual review (level > 3)", err=True)


@main.command()
@click.argument("flow_log", type=click.Path(exists=True, dir_okay=False))
@click.option("--device-profile", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--signatures", "signature_db", type=click.Path(exists=True))
@click.pass_context
def flows(ctx, flow_log, device_profile, signature_db):
    """Scan a decoded flow log for PII transmissions."""
    with _client(ctx.obj["url"]) as client:
        result = _post(client, "/flows/audit", {
            "flow_log_path": str(Path(flow_log).resolve()),
            "device_profile_path": str(Path(device_profile).resolve()),
            "signature_db_path": signature_db,
        })
    click.echo(json.dumps(result, indent=2))
    sys.exit(EXIT_VIOLATIONS if result["violation_count"] else EXIT_OK)


@main.group()
def comments():
    """Review-mining commands."""


@comments.command("cluster")
@click.argument("comments_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--k", type=int, help="Fixed cluster count (default: selected"
                                    " automatically over the k grid).")
@click.option("--seed", default=0, show_default=True)
@click.option("--top-n", default=20, show_default=True)
@click.pass_context
def comments_cluster(ctx, comments_file, k, seed, top_n):
    """Cluster comments and print per-cluster representatives."""
    with _client(ctx.obj["url"]) as client:
        result = _post(client, "/comments/cluster", {
            "comments_path": str(Path(comments_file).resolve()),
            "k": k, "seed": seed, "top_n": top_n,
        })
    click.echo(f"k={result['k']} score={result['score']:.6f}")
    for c in result["clusters"]:
        click.echo(f"\ncluster {c['cluster_id']} ({c['size']} comments)")
        for text in c["representatives"]:
            click.echo(f"  - {text}")


@comments.group("rules")
def comments_rules():
    """Semantic rule induction and application."""


@comments_rules.command("induce")
@click.option("--labeled", required=True, type=click.Path(exists=True),
              help="Labeled sample (JSONL with a `topic` field).")
@click.option("--keywords", required=True, type=click.Path(exists=True),
              help="Per-topic keyword sets (JSON).")
@click.option("--pilot", type=click.Path(exists=True),
              help="Pilot set for error-rate validation (JSONL with"
                   " `topics`).")
@click.option("-o", "--output", type=click.Path(), help="Write rules to file.")
@click.pass_context
def rules_induce(ctx, labeled, keywords, pilot, output):
    """Induce keyword-pair rules from a labeled sample."""
    with _client(ctx.obj["url"]) as client:
        result = _post(client, "/comments/rules/induce", {
            "labeled_path": str(Path(labeled).resolve()),
            "keywords_path": str(Path(keywords).resolve()),
            "pilot_path": str(Path(pilot).resolve()) if pilot else None,
        })
    text = json.dumps(result["rules"], indent=2) + "\n"
    _write_output(text, output)


@comments_rules.command("apply")
@click.argument("comments_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--rules", "rules_file", type=click.Path(exists=True))
@click.pass_context
def rules_apply(ctx, comments_file, rules_file):
    """Apply semantic rules to comments and print category stats."""
    with _client(ctx.obj["url"]) as client:
        result = _post(client, "/comments/rules/apply", {
            "comments_path": str(Path(comments_file).resolve()),
            "rules_path": str(Path(rules_file).resolve()) if rules_file else None,
        })
    click.echo(json.dumps(result, indent=2))


@main.command()
@click.argument("report_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["structured", "table"]),
              default="table", show_default=True)
@click.pass_context
def report(ctx, report_file, fmt):
    """Re-render a structured report file."""
    with open(report_file, encoding="utf-8") as fh:
        doc = json.load(fh)
    with _client(ctx.obj["url"]) as client:
        rendered = _post(client, "/report/render",
                         {"reports": doc["reports"], "format": fmt})
    click.echo(rendered["output"], nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8321, show_default=True)
def serve(host, port):
    """Run the audit service."""
    import uvicorn
    uvicorn.run("kidsaudit.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
