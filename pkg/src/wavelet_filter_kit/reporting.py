from __future__ import annotations

import json
from pathlib import Path

from .checks import VerificationReport


def render_report(report: VerificationReport) -> tuple[str, dict]:
    status = "PASS" if report.passed else "FAIL"
    md = [
        f"# Verification Report: {report.source}",
        "",
        f"- kind: {report.kind}",
        f"- seed: {report.seed}",
        f"- points: {report.points}",
        f"- tolerance: {report.tolerance:g}",
        f"- status: {status}",
        "",
        "## Checks",
        "| Check | Residual | Tolerance | Samples | Result |",
        "|---|---:|---:|---:|---|",
    ]
    md.extend(
        f"| {check.name} | {check.residual:.3e} | {check.tolerance:g} | {check.samples} | "
        f"{'pass' if check.passed else 'FAIL'} |"
        for check in report.checks
    )
    failed = report.failed()
    md.extend(["", "## Failures", *([f"- {name}" for name in failed] or ["- None"]), ""])
    return "\n".join(md), report.to_dict()


def write_report(path: str | Path, report: VerificationReport) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    md, payload = render_report(report)
    target.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    target.with_suffix(".md").write_text(md, encoding="utf-8")
    return target
