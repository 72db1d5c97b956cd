"""Structured run reports rendered to canonical JSON and markdown.

Reports never contain timing or other machine-dependent values, so the same
command on the same input produces byte-identical files.  Wall-clock timing
belongs on stdout only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import serialize


@dataclass(frozen=True)
class Check:
    """One named pass/fail item with JSON-able detail rows."""

    name: str
    ok: bool
    summary: str
    rows: tuple = ()


@dataclass(frozen=True)
class RunReport:
    tool: str
    version: str
    command: str
    input_name: str
    input_digest: str
    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_obj(self) -> dict:
        return {
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "input": self.input_name,
            "input_sha256": self.input_digest,
            "ok": self.ok,
            "checks": [
                {
                    "name": c.name,
                    "ok": c.ok,
                    "summary": c.summary,
                    "rows": list(c.rows),
                }
                for c in self.checks
            ],
        }

    def to_json_bytes(self) -> bytes:
        return serialize.canonical_json_bytes(self.to_obj())

    def to_markdown(self) -> str:
        lines = [
            f"# {self.tool} {self.command}",
            "",
            f"* version: {self.version}",
            f"* input: {self.input_name}",
            f"* input sha256: `{self.input_digest}`",
            f"* result: {'PASS' if self.ok else 'FAIL'}",
            "",
        ]
        for c in self.checks:
            lines.append(f"## {c.name}: {'PASS' if c.ok else 'FAIL'}")
            lines.append("")
            lines.append(c.summary)
            lines.append("")
            for row in c.rows:
                cells = ", ".join(f"{k}={row[k]}" for k in sorted(row))
                lines.append(f"- {cells}")
            if c.rows:
                lines.append("")
        return "\n".join(lines)


def render_stdout(report: RunReport, elapsed: float) -> str:
    lines = []
    for c in report.checks:
        lines.append(f"[{'PASS' if c.ok else 'FAIL'}] {c.name}: {c.summary}")
    lines.append(f"{'PASS' if report.ok else 'FAIL'} "
                 f"({len(report.checks)} checks, {elapsed:.2f}s)")
    return "\n".join(lines)
