"""Run reports and their deterministic text / JSON renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from ..checks import COUNTED_ROLES, Entry, StructureReport
from .config import RunConfig

REPORT_SCHEMA_ID = "paracontact.report/1"
FORMATS = ("text", "json")


@dataclass
class Section:
    """A titled group of entries; uncounted sections never affect the verdict."""

    report: StructureReport
    counted: bool = True

    @property
    def title(self) -> str:
        return self.report.title

    @property
    def ok(self) -> bool:
        return self.report.ok

    def to_json(self) -> dict:
        return {"title": self.title, "counted": self.counted, "ok": self.ok,
                "entries": [e.to_json() for e in self.report.entries]}


@dataclass
class Report:
    kind: str
    id: str
    run: RunConfig
    sections: list[Section] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)

    def section(self, title: str, counted: bool = True) -> StructureReport:
        rep = StructureReport(title)
        self.sections.append(Section(rep, counted))
        return rep

    def attach(self, rep: StructureReport, counted: bool = True) -> StructureReport:
        self.sections.append(Section(rep, counted))
        return rep

    def get(self, title: str) -> StructureReport:
        for s in self.sections:
            if s.title == title:
                return s.report
        raise KeyError(title)

    def counted_entries(self) -> list[Entry]:
        return [e for s in self.sections if s.counted for e in s.report.entries
                if e.role in COUNTED_ROLES and e.passed is not None]

    def failures(self) -> list[tuple[str, Entry]]:
        return [(s.title, e) for s in self.sections if s.counted for e in s.report.failures()]

    @property
    def ok(self) -> bool:
        return not self.failures()

    def entries(self):
        for s in self.sections:
            yield from s.report.entries

    def by_theorem(self, label: str) -> Entry:
        for e in self.entries():
            if e.theorem == label:
                return e
        raise KeyError(label)

    def summary(self) -> dict:
        counted = self.counted_entries()
        failed = [e for e in counted if not e.passed]
        return {"counted": len(counted), "passed": len(counted) - len(failed), "failed": len(failed)}

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA_ID,
            "kind": self.kind,
            "id": self.id,
            "run": self.run.to_json(),
            "ok": self.ok,
            "summary": self.summary(),
            "data": self.data,
            "sections": [s.to_json() for s in self.sections],
        }


def _fmt_res(v) -> str:
    if v is None:
        return ""
    return f"res={v:.3g}"


def _verdict(e: Entry, counted: bool) -> str:
    if e.passed is None:
        return "-"
    if counted and e.role in COUNTED_ROLES:
        return "PASS" if e.passed else "FAIL"
    return "true" if e.passed else "false"


def _witness(w: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in w.items())


def render_text(report: Report) -> str:
    r = report.run
    lines = [f"{report.kind} {report.id}  (seed {r.seed}, points {r.points}, tol {r.tol:g})"]
    for k, v in report.data.items():
        lines.append(f"  {k}: {json.dumps(v, sort_keys=True)}")
    for s in report.sections:
        lines.append("")
        lines.append(f"[{s.title}]" + ("" if s.counted else "  (reported, not counted)"))
        for e in s.report.entries:
            tag = f"{e.theorem}: " if e.theorem else ""
            parts = [f"  {_verdict(e, s.counted):5} {tag}{e.name}"]
            if e.role not in ("check", "info"):
                parts.append(f"[{e.role}]")
            res = _fmt_res(e.max_residual)
            if res and e.passed is not True:
                parts.append(res)
            lines.append(" ".join(parts))
            if e.note:
                lines.append(f"        note: {e.note}")
            if e.passed is False:
                if e.witness:
                    lines.append(f"        witness: {_witness(e.witness)}")
                for k in ("component", "lhs", "rhs"):
                    if k in e.detail:
                        lines.append(f"        {k}: {e.detail[k]}")
    s = report.summary()
    lines.append("")
    lines.append(f"RESULT: {'PASS' if report.ok else 'FAIL'} ({s['passed']}/{s['counted']} counted entries passed)")
    for title, e in report.failures():
        lines.append(f"  failed: [{title}] {e.theorem + ': ' if e.theorem else ''}{e.name}")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "text") -> bytes:
    """Deterministic rendering: same report, same bytes."""
    if fmt == "json":
        return (json.dumps(report.to_json(), indent=2, sort_keys=False) + "\n").encode()
    if fmt == "text":
        return render_text(report).encode()
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
