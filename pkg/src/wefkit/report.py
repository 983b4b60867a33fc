"""Plain pass/fail reports shared by the lab modules and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    label: str
    ok: bool
    detail: str = ""


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    table: list = field(default_factory=list)  # optional preformatted lines
    data: dict = field(default_factory=dict)

    def add(self, label: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(Check(label, bool(ok), detail))
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    def lines(self) -> list[str]:
        out = [f"== {self.title}"]
        out += self.table
        for c in self.checks:
            tail = f"  ({c.detail})" if c.detail else ""
            out.append(f"[{'PASS' if c.ok else 'FAIL'}] {c.label}{tail}")
        return out

    def __str__(self):
        return "\n".join(self.lines())
