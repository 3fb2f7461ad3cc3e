"""Closed-form efficiency accounting and deterministic report assembly.

Efficiency is transmitted-privacy length over total qudits plus classical
digits consumed, kept as an exact rational.  The four reference protocols are
not simulated; their accounting is fixed from their published transmission
structure, under the convention that every transmitted quantum sequence is
guarded by an equal number of decoys.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .adversary import AttackReport
from .protocol import RunResult
from .qudit import AlgebraAuditResult

PROTOCOL_IDS = ("CTH2013", "HHH2017", "LYS2014", "HHG2015", "Ours")

# (qudit multiplier, classical multiplier) per protocol: q = qm*m*k, b = bm*m*k.
_ACCOUNTING: dict[str, tuple[int, int]] = {
    "CTH2013": (2, 1),
    "HHH2017": (6, 2),
    "LYS2014": (2, 1),
    "HHG2015": (5, 1),
    "Ours": (2, 1),
}


@dataclass(frozen=True, slots=True)
class EfficiencyInput:
    protocol_id: str
    k: int
    m: int = 1

    def __post_init__(self) -> None:
        if self.protocol_id not in _ACCOUNTING:
            raise ValueError(f"unknown protocol id {self.protocol_id!r}; expected one of {PROTOCOL_IDS}")
        if self.k < 3:
            raise ValueError(f"participant count must be >= 3, got {self.k}")
        if self.m < 1:
            raise ValueError(f"privacy length must be >= 1, got {self.m}")


@dataclass(frozen=True, slots=True)
class EfficiencyResult:
    protocol_id: str
    k: int
    m: int
    c: int
    q: int
    b: int
    eta: Fraction

    def __post_init__(self) -> None:
        assert self.eta == Fraction(self.c, self.q + self.b)


def efficiency(inp: EfficiencyInput) -> EfficiencyResult:
    """Exact (c, q, b) accounting and resulting efficiency for one protocol."""
    qm, bm = _ACCOUNTING[inp.protocol_id]
    c = inp.m
    q = qm * inp.m * inp.k
    b = bm * inp.m * inp.k
    return EfficiencyResult(inp.protocol_id, inp.k, inp.m, c, q, b, Fraction(c, q + b))


def efficiency_rows(ks: list[int], m: int = 1) -> list[EfficiencyResult]:
    return [efficiency(EfficiencyInput(pid, k, m)) for k in ks for pid in PROTOCOL_IDS]


def efficiency_csv(rows: list[EfficiencyResult]) -> str:
    lines = ["protocol,k,m,c,q,b,eta"]
    for row in rows:
        lines.append(f"{row.protocol_id},{row.k},{row.m},{row.c},{row.q},{row.b},{row.eta}")
    return "\n".join(lines) + "\n"


def efficiency_text(rows: list[EfficiencyResult]) -> str:
    blocks = []
    for k in sorted({row.k for row in rows}):
        lines = [f"k = {k}", f"{'protocol':<10} {'c':>5} {'q':>6} {'b':>6} eta"]
        for row in rows:
            if row.k == k:
                lines.append(f"{row.protocol_id:<10} {row.c:>5} {row.q:>6} {row.b:>6} {row.eta}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


# ---------------------------------------------------------------------------
# Combined report
# ---------------------------------------------------------------------------

REPORT_FORMATS = ("text", "records")


def build_report(
    run: RunResult | None = None,
    attacks: list[AttackReport] | None = None,
    efficiency_rows_: list[EfficiencyResult] | None = None,
    audit: AlgebraAuditResult | None = None,
    fmt: str = "text",
) -> str:
    """Assemble one deterministic document from whatever sections are present.

    Identical inputs give byte-identical output; sections with no data are
    omitted entirely.
    """
    if fmt not in REPORT_FORMATS:
        raise ValueError(f"unknown report format {fmt!r}; expected one of {REPORT_FORMATS}")
    if run is None and not attacks and not efficiency_rows_ and audit is None:
        raise ValueError("report needs at least one input section")
    if fmt == "records":
        return _records_report(run, attacks or [], efficiency_rows_ or [], audit)
    return _text_report(run, attacks or [], efficiency_rows_ or [], audit)


def _text_report(run, attacks, rows, audit) -> str:
    parts: list[str] = ["comparison simulation report", "============================", ""]
    if run is not None:
        parts.append("[run]")
        if run.completed:
            parts.append("status: completed")
            for j, chain in enumerate(run.outcome.relations):
                parts.append(f"R{j + 1}: {chain}")
            for i, row in enumerate(run.outcome.totals):
                parts.append(f"totals P{i}: {','.join(str(v) for v in row)}")
            for rec in run.measurements:
                parts.append(f"measured P{rec.owner}: {','.join(str(v) for v in rec.values)}")
            for enc in run.encrypted:
                parts.append(f"padded P{enc.owner}: {','.join(str(v) for v in enc.values)}")
        else:
            parts.append("status: aborted")
            parts.append(f"aborted at: {run.abort_step}")
            parts.append(f"reason: {run.abort_reason}")
        parts.append("")
    if attacks:
        parts.append("[attacks]")
        for report in attacks:
            parts.append(report.render_text().rstrip("\n"))
            parts.append("")
    if rows:
        parts.append("[efficiency]")
        parts.append(efficiency_text(rows).rstrip("\n"))
        parts.append("")
    if audit is not None:
        parts.append("[engine-audit]")
        parts.append(f"dimensions audited: 2..{audit.max_dim}")
        parts.append(f"max unitarity deviation: {audit.max_unitarity_deviation:.3e}")
        parts.append(f"unitarity: {'pass' if audit.unitarity_ok else 'FAIL'}")
        parts.append(f"z-basis shift law: {'pass' if audit.z_line_ok else 'FAIL'}")
        parts.append(
            f"x-basis shift covariance: holds for {audit.x_pass_count} of "
            f"{len(audit.x_records)} (d,r,s) combinations"
        )
        for dim, (passes, total) in sorted(audit.x_summary_by_dim().items()):
            parts.append(f"  d={dim}: {passes}/{total}")
        parts.append("")
    return "\n".join(parts).rstrip("\n") + "\n"


def _records_report(run, attacks, rows, audit) -> str:
    lines: list[str] = []
    if run is not None:
        lines.append(f"run.status={'completed' if run.completed else 'aborted'}")
        if run.completed:
            lines.extend(run.outcome.to_records())
            for rec in run.measurements:
                lines.append(f"measured.{rec.owner}={','.join(str(v) for v in rec.values)}")
            for enc in run.encrypted:
                lines.append(f"padded.{enc.owner}={','.join(str(v) for v in enc.values)}")
        else:
            lines.append(f"run.abort_step={run.abort_step}")
            lines.append(f"run.abort_reason={run.abort_reason}")
    for report in attacks:
        lines.extend(report.to_records())
    for row in rows:
        lines.append(f"efficiency.{row.protocol_id}.k{row.k}={row.eta}")
    if audit is not None:
        lines.append(f"audit.max_dim={audit.max_dim}")
        lines.append(f"audit.max_unitarity_deviation={audit.max_unitarity_deviation:.3e}")
        lines.append(f"audit.unitarity={'pass' if audit.unitarity_ok else 'fail'}")
        lines.append(f"audit.z_line={'pass' if audit.z_line_ok else 'fail'}")
        lines.append(f"audit.x_line.holds={audit.x_pass_count}/{len(audit.x_records)}")
        for rec in audit.x_records:
            lines.append(
                f"audit.x_line.d{rec.dim}.r{rec.shift}.s{rec.value}="
                f"{'pass' if rec.holds else 'fail'}"
            )
    return "\n".join(lines) + "\n"
