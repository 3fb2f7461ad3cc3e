"""FastAPI service exposing protocol runs, attack estimation, and accounting."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query

from ..analysis import build_report, efficiency_csv, efficiency_rows, efficiency_text
from ..protocol import ProtocolError
from ..qudit import EngineError, run_algebra_audit
from .runner import execute_attack, execute_run
from .schemas import (
    AttackResponse,
    AuditDimensionSummary,
    AuditResponse,
    EfficiencyResponse,
    EfficiencyRow,
    RunResponse,
    Scenario,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="qudit private-comparison simulator",
        description=(
            "Simulates a k-party private size-comparison protocol over d-level "
            "GHZ states, including decoy-based eavesdropping detection, attack "
            "Monte Carlo, and efficiency accounting."
        ),
        version="0.1.0",
    )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/run", response_model=RunResponse)
    def run(scenario: Scenario) -> RunResponse:
        try:
            _, response = execute_run(scenario)
        except (ProtocolError, EngineError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return response

    @app.post("/attack", response_model=AttackResponse)
    def attack(scenario: Scenario) -> AttackResponse:
        if scenario.attack is None:
            raise HTTPException(status_code=400, detail="scenario has no attack section")
        try:
            return execute_attack(scenario)
        except (ProtocolError, EngineError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/efficiency", response_model=EfficiencyResponse)
    def efficiency(
        k: list[int] = Query(default=[3]),
        m: int = Query(default=1, ge=1),
    ) -> EfficiencyResponse:
        for value in k:
            if value < 3:
                raise HTTPException(status_code=400, detail=f"k: participant count {value} is below 3")
        try:
            rows = efficiency_rows(sorted(set(k)), m)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return EfficiencyResponse(
            rows=[
                EfficiencyRow(
                    protocol_id=r.protocol_id, k=r.k, m=r.m, c=r.c, q=r.q, b=r.b, eta=str(r.eta)
                )
                for r in rows
            ],
            text=efficiency_text(rows),
            csv=efficiency_csv(rows),
        )

    @app.get("/audit", response_model=AuditResponse)
    def audit(
        max_dim: int = Query(default=13, ge=2, le=31),
        format: str = Query(default="text"),
    ) -> AuditResponse:
        if format not in ("text", "records"):
            raise HTTPException(status_code=400, detail=f"format: unknown report format {format!r}")
        result = run_algebra_audit(max_dim)
        return AuditResponse(
            max_dim=result.max_dim,
            unitarity_ok=result.unitarity_ok,
            max_unitarity_deviation=result.max_unitarity_deviation,
            z_line_ok=result.z_line_ok,
            x_pass_count=result.x_pass_count,
            x_total=len(result.x_records),
            per_dimension=[
                AuditDimensionSummary(dim=dim, x_passes=p, x_total=t)
                for dim, (p, t) in sorted(result.x_summary_by_dim().items())
            ],
            report=build_report(audit=result, fmt=format),
        )

    return app


app = create_app()
