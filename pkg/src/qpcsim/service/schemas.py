"""Pydantic request/response models for the simulation service.

The Scenario model doubles as the on-disk scenario file schema: the CLI loads
a YAML document and posts it verbatim, so all cross-field validation lives
here and produces errors that name the offending field.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ProtocolSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    levels: int | None = Field(default=None, description="qudit dimension d (odd, >= 3)")
    max_privacy: int | None = Field(default=None, description="largest privacy digit l; d = 2l+1")
    participants: int = Field(ge=3)
    privacy_length: int = Field(ge=1)
    privacies: list[list[int]] | None = None
    random_privacies: bool = False

    @model_validator(mode="after")
    def _check(self) -> "ProtocolSection":
        if (self.levels is None) == (self.max_privacy is None):
            raise ValueError("protocol: give exactly one of 'levels' or 'max_privacy'")
        if self.levels is not None and (self.levels < 3 or self.levels % 2 == 0):
            raise ValueError("protocol.levels: must be odd and >= 3")
        if self.max_privacy is not None and self.max_privacy < 1:
            raise ValueError("protocol.max_privacy: must be >= 1")
        if self.privacies is None and not self.random_privacies:
            raise ValueError("protocol: give 'privacies' or set 'random_privacies: true'")
        if self.privacies is not None and self.random_privacies:
            raise ValueError("protocol: 'privacies' and 'random_privacies' are mutually exclusive")
        if self.privacies is not None:
            if len(self.privacies) != self.participants:
                raise ValueError(
                    f"protocol.privacies: expected {self.participants} rows, got {len(self.privacies)}"
                )
            limit = self.derived_max_privacy()
            for i, row in enumerate(self.privacies):
                if len(row) != self.privacy_length:
                    raise ValueError(
                        f"protocol.privacies[{i}]: expected {self.privacy_length} values, got {len(row)}"
                    )
                for j, v in enumerate(row):
                    if not 0 <= v <= limit:
                        raise ValueError(
                            f"protocol.privacies[{i}][{j}]: value {v} outside 0..{limit}; "
                            f"privacy digits must stay at or below half the modulus"
                        )
        return self

    def derived_levels(self) -> int:
        return self.levels if self.levels is not None else 2 * self.max_privacy + 1

    def derived_max_privacy(self) -> int:
        return (self.derived_levels() - 1) // 2


class ForcedSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    masks: list[list[int]] | None = None
    collapse: list[int] | None = None


class AttackSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["intercept-resend", "dishonest-participant", "semi-honest-tp"]
    target: int = Field(default=0, ge=0)
    attacker: int | None = None
    legs: list[Literal["distribute", "return"]] = ["return"]
    trials: int = Field(default=1000, ge=1)
    workers: int | None = Field(default=None, ge=1)


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str | None = None
    format: Literal["text", "records", "csv"] = "text"


class Scenario(BaseModel):
    model_config = ConfigDict(extra="forbid")

    protocol: ProtocolSection
    decoys: int | None = Field(default=None, ge=0)
    threshold: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int
    forced: ForcedSection | None = None
    attack: AttackSection | None = None
    output: OutputSection | None = None

    @model_validator(mode="after")
    def _check(self) -> "Scenario":
        d = self.protocol.derived_levels()
        k = self.protocol.participants
        m = self.protocol.privacy_length
        if self.forced is not None:
            if self.forced.masks is not None:
                if len(self.forced.masks) != k:
                    raise ValueError(f"forced.masks: expected {k} rows, got {len(self.forced.masks)}")
                for i, row in enumerate(self.forced.masks):
                    if len(row) != m:
                        raise ValueError(f"forced.masks[{i}]: expected {m} values")
                    for j, v in enumerate(row):
                        if not 0 <= v < d:
                            raise ValueError(f"forced.masks[{i}][{j}]: value {v} outside 0..{d - 1}")
            if self.forced.collapse is not None:
                if len(self.forced.collapse) != m:
                    raise ValueError(f"forced.collapse: expected {m} values")
                for j, v in enumerate(self.forced.collapse):
                    if not 0 <= v < d:
                        raise ValueError(f"forced.collapse[{j}]: value {v} outside 0..{d - 1}")
                if self.attack is not None:
                    raise ValueError("forced.collapse: only valid without an attack section")
        if self.attack is not None:
            if self.attack.target >= k:
                raise ValueError(f"attack.target: index {self.attack.target} outside 0..{k - 1}")
            if self.attack.attacker is not None and self.attack.attacker >= k:
                raise ValueError(f"attack.attacker: index {self.attack.attacker} outside 0..{k - 1}")
            if self.attack.kind == "dishonest-participant" and self.attack.attacker == self.attack.target:
                raise ValueError("attack.attacker: must differ from attack.target")
        return self


class Artifacts(BaseModel):
    transcript: str
    outcome: str
    report: str


class RunResponse(BaseModel):
    completed: bool
    aborted: bool
    abort_step: str | None
    abort_reason: str | None
    relations: list[str]
    totals: list[list[int]] | None
    measurements: list[list[int]] | None
    encrypted: list[list[int]] | None
    common_shifts: list[int] | None
    artifacts: Artifacts


class AttackResponse(BaseModel):
    kind: str
    trials: int
    detections: int
    completed_undetected: int
    integrity_failures: int
    detection_rate: float
    ci_low: float
    ci_high: float
    per_decoy_error_rate: float
    decoys_checked_per_leg: int
    predicted_detection: float
    variant_predicted_detection: float
    predicted_escape: float
    variant_predicted_escape: float
    knowledge: str
    branch_match_rate: float | None
    mask_digit_recovery_rate: float | None
    report: str


class EfficiencyRow(BaseModel):
    protocol_id: str
    k: int
    m: int
    c: int
    q: int
    b: int
    eta: str


class EfficiencyResponse(BaseModel):
    rows: list[EfficiencyRow]
    text: str
    csv: str


class AuditDimensionSummary(BaseModel):
    dim: int
    x_passes: int
    x_total: int


class AuditResponse(BaseModel):
    max_dim: int
    unitarity_ok: bool
    max_unitarity_deviation: float
    z_line_ok: bool
    x_pass_count: int
    x_total: int
    per_dimension: list[AuditDimensionSummary]
    report: str
