"""Glue between validated scenarios and the core simulation modules."""

from __future__ import annotations

import numpy as np

from ..adversary import (
    AttackScenario,
    DishonestParticipant,
    InterceptResendEve,
    estimate_detection_probability,
)
from ..analysis import build_report
from ..protocol import (
    ChannelInterposer,
    ProtocolConfig,
    PrivacyVector,
    RandomMask,
    RunResult,
    run_protocol,
)
from .schemas import Artifacts, AttackResponse, RunResponse, Scenario


def scenario_config(scenario: Scenario) -> ProtocolConfig:
    proto = scenario.protocol
    return ProtocolConfig(
        d=proto.derived_levels(),
        k=proto.participants,
        m=proto.privacy_length,
        decoys_per_sequence=scenario.decoys,
        detection_threshold=scenario.threshold,
        seed=scenario.seed,
    )


def _resolve_privacies(scenario: Scenario, config: ProtocolConfig, rng: np.random.Generator):
    proto = scenario.protocol
    if proto.privacies is not None:
        return [PrivacyVector(i, tuple(row)) for i, row in enumerate(proto.privacies)]
    return [
        PrivacyVector(i, tuple(int(v) for v in rng.integers(config.l + 1, size=config.m)))
        for i in range(config.k)
    ]


def _build_interposer(scenario: Scenario, config: ProtocolConfig) -> ChannelInterposer | None:
    attack = scenario.attack
    if attack is None or attack.kind == "semi-honest-tp":
        return None
    rng = np.random.default_rng(np.random.SeedSequence(entropy=scenario.seed, spawn_key=(1,)))
    if attack.kind == "intercept-resend":
        return InterceptResendEve(rng, attack.target, tuple(attack.legs))
    attacker = attack.attacker if attack.attacker is not None else (attack.target + 1) % config.k
    return DishonestParticipant(rng, attacker, attack.target)


def execute_run(scenario: Scenario) -> tuple[RunResult, RunResponse]:
    """Run the protocol once per the scenario and render all artifacts."""
    config = scenario_config(scenario)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=scenario.seed, spawn_key=(0,)))
    privacies = _resolve_privacies(scenario, config, rng)
    forced_masks = None
    forced_collapse = None
    if scenario.forced is not None:
        if scenario.forced.masks is not None:
            forced_masks = [RandomMask(i, tuple(row)) for i, row in enumerate(scenario.forced.masks)]
        forced_collapse = scenario.forced.collapse
    result = run_protocol(
        config,
        privacies,
        adversary=_build_interposer(scenario, config),
        forced_masks=forced_masks,
        forced_collapse=forced_collapse,
        rng=rng,
    )
    fmt = scenario.output.format if scenario.output is not None else "text"
    report_fmt = "records" if fmt == "records" else "text"
    outcome_lines = result.outcome.to_records() if result.outcome is not None else []
    response = RunResponse(
        completed=result.completed,
        aborted=result.aborted,
        abort_step=result.abort_step,
        abort_reason=result.abort_reason,
        relations=[str(chain) for chain in result.outcome.relations] if result.outcome else [],
        totals=[list(row) for row in result.outcome.totals] if result.outcome else None,
        measurements=[list(rec.values) for rec in result.measurements] if result.measurements else None,
        encrypted=[list(enc.values) for enc in result.encrypted] if result.encrypted else None,
        common_shifts=list(result.common_shifts) if result.common_shifts else None,
        artifacts=Artifacts(
            transcript=result.transcript.render(),
            outcome="\n".join(outcome_lines) + "\n" if outcome_lines else "",
            report=build_report(run=result, fmt=report_fmt),
        ),
    )
    return result, response


def execute_attack(scenario: Scenario) -> AttackResponse:
    """Estimate detection statistics for the scenario's attack section."""
    if scenario.attack is None:
        raise ValueError("scenario has no attack section")
    config = scenario_config(scenario)
    attack = scenario.attack
    attack_scenario = AttackScenario(
        kind=attack.kind,
        target=attack.target,
        attacker=attack.attacker,
        legs=tuple(attack.legs),
        trials=attack.trials,
        seed=scenario.seed,
        workers=attack.workers,
    )
    report = estimate_detection_probability(attack_scenario, config)
    fmt = scenario.output.format if scenario.output is not None else "text"
    report_fmt = "records" if fmt == "records" else "text"
    return AttackResponse(
        kind=report.kind,
        trials=report.trials,
        detections=report.detections,
        completed_undetected=report.completed_undetected,
        integrity_failures=report.integrity_failures,
        detection_rate=report.detection_rate,
        ci_low=report.ci_low,
        ci_high=report.ci_high,
        per_decoy_error_rate=report.per_decoy_error_rate,
        decoys_checked_per_leg=report.decoys_checked_per_leg,
        predicted_detection=report.predicted_detection,
        variant_predicted_detection=report.variant_predicted_detection,
        predicted_escape=report.predicted_escape,
        variant_predicted_escape=report.variant_predicted_escape,
        knowledge=report.knowledge,
        branch_match_rate=report.branch_match_rate,
        mask_digit_recovery_rate=report.mask_digit_recovery_rate,
        report=build_report(attacks=[report], fmt=report_fmt),
    )
