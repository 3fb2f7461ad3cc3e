"""Attack scenarios against the comparison protocol and their Monte Carlo statistics.

Three analyzed threat models: an external eavesdropper doing intercept-resend
on a quantum leg, a dishonest participant combining legitimate GHZ
correlations with intercept-resend on a victim's return leg, and a
semi-honest third party mining its own view of an honest run.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .protocol import (
    LEG_DISTRIBUTE,
    LEG_RETURN,
    STEP_COMPARISON,
    ChannelInterposer,
    DecoratedSequence,
    ProtocolConfig,
    ProtocolError,
    PrivacyVector,
    mod_sub,
    participant_name,
    run_protocol,
)
from .qudit import Basis

KIND_INTERCEPT_RESEND = "intercept-resend"
KIND_DISHONEST_PARTICIPANT = "dishonest-participant"
KIND_SEMI_HONEST_TP = "semi-honest-tp"
ATTACK_KINDS = (KIND_INTERCEPT_RESEND, KIND_DISHONEST_PARTICIPANT, KIND_SEMI_HONEST_TP)

_MAX_DEFAULT_WORKERS = 8


@dataclass(frozen=True, slots=True)
class AttackScenario:
    """One attack experiment: who attacks whom, on which legs, how many trials."""

    kind: str
    target: int = 0
    attacker: int | None = None
    legs: tuple[str, ...] = (LEG_RETURN,)
    trials: int = 1000
    seed: int = 0
    workers: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ATTACK_KINDS:
            raise ProtocolError(f"unknown attack kind {self.kind!r}; expected one of {ATTACK_KINDS}")
        if self.trials < 1:
            raise ProtocolError(f"trials must be >= 1, got {self.trials}")
        for leg in self.legs:
            if leg not in (LEG_DISTRIBUTE, LEG_RETURN):
                raise ProtocolError(f"unknown channel leg {leg!r}")
        if self.target < 0:
            raise ProtocolError(f"target index must be >= 0, got {self.target}")


# ---------------------------------------------------------------------------
# Interposers
# ---------------------------------------------------------------------------


class InterceptResendEve(ChannelInterposer):
    """Measure every in-transit qudit in a random basis and resend the outcome.

    Eve cannot tell decoys from carriers, so she measures all of them; a
    freshly prepared qudit of the measured value in the measured basis is
    forwarded in place of each original.
    """

    def __init__(self, rng: np.random.Generator, target: int, legs: tuple[str, ...]):
        self.rng = rng
        self.target = target
        self.legs = legs
        self.log: list[tuple[str, int, Basis, int]] = []

    def _party(self, leg: str, sender: str, receiver: str) -> str:
        return receiver if leg == LEG_DISTRIBUTE else sender

    def on_quantum_send(self, leg, sender, receiver, sequence, pool, config) -> None:
        if leg not in self.legs or self._party(leg, sender, receiver) != participant_name(self.target):
            return
        for slot, carrier in enumerate(sequence.carriers):
            basis = Basis.Z if self.rng.integers(2) == 0 else Basis.X
            outcome = pool.measure(carrier, basis, self.rng)
            sequence.carriers[slot] = pool.inject(config.d, outcome, basis)
            self.log.append((leg, slot, basis, outcome))


class DishonestParticipant(ChannelInterposer):
    """A participant who mines GHZ correlations and intercepts a victim's return leg.

    Before masking, the attacker Z-measures their own carriers; entanglement
    makes those outcomes equal to the still-unmasked labels of everyone
    else's carriers.  The victim's returned sequence is then intercept-resent
    like an external attack, hoping to read off the victim's mask.
    """

    def __init__(self, rng: np.random.Generator, attacker: int, victim: int):
        if attacker == victim:
            raise ProtocolError("attacker and victim must differ")
        self.rng = rng
        self.attacker = attacker
        self.victim = victim
        self.branch_values: list[int] = []
        self.victim_labels_matched: bool | None = None
        self.intercept_log: list[tuple[int, Basis, int]] = []
        self.intercepted_sequence: DecoratedSequence | None = None

    def on_participant_receive(self, index, carriers, pool, config) -> None:
        if index != self.attacker:
            return
        self.branch_values = [pool.measure(c, Basis.Z, self.rng) for c in carriers]
        # Cross-check against the victim's carriers: after the attacker's
        # measurement each register is a product state, so the victim's
        # subsystem label is fixed and must equal the attacker's outcome.
        matched = True
        for carrier, branch in zip(carriers, self.branch_values):
            state = pool.get(carrier.state_key)
            for idx in state.amps:
                if idx[self.victim] != branch:
                    matched = False
        self.victim_labels_matched = matched

    def on_quantum_send(self, leg, sender, receiver, sequence, pool, config) -> None:
        if leg != LEG_RETURN or sender != participant_name(self.victim):
            return
        self.intercepted_sequence = sequence
        for slot, carrier in enumerate(list(sequence.carriers)):
            basis = Basis.Z if self.rng.integers(2) == 0 else Basis.X
            outcome = pool.measure(carrier, basis, self.rng)
            sequence.carriers[slot] = pool.inject(config.d, outcome, basis)
            self.intercept_log.append((slot, basis, outcome))

    def recovered_mask_digits(self, d: int) -> dict[int, int]:
        """Mask digits the attacker can pin down once decoy slots are public.

        Only carriers measured in Z reveal anything: there the outcome is the
        branch value shifted by the victim's mask digit, and the attacker
        already knows the branch value.
        """
        if self.intercepted_sequence is None:
            return {}
        by_slot = {slot: (basis, outcome) for slot, basis, outcome in self.intercept_log}
        recovered: dict[int, int] = {}
        for j, slot in enumerate(self.intercepted_sequence.carrier_slots()):
            basis, outcome = by_slot[slot]
            if basis is Basis.Z:
                recovered[j] = mod_sub(outcome, self.branch_values[j], d)
        return recovered


# ---------------------------------------------------------------------------
# Semi-honest TP analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class TpKnowledge:
    """What TP's view (measurements plus padded digits) determines.

    For every participant/index the padded digit plus the measured value pins
    the privacy digit only up to the unknown common collapse value, one
    candidate per possible value; every pairwise difference is determined
    exactly.
    """

    d: int
    candidate_sets: dict[tuple[int, int], tuple[int, ...]]
    pairwise_differences: dict[tuple[int, int, int], int]

    def candidate_size(self, participant: int, index: int) -> int:
        return len(self.candidate_sets[(participant, index)])


def semihonest_tp_analysis(
    measurements: list[tuple[int, ...]],
    encrypted: list[tuple[int, ...]],
    d: int,
) -> TpKnowledge:
    """Enumerate every assignment consistent with TP's view of an honest run."""
    if len(measurements) != len(encrypted):
        raise ProtocolError("measurement and encrypted-digit lists differ in length")
    k = len(measurements)
    m = len(measurements[0]) if k else 0
    totals = [
        [(enc[j] + w[j]) % d for j in range(m)] for enc, w in zip(encrypted, measurements)
    ]
    candidates: dict[tuple[int, int], tuple[int, ...]] = {}
    for i in range(k):
        for j in range(m):
            # Each possible collapse value c yields mask w-c, hence privacy
            # digit total-c; TP cannot distinguish between them.
            values = sorted({(totals[i][j] - c) % d for c in range(d)})
            candidates[(i, j)] = tuple(values)
    differences: dict[tuple[int, int, int], int] = {}
    for i in range(k):
        for i2 in range(i + 1, k):
            for j in range(m):
                differences[(i, i2, j)] = (totals[i][j] - totals[i2][j]) % d
    return TpKnowledge(d, candidates, differences)


# ---------------------------------------------------------------------------
# Monte Carlo estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class AttackReport:
    """Aggregated statistics for one attack scenario.

    ``detections`` counts runs aborted by an eavesdropping check; runs that
    slip past the checks but later die on inconsistent comparison evidence
    are reported separately as ``integrity_failures`` and count as escapes.
    """

    kind: str
    trials: int
    detections: int
    completed_undetected: int
    integrity_failures: int
    per_decoy_error_rate: float
    detection_rate: float
    ci_low: float
    ci_high: float
    decoys_checked_per_leg: int
    # Closed forms with e = (d-1)/(2d), the per-decoy error probability:
    # `predicted` assumes independent decoys each escaping with 1-e; the
    # `variant` is the commonly quoted alternative that raises e itself to
    # the decoy count.  The empirical rate adjudicates between them.
    predicted_detection: float
    variant_predicted_detection: float
    predicted_escape: float
    variant_predicted_escape: float
    knowledge: str
    branch_match_rate: float | None = None
    mask_digit_recovery_rate: float | None = None

    def to_records(self) -> list[str]:
        lines = [
            f"attack.kind={self.kind}",
            f"attack.trials={self.trials}",
            f"attack.detections={self.detections}",
            f"attack.completed_undetected={self.completed_undetected}",
            f"attack.integrity_failures={self.integrity_failures}",
            f"attack.detection_rate={self.detection_rate:.6f}",
            f"attack.ci95={self.ci_low:.6f},{self.ci_high:.6f}",
            f"attack.per_decoy_error_rate={self.per_decoy_error_rate:.6f}",
            f"attack.decoys_checked={self.decoys_checked_per_leg}",
            f"attack.detection_predicted={self.predicted_detection:.6f}",
            f"attack.detection_variant={self.variant_predicted_detection:.6f}",
            f"attack.escape_predicted={self.predicted_escape:.6e}",
            f"attack.escape_variant={self.variant_predicted_escape:.6e}",
            f"attack.knowledge={self.knowledge}",
        ]
        if self.branch_match_rate is not None:
            lines.append(f"attack.branch_match_rate={self.branch_match_rate:.6f}")
        if self.mask_digit_recovery_rate is not None:
            lines.append(f"attack.mask_digit_recovery_rate={self.mask_digit_recovery_rate:.6f}")
        return lines

    def render_text(self) -> str:
        empirical_escape = 1.0 - self.detection_rate
        lines = [
            f"scenario: {self.kind}",
            f"trials: {self.trials}",
            f"detections: {self.detections} (rate {self.detection_rate:.4f}, "
            f"95% CI [{self.ci_low:.4f}, {self.ci_high:.4f}])",
            f"escaped checking: {self.completed_undetected} "
            f"(of which {self.integrity_failures} later failed comparison integrity)",
            f"per-decoy error rate: {self.per_decoy_error_rate:.4f}",
            f"decoys checked per tampered sequence: {self.decoys_checked_per_leg}",
            f"detection, independent-decoy model 1-((d+1)/2d)^n: {self.predicted_detection:.6f}",
            f"detection, error-rate-power variant 1-((d-1)/2d)^n: {self.variant_predicted_detection:.6f}",
            f"escape, independent-decoy model: {self.predicted_escape:.6e}",
            f"escape, error-rate-power variant: {self.variant_predicted_escape:.6e}",
            f"escape, empirical: {empirical_escape:.6e}",
        ]
        if self.kind != KIND_SEMI_HONEST_TP and self.decoys_checked_per_leg > 0:
            closer = (
                "independent-decoy model"
                if abs(empirical_escape - self.predicted_escape)
                <= abs(empirical_escape - self.variant_predicted_escape)
                else "error-rate-power variant"
            )
            lines.append(f"empirical escape agrees with the {closer}")
        lines.append(f"knowledge: {self.knowledge}")
        if self.branch_match_rate is not None:
            lines.append(f"pre-encoding branch match rate: {self.branch_match_rate:.4f}")
        if self.mask_digit_recovery_rate is not None:
            lines.append(f"mask digits recovered exactly: {self.mask_digit_recovery_rate:.4f}")
        return "\n".join(lines) + "\n"


@dataclass(slots=True)
class _TrialStats:
    detected: int = 0
    completed: int = 0
    integrity_failures: int = 0
    tampered_checked: int = 0
    tampered_mismatches: int = 0
    branch_matches: int = 0
    branch_trials: int = 0
    mask_digits_recovered: int = 0
    mask_digits_possible: int = 0

    def merge(self, other: "_TrialStats") -> None:
        self.detected += other.detected
        self.completed += other.completed
        self.integrity_failures += other.integrity_failures
        self.tampered_checked += other.tampered_checked
        self.tampered_mismatches += other.tampered_mismatches
        self.branch_matches += other.branch_matches
        self.branch_trials += other.branch_trials
        self.mask_digits_recovered += other.mask_digits_recovered
        self.mask_digits_possible += other.mask_digits_possible


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def _tampered_legs(scenario: AttackScenario) -> set[tuple[str, int]]:
    if scenario.kind == KIND_DISHONEST_PARTICIPANT:
        return {(LEG_RETURN, scenario.target)}
    return {(leg, scenario.target) for leg in scenario.legs}


def _run_one_trial(scenario: AttackScenario, config: ProtocolConfig, trial: int) -> _TrialStats:
    rng = _trial_rng(scenario.seed, trial)
    privacies = [
        PrivacyVector(i, tuple(int(v) for v in rng.integers(config.l + 1, size=config.m)))
        for i in range(config.k)
    ]
    adversary: ChannelInterposer | None
    if scenario.kind == KIND_INTERCEPT_RESEND:
        adversary = InterceptResendEve(rng, scenario.target, scenario.legs)
    elif scenario.kind == KIND_DISHONEST_PARTICIPANT:
        attacker = scenario.attacker if scenario.attacker is not None else (scenario.target + 1) % config.k
        adversary = DishonestParticipant(rng, attacker, scenario.target)
    else:
        adversary = None
    result = run_protocol(config, privacies, adversary=adversary, rng=rng)

    stats = _TrialStats()
    # Detection means an eavesdropping check fired; a run that escapes the
    # checks but produces cyclic ordering evidence aborts at comparison and
    # is tallied separately.
    if result.aborted:
        if result.abort_step == STEP_COMPARISON:
            stats.integrity_failures = 1
        else:
            stats.detected = 1
    stats.completed = 1 if result.completed else 0
    tampered = _tampered_legs(scenario)
    for check in result.decoy_checks:
        if (check.leg, check.sequence_owner) in tampered:
            stats.tampered_checked += check.checked
            stats.tampered_mismatches += check.mismatches
    if isinstance(adversary, DishonestParticipant):
        stats.branch_trials = 1
        stats.branch_matches = 1 if adversary.victim_labels_matched else 0
        if result.completed:
            recovered = adversary.recovered_mask_digits(config.d)
            actual = result.masks[scenario.target].values
            stats.mask_digits_possible = config.m
            stats.mask_digits_recovered = sum(
                1 for j, digit in recovered.items() if digit == actual[j]
            )
    return stats


def _run_trial_chunk(args: tuple[AttackScenario, ProtocolConfig, int, int]) -> _TrialStats:
    scenario, config, start, stop = args
    stats = _TrialStats()
    for trial in range(start, stop):
        stats.merge(_run_one_trial(scenario, config, trial))
    return stats


def binomial_confidence(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Normal-approximation confidence interval for a binomial proportion."""
    if trials < 1:
        raise ProtocolError("trials must be >= 1")
    p = successes / trials
    half = z * math.sqrt(p * (1.0 - p) / trials)
    return (max(0.0, p - half), min(1.0, p + half))


def two_proportion_z(x1: int, n1: int, x2: int, n2: int) -> tuple[float, float]:
    """Pooled two-proportion z statistic and two-sided p-value."""
    from scipy.stats import norm

    p1, p2 = x1 / n1, x2 / n2
    pooled = (x1 + x2) / (n1 + n2)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    if se == 0.0:
        return 0.0, 1.0
    z = (p1 - p2) / se
    return z, 2.0 * float(norm.sf(abs(z)))


def _knowledge_summary(scenario: AttackScenario, config: ProtocolConfig, stats: _TrialStats) -> str:
    d = config.d
    if scenario.kind == KIND_INTERCEPT_RESEND:
        return (
            f"no privacy digit determined: padded digits travel on the authenticated "
            f"channel, and without the collapse value every mask digit keeps {d} candidates"
        )
    if scenario.kind == KIND_DISHONEST_PARTICIPANT:
        rate = (
            stats.mask_digits_recovered / stats.mask_digits_possible
            if stats.mask_digits_possible
            else 0.0
        )
        return (
            f"branch values learned from own carriers; {rate:.3f} of the victim's mask "
            f"digits pinned down on undetected runs, but each privacy digit keeps {d} "
            f"candidates because the padded digits stay on the authenticated channel"
        )
    return (
        f"every pairwise privacy difference determined exactly; each isolated privacy "
        f"digit keeps {d} candidates, one per possible collapse value"
    )


def estimate_detection_probability(scenario: AttackScenario, config: ProtocolConfig) -> AttackReport:
    """Run the scenario repeatedly with independent derived seeds and aggregate.

    Trials are independent; with ``workers`` > 1 they are split into contiguous
    chunks over a process pool.  Per-trial seeds depend only on the scenario
    seed and the trial index, so the worker count never changes the result.
    """
    if scenario.kind != KIND_SEMI_HONEST_TP and scenario.target >= config.k:
        raise ProtocolError(f"target {scenario.target} out of range for k={config.k}")
    if scenario.kind == KIND_DISHONEST_PARTICIPANT:
        attacker = scenario.attacker if scenario.attacker is not None else (scenario.target + 1) % config.k
        if attacker >= config.k:
            raise ProtocolError(f"attacker {attacker} out of range for k={config.k}")
    trials = scenario.trials
    workers = scenario.workers
    if workers is None:
        workers = min(os.cpu_count() or 1, _MAX_DEFAULT_WORKERS)
    workers = max(1, min(workers, trials))

    totals = _TrialStats()
    if workers == 1 or trials < 512:
        for trial in range(trials):
            totals.merge(_run_one_trial(scenario, config, trial))
    else:
        bounds = np.linspace(0, trials, workers + 1, dtype=int)
        chunks = [
            (scenario, config, int(bounds[w]), int(bounds[w + 1]))
            for w in range(workers)
            if bounds[w] < bounds[w + 1]
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for stats in pool.map(_run_trial_chunk, chunks):
                totals.merge(stats)

    detection_rate = totals.detected / trials
    ci_low, ci_high = binomial_confidence(totals.detected, trials)
    n_checked = config.decoys_per_sequence
    variant_escape = ((config.d - 1) / (2 * config.d)) ** n_checked
    predicted_escape = ((config.d + 1) / (2 * config.d)) ** n_checked
    per_decoy = (
        totals.tampered_mismatches / totals.tampered_checked if totals.tampered_checked else 0.0
    )
    return AttackReport(
        kind=scenario.kind,
        trials=trials,
        detections=totals.detected,
        completed_undetected=trials - totals.detected,
        integrity_failures=totals.integrity_failures,
        per_decoy_error_rate=per_decoy,
        detection_rate=detection_rate,
        ci_low=ci_low,
        ci_high=ci_high,
        decoys_checked_per_leg=n_checked,
        predicted_detection=1.0 - predicted_escape,
        variant_predicted_detection=1.0 - variant_escape,
        predicted_escape=predicted_escape,
        variant_predicted_escape=variant_escape,
        knowledge=_knowledge_summary(scenario, config, totals),
        branch_match_rate=(
            totals.branch_matches / totals.branch_trials if totals.branch_trials else None
        ),
        mask_digit_recovery_rate=(
            totals.mask_digits_recovered / totals.mask_digits_possible
            if totals.mask_digits_possible
            else None
        ),
    )
