"""Attack-scenario tests: detection statistics, adversary knowledge, determinism."""

import numpy as np
import pytest
from scipy import stats

from qpcsim.adversary import (
    AttackScenario,
    DishonestParticipant,
    InterceptResendEve,
    binomial_confidence,
    estimate_detection_probability,
    semihonest_tp_analysis,
    two_proportion_z,
)
from qpcsim.protocol import (
    Carrier,
    DecoratedSequence,
    DecoySlot,
    ProtocolConfig,
    ProtocolError,
    PrivacyVector,
    StatePool,
    run_decoy_check,
    run_protocol,
)
from qpcsim.qudit import Basis, prepare_basis_state


def config_for(d=9, k=3, m=1, decoys=1, seed=0):
    return ProtocolConfig(d=d, k=k, m=m, decoys_per_sequence=decoys, seed=seed)


# ---------------------------------------------------------------------------
# Intercept-resend mechanics
# ---------------------------------------------------------------------------


def test_eve_guessing_right_basis_is_transparent():
    # Conditioning on the correct basis guess, the recheck never mismatches.
    d = 9
    rng = np.random.default_rng(17)
    for _ in range(300):
        value = int(rng.integers(d))
        basis = Basis.Z if rng.integers(2) == 0 else Basis.X
        pool = StatePool()
        key = pool.add(prepare_basis_state(d, value, basis))
        seq = DecoratedSequence([Carrier("decoy", key, 0)], [DecoySlot(0, basis, value)], "TP")
        outcome = pool.measure(seq.carriers[0], basis, rng)  # Eve guesses right
        seq.carriers[0] = pool.inject(d, outcome, basis)
        result = run_decoy_check(pool, seq, rng, threshold=0.0)
        assert result.mismatches == 0


def test_eve_wrong_basis_mismatch_rate():
    # Wrong-basis interception flips the recheck with probability (d-1)/d.
    d = 9
    rng = np.random.default_rng(23)
    mismatches = trials = 0
    for _ in range(3000):
        value = int(rng.integers(d))
        basis = Basis.Z if rng.integers(2) == 0 else Basis.X
        wrong = Basis.X if basis is Basis.Z else Basis.Z
        pool = StatePool()
        key = pool.add(prepare_basis_state(d, value, basis))
        seq = DecoratedSequence([Carrier("decoy", key, 0)], [DecoySlot(0, basis, value)], "TP")
        outcome = pool.measure(seq.carriers[0], wrong, rng)
        seq.carriers[0] = pool.inject(d, outcome, wrong)
        result = run_decoy_check(pool, seq, rng, threshold=0.0)
        mismatches += result.mismatches
        trials += 1
    assert mismatches / trials == pytest.approx((d - 1) / d, abs=0.03)


def test_eve_targets_only_requested_leg():
    config = config_for(decoys=2, m=2)
    rng = np.random.default_rng(3)
    privacies = [PrivacyVector(i, (1, 0)) for i in range(3)]
    eve = InterceptResendEve(np.random.default_rng(4), target=1, legs=("distribute",))
    run_protocol(config, privacies, adversary=eve, rng=rng)
    assert eve.log
    assert all(entry[0] == "distribute" for entry in eve.log)


# ---------------------------------------------------------------------------
# Detection-probability estimation
# ---------------------------------------------------------------------------


def test_zero_decoys_never_detected():
    report = estimate_detection_probability(
        AttackScenario(kind="intercept-resend", trials=200, seed=1, workers=1),
        config_for(decoys=0),
    )
    assert report.detections == 0
    assert report.detection_rate == 0.0
    assert report.completed_undetected == 200


def test_single_decoy_detection_rate_matches_derived_formula():
    report = estimate_detection_probability(
        AttackScenario(kind="intercept-resend", trials=3000, seed=12, workers=1),
        config_for(decoys=1),
    )
    assert report.detection_rate == pytest.approx(4 / 9, abs=0.03)
    assert report.per_decoy_error_rate == pytest.approx(4 / 9, abs=0.03)
    assert report.predicted_detection == pytest.approx(4 / 9)
    assert report.variant_predicted_detection == pytest.approx(5 / 9)
    assert report.detections + report.completed_undetected == report.trials


def test_multi_decoy_independence():
    # Joint escape over n decoys should match the per-decoy escape to the n.
    n = 4
    report = estimate_detection_probability(
        AttackScenario(kind="intercept-resend", trials=3000, seed=21, workers=1),
        config_for(decoys=n),
    )
    per_decoy_escape = 1 - report.per_decoy_error_rate
    expected_escape = per_decoy_escape**n
    escape = 1 - report.detection_rate
    sigma = np.sqrt(expected_escape * (1 - expected_escape) / report.trials)
    assert abs(escape - expected_escape) < 4 * sigma + 0.01


def test_confidence_interval_narrows_with_trials():
    small = estimate_detection_probability(
        AttackScenario(kind="intercept-resend", trials=400, seed=31, workers=1),
        config_for(decoys=1),
    )
    large = estimate_detection_probability(
        AttackScenario(kind="intercept-resend", trials=1600, seed=31, workers=1),
        config_for(decoys=1),
    )
    ratio = (large.ci_high - large.ci_low) / (small.ci_high - small.ci_low)
    assert 0.35 <= ratio <= 0.7  # expected 1/2 for a 4x trial increase


def test_trials_one_degenerate_interval():
    report = estimate_detection_probability(
        AttackScenario(kind="intercept-resend", trials=1, seed=2, workers=1),
        config_for(decoys=1),
    )
    assert report.trials == 1
    assert report.ci_low in (0.0, 1.0) or report.ci_high in (0.0, 1.0)


def test_scenario_validation():
    with pytest.raises(ProtocolError):
        AttackScenario(kind="quantum-cloning", trials=10)
    with pytest.raises(ProtocolError):
        AttackScenario(kind="intercept-resend", trials=0)
    with pytest.raises(ProtocolError):
        AttackScenario(kind="intercept-resend", legs=("sideways",))
    with pytest.raises(ProtocolError):
        estimate_detection_probability(
            AttackScenario(kind="intercept-resend", target=5, trials=1), config_for()
        )


def test_report_determinism_and_worker_independence():
    scenario_args = dict(kind="intercept-resend", trials=800, seed=77)
    config = config_for(decoys=2)
    serial = estimate_detection_probability(AttackScenario(workers=1, **scenario_args), config)
    again = estimate_detection_probability(AttackScenario(workers=1, **scenario_args), config)
    parallel = estimate_detection_probability(AttackScenario(workers=3, **scenario_args), config)
    assert serial == again
    assert serial == parallel


# ---------------------------------------------------------------------------
# Dishonest participant
# ---------------------------------------------------------------------------


def test_dishonest_branch_measurements_match_victim_labels():
    report = estimate_detection_probability(
        AttackScenario(kind="dishonest-participant", target=2, attacker=0, trials=400, seed=13, workers=1),
        config_for(decoys=1, m=2),
    )
    assert report.branch_match_rate == 1.0


def test_dishonest_detection_statistics_match_external_eve():
    config = config_for(decoys=1)
    external = estimate_detection_probability(
        AttackScenario(kind="intercept-resend", target=2, trials=4000, seed=41, workers=1), config
    )
    internal = estimate_detection_probability(
        AttackScenario(kind="dishonest-participant", target=2, attacker=0, trials=4000, seed=42, workers=1),
        config,
    )
    _, p_value = two_proportion_z(
        external.detections, external.trials, internal.detections, internal.trials
    )
    assert p_value > 0.01


def test_dishonest_recovers_mask_digits_only_with_z_basis():
    # On undetected runs the attacker pins down exactly the digits measured in
    # Z; recovered digits must equal the victim's true mask digits.
    config = config_for(decoys=1, m=3)
    rng = np.random.default_rng(8)
    hits = total = 0
    for seed in range(250):
        adversary = DishonestParticipant(np.random.default_rng(seed), attacker=0, victim=2)
        privacies = [PrivacyVector(i, (1, 0, 2)) for i in range(3)]
        result = run_protocol(config, privacies, adversary=adversary, rng=np.random.default_rng(seed + 10_000))
        if not result.completed:
            continue
        recovered = adversary.recovered_mask_digits(config.d)
        actual = result.masks[2].values
        for j, digit in recovered.items():
            assert digit == actual[j]
            hits += 1
        total += config.m
    assert total > 0
    # Z is guessed for about half of the carrier slots.
    assert hits / total == pytest.approx(0.5, abs=0.12)
    del rng


def test_dishonest_privacy_candidates_stay_full():
    # The padded digits never leave the authenticated channel.  Enumerating
    # the attacker's unknowns (mask digit, padded digit), every privacy digit
    # stays possible: d candidates without the intercept leg, and still d
    # even when the intercept pinned the mask digit down exactly.
    d = 9
    without_intercept = {
        (padded + mask) % d for padded in range(d) for mask in range(d)
    }
    assert len(without_intercept) == d
    for known_mask in range(d):
        with_intercept = {(padded + known_mask) % d for padded in range(d)}
        assert len(with_intercept) == d


def test_attacker_must_differ_from_victim():
    with pytest.raises(ProtocolError):
        DishonestParticipant(np.random.default_rng(0), attacker=1, victim=1)


# ---------------------------------------------------------------------------
# Semi-honest TP
# ---------------------------------------------------------------------------


def test_semihonest_tp_candidate_sets_and_differences():
    config = config_for(d=5, k=3, m=2, decoys=1)
    privacies = [PrivacyVector(0, (1, 2)), PrivacyVector(1, (0, 2)), PrivacyVector(2, (2, 1))]
    result = run_protocol(config, privacies, rng=np.random.default_rng(6))
    knowledge = semihonest_tp_analysis(
        [rec.values for rec in result.measurements],
        [enc.values for enc in result.encrypted],
        config.d,
    )
    for i in range(3):
        for j in range(2):
            assert knowledge.candidate_size(i, j) == config.d
            # The true digit is always among the candidates.
            assert privacies[i].values[j] in knowledge.candidate_sets[(i, j)]
    for i in range(3):
        for i2 in range(i + 1, 3):
            for j in range(2):
                expected = (privacies[i].values[j] - privacies[i2].values[j]) % config.d
                assert knowledge.pairwise_differences[(i, i2, j)] == expected


def test_semihonest_tp_single_party_view():
    # Degenerate one-party view: a single masked value still has d candidates.
    knowledge = semihonest_tp_analysis([(3,)], [(2,)], 7)
    assert knowledge.candidate_size(0, 0) == 7
    assert knowledge.pairwise_differences == {}


def test_semihonest_scenario_reports_no_detections():
    report = estimate_detection_probability(
        AttackScenario(kind="semi-honest-tp", trials=50, seed=5, workers=1),
        config_for(d=5, decoys=1),
    )
    assert report.detections == 0
    assert report.completed_undetected == 50
    assert "pairwise" in report.knowledge


# ---------------------------------------------------------------------------
# Statistics helpers
# ---------------------------------------------------------------------------


def test_binomial_confidence_against_direct_formula():
    low, high = binomial_confidence(40, 100)
    p = 0.4
    half = 1.96 * np.sqrt(p * (1 - p) / 100)
    assert low == pytest.approx(p - half)
    assert high == pytest.approx(p + half)


def test_two_proportion_z_against_scipy_chi2():
    # The pooled two-proportion z test squared equals the 2x2 chi-square
    # statistic without continuity correction.
    x1, n1, x2, n2 = 430, 1000, 470, 1000
    z, p_value = two_proportion_z(x1, n1, x2, n2)
    table = np.array([[x1, n1 - x1], [x2, n2 - x2]])
    chi2, chi2_p, _, _ = stats.chi2_contingency(table, correction=False)
    assert z**2 == pytest.approx(chi2)
    assert p_value == pytest.approx(chi2_p)
