"""Efficiency accounting and report assembly tests."""

from fractions import Fraction

import pytest

from qpcsim.adversary import AttackScenario, estimate_detection_probability
from qpcsim.analysis import (
    EfficiencyInput,
    build_report,
    efficiency,
    efficiency_csv,
    efficiency_rows,
    efficiency_text,
)
from qpcsim.protocol import ProtocolConfig, PrivacyVector, RandomMask, run_protocol
from qpcsim.qudit import run_algebra_audit

EXPECTED_ETA_DENOMINATOR = {
    "CTH2013": 3,
    "HHH2017": 8,
    "LYS2014": 3,
    "HHG2015": 6,
    "Ours": 3,
}


def test_ours_at_three_parties():
    result = efficiency(EfficiencyInput("Ours", 3, m=5))
    assert result.eta == Fraction(1, 9)
    assert result.c == 5
    assert result.q + result.b == 3 * 5 * 3  # q + b totals 3mk


def test_reference_protocol_values():
    assert efficiency(EfficiencyInput("HHH2017", 3)).eta == Fraction(1, 24)
    assert efficiency(EfficiencyInput("HHG2015", 4)).eta == Fraction(1, 24)
    assert efficiency(EfficiencyInput("LYS2014", 5)).eta == Fraction(1, 15)
    assert efficiency(EfficiencyInput("CTH2013", 3)).eta == Fraction(1, 9)


@pytest.mark.parametrize("k", range(3, 11))
@pytest.mark.parametrize("protocol_id", list(EXPECTED_ETA_DENOMINATOR))
def test_table_reproduction_exact(protocol_id, k):
    result = efficiency(EfficiencyInput(protocol_id, k))
    assert result.eta == Fraction(1, EXPECTED_ETA_DENOMINATOR[protocol_id] * k)
    assert result.eta == Fraction(result.c, result.q + result.b)


def test_eta_independent_of_privacy_length():
    for m in (1, 4, 16):
        assert efficiency(EfficiencyInput("Ours", 4, m)).eta == Fraction(1, 12)


def test_unknown_protocol_rejected():
    with pytest.raises(ValueError):
        efficiency(EfficiencyInput("XYZ2020", 3))
    with pytest.raises(ValueError):
        efficiency(EfficiencyInput("Ours", 2))


def test_csv_and_text_rendering():
    rows = efficiency_rows([3])
    csv = efficiency_csv(rows)
    assert csv.splitlines()[0] == "protocol,k,m,c,q,b,eta"
    assert "Ours,3,1,1,6,3,1/9" in csv
    text = efficiency_text(rows)
    assert "Ours" in text and "1/9" in text


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def golden_run():
    config = ProtocolConfig(d=9, k=3, m=2, decoys_per_sequence=0, seed=7)
    privacies = [PrivacyVector(0, (1, 4)), PrivacyVector(1, (2, 2)), PrivacyVector(2, (2, 3))]
    masks = [RandomMask(0, (4, 6)), RandomMask(1, (2, 5)), RandomMask(2, (6, 1))]
    return run_protocol(config, privacies, forced_masks=masks, forced_collapse=[0, 1])


def test_report_contains_golden_relations():
    report = build_report(run=golden_run())
    assert "R1: 0<1=2" in report
    assert "R2: 1<2<0" in report
    assert "totals P0: 1,5" in report


def test_report_omits_empty_attack_section():
    report = build_report(run=golden_run())
    assert "[attacks]" not in report


def test_report_byte_identical_for_identical_inputs():
    rows = efficiency_rows([3, 4])
    audit = run_algebra_audit(4)
    first = build_report(run=golden_run(), efficiency_rows_=rows, audit=audit)
    second = build_report(run=golden_run(), efficiency_rows_=rows, audit=audit)
    assert first == second


def test_report_requires_some_section():
    with pytest.raises(ValueError):
        build_report()


def test_report_records_format_parses_as_key_values():
    report = build_report(run=golden_run(), fmt="records")
    for line in report.strip().splitlines():
        key, _, value = line.partition("=")
        assert key and value


def test_report_includes_attack_and_audit_sections():
    config = ProtocolConfig(d=9, k=3, m=1, decoys_per_sequence=1, seed=0)
    attack = estimate_detection_probability(
        AttackScenario(kind="intercept-resend", trials=60, seed=1, workers=1), config
    )
    audit = run_algebra_audit(3)
    text = build_report(attacks=[attack], audit=audit)
    assert "[attacks]" in text and "intercept-resend" in text
    assert "[engine-audit]" in text and "x-basis shift covariance" in text
    records = build_report(attacks=[attack], audit=audit, fmt="records")
    assert "attack.trials=60" in records
    assert "audit.x_line.d3.r1.s2=" in records
