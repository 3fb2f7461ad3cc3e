"""Simulator for a k-party private size-comparison protocol over d-level GHZ states."""

from .adversary import (
    AttackReport,
    AttackScenario,
    DishonestParticipant,
    InterceptResendEve,
    estimate_detection_probability,
    semihonest_tp_analysis,
)
from .analysis import EfficiencyInput, EfficiencyResult, build_report, efficiency
from .protocol import (
    ComparisonOutcome,
    IntegrityError,
    ProtocolConfig,
    ProtocolError,
    PrivacyVector,
    RandomMask,
    RunResult,
    run_protocol,
)
from .qudit import (
    Basis,
    EngineError,
    QuditState,
    SingleQuditUnitary,
    apply_single,
    equal_up_to_global_phase,
    make_ghz,
    measure,
    prepare_basis_state,
    qft_matrix,
    run_algebra_audit,
    shift_operator,
)

__version__ = "0.1.0"

__all__ = [
    "AttackReport",
    "AttackScenario",
    "Basis",
    "ComparisonOutcome",
    "DishonestParticipant",
    "EfficiencyInput",
    "EfficiencyResult",
    "EngineError",
    "IntegrityError",
    "InterceptResendEve",
    "ProtocolConfig",
    "ProtocolError",
    "PrivacyVector",
    "QuditState",
    "RandomMask",
    "RunResult",
    "SingleQuditUnitary",
    "apply_single",
    "build_report",
    "efficiency",
    "equal_up_to_global_phase",
    "estimate_detection_probability",
    "make_ghz",
    "measure",
    "prepare_basis_state",
    "qft_matrix",
    "run_algebra_audit",
    "run_protocol",
    "semihonest_tp_analysis",
    "shift_operator",
]
