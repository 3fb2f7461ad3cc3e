"""Six-step private size-comparison protocol over shared GHZ registers.

A preparing third party (TP) distributes one particle of each d-level GHZ
state to every participant, with decoy qudits guarding both transmission
directions.  Participants mask their carriers with random shift operators,
return them, and send their privacy digits one-time-padded with the same
masks over an authenticated classical channel.  TP's Z-basis measurements
plus the padded digits determine every pairwise difference (and nothing
more), from which per-index ordering chains are published.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cmp_to_key

import numpy as np

from .qudit import (
    Basis,
    QuditState,
    apply_single,
    collapse_z,
    make_ghz,
    measure,
    prepare_basis_state,
    shift_operator,
)

TP_NAME = "TP"


def participant_name(index: int) -> str:
    return f"P{index}"


class ProtocolError(Exception):
    """Invalid protocol input or misuse of the protocol machinery."""


class IntegrityError(ProtocolError):
    """Pairwise ordering evidence is internally inconsistent (tampering)."""


def mod_add(a: int, b: int, d: int) -> int:
    """(a + b) mod d, with both operands required to be valid digits."""
    _check_digit(a, d)
    _check_digit(b, d)
    return (a + b) % d


def mod_sub(a: int, b: int, d: int) -> int:
    """(a - b) mod d, with both operands required to be valid digits."""
    _check_digit(a, d)
    _check_digit(b, d)
    return (a - b) % d


def _check_digit(x: int, d: int) -> None:
    if not 0 <= x < d:
        raise ProtocolError(f"value {x} outside 0..{d - 1}")


def sign_function(x: int, l: int) -> int:
    """Map a mod-(2l+1) difference to its sign: 1..l -> 1, 0 -> 0, l+1..2l -> -1."""
    if not 0 <= x <= 2 * l:
        raise ProtocolError(f"value {x} outside 0..{2 * l}")
    if x == 0:
        return 0
    return 1 if x <= l else -1


@dataclass(frozen=True, slots=True)
class ProtocolConfig:
    """Parameters of one comparison session.

    ``d`` must be odd; privacy digits live in 0..l with l = (d-1)/2 so that
    mod-d differences never wrap ambiguously.  ``decoys_per_sequence`` guards
    each transmitted sequence in both directions (default: one decoy per
    carrier); 0 disables checking, as in the worked example runs.
    """

    d: int
    k: int
    m: int
    decoys_per_sequence: int | None = None
    detection_threshold: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.d < 3 or self.d % 2 == 0:
            raise ProtocolError(f"modulus must be odd and >= 3, got {self.d}")
        if self.k < 3:
            raise ProtocolError(f"participant count must be >= 3, got {self.k}")
        if self.m < 1:
            raise ProtocolError(f"privacy length must be >= 1, got {self.m}")
        if self.decoys_per_sequence is None:
            object.__setattr__(self, "decoys_per_sequence", self.m)
        if self.decoys_per_sequence < 0:
            raise ProtocolError(f"decoy count must be >= 0, got {self.decoys_per_sequence}")
        if not 0.0 <= self.detection_threshold <= 1.0:
            raise ProtocolError(f"detection threshold {self.detection_threshold} outside [0, 1]")

    @property
    def l(self) -> int:
        return (self.d - 1) // 2


@dataclass(frozen=True, slots=True)
class PrivacyVector:
    """One participant's m privacy digits, each in 0..l."""

    owner: int
    values: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class RandomMask:
    """One participant's m masking digits, each in 0..d-1."""

    owner: int
    values: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class MeasurementRecord:
    """TP's Z-basis outcomes for one participant's returned carriers."""

    owner: int
    values: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class EncryptedPrivacy:
    """Privacy digits one-time-padded by subtracting the mask mod d."""

    owner: int
    values: tuple[int, ...]


def participant_encrypt(privacy: PrivacyVector, mask: RandomMask, d: int) -> EncryptedPrivacy:
    if privacy.owner != mask.owner:
        raise ProtocolError(f"privacy owner {privacy.owner} != mask owner {mask.owner}")
    if len(privacy.values) != len(mask.values):
        raise ProtocolError("privacy and mask lengths differ")
    return EncryptedPrivacy(
        privacy.owner,
        tuple(mod_sub(p, r, d) for p, r in zip(privacy.values, mask.values)),
    )


# ---------------------------------------------------------------------------
# Carriers, pools, decorated sequences
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class Carrier:
    """Handle to one qudit: a subsystem of a pooled (possibly entangled) state."""

    kind: str  # "entangled" | "decoy" | "injected"
    state_key: int
    position: int


class StatePool:
    """Registry of live quantum states; operations replace states functionally."""

    def __init__(self) -> None:
        self._states: dict[int, QuditState] = {}
        self._next_key = 0

    def add(self, state: QuditState) -> int:
        key = self._next_key
        self._next_key += 1
        self._states[key] = state
        return key

    def get(self, key: int) -> QuditState:
        return self._states[key]

    def apply(self, carrier: Carrier, unitary) -> None:
        self._states[carrier.state_key] = apply_single(
            self._states[carrier.state_key], carrier.position, unitary
        )

    def measure(self, carrier: Carrier, basis: Basis, rng: np.random.Generator) -> int:
        outcome, post = measure(self._states[carrier.state_key], carrier.position, basis, rng)
        self._states[carrier.state_key] = post
        return outcome

    def collapse(self, carrier: Carrier, outcome: int) -> None:
        self._states[carrier.state_key] = collapse_z(
            self._states[carrier.state_key], carrier.position, outcome
        )

    def inject(self, d: int, value: int, basis: Basis) -> Carrier:
        """Add a freshly prepared single qudit (an eavesdropper's resend)."""
        key = self.add(prepare_basis_state(d, value, basis))
        return Carrier("injected", key, 0)


@dataclass(frozen=True, slots=True)
class DecoySlot:
    position: int
    basis: Basis
    value: int


@dataclass(slots=True)
class DecoratedSequence:
    """A transmitted carrier sequence with decoys spliced in at known slots."""

    carriers: list[Carrier]
    decoy_slots: list[DecoySlot]
    owner_claim: str

    def __post_init__(self) -> None:
        positions = [slot.position for slot in self.decoy_slots]
        if len(set(positions)) != len(positions):
            raise ProtocolError("decoy positions must be distinct")
        for slot in self.decoy_slots:
            if not 0 <= slot.position < len(self.carriers):
                raise ProtocolError(
                    f"decoy position {slot.position} outside sequence of length {len(self.carriers)}"
                )

    def carrier_slots(self) -> list[int]:
        """Slot indices of the payload carriers, in transmitted order."""
        decoy_positions = {slot.position for slot in self.decoy_slots}
        return [i for i in range(len(self.carriers)) if i not in decoy_positions]


def decorate_sequence(
    pool: StatePool,
    carriers: list[Carrier],
    config: ProtocolConfig,
    rng: np.random.Generator,
    owner: str,
) -> DecoratedSequence:
    """Insert freshly prepared decoys at random distinct slots of a sequence."""
    n_decoys = config.decoys_per_sequence
    total = len(carriers) + n_decoys
    positions = sorted(int(p) for p in rng.permutation(total)[:n_decoys])
    slots: list[DecoySlot] = []
    merged: list[Carrier] = []
    payload = iter(carriers)
    position_set = set(positions)
    for slot_index in range(total):
        if slot_index in position_set:
            value = int(rng.integers(config.d))
            basis = Basis.Z if rng.integers(2) == 0 else Basis.X
            key = pool.add(prepare_basis_state(config.d, value, basis))
            merged.append(Carrier("decoy", key, 0))
            slots.append(DecoySlot(slot_index, basis, value))
        else:
            merged.append(next(payload))
    return DecoratedSequence(merged, slots, owner)


@dataclass(frozen=True, slots=True)
class DecoyCheckResult:
    passed: bool
    error_rate: float
    mismatches: int
    checked: int
    stripped: tuple[Carrier, ...]
    outcomes: tuple[int, ...]


def run_decoy_check(
    pool: StatePool,
    seq: DecoratedSequence,
    rng: np.random.Generator,
    threshold: float,
) -> DecoyCheckResult:
    """Measure each announced decoy in its preparation basis and compare.

    The announcement (positions and bases) is taken from the sequence's decoy
    slots; the receiver measures, the sender compares against the prepared
    values.  Passing means the error rate does not exceed the threshold; with
    no decoys the check trivially passes at rate 0.
    """
    mismatches = 0
    outcomes: list[int] = []
    for slot in seq.decoy_slots:
        outcome = pool.measure(seq.carriers[slot.position], slot.basis, rng)
        outcomes.append(outcome)
        if outcome != slot.value:
            mismatches += 1
    checked = len(seq.decoy_slots)
    error_rate = mismatches / checked if checked else 0.0
    stripped = tuple(seq.carriers[i] for i in seq.carrier_slots())
    return DecoyCheckResult(
        passed=error_rate <= threshold,
        error_rate=error_rate,
        mismatches=mismatches,
        checked=checked,
        stripped=stripped,
        outcomes=tuple(outcomes),
    )


# ---------------------------------------------------------------------------
# Protocol steps
# ---------------------------------------------------------------------------


def tp_prepare(
    config: ProtocolConfig,
    rng: np.random.Generator,
    pool: StatePool | None = None,
) -> tuple[StatePool, list[DecoratedSequence]]:
    """Step 1: build m GHZ registers and split them into k decoy-guarded sequences."""
    if pool is None:
        pool = StatePool()
    ghz_keys = [pool.add(make_ghz(config.d, config.k)) for _ in range(config.m)]
    sequences = []
    for i in range(config.k):
        carriers = [Carrier("entangled", key, i) for key in ghz_keys]
        sequences.append(decorate_sequence(pool, carriers, config, rng, TP_NAME))
    return pool, sequences


def participant_encode(
    pool: StatePool, carriers: list[Carrier], mask: RandomMask, d: int
) -> list[Carrier]:
    """Step 3: apply the shift operator for each mask digit to its carrier."""
    if len(carriers) != len(mask.values):
        raise ProtocolError(f"carrier count {len(carriers)} != mask length {len(mask.values)}")
    for carrier, r in zip(carriers, mask.values):
        _check_digit(r, d)
        pool.apply(carrier, shift_operator(d, r))
    return carriers


def tp_measure_all(
    pool: StatePool,
    stripped_sequences: list[tuple[Carrier, ...]],
    rng: np.random.Generator,
) -> list[MeasurementRecord]:
    """Step 4: Z-measure every returned carrier, sequence by sequence."""
    records = []
    for owner, carriers in enumerate(stripped_sequences):
        values = tuple(pool.measure(carrier, Basis.Z, rng) for carrier in carriers)
        records.append(MeasurementRecord(owner, values))
    return records


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class RelationChain:
    """Participant indices in ascending privacy order, joined by '<' or '='."""

    order: tuple[int, ...]
    symbols: tuple[str, ...]

    def __str__(self) -> str:
        parts = [str(self.order[0])]
        for symbol, index in zip(self.symbols, self.order[1:]):
            parts.append(symbol)
            parts.append(str(index))
        return "".join(parts)


@dataclass(frozen=True, slots=True)
class ComparisonOutcome:
    """TP's comparison output: totals, pairwise signs, and per-index chains."""

    totals: tuple[tuple[int, ...], ...]
    pairwise_signs: dict[tuple[int, int, int], int]
    relations: tuple[RelationChain, ...]

    def to_records(self) -> list[str]:
        lines = []
        for j, chain in enumerate(self.relations):
            lines.append(f"relation.{j + 1}={chain}")
        for i, row in enumerate(self.totals):
            lines.append(f"total.{i}={','.join(str(v) for v in row)}")
        k = len(self.totals)
        m = len(self.relations)
        for i in range(k):
            for i2 in range(i + 1, k):
                signs = ",".join(str(self.pairwise_signs[(i, i2, j)]) for j in range(m))
                lines.append(f"sign.{i}.{i2}={signs}")
        return lines


def tp_compare(
    encrypted: list[EncryptedPrivacy],
    records: list[MeasurementRecord],
    config: ProtocolConfig,
) -> ComparisonOutcome:
    """Step 6: recover pairwise orderings from padded digits plus measurements.

    Raises IntegrityError if the pairwise signs cannot be realized by any
    single ordering, which is impossible in an honest run.
    """
    d, k, m, l = config.d, config.k, config.m, config.l
    if len(encrypted) != k or len(records) != k:
        raise ProtocolError("need one encrypted vector and one measurement record per participant")
    for enc, rec in zip(encrypted, records):
        if len(enc.values) != m or len(rec.values) != m:
            raise ProtocolError("encrypted/measurement lengths inconsistent with config")
    totals = tuple(
        tuple(mod_add(enc.values[j], rec.values[j], d) for j in range(m))
        for enc, rec in zip(encrypted, records)
    )
    signs: dict[tuple[int, int, int], int] = {}
    for i in range(k):
        for i2 in range(i + 1, k):
            for j in range(m):
                signs[(i, i2, j)] = sign_function(mod_sub(totals[i][j], totals[i2][j], d), l)

    def sign_of(a: int, b: int, j: int) -> int:
        return signs[(a, b, j)] if a < b else -signs[(b, a, j)]

    relations = []
    for j in range(m):

        def compare(a: int, b: int, j: int = j) -> int:
            s = sign_of(a, b, j)
            if s != 0:
                return s
            return a - b  # equal values listed by ascending index

        order = tuple(sorted(range(k), key=cmp_to_key(compare)))
        symbols = tuple(
            "=" if sign_of(order[pos], order[pos + 1], j) == 0 else "<"
            for pos in range(k - 1)
        )
        # The sorted chain must satisfy every pairwise sign, not just adjacent
        # ones; a failure here means the signs admit no consistent ordering.
        for pos_a in range(k):
            for pos_b in range(pos_a + 1, k):
                expected = -1 if "<" in symbols[pos_a:pos_b] else 0
                actual = sign_of(order[pos_a], order[pos_b], j)
                if actual != expected:
                    raise IntegrityError(
                        f"pairwise signs for index {j + 1} admit no consistent ordering "
                        f"(participants {order[pos_a]} and {order[pos_b]}: "
                        f"chain implies {expected}, sign is {actual})"
                    )
        relations.append(RelationChain(order, symbols))
    return ComparisonOutcome(totals, signs, tuple(relations))


# ---------------------------------------------------------------------------
# Transcript
# ---------------------------------------------------------------------------

STEP_PREPARATION = "1-preparation"
STEP_OUTBOUND_CHECK = "2-eavesdropping-check"
STEP_ENCODING = "3-encoding"
STEP_MEASUREMENT = "4-measurement"
STEP_PRIVACY = "5-privacy-transmission"
STEP_COMPARISON = "6-comparison"


@dataclass(frozen=True, slots=True)
class TranscriptEvent:
    step: str
    kind: str
    sender: str
    receiver: str
    payload: str
    digest: str

    def to_line(self) -> str:
        return "\t".join((self.step, self.kind, self.sender, self.receiver, self.payload, self.digest))


class Transcript:
    """Ordered log of every message exchanged during one run."""

    def __init__(self) -> None:
        self.events: list[TranscriptEvent] = []

    def record(self, step: str, kind: str, sender: str, receiver: str, payload: str) -> None:
        digest = hashlib.sha256(
            f"{step}|{kind}|{sender}|{receiver}|{payload}".encode()
        ).hexdigest()[:12]
        self.events.append(TranscriptEvent(step, kind, sender, receiver, payload, digest))

    def render(self) -> str:
        return "".join(event.to_line() + "\n" for event in self.events)


# ---------------------------------------------------------------------------
# Channel interposition (attack hook surface)
# ---------------------------------------------------------------------------

LEG_DISTRIBUTE = "distribute"
LEG_RETURN = "return"


class ChannelInterposer:
    """Base class for adversaries wired into the simulated channels.

    Subclasses override the hooks they need; the honest protocol calls them
    at the corresponding points and is otherwise unaware of the adversary.
    """

    def on_quantum_send(
        self,
        leg: str,
        sender: str,
        receiver: str,
        sequence: DecoratedSequence,
        pool: StatePool,
        config: ProtocolConfig,
    ) -> None:
        pass

    def on_participant_receive(
        self,
        index: int,
        carriers: tuple[Carrier, ...],
        pool: StatePool,
        config: ProtocolConfig,
    ) -> None:
        pass


# ---------------------------------------------------------------------------
# Full run
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class DecoyCheckSummary:
    step: str
    leg: str
    sequence_owner: int
    mismatches: int
    checked: int
    passed: bool


@dataclass(slots=True)
class RunResult:
    """Everything produced by one protocol run, aborted or complete."""

    config: ProtocolConfig
    completed: bool
    aborted: bool
    abort_step: str | None
    abort_reason: str | None
    outcome: ComparisonOutcome | None
    transcript: Transcript
    privacies: list[PrivacyVector]
    masks: list[RandomMask] | None
    measurements: list[MeasurementRecord] | None
    encrypted: list[EncryptedPrivacy] | None
    common_shifts: list[int] | None
    decoy_checks: list[DecoyCheckSummary] = field(default_factory=list)


def _validate_privacies(config: ProtocolConfig, privacies: list[PrivacyVector]) -> None:
    if len(privacies) != config.k:
        raise ProtocolError(f"expected {config.k} privacy vectors, got {len(privacies)}")
    for i, p in enumerate(privacies):
        if p.owner != i:
            raise ProtocolError(f"privacy vector {i} claims owner {p.owner}")
        if len(p.values) != config.m:
            raise ProtocolError(f"privacy vector {i} has length {len(p.values)}, expected {config.m}")
        for v in p.values:
            if not 0 <= v <= config.l:
                raise ProtocolError(
                    f"privacy value {v} of participant {i} outside 0..{config.l} "
                    f"(values must stay below half the modulus)"
                )


def run_protocol(
    config: ProtocolConfig,
    privacies: list[PrivacyVector],
    adversary: ChannelInterposer | None = None,
    forced_masks: list[RandomMask] | None = None,
    forced_collapse: list[int] | None = None,
    rng: np.random.Generator | None = None,
) -> RunResult:
    """Execute one full session; returns a completed or aborted RunResult.

    ``forced_masks`` and ``forced_collapse`` replace the corresponding random
    draws so that published worked examples can be reproduced exactly; forcing
    the collapse requires an honest run.
    """
    _validate_privacies(config, privacies)
    if forced_collapse is not None:
        if adversary is not None:
            raise ProtocolError("forced collapse outcomes require an honest run")
        if len(forced_collapse) != config.m:
            raise ProtocolError(f"forced collapse needs {config.m} values")
        for c in forced_collapse:
            _check_digit(c, config.d)
    if forced_masks is not None:
        if len(forced_masks) != config.k:
            raise ProtocolError(f"forced masks need {config.k} vectors")
        for i, mask in enumerate(forced_masks):
            if mask.owner != i or len(mask.values) != config.m:
                raise ProtocolError(f"forced mask {i} malformed")
            for r in mask.values:
                _check_digit(r, config.d)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    d, k, m = config.d, config.k, config.m
    transcript = Transcript()
    checks: list[DecoyCheckSummary] = []

    def abort(step: str, reason: str) -> RunResult:
        return RunResult(
            config=config,
            completed=False,
            aborted=True,
            abort_step=step,
            abort_reason=reason,
            outcome=None,
            transcript=transcript,
            privacies=privacies,
            masks=None,
            measurements=None,
            encrypted=None,
            common_shifts=None,
            decoy_checks=checks,
        )

    # Step 1: preparation and distribution.
    pool, sequences = tp_prepare(config, rng)
    for i, seq in enumerate(sequences):
        transcript.record(
            STEP_PREPARATION,
            "quantum-send",
            TP_NAME,
            participant_name(i),
            f"carriers={m} decoys={config.decoys_per_sequence}",
        )
        if adversary is not None:
            adversary.on_quantum_send(LEG_DISTRIBUTE, TP_NAME, participant_name(i), seq, pool, config)

    # Step 2: outbound eavesdropping check, then strip decoys.
    stripped: list[tuple[Carrier, ...]] = []
    for i, seq in enumerate(sequences):
        announcement = " ".join(f"{s.position}:{s.basis.value}" for s in seq.decoy_slots)
        transcript.record(
            STEP_OUTBOUND_CHECK, "basis-announcement", TP_NAME, participant_name(i),
            f"decoys=[{announcement}]",
        )
        result = run_decoy_check(pool, seq, rng, config.detection_threshold)
        transcript.record(
            STEP_OUTBOUND_CHECK, "classical-send", participant_name(i), TP_NAME,
            f"outcomes={','.join(str(o) for o in result.outcomes)}",
        )
        transcript.record(
            STEP_OUTBOUND_CHECK, "decoy-check-result", TP_NAME, participant_name(i),
            f"errors={result.mismatches}/{result.checked} pass={result.passed}",
        )
        checks.append(
            DecoyCheckSummary(
                STEP_OUTBOUND_CHECK, LEG_DISTRIBUTE, i, result.mismatches, result.checked, result.passed
            )
        )
        if not result.passed:
            return abort(
                STEP_OUTBOUND_CHECK,
                f"decoy mismatch rate {result.error_rate:.3f} on sequence for "
                f"{participant_name(i)} exceeds threshold {config.detection_threshold}",
            )
        stripped.append(result.stripped)
        if adversary is not None:
            adversary.on_participant_receive(i, result.stripped, pool, config)

    # Step 3: masking and return transmission.
    if forced_masks is not None:
        masks = list(forced_masks)
    else:
        masks = [
            RandomMask(i, tuple(int(v) for v in rng.integers(d, size=m))) for i in range(k)
        ]
    return_sequences: list[DecoratedSequence] = []
    for i in range(k):
        carriers = participant_encode(pool, list(stripped[i]), masks[i], d)
        seq = decorate_sequence(pool, carriers, config, rng, participant_name(i))
        return_sequences.append(seq)
        transcript.record(
            STEP_ENCODING, "quantum-send", participant_name(i), TP_NAME,
            f"carriers={m} decoys={config.decoys_per_sequence}",
        )
        if adversary is not None:
            adversary.on_quantum_send(LEG_RETURN, participant_name(i), TP_NAME, seq, pool, config)

    # Step 4: return-leg eavesdropping check, then Z measurement.
    returned: list[tuple[Carrier, ...]] = []
    for i, seq in enumerate(return_sequences):
        announcement = " ".join(f"{s.position}:{s.basis.value}" for s in seq.decoy_slots)
        transcript.record(
            STEP_MEASUREMENT, "basis-announcement", participant_name(i), TP_NAME,
            f"decoys=[{announcement}]",
        )
        result = run_decoy_check(pool, seq, rng, config.detection_threshold)
        transcript.record(
            STEP_MEASUREMENT, "classical-send", TP_NAME, participant_name(i),
            f"outcomes={','.join(str(o) for o in result.outcomes)}",
        )
        transcript.record(
            STEP_MEASUREMENT, "decoy-check-result", participant_name(i), TP_NAME,
            f"errors={result.mismatches}/{result.checked} pass={result.passed}",
        )
        checks.append(
            DecoyCheckSummary(
                STEP_MEASUREMENT, LEG_RETURN, i, result.mismatches, result.checked, result.passed
            )
        )
        if not result.passed:
            return abort(
                STEP_MEASUREMENT,
                f"decoy mismatch rate {result.error_rate:.3f} on returned sequence of "
                f"{participant_name(i)} exceeds threshold {config.detection_threshold}",
            )
        returned.append(result.stripped)
    if forced_collapse is not None:
        # Collapse each GHZ register onto the requested branch before the
        # measurement sweep; the first participant's carrier pins the branch.
        for j, c in enumerate(forced_collapse):
            pool.collapse(returned[0][j], mod_add(c, masks[0].values[j], d))
    records = tp_measure_all(pool, returned, rng)

    # Step 5: authenticated transmission of padded privacy digits.
    encrypted = []
    for i in range(k):
        enc = participant_encrypt(privacies[i], masks[i], d)
        encrypted.append(enc)
        transcript.record(
            STEP_PRIVACY, "classical-send", participant_name(i), TP_NAME,
            f"padded-digits={','.join(str(v) for v in enc.values)}",
        )

    # Step 6: comparison and publication.
    try:
        outcome = tp_compare(encrypted, records, config)
    except IntegrityError as exc:
        return abort(STEP_COMPARISON, str(exc))
    for j, chain in enumerate(outcome.relations):
        transcript.record(STEP_COMPARISON, "publication", TP_NAME, "ALL", f"R{j + 1}={chain}")

    shifts: list[int] | None = [mod_sub(records[0].values[j], masks[0].values[j], d) for j in range(m)]
    for i in range(1, k):
        for j in range(m):
            if mod_sub(records[i].values[j], masks[i].values[j], d) != shifts[j]:
                shifts = None
                break
        if shifts is None:
            break

    return RunResult(
        config=config,
        completed=True,
        aborted=False,
        abort_step=None,
        abort_reason=None,
        outcome=outcome,
        transcript=transcript,
        privacies=privacies,
        masks=masks,
        measurements=records,
        encrypted=encrypted,
        common_shifts=shifts,
        decoy_checks=checks,
    )
