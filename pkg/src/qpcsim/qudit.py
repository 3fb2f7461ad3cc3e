"""State-vector engine for systems of d-level qudits.

States are sparse maps from basis-index tuples to complex amplitudes.  The
states this package manipulates (GHZ states, their images under single-qudit
shift operators, single decoy qudits) keep at most d nonzero amplitudes per
entangled register, so the sparse form scales with d rather than d**n.  A
dense vector fallback covers generic states.

All operations are pure functions; randomness is threaded explicitly through
a ``numpy.random.Generator`` so identical seeds give identical outcome
sequences.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# Hard limit on the dense size d**n of any constructed state.
DENSE_SIZE_CAP = 10**6
# Tolerance for algebraic identities (unitarity, normalization, phase checks).
ALGEBRA_TOL = 1e-10
# Amplitudes with modulus below this are treated as exact zeros.
_PRUNE_TOL = 1e-14


class EngineError(Exception):
    """Invalid engine input or an operation that is quantum-mechanically impossible."""


class Basis(Enum):
    """Preparation/measurement basis: computational (Z) or its Fourier image (X)."""

    Z = "Z"
    X = "X"


@dataclass(frozen=True, slots=True)
class QuditState:
    """Normalized pure state of ``subsystems`` qudits with ``dim`` levels each.

    ``amps`` stores only nonzero amplitudes, keyed by basis-index tuples of
    length ``subsystems`` with entries in ``0..dim-1``.
    """

    dim: int
    subsystems: int
    amps: dict[tuple[int, ...], complex]

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise EngineError(f"qudit dimension must be >= 2, got {self.dim}")
        if self.subsystems < 1:
            raise EngineError(f"subsystem count must be >= 1, got {self.subsystems}")
        if self.dim**self.subsystems > DENSE_SIZE_CAP:
            raise EngineError(
                f"dense size {self.dim}**{self.subsystems} exceeds the "
                f"{DENSE_SIZE_CAP}-amplitude cap"
            )
        norm_sq = 0.0
        for idx, amp in self.amps.items():
            if len(idx) != self.subsystems:
                raise EngineError(f"index tuple {idx} has wrong length for n={self.subsystems}")
            for v in idx:
                if not 0 <= v < self.dim:
                    raise EngineError(f"index tuple {idx} has entry outside 0..{self.dim - 1}")
            norm_sq += abs(amp) ** 2
        if abs(norm_sq - 1.0) > ALGEBRA_TOL:
            raise EngineError(f"squared amplitude moduli sum to {norm_sq}, not 1")

    def dense(self) -> np.ndarray:
        """Dense amplitude vector in row-major (first subsystem slowest) order."""
        out = np.zeros(self.dim**self.subsystems, dtype=complex)
        for idx, amp in self.amps.items():
            flat = 0
            for v in idx:
                flat = flat * self.dim + v
            out[flat] = amp
        return out

    @staticmethod
    def from_dense(dim: int, subsystems: int, vector: np.ndarray) -> "QuditState":
        """Build a sparse state from a dense vector, dropping negligible entries."""
        vector = np.asarray(vector, dtype=complex)
        if vector.shape != (dim**subsystems,):
            raise EngineError(f"dense vector has shape {vector.shape}, expected ({dim**subsystems},)")
        amps: dict[tuple[int, ...], complex] = {}
        for flat in np.flatnonzero(np.abs(vector) > _PRUNE_TOL):
            idx, rem = [], int(flat)
            for _ in range(subsystems):
                idx.append(rem % dim)
                rem //= dim
            amps[tuple(reversed(idx))] = complex(vector[flat])
        return QuditState(dim, subsystems, amps)


@dataclass(frozen=True, slots=True)
class SingleQuditUnitary:
    """A d x d unitary acting on one qudit; unitarity is checked on construction."""

    dim: int
    entries: np.ndarray
    _columns: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.entries.shape != (self.dim, self.dim):
            raise EngineError(f"matrix shape {self.entries.shape} does not match dim {self.dim}")
        deviation = np.max(np.abs(self.entries @ self.entries.conj().T - np.eye(self.dim)))
        if deviation > ALGEBRA_TOL:
            raise EngineError(f"matrix is not unitary (max deviation {deviation:.3e})")
        self.entries.setflags(write=False)
        cols = tuple(
            tuple(
                (int(z), complex(self.entries[z, t]))
                for z in np.flatnonzero(np.abs(self.entries[:, t]) > _PRUNE_TOL)
            )
            for t in range(self.dim)
        )
        object.__setattr__(self, "_columns", cols)

    def dagger(self) -> "SingleQuditUnitary":
        return SingleQuditUnitary(self.dim, self.entries.conj().T.copy())


_qft_cache: dict[int, SingleQuditUnitary] = {}
_inverse_qft_cache: dict[int, SingleQuditUnitary] = {}
_shift_cache: dict[tuple[int, int], SingleQuditUnitary] = {}


def qft_matrix(d: int) -> SingleQuditUnitary:
    """Fourier transform on one qudit: entry (z, x) = exp(2*pi*i*x*z/d)/sqrt(d)."""
    if d < 2:
        raise EngineError(f"qudit dimension must be >= 2, got {d}")
    cached = _qft_cache.get(d)
    if cached is None:
        z, x = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        cached = SingleQuditUnitary(d, np.exp(2j * np.pi * x * z / d) / np.sqrt(d))
        _qft_cache[d] = cached
    return cached


def inverse_qft_matrix(d: int) -> SingleQuditUnitary:
    cached = _inverse_qft_cache.get(d)
    if cached is None:
        cached = qft_matrix(d).dagger()
        _inverse_qft_cache[d] = cached
    return cached


def shift_operator(d: int, r: int) -> SingleQuditUnitary:
    """Cyclic shift by r with a label-dependent phase.

    Maps |t> to exp(2*pi*i*t*((t+r) mod d)/d) |(t+r) mod d>, so every column
    has exactly one unit-modulus entry.
    """
    if d < 2:
        raise EngineError(f"qudit dimension must be >= 2, got {d}")
    if not 0 <= r < d:
        raise EngineError(f"shift amount {r} outside 0..{d - 1}")
    cached = _shift_cache.get((d, r))
    if cached is None:
        mat = np.zeros((d, d), dtype=complex)
        for t in range(d):
            mat[(t + r) % d, t] = cmath.exp(2j * cmath.pi * t * ((t + r) % d) / d)
        cached = SingleQuditUnitary(d, mat)
        _shift_cache[(d, r)] = cached
    return cached


def make_ghz(d: int, k: int) -> QuditState:
    """Equal superposition of the d all-identical index tuples over k qudits."""
    if d < 2:
        raise EngineError(f"qudit dimension must be >= 2, got {d}")
    if k < 1:
        raise EngineError(f"particle count must be >= 1, got {k}")
    amp = 1.0 / np.sqrt(d)
    return QuditState(d, k, {(c,) * k: complex(amp) for c in range(d)})


def prepare_basis_state(d: int, value: int, basis: Basis) -> QuditState:
    """Single qudit prepared as |value> (Z) or its Fourier image (X)."""
    if not 0 <= value < d:
        raise EngineError(f"basis value {value} outside 0..{d - 1}")
    if basis is Basis.Z:
        return QuditState(d, 1, {(value,): 1.0 + 0j})
    column = qft_matrix(d).entries[:, value]
    return QuditState(d, 1, {(z,): complex(column[z]) for z in range(d)})


def apply_single(state: QuditState, position: int, u: SingleQuditUnitary) -> QuditState:
    """Apply a single-qudit unitary to one subsystem of a state."""
    if u.dim != state.dim:
        raise EngineError(f"unitary dim {u.dim} does not match state dim {state.dim}")
    if not 0 <= position < state.subsystems:
        raise EngineError(f"position {position} outside 0..{state.subsystems - 1}")
    new_amps: dict[tuple[int, ...], complex] = {}
    cols = u._columns
    for idx, amp in state.amps.items():
        for z, weight in cols[idx[position]]:
            key = idx[:position] + (z,) + idx[position + 1 :]
            new_amps[key] = new_amps.get(key, 0j) + weight * amp
    pruned = {k: v for k, v in new_amps.items() if abs(v) > _PRUNE_TOL}
    return QuditState(state.dim, state.subsystems, pruned)


def born_probabilities(state: QuditState, position: int, basis: Basis) -> np.ndarray:
    """Outcome distribution for measuring one subsystem in the given basis."""
    if not 0 <= position < state.subsystems:
        raise EngineError(f"position {position} outside 0..{state.subsystems - 1}")
    work = state
    if basis is Basis.X:
        work = apply_single(state, position, inverse_qft_matrix(state.dim))
    probs = np.zeros(state.dim)
    for idx, amp in work.amps.items():
        probs[idx[position]] += abs(amp) ** 2
    return probs


def collapse_z(state: QuditState, position: int, outcome: int) -> QuditState:
    """Project one subsystem onto |outcome> and renormalize.

    Raises if the requested branch has (numerically) zero probability; a
    degenerate post-state always indicates a bug in the caller.
    """
    if not 0 <= outcome < state.dim:
        raise EngineError(f"outcome {outcome} outside 0..{state.dim - 1}")
    kept = {idx: amp for idx, amp in state.amps.items() if idx[position] == outcome}
    norm_sq = sum(abs(a) ** 2 for a in kept.values())
    if norm_sq < 1e-12:
        raise EngineError(
            f"projection of position {position} onto |{outcome}> leaves a zero-norm state"
        )
    scale = 1.0 / np.sqrt(norm_sq)
    return QuditState(state.dim, state.subsystems, {i: a * scale for i, a in kept.items()})


def measure(
    state: QuditState, position: int, basis: Basis, rng: np.random.Generator
) -> tuple[int, QuditState]:
    """Projective measurement of one subsystem.

    X-basis measurement rotates the subsystem by the inverse Fourier
    transform, measures in Z, and rotates the collapsed state back, which is
    identical to projecting onto the X-basis eigenstates.
    """
    d = state.dim
    work = state
    if basis is Basis.X:
        work = apply_single(state, position, inverse_qft_matrix(d))
    probs = np.zeros(d)
    for idx, amp in work.amps.items():
        probs[idx[position]] += abs(amp) ** 2
    draw = rng.random() * probs.sum()
    outcome = d - 1
    acc = 0.0
    for v in range(d):
        acc += probs[v]
        if draw < acc:
            outcome = v
            break
    post = collapse_z(work, position, outcome)
    if basis is Basis.X:
        post = apply_single(post, position, qft_matrix(d))
    return outcome, post


def equal_up_to_global_phase(a: QuditState, b: QuditState, tol: float = ALGEBRA_TOL) -> bool:
    """True iff a = exp(i*theta) * b for some real theta, within tol."""
    if a.dim != b.dim or a.subsystems != b.subsystems:
        raise EngineError("states have different shapes")
    overlap = 0j
    for idx, amp in a.amps.items():
        other = b.amps.get(idx)
        if other is not None:
            overlap += amp.conjugate() * other
    return abs(abs(overlap) - 1.0) <= tol


# ---------------------------------------------------------------------------
# Algebra audit
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ShiftCovarianceRecord:
    """Verdict for one (d, r, s): does the shift map the s-th X state to the (s+r)-th?"""

    dim: int
    shift: int
    value: int
    holds: bool


@dataclass(frozen=True, slots=True)
class AlgebraAuditResult:
    max_dim: int
    max_unitarity_deviation: float
    unitarity_ok: bool
    z_line_ok: bool
    x_records: tuple[ShiftCovarianceRecord, ...]

    @property
    def x_pass_count(self) -> int:
        return sum(1 for rec in self.x_records if rec.holds)

    def x_summary_by_dim(self) -> dict[int, tuple[int, int]]:
        """Map dim -> (passes, total) over the X-covariance records."""
        summary: dict[int, tuple[int, int]] = {}
        for rec in self.x_records:
            passes, total = summary.get(rec.dim, (0, 0))
            summary[rec.dim] = (passes + (1 if rec.holds else 0), total + 1)
        return summary


def run_algebra_audit(max_dim: int = 13) -> AlgebraAuditResult:
    """Exhaustively check the engine's operator algebra for every d <= max_dim.

    Checks unitarity of the Fourier and shift matrices, the Z-basis shift law
    (|s> maps to |(s+r) mod d> with phase exp(2*pi*i*s*((s+r) mod d)/d)), and
    whether the shift permutes X-basis states the same way.  The X-basis
    behaviour is recorded per (d, r, s) rather than assumed; nothing in the
    comparison protocol depends on it.
    """
    if max_dim < 2:
        raise EngineError(f"max_dim must be >= 2, got {max_dim}")
    max_dev = 0.0
    z_line_ok = True
    x_records: list[ShiftCovarianceRecord] = []
    for d in range(2, max_dim + 1):
        eye = np.eye(d)
        for u in [qft_matrix(d)] + [shift_operator(d, r) for r in range(d)]:
            max_dev = max(max_dev, float(np.max(np.abs(u.entries @ u.entries.conj().T - eye))))
        for r in range(d):
            shift = shift_operator(d, r)
            for s in range(d):
                shifted_z = apply_single(prepare_basis_state(d, s, Basis.Z), 0, shift)
                target_label = ((s + r) % d,)
                amp = shifted_z.amps.get(target_label)
                expected_phase = cmath.exp(2j * cmath.pi * s * ((s + r) % d) / d)
                if (
                    len(shifted_z.amps) != 1
                    or amp is None
                    or abs(amp - expected_phase) > ALGEBRA_TOL
                ):
                    z_line_ok = False
                shifted_x = apply_single(prepare_basis_state(d, s, Basis.X), 0, shift)
                target_x = prepare_basis_state(d, (s + r) % d, Basis.X)
                x_records.append(
                    ShiftCovarianceRecord(
                        d, r, s, equal_up_to_global_phase(shifted_x, target_x, ALGEBRA_TOL)
                    )
                )
    return AlgebraAuditResult(
        max_dim=max_dim,
        max_unitarity_deviation=max_dev,
        unitarity_ok=max_dev <= ALGEBRA_TOL,
        z_line_ok=z_line_ok,
        x_records=tuple(x_records),
    )
