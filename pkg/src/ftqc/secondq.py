"""Second-quantized chemistry circuits and their resource estimates.

The electronic Hamiltonian in an orbital basis is a sum of one-body terms
h_pq a_p^dag a_q and two-body terms h_pqrs a_p^dag a_q^dag a_r a_s.  This
module ingests the integral tables (``load_integrals``/``apply_cutoff``),
maps each term to qubits with the Jordan-Wigner transform, and builds the
Trotter-step propagator circuits:

* ``excitation_operator_strings`` expands the hermitian generator of a
  term into commuting Pauli strings (symbolic ladder-operator algebra),
* ``build_excitation`` turns those strings into a circuit: basis changes
  into the Z basis (H for an X factor, H.S.H / H.S^dag.H around a Y
  factor), a CNOT parity ladder, one phase rotation on the parity wire,
  and the mirror image.  The controlled variant used in phase estimation
  realizes every rotation through an AND ancilla (two Toffolis around a
  plain rotation, ancilla restored to |0>) so only single-qubit rotations
  ever need synthesis,
* ``build_jw_ladder`` provides the parity ladder either directly (depth
  span-1) or teleported to constant depth: one Bell pair per interior
  wire lets all ladder CNOTs run in a single layer, and the Bell-state
  measurements relocate each interior wire onto its Bell half with Pauli
  corrections that ride the classical frame.

``estimate_second_quantized`` prices a full phase-estimation run (2^n - 1
controlled Trotter steps for n readout bits) without simulating it, using
per-method rotation cost models; ``rotation_profile`` documents those
models.  Gate-level circuits stay exactly verifiable on the statevector
simulator; the estimator is pure arithmetic over term structure.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import NamedTuple

from .core import (
    H,
    S,
    SDG,
    Circuit,
    CircuitBuilder,
    ResourceProfile,
    cnot,
    frame_update,
    gate,
    measure,
    rz,
    rz_matrix,
    toffoli,
)
from .kickback import RIPPLE_CARRY, AdderSpec, build_adder
from .par import register_bits_for
from .qvr import ROTATION_EXACT, ROTATION_SEQUENCE
from .synth import min_sequence, synthesize

TWO_PI = 2.0 * math.pi

# Rotation methods priced by the estimator.  The first two also exist at
# gate level (build_excitation); kickback and PAR circuits live in their
# own modules and enter here through cost models only.
METHOD_KICKBACK = "kickback"
METHOD_SEQUENCE = "sequence"
METHOD_SK = "sk"
METHOD_PAR = "par"
METHODS = (METHOD_KICKBACK, METHOD_SEQUENCE, METHOD_SK, METHOD_PAR)

LADDER_DIRECT = "direct"
LADDER_TELEPORTED = "teleported"

HERMITICITY_TOL = 1e-12


# ---------------------------------------------------------------------------
# Integral terms and tables


@dataclass(frozen=True)
class OneBodyTerm:
    """h_pq entry; generates h (a_p^dag a_q + a_q^dag a_p), or h n_p on the
    diagonal (the number operator is its own hermitian conjugate)."""

    p: int
    q: int
    value: float

    def __post_init__(self) -> None:
        if min(self.p, self.q) < 0:
            raise ValueError("orbital indices must be non-negative")

    @property
    def indices(self) -> tuple[int, ...]:
        return (self.p, self.q)


@dataclass(frozen=True)
class TwoBodyTerm:
    """h_pqrs entry; generates h (a_p^dag a_q^dag a_r a_s + h.c.), without
    doubling when the operator is already self-adjoint (s=p, r=q)."""

    p: int
    q: int
    r: int
    s: int
    value: float

    def __post_init__(self) -> None:
        if min(self.indices) < 0:
            raise ValueError("orbital indices must be non-negative")

    @property
    def indices(self) -> tuple[int, ...]:
        return (self.p, self.q, self.r, self.s)


Term = OneBodyTerm | TwoBodyTerm


@dataclass(frozen=True)
class IntegralTable:
    """Molecular integrals over n_orbitals spin-orbitals, atomic units.

    Hermiticity is enforced where both partners appear: h_pq must equal
    h_qp (real values) within 1e-12, and h_pqrs must equal h_srqp.  A
    repeated entry with a conflicting value is rejected the same way.
    """

    n_orbitals: int
    one_body: tuple[OneBodyTerm, ...] = ()
    two_body: tuple[TwoBodyTerm, ...] = ()

    def __post_init__(self) -> None:
        if self.n_orbitals < 0:
            raise ValueError("orbital count must be non-negative")
        for t in self.one_body + self.two_body:
            if max(t.indices) >= self.n_orbitals:
                raise ValueError(
                    f"term {t.indices} outside register of {self.n_orbitals} orbitals"
                )
        seen: dict[tuple[int, ...], float] = {}
        for t in self.one_body:
            self._check_pair(seen, (t.p, t.q), (t.q, t.p), t.value, "one-body")
        seen = {}
        for t in self.two_body:
            self._check_pair(
                seen, (t.p, t.q, t.r, t.s), (t.s, t.r, t.q, t.p), t.value, "two-body"
            )

    @staticmethod
    def _check_pair(seen, key, partner, value, kind) -> None:
        for other in (key, partner):
            if other in seen and abs(seen[other] - value) > HERMITICITY_TOL:
                raise ValueError(
                    f"{kind} block not hermitian: {key} -> {value!r} conflicts "
                    f"with {other} -> {seen[other]!r}"
                )
        seen[key] = value

    @property
    def n_terms(self) -> int:
        return len(self.one_body) + len(self.two_body)

    def terms(self) -> tuple[Term, ...]:
        return self.one_body + self.two_body

    def sorted_terms(self) -> tuple[Term, ...]:
        """Deterministic Trotter ordering: |h| descending, then indices."""
        return tuple(sorted(self.terms(), key=lambda t: (-abs(t.value), t.indices)))


def load_integrals(source) -> IntegralTable:
    """Parse a plain-text integral file into a table.

    Lines are ``p q value`` (one-body) or ``p q r s value`` (two-body)
    with 1-based orbital indices, ``#`` starting a comment; anything else
    is an error reported with its line number.  The orbital count is the
    largest index seen.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(os.fspath(source), "r", encoding="utf-8") as fh:
            text = fh.read()
    one: list[OneBodyTerm] = []
    two: list[TwoBodyTerm] = []
    top = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (3, 5):
            raise ValueError(
                f"line {lineno}: expected 'p q value' or 'p q r s value', "
                f"got {len(parts)} fields"
            )
        try:
            indices = [int(tok) for tok in parts[:-1]]
            value = float(parts[-1])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if min(indices) < 1:
            raise ValueError(f"line {lineno}: orbital indices are 1-based")
        top = max(top, max(indices))
        if len(parts) == 3:
            one.append(OneBodyTerm(indices[0] - 1, indices[1] - 1, value))
        else:
            two.append(TwoBodyTerm(*(i - 1 for i in indices), value))
    return IntegralTable(top, tuple(one), tuple(two))


@dataclass(frozen=True)
class CutoffReport:
    """What a cutoff kept, plus a retained-count curve for plotting."""

    threshold: float
    retained: int
    dropped: int
    curve: tuple[tuple[float, int], ...]  # (threshold, retained) descending


def apply_cutoff(table: IntegralTable, threshold: float) -> tuple[IntegralTable, CutoffReport]:
    """Drop every term with |value| <= threshold.

    The report's curve samples the retained count at decade thresholds
    10^0 .. 10^-16 so the falloff can be plotted without recomputing.
    """
    if not threshold >= 0:
        raise ValueError("cutoff threshold must be non-negative")
    values = [abs(t.value) for t in table.terms()]
    curve = tuple(
        (10.0**e, sum(1 for v in values if v > 10.0**e)) for e in range(0, -17, -1)
    )
    kept = IntegralTable(
        table.n_orbitals,
        tuple(t for t in table.one_body if abs(t.value) > threshold),
        tuple(t for t in table.two_body if abs(t.value) > threshold),
    )
    report = CutoffReport(
        threshold=threshold,
        retained=kept.n_terms,
        dropped=table.n_terms - kept.n_terms,
        curve=curve,
    )
    return kept, report


# ---------------------------------------------------------------------------
# Jordan-Wigner expansion
#
# Modes map to qubits in register order with a_j = (prod_{k<j} Z_k) (X_j +
# iY_j)/2, so qubit j's |1> marks an occupied orbital j and the Z chain
# carries the fermionic sign.  Strings are kept sparse ({qubit: letter})
# and multiplied with the single-qubit Pauli phase table.

_PAULI_MUL = {
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}


def _mul_strings(c1, s1, c2, s2):
    coeff = c1 * c2
    out = dict(s1)
    for q, letter in s2.items():
        have = out.pop(q, None)
        if have is None:
            out[q] = letter
        elif have != letter:
            phase, combined = _PAULI_MUL[(have, letter)]
            coeff *= phase
            out[q] = combined
        # have == letter: squares to identity, qubit drops out
    return coeff, out


def _mode_factors(j: int, dagger: bool):
    chain = {k: "Z" for k in range(j)}
    return [
        (0.5, {**chain, j: "X"}),
        (-0.5j if dagger else 0.5j, {**chain, j: "Y"}),
    ]


def _expand(mode_ops) -> list:
    """Pauli expansion of a product of ladder operators [(index, dagger)]."""
    strings = [(1.0 + 0.0j, {})]
    for j, dagger in mode_ops:
        grown = []
        for c1, s1 in strings:
            for c2, s2 in _mode_factors(j, dagger):
                grown.append(_mul_strings(c1, s1, c2, s2))
        collected: dict[tuple, complex] = {}
        for c, s in grown:
            key = tuple(sorted(s.items()))
            collected[key] = collected.get(key, 0.0j) + c
        strings = [
            (c, dict(key)) for key, c in collected.items() if abs(c) > 1e-15
        ]
    return strings


class PauliString(NamedTuple):
    """One term coeff * P of a hermitian Pauli-sum generator."""

    coeff: float
    ops: tuple[tuple[int, str], ...]  # (qubit, letter) ascending


def excitation_operator_strings(
    term: Term, n_orbitals: int | None = None
) -> tuple[PauliString, ...]:
    """Jordan-Wigner Pauli expansion of a term's hermitian generator A.

    One-body off-diagonal: A = h (a_p^dag a_q + a_q^dag a_p); diagonal:
    A = h a_p^dag a_p.  Two-body: A = h (a_p^dag a_q^dag a_r a_s + h.c.),
    with the conjugate omitted when the operator is already self-adjoint
    (s=p and r=q).  All returned coefficients are real and the strings of
    one term pairwise commute, so exp(-iA dt) factors exactly into one
    rotation per string.  A string with empty ops is a global phase.
    """
    if n_orbitals is not None and max(term.indices) >= n_orbitals:
        raise ValueError(
            f"term {term.indices} outside register of {n_orbitals} orbitals"
        )
    if isinstance(term, OneBodyTerm):
        ops = [(term.p, True), (term.q, False)]
        conj = [(term.q, True), (term.p, False)]
        self_adjoint = term.p == term.q
    else:
        ops = [(term.p, True), (term.q, True), (term.r, False), (term.s, False)]
        conj = [(term.s, True), (term.r, True), (term.q, False), (term.p, False)]
        self_adjoint = term.s == term.p and term.r == term.q
    expansion = _expand(ops)
    if not self_adjoint:
        expansion = expansion + _expand(conj)
    collected: dict[tuple, complex] = {}
    for c, s in expansion:
        key = tuple(sorted(s.items()))
        collected[key] = collected.get(key, 0.0j) + c * term.value
    out = []
    for key, c in sorted(collected.items()):
        if abs(c) <= 1e-15 * max(1.0, abs(term.value)):
            continue
        if abs(c.imag) > 1e-12 * max(1.0, abs(c)):
            raise ValueError(f"expansion of {term} is not hermitian: {key} -> {c}")
        out.append(PauliString(float(c.real), key))
    return tuple(out)


# ---------------------------------------------------------------------------
# Excitation circuits

_BASIS_PRE = {"X": (H,), "Y": (H, S, H)}  # into the Z basis
_BASIS_POST = {"X": (H,), "Y": (H, SDG, H)}  # and back


def _emit_rotation(builder, theta, wire, method, epsilon) -> None:
    theta %= TWO_PI
    if theta == 0.0:
        return
    if method == ROTATION_EXACT:
        builder.append(rz(theta, wire))
    elif method == ROTATION_SEQUENCE:
        builder.extend(synthesize(rz_matrix(theta), epsilon).to_gates(wire))
    else:
        raise ValueError(
            f"gate-level rotations are {ROTATION_EXACT!r} or {ROTATION_SEQUENCE!r}, "
            f"got {method!r}; kickback and PAR enter estimates as cost models"
        )


def build_excitation(
    term: Term,
    dt: float,
    *,
    n_orbitals: int | None = None,
    method: str = ROTATION_EXACT,
    epsilon: float = 1e-4,
    controlled: bool = False,
) -> Circuit:
    """Propagator exp(-i A dt) for one integral term, string by string.

    Each Pauli string becomes basis changes + CNOT parity ladder + one
    rotation of angle 2 c dt on the parity wire + mirror; for one-body
    off-diagonal terms that rotation angle is exactly h dt.  The plain
    circuit realizes the propagator up to a global phase.  With
    controlled=True (wire layout: orbitals, control, AND ancilla) each
    rotation is wrapped in two Toffolis against a |0> ancilla so the
    phase lands only when the control is set, and the accumulated global
    phase is repaid by one extra rotation on the control itself, making
    the block exactly diag(I, exp(-i A dt)).
    """
    if n_orbitals is None:
        n_orbitals = max(term.indices) + 1
    strings = excitation_operator_strings(term, n_orbitals)
    if controlled:
        control = n_orbitals
        ancilla = n_orbitals + 1
        builder = CircuitBuilder(n_orbitals + 2)
    else:
        control = ancilla = None
        builder = CircuitBuilder(max(n_orbitals, 1))
    phase_sum = 0.0  # the realized circuit misses exp(-i phase_sum)
    for coeff, ops in strings:
        alpha = coeff * dt
        phase_sum += alpha
        if not ops:
            continue
        theta = 2.0 * alpha
        wires = [q for q, _ in ops]
        for q, letter in ops:
            for kind in _BASIS_PRE.get(letter, ()):
                builder.append(gate(kind, q))
        for a, b in zip(wires, wires[1:]):
            builder.append(cnot(a, b))
        target = wires[-1]
        if controlled:
            builder.append(toffoli(control, target, ancilla))
            _emit_rotation(builder, theta, ancilla, method, epsilon)
            builder.append(toffoli(control, target, ancilla))
        else:
            _emit_rotation(builder, theta, target, method, epsilon)
        for a, b in reversed(list(zip(wires, wires[1:]))):
            builder.append(cnot(a, b))
        for q, letter in ops:
            for kind in _BASIS_POST.get(letter, ()):
                builder.append(gate(kind, q))
    if controlled:
        _emit_rotation(builder, -phase_sum, control, method, epsilon)
    return builder.build()


# ---------------------------------------------------------------------------
# CNOT parity ladders


def build_jw_ladder(span: int, mode: str = LADDER_DIRECT) -> Circuit:
    """Prefix-parity CNOT ladder over `span` wires.

    direct: CNOT(0,1), CNOT(1,2), ..., depth span-1 on span qubits.

    teleported: constant depth on 3 span - 4 qubits.  Each interior wire
    j gets a Bell pair (e_j, f_j); every ladder CNOT then runs in one
    layer with f_j standing in for the not-yet-computed wire j, and a
    Bell-state measurement (CNOT, H, two measurements) glues wire j onto
    f_j afterwards.  The measurement outcomes leave Pauli errors whose
    propagation through the pre-applied CNOTs is folded classically:
    with a_j, b_j the two outcomes of BSM j and B_j = b_1 xor .. xor
    b_j, wire f_j needs X^{B_j} Z^{a_j} and the last data wire needs
    X^{B_{span-2}}.  Those land as conditional frame updates, so the
    built circuit is channel-equal to the direct ladder on the relocated
    outputs of ladder_output_map.
    """
    if span < 2:
        raise ValueError("ladder needs at least two wires")
    if mode not in (LADDER_DIRECT, LADDER_TELEPORTED):
        raise ValueError(f"unknown ladder mode {mode!r}")
    if mode == LADDER_DIRECT or span == 2:
        builder = CircuitBuilder(span if mode == LADDER_DIRECT else 2)
        for a in range(span - 1):
            builder.append(cnot(a, a + 1))
        return builder.build()
    inner = span - 2
    builder = CircuitBuilder(3 * span - 4)
    e = [span + 2 * j for j in range(inner)]
    f = [span + 2 * j + 1 for j in range(inner)]
    key_a = [2 * j for j in range(inner)]
    key_b = [2 * j + 1 for j in range(inner)]
    for j in range(inner):
        builder.append(gate(H, e[j]))
        builder.append(cnot(e[j], f[j]))
    # one fixed schedule for every span: without the fence the span-3 case
    # packs a layer tighter and the depth would depend on span
    builder.barrier()
    builder.append(cnot(0, 1))
    for j in range(inner):
        builder.append(cnot(f[j], j + 2))
    for j in range(inner):
        builder.append(cnot(j + 1, e[j]))  # BSM of carrier wire j+1 with e_j
        builder.append(gate(H, j + 1))
        builder.append(measure(e[j], key=key_b[j]))
        builder.append(measure(j + 1, key=key_a[j]))
    for j in range(inner):
        for i in range(j + 1):
            builder.append(frame_update(f[j], "X", cond=key_b[i]))
        builder.append(frame_update(f[j], "Z", cond=key_a[j]))
    for i in range(inner):
        builder.append(frame_update(span - 1, "X", cond=key_b[i]))
    return builder.build()


def ladder_output_map(span: int, mode: str = LADDER_DIRECT) -> tuple[int, ...]:
    """Where each logical ladder wire ends up in the built circuit."""
    if span < 2:
        raise ValueError("ladder needs at least two wires")
    if mode == LADDER_DIRECT or span == 2:
        return tuple(range(span))
    if mode != LADDER_TELEPORTED:
        raise ValueError(f"unknown ladder mode {mode!r}")
    return (0,) + tuple(span + 2 * j + 1 for j in range(span - 2)) + (span - 1,)


# ---------------------------------------------------------------------------
# Cost models


class RotationCost(NamedTuple):
    """Priced controlled rotation: full block plus its synthesis depth."""

    block: ResourceProfile
    rotation_depth: int  # the approximated-rotation part of block.depth


def _sequence_fit(epsilon: float) -> tuple[int, int]:
    """Reference fit for optimal-sequence length beyond exhaustive reach:
    depth -24.9 log10(eps) - 7.64 and T count -9.75 log10(eps) - 2.81."""
    log = math.log10(epsilon)
    depth = max(1.0, -24.9 * log - 7.64)
    t = max(0.0, -9.75 * log - 2.81)
    return math.ceil(depth), math.ceil(t)


# Exhaustive search handles coarse tolerances directly; below this the fit
# lines take over.  Power-law constants for the Solovay-Kitaev model are
# calibrated against this package's own compiler at recursion level 4
# (lengths ~7000 at eps ~1e-4 over several angles).
SEQUENCE_SEARCH_REACH = 0.05
SK_DEPTH_COEFF = 31.0
SK_T_COEFF = 14.8
PAR_MEAN_GATES = 4  # mean rounds ~2, a CNOT and a measurement per round
PAR_ANCILLA_COUNT = 6  # precomputed ancillas per rotation (2^-6 fallback rate)


def rotation_profile(method: str, epsilon: float, angle: float | None = None) -> ResourceProfile:
    """Cost model for one single-qubit phase rotation at accuracy epsilon.

    kickback: gate-level ripple-carry controlled addition at the register
    width that quantizes angles to epsilon (worst-case addend).
    sequence: exhaustive minimal sequence when epsilon (and the angle) is
    within search reach, else the fit lines.  sk: power law
    coeff * log10(1/eps)^4 in depth and T.  par: four gates mean, with
    the T bill of the six ancilla preparations (fit-line sequences)
    attributed to the rotation since they are consumed by it.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if method == METHOD_KICKBACK:
        n = register_bits_for(epsilon)
        circ = build_adder(AdderSpec(RIPPLE_CARRY, n, controlled=True), (1 << n) - 1)
        return circ.profile()
    if method == METHOD_SEQUENCE:
        if angle is not None and epsilon >= SEQUENCE_SEARCH_REACH:
            seq = min_sequence(rz_matrix(angle), epsilon)
            if seq.satisfied:
                return ResourceProfile(
                    depth=seq.length, t_count=seq.t_count,
                    total_gates=seq.length, qubits=1,
                )
        depth, t = _sequence_fit(epsilon)
        return ResourceProfile(depth=depth, t_count=t, total_gates=depth, qubits=1)
    if method == METHOD_SK:
        scale = math.log10(1.0 / epsilon) ** 4
        return ResourceProfile(
            depth=math.ceil(SK_DEPTH_COEFF * scale),
            t_count=math.ceil(SK_T_COEFF * scale),
            total_gates=math.ceil(SK_DEPTH_COEFF * scale),
            qubits=1,
        )
    if method == METHOD_PAR:
        _, t_prep = _sequence_fit(epsilon)
        return ResourceProfile(
            depth=PAR_MEAN_GATES,
            t_count=PAR_ANCILLA_COUNT * t_prep,
            total_gates=PAR_MEAN_GATES,
            qubits=1 + PAR_ANCILLA_COUNT,
        )
    raise ValueError(f"unknown rotation method {method!r}")


def controlled_rotation_profile(method: str, epsilon: float, angle: float | None = None) -> RotationCost:
    """Cost model for one controlled phase rotation at accuracy epsilon.

    Default construction: two Toffolis around one plain rotation on an
    AND ancilla.  Sequence-based rotations instead use the two-CNOT,
    two-rotation decomposition (the third rotation commutes with the
    phase-estimation control and merges into a neighbour, a count-level
    saving).  Controlled PARs cascade directly at the same mean four
    gates; their ancillas are simply prepared with controlled rotations.
    """
    if method == METHOD_PAR:
        inner = rotation_profile(METHOD_PAR, epsilon)
        block = ResourceProfile(
            depth=inner.depth,
            t_count=inner.t_count,
            total_gates=inner.total_gates,
            qubits=inner.qubits + 1,  # the control wire (closes the angle debt)
        )
        return RotationCost(block=block, rotation_depth=inner.depth)
    if method == METHOD_SEQUENCE:
        half = rotation_profile(METHOD_SEQUENCE, epsilon, angle)
        block = ResourceProfile(
            depth=2 + 2 * half.depth,
            t_count=2 * half.t_count,
            total_gates=2 + 2 * half.total_gates,
            qubits=2,
        )
        return RotationCost(block=block, rotation_depth=2 * half.depth)
    inner = rotation_profile(method, epsilon, angle)
    block = ResourceProfile(
        depth=2 + inner.depth,
        t_count=14 + inner.t_count,
        total_gates=2 + inner.total_gates,
        qubits=inner.qubits + 2,  # control and AND ancilla around the rotation wire
    )
    return RotationCost(block=block, rotation_depth=inner.depth)


# ---------------------------------------------------------------------------
# Trotter plans and the end-to-end estimator


@dataclass(frozen=True)
class TrotterPlan:
    """One phase-estimation readout configuration.

    n readout bits take 2^n - 1 controlled Trotter steps of size dt; every
    controlled rotation inside a step is approximated to epsilon_max with
    the given method.
    """

    dt: float
    readout_bits: int
    method: str
    epsilon_max: float = 1e-4

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("time step must be positive")
        if self.readout_bits < 1:
            raise ValueError("need at least one readout bit")
        if self.method not in METHODS:
            raise ValueError(f"unknown rotation method {self.method!r}")
        if not self.epsilon_max > 0:
            raise ValueError("epsilon_max must be positive")

    @property
    def steps(self) -> int:
        return (1 << self.readout_bits) - 1


@dataclass(frozen=True)
class SecondQuantizedEstimate:
    """Resource estimate for a full second-quantized phase-estimation run."""

    profile: ResourceProfile  # the whole run
    per_step: ResourceProfile
    rotation_depth: int  # depth spent inside approximated rotations, whole run
    clifford_depth: int  # everything else (basis changes, ladders, wrappers)
    rotation_count: int  # controlled rotations across the run
    steps: int
    wall_clock_seconds: float
    method: str
    ladder_mode: str

    @property
    def rotation_fraction(self) -> float:
        """Share of execution time spent rotating (a Fig.-14-style ratio)."""
        if self.profile.depth == 0:
            return 0.0
        return self.rotation_depth / self.profile.depth


def _ladder_profile(span: int, mode: str, cache: dict) -> ResourceProfile:
    if span < 2:
        return ResourceProfile(0, 0, 0, span)
    if span not in cache:
        cache[span] = build_jw_ladder(span, mode).profile()
    return cache[span]


def estimate_second_quantized(
    table: IntegralTable,
    plan: TrotterPlan,
    *,
    ladder_mode: str = LADDER_TELEPORTED,
    seconds_per_gate: float = 1e-3,
) -> SecondQuantizedEstimate:
    """Price a phase-estimation run over the table without simulating it.

    Terms are walked in the deterministic (|h| descending, indices) order
    and fully serialized within a step; each Pauli string costs its basis
    changes, two parity ladders (teleported by default, making the depth
    independent of how far apart the orbitals sit), and one controlled
    rotation priced by the plan's method at epsilon_max.  The per-step
    total is multiplied by the 2^n - 1 steps and wall clock is depth
    times seconds_per_gate (default 1 ms per gate).  An empty table is a
    zero-depth run.
    """
    if ladder_mode not in (LADDER_DIRECT, LADDER_TELEPORTED):
        raise ValueError(f"unknown ladder mode {ladder_mode!r}")
    if not seconds_per_gate > 0:
        raise ValueError("seconds_per_gate must be positive")
    ladder_cache: dict[int, ResourceProfile] = {}
    depth = 0
    t_count = 0
    gates = 0
    rot_depth = 0
    rotations = 0
    ladder_extra_qubits = 0
    rot_extra_qubits = 0
    for term in table.sorted_terms():
        for coeff, ops in excitation_operator_strings(term, table.n_orbitals):
            if not ops:
                continue  # global phase: repaid inside a neighbouring rotation
            letters = [letter for _, letter in ops]
            n_x = letters.count("X")
            n_y = letters.count("Y")
            basis_depth = 3 if n_y else (1 if n_x else 0)
            depth += 2 * basis_depth
            gates += 2 * (n_x + 3 * n_y)
            ladder = _ladder_profile(len(ops), ladder_mode, ladder_cache)
            depth += 2 * ladder.depth
            t_count += 2 * ladder.t_count
            gates += 2 * ladder.total_gates
            ladder_extra_qubits = max(ladder_extra_qubits, ladder.qubits - len(ops))
            cost = controlled_rotation_profile(
                plan.method, plan.epsilon_max, 2.0 * coeff * plan.dt
            )
            depth += cost.block.depth
            t_count += cost.block.t_count
            gates += cost.block.total_gates
            rot_depth += cost.rotation_depth
            # every block includes the shared control and the orbital target
            rot_extra_qubits = max(rot_extra_qubits, cost.block.qubits - 2)
            rotations += 1
    qubits = 0
    if table.n_terms:
        qubits = table.n_orbitals + 1 + ladder_extra_qubits + rot_extra_qubits
    per_step = ResourceProfile(depth=depth, t_count=t_count, total_gates=gates, qubits=qubits)
    total = per_step.times(plan.steps)
    rotation_depth = rot_depth * plan.steps
    return SecondQuantizedEstimate(
        profile=total,
        per_step=per_step,
        rotation_depth=rotation_depth,
        clifford_depth=total.depth - rotation_depth,
        rotation_count=rotations * plan.steps,
        steps=plan.steps,
        wall_clock_seconds=total.depth * seconds_per_gate,
        method=plan.method,
        ladder_mode=ladder_mode,
    )
