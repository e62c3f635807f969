"""Arbitrary phase rotations by kickback onto addition eigenstates.

An n-qubit register holding the state with amplitudes
e^{-2 pi i k y / 2^n} / sqrt(2^n) (k odd) is an eigenvector of in-place
addition modulo 2^n: adding a constant u multiplies it by the global
phase e^{2 pi i k u / 2^n}.  Performing that addition controlled on a
target qubit therefore applies diag(1, e^{2 pi i k u / 2^n}) to the
target while returning the register unchanged, so one register serves
arbitrarily many rotations.  Solving k u = round(2^n phi / 2 pi)
(mod 2^n) for u realizes any angle phi to within
|dphi| <= 2 pi / 2^{n+1} using only X, CNOT and Toffoli.

Conventions: registers are little-endian (data qubit j carries weight
2^j, matching the simulator's basis-index convention), and the adder
folds the classical addend into the gate sequence instead of loading it
into a second quantum register.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    Circuit,
    CircuitBuilder,
    Gate,
    ResourceProfile,
    cnot,
    gate,
    rz,
    toffoli,
)
from .core import T as T_KIND
from .core import TDG, S, SDG, X, Z
from .sim import StateVector

TWO_PI = 2.0 * math.pi

RIPPLE_CARRY = "ripple-carry"
LOOKAHEAD_MODEL = "lookahead-model"

# e^{i pi w / 4} on |1> for w in 0..7, as exact gate-set phase powers
_EIGHTH_TURN_KINDS: tuple[tuple[str, ...], ...] = (
    (),
    (T_KIND,),
    (S,),
    (S, T_KIND),
    (Z,),
    (Z, T_KIND),
    (SDG,),
    (TDG,),
)


@dataclass(frozen=True)
class GammaRegister:
    """Parameters of an addition eigenstate on n qubits.

    k must be odd so that it is invertible modulo 2^n; the register then
    reaches every multiple of 2 pi / 2^n as a kickback phase.
    """

    k: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("register needs at least one qubit")
        if self.k % 2 == 0:
            raise ValueError(f"k={self.k} is even and has no inverse modulo 2^{self.n}")
        if not 1 <= self.k < (1 << self.n):
            raise ValueError(f"k={self.k} outside [1, 2^{self.n})")

    @property
    def modulus(self) -> int:
        return 1 << self.n


_PI_LD = np.longdouble("3.14159265358979323846264338327950288")


def gamma_state(reg: GammaRegister, *, dtype=np.complex128) -> StateVector:
    """Eigenstate of modular addition: amplitudes e^{-2 pi i k y / 2^n} / sqrt(2^n).

    The state is a product state; qubit j holds
    (|0> + e^{-2 pi i k / 2^(n-j)} |1>) / sqrt(2).
    """
    n_amp = reg.modulus
    angles = np.arange(n_amp, dtype=np.longdouble) * (-2 * _PI_LD * reg.k / n_amp)
    amps = (np.cos(angles) + np.clongdouble(1j) * np.sin(angles)) / np.sqrt(
        np.longdouble(n_amp)
    )
    return StateVector(reg.n, amps.astype(dtype))


def _reduce_angle(phi: float) -> float:
    """Map phi into [0, 2 pi)."""
    out = math.fmod(phi, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    return out


def solve_mod(k: int, n: int, phi: float) -> int:
    """Addend u with k u = round(2^n phi / 2 pi) (mod 2^n).

    The right-hand side rounds half up; u is the unique solution in
    [0, 2^n) because odd k is invertible modulo a power of two.
    """
    if k % 2 == 0:
        raise ValueError(f"k={k} is even and has no inverse modulo 2^{n}")
    modulus = 1 << n
    target = math.floor(modulus * _reduce_angle(phi) / TWO_PI + 0.5)
    return (target * pow(k, -1, modulus)) % modulus


def phase_error(n: int, phi: float) -> float:
    """Signed residual phi - 2 pi round(2^n phi / 2 pi) / 2^n after reduction.

    Bounded by 2 pi / 2^{n+1} in magnitude; independent of k, which only
    permutes which addend reaches the rounded phase.
    """
    modulus = 1 << n
    reduced = _reduce_angle(phi)
    target = math.floor(modulus * reduced / TWO_PI + 0.5)
    return reduced - TWO_PI * target / modulus


@dataclass(frozen=True)
class AdderSpec:
    """Which adder construction to use and at what width.

    ripple-carry yields a full gate-level circuit; lookahead-model is a
    depth/count model only (O(log n) depth) and produces no gate list.
    """

    kind: str
    n: int
    controlled: bool = False

    def __post_init__(self) -> None:
        if self.kind not in (RIPPLE_CARRY, LOOKAHEAD_MODEL):
            raise ValueError(f"unknown adder kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("adder needs at least one data qubit")


def carries_needed(n: int, addend: int) -> int:
    """Carry ancillas the folded ripple-carry adder uses for this addend."""
    addend %= 1 << n
    if addend == 0:
        return 0
    low = (addend & -addend).bit_length() - 1  # lowest set bit index
    return n - 1 - low


def emit_add_constant(
    builder: CircuitBuilder,
    data: list[int] | tuple[int, ...],
    addend: int,
    carries: list[int] | tuple[int, ...],
    control: int | None = None,
) -> None:
    """Emit an in-place |x> -> |x + addend mod 2^len(data)> onto the builder.

    data is little-endian (data[j] has weight 2^j).  carries must supply
    at least carries_needed(len(data), addend) clean ancillas; each is
    returned to |0>.  The classical addend is folded in: bits below its
    lowest set bit cost nothing, zero bits above it skip their sum CNOT.

    With a control qubit, only the writes to data qubits acquire the
    control; the carry bookkeeping is computed and uncomputed identically
    either way, so a cleared control leaves the register untouched.
    """
    n = len(data)
    addend %= 1 << n
    if addend == 0:
        return
    low = (addend & -addend).bit_length() - 1
    need = n - 1 - low
    if len(carries) < need:
        raise ValueError(f"addend {addend} on {n} bits needs {need} carry ancillas")
    bit = [(addend >> j) & 1 for j in range(n)]
    # carry[j] holds the carry into data bit j, for j in low+1 .. n-1
    carry = {j: carries[i] for i, j in enumerate(range(low + 1, n))}

    def compute_carry_into(j: int) -> list[Gate]:
        """Gates setting carry[j] from data bit j-1 (and carry[j-1])."""
        src = j - 1
        if src == low:
            # carry out of the lowest set bit is just that data bit
            return [cnot(data[src], carry[j])]
        gates = [toffoli(data[src], carry[src], carry[j])]
        if bit[src]:
            # with the addend bit set the carry out is an OR, not an AND
            gates += [cnot(data[src], carry[j]), cnot(carry[src], carry[j])]
        return gates

    for j in range(low + 1, n):
        builder.extend(compute_carry_into(j))
    for j in range(n - 1, low, -1):
        if control is None:
            builder.append(cnot(carry[j], data[j]))
            if bit[j]:
                builder.append(gate(X, data[j]))
        else:
            builder.append(toffoli(control, carry[j], data[j]))
            if bit[j]:
                builder.append(cnot(control, data[j]))
        builder.extend(reversed(compute_carry_into(j)))
    if control is None:
        builder.append(gate(X, data[low]))
    else:
        builder.append(cnot(control, data[low]))


def lookahead_profile(n: int, controlled: bool = False) -> ResourceProfile:
    """Cost model for a carry-lookahead constant adder (no gate list).

    Coarse standard-construction figures: Toffoli depth logarithmic in
    the width, Toffoli count linear, one workspace qubit per data bit.
    Only the O(log n) depth shape is relied on downstream; the constants
    are a conventional costing, not a synthesized circuit.
    """
    if n < 1:
        raise ValueError("adder needs at least one data qubit")
    toffolis = 10 * n
    depth = 4 * max(1, math.ceil(math.log2(max(n, 2)))) + 2
    return ResourceProfile(
        depth=depth + (1 if controlled else 0),
        t_count=7 * toffolis,
        total_gates=toffolis + 4 * n,
        qubits=2 * n + (1 if controlled else 0),
    )


def build_adder(spec: AdderSpec, addend: int) -> Circuit | ResourceProfile:
    """Constant-addition circuit (ripple-carry) or cost model (lookahead).

    Ripple-carry layout: data qubits 0..n-1 (little-endian), then the
    carry ancillas, then the control qubit last when controlled.
    """
    if not 0 <= addend < (1 << spec.n):
        raise ValueError(f"addend {addend} outside [0, 2^{spec.n})")
    if spec.kind == LOOKAHEAD_MODEL:
        return lookahead_profile(spec.n, spec.controlled)
    n = spec.n
    n_carry = carries_needed(n, addend)
    total = n + n_carry + (1 if spec.controlled else 0)
    builder = CircuitBuilder(total)
    emit_add_constant(
        builder,
        list(range(n)),
        addend,
        list(range(n, n + n_carry)),
        control=total - 1 if spec.controlled else None,
    )
    return builder.build()


@dataclass(frozen=True)
class KickbackLayout:
    """Where kickback_rotation placed each register inside its circuit."""

    target: int
    gamma: tuple[int, ...]
    carries: tuple[int, ...]
    control: int | None = None
    and_ancilla: int | None = None


class KickbackRotation(NamedTuple):
    circuit: Circuit
    delta_phi: float
    u: int
    layout: KickbackLayout


def kickback_rotation(
    phi: float,
    reg: GammaRegister,
    controlled: bool = False,
    spec: AdderSpec | None = None,
) -> KickbackRotation:
    """Rotation diag(1, e^{i(phi - delta_phi)}) on a target qubit by kickback.

    Adds u = solve_mod(reg.k, reg.n, phi) into the eigenstate register,
    controlled on the target; the register comes back unchanged and the
    target picks up the phase on |1>.  With controlled=True the phase
    lands on |11> of (control, target) instead, via a Toffoli-computed
    AND ancilla wrapped around the singly-controlled adder.

    Matches rz_matrix(phi) up to global phase and the quantization
    residual: dist <= |delta_phi| / 2 + numerical noise.
    """
    if spec is None:
        spec = AdderSpec(RIPPLE_CARRY, reg.n)
    if spec.kind != RIPPLE_CARRY:
        raise ValueError("gate-level kickback needs the ripple-carry adder; "
                         "the lookahead kind is a counting model only")
    if spec.n != reg.n:
        raise ValueError(f"adder width {spec.n} does not match register width {reg.n}")
    u = solve_mod(reg.k, reg.n, phi)
    delta_phi = phase_error(reg.n, phi)
    n = reg.n
    n_carry = carries_needed(n, u)
    if controlled:
        data_start = 2
    else:
        data_start = 1
    gamma_qubits = tuple(range(data_start, data_start + n))
    carry_qubits = tuple(range(data_start + n, data_start + n + n_carry))
    if controlled:
        and_anc = data_start + n + n_carry
        layout = KickbackLayout(
            target=1, gamma=gamma_qubits, carries=carry_qubits, control=0,
            and_ancilla=and_anc,
        )
        builder = CircuitBuilder(and_anc + 1)
        if u != 0:
            builder.append(toffoli(0, 1, and_anc))
            emit_add_constant(builder, list(gamma_qubits), u, list(carry_qubits), control=and_anc)
            builder.append(toffoli(0, 1, and_anc))
    else:
        layout = KickbackLayout(target=0, gamma=gamma_qubits, carries=carry_qubits)
        builder = CircuitBuilder(data_start + n + n_carry)
        emit_add_constant(builder, list(gamma_qubits), u, list(carry_qubits), control=0)
    return KickbackRotation(builder.build(), delta_phi, u, layout)


def _eighth_turn_gates(numerator: int, q: int) -> list[Gate]:
    """Gates applying e^{i pi numerator / 4} to |1> of qubit q."""
    return [gate(kind, q) for kind in _EIGHTH_TURN_KINDS[numerator % 8]]


def transform_gamma(k: int, l: int, n: int, mode: str = "ft") -> Circuit:
    """Circuit mapping the k eigenstate to the l eigenstate on n qubits.

    Per qubit j the two states differ by the factor e^{2 pi i (k-l) /
    2^m} on |1>, m = n - j, read off the product-state factorization.
    Qubits are corrected from m = 1 upward; m <= 3 (and any coarser
    difference) is an exact eighth-turn power.  mode "rz" applies the
    remaining factors as placeholder rotations; mode "ft" realizes each
    one exactly as a kickback into the already-corrected higher qubits,
    which at step m form an addition eigenstate modulo 2^(m-1) with
    parameter l, so the addend l^{-1} (k-l)/2 mod 2^(m-1) recovers the
    factor with zero residual.  Output matches gamma_state(l, n) up to
    global phase; mode "ft" appends shared carry ancillas (restored to
    |0>) after the register.
    """
    if mode not in ("ft", "rz"):
        raise ValueError(f"unknown mode {mode!r}")
    if n < 1:
        raise ValueError("register needs at least one qubit")
    if k % 2 == 0 or l % 2 == 0:
        raise ValueError("eigenstate parameters must be odd")
    if not (1 <= k < (1 << n) and 1 <= l < (1 << n)):
        raise ValueError(f"parameters must lie in [1, 2^{n})")

    plans: list[tuple[int, int]] = []  # (m, reduced difference) needing gates
    max_carries = 0
    for m in range(1, n + 1):
        diff = (k - l) % (1 << m)
        if diff == 0:
            continue
        plans.append((m, diff))
        if (8 * diff) % (1 << m) != 0 and mode == "ft":
            width = m - 1
            addend = ((diff // 2) * pow(l, -1, 1 << width)) % (1 << width)
            max_carries = max(max_carries, carries_needed(width, addend))
    builder = CircuitBuilder(n + max_carries)
    carry_qubits = list(range(n, n + max_carries))
    for m, diff in plans:
        q = n - m
        if (8 * diff) % (1 << m) == 0:
            builder.extend(_eighth_turn_gates((8 * diff) >> m, q))
        elif mode == "rz":
            builder.append(rz(TWO_PI * diff / (1 << m), q))
        else:
            width = m - 1
            addend = ((diff // 2) * pow(l, -1, 1 << width)) % (1 << width)
            sub = list(range(n - width, n))  # little-endian: LSB highest m'
            emit_add_constant(builder, sub, addend, carry_qubits, control=q)
    return builder.build()
