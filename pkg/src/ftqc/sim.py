"""Exact statevector simulation with measurement and Pauli-frame tracking.

Small-scale reference simulator used to verify every circuit construction
in the package.  Measurements draw from a single per-run PRNG via the
inverse CDF of the measured qubit's marginal, so a (circuit, seed) pair
always reproduces bit-identical results.  Pauli corrections entering
through FRAME gates are not applied to the amplitudes; they are tracked as
an exact Pauli operator (phase included) and conjugated through subsequent
Clifford gates, which is how hardware defers such corrections.  Reported
measurement outcomes are frame-corrected, i.e. they are the outcomes the
corrected state would have produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels_py, core, kernels
from .core import Circuit, Gate

DEFAULT_QUBIT_CAP = 22
DEFAULT_SEED = 740021  # arbitrary fixed constant; FTQC_SEED overrides in the CLI


class SimulationError(RuntimeError):
    pass


class StateVector:
    """Dense state on n qubits; qubit j is bit j of the basis index.

    Amplitudes are complex128 by default.  Passing clongdouble arrays (or
    dtype=np.clongdouble to the constructors) switches the whole run onto
    the pure-python kernels in extended precision, which is what the
    verification suite uses when a tolerance sits near the double-precision
    noise floor of the distance metric.
    """

    __slots__ = ("n_qubits", "amps")

    def __init__(self, n_qubits: int, amps: np.ndarray, *, cap: int = DEFAULT_QUBIT_CAP):
        if n_qubits > cap:
            raise SimulationError(f"{n_qubits} qubits exceeds the simulator cap of {cap}")
        if amps.shape != (1 << n_qubits,):
            raise ValueError(f"amplitude array has shape {amps.shape}, expected {(1 << n_qubits,)}")
        if not np.issubdtype(amps.dtype, np.complexfloating):
            amps = amps.astype(np.complex128)
        self.n_qubits = n_qubits
        self.amps = np.ascontiguousarray(amps)

    @property
    def dtype(self) -> np.dtype:
        return self.amps.dtype

    @classmethod
    def zero(cls, n_qubits: int, *, cap: int = DEFAULT_QUBIT_CAP, dtype=np.complex128) -> "StateVector":
        return cls.basis(n_qubits, 0, cap=cap, dtype=dtype)

    @classmethod
    def basis(cls, n_qubits: int, index: int, *, cap: int = DEFAULT_QUBIT_CAP, dtype=np.complex128) -> "StateVector":
        if n_qubits > cap:
            raise SimulationError(f"{n_qubits} qubits exceeds the simulator cap of {cap}")
        amps = np.zeros(1 << n_qubits, dtype=dtype)
        amps[index] = 1.0
        return cls(n_qubits, amps, cap=cap)

    @classmethod
    def from_amplitudes(cls, amps: Sequence[complex], *, cap: int = DEFAULT_QUBIT_CAP) -> "StateVector":
        arr = np.asarray(amps)
        if not np.issubdtype(arr.dtype, np.complexfloating):
            arr = arr.astype(np.complex128)
        n = int(round(math.log2(arr.size)))
        if 1 << n != arr.size:
            raise ValueError("amplitude count must be a power of two")
        return cls(n, arr.copy(), cap=cap)

    @classmethod
    def plus(cls, n_qubits: int, *, cap: int = DEFAULT_QUBIT_CAP, dtype=np.complex128) -> "StateVector":
        one = np.ones((), dtype=dtype)
        amps = np.full(1 << n_qubits, one / np.sqrt(one.real * (1 << n_qubits)), dtype=dtype)
        return cls(n_qubits, amps, cap=cap)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def tensor(self, other: "StateVector", *, cap: int = DEFAULT_QUBIT_CAP) -> "StateVector":
        """self on the low qubits, other on the high qubits."""
        return StateVector(self.n_qubits + other.n_qubits, np.kron(other.amps, self.amps), cap=cap)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


def product_state(
    n_qubits: int,
    parts: Mapping[tuple[int, ...], np.ndarray] | Iterable[tuple[tuple[int, ...], np.ndarray]] = (),
    *,
    cap: int = DEFAULT_QUBIT_CAP,
) -> StateVector:
    """Tensor product with named blocks; unassigned qubits start in |0>.

    Each entry maps a tuple of qubit indices to a statevector on those
    qubits, little-endian in tuple order (bit j of the block index lives on
    qubits[j]).
    """
    items = list(parts.items()) if isinstance(parts, Mapping) else list(parts)
    claimed: set[int] = set()
    for qubits, vec in items:
        if len(set(qubits)) != len(qubits) or claimed.intersection(qubits):
            raise ValueError("product blocks must use disjoint qubits")
        if max(qubits, default=-1) >= n_qubits:
            raise ValueError("block qubit outside register")
        if np.asarray(vec).shape != (1 << len(qubits),):
            raise ValueError("block amplitude length does not match its qubit count")
        claimed.update(qubits)
    dtype = np.result_type(np.complex128, *(np.asarray(v).dtype for _, v in items)) if items else np.complex128
    idx = np.zeros(1, dtype=np.int64)
    amp = np.ones(1, dtype=dtype)
    for qubits, vec in items:
        k = len(qubits)
        offsets = np.zeros(1 << k, dtype=np.int64)
        for local in range(1 << k):
            off = 0
            for j, q in enumerate(qubits):
                if (local >> j) & 1:
                    off |= 1 << q
            offsets[local] = off
        idx = (idx[:, None] | offsets[None, :]).reshape(-1)
        amp = (amp[:, None] * np.asarray(vec)[None, :]).reshape(-1)
    out = np.zeros(1 << n_qubits, dtype=dtype)
    out[idx] = amp
    return StateVector(n_qubits, out, cap=cap)


# ---------------------------------------------------------------------------
# Pauli frames

def _pauli_zx(z: int, x: int) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    if x:
        m = core.GATE_MATRICES[core.X] @ m
    if z:
        m = core.GATE_MATRICES[core.Z] @ m
    return m


def _match_pauli(m: np.ndarray, n_qubits: int) -> tuple[int, tuple[tuple[int, int], ...]]:
    """Write m as i^s * prod_q Z^z X^x; raises if m is not such a product."""
    for s in range(4):
        for code in range(4 ** n_qubits):
            zx = []
            cand = np.array([[1.0 + 0j]])
            for q in range(n_qubits):
                z = (code >> (2 * q)) & 1
                x = (code >> (2 * q + 1)) & 1
                zx.append((z, x))
                cand = np.kron(cand, _pauli_zx(z, x))
            if np.allclose(m, (1j ** s) * cand, atol=1e-12):
                return s, tuple(zx)
    raise ValueError("matrix is not a phased Pauli product")


def _build_conj_tables() -> tuple[dict, dict]:
    one_q: dict[str, dict[tuple[int, int], tuple[int, int, int]]] = {}
    for kind in (core.X, core.Y, core.Z, core.H, core.S, core.SDG):
        g = core.GATE_MATRICES[kind]
        table = {}
        for z in (0, 1):
            for x in (0, 1):
                s, ((z2, x2),) = _match_pauli(g @ _pauli_zx(z, x) @ g.conj().T, 1)
                table[(z, x)] = (s, z2, x2)
        one_q[kind] = table
    cnot_table: dict[tuple[int, int, int, int], tuple[int, int, int, int, int]] = {}
    g = core._CNOT_M  # basis |control target>, control is the high bit
    for zc in (0, 1):
        for xc in (0, 1):
            for zt in (0, 1):
                for xt in (0, 1):
                    p = np.kron(_pauli_zx(zc, xc), _pauli_zx(zt, xt))
                    s, ((zc2, xc2), (zt2, xt2)) = _match_pauli(g @ p @ g.conj().T, 2)
                    cnot_table[(zc, xc, zt, xt)] = (s, zc2, xc2, zt2, xt2)
    return one_q, cnot_table


_CONJ_1Q, _CONJ_CNOT = _build_conj_tables()


class PauliFrame:
    """Deferred Pauli correction E = i^s * prod_q Z^{z_q} X^{x_q}.

    The tracked simulation holds |psi_sim> while the corrected state is
    E|psi_sim>.  Updates toggle single X/Z factors; propagation conjugates
    E through a Clifford gate, phase included, so materializing the frame
    reproduces the explicit-gate simulation exactly (not just up to
    phase).  Composing a frame with itself cancels every X/Z factor but can
    leave a global sign in ``phase_i``.
    """

    __slots__ = ("n_qubits", "x", "z", "phase_i")

    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        self.x = np.zeros(n_qubits, dtype=np.uint8)
        self.z = np.zeros(n_qubits, dtype=np.uint8)
        self.phase_i = 0  # exponent of i, mod 4

    def copy(self) -> "PauliFrame":
        f = PauliFrame(self.n_qubits)
        f.x[:] = self.x
        f.z[:] = self.z
        f.phase_i = self.phase_i
        return f

    def is_identity(self) -> bool:
        return not self.x.any() and not self.z.any() and self.phase_i == 0

    def update(self, qubit: int, pauli: str) -> None:
        """Fold a new X or Z correction onto the existing frame (left side)."""
        if pauli == "X":
            # X * (Z^z X^x) reorders to Z^z X^(x+1) at cost (-1)^z
            if self.z[qubit]:
                self.phase_i = (self.phase_i + 2) % 4
            self.x[qubit] ^= 1
        elif pauli == "Z":
            self.z[qubit] ^= 1
        else:
            raise ValueError(f"unknown pauli {pauli!r}")

    def compose(self, other: "PauliFrame") -> "PauliFrame":
        """Frame for other applied first, then self."""
        if self.n_qubits != other.n_qubits:
            raise ValueError("frame size mismatch")
        out = other.copy()
        out.phase_i = (out.phase_i + self.phase_i) % 4
        for q in range(self.n_qubits):
            if self.x[q]:
                out.update(q, "X")
            if self.z[q]:
                # Z * Z^z X^x needs no reorder
                out.z[q] ^= 1
        return out

    def propagate(self, g: Gate) -> None:
        """Replace E by G E G^dag for a gate G the frame can cross."""
        kind = g.kind
        if kind in _CONJ_1Q:
            q = g.qubits[0]
            s, z2, x2 = _CONJ_1Q[kind][(self.z[q], self.x[q])]
            self.phase_i = (self.phase_i + s) % 4
            self.z[q], self.x[q] = z2, x2
            return
        if kind == core.CNOT:
            c, t = g.qubits
            s, zc, xc, zt, xt = _CONJ_CNOT[(self.z[c], self.x[c], self.z[t], self.x[t])]
            self.phase_i = (self.phase_i + s) % 4
            self.z[c], self.x[c], self.z[t], self.x[t] = zc, xc, zt, xt
            return
        if kind in (core.T, core.TDG, core.S, core.SDG, core.Z, core.RZ):
            if self.x[g.qubits[0]]:
                raise SimulationError(f"X frame cannot cross diagonal gate {kind}")
            return
        if kind == core.CRZ:
            if any(self.x[q] for q in g.qubits):
                raise SimulationError("X frame cannot cross CRZ")
            return
        if kind == core.TOFFOLI:
            c1, c2, t = g.qubits
            if self.x[c1] or self.x[c2] or self.z[t]:
                raise SimulationError("frame cannot cross Toffoli on these qubits")
            return
        raise SimulationError(f"cannot propagate frame through {kind}")

    def apply_to(self, state: StateVector) -> StateVector:
        """Materialize the correction: returns E|state>."""
        out = state.copy()
        n = out.n_qubits
        K = _kernel_module(out.amps.dtype)
        xmat = _matrices_for(out.amps.dtype)[0][core.X]
        for q in range(n):
            if self.x[q]:
                out.amps = K.apply_1q(out.amps, n, q, xmat)
            if self.z[q]:
                out.amps = K.apply_diag_1q(out.amps, n, q, 1.0, -1.0)
        if self.phase_i:
            out.amps *= 1j ** self.phase_i
        return out


@dataclass
class SimResult:
    state: StateVector
    record: dict[int, int]
    frame: PauliFrame
    qubit_outcomes: dict[int, int] = field(default_factory=dict)

    def corrected_state(self) -> StateVector:
        return self.frame.apply_to(self.state)


_PI_LD = np.longdouble("3.141592653589793238462643383279502884")


def _kernel_module(dtype: np.dtype):
    return kernels if dtype == np.complex128 else _kernels_py


_MATRIX_CACHE: dict = {}


def _matrices_for(dtype) -> tuple[dict, dict]:
    """(dense 1q matrices, diagonal entries) for the requested precision."""
    key = np.dtype(dtype)
    if key in _MATRIX_CACHE:
        return _MATRIX_CACHE[key]
    if key == np.complex128:
        dense = {k: core.GATE_MATRICES[k] for k in (core.X, core.Y, core.H)}
        diag = {
            core.Z: (1.0, -1.0),
            core.S: (1.0, 1j),
            core.SDG: (1.0, -1j),
            core.T: (1.0, np.exp(1j * math.pi / 4)),
            core.TDG: (1.0, np.exp(-1j * math.pi / 4)),
        }
    else:
        one = np.ones((), dtype=key)
        sq = one / np.sqrt(np.longdouble(2))
        dense = {
            core.X: np.array([[0, 1], [1, 0]], dtype=key),
            core.Y: np.array([[0, -1j], [1j, 0]], dtype=key),
            core.H: np.array([[sq, sq], [sq, -sq]], dtype=key),
        }
        eighth = np.exp(1j * np.clongdouble(_PI_LD) / 4).astype(key)
        diag = {
            core.Z: (one * 1.0, one * -1.0),
            core.S: (one * 1.0, one * 1j),
            core.SDG: (one * 1.0, one * -1j),
            core.T: (one * 1.0, eighth),
            core.TDG: (one * 1.0, np.conj(eighth)),
        }
    _MATRIX_CACHE[key] = (dense, diag)
    return dense, diag


def _phase_at(angle: float, dtype) -> complex:
    if np.dtype(dtype) == np.complex128:
        return np.exp(1j * angle)
    return np.exp(1j * np.clongdouble(np.longdouble(angle)))


def run(
    circuit: Circuit,
    initial: StateVector | None = None,
    *,
    seed: int | None = DEFAULT_SEED,
    rng: np.random.Generator | None = None,
    cap: int = DEFAULT_QUBIT_CAP,
) -> SimResult:
    """Simulate a circuit layer by layer.

    Measurements inside one layer consume randomness in listed order.
    FRAME gates with a condition read the (frame-corrected) outcome stored
    under their key.
    """
    n = circuit.n_qubits
    if n > cap:
        raise SimulationError(f"{n} qubits exceeds the simulator cap of {cap}")
    if initial is None:
        state = StateVector.zero(n, cap=cap)
    else:
        if initial.n_qubits != n:
            raise ValueError("initial state size does not match circuit")
        state = initial.copy()
    if rng is None:
        rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    frame = PauliFrame(n)
    record: dict[int, int] = {}
    qubit_outcomes: dict[int, int] = {}
    amps = state.amps
    K = _kernel_module(amps.dtype)
    dense, diag = _matrices_for(amps.dtype)

    for layer in circuit.layers:
        for g in layer:
            kind = g.kind
            if kind == core.MEASURE:
                q = g.qubits[0]
                p1 = K.prob_one(amps, n, q)
                p0 = 1.0 - p1
                outcome = 0 if rng.random() < p0 else 1
                amps = K.collapse(amps, n, q, outcome, p0 if outcome == 0 else p1)
                true_outcome = outcome ^ int(frame.x[q])
                if frame.z[q]:
                    # Z^z X^x |m_sim> = (-1)^(z * m_true) X^x |m_sim>: the Z
                    # factor on a collapsed qubit reduces to a phase
                    frame.phase_i = (frame.phase_i + 2 * true_outcome) % 4
                    frame.z[q] = 0
                record[g.key] = true_outcome
                qubit_outcomes[q] = true_outcome
                continue
            if kind == core.FRAME:
                if g.cond is None or record.get(g.cond, 0) == 1:
                    frame.update(g.qubits[0], g.pauli)
                continue
            frame.propagate(g)
            if kind in diag:
                d0, d1 = diag[kind]
                amps = K.apply_diag_1q(amps, n, g.qubits[0], d0, d1)
            elif kind == core.RZ:
                amps = K.apply_diag_1q(amps, n, g.qubits[0], 1.0, _phase_at(g.angle, amps.dtype))
            elif kind == core.CNOT:
                amps = K.apply_cnot(amps, n, g.qubits[0], g.qubits[1])
            elif kind == core.TOFFOLI:
                amps = K.apply_toffoli(amps, n, *g.qubits)
            elif kind == core.CRZ:
                mask = (1 << g.qubits[0]) | (1 << g.qubits[1])
                amps = K.apply_phase_on_ones(amps, n, mask, _phase_at(g.angle, amps.dtype))
            else:
                amps = K.apply_1q(amps, n, g.qubits[0], dense[kind])
    state.amps = amps
    return SimResult(state=state, record=record, frame=frame, qubit_outcomes=qubit_outcomes)


def to_unitary(circuit: Circuit, *, cap: int = 12, dtype=np.complex128) -> np.ndarray:
    """Dense unitary of a measurement-free circuit, built column by column."""
    n = circuit.n_qubits
    if n > cap:
        raise SimulationError(f"refusing to build a 2^{n} unitary (cap {cap})")
    if any(not g.is_unitary for g in circuit.gates()):
        raise ValueError("circuit contains measurements or frame updates")
    dim = 1 << n
    u = np.empty((dim, dim), dtype=dtype)
    for col in range(dim):
        res = run(circuit, StateVector.basis(n, col, cap=cap, dtype=dtype), seed=0, cap=cap)
        u[:, col] = res.state.amps
    return u


def project_onto(
    state: StateVector, qubits: tuple[int, ...], block: np.ndarray
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Contract <block| against the given qubits.

    Returns (residual amplitudes on the remaining qubits in ascending
    order, those qubit indices).  The residual norm squared is the
    probability weight on |block>; it is NOT renormalized.
    """
    n = state.n_qubits
    m = len(qubits)
    a = state.amps.reshape([2] * n)
    # keep the caller's precision: extended-precision blocks must not be
    # silently downcast to complex128 here
    vec = np.asarray(block).reshape([2] * m) if m else np.asarray(block)
    state_axes = [n - 1 - q for q in qubits]
    # block axis j corresponds to bit (m-1-j) of the block index
    block_axes = [m - 1 - j for j in range(m)]
    res = np.tensordot(vec.conj(), a, axes=(block_axes, state_axes)) if m else a * block
    rest = tuple(q for q in range(n) if q not in qubits)
    return np.ascontiguousarray(res).reshape(-1), rest


def states_equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        return False
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < tol or nb < tol:
        return bool(na < tol and nb < tol)
    return bool(abs(abs(np.vdot(a, b)) / (na * nb) - 1.0) <= tol)


def block_overlap(state: StateVector, qubits: tuple[int, ...], block: np.ndarray) -> float:
    """Fidelity-style weight: probability that `qubits` hold |block>."""
    res, _ = project_onto(state, qubits, block)
    return float(np.sum(np.abs(res) ** 2))


def effective_unitary(
    circuit: Circuit,
    data_qubits: tuple[int, ...],
    fixed: Mapping[tuple[int, ...], np.ndarray] | None = None,
    *,
    cap: int = DEFAULT_QUBIT_CAP,
    dtype=np.complex128,
) -> tuple[np.ndarray, float]:
    """Action on a data block, with ancilla blocks fixed to given states.

    Ancilla qubits (everything outside data_qubits) start in the supplied
    block states (default |0>) and are projected back onto those same
    states at the end.  Returns (matrix, worst leakage), where leakage for
    a column is sqrt(1 - ||column||^2): the amplitude that left the
    ancilla subspace.  The matrix is exactly unitary iff leakage is zero.
    """
    fixed = dict(fixed or {})
    n = circuit.n_qubits
    ancillas = tuple(q for q in range(n) if q not in data_qubits)
    # one combined reference state over every ancilla qubit (fixed blocks,
    # remaining ones |0>), expressed on the ancilla register alone
    anc_pos = {q: i for i, q in enumerate(ancillas)}
    local_parts = {
        tuple(anc_pos[q] for q in qs): np.asarray(vec, dtype=dtype)
        for qs, vec in fixed.items()
    }
    anc_ref = product_state(max(len(ancillas), 1), local_parts, cap=max(cap, len(ancillas))).amps
    dim = 1 << len(data_qubits)
    mat = np.zeros((dim, dim), dtype=dtype)
    worst = 0.0
    for col in range(dim):
        col_vec = np.zeros(dim, dtype=dtype)
        col_vec[col] = 1.0
        parts: dict[tuple[int, ...], np.ndarray] = {tuple(data_qubits): col_vec}
        for qs, vec in fixed.items():
            parts[qs] = np.asarray(vec, dtype=dtype)
        res = run(circuit, product_state(n, parts, cap=cap), seed=0, cap=cap)
        if ancillas:
            amps, rest = project_onto(res.state, ancillas, anc_ref)
        else:
            amps, rest = res.state.amps, tuple(range(n))
        # rest lists the data qubits ascending; reorder to the given data order
        pos = {q: i for i, q in enumerate(rest)}
        k = len(data_qubits)
        perm = [k - 1 - pos[data_qubits[k - 1 - j]] for j in range(k)]
        column = np.transpose(amps.reshape([2] * k), perm).reshape(-1)
        mat[:, col] = column
        worst = max(worst, math.sqrt(max(0.0, 1.0 - float(np.sum(np.abs(column) ** 2)))))
    return mat, worst


def random_state(n_qubits: int, rng: np.random.Generator, *, cap: int = DEFAULT_QUBIT_CAP) -> StateVector:
    """Haar-random pure state from normalized complex Gaussians."""
    re = rng.standard_normal(1 << n_qubits)
    im = rng.standard_normal(1 << n_qubits)
    amps = re + 1j * im
    amps /= np.linalg.norm(amps)
    return StateVector(n_qubits, amps, cap=cap)


def channel_equal(
    circuit_a: Circuit,
    circuit_b: Circuit,
    n_data: int,
    *,
    trials: int = 20,
    seed: int = DEFAULT_SEED,
    tol: float = 1e-8,
    out_a: tuple[int, ...] | None = None,
    out_b: tuple[int, ...] | None = None,
    cap: int = DEFAULT_QUBIT_CAP,
) -> bool:
    """Monte-Carlo equivalence of two circuits as channels on n_data qubits.

    Both circuits take the data on qubits 0..n_data-1; extra qubits start
    in |0>.  Measurement randomness is resimulated per trial; after frame
    corrections are materialized, every non-output qubit must sit in a
    definite basis state (measured, or returned to |0>), and the state on
    the output qubits must match across circuits up to a global phase.
    """
    out_a = tuple(range(n_data)) if out_a is None else out_a
    out_b = tuple(range(n_data)) if out_b is None else out_b
    master = np.random.default_rng(seed)
    for trial in range(trials):
        psi = random_state(n_data, master, cap=cap)
        va = _run_and_extract(circuit_a, psi, out_a, master, cap)
        vb = _run_and_extract(circuit_b, psi, out_b, master, cap)
        if va is None or vb is None:
            return False
        if not states_equal_up_to_phase(va, vb, tol):
            return False
    return True


def _run_and_extract(
    circuit: Circuit,
    data_state: StateVector,
    out_map: tuple[int, ...],
    rng: np.random.Generator,
    cap: int,
) -> np.ndarray | None:
    n = circuit.n_qubits
    n_data = data_state.n_qubits
    initial = product_state(n, {tuple(range(n_data)): data_state.amps}, cap=cap)
    res = run(circuit, initial, rng=rng, cap=cap)
    corrected = res.frame.apply_to(res.state)
    others = tuple(q for q in range(n) if q not in out_map)
    if others:
        # non-output qubits: measured ones hold their corrected outcome, the
        # rest must have been returned to |0>
        values = [res.qubit_outcomes.get(q, 0) for q in others]
        block = np.zeros(1 << len(others), dtype=np.complex128)
        block[sum(v << j for j, v in enumerate(values))] = 1.0
        amps, rest = project_onto(corrected, others, block)
    else:
        amps, rest = corrected.amps, tuple(range(n))
    weight = float(np.sum(np.abs(amps) ** 2))
    if abs(weight - 1.0) > 1e-9:
        return None  # output entangled with leftover qubits: not a clean channel
    # reorder from ascending physical order to the logical output order
    pos = {q: i for i, q in enumerate(rest)}
    k = len(out_map)
    a = amps.reshape([2] * k)
    # axis for physical qubit rest[i] is (k-1-i); build permutation so that
    # logical bit j (out_map[j]) becomes bit j
    perm = [k - 1 - pos[out_map[k - 1 - j]] for j in range(k)]
    return np.transpose(a, perm).reshape(-1)
