"""Choi representations of quantum channels and the derived fidelities.

Convention: the first register of a Choi state/matrix is the reference
(identity) side, the second carries the channel.  With the normalized
maximally entangled state |Phi> = 2^{-n/2} sum_m |m>|m>, a trace-preserving
channel has Tr(chi) = 1; postselected (trace-nonincreasing) maps yield
sub-normalized matrices and are first-class citizens here.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .qmat import Operator, QuantumState, UNITARY_ATOL

NORMALIZATIONS = ("trace_one", "trace_d")


def _phi_vector(qubits: int) -> np.ndarray:
    # |Phi> = 2^{-n/2} sum_m |m>|m>
    d = 2 ** qubits
    vec = np.zeros(d * d, dtype=np.complex128)
    vec[:: d + 1] = 1.0 / np.sqrt(d)
    return vec


def choi_vector(u: Operator) -> np.ndarray:
    """(I ⊗ U)|Phi> as a flat length-4^n vector; no unitarity check."""
    d = u.dim
    # component at index m*d + a is U[a, m] / sqrt(d)
    return u.matrix.T.reshape(-1) / np.sqrt(d)


def choi_state(u: Operator) -> QuantumState:
    """Choi state |Phi_U> = (I ⊗ U)|Phi> of a unitary."""
    if not u.is_unitary():
        raise ValueError("choi_state requires a unitary operator")
    return QuantumState("pure", choi_vector(u), 2 * u.qubits)


@dataclass(frozen=True)
class ProcessMatrix:
    """Choi matrix of an n-qubit channel with a normalization tag.

    ``normalization`` names the convention family: under ``trace_one`` a
    trace-preserving channel has unit trace (sub-normalized postselected
    maps have smaller trace); ``trace_d`` is the unnormalized-EPR variant
    where a trace-preserving channel has trace 2^n.
    """

    matrix: np.ndarray
    qubits: int
    normalization: str = "trace_one"

    def __post_init__(self):
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(
                f"normalization must be one of {NORMALIZATIONS}"
            )
        m = np.array(self.matrix, dtype=np.complex128)
        d2 = 4 ** self.qubits
        if m.shape != (d2, d2):
            raise ValueError(
                f"process matrix for {self.qubits} qubits must be "
                f"{d2}x{d2}"
            )
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError("process matrix must be Hermitian")
        low = float(np.min(np.linalg.eigvalsh(m)))
        scale = max(1.0, float(np.trace(m).real))
        if low < -1e-8 * scale:
            raise ValueError(f"process matrix has eigenvalue {low} < 0")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension of the channel (2^qubits)."""
        return 2 ** self.qubits

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> "ProcessMatrix":
        """Rescale to unit trace (``trace_one`` tag)."""
        tr = self.trace
        if tr <= 0.0:
            raise ValueError("cannot normalize a process matrix with "
                             "non-positive trace")
        return ProcessMatrix(self.matrix / tr, self.qubits, "trace_one")


def choi_from_kraus(
    operators: Sequence[Operator | np.ndarray],
) -> ProcessMatrix:
    """chi = sum_k (I ⊗ K_k)|Phi><Phi|(I ⊗ K_k)†, unnormalized trace.

    The trace equals sum_k Tr[K_k† K_k] / 2^n, i.e. 1 for a
    trace-preserving set and less for postselected maps.
    """
    mats = []
    for op in operators:
        mats.append(op.matrix if isinstance(op, Operator) else
                    np.asarray(op, dtype=np.complex128))
    if not mats:
        raise ValueError("need at least one Kraus operator")
    d = mats[0].shape[0]
    if any(m.shape != (d, d) for m in mats):
        raise ValueError("Kraus operators must share one dimension")
    n = int(round(np.log2(d)))
    if 2 ** n != d:
        raise ValueError("Kraus dimension must be a power of 2")
    chi = np.zeros((d * d, d * d), dtype=np.complex128)
    for m in mats:
        v = m.T.reshape(-1) / np.sqrt(d)
        chi += np.outer(v, v.conj())
    return ProcessMatrix(chi, n, "trace_one")


def gate_fidelity(u1: Operator, u2: Operator) -> float:
    """|Tr[U2† U1]|² / 2^{2n} — overlap of the two Choi states.

    Both operators are expected to be unitary (not re-verified here, to
    keep wide-register sweeps cheap); dimensions must match.
    """
    if u1.qubits != u2.qubits:
        raise ValueError("gate_fidelity requires equal dimensions")
    tr = np.trace(u2.matrix.conj().T @ u1.matrix)
    return float(abs(tr) ** 2) / (u1.dim ** 2)


def process_fidelity(chi: ProcessMatrix, u: Operator) -> float:
    """F = <Phi_U| chi |Phi_U> / Tr[chi]; invariant under chi rescaling."""
    if u.qubits != chi.qubits:
        raise ValueError("process_fidelity requires matching qubit counts")
    tr = chi.trace
    if tr <= 0.0:
        raise ValueError("process matrix trace must be positive")
    v = choi_vector(u)
    f = float(np.real(v.conj() @ chi.matrix @ v)) / tr
    # Clip float noise; chi is PSD so f is in [0, 1] mathematically.
    return min(max(f, 0.0), 1.0)


def apply_channel(
    chi: ProcessMatrix, rho: QuantumState | np.ndarray
) -> np.ndarray:
    """Act with the channel on a density matrix.

    Returns the bare output density matrix, possibly sub-normalized when
    the channel is trace-nonincreasing (its trace is then the success
    probability of the postselected map).
    """
    if isinstance(rho, QuantumState):
        if rho.qubits != chi.qubits:
            raise ValueError("state and channel qubit counts differ")
        rho_m = rho.density()
    else:
        rho_m = np.asarray(rho, dtype=np.complex128)
        if rho_m.shape != (chi.dim, chi.dim):
            raise ValueError("state and channel dimensions differ")
    d = chi.dim
    chi4 = chi.matrix.reshape(d, d, d, d)
    out = np.einsum("mn,manb->ab", rho_m, chi4)
    if chi.normalization == "trace_one":
        out = out * d
    return out


def process_matrix_to_json(
    chi: ProcessMatrix, metadata: dict | None = None
) -> dict:
    """JSON-safe dict with real/imag parts and the convention metadata."""
    doc = {
        "qubits": chi.qubits,
        "normalization": chi.normalization,
        "convention": "first register is the reference (identity) side",
        "real": chi.matrix.real.tolist(),
        "imag": chi.matrix.imag.tolist(),
    }
    if metadata:
        doc["metadata"] = dict(metadata)
    return doc


def process_matrix_from_json(doc: dict) -> ProcessMatrix:
    m = np.array(doc["real"], dtype=np.float64) + 1j * np.array(
        doc["imag"], dtype=np.float64
    )
    return ProcessMatrix(m, int(doc["qubits"]), doc["normalization"])
