"""N-to-M phase-gate superreplication via Hamming-weight imprinting.

A permutation unitary V copies the Hamming weight w of the M-qubit
register (clipped to the window [m_min, m_max)) into an N-qubit ancilla,
the available gate copies act on the ancilla, and V is applied again.
On the ancilla-|0> sector this realizes the diagonal map with phase
multiple f(w): 0 below the window, w - m_min inside, N above.

Fidelity with the ideal M-fold gate is a binomial sum over weights,
evaluated in log space so that wide registers (M ~ 1000) remain exact to
double precision; no state vectors are ever built on that path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .gates import as_radians
from .qmat import Operator


@dataclass(frozen=True)
class ReplicationSpec:
    """Protocol size: ``copies`` gate uses produce ``replicas`` outputs."""

    copies: int
    replicas: int

    def __post_init__(self):
        if self.copies < 1 or self.replicas < 1:
            raise ValueError("copies and replicas must be positive")

    # Window thresholds, recomputed on demand; chosen symmetrically
    # about replicas/2 so the binomial bulk sits inside the window.
    @property
    def m_min(self) -> int:
        return (self.replicas - self.copies + 1) // 2

    @property
    def m_max(self) -> int:
        return (self.replicas + self.copies + 1) // 2


@dataclass(frozen=True)
class PhaseProfile:
    """Phase multiple f(w) per Hamming weight w (index = weight)."""

    values: tuple[int, ...]

    def __post_init__(self):
        if any(b < a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("phase profile must be non-decreasing")

    def __call__(self, weight: int) -> int:
        return self.values[weight]


def phase_profile(spec: ReplicationSpec) -> PhaseProfile:
    """f(w) = 0 / (w - m_min) / copies below/inside/above the window."""
    values = []
    for w in range(spec.replicas + 1):
        if w < spec.m_min:
            values.append(0)
        elif w < spec.m_max:
            values.append(w - spec.m_min)
        else:
            values.append(spec.copies)
    return PhaseProfile(tuple(values))


def ancilla_imprint(spec: ReplicationSpec, weight: int) -> int:
    """Ancilla bit pattern k for weight w: unary prefix of f(w) ones.

    The |k| = f(w) set bits are placed at the most significant ancilla
    positions; any placement gives the same replicated map, this one
    makes V deterministic.
    """
    count = phase_profile(spec)(weight)
    return (1 << spec.copies) - (1 << (spec.copies - count))


def _weight_table(bits: int) -> np.ndarray:
    w = np.zeros(1, dtype=np.int64)
    for _ in range(bits):
        w = np.concatenate([w, w + 1])
    return w


def _permutation(spec: ReplicationSpec) -> np.ndarray:
    """Index permutation of V: column index -> row index."""
    n, m = spec.copies, spec.replicas
    mask = (1 << n) - 1
    k_by_weight = np.array(
        [ancilla_imprint(spec, w) for w in range(m + 1)], dtype=np.int64
    )
    cols = np.arange(1 << (m + n), dtype=np.int64)
    sys = cols >> n
    anc = cols & mask
    k = k_by_weight[_weight_table(m)[sys]]
    return (sys << n) | (anc ^ k)


def build_V(spec: ReplicationSpec) -> Operator:
    """Imprinting unitary V on replicas + copies qubits.

    Acts as |m>|n> -> |m>|n xor k(m)>, an involution; the system register
    occupies the most significant qubits, the ancilla the least.
    """
    perm = _permutation(spec)
    dim = perm.shape[0]
    mat = np.zeros((dim, dim))
    mat[perm, np.arange(dim)] = 1.0
    return Operator(mat, spec.replicas + spec.copies)


def replicated_map(spec: ReplicationSpec, phi: float) -> Operator:
    """Diagonal map e^{i f(|m|) phi} induced on the replica register."""
    phi = as_radians(phi)
    f = np.array(phase_profile(spec).values, dtype=np.int64)
    diag = np.exp(1j * phi * f[_weight_table(spec.replicas)])
    return Operator(np.diag(diag), spec.replicas)


def sandwich_diagonal(spec: ReplicationSpec, phi: float) -> np.ndarray:
    """Diagonal of V (I ⊗ U(phi)^{⊗copies}) V on the full register.

    V conjugates the ancilla-diagonal phase e^{i phi |n|}, so the result
    is again diagonal with entry e^{i phi |n xor k(m)|} at |m>|n>; this
    is computed through the explicit permutation of V, independently of
    the phase-profile shortcut, and is what the replicated-map tests
    compare against.
    """
    phi = as_radians(phi)
    n = spec.copies
    perm = _permutation(spec)
    anc_weight = _weight_table(n)[
        np.arange(perm.shape[0], dtype=np.int64) & ((1 << n) - 1)
    ]
    return np.exp(1j * phi * anc_weight[perm])


def sandwich_restricted(spec: ReplicationSpec, phi: float) -> Operator:
    """The sandwich restricted to the ancilla-|0> sector (an M-qubit map)."""
    full = sandwich_diagonal(spec, phi)
    sector = full[np.arange(1 << spec.replicas, dtype=np.int64)
                  << spec.copies]
    return Operator(np.diag(sector), spec.replicas)


def replication_fidelity(spec: ReplicationSpec, phi: float) -> float:
    """Gate fidelity of the replicated map with the M-fold ideal gate.

    Equals |sum_w C(M,w) 2^{-M} e^{i (f(w)-w) phi}|^2; binomial weights
    are accumulated in log space and compensated-summed.  When the
    window covers every weight (copies >= replicas) the sum telescopes
    to exactly 1.
    """
    phi = as_radians(phi)
    m = spec.replicas
    f = np.array(phase_profile(spec).values, dtype=np.int64)
    g = f - np.arange(m + 1)
    if g.max() == g.min():
        return 1.0
    w = np.arange(m + 1, dtype=np.float64)
    logc = (gammaln(m + 1.0) - gammaln(w + 1.0) - gammaln(m - w + 1.0)
            - m * math.log(2.0))
    c = np.exp(logc)
    angles = g * phi
    re = math.fsum((c * np.cos(angles)).tolist())
    im = math.fsum((c * np.sin(angles)).tolist())
    return re * re + im * im


def default_phi_grid() -> np.ndarray:
    # F(phi) = F(2*pi - phi), so [0, pi] covers the full range.
    return np.linspace(0.0, math.pi, 513)


def worst_case_fidelity(
    spec: ReplicationSpec, phi_grid: Sequence[float] | None = None
) -> tuple[float, float]:
    """(phi, fidelity) at the grid point of lowest fidelity."""
    grid = default_phi_grid() if phi_grid is None else np.asarray(
        phi_grid, dtype=np.float64
    )
    if grid.size == 0:
        raise ValueError("phi grid must not be empty")
    values = [replication_fidelity(spec, p) for p in grid]
    i = int(np.argmin(values))
    return float(grid[i]), values[i]


@dataclass(frozen=True)
class SweepRow:
    copies: int
    replicas: int
    alpha: float
    worst_phi: float
    worst_fidelity: float


def effective_alpha(copies: int, replicas: int) -> float:
    """alpha with replicas = copies^(2-alpha); nan for a single copy."""
    if copies == 1:
        return float("nan")
    return 2.0 - math.log(replicas) / math.log(copies)


def asymptotic_sweep(
    alpha: float,
    n_list: Sequence[int],
    phi_grid: Sequence[float] | None = None,
    m_list: Sequence[int] | None = None,
) -> list[SweepRow]:
    """Worst-case fidelity per protocol size with M = floor(N^(2-alpha)).

    Passing ``m_list`` overrides the power law with explicit replica
    counts (paired with ``n_list``); the reported alpha is then the
    effective exponent of each pair.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    if m_list is not None and len(m_list) != len(n_list):
        raise ValueError("m_list must pair up with n_list")
    rows = []
    for i, n in enumerate(n_list):
        if m_list is None:
            m = max(1, math.floor(n ** (2.0 - alpha)))
            a = alpha
        else:
            m = int(m_list[i])
            a = effective_alpha(n, m)
        spec = ReplicationSpec(copies=int(n), replicas=m)
        phi, fid = worst_case_fidelity(spec, phi_grid)
        rows.append(SweepRow(int(n), m, a, phi, fid))
    return rows
