"""Linear-optical model of the three-qubit gate behind the replication.

Encoding: the signal photon carries two qubits — spatial path (upper
``u`` = |0>, lower ``l`` = |1>) and polarization (``H`` = |0>, ``V`` =
|1>) — and the idler photon's polarization is the target qubit.  Only
the lower signal path overlaps the idler on a partially polarizing beam
splitter (PPBS, reflectances R_H and R_V); the upper path traverses an
identical splitter against vacuum, so single-photon attenuation is path
independent.  Ideal balancing attenuators of amplitude sqrt(1/3) act on
the horizontal modes, and ideal polarization Hadamards sandwich the
idler, turning the postselected controlled-controlled-Z into a Toffoli.

At the design point (R_V = 2/3, R_H = 0, full interference) the
coincidence-basis map is exactly Toffoli/3: success probability 1/9 for
every input.  Partial photon distinguishability is a two-point mixture:
weight V of the fully interfering (bosonic) sector and 1-V of the
distinguishable sector, in which the transmit-transmit and
reflect-reflect coincidence classes contribute incoherently.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .choi import ProcessMatrix, choi_from_kraus
from .gates import as_radians
from .qmat import Operator

MODES = ("uH", "uV", "lH", "lV", "iH", "iV", "xH", "xV")
SECTORS = ("interfering", "distinguishable")

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_SQRT_THIRD = 1.0 / math.sqrt(3.0)

# Balancing attenuators on the horizontal modes (fixed at the ideal
# design value; they are alignment elements, not noise parameters).
ATTENUATION = {"uH": _SQRT_THIRD, "lH": _SQRT_THIRD, "iH": _SQRT_THIRD}


@dataclass(frozen=True)
class OpticsParams:
    """PPBS reflectances, interference visibility, and phase jitter."""

    r_v: float
    r_h: float
    visibility: float
    phase_jitter_sigma: float = 0.0

    def __post_init__(self):
        for name in ("r_v", "r_h", "visibility"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")
        if self.phase_jitter_sigma < 0.0:
            raise ValueError("phase_jitter_sigma must be non-negative")

    @classmethod
    def ideal(cls) -> "OpticsParams":
        return cls(r_v=2.0 / 3.0, r_h=0.0, visibility=1.0,
                   phase_jitter_sigma=0.0)

    @classmethod
    def measured(cls, phase_jitter_sigma: float = 0.0) -> "OpticsParams":
        return cls(r_v=0.660, r_h=0.017, visibility=0.958,
                   phase_jitter_sigma=phase_jitter_sigma)


ModeMap = Mapping[str, Sequence[tuple[str, complex]]]


@dataclass
class OpticalState:
    """Amplitudes over one- or two-photon occupation patterns.

    Keys are mode tuples.  In the ``interfering`` sector two-photon keys
    are unordered (stored sorted) with the bosonic convention that a
    doubly occupied mode ``(m, m)`` holds the amplitude of
    (a_m^dag)^2 |0> / sqrt(2); in the ``distinguishable`` sector keys
    are ordered per photon label.  Total squared amplitude may drop
    below 1 under attenuation and postselection, never above.
    """

    amplitudes: dict[tuple[str, ...], complex]
    sector: str = "interfering"

    def __post_init__(self):
        if self.sector not in SECTORS:
            raise ValueError(f"sector must be one of {SECTORS}")
        sizes = set()
        for key in self.amplitudes:
            if any(m not in MODES for m in key):
                raise ValueError(f"unknown mode in key {key!r}")
            if self.sector == "interfering" and len(key) == 2:
                if key != tuple(sorted(key)):
                    raise ValueError("bosonic two-photon keys are sorted")
            sizes.add(len(key))
        if len(sizes) > 1 or (sizes and sizes - {1, 2}):
            raise ValueError("state must hold one or two photons")
        if self.norm_squared() > 1.0 + 1e-10:
            raise ValueError("total squared amplitude exceeds 1")

    def norm_squared(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def transformed(self, mode_map: ModeMap) -> "OpticalState":
        """Apply a single-photon linear-optical element to each photon."""

        def images(mode):
            return mode_map.get(mode, ((mode, 1.0),))

        out: dict = defaultdict(complex)
        if not self.amplitudes:
            return OpticalState({}, self.sector)
        if len(next(iter(self.amplitudes))) == 1:
            for (mode,), amp in self.amplitudes.items():
                for mode2, c in images(mode):
                    out[(mode2,)] += amp * c
            return OpticalState(dict(out), self.sector)

        # Expand to the ordered two-photon tensor, transform each leg,
        # then fold back (resymmetrizing in the bosonic sector).
        psi: dict = defaultdict(complex)
        for (a, b), amp in self.amplitudes.items():
            if self.sector == "interfering" and a != b:
                psi[(a, b)] += amp * _SQRT_HALF
                psi[(b, a)] += amp * _SQRT_HALF
            else:
                psi[(a, b)] += amp
        psi2: dict = defaultdict(complex)
        for (a, b), c0 in psi.items():
            for a2, ca in images(a):
                for b2, cb in images(b):
                    psi2[(a2, b2)] += c0 * ca * cb
        if self.sector == "distinguishable":
            out.update(psi2)
        else:
            for (a, b), val in psi2.items():
                if a == b:
                    out[(a, b)] += val
                else:
                    out[tuple(sorted((a, b)))] += val * _SQRT_HALF
        cleaned = {k: v for k, v in out.items() if abs(v) > 1e-15}
        return OpticalState(cleaned, self.sector)

    def attenuated(self, factors: Mapping[str, float]) -> "OpticalState":
        """Lossy element: scale each mode's amplitude by its factor <= 1."""
        if any(f > 1.0 + 1e-12 for f in factors.values()):
            raise ValueError("attenuation factors must not exceed 1")
        out = {}
        for key, amp in self.amplitudes.items():
            for mode in key:
                amp = amp * factors.get(mode, 1.0)
            out[key] = amp
        return OpticalState(out, self.sector)


def _ppbs_map(params: OpticsParams) -> ModeMap:
    mode_map = {}
    for pol, refl in (("H", params.r_h), ("V", params.r_v)):
        t = math.sqrt(1.0 - refl)
        r = math.sqrt(refl)
        mode_map["l" + pol] = (("l" + pol, t), ("i" + pol, 1j * r))
        mode_map["i" + pol] = (("i" + pol, t), ("l" + pol, 1j * r))
        mode_map["u" + pol] = (("u" + pol, t), ("x" + pol, 1j * r))
        mode_map["x" + pol] = (("x" + pol, t), ("u" + pol, 1j * r))
    return mode_map


_IDLER_HADAMARD: ModeMap = {
    "iH": (("iH", _SQRT_HALF), ("iV", _SQRT_HALF)),
    "iV": (("iH", _SQRT_HALF), ("iV", -_SQRT_HALF)),
}


def ppbs_transform(state: OpticalState, params: OpticsParams
                   ) -> OpticalState:
    """Beam-splitter action of the PPBS on all mode pairs it couples.

    Unitary on the full mode space (the ``x`` modes complete the upper
    path's splitter), so the norm is preserved until postselection.
    """
    return state.transformed(_ppbs_map(params))


def _basis_modes(index: int) -> tuple[str, str]:
    s, p, q = (index >> 2) & 1, (index >> 1) & 1, index & 1
    signal = ("l" if s else "u") + ("V" if p else "H")
    idler = "i" + ("V" if q else "H")
    return signal, idler


def _qubit_index(signal_mode: str, idler_mode: str) -> int:
    s = 1 if signal_mode[0] == "l" else 0
    p = 1 if signal_mode[1] == "V" else 0
    q = 1 if idler_mode[1] == "V" else 0
    return 4 * s + 2 * p + q


def sector_operators(
    params: OpticsParams,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unweighted coincidence maps of the gate network, by sector.

    Returns (interfering, transmit-transmit, reflect-reflect) 8x8
    matrices.  The interfering map is the coherent sum of the two
    distinguishable-sector classes.
    """
    m_int = np.zeros((8, 8), dtype=np.complex128)
    k_tt = np.zeros((8, 8), dtype=np.complex128)
    k_rr = np.zeros((8, 8), dtype=np.complex128)
    for col in range(8):
        signal, idler = _basis_modes(col)
        for sector in SECTORS:
            if sector == "interfering":
                key = tuple(sorted((signal, idler)))
            else:
                key = (signal, idler)  # photon 1 = signal, photon 2 = idler
            state = OpticalState({key: 1.0}, sector)
            state = state.transformed(_IDLER_HADAMARD)
            state = ppbs_transform(state, params)
            state = state.attenuated(ATTENUATION)
            state = state.transformed(_IDLER_HADAMARD)
            for (m1, m2), amp in state.amplitudes.items():
                regions = (m1[0], m2[0])
                if sector == "interfering":
                    if regions[0] in "ul" and regions[1] == "i":
                        m_int[_qubit_index(m1, m2), col] += amp
                    elif regions[0] == "i" and regions[1] in "ul":
                        m_int[_qubit_index(m2, m1), col] += amp
                else:
                    if regions[0] in "ul" and regions[1] == "i":
                        k_tt[_qubit_index(m1, m2), col] += amp
                    elif regions[0] == "i" and regions[1] in "ul":
                        # photon labels swapped across the output regions
                        k_rr[_qubit_index(m2, m1), col] += amp
    return m_int, k_tt, k_rr


def effective_toffoli(
    params: OpticsParams,
) -> tuple[list[Operator], float]:
    """Coincidence-basis three-qubit channel of the optical network.

    Returns the weighted Kraus operators of the sector mixture together
    with the success probability for the maximally mixed input.  With
    ideal parameters the channel is rank one and equals Toffoli/3.
    """
    m_int, k_tt, k_rr = sector_operators(params)
    v = params.visibility
    kraus = []
    if v > 0.0:
        kraus.append(Operator(math.sqrt(v) * m_int, 3))
    if v < 1.0:
        w = math.sqrt(1.0 - v)
        kraus.append(Operator(w * k_tt, 3))
        kraus.append(Operator(w * k_rr, 3))
    gram = sum(k.matrix.conj().T @ k.matrix for k in kraus)
    success = float(np.trace(gram).real) / 8.0
    return kraus, success


def _z_on_qubit(qubits: int, qubit: int) -> np.ndarray:
    z = np.eye(1)
    for i in range(qubits):
        z = np.kron(z, np.diag([1.0, -1.0]) if i == qubit else np.eye(2))
    return z


def dephase_spatial(
    channel: "ProcessMatrix | Sequence[Operator | np.ndarray]",
    sigma: float,
    qubit: int = 0,
):
    """Gaussian phase jitter on the spatial qubit, applied analytically.

    A random phase e^{i theta} with theta ~ Normal(0, sigma^2) on the
    |1> path damps spatial coherences by lambda = e^{-sigma^2/2};
    equivalently a phase-flip channel with flip weight (1-lambda)/2.
    Accepts and returns either a ProcessMatrix or a Kraus list.
    """
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0.0:
        return channel
    lam = math.exp(-0.5 * sigma * sigma)
    p_keep = 0.5 * (1.0 + lam)
    if isinstance(channel, ProcessMatrix):
        n = channel.qubits
        d = 2 ** n
        zz = np.kron(np.eye(d), _z_on_qubit(n, qubit))
        chi = p_keep * channel.matrix + (1.0 - p_keep) * (
            zz @ channel.matrix @ zz
        )
        return ProcessMatrix(chi, n, channel.normalization)
    mats = [k.matrix if isinstance(k, Operator) else np.asarray(k)
            for k in channel]
    n = int(round(math.log2(mats[0].shape[0])))
    z = _z_on_qubit(n, qubit)
    out = [Operator(math.sqrt(p_keep) * m, n) for m in mats]
    out += [Operator(math.sqrt(1.0 - p_keep) * (z @ m), n) for m in mats]
    return out


def replication_experiment_channel(
    phi: float, params: OpticsParams, project: bool = True
) -> ProcessMatrix:
    """Two-qubit channel of the simulated replication experiment.

    Composes the optical Toffoli with an ideal phase gate on the idler,
    projects the idler onto |+> (or traces it out when ``project`` is
    false, for success-rate comparisons), applies the configured spatial
    dephasing, and returns the sub-normalized process matrix.
    """
    phi = as_radians(phi)
    kraus3, _ = effective_toffoli(params)
    phase = np.exp(1j * phi)
    kraus2 = []
    for k in kraus3:
        # idler enters in |0>; apply the phase gate to its output leg
        b = k.matrix.reshape(4, 2, 4, 2)[:, :, :, 0].copy()
        b[:, 1, :] *= phase
        if project:
            kraus2.append((b[:, 0, :] + b[:, 1, :]) * _SQRT_HALF)
        else:
            kraus2.extend([b[:, 0, :], b[:, 1, :]])
    if params.phase_jitter_sigma > 0.0:
        kraus2 = dephase_spatial(kraus2, params.phase_jitter_sigma, qubit=0)
    return choi_from_kraus(kraus2)
