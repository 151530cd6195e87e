import cmath

import numpy as np
import pytest

from phaserep.choi import (
    ProcessMatrix,
    apply_channel,
    choi_from_kraus,
    choi_state,
    choi_vector,
    gate_fidelity,
    process_fidelity,
    process_matrix_from_json,
    process_matrix_to_json,
)
from phaserep.qmat import Operator, QuantumState

X = Operator(np.array([[0.0, 1.0], [1.0, 0.0]]), 1)
S = 1.0 / np.sqrt(2.0)


def test_choi_vector_of_identity_is_bell_state():
    vec = choi_vector(Operator.identity(1))
    assert np.max(np.abs(vec - np.array([S, 0.0, 0.0, S]))) < 1e-14


def test_choi_state_of_x_gate():
    state = choi_state(X)
    assert np.max(np.abs(state.data - np.array([0.0, S, S, 0.0]))) < 1e-14


def test_choi_state_rejects_non_unitary():
    with pytest.raises(ValueError):
        choi_state(Operator(np.diag([1.0, 0.5]), 1))


def test_process_matrix_validation():
    bad = np.zeros((4, 4), dtype=np.complex128)
    bad[0, 1] = 1.0
    with pytest.raises(ValueError):
        ProcessMatrix(bad, 1)  # not Hermitian
    with pytest.raises(ValueError):
        ProcessMatrix(np.diag([0.5, 0.6, -0.1, 0.0]), 1)  # not PSD


def test_choi_from_kraus_unitary_is_rank_one():
    chi = choi_from_kraus([X])
    assert chi.trace == pytest.approx(1.0, abs=1e-12)
    eigs = np.sort(np.linalg.eigvalsh(chi.matrix))
    assert np.max(np.abs(eigs - np.array([0.0, 0.0, 0.0, 1.0]))) < 1e-12


def test_choi_from_kraus_bit_flip_mixture():
    # channel rho -> (1-p) rho + p X rho X
    p = 0.3
    chi = choi_from_kraus([
        np.sqrt(1.0 - p) * np.eye(2),
        np.sqrt(p) * X.matrix,
    ])
    assert chi.trace == pytest.approx(1.0, abs=1e-12)
    assert process_fidelity(chi, Operator.identity(1)) \
        == pytest.approx(1.0 - p, abs=1e-12)
    assert process_fidelity(chi, X) == pytest.approx(p, abs=1e-12)


def test_gate_fidelity_against_closed_forms():
    ident = Operator.identity(1)
    assert gate_fidelity(ident, X) == pytest.approx(0.0, abs=1e-14)
    assert gate_fidelity(X, X) == pytest.approx(1.0, abs=1e-14)
    for theta in (0.2, 1.1, 2.9):
        rz = Operator(np.diag([1.0, cmath.exp(1j * theta)]), 1)
        # |tr diag(1, e^{i t})|^2 / 4 = cos^2(t/2)
        assert gate_fidelity(rz, ident) \
            == pytest.approx(np.cos(theta / 2.0) ** 2, abs=1e-12)


def test_gate_fidelity_requires_matching_width():
    with pytest.raises(ValueError):
        gate_fidelity(Operator.identity(1), Operator.identity(2))


def test_process_fidelity_of_exact_channel():
    chi = choi_from_kraus([X])
    assert process_fidelity(chi, X) == pytest.approx(1.0, abs=1e-12)


def test_process_fidelity_rejects_zero_trace():
    chi = choi_from_kraus([X])
    zero = ProcessMatrix(0.0 * chi.matrix, 1)
    with pytest.raises(ValueError):
        process_fidelity(zero, X)


def test_apply_channel_reproduces_unitary_conjugation(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    state = QuantumState.pure(v / np.linalg.norm(v))
    u = np.array(
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 0, 1],
            [0, 0, 1, 0],
        ],
        dtype=np.complex128,
    )
    chi = choi_from_kraus([u])
    out = apply_channel(chi, state)
    expected = u @ state.density() @ u.conj().T
    assert np.max(np.abs(out - expected)) < 1e-12


def test_apply_channel_scales_with_postselected_kraus():
    # K = I/2 models a 1/4-probability postselection
    chi = choi_from_kraus([0.5 * np.eye(2)])
    rho = np.diag([1.0, 0.0]).astype(np.complex128)
    out = apply_channel(chi, rho)
    assert np.max(np.abs(out - 0.25 * rho)) < 1e-14


def test_apply_channel_trace_d_convention():
    chi = choi_from_kraus([X])
    chi_d = ProcessMatrix(chi.matrix * 2.0, 1, "trace_d")
    rho = np.diag([0.7, 0.3]).astype(np.complex128)
    a = apply_channel(chi, rho)
    b = apply_channel(chi_d, rho)
    assert np.max(np.abs(a - b)) < 1e-13


def test_normalized_rescales_trace():
    chi = choi_from_kraus([0.5 * np.eye(2)])
    assert chi.trace == pytest.approx(0.25, abs=1e-14)
    assert chi.normalized().trace == pytest.approx(1.0, abs=1e-14)


def test_json_round_trip():
    chi = choi_from_kraus([X, 0.2 * np.eye(2)])
    doc = process_matrix_to_json(chi, metadata={"label": "test"})
    back = process_matrix_from_json(doc)
    assert np.array_equal(back.matrix, chi.matrix)
    assert back.qubits == chi.qubits
    assert back.normalization == chi.normalization
    assert doc["metadata"]["label"] == "test"


def test_psd_floor_tolerates_numerical_negatives():
    base = np.diag([0.5, 0.5, 0.0, -1e-10]).astype(np.complex128)
    ProcessMatrix(base, 1)  # within floor: accepted
    with pytest.raises(ValueError):
        ProcessMatrix(np.diag([0.5, 0.5, 0.0, -1e-6]), 1)
