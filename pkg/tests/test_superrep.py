import math

import mpmath
import numpy as np
import pytest

from phaserep.choi import gate_fidelity
from phaserep.gates import phase_gate, toffoli
from phaserep.qmat import Operator
from phaserep.superrep import (
    ReplicationSpec,
    ancilla_imprint,
    asymptotic_sweep,
    build_V,
    default_phi_grid,
    effective_alpha,
    phase_profile,
    replicated_map,
    replication_fidelity,
    sandwich_diagonal,
    sandwich_restricted,
    worst_case_fidelity,
)


def _all_specs(max_total: int):
    for n in range(1, max_total):
        for m in range(1, max_total - n + 1):
            yield ReplicationSpec(copies=n, replicas=m)


def test_spec_validation():
    with pytest.raises(ValueError):
        ReplicationSpec(copies=0, replicas=2)
    with pytest.raises(ValueError):
        ReplicationSpec(copies=2, replicas=0)


def test_window_bounds_hand_table():
    # (N, M) -> (m_min, m_max) evaluated by hand from the ceiling forms
    table = {
        (1, 2): (1, 2),
        (2, 4): (1, 3),
        (3, 9): (3, 6),
        (4, 2): (-1, 3),
        (2, 2): (0, 2),
    }
    for (n, m), (lo, hi) in table.items():
        spec = ReplicationSpec(copies=n, replicas=m)
        assert (spec.m_min, spec.m_max) == (lo, hi)
        assert spec.m_max - spec.m_min == n


def test_phase_profile_piecewise_window():
    profile = phase_profile(ReplicationSpec(copies=2, replicas=4))
    assert [profile(w) for w in range(5)] == [0, 0, 1, 2, 2]
    assert profile.values == (0, 0, 1, 2, 2)


def test_phase_profile_is_monotone_clamped():
    for spec in _all_specs(9):
        values = phase_profile(spec).values
        assert 0 <= values[0] <= spec.copies
        assert values[-1] == min(spec.copies, spec.replicas - spec.m_min)
        assert all(b - a in (0, 1) for a, b in zip(values, values[1:]))


def test_ancilla_imprint_is_unary_prefix():
    spec = ReplicationSpec(copies=3, replicas=4)
    # f(w) leading ancilla bits set: f=(0,0,1,2,3) for the (3,4) window
    assert [ancilla_imprint(spec, w) for w in range(5)] == [0, 0, 4, 6, 7]


def test_build_v_for_one_to_two_is_toffoli():
    v = build_V(ReplicationSpec(copies=1, replicas=2))
    assert np.array_equal(v.matrix, toffoli().matrix)


def test_build_v_is_permutation_and_involution():
    for spec in _all_specs(10):
        mat = build_V(spec).matrix
        assert np.array_equal(mat, mat.astype(bool).astype(float))
        assert np.array_equal(mat.sum(axis=0), np.ones(mat.shape[0]))
        assert np.array_equal(mat.sum(axis=1), np.ones(mat.shape[0]))
        assert np.array_equal(mat @ mat, np.eye(mat.shape[0]))


def test_build_v_case_table_on_cleared_ancilla():
    # V|m>|0> = |m>|k(|m|)> with the imprint's weight equal to f(|m|)
    for spec in _all_specs(10):
        n, m_qubits = spec.copies, spec.replicas
        mat = build_V(spec).matrix
        profile = phase_profile(spec)
        for m in range(1 << m_qubits):
            col = m << n
            k = ancilla_imprint(spec, m.bit_count())
            assert k.bit_count() == profile(m.bit_count())
            expected_row = (m << n) | k
            assert mat[expected_row, col] == 1.0


def test_build_v_xor_extension_off_cleared_sector():
    spec = ReplicationSpec(copies=2, replicas=3)
    mat = build_V(spec).matrix
    for m in range(8):
        k = ancilla_imprint(spec, m.bit_count())
        for anc in range(4):
            assert mat[(m << 2) | (anc ^ k), (m << 2) | anc] == 1.0


def test_sandwich_matches_literal_dense_product():
    # independent oracle: build V (I (x) U^N) V by explicit matmuls
    rng = np.random.default_rng(7)
    for spec in _all_specs(9):
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
        v = build_V(spec).matrix
        u_n = np.array([[1.0]])
        for _ in range(spec.copies):
            u_n = np.kron(u_n, phase_gate(phi).matrix)
        dense = v @ np.kron(np.eye(1 << spec.replicas), u_n) @ v
        diag = sandwich_diagonal(spec, phi)
        assert np.max(np.abs(dense - np.diag(diag))) < 1e-12


def test_sandwich_restriction_equals_replicated_map():
    rng = np.random.default_rng(11)
    for spec in _all_specs(12):
        for phi in rng.uniform(0.0, 2.0 * math.pi, size=4):
            got = sandwich_restricted(spec, float(phi)).matrix
            want = replicated_map(spec, float(phi)).matrix
            assert np.max(np.abs(got - want)) < 1e-12


def test_replicated_map_is_diagonal_phase_imprint():
    spec = ReplicationSpec(copies=2, replicas=4)
    phi = 0.9
    diag = np.diag(replicated_map(spec, phi).matrix)
    profile = phase_profile(spec)
    for m in range(16):
        expected = np.exp(1j * phi * profile(m.bit_count()))
        assert abs(diag[m] - expected) < 1e-14


def test_fidelity_against_high_precision_sum():
    mpmath.mp.dps = 50
    for n, m in ((1, 2), (2, 4), (3, 9), (4, 6), (10, 100)):
        spec = ReplicationSpec(copies=n, replicas=m)
        profile = phase_profile(spec)
        for phi in (0.3, 0.9, 2.2):
            acc = mpmath.mpc(0)
            for w in range(m + 1):
                acc += (
                    mpmath.binomial(m, w)
                    * mpmath.expjpi(mpmath.mpf(phi) * (profile(w) - w)
                                    / mpmath.pi)
                )
            expected = float(abs(acc / mpmath.mpf(2) ** m) ** 2)
            assert abs(replication_fidelity(spec, phi) - expected) < 1e-13


def test_fidelity_closed_form_matches_dense_trace():
    rng = np.random.default_rng(3)
    for spec in _all_specs(11):
        if spec.replicas > 8:
            continue
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
        target = np.array([[1.0]])
        for _ in range(spec.replicas):
            target = np.kron(target, phase_gate(phi).matrix)
        dense = gate_fidelity(
            replicated_map(spec, phi), Operator(target, spec.replicas))
        assert abs(replication_fidelity(spec, phi) - dense) < 1e-10


def test_fidelity_is_one_when_copies_cover_replicas():
    for n, m in ((2, 2), (3, 2), (5, 4), (9, 3)):
        spec = ReplicationSpec(copies=n, replicas=m)
        for phi in (0.1, 1.4, 3.0):
            assert replication_fidelity(spec, phi) == 1.0


def test_fidelity_phase_symmetry():
    spec = ReplicationSpec(copies=2, replicas=5)
    for phi in (0.4, 1.9):
        f = replication_fidelity(spec, phi)
        assert replication_fidelity(spec, -phi) == pytest.approx(f, abs=1e-13)
        assert replication_fidelity(spec, 2 * math.pi - phi) \
            == pytest.approx(f, abs=1e-13)


def test_one_to_two_worst_case_is_quarter():
    phi, fid = worst_case_fidelity(ReplicationSpec(copies=1, replicas=2))
    assert phi == pytest.approx(math.pi, abs=1e-12)
    assert fid == pytest.approx(0.25, abs=1e-12)


def test_worst_case_scans_the_given_grid():
    spec = ReplicationSpec(copies=2, replicas=4)
    grid = np.linspace(0.0, math.pi, 7)
    phi, fid = worst_case_fidelity(spec, grid)
    values = [replication_fidelity(spec, p) for p in grid]
    assert fid == min(values)
    assert phi == grid[int(np.argmin(values))]


def test_default_grid_covers_half_period():
    grid = default_phi_grid()
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(math.pi)


def test_effective_alpha_inverts_power_law():
    assert effective_alpha(4, 8) == pytest.approx(0.5, abs=1e-12)
    assert effective_alpha(9, 27) == pytest.approx(0.5, abs=1e-12)
    assert math.isnan(effective_alpha(1, 2))


def test_sweep_monotone_and_validated():
    rows = asymptotic_sweep(0.5, [4, 9, 16])
    assert [r.replicas for r in rows] == [8, 27, 64]
    fidelities = [r.worst_fidelity for r in rows]
    assert fidelities == sorted(fidelities)
    with pytest.raises(ValueError):
        asymptotic_sweep(0.0, [4])
    with pytest.raises(ValueError):
        asymptotic_sweep(0.5, [4, 9], m_list=[8])


def test_sweep_with_explicit_replica_counts():
    rows = asymptotic_sweep(0.5, [3, 4], m_list=[2, 16])
    assert rows[0].worst_fidelity == 1.0  # N >= M window covers everything
    assert rows[1].replicas == 16
    assert rows[1].alpha == pytest.approx(2.0 - math.log(16) / math.log(4))
