"""Tomography design, likelihood ascent, error bars, and the pipeline."""
import math

import numpy as np
import pytest

from phaserep import (
    FitResult,
    MleOptions,
    OpticsParams,
    TomographyDataset,
    choi_from_kraus,
    cu_phase,
    default_design,
    expected_counts,
    experiment_pipeline,
    fit_cosine,
    kron,
    mle_reconstruct,
    monte_carlo_errors,
    phase_gate,
    process_fidelity,
    read_datasets_csv,
    replication_experiment_channel,
    simulate_counts,
    standard_phases,
    write_datasets_csv,
)
from phaserep.qmat import PROJECTOR_KETS
from phaserep.tomo import MEASUREMENT_BASES, SINGLE_QUBIT_STATES, TomographyDesign


def _copy_design_parts(design):
    return list(design.input_kets), [[p for p in s] for s in design.settings]


def _uhlmann(a: np.ndarray, b: np.ndarray) -> float:
    wa, va = np.linalg.eigh(a)
    sqrt_a = (va * np.sqrt(np.clip(wa, 0.0, None))) @ va.conj().T
    w = np.linalg.eigvalsh(sqrt_a @ b @ sqrt_a)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)


# ---------------------------------------------------------------- design


def test_default_design_dimensions():
    design = default_design()
    assert design.n_inputs == len(SINGLE_QUBIT_STATES) ** 2 == 36
    assert design.n_settings == len(MEASUREMENT_BASES) ** 2 == 9
    assert design.size == 36 * 9 * 4 == 1296
    assert design.operators.shape == (1296, 16, 16)
    assert design.matrix.shape == (1296, 256)


def test_default_design_is_identifiable_and_uniform():
    design = default_design()
    assert design.rank == 256
    assert design.identifiable
    assert design.uniform
    # sum of the 6 single-qubit kets' projectors is 3*I, squared over the
    # pair and times d * n_settings: 4 * 9 * 9 = 324
    assert design.operator_sum_scale == pytest.approx(324.0, abs=1e-9)


def test_input_states_span_the_operator_space():
    design = default_design()
    gram = np.array([np.outer(k, k.conj()).reshape(-1)
                     for k in design.input_kets])
    assert np.linalg.matrix_rank(gram) == 16


def test_row_index_layout():
    design = default_design()
    assert design.row_index(0, 0, 0) == 0
    assert design.row_index(0, 0, 3) == 3
    assert design.row_index(0, 1, 0) == 4
    assert design.row_index(1, 0, 0) == 36
    assert design.row_index(35, 8, 3) == design.size - 1


def test_design_rejects_bad_inputs():
    design = default_design()
    kets, settings = _copy_design_parts(design)
    with pytest.raises(ValueError, match="normalized"):
        TomographyDesign([2.0 * kets[0]] + kets[1:], settings)
    broken = [list(s) for s in settings]
    broken[0] = broken[0][:3]
    with pytest.raises(ValueError, match="sum to identity"):
        TomographyDesign(kets, broken)


# --------------------------------------------------------- probabilities


def test_probabilities_sum_to_one_for_unitary_channel():
    design = default_design()
    chi = choi_from_kraus([cu_phase(0.7)])
    p = design.probabilities(chi).reshape(36, 9, 4)
    assert np.all(p >= 0.0)
    assert np.max(np.abs(p.sum(axis=2) - 1.0)) < 1e-12


def test_probability_deficit_matches_postselection_loss():
    # summed over the (uniform) input set, every setting sees the same
    # total: n_inputs times the channel trace
    design = default_design()
    channel = replication_experiment_channel(1.1, OpticsParams.measured())
    p = design.probabilities(channel).reshape(36, 9, 4)
    per_setting = p.sum(axis=(0, 2))
    assert np.max(np.abs(per_setting - 36.0 * channel.trace)) < 1e-10


def test_probabilities_reject_single_qubit_channels():
    design = default_design()
    chi = choi_from_kraus([phase_gate(0.3)])
    with pytest.raises(ValueError, match="two-qubit"):
        design.probabilities(chi)


# ---------------------------------------------------------------- counts


def test_dataset_validation():
    n = default_design().size
    with pytest.raises(ValueError, match="non-negative"):
        TomographyDataset(0.0, -np.ones(n), 10.0)
    with pytest.raises(ValueError, match="finite"):
        TomographyDataset(0.0, np.full(n, np.nan), 10.0)
    with pytest.raises(ValueError, match="flat"):
        TomographyDataset(0.0, np.zeros((2, n)), 10.0)
    ds = TomographyDataset(0.5, np.ones(n), 10.0)
    assert ds.total == pytest.approx(float(n))
    with pytest.raises(ValueError):
        ds.counts[0] = 3.0  # frozen


def test_expected_counts_are_rate_times_probabilities():
    design = default_design()
    chi = choi_from_kraus([cu_phase(1.3)])
    ds = expected_counts(chi, design, 500.0, phase=1.3)
    assert ds.phase == 1.3
    assert ds.rate == 500.0
    np.testing.assert_allclose(ds.counts, 500.0 * design.probabilities(chi))
    with pytest.raises(ValueError, match="rate"):
        expected_counts(chi, design, 0.0)


def test_simulated_counts_are_seed_deterministic():
    design = default_design()
    chi = choi_from_kraus([cu_phase(0.9)])
    a = simulate_counts(chi, design, 200.0, 7)
    b = simulate_counts(chi, design, 200.0, 7)
    c = simulate_counts(chi, design, 200.0, 8)
    assert np.array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)
    assert np.all(a.counts == np.round(a.counts))
    with pytest.raises(ValueError, match="rate"):
        simulate_counts(chi, design, -1.0, 7)


# ------------------------------------------------------------------- MLE


def test_unidentifiable_design_is_rejected():
    base = default_design()
    _, settings = _copy_design_parts(base)
    computational = [np.kron(PROJECTOR_KETS[a], PROJECTOR_KETS[b])
                     for a in "01" for b in "01"]
    design = TomographyDesign(computational, settings)
    assert design.uniform and not design.identifiable
    ds = expected_counts(choi_from_kraus([cu_phase(0.4)]), design, 100.0)
    with pytest.raises(ValueError, match="unidentifiable"):
        mle_reconstruct(ds, design)


def test_nonuniform_design_is_rejected():
    base = default_design()
    kets, settings = _copy_design_parts(base)
    design = TomographyDesign(kets[:-1], settings)  # drop one input
    assert design.identifiable and not design.uniform
    ds = expected_counts(choi_from_kraus([cu_phase(0.4)]), design, 100.0)
    with pytest.raises(ValueError, match="RrhoR"):
        mle_reconstruct(ds, design)


def test_dataset_size_must_match_design():
    design = default_design()
    with pytest.raises(ValueError, match="size"):
        mle_reconstruct(TomographyDataset(0.0, np.ones(10), 5.0), design)


def test_mle_recovers_noiseless_controlled_phase():
    design = default_design()
    target = cu_phase(math.pi / 2)
    ds = expected_counts(choi_from_kraus([target]), design, 1e4)
    result = mle_reconstruct(ds, design)
    assert result.converged
    assert process_fidelity(result.chi, target) > 0.9999
    chi = result.chi.matrix
    assert abs(np.trace(chi).real - 1.0) < 1e-10
    assert np.max(np.abs(chi - chi.conj().T)) < 1e-10
    assert np.linalg.eigvalsh(chi).min() > -1e-8


def test_mle_recovers_sampled_channel():
    design = default_design()
    target = cu_phase(math.pi / 2)
    ds = simulate_counts(choi_from_kraus([target]), design, 1e4, 42)
    result = mle_reconstruct(ds, design)
    assert result.converged
    assert process_fidelity(result.chi, target) > 0.999


def test_mle_loglikelihood_is_monotone():
    design = default_design()
    channel = replication_experiment_channel(0.8, OpticsParams.measured())
    ds = simulate_counts(channel, design, 2e3, 5)
    result = mle_reconstruct(ds, design)
    trace = result.ll_trace
    assert trace[-1] == result.log_likelihood
    gains = np.diff(trace)
    assert np.all(gains >= -1e-9 * (1.0 + np.abs(trace[:-1])))


def test_reconstruction_improves_with_rate():
    design = default_design()
    channel = replication_experiment_channel(math.pi / 2,
                                             OpticsParams.measured())
    truth = channel.normalized().matrix
    fids = []
    for k, rate in enumerate((1e3, 1e4, 1e5)):
        ds = simulate_counts(channel, design, rate, 11 + 100 * k)
        result = mle_reconstruct(ds, design)
        fids.append(_uhlmann(result.chi.matrix, truth))
    assert fids[0] < fids[1] < fids[2]


def test_zero_counts_return_the_flat_process():
    design = default_design()
    ds = TomographyDataset(0.0, np.zeros(design.size), 1.0)
    result = mle_reconstruct(ds, design)
    assert result.converged
    assert result.iterations == 0
    np.testing.assert_allclose(result.chi.matrix, np.eye(16) / 16.0)


def test_sparse_counts_still_reconstruct():
    design = default_design()
    channel = replication_experiment_channel(0.8, OpticsParams.measured())
    ds = simulate_counts(channel, design, 2.0, 0)
    assert 0.0 < ds.total < 100.0
    result = mle_reconstruct(ds, design)
    assert result.converged
    chi = result.chi.matrix
    assert abs(np.trace(chi).real - 1.0) < 1e-10
    assert np.linalg.eigvalsh(chi).min() > -1e-8


def test_mle_respects_iteration_cap():
    design = default_design()
    target = cu_phase(math.pi / 2)
    ds = expected_counts(choi_from_kraus([target]), design, 1e4)
    result = mle_reconstruct(ds, design, MleOptions(max_iterations=3))
    assert not result.converged
    assert result.iterations == 3


# ------------------------------------------------------------ error bars


def test_monte_carlo_needs_at_least_two_trials():
    design = default_design()
    ds = expected_counts(choi_from_kraus([cu_phase(0.4)]), design, 100.0)
    with pytest.raises(ValueError, match="at least 2"):
        monte_carlo_errors(ds, design, 1, {"cu": cu_phase(0.4)}, seed=0)


def test_monte_carlo_is_seed_deterministic():
    design = default_design()
    phi = 0.8
    channel = replication_experiment_channel(phi, OpticsParams.measured())
    ds = simulate_counts(channel, design, 500.0, 1)
    targets = {"cu": cu_phase(phi), "uu": kron(phase_gate(phi),
                                               phase_gate(phi))}
    a = monte_carlo_errors(ds, design, 3, targets, seed=9)
    b = monte_carlo_errors(ds, design, 3, targets, seed=9)
    assert set(a) == {"cu", "uu"}
    for name in a:
        assert a[name].mean == b[name].mean
        assert a[name].std == b[name].std
        assert 0.0 <= a[name].mean <= 1.0
        assert a[name].std >= 0.0


# ------------------------------------------------------------------- fit


def test_fit_cosine_recovers_exact_coefficients():
    phases = standard_phases()
    values = [0.625 + 0.375 * math.cos(p) for p in phases]
    fit = fit_cosine(phases, values)
    assert fit.offset == pytest.approx(0.625, abs=1e-12)
    assert fit.amplitude == pytest.approx(0.375, abs=1e-12)
    assert fit.residual_rms < 1e-12


def test_fit_cosine_on_constant_data_has_zero_amplitude():
    fit = fit_cosine([0.0, 1.0, 2.0], [0.7, 0.7, 0.7])
    assert isinstance(fit, FitResult)
    assert fit.offset == pytest.approx(0.7, abs=1e-12)
    assert fit.amplitude == pytest.approx(0.0, abs=1e-12)


def test_fit_cosine_input_validation():
    with pytest.raises(ValueError, match="pair up"):
        fit_cosine([0.0, 1.0], [0.5])
    with pytest.raises(ValueError, match="distinct"):
        fit_cosine([0.4, 0.4, 0.4], [0.5, 0.5, 0.5])


# -------------------------------------------------------------- pipeline


def test_standard_phases_are_eighths_of_pi():
    phases = standard_phases()
    assert len(phases) == 8
    np.testing.assert_allclose(phases,
                               [k * math.pi / 8.0 for k in range(8)])


def test_pipeline_is_deterministic():
    kwargs = dict(phases=[0.0, math.pi / 2], rate=300.0, seed=7)
    a = experiment_pipeline(OpticsParams.measured(), **kwargs)
    b = experiment_pipeline(OpticsParams.measured(), **kwargs)
    assert a.phases == b.phases
    for x, y in zip(a.rows, b.rows):
        assert np.array_equal(x.dataset.counts, y.dataset.counts)
        assert x.f_cu == y.f_cu
        assert x.f_uu == y.f_uu
    assert a.fit.offset == b.fit.offset
    assert a.fit.amplitude == b.fit.amplitude


def test_pipeline_rows_carry_reference_processes():
    report = experiment_pipeline(OpticsParams.measured(),
                                 phases=[0.0, math.pi / 2], rate=300.0,
                                 seed=7)
    assert report.rate == 300.0 and report.trials == 0 and report.seed == 7
    for row in report.rows:
        ideal = choi_from_kraus([cu_phase(row.phi)])
        assert np.max(np.abs(row.chi_ideal.matrix - ideal.matrix)) < 1e-12
        assert math.isnan(row.f_cu_std) and math.isnan(row.f_uu_std)
        assert row.converged


def test_pipeline_single_phase_skips_the_fit():
    report = experiment_pipeline(OpticsParams.ideal(),
                                 phases=[math.pi / 2], rate=5e4, seed=3)
    assert report.fit is None
    assert report.rows[0].f_cu > 0.999


def test_pipeline_adds_error_bars_when_asked():
    report = experiment_pipeline(OpticsParams.measured(),
                                 phases=[0.0, math.pi / 4], rate=300.0,
                                 seed=2, trials=2)
    for row in report.rows:
        assert math.isfinite(row.f_cu_std) and row.f_cu_std >= 0.0
        assert math.isfinite(row.f_uu_std) and row.f_uu_std >= 0.0


# ------------------------------------------------------------------- csv


def test_counts_csv_round_trip(tmp_path):
    design = default_design()
    chi = choi_from_kraus([cu_phase(0.6)])
    noisy = simulate_counts(chi, design, 150.0, 3, phase=0.6)
    exact = expected_counts(chi, design, 150.0, phase=1.2)  # float counts
    path = tmp_path / "counts.csv"
    write_datasets_csv(path, [noisy, exact], design,
                       header_lines=["# run: round-trip check"])
    text = path.read_text()
    assert text.startswith("# run: round-trip check\n")
    back = read_datasets_csv(path, design)
    assert len(back) == 2
    for original, loaded in zip([noisy, exact], back):
        assert loaded.phase == original.phase
        assert loaded.rate == original.rate
        assert np.array_equal(loaded.counts, original.counts)
