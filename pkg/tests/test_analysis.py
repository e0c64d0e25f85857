"""Fitting, efficiency inversion, covariance reconstruction, full pipeline."""

import math

import numpy as np
import pytest

from cvpulse.analysis import (
    EntanglementReport,
    ScanEstimate,
    efficiency_inversion,
    end_to_end_report,
    fit_phase_scan,
    fit_variance_curve,
    reconstruct_covariance,
)
from cvpulse.entanglement import entropy_from_duan_simon
from cvpulse.gaussian import SourceSpec, source_covariance, symmetric_two_mode_covariance
from cvpulse.simulate import (
    DetectorModel,
    PhaseSchedule,
    RunConfig,
    detected_variance,
    sample_pulses,
)

FLAT_DETECTOR = DetectorModel(
    eta_transmission=0.68,
    eta_homodyne=1.0,
    eta_detector=1.0,
    electronic_noise_var=0.0,
)


def _reference_config(schedule, seed=12345, **overrides):
    base = dict(
        source=SourceSpec.symmetric_mixed(1.50, 0.94),
        detector=FLAT_DETECTOR,
        schedule=schedule,
        seed=seed,
    )
    base.update(overrides)
    return RunConfig(**base)


def _noiseless_detector(eta):
    return DetectorModel(
        eta_transmission=eta, eta_homodyne=1.0, eta_detector=1.0, electronic_noise_var=0.0
    )


def test_fit_recovers_exact_sinusoid():
    """A noiseless a + b cos(2 phi) curve is recovered to near machine precision."""
    phases = np.linspace(0.0, 2.0 * math.pi, 40, endpoint=False)
    variances = 1.33 + 0.63 * np.cos(2.0 * phases)
    estimate = fit_variance_curve(phases, variances, samples_per_block=2500)
    assert estimate.v_min == pytest.approx(0.70, abs=1e-9)
    assert estimate.v_max == pytest.approx(1.96, abs=1e-9)
    assert estimate.phase_at_min == pytest.approx(math.pi / 2.0, abs=1e-9)
    assert estimate.n_blocks == 40
    assert estimate.stderr > 0.0


def test_fit_recovers_shifted_minimum():
    """An arbitrary phase offset lands the minimum where the curve says."""
    phases = np.linspace(0.0, 2.0 * math.pi, 50, endpoint=False)
    variances = 1.2 + 0.4 * np.cos(2.0 * phases + 0.8)
    estimate = fit_variance_curve(phases, variances, samples_per_block=1000)
    assert estimate.v_min == pytest.approx(0.8, abs=1e-9)
    expected_min = ((math.pi - 0.8) / 2.0) % math.pi
    assert estimate.phase_at_min == pytest.approx(expected_min, abs=1e-9)


def test_fit_input_validation():
    """Too few blocks, short span, degenerate pattern, bad block size all raise."""
    phases = np.linspace(0.0, 2.0 * math.pi, 40, endpoint=False)
    variances = np.ones_like(phases)
    with pytest.raises(ValueError, match="4 blocks"):
        fit_variance_curve(phases[:3], variances[:3], 100)
    with pytest.raises(ValueError, match="span"):
        fit_variance_curve(phases[:10] * 0.1, variances[:10], 100)
    with pytest.raises(ValueError, match="samples_per_block"):
        fit_variance_curve(phases, variances, 1)
    # exactly two distinct phases pi apart: spans pi but cannot fix 3 parameters
    degenerate = np.array([0.0, math.pi, 0.0, math.pi, 0.0, math.pi])
    with pytest.raises(ValueError, match="degenerate"):
        fit_variance_curve(degenerate, np.ones(6), 100)
    with pytest.raises(ValueError):
        fit_variance_curve(phases, variances[:-1], 100)


def test_fit_phase_scan_on_simulated_fringe():
    """A 10^6-pulse simulated scan reproduces the analytic extremes."""
    schedule = PhaseSchedule.linear_ramp(0.0, 4.0 * math.pi, 1_000_000)
    estimate = fit_phase_scan(sample_pulses(_reference_config(schedule)))
    assert estimate.n_blocks == 400
    assert estimate.v_min == pytest.approx(0.7008, abs=0.01)
    assert estimate.v_max == pytest.approx(1.9792, abs=0.02)
    assert estimate.phase_at_min == pytest.approx(math.pi / 2.0, abs=0.02)
    assert abs(estimate.v_min - 0.7008) <= 4.0 * estimate.stderr


def test_fit_phase_scan_on_vacuum():
    """A blocked-signal scan fits a flat unit curve within its own error bars."""
    schedule = PhaseSchedule.linear_ramp(0.0, 4.0 * math.pi, 400_000)
    cfg = _reference_config(schedule, blocked_arm="signal", seed=4)
    estimate = fit_phase_scan(sample_pulses(cfg))
    assert abs(estimate.v_min - 1.0) <= 5.0 * estimate.stderr
    assert abs(estimate.v_max - 1.0) <= 5.0 * estimate.stderr


def test_efficiency_inversion_reference_values():
    """The published corrections: 0.70 -> 0.56-ish and 1.17 -> 1.50 exactly."""
    assert efficiency_inversion(0.70, 0.68) == pytest.approx(
        1.0 - 0.30 / 0.68, rel=1e-12
    )
    assert efficiency_inversion(0.7008, 0.68) == pytest.approx(0.56, abs=1e-12)
    assert efficiency_inversion(1.17, 0.68, extra_transmission=0.5) == pytest.approx(
        1.50, abs=1e-12
    )


def test_efficiency_inversion_is_exact_inverse():
    """Applying loss then inverting it returns the input variance."""
    rng = np.random.default_rng(8)
    for _ in range(100):
        v = rng.uniform(0.2, 5.0)
        t = rng.uniform(0.05, 1.0)
        measured = t * v + (1.0 - t)
        assert efficiency_inversion(measured, t) == pytest.approx(v, rel=1e-12)


def test_efficiency_inversion_rejects_bad_input():
    with pytest.raises(ValueError):
        efficiency_inversion(0.7, 0.0)
    with pytest.raises(ValueError):
        efficiency_inversion(0.7, 1.2)
    with pytest.raises(ValueError, match="over-correction"):
        efficiency_inversion(0.31, 0.68)  # below the vacuum floor 0.32
    with pytest.raises(ValueError, match="over-correction"):
        efficiency_inversion(1.0 - 0.68, 0.68)


def test_reconstruct_covariance_reference_state():
    """The published corrected pair (1.50, 0.56) yields the published witnesses."""
    gamma, report = reconstruct_covariance(1.50, 0.56, efficiency_used=0.68)
    np.testing.assert_allclose(
        gamma, symmetric_two_mode_covariance(1.50, 0.94, 0.94), atol=1e-12
    )
    assert report.corrected_correlation == pytest.approx(0.94, abs=1e-12)
    assert report.duan_simon == pytest.approx(1.12, abs=1e-12)
    assert report.entropy_of_formation == pytest.approx(0.4352253867881952, abs=1e-12)
    assert report.reid_product == pytest.approx(0.8297995377777778, abs=1e-12)
    assert report.nonseparable
    assert report.efficiency_used == 0.68
    assert report.raw_squeezed_variance is None  # analytic route carries no raw data


def test_reconstruct_covariance_rejects_unphysical():
    """A squeezed value too small for the diagonal variance is caught."""
    with pytest.raises(ValueError, match="unphysical"):
        reconstruct_covariance(1.0, 0.1)
    with pytest.raises(ValueError):
        reconstruct_covariance(-1.0, 0.5)
    with pytest.raises(ValueError):
        reconstruct_covariance(1.5, 0.0)


def test_single_beam_identity():
    """Blocked-arm detected variance equals eta/2 * V + 1 - eta/2 analytically."""
    rng = np.random.default_rng(17)
    for _ in range(100):
        v = rng.uniform(1.0, 3.0)
        k = rng.uniform(0.0, 0.999) * math.sqrt(v * v - 1.0)
        eta = rng.uniform(0.3, 1.0)
        cfg = RunConfig(
            source=SourceSpec.symmetric_mixed(v, k),
            detector=_noiseless_detector(eta),
            schedule=PhaseSchedule.constant(0.0, 1),
            blocked_arm="b",
        )
        phi = rng.uniform(0.0, 2.0 * math.pi)
        expected = 0.5 * eta * v + 1.0 - 0.5 * eta
        assert detected_variance(cfg, phi) == pytest.approx(expected, abs=1e-12)


def test_loss_inversion_round_trip():
    """Correcting the analytic detected variances recovers the source exactly."""
    rng = np.random.default_rng(23)
    for _ in range(100):
        v = rng.uniform(1.05, 3.0)
        k = rng.uniform(0.1, 0.999) * math.sqrt(v * v - 1.0)
        eta = rng.uniform(0.3, 1.0)
        source = SourceSpec.symmetric_mixed(v, k)
        cfg = RunConfig(
            source=source,
            detector=_noiseless_detector(eta),
            schedule=PhaseSchedule.constant(0.0, 1),
        )
        squeezed_meas = detected_variance(cfg, math.pi / 2.0)
        single_meas = detected_variance(
            RunConfig(
                source=source,
                detector=_noiseless_detector(eta),
                schedule=PhaseSchedule.constant(0.0, 1),
                blocked_arm="b",
            ),
            0.0,
        )
        squeezed_corr = efficiency_inversion(squeezed_meas, eta)
        v_corr = efficiency_inversion(single_meas, eta, extra_transmission=0.5)
        assert squeezed_corr == pytest.approx(v - k, rel=1e-9)
        assert v_corr == pytest.approx(v, rel=1e-9)
        gamma, report = reconstruct_covariance(v_corr, squeezed_corr)
        np.testing.assert_allclose(gamma, source_covariance(source), atol=1e-9)
        assert report.duan_simon == pytest.approx(2.0 * (v - k), rel=1e-9)


def test_end_to_end_report_reference_run():
    """The three-scan pipeline lands on the published values in one call."""
    cfg = _reference_config(PhaseSchedule.constant(0.0, 1))
    report = end_to_end_report(cfg, pulses_per_scan=400_000)
    assert report.raw_squeezed_variance == pytest.approx(0.7008, abs=0.01)
    assert report.raw_antisqueezed_variance == pytest.approx(1.9792, abs=0.03)
    assert report.raw_single_beam_variance == pytest.approx(1.17, abs=0.01)
    assert report.corrected_squeezed_variance == pytest.approx(0.56, abs=0.015)
    assert report.corrected_variance == pytest.approx(1.50, abs=0.03)
    assert report.duan_simon == pytest.approx(1.12, abs=0.03)
    assert report.entropy_of_formation == pytest.approx(0.44, abs=0.04)
    assert report.nonseparable
    assert report.antisqueezed_consistent
    assert report.efficiency_used == pytest.approx(0.68, abs=1e-12)
    assert report.seed == 12345
    assert report.pulses_per_scan == 400_000
    # internal consistency of the symmetric reconstruction
    assert report.duan_simon == pytest.approx(
        2.0 * report.corrected_squeezed_variance, rel=1e-9
    )
    assert report.duan_simon_stderr is not None and report.duan_simon_stderr > 0.0
    # report serializes and prints
    as_dict = report.to_dict()
    assert as_dict["duan_simon"] == report.duan_simon
    assert "verdict" in report.text_table()


def test_end_to_end_report_is_deterministic():
    """Same seed, same report; different seed, different raw numbers."""
    cfg = _reference_config(PhaseSchedule.constant(0.0, 1), seed=99)
    first = end_to_end_report(cfg, pulses_per_scan=50_000)
    second = end_to_end_report(cfg, pulses_per_scan=50_000)
    assert first.duan_simon == second.duan_simon
    assert first.raw_squeezed_variance == second.raw_squeezed_variance
    other = end_to_end_report(
        _reference_config(PhaseSchedule.constant(0.0, 1), seed=100), pulses_per_scan=50_000
    )
    assert other.raw_squeezed_variance != first.raw_squeezed_variance


def test_end_to_end_error_bars_are_honest():
    """The 95% interval on the sum variance covers the truth at the right rate."""
    truth = 1.12
    hits = 0
    n_seeds = 200
    for seed in range(n_seeds):
        cfg = _reference_config(PhaseSchedule.constant(0.0, 1), seed=seed)
        report = end_to_end_report(cfg, pulses_per_scan=100_000)
        half_width = 1.96 * report.duan_simon_stderr
        if abs(report.duan_simon - truth) <= half_width:
            hits += 1
    assert 0.90 <= hits / n_seeds <= 1.00


def test_electronic_noise_subtraction():
    """Subtracting the electronic floor removes its bias from the correction."""
    noisy = DetectorModel(
        eta_transmission=0.68, eta_homodyne=1.0, eta_detector=1.0,
        electronic_noise_var=10.0**-1.1,
    )
    cfg = _reference_config(PhaseSchedule.constant(0.0, 1), detector=noisy, seed=7)
    biased = end_to_end_report(cfg, pulses_per_scan=200_000)
    clean = end_to_end_report(cfg, pulses_per_scan=200_000, subtract_electronic_noise=True)
    assert clean.corrected_squeezed_variance == pytest.approx(0.56, abs=0.03)
    bias = noisy.electronic_noise_var / noisy.efficiency
    assert (
        biased.corrected_squeezed_variance - clean.corrected_squeezed_variance
        == pytest.approx(bias, abs=0.01)
    )
    assert clean.antisqueezed_consistent
    # skipping the subtraction leaves a ~3x noise-variance gap the flag catches
    assert not biased.antisqueezed_consistent


def test_scan_mismatch_detection(monkeypatch):
    """A doctored phase-pi scan trips the cross-scan consistency guard."""
    import cvpulse.analysis as analysis_module

    real_sampler = sample_pulses

    def skewed(config, *args, **kwargs):
        train = real_sampler(config, *args, **kwargs)
        if abs(config.theta - math.pi) < 1e-9:
            return type(train)(
                index=train.index, lo_phase=train.lo_phase, value=train.value * 1.3
            )
        return train

    monkeypatch.setattr(analysis_module, "sample_pulses", skewed)
    cfg = _reference_config(PhaseSchedule.constant(0.0, 1), seed=3)
    with pytest.raises(RuntimeError, match="disagree"):
        end_to_end_report(cfg, pulses_per_scan=100_000)


def test_uncorrected_entanglement_degrades_with_loss():
    """Ebits certified from raw detected variances never grow as loss increases."""
    etas = np.linspace(0.05, 1.0, 40)
    ebits = []
    for eta in etas:
        cfg = RunConfig(
            source=SourceSpec.symmetric_mixed(1.50, 0.94),
            detector=_noiseless_detector(float(eta)),
            schedule=PhaseSchedule.constant(0.0, 1),
        )
        squeezed = detected_variance(cfg, math.pi / 2.0)
        ebits.append(entropy_from_duan_simon(2.0 * squeezed))
    diffs = np.diff(ebits)
    assert np.all(diffs >= -1e-12)
    assert ebits[-1] > ebits[0]  # strictly better at eta = 1 than at heavy loss
