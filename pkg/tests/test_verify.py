"""Numerical verification checks: EB/PM equivalence, w-monotonicity,
cross-model bound consistency."""

from __future__ import annotations

import numpy as np
import pytest

from cvqkd.gaussian import (
    ModePartition,
    condition_on_heterodyne,
    symplectic_eigenvalues,
    von_neumann_entropy,
)
from cvqkd.models import (
    ChannelParams,
    FeasibilityWarning,
    ParameterError,
    SourceParams,
    build_gamma_fab_decoupled,
)
from cvqkd.verify import (
    WPoint,
    cross_model_checks,
    eb_pm_equivalence_check,
    gamma_b_af_of_w,
    w_monotonicity_check,
)

V = 20.0
EPS = 0.04
EPS_A = 0.1
T_GRID = [round(0.05 * k, 2) for k in range(1, 21)]

MEAN_COEFF_ATT = 1.2761549390929883  # sqrt(2*0.9*19/21), 40-digit oracle


def src(t_a: float = 0.9, eps_a: float = EPS_A) -> SourceParams:
    return SourceParams.from_excess_noise(V, t_a, eps_a)


def channel(t: float = 0.5, eps: float = EPS) -> ChannelParams:
    return ChannelParams.from_excess_noise(t, eps)


class TestEbPmEquivalence:
    def test_attenuation_point(self):
        report = eb_pm_equivalence_check(src())
        assert report.passed
        cov_check = report.results[0]
        assert cov_check.name == "eb-pm-conditional-covariance"
        assert "1.1" in cov_check.detail  # T_A*(chi_A + 1) = 1.1

    def test_noiseless_source_prepares_coherent_states(self):
        report = eb_pm_equivalence_check(SourceParams(V=V, T_A=1.0, chi_A=0.0))
        assert report.passed

    def test_mean_coefficient_value(self):
        report = eb_pm_equivalence_check(src())
        mean_check = report.results[1]
        assert f"{MEAN_COEFF_ATT:.12g}" in mean_check.detail
        assert "p sign inverted: True" in mean_check.detail

    def test_randomized_sources(self, rng):
        for _ in range(100):
            t_a = rng.uniform(0.5, 1.5)
            eps_a = rng.uniform(max(0.0, t_a - 1.0), 1.0)  # keep chi_A >= 0
            v = rng.uniform(1.0, 100.0)
            report = eb_pm_equivalence_check(SourceParams.from_excess_noise(v, t_a, eps_a))
            assert report.passed, str(report)

    def test_report_lines_are_machine_readable(self):
        for line in eb_pm_equivalence_check(src()).lines():
            assert line.startswith(("PASS ", "FAIL "))
            assert "deviation=" in line and "tolerance=" in line


class TestGammaBAfOfW:
    def test_half_weight_reproduces_heterodyne_conditioning(self):
        s, ch = src(), channel()
        full = build_gamma_fab_decoupled(s, ch)
        het = condition_on_heterodyne(full, ModePartition(kept=(2,), measured=(0, 1)))
        got = gamma_b_af_of_w(s, ch, 0.5)
        np.testing.assert_allclose(got.data, het.data, atol=1e-10)

    def test_weight_swap_swaps_quadratures(self):
        s, ch = src(), channel()
        g1 = gamma_b_af_of_w(s, ch, 0.3).data
        g2 = gamma_b_af_of_w(s, ch, 0.7).data
        assert g1[0, 0] == pytest.approx(g2[1, 1], abs=1e-12)
        assert g1[1, 1] == pytest.approx(g2[0, 0], abs=1e-12)

    def test_off_balance_weight_raises_eigenvalue(self):
        s, ch = src(), channel()
        nu_half = symplectic_eigenvalues(gamma_b_af_of_w(s, ch, 0.5))[0]
        nu_skew = symplectic_eigenvalues(gamma_b_af_of_w(s, ch, 0.3))[0]
        assert nu_skew > nu_half

    def test_weight_domain(self):
        s, ch = src(), channel()
        for bad in (0.0, 1.0, -0.1, 1.7):
            with pytest.raises(ValueError, match="strictly inside"):
                gamma_b_af_of_w(s, ch, bad)

    def test_wpoint_validates(self):
        s, ch = src(), channel()
        cm = gamma_b_af_of_w(s, ch, 0.4)
        assert WPoint(w=0.4, gamma_b_af=cm).w == 0.4
        with pytest.raises(ValueError, match="strictly inside"):
            WPoint(w=1.0, gamma_b_af=cm)


class TestWMonotonicity:
    @pytest.mark.parametrize("t_a", [0.9, 1.1])
    @pytest.mark.parametrize("t", [0.25, 0.5, 0.75])
    def test_standard_points_pass(self, t_a, t):
        report = w_monotonicity_check(src(t_a), channel(t), samples=99)
        assert report.passed, str(report)

    def test_entropy_strictly_higher_away_from_half(self):
        s, ch = src(), channel()
        e_01 = von_neumann_entropy(gamma_b_af_of_w(s, ch, 0.1))
        e_half = von_neumann_entropy(gamma_b_af_of_w(s, ch, 0.5))
        assert e_01 - e_half > 1e-3

    def test_single_sample_grid_passes(self):
        report = w_monotonicity_check(src(), channel(), samples=1)
        assert report.passed

    def test_sample_count_validated(self):
        with pytest.raises(ValueError, match="samples"):
            w_monotonicity_check(src(), channel(), samples=0)


class TestCrossModelChecks:
    def test_attenuation_grid_passes(self):
        report = cross_model_checks(src(0.9), EPS, T_GRID)
        assert report.passed, str(report)
        summary = report.results[-2]
        assert summary.name == "rr-bound-coincidence-max"
        assert summary.deviation <= 1e-8

    def test_amplification_grid_passes_with_warning(self):
        with pytest.warns(FeasibilityWarning):
            report = cross_model_checks(src(1.1), EPS, T_GRID)
        assert report.passed, str(report)

    def test_lossless_degenerate_grid(self):
        report = cross_model_checks(src(0.9), 0.0, [1.0])
        assert report.passed
        assert report.results[-2].deviation <= 1e-8

    def test_corrupted_tolerance_fails(self):
        report = cross_model_checks(src(0.9), EPS, [0.5], rr_tol=1e-16)
        assert not report.passed
        assert any(not r.passed for r in report.results)

    def test_unit_gain_rejected(self):
        with pytest.raises(ParameterError, match="T_A != 1"):
            cross_model_checks(SourceParams(V=V, T_A=1.0, chi_A=0.1), EPS, [0.5])

    def test_per_point_rows_present(self):
        report = cross_model_checks(src(0.9), EPS, [0.25, 0.75])
        names = [r.name for r in report.results]
        assert "rr-bound-coincidence[T=0.25]" in names
        assert "dr-bound-overestimates[T=0.75]" in names
        assert len(report.results) == 2 * 2 + 2
