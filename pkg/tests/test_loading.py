"""
Testes para o carregamento diagonal adaptativo
"""

import math

import pytest
import numpy as np
from pathlib import Path

import sys
# Adiciona o diretório raiz ao path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analysis.loading import (
    ABSOLUTE_LOADING_FLOOR,
    LoadingEstimator,
    LoadingMode,
    WngConstraint,
    bounds_evd,
    bounds_gershgorin,
    bounds_trace,
    compute_loading,
    kantorovich_bound,
    kappa_max_from_wng,
    loaded_condition_number,
    required_loading,
)
from src.analysis.numerics import SpectralBounds
from src.core.errors import DimensionMismatchError, InfeasibleConstraintError, InvalidPsdError


def snapshot_deficient_scm(rng, order, snapshots):
    Y = rng.standard_normal((snapshots, order)) + 1j * rng.standard_normal((snapshots, order))
    return Y.T @ Y.conj() / snapshots


def random_psd(rng, order):
    return snapshot_deficient_scm(rng, order, int(rng.integers(1, 2 * order)))


class TestKappaMax:
    """Testes para o mapeamento piso de WNG -> kappa_max."""

    def test_default_floor(self):
        """M = 15, W_min = 10log10(15) - 3 dB."""
        constraint = WngConstraint.from_db(10 * math.log10(15) - 3, 15)

        assert constraint.wng_min == pytest.approx(7.5179, abs=1e-4)
        assert constraint.kappa_max == pytest.approx(5.809, abs=1e-3)
        assert kantorovich_bound(constraint.kappa_max) * constraint.gain_limit == pytest.approx(1.0, abs=1e-12)

    def test_gain_limit_two(self):
        """A = 2 -> 3 + 2 sqrt(2)."""
        assert kappa_max_from_wng(5.0, 10) == pytest.approx(3 + 2 * math.sqrt(2), abs=1e-12)

    def test_closed_form_random(self):
        """4k/(k+1)^2 * A = 1 para A em (1, 100]."""
        rng = np.random.default_rng(3)
        size = 100
        for _ in range(1000):
            gain_limit = 1.0 + 99.0 * (1.0 - rng.random())
            wng_min = size / gain_limit
            kappa = kappa_max_from_wng(wng_min, size)
            assert kantorovich_bound(kappa) * (size / wng_min) == pytest.approx(1.0, abs=1e-12)

    def test_ceiling_gives_unit_kappa(self):
        assert kappa_max_from_wng(15.0, 15) == 1.0
        assert WngConstraint.from_db(10 * math.log10(15), 15).kappa_max == 1.0

    def test_ceiling_tolerance(self):
        """Piso ligeiramente acima do teto (arredondamento em dB) vira o teto, não erro."""
        constraint = WngConstraint.from_db(10 * math.log10(15) + 5e-10, 15)
        assert constraint.wng_min == 15.0
        assert constraint.kappa_max == 1.0

    @pytest.mark.parametrize("wng_min", [0.5, 15.5, -1.0])
    def test_infeasible_floor(self, wng_min):
        with pytest.raises(InfeasibleConstraintError):
            kappa_max_from_wng(wng_min, 15)


class TestRequiredLoading:
    """Testes para required_loading."""

    def test_no_loading_when_conditioned(self):
        assert required_loading(SpectralBounds(1.0, 2.0), 5.0) == 0.0

    def test_closed_form(self):
        """(upper - k lower)/(k - 1)."""
        assert required_loading(SpectralBounds(0.0, 8.0), 5.0) == pytest.approx(2.0)

    def test_unit_kappa_with_spread(self):
        with pytest.raises(InfeasibleConstraintError):
            required_loading(SpectralBounds(0.0, 1.0), 1.0)

    def test_unit_kappa_flat_spectrum(self):
        assert required_loading(SpectralBounds(2.0, 2.0), 1.0) == 0.0


class TestBounds:
    """Testes para os três estimadores de limites."""

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(11)

    def test_trace_reads_only_diagonal(self):
        """Off-diagonal com NaN não afeta o modo Trace."""
        R = np.full((4, 4), np.nan, dtype=complex)
        np.fill_diagonal(R, [1.0, 2.0, 3.0, 4.0])
        bounds = bounds_trace(R)

        assert bounds.lower == 0.0
        assert bounds.upper == pytest.approx(10.0)

    def test_trace_negative_diagonal(self):
        with pytest.raises(InvalidPsdError):
            bounds_trace(np.diag([1.0, -0.5]))

    def test_trace_upper_dominates(self, rng):
        for _ in range(1000):
            R = random_psd(rng, int(rng.integers(2, 10)))
            assert bounds_trace(R).upper >= np.linalg.eigvalsh(R)[-1] * (1 - 1e-12)

    def test_gershgorin_two_by_two(self):
        bounds = bounds_gershgorin(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert (bounds.lower, bounds.upper) == pytest.approx((1.0, 3.0))

    def test_gershgorin_encloses_spectrum(self, rng):
        for _ in range(500):
            R = random_psd(rng, int(rng.integers(2, 10)))
            eigenvalues = np.linalg.eigvalsh(R)
            bounds = bounds_gershgorin(R)
            assert bounds.lower <= max(eigenvalues[0], 0.0) + 1e-12
            assert bounds.upper >= eigenvalues[-1] * (1 - 1e-12)

    def test_evd_exact(self):
        R = np.diag([0.5, 2.0, 4.0])
        assert (bounds_evd(R).lower, bounds_evd(R).upper) == pytest.approx((0.5, 4.0))

    def test_evd_clamps_rank_deficiency(self, rng):
        """lambda_min numérico negativo vira 0."""
        R = snapshot_deficient_scm(rng, 8, 2)
        assert bounds_evd(R).lower >= 0.0


class TestComputeLoading:
    """Testes para compute_loading e LoadingEstimator."""

    @pytest.fixture
    def constraint(self):
        return WngConstraint.from_db(10 * math.log10(15) - 3, 15)

    def test_loaded_condition_number(self, constraint):
        """EVD acerta kappa_max quando carrega; Trace e Gershgorin ficam abaixo."""
        rng = np.random.default_rng(5)
        kappa_max = constraint.kappa_max
        for _ in range(1000):
            R = snapshot_deficient_scm(rng, 15, int(rng.integers(1, 15)))
            exact = compute_loading(R, LoadingMode.EXACT_EVD, constraint)
            if exact.mu > 0:
                kappa = loaded_condition_number(R, exact.mu)
                assert kappa_max * (1 - 1e-9) <= kappa <= kappa_max * (1 + 1e-9)
            for mode in (LoadingMode.TRACE, LoadingMode.GERSHGORIN):
                decision = compute_loading(R, mode, constraint)
                assert loaded_condition_number(R, decision.mu) <= kappa_max * (1 + 1e-9)
                assert decision.kappa_loaded_bound <= kappa_max * (1 + 1e-9)

    def test_loading_ordering(self, constraint):
        """mu_evd <= mu_gershgorin e mu_evd <= mu_trace."""
        rng = np.random.default_rng(8)
        for _ in range(500):
            R = snapshot_deficient_scm(rng, 15, int(rng.integers(1, 40)))
            mu_evd = compute_loading(R, LoadingMode.EXACT_EVD, constraint).mu
            scale = float(np.real(np.trace(R)))
            for mode in (LoadingMode.TRACE, LoadingMode.GERSHGORIN):
                assert mu_evd <= compute_loading(R, mode, constraint).mu * (1 + 1e-9) + 1e-15 * scale

    def test_well_conditioned_needs_no_loading(self, constraint):
        R = np.diag(np.linspace(1.0, 2.0, 15))
        decision = compute_loading(R, LoadingMode.EXACT_EVD, constraint)

        assert decision.mu == 0.0
        assert decision.kappa_unloaded == pytest.approx(2.0)

    @pytest.mark.parametrize("mode", list(LoadingMode))
    def test_zero_window_uses_absolute_floor(self, constraint, mode):
        """Janela nula: piso absoluto mantém R + mu I inversível."""
        decision = compute_loading(np.zeros((15, 15)), mode, constraint)

        assert decision.mu == pytest.approx(ABSOLUTE_LOADING_FLOOR)
        assert decision.kappa_loaded_bound == pytest.approx(1.0)
        assert math.isinf(decision.kappa_unloaded)

    def test_dimension_mismatch(self, constraint):
        with pytest.raises(DimensionMismatchError):
            compute_loading(np.eye(4), LoadingMode.TRACE, constraint)

    def test_estimator_wraps_compute_loading(self, constraint):
        estimator = LoadingEstimator({"wng_min_db": constraint.wng_min_db, "array_size": 15},
                                     LoadingMode.GERSHGORIN)
        R = snapshot_deficient_scm(np.random.default_rng(0), 15, 5)
        decision = estimator.decide(R)
        loaded = LoadingEstimator.loaded(R, decision)

        assert estimator.constraint.kappa_max == pytest.approx(constraint.kappa_max)
        assert np.allclose(loaded - R, decision.mu * np.eye(15))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
