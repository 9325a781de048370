"""
Testes para o mundo simulado (ULA, nascimento/morte, ECM, snapshots)
"""

import math

import pytest
import numpy as np
from dataclasses import replace
from pathlib import Path

import sys
# Adiciona o diretório raiz ao path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.config import ScenarioConfig
from src.core.errors import ConfigError
from src.simulation.scenario import (
    InterfererState,
    ScenarioSimulator,
    UlaGeometry,
    allowed_angles,
    capon_spectrum,
    draw_snapshot,
    step_birth_death,
    steering_vector,
    true_ecm,
)


class TestSteering:
    """Testes para steering_vector e allowed_angles."""

    @pytest.fixture
    def geometry(self):
        return UlaGeometry(15)

    def test_broadside_is_all_ones(self, geometry):
        assert np.allclose(steering_vector(geometry, 90.0), np.ones(15))

    def test_phase_increment(self, geometry):
        """60 graus, espaçamento 0.5: incremento de fase pi/2."""
        d = steering_vector(geometry, 60.0)
        assert d[1] / d[0] == pytest.approx(1j)
        assert d[5] / d[4] == pytest.approx(1j)

    def test_norm_is_array_size(self, geometry):
        rng = np.random.default_rng(0)
        for angle in rng.uniform(0.5, 179.5, 100):
            d = steering_vector(geometry, angle)
            assert np.real(np.vdot(d, d)) == pytest.approx(15.0, rel=1e-12)

    def test_allowed_angles_default_array(self, geometry):
        """M = 15, alvo em 90 graus, janela [-13, -3] dB: flancos do lóbulo principal."""
        angles = allowed_angles(geometry, 90.0, (-13.0, -3.0), 1.0)

        assert angles == [84.0, 85.0, 86.0, 94.0, 95.0, 96.0]
        assert 90.0 not in angles
        w_q = steering_vector(geometry, 90.0) / 15
        for angle in angles:
            response_db = 20 * math.log10(abs(np.vdot(w_q, steering_vector(geometry, angle))))
            assert -13.0 <= response_db <= -3.0
            assert 180.0 - angle in angles

    def test_empty_window(self, geometry):
        with pytest.raises(ConfigError) as info:
            allowed_angles(geometry, 90.0, (-0.2, -0.1), 1.0)
        assert info.value.field == "scenario.beampattern_window_db"


class TestBirthDeath:
    """Testes para step_birth_death."""

    @pytest.fixture
    def config(self):
        return ScenarioConfig()

    @pytest.fixture
    def allowed(self):
        return allowed_angles(UlaGeometry(15), 90.0, (-13.0, -3.0), 1.0)

    def test_no_births(self, config, allowed):
        rng = np.random.default_rng(1)
        config = replace(config, birth_probability=0.0)
        state = []
        for _ in range(1000):
            state = step_birth_death(state, config, rng, allowed)
        assert state == []

    def test_lifetime_one(self, config, allowed):
        """Vida 1: presente em exatamente um snapshot."""
        config = replace(config, birth_probability=0.0)
        state = [InterfererState(angle_deg=85.0, power=5.0, remaining_life=1)]
        assert step_birth_death(state, config, np.random.default_rng(0), allowed) == []

    def test_lifetime_countdown(self, config, allowed):
        config = replace(config, birth_probability=0.0)
        state = [InterfererState(angle_deg=85.0, power=5.0, remaining_life=3)]
        rng = np.random.default_rng(0)
        lives = []
        while state:
            state = step_birth_death(state, config, rng, allowed)
            lives.append([s.remaining_life for s in state])
        assert lives == [[2], [1], []]

    def test_capacity_and_allowed_angles(self, config, allowed):
        """Nunca passa de max_interferers; direções na janela e distintas."""
        config = replace(config, birth_probability=1.0, mean_lifetime=3.0)
        rng = np.random.default_rng(2)
        state = []
        for _ in range(500):
            state = step_birth_death(state, config, rng, allowed)
            assert len(state) == config.max_interferers
            assert all(s.angle_deg in allowed for s in state)
            assert len({s.angle_deg for s in state}) == len(state)
            assert all(s.power == pytest.approx(config.interferer_power) for s in state)

    def test_input_state_not_modified(self, config, allowed):
        state = [InterfererState(angle_deg=85.0, power=5.0, remaining_life=4)]
        step_birth_death(state, config, np.random.default_rng(0), allowed)
        assert state[0].remaining_life == 4

    def test_stationary_occupancy(self, config, allowed):
        """
        Cada vaga é uma cadeia de 2 estados: ocupação estacionária p / (p + q(1 - p)),
        e o número de interferentes segue Binomial(2, pi).
        """
        p, mean_lifetime = 0.05, 10.0
        q = 1.0 / mean_lifetime
        config = replace(config, birth_probability=p, mean_lifetime=mean_lifetime)
        occupancy = p / (p + q * (1 - p))

        rng = np.random.default_rng(42)
        state = []
        counts = np.zeros(3)
        steps = 60000
        for _ in range(steps):
            state = step_birth_death(state, config, rng, allowed)
            counts[len(state)] += 1
        frequencies = counts / steps

        assert frequencies[0] == pytest.approx((1 - occupancy) ** 2, abs=0.03)
        assert frequencies[2] == pytest.approx(occupancy ** 2, abs=0.03)
        assert (frequencies[1] + 2 * frequencies[2]) / 2 == pytest.approx(occupancy, abs=0.03)


class TestEnsembleCorrelation:
    """Testes para true_ecm, draw_snapshot e capon_spectrum."""

    @pytest.fixture
    def config(self):
        return ScenarioConfig()

    def test_no_sources_is_identity(self, config):
        config = replace(config, snr_db=-math.inf)
        ecm = true_ecm([], config)
        assert np.allclose(ecm.matrix, np.eye(15))

    def test_one_interferer_rank(self, config):
        """Exatamente dois autovalores acima de sigma_v^2 (alvo + interferente)."""
        state = [InterfererState(angle_deg=60.0, power=config.interferer_power, remaining_life=10)]
        eigenvalues = np.linalg.eigvalsh(true_ecm(state, config).matrix)

        assert np.sum(eigenvalues > 1.0 + 1e-9) == 2
        assert np.allclose(eigenvalues[:-2], 1.0)
        assert eigenvalues[0] >= 1.0 - 1e-12

    def test_trace(self, config):
        state = [InterfererState(angle_deg=85.0, power=config.interferer_power, remaining_life=10),
                 InterfererState(angle_deg=95.0, power=config.interferer_power, remaining_life=10)]
        expected = 15 * (1.0 + config.target_power + 2 * config.interferer_power)
        assert np.real(np.trace(true_ecm(state, config).matrix)) == pytest.approx(expected)

    def test_noiseless_target_only(self, config):
        """y / s = d exatamente."""
        config = replace(config, noise_power=0.0)
        y, s = draw_snapshot([], config, np.random.default_rng(3))
        assert np.allclose(y / s, steering_vector(UlaGeometry(15), 90.0), atol=1e-12)

    def test_empirical_scm_converges(self, config):
        """SCM empírica converge para a ECM verdadeira."""
        state = [InterfererState(angle_deg=85.0, power=config.interferer_power, remaining_life=10)]
        rng = np.random.default_rng(10)
        draws = 20000
        scm = np.zeros((15, 15), dtype=complex)
        for _ in range(draws):
            y, _ = draw_snapshot(state, config, rng)
            scm += np.outer(y, y.conj())
        scm /= draws
        R = true_ecm(state, config).matrix

        assert np.linalg.norm(scm - R) / np.linalg.norm(R) <= 0.03

    def test_noise_only_unit_covariance(self, config):
        config = replace(config, snr_db=-math.inf)
        rng = np.random.default_rng(12)
        Y = np.array([draw_snapshot([], config, rng)[0] for _ in range(20000)])
        scm = Y.T @ Y.conj() / len(Y)
        assert np.max(np.abs(scm - np.eye(15))) <= 0.05

    def test_capon_spectrum_peaks_at_source(self, config):
        config = replace(config, snr_db=-math.inf)
        state = [InterfererState(angle_deg=60.0, power=5.0, remaining_life=10)]
        angles = np.arange(1.0, 180.0)
        power = capon_spectrum(true_ecm(state, config).matrix, UlaGeometry(15), angles)

        assert angles[int(np.argmax(power))] == 60.0
        flat = capon_spectrum(np.eye(15), UlaGeometry(15), angles)
        assert np.allclose(flat, 1.0 / 15)


class TestScenarioSimulator:
    """Reprodutibilidade e consistência do simulador."""

    @pytest.fixture
    def config(self):
        return ScenarioConfig(birth_probability=0.02, mean_lifetime=50.0, rng_seed=5)

    def test_same_seed_same_stream(self, config):
        first = ScenarioSimulator(config, 5)
        second = ScenarioSimulator(config, 5)
        for _ in range(300):
            y1, s1, _ = first.step()
            y2, s2, _ = second.step()
            assert np.array_equal(y1, y2)
            assert s1 == s2
        assert first.births == second.births

    def test_schedule_independent_of_signals(self, config):
        """A agenda de interferentes não depende dos sinais sorteados."""
        full = ScenarioSimulator(config, 9)
        schedule_only = ScenarioSimulator(config, 9)
        for _ in range(500):
            full.step()
            schedule_only.advance_schedule()
            assert full.state == schedule_only.state
        assert full.births > 0

    def test_ecm_tracks_state(self, config):
        simulator = ScenarioSimulator(config, 3)
        for _ in range(500):
            simulator.step()
            assert np.allclose(simulator.ecm.matrix, true_ecm(simulator.state, config).matrix)
            assert all(s.angle_deg in simulator.allowed for s in simulator.state)
            assert np.linalg.eigvalsh(simulator.ecm.matrix)[0] >= config.noise_power - 1e-9

    def test_different_seeds_differ(self, config):
        y1, _, _ = ScenarioSimulator(config, 1).step()
        y2, _, _ = ScenarioSimulator(config, 2).step()
        assert not np.array_equal(y1, y2)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
