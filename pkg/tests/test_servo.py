"""Servo loop: compensator response, synthesis round trips, stability checks."""

import math

import numpy as np
import pytest

from capnoise.errors import DesignError
from capnoise.servo import (
    LagLeadCompensator,
    ServoPlant,
    closed_loop_signal_transfer,
    design_lag_lead,
    design_verification_grid,
    loop_gain,
    verify_stability,
)

PLANT = ServoPlant(opto_transconductance=1e-9, node_capacitance=12e-12, preamp_gain=1.0)


def flat_controller(gain):
    return lambda f: np.full_like(np.asarray(f, dtype=float), gain, dtype=complex)


class TestCompensator:
    COMP = LagLeadCompensator(gain=2.0, zero_hz=50.0, pole_hz=2.0)

    def test_dc_gain(self):
        assert complex(self.COMP.response(1e-9)) == pytest.approx(2.0, abs=1e-6)

    def test_hf_gain_is_k_fp_over_fz(self):
        hf = complex(self.COMP.response(1e9))
        assert abs(hf) == pytest.approx(2.0 * 2.0 / 50.0, rel=1e-6)
        assert math.degrees(math.atan2(hf.imag, hf.real)) == pytest.approx(0.0, abs=0.01)

    def test_max_lag_at_geometric_mean(self):
        # oracle: dense phase scan
        freqs = np.logspace(-2, 4, 200001)
        phase = np.degrees(np.angle(self.COMP.response(freqs)))
        f_min = freqs[np.argmin(phase)]
        assert f_min == pytest.approx(math.sqrt(50.0 * 2.0), rel=1e-3)

    def test_invariants(self):
        with pytest.raises(ValueError):
            LagLeadCompensator(gain=0.0, zero_hz=50.0, pole_hz=2.0)
        with pytest.raises(ValueError):
            LagLeadCompensator(gain=1.0, zero_hz=2.0, pole_hz=50.0)
        with pytest.raises(ValueError):
            LagLeadCompensator(gain=1.0, zero_hz=50.0, pole_hz=0.0)

    def test_dispatch_accepts_callables(self):
        from capnoise.servo import compensator_response

        assert complex(compensator_response(self.COMP, 7.0)) == complex(self.COMP.response(7.0))
        flat = flat_controller(3.5)
        assert complex(compensator_response(flat, 7.0)) == 3.5 + 0.0j


class TestLoopGain:
    def test_magnitude_decreasing(self):
        comp = design_lag_lead(PLANT, 15.0, 60.0)
        freqs = np.logspace(-2, 5, 400)
        mag = np.abs(loop_gain(PLANT, comp, freqs))
        assert np.all(np.diff(mag) < 0.0)

    def test_phase_is_minus_90_below_pole(self):
        comp = design_lag_lead(PLANT, 15.0, 60.0)
        f = comp.pole_hz / 1e4
        phase = math.degrees(np.angle(complex(loop_gain(PLANT, comp, f))))
        assert phase == pytest.approx(-90.0, abs=0.01)

    def test_gauge_freedom(self):
        comp = design_lag_lead(PLANT, 15.0, 60.0)
        scale = 7.3
        plant2 = ServoPlant(
            opto_transconductance=PLANT.opto_transconductance * scale,
            node_capacitance=PLANT.node_capacitance,
            preamp_gain=PLANT.preamp_gain,
        )
        comp2 = LagLeadCompensator(comp.gain / scale, comp.zero_hz, comp.pole_hz)
        freqs = np.logspace(-2, 5, 100)
        ref = loop_gain(PLANT, comp, freqs)
        np.testing.assert_allclose(loop_gain(plant2, comp2, freqs), ref, rtol=1e-12)


class TestClosedLoop:
    def test_transparent_above_crossover(self):
        comp = design_lag_lead(PLANT, 15.0, 60.0)
        transfer = abs(complex(closed_loop_signal_transfer(PLANT, comp, 15000.0)))
        assert transfer == pytest.approx(PLANT.preamp_gain, rel=1e-4)

    @pytest.mark.parametrize("pm", [45.0, 60.0, 75.0, 90.0])
    def test_le_half_percent_droop_a_decade_above_cutoff(self, pm):
        comp = design_lag_lead(PLANT, 15.0, pm)
        report = verify_stability(PLANT, comp, design_verification_grid(15.0))
        transfer = abs(
            complex(closed_loop_signal_transfer(PLANT, comp, 10.0 * report.closed_loop_hpf_hz))
        )
        assert transfer >= 0.995 * PLANT.preamp_gain

    def test_low_frequency_hpf_skirt(self):
        comp = design_lag_lead(PLANT, 15.0, 60.0)
        f = 1e-6  # far below the compensator pole
        transfer = abs(complex(closed_loop_signal_transfer(PLANT, comp, f)))
        asymptote = (
            2.0 * math.pi * f * PLANT.node_capacitance
            / (comp.gain * PLANT.opto_transconductance)
        ) * PLANT.preamp_gain
        assert transfer == pytest.approx(asymptote, rel=1e-6)
        # +20 dB/dec skirt
        transfer_10f = abs(complex(closed_loop_signal_transfer(PLANT, comp, 10.0 * f)))
        assert transfer_10f == pytest.approx(10.0 * transfer, rel=1e-4)


class TestDesignRoundTrip:
    @pytest.mark.parametrize("target_hpf", [10.0, 15.0, 20.0])
    @pytest.mark.parametrize("target_pm", [45.0, 60.0, 75.0, 90.0])
    def test_targets_met(self, target_hpf, target_pm):
        comp = design_lag_lead(PLANT, target_hpf, target_pm)
        report = verify_stability(PLANT, comp, design_verification_grid(target_hpf))
        assert report.stable
        assert report.crossover_hz == pytest.approx(target_hpf, rel=0.02)
        assert report.phase_margin_deg == pytest.approx(target_pm, abs=1.0)
        assert comp.pole_hz <= target_hpf / 10.0 * (1.0 + 1e-12)

    @pytest.mark.parametrize("target_pm", [45.0, 60.0, 75.0, 90.0])
    def test_cutoff_within_factor_two_of_crossover(self, target_pm):
        comp = design_lag_lead(PLANT, 15.0, target_pm)
        report = verify_stability(PLANT, comp, design_verification_grid(15.0))
        assert report.crossover_hz / 2.0 <= report.closed_loop_hpf_hz <= report.crossover_hz * 2.0

    def test_low_margin_engages_pole_clamp(self):
        comp = design_lag_lead(PLANT, 15.0, 30.0)
        assert comp.pole_hz == pytest.approx(1.5, rel=1e-9)
        report = verify_stability(PLANT, comp, design_verification_grid(15.0))
        assert report.phase_margin_deg == pytest.approx(30.0, abs=1.0)

    def test_90_degree_target_degenerates_to_flat_gain(self):
        comp = design_lag_lead(PLANT, 15.0, 90.0)
        assert comp.zero_hz < 15.0 / 1e3
        report = verify_stability(PLANT, comp, design_verification_grid(15.0))
        # first-order closed loop: cutoff equals crossover
        assert report.closed_loop_hpf_hz == pytest.approx(report.crossover_hz, rel=1e-3)

    def test_precondition_validation(self):
        with pytest.raises(ValueError):
            design_lag_lead(PLANT, 0.5, 60.0)
        with pytest.raises(ValueError):
            design_lag_lead(PLANT, 15.0, 20.0)
        with pytest.raises(ValueError):
            design_lag_lead(PLANT, 15.0, 95.0)

    def test_infeasible_ratio_raises_design_error(self):
        # a pole/zero ratio near 1 cannot produce 45 degrees of lead
        with pytest.raises(DesignError):
            design_lag_lead(PLANT, 15.0, 45.0, pole_zero_ratio=1.05)


class TestVerifyStability:
    def test_pure_integrator_loop_has_exactly_90_margin(self):
        report = verify_stability(PLANT, flat_controller(1.131), design_verification_grid(15.0))
        assert report.phase_margin_deg == 90.0
        assert report.stable
        assert report.closed_loop_hpf_hz == pytest.approx(report.crossover_hz, rel=1e-9)

    def test_double_integrator_unstable(self):
        report = verify_stability(
            PLANT, lambda f: 17.0 / (1j * f), design_verification_grid(15.0)
        )
        assert not report.stable
        assert report.phase_margin_deg <= 5.0

    def test_designed_compensator_round_trip(self):
        comp = design_lag_lead(PLANT, 15.0, 60.0)
        report = verify_stability(PLANT, comp, design_verification_grid(15.0))
        assert report.crossover_hz == pytest.approx(15.0, rel=0.02)
        assert report.phase_margin_deg == pytest.approx(60.0, abs=1.0)

    def test_no_crossover_raises(self):
        with pytest.raises(ValueError, match="no gain crossover"):
            verify_stability(PLANT, flat_controller(1e-6), design_verification_grid(15.0))

    def test_short_grid_rejected(self):
        with pytest.raises(ValueError, match="4 decades"):
            verify_stability(PLANT, flat_controller(1.0), np.logspace(0.0, 2.0, 50))

    def test_multiple_crossings_warn_and_use_highest(self):
        # stepped controller gain forces |L| across unity three times
        def wiggly(f):
            f = np.asarray(f, dtype=float)
            base = 2.0 * np.pi * f * PLANT.node_capacitance / PLANT.opto_transconductance
            step = np.where((f > 30.0) & (f < 100.0), 0.5, 2.0)
            return (base * step).astype(complex)

        with pytest.warns(RuntimeWarning, match="crossings"):
            report = verify_stability(PLANT, wiggly, design_verification_grid(15.0))
        assert report.crossover_hz == pytest.approx(100.0, rel=0.05)
