"""Nodal-analysis oracle: AC transfers, noise superposition, invariants."""

import math

import numpy as np
import pytest

from capnoise.errors import TopologyError
from capnoise.frontend import divider_ratio, rc_lowpass
from capnoise.mna import (
    VCCS,
    Capacitor,
    CurrentInjection,
    Network,
    NoiseStamp,
    Resistor,
    SeriesVoltageInjection,
    ac_solve,
    noise_solve,
)
from capnoise.noise import shot_current_density, thermal_voltage_density

GRID_10HZ_20KHZ = np.logspace(1.0, math.log10(2e4), 200)


def rc_network(r_ohms=1e9, c_farads=12e-12, stamps=()):
    return Network(
        elements=(Resistor("Rm", 1, 0, r_ohms), Capacitor("Cm", 1, 0, c_farads)),
        output=(1, 0),
        stamps=stamps,
    )


class TestAcSolve:
    def test_rc_lowpass_transfer(self):
        net = rc_network()
        for f in (0.1, 13.2629, 1000.0, 1e6):
            result = ac_solve(net, f, SeriesVoltageInjection("Rm", 1.0))
            reference = complex(rc_lowpass(f, 1e9, 12e-12))
            assert abs(result - reference) <= 1e-12 * abs(reference)

    def test_capacitive_divider(self):
        net = Network(
            elements=(Capacitor("Cm", 1, 0, 12e-12), Capacitor("Cin", 1, 0, 25e-12)),
            output=(1, 0),
        )
        result = ac_solve(net, 1234.5, SeriesVoltageInjection("Cm", 1.0))
        assert result.real == pytest.approx(divider_ratio(12e-12, 25e-12), rel=1e-12)
        assert result.imag == pytest.approx(0.0, abs=1e-15)

    def test_resistive_divider(self):
        net = Network(
            elements=(Resistor("R1", 1, 0, 50.0), Resistor("R2", 1, 0, 50.0)),
            output=(1, 0),
        )
        assert ac_solve(net, 100.0, SeriesVoltageInjection("R1", 1.0)) == pytest.approx(0.5)

    def test_vccs_transresistance(self):
        # current gm*v(1) loaded by R2 at node 2: v(2)/v(1) = -gm*R2 for
        # current pushed out of node 2
        net = Network(
            elements=(
                Resistor("R1", 1, 0, 1000.0),
                VCCS("G1", 2, 0, 1, 0, 0.01),
                Resistor("R2", 2, 0, 500.0),
            ),
            output=(2, 0),
        )
        out = ac_solve(net, 100.0, CurrentInjection(1, 0, 1e-3))
        v1 = 1e-3 * 1000.0
        assert out == pytest.approx(-0.01 * v1 * 500.0, rel=1e-12)

    def test_nonpositive_frequency_rejected(self):
        with pytest.raises(ValueError):
            ac_solve(rc_network(), 0.0, CurrentInjection(1, 0))


class TestNoiseSolve:
    def test_thermal_rc_matches_closed_form(self):
        net = rc_network(stamps=(NoiseStamp("Rm", "thermal", 300.0),))
        flat = thermal_voltage_density(1e9, 300.0)
        for f in GRID_10HZ_20KHZ:
            oracle = noise_solve(net, float(f))
            closed = flat * abs(complex(rc_lowpass(f, 1e9, 12e-12)))
            assert abs(oracle - closed) <= 1e-9 * closed

    def test_shot_into_capacitor_matches_closed_form(self):
        net = Network(
            elements=(Capacitor("Cm", 1, 0, 12e-12),),
            output=(1, 0),
            stamps=(NoiseStamp("Cm", "shot", 1e-12),),
        )
        i_n = shot_current_density(1e-12)
        for f in GRID_10HZ_20KHZ:
            oracle = noise_solve(net, float(f))
            closed = i_n / (2.0 * math.pi * f * 12e-12)
            assert abs(oracle - closed) <= 1e-9 * closed

    def test_flat_voltage_stamp_norton(self):
        # flat voltage in series with R, attenuated by the RC corner
        net = rc_network(stamps=(NoiseStamp("Rm", "flat_voltage", 1e-6),))
        f = 1000.0
        closed = 1e-6 * abs(complex(rc_lowpass(f, 1e9, 12e-12)))
        assert noise_solve(net, f) == pytest.approx(closed, rel=1e-12)

    def test_superposition_order_invariant(self):
        stamps = (
            NoiseStamp("Rm", "thermal", 300.0),
            NoiseStamp("Cm", "shot", 1e-12),
            NoiseStamp("Rm", "flat_voltage", 5e-9),
        )
        net_fwd = rc_network(stamps=stamps)
        net_rev = rc_network(stamps=stamps[::-1])
        for f in (10.0, 1000.0, 20000.0):
            assert noise_solve(net_fwd, f) == pytest.approx(noise_solve(net_rev, f), rel=1e-14)

    def test_stamps_add_in_power(self):
        both = rc_network(
            stamps=(NoiseStamp("Rm", "thermal", 300.0), NoiseStamp("Cm", "shot", 4e-12))
        )
        only_thermal = rc_network(stamps=(NoiseStamp("Rm", "thermal", 300.0),))
        only_shot = rc_network(stamps=(NoiseStamp("Cm", "shot", 4e-12),))
        f = 500.0
        combined = math.hypot(noise_solve(only_thermal, f), noise_solve(only_shot, f))
        assert noise_solve(both, f) == pytest.approx(combined, rel=1e-12)

    def test_no_stamps_is_an_error(self):
        with pytest.raises(ValueError, match="no noise stamps"):
            noise_solve(rc_network(), 100.0)


class TestReciprocity:
    def random_rc_ladder(self, rng, nodes=6):
        elements = []
        for i in range(1, nodes + 1):
            elements.append(Resistor(f"R{i}", i, i - 1, float(rng.uniform(100.0, 1e6))))
            elements.append(Capacitor(f"C{i}", i, 0, float(rng.uniform(1e-12, 1e-9))))
        return elements

    def test_transfer_symmetry(self):
        rng = np.random.default_rng(11)
        elements = self.random_rc_ladder(rng)
        for f in (10.0, 1e3, 1e5):
            a, b = 2, 5
            net_b = Network(elements=tuple(elements), output=(b, 0))
            net_a = Network(elements=tuple(elements), output=(a, 0))
            forward = ac_solve(net_b, f, CurrentInjection(a, 0, 1.0))
            backward = ac_solve(net_a, f, CurrentInjection(b, 0, 1.0))
            assert abs(forward - backward) <= 1e-12 * abs(forward)


class TestNetworkValidation:
    def test_floating_node_rejected(self):
        with pytest.raises(TopologyError, match="not connected"):
            Network(
                elements=(Resistor("R1", 1, 0, 100.0), Resistor("R2", 2, 3, 100.0)),
                output=(1, 0),
            )

    def test_duplicate_names_rejected(self):
        with pytest.raises(ValueError, match="unique"):
            Network(
                elements=(Resistor("R1", 1, 0, 100.0), Resistor("R1", 1, 0, 50.0)),
                output=(1, 0),
            )

    def test_unknown_stamp_element_rejected(self):
        with pytest.raises(ValueError, match="unknown element"):
            rc_network(stamps=(NoiseStamp("Rx", "thermal", 300.0),))

    def test_thermal_stamp_on_capacitor_rejected(self):
        with pytest.raises(ValueError, match="resistors only"):
            rc_network(stamps=(NoiseStamp("Cm", "thermal", 300.0),))

    def test_output_node_must_exist(self):
        with pytest.raises(ValueError, match="output nodes"):
            Network(elements=(Resistor("R1", 1, 0, 100.0),), output=(9, 0))

    def test_nonpositive_element_values_rejected(self):
        with pytest.raises(ValueError):
            Resistor("R1", 1, 0, 0.0)
        with pytest.raises(ValueError):
            Capacitor("C1", 1, 0, -1e-12)
        with pytest.raises(ValueError):
            VCCS("G1", 1, 0, 2, 0, 0.0)

    def test_unknown_noise_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            NoiseStamp("Rm", "popcorn", 1.0)
