"""Property-based checks of the algebraic invariants."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from capnoise.frontend import (
    InputCapMode,
    InputCapModel,
    divider_ratio,
    effective_input_capacitance,
)
from capnoise.noise import (
    VOLTS_PER_RTHZ,
    Spectrum,
    combine_uncorrelated,
    thermal_current_density,
    thermal_voltage_density,
)
from capnoise.weighting import Calibration, to_dba_spl

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)
resistances = st.floats(min_value=1.0, max_value=1e12, allow_nan=False)
temperatures = st.floats(min_value=1.0, max_value=1000.0, allow_nan=False)
small_caps = st.floats(min_value=0.0, max_value=1e-9, allow_nan=False)

GRID = np.array([10.0, 100.0, 1000.0, 10000.0])


def spectrum_from(values):
    return Spectrum(GRID, np.asarray(values, dtype=float), VOLTS_PER_RTHZ)


densities = st.lists(
    st.floats(min_value=0.0, max_value=1e3, allow_nan=False), min_size=4, max_size=4
)


@given(resistances, temperatures)
def test_thermal_voltage_is_r_times_current(r, t):
    assert math.isclose(
        thermal_voltage_density(r, t), r * thermal_current_density(r, t), rel_tol=1e-12
    )


@given(densities, densities)
@settings(max_examples=100)
def test_combine_commutative(a, b):
    left = combine_uncorrelated(spectrum_from(a), spectrum_from(b))
    right = combine_uncorrelated(spectrum_from(b), spectrum_from(a))
    np.testing.assert_array_equal(left.values, right.values)


@given(densities, densities, densities)
@settings(max_examples=100)
def test_combine_associative(a, b, c):
    sa, sb, sc = spectrum_from(a), spectrum_from(b), spectrum_from(c)
    left = combine_uncorrelated(combine_uncorrelated(sa, sb), sc)
    right = combine_uncorrelated(sa, combine_uncorrelated(sb, sc))
    np.testing.assert_allclose(left.values, right.values, rtol=1e-15, atol=0.0)


@given(st.floats(min_value=1e-15, max_value=1e-9), small_caps, small_caps)
def test_divider_bounded_and_monotone(c_m, c_a, c_b):
    lo, hi = sorted((c_a, c_b))
    r_lo, r_hi = divider_ratio(c_m, hi), divider_ratio(c_m, lo)
    assert 0.0 < r_lo <= r_hi <= 1.0
    if hi - lo > 1e-9 * c_m:  # difference resolvable in double precision
        assert r_lo < r_hi


@given(small_caps, small_caps, st.floats(min_value=1e-3, max_value=1e3))
def test_input_capacitance_mode_ordering(c_gs, c_gd, a_v):
    caps = [
        effective_input_capacitance(InputCapModel(mode, c_gs, c_gd, a_v))
        for mode in (
            InputCapMode.SINGLE_STAGE,
            InputCapMode.CASCODE,
            InputCapMode.CONSTANT_CURRENT_CASCODE,
            InputCapMode.IDEAL_BOOTSTRAP,
        )
    ]
    assert caps[0] >= caps[1] >= caps[2] >= caps[3] == 0.0


@given(
    st.floats(min_value=1e-9, max_value=1.0),
    st.floats(min_value=1e-3, max_value=1e3),
)
def test_dba_log_linearity(rms, scale):
    cal = Calibration(sensitivity_v_per_pa=0.01)
    delta = to_dba_spl(scale * rms, cal) - to_dba_spl(rms, cal)
    assert math.isclose(delta, 20.0 * math.log10(scale), rel_tol=1e-9, abs_tol=1e-9)
