"""Elementary noise sources, spectra, and noise-power integration.

All densities are amplitude spectral densities (V/rtHz or A/rtHz).  Power
densities are obtained by squaring on the fly and are never stored.
Frequency grids are log-spaced; quadrature is trapezoidal in linear
frequency over the log-spaced samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import constants

VOLTS_PER_RTHZ = "V/rtHz"
AMPS_PER_RTHZ = "A/rtHz"

#: Trapezoidal quadrature degrades on grids coarser than this point ratio
#: (about 9 points per decade).
MAX_GRID_RATIO = 1.3


def thermal_voltage_density(resistance: float, temperature: float) -> float:
    """Johnson noise voltage density sqrt(4 k_B T R) of a resistor, V/rtHz.

    Parameters
    ----------
    resistance : float
        Resistance in ohms, > 0.
    temperature : float
        Absolute temperature in kelvin, > 0.
    """
    if resistance <= 0.0:
        raise ValueError(f"resistance must be positive, got {resistance}")
    if temperature <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    return math.sqrt(4.0 * constants.K_B * temperature * resistance)


def thermal_current_density(resistance: float, temperature: float) -> float:
    """Johnson noise current density sqrt(4 k_B T / R) of a resistor, A/rtHz."""
    if resistance <= 0.0:
        raise ValueError(f"resistance must be positive, got {resistance}")
    if temperature <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    return math.sqrt(4.0 * constants.K_B * temperature / resistance)


def shot_current_density(current: float) -> float:
    """Shot noise current density sqrt(2 q I) of an element carrying I amps.

    Zero current yields zero density; negative current is a domain error.
    """
    if current < 0.0:
        raise ValueError(f"current must be nonnegative, got {current}")
    return math.sqrt(2.0 * constants.Q_E * current)


def _as_freqs(f) -> np.ndarray:
    arr = np.asarray(f, dtype=float)
    if arr.size == 0:
        raise ValueError("frequency input must not be empty")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError("frequencies must be finite and positive")
    return arr


@dataclass(frozen=True)
class ThermalVoltage:
    """Resistor Johnson noise, modeled as a series voltage source."""

    resistance: float
    temperature: float = 300.0
    unit: str = VOLTS_PER_RTHZ

    def __post_init__(self):
        # validates R > 0, T > 0
        thermal_voltage_density(self.resistance, self.temperature)

    def density(self, f):
        return np.full(
            _as_freqs(f).shape,
            thermal_voltage_density(self.resistance, self.temperature),
        )


@dataclass(frozen=True)
class ShotCurrent:
    """Shot noise of an element carrying a DC current."""

    current: float
    unit: str = AMPS_PER_RTHZ

    def __post_init__(self):
        shot_current_density(self.current)

    def density(self, f):
        return np.full(_as_freqs(f).shape, shot_current_density(self.current))


@dataclass(frozen=True)
class FlatVoltage:
    """Frequency-flat voltage noise (e.g. a JFET's input-referred floor)."""

    density_v: float
    unit: str = VOLTS_PER_RTHZ

    def __post_init__(self):
        if self.density_v < 0.0:
            raise ValueError("density must be nonnegative")

    def density(self, f):
        return np.full(_as_freqs(f).shape, self.density_v)


@dataclass(frozen=True)
class FlatCurrent:
    """Frequency-flat current noise."""

    density_a: float
    unit: str = AMPS_PER_RTHZ

    def __post_init__(self):
        if self.density_a < 0.0:
            raise ValueError("density must be nonnegative")

    def density(self, f):
        return np.full(_as_freqs(f).shape, self.density_a)


@dataclass(frozen=True)
class FlickerVoltage:
    """Voltage noise rising toward low frequency.

    Amplitude density is ``density_at_pivot * (pivot_hz / f) ** (exponent / 2)``,
    i.e. the power density scales as 1/f**exponent.
    """

    density_at_pivot: float
    pivot_hz: float = 1000.0
    exponent: float = 1.0
    unit: str = VOLTS_PER_RTHZ

    def __post_init__(self):
        if self.density_at_pivot < 0.0:
            raise ValueError("density must be nonnegative")
        if self.pivot_hz <= 0.0:
            raise ValueError("pivot frequency must be positive")
        if self.exponent <= 0.0:
            raise ValueError("exponent must be positive")

    def density(self, f):
        freqs = _as_freqs(f)
        return self.density_at_pivot * (self.pivot_hz / freqs) ** (self.exponent / 2.0)


NoiseSource = Union[ThermalVoltage, ShotCurrent, FlatVoltage, FlatCurrent, FlickerVoltage]


@dataclass(frozen=True)
class Spectrum:
    """An amplitude spectral density sampled on a strictly increasing grid.

    Immutable: the arrays are copied on construction and marked read-only.
    """

    freqs: np.ndarray
    values: np.ndarray
    unit: str

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float).copy()
        values = np.asarray(self.values, dtype=float).copy()
        if freqs.ndim != 1 or values.ndim != 1:
            raise ValueError("freqs and values must be one-dimensional")
        if freqs.size == 0:
            raise ValueError("spectrum must not be empty")
        if freqs.size != values.size:
            raise ValueError(
                f"freqs and values length mismatch: {freqs.size} vs {values.size}"
            )
        if not np.all(np.isfinite(freqs)) or freqs[0] <= 0.0:
            raise ValueError("frequencies must be finite and positive")
        if np.any(np.diff(freqs) <= 0.0):
            raise ValueError("frequency grid must be strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise ValueError("densities must be finite and nonnegative")
        if self.unit not in (VOLTS_PER_RTHZ, AMPS_PER_RTHZ):
            raise ValueError(f"unknown unit {self.unit!r}")
        freqs.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.freqs.size

    def scaled(self, factor: float) -> "Spectrum":
        """Pointwise amplitude scaling by a nonnegative factor."""
        return Spectrum(self.freqs, self.values * factor, self.unit)

    def db(self, ref: float = 1.0) -> np.ndarray:
        """Densities as 20*log10(value/ref); zero values map to -inf."""
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(self.values / ref)


def log_grid(f_lo: float, f_hi: float, points_per_decade: int = 64) -> np.ndarray:
    """Log-spaced frequency grid with exact endpoints."""
    if f_lo <= 0.0 or f_hi <= f_lo:
        raise ValueError(f"need 0 < f_lo < f_hi, got ({f_lo}, {f_hi})")
    if points_per_decade < 1:
        raise ValueError("points_per_decade must be >= 1")
    decades = math.log10(f_hi / f_lo)
    n = max(2, int(round(points_per_decade * decades)) + 1)
    grid = np.logspace(math.log10(f_lo), math.log10(f_hi), n)
    grid[0] = f_lo
    grid[-1] = f_hi
    return grid


def combine_uncorrelated(a: Spectrum, b: Spectrum) -> Spectrum:
    """Power sum of two uncorrelated spectra: pointwise sqrt(a**2 + b**2).

    Both spectra must share the same grid and unit.  Adding an equal
    spectrum raises every point by a factor sqrt(2) (+3.01 dB).
    """
    if a.unit != b.unit:
        raise ValueError(f"unit mismatch: {a.unit!r} vs {b.unit!r}")
    if a.freqs.shape != b.freqs.shape or not np.array_equal(a.freqs, b.freqs):
        raise ValueError("frequency grids differ")
    return Spectrum(a.freqs, np.hypot(a.values, b.values), a.unit)


def _check_grid_density(freqs: np.ndarray) -> None:
    if freqs.size >= 2:
        ratio = np.max(freqs[1:] / freqs[:-1])
        if ratio > MAX_GRID_RATIO:
            raise ValueError(
                f"grid too sparse for quadrature: adjacent point ratio {ratio:.3f} "
                f"exceeds {MAX_GRID_RATIO}"
            )


def integrate_power(
    spectrum: Spectrum,
    analytic_tail: float | Callable[[float], float] | None = None,
) -> float:
    """Total noise power, the integral of density**2 over (0, inf).

    The grid span is integrated by the trapezoid rule in linear frequency.
    Below the first grid point the density is assumed flat (true for the
    low-pass shapes this package produces), contributing
    ``values[0]**2 * freqs[0]``.  ``analytic_tail`` covers the region above
    the grid: either a precomputed power in V**2 (or A**2), or a callable
    receiving the top grid frequency.  When the tail is omitted the grid
    must extend far enough that the remainder is negligible (several
    decades past the highest corner frequency).

    Returns V**2 for voltage spectra, A**2 for current spectra.
    """
    _check_grid_density(spectrum.freqs)
    power = float(spectrum.values[0]) ** 2 * float(spectrum.freqs[0])
    power += float(np.trapezoid(spectrum.values**2, spectrum.freqs))
    if analytic_tail is not None:
        tail = analytic_tail(float(spectrum.freqs[-1])) if callable(analytic_tail) else float(analytic_tail)
        if tail < 0.0:
            raise ValueError("analytic tail power must be nonnegative")
        power += tail
    return power


def first_order_tail(spectrum: Spectrum) -> float:
    """Closed-form above-grid power for a first-order low-pass spectrum.

    Past its corner a first-order shape falls as 1/f in amplitude, so
    the remaining power is exactly ``values[-1]**2 * freqs[-1]``.
    """
    return float(spectrum.values[-1]) ** 2 * float(spectrum.freqs[-1])


def band_power(spectrum: Spectrum, f_lo: float, f_hi: float) -> float:
    """Integral of density**2 over [f_lo, f_hi] only.

    Band edges must lie within the sampled grid; edge values are linearly
    interpolated.  No below-grid or above-grid terms are added.
    """
    if f_lo <= 0.0 or f_hi <= f_lo:
        raise ValueError(f"need 0 < f_lo < f_hi, got ({f_lo}, {f_hi})")
    freqs, values = spectrum.freqs, spectrum.values
    # tolerate float rounding at the grid endpoints
    slack = 1e-9
    if f_lo < freqs[0] * (1.0 - slack) or f_hi > freqs[-1] * (1.0 + slack):
        raise ValueError(
            f"band ({f_lo}, {f_hi}) outside sampled grid "
            f"({freqs[0]}, {freqs[-1]})"
        )
    f_lo = max(f_lo, float(freqs[0]))
    f_hi = min(f_hi, float(freqs[-1]))
    _check_grid_density(freqs)
    inside = (freqs > f_lo) & (freqs < f_hi)
    f_band = np.concatenate(([f_lo], freqs[inside], [f_hi]))
    v_band = np.concatenate(
        ([np.interp(f_lo, freqs, values)], values[inside], [np.interp(f_hi, freqs, values)])
    )
    return float(np.trapezoid(v_band**2, f_band))
