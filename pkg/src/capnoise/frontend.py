"""Capacitive-sensor front end: equivalent circuit, bias noise, input capacitance.

Models an electret-style capacitive sensor feeding a JFET preamplifier.
The gate bias is supplied either by a high-value resistor or by a
photocurrent source regulated by a DC servo; the two choices shape the
gate-referred noise spectrum very differently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .noise import (
    VOLTS_PER_RTHZ,
    FlatVoltage,
    NoiseSource,
    Spectrum,
    shot_current_density,
    thermal_voltage_density,
)

#: Small-signal validity gate: capacitance modulation must stay within
#: this fraction of the quiescent capacitance.
SMALL_SIGNAL_LIMIT = 0.01


@dataclass(frozen=True)
class ECMModel:
    """Electret capsule equivalents: quiescent capacitance, stored charge.

    Attributes
    ----------
    c_m : float
        Quiescent sensor capacitance in farads.
    e_el : float
        Electret equivalent field voltage in volts; the stored charge is
        ``q_0 = c_m * e_el``.
    c_tilde : float
        Capacitance modulation amplitude in farads (the acoustic signal).
    """

    c_m: float
    e_el: float = 1.0
    c_tilde: float = 0.0

    def __post_init__(self):
        if self.c_m <= 0.0:
            raise ValueError(f"c_m must be positive, got {self.c_m}")
        if abs(self.c_tilde) > SMALL_SIGNAL_LIMIT * self.c_m:
            raise ValueError(
                f"|c_tilde| = {abs(self.c_tilde):.3e} F violates the small-signal "
                f"limit {SMALL_SIGNAL_LIMIT} * c_m = {SMALL_SIGNAL_LIMIT * self.c_m:.3e} F"
            )

    @property
    def q_0(self) -> float:
        """Stored charge in coulombs."""
        return self.c_m * self.e_el


@dataclass(frozen=True)
class ResistorBias:
    """Gate bias through a physical resistor (thermal-noise dominated)."""

    r_m: float

    def __post_init__(self):
        if self.r_m <= 0.0:
            raise ValueError(f"r_m must be positive, got {self.r_m}")


@dataclass(frozen=True)
class PhotocurrentBias:
    """Gate bias through a photocurrent source (shot-noise dominated)."""

    i_bias: float

    def __post_init__(self):
        if self.i_bias < 0.0:
            raise ValueError(f"i_bias must be nonnegative, got {self.i_bias}")


BiasElement = Union[ResistorBias, PhotocurrentBias]


class InputCapMode(Enum):
    SINGLE_STAGE = "single_stage"
    CASCODE = "cascode"
    CONSTANT_CURRENT_CASCODE = "constant_current_cascode"
    IDEAL_BOOTSTRAP = "ideal_bootstrap"


@dataclass(frozen=True)
class InputCapModel:
    """Preamplifier input-capacitance model.

    ``c_gs`` and ``c_gd`` are the input device's gate-source and
    gate-drain capacitances; ``a_v`` is the stage voltage gain entering
    the Miller term in the single-stage mode.
    """

    mode: InputCapMode
    c_gs: float
    c_gd: float
    a_v: float = 10.0

    def __post_init__(self):
        if self.c_gs < 0.0 or self.c_gd < 0.0:
            raise ValueError("c_gs and c_gd must be nonnegative")
        if self.mode is InputCapMode.SINGLE_STAGE and self.a_v <= 0.0:
            raise ValueError("a_v must be positive for the single-stage mode")


@dataclass(frozen=True)
class FrontEndConfig:
    """Complete sensor + preamplifier description for noise evaluation."""

    ecm: ECMModel
    bias: BiasElement
    input_cap: InputCapModel
    jfet_noise: tuple[NoiseSource, ...] = (FlatVoltage(2e-9),)
    gate_leak: float = 0.0
    temperature: float = 300.0

    def __post_init__(self):
        if self.gate_leak < 0.0:
            raise ValueError(f"gate_leak must be nonnegative, got {self.gate_leak}")
        if self.temperature <= 0.0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        for src in self.jfet_noise:
            if src.unit != VOLTS_PER_RTHZ:
                raise ValueError("jfet_noise sources must be voltage densities")


def equivalent_source_voltage(ecm: ECMModel) -> float:
    """Signal voltage -(q_0 / c_m**2) * c_tilde produced by the modulation.

    The capacitance change is converted linearly to voltage under the
    constant-charge approximation; validity of the small-signal limit is
    enforced by :class:`ECMModel`.
    """
    return -(ecm.q_0 / ecm.c_m**2) * ecm.c_tilde


def cutoff_frequency(resistance: float, capacitance: float) -> float:
    """First-order RC corner 1 / (2 pi R C) in hertz."""
    if resistance <= 0.0 or capacitance <= 0.0:
        raise ValueError("resistance and capacitance must be positive")
    return 1.0 / (2.0 * math.pi * resistance * capacitance)


def resistance_for_cutoff(f_c: float, capacitance: float) -> float:
    """Resistance placing the RC corner at ``f_c``: 1 / (2 pi f_c C)."""
    if f_c <= 0.0 or capacitance <= 0.0:
        raise ValueError("f_c and capacitance must be positive")
    return 1.0 / (2.0 * math.pi * f_c * capacitance)


def rc_lowpass(f, resistance: float, capacitance: float):
    """Complex gain 1 / (1 + j 2 pi f R C) of the bias RC network."""
    if resistance <= 0.0 or capacitance <= 0.0:
        raise ValueError("resistance and capacitance must be positive")
    f = np.asarray(f, dtype=float)
    return 1.0 / (1.0 + 2j * np.pi * f * resistance * capacitance)


def effective_input_capacitance(model: InputCapModel) -> float:
    """Effective preamp input capacitance in farads for the configured mode.

    single_stage includes the Miller term (1 + a_v) * c_gd; cascode clamps
    the drain and leaves c_gs + c_gd; a constant-current cascode also
    bootstraps c_gs away; ideal bootstrap suppresses both.
    """
    if model.mode is InputCapMode.SINGLE_STAGE:
        return model.c_gs + (1.0 + model.a_v) * model.c_gd
    if model.mode is InputCapMode.CASCODE:
        return model.c_gs + model.c_gd
    if model.mode is InputCapMode.CONSTANT_CURRENT_CASCODE:
        return model.c_gd
    return 0.0


def divider_ratio(c_m: float, c_in: float) -> float:
    """Capacitive divider attenuation c_m / (c_m + c_in), in (0, 1]."""
    if c_m <= 0.0:
        raise ValueError(f"c_m must be positive, got {c_m}")
    if c_in < 0.0:
        raise ValueError(f"c_in must be nonnegative, got {c_in}")
    return c_m / (c_m + c_in)


def divider_ratio_db(c_m: float, c_in: float) -> float:
    """Divider attenuation in dB (nonpositive)."""
    return 20.0 * math.log10(divider_ratio(c_m, c_in))


def current_noise_to_gate_voltage(current_density: float, f, capacitance: float):
    """Voltage density i_n / (2 pi f C) of a current noise flowing into C."""
    if current_density < 0.0:
        raise ValueError("current density must be nonnegative")
    if capacitance <= 0.0:
        raise ValueError("capacitance must be positive")
    f = np.asarray(f, dtype=float)
    return current_density / (2.0 * np.pi * f * capacitance)


def total_gate_capacitance(cfg: FrontEndConfig) -> float:
    """Sensor capacitance plus the effective preamp input capacitance."""
    return cfg.ecm.c_m + effective_input_capacitance(cfg.input_cap)


def gate_noise_spectrum(cfg: FrontEndConfig, freqs) -> Spectrum:
    """Voltage noise density at the JFET gate over the given grid.

    Resistor bias: the resistor's thermal voltage filtered by the bias RC
    network, sqrt(4 k_B T R) / |1 + j 2 pi f R c_m|.  Photocurrent bias:
    shot noise of the bias current and of the gate leakage, power-summed
    and converted to voltage across the total gate capacitance as
    i_n / (2 pi f C).  Both variants then add the JFET voltage-noise
    sources in uncorrelated power sum.
    """
    f = np.asarray(freqs, dtype=float)
    if f.size == 0:
        raise ValueError("frequency grid must not be empty")
    if isinstance(cfg.bias, ResistorBias):
        flat = thermal_voltage_density(cfg.bias.r_m, cfg.temperature)
        bias_v = flat * np.abs(rc_lowpass(f, cfg.bias.r_m, cfg.ecm.c_m))
    else:
        i_n = math.hypot(
            shot_current_density(cfg.bias.i_bias),
            shot_current_density(cfg.gate_leak),
        )
        bias_v = current_noise_to_gate_voltage(i_n, f, total_gate_capacitance(cfg))
    power = bias_v**2
    for src in cfg.jfet_noise:
        power = power + src.density(f) ** 2
    return Spectrum(f, np.sqrt(power), VOLTS_PER_RTHZ)
