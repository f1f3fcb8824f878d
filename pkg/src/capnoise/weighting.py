"""A-weighting and equivalent-input sound-level (dBA SPL) evaluation.

The weighting is the continuous-frequency magnitude response of the
standard A curve (four real pole frequencies, unity gain at 1 kHz); no
digital-filter discretization is involved since everything here works in
the spectral domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frontend import (
    FrontEndConfig,
    divider_ratio,
    effective_input_capacitance,
    gate_noise_spectrum,
)
from .noise import Spectrum, band_power, log_grid

# Standard A-weighting pole frequencies, Hz.
F1 = 20.598997
F2 = 107.65265
F3 = 737.86223
F4 = 12194.217

#: Reference sound pressure, 0 dB SPL, pascals.
P_REF = 20e-6

DEFAULT_BAND = (20.0, 20000.0)


def _a_response(f):
    f2 = np.square(np.asarray(f, dtype=float))
    num = F4**2 * f2**2
    den = (
        (f2 + F1**2)
        * np.sqrt((f2 + F2**2) * (f2 + F3**2))
        * (f2 + F4**2)
    )
    return num / den


#: Normalization fixing the weight to exactly 1 at 1 kHz.
_A_1000 = float(_a_response(1000.0))


def a_weight(f):
    """Amplitude weight of the A curve, unity at 1 kHz.

    Accepts scalar or ndarray frequency in Hz (> 0).
    """
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0.0):
        raise ValueError("frequency must be positive")
    return _a_response(f) / _A_1000


def a_weight_db(f):
    """A-weighting in dB (0 dB at 1 kHz)."""
    return 20.0 * np.log10(a_weight(f))


def a_weighted_rms(spectrum: Spectrum, band: tuple[float, float] = DEFAULT_BAND) -> float:
    """RMS of the spectrum after A-weighting, integrated over the band.

    Returns sqrt( integral of (a_weight(f) * density(f))**2 df ) in the
    spectrum's amplitude unit.  The band must lie within the sampled grid.
    """
    weighted = Spectrum(spectrum.freqs, a_weight(spectrum.freqs) * spectrum.values, spectrum.unit)
    return math.sqrt(band_power(weighted, band[0], band[1]))


@dataclass(frozen=True)
class Calibration:
    """Acoustic sensitivity anchor: volts per pascal at 1 kHz.

    The conventional calibrator point is 94 dB SPL = 1 Pa RMS, which the
    sensitivity figure is normally traceable to.
    """

    sensitivity_v_per_pa: float
    reference_spl_db: float = 94.0
    reference_pa: float = 1.0

    def __post_init__(self):
        if self.sensitivity_v_per_pa <= 0.0:
            raise ValueError("sensitivity must be positive")


def to_dba_spl(rms_volts: float, cal: Calibration) -> float:
    """Equivalent sound level of an A-weighted noise voltage.

    The voltage maps to pressure through the sensitivity and is referenced
    to 20 uPa: 20*log10((rms / sensitivity) / 20e-6).  A zero rms returns
    -inf, the below-floor sentinel.
    """
    if rms_volts < 0.0:
        raise ValueError("rms must be nonnegative")
    if rms_volts == 0.0:
        return float("-inf")
    pressure = rms_volts / cal.sensitivity_v_per_pa
    return 20.0 * math.log10(pressure / P_REF)


@dataclass(frozen=True)
class NoiseFloorResult:
    """Self-noise of a front end expressed as equivalent input sound level."""

    a_weighted_rms_v: float
    equivalent_spl_dba: float
    band: tuple[float, float]

    @property
    def below_floor(self) -> bool:
        """True when the noise was too small to express on the dB scale."""
        return not math.isfinite(self.equivalent_spl_dba)


def self_noise_report(
    cfg: FrontEndConfig,
    cal: Calibration,
    band: tuple[float, float] = DEFAULT_BAND,
    points_per_decade: int = 64,
) -> NoiseFloorResult:
    """A-weighted self-noise of a front end in dBA SPL.

    The gate noise spectrum is referred back to the sensor's equivalent
    source plane by dividing out the capacitive divider (so the result
    reads as an equivalent input sound level), A-weighted, integrated over
    the band, and converted through the calibration sensitivity, which is
    therefore interpreted at the same sensor source plane.
    """
    if band[0] <= 0.0 or band[1] <= band[0]:
        raise ValueError(f"band must be increasing and positive, got {band}")
    grid = log_grid(band[0], band[1], points_per_decade)
    gate = gate_noise_spectrum(cfg, grid)
    ratio = divider_ratio(cfg.ecm.c_m, effective_input_capacitance(cfg.input_cap))
    input_referred = gate.scaled(1.0 / ratio)
    rms = a_weighted_rms(input_referred, band)
    return NoiseFloorResult(
        a_weighted_rms_v=rms,
        equivalent_spl_dba=to_dba_spl(rms, cal),
        band=(float(band[0]), float(band[1])),
    )
