"""Self-noise modeling and DC-servo design for capacitive sensor front ends.

Submodules:

- :mod:`capnoise.noise` -- noise source densities, spectra, power integration
- :mod:`capnoise.frontend` -- sensor/preamp model, bias noise, input capacitance
- :mod:`capnoise.servo` -- lag-lead compensator design and loop verification
- :mod:`capnoise.weighting` -- A-weighting and dBA SPL evaluation
- :mod:`capnoise.mna` / :mod:`capnoise.netlist` -- independent nodal-analysis
  cross-check solver and its netlist format
- :mod:`capnoise.scenario` / :mod:`capnoise.report` -- scenario files and the
  report pipeline behind the CLI
"""

from .frontend import (
    ECMModel,
    FrontEndConfig,
    InputCapMode,
    InputCapModel,
    PhotocurrentBias,
    ResistorBias,
    cutoff_frequency,
    divider_ratio,
    divider_ratio_db,
    effective_input_capacitance,
    equivalent_source_voltage,
    gate_noise_spectrum,
    rc_lowpass,
)
from .noise import (
    FlatCurrent,
    FlatVoltage,
    FlickerVoltage,
    ShotCurrent,
    Spectrum,
    ThermalVoltage,
    combine_uncorrelated,
    integrate_power,
    log_grid,
    shot_current_density,
    thermal_current_density,
    thermal_voltage_density,
)
from .servo import (
    LagLeadCompensator,
    LoopReport,
    ServoPlant,
    closed_loop_signal_transfer,
    design_lag_lead,
    loop_gain,
    verify_stability,
)
from .weighting import (
    Calibration,
    NoiseFloorResult,
    a_weight,
    a_weight_db,
    a_weighted_rms,
    self_noise_report,
    to_dba_spl,
)

__version__ = "0.1.0"

__all__ = [
    "ECMModel",
    "FrontEndConfig",
    "InputCapMode",
    "InputCapModel",
    "PhotocurrentBias",
    "ResistorBias",
    "cutoff_frequency",
    "divider_ratio",
    "divider_ratio_db",
    "effective_input_capacitance",
    "equivalent_source_voltage",
    "gate_noise_spectrum",
    "rc_lowpass",
    "FlatCurrent",
    "FlatVoltage",
    "FlickerVoltage",
    "ShotCurrent",
    "Spectrum",
    "ThermalVoltage",
    "combine_uncorrelated",
    "integrate_power",
    "log_grid",
    "shot_current_density",
    "thermal_current_density",
    "thermal_voltage_density",
    "LagLeadCompensator",
    "LoopReport",
    "ServoPlant",
    "closed_loop_signal_transfer",
    "design_lag_lead",
    "loop_gain",
    "verify_stability",
    "Calibration",
    "NoiseFloorResult",
    "a_weight",
    "a_weight_db",
    "a_weighted_rms",
    "self_noise_report",
    "to_dba_spl",
]
