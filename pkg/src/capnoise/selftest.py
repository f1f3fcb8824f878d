"""Built-in regression suite over the model's documented anchor numbers.

Every check compares a live computation against a frozen expected value,
so perturbing a physical constant or formula makes the table go red.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frontend import (
    ECMModel,
    FrontEndConfig,
    InputCapMode,
    InputCapModel,
    ResistorBias,
    current_noise_to_gate_voltage,
    cutoff_frequency,
    divider_ratio,
    divider_ratio_db,
    effective_input_capacitance,
    gate_noise_spectrum,
    resistance_for_cutoff,
)
from .noise import (
    Spectrum,
    VOLTS_PER_RTHZ,
    combine_uncorrelated,
    first_order_tail,
    integrate_power,
    log_grid,
    shot_current_density,
    thermal_current_density,
)
from .servo import ServoPlant, design_lag_lead, design_verification_grid, verify_stability
from .weighting import Calibration, a_weight_db, to_dba_spl


def round_sig(x: float, digits: int) -> float:
    """Round to a number of significant digits."""
    if x == 0.0:
        return 0.0
    return round(x, digits - 1 - int(math.floor(math.log10(abs(x)))))


@dataclass
class CheckResult:
    name: str
    expected: str
    computed: str
    tolerance: str
    passed: bool


def _sig_check(name: str, computed: float, expected: float, digits: int = 2) -> CheckResult:
    rounded = round_sig(computed, digits)
    return CheckResult(
        name=name,
        expected=f"{expected:.6g}",
        computed=f"{computed:.6g}",
        tolerance=f"{digits} significant digits",
        passed=rounded == expected,
    )


def _abs_check(name: str, computed: float, expected: float, tol: float) -> CheckResult:
    return CheckResult(
        name=name,
        expected=f"{expected:.6g}",
        computed=f"{computed:.6g}",
        tolerance=f"abs {tol:g}",
        passed=abs(computed - expected) <= tol,
    )


def _rel_check(name: str, computed: float, expected: float, tol: float) -> CheckResult:
    return CheckResult(
        name=name,
        expected=f"{expected:.6g}",
        computed=f"{computed:.6g}",
        tolerance=f"rel {tol:g}",
        passed=abs(computed - expected) <= tol * abs(expected),
    )


def _rc_shaped_power(r_ohms: float, c_farads: float, temperature: float) -> float:
    cfg = FrontEndConfig(
        ecm=ECMModel(c_m=c_farads),
        bias=ResistorBias(r_ohms),
        input_cap=InputCapModel(InputCapMode.IDEAL_BOOTSTRAP, 0.0, 0.0),
        jfet_noise=(),
        temperature=temperature,
    )
    grid = log_grid(1e-4, 1e8, 64)
    spectrum = gate_noise_spectrum(cfg, grid)
    return integrate_power(spectrum, first_order_tail(spectrum))


def run_selftest() -> list[CheckResult]:
    """Run all embedded regressions and return per-check results."""
    checks: list[CheckResult] = []

    checks.append(
        _sig_check("thermal current density 1 GOhm @ 300 K [A/rtHz]",
                   thermal_current_density(1e9, 300.0), 4.1e-15)
    )
    checks.append(
        _sig_check("thermal current density 10 GOhm @ 300 K [A/rtHz]",
                   thermal_current_density(1e10, 300.0), 1.3e-15)
    )
    checks.append(
        _sig_check("shot current density at 1 pA [A/rtHz]",
                   shot_current_density(1e-12), 5.7e-16)
    )

    grid = log_grid(10.0, 2e4, 16)
    flat = Spectrum(grid, np.full(grid.size, 1e-6), VOLTS_PER_RTHZ)
    doubled = combine_uncorrelated(flat, flat)
    checks.append(
        _abs_check("uncorrelated power addition of equal sources [dB]",
                   20.0 * math.log10(doubled.values[0] / flat.values[0]), 3.01, 0.02)
    )

    for r_gohm in (1.0, 10.0, 100.0):
        checks.append(
            _rel_check(
                f"total RC noise power, {r_gohm:g} GOhm / 12 pF / 300 K [V^2]",
                _rc_shaped_power(r_gohm * 1e9, 12e-12, 300.0),
                3.4516225e-10,
                1e-3,
            )
        )

    checks.append(
        _abs_check("bias RC cutoff, 1 GOhm / 12 pF [Hz]",
                   cutoff_frequency(1e9, 12e-12), 13.26, 0.005)
    )
    checks.append(
        _abs_check("bias RC cutoff, 10 GOhm / 12 pF [Hz]",
                   cutoff_frequency(1e10, 12e-12), 1.326, 0.0005)
    )
    checks.append(
        _rel_check("resistance for a 20 Hz cutoff at 12 pF [Ohm]",
                   resistance_for_cutoff(20.0, 12e-12), 0.663e9, 1e-3)
    )
    checks.append(
        _sig_check("5 pA/rtHz into 12 pF at 1 kHz [V/rtHz]",
                   current_noise_to_gate_voltage(5e-12, 1000.0, 12e-12), 6.6e-5)
    )

    ledger = InputCapModel(InputCapMode.SINGLE_STAGE, c_gs=11.8e-12, c_gd=1.2e-12, a_v=10.0)
    checks.append(
        _rel_check("single-stage input capacitance [F]",
                   effective_input_capacitance(ledger), 25.0e-12, 1e-9)
    )
    checks.append(
        _rel_check(
            "cascode input capacitance [F]",
            effective_input_capacitance(
                InputCapModel(InputCapMode.CASCODE, c_gs=11.8e-12, c_gd=1.2e-12)
            ),
            13.0e-12,
            1e-9,
        )
    )
    checks.append(
        _rel_check(
            "constant-current cascode input capacitance [F]",
            effective_input_capacitance(
                InputCapModel(InputCapMode.CONSTANT_CURRENT_CASCODE, c_gs=11.8e-12, c_gd=1.2e-12)
            ),
            1.2e-12,
            1e-9,
        )
    )
    bootstrap = effective_input_capacitance(
        InputCapModel(InputCapMode.IDEAL_BOOTSTRAP, c_gs=11.8e-12, c_gd=1.2e-12)
    )
    checks.append(
        CheckResult("ideal-bootstrap input capacitance [F]", "0", f"{bootstrap:.6g}",
                    "exact", bootstrap == 0.0)
    )

    for c_in_pf, ratio, ratio_db in ((25.0, 0.32, -9.8), (13.0, 0.48, -6.4), (1.2, 0.91, -0.8)):
        checks.append(
            _abs_check(f"divider ratio, 12 pF vs {c_in_pf:g} pF",
                       divider_ratio(12e-12, c_in_pf * 1e-12), ratio, 0.01)
        )
        checks.append(
            _abs_check(f"divider attenuation, 12 pF vs {c_in_pf:g} pF [dB]",
                       divider_ratio_db(12e-12, c_in_pf * 1e-12), ratio_db, 0.05)
        )

    plant = ServoPlant(opto_transconductance=1e-9, node_capacitance=12e-12, preamp_gain=1.0)
    for target in (10.0, 20.0):
        comp = design_lag_lead(plant, target, 60.0)
        report = verify_stability(plant, comp, design_verification_grid(target))
        checks.append(
            _rel_check(f"servo crossover at the band edge target {target:g} Hz",
                       report.crossover_hz, target, 0.02)
        )

    double_integrator = verify_stability(
        plant, lambda f: 17.0 / (1j * f), design_verification_grid(15.0)
    )
    checks.append(
        CheckResult(
            "double-integrator loop detected as unstable",
            "stable = False, PM <= 5 deg",
            f"stable = {double_integrator.stable}, PM = {double_integrator.phase_margin_deg:.3g} deg",
            "boolean",
            (not double_integrator.stable) and double_integrator.phase_margin_deg <= 5.0,
        )
    )

    cal = Calibration(sensitivity_v_per_pa=0.010)
    checks.append(
        _abs_check("94 dB SPL calibrator point (1 Pa rms) [dB]",
                   to_dba_spl(cal.sensitivity_v_per_pa * 1.0, cal), 94.0, 0.05)
    )
    checks.append(
        _abs_check("A-weighting at 1 kHz [dB]", float(a_weight_db(1000.0)), 0.0, 0.01)
    )

    return checks


def format_table(checks: list[CheckResult]) -> str:
    name_w = max(len(c.name) for c in checks)
    exp_w = max(len(c.expected) for c in checks + [CheckResult("", "expected", "", "", True)])
    comp_w = max(len(c.computed) for c in checks + [CheckResult("", "", "computed", "", True)])
    lines = [
        f"{'check':<{name_w}}  {'expected':>{exp_w}}  {'computed':>{comp_w}}  tolerance",
    ]
    for c in checks:
        status = "pass" if c.passed else "FAIL"
        lines.append(
            f"{c.name:<{name_w}}  {c.expected:>{exp_w}}  {c.computed:>{comp_w}}  "
            f"{c.tolerance} [{status}]"
        )
    n_pass = sum(c.passed for c in checks)
    lines.append(f"{n_pass}/{len(checks)} checks passed")
    return "\n".join(lines)


def selftest_passed(checks: list[CheckResult]) -> bool:
    return all(c.passed for c in checks)
