"""Scenario execution: spectra, servo design, dBA table, summary, figures.

All files are written atomically (temp file + rename) and every number is
formatted explicitly, so rerunning the same scenario yields byte-identical
output.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DesignError
from .frontend import gate_noise_spectrum
from .noise import Spectrum, log_grid
from .scenario import Scenario
from .servo import LoopReport, design_lag_lead, design_verification_grid, verify_stability
from .weighting import NoiseFloorResult, self_noise_report


@dataclass
class ReportBundle:
    """Paths and results produced by one scenario run."""

    outdir: Path
    nsd_paths: dict[str, Path] = field(default_factory=dict)
    dba_table_path: Path | None = None
    summary_path: Path | None = None
    servo_report_path: Path | None = None
    figure_paths: list[Path] = field(default_factory=list)
    noise_floors: dict[str, NoiseFloorResult] = field(default_factory=dict)
    loop_report: LoopReport | None = None
    design_error: str | None = None

    @property
    def design_failed(self) -> bool:
        return self.design_error is not None


def _write_atomic(path: Path, data: str | bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    if isinstance(data, str):
        tmp.write_text(data, encoding="utf-8", newline="\n")
    else:
        tmp.write_bytes(data)
    os.replace(tmp, path)


def _sci(x: float) -> str:
    """Scientific notation with 9 significant digits."""
    return f"{x:.8e}"


def _dba(x: float) -> str:
    return "below-floor" if not math.isfinite(x) else f"{x:.3f}"


def _nsd_csv(spectrum: Spectrum) -> str:
    lines = ["frequency_hz,density_v_per_rthz"]
    for f, v in zip(spectrum.freqs, spectrum.values):
        lines.append(f"{_sci(f)},{_sci(v)}")
    return "\n".join(lines) + "\n"


def _dba_csv(results: dict[str, NoiseFloorResult]) -> str:
    lines = ["label,a_weighted_rms_v,dba_spl"]
    for label, res in results.items():
        lines.append(f"{label},{_sci(res.a_weighted_rms_v)},{_dba(res.equivalent_spl_dba)}")
    return "\n".join(lines) + "\n"


def _servo_text(scenario: Scenario, report: LoopReport | None, error: str | None) -> str:
    req = scenario.servo
    lines = [
        "servo design report",
        f"scenario: {scenario.name}",
        f"targets: crossover {req.target_hpf_hz:g} Hz, phase margin {req.target_pm_deg:g} deg",
        f"plant: g_opto {_sci(req.plant.opto_transconductance)} A/V, "
        f"c_node {_sci(req.plant.node_capacitance)} F, a_pre {req.plant.preamp_gain:g}",
    ]
    if error is not None:
        lines.append(f"design infeasible: {error}")
    else:
        lines += [
            f"crossover: {report.crossover_hz:.4f} Hz",
            f"phase margin: {report.phase_margin_deg:.3f} deg",
            f"closed-loop HPF cutoff: {report.closed_loop_hpf_hz:.4f} Hz",
            f"stable: {'yes' if report.stable else 'no'}",
        ]
    return "\n".join(lines) + "\n"


def _summary_text(
    scenario: Scenario,
    results: dict[str, NoiseFloorResult],
    report: LoopReport | None,
    design_error: str | None,
) -> str:
    lines = [
        f"scenario: {scenario.name}",
        f"band: {_sci(scenario.band[0])} Hz to {_sci(scenario.band[1])} Hz",
        f"grid: {scenario.points_per_decade} points/decade",
        "",
        "label | a-weighted rms (V, input-referred) | dBA SPL",
    ]
    for label, res in results.items():
        lines.append(f"{label} | {_sci(res.a_weighted_rms_v)} | {_dba(res.equivalent_spl_dba)}")
    labels = list(results)
    if len(labels) > 1:
        lines += ["", "pairwise dBA deltas (first minus second):"]
        for i, a in enumerate(labels):
            for b in labels[i + 1:]:
                da, db_ = results[a].equivalent_spl_dba, results[b].equivalent_spl_dba
                if math.isfinite(da) and math.isfinite(db_):
                    lines.append(f"{a} - {b}: {da - db_:+.3f} dB")
                else:
                    lines.append(f"{a} - {b}: n/a (below floor)")
    if scenario.servo is not None:
        lines.append("")
        if design_error is not None:
            lines.append(f"servo: design infeasible ({design_error})")
        else:
            lines.append(
                f"servo: crossover {report.crossover_hz:.4f} Hz, "
                f"phase margin {report.phase_margin_deg:.3f} deg, "
                f"closed-loop HPF cutoff {report.closed_loop_hpf_hz:.4f} Hz, "
                f"{'stable' if report.stable else 'UNSTABLE'}"
            )
    return "\n".join(lines) + "\n"


def run_scenario(scenario: Scenario, outdir: str | Path, render_figures: bool = True) -> ReportBundle:
    """Evaluate a scenario and write its report files under ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    bundle = ReportBundle(outdir=outdir)

    grid = log_grid(scenario.band[0], scenario.band[1], scenario.points_per_decade)
    spectra: dict[str, Spectrum] = {}
    for label, cfg in scenario.frontends:
        spectrum = gate_noise_spectrum(cfg, grid)
        spectra[label] = spectrum
        path = outdir / f"{label}-nsd.csv"
        _write_atomic(path, _nsd_csv(spectrum))
        bundle.nsd_paths[label] = path
        bundle.noise_floors[label] = self_noise_report(
            cfg, scenario.calibration, scenario.band, scenario.points_per_decade
        )

    compensator = None
    if scenario.servo is not None:
        req = scenario.servo
        try:
            compensator = design_lag_lead(
                req.plant, req.target_hpf_hz, req.target_pm_deg, req.pole_zero_ratio
            )
            bundle.loop_report = verify_stability(
                req.plant, compensator, design_verification_grid(req.target_hpf_hz)
            )
        except DesignError as exc:
            bundle.design_error = str(exc)
        bundle.servo_report_path = outdir / "servo-report.txt"
        _write_atomic(
            bundle.servo_report_path,
            _servo_text(scenario, bundle.loop_report, bundle.design_error),
        )

    bundle.dba_table_path = outdir / "dba-table.csv"
    _write_atomic(bundle.dba_table_path, _dba_csv(bundle.noise_floors))

    bundle.summary_path = outdir / "summary.txt"
    _write_atomic(
        bundle.summary_path,
        _summary_text(scenario, bundle.noise_floors, bundle.loop_report, bundle.design_error),
    )

    if render_figures:
        from . import figures

        nsd_png = outdir / "nsd-comparison.png"
        _write_atomic(nsd_png, figures.render_nsd_figure(spectra, scenario.name))
        bundle.figure_paths.append(nsd_png)
        if compensator is not None and bundle.loop_report is not None:
            servo_png = outdir / "servo-bode.png"
            _write_atomic(
                servo_png,
                figures.render_servo_figure(
                    scenario.servo.plant,
                    compensator,
                    design_verification_grid(scenario.servo.target_hpf_hz),
                    bundle.loop_report,
                    f"{scenario.name}: servo loop gain",
                ),
            )
            bundle.figure_paths.append(servo_png)

    return bundle
