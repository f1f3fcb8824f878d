"""Scenario configuration files: schema and parser.

A scenario describes one or more labeled front ends, an optional servo
design request, the calibration, and the evaluation band.  The format is
line-oriented with ``[section]`` headers and ``key = value`` pairs;
``#`` starts a comment.  Every physical value carries an explicit unit
(``12 pF``, ``1 GOhm``, ``0.4 pA``); only dimensionless gains and counts
are plain numbers.  A top-level ``schema = 1`` key is required.

Example::

    schema = 1

    [scenario]
    name = example
    band = 20 Hz to 20 kHz
    grid_points_per_decade = 64

    [frontend.conventional-1G]
    bias = resistor
    r_m = 1 GOhm
    c_m = 12 pF

    [frontend.pds-amp]
    bias = photocurrent
    i_bias = 1 pA
    gate_leak = 0.4 pA
    c_m = 12 pF

    [servo]
    g_opto = 1 nA/V
    c_node = 12 pF
    target_hpf = 15 Hz
    target_pm = 60 deg

    [calibration]
    sensitivity = 10 mV/Pa

Sections and keys:

``[scenario]``
    ``name`` (free text), ``band`` (``<lo> <unit> to <hi> <unit>``),
    ``grid_points_per_decade`` (integer).
``[frontend.<label>]`` (one per front end, labels unique)
    ``bias`` = ``resistor`` | ``photocurrent``; ``r_m`` (resistance,
    resistor bias); ``i_bias`` (current, photocurrent bias); ``c_m``
    (capacitance, required); ``temperature`` (kelvin); ``input_cap_mode``
    = ``single_stage`` | ``cascode`` | ``constant_current_cascode`` |
    ``ideal_bootstrap``; ``c_gs``, ``c_gd`` (capacitance); ``a_v``
    (dimensionless); ``jfet_noise`` (voltage density); ``jfet_flicker``
    (``<density> <unit> at <pivot> <unit>``, optional);
    ``jfet_flicker_exponent`` (dimensionless); ``gate_leak`` (current).
``[servo]`` (optional)
    ``g_opto`` (transconductance), ``c_node`` (capacitance), ``a_pre``
    (dimensionless), ``target_hpf`` (frequency), ``target_pm`` (angle),
    ``pole_zero_ratio`` (dimensionless).
``[calibration]`` (optional)
    ``sensitivity`` (volts per pascal).

Defaults: temperature 300 K, band 20 Hz to 20 kHz, 64 grid points per
decade, cascode input stage with c_gs 11.8 pF / c_gd 1.2 pF / a_v 10,
JFET noise 2 nV/rtHz, gate leak 0 pA, sensitivity 10 mV/Pa.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError
from .frontend import (
    ECMModel,
    FrontEndConfig,
    InputCapMode,
    InputCapModel,
    PhotocurrentBias,
    ResistorBias,
)
from .noise import FlatVoltage, FlickerVoltage
from .servo import ServoPlant
from .weighting import Calibration

SCHEMA_VERSION = 1

_LABEL_RE = re.compile(r"[A-Za-z0-9._-]+")

_PREFIXES = {
    "T": 1e12,
    "G": 1e9,
    "M": 1e6,
    "k": 1e3,
    "m": 1e-3,
    "u": 1e-6,
    "µ": 1e-6,
    "n": 1e-9,
    "p": 1e-12,
    "f": 1e-15,
}

# dimension -> accepted base unit spellings
_BASE_UNITS = {
    "capacitance": ("F",),
    "resistance": ("Ohm", "ohm", "Ω"),
    "current": ("A",),
    "frequency": ("Hz",),
    "temperature": ("K",),
    "voltage_density": ("V/rtHz",),
    "sensitivity": ("V/Pa",),
    "transconductance": ("A/V",),
    "angle": ("deg",),
}


@dataclass
class _Entry:
    value: str
    line: int


@dataclass
class _Section:
    name: str
    line: int
    entries: dict[str, _Entry] = field(default_factory=dict)


@dataclass(frozen=True)
class ServoRequest:
    """Servo design targets attached to a scenario."""

    plant: ServoPlant
    target_hpf_hz: float
    target_pm_deg: float
    pole_zero_ratio: float = 20.0


@dataclass(frozen=True)
class Scenario:
    """A parsed, validated scenario ready to run."""

    name: str
    frontends: tuple[tuple[str, FrontEndConfig], ...]
    calibration: Calibration
    band: tuple[float, float]
    points_per_decade: int
    servo: ServoRequest | None = None


def _unit_scale(unit: str, dimension: str) -> float | None:
    bases = _BASE_UNITS[dimension]
    if unit in bases:
        return 1.0
    if len(unit) > 1 and unit[0] in _PREFIXES:
        if unit[1:] in bases:
            return _PREFIXES[unit[0]]
    return None


def _parse_quantity(entry: _Entry, key: str, dimension: str) -> float:
    parts = entry.value.split()
    if len(parts) == 1:
        raise ParseError(
            f"{key} requires an explicit unit ({'/'.join(_BASE_UNITS[dimension])}), "
            f"got {entry.value!r}",
            entry.line,
        )
    if len(parts) != 2:
        raise ParseError(f"{key}: expected '<number> <unit>', got {entry.value!r}", entry.line)
    try:
        magnitude = float(parts[0])
    except ValueError:
        raise ParseError(f"{key}: bad number {parts[0]!r}", entry.line) from None
    scale = _unit_scale(parts[1], dimension)
    if scale is None:
        raise ParseError(
            f"{key}: unit {parts[1]!r} is not a {dimension} unit "
            f"(base: {'/'.join(_BASE_UNITS[dimension])})",
            entry.line,
        )
    return magnitude * scale


def _parse_number(entry: _Entry, key: str) -> float:
    parts = entry.value.split()
    if len(parts) != 1:
        raise ParseError(f"{key} is dimensionless and takes a plain number", entry.line)
    try:
        return float(parts[0])
    except ValueError:
        raise ParseError(f"{key}: bad number {parts[0]!r}", entry.line) from None


def _parse_int(entry: _Entry, key: str) -> int:
    value = _parse_number(entry, key)
    if value != int(value):
        raise ParseError(f"{key} must be an integer", entry.line)
    return int(value)


def _parse_band(entry: _Entry) -> tuple[float, float]:
    parts = entry.value.split()
    if len(parts) != 5 or parts[2].lower() != "to":
        raise ParseError(
            f"band: expected '<lo> <unit> to <hi> <unit>', got {entry.value!r}", entry.line
        )
    lo = _parse_quantity(_Entry(" ".join(parts[0:2]), entry.line), "band", "frequency")
    hi = _parse_quantity(_Entry(" ".join(parts[3:5]), entry.line), "band", "frequency")
    if lo <= 0.0 or hi <= lo:
        raise ParseError(f"band must be increasing and positive, got {lo} to {hi} Hz", entry.line)
    return (lo, hi)


def _split_sections(text: str) -> tuple[dict[str, _Entry], list[_Section]]:
    top: dict[str, _Entry] = {}
    sections: list[_Section] = []
    current: _Section | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", lineno)
            name = line[1:-1].strip()
            if not name:
                raise ParseError("empty section name", lineno)
            current = _Section(name=name, line=lineno)
            sections.append(current)
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if not key:
            raise ParseError("missing key before '='", lineno)
        if not value:
            raise ParseError(f"missing value for {key!r}", lineno)
        entry = _Entry(value, lineno)
        target = top if current is None else current.entries
        if key in target:
            raise ParseError(f"duplicate key {key!r}", lineno)
        target[key] = entry
    return top, sections


def _take(section: _Section, key: str) -> _Entry | None:
    return section.entries.pop(key, None)


def _reject_leftovers(section: _Section) -> None:
    for key, entry in section.entries.items():
        raise ParseError(f"unknown key {key!r} in section [{section.name}]", entry.line)


def _parse_frontend(section: _Section) -> FrontEndConfig:
    bias_entry = _take(section, "bias")
    if bias_entry is None:
        raise ParseError(f"[{section.name}] requires a 'bias' key", section.line)
    bias_kind = bias_entry.value.strip().lower()
    if bias_kind not in ("resistor", "photocurrent"):
        raise ParseError(
            f"bias must be 'resistor' or 'photocurrent', got {bias_entry.value!r}",
            bias_entry.line,
        )

    c_m_entry = _take(section, "c_m")
    if c_m_entry is None:
        raise ParseError(f"[{section.name}] requires a 'c_m' key", section.line)
    c_m = _parse_quantity(c_m_entry, "c_m", "capacitance")
    if c_m <= 0.0:
        raise ParseError(f"c_m must be positive, got {c_m:.3e} F", c_m_entry.line)

    r_m_entry = _take(section, "r_m")
    i_bias_entry = _take(section, "i_bias")
    if bias_kind == "resistor":
        if r_m_entry is None:
            raise ParseError("resistor bias requires 'r_m'", bias_entry.line)
        if i_bias_entry is not None:
            raise ParseError("'i_bias' is only valid for photocurrent bias", i_bias_entry.line)
        r_m = _parse_quantity(r_m_entry, "r_m", "resistance")
        if r_m <= 0.0:
            raise ParseError(f"r_m must be positive, got {r_m:.3e} Ohm", r_m_entry.line)
        bias = ResistorBias(r_m)
    else:
        if i_bias_entry is None:
            raise ParseError("photocurrent bias requires 'i_bias'", bias_entry.line)
        if r_m_entry is not None:
            raise ParseError("'r_m' is only valid for resistor bias", r_m_entry.line)
        i_bias = _parse_quantity(i_bias_entry, "i_bias", "current")
        if i_bias < 0.0:
            raise ParseError(f"i_bias must be nonnegative, got {i_bias:.3e} A", i_bias_entry.line)
        bias = PhotocurrentBias(i_bias)

    temperature = 300.0
    if (entry := _take(section, "temperature")) is not None:
        temperature = _parse_quantity(entry, "temperature", "temperature")
        if temperature <= 0.0:
            raise ParseError(f"temperature must be positive, got {temperature} K", entry.line)

    mode = InputCapMode.CASCODE
    if (entry := _take(section, "input_cap_mode")) is not None:
        try:
            mode = InputCapMode(entry.value.strip().lower())
        except ValueError:
            choices = ", ".join(m.value for m in InputCapMode)
            raise ParseError(
                f"input_cap_mode must be one of {choices}, got {entry.value!r}", entry.line
            ) from None

    c_gs = 11.8e-12
    if (entry := _take(section, "c_gs")) is not None:
        c_gs = _parse_quantity(entry, "c_gs", "capacitance")
        if c_gs < 0.0:
            raise ParseError("c_gs must be nonnegative", entry.line)
    c_gd = 1.2e-12
    if (entry := _take(section, "c_gd")) is not None:
        c_gd = _parse_quantity(entry, "c_gd", "capacitance")
        if c_gd < 0.0:
            raise ParseError("c_gd must be nonnegative", entry.line)
    a_v = 10.0
    if (entry := _take(section, "a_v")) is not None:
        a_v = _parse_number(entry, "a_v")
        if a_v <= 0.0:
            raise ParseError("a_v must be positive", entry.line)

    jfet_sources: list = []
    jfet_flat = 2e-9
    if (entry := _take(section, "jfet_noise")) is not None:
        jfet_flat = _parse_quantity(entry, "jfet_noise", "voltage_density")
        if jfet_flat < 0.0:
            raise ParseError("jfet_noise must be nonnegative", entry.line)
    jfet_sources.append(FlatVoltage(jfet_flat))

    flicker_entry = _take(section, "jfet_flicker")
    exponent = 1.0
    if (entry := _take(section, "jfet_flicker_exponent")) is not None:
        if flicker_entry is None:
            raise ParseError("jfet_flicker_exponent requires jfet_flicker", entry.line)
        exponent = _parse_number(entry, "jfet_flicker_exponent")
        if exponent <= 0.0:
            raise ParseError("jfet_flicker_exponent must be positive", entry.line)
    if flicker_entry is not None:
        parts = flicker_entry.value.split()
        if len(parts) != 5 or parts[2].lower() != "at":
            raise ParseError(
                "jfet_flicker: expected '<density> <unit> at <pivot> <unit>', "
                f"got {flicker_entry.value!r}",
                flicker_entry.line,
            )
        density = _parse_quantity(
            _Entry(" ".join(parts[0:2]), flicker_entry.line), "jfet_flicker", "voltage_density"
        )
        pivot = _parse_quantity(
            _Entry(" ".join(parts[3:5]), flicker_entry.line), "jfet_flicker", "frequency"
        )
        if density < 0.0 or pivot <= 0.0:
            raise ParseError("jfet_flicker density/pivot out of range", flicker_entry.line)
        jfet_sources.append(FlickerVoltage(density, pivot, exponent))

    gate_leak = 0.0
    if (entry := _take(section, "gate_leak")) is not None:
        gate_leak = _parse_quantity(entry, "gate_leak", "current")
        if gate_leak < 0.0:
            raise ParseError("gate_leak must be nonnegative", entry.line)

    _reject_leftovers(section)
    try:
        return FrontEndConfig(
            ecm=ECMModel(c_m=c_m),
            bias=bias,
            input_cap=InputCapModel(mode=mode, c_gs=c_gs, c_gd=c_gd, a_v=a_v),
            jfet_noise=tuple(jfet_sources),
            gate_leak=gate_leak,
            temperature=temperature,
        )
    except ValueError as exc:
        raise ParseError(f"[{section.name}]: {exc}", section.line) from exc


def _parse_servo(section: _Section) -> ServoRequest:
    required = {}
    for key, dimension in (
        ("g_opto", "transconductance"),
        ("c_node", "capacitance"),
        ("target_hpf", "frequency"),
    ):
        entry = _take(section, key)
        if entry is None:
            raise ParseError(f"[servo] requires a {key!r} key", section.line)
        required[key] = _parse_quantity(entry, key, dimension)
        if required[key] <= 0.0:
            raise ParseError(f"{key} must be positive", entry.line)

    a_pre = 1.0
    if (entry := _take(section, "a_pre")) is not None:
        a_pre = _parse_number(entry, "a_pre")
        if a_pre <= 0.0:
            raise ParseError("a_pre must be positive", entry.line)
    target_pm = 60.0
    if (entry := _take(section, "target_pm")) is not None:
        target_pm = _parse_quantity(entry, "target_pm", "angle")
        if not (30.0 <= target_pm <= 90.0):
            raise ParseError(
                f"target_pm must be within [30, 90] deg, got {target_pm}", entry.line
            )
    ratio = 20.0
    if (entry := _take(section, "pole_zero_ratio")) is not None:
        ratio = _parse_number(entry, "pole_zero_ratio")
        if ratio <= 1.0:
            raise ParseError("pole_zero_ratio must exceed 1", entry.line)
    if not (1.0 <= required["target_hpf"] <= 100.0):
        raise ParseError(
            f"target_hpf must be within [1, 100] Hz, got {required['target_hpf']}",
            section.line,
        )
    _reject_leftovers(section)
    return ServoRequest(
        plant=ServoPlant(
            opto_transconductance=required["g_opto"],
            node_capacitance=required["c_node"],
            preamp_gain=a_pre,
        ),
        target_hpf_hz=required["target_hpf"],
        target_pm_deg=target_pm,
        pole_zero_ratio=ratio,
    )


def parse_scenario(text: str) -> Scenario:
    """Parse scenario source text into a validated :class:`Scenario`."""
    top, sections = _split_sections(text)

    schema_entry = top.pop("schema", None)
    if schema_entry is None:
        raise ParseError("missing required top-level 'schema = 1' key")
    if _parse_int(schema_entry, "schema") != SCHEMA_VERSION:
        raise ParseError(
            f"unsupported schema version {schema_entry.value!r} (this build reads "
            f"schema = {SCHEMA_VERSION})",
            schema_entry.line,
        )
    for key, entry in top.items():
        raise ParseError(f"unknown top-level key {key!r}", entry.line)

    name = "scenario"
    band = (20.0, 20000.0)
    ppd = 64
    frontends: list[tuple[str, FrontEndConfig]] = []
    servo: ServoRequest | None = None
    calibration = Calibration(sensitivity_v_per_pa=0.010)
    seen: set[str] = set()

    for section in sections:
        if section.name == "scenario":
            if "scenario" in seen:
                raise ParseError("duplicate [scenario] section", section.line)
            seen.add("scenario")
            if (entry := _take(section, "name")) is not None:
                name = entry.value
            if (entry := _take(section, "band")) is not None:
                band = _parse_band(entry)
            if (entry := _take(section, "grid_points_per_decade")) is not None:
                ppd = _parse_int(entry, "grid_points_per_decade")
                if ppd < 1:
                    raise ParseError("grid_points_per_decade must be >= 1", entry.line)
            _reject_leftovers(section)
        elif section.name.startswith("frontend."):
            label = section.name[len("frontend."):]
            if not label:
                raise ParseError("frontend section needs a label: [frontend.<label>]", section.line)
            if not _LABEL_RE.fullmatch(label):
                raise ParseError(
                    f"frontend label {label!r} may only contain letters, digits, "
                    "'.', '_' and '-'",
                    section.line,
                )
            if any(label == existing for existing, _ in frontends):
                raise ParseError(f"duplicate frontend label {label!r}", section.line)
            frontends.append((label, _parse_frontend(section)))
        elif section.name == "servo":
            if "servo" in seen:
                raise ParseError("duplicate [servo] section", section.line)
            seen.add("servo")
            servo = _parse_servo(section)
        elif section.name == "calibration":
            if "calibration" in seen:
                raise ParseError("duplicate [calibration] section", section.line)
            seen.add("calibration")
            if (entry := _take(section, "sensitivity")) is not None:
                sens = _parse_quantity(entry, "sensitivity", "sensitivity")
                if sens <= 0.0:
                    raise ParseError("sensitivity must be positive", entry.line)
                calibration = Calibration(sensitivity_v_per_pa=sens)
            _reject_leftovers(section)
        else:
            raise ParseError(f"unknown section [{section.name}]", section.line)

    if not frontends:
        raise ParseError("scenario must define at least one [frontend.<label>] section")

    return Scenario(
        name=name,
        frontends=tuple(frontends),
        calibration=calibration,
        band=band,
        points_per_decade=ppd,
        servo=servo,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Read and parse a scenario file."""
    return parse_scenario(Path(path).read_text(encoding="utf-8"))
