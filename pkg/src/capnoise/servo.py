"""DC servo loop: lag-lead compensator synthesis and stability verification.

The loop regulates the preamplifier's DC operating point through a
light-controlled current source: preamp output -> compensator -> LED /
photoelement transconductance -> charge integration on the gate-node
capacitance.  The gate node is an integrator (1/s), so a controller with
its own integrating character would leave no phase margin; the lag-lead
keeps DC gain high while recovering phase near the crossover.

Controllers are either :class:`LagLeadCompensator` instances or plain
callables ``f -> complex`` accepting scalar or ndarray frequency in Hz,
so pathological loops (e.g. a second pure integrator) can be probed with
the same verifier.
"""

from __future__ import annotations

import math
import cmath
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DesignError
from .noise import log_grid

#: Cap on crossover/zero separation when the requested margin approaches
#: the integrator's natural 90 degrees.
_U_MAX = 1e6


@dataclass(frozen=True)
class LagLeadCompensator:
    """C(s) = gain * (1 + s/w_z) / (1 + s/w_p) with pole below zero.

    DC gain is ``gain``; above the zero the gain settles at
    ``gain * pole_hz / zero_hz``.  Phase lag is largest at the geometric
    mean sqrt(pole_hz * zero_hz) and recovers toward zero above the zero.
    """

    gain: float
    zero_hz: float
    pole_hz: float

    def __post_init__(self):
        if self.gain <= 0.0:
            raise ValueError(f"gain must be positive, got {self.gain}")
        if not (0.0 < self.pole_hz < self.zero_hz):
            raise ValueError(
                f"need 0 < pole_hz < zero_hz, got pole {self.pole_hz}, zero {self.zero_hz}"
            )

    def response(self, f):
        f = np.asarray(f, dtype=float)
        return self.gain * (1.0 + 1j * f / self.zero_hz) / (1.0 + 1j * f / self.pole_hz)


Controller = Union[LagLeadCompensator, Callable]


@dataclass(frozen=True)
class ServoPlant:
    """Loop hardware outside the controller.

    ``opto_transconductance`` lumps LED drive and photoelement responsivity
    into a single A/V figure; ``node_capacitance`` is the total gate-node
    capacitance integrating the photocurrent; ``preamp_gain`` is the flat
    preamplifier gain (its bandwidth sits far above the servo band).
    """

    opto_transconductance: float
    node_capacitance: float
    preamp_gain: float = 1.0

    def __post_init__(self):
        if self.opto_transconductance <= 0.0:
            raise ValueError("opto_transconductance must be positive")
        if self.node_capacitance <= 0.0:
            raise ValueError("node_capacitance must be positive")
        if self.preamp_gain <= 0.0:
            raise ValueError("preamp_gain must be positive")


@dataclass(frozen=True)
class LoopReport:
    """Stability summary at the loop-gain crossover."""

    crossover_hz: float
    phase_margin_deg: float
    closed_loop_hpf_hz: float
    stable: bool


def compensator_response(controller: Controller, f):
    """Complex controller gain at frequency f (Hz)."""
    if isinstance(controller, LagLeadCompensator):
        return controller.response(f)
    return controller(np.asarray(f, dtype=float))


def loop_gain(plant: ServoPlant, controller: Controller, f):
    """Open-loop gain L(jf) around the servo, negative-feedback sign absorbed.

    L = preamp_gain * C(jf) * g_opto / (j 2 pi f C_node): the gate node
    integrates the photocurrent, contributing -90 degrees everywhere.
    """
    f = np.asarray(f, dtype=float)
    integrator = plant.opto_transconductance / (2j * np.pi * f * plant.node_capacitance)
    return plant.preamp_gain * compensator_response(controller, f) * integrator


def closed_loop_signal_transfer(plant: ServoPlant, controller: Controller, f):
    """Sensor-to-output signal gain A_pre / (1 + L) under the servo.

    Well above the crossover |L| << 1 and the servo is transparent; toward
    DC the loop suppresses transmission, forming the signal high-pass.
    """
    return plant.preamp_gain / (1.0 + loop_gain(plant, controller, f))


def _loop_phase_deg(plant: ServoPlant, controller: Controller, f: float) -> float:
    """Loop phase in degrees, mapped into (-360, 0].

    A loop that is exactly real-negative (two cascaded integrators) sits
    on the +/-180 branch cut; mapping positive angles down by 360 makes it
    read -180 so the margin is reported as zero, not 360.
    """
    phase = math.degrees(cmath.phase(complex(loop_gain(plant, controller, f))))
    if phase > 0.0:
        phase -= 360.0
    return phase


def _geometric_bisect(func, lo: float, hi: float) -> float:
    """Root of func (sign change assumed) by bisection in log-frequency."""
    f_lo = func(lo)
    if f_lo == 0.0:
        return lo
    if func(hi) == 0.0:
        return hi
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        f_mid = func(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-14:
            break
    return math.sqrt(lo * hi)


def verify_stability(plant: ServoPlant, controller: Controller, freqs) -> LoopReport:
    """Locate the gain crossover and measure the margins.

    The grid must span at least four decades and bracket the crossover.
    The crossover is refined by bisection between the bracketing grid
    points; the phase margin is 180 degrees plus the loop phase there.
    The closed-loop high-pass cutoff is the -3 dB point of
    ``closed_loop_signal_transfer`` relative to its high-frequency
    asymptote, also found by bisection.  With multiple crossings the
    highest-frequency one is reported and a warning is emitted.
    """
    grid = np.asarray(freqs, dtype=float)
    if grid.size < 2 or grid[-1] / grid[0] < 1e4 * (1.0 - 1e-9):
        raise ValueError("verification grid must span at least 4 decades")
    mag = np.abs(loop_gain(plant, controller, grid))
    above = mag >= 1.0
    transitions = np.nonzero(above[:-1] != above[1:])[0]
    if transitions.size == 0:
        raise ValueError(
            "no gain crossover within the grid "
            f"(|L| in [{mag.min():.3e}, {mag.max():.3e}])"
        )
    if transitions.size > 1:
        warnings.warn(
            f"{transitions.size} gain crossings found; reporting the highest-frequency one",
            RuntimeWarning,
            stacklevel=2,
        )
    i = int(transitions[-1])

    def gain_err(f: float) -> float:
        return float(np.abs(loop_gain(plant, controller, f))) - 1.0

    crossover = _geometric_bisect(gain_err, float(grid[i]), float(grid[i + 1]))
    phase_margin = 180.0 + _loop_phase_deg(plant, controller, crossover)

    def hpf_err(f: float) -> float:
        return abs(1.0 + complex(loop_gain(plant, controller, f))) - math.sqrt(2.0)

    closed = np.abs(1.0 + loop_gain(plant, controller, grid)) - math.sqrt(2.0)
    above3 = closed >= 0.0
    hpf_transitions = np.nonzero(above3[:-1] != above3[1:])[0]
    if hpf_transitions.size == 0:
        raise ValueError("closed-loop -3 dB point not bracketed by the grid")
    j = int(hpf_transitions[-1])
    hpf_cutoff = _geometric_bisect(hpf_err, float(grid[j]), float(grid[j + 1]))

    return LoopReport(
        crossover_hz=crossover,
        phase_margin_deg=phase_margin,
        closed_loop_hpf_hz=hpf_cutoff,
        stable=phase_margin > 0.0,
    )


def _family_lag_deg(u: float, ratio: float) -> float:
    """Controller phase at crossover for zero at f_x/u, pole at f_x/(ratio*u)."""
    return math.degrees(math.atan(u) - math.atan(ratio * u))


def design_lag_lead(
    plant: ServoPlant,
    target_hpf_hz: float,
    target_pm_deg: float = 60.0,
    pole_zero_ratio: float = 20.0,
) -> LagLeadCompensator:
    """Synthesize a lag-lead compensator hitting a crossover and margin.

    The zero is placed so the controller's residual lag at the crossover
    leaves exactly the requested margin over the gate integrator's -90
    degrees; the pole sits ``pole_zero_ratio`` below the zero, clamped to
    one tenth of the crossover so the loop keeps >= 20 dB of gain one
    decade down.  The DC gain then scales the loop to unity magnitude at
    the target crossover.

    Raises :class:`DesignError` when the requested margin cannot be
    reached with the given pole/zero ratio.
    """
    if not (1.0 <= target_hpf_hz <= 100.0):
        raise ValueError(f"target_hpf_hz must be in [1, 100] Hz, got {target_hpf_hz}")
    if not (30.0 <= target_pm_deg <= 90.0):
        raise ValueError(f"target_pm_deg must be in [30, 90] deg, got {target_pm_deg}")
    if pole_zero_ratio <= 1.0:
        raise ValueError("pole_zero_ratio must exceed 1")

    f_x = target_hpf_hz
    lag_needed = target_pm_deg - 90.0  # <= 0
    ratio = pole_zero_ratio

    # On the fixed-ratio family the lag is deepest at u = 1/sqrt(ratio) and
    # recovers toward zero as u grows; search the recovering branch.
    u_floor = 1.0 / math.sqrt(ratio)
    if lag_needed < _family_lag_deg(u_floor, ratio):
        raise DesignError(
            f"phase margin {target_pm_deg} deg unreachable with pole/zero ratio "
            f"{ratio}: available lead tops out at "
            f"{90.0 + _family_lag_deg(u_floor, ratio):.1f} deg"
        )
    if lag_needed >= _family_lag_deg(_U_MAX, ratio):
        u = _U_MAX
    else:
        u = _geometric_bisect(
            lambda x: _family_lag_deg(x, ratio) - lag_needed, u_floor, _U_MAX
        )
    zero_hz = f_x / u
    pole_hz = zero_hz / ratio

    if pole_hz > f_x / 10.0:
        # Clamp the pole a decade below crossover and re-place the zero for
        # the exact margin with the pole fixed.
        pole_hz = f_x / 10.0
        arg_deg = lag_needed + math.degrees(math.atan(f_x / pole_hz))
        if arg_deg <= 0.0:
            raise DesignError(
                f"phase margin {target_pm_deg} deg unreachable with the pole "
                f"clamped to {pole_hz:.3g} Hz"
            )
        zero_hz = f_x / math.tan(math.radians(arg_deg))
        if zero_hz <= pole_hz:
            raise DesignError(
                "zero placement collapsed below the pole; targets infeasible"
            )

    unit = LagLeadCompensator(gain=1.0, zero_hz=zero_hz, pole_hz=pole_hz)
    gain = 1.0 / float(np.abs(loop_gain(plant, unit, f_x)))
    return LagLeadCompensator(gain=gain, zero_hz=zero_hz, pole_hz=pole_hz)


def design_verification_grid(crossover_hz: float, points_per_decade: int = 64) -> np.ndarray:
    """Grid spanning two decades either side of an expected crossover."""
    return log_grid(crossover_hz / 100.0, crossover_hz * 100.0, points_per_decade)
