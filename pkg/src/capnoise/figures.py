"""Matplotlib rendering of report figures (Agg backend, file output only)."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .noise import Spectrum
from .servo import Controller, LoopReport, ServoPlant, loop_gain

_DPI = 150
# Strip the version-bearing Software text chunk so PNG bytes depend only
# on the rendered content.
_PNG_METADATA = {"Software": None}


def render_nsd_figure(spectra: dict[str, Spectrum], title: str) -> bytes:
    """Overlay of the labeled noise spectral densities, PNG bytes."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for label, spectrum in spectra.items():
        ax.loglog(spectrum.freqs, spectrum.values, label=label)
    ax.set_xlabel("Frequency (Hz)")
    ax.set_ylabel("Noise density (V/$\\sqrt{\\mathrm{Hz}}$)")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _to_png(fig)


def render_servo_figure(
    plant: ServoPlant, controller: Controller, freqs: np.ndarray, report: LoopReport, title: str
) -> bytes:
    """Loop-gain Bode plot with the crossover marked, PNG bytes."""
    response = loop_gain(plant, controller, freqs)
    mag_db = 20.0 * np.log10(np.abs(response))
    phase = np.degrees(np.angle(response))
    phase[phase > 0.0] -= 360.0

    fig, (ax_mag, ax_ph) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 5.5))
    ax_mag.semilogx(freqs, mag_db)
    ax_mag.axhline(0.0, color="gray", lw=0.8)
    ax_mag.axvline(report.crossover_hz, color="tab:red", ls="--", lw=0.8)
    ax_mag.set_ylabel("|L| (dB)")
    ax_mag.grid(True, which="both", alpha=0.3)
    ax_mag.set_title(title)

    ax_ph.semilogx(freqs, phase)
    ax_ph.axhline(-180.0, color="gray", lw=0.8)
    ax_ph.axvline(report.crossover_hz, color="tab:red", ls="--", lw=0.8)
    ax_ph.annotate(
        f"crossover {report.crossover_hz:.2f} Hz\nphase margin {report.phase_margin_deg:.1f} deg",
        xy=(report.crossover_hz, -180.0 + report.phase_margin_deg),
        xytext=(8, 8),
        textcoords="offset points",
        fontsize=8,
    )
    ax_ph.set_xlabel("Frequency (Hz)")
    ax_ph.set_ylabel("phase(L) (deg)")
    ax_ph.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _to_png(fig)


def _to_png(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=_DPI, metadata=_PNG_METADATA)
    plt.close(fig)
    return buf.getvalue()
