"""Sound levels and single-mode forced response under uniform acoustic pressure."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .beam import mode_curvature, mode_shape, mode_slope
from .errors import DomainError

__all__ = [
    "REFERENCE_PRESSURE",
    "PiezoCoupling",
    "ForcedResponse",
    "spl_to_pressure",
    "pressure_to_spl",
    "combine_incoherent",
    "modal_forced_response",
]

REFERENCE_PRESSURE = 20e-6  # Pa
_SPAN_POINTS = 2001


def spl_to_pressure(spl):
    """RMS pressure in Pa for a sound pressure level in dB re 20 uPa."""
    if not math.isfinite(spl):
        raise DomainError(f"sound pressure level must be finite, got {spl!r}")
    return REFERENCE_PRESSURE * 10.0 ** (spl / 20.0)


def pressure_to_spl(pressure):
    if not (math.isfinite(pressure) and pressure > 0):
        raise DomainError(f"pressure must be finite and > 0, got {pressure!r}")
    return 20.0 * math.log10(pressure / REFERENCE_PRESSURE)


def combine_incoherent(levels):
    """Energetic sum of uncorrelated sources, 10 log10(sum 10^(L/10))."""
    levels = list(levels)
    if not levels:
        raise DomainError("at least one sound level is required")
    if not all(math.isfinite(v) for v in levels):
        raise DomainError(f"sound levels must be finite, got {levels!r}")
    top = max(levels)
    # factor out the loudest source so 10^(L/10) cannot overflow
    total = sum(10.0 ** ((v - top) / 10.0) for v in levels)
    return top + 10.0 * math.log10(total)


@dataclass(frozen=True)
class PiezoCoupling:
    """Electromechanical constants of the piezo patch.

    d31 has no default on purpose; leakage_resistance may be math.inf.
    """

    d31: float  # C/N
    capacitance: float  # F
    leakage_resistance: float = 50e6  # ohm

    def __post_init__(self):
        if not math.isfinite(self.d31):
            raise DomainError(f"d31 must be finite, got {self.d31!r}")
        if not (math.isfinite(self.capacitance) and self.capacitance > 0):
            raise DomainError(f"capacitance must be > 0, got {self.capacitance!r}")
        if not self.leakage_resistance > 0:
            raise DomainError(f"leakage_resistance must be > 0, got {self.leakage_resistance!r}")


@dataclass(frozen=True)
class ForcedResponse:
    modal_amplitude: float  # m, peak |q_k|
    tip_displacement: float  # m, peak
    max_surface_strain: float  # peak over the patch
    open_circuit_voltage: float  # V, peak


def modal_forced_response(
    geometry, section, mode, pressure_amplitude, drive_frequency, damping_ratio, coupling
):
    """Steady harmonic response of one bending mode to a uniform pressure.

    The beam face sees a pressure of peak `pressure_amplitude` oscillating at
    `drive_frequency`. The load is projected on W_k, the mode responds as a
    damped single-degree-of-freedom oscillator, and the patch charge follows
    from the bending strain integrated at the piezo mid-plane.
    """
    if not 0 < damping_ratio < 1:
        raise DomainError(f"damping_ratio must lie in (0, 1), got {damping_ratio!r}")
    if not (math.isfinite(pressure_amplitude) and pressure_amplitude >= 0):
        raise DomainError(f"pressure_amplitude must be >= 0, got {pressure_amplitude!r}")
    if not (math.isfinite(drive_frequency) and drive_frequency > 0):
        raise DomainError(f"drive_frequency must be > 0, got {drive_frequency!r}")
    if not math.isclose(mode.length, geometry.length, rel_tol=1e-12):
        raise DomainError(
            f"mode was built for L={mode.length!r} m but geometry has L={geometry.length!r} m"
        )

    L = geometry.length
    x = np.linspace(0.0, L, _SPAN_POINTS)
    w = mode_shape(mode, x)
    modal_force = pressure_amplitude * geometry.width * simpson(w, x=x)
    modal_mass = section.mass_per_length * simpson(w * w, x=x)

    wk = mode.omega
    wd = 2 * math.pi * drive_frequency
    q = abs(modal_force / modal_mass) / math.hypot(wk * wk - wd * wd, 2 * damping_ratio * wk * wd)

    hb, hp = geometry.substrate.thickness, geometry.piezo.thickness
    a, b = geometry.piezo_start, geometry.patch_end
    patch = np.linspace(a, b, 201) if b > a else np.array([a])
    strain = 0.5 * hb * q * float(np.max(np.abs(mode_curvature(mode, patch))))

    bending = abs(mode_slope(mode, b) - mode_slope(mode, a))
    charge = (
        abs(coupling.d31) * geometry.piezo.youngs_modulus * geometry.width * (hb + hp) / 2 * q * bending
    )
    return ForcedResponse(
        modal_amplitude=q,
        tip_displacement=q * abs(mode_shape(mode, L)),
        max_surface_strain=strain,
        open_circuit_voltage=charge / coupling.capacitance,
    )
