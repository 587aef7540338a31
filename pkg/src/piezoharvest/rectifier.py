"""Transient model of a piezo source feeding a diode bridge and storage capacitor.

Network::

    V_oc(t) --||-- Cp --+-- port --[bridge, 2 Vd]--+-- Cs || R_load
                        |                          |
                        Rp                        gnd
                        |
                       gnd

V_oc(t) = A sin(2 pi f t). The bridge is an ideal-threshold element: it
blocks while |v_port| < v_store + 2 Vd and otherwise clamps the port to
+/-(v_store + 2 Vd), steering current into the storage node. Each regime
is linear and is integrated with a charge-conserving trapezoidal step.
When a step crosses a switching condition the crossing instant is located
by bisection and the remainder of the step runs in the new regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._csv import write_rows
from .errors import DomainError

__all__ = [
    "BLOCKING",
    "CONDUCTING_POSITIVE",
    "CONDUCTING_NEGATIVE",
    "STATE_NAMES",
    "PiezoEquivalent",
    "RectifierStorage",
    "TransientTrace",
    "SteadyState",
    "simulate_rectifier",
    "steady_state_metrics",
    "trace_to_csv",
]

BLOCKING = 0
CONDUCTING_POSITIVE = 1
CONDUCTING_NEGATIVE = -1
STATE_NAMES = {
    BLOCKING: "blocking",
    CONDUCTING_POSITIVE: "conducting-positive",
    CONDUCTING_NEGATIVE: "conducting-negative",
}

MIN_STEPS_PER_CYCLE = 200
_BISECTIONS = 16
_MAX_EVENTS_PER_STEP = 8


@dataclass(frozen=True)
class PiezoEquivalent:
    open_circuit_amplitude: float  # V peak
    frequency: float  # Hz
    capacitance: float  # F
    leakage_resistance: float = 50e6  # ohm, math.inf for none

    def __post_init__(self):
        if not (math.isfinite(self.open_circuit_amplitude) and self.open_circuit_amplitude >= 0):
            raise DomainError(f"open_circuit_amplitude must be >= 0, got {self.open_circuit_amplitude!r}")
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise DomainError(f"frequency must be > 0, got {self.frequency!r}")
        if not (math.isfinite(self.capacitance) and self.capacitance > 0):
            raise DomainError(f"capacitance must be > 0, got {self.capacitance!r}")
        if not self.leakage_resistance > 0:
            raise DomainError(f"leakage_resistance must be > 0, got {self.leakage_resistance!r}")


@dataclass(frozen=True)
class RectifierStorage:
    storage_capacitance: float  # F
    load_resistance: float  # ohm, math.inf for open circuit
    diode_drop: float = 0.3  # V per conducting diode

    def __post_init__(self):
        if not (math.isfinite(self.diode_drop) and self.diode_drop >= 0):
            raise DomainError(f"diode_drop must be >= 0, got {self.diode_drop!r}")
        if not (math.isfinite(self.storage_capacitance) and self.storage_capacitance > 0):
            raise DomainError(f"storage_capacitance must be > 0, got {self.storage_capacitance!r}")
        if not self.load_resistance > 0:
            raise DomainError(f"load_resistance must be > 0, got {self.load_resistance!r}")


@dataclass(frozen=True, eq=False)
class TransientTrace:
    """Uniformly sampled simulation output.

    `bridge_power` and `source_power` hold the mean power over the step
    ending at each sample (zero for the first sample): power pushed by the
    bridge into the storage node, and power drawn from the ideal source.
    """

    timestep: float
    time: np.ndarray
    source_voltage: np.ndarray
    storage_voltage: np.ndarray
    load_power: np.ndarray
    bridge_state: np.ndarray
    bridge_power: np.ndarray = field(repr=False)
    source_power: np.ndarray = field(repr=False)
    open_circuit_amplitude: float = 0.0
    diode_drop: float = 0.0

    def state_names(self):
        return [STATE_NAMES[int(s)] for s in self.bridge_state]


@dataclass(frozen=True)
class SteadyState:
    dc_voltage: float
    ripple_pp: float
    average_power: float


class _Network:
    def __init__(self, piezo, rs):
        self.amp = piezo.open_circuit_amplitude
        self.w = 2 * math.pi * piezo.frequency
        self.cp = piezo.capacitance
        self.g = 1.0 / piezo.leakage_resistance
        self.cs = rs.storage_capacitance
        self.gl = 1.0 / rs.load_resistance
        self.vd = rs.diode_drop

    def source(self, t):
        return self.amp * math.sin(self.w * t)

    def source_rate(self, t):
        return self.amp * self.w * math.cos(self.w * t)

    def advance(self, state, t, vcp, vs, h):
        v0, v1 = self.source(t), self.source(t + h)
        cp, cs, g, gl, vd = self.cp, self.cs, self.g, self.gl, self.vd
        hg, hgl = 0.5 * h * g, 0.5 * h * gl
        if state == BLOCKING:
            vcp1 = (vcp * (cp - hg) + hg * (v0 + v1)) / (cp + hg)
            vs1 = vs * (cs - hgl) / (cs + hgl)
            return vcp1, vs1
        s = state
        vin0 = v0 - vcp
        num = s * cp * (v1 - vcp) - 2 * vd * cp - s * hg * vin0 - 2 * hg * vd + cs * vs - hgl * vs
        vs1 = num / (cp + cs + hg + hgl)
        return v1 - s * (vs1 + 2 * vd), vs1

    def storage_current(self, state, t, vs):
        """Instantaneous bridge current into the storage node while conducting."""
        raw = state * self.cp * self.source_rate(t) + self.cp / self.cs * vs * self.gl
        raw -= (vs + 2 * self.vd) * self.g
        return raw * self.cs / (self.cs + self.cp)

    def switches(self, state, t, vcp, vs, tol):
        """New bridge state if (t, vcp, vs) violates `state`, else None."""
        if state == BLOCKING:
            vin = self.source(t) - vcp
            if abs(vin) - (vs + 2 * self.vd) > tol:
                return CONDUCTING_POSITIVE if vin > 0 else CONDUCTING_NEGATIVE
            return None
        if self.storage_current(state, t, vs) < 0:
            return BLOCKING
        return None


def simulate_rectifier(piezo, rs, timestep, duration, initial_storage_voltage=0.0):
    """Fixed-step transient of the bridge/storage network from a cold source.

    The series capacitor starts uncharged and the storage capacitor at
    `initial_storage_voltage`. At least 200 steps per source cycle are required.
    """
    if not (math.isfinite(timestep) and timestep > 0):
        raise DomainError(f"timestep must be > 0, got {timestep!r}")
    if not (math.isfinite(duration) and duration >= timestep):
        raise DomainError(f"duration must be >= timestep, got {duration!r}")
    if timestep * MIN_STEPS_PER_CYCLE * piezo.frequency > 1 + 1e-9:
        raise DomainError(
            f"timestep {timestep!r} s gives fewer than {MIN_STEPS_PER_CYCLE} steps per "
            f"{piezo.frequency!r} Hz cycle"
        )
    if not (math.isfinite(initial_storage_voltage) and initial_storage_voltage >= 0):
        raise DomainError(f"initial_storage_voltage must be >= 0, got {initial_storage_voltage!r}")

    net = _Network(piezo, rs)
    n = int(math.floor(duration / timestep + 1e-9))
    h = timestep
    tol = 1e-12 * max(1.0, piezo.open_circuit_amplitude, initial_storage_voltage)

    time = np.arange(n + 1) * h
    v_store = np.empty(n + 1)
    states = np.empty(n + 1, dtype=np.int8)
    bridge_power = np.zeros(n + 1)
    source_power = np.zeros(n + 1)

    vcp, vs = 0.0, float(initial_storage_voltage)
    state = BLOCKING
    v_store[0], states[0] = vs, state

    cs, gl, cp = net.cs, net.gl, net.cp
    for k in range(n):
        t = time[k]
        remaining = h
        e_bridge = e_source = 0.0
        for _ in range(_MAX_EVENTS_PER_STEP):
            vcp1, vs1 = net.advance(state, t, vcp, vs, remaining)
            new = net.switches(state, t + remaining, vcp1, vs1, tol)
            if new is None:
                sub = remaining
            else:
                lo, hi = 0.0, remaining
                for _ in range(_BISECTIONS):
                    mid = 0.5 * (lo + hi)
                    trial = net.advance(state, t, vcp, vs, mid)
                    if net.switches(state, t + mid, *trial, tol) is None:
                        lo = mid
                    else:
                        hi = mid
                sub = hi
                vcp1, vs1 = net.advance(state, t, vcp, vs, sub)
                new = net.switches(state, t + sub, vcp1, vs1, tol)

            vmid = 0.5 * (vs + vs1)
            e_bridge += (cs * (vs1 - vs) + sub * vmid * gl) * vmid
            e_source += cp * (vcp1 - vcp) * 0.5 * (net.source(t) + net.source(t + sub))
            vcp, vs, t = vcp1, vs1, t + sub
            remaining -= sub
            if new is not None:
                state = new
            if remaining <= 1e-12 * h:
                break
        else:
            vcp, vs = net.advance(state, t, vcp, vs, remaining)

        v_store[k + 1] = vs
        states[k + 1] = state
        bridge_power[k + 1] = e_bridge / h
        source_power[k + 1] = e_source / h

    source = piezo.open_circuit_amplitude * np.sin(net.w * time)
    load = v_store**2 * gl
    return TransientTrace(
        timestep=h,
        time=time,
        source_voltage=source,
        storage_voltage=v_store,
        load_power=load,
        bridge_state=states,
        bridge_power=bridge_power,
        source_power=source_power,
        open_circuit_amplitude=piezo.open_circuit_amplitude,
        diode_drop=rs.diode_drop,
    )


def _tail(values, tail_fraction):
    if not 0 < tail_fraction <= 1:
        raise DomainError(f"tail_fraction must lie in (0, 1], got {tail_fraction!r}")
    count = int(round(tail_fraction * len(values)))
    if count == 0:
        raise DomainError("tail window holds no samples")
    return values[len(values) - count :]


def steady_state_metrics(trace, tail_fraction=0.25):
    """DC level, peak-to-peak ripple and mean load power over the trace tail."""
    if len(trace.time) == 0:
        raise DomainError("trace is empty")
    v = _tail(trace.storage_voltage, tail_fraction)
    p = _tail(trace.load_power, tail_fraction)
    return SteadyState(float(np.mean(v)), float(np.max(v) - np.min(v)), float(np.mean(p)))


def trace_to_csv(trace, stream, decimate=1):
    if int(decimate) != decimate or decimate < 1:
        raise DomainError(f"decimate must be a positive integer, got {decimate!r}")
    sl = slice(None, None, int(decimate))
    names = [STATE_NAMES[int(s)] for s in trace.bridge_state[sl]]
    write_rows(
        stream,
        ["time_s", "v_source", "v_store", "p_load_w", "bridge_state"],
        zip(
            trace.time[sl],
            trace.source_voltage[sl],
            trace.storage_voltage[sl],
            trace.load_power[sl],
            names,
        ),
    )
