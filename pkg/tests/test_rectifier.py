import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from piezoharvest.errors import DomainError
from piezoharvest.rectifier import (
    BLOCKING,
    PiezoEquivalent,
    RectifierStorage,
    SteadyState,
    TransientTrace,
    simulate_rectifier,
    steady_state_metrics,
    trace_to_csv,
)

F = 100.0
DT = 1 / (F * 200)


def _run(amp=5.0, cp=1e-3, rp=math.inf, cs=1e-6, rl=1e9, vd=0.7, duration=0.5, v0=0.0, dt=DT):
    return simulate_rectifier(
        PiezoEquivalent(amp, F, cp, rp), RectifierStorage(cs, rl, vd), dt, duration, v0
    )


def test_validation():
    with pytest.raises(DomainError):
        PiezoEquivalent(-1.0, F, 1e-9)
    with pytest.raises(DomainError):
        PiezoEquivalent(1.0, 0.0, 1e-9)
    with pytest.raises(DomainError):
        PiezoEquivalent(1.0, F, 0.0)
    with pytest.raises(DomainError):
        RectifierStorage(1e-6, 1e3, -0.1)
    with pytest.raises(DomainError):
        RectifierStorage(0.0, 1e3)
    with pytest.raises(DomainError):
        RectifierStorage(1e-6, 0.0)
    with pytest.raises(DomainError, match="200"):
        _run(dt=1 / (F * 199))
    with pytest.raises(DomainError):
        _run(duration=DT / 2)
    with pytest.raises(DomainError):
        _run(v0=-1.0)


def test_trace_shape():
    tr = _run(duration=0.01)
    assert len(tr.time) == 201
    assert tr.time[0] == 0.0
    assert tr.time[-1] == pytest.approx(0.01)
    assert tr.bridge_state[0] == BLOCKING
    assert tr.storage_voltage.shape == tr.load_power.shape == tr.source_voltage.shape
    assert set(tr.state_names()) <= {"blocking", "conducting-positive", "conducting-negative"}


def test_zero_amplitude_rc_decay():
    cs, rl = 1e-6, 1e4
    tau = cs * rl
    tr = _run(amp=0.0, cs=cs, rl=rl, duration=5 * tau, v0=2.0)
    exact = 2.0 * np.exp(-tr.time / tau)
    assert np.all(tr.bridge_state == BLOCKING)
    assert tr.storage_voltage[-1] == pytest.approx(exact[-1], rel=1e-3)
    assert np.max(np.abs(tr.storage_voltage - exact)) < 1e-3 * 2.0


def test_light_load_peak_detector():
    m = steady_state_metrics(_run())
    assert m.dc_voltage == pytest.approx(5.0 - 2 * 0.7, rel=0.02)


def test_ideal_peak_detector_monotone():
    tr = _run(vd=0.0, rl=math.inf, cs=1e-3)
    assert np.all(np.diff(tr.storage_voltage) >= -1e-12)
    assert tr.storage_voltage[-1] == pytest.approx(5.0, rel=1e-6)


def test_ripple_constant_current_estimate():
    cs, rl = 100e-6, 1e4
    tr = _run(cp=1.0, cs=cs, rl=rl, duration=3.0, v0=3.5)
    m = steady_state_metrics(tr, 0.2)
    estimate = (m.dc_voltage / rl) / (2 * F * cs)
    assert m.ripple_pp == pytest.approx(estimate, rel=0.10)


def test_timestep_halving():
    a = steady_state_metrics(_run())
    b = steady_state_metrics(_run(dt=DT / 2))
    assert abs(a.dc_voltage - b.dc_voltage) / a.dc_voltage < 1e-3


def test_storage_nonnegative_and_bounded_when_store_dominates():
    # with Cs >= Cp the series capacitor cannot pump the store past A - 2 Vd
    for cp, cs in ((1e-9, 1e-8), (1e-9, 1e-7), (3e-9, 1e-8), (1e-9, 1e-9)):
        tr = _run(cp=cp, cs=cs, rl=math.inf, duration=2.0)
        assert np.all(tr.storage_voltage >= 0)
        assert np.max(tr.storage_voltage) <= (5.0 - 1.4) * (1 + 1e-9)


def test_small_store_is_pumped_above_peak():
    # documented behaviour: a charged series capacitor adds to the source swing
    tr = _run(cp=1e-8, cs=1e-9, rl=math.inf, duration=2.0)
    assert np.max(tr.storage_voltage) > 5.0 - 1.4


def test_subthreshold_source_never_conducts():
    tr = _run(amp=1.3, vd=0.7)
    assert np.all(tr.bridge_state == BLOCKING)
    assert np.all(tr.storage_voltage == 0.0)


@settings(max_examples=15, deadline=None)
@given(
    amp=st.floats(0.5, 10.0),
    vd=st.floats(0.0, 0.5),
    rl=st.floats(1e3, 1e6),
    rp=st.sampled_from([1e5, 1e7, math.inf]),
)
def test_energy_flow_inequalities(amp, vd, rl, rp):
    tr = _run(amp=amp, vd=vd, rl=rl, rp=rp, cp=1e-5, cs=1e-5, duration=0.2)
    assert np.all(tr.storage_voltage >= -1e-12)
    # whole cycles after start-up
    tail = slice(len(tr.time) - 20 * 200, None)
    load = np.mean(tr.load_power[tail])
    bridge = np.mean(tr.bridge_power[tail])
    source = np.mean(tr.source_power[tail])
    assert load <= bridge * (1 + 1e-3) + 1e-15
    assert bridge <= source * (1 + 1e-3) + 1e-15


def test_more_diode_drop_less_voltage():
    dcs = [steady_state_metrics(_run(vd=vd, rl=1e5)).dc_voltage for vd in (0.0, 0.3, 0.7, 1.0)]
    assert all(a > b for a, b in zip(dcs, dcs[1:]))


def test_bigger_store_less_ripple():
    ripples = [
        steady_state_metrics(_run(cp=1.0, cs=cs, rl=1e4, duration=1.0, v0=3.5), 0.2).ripple_pp
        for cs in (20e-6, 50e-6, 100e-6)
    ]
    assert ripples[0] > ripples[1] > ripples[2]


def _const_trace(n, v=2.0, rl=1e3):
    t = np.arange(n) * 1e-3
    vs = np.full(n, v)
    return TransientTrace(
        1e-3, t, np.zeros(n), vs, vs**2 / rl, np.zeros(n, dtype=np.int8), np.zeros(n), np.zeros(n)
    )


def test_metrics_constant_trace():
    m = steady_state_metrics(_const_trace(40), 1.0)
    assert m == SteadyState(2.0, 0.0, 4e-3)


def test_metrics_window():
    tr = _const_trace(10)
    with pytest.raises(DomainError):
        steady_state_metrics(tr, 0.0)
    with pytest.raises(DomainError):
        steady_state_metrics(tr, 1.5)
    with pytest.raises(DomainError, match="no samples"):
        steady_state_metrics(tr, 0.01)
    with pytest.raises(DomainError, match="empty"):
        steady_state_metrics(_const_trace(0), 0.5)


def test_metrics_uses_tail_only():
    tr = _run(duration=0.5)
    m = steady_state_metrics(tr, 0.25)
    tail = tr.storage_voltage[-int(round(0.25 * len(tr.time))) :]
    assert m.dc_voltage == pytest.approx(np.mean(tail), rel=1e-15)
    assert m.ripple_pp == pytest.approx(np.ptp(tail), rel=1e-15, abs=1e-18)


def test_csv_header_and_decimation():
    tr = _run(duration=0.01)
    buf = io.StringIO()
    trace_to_csv(tr, buf, decimate=10)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "time_s,v_source,v_store,p_load_w,bridge_state"
    assert len(lines) == 1 + 21
    assert lines[1] == "0.0,0.0,0.0,0.0,blocking"
    with pytest.raises(DomainError):
        trace_to_csv(tr, io.StringIO(), decimate=0)


def test_deterministic():
    a, b = _run(duration=0.1), _run(duration=0.1)
    assert np.array_equal(a.storage_voltage, b.storage_voltage)
    assert np.array_equal(a.bridge_state, b.bridge_state)
