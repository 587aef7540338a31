"""Command-line front end: modes, tune, place, spectrum, respond, rectify, pipeline.

Exit codes: 0 success, 2 configuration error, 3 input-data error,
4 numerical-domain error.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys
from pathlib import Path

from . import __version__
from ._csv import fixed, write_rows
from .acoustics import combine_incoherent, modal_forced_response, spl_to_pressure
from .beam import natural_frequencies, section_properties
from .config import load_config
from .design import (
    DesignTarget,
    length_for_frequency,
    optimal_patch_start,
    placement_to_csv,
)
from .errors import ConfigError, DomainError, WavParseError
from .rectifier import (
    PiezoEquivalent,
    simulate_rectifier,
    steady_state_metrics,
    trace_to_csv,
)
from .spectrum import dominant_harmonic, power_spectrum, spectrum_to_csv
from .wav import read_wav

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_DOMAIN = 4

DEFAULT_SPL = 103.0  # two incoherent 100 dB sources, free field

CHAMBER_NOTE = (
    "Sound level is a free-field incoherent sum of point sources. Enclosed-room "
    "resonance is not modeled, so chamber levels such as 140 dB from two 100 dB "
    "sources are NOT reproducible with this tool."
)


class StageError(Exception):
    def __init__(self, stage, error):
        self.stage = stage
        self.error = error
        super().__init__(f"stage '{stage}' failed: {error}")


@contextlib.contextmanager
def _stage(name):
    try:
        yield
    except (ConfigError, DomainError, WavParseError, OSError) as exc:
        raise StageError(name, exc) from exc


def _out_dir(args, config):
    out = Path(args.out) if args.out else config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path, writer, *payload, **kw):
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer(*payload, fh, **kw)


def _section(config):
    return section_properties(config.geometry, config.section_model)


def _parse_spl(text):
    if text.lower() in ("off", "none", "silent"):
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a level in dB or 'off', got {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError("level must be finite")
    return value


def cmd_modes(args, config):
    count = args.count or config.mode_count
    modes = natural_frequencies(
        _section(config), config.geometry.length, count, config.root_tolerance
    )
    print(f"{'k':>3} {'lambda':>12} {'beta':>12} {'f [Hz]':>14}")
    for m in modes:
        print(f"{m.index:>3d} {m.lam:>12.6f} {m.beta:>12.6f} {m.frequency:>14.4f}")
    rows = ((m.index, m.lam, m.beta, m.omega, m.frequency) for m in modes)
    out = _out_dir(args, config)

    def write(rows, fh):
        write_rows(fh, ["k", "lambda", "beta", "omega_rad_s", "frequency_hz"], rows)

    _write_csv(out / "modes.csv", write, list(rows))
    return EXIT_OK


def cmd_tune(args, config):
    section = _section(config)
    targets = args.frequency or [105.0, 108.0, 114.0, 120.0]
    rows = []
    for f in targets:
        length = length_for_frequency(section, DesignTarget(f, args.mode, config.section_model))
        rows.append((f, args.mode, length))
        print(f"{f:10.3f} Hz -> L = {length * 1e3:9.4f} mm")

    def write(rows, fh):
        write_rows(fh, ["target_hz", "mode", "length_m"], rows)

    _write_csv(_out_dir(args, config) / "tune.csv", write, rows)
    return EXIT_OK


def cmd_place(args, config):
    geom = config.geometry
    mode = natural_frequencies(_section(config), geom.length, args.mode, config.root_tolerance)[-1]
    result = optimal_patch_start(geom, mode, args.grid or config.placement_grid)
    print(
        f"mode {mode.index}: best patch start {result.patch_start * 1e3:.4f} mm "
        f"(objective {result.objective_value:.6g} 1/m)"
    )
    _write_csv(_out_dir(args, config) / "placement.csv", placement_to_csv, result)
    return EXIT_OK


def _analyse(path, config):
    clip = read_wav(path)
    spec = power_spectrum(clip, config.segment_length, config.window)
    tone = dominant_harmonic(spec, config.band_low, config.band_high)
    return spec, tone


def cmd_spectrum(args, config):
    spec, tone = _analyse(args.wav, config)
    print(
        f"dominant tone {tone.frequency:.3f} Hz (power {tone.power:.6g}, "
        f"band {tone.band[0]:g}-{tone.band[1]:g} Hz, resolution {spec.resolution:.4f} Hz)"
    )
    _write_csv(_out_dir(args, config) / "spectrum.csv", spectrum_to_csv, spec)
    return EXIT_OK


def _pressure(spl):
    return 0.0 if spl is None else math.sqrt(2.0) * spl_to_pressure(spl)


def cmd_respond(args, config):
    coupling = config.coupling()
    geom = config.geometry
    mode = natural_frequencies(_section(config), geom.length, args.mode, config.root_tolerance)[-1]
    drive = args.frequency or mode.frequency
    resp = modal_forced_response(
        geom, _section(config), mode, _pressure(args.spl), drive, config.damping_ratio, coupling
    )
    rows = [
        ("drive_frequency", drive, "Hz"),
        ("mode_frequency", mode.frequency, "Hz"),
        ("pressure_amplitude", _pressure(args.spl), "Pa"),
        ("modal_amplitude", resp.modal_amplitude, "m"),
        ("tip_displacement", resp.tip_displacement, "m"),
        ("max_surface_strain", resp.max_surface_strain, "1"),
        ("open_circuit_voltage", resp.open_circuit_voltage, "V"),
    ]
    for name, value, unit in rows:
        print(f"{name:>22s} = {value:.6g} {unit}")

    def write(rows, fh):
        write_rows(fh, ["quantity", "value", "unit"], rows)

    _write_csv(_out_dir(args, config) / "respond.csv", write, rows)
    return EXIT_OK


def _simulate(config, amplitude, frequency, duration=None):
    piezo = PiezoEquivalent(amplitude, frequency, config.capacitance, config.leakage_resistance)
    step = 1.0 / (config.steps_per_cycle * frequency)
    duration = duration if duration is not None else config.cycles / frequency
    trace = simulate_rectifier(piezo, config.rectifier, step, duration, config.initial_storage_voltage)
    return trace, steady_state_metrics(trace, config.tail_fraction)


def cmd_rectify(args, config):
    trace, metrics = _simulate(config, args.amplitude, args.frequency, args.duration)
    print(f"dc_voltage    = {metrics.dc_voltage:.6g} V")
    print(f"ripple_pp     = {metrics.ripple_pp:.6g} V")
    print(f"average_power = {metrics.average_power:.6g} W")
    _write_csv(_out_dir(args, config) / "trace.csv", trace_to_csv, trace, decimate=args.decimate)
    return EXIT_OK


def run_pipeline(config, wav_path, spl, out, decimate=1):
    """Recording -> tuned beam -> patch placement -> response -> rectifier."""
    with _stage("config"):
        coupling = config.coupling()
    with _stage("spectrum"):
        spec, tone = _analyse(wav_path, config)
    with _stage("tune"):
        section = _section(config)
        length = length_for_frequency(section, DesignTarget(tone.frequency, 1, config.section_model))
        geom = config.geometry.with_length(length)
        mode = natural_frequencies(section, length, 1, config.root_tolerance)[0]
    with _stage("place"):
        placement = optimal_patch_start(geom, mode, config.placement_grid)
        geom = geom.with_patch_start(placement.patch_start)
    with _stage("respond"):
        pressure = _pressure(spl)
        resp = modal_forced_response(
            geom, section, mode, pressure, tone.frequency, config.damping_ratio, coupling
        )
    with _stage("rectify"):
        trace, metrics = _simulate(config, resp.open_circuit_voltage, tone.frequency)

    rows = [
        ("dominant_frequency", tone.frequency, "Hz"),
        ("tuned_length", length, "m"),
        ("mode1_frequency", mode.frequency, "Hz"),
        ("patch_start", placement.patch_start, "m"),
        ("patch_length", geom.piezo_length, "m"),
        ("placement_objective", placement.objective_value, "1/m"),
        ("spl", "off" if spl is None else spl, "dB"),
        ("pressure_amplitude", pressure, "Pa"),
        ("tip_displacement", resp.tip_displacement, "m"),
        ("max_surface_strain", resp.max_surface_strain, "1"),
        ("peak_open_circuit_voltage", resp.open_circuit_voltage, "V"),
        ("dc_voltage", metrics.dc_voltage, "V"),
        ("ripple_pp", metrics.ripple_pp, "V"),
        ("average_power", metrics.average_power, "W"),
    ]

    def write(rows, fh):
        write_rows(fh, ["quantity", "value", "unit"], rows)

    _write_csv(out / "report.csv", write, rows)
    _write_csv(out / "spectrum.csv", spectrum_to_csv, spec)
    _write_csv(out / "placement.csv", placement_to_csv, placement)
    _write_csv(out / "trace.csv", trace_to_csv, trace, decimate=decimate)

    lines = ["Harvester design report", ""]
    lines += [f"  {name:<28s} {fixed(value):>24s} {unit}" for name, value, unit in rows]
    lines += ["", "Notes:", f"  - {CHAMBER_NOTE}"]
    if spl is not None:
        lines.append(
            f"  - Drive level {spl:g} dB. The default of {DEFAULT_SPL:g} dB is two "
            f"incoherent 100 dB sources in free field "
            f"({combine_incoherent([100.0, 100.0]):.2f} dB)."
        )
    lines.append(
        "  - Frequencies come from a 1-D Euler-Bernoulli bilayer model; 3-D FEM "
        "of the same beam may differ by several percent."
    )
    if resp.open_circuit_voltage <= 2 * config.rectifier.diode_drop:
        lines.append(
            "  - Peak open-circuit voltage does not exceed two diode drops; "
            "the bridge never conducts and nothing is harvested."
        )
    text = "\n".join(lines) + "\n"
    (out / "report.txt").write_text(text)
    return text


def cmd_pipeline(args, config):
    text = run_pipeline(config, args.wav, args.spl, _out_dir(args, config), args.decimate)
    print(text, end="")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="INI config file")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--d31", type=float, default=argparse.SUPPRESS, help="piezo d31 [C/N]")

    parser = argparse.ArgumentParser(
        prog="piezoharvest",
        description="Cantilever piezoelectric acoustic harvester design tools.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="INI config file (layered over built-in defaults)")
    parser.add_argument("--out", help="output directory (overrides [output] directory)")
    parser.add_argument("--d31", type=float, help="piezo d31 [C/N], overrides the config")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modes", parents=[common], help="bending modes of the configured beam")
    p.add_argument("--count", type=int, help="number of modes (default: [model] mode_count)")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("tune", parents=[common], help="beam length for target frequencies")
    p.add_argument("--frequency", type=float, action="append", help="target Hz (repeatable)")
    p.add_argument("--mode", type=int, default=1)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("place", parents=[common], help="optimal piezo patch position")
    p.add_argument("--mode", type=int, default=1)
    p.add_argument("--grid", type=int, help="grid points (default: [model] placement_grid)")
    p.set_defaults(func=cmd_place)

    p = sub.add_parser("spectrum", parents=[common], help="dominant tone of a WAV recording")
    p.add_argument("wav")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("respond", parents=[common], help="forced response to a sound level")
    p.add_argument("--spl", type=_parse_spl, default=DEFAULT_SPL, help="dB re 20 uPa, or 'off'")
    p.add_argument("--frequency", type=float, help="drive Hz (default: the mode frequency)")
    p.add_argument("--mode", type=int, default=1)
    p.set_defaults(func=cmd_respond)

    p = sub.add_parser("rectify", parents=[common], help="bridge rectifier transient")
    p.add_argument("--amplitude", type=float, required=True, help="peak open-circuit volts")
    p.add_argument("--frequency", type=float, required=True, help="source Hz")
    p.add_argument("--duration", type=float, help="seconds (default: [rectifier] cycles)")
    p.add_argument("--decimate", type=int, default=1)
    p.set_defaults(func=cmd_rectify)

    p = sub.add_parser("pipeline", parents=[common], help="recording to harvested power")
    p.add_argument("wav")
    p.add_argument("--spl", type=_parse_spl, default=DEFAULT_SPL, help="dB re 20 uPa, or 'off'")
    p.add_argument("--decimate", type=int, default=1)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        overrides = {} if args.d31 is None else {"coupling.d31": repr(args.d31)}
        config = load_config(args.config, overrides)
        return args.func(args, config)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc.error)
    except (ConfigError, DomainError, WavParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)


def _exit_code(exc):
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, (WavParseError, OSError)):
        return EXIT_INPUT
    return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
