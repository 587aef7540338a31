import csv
import subprocess
import sys

import numpy as np
import pytest

from piezoharvest.cli import CHAMBER_NOTE, main
from piezoharvest.wav import write_wav

FS = 44100
PVDF_D31 = ["--d31", "2e-11"]


def _tone(path, freq, seconds=2.0, snr_db=20.0, seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(int(FS * seconds)) / FS
    s = 0.3 * np.sin(2 * np.pi * freq * t)
    noise = rng.normal(0, np.sqrt(np.mean(s**2) / 10 ** (snr_db / 10)), t.size)
    write_wav(path, np.clip(s + noise, -1, 1), FS)
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _report(out):
    return {r[0]: r[1] for r in _rows(out / "report.csv")[1:]}


def test_modes(tmp_path, capsys):
    assert main(["modes", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "modes.csv")
    assert rows[0] == ["k", "lambda", "beta", "omega_rad_s", "frequency_hz"]
    assert len(rows) == 1 + 6
    assert float(rows[1][4]) == pytest.approx(112.25, abs=0.01)
    freqs = [float(r[4]) for r in rows[1:]]
    assert freqs == sorted(freqs)
    assert "112.25" in capsys.readouterr().out


def test_modes_single(tmp_path):
    assert main(["--out", str(tmp_path), "modes", "--count", "1"]) == 0
    assert len(_rows(tmp_path / "modes.csv")) == 2


def test_tune_default_targets(tmp_path):
    assert main(["tune", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "tune.csv")[1:]
    assert [float(r[0]) for r in rows] == [105.0, 108.0, 114.0, 120.0]
    lengths = [float(r[2]) for r in rows]
    assert all(a > b for a, b in zip(lengths, lengths[1:]))
    assert lengths[0] == pytest.approx(0.0723774, rel=1e-6)


def test_place(tmp_path):
    assert main(["place", "--out", str(tmp_path), "--grid", "11"]) == 0
    rows = _rows(tmp_path / "placement.csv")
    assert rows[0] == ["patch_start_m", "objective_per_m"]
    assert len(rows) == 12
    assert float(rows[1][0]) == 0.0


def test_config_file_and_bad_field(tmp_path, capsys):
    good = tmp_path / "good.ini"
    good.write_text("[geometry]\nlength = 0.035\n")
    assert main(["modes", "--config", str(good), "--out", str(tmp_path), "--count", "1"]) == 0
    f = float(_rows(tmp_path / "modes.csv")[1][4])
    assert f == pytest.approx(4 * 112.2533, rel=1e-5)

    bad = tmp_path / "bad.ini"
    bad.write_text("[model]\ndamping_ratio = lots\n")
    assert main(["--config", str(bad), "modes"]) == 2
    assert "model.damping_ratio" in capsys.readouterr().err

    bad.write_text("[geometry]\nlenght = 0.07\n")
    assert main(["--config", str(bad), "modes"]) == 2
    assert "geometry.lenght" in capsys.readouterr().err

    assert main(["--config", str(tmp_path / "missing.ini"), "modes"]) == 2


def test_respond_requires_d31(tmp_path, capsys):
    assert main(["respond", "--out", str(tmp_path)]) == 2
    assert "coupling.d31" in capsys.readouterr().err


def test_respond_with_shipped_pvdf_config(tmp_path):
    from pathlib import Path

    cfg = Path(__file__).resolve().parents[1] / "configs" / "pvdf.ini"
    assert main(["respond", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    rows = {r[0]: float(r[1]) for r in _rows(tmp_path / "respond.csv")[1:]}
    assert rows["open_circuit_voltage"] > 0
    assert rows["drive_frequency"] == rows["mode_frequency"]


@pytest.mark.parametrize("freq", [105.0, 120.0])
def test_spectrum_command(tmp_path, capsys, freq):
    wav = _tone(tmp_path / "in.wav", freq)
    assert main(["spectrum", str(wav), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    detected = float(out.split("dominant tone ")[1].split(" Hz")[0])
    assert detected == pytest.approx(freq, abs=FS / 8192)
    assert _rows(tmp_path / "spectrum.csv")[0] == ["frequency_hz", "power"]


def test_bad_wav_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"RIFF\x00\x00")
    assert main(["spectrum", str(bad)]) == 3
    assert "byte offset" in capsys.readouterr().err
    assert main(["spectrum", str(tmp_path / "nope.wav")]) == 3


def test_silent_wav_is_domain_error(tmp_path, capsys):
    wav = tmp_path / "silent.wav"
    write_wav(wav, np.zeros(FS), FS)
    assert main(["spectrum", str(wav)]) == 4
    assert "no peak in band" in capsys.readouterr().err


def test_rectify(tmp_path, capsys):
    args = ["rectify", "--amplitude", "5", "--frequency", "100", "--out", str(tmp_path)]
    assert main(args + ["--decimate", "10"]) == 0
    rows = _rows(tmp_path / "trace.csv")
    assert rows[0] == ["time_s", "v_source", "v_store", "p_load_w", "bridge_state"]
    assert len(rows) == 1 + 2001
    assert "dc_voltage" in capsys.readouterr().out
    assert main(["rectify", "--amplitude", "5", "--frequency", "-1"]) == 4


@pytest.mark.parametrize("freq, length", [(105.0, 0.0723774), (120.0, 0.0677029)])
def test_pipeline_tunes_to_recording(tmp_path, freq, length):
    wav = _tone(tmp_path / "in.wav", freq)
    out = tmp_path / "out"
    assert main(["pipeline", str(wav), "--out", str(out), "--spl", "130"] + PVDF_D31) == 0
    report = _report(out)
    assert float(report["tuned_length"]) == pytest.approx(length, rel=2e-3)
    assert float(report["patch_start"]) == 0.0
    assert float(report["average_power"]) > 0
    for name in ("report.txt", "spectrum.csv", "placement.csv", "trace.csv"):
        assert (out / name).exists()


def test_pipeline_higher_tone_shorter_beam(tmp_path):
    lengths = []
    for freq in (105.0, 120.0):
        out = tmp_path / str(freq)
        wav = _tone(tmp_path / f"{freq}.wav", freq)
        assert main(["pipeline", str(wav), "--out", str(out)] + PVDF_D31) == 0
        lengths.append(float(_report(out)["tuned_length"]))
    assert lengths[1] < lengths[0]


def test_pipeline_report_notes(tmp_path):
    wav = _tone(tmp_path / "in.wav", 108.0)
    assert main(["pipeline", str(wav), "--out", str(tmp_path)] + PVDF_D31) == 0
    text = (tmp_path / "report.txt").read_text()
    assert "140 dB" in text and "NOT reproducible" in text
    assert CHAMBER_NOTE in text
    assert "103.01 dB" in text


def test_pipeline_silence_flag_gives_zero_power(tmp_path):
    wav = _tone(tmp_path / "in.wav", 114.0)
    assert main(["pipeline", str(wav), "--out", str(tmp_path), "--spl", "off"] + PVDF_D31) == 0
    report = _report(tmp_path)
    assert float(report["pressure_amplitude"]) == 0.0
    assert float(report["average_power"]) == 0.0
    assert "never conducts" in (tmp_path / "report.txt").read_text()


def test_pipeline_byte_identical(tmp_path):
    wav = _tone(tmp_path / "in.wav", 120.0)
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["pipeline", str(wav), "--out", str(out), "--spl", "130"] + PVDF_D31) == 0
    for name in ("report.csv", "spectrum.csv", "placement.csv", "trace.csv", "report.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_pipeline_stage_error_names_stage(tmp_path, capsys):
    wav = tmp_path / "silent.wav"
    write_wav(wav, np.zeros(FS), FS)
    assert main(["pipeline", str(wav), "--out", str(tmp_path)] + PVDF_D31) == 4
    assert "stage 'spectrum'" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "piezoharvest", "tune", "--frequency", "120", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "67.7029" in proc.stdout
