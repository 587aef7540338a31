"""Write synthetic machine-noise recordings with a dominant harmonic.

Each file holds a tone plus a few weaker harmonics and white noise, which
is enough to exercise `piezoharvest spectrum` and `piezoharvest pipeline`.

    python3 scripts/synth_noise_wav.py --out recordings
"""

import argparse
from pathlib import Path

import numpy as np

from piezoharvest.wav import write_wav


def synth(freq, seconds, fs, snr_db, rng):
    t = np.arange(int(seconds * fs)) / fs
    s = 0.3 * np.sin(2 * np.pi * freq * t + rng.uniform(0, 2 * np.pi))
    for k, rel in ((2, 0.3), (3, 0.15)):
        s += 0.3 * rel * np.sin(2 * np.pi * k * freq * t + rng.uniform(0, 2 * np.pi))
    noise_rms = np.sqrt(np.mean(s**2) / 10 ** (snr_db / 10))
    return np.clip(s + rng.normal(0, noise_rms, t.size), -1, 1)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="recordings")
    ap.add_argument("--freq", type=float, action="append", help="tone Hz (repeatable)")
    ap.add_argument("--seconds", type=float, default=5.0)
    ap.add_argument("--rate", type=int, default=44100)
    ap.add_argument("--snr", type=float, default=10.0, help="dB")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    for f in args.freq or [105.0, 108.0, 114.0, 120.0]:
        path = out / f"noise_{f:g}hz.wav"
        write_wav(path, synth(f, args.seconds, args.rate, args.snr, rng), args.rate)
        print(path)


if __name__ == "__main__":
    main()
