"""RIFF/WAVE PCM reader with byte-offset diagnostics."""

from __future__ import annotations

import io
import struct
import wave
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, WavParseError

__all__ = ["AudioClip", "load_wav", "read_wav", "write_wav", "wav_bytes"]

_PCM = 0x0001
_EXTENSIBLE = 0xFFFE
_PCM_SUBFORMAT = bytes.fromhex("0100000000001000800000aa00389b71")


@dataclass(frozen=True, eq=False)
class AudioClip:
    sample_rate: int
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise DomainError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        if samples.ndim != 1 or samples.size == 0:
            raise DomainError("samples must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)) or np.max(np.abs(samples)) > 1.0:
            raise DomainError("samples must be finite and within [-1, 1]")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def duration(self):
        return self.samples.size / self.sample_rate


def _decode(raw, bits, channels):
    width = bits // 8
    frames = len(raw) // (width * channels)
    raw = raw[: frames * width * channels]
    if bits == 8:
        ints = np.frombuffer(raw, dtype=np.uint8).astype(np.int32) - 128
    elif bits == 16:
        ints = np.frombuffer(raw, dtype="<i2").astype(np.int32)
    else:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        ints = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        ints = np.where(ints & 0x800000, ints - (1 << 24), ints)
    scaled = ints / float(1 << (bits - 1))
    return scaled.reshape(frames, channels).mean(axis=1)


def load_wav(stream):
    """Decode a PCM WAV from bytes or a binary file object.

    Integer samples are divided by 2**(bits-1); stereo is averaged to mono.
    """
    data = stream if isinstance(stream, (bytes, bytearray, memoryview)) else stream.read()
    data = bytes(data)

    if len(data) < 12:
        raise WavParseError(f"stream is {len(data)} bytes, too short for a RIFF header", 0)
    if data[0:4] != b"RIFF":
        raise WavParseError(f"expected 'RIFF' tag, found {data[0:4]!r}", 0)
    if data[8:12] != b"WAVE":
        raise WavParseError(f"expected 'WAVE' form type, found {data[8:12]!r}", 8)

    fmt = None
    pos = 12
    while pos + 8 <= len(data):
        tag = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = pos + 8

        if tag == b"fmt ":
            if size < 16 or body + size > len(data):
                raise WavParseError(f"fmt chunk of {size} bytes is malformed", pos)
            fmt_tag, channels, rate, _, align, bits = struct.unpack_from("<HHIIHH", data, body)
            if fmt_tag == _EXTENSIBLE:
                if size < 40 or data[body + 24 : body + 40] != _PCM_SUBFORMAT:
                    raise WavParseError("extensible format is not integer PCM", body)
            elif fmt_tag != _PCM:
                raise WavParseError(
                    f"format tag {fmt_tag:#06x} is not integer PCM (compressed or float data)",
                    body,
                )
            if channels not in (1, 2):
                raise WavParseError(f"{channels} channels; only mono or stereo supported", body + 2)
            if bits not in (8, 16, 24):
                raise WavParseError(f"{bits}-bit samples; only 8, 16 or 24 supported", body + 14)
            if rate == 0:
                raise WavParseError("sample rate is zero", body + 4)
            if align != channels * bits // 8:
                raise WavParseError(
                    f"block align {align} inconsistent with {channels} x {bits}-bit", body + 12
                )
            fmt = (channels, rate, bits)

        elif tag == b"data":
            if fmt is None:
                raise WavParseError("data chunk precedes fmt chunk", pos)
            channels, rate, bits = fmt
            available = len(data) - body
            if size == 0:
                raise WavParseError("data chunk is empty", pos)
            if available < size:
                raise WavParseError(
                    f"data chunk truncated: expected {size} bytes, got {available}", body
                )
            frame = channels * bits // 8
            if size < frame:
                raise WavParseError(f"data chunk holds {size} bytes, less than one frame", body)
            samples = _decode(data[body : body + size], bits, channels)
            return AudioClip(rate, samples)

        pos = body + size + (size & 1)

    if fmt is None:
        raise WavParseError("no fmt chunk found", min(pos, len(data)))
    raise WavParseError("no data chunk found", min(pos, len(data)))


def read_wav(path):
    with open(path, "rb") as fh:
        return load_wav(fh)


def write_wav(path_or_stream, samples, sample_rate, bits=16):
    """Quantize samples in [-1, 1] to integer PCM and write a mono/stereo WAV.

    `samples` of shape (n,) is mono, (n, 2) is stereo.
    """
    arr = np.asarray(samples, dtype=float)
    channels = 1 if arr.ndim == 1 else arr.shape[1]
    full = float(1 << (bits - 1))
    ints = np.clip(np.round(arr * full), -full, full - 1).astype(np.int64).reshape(-1)
    if bits == 8:
        raw = (ints + 128).astype(np.uint8).tobytes()
    elif bits == 16:
        raw = ints.astype("<i2").tobytes()
    elif bits == 24:
        u = ints & 0xFFFFFF
        raw = np.stack([u & 0xFF, (u >> 8) & 0xFF, (u >> 16) & 0xFF], axis=1).astype(np.uint8).tobytes()
    else:
        raise DomainError(f"unsupported bit depth {bits}")

    target = path_or_stream
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        target = open(target, "wb")
        close = True
    else:
        close = False
    try:
        with wave.open(target, "wb") as w:
            w.setnchannels(channels)
            w.setsampwidth(bits // 8)
            w.setframerate(int(sample_rate))
            w.writeframes(raw)
    finally:
        if close:
            target.close()


def wav_bytes(samples, sample_rate, bits=16):
    buf = io.BytesIO()
    write_wav(buf, samples, sample_rate, bits)
    return buf.getvalue()
