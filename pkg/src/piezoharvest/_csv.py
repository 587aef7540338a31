"""Deterministic CSV output: header row, fixed-point decimals, no exponents."""

import csv

import numpy as np


def fixed(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if value == 0:
        return "0.0"
    return np.format_float_positional(value, unique=True, trim="0")


def write_rows(stream, header, rows):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fixed(v) for v in row])
