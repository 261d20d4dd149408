"""Primitive JSON encodings: complex numbers as [re, im], matrices as
row-major nested lists."""

from __future__ import annotations

import numpy as np


def encode_complex(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValueError(f"cannot read complex number from {v!r}")


def encode_matrix(m) -> list:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[encode_complex(x) for x in row] for row in m]


def decode_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValueError("matrix must be a nonempty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("matrix rows differ in length")
    return np.array([[decode_complex(x) for x in row] for row in rows], dtype=complex)


def encode_vector(v) -> list:
    return [encode_complex(x) for x in np.ravel(v)]


def decode_vector(items) -> np.ndarray:
    if not isinstance(items, list):
        raise ValueError("vector must be a list")
    return np.array([decode_complex(x) for x in items], dtype=complex)
