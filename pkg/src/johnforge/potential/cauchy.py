"""Cauchy transform (1 / pi z) * f on a pixel grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from ..exceptions import ParameterError


@dataclass
class ComplexField:
    values: np.ndarray  # complex, row = y index
    box: object
    level: int

    @property
    def pixel(self):
        return self.box.pixel_size(self.level)

    def sup_norm(self):
        return float(np.abs(self.values).max())


def cauchy_kernel(n, pixel):
    """Kernel p / (pi (a + i b)) on offsets -(n-1)..(n-1); zero at the origin."""
    t = np.arange(-(n - 1), n, dtype=float)
    A, B = np.meshgrid(t, t)  # A: column offset (x), B: row offset (y)
    z = A + 1j * B
    k = np.zeros_like(z)
    nz = z != 0
    k[nz] = pixel / (np.pi * z[nz])
    return k


def cauchy_transform(density):
    """F(z) = (1/pi) sum_w f(w) p^2 / (z - w), by zero-padded FFT convolution."""
    f = np.asarray(density.values, dtype=complex)
    if not np.all(np.isfinite(f)):
        raise ParameterError("density must be finite")
    n = f.shape[0]
    k = cauchy_kernel(n, density.pixel)
    out = fftconvolve(f, k, mode="same") if f.any() else np.zeros_like(f)
    return ComplexField(out, density.box, density.level)
