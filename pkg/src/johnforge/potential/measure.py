"""Harmonic measure by walk on spheres over a pixel domain."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy import ndimage

from ..exceptions import ParameterError

FRAME = -1  # terminal code for walks that reach the box frame


@dataclass
class HarmonicMeasureEstimate:
    value: float
    stderr: float
    n_walks: int
    exhausted: int  # walks that hit the step cap before the shell
    frame_hits: int
    seed: int
    shell: float

    @property
    def exhausted_fraction(self):
        return self.exhausted / self.n_walks

    def to_dict(self):
        return {"value": self.value, "stderr": self.stderr, "n_walks": self.n_walks,
                "exhausted": self.exhausted, "exhausted_fraction": self.exhausted_fraction,
                "frame_hits": self.frame_hits, "seed": self.seed, "shell_pixels": self.shell}


@numba.njit(cache=True)
def _walks(u0, v0, n_walks, seed, near_r, near_c, dist, target, shell, max_steps):
    """Walk on spheres in pixel units; returns per-walk outcome codes.

    1 = stopped next to a target pixel, 0 = stopped elsewhere,
    2 = step cap reached.  Grid arrays are padded by one frame pixel.
    """
    H, W = dist.shape
    out = np.zeros(n_walks, dtype=np.int8)
    frame = np.zeros(n_walks, dtype=np.bool_)
    half_diag = math.sqrt(0.5)
    for i in range(n_walks):
        np.random.seed(seed + i)
        u, v = u0, v0
        code = 2
        for _ in range(max_steps):
            c = int(math.floor(u)) + 1
            r = int(math.floor(v)) + 1
            if r < 0 or r >= H or c < 0 or c >= W:
                code = 0
                frame[i] = True
                break
            nr, nc = near_r[r, c], near_c[r, c]
            du = (nc - 1 + 0.5) - u
            dv = (nr - 1 + 0.5) - v
            d = math.sqrt(du * du + dv * dv)
            if dist[r, c] <= shell or d <= shell:
                t = target[nr, nc]
                if t == -1:
                    frame[i] = True
                    code = 0
                else:
                    code = 1 if t == 1 else 0
                break
            # the point sits within half a diagonal of its pixel center
            rad = dist[r, c] - half_diag
            a = 2.0 * math.pi * np.random.random()
            u += rad * math.cos(a)
            v += rad * math.sin(a)
        out[i] = code
    return out, frame


def harmonic_measure_wos(domain, target, z, box, level, n_walks=10_000, shell=1.5,
                         seed=0, max_steps=10_000):
    """Probability that Brownian motion from ``z`` first exits ``domain`` near ``target``.

    ``domain`` and ``target`` are boolean pixel arrays; blocked pixels are
    the complement of ``domain`` plus a frame around the box (never a
    target).  Walk ``i`` draws from the stream seeded by ``seed + i``.
    """
    domain = np.asarray(domain, dtype=bool)
    target = np.asarray(target, dtype=bool)
    if n_walks < 1:
        raise ParameterError("n_walks must be >= 1")
    if shell < 1:
        raise ParameterError("shell must be at least one pixel")
    u0, v0 = box.to_pixel_units(z[0], z[1], level)
    u0, v0 = float(u0), float(v0)
    r0, c0 = int(math.floor(v0)), int(math.floor(u0))
    n = domain.shape[0]
    if not (0 <= r0 < n and 0 <= c0 < n and domain[r0, c0]):
        raise ParameterError(f"start point {tuple(z)} is not inside the domain")
    blocked = np.pad(~domain, 1, constant_values=True)
    codes = np.pad(np.where(target & ~domain, 1, 0), 1, constant_values=FRAME).astype(np.int8)
    dist, (near_r, near_c) = ndimage.distance_transform_edt(~blocked, return_indices=True)
    res, frame = _walks(u0, v0, int(n_walks), int(seed), near_r.astype(np.int64),
                        near_c.astype(np.int64), dist, codes, float(shell), int(max_steps))
    done = res != 2
    hits = int(np.sum(res == 1))
    p = hits / n_walks
    return HarmonicMeasureEstimate(p, math.sqrt(p * (1 - p) / n_walks), int(n_walks),
                                   int(np.sum(~done)), int(frame.sum()), int(seed), float(shell))


def poisson_arc_measure(z, a, b):
    """Harmonic measure of the arc {e^{it} : a <= t <= b} in the unit disk at z."""
    from scipy.integrate import quad

    z = complex(z[0], z[1])
    r2 = abs(z) ** 2

    def kern(t):
        return (1 - r2) / abs(np.exp(1j * t) - z) ** 2

    val, _ = quad(kern, a, b, limit=200)
    return val / (2 * np.pi)
