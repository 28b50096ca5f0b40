"""Capacity distortion under explicit univalent maps of the disk.

Two checks: Cap(f(E)) against Cap(E)^2 for boundary arcs E, and the
capacity of the directions whose radial image is longer than lambda.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from ..exceptions import ParameterError
from .capacity import capacity_of_points

MAPS = {
    "identity": (lambda z: z, lambda z: np.ones_like(z)),
    "koebe": (lambda z: z / (1 - z) ** 2, lambda z: (1 + z) / (1 - z) ** 3),
    # odd square-root transform of the Koebe map: the plane minus two slits
    "sqrt_slit": (lambda z: z / (1 - z * z), lambda z: (1 + z * z) / (1 - z * z) ** 2),
}


def get_map(name):
    if name not in MAPS:
        raise ParameterError(f"unknown map {name!r}; choose from {sorted(MAPS)}")
    return MAPS[name]


def arc_capacity(width):
    """Cap of a circular arc of the unit circle with angular width ``width``."""
    return float(np.sin(min(width, 2 * np.pi) / 4.0))


def _resample_by_length(pts, n):
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] == 0:
        return pts[:1], 0.0
    t = np.linspace(0, s[-1], n)
    return np.column_stack([np.interp(t, s, pts[:, 0]), np.interp(t, s, pts[:, 1])]), s[-1] / (n - 1)


def image_capacity(f, center, width, n_points=512, oversample=16):
    """Capacity of f(arc): the image path is resampled at equal arc length and
    snapped to a grid of that spacing, so folded images are not double counted."""
    t = center + width * np.linspace(-0.5, 0.5, n_points * oversample)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = f(np.exp(1j * t))
    if not np.all(np.isfinite(w)):
        raise ParameterError("the arc runs into a boundary pole of the map")
    res, spacing = _resample_by_length(np.column_stack([w.real, w.imag]), n_points)
    if spacing == 0:
        return 0.0
    snapped = np.unique(np.round(res / spacing), axis=0) * spacing
    return capacity_of_points(snapped, spacing, "energy", n_points=max(8, n_points)).value


def ray_length(fprime, theta, eps=1e-12):
    """Length of f([0, e^{i theta})) = int_0^1 |f'(r e^{i theta})| dr."""
    e = np.exp(1j * theta)
    val, _ = quad(lambda r: abs(fprime(r * e)), 0.0, 1.0 - eps, limit=400)
    return float(val)


# arcs are centered away from boundary poles of each map
DEFAULT_CENTER = {"identity": np.pi, "koebe": np.pi, "sqrt_slit": np.pi / 2}


def verify_beurling(map_name="koebe", widths=None, center=None, lambdas=(1, 2, 4, 8),
                    n_theta=2048, n_points=512):
    """Tabulate both distortion quantities; returns a report dict."""
    f, fp = get_map(map_name)
    if center is None:
        center = DEFAULT_CENTER[map_name]
    if widths is None:
        top = 7 if map_name == "sqrt_slit" else 8  # width pi would end on the poles +-1
        widths = [np.pi / 8 * k for k in range(1, top + 1)]
    rows = []
    for wd in widths:
        ce = arc_capacity(wd)
        cf = image_capacity(f, center, wd, n_points)
        rows.append({"width": float(wd), "cap_E": ce, "cap_fE": cf, "ratio": cf / ce ** 2})
    # directions avoid theta = 0 exactly, where the Koebe ray has infinite length
    thetas = -np.pi + (np.arange(n_theta) + 0.5) * (2 * np.pi / n_theta)
    lengths = np.array([ray_length(fp, th) for th in thetas])
    ray_rows = []
    for lam in lambdas:
        sel = lengths > lam
        pts = np.column_stack([np.cos(thetas[sel]), np.sin(thetas[sel])])
        cap = capacity_of_points(pts, 2 * np.pi / n_theta, "energy", n_points=2048).value if sel.any() else 0.0
        ray_rows.append({"lambda": float(lam), "count": int(sel.sum()), "cap": float(cap),
                         "cap_times_sqrt_lambda": float(cap * np.sqrt(lam))})
    worst = min(rows, key=lambda r: r["ratio"])
    top = max(ray_rows, key=lambda r: r["cap_times_sqrt_lambda"])
    return {"map": map_name, "arc_center": float(center), "arcs": rows,
            "min_ratio": worst["ratio"], "min_ratio_witness": worst,
            "rays": ray_rows, "max_cap_sqrt_lambda": top["cap_times_sqrt_lambda"],
            "max_witness": top}
