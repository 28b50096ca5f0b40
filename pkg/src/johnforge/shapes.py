"""Catalog of compact test sets and their distance functions.

A shape spec is a plain JSON-friendly dict with a ``kind`` key, e.g.
``{"kind": "disk", "radius": 0.5}``.  ``parse_shape`` also accepts the
compact string form used on the command line (``"disk:0.5"``).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import ParameterError

KINDS = (
    "disk", "circle", "segment", "polygon", "disks", "cantor",
    "fat_cantor", "koch", "julia", "cardioid",
)

DISK_PRESETS = {
    1: [(0.0, 0.0, 0.4)],
    2: [(-0.4, 0.0, 0.25), (0.4, 0.0, 0.25)],
    5: [(0.0, 0.0, 0.18), (-0.5, -0.5, 0.14), (0.5, -0.5, 0.14),
        (-0.5, 0.5, 0.14), (0.5, 0.5, 0.14)],
}


def _floats(parts):
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ParameterError(f"non-numeric shape parameter in {parts!r}") from exc


def parse_shape(spec):
    """Return a normalized, validated shape dict.

    Accepts a dict (validated and completed with defaults) or a string
    ``kind:arg:arg``.  Polygons use ``polygon:x,y;x,y;...``.
    """
    if isinstance(spec, dict):
        out = dict(spec)
    else:
        text = str(spec).strip()
        if text == "two_disks":
            text = "disks:2"
        kind, _, rest = text.partition(":")
        args = rest.split(":") if rest else []
        out = {"kind": kind}
        if kind == "polygon":
            pts = [_floats(p.split(",")) for p in rest.split(";") if p]
            out["vertices"] = pts
        elif kind in ("disk", "circle"):
            vals = _floats(args)
            out["radius"] = vals[0] if vals else 0.5
            if len(vals) >= 3:
                out["center"] = vals[1:3]
        elif kind == "segment":
            vals = _floats(args)
            out["length"] = vals[0] if vals else 1.0
            if len(vals) > 1:
                out["angle"] = vals[1]
        elif kind == "disks":
            out["count"] = int(args[0]) if args else 2
        elif kind == "cantor":
            vals = _floats(args)
            out["ratio"] = vals[0] if vals else 0.25
            out["depth"] = int(vals[1]) if len(vals) > 1 else 6
        elif kind == "fat_cantor":
            vals = _floats(args)
            out["area"] = vals[0] if vals else 0.1
            if len(vals) > 1:
                out["depth"] = int(vals[1])
        elif kind == "koch":
            out["depth"] = int(args[0]) if args else 4
        elif kind == "julia":
            vals = _floats(args)
            if len(vals) < 2:
                raise ParameterError("julia needs c as 're:im'")
            out["c"] = vals[:2]
            if len(vals) > 2:
                out["max_iter"] = int(vals[2])
            if len(vals) > 3:
                out["escape_radius"] = vals[3]
        elif kind == "cardioid":
            vals = _floats(args)
            out["a"] = vals[0] if vals else 0.5
        else:
            raise ParameterError(f"unknown shape kind {kind!r}; expected one of {KINDS}")
    return _complete(out)


def _complete(spec):
    kind = spec.get("kind")
    if kind not in KINDS:
        raise ParameterError(f"unknown shape kind {kind!r}; expected one of {KINDS}")
    s = dict(spec)
    if kind in ("disk", "circle"):
        s.setdefault("radius", 0.5)
        s["radius"] = float(s["radius"])
        s["center"] = [float(v) for v in s.get("center", [0.0, 0.0])]
        if not s["radius"] > 0:
            raise ParameterError("radius must be > 0")
    elif kind == "segment":
        s["length"] = float(s.get("length", 1.0))
        s["angle"] = float(s.get("angle", 0.0))
        if not s["length"] > 0:
            raise ParameterError("segment length must be > 0")
    elif kind == "polygon":
        verts = np.asarray(s.get("vertices", []), dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2 or len(verts) < 3:
            raise ParameterError("polygon needs at least 3 (x, y) vertices")
        s["vertices"] = verts.tolist()
    elif kind == "disks":
        if "discs" in s:
            discs = s.pop("discs")
        else:
            count = int(s.get("count", 2))
            if count not in DISK_PRESETS:
                raise ParameterError(f"disks preset count must be one of {sorted(DISK_PRESETS)}")
            discs = DISK_PRESETS[count]
        discs = [[float(x), float(y), float(r)] for x, y, r in discs]
        if any(r <= 0 for _, _, r in discs):
            raise ParameterError("disk radii must be > 0")
        s["count"] = len(discs)
        s["discs"] = discs
    elif kind == "cantor":
        s["ratio"] = float(s.get("ratio", 0.25))
        s["depth"] = int(s.get("depth", 6))
        s["side"] = float(s.get("side", 1.0))
        if not 0 < s["ratio"] < 0.5:
            raise ParameterError("cantor ratio must lie in (0, 1/2)")
        if not 0 <= s["depth"] <= 12:
            raise ParameterError("cantor depth must lie in [0, 12]")
    elif kind == "fat_cantor":
        s["area"] = float(s.get("area", 0.1))
        s["depth"] = int(s.get("depth", 10))
        s["side"] = float(s.get("side", 1.0))
        if not 0 < s["area"] < s["side"] ** 2:
            raise ParameterError("fat_cantor area must lie in (0, side^2)")
        if not 1 <= s["depth"] <= 16:
            raise ParameterError("fat_cantor depth must lie in [1, 16]")
    elif kind == "koch":
        s["depth"] = int(s.get("depth", 4))
        s["size"] = float(s.get("size", 1.0))
        if not 0 <= s["depth"] <= 7:
            raise ParameterError("koch depth must lie in [0, 7]")
    elif kind == "julia":
        c = s.get("c", [0.0, 1.0])
        if isinstance(c, complex):
            c = [c.real, c.imag]
        s["c"] = [float(c[0]), float(c[1])]
        s["max_iter"] = int(s.get("max_iter", 200))
        s["escape_radius"] = float(s.get("escape_radius", 2.0))
        if s["max_iter"] < 1 or s["escape_radius"] <= 0:
            raise ParameterError("julia needs max_iter >= 1 and escape_radius > 0")
    elif kind == "cardioid":
        s["a"] = float(s.get("a", 0.5))
        if not s["a"] > 0:
            raise ParameterError("cardioid scale must be > 0")
    return s


def shape_extent(spec):
    """Radius of a centered disk containing the shape."""
    kind = spec["kind"]
    if kind in ("disk", "circle"):
        return math.hypot(*spec["center"]) + spec["radius"]
    if kind == "segment":
        return spec["length"] / 2
    if kind == "polygon":
        return float(np.max(np.hypot(*np.asarray(spec["vertices"]).T)))
    if kind == "disks":
        return max(math.hypot(x, y) + r for x, y, r in spec["discs"])
    if kind in ("cantor", "fat_cantor"):
        return spec["side"] / math.sqrt(2)
    if kind == "koch":
        return spec["size"] / math.sqrt(3)
    if kind == "julia":
        c = abs(complex(*spec["c"]))
        return (1 + math.sqrt(1 + 4 * c)) / 2
    if kind == "cardioid":
        return 1.35 * spec["a"]
    raise ParameterError(kind)


def default_half_side(spec):
    """Box half-side leaving a margin of at least 20% around the shape."""
    return max(1.0, shape_extent(spec) / 0.8)


# -- distance helpers -----------------------------------------------------


def point_segment_distance(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    den = dx * dx + dy * dy
    if den == 0:
        return np.hypot(px - ax, py - ay)
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / den, 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _interval_distance(x, intervals):
    """Distance from each x to a sorted union of disjoint closed intervals."""
    starts = intervals[:, 0]
    ends = intervals[:, 1]
    n = len(starts)
    k = np.searchsorted(starts, x, side="right") - 1
    d_left = np.where(k >= 0, np.maximum(x - ends[np.clip(k, 0, n - 1)], 0.0), np.inf)
    d_right = np.where(k + 1 < n, starts[np.clip(k + 1, 0, n - 1)] - x, np.inf)
    return np.minimum(d_left, d_right)


def cantor_intervals(ratio, depth, side=1.0):
    iv = [(-side / 2, side / 2)]
    for _ in range(depth):
        nxt = []
        for a, b in iv:
            w = ratio * (b - a)
            nxt.append((a, a + w))
            nxt.append((b - w, b))
        iv = nxt
    return np.asarray(iv)


def fat_cantor_intervals(area, depth, side=1.0):
    """Smith-Volterra-type intervals whose square has (limiting) area ``area``.

    Stage k removes a centered gap of length 2(1-m)4^{-k} (times side) from
    each of the 2^{k-1} current intervals, m = sqrt(area)/side.
    """
    m = math.sqrt(area) / side
    iv = [(-side / 2, side / 2)]
    for k in range(1, depth + 1):
        gap = 2 * (1 - m) * 4.0 ** (-k) * side
        nxt = []
        for a, b in iv:
            if b - a <= gap:
                raise ParameterError("fat_cantor gaps exceed interval length; area too small")
            mid = 0.5 * (a + b)
            nxt.append((a, mid - gap / 2))
            nxt.append((mid + gap / 2, b))
        iv = nxt
    return np.asarray(iv)


def _polygon_inside(px, py, verts):
    inside = np.zeros(px.shape, dtype=bool)
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        cond = (y0 > py) != (y1 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        inside ^= cond & (px < xint)
    return inside


def koch_polyline(depth, size=1.0):
    """Closed Koch snowflake as an (n+1, 2) array, centered at the origin."""
    r = size / math.sqrt(3)
    ang = np.pi / 2 + np.array([0, -2, -4]) * np.pi / 3
    pts = [complex(r * math.cos(a), r * math.sin(a)) for a in ang]
    pts.append(pts[0])
    rot = complex(math.cos(np.pi / 3), math.sin(np.pi / 3))
    for _ in range(depth):
        nxt = []
        for a, b in zip(pts[:-1], pts[1:]):
            d = (b - a) / 3
            p1, p3 = a + d, a + 2 * d
            p2 = p1 + d * rot.conjugate()
            nxt.extend([a, p1, p2, p3])
        nxt.append(pts[-1])
        pts = nxt
    z = np.asarray(pts)
    return np.column_stack([z.real, z.imag])


def cardioid_polyline(a, n=8192):
    """Cardioid r = a(1 - cos t), shifted so its bounding box is centered."""
    t = np.linspace(0.0, 2 * np.pi, n + 1)
    r = a * (1 - np.cos(t))
    x = r * np.cos(t) + 0.875 * a
    y = r * np.sin(t)
    return np.column_stack([x, y])


def cardioid_interior_point(a):
    return (-0.125 * a, 0.0)


def cardioid_cusp(a):
    return (0.875 * a, 0.0)


def _densify(poly, spacing):
    out = []
    for p, q in zip(poly[:-1], poly[1:]):
        n = max(1, int(math.ceil(np.hypot(*(q - p)) / spacing)))
        t = np.arange(n)[:, None] / n
        out.append(p + t * (q - p))
    out.append(poly[-1:])
    return np.vstack(out)


def exact_distance(spec, px, py):
    """Exact distance from points to the shape, or None if only sampled."""
    kind = spec["kind"]
    if kind in ("disk", "circle"):
        cx, cy = spec["center"]
        rho = np.hypot(px - cx, py - cy) - spec["radius"]
        return np.maximum(rho, 0.0) if kind == "disk" else np.abs(rho)
    if kind == "segment":
        h = spec["length"] / 2
        ca, sa = math.cos(spec["angle"]), math.sin(spec["angle"])
        return point_segment_distance(px, py, -h * ca, -h * sa, h * ca, h * sa)
    if kind == "polygon":
        verts = np.asarray(spec["vertices"])
        d = np.full(px.shape, np.inf)
        for i in range(len(verts)):
            a, b = verts[i], verts[(i + 1) % len(verts)]
            d = np.minimum(d, point_segment_distance(px, py, a[0], a[1], b[0], b[1]))
        return np.where(_polygon_inside(px, py, verts), 0.0, d)
    if kind == "disks":
        d = np.full(px.shape, np.inf)
        for x, y, r in spec["discs"]:
            d = np.minimum(d, np.maximum(np.hypot(px - x, py - y) - r, 0.0))
        return d
    if kind in ("cantor", "fat_cantor"):
        if kind == "cantor":
            iv = cantor_intervals(spec["ratio"], spec["depth"], spec["side"])
        else:
            iv = fat_cantor_intervals(spec["area"], spec["depth"], spec["side"])
        return np.hypot(_interval_distance(px, iv), _interval_distance(py, iv))
    return None


def sampled_curve(spec, spacing):
    kind = spec["kind"]
    if kind == "koch":
        poly = koch_polyline(spec["depth"], spec["size"])
    elif kind == "cardioid":
        poly = cardioid_polyline(spec["a"])
    else:
        return None
    return _densify(poly, spacing)


def curve_distance(points, px, py, radius):
    """Distance from (px, py) to a dense point sample, capped at ``radius``."""
    tree = cKDTree(points)
    d, _ = tree.query(np.column_stack([px.ravel(), py.ravel()]), distance_upper_bound=radius)
    return d.reshape(px.shape)


def julia_occupancy(c, max_iter, escape_radius, px, py, pixel):
    """Escape-time test with a distance-estimate fringe.

    A sample is kept when its orbit stays within ``escape_radius`` for
    ``max_iter`` steps; escaping samples are still kept when the classical
    distance estimate 0.5|z|log|z|/|z'| falls below half a pixel diagonal,
    so dendritic sets with empty interior remain visible.
    """
    c = complex(c)
    z = px + 1j * py
    dz = np.ones_like(z)
    bounded = np.ones(z.shape, dtype=bool)
    live = np.ones(z.shape, dtype=bool)
    big = 1e8
    for _ in range(max_iter):
        idx = np.nonzero(live)
        zi = z[idx]
        dz[idx] = 2 * zi * dz[idx]
        zi = zi * zi + c
        z[idx] = zi
        a = np.abs(zi)
        esc = a > escape_radius
        if esc.any():
            bounded[tuple(i[esc] for i in idx)] = False
        stop = a > big
        if stop.any():
            live[tuple(i[stop] for i in idx)] = False
        if not live.any():
            break
    a = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        est = 0.5 * a * np.log(np.maximum(a, 1.0)) / np.abs(dz)
    est = np.where(np.isfinite(est), est, np.inf)
    near = (~bounded) & (a > 1.0) & (est <= pixel / math.sqrt(2))
    return bounded | near, bounded
