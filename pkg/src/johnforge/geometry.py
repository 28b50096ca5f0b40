"""Dyadic grid infrastructure.

Pixels of a mask at level ``L`` are the 2^L x 2^L closed dyadic squares of
a :class:`Box`; row index grows with ``y``.  Grid nodes are pixel centers,
and every distance is measured to the nearest *occupied pixel center*.
Internally distances are kept in pixel units so that ratios are exactly
dilation invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from . import shapes
from .exceptions import EmptyMaskError, GeometryError, ParameterError

MIN_LEVEL, MAX_LEVEL = 3, 14
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Box:
    """Axis-aligned square frame ``center +- half_side``."""

    center: tuple = (0.0, 0.0)
    half_side: float = 1.0

    def __post_init__(self):
        if not self.half_side > 0:
            raise ParameterError("box half_side must be > 0")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "half_side", float(self.half_side))

    @property
    def side(self):
        return 2.0 * self.half_side

    @property
    def origin(self):
        return (self.center[0] - self.half_side, self.center[1] - self.half_side)

    def pixel_size(self, level):
        return self.side / (1 << level)

    def pixel_centers(self, level):
        """(X, Y) arrays of pixel-center coordinates, shape (2^L, 2^L)."""
        n = 1 << level
        p = self.pixel_size(level)
        t = (np.arange(n) + 0.5) * p
        return np.meshgrid(self.origin[0] + t, self.origin[1] + t)

    def to_pixel_units(self, x, y, level):
        """Plane coordinates to continuous pixel coordinates (col, row)."""
        p = self.pixel_size(level)
        return (np.asarray(x) - self.origin[0]) / p, (np.asarray(y) - self.origin[1]) / p

    def from_pixel_units(self, u, v, level):
        p = self.pixel_size(level)
        return self.origin[0] + np.asarray(u) * p, self.origin[1] + np.asarray(v) * p

    def pixel_of(self, x, y, level):
        """(row, col) of the pixel containing (x, y)."""
        u, v = self.to_pixel_units(x, y, level)
        n = 1 << level
        return (np.clip(np.floor(v).astype(int), 0, n - 1),
                np.clip(np.floor(u).astype(int), 0, n - 1))

    def scaled(self, s):
        return Box((self.center[0] * s, self.center[1] * s), self.half_side * s)

    def to_dict(self):
        return {"center": list(self.center), "half_side": self.half_side}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["center"]), d["half_side"])


@dataclass(frozen=True, eq=False)
class CompactSetMask:
    """Occupancy of the closed pixels of a box; the compact set K."""

    box: Box
    level: int
    bits: np.ndarray
    shape_spec: dict = field(default_factory=dict)

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=bool)
        n = 1 << self.level
        if bits.shape != (n, n):
            raise ParameterError(f"bits must have shape {(n, n)}, got {bits.shape}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def n(self):
        return 1 << self.level

    @property
    def pixel(self):
        return self.box.pixel_size(self.level)

    @property
    def count(self):
        return int(self.bits.sum())

    @property
    def area(self):
        """Occupied pixel area (exact sum of closed-pixel areas)."""
        return self.count * self.pixel ** 2

    def occupied_centers(self):
        """(k, 2) array of occupied pixel centers in plane coordinates."""
        r, c = np.nonzero(self.bits)
        x, y = self.box.from_pixel_units(c + 0.5, r + 0.5, self.level)
        return np.column_stack([x, y])

    def boundary_pixels(self, connectivity=4):
        """Occupied pixels with an unoccupied neighbor (box outside counts)."""
        pad = np.pad(self.bits, 1, constant_values=False)
        free = ~pad
        if connectivity == 4:
            nb = free[:-2, 1:-1] | free[2:, 1:-1] | free[1:-1, :-2] | free[1:-1, 2:]
        else:
            nb = ndimage.binary_dilation(free, np.ones((3, 3), bool))[1:-1, 1:-1]
        return self.bits & nb

    def outer_boundary_pixels(self):
        """Occupied pixels 4-adjacent to the unbounded complementary component."""
        ext = exterior_component(self.bits)
        pad = np.pad(ext, 1, constant_values=True)
        nb = pad[:-2, 1:-1] | pad[2:, 1:-1] | pad[1:-1, :-2] | pad[1:-1, 2:]
        return self.bits & nb

    def scaled(self, s):
        """The same pixel set in a box dilated by ``s`` about the origin."""
        return CompactSetMask(self.box.scaled(s), self.level, self.bits, dict(self.shape_spec))

    def with_bits(self, bits, **spec_update):
        spec = dict(self.shape_spec)
        spec.update(spec_update)
        return CompactSetMask(self.box, self.level, bits, spec)


def exterior_component(bits):
    """Unoccupied pixels 4-connected to the outside of the box."""
    free = np.pad(~bits, 1, constant_values=True)
    lab, _ = ndimage.label(free)
    return (lab == lab[0, 0])[1:-1, 1:-1]


def free_components(bits):
    """4-connected labels of the unoccupied pixels (0 on occupied pixels)."""
    lab, n = ndimage.label(~bits)
    return lab, n


def _check_level(level):
    if not isinstance(level, (int, np.integer)) or not MIN_LEVEL <= level <= MAX_LEVEL:
        raise ParameterError(f"level must be an integer in [{MIN_LEVEL}, {MAX_LEVEL}], got {level!r}")


def rasterize(spec, level, box=None):
    """Rasterize a shape spec into a :class:`CompactSetMask`.

    A pixel is occupied when its center lies within half a pixel diagonal
    of the true set, so every point of the set lies in an occupied pixel and
    every occupied pixel meets the one-pixel neighborhood of the set.
    Julia sets use escape time on a 2 x 2 supersample of each pixel.
    """
    _check_level(level)
    spec = shapes.parse_shape(spec)
    if box is None:
        box = Box((0.0, 0.0), shapes.default_half_side(spec))
    p = box.pixel_size(level)
    X, Y = box.pixel_centers(level)
    half_diag = p / SQRT2
    kind = spec["kind"]

    if kind == "julia":
        bits = np.zeros(X.shape, dtype=bool)
        c = complex(*spec["c"])
        for ox in (-0.25, 0.25):
            for oy in (-0.25, 0.25):
                occ, _ = shapes.julia_occupancy(
                    c, spec["max_iter"], spec["escape_radius"], X + ox * p, Y + oy * p, p)
                bits |= occ
    else:
        d = shapes.exact_distance(spec, X, Y)
        if d is not None:
            bits = d <= half_diag * (1 + 1e-12)
        else:
            spacing = p / 8
            pts = shapes.sampled_curve(spec, spacing)
            bits = shapes.curve_distance(pts, X, Y, 2 * p) <= half_diag + spacing / 2

    if not bits.any():
        raise EmptyMaskError(f"rasterizing {spec} at level {level} gave an empty mask")
    if bits[0].any() or bits[-1].any() or bits[:, 0].any() or bits[:, -1].any():
        raise GeometryError("the set touches the box boundary; enlarge the box")
    return CompactSetMask(box, int(level), bits, spec)


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Distance from every pixel center to the nearest occupied pixel center."""

    box: Box
    level: int
    pixels: np.ndarray  # distances in pixel units
    nearest: np.ndarray  # (2, N, N) row/col of the nearest occupied pixel

    @property
    def pixel(self):
        return self.box.pixel_size(self.level)

    @property
    def values(self):
        return self.pixels * self.pixel


def distance_transform(mask):
    """Exact Euclidean distance transform of the occupied pixel set.

    Backed by scipy's exact separable (two-pass per axis) algorithm.
    """
    if not mask.bits.any():
        raise EmptyMaskError("distance transform of an empty mask")
    d, idx = ndimage.distance_transform_edt(~mask.bits, return_indices=True)
    d.setflags(write=False)
    idx.setflags(write=False)
    return DistanceField(mask.box, mask.level, d, idx)


def brute_force_distance(mask):
    """O(N * K) reference distance in pixel units (testing oracle)."""
    r, c = np.nonzero(mask.bits)
    rr, cc = np.mgrid[0:mask.n, 0:mask.n]
    out = np.full(rr.shape, np.inf)
    for i, j in zip(r, c):
        np.minimum(out, np.hypot(rr - i, cc - j), out=out)
    return out


@dataclass(frozen=True)
class DyadicSquare:
    level: int
    i: int  # row
    j: int  # col
    box: Box = field(default=Box(), repr=False, compare=False)

    @property
    def side(self):
        return self.box.side * 2.0 ** (-self.level)

    @property
    def diam(self):
        return self.side * SQRT2

    @property
    def center(self):
        x0, y0 = self.box.origin
        return (x0 + (self.j + 0.5) * self.side, y0 + (self.i + 0.5) * self.side)


class WhitneyDecomposition:
    """Maximal dyadic squares with diam(Q) <= dist(Q, K), plus adjacency.

    Squares are stored column-wise in numpy arrays; ``squares`` builds
    :class:`DyadicSquare` objects on demand.  Squares at the deepest level
    that fail the left inequality are kept and flagged ``residual``.
    """

    def __init__(self, mask, deepest_level, levels, rows, cols, residual, dist, dfield):
        self.mask = mask
        self.deepest_level = int(deepest_level)
        self.levels = levels
        self.rows = rows
        self.cols = cols
        self.residual = residual
        self.dist_pix = dist  # dist(Q, K) in pixel units
        self.distance_field = dfield

    def __len__(self):
        return len(self.levels)

    @property
    def box(self):
        return self.mask.box

    @property
    def pixel(self):
        return self.mask.pixel

    @cached_property
    def side_pix(self):
        """Square sides in pixel units."""
        return (1 << (self.mask.level - self.levels)).astype(np.int64)

    @property
    def side(self):
        return self.side_pix * self.pixel

    @property
    def diam(self):
        return self.side * SQRT2

    @property
    def dist(self):
        return self.dist_pix * self.pixel

    @cached_property
    def centers_pix(self):
        """(m, 2) square centers as (col, row) pixel-unit coordinates."""
        k = self.side_pix
        return np.column_stack([(self.cols + 0.5) * k, (self.rows + 0.5) * k]).astype(float)

    @property
    def centers(self):
        x, y = self.box.from_pixel_units(self.centers_pix[:, 0], self.centers_pix[:, 1], self.mask.level)
        return np.column_stack([x, y])

    @cached_property
    def k_tree(self):
        r, c = np.nonzero(self.mask.bits)
        return cKDTree(np.column_stack([c + 0.5, r + 0.5]))

    @cached_property
    def center_d_pix(self):
        """d(z_j): distance from each center to K, pixel units."""
        d, _ = self.k_tree.query(self.centers_pix)
        return d

    @property
    def center_d(self):
        return self.center_d_pix * self.pixel

    @property
    def squares(self):
        return [DyadicSquare(int(l), int(i), int(j), self.box)
                for l, i, j in zip(self.levels, self.rows, self.cols)]

    @cached_property
    def labels(self):
        """Pixel -> square index image (-1 where no square)."""
        n = self.mask.n
        lab = np.full((n, n), -1, dtype=np.int64)
        for idx, (k, r, c) in enumerate(zip(self.side_pix, self.rows, self.cols)):
            lab[r * k:(r + 1) * k, c * k:(c + 1) * k] = idx
        return lab

    def _pairs(self, shifts):
        lab = self.labels
        out = []
        for a, b in shifts(lab):
            ok = (a >= 0) & (b >= 0) & (a != b)
            if ok.any():
                p = np.column_stack([a[ok], b[ok]])
                out.append(np.sort(p, axis=1))
        if not out:
            return np.zeros((0, 2), dtype=np.int64)
        return np.unique(np.vstack(out), axis=0)

    @cached_property
    def adjacency(self):
        """Unordered pairs of squares whose closed boundaries meet."""
        def shifts(lab):
            yield lab[:, :-1], lab[:, 1:]
            yield lab[:-1, :], lab[1:, :]
            yield lab[:-1, :-1], lab[1:, 1:]
            yield lab[:-1, 1:], lab[1:, :-1]
        return self._pairs(shifts)

    @cached_property
    def side_adjacency(self):
        """Pairs sharing a boundary segment of positive length."""
        def shifts(lab):
            yield lab[:, :-1], lab[:, 1:]
            yield lab[:-1, :], lab[1:, :]
        return self._pairs(shifts)

    def neighbors(self, pairs=None):
        """Adjacency lists (CSR ``indptr, indices``) for ``pairs``."""
        if pairs is None:
            pairs = self.side_adjacency
        return csr_from_pairs(pairs, len(self))

    @cached_property
    def touches_box(self):
        n = self.mask.n
        k = self.side_pix
        return ((self.rows == 0) | (self.cols == 0)
                | ((self.rows + 1) * k == n) | ((self.cols + 1) * k == n))

    def component_of(self, center):
        """Boolean mask of squares lying in the domain component of ``center``.

        ``center`` is a point (x, y) or the string ``"inf"``.
        """
        bits = self.mask.bits
        if is_infinity(center):
            comp = exterior_component(bits)
        else:
            r, c = self.box.pixel_of(center[0], center[1], self.mask.level)
            if bits[r, c]:
                raise GeometryError(f"center {center} lies on an occupied pixel")
            lab, _ = free_components(bits)
            comp = lab == lab[r, c]
        rep = comp[self.rows * self.side_pix, self.cols * self.side_pix]
        return rep

    def check_sandwich(self):
        """Indices of non-residual squares violating diam <= dist <= 4 diam."""
        diam = self.side_pix * SQRT2
        bad = ~self.residual & ((diam > self.dist_pix * (1 + 1e-12)) | (self.dist_pix > 4 * diam))
        return np.nonzero(bad)[0]


def csr_from_pairs(pairs, n):
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    src = np.concatenate([pairs[:, 0], pairs[:, 1]])
    dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    return np.cumsum(indptr), dst


def is_infinity(center):
    return isinstance(center, str) and center.lower() in ("inf", "infinity", "oo")


def _pool(a, fn):
    n = a.shape[0] // 2
    return fn(fn(a.reshape(n, 2, n, 2), axis=3), axis=1)


def whitney(mask, deepest_level=None, dfield=None):
    """Whitney decomposition of the complement of ``mask`` inside its box."""
    if not mask.bits.any():
        raise EmptyMaskError("Whitney decomposition of an empty mask")
    L = mask.level
    D = L if deepest_level is None else int(deepest_level)
    if not 0 <= D <= L:
        raise ParameterError(f"deepest_level must lie in [0, {L}]")
    if dfield is None:
        dfield = distance_transform(mask)

    dmin = [None] * (L + 1)
    occ = [None] * (L + 1)
    dmin[L] = dfield.pixels
    occ[L] = mask.bits
    for lv in range(L - 1, -1, -1):
        dmin[lv] = _pool(dmin[lv + 1], np.min)
        occ[lv] = _pool(occ[lv + 1], np.any)

    out_l, out_r, out_c, out_res, out_d = [], [], [], [], []
    active = np.ones((1, 1), dtype=bool)
    for lv in range(0, D + 1):
        k = 1 << (L - lv)
        adm = active & ~occ[lv] & (SQRT2 * k <= dmin[lv] * (1 + 1e-12))
        take = adm
        res = np.zeros_like(adm)
        if lv == D:
            res = active & ~adm & ~occ[lv]
            take = adm | res
        r, c = np.nonzero(take)
        out_l.append(np.full(len(r), lv))
        out_r.append(r)
        out_c.append(c)
        out_res.append(res[r, c])
        out_d.append(dmin[lv][r, c])
        if lv < D:
            nxt = active & ~adm
            active = np.repeat(np.repeat(nxt, 2, axis=0), 2, axis=1)

    return WhitneyDecomposition(
        mask, D,
        np.concatenate(out_l).astype(np.int64),
        np.concatenate(out_r).astype(np.int64),
        np.concatenate(out_c).astype(np.int64),
        np.concatenate(out_res).astype(bool),
        np.concatenate(out_d).astype(float),
        dfield,
    )


def brute_force_whitney_count(mask, deepest_level=None):
    """Count maximal admissible dyadic squares by direct enumeration (oracle).

    Every dyadic square at every level is tested with a brute-force
    distance; a square counts when it is admissible and its parent is not,
    or when it is a residual square at the deepest level.
    """
    L = mask.level
    D = L if deepest_level is None else deepest_level
    kr, kc = np.nonzero(mask.bits)
    kpts = np.column_stack([kc + 0.5, kr + 0.5])

    def dist_to_k(r0, c0, k):
        rr, cc = np.mgrid[r0:r0 + k, c0:c0 + k]
        pts = np.column_stack([cc.ravel() + 0.5, rr.ravel() + 0.5])
        best = np.inf
        for start in range(0, len(kpts), 4096):
            chunk = kpts[start:start + 4096]
            dd = np.hypot(pts[:, None, 0] - chunk[None, :, 0], pts[:, None, 1] - chunk[None, :, 1])
            best = min(best, dd.min())
        return best

    def contains_k(r0, c0, k):
        return mask.bits[r0:r0 + k, c0:c0 + k].any()

    def admissible(lv, i, j):
        k = 1 << (L - lv)
        if contains_k(i * k, j * k, k):
            return False
        return SQRT2 * k <= dist_to_k(i * k, j * k, k) * (1 + 1e-12)

    count = 0
    memo = {}

    def adm(lv, i, j):
        key = (lv, i, j)
        if key not in memo:
            memo[key] = admissible(lv, i, j)
        return memo[key]

    for lv in range(0, D + 1):
        m = 1 << lv
        k = 1 << (L - lv)
        for i in range(m):
            for j in range(m):
                ancestors_ok = all(not adm(lv - t, i >> t, j >> t) for t in range(1, lv + 1))
                if not ancestors_ok:
                    continue
                if adm(lv, i, j):
                    count += 1
                elif lv == D and not contains_k(i * k, j * k, k):
                    count += 1
    return count
