"""John-constant estimation on Whitney-center graphs.

For a boundary point z1 the best arc through Whitney centers is the one
maximizing min d(z)/|z - z1| over its vertices.  That max-min value is
found exactly: vertices are admitted in decreasing order of ratio until z1
and the center fall in one union-find class (the threshold at which the
filtered graph first connects them).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .exceptions import ConnectivityError, ParameterError
from .geometry import SQRT2, csr_from_pairs, is_infinity


@numba.njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@numba.njit(cache=True)
def _widest(indptr, indices, w, is_start, target):
    """Max over start->target paths of the minimum vertex weight, and a path.

    Returns (value, path) with path listing vertices from a start vertex to
    ``target``; value is -1 when target is unreachable.
    """
    n = w.shape[0]
    src = n
    parent = np.arange(n + 1)
    added = np.zeros(n, dtype=np.bool_)
    order = np.argsort(-w)
    value = -1.0
    for t in range(n):
        v = order[t]
        added[v] = True
        if is_start[v]:
            a = _find(parent, v)
            b = _find(parent, src)
            if a != b:
                parent[a] = b
        for q in range(indptr[v], indptr[v + 1]):
            u = indices[q]
            if added[u]:
                a = _find(parent, v)
                b = _find(parent, u)
                if a != b:
                    parent[a] = b
        if added[target] and _find(parent, src) == _find(parent, target):
            value = w[v]
            break
    if value < 0:
        return value, np.empty(0, dtype=np.int64)
    # shortest hop path inside the admitted subgraph, multi-source BFS
    prev = np.full(n, -2, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    for v in range(n):
        if is_start[v] and w[v] >= value:
            prev[v] = -1
            queue[tail] = v
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        if v == target:
            break
        for q in range(indptr[v], indptr[v + 1]):
            u = indices[q]
            if prev[u] == -2 and w[u] >= value:
                prev[u] = v
                queue[tail] = u
                tail += 1
    length = 0
    v = target
    while v >= 0:
        length += 1
        v = prev[v]
    path = np.empty(length, dtype=np.int64)
    v = target
    for i in range(length - 1, -1, -1):
        path[i] = v
        v = prev[v]
    return value, path


@dataclass
class JohnArcCertificate:
    """A John arc from boundary point z1 to the center, with its constant."""

    z1: tuple
    polyline: list  # plane points; a trailing "inf" marks the far field
    epsilon: float
    vertices: list = field(default_factory=list, repr=False)
    case: str | None = None

    def to_dict(self):
        out = {"z1": list(self.z1), "epsilon": self.epsilon,
               "polyline": [p if isinstance(p, str) else list(p) for p in self.polyline]}
        if self.case is not None:
            out["case"] = self.case
        return out


@dataclass
class JohnEstimate:
    epsilon_lower: float
    samples: list
    center: object

    @property
    def worst(self):
        return min(self.samples, key=lambda s: s.epsilon)

    def to_dict(self):
        center = "inf" if is_infinity(self.center) else list(self.center)
        return {"center": center, "epsilon_lower": self.epsilon_lower,
                "samples": [s.to_dict() for s in self.samples]}


class SquareGraph:
    """Vertex-weighted graph on square centers used by the arc search.

    ``pos`` and ``d`` are in pixel units.  When ``far_field`` is set the
    last vertex is virtual (the point at infinity) and joined to
    ``far_field``'s squares.
    """

    def __init__(self, pos, d, pairs, far_field=None):
        self.pos = np.asarray(pos, dtype=float)
        self.d = np.asarray(d, dtype=float)
        m = len(self.pos)
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        self.virtual = far_field is not None
        if self.virtual:
            ff = np.nonzero(far_field)[0]
            pairs = np.vstack([pairs, np.column_stack([ff, np.full(len(ff), m)])])
            m += 1
        self.n = m
        self.indptr, self.indices = csr_from_pairs(pairs, m)

    def weights(self, z1):
        m = len(self.pos)
        dist = np.hypot(self.pos[:, 0] - z1[0], self.pos[:, 1] - z1[1])
        w = np.empty(self.n)
        with np.errstate(divide="ignore"):
            w[:m] = np.where(dist > 0, self.d / dist, np.inf)
        if self.virtual:
            w[m:] = np.inf
        return w

    def search(self, z1, starts, target):
        is_start = np.zeros(self.n, dtype=np.bool_)
        is_start[np.asarray(starts, dtype=np.int64)] = True
        w = self.weights(z1)
        value, path = _widest(self.indptr, self.indices, w, is_start, int(target))
        return value, path, w


def _boundary_samples(bits, comp, n_samples, seed):
    """K pixels 4-adjacent to the domain component, sampled uniformly."""
    pad = np.pad(comp, 1, constant_values=False)
    nb = pad[:-2, 1:-1] | pad[2:, 1:-1] | pad[1:-1, :-2] | pad[1:-1, 2:]
    r, c = np.nonzero(bits & nb)
    if len(r) == 0:
        raise ConnectivityError("the domain component has no boundary pixels")
    idx = np.arange(len(r))
    if n_samples is not None and n_samples < len(r):
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(len(r), size=n_samples, replace=False))
    return r[idx], c[idx]


def _start_squares(labels, keep, r, c):
    n = labels.shape[0]
    out = []
    for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        rr, cc = r + dr, c + dc
        if 0 <= rr < n and 0 <= cc < n:
            s = labels[rr, cc]
            if s >= 0 and keep[s]:
                out.append(s)
    return out


def domain_graph(w, center):
    """SquareGraph of the component of ``center``; returns (graph, keep, target)."""
    keep = w.component_of(center)
    idx = np.nonzero(keep)[0]
    remap = np.full(len(w), -1, dtype=np.int64)
    remap[idx] = np.arange(len(idx))
    pairs = w.side_adjacency
    pairs = pairs[keep[pairs[:, 0]] & keep[pairs[:, 1]]]
    pairs = remap[pairs]
    if is_infinity(center):
        g = SquareGraph(w.centers_pix[idx], w.center_d_pix[idx], pairs, far_field=w.touches_box[idx])
        target = g.n - 1
    else:
        g = SquareGraph(w.centers_pix[idx], w.center_d_pix[idx], pairs)
        r, c = w.box.pixel_of(center[0], center[1], w.mask.level)
        target = remap[w.labels[r, c]]
        if target < 0:
            raise ConnectivityError(f"center {center} is not covered by a Whitney square")
    return g, keep, remap, int(target)


def run_arc_search(graph, target, labels, keep, remap, bits, comp, box, level,
                   n_samples, seed, case_of=None):
    rs, cs = _boundary_samples(bits, comp, n_samples, seed)
    certs = []
    for r, c in zip(rs, cs):
        z1 = (c + 0.5, r + 0.5)
        starts = [remap[s] for s in _start_squares(labels, keep, r, c)]
        starts = [s for s in starts if s >= 0]
        if not starts:
            continue
        value, path, wts = graph.search(z1, starts, target)
        if value < 0:
            raise ConnectivityError(
                f"boundary pixel (row {r}, col {c}) is not connected to the center "
                "in the Whitney graph at this resolution")
        real = [int(v) for v in path if v < len(graph.pos)]
        eps = float(min(wts[v] for v in real)) if real else float("inf")
        x1, y1 = box.from_pixel_units(z1[0], z1[1], level)
        poly = [(float(x1), float(y1))]
        for v in real:
            x, y = box.from_pixel_units(graph.pos[v, 0], graph.pos[v, 1], level)
            poly.append((float(x), float(y)))
        if graph.virtual and len(path) and path[-1] == graph.n - 1:
            poly.append("inf")
        cert = JohnArcCertificate((float(x1), float(y1)), poly, eps, real)
        if case_of is not None and real:
            cert.case = case_of(real[0])
        certs.append(cert)
    if not certs:
        raise ConnectivityError("no boundary sample touches a Whitney square of the domain")
    return certs


def estimate_john_constant(w, center="inf", n_samples=64, seed=0):
    """Lower estimate of the John constant of the component of ``center``.

    ``n_samples=None`` uses every boundary pixel.
    """
    if len(w) == 0:
        raise ParameterError("empty Whitney decomposition")
    if n_samples is not None and n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    graph, keep, remap, target = domain_graph(w, center)
    comp = np.zeros(w.mask.bits.shape, dtype=bool)
    lab = w.labels
    covered = lab >= 0
    comp[covered] = keep[lab[covered]]
    certs = run_arc_search(graph, target, lab, keep, remap, w.mask.bits, comp,
                           w.box, w.mask.level, n_samples, seed)
    eps = min(c.epsilon for c in certs)
    return JohnEstimate(float(eps), certs, center)


def certificate_epsilon(cert, mask):
    """Recompute min d(z)/|z - z1| along a certificate polyline (pixel units).

    Distances are recomputed from scratch against the occupied pixel
    centers; the far-field marker is skipped.
    """
    from scipy.spatial import cKDTree

    r, c = np.nonzero(mask.bits)
    tree = cKDTree(np.column_stack([c + 0.5, r + 0.5]))
    pts = np.array([p for p in cert.polyline[1:] if not isinstance(p, str)], dtype=float)
    if len(pts) == 0:
        return float("inf")
    u, v = mask.box.to_pixel_units(pts[:, 0], pts[:, 1], mask.level)
    z1u, z1v = mask.box.to_pixel_units(cert.z1[0], cert.z1[1], mask.level)
    d, _ = tree.query(np.column_stack([u, v]))
    return float(np.min(d / np.hypot(u - z1u, v - z1v)))


def pixel_diagonal_slack(cert, mask):
    """Ratio slack allowed for one pixel diagonal of error in d."""
    pts = np.array([p for p in cert.polyline[1:] if not isinstance(p, str)], dtype=float)
    if len(pts) == 0:
        return 0.0
    dist = np.hypot(pts[:, 0] - cert.z1[0], pts[:, 1] - cert.z1[1]).min()
    return SQRT2 * mask.pixel / dist
