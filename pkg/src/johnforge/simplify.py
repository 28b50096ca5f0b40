"""Graph surgery making a John domain simply connected.

The unbounded complementary component of the mask is covered by Whitney
squares.  A breadth-first spanning tree on layer families of those squares
is grown from an extreme root; every tree square then gets a wall on its
boundary, pierced by gates where tree edges cross it.  Walls, gates and
the resulting open set live on a cell complex at mask resolution: cell
``(R, C)`` of a ``(2M+1) x (2M+1)`` grid is a pixel when both indices are
odd, an edge when exactly one is, and a vertex when both are even.  The
pixel grid is padded by one pixel of far field on every side.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from .exceptions import ConstructionError, ParameterError
from .geometry import SQRT2, csr_from_pairs, exterior_component
from .john import SquareGraph, run_arc_search, estimate_john_constant


# -- graph construction ---------------------------------------------------


@dataclass
class LayerFamily:
    """Whitney centers with scale * A^-n <= d(z_j) <= A * scale."""

    A: float
    n: int
    members: np.ndarray  # square indices

    @classmethod
    def of(cls, d, keep, A, scale, n):
        lo = scale * A ** (-n)
        sel = keep & (d >= lo) & (d <= A * scale)
        return cls(A, n, np.nonzero(sel)[0])


@dataclass
class JohnGraph:
    """Directed spanning tree on Whitney centers (one outgoing edge each)."""

    A: float
    scale: float  # pixel units; d is normalized by this length
    n_max: int
    root: int
    parent: np.ndarray  # per square; -1 at the root, -2 off the graph
    rho: np.ndarray  # tree depth; -1 off the graph
    layer_of: np.ndarray  # first n with the square in V_n; -1 off the graph
    v0_extra: np.ndarray  # squares added to V_0 beyond F_0
    connectors: list = field(default_factory=list)

    @property
    def in_graph(self):
        return self.layer_of >= 0

    @property
    def vertices(self):
        return np.nonzero(self.in_graph)[0]

    @property
    def edges(self):
        """Directed (child, parent) pairs."""
        v = np.nonzero(self.parent >= 0)[0]
        return np.column_stack([v, self.parent[v]])

    def degree(self):
        deg = np.zeros(len(self.parent), dtype=np.int64)
        e = self.edges
        np.add.at(deg, e[:, 0], 1)
        np.add.at(deg, e[:, 1], 1)
        return deg

    def to_dict(self, w):
        v = self.vertices
        centers = w.centers
        return {
            "A": self.A, "scale": self.scale * w.pixel, "n_max": self.n_max,
            "root": int(self.root),
            "vertices": [{"index": int(i), "center": centers[i].tolist(),
                          "layer": int(self.layer_of[i]), "rho": int(self.rho[i])} for i in v],
            "edges": self.edges.tolist(),
            "connectors": [int(c) for c in self.connectors],
        }


def _bfs_grow(indptr, indices, seeds, allowed, parent, rho):
    """Multi-source BFS from ``seeds`` through ``allowed`` squares.

    Newly reached squares get their discovering neighbor as parent.
    """
    q = deque(seeds)
    added = []
    while q:
        v = q.popleft()
        for u in indices[indptr[v]:indptr[v + 1]]:
            if allowed[u] and parent[u] == -2:
                parent[u] = v
                rho[u] = rho[v] + 1
                added.append(u)
                q.append(u)
    return added


def _enclosed_by(w, members):
    """Squares whose pixels are not in the unbounded component of C minus
    the union of the ``members`` squares."""
    n = w.mask.n
    union = np.zeros((n, n), dtype=bool)
    k = w.side_pix
    for i in members:
        r, c, s = w.rows[i], w.cols[i], k[i]
        union[r * s:(r + 1) * s, c * s:(c + 1) * s] = True
    outside = exterior_component(union)
    return ~outside[w.rows * k, w.cols * k] & ~_member_mask(len(w), members)


def _member_mask(m, members):
    out = np.zeros(m, dtype=bool)
    out[np.asarray(members, dtype=np.int64)] = True
    return out


def build_graph(w, A=8.0, n_max=None, scale=None):
    """Grow the layered spanning tree G = lim G_n on the unbounded component.

    ``scale`` (plane units) is the unit of the layer families; by default it
    is max d / (2A), so the far corners of the box (d > A * scale) stay
    outside the graph.  ``n_max`` defaults to the first layer whose lower
    threshold reaches the smallest Whitney center distance.
    """
    if A < 2:
        raise ParameterError("layer constant A must be >= 2")
    keep = w.component_of("inf")
    if not keep.any():
        raise ConstructionError("the unbounded component has no Whitney squares", layer=0)
    d = w.center_d_pix
    dk = d[keep]
    scale_pix = dk.max() / (2 * A) if scale is None else scale / w.pixel
    if n_max is None:
        n_max = 0
        while scale_pix * A ** (-n_max) > dk.min():
            n_max += 1
    m = len(w)
    indptr, indices = csr_from_pairs(w.side_adjacency, m)

    fam0 = LayerFamily.of(d, keep, A, scale_pix, 0)
    if len(fam0.members) == 0:
        raise ConstructionError("layer family F_0 is empty; decrease scale", layer=0)
    v0 = _member_mask(m, fam0.members)
    big = keep & (d >= scale_pix)
    enclosed = _enclosed_by(w, fam0.members) & big & keep
    v0 |= enclosed
    v0_extra = np.nonzero(enclosed)[0]

    parent = np.full(m, -2, dtype=np.int64)
    rho = np.full(m, -1, dtype=np.int64)
    layer_of = np.full(m, -1, dtype=np.int64)
    cand = np.nonzero(v0)[0]
    cx, cy = w.centers_pix[cand, 0], w.centers_pix[cand, 1]
    root = int(cand[np.lexsort((cy, cx))[0]])
    parent[root] = -1
    rho[root] = 0
    layer_of[root] = 0
    connectors = []

    def attach(required, allowed, layer):
        tree = np.nonzero(parent != -2)[0]
        seeds = tree[np.lexsort((tree, rho[tree]))]
        for u in _bfs_grow(indptr, indices, seeds, allowed, parent, rho):
            layer_of[u] = layer
        missing = required & (parent == -2)
        if missing.any():
            # route through any squares of the component; extra vertices are connectors
            trial_parent = parent.copy()
            trial_rho = rho.copy()
            tree = np.nonzero(parent != -2)[0]
            seeds = tree[np.lexsort((tree, rho[tree]))]
            _bfs_grow(indptr, indices, seeds, keep, trial_parent, trial_rho)
            for u in np.nonzero(missing)[0]:
                if trial_parent[u] == -2:
                    raise ConstructionError(
                        f"square {u} of layer family F_{layer} is not connected to the "
                        f"graph through the Whitney adjacency", layer=layer)
                chain = []
                v = u
                while parent[v] == -2:
                    chain.append(v)
                    v = trial_parent[v]
                for v in reversed(chain):
                    parent[v] = trial_parent[v]
                    rho[v] = rho[parent[v]] + 1
                    layer_of[v] = layer
                    if not required[v]:
                        connectors.append(int(v))
            for u in _bfs_grow(indptr, indices, np.nonzero(parent != -2)[0], allowed, parent, rho):
                layer_of[u] = layer

    attach(v0, v0, 0)
    for n in range(1, n_max + 1):
        fam = LayerFamily.of(d, keep, A, scale_pix, n)
        req = _member_mask(m, fam.members)
        attach(req, req | (layer_of >= 0), n)

    return JohnGraph(float(A), float(scale_pix), int(n_max), root, parent, rho,
                     layer_of, v0_extra, connectors)


def certify_graph(w, g):
    """Check the tree and layer conditions; returns a dict of results."""
    m = len(w)
    keep = w.component_of("inf")
    d = w.center_d_pix
    verts = g.vertices
    in_g = g.in_graph
    e = g.edges
    out = {}

    # connectivity and acyclicity via rho recomputed from the undirected tree
    indptr, indices = csr_from_pairs(e, m)
    bfs = np.full(m, -1, dtype=np.int64)
    bfs[g.root] = 0
    q = deque([g.root])
    while q:
        v = q.popleft()
        for u in indices[indptr[v]:indptr[v + 1]]:
            if bfs[u] < 0:
                bfs[u] = bfs[v] + 1
                q.append(u)
    out["connected"] = bool(np.all(bfs[verts] >= 0))
    out["tree"] = bool(len(e) == len(verts) - 1 and out["connected"])
    outdeg = np.zeros(m, dtype=np.int64)
    np.add.at(outdeg, e[:, 0], 1)
    nonroot = verts[verts != g.root]
    out["unique_outgoing"] = bool(np.all(outdeg[nonroot] == 1) and outdeg[g.root] == 0)
    out["rho_step"] = bool(np.all(bfs[e[:, 0]] == bfs[e[:, 1]] + 1)
                           and np.array_equal(bfs[verts], g.rho[verts]))
    # topological order exists iff parent pointers never cycle
    out["acyclic"] = bool(np.all(g.rho[e[:, 0]] > g.rho[e[:, 1]]))
    side = {tuple(p) for p in w.side_adjacency.tolist()}
    out["edges_adjacent"] = all((min(a, b), max(a, b)) in side for a, b in e.tolist())

    nest, fam_in, prox = True, True, 0
    edge_form_violations = 0
    v0 = g.layer_of == 0
    fam = [LayerFamily.of(d, keep, g.A, g.scale, n) for n in range(g.n_max + 2)]
    for n in range(g.n_max + 1):
        vn = in_g & (g.layer_of <= n)
        if n < g.n_max:
            nest &= bool(np.all(~vn | (g.layer_of <= n + 1)))
        fam_in &= bool(np.all(vn[fam[n].members]))
        # graph distance in G_n to the nearest member of F_n
        sub = vn[e[:, 0]] & vn[e[:, 1]]
        ip, ix = csr_from_pairs(e[sub], m)
        dist = np.full(m, -1, dtype=np.int64)
        src = fam[n].members
        dist[src] = 0
        q = deque(src.tolist())
        while q:
            v = q.popleft()
            for u in ix[ip[v]:ip[v + 1]]:
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    q.append(u)
        reach = dist[vn]
        prox = max(prox, int(reach.max()) if np.all(reach >= 0) else 10 ** 9)
        allowed = _member_mask(m, fam[n + 1].members) | v0
        edge_form_violations += int(np.sum(sub & ~(allowed[e[:, 0]] & allowed[e[:, 1]])))
    out["nesting"] = nest
    out["families_contained"] = fam_in
    out["proximity_C"] = prox
    out["proximity_ok"] = bool(prox <= 16 * g.A)
    out["edge_form_violations"] = edge_form_violations
    lo, hi = g.scale, g.A ** 2 * g.scale
    out["v0_within_bounds"] = bool(np.all((d[v0] >= lo) & (d[v0] <= hi)))
    big_out = keep & (d >= g.scale) & ~v0
    enclosed = _enclosed_by(w, fam[0].members)
    out["unbounded_condition"] = bool(not np.any(big_out & enclosed))
    out["root_extreme"] = root_is_extreme(w.centers_pix[v0], w.centers_pix[g.root])
    out["connectors"] = len(g.connectors)
    out["max_degree"] = int(g.degree()[verts].max()) if len(verts) else 0
    required = ("connected", "tree", "unique_outgoing", "rho_step", "acyclic",
                "edges_adjacent", "nesting", "families_contained", "proximity_ok",
                "root_extreme")
    out["ok"] = all(out[k] for k in required)
    return out


def root_is_extreme(points, root):
    """True when ``root`` is a vertex of the convex hull of ``points``."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    root = np.asarray(root, dtype=float)
    if len(pts) <= 2:
        return bool(np.any(np.all(pts == root, axis=1)))
    try:
        hull = ConvexHull(pts)
    except QhullError:
        # collinear: extreme means an endpoint of the lexicographic order
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        return bool(np.all(pts[order[0]] == root) or np.all(pts[order[-1]] == root))
    return bool(np.any(np.all(pts[hull.vertices] == root, axis=1)))


# -- cell complex ----------------------------------------------------------


def omega_cells(comp):
    """Cell-grid indicator of the open set given by free pixels ``comp``.

    ``comp`` is the unpadded pixel indicator of the domain; the one-pixel
    padding frame and everything outside the grid belong to the domain.
    """
    P = np.pad(comp, 1, constant_values=True)
    M = P.shape[0]
    Q = np.pad(P, 1, constant_values=True)  # out-of-range = far field
    cells = np.zeros((2 * M + 1, 2 * M + 1), dtype=bool)
    cells[1::2, 1::2] = P
    cells[0::2, 1::2] = Q[:-1, 1:-1] & Q[1:, 1:-1]  # horizontal edges
    cells[1::2, 0::2] = Q[1:-1, :-1] & Q[1:-1, 1:]  # vertical edges
    cells[0::2, 0::2] = Q[:-1, :-1] & Q[:-1, 1:] & Q[1:, :-1] & Q[1:, 1:]
    return cells


def square_boundary(r0, c0, k):
    """Counter-clockwise boundary cells of the padded-pixel square.

    Returns (R, C) index arrays of length 8k starting at the lower-left
    vertex.
    """
    R0, C0, R1, C1 = 2 * r0, 2 * c0, 2 * (r0 + k), 2 * (c0 + k)
    t = np.arange(2 * k)
    R = np.concatenate([np.full(2 * k, R0), R0 + t, np.full(2 * k, R1), R1 - t])
    C = np.concatenate([C0 + t, np.full(2 * k, C1), C1 - t, np.full(2 * k, C0)])
    return R, C


def _cell_segments(R, C):
    """Cells as segments in padded pixel units (points for vertices)."""
    x, y = C / 2.0, R / 2.0
    hx = np.where(C % 2 == 1, 0.5, 0.0)
    hy = np.where(R % 2 == 1, 0.5, 0.0)
    return x - hx, y - hy, x + hx, y + hy


def _point_seg(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    den = dx * dx + dy * dy
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / np.where(den > 0, den, 1.0), 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def seg_seg_distance(a0x, a0y, a1x, a1y, b0, b1):
    """Distance between segments a (arrays) and the single segment b0-b1."""
    b0x, b0y = b0
    b1x, b1y = b1

    def orient(px, py, qx, qy, rx, ry):
        return (qx - px) * (ry - py) - (qy - py) * (rx - px)

    o1 = orient(b0x, b0y, b1x, b1y, a0x, a0y)
    o2 = orient(b0x, b0y, b1x, b1y, a1x, a1y)
    o3 = orient(a0x, a0y, a1x, a1y, b0x, b0y)
    o4 = orient(a0x, a0y, a1x, a1y, b1x, b1y)
    cross = (o1 * o2 < 0) & (o3 * o4 < 0)
    d = np.minimum.reduce([
        _point_seg(a0x, a0y, b0x, b0y, b1x, b1y),
        _point_seg(a1x, a1y, b0x, b0y, b1x, b1y),
        _point_seg(b0x, b0y, a0x, a0y, a1x, a1y),
        _point_seg(b1x, b1y, a0x, a0y, a1x, a1y),
    ])
    return np.where(cross, 0.0, d)


@dataclass
class SlitSet:
    """Per-square walls: runs of slit cells along each boundary cycle."""

    delta: float
    special: int  # index of Q_l, or -1 for the far field beyond the box
    special_center: tuple  # padded pixel units
    runs: dict  # square -> list of (start, stop) index runs, stop inclusive
    gates: dict  # square -> list of (neighbor, n_cells)
    overlapping_gates: int = 0


@dataclass
class SimplifiedDomain:
    base: object
    graph: JohnGraph
    slits: SlitSet
    omega: np.ndarray  # cell grid of the original domain
    omega_hat: np.ndarray  # cell grid after surgery
    comp: np.ndarray  # pixel indicator of the domain

    @property
    def slit_cells(self):
        return self.omega & ~self.omega_hat

    def cell_to_plane(self, R, C):
        """Plane coordinates of cell (R, C)."""
        w = self.base
        u, v = np.asarray(C) / 2.0 - 1.0, np.asarray(R) / 2.0 - 1.0
        return w.box.from_pixel_units(u, v, w.mask.level)


def delta_bound(w, g):
    """Largest admissible gate parameter, 1 / (2 (1 + k)).

    k is the largest number of tree edges crossing one side of a square;
    gates on different sides cannot meet when delta < 1/4.
    """
    return 1.0 / (2.0 * (1 + _side_incidence(w, g, _incident(w, g))))


def _side_of(cpx, cpy, k, px, py):
    """Which side of a square (center cp, side k) a crossing point lies on."""
    dx, dy = px - cpx, py - cpy
    if abs(dx) >= abs(dy):
        return 1 if dx > 0 else 3
    return 2 if dy > 0 else 0


def _incident(w, g):
    """Tree neighbors per graph square."""
    nbrs = {int(v): [] for v in g.vertices}
    for a, b in g.edges.tolist():
        nbrs[a].append(b)
        nbrs[b].append(a)
    return nbrs


def _special_square(w, g, keep):
    """Q_l: a side neighbor of the root outside the graph (or the far field)."""
    root = g.root
    cand = []
    for a, b in w.side_adjacency.tolist():
        if a == root or b == root:
            o = b if a == root else a
            if keep[o] and not g.in_graph[o]:
                cand.append(o)
    k = w.side_pix[root]
    cp = w.centers_pix[root] + 1.0
    if cand:
        ell = min(cand)
        return ell, tuple(w.centers_pix[ell] + 1.0)
    if w.touches_box[root]:
        n = w.mask.n
        r, c = w.rows[root], w.cols[root]
        if c == 0:
            return -1, (cp[0] - k, cp[1])
        if r == 0:
            return -1, (cp[0], cp[1] - k)
        if (c + 1) * k == n:
            return -1, (cp[0] + k, cp[1])
        return -1, (cp[0], cp[1] + k)
    raise ConstructionError("no admissible special square: every neighbor of the root is in the graph")


def _side_incidence(w, g, nbrs):
    worst = 1
    for v, ns in nbrs.items():
        k = w.side_pix[v]
        cp = w.centers_pix[v]
        counts = [0, 0, 0, 0]
        for u in ns:
            cu = w.centers_pix[u]
            counts[_side_of(cp[0], cp[1], k, cu[0], cu[1])] += 1
        worst = max(worst, max(counts))
    return worst


def cut_slits(w, g, delta=0.1):
    """Wall every graph square, open gates at tree edges; returns the domain."""
    if not delta > 0:
        raise ParameterError("delta must be > 0")
    nbrs = _incident(w, g)
    k = _side_incidence(w, g, nbrs)
    bound = 1.0 / (2.0 * (1 + k))
    if not delta < bound:
        raise ParameterError(
            f"delta={delta} violates the gate disjointness bound delta < {bound:.6g} "
            f"= 1/(2(1+{k})), k = max tree edges through one side of a square")
    keep = w.component_of("inf")
    comp = np.zeros(w.mask.bits.shape, dtype=bool)
    lab = w.labels
    cov = lab >= 0
    comp[cov] = keep[lab[cov]]
    comp |= exterior_component(w.mask.bits) & ~cov
    omega = omega_cells(comp)
    removed = np.zeros_like(omega)

    special, special_center = _special_square(w, g, keep)
    runs, gates = {}, {}
    overlaps = 0
    for v, ns in nbrs.items():
        k = int(w.side_pix[v])
        r0, c0 = int(w.rows[v]) * k + 1, int(w.cols[v]) * k + 1
        R, C = square_boundary(r0, c0, k)
        ax, ay, bx, by = _cell_segments(R, C)
        cp = tuple(w.centers_pix[v] + 1.0)
        thr = delta * SQRT2 * k
        gated = np.zeros(len(R), dtype=bool)
        targets = [(u, tuple(w.centers_pix[u] + 1.0)) for u in ns]
        if v == g.root:
            targets.append((special, special_center))
        info = []
        for u, cu in targets:
            hit = seg_seg_distance(ax, ay, bx, by, cp, cu) < thr
            overlaps += int(np.any(hit & gated))
            gated |= hit
            info.append((int(u), int(hit.sum())))
        slit = ~gated
        removed[R[slit], C[slit]] = True
        runs[v] = _runs(slit)
        gates[v] = info
    omega_hat = omega & ~removed
    slits = SlitSet(float(delta), int(special), tuple(map(float, special_center)), runs, gates, overlaps)
    return SimplifiedDomain(w, g, slits, omega, omega_hat, comp)


def _runs(flags):
    """Maximal runs of True in a cyclic boolean sequence, as (start, stop)."""
    n = len(flags)
    if flags.all():
        return [(0, n - 1)]
    if not flags.any():
        return []
    shift = int(np.argmin(flags))  # start scanning at a gap
    out = []
    i = 0
    while i < n:
        j = (shift + i) % n
        if flags[j]:
            s = i
            while i < n and flags[(shift + i) % n]:
                i += 1
            out.append(((shift + s) % n, (shift + i - 1) % n))
        else:
            i += 1
    return out


def rebuild_from_runs(w, g, runs, comp=None):
    """Recreate the surgery cell grid from serialized slit runs."""
    if comp is None:
        keep = w.component_of("inf")
        comp = np.zeros(w.mask.bits.shape, dtype=bool)
        lab = w.labels
        cov = lab >= 0
        comp[cov] = keep[lab[cov]]
        comp |= exterior_component(w.mask.bits) & ~cov
    omega = omega_cells(comp)
    removed = np.zeros_like(omega)
    for v, rs in runs.items():
        k = int(w.side_pix[v])
        r0, c0 = int(w.rows[v]) * k + 1, int(w.cols[v]) * k + 1
        R, C = square_boundary(r0, c0, k)
        n = len(R)
        for s, e in rs:
            idx = np.arange(s, s + ((e - s) % n) + 1) % n
            removed[R[idx], C[idx]] = True
    return omega, omega & ~removed, comp


# -- verification ----------------------------------------------------------


def _closure(cells):
    """Cells lying in the closure of the open cell set ``cells``."""
    out = cells.copy()
    pad = np.pad(cells, 1, constant_values=False)
    H, W = cells.shape
    RR, CC = np.mgrid[0:H, 0:W]
    odd_r, odd_c = RR % 2 == 1, CC % 2 == 1
    # faces of pixels: their 4 edges and 4 vertices
    pix = pad & np.pad(odd_r & odd_c, 1, constant_values=False)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            out |= pix[1 + dr:1 + dr + H, 1 + dc:1 + dc + W]
    # faces of edges: their two endpoints
    edge = pad & np.pad(odd_r ^ odd_c, 1, constant_values=False)
    for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        out |= edge[1 + dr:1 + dr + H, 1 + dc:1 + dc + W] & ~odd_r & ~odd_c
    return out


def _witness(s, labels, good_label):
    bad = np.argwhere((labels > 0) & (labels != good_label))
    if len(bad) == 0:
        return None
    R, C = bad[0]
    x, y = s.cell_to_plane(R, C)
    return {"cell": [int(R), int(C)], "point": [float(x), float(y)]}


def simplified_graph(s):
    """SquareGraph of the surgically modified domain and its bookkeeping."""
    w, g = s.base, s.graph
    keep = w.component_of("inf")
    idx = np.nonzero(keep)[0]
    remap = np.full(len(w), -1, dtype=np.int64)
    remap[idx] = np.arange(len(idx))
    in_g = g.in_graph
    pairs = [g.edges]
    sa = w.side_adjacency
    both_out = keep[sa[:, 0]] & keep[sa[:, 1]] & ~in_g[sa[:, 0]] & ~in_g[sa[:, 1]]
    pairs.append(sa[both_out])
    if s.slits.special >= 0:
        pairs.append(np.array([[g.root, s.slits.special]]))
    pairs = remap[np.vstack(pairs)]
    far = w.touches_box[idx] & ~in_g[idx]
    if s.slits.special < 0:
        far = far | (idx == g.root)
    # clearance: distance to K or to the nearest slit cell, pixel units
    slit = s.slit_cells
    d_slit = ndimage.distance_transform_edt(~slit, sampling=0.5)
    cp = w.centers_pix[idx] + 1.0
    Rc = np.rint(2 * cp[:, 1]).astype(int)
    Cc = np.rint(2 * cp[:, 0]).astype(int)
    d_hat = np.minimum(w.center_d_pix[idx], d_slit[Rc, Cc]) if slit.any() else w.center_d_pix[idx]
    graph = SquareGraph(w.centers_pix[idx], d_hat, pairs, far_field=far)
    return graph, keep, remap, idx


def verify_simplified(s, john_samples=32, seed=0):
    """Connectivity, simple connectivity, boundary containment and John check.

    Returns a report dict; ``ok`` is true when (a)-(c) hold.
    """
    report = {}
    lab, n = ndimage.label(s.omega_hat)
    sizes = np.bincount(lab.ravel())[1:] if n else np.array([])
    main = int(np.argmax(sizes)) + 1 if n else 0
    report["connected"] = {"ok": n == 1, "components": int(n),
                           "witness": _witness(s, lab, main) if n > 1 else None}
    clab, cn = ndimage.label(~s.omega_hat)
    csizes = np.bincount(clab.ravel())[1:] if cn else np.array([])
    cmain = int(np.argmax(csizes)) + 1 if cn else 0
    report["simply_connected"] = {"ok": cn <= 1, "complement_components": int(cn),
                                  "witness": _witness(s, clab, cmain) if cn > 1 else None}
    boundary = _closure(s.omega) & ~s.omega
    closure_hat = _closure(s.omega_hat)
    missing = boundary & ~closure_hat
    wit = None
    if missing.any():
        R, C = np.argwhere(missing)[0]
        x, y = s.cell_to_plane(R, C)
        wit = {"cell": [int(R), int(C)], "point": [float(x), float(y)]}
    report["boundary_contained"] = {"ok": not missing.any(), "boundary_cells": int(boundary.sum()),
                                    "missing": int(missing.sum()), "witness": wit}
    report["differs_only_on_slits"] = bool(np.all(s.omega_hat <= s.omega))
    report["slit_clearance"] = slit_clearance(s)
    report["graph"] = certify_graph(s.base, s.graph)
    report["john"] = john_pair(s, john_samples, seed)
    report["overlapping_gates"] = s.slits.overlapping_gates
    report["ok"] = bool(report["connected"]["ok"] and report["simply_connected"]["ok"]
                        and report["boundary_contained"]["ok"])
    return report


def slit_clearance(s):
    """min over slit cells of dist(cell, K) / d(z_j), non-residual squares only."""
    w = s.base
    k_pix = np.pad(w.mask.bits, 1, constant_values=False)
    cells = np.ones(s.omega.shape, dtype=bool)
    cells[1::2, 1::2] = ~k_pix
    dk = ndimage.distance_transform_edt(cells, sampling=0.5)
    worst = math.inf
    for v, rs in s.slits.runs.items():
        if w.residual[v] or not rs:
            continue
        k = int(w.side_pix[v])
        R, C = square_boundary(int(w.rows[v]) * k + 1, int(w.cols[v]) * k + 1, k)
        n = len(R)
        idx = np.concatenate([np.arange(a, a + ((b - a) % n) + 1) % n for a, b in rs])
        val = dk[R[idx], C[idx]].min() / w.center_d_pix[v]
        worst = min(worst, float(val))
    return {"min_ratio": worst, "ok": bool(worst >= 0.25)}


def john_pair(s, n_samples=32, seed=0):
    """(eps(Omega), eps(Omega_hat)) on the same boundary samples."""
    w, g = s.base, s.graph
    base = estimate_john_constant(w, "inf", n_samples=n_samples, seed=seed)
    graph, keep, remap, idx = simplified_graph(s)
    lab = w.labels
    comp = np.zeros(w.mask.bits.shape, dtype=bool)
    cov = lab >= 0
    comp[cov] = keep[lab[cov]]
    in_g = g.in_graph

    def case_of(v):
        return "case2" if in_g[idx[v]] else "case1"

    certs = run_arc_search(graph, graph.n - 1, lab, keep, remap, w.mask.bits, comp,
                           w.box, w.mask.level, n_samples, seed, case_of=case_of)
    hat = min(c.epsilon for c in certs)
    return {"epsilon_omega": base.epsilon_lower, "epsilon_omega_hat": float(hat),
            "cases": {k: sum(c.case == k for c in certs) for k in ("case1", "case2")},
            "samples": [c.to_dict() for c in certs]}
