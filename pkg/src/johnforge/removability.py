"""Grid-scale removability experiments.

A test function F equals a trace on the pixels of K and is discrete
harmonic on the rest of the box (frame nodes hold the trace mean).  For a
collar K_delta = {d <= delta}, F~ is the harmonic replacement of F inside
the collar.  Energies are sums of squared differences over grid edges of
the padded node grid; each energy names the edge set it sums over, so the
accounting identity

    E_all(F~) - E_offK(F) = E_collar(F~) - E_collar,offK(F)

holds term by term.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .exceptions import GeometryError, ParameterError, WitnessInapplicableError
from .potential.cauchy import ComplexField, cauchy_transform
from .potential.harmonic import HarmonicField, harmonic_solve

# Minimal absolute pixel area for the positive-area witness.
WITNESS_MIN_AREA = 0.05


@dataclass
class Collar:
    delta: float  # plane units
    nodes: np.ndarray  # padded node grid, True where d <= delta

    @classmethod
    def of(cls, mask, delta, dist=None):
        if not delta > 0:
            raise ParameterError("collar delta must be > 0")
        if dist is None:
            dist = node_distance(mask)
        return cls(float(delta), dist <= delta)


def node_distance(mask):
    """Distance (plane units) from each padded-grid node to the nearest K node."""
    k = np.pad(mask.bits, 1, constant_values=False)
    return ndimage.distance_transform_edt(~k) * mask.pixel


def _normalized_coords(mask):
    """Padded-grid node coordinates in box units ((x - c) / half_side)."""
    n = mask.n + 2
    t = (np.arange(n) - 0.5) * (2.0 / mask.n) - 1.0
    return np.meshgrid(t, t)


def trace_values(mask, trace, seed=0):
    """Trace on the padded node grid from a spec dict or name.

    ``{"kind": "constant", "value": c}``, ``{"kind": "coordinate"}`` (Re z in
    box units) or ``{"kind": "fourier", "modes": m}``: a seeded sum of plane
    waves with amplitudes decaying like 1/k^2.
    """
    if isinstance(trace, str):
        trace = {"kind": trace}
    kind = trace.get("kind")
    U, V = _normalized_coords(mask)
    if kind == "constant":
        return np.full(U.shape, float(trace.get("value", 1.0)))
    if kind == "coordinate":
        return U.copy()
    if kind == "fourier":
        modes = int(trace.get("modes", 8))
        if modes < 1:
            raise ParameterError("fourier trace needs modes >= 1")
        rng = np.random.default_rng(seed)
        out = np.zeros(U.shape)
        for k in range(1, modes + 1):
            ang = rng.uniform(0, 2 * np.pi)
            ph = rng.uniform(0, 2 * np.pi)
            amp = rng.normal() / k ** 2
            out += amp * np.cos(np.pi * k * (np.cos(ang) * U + np.sin(ang) * V) / 2 + ph)
        return out
    if kind == "angular":
        # cos(m theta) about the box center; the closed-form case for circles
        m = int(trace.get("m", 1))
        return np.cos(m * np.arctan2(V, U))
    raise ParameterError(f"unknown trace kind {kind!r}")


def build_test_function(mask, trace="fourier", seed=0):
    """F on the padded node grid: trace on K, harmonic off K, mean on the frame."""
    tr = trace_values(mask, trace, seed)
    k = np.pad(mask.bits, 1, constant_values=False)
    frame = np.ones_like(k)
    frame[1:-1, 1:-1] = False
    bv = np.full(k.shape, np.nan)
    bv[k] = tr[k]
    mean = float(tr[k].mean())
    bv[frame] = mean
    f = harmonic_solve(~k & ~frame, bv, mask.pixel)
    f.meta.update({"trace": trace if isinstance(trace, dict) else {"kind": trace},
                   "seed": int(seed), "frame_value": mean})
    return f


def _edge_sel(region_a, region_b, rule):
    if rule == "any":
        return region_a | region_b
    if rule == "both":
        return region_a & region_b
    if rule == "not_both":
        return ~(region_a & region_b)
    raise ParameterError(rule)


def edge_energy(values, rule="all", region=None, exclude=None):
    """Sum of squared differences over edges selected by node masks.

    ``region`` keeps edges with an endpoint in it; ``exclude`` drops edges
    with both endpoints in it.
    """
    total = 0.0
    H, W = values.shape
    for a_sl, b_sl in (((slice(0, H - 1), slice(None)), (slice(1, H), slice(None))),
                       ((slice(None), slice(0, W - 1)), (slice(None), slice(1, W)))):
        diff = values[b_sl] - values[a_sl]
        sel = np.ones(diff.shape, dtype=bool)
        if region is not None:
            sel &= region[a_sl] | region[b_sl]
        if exclude is not None:
            sel &= ~(exclude[a_sl] & exclude[b_sl])
        total += float(np.sum(np.abs(diff[sel]) ** 2))
    return total


def smooth_in_collar(f, collar):
    """Harmonic replacement of ``f`` on the collar's nodes (F~ = F elsewhere)."""
    c = collar.nodes
    if c[0].any() or c[-1].any() or c[:, 0].any() or c[:, -1].any():
        raise GeometryError("collar touches the box boundary")
    bv = np.where(c, np.nan, f.values)
    g = harmonic_solve(c, bv, f.pixel)
    values = np.where(c, g.values, f.values)  # bit-identical outside the collar
    return HarmonicField(values, c, ~c, f.pixel, g.residual, {"delta": collar.delta})


@dataclass
class RemovabilityReport:
    n_list: list
    deltas: list
    collar_energy_smooth: list
    collar_energy_original: list
    collar_energy_original_offk: list
    offK_energy: float
    global_energy_smooth: list
    verdict_gap: list
    measured_C: list
    accounting_error: list
    dirichlet_ok: list
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {k: getattr(self, k) for k in (
            "n_list", "deltas", "collar_energy_smooth", "collar_energy_original",
            "collar_energy_original_offk", "offK_energy", "global_energy_smooth",
            "verdict_gap", "measured_C", "accounting_error", "dirichlet_ok", "meta")}


def dirichlet_check(f_smooth, collar, n_trials=5, seed=0):
    """F~ has minimal collar energy against random perturbations inside the collar."""
    rng = np.random.default_rng(seed)
    base = edge_energy(f_smooth.values, region=collar.nodes)
    scale = max(float(np.nanstd(f_smooth.values)), 1e-12) * 1e-2
    for _ in range(n_trials):
        pert = f_smooth.values + np.where(collar.nodes, rng.normal(size=collar.nodes.shape) * scale, 0)
        if edge_energy(pert, region=collar.nodes) < base * (1 - 1e-12):
            return False
    return True


def removability_report(mask, trace="fourier", n_list=(4, 8, 16, 32), seed=0, wide_factor=4.0):
    """Collar smoothing at delta_n = half_side / n; see the module docstring."""
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ParameterError("n_list must be strictly increasing")
    h = mask.box.half_side
    if h / n_list[-1] < 4 * mask.pixel:
        raise ParameterError("finest collar is narrower than 4 pixels; raise the level or lower n")
    f = build_test_function(mask, trace, seed)
    k = np.pad(mask.bits, 1, constant_values=False)
    dist = node_distance(mask)
    off = edge_energy(f.values, exclude=k)
    rep = RemovabilityReport(n_list, [], [], [], [], off, [], [], [], [], [],
                             {"trace": f.meta["trace"], "seed": int(seed),
                              "delta_rule": "half_side / n", "wide_factor": wide_factor,
                              "frame_value": f.meta["frame_value"]})
    for n in n_list:
        delta = h / n
        collar = Collar.of(mask, delta, dist)
        fs = smooth_in_collar(f, collar)
        e_glob = edge_energy(fs.values)
        e_cs = edge_energy(fs.values, region=collar.nodes)
        e_c_off = edge_energy(f.values, region=collar.nodes, exclude=k)
        wide = dist <= wide_factor * delta
        e_wide = edge_energy(f.values, region=wide, exclude=k)
        rep.deltas.append(delta)
        rep.collar_energy_smooth.append(e_cs)
        rep.collar_energy_original.append(e_wide)
        rep.collar_energy_original_offk.append(e_c_off)
        rep.global_energy_smooth.append(e_glob)
        rep.verdict_gap.append(abs(e_glob - off) / off if off > 0 else 0.0)
        rep.measured_C.append(e_cs / e_wide if e_wide > 0 else 0.0)
        lhs, rhs = e_glob - off, e_cs - e_c_off
        rep.accounting_error.append(abs(lhs - rhs) / max(e_glob, 1e-300))
        rep.dirichlet_ok.append(dirichlet_check(fs, collar, seed=seed + n))
    return rep


@dataclass
class WitnessReport:
    n_list: list
    sup_norms: list
    offK_gradient_energies: list
    dbar_energies: list
    area: float
    valid: bool

    def to_dict(self):
        return dict(self.__dict__)


def nonremovability_witness(mask, n_list=(4, 8, 16, 32)):
    """F_n = (1/pi z) * (e^{i n (x+y)} chi_K) and its energies."""
    area = mask.area
    if area < WITNESS_MIN_AREA:
        raise WitnessInapplicableError(
            f"pixel area {area:.4g} is below {WITNESS_MIN_AREA}; the witness needs positive area")
    n_list = [int(n) for n in n_list]
    if any(n < 4 or n > 64 for n in n_list):
        raise ParameterError("witness frequencies must lie in [4, 64]")
    X, Y = mask.box.pixel_centers(mask.level)
    k = mask.bits
    p2 = mask.pixel ** 2
    sups, offs, dbars = [], [], []
    for n in n_list:
        g = np.where(k, np.exp(1j * n * (X + Y)), 0)
        F = cauchy_transform(ComplexField(g, mask.box, mask.level))
        sups.append(F.sup_norm())
        offs.append(edge_energy(F.values, exclude=k))
        dbars.append(float(np.sum(np.abs(g) ** 2) * p2))
    dec = lambda a: all(b < a_ for a_, b in zip(a, a[1:]))
    valid = dec(sups) and dec(offs) and np.allclose(dbars, area, rtol=1e-12, atol=0)
    return WitnessReport(n_list, sups, offs, dbars, float(area), bool(valid))
