"""File formats: canonical JSON documents, SVG, CSV and binary fields.

Every JSON document carries ``"schema": "johnforge/1"`` and a ``kind``.
Writes go to a temporary file in the target directory and are renamed into
place, so readers never see partial output.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import os
import tempfile

import numpy as np

from .exceptions import ParameterError
from .geometry import Box, CompactSetMask, whitney

SCHEMA = "johnforge/1"


# -- primitives ------------------------------------------------------------


def _plain(obj):
    """Convert numpy scalars/arrays and tuples into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return v
    return obj


def dumps(doc):
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(_plain(doc), sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def atomic_write(path, data):
    """Write ``data`` (str or bytes) to ``path`` via a temp file and rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def document(kind, config, payload):
    return {"schema": SCHEMA, "kind": kind, "config": config, **payload}


def write_json(path, doc):
    atomic_write(path, dumps(doc))


def read_json(path, kind=None):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema") != SCHEMA:
        raise ParameterError(f"{path}: not a {SCHEMA} document")
    if kind is not None and doc.get("kind") != kind:
        raise ParameterError(f"{path}: expected a {kind!r} document, found {doc.get('kind')!r}")
    return doc


# -- masks -----------------------------------------------------------------


def rle_encode(bits):
    """Row-major run lengths, starting with a run of False (possibly 0)."""
    flat = np.asarray(bits, dtype=bool).ravel()
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate([[0], change, [flat.size]])
    runs = np.diff(bounds).tolist()
    if flat.size and flat[0]:
        runs = [0] + runs
    return runs


def rle_decode(runs, shape):
    vals = np.zeros(len(runs), dtype=bool)
    vals[1::2] = True
    flat = np.repeat(vals, runs)
    if flat.size != shape[0] * shape[1]:
        raise ParameterError("run lengths do not match the mask shape")
    return flat.reshape(shape)


def mask_to_dict(mask):
    return {"box": mask.box.to_dict(), "level": mask.level, "shape": mask.shape_spec,
            "count": mask.count, "area": mask.area, "rle": rle_encode(mask.bits)}


def mask_from_dict(d):
    n = 1 << int(d["level"])
    bits = rle_decode(d["rle"], (n, n))
    return CompactSetMask(Box.from_dict(d["box"]), int(d["level"]), bits, d.get("shape", {}))


def load_mask(path):
    """Mask from a rasterize, whitney or simplify document."""
    doc = read_json(path)
    if "mask" not in doc:
        raise ParameterError(f"{path}: document has no mask")
    return mask_from_dict(doc["mask"]), doc


# -- Whitney ---------------------------------------------------------------


def whitney_to_dict(w):
    return {"mask": mask_to_dict(w.mask), "deepest_level": w.deepest_level,
            "n_squares": len(w),
            "squares": {"level": w.levels, "row": w.rows, "col": w.cols,
                        "residual": w.residual.astype(int)},
            "sandwich_violations": w.check_sandwich()}


def whitney_from_dict(d):
    """Rebuild a decomposition and check it reproduces the stored squares."""
    w = whitney(mask_from_dict(d["mask"]), d["deepest_level"])
    sq = d.get("squares")
    if sq is not None and not (np.array_equal(w.levels, sq["level"]) and np.array_equal(w.rows, sq["row"])
                               and np.array_equal(w.cols, sq["col"])):
        raise ParameterError("stored Whitney squares do not match the mask")
    return w


# -- simplified domains ----------------------------------------------------


def simplified_to_dict(s):
    g = s.graph
    return {"whitney": whitney_to_dict(s.base), "graph": g.to_dict(s.base),
            "slits": {"delta": s.slits.delta, "special": s.slits.special,
                      "special_center_pix": list(s.slits.special_center),
                      "arcs": {str(k): v for k, v in sorted(s.slits.runs.items()) if v},
                      "gates": {str(k): v for k, v in sorted(s.slits.gates.items())}},
            "slit_cells": int(s.slit_cells.sum())}


def simplified_from_dict(d):
    from .simplify import JohnGraph, SimplifiedDomain, SlitSet, rebuild_from_runs

    w = whitney_from_dict(d["whitney"])
    gd = d["graph"]
    m = len(w)
    parent = np.full(m, -2, dtype=np.int64)
    rho = np.full(m, -1, dtype=np.int64)
    layer = np.full(m, -1, dtype=np.int64)
    for v in gd["vertices"]:
        rho[v["index"]] = v["rho"]
        layer[v["index"]] = v["layer"]
        parent[v["index"]] = -1
    for a, b in gd["edges"]:
        parent[a] = b
    g = JohnGraph(gd["A"], gd["scale"] / w.pixel, gd["n_max"], gd["root"], parent, rho, layer,
                  np.array([], dtype=np.int64), list(gd.get("connectors", [])))
    sd = d["slits"]
    runs = {int(k): [tuple(r) for r in v] for k, v in sd["arcs"].items()}
    for v in g.vertices:
        runs.setdefault(int(v), [])
    gates = {int(k): [tuple(x) for x in v] for k, v in sd["gates"].items()}
    omega, omega_hat, comp = rebuild_from_runs(w, g, runs)
    slits = SlitSet(sd["delta"], sd["special"], tuple(sd["special_center_pix"]), runs, gates)
    return SimplifiedDomain(w, g, slits, omega, omega_hat, comp)


# -- SVG / CSV / binary fields --------------------------------------------


def _svg_header(box, size):
    x0, y0 = box.origin
    s = box.side
    return [f'<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
            f'viewBox="{x0:.9g} {-(y0 + s):.9g} {s:.9g} {s:.9g}">',
            f'<g transform="scale(1,-1)">']


def _fmt(v):
    return f"{float(v):.9g}"


def whitney_svg(w, size=800, graph=None, slits=None):
    """Squares grey, K black; optional tree edges blue, slits red, gates white."""
    box = w.box
    lines = _svg_header(box, size)
    p = w.pixel
    x0, y0 = box.origin
    side = w.side
    sw = _fmt(box.side / size * 0.5)
    lines.append(f'<g fill="#dddddd" stroke="#888888" stroke-width="{sw}">')
    for i in range(len(w)):
        x = x0 + w.cols[i] * side[i]
        y = y0 + w.rows[i] * side[i]
        lines.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(side[i])}" height="{_fmt(side[i])}"/>')
    lines.append("</g>")
    r, c = np.nonzero(w.mask.bits)
    lines.append('<g fill="#000000">')
    for rr, cc in zip(r, c):
        lines.append(f'<rect x="{_fmt(x0 + cc * p)}" y="{_fmt(y0 + rr * p)}" width="{_fmt(p)}" height="{_fmt(p)}"/>')
    lines.append("</g>")
    if graph is not None:
        ctr = w.centers
        lines.append(f'<g stroke="#1f4fd8" stroke-width="{_fmt(box.side / size)}">')
        for a, b in graph.edges.tolist():
            lines.append(f'<line x1="{_fmt(ctr[a, 0])}" y1="{_fmt(ctr[a, 1])}" '
                         f'x2="{_fmt(ctr[b, 0])}" y2="{_fmt(ctr[b, 1])}"/>')
        lines.append("</g>")
    if slits is not None:
        from .simplify import square_boundary

        lines.append(f'<g stroke-width="{_fmt(box.side / size)}">')
        for v, runs in sorted(slits.runs.items()):
            k = int(w.side_pix[v])
            R, C = square_boundary(int(w.rows[v]) * k + 1, int(w.cols[v]) * k + 1, k)
            n = len(R)
            slit = np.zeros(n, dtype=bool)
            for a, b in runs:
                slit[np.arange(a, a + ((b - a) % n) + 1) % n] = True
            # sides as polylines: red where slit, white where gated
            for j in range(0, n, 2):
                j2 = (j + 2) % n
                col = "#d62728" if slit[j] and slit[(j + 1) % n] and slit[j2] else "#ffffff"
                xa, ya = box.from_pixel_units(C[j] / 2 - 1, R[j] / 2 - 1, w.mask.level)
                xb, yb = box.from_pixel_units(C[j2] / 2 - 1, R[j2] / 2 - 1, w.mask.level)
                lines.append(f'<line stroke="{col}" x1="{_fmt(xa)}" y1="{_fmt(ya)}" x2="{_fmt(xb)}" y2="{_fmt(yb)}"/>')
        lines.append("</g>")
    lines.append("</g></svg>")
    return "\n".join(lines) + "\n"


def mask_svg(mask, size=800):
    p = mask.pixel
    x0, y0 = mask.box.origin
    lines = _svg_header(mask.box, size)
    lines.append('<g fill="#000000">')
    r, c = np.nonzero(mask.bits)
    for rr, cc in zip(r, c):
        lines.append(f'<rect x="{_fmt(x0 + cc * p)}" y="{_fmt(y0 + rr * p)}" width="{_fmt(p)}" height="{_fmt(p)}"/>')
    lines.append("</g></g></svg>")
    return "\n".join(lines) + "\n"


def heatmap_svg(values, box, level, region=None, size=800):
    """Grey-scale heat map of a nonnegative node field (pixel grid)."""
    v = np.asarray(values, dtype=float)
    if region is not None:
        v = np.where(region, v, np.nan)
    top = np.nanmax(v) if np.isfinite(v).any() else 1.0
    p = box.pixel_size(level)
    x0, y0 = box.origin
    lines = _svg_header(box, size)
    r, c = np.nonzero(np.isfinite(v) & (v > 0))
    for rr, cc in zip(r, c):
        g = int(255 - 255 * min(1.0, v[rr, cc] / top if top > 0 else 0))
        lines.append(f'<rect fill="rgb({g},{g},255)" x="{_fmt(x0 + cc * p)}" y="{_fmt(y0 + rr * p)}" '
                     f'width="{_fmt(p)}" height="{_fmt(p)}"/>')
    lines.append("</g></svg>")
    return "\n".join(lines) + "\n"


def gap_csv(report):
    buf = _io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["n", "delta", "verdict_gap"])
    for n, d, g in zip(report.n_list, report.deltas, report.verdict_gap):
        wr.writerow([n, repr(float(d)), repr(float(g))])
    return buf.getvalue()


def write_field(path, values, box, level, value_type="float64", extra=None):
    """Flat little-endian binary grid plus ``<path>.json`` sidecar."""
    arr = np.ascontiguousarray(values)
    if np.iscomplexobj(arr):
        arr = arr.astype("<c16")
        value_type = "complex128"
    else:
        arr = arr.astype("<f8")
    atomic_write(path, arr.tobytes())
    side = {"schema": SCHEMA, "kind": "field", "shape": list(arr.shape), "dtype": value_type,
            "byte_order": "little", "layout": "row-major, row index increases with y",
            "box": box.to_dict(), "level": int(level)}
    if extra:
        side.update(extra)
    write_json(os.fspath(path) + ".json", side)


def read_field(path):
    side = read_json(os.fspath(path) + ".json", "field")
    dt = "<c16" if side["dtype"] == "complex128" else "<f8"
    with open(path, "rb") as fh:
        arr = np.frombuffer(fh.read(), dtype=dt).reshape(side["shape"])
    return arr, side
