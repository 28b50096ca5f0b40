import numpy as np
import pytest

from johnforge.exceptions import GeometryError, ParameterError, WitnessInapplicableError
from johnforge.geometry import Box, rasterize
from johnforge.removability import (Collar, build_test_function, edge_energy, node_distance,
                                    nonremovability_witness, removability_report, smooth_in_collar,
                                    trace_values)


@pytest.fixture(scope="module")
def circle8(mask_of):
    return mask_of("circle:0.5", 8)


def test_test_function_matches_trace_on_k(circle8):
    f = build_test_function(circle8, "fourier", seed=3)
    k = np.pad(circle8.bits, 1)
    tr = trace_values(circle8, "fourier", seed=3)
    assert np.array_equal(f.values[k], tr[k])
    assert f.max_principle_ok()


def test_smoothing_is_local_and_minimal(circle8):
    f = build_test_function(circle8, "fourier", seed=1)
    collar = Collar.of(circle8, 0.1)
    fs = smooth_in_collar(f, collar)
    assert np.array_equal(fs.values[~collar.nodes], f.values[~collar.nodes])
    base = edge_energy(fs.values, region=collar.nodes)
    rng = np.random.default_rng(0)
    for _ in range(5):
        bump = np.where(collar.nodes, rng.normal(size=collar.nodes.shape) * 1e-3, 0)
        assert edge_energy(fs.values + bump, region=collar.nodes) >= base


def test_collar_touching_frame(mask_of):
    m = mask_of("disk:0.5", 7)
    f = build_test_function(m, "coordinate")
    with pytest.raises(GeometryError):
        smooth_in_collar(f, Collar.of(m, 0.9))
    with pytest.raises(ParameterError):
        Collar.of(m, 0.0)


def test_report_accounting_and_dirichlet(circle8):
    rep = removability_report(circle8, "fourier", n_list=(4, 8, 16), seed=0)
    assert max(rep.accounting_error) < 1e-10
    assert all(rep.dirichlet_ok)
    assert all(b <= a for a, b in zip(rep.verdict_gap, rep.verdict_gap[1:]))
    assert rep.deltas == [circle8.box.half_side / n for n in (4, 8, 16)]


def test_constant_trace_gives_zero_gap(circle8):
    rep = removability_report(circle8, {"kind": "constant", "value": 2.0}, n_list=(4, 8))
    assert rep.offK_energy == 0 and rep.verdict_gap == [0.0, 0.0]


def test_dilation_invariance(circle8):
    a = removability_report(circle8, "fourier", n_list=(4, 8), seed=2)
    b = removability_report(circle8.scaled(3.0), "fourier", n_list=(4, 8), seed=2)
    assert np.allclose(a.verdict_gap, b.verdict_gap, rtol=1e-8)
    assert a.offK_energy == pytest.approx(b.offK_energy, rel=1e-8)


def test_angular_trace_energy_closed_form():
    # cos(theta) on a circle of radius r in a large square box of half side R:
    # energy pi inside plus about pi (R^2 + r^2) / (R^2 - r^2) outside
    m = rasterize("circle:0.5", 9, Box((0, 0), 4.0))
    f = build_test_function(m, {"kind": "angular", "m": 1})
    off = edge_energy(f.values, exclude=np.pad(m.bits, 1))
    assert off / np.pi == pytest.approx(1 + 16.25 / 15.75, rel=0.02)


def test_node_distance_is_plane_units(circle8):
    d = node_distance(circle8)
    assert d.min() == 0
    assert d.max() == pytest.approx(np.hypot(1, 1) - 0.5, abs=3 * circle8.pixel)


def test_report_parameter_errors(circle8):
    with pytest.raises(ParameterError):
        removability_report(circle8, n_list=(8, 4))
    with pytest.raises(ParameterError):
        removability_report(circle8, n_list=(4, 128))
    with pytest.raises(ParameterError):
        trace_values(circle8, {"kind": "wavelet"})


def test_witness_identities(mask_of):
    rep = nonremovability_witness(mask_of("fat_cantor:0.1", 8))
    assert rep.valid
    assert all(d == rep.area for d in rep.dbar_energies)
    assert rep.sup_norms[-1] <= 0.5 * rep.sup_norms[0]


def test_witness_needs_area(circle8):
    with pytest.raises(WitnessInapplicableError):
        nonremovability_witness(circle8)
    with pytest.raises(ParameterError):
        nonremovability_witness(rasterize("disk:0.5", 7), n_list=(2, 4))
