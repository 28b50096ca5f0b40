import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from johnforge.exceptions import EmptyMaskError, ParameterError
from johnforge.geometry import Box, CompactSetMask, rasterize
from johnforge.potential.capacity import (SQUARE_CAPACITY, _project_simplex, capacity_estimate,
                                          capacity_of_points, energy_of, equilibrium_measure,
                                          leja_order, log_kernel)


@pytest.mark.parametrize("spec,expected", [("disk:0.5", 0.5), ("segment:4", 1.0), ("circle:0.3", 0.3)])
def test_closed_forms_energy(spec, expected, mask_of):
    est = capacity_estimate(mask_of(spec, 8), "energy")
    assert est.value == pytest.approx(expected, rel=0.03)


def test_circle_point_set_fekete_matches_radius():
    # Fekete points of a circle are equally spaced; the product tends to r
    t = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    pts = 0.7 * np.column_stack([np.cos(t), np.sin(t)])
    est = capacity_of_points(pts, 1e-3, "fekete", n_points=400)
    n = 400
    assert est.value == pytest.approx(0.7 * n ** (1 / (n - 1)), rel=1e-3)


def test_monotone_under_inclusion(mask_of):
    small = capacity_estimate(mask_of("disk:0.3", 7)).value
    large = capacity_estimate(mask_of("disk:0.5", 7)).value
    assert small < large


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 5.0))
def test_scaling_covariance(s):
    rng = np.random.default_rng(1)
    pts = rng.random((60, 2))
    a = capacity_of_points(pts, 0.01, "energy", n_points=64).value
    b = capacity_of_points(s * pts, 0.01 * s, "energy", n_points=64).value
    assert b == pytest.approx(s * a, rel=1e-6)


def test_translation_invariance():
    rng = np.random.default_rng(2)
    pts = rng.random((80, 2))
    a = capacity_of_points(pts, 0.01, "fekete", n_points=80).value
    b = capacity_of_points(pts + [3.0, -7.0], 0.01, "fekete", n_points=80).value
    assert a == pytest.approx(b, rel=1e-12)


def test_equilibrium_never_worse_than_uniform():
    rng = np.random.default_rng(3)
    pts = rng.random((120, 2))
    mu, how, I_uniform = equilibrium_measure(pts, 0.01)
    assert mu.energy <= I_uniform + 1e-12
    assert mu.weights.min() >= 0 and mu.weights.sum() == pytest.approx(1.0)


def test_equilibrium_kkt_on_support():
    # the potential is constant on the support and no lower off it
    t = np.linspace(0, 1, 60)
    pts = np.column_stack([t, 0 * t])
    mu, _, _ = equilibrium_measure(pts, 1 / 60)
    M = log_kernel(pts, 1 / 60)
    pot = M @ mu.weights
    on = mu.weights > 1e-9
    assert np.ptp(pot[on]) < 1e-6
    assert pot[~on].min(initial=np.inf) >= pot[on].min() - 1e-6
    assert energy_of(M, mu.weights) == pytest.approx(mu.energy)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=20))
def test_simplex_projection(v):
    p = _project_simplex(np.array(v))
    assert p.min() >= 0 and p.sum() == pytest.approx(1.0)


def test_leja_is_seeded():
    rng = np.random.default_rng(0)
    pts = rng.random((100, 2))
    assert np.array_equal(leja_order(pts, 20, 5), leja_order(pts, 20, 5))
    assert len(set(leja_order(pts, 20, 5).tolist())) == 20


def test_single_pixel_is_degenerate():
    bits = np.zeros((8, 8), bool)
    bits[3, 4] = True
    m = CompactSetMask(Box(), 3, bits)
    est = capacity_estimate(m)
    assert est.degenerate and est.value == pytest.approx(SQUARE_CAPACITY * m.pixel)


def test_errors():
    m = CompactSetMask(Box(), 3, np.zeros((8, 8), bool))
    with pytest.raises(EmptyMaskError):
        capacity_estimate(m)
    with pytest.raises(ParameterError):
        capacity_of_points(np.zeros((3, 2)), 0.1, "energy", n_points=4)
    with pytest.raises(ParameterError):
        capacity_of_points(np.zeros((3, 2)), 0.1, "magic")


def test_holes_do_not_matter(mask_of):
    # capacity sees only the outer boundary, so the disk and the circle agree
    disk = capacity_estimate(mask_of("disk:0.4", 7), "fekete").value
    ring = capacity_estimate(mask_of("circle:0.4", 7), "fekete").value
    assert disk == pytest.approx(ring, rel=0.01)
