"""Collar domain, metric density, and the radial quadrature grid."""

import math

import numpy as np
import pytest

from wpcollar import (
    CylinderDomain,
    RadialFunction,
    integrate,
    make_cylinder,
    make_grid,
    metric_density,
)


def test_domain_closed_form():
    d = make_cylinder(0.1)
    assert d.a == pytest.approx(math.asin(0.1) / 0.1, rel=1e-15)
    assert d.b == pytest.approx(math.pi / 0.1 - d.a, rel=1e-15)
    assert d.a == pytest.approx(1.001674, abs=1e-6)
    assert d.b == pytest.approx(30.414252, abs=1e-6)
    assert d.waist == pytest.approx(0.5 * (d.a + d.b), rel=1e-15)
    assert d.circumference == 1.0


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5, float("nan"), float("inf")])
def test_domain_rejects_bad_length(bad):
    with pytest.raises(ValueError):
        make_cylinder(bad)


def test_metric_density_boundary_and_waist():
    d = make_cylinder(0.1)
    assert metric_density(d, d.a) == pytest.approx(1.0, rel=1e-12)
    assert metric_density(d, d.b) == pytest.approx(1.0, rel=1e-12)
    assert metric_density(d, d.waist) == pytest.approx(0.01, rel=1e-14)
    with pytest.raises(ValueError):
        metric_density(d, d.a - 0.1)
    with pytest.raises(ValueError):
        metric_density(d, d.b + 0.1)


@pytest.mark.parametrize("l", [0.5, 0.2, 0.1, 0.05])
@pytest.mark.parametrize("grading", ["uniform", "graded"])
def test_collar_area_closed_form(l, grading):
    # int sigma dx dy = 2 sqrt(1 - l^2); the integrand spans 1 down to l^2
    d = make_cylinder(l)
    grid = make_grid(d, 4096, grading)
    ones = RadialFunction(grid=grid, values=np.ones(grid.n))
    assert integrate(ones, d) == pytest.approx(2.0 * math.sqrt(1.0 - l * l), rel=1e-10)


@pytest.mark.parametrize("l", [0.5, 0.2, 0.1, 0.05])
def test_inverse_density_quadrature(l):
    # f = l^-2 sin^2(lx) against sigma integrates to exactly b - a
    d = make_cylinder(l)
    grid = make_grid(d, 4096)
    f = RadialFunction.from_callable(grid, lambda x: np.sin(l * x) ** 2 / l**2)
    assert integrate(f, d) == pytest.approx(d.b - d.a, rel=1e-10)


@pytest.mark.parametrize("n", [17, 64, 257, 2048])
@pytest.mark.parametrize("grading", ["uniform", "graded"])
def test_grid_structure(n, grading):
    d = make_cylinder(0.1)
    grid = make_grid(d, n, grading)
    x = grid.nodes
    assert x[0] == d.a and x[-1] == d.b
    assert np.all(np.diff(x) > 0)
    assert np.all(grid.weights > 0)
    assert grid.weights.sum() == pytest.approx(d.b - d.a, rel=1e-13)
    # the top half is the exact arithmetic mirror of the bottom half
    half = n // 2
    np.testing.assert_array_equal(x[n - half :], (d.a + d.b) - x[:half][::-1])
    if n % 2:
        assert x[half] == 0.5 * (d.a + d.b)


def test_grid_rejects_bad_inputs():
    d = make_cylinder(0.1)
    with pytest.raises(ValueError):
        make_grid(d, 8)
    with pytest.raises(ValueError):
        make_grid(d, 256, "chebyshev")


def test_graded_density_near_boundary():
    grid = make_grid(make_cylinder(0.1), 2048, "graded")
    x = grid.nodes
    end_spacing = x[1] - x[0]
    mid_spacing = x[grid.n // 2 + 1] - x[grid.n // 2]
    assert mid_spacing / end_spacing >= 4.0


def test_quadrature_quintic_exactness():
    d = make_cylinder(0.2)
    grid = make_grid(d, 128, "graded")
    vals = grid.nodes**5
    exact = (d.b**6 - d.a**6) / 6.0
    assert grid.integrate_values(vals) == pytest.approx(exact, rel=1e-13)


def test_quadrature_convergence_order():
    # order-6 panels: halving h should shrink the error far faster than 4th order
    d = make_cylinder(0.3)
    exact = (math.cos(d.a) - math.cos(d.b))
    errs = []
    for n in (65, 129):
        grid = make_grid(d, n, "uniform")
        errs.append(abs(grid.integrate_values(np.sin(grid.nodes)) - exact))
    assert errs[0] / errs[1] > 20.0


def test_cumulative_matches_antiderivative():
    d = make_cylinder(0.2)
    grid = make_grid(d, 1024)
    vals = np.cos(grid.nodes)
    exact = np.sin(grid.nodes) - math.sin(d.a)
    np.testing.assert_allclose(grid.cumulative(vals), exact, rtol=0, atol=1e-12)
    exact_rev = math.sin(d.b) - np.sin(grid.nodes)
    np.testing.assert_allclose(grid.cumulative_reverse(vals), exact_rev, rtol=0, atol=1e-12)


def test_cumulative_to_interior_points():
    d = make_cylinder(0.2)
    grid = make_grid(d, 512)
    vals = np.cos(grid.nodes)
    # partial panels interpolate at one order below the full rule
    for x in (d.a + 0.3, d.waist, 0.25 * d.a + 0.75 * d.b):
        assert grid.cumulative_to(vals, x) == pytest.approx(
            math.sin(x) - math.sin(d.a), abs=1e-9
        )
    with pytest.raises(ValueError):
        grid.interval_index(d.b + 1.0)


def test_radial_function_validation():
    grid = make_grid(make_cylinder(0.2), 64)
    with pytest.raises(ValueError):
        RadialFunction(grid=grid, values=np.ones(10))
    f = RadialFunction.from_callable(grid, np.cos)
    assert f.values.shape == grid.nodes.shape
    with pytest.raises(ValueError):
        f.values[0] = 2.0  # samples are frozen


def test_integrate_rejects_foreign_domain():
    grid = make_grid(make_cylinder(0.2), 64)
    f = RadialFunction(grid=grid, values=np.ones(grid.n))
    with pytest.raises(ValueError):
        integrate(f, make_cylinder(0.3))


def test_domain_is_plain_data():
    d = CylinderDomain(l=0.5, a=1.0, b=2.0)
    assert d.waist == pytest.approx(math.pi, rel=1e-15)
