"""Variation fields, tensor components, curvature K, and the chain bound."""

import math

import numpy as np
import pytest

from wpcollar import (
    CouplingProfile,
    SolverError,
    build_fields,
    lemma7_bound,
    make_cylinder,
    metric_density,
    plane_quantities,
    schwarz_check,
    tensor_component,
    wp_inner,
)
from wpcollar.curvature import _inner_parts


def test_profile_validation():
    p = CouplingProfile()
    assert p.c1 == 1.0 and p.exponent == 4 and p.cap is None
    with pytest.raises(ValueError):
        CouplingProfile(c1=-1.0)
    with pytest.raises(ValueError):
        CouplingProfile(exponent=3)
    with pytest.raises(ValueError):
        CouplingProfile(cap=0.0)


def test_fields_shape_and_symmetry():
    fields = build_fields(0.1, n=513)
    d = fields.grid.domain
    assert np.all(fields.phi(0, 0) == 1.0)
    z = fields.phi(1, 0)
    assert z[0] == pytest.approx(d.a**-4.0, rel=1e-14)
    np.testing.assert_array_equal(z, z[::-1])  # exact index mirror
    # swap symmetry: direction 1 on cylinder 1 is direction 0 on cylinder 0
    np.testing.assert_array_equal(fields.phi(1, 1), fields.phi(0, 0))
    np.testing.assert_array_equal(fields.phi(0, 1), fields.phi(1, 0))
    with pytest.raises(ValueError):
        fields.phi(2, 0)


def test_profile_cap_clips():
    capped = build_fields(0.1, CouplingProfile(cap=0.5), n=257)
    assert float(np.max(capped.phi(1, 0))) == 0.5


def test_mu_squared_definition():
    fields = build_fields(0.2, n=257)
    sigma = metric_density(fields.grid.domain, fields.grid.nodes)
    np.testing.assert_allclose(fields.mu_squared(0, 0), sigma**-2.0, rtol=1e-14)
    # at the boundary circle sigma = 1 so |mu1|^2(a) = a^-8 at c1 = 1
    a = fields.grid.domain.a
    assert fields.mu_squared(1, 0)[0] == pytest.approx(a**-8.0, rel=1e-12)


@pytest.mark.parametrize("l", [0.1, 0.05])
def test_own_inner_product_closed_form(l):
    # int_a^b sin^2(lx)/l^2 dx = pi/(2 l^3) - asin(l)/l^3 + sqrt(1-l^2)/l^2
    fields = build_fields(l, n=4096)
    exact = (
        0.5 * math.pi / l**3 - math.asin(l) / l**3 + math.sqrt(1.0 - l * l) / l**2
    )
    own = _inner_parts(fields, 0, 0)[0]
    assert own == pytest.approx(exact, rel=1e-10)
    # the coupled remainder on the far cylinder is O(1)
    total = wp_inner(fields, 0, 0)
    assert 0.0 < total - own < 1.0
    assert total / (0.5 * math.pi / l**3) == pytest.approx(1.0, abs=5 * l)


def test_coupled_inner_product_stays_bounded():
    vals = []
    for l in (0.2, 0.1, 0.05, 0.025):
        fields = build_fields(l, n=2048)
        vals.append(_inner_parts(fields, 1, 1)[0])
    assert all(0.0 < v < 0.5 for v in vals)
    # converging toward the noded value, so increments shrink
    assert abs(vals[3] - vals[2]) < abs(vals[1] - vals[0])


def test_inner_product_symmetry_and_cauchy_schwarz():
    fields = build_fields(0.1, n=1024)
    i00 = wp_inner(fields, 0, 0)
    i11 = wp_inner(fields, 1, 1)
    i01 = wp_inner(fields, 0, 1)
    assert i01 == wp_inner(fields, 1, 0)
    assert i01 > 0.0
    assert i01 * i01 < i00 * i11
    with pytest.raises(ValueError):
        wp_inner(fields, 0, 0, l=0.2)


def test_tensor_component_symmetries():
    fields = build_fields(0.1, n=1024)
    rep = plane_quantities(fields)
    assert rep.tensor_0101 == rep.tensor_1010  # identical op sequence under swap
    assert rep.tensor_0110 == pytest.approx(rep.tensor_1001, rel=1e-12)
    assert rep.tensor_0101 == tensor_component(0, 1, 0, 1, fields)
    assert rep.r == pytest.approx(
        rep.tensor_0101 - rep.tensor_0110 - rep.tensor_1001 + rep.tensor_1010, rel=1e-12
    )


@pytest.mark.parametrize("l", [0.3, 0.1])
def test_report_invariants(l):
    rep = plane_quantities(build_fields(l, n=1024))
    assert rep.pi > 0.0
    assert rep.r < 0.0 and rep.k < 0.0  # the plane curves negatively
    assert abs(rep.r) <= rep.lemma7_bound
    assert rep.k == rep.r / rep.pi
    assert rep.inner00 == rep.inner11  # congruent cylinders
    assert rep.grid_size == 1024 and rep.bc_mode == "mixed"


@pytest.mark.parametrize("l", [0.3, 0.1])
def test_schwarz_pointwise(l):
    fields = build_fields(l, n=1024)
    assert schwarz_check(fields) <= 1e-8


def test_bound_function_matches_report():
    fields = build_fields(0.1, n=1024)
    assert lemma7_bound(fields) == plane_quantities(fields).lemma7_bound


def test_zero_coupling_decouples_exactly():
    fields = build_fields(0.1, CouplingProfile(c1=0.0), n=1024)
    rep = plane_quantities(fields)
    assert rep.r == 0.0 and rep.k == 0.0 and rep.lemma7_bound == 0.0
    assert rep.inner01 == 0.0
    assert schwarz_check(fields) == 0.0


def test_bound_scales_quadratically_in_c1():
    base = lemma7_bound(build_fields(0.1, CouplingProfile(c1=1.0), n=1024))
    double = lemma7_bound(build_fields(0.1, CouplingProfile(c1=2.0), n=1024))
    assert double == pytest.approx(4.0 * base, rel=1e-12)


def test_compact_offset_shifts_diagonal_only():
    fields = build_fields(0.1, n=1024)
    plain = plane_quantities(fields)
    shifted = plane_quantities(fields, compact_offset=1.0)
    assert shifted.inner00 == plain.inner00 + 1.0
    assert shifted.inner11 == plain.inner11 + 1.0
    assert shifted.inner01 == plain.inner01
    assert shifted.r == plain.r
    assert abs(shifted.k) < abs(plain.k)
    with pytest.raises(ValueError):
        plane_quantities(fields, compact_offset=-0.5)


def test_dirichlet_mode_report():
    fields = build_fields(0.1, n=1024)
    rep = plane_quantities(fields, bc_mode="dirichlet")
    assert rep.bc_mode == "dirichlet"
    assert rep.pi > 0.0 and abs(rep.r) <= rep.lemma7_bound
    with pytest.raises(ValueError):
        plane_quantities(fields, bc_mode="neumann")


def test_grid_refinement_stability():
    coarse = plane_quantities(build_fields(0.1, n=2048)).k
    fine = plane_quantities(build_fields(0.1, n=4096)).k
    assert fine == pytest.approx(coarse, rel=1e-2)


def test_field_validation():
    from wpcollar import RadialFunction, make_grid

    grid = make_grid(make_cylinder(0.1), 256)
    other = make_grid(make_cylinder(0.1), 256)
    ones = RadialFunction(grid=grid, values=np.ones(grid.n))
    from wpcollar.curvature import VariationField

    with pytest.raises(ValueError):
        VariationField(
            on_m0=ones,
            on_m1=RadialFunction(grid=other, values=np.ones(other.n)),
            profile=CouplingProfile(),
        )
    with pytest.raises(ValueError):
        VariationField(
            on_m0=ones,
            on_m1=RadialFunction(grid=grid, values=-np.ones(grid.n)),
            profile=CouplingProfile(),
        )


def test_report_guard_catches_inconsistent_numbers():
    import dataclasses

    rep = plane_quantities(build_fields(0.1, n=512))
    with pytest.raises(SolverError):
        dataclasses.replace(rep, pi=-1.0)
    with pytest.raises(SolverError):
        dataclasses.replace(rep, r=2.0 * rep.lemma7_bound + 1.0)
