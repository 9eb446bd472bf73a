"""Sectional curvature of the pinching plane over a two-cylinder model.

The degenerating surface is modelled by two congruent collars M0 and M1,
each pinching along its own short geodesic of length l.  The two pinching
directions are represented by variation fields mu0, mu1: direction alpha
has unit Hopf variation on its own cylinder (|phi_alpha| = 1 there) and
leaks into the opposite cylinder through a decay profile

    zeta(x) = c1 * min(x, pi/l - x)^-4,

positive, symmetric about the waist, and O(1) at the boundary circles.
Beltrami representatives are mu = phibar/sigma, so |mu|^2 = |phi|^2 /
sigma^2 and every pairing reduces to radial quadrature.

Curvature of the plane spanned by (mu0, mu1) is assembled from tensor
components of the form

    R_{ab~cd~} = int D(mu_a mu_b) mu_c mu_d dA + int D(mu_a mu_d) mu_c mu_b dA,

with D = -2(Delta - 2)^{-1} inverted per cylinder by the collar operator
module.  The numerator R combines four components, the denominator is
Pi = 4<00><11> - 4<01>^2, and K = R/Pi.  The chain bound

    |R| <= 4 int D(|mu0|^2) |mu1|^2 dA

is evaluated alongside and asserted on every report; with the
geometric-mean boundary data used for the cross solves it holds by
construction, since D keeps a positive kernel and the pointwise Schwarz
inequality |D(mu0 mu1)| <= sqrt(D(|mu0|^2) D(|mu1|^2)) survives
discretization (that too is checked, see schwarz_check).

Boundary setups follow the two model problems: on each cylinder the
square of its own unit direction solves with Dirichlet data at the
boundary circle and zero slope at the waist, while coupled squares and
cross products solve with Dirichlet data at both circles, scaled by the
coupling amplitude so that c1 -> 0 decouples the plane exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bvp import DD, DN, BoundaryCondition, apply_D
from .errors import SolverError
from .geometry import (
    RadialFunction,
    RadialGrid,
    make_cylinder,
    make_grid,
    metric_density,
)

__all__ = [
    "BC_MODES",
    "CouplingProfile",
    "VariationField",
    "CurvatureReport",
    "build_fields",
    "wp_inner",
    "tensor_component",
    "plane_quantities",
    "lemma7_bound",
    "schwarz_check",
]

# "mixed": own-square solves are Dirichlet(a) + Neumann(waist), the rest
# Dirichlet both ends; "dirichlet": everything Dirichlet both ends.
BC_MODES = ("mixed", "dirichlet")

ZETA_EXPONENT = 4


@dataclass(frozen=True)
class CouplingProfile:
    """Decay profile zeta = c1 * (distance to the nearer end in x)^-4.

    The exponent is part of the model and fixed; cap, if given, clips
    zeta from above (a blunt stand-in for profiles that saturate instead
    of blowing up toward the boundary circles).
    """

    c1: float = 1.0
    exponent: int = ZETA_EXPONENT
    cap: float | None = None

    def __post_init__(self):
        c1 = float(self.c1)
        if not (math.isfinite(c1) and c1 >= 0.0):
            raise ValueError(f"coupling amplitude must be finite and >= 0, got {self.c1!r}")
        object.__setattr__(self, "c1", c1)
        if self.exponent != ZETA_EXPONENT:
            raise ValueError(f"decay exponent is fixed at {ZETA_EXPONENT} in this model")
        if self.cap is not None:
            cap = float(self.cap)
            if not (math.isfinite(cap) and cap > 0.0):
                raise ValueError(f"cap must be positive, got {self.cap!r}")
            object.__setattr__(self, "cap", cap)


def _zeta_values(grid: RadialGrid, profile: CouplingProfile) -> np.ndarray:
    x = grid.nodes
    n = x.size
    half = (n + 1) // 2
    z = np.empty(n)
    z[:half] = profile.c1 * x[:half] ** float(-profile.exponent)
    # mirror by index so the samples are exactly reflection-symmetric,
    # matching the node layout; the DN solves and the cylinder-swap
    # identities below rely on this being exact
    z[n - half :] = z[:half][::-1]
    if profile.cap is not None:
        np.minimum(z, profile.cap, out=z)
    return z


@dataclass(frozen=True)
class VariationField:
    """The pinching pair (mu0, mu1) over the congruent cylinder pair.

    on_m0 and on_m1 sample |phi0| over cylinder 0 and cylinder 1.  The
    second direction is the mirror image under swapping the cylinders
    (exact for the model profile), so one pair of samples carries both
    directions; phi(alpha, cyl) resolves the swap.
    """

    on_m0: RadialFunction
    on_m1: RadialFunction
    profile: CouplingProfile

    def __post_init__(self):
        if self.on_m0.grid is not self.on_m1.grid:
            raise ValueError("both cylinder samples must share one grid")
        for f in (self.on_m0, self.on_m1):
            if np.any(f.values < 0.0):
                raise ValueError("|phi| samples must be nonnegative")

    @property
    def grid(self) -> RadialGrid:
        return self.on_m0.grid

    def phi(self, direction: int, cylinder: int) -> np.ndarray:
        """|phi_direction| sampled on the given cylinder."""
        _check_indices(direction, cylinder)
        return (self.on_m0 if direction == cylinder else self.on_m1).values

    def mu_squared(self, direction: int, cylinder: int) -> np.ndarray:
        """|mu_direction|^2 = |phi|^2 / sigma^2 on the given cylinder."""
        sigma = metric_density(self.grid.domain, self.grid.nodes)
        return (self.phi(direction, cylinder) / sigma) ** 2


def build_fields(
    l: float,
    profile: CouplingProfile | None = None,
    n: int = 2048,
    grading: str = "graded",
) -> VariationField:
    """Sample the pinching pair for core length l on a fresh grid."""
    if profile is None:
        profile = CouplingProfile()
    domain = make_cylinder(l)
    grid = make_grid(domain, n, grading)
    unit = RadialFunction(grid=grid, values=np.ones(grid.n))
    zeta = RadialFunction(grid=grid, values=_zeta_values(grid, profile))
    return VariationField(on_m0=unit, on_m1=zeta, profile=profile)


def _check_indices(*idx: int):
    for i in idx:
        if i not in (0, 1):
            raise ValueError(f"direction/cylinder indices must be 0 or 1, got {i!r}")


def _resolve_l(fields: VariationField, l: float | None) -> float:
    have = fields.grid.domain.l
    if l is not None and float(l) != have:
        raise ValueError(f"fields were built for l = {have}, got l = {l}")
    return have


def wp_inner(fields: VariationField, alpha: int, beta: int, l: float | None = None) -> float:
    """<mu_alpha, mu_beta>: sum over both cylinders of int mu mu sigma dx."""
    _check_indices(alpha, beta)
    _resolve_l(fields, l)
    return math.fsum(_inner_parts(fields, alpha, beta))


def _inner_parts(fields: VariationField, alpha: int, beta: int) -> tuple[float, float]:
    grid = fields.grid
    sigma = metric_density(grid.domain, grid.nodes)
    scale = grid.domain.circumference
    return tuple(
        grid.integrate_values(fields.phi(alpha, cyl) * fields.phi(beta, cyl) / sigma) * scale
        for cyl in (0, 1)
    )


class _PlaneSolves:
    """Cache of D(mu_i mu_j) per cylinder for one boundary setup.

    Cylinder 1 is cylinder 0 with the two directions swapped, and the
    swap is exact at the sample level, so solves are keyed by the
    cylinder-0-normalized index pair: three distinct solves cover all
    four components, the bound, and the Schwarz check.
    """

    def __init__(self, fields: VariationField, bc_mode: str, a1: float, b1: float, b2: float):
        if bc_mode not in BC_MODES:
            raise ValueError(f"unknown bc mode {bc_mode!r}, expected one of {BC_MODES}")
        for name, v in (("a1", a1), ("b1", b1), ("b2", b2)):
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"boundary value {name} must be finite and >= 0, got {v!r}")
        self.fields = fields
        self.grid = fields.grid
        self.domain = self.grid.domain
        self.sigma = metric_density(self.domain, self.grid.nodes)
        self._inv_sigma2 = self.sigma**-2.0
        c1 = fields.profile.c1
        own = BoundaryCondition(DN, (a1,)) if bc_mode == "mixed" else BoundaryCondition(DD, (a1, a1))
        # coupled data scales with the source (c1^2 for the square, c1 for
        # the cross product, with per-end geometric means); this keeps the
        # positive-kernel Schwarz chain intact and decouples c1 = 0 exactly
        self._bc = {
            (0, 0): own,
            (1, 1): BoundaryCondition(DD, (b1 * c1**2, b2 * c1**2)),
            (0, 1): BoundaryCondition(DD, (math.sqrt(a1 * b1) * c1, math.sqrt(a1 * b2) * c1)),
        }
        self._solved: dict[tuple[int, int], np.ndarray] = {}

    def product(self, cyl: int, i: int, j: int) -> np.ndarray:
        """mu_i mu_j sampled on the given cylinder."""
        return self.fields.phi(i, cyl) * self.fields.phi(j, cyl) * self._inv_sigma2

    def d_product(self, cyl: int, i: int, j: int) -> np.ndarray:
        key = tuple(sorted((i ^ cyl, j ^ cyl)))
        if key not in self._solved:
            src = RadialFunction(grid=self.grid, values=self.product(0, *key))
            self._solved[key] = apply_D(src, self._bc[key]).values
        return self._solved[key]

    def area(self, nodal: np.ndarray) -> float:
        return self.grid.integrate_values(nodal * self.sigma) * self.domain.circumference


def _component(s: _PlaneSolves, alpha: int, beta: int, gamma: int, delta: int) -> float:
    total = 0.0
    for cyl in (0, 1):
        total += s.area(s.d_product(cyl, alpha, beta) * s.product(cyl, gamma, delta))
        total += s.area(s.d_product(cyl, alpha, delta) * s.product(cyl, gamma, beta))
    return total


def tensor_component(
    alpha: int,
    beta: int,
    gamma: int,
    delta: int,
    fields: VariationField,
    l: float | None = None,
    bc_mode: str = "mixed",
    a1: float = 1.0,
    b1: float = 1.0,
    b2: float = 1.0,
) -> float:
    """One curvature tensor component R_{alpha beta~ gamma delta~}."""
    _check_indices(alpha, beta, gamma, delta)
    _resolve_l(fields, l)
    return _component(_PlaneSolves(fields, bc_mode, a1, b1, b2), alpha, beta, gamma, delta)


def lemma7_bound(
    fields: VariationField,
    l: float | None = None,
    bc_mode: str = "mixed",
    a1: float = 1.0,
    b1: float = 1.0,
    b2: float = 1.0,
) -> float:
    """Upper bound 4 int D(|mu0|^2) |mu1|^2 dA over both cylinders."""
    _resolve_l(fields, l)
    s = _PlaneSolves(fields, bc_mode, a1, b1, b2)
    return 4.0 * sum(s.area(s.d_product(c, 0, 0) * s.product(c, 1, 1)) for c in (0, 1))


def schwarz_check(
    fields: VariationField,
    l: float | None = None,
    bc_mode: str = "mixed",
    a1: float = 1.0,
    b1: float = 1.0,
    b2: float = 1.0,
) -> float:
    """Worst pointwise Schwarz violation, relative to the right side.

    Returns max over both cylinders and all nodes of
    (|D(mu0 mu1)| - sqrt(D(|mu0|^2) D(|mu1|^2))) / sup sqrt(...);
    nonpositive means the inequality held everywhere.
    """
    _resolve_l(fields, l)
    s = _PlaneSolves(fields, bc_mode, a1, b1, b2)
    worst = 0.0
    for cyl in (0, 1):
        lhs = np.abs(s.d_product(cyl, 0, 1))
        rhs = np.sqrt(
            np.maximum(s.d_product(cyl, 0, 0), 0.0) * np.maximum(s.d_product(cyl, 1, 1), 0.0)
        )
        scale = max(float(np.max(rhs)), 1e-300)
        worst = max(worst, float(np.max(lhs - rhs)) / scale)
    return worst


@dataclass(frozen=True)
class CurvatureReport:
    """Everything measured for one core length l under one setup."""

    l: float
    inner00: float
    inner11: float
    inner01: float
    inner00_parts: tuple[float, float]
    inner11_parts: tuple[float, float]
    inner01_parts: tuple[float, float]
    tensor_0101: float
    tensor_0110: float
    tensor_1001: float
    tensor_1010: float
    r: float
    pi: float
    k: float
    lemma7_bound: float
    grid_size: int
    bc_mode: str
    profile: CouplingProfile
    bc_values: tuple[float, float, float]
    compact_offset: float

    def __post_init__(self):
        if not self.pi > 0.0:
            raise SolverError(f"degenerate plane: Pi = {self.pi!r} at l = {self.l}")
        slack = 1e-8 * max(self.lemma7_bound, abs(self.r))
        if abs(self.r) > self.lemma7_bound + slack:
            raise SolverError(
                f"|R| = {abs(self.r):.6e} exceeds the chain bound "
                f"{self.lemma7_bound:.6e} at l = {self.l}"
            )
        if self.inner01**2 > self.inner00 * self.inner11 * (1.0 + 1e-12):
            raise SolverError(f"inner-product Schwarz inequality violated at l = {self.l}")


def plane_quantities(
    fields: VariationField,
    l: float | None = None,
    bc_mode: str = "mixed",
    a1: float = 1.0,
    b1: float = 1.0,
    b2: float = 1.0,
    compact_offset: float = 0.0,
) -> CurvatureReport:
    """Full curvature report for the plane spanned by (mu0, mu1).

    compact_offset models the O(1) inner-product mass of the rest of the
    surface; it is added to the diagonal pairings only (the off-diagonal
    correlation over the compact part is neglected).
    """
    l = _resolve_l(fields, l)
    offset = float(compact_offset)
    if not (math.isfinite(offset) and offset >= 0.0):
        raise ValueError(f"compact offset must be finite and >= 0, got {compact_offset!r}")

    s = _PlaneSolves(fields, bc_mode, a1, b1, b2)
    t0101 = _component(s, 0, 1, 0, 1)
    t0110 = _component(s, 0, 1, 1, 0)
    t1001 = _component(s, 1, 0, 0, 1)
    t1010 = _component(s, 1, 0, 1, 0)
    r = t0101 - t0110 - t1001 + t1010

    # simplified real-field form; its agreement with the component
    # assembly checks the cylinder-swap and self-adjointness algebra
    x_tot = sum(s.area(s.d_product(c, 0, 1) * s.product(c, 1, 0)) for c in (0, 1))
    bound_mass = sum(s.area(s.d_product(c, 0, 0) * s.product(c, 1, 1)) for c in (0, 1))
    r_simple = 2.0 * x_tot - 2.0 * bound_mass
    scale = max(abs(r), abs(t0101), abs(t0110), 1e-30)
    if abs(r - r_simple) > 1e-10 * scale:
        raise SolverError(
            f"tensor assembly {r!r} and simplified form {r_simple!r} disagree at l = {l}"
        )

    inner00_parts = _inner_parts(fields, 0, 0)
    inner11_parts = _inner_parts(fields, 1, 1)
    inner01_parts = _inner_parts(fields, 0, 1)
    inner00 = math.fsum(inner00_parts) + offset
    inner11 = math.fsum(inner11_parts) + offset
    inner01 = math.fsum(inner01_parts)
    pi = 4.0 * inner00 * inner11 - 4.0 * inner01**2

    return CurvatureReport(
        l=l,
        inner00=inner00,
        inner11=inner11,
        inner01=inner01,
        inner00_parts=inner00_parts,
        inner11_parts=inner11_parts,
        inner01_parts=inner01_parts,
        tensor_0101=t0101,
        tensor_0110=t0110,
        tensor_1001=t1001,
        tensor_1010=t1010,
        r=r,
        pi=pi,
        k=r / pi,
        lemma7_bound=4.0 * bound_mass,
        grid_size=fields.grid.n,
        bc_mode=bc_mode,
        profile=fields.profile,
        bc_values=(float(a1), float(b1), float(b2)),
        compact_offset=offset,
    )
