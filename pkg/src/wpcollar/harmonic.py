"""Harmonic maps between hyperbolic collars of different core length.

For source and target collars with densities l^2/sin^2(lx) and
L^2/sin^2(Lu), the radial ansatz w(x + iy) = u(x) + iy is harmonic
exactly when

    u'' = L cot(L u) (u'^2 - 1),

which integrates once against u' to the constant of motion

    L^2 csc^2(L u) (u'^2 - 1) = c0.                     (first integral)

Solving for the slope, u' = sqrt(1 + c0 L^-2 sin^2(L u)) > 0, so the
whole two-point problem (u maps boundary circle to boundary circle and
waist to waist) collapses to one scalar condition on c0: the x-distance
from the left circle to the waist must be reproduced,

    int_{arcsin(L)/L}^{pi/(2L)} dv / sqrt(1 + c0 L^-2 sin^2(L v))
        = pi/(2l) - arcsin(l)/l.

The left side is an incomplete elliptic integral of the first kind,
strictly decreasing in c0, diverging as c0 -> -L^2 (slope degenerates
at the waist) and vanishing as c0 -> infinity, so the condition has a
unique root.  We bracket it and polish with Brent's method, then
integrate the slope ODE adaptively and fill the right half of the
collar by the anti-isometric reflection u(pi/l - x) = pi/L - u(x).

Sign bookkeeping that the boundary data forces: the half-collar run
(pi/2 - arcsin s)/s is decreasing in the core length s, so a target
with the bigger core (L > l) has the *shorter* collar, the map has mean
slope below one, and c0 < 0; shrinking the core (L < l) gives c0 > 0.
Hence sign(c0) = sign(l - L), and dc0/dL at L = l is negative.

As l -> 0 with L fixed the solutions converge to the map of the noded
half collar [1, infinity) with density x^-2, available in closed form:

    u(L; x) = L^-1 arcsin((1 - k e^{2L(1-x)}) / (1 + k e^{2L(1-x)})),
    k = (1 - L)/(1 + L),

whose first-integral constant is exactly -L^2 (the degenerate limit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.special import ellipkinc

from .errors import SolverError
from .geometry import CylinderDomain, RadialGrid, make_cylinder, make_grid, metric_density

__all__ = [
    "CylinderHarmonicMap",
    "NodedHarmonicMap",
    "EnergyDensities",
    "VariationScale",
    "solve_cylinder_map",
    "first_integral_residual",
    "noded_map",
    "noded_energy",
    "energy_densities",
    "bochner_residual",
    "hopf_differential",
    "normalized_variation_scale",
]

_BRENTQ_RTOL = 4 * np.finfo(float).eps


def _half_run(s: float) -> float:
    """x-distance from the left boundary circle to the waist, core length s."""
    return (0.5 * math.pi - math.asin(s)) / s


def _shoot_length(c0: float, L: float) -> float:
    """Half-collar length produced by a candidate first-integral constant.

    Equals (F(pi/2 | m) - F(arcsin L | m))/L with m = -c0/L^2, where F is
    the incomplete elliptic integral of the first kind.  Candidates at or
    below the degenerate value -L^2 make the slope vanish before the waist
    and are rejected as infinite length.
    """
    m = -c0 / L**2
    if m >= 1.0:
        return math.inf
    return (ellipkinc(0.5 * math.pi, m) - ellipkinc(math.asin(L), m)) / L


def _solve_c0(l: float, L: float) -> float:
    """Root of the shooting condition; unique in (-L^2, infinity)."""
    target = _half_run(l)

    def f(c: float) -> float:
        return _shoot_length(c, L) - target

    f0 = f(0.0)
    if f0 == 0.0:
        return 0.0
    if f0 > 0.0:
        # run still too long at c0 = 0 and F decreasing: the root is positive
        lo, hi = 0.0, L**2
        for _ in range(200):
            if f(hi) < 0.0:
                break
            lo, hi = hi, 4.0 * hi
        else:
            raise SolverError(f"shooting bracket exhausted above, l={l}, L={L}, hi={hi}")
    else:
        # run too short: the root sits in (-L^2, 0); creep toward the
        # degenerate end, where F blows up, until the defect changes sign
        lo, hi = -0.5 * L**2, 0.0
        for _ in range(200):
            if f(lo) > 0.0:
                break
            hi = lo
            lo = -(L**2) + 0.5 * (lo + L**2)
        else:
            raise SolverError(f"shooting bracket exhausted near -L^2, l={l}, L={L}, lo={lo}")
    return float(brentq(f, lo, hi, xtol=1e-15, rtol=_BRENTQ_RTOL, maxiter=200))


@dataclass(frozen=True)
class CylinderHarmonicMap:
    """Radial harmonic map between two collars, sampled on a grid."""

    source: CylinderDomain
    target: CylinderDomain
    c0: float
    grid: RadialGrid
    u: np.ndarray
    u_prime: np.ndarray
    bc_residual: float

    def __post_init__(self):
        self.u.setflags(write=False)
        self.u_prime.setflags(write=False)
        if np.any(self.u_prime <= 0):
            raise SolverError("map is not monotone: nonpositive slope")

    @property
    def l(self) -> float:
        return self.source.l

    @property
    def L(self) -> float:
        return self.target.l


def solve_cylinder_map(
    l: float,
    L: float,
    grid: RadialGrid | None = None,
    n: int = 2048,
    grading: str = "graded",
    tol: float = 1e-8,
) -> CylinderHarmonicMap:
    """Solve the collar-to-collar boundary value problem.

    The first-integral constant is found from the shooting condition,
    the left half of the map is integrated adaptively from the boundary
    circle to the waist, and the right half is the anti-isometric
    reflection.  `tol` bounds the waist boundary-condition error.
    """
    source = make_cylinder(l)
    target = make_cylinder(L)
    if grid is None:
        grid = make_grid(source, n, grading)
    elif grid.domain.l != source.l:
        raise ValueError("grid belongs to a different source collar")

    c0 = _solve_c0(l, L)
    kappa = c0 / L**2

    def slope(_x, u):
        return np.sqrt(np.maximum(1.0 + kappa * np.sin(L * u) ** 2, 0.0))

    waist = source.waist
    sol = solve_ivp(
        slope,
        (source.a, waist),
        [target.a],
        method="DOP853",
        dense_output=True,
        rtol=1e-12,
        atol=1e-13,
    )
    if not sol.success:
        raise SolverError(f"slope integration failed for l={l}, L={L}: {sol.message}")
    residual = abs(sol.y[0, -1] - target.waist)
    if residual > tol:
        raise SolverError(
            f"waist condition missed: |u(waist) - pi/2L| = {residual:.3e} > {tol:.1e}"
        )

    x = grid.nodes
    left = x <= waist
    u = np.empty_like(x)
    u[left] = sol.sol(x[left])[0]
    u[~left] = math.pi / L - sol.sol(math.pi / l - x[~left])[0]
    u_prime = np.sqrt(np.maximum(1.0 + kappa * np.sin(L * u) ** 2, 0.0))
    return CylinderHarmonicMap(
        source=source,
        target=target,
        c0=c0,
        grid=grid,
        u=u,
        u_prime=u_prime,
        bc_residual=residual,
    )


def first_integral_residual(m: CylinderHarmonicMap) -> float:
    """Max-norm deviation of L^2 csc^2(Lu)(u'^2 - 1) from c0 over the grid.

    Diagnoses corruption or inconsistency of the stored (u, u', c0)
    triple; sin(Lu) stays in [L, 1] on the collar so the cosecant is
    harmless.
    """
    s = np.sin(m.L * m.u)
    return float(np.max(np.abs(m.L**2 / s**2 * (m.u_prime**2 - 1.0) - m.c0)))


@dataclass(frozen=True)
class NodedHarmonicMap:
    """Closed-form harmonic map of the noded half collar [1, infinity)."""

    L: float
    k: float

    def _gauge(self, x):
        return self.k * np.exp(2.0 * self.L * (1.0 - np.asarray(x, dtype=float)))

    def _check(self, x):
        if np.any(np.asarray(x, dtype=float) < 1.0):
            raise ValueError("noded collar starts at x = 1")

    def u(self, x):
        self._check(x)
        e = self._gauge(x)
        return np.arcsin((1.0 - e) / (1.0 + e)) / self.L

    def u_prime(self, x):
        self._check(x)
        e = self._gauge(x)
        return 2.0 * np.sqrt(e) / (1.0 + e)

    def energy(self, x):
        """Holomorphic energy density against the x^-2 source metric.

        H0(L; x) = (L^2 x^2/4) ((1 + sqrt(k) e^{L(1-x)}) / (1 - sqrt(k) e^{L(1-x)}))^2.
        """
        self._check(x)
        x = np.asarray(x, dtype=float)
        r = math.sqrt(self.k) * np.exp(self.L * (1.0 - x))
        out = (self.L * x / 2.0) ** 2 * ((1.0 + r) / (1.0 - r)) ** 2
        return float(out) if out.ndim == 0 else out


def noded_map(L: float) -> NodedHarmonicMap:
    """Limit map onto the collar of core length L as the source degenerates."""
    L = float(L)
    if not 0.0 < L < 1.0:
        raise ValueError(f"target core length must lie in (0, 1), got {L!r}")
    return NodedHarmonicMap(L=L, k=(1.0 - L) / (1.0 + L))


def noded_energy(L: float, x):
    """H0(L; x) of the noded map, by the closed form."""
    return noded_map(L).energy(x)


@dataclass(frozen=True)
class EnergyDensities:
    """Holomorphic and anti-holomorphic energy of a collar map."""

    grid: RadialGrid
    holomorphic: np.ndarray
    antiholomorphic: np.ndarray
    total: np.ndarray

    def __post_init__(self):
        for arr in (self.holomorphic, self.antiholomorphic, self.total):
            arr.setflags(write=False)
        if np.any(self.antiholomorphic < 0):
            raise ValueError("anti-holomorphic energy must be nonnegative")
        if not np.allclose(self.total, self.holomorphic + self.antiholomorphic, rtol=1e-13):
            raise ValueError("total energy must be the sum of the two parts")


def energy_densities(m: CylinderHarmonicMap) -> EnergyDensities:
    """Pointwise H and L densities; the identity map gives H = 1, L = 0.

    H = (rho/sigma) |w_z|^2 with rho/sigma = (L^2/l^2) sin^2(lx)/sin^2(Lu)
    and w_z = (u' + 1)/2; the anti-holomorphic part uses (u' - 1)/2.
    """
    x = m.grid.nodes
    ratio = (m.L / m.l) ** 2 * (np.sin(m.l * x) / np.sin(m.L * m.u)) ** 2
    h = ratio * (0.5 * (m.u_prime + 1.0)) ** 2
    ldens = ratio * (0.5 * (m.u_prime - 1.0)) ** 2
    return EnergyDensities(grid=m.grid, holomorphic=h, antiholomorphic=ldens, total=h + ldens)


def bochner_residual(m: CylinderHarmonicMap, e: EnergyDensities | None = None) -> float:
    """Interior residual of Delta log H = 2H - 2L - 2 by second differences."""
    if e is None:
        e = energy_densities(m)
    x = m.grid.nodes
    f = np.log(e.holomorphic)
    hm = x[1:-1] - x[:-2]
    hp = x[2:] - x[1:-1]
    d2 = 2.0 * (f[:-2] / (hm * (hm + hp)) - f[1:-1] / (hm * hp) + f[2:] / (hp * (hm + hp)))
    sigma = metric_density(m.source, x[1:-1])
    lap = d2 / sigma
    return float(np.max(np.abs(lap - 2.0 * e.holomorphic[1:-1] + 2.0 * e.antiholomorphic[1:-1] + 2.0)))


def hopf_differential(m: CylinderHarmonicMap) -> float:
    """Constant coefficient of the map's Hopf differential, c0/4.

    Vanishes exactly for the identity; carries the sign of l - L.
    """
    return 0.25 * m.c0


@dataclass(frozen=True)
class VariationScale:
    """Reparametrization of the target core length along a pinching family."""

    derivative: float  # dc0/dL at L = l, by central differences
    scale: float  # dL/dt making dc0/dt = 4, i.e. unit Hopf variation
    step: float


def normalized_variation_scale(l: float, step: float | None = None) -> VariationScale:
    """Finite-difference dc0/dL at L = l and the factor normalising it to 4.

    Central differences at steps h and h/2 combined by one Richardson
    extrapolation; the derivative is negative and bounded away from zero
    on (0, 1), so the scale (which is then negative: the normalised family
    shrinks L as t grows) is always well defined.
    """
    if step is None:
        step = max(1e-5, 1e-3 * l)
    if not 0.0 < l < 1.0:
        raise ValueError(f"core length must lie in (0, 1), got {l!r}")
    if step <= 0 or l + step >= 1.0 or l - step <= 0.0:
        raise ValueError("difference step leaves the admissible core range")

    def central(h: float) -> float:
        return (_solve_c0(l, l + h) - _solve_c0(l, l - h)) / (2.0 * h)

    d1 = central(step)
    d2 = central(0.5 * step)
    derivative = (4.0 * d2 - d1) / 3.0
    if not math.isfinite(derivative) or abs(derivative) < 1e-8:
        raise SolverError(f"degenerate pinching derivative at l={l}: {derivative!r}")
    return VariationScale(derivative=derivative, scale=4.0 / derivative, step=step)
