"""The collar comparison operator (Delta - 2) and its inverse D.

On radial functions over the collar the hyperbolic Laplacian is
Delta f = f''/sigma, so the equation (Delta - 2)f = -2g, multiplied
through by sigma = l^2/sin^2(lx) (finite on [a, b] since sigma(a) = 1),
is the standard-form two-point problem

    f'' - 2 sigma f = -2 sigma g.

The homogeneous equation has the closed-form pair

    y1(x) = cot(lx),        y2(x) = 1 - lx cot(lx),

with constant Wronskian y1 y2' - y1' y2 = l, so the inverse operator
D = -2(Delta - 2)^{-1} is available by variation of parameters as
explicit quadratures; no linear algebra is involved.  Two boundary
setups occur:

  * "DN": value prescribed on the left circle, zero slope at the waist
    (the right half of the cylinder is then the even reflection, which
    is the correct extension whenever the source term is symmetric);
  * "DD": values prescribed on both boundary circles.

The particular solution is assembled from basis combinations anchored
at the boundary-condition points (y vanishing at a, at b, or with
vanishing slope at the waist) with one accumulation running from each
end of the grid.  Anchoring this way keeps every term on the scale of
the solution itself: the prescribed boundary values come out exact and
no large-basis cancellation occurs, which matters because y1 and y2
grow like l^-1 and l x cot(lx) toward the ends while sigma drops to
l^2 at the waist.

D has a positive kernel (both anchored basis functions keep a fixed
sign between their anchor points and the Wronskian normalisation makes
the response to a nonnegative source nonnegative), it fixes constants,
and it is self-adjoint against sigma dx; `apply_D` checks positivity on
every call with nonnegative data.  An independent second-order
finite-difference solve of the same problem (`fd_cross_solve`) serves
as the cross-check oracle for the quadrature route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import SolverError
from .geometry import (
    CylinderDomain,
    RadialFunction,
    RadialGrid,
    make_cylinder,
    make_grid,
    metric_density,
)

__all__ = [
    "HomogeneousBasis",
    "BoundaryCondition",
    "BvpSpec",
    "OperatorCheck",
    "homogeneous_basis",
    "solve_bvp",
    "apply_D",
    "fd_cross_solve",
    "quartic_source_coefficients",
    "operator_checks",
]

DN = "DN"  # Dirichlet at a, Neumann at the waist
DD = "DD"  # Dirichlet at a and at b


@dataclass(frozen=True)
class HomogeneousBasis:
    """Closed-form solutions of f'' = 2 sigma f on the collar."""

    domain: CylinderDomain

    def y1(self, x):
        return 1.0 / np.tan(self.domain.l * np.asarray(x, dtype=float))

    def y2(self, x):
        x = np.asarray(x, dtype=float)
        return 1.0 - self.domain.l * x / np.tan(self.domain.l * x)

    def dy1(self, x):
        l = self.domain.l
        return -l / np.sin(l * np.asarray(x, dtype=float)) ** 2

    def dy2(self, x):
        l = self.domain.l
        x = np.asarray(x, dtype=float)
        s = np.sin(l * x)
        return -l / np.tan(l * x) + l**2 * x / s**2

    def d2y1(self, x):
        l = self.domain.l
        x = np.asarray(x, dtype=float)
        s = np.sin(l * x)
        return 2.0 * l**2 / (s**2 * np.tan(l * x))

    def d2y2(self, x):
        l = self.domain.l
        x = np.asarray(x, dtype=float)
        return 2.0 * l**2 / np.sin(l * x) ** 2 * self.y2(x)

    @property
    def wronskian(self) -> float:
        return self.domain.l

    def wronskian_values(self, x):
        """y1 y2' - y1' y2, pointwise; identically l up to rounding."""
        return self.y1(x) * self.dy2(x) - self.dy1(x) * self.y2(x)

    def ode_residual(self, x):
        """Residual of (l^-2 sin^2(lx)) y'' - 2y for both basis functions."""
        sig = metric_density(self.domain, x)
        r1 = self.d2y1(x) / sig - 2.0 * self.y1(x)
        r2 = self.d2y2(x) / sig - 2.0 * self.y2(x)
        return float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))


def homogeneous_basis(l: float) -> HomogeneousBasis:
    return HomogeneousBasis(domain=make_cylinder(l))


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary data for the collar problem: mode "DN" or "DD".

    DN carries one value (Dirichlet at a, zero slope at the waist), DD
    two (Dirichlet at a and at b).
    """

    mode: str
    values: tuple

    def __post_init__(self):
        if self.mode not in (DN, DD):
            raise ValueError(f"unknown boundary mode {self.mode!r}")
        need = 1 if self.mode == DN else 2
        vals = tuple(float(v) for v in self.values)
        if len(vals) != need or not all(math.isfinite(v) for v in vals):
            raise ValueError(f"{self.mode} mode needs {need} finite boundary value(s)")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class BvpSpec:
    """Right-hand side g and boundary data for (Delta - 2)f = -2g."""

    l: float
    rhs: object  # RadialFunction or callable x -> g(x)
    bc: BoundaryCondition

    def __post_init__(self):
        make_cylinder(self.l)  # validates the length
        if isinstance(self.rhs, RadialFunction):
            if self.rhs.grid.domain.l != self.l:
                raise ValueError("rhs lives on a different collar")
            if not np.all(np.isfinite(self.rhs.values)):
                raise ValueError("rhs must be finite")
        elif not callable(self.rhs):
            raise ValueError("rhs must be a RadialFunction or a callable")


def _rhs_values(spec: BvpSpec, grid: RadialGrid) -> np.ndarray:
    if isinstance(spec.rhs, RadialFunction):
        if spec.rhs.grid.nodes is grid.nodes or np.array_equal(spec.rhs.grid.nodes, grid.nodes):
            return spec.rhs.values
        return np.interp(grid.nodes, spec.rhs.grid.nodes, spec.rhs.values)
    vals = np.asarray(spec.rhs(grid.nodes), dtype=float)
    if vals.shape != grid.nodes.shape:
        raise ValueError("rhs callable must return one value per node")
    return vals


def solve_bvp(spec: BvpSpec, grid: RadialGrid | None = None, n: int = 2048) -> RadialFunction:
    """Variation-of-parameters solve of (Delta - 2)f = -2g on the collar."""
    domain = make_cylinder(spec.l)
    if grid is None:
        grid = spec.rhs.grid if isinstance(spec.rhs, RadialFunction) else make_grid(domain, n)
    if grid.domain.l != spec.l:
        raise ValueError("grid belongs to a different collar")

    basis = HomogeneousBasis(domain=domain)
    x = grid.nodes
    y1, y2 = basis.y1(x), basis.y2(x)
    y1a, y2a = y1[0], y2[0]
    r = -2.0 * metric_density(domain, x) * _rhs_values(spec, grid)
    l = domain.l

    ya = y1a * y2 - y2a * y1  # vanishes at a, increasing
    left = grid.cumulative(ya * r)

    if spec.bc.mode == DD:
        y1b, y2b = y1[-1], y2[-1]
        yb = y1b * y2 - y2b * y1  # vanishes at b
        w = l * (y1a * y2b - y2a * y1b)
        right = grid.cumulative_reverse(yb * r)
        f = (yb * left + ya * right) / w
        b1, b2 = spec.bc.values
        f += b1 * (yb / yb[0]) + b2 * (ya / ya[-1])
    else:
        yn = (0.5 * math.pi * l) * y1 + l * y2  # zero slope at the waist
        w = -(l**2) * (y2a + 0.5 * math.pi * y1a)
        ynr = yn * r
        # integral x..waist, anchored at the waist: summing panels outward
        # keeps its rounding error proportional to the integral itself,
        # which the growth of ya toward the waist would otherwise amplify
        k = grid.interval_index(domain.waist)
        p = grid.partial_interval(ynr, domain.waist)
        to_waist = np.zeros(grid.n)
        to_waist[: k + 1] = p
        to_waist[:k] += np.cumsum(grid._interval_integrals(ynr)[k - 1 :: -1])[::-1]
        f = (yn * left + ya * to_waist) / w
        f += spec.bc.values[0] * (yn / yn[0])
        # the DN problem lives on [a, waist]; fill the right half with the
        # even reflection, which solves the full-collar equation whenever
        # the source is waist-symmetric (the only use this mode has)
        half = grid.n // 2
        f[grid.n - half :] = f[:half][::-1]

    if not np.all(np.isfinite(f)):
        raise SolverError("variation-of-parameters solve produced non-finite values")
    return RadialFunction(grid=grid, values=f)


def apply_D(g: RadialFunction, bc: BoundaryCondition, l: float | None = None) -> RadialFunction:
    """D(g) = -2(Delta - 2)^{-1} g under the given boundary data.

    For nonnegative g with nonnegative boundary data the positive-kernel
    property makes the output nonnegative; that is asserted here on
    every such call (failure would mean the quadrature lost the kernel).
    """
    if l is None:
        l = g.grid.domain.l
    f = solve_bvp(BvpSpec(l=l, rhs=g, bc=bc), grid=g.grid)
    if np.all(g.values >= 0.0) and all(v >= 0.0 for v in bc.values):
        floor = -1e-10 * max(1.0, float(np.max(np.abs(f.values))))
        if float(np.min(f.values)) < floor:
            raise SolverError(f"positive kernel violated: min D(g) = {np.min(f.values):.3e}")
    return f


def fd_cross_solve(spec: BvpSpec, n: int) -> RadialFunction:
    """Independent second-order finite-difference solve on a uniform grid.

    DN mode discretizes the half collar [a, waist] with a ghost-node
    Neumann row and reflects; n is bumped to the next odd count so the
    waist is a node.  Cross-validates the quadrature route only; the
    uniform grid makes the convergence order transparent.
    """
    domain = make_cylinder(spec.l)
    n = int(n)
    if n % 2 == 0:
        n += 1
    grid = make_grid(domain, n, grading="uniform")
    g = _rhs_values(spec, grid)
    x = grid.nodes
    h = (domain.b - domain.a) / (n - 1)

    def banded_solve(xs, gs, first_value, last_row_neumann, last_value=None):
        m = xs.size
        sig = metric_density(domain, xs)
        ab = np.zeros((3, m))
        rhs = np.empty(m)
        ab[0, 2:] = 1.0 / h**2
        ab[1, 1:-1] = -2.0 / h**2 - 2.0 * sig[1:-1]
        ab[2, :-2] = 1.0 / h**2
        rhs[1:-1] = -2.0 * sig[1:-1] * gs[1:-1]
        ab[1, 0] = 1.0
        ab[0, 1] = 0.0
        rhs[0] = first_value
        if last_row_neumann:
            ab[2, -2] = 2.0 / h**2
            ab[1, -1] = -2.0 / h**2 - 2.0 * sig[-1]
            rhs[-1] = -2.0 * sig[-1] * gs[-1]
        else:
            ab[2, -2] = 0.0
            ab[1, -1] = 1.0
            rhs[-1] = last_value
        try:
            return solve_banded((1, 1), ab, rhs)
        except np.linalg.LinAlgError as exc:  # sign-definite; should not happen
            raise SolverError(f"finite-difference system singular: {exc}") from exc

    if spec.bc.mode == DD:
        b1, b2 = spec.bc.values
        f = banded_solve(x, g, b1, last_row_neumann=False, last_value=b2)
    else:
        half = n // 2 + 1
        fh = banded_solve(x[:half], g[:half], spec.bc.values[0], last_row_neumann=True)
        f = np.concatenate([fh, fh[-2::-1]])
    return RadialFunction(grid=grid, values=f)


# fl(pi) + _PI_TAIL carries pi to ~107 bits
_PI_TAIL = 1.2246467991473532e-16
_SPLIT = 134217729.0  # 2^27 + 1, Dekker splitter


def _waist_sine(l: float, m: float) -> float:
    """sin(2*l*m) for m within rounding of pi/(2l).

    The coefficient system divides this by 2 l^4 overall, so the naive
    sine is unusable: near pi its value is dominated by pi - fl(pi), a
    fixed ~1.2e-16 that swamps the true residue 2*l*m - pi.  Split the
    product exactly and reduce against two-term pi instead; the result
    is the correctly rounded sine of the float product.
    """
    x = 2.0 * l
    r = x * m
    c = _SPLIT * x
    xh = c - (c - x)
    xl = x - xh
    c = _SPLIT * m
    mh = c - (c - m)
    ml = m - mh
    err = ((xh * mh - r) + xh * ml + xl * mh) + xl * ml
    # r - pi is exact (Sterbenz), so d = 2*l*m - pi to full precision
    d = (r - math.pi) + (err - _PI_TAIL)
    return -d


def quartic_source_coefficients(l: float, a1: float = 1.0) -> tuple[float, float]:
    """Homogeneous coefficients (A2, A3) completing J = sin^2(lx)/(2 l^4).

    J is an exact particular solution for the source g = l^-4 sin^4(lx);
    the DN data {f(a) = a1, f'(waist) = 0} pin the homogeneous part via a
    2x2 system.  Since J'(waist) = 0 the solution satisfies A2 = (pi/2) A3.
    """
    domain = make_cylinder(l)
    basis = HomogeneousBasis(domain=domain)
    a, m = domain.a, domain.waist
    lhs = np.array(
        [
            [float(basis.y1(a)), float(basis.y2(a))],
            [float(basis.dy1(m)), float(basis.dy2(m))],
        ]
    )
    j_a = math.sin(l * a) ** 2 / (2.0 * l**4)
    dj_m = _waist_sine(l, m) / (2.0 * l**3)
    rhs = np.array([a1 - j_a, -dj_m])
    try:
        a2, a3 = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"degenerate boundary system at l={l}: {exc}") from exc
    return float(a2), float(a3)


@dataclass(frozen=True)
class OperatorCheck:
    name: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.error < self.tol


def operator_checks(l: float, n: int = 4096, seed: int = 7) -> list[OperatorCheck]:
    """Oracle battery for the operator machinery at core length l.

    Exercises the closed-form basis, the constant fixed point, the exact
    J-solution of the l^-4 sin^4(lx) source, the coefficient relation
    forced by J'(waist) = 0, and agreement between the quadrature and
    finite-difference routes.  Tolerances are part of the contract; the
    finite-difference comparison is the only n-sensitive entry.
    """
    domain = make_cylinder(l)
    basis = HomogeneousBasis(domain=domain)
    rng = np.random.default_rng(seed)
    pts = domain.a + (domain.b - domain.a) * rng.random(200)
    r1, r2 = basis.ode_residual(pts)
    wr = float(np.max(np.abs(basis.wronskian_values(np.linspace(domain.a, domain.b, 5)) - l)))

    grid = make_grid(domain, n)
    ones = RadialFunction.from_callable(grid, lambda x: np.ones_like(x))
    d1n = apply_D(ones, BoundaryCondition(DN, (1.0,)))
    d1d = apply_D(ones, BoundaryCondition(DD, (1.0, 1.0)))
    const_err = max(
        float(np.max(np.abs(d1n.values - 1.0))), float(np.max(np.abs(d1d.values - 1.0)))
    )

    def quartic(x):
        return np.sin(l * x) ** 4 / l**4

    numeric = solve_bvp(BvpSpec(l=l, rhs=quartic, bc=BoundaryCondition(DN, (1.0,))), grid=grid)
    a2, a3 = quartic_source_coefficients(l)
    x = grid.nodes
    closed = np.sin(l * x) ** 2 / (2.0 * l**4) + a2 * basis.y1(x) + a3 * basis.y2(x)
    scale = float(np.max(np.abs(closed)))
    closed_err = float(np.max(np.abs(numeric.values - closed))) / scale
    coeff_err = abs(a2 - 0.5 * math.pi * a3)

    fd = fd_cross_solve(BvpSpec(l=l, rhs=quartic, bc=BoundaryCondition(DN, (1.0,))), n=n)
    vop_on_fd = solve_bvp(
        BvpSpec(l=l, rhs=quartic, bc=BoundaryCondition(DN, (1.0,))), grid=fd.grid
    )
    fd_err = float(np.max(np.abs(fd.values - vop_on_fd.values)))
    fd_err /= float(np.max(np.abs(vop_on_fd.values)))

    return [
        OperatorCheck("ode residual y1", r1, 1e-9),
        OperatorCheck("ode residual y2", r2, 1e-9),
        OperatorCheck("wronskian constancy", wr, 1e-12),
        OperatorCheck("identity on constants", const_err, 1e-10),
        OperatorCheck("quartic-source closed form", closed_err, 1e-6),
        OperatorCheck("coefficient relation A2 = (pi/2) A3", coeff_err, 1e-10),
        OperatorCheck("finite-difference agreement", fd_err, 1e-4),
    ]
