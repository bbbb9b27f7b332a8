"""Radial finite differences and the minimal-solution branch machinery.

Discretizes -Lap(w) = -(w'' + (N-1) w'/r) on [0, 1] with a symmetry row
at r = 0 (from Lap w(0) = N * w''(0)) and a Dirichlet row at r = 1.
On top of the operator sit the monotone fixed-point solver for the
coupled system, the principal stability eigenvalue, and parameter
continuation along a ray gamma = sigma * lambda up to the fold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import (
    BudgetError,
    ConfigurationError,
    DomainError,
    NumericalError,
)
from .thresholds import ExponentPair

_MIN_INTERVALS = 16


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Node set 0 = r_0 < ... < r_M = 1 with the space dimension."""

    dim: int
    nodes: np.ndarray

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or isinstance(self.dim, bool):
            raise ConfigurationError(f"dim must be an integer, got {self.dim!r}")
        if self.dim < 1:
            raise ConfigurationError(f"dim must be >= 1, got {self.dim}")
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < _MIN_INTERVALS + 1:
            raise ConfigurationError(
                f"grid needs at least {_MIN_INTERVALS} intervals, got {nodes.size - 1}"
            )
        if nodes[0] != 0.0 or nodes[-1] != 1.0 or np.any(np.diff(nodes) <= 0):
            raise ConfigurationError(
                "nodes must increase strictly from 0.0 to 1.0"
            )

    @classmethod
    def uniform(cls, dim: int, m: int) -> "RadialGrid":
        if not isinstance(m, (int, np.integer)) or m < _MIN_INTERVALS:
            raise ConfigurationError(f"m must be an integer >= {_MIN_INTERVALS}, got {m}")
        return cls(dim=int(dim), nodes=np.linspace(0.0, 1.0, int(m) + 1))

    @property
    def m(self) -> int:
        return self.nodes.size - 1

    @property
    def spacing(self) -> float:
        """Mesh width of a uniform grid (max spacing otherwise)."""
        return float(np.max(np.diff(self.nodes)))


@dataclass
class StatePair:
    """Component fields (u, v) sampled on the grid nodes.

    Solver-produced states are nonnegative with zero boundary values;
    the container itself does not enforce that (rescaled restrictions
    legitimately violate both).
    """

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.u.shape != self.v.shape or self.u.ndim != 1:
            raise ConfigurationError("u and v must be 1-d arrays of equal length")

    @property
    def sup_u(self) -> float:
        return float(np.max(self.u))

    @property
    def sup_v(self) -> float:
        return float(np.max(self.v))

    def copy(self) -> "StatePair":
        return StatePair(self.u.copy(), self.v.copy())


class RadialLaplacian:
    """Tridiagonal action of -Lap on node fields, Dirichlet row last.

    Interior rows use second-order central differences.  Rows where the
    advective coefficient (N-1)/(2 h r) would overpower 1/h^2 (possible
    only for r < (N-1)h/2, so only for N >= 4 next to the axis) fall
    back to the conservative flux form, which keeps every off-diagonal
    nonpositive.  The matrix is then an M-matrix for every dimension and
    the discrete maximum principle is asserted on each solve.
    """

    def __init__(self, grid: RadialGrid):
        if grid.m < _MIN_INTERVALS:
            raise ConfigurationError(
                f"grid needs at least {_MIN_INTERVALS} intervals, got {grid.m}"
            )
        self.grid = grid
        n = grid.m + 1
        r = grid.nodes
        dim = grid.dim
        lower = np.zeros(n)
        diag = np.zeros(n)
        upper = np.zeros(n)
        # r = 0 symmetry row: -Lap w(0) = -N w''(0) = 2N (w0 - w1)/h1^2.
        h1 = r[1] - r[0]
        diag[0] = 2.0 * dim / (h1 * h1)
        upper[0] = -2.0 * dim / (h1 * h1)
        for i in range(1, grid.m):
            hm = r[i] - r[i - 1]
            hp = r[i + 1] - r[i]
            denom = hm * hp * (hm + hp)
            # -w'' and -(N-1)/r w' by three-point formulas.
            w = -2.0 * hp / denom + (dim - 1.0) / r[i] * hp * hp / denom
            e = -2.0 * hm / denom - (dim - 1.0) / r[i] * hm * hm / denom
            if w > 0.0:
                # Flux form over the cell [r - hm/2, r + hp/2].
                rw = r[i] - 0.5 * hm
                re = r[i] + 0.5 * hp
                cell = 0.5 * (hm + hp) * r[i] ** (dim - 1.0)
                w = -(rw ** (dim - 1.0)) / (hm * cell)
                e = -(re ** (dim - 1.0)) / (hp * cell)
            lower[i] = w
            diag[i] = -(w + e)
            upper[i] = e
        diag[grid.m] = 1.0
        lower[grid.m] = 0.0
        self._lower = lower
        self._diag = diag
        self._upper = upper
        ab = np.zeros((3, n))
        ab[0, 1:] = upper[:-1]
        ab[1, :] = diag
        ab[2, :-1] = lower[1:]
        self._ab = ab

    def apply(self, w: np.ndarray) -> np.ndarray:
        """Row action: -Lap w at nodes 0..M-1, plain w at the boundary row."""
        w = np.asarray(w, dtype=float)
        out = self._diag * w
        out[:-1] += self._upper[:-1] * w[1:]
        out[1:] += self._lower[1:] * w[:-1]
        return out

    def solve_dirichlet(self, f: np.ndarray) -> np.ndarray:
        """Solve -Lap w = f with w(1) = 0 (the boundary entry of f is ignored).

        When f is nonnegative the discrete maximum principle applies and
        the solution is checked to be nonnegative up to roundoff.
        """
        rhs = np.asarray(f, dtype=float).copy()
        rhs[-1] = 0.0
        sol = solve_banded((1, 1), self._ab, rhs)
        if np.all(rhs >= 0.0):
            floor = -1e-12 * max(1.0, float(np.max(np.abs(sol))))
            if np.min(sol) < floor:
                raise NumericalError(
                    f"maximum principle violated: min {np.min(sol):.3e} for nonnegative data"
                )
        return sol

    def to_dense(self) -> np.ndarray:
        n = self.grid.m + 1
        a = np.diag(self._diag)
        a += np.diag(self._upper[:-1], 1)
        a += np.diag(self._lower[1:], -1)
        return a


def assemble_radial_laplacian(grid: RadialGrid) -> RadialLaplacian:
    """Build the tridiagonal -Lap operator for the grid."""
    return RadialLaplacian(grid)


@dataclass
class MonotoneResult:
    """Outcome of the monotone fixed-point iteration.

    converged is False both when the sup norm passed the blow-up cap and
    when the iteration budget ran out while the iterates were still
    rising; in either case no state is returned and the parameter point
    is treated as beyond the fold.
    """

    state: StatePair | None
    converged: bool
    iterations: int
    sup_u: float
    sup_v: float


def _check_load(lam: float, gam: float) -> None:
    for name, value in (("lam", lam), ("gam", gam)):
        if not math.isfinite(value) or value <= 0.0:
            raise DomainError(f"{name} must be positive and finite, got {value}")


def solve_minimal(
    e: ExponentPair,
    lam: float,
    gam: float,
    grid: RadialGrid,
    *,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    blowup_cap: float = 1e8,
    seed: StatePair | None = None,
    operator: RadialLaplacian | None = None,
) -> MonotoneResult:
    """Minimal-solution iteration u <- (-Lap)^{-1} lam (v+1)^p, then v.

    Starting from (0, 0) (or from a subsolution seed, e.g. the minimal
    solution at a smaller lambda) the iterates increase pointwise toward
    the minimal solution whenever one exists; that monotonicity is
    asserted each sweep.  Divergence is reported as a value, not raised.
    """
    _check_load(lam, gam)
    op = operator if operator is not None else assemble_radial_laplacian(grid)
    n = grid.m + 1
    if seed is None:
        u = np.zeros(n)
        v = np.zeros(n)
    else:
        if seed.u.size != n:
            raise ConfigurationError("seed state does not match the grid")
        u = seed.u.copy()
        v = seed.v.copy()
    p, theta = float(e.p), float(e.theta)
    for k in range(1, max_iter + 1):
        u_next = op.solve_dirichlet(lam * (v + 1.0) ** p)
        v_next = op.solve_dirichlet(gam * (u_next + 1.0) ** theta)
        du = u_next - u
        dv = v_next - v
        slack = -1e-9 * max(1.0, float(np.max(u_next)), float(np.max(v_next)))
        if float(np.min(du)) < slack or float(np.min(dv)) < slack:
            raise NumericalError("monotone iteration decreased; seed not a subsolution?")
        u, v = u_next, v_next
        sup_u = float(np.max(u))
        sup_v = float(np.max(v))
        if sup_u > blowup_cap or sup_v > blowup_cap:
            return MonotoneResult(None, False, k, sup_u, sup_v)
        if max(float(np.max(du)), float(np.max(dv))) < tol:
            return MonotoneResult(StatePair(u, v), True, k, sup_u, sup_v)
    return MonotoneResult(None, False, max_iter, float(np.max(u)), float(np.max(v)))


def stability_mu1(
    e: ExponentPair,
    state: StatePair,
    lam: float,
    gam: float,
    grid: RadialGrid,
    *,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    operator: RadialLaplacian | None = None,
) -> float:
    """Principal eigenvalue mu1 of -Lap(phi) = mu W phi, Dirichlet data.

    W = sqrt(lam gam p theta (v+1)^(p-1) (u+1)^(theta-1)) is the
    geometric-mean linearized weight; mu1 >= 1 is the semi-stability
    inequality satisfied by minimal solutions.  Power iteration on
    (-Lap)^{-1} W with a Rayleigh-style quotient; W > 0 pointwise, so
    the iteration converges to the dominant mode.
    """
    _check_load(lam, gam)
    op = operator if operator is not None else assemble_radial_laplacian(grid)
    p, theta = float(e.p), float(e.theta)
    weight = np.sqrt(
        lam * gam * p * theta * (state.v + 1.0) ** (p - 1.0) * (state.u + 1.0) ** (theta - 1.0)
    )
    weight[-1] = 0.0
    x = np.ones(grid.m + 1)
    x[-1] = 0.0
    x /= np.linalg.norm(x)
    rho_old = math.inf
    for _ in range(max_iter):
        y = op.solve_dirichlet(weight * x)
        rho = float(x @ y)
        if rho <= 0.0:
            raise NumericalError("power iteration lost positivity")
        x = y / np.linalg.norm(y)
        if abs(rho - rho_old) <= tol * abs(rho):
            return 1.0 / rho
        rho_old = rho
    raise NumericalError("eigenvalue iteration did not converge")


@dataclass(frozen=True)
class ContinuationConfig:
    """Knobs for continue_ray; defaults match the desk-scale studies."""

    lambda_init: float = 1e-3
    growth: float = 2.0
    bracket_tol: float = 1e-4  # relative to lambda_lo
    tol: float = 1e-10
    max_iter: int = 10_000
    blowup_cap: float = 1e8
    max_steps: int = 200
    eigen_tol: float = 1e-10

    def __post_init__(self):
        if self.lambda_init <= 0 or not math.isfinite(self.lambda_init):
            raise ConfigurationError(f"lambda_init must be positive, got {self.lambda_init}")
        if self.growth <= 1.0:
            raise ConfigurationError(f"growth must exceed 1, got {self.growth}")
        if self.bracket_tol <= 0:
            raise ConfigurationError(f"bracket_tol must be positive, got {self.bracket_tol}")
        if self.max_steps < 1:
            raise ConfigurationError(f"max_steps must be >= 1, got {self.max_steps}")


@dataclass
class BranchPoint:
    """One accepted point of the minimal branch."""

    lam: float
    gam: float
    state: StatePair
    sup_u: float
    sup_v: float
    mu1: float
    iterations: int


@dataclass
class Branch:
    """Minimal branch along gamma = sigma * lambda up to the fold bracket.

    points are sorted by increasing lambda and pointwise nondecreasing;
    lambda_hi is the smallest tried load where the iteration diverged.
    mu1_violations lists indices where mu1 failed to be nonincreasing
    (diagnostic only; small wiggles at eigensolver tolerance happen).
    """

    sigma: float
    points: list[BranchPoint] = field(default_factory=list)
    lambda_lo: float | None = None
    lambda_hi: float | None = None
    mu1_violations: list[int] = field(default_factory=list)

    @property
    def bracket_rel_width(self) -> float:
        if self.lambda_lo is None or self.lambda_hi is None:
            return math.inf
        return (self.lambda_hi - self.lambda_lo) / self.lambda_lo

    @property
    def mu1_min(self) -> float:
        return min((pt.mu1 for pt in self.points), default=math.inf)


def continue_ray(
    e: ExponentPair,
    sigma: float,
    grid: RadialGrid,
    config: ContinuationConfig = ContinuationConfig(),
) -> Branch:
    """Walk the minimal branch along gamma = sigma * lambda to the fold.

    Lambda grows geometrically from config.lambda_init while the
    monotone solver converges; the first divergence starts a bisection
    that shrinks the bracket to config.bracket_tol relative width.
    Every accepted state seeds the next solve (it is a subsolution for
    any larger load), so states are pointwise nondecreasing along the
    branch, which is asserted.  Budget exhaustion raises BudgetError
    carrying the partial branch.
    """
    if not math.isfinite(sigma) or sigma <= 0.0:
        raise DomainError(f"sigma must be positive and finite, got {sigma}")
    op = assemble_radial_laplacian(grid)
    branch = Branch(sigma=sigma)
    state: StatePair | None = None
    trial = config.lambda_init
    steps = 0
    while True:
        if branch.lambda_lo is not None and branch.lambda_hi is not None:
            if branch.lambda_hi - branch.lambda_lo <= config.bracket_tol * branch.lambda_lo:
                break
        if steps >= config.max_steps:
            raise BudgetError(
                f"continuation budget of {config.max_steps} solves exhausted",
                partial=branch,
            )
        steps += 1
        result = solve_minimal(
            e,
            trial,
            sigma * trial,
            grid,
            tol=config.tol,
            max_iter=config.max_iter,
            blowup_cap=config.blowup_cap,
            seed=state,
            operator=op,
        )
        if result.converged:
            assert result.state is not None
            if state is not None:
                slack = -1e-9 * max(1.0, result.sup_u, result.sup_v)
                if (
                    float(np.min(result.state.u - state.u)) < slack
                    or float(np.min(result.state.v - state.v)) < slack
                ):
                    raise NumericalError("branch states are not nondecreasing in lambda")
            state = result.state
            branch.lambda_lo = trial
            mu1 = stability_mu1(
                e, state, trial, sigma * trial, grid, tol=config.eigen_tol, operator=op
            )
            if branch.points and mu1 > branch.points[-1].mu1 + 1e-8:
                branch.mu1_violations.append(len(branch.points))
            branch.points.append(
                BranchPoint(
                    lam=trial,
                    gam=sigma * trial,
                    state=state,
                    sup_u=result.sup_u,
                    sup_v=result.sup_v,
                    mu1=mu1,
                    iterations=result.iterations,
                )
            )
            if branch.lambda_hi is None:
                trial = trial * config.growth
            else:
                trial = 0.5 * (branch.lambda_lo + branch.lambda_hi)
        else:
            branch.lambda_hi = trial
            if branch.lambda_lo is None:
                trial = trial / config.growth
                if trial < 1e-300:
                    raise NumericalError("no convergent load found above 1e-300")
            else:
                trial = 0.5 * (branch.lambda_lo + branch.lambda_hi)
    if not branch.points:
        raise NumericalError("continuation ended with no accepted point")
    return branch
