"""Elliptic solvers: Dirichlet problem on the r1 disc and free-space
recovery of a compactly supported function from its Laplacian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.sparse.linalg import LinearOperator, cg

from .errors import ConfigError, SolverError
from .fields import ScalarField

CG_RTOL = 1e-10
CG_MAXITER = 50000


@dataclass(frozen=True)
class PoissonProblem:
    rhs: ScalarField
    mode: str  # "dirichlet_disc" | "free_space"
    radius: float | None = None

    def __post_init__(self):
        if self.mode not in ("dirichlet_disc", "free_space"):
            raise ConfigError(f"unknown Poisson mode {self.mode!r}")
        if self.mode == "free_space" and not self.rhs.is_compact():
            raise ConfigError("free-space recovery needs an rhs compact in the r1 disc")


@dataclass(frozen=True)
class PoissonResult:
    field: ScalarField
    iterations: int
    residual: float


def solve_dirichlet_disc(problem: PoissonProblem) -> PoissonResult:
    """Lap V = rhs on the interior of the disc, V = 0 on and outside it.

    Matrix-free 5-point stencil on the disc-interior samples, solved with
    conjugate gradients to relative residual <= 1e-10.
    """
    if problem.mode != "dirichlet_disc":
        raise ConfigError("solve_dirichlet_disc needs mode='dirichlet_disc'")
    rhs = problem.rhs
    grid = rhs.grid
    radius = grid.r1 if problem.radius is None else problem.radius
    mask = grid.rr() < radius
    b = -rhs.values[mask]  # solve (-Lap) V = -rhs so the operator is SPD
    if b.size == 0:
        raise ConfigError("no grid samples inside the Dirichlet disc")
    nrm_b = float(np.linalg.norm(b))
    if nrm_b == 0.0:
        return PoissonResult(ScalarField(grid, np.zeros_like(rhs.values)), 0, 0.0)

    h2 = grid.h * grid.h

    def neg_laplacian(x):
        full = np.zeros((grid.nx, grid.ny))
        full[mask] = x
        lap = np.zeros_like(full)
        lap[1:-1, 1:-1] = (
            full[2:, 1:-1] + full[:-2, 1:-1] + full[1:-1, 2:] + full[1:-1, :-2]
            - 4.0 * full[1:-1, 1:-1]
        ) / h2
        return -lap[mask]

    op = LinearOperator((b.size, b.size), matvec=neg_laplacian)
    iters = 0

    def count(_):
        nonlocal iters
        iters += 1

    x, info = cg(op, b, rtol=CG_RTOL, atol=0.0, maxiter=CG_MAXITER, callback=count)
    res = float(np.linalg.norm(b - op.matvec(x)) / nrm_b)
    if info != 0:
        raise SolverError(
            f"CG failed to reach rtol={CG_RTOL} after {iters} iterations",
            residual=res, iterations=iters,
        )
    out = np.zeros((grid.nx, grid.ny))
    out[mask] = x
    return PoissonResult(ScalarField(grid, out), iters, res)


def log_kernel(grid, self_cell=True):
    """Cell-integrated logarithmic kernel on displacement offsets.

    Off-center cells use the midpoint value (1/2pi) log|x| * h^2; the
    singular self-cell uses the exact integral of (1/2pi) log|x| over an
    h-by-h square centered at the origin.
    """
    h = grid.h
    dx = h * np.arange(-(grid.nx - 1), grid.nx)
    dy = h * np.arange(-(grid.ny - 1), grid.ny)
    rr = np.hypot(dx[:, None], dy[None, :])
    with np.errstate(divide="ignore"):
        k = np.log(rr) * h * h / (2.0 * np.pi)
    if self_cell:
        a = h / 2.0
        # int over [-a,a]^2 of log|x| dx = 2 a^2 (log(2 a^2) + pi/2 - 3)
        k[grid.nx - 1, grid.ny - 1] = 2.0 * a * a * (np.log(2.0 * a * a) + np.pi / 2.0 - 3.0) / (2.0 * np.pi)
    return k


def solve_free_space(problem: PoissonProblem) -> PoissonResult:
    """Convolve the rhs with the free-space Green function G = (1/2pi) log|x|.

    The quadrature is the midpoint rule per source cell with the exact
    log integral on the singular self-cell; the discrete sum is evaluated
    as a (non-circular) linear convolution.
    """
    if problem.mode != "free_space":
        raise ConfigError("solve_free_space needs mode='free_space'")
    rhs = problem.rhs
    grid = rhs.grid
    k = log_kernel(grid)
    out = fftconvolve(rhs.values, k, mode="same")
    return PoissonResult(ScalarField(grid, out), 0, 0.0)
