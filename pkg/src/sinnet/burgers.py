"""Exact viscous Burgers benchmark solution via the Cole-Hopf transform.

Problem: u_t + u u_x = nu u_xx on x in [-1, 1], t in [0, 1], with
u(0, x) = -sin(pi x) and u(t, +-1) = 0 (the odd-periodic initial condition
makes the whole-line Hopf solution satisfy the boundary automatically).

Hopf's formula with heat kernel G and phi0(y) = exp((1 - cos(pi y))/(2 pi nu)):

    u(t, x) = E_K[(x - eta)/t],   K(eta) ~ G(x - eta; 2 nu t) phi0(eta).

Substituting eta = x - 2 sqrt(nu t) z turns the K-average into a Gauss-Hermite
quadrature in z. Writing zbar, v, m3 for the weighted mean, variance and third
central moment of z, the solution and its derivatives reduce to moment
identities (r = 2 sqrt(nu t)):

    u     = (r/t) zbar
    u_x   = (1 - 2 v)/t                      (since Var_K(eta) = r^2 v)
    u_xx  = -mu3/(4 nu^2 t^3),  mu3 = -r^3 m3
    u_t   = -(mu3 - 2 s mu2)/(4 nu t^3) - s/t^2,  s = r zbar, mu2 = r^2 v

which satisfy u_t + u u_x - nu u_xx = 0 identically, so any residual measures
pure quadrature error. Node counts double adaptively until the value moves
less than the tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PI = np.pi


class QuadratureError(RuntimeError):
    """Adaptive Gauss-Hermite refinement failed to converge."""


@dataclass(frozen=True)
class PdeDataset:
    """Collocation points (t, x), observed u values, and the true PDE
    parameters lambda1 (advection) and lambda2 (viscosity)."""

    points: np.ndarray
    u: np.ndarray
    lambda1: float
    lambda2: float

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        u = np.asarray(self.u, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(u) != len(pts):
            raise ValueError("points must be (n, 2) with matching u")
        if np.any(pts[:, 0] < -1e-12) or np.any(pts[:, 0] > 1.0 + 1e-12):
            raise ValueError("t coordinates must lie in [0, 1]")
        if np.any(np.abs(pts[:, 1]) > 1.0 + 1e-12):
            raise ValueError("x coordinates must lie in [-1, 1]")
        if not np.all(np.isfinite(u)):
            raise ValueError("observed u must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "u", u)


@lru_cache(maxsize=None)
def _hermgauss(n: int):
    nodes, weights = np.polynomial.hermite.hermgauss(n)
    return nodes, weights


def _z_moments(t: np.ndarray, x: np.ndarray, nu: float, n_nodes: int):
    """K-weighted mean, variance, third central moment of the Hermite
    variable z, batched over points."""
    z, w = _hermgauss(n_nodes)
    r = 2.0 * np.sqrt(nu * t)[:, None]
    eta = x[:, None] - r * z[None, :]
    # log of the non-Gaussian factor phi0; the e^{-z^2} part lives in w
    log_g = (1.0 - np.cos(PI * eta)) / (2.0 * PI * nu)
    log_g -= log_g.max(axis=1, keepdims=True)
    gw = w[None, :] * np.exp(log_g)
    total = gw.sum(axis=1)
    zbar = (gw * z).sum(axis=1) / total
    dz = z[None, :] - zbar[:, None]
    var = (gw * dz**2).sum(axis=1) / total
    m3 = (gw * dz**3).sum(axis=1) / total
    return zbar, var, m3


def _eval_moments(t: np.ndarray, x: np.ndarray, nu: float, n_nodes: int, order: int):
    zbar, var, m3 = _z_moments(t, x, nu, n_nodes)
    r = 2.0 * np.sqrt(nu * t)
    u = r * zbar / t
    if order == 0:
        return (u,)
    mu2 = r**2 * var
    mu3 = -(r**3) * m3
    s = r * zbar
    u_x = (1.0 - 2.0 * var) / t
    u_xx = -mu3 / (4.0 * nu**2 * t**3)
    u_t = -(mu3 - 2.0 * s * mu2) / (4.0 * nu * t**3) - s / t**2
    return u, u_t, u_x, u_xx


def _initial_line(x: np.ndarray, nu: float, order: int):
    u = -np.sin(PI * x)
    if order == 0:
        return (u,)
    u_x = -PI * np.cos(PI * x)
    u_xx = PI**2 * np.sin(PI * x)
    u_t = nu * u_xx - u * u_x
    return u, u_t, u_x, u_xx


def _adaptive(t: np.ndarray, x: np.ndarray, nu: float, order: int, tol: float):
    prev = None
    n = 64
    while n <= 1024:
        cur = _eval_moments(t, x, nu, n, order)
        if prev is not None:
            drift = max(float(np.max(np.abs(a - b))) for a, b in zip(cur, prev))
            if drift < tol:
                return cur
        prev = cur
        n *= 2
    raise QuadratureError(f"Gauss-Hermite refinement did not converge below {tol}")


def burgers_fields(t, x, nu: float = 0.01 / PI, order: int = 1, tol: float = 1e-9):
    """Evaluate u (order 0) or (u, u_t, u_x, u_xx) (order 1) at points.

    ``t`` and ``x`` are broadcastable arrays with t in [0, 1], x in [-1, 1].
    Accuracy is limited by the adaptive quadrature tolerance; the returned
    fields satisfy the PDE residual to the same order.
    """
    if not nu > 0:
        raise ValueError(f"viscosity nu must be positive, got {nu}")
    t = np.asarray(t, dtype=np.float64).ravel()
    x = np.asarray(x, dtype=np.float64).ravel()
    t, x = np.broadcast_arrays(t, x)
    t = t.copy()
    out = [np.empty_like(t) for _ in range(1 if order == 0 else 4)]
    zero = t < 1e-12
    if zero.any():
        vals = _initial_line(x[zero], nu, order)
        for o, v in zip(out, vals):
            o[zero] = v
    live = ~zero
    if live.any():
        vals = _adaptive(t[live], x[live], nu, order, tol)
        for o, v in zip(out, vals):
            o[live] = v
    return out[0] if order == 0 else tuple(out)


def burgers_solution(nu: float, t_grid, x_grid, tol: float = 1e-9) -> np.ndarray:
    """Exact solution sampled on the tensor grid t_grid x x_grid."""
    t_grid = np.asarray(t_grid, dtype=np.float64)
    x_grid = np.asarray(x_grid, dtype=np.float64)
    if np.any(t_grid < 0) or np.any(t_grid > 1):
        raise ValueError("t grid must lie in [0, 1]")
    if np.any(np.abs(x_grid) > 1):
        raise ValueError("x grid must lie in [-1, 1]")
    tt = np.repeat(t_grid, len(x_grid))
    xx = np.tile(x_grid, len(t_grid))
    u = burgers_fields(tt, xx, nu=nu, order=0, tol=tol)
    return u.reshape(len(t_grid), len(x_grid))


def make_burgers_dataset(
    n: int,
    seed: int,
    nu: float = 0.01 / PI,
    n_t: int = 100,
    n_x: int = 256,
    lambda1: float = 1.0,
) -> PdeDataset:
    """Sample n observation points without replacement from the exact
    solution grid (t: n_t points on [0,1], x: n_x on [-1,1])."""
    t_grid = np.linspace(0.0, 1.0, n_t)
    x_grid = np.linspace(-1.0, 1.0, n_x)
    grid = burgers_solution(nu, t_grid, x_grid)
    if n > grid.size:
        raise ValueError(f"cannot sample {n} of {grid.size} grid points")
    rng = np.random.default_rng(np.uint64(seed))
    idx = rng.choice(grid.size, size=n, replace=False)
    ti, xi = np.unravel_index(idx, grid.shape)
    points = np.stack([t_grid[ti], x_grid[xi]], axis=1)
    return PdeDataset(points=points, u=grid.ravel()[idx], lambda1=lambda1, lambda2=nu)
