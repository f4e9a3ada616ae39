"""Round-cylinder geometry, radial grid profiles and conformal curvature.

The model manifold is [-L, L] x S^(n-1) with the product metric g = dt^2 + h,
h the unit round metric.  Its Schouten-type curvature tensor is
diag(-1/2, 1/2, ..., 1/2) in the obvious orthonormal frame.  Under the
conformal change g -> e^(-2u) g the tensor becomes

    W[u] = Hess(u) + du (x) du - |du|^2/2 g + A_g,

and for a radial profile u = u(t) its eigenvalues with respect to g are

    u'' - (1 - u'^2)/2          once (axis direction),
    (1 - u'^2)/2                with multiplicity n - 1 (sphere directions).

Profiles are plain grid functions; first and second differences are derived
from the values with second-order stencils (central inside, one-sided at the
two end nodes) and are recomputed rather than stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .symfun import EigenTuple

__all__ = [
    "CylinderGeometry",
    "RadialProfile",
    "WEigenField",
    "first_derivative",
    "second_derivative",
    "stencil_weights",
    "w_eigen_radial",
    "radial_w_eigenvalues",
    "conformal_schouten",
]


@dataclass(frozen=True)
class CylinderGeometry:
    """The cylinder [-half_length, half_length] x S^(n-1), n >= 3."""

    n: int
    half_length: float

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("dimension must be at least 3")
        if not self.half_length > 0:
            raise ValueError("half_length must be positive")

    def schouten_eigenvalues(self):
        """Base curvature eigenvalues (-1/2, 1/2, ..., 1/2), ascending."""
        return EigenTuple((-0.5,) + (0.5,) * (self.n - 1))

    def schouten_matrix(self):
        a = np.full(self.n, 0.5)
        a[0] = -0.5
        return np.diag(a)


def stencil_weights(offsets, order):
    """Finite-difference weights for the given derivative order.

    offsets are node positions relative to the evaluation point; len(offsets)
    conditions are imposed, so a J-point stencil reproduces polynomials of
    degree J-1 exactly.
    """
    offsets = np.asarray(offsets, dtype=float)
    j = offsets.size
    if order >= j:
        raise ValueError("stencil too short for the requested derivative")
    a = np.vander(offsets, j, increasing=True).T
    a /= np.array([math.factorial(p) for p in range(j)])[:, None]
    rhs = np.zeros(j)
    rhs[order] = 1.0
    return np.linalg.solve(a, rhs)


def _interior_first_weights(grid):
    """Closed-form 3-point weights for u' at nodes 1..m-2, shape (m-2, 3)."""
    h1 = grid[1:-1] - grid[:-2]
    h2 = grid[2:] - grid[1:-1]
    wm = -h2 / (h1 * (h1 + h2))
    w0 = (h2 - h1) / (h1 * h2)
    wp = h1 / (h2 * (h1 + h2))
    return np.stack([wm, w0, wp], axis=1)


def _interior_second_weights(grid):
    """Closed-form 3-point weights for u'' at nodes 1..m-2, shape (m-2, 3)."""
    h1 = grid[1:-1] - grid[:-2]
    h2 = grid[2:] - grid[1:-1]
    wm = 2.0 / (h1 * (h1 + h2))
    w0 = -2.0 / (h1 * h2)
    wp = 2.0 / (h2 * (h1 + h2))
    return np.stack([wm, w0, wp], axis=1)


def first_derivative(grid, u):
    """Second-order first differences; one-sided 3-point at the two ends."""
    grid = np.asarray(grid, dtype=float)
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    w = _interior_first_weights(grid)
    out[1:-1] = w[:, 0] * u[:-2] + w[:, 1] * u[1:-1] + w[:, 2] * u[2:]
    out[0] = stencil_weights(grid[:3] - grid[0], 1) @ u[:3]
    out[-1] = stencil_weights(grid[-3:] - grid[-1], 1) @ u[-3:]
    return out


def second_derivative(grid, u):
    """Second differences; one-sided 4-point at the ends to keep second order."""
    grid = np.asarray(grid, dtype=float)
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    w = _interior_second_weights(grid)
    out[1:-1] = w[:, 0] * u[:-2] + w[:, 1] * u[1:-1] + w[:, 2] * u[2:]
    out[0] = stencil_weights(grid[:4] - grid[0], 2) @ u[:4]
    out[-1] = stencil_weights(grid[-4:] - grid[-1], 2) @ u[-4:]
    return out


@dataclass(frozen=True)
class RadialProfile:
    """A grid function on a strictly increasing coordinate grid.

    du and d2u are derived from u with the declared stencils on first access;
    they cannot be set independently.
    """

    grid: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        grid = np.ascontiguousarray(np.asarray(self.grid, dtype=float))
        u = np.ascontiguousarray(np.asarray(self.u, dtype=float))
        if grid.ndim != 1 or grid.size < 5:
            raise ValueError("grid must be one-dimensional with at least 5 nodes")
        if u.shape != grid.shape:
            raise ValueError("u must match the grid shape")
        if not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        grid.flags.writeable = False
        u.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "u", u)

    @classmethod
    def from_function(cls, grid, func):
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(func(grid), dtype=float))

    @classmethod
    def uniform(cls, half_length, node_count, func_or_values):
        grid = np.linspace(-half_length, half_length, node_count)
        if callable(func_or_values):
            return cls(grid, np.asarray(func_or_values(grid), dtype=float))
        values = np.asarray(func_or_values, dtype=float)
        if values.ndim == 0:
            values = np.full(node_count, float(values))
        return cls(grid, values)

    def with_values(self, u):
        return RadialProfile(self.grid, u)

    @property
    def node_count(self):
        return self.grid.size

    @cached_property
    def du(self):
        return first_derivative(self.grid, self.u)

    @cached_property
    def d2u(self):
        return second_derivative(self.grid, self.u)


@dataclass(frozen=True)
class WEigenField:
    """Per-node eigenvalues of W[u], rows ascending; optional cone flags."""

    eigs: np.ndarray
    axis: np.ndarray
    sphere: np.ndarray
    in_gamma_t: np.ndarray | None = None


def radial_w_eigenvalues(n, du, d2u):
    """(axis, sphere) eigenvalue pair of W[u] for a radial profile.

    axis = u'' - (1 - u'^2)/2 appears once; sphere = (1 - u'^2)/2 appears
    n - 1 times.
    """
    sphere = 0.5 * (1.0 - du ** 2)
    axis = d2u - sphere
    return axis, sphere


def w_eigen_radial(geom, profile, spec=None, t=None):
    """Eigenvalue field of W[u] for a radial profile on the cylinder."""
    tol = 1e-12 * max(1.0, geom.half_length)
    if profile.grid[0] < -geom.half_length - tol or profile.grid[-1] > geom.half_length + tol:
        raise ValueError("profile grid exceeds the cylinder")
    axis, sphere = radial_w_eigenvalues(geom.n, profile.du, profile.d2u)
    eigs = np.concatenate(
        [axis[:, None], np.repeat(sphere[:, None], geom.n - 1, axis=1)], axis=1
    )
    eigs = np.sort(eigs, axis=1)
    flags = None
    if spec is not None and t is not None:
        flags = spec.margin_scores_t(t, eigs) > spec.margin
    return WEigenField(eigs=eigs, axis=axis, sphere=sphere, in_gamma_t=flags)


def conformal_schouten(du, hess, base):
    """Curvature tensor of e^(-2u) g from first and second derivatives of u.

    All inputs are expressed in a g-orthonormal frame: du is the gradient
    vector, hess the covariant Hessian and base the curvature tensor of g.
    """
    du = np.asarray(du, dtype=float)
    hess = np.asarray(hess, dtype=float)
    base = np.asarray(base, dtype=float)
    n = du.size
    return hess + np.outer(du, du) - 0.5 * float(du @ du) * np.eye(n) + base
