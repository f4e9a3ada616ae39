"""Reusable problem constructions for experiments, the CLI and the test suite.

Three families cover the interesting regimes:

* a subsolution-anchored benchmark where psi is a fixed fraction of the
  curvature function of a strictly convex profile, so the profile is a strict
  subsolution and the continuation stays tame up to t close to 1;
* manufactured problems whose exact solution is known in closed form, for
  convergence studies (psi is built per t so the same profile solves every
  member of the family);
* the boundary data of the explicit non-smooth construction, where sup|u''|
  is expected to scale like 1/(1-t) along the continuation.
"""

from __future__ import annotations

import math

import numpy as np

from .example1 import ExampleParams, solve_profile
from .geometry import CylinderGeometry, RadialProfile, radial_w_eigenvalues
from .solver import DirichletProblem
from .symfun import SymFuncSpec

__all__ = [
    "cosh_profile",
    "linear_profile",
    "constant_profile",
    "radial_curvature_value",
    "subsolution_benchmark",
    "manufactured_problem",
    "example_boundary_problem",
]


def cosh_profile(amplitude, offset=0.0):
    """u(x) = amplitude cosh(x) + offset with its exact derivatives."""
    return (
        lambda x: amplitude * np.cosh(x) + offset,
        lambda x: amplitude * np.sinh(x),
        lambda x: amplitude * np.cosh(x),
    )


def linear_profile(slope, offset=0.0):
    return (
        lambda x: slope * np.asarray(x, dtype=float) + offset,
        lambda x: np.full_like(np.asarray(x, dtype=float), slope),
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    )


def constant_profile(value):
    return (
        lambda x: np.full_like(np.asarray(x, dtype=float), value),
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    )


def radial_curvature_value(spec, t, du, d2u):
    """f_t of the radial eigenvalues built from pointwise derivative values."""
    du = np.atleast_1d(np.asarray(du, dtype=float))
    d2u = np.atleast_1d(np.asarray(d2u, dtype=float))
    axis, sphere = radial_w_eigenvalues(spec.n, du, d2u)
    rows = np.concatenate(
        [axis[:, None], np.repeat(sphere[:, None], spec.n - 1, axis=1)], axis=1
    )
    return spec.value_t_many(t, rows)


def subsolution_benchmark(n=4, k=2, half_length=1.0, node_count=401,
                          amplitude=0.3, theta=0.5):
    """Problem with psi = theta * f(W[underline u]) for a convex profile.

    The profile is then a strict subsolution with margin (1-theta) f, and the
    boundary data match it.  psi is independent of z, built from the analytic
    derivatives of the profile with linear interpolation in x.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    geom = CylinderGeometry(n=n, half_length=half_length)
    spec = SymFuncSpec("sigma_k_root", n=n, k=k)
    f, df, d2f = cosh_profile(amplitude)
    dense = np.linspace(-half_length, half_length, 4001)
    f_values = theta * radial_curvature_value(spec, 1.0, df(dense), d2f(dense))

    def psi(x, z):
        return np.interp(np.asarray(x, dtype=float), dense, f_values) * np.ones_like(np.asarray(z, dtype=float))

    def psi_z(x, z):
        return np.zeros_like(np.asarray(x, dtype=float) * np.asarray(z, dtype=float))

    grid = np.linspace(-half_length, half_length, node_count)
    sub = RadialProfile(grid, f(grid))
    phi = float(f(np.array([half_length]))[0]) if np.ndim(f(half_length)) else float(f(half_length))
    return DirichletProblem(
        geom=geom, spec=spec, psi=psi, psi_z=psi_z,
        phi_left=phi, phi_right=phi, subsolution=sub,
    )


def manufactured_problem(t, n=4, k=2, half_length=1.0, node_count=401,
                         amplitude=0.3):
    """Problem whose continuum solution at parameter t is the cosh profile.

    psi(x) = f_t of the exact radial eigenvalues of the profile, so the
    discrete solution differs from the profile only by the stencil error.
    Returns (problem, exact profile on the grid).
    """
    geom = CylinderGeometry(n=n, half_length=half_length)
    spec = SymFuncSpec("sigma_k_root", n=n, k=k)
    f, df, d2f = cosh_profile(amplitude)

    def psi(x, z):
        x = np.asarray(x, dtype=float)
        vals = radial_curvature_value(spec, t, df(x).ravel(), d2f(x).ravel())
        return vals.reshape(x.shape) * np.ones_like(np.asarray(z, dtype=float))

    def psi_z(x, z):
        return np.zeros_like(np.asarray(x, dtype=float) * np.asarray(z, dtype=float))

    grid = np.linspace(-half_length, half_length, node_count)
    exact = RadialProfile(grid, f(grid))
    phi = float(amplitude * math.cosh(half_length))
    problem = DirichletProblem(
        geom=geom, spec=spec, psi=psi, psi_z=psi_z,
        phi_left=phi, phi_right=phi,
    )
    return problem, exact


def example_boundary_problem(n, k, c, node_count=401):
    """Dirichlet data of the explicit non-smooth solution.

    psi(x, z) = (n/(k 2^k) C(n-1,k-1))^(1/k) e^(-2z), phi = c, and the half
    length is the blow-up time of the closed-form construction.  Returns
    (problem, params, init profile); the init is the exact t = 1 profile
    sampled on the grid, which lies inside every interpolated cone.
    """
    params = ExampleParams.from_c(n, k, c)
    solution = solve_profile(params, node_count=node_count)
    geom = CylinderGeometry(n=n, half_length=solution.t_max)
    spec = SymFuncSpec("sigma_k_root", n=n, k=k)
    root = params.rhs_root

    def psi(x, z):
        return root * np.exp(-2.0 * np.asarray(z, dtype=float)) \
            * np.ones_like(np.asarray(x, dtype=float))

    def psi_z(x, z):
        return -2.0 * root * np.exp(-2.0 * np.asarray(z, dtype=float)) \
            * np.ones_like(np.asarray(x, dtype=float))

    problem = DirichletProblem(
        geom=geom, spec=spec, psi=psi, psi_z=psi_z,
        phi_left=c, phi_right=c,
    )
    return problem, params, solution.profile
