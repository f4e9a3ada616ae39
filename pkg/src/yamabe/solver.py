"""Damped Newton solver with continuation in t for the radial Dirichlet problem.

The unknown is a radial profile u on [-L, L]; the discrete system is

    G_i(u) = f_t(eigenvalues of W[u](x_i)) - psi(x_i, u_i)   at interior nodes,
    G_0(u) = u_0 - phi_left,   G_{m-1}(u) = u_{m-1} - phi_right,

with the eigenvalues coming from the two radial expressions (axis and sphere
directions), so each interior row couples only to the three-point stencil and
the Jacobian is tridiagonal.  The Jacobian is assembled analytically through
the chain rule in (u_i, u'_i, u''_i); a finite-difference spot check guards it
on every run.

Continuation walks an ascending t schedule, warm-starting each solve from the
previous profile, and records per-t monitors: sup norms of u and its first
two differences, the residual norm, a distance-like cone margin and the
Newton iteration count.  Divergence of sup|u''| as t approaches 1 is expected
behavior for boundary data without a smooth subsolution, so nonconvergence is
reported rather than retried.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from ._errors import (
    ConeViolationError,
    ContinuationError,
    NonconvergenceError,
    NumericalError,
    StepFailureError,
)
from .geometry import RadialProfile, radial_w_eigenvalues

__all__ = [
    "DirichletProblem",
    "NewtonOptions",
    "ContinuationState",
    "ContinuationReport",
    "SubsolutionReport",
    "DEFAULT_T_SCHEDULE",
    "residual",
    "jacobian",
    "newton_solve",
    "continuation_run",
    "check_subsolution",
    "estimate_monitors",
]

DEFAULT_T_SCHEDULE = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.975, 0.99)
T_MAX = 0.999


@dataclass(frozen=True)
class DirichletProblem:
    """Problem data for the radial Dirichlet boundary value problem.

    psi(x, z) > 0 with psi_z <= 0 is the prescribed right-hand side; both
    callables must accept numpy arrays in x and z.  The optional subsolution
    profile must match the boundary values exactly (to 1e-12); it doubles as
    the default continuation start.  z_range bounds the sampling window used
    to validate psi.
    """

    geom: object
    spec: object
    psi: object
    psi_z: object
    phi_left: float
    phi_right: float
    subsolution: RadialProfile | None = None
    z_range: tuple | None = None

    def __post_init__(self):
        if self.geom.n != self.spec.n:
            raise ValueError("geometry and symmetric function disagree on the dimension")
        zr = self.z_range
        if zr is None:
            zs = [self.phi_left, self.phi_right]
            if self.subsolution is not None:
                zs += [float(self.subsolution.u.min()), float(self.subsolution.u.max())]
            zr = (min(zs) - 2.0, max(zs) + 2.0)
            object.__setattr__(self, "z_range", zr)
        xs = np.linspace(-self.geom.half_length, self.geom.half_length, 41)
        zs = np.linspace(zr[0], zr[1], 21)
        xx, zz = np.meshgrid(xs, zs)
        if not np.all(np.asarray(self.psi(xx, zz)) > 0.0):
            raise ValueError("psi must be positive on the working range")
        if not np.all(np.asarray(self.psi_z(xx, zz)) <= 1e-10):
            raise ValueError("psi_z must be nonpositive on the working range")
        dz = 1e-6 * max(1.0, abs(zr[0]), abs(zr[1]))
        sampled = (np.asarray(self.psi(xx, zz + dz)) - np.asarray(self.psi(xx, zz - dz))) / (2 * dz)
        if not np.all(sampled <= 1e-10):
            raise ValueError("sampled z-derivative of psi contradicts the declared psi_z")
        if self.subsolution is not None:
            sub = self.subsolution
            if sub.grid[0] != -self.geom.half_length or sub.grid[-1] != self.geom.half_length:
                raise ValueError("subsolution grid must span exactly [-L, L]")
            if abs(sub.u[0] - self.phi_left) > 1e-12 or abs(sub.u[-1] - self.phi_right) > 1e-12:
                raise ValueError("subsolution must match the boundary values")


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-10
    max_iter: int = 50
    max_backtracks: int = 50
    jacobian_check: bool = True
    jacobian_check_tol: float = 1e-6
    record_increments: bool = False


@dataclass(frozen=True)
class ContinuationState:
    """One converged (or best-effort) solve at a fixed t."""

    t: float
    profile: RadialProfile
    residual_norm: float
    monitors: tuple          # (sup|u|, sup|u'|, sup|u''|)
    cone_margin: float
    newton_iters: int
    converged: bool
    increment_norms: tuple | None = None


def estimate_monitors(profile):
    """Sup norms of the grid function and its stencil derivatives."""
    return (
        float(np.abs(profile.u).max()),
        float(np.abs(profile.du).max()),
        float(np.abs(profile.d2u).max()),
    )


def _grid_for(problem, profile):
    ell = problem.geom.half_length
    if profile.grid[0] != -ell or profile.grid[-1] != ell:
        raise ValueError("profile grid must span exactly [-L, L]")
    return profile.grid


def _interior_eigen_rows(problem, profile):
    """Unsorted per-node eigenvalue rows (axis, sphere x (n-1)) at interior nodes."""
    axis, sphere = radial_w_eigenvalues(problem.geom.n, profile.du, profile.d2u)
    n = problem.geom.n
    rows = np.concatenate(
        [axis[1:-1, None], np.repeat(sphere[1:-1, None], n - 1, axis=1)], axis=1
    )
    return rows


def _interior_margins(problem, t, profile):
    return problem.spec.margin_scores_t(t, _interior_eigen_rows(problem, profile))


def residual(problem, t, profile):
    """Per-node residual vector; raises when a node leaves the cone."""
    grid = _grid_for(problem, profile)
    rows = _interior_eigen_rows(problem, profile)
    scores = problem.spec.margin_scores_t(t, rows)
    bad = np.nonzero(scores <= problem.spec.margin)[0]
    if bad.size:
        node = int(bad[0]) + 1
        raise ConeViolationError(
            f"eigenvalues at node {node} (x={grid[node]:.6g}) left the cone "
            f"(margin score {scores[bad[0]]:.3e})",
            node=node,
        )
    out = np.empty(grid.size)
    out[0] = profile.u[0] - problem.phi_left
    out[-1] = profile.u[-1] - problem.phi_right
    out[1:-1] = problem.spec.value_t_many(t, rows) \
        - np.asarray(problem.psi(grid[1:-1], profile.u[1:-1]), dtype=float)
    return out


def jacobian(problem, t, profile):
    """Tridiagonal Jacobian in banded (3, m) storage (solve_banded layout).

    Interior rows follow from the chain rule: with a = axis eigenvalue,
    s = sphere eigenvalue, da/du'' = 1, da/du' = u', ds/du' = -u', so

        dG_i/du_j = g_a c2_ij + (g_a - g_s) u'_i c1_ij - psi_z delta_ij,

    where g_a is the f_t gradient in the axis slot and g_s the summed sphere
    slots.  Boundary rows are identity rows.
    """
    grid = _grid_for(problem, profile)
    m = grid.size
    rows = _interior_eigen_rows(problem, profile)
    g = problem.spec.grad_t_many(t, rows)
    g_axis = g[:, 0]
    g_sphere = g[:, 1:].sum(axis=1)
    du = profile.du[1:-1]
    psi_z = np.asarray(problem.psi_z(grid[1:-1], profile.u[1:-1]), dtype=float)

    h1 = grid[1:-1] - grid[:-2]
    h2 = grid[2:] - grid[1:-1]
    c1 = np.stack([-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))], axis=1)
    c2 = np.stack([2.0 / (h1 * (h1 + h2)), -2.0 / (h1 * h2), 2.0 / (h2 * (h1 + h2))], axis=1)

    coeff = (g_axis - g_sphere) * du
    lower = g_axis * c2[:, 0] + coeff * c1[:, 0]
    diag = g_axis * c2[:, 1] + coeff * c1[:, 1] - psi_z
    upper = g_axis * c2[:, 2] + coeff * c1[:, 2]

    ab = np.zeros((3, m))
    ab[1, 0] = 1.0
    ab[1, -1] = 1.0
    ab[1, 1:-1] = diag
    ab[0, 2:] = upper          # ab[0, j] holds A[j-1, j]
    ab[2, :-2] = lower         # ab[2, j] holds A[j+1, j]
    return ab


def banded_to_dense(ab):
    """Expand the (3, m) banded storage to a dense matrix (test helper)."""
    m = ab.shape[1]
    dense = np.zeros((m, m))
    dense[np.arange(m), np.arange(m)] = ab[1]
    dense[np.arange(m - 1), np.arange(1, m)] = ab[0, 1:]
    dense[np.arange(1, m), np.arange(m - 1)] = ab[2, :-1]
    return dense


def _fd_residual_column(problem, t, profile, j, step):
    m = profile.grid.size
    step = (profile.u[j] + step) - profile.u[j]  # exactly representable
    bump = np.zeros(m)
    bump[j] = step
    plus = residual(problem, t, profile.with_values(profile.u + bump))
    minus = residual(problem, t, profile.with_values(profile.u - bump))
    return (plus - minus) / (2 * step)


def fd_jacobian_column(problem, t, profile, j):
    """Richardson-extrapolated finite-difference column of the residual.

    The base step scales with the local spacing squared (residual entries
    carry a 1/h^2 stencil factor) and with the cone margin of the touched
    nodes: near the cone boundary the curvature of f_t in the eigenvalues
    grows without bound and the eigenvalue perturbation must stay well below
    the remaining distance.
    """
    h_loc = min(profile.grid[j] - profile.grid[j - 1], profile.grid[j + 1] - profile.grid[j])
    margins = _interior_margins(problem, t, profile)
    lo = max(j - 2, 0)
    local = float(margins[lo:j + 1].min()) if margins[lo:j + 1].size else float(margins.min())
    shrink = min(1.0, max(local, 1e-6) / 0.1)
    step = 1e-4 * h_loc ** 2 * (1.0 + abs(profile.u[j])) * shrink
    for _ in range(8):
        try:
            coarse = _fd_residual_column(problem, t, profile, j, step)
            fine = _fd_residual_column(problem, t, profile, j, 0.5 * step)
            return (4.0 * fine - coarse) / 3.0
        except ConeViolationError:
            step *= 0.1
    raise NumericalError(f"could not finite-difference column {j} inside the cone")


def _spot_check_jacobian(problem, t, profile, ab, tol):
    """Guard the analytic Jacobian against a finite-difference reference.

    The reference itself loses accuracy on fine grids: second differences of
    u carry a cancellation noise of order eps/h^2, which bounds any residual
    finite difference by ~(eps * 2/h^2)^(2/3) relative.  The effective
    tolerance never drops below that attainable accuracy; on the default
    grids it equals the requested one.
    """
    m = profile.grid.size
    dense = banded_to_dense(ab)
    for j in (m // 2, m // 4):
        h_loc = min(profile.grid[j] - profile.grid[j - 1], profile.grid[j + 1] - profile.grid[j])
        attainable = (np.finfo(float).eps * (1.0 + abs(profile.u[j])) * 2.0 / h_loc ** 2) ** (2.0 / 3.0)
        tol_eff = max(tol, 4.0 * attainable)
        col = fd_jacobian_column(problem, t, profile, j)
        scale = max(np.abs(col).max(), 1.0)
        err = np.abs(col - dense[:, j]).max() / scale
        if err > tol_eff:
            raise NumericalError(
                f"analytic Jacobian column {j} deviates from finite differences "
                f"by {err:.3e} (tolerance {tol_eff:.1e})"
            )


def _state_from(problem, t, profile, res_norm, iters, converged, increments=None):
    margins = _interior_margins(problem, t, profile)
    return ContinuationState(
        t=t,
        profile=profile,
        residual_norm=float(res_norm),
        monitors=estimate_monitors(profile),
        cone_margin=float(margins.min()),
        newton_iters=iters,
        converged=converged,
        increment_norms=tuple(increments) if increments is not None else None,
    )


def newton_solve(problem, t, init, opts=None):
    """Damped Newton iteration at fixed t.

    A trial step is accepted only when every interior node keeps a positive
    cone margin and the residual sup norm decreases; the step is halved up to
    max_backtracks times otherwise.  Raises StepFailureError when no damped
    step is acceptable and NonconvergenceError when the iteration budget runs
    out; both carry the best state reached.
    """
    opts = opts or NewtonOptions()
    grid = _grid_for(problem, init)
    margins = _interior_margins(problem, t, init)
    if margins.min() <= problem.spec.margin:
        node = int(np.argmin(margins)) + 1
        raise ConeViolationError(
            f"initial profile violates the cone at node {node}", node=node
        )
    profile = init
    res = residual(problem, t, profile)
    norm = float(np.abs(res).max())
    increments = [] if opts.record_increments else None
    if norm <= opts.tol:
        return _state_from(problem, t, profile, norm, 0, True, increments)

    checked = not opts.jacobian_check
    for iteration in range(1, opts.max_iter + 1):
        ab = jacobian(problem, t, profile)
        if not checked:
            _spot_check_jacobian(problem, t, profile, ab, opts.jacobian_check_tol)
            checked = True
        try:
            delta = solve_banded((1, 1), ab, -res)
        except np.linalg.LinAlgError as exc:
            raise StepFailureError(
                f"singular Jacobian at t={t}",
                state=_state_from(problem, t, profile, norm, iteration - 1, False, increments),
            ) from exc

        alpha = 1.0
        for _ in range(opts.max_backtracks + 1):
            trial = profile.with_values(profile.u + alpha * delta)
            trial_margins = _interior_margins(problem, t, trial)
            if trial_margins.min() > problem.spec.margin:
                trial_res = residual(problem, t, trial)
                trial_norm = float(np.abs(trial_res).max())
                if trial_norm < norm or trial_norm <= opts.tol:
                    break
            alpha *= 0.5
        else:
            raise StepFailureError(
                f"no acceptable damped step at t={t} (residual {norm:.3e})",
                state=_state_from(problem, t, profile, norm, iteration - 1, False, increments),
            )

        if increments is not None:
            increments.append(float(alpha * np.abs(delta).max()))
        profile, res, norm = trial, trial_res, trial_norm
        if norm <= opts.tol:
            return _state_from(problem, t, profile, norm, iteration, True, increments)

    raise NonconvergenceError(
        f"Newton did not reach tol={opts.tol:.1e} in {opts.max_iter} iterations "
        f"at t={t} (residual {norm:.3e})",
        state=_state_from(problem, t, profile, norm, opts.max_iter, False, increments),
    )


@dataclass
class ContinuationReport:
    """Converged states of a continuation run plus derived summaries."""

    states: list

    def monitor_table(self):
        """Rows (t, sup|u|, sup|u'|, sup|u''|, residual, cone margin, iters)."""
        return np.array([
            (s.t, *s.monitors, s.residual_norm, s.cone_margin, s.newton_iters)
            for s in self.states
        ])

    def monitor_growth(self):
        """Max over the schedule of each monitor relative to its first value.

        This is the boundedness statement the continuation is expected to
        exhibit when a subsolution anchors it: monitors may relax, but none
        may grow beyond a modest factor of where the schedule started.
        """
        table = np.array([s.monitors for s in self.states])
        first = table[0]
        growth = []
        for col, base in zip(table.T, first):
            if base > 1e-14:
                growth.append(float(col.max() / base))
            else:
                growth.append(1.0 if col.max() <= 1e-14 else math.inf)
        return tuple(growth)

    def monitor_spread(self):
        """Max/min ratio of each monitor across the schedule (informational)."""
        table = np.array([s.monitors for s in self.states])
        factors = []
        for col in table.T:
            lo, hi = col.min(), col.max()
            factors.append(float(hi / lo) if lo > 1e-14 else (1.0 if hi <= 1e-14 else math.inf))
        return tuple(factors)

    def uniform_within(self, factor):
        return all(f <= factor for f in self.monitor_growth())

    def curvature_scaled(self):
        """(1 - t) * sup|u''| per state, the quantity expected to stay banded."""
        return [(s.t, (1.0 - s.t) * s.monitors[2]) for s in self.states]


def _restore_feasibility(problem, t, profile, anchor):
    """Blend a warm start towards the anchor until it re-enters the cone.

    The cones shrink as t grows, so the converged profile of the previous t
    can sit slightly outside the next cone.  The anchor (subsolution or the
    run's start profile) lies in the t = 1 cone with a real margin, hence in
    every interpolated cone; the smallest blend restoring a positive margin
    wins.
    """
    if _interior_margins(problem, t, profile).min() > problem.spec.margin:
        return profile
    if anchor is None:
        return profile
    ladder = (1e-3, 3e-3, 0.01, 0.03, 0.1, 0.2, 0.4, 0.7, 1.0)
    for i, theta in enumerate(ladder):
        blend = profile.with_values((1.0 - theta) * profile.u + theta * anchor.u)
        if _interior_margins(problem, t, blend).min() > problem.spec.margin:
            # take one more rung for headroom; the blend at the first feasible
            # theta can sit arbitrarily close to the cone boundary
            for theta2 in ladder[i + 1:i + 2]:
                blend2 = profile.with_values((1.0 - theta2) * profile.u + theta2 * anchor.u)
                if _interior_margins(problem, t, blend2).min() > problem.spec.margin:
                    return blend2
            return blend
    return profile


def continuation_run(problem, t_schedule=None, opts=None, init=None):
    """Solve along an ascending t schedule with warm starts.

    The start profile is the explicit init when given, else the problem's
    subsolution.  Warm starts that fall outside the shrunken cone of the next
    t are pulled back by blending towards the subsolution (or the start
    profile).  Failures surface as ContinuationError carrying the failing t
    and the states collected so far.
    """
    schedule = tuple(DEFAULT_T_SCHEDULE if t_schedule is None else t_schedule)
    if not schedule:
        raise ValueError("empty t schedule")
    arr = np.asarray(schedule, dtype=float)
    if np.any(np.diff(arr) <= 0):
        raise ValueError("t schedule must be strictly ascending")
    if arr[0] < 0.0 or arr[-1] > T_MAX:
        raise ValueError(f"t schedule must stay within [0, {T_MAX}]")
    current = init if init is not None else problem.subsolution
    if current is None:
        raise ValueError("continuation needs a subsolution or an explicit init profile")
    anchor = problem.subsolution if problem.subsolution is not None else current

    states = []
    for t in arr:
        try:
            start = _restore_feasibility(problem, float(t), current, anchor)
            state = newton_solve(problem, float(t), start, opts)
        except (NonconvergenceError, StepFailureError, ConeViolationError) as exc:
            raise ContinuationError(
                f"continuation failed at t={float(t)}: {exc}",
                t_failed=float(t), states=states, cause=exc,
            ) from exc
        states.append(state)
        current = state.profile
    return ContinuationReport(states=states)


@dataclass
class SubsolutionReport:
    """Nodewise margins of the subsolution inequality f(W[u]) >= psi."""

    margins: np.ndarray          # NaN where the cone is violated
    min_margin: float
    min_cone_margin: float
    cone_violations: tuple
    boundary_ok: bool

    @property
    def passed(self):
        return (
            not self.cone_violations
            and self.boundary_ok
            and self.min_margin >= -1e-10
        )


def check_subsolution(problem):
    """Validate the stored subsolution against the t = 1 inequality."""
    sub = problem.subsolution
    if sub is None:
        raise ValueError("the problem has no subsolution to check")
    grid = _grid_for(problem, sub)
    n = problem.geom.n
    axis, sphere = radial_w_eigenvalues(n, sub.du, sub.d2u)
    rows = np.concatenate([axis[:, None], np.repeat(sphere[:, None], n - 1, axis=1)], axis=1)
    scores = problem.spec.margin_scores(rows)
    ok = scores > problem.spec.margin
    margins = np.full(grid.size, np.nan)
    if np.any(ok):
        margins[ok] = problem.spec.value_many(rows[ok]) \
            - np.asarray(problem.psi(grid[ok], sub.u[ok]), dtype=float)
    boundary_ok = (abs(sub.u[0] - problem.phi_left) <= 1e-12
                   and abs(sub.u[-1] - problem.phi_right) <= 1e-12)
    finite = margins[np.isfinite(margins)]
    return SubsolutionReport(
        margins=margins,
        min_margin=float(finite.min()) if finite.size else math.nan,
        min_cone_margin=float(scores.min()),
        cone_violations=tuple(int(i) for i in np.nonzero(~ok)[0]),
        boundary_ok=bool(boundary_ok),
    )
