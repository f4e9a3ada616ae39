"""Symmetric concave functions on Garding cones and their interpolation family.

The building blocks are the elementary symmetric polynomials

    sigma_j(lam) = sum over all j-element subsets of products of the entries,

the cones Gamma_k = {lam in R^n : sigma_j(lam) > 0 for all j <= k}, and two
classical degree-one concave families defined on Gamma_k:

* ``sigma_k_root``   f(lam) = sigma_k(lam)^(1/k),
* ``quotient``       f(lam) = (sigma_k(lam)/sigma_l(lam))^(1/(k-l)), l < k.

For t in [0, 1] the interpolated family

    f_t(lam)  = f(t*lam + (1-t)*sigma_1(lam)*e),   e = (1, ..., 1),
    Gamma_t   = {lam : t*lam + (1-t)*sigma_1(lam)*e in Gamma},

connects the semilinear trace equation (t = 0, where f_0 = sigma_1 * f(e)) to
the fully nonlinear one (t = 1).  Everything here is a pure function of its
inputs; the spec objects are frozen and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._errors import ConeDomainError, NumericalError, UnsupportedOperationError

__all__ = [
    "EigenTuple",
    "SymFuncSpec",
    "BrokenHomogeneitySpec",
    "ProjectedCone",
    "Classification",
    "CheckResult",
    "StructureReport",
    "BallInclusionReport",
    "SeparationReport",
    "sigma",
    "sigma_gradient",
    "matrix_value_and_derivative",
    "classify_type",
    "f_infinity",
    "concavity_margin",
    "concavity_margin_suite",
    "interpolation_ball_report",
    "verify_structure",
    "sample_cone",
]


# ---------------------------------------------------------------------------
# elementary symmetric polynomials
# ---------------------------------------------------------------------------

def _as_batch(lam):
    """Return (values as an (m, n) array, was_single_vector)."""
    v = np.asarray(getattr(lam, "values", lam), dtype=float)
    if v.ndim == 1:
        return v[None, :], True
    if v.ndim != 2:
        raise ValueError(f"expected a vector or a stack of vectors, got shape {v.shape}")
    return v, False


def _esp(values, kmax):
    """All elementary symmetric polynomials e_0..e_kmax, batched.

    values: (m, n); returns (m, kmax + 1).  Uses the standard one-pass
    recurrence e_j <- e_j + x * e_{j-1}, which is exact in exact arithmetic
    and stable for the small n used here.
    """
    m, n = values.shape
    out = np.zeros((m, kmax + 1))
    out[:, 0] = 1.0
    for col in range(n):
        x = values[:, col:col + 1]
        out[:, 1:] = out[:, 1:] + x * out[:, :-1]
    return out


def _esp_gradient(values, j):
    """Gradient of sigma_j: entry i is e_{j-1} of the tuple with entry i removed."""
    m, n = values.shape
    if j == 0:
        return np.zeros((m, n))
    grad = np.empty((m, n))
    for i in range(n):
        reduced = np.delete(values, i, axis=1)
        grad[:, i] = _esp(reduced, j - 1)[:, j - 1]
    return grad


def sigma(lam, k):
    """k-th elementary symmetric polynomial of the entries of lam (sigma_0 = 1)."""
    v, _ = _as_batch(lam)
    n = v.shape[1]
    if not 0 <= k <= n:
        raise ValueError(f"order k={k} out of range for n={n}")
    return float(_esp(v, k)[0, k])


def sigma_gradient(lam, k):
    """Gradient of sigma_k with respect to the entries of lam."""
    v, _ = _as_batch(lam)
    n = v.shape[1]
    if not 1 <= k <= n:
        raise ValueError(f"order k={k} out of range for n={n}")
    return _esp_gradient(v, k)[0]


# ---------------------------------------------------------------------------
# eigenvalue tuples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenTuple:
    """An ascending tuple of n >= 3 real eigenvalues."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(x) for x in self.values)
        if len(vals) < 3:
            raise ValueError("eigenvalue tuples need at least 3 entries")
        if any(a > b for a, b in zip(vals, vals[1:])):
            raise ValueError("eigenvalues must be ascending; use EigenTuple.of to sort")
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, values):
        return cls(tuple(sorted(float(x) for x in values)))

    @property
    def n(self):
        return len(self.values)

    def array(self):
        return np.array(self.values)


# ---------------------------------------------------------------------------
# the interpolation family shared by all cone-function specs
# ---------------------------------------------------------------------------

class _InterpolationFamily:
    """Mixin deriving the t-family from value/grad/margin of the base pair.

    Requires the host to provide n, margin, value_many, grad_many and
    margin_scores.
    """

    def interpolate(self, t, lam):
        v, single = self._validated(lam)
        m = t * v + (1.0 - t) * v.sum(axis=1, keepdims=True)
        return m[0] if single else m

    def _validated(self, lam):
        v, single = _as_batch(lam)
        if v.shape[1] != self.n:
            raise ValueError(f"expected tuples of length {self.n}, got {v.shape[1]}")
        return v, single

    # -- membership -------------------------------------------------------

    def contains(self, lam, margin=None):
        v, _ = self._validated(lam)
        tol = self.margin if margin is None else margin
        return bool(self.margin_scores(v)[0] > tol)

    def in_cone_t(self, t, lam, margin=None):
        v, _ = self._validated(lam)
        tol = self.margin if margin is None else margin
        return bool(self.margin_scores_t(t, v)[0] > tol)

    def margin_score(self, lam):
        v, _ = self._validated(lam)
        return float(self.margin_scores(v)[0])

    def margin_scores_t(self, t, lam):
        v, _ = self._validated(lam)
        m = t * v + (1.0 - t) * v.sum(axis=1, keepdims=True)
        return self.margin_scores(m)

    # -- values and derivatives --------------------------------------------

    def value(self, lam):
        v, _ = self._validated(lam)
        return float(self.value_many(v)[0])

    def grad(self, lam):
        v, _ = self._validated(lam)
        return self.grad_many(v)[0]

    def value_t(self, t, lam):
        v, _ = self._validated(lam)
        return float(self.value_t_many(t, v)[0])

    def value_t_many(self, t, lam):
        v, _ = self._validated(lam)
        m = t * v + (1.0 - t) * v.sum(axis=1, keepdims=True)
        return self.value_many(m)

    def grad_t(self, t, lam):
        v, _ = self._validated(lam)
        return self.grad_t_many(t, v)[0]

    def grad_t_many(self, t, lam):
        """Chain rule through lam -> t*lam + (1-t)*sigma_1(lam)*e."""
        v, _ = self._validated(lam)
        m = t * v + (1.0 - t) * v.sum(axis=1, keepdims=True)
        g = self.grad_many(m)
        return t * g + (1.0 - t) * g.sum(axis=1, keepdims=True)

    def normal(self, t, lam):
        """Unit normal Df_t/|Df_t| of the level set through lam."""
        g = self.grad_t(t, lam)
        return g / np.linalg.norm(g)


# ---------------------------------------------------------------------------
# the two classical families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymFuncSpec(_InterpolationFamily):
    """A concrete (f, Gamma_k) pair.

    kind is "sigma_k_root" (f = sigma_k^(1/k)) or "quotient"
    (f = (sigma_k/sigma_l)^(1/(k-l)) with 1 <= l < k).  Both live on Gamma_k.
    Membership uses a relative strictness margin: lam is accepted when
    sigma_j(lam) > margin * sigma_j(|lam|) for every j <= k.  The comparison
    scale sigma_j of the absolute values bounds the attainable magnitude of
    sigma_j tightly even for very anisotropic tuples, keeps the test scale
    invariant and avoids boundary flapping inside line searches.
    """

    kind: str
    n: int
    k: int
    l: int | None = None
    margin: float = 1e-12

    def __post_init__(self):
        if self.kind not in ("sigma_k_root", "quotient"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.n < 3:
            raise ValueError("dimension must be at least 3")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k={self.k} out of range for n={self.n}")
        if self.kind == "quotient":
            if self.l is None or not 1 <= self.l < self.k:
                raise ValueError("quotient requires 1 <= l < k")
        elif self.l is not None:
            raise ValueError("l is only meaningful for the quotient kind")
        if not 0 <= self.margin < 1e-3:
            raise ValueError("margin must be a small nonnegative number")

    @property
    def label(self):
        if self.kind == "sigma_k_root":
            return f"sigma_{self.k}_root(n={self.n})"
        return f"quotient({self.k},{self.l})(n={self.n})"

    def f_at_ones(self):
        """f(e); equals C(n,k)^(1/k) for roots, (C(n,k)/C(n,l))^(1/(k-l)) for quotients."""
        if self.kind == "sigma_k_root":
            return math.comb(self.n, self.k) ** (1.0 / self.k)
        ratio = math.comb(self.n, self.k) / math.comb(self.n, self.l)
        return ratio ** (1.0 / (self.k - self.l))

    # -- membership scores ---------------------------------------------------

    def margin_scores(self, values):
        """min over j <= k of sigma_j(lam) / sigma_j(|lam|), per row.

        Zero rows score -inf (the origin is not in the open cone); rows where
        some sigma_j(|lam|) vanishes (not enough nonzero entries) score at
        most zero.
        """
        values = np.asarray(values, dtype=float)
        e = _esp(values, self.k)
        scale = _esp(np.abs(values), self.k)
        scores = np.where(np.abs(values).max(axis=1) > 0.0, np.inf, -np.inf)
        tiny = np.finfo(float).tiny
        for j in range(1, self.k + 1):
            scores = np.minimum(scores, e[:, j] / np.maximum(scale[:, j], tiny))
        return scores

    def _require_inside(self, values):
        scores = self.margin_scores(values)
        bad = np.nonzero(scores <= self.margin)[0]
        if bad.size:
            raise ConeDomainError(
                f"{self.label}: tuple outside the cone "
                f"(first offender index {bad[0]}, margin score {scores[bad[0]]:.3e})"
            )

    # -- values ---------------------------------------------------------------

    def value_many(self, values):
        values = np.asarray(values, dtype=float)
        self._require_inside(values)
        e = _esp(values, self.k)
        if self.kind == "sigma_k_root":
            return e[:, self.k] ** (1.0 / self.k)
        return (e[:, self.k] / e[:, self.l]) ** (1.0 / (self.k - self.l))

    def grad_many(self, values):
        values = np.asarray(values, dtype=float)
        self._require_inside(values)
        e = _esp(values, self.k)
        gk = _esp_gradient(values, self.k)
        if self.kind == "sigma_k_root":
            f = e[:, self.k] ** (1.0 / self.k)
            return (f / self.k)[:, None] * gk / e[:, self.k][:, None]
        gl = _esp_gradient(values, self.l)
        f = (e[:, self.k] / e[:, self.l]) ** (1.0 / (self.k - self.l))
        log_grad = gk / e[:, self.k][:, None] - gl / e[:, self.l][:, None]
        return (f / (self.k - self.l))[:, None] * log_grad

    def projected(self):
        return ProjectedCone.from_spec(self)


@dataclass(frozen=True)
class BrokenHomogeneitySpec(_InterpolationFamily):
    """Verification fixture: f = sigma_1^2 on Gamma_1.

    Degree two instead of one, so the homogeneity check of
    :func:`verify_structure` must flag it.  Positivity, monotonicity and the
    cone test are all genuine.
    """

    n: int
    margin: float = 1e-12
    kind: str = field(default="sigma1_squared_broken", init=False)
    k: int = field(default=1, init=False)

    @property
    def label(self):
        return f"sigma1_squared_broken(n={self.n})"

    def f_at_ones(self):
        return float(self.n ** 2)

    def margin_scores(self, values):
        values = np.asarray(values, dtype=float)
        scale = np.abs(values).sum(axis=1)
        s1 = values.sum(axis=1)
        tiny = np.finfo(float).tiny
        return np.where(scale > 0, s1 / np.maximum(scale, tiny), -np.inf)

    def _require_inside(self, values):
        if np.any(self.margin_scores(values) <= self.margin):
            raise ConeDomainError(f"{self.label}: tuple outside the cone")

    def value_many(self, values):
        values = np.asarray(values, dtype=float)
        self._require_inside(values)
        return values.sum(axis=1) ** 2

    def grad_many(self, values):
        values = np.asarray(values, dtype=float)
        self._require_inside(values)
        return 2.0 * values.sum(axis=1)[:, None] * np.ones_like(values)


# ---------------------------------------------------------------------------
# classification: cone type, growth type, growth radius
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    cone_type: int          # 1: positive axes on the cone boundary, 2: inside
    f_type: str             # "bounded" or "unbounded" growth in the last slot
    growth_radius: float | None = None


def classify_type(spec, level=None, compact_sample=None):
    """Classify the cone and the growth type of f, with a numeric cross-check.

    For an unbounded spec, when both a level C and a compact sample of cone
    points are supplied, also returns a shift R such that
    f(lam_1, ..., lam_n + R) >= C for every sampled lam.
    """
    n = spec.n
    axis_probe = np.full(n, -1e-3)
    axis_probe[-1] = 1.0
    cone_type = 2 if spec.contains(axis_probe) else 1
    expected_type = 2 if spec.k == 1 else 1
    if cone_type != expected_type:
        raise NumericalError(f"{spec.label}: cone type probe disagrees with the cone order")

    lam_p = np.ones(n - 1)
    lo = spec.value(np.append(lam_p, 1e3))
    hi = spec.value(np.append(lam_p, 1e6))
    numeric_unbounded = hi / lo > 2.0
    closed_form_unbounded = getattr(spec, "kind", "") != "quotient"
    if numeric_unbounded != closed_form_unbounded:
        raise NumericalError(f"{spec.label}: growth probe disagrees with the closed form")
    f_type = "unbounded" if closed_form_unbounded else "bounded"

    radius = None
    if f_type == "unbounded" and level is not None and compact_sample is not None:
        radius = growth_radius(spec, level, compact_sample)
    return Classification(cone_type=cone_type, f_type=f_type, growth_radius=radius)


def growth_radius(spec, level, sample):
    """Smallest power-of-two shift R with f(lam + R e_n) >= level on the sample."""
    pts = np.asarray(sample, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    spec._require_inside(pts)
    radius = 1.0
    for _ in range(500):
        shifted = pts.copy()
        shifted[:, -1] += radius
        if np.all(spec.value_many(shifted) >= level):
            return radius
        radius *= 2.0
    raise NumericalError("growth radius search did not terminate; is f really unbounded?")


def f_infinity(spec, lam_p):
    """Limit of f(lam', s) as s -> +infinity, for bounded-type (quotient) specs.

    Equals (sigma_{k-1}(lam')/sigma_{l-1}(lam'))^(1/(k-l)) on the projected
    cone, with sigma_0 = 1.
    """
    if getattr(spec, "kind", "") != "quotient":
        raise UnsupportedOperationError(
            "f_infinity is only defined for bounded-type (quotient) functions"
        )
    pc = spec.projected()
    v = np.asarray(getattr(lam_p, "values", lam_p), dtype=float)
    if v.ndim != 1 or v.size != spec.n - 1:
        raise ValueError(f"expected a vector of length {spec.n - 1}")
    if not pc.contains(v):
        raise ConeDomainError("lam' outside the projected cone")
    e = _esp(v[None, :], spec.k - 1)[0]
    num = e[spec.k - 1]
    den = e[spec.l - 1]
    return float((num / den) ** (1.0 / (spec.k - spec.l)))


# ---------------------------------------------------------------------------
# projected cone and distance to its boundary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectedCone:
    """Projection of Gamma_k onto the first n-1 coordinates.

    For k >= 2 this is the order-(k-1) cone in dimension n-1; for k = 1 it is
    all of R^(n-1).  Construction cross-checks the identification against the
    parent cone: (lam', s) must belong to Gamma_k for large s exactly when
    lam' belongs to the stored cone.
    """

    parent: SymFuncSpec
    dim: int
    order: int  # 0 encodes the whole space

    @classmethod
    def from_spec(cls, spec):
        pc = cls(parent=spec, dim=spec.n - 1, order=spec.k - 1)
        pc._oracle_check()
        return pc

    def _oracle_check(self):
        probes = [np.ones(self.dim), np.full(self.dim, -1.0)]
        mid = np.ones(self.dim)
        mid[0] = -0.2
        probes.append(mid)
        s = 1e8
        for p in probes:
            stored = self.contains(p, margin=0.0) if self.order >= 1 else True
            lifted = self.parent.contains(np.append(p, s), margin=0.0)
            if stored != lifted:
                raise NumericalError(
                    "projected cone identification failed the lift oracle"
                )

    # -- membership -----------------------------------------------------------

    def _scores(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[None, :]
        if self.order == 0:
            return np.full(values.shape[0], np.inf)
        e = _esp(values, self.order)
        scale = _esp(np.abs(values), self.order)
        scores = np.where(np.abs(values).max(axis=1) > 0.0, np.inf, -np.inf)
        tiny = np.finfo(float).tiny
        for j in range(1, self.order + 1):
            scores = np.minimum(scores, e[:, j] / np.maximum(scale[:, j], tiny))
        return scores

    def contains(self, lam_p, margin=None):
        tol = self.parent.margin if margin is None else margin
        return bool(self._scores(lam_p)[0] > tol)

    # -- distance ---------------------------------------------------------------

    def distance_to_boundary(self, lam_p):
        return self.nearest_boundary(lam_p)[0]

    def nearest_boundary(self, lam_p):
        """Distance to the cone boundary with a witness pair.

        Returns (distance, boundary point, unit supporting normal); the input
        is rearranged ascending first.  The normal gamma satisfies
        gamma . point = 0 and has nonnegative entries, and gamma . lam' equals
        the distance at the optimum.  For a whole-space projection the
        distance is infinite and no witness exists.
        """
        v = np.sort(np.asarray(getattr(lam_p, "values", lam_p), dtype=float))
        if v.size != self.dim:
            raise ValueError(f"expected a vector of length {self.dim}")
        if self.order == 0:
            return math.inf, None, None
        score = float(self._scores(v)[0])
        if score < -1e-9:
            raise ConeDomainError("lam' outside the closure of the projected cone")
        if score <= self.parent.margin:
            gamma = _esp_gradient(v[None, :], self.order)[0]
            gamma = gamma / np.linalg.norm(gamma)
            return 0.0, v.copy(), gamma
        if self.order == 1:
            # half space sigma_1 > 0: the boundary is a hyperplane
            gamma = np.full(self.dim, 1.0 / math.sqrt(self.dim))
            d = float(v.sum() / math.sqrt(self.dim))
            return d, v - d * gamma, gamma
        return self._distance_by_normal_iteration(v)

    def _strictly_inside(self, x):
        e = _esp(x[None, :], self.order)[0]
        return bool(np.all(e[1:] > 0.0))

    def _ray_exit(self, base, direction):
        """First boundary crossing along base - s * direction, by bisection."""
        scale = max(1.0, float(np.abs(base).max()))
        hi = scale
        for _ in range(200):
            if not self._strictly_inside(base - hi * direction):
                break
            hi *= 2.0
        else:
            raise NumericalError("ray failed to leave the cone")
        lo = 0.0
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            if self._strictly_inside(base - mid * direction):
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * scale:
                break
        s = 0.5 * (lo + hi)
        return s, base - s * direction

    def _distance_by_normal_iteration(self, v):
        # Walk to the boundary along the inward normal of the active level
        # set, re-reading the normal at each foot point.  Each ray length and
        # each supporting value gamma.lam' upper-bounds the distance and the
        # two meet only at the metric projection, so the gap doubles as the
        # stopping test.
        direction = _esp_gradient(v[None, :], self.order)[0]
        direction = direction / np.linalg.norm(direction)
        s, x = self._ray_exit(v, direction)
        best = (s, x, direction)
        for _ in range(80):
            grad = _esp_gradient(x[None, :], self.order)[0]
            nrm = np.linalg.norm(grad)
            if nrm < 1e-300:
                raise NumericalError("degenerate normal on the cone boundary")
            gamma = grad / nrm
            support = float(gamma @ v)
            s_new, x_new = self._ray_exit(v, gamma)
            if s_new < best[0]:
                best = (s_new, x_new, gamma)
            if support - s_new <= 1e-13 * max(1.0, s_new):
                return s_new, x_new, gamma
            x = x_new
        return best


# ---------------------------------------------------------------------------
# spectral evaluation on symmetric matrices
# ---------------------------------------------------------------------------

def matrix_value_and_derivative(spec, t, w):
    """Evaluate F_t(W) = f_t(eigenvalues of W) and its matrix derivative.

    The derivative dF_t/dW is Q diag(Df_t(lam)) Q^T for an eigendecomposition
    W = Q diag(lam) Q^T; gradient entries are averaged over groups of equal
    eigenvalues, where symmetry of f makes them coincide, so the result does
    not depend on the eigenvector choice inside degenerate blocks.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(w, w.T, atol=1e-12 * max(1.0, np.abs(w).max())):
        raise ValueError("expected a symmetric matrix")
    lam, q = np.linalg.eigh(w)
    if not spec.in_cone_t(t, lam):
        raise ConeDomainError("matrix spectrum outside the interpolated cone")
    value = spec.value_t(t, lam)
    g = spec.grad_t(t, lam)

    scale = max(1.0, float(np.abs(lam).max()))
    start = 0
    for i in range(1, lam.size + 1):
        if i == lam.size or lam[i] - lam[start] > 1e-12 * scale:
            g[start:i] = g[start:i].mean()
            start = i

    deriv = (q * g) @ q.T
    return value, 0.5 * (deriv + deriv.T)


# ---------------------------------------------------------------------------
# randomized structure verification
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    threshold: float
    note: str = ""


@dataclass
class StructureReport:
    label: str
    sample_count: int
    seed: int
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failed_names(self):
        return [c.name for c in self.checks if not c.passed]


def sample_cone(spec, count, rng, scale_low=-1.0, scale_high=1.0):
    """Rejection-sample `count` points of the cone, spread over magnitudes."""
    n = spec.n
    out = np.empty((count, n))
    have = 0
    tries = 0
    while have < count:
        tries += 1
        if tries > 2000:
            raise NumericalError(f"{spec.label}: cone sampling stalled")
        m = max(64, 2 * (count - have))
        shift = rng.uniform(0.3, 1.5, size=(m, 1))
        spread = rng.uniform(0.1, 1.0, size=(m, 1))
        cand = shift + spread * rng.standard_normal((m, n))
        keep = cand[spec.margin_scores(cand) > max(spec.margin, 1e-10)]
        take = keep[: count - have]
        out[have:have + take.shape[0]] = take
        have += take.shape[0]
    out *= 10.0 ** rng.uniform(scale_low, scale_high, size=(count, 1))
    return out


def _boundary_decay_check(spec, samples, rng, rays=64):
    """f must vanish continuously on the cone boundary along straight rays."""
    worst_ratio = 0.0
    ordered = True
    fractions = (1e-2, 1e-4, 1e-6)
    pts = samples[rng.choice(samples.shape[0], size=min(rays, samples.shape[0]), replace=False)]
    for lam in pts:
        scale = max(1.0, float(np.abs(lam).max()))
        for _ in range(40):
            direction = rng.standard_normal(lam.size)
            direction /= np.linalg.norm(direction)
            hi = scale
            exited = False
            for _ in range(60):
                if spec.margin_scores((lam + hi * direction)[None, :])[0] <= 0.0:
                    exited = True
                    break
                hi *= 2.0
            if exited:
                break
        else:
            raise NumericalError("could not find an exiting ray for the decay check")
        lo = 0.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if spec.margin_scores((lam + mid * direction)[None, :])[0] > 0.0:
                lo = mid
            else:
                hi = mid
        boundary = lam + 0.5 * (lo + hi) * direction
        vals = [spec.value(lam + (1.0 - frac) * (boundary - lam)) for frac in fractions]
        if not all(a > b for a, b in zip(vals, vals[1:])):
            ordered = False
        worst_ratio = max(worst_ratio, vals[-1] / vals[0])
    return ordered, worst_ratio


def verify_structure(spec, sample_count=1000, seed=0):
    """Randomized verification of the structural conditions of (f, Gamma).

    Checks, over seeded cone samples: positivity of f and its decay towards
    the cone boundary, strict positivity of the gradient, midpoint concavity,
    degree-one homogeneity, the lower bound sum_i d_i f_t >= f(e) along a t
    grid, and the upper bound f <= sigma_1 f(e)/n.  Failures land in the
    report, not in exceptions.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be positive")
    rng = np.random.default_rng(seed)
    pts = sample_cone(spec, sample_count, rng)
    f_e = spec.f_at_ones()
    checks = []

    vals = spec.value_many(pts)
    checks.append(CheckResult("f1_positive", bool(vals.min() > 0.0), float(vals.min()), 0.0))

    ordered, ratio = _boundary_decay_check(spec, pts, rng)
    checks.append(CheckResult(
        "f1_boundary_decay", bool(ordered and ratio <= 0.3), float(ratio), 0.3,
        "max of f(nearest)/f(farthest) along rays to the boundary",
    ))

    grads = spec.grad_many(pts)
    checks.append(CheckResult("f2_gradient_positive", bool(grads.min() > 0.0), float(grads.min()), 0.0))

    other = pts[rng.permutation(pts.shape[0])]
    mid_gap = spec.value_many(0.5 * (pts + other)) - 0.5 * (vals + spec.value_many(other))
    checks.append(CheckResult("f3_concavity_midpoint", bool(mid_gap.min() >= -1e-10),
                              float(mid_gap.min()), -1e-10))

    s = 10.0 ** rng.uniform(-2.0, 2.0, size=pts.shape[0])
    hom = np.abs(spec.value_many(s[:, None] * pts) - s * vals) / (s * vals)
    checks.append(CheckResult("f4_homogeneity", bool(hom.max() <= 1e-12), float(hom.max()), 1e-12))

    worst_f5 = math.inf
    for t in (0.0, 0.25, 0.5, 0.75, 0.99, 1.0):
        sums = spec.grad_t_many(t, pts).sum(axis=1)
        worst_f5 = min(worst_f5, float(sums.min() - f_e))
    checks.append(CheckResult("f5_gradient_sum", bool(worst_f5 >= -1e-10), worst_f5, -1e-10,
                              "min over t grid of sum_i d_i f_t - f(e)"))

    f6_gap = vals - pts.sum(axis=1) * f_e / spec.n
    checks.append(CheckResult("f6_linear_bound", bool(f6_gap.max() <= 1e-10),
                              float(f6_gap.max()), 1e-10))

    return StructureReport(label=spec.label, sample_count=sample_count, seed=seed, checks=checks)


# ---------------------------------------------------------------------------
# ball inclusion of the interpolated cones
# ---------------------------------------------------------------------------

@dataclass
class BallInclusionReport:
    label: str
    radius_fraction: float
    directions: int
    rows: list  # (t, worst membership score, corner bound margin)

    @property
    def passed(self):
        return all(score > 0.0 and corner >= 0.0 for _, score, corner in self.rows)


def interpolation_ball_report(spec, t_values=(0.0, 0.25, 0.5, 0.9, 0.99),
                              directions=1000, seed=0, radius_fraction=0.99):
    """Check the guaranteed ball around the last coordinate axis inside Gamma_t.

    For each t the ball of radius (1-t)/(2n) about (0, ..., 0, 1) lies in
    Gamma_t, and at the extreme corner point
    lam_hat = (-(1-t)/(2n), ..., -(1-t)/(2n), 1-(1-t)/(2n)) the interpolated
    function is at least (1-t) f(e) / 2.  Probed at radius_fraction of the
    guaranteed radius; the corner bound is checked with a relative slack of
    1e-12 since it is an equality at t = 0.
    """
    rng = np.random.default_rng(seed)
    n = spec.n
    axis = np.zeros(n)
    axis[-1] = 1.0
    f_e = spec.f_at_ones()
    rows = []
    for t in t_values:
        r = radius_fraction * (1.0 - t) / (2.0 * n)
        vs = rng.standard_normal((directions, n))
        vs /= np.linalg.norm(vs, axis=1, keepdims=True)
        scores = spec.margin_scores_t(t, axis + r * vs)
        corner = np.full(n, -(1.0 - t) / (2.0 * n))
        corner[-1] += 1.0
        corner_margin = spec.value_t(t, corner) - 0.5 * (1.0 - t) * f_e + 1e-12 * f_e
        rows.append((float(t), float(scores.min()), float(corner_margin)))
    return BallInclusionReport(label=spec.label, radius_fraction=radius_fraction,
                               directions=directions, rows=rows)


# ---------------------------------------------------------------------------
# concavity margin under separated normals
# ---------------------------------------------------------------------------

def concavity_margin(spec, t, mu, lam, beta):
    """Extra slack in the concavity inequality when level-set normals differ.

    Returns None when |nu(mu) - nu(lam)| <= beta.  Otherwise returns the
    largest eps with

        Df_t(lam) . (mu - lam) >= f_t(mu) - f_t(lam) + eps (sum_i d_i f_t(lam) + 1),

    which is positive, uniformly over mu in a compact subset of the cone.
    """
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if not spec.contains(mu):
        raise ConeDomainError("mu must lie in the cone")
    if not spec.in_cone_t(t, lam):
        raise ConeDomainError("lam must lie in the interpolated cone")
    nu_mu = spec.normal(t, mu)
    nu_lam = spec.normal(t, lam)
    if np.linalg.norm(nu_mu - nu_lam) <= beta:
        return None
    g = spec.grad_t(t, lam)
    lhs = float(g @ (mu - lam))
    rhs = spec.value_t(t, mu) - spec.value_t(t, lam)
    return (lhs - rhs) / (float(g.sum()) + 1.0)


@dataclass
class SeparationReport:
    label: str
    beta: float
    kept: int
    min_margin: float

    @property
    def passed(self):
        return self.kept > 0 and self.min_margin > 0.0


def concavity_margin_suite(spec, samples=10000, beta=0.2, seed=0):
    """Randomized positivity check of :func:`concavity_margin`.

    mu is drawn from the fixed compact box e + [-0.45, 0.45]^n (inside every
    cone used here), lam from a broad mixture of cone samples and points near
    the axis ball, t uniformly in [0, 1].  Only pairs with normal separation
    beyond beta contribute.
    """
    rng = np.random.default_rng(seed)
    n = spec.n
    axis = np.zeros(n)
    axis[-1] = 1.0
    kept = 0
    min_margin = math.inf
    rounds = 0
    while kept < samples:
        rounds += 1
        if rounds > 60:
            raise NumericalError("separation sampling stalled; beta may be too large")
        pool = max(256, samples - kept)
        cone_pool = sample_cone(spec, pool, rng, scale_low=-1.0, scale_high=1.5)
        ts = rng.uniform(0.0, 1.0, size=pool)
        mus = 1.0 + rng.uniform(-0.45, 0.45, size=(pool, n))
        use_ball = rng.uniform(size=pool) >= 0.7
        for i in range(pool):
            if kept >= samples:
                break
            t = float(ts[i])
            if use_ball[i]:
                r = 0.99 * (1.0 - t) / (2.0 * n)
                v = rng.standard_normal(n)
                lam = axis + r * v / np.linalg.norm(v)
                if not spec.in_cone_t(t, lam):
                    continue
            else:
                lam = cone_pool[i]
            eps = concavity_margin(spec, t, mus[i], lam, beta)
            if eps is None:
                continue
            kept += 1
            min_margin = min(min_margin, eps)
    return SeparationReport(label=spec.label, beta=beta, kept=kept, min_margin=float(min_margin))
