"""Algebra of the Garding cones and their tau-deformations.

The defining function is ``f = N sigma_k^{1/k}`` on

    Gamma_k^+ = {lambda : sigma_j(lambda) > 0, 1 <= j <= k},

and for ``0 <= tau <= 1`` the deformed pair is

    lambda^tau = tau lambda + (1 - tau) sigma_1(lambda) e,
    f^tau(lambda) = f(lambda^tau) / (tau + n (1 - tau)),
    Gamma^tau = {lambda : lambda^tau in Gamma}.

With ``normalized`` set, ``N = 2 / C(n, k)^{1/k}`` so ``f^tau(e/2) = 1``.

Every evaluation first sorts its input, so results are bitwise independent
of the order of the entries.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from . import _backend
from .errors import ConditioningWarning, DomainError, StructureViolation, UsageError

BISECT_TOL = 1e-12
BISECT_MAXIT = 200
COND_MARGIN = 1e-14


@dataclass(frozen=True)
class ConeSpec:
    """Garding cone ``Gamma_k^+`` in R^n with optional tau-deformation.

    Parameters
    ----------
    n : int
        Dimension, at least 3.
    k : int
        Garding index, ``1 <= k <= n``.
    tau : float
        Deformation parameter in [0, 1]; ``tau = 1`` is the undeformed cone.
    normalized : bool
        Scale f so that ``f(e/2) = 1``.
    """

    n: int
    k: int
    tau: float = 1.0
    normalized: bool = True

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise UsageError(f"n must be an integer >= 3, got {self.n}")
        if int(self.k) != self.k or not 1 <= self.k <= self.n:
            raise UsageError(f"k must satisfy 1 <= k <= n = {self.n}, got {self.k}")
        tau = float(self.tau)
        if not np.isfinite(tau) or not 0.0 <= tau <= 1.0:
            raise UsageError(f"tau must lie in [0, 1], got {self.tau}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "tau", tau)

    @property
    def norm_const(self) -> float:
        """Multiplier N applied to ``sigma_k^{1/k}``."""
        return 2.0 / comb(self.n, self.k) ** (1.0 / self.k) if self.normalized else 1.0

    @property
    def divisor(self) -> float:
        """``tau + n (1 - tau)``."""
        return self.tau + self.n * (1.0 - self.tau)

    def with_tau(self, tau: float) -> "ConeSpec":
        return ConeSpec(self.n, self.k, tau, self.normalized)

    def deform(self, lam):
        """``lambda^tau`` (rows of a 2-D array are deformed independently)."""
        lam = np.asarray(lam, dtype=float)
        if self.tau == 1.0:
            return lam.copy()
        s1 = lam.sum(axis=-1, keepdims=True)
        return self.tau * lam + (1.0 - self.tau) * s1


def _as_rows(lam, n=None):
    arr = np.asarray(lam, dtype=float)
    single = arr.ndim == 1
    rows = np.atleast_2d(arr)
    if rows.ndim != 2:
        raise UsageError("eigenvalue input must be a vector or a 2-D array of rows")
    if n is not None and rows.shape[1] != n:
        raise UsageError(f"expected vectors of length {n}, got {rows.shape[1]}")
    if not np.all(np.isfinite(rows)):
        raise UsageError("eigenvalue vector has non-finite entries")
    return rows, single


def _sorted_rows(rows):
    order = np.argsort(rows, axis=1, kind="stable")
    return np.take_along_axis(rows, order, axis=1), order


def sigma(lam, j: int):
    """Elementary symmetric polynomial ``sigma_j``.

    Parameters
    ----------
    lam : array_like
        Vector of length n, or 2-D array of such rows.
    j : int
        Order, ``0 <= j <= n``.
    """
    rows, single = _as_rows(lam)
    n = rows.shape[1]
    if int(j) != j or not 0 <= j <= n:
        raise UsageError(f"sigma order j must satisfy 0 <= j <= {n}, got {j}")
    srt, _ = _sorted_rows(rows)
    out = _backend.esp_table(srt, int(j))[:, int(j)]
    return float(out[0]) if single else out


def _deformed_table(rows, cone):
    """Sorted ``lambda^tau`` and its sigma table up to k."""
    srt, order = _sorted_rows(rows)
    mu = cone.deform(srt)  # order preserved since tau >= 0
    return srt, order, mu, _backend.esp_table(mu, cone.k)


def _failing(E, k):
    """First j in 1..k with sigma_j <= 0 per row, 0 when admissible."""
    bad = E[:, 1:k + 1] <= 0.0
    return np.where(bad.any(axis=1), bad.argmax(axis=1) + 1, 0)


def in_cone(lam, cone: ConeSpec):
    """Strict membership ``lambda in Gamma^tau`` (zero slack)."""
    rows, single = _as_rows(lam, cone.n)
    _, _, _, E = _deformed_table(rows, cone)
    ok = _failing(E, cone.k) == 0
    return bool(ok[0]) if single else ok


def cone_margin(lam, cone: ConeSpec):
    """Scale-free interior margin ``min_j sigma_j(mu) / (C(n,j) |mu|_inf^j)``.

    Positive iff ``lambda in Gamma^tau``; equals 1 on the ray of e.
    """
    rows, single = _as_rows(lam, cone.n)
    # the margin is scale-free; normalizing first keeps s**j away from overflow and underflow
    rmax = np.abs(rows).max(axis=1, keepdims=True)
    rows = rows / np.where(rmax > 0, rmax, 1.0)
    _, _, mu, E = _deformed_table(rows, cone)
    s = np.abs(mu).max(axis=1)
    ssafe = np.where(s > 0, s, 1.0)
    scaled = np.stack(
        [E[:, j] / (comb(cone.n, j) * ssafe ** j) for j in range(1, cone.k + 1)], axis=1
    )
    m = np.where(s > 0, scaled.min(axis=1), 0.0)
    return float(m[0]) if single else m


def in_cone_with_margin(lam, cone: ConeSpec, margin: float):
    """``cone_margin(lam) >= margin``, for caller-chosen ``margin > 0``."""
    m = cone_margin(lam, cone)
    return m >= margin


def f_value(lam, cone: ConeSpec):
    """``f^tau(lambda)``; raises :class:`DomainError` outside ``Gamma^tau``."""
    rows, single = _as_rows(lam, cone.n)
    _, _, _, E = _deformed_table(rows, cone)
    fail = _failing(E, cone.k)
    if np.any(fail):
        i = int(np.flatnonzero(fail)[0])
        raise DomainError(
            f"lambda = {rows[i].tolist()} is outside the cone: "
            f"sigma_{int(fail[i])}(lambda^tau) <= 0",
            failing_sigma=int(fail[i]),
        )
    val = cone.norm_const * E[:, cone.k] ** (1.0 / cone.k) / cone.divisor
    return float(val[0]) if single else val


def f_gradient(lam, cone: ConeSpec):
    """Analytic gradient of ``f^tau``.

    With ``mu = lambda^tau`` and ``g = grad f(mu)``,

        grad f^tau = (tau g + (1 - tau) (sum g) e) / (tau + n (1 - tau)),

    where ``d sigma_k / d mu_l = sigma_{k-1}(mu without entry l)``. Emits a
    :class:`ConditioningWarning` when the interior margin is below 1e-14.
    """
    rows, single = _as_rows(lam, cone.n)
    srt, order, mu, E = _deformed_table(rows, cone)
    fail = _failing(E, cone.k)
    if np.any(fail):
        i = int(np.flatnonzero(fail)[0])
        raise DomainError(
            f"lambda = {rows[i].tolist()} is outside the cone: "
            f"sigma_{int(fail[i])}(lambda^tau) <= 0",
            failing_sigma=int(fail[i]),
        )
    k = cone.k
    marg = cone_margin(srt, cone)
    if np.any(np.atleast_1d(marg) < COND_MARGIN):
        warnings.warn(
            "gradient evaluated within 1e-14 of the cone boundary; digits may be lost",
            ConditioningWarning,
            stacklevel=2,
        )
    sk = E[:, k]
    dsk = _backend.esp_deleted(mu, k - 1)
    g = cone.norm_const / k * (sk ** (1.0 / k - 1.0))[:, None] * dsk
    tau = cone.tau
    gt = (tau * g + (1.0 - tau) * g.sum(axis=1, keepdims=True)) / cone.divisor
    out = np.empty_like(gt)
    np.put_along_axis(out, order, gt, axis=1)
    return out[0] if single else out


# --- structural constants -------------------------------------------------

def _bisect(pred_in, lo, hi, tol=BISECT_TOL, maxit=BISECT_MAXIT):
    """Boundary of ``{t : pred_in(t)}`` given ``pred_in(lo)`` and not ``pred_in(hi)``."""
    for _ in range(maxit):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if pred_in(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mu_plus(cone: ConeSpec) -> float:
    """``mu^+`` with ``(-mu^+, 1, ..., 1)`` on the boundary, by bisection on [0, n-1]."""
    n = cone.n

    def inside(t):
        return in_cone(np.r_[-t, np.ones(n - 1)], cone)

    if not inside(0.0):
        return 0.0
    return _bisect(inside, 0.0, float(n - 1))


def mu_plus_exact(n: int, k: int, tau: float) -> float:
    """Closed form of ``mu^+`` for the deformed Garding cone.

    With ``m = (n-k)/k`` (the undeformed value), solving
    ``lambda^tau`` on the boundary for ``lambda = (-t, 1, ..., 1)`` gives

        t = ((1-tau)(1+m)(n-1) + tau m) / (tau + (1-tau)(1+m)).
    """
    m = (n - k) / k
    return ((1.0 - tau) * (1.0 + m) * (n - 1) + tau * m) / (tau + (1.0 - tau) * (1.0 + m))


def mu_plus_linear(n: int, k: int, tau: float) -> float:
    """The linear-in-tau expression ``(n-k)/k + (n-1)(1-tau)``.

    Agrees with :func:`mu_plus_exact` only when ``tau = 1`` or ``k = n``;
    kept for comparison.
    """
    return (n - k) / k + (n - 1) * (1.0 - tau)


@dataclass(frozen=True)
class ConeConstants:
    """Structural constants of a cone.

    ``beta`` is None when ``mu_plus <= 1``; ``t_star`` is the boundary value
    used to build ``theta`` (None for the positive cone).
    """

    mu_plus: float
    kappa: int
    theta: float
    beta: Optional[float]
    t_star: Optional[float] = None


def kappa(cone: ConeSpec) -> int:
    """Largest p with ``(0 x p, 1 x (n-p))`` in the cone."""
    n = cone.n
    best = 0
    for p in range(n):
        v = np.r_[np.zeros(p), np.ones(n - p)]
        if in_cone(v, cone):
            best = p
    return best


def cone_constants(cone: ConeSpec) -> ConeConstants:
    """``mu^+``, ``kappa``, a constructive ``theta`` and ``beta = 2/(mu^+ - 1)``.

    ``theta`` comes from the admissible vector whose kappa negative entries
    all equal ``t*/2``, with ``t* = sup{t : (-t x kappa, 1 x (n-kappa)) in Gamma}``:

        theta = (t*/2) / (n (n - kappa)).

    For the positive cone (kappa = 0) the ordering alone gives 1/n.
    """
    n = cone.n
    mu = mu_plus(cone)
    kap = kappa(cone)
    beta = 2.0 / (mu - 1.0) if mu > 1.0 else None
    if kap == 0:
        return ConeConstants(mu, 0, 1.0 / n, beta, None)

    def inside(t):
        return in_cone(np.r_[-t * np.ones(kap), np.ones(n - kap)], cone)

    t_star = _bisect(inside, 0.0, (n - kap) / kap)
    theta = (0.5 * t_star) / (n * (n - kap))
    return ConeConstants(mu, kap, theta, beta, t_star)


# --- sampling and the structure suite -------------------------------------

def sample_interior(cone: ConeSpec, samples: int, seed: int):
    """Deterministic pseudo-random points strictly inside ``Gamma^tau``.

    Each Gaussian vector g is shifted along e to ``g + c e`` with
    ``c = c0 + spread * U(0.01, 2)``, where ``c0`` is the entry point of the
    line into the cone (bisection), then scaled to unit max-norm.
    """
    rng = np.random.default_rng(seed)
    n = cone.n
    g = rng.standard_normal((samples, n))
    u = rng.uniform(0.01, 2.0, size=samples)
    lo = -g.mean(axis=1)  # sigma_1 = 0: outside
    hi = (-g).max(axis=1) + 1e-9  # all entries positive: inside
    for _ in range(BISECT_MAXIT):
        if np.all(hi - lo <= BISECT_TOL):
            break
        mid = 0.5 * (lo + hi)
        ins = in_cone(g + mid[:, None], cone)
        hi = np.where(ins, mid, hi)
        lo = np.where(ins, lo, mid)
    spread = g.std(axis=1) + 1e-3
    lam = g + (hi + spread * u)[:, None]
    lam /= np.abs(lam).max(axis=1, keepdims=True)
    return lam


@dataclass
class StructureReport:
    """Outcome of :func:`check_structure`.

    ``worst_margins`` maps each property to its smallest normalized margin
    (nonnegative means satisfied); ``witnesses`` maps failed properties to a
    witness point.
    """

    cone: ConeSpec
    samples: int
    seed: int
    theta: float
    violations: dict = field(default_factory=dict)
    worst_margins: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    @property
    def total_violations(self) -> int:
        return int(sum(self.violations.values()))

    @property
    def passed(self) -> bool:
        return self.total_violations == 0

    def to_dict(self):
        return {
            "samples": self.samples,
            "seed": self.seed,
            "theta": self.theta,
            "violations": self.total_violations,
            "violations_by_property": dict(self.violations),
            "worst_margins": dict(self.worst_margins),
            "witnesses": {k: list(map(float, v)) for k, v in self.witnesses.items()},
        }


def check_structure(cone: ConeSpec, samples: int, seed: int = 0, slack: float = 1e-10,
                    strict: bool = False) -> StructureReport:
    """Verify the structural properties of ``f^tau`` on random interior points.

    Checked per sample: permutation symmetry, homogeneity, midpoint
    concavity, gradient positivity, gradient ordering, ``f <= (2/n) sigma_1``
    (normalized f), ``sum_i df/dlambda_i >= f(e)`` and
    ``df/dlambda_i >= theta sum_j df/dlambda_j`` for ``i >= n - kappa`` in
    decreasing order. With ``strict`` a failure raises
    :class:`~schouten.errors.StructureViolation`.
    """
    if int(samples) != samples or samples < 1:
        raise UsageError("samples must be a positive integer")
    n = cone.n
    rng = np.random.default_rng([seed, 1])
    lam = sample_interior(cone, samples, seed)
    consts = cone_constants(cone)
    rep = StructureReport(cone, int(samples), int(seed), consts.theta)

    def record(name, margin):
        margin = np.asarray(margin, dtype=float)
        bad = margin < -slack
        rep.violations[name] = int(bad.sum())
        i = int(np.argmin(margin))
        rep.worst_margins[name] = float(margin[i])
        if bad.any():
            rep.witnesses[name] = lam[int(np.flatnonzero(bad)[0])]

    f = f_value(lam, cone)
    grad = f_gradient(lam, cone)

    perm = np.array([rng.permutation(n) for _ in range(samples)])
    fp = f_value(np.take_along_axis(lam, perm, axis=1), cone)
    record("symmetry", -np.abs(fp - f) / f)

    s = 10.0 ** rng.uniform(-3, 3, size=samples)
    fs = f_value(lam * s[:, None], cone)
    record("homogeneity", -np.abs(fs - s * f) / (s * f))

    partner = np.roll(lam, 1, axis=0)
    fmid = f_value(0.5 * (lam + partner), cone)
    fpart = np.roll(f, 1)
    record("concavity", (fmid - 0.5 * (f + fpart)) / np.maximum(1.0, np.abs(f)))

    gsum = grad.sum(axis=1)
    record("gradient_positive", grad.min(axis=1) / gsum)

    srt_idx = np.argsort(-lam, axis=1, kind="stable")
    lam_d = np.take_along_axis(lam, srt_idx, axis=1)
    g_d = np.take_along_axis(grad, srt_idx, axis=1)
    # decreasing lambda must come with nondecreasing gradient (ties excluded)
    dg = np.diff(g_d, axis=1)
    tie = np.diff(lam_d, axis=1) == 0
    record("gradient_ordering", np.where(tie, 0.0, dg).min(axis=1) / gsum)

    fn = f if cone.normalized else f_value(lam, ConeSpec(n, cone.k, cone.tau, True))
    record("trace_bound", ((2.0 / n) * lam.sum(axis=1) - fn) / np.maximum(1.0, fn))

    fe = f_value(np.ones(n), cone)
    record("gradient_sum", (gsum - fe) / max(1.0, fe))

    lo_i = max(n - consts.kappa, 1) - 1  # 0-based start of the i >= n - kappa range
    prop = g_d[:, lo_i:].min(axis=1) - consts.theta * gsum
    record("gradient_share", prop / gsum)

    if strict and not rep.passed:
        raise StructureViolation(
            f"{rep.total_violations} structural violations: {rep.violations}", rep
        )
    return rep
