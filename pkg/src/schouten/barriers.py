"""Explicit barrier families and their numerical verification.

Four radial families are provided, each with a ``verify_*`` routine that
evaluates its claimed differential inequality on a grid:

* :class:`AnnulusLog` -- the subsolution
  ``w = (beta+eps) ln(gap/(r_+ - r_-)) + m`` on an annulus, ``gap = r_+ - r``;
* :class:`LNSuper` -- the ball supersolution
  ``w = -ln(R^2 - r^2) + h(R^2 - r^2) + ln(2R)``, ``h(t) = sqrt(t+eps^2) - eps``;
* :class:`GuanUpper` -- the collar function
  ``u_bar = xi_bar + ln((d + delta^2)/delta^2)/(n-2)`` with ``sigma_1 <= 0``;
* :class:`CollarLog` -- the collar subsolution ``phi = -ln(B(d + a d^2))``.

All checks run on flat (or warped) radial models where the curvature
remainder vanishes identically, so every inequality is checked exactly.
Constants the construction leaves unspecified are measured and reported.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cone import ConeSpec, cone_constants, cone_margin, f_value
from .errors import DomainError, PreconditionError, UsageError
from .geometry import (
    RadialGeometry,
    RadialJet,
    hyperbolic_factor,
    radial_eigs,
    vform_lambda_chi,
)

DEFAULT_NODES = 1000
FAMILIES = ("AnnulusLog", "LNSuper", "GuanUpper", "CollarLog")


@dataclass
class BarrierCheckReport:
    """Result of a barrier verification.

    ``min_cone_margin`` is None for families whose claim is not a cone
    condition (LNSuper, GuanUpper). ``measured`` holds fitted constants.
    """

    family: str
    params: dict
    grid_points: int
    min_cone_margin: Optional[float]
    min_inequality_margin: float
    passed: bool
    witness: dict
    measured: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "family": self.family,
            "params": dict(self.params),
            "grid_points": self.grid_points,
            "min_cone_margin": self.min_cone_margin,
            "min_inequality_margin": self.min_inequality_margin,
            "pass": self.passed,
            "witness": dict(self.witness),
            "measured": dict(self.measured),
        }


def _finish(family, params, npts, cone_m, ineq_m, r, **measured):
    """Assemble a report from per-node margin arrays."""
    ineq_m = np.asarray(ineq_m, dtype=float)
    worst = ineq_m
    if cone_m is not None:
        cone_m = np.asarray(cone_m, dtype=float)
        worst = np.minimum(worst, cone_m)
    i = int(np.argmin(worst))
    passed = bool(np.all(ineq_m > 0) and (cone_m is None or np.all(cone_m > 0)))
    witness = {"node": i, "r": float(r[i]), "inequality_margin": float(ineq_m[i])}
    if cone_m is not None:
        witness["cone_margin"] = float(cone_m[i])
    return BarrierCheckReport(
        family,
        params,
        int(npts),
        None if cone_m is None else float(cone_m.min()),
        float(ineq_m.min()),
        passed,
        witness,
        {k: (float(v) if isinstance(v, (float, np.floating, int)) else v)
         for k, v in measured.items()},
    )


def _check_nodes(grid_points):
    if int(grid_points) != grid_points or grid_points < 2:
        raise UsageError("grid_points must be an integer >= 2")
    return int(grid_points)


def _bisect_min(holds, lo, hi, iters=200):
    """Smallest x in [lo, hi] with ``holds(x)``, assuming monotonicity."""
    if holds(lo):
        return lo
    while not holds(hi):
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("no admissible constant")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-13 * hi:
            break
    return hi


# --- AnnulusLog ------------------------------------------------------------

@dataclass(frozen=True)
class AnnulusLog:
    """Logarithmic subsolution on the annulus ``r_minus <= r < r_plus``.

    With ``strict`` (the default) the window
    ``1 < r_plus/r_minus < 1 + eps/(2(beta+2))`` and ``r_plus < R_admissible``
    are enforced at construction; otherwise violations are only recorded.
    On flat space the curvature remainder vanishes and ``R_admissible = 1``.
    """

    cone: ConeSpec
    m: float
    eps: float
    r_minus: float
    r_plus: float
    strict: bool = True
    R_admissible: float = 1.0

    def __post_init__(self):
        if not self.eps > 0:
            raise UsageError("eps must be positive")
        if not 0 < self.r_minus < self.r_plus:
            raise UsageError("need 0 < r_minus < r_plus")
        mu = cone_constants(self.cone).mu_plus
        if not mu > 1.0:
            raise PreconditionError(f"mu_plus = {mu} <= 1: beta = 2/(mu_plus - 1) undefined")
        object.__setattr__(self, "_mu", mu)
        if self.strict and not self.window_ok:
            raise PreconditionError(
                f"annulus window 1 < r_+/r_- < 1 + eps/(2(beta+2)) violated: "
                f"r_+/r_- = {self.r_plus / self.r_minus:.6g}, "
                f"bound = {self.window_bound:.6g}, r_+ = {self.r_plus:.6g}, "
                f"R = {self.R_admissible:.6g}"
            )

    @property
    def mu_plus(self) -> float:
        return self._mu

    @property
    def beta(self) -> float:
        return 2.0 / (self._mu - 1.0)

    @property
    def exponent(self) -> float:
        """``beta + eps``."""
        return self.beta + self.eps

    @property
    def Lambda(self) -> float:
        return self.m - self.exponent * np.log(self.r_plus - self.r_minus)

    @property
    def window_bound(self) -> float:
        return 1.0 + self.eps / (2.0 * (self.beta + 2.0))

    @property
    def window_ok(self) -> bool:
        ratio = self.r_plus / self.r_minus
        return 1.0 < ratio < self.window_bound and self.r_plus < self.R_admissible

    def params(self):
        return {
            "n": self.cone.n, "k": self.cone.k, "tau": self.cone.tau,
            "m": self.m, "eps": self.eps, "r_minus": self.r_minus,
            "r_plus": self.r_plus, "beta": self.beta, "Lambda": self.Lambda,
            "mu_plus": self.mu_plus, "window_ok": self.window_ok,
        }

    def shifted(self, c: float) -> "AnnulusLog":
        return AnnulusLog(self.cone, self.m + c, self.eps, self.r_minus, self.r_plus,
                          self.strict, self.R_admissible)

    def v_jet(self, r):
        """``v = exp(-w) = exp(-Lambda) gap^{-beta-eps}`` and two derivatives."""
        gap = self._gap(r)
        p = self.exponent
        v = np.exp(-self.Lambda) * gap ** (-p)
        return v, p * v / gap, p * (p + 1.0) * v / gap ** 2

    def _gap(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r_minus) or np.any(r >= self.r_plus):
            raise DomainError("AnnulusLog is defined for r_minus <= r < r_plus")
        return self.r_plus - r


def annulus_barrier_value(spec: AnnulusLog, r) -> RadialJet:
    """``w(r)`` with analytic ``w_r`` and ``w_rr``."""
    gap = spec._gap(r)
    p = spec.exponent
    w = p * np.log(gap / (spec.r_plus - spec.r_minus)) + spec.m
    w_r = -p / gap
    w_rr = -p / gap ** 2
    if np.ndim(w) == 0:
        w, w_r, w_rr = float(w), float(w_r), float(w_rr)
    return RadialJet(np.asarray(r, dtype=float) if np.ndim(r) else float(r), w, w_r, w_rr)


def annulus_grid(spec: AnnulusLog, grid_points: int):
    """Uniform nodes from ``r_minus`` to half a cell short of ``r_plus``."""
    h = (spec.r_plus - spec.r_minus) / (grid_points - 0.5)
    return spec.r_minus + h * np.arange(grid_points)


def annulus_eigs(spec: AnnulusLog, r):
    """Scale ``s = -lam v^2`` and first slot ``chi/lam + 1`` of the intrinsic eigenvalues.

    The eigenvalue vector of ``-g_w^{-1} A_{g_w}`` is ``s (slot, 1, ..., 1)``.
    """
    v, vr, vrr = spec.v_jet(r)
    lam, chi = vform_lambda_chi(r, v, vr, vrr)
    return -lam * v * v, chi / lam + 1.0


def verify_annulus_barrier(spec: AnnulusLog, grid_points: int = DEFAULT_NODES) -> BarrierCheckReport:
    """Cone membership, the two sign claims and the lower bound on f.

    At every node, with ``s = -lam v^2`` and ``slot = chi/lam + 1``:

    * ``s > 0``; ``c1 = min s / (exp(-2 Lambda) gap^{-2 beta - 2 eps - 2})``;
    * ``slot > -mu_plus``; ``c2 = min (slot + mu_plus) / eps``;
    * ``s (slot, 1, ..., 1)`` lies in the cone;
    * ``f >= f(-mu_plus + eps/C, 1, ..., 1) / (C exp(2m) (r_+ - r_-)^2)``
      where C is the smallest admissible constant (>= 1) on the grid,
      reported after a 1% cushion.

    Also reports the log-log slope of the background-frame f against gap on
    the nodes with ``gap <= (r_+ - r_-)/10``; it tends to -2 as r -> r_+.
    """
    npts = _check_nodes(grid_points)
    cone = spec.cone
    n = cone.n
    r = annulus_grid(spec, npts)
    gap = spec.r_plus - r
    s, slot = annulus_eigs(spec, r)
    mu = spec.mu_plus
    p = spec.exponent

    vec = np.ones((npts, n))
    vec[:, 0] = slot
    cm = cone_margin(vec, cone) * np.sign(s)

    ref = np.exp(-2.0 * spec.Lambda) * gap ** (-2.0 * p - 2.0)
    c1 = float(np.min(s / ref))
    c2 = float(np.min(slot + mu) / spec.eps)

    fin = np.full(npts, np.nan)
    ok = (cm > 0)
    fin[ok] = s[ok] * f_value(vec[ok], cone)
    width = spec.r_plus - spec.r_minus
    denom = np.exp(2.0 * spec.m) * width ** 2

    def bound(C):
        return f_value(np.r_[-mu + spec.eps / C, np.ones(n - 1)], cone) / (C * denom)

    fmin = np.nanmin(fin) if ok.any() else np.nan
    if ok.all():
        C_min = _bisect_min(lambda C: bool(fmin >= bound(C)), 1.0, 2.0)
        C = 1.01 * C_min
        b = bound(C)
        f_excess = (fin - b) / fin
    else:
        C_min = C = float("nan")
        b = float("nan")
        f_excess = np.where(ok, 0.0, -1.0)

    ineq = np.minimum.reduce([
        np.sign(s) * np.minimum(1.0, np.abs(s / ref)),  # sign of s
        (slot + mu) / mu,  # slot above -mu
        np.nan_to_num(f_excess, nan=-1.0),
    ])

    fbg = fin * np.exp(2.0 * (p * np.log(gap / width) + spec.m))
    # the gap^-2 law is asymptotic as r -> r_+: fit on the last tenth of the annulus
    good = np.isfinite(fbg) & (fbg > 0) & (gap <= 0.1 * width)
    slope = float(np.polyfit(np.log(gap[good]), np.log(fbg[good]), 1)[0]) if good.sum() > 1 else float("nan")

    return _finish(
        "AnnulusLog", spec.params(), npts, cm, ineq, r,
        c1=c1, c2=c2, C=C, C_min=C_min, f_bound=b, loglog_slope_background=slope,
        min_first_slot=float(slot.min()),
    )


# --- LNSuper ---------------------------------------------------------------

@dataclass(frozen=True)
class LNSuper:
    """Ball supersolution ``w = -ln(R^2 - r^2) + h(R^2 - r^2) + ln(alpha)``, ``alpha = 2R``."""

    n: int
    R: float
    eps: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise UsageError("n must be an integer >= 3")
        if not (self.R > 0 and self.eps > 0):
            raise UsageError("R and eps must be positive")

    @property
    def alpha(self) -> float:
        return 2.0 * self.R

    def h(self, t, nu=0):
        """``h(t) = sqrt(t + eps^2) - eps`` and its derivatives (``nu`` = 0, 1, 2)."""
        s = np.sqrt(np.asarray(t, dtype=float) + self.eps ** 2)
        if nu == 0:
            return s - self.eps
        if nu == 1:
            return 0.5 / s
        if nu == 2:
            return -0.25 / s ** 3
        raise UsageError("nu must be 0, 1 or 2")

    def jet(self, r) -> RadialJet:
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(r >= self.R):
            raise DomainError("LNSuper is defined for 0 <= r < R")
        t = self.R ** 2 - r * r
        w = -np.log(t) + self.h(t) + np.log(self.alpha)
        a = 1.0 / t - self.h(t, 1)
        w_r = 2.0 * r * a
        w_rr = 2.0 * a + 4.0 * r * r * (1.0 / t ** 2 + self.h(t, 2))
        return RadialJet(r, w, w_r, w_rr)

    def params(self):
        return {"n": self.n, "R": self.R, "eps": self.eps, "alpha": self.alpha}


def verify_ln_supersolution(spec: LNSuper, grid_points: int = DEFAULT_NODES) -> BarrierCheckReport:
    """Check ``2 lap w + (n-2) |w_r|^2 <= n exp(2w)`` on ``[0, R)``.

    The radial Laplacian is ``w_rr + (n-1) w_r / r`` (``n w_rr`` at r = 0).
    Also checks the profile constraints ``(n-2) h'^2 + 2 h'' <= 0`` and
    ``h(0) = 0`` at ``grid_points`` nodes of ``[0, R^2]``.
    """
    npts = _check_nodes(grid_points)
    n = spec.n
    hstep = spec.R / (npts - 0.5)
    r = hstep * np.arange(npts)
    j = spec.jet(r)
    lap = np.empty(npts)
    lap[0] = n * j.u_rr[0]
    lap[1:] = j.u_rr[1:] + (n - 1) * j.u_r[1:] / r[1:]
    lhs = 2.0 * lap + (n - 2) * j.u_r ** 2
    rhs = n * np.exp(2.0 * j.u)
    ineq = (rhs - lhs) / rhs

    t = np.linspace(0.0, spec.R ** 2, npts)
    hcon = (n - 2) * spec.h(t, 1) ** 2 + 2.0 * spec.h(t, 2)
    h0 = float(spec.h(0.0))
    scale = 2.0 * np.abs(spec.h(t, 2))
    hmargin = float(np.min(-hcon / scale))
    rep = _finish(
        "LNSuper", spec.params(), npts, None, ineq, r,
        h_constraint_margin=hmargin, h_at_zero=h0,
        min_h_prime=float(spec.h(spec.R ** 2, 1)), w_center=float(j.u[0]),
    )
    if hmargin < 0 or h0 != 0.0:
        rep.passed = False
    return rep


def ln_tangent_comparison(spec: LNSuper, samples: int = 1000, seed: int = 0):
    """Compare the unit-ball hyperbolic factor with w on an internally tangent ball.

    The ball ``B_R(z0)`` with ``|z0| = 1 - R`` touches the unit sphere; at
    sample points x inside it, ``u*(x) = ln(2/(1 - |x|^2)) <= w(|x - z0|)``
    is expected. Returns the minimum of ``w - u*`` (positive when it holds).
    """
    if not spec.R < 1:
        raise UsageError("tangent comparison needs R < 1")
    rng = np.random.default_rng(seed)
    n = spec.n
    z0 = np.zeros(n)
    z0[0] = 1.0 - spec.R
    # points along the axis plus random points in the small ball
    t = np.linspace(-0.999, 0.999, samples // 2)
    axis = z0 + np.outer(t * spec.R, np.eye(n)[0])
    dirs = rng.standard_normal((samples - samples // 2, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    rad = spec.R * rng.uniform(0.0, 0.999, size=len(dirs)) ** (1.0 / n)
    pts = np.vstack([axis, z0 + dirs * rad[:, None]])
    dist = np.linalg.norm(pts - z0, axis=1)
    ustar = hyperbolic_factor(np.linalg.norm(pts, axis=1))[0]
    w = spec.jet(dist).u
    return float(np.min(w - ustar))


# --- GuanUpper -------------------------------------------------------------

@dataclass(frozen=True)
class GuanUpper:
    """Collar function ``u_bar = xi_bar + ln((d + delta^2)/delta^2)/(n-2)``, ``d = R_dom - r``.

    ``delta`` is the starting value of the decreasing sweep in
    :func:`verify_guan_upper` (None: half the domain radius).
    """

    n: int
    xi_bar: float = 0.0
    delta: Optional[float] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise UsageError("n must be an integer >= 3")
        if self.delta is not None and not self.delta > 0:
            raise UsageError("delta must be positive")

    def jet(self, r, R_dom: float, delta: float) -> RadialJet:
        r = np.asarray(r, dtype=float)
        d = R_dom - r
        if np.any(d < 0):
            raise DomainError("GuanUpper is defined for r <= R_dom")
        q = 1.0 / (d + delta ** 2)
        u = self.xi_bar + np.log((d + delta ** 2) / delta ** 2) / (self.n - 2)
        return RadialJet(r, u, -q / (self.n - 2), -q * q / (self.n - 2))

    def params(self):
        return {"n": self.n, "xi_bar": self.xi_bar, "delta_start": self.delta}


def guan_sigma1(spec: GuanUpper, geom: RadialGeometry, delta: float, d):
    """``sigma_1(-g0^{-1} A_{g_ubar})`` at distances d from the boundary."""
    R_dom = geom.domain[1]
    j = spec.jet(R_dom - np.asarray(d, dtype=float), R_dom, delta)
    e = radial_eigs(j, geom, symmetric_limit=True, frame="background")
    return e.sigma1(geom.n)


def verify_guan_upper(spec: GuanUpper, geom: RadialGeometry,
                      grid_points: int = DEFAULT_NODES, u_max: Optional[float] = None,
                      max_steps: int = 40) -> BarrierCheckReport:
    """Find the largest delta in ``start, start/2, ...`` with ``sigma_1 <= 0`` on ``d < delta``.

    With ``u_max`` the outer condition ``u_bar(d = delta) >= u_max`` is also
    required. Raises :class:`DomainError` when no delta in ``max_steps``
    halvings qualifies.
    """
    npts = _check_nodes(grid_points)
    if geom.n != spec.n:
        raise UsageError("barrier and geometry dimensions differ")
    R_dom = geom.domain[1]
    delta = spec.delta if spec.delta is not None else 0.5 * R_dom
    if delta >= R_dom - geom.domain[0]:
        raise UsageError("delta must be smaller than the domain width")
    for step in range(max_steps):
        d = delta * np.arange(npts) / npts
        s1 = guan_sigma1(spec, geom, delta, d)
        q = 1.0 / (d + delta ** 2)
        lead = q * q / (2.0 * (spec.n - 2))
        outer_ok = True
        if u_max is not None:
            outer_ok = bool(spec.jet(R_dom - delta, R_dom, delta).u >= u_max)
        if np.all(s1 <= 0) and outer_ok:
            ineq = -s1 / lead
            rep = _finish(
                "GuanUpper", spec.params(), npts, None, np.where(ineq == 0, 1e-300, ineq),
                R_dom - d, delta_star=delta, sweep_steps=step,
                sigma1_at_boundary=float(s1[0]),
                leading_term_at_boundary=float(-lead[0]),
                u_bar_boundary=float(spec.jet(R_dom, R_dom, delta).u),
            )
            rep.params["delta_star"] = delta
            return rep
        delta *= 0.5
    raise DomainError(f"no admissible delta after {max_steps} halvings")


# --- CollarLog -------------------------------------------------------------

@dataclass(frozen=True)
class CollarLog:
    """Collar subsolution ``phi = -ln(B (d + a d^2))``, ``B = 1/sqrt(1 - 2 eps)``."""

    eps: float
    a: float = 1.0

    def __post_init__(self):
        if not 0 < self.eps < 0.5:
            raise DomainError("CollarLog needs 0 < eps < 1/2 so that sqrt(1 - 2 eps) is defined")
        if not self.a >= 1:
            raise UsageError("CollarLog needs a >= 1")

    @property
    def B(self) -> float:
        return 1.0 / np.sqrt(1.0 - 2.0 * self.eps)

    def set_level(self, C_hat: float) -> float:
        """Right-hand side ``eps sqrt(1 - 2 eps) / (100 C_hat)`` bounding ``d + a d^2``."""
        return self.eps * np.sqrt(1.0 - 2.0 * self.eps) / (100.0 * C_hat)

    def d_max(self, C_hat: float) -> float:
        """Largest d with ``d + a d^2 <= set_level``."""
        L = self.set_level(C_hat)
        return 2.0 * L / (1.0 + np.sqrt(1.0 + 4.0 * self.a * L))

    def jet(self, r, R_dom: float) -> RadialJet:
        r = np.asarray(r, dtype=float)
        d = R_dom - r
        if np.any(d <= 0):
            raise DomainError("CollarLog is defined for d > 0")
        P = d + self.a * d * d
        dP = 1.0 + 2.0 * self.a * d
        phi = -np.log(self.B * P)
        phi_r = dP / P
        phi_rr = (dP * dP - 2.0 * self.a * P) / (P * P)
        return RadialJet(r, phi, phi_r, phi_rr)

    def params(self):
        return {"eps": self.eps, "a": self.a, "B": self.B}


def collar_C_hat(spec: CollarLog, geom: RadialGeometry, iters: int = 100) -> float:
    """Smallest ``C_hat >= 1`` bounding ``|A0|`` and ``|hess d|`` on the collar it defines.

    On the flat ball ``|hess d| = 1/r``, so ``C_hat = max(1, 1/(R - d_max(C_hat)))``,
    solved by fixed-point iteration.
    """
    R_dom = geom.domain[1]
    C = 1.0
    for _ in range(iters):
        dm = spec.d_max(C)
        r_in = R_dom - dm
        rr = np.linspace(r_in, R_dom, 33)
        a0r, a0t = geom.background_schouten(rr)
        q = geom.q(rr)
        new = max(1.0, float(np.max(np.abs(q))), float(np.max(np.abs(a0r))),
                  float(np.max(np.abs(a0t))))
        if abs(new - C) <= 1e-14 * new:
            return new
        C = new
    return C


def verify_collar_barrier(spec: CollarLog, geom: RadialGeometry,
                          grid_points: int = DEFAULT_NODES,
                          cones: Sequence[ConeSpec] = ()) -> BarrierCheckReport:
    """Eigenvalue bound ``>= 1/2`` and ``f^tau >= 1`` on the set ``d + a d^2 <= level``.

    Checks at every node: all intrinsic eigenvalues of ``-g_phi^{-1} A_{g_phi}``
    exceed both ``B^2 (1/2 - C_hat [d + 4ad^2 + 2ad^3 + a^2 d^4])`` and
    ``1/2``; ``f^tau >= 1`` for each given cone (normalized); and the
    identity ``phi + ln d = ln sqrt(1 - 2 eps) - ln(1 + a d)``.
    """
    npts = _check_nodes(grid_points)
    if geom.kind != "flat":
        raise UsageError("the collar check is implemented for the flat ball")
    R_dom = geom.domain[1]
    C_hat = collar_C_hat(spec, geom)
    dmax = spec.d_max(C_hat)
    hstep = dmax / (npts - 0.5)
    d = dmax - hstep * np.arange(npts)
    r = R_dom - d
    j = spec.jet(r, R_dom)
    e = radial_eigs(j, geom, frame="intrinsic")
    a = spec.a
    B2 = spec.B ** 2
    poly = d + 4 * a * d ** 2 + 2 * a * d ** 3 + a * a * d ** 4
    lower = B2 * (0.5 - C_hat * poly)
    emin = np.minimum(e.radial, e.tangential)
    ineq = np.minimum(emin - lower, emin - 0.5 + 1e-10) / 0.5
    fmin = {}
    cm = np.full(npts, np.inf)
    for cone in cones:
        if not cone.normalized:
            raise UsageError("f >= 1 is a statement about normalized cones")
        vec = e.as_vector(geom.n)
        cmk = cone_margin(vec, cone)
        cm = np.minimum(cm, cmk)
        fv = f_value(vec[cmk > 0], cone) if np.all(cmk > 0) else np.zeros(npts)
        fmin[f"{cone.n},{cone.k},{cone.tau}"] = float(np.min(fv))
        ineq = np.minimum(ineq, (fv - 1.0 + 1e-8))
    ident = j.u + np.log(d) - (np.log(np.sqrt(1.0 - 2.0 * spec.eps)) - np.log1p(a * d))
    ident_err = float(np.max(np.abs(ident)))
    rep = _finish(
        "CollarLog", dict(spec.params(), n=geom.n, R_dom=R_dom), npts,
        cm if cones else None, ineq, r,
        C_hat=C_hat, d_max=dmax, set_level=spec.set_level(C_hat),
        min_eigenvalue=float(emin.min()), min_lower_bound=float(lower.min()),
        identity_error=ident_err, f_min=fmin,
    )
    if ident_err > 1e-10:
        rep.passed = False
    return rep


def search_collar_params(geom: RadialGeometry, eps_grid=(0.02, 0.05, 0.1, 0.2, 0.3, 0.4),
                         a_grid=(1.0,), grid_points: int = 200):
    """Return the first ``(eps, a)`` on the grids whose collar check passes."""
    for a in a_grid:
        for eps in eps_grid:
            rep = verify_collar_barrier(CollarLog(eps, a), geom, grid_points)
            if rep.passed:
                return eps, a, rep
    raise DomainError("no collar parameters passed")
