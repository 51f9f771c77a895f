"""Schouten-tensor calculus for radial conformal factors.

Background metrics are warped products ``g0 = dr^2 + phi_w(r)^2 g_S`` on a
radius interval (flat space is ``phi_w = r``). For a radial factor u and
``g_u = exp(2u) g0`` the eigenvalues of ``-g0^{-1} A_{g_u}`` split into

    radial      a = u_rr - u_r^2/2 - A0_rad,
    tangential  b = (phi_w'/phi_w) u_r + u_r^2/2 - A0_tan   (multiplicity n-1),

obtained from ``A_{g_u} = A0 - hess u - |du|^2 g0 / 2 + du (x) du``. These
are the *background-frame* values; the eigenvalues of ``-g_u^{-1} A_{g_u}``
(the *intrinsic* frame) are ``exp(-2u)`` times them.

Background Schouten eigenvalues follow from the sectional curvatures
``K_rad = -phi_w''/phi_w`` and ``K_tan = (1 - phi_w'^2)/phi_w^2``:
``A0_rad = K_rad - K_tan/2`` and ``A0_tan = K_tan/2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, UsageError

FRAMES = ("background", "intrinsic")
WARP_TAGS = ("r", "sin", "sinh")
_TAG_SCHOUTEN = {"r": 0.0, "sin": 0.5, "sinh": -0.5}
ORACLE_TOL = 1e-8


@dataclass(frozen=True)
class RadialGeometry:
    """Rotationally symmetric background metric on ``[r_lo, r_hi]``.

    Use :meth:`flat`, :meth:`warped` or :meth:`from_samples` to build one.
    ``warp`` is a tag from ``("r", "sin", "sinh")`` or a
    :class:`scipy.interpolate.CubicSpline` of sampled ``phi_w``.
    """

    n: int
    kind: str
    warp: Union[str, CubicSpline]
    domain: Tuple[float, float]

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise UsageError(f"n must be an integer >= 3, got {self.n}")
        if self.kind not in ("flat", "warped"):
            raise UsageError(f"kind must be 'flat' or 'warped', got {self.kind!r}")
        lo, hi = map(float, self.domain)
        if not (0.0 <= lo < hi and np.isfinite(hi)):
            raise UsageError(f"invalid radius interval {self.domain}")
        object.__setattr__(self, "domain", (lo, hi))
        if isinstance(self.warp, str) and self.warp not in WARP_TAGS:
            raise UsageError(f"unknown warp tag {self.warp!r}")
        if self.kind == "flat" and self.warp != "r":
            raise UsageError("flat geometry uses warp 'r'")
        grid = np.linspace(lo, hi, 65)
        inner = grid[grid > 0]
        phi = self.phi(inner)[0]
        if np.any(phi <= 0):
            raise DomainError("warp function must be positive on (r_lo, r_hi]")
        if isinstance(self.warp, str):
            # the closed-form tags must reproduce constant curvature
            target = _TAG_SCHOUTEN[self.warp]
            ar, at = self._schouten_generic(inner[inner >= 1e-3])
            if ar.size and max(np.abs(ar - target).max(), np.abs(at - target).max()) > ORACLE_TOL:
                raise DomainError(f"warp {self.warp!r} failed its curvature oracle")

    # constructors
    @classmethod
    def flat(cls, n, r_hi, r_lo=0.0):
        return cls(n, "flat", "r", (r_lo, r_hi))

    @classmethod
    def warped(cls, n, warp, r_hi, r_lo=0.0):
        return cls(n, "warped", warp, (r_lo, r_hi))

    @classmethod
    def from_samples(cls, n, r, phi):
        """Warp from samples via a cubic spline; derivatives carry O(h^2) error."""
        r = np.asarray(r, dtype=float)
        spl = CubicSpline(r, np.asarray(phi, dtype=float))
        return cls(n, "warped", spl, (float(r[0]), float(r[-1])))

    @property
    def is_closed_form(self) -> bool:
        return isinstance(self.warp, str)

    def _check_r(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = self.domain
        span = hi - lo
        if np.any(r < lo - 1e-12 * span) or np.any(r > hi + 1e-12 * span):
            raise DomainError(f"radius outside the domain [{lo}, {hi}]")
        return r

    def phi(self, r):
        """``(phi_w, phi_w', phi_w'')`` at r."""
        r = np.asarray(r, dtype=float)
        w = self.warp
        if w == "r":
            return r.copy(), np.ones_like(r), np.zeros_like(r)
        if w == "sin":
            return np.sin(r), np.cos(r), -np.sin(r)
        if w == "sinh":
            return np.sinh(r), np.cosh(r), np.sinh(r)
        return w(r), w(r, 1), w(r, 2)

    def q(self, r):
        """``phi_w'/phi_w``; 0 is returned at r = 0, where callers use the limit."""
        r = self._check_r(r)
        p, dp, _ = self.phi(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r > 0, dp / np.where(p == 0, 1.0, p), 0.0)
        return out

    def _schouten_generic(self, r):
        p, dp, ddp = self.phi(r)
        krad = -ddp / p
        ktan = (1.0 - dp * dp) / (p * p)
        return krad - 0.5 * ktan, 0.5 * ktan

    def background_schouten(self, r):
        """Eigenvalues ``(A0_rad, A0_tan)`` of ``g0^{-1} A_{g0}`` at r."""
        r = self._check_r(r)
        if self.is_closed_form:
            c = _TAG_SCHOUTEN[self.warp]
            return np.full_like(r, c), np.full_like(r, c)
        ar, at = np.empty_like(r), np.empty_like(r)
        pos = r > 0
        if np.any(self.phi(r[pos])[0] <= 0):
            raise DomainError("warp function is not positive at a requested radius")
        ar[pos], at[pos] = self._schouten_generic(r[pos])
        if np.any(~pos):
            # both sectional curvatures tend to -phi'''(0)/phi'(0)
            kk = -self.warp(0.0, 3) / self.warp(0.0, 1)
            ar[~pos], at[~pos] = 0.5 * kk, 0.5 * kk
        return ar, at


@dataclass(frozen=True)
class RadialJet:
    """Values ``(r, u, u_r, u_rr)``; fields may be scalars or equal-shape arrays."""

    r: object
    u: object
    u_r: object
    u_rr: object


@dataclass(frozen=True)
class SchoutenEigs:
    """Radial and tangential eigenvalues of ``-g^{-1} A_{g_u}``.

    ``frame`` is ``"background"`` (g = g0) or ``"intrinsic"`` (g = g_u);
    ``u`` is the conformal factor needed to move between them.
    """

    radial: object
    tangential: object
    frame: str
    u: object = 0.0

    def __post_init__(self):
        if self.frame not in FRAMES:
            raise UsageError(f"frame must be one of {FRAMES}")

    def to_frame(self, frame: str) -> "SchoutenEigs":
        if frame not in FRAMES:
            raise UsageError(f"frame must be one of {FRAMES}")
        if frame == self.frame:
            return self
        s = np.exp(-2.0 * np.asarray(self.u, dtype=float))
        if frame == "background":
            s = 1.0 / s
        out = SchoutenEigs(
            np.asarray(self.radial) * s, np.asarray(self.tangential) * s, frame, self.u
        )
        # conversions must be mutually inverse
        back = np.asarray(out.radial) / s
        if not np.allclose(back, self.radial, rtol=1e-12, atol=0.0):
            raise ArithmeticError("frame conversion lost precision")
        return out

    def as_vector(self, n: int):
        """Eigenvalue vectors ``(radial, tangential x (n-1))`` as rows."""
        a = np.atleast_1d(np.asarray(self.radial, dtype=float))
        b = np.atleast_1d(np.asarray(self.tangential, dtype=float))
        out = np.empty((a.size, n))
        out[:, 0] = a
        out[:, 1:] = b[:, None]
        return out[0] if np.ndim(self.radial) == 0 else out

    def sigma1(self, n: int):
        return np.asarray(self.radial) + (n - 1) * np.asarray(self.tangential)


def conformal_schouten(A0, u, grad_u, hess_u):
    """Schouten tensor of ``exp(2u) g0`` in an orthonormal frame of ``g0``.

    ``A0 - hess_u - |grad_u|^2 I / 2 + grad_u (x) grad_u``. The value of u
    itself does not enter; it is accepted for a uniform jet signature.
    """
    A0 = np.asarray(A0, dtype=float)
    g = np.asarray(grad_u, dtype=float)
    H = np.asarray(hess_u, dtype=float)
    n = A0.shape[0]
    if A0.shape != (n, n) or H.shape != (n, n) or g.shape != (n,):
        raise UsageError("conformal_schouten expects n x n tensors and an n-vector")
    return A0 - H - 0.5 * float(g @ g) * np.eye(n) + np.outer(g, g)


def radial_eigs(jet: RadialJet, geom: RadialGeometry, symmetric_limit: bool = False,
                frame: str = "background") -> SchoutenEigs:
    """Eigenvalues of ``-g^{-1} A_{g_u}`` for a radial jet.

    With ``symmetric_limit`` the point r = 0 is allowed (``u_r`` must vanish
    there) and the tangential Hessian term uses ``u_r phi_w'/phi_w -> u_rr``.
    """
    r = geom._check_r(jet.r)
    u = np.asarray(jet.u, dtype=float)
    ur = np.asarray(jet.u_r, dtype=float)
    urr = np.asarray(jet.u_rr, dtype=float)
    at_zero = r == 0
    if np.any(at_zero):
        if not symmetric_limit:
            raise DomainError("r = 0 requires symmetric_limit=True")
        if np.any(np.broadcast_to(ur, r.shape)[at_zero] != 0):
            raise DomainError("symmetric limit at r = 0 requires u_r(0) = 0")
    a0r, a0t = geom.background_schouten(r)
    q = geom.q(r)
    hess_t = np.where(at_zero, urr, q * ur)
    rad = urr - 0.5 * ur * ur - a0r
    tan = hess_t + 0.5 * ur * ur - a0t
    if np.ndim(rad) == 0:
        rad, tan = float(rad), float(tan)
    out = SchoutenEigs(rad, tan, "background", u if np.ndim(u) else float(u))
    return out.to_frame(frame)


def radial_eigs_vform(r, v, v_r, v_rr):
    """Intrinsic eigenvalues on a flat background from ``v = exp(-u)``.

    ``g_u^{-1} A_{g_u} = v^2 (lam I + chi x x^T / r^2)`` with

        lam = (v_r / (r v)) (1 - r v_r / (2 v)),  chi = v_rr / v - v_r / (v r),

    so the eigenvalues of ``-g_u^{-1} A_{g_u}`` are ``-v^2 lam`` (tangential)
    and ``-v^2 (lam + chi)`` (radial).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("the v-form needs r > 0")
    lam, chi = vform_lambda_chi(r, v, v_r, v_rr)
    v2 = np.asarray(v, dtype=float) ** 2
    return SchoutenEigs(-v2 * (lam + chi), -v2 * lam, "intrinsic", -np.log(v))


def vform_lambda_chi(r, v, v_r, v_rr):
    """The pair ``(lam, chi)`` of the v-form."""
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    v_r = np.asarray(v_r, dtype=float)
    v_rr = np.asarray(v_rr, dtype=float)
    lam = v_r / (r * v) * (1.0 - r * v_r / (2.0 * v))
    chi = v_rr / v - v_r / (v * r)
    return lam, chi


def warped_background_eigs(geom: RadialGeometry, r) -> SchoutenEigs:
    """Eigenvalues of ``g0^{-1} A_{g0}`` (note: no minus sign)."""
    r = geom._check_r(r)
    ar, at = geom.background_schouten(r)
    if np.ndim(ar) == 0:
        ar, at = float(ar), float(at)
    return SchoutenEigs(ar, at, "background", 0.0)


def ricci_from_schouten(A, n: int):
    """``Ric = (n-2) A + tr(A) g``, inverting the definition of A.

    Accepts an n x n matrix or a :class:`SchoutenEigs`; the map is linear,
    so it sends eigenvalues of ``-g^{-1}A`` to those of ``-g^{-1}Ric``.
    """
    if n < 3:
        raise UsageError("n must be >= 3")
    if isinstance(A, SchoutenEigs):
        tr = A.sigma1(n)
        return SchoutenEigs(
            (n - 2) * np.asarray(A.radial) + tr,
            (n - 2) * np.asarray(A.tangential) + tr,
            A.frame,
            A.u,
        )
    A = np.asarray(A, dtype=float)
    return (n - 2) * A + np.trace(A) * np.eye(A.shape[0])


def schouten_from_ricci(Ric, n: int):
    """``A = (Ric - R g / (2(n-1))) / (n-2)``."""
    if n < 3:
        raise UsageError("n must be >= 3")
    if isinstance(Ric, SchoutenEigs):
        R = Ric.sigma1(n)
        c = R / (2.0 * (n - 1))
        return SchoutenEigs(
            (np.asarray(Ric.radial) - c) / (n - 2),
            (np.asarray(Ric.tangential) - c) / (n - 2),
            Ric.frame,
            Ric.u,
        )
    Ric = np.asarray(Ric, dtype=float)
    R = np.trace(Ric)
    return (Ric - R / (2.0 * (n - 1)) * np.eye(Ric.shape[0])) / (n - 2)


def scalar_curvature_op(jet: RadialJet, geom: RadialGeometry,
                        symmetric_limit: bool = False):
    """``sigma_1`` of the intrinsic eigenvalues, equal to ``-R_{g_u} / (2(n-1))``."""
    e = radial_eigs(jet, geom, symmetric_limit=symmetric_limit, frame="intrinsic")
    s = e.sigma1(geom.n)
    return float(s) if np.ndim(s) == 0 else s


def hyperbolic_factor(r, R: float = 1.0):
    """Poincare-ball factor ``ln(2R/(R^2 - r^2))`` with its two radial derivatives."""
    r = np.asarray(r, dtype=float)
    t = R * R - r * r
    if np.any(t <= 0):
        raise DomainError("hyperbolic factor needs r < R")
    u = np.log(2.0 * R / t)
    ur = 2.0 * r / t
    urr = 2.0 / t + 4.0 * r * r / (t * t)
    return u, ur, urr
