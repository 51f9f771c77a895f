"""Damped-Newton solver for the radial Dirichlet problem.

The discrete equation on a uniform radial grid is the background-frame form

    f^tau(lambda(-g0^{-1} A_{g_u})) = psi exp(2u)   at interior nodes,
    u = xi                                          at Dirichlet nodes,

with second-order central differences, a reflected ghost node at r = 0 on
the ball and a tridiagonal analytic Jacobian. Continuation drivers move the
deformation parameter tau and the boundary value m; the large-m limit on the
ball approximates the complete (boundary blow-up) solution.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from . import _backend
from .cone import ConeSpec, cone_constants, cone_margin, f_value
from .errors import (
    ConeExit,
    LineSearchStall,
    MaxIter,
    MonotonicityViolation,
    OrderingViolation,
    PreconditionError,
    ScheduleExhausted,
    SingularJacobian,
    SolverError,
    StepUnderflow,
    UsageError,
)
from .geometry import RadialGeometry

log = logging.getLogger(__name__)

MIN_NODES = 16


# --- grids and grid functions ----------------------------------------------

@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial nodes ``r_0 < ... < r_N``; ``kind`` is "ball" or "annulus"."""

    nodes: np.ndarray
    kind: str

    def __post_init__(self):
        r = np.asarray(self.nodes, dtype=float)
        if self.kind not in ("ball", "annulus"):
            raise UsageError("grid kind must be 'ball' or 'annulus'")
        if r.ndim != 1 or r.size < MIN_NODES + 1:
            raise UsageError(f"grid needs at least {MIN_NODES} intervals")
        d = np.diff(r)
        if np.any(d <= 0):
            raise UsageError("grid nodes must be strictly increasing")
        if np.max(np.abs(d - d[0])) > 1e-9 * d[0]:
            raise UsageError("only uniform grids are supported")
        if self.kind == "ball" and r[0] != 0.0:
            raise UsageError("a ball grid starts at r = 0")
        r.setflags(write=False)
        object.__setattr__(self, "nodes", r)

    @classmethod
    def uniform(cls, kind: str, r_lo: float, r_hi: float, N: int) -> "RadialGrid":
        """``N`` intervals on ``[r_lo, r_hi]`` (``r_lo`` must be 0 for a ball)."""
        if int(N) != N or N < MIN_NODES:
            raise UsageError(f"N must be an integer >= {MIN_NODES}")
        return cls(np.linspace(r_lo, r_hi, int(N) + 1), kind)

    @property
    def N(self) -> int:
        return self.nodes.size - 1

    @property
    def h(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    @property
    def width(self) -> float:
        return float(self.nodes[-1] - self.nodes[0])

    def boundary_distance(self):
        """Distance of each node to the Dirichlet boundary."""
        r = self.nodes
        if self.kind == "ball":
            return r[-1] - r
        return np.minimum(r - r[0], r[-1] - r)


@dataclass(frozen=True)
class ConformalFactor:
    """Samples of u on a radial grid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.grid.nodes.shape:
            raise UsageError("values do not match the grid")
        if not np.all(np.isfinite(v)):
            raise UsageError("conformal factor has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def shifted(self, c: float) -> "ConformalFactor":
        return ConformalFactor(self.grid, self.values + c)

    def derivatives(self):
        """``(u_r, u_rr)``: central inside, one-sided second order at Dirichlet ends.

        On a ball the r = 0 node uses the reflected ghost (``u_r = 0``).
        """
        u = self.values
        h = self.grid.h
        ur = np.empty_like(u)
        urr = np.empty_like(u)
        ur[1:-1] = (u[2:] - u[:-2]) / (2 * h)
        urr[1:-1] = (u[2:] - 2 * u[1:-1] + u[:-2]) / h ** 2
        ur[-1] = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * h)
        urr[-1] = (2 * u[-1] - 5 * u[-2] + 4 * u[-3] - u[-4]) / h ** 2
        if self.grid.kind == "ball":
            ur[0] = 0.0
            urr[0] = 2 * (u[1] - u[0]) / h ** 2
        else:
            ur[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h)
            urr[0] = (2 * u[0] - 5 * u[1] + 4 * u[2] - u[3]) / h ** 2
        return ur, urr


# --- configuration ---------------------------------------------------------

@dataclass(frozen=True)
class NewtonOptions:
    """Newton tolerances.

    ``tol_residual`` bounds the scaled merit (see :func:`merit`); at the
    roundoff floor a solve is also declared converged once the Newton
    correction falls below ``step_tol * (1 + |u|_inf)``.
    """

    tol_residual: float = 1e-10
    max_iter: int = 60
    damping: float = 0.5
    min_step: float = 2.0 ** -20
    max_backtracks: int = 20
    step_tol: float = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Everything that defines a discrete problem.

    ``boundary`` is a constant m, or for an annulus a pair ``(xi_inner,
    xi_outer)``; on a ball only the outer value is used. ``psi`` defaults
    to 1.
    """

    cone: ConeSpec
    geometry: RadialGeometry
    grid: RadialGrid
    boundary: Union[float, Tuple[float, float]] = 0.0
    psi: Optional[np.ndarray] = None
    newton: NewtonOptions = field(default_factory=NewtonOptions)
    cone_margin: float = 1e-12
    tau_schedule: Tuple[float, ...] = ()
    m_schedule: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.cone.n != self.geometry.n:
            raise UsageError("cone and geometry dimensions differ")
        lo, hi = self.geometry.domain
        r = self.grid.nodes
        if r[0] < lo - 1e-12 or r[-1] > hi + 1e-12:
            raise UsageError("grid leaves the geometry domain")
        if self.grid.kind == "ball" and lo != 0:
            raise UsageError("a ball grid needs a geometry domain starting at 0")
        if self.grid.kind == "ball" and not self.geometry.is_closed_form:
            if abs(self.geometry.warp(0.0)) > 1e-12:
                raise UsageError("a ball needs phi_w(0) = 0")
        if self.psi is not None:
            p = np.asarray(self.psi, dtype=float)
            if p.shape != r.shape or np.any(p <= 0) or not np.all(np.isfinite(p)):
                raise UsageError("psi must be positive samples on the grid")
        xi = self.boundary_values
        if not np.all(np.isfinite(xi)):
            raise UsageError("boundary data must be finite")

    @property
    def tau(self) -> float:
        return self.cone.tau

    @property
    def psi_values(self):
        if self.psi is None:
            return np.ones_like(self.grid.nodes)
        return np.asarray(self.psi, dtype=float)

    @property
    def boundary_values(self):
        """``(xi_inner, xi_outer)``; the inner value is unused on a ball."""
        b = self.boundary
        if np.ndim(b) == 0:
            return np.array([float(b), float(b)])
        b = np.asarray(b, dtype=float)
        if b.shape != (2,):
            raise UsageError("boundary must be a scalar or an (inner, outer) pair")
        return b

    def with_tau(self, tau: float) -> "SolverConfig":
        return replace(self, cone=self.cone.with_tau(tau))

    def with_boundary(self, boundary) -> "SolverConfig":
        return replace(self, boundary=boundary)

    def with_psi(self, psi) -> "SolverConfig":
        return replace(self, psi=psi)

    def to_dict(self):
        g = self.geometry
        return {
            "n": self.cone.n, "k": self.cone.k, "tau": self.cone.tau,
            "normalized": self.cone.normalized,
            "geometry": {"kind": g.kind, "warp": g.warp if g.is_closed_form else "spline",
                         "domain": list(g.domain)},
            "grid": {"kind": self.grid.kind, "r_lo": float(self.grid.nodes[0]),
                     "r_hi": float(self.grid.nodes[-1]), "N": self.grid.N},
            "boundary": [float(x) for x in self.boundary_values],
            "psi": "ones" if self.psi is None else "samples",
            "newton": {"tol_residual": self.newton.tol_residual,
                       "max_iter": self.newton.max_iter,
                       "damping": self.newton.damping,
                       "min_step": self.newton.min_step},
            "cone_margin": self.cone_margin,
        }


# --- discrete system -------------------------------------------------------

@dataclass
class _System:
    F: np.ndarray
    fbg: np.ndarray
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    margin: np.ndarray
    fail: np.ndarray
    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class Tridiagonal:
    """Jacobian bands: ``lower[i] = dF_i/du_{i-1}``, ``upper[i] = dF_i/du_{i+1}``."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def dense(self):
        n = self.diag.size
        J = np.diag(self.diag)
        J[np.arange(1, n), np.arange(n - 1)] = self.lower[1:]
        J[np.arange(n - 1), np.arange(1, n)] = self.upper[:-1]
        return J

    def banded(self):
        n = self.diag.size
        ab = np.zeros((3, n))
        ab[0, 1:] = self.upper[:-1]
        ab[1] = self.diag
        ab[2, :-1] = self.lower[1:]
        return ab


class _Problem:
    """Per-config constant arrays."""

    def __init__(self, cfg: SolverConfig):
        self.cfg = cfg
        g = cfg.grid
        self.r = g.nodes
        self.h = g.h
        self.ball = g.kind == "ball"
        self.q = cfg.geometry.q(self.r)
        self.a0r, self.a0t = cfg.geometry.background_schouten(self.r)
        self.a0r = np.ascontiguousarray(self.a0r)
        self.a0t = np.ascontiguousarray(self.a0t)
        self.psi = np.ascontiguousarray(cfg.psi_values)
        self.xi = cfg.boundary_values
        self.interior = np.arange(0 if self.ball else 1, g.N)

    def system(self, u) -> _System:
        c = self.cfg.cone
        out = _backend.radial_system(
            np.ascontiguousarray(u, dtype=float), self.q, self.a0r, self.a0t, self.psi,
            self.h, c.n, c.k, c.tau, c.norm_const, self.ball,
        )
        s = _System(*out)
        N = self.r.size - 1
        s.F[N] = u[N] - self.xi[1]
        s.diag[N] = 1.0
        s.lower[N] = 0.0
        s.upper[N] = 0.0
        if not self.ball:
            s.F[0] = u[0] - self.xi[0]
            s.diag[0] = 1.0
            s.lower[0] = 0.0
            s.upper[0] = 0.0
        return s

    def merit(self, u, s: _System) -> float:
        """Scaled residual ``max(|F_i| / (psi_i e^{2u_i}), |u - xi| on the boundary)``."""
        it = self.interior
        w = np.abs(s.F[it]) / (self.psi[it] * np.exp(2.0 * u[it]))
        bd = [abs(s.F[-1])] if self.ball else [abs(s.F[0]), abs(s.F[-1])]
        return float(max(np.max(w), max(bd)))

    def cone_exit(self, u, s: _System, state=None) -> Optional[ConeExit]:
        it = self.interior
        bad = it[s.fail[it] != 0]
        if bad.size == 0:
            return None
        i = int(bad[0])
        n = self.cfg.cone.n
        eig = [float(s.a[i])] + [float(s.b[i])] * (n - 1)
        return ConeExit(i, eig, int(s.fail[i]), state=state)


def residual(u: ConformalFactor, cfg: SolverConfig):
    """Discrete residual vector; raises :class:`ConeExit` outside the cone."""
    _check_grid(u, cfg)
    p = _Problem(cfg)
    s = p.system(u.values)
    err = p.cone_exit(u.values, s, state=u)
    if err is not None:
        raise err
    return s.F


def jacobian(u: ConformalFactor, cfg: SolverConfig) -> Tridiagonal:
    """Analytic tridiagonal Jacobian of :func:`residual`."""
    _check_grid(u, cfg)
    p = _Problem(cfg)
    s = p.system(u.values)
    err = p.cone_exit(u.values, s, state=u)
    if err is not None:
        raise err
    return Tridiagonal(s.lower.copy(), s.diag.copy(), s.upper.copy())


def merit(u: ConformalFactor, cfg: SolverConfig) -> float:
    """Scaled residual used for convergence and line-search descent."""
    p = _Problem(cfg)
    s = p.system(u.values)
    err = p.cone_exit(u.values, s, state=u)
    if err is not None:
        raise err
    return p.merit(u.values, s)


def _check_grid(u, cfg):
    if u.grid.nodes.shape != cfg.grid.nodes.shape or not np.array_equal(u.grid.nodes, cfg.grid.nodes):
        raise UsageError("conformal factor lives on a different grid")


# --- reports ---------------------------------------------------------------

@dataclass
class SolveReport:
    """Outcome of a Newton solve with diagnostics and provenance."""

    converged: bool
    iterations: int
    residual_inf: float
    merit: float
    margins: np.ndarray
    min_margin: float
    history: list
    steps: list
    diagnostics: dict
    provenance: dict
    config: dict

    def to_dict(self):
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "residual_inf": self.residual_inf,
            "merit": self.merit,
            "min_margin": self.min_margin,
            "history": list(self.history),
            "steps": list(self.steps),
            "diagnostics": dict(self.diagnostics),
            "provenance": dict(self.provenance),
            "config": dict(self.config),
        }


def _provenance():
    from importlib.metadata import PackageNotFoundError, version

    try:
        pkg = version("artifact")
    except PackageNotFoundError:  # running from a source tree
        pkg = "unknown"
    return {"backend": _backend.BACKEND, "package_version": pkg, "numpy": np.__version__}


def diagnostics(u: ConformalFactor, cfg: SolverConfig, band=(0.02, 0.2)) -> dict:
    """Report-only diagnostics of a grid function.

    * ``lipschitz``: ``max |u_r|``;
    * ``asymptotic_defect``: ``sup |u + ln d|`` over ``d in band * width``;
    * ``asymptotic_defect_hyperbolic`` (flat ball only): the same after
      subtracting the exact ``ln(2R/(R + r))`` of the complete hyperbolic factor;
    * ``gradient_bound_C``: ``max |u_r| / (1/rho + exp(sup_{B_rho} u))`` over
      interior nodes, ``rho = d/2``;
    * ``hessian_max``: ``max |u_rr|`` over interior nodes.
    """
    g = cfg.grid
    ur, urr = u.derivatives()
    d = g.boundary_distance()
    lo, hi = band
    if not 0 <= lo < hi:
        raise UsageError("band must satisfy 0 <= d_lo < d_hi")
    width = g.nodes[-1] if g.kind == "ball" else g.width
    sel = (d >= lo * width - 1e-12) & (d <= hi * width + 1e-12) & (d > 0)
    out = {
        "lipschitz": float(np.max(np.abs(ur))),
        "hessian_max": float(np.max(np.abs(urr[1:-1]))),
        "band": [float(lo), float(hi)],
        "band_nodes": int(sel.sum()),
    }
    if sel.any():
        val = u.values[sel] + np.log(d[sel])
        out["asymptotic_defect"] = float(np.max(np.abs(val)))
        if g.kind == "ball" and cfg.geometry.kind == "flat":
            R = g.nodes[-1]
            corr = val - np.log(2 * R / (R + g.nodes[sel]))
            out["asymptotic_defect_hyperbolic"] = float(np.max(np.abs(corr)))
    else:
        out["asymptotic_defect"] = None
    inner = np.flatnonzero(d > 2 * g.h)
    if inner.size:
        v = u.values
        r = g.nodes
        C = 0.0
        for i in inner:
            rho = 0.5 * d[i]
            near = np.abs(r - r[i]) <= rho
            C = max(C, abs(ur[i]) / (1.0 / rho + np.exp(np.max(v[near]))))
        out["gradient_bound_C"] = float(C)
    return out


def _report(u, cfg, p, s, converged, it, history, steps, extra=None):
    it_nodes = p.interior
    margins = np.zeros_like(u)
    margins[it_nodes] = s.margin[it_nodes]
    uf = ConformalFactor(cfg.grid, u)
    diag = diagnostics(uf, cfg)
    if extra:
        diag.update(extra)
    return SolveReport(
        converged=converged,
        iterations=it,
        residual_inf=float(np.max(np.abs(s.F))),
        merit=p.merit(u, s),
        margins=margins,
        min_margin=float(np.min(s.margin[it_nodes])),
        history=history,
        steps=steps,
        diagnostics=diag,
        provenance=_provenance(),
        config=cfg.to_dict(),
    )


# --- initialization --------------------------------------------------------

def lift_shape(cfg: SolverConfig):
    """Shape q vanishing on the Dirichlet boundary used to lift a start into the cone.

    Ball: ``(r^2 - R^2) / (2 R^2)``. Annulus: ``alpha r^2 + beta r^{2-n} + gamma``
    with ``alpha = 1 / (2 width^2)``, which has constant positive Laplacian.
    """
    r = cfg.grid.nodes
    n = cfg.cone.n
    if cfg.grid.kind == "ball":
        R = r[-1]
        return (r * r - R * R) / (2 * R * R)
    a, b = r[0], r[-1]
    al = 1.0 / (2.0 * (b - a) ** 2)
    # beta r^{2-n} + gamma interpolates -alpha r^2 at both ends
    pa, pb = a ** (2 - n), b ** (2 - n)
    beta = -al * (b * b - a * a) / (pb - pa)
    gamma = -al * a * a - beta * pa
    return al * r * r + beta * r ** (2 - n) + gamma


def lift_into_cone(u0, cfg: SolverConfig, p: Optional[_Problem] = None):
    """Add ``s * lift_shape`` for s on the grid ``2^-20 .. 2^20``.

    The chosen s is the smallest one whose cone margin reaches half the best
    margin over the grid; larger s only push the start away from the
    solution. Raises :class:`ConeExit` when no scale is admissible.
    """
    p = p or _Problem(cfg)
    q = lift_shape(cfg)
    it = p.interior
    cands = []
    last = None
    for e in range(-20, 21):
        cand = u0 + 2.0 ** e * q
        sysm = p.system(cand)
        last = (cand, sysm)
        if np.all(sysm.fail[it] == 0) and np.max(np.abs(cand[it])) < 300.0:
            m = float(np.min(sysm.margin[it]))
            if m >= cfg.cone_margin:
                cands.append((m, cand))
    if not cands:
        cand, sysm = last
        err = p.cone_exit(cand, sysm, state=ConformalFactor(cfg.grid, cand))
        raise err or ConeExit(int(it[0]), [0.0] * cfg.cone.n, 1)
    best = max(m for m, _ in cands)
    for m, cand in cands:
        if m >= 0.5 * best:
            return cand
    return cands[-1][1]


def constant_start(cfg: SolverConfig) -> ConformalFactor:
    """Constant equal to the outer boundary value (inner/outer average on an annulus)."""
    xi = cfg.boundary_values
    c = xi[1] if cfg.grid.kind == "ball" else 0.5 * (xi[0] + xi[1])
    return ConformalFactor(cfg.grid, np.full(cfg.grid.nodes.shape, c))


# --- Newton ----------------------------------------------------------------

def newton_solve(cfg: SolverConfig, initial: ConformalFactor, lift: bool = False):
    """Damped Newton with backtracking.

    A trial step is accepted only when every interior jet stays in the cone
    with margin at least ``cfg.cone_margin`` and the scaled merit decreases.
    With ``lift`` an inadmissible start is first lifted by
    :func:`lift_into_cone`; otherwise it raises :class:`ConeExit`.

    Returns
    -------
    (ConformalFactor, SolveReport)
    """
    if not cfg.tau < 1.0:
        raise UsageError("plain Newton solves need tau < 1")
    _check_grid(initial, cfg)
    opt = cfg.newton
    p = _Problem(cfg)
    u = np.array(initial.values, dtype=float)
    s = p.system(u)
    it_nodes = p.interior

    def admissible(sysm):
        return np.all(sysm.fail[it_nodes] == 0) and np.min(sysm.margin[it_nodes]) >= cfg.cone_margin

    if not admissible(s):
        if not lift:
            err = p.cone_exit(u, s, state=initial)
            if err is None:
                err = ConeExit(int(it_nodes[np.argmin(s.margin[it_nodes])]), [0.0] * cfg.cone.n, 1,
                               state=initial)
            raise err
        u = lift_into_cone(u, cfg, p)
        s = p.system(u)

    mer = p.merit(u, s)
    history = [mer]
    steps = []
    for it in range(1, opt.max_iter + 1):
        if mer <= opt.tol_residual:
            return ConformalFactor(cfg.grid, u), _report(u, cfg, p, s, True, it - 1, history, steps)
        J = Tridiagonal(s.lower, s.diag, s.upper)
        try:
            delta = solve_banded((1, 1), J.banded(), -s.F, check_finite=True)
        except (LinAlgError, ValueError) as exc:
            raise SingularJacobian(f"tridiagonal solve failed: {exc}",
                                   state=ConformalFactor(cfg.grid, u)) from exc
        if not np.all(np.isfinite(delta)):
            raise SingularJacobian("non-finite Newton step", state=ConformalFactor(cfg.grid, u))
        dnorm = float(np.max(np.abs(delta)))
        if dnorm <= opt.step_tol * (1.0 + float(np.max(np.abs(u)))):
            # correction at the roundoff level: nothing left to gain
            return ConformalFactor(cfg.grid, u), _report(u, cfg, p, s, True, it - 1, history, steps,
                                                         {"stopped_on": "step"})
        t = 1.0
        accepted = False
        for _ in range(opt.max_backtracks + 1):
            trial = u + t * delta
            st = p.system(trial)
            if admissible(st):
                mt = p.merit(trial, st)
                if mt < mer:
                    accepted = True
                    break
            t *= opt.damping
            if t < opt.min_step:
                break
        if not accepted:
            raise LineSearchStall(
                f"no admissible descent step down to length {opt.min_step:g} "
                f"(iteration {it}, merit {mer:.3e})",
                state=ConformalFactor(cfg.grid, u), iteration=it, merit=mer,
            )
        u, s, mer = trial, st, mt
        history.append(mer)
        steps.append(t)
        log.debug("newton it=%d merit=%.3e step=%g", it, mer, t)
    if mer <= opt.tol_residual:
        return ConformalFactor(cfg.grid, u), _report(u, cfg, p, s, True, opt.max_iter, history, steps)
    raise MaxIter(f"no convergence in {opt.max_iter} iterations (merit {mer:.3e})",
                  state=ConformalFactor(cfg.grid, u), merit=mer)


# --- continuation ----------------------------------------------------------

def _continue(values, solve_at, first_state, min_step, what):
    """Walk through increasing ``values`` with step bisection on failure.

    ``solve_at(x, start)`` returns (state, report). Intermediate parameters
    inserted by bisection are solved but not returned.
    """
    out = []
    xs = list(values)
    cur_x, cur_u = xs[0], None
    cur_u, rep = solve_at(cur_x, first_state)
    out.append((cur_u, rep))
    for target in xs[1:]:
        x = cur_x
        while x < target:
            step = target - x
            while True:
                trial = min(target, x + step)
                try:
                    nu, nrep = solve_at(trial, cur_u)
                    break
                except SolverError as exc:
                    step *= 0.5
                    log.info("%s continuation: failure at %g (%s), step -> %g",
                             what, trial, type(exc).__name__, step)
                    if step < min_step:
                        raise StepUnderflow(
                            f"{what} step fell below {min_step:g} after {x:g}",
                            last_good=x, state=cur_u,
                        ) from exc
            x, cur_u = trial, nu
        cur_x = target
        out.append((cur_u, nrep))
    return out


def continue_tau(cfg: SolverConfig, tau_targets: Sequence[float], min_step: float = 1e-4):
    """Continuation in tau from the semilinear problem at tau = 0.

    The tau = 0 solve starts from the lifted boundary constant; every later
    target is warm-started from the previous solution. Results are returned
    for each requested target.
    """
    targets = [float(t) for t in tau_targets]
    if not targets:
        raise UsageError("tau_targets is empty")
    if any(b <= a for a, b in zip(targets, targets[1:])) or targets[0] < 0 or targets[-1] >= 1:
        raise UsageError("tau targets must be increasing in [0, 1)")
    seq = targets if targets[0] == 0.0 else [0.0] + targets

    def solve_at(tau, start):
        c = cfg.with_tau(tau)
        return newton_solve(c, start, lift=True)

    res = _continue(seq, solve_at, constant_start(cfg), min_step, "tau")
    if targets[0] != 0.0:
        res = res[1:]
    for (u, rep), tau in zip(res, targets):
        rep.diagnostics["tau"] = tau
    return res


def continue_m(cfg: SolverConfig, m_schedule: Sequence[float], min_step: float = 1e-3,
               slack: Optional[float] = None):
    """Dirichlet solves ``u = m`` on the boundary for increasing m.

    Asserts ``u_{m_{j+1}} >= u_{m_j} - slack`` at every node (``slack =
    10 h^2`` by default) and records in each report the sup of the increment
    over nodes at distance at least ``0.2 * width`` from the boundary, and
    its ratio to the previous increment.
    """
    ms = [float(m) for m in m_schedule]
    if not ms:
        raise UsageError("m_schedule is empty")
    if any(b <= a for a, b in zip(ms, ms[1:])):
        raise UsageError("m_schedule must be increasing")
    if not cfg.tau < 1.0:
        raise UsageError("continuation in m needs tau < 1")
    h = cfg.grid.h
    slack = 10 * h * h if slack is None else slack

    def solve_at(m, start):
        c = cfg.with_boundary(m)
        return newton_solve(c, start, lift=True)

    first = ConformalFactor(cfg.grid, np.full(cfg.grid.nodes.shape, ms[0]))
    res = _continue(ms, solve_at, first, min_step, "m")
    d = cfg.grid.boundary_distance()
    width = cfg.grid.nodes[-1] if cfg.grid.kind == "ball" else cfg.grid.width
    core = d >= 0.2 * width
    prev_inc = None
    for j, (u, rep) in enumerate(res):
        rep.diagnostics["m"] = ms[j]
        if j == 0:
            continue
        diff = u.values - res[j - 1][0].values
        bad = np.flatnonzero(diff < -slack)
        if bad.size:
            i = int(bad[0])
            raise MonotonicityViolation(
                i, [float(res[j - 1][0].values[i]), float(u.values[i])], state=u
            )
        inc = float(np.max(diff[core])) if core.any() else float("nan")
        rep.diagnostics["increment"] = inc
        if prev_inc is not None and prev_inc > 0:
            rep.diagnostics["cauchy_ratio"] = inc / prev_inc
        prev_inc = inc
    return res


def singular_solve(cfg: SolverConfig, m_schedule: Sequence[float] = tuple(range(2, 17, 2)),
                   inc_tol: float = 1e-3, band=(0.02, 0.2)):
    """Approximate the complete solution as the limit of ``u_m``.

    Walks the m-schedule (capped at 16 by default) until the increment on
    the core ``d >= 0.2 width`` drops below ``inc_tol``, then returns the
    last iterate with diagnostics on ``band``.
    """
    mu = cone_constants(cfg.cone).mu_plus
    if not mu > 1.0:
        raise PreconditionError(f"mu_plus = {mu:.6g} must exceed 1")
    if not cfg.tau < 1.0:
        raise UsageError("the singular driver needs tau < 1")
    ms = list(m_schedule)
    for j in range(1, len(ms)):
        res = continue_m(cfg, ms[: j + 1])
        inc = res[-1][1].diagnostics.get("increment")
        if inc is not None and inc < inc_tol:
            u, rep = res[-1]
            rep.diagnostics.update(diagnostics(u, cfg.with_boundary(ms[j]), band))
            rep.diagnostics["m"] = ms[j]
            rep.diagnostics["m_schedule"] = [float(m) for m in ms[: j + 1]]
            return u, rep
    raise ScheduleExhausted(f"increments stayed above {inc_tol:g} up to m = {ms[-1]:g}")


# --- comparison ------------------------------------------------------------

@dataclass
class CompareReport:
    min_gap: float
    worst_node: int
    slack: float
    nodes_checked: int
    f_order_ok: Optional[bool]

    def to_dict(self):
        return dict(self.__dict__)


def _values_on(w, grid):
    if isinstance(w, ConformalFactor):
        return np.asarray(w.values, dtype=float)
    if callable(w):
        return np.asarray(w(grid.nodes), dtype=float)
    return np.asarray(w, dtype=float)


def compare(lower, upper, grid: Optional[RadialGrid] = None, slack: Optional[float] = None,
            f_lower=None, f_upper=None) -> CompareReport:
    """Assert ``lower <= upper + slack`` at every node where both are finite.

    Each side may be a :class:`ConformalFactor`, an array on the grid or a
    callable of r. ``slack`` defaults to ``10 h^2``. When intrinsic
    f-values (divided by psi) are given for both sides, the dominated side
    must have the larger one, ``f_lower >= f_upper`` up to 1e-8 relative.
    """
    if grid is None:
        for side in (lower, upper):
            if isinstance(side, ConformalFactor):
                grid = side.grid
                break
    if grid is None:
        raise UsageError("a grid is needed when neither side is a ConformalFactor")
    lo = _values_on(lower, grid)
    up = _values_on(upper, grid)
    if lo.shape != grid.nodes.shape or up.shape != grid.nodes.shape:
        raise UsageError("compared functions do not match the grid")
    slack = 10 * grid.h ** 2 if slack is None else float(slack)
    ok = np.isfinite(lo) & np.isfinite(up)
    gap = np.where(ok, up - lo, np.inf)
    i = int(np.argmin(gap))
    f_ok = None
    if f_lower is not None and f_upper is not None:
        fl = np.asarray(f_lower, dtype=float)
        fu = np.asarray(f_upper, dtype=float)
        both = np.isfinite(fl) & np.isfinite(fu)
        f_ok = bool(np.all(fl[both] >= fu[both] * (1 - 1e-8)))
    if gap[i] < -slack:
        raise OrderingViolation(i, lo[i], up[i], slack)
    return CompareReport(float(gap[i]), i, slack, int(ok.sum()), f_ok)


def intrinsic_f(u: ConformalFactor, cfg: SolverConfig):
    """Intrinsic ``f^tau`` at interior nodes (NaN at Dirichlet nodes or outside the cone)."""
    p = _Problem(cfg)
    s = p.system(u.values)
    out = np.full(u.values.shape, np.nan)
    it = p.interior
    ok = it[s.fail[it] == 0]
    out[ok] = s.fbg[ok] * np.exp(-2.0 * u.values[ok])
    return out


def hyperbolic_oracle(grid: RadialGrid, R: float = None) -> np.ndarray:
    """``ln(2R/(R^2 - r^2))`` on the grid (R defaults to 1)."""
    R = 1.0 if R is None else R
    r = grid.nodes
    return np.log(2 * R / (R * R - r * r))


def grid_table(u: ConformalFactor, cfg: SolverConfig):
    """Columns ``r, u, u_r, u_rr, eig_radial, eig_tangential, f_value, cone_margin``.

    Eigenvalues are intrinsic; derivatives use the stencils of
    :meth:`ConformalFactor.derivatives`. Nodes outside the cone carry NaN in
    ``f_value``.
    """
    r = cfg.grid.nodes
    ur, urr = u.derivatives()
    a0r, a0t = cfg.geometry.background_schouten(r)
    q = cfg.geometry.q(r)
    hess_t = np.where(r == 0, urr, q * ur)
    a = urr - 0.5 * ur * ur - a0r
    b = hess_t + 0.5 * ur * ur - a0t
    scale = np.exp(-2.0 * u.values)
    ea, eb = a * scale, b * scale
    n = cfg.cone.n
    vec = np.empty((r.size, n))
    vec[:, 0] = ea
    vec[:, 1:] = eb[:, None]
    cm = cone_margin(vec, cfg.cone)
    fv = np.full(r.size, np.nan)
    ok = cm > 0
    if ok.any():
        fv[ok] = f_value(vec[ok], cfg.cone)
    return {
        "r": r, "u": u.values, "u_r": ur, "u_rr": urr,
        "eig_radial": ea, "eig_tangential": eb, "f_value": fv, "cone_margin": cm,
    }
