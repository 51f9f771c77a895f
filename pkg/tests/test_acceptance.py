"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every criterion runs at its stated tolerance. Sub-checks are reported
individually on the printed line; the test fails if any sub-check fails.
"""
import time

import numpy as np

from schouten.barriers import (
    AnnulusLog,
    CollarLog,
    GuanUpper,
    LNSuper,
    annulus_barrier_value,
    guan_sigma1,
    search_collar_params,
    verify_annulus_barrier,
    verify_collar_barrier,
    verify_guan_upper,
    verify_ln_supersolution,
)
from schouten.cone import ConeSpec, check_structure, cone_constants, mu_plus, mu_plus_exact, mu_plus_linear
from schouten.errors import SolverError
from schouten.geometry import (
    RadialGeometry,
    RadialJet,
    hyperbolic_factor,
    radial_eigs,
    radial_eigs_vform,
)
from schouten.solver import (
    ConformalFactor,
    RadialGrid,
    SolverConfig,
    compare,
    constant_start,
    continue_m,
    continue_tau,
    diagnostics,
    hyperbolic_oracle,
    jacobian,
    lift_shape,
    newton_solve,
)
from tests.conftest import fd_jacobian


def report(capsys, number, checks, t0):
    """Print one line for the criterion and return overall success."""
    ok = all(c[1] for c in checks)
    parts = "; ".join(f"{name} {'ok' if good else 'FAILED'} ({detail})" for name, good, detail in checks)
    with capsys.disabled():
        print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} in {time.perf_counter() - t0:.2f}s: {parts}")
    return ok


def test_criterion_1_cone_constants(capsys):
    t0 = time.perf_counter()
    err_plain = max(abs(mu_plus(ConeSpec(n, k)) - (n - k) / k)
                    for n in range(3, 11) for k in range(1, n + 1))
    taus = (0.0, 0.25, 0.5, 0.75, 1.0)
    err_closed, err_exact = 0.0, 0.0
    for n in range(3, 11):
        for k in range(1, n + 1):
            for tau in taus:
                mu = mu_plus(ConeSpec(n, k, tau))
                err_closed = max(err_closed, abs(mu - mu_plus_linear(n, k, tau)))
                err_exact = max(err_exact, abs(mu - mu_plus_exact(n, k, tau)))
    checks = [
        ("undeformed (n-k)/k", err_plain <= 1e-10, f"max err {err_plain:.1e}"),
        ("deformed vs linear closed form", err_closed <= 1e-10, f"max err {err_closed:.3g}"),
        ("deformed vs exact boundary formula (reference)", err_exact <= 1e-10, f"max err {err_exact:.1e}"),
    ]
    assert report(capsys, 1, checks, t0)


def test_criterion_2_structure_suite(capsys):
    t0 = time.perf_counter()
    checks = []
    for n, k, tau in [(5, 2, 1.0), (7, 3, 1.0), (5, 2, 0.75), (9, 4, 0.5)]:
        rep = check_structure(ConeSpec(n, k, tau), 10_000, seed=0, slack=1e-10)
        checks.append((f"({n},{k},{tau})", rep.passed, f"{rep.total_violations} violations"))
    assert report(capsys, 2, checks, t0)


def test_criterion_3_geometry_oracles(capsys):
    t0 = time.perf_counter()
    r = np.linspace(0.0, 1.0, 1001)
    errs = []
    for geom, value in [(RadialGeometry.flat(5, 1.0), 0.0),
                        (RadialGeometry.warped(5, "sin", 1.0), 0.5),
                        (RadialGeometry.warped(5, "sinh", 1.0), -0.5)]:
        ar, at = geom.background_schouten(r)
        errs.append(max(np.abs(ar - value).max(), np.abs(at - value).max()))
        ar2, at2 = geom._schouten_generic(r[1:])
        errs.append(max(np.abs(ar2 - value).max(), np.abs(at2 - value).max()))
    cc_err = max(errs)

    rng = np.random.default_rng(0)
    m = 1000
    rr = rng.uniform(0.05, 2.0, m)
    v = rng.uniform(0.2, 3.0, m)
    vr, vrr = rng.normal(size=m), rng.normal(size=m)
    eu = radial_eigs(RadialJet(rr, -np.log(v), -vr / v, -vrr / v + (vr / v) ** 2),
                     RadialGeometry.flat(5, 2.0), frame="intrinsic")
    ev = radial_eigs_vform(rr, v, vr, vrr)
    scale = np.maximum(1.0, np.maximum(np.abs(eu.radial), np.abs(eu.tangential)))
    uv_err = max(np.max(np.abs(eu.radial - ev.radial) / scale),
                 np.max(np.abs(eu.tangential - ev.tangential) / scale))

    grid = RadialGrid.uniform("ball", 0.0, 0.99, 1000).nodes
    u, ur, urr = hyperbolic_factor(grid)
    eh = radial_eigs(RadialJet(grid, u, ur, urr), RadialGeometry.flat(5, 0.99),
                     symmetric_limit=True, frame="intrinsic")
    hyp_err = max(np.abs(eh.radial - 0.5).max(), np.abs(eh.tangential - 0.5).max())
    checks = [
        ("constant curvature 0, +1/2, -1/2", cc_err <= 1e-8, f"max err {cc_err:.1e}"),
        ("u-form vs v-form on 1000 jets", uv_err <= 1e-12, f"max rel err {uv_err:.1e}"),
        ("hyperbolic factor gives e/2", hyp_err <= 1e-8, f"max err {hyp_err:.1e}"),
    ]
    assert report(capsys, 3, checks, t0)


def test_criterion_4_barrier_suite(capsys):
    t0 = time.perf_counter()
    checks = []
    fails = 0
    total = 0
    for n, k in [(5, 2), (7, 2), (7, 3)]:
        cone = ConeSpec(n, k)
        for eps in (0.25, 0.5, 1.0):
            probe = AnnulusLog(cone, 0.0, eps, 0.01, 0.010001, strict=False)
            for frac in (0.25, 0.5, 0.9):
                rp = 0.01 * (1 + frac * (probe.window_bound - 1))
                rep = verify_annulus_barrier(AnnulusLog(cone, 0.0, eps, 0.01, rp), 1000)
                total += 1
                fails += not rep.passed
    checks.append(("AnnulusLog 3 cones x 3x3 (eps, r_+)", fails == 0, f"{total - fails}/{total} pass"))
    for n in (3, 5):
        rep = verify_ln_supersolution(LNSuper(n, 0.05, 0.01), 1000)
        checks.append((f"LNSuper n={n}", rep.passed, f"margin {rep.min_inequality_margin:.3g}"))
    geom = RadialGeometry.flat(4, 1.0)
    rep = verify_guan_upper(GuanUpper(4), geom, 1000)
    delta = rep.measured["delta_star"]
    s1 = guan_sigma1(GuanUpper(4), geom, delta, np.linspace(0, delta, 1000, endpoint=False))
    checks.append(("GuanUpper", rep.passed and delta > 0 and bool(np.all(s1 <= 0)),
                   f"delta* = {delta:g}, max sigma_1 = {s1.max():.3g}"))
    cones = [ConeSpec(5, 2, 1.0), ConeSpec(5, 2, 0.75), ConeSpec(5, 1, 0.5), ConeSpec(5, 5, 1.0)]
    rep = verify_collar_barrier(CollarLog(0.1, 1.0), RadialGeometry.flat(5, 1.0), 1000, cones)
    emin = rep.measured["min_eigenvalue"]
    checks.append(("CollarLog", rep.passed and emin >= 0.5 - 1e-10, f"min eigenvalue {emin:.6f}"))
    assert report(capsys, 4, checks, t0)


def _oracle_error(n, k, tau, N, R=0.9):
    g = RadialGrid.uniform("ball", 0.0, R, N)
    cfg = SolverConfig(ConeSpec(n, k, tau), RadialGeometry.flat(n, R), g)
    exact = hyperbolic_oracle(g)
    cfg = cfg.with_boundary(float(exact[-1]))
    u, rep = newton_solve(cfg, constant_start(cfg), lift=True)
    return rep.converged, float(np.max(np.abs(u.values - exact)))


def test_criterion_5_exact_solution(capsys):
    t0 = time.perf_counter()
    checks = []
    for n, k, tau in [(3, 1, 0.0), (5, 2, 0.5), (5, 2, 0.9)]:
        res = [_oracle_error(n, k, tau, N) for N in (100, 200, 400, 800)]
        errs = np.array([e for _, e in res])
        orders = np.log2(errs[:-1] / errs[1:])
        ok = all(c for c, _ in res) and errs[2] <= 5e-4 and bool(np.all(np.abs(orders - 2) <= 0.2))
        checks.append((f"({n},{k},{tau})", ok,
                       f"err(400) {errs[2]:.2e}, orders {', '.join(f'{o:.2f}' for o in orders)}"))
    assert report(capsys, 5, checks, t0)


def test_criterion_6_singular_limit(capsys):
    t0 = time.perf_counter()
    N = 800
    g = RadialGrid.uniform("ball", 0.0, 1.0, N)
    cfg = SolverConfig(ConeSpec(5, 2, 0.9), RadialGeometry.flat(5, 1.0), g)
    slack = 10 * g.h ** 2
    ms = [2, 4, 6, 8, 10, 12]
    try:
        res = continue_m(cfg, ms, slack=slack)
        mono_ok, mono_detail = True, "no decrease beyond 10 h^2"
    except SolverError as exc:
        res, mono_ok, mono_detail = None, False, str(exc)
    checks = [("monotone in m", mono_ok, mono_detail)]
    assert res is not None, mono_detail

    r = g.nodes
    ustar = np.log(2.0 / (1.0 - r[:-1] ** 2))
    excess = max(float(np.max(u.values[:-1] - ustar)) for u, _ in res)
    core = r[:-1] <= 0.8
    core_excess = max(float(np.max((u.values[:-1] - ustar)[core])) for u, _ in res)
    checks.append(("u_m <= u* + 10 h^2", excess <= slack,
                   f"max excess {excess:.3g} (core r<=0.8: {core_excess:.3g}) vs {slack:.1e}"))

    u = res[-1][0]
    d12 = diagnostics(u, cfg.with_boundary(12.0), band=(0.05, 0.2))
    hyp = d12["asymptotic_defect_hyperbolic"]
    raw = d12["asymptotic_defect"]
    checks.append(("asymptotic defect <= 0.05 on [0.05, 0.2]", hyp <= 0.05,
                   f"hyperbolic-corrected {hyp:.4f}, raw {raw:.4f}"))

    d = 1.0 - r
    band = (d >= 0.05 - 1e-12) & (d <= 0.2 + 1e-12)
    val = u.values[band] + np.log(d[band])
    C = float(np.max(val / np.sqrt(d[band])))
    upper_ok = bool(np.all(val <= C * np.sqrt(d[band]) + 1e-14))
    checks.append(("upper envelope C sqrt(d)", upper_ok, f"fitted C = {C:.4f}"))

    eps, a, crep = search_collar_params(RadialGeometry.flat(5, 1.0))
    lower = np.log(np.sqrt(1.0 - 2.0 * eps)) - np.log1p(a * d[band])
    gap = float(np.min(val - lower))
    checks.append(("lower envelope", crep.passed and gap >= 0,
                   f"eps = {eps:g}, a = {a:g}, min gap {gap:.4f}"))
    assert report(capsys, 6, checks, t0)


def _annulus_cfg(N=400):
    g = RadialGrid.uniform("annulus", 0.5, 1.0, N)
    return SolverConfig(ConeSpec(5, 2, 0.9), RadialGeometry.flat(5, 1.0, 0.5), g, boundary=2.0)


def test_criterion_7_comparison_uniqueness(capsys):
    t0 = time.perf_counter()
    cfg = _annulus_cfg()
    ua = continue_tau(cfg, [0.0, 0.25, 0.5, 0.75, 0.9])[-1][0]
    ub, _ = newton_solve(cfg, constant_start(cfg), lift=True)
    diff = float(np.max(np.abs(ua.values - ub.values)))

    cone = cfg.cone
    beta = cone_constants(cone).beta
    eps = 4.0
    rp = min(0.5 * (1 + 0.9 * eps / (2 * (beta + 2))), 1.0)
    shape = AnnulusLog(cone, 0.0, eps, 0.5, rp)
    from schouten.barriers import annulus_eigs
    from schouten.cone import f_value

    rr = cfg.grid.nodes[cfg.grid.nodes < rp]
    s, slot = annulus_eigs(shape, rr)
    vec = np.ones((rr.size, 5))
    vec[:, 0] = slot
    fmin = float(np.min(s * f_value(vec, cone)))
    # shift so that the intrinsic f of the barrier is at least that of the solution (= 1)
    m_b = min(2.0, 0.5 * np.log(fmin)) - 0.1
    w = np.full_like(cfg.grid.nodes, -np.inf)
    w[cfg.grid.nodes < rp] = annulus_barrier_value(shape.shifted(m_b), rr).u
    try:
        rep = compare(w, ua, cfg.grid)
        bar_ok, bar_detail = rep.min_gap >= -rep.slack, f"min gap {rep.min_gap:.3g} over {rep.nodes_checked} nodes"
    except SolverError as exc:
        bar_ok, bar_detail = False, str(exc)
    checks = [
        ("two initializations agree", diff <= 1e-6, f"sup diff {diff:.2e}"),
        ("AnnulusLog below solution", bar_ok, bar_detail),
    ]
    assert report(capsys, 7, checks, t0)


def test_criterion_8_gauge_and_jacobian(capsys):
    t0 = time.perf_counter()
    cfg = _annulus_cfg()
    u, _ = newton_solve(cfg, constant_start(cfg), lift=True)
    c = 0.7
    cfg2 = cfg.with_psi(np.exp(2 * c) * np.ones_like(cfg.grid.nodes)).with_boundary(2.0 - c)
    v, _ = newton_solve(cfg2, constant_start(cfg2), lift=True)
    gauge = float(np.max(np.abs(v.values - (u.values - c))))

    rng = np.random.default_rng(8)
    worst, count, tries = 0.0, 0, 0
    while count < 100 and tries < 1000:
        tries += 1
        kind = "ball" if count % 2 else "annulus"
        n, k, tau = [(5, 2, 0.9), (3, 1, 0.0), (7, 3, 0.5), (5, 2, 0.3)][count % 4]
        if kind == "ball":
            g = RadialGrid.uniform("ball", 0.0, 1.0, 24)
            geom = RadialGeometry.flat(n, 1.0)
        else:
            g = RadialGrid.uniform("annulus", 0.5, 1.0, 24)
            geom = RadialGeometry.flat(n, 1.0, 0.5)
        c_ = SolverConfig(ConeSpec(n, k, tau), geom, g, boundary=1.0)
        x = (g.nodes - g.nodes[0]) / g.width
        if kind == "ball":
            x = x * x
        scale = 2.0 ** rng.uniform(-2, 3)
        modes = sum(rng.normal() * np.sin((j + 1) * np.pi * x) / (j + 1) ** 2 for j in range(4))
        state = rng.normal() + scale * lift_shape(c_) + 0.01 * scale * modes
        try:
            J = jacobian(ConformalFactor(g, state), c_).dense()
        except SolverError:
            continue
        Jfd = fd_jacobian(state, c_)
        worst = max(worst, float(np.max(np.abs(J - Jfd)) / np.max(np.abs(J))))
        count += 1
    checks = [
        ("gauge shift", gauge <= 1e-8, f"sup err {gauge:.2e}"),
        ("Jacobian vs finite differences", count == 100 and worst <= 1e-6,
         f"{count} states, max rel err {worst:.2e}"),
    ]
    assert report(capsys, 8, checks, t0)
