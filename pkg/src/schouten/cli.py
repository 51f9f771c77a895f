"""Command-line front end.

Subcommands ``cone``, ``barrier-check``, ``solve`` and ``asymptotics`` print a
JSON report (``schema_version`` 1) and, with ``--out DIR``, also write it and
any CSV data into DIR. Exit codes: 0 success, 2 usage or configuration
error, 3 numerical failure.

Configuration files are INI-style ``key = value`` files with sections; the
accepted keys are listed in :data:`CONFIG_SCHEMA` and unknown keys are
rejected. Command-line flags override file values.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .barriers import (
    FAMILIES,
    AnnulusLog,
    CollarLog,
    GuanUpper,
    LNSuper,
    ln_tangent_comparison,
    search_collar_params,
    verify_annulus_barrier,
    verify_collar_barrier,
    verify_guan_upper,
    verify_ln_supersolution,
)
from .cone import ConeSpec, check_structure, cone_constants, mu_plus_exact, mu_plus_linear
from .errors import SchoutenError, SolverError, UsageError
from .geometry import RadialGeometry
from .solver import (
    NewtonOptions,
    RadialGrid,
    SolverConfig,
    constant_start,
    continue_m,
    continue_tau,
    diagnostics,
    grid_table,
    hyperbolic_oracle,
    newton_solve,
    singular_solve,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("schouten")


def _floats(text):
    return tuple(float(x) for x in str(text).replace(" ", "").split(",") if x)


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text):
    return None if str(text).strip().lower() in ("", "none") else float(text)


#: section -> key -> (parser, default, description)
CONFIG_SCHEMA = {
    "cone": {
        "n": (int, None, "dimension"),
        "k": (int, None, "Garding index"),
        "tau": (float, 1.0, "deformation parameter"),
        "samples": (int, 10000, "structure-check samples"),
        "slack": (float, 1e-10, "structure-check slack"),
    },
    "barrier": {
        "n": (int, 5, "dimension"),
        "k": (int, 2, "Garding index (AnnulusLog)"),
        "tau": (float, 1.0, "deformation parameter (AnnulusLog, CollarLog)"),
        "grid_points": (int, 1000, "verification nodes"),
    },
    "annulus": {
        "eps": (float, 0.5, "exponent increment"),
        "m": (float, 0.0, "value at r_minus"),
        "r_minus": (float, 0.01, "inner radius"),
        "r_plus": (_opt_float, None, "outer radius (default: middle of the window)"),
        "strict": (_bool, True, "enforce the radius window"),
    },
    "ln": {
        "R": (float, 0.05, "ball radius"),
        "eps": (float, 0.01, "profile smoothing"),
        "samples": (int, 1000, "tangent-comparison samples"),
    },
    "guan": {
        "xi_bar": (float, 0.0, "boundary value"),
        "delta": (_opt_float, None, "sweep start (default: half the radius)"),
        "R_dom": (float, 1.0, "domain radius"),
        "warp": (str, "r", "warp tag: r, sin or sinh"),
        "u_max": (_opt_float, None, "optional outer lower bound"),
    },
    "collar": {
        "eps": (float, 0.1, "collar parameter, 0 < eps < 1/2"),
        "a": (float, 1.0, "collar parameter, a >= 1"),
        "R_dom": (float, 1.0, "ball radius"),
    },
    "problem": {
        "n": (int, 5, "dimension"),
        "k": (int, 2, "Garding index"),
        "tau": (float, 0.9, "deformation parameter"),
    },
    "geometry": {
        "kind": (str, "flat", "flat or warped"),
        "warp": (str, "r", "warp tag for warped geometry"),
        "r_lo": (float, 0.0, "inner radius (0: ball)"),
        "r_hi": (float, 1.0, "outer radius"),
    },
    "grid": {
        "N": (int, None, "number of intervals (default: 400; singular: 1600)"),
    },
    "solve": {
        "mode": (str, "newton", "newton, tau, m, singular or oracle"),
        "boundary": (float, 0.0, "outer Dirichlet value"),
        "boundary_inner": (_opt_float, None, "inner Dirichlet value (annulus)"),
        "lift": (_bool, True, "lift an inadmissible start into the cone"),
        "tau_schedule": (_floats, (0.0, 0.25, 0.5, 0.75), "tau continuation points"),
        "m_schedule": (_floats, (), "boundary values (default: 2,4,...,12; singular: 2,4,...,16)"),
        "inc_tol": (float, 1e-3, "singular-limit increment tolerance"),
        "tol_residual": (float, 1e-10, "Newton merit tolerance"),
        "max_iter": (int, 60, "Newton iterations"),
        "band": (_floats, (0.02, 0.2), "collar band as fractions of the width"),
        "oracle_tol": (float, 5e-4, "oracle sup-error bound"),
        "defect_tol": (_opt_float, 0.05, "singular-mode defect bound (none: no check)"),
        "defect_kind": (str, "hyperbolic", "hyperbolic (flat ball) or raw"),
    },
    "asymptotics": {
        "solution": (str, "", "solution CSV from 'solve' (empty: solve first)"),
        "band": (_floats, (0.05, 0.2), "collar band as fractions of the radius"),
    },
}

SUBCOMMAND_SECTIONS = {
    "cone": ("cone",),
    "barrier-check": ("barrier", "annulus", "ln", "guan", "collar"),
    "solve": ("problem", "geometry", "grid", "solve"),
    "asymptotics": ("problem", "geometry", "grid", "solve", "asymptotics"),
}


# --- serialization ---------------------------------------------------------

def _plain(obj):
    """Convert numpy scalars/arrays and tuples to plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = "%.17g" % x
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits and null for non-finite values."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if o is None:
            return "null"
        if isinstance(o, bool):
            return "true" if o else "false"
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return _fmt_float(o)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(_plain(obj), 0) + "\n"


def csv_text(columns: dict) -> str:
    """Comma-separated table with a header row, LF line endings and 17 digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    w.writerow(names)
    cols = [np.asarray(columns[c], dtype=float) for c in names]
    for row in zip(*cols):
        w.writerow(["%.17g" % v for v in row])
    return buf.getvalue()


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise UsageError(f"{path}: no data rows")
    head = rows[0]
    data = np.array([[float(x) for x in r] for r in rows[1:]])
    return {h: data[:, i] for i, h in enumerate(head)}


# --- configuration ---------------------------------------------------------

def load_config(path, sections):
    """Parse an INI file, returning ``{section: {key: value}}`` with defaults filled.

    Only ``sections`` are allowed; unknown sections or keys raise UsageError.
    """
    raw = configparser.ConfigParser(interpolation=None, default_section="__none__")
    raw.optionxform = str
    if path is not None:
        if not os.path.isfile(path):
            raise UsageError(f"config file not found: {path}")
        try:
            raw.read(path)
        except configparser.Error as exc:
            raise UsageError(f"cannot parse {path}: {exc}") from exc
    out = {}
    for sec in sections:
        schema = CONFIG_SCHEMA[sec]
        out[sec] = {k: spec[1] for k, spec in schema.items()}
    for sec in raw.sections():
        if sec not in sections:
            raise UsageError(f"unknown config section [{sec}] for this subcommand")
        schema = CONFIG_SCHEMA[sec]
        for key, text in raw.items(sec):
            if key not in schema:
                raise UsageError(f"unknown config key '{key}' in [{sec}]")
            try:
                out[sec][key] = schema[key][0](text)
            except ValueError as exc:
                raise UsageError(f"bad value for [{sec}] {key}: {text!r}") from exc
    return out


def _override(cfg, section, key, value):
    if value is not None and section in cfg:
        cfg[section][key] = value


def _apply_flags(cfg, args):
    for sec in ("cone", "barrier", "problem"):
        _override(cfg, sec, "n", args.n)
        _override(cfg, sec, "k", args.k)
        _override(cfg, sec, "tau", args.tau)
    _override(cfg, "barrier", "grid_points", args.grid)
    _override(cfg, "grid", "N", args.grid)
    if args.band is not None:
        band = _floats(args.band)
        _override(cfg, "solve", "band", band)
        _override(cfg, "asymptotics", "band", band)
    return cfg


# --- output ----------------------------------------------------------------

def _emit(args, name, report, tables=None):
    text = dumps(report)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_bytes(text.encode())
        for tname, cols in (tables or {}).items():
            with open(out / f"{tname}.csv", "w", newline="") as fh:
                fh.write(csv_text(cols))


def _envelope(subcommand, resolved, seed, body):
    out = {"schema_version": SCHEMA_VERSION, "subcommand": subcommand, "seed": seed,
           "config": resolved}
    out.update(body)
    return out


# --- cone ------------------------------------------------------------------

def cmd_cone(args) -> int:
    cfg = _apply_flags(load_config(args.config, SUBCOMMAND_SECTIONS["cone"]), args)
    c = cfg["cone"]
    if c["n"] is None or c["k"] is None:
        raise UsageError("cone needs --n and --k")
    spec = ConeSpec(c["n"], c["k"], c["tau"])
    cc = cone_constants(spec)
    rep = check_structure(spec, c["samples"], seed=args.seed, slack=c["slack"])
    sd = rep.to_dict()
    body = {
        "mu_plus": cc.mu_plus,
        # the linear-in-tau form is reported for comparison; it is exact only at tau = 1 or k = n
        "mu_plus_linear": mu_plus_linear(spec.n, spec.k, spec.tau),
        "mu_plus_exact": mu_plus_exact(spec.n, spec.k, spec.tau),
        "mu_plus_deviation_linear": abs(cc.mu_plus - mu_plus_linear(spec.n, spec.k, spec.tau)),
        "mu_plus_deviation_exact": abs(cc.mu_plus - mu_plus_exact(spec.n, spec.k, spec.tau)),
        "kappa": cc.kappa,
        "theta": cc.theta,
        "beta": cc.beta,
        "t_star": cc.t_star,
        "structure_check": {
            "samples": sd["samples"],
            "violations": sd["violations"],
            "violations_by_property": sd["violations_by_property"],
            "worst_margins": sd["worst_margins"],
        },
    }
    _emit(args, "cone", _envelope("cone", cfg, args.seed, body))
    return EXIT_OK if rep.passed else EXIT_NUMERIC


# --- barrier-check ---------------------------------------------------------

def _build_family(family, cfg):
    """Construct the barrier object and the verification call for one family."""
    b = cfg["barrier"]
    npts = b["grid_points"]
    if family == "AnnulusLog":
        a = cfg["annulus"]
        cone = ConeSpec(b["n"], b["k"], b["tau"])
        r_plus = a["r_plus"]
        if r_plus is None:
            mu = cone_constants(cone).mu_plus
            if mu > 1:
                beta = 2.0 / (mu - 1.0)
                r_plus = a["r_minus"] * (1.0 + 0.5 * a["eps"] / (2.0 * (beta + 2.0)))
            else:
                r_plus = 2.0 * a["r_minus"]
        spec = AnnulusLog(cone, a["m"], a["eps"], a["r_minus"], r_plus, strict=a["strict"])
        return lambda: verify_annulus_barrier(spec, npts).to_dict()
    if family == "LNSuper":
        s = cfg["ln"]
        spec = LNSuper(b["n"], s["R"], s["eps"])

        def run():
            d = verify_ln_supersolution(spec, npts).to_dict()
            if spec.R < 1:
                d["measured"]["tangent_min_gap"] = ln_tangent_comparison(
                    spec, s["samples"], cfg["__seed"])
            return d
        return run
    if family == "GuanUpper":
        g = cfg["guan"]
        spec = GuanUpper(b["n"], g["xi_bar"], g["delta"])
        if g["warp"] == "r":
            geom = RadialGeometry.flat(b["n"], g["R_dom"])
        else:
            geom = RadialGeometry.warped(b["n"], g["warp"], g["R_dom"])
        return lambda: verify_guan_upper(spec, geom, npts, u_max=g["u_max"]).to_dict()
    if family == "CollarLog":
        c = cfg["collar"]
        spec = CollarLog(c["eps"], c["a"])
        geom = RadialGeometry.flat(b["n"], c["R_dom"])
        cones = (ConeSpec(b["n"], k, b["tau"]) for k in range(1, b["n"] + 1))
        cones = tuple(cones)
        return lambda: verify_collar_barrier(spec, geom, npts, cones).to_dict()
    raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)} or all")


def _run_family(family, cfg):
    """Worker entry point: returns ("ok", report) or ("error", payload)."""
    try:
        return "ok", _build_family(family, cfg)()
    except SolverError as exc:
        return "error", exc.to_dict()
    except SchoutenError as exc:
        return "error", {"error": type(exc).__name__, "message": str(exc)}


def cmd_barrier_check(args) -> int:
    cfg = _apply_flags(load_config(args.config, SUBCOMMAND_SECTIONS["barrier-check"]), args)
    fam = args.family or "AnnulusLog"
    families = list(FAMILIES) if fam == "all" else [fam]
    run_cfg = dict(cfg, __seed=args.seed)
    for f in families:
        _build_family(f, run_cfg)  # parameter errors surface here with exit 2
    if args.jobs > 1 and len(families) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            futs = [ex.submit(_run_family, f, run_cfg) for f in families]
            results = [f.result() for f in futs]
    else:
        results = [_run_family(f, run_cfg) for f in families]
    reports, ok = [], True
    for f, (status, payload) in zip(families, results):
        if status == "error":
            ok = False
            reports.append({"family": f, "pass": False, "error": payload})
        else:
            ok = ok and payload["pass"]
            reports.append(payload)
    body = {"pass": ok, "reports": reports}
    _emit(args, "barrier", _envelope("barrier-check", cfg, args.seed, body))
    return EXIT_OK if ok else EXIT_NUMERIC


# --- solve -----------------------------------------------------------------

def _solver_config(cfg):
    p, g, s = cfg["problem"], cfg["geometry"], cfg["solve"]
    # the singular limit needs a finer grid to resolve the layer near the lower band edge
    if cfg["grid"]["N"] is None:
        cfg["grid"]["N"] = 1600 if s["mode"] == "singular" else 400
    n = p["n"]
    if g["kind"] == "flat":
        geom = RadialGeometry.flat(n, g["r_hi"], g["r_lo"])
    elif g["kind"] == "warped":
        geom = RadialGeometry.warped(n, g["warp"], g["r_hi"], g["r_lo"])
    else:
        raise UsageError("geometry kind must be flat or warped")
    kind = "ball" if g["r_lo"] == 0 else "annulus"
    grid = RadialGrid.uniform(kind, g["r_lo"], g["r_hi"], cfg["grid"]["N"])
    boundary = s["boundary"]
    if kind == "annulus" and s["boundary_inner"] is not None:
        boundary = (s["boundary_inner"], s["boundary"])
    opts = NewtonOptions(tol_residual=s["tol_residual"], max_iter=s["max_iter"])
    if s["mode"] not in ("newton", "tau", "m", "singular", "oracle"):
        raise UsageError(f"unknown solve mode {s['mode']!r}")
    if len(s["band"]) != 2:
        raise UsageError("band needs two values lo,hi")
    return SolverConfig(ConeSpec(n, p["k"], p["tau"]), geom, grid, boundary=boundary,
                        newton=opts)


def run_solve(cfg):
    """Run the configured solve; returns (ConformalFactor, SolverConfig, body, ok)."""
    s = cfg["solve"]
    mode = s["mode"]
    ms = s["m_schedule"] or tuple(float(m) for m in range(2, 17 if mode == "singular" else 13, 2))
    s["m_schedule"] = ms
    sc = _solver_config(cfg)
    band = tuple(s["band"])
    checks = {}
    if mode == "oracle":
        if sc.grid.kind != "ball" or sc.geometry.kind != "flat" or not sc.grid.nodes[-1] < 1:
            raise UsageError("oracle mode needs a flat ball of radius < 1")
        exact = hyperbolic_oracle(sc.grid)
        sc = sc.with_boundary(float(exact[-1]))
        u, rep = newton_solve(sc, constant_start(sc), lift=True)
        err = float(np.max(np.abs(u.values - exact)))
        checks["sup_error"] = {"value": err, "bound": s["oracle_tol"], "pass": err <= s["oracle_tol"]}
    elif mode == "newton":
        u, rep = newton_solve(sc, constant_start(sc), lift=s["lift"])
    elif mode == "tau":
        targets = [t for t in s["tau_schedule"] if t < sc.tau] + [sc.tau]
        u, rep = continue_tau(sc, targets)[-1]
    elif mode == "m":
        sc = sc.with_boundary(ms[0])
        u, rep = continue_m(sc, ms)[-1]
        sc = sc.with_boundary(ms[-1])
    else:
        if sc.grid.kind != "ball":
            raise UsageError("singular mode runs on a ball")
        u, rep = singular_solve(sc, ms, inc_tol=s["inc_tol"], band=band)
        sc = sc.with_boundary(rep.diagnostics["m"])
    diag = diagnostics(u, sc, band)
    rep.diagnostics.update(diag)
    if mode == "singular" and s["defect_tol"] is not None:
        key = "asymptotic_defect_hyperbolic" if s["defect_kind"] == "hyperbolic" else "asymptotic_defect"
        val = diag.get(key)
        if val is None:
            raise UsageError(f"{key} is not available for this geometry")
        checks["defect"] = {"kind": key, "value": val, "bound": s["defect_tol"],
                            "pass": val <= s["defect_tol"]}
    ok = rep.converged and all(c["pass"] for c in checks.values())
    body = {"pass": ok, "checks": checks, "report": rep.to_dict()}
    return u, sc, body, ok


def cmd_solve(args) -> int:
    if args.config is None:
        raise UsageError("solve needs --config")
    cfg = _apply_flags(load_config(args.config, SUBCOMMAND_SECTIONS["solve"]), args)
    _solver_config(cfg)  # validate before solving
    u, sc, body, ok = run_solve(cfg)
    _emit(args, "solve", _envelope("solve", cfg, args.seed, body),
          {"solution": grid_table(u, sc)})
    return EXIT_OK if ok else EXIT_NUMERIC


# --- asymptotics -----------------------------------------------------------

def asymptotics_body(r, u, n, band):
    """Envelope study of ``u + ln d`` on a ball with ``d = R - r``."""
    lo, hi = band
    if not 0 <= lo < hi:
        raise UsageError("band must satisfy 0 <= lo < hi")
    R = float(r[-1])
    d = R - r
    sel = (d >= lo * R - 1e-12) & (d <= hi * R + 1e-12) & (d > 0)
    if not sel.any():
        raise UsageError("band contains no grid nodes")
    dd, val = d[sel], u[sel] + np.log(d[sel])
    C = float(np.max(val / np.sqrt(dd)))
    upper_gap = C * np.sqrt(dd) - val
    upper_ok = bool(np.all(upper_gap >= -1e-14 * max(1.0, abs(C))))
    eps, a, crep = search_collar_params(RadialGeometry.flat(n, R))
    lower = np.log(np.sqrt(1.0 - 2.0 * eps)) - np.log1p(a * dd)
    lower_gap = val - lower
    order = np.argsort(dd)
    body = {
        "pass": upper_ok,
        "band": [lo, hi],
        "band_nodes": int(sel.sum()),
        "upper_envelope": {"C": C, "holds": upper_ok, "min_gap": float(upper_gap.min())},
        "lower_envelope": {"eps": eps, "a": a, "holds": bool(np.all(lower_gap >= 0)),
                           "min_gap": float(lower_gap.min()), "collar_pass": crep.passed},
        "defect": float(np.max(np.abs(val))),
    }
    data = {"d": dd[order], "u_plus_ln_d": val[order]}
    return body, data


def cmd_asymptotics(args) -> int:
    cfg = _apply_flags(load_config(args.config, SUBCOMMAND_SECTIONS["asymptotics"]), args)
    a = cfg["asymptotics"]
    if a["solution"]:
        cols = _read_csv(a["solution"])
        if "r" not in cols or "u" not in cols:
            raise UsageError("solution CSV needs columns r and u")
        r, u = cols["r"], cols["u"]
        source = {"solution": a["solution"]}
    else:
        if args.config is None:
            raise UsageError("asymptotics needs a solution CSV or a solve config")
        if cfg["solve"]["mode"] not in ("singular", "m", "oracle"):
            cfg["solve"]["mode"] = "singular"
        uf, _, sbody, _ = run_solve(cfg)
        r, u = uf.grid.nodes, uf.values
        source = {"solve": {"pass": sbody["pass"],
                            "diagnostics": sbody["report"]["diagnostics"]}}
    if r[0] != 0:
        raise UsageError("asymptotics expects a ball solution (r starting at 0)")
    body, data = asymptotics_body(np.asarray(r), np.asarray(u), cfg["problem"]["n"], a["band"])
    body["source"] = source
    _emit(args, "asymptotics", _envelope("asymptotics", cfg, args.seed, body),
          {"asymptotics": data})
    return EXIT_OK if body["pass"] else EXIT_NUMERIC


# --- entry point -----------------------------------------------------------

COMMANDS = {
    "cone": cmd_cone,
    "barrier-check": cmd_barrier_check,
    "solve": cmd_solve,
    "asymptotics": cmd_asymptotics,
}


def build_parser():
    p = argparse.ArgumentParser(prog="schouten", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--n", type=int, help="dimension")
        sp.add_argument("--k", type=int, help="Garding cone index")
        sp.add_argument("--tau", type=float, help="deformation parameter in [0, 1]")
        sp.add_argument("--family", choices=list(FAMILIES) + ["all"], help="barrier family")
        sp.add_argument("--config", help="INI configuration file")
        sp.add_argument("--out", help="directory for the JSON report and CSV data")
        sp.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for barrier-check")
        sp.add_argument("--grid", type=int, help="grid intervals or verification nodes")
        sp.add_argument("--band", help="collar band lo,hi")
    return p


def _error_report(subcommand, payload):
    return dumps({"schema_version": SCHEMA_VERSION, "subcommand": subcommand, "pass": False,
                  "error": payload})


def main(argv=None) -> int:
    level = os.environ.get("SCHOUTEN_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.subcommand](args)
    except SolverError as exc:
        sys.stdout.write(_error_report(args.subcommand, exc.to_dict()))
        return EXIT_NUMERIC
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchoutenError as exc:
        sys.stdout.write(_error_report(args.subcommand,
                                       {"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
