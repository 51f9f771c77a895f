"""Compare the compiled kernels with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat R] [--sizes N ...]

Times ``esp_table`` on batches of eigenvalue vectors, ``radial_system`` on
radial grids of several sizes, and one end-to-end Newton solve with each
backend, then prints a table with the speedup of the compiled version.
"""
import argparse
import importlib
import timeit

import numpy as np

from schouten import _backend
from schouten.cone import ConeSpec
from schouten.geometry import RadialGeometry
from schouten.solver import RadialGrid, SolverConfig, constant_start, newton_solve


def load_backends():
    mods = {"python": importlib.import_module("schouten._kernels_py")}
    try:
        mods["cython"] = importlib.import_module("schouten._kernels")
    except ImportError:
        pass
    return mods


def best(stmt, repeat):
    return min(timeit.repeat(stmt, number=1, repeat=repeat))


def bench_esp(mod, size, repeat, rng):
    lam = rng.uniform(0.1, 2.0, (size, 7))
    return best(lambda: mod.esp_table(lam, 7), repeat)


def bench_radial(mod, size, repeat):
    g = RadialGrid.uniform("ball", 0.0, 0.9, size)
    cfg = SolverConfig(ConeSpec(5, 2, 0.9), RadialGeometry.flat(5, 0.9), g)
    r = g.nodes
    u = np.log(2.0 / (1.0 - r ** 2))
    q = np.ascontiguousarray(cfg.geometry.q(r))
    a0r, a0t = (np.ascontiguousarray(a) for a in cfg.geometry.background_schouten(r))
    psi = np.ascontiguousarray(cfg.psi_values)
    c = cfg.cone
    return best(lambda: mod.radial_system(u, q, a0r, a0t, psi, g.h, c.n, c.k, c.tau,
                                          c.norm_const, True), repeat)


def bench_solve(mod, size, repeat):
    g = RadialGrid.uniform("ball", 0.0, 0.9, size)
    cfg = SolverConfig(ConeSpec(5, 2, 0.9), RadialGeometry.flat(5, 0.9), g, boundary=1.0)
    saved = _backend.radial_system
    _backend.radial_system = mod.radial_system
    try:
        return best(lambda: newton_solve(cfg, constant_start(cfg), lift=True), repeat)
    finally:
        _backend.radial_system = saved


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10000])
    args = ap.parse_args(argv)
    mods = load_backends()
    rng = np.random.default_rng(0)
    rows = []
    for size in args.sizes:
        rows.append(("esp_table", size, {k: bench_esp(m, size, args.repeat, rng) for k, m in mods.items()}))
        rows.append(("radial_system", size, {k: bench_radial(m, size, args.repeat) for k, m in mods.items()}))
    for size in args.sizes[:2]:
        rows.append(("newton_solve", size, {k: bench_solve(m, size, args.repeat) for k, m in mods.items()}))
    names = list(mods)
    print(f"{'kernel':<14}{'size':>8}" + "".join(f"{n + ' [ms]':>16}" for n in names) + f"{'speedup':>10}")
    for kernel, size, t in rows:
        line = f"{kernel:<14}{size:>8}" + "".join(f"{1e3 * t[n]:>16.3f}" for n in names)
        if "cython" in t:
            line += f"{t['python'] / t['cython']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
