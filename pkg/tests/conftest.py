import importlib

import numpy as np
import pytest


def _kernel_modules():
    mods = [("python", "schouten._kernels_py")]
    try:
        importlib.import_module("schouten._kernels")
        mods.append(("cython", "schouten._kernels"))
    except ImportError:
        pass
    return mods


KERNELS = _kernel_modules()


@pytest.fixture(params=[m for _, m in KERNELS], ids=[n for n, _ in KERNELS])
def kernels(request):
    """Each available kernel implementation."""
    return importlib.import_module(request.param)


@pytest.fixture(params=[n for n, _ in KERNELS])
def backend(request, monkeypatch):
    """Route the package through one kernel backend for the duration of a test."""
    from schouten import _backend

    mod = importlib.import_module(dict(KERNELS)[request.param])
    for name in ("esp_table", "esp_deleted", "radial_system"):
        monkeypatch.setattr(_backend, name, getattr(mod, name))
    monkeypatch.setattr(_backend, "BACKEND", request.param)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def fd_jacobian(u, cfg, rel=1e-5):
    """Central-difference Jacobian of the discrete residual with one Richardson step.

    Plain central differences carry an O(h^2) truncation error that is not
    negligible near the cone boundary; extrapolating D(h) and D(h/2) makes
    the oracle fourth order.
    """
    from schouten.solver import ConformalFactor, residual

    def central(j, h):
        e = np.zeros_like(u)
        e[j] = h
        return (residual(ConformalFactor(cfg.grid, u + e), cfg)
                - residual(ConformalFactor(cfg.grid, u - e), cfg)) / (2 * h)

    J = np.empty((u.size, u.size))
    for j in range(u.size):
        h = rel * max(1.0, abs(u[j]))
        J[:, j] = (4 * central(j, h / 2) - central(j, h)) / 3
    return J
