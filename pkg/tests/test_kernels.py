"""Elementary symmetric kernels and the radial system, both backends."""
import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from schouten import _backend, _kernels_py

from .conftest import KERNELS


def brute_sigma(lam, j):
    return sum(np.prod(c) for c in itertools.combinations(lam, j)) if j else 1.0


@pytest.mark.parametrize("n", [3, 4, 6, 8])
def test_esp_table_matches_brute_force(kernels, rng, n):
    lam = rng.standard_normal((20, n))
    E = kernels.esp_table(lam, n)
    for row, e in zip(lam, E):
        for j in range(n + 1):
            assert e[j] == pytest.approx(brute_sigma(row, j), rel=1e-12, abs=1e-12)


def test_esp_deleted_matches_brute_force(kernels, rng):
    lam = rng.standard_normal((10, 6))
    for j in range(0, 6):
        D = kernels.esp_deleted(lam, j)
        for row, d in zip(lam, D):
            for i in range(6):
                rest = np.delete(row, i)
                assert d[i] == pytest.approx(brute_sigma(rest, j), rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (7,), elements=st.floats(-3, 3)), st.integers(0, 7))
def test_esp_table_hypothesis(lam, j):
    E = _kernels_py.esp_table(lam[None, :], 7)[0]
    assert E[j] == pytest.approx(brute_sigma(lam, j), rel=1e-10, abs=1e-10)


def test_kernels_accept_read_only_inputs(kernels):
    lam = np.array([[1.0, 2.0, 3.0]])
    lam.setflags(write=False)
    assert kernels.esp_table(lam, 3)[0, 3] == pytest.approx(6.0)
    assert kernels.esp_deleted(lam, 1)[0].tolist() == [5.0, 4.0, 3.0]


def _system_args(rng, N=40, ball=True):
    r = np.linspace(0.0 if ball else 0.5, 1.0, N + 1)
    u = 0.3 * r ** 2 + 0.01 * rng.standard_normal(N + 1)
    with np.errstate(divide="ignore"):
        q = np.where(r > 0, 1.0 / np.where(r > 0, r, 1.0), 0.0)
    a0 = np.zeros_like(r)
    psi = np.ones_like(r)
    return u, q, a0, a0.copy(), psi, r[1] - r[0]


@pytest.mark.skipif(len(KERNELS) < 2, reason="compiled kernels not built")
@pytest.mark.parametrize("ball", [True, False])
@pytest.mark.parametrize("n,k,tau", [(5, 2, 0.9), (3, 1, 0.0), (7, 3, 0.5)])
def test_radial_system_backends_agree(rng, ball, n, k, tau):
    import importlib

    cy = importlib.import_module("schouten._kernels")
    u, q, a0r, a0t, psi, h = _system_args(rng, ball=ball)
    u = u - 2.0 + (3.0 * np.linspace(0, 1, u.size) ** 2)
    out_py = _kernels_py.radial_system(u, q, a0r, a0t, psi, h, n, k, tau, 1.0, ball)
    out_cy = cy.radial_system(u, q, a0r, a0t, psi, h, n, k, tau, 1.0, ball)
    for a, b in zip(out_py, out_cy):
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_backend_selection_env():
    code = "from schouten import _backend; print(_backend.BACKEND)"
    env = dict(os.environ, SCHOUTEN_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


def test_backend_exports():
    assert _backend.BACKEND in ("python", "cython")
    for name in ("esp_table", "esp_deleted", "radial_system"):
        assert callable(getattr(_backend, name))
