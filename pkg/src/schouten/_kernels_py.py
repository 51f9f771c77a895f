"""Pure-numpy implementations of the hot kernels.

This module is the reference for :mod:`schouten._kernels` (Cython). Both
expose the same three functions with identical signatures and outputs; the
choice between them is made once, in :mod:`schouten._backend`.
"""
import numpy as np
from math import comb

BACKEND = "python"


def esp_table(lam, kmax):
    """Elementary symmetric polynomials sigma_0..sigma_kmax of each row.

    Column sweep: after processing entries 0..i, ``E[:, j]`` holds sigma_j of
    that prefix. No subtraction is ever performed, so positive inputs are
    evaluated to full relative precision.
    """
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    m, n = lam.shape
    E = np.zeros((m, kmax + 1))
    E[:, 0] = 1.0
    for i in range(n):
        x = lam[:, i]
        for j in range(min(i + 1, kmax), 0, -1):
            E[:, j] += x * E[:, j - 1]
    return E


def esp_deleted(lam, j):
    """``out[r, l] = sigma_j`` of row r with entry l removed.

    This is d sigma_{j+1} / d lambda_l. Computed by a fresh sweep per deleted
    index instead of the division-free-but-unstable downdate recurrence.
    """
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    m, n = lam.shape
    out = np.empty((m, n))
    if j == 0:
        out[:] = 1.0
        return out
    for l in range(n):
        E = np.zeros((m, j + 1))
        E[:, 0] = 1.0
        cnt = 0
        for i in range(n):
            if i == l:
                continue
            x = lam[:, i]
            cnt += 1
            for q in range(min(cnt, j), 0, -1):
                E[:, q] += x * E[:, q - 1]
        out[:, l] = E[:, j]
    return out


def radial_system(u, q, a0r, a0t, psi, h, n, k, tau, scale, ball):
    """Residual rows, tridiagonal Jacobian and cone data of the radial equation.

    Interior row i discretises ``f^tau(a, b, ..., b) - psi exp(2u)`` where
    ``a = u_rr - u_r^2/2 - a0r`` and ``b = q u_r + u_r^2/2 - a0t`` are the
    background-frame eigenvalues (radial, and tangential of multiplicity
    n-1), ``q = phi'/phi``. With ``ball`` the row at r=0 uses the reflected
    ghost node and the limit ``q u_r -> u_rr``. Dirichlet rows (first unless
    ``ball``, and last) are left to the caller: their entries are zero.

    Returns
    -------
    F, fbg, lower, diag, upper, margin, fail, a, b : ndarray
        ``lower[i] = dF_i/du_{i-1}``, ``upper[i] = dF_i/du_{i+1}``; ``fbg`` is
        the background-frame f-value; ``margin`` the scaled minimum of
        sigma_j(lambda^tau) over j <= k; ``fail`` the first j with
        sigma_j <= 0 (0 if admissible). Rows with ``fail > 0`` carry NaN in F.
    """
    u = np.asarray(u, dtype=np.float64)
    npts = u.shape[0]
    F = np.zeros(npts)
    fbg = np.zeros(npts)
    lower = np.zeros(npts)
    diag = np.zeros(npts)
    upper = np.zeros(npts)
    margin = np.zeros(npts)
    fail = np.zeros(npts, dtype=np.int64)
    a = np.zeros(npts)
    b = np.zeros(npts)

    i0 = 0 if ball else 1
    idx = np.arange(i0, npts - 1)
    um = u[idx - 1] if not ball else np.concatenate(([u[1]], u[idx[1:] - 1]))
    u0 = u[idx]
    up = u[idx + 1]
    ur = (up - um) / (2.0 * h)
    urr = (up - 2.0 * u0 + um) / (h * h)
    qi = q[idx].copy()
    if ball:
        ur[0] = 0.0
        qi[0] = 0.0  # tangential term handled by the r -> 0 limit below
    aa = urr - 0.5 * ur * ur - a0r[idx]
    bb = qi * ur + 0.5 * ur * ur - a0t[idx]
    if ball:
        bb[0] = urr[0] - a0t[0]

    # derivatives of (a, b) with respect to (u_{i-1}, u_i, u_{i+1})
    da_m = 1.0 / (h * h) + ur / (2.0 * h)
    da_0 = np.full_like(ur, -2.0 / (h * h))
    da_p = 1.0 / (h * h) - ur / (2.0 * h)
    db_m = -(qi + ur) / (2.0 * h)
    db_0 = np.zeros_like(ur)
    db_p = (qi + ur) / (2.0 * h)
    if ball:
        # ghost reflection: u_{-1} = u_1, so both neighbours are u_1
        da_m[0] = 0.0
        da_0[0] = -2.0 / (h * h)
        da_p[0] = 2.0 / (h * h)
        db_m[0] = 0.0
        db_0[0] = -2.0 / (h * h)
        db_p[0] = 2.0 / (h * h)

    S = aa + (n - 1) * bb
    at = tau * aa + (1.0 - tau) * S
    bt = tau * bb + (1.0 - tau) * S
    D = tau + n * (1.0 - tau)

    sig = np.empty((idx.size, k + 1))
    sig[:, 0] = 1.0
    for j in range(1, k + 1):
        sig[:, j] = comb(n - 1, j) * bt ** j + at * comb(n - 1, j - 1) * bt ** (j - 1)
    s = np.maximum(np.abs(at), np.abs(bt))
    ssafe = np.where(s > 0, s, 1.0)
    scaled = np.stack(
        [sig[:, j] / (comb(n, j) * ssafe ** j) for j in range(1, k + 1)], axis=1
    )
    marg = scaled.min(axis=1)
    marg = np.where(s > 0, marg, 0.0)
    bad = scaled <= 0.0
    bad[s == 0, 0] = True
    failj = np.where(bad.any(axis=1), bad.argmax(axis=1) + 1, 0)

    ok = failj == 0
    sk = np.where(ok, sig[:, k], 1.0)
    root = sk ** (1.0 / k)
    fval = scale * root / D
    dsda = comb(n - 1, k - 1) * bt ** (k - 1)
    dsdb = k * comb(n - 1, k) * bt ** (k - 1)
    if k >= 2:
        dsdb = dsdb + (k - 1) * at * comb(n - 1, k - 1) * bt ** (k - 2)
    pref = scale / D / k * root / sk
    Fa = pref * (dsda + dsdb * (1.0 - tau))
    Fb = pref * (dsda * (1.0 - tau) * (n - 1) + dsdb * (tau + (1.0 - tau) * (n - 1)))
    rhs = psi[idx] * np.exp(2.0 * u0)

    F[idx] = np.where(ok, fval - rhs, np.nan)
    fbg[idx] = np.where(ok, fval, np.nan)
    lower[idx] = np.where(ok, Fa * da_m + Fb * db_m, 0.0)
    diag[idx] = np.where(ok, Fa * da_0 + Fb * db_0 - 2.0 * rhs, 0.0)
    upper[idx] = np.where(ok, Fa * da_p + Fb * db_p, 0.0)
    margin[idx] = marg
    fail[idx] = failj
    a[idx] = aa
    b[idx] = bb
    return F, fbg, lower, diag, upper, margin, fail, a, b
