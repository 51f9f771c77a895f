# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see :mod:`schouten._kernels_py` for the contract."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, pow, fabs

cnp.import_array()

BACKEND = "cython"


cdef double _comb(int n, int k) noexcept nogil:
    cdef double r = 1.0
    cdef int i
    if k < 0 or k > n:
        return 0.0
    for i in range(1, k + 1):
        r = r * (n - k + i) / i
    return r


def esp_table(lam, int kmax):
    cdef const double[:, ::1] L = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t m = L.shape[0], n = L.shape[1]
    out = np.zeros((m, kmax + 1))
    cdef double[:, ::1] E = out
    cdef Py_ssize_t r, i, j, top
    cdef double x
    with nogil:
        for r in range(m):
            E[r, 0] = 1.0
            for i in range(n):
                x = L[r, i]
                top = i + 1 if i + 1 < kmax else kmax
                for j in range(top, 0, -1):
                    E[r, j] += x * E[r, j - 1]
    return out


def esp_deleted(lam, int j):
    cdef const double[:, ::1] L = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t m = L.shape[0], n = L.shape[1]
    out = np.empty((m, n))
    cdef double[:, ::1] O = out
    cdef double[::1] E = np.zeros(j + 1)
    cdef Py_ssize_t r, l, i, q, cnt, top
    cdef double x
    with nogil:
        for r in range(m):
            for l in range(n):
                E[0] = 1.0
                for q in range(1, j + 1):
                    E[q] = 0.0
                cnt = 0
                for i in range(n):
                    if i == l:
                        continue
                    x = L[r, i]
                    cnt += 1
                    top = cnt if cnt < j else j
                    for q in range(top, 0, -1):
                        E[q] += x * E[q - 1]
                O[r, l] = E[j]
    return out


def radial_system(u_in, q_in, a0r_in, a0t_in, psi_in, double h, int n, int k,
                  double tau, double scale, bint ball):
    cdef const double[::1] u = np.ascontiguousarray(u_in, dtype=np.float64)
    cdef const double[::1] q = np.ascontiguousarray(q_in, dtype=np.float64)
    cdef const double[::1] a0r = np.ascontiguousarray(a0r_in, dtype=np.float64)
    cdef const double[::1] a0t = np.ascontiguousarray(a0t_in, dtype=np.float64)
    cdef const double[::1] psi = np.ascontiguousarray(psi_in, dtype=np.float64)
    cdef Py_ssize_t npts = u.shape[0]
    F_ = np.zeros(npts); fbg_ = np.zeros(npts)
    lo_ = np.zeros(npts); di_ = np.zeros(npts); up_ = np.zeros(npts)
    mg_ = np.zeros(npts); fl_ = np.zeros(npts, dtype=np.int64)
    a_ = np.zeros(npts); b_ = np.zeros(npts)
    cdef double[::1] F = F_, fbg = fbg_, lo = lo_, di = di_, up = up_
    cdef double[::1] mg = mg_, A = a_, B = b_
    cdef long long[::1] fl = fl_

    cdef double[::1] cn1 = np.array([_comb(n - 1, j) for j in range(k + 1)])
    cdef double[::1] cn = np.array([_comb(n, j) for j in range(k + 1)])
    cdef double D = tau + n * (1.0 - tau)
    cdef double h2 = h * h
    cdef Py_ssize_t i, i0 = 0 if ball else 1
    cdef int j, failj
    cdef double um, u0, upv, ur, urr, qi, aa, bb, S, at, bt, s, sj, sc, mm
    cdef double sk, root, fval, dsda, dsdb, pref, Fa, Fb, rhs
    cdef double da_m, da_0, da_p, db_m, db_0, db_p
    cdef double nan = float("nan")

    with nogil:
        for i in range(i0, npts - 1):
            u0 = u[i]
            upv = u[i + 1]
            if ball and i == 0:
                um = u[1]
                ur = 0.0
                urr = (upv - 2.0 * u0 + um) / h2
                aa = urr - a0r[0]
                bb = urr - a0t[0]
                da_m = 0.0; da_0 = -2.0 / h2; da_p = 2.0 / h2
                db_m = 0.0; db_0 = -2.0 / h2; db_p = 2.0 / h2
            else:
                um = u[i - 1]
                ur = (upv - um) / (2.0 * h)
                urr = (upv - 2.0 * u0 + um) / h2
                qi = q[i]
                aa = urr - 0.5 * ur * ur - a0r[i]
                bb = qi * ur + 0.5 * ur * ur - a0t[i]
                da_m = 1.0 / h2 + ur / (2.0 * h); da_0 = -2.0 / h2
                da_p = 1.0 / h2 - ur / (2.0 * h)
                db_m = -(qi + ur) / (2.0 * h); db_0 = 0.0; db_p = (qi + ur) / (2.0 * h)
            A[i] = aa
            B[i] = bb

            S = aa + (n - 1) * bb
            at = tau * aa + (1.0 - tau) * S
            bt = tau * bb + (1.0 - tau) * S
            s = fabs(at) if fabs(at) > fabs(bt) else fabs(bt)

            failj = 0
            mm = 0.0
            sk = 1.0
            if s == 0.0:
                failj = 1
            else:
                for j in range(1, k + 1):
                    sj = cn1[j] * pow(bt, j) + at * cn1[j - 1] * pow(bt, j - 1)
                    sc = sj / (cn[j] * pow(s, j))
                    if j == 1 or sc < mm:
                        mm = sc
                    if sc <= 0.0 and failj == 0:
                        failj = j
                    if j == k:
                        sk = sj
            mg[i] = mm
            fl[i] = failj
            if failj != 0:
                F[i] = nan
                fbg[i] = nan
                continue

            root = pow(sk, 1.0 / k)
            fval = scale * root / D
            dsda = cn1[k - 1] * pow(bt, k - 1)
            dsdb = k * cn1[k] * pow(bt, k - 1)
            if k >= 2:
                dsdb = dsdb + (k - 1) * at * cn1[k - 1] * pow(bt, k - 2)
            pref = scale / D / k * root / sk
            Fa = pref * (dsda + dsdb * (1.0 - tau))
            Fb = pref * (dsda * (1.0 - tau) * (n - 1) + dsdb * (tau + (1.0 - tau) * (n - 1)))
            rhs = psi[i] * exp(2.0 * u0)

            F[i] = fval - rhs
            fbg[i] = fval
            lo[i] = Fa * da_m + Fb * db_m
            di[i] = Fa * da_0 + Fb * db_0 - 2.0 * rhs
            up[i] = Fa * da_p + Fb * db_p
    return F_, fbg_, lo_, di_, up_, mg_, fl_, a_, b_
