"""Compiled inner loops.  Everything here works on plain complex arrays."""

import numpy as np
from numba import njit


@njit(cache=True)
def _norm(v, r):
    m = 0.0
    for i in range(v.shape[0]):
        a = abs(v[i])
        if a > m:
            m = a
    if m == 0.0:
        return 0.0
    s = 0.0
    for i in range(v.shape[0]):
        s += (abs(v[i]) / m) ** r
    return m * s ** (1.0 / r)


@njit(cache=True)
def _dual_dir(v, r, out):
    # out_i = conj(sgn v_i) |v_i|^(r-1), the unnormalized norming functional of v in l_r
    for i in range(v.shape[0]):
        a = abs(v[i])
        if a == 0.0:
            out[i] = 0.0
        else:
            out[i] = (v[i].conjugate() / a) * a ** (r - 1.0)


@njit(cache=True)
def _matvec(A, x, out):
    m, n = A.shape
    for i in range(m):
        acc = 0j
        for j in range(n):
            acc += A[i, j] * x[j]
        out[i] = acc


@njit(cache=True)
def _tmatvec(A, y, out):
    m, n = A.shape
    for j in range(n):
        acc = 0j
        for i in range(m):
            acc += A[i, j] * y[i]
        out[j] = acc


@njit(cache=True)
def power_batch(A, X, r, s, max_iter, tol):
    """Nonlinear power iteration for ``max ||A x||_s / ||x||_r``, one run per column of X.

    Returns (values, final unit vectors, iterations).  Each accepted step is an
    ascent step, so values are monotone along every run.
    """
    m, n = A.shape
    k = X.shape[1]
    rc = r / (r - 1.0)
    vals = np.zeros(k)
    iters = np.zeros(k, dtype=np.int64)
    out = X.copy()
    y = np.empty(m, dtype=np.complex128)
    yn = np.empty(m, dtype=np.complex128)
    psi = np.empty(m, dtype=np.complex128)
    z = np.empty(n, dtype=np.complex128)
    xn = np.empty(n, dtype=np.complex128)
    for j in range(k):
        x = X[:, j].copy()
        nx = _norm(x, r)
        if nx == 0.0:
            continue
        x /= nx
        _matvec(A, x, y)
        val = _norm(y, s)
        it = 0
        while it < max_iter and val > 0.0:
            it += 1
            _dual_dir(y, s, psi)
            _tmatvec(A, psi, z)
            _dual_dir(z, rc, xn)
            nxn = _norm(xn, r)
            if nxn == 0.0:
                break
            xn /= nxn
            _matvec(A, xn, yn)
            nv = _norm(yn, s)
            if nv <= val:
                break
            gain = (nv - val) / val
            x[:] = xn
            y[:] = yn
            val = nv
            if gain < tol:
                break
        out[:, j] = x
        vals[j] = val
        iters[j] = it
    return vals, out, iters
