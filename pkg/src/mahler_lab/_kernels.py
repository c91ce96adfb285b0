"""Compiled inner loops for Krylov distances and the sphere ascent.

An operator is passed as either a dense matrix or the subdiagonal weights of
a weighted shift (``use_shift``).  Both the matrix and its conjugate
transpose are passed so the adjoint recurrences need no transposes here.
"""

import numpy as np
from numba import njit

BREAKDOWN = 1e-14


@njit(cache=True)
def matvec(dense, weights, use_shift, v, out):
    n = v.shape[0]
    if use_shift:
        out[0] = 0.0
        for i in range(n - 1):
            out[i + 1] = weights[i] * v[i]
    else:
        out[:] = np.dot(dense, v)


@njit(cache=True)
def rmatvec(dense_h, weights, use_shift, v, out):
    n = v.shape[0]
    if use_shift:
        for i in range(n - 1):
            out[i] = np.conj(weights[i]) * v[i + 1]
        out[n - 1] = 0.0
    else:
        out[:] = np.dot(dense_h, v)


@njit(cache=True)
def _norm(x):
    s = 0.0
    for i in range(x.shape[0]):
        s += x[i].real * x[i].real + x[i].imag * x[i].imag
    return np.sqrt(s)


@njit(cache=True)
def _dot(a, b):
    """<a, b> conjugate-linear in ``a``."""
    s = 0j
    for i in range(a.shape[0]):
        s += np.conj(a[i]) * b[i]
    return s


@njit(cache=True)
def arnoldi(dense, weights, use_shift, w, K, tnorm):
    """Project ``w`` off span{Tw, ..., T^K w} by modified Gram-Schmidt.

    Every new direction is orthogonalized twice.  Returns the residual norm
    history, the basis rows ``Q``, the Hessenberg coefficients (``H`` upper
    part and ``hsub`` subdiagonal, with ``hsub[0] = |Tw|``), the projection
    coefficients ``y``, the number of basis vectors used and the residual.

    For shifts the support of every Krylov vector is tracked so inner
    products only run over its leading nonzero block.
    """
    n = w.shape[0]
    Q = np.zeros((K, n), np.complex128)
    H = np.zeros((K, K), np.complex128)
    hsub = np.zeros(K + 1)
    y = np.zeros(K, np.complex128)
    hist = np.zeros(K + 1)
    r = w.copy()
    wn = _norm(w)
    hist[0] = wn
    x = np.zeros(n, np.complex128)
    used = 0
    if wn == 0.0:
        return hist[:1], Q, H, hsub, y, 0, r
    support = n
    if use_shift:
        support = 0
        for i in range(n):
            if w[i] != 0:
                support = i + 1
        support = min(support + 1, n)
    matvec(dense, weights, use_shift, w, x)
    scale = wn
    for k in range(K):
        # x holds T w (k = 0) or T q_k; q_k is row k-1 of Q
        for _pass in range(2):
            for j in range(k):
                c = 0j
                for i in range(support):
                    c += np.conj(Q[j, i]) * x[i]
                if k > 0:
                    H[j, k - 1] += c
                for i in range(support):
                    x[i] -= c * Q[j, i]
        h = 0.0
        for i in range(support):
            h += x[i].real * x[i].real + x[i].imag * x[i].imag
        h = np.sqrt(h)
        if h <= BREAKDOWN * tnorm * scale:
            break
        hsub[k] = h
        c = 0j
        for i in range(support):
            Q[k, i] = x[i] / h
            c += np.conj(Q[k, i]) * r[i]
        y[k] = c
        for i in range(support):
            r[i] -= c * Q[k, i]
        used = k + 1
        hist[used] = _norm(r)
        scale = 1.0
        matvec(dense, weights, use_shift, Q[k], x)
        if use_shift:
            support = min(support + 1, n)
    return hist[: used + 1], Q, H, hsub, y, used, r


@njit(cache=True)
def adjoint_residual(dense_h, weights, use_shift, H, hsub, y, used, r):
    """``(I - s(T))^H r`` where ``s(T) w`` is the projection of ``w`` found by :func:`arnoldi`.

    Each basis vector is ``q_j = phi_j(T) w`` for polynomials satisfying the
    Arnoldi recurrence; the adjoints ``u_j = phi_j(T)^H r`` obey the
    conjugated recurrence driven by ``T^H``.
    """
    n = r.shape[0]
    out = r.copy()
    if used == 0:
        return out
    U = np.zeros((used, n), np.complex128)
    t = np.zeros(n, np.complex128)
    rmatvec(dense_h, weights, use_shift, r, t)
    for i in range(n):
        U[0, i] = t[i] / hsub[0]
    for k in range(1, used):
        rmatvec(dense_h, weights, use_shift, U[k - 1], t)
        for j in range(k):
            c = np.conj(H[j, k - 1])
            for i in range(n):
                t[i] -= c * U[j, i]
        for i in range(n):
            U[k, i] = t[i] / hsub[k]
    for j in range(used):
        c = np.conj(y[j])
        for i in range(n):
            out[i] -= c * U[j, i]
    return out


@njit(cache=True)
def horner(dense, weights, use_shift, coeffs, e):
    """``p(T) e`` with ascending ``coeffs``."""
    n = e.shape[0]
    d = coeffs.shape[0] - 1
    acc = coeffs[d] * e
    tmp = np.zeros(n, np.complex128)
    for k in range(d - 1, -1, -1):
        matvec(dense, weights, use_shift, acc, tmp)
        for i in range(n):
            acc[i] = tmp[i] + coeffs[k] * e[i]
    return acc


@njit(cache=True)
def horner_adjoint(dense_h, weights, use_shift, coeffs, v):
    """``p(T)^H v``."""
    n = v.shape[0]
    d = coeffs.shape[0] - 1
    acc = np.conj(coeffs[d]) * v
    tmp = np.zeros(n, np.complex128)
    for k in range(d - 1, -1, -1):
        rmatvec(dense_h, weights, use_shift, acc, tmp)
        for i in range(n):
            acc[i] = tmp[i] + np.conj(coeffs[k]) * v[i]
    return acc


@njit(cache=True)
def value(dense, weights, use_shift, coeffs, e, K, tnorm):
    w = horner(dense, weights, use_shift, coeffs, e)
    hist, Q, H, hsub, y, used, r = arnoldi(dense, weights, use_shift, w, K, tnorm)
    return hist[used]


@njit(cache=True)
def value_grad(dense, dense_h, weights, use_shift, coeffs, e, K, tnorm):
    """Distance and the ascent direction of its square at ``e``.

    The squared distance is a minimum over a fixed family of polynomials, so
    its gradient is that of ``|(I - s(T)) p(T) e|**2`` with the minimizing
    ``s`` held fixed.
    """
    w = horner(dense, weights, use_shift, coeffs, e)
    hist, Q, H, hsub, y, used, r = arnoldi(dense, weights, use_shift, w, K, tnorm)
    gr = adjoint_residual(dense_h, weights, use_shift, H, hsub, y, used, r)
    g = horner_adjoint(dense_h, weights, use_shift, coeffs, gr)
    return hist[used], g


@njit(cache=True)
def ascend(dense, dense_h, weights, use_shift, coeffs, e0, K, tnorm, step0, max_steps, min_step):
    """Projected ascent on the unit sphere; the step halves after each rejected move."""
    e = e0 / _norm(e0)
    f, g = value_grad(dense, dense_h, weights, use_shift, coeffs, e, K, tnorm)
    step = step0
    steps = 0
    for steps in range(max_steps):
        if step < min_step:
            break
        proj = _dot(e, g).real
        gt = g - proj * e
        gn = _norm(gt)
        if gn <= 1e-300:
            break
        trial = e + (step / gn) * gt
        trial = trial / _norm(trial)
        ft, gtrial = value_grad(dense, dense_h, weights, use_shift, coeffs, trial, K, tnorm)
        if ft > f * (1.0 + 1e-12) + 1e-15:
            e = trial
            f = ft
            g = gtrial
        else:
            step *= 0.5
    return f, e, steps
