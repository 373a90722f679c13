"""Numeric inner loops.

Every function here is decorated with :func:`gateforge._accel.kernel`, so the
bodies must stay inside the numpy subset numba understands: no dicts, no
keyword-heavy numpy calls, no object arrays.  With numba disabled they run as
ordinary numpy code.  The three in-place update helpers have two bodies each,
picked at import time.
"""
import cmath

import numpy as np

from ._accel import USING_NUMBA, kernel

EPS = np.finfo(np.float64).eps


# Rotation and reflection updates.  Compiled, explicit loops avoid the slice
# temporaries that dominate at n <= 16; uncompiled, slicing is the fast path.
if USING_NUMBA:

    @kernel
    def _rotate_rows(h, k, c, s, start):
        sc = np.conj(s)
        for j in range(start, h.shape[1]):
            x = h[k, j]
            y = h[k + 1, j]
            h[k, j] = c * x + s * y
            h[k + 1, j] = c * y - sc * x

    @kernel
    def _rotate_cols(h, k, c, s, stop):
        sc = np.conj(s)
        for i in range(stop):
            x = h[i, k]
            y = h[i, k + 1]
            h[i, k] = c * x + sc * y
            h[i, k + 1] = c * y - s * x

    @kernel
    def _reflect(h, q, v, k):
        # h <- (I - 2vv^H) h (I - 2vv^H), q <- q (I - 2vv^H) on indices > k
        n = h.shape[0]
        m = v.shape[0]
        off = k + 1
        for j in range(n):
            acc = 0.0j
            for r in range(m):
                acc += np.conj(v[r]) * h[off + r, j]
            for r in range(m):
                h[off + r, j] -= 2.0 * v[r] * acc
        for i in range(n):
            acc = 0.0j
            acc_q = 0.0j
            for r in range(m):
                acc += h[i, off + r] * v[r]
                acc_q += q[i, off + r] * v[r]
            for r in range(m):
                h[i, off + r] -= 2.0 * acc * np.conj(v[r])
                q[i, off + r] -= 2.0 * acc_q * np.conj(v[r])

else:

    def _rotate_rows(h, k, c, s, start):
        x = h[k, start:].copy()
        y = h[k + 1, start:]
        h[k, start:] = c * x + s * y
        h[k + 1, start:] = c * y - np.conj(s) * x

    def _rotate_cols(h, k, c, s, stop):
        x = h[:stop, k].copy()
        y = h[:stop, k + 1]
        h[:stop, k] = c * x + np.conj(s) * y
        h[:stop, k + 1] = c * y - s * x

    def _reflect(h, q, v, k):
        vc = np.conj(v)
        h[k + 1:, :] -= 2.0 * np.outer(v, vc @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, vc)
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, vc)


@kernel
def frobenius(a):
    return np.sqrt(np.sum(np.abs(a) ** 2))


@kernel
def hessenberg(a):
    """Householder reduction ``a = q h q^H`` with ``h`` upper Hessenberg."""
    n = a.shape[0]
    h = np.ascontiguousarray(a).astype(np.complex128)
    q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.sqrt(np.sum(np.abs(x) ** 2))
        if alpha == 0.0:
            continue
        ax0 = abs(x[0])
        phase = x[0] / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        x[0] = x[0] + phase * alpha
        _reflect(h, q, x / np.sqrt(np.sum(np.abs(x) ** 2)), k)
        h[k + 2:, k] = 0.0
    return h, q


@kernel
def givens(x, y):
    """Rotation ``[[c, s], [-conj(s), c]]`` sending ``(x, y)`` to ``(r, 0)``."""
    ax = abs(x)
    ay = abs(y)
    if ay == 0.0:
        return 1.0, 0.0j
    if ax == 0.0:
        return 0.0, np.conj(y) / ay
    r = np.hypot(ax, ay)
    return ax / r, (x / ax) * np.conj(y) / r


@kernel
def schur(a):
    """Complex Schur form ``a = q t q^H`` by single-shift Hessenberg QR.

    Returns ``(t, q, converged)``.  Wilkinson shifts, with an exceptional
    shift every tenth sweep on a stalled window (permutation matrices stall
    the plain shift).
    """
    n = a.shape[0]
    h, q = hessenberg(a)
    if n == 1:
        return h, q, True
    anorm = frobenius(h)
    if anorm == 0.0:
        return h, q, True
    cs = np.zeros(n)
    sn = np.zeros(n, dtype=np.complex128)
    hi = n - 1
    its = 0
    total = 0
    while hi > 0:
        lo = hi
        while lo > 0:
            s = abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])
            if s == 0.0:
                s = anorm
            if abs(h[lo, lo - 1]) <= EPS * s:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if total > 30 * n:
            return h, q, False

        if its % 10 == 0:
            sigma = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            a11 = h[hi - 1, hi - 1]
            a22 = h[hi, hi]
            mid = 0.5 * (a11 + a22)
            half = 0.5 * (a11 - a22)
            disc = cmath.sqrt(half * half + h[hi - 1, hi] * h[hi, hi - 1])
            e1 = mid + disc
            e2 = mid - disc
            sigma = e1 if abs(e1 - a22) <= abs(e2 - a22) else e2

        for k in range(lo, hi + 1):
            h[k, k] -= sigma
        for k in range(lo, hi):
            c, s = givens(h[k, k], h[k + 1, k])
            cs[k] = c
            sn[k] = s
            _rotate_rows(h, k, c, s, k)
            h[k + 1, k] = 0.0
        for k in range(lo, hi):
            _rotate_cols(h, k, cs[k], sn[k], k + 2)
            _rotate_cols(q, k, cs[k], sn[k], n)
        for k in range(lo, hi + 1):
            h[k, k] += sigma
    return h, q, True


@kernel
def hermitian_eig(a):
    """Eigenvalues (real, Schur order) and orthonormal eigenvectors of ``a``."""
    herm = 0.5 * (a + np.conj(a.T))
    t, q, ok = schur(herm)
    if not ok:
        raise ValueError("QR iteration did not converge")
    return np.real(np.diag(t)).copy(), q


@kernel
def expm_herm(a, scale):
    """``exp(-1j * scale * a)`` for Hermitian ``a``."""
    lam, q = hermitian_eig(a)
    return (q * np.exp(-1j * scale * lam)) @ np.conj(q.T)


@kernel
def _string_action(code, n):
    """Column index and phase of ``P[i, j]`` for every row ``i``.

    ``code`` enumerates strings in base 4 (0=I, 1=X, 2=Y, 3=Z) with qubit 0 as
    the most significant digit.
    """
    d = 1 << n
    rows = np.arange(d)
    phase = np.ones(d, dtype=np.complex128)
    flip = 0
    for qb in range(n):
        letter = (code >> (2 * (n - 1 - qb))) & 3
        shift = n - 1 - qb
        bits = (rows >> shift) & 1
        if letter == 1:
            flip |= 1 << shift
        elif letter == 2:
            flip |= 1 << shift
            phase = phase * (1j * (2 * bits - 1))
        elif letter == 3:
            phase = phase * (1 - 2 * bits)
    return rows ^ flip, phase


@kernel
def pauli_coefficients(h, n):
    """``Tr(P_s h) / 2**n`` for all ``4**n`` strings, in base-4 order."""
    d = 1 << n
    flat = np.ascontiguousarray(h).ravel()
    rows = np.arange(d)
    out = np.zeros(1 << (2 * n), dtype=np.complex128)
    for code in range(out.shape[0]):
        cols, phase = _string_action(code, n)
        out[code] = np.sum(phase * flat[cols * d + rows]) / d
    return out


@kernel
def pauli_matrix(coeffs, n):
    """Dense ``sum_s coeffs[s] * P_s`` from base-4 ordered coefficients."""
    d = 1 << n
    flat = np.zeros(d * d, dtype=np.complex128)
    rows = np.arange(d)
    for code in range(coeffs.shape[0]):
        c = coeffs[code]
        if c == 0.0:
            continue
        cols, phase = _string_action(code, n)
        pos = rows * d + cols
        flat[pos] = flat[pos] + c * phase
    return flat.reshape((d, d))


@kernel
def time_ordered_product(terms, weights, dt_over_hbar):
    """Midpoint product ``prod_k exp(-i dt/hbar sum_j weights[k, j] terms[j])``.

    Later slices multiply from the left.
    """
    d = terms.shape[1]
    u = np.eye(d, dtype=np.complex128)
    for k in range(weights.shape[0]):
        hk = np.zeros((d, d), dtype=np.complex128)
        for j in range(terms.shape[0]):
            hk += weights[k, j] * terms[j]
        u = expm_herm(hk, dt_over_hbar) @ u
    return u
