"""Compiled kernel for the regularized incomplete beta function.

Modified Lentz evaluation of the continued fraction, with the usual
symmetry flip so the fraction is always evaluated on the side where it
converges quickly.
"""
import math

import numba
import numpy as np

_TINY = 1e-300


@numba.njit(cache=True)
def _contfrac(a, b, x, tol, max_iter):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= tol:
            return h, m
    return h, -1


@numba.njit(cache=True)
def log_beta_density_term(x, a, b):
    """log of x**a * (1 - x)**b / B(a, b) for 0 < x < 1."""
    return (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
            + a * math.log(x) + b * math.log1p(-x))


@numba.njit(cache=True)
def betainc_kernel(x, a, b, tol, max_iter, out, iters):
    """Fill ``out[i] = I_{x[i]}(a[i], b[i])``.

    ``iters[i]`` receives the iteration count, or -1 when the fraction did
    not converge within ``max_iter``.
    """
    for i in range(x.size):
        xi = x[i]
        ai = a[i]
        bi = b[i]
        if xi <= 0.0:
            out[i] = 0.0
            iters[i] = 0
            continue
        if xi >= 1.0:
            out[i] = 1.0
            iters[i] = 0
            continue
        flip = xi > (ai + 1.0) / (ai + bi + 2.0)
        if flip:
            xi, ai, bi = 1.0 - xi, bi, ai
        h, m = _contfrac(ai, bi, xi, tol, max_iter)
        val = math.exp(log_beta_density_term(xi, ai, bi)) * h / ai
        out[i] = 1.0 - val if flip else val
        iters[i] = m


@numba.njit(cache=True)
def density_term_kernel(x, a, b, out):
    for i in range(x.size):
        xi = x[i]
        if xi <= 0.0 or xi >= 1.0:
            out[i] = 0.0
        else:
            out[i] = math.exp(log_beta_density_term(xi, a[i], b[i]))


def as_flat(*arrays):
    """Broadcast to a common shape and return contiguous float64 copies."""
    bc = np.broadcast_arrays(*[np.asarray(v, dtype=np.float64) for v in arrays])
    shape = bc[0].shape
    return shape, [np.ascontiguousarray(v).ravel().copy() for v in bc]
