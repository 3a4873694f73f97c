"""Closed-form quantities for uniform valuations.

Order statistics of ``n`` standard uniforms: the ``j``-th largest value is
Beta(n - j + 1, j) distributed. Everything here accepts scalars or numpy
arrays (broadcast together) and returns a float for scalar input.
"""
import numpy as np

from ._betainc import as_flat, betainc_kernel, density_term_kernel

__all__ = [
    "ConvergenceError",
    "mu",
    "option_value",
    "beta_reg",
    "orderstat_cdf",
    "cdf_integral",
    "offline_value",
    "myopic_regret",
    "myopic_hire_prob",
    "myopic_regret_min",
]

BETA_TOL = 1e-15
BETA_MAX_ITER = 500


class ConvergenceError(ArithmeticError):
    """The incomplete-beta continued fraction failed to converge."""

    def __init__(self, x, a, b, max_iter):
        self.x, self.a, self.b, self.max_iter = x, a, b, max_iter
        super().__init__(
            f"incomplete beta continued fraction did not converge in {max_iter} "
            f"iterations at x={x!r}, a={a!r}, b={b!r}"
        )


def _result(values, scalar):
    return float(values) if scalar else values


def _is_scalar(*args):
    return all(np.ndim(a) == 0 for a in args)


def _check_int(name, value):
    arr = np.asarray(value)
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind != "f" or np.any(arr != np.round(arr)):
            raise ValueError(f"{name} must be an integer, got {value!r}")
    return arr.astype(np.int64)


def mu(n, j):
    """Mean of the j-th largest of n uniforms, (n - j + 1) / (n + 1)."""
    scalar = _is_scalar(n, j)
    n, j = _check_int("n", n), _check_int("j", j)
    if np.any(j < 1) or np.any(j > n):
        raise ValueError(f"rank j must satisfy 1 <= j <= n (n={n}, j={j})")
    return _result((n - j + 1) / (n + 1.0), scalar)


def option_value(n, k):
    """Expected gain k(k+1) / (2n(n+1)) from adding one applicant to the pool.

    This is E[(v - s)^+] with v uniform and s the k-th largest of n - 1
    other uniforms.
    """
    scalar = _is_scalar(n, k)
    n, k = _check_int("n", n), _check_int("k", k)
    if np.any(n < 1) or np.any(k < 0) or np.any(k > n):
        raise ValueError(f"need n >= 1 and 0 <= k <= n (n={n}, k={k})")
    return _result(k * (k + 1.0) / (2.0 * n * (n + 1.0)), scalar)


def beta_reg(x, a, b):
    """Regularized incomplete beta function I_x(a, b).

    Parameters
    ----------
    x : float or array_like
        Evaluation point(s) in [0, 1].
    a, b : float or array_like
        Positive shape parameters.

    Raises
    ------
    ValueError
        If ``x`` leaves [0, 1] or a shape is not positive.
    ConvergenceError
        If the continued fraction needs more than 500 iterations.
    """
    scalar = _is_scalar(x, a, b)
    shape, (xf, af, bf) = as_flat(x, a, b)
    if np.any(np.isnan(xf)) or np.any(xf < 0.0) or np.any(xf > 1.0):
        raise ValueError("x must lie in [0, 1]")
    if np.any(~(af > 0.0)) or np.any(~(bf > 0.0)):
        raise ValueError("shape parameters must be positive")
    out = np.empty_like(xf)
    iters = np.empty(xf.size, dtype=np.int64)
    betainc_kernel(xf, af, bf, BETA_TOL, BETA_MAX_ITER, out, iters)
    bad = np.flatnonzero(iters < 0)
    if bad.size:
        i = bad[0]
        raise ConvergenceError(xf[i], af[i], bf[i], BETA_MAX_ITER)
    return _result(out.reshape(shape), scalar)


def orderstat_cdf(n, j, x):
    """P(s_{n,j} <= x) for the j-th largest of n uniforms."""
    n, j = _check_int("n", n), _check_int("j", j)
    if np.any(j < 1) or np.any(j > n):
        raise ValueError(f"rank j must satisfy 1 <= j <= n (n={n}, j={j})")
    return beta_reg(x, n - j + 1, j)


def cdf_integral(y, a, b):
    """Integral of I_x(a, b) over x in [0, y].

    Uses the identity

        int_0^y B(x, a, b) dx = B(y, a, b + 1) - (1 - y) B(y, a, b)

    together with I_y(a, b + 1) = I_y(a, b) + y^a (1 - y)^b / (b B(a, b)),
    so only one continued fraction is evaluated per point.
    """
    scalar = _is_scalar(y, a, b)
    shape, (yf, af, bf) = as_flat(y, a, b)
    ib = np.asarray(beta_reg(yf, af, bf))
    dens = np.empty_like(yf)
    density_term_kernel(yf, af, bf, dens)
    # b/(a+b) I_y(a,b+1) - (1-y) I_y(a,b), simplified
    out = ib * (yf - af / (af + bf)) + dens / (af + bf)
    return _result(out.reshape(shape), scalar)


def offline_value(n, k):
    """Expected sum of the k largest of n uniforms, k(2n - k + 1) / (2(n + 1))."""
    scalar = _is_scalar(n, k)
    n, k = _check_int("n", n), _check_int("k", k)
    if np.any(n < 0) or np.any(k < 0) or np.any(k > n):
        raise ValueError(f"need 0 <= k <= n (n={n}, k={k})")
    return _result(k * (2.0 * n - k + 1.0) / (2.0 * (n + 1.0)), scalar)


def myopic_regret(n, k, p):
    """Expected cost of the current accept/reject decision at hire probability p.

    Measured against the hindsight benchmark (the k-th largest of the other
    n - 1 applicants). States with k = 0 or k = n carry no real decision and
    return 0.
    """
    scalar = _is_scalar(n, k, p)
    n, k = _check_int("n", n), _check_int("k", k)
    p = np.asarray(p, dtype=np.float64)
    if np.any(n < 1) or np.any(k < 0) or np.any(k > n):
        raise ValueError(f"need n >= 1 and 0 <= k <= n (n={n}, k={k})")
    if np.any(np.isnan(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("hire probability must lie in [0, 1]")
    interior = (k > 0) & (k < n)
    lam = k * (k + 1.0) / (2.0 * n * (n + 1.0))
    mean_next = (n - k) / np.maximum(n, 1.0)  # mu(n - 1, k)
    m = lam + p * (mean_next - 1.0 + 0.5 * p)
    return _result(np.where(interior, m, 0.0), scalar)


def myopic_hire_prob(n, k):
    """Minimizer of ``myopic_regret(n, k, .)``: 1 - mu(n - 1, k) = k / n."""
    scalar = _is_scalar(n, k)
    n, k = _check_int("n", n), _check_int("k", k)
    if np.any(n < 1) or np.any(k < 0) or np.any(k > n):
        raise ValueError(f"need n >= 1 and 0 <= k <= n (n={n}, k={k})")
    return _result(k / n.astype(np.float64), scalar)


def myopic_regret_min(n, k):
    """Minimum myopic regret k(n - k) / (2 n^2 (n + 1)); never exceeds 1/(8(n+1))."""
    scalar = _is_scalar(n, k)
    n, k = _check_int("n", n), _check_int("k", k)
    if np.any(n < 1) or np.any(k < 0) or np.any(k > n):
        raise ValueError(f"need n >= 1 and 0 <= k <= n (n={n}, k={k})")
    nf = n.astype(np.float64)
    return _result(k * (nf - k) / (2.0 * nf * nf * (nf + 1.0)), scalar)
