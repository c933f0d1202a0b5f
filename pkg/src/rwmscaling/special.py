"""Gaussian and incomplete-beta special functions and the projection kernel.

The kernel K_d is the survival function of the length of the first coordinate
of a uniform unit vector in d dimensions: K_d(x) = P(|U_1| > x) with
U_1^2 ~ Beta(1/2, (d-1)/2) for d >= 2, and a unit step for d = 1 (where the
"direction" is just a sign).  It is what a spherically symmetric law sees of
an acceptance half-space.
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sp

__all__ = ["gaussian_cdf", "gaussian_pdf", "beta_cdf", "kernel_K"]

_SQRT2PI = np.sqrt(2.0 * np.pi)


def gaussian_cdf(x):
    """Standard normal CDF, accurate to ~1e-16 absolute (erfc-based)."""
    return _sp.ndtr(x)


def gaussian_pdf(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) / _SQRT2PI
    return out if out.ndim else float(out)


def beta_cdf(u, a: float, b: float):
    """Regularized incomplete beta function I_u(a, b).

    Continued-fraction evaluation (with the symmetry switch at
    u = (a+1)/(a+b+2)) via scipy's Cephes routine.  Raises ValueError for
    u outside [0, 1] or non-positive shape parameters.
    """
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"beta_cdf requires a > 0 and b > 0, got a={a}, b={b}")
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0.0) or np.any(u_arr > 1.0) or np.any(np.isnan(u_arr)):
        raise ValueError("beta_cdf requires u in [0, 1]")
    out = _sp.betainc(a, b, u_arr)
    return out if out.ndim else float(out)


def kernel_K(d: int, x):
    """Projection kernel K_d(x) = 1 - G_d(x^2) on x >= 0.

    G_d is the CDF of the squared first coordinate of a uniform direction:
    a point mass at 1 for d = 1 (so K_1 is the indicator of x < 1) and
    Beta(1/2, (d-1)/2) for d >= 2.  Values x >= 1 map to exactly 0.

    Uses the complemented incomplete beta directly: forming 1 - G_d would
    cancel catastrophically where K_d is tiny (large d, x near 1), turning
    the routine's absolute error into unbounded relative error.
    """
    if d < 1 or int(d) != d:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0) or np.any(np.isnan(x_arr)):
        raise ValueError("kernel_K requires x >= 0")
    if d == 1:
        out = (x_arr < 1.0).astype(float)
    else:
        inside = x_arr < 1.0
        u = np.where(inside, x_arr, 0.0) ** 2
        out = np.where(inside, _sp.betaincc(0.5, 0.5 * (d - 1), u), 0.0)
    return out if out.ndim else float(out)
