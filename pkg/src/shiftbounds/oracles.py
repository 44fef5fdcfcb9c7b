"""Independent reference values for cross-checking the bound machinery.

Two exactly solvable geometries anchor the Monte Carlo and analytic
paths:

* slabs: the shifted mass is a one-dimensional normal difference
  (closed form, shared with the kernels);
* Euclidean balls: the shifted mass reduces to a one-dimensional
  integral of phi(x + t) * ChiSquareCDF_{n-1}(R^2 - x^2) over [-R, R],
  evaluated here with adaptive Simpson quadrature after the
  substitution x = R sin(theta) (see :func:`oracle_ball`).

The quadrature enforces a minimum refinement depth so that sharply
concentrated integrands (far shifts, masses ~1e-20) cannot be accepted
from a deceptively flat coarse pass.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import DomainError, NumericError
from .kernels import regularized_gamma_p, slab_mass, std_normal_pdf

_DEFAULT_ABS_TOL = 1e-10
_DEFAULT_MIN_DEPTH = 6
_MAX_DEPTH = 50


def oracle_slab(halfwidth: float, t: float) -> float:
    """Shifted-slab mass g_a(t), the closed-form anchor case."""
    return slab_mass(halfwidth, t).value


def chi_square_cdf(dof: int, x: float) -> float:
    """CDF of the chi-square distribution with `dof` >= 1 degrees of freedom."""
    if not isinstance(dof, int) or isinstance(dof, bool) or dof < 1:
        raise DomainError(f"degrees of freedom must be a positive integer, got {dof!r}")
    if math.isnan(x):
        raise DomainError("chi-square argument must not be NaN")
    if x <= 0.0:
        return 0.0
    return regularized_gamma_p(0.5 * dof, 0.5 * x)


def adaptive_simpson(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    abs_tol: float = _DEFAULT_ABS_TOL,
    min_depth: int = _DEFAULT_MIN_DEPTH,
    max_depth: int = _MAX_DEPTH,
) -> float:
    """Adaptive Simpson integral of fn over [lo, hi] to absolute tolerance.

    Bisects until both the depth is at least `min_depth` and the local
    Richardson error estimate passes; raises NumericError if `max_depth`
    is hit before convergence.
    """
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError(f"integration interval must be finite with lo < hi, got [{lo}, {hi}]")
    if not (abs_tol > 0.0 and math.isfinite(abs_tol)):
        raise DomainError(f"abs_tol must be finite and > 0, got {abs_tol!r}")
    if min_depth < 0 or max_depth < min_depth:
        raise DomainError("need 0 <= min_depth <= max_depth")
    mid = 0.5 * (lo + hi)
    f_lo, f_mid, f_hi = fn(lo), fn(mid), fn(hi)
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    return _adapt(
        fn, lo, hi, f_lo, f_mid, f_hi, whole, abs_tol, 0, min_depth, max_depth
    )


def _adapt(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    f_lo: float,
    f_mid: float,
    f_hi: float,
    whole: float,
    tol: float,
    depth: int,
    min_depth: int,
    max_depth: int,
) -> float:
    mid = 0.5 * (lo + hi)
    lq = 0.5 * (lo + mid)
    rq = 0.5 * (mid + hi)
    f_lq = fn(lq)
    f_rq = fn(rq)
    left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lq + f_mid)
    right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rq + f_hi)
    delta = left + right - whole
    if depth >= min_depth and abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth >= max_depth:
        raise NumericError(
            f"adaptive Simpson failed to converge on [{lo}, {hi}] "
            f"(residual {delta:.3e} at depth {depth})"
        )
    half_tol = 0.5 * tol
    return _adapt(
        fn, lo, mid, f_lo, f_lq, f_mid, left, half_tol, depth + 1, min_depth, max_depth
    ) + _adapt(
        fn, mid, hi, f_mid, f_rq, f_hi, right, half_tol, depth + 1, min_depth, max_depth
    )


def oracle_ball(dim: int, radius: float, t: float) -> float:
    """Gaussian mass of a shifted Euclidean ball, P(Z in t e + B_radius).

    Splits Z into the coordinate along the shift and the orthogonal
    chi-square radius: the mass is the integral over x in [-R, R] of
    phi(x + t) * ChiSquareCDF_{dim-1}(R^2 - x^2), integrated here as
    x = R sin(theta).  The substitution matters: for even dim the CDF
    factor behaves like sqrt(R^2 - x^2) at the endpoints and the raw
    Simpson recursion cannot reach 1e-10 there, while in theta the
    integrand is analytic (sqrt(R^2 cos^2) = R cos on the interval).
    For dim = 1 the ball is an interval and the closed slab form is
    used directly.
    """
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise DomainError(f"ball dimension must be a positive integer, got {dim!r}")
    if not (math.isfinite(radius) and radius > 0.0):
        raise DomainError(f"ball radius must be finite and > 0, got {radius!r}")
    if math.isnan(t) or t < 0.0:
        raise DomainError(f"shift magnitude t must be >= 0, got {t!r}")
    if dim == 1:
        return oracle_slab(radius, t)
    dof = dim - 1

    def integrand(theta: float) -> float:
        across = radius * math.cos(theta)
        if across <= 0.0:
            return 0.0
        return (
            std_normal_pdf(radius * math.sin(theta) + t)
            * chi_square_cdf(dof, across * across)
            * across
        )

    return adaptive_simpson(integrand, -0.5 * math.pi, 0.5 * math.pi)
