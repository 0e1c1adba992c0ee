"""Euclidean baseline: the Gauss-Weierstrass diffusion metric.

d_t(x, y)^2 = int |W_t(x - z) - W_t(y - z)|^2 dz with the heat kernel
W_t(z) = (4 pi t)^(-n/2) exp(-|z|^2 / 4t).  The metric is radial with
profile rho_t, whose square has the closed form
2 (8 pi t)^(-n/2) (1 - exp(-r^2 / 8t)); quadrature and closed form are kept
as independent routes and checked against each other.

Because the kernel factorizes over coordinates, the n-dimensional quadrature
reduces to products of one-dimensional adaptive integrals; the integration
domain is truncated with an analytically negligible Gaussian tail.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .exceptions import QuadratureError


@dataclass(frozen=True)
class GaussianParams:
    """Diffusion time t > 0 and dimension n >= 1."""

    t: float
    n: int = 1

    def __post_init__(self):
        if not (self.t > 0):
            raise ValueError("time t must be positive")
        if self.n < 1:
            raise ValueError("dimension n must be >= 1")


def weierstrass(x, p: GaussianParams) -> float:
    """W_t(x) = (4 pi t)^(-n/2) exp(-|x|^2 / 4t)."""
    if np.isscalar(x):
        sq = float(x) ** 2
    else:
        sq = float(np.dot(x, x))
    return (4.0 * math.pi * p.t) ** (-p.n / 2.0) * math.exp(-sq / (4.0 * p.t))


def _kernel_1d(u: float, t: float) -> float:
    return (4.0 * math.pi * t) ** (-0.5) * math.exp(-u * u / (4.0 * t))


def _truncation_halfwidth(t: float) -> float:
    # 12 standard deviations of the squared-kernel Gaussian; discarded mass
    # is below exp(-144/2) of the total, far under any tolerance used here.
    return 12.0 * math.sqrt(2.0 * t)


def _pair_integral_1d(a: float, b: float, t: float, quad_tol: float) -> float:
    """int w(a - u) w(b - u) du over a certified truncation window."""
    lo = min(a, b) - _truncation_halfwidth(t)
    hi = max(a, b) + _truncation_halfwidth(t)
    value, err = quad(
        lambda u: _kernel_1d(a - u, t) * _kernel_1d(b - u, t),
        lo,
        hi,
        epsabs=quad_tol,
        limit=200,
    )
    if err > 10.0 * quad_tol:
        raise QuadratureError(f"1d kernel product integral error estimate {err}")
    return value


def d_sq_quadrature(
    x: Sequence[float] | float,
    y: Sequence[float] | float,
    p: GaussianParams,
    quad_tol: float = 1e-10,
) -> float:
    """int |W_t(x - z) - W_t(y - z)|^2 dz by coordinate-factorized quadrature.

    Supported for n in {1, 2}.  Expanding the square gives three terms, each
    a product over coordinates of one-dimensional kernel-product integrals.
    """
    if p.n not in (1, 2):
        raise ValueError("quadrature route supports n in {1, 2}")
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    yv = np.atleast_1d(np.asarray(y, dtype=float))
    if xv.shape != (p.n,) or yv.shape != (p.n,):
        raise ValueError(f"points must have dimension {p.n}")
    per_dim_tol = quad_tol / (4.0 * p.n)
    xx = cross = yy = 1.0
    for d in range(p.n):
        xx *= _pair_integral_1d(xv[d], xv[d], p.t, per_dim_tol)
        cross *= _pair_integral_1d(xv[d], yv[d], p.t, per_dim_tol)
        yy *= _pair_integral_1d(yv[d], yv[d], p.t, per_dim_tol)
    return max(0.0, xx - 2.0 * cross + yy)


def rho_sq_quadrature(
    r: float, p: GaussianParams, quad_tol: float = 1e-10
) -> float:
    """The radial profile rho_t^2(r) by quadrature: distance squared between
    kernel slices centered at r*e1 and the origin."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r == 0.0:
        return 0.0
    e1 = np.zeros(p.n)
    e1[0] = r
    return d_sq_quadrature(e1, np.zeros(p.n), p, quad_tol)


def rho_sq_closed(r: float, p: GaussianParams) -> float:
    """Closed form 2 (8 pi t)^(-n/2) (1 - exp(-r^2 / 8t)), obtained by
    integrating the derivative of the profile from 0 to r."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    return 2.0 * (8.0 * math.pi * p.t) ** (-p.n / 2.0) * (
        -math.expm1(-r * r / (8.0 * p.t))
    )


def rho_sq_derivative(r: float, p: GaussianParams) -> float:
    """d(rho_t^2)/dr = 4 (8 pi t)^(-n/2) exp(-r^2 / 8t) r / (8t)."""
    return (
        4.0
        * (8.0 * math.pi * p.t) ** (-p.n / 2.0)
        * math.exp(-r * r / (8.0 * p.t))
        * r
        / (8.0 * p.t)
    )


def rho(r: float, p: GaussianParams) -> float:
    return math.sqrt(rho_sq_closed(r, p))


def rho_inverse(value: float, p: GaussianParams, tol: float = 1e-12) -> float:
    """Invert the strictly increasing profile by bisection."""
    if value < 0:
        raise ValueError("profile values are nonnegative")
    if value == 0.0:
        return 0.0
    supremum = math.sqrt(2.0 * (8.0 * math.pi * p.t) ** (-p.n / 2.0))
    if value >= supremum:
        raise ValueError(f"profile value {value} at or above supremum {supremum}")
    hi = 1.0
    while rho(hi, p) < value:
        hi *= 2.0
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if rho(mid, p) < value:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def squared_ratio_limit(t1: float, t2: float, n: int) -> float:
    """The small-r limit of rho_{t1}^2 / rho_{t2}^2: (t2/t1)^(n/2 + 1)."""
    return (t2 / t1) ** (n / 2.0 + 1.0)


def ratio_limit_check(
    t1: float,
    t2: float,
    n: int,
    r_grid: Sequence[float],
) -> float:
    """Evaluate the squared profile ratio along a grid of radii decreasing
    toward 0 and return the extrapolated limit (the value at the smallest r).

    Raises if the sequence is not settling down at the grid resolution.
    """
    rs = sorted(r_grid, reverse=True)
    if not rs or rs[-1] <= 0:
        raise ValueError("r_grid must contain positive radii decreasing toward 0")
    p1 = GaussianParams(t1, n)
    p2 = GaussianParams(t2, n)
    values = [rho_sq_closed(r, p1) / rho_sq_closed(r, p2) for r in rs]
    if len(values) >= 3:
        diffs = [abs(b - a) for a, b in zip(values, values[1:])]
        if diffs[-1] > diffs[0] + 1e-12:
            raise QuadratureError("profile ratio sequence is not converging")
    return values[-1]


@dataclass(frozen=True)
class InvarianceReport:
    trials: int
    max_discrepancy: float
    violations: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def translation_rotation_invariance_check(
    p: GaussianParams,
    trials: int,
    seed: int = 0,
    tol: float = 1e-6,
    quad_tol: float = 1e-9,
) -> InvarianceReport:
    """Check d_t(x + v, y + v) = d_t(x, y), and rotation invariance for n = 2,
    by quadrature on random configurations."""
    if p.n not in (1, 2):
        raise ValueError("invariance check supports n in {1, 2}")
    rng = random.Random(seed)
    worst = 0.0
    violations = []
    for trial in range(trials):
        x = np.array([rng.uniform(-2, 2) for _ in range(p.n)])
        y = np.array([rng.uniform(-2, 2) for _ in range(p.n)])
        v = np.array([rng.uniform(-3, 3) for _ in range(p.n)])
        base = d_sq_quadrature(x, y, p, quad_tol)
        shifted = d_sq_quadrature(x + v, y + v, p, quad_tol)
        gap = abs(math.sqrt(base) - math.sqrt(shifted))
        worst = max(worst, gap)
        if gap > tol:
            violations.append(f"trial {trial}: translation gap {gap}")
        if p.n == 2:
            theta = rng.uniform(0, 2 * math.pi)
            rot = np.array(
                [
                    [math.cos(theta), -math.sin(theta)],
                    [math.sin(theta), math.cos(theta)],
                ]
            )
            rotated = d_sq_quadrature(rot @ x, rot @ y, p, quad_tol)
            gap = abs(math.sqrt(base) - math.sqrt(rotated))
            worst = max(worst, gap)
            if gap > tol:
                violations.append(f"trial {trial}: rotation gap {gap}")
    return InvarianceReport(trials, worst, tuple(violations))
