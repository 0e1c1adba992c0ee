"""Heat kernel, profile functions and the dyadic diffusion metric.

The diffusion distance of order s at time t admits two routes:

* spectral: the Parseval sum over Haar wavelets of
  exp(-2t|I|^-s) |h_I(x) - h_I(y)|^2, enumerated wavelet by wavelet;
* closed form: psi_t(delta(x, y)) where
  psi_t(lam)^2 = (2/lam) * eta_t(lam^-s) and
  eta_t(sigma) = 2 exp(-2 t sigma) + sum_{l>=1} 2^l exp(-2 t 2^(s l) sigma).

Both are implemented independently; their agreement is the headline check.
Every truncated series carries a certified geometric tail bound instead of a
fixed term count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from scipy.integrate import quad

from .dyadic import (
    DyadicPoint,
    DyadicInterval,
    dyadic_distance,
    haar_eval,
    interval_containing,
    smallest_common_interval,
)
from .exceptions import CapExceeded, QuadratureError

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class DiffusionParams:
    """Fractional order s > 0 and diffusion time t > 0."""

    s: float
    t: float

    def __post_init__(self):
        if not (self.s > 0):
            raise ValueError("fractional order s must be positive")
        if not (self.t > 0):
            raise ValueError("diffusion time t must be positive")


@dataclass(frozen=True)
class TruncationPolicy:
    """Absolute tail tolerance plus hard caps for all series and searches."""

    tail_tol: float = 1e-12
    max_terms: int = 100_000
    max_depth: int = 200

    def __post_init__(self):
        if not (self.tail_tol > 0):
            raise ValueError("tail_tol must be positive")
        if self.max_terms < 1 or self.max_depth < 1:
            raise ValueError("caps must be >= 1")


DEFAULT_TRUNC = TruncationPolicy()


def _pow2(x: float) -> float:
    try:
        return 2.0 ** x
    except OverflowError:
        return math.inf


def eta(
    params: DiffusionParams, sigma: float, trunc: TruncationPolicy = DEFAULT_TRUNC
) -> float:
    """eta_t(sigma) = 2 exp(-2 t sigma) + sum_{l>=1} 2^l exp(-2 t 2^(s l) sigma).

    Terms eventually decay super-exponentially; summation stops once the exact
    successive-term ratio r = 2 exp(-2 t sigma 2^(s l) (2^s - 1)) is <= 1/2
    (it is decreasing in l), at which point the discarded tail is bounded by
    term * r / (1 - r) and required to be <= tail_tol.
    """
    if not (sigma > 0):
        raise ValueError("sigma must be positive")
    s, t = params.s, params.t
    a = 2.0 * t * sigma
    terms = [2.0 * math.exp(-a)]
    growth = _pow2(s) - 1.0
    for ell in range(1, trunc.max_terms + 1):
        p = _pow2(s * ell)
        term = math.exp(ell * _LN2 - a * p)
        terms.append(term)
        ratio = 2.0 * math.exp(-a * p * growth)
        if ratio <= 0.5 and term * ratio / (1.0 - ratio) <= trunc.tail_tol:
            return math.fsum(terms)
    raise CapExceeded(
        f"eta series not certified within {trunc.max_terms} terms "
        f"(s={s}, t={t}, sigma={sigma})"
    )


def log_psi_sq(
    params: DiffusionParams,
    lam: Union[float, Fraction],
    trunc: TruncationPolicy = DEFAULT_TRUNC,
) -> float:
    """log(psi_t(lam)^2) for lam > 0, stable against underflow.

    Factoring the leading term out of eta gives
    psi^2 = (4/lam) exp(-2 t sigma) (1 + S),
    S = sum_{l>=1} 2^(l-1) exp(-2 t sigma (2^(s l) - 1)),
    so the log stays finite far below the double underflow threshold of the
    direct route.  S carries the same exact successive-ratio certificate as
    eta, applied relatively.  Returns -inf when sigma overflows (lam so small
    that psi is an exact floating-point 0).
    """
    lam_f = float(lam)
    if not (lam_f > 0.0):
        raise ValueError("lam must be positive")
    s, t = params.s, params.t
    sigma = lam_f ** (-s)
    a = 2.0 * t * sigma
    if math.isinf(a):
        return -math.inf
    growth = _pow2(s) - 1.0
    total = 0.0
    certified = False
    for ell in range(1, trunc.max_terms + 1):
        p = _pow2(s * ell)
        term = math.exp((ell - 1) * _LN2 - a * (p - 1.0))
        total += term
        ratio = 2.0 * math.exp(-a * p * growth)
        if ratio <= 0.5 and term * ratio / (1.0 - ratio) <= trunc.tail_tol * (
            1.0 + total
        ):
            certified = True
            break
    if not certified:
        raise CapExceeded(
            f"log_psi_sq series not certified within {trunc.max_terms} terms "
            f"(s={s}, t={t}, lam={lam_f})"
        )
    return 2.0 * _LN2 - math.log(lam_f) - a + math.log1p(total)


def psi(
    params: DiffusionParams,
    lam: Union[float, Fraction],
    trunc: TruncationPolicy = DEFAULT_TRUNC,
) -> float:
    """psi_t(lam) = sqrt((2/lam) * eta_t(lam^-s)), with psi_t(0) = 0.

    Evaluated as exp(log_psi_sq / 2), which keeps values representable all
    the way down to the denormal floor instead of underflowing at the square.
    """
    lam_f = float(lam)
    if lam_f < 0:
        raise ValueError("lam must be nonnegative")
    if lam_f == 0.0:
        return 0.0
    return math.exp(0.5 * log_psi_sq(params, lam, trunc))


def log_psi_sq_increment(params: DiffusionParams, i: int) -> float:
    """log of psi_t(2^(i+1))^2 - psi_t(2^i)^2, in closed form.

    Telescoping the series gives the exact increment
    2^(1-i) * (exp(-2t 2^(-(i+1)s)) - exp(-2t 2^(-is))), always positive;
    the log-scale evaluation stays finite where the raw increment under- or
    overflows double precision, so strict monotonicity of psi on powers of 2
    can be asserted over any level range.  Raises ValueError if the computed
    increment is not positive.
    """
    s = params.s
    a = 2.0 * params.t * _pow2(-i * s)
    # increment = 2^(1-i) e^(-a 2^-s) (1 - e^(-a (1 - 2^-s)))
    inner = -math.expm1(-a * (1.0 - _pow2(-s)))
    if not (inner > 0.0):
        raise ValueError(f"psi increment not positive at i={i}")
    return (1 - i) * _LN2 - a * _pow2(-s) + math.log(inner)


def _bilateral_sum(s: float, a: float, trunc: TruncationPolicy) -> float:
    """sum_{k in Z} 2^k exp(-a 2^(k s)) with certified tails on both sides.

    Left tail (k -> -inf): the exponential factor is < 1, so the discarded
    part is below the geometric sum 2^k.  Right tail: same super-exponential
    ratio certificate as in eta.
    """
    terms = []
    k = 0
    while True:
        terms.append(math.exp(k * _LN2 - a * _pow2(k * s)))
        if _pow2(k) <= trunc.tail_tol:
            break
        k -= 1
        if -k > trunc.max_terms:
            raise CapExceeded("bilateral series: left tail not certified")
    growth = _pow2(s) - 1.0
    for k in range(1, trunc.max_terms + 1):
        p = _pow2(k * s)
        term = math.exp(k * _LN2 - a * p)
        terms.append(term)
        ratio = 2.0 * math.exp(-a * p * growth)
        if ratio <= 0.5 and term * ratio / (1.0 - ratio) <= trunc.tail_tol:
            return math.fsum(terms)
    raise CapExceeded("bilateral series: right tail not certified")


def psi_infinity(
    params: DiffusionParams, trunc: TruncationPolicy = DEFAULT_TRUNC
) -> float:
    """The finite limit of psi_t along growing powers of 2:
    sqrt(2 * sum_{k in Z} 2^k exp(-2 t 2^(k s)))."""
    return math.sqrt(2.0 * _bilateral_sum(params.s, 2.0 * params.t, trunc))


def c_t_s(
    params: DiffusionParams,
    trunc: TruncationPolicy = DEFAULT_TRUNC,
    quad_tol: float = 1e-8,
) -> float:
    """c_t(s) = t^(-1/(2s)) * sqrt(integral_0^inf exp(-2 x^s) dx).

    The integral is evaluated by adaptive quadrature and cross-checked
    against Gamma(1 + 1/s) * 2^(-1/s) (substitution u = 2 x^s).
    """
    s, t = params.s, params.t
    value, err = quad(lambda x: math.exp(-2.0 * x**s), 0.0, math.inf, epsabs=1e-13, limit=400)
    closed = math.gamma(1.0 + 1.0 / s) * 2.0 ** (-1.0 / s)
    if err > 1e-6 or abs(value - closed) > quad_tol * max(1.0, closed):
        raise QuadratureError(
            f"c_t(s) quadrature {value} disagrees with gamma form {closed} (err={err})"
        )
    return t ** (-1.0 / (2.0 * s)) * math.sqrt(value)


def sandwich(
    params: DiffusionParams, trunc: TruncationPolicy = DEFAULT_TRUNC
) -> tuple[float, float, float]:
    """(sqrt(2)*c, psi_infinity, 2*c): the strict two-sided bound on the limit."""
    c = c_t_s(params, trunc)
    return math.sqrt(2.0) * c, psi_infinity(params, trunc), 2.0 * c


def kernel_K(
    x: DyadicPoint,
    y: DyadicPoint,
    params: DiffusionParams,
    trunc: TruncationPolicy = DEFAULT_TRUNC,
) -> float:
    """The heat kernel sum_h exp(-t|I(h)|^-s) h(x) h(y).

    Only wavelets whose support contains both points contribute.  For x != y
    these are exactly the ancestors of the minimal common interval; the two
    points sit in opposite halves there (product -1/delta) and in the same
    half above it (product +1/|I|).  The ancestor tail is geometric with
    ratio 1/2 so the remainder after the last included interval of length L
    is below 1/L.  For x == y the sum runs over the full bilateral chain of
    intervals containing x.
    """
    s, t = params.s, params.t
    common = smallest_common_interval(x, y)
    if common is None:
        # Diagonal: sum_j 2^j exp(-t 2^(j s)) over all levels j.
        return _bilateral_sum(s, t, trunc)
    inv_len = _pow2(common.level)
    terms = [-math.exp(-t * inv_len**s) * inv_len]
    for m in range(1, trunc.max_terms + 1):
        inv_len *= 0.5
        terms.append(math.exp(-t * inv_len**s) * inv_len)
        if inv_len <= trunc.tail_tol:
            return math.fsum(terms)
    raise CapExceeded("kernel ancestor series not certified")


def distance_closed(
    x: DyadicPoint,
    y: DyadicPoint,
    params: DiffusionParams,
    trunc: TruncationPolicy = DEFAULT_TRUNC,
) -> float:
    """d_t(x, y) = psi_t(delta(x, y)): the closed-form route."""
    return psi(params, dyadic_distance(x, y), trunc)


def distance_spectral(
    x: DyadicPoint,
    y: DyadicPoint,
    params: DiffusionParams,
    trunc: TruncationPolicy = DEFAULT_TRUNC,
) -> float:
    """d_t(x, y) by direct enumeration of the Parseval sum.

    Three groups contribute: the separating wavelet at the minimal common
    interval, and the two one-sided chains of wavelets containing exactly one
    of the points.  Wavelets strictly above the common interval see equal
    values at x and y and are skipped.  The discarded chain tail is certified
    by the same super-exponential ratio bound as in eta, applied to the
    squared sum relative to the accumulated total so tiny distances keep
    full relative accuracy.
    """
    s, t = params.s, params.t
    common = smallest_common_interval(x, y)
    if common is None:
        return 0.0
    sep = haar_eval(common, x) - haar_eval(common, y)
    inv_len = _pow2(common.level)
    terms = [math.exp(-2.0 * t * inv_len**s) * sep * sep]
    ix = common.child_containing(x)
    iy = common.child_containing(y)
    growth = _pow2(s) - 1.0
    for _ in range(1, min(trunc.max_depth, trunc.max_terms) + 1):
        w = _pow2(ix.level)
        mult = math.exp(-2.0 * t * w**s)
        hx = haar_eval(ix, x)
        hy = haar_eval(iy, y)
        terms.append(mult * hx * hx)
        terms.append(mult * hy * hy)
        # both chain terms at this level sum to exactly 2 * mult * w
        level_sum = 2.0 * mult * w
        ratio = 2.0 * math.exp(-2.0 * t * w**s * growth)
        if ratio <= 0.5 and level_sum * ratio / (1.0 - ratio) <= trunc.tail_tol * (
            math.fsum(terms)
        ):
            return math.sqrt(math.fsum(terms))
        ix = ix.child_containing(x)
        iy = iy.child_containing(y)
    raise CapExceeded(
        f"spectral distance chains not certified within depth {trunc.max_depth}"
    )


@dataclass(frozen=True)
class Ball:
    """A diffusion ball: a dyadic interval, or the whole half-line."""

    interval: Optional[DyadicInterval] = None

    @classmethod
    def whole_space(cls) -> "Ball":
        return cls(None)

    @property
    def is_whole_space(self) -> bool:
        return self.interval is None

    def contains(self, x: DyadicPoint) -> bool:
        return True if self.interval is None else self.interval.contains(x)


# Safety cap on the upward walk; psi approaches its limit geometrically, so
# radii within double precision of psi_infinity resolve far below this.
_MAX_ASCENT = 4096


def ball(
    x: DyadicPoint,
    r: float,
    params: DiffusionParams,
    trunc: TruncationPolicy = DEFAULT_TRUNC,
) -> Ball:
    """The ball {y : d_t(x, y) < r}: the largest dyadic interval containing x
    with psi_t(|I|) < r, or the whole space when r >= psi_t(+inf)."""
    if not (r > 0):
        raise ValueError("radius must be positive")
    if r >= psi_infinity(params, trunc):
        return Ball.whole_space()
    # compare in log scale so denormal radii (deep balls at large t) still
    # resolve against psi values that underflow the direct route
    log_r_sq = 2.0 * math.log(r)
    current = interval_containing(x, 0)
    depth = 0
    while log_psi_sq(params, current.length, trunc) >= log_r_sq:
        current = current.child_containing(x)
        depth += 1
        if depth > trunc.max_depth:
            raise CapExceeded("downward ball search exceeded max_depth")
    for _ in range(_MAX_ASCENT):
        parent = current.parent()
        if log_psi_sq(params, parent.length, trunc) < log_r_sq:
            current = parent
        else:
            return Ball(current)
    raise CapExceeded("upward ball search failed to terminate")


def ball_radius_transfer(
    x: DyadicPoint,
    r1: float,
    t1: float,
    t2: float,
    s: float,
    trunc: TruncationPolicy = DEFAULT_TRUNC,
) -> float:
    """A radius r2 with B_{t2}(x, r2) = B_{t1}(x, r1) as sets.

    Any value in (psi_{t2}(|I|), psi_{t2}(2|I|)] works, where I is the
    t1-ball.  The geometric midpoint of that window is returned; when it
    falls below the denormal floor the choice is moved toward the top of the
    window, and if no positive double lies in the window at all a ValueError
    reports the representability limit.
    """
    p1 = DiffusionParams(s, t1)
    p2 = DiffusionParams(s, t2)
    if not (r1 < psi_infinity(p1, trunc)):
        raise ValueError("r1 must be below psi_t1(+inf) for an interval ball")
    interval = ball(x, r1, p1, trunc).interval
    assert interval is not None
    log_lo_sq = log_psi_sq(p2, interval.length, trunc)
    log_hi_sq = log_psi_sq(p2, 2 * interval.length, trunc)
    # radius window in log scale: (log_lo_sq / 2, log_hi_sq / 2]
    log_r = 0.25 * (log_lo_sq + log_hi_sq)
    r2 = math.exp(log_r)
    for _ in range(64):
        if r2 > 0.0:
            return r2
        log_r = 0.5 * (log_r + 0.5 * log_hi_sq)
        r2 = math.exp(log_r)
    raise ValueError(
        "transferred radius window lies below the positive double range "
        f"(log radius <= {0.5 * log_hi_sq})"
    )
