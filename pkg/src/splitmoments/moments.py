"""Closed-form moment quantities for the split orthogonal families.

All quantities are exact rationals computed through the piecewise-polynomial
algebra.  Notation, with ``fhat`` the transform of the test function and
``sigma`` its support radius:

- ``sigma_phi_sq``: the limiting variance  2 * int |y| fhat(y)^2 dy.
- ``sine_transform(k, A)``: T_k(A) = int phi^k(x) sin(2 pi x A)/(2 pi x) dx,
  evaluated losslessly as int_0^A psi_k with psi_k the transform of phi^k
  (never as an oscillatory real integral).
- ``R_moment(m, i)``: the correction kernel
  2^{m-1} (-1)^{m+1} sum_{l=0}^{i-1} (-1)^l C(m,l) [ -phi(0)^m / 2 + V(m,l) ]
  where V(m,l) integrates the l-fold folded transform against T_{m-l}(1+s).
- ``S_correction(n, a)``: sum_l n!/((n-2l)! l!) R(n-2l, a-2l) (sigma^2/2)^l.
- ``predicted_centered_moment``: 1_{n even} (n-1)!! sigma_phi^n +- S(n, a).
- ``X_xi(n, l)`` and ``Q_n_via_classes``: the independent route through the
  indicator integrals over [0, inf)^n, which must agree exactly with R.
- ``I_integral(n, alpha, delta)``: the signed-fold variant obeying the two
  recursions that collapse it to I(omega, 0).

The mean of the statistic is ``mean_value`` = fhat(0) + (1/2) int_{-1}^{1} fhat.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Literal

from . import exactpoly as ep
from .exactpoly import PiecewisePoly, frac
from .errors import DomainError, InvariantViolation
from .testfn import TestFunction, phi_power_hat

__all__ = [
    "MomentSpec",
    "Sign",
    "sigma_phi_sq",
    "sine_transform",
    "R_moment",
    "S_correction",
    "predicted_centered_moment",
    "mean_value",
    "I_integral",
    "X_xi",
    "Q_n_via_classes",
    "bar_X_xi",
    "minimal_a",
    "valid_a_range",
    "double_factorial",
]

Sign = Literal["plus", "minus"]


def double_factorial(n: int) -> int:
    """n!! with (-1)!! = 0!! = 1."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def minimal_a(tf: TestFunction, n: int) -> int:
    """Smallest a >= 0 with sigma <= 1/(n-a); 0 in the mock-Gaussian regime."""
    bound = n - 1 / tf.sigma  # a >= n - 1/sigma
    return max(0, -(-bound.numerator // bound.denominator))


def valid_a_range(tf: TestFunction, n: int) -> range:
    """All a with sigma <= 1/(n-a) and a <= ceil(n/2) (boundaries allowed).

    Empty when sigma exceeds the overall 2/n hypothesis.
    """
    if tf.sigma > Fraction(2, n):
        return range(0)
    lo = minimal_a(tf, n)
    hi = (n + 1) // 2
    return range(lo, hi + 1) if lo <= hi else range(0)


def _check_support(tf: TestFunction, n: int, a: int, allow_boundary: bool = True) -> None:
    """Validate the support window; closed boundaries (sigma = 2/n or
    sigma = 1/(n-a)) are accepted by default, every downstream functional
    being continuous in sigma, and rejected when ``allow_boundary=False``."""
    if a < 0 or a > (n + 1) // 2:
        raise DomainError(f"a={a} outside 0..ceil(n/2)={(n + 1) // 2}")
    two_n = Fraction(2, n)
    if tf.sigma > two_n or (not allow_boundary and tf.sigma == two_n):
        raise DomainError(
            f"unsupported support: sigma={tf.sigma} vs 2/n={two_n}"
            + ("" if allow_boundary else " (boundary excluded)")
        )
    if a < n:
        window = Fraction(1, n - a)
        if tf.sigma > window or (not allow_boundary and tf.sigma == window):
            raise DomainError(
                f"sigma={tf.sigma} vs 1/(n-a)={window}; "
                f"need a >= {minimal_a(tf, n)}"
                + ("" if allow_boundary else " (boundary excluded)")
            )


@dataclass(frozen=True)
class MomentSpec:
    """Parameters of one predicted centered moment.

    ``a`` may be 0 only in the mock-Gaussian regime (sigma < 1/n), where the
    correction sum is empty.  ``allow_boundary=False`` rejects sigma sitting
    exactly on the closed support boundaries instead of taking the
    continuity-in-sigma reading.
    """

    tf: TestFunction
    n: int
    a: int
    sign: Sign
    allow_boundary: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("moment order n must be >= 1")
        if self.sign not in ("plus", "minus"):
            raise DomainError("sign must be 'plus' or 'minus'")
        _check_support(self.tf, self.n, self.a, allow_boundary=self.allow_boundary)

    @classmethod
    def with_minimal_a(cls, tf: TestFunction, n: int, sign: Sign) -> "MomentSpec":
        return cls(tf=tf, n=n, a=minimal_a(tf, n), sign=sign)


# ---------------------------------------------------------------------------
# basic functionals
# ---------------------------------------------------------------------------

def sigma_phi_sq(tf: TestFunction) -> Fraction:
    """2 * int |y| fhat(y)^2 dy, exactly (= 4 int_0^sigma y fhat^2 by evenness)."""
    sq = ep.multiply(tf.fhat, tf.fhat)
    if sq.is_zero():
        return Fraction(0)
    pos = ep.multiply_by_monomial(ep.restrict(sq, 0, tf.sigma + 1), 1)
    return 4 * ep.integral(pos)


def mean_value(tf: TestFunction) -> Fraction:
    """fhat(0) + (1/2) int_{-1}^{1} fhat(y) dy (requires sigma <= 1)."""
    if tf.sigma > 1:
        raise DomainError("mean_value requires sigma <= 1")
    return tf.fhat_at(0) + Fraction(1, 2) * ep.definite_integral(tf.fhat, -1, 1)


def sine_transform(tf: TestFunction, k: int, A) -> Fraction:
    """T_k(A) = int_0^A psi_k(u) du with psi_k the transform of phi^k."""
    A = frac(A)
    if A < 0:
        raise DomainError("sine_transform requires A >= 0")
    if k < 1:
        raise DomainError("sine_transform requires k >= 1")
    if A == 0:
        return Fraction(0)
    return ep.definite_integral(phi_power_hat(tf, k), 0, A)


# ---------------------------------------------------------------------------
# cached folded densities
#
# gp = fhat restricted to [0, sigma] is the weight of one nonnegative
# coordinate.  Sums of folded coordinates use the doubled weight 2*gp, which
# is pulled out as a scalar so one convolution cache serves every routine.
# ---------------------------------------------------------------------------

def _half_fhat(tf: TestFunction) -> PiecewisePoly:
    cache = tf._power_cache
    if "gp" not in cache:
        cache["gp"] = ep.restrict(tf.fhat, 0, tf.sigma + 1)
    return cache["gp"]


def _gp_power(tf: TestFunction, j: int) -> PiecewisePoly:
    """j-fold self-convolution of the half transform (j >= 1), cached."""
    cache = tf._power_cache
    key = ("gpow", j)
    if key not in cache:
        if j == 1:
            cache[key] = _half_fhat(tf)
        else:
            cache[key] = ep.convolve(_gp_power(tf, j - 1), _half_fhat(tf))
    return cache[key]


def _signed_sum_density(tf: TestFunction, pos: int, neg: int) -> PiecewisePoly:
    """Density of sum of `pos` coordinates minus `neg`, each weighted by gp."""
    if pos + neg < 1:
        raise ValueError("need at least one coordinate")
    cache = tf._power_cache
    key = ("hconv", pos, neg)
    if key not in cache:
        if pos == 0:
            cache[key] = ep.reflect(_gp_power(tf, neg))
        elif neg == 0:
            cache[key] = _gp_power(tf, pos)
        else:
            cache[key] = ep.convolve(
                _gp_power(tf, pos), ep.reflect(_gp_power(tf, neg))
            )
    return cache[key]


def _integral_against_T(tf: TestFunction, k: int, rho: PiecewisePoly) -> Fraction:
    """int rho(s) * T_k(1 + s) ds, exactly.

    T_k(1+s) = F_k(1+s) - F_k(0) with F_k the cumulative of psi_k; a window of
    F_k is materialized over 1 + supp(rho) and translated back by 1.
    """
    supp = rho.support
    if supp is None:
        return Fraction(0)
    lo, hi = supp
    psi = phi_power_hat(tf, k)
    window = ep.cumulative(psi, 1 + lo, 1 + hi + 1)
    t_shift = ep.translate(window, -1)  # value at s is F_k(1+s)
    left = psi.breakpoints[0]
    c0 = ep.definite_integral(psi, min(left, 0), 0)  # F_k(0)
    return ep.integral(ep.multiply(rho, t_shift)) - c0 * ep.integral(rho)


def _V(tf: TestFunction, m: int, ell: int) -> Fraction:
    """V(m, l) = int_{R^l} prod fhat(x_j) T_{m-l}(1 + sum |x_j|) dx.

    l = 0 degenerates to T_m(1) (the folded density is a unit point mass).
    """
    if ell == 0:
        return sine_transform(tf, m, 1)
    rho = ep.scale(_signed_sum_density(tf, ell, 0), Fraction(2) ** ell)
    return _integral_against_T(tf, m - ell, rho)


# ---------------------------------------------------------------------------
# the R / S closed forms
# ---------------------------------------------------------------------------

def R_moment(tf: TestFunction, m: int, i: int) -> Fraction:
    """Exact R(m, i) correction kernel."""
    if i < 1 or i > m:
        raise DomainError(f"R_moment requires 1 <= i <= m, got m={m}, i={i}")
    phi0_m = tf.phi_zero() ** m
    total = Fraction(0)
    for ell in range(i):
        total += (-1) ** ell * comb(m, ell) * (-phi0_m / 2 + _V(tf, m, ell))
    return Fraction(2) ** (m - 1) * (-1) ** (m + 1) * total


def S_correction(tf: TestFunction, n: int, a: int) -> Fraction:
    """Exact S(n, a); the empty sum (a <= 0) is zero."""
    if n < 1:
        raise DomainError("S_correction requires n >= 1")
    _check_support(tf, n, a)
    if a <= 0:
        return Fraction(0)
    var = sigma_phi_sq(tf)
    total = Fraction(0)
    for ell in range((a - 1) // 2 + 1):
        coeff = Fraction(factorial(n), factorial(n - 2 * ell) * factorial(ell))
        total += coeff * R_moment(tf, n - 2 * ell, a - 2 * ell) * (var / 2) ** ell
    return total


def predicted_centered_moment(spec: MomentSpec) -> Fraction:
    """1_{n even} (n-1)!! sigma_phi^n  +  sign * S(n, a)."""
    n = spec.n
    gaussian = Fraction(0)
    if n % 2 == 0:
        gaussian = double_factorial(n - 1) * sigma_phi_sq(spec.tf) ** (n // 2)
    s = S_correction(spec.tf, n, spec.a)
    return gaussian + s if spec.sign == "plus" else gaussian - s


# ---------------------------------------------------------------------------
# the indicator-integral route (X(xi_l) and Q_n)
# ---------------------------------------------------------------------------

def X_xi(tf: TestFunction, n: int, ell: int) -> Fraction:
    """int_{[0,inf)^n} prod fhat(y_i) 1{y_1+..+y_{n-l} - y_{n-l+1}-..-y_n > 1} dy."""
    if not 0 <= ell <= n:
        raise DomainError("X_xi requires 0 <= ell <= n")
    if ell == n:
        return Fraction(0)  # negatives only: the sum cannot exceed 1
    h = _signed_sum_density(tf, n - ell, ell)
    if h.is_zero() or h.support[1] <= 1:
        return Fraction(0)
    return ep.definite_integral(h, 1, h.support[1])


def Q_n_via_classes(tf: TestFunction, n: int, a: int) -> Fraction:
    """2^{n-1} (-1)^n sum_{l=0}^{a-1} (-1)^l C(n,l) X(xi_l)."""
    _check_support(tf, n, a)
    total = Fraction(0)
    for ell in range(a):
        total += (-1) ** ell * comb(n, ell) * X_xi(tf, n, ell)
    return Fraction(2) ** (n - 1) * (-1) ** n * total


def bar_X_xi(tf: TestFunction, n: int, ell: int) -> Fraction:
    """The two-sided indicator integral, computed along both exact routes.

    Route (a) expands it over sign patterns as
    2^{l+1} sum_i C(n-l, i) X(xi_{i+l}); route (b) is the closed form
    phi(0)^n - 2 V(n, l).  Both are computed and compared; disagreement raises
    InvariantViolation (it would signal an implementation bug).
    """
    a_max = (n + 1) // 2
    if not 0 <= ell <= a_max - 1:
        raise DomainError(f"bar_X_xi requires 0 <= ell <= ceil(n/2)-1 = {a_max - 1}")
    if n - a_max > 0 and tf.sigma > Fraction(1, n - a_max):
        raise DomainError("sigma too large for the sign-pattern expansion route")
    via_sum = Fraction(2) ** (ell + 1) * sum(
        (comb(n - ell, i) * X_xi(tf, n, i + ell) for i in range(a_max - ell)),
        start=Fraction(0),
    )
    via_closed = tf.phi_zero() ** n - 2 * _V(tf, n, ell)
    if via_sum != via_closed:
        raise InvariantViolation(
            f"bar_X_xi mismatch at n={n}, ell={ell}: {via_sum} != {via_closed}"
        )
    return via_sum


# ---------------------------------------------------------------------------
# signed-fold integrals I(alpha, delta)
# ---------------------------------------------------------------------------

def I_integral(tf: TestFunction, n: int, alpha: int, delta: int) -> Fraction:
    """I(alpha, delta): T_{n-alpha-delta} against the signed folded density."""
    if alpha < 0 or delta < 0:
        raise DomainError("alpha, delta must be >= 0")
    if alpha + delta >= n:
        raise DomainError("I_integral requires alpha + delta < n")
    if alpha == 0 and delta == 0:
        return sine_transform(tf, n, 1)
    rho = ep.scale(
        _signed_sum_density(tf, alpha, delta), Fraction(2) ** (alpha + delta)
    )
    # T_k(1+u) with u possibly negative; the cumulative window covers that and
    # subtracting F_k(0) keeps the signed orientation of int_0^A correct.
    return _integral_against_T(tf, n - alpha - delta, rho)
