"""Admissible even Schwartz test functions with piecewise-polynomial transforms.

A test function phi is described by the exact transform ``fhat`` (an even,
compactly supported :class:`PiecewisePoly` on [-sigma, sigma]) together with a
pointwise real evaluator for phi itself.  The catalog ships the Fejer family

    phi(x) = (sin(pi sigma x) / (pi sigma x))^2,
    fhat(y) = 1/sigma - |y|/sigma^2   on |y| < sigma,

whose transform is the unit-mass triangle.  Any other even function with a
piecewise-polynomial transform can be registered through the same type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import exactpoly as ep
from .exactpoly import PiecewisePoly, frac
from .errors import DomainError

__all__ = ["TestFunction", "fejer", "phi_power_hat", "phi_value_numeric", "parse_test_function"]


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Even Schwartz test function with exact compactly supported transform."""

    sigma: Fraction
    fhat: PiecewisePoly
    phi_at: Callable[[float], float] | None
    label: str
    _power_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sigma", frac(self.sigma))
        if self.sigma <= 0:
            raise DomainError("sigma must be positive")
        if ep.reflect(self.fhat) != self.fhat:
            raise DomainError("fhat must be even")
        supp = self.fhat.support
        if supp is not None and (supp[0] < -self.sigma or supp[1] > self.sigma):
            raise DomainError("fhat must vanish outside [-sigma, sigma]")
        # Fourier inversion at 0: phi(0) = integral of fhat
        if self.phi_at is not None:
            if abs(self.phi_at(0.0) - float(self.phi_zero())) > 1e-10:
                raise DomainError("phi_at(0) must equal the integral of fhat")

    def phi_zero(self) -> Fraction:
        """Exact phi(0) = total integral of fhat."""
        return ep.integral(self.fhat)

    def fhat_at(self, y) -> Fraction:
        return ep.evaluate(self.fhat, y)

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"TestFunction({self.label})"


def fejer(sigma) -> TestFunction:
    """The Fejer-kernel test function with transform supported on [-sigma, sigma]."""
    s = frac(sigma)
    if s <= 0:
        raise DomainError("fejer requires sigma > 0")
    inv = 1 / s
    inv2 = 1 / (s * s)
    fhat = ep.from_global_pieces(
        [
            (-s, 0, [inv, inv2]),     # 1/sigma + y/sigma^2
            (0, s, [inv, -inv2]),     # 1/sigma - y/sigma^2
        ]
    )
    sf = float(s)

    def phi(x: float) -> float:
        t = math.pi * sf * x
        if abs(t) < 1e-8:
            return 1.0 - t * t / 3.0  # series around the removable singularity
        v = math.sin(t) / t
        return v * v

    return TestFunction(sigma=s, fhat=fhat, phi_at=phi, label=f"fejer:{s}")


def phi_power_hat(tf: TestFunction, m: int) -> PiecewisePoly:
    """Transform of phi^m: the m-fold self-convolution of fhat (cached)."""
    if m < 1:
        raise DomainError("power must be >= 1")
    cache = tf._power_cache
    if 1 not in cache:
        cache[1] = tf.fhat
    k = max(j for j in cache if isinstance(j, int) and j <= m)
    cur = cache[k]
    while k < m:
        cur = ep.convolve(cur, tf.fhat)
        k += 1
        cache[k] = cur
    return cache[m]


def phi_value_numeric(tf: TestFunction, x: float) -> float:
    """phi(x) via the closed form when available, else numeric inversion of fhat."""
    if tf.phi_at is not None:
        return tf.phi_at(x)
    from scipy.integrate import quad

    s = float(tf.sigma)
    breaks = [float(b) for b in tf.fhat.breakpoints if 0 < b < tf.sigma]

    def integrand(y: float) -> float:
        return ep.evaluate_float(tf.fhat, y) * math.cos(2 * math.pi * x * y)

    # fhat is even, so phi(x) = 2 * int_0^sigma fhat(y) cos(2 pi x y) dy
    val, _ = quad(integrand, 0.0, s, points=breaks, limit=200, epsabs=1e-12)
    return 2.0 * val


def parse_test_function(spec: str) -> TestFunction:
    """Parse a CLI name like ``fejer:1/2`` into a TestFunction."""
    name, _, arg = spec.partition(":")
    if name != "fejer" or not arg:
        raise DomainError(f"unknown test function {spec!r}; expected fejer:<sigma>")
    return fejer(frac(arg))
