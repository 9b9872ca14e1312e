"""Order-of-vanishing bounds at the central point from exact centered moments.

A form whose completed L-function vanishes to order >= r at the center
pushes the centered statistic above the threshold

    r * phi(0) - fhat(0) - phi(0)/2        (= r - 1/sigma - 1/2 for Fejer),

so Markov's inequality with the exact n-th centered moment (n even) bounds
the proportion of such forms by moment / threshold^n.  The flagship numbers:
r=5 with (n=4, sigma=1/2) gives exactly 496/65625, and r=19 with
(n=20, sigma=1/10) is about 2.86e-15.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import moments as mo
from .errors import DomainError
from .testfn import TestFunction, fejer

__all__ = [
    "VanishingQuery",
    "vanishing_bound",
    "vanishing_threshold",
    "bound_sweep",
    "PRIOR_BOUNDS",
    "assumptions_for",
]

# earlier published bounds for the r = 5 negative-sign proportion, for context
PRIOR_BOUNDS = {
    "prior-one-level": Fraction(1, 32),
    "prior-second-moment": Fraction(1, 49),
}


@dataclass(frozen=True)
class VanishingQuery:
    r: int
    n: int
    sigma: Fraction
    sign: mo.Sign

    def __post_init__(self):
        if self.r < 1:
            raise DomainError("order threshold r must be >= 1")
        if self.n % 2 != 0 or self.n < 2:
            raise DomainError("Markov argument needs an even moment order n >= 2")
        object.__setattr__(self, "sigma", Fraction(self.sigma))
        if self.sigma <= 0:
            raise DomainError("sigma must be positive")
        if self.sigma > Fraction(2, self.n):
            raise DomainError(f"sigma={self.sigma} exceeds 2/n={Fraction(2, self.n)}")


def vanishing_threshold(tf: TestFunction, r: int) -> Fraction:
    """r phi(0) - fhat(0) - phi(0)/2, exactly."""
    phi0 = tf.phi_zero()
    return r * phi0 - tf.fhat_at(0) - phi0 / 2


def vanishing_bound(q: VanishingQuery) -> Fraction:
    """Exact Markov bound: moment / threshold^n for the Fejer family."""
    tf = fejer(q.sigma)
    threshold = vanishing_threshold(tf, q.r)
    if threshold <= 0:
        raise DomainError(
            f"threshold r - 1/sigma - 1/2 = {threshold} is not positive; "
            "the Markov argument does not apply"
        )
    spec = mo.MomentSpec.with_minimal_a(tf, q.n, q.sign)
    moment = mo.predicted_centered_moment(spec)
    return moment / threshold**q.n


def assumptions_for(q: VanishingQuery) -> list[str]:
    """Caveats attached to a query's report."""
    notes = []
    if q.sign == "plus":
        notes.append(
            "positive-sign family: same formula, but no published value pins it"
        )
    if q.n == 4 and q.r < 5:
        notes.append(
            "r < 5 with n = 4 lies outside the published regime; the literal "
            "formula is used"
        )
    if q.sigma == Fraction(2, q.n):
        notes.append(
            "sigma sits on the closed 2/n boundary (continuity-in-sigma limit)"
        )
    return notes


@dataclass(frozen=True)
class SweepRow:
    r: int
    n: int
    sigma: Fraction
    bound: Fraction | None
    skipped: str | None = None


def bound_sweep(
    r: int,
    n_grid: Iterable[int],
    sigma_grid: Iterable[Fraction],
    sign: mo.Sign = "minus",
) -> tuple[list[SweepRow], SweepRow | None]:
    """Exact bounds over a grid; returns (rows, minimizing row)."""
    rows: list[SweepRow] = []
    best: SweepRow | None = None
    for n in n_grid:
        for sigma in sigma_grid:
            sigma = Fraction(sigma)
            try:
                q = VanishingQuery(r=r, n=n, sigma=sigma, sign=sign)
                b = vanishing_bound(q)
            except DomainError as e:
                rows.append(SweepRow(r=r, n=n, sigma=sigma, bound=None, skipped=str(e)))
                continue
            row = SweepRow(r=r, n=n, sigma=sigma, bound=b)
            rows.append(row)
            if best is None or b < best.bound:
                best = row
    return rows, best
