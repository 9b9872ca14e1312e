"""Exact algebra of compactly supported piecewise polynomials over rationals.

A function is represented by breakpoints ``b_0 < b_1 < ... < b_k`` and ``k``
coefficient tuples.  Piece ``i`` lives on the half-open interval
``[b_i, b_{i+1})`` and its coefficients are in the *local* variable
``t = x - b_i`` (ascending degree), which keeps coefficient growth modest for
deep convolutions.  The function is identically zero outside ``[b_0, b_k]``;
evaluation at the final right endpoint returns the limit from the left.

All coefficients are :class:`fractions.Fraction`, so every operation here is
exact.  Construction always canonicalizes: zero tails of coefficient tuples
are trimmed, adjacent pieces describing the same polynomial are merged, and
leading/trailing zero pieces are dropped.  Two constructions of the same
function therefore compare equal structurally.

Convolution uses the truncated-power (one-sided) decomposition

    p(x) = sum_r c_r * (x - xi_r)_+^{k_r}

under which convolution is term-by-term:

    (x-a)_+^m * (x-b)_+^n = m! n! / (m+n+1)! * (x-a-b)_+^{m+n+1}.

The decomposition of a compactly supported function telescopes to zero past
its last breakpoint, so the result converts back to a compactly supported
piecewise polynomial.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence, Union

RationalLike = Union[int, str, Fraction]

__all__ = [
    "PiecewisePoly",
    "frac",
    "box",
    "from_global_pieces",
    "evaluate",
    "evaluate_float",
    "add",
    "scale",
    "multiply",
    "convolve",
    "antiderivative",
    "cumulative",
    "definite_integral",
    "integral",
    "reflect",
    "translate",
    "restrict",
    "multiply_by_monomial",
    "to_json_dict",
    "from_json_dict",
]

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x: RationalLike) -> Fraction:
    """Coerce an int, "p/q" string, or Fraction to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r} (floats are rejected)")


# ---------------------------------------------------------------------------
# dense univariate polynomial helpers (tuples of Fractions, ascending degree)
# ---------------------------------------------------------------------------

def _ptrim(c: Sequence[Fraction]) -> tuple[Fraction, ...]:
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _padd(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, cb in enumerate(b):
        out[i] += cb
    return _ptrim(out)


def _pscale(a: Sequence[Fraction], s: Fraction) -> tuple[Fraction, ...]:
    if s == 0:
        return ()
    return tuple(c * s for c in a)


def _pmul(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return _ptrim(out)


def _peval(a: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = ZERO
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _pshift(a: Sequence[Fraction], s: Fraction) -> tuple[Fraction, ...]:
    """Coefficients of p(t + s) given coefficients of p(t) (Taylor shift)."""
    if s == 0 or not a:
        return _ptrim(a)
    n = len(a)
    out = [ZERO] * n
    spow: list[Fraction] = [ONE]
    for _ in range(1, n):
        spow.append(spow[-1] * s)
    binom_row = [1]
    for k, c in enumerate(a):
        if k > 0:
            binom_row = (
                [1]
                + [binom_row[j - 1] + binom_row[j] for j in range(1, k)]
                + [1]
            )
        if c == 0:
            continue
        for j in range(k + 1):
            out[j] += c * binom_row[j] * spow[k - j]
    return _ptrim(out)


def _pintegrate(a: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Antiderivative with zero constant term."""
    return _ptrim([ZERO] + [c / (i + 1) for i, c in enumerate(a)])


# ---------------------------------------------------------------------------
# the piecewise type
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiecewisePoly:
    """Compactly supported piecewise polynomial; see module docstring.

    ``breakpoints`` has length k+1 (or 0 for the zero function); ``pieces``
    has length k, each a tuple of Fraction coefficients in the local variable
    ``x - breakpoints[i]``.
    """

    breakpoints: tuple[Fraction, ...]
    pieces: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        breaks = tuple(frac(b) for b in self.breakpoints)
        pieces = tuple(_ptrim(tuple(frac(c) for c in p)) for p in self.pieces)
        if len(breaks) != (len(pieces) + 1 if pieces else 0):
            if not (len(breaks) == 0 and len(pieces) == 0):
                raise ValueError("breakpoints/pieces length mismatch")
        for lo, hi in zip(breaks, breaks[1:]):
            if not lo < hi:
                raise ValueError("breakpoints must be strictly increasing")
        breaks, pieces = _canonical(breaks, pieces)
        object.__setattr__(self, "breakpoints", breaks)
        object.__setattr__(self, "pieces", pieces)

    # -- convenience -------------------------------------------------------

    @staticmethod
    def zero() -> "PiecewisePoly":
        return PiecewisePoly((), ())

    def is_zero(self) -> bool:
        return not self.pieces

    @property
    def support(self) -> tuple[Fraction, Fraction] | None:
        if not self.pieces:
            return None
        return (self.breakpoints[0], self.breakpoints[-1])

    def degree(self) -> int:
        """Max piece degree; -1 for the zero function."""
        return max((len(p) - 1 for p in self.pieces), default=-1)

    def __call__(self, x: RationalLike) -> Fraction:
        return evaluate(self, x)

    def __add__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        return add(self, other)

    def __mul__(self, other):
        if isinstance(other, PiecewisePoly):
            return multiply(self, other)
        return scale(self, frac(other))

    __rmul__ = __mul__

    def __neg__(self) -> "PiecewisePoly":
        return scale(self, Fraction(-1))

    def __sub__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        return add(self, scale(other, Fraction(-1)))


def _canonical(
    breaks: tuple[Fraction, ...], pieces: tuple[tuple[Fraction, ...], ...]
) -> tuple[tuple[Fraction, ...], tuple[tuple[Fraction, ...], ...]]:
    """Merge equal adjacent pieces, drop zero edges, normalize the zero fn."""
    if not pieces:
        return (), ()
    bl = list(breaks)
    pl = [(_ptrim(p)) for p in pieces]
    # merge adjacent pieces that continue the same polynomial
    i = 0
    while i + 1 < len(pl):
        shifted = _pshift(pl[i], bl[i + 1] - bl[i])
        if shifted == pl[i + 1]:
            del pl[i + 1]
            del bl[i + 1]
        else:
            i += 1
    # drop zero pieces at the edges
    while pl and not pl[0]:
        del pl[0]
        del bl[0]
    while pl and not pl[-1]:
        del pl[-1]
        del bl[-1]
    if not pl:
        return (), ()
    return tuple(bl), tuple(pl)


def _mk(breaks: Iterable[Fraction], pieces: Iterable[Sequence[Fraction]]) -> PiecewisePoly:
    return PiecewisePoly(tuple(breaks), tuple(tuple(p) for p in pieces))


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def box(lo: RationalLike, hi: RationalLike, height: RationalLike = 1) -> PiecewisePoly:
    """Indicator of [lo, hi) scaled by ``height``."""
    lo, hi, height = frac(lo), frac(hi), frac(height)
    if not lo < hi:
        raise ValueError("box requires lo < hi")
    return _mk((lo, hi), ((height,),))


def from_global_pieces(
    spans: Sequence[tuple[RationalLike, RationalLike, Sequence[RationalLike]]]
) -> PiecewisePoly:
    """Build from (lo, hi, global-coefficients) spans.

    Spans must be non-overlapping; gaps are filled with zero pieces.
    Coefficients are in the global variable x (ascending degree).
    """
    cleaned = sorted(
        ((frac(lo), frac(hi), tuple(frac(c) for c in cs)) for lo, hi, cs in spans),
        key=lambda s: s[0],
    )
    breaks: list[Fraction] = []
    pieces: list[tuple[Fraction, ...]] = []
    for lo, hi, cs in cleaned:
        if breaks and lo < breaks[-1]:
            raise ValueError("overlapping spans")
        if breaks and lo > breaks[-1]:
            pieces.append(())
            breaks.append(lo)
        elif not breaks:
            breaks.append(lo)
        pieces.append(_pshift(cs, lo))  # re-express at local origin lo
        breaks.append(hi)
    return _mk(breaks, pieces)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def evaluate(p: PiecewisePoly, x: RationalLike) -> Fraction:
    """Value at x; left-closed/right-open pieces, left limit at the far end."""
    x = frac(x)
    if not p.pieces:
        return ZERO
    b = p.breakpoints
    if x < b[0] or x > b[-1]:
        return ZERO
    if x == b[-1]:
        return _peval(p.pieces[-1], x - b[-2])
    i = bisect_right(b, x) - 1
    return _peval(p.pieces[i], x - b[i])


def evaluate_float(p: PiecewisePoly, x: float) -> float:
    """Double-precision Horner evaluation (for oracles and plotting)."""
    if not p.pieces:
        return 0.0
    b = p.breakpoints
    if x < b[0] or x > b[-1]:
        return 0.0
    i = len(b) - 2 if x == b[-1] else bisect_right(b, x) - 1
    t = x - float(b[i])
    acc = 0.0
    for c in reversed(p.pieces[i]):
        acc = acc * t + float(c)
    return acc


# ---------------------------------------------------------------------------
# linear / pointwise algebra
# ---------------------------------------------------------------------------

def _aligned(p: PiecewisePoly, q: PiecewisePoly):
    """Common refinement of breakpoints; yields (lo, hi, pc, qc) local at lo."""
    cuts = sorted(set(p.breakpoints) | set(q.breakpoints))

    def local_piece(f: PiecewisePoly, lo: Fraction) -> tuple[Fraction, ...]:
        if not f.pieces or lo < f.breakpoints[0] or lo >= f.breakpoints[-1]:
            return ()
        i = bisect_right(f.breakpoints, lo) - 1
        return _pshift(f.pieces[i], lo - f.breakpoints[i])

    for lo, hi in zip(cuts, cuts[1:]):
        yield lo, hi, local_piece(p, lo), local_piece(q, lo)


def add(p: PiecewisePoly, q: PiecewisePoly) -> PiecewisePoly:
    if p.is_zero():
        return q
    if q.is_zero():
        return p
    breaks: list[Fraction] = []
    pieces: list[tuple[Fraction, ...]] = []
    for lo, hi, pc, qc in _aligned(p, q):
        if not breaks:
            breaks.append(lo)
        pieces.append(_padd(pc, qc))
        breaks.append(hi)
    return _mk(breaks, pieces)


def scale(p: PiecewisePoly, c: RationalLike) -> PiecewisePoly:
    c = frac(c)
    if c == 0 or p.is_zero():
        return PiecewisePoly.zero()
    return _mk(p.breakpoints, (_pscale(piece, c) for piece in p.pieces))


def multiply(p: PiecewisePoly, q: PiecewisePoly) -> PiecewisePoly:
    """Exact pointwise product; support is contained in the intersection."""
    if p.is_zero() or q.is_zero():
        return PiecewisePoly.zero()
    breaks: list[Fraction] = []
    pieces: list[tuple[Fraction, ...]] = []
    for lo, hi, pc, qc in _aligned(p, q):
        if not breaks:
            breaks.append(lo)
        pieces.append(_pmul(pc, qc))
        breaks.append(hi)
    return _mk(breaks, pieces)


def reflect(p: PiecewisePoly) -> PiecewisePoly:
    """x -> p(-x)."""
    if p.is_zero():
        return p
    breaks = tuple(-b for b in reversed(p.breakpoints))
    pieces = []
    for i, piece in enumerate(reversed(p.pieces)):
        # original piece j = k-1-i on [b_j, b_{j+1}); new local var u = x + b_{j+1};
        # old local value t = -x - b_j = L - u with L the piece length.
        j = len(p.pieces) - 1 - i
        length = p.breakpoints[j + 1] - p.breakpoints[j]
        # compose piece(L - u): expand
        comp = ()
        for k, c in enumerate(piece):
            comp = _padd(comp, _pscale(_binom_power(length, -1, k), c))
        pieces.append(comp)
    return _mk(breaks, pieces)


def _binom_power(a: Fraction, b: int, k: int) -> tuple[Fraction, ...]:
    """Coefficients of (a + b*u)^k in u."""
    out = [ZERO] * (k + 1)
    coeff = 1
    for j in range(k + 1):
        out[j] = Fraction(coeff) * (a ** (k - j)) * (b ** j)
        coeff = coeff * (k - j) // (j + 1)
    return _ptrim(out)


def translate(p: PiecewisePoly, c: RationalLike) -> PiecewisePoly:
    """x -> p(x - c); local coefficients are unchanged."""
    c = frac(c)
    if p.is_zero() or c == 0:
        return p
    return _mk((b + c for b in p.breakpoints), p.pieces)


def restrict(p: PiecewisePoly, lo: RationalLike, hi: RationalLike) -> PiecewisePoly:
    """Pointwise product with the indicator of [lo, hi)."""
    lo, hi = frac(lo), frac(hi)
    if not lo < hi:
        raise ValueError("restrict requires lo < hi")
    if p.is_zero():
        return p
    lo = max(lo, p.breakpoints[0])
    hi = min(hi, p.breakpoints[-1])
    if not lo < hi:
        return PiecewisePoly.zero()
    cuts = [lo] + [b for b in p.breakpoints if lo < b < hi] + [hi]
    pieces = []
    for a in cuts[:-1]:
        i = bisect_right(p.breakpoints, a) - 1
        pieces.append(_pshift(p.pieces[i], a - p.breakpoints[i]))
    return _mk(cuts, pieces)


def multiply_by_monomial(p: PiecewisePoly, k: int) -> PiecewisePoly:
    """x -> x^k * p(x) for k >= 0."""
    if k < 0:
        raise ValueError("monomial power must be >= 0")
    if k == 0 or p.is_zero():
        return p
    pieces = []
    for i, piece in enumerate(p.pieces):
        a = p.breakpoints[i]
        mono = _binom_power(a, 1, k)  # (a + t)^k in local t
        pieces.append(_pmul(piece, mono))
    return _mk(p.breakpoints, pieces)


# ---------------------------------------------------------------------------
# calculus
# ---------------------------------------------------------------------------

def antiderivative(p: PiecewisePoly, extend_hi: RationalLike | None = None) -> PiecewisePoly:
    """Antiderivative vanishing at the left support edge.

    The result is represented on the support of ``p`` (its value at and past
    the right edge is the total integral).  Passing ``extend_hi`` appends an
    explicit constant piece up to that point, materializing the
    constant-past-right-edge behavior on [b_0, extend_hi).
    """
    if p.is_zero():
        if extend_hi is None:
            return p
        raise ValueError("cannot extend the zero function (no support)")
    breaks = list(p.breakpoints)
    pieces = []
    acc = ZERO
    for i, piece in enumerate(p.pieces):
        integ = _pintegrate(piece)
        pieces.append(_padd(integ, (acc,)))
        acc += _peval(integ, breaks[i + 1] - breaks[i])
    if extend_hi is not None:
        hi = frac(extend_hi)
        if hi <= breaks[-1]:
            raise ValueError("extend_hi must lie past the right support edge")
        pieces.append((acc,))
        breaks.append(hi)
    return _mk(breaks, pieces)


def cumulative(p: PiecewisePoly, lo: RationalLike, hi: RationalLike) -> PiecewisePoly:
    """The function x -> integral of p over (-inf, x], represented on [lo, hi).

    Unlike :func:`antiderivative` this is usable as a window onto the full
    cumulative function, including the constant region past the support.
    """
    lo, hi = frac(lo), frac(hi)
    if not lo < hi:
        raise ValueError("cumulative requires lo < hi")
    if p.is_zero():
        return PiecewisePoly.zero()
    full = antiderivative(p)
    cuts = [lo] + [b for b in full.breakpoints if lo < b < hi] + [hi]
    pieces = []
    b = full.breakpoints
    for a in cuts[:-1]:
        if a < b[0]:
            pieces.append(())
        elif a >= b[-1]:
            pieces.append((integral(p),))
        else:
            i = bisect_right(b, a) - 1
            pieces.append(_pshift(full.pieces[i], a - b[i]))
    return _mk(cuts, pieces)


def definite_integral(p: PiecewisePoly, lo: RationalLike, hi: RationalLike) -> Fraction:
    """Exact integral of p over [lo, hi]; requires lo <= hi."""
    lo, hi = frac(lo), frac(hi)
    if lo > hi:
        raise ValueError("definite_integral requires lo <= hi")
    if p.is_zero():
        return ZERO
    lo = max(lo, p.breakpoints[0])
    hi = min(hi, p.breakpoints[-1])
    if lo >= hi:
        return ZERO
    total = ZERO
    b = p.breakpoints
    i = bisect_right(b, lo) - 1
    while i < len(p.pieces) and b[i] < hi:
        a0 = max(lo, b[i])
        a1 = min(hi, b[i + 1])
        if a0 < a1:
            integ = _pintegrate(p.pieces[i])
            total += _peval(integ, a1 - b[i]) - _peval(integ, a0 - b[i])
        i += 1
    return total


def integral(p: PiecewisePoly) -> Fraction:
    """Total integral over the real line."""
    if p.is_zero():
        return ZERO
    return definite_integral(p, p.breakpoints[0], p.breakpoints[-1])


# ---------------------------------------------------------------------------
# convolution (truncated-power decomposition)
# ---------------------------------------------------------------------------

def _to_truncated(p: PiecewisePoly) -> list[tuple[Fraction, tuple[Fraction, ...]]]:
    """Decompose as sum of c * (x - xi)_+^k terms, grouped per knot xi."""
    terms: list[tuple[Fraction, tuple[Fraction, ...]]] = []
    prev: tuple[Fraction, ...] = ()
    prev_origin = ZERO
    for i, piece in enumerate(p.pieces):
        xi = p.breakpoints[i]
        prev_here = _pshift(prev, xi - prev_origin) if prev else ()
        delta = _padd(piece, _pscale(prev_here, Fraction(-1))) if prev_here else piece
        if delta:
            terms.append((xi, delta))
        prev, prev_origin = piece, xi
    xi = p.breakpoints[-1]
    prev_here = _pshift(prev, xi - prev_origin) if prev else ()
    if prev_here:
        terms.append((xi, _pscale(prev_here, Fraction(-1))))
    return terms


def _from_truncated(terms: list[tuple[Fraction, tuple[Fraction, ...]]]) -> PiecewisePoly:
    grouped: dict[Fraction, tuple[Fraction, ...]] = {}
    for xi, coeffs in terms:
        grouped[xi] = _padd(grouped.get(xi, ()), coeffs)
    knots = sorted(xi for xi, c in grouped.items() if c)
    if not knots:
        return PiecewisePoly.zero()
    pieces = []
    acc: tuple[Fraction, ...] = ()
    for i, xi in enumerate(knots[:-1]):
        acc = _pshift(acc, xi - knots[i - 1]) if i > 0 else ()
        acc = _padd(acc, grouped[xi])
        pieces.append(acc)
    # past the final knot the accumulation must vanish (compact support)
    acc = _padd(_pshift(acc, knots[-1] - knots[-2]) if len(knots) > 1 else (), grouped[knots[-1]])
    if acc:
        raise AssertionError("truncated-power sum does not telescope to zero")
    return _mk(knots, pieces)


def convolve(p: PiecewisePoly, q: PiecewisePoly) -> PiecewisePoly:
    """Exact convolution; support is the Minkowski sum of the supports."""
    if p.is_zero() or q.is_zero():
        return PiecewisePoly.zero()
    tp = _to_truncated(p)
    tq = _to_truncated(q)
    out: dict[Fraction, list[Fraction]] = {}
    for xa, ca in tp:
        for xb, cb in tq:
            knot = xa + xb
            bucket = out.setdefault(knot, [])
            for m, am in enumerate(ca):
                if am == 0:
                    continue
                for n, bn in enumerate(cb):
                    if bn == 0:
                        continue
                    deg = m + n + 1
                    while len(bucket) <= deg:
                        bucket.append(ZERO)
                    bucket[deg] += am * bn * Fraction(
                        factorial(m) * factorial(n), factorial(deg)
                    )
    return _from_truncated([(k, _ptrim(v)) for k, v in out.items()])


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fr_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def to_json_dict(p: PiecewisePoly) -> dict:
    """JSON-compatible form; coefficients are local to each piece's left edge."""
    return {
        "basis": "shifted",
        "breakpoints": [_fr_str(b) for b in p.breakpoints],
        "pieces": [[_fr_str(c) for c in piece] for piece in p.pieces],
    }


def from_json_dict(d: dict) -> PiecewisePoly:
    if d.get("basis", "shifted") != "shifted":
        raise ValueError("unknown piecewise basis")
    return _mk(
        (Fraction(b) for b in d["breakpoints"]),
        ([Fraction(c) for c in piece] for piece in d["pieces"]),
    )
