"""Brute-force combinatorics behind the cumulant expansion.

A *system of parameters* is a tuple (m, lambda_1..lambda_m, eps_1..eps_n) with
the lambdas a composition of n and eps_j = +-1.  Each system S carries the
sign function eta(l, j) = +1 iff j <= lambda_1+..+lambda_l, the weight

    A(S) = (-1)^{m+1}/m * n!/(lambda_1! ... lambda_m!),

and, for a support parameter a, the family J(S) of index subsets whose
eta*eps sign pattern is constant with at most a-1 exceptions; I(S) keeps the
inclusion-minimal ones.  Unordered t-tuples of subsets are grouped into
t-classes (orbits under relabeling of {1..n}); this module enumerates every
system of parameters and accumulates sum_S T(S, C) A(S) per class, which the
theory says collapses to 2(-1)^{n+f+1} C(n,f) for 1-classes of size f >= 1
and to 0 for every feasible class of 2 or more subsets.

Also here: the generating-function coefficient identities used in those
collapses (log/exp composition sums, the G and H binomial telescopes), the
symmetric-function transform check, and a literal Monte Carlo evaluation of
the expansion's n-dimensional integral as an end-to-end oracle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import comb, factorial
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, ResourceLimitError
from .linfeas import Constraint, feasible
from .testfn import TestFunction

log = logging.getLogger(__name__)

__all__ = [
    "SystemOfParameters",
    "TClass",
    "enumerate_sops",
    "compositions",
    "eta",
    "j_sets",
    "i_min",
    "i_min_block_rule",
    "a_weight",
    "tuple_feasible",
    "class_canonical",
    "sum_TA",
    "sum_TA_all",
    "soshnikov_coeff",
    "exp_neg_coeff",
    "g_combin",
    "verify_single_simp",
    "h_combin",
    "h_partial_sums",
    "verify_h_vanishes",
    "symmetric_transform_check",
    "oracle_Qn_mc",
    "ENUMERATION_CAP",
]

ENUMERATION_CAP = 8


@dataclass(frozen=True)
class SystemOfParameters:
    lambdas: tuple[int, ...]
    epsilons: tuple[int, ...]

    def __post_init__(self):
        if not self.lambdas or any(l < 1 for l in self.lambdas):
            raise DomainError("lambdas must be a composition with parts >= 1")
        if sum(self.lambdas) != len(self.epsilons):
            raise DomainError("epsilons must have length n = sum(lambdas)")
        if any(e not in (-1, 1) for e in self.epsilons):
            raise DomainError("epsilons must be +-1")

    @property
    def m(self) -> int:
        return len(self.lambdas)

    @property
    def n(self) -> int:
        return len(self.epsilons)

    def partial_sums(self) -> tuple[int, ...]:
        out = []
        acc = 0
        for l in self.lambdas:
            acc += l
            out.append(acc)
        return tuple(out)


def compositions(n: int, parts: int | None = None) -> Iterator[tuple[int, ...]]:
    """Compositions of n (into `parts` parts if given), lexicographic."""
    if n == 0 and parts in (0, None):
        yield ()
        return
    if parts is None:
        for m in range(1, n + 1):
            yield from compositions(n, m)
        return
    if parts < 1 or n < parts:
        return
    if parts == 1:
        yield (n,)
        return
    for first in range(1, n - parts + 2):
        for rest in compositions(n - first, parts - 1):
            yield (first,) + rest


def enumerate_sops(
    n: int, shard: tuple[int, int] | None = None
) -> Iterator[SystemOfParameters]:
    """All systems of parameters: m ascending, compositions lex, eps as n-bit ints.

    ``shard=(k, K)`` keeps only epsilon integers in the k-th of K contiguous
    ranges, so shards partition the enumeration and reduce by addition.
    """
    lo, hi = 0, 1 << n
    if shard is not None:
        k, K = shard
        if not 0 <= k < K:
            raise DomainError("shard index out of range")
        step = -(-(1 << n) // K)
        lo, hi = k * step, min((k + 1) * step, 1 << n)
    comps = [c for m in range(1, n + 1) for c in compositions(n, m)]
    for lambdas in comps:
        for bits in range(lo, hi):
            eps = tuple(1 if bits & (1 << j) else -1 for j in range(n))
            yield SystemOfParameters(lambdas, eps)


def eta(S: SystemOfParameters, ell: int, j: int) -> int:
    """+1 iff j <= lambda_1 + .. + lambda_ell (1-indexed both ways)."""
    if not 1 <= ell <= S.m:
        raise DomainError(f"ell={ell} outside 1..{S.m}")
    if not 1 <= j <= S.n:
        raise DomainError(f"j={j} outside 1..{S.n}")
    return 1 if j <= S.partial_sums()[ell - 1] else -1


def j_sets(S: SystemOfParameters, a: int) -> list[tuple[int, frozenset[int], int]]:
    """(ell, J_ell, zeta_ell) for every ell where a side has <= a-1 indices.

    The two sign-count conditions are mutually exclusive when 2(a-1) < n, and
    at most one (ell, zeta) pair can produce any given subset.
    """
    if not 1 <= a <= (S.n + 1) // 2:
        raise DomainError(f"a={a} outside 1..ceil(n/2)")
    out = []
    psums = S.partial_sums()
    for ell in range(1, S.m + 1):
        plus = frozenset(
            j
            for j in range(1, S.n + 1)
            if (1 if j <= psums[ell - 1] else -1) * S.epsilons[j - 1] == 1
        )
        if len(plus) <= a - 1:
            out.append((ell, plus, 1))
        elif S.n - len(plus) <= a - 1:
            out.append((ell, frozenset(range(1, S.n + 1)) - plus, -1))
    return out


def i_min(S: SystemOfParameters, a: int) -> frozenset[frozenset[int]]:
    """Inclusion-minimal subsets among {J_ell}."""
    js = [J for _, J, _ in j_sets(S, a)]
    return frozenset(
        J for J in js if not any(K < J for K in js)
    )


def i_min_block_rule(S: SystemOfParameters, a: int) -> frozenset[frozenset[int]]:
    """Minimal sets via the lambda-block characterization (m >= 2 only).

    J_ell is minimal iff neither the ell-th lambda block nor the following
    one (cyclically, [1, lambda_1] when ell = m) is contained in it.
    """
    if S.m < 2:
        return i_min(S, a)
    psums = S.partial_sums()
    out = []
    for ell, J, _ in j_sets(S, a):
        block_prev = frozenset(range(psums[ell - 1] - S.lambdas[ell - 1] + 1, psums[ell - 1] + 1))
        if ell < S.m:
            block_next = frozenset(range(psums[ell - 1] + 1, psums[ell] + 1))
        else:
            block_next = frozenset(range(1, S.lambdas[0] + 1))  # cyclic convention
        if not block_prev <= J and not block_next <= J:
            out.append(J)
    return frozenset(out)


def a_weight(S: SystemOfParameters) -> Fraction:
    """A(S) = (-1)^{m+1}/m * n!/(prod lambda_i!)."""
    denom = 1
    for l in S.lambdas:
        denom *= factorial(l)
    return Fraction((-1) ** (S.m + 1), S.m) * Fraction(factorial(S.n), denom)


# ---------------------------------------------------------------------------
# t-classes
# ---------------------------------------------------------------------------

CanonicalKey = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class TClass:
    """Orbit of an unordered tuple of distinct subsets of {1..n} under S_n."""

    canonical: CanonicalKey
    n: int

    @property
    def t(self) -> int:
        return len(self.canonical)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.canonical)


def _canonical_key(subsets: Sequence[frozenset[int]], n: int) -> CanonicalKey:
    """Orbit-canonical representative via the atom-size signature.

    For each ordering of the t subsets, count elements per membership mask;
    the lexicographically smallest rebuilt representative (largest masks get
    the smallest labels) is a complete orbit invariant for unordered tuples.
    """
    t = len(subsets)
    best: CanonicalKey | None = None
    for order in permutations(range(t)):
        masks = {}
        for x in range(1, n + 1):
            mask = 0
            for i, oi in enumerate(order):
                if x in subsets[oi]:
                    mask |= 1 << i
            if mask:
                masks[mask] = masks.get(mask, 0) + 1
        rebuilt: list[list[int]] = [[] for _ in range(t)]
        label = 1
        for mask in sorted(masks, reverse=True):
            for _ in range(masks[mask]):
                for i in range(t):
                    if mask & (1 << i):
                        rebuilt[i].append(label)
                label += 1
        key = tuple(sorted(tuple(sorted(s)) for s in rebuilt))
        if best is None or key < best:
            best = key
    assert best is not None
    return best


def class_canonical(subsets: Iterable[Iterable[int]], n: int) -> TClass:
    """Canonical t-class of an unordered tuple of distinct subsets of {1..n}."""
    subs = [frozenset(s) for s in subsets]
    if len(set(subs)) != len(subs):
        raise DomainError("tuple components must be distinct subsets")
    for s in subs:
        if s and (min(s) < 1 or max(s) > n):
            raise DomainError("subset elements must lie in 1..n")
    return TClass(canonical=_canonical_key(subs, n), n=n)


def one_class(n: int, f: int) -> TClass:
    """The 1-class of all f-element subsets."""
    return class_canonical([range(1, f + 1)] if f else [()], n)


def tuple_feasible(subsets: Iterable[Iterable[int]], n: int, a: int) -> bool:
    """True iff some y in [0, 1/(n-a)]^n satisfies, for every subset I,
    y_1+..+y_n > 1 + 2 sum_{i in I} y_i  (strictly).

    Decided exactly by Fourier-Motzkin with strictness; box bounds closed.
    """
    if a >= n:
        raise DomainError("tuple_feasible requires a < n")
    hi = Fraction(1, n - a)
    rows = []
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(-1)
        rows.append(Constraint(e, Fraction(0)))  # -y_i <= 0
        e2 = [Fraction(0)] * n
        e2[i] = Fraction(1)
        rows.append(Constraint(e2, hi))  # y_i <= 1/(n-a)
    for I in subsets:
        Iset = set(I)
        coeffs = [Fraction(1) if (i + 1) in Iset else Fraction(-1) for i in range(n)]
        rows.append(Constraint(coeffs, Fraction(-1), strict=True))
        # sum_{i notin I} y_i - sum_{i in I} y_i > 1  <=>  -that < -1
    return feasible(rows, n)


# ---------------------------------------------------------------------------
# the big accumulation:  sum over systems of parameters of T(S, C) A(S)
# ---------------------------------------------------------------------------

_sum_ta_cache: dict[tuple[int, int, int], dict[CanonicalKey, Fraction]] = {}


def sum_TA_all(
    n: int,
    a: int,
    t_max: int = 3,
    cap: int = ENUMERATION_CAP,
    shard: tuple[int, int] | None = None,
) -> dict[CanonicalKey, Fraction]:
    """sum_S T(S, C) A(S) for every class C with t <= t_max, in one pass.

    Enumerates all sum_m C(n-1, m-1) * 2^n systems of parameters; for each,
    accumulates A(S) onto the canonical key of every t-subset of I(S).
    Shards (by epsilon ranges) reduce by plain addition of their dicts.
    """
    if n > cap:
        raise ResourceLimitError(f"n={n} exceeds enumeration cap {cap}")
    key = (n, a, t_max)
    if shard is None and key in _sum_ta_cache:
        return _sum_ta_cache[key]
    acc: dict[CanonicalKey, Fraction] = {}
    canon_memo: dict[frozenset[frozenset[int]], CanonicalKey] = {}
    for S in enumerate_sops(n, shard=shard):
        mins = i_min(S, a)
        if not mins:
            continue
        w = a_weight(S)
        mins_list = sorted(mins, key=lambda s: (len(s), sorted(s)))
        for t in range(1, min(t_max, len(mins_list)) + 1):
            for combo in combinations(mins_list, t):
                fs = frozenset(combo)
                ck = canon_memo.get(fs)
                if ck is None:
                    ck = _canonical_key(combo, n)
                    canon_memo[fs] = ck
                acc[ck] = acc.get(ck, Fraction(0)) + w
    if shard is None:
        _sum_ta_cache[key] = acc
    return acc


def sum_TA(n: int, a: int, cls: TClass, cap: int = ENUMERATION_CAP) -> Fraction:
    """sum over all systems of parameters of T(S, cls) * A(S)."""
    if cls.n != n:
        raise DomainError("class was built for a different n")
    table = sum_TA_all(n, a, t_max=max(cls.t, 3), cap=cap)
    return table.get(cls.canonical, Fraction(0))


# ---------------------------------------------------------------------------
# coefficient identities
# ---------------------------------------------------------------------------

def soshnikov_coeff(n: int) -> Fraction:
    """sum over compositions of (-1)^{m+1}/m / prod(lambda!); 1 iff n == 1."""
    if n < 1:
        raise DomainError("n must be >= 1")
    total = Fraction(0)
    for lam in compositions(n):
        m = len(lam)
        denom = 1
        for l in lam:
            denom *= factorial(l)
        total += Fraction((-1) ** (m + 1), m * denom)
    return total


def exp_neg_coeff(n: int) -> Fraction:
    """sum over compositions of (-1)^m / prod(lambda!) = (-1)^n / n!."""
    if n < 0:
        raise DomainError("n must be >= 0")
    if n == 0:
        return Fraction(1)  # empty composition, empty product
    total = Fraction(0)
    for lam in compositions(n):
        m = len(lam)
        denom = 1
        for l in lam:
            denom *= factorial(l)
        total += Fraction((-1) ** m, denom)
    return total


def _c(nn: int, kk: int) -> int:
    """Binomial with the zero convention outside 0 <= k <= n."""
    if kk < 0 or nn < 0 or kk > nn:
        return 0
    return comb(nn, kk)


def g_combin(n: int, f: int, c: int, d: int) -> int:
    """C(n,f) - C(n-c,f-c) - C(n-d,f-d) + C(n-c-d,f-c-d)."""
    if c < 0 or d < 0 or c + d > n:
        raise DomainError("need 0 <= c, d and c + d <= n")
    return _c(n, f) - _c(n - c, f - c) - _c(n - d, f - d) + _c(n - c - d, f - c - d)


def verify_single_simp(n: int, f: int) -> bool:
    """Check 2 n! (-1)^n sum_{c,d} (-1)^{c+d+1} G(n,f,c,d)/((n-c-d)! c! d!)
    equals 2 C(n,f) ((-1)^{n+f+1} - 1)."""
    total = Fraction(0)
    for c in range(n + 1):
        for d in range(n + 1 - c):
            g = g_combin(n, f, c, d)
            if g == 0:
                continue
            total += Fraction(
                (-1) ** (c + d + 1) * g,
                factorial(n - c - d) * factorial(c) * factorial(d),
            )
    lhs = 2 * factorial(n) * (-1) ** n * total
    rhs = 2 * _c(n, f) * ((-1) ** (n + f + 1) - 1)
    return lhs == rhs


def h_combin(f: int, g: int, mu1: int, mud: int) -> int:
    """C(f,g) - C(f-mu1,g-mu1) - C(f-mud,g) + C(f-mu1-mud,g-mu1)."""
    if mu1 < 1 or mud < 1:
        raise DomainError("mu1, mud must be >= 1")
    return (
        _c(f, g)
        - _c(f - mu1, g - mu1)
        - _c(f - mud, g)
        + _c(f - mu1 - mud, g - mu1)
    )


def h_partial_sums(f: int, g: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """The four composition sums taken term by term over H's binomials.

    Each equals (-1)^f / (g! (f-g)!) for interior 1 <= g <= f-1; at the edges
    g in {0, f} the middle two break individually but the combination still
    telescopes to zero.
    """
    sums = [Fraction(0)] * 4
    for mu in compositions(f):
        d = len(mu)
        denom = 1
        for m_ in mu:
            denom *= factorial(m_)
        w = Fraction((-1) ** d, denom)
        mu1, mud = mu[0], mu[-1]
        sums[0] += w * _c(f, g)
        sums[1] += w * _c(f - mu1, g - mu1)
        sums[2] += w * _c(f - mud, g)
        sums[3] += w * _c(f - mu1 - mud, g - mu1)
    return tuple(sums)  # type: ignore[return-value]


def verify_h_vanishes(f: int, g: int) -> bool:
    """sum over compositions of (-1)^d H(f,g,mu_1,mu_d)/prod(mu!) == 0."""
    h1, h2, h3, h4 = h_partial_sums(f, g)
    return h1 - h2 - h3 + h4 == 0


def symmetric_transform_check(n: int, q: Fraction) -> bool:
    """With f = prod q^{t_i}, the alternating transform sum collapses to q^n."""
    q = Fraction(q)
    if not 0 < abs(q) < 1:
        raise DomainError("require 0 < |q| < 1")
    tail2 = q * q / (1 - q)  # sum_{t>=2} q^t
    tail1 = q / (1 - q)  # sum_{t>=1} q^t
    total = sum(
        (-1) ** i * comb(n, i) * tail2**i * tail1 ** (n - i) for i in range(n + 1)
    )
    return total == q**n


# ---------------------------------------------------------------------------
# Monte Carlo oracle for the full expansion integral
# ---------------------------------------------------------------------------

def oracle_Qn_mc(
    tf: TestFunction, n: int, a: int, samples: int, seed: int
) -> tuple[float, float]:
    """Literal Monte Carlo of the 2^{n-2}-weighted expansion integral.

    Samples y uniformly on [0, sigma]^n, evaluates the full alternating sum
    over systems of parameters of the indicator products, importance-weights
    by prod fhat(y_i) * sigma^n, and returns (estimate, standard error).
    """
    if n > 4:
        raise DomainError("oracle_Qn_mc supports n <= 4 (cost ~ 2^{2n-1}/sample)")
    if a < 1:
        raise DomainError("need a >= 1")
    del a  # the expansion integral itself does not depend on a
    from .quadrature import _fhat_np

    sigma = float(tf.sigma)
    rng = np.random.default_rng(seed)
    # rows of eta signs per (lambdas, ell); group rows per composition
    groups = []
    for lam in compositions(n):
        m = len(lam)
        denomA = 1
        for l in lam:
            denomA *= factorial(l)
        wA = ((-1) ** (m + 1) / m) * (factorial(n) / denomA)
        psum = np.cumsum(lam)
        etas = np.array(
            [[1 if (j + 1) <= psum[ell] else -1 for j in range(n)] for ell in range(m)],
            dtype=float,
        )
        groups.append((wA, etas))

    eps_list = np.array(
        [[1 if bits & (1 << j) else -1 for j in range(n)] for bits in range(1 << n)],
        dtype=float,
    )

    total = 0.0
    total_sq = 0.0
    chunk = 65536
    done = 0
    while done < samples:
        b = min(chunk, samples - done)
        y = rng.uniform(0.0, sigma, size=(b, n))
        w = np.prod(_fhat_np(tf, y), axis=1) * sigma**n
        k_vals = np.zeros(b)
        for wA, etas in groups:
            m = etas.shape[0]
            for eps in eps_list:
                signs = etas * eps[None, :]  # (m, n)
                sums = y @ signs.T  # (b, m)
                ind = np.all(np.abs(sums) <= 1.0, axis=1)
                k_vals += wA * ind
        vals = 2.0 ** (n - 2) * w * k_vals
        total += float(vals.sum())
        total_sq += float((vals**2).sum())
        done += b
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    stderr = (var / samples) ** 0.5
    return mean, stderr
