"""Arithmetic exponential sums: Ramanujan, Gauss, Kloosterman, and the
prime-level Kloosterman-to-Gauss factorization.

Dirichlet characters are built by CRT from the unit-group structure of each
prime power (primitive roots for odd prime powers, {+-1} x <5> for 2^k with
k >= 3).  Character values are stored as exact root-of-unity exponents
(k, N) meaning e^{2 pi i k / N} and realized as complex doubles on demand;
all verified identities at these modulus sizes are separated by far more
than the 1e-9/1e-6 comparison tolerances.

The magnitude bound sqrt(q) for Gauss sums is a theorem only for primitive
characters (for the principal character G reduces to a Ramanujan sum, e.g.
|G_{chi_0 mod 12}(12)| = phi(12) = 4 > sqrt(12)); the bound checker
therefore asserts sqrt(q) for primitive characters and the Ramanujan
identity for principal ones.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .errors import DomainError, InvariantViolation

__all__ = [
    "DirichletCharacter",
    "SumValue",
    "factorize",
    "mobius",
    "euler_phi",
    "tau",
    "gcd_saturate",
    "ramanujan",
    "ramanujan_exponential",
    "ramanujan_divisor_sum",
    "ramanujan_von_sterneck",
    "enumerate_characters",
    "conductor",
    "is_primitive",
    "gauss_sum",
    "kloosterman",
    "verify_kloosterman_factorization",
    "character_orthogonality_defect",
]

_FACTOR_CAP = 10**6


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division prime factorization, capped at 10^6."""
    if n < 1:
        raise DomainError("factorize requires n >= 1")
    if n > _FACTOR_CAP:
        raise DomainError(f"n={n} exceeds factorization cap {_FACTOR_CAP}")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return (-1) ** len(f)


def euler_phi(n: int) -> int:
    out = 1
    for p, e in factorize(n):
        out *= p ** (e - 1) * (p - 1)
    return out


def tau(n: int) -> int:
    out = 1
    for _, e in factorize(n):
        out *= e + 1
    return out


def gcd_saturate(x: int, y: int) -> int:
    """(x, y^inf): the largest divisor of x made of primes dividing y."""
    if x < 1 or y < 1:
        raise DomainError("gcd_saturate requires positive arguments")
    out = 1
    g = math.gcd(x, y)
    while g > 1:
        out *= g
        x //= g
        g = math.gcd(x, g)
    return out


# ---------------------------------------------------------------------------
# Ramanujan sums
# ---------------------------------------------------------------------------

def ramanujan_exponential(n: int, q: int) -> int:
    """Direct unit sum of e(an/q), rounded from floats (oracle route)."""
    total = 0.0
    for a in range(1, q + 1):
        if math.gcd(a, q) == 1:
            total += math.cos(2 * math.pi * ((a * n) % q) / q)
    r = round(total)
    if abs(total - r) > 1e-6:
        raise InvariantViolation(f"ramanujan exponential sum not integral: {total}")
    return r


def ramanujan_divisor_sum(n: int, q: int) -> int:
    g = math.gcd(n, q) if n != 0 else q
    return sum(mobius(q // d) * d for d in range(1, g + 1) if g % d == 0 and q % d == 0)


def ramanujan_von_sterneck(n: int, q: int) -> int:
    g = math.gcd(n, q) if n != 0 else q
    qg = q // g
    phi_q = euler_phi(q)
    phi_qg = euler_phi(qg)
    return mobius(qg) * phi_q // phi_qg


def ramanujan(n: int, q: int) -> int:
    """Ramanujan sum by three routes; raises if they ever disagree."""
    if q < 1:
        raise DomainError("modulus must be >= 1")
    div = ramanujan_divisor_sum(n, q)
    von = ramanujan_von_sterneck(n, q)
    expo = ramanujan_exponential(n, q)
    if not div == von == expo:
        raise InvariantViolation(
            f"ramanujan({n},{q}) disagreement: divisor={div}, "
            f"von_sterneck={von}, exponential={expo}"
        )
    return div


# ---------------------------------------------------------------------------
# Dirichlet characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirichletCharacter:
    """Character modulo q; exps[a] is k with value e^{2 pi i k/order}, None off units."""

    modulus: int
    order: int  # common denominator of all exponents
    exps: tuple[Optional[int], ...]
    is_principal: bool

    def value(self, a: int) -> complex:
        k = self.exps[a % self.modulus]
        if k is None:
            return 0j
        return cmath.exp(2j * cmath.pi * k / self.order)

    def __call__(self, a: int) -> complex:
        return self.value(a)

    def is_real(self) -> bool:
        return all(k is None or (2 * k) % self.order == 0 for k in self.exps)


def _primitive_root(p: int, e: int) -> int:
    """Primitive root mod p^e for odd prime p."""
    phi_p = p - 1
    fac = [f for f, _ in factorize(phi_p)]
    g = None
    for cand in range(2, p):
        if all(pow(cand, phi_p // f, p) != 1 for f in fac):
            g = cand
            break
    assert g is not None
    if e == 1:
        return g
    # lift: g or g + p generates mod p^2 (and then all higher powers)
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _unit_group_generators(p: int, e: int) -> list[tuple[int, int]]:
    """[(generator, order)] of (Z/p^e)^*."""
    q = p**e
    if p == 2:
        if e == 1:
            return []
        if e == 2:
            return [(3, 2)]
        return [(q - 1, 2), (5, 2 ** (e - 2))]
    return [(_primitive_root(p, e), euler_phi(q))]


@lru_cache(maxsize=256)
def enumerate_characters(q: int) -> tuple[DirichletCharacter, ...]:
    """All phi(q) Dirichlet characters modulo q."""
    if q < 1:
        raise DomainError("modulus must be >= 1")
    if q == 1:
        return (
            DirichletCharacter(modulus=1, order=1, exps=(0,), is_principal=True),
        )
    factors = factorize(q)
    # per prime power: list of (component modulus, [(gen, order)...])
    comp_mods = [p**e for p, e in factors]
    comp_gens = [_unit_group_generators(p, e) for p, e in factors]
    # discrete log table per component: residue mod p^e -> exponent vector
    comp_logs: list[dict[int, tuple[int, ...]]] = []
    for pe, gens in zip(comp_mods, comp_gens):
        table: dict[int, tuple[int, ...]] = {}
        if not gens:
            table[1 % pe] = ()
        else:
            orders = [o for _, o in gens]
            vec = [0] * len(gens)
            # iterate the direct product of cyclic groups
            def rec(i: int, cur: int):
                if i == len(gens):
                    table[cur] = tuple(vec)
                    return
                g, o = gens[i]
                x = 1
                for t in range(o):
                    vec[i] = t
                    rec(i + 1, (cur * x) % pe)
                    x = (x * g) % pe
            rec(0, 1)
        comp_logs.append(table)

    all_gens = [(i, gi) for i, gens in enumerate(comp_gens) for gi in range(len(gens))]
    orders = [comp_gens[i][gi][1] for i, gi in all_gens]
    order_lcm = 1
    for o in orders:
        order_lcm = order_lcm * o // math.gcd(order_lcm, o)

    # precompute, per residue a mod q, the exponent vector over all generators
    unit_logs: dict[int, tuple[int, ...]] = {}
    for a in range(q):
        if math.gcd(a, q) != 1:
            continue
        vec: list[int] = []
        ok = True
        for pe, table in zip(comp_mods, comp_logs):
            entry = table.get(a % pe)
            if entry is None:
                ok = False
                break
            vec.extend(entry)
        if ok:
            unit_logs[a] = tuple(vec)
    assert len(unit_logs) == euler_phi(q)

    chars = []
    # character indexed by a choice j_i in Z_{order_i} per generator
    def rec_char(i: int, js: list[int]):
        if i == len(orders):
            exps: list[Optional[int]] = [None] * q
            for a, vec in unit_logs.items():
                k = 0
                for j, t, o in zip(js, vec, orders):
                    k = (k + j * t * (order_lcm // o)) % order_lcm
                exps[a] = k
            chars.append(
                DirichletCharacter(
                    modulus=q,
                    order=order_lcm,
                    exps=tuple(exps),
                    is_principal=all(j == 0 for j in js),
                )
            )
            return
        for j in range(orders[i]):
            rec_char(i + 1, js + [j])

    rec_char(0, [])
    assert len(chars) == euler_phi(q)
    return tuple(chars)


@lru_cache(maxsize=4096)
def conductor(chi: DirichletCharacter) -> int:
    """Smallest d | q with chi trivial on units congruent to 1 mod d."""
    q = chi.modulus
    for d in sorted(
        dd for dd in range(1, q + 1) if q % dd == 0
    ):
        if all(
            chi.exps[a] == 0
            for a in range(q)
            if chi.exps[a] is not None and a % d == 1 % d
        ):
            return d
    return q


def is_primitive(chi: DirichletCharacter) -> bool:
    return conductor(chi) == chi.modulus


# ---------------------------------------------------------------------------
# Gauss and Kloosterman sums
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SumValue:
    value: complex
    exactness: str  # "exact-integer" | "float-with-tolerance"

    def as_int(self) -> int:
        r = round(self.value.real)
        if abs(self.value - r) > 1e-6:
            raise InvariantViolation(f"value {self.value} is not an integer")
        return r


def gauss_sum(chi: DirichletCharacter, n: int, check_bound: bool = True) -> SumValue:
    """G_chi(n) = sum over a mod q of chi(a) e(an/q)."""
    q = chi.modulus
    total = 0j
    for a in range(q):
        if chi.exps[a] is None:
            continue
        total += chi.value(a) * cmath.exp(2j * cmath.pi * ((a * n) % q) / q)
    if check_bound:
        if chi.is_principal:
            ram = ramanujan_divisor_sum(n, q)
            if abs(total - ram) > 1e-9 * max(1, q):
                raise InvariantViolation(
                    f"principal Gauss sum != Ramanujan: {total} vs {ram}"
                )
        elif is_primitive(chi) and abs(total) > math.sqrt(q) + 1e-9:
            raise InvariantViolation(
                f"|G_chi({n})| = {abs(total)} exceeds sqrt({q}) for primitive chi"
            )
    return SumValue(value=total, exactness="float-with-tolerance")


def _gcd0(a: int, q: int) -> int:
    """gcd with the (0, q) = q convention."""
    return math.gcd(a % q, q) if (a % q) != 0 else q


def kloosterman(m: int, n: int, q: int, check_bound: bool = True) -> SumValue:
    """S(m, n; q) = sum over units d of e((m d + n dbar)/q); real-valued."""
    if q < 1:
        raise DomainError("modulus must be >= 1")
    total = 0j
    for d in range(1, q + 1):
        if math.gcd(d, q) != 1:
            continue
        dbar = pow(d, -1, q)
        total += cmath.exp(2j * cmath.pi * (((m * d + n * dbar) % q) / q))
    if abs(total.imag) > 1e-9 * max(1, q):
        raise InvariantViolation(f"Kloosterman sum has imaginary part {total.imag}")
    value = total.real
    if check_bound:
        bound = (
            _gcd0(math.gcd(m, n) if (m or n) else 0, q)
            * math.sqrt(min(q / _gcd0(m, q), q / _gcd0(n, q)))
            * tau(q)
        )
        if abs(value) > bound + 1e-6:
            raise InvariantViolation(
                f"|S({m},{n};{q})| = {abs(value)} exceeds Weil-type bound {bound}"
            )
    return SumValue(value=complex(value), exactness="float-with-tolerance")


def verify_kloosterman_factorization(
    N: int, b: int, Q: int, m: int, tol: float = 1e-6
) -> bool:
    """Check S(m^2, N Q; N b) against the character-sum factorization

    -(1/phi(b)) sum_{chi mod b} G_chi(m^2) G_chi((Q, b^inf))
                 conj(chi)(Q / (Q, b^inf)) chi(N).

    Preconditions: N prime, N not dividing b, Q, or m.
    """
    if N < 2 or factorize(N) != [(N, 1)]:
        raise DomainError("N must be prime")
    if b % N == 0 or Q % N == 0 or m % N == 0:
        raise DomainError("N must not divide b, Q, or m")
    lhs = kloosterman(m * m, N * Q, N * b).value.real
    r = gcd_saturate(Q, b)
    rhs = 0j
    for chi in enumerate_characters(b):
        rhs += (
            gauss_sum(chi, m * m).value
            * gauss_sum(chi, r).value
            * chi.value(Q // r).conjugate()
            * chi.value(N)
        )
    rhs = -rhs / euler_phi(b)
    return abs(lhs - rhs) <= tol


def character_orthogonality_defect(q: int) -> float:
    """Max deviation from phi(q) delta_{chi, chi'} over all character pairs."""
    chars = enumerate_characters(q)
    phi_q = euler_phi(q)
    worst = 0.0
    for i, chi in enumerate(chars):
        for j, psi in enumerate(chars):
            s = sum(
                chi.value(a) * psi.value(a).conjugate()
                for a in range(q)
                if chi.exps[a] is not None
            )
            target = phi_q if i == j else 0.0
            worst = max(worst, abs(s - target))
    return worst
