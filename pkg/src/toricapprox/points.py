"""Rational points in Cox coordinates and their boundary multiplicities.

For a smooth complete fan the p-adic intersection multiplicities of a point
with the invariant divisors are read off from the valuation vector of the Cox
coordinates, translated into the unique cone-supported representative.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

from .fan import Fan, is_complete, is_smooth, minimal_cone_containing
from .intlat import INF, IntMatrix, snf, solve_in_smooth_cone
from .conditions import ToricPair


class FactorizationError(ValueError):
    """An integer resisted trial division and primality testing at desk scale."""


_TRIAL_BOUND = 10 ** 6
# deterministic Miller-Rabin bases valid for all n < 3.3 * 10^24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict:
    """Prime factorization of |n| as {p: e}; n must be nonzero."""
    if n == 0:
        raise ValueError("cannot factor 0")
    return dict(_factorize_cached(abs(n)))


@lru_cache(maxsize=1 << 18)
def _factorize_cached(n: int) -> tuple:
    out = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 7
    inc = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while d <= _TRIAL_BOUND and d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += inc[i]
        i = (i + 1) % 8
    if n == 1:
        return tuple(out.items())
    if n < _TRIAL_BOUND ** 2 or _is_prime(n):
        out[n] = out.get(n, 0) + 1
        return tuple(out.items())
    raise FactorizationError(
        f"cofactor {n} is composite with no prime factor below {_TRIAL_BOUND}; "
        "inputs of this scale are out of scope")


def v_p(x: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    if x == 0:
        raise ValueError("valuation of 0 requested")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class CoxPoint:
    """A rational point given by one Cox coordinate per ray."""

    fan: Fan
    coords: tuple  # Fractions; zeros only where the vanishing set spans a cone

    @classmethod
    def make(cls, fan: Fan, coords: Sequence) -> "CoxPoint":
        cs = tuple(Fraction(c) for c in coords)
        if len(cs) != len(fan.rays):
            raise ValueError("need one coordinate per ray")
        zero = frozenset(i for i, c in enumerate(cs) if c == 0)
        if zero and not any(zero <= set(c) for c in fan.max_cones):
            raise ValueError("vanishing coordinates do not span a cone "
                             "(point lies in the irrelevant locus)")
        return cls(fan, cs)

    @classmethod
    def from_json(cls, fan: Fan, obj: dict) -> "CoxPoint":
        return cls.make(fan, [Fraction(s) for s in obj["coords"]])

    def to_json(self) -> dict:
        return {"coords": [str(c) for c in self.coords]}

    def zero_support(self) -> tuple:
        return tuple(i for i, c in enumerate(self.coords) if c == 0)

    def support_primes(self) -> tuple:
        """Primes dividing some numerator or denominator of the coordinates."""
        primes = set()
        for c in self.coords:
            if c != 0:
                primes |= set(factorize(c.numerator).keys()) if abs(c.numerator) > 1 else set()
                primes |= set(factorize(c.denominator).keys()) if c.denominator > 1 else set()
        return tuple(sorted(primes))


def _is_projective_space(fan: Fan) -> bool:
    d = fan.dim
    if len(fan.rays) != d + 1:
        return False
    want = {tuple(1 if j == i else 0 for j in range(d)) for i in range(d)}
    want.add(tuple(-1 for _ in range(d)))
    return set(fan.rays) == want


def _coprime_integer_rep(coords) -> tuple:
    """Scale projective coordinates to coprime integers."""
    den = lcm(*[c.denominator for c in coords])
    ints = [int(c * den) for c in coords]
    g = gcd(*[abs(a) for a in ints])
    return tuple(a // g for a in ints)


def mult_at_prime(p: int, P: CoxPoint):
    """Intersection multiplicities with the invariant divisors at the prime p."""
    fan = P.fan
    zeros = P.zero_support()
    if zeros:
        # boundary points are supported on projective space only, where the
        # vanishing divisors carry infinite multiplicity
        if not _is_projective_space(fan):
            raise ValueError("boundary multiplicities implemented for projective "
                             "space only; general fans need the interior case")
        ints = _coprime_integer_rep(P.coords)
        return tuple(INF if a == 0 else _vp_int(a, p) for a in ints)
    if not (is_smooth(fan) and is_complete(fan)):
        raise ValueError("multiplicities need a smooth complete fan "
                         "(representative independence)")
    w = [v_p(c, p) for c in P.coords]
    u = tuple(sum(wi * r[j] for wi, r in zip(w, fan.rays)) for j in range(fan.dim))
    cone = minimal_cone_containing(fan, u)
    gens = [fan.rays[i] for i in cone]
    coeffs = solve_in_smooth_cone(gens, u)
    if coeffs is None:
        raise AssertionError("minimal cone did not contain its defining vector")
    out = [0] * len(fan.rays)
    for i, c in zip(cone, coeffs):
        out[i] = c
    return tuple(out)


def _vp_int(a: int, p: int) -> int:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def phi_v(p: int, P: CoxPoint) -> tuple:
    """The cocharacter sum of valuations: representative-independent image of
    the multiplicity vector."""
    fan = P.fan
    if P.zero_support():
        raise ValueError("phi_v needs all-nonzero coordinates")
    w = [v_p(c, p) for c in P.coords]
    return tuple(sum(wi * r[j] for wi, r in zip(w, fan.rays)) for j in range(fan.dim))


@dataclass(frozen=True)
class MPointWitness:
    ok: bool
    prime: Optional[int] = None
    vector: Optional[tuple] = None


def is_m_point(pair: ToricPair, P: CoxPoint, excluded_primes=()) -> MPointWitness:
    """Whether every per-prime multiplicity vector outside S is admissible."""
    if P.fan != pair.fan:
        raise ValueError("point and pair live on different fans")
    S = set(excluded_primes)
    zeros = P.zero_support()
    if zeros:
        # the generic vector (infinity at the vanishing divisors, zero elsewhere)
        # is the multiplicity at every prime not dividing the coordinates
        generic = tuple(INF if i in zeros else 0 for i in range(len(P.coords)))
        if not pair.conditions.admits_vector(generic):
            return MPointWitness(False, None, generic)
    for p in P.support_primes():
        if p in S:
            continue
        mv = mult_at_prime(p, P)
        if not pair.conditions.admits_vector(mv):
            return MPointWitness(False, p, mv)
    return MPointWitness(True)


# ---------------------------------------------------------------------------
# Direct arithmetic oracles on projective space
# ---------------------------------------------------------------------------

def is_m_full(n: int, m) -> bool:
    """n is m-full: every prime dividing n does so to exponent >= m.
    -1, 0 and 1 are the only infinity-full integers."""
    if n in (-1, 0, 1):
        return True
    if m == INF:
        return False
    return all(e >= m for e in factorize(n).values())


def is_perfect_power(n: int, m) -> bool:
    """|n| is an m-th power; -1, 0 and 1 count for every m."""
    if n in (-1, 0, 1):
        return True
    if m == INF:
        return False
    return all(e % m == 0 for e in factorize(n).values())


def is_squarefree(n: int) -> bool:
    """Squarefree test; decides without a full factorization where possible."""
    n = abs(n)
    if n == 0:
        return False
    if n == 1:
        return True
    for p in (2, 3, 5):
        if n % p == 0:
            n //= p
            if n % p == 0:
                return False
    d = 7
    inc = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while d <= _TRIAL_BOUND and d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return False
        d += inc[i]
        i = (i + 1) % 8
    if n == 1:
        return True
    # every prime factor of the cofactor now exceeds the trial bound
    for k in range(2, n.bit_length()):
        r = round(n ** (1 / k))
        if any(c ** k == n for c in (r - 1, r, r + 1)):
            return False
    if n < _TRIAL_BOUND ** 3 or _is_prime(n):
        return True
    raise FactorizationError(
        f"cannot certify squarefreeness of the cofactor {n}; "
        "inputs of this scale are out of scope")


def torus_kernel_basis(fan: Fan) -> list:
    """Integer basis of the exponent vectors k with sum_i k_i n_i = 0: the
    rescalings t_i = s^{k_i} act trivially on phi_v."""
    d, n = fan.dim, len(fan.rays)
    A = IntMatrix.from_cols([list(r) for r in fan.rays], d)  # d x n
    dec = snf(A)
    rank = sum(1 for f in dec.invariant_factors() if f != 0)
    vc = dec.V.to_cols()
    return [tuple(vc[j]) for j in range(rank, n)]
