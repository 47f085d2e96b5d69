"""Bounded-height censuses of M-points, with brute-force oracle cross-checks.

Height is the maximum absolute value of the canonical integer Cox coordinates.
That is an artifact convention chosen for correctness testing, not a
log-anticanonical height; every census says so in its normalization note.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from itertools import product as _iter_product
from math import gcd
from typing import Optional

from .conditions import Kind, ToricPair, Variant
from .fan import is_complete, is_smooth
from .intlat import INF
from .points import (
    CoxPoint,
    factorize,
    is_m_full,
    is_m_point,
    is_perfect_power,
    is_squarefree,
    mult_at_prime,
    torus_kernel_basis,
    _is_projective_space,
)

_HEIGHT_NOTE = ("height = max |canonical integer Cox coordinate| "
                "(box height, an artifact convention; the source results "
                "attach no height to M-points)")


@dataclass(frozen=True)
class Census:
    pair: ToricPair
    height: int
    count: int
    points: Optional[tuple] = None
    normalization_note: str = _HEIGHT_NOTE

    def to_json(self) -> dict:
        out = {"height": self.height, "count": self.count,
               "normalization_note": self.normalization_note}
        if self.points is not None:
            out["points"] = [[str(x) for x in p] for p in self.points]
        return out


def enumerate_projective(pair: ToricPair, H: int, keep_points: bool = True) -> Census:
    """All M-points of projective space with coprime integer coordinates of
    absolute value at most H, first nonzero coordinate positive."""
    if H < 1:
        raise ValueError("height bound must be at least 1")
    fan = pair.fan
    if not _is_projective_space(fan):
        raise ValueError("projective census needs a projective space fan")
    n = len(fan.rays)
    found = []
    for tup in _iter_product(range(-H, H + 1), repeat=n):
        if all(x == 0 for x in tup):
            continue
        nz = [x for x in tup if x != 0]
        if nz[0] < 0:
            continue  # canonical sign
        if gcd(*[abs(x) for x in tup]) != 1:
            continue
        P = CoxPoint.make(fan, tup)
        if is_m_point(pair, P).ok:
            found.append(tup)
    found.sort()
    return Census(pair, H, len(found), tuple(found) if keep_points else None)


def _sign_group(fan) -> list:
    """The sign vectors of the relation torus: (-1)^k for k in the kernel of
    the ray matrix, taken mod 2."""
    basis = [tuple(k % 2 for k in kb) for kb in torus_kernel_basis(fan)]
    n = len(fan.rays)
    group = {tuple(0 for _ in range(n))}
    frontier = list(group)
    while frontier:
        g = frontier.pop()
        for b in basis:
            h = tuple((x + y) % 2 for x, y in zip(g, b))
            if h not in group:
                group.add(h)
                frontier.append(h)
    return [tuple(-1 if x else 1 for x in g) for g in sorted(group)]


def canonical_interior(pair: ToricPair, P: CoxPoint) -> tuple:
    """Canonical orbit representative of an interior point: per-prime
    multiplicity magnitudes, then the minimal sign pattern."""
    fan = pair.fan
    mags = [1] * len(fan.rays)
    for p in P.support_primes():
        mv = mult_at_prime(p, P)
        for i, e in enumerate(mv):
            mags[i] *= p ** e
    signs = [1 if c > 0 else -1 for c in P.coords]
    best = None
    for s in _sign_group(fan):
        cand = tuple(m * a * b for m, a, b in zip(mags, signs, s))
        if best is None or cand < best:
            best = cand
    return best


def enumerate_toric(pair: ToricPair, H: int, keep_points: bool = True) -> Census:
    """Interior census: orbits of all-nonzero integer Cox tuples in the box."""
    fan = pair.fan
    if H < 0:
        raise ValueError("height bound must be nonnegative")
    if not (is_smooth(fan) and is_complete(fan)):
        raise ValueError("census needs a smooth complete fan")
    rank = len(fan.rays) - fan.dim
    if rank > 2:
        raise ValueError("canonicalization implemented for class group rank <= 2")
    n = len(fan.rays)
    seen = set()
    vals = [x for x in range(-H, H + 1) if x != 0]
    for tup in _iter_product(vals, repeat=n):
        P = CoxPoint.make(fan, tup)
        canon = canonical_interior(pair, P)
        if canon in seen:
            continue
        if is_m_point(pair, P).ok:
            seen.add(canon)
    pts = tuple(sorted(seen))
    return Census(pair, H, len(pts), pts if keep_points else None)


@dataclass(frozen=True)
class CrosscheckReport:
    checked: int
    divergences: tuple  # (tuple, fan_verdict, oracle_verdict)

    @property
    def ok(self) -> bool:
        return not self.divergences


def _oracle_admits(cond, a: int) -> bool:
    """Direct arithmetic characterization of one coordinate's condition on
    projective space with coprime integer coordinates."""
    if cond.kind is Kind.ANY:
        return True
    if cond.kind is Kind.INTEGRAL:
        return a in (1, -1)
    if cond.kind is Kind.CAMPANA:
        return is_m_full(a, cond.m)
    if cond.kind is Kind.DARMON:
        return is_perfect_power(a, cond.m)
    if cond.kind is Kind.STRICT_DARMON:
        return a != 0 and is_perfect_power(a, cond.m)
    if cond.kind is Kind.SQUAREFREE:
        return a != 0 and is_squarefree(a)
    if cond.kind is Kind.FINITE_SET:
        if a == 0:
            return cond.allow_infinity
        if a in (1, -1):
            return True
        return all(e in cond.values for e in factorize(a).values())
    raise ValueError(f"no arithmetic oracle for {cond.kind.value}")


def crosscheck(pair: ToricPair, H: int) -> CrosscheckReport:
    """Compare is_m_point with the coordinatewise arithmetic oracle on the
    whole coprime box of height H."""
    fan = pair.fan
    if not _is_projective_space(fan):
        raise ValueError("crosscheck runs on projective space")
    if pair.conditions.variant is not Variant.PRODUCT:
        raise ValueError("crosscheck needs per-divisor conditions")
    conds = pair.conditions.conditions
    n = len(fan.rays)
    checked = 0
    divergences = []
    for tup in _iter_product(range(-H, H + 1), repeat=n):
        if all(x == 0 for x in tup):
            continue
        nz = [x for x in tup if x != 0]
        if nz[0] < 0 or gcd(*[abs(x) for x in tup]) != 1:
            continue
        checked += 1
        fan_v = is_m_point(pair, CoxPoint.make(fan, tup)).ok
        oracle_v = all(_oracle_admits(c, a) for c, a in zip(conds, tup))
        if fan_v != oracle_v:
            divergences.append((tup, fan_v, oracle_v))
    return CrosscheckReport(checked, tuple(divergences))


def census_to_json(c: Census) -> str:
    return json.dumps(c.to_json(), indent=2)


def census_to_csv(c: Census) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    n = len(c.pair.fan.rays)
    w.writerow([f"a{i}" for i in range(n)] + ["is_m_point"])
    for p in c.points or ():
        w.writerow(list(p) + ["yes"])
    return buf.getvalue()
