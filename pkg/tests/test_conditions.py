import math

import pytest
from hypothesis import given, settings, strategies as st

from toricapprox.conditions import (
    DivisorCondition,
    Kind,
    MultiplicitySet,
    ToricPair,
    campana,
    conditions_from_json,
    darmon,
    mred_in_closure_of_mfin,
    nm_generators,
    nm_singular,
    pair_invariants,
    support_is_conical,
)
from toricapprox.fan import (
    Fan,
    hirzebruch,
    identity_refinement,
    projective_space,
    resolve_2d,
    stellar_subdivide,
    weighted_P11r,
)
from toricapprox.intlat import INF

P1 = projective_space(1)
P2 = projective_space(2)


def radical(n):
    r = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            r *= d
            while n % d == 0:
                n //= d
        d += 1
    return r * (n if n > 1 else 1)


def test_admits_examples():
    c = DivisorCondition(Kind.CAMPANA, 2)
    assert c.admits(3) and not c.admits(1) and c.admits(0) and c.admits(INF)
    c = DivisorCondition(Kind.DARMON, 3)
    assert c.admits(6) and not c.admits(4) and c.admits(INF)
    c = DivisorCondition(Kind.STRICT_DARMON, 3)
    assert c.admits(6) and not c.admits(INF)
    for kind in (Kind.ANY, Kind.INTEGRAL, Kind.SQUAREFREE):
        assert DivisorCondition(kind).admits(0)
    assert DivisorCondition(Kind.SQUAREFREE).admits(1)
    assert not DivisorCondition(Kind.SQUAREFREE).admits(2)
    c = DivisorCondition(Kind.FINITE_SET, values=(0, 2), allow_infinity=True)
    assert c.admits(2) and c.admits(INF) and not c.admits(1)


def test_campana_infinity_admits_only_zero_and_infinity():
    c = DivisorCondition(Kind.CAMPANA, INF)
    assert c.admits(0) and c.admits(INF)
    assert not any(c.admits(w) for w in range(1, 10))


def test_support_is_conical():
    assert support_is_conical(ToricPair(P2, darmon([2, 2, 2])), {0, 1})
    assert not support_is_conical(ToricPair(P1, darmon([2, 2])), {0, 1})
    h2 = hirzebruch(2)
    i1, i3 = h2.rays.index((-1, 2)), h2.rays.index((1, 0))
    assert not support_is_conical(ToricPair(h2, darmon([2] * 4)), {i1, i3})


def test_nm_generators_examples():
    gens, _ = nm_generators(ToricPair(P1, campana([2, 3])))
    assert set(gens) == {(2,), (3,), (-3,), (-4,)}
    gens, _ = nm_generators(ToricPair(P2, darmon([2, 2, 2])))
    assert set(gens) == {(2, 0), (0, 2), (-2, -2)}
    ms = MultiplicitySet.of([DivisorCondition(Kind.INTEGRAL)] * 3)
    gens, _ = nm_generators(ToricPair(P2, ms))
    assert gens == []


def test_pair_invariants_examples():
    inv = pair_invariants(ToricPair(P2, darmon([2, 2, 2])))
    assert inv.index == 4
    assert inv.quotient.invariant_factors == (2, 2)
    assert inv.cone_full and not inv.nm_plus_equals_n
    inv = pair_invariants(ToricPair(projective_space(3), campana([2, 2, 2, 2])))
    assert inv.index == 1 and inv.cone_full and inv.nm_plus_equals_n
    ms = MultiplicitySet.of([DivisorCondition(Kind.INTEGRAL),
                             DivisorCondition(Kind.ANY),
                             DivisorCondition(Kind.ANY)])
    inv = pair_invariants(ToricPair(P2, ms))
    assert inv.index == 1 and not inv.cone_full and not inv.nm_plus_equals_n


def test_pair_invariants_rejects_singular_fan():
    with pytest.raises(ValueError, match="singular"):
        pair_invariants(ToricPair(weighted_P11r(2), darmon([2, 2, 2])))


def test_nm_plus_implies_index_one():
    for m in [(2, 2), (2, 3), (1, 5), (4, 6)]:
        inv = pair_invariants(ToricPair(P1, darmon(list(m))))
        if inv.nm_plus_equals_n:
            assert inv.index == 1


@pytest.mark.parametrize("m", [(2, 2, 2), (2, 3, 5), (4, 6, 9), (3, 3, 7)])
def test_nm_singular_p112_radical(m):
    pair = ToricPair(weighted_P11r(2), darmon(list(m)))
    inv = nm_singular(pair, resolve_2d(weighted_P11r(2)))
    assert radical(inv.index) == radical(math.gcd(m[0], m[1]))
    assert any("W=" in note for note in inv.notes)


def test_nm_singular_identity_refinement_matches_smooth_path():
    pair = ToricPair(P2, darmon([2, 2, 2]))
    a = pair_invariants(pair)
    b = nm_singular(pair, identity_refinement(P2))
    assert a.index == b.index
    assert a.quotient.invariant_factors == b.quotient.invariant_factors


def test_nm_singular_refinement_independent():
    w = weighted_P11r(2)
    pair = ToricPair(w, darmon([2, 2, 2]))
    a = nm_singular(pair, resolve_2d(w))
    # a different smooth refinement: subdivide further
    ref = resolve_2d(w)
    src = ref.source
    extra = stellar_subdivide(src, tuple(x + y for x, y in
                                         zip(src.rays[src.max_cones[0][0]],
                                             src.rays[src.max_cones[0][1]])))
    from toricapprox.fan import RefinementMap
    ref2 = RefinementMap(extra.source, w,
                         tuple(extra.source.rays.index(r) for r in w.rays))
    b = nm_singular(pair, ref2)
    assert a.index == b.index
    assert a.quotient.invariant_factors == b.quotient.invariant_factors


def test_invariance_under_ray_reordering():
    perm = [2, 0, 1]
    f = Fan.make(2, [P2.rays[i] for i in perm],
                 [tuple(sorted(perm.index(i) for i in c)) for c in P2.max_cones])
    m = [2, 3, 4]
    a = pair_invariants(ToricPair(P2, darmon(m)))
    b = pair_invariants(ToricPair(f, darmon([m[i] for i in perm])))
    assert a.index == b.index
    assert a.quotient.invariant_factors == b.quotient.invariant_factors
    assert a.cone_full == b.cone_full


def test_invariance_under_unimodular_basis_change():
    # conjugate P2 by [[1, 1], [0, 1]]
    T = [[1, 1], [0, 1]]
    rays = [tuple(sum(T[i][j] * r[j] for j in range(2)) for i in range(2))
            for r in P2.rays]
    f = Fan.make(2, rays, P2.max_cones)
    a = pair_invariants(ToricPair(P2, darmon([2, 4, 6])))
    b = pair_invariants(ToricPair(f, darmon([2, 4, 6])))
    assert a.index == b.index
    assert a.quotient.invariant_factors == b.quotient.invariant_factors
    assert a.cone_full == b.cone_full


def test_mred_closure():
    assert mred_in_closure_of_mfin(ToricPair(P1, campana([2, 2])))
    ms = MultiplicitySet.of([DivisorCondition(Kind.FINITE_SET, values=(0, 2),
                                              allow_infinity=True),
                             DivisorCondition(Kind.ANY)])
    assert not mred_in_closure_of_mfin(ToricPair(P1, ms))
    ms = MultiplicitySet.of([DivisorCondition(Kind.STRICT_DARMON, 2)] * 2)
    assert mred_in_closure_of_mfin(ToricPair(P1, ms))


def test_custom_sets_validated():
    with pytest.raises(ValueError, match="zero"):
        MultiplicitySet.custom([(1, 0)])
    with pytest.raises(ValueError, match="projection"):
        MultiplicitySet.custom([(0, 0), (INF, 1)])
    ms = MultiplicitySet.custom([(0, 0), (2, 0), (INF, 0)])
    assert ms.admits_vector((2, 0))
    assert not ms.admits_vector((1, 0))


def test_weak_campana():
    ms = MultiplicitySet.weak_campana([2, 2])
    assert ms.admits_vector((0, 0))
    assert ms.admits_vector((2, 0))
    assert ms.admits_vector((1, 1))
    assert not ms.admits_vector((1, 0))
    inv = pair_invariants(ToricPair(P1, ms))
    assert inv.index == 1


def test_json_parsing():
    ms = conditions_from_json([{"type": "campana", "m": 2},
                               {"type": "darmon", "m": "inf"}])
    assert ms.conditions[0].kind is Kind.CAMPANA
    assert ms.conditions[1].m == INF
    ms = conditions_from_json({"type": "custom",
                               "vectors": [[0, 0], [2, 0], ["inf", 0]]})
    assert ms.admits_vector((INF, 0))
