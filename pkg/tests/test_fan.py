from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from qsyz import lattice as lat
from qsyz.errors import AmbiguousU, EmptyInterior, NotCalabiYau, SingularCone, ValidationError
from qsyz.fan import (
    FanData,
    MomentPolytope,
    adapted_basis,
    calabi_yau_vector,
    certify_semiprojective,
    codim2_faces,
    interior_point,
    is_smooth,
    kahler_data,
    relation_lattice,
    strict_convexity_constraints,
    support_values,
)

KP2_RAYS = ((1, 0, 1), (0, 1, 1), (-1, -1, 1), (0, 0, 1))
KP2_CONES = ((0, 1, 3), (1, 2, 3), (0, 2, 3))
KP1_RAYS = ((1, 1), (-1, 1), (0, 1))
KP1_CONES = ((0, 2), (1, 2))


def kp2_fan():
    return FanData(3, KP2_RAYS, KP2_CONES)


def kp1_fan():
    return FanData(2, KP1_RAYS, KP1_CONES)


def brute_vertices(fan, lam):
    """Vertices of {<x,v_i> >= lam_i} by solving every n-subset (oracle)."""
    out = set()
    for idx in combinations(range(fan.m), fan.n):
        x = lat.solve_rational([fan.rays[i] for i in idx], [lam[i] for i in idx])
        if x is None:
            continue
        if all(sum(a * b for a, b in zip(x, v)) >= l for v, l in zip(fan.rays, lam)):
            out.add((tuple(x), frozenset(i for i in range(fan.m) if sum(a * b for a, b in zip(x, fan.rays[i])) == lam[i])))
    return out


def test_fan_validation():
    with pytest.raises(ValidationError, match="primitiv"):
        FanData(2, ((2, 0), (0, 1)), ((0, 1),))
    with pytest.raises(ValidationError, match="distinct"):
        FanData(2, ((1, 0), (1, 0)), ((0, 1),))
    with pytest.raises(ValidationError, match="exactly"):
        FanData(2, ((1, 0), (0, 1), (1, 1)), ((0, 1, 2),))
    with pytest.raises(ValidationError, match="no maximal cone"):
        FanData(2, ((1, 0), (0, 1), (1, 1)), ((0, 1),))


def test_calabi_yau_vector_examples():
    fr = calabi_yau_vector(kp2_fan())
    assert fr.u == (0, 0, 1)
    assert fr.w == ((1, 0), (0, 1), (-1, -1), (0, 0))
    fr = calabi_yau_vector(kp1_fan())
    assert fr.u == (0, 1) and fr.w == ((1,), (-1,), (0,))
    with pytest.raises(NotCalabiYau):
        calabi_yau_vector(FanData(1, ((1,), (-1,)), ((0,), (1,))))


def test_ambiguous_u():
    # full-dimensional cones pin u down, so ambiguity only surfaces through the error type
    fan = FanData(2, ((1, 0), (0, 1)), ((0, 1),))
    assert calabi_yau_vector(fan).u == (1, 1)
    with pytest.raises(AmbiguousU) as info:
        raise AmbiguousU((1, 0), [(0, 1)])
    assert info.value.directions == [(0, 1)]


def test_adapted_basis_invariants(any_bundle):
    fr = any_bundle.frame
    T = [list(r) for r in fr.T]
    assert abs(lat.det(T)) == 1
    assert list(T[-1]) == list(fr.u)
    for v, w in zip(any_bundle.fan.rays, fr.w):
        assert lat.matvec(T, v) == list(w) + [1]
    assert all(a == 0 for a in fr.w[-1])


def test_adapted_basis_examples():
    T, w = adapted_basis(kp2_fan(), (0, 0, 1))
    assert T == lat.identity(3)
    T, w = adapted_basis(kp1_fan(), (0, 1))
    assert T == lat.identity(2) and w == [(1,), (-1,), (0,)]
    reordered = FanData(2, ((0, 1), (-1, 1), (1, 1)), ((0, 2), (0, 1)))
    T, w = adapted_basis(reordered, (0, 1))
    assert sorted(w) == [(-2,), (-1,), (0,)] and w[-1] == (0,)


def test_smoothness():
    assert is_smooth(kp2_fan()).smooth
    assert is_smooth(kp1_fan()).smooth
    bad = FanData(2, ((1, 0), (1, 2)), ((0, 1),))
    rep = is_smooth(bad)
    assert not rep.smooth and rep.offending == ((0, 1),) and abs(rep.determinants[0]) == 2
    with pytest.raises(SingularCone):
        certify_semiprojective(bad)


def _strictly_convex(fan, lam):
    return lat.check_point(strict_convexity_constraints(fan), [Fraction(a) for a in lam])


def test_semiprojective_witnesses():
    for fan in (kp2_fan(), kp1_fan()):
        cert = certify_semiprojective(fan)
        assert cert.ok and _strictly_convex(fan, cert.lam)
    # bundled convention: positive curve area
    assert _strictly_convex(kp2_fan(), (0, 0, 0, 1))
    assert _strictly_convex(kp1_fan(), (0, 0, 1))
    assert not _strictly_convex(kp2_fan(), (0, 0, 0, -1))
    assert not _strictly_convex(kp1_fan(), (0, 0, -1))


def test_nonconvex_support_fails():
    fan = FanData(2, ((1, 0), (0, 1), (-1, 0), (0, -1)), ((0, 1), (2, 3)))
    cert = certify_semiprojective(fan)
    assert not cert.ok and cert.reason


def test_relation_lattice():
    assert relation_lattice(kp2_fan()) == [[1, 1, 1, -3]]
    assert relation_lattice(kp1_fan()) == [[1, 1, -2]]
    assert relation_lattice(FanData(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((0, 1, 2),))) == []


def test_gamma_relations_vanish(any_bundle):
    for g in any_bundle.kahler.gamma:
        assert all(sum(gi * v[j] for gi, v in zip(g, any_bundle.fan.rays)) == 0 for j in range(any_bundle.fan.n))


def test_support_values_examples():
    p = MomentPolytope(kp2_fan(), kahler_data(kp2_fan(), (0, 0, 0, -1)))
    assert support_values(p, (0, 0, 0)) == (0, 0, 0, 1)
    p = MomentPolytope(kp1_fan(), kahler_data(kp1_fan(), (0, 0, -1)))
    assert support_values(p, (0, Fraction(1, 2))) == (Fraction(1, 2), Fraction(1, 2), Fraction(3, 2))
    num = support_values(p, (0.0, 0.5))
    assert np.allclose(num, 2 * np.pi * np.array([0.5, 0.5, 1.5]))


def test_kahler_q_sign():
    k = kahler_data(kp1_fan(), (0, 0, 1))
    assert k.area_over_2pi() == (2,)
    assert np.isclose(k.q_values[0], np.exp(-4 * np.pi))
    k = kahler_data(kp2_fan(), (0, 0, 0, 1))
    assert np.isclose(k.q_values[0], np.exp(-6 * np.pi))


def test_interior_point(any_bundle):
    x = interior_point(any_bundle.poly)
    assert all(v > 0 for v in support_values(any_bundle.poly, x))


def test_empty_interior():
    fan = FanData(1, ((1,), (-1,)), ((0,), (1,)))
    with pytest.raises(EmptyInterior) as info:
        interior_point(MomentPolytope(fan, kahler_data(fan, (1, 0))))
    assert info.value.certificate is not None


def _pairs(faces):
    return {frozenset(i + 1 for i in f.pair): f.bounded for f in faces}


def test_codim2_faces_examples(kp2, kp1, c3):
    assert _pairs(codim2_faces(kp2.poly)) == {
        frozenset({1, 2}): False, frozenset({2, 3}): False, frozenset({1, 3}): False,
        frozenset({1, 4}): True, frozenset({2, 4}): True, frozenset({3, 4}): True,
    }
    assert _pairs(codim2_faces(kp1.poly)) == {frozenset({1, 3}): True, frozenset({2, 3}): True}
    assert _pairs(codim2_faces(c3.poly)) == {
        frozenset({1, 2}): False, frozenset({1, 3}): False, frozenset({2, 3}): False,
    }


def test_codim2_faces_match_brute_force(any_bundle):
    fan, lam = any_bundle.fan, any_bundle.kahler.lam
    verts = brute_vertices(fan, lam)
    for f in codim2_faces(any_bundle.poly):
        expected = sorted(x for x, tight in verts if set(f.pair) <= tight)
        assert sorted(f.vertices) == expected
        for x in f.vertices:
            ell = support_values(any_bundle.poly, x)
            assert ell[f.pair[0]] == 0 and ell[f.pair[1]] == 0
        ell = support_values(any_bundle.poly, f.witness)
        assert ell[f.pair[0]] == 0 == ell[f.pair[1]] and min(ell) >= 0
