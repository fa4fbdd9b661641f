from dataclasses import replace
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from conftest import bundle

from qsyz.errors import ConstraintViolated, GaugeConeInvalid
from qsyz.fan import calabi_yau_vector
from qsyz.laurent import QPoly
from qsyz.mirror import (
    embed_into_cm_mirror,
    gauge_rescaling,
    hypersurface_smoothness_probe,
    landau_ginzburg,
    solve_coefficients,
    verify_constraints,
)

EXPECTED = {
    "kp2.fan": "u*v = 1 + z1 + z2 + q*z1^-1*z2^-1",
    "kp1.fan": "u*v = 1 + z1 + q*z1^-1",
    "c3.fan": "u*v = 1 + z1 + z2",
    "c4.fan": "u*v = 1 + z1 + z2 + z3",
}


def brute_force_coefficients(b):
    """Smallest-box search for integer q-exponents with C = 1 on the gauge cone."""
    cone = set(b.family.gauge_cone)
    free = [j for j in range(b.fan.m) if j not in cone]
    r = b.kahler.r
    found = []
    for exps in product(range(-3, 4), repeat=r * len(free)):
        E = np.array(exps).reshape(len(free), r)
        if all(
            np.array_equal(sum(b.kahler.gamma[a][j] * E[p] for p, j in enumerate(free)), np.eye(r, dtype=int)[a])
            for a in range(r)
        ):
            found.append(E)
    return free, found


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_equations(name):
    assert bundle(name).family.equation() == EXPECTED[name]


def test_coefficients_match_brute_force(any_bundle):
    free, found = brute_force_coefficients(any_bundle)
    if not free or not any_bundle.kahler.r:
        assert all(c == 1 for c in any_bundle.family.coefficients)
        return
    assert len(found) == 1
    for p, j in enumerate(free):
        expected = QPoly.monomial(tuple(Fraction(int(x)) for x in found[0][p]))
        assert any_bundle.family.coefficients[j] == expected


def test_constraints_verified(any_bundle):
    v = verify_constraints(any_bundle.family, any_bundle.kahler, samples=20)
    assert all(v.exact) and v.numeric_max_rel_error <= 1e-12


def test_tampered_constraint_reports_index(kp2):
    fam = kp2.family
    assert fam.coefficients[2] == QPoly.gen(1, 0)
    bad = list(fam.coefficients)
    bad[2] = QPoly.monomial((2,))
    with pytest.raises(ConstraintViolated) as info:
        verify_constraints(replace(fam, coefficients=tuple(bad)), kp2.kahler)
    assert info.value.index == 1


def test_gauge_cone_invalid(kp2):
    frame = kp2.frame
    with pytest.raises(GaugeConeInvalid):
        solve_coefficients(kp2.fan, frame, kp2.kahler, (0, 1, 2))
    with pytest.raises(GaugeConeInvalid):
        solve_coefficients(kp2.fan, frame, kp2.kahler, (0, 1))


def test_other_gauge_cone_is_rescaling(kp2):
    other = solve_coefficients(kp2.fan, kp2.frame, kp2.kahler, (1, 2, 3))
    assert other.equation() == "u*v = 1 + q*z1 + z2 + z1^-1*z2^-1"
    verify_constraints(other, kp2.kahler)
    c = gauge_rescaling(kp2.family, other)
    assert c == (QPoly.gen(1, 0), QPoly.const(1))


def test_cm_embedding(kp2, kp1, c3):
    emb = embed_into_cm_mirror(kp2.family)
    assert emb.substitution_identity and emb.relations_hold
    assert [r.format() for r in emb.relations] == ["Z1*Z2*Z3 = q"]
    assert emb.cm_equation == "u*v = 1 + Z1 + Z2 + Z3"
    emb = embed_into_cm_mirror(kp1.family)
    assert [r.format() for r in emb.relations] == ["Z1*Z2 = q"]
    assert embed_into_cm_mirror(c3.family).relations == ()


def test_smoothness_probe(kp2, kp1):
    probe = hypersurface_smoothness_probe(kp2.family, [-1 / 27])
    assert probe.singular
    assert np.allclose(probe.witness.z, (-1 / 3, -1 / 3), atol=1e-8)
    assert not hypersurface_smoothness_probe(kp2.family, [0.1]).singular
    probe = hypersurface_smoothness_probe(kp1.family, [0.25])
    assert probe.singular and abs(probe.witness.z[0] + 0.5) < 1e-8
    assert not hypersurface_smoothness_probe(kp1.family, [0.2]).singular


def test_landau_ginzburg(kp2):
    lg = landau_ginzburg(kp2.family)
    assert lg.superpotential == "u"
    assert lg.W.evaluate([2.5, 1.0, 0.3, 0.7], [0.1]) == 2.5


def test_frame_independent_of_gauge(kp2):
    assert calabi_yau_vector(kp2.fan) == kp2.frame
