import math
from fractions import Fraction

import numpy as np
import pytest

from qsyz.errors import OutsidePolytope, QuadratureUnconverged
from qsyz.fan import MomentPolytope, interior_point, kahler_data
from qsyz.fibration import random_interior_points
from qsyz.newton import start_grid
from qsyz.quasidisk import (
    blaschke_disk,
    boundary_class,
    central_charge,
    disk_area_closed_form,
    disk_area_numeric,
    disk_batch,
    displaceability_report,
    evaluate_disk,
    maslov_index,
    mirror_rewrite,
    random_disk,
    superpotential,
    superpotential_gradient,
    wall_crossing_check,
)


def interior(b):
    return np.array([float(a) for a in interior_point(b.poly)])


def test_boundary_lies_on_torus(kp2):
    rng = np.random.default_rng(0)
    x = interior(kp2)
    disk = random_disk(kp2.poly, x, (2, 1, 0, 3), rng)
    theta = 2 * np.pi * np.arange(32) / 32
    X = evaluate_disk(disk, np.exp(1j * theta))
    target = np.sqrt(kp2.poly.ell(x) / (2 * np.pi))
    assert np.max(np.abs(np.abs(X) - target)) < 1e-12


def test_area_examples(kp2):
    x = interior(kp2)
    ell = kp2.poly.ell(x)
    assert disk_area_numeric(blaschke_disk(kp2.poly, x, (1, 0, 0, 0))) == pytest.approx(ell[0], rel=1e-6)
    assert disk_area_numeric(blaschke_disk(kp2.poly, x, (0, 0, 0, 0))) == 0.0
    d = (1, 0, 2, 1)
    assert disk_area_closed_form(blaschke_disk(kp2.poly, x, d)) == pytest.approx(np.dot(d, ell), rel=1e-14)


@pytest.mark.parametrize("seed", range(20))
def test_area_degree_two(seed, kp2):
    rng = np.random.default_rng(seed)
    x = random_interior_points(kp2.poly, 1, rng)[0]
    disk = random_disk(kp2.poly, x, (2, 0, 0, 0), rng)
    assert disk_area_numeric(disk) == pytest.approx(2 * kp2.poly.ell(x)[0], rel=1e-6)


def test_area_monte_carlo_oracle(kp1):
    """Independent estimate of 2 * integral |X'|^2 over the unit disk by Monte Carlo."""
    rng = np.random.default_rng(5)
    x = interior(kp1)
    disk = random_disk(kp1.poly, x, (1, 2, 0), rng)
    n = 400_000
    r = np.sqrt(rng.uniform(0, 1, n))
    z = r * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    h = 1e-6
    dX = (evaluate_disk(disk, z * (1 - h)) - evaluate_disk(disk, z * (1 - h) - h)) / h
    mc = 2 * np.pi * np.mean(np.sum(np.abs(dX) ** 2, axis=1))
    assert mc == pytest.approx(disk_area_numeric(disk), rel=2e-2)


def test_quadrature_unconverged(kp2):
    disk = blaschke_disk(kp2.poly, interior(kp2), (1, 0, 0, 0), [[0.999]])
    with pytest.raises(QuadratureUnconverged):
        disk_area_numeric(disk, max_order=32)


def test_disk_rejects_bad_input(kp2):
    with pytest.raises(OutsidePolytope):
        blaschke_disk(kp2.poly, (0.0, 0.0, 0.0), (1, 0, 0, 0))
    with pytest.raises(ValueError):
        blaschke_disk(kp2.poly, interior(kp2), (1, 0, 0, 0), [[1.2]])


def test_maslov_and_boundary_class(kp2):
    disk = blaschke_disk(kp2.poly, interior(kp2), (1, 1, 1, 0))
    assert maslov_index(disk) == 6
    cls, image = boundary_class(disk, kp2.fan)
    assert cls == (1, 1, 1, 0)
    assert image == (0, 0, 3)  # three times v_4
    assert maslov_index(blaschke_disk(kp2.poly, interior(kp2), (0, 0, 0, 1))) == 2


def test_disk_batch(any_bundle):
    recs = disk_batch(any_bundle.fan, any_bundle.kahler, samples=30, seed=1)
    assert max(r.rel_error for r in recs) <= 1e-6
    assert all(r.maslov == 2 * sum(r.degrees) for r in recs)


def test_c3_superpotential_at_origin(c3):
    x = (0.3, 0.5, 0.7)
    sp = superpotential(x, c3.fan, c3.kahler)
    assert sp([0, 0, 0]) == pytest.approx(sum(math.exp(-2 * math.pi * a) for a in x), rel=1e-15)


@pytest.mark.parametrize("seed", range(50))
def test_periodicity(seed, kp2):
    rng = np.random.default_rng(seed)
    x = random_interior_points(kp2.poly, 1, rng)[0]
    sp = superpotential(x, kp2.fan, kp2.kahler)
    b = rng.normal(size=3) + 0.1j * rng.normal(size=3)
    shift = rng.integers(-3, 4, 3)
    assert abs(sp(b + shift) - sp(b)) <= 1e-12 * max(1.0, abs(sp(b)))


def test_gradient_matches_finite_difference(kp1):
    rng = np.random.default_rng(3)
    x = interior(kp1)
    sp = superpotential(x, kp1.fan, kp1.kahler)
    b = rng.normal(size=2) + 0.2j * rng.normal(size=2)
    g = superpotential_gradient(sp, b)
    h = 1e-6
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        fd = (sp(b + e) - sp(b - e)) / (2 * h)
        assert abs(g[j] - fd) <= 1e-6 * max(1.0, abs(fd))


def test_superpotential_outside(kp2):
    with pytest.raises(OutsidePolytope):
        superpotential((0.0, 0.0, 0.0), kp2.fan, kp2.kahler)


@pytest.mark.parametrize("seed", range(10))
def test_mirror_rewrite(seed, any_bundle):
    rng = np.random.default_rng(seed)
    x = random_interior_points(any_bundle.poly, 1, rng)[0]
    b = rng.normal(size=any_bundle.fan.n) + 0.1j * rng.normal(size=any_bundle.fan.n)
    sp = superpotential(x, any_bundle.fan, any_bundle.kahler)
    rw = mirror_rewrite(sp, any_bundle.family, any_bundle.fan, any_bundle.kahler, b)
    assert rw.max_rel_error <= 1e-12 and rw.total_rel_error <= 1e-12


def test_central_charges(kp2, kp1):
    assert central_charge("B+", kp2.family).format() == "v^-1*(1 + z1 + z2 + q*z1^-1*z2^-1)"
    assert central_charge("B-", kp2.family).format() == "u"
    assert central_charge("B+", kp1.family).format() == "v^-1*(1 + z1 + q*z1^-1)"
    with pytest.raises(ValueError):
        central_charge("wall", kp2.family)


def test_wall_crossing(any_bundle):
    v = wall_crossing_check(any_bundle.family, any_bundle.kahler.q_values or (), samples=200, seed=0)
    assert v.ok and v.failed is None and v.numeric_max_rel_error < 1e-12


def test_tampered_gluing_fails_numerically(kp2):
    v = wall_crossing_check(kp2.family, [0.1], gluing=lambda v, z, f: f / v * (1 + 1e-6))
    assert not v.ok and v.failed == "b"


def test_displaceability_kp1(kp1):
    # q = exp(-4 pi lambda_3); the mirror curve is singular at q = 1/4
    singular = kahler_data(kp1.fan, (0, 0, Fraction(math.log(4) / (4 * math.pi))))
    assert singular.q_values[0] == pytest.approx(0.25, rel=1e-15)
    xs = random_interior_points(MomentPolytope(kp1.fan, singular), 3, np.random.default_rng(0))
    verdicts = displaceability_report(kp1.fan, singular, xs)
    assert all(v.verdict == "obstructed" and v.critical_points >= 1 for v in verdicts)
    generic = displaceability_report(kp1.fan, kp1.kahler, xs + np.array([0, 1.0]))
    assert all(v.verdict == "inconclusive" for v in generic)


def test_displaceability_cn_inconclusive(c3):
    xs = random_interior_points(c3.poly, 3, np.random.default_rng(1))
    assert all(v.verdict == "inconclusive" for v in displaceability_report(c3.fan, c3.kahler, xs))


def test_start_grid():
    rng = np.random.default_rng(0)
    assert start_grid(2, 4, 1.0, rng).shape == (4 * 4 * 9, 2)
    assert start_grid(4, 8, 1.0, rng).shape == (4096, 4)
    assert start_grid(1, 0, 1.0, rng).shape[0] == 0
