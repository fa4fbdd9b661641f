from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsyz.laurent import LaurentPolynomial, QPoly, parse_laurent, q_names, z_names


def random_poly(rng, nvars=2, nterms=4, r=1):
    terms = {}
    for _ in range(nterms):
        e = tuple(int(a) for a in rng.integers(-2, 3, nvars))
        qe = tuple(int(a) for a in rng.integers(0, 3, r))
        c = QPoly.monomial(qe, Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))))
        terms[e] = terms.get(e, QPoly.const(r, 0)) + c
    return LaurentPolynomial(nvars, terms)


def direct_eval(p, z, q):
    """Term-by-term numeric evaluation (oracle, independent of the class)."""
    total = 0j
    for e, c in p.sorted_terms():
        cq = c.evaluate(q) if isinstance(c, QPoly) else complex(c)
        total += cq * np.prod([zi ** ei for zi, ei in zip(z, e)])
    return total


@pytest.mark.parametrize("seed", range(100))
def test_arithmetic_matches_evaluation(seed):
    rng = np.random.default_rng(seed)
    a, b = random_poly(rng), random_poly(rng)
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    q = [complex(rng.uniform(0.2, 2.0))]
    A, B = direct_eval(a, z, q), direct_eval(b, z, q)
    for expr, val in (((a + b), A + B), ((a - b), A - B), ((a * b), A * B), ((a ** 2), A * A)):
        got = expr.evaluate(z, q)
        assert abs(got - val) <= 1e-12 * max(1.0, abs(val))


def test_canonical_order_and_format():
    z1, z2 = (LaurentPolynomial.variable(2, j) for j in (0, 1))
    q = QPoly.gen(1, 0)
    W = 1 + z1 + z2 + LaurentPolynomial.monomial((-1, -1), q)
    assert W.format(z_names(2), q_names(1)) == "1 + z1 + z2 + q*z1^-1*z2^-1"
    assert (z1 - 3 * z2 ** 2).format(z_names(2)) == "z1 - 3*z2^2"
    assert LaurentPolynomial.constant(2, 0).is_zero()


def test_substitute_and_embed():
    z1 = LaurentPolynomial.variable(2, 0)
    z2 = LaurentPolynomial.variable(2, 1)
    p = z1 * z2 + z1 ** -1
    s = p.substitute(0, 2 * z2)
    assert s == 2 * z2 * z2 + Fraction(1, 2) * z2 ** -1
    assert sorted(p.embed(3, (0, 2)).exponents()) == [(-1, 0, 0), (1, 0, 1)]


def test_specialize():
    p = LaurentPolynomial.monomial((1,), QPoly.monomial((Fraction(1, 2),)))
    assert abs(p.specialize([4.0]).evaluate([1.0]) - 2.0) < 1e-15


def test_derivatives_finite_difference():
    rng = np.random.default_rng(1)
    p = random_poly(rng, nterms=6)
    z = np.array([1.1 + 0.3j, -0.7 + 0.5j])
    h = 1e-6
    for j in range(2):
        dz = np.zeros(2, complex)
        dz[j] = h
        fd = (p.evaluate(z + dz, [0.5]) - p.evaluate(z - dz, [0.5])) / (2 * h)
        assert abs(p.derivative(j).evaluate(z, [0.5]) - fd) < 1e-6 * max(1, abs(fd))
        assert abs(p.log_derivative(j).evaluate(z, [0.5]) - z[j] * fd) < 1e-6 * max(1, abs(fd))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10_000))
def test_parse_format_round_trip(seed):
    p = random_poly(np.random.default_rng(seed), nvars=3, nterms=5, r=2)
    text = p.format(z_names(3), q_names(2))
    assert parse_laurent(text, z_names(3), q_names(2)) == p


def test_parse_examples():
    p = parse_laurent("1 + z1 + q*z1^-1", ["z1"], ["q"])
    assert p.format(["z1"], ["q"]) == "1 + z1 + q*z1^-1"
    p = parse_laurent("u*v - 1", ["u", "v"])
    assert p.format(["u", "v"]) == "-1 + u*v"
