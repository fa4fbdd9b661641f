"""Laurent polynomials with exact, complex or formal-q coefficients.

A :class:`LaurentPolynomial` is a finite map from integer exponent vectors
to coefficients.  Coefficients may be ``Fraction``/``int``, ``complex``
(numeric mode) or :class:`QPoly`, a finite sum of monomials in the Kähler
parameters ``q_a`` with rational exponents.

Canonical text form orders terms by total absolute degree, then by
descending lexicographic exponent, e.g. ``1 + z1 + z2 + q*z1^-1*z2^-1``.
:func:`parse_laurent` inverts :meth:`LaurentPolynomial.format` exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Number
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np


def _order_key(e: Sequence) -> tuple:
    return (sum(abs(x) for x in e), tuple(-x for x in e))


def _fmt_exp(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"({x.numerator}/{x.denominator})"


def _fmt_num(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _power_factors(names: Sequence[str], exps: Sequence) -> list[str]:
    out = []
    for name, e in zip(names, exps):
        if e == 0:
            continue
        out.append(name if e == 1 else f"{name}^{_fmt_exp(Fraction(e))}")
    return out


def q_names(r: int) -> list[str]:
    return ["q"] if r == 1 else [f"q{a + 1}" for a in range(r)]


def z_names(k: int, letter: str = "z") -> list[str]:
    return [f"{letter}{j + 1}" for j in range(k)]


class QPoly:
    """Finite sum ``sum c * q^e`` with rational ``c`` and exponent vectors ``e``."""

    __slots__ = ("r", "terms")

    def __init__(self, r: int, terms: Mapping[tuple, Fraction] | None = None):
        self.r = r
        clean = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            e = tuple(Fraction(x) for x in e)
            if len(e) != r:
                raise ValueError(f"q-exponent {e} has length {len(e)}, expected {r}")
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def const(cls, r: int, c=1) -> "QPoly":
        return cls(r, {(Fraction(0),) * r: Fraction(c)})

    @classmethod
    def monomial(cls, exps: Sequence, c=1) -> "QPoly":
        return cls(len(exps), {tuple(exps): Fraction(c)})

    @classmethod
    def gen(cls, r: int, a: int) -> "QPoly":
        return cls.monomial([int(b == a) for b in range(r)])

    def _lift(self, other) -> "QPoly":
        if isinstance(other, QPoly):
            if other.r != self.r:
                raise ValueError("mismatched number of q parameters")
            return other
        if isinstance(other, (int, Fraction)):
            return QPoly.const(self.r, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, Fraction(0)) + c
        return QPoly(self.r, t)

    __radd__ = __add__

    def __neg__(self):
        return QPoly(self.r, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t: dict[tuple, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, Fraction(0)) + c1 * c2
        return QPoly(self.r, t)

    __rmul__ = __mul__

    def __pow__(self, k):
        k = Fraction(k)
        if self.is_monomial():
            ((e, c),) = self.terms.items()
            if k.denominator != 1 and c != 1:
                raise ValueError("fractional power of a non-unit coefficient")
            cc = c ** int(k) if k.denominator == 1 else c
            return QPoly(self.r, {tuple(x * k for x in e): cc})
        if k.denominator != 1 or k < 0:
            raise ValueError("only nonnegative integer powers of q-polynomials")
        out = QPoly.const(self.r)
        for _ in range(int(k)):
            out = out * self
        return out

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QPoly.const(self.r, other)
        if not isinstance(other, QPoly) or other.r != self.r:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.r, frozenset(self.terms.items())))

    def evaluate(self, q: Sequence[complex]) -> complex:
        q = [complex(x) for x in q]
        total = 0j
        for e, c in self.terms.items():
            total += float(c) * np.prod([qa ** float(x) for qa, x in zip(q, e)]) if e else float(c)
        return total

    def sorted_terms(self) -> list[tuple[tuple, Fraction]]:
        return sorted(self.terms.items(), key=lambda ec: _order_key(ec[0]))

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or q_names(self.r)
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            parts.append(_term_string(c, _power_factors(names, e)))
        return _join(parts)

    def __repr__(self):
        return f"QPoly({self.format()})"

    __str__ = format


def _term_string(c, factors: list[str]) -> str:
    """Signed term string; sign kept as leading '-'."""
    sign = "-" if c < 0 else ""
    a = abs(c)
    body = list(factors)
    if a != 1 or not body:
        body.insert(0, _fmt_num(Fraction(a)))
    return sign + "*".join(body)


def _join(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def _is_zero(c) -> bool:
    if isinstance(c, QPoly):
        return c.is_zero()
    return c == 0


class LaurentPolynomial:
    """Sparse Laurent polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | None = None):
        self.nvars = nvars
        acc: dict[tuple, object] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has length {len(e)}, expected {nvars}")
            acc[e] = acc[e] + c if e in acc else c
        self.terms = {e: c for e, c in acc.items() if not _is_zero(c)}

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> "LaurentPolynomial":
        return cls(len(exps), {tuple(exps): coeff})

    @classmethod
    def constant(cls, nvars: int, coeff=1) -> "LaurentPolynomial":
        return cls(nvars, {(0,) * nvars: coeff})

    @classmethod
    def variable(cls, nvars: int, j: int, coeff=1) -> "LaurentPolynomial":
        return cls.monomial([int(i == j) for i in range(nvars)], coeff)

    def _lift(self, other):
        if isinstance(other, LaurentPolynomial):
            if other.nvars != self.nvars:
                raise ValueError("mismatched number of variables")
            return other
        if isinstance(other, (Number, QPoly)):
            return LaurentPolynomial.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t[e] + c if e in t else c
        return LaurentPolynomial(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t: dict[tuple, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                t[e] = t[e] + p if e in t else p
        return LaurentPolynomial(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("negative powers only of monomials")
            ((e, c),) = self.terms.items()
            return LaurentPolynomial(self.nvars, {tuple(k * x for x in e): c**k})
        out = LaurentPolynomial.constant(self.nvars, self._one())
        for _ in range(k):
            out = out * self
        return out

    def _one(self):
        for c in self.terms.values():
            if isinstance(c, QPoly):
                return QPoly.const(c.r)
            if isinstance(c, complex):
                return 1 + 0j
        return Fraction(1)

    def __eq__(self, other):
        if isinstance(other, (Number, QPoly)):
            other = LaurentPolynomial.constant(self.nvars, other)
        if not isinstance(other, LaurentPolynomial) or other.nvars != self.nvars:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.nvars, frozenset((e, c) for e, c in self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def sorted_terms(self) -> list[tuple[tuple, object]]:
        return sorted(self.terms.items(), key=lambda ec: _order_key(ec[0]))

    def exponents(self) -> list[tuple[int, ...]]:
        return [e for e, _ in self.sorted_terms()]

    def map_coefficients(self, f: Callable) -> "LaurentPolynomial":
        return LaurentPolynomial(self.nvars, {e: f(c) for e, c in self.terms.items()})

    def specialize(self, q: Sequence[complex]) -> "LaurentPolynomial":
        """Replace formal q-coefficients by their complex values."""
        return self.map_coefficients(lambda c: c.evaluate(q) if isinstance(c, QPoly) else complex(c))

    def log_derivative(self, j: int) -> "LaurentPolynomial":
        """``z_j d/dz_j``."""
        return LaurentPolynomial(self.nvars, {e: c * e[j] for e, c in self.terms.items() if e[j]})

    def derivative(self, j: int) -> "LaurentPolynomial":
        t = {}
        for e, c in self.terms.items():
            if e[j]:
                e2 = list(e)
                e2[j] -= 1
                t[tuple(e2)] = c * e[j]
        return LaurentPolynomial(self.nvars, t)

    def substitute(self, j: int, value: "LaurentPolynomial") -> "LaurentPolynomial":
        """Replace variable ``j`` by ``value``; negative powers need a monomial."""
        out = LaurentPolynomial(value.nvars)
        for e, c in self.terms.items():
            rest = list(e)
            k = rest[j]
            rest[j] = 0
            out = out + LaurentPolynomial.monomial(rest, c) * (value ** k)
        return out

    def embed(self, nvars: int, positions: Sequence[int]) -> "LaurentPolynomial":
        """View as a polynomial in ``nvars`` variables, old variable i at ``positions[i]``."""
        t = {}
        for e, c in self.terms.items():
            e2 = [0] * nvars
            for i, p in enumerate(positions):
                e2[p] = e[i]
            t[tuple(e2)] = c
        return LaurentPolynomial(nvars, t)

    def evaluate(self, point: Sequence[complex], q: Sequence[complex] | None = None) -> complex:
        pt = np.asarray(point, dtype=complex)
        total = 0j
        for e, c in self.terms.items():
            cv = c.evaluate(q) if isinstance(c, QPoly) else complex(c)
            total += cv * np.prod(pt ** np.asarray(e, dtype=float)) if e else cv
        return total

    def evaluate_many(self, points: np.ndarray, q: Sequence[complex] | None = None) -> np.ndarray:
        """Vectorised evaluation at an ``(N, nvars)`` array of points."""
        pts = np.asarray(points, dtype=complex)
        E = np.array(list(self.terms), dtype=float).reshape(len(self.terms), self.nvars)
        C = np.array([c.evaluate(q) if isinstance(c, QPoly) else complex(c) for c in self.terms.values()])
        logs = np.log(pts)
        return np.exp(logs @ E.T) @ C

    def format(self, names: Sequence[str] | None = None, qnames: Sequence[str] | None = None) -> str:
        names = names or z_names(self.nvars)
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            zf = _power_factors(names, e)
            if isinstance(c, QPoly):
                qn = qnames or q_names(c.r)
                for qe, qc in c.sorted_terms():
                    parts.append(_term_string(qc, _power_factors(qn, qe) + zf))
            elif isinstance(c, (int, Fraction)):
                parts.append(_term_string(Fraction(c), zf))
            else:
                cv = complex(c)
                parts.append("*".join([f"({cv.real:.17g}{cv.imag:+.17g}j)"] + zf))
        return _join(parts)

    def __repr__(self):
        return f"LaurentPolynomial({self.format()})"

    __str__ = format


# --------------------------------------------------------------------------
# Parsing of the canonical form

_FACTOR = re.compile(r"^(?P<name>[A-Za-z]\w*)(?:\^(?P<exp>-?\d+|\(-?\d+(?:/\d+)?\)))?$")
_NUMBER = re.compile(r"^\d+(?:/\d+)?$")


def _split_terms(text: str) -> list[tuple[int, str]]:
    s = text.replace(" ", "")
    terms, sign, buf = [], 1, ""
    i = 0
    while i < len(s):
        ch = s[i]
        in_exp = buf.endswith("^") or buf.endswith("^(")
        if ch in "+-" and not in_exp:
            if buf:
                terms.append((sign, buf))
            elif ch == "+" or terms:
                raise ValueError(f"empty term near position {i}")
            sign, buf = (1 if ch == "+" else -1), ""
        else:
            buf += ch
        i += 1
    if not buf:
        raise ValueError("expression ends with an operator")
    terms.append((sign, buf))
    return terms


def parse_laurent(text: str, names: Sequence[str], qnames: Sequence[str] = ()) -> LaurentPolynomial:
    """Parse ``format`` output back into a polynomial with QPoly coefficients."""
    idx = {n: j for j, n in enumerate(names)}
    qidx = {n: a for a, n in enumerate(qnames)}
    r = len(qnames)
    poly = LaurentPolynomial(len(names))
    for sign, body in _split_terms(text):
        coeff = Fraction(sign)
        ze = [0] * len(names)
        qe = [Fraction(0)] * r
        for f in body.split("*"):
            if _NUMBER.match(f):
                coeff *= Fraction(f)
                continue
            mt = _FACTOR.match(f)
            if not mt:
                raise ValueError(f"cannot parse factor {f!r}")
            exp = Fraction((mt["exp"] or "1").strip("()"))
            name = mt["name"]
            if name in idx:
                if exp.denominator != 1:
                    raise ValueError(f"fractional exponent on {name}")
                ze[idx[name]] += int(exp)
            elif name in qidx:
                qe[qidx[name]] += exp
            else:
                raise ValueError(f"unknown symbol {name!r}")
        poly = poly + LaurentPolynomial.monomial(ze, QPoly.monomial(qe, coeff))
    return poly


def from_terms(nvars: int, items: Iterable[tuple[Sequence[int], object]]) -> LaurentPolynomial:
    """Sum of monomials; repeated exponents are added."""
    out = LaurentPolynomial(nvars)
    for e, c in items:
        out = out + LaurentPolynomial.monomial(e, c)
    return out
