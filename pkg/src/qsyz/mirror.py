"""The mirror hypersurface family ``uv = sum_i C_i z^{w_i}``.

Coefficients are formal q-monomials fixed by ``C_i = 1`` on a gauge cone
containing the last ray, plus the constraints ``prod_i C_i^{(gamma_a)_i} = q_a``.
In the mirror complex moduli the coordinates ``t_a`` coincide with ``q_a``;
:attr:`MirrorFamily.t` is provided as an alias.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import lattice as lat
from .errors import ConstraintViolated, GaugeConeInvalid
from .fan import CalabiYauFrame, FanData, KahlerData, default_gauge_cone
from .laurent import LaurentPolynomial, QPoly, q_names, z_names
from .newton import CriticalPoint, critical_points


@dataclass(frozen=True)
class MirrorFamily:
    frame: CalabiYauFrame
    gamma: tuple[tuple[int, ...], ...]
    coefficients: tuple[QPoly, ...]
    gauge_cone: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.coefficients)

    @property
    def k(self) -> int:
        """Number of torus coordinates ``z_j`` (``n - 1``)."""
        return len(self.frame.u) - 1

    @property
    def r(self) -> int:
        return len(self.gamma)

    @property
    def t(self) -> tuple[QPoly, ...]:
        return tuple(QPoly.gen(self.r, a) for a in range(self.r))

    def rhs(self) -> LaurentPolynomial:
        """``f(z) = sum_i C_i z^{w_i}`` with formal q-coefficients."""
        out = LaurentPolynomial(self.k)
        for w, c in zip(self.frame.w, self.coefficients):
            out = out + LaurentPolynomial.monomial(w, c)
        return out

    def rhs_numeric(self, q: Sequence[complex]) -> LaurentPolynomial:
        return self.rhs().specialize(q)

    def equation(self) -> str:
        return f"u*v = {self.rhs().format(z_names(self.k), q_names(self.r))}"

    def defining_polynomial(self) -> LaurentPolynomial:
        """``u v - f(z)`` in variables ``(u, v, z_1, ..., z_k)``."""
        uv = LaurentPolynomial.monomial([1, 1] + [0] * self.k, QPoly.const(self.r))
        return uv - self.rhs().embed(self.k + 2, range(2, self.k + 2))


def _check_gauge_cone(fan: FanData, cone) -> tuple[int, ...]:
    cone = tuple(sorted(cone))
    if cone not in fan.max_cones:
        raise GaugeConeInvalid(f"{[i + 1 for i in cone]} is not a maximal cone")
    if fan.m - 1 not in cone:
        raise GaugeConeInvalid(f"{[i + 1 for i in cone]} does not contain ray {fan.m}")
    if abs(lat.det(fan.cone_matrix(cone))) != 1:
        raise GaugeConeInvalid(f"{[i + 1 for i in cone]} is not smooth")
    return cone


def solve_coefficients(
    fan: FanData,
    frame: CalabiYauFrame,
    kahler: KahlerData,
    gauge_cone: Sequence[int] | None = None,
) -> MirrorFamily:
    """Solve the coefficient constraints with ``C_i = 1`` on ``gauge_cone``.

    The constraint matrix restricted to the complement of the cone is put
    in Hermite form; for a smooth cone it is unimodular, and the transform
    gives the integer q-exponents of the remaining coefficients.
    """
    if gauge_cone is None:
        gauge_cone = default_gauge_cone(fan)
        if gauge_cone is None:
            raise GaugeConeInvalid("no smooth maximal cone contains the last ray")
    cone = _check_gauge_cone(fan, gauge_cone)
    r = kahler.r
    comp = [j for j in range(fan.m) if j not in cone]
    coeffs = [QPoly.const(r)] * fan.m
    if r:
        G = [[kahler.gamma[a][j] for j in comp] for a in range(r)]
        H, U = lat.hermite_normal_form(G)
        if H == lat.identity(r):
            E = [[Fraction(x) for x in row] for row in U]
        else:
            E = lat.rational_inverse(G)
            assert E is not None, "constraint matrix must be invertible on a smooth gauge cone"
            if any(x.denominator != 1 for row in E for x in row):
                warnings.warn("non-integer q-exponents in mirror coefficients", stacklevel=2)
        for pos, j in enumerate(comp):
            coeffs[j] = QPoly.monomial(E[pos])
    return MirrorFamily(frame, kahler.gamma, tuple(coeffs), cone)


@dataclass(frozen=True)
class ConstraintVerdict:
    exact: tuple[bool, ...]
    numeric_max_rel_error: float


def verify_constraints(
    fam: MirrorFamily, kahler: KahlerData, samples: int = 5, seed: int = 0
) -> ConstraintVerdict:
    """Check ``prod_i C_i^{(gamma_a)_i} = q_a`` formally and at sampled ``q``.

    Raises :class:`ConstraintViolated` with the 1-based index ``a`` of the
    first failing relation.
    """
    exact = []
    for a, ga in enumerate(kahler.gamma):
        prod = QPoly.const(fam.r)
        for c, g in zip(fam.coefficients, ga):
            prod = prod * c**g
        ok = prod == QPoly.gen(fam.r, a)
        exact.append(ok)
        if not ok:
            raise ConstraintViolated(a + 1, f"(got {prod.format()})")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples if fam.r else 0):
        q = rng.uniform(0.01, 0.99, fam.r)
        vals = [c.evaluate(q) for c in fam.coefficients]
        for a, ga in enumerate(kahler.gamma):
            lhs = np.prod([v**g for v, g in zip(vals, ga)])
            err = abs(lhs - q[a]) / abs(q[a])
            worst = max(worst, float(err))
            if err > 1e-12:
                raise ConstraintViolated(a + 1, f"numerically at q={q.tolist()}")
    return ConstraintVerdict(tuple(exact), worst)


@dataclass(frozen=True)
class Relation:
    """``prod_i Z_i^{exponents_i} = rhs`` (a Laurent monomial identity)."""

    exponents: tuple[int, ...]
    rhs: QPoly

    def format(self) -> str:
        names = z_names(len(self.exponents), "Z")
        pos = [max(e, 0) for e in self.exponents]
        neg = [max(-e, 0) for e in self.exponents]
        lhs = "*".join(_factors(names, pos)) or "1"
        rhs_parts = ([] if self.rhs == 1 else [self.rhs.format()]) + _factors(names, neg)
        return f"{lhs} = {'*'.join(rhs_parts) or '1'}"


def _factors(names, exps):
    return [n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e]


@dataclass(frozen=True)
class CmEmbedding:
    substitution: tuple[LaurentPolynomial, ...]  # Z_i = C_i z^{w_i}, i < m
    relations: tuple[Relation, ...]
    substitution_identity: bool
    relations_hold: bool

    @property
    def cm_equation(self) -> str:
        k = len(self.substitution)
        return "u*v = 1" + "".join(f" + {z}" for z in z_names(k, "Z"))


def embed_into_cm_mirror(fam: MirrorFamily) -> CmEmbedding:
    """Embed the family into the mirror of ``C^m``, ``uv = 1 + Z_1 + ... + Z_{m-1}``."""
    r, k = fam.r, fam.k
    subs = tuple(
        LaurentPolynomial.monomial(fam.frame.w[i], fam.coefficients[i]) for i in range(fam.m - 1)
    )
    one = QPoly.const(r)
    image = LaurentPolynomial.constant(k, one)
    for s in subs:
        image = image + s
    substitution_ok = fam.coefficients[-1] == 1 and image == fam.rhs()

    rels, holds = [], True
    for a, ga in enumerate(fam.gamma):
        rhs = one
        for c, g in zip(fam.coefficients, ga):
            rhs = rhs * c**g
        rel = Relation(tuple(ga[: fam.m - 1]), rhs)
        lhs = LaurentPolynomial.constant(k, one)
        for s, g in zip(subs, rel.exponents):
            lhs = lhs * s**g
        holds &= lhs == LaurentPolynomial.constant(k, rhs)
        rels.append(rel)
    return CmEmbedding(subs, tuple(rels), substitution_ok, holds)


@dataclass(frozen=True)
class SmoothnessProbe:
    singular: bool
    witness: CriticalPoint | None
    critical_points: tuple[CriticalPoint, ...]


def hypersurface_smoothness_probe(
    fam: MirrorFamily, q: Sequence[complex], starts: int = 8, seed: int = 0, tol: float = 1e-9
) -> SmoothnessProbe:
    """Search for singular points of ``uv = f(z)``, i.e. critical points of ``f`` with ``f = 0``."""
    f = fam.rhs_numeric(q)
    if fam.k == 0:
        return SmoothnessProbe(False, None, ())
    rep = critical_points(f, starts=starts, tol=tol, seed=seed)
    witness = None
    for p in rep.points:
        scale = max(1.0, max(abs(complex(c)) for c in f.terms.values()))
        if abs(p.value) < tol * scale:
            witness = p
            break
    return SmoothnessProbe(witness is not None, witness, rep.points)


@dataclass(frozen=True)
class LandauGinzburg:
    family: MirrorFamily
    W: LaurentPolynomial  # the coordinate function u on (u, v, z_1, ...)

    @property
    def superpotential(self) -> str:
        return "u"


def landau_ginzburg(fam: MirrorFamily) -> LandauGinzburg:
    W = LaurentPolynomial.variable(fam.k + 2, 0, QPoly.const(fam.r))
    return LandauGinzburg(fam, W)


def gauge_rescaling(fa: MirrorFamily, fb: MirrorFamily) -> tuple[QPoly, ...]:
    """Rescaling ``z_j -> c_j z_j`` taking the equation of ``fa`` to that of ``fb``.

    Both families must share the frame.  Raises ``ValueError`` when no such
    rescaling exists.
    """
    if fa.frame != fb.frame:
        raise ValueError("families have different frames")
    k, r = fa.k, fa.r
    logs = []
    for ca, cb in zip(fa.coefficients, fb.coefficients):
        if not (ca.is_monomial() and cb.is_monomial()):
            raise ValueError("coefficients must be q-monomials")
        ((ea, _),) = ca.terms.items()
        ((eb, _),) = cb.terms.items()
        logs.append([b - a for a, b in zip(ea, eb)])
    # select k rays with independent w_i
    chosen: list[int] = []
    for i, w in enumerate(fa.frame.w):
        if lat.rank([fa.frame.w[j] for j in chosen + [i]]) > len(chosen):
            chosen.append(i)
        if len(chosen) == k:
            break
    A = [fa.frame.w[i] for i in chosen]
    cols = []
    for a in range(r):
        sol = lat.solve_rational(A, [logs[i][a] for i in chosen]) if k else []
        cols.append(sol)
    c = tuple(QPoly.monomial([cols[a][j] for a in range(r)]) for j in range(k))
    scaled = LaurentPolynomial(k)
    for w, ca in zip(fa.frame.w, fa.coefficients):
        factor = QPoly.const(r)
        for cj, wj in zip(c, w):
            factor = factor * cj**wj
        scaled = scaled + LaurentPolynomial.monomial(w, ca * factor)
    if scaled != fb.rhs():
        raise ValueError("no diagonal rescaling relates the two families")
    return c
