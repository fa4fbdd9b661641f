"""Quasidisks bounded by standard tori, the superpotential and wall crossing.

Conventions
-----------
* A torus fiber over ``x`` is ``|X_i|^2 = ell_i(x) / 2 pi``.  Disks are
  Blaschke products in each coordinate.
* Areas are measured with ``2 * sum dx_i ^ dy_i``, so that the basic disk
  in direction ``i`` has area ``ell_i(x)``.
* The brane parameter ``b`` pairs with boundary classes through
  ``exp(2 pi i <b, .>)``.  Real ``b`` is a unitary holonomy and the
  imaginary part deforms it; ``W`` is periodic under ``b -> b + Z^n``.
  Critical points are computed in ``y = exp(2 pi i b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import OutsidePolytope, QuadratureUnconverged
from .fan import FanData, KahlerData, MomentPolytope
from .fibration import random_interior_points
from .laurent import LaurentPolynomial, QPoly, q_names, z_names
from .mirror import MirrorFamily
from .newton import CriticalPointReport, critical_points

__all__ = [
    "BlaschkeDisk",
    "blaschke_disk",
    "random_disk",
    "evaluate_disk",
    "maslov_index",
    "disk_area_numeric",
    "boundary_class",
    "Superpotential",
    "superpotential",
    "superpotential_gradient",
    "mirror_rewrite",
    "CentralChargeExpr",
    "central_charge",
    "WallCrossingVerdict",
    "wall_crossing_check",
    "critical_points",
    "displaceability_report",
    "disk_batch",
]


@dataclass(frozen=True)
class BlaschkeDisk:
    x: tuple[float, ...]
    radii: tuple[float, ...]
    degrees: tuple[int, ...]
    alphas: tuple[tuple[complex, ...], ...]
    phases: tuple[complex, ...]

    def __post_init__(self):
        if any(d < 0 for d in self.degrees):
            raise ValueError("degrees must be nonnegative")
        if any(len(a) != d for a, d in zip(self.alphas, self.degrees)):
            raise ValueError("need d_i centers for factor i")
        if any(abs(a) >= 1 for al in self.alphas for a in al):
            raise ValueError("Blaschke centers must lie in the open unit disk")


def _radii(poly: MomentPolytope, x) -> np.ndarray:
    ell = poly.ell(np.asarray(x, dtype=float))
    if np.any(ell <= 0):
        raise OutsidePolytope(f"x = {list(x)} is not in the interior of the moment polytope")
    return np.sqrt(ell / (2 * np.pi))


def blaschke_disk(poly: MomentPolytope, x, degrees, alphas=None, phases=None) -> BlaschkeDisk:
    m = poly.fan.m
    degrees = tuple(int(d) for d in degrees)
    if alphas is None:
        alphas = [[0j] * d for d in degrees]
    if phases is None:
        phases = [1 + 0j] * m
    return BlaschkeDisk(
        tuple(float(a) for a in x),
        tuple(float(r) for r in _radii(poly, x)),
        degrees,
        tuple(tuple(complex(a) for a in al) for al in alphas),
        tuple(complex(p) / abs(complex(p)) for p in phases),
    )


def random_disk(
    poly: MomentPolytope, x, degrees, rng: np.random.Generator, max_alpha: float = 0.7
) -> BlaschkeDisk:
    alphas = [
        max_alpha * np.sqrt(rng.uniform(0, 1, d)) * np.exp(2j * np.pi * rng.uniform(0, 1, d))
        for d in degrees
    ]
    phases = np.exp(2j * np.pi * rng.uniform(0, 1, poly.fan.m))
    return blaschke_disk(poly, x, degrees, alphas, phases)


def _factor(al: Sequence[complex], z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Blaschke product and its derivative for one coordinate."""
    B = np.ones_like(z)
    dB = np.zeros_like(z)
    for a in al:
        b = (z - a) / (1 - np.conj(a) * z)
        db = (1 - abs(a) ** 2) / (1 - np.conj(a) * z) ** 2
        dB = dB * b + B * db
        B = B * b
    return B, dB


def evaluate_disk(disk: BlaschkeDisk, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1 + 1e-15):
        raise ValueError("|z| must be at most 1")
    out = [r * p * _factor(al, z)[0] for r, p, al in zip(disk.radii, disk.phases, disk.alphas)]
    return np.stack(out, axis=-1)


def maslov_index(disk: BlaschkeDisk) -> int:
    return 2 * sum(disk.degrees)


def boundary_class(disk: BlaschkeDisk, fan: FanData) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Class in ``H_1`` of the lifted torus and its image ``sum_i d_i v_i``."""
    d = disk.degrees
    image = tuple(sum(di * v[j] for di, v in zip(d, fan.rays)) for j in range(fan.n))
    return d, image


def _area_at_order(disk: BlaschkeDisk, N: int) -> float:
    rho, wr = np.polynomial.legendre.leggauss(N)
    rho, wr = (rho + 1) / 2, wr / 2
    M = 2 * N
    theta = 2 * np.pi * np.arange(M) / M
    Z = rho[:, None] * np.exp(1j * theta)[None, :]
    density = np.zeros(Z.shape)
    for r, al in zip(disk.radii, disk.alphas):
        if al:
            density += r**2 * np.abs(_factor(al, Z)[1]) ** 2
    inner = density.sum(axis=1) * (2 * np.pi / M)
    return 2.0 * float(np.dot(wr, inner * rho))


def disk_area_numeric(disk: BlaschkeDisk, order: int = 16, max_order: int = 1024, rtol: float = 1e-6) -> float:
    """Area by polar quadrature, doubling the order until it stabilizes."""
    if order < 16:
        raise ValueError("quadrature order must be at least 16")
    if not any(disk.degrees):
        return 0.0
    prev = _area_at_order(disk, order)
    N = order
    while N < max_order:
        N *= 2
        cur = _area_at_order(disk, N)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    raise QuadratureUnconverged(f"quadrature did not stabilize by order {max_order}")


def disk_area_closed_form(disk: BlaschkeDisk) -> float:
    return float(sum(d * 2 * np.pi * r**2 for d, r in zip(disk.degrees, disk.radii)))


@dataclass(frozen=True)
class DiskRecord:
    degrees: tuple[int, ...]
    area: float
    expected_area: float
    rel_error: float
    maslov: int


def disk_batch(
    fan: FanData, kahler: KahlerData, samples: int = 100, seed: int = 0, max_total_degree: int = 3
) -> list[DiskRecord]:
    """Random disks over random interior fibers, with quadrature vs closed-form area."""
    poly = MomentPolytope(fan, kahler)
    rng = np.random.default_rng(seed)
    xs = random_interior_points(poly, samples, rng)
    out = []
    for x in xs:
        total = int(rng.integers(1, max_total_degree + 1))
        d = np.zeros(fan.m, dtype=int)
        for i in rng.integers(0, fan.m, total):
            d[i] += 1
        disk = random_disk(poly, x, d, rng)
        area = disk_area_numeric(disk)
        expected = float(np.dot(d, poly.ell(x)))
        out.append(DiskRecord(disk.degrees, area, expected, abs(area - expected) / expected, maslov_index(disk)))
    return out


# --------------------------------------------------------------------------
# Superpotential


@dataclass(frozen=True)
class Superpotential:
    """``W(y) = sum_i exp(-ell_i(x)) y^{v_i}`` with ``y = exp(2 pi i b)``."""

    x: tuple[float, ...]
    ell: tuple[float, ...]
    W: LaurentPolynomial
    value: complex | None = None

    def __call__(self, b) -> complex:
        return self.W.evaluate(np.exp(2j * np.pi * np.asarray(b, dtype=complex)))


def superpotential(x, fan: FanData, kahler: KahlerData, b=None) -> Superpotential:
    poly = MomentPolytope(fan, kahler)
    ell = poly.ell(np.asarray(x, dtype=float))
    if np.any(ell <= 0):
        raise OutsidePolytope(f"x = {list(x)} is not in the interior of the moment polytope")
    W = LaurentPolynomial(fan.n)
    for v, e in zip(fan.rays, ell):
        W = W + LaurentPolynomial.monomial(v, complex(np.exp(-e)))
    sp = Superpotential(tuple(float(a) for a in x), tuple(float(e) for e in ell), W)
    if b is not None:
        sp = Superpotential(sp.x, sp.ell, W, sp(b))
    return sp


def superpotential_gradient(sp: Superpotential, b) -> np.ndarray:
    """``dW/db_j = sum_i 2 pi i (v_i)_j exp(2 pi i <b, v_i> - ell_i)``."""
    b = np.asarray(b, dtype=complex)
    E = np.array(list(sp.W.terms), dtype=float)
    C = np.array(list(sp.W.terms.values()), dtype=complex)
    t = C * np.exp(2j * np.pi * (E @ b))
    return 2j * np.pi * (t @ E)


@dataclass(frozen=True)
class MirrorRewrite:
    v: complex
    z: tuple[complex, ...]
    max_rel_error: float
    total_rel_error: float


def mirror_rewrite(sp: Superpotential, fam: MirrorFamily, fan: FanData, kahler: KahlerData, b) -> MirrorRewrite:
    """Find ``(v, z)`` with each term of ``W(b)`` equal to ``C_i v^{-1} z^{w_i}``.

    The log of each term is affine in ``b``; the system in ``(log z, -log v)``
    has rows ``(w_i, 1)``, and consistency is exactly the coefficient
    constraints at ``q = kahler.q_values``.
    """
    b = np.asarray(b, dtype=complex)
    q = kahler.q_values
    logs = np.array(
        [2j * np.pi * np.dot(b, v) - e for v, e in zip(fan.rays, sp.ell)], dtype=complex
    )
    logC = np.array([np.log(c.evaluate(q)).real for c in fam.coefficients])
    A = np.array([list(w) + [1] for w in fam.frame.w], dtype=float)
    s, *_ = np.linalg.lstsq(A, logs - logC, rcond=None)
    z = np.exp(s[:-1])
    v = np.exp(-s[-1])
    terms = np.exp(logs)
    rebuilt = np.array([c.evaluate(q) / v * np.prod(z ** np.array(w)) for c, w in zip(fam.coefficients, fam.frame.w)])
    rel = float(np.max(np.abs(rebuilt - terms) / np.abs(terms)))
    f = fam.rhs_numeric(q).evaluate(z)
    total = abs(v * terms.sum() - f) / max(abs(f), 1e-300)
    return MirrorRewrite(complex(v), tuple(complex(a) for a in z), rel, float(total))


# --------------------------------------------------------------------------
# Central charge and wall crossing


@dataclass(frozen=True)
class CentralChargeExpr:
    chamber: str
    expression: LaurentPolynomial  # in (u, v, z_1, ..., z_k)

    def format(self) -> str:
        k = self.expression.nvars - 2
        if self.chamber == "B-":
            return "u"
        f = self.expression * LaurentPolynomial.variable(k + 2, 1, _one_like(self.expression))
        r = _qrank(self.expression)
        inner = f.format(["u", "v"] + z_names(k), q_names(r))
        return f"v^-1*({inner})"


def _one_like(p: LaurentPolynomial):
    c = next(iter(p.terms.values()))
    return QPoly.const(c.r) if isinstance(c, QPoly) else 1


def _qrank(p: LaurentPolynomial) -> int:
    c = next(iter(p.terms.values()))
    return c.r if isinstance(c, QPoly) else 0


def central_charge(chamber: str, fam: MirrorFamily) -> CentralChargeExpr:
    k, one = fam.k, QPoly.const(fam.r)
    if chamber == "B-":
        return CentralChargeExpr("B-", LaurentPolynomial.variable(k + 2, 0, one))
    if chamber != "B+":
        raise ValueError("chamber must be 'B+' or 'B-'")
    vinv = LaurentPolynomial.monomial([0, -1] + [0] * k, one)
    return CentralChargeExpr("B+", vinv * fam.rhs().embed(k + 2, range(2, k + 2)))


Gluing = Callable[[complex, np.ndarray, complex], complex]


def standard_gluing(v: complex, z: np.ndarray, f: complex) -> complex:
    return f / v


@dataclass(frozen=True)
class WallCrossingVerdict:
    symbolic: bool
    numeric: bool
    chart_cover: bool
    numeric_max_rel_error: float
    samples: int

    @property
    def ok(self) -> bool:
        return self.symbolic and self.numeric and self.chart_cover

    @property
    def failed(self) -> str | None:
        for tag, ok in (("a", self.symbolic), ("b", self.numeric), ("c", self.chart_cover)):
            if not ok:
                return tag
        return None


def _random_torus(rng, k, count):
    mag = np.exp(rng.uniform(np.log(0.5), np.log(2.0), (count, k)))
    return mag * np.exp(2j * np.pi * rng.uniform(0, 1, (count, k)))


def _zero_of_f(f: LaurentPolynomial, zrest: np.ndarray) -> np.ndarray | None:
    """A point on ``f = 0`` with ``z_2..z_k`` fixed, by solving in ``z_1``."""
    exps = f.exponents()
    lo = min(e[0] for e in exps)
    hi = max(e[0] for e in exps)
    if hi == lo:
        return None
    coeffs = np.zeros(hi - lo + 1, dtype=complex)
    for e, c in f.terms.items():
        coeffs[e[0] - lo] += complex(c) * np.prod(zrest ** np.array(e[1:], dtype=float))
    roots = np.roots(coeffs[::-1])
    roots = roots[np.abs(roots) > 1e-8]
    if not len(roots):
        return None
    return np.concatenate([[roots[0]], zrest])


def wall_crossing_check(
    fam: MirrorFamily,
    q: Sequence[float],
    samples: int = 200,
    seed: int = 0,
    tol: float = 1e-12,
    gluing: Gluing = standard_gluing,
) -> WallCrossingVerdict:
    """Check that the chamber charts glue to the mirror ``uv = f(z)``.

    (a) the substitution ``u = v^{-1} f`` makes ``uv - f`` vanish formally and
    identifies the two central charges; (b) numerically, the gluing map lands
    on the hypersurface; (c) hypersurface points are reached by exactly the
    charts with ``v != 0`` (the ``B+`` chart) or ``u != 0`` (the ``B-`` chart).
    """
    k = fam.k
    one = QPoly.const(fam.r)
    P = fam.defining_polynomial()
    vinv_f = central_charge("B+", fam).expression
    glued = P.substitute(0, vinv_f)
    zminus = central_charge("B-", fam).expression.substitute(0, vinv_f)
    symbolic = glued.is_zero() and zminus == vinv_f

    rng = np.random.default_rng(seed)
    f = fam.rhs_numeric(q)
    worst = 0.0
    Z = _random_torus(rng, k, samples)
    V = _random_torus(rng, 1, samples)[:, 0]
    for z, v in zip(Z, V):
        fz = f.evaluate(z)
        u = gluing(v, z, fz)
        err = abs(u * v - fz) / max(abs(fz), abs(u * v), 1e-300)
        worst = max(worst, float(err))
    numeric = worst < tol

    def charts(u, v, z):
        fz = f.evaluate(z)
        scale = max(1.0, abs(fz))
        hit = set()
        if abs(v) > tol and abs(u - fz / v) <= tol * scale / min(1.0, abs(v)):
            hit.add("B+")
        if abs(u) > tol and abs(v - fz / u) <= tol * scale / min(1.0, abs(u)):
            hit.add("B-")
        return hit

    cover = True
    for s in range(samples):
        kind = s % 4
        z = Z[s]
        if kind == 0:
            v = V[s]
            pt, expect = (gluing(v, z, f.evaluate(z)), v, z), {"B+", "B-"}
        else:
            z0 = _zero_of_f(f, z[1:]) if k else None
            if z0 is None:
                continue
            if kind == 1:
                pt, expect = (0j, V[s], z0), {"B+"}
            elif kind == 2:
                pt, expect = (V[s], 0j, z0), {"B-"}
            else:
                pt, expect = (0j, 0j, z0), set()
        cover &= charts(*pt) == expect
    return WallCrossingVerdict(bool(symbolic), bool(numeric), bool(cover), worst, samples)


# --------------------------------------------------------------------------
# Displaceability


@dataclass(frozen=True)
class FiberVerdict:
    x: tuple[float, ...]
    verdict: str  # "obstructed" or "inconclusive"
    critical_points: int


def displaceability_report(
    fan: FanData,
    kahler: KahlerData,
    xs: Sequence[Sequence[float]],
    starts: int = 8,
    seed: int = 0,
    tol: float = 1e-9,
) -> list[FiberVerdict]:
    """Critical points of ``W`` in the ``y`` variables, fiber by fiber."""
    out = []
    for x in xs:
        sp = superpotential(x, fan, kahler)
        rep: CriticalPointReport = critical_points(sp.W, starts=starts, tol=tol, seed=seed)
        verdict = "obstructed" if rep.points else "inconclusive"
        out.append(FiberVerdict(tuple(float(a) for a in x), verdict, len(rep.points)))
    return out
