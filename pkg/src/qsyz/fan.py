"""Toric Calabi-Yau input data: fans, Calabi-Yau frames, Kähler data, polytopes.

Conventions
-----------
Ray indices are 0-based in the library and 1-based in files and reports.

The moment polytope is ``Delta = {x : <x, v_i> >= lambda_i}``, so that
``ell_i(x) = 2 pi (<x, v_i> - lambda_i) >= 0``.  Exact results keep the
factor ``2 pi`` symbolic: :func:`support_values` on rational input returns
``ell_i / 2 pi`` as :class:`~fractions.Fraction`.

The symplectic area of the curve class ``gamma_a`` is
``-2 pi sum_i lambda_i (gamma_a)_i`` and the Kähler parameter is
``q_a = exp(-area) = exp(2 pi sum_i lambda_i (gamma_a)_i)``.  For
``K_P1`` with ``lambda = (0, 0, c)``, the zero section is the edge
``ell_3 = 0`` of lattice length ``2c`` and area ``4 pi c``, so
``q = exp(-4 pi c)`` lies in ``(0, 1)`` exactly when the curve has positive
area.  Likewise ``K_P2`` with ``lambda = (0, 0, 0, c)`` gives
``q = exp(-6 pi c)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Sequence

import numpy as np

from . import lattice as lat
from .errors import (
    AmbiguousU,
    EmptyInterior,
    NotCalabiYau,
    SingularCone,
    ValidationError,
)


@dataclass(frozen=True)
class FanData:
    """Simplicial fan: rank ``n``, ray generators and maximal cones (0-based)."""

    n: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(a) for a in v) for v in self.rays))
        object.__setattr__(
            self, "max_cones", tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones)
        )
        if self.n < 1:
            raise ValidationError("lattice rank must be positive", "rank")
        if not self.rays:
            raise ValidationError("no rays given", "rays")
        for k, v in enumerate(self.rays):
            if len(v) != self.n:
                raise ValidationError(f"ray {k + 1} has length {len(v)}, expected {self.n}", "rays")
            if gcd(*v) != 1:
                raise ValidationError(f"ray {k + 1} = {v} is not primitive", "primitivity")
        if len(set(self.rays)) != len(self.rays):
            raise ValidationError("rays are not pairwise distinct", "distinct-rays")
        if not self.max_cones:
            raise ValidationError("no maximal cones given", "cones")
        for c in self.max_cones:
            if len(c) != self.n or len(set(c)) != self.n:
                raise ValidationError(f"cone {_one_based(c)} must have exactly {self.n} rays", "simplicial")
            if any(i < 0 or i >= self.m for i in c):
                raise ValidationError(f"cone {_one_based(c)} has an index out of range", "cones")
        if len(set(self.max_cones)) != len(self.max_cones):
            raise ValidationError("duplicate maximal cones", "cones")
        used = {i for c in self.max_cones for i in c}
        missing = [i + 1 for i in range(self.m) if i not in used]
        if missing:
            raise ValidationError(f"rays {missing} lie in no maximal cone", "cones")

    @property
    def m(self) -> int:
        return len(self.rays)

    @property
    def r(self) -> int:
        return self.m - self.n

    def ray_matrix(self) -> list[list[int]]:
        """``n x m`` matrix whose columns are the rays."""
        return lat.transpose(self.rays)

    def cone_matrix(self, cone: Sequence[int]) -> list[list[int]]:
        return lat.transpose([self.rays[i] for i in cone])


def _one_based(idx):
    return [i + 1 for i in idx]


@dataclass(frozen=True)
class CalabiYauFrame:
    """CY covector ``u`` and adapted basis ``T`` with ``T v_i = (w_i, 1)``."""

    u: tuple[int, ...]
    T: tuple[tuple[int, ...], ...]
    w: tuple[tuple[int, ...], ...]

    @property
    def T_inv(self) -> list[list[int]]:
        return lat.unimodular_inverse(self.T)


@dataclass(frozen=True)
class KahlerData:
    """Facet constants, relation-lattice basis and Kähler parameters.

    ``q`` holds numeric overrides; when absent, :attr:`q_values` derives
    ``q_a = exp(2 pi sum_i lambda_i (gamma_a)_i)``.
    """

    lam: tuple[Fraction, ...]
    gamma: tuple[tuple[int, ...], ...]
    q: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(Fraction(x) for x in self.lam))
        object.__setattr__(self, "gamma", tuple(tuple(int(a) for a in g) for g in self.gamma))
        if self.q is not None:
            object.__setattr__(self, "q", tuple(float(x) for x in self.q))
            if len(self.q) != len(self.gamma):
                raise ValidationError(
                    f"{len(self.q)} q overrides given for {len(self.gamma)} curve classes", "kahler"
                )

    @property
    def r(self) -> int:
        return len(self.gamma)

    def area_over_2pi(self) -> tuple[Fraction, ...]:
        """Exact symplectic areas of the ``gamma_a`` divided by ``2 pi``."""
        return tuple(-sum(l * g for l, g in zip(self.lam, ga)) for ga in self.gamma)

    @property
    def q_values(self) -> tuple[float, ...]:
        if self.q is not None:
            return self.q
        return tuple(math.exp(-2 * math.pi * float(a)) for a in self.area_over_2pi())


def kahler_data(fan: FanData, lam: Sequence, q: Sequence[float] | None = None) -> KahlerData:
    if len(lam) != fan.m:
        raise ValidationError(f"lambda has {len(lam)} entries, expected {fan.m}", "kahler")
    return KahlerData(tuple(Fraction(x) for x in lam), tuple(map(tuple, relation_lattice(fan))), q)


# --------------------------------------------------------------------------
# Calabi-Yau condition and adapted basis


def calabi_yau_vector(fan: FanData, gauge_cone: Sequence[int] | None = None) -> CalabiYauFrame:
    """Solve ``<u, v_i> = 1`` over the integers and build the adapted frame.

    The frame is normalized on ``gauge_cone`` (default: the first smooth
    maximal cone containing the last ray) so that its rays other than
    ``v_m`` map to ``(e_k, 1)``.
    """
    R = [list(v) for v in fan.rays]  # m x n
    U, D, V = lat.smith_normal_form(R)
    c = lat.matvec(U, [1] * fan.m)
    k = sum(1 for i in range(min(fan.m, fan.n)) if D[i][i])
    if any(c[i] for i in range(k, fan.m)):
        raise NotCalabiYau("no covector u with <u, v_i> = 1 for all rays")
    if any(c[i] % D[i][i] for i in range(k)):
        raise NotCalabiYau("<u, v_i> = 1 has rational but no integer solutions")
    y = [c[i] // D[i][i] for i in range(k)] + [0] * (fan.n - k)
    u = tuple(lat.matvec(V, y))
    if k < fan.n:
        dirs = [tuple(V[i][j] for i in range(fan.n)) for j in range(k, fan.n)]
        raise AmbiguousU(u, dirs)
    if gauge_cone is None:
        gauge_cone = default_gauge_cone(fan)
    T, w = adapted_basis(fan, u, gauge_cone)
    return CalabiYauFrame(u, tuple(map(tuple, T)), tuple(map(tuple, w)))


def default_gauge_cone(fan: FanData) -> tuple[int, ...] | None:
    last = fan.m - 1
    for c in fan.max_cones:
        if last in c and abs(lat.det(fan.cone_matrix(c))) == 1:
            return c
    return None


def adapted_basis(
    fan: FanData, u: Sequence[int], cone: Sequence[int] | None = None
) -> tuple[list[list[int]], list[tuple[int, ...]]]:
    """Unimodular ``T`` with last row ``u`` and ``T v_m = (0, ..., 0, 1)``.

    With ``cone`` (a smooth cone containing the last ray) the other rays of
    the cone are sent to ``(e_k, 1)``.  Without it, ``u`` is completed to a
    basis (the identity when ``u = e_n``) and a shear enforces ``w_m = 0``.
    """
    n, last = fan.n, fan.m - 1
    u = list(u)
    if cone is not None:
        if last not in cone:
            raise ValidationError("frame cone must contain the last ray", "gauge-cone")
        order = [i for i in sorted(cone) if i != last] + [last]
        B = fan.cone_matrix(order)
        E = [[0] * n for _ in range(n)]
        for k in range(n - 1):
            E[k][k] = 1
        E[n - 1] = [1] * n
        T = lat.matmul(E, lat.unimodular_inverse(B))
    else:
        if u == [0] * (n - 1) + [1]:
            T0 = lat.identity(n)
        else:
            _, Uh = lat.hermite_normal_form([[a] for a in u])
            rows = lat.transpose(lat.unimodular_inverse(Uh))
            T0 = rows[1:] + rows[:1]
        wm = lat.matvec(T0, fan.rays[last])[: n - 1]
        S = lat.identity(n)
        for k in range(n - 1):
            S[k][n - 1] = -wm[k]
        T = lat.matmul(S, T0)
    T = [[int(a) for a in row] for row in T]
    assert T[n - 1] == u, "last row of the adapted basis must be u"
    w = []
    for v in fan.rays:
        tv = lat.matvec(T, v)
        assert tv[-1] == 1
        w.append(tuple(tv[:-1]))
    assert all(a == 0 for a in w[last])
    return T, w


# --------------------------------------------------------------------------
# Smoothness and semi-projectivity


@dataclass(frozen=True)
class SmoothnessReport:
    determinants: tuple[int, ...]
    offending: tuple[tuple[int, ...], ...]

    @property
    def smooth(self) -> bool:
        return not self.offending


def is_smooth(fan: FanData) -> SmoothnessReport:
    dets = tuple(lat.det(fan.cone_matrix(c)) for c in fan.max_cones)
    bad = tuple(c for c, d in zip(fan.max_cones, dets) if abs(d) != 1)
    return SmoothnessReport(dets, bad)


def _dual_rows(fan: FanData, cone):
    """Rows ``f_k`` with ``<f_k, v_{cone[l]}> = delta_kl``."""
    return lat.unimodular_inverse(fan.cone_matrix(cone))


def _walls(fan: FanData):
    """Pairs of maximal cones sharing a facet, with the facet."""
    out = []
    for a, b in combinations(range(len(fan.max_cones)), 2):
        shared = set(fan.max_cones[a]) & set(fan.max_cones[b])
        if len(shared) == fan.n - 1:
            out.append((a, b, tuple(sorted(shared))))
    return out


def support_is_convex(fan: FanData) -> tuple[bool, str]:
    """Convexity of ``|Sigma|`` for a smooth fan.

    The support is convex iff the cone adjacency graph is connected and every
    boundary facet hyperplane has all rays on the side of its cone.
    """
    cones = fan.max_cones
    walls = _walls(fan)
    seen, stack = {0}, [0]
    adj = {i: set() for i in range(len(cones))}
    for a, b, _ in walls:
        adj[a].add(b)
        adj[b].add(a)
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    if len(seen) != len(cones):
        return False, "maximal cones are not connected through shared facets"
    for c in cones:
        F = _dual_rows(fan, c)
        for k, drop in enumerate(c):
            facet = set(c) - {drop}
            if sum(1 for other in cones if facet <= set(other)) > 1:
                continue
            for j, v in enumerate(fan.rays):
                if sum(a * b for a, b in zip(F[k], v)) < 0:
                    return False, (
                        f"ray {j + 1} lies beyond boundary facet {_one_based(sorted(facet))} "
                        f"of cone {_one_based(c)}"
                    )
    return True, ""


def _convexity_rows(fan: FanData, cones_and_rays):
    """Strict inequalities ``<m_sigma, v_j> - lambda_j > 0`` as LP rows in lambda."""
    rows = []
    for ci, j in cones_and_rays:
        c = fan.max_cones[ci]
        F = _dual_rows(fan, c)
        coeffs = [Fraction(0)] * fan.m
        coeffs[j] -= 1
        for k, i in enumerate(c):
            coeffs[i] += sum(a * b for a, b in zip(F[k], fan.rays[j]))
        rows.append(coeffs)
    return rows


def strict_convexity_constraints(fan: FanData) -> list[lat.Constraint]:
    """All conditions ``<m_sigma, v_j> > lambda_j`` for ``j`` outside ``sigma``.

    ``m_sigma`` is the vertex with ``<m_sigma, v_i> = lambda_i`` on ``sigma``;
    the conditions say each vertex lies strictly inside the other facets.
    """
    pairs = [(ci, j) for ci, c in enumerate(fan.max_cones) for j in range(fan.m) if j not in c]
    return [lat.Constraint(tuple(r), Fraction(0), ">") for r in _convexity_rows(fan, pairs)]


@dataclass(frozen=True)
class SemiprojectivityCertificate:
    ok: bool
    lam: tuple[Fraction, ...] | None = None
    certificate: tuple[Fraction, ...] | None = None
    reason: str = ""


def certify_semiprojective(fan: FanData) -> SemiprojectivityCertificate:
    """Exact witness ``lambda`` of a strictly convex support function.

    The LP is run on the wall-crossing conditions only (one per pair of
    adjacent cones) with ``lambda`` gauged to vanish on the first cone; the
    returned ``lambda`` is then re-checked against every condition.
    """
    sm = is_smooth(fan)
    if not sm.smooth:
        raise SingularCone([_one_based(c) for c in sm.offending])
    ok, reason = support_is_convex(fan)
    if not ok:
        return SemiprojectivityCertificate(False, reason=reason)
    full = strict_convexity_constraints(fan)
    pairs = []
    for a, b, facet in _walls(fan):
        (ja,) = set(fan.max_cones[b]) - set(facet)
        (jb,) = set(fan.max_cones[a]) - set(facet)
        pairs += [(a, ja), (b, jb)]
    fixed = set(fan.max_cones[0])
    free = [j for j in range(fan.m) if j not in fixed]
    rows = _convexity_rows(fan, pairs)
    res = lat.lp_feasible_strict([([r[j] for j in free], 0) for r in rows], len(free))
    if not res.feasible:
        return SemiprojectivityCertificate(False, certificate=res.certificate, reason="no strictly convex support function")
    lam = [Fraction(0)] * fan.m
    for j, val in zip(free, res.point):
        lam[j] = val
    if not lat.check_point(full, lam):
        res = lat.lp_feasible(full, fan.m)
        if not res.feasible:
            return SemiprojectivityCertificate(False, certificate=res.certificate, reason="no strictly convex support function")
        lam = list(res.point)
    return SemiprojectivityCertificate(True, tuple(lam))


def relation_lattice(fan: FanData) -> list[list[int]]:
    """Hermite-canonical basis of ``ker(Z^m -> N, e_i -> v_i)``."""
    return lat.kernel_basis(fan.ray_matrix())


# --------------------------------------------------------------------------
# Moment polytope


@dataclass(frozen=True)
class Face:
    pair: tuple[int, int]
    witness: tuple[Fraction, ...]
    bounded: bool
    vertices: tuple[tuple[Fraction, ...], ...] = field(default=())
    rays: tuple[tuple[int, ...], ...] = field(default=())


@dataclass(frozen=True)
class MomentPolytope:
    fan: FanData
    kahler: KahlerData

    def constraints(self) -> list[lat.Constraint]:
        return [lat.Constraint(v, lam, ">=") for v, lam in zip(self.fan.rays, self.kahler.lam)]

    def ell_over_2pi(self, x: Sequence) -> tuple[Fraction, ...]:
        x = [Fraction(a) for a in x]
        return tuple(sum(a * b for a, b in zip(x, v)) - lam for v, lam in zip(self.fan.rays, self.kahler.lam))

    def ell(self, x: Sequence[float]) -> np.ndarray:
        V = np.array(self.fan.rays, dtype=float)
        lam = np.array([float(l) for l in self.kahler.lam])
        return 2 * np.pi * (V @ np.asarray(x, dtype=float) - lam)


def _is_exact(x) -> bool:
    return all(isinstance(a, (int, Fraction)) for a in x)


def support_values(poly: MomentPolytope, x: Sequence):
    """Facet values ``ell_i(x)``.

    Rational input gives exact ``ell_i / 2 pi`` as Fractions; float input
    gives the numeric ``ell_i`` as an array.
    """
    if _is_exact(x):
        return poly.ell_over_2pi(x)
    return poly.ell(x)


def interior_point(poly: MomentPolytope) -> tuple[Fraction, ...]:
    cons = [lat.Constraint(v, lam, ">") for v, lam in zip(poly.fan.rays, poly.kahler.lam)]
    res = lat.lp_feasible(cons, poly.fan.n)
    if not res.feasible:
        raise EmptyInterior(res.certificate)
    return res.point


def _face_constraints(poly: MomentPolytope, pair) -> list[lat.Constraint]:
    return [
        lat.Constraint(v, lam, "=" if k in pair else ">=")
        for k, (v, lam) in enumerate(zip(poly.fan.rays, poly.kahler.lam))
    ]


def _is_bounded(poly: MomentPolytope, pair) -> bool:
    n = poly.fan.n
    rec = [
        lat.Constraint(v, 0, "=" if k in pair else ">=")
        for k, v in enumerate(poly.fan.rays)
    ]
    for k in range(n):
        for s in (1, -1):
            e = [0] * n
            e[k] = s
            if lat.lp_feasible(rec + [lat.Constraint(tuple(e), 1, ">=")], n).feasible:
                return False
    return True


def face_vrep(poly: MomentPolytope, pair) -> tuple[list[tuple[Fraction, ...]], list[tuple[int, ...]]]:
    """Vertices and extreme rays of ``{ell_i = ell_j = 0} cap Delta``."""
    n, rays, lam = poly.fan.n, poly.fan.rays, poly.kahler.lam
    cons = _face_constraints(poly, pair)
    others = [k for k in range(poly.fan.m) if k not in pair]
    verts = []
    for extra in combinations(others, n - 2):
        idx = list(pair) + list(extra)
        x = lat.solve_rational([rays[k] for k in idx], [lam[k] for k in idx])
        if x is not None and lat.check_point(cons, x) and tuple(x) not in verts:
            verts.append(tuple(x))
    dirs = []
    if n >= 3:
        for extra in combinations(others, n - 3):
            idx = list(pair) + list(extra)
            ker = lat.kernel_basis([list(rays[k]) for k in idx])
            if len(ker) != 1:
                continue
            for s in (1, -1):
                d = tuple(s * a for a in ker[0])
                if all(sum(a * b for a, b in zip(d, v)) >= 0 for v in rays) and d not in dirs:
                    dirs.append(d)
    return sorted(verts), sorted(dirs)


def codim2_faces(poly: MomentPolytope) -> list[Face]:
    """Nonempty faces ``F_ij``, each with an exact witness and boundedness flag."""
    faces = []
    for pair in combinations(range(poly.fan.m), 2):
        res = lat.lp_feasible(_face_constraints(poly, pair), poly.fan.n)
        if not res.feasible:
            continue
        verts, dirs = face_vrep(poly, pair)
        faces.append(Face(pair, res.point, _is_bounded(poly, pair), tuple(verts), tuple(dirs)))
    return faces
