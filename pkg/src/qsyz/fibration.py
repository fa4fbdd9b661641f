"""Gross and Harvey-Lawson fibrations, the base embedding and the discriminant.

The base of the Gross fibration is ``B = R^{n-1} x R_{>=0}``.  The first
factor is the moment map of the subtorus complementary to ``u``, realized by
writing ``x`` in the dual adapted basis (``x' = T^{-T} x``, whose last
coordinate pairs with ``u``) and dropping the last coordinate.  The second
factor is the height ``h = |chi^u - eps|``.  The wall sits at ``h = |eps|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import lattice as lat
from .errors import NotOnLevelSet, OutsidePolytope
from .fan import CalabiYauFrame, FanData, KahlerData, MomentPolytope, codim2_faces, interior_point

BOUNDARY, WALL, B_PLUS, B_MINUS = "boundary", "wall", "B+", "B-"


def harvey_lawson(X: Sequence[complex], eps: complex) -> tuple[float, ...]:
    """``(|X_1|^2 - |X_m|^2, ..., |X_{m-1}|^2 - |X_m|^2, |X_1 ... X_m - eps|)``."""
    X = np.asarray(X, dtype=complex)
    sq = np.abs(X) ** 2
    head = sq[:-1] - sq[-1]
    return tuple(float(a) for a in head) + (float(abs(np.prod(X) - eps)),)


def gross_height(X: Sequence[complex], eps: complex) -> float:
    return float(abs(np.prod(np.asarray(X, dtype=complex)) - eps))


def embed_base(x: Sequence, poly: MomentPolytope, h) -> tuple:
    """Embed ``(x, h)`` into the Harvey-Lawson base.

    Exact on rational ``x``.  Points on the boundary of the polytope are
    accepted; points outside raise :class:`OutsidePolytope`.
    """
    ell = poly.ell_over_2pi(x) if all(isinstance(a, (int, Fraction)) for a in x) else poly.ell(x) / (2 * np.pi)
    if min(ell) < 0:
        raise OutsidePolytope(f"ell_i(x) < 0 for i = {[i + 1 for i, e in enumerate(ell) if e < 0]}")
    head = tuple(e - ell[-1] for e in ell[:-1])
    if not isinstance(ell, tuple):
        head = tuple(float(a) for a in head)
    return head + (h,)


def torus_lift(x: Sequence[float], poly: MomentPolytope, phases: Sequence[float]) -> np.ndarray:
    """A point of the standard torus over ``x``: ``|X_i|^2 = ell_i(x) / 2 pi``."""
    r = np.sqrt(np.maximum(poly.ell(np.asarray(x, dtype=float)), 0.0) / (2 * np.pi))
    return r * np.exp(1j * np.asarray(phases, dtype=float))


@dataclass(frozen=True)
class MomentFit:
    x: tuple[float, ...]
    residual: float


def moment_coordinates(
    X: Sequence[complex], fan: FanData, kahler: KahlerData, tol: float = 1e-9
) -> MomentFit:
    """Recover ``x`` from a point of the level set by least squares on ``ell_i(x) = 2 pi |X_i|^2``."""
    V = np.array(fan.rays, dtype=float)
    rhs = np.abs(np.asarray(X, dtype=complex)) ** 2 + np.array([float(l) for l in kahler.lam])
    x, *_ = np.linalg.lstsq(V, rhs, rcond=None)
    res = float(np.linalg.norm(V @ x - rhs))
    if res > tol:
        raise NotOnLevelSet(res)
    return MomentFit(tuple(float(a) for a in x), res)


# --------------------------------------------------------------------------
# Discriminant graph


@dataclass(frozen=True)
class Piece:
    """Projection of a codimension-2 face into the wall slice."""

    pair: tuple[int, int]
    vertices: tuple[tuple[Fraction, ...], ...]
    rays: tuple[tuple[int, ...], ...]
    bounded: bool


@dataclass(frozen=True)
class GrossBase:
    n: int
    eps_abs: Fraction
    pieces: tuple[Piece, ...]

    @property
    def vertices(self) -> list[tuple[Fraction, ...]]:
        return sorted({v for p in self.pieces for v in p.vertices})

    def counts(self) -> dict[str, int]:
        points = sum(1 for p in self.pieces if not p.rays and len(p.vertices) == 1)
        bounded_edges = sum(1 for p in self.pieces if not p.rays and len(p.vertices) == 2)
        rays = sum(1 for p in self.pieces if len(p.rays) == 1 and len(p.vertices) == 1)
        return {
            "vertices": len(self.vertices),
            "points": points,
            "bounded_edges": bounded_edges,
            "unbounded_edges": rays,
            "pieces": len(self.pieces),
        }

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "wall_height": str(self.eps_abs),
            "counts": self.counts(),
            "vertices": [[str(a) for a in v] for v in self.vertices],
            "pieces": [
                {
                    "pair": [i + 1 for i in p.pair],
                    "bounded": p.bounded,
                    "vertices": [[str(a) for a in v] for v in p.vertices],
                    "rays": [list(r) for r in p.rays],
                }
                for p in self.pieces
            ],
        }


def _dual_project(frame: CalabiYauFrame, x: Sequence) -> tuple:
    Tt_inv = lat.transpose(frame.T_inv)
    return tuple(lat.matvec(Tt_inv, list(x))[:-1])


def discriminant_graph(poly: MomentPolytope, frame: CalabiYauFrame, eps_abs) -> GrossBase:
    pieces = []
    for f in codim2_faces(poly):
        verts = tuple(sorted({_dual_project(frame, v) for v in f.vertices}))
        rays = tuple(sorted({tuple(int(a) for a in _dual_project(frame, d)) for d in f.rays}))
        pieces.append(Piece(f.pair, verts, rays, f.bounded))
    return GrossBase(poly.fan.n, Fraction(eps_abs), tuple(pieces))


def classify_base_point(h, eps_abs, tol: float = 1e-12) -> str:
    """Chamber of a base point from its height ``h``; exact for rationals."""
    if isinstance(h, (int, Fraction)) and isinstance(eps_abs, (int, Fraction)):
        tol = 0
    h, e = (h, eps_abs)
    if abs(h) <= tol:
        return BOUNDARY
    if abs(h - e) <= tol:
        return WALL
    return B_PLUS if h > e else B_MINUS


def distance_to_discriminant(b: Sequence[float], base: GrossBase) -> float:
    """Euclidean distance from a wall point ``b`` (first ``n-1`` coordinates) to the discriminant."""
    p = np.asarray(b, dtype=float)[: base.n - 1]
    best = np.inf
    for piece in base.pieces:
        V = np.array(piece.vertices, dtype=float)
        if len(V) == 1 and not piece.rays:
            best = min(best, float(np.linalg.norm(p - V[0])))
        elif len(V) == 2:
            a, c = V
            t = np.clip(np.dot(p - a, c - a) / max(np.dot(c - a, c - a), 1e-300), 0, 1)
            best = min(best, float(np.linalg.norm(p - (a + t * (c - a)))))
        else:
            for d in piece.rays:
                d = np.asarray(d, dtype=float)
                t = max(0.0, float(np.dot(p - V[0], d) / np.dot(d, d)))
                best = min(best, float(np.linalg.norm(p - (V[0] + t * d))))
    return best


# --------------------------------------------------------------------------
# Sampling checks


def random_interior_points(poly: MomentPolytope, count: int, rng: np.random.Generator) -> np.ndarray:
    """Random interior points: an interior point plus bounded random offsets, rejected if outside."""
    x0 = np.array([float(a) for a in interior_point(poly)])
    out = []
    while len(out) < count:
        x = x0 + rng.uniform(-1.5, 1.5, len(x0))
        if np.all(poly.ell(x) > 1e-3):
            out.append(x)
    return np.array(out)


@dataclass(frozen=True)
class QuotientReport:
    samples: int
    max_coordinate_error: float
    chamber_agreements: int
    ok: bool


def chamber_compatibility_check(
    fan: FanData, kahler: KahlerData, eps: float = 1.0, samples: int = 100, seed: int = 0
) -> QuotientReport:
    """Compare Harvey-Lawson images of torus lifts with ``embed_base``.

    Each sample draws an interior ``x`` and random phases.  The upstairs
    height is computed from the lift; downstairs the same height is embedded
    and classified.  A third of the samples are tuned onto the wall.
    """
    poly = MomentPolytope(fan, kahler)
    rng = np.random.default_rng(seed)
    xs = random_interior_points(poly, samples, rng)
    worst, agree = 0.0, 0
    for k, x in enumerate(xs):
        phases = rng.uniform(0, 2 * np.pi, fan.m)
        X = torus_lift(x, poly, phases)
        if k % 3 == 2:
            # rotate the total phase so that |prod X - eps| = |eps|
            P = abs(np.prod(X))
            if 0 < P < 2 * abs(eps):
                target = np.angle(eps) + np.arccos(P / (2 * abs(eps)))
                X[0] *= np.exp(1j * (target - np.angle(np.prod(X))))
        hl = harvey_lawson(X, eps)
        down = embed_base(x, poly, gross_height(X, eps))
        worst = max(worst, float(np.max(np.abs(np.array(hl[:-1]) - np.array(down[:-1])))))
        tol = 1e-12 * max(1.0, abs(eps))
        agree += classify_base_point(hl[-1], abs(eps), tol) == classify_base_point(down[-1], abs(eps), tol)
    return QuotientReport(samples, worst, agree, agree == samples and worst < 1e-12 * max(1.0, _scale(poly, xs)))


def _scale(poly: MomentPolytope, xs: np.ndarray) -> float:
    if not len(xs):
        return 1.0
    return float(max(np.max(np.abs(poly.ell(x))) for x in xs) / (2 * np.pi))
