"""Exact integer and rational linear algebra.

Matrices are plain nested lists of Python ints (row-major), so every
operation here is exact and arbitrary precision.  The routines cover what
the toric layer needs: Smith and Hermite normal forms, integer kernels,
unimodular inverses, and a small exact LP feasibility solver based on
Fourier-Motzkin elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import NamedTuple, Sequence

IntMatrix = list[list[int]]


class SmithDecomposition(NamedTuple):
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix


def as_matrix(A: Sequence[Sequence[int]]) -> IntMatrix:
    rows = [[int(a) for a in row] for row in A]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def shape(A: Sequence[Sequence]) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], x: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def det(A: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    M = as_matrix(A)
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank(A: Sequence[Sequence]) -> int:
    M = [[Fraction(a) for a in row] for row in A]
    rows, cols = shape(M)
    r = 0
    for j in range(cols):
        piv = next((i for i in range(r, rows) if M[i][j] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, rows):
            f = M[i][j] / M[r][j]
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def solve_rational(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Unique solution of a square nonsingular system, else ``None``."""
    n = len(A)
    M = [[Fraction(a) for a in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for j in range(n):
        piv = next((i for i in range(j, n) if M[i][j] != 0), None)
        if piv is None:
            return None
        M[j], M[piv] = M[piv], M[j]
        p = M[j][j]
        M[j] = [a / p for a in M[j]]
        for i in range(n):
            if i != j and M[i][j] != 0:
                f = M[i][j]
                M[i] = [a - f * c for a, c in zip(M[i], M[j])]
    return [M[i][n] for i in range(n)]


def rational_inverse(A: Sequence[Sequence]) -> list[list[Fraction]] | None:
    n = len(A)
    cols = []
    for j in range(n):
        x = solve_rational(A, [int(i == j) for i in range(n)])
        if x is None:
            return None
        cols.append(x)
    return transpose(cols)


def unimodular_inverse(A: Sequence[Sequence[int]]) -> IntMatrix:
    inv = rational_inverse(A)
    if inv is None or any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


def _swap_rows(M, i, j):
    M[i], M[j] = M[j], M[i]


def _swap_cols(M, i, j):
    for row in M:
        row[i], row[j] = row[j], row[i]


def _add_row(M, dst, src, f):
    # row[dst] += f * row[src]
    M[dst] = [a + f * b for a, b in zip(M[dst], M[src])]


def _add_col(M, dst, src, f):
    for row in M:
        row[dst] += f * row[src]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith normal form with transforms, ``U @ A @ V == D``.

    Diagonal entries are nonnegative and satisfy ``d_k | d_{k+1}``.
    """
    D = as_matrix(A)
    m, n = shape(D)
    if m == 0 or n == 0:
        raise ValueError("empty matrix")
    U, V = identity(m), identity(n)
    for t in range(min(m, n)):
        while True:
            nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not nz:
                return SmithDecomposition(U, D, V)
            _, pi, pj = min(nz)
            if pi != t:
                _swap_rows(D, t, pi)
                _swap_rows(U, t, pi)
            if pj != t:
                _swap_cols(D, t, pj)
                _swap_cols(V, t, pj)
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    f = D[i][t] // p
                    _add_row(D, i, t, -f)
                    _add_row(U, i, t, -f)
                    dirty |= D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    f = D[t][j] // p
                    _add_col(D, j, t, -f)
                    _add_col(V, j, t, -f)
                    dirty |= D[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            # pull a non-divisible row into the pivot row and redo the step
            _add_row(D, t, bad, 1)
            _add_row(U, t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
    return SmithDecomposition(U, D, V)


def hermite_normal_form(A: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form: returns ``(H, U)`` with ``U @ A == H``.

    Pivots are positive, rows below the rank are zero, and entries above a
    pivot are reduced into ``[0, pivot)``.
    """
    H = as_matrix(A)
    m, n = shape(H)
    U = identity(m)
    p = 0
    for j in range(n):
        if p == m:
            break
        while True:
            nz = [(abs(H[i][j]), i) for i in range(p, m) if H[i][j]]
            if not nz:
                break
            _, i0 = min(nz)
            if i0 != p:
                _swap_rows(H, p, i0)
                _swap_rows(U, p, i0)
            done = True
            for i in range(p + 1, m):
                if H[i][j]:
                    f = H[i][j] // H[p][j]
                    _add_row(H, i, p, -f)
                    _add_row(U, i, p, -f)
                    done &= H[i][j] == 0
            if done:
                break
        if H[p][j] == 0:
            continue
        if H[p][j] < 0:
            H[p] = [-a for a in H[p]]
            U[p] = [-a for a in U[p]]
        for i in range(p):
            f = H[i][j] // H[p][j]
            if f:
                _add_row(H, i, p, -f)
                _add_row(U, i, p, -f)
        p += 1
    return H, U


def kernel_basis(A: Sequence[Sequence[int]]) -> list[list[int]]:
    """Hermite-canonical Z-basis of the integer kernel ``{v : A v = 0}``."""
    A = as_matrix(A)
    m, n = shape(A)
    if n == 0:
        return []
    if m == 0:
        return identity(n)
    _, D, V = smith_normal_form(A)
    k = sum(1 for i in range(min(m, n)) if D[i][i])
    K = [[V[i][j] for i in range(n)] for j in range(k, n)]
    if not K:
        return []
    H, _ = hermite_normal_form(K)
    return [row for row in H if any(row)]


# --------------------------------------------------------------------------
# Exact LP feasibility


class Constraint(NamedTuple):
    """``coeffs . y  op  rhs`` with ``op`` one of ``">"``, ``">="``, ``"="``."""

    coeffs: tuple
    rhs: Fraction
    op: str = ">"


@dataclass(frozen=True)
class LPResult:
    """Outcome of a feasibility query.

    ``point`` is an exact witness when feasible.  Otherwise ``certificate``
    holds Farkas multipliers, one per input constraint: combining the
    constraints with these weights yields ``0 > b`` (or ``0 >= b``) with
    ``b`` positive, an evident contradiction.
    """

    point: tuple[Fraction, ...] | None
    certificate: tuple[Fraction, ...] | None = None

    @property
    def feasible(self) -> bool:
        return self.point is not None


class _Row(NamedTuple):
    coeffs: tuple[Fraction, ...]
    rhs: Fraction
    strict: bool
    mult: tuple[Fraction, ...]


def _normalize(row: _Row) -> tuple[tuple, _Row]:
    lead = next((abs(c) for c in row.coeffs if c), None)
    if lead is None or lead == 1:
        return row.coeffs, row
    scaled = _Row(
        tuple(c / lead for c in row.coeffs),
        row.rhs / lead,
        row.strict,
        tuple(x / lead for x in row.mult),
    )
    return scaled.coeffs, scaled


def _dedupe(rows: list[_Row]) -> list[_Row]:
    best: dict[tuple, _Row] = {}
    for r in rows:
        key, r = _normalize(r)
        old = best.get(key)
        if old is None or (r.rhs, r.strict) > (old.rhs, old.strict):
            best[key] = r
    return [best[k] for k in sorted(best)]


def _bounds(rows: list[_Row], y: list[Fraction], j: int):
    lo = hi = None
    lo_s = hi_s = False
    for r in rows:
        a = r.coeffs[j]
        if a == 0:
            continue
        rest = r.rhs - sum(c * v for c, v in zip(r.coeffs[:j], y))
        bound = rest / a
        if a > 0:
            if lo is None or bound > lo or (bound == lo and r.strict):
                lo, lo_s = bound, r.strict
        else:
            if hi is None or bound < hi or (bound == hi and r.strict):
                hi, hi_s = bound, r.strict
    return lo, lo_s, hi, hi_s


def _pick(lo, lo_s, hi, hi_s) -> Fraction:
    def ok(v):
        if lo is not None and (v < lo or (lo_s and v == lo)):
            return False
        if hi is not None and (v > hi or (hi_s and v == hi)):
            return False
        return True

    if ok(Fraction(0)):
        return Fraction(0)
    if hi is None:
        return Fraction(floor(lo) + 1 if lo_s else ceil(lo))
    if lo is None:
        return Fraction(ceil(hi) - 1 if hi_s else floor(hi))
    cands = [Fraction(c) for c in (ceil(lo), floor(hi)) if ok(Fraction(c))]
    if cands:
        return min(cands, key=abs)
    return (lo + hi) / 2


def lp_feasible(constraints: Sequence[Constraint], unknowns: int) -> LPResult:
    """Decide feasibility of a mixed strict/non-strict/equality system."""
    rows: list[_Row] = []
    ncons = len(constraints)
    for k, c in enumerate(constraints):
        coeffs = tuple(Fraction(x) for x in c.coeffs)
        if len(coeffs) != unknowns:
            raise ValueError(f"constraint {k} has {len(coeffs)} coefficients, expected {unknowns}")
        rhs = Fraction(c.rhs)
        unit = tuple(Fraction(int(i == k)) for i in range(ncons))
        if c.op == "=":
            rows.append(_Row(coeffs, rhs, False, unit))
            rows.append(_Row(tuple(-x for x in coeffs), -rhs, False, tuple(-x for x in unit)))
        elif c.op in (">", ">="):
            rows.append(_Row(coeffs, rhs, c.op == ">", unit))
        else:
            raise ValueError(f"unknown relation {c.op!r}")

    levels = [_dedupe(rows)]
    for j in range(unknowns - 1, -1, -1):
        cur = levels[-1]
        lower = [r for r in cur if r.coeffs[j] > 0]
        upper = [r for r in cur if r.coeffs[j] < 0]
        nxt = [r for r in cur if r.coeffs[j] == 0]
        for lo in lower:
            for hi in upper:
                a, b = lo.coeffs[j], -hi.coeffs[j]
                nxt.append(
                    _Row(
                        tuple(x / a + y / b for x, y in zip(lo.coeffs, hi.coeffs)),
                        lo.rhs / a + hi.rhs / b,
                        lo.strict or hi.strict,
                        tuple(x / a + y / b for x, y in zip(lo.mult, hi.mult)),
                    )
                )
        levels.append(_dedupe(nxt))

    for r in levels[-1]:
        if r.rhs > 0 or (r.rhs == 0 and r.strict):
            return LPResult(None, r.mult)

    y: list[Fraction] = []
    for j in range(unknowns):
        rows_j = levels[unknowns - 1 - j]
        y.append(_pick(*_bounds(rows_j, y, j)))
    return LPResult(tuple(y))


def lp_feasible_strict(
    constraints: Sequence[tuple[Sequence, Fraction]], unknowns: int
) -> LPResult:
    """Find an exact rational ``y`` with ``c . y > b`` for every ``(c, b)``."""
    return lp_feasible([Constraint(tuple(c), Fraction(b), ">") for c, b in constraints], unknowns)


def check_point(constraints: Sequence[Constraint], y: Sequence[Fraction]) -> bool:
    """Exact re-substitution check of a candidate point."""
    for c in constraints:
        lhs = sum(Fraction(a) * v for a, v in zip(c.coeffs, y))
        if c.op == ">" and not lhs > c.rhs:
            return False
        if c.op == ">=" and not lhs >= c.rhs:
            return False
        if c.op == "=" and lhs != c.rhs:
            return False
    return True


def check_certificate(constraints: Sequence[Constraint], mult: Sequence[Fraction]) -> bool:
    """Verify a Farkas certificate returned by :func:`lp_feasible`."""
    if not constraints:
        return False
    n = len(constraints[0].coeffs)
    combo = [Fraction(0)] * n
    rhs = Fraction(0)
    strict = False
    for c, w in zip(constraints, mult):
        if w == 0:
            continue
        if c.op != "=" and w < 0:
            return False
        combo = [x + w * Fraction(a) for x, a in zip(combo, c.coeffs)]
        rhs += w * Fraction(c.rhs)
        strict |= c.op == ">"
    if any(combo):
        return False
    return rhs > 0 or (rhs == 0 and strict)
