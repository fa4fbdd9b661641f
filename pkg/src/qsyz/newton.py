"""Multi-start Newton search for critical points of Laurent polynomials.

Critical points in the torus are zeros of the logarithmic derivatives
``z_j dW/dz_j``.  Newton runs in log coordinates ``z = exp(s)`` on a batch
of starts at once; steps use the pseudo-inverse so that non-isolated
critical loci (as for Calabi-Yau superpotentials, which are homogeneous in
one variable) are handled as well.  When all exponents pair to 1 with some
direction ``d``, ``W`` scales along ``d`` and steps are kept orthogonal to
it, so iterates do not slide off to the degenerate end of the torus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .laurent import LaurentPolynomial, QPoly


@dataclass(frozen=True)
class CriticalPoint:
    z: tuple[complex, ...]
    value: complex
    gradient_norm: float
    log_gradient_norm: float
    iterations: int


@dataclass(frozen=True)
class CriticalPointReport:
    points: tuple[CriticalPoint, ...]
    starts: int
    converged_starts: int
    status: str = "ok"  # or "NoConvergence"
    notes: tuple[str, ...] = field(default=())


def _numeric_terms(W: LaurentPolynomial, q):
    E = np.array(list(W.terms), dtype=float).reshape(len(W.terms), W.nvars)
    C = np.array(
        [c.evaluate(q) if isinstance(c, QPoly) else complex(c) for c in W.terms.values()],
        dtype=complex,
    )
    return E, C


def start_grid(
    k: int, N: int, scale: float, rng: np.random.Generator, max_starts: int = 4096
) -> np.ndarray:
    """Log-coordinate starts: N phases per variable times a magnitude ladder.

    When the full grid exceeds ``max_starts`` a seeded subsample is taken.
    """
    if N <= 0:
        return np.empty((0, k), dtype=complex)
    phases = 2j * np.pi * (np.arange(N) + 0.5) / N
    ladder = scale * np.arange(-N, N + 1) / N
    if len(ladder) * N**k <= max_starts:
        grid = np.array(
            [[mag + ph for ph in combo] for mag in ladder for combo in product(phases, repeat=k)],
            dtype=complex,
        )
    else:
        mags = ladder[rng.integers(0, len(ladder), max_starts)]
        grid = mags[:, None] + phases[rng.integers(0, N, (max_starts, k))]
    jitter = 0.05 * (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
    return grid + jitter


def critical_points(
    W: LaurentPolynomial,
    q=None,
    starts: int = 8,
    tol: float = 1e-10,
    seed: int = 0,
    max_iter: int = 60,
) -> CriticalPointReport:
    """Critical points of ``W`` in ``(C^*)^k`` by batched Newton.

    A point is accepted when both ``|dW/dz|`` and ``|z dW/dz|`` are below
    ``tol``; accepted points closer than ``10 * tol`` are merged.  The
    output is sorted and fully determined by ``seed`` and ``starts``.
    """
    k = W.nvars
    E, C = _numeric_terms(W, q)
    if k == 0 or not np.any(E):
        return CriticalPointReport((), 0, 0, "NoConvergence", ("no non-constant terms",))
    rng = np.random.default_rng(seed)
    logc = np.log(np.abs(C[np.abs(C) > 0]))
    scale = max(1.0, float(np.max(np.abs(logc))) if logc.size else 1.0)
    S = start_grid(k, starts, scale, rng)

    d, *_ = np.linalg.lstsq(E, np.ones(len(E)), rcond=None)
    P = np.eye(k)
    if np.allclose(E @ d, 1.0, atol=1e-12):
        P = P - np.outer(d, d) / np.dot(d, d)

    def residual(S):
        T = np.exp(S @ E.T) * C  # (B, terms)
        G = T @ E  # log-gradient (B, k)
        J = np.einsum("bt,tj,tl->bjl", T, E, E)
        return G, J

    iters = np.zeros(len(S), dtype=int)
    active = np.ones(len(S), dtype=bool)
    for it in range(max_iter):
        G, J = residual(S[active])
        step = -np.einsum("bjl,bl->bj", np.linalg.pinv(J @ P, rcond=1e-13), G)
        S[active] = S[active] + step
        iters[active] += 1
        small = np.linalg.norm(step, axis=1) < 1e-15 * (1 + np.linalg.norm(S[active], axis=1))
        idx = np.flatnonzero(active)
        active[idx[small]] = False
        bad = ~np.all(np.isfinite(S), axis=1) | (np.abs(S.real).max(axis=1) > 60)
        active &= ~bad
        if not active.any():
            break

    finite = np.all(np.isfinite(S), axis=1) & (np.abs(S.real).max(axis=1) <= 60)
    found = []
    for s, n_it in zip(S[finite], iters[finite]):
        z = np.exp(s)
        G, _ = residual(s[None, :])
        lg = float(np.linalg.norm(G[0]))
        grad = float(np.linalg.norm(G[0] / z))
        if lg < tol and grad < tol:
            val = complex(np.dot(np.exp(E @ s), C))
            found.append(CriticalPoint(tuple(complex(x) for x in z), val, grad, lg, int(n_it)))
    found.sort(key=lambda p: tuple(np.round([(x.real, x.imag) for x in p.z], 9).ravel()))
    unique: list[CriticalPoint] = []
    kept = np.empty((0, k), dtype=complex)
    for p in found:
        zp = np.array(p.z)
        if not len(kept) or np.min(np.linalg.norm(kept - zp, axis=1)) > 10 * tol:
            unique.append(p)
            kept = np.vstack([kept, zp])
    status = "ok" if unique else "NoConvergence"
    return CriticalPointReport(tuple(unique), len(S), len(found), status)
