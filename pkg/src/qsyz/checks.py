"""Invariant checks shared by the ``verify`` command and the test-suite."""

from __future__ import annotations

import numpy as np

from . import lattice as lat
from .fan import FanData, certify_semiprojective, kahler_data, KahlerData


def random_int_matrix(rng: np.random.Generator, max_dim: int = 6, bound: int = 9) -> list[list[int]]:
    r, c = (int(a) for a in rng.integers(1, max_dim + 1, 2))
    return rng.integers(-bound, bound + 1, (r, c)).tolist()


def _is_unimodular(M) -> bool:
    return abs(lat.det(M)) == 1


def snf_ok(A) -> bool:
    U, D, V = lat.smith_normal_form(A)
    if lat.matmul(lat.matmul(U, A), V) != D or not (_is_unimodular(U) and _is_unimodular(V)):
        return False
    r, c = lat.shape(A)
    diag = [D[i][i] for i in range(min(r, c))]
    if any(D[i][j] for i in range(r) for j in range(c) if i != j) or any(d < 0 for d in diag):
        return False
    nz = [d for d in diag if d]
    if diag[: len(nz)] != nz or len(nz) != lat.rank(A):
        return False
    return all(b % a == 0 for a, b in zip(nz, nz[1:]))


def hnf_ok(A) -> bool:
    H, U = lat.hermite_normal_form(A)
    if lat.matmul(U, A) != H or not _is_unimodular(U):
        return False
    rk = lat.rank(A)
    col = -1
    for i, row in enumerate(H):
        nz = [j for j, a in enumerate(row) if a]
        if i >= rk:
            if nz:
                return False
            continue
        if not nz or nz[0] <= col or row[nz[0]] <= 0:
            return False
        col = nz[0]
        p = row[col]
        if any(not (0 <= H[k][col] < p) for k in range(i)) or any(H[k][col] for k in range(i + 1, len(H))):
            return False
    return True


def kernel_ok(A) -> bool:
    K = lat.kernel_basis(A)
    r, c = lat.shape(A)
    if len(K) != c - lat.rank(A):
        return False
    if any(x for v in K for x in lat.matvec(A, v)):
        return False
    if not K:
        return True
    # saturated: all invariant factors of the basis are 1
    _, D, _ = lat.smith_normal_form(K)
    return all(D[i][i] == 1 for i in range(len(K)))


def lattice_suite(samples: int = 500, seed: int = 0) -> dict[str, int]:
    rng = np.random.default_rng(seed)
    fails = {"snf": 0, "hnf": 0, "kernel": 0}
    for _ in range(samples):
        A = random_int_matrix(rng)
        fails["snf"] += not snf_ok(A)
        fails["hnf"] += not hnf_ok(A)
        fails["kernel"] += not kernel_ok(A)
    return fails


def random_cy_fan_2d(rng: np.random.Generator, max_rays: int = 6) -> tuple[FanData, KahlerData]:
    """Random smooth Calabi-Yau fan of rank 2 with a strictly convex ``lambda``.

    Rays ``(a + k, 1)`` for consecutive ``k`` are sent through a random
    ``GL_2(Z)`` matrix and shuffled; ``lambda`` comes from the
    semi-projectivity certificate.
    """
    m = int(rng.integers(3, max_rays + 1))
    a = int(rng.integers(-3, 4))
    base = [(a + k, 1) for k in range(m)]
    g = lat.identity(2)
    for _ in range(int(rng.integers(1, 5))):
        s = int(rng.integers(-2, 3))
        elem = [[1, s], [0, 1]] if rng.integers(2) else [[1, 0], [s, 1]]
        g = lat.matmul(elem, g)
    if rng.integers(2):
        g = lat.matmul([[0, 1], [1, 0]], g)
    rays = [tuple(lat.matvec(g, v)) for v in base]
    perm = [int(i) for i in rng.permutation(m)]
    rays = [rays[i] for i in perm]
    pos = {old: new for new, old in enumerate(perm)}
    cones = [tuple(sorted((pos[k], pos[k + 1]))) for k in range(m - 1)]
    fan = FanData(2, tuple(rays), tuple(cones))
    cert = certify_semiprojective(fan)
    assert cert.ok, cert.reason
    return fan, kahler_data(fan, cert.lam)
