"""Report builders for each command, and their JSON and delimited renderings.

Every builder returns ``(report, exit_code)``.  Reports hold only JSON
types; rationals are ``"p/q"`` strings and floats keep full precision.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from . import lattice as lat
from .checks import lattice_suite
from .errors import ConstraintViolated, UnsupportedDimension, ValidationError
from .fan import (
    MomentPolytope,
    calabi_yau_vector,
    certify_semiprojective,
    interior_point,
    is_smooth,
    strict_convexity_constraints,
)
from .fanfile import FanFile, content_hash
from .fibration import chamber_compatibility_check, discriminant_graph
from .laurent import parse_laurent, q_names, z_names
from .mirror import (
    embed_into_cm_mirror,
    hypersurface_smoothness_probe,
    solve_coefficients,
    verify_constraints,
)
from .quasidisk import (
    critical_points,
    disk_batch,
    mirror_rewrite,
    superpotential,
    superpotential_gradient,
    wall_crossing_check,
)

OK, VALIDATION_FAILED, VERIFICATION_FAILED = 0, 1, 2


def _frac(x) -> str:
    return str(Fraction(x))


def _cx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def provenance(ff: FanFile) -> dict:
    return {"input_sha256": content_hash(ff), "version": __version__}


def _base(command: str, ff: FanFile) -> dict:
    return {"command": command, "provenance": provenance(ff)}


def _default_point(ff: FanFile, point) -> np.ndarray:
    if point is not None:
        return np.asarray(point, dtype=float)
    return np.array([float(a) for a in interior_point(MomentPolytope(ff.fan, ff.kahler))])


# --------------------------------------------------------------------------


def check_report(ff: FanFile) -> tuple[dict, int]:
    fan = ff.fan
    rep = _base("check", ff)
    ok = True
    try:
        frame = calabi_yau_vector(fan)
        rep["calabi_yau"] = {"ok": True, "u": list(frame.u)}
    except ValidationError as e:
        rep["calabi_yau"] = {"ok": False, "error": str(e)}
        ok = False
    sm = is_smooth(fan)
    rep["smooth"] = {
        "ok": sm.smooth,
        "determinants": list(sm.determinants),
        "offending_cones": [[i + 1 for i in c] for c in sm.offending],
    }
    ok &= sm.smooth
    if sm.smooth:
        cert = certify_semiprojective(fan)
        rep["semiprojective"] = {
            "ok": cert.ok,
            "lambda_witness": [_frac(a) for a in cert.lam] if cert.lam else None,
            "farkas_certificate": [_frac(a) for a in cert.certificate] if cert.certificate else None,
            "reason": cert.reason,
        }
        ok &= cert.ok
        kc = lat.check_point(strict_convexity_constraints(fan), ff.kahler.lam)
        rep["kahler_cone"] = {"ok": kc, "lambda": [_frac(a) for a in ff.kahler.lam]}
        ok &= kc
    try:
        x = interior_point(MomentPolytope(fan, ff.kahler))
        rep["interior"] = {"ok": True, "point": [_frac(a) for a in x]}
    except ValidationError as e:
        rep["interior"] = {"ok": False, "error": str(e)}
        ok = False
    rep["ok"] = bool(ok)
    return rep, OK if ok else VALIDATION_FAILED


def mirror_report(ff: FanFile, gauge_cone: Sequence[int] | None = None, samples: int = 5, seed: int = 0):
    fan, k = ff.fan, ff.kahler
    cone = None if gauge_cone is None else [i - 1 for i in gauge_cone]
    frame = calabi_yau_vector(fan)
    fam = solve_coefficients(fan, frame, k, cone)
    rep = _base("mirror", ff)
    rep["equation"] = fam.equation()
    rep["gauge_cone"] = [i + 1 for i in fam.gauge_cone]
    rep["u"] = list(frame.u)
    rep["adapted_basis"] = [list(r) for r in frame.T]
    rep["curve_classes"] = [list(g) for g in k.gamma]
    rep["coefficients"] = [
        {"i": i + 1, "w": list(w), "C": c.format(q_names(fam.r))}
        for i, (w, c) in enumerate(zip(frame.w, fam.coefficients))
    ]
    rhs = fam.equation().split(" = ", 1)[1]
    rep["equation_roundtrip"] = parse_laurent(rhs, z_names(fam.k), q_names(fam.r)) == fam.rhs()
    try:
        verdict = verify_constraints(fam, k, samples, seed)
        rep["constraints"] = {
            "ok": True,
            "exact": list(verdict.exact),
            "numeric_max_rel_error": verdict.numeric_max_rel_error,
        }
        code = OK
    except ConstraintViolated as e:
        rep["constraints"] = {"ok": False, "violated": e.index, "error": str(e)}
        code = VERIFICATION_FAILED
    emb = embed_into_cm_mirror(fam)
    rep["cm_embedding"] = {
        "ambient": emb.cm_equation,
        "relations": [r.format() for r in emb.relations],
        "substitution": [
            f"Z{i + 1} = {s.format(z_names(fam.k), q_names(fam.r))}" for i, s in enumerate(emb.substitution)
        ],
        "ok": emb.substitution_identity and emb.relations_hold,
    }
    if not (rep["equation_roundtrip"] and rep["cm_embedding"]["ok"]):
        code = VERIFICATION_FAILED
    return rep, code


def superpotential_report(ff: FanFile, point=None, b=None, samples: int = 50, seed: int = 0):
    fan, k = ff.fan, ff.kahler
    x = _default_point(ff, point)
    b = np.zeros(fan.n) if b is None else np.asarray(b, dtype=complex)
    sp = superpotential(x, fan, k)
    rep = _base("superpotential", ff)
    rep["x"] = [float(a) for a in x]
    rep["terms"] = [
        {"i": i + 1, "exponent": list(v), "ell": float(e), "coefficient": float(math.exp(-e))}
        for i, (v, e) in enumerate(zip(fan.rays, sp.ell))
    ]
    rep["value"] = _cx(sp(b))
    rng = np.random.default_rng(seed)
    per, grad = 0.0, 0.0
    for _ in range(samples):
        bb = rng.normal(size=fan.n) + 0.1j * rng.normal(size=fan.n)
        w0 = sp(bb)
        for j in range(fan.n):
            per = max(per, abs(sp(bb + np.eye(fan.n)[j]) - w0) / abs(w0))
        g = superpotential_gradient(sp, bb)
        h = 1e-6
        fd = np.array([(sp(bb + h * e) - sp(bb - h * e)) / (2 * h) for e in np.eye(fan.n)])
        grad = max(grad, float(np.max(np.abs(g - fd)) / np.max(np.abs(g))))
    rep["periodicity_max_rel_error"] = float(per)
    rep["gradient_max_rel_error"] = grad
    frame = calabi_yau_vector(fan)
    fam = solve_coefficients(fan, frame, k)
    rw = mirror_rewrite(sp, fam, fan, k, b)
    rep["mirror_rewrite"] = {
        "v": _cx(rw.v),
        "z": [_cx(a) for a in rw.z],
        "term_max_rel_error": rw.max_rel_error,
        "v_W_minus_f_rel_error": rw.total_rel_error,
        "equation": fam.equation(),
    }
    ok = per < 1e-12 and grad < 1e-6 and rw.max_rel_error < 1e-10
    rep["ok"] = bool(ok)
    return rep, OK if ok else VERIFICATION_FAILED


def discriminant_report(ff: FanFile, eps=None):
    eps = ff.eps_abs if eps is None else Fraction(eps)
    frame = calabi_yau_vector(ff.fan)
    base = discriminant_graph(MomentPolytope(ff.fan, ff.kahler), frame, eps)
    rep = _base("discriminant", ff)
    rep["base_graph"] = base.to_json()
    return rep, OK, base


def embed_report(ff: FanFile, eps=None, samples: int = 100, seed: int = 0):
    eps = float(ff.eps_abs if eps is None else eps)
    frame = calabi_yau_vector(ff.fan)
    fam = solve_coefficients(ff.fan, frame, ff.kahler)
    emb = embed_into_cm_mirror(fam)
    q = chamber_compatibility_check(ff.fan, ff.kahler, eps, samples, seed)
    rep = _base("embed", ff)
    rep["cm_embedding"] = {
        "ambient": emb.cm_equation,
        "relations": [r.format() for r in emb.relations],
        "ok": emb.substitution_identity and emb.relations_hold,
    }
    rep["quotient_consistency"] = {
        "samples": q.samples,
        "max_coordinate_error": q.max_coordinate_error,
        "chamber_agreements": q.chamber_agreements,
        "ok": q.ok,
    }
    ok = q.ok and rep["cm_embedding"]["ok"]
    rep["ok"] = bool(ok)
    return rep, OK if ok else VERIFICATION_FAILED


def disks_report(ff: FanFile, samples: int = 100, seed: int = 0, tol: float = 1e-6):
    recs = disk_batch(ff.fan, ff.kahler, samples, seed)
    worst = max((r.rel_error for r in recs), default=0.0)
    maslov = all(r.maslov == 2 * sum(r.degrees) for r in recs)
    rep = _base("disks", ff)
    rep["samples"] = len(recs)
    rep["max_rel_area_error"] = worst
    rep["maslov_ok"] = maslov
    rep["disks"] = [
        {"d": list(r.degrees), "area": r.area, "expected": r.expected_area, "maslov": r.maslov}
        for r in recs
    ]
    ok = maslov and worst <= tol
    rep["ok"] = bool(ok)
    return rep, OK if ok else VERIFICATION_FAILED


def critical_points_report(ff: FanFile, point=None, seed: int = 0, tol: float = 1e-9, starts: int = 8, limit: int = 20):
    fan, k = ff.fan, ff.kahler
    x = _default_point(ff, point)
    sp = superpotential(x, fan, k)
    res = critical_points(sp.W, starts=starts, tol=tol, seed=seed)
    rep = _base("critical-points", ff)
    rep["x"] = [float(a) for a in x]
    rep["superpotential"] = {
        "status": res.status,
        "count": len(res.points),
        "verdict": "obstructed" if res.points else "inconclusive",
        "points": [
            {"y": [_cx(a) for a in p.z], "value": _cx(p.value), "gradient_norm": p.gradient_norm}
            for p in res.points[:limit]
        ],
    }
    frame = calabi_yau_vector(fan)
    fam = solve_coefficients(fan, frame, k)
    probe = hypersurface_smoothness_probe(fam, k.q_values, starts, seed)
    rep["mirror_smoothness"] = {
        "q": list(k.q_values),
        "singular": probe.singular,
        "witness": [_cx(a) for a in probe.witness.z] if probe.witness else None,
        "critical_points_of_f": len(probe.critical_points),
    }
    return rep, OK


def verify_report(ff: FanFile, samples: int = 100, seed: int = 0):
    fan, k = ff.fan, ff.kahler
    suites: dict[str, dict] = {}
    mrep, code = mirror_report(ff, seed=seed)
    suites["constraints"] = {"ok": code == OK}
    frame = calabi_yau_vector(fan)
    fam = solve_coefficients(fan, frame, k)
    q = list(k.q_values)
    wc = wall_crossing_check(fam, q, max(samples, 1), seed)
    suites["wall_crossing"] = {
        "ok": wc.ok,
        "symbolic": wc.symbolic,
        "numeric": wc.numeric,
        "chart_cover": wc.chart_cover,
        "numeric_max_rel_error": wc.numeric_max_rel_error,
    }
    erep, code = embed_report(ff, samples=samples, seed=seed)
    suites["quotient_consistency"] = erep["quotient_consistency"]
    drep, code = disks_report(ff, samples=min(samples, 50), seed=seed)
    suites["disks"] = {"ok": drep["ok"], "max_rel_area_error": drep["max_rel_area_error"]}
    srep, code = superpotential_report(ff, samples=min(samples, 50), seed=seed)
    suites["superpotential"] = {
        "ok": srep["ok"],
        "periodicity_max_rel_error": srep["periodicity_max_rel_error"],
        "gradient_max_rel_error": srep["gradient_max_rel_error"],
    }
    fails = lattice_suite(samples, seed)
    suites["lattice"] = {"ok": not any(fails.values()), "failures": fails, "samples": samples}
    rep = _base("verify", ff)
    rep["equation"] = mrep["equation"]
    rep["suites"] = suites
    ok = all(s["ok"] for s in suites.values())
    rep["ok"] = bool(ok)
    return rep, OK if ok else VERIFICATION_FAILED


# --------------------------------------------------------------------------
# Rendering


def to_json(rep: dict) -> bytes:
    return (json.dumps(rep, sort_keys=True, indent=2) + "\n").encode()


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for key in sorted(obj):
            yield from _flatten(obj[key], f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(obj, list) and any(isinstance(a, (dict, list)) for a in obj):
        for i, a in enumerate(obj):
            yield from _flatten(a, f"{prefix}.{i + 1}")
    else:
        yield prefix, obj


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return ""
    if isinstance(v, list):
        return ",".join(_scalar(a) for a in v)
    return str(v)


def to_tsv(rep: dict) -> bytes:
    """One ``key<TAB>value`` line per leaf, keys dotted and sorted."""
    return "".join(f"{k}\t{_scalar(v)}\n" for k, v in _flatten(rep)).encode()


__all__ = [
    "check_report",
    "mirror_report",
    "superpotential_report",
    "discriminant_report",
    "embed_report",
    "disks_report",
    "critical_points_report",
    "verify_report",
    "to_json",
    "to_tsv",
    "UnsupportedDimension",
]
