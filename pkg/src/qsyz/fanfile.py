"""Fan files: a small TOML document describing a toric Calabi-Yau with Kähler data.

Example::

    rank = 3
    rays = [[1, 0, 1], [0, 1, 1], [-1, -1, 1], [0, 0, 1]]
    max_cones = [[1, 2, 4], [2, 3, 4], [1, 3, 4]]
    lambda = ["0", "0", "0", "1"]
    eps_abs = "1.0"

Cone indices are 1-based.  ``lambda`` entries are rationals written as
``"p/q"`` strings, ``eps_abs`` a decimal string, and the optional ``q`` a
list of floats overriding the Kähler parameters derived from ``lambda``.
"""

from __future__ import annotations

import hashlib
import sys
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import lattice as lat
from .errors import EmptyInterior, ParseError, ValidationError
from .fan import (
    FanData,
    KahlerData,
    MomentPolytope,
    calabi_yau_vector,
    certify_semiprojective,
    interior_point,
    is_smooth,
    kahler_data,
    strict_convexity_constraints,
)

FIELDS = ("rank", "rays", "max_cones", "lambda", "eps_abs", "q")
REQUIRED = FIELDS[:5]
BUNDLED = ("kp1.fan", "kp2.fan", "c3.fan", "c4.fan")


@dataclass(frozen=True)
class FanFile:
    fan: FanData
    kahler: KahlerData
    eps_abs: Fraction


def _locate(text: str, key: str) -> tuple[int | None, int | None]:
    for no, line in enumerate(text.splitlines(), 1):
        if line.lstrip().startswith(key):
            return no, line.index(key) + 1
    return None, None


def _fail(text: str, key: str, message: str):
    line, col = _locate(text, key)
    raise ParseError(f"{key}: {message}", line, col)


def _int_matrix(text, key, value):
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        _fail(text, key, "expected a list of integer lists")
    for row in value:
        if not all(isinstance(a, int) and not isinstance(a, bool) for a in row):
            _fail(text, key, "entries must be integers")
    return value


def _rational(text, key, s):
    if not isinstance(s, str):
        _fail(text, key, f"expected a \"p/q\" string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        _fail(text, key, f"{s!r} is not a rational number")


def parse_fan_file(data: bytes | str, validate: bool = True) -> FanFile:
    """Parse and (by default) validate a fan file.

    Validation runs every standing check eagerly: Calabi-Yau covector,
    smoothness, semi-projectivity, the Kähler cone condition on ``lambda``
    and a nonempty polytope interior.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ParseError(str(e).split(" (at line")[0], getattr(e, "lineno", None), getattr(e, "colno", None)) from None
    unknown = sorted(set(doc) - set(FIELDS))
    if unknown:
        _fail(text, unknown[0], "unknown field")
    for key in REQUIRED:
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    n = doc["rank"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        _fail(text, "rank", "must be a positive integer")
    rays = _int_matrix(text, "rays", doc["rays"])
    cones = _int_matrix(text, "max_cones", doc["max_cones"])
    for c in cones:
        for i in c:
            if not 1 <= i <= len(rays):
                _fail(text, "max_cones", f"index {i} out of range 1..{len(rays)}")
    lam_raw = doc["lambda"]
    if not isinstance(lam_raw, list):
        _fail(text, "lambda", "expected a list of \"p/q\" strings")
    lam = [_rational(text, "lambda", s) for s in lam_raw]
    eps_raw = doc["eps_abs"]
    if not isinstance(eps_raw, str):
        _fail(text, "eps_abs", "expected a decimal string")
    try:
        eps = Fraction(Decimal(eps_raw))
    except (InvalidOperation, ValueError):
        _fail(text, "eps_abs", f"{eps_raw!r} is not a decimal number")
    if eps <= 0:
        _fail(text, "eps_abs", "must be positive")
    q = doc.get("q")
    if q is not None:
        if not isinstance(q, list) or not all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in q):
            _fail(text, "q", "expected a list of numbers")
        q = [float(a) for a in q]

    fan = FanData(n, tuple(map(tuple, rays)), tuple(tuple(i - 1 for i in c) for c in cones))
    kahler = kahler_data(fan, lam, q)
    ff = FanFile(fan, kahler, eps)
    if validate:
        validate_fan_file(ff)
    return ff


def validate_fan_file(ff: FanFile) -> None:
    fan = ff.fan
    calabi_yau_vector(fan)
    cert = certify_semiprojective(fan)  # raises SingularCone
    if not cert.ok:
        raise ValidationError(cert.reason, "semi-projectivity")
    if not lat.check_point(strict_convexity_constraints(fan), ff.kahler.lam):
        raise ValidationError(
            "lambda is not strictly convex; a valid choice is "
            + str([str(a) for a in cert.lam]),
            "kahler",
        )
    interior_point(MomentPolytope(fan, ff.kahler))


def _decimal(x: Fraction) -> str:
    d = Decimal(x.numerator) / Decimal(x.denominator)
    if Fraction(d) != x:
        raise ValueError(f"{x} has no terminating decimal expansion")
    s = format(d.normalize(), "f")
    return s if "." in s else s + ".0"


def serialize_fan_file(ff: FanFile) -> str:
    """Canonical text form; ``parse_fan_file`` inverts it exactly."""
    fan, k = ff.fan, ff.kahler
    rows = lambda M: "[" + ", ".join("[" + ", ".join(str(a) for a in r) + "]" for r in M) + "]"
    out = [
        f"rank = {fan.n}",
        f"rays = {rows(fan.rays)}",
        f"max_cones = {rows([[i + 1 for i in c] for c in fan.max_cones])}",
        "lambda = [" + ", ".join(f'"{a}"' for a in k.lam) + "]",
        f'eps_abs = "{_decimal(ff.eps_abs)}"',
    ]
    if k.q is not None:
        out.append("q = [" + ", ".join(format(a, ".17g") for a in k.q) + "]")
    return "\n".join(out) + "\n"


def content_hash(ff: FanFile) -> str:
    return hashlib.sha256(serialize_fan_file(ff).encode()).hexdigest()


def bundled_path(name: str):
    return resources.files("qsyz") / "data" / name


def read_fan_source(source: str) -> bytes:
    """Read a fan file from a path, or from the bundled set by name."""
    p = Path(source)
    if p.is_file():
        return p.read_bytes()
    name = p.name if p.name.endswith(".fan") else p.name + ".fan"
    if name in BUNDLED and str(p.parent) in ("", "."):
        return bundled_path(name).read_bytes()
    raise FileNotFoundError(f"no fan file {source!r} (bundled: {', '.join(BUNDLED)})")


def load_fan(source: str, validate: bool = True) -> FanFile:
    return parse_fan_file(read_fan_source(source), validate)


__all__ = [
    "FanFile",
    "parse_fan_file",
    "validate_fan_file",
    "serialize_fan_file",
    "content_hash",
    "load_fan",
    "read_fan_source",
    "BUNDLED",
    "EmptyInterior",
]
