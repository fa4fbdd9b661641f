"""Command-line interface.

Exit codes: 0 success, 1 invalid input, 2 a verification failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, reports
from .cache import ResultCache, request_key
from .errors import ParseError, QSYZError, UnsupportedDimension, ValidationError, VerificationError
from .fanfile import load_fan, serialize_fan_file
from .plotting import emit_svg

COMMANDS = (
    "check",
    "mirror",
    "superpotential",
    "discriminant",
    "embed",
    "disks",
    "critical-points",
    "verify",
)


def _int_list(s: str) -> list[int]:
    return [int(a) for a in s.replace(" ", "").strip("[]{}").split(",") if a]


def _float_list(s: str) -> list[float]:
    return [float(a) for a in s.replace(" ", "").strip("[]").split(",") if a]


def _complex_list(s: str) -> list[complex]:
    return [complex(a) for a in s.replace(" ", "").strip("[]").split(",") if a]


def _decimal(s: str) -> Fraction:
    try:
        return Fraction(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsyz", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qsyz {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("fan", help="fan file path, or a bundled name (kp1.fan, kp2.fan, c3.fan, c4.fan)")
        s.add_argument("--json", action="store_true", help="print the JSON report instead of key/value lines")
        s.add_argument("--out", type=Path, help="also write the JSON report to this file")
        s.add_argument("--no-cache", action="store_true")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--samples", type=int, default=100)
        s.add_argument("--tol", type=float, default=None)
        s.add_argument("--eps", type=_decimal, default=None, help="|eps|, overriding the fan file")
        s.add_argument("--gauge-cone", type=_int_list, default=None, help="1-based ray indices, e.g. 1,2,4")
        s.add_argument("--svg", type=Path, default=None, help="write the base figure here (discriminant)")
        s.add_argument("--point", type=_float_list, default=None, help="fiber point x (default: an interior point)")
        s.add_argument("--b", type=_complex_list, default=None, help="brane parameter b")
    return p


def _run(args) -> tuple[dict, int, bytes | None]:
    ff = load_fan(args.fan, validate=args.command != "check")
    svg = None
    c = args.command
    if c == "check":
        rep, code = reports.check_report(ff)
    elif c == "mirror":
        rep, code = reports.mirror_report(ff, args.gauge_cone, seed=args.seed)
    elif c == "superpotential":
        rep, code = reports.superpotential_report(ff, args.point, args.b, min(args.samples, 50), args.seed)
    elif c == "discriminant":
        rep, code, base = reports.discriminant_report(ff, args.eps)
        if args.svg is not None:
            try:
                svg = emit_svg(base)
                rep["svg"] = {"written": True}
            except UnsupportedDimension as e:
                rep["svg"] = {"written": False, "reason": str(e)}
    elif c == "embed":
        rep, code = reports.embed_report(ff, args.eps, args.samples, args.seed)
    elif c == "disks":
        rep, code = reports.disks_report(ff, args.samples, args.seed, args.tol or 1e-6)
    elif c == "critical-points":
        rep, code = reports.critical_points_report(ff, args.point, args.seed, args.tol or 1e-9)
    else:
        rep, code = reports.verify_report(ff, args.samples, args.seed)
    return rep, code, svg


def _cache_key(args) -> str:
    ff = load_fan(args.fan, validate=False)
    flags = {k: v for k, v in vars(args).items() if k not in ("fan", "no_cache", "out", "svg", "json")}
    return request_key(fan=serialize_fan_file(ff), version=__version__, svg=args.svg is not None, **flags)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout.buffer
    try:
        cache = None if args.no_cache else ResultCache()
        key = _cache_key(args) if cache else None
        payload = cache.get(key) if cache else None
        if payload is not None:
            code, svg, rep_bytes = _unpack(payload)
        else:
            rep, code, svg = _run(args)
            rep["exit_code"] = code
            rep_bytes = reports.to_json(rep)
            if cache:
                cache.put(key, _pack(code, svg, rep_bytes))
        rep = json.loads(rep_bytes)
        if args.svg is not None and svg is not None:
            args.svg.write_bytes(svg)
        if args.out is not None:
            args.out.write_bytes(rep_bytes)
        out.write(rep_bytes if args.json else reports.to_tsv(rep))
        out.flush()
        return code
    except (ParseError, ValidationError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return 2
    except QSYZError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def _pack(code: int, svg: bytes | None, rep: bytes) -> bytes:
    svg = svg or b""
    return f"{code}\n{len(svg)}\n".encode() + svg + rep


def _unpack(blob: bytes) -> tuple[int, bytes | None, bytes]:
    code, n, rest = blob.split(b"\n", 2)
    n = int(n)
    return int(code), (rest[:n] or None), rest[n:]


if __name__ == "__main__":
    sys.exit(main())
