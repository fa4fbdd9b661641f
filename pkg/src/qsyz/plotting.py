"""Deterministic SVG pictures of the Gross base.

For ``n = 2`` the base is a half-plane: the boundary line ``h = 0``, the
wall ``h = |eps|`` and the discriminant points on it.  For ``n = 3`` the
wall slice is drawn with the discriminant graph, next to a side view that
shows the two chambers.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

from .errors import UnsupportedDimension  # noqa: E402
from .fibration import GrossBase  # noqa: E402

_RC = {"svg.hashsalt": "qsyz", "svg.fonttype": "none", "path.simplify": False}


def _extent(base: GrossBase, axis: int) -> tuple[float, float]:
    vals = [float(v[axis]) for v in base.vertices] or [0.0]
    lo, hi = min(vals), max(vals)
    pad = max(1.0, 0.6 * (hi - lo))
    return lo - pad, hi + pad


def _side_view(ax, base: GrossBase, axis: int = 0):
    e = float(base.eps_abs)
    lo, hi = _extent(base, axis)
    ax.axhline(0.0, color="black", lw=1.5)
    ax.axhline(e, color="tab:blue", lw=1.0, ls="--")
    ax.fill_between([lo, hi], e, 2.2 * e, color="tab:green", alpha=0.08, lw=0)
    ax.fill_between([lo, hi], 0, e, color="tab:orange", alpha=0.08, lw=0)
    ax.text(lo + 0.05 * (hi - lo), 1.6 * e, "B+", fontsize=11)
    ax.text(lo + 0.05 * (hi - lo), 0.45 * e, "B-", fontsize=11)
    ax.text(hi - 0.02 * (hi - lo), 0.04 * e, "boundary", ha="right", fontsize=8)
    ax.text(hi - 0.02 * (hi - lo), 1.04 * e, "wall", ha="right", fontsize=8, color="tab:blue")
    pts = sorted({float(v[axis]) for v in base.vertices})
    ax.plot(pts, [e] * len(pts), "o", color="tab:red", ms=6, zorder=3)
    ax.set_xlim(lo, hi)
    ax.set_ylim(-0.1 * e, 2.2 * e)
    ax.set_xlabel("x1")
    ax.set_ylabel("h")


def _wall_slice(ax, base: GrossBase):
    (x0, x1), (y0, y1) = _extent(base, 0), _extent(base, 1)
    span = max(x1 - x0, y1 - y0)
    for p in base.pieces:
        V = [(float(a), float(b)) for a, b in p.vertices]
        if len(V) == 2:
            ax.plot([V[0][0], V[1][0]], [V[0][1], V[1][1]], color="tab:red", lw=1.8)
        for d in p.rays:
            for v in V:
                ax.plot([v[0], v[0] + span * d[0]], [v[1], v[1] + span * d[1]], color="tab:red", lw=1.8)
    xs = [float(v[0]) for v in base.vertices]
    ys = [float(v[1]) for v in base.vertices]
    ax.plot(xs, ys, "o", color="tab:red", ms=5, zorder=3)
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(f"wall slice h = {float(base.eps_abs):g}", fontsize=9)


def emit_svg(base: GrossBase) -> bytes:
    if base.n not in (2, 3):
        raise UnsupportedDimension(f"figures are drawn for n in {{2, 3}}, got n = {base.n}")
    with matplotlib.rc_context(_RC):
        if base.n == 2:
            fig = Figure(figsize=(6, 3.5))
            _side_view(fig.add_subplot(1, 1, 1), base)
        else:
            fig = Figure(figsize=(9, 4))
            _wall_slice(fig.add_subplot(1, 2, 1), base)
            _side_view(fig.add_subplot(1, 2, 2), base)
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()
