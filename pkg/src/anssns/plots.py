"""Minimal deterministic SVG emission: traceplots and envelope heatmaps.

Hand-rolled markup keeps the output byte-stable across environments and
lets tests assert structure (element counts, classes) rather than pixels.
"""

from __future__ import annotations

import math

import numpy as np

from .mcmc import PosteriorSamples, detect_label_switch
from .posterior import CredibleEnvelope

__all__ = ["emit_traceplot", "emit_envelope_heatmap"]

_W, _H = 800, 240
_MARGIN = 42


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo if hi > lo else 1.0
    return out_lo + (np.asarray(values, dtype=float) - lo) * (out_hi - out_lo) / span


def emit_traceplot(samples: PosteriorSamples, parameter: str, path) -> None:
    """Draw-index vs value line plot for one parameter.

    The orientation intercept is reduced to [0, pi): the polyline breaks at
    wrap-arounds and each break gets a marker, and any detected
    label-switch draws appear as vertical flag lines.
    """
    if samples.n_draws == 0:
        raise ValueError("no draws to plot")
    values = samples.draws(parameter).astype(float)
    axial = parameter == "theta_0"
    flags = []
    wraps = []
    if axial:
        values = np.mod(values, math.pi)
        jump = np.abs(np.diff(values)) > math.pi / 2
        wraps = list(np.nonzero(jump)[0] + 1)
        flags = detect_label_switch(samples)

    lo = 0.0 if axial else float(values.min())
    hi = math.pi if axial else float(values.max())
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    xs = _scale(np.arange(len(values)), 0, max(len(values) - 1, 1),
                _MARGIN, _W - 10)
    ys = _scale(values, lo, hi, _H - _MARGIN, 10)

    segments = []
    start = 0
    for brk in (*wraps, len(values)):
        if brk > start:
            segments.append(range(start, brk))
        start = brk

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect class="bg" width="{_W}" height="{_H}" fill="white"/>',
        f'<g class="axes" stroke="black" stroke-width="1">'
        f'<line x1="{_MARGIN}" y1="10" x2="{_MARGIN}" y2="{_H - _MARGIN}"/>'
        f'<line x1="{_MARGIN}" y1="{_H - _MARGIN}" x2="{_W - 10}" y2="{_H - _MARGIN}"/>'
        f"</g>",
        f'<text class="title" x="{_W // 2}" y="14" text-anchor="middle" '
        f'font-size="12">{parameter}</text>',
        f'<text class="ymax" x="4" y="16" font-size="10">{_fmt(hi)}</text>',
        f'<text class="ymin" x="4" y="{_H - _MARGIN}" font-size="10">{_fmt(lo)}</text>',
        f'<text class="xmax" x="{_W - 10}" y="{_H - 8}" text-anchor="end" '
        f'font-size="10">{len(values) - 1}</text>',
    ]
    out.append('<g class="flags" stroke="red" stroke-width="1">')
    for f in flags:
        x = _fmt(xs[f])
        out.append(f'<line class="flag" x1="{x}" y1="10" x2="{x}" y2="{_H - _MARGIN}"/>')
    out.append("</g>")
    out.append('<g class="trace" fill="none" stroke="steelblue" stroke-width="1">')
    for seg in segments:
        pts = " ".join(f"{_fmt(xs[i])},{_fmt(ys[i])}" for i in seg)
        out.append(f'<polyline points="{pts}"/>')
    out.append("</g>")
    out.append('<g class="wraps" fill="orange">')
    for wr in wraps:
        out.append(
            f'<circle class="wrap" cx="{_fmt(xs[wr])}" cy="{_fmt(ys[wr])}" r="2"/>'
        )
    out.append("</g>")
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def _ramp(t: float) -> str:
    """Blue-white-red ramp on [0, 1]."""
    t = min(max(t, 0.0), 1.0)
    if t < 0.5:
        s = t / 0.5
        r, g, b = int(70 + 185 * s), int(110 + 145 * s), 255
    else:
        s = (t - 0.5) / 0.5
        r, g, b = 255, int(255 - 145 * s), int(255 - 185 * s)
    return f"rgb({r},{g},{b})"


def emit_envelope_heatmap(envelope: CredibleEnvelope, which: str, path) -> None:
    """Heatmap of the lower or upper envelope surface over its grid."""
    if which not in ("lower", "upper"):
        raise ValueError(f"which must be 'lower' or 'upper', got {which!r}")
    surface = getattr(envelope, which)
    res = int(round(math.sqrt(len(surface))))
    lo, hi = float(surface.min()), float(surface.max())
    span = hi - lo if hi > lo else 1.0
    size = 420
    cell = (size - 2 * _MARGIN) / res
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect class="bg" width="{size}" height="{size}" fill="white"/>',
        f'<text class="title" x="{size // 2}" y="16" text-anchor="middle" '
        f'font-size="12">{which} envelope (min {_fmt(lo)}, max {_fmt(hi)})</text>',
        '<g class="cells" stroke="none">',
    ]
    # grid is raveled with x varying fastest, rows running up in y
    for idx, v in enumerate(surface):
        x = _MARGIN + (idx % res) * cell
        y = size - _MARGIN - (idx // res + 1) * cell
        out.append(
            f'<rect class="cell" x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(cell)}" '
            f'height="{_fmt(cell)}" fill="{_ramp((v - lo) / span)}"/>'
        )
    out.append("</g>")
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
