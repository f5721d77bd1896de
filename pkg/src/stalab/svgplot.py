"""Minimal deterministic SVG line/scatter emission (no styling contract)."""

from __future__ import annotations

import numpy as np

__all__ = ["LinePlot", "save_line_svg"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 640, 420
_ML, _MR, _MT, _MB = 62, 16, 34, 46


def _fmt(x: float) -> str:
    return f"{x:.2f}"


class LinePlot:
    """Collects line/scatter series and writes one standalone SVG."""

    def __init__(self, title: str = "", xlabel: str = "", ylabel: str = ""):
        self.title = title
        self.xlabel = xlabel
        self.ylabel = ylabel
        self.series = []  # (x, y, label, kind, dashed)

    def line(self, x, y, label: str = "", dashed: bool = False):
        self.series.append((np.asarray(x, float), np.asarray(y, float),
                            label, "line", dashed))
        return self

    def scatter(self, x, y, label: str = ""):
        self.series.append((np.asarray(x, float), np.asarray(y, float),
                            label, "scatter", False))
        return self

    def _limits(self):
        xs = np.concatenate([s[0] for s in self.series])
        ys = np.concatenate([s[1] for s in self.series])
        ys = ys[np.isfinite(ys)]
        x0, x1 = float(np.min(xs)), float(np.max(xs))
        y0, y1 = float(np.min(ys)), float(np.max(ys))
        if x1 == x0:
            x1 = x0 + 1.0
        if y1 == y0:
            y1 = y0 + 1.0
        pad = 0.05 * (y1 - y0)
        return x0, x1, y0 - pad, y1 + pad

    def write(self, path) -> None:
        x0, x1, y0, y1 = self._limits()
        pw = _W - _ML - _MR
        ph = _H - _MT - _MB

        def sx(x):
            return _ML + (x - x0) / (x1 - x0) * pw

        def sy(y):
            return _MT + (y1 - y) / (y1 - y0) * ph

        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
            f'height="{_H}" viewBox="0 0 {_W} {_H}">',
            f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
            f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
            f'fill="none" stroke="#333" stroke-width="1"/>',
        ]
        if self.title:
            parts.append(f'<text x="{_W // 2}" y="20" text-anchor="middle" '
                         f'font-size="14" font-family="monospace">{self.title}</text>')
        if self.xlabel:
            parts.append(f'<text x="{_W // 2}" y="{_H - 12}" text-anchor="middle" '
                         f'font-size="12" font-family="monospace">{self.xlabel}</text>')
        if self.ylabel:
            parts.append(f'<text x="14" y="{_H // 2}" text-anchor="middle" '
                         f'font-size="12" font-family="monospace" '
                         f'transform="rotate(-90 14 {_H // 2})">{self.ylabel}</text>')
        # axis ticks: 5 per axis
        for i in range(5):
            xv = x0 + (x1 - x0) * i / 4.0
            yv = y0 + (y1 - y0) * i / 4.0
            parts.append(f'<text x="{_fmt(sx(xv))}" y="{_H - _MB + 16}" '
                         f'text-anchor="middle" font-size="10" '
                         f'font-family="monospace">{xv:.3g}</text>')
            parts.append(f'<text x="{_ML - 6}" y="{_fmt(sy(yv) + 3)}" '
                         f'text-anchor="end" font-size="10" '
                         f'font-family="monospace">{yv:.3g}</text>')
        for k, (xs, ys, label, kind, dashed) in enumerate(self.series):
            color = _COLORS[k % len(_COLORS)]
            ok = np.isfinite(ys)
            if kind == "line":
                pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}"
                               for x, y in zip(xs[ok], ys[ok]))
                dash = ' stroke-dasharray="6 4"' if dashed else ""
                parts.append(f'<polyline points="{pts}" fill="none" '
                             f'stroke="{color}" stroke-width="1.4"{dash}/>')
            else:
                for x, y in zip(xs[ok], ys[ok]):
                    parts.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" '
                                 f'r="2.2" fill="{color}"/>')
            if label:
                parts.append(f'<text x="{_W - _MR - 8}" y="{_MT + 16 + 14 * k}" '
                             f'text-anchor="end" font-size="11" fill="{color}" '
                             f'font-family="monospace">{label}</text>')
        parts.append("</svg>")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(parts) + "\n")


def save_line_svg(path, x, series: dict, title: str = "", xlabel: str = "",
                  ylabel: str = "") -> None:
    plot = LinePlot(title, xlabel, ylabel)
    for label, y in series.items():
        plot.line(x, y, label=label)
    plot.write(path)
