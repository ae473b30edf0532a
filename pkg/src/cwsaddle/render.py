"""Deterministic SVG figures.

Numbers are written with a fixed number of decimals and elements in a fixed
order, so the same inputs give byte-identical files. Elements carry a
``class`` attribute (``segment``, ``base``, ``marker``, ``leaf``, ``cell``,
...) so tests can count them.
"""
from __future__ import annotations

import math

import numpy as np

FIGURES = ("E", "T-action", "foliation", "stable-partition", "orbit")

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
            "#7f7f7f", "#bcbd22", "#17becf")


def _f(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


class Canvas:
    """Maps a data window onto a square pixel canvas (y axis pointing up)."""

    def __init__(self, window, size: int = 600, margin: int = 20, title: str = ""):
        self.x0, self.x1, self.y0, self.y1 = (float(v) for v in window)
        self.size = size
        self.margin = margin
        self.title = title
        self.items: list[str] = []

    def _px(self, x, y):
        w = self.size - 2 * self.margin
        sx = self.margin + (x - self.x0) / (self.x1 - self.x0) * w
        sy = self.size - self.margin - (y - self.y0) / (self.y1 - self.y0) * w
        return sx, sy

    def line(self, a, b, cls, stroke="#000", width=1.0):
        (ax, ay), (bx, by) = self._px(*a), self._px(*b)
        self.items.append(f'<line class="{cls}" x1="{_f(ax)}" y1="{_f(ay)}" x2="{_f(bx)}" '
                          f'y2="{_f(by)}" stroke="{stroke}" stroke-width="{_f(width)}"/>')

    def polyline(self, pts, cls, stroke="#000", width=1.0):
        if len(pts) < 2:
            return
        d = " ".join(f"{_f(x)},{_f(y)}" for x, y in (self._px(*p) for p in pts))
        self.items.append(f'<polyline class="{cls}" points="{d}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{_f(width)}"/>')

    def circle(self, c, r_px, cls, fill="#000"):
        x, y = self._px(*c)
        self.items.append(f'<circle class="{cls}" cx="{_f(x)}" cy="{_f(y)}" r="{_f(r_px)}" fill="{fill}"/>')

    def ring(self, c, r, cls, stroke="#999"):
        x, y = self._px(*c)
        rp = r / (self.x1 - self.x0) * (self.size - 2 * self.margin)
        self.items.append(f'<circle class="{cls}" cx="{_f(x)}" cy="{_f(y)}" r="{_f(rp)}" '
                          f'fill="none" stroke="{stroke}" stroke-width="0.500"/>')

    def rect(self, c, half, cls, fill):
        (ax, ay), (bx, by) = self._px(c[0] - half, c[1] + half), self._px(c[0] + half, c[1] - half)
        self.items.append(f'<rect class="{cls}" x="{_f(ax)}" y="{_f(ay)}" width="{_f(bx - ax)}" '
                          f'height="{_f(by - ay)}" fill="{fill}"/>')

    def to_svg(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" height="{self.size}" '
                f'viewBox="0 0 {self.size} {self.size}">\n')
        title = f"<title>{self.title}</title>\n" if self.title else ""
        bg = f'<rect class="background" x="0" y="0" width="{self.size}" height="{self.size}" fill="#fff"/>\n'
        return head + title + bg + "\n".join(self.items) + "\n</svg>\n"


# ---------------------------------------------------------------- figures

def render_e(generations: int = 8, indices: int = 12) -> str:
    """The base [0, 1] x {0} and the segments {a} x [0, a] up to the cutoffs."""
    from .eset import ESet

    cv = Canvas((-0.05, 1.05, -0.05, 1.05), title=f"E: {generations} generations x {indices} indices")
    cv.line((0.0, 0.0), (1.0, 0.0), "base", width=1.5)
    for _, _, a in ESet().segments(generations, indices):
        cv.line((a, 0.0), (a, a), "segment", width=0.6)
    return cv.to_svg()


def render_t_action(lines: int = 9) -> str:
    """A square grid of [-1, 1]^2 (grey) and its image under T (colour)."""
    from .plmap import apply_pl

    cv = Canvas((-1.1, 1.1, -1.1, 1.1), title="action of T")
    g = np.linspace(-1.0, 1.0, lines)
    s = np.linspace(-1.0, 1.0, 81)
    families = [[(a, b) for b in s] for a in g] + [[(b, a) for b in s] for a in g]
    for poly in families:
        cv.polyline(poly, "grid", stroke="#bbb", width=0.5)
    for k, poly in enumerate(families):
        img = [apply_pl(p) for p in poly]
        img = [p for p in img if abs(p[0]) <= 1.1 and abs(p[1]) <= 1.1]
        cv.polyline(img, "image", stroke=_PALETTE[0] if k < lines else _PALETTE[3], width=0.8)
    # region boundaries: the diagonal wedge and the axes
    cv.line((0.0, 0.0), (1.0, 1.0), "boundary", stroke="#000", width=1.0)
    cv.line((0.0, 0.0), (1.0, 0.0), "boundary", stroke="#000", width=1.0)
    cv.line((0.0, 0.0), (0.0, 1.0), "boundary", stroke="#000", width=1.0)
    return cv.to_svg()


def foliation_leaves(count: int = 24, samples: int = 400) -> list[np.ndarray]:
    """psi-images of the vertical chart lines ``u1 = c`` of side 2, clipped to the annulus.

    Each image is an arc of the circle of radius ``1/(2|c|)`` centred at
    ``(1/(2c), 0)``, or the axis itself for ``c = 0``. Returns polylines in
    side-1 chart coordinates.
    """
    from .surface import psi_invert

    out = []
    cs = np.linspace(-2.0, 2.0, count + 1)
    if count % 2 == 0:
        cs[count // 2] = 0.0  # the stable axis, exactly
    for c in cs:
        t = np.linspace(-2.0, 2.0, samples)
        run = []
        for v in t:
            if c == 0.0 and v == 0.0:
                continue
            p = psi_invert((c, v))
            r = math.hypot(*p)
            if 0.5 <= r <= 2.0:
                run.append(p)
            elif run:
                out.append(np.asarray(run))
                run = []
        if run:
            out.append(np.asarray(run))
    return [leaf for leaf in out if leaf.shape[0] >= 2]


def render_foliation(count: int = 24) -> str:
    cv = Canvas((-2.1, 2.1, -2.1, 2.1), title="unstable foliation of f2 on the annulus")
    for r in (0.5, 1.0, 2.0):
        cv.ring((0.0, 0.0), r, "annulus-boundary")
    for leaf in foliation_leaves(count):
        cv.polyline(leaf, "leaf", stroke=_PALETTE[0], width=0.7)
    return cv.to_svg()


def render_stable_partition(sample) -> str:
    """Cells coloured by :class:`~cwsaddle.lab.PartitionSample` labels (grey: unresolved)."""
    cv = Canvas((-2.1, 2.1, -2.1, 2.1), title="stable partition on the annulus")
    pts = sample.points
    if pts.shape[0] > 1:
        xs = np.unique(pts[:, 0])
        half = 0.5 * float(np.min(np.diff(xs))) if xs.size > 1 else 0.02
    else:
        half = 0.02
    for p, lab in zip(pts, sample.labels):
        fill = "#ccc" if lab < 0 else _PALETTE[int(lab) % len(_PALETTE)]
        cv.rect(p, half, "cell", fill)
    for r in (0.5, 1.0, 2.0):
        cv.ring((0.0, 0.0), r, "annulus-boundary", stroke="#000")
    return cv.to_svg()


def render_orbit(points) -> str:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    lo = np.minimum(pts.min(axis=0), 0.0) - 0.05
    hi = np.maximum(pts.max(axis=0), 1.0) + 0.05
    side = float(max(hi - lo))
    cv = Canvas((lo[0], lo[0] + side, lo[1], lo[1] + side), title=f"orbit of {len(pts) - 1} steps")
    cv.polyline([tuple(p) for p in pts], "path", stroke="#999", width=0.5)
    for p in pts:
        cv.circle(tuple(p), 2.5, "marker", fill=_PALETTE[3])
    return cv.to_svg()
