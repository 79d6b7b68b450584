"""Piecewise-constant diffusion coefficients and cell averaging."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "MaterialError",
    "OnInterfaceError",
    "Rect",
    "Subdomain",
    "MaterialPartition",
    "AverageStrategy",
    "simplified_partition",
    "arithmetic_interface_kappa",
    "harmonic_interface_kappa",
    "kappa_at",
    "clip_polygon",
    "polygon_area",
    "area_fractions",
    "cell_kappa",
    "average",
]


class MaterialError(ValueError):
    pass


class OnInterfaceError(MaterialError):
    """The coefficient is not defined on a material interface."""


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise MaterialError(f"degenerate rectangle {self}")

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)


@dataclass(frozen=True)
class Subdomain:
    """Axis-aligned polygonal region given as a union of disjoint rectangles."""

    rects: tuple[Rect, ...]
    kappa: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise MaterialError(f"kappa must be positive, got {self.kappa}")
        if not self.rects:
            raise MaterialError("subdomain needs at least one rectangle")

    def contains(self, x: float, y: float) -> bool:
        return any(r.contains(x, y) for r in self.rects)

    @property
    def area(self) -> float:
        return sum(r.area for r in self.rects)


@dataclass(frozen=True)
class MaterialPartition:
    subdomains: tuple[Subdomain, ...]
    domain: Rect = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.subdomains:
            raise MaterialError("partition needs at least one subdomain")
        rects = [r for s in self.subdomains for r in s.rects]
        if self.domain is None:
            box = Rect(min(r.x0 for r in rects), max(r.x1 for r in rects),
                       min(r.y0 for r in rects), max(r.y1 for r in rects))
            object.__setattr__(self, "domain", box)
        for a in range(len(rects)):
            for b in range(a + 1, len(rects)):
                if _overlap_area(rects[a], rects[b]) > 0.0:
                    raise MaterialError(f"subdomains overlap: {rects[a]} and {rects[b]}")
        covered = sum(r.area for r in rects)
        if not np.isclose(covered, self.domain.area, rtol=1e-12, atol=0.0):
            raise MaterialError(
                f"subdomains cover area {covered}, domain has area {self.domain.area}"
            )

    @property
    def kappas(self) -> np.ndarray:
        return np.array([s.kappa for s in self.subdomains])


def _overlap_area(r: Rect, s: Rect) -> float:
    w = min(r.x1, s.x1) - max(r.x0, s.x0)
    h = min(r.y1, s.y1) - max(r.y0, s.y0)
    return w * h if (w > 0 and h > 0) else 0.0


def simplified_partition(kappa_minus: float) -> MaterialPartition:
    """Two materials: ``kappa_minus`` on (0, 1/2) x (0, 1) and 1 on (1/2, 1) x (0, 1)."""
    if not kappa_minus >= 1.0:
        raise MaterialError(f"kappa_minus must be >= 1, got {kappa_minus}")
    left = Subdomain((Rect(0.0, 0.5, 0.0, 1.0),), float(kappa_minus))
    right = Subdomain((Rect(0.5, 1.0, 0.0, 1.0),), 1.0)
    return MaterialPartition((left, right), Rect(0.0, 1.0, 0.0, 1.0))


def arithmetic_interface_kappa(kappa_minus: float) -> float:
    return (kappa_minus + 1.0) / 2.0


def harmonic_interface_kappa(kappa_minus: float) -> float:
    return 2.0 * kappa_minus / (kappa_minus + 1.0)


class AverageStrategy(enum.Enum):
    ARITHMETIC = "arithmetic"
    HARMONIC = "harmonic"

    @classmethod
    def parse(cls, value: "AverageStrategy | str") -> "AverageStrategy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise MaterialError(f"unknown strategy {value!r}") from None

    def interface_kappa(self, kappa_minus: float) -> float:
        """Average over a cell split half/half between ``kappa_minus`` and 1."""
        if self is AverageStrategy.ARITHMETIC:
            return arithmetic_interface_kappa(kappa_minus)
        return harmonic_interface_kappa(kappa_minus)


def kappa_at(partition: MaterialPartition, point) -> float:
    x, y = (float(v) for v in point)
    if not partition.domain.contains(x, y):
        raise MaterialError(f"point {(x, y)} outside the domain")
    hits = [s for s in partition.subdomains if s.contains(x, y)]
    if len(hits) != 1:
        raise OnInterfaceError(f"point {(x, y)} lies on a material interface")
    return hits[0].kappa


def polygon_area(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    d = poly - poly[0]  # shift to cut cancellation
    x, y = d[:, 0], d[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def _clip_halfplane(poly, axis, bound, keep_below):
    out = []
    n = len(poly)
    for k in range(n):
        p, q = poly[k], poly[(k + 1) % n]
        p_in = p[axis] <= bound if keep_below else p[axis] >= bound
        q_in = q[axis] <= bound if keep_below else q[axis] >= bound
        if p_in:
            out.append(p)
        if p_in != q_in:
            t = (bound - p[axis]) / (q[axis] - p[axis])
            r = p + t * (q - p)
            r[axis] = bound
            out.append(r)
    return np.array(out).reshape(-1, 2)


def clip_polygon(poly, rect: Rect) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon against an axis-aligned box."""
    out = np.asarray(poly, dtype=float).reshape(-1, 2)
    for axis, bound, below in ((0, rect.x0, False), (0, rect.x1, True),
                               (1, rect.y0, False), (1, rect.y1, True)):
        if len(out) == 0:
            break
        out = _clip_halfplane(out, axis, bound, below)
    return out


def area_fractions(partition: MaterialPartition, cell) -> np.ndarray:
    """Fraction of the cell area inside each subdomain."""
    cell = np.asarray(cell, dtype=float).reshape(-1, 2)
    total = polygon_area(cell)
    if total <= 0.0:
        raise MaterialError("cell has zero area")
    pieces = np.array([
        sum(polygon_area(clip_polygon(cell, r)) for r in s.rects)
        for s in partition.subdomains
    ])
    covered = pieces.sum()
    if not np.isclose(covered, total, rtol=1e-10, atol=0.0):
        raise MaterialError("cell is not contained in the partitioned domain")
    return pieces / covered


def average(kappas: Sequence[float], fractions: Sequence[float],
            strategy: AverageStrategy | str) -> float:
    """Volume-fraction weighted mean of ``kappas``."""
    k = np.asarray(kappas, dtype=float)
    th = np.asarray(fractions, dtype=float)
    present = th > 0.0
    if np.count_nonzero(present) == 1:
        return float(k[present][0])
    strategy = AverageStrategy.parse(strategy)
    if strategy is AverageStrategy.ARITHMETIC:
        return float(np.dot(th, k))
    return float(1.0 / np.dot(th, 1.0 / k))


def cell_kappa(partition: MaterialPartition, cell,
               strategy: AverageStrategy | str | None) -> float:
    """Averaged coefficient of one grid cell (vertices in cyclic order).

    ``strategy`` may be ``None`` only if the cell holds a single material.
    """
    th = area_fractions(partition, cell)
    if np.count_nonzero(th > 0.0) > 1 and strategy is None:
        raise MaterialError("cell holds several materials; an averaging strategy is required")
    return average(partition.kappas, th, strategy)
