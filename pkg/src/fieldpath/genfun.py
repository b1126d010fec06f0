"""Functional elements (a region paired with a field), general functions,
and direct analytic prolongation checked on sampled overlaps.

Regions are spatial; fields carry an extra time slot that defaults to 0 in
all region-based comparisons.  Overlap agreement is sampled on a
deterministic grid of pitch min-extent/64, never proven.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from . import expr as ex
from .calculus import ScalarField, spatial_names
from .errors import (
    DimensionError,
    DomainError,
    NondifferentiableError,
    RegionError,
)

__all__ = [
    "Region",
    "Box",
    "Ball",
    "PointSet",
    "FunctionalElement",
    "GeneralFunction",
    "ProlongationResult",
    "CoherenceReport",
    "restrict",
    "overlap",
    "region_samples",
    "direct_prolongation",
    "derivative_general_function",
    "coherence_check",
]

GRID_DIVISIONS = 64


class Region:
    """Marker base for spatial region descriptors."""


@dataclass(frozen=True)
class Box(Region):
    lower: tuple
    upper: tuple

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if not self.lower or len(self.lower) != len(self.upper):
            raise DimensionError("box corners must be nonempty, equal length")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("box lower corner must not exceed upper corner")

    @property
    def dimension(self):
        return len(self.lower)

    def contains(self, point):
        return all(lo <= p <= hi
                   for lo, p, hi in zip(self.lower, point, self.upper))


@dataclass(frozen=True)
class Ball(Region):
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.center:
            raise DimensionError("ball center must be nonempty")
        if self.radius <= 0:
            raise ValueError("ball radius must be strictly positive")

    @property
    def dimension(self):
        return len(self.center)

    def contains(self, point):
        return math.dist(self.center, point) <= self.radius

    def bounding_box(self):
        return Box(tuple(c - self.radius for c in self.center),
                   tuple(c + self.radius for c in self.center))


@dataclass(frozen=True)
class PointSet(Region):
    points: tuple

    def __post_init__(self):
        pts = tuple(sorted(tuple(float(v) for v in p) for p in self.points))
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("point set must be nonempty")
        if any(len(p) != len(pts[0]) for p in pts):
            raise DimensionError("points must share a dimension")

    @property
    def dimension(self):
        return len(self.points[0])

    def contains(self, point):
        return tuple(point) in self.points


@dataclass(frozen=True)
class FunctionalElement:
    """A field together with the region it is declared on."""

    region: Region
    field: ScalarField

    def __post_init__(self):
        if self.field.dimension != self.region.dimension + 1:
            raise DimensionError(
                f"field dimension {self.field.dimension} does not match "
                f"region dimension {self.region.dimension} + time")

    def value(self, point, t=0.0):
        if not self.region.contains(point):
            raise RegionError(f"point {tuple(point)} lies outside the region")
        return self.field.value(point, t)


@dataclass(frozen=True)
class GeneralFunction:
    """Finitely many functional elements plus free-text metadata."""

    elements: tuple
    functor: str = ""
    source_category: str = ""
    target_category: str = ""
    topology: str = "power set"

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise ValueError("a general function needs at least one element")
        dims = {e.region.dimension for e in self.elements}
        if len(dims) != 1:
            raise DimensionError(
                f"elements live in different ambient dimensions {sorted(dims)}")

    @property
    def dimension(self):
        return self.elements[0].region.dimension


@dataclass(frozen=True)
class ProlongationResult:
    agree: bool
    max_deviation: float
    sample_count: int


@dataclass(frozen=True)
class CoherenceReport:
    coherent: bool
    incoherent_pairs: tuple
    worst_deviation: float
    checked_pairs: int


def restrict(field: ScalarField, region: Region) -> FunctionalElement:
    """Pair the field with a region; the expression itself is untouched."""
    return FunctionalElement(region, field)


def _grid_axes(lower, upper):
    extents = [hi - lo for lo, hi in zip(lower, upper)]
    positive = [e for e in extents if e > 0]
    if not positive:
        return [[lo] for lo in lower]
    pitch = min(positive) / GRID_DIVISIONS
    axes = []
    for lo, hi, extent in zip(lower, upper, extents):
        if extent == 0:
            axes.append([lo])
        else:
            count = int(math.floor(extent / pitch + 1e-9)) + 1
            axes.append([lo + extent * k / (count - 1) for k in range(count)])
    return axes


def region_samples(region: Region):
    """Deterministic sample points covering a region (grid pitch
    min-extent/64 for boxes and balls, the literal points otherwise)."""
    if isinstance(region, PointSet):
        return region.points
    if isinstance(region, Box):
        axes = _grid_axes(region.lower, region.upper)
        return tuple(itertools.product(*axes))
    if isinstance(region, Ball):
        box = region.bounding_box()
        axes = _grid_axes(box.lower, box.upper)
        return tuple(p for p in itertools.product(*axes) if region.contains(p))
    raise TypeError(f"not a region: {region!r}")


def overlap(a: Region, b: Region):
    """Intersection of two regions: exact for box/box and point sets, a
    grid-sampled point set for anything involving a ball.  Returns None
    when the intersection is (or samples as) empty."""
    if a.dimension != b.dimension:
        raise DimensionError("regions live in different ambient dimensions")
    if isinstance(a, Box) and isinstance(b, Box):
        lower = tuple(max(x, y) for x, y in zip(a.lower, b.lower))
        upper = tuple(min(x, y) for x, y in zip(a.upper, b.upper))
        if any(lo > hi for lo, hi in zip(lower, upper)):
            return None
        return Box(lower, upper)
    if isinstance(a, PointSet) or isinstance(b, PointSet):
        if isinstance(a, PointSet) and isinstance(b, PointSet):
            pts = sorted(set(a.points) & set(b.points))
        else:
            ps, other = (a, b) if isinstance(a, PointSet) else (b, a)
            pts = [p for p in ps.points if other.contains(p)]
        return PointSet(tuple(pts)) if pts else None
    # at least one ball: sample the intersection of bounding boxes
    abox = a.bounding_box() if isinstance(a, Ball) else a
    bbox = b.bounding_box() if isinstance(b, Ball) else b
    frame = overlap(abox, bbox)
    if frame is None:
        return None
    pts = [p for p in region_samples(frame)
           if a.contains(p) and b.contains(p)]
    return PointSet(tuple(pts)) if pts else None


def direct_prolongation(e1: FunctionalElement, e2: FunctionalElement,
                        tol: float) -> ProlongationResult:
    """Do the two elements overlap and agree there?

    Agreement means max |f1 - f2| <= tol over the sampled overlap; empty
    overlap fails with zero samples.  Fields are compared at t = 0.
    """
    shared = overlap(e1.region, e2.region)
    if shared is None:
        return ProlongationResult(False, 0.0, 0)
    names = spatial_names(e1.field.dimension)
    worst = 0.0
    samples = region_samples(shared)
    for p in samples:
        a = dict(zip(names, p))
        a["t"] = 0.0
        worst = max(worst, abs(ex.evaluate(e1.field.body, a)
                               - ex.evaluate(e2.field.body, a)))
    return ProlongationResult(worst <= tol, worst, len(samples))


def derivative_general_function(f: GeneralFunction, v) -> GeneralFunction:
    """Differentiate every element with respect to v, keeping regions and
    metadata.

    If any element's derivative hits an evaluation domain error somewhere on
    its region samples, the whole function is not differentiable.
    """
    name = v.name if isinstance(v, ex.Var) else v
    new_elements = []
    for idx, elem in enumerate(f.elements):
        d = ex.simplify(ex.differentiate(elem.field.body, name))
        names = spatial_names(elem.field.dimension)
        for p in region_samples(elem.region):
            a = dict(zip(names, p))
            a["t"] = 0.0
            try:
                ex.evaluate(d, a)
            except DomainError as err:
                raise NondifferentiableError(
                    f"element {idx} derivative undefined at {p}: {err}"
                ) from err
        new_elements.append(FunctionalElement(
            elem.region, ScalarField(elem.field.dimension, d)))
    return GeneralFunction(tuple(new_elements), f.functor, f.source_category,
                           f.target_category, f.topology)


def coherence_check(f: GeneralFunction, tol: float) -> CoherenceReport:
    """Run direct prolongation over every overlapping pair of elements."""
    bad = []
    worst = 0.0
    checked = 0
    for i in range(len(f.elements)):
        for j in range(i + 1, len(f.elements)):
            if overlap(f.elements[i].region, f.elements[j].region) is None:
                continue
            checked += 1
            result = direct_prolongation(f.elements[i], f.elements[j], tol)
            worst = max(worst, result.max_deviation)
            if not result.agree:
                bad.append((i, j))
    return CoherenceReport(not bad, tuple(bad), worst, checked)
