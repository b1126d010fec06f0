"""Filters on finite sets: principal filters, the stronger-than order,
limits of filters and of block maps, and a shrinking-ball realization that
ties the filter notion of limit back to the total derivative.

Exhaustive family operations are restricted to carriers of at most 16
elements; bigger spaces work through principal generators only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .calculus import (
    DEFAULT_CONFIG,
    Curve,
    ScalarField,
    ToleranceConfig,
    ball_sample_offsets,
    rate_expression,
    spatial_names,
)
from .errors import ConvergenceError, DomainError, FilterError

__all__ = [
    "EXHAUSTIVE_LIMIT",
    "FiniteSpace",
    "Partition",
    "Filter",
    "ElementMap",
    "FilterCheck",
    "BallLimitResult",
    "principal_filter",
    "is_filter",
    "stronger_than",
    "filter_limit",
    "image_filter",
    "general_function_limit",
    "ball_filter_limit",
]

EXHAUSTIVE_LIMIT = 16
BALL_COUNT = 13
BALL_POINTS = 64


def _label_key(x):
    return (type(x).__name__, repr(x))


@dataclass(frozen=True)
class FiniteSpace:
    """Nonempty finite set of opaque labels."""

    elements: frozenset

    def __post_init__(self):
        object.__setattr__(self, "elements", frozenset(self.elements))
        if not self.elements:
            raise FilterError("a finite space needs at least one element")

    @property
    def size(self):
        return len(self.elements)

    def sorted(self):
        return tuple(sorted(self.elements, key=_label_key))


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks covering the space."""

    space: FiniteSpace
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if any(not b for b in blocks):
            raise FilterError("partition blocks must be nonempty")
        union = frozenset().union(*blocks) if blocks else frozenset()
        if union != self.space.elements:
            raise FilterError("partition blocks must cover the space")
        if sum(len(b) for b in blocks) != self.space.size:
            raise FilterError("partition blocks must be pairwise disjoint")


@dataclass(frozen=True)
class Filter:
    """Family of subsets given explicitly, by a principal generator, or both."""

    space: FiniteSpace
    family: frozenset = None
    generator: frozenset = None

    def __post_init__(self):
        if self.family is None and self.generator is None:
            raise FilterError("a filter needs a family or a generator")
        if self.family is not None:
            fam = frozenset(frozenset(s) for s in self.family)
            object.__setattr__(self, "family", fam)
            for s in fam:
                if not s <= self.space.elements:
                    raise FilterError(f"member {set(s)} leaves the carrier")
        if self.generator is not None:
            gen = frozenset(self.generator)
            object.__setattr__(self, "generator", gen)
            if not gen:
                raise FilterError("principal generator must be nonempty; "
                                  "an empty generator would admit the empty "
                                  "set and break the first filter axiom")
            if not gen <= self.space.elements:
                raise FilterError("generator must lie inside the carrier")

    @property
    def is_principal(self):
        return self.generator is not None

    def members(self):
        if self.family is not None:
            return self.family
        if self.space.size > EXHAUSTIVE_LIMIT:
            raise FilterError(
                f"carrier larger than {EXHAUSTIVE_LIMIT}: family members "
                "are not materialized; use generator-based operations")
        return _supersets(self.space, self.generator)


@dataclass(frozen=True)
class ElementMap:
    """One total map per partition block into a codomain space."""

    partition: Partition
    codomain: FiniteSpace
    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(dict(m) for m in self.maps))
        if len(self.maps) != len(self.partition.blocks):
            raise FilterError("one map per partition block required")
        for i, (block, m) in enumerate(zip(self.partition.blocks, self.maps)):
            missing = block - set(m)
            if missing:
                raise FilterError(
                    f"map {i} is not total on its block; missing "
                    f"{sorted(missing, key=_label_key)}")
            stray = set(m.values()) - self.codomain.elements
            if stray:
                raise FilterError(
                    f"map {i} sends values outside the codomain: "
                    f"{sorted(stray, key=_label_key)}")

    def image(self, i):
        return frozenset(self.maps[i][x] for x in self.partition.blocks[i])


@dataclass(frozen=True)
class FilterCheck:
    ok: bool
    axiom: str = None
    witness: object = None


@dataclass(frozen=True)
class BallLimitResult:
    limit: float
    center_value: float
    radii: tuple
    deviations: tuple


def _supersets(space, g):
    rest = tuple(space.elements - g)
    out = set()
    for mask in range(1 << len(rest)):
        extra = frozenset(rest[i] for i in range(len(rest)) if mask >> i & 1)
        out.add(g | extra)
    return frozenset(out)


def principal_filter(space: FiniteSpace, g) -> Filter:
    """All supersets of g, materialized when the carrier is small enough."""
    g = frozenset(g)
    if not g or not g <= space.elements:
        raise FilterError("generator must be a nonempty subset of the carrier")
    family = _supersets(space, g) if space.size <= EXHAUSTIVE_LIMIT else None
    return Filter(space, family, g)


def _family_of(family, space):
    if isinstance(family, Filter):
        if family.space != space:
            raise FilterError("filter carrier differs from the given space")
        return family.members()
    return frozenset(frozenset(s) for s in family)


def is_filter(family, space: FiniteSpace) -> FilterCheck:
    """Check the three filter axioms in order: (a) no empty set, (b) closed
    under pairwise intersection, (c) upward closed.

    Upward closure is checked through single-element extensions, which
    suffices on a finite carrier.  Returns the first violated axiom with a
    witness.
    """
    if space.size > EXHAUSTIVE_LIMIT:
        raise FilterError(
            f"exhaustive axiom checking caps the carrier at {EXHAUSTIVE_LIMIT}")
    fam = _family_of(family, space)
    if not fam:
        raise FilterError("the empty family is not a candidate filter")
    for s in fam:
        if not s:
            return FilterCheck(False, "a", frozenset())
    for a in fam:
        for b in fam:
            if a & b not in fam:
                return FilterCheck(False, "b", (a, b))
    for a in fam:
        for x in space.elements - a:
            if a | {x} not in fam:
                return FilterCheck(False, "c", (a, a | {x}))
    return FilterCheck(True)


def stronger_than(h: Filter, b: Filter) -> bool:
    """Does every member of b contain some member of h?

    Principal representations short-circuit: principal(G_h) is stronger
    than principal(G_b) exactly when G_h is a subset of G_b.
    """
    if h.space != b.space:
        raise FilterError("filters live on different carriers")
    if h.is_principal and b.is_principal:
        return h.generator <= b.generator
    if b.is_principal:
        # every member of b contains G_b, and G_b itself is a member
        return any(x <= b.generator for x in h.members())
    if h.is_principal:
        return all(h.generator <= a for a in b.members())
    hm = h.members()
    return all(any(x <= a for x in hm) for a in b.members())


def filter_limit(h: Filter, space: FiniteSpace, g) -> bool:
    """g is a limit of h when h is stronger than the principal filter of g."""
    return stronger_than(h, principal_filter(space, frozenset(g)))


def image_filter(m: ElementMap, i: int, p_i: Filter,
                 k: FiniteSpace) -> Filter:
    """Push the principal filter of block i through the block map: the
    result is the principal filter of the image set in the codomain."""
    if not 0 <= i < len(m.partition.blocks):
        raise FilterError(f"no block with index {i}")
    block = m.partition.blocks[i]
    if p_i.space != m.partition.space:
        raise FilterError("filter carrier differs from the partition space")
    if p_i.generator is not None:
        principal_at_block = p_i.generator == block
    else:
        principal_at_block = p_i.members() == _supersets(p_i.space, block)
    if not principal_at_block:
        raise FilterError(
            f"the filter must be the principal filter of block {i}")
    if k != m.codomain:
        raise FilterError("codomain space mismatch")
    return principal_filter(k, m.image(i))


def general_function_limit(m: ElementMap, i: int, a) -> bool:
    """Is a (subset of the codomain) a limit of the block map at block i?

    True exactly when the image filter is stronger than the principal
    filter of a.
    """
    a = frozenset(a)
    if not a or not a <= m.codomain.elements:
        raise FilterError("the candidate limit must be a nonempty subset "
                          "of the codomain")
    space = m.partition.space
    fd = image_filter(m, i, principal_filter(space, m.partition.blocks[i]),
                      m.codomain)
    return stronger_than(fd, principal_filter(m.codomain, a))


def ball_filter_limit(field: ScalarField, curve: Curve, t: float,
                      cfg: ToleranceConfig = DEFAULT_CONFIG) -> BallLimitResult:
    """Realize the filter limit of the off-curve rate numerically: sample
    the rate on shrinking spheres around the curve point and extrapolate.

    Spheres have radii ball_radius0 * shrink^k for k = 0..12 with 64
    deterministic antipodal points each.  Per-ball deviations from the
    center value must shrink monotonically within 10% slack (plus a tiny
    absolute floor for rounding plateaus); a violation signals a
    discontinuity.  The returned limit is Richardson-extrapolated from the
    last two sphere means.
    """
    g = rate_expression(field, curve)
    names = spatial_names(field.dimension)
    center = np.array(curve.point(t), dtype=float)
    try:
        a0 = dict(zip(names, center))
        a0["t"] = t
        center_value = ex.evaluate(g, a0)
    except DomainError as err:
        raise ConvergenceError(
            f"rate undefined at the curve point for t={t}: {err}") from err

    radii = tuple(cfg.ball_radius0 * cfg.shrink ** k for k in range(BALL_COUNT))
    means = []
    deviations = []
    for r in radii:
        offsets = ball_sample_offsets(len(names), r, BALL_POINTS)
        values = []
        for off in offsets:
            a = dict(zip(names, center + off))
            a["t"] = t
            try:
                values.append(ex.evaluate(g, a))
            except DomainError as err:
                raise ConvergenceError(
                    f"rate undefined at radius {r} around t={t}: {err}"
                ) from err
        means.append(float(np.mean(values)))
        deviations.append(float(np.max(np.abs(np.array(values)
                                              - center_value))))

    floor = 1e-12 * max(1.0, abs(center_value))
    for k in range(BALL_COUNT - 1):
        if deviations[k + 1] > 1.1 * deviations[k] + floor:
            raise ConvergenceError(
                f"sphere deviations stopped shrinking between radii "
                f"{radii[k]} and {radii[k + 1]}; the rate looks "
                "discontinuous at the curve point")

    s2 = cfg.shrink ** 2
    limit = (means[-1] - s2 * means[-2]) / (1.0 - s2)
    return BallLimitResult(limit, center_value, radii, tuple(deviations))
