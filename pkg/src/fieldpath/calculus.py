"""Scalar fields, curves, and path functions as distinct types, plus the
limit-evaluated total derivative that connects them.

A :class:`ScalarField` lives on all of R^n (n-1 spatial coordinates plus
time), a :class:`Curve` maps time into that space, and a
:class:`PathFunction` is a function of time alone.  The only way to turn a
field into a path function is :func:`compose`; the only derivative of the
composition is the total derivative.  Confusing the three is a type error
here, not a notational slip.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .errors import ConvergenceError, DimensionError, DomainError

__all__ = [
    "ScalarField",
    "Curve",
    "SampledCurve",
    "PathFunction",
    "ToleranceConfig",
    "spatial_names",
    "gradient",
    "time_partial",
    "velocity",
    "compose",
    "total_derivative",
    "advective_term",
    "total_derivative_expression",
    "advective_term_expression",
    "rate_expression",
    "epsilon_delta_witness",
]

_SAMPLE_SEED = 20177


def spatial_names(dimension):
    """Coordinate names x1..x{n-1} for an n-dimensional field."""
    return tuple(f"x{i}" for i in range(1, dimension))


@dataclass(frozen=True)
class ScalarField:
    """A real field on R^n; the body may mention x1..x{n-1} and t."""

    dimension: int
    body: ex.Expression

    def __post_init__(self):
        if self.dimension < 2:
            raise DimensionError("field dimension must be at least 2")
        allowed = set(spatial_names(self.dimension)) | {"t"}
        extra = ex.free_variables(self.body) - allowed
        if extra:
            raise DimensionError(
                f"field body uses {sorted(extra)} outside x1..x{self.dimension - 1}, t")

    @classmethod
    def from_text(cls, dimension, text):
        return cls(dimension, ex.parse(text))

    def value(self, point, t):
        a = dict(zip(spatial_names(self.dimension), point))
        a["t"] = t
        return ex.evaluate(self.body, a)


@dataclass(frozen=True)
class Curve:
    """Closed-form curve t -> (x1(t), .., x{n-1}(t)); the time coordinate
    rides along implicitly."""

    components: tuple
    smoothness: str = "C1"

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.smoothness not in ("C1", "C2"):
            raise ValueError("smoothness grade must be 'C1' or 'C2'")
        for c in self.components:
            extra = ex.free_variables(c) - {"t"}
            if extra:
                raise DimensionError(
                    f"curve component uses {sorted(extra)}; only t is allowed")

    @classmethod
    def from_text(cls, texts, smoothness="C1"):
        return cls(tuple(ex.parse(s) for s in texts), smoothness)

    @property
    def dimension(self):
        return len(self.components) + 1

    def point(self, t):
        return tuple(ex.evaluate(c, {"t": t}) for c in self.components)


@dataclass(frozen=True)
class SampledCurve:
    """Polyline curve from a fixed-step solve; linear interpolation between
    nodes, with the node velocities kept alongside."""

    times: tuple
    points: tuple          # rows, one per time, length n-1 each
    velocities: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "points",
                           tuple(tuple(map(float, row)) for row in self.points))
        if self.velocities is not None:
            object.__setattr__(
                self, "velocities",
                tuple(tuple(map(float, row)) for row in self.velocities))
        if len(self.times) != len(self.points):
            raise DimensionError("one sample row per time required")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("sample times must be strictly increasing")

    @property
    def dimension(self):
        return len(self.points[0]) + 1

    def point(self, t):
        ts = self.times
        if t <= ts[0]:
            return self.points[0]
        if t >= ts[-1]:
            return self.points[-1]
        j = bisect.bisect_right(ts, t)
        w = (t - ts[j - 1]) / (ts[j] - ts[j - 1])
        a, b = self.points[j - 1], self.points[j]
        return tuple(ai + w * (bi - ai) for ai, bi in zip(a, b))


@dataclass(frozen=True)
class PathFunction:
    """A function of t alone: a closed-form body, or a sampled table when no
    closed form exists."""

    body: ex.Expression = None
    samples: tuple = None

    def __post_init__(self):
        if (self.body is None) == (self.samples is None):
            raise ValueError("provide exactly one of body or samples")
        if self.body is not None:
            extra = ex.free_variables(self.body) - {"t"}
            if extra:
                raise DimensionError(
                    f"path body uses {sorted(extra)}; only t is allowed")
        else:
            object.__setattr__(
                self, "samples",
                tuple((float(t), float(v)) for t, v in self.samples))

    @classmethod
    def from_text(cls, text):
        return cls(body=ex.parse(text))

    def value(self, t):
        if self.body is not None:
            return ex.evaluate(self.body, {"t": t})
        ts = [tv for tv, _ in self.samples]
        vs = [v for _, v in self.samples]
        if t <= ts[0]:
            return vs[0]
        if t >= ts[-1]:
            return vs[-1]
        j = bisect.bisect_right(ts, t)
        w = (t - ts[j - 1]) / (ts[j] - ts[j - 1])
        return vs[j - 1] + w * (vs[j] - vs[j - 1])


@dataclass(frozen=True)
class ToleranceConfig:
    """Numeric knobs: finite-difference step, identity tolerance, ODE step,
    and the starting radius / shrink factor for ball limits."""

    fd_step: float = 1e-6
    eq_tol: float = 1e-9
    ode_step: float = 1e-3
    ball_radius0: float = 0.5
    shrink: float = 0.5

    def __post_init__(self):
        for name in ("fd_step", "eq_tol", "ode_step", "ball_radius0", "shrink"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.shrink >= 1:
            raise ValueError("shrink must be below 1")


DEFAULT_CONFIG = ToleranceConfig()


# ---------------------------------------------------------------------------
# Exact building blocks

def gradient(field: ScalarField):
    """Spatial partial derivatives (one expression per x_i)."""
    return tuple(ex.simplify(ex.differentiate(field.body, name))
                 for name in spatial_names(field.dimension))


def time_partial(field: ScalarField) -> ex.Expression:
    """Explicit time partial derivative of the field."""
    return ex.simplify(ex.differentiate(field.body, "t"))


def velocity(curve: Curve):
    """Componentwise d x_i / dt of a closed-form curve."""
    return tuple(ex.simplify(ex.differentiate(c, "t")) for c in curve.components)


def compose(field: ScalarField, curve: Curve) -> PathFunction:
    """Restrict the field to the curve: f(t) = E(x1(t), .., x{n-1}(t), t)."""
    if curve.dimension != field.dimension:
        raise DimensionError(
            f"curve dimension {curve.dimension} != field dimension {field.dimension}")
    mapping = dict(zip(spatial_names(field.dimension), curve.components))
    return PathFunction(body=ex.simplify(ex.substitute(field.body, mapping)))


def _on_curve_assignment(field, curve, t):
    point = curve.point(t)
    a = dict(zip(spatial_names(field.dimension), point))
    a["t"] = t
    return a


def advective_term(field: ScalarField, curve: Curve, t: float) -> float:
    """Velocity-gradient inner product at the curve point: sum of
    (dx_i/dt)(dE/dx_i) evaluated at (p(t), t)."""
    if curve.dimension != field.dimension:
        raise DimensionError("curve and field dimensions differ")
    a = _on_curve_assignment(field, curve, t)
    total = 0.0
    for v, g in zip(velocity(curve), gradient(field)):
        total += ex.evaluate(v, {"t": t}) * ex.evaluate(g, a)
    return total


def total_derivative(field: ScalarField, curve: Curve, t: float) -> float:
    """d/dt of the composition at t: advective term plus the explicit time
    partial, both evaluated on the curve."""
    a = _on_curve_assignment(field, curve, t)
    return advective_term(field, curve, t) + ex.evaluate(time_partial(field), a)


def advective_term_expression(field: ScalarField, curve: Curve) -> ex.Expression:
    """The advective term as a closed-form expression in t."""
    if curve.dimension != field.dimension:
        raise DimensionError("curve and field dimensions differ")
    mapping = dict(zip(spatial_names(field.dimension), curve.components))
    total = ex.Num(0.0)
    for v, g in zip(velocity(curve), gradient(field)):
        total = total + v * ex.substitute(g, mapping)
    return ex.simplify(total)


def total_derivative_expression(field: ScalarField, curve: Curve) -> ex.Expression:
    """Total derivative of the composition as a closed-form expression in t."""
    mapping = dict(zip(spatial_names(field.dimension), curve.components))
    on_curve_dt = ex.substitute(time_partial(field), mapping)
    return ex.simplify(advective_term_expression(field, curve) + on_curve_dt)


def rate_expression(field: ScalarField, curve: Curve) -> ex.Expression:
    """The off-curve rate whose limit onto the curve is the total derivative:
    sum_i V_i * dE/dx_i + dE/dt as a function of (x1..x{n-1}, t).

    The velocity components V_i are extended off the curve by reading them
    from the time coordinate alone, which is continuous at the curve and so
    does not change the limit.
    """
    if curve.dimension != field.dimension:
        raise DimensionError("curve and field dimensions differ")
    total = time_partial(field)
    for v, g in zip(velocity(curve), gradient(field)):
        total = v * g + total
    return ex.simplify(total)


# ---------------------------------------------------------------------------
# The explicit limit check

def _directions(dim, count, seed=_SAMPLE_SEED):
    """Deterministic antipodally-symmetric unit directions in R^dim."""
    rng = np.random.default_rng(seed + dim)
    half = max(1, count // 2)
    raw = rng.standard_normal((half, dim))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    return np.vstack([raw, -raw])


def ball_sample_offsets(dim, radius, surface_count=64):
    """Deterministic points on the sphere of the given radius."""
    return _directions(dim, surface_count) * radius


def _interior_offsets(dim, radius, count=64):
    dirs = _directions(dim, max(2, count // 4))
    fractions = (0.25, 0.5, 0.75, 0.999)
    return np.vstack([dirs * (radius * f) for f in fractions])


def epsilon_delta_witness(field: ScalarField, curve: Curve, t: float,
                          epsilon: float,
                          cfg: ToleranceConfig = DEFAULT_CONFIG) -> float:
    """Find a radius delta so that the off-curve rate stays within epsilon of
    its on-curve value across a sampled ball around (p(t), t).

    Each candidate ball is probed at 64 deterministic interior points; the
    radius is halved until the bound holds.  Failure to find one above 1e-12
    signals a discontinuity at the curve point.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be strictly positive")
    g = rate_expression(field, curve)
    names = spatial_names(field.dimension) + ("t",)
    center = np.array(curve.point(t) + (t,), dtype=float)
    try:
        center_value = ex.evaluate(g, dict(zip(names, center)))
    except DomainError as exc:
        raise ConvergenceError(
            f"rate undefined at the curve point for t={t}: {exc}") from exc

    delta = cfg.ball_radius0
    while delta >= 1e-12:
        ok = True
        for offset in _interior_offsets(len(names), delta):
            a = dict(zip(names, center + offset))
            try:
                value = ex.evaluate(g, a)
            except DomainError:
                ok = False
                break
            if abs(value - center_value) >= epsilon:
                ok = False
                break
        if ok:
            return delta
        delta *= 0.5
    raise ConvergenceError(
        f"no delta above 1e-12 bounds the rate near t={t}; "
        "the rate looks discontinuous there")
