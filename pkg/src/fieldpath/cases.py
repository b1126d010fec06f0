"""Reconstruction of the (field, curve, path) triple from a single member.

Three solvers cover the three possible givens.  From a field, integrate the
skew-gradient flow and accumulate the path function by quadrature.  From a
curve, build the linear-in-space field whose gradient is the skew image of
the velocity.  From a path function, run characteristics: every spatial
coordinate drifts with the common rate H = df/dt and the field is constant
on the invariant coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from . import expr as ex
from .calculus import (
    DEFAULT_CONFIG,
    Curve,
    PathFunction,
    SampledCurve,
    ScalarField,
    ToleranceConfig,
    gradient,
    spatial_names,
    time_partial,
    velocity,
)
from .errors import DimensionError, DomainError, IntegrationError

__all__ = [
    "SkewMatrix",
    "CaseDiagnostics",
    "CharacteristicData",
    "CaseSolution",
    "VerificationReport",
    "rk4_integrate",
    "skew_annihilator",
    "solve_e_case",
    "solve_p_case",
    "solve_f_case",
    "characteristic_pde_residual",
    "verify_composition",
]

BLOWUP_LIMIT = 1e12


@dataclass(frozen=True)
class SkewMatrix:
    """Real square matrix with entries[i][j] == -entries[j][i] exactly."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        m = len(rows)
        if m == 0 or any(len(row) != m for row in rows):
            raise DimensionError("skew matrix must be square and nonempty")
        for i in range(m):
            for j in range(m):
                # IEEE negation is exact, so this equality is well defined
                if rows[i][j] != -rows[j][i]:
                    raise ValueError(
                        f"entry ({i + 1},{j + 1}) breaks skew symmetry: "
                        f"{rows[i][j]} != -({rows[j][i]})")

    @property
    def order(self):
        return len(self.entries)

    def apply(self, vector):
        if len(vector) != self.order:
            raise DimensionError("vector length must match matrix order")
        return tuple(sum(row[j] * vector[j] for j in range(self.order))
                     for row in self.entries)


@dataclass(frozen=True)
class CaseDiagnostics:
    max_composition_residual: float
    max_defining_residual: float
    t_span: tuple
    step: float


@dataclass(frozen=True)
class CharacteristicData:
    """Rate H = df/dt, the invariant coordinates, and the free profile G."""

    rate: PathFunction
    invariants: tuple
    invariant_function: ex.Expression = None


@dataclass(frozen=True)
class CaseSolution:
    field: ScalarField
    curve: object            # Curve or SampledCurve
    path: PathFunction
    diagnostics: CaseDiagnostics
    characteristics: CharacteristicData = None


@dataclass(frozen=True)
class VerificationReport:
    max_composition_residual: float
    max_derivative_residual: float
    sample_count: int


def _span(t0, t1):
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    return t1 - t0


def rk4_integrate(rhs, x0, t0, t1, step):
    """Classical fixed-step RK4 for dx/dt = rhs(t, x).

    The step count is round(span/step) so the grid lands exactly on t1.
    Any state beyond 1e12 in magnitude, or non-finite, aborts with the last
    good time attached.
    """
    span = _span(t0, t1)
    n = max(1, round(span / step))
    h = span / n
    times = t0 + h * np.arange(n + 1)
    times[-1] = t1
    x = np.asarray(x0, dtype=float)
    out = np.empty((n + 1, x.size))
    out[0] = x
    for k in range(n):
        t = times[k]
        k1 = rhs(t, x)
        k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2)
        k4 = rhs(t + h, x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > BLOWUP_LIMIT:
            raise IntegrationError(
                f"state blew up between t={t} and t={t + h}", last_good_t=t)
        out[k + 1] = x
    return times, out


def skew_annihilator(field: ScalarField, b: SkewMatrix) -> ex.Expression:
    """The double sum sum_ij b_ij (dE/dx_j)(dE/dx_i) as an expression.

    Because multiplication commutes, the (i,j) and (j,i) terms share the
    same product, so the sum is grouped as sum_{i<=j} (b_ij + b_ji) * E_i E_j.
    For a skew matrix the grouped coefficients are exactly zero in floating
    point, hence the expression simplifies to 0.
    """
    if b.order != field.dimension - 1:
        raise DimensionError("matrix order must be field dimension - 1")
    grads = gradient(field)
    total = ex.Num(0.0)
    for i in range(b.order):
        for j in range(i, b.order):
            coeff = b.entries[i][j] + b.entries[j][i]
            total = total + ex.Num(coeff) * (grads[i] * grads[j])
    return ex.simplify(total)


def _field_rhs(field, b):
    grads = gradient(field)
    names = spatial_names(field.dimension)

    def rhs(t, x):
        a = dict(zip(names, x))
        a["t"] = t
        g = tuple(ex.evaluate(gi, a) for gi in grads)
        return np.array(b.apply(g))

    return rhs


def solve_e_case(field: ScalarField, b: SkewMatrix, x0, t0: float, t1: float,
                 cfg: ToleranceConfig = DEFAULT_CONFIG) -> CaseSolution:
    """Given the field, integrate dx_i/dt = sum_j b_ij dE/dx_j by RK4 and
    accumulate f(t) = E(p(t0), t0) + integral of dE/dt along the curve by
    Simpson quadrature on the same grid.

    The skew structure kills the advective term along the solution, so the
    path function only sees the explicit time partial.
    """
    if b.order != field.dimension - 1:
        raise DimensionError("matrix order must be field dimension - 1")
    if len(x0) != b.order:
        raise DimensionError("x0 length must match matrix order")
    rhs = _field_rhs(field, b)
    times, points = rk4_integrate(rhs, x0, t0, t1, cfg.ode_step)
    h = times[1] - times[0]
    velocities = np.array([rhs(t, x) for t, x in zip(times, points)])

    names = spatial_names(field.dimension)
    dt_body = time_partial(field)

    def along(k):
        a = dict(zip(names, points[k]))
        a["t"] = times[k]
        return a

    dt_values = np.array([ex.evaluate(dt_body, along(k))
                          for k in range(len(times))])
    f0 = field.value(points[0], times[0])
    f_values = f0 + cumulative_simpson(dt_values, dx=h, initial=0.0)

    curve = SampledCurve(tuple(times), tuple(map(tuple, points)),
                         tuple(map(tuple, velocities)))
    path = PathFunction(samples=tuple(zip(times, f_values)))

    comp = max(abs(f_values[k] - field.value(points[k], times[k]))
               for k in range(len(times)))
    # independent check of the defining ODE: central difference of the
    # polyline against the stored right-hand side
    defining = 0.0
    for k in range(1, len(times) - 1):
        fd = (points[k + 1] - points[k - 1]) / (times[k + 1] - times[k - 1])
        defining = max(defining, float(np.max(np.abs(fd - velocities[k]))))
    diag = CaseDiagnostics(float(comp), defining, (t0, t1), float(h))
    return CaseSolution(field, curve, path, diag)


def solve_p_case(curve: Curve, b: SkewMatrix, T: ex.Expression,
                 cfg: ToleranceConfig = DEFAULT_CONFIG,
                 t0: float = 0.0, t1: float = 1.0) -> CaseSolution:
    """Given the curve, build E(x, t) = sum_i (sum_j b_ij k_j(t)) x_i + T(t)
    with k = dp/dt, so the field gradient is the skew image of the velocity
    and the advective term vanishes along the curve.

    The diagnostic samples 16 times in [t0, t1] and measures both
    df/dt - (dE/dt on the curve) and the gradient consistency
    dE/dx_i - sum_j b_ij k_j(t).
    """
    if b.order != curve.dimension - 1:
        raise DimensionError("matrix order must be curve dimension - 1")
    if curve.smoothness != "C2":
        raise ValueError("the curve must be declared C2; the field contains "
                         "velocity components, so the time partial needs "
                         "second derivatives")
    extra = ex.free_variables(T) - {"t"}
    if extra:
        raise DimensionError(f"T uses {sorted(extra)}; only t is allowed")

    k = velocity(curve)
    coeffs = []
    for i in range(b.order):
        c = ex.Num(0.0)
        for j in range(b.order):
            c = c + ex.Num(b.entries[i][j]) * k[j]
        coeffs.append(ex.simplify(c))
    names = spatial_names(curve.dimension)
    body = ex.Num(0.0)
    for name, c in zip(names, coeffs):
        body = body + c * ex.Var(name)
    field = ScalarField(curve.dimension, ex.simplify(body + T))
    path = PathFunction(body=ex.simplify(
        ex.substitute(field.body, dict(zip(names, curve.components)))))

    span = _span(t0, t1)
    dfdt = ex.simplify(ex.differentiate(path.body, "t"))
    dt_body = time_partial(field)
    grads = gradient(field)
    comp = defining = 0.0
    for s in range(16):
        t = t0 + span * s / 15.0
        a = dict(zip(names, curve.point(t)))
        a["t"] = t
        comp = max(comp, abs(path.value(t) - ex.evaluate(field.body, a)))
        defining = max(defining, abs(ex.evaluate(dfdt, {"t": t})
                                     - ex.evaluate(dt_body, a)))
        for g, c in zip(grads, coeffs):
            defining = max(defining, abs(ex.evaluate(g, a)
                                         - ex.evaluate(c, {"t": t})))
    diag = CaseDiagnostics(comp, defining, (t0, t1), span / 15.0)
    return CaseSolution(field, curve, path, diag)


def xi_names(dimension):
    """Invariant coordinate names xi1..xi{n-1} used by the G profile."""
    return tuple(f"xi{i}" for i in range(1, dimension))


def characteristic_pde_residual(field: ScalarField,
                                rate: ex.Expression) -> ex.Expression:
    """Residual H * sum_i dE/dx_i + dE/dt - H of the characteristic PDE."""
    total = ex.Num(0.0)
    for g in gradient(field):
        total = total + g
    total = ex.simplify(total)
    return ex.simplify((rate * total + time_partial(field)) - rate)


def solve_f_case(path: PathFunction, dimension: int, x0,
                 G: ex.Expression = None,
                 cfg: ToleranceConfig = DEFAULT_CONFIG,
                 t0: float = 0.0, t1: float = None) -> CaseSolution:
    """Given the path function, run characteristics: every coordinate moves
    with the common rate H = df/dt, so x_i(t) = x0_i + (f(t) - f(t0)), and
    the field is E = (f(t) - f(t0)) + G(xi) + const with invariant
    coordinates xi_i = x_i - (f(t) - f(t0)).

    G is an expression in xi1..xi{n-1} and defaults to 0.  The additive
    constant is pinned so that E composed with the curve reproduces f
    exactly, not just up to a constant.
    """
    if path.body is None:
        raise ValueError(
            "the path function must be in closed form; the rate H = df/dt "
            "is taken symbolically, and sampled tables do not support that")
    if dimension < 2:
        raise DimensionError("dimension must be at least 2")
    if len(x0) != dimension - 1:
        raise DimensionError("x0 length must be dimension - 1")
    x0 = tuple(float(v) for v in x0)
    if t1 is None:
        t1 = t0 + 1.0
    span = _span(t0, t1)

    base = ex.simplify(path.body)
    rate = ex.simplify(ex.differentiate(base, "t"))
    f0 = ex.evaluate(base, {"t": t0})
    shift = ex.simplify(base - ex.Num(f0))          # f(t) - f(t0)

    names = spatial_names(dimension)
    invariants = tuple(ex.simplify(ex.Var(n) - shift) for n in names)

    if G is None:
        g_sub = ex.Num(0.0)
        g_at_x0 = 0.0
    else:
        extra = ex.free_variables(G) - set(xi_names(dimension))
        if extra:
            raise DimensionError(
                f"G uses {sorted(extra)} outside xi1..xi{dimension - 1}")
        g_sub = ex.substitute(G, dict(zip(xi_names(dimension), invariants)))
        g_at_x0 = ex.evaluate(G, dict(zip(xi_names(dimension), x0)))

    body = ex.simplify(base + ex.simplify(g_sub - ex.Num(g_at_x0)))
    field = ScalarField(dimension, body)
    curve = Curve(tuple(ex.simplify(ex.Num(c) + shift) for c in x0),
                  smoothness="C2")

    residual = characteristic_pde_residual(field, rate)
    grid = np.linspace(-1.0, 1.0, 10)
    tgrid = np.linspace(t0, t1, 10)
    defining = 0.0
    for t in tgrid:
        for point in np.ndindex(*([10] * (dimension - 1))):
            a = {n: x0[i] + grid[point[i]] for i, n in enumerate(names)}
            a["t"] = float(t)
            defining = max(defining, abs(ex.evaluate(residual, a)))

    comp = 0.0
    for s in range(16):
        t = t0 + span * s / 15.0
        comp = max(comp, abs(ex.evaluate(base, {"t": t})
                             - field.value(curve.point(t), t)))
    diag = CaseDiagnostics(comp, defining, (t0, t1), span / 15.0)
    chars = CharacteristicData(PathFunction(body=rate), invariants, G)
    return CaseSolution(field, curve, PathFunction(body=base), diag, chars)


# ---------------------------------------------------------------------------
# Verification

def _nearest_node(times, t):
    idx = int(np.argmin(np.abs(np.asarray(times) - t)))
    return idx


def _sampled_path_rate(path, idx):
    ts = [tv for tv, _ in path.samples]
    vs = [v for _, v in path.samples]
    lo = max(0, idx - 1)
    hi = min(len(ts) - 1, idx + 1)
    return (vs[hi] - vs[lo]) / (ts[hi] - ts[lo])


def verify_composition(sol: CaseSolution,
                       sample_count: int = 16) -> VerificationReport:
    """Check f(t) = E(p(t), t) and df/dt = total derivative of E along p at
    uniformly spread times.

    Sampled members are checked only at their own grid nodes, so the report
    reflects solver error rather than interpolation error.
    """
    if sample_count < 2:
        raise ValueError("sample_count must be at least 2")
    t0, t1 = sol.diagnostics.t_span
    names = spatial_names(sol.field.dimension)
    grads = gradient(sol.field)
    dt_body = time_partial(sol.field)
    sampled_curve = isinstance(sol.curve, SampledCurve)
    if sol.path.body is not None:
        rate_body = ex.simplify(ex.differentiate(sol.path.body, "t"))

    comp = rate = 0.0
    for s in range(sample_count):
        t = t0 + (t1 - t0) * s / (sample_count - 1)
        if sampled_curve:
            idx = _nearest_node(sol.curve.times, t)
            t = sol.curve.times[idx]
            point = sol.curve.points[idx]
            vel = sol.curve.velocities[idx]
        else:
            point = sol.curve.point(t)
            vel = tuple(ex.evaluate(v, {"t": t}) for v in velocity(sol.curve))
        a = dict(zip(names, point))
        a["t"] = t
        comp = max(comp, abs(sol.path.value(t) - ex.evaluate(sol.field.body, a)))

        total = ex.evaluate(dt_body, a)
        for v, g in zip(vel, grads):
            total += v * ex.evaluate(g, a)
        if sol.path.body is not None:
            dfdt = ex.evaluate(rate_body, {"t": t})
        else:
            dfdt = _sampled_path_rate(sol.path, _nearest_node(
                [tv for tv, _ in sol.path.samples], t))
        rate = max(rate, abs(dfdt - total))
    return VerificationReport(comp, rate, sample_count)
