"""One-forms, vector fields, and their pairing, plus Hamilton-Jacobi
residuals and trapezoid line integrals.

The star identity here is that pairing the differential of a field with the
skew gradient vector field leaves exactly the explicit time partial: the
spatial part is annihilated by skew symmetry.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import expr as ex
from .calculus import ScalarField, gradient, spatial_names, time_partial
from .cases import SkewMatrix
from .errors import DimensionError, UnboundVariableError

__all__ = [
    "OneForm",
    "VectorField",
    "exterior_derivative",
    "skew_field",
    "pairing",
    "hamilton_jacobi_residual",
    "poincare_cartan",
    "line_integral",
]


@dataclass(frozen=True)
class OneForm:
    """Sum of coefficient * d(coordinate) terms."""

    coordinates: tuple
    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if len(self.coordinates) != len(self.coefficients):
            raise DimensionError("one coefficient per coordinate required")


@dataclass(frozen=True)
class VectorField:
    """Componentwise first-order operator over named coordinates."""

    coordinates: tuple
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.coordinates) != len(self.components):
            raise DimensionError("one component per coordinate required")


def exterior_derivative(field: ScalarField) -> OneForm:
    """dE = sum (dE/dx_i) dx_i + (dE/dt) dt with symbolic coefficients."""
    coords = spatial_names(field.dimension) + ("t",)
    return OneForm(coords, gradient(field) + (time_partial(field),))


def skew_field(field: ScalarField, b: SkewMatrix) -> VectorField:
    """The flow direction of the field-given case as a vector field: spatial
    components sum_j b_ij dE/dx_j and a unit t-component."""
    if b.order != field.dimension - 1:
        raise DimensionError("matrix order must be field dimension - 1")
    grads = gradient(field)
    comps = []
    for i in range(b.order):
        c = ex.Num(0.0)
        for j in range(b.order):
            c = c + ex.Num(b.entries[i][j]) * grads[j]
        comps.append(ex.simplify(c))
    comps.append(ex.Num(1.0))
    return VectorField(spatial_names(field.dimension) + ("t",), tuple(comps))


def pairing(w: OneForm, x: VectorField) -> ex.Expression:
    """Inner product sum_k w_k * X_k as a simplified expression."""
    if w.coordinates != x.coordinates:
        raise DimensionError(
            f"coordinate mismatch: {w.coordinates} vs {x.coordinates}")
    total = ex.Num(0.0)
    for a, b in zip(w.coefficients, x.components):
        total = total + a * b
    return ex.simplify(total)


_P_VAR = re.compile(r"p([1-9][0-9]*)$")
_Q_VAR = re.compile(r"q([1-9][0-9]*)$")


def hamilton_jacobi_residual(s: ex.Expression, h: ex.Expression,
                             constants=None) -> ex.Expression:
    """Residual dS/dt + H(dS/dq_1, .., dS/dq_m, q, t) of the
    Hamilton-Jacobi equation; identically zero iff S is an action for H.

    S may use q1..qm and t, H may use p1..pm, q1..qm and t; any further
    names must appear in ``constants`` (name -> value) and are substituted
    first.
    """
    constants = {k: ex.Num(float(v)) for k, v in (constants or {}).items()}
    s = ex.substitute(s, constants)
    h = ex.substitute(h, constants)

    momenta = set()
    for name in ex.free_variables(h):
        m = _P_VAR.match(name)
        if m:
            momenta.add(int(m.group(1)))
        elif not (_Q_VAR.match(name) or name == "t"):
            raise UnboundVariableError(name)
    for name in ex.free_variables(s):
        if not (_Q_VAR.match(name) or name == "t"):
            raise UnboundVariableError(name)

    subs = {f"p{i}": ex.simplify(ex.differentiate(s, f"q{i}"))
            for i in momenta}
    return ex.simplify(ex.differentiate(s, "t") + ex.substitute(h, subs))


def poincare_cartan(p_exprs, h: ex.Expression) -> OneForm:
    """The form sum p_i dq_i - H dt over (q1..qm, t)."""
    p_exprs = tuple(p_exprs)
    if not p_exprs:
        raise DimensionError("at least one momentum expression required")
    coords = tuple(f"q{i}" for i in range(1, len(p_exprs) + 1)) + ("t",)
    coeffs = tuple(ex.simplify(p) for p in p_exprs)
    coeffs += (ex.simplify(ex.Call("neg", h)),)
    return OneForm(coords, coeffs)


def line_integral(w: OneForm, path, t0: float, t1: float,
                  steps: int = 1000) -> float:
    """Trapezoid-rule integral of the pullback of w along a parameterized
    path.

    ``path`` maps coordinate names to expressions in t; the t coordinate
    itself defaults to the identity.  The integrand is
    sum_k w_k(path(t)) * d(path_k)/dt.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    path = dict(path)
    if "t" in w.coordinates:
        path.setdefault("t", ex.Var("t"))
    missing = [c for c in w.coordinates if c not in path]
    if missing:
        raise DimensionError(f"path missing coordinates {missing}")
    for name, body in path.items():
        extra = ex.free_variables(body) - {"t"}
        if extra:
            raise DimensionError(
                f"path component {name} uses {sorted(extra)}; only t")

    integrand = ex.Num(0.0)
    for coord, coeff in zip(w.coordinates, w.coefficients):
        pulled = ex.substitute(coeff, path)
        integrand = integrand + pulled * ex.differentiate(path[coord], "t")
    integrand = ex.simplify(integrand)

    h = (t1 - t0) / steps
    total = 0.0
    prev = ex.evaluate(integrand, {"t": t0})
    for k in range(1, steps + 1):
        cur = ex.evaluate(integrand, {"t": t0 + k * h})
        total += 0.5 * h * (prev + cur)
        prev = cur
    return total
