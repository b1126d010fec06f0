"""Field / curve / path-function types and the total derivative bridge."""

import math

import pytest

from fieldpath import expr as ex
from fieldpath.calculus import (
    Curve,
    PathFunction,
    SampledCurve,
    ScalarField,
    ToleranceConfig,
    advective_term,
    advective_term_expression,
    compose,
    epsilon_delta_witness,
    gradient,
    rate_expression,
    spatial_names,
    time_partial,
    total_derivative,
    total_derivative_expression,
    velocity,
)
from fieldpath.errors import ConvergenceError, DimensionError


def central_fd(fn, t, h=1e-6):
    step = h * max(1.0, abs(t))
    return (fn(t + step) - fn(t - step)) / (2.0 * step)


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------------------
# Type discipline

def test_field_rejects_unknown_coordinates():
    with pytest.raises(DimensionError):
        ScalarField.from_text(2, "x1 + x2")


def test_field_rejects_dimension_below_two():
    with pytest.raises(DimensionError):
        ScalarField.from_text(1, "t")


def test_curve_components_may_only_use_t():
    with pytest.raises(DimensionError):
        Curve.from_text(("x1 + t",))


def test_curve_smoothness_grade_checked():
    with pytest.raises(ValueError):
        Curve.from_text(("t",), smoothness="C3")


def test_path_function_wants_exactly_one_source():
    with pytest.raises(ValueError):
        PathFunction(body=ex.parse("t"), samples=((0.0, 0.0),))
    with pytest.raises(ValueError):
        PathFunction()


def test_compose_checks_dimensions():
    field = ScalarField.from_text(3, "x1 + x2")
    curve = Curve.from_text(("t",))
    with pytest.raises(DimensionError):
        compose(field, curve)


def test_tolerance_config_validation():
    with pytest.raises(ValueError):
        ToleranceConfig(fd_step=0.0)
    with pytest.raises(ValueError):
        ToleranceConfig(shrink=1.0)


def test_spatial_names():
    assert spatial_names(4) == ("x1", "x2", "x3")
    assert spatial_names(2) == ("x1",)


# ---------------------------------------------------------------------------
# Building blocks against hand values

def test_gradient_and_time_partial():
    field = ScalarField.from_text(3, "x1^2*x2 + t*x1")
    gx1, gx2 = gradient(field)
    a = {"x1": 2.0, "x2": 5.0, "t": 3.0}
    assert ex.evaluate(gx1, a) == pytest.approx(2 * 2 * 5 + 3)
    assert ex.evaluate(gx2, a) == pytest.approx(4.0)
    assert ex.evaluate(time_partial(field), a) == pytest.approx(2.0)


def test_velocity_of_circle():
    curve = Curve.from_text(("cos(t)", "sin(t)"))
    vx, vy = velocity(curve)
    for t in (0.0, 0.7, 2.1):
        assert ex.evaluate(vx, {"t": t}) == pytest.approx(-math.sin(t))
        assert ex.evaluate(vy, {"t": t}) == pytest.approx(math.cos(t))


def test_compose_matches_field_on_curve():
    field = ScalarField.from_text(3, "x1*x2 + t")
    curve = Curve.from_text(("t", "t^2"))
    path = compose(field, curve)
    for t in (0.0, 0.5, 1.3):
        assert path.value(t) == pytest.approx(field.value(curve.point(t), t))


def test_square_field_straight_line_totals():
    # f(t) = t^2, so the rate is 2t even though the field has no explicit t.
    field = ScalarField.from_text(2, "x1^2")
    curve = Curve.from_text(("t",))
    assert total_derivative(field, curve, 3.0) == pytest.approx(6.0)
    assert advective_term(field, curve, 1.0) == pytest.approx(2.0)
    assert ex.evaluate(time_partial(field), {"x1": 1.0, "t": 1.0}) == 0.0


def test_circle_on_square_sum_is_constant():
    field = ScalarField.from_text(3, "x1^2 + x2^2")
    curve = Curve.from_text(("cos(t)", "sin(t)"))
    for k in range(16):
        t = 6.283185307179586 * k / 16.0
        assert abs(total_derivative(field, curve, t)) < 1e-12


def test_pure_time_field_has_unit_rate():
    field = ScalarField.from_text(2, "t")
    curve = Curve.from_text(("t^2",))
    assert total_derivative(field, curve, 1.7) == pytest.approx(1.0)
    assert advective_term(field, curve, 1.7) == 0.0


def test_decomposition_total_is_advective_plus_time_partial(pair_corpus):
    for field, curve, times in pair_corpus:
        for t in times:
            a = dict(zip(spatial_names(field.dimension), curve.point(t)))
            a["t"] = t
            lhs = total_derivative(field, curve, t)
            rhs = advective_term(field, curve, t) + ex.evaluate(
                time_partial(field), a)
            assert close(lhs, rhs, 1e-12)


def test_total_derivative_matches_finite_difference(pair_corpus):
    for field, curve, times in pair_corpus:
        path = compose(field, curve)
        for t in times:
            got = total_derivative(field, curve, t)
            want = central_fd(path.value, t)
            assert close(got, want, 1e-6), (field.body, t)


def test_expression_forms_agree_with_pointwise(pair_corpus):
    for field, curve, times in pair_corpus:
        dtot = total_derivative_expression(field, curve)
        dadv = advective_term_expression(field, curve)
        for t in times:
            assert close(ex.evaluate(dtot, {"t": t}),
                         total_derivative(field, curve, t), 1e-10)
            assert close(ex.evaluate(dadv, {"t": t}),
                         advective_term(field, curve, t), 1e-10)


def test_total_expression_is_derivative_of_composition(pair_corpus):
    for field, curve, _ in pair_corpus:
        dtot = total_derivative_expression(field, curve)
        dpath = ex.differentiate(compose(field, curve).body, "t")
        assert ex.equivalent(dtot, dpath, tol=1e-8)


def test_rate_expression_restricts_to_total_derivative():
    field = ScalarField.from_text(3, "x1*x2 + t")
    curve = Curve.from_text(("t", "t^2"))
    g = rate_expression(field, curve)
    mapping = dict(zip(spatial_names(3), curve.components))
    restricted = ex.substitute(g, mapping)
    assert ex.equivalent(restricted,
                         total_derivative_expression(field, curve), tol=1e-9)


# ---------------------------------------------------------------------------
# The limit witness

def test_witness_bound_holds_on_sampled_ball():
    field = ScalarField.from_text(3, "x1^2 + x2^2")
    curve = Curve.from_text(("cos(t)", "sin(t)"))
    t, epsilon = 0.9, 1e-3
    delta = epsilon_delta_witness(field, curve, t, epsilon)
    assert delta > 0.0
    g = rate_expression(field, curve)
    names = spatial_names(3) + ("t",)
    center = curve.point(t) + (t,)
    g0 = ex.evaluate(g, dict(zip(names, center)))
    # redo the probe at the returned radius, denser than the search used
    import numpy as np
    rng = np.random.default_rng(5)
    for _ in range(256):
        d = rng.standard_normal(3)
        d *= (delta * rng.random() * 0.999) / np.linalg.norm(d)
        a = dict(zip(names, np.array(center) + d))
        assert abs(ex.evaluate(g, a) - g0) < epsilon


def test_witness_shrinks_with_epsilon():
    field = ScalarField.from_text(2, "x1^2")
    curve = Curve.from_text(("t",))
    d_loose = epsilon_delta_witness(field, curve, 1.0, 1e-2)
    d_tight = epsilon_delta_witness(field, curve, 1.0, 1e-5)
    assert d_tight <= d_loose
    assert d_tight > 0.0


def test_witness_rejects_nonpositive_epsilon():
    field = ScalarField.from_text(2, "x1")
    curve = Curve.from_text(("t",))
    with pytest.raises(ValueError):
        epsilon_delta_witness(field, curve, 1.0, 0.0)


def test_witness_fails_at_genuine_discontinuity():
    # rate includes 1/x1 which blows up across x1 = 0 on the curve p(t) = t
    field = ScalarField.from_text(2, "log(x1^2)")
    curve = Curve.from_text(("t",))
    with pytest.raises(ConvergenceError):
        epsilon_delta_witness(field, curve, 0.0, 1e-3)


# ---------------------------------------------------------------------------
# Sampled curves and sampled path functions

def test_sampled_curve_interpolates():
    sc = SampledCurve(times=(0.0, 1.0, 2.0),
                      points=((0.0, 0.0), (1.0, 2.0), (4.0, 6.0)))
    assert sc.point(0.5) == pytest.approx((0.5, 1.0))
    assert sc.point(1.5) == pytest.approx((2.5, 4.0))
    assert sc.point(-3.0) == pytest.approx((0.0, 0.0))
    assert sc.point(9.0) == pytest.approx((4.0, 6.0))
    assert sc.dimension == 3


def test_sampled_curve_checks_shape():
    with pytest.raises(DimensionError):
        SampledCurve(times=(0.0, 1.0), points=((0.0,),))
    with pytest.raises(ValueError):
        SampledCurve(times=(0.0, 0.0), points=((0.0,), (1.0,)))


def test_sampled_path_function_interpolates():
    pf = PathFunction(samples=((0.0, 1.0), (2.0, 5.0)))
    assert pf.value(1.0) == pytest.approx(3.0)
    assert pf.value(-1.0) == 1.0
    assert pf.value(3.0) == 5.0
