"""
Total versus partial time derivatives
=====================================

A scalar field E(x1, x2, t) has partial derivatives. A probe track p(t)
has a velocity. The reading along the track, f = E o p, is a function of
one variable, and its derivative mixes both: moving through a gradient
adds the advective piece (V . grad E) on top of the field's own clock
rate dE/dt.
"""

from fieldpath import (
    Curve,
    ScalarField,
    advective_term,
    compose,
    time_partial,
    total_derivative,
    to_string,
)
from fieldpath import evaluate

# A warm spot that drifts: hottest along the moving ridge x1 = t.
field = ScalarField.from_text(3, "exp(-(x1 - t)^2 - x2^2)")

# A probe that sweeps through the ridge faster than it moves.
probe = Curve.from_text(("2*t", "0.5"))
reading = compose(field, probe)
print("probe reading f(t) =", to_string(reading.body))

for t in (0.0, 0.25, 0.5, 0.75, 1.0):
    total = total_derivative(field, probe, t)
    advect = advective_term(field, probe, t)
    clock = evaluate(time_partial(field),
                     {"x1": 2 * t, "x2": 0.5, "t": t})
    print(f"t={t:4.2f}  df/dt={total: .4f}  advective={advect: .4f}  "
          f"dE/dt={clock: .4f}  split error={total - advect - clock:.1e}")

# The common slip is to call dE/dt "the" derivative of the reading. It
# only works when the probe sits still or the field is spatially flat:
flat = ScalarField.from_text(3, "t")
print("\npure clock field E = t:")
for t in (0.0, 0.5, 1.0):
    print(f"t={t:4.2f}  advective={advective_term(flat, probe, t):.1e}  "
          f"(total and partial coincide)")
