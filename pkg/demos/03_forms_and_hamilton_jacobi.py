"""
Differential forms and the Hamilton-Jacobi check
================================================

The same bookkeeping that splits total from partial derivatives has a
coordinate-free face: pair the exterior derivative dE with the skew
transport field and the advective part cancels, leaving the bare clock
rate. The classical-mechanics cousin pairs an action S with a
Hamiltonian and asks whether the momentum form is exact.
"""

import numpy as np

from fieldpath import (
    ScalarField,
    SkewMatrix,
    evaluate,
    exterior_derivative,
    hamilton_jacobi_residual,
    line_integral,
    pairing,
    parse,
    poincare_cartan,
    skew_field,
    to_string,
)

field = ScalarField.from_text(3, "x1*x2 + t^2")
b = SkewMatrix(((0.0, 2.0), (-2.0, 0.0)))

w = exterior_derivative(field)
x = skew_field(field, b)
print("dE coefficients :", [to_string(c) for c in w.coefficients])
print("transport field :", [to_string(c) for c in x.components])
paired = pairing(w, x)
print("<dE, X>         =", to_string(paired), " (the clock rate alone)")

# Free particle: S = q^2 / (2(t+1)) solves the Hamilton-Jacobi equation
# for H = p^2/2. The residual is numerically flat.
s = parse("q1^2/(2*t + 2)")
h = parse("p1^2/2")
residual = hamilton_jacobi_residual(s, h)
rng = np.random.default_rng(3)
worst = max(abs(evaluate(residual, {"q1": q, "t": t}))
            for q, t in rng.uniform((-2, 0), (2, 2), (32, 2)))
print(f"\nHJ residual over 32 samples: {worst:.2e}")

# Because S exists, the momentum form p dq - H dt integrates to the
# action difference along the physical straight-line path.
q0, q1, t0, t1 = 0.4, 1.3, 0.25, 1.75
v = (q1 - q0) / (t1 - t0)
w = poincare_cartan((parse(repr(v)),), parse(f"{v * v / 2.0!r}"))
path = {"q1": parse(f"{q0} + {v!r}*(t - {t0})")}
got = line_integral(w, path, t0, t1)
want = v * v / 2.0 * (t1 - t0)
print(f"integral of p dq - H dt   : {got:.10f}")
print(f"action difference         : {want:.10f}")
