"""
Local functions that agree where they overlap
=============================================

A functional element ties a formula to the region where it is trusted.
Two elements prolong one another when their regions overlap and the
formulas agree there; a family whose pairs all agree is coherent and can
be differentiated piece by piece.
"""

from fieldpath import (
    Box,
    FunctionalElement,
    GeneralFunction,
    ScalarField,
    coherence_check,
    derivative_general_function,
    direct_prolongation,
    to_string,
)

series_text = " + ".join(["1"] + [f"x1^{k}" for k in range(1, 61)])

# The truncated geometric series is trusted up to 1/2; the closed form
# 1/(1-x1) away from its pole. They overlap on [0.25, 0.5].
series = FunctionalElement(Box((0.0,), (0.5,)),
                           ScalarField.from_text(2, series_text))
closed = FunctionalElement(Box((0.25,), (0.75,)),
                           ScalarField.from_text(2, "1/(1 - x1)"))
result = direct_prolongation(series, closed, 1e-9)
print(f"series vs closed form: agree={result.agree}  "
      f"deviation={result.max_deviation:.2e}  "
      f"({result.sample_count} overlap samples)")

# Agreement is not a formality: x^2 and x^3 share the overlap [1, 1.5]
# but are different functions, and the deviation says by how much.
square = FunctionalElement(Box((0.0,), (1.5,)),
                           ScalarField.from_text(2, "x1^2"))
cube = FunctionalElement(Box((1.0,), (2.0,)),
                         ScalarField.from_text(2, "x1^3"))
result = direct_prolongation(square, cube, 1e-9)
print(f"x^2 vs x^3           : agree={result.agree}  "
      f"deviation={result.max_deviation:.4f}")

# A coherent family differentiates element by element.
family = GeneralFunction((series, closed), functor="geometric")
report = coherence_check(family, 1e-9)
print(f"\nfamily coherent={report.coherent} over {report.checked_pairs} "
      f"overlapping pair(s)")
slope = derivative_general_function(family, "x1")
print("d/dx1 of the closed-form piece:",
      to_string(slope.elements[1].field.body))
