"""Shared field/curve corpus for derivative and reconstruction tests.

Every pair is singularity-free on its listed sample window, so finite
difference oracles can probe freely near the sample times.
"""

import pytest

from fieldpath.calculus import Curve, ScalarField

# (field text, dimension, curve component texts, smoothness, sample times)
PAIR_TABLE = [
    ("x1^2", 2, ("t",), "C2", (0.3, 0.7, 1.1, 1.9, 3.0)),
    ("x1^2 + x2^2", 3, ("cos(t)", "sin(t)"), "C2",
     (0.0, 0.9, 1.7, 2.8, 4.4, 6.0)),
    ("t", 2, ("t^2",), "C2", (0.2, 0.8, 1.5, 2.5)),
    ("x1*sin(t)", 2, ("t^2",), "C2", (0.25, 0.75, 1.3, 2.1)),
    ("x1*x2 + t", 3, ("t", "t^2"), "C2", (0.2, 0.6, 1.1, 1.8)),
    ("exp(x1) - t^2", 2, ("sin(t)",), "C2", (0.1, 0.9, 1.6, 2.4)),
    ("log(x1 + 3)*t", 2, ("cos(t)",), "C2", (0.2, 1.0, 2.2, 3.1)),
    ("sqrt(x1^2 + x2^2 + 1)", 3, ("t", "1 - t"), "C2",
     (0.15, 0.65, 1.2, 1.9)),
    ("x1/(x2^2 + 1)", 3, ("sin(t)", "cos(t)"), "C2",
     (0.3, 1.1, 2.0, 3.3)),
    ("x1^2*x2 - x2^3 + t*x1", 3, ("1 + t^2", "t^3"), "C2",
     (0.2, 0.55, 0.9, 1.2)),
    ("sin(x1)*cos(x2) + exp(t/4)", 3, ("t/2", "t/3"), "C2",
     (0.4, 1.3, 2.6, 3.9)),
    ("x1^3 - 2*x1*t + t^2", 2, ("exp(t/5)",), "C2",
     (0.25, 0.85, 1.55, 2.35)),
]


def build_pair(row):
    text, dim, comps, grade, times = row
    field = ScalarField.from_text(dim, text)
    curve = Curve.from_text(comps, smoothness=grade)
    return field, curve, times


@pytest.fixture(scope="session")
def pair_corpus():
    return [build_pair(row) for row in PAIR_TABLE]
