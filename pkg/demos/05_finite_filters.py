"""
Limits without epsilons: filters on finite sets
===============================================

On a finite carrier a filter is just the family of supersets of some
nonempty core, and "limit" becomes a containment statement that can be
checked exhaustively. The same machinery, driven by shrinking balls
around a moving probe, recovers the honest numeric derivative.
"""

import math

from fieldpath import (
    Curve,
    ElementMap,
    FiniteSpace,
    Partition,
    ScalarField,
    ball_filter_limit,
    filter_limit,
    general_function_limit,
    image_filter,
    is_filter,
    principal_filter,
    stronger_than,
    total_derivative,
)

space = FiniteSpace(frozenset("abcd"))
core = principal_filter(space, frozenset("ab"))
print("members of the filter over {a, b}:",
      sorted("".join(sorted(m)) for m in core.members()))
print("passes the filter axioms:", is_filter(core, space).ok)

fine = principal_filter(space, frozenset("a"))
print("filter over {a} refines it:", stronger_than(fine, core))
print("limit of that filter is {a, b}:",
      filter_limit(fine, space, frozenset("ab")))

# Blocks of a partition map into a codomain; the image of each block's
# filter is again a filter, and its limit is read off by containment.
part = Partition(space, (frozenset("ab"), frozenset("c"), frozenset("d")))
codomain = FiniteSpace(frozenset({"low", "high"}))
elem_map = ElementMap(part, codomain,
                      ({"a": "low", "b": "low"}, {"c": "high"},
                       {"d": "low"}))
img = image_filter(elem_map, 0, principal_filter(space, frozenset("ab")),
                   codomain)
print("image of block {a, b}:", sorted(img.generator))
print("limit sits inside {low}:",
      general_function_limit(elem_map, 0, frozenset({"low"})))

# The analytic bridge: average a field's rate over shrinking balls
# around the probe. The ball means converge to the total derivative.
field = ScalarField.from_text(3, "x1^2 + x2^2 + t")
probe = Curve.from_text(("cos(t)", "sin(t)"))
t = math.pi / 4
result = ball_filter_limit(field, probe, t)
print(f"\nball-limit at t=pi/4     : {result.limit:.12f}")
print(f"pointwise total derivative: "
      f"{total_derivative(field, probe, t):.12f}")
print("deviations by radius:",
      " ".join(f"{d:.1e}" for d in result.deviations[:6]), "...")
