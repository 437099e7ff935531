"""Partial tubes: building them, finding where they pinch and checking the
closed-form shape operator against finite differences.

Run with ``python demos/partial_tubes.py``.
"""
# %%
import numpy as np

from prodgeom.fixtures import TUBE_SPECS, tube_pinching_spec
from prodgeom.tube import (build_tube, closed_form_vs_numeric, regular_intervals, regularity, singular_values_of_s,
                           tube_T_field)

# %% A tube over a small circle of S^2 whose fiber crosses the focal set
spec = tube_pinching_spec()
roots = singular_values_of_s(spec, spec.frame.base.grid(5))
print("det P_s changes sign at s =", np.round(roots, 10))
print("regular sub-intervals:", [(round(a, 4), round(b, 4)) for a, b in regular_intervals(spec)])
for s in (-1.0, -0.9, 0.0):
    print(f"  s = {s:+.2f}: {regularity(spec, np.array([0.5]), s)}")

# %% Closed-form shape operators against the numerical ones
for name, make in TUBE_SPECS.items():
    tube = make()
    chart = build_tube(tube)
    worst = max(closed_form_vs_numeric(tube, chart, u) for u in chart.grid(4))
    print(f"{name:<22} closed form vs finite differences: {worst:.2e}")

# %% The vertical part of the tangent space lies along d/ds
tube = TUBE_SPECS["tube_k1_S2"]()
print(tube_T_field(tube, np.array([1.0]), 0.2))
