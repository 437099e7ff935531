"""The two-parameter family of umbilical surfaces in S^3 x R.

Run with ``python demos/umbilical_family.py``.  Builds the Y and Z charts for
a boundary point and an interior point of the parameter set, measures how
far each is from being umbilical, and checks that the conformal map sends
them onto a round sphere.
"""
# %%
import numpy as np

from prodgeom.ambient import TOL
from prodgeom.diagnostics import umbilicity_residual
from prodgeom.family import FamilyParams, Y_chart, Z_chart, h_pq, psi, sphere_image_check

# %% The parameter set is (p-1)^2 <= q < p^2; psi maps it to sphere radius and height.
for p, q in [(2.0, 1.0), (1.5, 0.5), (1.0, 0.0)]:
    r, h = psi(p, q)
    print(f"(p, q) = ({p:g}, {q:g})  ->  radius {r:.6f}, height {h:.6f}")

# %% h_{p,q} along the profile interval
fp = FamilyParams(1.5, 0.5)
s = np.linspace(-0.9, 0.9, 7) * fp.s_end
print("s        :", np.round(s, 4))
print("h_{p,q}(s):", np.round(h_pq(fp, s), 6))

# %% Umbilicity on the standard grid (11 points per axis)
for chart in (Y_chart(fp), Z_chart(fp)):
    worst = max(umbilicity_residual(chart, u) for u in chart.grid(11))
    print(f"{chart.label:<30} max umbilicity residual {worst:.2e} (tolerance {TOL.sff:g})")

# %% The conformal image is the round sphere S^2_{r,h}
for pq in [(2.0, 1.0), (1.5, 0.5)]:
    res = sphere_image_check(FamilyParams(*pq))
    print(pq, {k: f"{v:.1e}" for k, v in res.items()})
