"""Rotational submanifolds of the four kinds, each rewritten as a partial tube.

Run with ``python demos/rotational.py``.
"""
# %%
from prodgeom.diagnostics import class_a_residual
from prodgeom.fixtures import rotational_specs
from prodgeom.rotational import orbit_invariance_residual, rotational_chart, tube_vs_rotational

specs = rotational_specs()

# %% The orbit chart and the tube chart describe the same points
for name, spec in specs.items():
    kw = {"allow_equidistant": True} if spec.kind == "hyperbolic" else {}
    print(f"{name:<14} {spec.kind:<16} max |rotational - tube| = {tube_vs_rotational(spec, **kw):.1e}")

# %% Invariance under the isometries that fix the axis
for name in ("rot_sph1_n2", "rot_par_n2"):
    print(f"{name}: orbit invariance residual {orbit_invariance_residual(specs[name]):.1e}")

# %% Every rotational submanifold has T as a principal direction
chart = rotational_chart(specs["rot_sphm1_n3"])
print("class A residual:", max(class_a_residual(chart, u) for u in chart.grid(5)))
