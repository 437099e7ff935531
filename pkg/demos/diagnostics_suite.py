"""The diagnostic suite on a few charts: the compatibility equations, class A
and the reduction of codimension.

Run with ``python demos/diagnostics_suite.py``.
"""
# %%
from prodgeom.ambient import pad_chart
from prodgeom.diagnostics import class_a_verdicts, codimension_reduction_check, overall_pass, run_suite
from prodgeom.family import FamilyParams, Y_chart
from prodgeom.fixtures import build

# %% The full suite, as `prodgeom check` runs it
for name in ("family_Y_2_1", "tube_k1_S2", "graph", "perturbed_slice"):
    reports = run_suite(build(name), n=7)
    failing = [r.name for r in reports if not r.passed]
    print(f"{name:<16} pass={overall_pass(reports)}  failing={failing}")

# %% Three independent verdicts on whether T is principal
for name in ("tube_k1_S2", "graph"):
    chart = build(name)
    print(name, class_a_verdicts(chart, chart.grid(4)[5]))

# %% Codimension: ell = 1 on the boundary h = 0, ell = 2 inside
for pq in [(2.0, 1.0), (1.5, 0.5)]:
    res = codimension_reduction_check(pad_chart(Y_chart(FamilyParams(*pq)), 2))
    print(pq, f"ell={res.ell} reduces={res.reduces} span={res.affine_dim}")
