"""Driving the command-line interface from Python.

Run with ``python demos/cli_walkthrough.py``; outputs land in demo_out/.
The same runs from a shell are ``prodgeom check --config run.cfg`` and so on.
"""
# %%
from pathlib import Path

from prodgeom.cli import main

out = Path("demo_out")
out.mkdir(exist_ok=True)
cfg = out / "run.cfg"
cfg.write_text("chart.kind = family\nfamily.p = 1.5\nfamily.q = 0.5\n"
               "sweep.p = 1.5, 2\nsweep.q_fraction = 0, 0.5\n")

# %% check, export, sweep and ode-compare share the config file
for command in ("check", "export", "sweep", "ode-compare"):
    code = main([command, "--config", str(cfg), "--out", str(out / command), "--grid", "7"])
    print(f"--> {command} exited with {code}")
print(sorted(str(p.relative_to(out)) for p in out.rglob("*.*")))
