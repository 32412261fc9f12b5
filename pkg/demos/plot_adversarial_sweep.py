"""
How the plank count grows on spread-out directions
==================================================

Adversarial instances pack well separated normals into a spherical cap,
so no two planks share much of their work.  A sweep over epsilon fits the
slope of log(planks used) against log(1/eps).
"""

from plankcover.sweep import fitted_exponents, rows_to_csv, run_sweep

config = {
    "generator": "adversarial",
    "mode": "fixed_order",
    "epsilons": [0.05, 0.03, 0.02],
    "seeds": [0, 1],
}
rows = run_sweep(config, timing=False)
print(rows_to_csv(rows))

for fit in fitted_exponents(rows):
    print(f"{fit['generator']}/{fit['mode']}: slope {fit['slope']:.3f}")
